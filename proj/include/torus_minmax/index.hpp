#pragma once

// Second variation of length at a critical curve.

#include <Eigen/Dense>
#include <algorithm>
#include <string>
#include <vector>

#include "geodesic.hpp"

namespace torus_minmax {

struct IndexEstimate {
  int negative_count = 0;
  double smallest = 0.0;
  double threshold = 0.0;  ///< eigenvalues below -threshold count as negative
  std::vector<double> lowest;  ///< a few lowest eigenvalues, ascending
};

/// Counts negative eigenvalues of the length Hessian restricted to
/// per-vertex normal perturbations (reparametrization directions removed).
inline IndexEstimate index_estimate(const PeriodicMetric& g, const DiscreteCurve& c, int quad_order = 2,
                                    double crit_tol = 1e-6) {
  c.validate();
  const double gsup = normal_gradient_sup(g, c, quad_order);
  if (!(gsup < crit_tol))
    throw UsageError("index_estimate: curve is not critical (normal gradient sup " + std::to_string(gsup) + ")");
  const auto nrm = vertex_normals(c);
  std::vector<Vec2> grad;
  BandMatrix H;
  normal_system(g, c, nrm, Quadrature(quad_order), grad, H);
  const auto n = static_cast<Eigen::Index>(c.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = (i + 1) % n;
    A(i, i) += H.diag[static_cast<std::size_t>(i)];
    A(i, j) += H.off[static_cast<std::size_t>(i)];
    A(j, i) += H.off[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  IndexEstimate out;
  out.threshold = 1e-8 * mean_edge_length(c);
  const auto& ev = es.eigenvalues();
  out.smallest = ev(0);
  for (Eigen::Index i = 0; i < n; ++i)
    if (ev(i) < -out.threshold) ++out.negative_count;
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(n, 4); ++i) out.lowest.push_back(ev(i));
  return out;
}

/// Newton iteration on the normal gradient without a descent requirement, so
/// it converges to nearby saddles as well as minima. Returns the polished
/// curve and its final normal gradient sup.
inline std::pair<DiscreteCurve, double> newton_polish(const PeriodicMetric& g, DiscreteCurve c, int max_iters = 40,
                                                      int quad_order = 2, double max_step = 0.02) {
  const Quadrature q(quad_order);
  std::vector<Vec2> grad;
  BandMatrix H;
  auto sup_of = [&](const DiscreteCurve& x, std::vector<double>* gn_out, std::vector<Vec2>* nrm_out) {
    const auto nrm = vertex_normals(x);
    normal_system(g, x, nrm, q, grad, H);
    double s = 0.0;
    std::vector<double> gn(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      gn[i] = dot(grad[i], nrm[i]);
      s = std::max(s, std::abs(gn[i]));
    }
    if (gn_out) *gn_out = std::move(gn);
    if (nrm_out) *nrm_out = nrm;
    return s;
  };
  std::vector<double> gn;
  std::vector<Vec2> nrm;
  double sup = sup_of(c, &gn, &nrm);
  for (int it = 0; it < max_iters && sup > 1e-12; ++it) {
    const BandMatrix Hc = H;
    double scale = 0.0;
    for (double d : Hc.diag) scale += std::abs(d);
    scale /= static_cast<double>(Hc.size());
    std::vector<double> s(gn.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = -gn[i];
    if (!Hc.solve(s, 1e-10 * scale)) break;
    double smax = 0.0;
    for (double x : s) smax = std::max(smax, std::abs(x));
    double t = smax > max_step ? max_step / smax : 1.0;
    bool improved = false;
    for (int bt = 0; bt < 20 && !improved; ++bt, t *= 0.5) {
      DiscreteCurve trial = c;
      for (std::size_t i = 0; i < c.size(); ++i) trial.vertices[i] += (t * s[i]) * nrm[i];
      std::vector<double> gn2;
      std::vector<Vec2> nrm2;
      const double sup2 = sup_of(trial, &gn2, &nrm2);
      if (sup2 < sup) {
        c = std::move(trial);
        sup = sup2;
        gn = std::move(gn2);
        nrm = std::move(nrm2);
        improved = true;
      }
    }
    if (!improved) break;
  }
  return {std::move(c), sup};
}

}  // namespace torus_minmax
