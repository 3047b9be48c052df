#include "maskmix/metrics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace maskmix::metrics {

namespace {

// Gram matrix of the delayed copies d_j[n] = r[n-j] (zero below index 0):
// G(i, j) = sum_{m=0}^{N-1-max(i,j)} r[m + |i-j|] * r[m].
// Computed exactly, one lag at a time via a running sum. The exact Gram (as
// opposed to its Toeplitz autocorrelation approximation) is what makes the
// projection of an in-span estimate, e.g. a delayed copy, come out with zero
// residual.
Eigen::MatrixXd delay_gram(const std::vector<double>& r, int L) {
  const auto n = static_cast<int>(r.size());
  Eigen::MatrixXd g(L, L);
  for (int k = 0; k < L; ++k) {
    // Walk the diagonal from the largest max(i,j) down; the summation limit
    // grows by one per step, so each product is accumulated exactly once.
    double acc = 0.0;
    int pos = 0;
    for (int mx = L - 1; mx >= k; --mx) {
      const int limit = n - 1 - mx;
      for (; pos <= limit; ++pos) acc += r[pos + k] * r[pos];
      g(mx - k, mx) = acc;
      g(mx, mx - k) = acc;
    }
  }
  return g;
}

}  // namespace

Projection project_target(const audio::AudioClip& estimate, const audio::AudioClip& reference,
                          const ProjectionConfig& cfg) {
  if (cfg.filter_len < 1) throw std::invalid_argument("project_target: filter_len must be >= 1");
  if (cfg.exclude_edge < 0) throw std::invalid_argument("project_target: exclude_edge must be >= 0");
  if (estimate.samples.size() != reference.samples.size())
    throw std::invalid_argument("project_target: length mismatch");
  if (estimate.rate != reference.rate)
    throw std::invalid_argument("project_target: rate mismatch");
  const auto total = static_cast<long long>(estimate.samples.size());
  if (total < cfg.filter_len + 2LL * cfg.exclude_edge)
    throw std::invalid_argument("project_target: signals too short for filter_len and edges");

  const int i0 = cfg.exclude_edge;
  const auto n = static_cast<int>(total - 2LL * cfg.exclude_edge);
  std::vector<double> e(estimate.samples.begin() + i0, estimate.samples.begin() + i0 + n);
  std::vector<double> r(reference.samples.begin() + i0, reference.samples.begin() + i0 + n);

  double r_energy = 0.0;
  for (double v : r) r_energy += v * v;
  if (r_energy == 0.0) throw std::runtime_error("project_target: degenerate reference");

  const int L = cfg.filter_len;
  Eigen::MatrixXd g = delay_gram(r, L);

  Eigen::VectorXd d(L);
  for (int i = 0; i < L; ++i) {
    double acc = 0.0;
    for (int m = i; m < n; ++m) acc += e[m] * r[m - i];
    d[i] = acc;
  }

  const double ridge = 1e-12 * g.trace() / L;
  Eigen::MatrixXd g_reg = g;
  g_reg.diagonal().array() += ridge;

  Eigen::LDLT<Eigen::MatrixXd> solver(g_reg);
  Eigen::VectorXd c = solver.solve(d);
  c += solver.solve(d - g_reg * c);  // one refinement step

  Projection proj;
  proj.s_target.assign(n, 0.0);
  proj.e_artif.resize(n);
  for (int k = 0; k < L; ++k) {
    const double ck = c[k];
    for (int m = k; m < n; ++m) proj.s_target[m] += ck * r[m - k];
  }
  for (int m = 0; m < n; ++m) proj.e_artif[m] = e[m] - proj.s_target[m];
  return proj;
}

SarResult sar(const audio::AudioClip& estimate, const audio::AudioClip& reference,
              const ProjectionConfig& cfg) {
  Projection proj = project_target(estimate, reference, cfg);
  double target_energy = 0.0, artifact_energy = 0.0;
  for (double v : proj.s_target) target_energy += v * v;
  for (double v : proj.e_artif) artifact_energy += v * v;

  if (target_energy == 0.0)
    throw std::runtime_error("sar: estimate orthogonal to reference");

  SarResult result;
  const double cap_ratio = std::pow(10.0, -cfg.sar_cap_db / 10.0);
  if (artifact_energy / target_energy < cap_ratio) {
    result.sar_db = cfg.sar_cap_db;
    result.capped = true;
  } else {
    result.sar_db = 10.0 * std::log10(target_energy / artifact_energy);
    result.capped = false;
  }
  return result;
}

}  // namespace maskmix::metrics
