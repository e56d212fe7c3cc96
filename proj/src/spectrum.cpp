#include "cavity_anneal/spectrum.hpp"

#include <stdexcept>

#include "cavity_anneal/parallel.hpp"

namespace cavity_anneal {

SpectrumSweep spectrum_sweep(const AnnealParams& params, int n_levels, int n_grid,
                             unsigned workers) {
  if (params.model == Model::semiclassical)
    throw std::invalid_argument("spectrum_sweep: the mean-field Hamiltonian has no fixed spectrum");
  if (n_grid < 2) throw std::invalid_argument("spectrum_sweep: n_grid must be >= 2");
  const auto dim = params.model == Model::full ? full_basis(params).dim()
                                               : lattice_basis(params).dim();
  if (n_levels < 1 || static_cast<std::size_t>(n_levels) > dim)
    throw std::invalid_argument("spectrum_sweep: n_levels must lie in [1, dim]");

  SpectrumSweep out;
  out.model = params.model;
  out.relative = Eigen::MatrixXd::Zero(n_grid, n_levels);
  out.ground = Eigen::VectorXd::Zero(n_grid);
  for (int i = 0; i < n_grid; ++i) {
    const double s = static_cast<double>(i) / (n_grid - 1);
    out.s.push_back(s);
    out.Jt.push_back(s * params.Jt_final);
  }

  parallel_for(static_cast<std::size_t>(n_grid), workers, [&](std::size_t i) {
    const double Jt = out.Jt[i];
    const auto h = params.model == Model::full ? h_full(params, Jt) : h_adiabatic(params, Jt);
    const auto e = eigenvalues(h);
    const auto row = static_cast<Eigen::Index>(i);
    out.ground(row) = e(0);
    for (int k = 0; k < n_levels; ++k) out.relative(row, k) = e(k) - e(0);
  });
  return out;
}

GapEstimate minimal_gap(const SpectrumSweep& sweep) {
  if (sweep.relative.cols() < 2) throw std::invalid_argument("minimal_gap: need two levels");
  const Eigen::Index n = sweep.relative.rows();
  if (n < 1) throw std::invalid_argument("minimal_gap: empty sweep");

  Eigen::Index best = 0;
  sweep.relative.col(1).minCoeff(&best);
  const auto i = static_cast<std::size_t>(best);
  GapEstimate out{sweep.relative(best, 1), sweep.s[i], false};
  if (best == 0 || best == n - 1) return out;

  const double left = sweep.relative(best - 1, 1);
  const double mid = sweep.relative(best, 1);
  const double right = sweep.relative(best + 1, 1);
  const double curvature = left - 2.0 * mid + right;
  if (!(curvature > 0)) return out;

  const double h = sweep.s[i + 1] - sweep.s[i];
  out.s = sweep.s[i] + 0.5 * h * (left - right) / curvature;
  out.gap = mid - (left - right) * (left - right) / (8.0 * curvature);
  out.refined = true;
  return out;
}

std::vector<ImpurityGap> gap_vs_impurity(const AnnealParams& params,
                                         const std::vector<double>& V_grid, int n_grid,
                                         unsigned workers) {
  std::vector<ImpurityGap> out(V_grid.size());
  parallel_for(V_grid.size(), workers, [&](std::size_t i) {
    AnnealParams p = params;
    p.V = V_grid[i];
    out[i] = {p.V, minimal_gap(spectrum_sweep(p, 2, n_grid))};
  });
  return out;
}

}  // namespace cavity_anneal
