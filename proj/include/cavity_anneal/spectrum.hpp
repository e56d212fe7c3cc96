#pragma once

#include <vector>

#include "cavity_anneal/hamiltonians.hpp"

namespace cavity_anneal {

/// Lowest eigenvalues along the pump ramp, relative to the ground energy.
struct SpectrumSweep {
  Model model = Model::full;
  std::vector<double> s;       // uniform grid on [0, 1]
  std::vector<double> Jt;      // s * Jt_final
  Eigen::MatrixXd relative;    // rows: grid points, cols: levels; column 0 is zero
  Eigen::VectorXd ground;      // absolute E0 per grid point
};

/// Dense eigensolve of the model Hamiltonian at n_grid evenly spaced s.
/// Only the full and adiabatic models have a state-independent spectrum.
SpectrumSweep spectrum_sweep(const AnnealParams& params, int n_levels = 10, int n_grid = 201,
                             unsigned workers = 1);

struct GapEstimate {
  double gap = 0;
  double s = 0;
  bool refined = false;  // false when the grid minimum sits at an endpoint
};

/// Grid minimum of E1 - E0, refined by a parabola through the minimum and
/// its neighbours.
GapEstimate minimal_gap(const SpectrumSweep& sweep);

struct ImpurityGap {
  double V = 0;
  GapEstimate gap;
};

std::vector<ImpurityGap> gap_vs_impurity(const AnnealParams& params,
                                         const std::vector<double>& V_grid, int n_grid = 201,
                                         unsigned workers = 1);

}  // namespace cavity_anneal
