#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cavity_anneal/csv.hpp"
#include "cavity_anneal/dynamics.hpp"

namespace cavity_anneal {

struct Axis {
  std::string name;
  std::vector<double> values;
  std::vector<std::string> labels;  // optional display names, e.g. model names
};

struct CellRecord {
  std::vector<std::size_t> index;  // one entry per axis
  AnnealParams params;
  std::uint64_t params_hash = 0;
  bool ok = false;
  std::string error;  // abort reason of a failed cell

  double final_fidelity = 0;
  double neg_log_infidelity = 0;  // -log10(1 - F)
  double final_atomic_fidelity = 0;
  double final_p_two_site3 = 0;
  double final_entropy = 0;
  double max_entropy = 0;
  std::vector<double> photon_distribution;  // mode 1, full model only
};

/// Cells are stored row-major over the axes (last axis fastest).
struct SweepResult {
  std::string kind;
  std::vector<Axis> axes;
  std::vector<CellRecord> cells;
  KeyValues provenance;

  std::size_t flat_index(const std::vector<std::size_t>& index) const;
  const CellRecord& at(const std::vector<std::size_t>& index) const;
};

struct SweepOptions {
  int cadence = 100;
  unsigned workers = 1;
};

/// Evolves `params` once and summarizes it as a cell. Numerical aborts and
/// invalid parameters become failed cells.
CellRecord run_cell(const AnnealParams& params, int cadence);

/// U x V grid of annealing runs of one model at params.t_f.
SweepResult phase_diagram(Model model, const std::vector<double>& U_grid,
                          const std::vector<double>& V_grid, const AnnealParams& params,
                          const SweepOptions& options = {});

/// model x t_f grid.
SweepResult ramp_time_scan(const std::vector<Model>& models, const std::vector<double>& tf_grid,
                           const AnnealParams& params, const SweepOptions& options = {});

/// Full model over photon cutoff x t_f.
SweepResult cutoff_scan(const std::vector<int>& nc_set, const std::vector<double>& tf_grid,
                        const AnnealParams& params, const SweepOptions& options = {});

/// a, a + step, ..., up to b inclusive (with a small tolerance on the end).
std::vector<double> make_grid(double a, double b, double step);

}  // namespace cavity_anneal
