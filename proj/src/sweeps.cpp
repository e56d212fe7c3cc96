#include "cavity_anneal/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cavity_anneal/observables.hpp"
#include "cavity_anneal/parallel.hpp"

namespace cavity_anneal {

namespace {

double neg_log10_infidelity(double f) {
  return -std::log10(std::max(1.0 - f, 1e-16));
}

KeyValues base_provenance(const std::string& kind, const AnnealParams& params,
                          const SweepOptions& options) {
  KeyValues out{{"code_version", kCodeVersion}, {"sweep", kind}};
  for (auto& kv : param_entries(params)) out.push_back(kv);
  out.emplace_back("cadence", std::to_string(options.cadence));
  out.emplace_back("workers", std::to_string(options.workers));
  return out;
}

void require_nonempty(const std::vector<double>& grid, const char* name) {
  if (grid.empty()) throw std::invalid_argument(std::string(name) + " grid is empty");
}

// Fills result.cells for every index of the axes, using `configure` to map
// an index tuple onto run parameters.
template <typename Configure>
void run_grid(SweepResult& result, const SweepOptions& options, Configure&& configure) {
  std::size_t total = 1;
  for (const auto& axis : result.axes) total *= axis.values.size();
  result.cells.assign(total, CellRecord{});

  parallel_for(total, options.workers, [&](std::size_t flat) {
    std::vector<std::size_t> index(result.axes.size());
    std::size_t rest = flat;
    for (std::size_t a = result.axes.size(); a-- > 0;) {
      index[a] = rest % result.axes[a].values.size();
      rest /= result.axes[a].values.size();
    }
    CellRecord cell = run_cell(configure(index), options.cadence);
    cell.index = std::move(index);
    result.cells[flat] = std::move(cell);
  });
}

}  // namespace

std::size_t SweepResult::flat_index(const std::vector<std::size_t>& index) const {
  if (index.size() != axes.size()) throw std::invalid_argument("SweepResult: wrong index rank");
  std::size_t flat = 0;
  for (std::size_t a = 0; a < axes.size(); ++a) {
    if (index[a] >= axes[a].values.size()) throw std::out_of_range("SweepResult: index out of range");
    flat = flat * axes[a].values.size() + index[a];
  }
  return flat;
}

const CellRecord& SweepResult::at(const std::vector<std::size_t>& index) const {
  return cells.at(flat_index(index));
}

CellRecord run_cell(const AnnealParams& params, int cadence) {
  CellRecord cell;
  cell.params = params;
  cell.params_hash = params_hash(params);
  try {
    const auto record = evolve(params, Schedule::from(params), cadence);
    cell.ok = true;
    cell.final_fidelity = record.final_fidelity;
    cell.neg_log_infidelity = neg_log10_infidelity(record.final_fidelity);
    cell.final_atomic_fidelity = record.final_atomic_fidelity;
    cell.final_p_two_site3 = record.final_p_two_site3;
    cell.final_entropy = record.final_entropy;
    cell.max_entropy = record.max_entropy;
    if (params.model == Model::full)
      cell.photon_distribution = photon_distribution(record.final_state, 1);
  } catch (const std::exception& e) {
    cell.ok = false;
    cell.error = e.what();
  }
  return cell;
}

SweepResult phase_diagram(Model model, const std::vector<double>& U_grid,
                          const std::vector<double>& V_grid, const AnnealParams& params,
                          const SweepOptions& options) {
  if (model == Model::adiabatic)
    throw std::invalid_argument("phase_diagram: model must be full or semiclassical");
  require_nonempty(U_grid, "U");
  require_nonempty(V_grid, "V");

  AnnealParams base = params;
  base.model = model;
  SweepResult result{"phase-diagram", {{"U", U_grid, {}}, {"V", V_grid, {}}}, {},
                     base_provenance("phase-diagram", base, options)};
  run_grid(result, options, [&](const std::vector<std::size_t>& i) {
    AnnealParams p = base;
    p.U = U_grid[i[0]];
    p.V = V_grid[i[1]];
    return p;
  });
  return result;
}

SweepResult ramp_time_scan(const std::vector<Model>& models, const std::vector<double>& tf_grid,
                           const AnnealParams& params, const SweepOptions& options) {
  if (models.empty()) throw std::invalid_argument("ramp_time_scan: no models");
  require_nonempty(tf_grid, "t_f");
  for (std::size_t i = 0; i < tf_grid.size(); ++i)
    if (!(tf_grid[i] > 0) || (i > 0 && !(tf_grid[i] > tf_grid[i - 1])))
      throw std::invalid_argument("ramp_time_scan: t_f grid must be positive and ascending");

  Axis model_axis{"model", {}, {}};
  for (std::size_t m = 0; m < models.size(); ++m) {
    model_axis.values.push_back(static_cast<double>(m));
    model_axis.labels.emplace_back(to_string(models[m]));
  }
  SweepResult result{"ramp-scan", {model_axis, {"t_f", tf_grid, {}}}, {},
                     base_provenance("ramp-scan", params, options)};
  run_grid(result, options, [&](const std::vector<std::size_t>& i) {
    AnnealParams p = params;
    p.model = models[i[0]];
    p.t_f = tf_grid[i[1]];
    return p;
  });
  return result;
}

SweepResult cutoff_scan(const std::vector<int>& nc_set, const std::vector<double>& tf_grid,
                        const AnnealParams& params, const SweepOptions& options) {
  if (nc_set.empty()) throw std::invalid_argument("cutoff_scan: empty nc set");
  for (int nc : nc_set)
    if (nc < 1 || nc > 4) throw std::invalid_argument("cutoff_scan: nc must lie in {1,2,3,4}");
  require_nonempty(tf_grid, "t_f");
  for (std::size_t i = 0; i < tf_grid.size(); ++i)
    if (!(tf_grid[i] > 0) || (i > 0 && !(tf_grid[i] > tf_grid[i - 1])))
      throw std::invalid_argument("cutoff_scan: t_f grid must be positive and ascending");

  AnnealParams base = params;
  base.model = Model::full;
  Axis nc_axis{"nc", {}, {}};
  for (int nc : nc_set) nc_axis.values.push_back(nc);
  SweepResult result{"cutoff-scan", {nc_axis, {"t_f", tf_grid, {}}}, {},
                     base_provenance("cutoff-scan", base, options)};
  run_grid(result, options, [&](const std::vector<std::size_t>& i) {
    AnnealParams p = base;
    p.nc = nc_set[i[0]];
    p.t_f = tf_grid[i[1]];
    return p;
  });
  return result;
}

std::vector<double> make_grid(double a, double b, double step) {
  if (!(step > 0) || !std::isfinite(a) || !std::isfinite(b) || b < a)
    throw std::invalid_argument("grid needs a <= b and step > 0");
  std::vector<double> out;
  const long n = static_cast<long>(std::floor((b - a) / step + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * step);
  return out;
}

}  // namespace cavity_anneal
