#include "cavity_anneal/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "cavity_anneal/dynamics.hpp"
#include "cavity_anneal/spectrum.hpp"
#include "cavity_anneal/svg.hpp"
#include "cavity_anneal/sweeps.hpp"

namespace cavity_anneal::cli {

namespace {

// Shortest text that parses back to the same double, so headers can be
// replayed exactly.
std::string exact(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  double v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v))
    throw ConfigError(key + ": '" + text + "' is not a finite number");
  return v;
}

long parse_long(const std::string& key, const std::string& text) {
  long v = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw ConfigError(key + ": '" + text + "' is not an integer");
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const long v = parse_long(key, text);
  if (v < -1000000 || v > 1000000) throw ConfigError(key + ": value out of range");
  return static_cast<int>(v);
}

GridSpec parse_grid(const std::string& key, const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ConfigError(key + ": expected a:b:step, got '" + text + "'");
  GridSpec g{parse_double(key, parts[0]), parse_double(key, parts[1]),
             parse_double(key, parts[2])};
  if (!(g.step > 0) || g.last < g.first)
    throw ConfigError(key + ": need a <= b and step > 0");
  return g;
}

std::string grid_text(const GridSpec& g) {
  return exact(g.first) + ":" + exact(g.last) + ":" + exact(g.step);
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += fmt(items[i]);
  }
  return out;
}

unsigned default_workers() {
  if (const char* env = std::getenv("CAVITY_ANNEAL_WORKERS")) {
    const std::string text = env;
    const long v = parse_long("CAVITY_ANNEAL_WORKERS", text);
    if (v < 1) throw ConfigError("CAVITY_ANNEAL_WORKERS must be >= 1");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "command", "code_version", "J",      "U",       "V",        "Jt",      "Delta",
      "kappa",   "nc",           "L",      "N",       "t_f",      "dt",      "model",
      "out",     "grid-U",       "grid-V", "tf-grid", "nc-set",   "models",  "workers",
      "cadence", "plots",        "levels", "points"};
  return keys;
}

void apply(RunConfig& c, const std::string& key, const std::string& value) {
  auto& p = c.params;
  if (key == "command") {
    if (!c.command.empty() && c.command != value)
      throw ConfigError("config file is for command '" + value + "', not '" + c.command + "'");
    c.command = value;
  } else if (key == "code_version") {
    // Informational.
  } else if (key == "J") {
    p.J = parse_double(key, value);
  } else if (key == "U") {
    p.U = parse_double(key, value);
  } else if (key == "V") {
    p.V = parse_double(key, value);
  } else if (key == "Jt") {
    p.Jt_final = parse_double(key, value);
  } else if (key == "Delta") {
    p.Delta = parse_double(key, value);
  } else if (key == "kappa") {
    p.kappa = parse_double(key, value);
  } else if (key == "nc") {
    p.nc = parse_int(key, value);
  } else if (key == "L") {
    p.sites = parse_int(key, value);
  } else if (key == "N") {
    p.particles = parse_int(key, value);
  } else if (key == "t_f") {
    p.t_f = parse_double(key, value);
  } else if (key == "dt") {
    p.dt = parse_double(key, value);
  } else if (key == "model") {
    try {
      p.model = parse_model(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "out") {
    if (value.empty()) throw ConfigError("out: empty path");
    c.out_dir = value;
  } else if (key == "grid-U") {
    c.grid_U = parse_grid(key, value);
  } else if (key == "grid-V") {
    c.grid_V = parse_grid(key, value);
  } else if (key == "tf-grid") {
    c.tf_grid.clear();
    for (const auto& item : split(value, ',')) c.tf_grid.push_back(parse_double(key, item));
  } else if (key == "nc-set") {
    c.nc_set.clear();
    for (const auto& item : split(value, ',')) c.nc_set.push_back(parse_int(key, item));
  } else if (key == "models") {
    c.models.clear();
    for (const auto& item : split(value, ',')) {
      try {
        c.models.push_back(parse_model(item));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  } else if (key == "workers") {
    const long w = parse_long(key, value);
    if (w < 1) throw ConfigError("workers must be >= 1");
    c.workers = static_cast<unsigned>(w);
  } else if (key == "cadence") {
    c.cadence = parse_int(key, value);
  } else if (key == "plots") {
    if (value == "on") c.plots = true;
    else if (value == "off") c.plots = false;
    else throw ConfigError("plots: expected on or off");
  } else if (key == "levels") {
    c.levels = parse_int(key, value);
  } else if (key == "points") {
    c.points = parse_int(key, value);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

void validate(RunConfig& c) {
  if (c.command.empty()) throw ConfigError("missing subcommand");
  if (std::find(std::begin(kCommands), std::end(kCommands), c.command) == std::end(kCommands))
    throw ConfigError("unknown subcommand '" + c.command + "'");

  // The mean-field phase diagram is drawn at weaker pumping by default.
  if (c.command == "phase-diagram" && c.params.model == Model::semiclassical) {
    if (!c.explicit_keys.contains("Delta")) c.params.Delta = -1.0;
    if (!c.explicit_keys.contains("Jt")) c.params.Jt_final = 1.0;
  }

  try {
    c.params.validate();
    step_count(c.params.t_f, c.params.dt);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (c.cadence < 1) throw ConfigError("cadence must be >= 1");
  if (c.levels < 1) throw ConfigError("levels must be >= 1");
  if (c.points < 2) throw ConfigError("points must be >= 2");
  if (c.tf_grid.empty()) throw ConfigError("tf-grid is empty");
  for (std::size_t i = 0; i < c.tf_grid.size(); ++i) {
    if (!(c.tf_grid[i] > 0) || (i && !(c.tf_grid[i] > c.tf_grid[i - 1])))
      throw ConfigError("tf-grid must be positive and ascending");
    try {
      step_count(c.tf_grid[i], c.params.dt);
    } catch (const std::invalid_argument&) {
      throw ConfigError("dt does not divide t_f = " + exact(c.tf_grid[i]));
    }
  }
  if (c.nc_set.empty()) throw ConfigError("nc-set is empty");
  for (int nc : c.nc_set)
    if (nc < 1 || nc > 4) throw ConfigError("nc-set entries must lie in 1..4");
  if (c.models.empty()) throw ConfigError("models is empty");

  if (c.command == "spectrum" && c.params.model == Model::semiclassical)
    throw ConfigError("spectrum: the semiclassical Hamiltonian has no state-independent spectrum");
  if (c.command == "phase-diagram" && c.params.model == Model::adiabatic)
    throw ConfigError("phase-diagram: model must be full or semiclassical");
  if (c.command == "spectrum") {
    const auto dim = c.params.model == Model::full ? full_basis(c.params).dim()
                                                   : lattice_basis(c.params).dim();
    if (static_cast<std::size_t>(c.levels) > dim)
      throw ConfigError("levels exceeds the Hilbert-space dimension " + std::to_string(dim));
  }
}

// ---------------------------------------------------------------------------
// Output

std::ofstream open_output(const RunConfig& c, const std::string& name) {
  std::filesystem::create_directories(c.out_dir);
  std::ofstream out(c.out_dir / name);
  if (!out) throw std::runtime_error("cannot write " + (c.out_dir / name).string());
  return out;
}

void write_svg(const RunConfig& c, const std::string& name, const std::string& content) {
  if (!c.plots) return;
  auto out = open_output(c, name);
  out << content;
}

std::vector<std::string> header_fields(std::initializer_list<std::string> names) {
  return std::vector<std::string>(names);
}

int run_spectrum(const RunConfig& c, std::ostream& out) {
  const auto sweep = spectrum_sweep(c.params, c.levels, c.points, c.workers);
  {
    auto csv = open_output(c, "spectrum.csv");
    write_header(csv, config_entries(c));
    std::vector<std::string> head{"s", "Jt"};
    for (int k = 0; k < c.levels; ++k) head.push_back("E" + std::to_string(k + 1) + "_rel");
    write_row(csv, head);
    for (std::size_t i = 0; i < sweep.s.size(); ++i) {
      std::vector<std::string> row{format_number(sweep.s[i]), format_number(sweep.Jt[i])};
      for (int k = 0; k < c.levels; ++k)
        row.push_back(format_number(sweep.relative(static_cast<Eigen::Index>(i), k)));
      write_row(csv, row);
    }
  }

  svg::LinePlot plot{"Spectrum relative to the ground state", "pump amplitude Jt",
                     "E_n - E_0 (recoil)", {}};
  for (int k = 1; k < c.levels; ++k) {
    std::vector<double> y(sweep.s.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = sweep.relative(static_cast<Eigen::Index>(i), k);
    plot.series.push_back({"E" + std::to_string(k), sweep.Jt, y, false});
  }
  write_svg(c, "spectrum.svg", svg::render(plot));

  if (c.levels >= 2) {
    const auto gap = minimal_gap(sweep);
    out << "minimal gap " << format_number(gap.gap) << " at s = " << format_number(gap.s)
        << " (Jt = " << format_number(gap.s * c.params.Jt_final) << ")"
        << (gap.refined ? "" : " [grid endpoint, unrefined]") << '\n';
  } else {
    out << "spectrum written (" << sweep.s.size() << " points)\n";
  }
  return 0;
}

int run_gap_scan(const RunConfig& c, std::ostream& out) {
  const auto V = c.grid_V.values();
  const auto gaps = gap_vs_impurity(c.params, V, c.points, c.workers);
  bool monotone = true;
  for (std::size_t i = 1; i < gaps.size(); ++i)
    if (!(gaps[i].gap.gap > gaps[i - 1].gap.gap)) monotone = false;

  {
    auto csv = open_output(c, "gap_scan.csv");
    write_header(csv, config_entries(c));
    write_row(csv, header_fields({"V", "min_gap", "s_at_min", "refined"}));
    for (const auto& g : gaps)
      write_row(csv, {format_number(g.V), format_number(g.gap.gap), format_number(g.gap.s),
                      g.gap.refined ? "1" : "0"});
  }
  std::vector<double> y;
  for (const auto& g : gaps) y.push_back(g.gap.gap);
  write_svg(c, "gap_vs_V.svg",
            svg::render(svg::LinePlot{"Minimal gap vs impurity", "V", "min gap (recoil)",
                                      {{"min gap", V, y, false}}}));
  out << "gap scan over " << gaps.size() << " values of V; "
      << (monotone ? "monotone increasing" : "NOT monotone") << "; gap(V="
      << format_number(gaps.front().V) << ") = " << format_number(gaps.front().gap.gap)
      << ", gap(V=" << format_number(gaps.back().V) << ") = " << format_number(gaps.back().gap.gap)
      << '\n';
  return 0;
}

int run_anneal(const RunConfig& c, std::ostream& out) {
  const auto record = evolve(c.params, Schedule::from(c.params), c.cadence);
  {
    auto csv = open_output(c, "trajectory.csv");
    write_header(csv, config_entries(c));
    write_row(csv, header_fields({"t", "Jt", "n1", "n2", "n3", "n4", "photons1", "photons2",
                                  "fidelity", "atomic_fidelity", "p_two_site3", "entropy_nats",
                                  "norm", "energy", "alpha1_re", "alpha1_im", "alpha2_re",
                                  "alpha2_im"}));
    for (const auto& s : record.samples) {
      std::vector<std::string> row{format_number(s.t), format_number(s.Jt)};
      for (double n : s.occupations) row.push_back(format_number(n));
      row.push_back(format_optional(s.photons1));
      row.push_back(format_optional(s.photons2));
      row.push_back(format_number(s.fidelity));
      row.push_back(format_number(s.atomic_fidelity));
      row.push_back(format_number(s.p_two_site3));
      row.push_back(format_optional(s.entropy));
      row.push_back(format_number(s.norm));
      row.push_back(format_number(s.energy));
      if (s.alphas) {
        for (Complex a : {s.alphas->alpha1, s.alphas->alpha2}) {
          row.push_back(format_number(a.real()));
          row.push_back(format_number(a.imag()));
        }
      } else {
        row.insert(row.end(), 4, "");
      }
      write_row(csv, row);
    }
  }

  if (c.plots) {
    std::vector<double> t, Jt, f, fa, p3, n1, n2, nsum, S;
    std::vector<std::vector<double>> occ(4);
    for (const auto& s : record.samples) {
      t.push_back(s.t);
      Jt.push_back(s.Jt);
      f.push_back(s.fidelity);
      fa.push_back(s.atomic_fidelity);
      p3.push_back(s.p_two_site3);
      for (std::size_t k = 0; k < 4 && k < s.occupations.size(); ++k) occ[k].push_back(s.occupations[k]);
      if (s.photons1) {
        n1.push_back(*s.photons1);
        n2.push_back(*s.photons2);
        nsum.push_back(*s.photons1 + *s.photons2);
      }
      if (s.entropy) S.push_back(*s.entropy);
    }
    svg::LinePlot occupations{"Site occupations", "t (1/recoil)", "<n_k>", {}};
    for (std::size_t k = 0; k < 4; ++k)
      occupations.series.push_back({"site " + std::to_string(k + 1), t, occ[k], false});
    write_svg(c, "occupations.svg", svg::render(occupations));
    write_svg(c, "fidelity.svg",
              svg::render(svg::LinePlot{"Overlap with the target", "t (1/recoil)", "probability",
                                        {{"fidelity", t, f, false},
                                         {"atomic", t, fa, false},
                                         {"P(n3=2)", t, p3, true}}}));
    if (!n1.empty())
      write_svg(c, "photons.svg",
                svg::render(svg::LinePlot{"Cavity photon numbers", "pump amplitude Jt", "<a^dag a>",
                                          {{"mode 1", Jt, n1, false},
                                           {"mode 2", Jt, n2, false},
                                           {"sum", Jt, nsum, true}}}));
    if (!S.empty())
      write_svg(c, "entropy.svg",
                svg::render(svg::LinePlot{"Atom-field entanglement", "t (1/recoil)", "S (nats)",
                                          {{"entropy", t, S, false}}}));
  }

  out << "final fidelity " << format_number(record.final_fidelity) << ", P(n3=2) "
      << format_number(record.final_p_two_site3);
  if (c.params.model == Model::full)
    out << ", final entropy " << format_number(record.final_entropy) << " nats, max entropy "
        << format_number(record.max_entropy) << " nats";
  out << '\n';
  return 0;
}

std::string cell_params_text(const CellRecord& cell) {
  std::string out;
  for (const auto& [k, v] : param_entries(cell.params)) out += k + "=" + v + " ";
  return out;
}

int report_failures(const SweepResult& result, std::ostream& err) {
  int failed = 0;
  for (const auto& cell : result.cells)
    if (!cell.ok) {
      ++failed;
      err << "cell failed: " << cell.error << " [" << cell_params_text(cell) << "]\n";
    }
  return failed;
}

std::vector<std::string> cell_fields(const CellRecord& cell) {
  if (!cell.ok) return {"", "", "", "", "", "", "0", cell.error};
  return {format_number(cell.final_fidelity),   format_number(cell.neg_log_infidelity),
          format_number(cell.final_atomic_fidelity), format_number(cell.final_p_two_site3),
          format_number(cell.final_entropy),    format_number(cell.max_entropy),
          "1",                                  ""};
}

const std::vector<std::string> kCellColumns = {"fidelity",      "neg_log10_infidelity",
                                               "atomic_fidelity", "p_two_site3",
                                               "final_entropy_nats", "max_entropy_nats",
                                               "ok",            "error"};

double value_or_nan(const CellRecord& cell, double CellRecord::*field) {
  return cell.ok ? cell.*field : std::nan("");
}

int run_ramp_scan(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto result = ramp_time_scan(c.models, c.tf_grid, c.params, {c.cadence, c.workers});
  {
    auto csv = open_output(c, "ramp_scan.csv");
    write_header(csv, config_entries(c));
    std::vector<std::string> head{"model", "t_f"};
    head.insert(head.end(), kCellColumns.begin(), kCellColumns.end());
    head.push_back("params_hash");
    write_row(csv, head);
    for (const auto& cell : result.cells) {
      std::vector<std::string> row{std::string(to_string(cell.params.model)),
                                   format_number(cell.params.t_f)};
      for (auto& f : cell_fields(cell)) row.push_back(std::move(f));
      row.push_back(hex_hash(cell.params_hash));
      write_row(csv, row);
    }
  }

  if (c.plots) {
    svg::LinePlot fid{"Final fidelity vs ramp time", "t_f (1/recoil)", "fidelity", {}};
    svg::LinePlot inf{"Infidelity vs ramp time", "t_f (1/recoil)", "-log10(1-F)", {}};
    svg::LinePlot ent{"Entanglement vs ramp time", "t_f (1/recoil)", "S (nats)", {}};
    for (std::size_t m = 0; m < c.models.size(); ++m) {
      std::vector<double> f, l, sf, sm;
      for (std::size_t j = 0; j < c.tf_grid.size(); ++j) {
        const auto& cell = result.at({m, j});
        f.push_back(value_or_nan(cell, &CellRecord::final_fidelity));
        l.push_back(value_or_nan(cell, &CellRecord::neg_log_infidelity));
        sf.push_back(value_or_nan(cell, &CellRecord::final_entropy));
        sm.push_back(value_or_nan(cell, &CellRecord::max_entropy));
      }
      const std::string name(to_string(c.models[m]));
      fid.series.push_back({name, c.tf_grid, f, false});
      inf.series.push_back({name, c.tf_grid, l, false});
      if (c.models[m] == Model::full) {
        ent.series.push_back({"final", c.tf_grid, sf, false});
        ent.series.push_back({"max", c.tf_grid, sm, true});
      }
    }
    write_svg(c, "ramp_scan_fidelity.svg", svg::render(fid));
    write_svg(c, "ramp_scan_infidelity.svg", svg::render(inf));
    if (!ent.series.empty()) write_svg(c, "ramp_scan_entropy.svg", svg::render(ent));
  }

  for (std::size_t m = 0; m < c.models.size(); ++m) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < c.tf_grid.size(); ++j)
      if (result.at({m, j}).ok &&
          result.at({m, j}).neg_log_infidelity > result.at({m, best}).neg_log_infidelity)
        best = j;
    out << to_string(c.models[m]) << ": best -log10(1-F) = "
        << format_number(result.at({m, best}).neg_log_infidelity) << " at t_f = "
        << format_number(c.tf_grid[best]) << "; ";
  }
  out << '\n';
  return report_failures(result, err) ? 1 : 0;
}

int run_phase_diagram(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto U = c.grid_U.values();
  const auto V = c.grid_V.values();
  const auto result = phase_diagram(c.params.model, U, V, c.params, {c.cadence, c.workers});
  {
    auto csv = open_output(c, "phase_diagram.csv");
    write_header(csv, config_entries(c));
    std::vector<std::string> head{"U", "V"};
    head.insert(head.end(), kCellColumns.begin(), kCellColumns.end());
    head.push_back("params_hash");
    write_row(csv, head);
    for (const auto& cell : result.cells) {
      std::vector<std::string> row{format_number(cell.params.U), format_number(cell.params.V)};
      for (auto& f : cell_fields(cell)) row.push_back(std::move(f));
      row.push_back(hex_hash(cell.params_hash));
      write_row(csv, row);
    }
  }

  if (c.plots) {
    std::vector<std::vector<double>> fid(V.size(), std::vector<double>(U.size()));
    auto ent = fid;
    for (std::size_t i = 0; i < U.size(); ++i)
      for (std::size_t j = 0; j < V.size(); ++j) {
        const auto& cell = result.at({i, j});
        fid[j][i] = value_or_nan(cell, &CellRecord::final_fidelity);
        ent[j][i] = value_or_nan(cell, &CellRecord::max_entropy);
      }
    const std::string model(to_string(c.params.model));
    write_svg(c, "phase_diagram_fidelity.svg",
              svg::render(svg::Heatmap{"Final fidelity (" + model + ")", "U", "V", U, V, fid}));
    if (c.params.model == Model::full)
      write_svg(c, "phase_diagram_max_entropy.svg",
                svg::render(svg::Heatmap{"Maximum entanglement entropy (nats)", "U", "V", U, V, ent}));
  }

  std::size_t ok = 0, high = 0;
  for (const auto& cell : result.cells)
    if (cell.ok) {
      ++ok;
      if (cell.final_fidelity >= 0.5) ++high;
    }
  out << to_string(c.params.model) << " phase diagram: " << result.cells.size() << " cells, "
      << high << " of " << ok << " completed cells with fidelity >= 0.5\n";
  return report_failures(result, err) ? 1 : 0;
}

int run_cutoff_scan(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const auto result = cutoff_scan(c.nc_set, c.tf_grid, c.params, {c.cadence, c.workers});
  const int max_nc = *std::max_element(c.nc_set.begin(), c.nc_set.end());
  {
    auto csv = open_output(c, "cutoff_scan.csv");
    write_header(csv, config_entries(c));
    std::vector<std::string> head{"nc", "t_f"};
    head.insert(head.end(), kCellColumns.begin(), kCellColumns.end());
    for (int n = 0; n <= max_nc; ++n) head.push_back("P_mode1_n" + std::to_string(n));
    head.push_back("params_hash");
    write_row(csv, head);
    for (const auto& cell : result.cells) {
      std::vector<std::string> row{std::to_string(cell.params.nc), format_number(cell.params.t_f)};
      for (auto& f : cell_fields(cell)) row.push_back(std::move(f));
      for (int n = 0; n <= max_nc; ++n) {
        const auto k = static_cast<std::size_t>(n);
        row.push_back(k < cell.photon_distribution.size()
                          ? format_number(cell.photon_distribution[k])
                          : std::string());
      }
      row.push_back(hex_hash(cell.params_hash));
      write_row(csv, row);
    }
  }

  if (c.plots) {
    svg::LinePlot fid{"Final fidelity per photon cutoff", "t_f (1/recoil)", "fidelity", {}};
    svg::LinePlot inf{"Infidelity per photon cutoff", "t_f (1/recoil)", "-log10(1-F)", {}};
    svg::LinePlot ent{"Entanglement per photon cutoff", "t_f (1/recoil)", "S (nats)", {}};
    svg::LinePlot photons{"Final photon distribution, mode 1 (longest t_f)", "n", "P(n)", {}};
    for (std::size_t a = 0; a < c.nc_set.size(); ++a) {
      std::vector<double> f, l, sf, sm;
      for (std::size_t j = 0; j < c.tf_grid.size(); ++j) {
        const auto& cell = result.at({a, j});
        f.push_back(value_or_nan(cell, &CellRecord::final_fidelity));
        l.push_back(value_or_nan(cell, &CellRecord::neg_log_infidelity));
        sf.push_back(value_or_nan(cell, &CellRecord::final_entropy));
        sm.push_back(value_or_nan(cell, &CellRecord::max_entropy));
      }
      const std::string name = "nc=" + std::to_string(c.nc_set[a]);
      fid.series.push_back({name, c.tf_grid, f, false});
      inf.series.push_back({name, c.tf_grid, l, false});
      ent.series.push_back({name + " final", c.tf_grid, sf, false});
      ent.series.push_back({name + " max", c.tf_grid, sm, true});
      const auto& last = result.at({a, c.tf_grid.size() - 1});
      std::vector<double> n;
      for (std::size_t k = 0; k < last.photon_distribution.size(); ++k) n.push_back(static_cast<double>(k));
      photons.series.push_back({name, n, last.photon_distribution, false});
    }
    write_svg(c, "cutoff_fidelity.svg", svg::render(fid));
    write_svg(c, "cutoff_infidelity.svg", svg::render(inf));
    write_svg(c, "cutoff_entropy.svg", svg::render(ent));
    write_svg(c, "cutoff_photons.svg", svg::render(photons));
  }

  for (std::size_t a = 0; a < c.nc_set.size(); ++a) {
    double best = -1;
    for (std::size_t j = 0; j < c.tf_grid.size(); ++j)
      if (result.at({a, j}).ok) best = std::max(best, result.at({a, j}).neg_log_infidelity);
    out << "nc=" << c.nc_set[a] << ": best -log10(1-F) = " << format_number(best) << "; ";
  }
  out << '\n';
  return report_failures(result, err) ? 1 : 0;
}

}  // namespace

std::vector<double> GridSpec::values() const {
  std::vector<double> out;
  for (double v : make_grid(first, last, step)) {
    // Snap a + i*step onto 12 significant digits so 0.15 prints as 0.15.
    out.push_back(std::stod(format_number(v)));
  }
  return out;
}

KeyValues parse_config_text(const std::string& text) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  // A CSV written by this tool starts with "# command = ..."; its header block
  // is read as settings and the table body is ignored.
  bool csv_header = false;
  while (std::getline(in, line)) {
    ++number;
    auto body = trim(line);
    if (number == 1 && body.starts_with("#") && trim(body.substr(1)).starts_with("command"))
      csv_header = true;
    if (csv_header) {
      if (body.empty()) continue;
      if (body.front() != '#') break;
      body = trim(std::string_view(body).substr(1));
    } else if (body.empty() || body.front() == '#') {
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(number) + ": expected key = value");
    auto key = trim(std::string_view(body).substr(0, eq));
    auto value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(number) + ": empty key");
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
      throw ConfigError("config line " + std::to_string(number) + ": unknown key '" + key + "'");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

RunConfig parse_config(std::span<const std::string> args) {
  CLI::App app{"Cavity-mediated quantum annealing simulator", "cavity-anneal"};
  app.set_help_flag();

  std::string command;
  std::optional<std::string> config_path;
  std::map<std::string, std::optional<std::string>> flags;
  app.add_option("command", command);
  app.add_option("--config", config_path);
  for (const auto& key : known_keys()) {
    if (key == "command" || key == "code_version") continue;
    app.add_option("--" + key, flags[key]);
  }

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }

  RunConfig c;
  c.command = command;
  c.workers = default_workers();
  if (config_path) {
    std::ifstream in(*config_path);
    if (!in) throw ConfigError("cannot read config file " + *config_path);
    std::stringstream text;
    text << in.rdbuf();
    for (const auto& [k, v] : parse_config_text(text.str())) {
      apply(c, k, v);
      c.explicit_keys.insert(k);
    }
  }
  for (const auto& [k, v] : flags) {
    if (!v) continue;
    apply(c, k, *v);
    c.explicit_keys.insert(k);
  }
  validate(c);
  return c;
}

KeyValues config_entries(const RunConfig& c) {
  const auto& p = c.params;
  return {
      {"command", c.command},
      {"code_version", kCodeVersion},
      {"model", std::string(to_string(p.model))},
      {"J", exact(p.J)},
      {"U", exact(p.U)},
      {"V", exact(p.V)},
      {"Jt", exact(p.Jt_final)},
      {"Delta", exact(p.Delta)},
      {"kappa", exact(p.kappa)},
      {"nc", std::to_string(p.nc)},
      {"L", std::to_string(p.sites)},
      {"N", std::to_string(p.particles)},
      {"t_f", exact(p.t_f)},
      {"dt", exact(p.dt)},
      {"cadence", std::to_string(c.cadence)},
      {"levels", std::to_string(c.levels)},
      {"points", std::to_string(c.points)},
      {"grid-U", grid_text(c.grid_U)},
      {"grid-V", grid_text(c.grid_V)},
      {"tf-grid", join(c.tf_grid, exact)},
      {"nc-set", join(c.nc_set, [](int n) { return std::to_string(n); })},
      {"models", join(c.models, [](Model m) { return std::string(to_string(m)); })},
  };
}

std::string usage() {
  return R"(usage: cavity-anneal <command> [options]

commands:
  spectrum        lowest eigenvalues along the pump ramp and the minimal gap
  gap-scan        minimal gap as a function of the impurity depth V
  anneal          one annealing run; trajectory of occupations, fidelity, photons, entropy
  ramp-scan       final fidelity and entanglement versus ramp time t_f
  phase-diagram   final fidelity over a U x V grid
  cutoff-scan     full model over photon cutoffs and ramp times

options (also accepted as `key = value` lines in a --config file):
  --config <path>       read settings from a file; flags override it
  --out <dir>           output directory (default .)
  --model <m>           full | adiabatic | semiclassical (default full)
  --J --U --V --Jt --Delta --kappa --nc --t_f --dt   physical and numerical parameters
  --L --N               sites (must be 4) and atoms (default 2)
  --grid-U a:b:step     U grid of phase-diagram (default 0:1:0.05)
  --grid-V a:b:step     V grid of phase-diagram and gap-scan (default 1:1.2:0.01)
  --tf-grid t1,t2,...   ramp times of ramp-scan and cutoff-scan
  --nc-set n1,n2,...    photon cutoffs of cutoff-scan (each 1..4)
  --models m1,m2,...    models of ramp-scan (default full,adiabatic)
  --levels n            eigenvalues per spectrum point (default 10)
  --points n            spectrum grid points (default 201)
  --cadence n           steps between trajectory samples (default 100)
  --workers n           worker threads (default $CAVITY_ANNEAL_WORKERS or all cores)
  --plots on|off        write SVG plots (default on)
)";
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_config(args);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n\n" << usage();
    return 2;
  }

  try {
    if (config.command == "spectrum") return run_spectrum(config, out);
    if (config.command == "gap-scan") return run_gap_scan(config, out);
    if (config.command == "anneal") return run_anneal(config, out);
    if (config.command == "ramp-scan") return run_ramp_scan(config, out, err);
    if (config.command == "phase-diagram") return run_phase_diagram(config, out, err);
    if (config.command == "cutoff-scan") return run_cutoff_scan(config, out, err);
  } catch (const NumericalAbort& e) {
    err << "numerical abort: " << e.what() << " [";
    for (const auto& [k, v] : param_entries(config.params)) err << k << "=" << v << " ";
    err << "]\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace cavity_anneal::cli
