#include "cavity_anneal/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace cavity_anneal {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 12);
  return std::string(buf, end);
}

std::string format_optional(const std::optional<double>& x) {
  return x ? format_number(*x) : std::string();
}

KeyValues param_entries(const AnnealParams& p) {
  return {
      {"J", format_number(p.J)},
      {"U", format_number(p.U)},
      {"V", format_number(p.V)},
      {"Jt", format_number(p.Jt_final)},
      {"Delta", format_number(p.Delta)},
      {"kappa", format_number(p.kappa)},
      {"nc", std::to_string(p.nc)},
      {"L", std::to_string(p.sites)},
      {"N", std::to_string(p.particles)},
      {"t_f", format_number(p.t_f)},
      {"dt", format_number(p.dt)},
      {"model", std::string(to_string(p.model))},
  };
}

std::uint64_t params_hash(const AnnealParams& params) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : param_entries(params)) {
    for (char c : k + "=" + v + ";") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string hex_hash(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_header(std::ostream& out, const KeyValues& entries) {
  for (const auto& [k, v] : entries) out << "# " << k << " = " << v << '\n';
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_field(fields[i]);
  }
  out << '\n';
}

}  // namespace cavity_anneal
