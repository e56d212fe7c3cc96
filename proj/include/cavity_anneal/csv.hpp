#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cavity_anneal/hamiltonians.hpp"

namespace cavity_anneal {

inline constexpr const char* kCodeVersion = "0.1.0";

/// Locale-independent %.12g formatting.
std::string format_number(double x);
std::string format_optional(const std::optional<double>& x);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Every AnnealParams field as key/value text, in a fixed order. The keys
/// are the ones accepted by config files.
KeyValues param_entries(const AnnealParams& params);

/// FNV-1a over the canonical param_entries text.
std::uint64_t params_hash(const AnnealParams& params);
std::string hex_hash(std::uint64_t hash);

/// CSV field quoting: fields with comma, quote or newline are quoted.
std::string csv_field(const std::string& text);

/// Writes "# key = value" lines.
void write_header(std::ostream& out, const KeyValues& entries);
void write_row(std::ostream& out, const std::vector<std::string>& fields);

}  // namespace cavity_anneal
