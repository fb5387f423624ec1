#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "ricyl/cross_section.hpp"
#include "ricyl/errors.hpp"
#include "ricyl/expansion.hpp"

namespace ricyl::io {

using json = nlohmann::json;

struct ConfigError : Error {
  using Error::Error;
  const char* name() const noexcept override { return "ConfigError"; }
};

// Reads JSON, or the sectioned text format:
//   [section]
//   key = value        (value is a JSON literal; bare words are strings)
json load_config(const std::string& path);
json parse_sectioned_text(const std::string& text, const std::string& origin);

// Typed access with the JSON path in error messages.
double get_double(const json& j, const std::string& path);
int get_int(const json& j, const std::string& path);
std::string get_string(const json& j, const std::string& path);
std::vector<double> get_doubles(const json& j, const std::string& path);
const json& at_path(const json& j, const std::string& path);

TorusCrossSection cross_section_from_json(const json& j);
json cross_section_to_json(const TorusCrossSection& cs);

RadialProfile profile_from_json(const json& j, const std::string& where);
json profile_to_json(const RadialProfile& p);

// {"rank": r, "terms": [{"k", "phase", "component", "profile"}], "modes": [{"kind", "k", "phase", "pol_index",
// "profile"}]}
ModeExpansion expansion_from_json(const json& j, const std::vector<double>& lengths, const std::string& where);
json expansion_to_json(const ModeExpansion& f);
json mode_to_json(const Mode& m);

std::uint64_t fnv1a(const std::string& s);
std::string hex64(std::uint64_t v);

// "a,b;c,d" -> rows
std::vector<std::vector<int>> parse_int_rows(const std::string& s);
std::vector<double> parse_doubles(const std::string& s);

}  // namespace ricyl::io
