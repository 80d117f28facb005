#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "decaylab/agbr.hpp"
#include "decaylab/core.hpp"
#include "decaylab/spectral.hpp"
#include "decaylab/zeno.hpp"

namespace decaylab::io {

using json = nlohmann::json;

// Parses JSON text; syntax errors become ArgumentError with line and column.
json parse_json(const std::string& text, const std::string& source = "<input>");
json read_json_file(const std::string& path);

// FNV-1a 64 over the compact dump of the (key-sorted) value.
std::string config_hash(const json& config);

// Reads fields from a JSON object and rejects the ones nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string context);

  bool has(const std::string& key) const;
  const json& required(const std::string& key);
  const json* optional(const std::string& key);
  double number(const std::string& key);
  double number_or(const std::string& key, double fallback);
  std::int64_t integer(const std::string& key);
  std::int64_t integer_or(const std::string& key, std::int64_t fallback);
  std::string string(const std::string& key);
  std::string string_or(const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& key);
  const std::string& context() const { return context_; }
  // Throws ArgumentError naming any key that was not read.
  void finish() const;

 private:
  const json& j_;
  std::string context_;
  std::set<std::string> used_;
};

json to_json(const FiniteModel& m);
FiniteModel finite_model_from_json(const json& j);
json to_json(const SpectralModel& m);
SpectralModel spectral_model_from_json(const json& j);
json to_json(const AgBrConfig& c);
AgBrConfig agbr_config_from_json(const json& j);
json to_json(const ChannelDensityMatrix& m);

using Cell = std::variant<double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

// %.17g, with nan and inf spelled out.
std::string format_double(double v);
std::string to_csv(const Table& t, const std::string& config_hash);
json to_json(const Table& t, const std::string& config_hash);
// Writes csv or json according to `format`.
void write_table(const Table& t, const std::string& path, const std::string& format,
                 const std::string& config_hash);

}  // namespace decaylab::io
