#include "decaylab/io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "decaylab/errors.hpp"

namespace decaylab::io {

namespace {

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::string kind_name(const json& j) { return j.type_name(); }

std::vector<double> flat_matrix(const json& j, int dim, const std::string& what) {
  std::vector<double> out;
  if (!j.is_array()) throw ArgumentError(what + " must be an array");
  if (!j.empty() && j.front().is_array()) {
    if (static_cast<int>(j.size()) != dim) throw ArgumentError(what + " must have dim rows");
    for (const json& row : j) {
      if (!row.is_array() || static_cast<int>(row.size()) != dim)
        throw ArgumentError(what + " rows must have dim entries");
      for (const json& v : row) {
        if (!v.is_number()) throw ArgumentError(what + " entries must be numbers");
        out.push_back(v.get<double>());
      }
    }
  } else {
    if (static_cast<long long>(j.size()) != static_cast<long long>(dim) * dim)
      throw ArgumentError(what + " must have dim*dim entries");
    for (const json& v : j) {
      if (!v.is_number()) throw ArgumentError(what + " entries must be numbers");
      out.push_back(v.get<double>());
    }
  }
  return out;
}

}  // namespace

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::string msg = e.what();
    const auto colon = msg.rfind(": ");
    const std::string detail = colon == std::string::npos ? msg : msg.substr(colon + 2);
    const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
    throw ArgumentError(source + ": malformed JSON at " + line_col(text, byte) + ": " + detail);
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

std::string config_hash(const json& config) {
  // nlohmann objects are std::map backed, so dump() is already key-sorted.
  const std::string s = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return std::string("fnv1a64:") + buf;
}

ObjectReader::ObjectReader(const json& j, std::string context) : j_(j), context_(std::move(context)) {
  if (!j_.is_object())
    throw ArgumentError(context_ + ": expected an object, got " + kind_name(j_));
}

bool ObjectReader::has(const std::string& key) const { return j_.contains(key); }

const json& ObjectReader::required(const std::string& key) {
  if (!j_.contains(key)) throw ArgumentError(context_ + ": missing field '" + key + "'");
  used_.insert(key);
  return j_.at(key);
}

const json* ObjectReader::optional(const std::string& key) {
  if (!j_.contains(key)) return nullptr;
  used_.insert(key);
  return &j_.at(key);
}

double ObjectReader::number(const std::string& key) {
  const json& v = required(key);
  if (!v.is_number()) throw ArgumentError(context_ + ": field '" + key + "' must be a number");
  return v.get<double>();
}

double ObjectReader::number_or(const std::string& key, double fallback) {
  return has(key) ? number(key) : fallback;
}

std::int64_t ObjectReader::integer(const std::string& key) {
  const json& v = required(key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
  }
  throw ArgumentError(context_ + ": field '" + key + "' must be an integer");
}

std::int64_t ObjectReader::integer_or(const std::string& key, std::int64_t fallback) {
  return has(key) ? integer(key) : fallback;
}

std::string ObjectReader::string(const std::string& key) {
  const json& v = required(key);
  if (!v.is_string()) throw ArgumentError(context_ + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::string ObjectReader::string_or(const std::string& key, const std::string& fallback) {
  return has(key) ? string(key) : fallback;
}

std::vector<double> ObjectReader::numbers(const std::string& key) {
  const json& v = required(key);
  if (!v.is_array()) throw ArgumentError(context_ + ": field '" + key + "' must be an array");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw ArgumentError(context_ + ": field '" + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

void ObjectReader::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it)
    if (!used_.count(it.key())) throw ArgumentError(context_ + ": unknown field '" + it.key() + "'");
}

json to_json(const FiniteModel& m) {
  const int d = m.dim();
  std::vector<double> re, im;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      re.push_back(m.h_prime()(i, j).real());
      im.push_back(m.h_prime()(i, j).imag());
    }
  return {{"dim", d}, {"h0_diag", m.h0_diag()}, {"h_prime_re", re}, {"h_prime_im", im},
          {"a", m.initial_index()}};
}

FiniteModel finite_model_from_json(const json& j) {
  ObjectReader r(j, "model");
  const std::int64_t dim = r.integer("dim");
  if (dim < 1 || dim > 4096) throw ArgumentError("model: dim must be in [1, 4096]");
  const std::vector<double> h0 = r.numbers("h0_diag");
  if (static_cast<std::int64_t>(h0.size()) != dim)
    throw ArgumentError("model: h0_diag must have dim entries");
  const int d = static_cast<int>(dim);
  const std::vector<double> re = flat_matrix(r.required("h_prime_re"), d, "model: h_prime_re");
  std::vector<double> im(re.size(), 0.0);
  if (const json* v = r.optional("h_prime_im")) im = flat_matrix(*v, d, "model: h_prime_im");
  const std::int64_t a = r.integer_or("a", 0);
  r.finish();
  Eigen::MatrixXcd hp(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) hp(i, k) = cplx(re[i * d + k], im[i * d + k]);
  if (a < 0 || a >= dim) throw ArgumentError("model: a must index a level");
  return FiniteModel(h0, hp, static_cast<int>(a));
}

json to_json(const SpectralModel& m) {
  return {{"e_g", m.e_g()},   {"e_a", m.e_a()}, {"lambda", m.lambda()},
          {"delta", m.delta()}, {"e_c", m.e_c()}, {"form", "power_exp"}};
}

SpectralModel spectral_model_from_json(const json& j) {
  ObjectReader r(j, "model");
  const double e_g = r.number_or("e_g", 0.0);
  const double e_a = r.number("e_a");
  const double lambda = r.number("lambda");
  const double delta = r.number("delta");
  const double e_c = r.number("e_c");
  const std::string form = r.string_or("form", "power_exp");
  r.finish();
  if (form != "power_exp") throw ArgumentError("model: unknown form factor '" + form + "'");
  return SpectralModel(e_g, e_a, lambda, delta, e_c, FormFactor::power_exp);
}

json to_json(const AgBrConfig& c) {
  json j = {{"n_spins", c.n_spins}, {"x1", c.x1}, {"spacing", c.spacing},
            {"coupling_strength", c.coupling}, {"omega", c.omega}};
  if (c.wave_packet) j["wave_packet"] = {{"a", c.wave_packet->a}, {"p0", c.wave_packet->p0}};
  return j;
}

AgBrConfig agbr_config_from_json(const json& j) {
  ObjectReader r(j, "config");
  AgBrConfig c;
  const std::int64_t n = r.integer("n_spins");
  if (n < 1 || n > 100000000) throw ArgumentError("config: n_spins must be in [1, 1e8]");
  c.n_spins = static_cast<int>(n);
  c.x1 = r.number("x1");
  c.spacing = r.number("spacing");
  c.coupling = r.number("coupling_strength");
  c.omega = r.number_or("omega", 0.0);
  if (const json* wp = r.optional("wave_packet")) {
    ObjectReader w(*wp, "config.wave_packet");
    c.wave_packet = WavePacket{w.number("a"), w.number_or("p0", 0.0)};
    w.finish();
  }
  r.finish();
  c.validate();
  return c;
}

json to_json(const ChannelDensityMatrix& m) {
  json re = json::array(), im = json::array();
  for (int i = 0; i < m.size(); ++i) {
    json rr = json::array(), ii = json::array();
    for (int k = 0; k < m.size(); ++k) {
      rr.push_back(m.entries(i, k).real());
      ii.push_back(m.entries(i, k).imag());
    }
    re.push_back(rr);
    im.push_back(ii);
  }
  return {{"observed", m.observed}, {"re", re}, {"im", im}};
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw ArgumentError("table row width mismatch");
  rows.push_back(std::move(row));
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string cell_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_double(*d);
  if (const std::int64_t* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return csv_field(std::get<std::string>(c));
}

}  // namespace

std::string to_csv(const Table& t, const std::string& hash) {
  std::string out = "# config_hash=" + hash + "\r\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    out += (i ? "," : "") + csv_field(t.columns[i]);
  out += "\r\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell_text(row[i]);
    out += "\r\n";
  }
  return out;
}

json to_json(const Table& t, const std::string& hash) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json r = json::object();
    for (std::size_t i = 0; i < row.size(); ++i) {
      const Cell& c = row[i];
      if (const double* d = std::get_if<double>(&c)) {
        if (std::isfinite(*d))
          r[t.columns[i]] = *d;
        else
          r[t.columns[i]] = format_double(*d);
      } else if (const std::int64_t* n = std::get_if<std::int64_t>(&c)) {
        r[t.columns[i]] = *n;
      } else {
        r[t.columns[i]] = std::get<std::string>(c);
      }
    }
    rows.push_back(r);
  }
  return {{"config_hash", hash}, {"columns", t.columns}, {"rows", rows}};
}

void write_table(const Table& t, const std::string& path, const std::string& format,
                 const std::string& hash) {
  std::string body;
  if (format == "csv")
    body = to_csv(t, hash);
  else if (format == "json")
    body = to_json(t, hash).dump(2) + "\n";
  else
    throw ArgumentError("output format must be csv or json");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot write '" + path + "'");
  out << body;
  if (!out) throw ArgumentError("write to '" + path + "' failed");
}

}  // namespace decaylab::io
