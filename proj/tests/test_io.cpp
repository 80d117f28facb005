#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "decaylab/errors.hpp"
#include "decaylab/experiment.hpp"
#include "decaylab/io.hpp"

using namespace decaylab;
using io::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("decaylab_test_" + name)).string();
}

}  // namespace

TEST_CASE("JSON syntax errors report line and column") {
  try {
    io::parse_json("{\n  \"kind\": \"zeno\",\n  \"x\": ]\n}", "cfg.json");
    FAIL("no exception");
  } catch (const ArgumentError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("cfg.json") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("column 8") != std::string::npos);
  }
}

TEST_CASE("config hash is stable and key-order independent") {
  const json a = json::parse(R"({"b": 1, "a": [1.5, "x"]})");
  const json b = json::parse(R"({"a": [1.5, "x"], "b": 1})");
  CHECK(io::config_hash(a) == io::config_hash(b));
  CHECK(io::config_hash(a) != io::config_hash(json::parse(R"({"b": 2, "a": [1.5, "x"]})")));
  // FNV-1a of the empty object "{}".
  CHECK(io::config_hash(json::object()) == "fnv1a64:08f44b07b5901a25");
}

TEST_CASE("model JSON round trips") {
  const FiniteModel m = two_level_model(0.5, 0.25);
  const FiniteModel back = io::finite_model_from_json(io::to_json(m));
  CHECK(back.h0_diag() == m.h0_diag());
  CHECK((back.h_prime() - m.h_prime()).norm() == 0.0);
  const json nested = json::parse(
      R"({"dim": 2, "h0_diag": [0, 1], "h_prime_re": [[0, 0.5], [0.5, 0]], "h_prime_im": [[0, 0], [0, 0]], "a": 1})");
  CHECK(io::finite_model_from_json(nested).initial_index() == 1);
  json bad = nested;
  bad["extra"] = 1;
  CHECK_THROWS_AS(io::finite_model_from_json(bad), ArgumentError);

  const SpectralModel s(0.0, 1.0, 0.1, 0.5, 2.0);
  const SpectralModel sb = io::spectral_model_from_json(io::to_json(s));
  CHECK(sb.delta() == 0.5);
  CHECK(sb.e_c() == 2.0);

  AgBrConfig c;
  c.n_spins = 10;
  c.x1 = 2.0;
  c.coupling = 0.2;
  c.wave_packet = WavePacket{0.5, 1.0};
  const AgBrConfig cb = io::agbr_config_from_json(io::to_json(c));
  CHECK(cb.n_spins == 10);
  REQUIRE(cb.wave_packet);
  CHECK(cb.wave_packet->p0 == 1.0);
}

TEST_CASE("CSV formatting") {
  io::Table t{{"t", "label"}, {}};
  t.add({0.1, std::string("a,\"b\"")});
  t.add({std::int64_t{3}, std::string("plain")});
  const std::string csv = io::to_csv(t, "fnv1a64:0");
  CHECK(csv == "# config_hash=fnv1a64:0\r\nt,label\r\n0.10000000000000001,\"a,\"\"b\"\"\"\r\n3,plain\r\n");
  CHECK_THROWS_AS(t.add({1.0}), ArgumentError);
  CHECK(io::format_double(1.0 / 3.0) == "0.33333333333333331");
}

TEST_CASE("run writes deterministic output") {
  const std::string out = temp_path("zeno.csv");
  const json cfg = {{"kind", "zeno"},
                    {"parameters", {{"protocol", "neutron"}, {"n_min", 1}, {"n_max", 64}}},
                    {"output", {{"path", out}, {"format", "csv"}}}};
  const RunOutcome r1 = run_experiment(cfg);
  const std::string first = slurp(out);
  run_experiment(cfg);
  CHECK(slurp(out) == first);
  CHECK(first.rfind("# config_hash=" + io::config_hash(cfg), 0) == 0);
  CHECK(r1.summary.find("P^(N)") != std::string::npos);
  std::filesystem::remove(out);
}

TEST_CASE("run rejects invalid configs") {
  const json base = {{"kind", "zeno"},
                     {"parameters", {{"n_min", 1}, {"n_max", 4}}},
                     {"output", {{"path", temp_path("x.csv")}}}};
  json unknown = base;
  unknown["colour"] = "red";
  CHECK_THROWS_AS(run_experiment(unknown), ArgumentError);
  json badkind = base;
  badkind["kind"] = "nope";
  CHECK_THROWS_AS(run_experiment(badkind), ArgumentError);
  json badparam = base;
  badparam["parameters"]["n_min"] = 0;
  CHECK_THROWS_AS(run_experiment(badparam), ArgumentError);
  json badfmt = base;
  badfmt["output"]["format"] = "xml";
  CHECK_THROWS_AS(run_experiment(badfmt), ArgumentError);
}

TEST_CASE("sweep writes one table per point") {
  const std::string out = temp_path("sweep.csv");
  const json cfg = {
      {"kind", "sweep"},
      {"parameters",
       {{"kind", "spectral"},
        {"base", {{"model", {{"e_a", 1.0}, {"lambda", 0.1}, {"delta", 1.0}, {"e_c", 1.0}}}, {"task", "pole"}}},
        {"parameter", "/model/lambda"},
        {"values", {0.05, 0.1, 0.2}}}},
      {"output", {{"path", out}}}};
  const RunOutcome r = run_experiment(cfg);
  REQUIRE(r.written.size() == 4);
  for (const std::string& f : r.written) {
    CHECK(std::filesystem::exists(f));
    std::filesystem::remove(f);
  }
}
