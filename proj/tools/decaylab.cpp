#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "decaylab/acceptance.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/experiment.hpp"
#include "decaylab/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitArgument = 2;
constexpr int kExitNumerical = 3;

int cmd_run(const std::string& path) {
  const decaylab::io::json config = decaylab::io::read_json_file(path);
  const decaylab::RunOutcome out = decaylab::run_experiment(config);
  std::cout << out.summary << "\n";
  for (const std::string& f : out.written) std::cerr << "wrote " << f << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& suite, const std::string& report_path) {
  namespace acc = decaylab::acceptance;
  if (!acc::has_suite(suite)) {
    std::cerr << "error: unknown suite '" << suite << "' (see list-suites)\n";
    return kExitArgument;
  }
  const auto results = acc::run_suite(suite);
  const decaylab::io::json report = decaylab::acceptance_report(results);
  const std::string text = report.dump(2) + "\n";
  if (report_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(report_path);
    if (!out) throw decaylab::ArgumentError("cannot write '" + report_path + "'");
    out << text;
  }
  return report.at("passed").get<bool>() ? kExitOk : kExitFailed;
}

int cmd_list() {
  for (const auto& s : decaylab::acceptance::suites())
    std::printf("%-22s %2d  %s\n", s.name.c_str(), s.id, s.title.c_str());
  std::printf("%-22s     every suite above\n", "all");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decaylab: survival probabilities, Zeno effect and the AgBr model"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "Experiment JSON file")->required();

  std::string suite, report_path;
  auto* verify = app.add_subcommand("verify", "Run an acceptance suite and print a JSON report");
  verify->add_option("suite", suite, "Suite name, or 'all'")->required();
  verify->add_option("-o,--output", report_path, "Write the report to a file instead of stdout");

  auto* list = app.add_subcommand("list-suites", "List acceptance suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitArgument;
  }

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (verify->parsed()) return cmd_verify(suite, report_path);
    if (list->parsed()) return cmd_list();
  } catch (const decaylab::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgument;
  } catch (const decaylab::NumericalError& e) {
    std::cerr << "numerical failure in " << e.operation() << ": " << e.what() << "\n";
    return kExitNumerical;
  } catch (const decaylab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgument;
  }
  return kExitArgument;
}
