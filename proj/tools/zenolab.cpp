// zenolab command-line front end.
//
//   zenolab run <scenario> [--output PATH] [--format csv|json] [--reproducible] [--threads K]
//   zenolab validate <scenario>
//   zenolab version
//
// Exit codes: 0 success, 2 validation failure, 3 numerical failure,
// 4 I/O failure.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "zenolab/errors.hpp"
#include "zenolab/runner.hpp"
#include "zenolab/scenario.hpp"

namespace {

enum Exit { kOk = 0, kValidation = 2, kNumerical = 3, kIo = 4 };

int threads_from_env() {
  const char* env = std::getenv("ZENOLAB_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  const long k = std::strtol(env, &end, 10);
  if (*end != '\0' || k < 1 || k > 1024)
    throw zenolab::ValidationError(std::string("ZENOLAB_THREADS must be an integer in [1, 1024], got \"") + env +
                                   "\"");
  return static_cast<int>(k);
}

void report_scenario_error(const zenolab::ScenarioError& e) {
  for (const auto& m : e.messages()) std::cerr << "error: " << m << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Zeno and interferometer cascade simulations"};
  app.require_subcommand(1);

  std::string run_file, validate_file, output, format;
  int threads = 0;
  bool reproducible = false, verbose = false;

  auto* run = app.add_subcommand("run", "Run a scenario and emit its result table");
  run->add_option("scenario", run_file, "Scenario file (JSON)")->required();
  run->add_option("--output,-o", output, "Output path; '-' for stdout (default: scenario setting or stdout)");
  run->add_option("--format,-f", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  run->add_flag("--reproducible", reproducible, "Omit the timestamp so output is byte-stable");
  run->add_option("--threads,-j", threads, "Worker threads (default: ZENOLAB_THREADS or 1)")
      ->check(CLI::Range(1, 1024));
  run->add_flag("--verbose,-v", verbose, "Log one line per grid point to stderr");

  auto* validate = app.add_subcommand("validate", "Check a scenario file without running it");
  validate->add_option("scenario", validate_file, "Scenario file (JSON)")->required();

  app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (app.got_subcommand("version")) {
      std::cout << "zenolab " << zenolab::version() << '\n';
      return kOk;
    }

    if (app.got_subcommand("validate")) {
      const zenolab::ScenarioFile s = zenolab::parse_scenario(validate_file);
      std::cout << validate_file << ": ok (" << zenolab::to_string(s.kind) << ")\n";
      return kOk;
    }

    const zenolab::ScenarioFile s = zenolab::parse_scenario(run_file);
    zenolab::RunOptions opts;
    opts.threads = threads > 0 ? threads : threads_from_env();
    opts.reproducible = reproducible;
    if (verbose) opts.log = &std::cerr;

    zenolab::TableFormat fmt = s.output.format.value_or(zenolab::TableFormat::Csv);
    if (!format.empty()) fmt = format == "json" ? zenolab::TableFormat::Json : zenolab::TableFormat::Csv;
    const std::string path = !output.empty() ? output : s.output.path.value_or("-");

    const zenolab::ResultTable table = zenolab::execute(s, opts);
    zenolab::emit(table, fmt, path);
    return kOk;
  } catch (const zenolab::ScenarioError& e) {
    report_scenario_error(e);
    return kValidation;
  } catch (const zenolab::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const zenolab::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const zenolab::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
