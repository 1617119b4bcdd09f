// opbessel: scenario-driven verification runner.
//
//   opbessel verify <scenario.json> [--suite NAME]... [--seed N] [--format text|structured] [--out PATH]
//   opbessel catalog list
//   opbessel catalog show <name>
//
// Exit codes: 0 all required checks pass, 1 some check failed, 2 usage or parse error.

#include "opbessel/scenario.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitUsage = 2;

int usage_error(const std::string& msg) {
  std::cerr << "opbessel: " << msg << "\n";
  return kExitUsage;
}

int verify(const std::string& path, const std::vector<std::string>& suites, const std::optional<std::uint64_t>& seed,
           const std::string& format, const std::string& out, unsigned jobs) {
  using namespace opbessel;
  std::ifstream in(path);
  if (!in) return usage_error("cannot read scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();

  Scenario s;
  ReportFormat fmt;
  try {
    s = parse_scenario(buf.str());
    fmt = parse_report_format(format);
  } catch (const std::exception& e) {
    return usage_error(path + ": " + e.what());
  }
  if (!suites.empty()) {
    const auto& known = known_suites();
    s.suites.clear();
    for (const auto& name : suites) {
      if (std::find(known.begin(), known.end(), name) == known.end())
        return usage_error("unknown suite '" + name + "'");
      if (std::find(s.suites.begin(), s.suites.end(), name) == s.suites.end()) s.suites.push_back(name);
    }
  }
  if (seed) {
    s.seed = *seed;
    s.catalog_params.seed = *seed;
  }

  const auto start = std::chrono::steady_clock::now();
  VerificationReport report = run_suite(s, jobs);
  // Wall-clock time only goes into the text form; structured output stays byte-reproducible.
  if (fmt == ReportFormat::text)
    report.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::string doc = emit_report(report, fmt);
  if (out.empty()) {
    std::cout << doc;
  } else {
    std::ofstream f(out);
    if (!f) return usage_error("cannot write '" + out + "'");
    f << doc;
  }
  return exit_status(report);
}

int catalog_show(const std::string& name) {
  using namespace opbessel;
  const auto names = catalog_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) return usage_error("unknown catalog entry '" + name + "'");
  Scenario s;
  s.name = name;
  s.operators = catalog_entry(name);
  std::cout << "# " << catalog_description(name) << "\n" << emit_scenario(s);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Operator Bessel calculus verification runner"};
  app.set_version_flag("--version", std::string(opbessel::kToolVersion));
  app.require_subcommand(1);

  std::string path, format = "text", out;
  std::vector<std::string> suites;
  std::uint64_t seed_value = 0;
  unsigned jobs = 1;
  auto* verify_cmd = app.add_subcommand("verify", "run the suites of a scenario file");
  verify_cmd->add_option("scenario", path, "scenario JSON file")->required();
  verify_cmd->add_option("--suite", suites, "run only this suite (repeatable)");
  auto* seed_opt = verify_cmd->add_option("--seed", seed_value, "seed for randomized suites and catalog entries");
  verify_cmd->add_option("--format", format, "text or structured")->check(CLI::IsMember({"text", "structured"}));
  verify_cmd->add_option("--out", out, "write the report here instead of stdout");
  verify_cmd->add_option("--jobs", jobs, "suites run concurrently")->check(CLI::Range(1u, 64u));

  auto* catalog_cmd = app.add_subcommand("catalog", "built-in instances");
  catalog_cmd->require_subcommand(1);
  catalog_cmd->add_subcommand("list", "list catalog entries");
  std::string show_name;
  auto* show_cmd = catalog_cmd->add_subcommand("show", "print an entry as a scenario document");
  show_cmd->add_option("name", show_name)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*verify_cmd) {
      std::optional<std::uint64_t> seed;
      if (seed_opt->count() > 0) seed = seed_value;
      return verify(path, suites, seed, format, out, jobs);
    }
    if (*show_cmd) return catalog_show(show_name);
    for (const auto& name : opbessel::catalog_names())
      std::cout << name << "\t" << opbessel::catalog_description(name) << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "opbessel: internal error: " << e.what() << "\n";
    return 1;
  }
}
