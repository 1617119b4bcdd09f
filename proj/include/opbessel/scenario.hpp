#pragma once

// Scenario documents (JSON) and the suite runner behind the CLI.

#include "opbessel/eds.hpp"
#include "opbessel/prolong.hpp"
#include "opbessel/report.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace opbessel {

/// Every suite the runner knows, in canonical order.
const std::vector<std::string>& known_suites();

struct Scenario {
  std::string name = "scenario";
  ScalarMode mode = ScalarMode::exact;
  /// Catalog reference; when empty, `operators` holds inline matrices.
  std::string catalog;
  CatalogParams catalog_params;
  std::variant<std::monostate, ProlongationInstance<Rational>, ProlongationInstance<double>> operators;
  std::size_t degree = 24;
  int cutoff = 12;
  std::vector<double> t_samples{0.5, 1.0, 2.0};
  std::vector<double> u_samples{-4.0, -2.0, -1.0, 0.0};
  double safety_factor = 10.0;
  std::vector<std::string> suites = known_suites();
  std::uint64_t seed = SeededRng::kDefaultSeed;
  /// Sections u = f(x,y,z) for eds-proposition1; seeded random cubics when empty.
  std::vector<eds::Coeff> sections;

  std::size_t dimension() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parse failure. Syntax errors carry a 1-based line and column; semantic
/// errors name the offending field.
class ScenarioError : public std::invalid_argument {
 public:
  ScenarioError(const std::string& what, std::string field, std::size_t line = 0, std::size_t column = 0)
      : std::invalid_argument(what), field_(std::move(field)), line_(line), column_(column) {}

  bool is_syntax() const { return line_ != 0; }
  const std::string& field() const { return field_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::string field_;
  std::size_t line_, column_;
};

Scenario parse_scenario(std::string_view text);
/// Canonical JSON; parse_scenario(emit_scenario(s)) == s.
std::string emit_scenario(const Scenario& s);

/// The instance a scenario describes, in exact form (throws for float-mode
/// inline operators) or converted to double.
ProlongationInstance<Rational> scenario_instance_exact(const Scenario& s);
ProlongationInstance<double> scenario_instance_float(const Scenario& s);

/// Runs the selected suites; jobs > 1 runs suites concurrently. Module
/// errors become failed checks. The report is order-normalized, so output
/// does not depend on jobs.
VerificationReport run_suite(const Scenario& s, unsigned jobs = 1);

}  // namespace opbessel
