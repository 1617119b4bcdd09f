#pragma once

// Verification reports: one record per check, each verdict derived from a
// residual <= bound comparison stored in the same record.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace opbessel {

inline constexpr std::string_view kToolVersion = "0.4.0";
inline constexpr int kReportSchemaVersion = 1;

enum class Verdict { pass, fail, info, inconclusive };

std::string_view to_string(Verdict v);
Verdict parse_verdict(std::string_view text);

struct CheckRecord {
  std::string suite;
  std::string id;
  std::string identity;  ///< the formula under test, e.g. "P_u = e^u[L,M]"
  double residual = 0.0;
  double bound = 0.0;
  Verdict verdict = Verdict::pass;
  std::string detail;

  bool required() const { return verdict == Verdict::pass || verdict == Verdict::fail; }

  friend bool operator==(const CheckRecord&, const CheckRecord&) = default;
};

/// Required check: passes iff residual <= bound (NaN fails).
CheckRecord required_check(std::string suite, std::string id, std::string identity, double residual,
                           double bound, std::string detail = {});

/// Reported residual that never affects the exit status.
CheckRecord informational_check(std::string suite, std::string id, std::string identity,
                                double residual, std::string detail = {});

CheckRecord inconclusive_check(std::string suite, std::string id, std::string identity,
                               std::string detail);

/// A module error turned into a failed check.
CheckRecord error_check(std::string suite, std::string id, std::string what);

struct VerificationReport {
  std::vector<CheckRecord> checks;
  std::string scenario;  ///< canonical scenario echo (structured text)
  std::string tool_version = std::string(kToolVersion);
  std::optional<double> duration_seconds;

  void add(CheckRecord r) { checks.push_back(std::move(r)); }
  void append(const VerificationReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
  }

  /// Orders records by suite, then check id.
  void normalize();

  std::size_t count(Verdict v) const;
  std::size_t failed() const { return count(Verdict::fail); }
  bool all_required_pass() const { return failed() == 0; }

  const CheckRecord* find(std::string_view suite, std::string_view id) const;

  friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

enum class ReportFormat { text, structured };

ReportFormat parse_report_format(std::string_view text);

/// Text output is line-oriented and stable; structured output is versioned
/// JSON and round-trips through parse_structured_report.
std::string emit_report(const VerificationReport& r, ReportFormat format);
VerificationReport parse_structured_report(std::string_view text);

/// 0 iff no required check failed.
int exit_status(const VerificationReport& r);

}  // namespace opbessel
