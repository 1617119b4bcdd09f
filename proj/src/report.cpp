#include "opbessel/report.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace opbessel {

using nlohmann::json;

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::info: return "info";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "fail";
}

Verdict parse_verdict(std::string_view text) {
  if (text == "pass") return Verdict::pass;
  if (text == "fail") return Verdict::fail;
  if (text == "info") return Verdict::info;
  if (text == "inconclusive") return Verdict::inconclusive;
  throw std::invalid_argument("unknown verdict '" + std::string(text) + "'");
}

CheckRecord required_check(std::string suite, std::string id, std::string identity, double residual,
                           double bound, std::string detail) {
  CheckRecord r{std::move(suite), std::move(id), std::move(identity), residual, bound, Verdict::fail,
                std::move(detail)};
  if (residual <= bound) r.verdict = Verdict::pass;
  return r;
}

CheckRecord informational_check(std::string suite, std::string id, std::string identity,
                                double residual, std::string detail) {
  return {std::move(suite), std::move(id), std::move(identity), residual, 0.0, Verdict::info,
          std::move(detail)};
}

CheckRecord inconclusive_check(std::string suite, std::string id, std::string identity,
                               std::string detail) {
  return {std::move(suite), std::move(id), std::move(identity), 0.0, 0.0, Verdict::inconclusive,
          std::move(detail)};
}

CheckRecord error_check(std::string suite, std::string id, std::string what) {
  return {std::move(suite), std::move(id), "error", 0.0, 0.0, Verdict::fail, "error: " + std::move(what)};
}

void VerificationReport::normalize() {
  std::stable_sort(checks.begin(), checks.end(), [](const CheckRecord& a, const CheckRecord& b) {
    if (a.suite != b.suite) return a.suite < b.suite;
    return a.id < b.id;
  });
}

std::size_t VerificationReport::count(Verdict v) const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [v](const CheckRecord& c) { return c.verdict == v; }));
}

const CheckRecord* VerificationReport::find(std::string_view suite, std::string_view id) const {
  for (const auto& c : checks)
    if (c.suite == suite && c.id == id) return &c;
  return nullptr;
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "text") return ReportFormat::text;
  if (text == "structured" || text == "json") return ReportFormat::structured;
  throw std::invalid_argument("unknown report format '" + std::string(text) + "'");
}

namespace {

std::string sci(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// JSON has no infinities; they are spelled as strings.
json number_to_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  if (s == "nan") return NAN;
  throw std::invalid_argument("bad number in report: " + s);
}

std::string emit_text(const VerificationReport& r) {
  std::ostringstream out;
  out << "opbessel verification report (tool " << r.tool_version << ")\n";
  if (!r.scenario.empty()) out << "scenario: " << r.scenario << "\n";
  std::string current;
  for (const auto& c : r.checks) {
    if (c.suite != current) {
      current = c.suite;
      out << "[" << current << "]\n";
    }
    std::string tag(to_string(c.verdict));
    for (auto& ch : tag) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    out << "  " << tag << "  " << c.id << "  residual=" << sci(c.residual);
    if (c.required()) out << " bound=" << sci(c.bound);
    out << "  {" << c.identity << "}";
    if (!c.detail.empty()) out << "  " << c.detail;
    out << "\n";
  }
  out << "summary: " << r.count(Verdict::pass) << " passed, " << r.count(Verdict::fail) << " failed, "
      << r.count(Verdict::info) << " informational, " << r.count(Verdict::inconclusive)
      << " inconclusive\n";
  if (r.duration_seconds) out << "duration: " << sci(*r.duration_seconds) << " s\n";
  return out.str();
}

std::string emit_structured(const VerificationReport& r) {
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["tool_version"] = r.tool_version;
  doc["scenario"] = r.scenario;
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"suite", c.suite},
                      {"id", c.id},
                      {"identity", c.identity},
                      {"residual", number_to_json(c.residual)},
                      {"bound", number_to_json(c.bound)},
                      {"verdict", to_string(c.verdict)},
                      {"detail", c.detail}});
  }
  doc["checks"] = std::move(checks);
  doc["summary"] = {{"pass", r.count(Verdict::pass)},
                    {"fail", r.count(Verdict::fail)},
                    {"info", r.count(Verdict::info)},
                    {"inconclusive", r.count(Verdict::inconclusive)}};
  if (r.duration_seconds) doc["duration_seconds"] = *r.duration_seconds;
  return doc.dump(2) + "\n";
}

}  // namespace

std::string emit_report(const VerificationReport& r, ReportFormat format) {
  return format == ReportFormat::text ? emit_text(r) : emit_structured(r);
}

VerificationReport parse_structured_report(std::string_view text) {
  const json doc = json::parse(text);
  if (doc.at("schema_version").get<int>() != kReportSchemaVersion)
    throw std::invalid_argument("unsupported report schema version");
  VerificationReport r;
  r.tool_version = doc.at("tool_version").get<std::string>();
  r.scenario = doc.at("scenario").get<std::string>();
  for (const auto& c : doc.at("checks")) {
    r.checks.push_back({c.at("suite").get<std::string>(), c.at("id").get<std::string>(),
                        c.at("identity").get<std::string>(), number_from_json(c.at("residual")),
                        number_from_json(c.at("bound")), parse_verdict(c.at("verdict").get<std::string>()),
                        c.at("detail").get<std::string>()});
  }
  if (doc.contains("duration_seconds")) r.duration_seconds = doc["duration_seconds"].get<double>();
  return r;
}

int exit_status(const VerificationReport& r) { return r.all_required_pass() ? 0 : 1; }

}  // namespace opbessel
