#include "opbessel/scenario.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <set>

namespace opbessel {

using nlohmann::json;

const std::vector<std::string>& known_suites() {
  static const std::vector<std::string> names = {
      "bessel-recurrences", "ode-residuals",   "solution-equivalence", "bch",
      "prolongation",       "initial-conditions", "scalar-reduction", "eds-proposition1",
      "eds-closure",        "eds-constraints",  "compatibility",      "generating-function"};
  return names;
}

std::size_t Scenario::dimension() const {
  if (const auto* q = std::get_if<ProlongationInstance<Rational>>(&operators)) return q->dim();
  if (const auto* d = std::get_if<ProlongationInstance<double>>(&operators)) return d->dim();
  return catalog_entry(catalog, catalog_params).dim();
}

// --- parsing -----------------------------------------------------------------

namespace {

[[noreturn]] void semantic(const std::string& field, const std::string& what) {
  throw ScenarioError(field + ": " + what, field);
}

Rational rational_field(const json& j, const std::string& field) {
  try {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(BigInt(j.dump()));
    if (j.is_number_float()) return parse_rational(j.dump());
  } catch (const std::invalid_argument& e) {
    semantic(field, e.what());
  }
  semantic(field, "expected a rational (\"p/q\" string or number)");
}

double double_field(const json& j, const std::string& field) {
  if (j.is_number()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) semantic(field, "value not finite");
    return v;
  }
  if (j.is_string()) return mpq_get_d(rational_field(j, field).get_mpq_t());
  semantic(field, "expected a number");
}

template <class Int>
Int integer_field(const json& j, const std::string& field, Int lo) {
  if (!j.is_number_integer()) semantic(field, "expected an integer");
  if (j.is_number_unsigned()) {
    const auto v = j.get<std::uint64_t>();
    if (static_cast<long double>(v) < static_cast<long double>(lo)) semantic(field, "value too small");
    return static_cast<Int>(v);
  }
  const auto v = j.get<std::int64_t>();
  if (v < static_cast<std::int64_t>(lo)) semantic(field, "must be at least " + std::to_string(lo));
  return static_cast<Int>(v);
}

template <Field T>
Operator<T> operator_field(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) semantic(field, "expected a nonempty array of rows");
  const std::size_t n = j.size();
  Operator<T> op(n);
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = j[i];
    if (!row.is_array()) semantic(field, "row " + std::to_string(i) + " is not an array");
    if (row.size() != n) semantic(field, "operator not square");
    for (std::size_t k = 0; k < n; ++k) {
      const std::string where = field + "[" + std::to_string(i) + "][" + std::to_string(k) + "]";
      if constexpr (is_exact_v<T>) op(i, k) = rational_field(row[k], where);
      else op(i, k) = double_field(row[k], where);
    }
  }
  return op;
}

template <Field T>
ProlongationInstance<T> operators_field(const json& j, const std::string& name) {
  if (!j.is_object()) semantic("operators", "expected an object");
  static const std::set<std::string> allowed = {"L", "M0", "P0", "N", "A", "B"};
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) semantic("operators." + k, "unknown operator");
  for (const char* req : {"L", "M0", "P0"})
    if (!j.contains(req)) semantic(std::string("operators.") + req, "missing");
  ProlongationInstance<T> inst;
  inst.name = name;
  inst.L = operator_field<T>(j["L"], "operators.L");
  const std::size_t n = inst.L.dim();
  auto opt = [&](const char* key, Operator<T> fallback) {
    Operator<T> op = j.contains(key) ? operator_field<T>(j[key], std::string("operators.") + key) : std::move(fallback);
    if (op.dim() != n)
      semantic(std::string("operators.") + key,
               "dimension " + std::to_string(op.dim()) + " does not match L (" + std::to_string(n) + ")");
    return op;
  };
  inst.M0 = opt("M0", Operator<T>(n));
  inst.P0 = opt("P0", Operator<T>(n));
  inst.N = opt("N", Operator<T>(n));
  inst.A = opt("A", Operator<T>::identity(n));
  inst.B = opt("B", Operator<T>::identity(n));
  return inst;
}

std::vector<double> samples_field(const json& j, const std::string& field) {
  if (!j.is_array()) semantic(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(double_field(j[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

eds::Coeff section_field(const json& j, const std::string& field) {
  if (!j.is_object()) semantic(field, "expected a coefficient map {\"x^2*y\": \"3/2\", ...}");
  eds::Coeff f;
  for (const auto& [key, value] : j.items()) {
    try {
      f += eds::Coeff(rational_field(value, field + "." + key)) * eds::parse_monomial_key(key);
    } catch (const ScenarioError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      semantic(field + "." + key, e.what());
    }
  }
  return f;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw ScenarioError("syntax error at line " + std::to_string(line) + ", column " + std::to_string(col) +
                            ": " + e.what(),
                        "", line, col);
  }
  if (!doc.is_object()) throw ScenarioError("syntax error at line 1, column 1: document is not an object", "", 1, 1);

  static const std::set<std::string> allowed = {"name",      "mode",      "catalog",    "catalog_params", "operators",
                                                "dimension", "degree",    "cutoff",     "t_samples",      "u_samples",
                                                "tolerances", "suites",   "seed",       "sections"};
  for (const auto& [k, v] : doc.items())
    if (!allowed.count(k)) semantic(k, "unknown field");

  Scenario s;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) semantic("name", "expected a string");
    s.name = doc["name"].get<std::string>();
  }
  if (doc.contains("mode")) {
    if (!doc["mode"].is_string()) semantic("mode", "expected \"exact\" or \"float\"");
    try {
      s.mode = parse_scalar_mode(doc["mode"].get<std::string>());
    } catch (const std::invalid_argument& e) {
      semantic("mode", e.what());
    }
  }
  if (doc.contains("seed")) s.seed = integer_field<std::uint64_t>(doc["seed"], "seed", 0);
  s.catalog_params.seed = s.seed;

  const bool has_catalog = doc.contains("catalog"), has_ops = doc.contains("operators");
  if (has_catalog == has_ops) semantic(has_catalog ? "operators" : "catalog", "give exactly one of catalog and operators");
  if (has_catalog) {
    if (!doc["catalog"].is_string()) semantic("catalog", "expected a catalog name");
    s.catalog = doc["catalog"].get<std::string>();
    const auto names = catalog_names();
    if (std::find(names.begin(), names.end(), s.catalog) == names.end())
      semantic("catalog", "unknown catalog entry '" + s.catalog + "'");
    if (doc.contains("catalog_params")) {
      const json& cp = doc["catalog_params"];
      if (!cp.is_object()) semantic("catalog_params", "expected an object");
      for (const auto& [k, v] : cp.items()) {
        const std::string field = "catalog_params." + k;
        if (k == "lambda1") s.catalog_params.lambda1 = rational_field(v, field);
        else if (k == "lambda2") s.catalog_params.lambda2 = rational_field(v, field);
        else if (k == "dim") s.catalog_params.dim = integer_field<std::size_t>(v, field, 2);
        else if (k == "seed") s.catalog_params.seed = integer_field<std::uint64_t>(v, field, 0);
        else semantic(field, "unknown field");
      }
    }
  } else {
    if (doc.contains("catalog_params")) semantic("catalog_params", "only valid together with catalog");
    if (s.mode == ScalarMode::exact) s.operators = operators_field<Rational>(doc["operators"], s.name);
    else s.operators = operators_field<double>(doc["operators"], s.name);
  }

  if (doc.contains("degree")) s.degree = integer_field<std::size_t>(doc["degree"], "degree", 2);
  if (doc.contains("cutoff")) s.cutoff = integer_field<int>(doc["cutoff"], "cutoff", 1);
  if (doc.contains("t_samples")) s.t_samples = samples_field(doc["t_samples"], "t_samples");
  if (doc.contains("u_samples")) s.u_samples = samples_field(doc["u_samples"], "u_samples");
  if (doc.contains("tolerances")) {
    const json& tol = doc["tolerances"];
    if (!tol.is_object()) semantic("tolerances", "expected an object");
    for (const auto& [k, v] : tol.items()) {
      if (k != "safety_factor") semantic("tolerances." + k, "unknown tolerance");
      s.safety_factor = double_field(v, "tolerances.safety_factor");
      if (s.safety_factor < 1.0) semantic("tolerances.safety_factor", "must be at least 1");
    }
  }
  if (doc.contains("suites")) {
    const json& su = doc["suites"];
    if (!su.is_array()) semantic("suites", "expected an array of suite names");
    s.suites.clear();
    for (const auto& v : su) {
      if (!v.is_string()) semantic("suites", "expected suite names");
      const auto name = v.get<std::string>();
      const auto& known = known_suites();
      if (std::find(known.begin(), known.end(), name) == known.end()) semantic("suites", "unknown suite '" + name + "'");
      if (std::find(s.suites.begin(), s.suites.end(), name) == s.suites.end()) s.suites.push_back(name);
    }
  }
  if (doc.contains("sections")) {
    const json& se = doc["sections"];
    if (!se.is_array()) semantic("sections", "expected an array of coefficient maps");
    for (std::size_t i = 0; i < se.size(); ++i) s.sections.push_back(section_field(se[i], "sections[" + std::to_string(i) + "]"));
  }

  const std::size_t n = s.dimension();
  if (doc.contains("dimension")) {
    const auto d = integer_field<std::size_t>(doc["dimension"], "dimension", 1);
    if (d != n) semantic("dimension", "declared " + std::to_string(d) + " but operators are " + std::to_string(n) + "x" + std::to_string(n));
  }
  if (n > static_cast<std::size_t>(eds::kMaxXi)) semantic("dimension", "at most " + std::to_string(eds::kMaxXi) + " supported");

  auto uses = [&](const char* suite) { return std::find(s.suites.begin(), s.suites.end(), suite) != s.suites.end(); };
  for (const char* suite : {"ode-residuals", "solution-equivalence", "bch", "scalar-reduction", "generating-function"})
    if (uses(suite) && s.t_samples.empty()) semantic("t_samples", std::string("suite ") + suite + " needs t samples");
  for (const char* suite : {"prolongation", "eds-constraints"})
    if (uses(suite) && s.u_samples.empty()) semantic("u_samples", std::string("suite ") + suite + " needs u samples");
  return s;
}

// --- emitting ----------------------------------------------------------------

namespace {

template <Field T>
json operator_json(const Operator<T>& op) {
  json rows = json::array();
  for (std::size_t i = 0; i < op.dim(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < op.dim(); ++k) {
      if constexpr (is_exact_v<T>) row.push_back(format_rational(op(i, k)));
      else row.push_back(op(i, k));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

template <Field T>
json operators_json(const ProlongationInstance<T>& inst) {
  return json{{"L", operator_json(inst.L)}, {"M0", operator_json(inst.M0)}, {"P0", operator_json(inst.P0)},
              {"N", operator_json(inst.N)}, {"A", operator_json(inst.A)},   {"B", operator_json(inst.B)}};
}

}  // namespace

std::string emit_scenario(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["mode"] = std::string(to_string(s.mode));
  if (!s.catalog.empty()) {
    doc["catalog"] = s.catalog;
    doc["catalog_params"] = {{"lambda1", format_rational(s.catalog_params.lambda1)},
                             {"lambda2", format_rational(s.catalog_params.lambda2)},
                             {"dim", s.catalog_params.dim},
                             {"seed", s.catalog_params.seed}};
  } else if (const auto* q = std::get_if<ProlongationInstance<Rational>>(&s.operators)) {
    doc["operators"] = operators_json(*q);
  } else if (const auto* d = std::get_if<ProlongationInstance<double>>(&s.operators)) {
    doc["operators"] = operators_json(*d);
  }
  doc["dimension"] = s.dimension();
  doc["degree"] = s.degree;
  doc["cutoff"] = s.cutoff;
  doc["t_samples"] = s.t_samples;
  doc["u_samples"] = s.u_samples;
  doc["tolerances"] = {{"safety_factor", s.safety_factor}};
  doc["suites"] = s.suites;
  doc["seed"] = s.seed;
  if (!s.sections.empty()) {
    json secs = json::array();
    for (const auto& f : s.sections) {
      json m = json::object();
      for (const auto& [mono, c] : f.terms()) m[eds::monomial_key(mono)] = format_rational(c);
      secs.push_back(std::move(m));
    }
    doc["sections"] = std::move(secs);
  }
  return doc.dump(2) + "\n";
}

ProlongationInstance<Rational> scenario_instance_exact(const Scenario& s) {
  if (const auto* q = std::get_if<ProlongationInstance<Rational>>(&s.operators)) return *q;
  if (std::holds_alternative<ProlongationInstance<double>>(s.operators))
    throw std::invalid_argument("float-mode operators have no exact form");
  return catalog_entry(s.catalog, s.catalog_params);
}

ProlongationInstance<double> scenario_instance_float(const Scenario& s) {
  if (const auto* d = std::get_if<ProlongationInstance<double>>(&s.operators)) return *d;
  return scenario_instance_exact(s).convert<double>();
}

// --- suites ------------------------------------------------------------------

namespace {

std::string at_t(double t) { return "t=" + format_u(t); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string format_m(int m) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "m=%+03d", m);
  return buf;
}

template <Field T>
VerificationReport suite_recurrences(const ProlongationInstance<T>& inst, const Scenario& s) {
  VerificationReport r;
  const int kmax = std::min(6, static_cast<int>(s.degree) - 2);
  for (BesselRelation rel : kAllBesselRelations)
    r.append(check_recurrence(rel, inst.L, s.degree, -kmax, kmax, s.safety_factor));
  return r;
}

template <Field T>
VerificationReport suite_ode(const ProlongationInstance<T>& inst, const Scenario& s) {
  VerificationReport r;
  const std::string suite = "ode-residuals";
  const SolutionSeries<T> sol = solution_cal_form(inst, s.degree);
  const AdjointContext<T> ctx(inst.L, 0);
  const std::size_t n = inst.dim();
  const std::pair<const char*, std::pair<const OperatorSeries<T>*, OdeKind>> parts[] = {
      {"P", {&sol.P, OdeKind::P2}}, {"M", {&sol.M, OdeKind::M2}}};
  for (const auto& [label, pk] : parts) {
    const auto& [series, kind] = pk;
    const std::string identity(identity_of(kind));
    if constexpr (is_exact_v<T>) {
      const OperatorSeries<T> res = ode_residual(*series, kind, ctx);
      r.add(required_check(suite, std::string(label) + "/series", identity, max_coefficient_norm(res), 0.0,
                           "exact through degree " + std::to_string(res.degree())));
    }
    for (double t : s.t_samples) {
      const ResidualAt ra = ode_residual_at(*series, kind, ctx, t);
      r.add(required_check(suite, std::string(label) + "/" + at_t(t), identity, frobenius(ra.value),
                           residual_tolerance(ra.truncation, ra.magnitude, s.degree, n, s.safety_factor),
                           "truncation bound " + sci(ra.truncation)));
    }
  }
  return r;
}

template <Field T>
VerificationReport suite_equivalence(const ProlongationInstance<T>& inst, const Scenario& s) {
  VerificationReport r;
  const std::string suite = "solution-equivalence";
  const SolutionSeries<T> sol = solution_cal_form(inst, s.degree);
  const ProlongationInstance<double> fi = inst.template convert<double>();
  const std::size_t depth = s.degree + 2 * static_cast<std::size_t>(s.cutoff) + inst.dim();
  for (double t : s.t_samples) {
    const LFormValue<double> lf = solution_L_form(fi, t, s.cutoff, s.degree);
    const auto& mp = *sol.P.majorant();
    const auto& mm = *sol.M.majorant();
    const int d = static_cast<int>(s.degree);
    const double rp = frobenius(sol.P.evaluate_float(t) - lf.P);
    const double rm = frobenius(sol.M.evaluate_float(t) - lf.M);
    const double bp = s.safety_factor * (mp.tail(t, d) + lf.tail_P +
                                         rounding_allowance(mp.total(t) + lf.magnitude_P, static_cast<double>(depth)));
    const double bm = s.safety_factor * (mm.tail(t, d) + lf.tail_M +
                                         rounding_allowance(mm.total(t) + lf.magnitude_M, static_cast<double>(depth)));
    const std::string detail = "K=" + std::to_string(s.cutoff) + " D=" + std::to_string(s.degree);
    r.add(required_check(suite, "P/" + at_t(t), "(t/2) J_1(t ad_L)(P0) = (t/2) sum_k J_{k+1}(tL) P0 J_k(tL)", rp, bp,
                         detail));
    r.add(required_check(suite, "M/" + at_t(t), "J_0(t ad_L)(M0) = sum_k J_k(tL) M0 J_k(tL)", rm, bm, detail));
  }
  return r;
}

template <Field T>
VerificationReport suite_bch(const ProlongationInstance<T>& inst, const Scenario& s) {
  VerificationReport r;
  const std::string suite = "bch";
  const std::string identity = "e^{itL} A e^{-itL} = sum (it)^n/n! ad_L^n A";
  const Operator<double> lf = to_float(inst.L), a0 = to_float(inst.M0);
  const AdjointContext<double> ctx(lf, 0);
  const double ln = frobenius(lf), an = frobenius(a0);
  for (double t : s.t_samples) {
    const double tol = 1e-15 * std::max(1.0, an);
    const Operator<Complex> series = bch_series(ctx, a0, t, s.degree);
    const Operator<Complex> conj = bch_conjugate(ctx, a0, t, tol);
    const double mag = std::exp(2.0 * std::abs(t) * ln) * an;
    const double bound =
        s.safety_factor * (bch_tail_bound(t, ln, an, s.degree) + tol +
                           rounding_allowance(mag, static_cast<double>(s.degree + inst.dim())));
    r.add(required_check(suite, at_t(t), identity, frobenius(series - conj), bound));
  }
  if constexpr (is_exact_v<T>) {
    const AdjointContext<T> ex(inst.L, 0);
    const auto bad = bch_coefficient_mismatch(ex, inst.M0, s.degree);
    r.add(required_check(suite, "coefficients", identity, bad ? 1.0 : 0.0, 0.0,
                         bad ? "first mismatch at n=" + std::to_string(*bad)
                             : "exact through degree " + std::to_string(s.degree)));
  }
  return r;
}

template <Field T>
VerificationReport suite_prolongation(const ProlongationInstance<T>& inst, const Scenario& s) {
  VerificationReport r;
  bool first = true;
  for (double u : s.u_samples) {
    VerificationReport one = prolongation_residual(inst, u, s.degree, s.safety_factor);
    for (auto& c : one.checks)
      if (first || c.id.rfind("series/", 0) != 0) r.add(std::move(c));
    first = false;
  }
  return r;
}

template <Field T>
VerificationReport suite_scalar(const ProlongationInstance<T>& inst, const Scenario& s) {
  VerificationReport r;
  const std::string suite = "scalar-reduction";
  const std::string identity = "P_ij = p0_ij (t/2) J_1(t w_ij), M_ij = m0_ij J_0(t w_ij), w_ij = l_i - l_j";
  const std::size_t n = inst.dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && !ScalarTraits<T>::is_zero(inst.L(i, j))) {
        r.add(inconclusive_check(suite, "diagonal", identity, "L is not diagonal; no scalar reduction"));
        return r;
      }
  const SolutionSeries<T> sol = solution_cal_form(inst, s.degree);
  for (double td : s.t_samples) {
    T t;
    if constexpr (is_exact_v<T>) t = rational_from_double(td);
    else t = td;
    const Operator<T> P = sol.P.evaluate(t), M = sol.M.evaluate(t);
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const T omega = inst.L(i, i) - inst.L(j, j);
        const auto [kappa, chi] = scalar_reduction<T>(omega, inst.P0(i, j), inst.M0(i, j), t, s.degree);
        residual = std::max(residual, ScalarTraits<T>::magnitude(T(P(i, j) - kappa)));
        residual = std::max(residual, ScalarTraits<T>::magnitude(T(M(i, j) - chi)));
      }
    double bound = 0.0;
    if constexpr (!is_exact_v<T>)
      bound = s.safety_factor * rounding_allowance(sol.P.majorant()->total(td) + sol.M.majorant()->total(td),
                                                   static_cast<double>(s.degree + n));
    r.add(required_check(suite, at_t(td), identity, residual, bound,
                         is_exact_v<T> ? "exact at t = " + format_rational(rational_from_double(td)) : ""));
  }
  return r;
}

VerificationReport suite_proposition1(const Scenario& s) {
  VerificationReport r;
  std::vector<eds::Coeff> sections = s.sections;
  if (sections.empty()) {
    SeededRng rng(s.seed);
    for (int i = 0; i < 10; ++i) sections.push_back(eds::random_polynomial(rng, 3));
  }
  for (std::size_t i = 0; i < sections.size(); ++i) {
    char label[32];
    std::snprintf(label, sizeof label, "f%02zu", i + 1);
    r.append(eds::check_proposition1(eds::Section(sections[i]), label));
  }
  return r;
}

template <Field T>
VerificationReport suite_constraints(const ProlongationInstance<T>& inst, const Scenario& s) {
  return eds::constraint_residuals(inst, eds::default_constraint_samples(inst.dim(), s.u_samples), s.degree,
                                   s.safety_factor);
}

template <Field T>
VerificationReport suite_generating(const ProlongationInstance<T>& inst, const Scenario& s) {
  VerificationReport r;
  const std::string suite = "generating-function";
  constexpr std::size_t kNodes = 64;
  const Operator<double> lf = to_float(inst.L);
  const double ln = frobenius(lf);
  for (int m = -5; m <= 5; ++m) {
    const OperatorSeries<T> js = bessel_series(inst.L, m, s.degree);
    const auto& maj = *js.majorant();
    for (double t : s.t_samples) {
      const Operator<double> oracle = generating_oracle(lf, m, t, kNodes);
      const Operator<double> series = js.evaluate_float(t);
      const double z = std::abs(t) * ln / 2.0;
      // Trapezoid aliasing picks up J_{m +- j*nodes}; exponentials are accurate to 1e-15 relative.
      const double alias = 4.0 * bessel_norm_majorant(z, static_cast<int>(kNodes) - std::abs(m));
      const double expo = 1e-15 * std::exp(2.0 * z) * std::sqrt(static_cast<double>(inst.dim()));
      const double bound =
          s.safety_factor * (maj.tail(t, static_cast<int>(s.degree)) + alias + expo +
                             rounding_allowance(maj.total(t) + std::exp(2.0 * z),
                                                static_cast<double>(s.degree + kNodes + inst.dim())));
      r.add(required_check(suite, format_m(m) + "/" + at_t(t), "J_m(tX) = (1/2pi) int exp(itX sin th - i m th) dth",
                           frobenius(series - oracle), bound, std::to_string(kNodes) + " nodes"));
    }
  }
  return r;
}

template <Field T>
VerificationReport run_one(const std::string& suite, const ProlongationInstance<T>& inst, const Scenario& s) {
  if (suite == "bessel-recurrences") return suite_recurrences(inst, s);
  if (suite == "ode-residuals") return suite_ode(inst, s);
  if (suite == "solution-equivalence") return suite_equivalence(inst, s);
  if (suite == "bch") return suite_bch(inst, s);
  if (suite == "prolongation") return suite_prolongation(inst, s);
  if (suite == "initial-conditions") return initial_condition_check(inst, s.degree);
  if (suite == "scalar-reduction") return suite_scalar(inst, s);
  if (suite == "eds-proposition1") return suite_proposition1(s);
  if (suite == "eds-closure") return eds::check_base_closure(0, 2);
  if (suite == "eds-constraints") return suite_constraints(inst, s);
  if (suite == "compatibility") return compatibility_check(inst, s.safety_factor);
  if (suite == "generating-function") return suite_generating(inst, s);
  throw std::invalid_argument("unknown suite '" + suite + "'");
}

template <Field T>
VerificationReport guarded(const std::string& suite, const ProlongationInstance<T>& inst, const Scenario& s) {
  try {
    return run_one(suite, inst, s);
  } catch (const std::exception& e) {
    VerificationReport r;
    r.add(error_check(suite, "error", e.what()));
    return r;
  }
}

template <Field T>
VerificationReport run_all(const ProlongationInstance<T>& inst, const Scenario& s, unsigned jobs) {
  VerificationReport report;
  if (jobs <= 1) {
    for (const auto& suite : s.suites) report.append(guarded(suite, inst, s));
  } else {
    std::vector<std::future<VerificationReport>> pending;
    for (const auto& suite : s.suites)
      pending.push_back(std::async(std::launch::async, [&, suite] { return guarded(suite, inst, s); }));
    for (auto& f : pending) report.append(f.get());
  }
  return report;
}

}  // namespace

VerificationReport run_suite(const Scenario& s, unsigned jobs) {
  VerificationReport report;
  try {
    if (s.mode == ScalarMode::exact) {
      const auto inst = scenario_instance_exact(s);
      inst.validate();
      report = run_all(inst, s, jobs);
    } else {
      const auto inst = scenario_instance_float(s);
      inst.validate();
      report = run_all(inst, s, jobs);
    }
  } catch (const std::exception& e) {
    report.add(error_check("scenario", "instance", e.what()));
  }
  report.scenario = emit_scenario(s);
  report.normalize();
  return report;
}

}  // namespace opbessel
