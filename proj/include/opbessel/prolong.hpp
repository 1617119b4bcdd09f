#pragma once

// Regular solutions of the prolongation operator system
//   P_u = e^u [L, M],   M_u = -[L, P],   [M, P] = 0,
// in the variable t = 2 e^{u/2}: the adjoint-series form
//   P = (t/2) J_1(t ad_L)(P0),  M = J_0(t ad_L)(M0)
// and the bilateral form
//   P = (t/2) sum_k J_{k+1}(tL) P0 J_k(tL),  M = sum_k J_k(tL) M0 J_k(tL).

#include "opbessel/adjoint.hpp"
#include "opbessel/besselop.hpp"
#include "opbessel/random.hpp"
#include "opbessel/report.hpp"
#include "opbessel/series.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace opbessel {

/// One verification scenario. A and B are the constant matrices of the
/// prolongation forms; N is the integration constant of F.
template <Field T>
struct ProlongationInstance {
  std::string name;
  Operator<T> L, M0, P0, N, A, B;

  std::size_t dim() const { return L.dim(); }

  /// Throws std::invalid_argument if the operators disagree in dimension.
  void validate() const {
    const std::size_t n = L.dim();
    const std::pair<const char*, const Operator<T>*> ops[] = {{"M0", &M0}, {"P0", &P0}, {"N", &N},
                                                             {"A", &A},   {"B", &B}};
    for (const auto& [label, op] : ops)
      if (op->dim() != n)
        throw std::invalid_argument(std::string("instance ") + name + ": operator " + label +
                                    " has dimension " + std::to_string(op->dim()) + ", expected " +
                                    std::to_string(n));
  }

  template <Field U>
  ProlongationInstance<U> convert() const {
    return {name,
            opbessel::convert<U>(L),
            opbessel::convert<U>(M0),
            opbessel::convert<U>(P0),
            opbessel::convert<U>(N),
            opbessel::convert<U>(A),
            opbessel::convert<U>(B)};
  }

  friend bool operator==(const ProlongationInstance&, const ProlongationInstance&) = default;
};

/// u together with t = 2 e^{u/2}. e^u is taken as (t/2)^2 so that it is
/// bit-consistent with series evaluated at t.
struct HeavenlyVariable {
  double u = 0.0;
  double t = 0.0;
  double exp_u = 0.0;

  static HeavenlyVariable from_u(double u) {
    const double t = 2.0 * std::exp(0.5 * u);
    return {u, t, t * t * 0.25};
  }
};

// --- catalog ---------------------------------------------------------------

/// L = e12, M0 = P0 = e23 in 3x3; every series terminates.
ProlongationInstance<Rational> heisenberg3();
/// L = diag(l1, l2), M0 = P0 = e12; reduces to classical Bessel functions of t(l1 - l2).
ProlongationInstance<Rational> diag2(const Rational& l1 = Rational(3, 2), const Rational& l2 = Rational(-1, 2));
/// L and M0 = P0 commute, so the solution is constant.
ProlongationInstance<Rational> commuting_pair();
/// L = e12, M0 = P0 = e21: coupling holds but [ad_L M0, M0] != 0.
ProlongationInstance<Rational> expected_fail_pair();
/// Strictly upper triangular L, M0 = v e_n^T (v_n = 0), P0 = M0 + c L^{n-1}.
/// Satisfies both compatibility conditions and [M0, P0] = 0.
ProlongationInstance<Rational> random_nilpotent(std::size_t dim, std::uint64_t seed);

struct CatalogParams {
  Rational lambda1{3, 2};
  Rational lambda2{-1, 2};
  std::size_t dim = 4;
  std::uint64_t seed = SeededRng::kDefaultSeed;

  friend bool operator==(const CatalogParams&, const CatalogParams&) = default;
};

std::vector<std::string> catalog_names();
std::string catalog_description(std::string_view name);
/// Throws std::invalid_argument for unknown names.
ProlongationInstance<Rational> catalog_entry(std::string_view name, const CatalogParams& params = {});

// --- adjoint-series solutions ----------------------------------------------

/// J_nu(t ad_L)(A) for nu in {0, 1}, truncated at t^degree.
template <Field T>
OperatorSeries<T> cal_bessel(const AdjointContext<T>& ctx, const Operator<T>& a, int nu, std::size_t degree) {
  if (nu != 0 && nu != 1) throw std::invalid_argument("cal_bessel: order must be 0 or 1");
  if (degree < static_cast<std::size_t>(nu)) throw std::invalid_argument("cal_bessel: degree below order");
  const auto ladder = ctx.power_ladder(a, degree);
  OperatorSeries<T> s(a.dim(), degree);
  for (std::size_t p = static_cast<std::size_t>(nu); p <= degree; p += 2) {
    const Rational c = bessel_coefficient(nu, static_cast<int>(p));
    s.set_coeff(p, ladder[p] * ScalarTraits<T>::from_rational(c));
  }
  // ||ad_L^n A|| <= (2||L||)^n ||A|| and 2^{-n} (2||L||)^n = ||L||^n.
  s.set_majorant(BesselMajorant{frobenius(a), frobenius(ctx.generator()), nu, 0});
  return s;
}

template <Field T>
struct SolutionSeries {
  OperatorSeries<T> P;
  OperatorSeries<T> M;
};

template <Field T>
double coupling_defect(const ProlongationInstance<T>& inst) {
  return frobenius(commutator(inst.L, inst.P0) - commutator(inst.L, inst.M0));
}

template <Field T>
double coupling_tolerance(const ProlongationInstance<T>& inst, double safety_factor = 10.0) {
  if constexpr (is_exact_v<T>) return 0.0;
  const double mag = 2.0 * frobenius(inst.L) * (frobenius(inst.P0) + frobenius(inst.M0));
  return safety_factor * rounding_allowance(mag, static_cast<double>(inst.dim()));
}

namespace detail {

template <Field T>
SolutionSeries<T> cal_form_series(const ProlongationInstance<T>& inst, std::size_t degree) {
  if (degree < 2) throw std::invalid_argument("solution_cal_form: degree must be at least 2");
  const AdjointContext<T> ctx(inst.L, 0);
  OperatorSeries<T> j1 = cal_bessel(ctx, inst.P0, 1, degree - 1);
  OperatorSeries<T> p = ScalarTraits<T>::from_rational(Rational(1, 2)) * j1.shift_up(1);
  p.set_majorant(BesselMajorant{frobenius(inst.P0) / 2.0, frobenius(inst.L), 1, 1});
  return {std::move(p), cal_bessel(ctx, inst.M0, 0, degree)};
}

}  // namespace detail

/// P = (t/2) J_1(t ad_L)(P0), M = J_0(t ad_L)(M0) through t^degree.
/// Throws std::invalid_argument when [L,P0] = [L,M0] fails.
template <Field T>
SolutionSeries<T> solution_cal_form(const ProlongationInstance<T>& inst, std::size_t degree) {
  inst.validate();
  const double defect = coupling_defect(inst);
  if (defect > coupling_tolerance(inst))
    throw std::invalid_argument("coupling condition [L,P0] = [L,M0] violated (defect " +
                                std::to_string(defect) + ")");
  return detail::cal_form_series(inst, degree);
}

// --- bilateral solutions ---------------------------------------------------

template <Field T>
struct LFormValue {
  Operator<T> P;
  Operator<T> M;
  double tail_P = 0.0;  ///< truncation bound in Frobenius norm
  double tail_M = 0.0;
  double magnitude_P = 0.0;  ///< majorant of the summed terms, for rounding
  double magnitude_M = 0.0;
};

/// Bilateral sums over |k| <= K with each J_k(tL) truncated at t^degree.
/// The tails cover both the series truncation and the omitted |k| > K.
template <Field T>
LFormValue<T> solution_L_form(const ProlongationInstance<T>& inst, const T& t, int cutoff, std::size_t degree) {
  inst.validate();
  if (cutoff < 1) throw std::invalid_argument("solution_L_form: cutoff K must be at least 1");
  const std::size_t n = inst.dim();
  const int lo = -cutoff;
  const int hi = cutoff + 1;
  std::vector<Operator<T>> jk;
  jk.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int k = lo; k <= hi; ++k) jk.push_back(bessel_series(inst.L, k, degree).evaluate(t));
  auto J = [&](int k) -> const Operator<T>& { return jk[static_cast<std::size_t>(k - lo)]; };

  LFormValue<T> out{Operator<T>(n), Operator<T>(n)};
  for (int k = -cutoff; k <= cutoff; ++k) {
    out.M += J(k) * inst.M0 * J(k);
    out.P += J(k + 1) * inst.P0 * J(k);
  }
  out.P *= t * ScalarTraits<T>::from_rational(Rational(1, 2));

  const double at = ScalarTraits<T>::magnitude(t);
  const double z = at * frobenius(inst.L) / 2.0;
  const int d = static_cast<int>(degree);
  auto b = [&](int k) { return bessel_norm_majorant(z, k); };
  auto eps = [&](int k) { return bessel_norm_tail(z, std::abs(k), d); };

  double trunc_m = 0.0, trunc_p = 0.0, mag_m = 0.0, mag_p = 0.0;
  for (int k = -cutoff; k <= cutoff; ++k) {
    trunc_m += 2.0 * eps(k) * b(k);
    trunc_p += eps(k + 1) * b(k) + b(k + 1) * eps(k);
    mag_m += b(k) * b(k);
    mag_p += b(k + 1) * b(k);
  }
  // Omitted indices, both signs; b_k decays like z^k / k!.
  double omit_m = 0.0, omit_p = 0.0;
  for (int k = cutoff + 1; k < cutoff + 10000; ++k) {
    const double tm = 2.0 * b(k) * b(k);
    const double tp = b(k + 1) * b(k) + b(-k + 1) * b(-k);
    omit_m += tm;
    omit_p += tp;
    if (tm + tp <= 1e-3 * kUnitRoundoff * (omit_m + omit_p) || tm + tp == 0.0) break;
  }
  const double m0 = frobenius(inst.M0);
  const double p0 = frobenius(inst.P0);
  out.tail_M = m0 * (trunc_m + omit_m);
  out.tail_P = 0.5 * at * p0 * (trunc_p + omit_p);
  out.magnitude_M = m0 * mag_m;
  out.magnitude_P = 0.5 * at * p0 * mag_p;
  return out;
}

// --- ODE residuals ---------------------------------------------------------

enum class OdeKind {
  P2,  ///< P'' - P'/t + ad_L^2 P = 0, multiplied by t
  M2,  ///< M'' + M'/t + ad_L^2 M = 0, multiplied by t
};

std::string_view identity_of(OdeKind kind);

/// Residual of the t-multiplied equation as an exact series:
///   P2: t S'' - S' + t ad_L^2 S,   M2: t S'' + S' + t ad_L^2 S.
/// For a series of degree D the residual is exact through D-1.
template <Field T>
OperatorSeries<T> ode_residual(const OperatorSeries<T>& s, OdeKind kind, const AdjointContext<T>& ctx) {
  if (s.degree() < 2) throw std::invalid_argument("ode_residual: series degree must be at least 2");
  if (kind == OdeKind::P2 && (!s.coeff(0).is_zero() || !s.coeff(1).is_zero()))
    throw std::invalid_argument("ode_residual: P2 requires vanishing t^0 and t^1 coefficients");
  const OperatorSeries<T> d1 = series_derivative(s);
  const OperatorSeries<T> d2 = series_derivative(d1);
  const OperatorSeries<T> lap = series_ad(ctx, series_ad(ctx, s)).shift_up(1);
  const OperatorSeries<T> td2 = d2.shift_up(1);
  return kind == OdeKind::P2 ? td2 - d1 + lap : td2 + d1 + lap;
}

struct ResidualAt {
  Operator<double> value;
  double truncation = 0.0;  ///< bound from the series majorant
  double magnitude = 0.0;   ///< bound on the evaluated terms, for rounding
};

/// Evaluates the full polynomial residual at t (float) with its bounds.
template <Field T>
ResidualAt ode_residual_at(const OperatorSeries<T>& s, OdeKind kind, const AdjointContext<T>& ctx, double t) {
  const AdjointContext<double> fctx(to_float(ctx.generator()), 0);
  const Operator<double> v = s.evaluate_float(t);
  const Operator<double> d1 = series_derivative(s).evaluate_float(t);
  const Operator<double> d2 = series_derivative(series_derivative(s)).evaluate_float(t);
  const Operator<double> lap = fctx.apply(fctx.apply(v)) * t;
  ResidualAt r{kind == OdeKind::P2 ? d2 * t - d1 + lap : d2 * t + d1 + lap};
  if (s.majorant()) {
    const auto& m = *s.majorant();
    const int deg = static_cast<int>(s.degree());
    const double l2 = 4.0 * std::pow(frobenius(ctx.generator()), 2);
    const double at = std::abs(t);
    r.truncation = at * m.tail(t, deg, 2) + m.tail(t, deg, 1) + l2 * at * m.tail(t, deg, 0);
    r.magnitude = at * m.total(t, 2) + m.total(t, 1) + l2 * at * m.total(t, 0);
  }
  return r;
}

// --- evaluation in u -------------------------------------------------------

/// P, M and their u-derivatives at one u, from the adjoint-series solution.
/// u-derivatives use the chain rule d/du = (t/2) d/dt.
struct ProlongationState {
  HeavenlyVariable var;
  Operator<double> L, P, M, P_u, M_u;
  double tail_P = 0.0, tail_M = 0.0, tail_P_u = 0.0, tail_M_u = 0.0;
  double mag_P = 0.0, mag_M = 0.0, mag_P_u = 0.0, mag_M_u = 0.0;
};

template <Field T>
struct UDerivativeSeries {
  OperatorSeries<T> P_u;
  OperatorSeries<T> M_u;
};

/// (t/2) dS/dt as a series of the same degree.
template <Field T>
OperatorSeries<T> u_derivative_series(const OperatorSeries<T>& s) {
  return ScalarTraits<T>::from_rational(Rational(1, 2)) * series_derivative(s).shift_up(1);
}

template <Field T>
ProlongationState evaluate_state(const ProlongationInstance<T>& inst, const SolutionSeries<T>& sol, double u) {
  ProlongationState st;
  st.var = HeavenlyVariable::from_u(u);
  const double t = st.var.t;
  st.L = to_float(inst.L);
  st.P = sol.P.evaluate_float(t);
  st.M = sol.M.evaluate_float(t);
  st.P_u = u_derivative_series(sol.P).evaluate_float(t);
  st.M_u = u_derivative_series(sol.M).evaluate_float(t);
  const int d = static_cast<int>(sol.P.degree());
  if (sol.P.majorant()) {
    const auto& mp = *sol.P.majorant();
    st.tail_P = mp.tail(t, d);
    st.tail_P_u = 0.5 * t * mp.tail(t, d, 1);
    st.mag_P = mp.total(t);
    st.mag_P_u = 0.5 * t * mp.total(t, 1);
  }
  if (sol.M.majorant()) {
    const auto& mm = *sol.M.majorant();
    const int dm = static_cast<int>(sol.M.degree());
    st.tail_M = mm.tail(t, dm);
    st.tail_M_u = 0.5 * t * mm.tail(t, dm, 1);
    st.mag_M = mm.total(t);
    st.mag_M_u = 0.5 * t * mm.total(t, 1);
  }
  return st;
}

/// Tolerance for a float residual: safety * (truncation + rounding).
inline double residual_tolerance(double truncation, double magnitude, std::size_t degree, std::size_t dim,
                                 double safety_factor) {
  return safety_factor * (truncation + rounding_allowance(magnitude, static_cast<double>(degree + dim)));
}

std::string format_u(double u);

/// The three prolongation equations at u, from the adjoint-series solution.
/// Exact-mode instances also get an exact series-identity check.
template <Field T>
VerificationReport prolongation_residual(const ProlongationInstance<T>& inst, double u, std::size_t degree,
                                         double safety_factor = 10.0) {
  VerificationReport report;
  const std::string suite = "prolongation";
  const SolutionSeries<T> sol = solution_cal_form(inst, degree);
  const ProlongationState st = evaluate_state(inst, sol, u);
  const std::size_t n = inst.dim();
  const double e = st.var.exp_u;
  const double l2 = 2.0 * frobenius(st.L);

  const Operator<double> r1 = st.P_u - commutator(st.L, st.M) * e;
  const Operator<double> r2 = st.M_u + commutator(st.L, st.P);
  const Operator<double> r3 = commutator(st.M, st.P);

  const double b1 = residual_tolerance(st.tail_P_u + e * l2 * st.tail_M, st.mag_P_u + e * l2 * st.mag_M, degree,
                                       n, safety_factor);
  const double b2 =
      residual_tolerance(st.tail_M_u + l2 * st.tail_P, st.mag_M_u + l2 * st.mag_P, degree, n, safety_factor);
  const double mn = frobenius(st.M), pn = frobenius(st.P);
  const double b3 = residual_tolerance(2.0 * (mn * st.tail_P + pn * st.tail_M + st.tail_M * st.tail_P),
                                       2.0 * st.mag_M * st.mag_P, degree, n, safety_factor);
  const std::string at = "u=" + format_u(u);
  const std::string detail = "t=" + std::to_string(st.var.t);
  report.add(required_check(suite, at + "/P_u", "P_u = e^u[L,M]", frobenius(r1), b1, detail));
  report.add(required_check(suite, at + "/M_u", "M_u = -[L,P]", frobenius(r2), b2, detail));
  report.add(required_check(suite, at + "/MP", "[M,P] = 0", frobenius(r3), b3, detail));

  if constexpr (is_exact_v<T>) {
    // (t/2)P' - (t^2/4) ad_L M, (t/2)M' + ad_L P and [M,P], as exact series.
    const AdjointContext<T> ctx(inst.L, 0);
    const auto quarter = Rational(1, 4);
    const OperatorSeries<T> s1 = u_derivative_series(sol.P) - quarter * series_ad(ctx, sol.M).shift_up(2);
    const OperatorSeries<T> s2 = u_derivative_series(sol.M) + series_ad(ctx, sol.P);
    const OperatorSeries<T> s3 = series_commutator(sol.M, sol.P);
    auto through = [](const OperatorSeries<T>& s) { return "exact through degree " + std::to_string(s.degree()); };
    report.add(required_check(suite, "series/P_u", "P_u = e^u[L,M]", max_coefficient_norm(s1), 0.0, through(s1)));
    report.add(required_check(suite, "series/M_u", "M_u = -[L,P]", max_coefficient_norm(s2), 0.0, through(s2)));
    report.add(required_check(suite, "series/MP", "[M,P] = 0", max_coefficient_norm(s3), 0.0, through(s3)));
  }
  return report;
}

/// [L,P0] = [L,M0] and [ad_L M0, M0] = 0.
template <Field T>
VerificationReport compatibility_check(const ProlongationInstance<T>& inst, double safety_factor = 10.0) {
  inst.validate();
  VerificationReport report;
  const AdjointContext<T> ctx(inst.L, 0);
  const Operator<T> adm = ctx.apply(inst.M0);
  const double c2 = frobenius(commutator(adm, inst.M0));
  double b2 = 0.0;
  if constexpr (!is_exact_v<T>)
    b2 = safety_factor *
         rounding_allowance(4.0 * frobenius(inst.L) * std::pow(frobenius(inst.M0), 2), 2.0 * inst.dim());
  report.add(required_check("compatibility", "coupling", "[L,P0] = [L,M0]", coupling_defect(inst),
                            coupling_tolerance(inst, safety_factor)));
  report.add(required_check("compatibility", "commuting-data", "[ad_L(M0), M0] = 0", c2, b2));
  return report;
}

/// Series coefficients: P(0) = 0, P_t(0) = 0, M(0) = M0, M_t(0) = 0, exactly.
template <Field T>
VerificationReport initial_condition_check(const ProlongationInstance<T>& inst, std::size_t degree) {
  inst.validate();
  VerificationReport report;
  const SolutionSeries<T> sol = detail::cal_form_series(inst, degree);
  const std::string suite = "initial-conditions";
  report.add(required_check(suite, "P(0)", "P(0) = 0", frobenius(sol.P.coeff(0)), 0.0));
  report.add(required_check(suite, "P_t(0)", "P_t(0) = 0", frobenius(sol.P.coeff(1)), 0.0));
  report.add(required_check(suite, "M(0)", "M(0) = M0", frobenius(sol.M.coeff(0) - inst.M0), 0.0));
  report.add(required_check(suite, "M_t(0)", "M_t(0) = 0", frobenius(sol.M.coeff(1)), 0.0));
  return report;
}

/// Classical regular solutions kappa = p0 (t/2) J_1(t omega), chi = m0 J_0(t omega),
/// truncated like the operator pipeline (J_1 through t^{degree-1}, J_0 through t^degree).
template <Field T>
std::pair<T, T> scalar_reduction(const T& omega, const T& p0, const T& m0, const T& t, std::size_t degree) {
  if (degree < 2) throw std::invalid_argument("scalar_reduction: degree must be at least 2");
  const T x = t * omega;
  T j0 = ScalarTraits<T>::zero(), j1 = ScalarTraits<T>::zero();
  T power = ScalarTraits<T>::one();
  for (std::size_t p = 0; p <= degree; ++p) {
    if (p > 0) power *= x;
    if (p % 2 == 0) j0 += ScalarTraits<T>::from_rational(bessel_coefficient(0, static_cast<int>(p))) * power;
    else if (p <= degree - 1)
      j1 += ScalarTraits<T>::from_rational(bessel_coefficient(1, static_cast<int>(p))) * power;
  }
  const T half = ScalarTraits<T>::from_rational(Rational(1, 2));
  return {T(p0 * half * t * j1), T(m0 * j0)};
}

struct HFG {
  Operator<double> H, F, G;
};

/// H = e^u u_z L + P(u), F = -u_y L + N, G = u_x L + M(u), as operator
/// matrices. The components of the corresponding linear vector fields on
/// xi are given by field_components().
template <Field T>
HFG build_HFG(const ProlongationInstance<T>& inst, const SolutionSeries<T>& sol, double u, double u_x, double u_y,
              double u_z) {
  const HeavenlyVariable var = HeavenlyVariable::from_u(u);
  const Operator<double> l = to_float(inst.L);
  return {l * (var.exp_u * u_z) + sol.P.evaluate_float(var.t), l * (-u_y) + to_float(inst.N),
          l * u_x + sol.M.evaluate_float(var.t)};
}

template <Field T>
HFG build_HFG(const ProlongationInstance<T>& inst, double u, double u_x, double u_y, double u_z,
              std::size_t degree) {
  return build_HFG(inst, solution_cal_form(inst, degree), u, u_x, u_y, u_z);
}

/// Sign convention between operators and linear vector fields. An operator
/// X acts on xi as the field with components X^k(xi) = sum_j X_{jk} xi^j,
/// i.e. the coefficient matrix of the field is X^T. With this choice the
/// vector-field bracket [G,H]^k = G^j dH^k/dxi^j - H^j dG^k/dxi^j equals
/// the field of the operator commutator [G,H], and the structure equation
/// of the prolongation forms reduces to the three prolongation equations.
Operator<double> field_matrix(const Operator<double>& op);
std::vector<double> field_components(const Operator<double>& op, const std::vector<double>& xi);

}  // namespace opbessel
