#include "opbessel/prolong.hpp"

#include <cstdio>

namespace opbessel {

Operator<Rational> random_rational_operator(std::size_t n, SeededRng& rng, bool strictly_upper, long max_num,
                                            long max_den) {
  Operator<Rational> a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = strictly_upper ? i + 1 : 0; j < n; ++j) a(i, j) = rng.small_rational(max_num, max_den);
  return a;
}

Operator<double> random_float_operator(std::size_t n, SeededRng& rng) {
  Operator<double> a(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  return a;
}

namespace {

using Q = Rational;
using Op = Operator<Rational>;

ProlongationInstance<Rational> with_defaults(std::string name, Op l, Op m0, Op p0) {
  const std::size_t n = l.dim();
  return {std::move(name), std::move(l), std::move(m0), std::move(p0), Op(n), Op::identity(n), Op::identity(n)};
}

}  // namespace

ProlongationInstance<Rational> heisenberg3() {
  return with_defaults("heisenberg3", Op::unit(3, 0, 1), Op::unit(3, 1, 2), Op::unit(3, 1, 2));
}

ProlongationInstance<Rational> diag2(const Rational& l1, const Rational& l2) {
  const Q diag[] = {l1, l2};
  return with_defaults("diag2", Op::diagonal(diag), Op::unit(2, 0, 1), Op::unit(2, 0, 1));
}

ProlongationInstance<Rational> commuting_pair() {
  const Q l[] = {Q(1), Q(2)};
  const Q m[] = {Q(3), Q(-1)};
  return with_defaults("commuting", Op::diagonal(l), Op::diagonal(m), Op::diagonal(m));
}

ProlongationInstance<Rational> expected_fail_pair() {
  return with_defaults("expected-fail", Op::unit(2, 0, 1), Op::unit(2, 1, 0), Op::unit(2, 1, 0));
}

ProlongationInstance<Rational> random_nilpotent(std::size_t dim, std::uint64_t seed) {
  if (dim < 2) throw std::invalid_argument("random_nilpotent: dimension must be at least 2");
  SeededRng rng(seed);
  Op l = random_rational_operator(dim, rng, true);
  // M0 = v e_n^T with v_n = 0: every ad_L^k(M0) lies in the same abelian
  // family, and so does L^{n-1}.
  Op m0(dim);
  for (std::size_t i = 0; i + 1 < dim; ++i) m0(i, dim - 1) = rng.small_rational();
  Op top = Op::identity(dim);
  for (std::size_t k = 0; k + 1 < dim; ++k) top = top * l;
  Op p0 = m0 + top * rng.small_rational();
  auto inst = with_defaults("nilpotent-random", std::move(l), std::move(m0), std::move(p0));
  inst.N = random_rational_operator(dim, rng, true);
  return inst;
}

std::vector<std::string> catalog_names() {
  return {"commuting", "diag2", "expected-fail", "heisenberg3", "nilpotent-random"};
}

std::string catalog_description(std::string_view name) {
  if (name == "heisenberg3") return "L = e12, M0 = P0 = e23 (3x3); terminating series, P = (t^2/4) e13";
  if (name == "diag2") return "L = diag(lambda1, lambda2), M0 = P0 = e12; classical Bessel reduction";
  if (name == "commuting") return "L = diag(1,2), M0 = P0 = diag(3,-1); constant solution";
  if (name == "expected-fail") return "L = e12, M0 = P0 = e21; violates [ad_L(M0), M0] = 0";
  if (name == "nilpotent-random") return "seeded strictly upper triangular L; M0 in the last column, P0 = M0 + c L^(n-1)";
  throw std::invalid_argument("unknown catalog entry '" + std::string(name) + "'");
}

ProlongationInstance<Rational> catalog_entry(std::string_view name, const CatalogParams& params) {
  if (name == "heisenberg3") return heisenberg3();
  if (name == "diag2") return diag2(params.lambda1, params.lambda2);
  if (name == "commuting") return commuting_pair();
  if (name == "expected-fail") return expected_fail_pair();
  if (name == "nilpotent-random") return random_nilpotent(params.dim, params.seed);
  throw std::invalid_argument("unknown catalog entry '" + std::string(name) + "'");
}

std::string_view identity_of(OdeKind kind) {
  return kind == OdeKind::P2 ? "t P_tt - P_t + t ad_L^2[P] = 0" : "t M_tt + M_t + t ad_L^2[M] = 0";
}

std::string format_u(double u) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.3f", u);
  return buf;
}

Operator<double> field_matrix(const Operator<double>& op) { return op.transpose(); }

std::vector<double> field_components(const Operator<double>& op, const std::vector<double>& xi) {
  const std::size_t n = op.dim();
  if (xi.size() != n) throw std::invalid_argument("field_components: dimension mismatch");
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j) out[k] += op(j, k) * xi[j];
  return out;
}

}  // namespace opbessel
