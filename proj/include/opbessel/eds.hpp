#pragma once

// Exterior differential forms on the coordinates (x, y, z, u, p, q, r)
// extended by pseudopotentials xi^1..xi^N, with coefficients in
// Q[x, y, z, u, p, q, r, xi] [e^{su}, E^k], where E = e^f is the
// exponential symbol introduced by pulling back along a section u = f.

#include "opbessel/prolong.hpp"
#include "opbessel/report.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace opbessel::eds {

enum Coord : int { X = 0, Y = 1, Z = 2, U = 3, Pc = 4, Qc = 5, Rc = 6 };
inline constexpr int kBaseCoords = 7;
inline constexpr int kMaxXi = 16;
inline constexpr int kMaxCoords = kBaseCoords + kMaxXi;

/// Coordinate index of xi^m, m = 1..N.
constexpr int xi(int m) { return kBaseCoords + m - 1; }
std::string coord_name(int coord);

/// x^a y^b ... xi^c * e^{s u} * E^k.
struct Monomial {
  std::vector<int> exps;  ///< trailing zeros trimmed
  int exp_u = 0;
  int exp_E = 0;

  int exponent(int coord) const { return coord < static_cast<int>(exps.size()) ? exps[coord] : 0; }
  void set_exponent(int coord, int e);
  int poly_degree() const;
  bool is_one() const { return exps.empty() && exp_u == 0 && exp_E == 0; }

  auto operator<=>(const Monomial&) const = default;
};

Monomial operator*(const Monomial& a, const Monomial& b);

/// Sparse linear combination of monomials with rational coefficients,
/// kept canonical: no zero terms, monomials sorted.
class Coeff {
 public:
  Coeff() = default;
  Coeff(const Rational& c);  // NOLINT(google-explicit-constructor)
  Coeff(long c) : Coeff(Rational(c)) {}  // NOLINT(google-explicit-constructor)

  static Coeff var(int coord, int power = 1);
  static Coeff exp_u(int s);
  static Coeff exp_E(int k);
  static Coeff term(const Rational& c, Monomial m);

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool has_exp_E() const;
  bool has_exp_u() const;
  /// Largest coordinate index with a nonzero exponent, or -1.
  int max_coord() const;

  Coeff& operator+=(const Coeff& o);
  Coeff& operator-=(const Coeff& o);
  friend Coeff operator+(Coeff a, const Coeff& b) { return a += b; }
  friend Coeff operator-(Coeff a, const Coeff& b) { return a -= b; }
  friend Coeff operator-(const Coeff& a);
  friend Coeff operator*(const Coeff& a, const Coeff& b);
  Coeff pow(int n) const;

  /// Partial derivative. exp_argument is the exponent f of the symbol E
  /// (dE/dw = E f_w); required when E occurs.
  Coeff derivative(int coord, const Coeff* exp_argument = nullptr) const;

  friend bool operator==(const Coeff&, const Coeff&) = default;

  std::string to_string() const;

 private:
  void add_term(const Monomial& m, const Rational& c);
  std::map<Monomial, Rational> terms_;
};

/// Homogeneous k-form: sum over sorted wedge monomials (bit masks over
/// coordinates) of coefficients.
class Form {
 public:
  explicit Form(int degree = 0) : degree_(degree) {}

  static Form zero(int degree) { return Form(degree); }
  static Form function(const Coeff& c);
  /// d(coord).
  static Form d(int coord);
  static Form monomial(std::uint32_t mask, const Coeff& c);

  int degree() const { return degree_; }
  const std::map<std::uint32_t, Coeff>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int max_coord() const;

  Form& operator+=(const Form& o);
  Form& operator-=(const Form& o);
  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator-(const Form& a);
  friend Form operator*(const Coeff& c, const Form& f);

  friend bool operator==(const Form&, const Form&) = default;

  /// Canonical text, e.g. "-r dx^dy^dz + dx^dy^du"; "0" for the zero form.
  std::string to_string() const;

 private:
  void add_term(std::uint32_t mask, const Coeff& c);
  int degree_ = 0;
  std::map<std::uint32_t, Coeff> terms_;
};

/// Graded product a ^ b.
Form wedge(const Form& a, const Form& b);

/// Exterior derivative. exp_argument as in Coeff::derivative.
Form ext_d(const Form& a, const Coeff* exp_argument = nullptr);

/// theta_1..theta_4 of the heavenly ideal.
std::vector<Form> base_ideal();

/// Section u = f(x, y, z), p = f_x, q = f_y, r = f_z, with E = e^f.
class Section {
 public:
  /// f must be a polynomial in x, y, z only.
  explicit Section(Coeff f);

  const Coeff& f() const { return f_; }
  Coeff pullback(const Coeff& c) const;
  Form pullback(const Form& a) const;

 private:
  Coeff f_;
  std::vector<Coeff> images_;     ///< coordinate -> pulled-back function
  std::vector<Form> d_images_;    ///< coordinate -> pulled-back differential
};

/// Random polynomial in x, y, z of total degree <= degree.
Coeff random_polynomial(SeededRng& rng, int degree);

/// Parses a polynomial coefficient map {"x^2*y": "3/2", "1": "-1", ...}
/// entry by entry: each key is "1" or a '*'-separated product of x, y, z
/// with optional ^power.
Coeff parse_monomial_key(const std::string& key);
std::string monomial_key(const Monomial& m);

/// Pullbacks of theta_1..theta_3 vanish; theta_4 pulls back to
/// (f_xx + f_yy + (E)_zz) dx^dy^dz, all as symbolic identities.
VerificationReport check_proposition1(const Section& s, const std::string& label = "f");

struct MembershipResult {
  bool found = false;
  int degree = 0;                 ///< multiplier degree bound at which it was found
  std::vector<Form> multipliers;  ///< target = sum_j multipliers[j] ^ generators[j]
  std::size_t unknowns = 0;
  std::size_t equations = 0;
};

/// Bounded-degree search for multipliers sigma_j with
///   target = sum_j sigma_j ^ generators[j],
/// coefficients spanned by monomials (of degree <= multiplier_degree) in the
/// polynomial variables that occur in the problem, times e^{su}, |s| <= 1.
/// Solved exactly over the rationals. Not finding a witness is not a proof
/// of non-membership.
MembershipResult ideal_membership(const Form& target, const std::vector<Form>& generators, int multiplier_degree);

/// Tries degrees start..cap in turn.
MembershipResult ideal_membership_escalating(const Form& target, const std::vector<Form>& generators,
                                             int start_degree, int cap);

/// Re-expands sum_j sigma_j ^ generators[j].
Form expand_witness(const std::vector<Form>& multipliers, const std::vector<Form>& generators);

/// d(theta_i) in the ideal for each generator, with checked witnesses.
VerificationReport check_base_closure(int start_degree = 0, int cap = 2);

/// Omega^k = H^k dx^dy + F^k dx^dz + G^k dy^dz + A^k_m dxi^m ^ dx + B^k_m dxi^m ^ dz + dxi^k ^ dy,
/// with H^k = sum_j H_{jk} xi^j (the operator-to-field convention of field_matrix).
std::vector<Form> prolongation_forms(const Operator<Rational>& H, const Operator<Rational>& F,
                                     const Operator<Rational>& G, const Operator<Rational>& A,
                                     const Operator<Rational>& B);

struct ConstraintSample {
  double u = 0.0, u_x = 0.0, u_y = 0.0, u_z = 0.0;
  std::vector<double> xi;
};

/// u over u_values, slopes in {-1,0,1}^3, xi over the unit basis vectors.
std::vector<ConstraintSample> default_constraint_samples(std::size_t n,
                                                         const std::vector<double>& u_values = {-2.0, -1.0, 0.0});

/// Closure constraints of the prolonged ideal evaluated at one sample;
/// every entry is a vector (field components at xi) or matrix norm.
struct ConstraintValues {
  double hz_minus_eu_gx = 0.0;          ///< H_{u_z} - e^u G_{u_x}
  double fy_plus_gx = 0.0;              ///< F_{u_y} + G_{u_x}
  double vanishing_slopes = 0.0;        ///< max of H_{u_x}, H_{u_y}, F_{u_x}, F_{u_z}, G_{u_y}, G_{u_z}
  double structure = 0.0;               ///< u_z H_u - u_y F_u + u_x G_u - e^u u_z^2 G_{u_x} + [G,H]
  double spectral1 = 0.0;               ///< ||F_xi - G_xi A - H_xi B||
  double spectral2 = 0.0;               ///< F_xi B^{-1} G - G_xi B^{-1} F at xi
  double ansatz_bound = 0.0;            ///< tolerance for the first three
  double structure_bound = 0.0;
  Operator<double> spectral1_matrix;
};

template <Field T>
ConstraintValues evaluate_constraints(const ProlongationInstance<T>& inst, const SolutionSeries<T>& sol,
                                      const ConstraintSample& s, double safety_factor = 10.0);

/// All closure constraints over the samples. The ansatz constraints, the
/// structure equation and [A,B] = 0 are required; the two xi-spectral
/// residuals are informational. Throws std::domain_error for singular B.
template <Field T>
VerificationReport constraint_residuals(const ProlongationInstance<T>& inst,
                                        const std::vector<ConstraintSample>& samples, std::size_t degree,
                                        double safety_factor = 10.0);

extern template ConstraintValues evaluate_constraints(const ProlongationInstance<Rational>&,
                                                      const SolutionSeries<Rational>&, const ConstraintSample&,
                                                      double);
extern template ConstraintValues evaluate_constraints(const ProlongationInstance<double>&,
                                                      const SolutionSeries<double>&, const ConstraintSample&,
                                                      double);
extern template VerificationReport constraint_residuals(const ProlongationInstance<Rational>&,
                                                        const std::vector<ConstraintSample>&, std::size_t,
                                                        double);
extern template VerificationReport constraint_residuals(const ProlongationInstance<double>&,
                                                        const std::vector<ConstraintSample>&, std::size_t,
                                                        double);

}  // namespace opbessel::eds
