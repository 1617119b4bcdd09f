#include "opbessel/eds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace opbessel::eds {

// --- monomials ---------------------------------------------------------------

std::string coord_name(int coord) {
  static const char* base[] = {"x", "y", "z", "u", "p", "q", "r"};
  if (coord < 0 || coord >= kMaxCoords) throw std::out_of_range("coordinate index out of range");
  if (coord < kBaseCoords) return base[coord];
  return "xi" + std::to_string(coord - kBaseCoords + 1);
}

void Monomial::set_exponent(int coord, int e) {
  if (coord < 0 || coord >= kMaxCoords) throw std::out_of_range("coordinate index out of range");
  if (coord >= static_cast<int>(exps.size())) {
    if (e == 0) return;
    exps.resize(static_cast<std::size_t>(coord) + 1, 0);
  }
  exps[static_cast<std::size_t>(coord)] = e;
  while (!exps.empty() && exps.back() == 0) exps.pop_back();
}

int Monomial::poly_degree() const {
  int d = 0;
  for (int e : exps) d += e;
  return d;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial m;
  m.exps.assign(std::max(a.exps.size(), b.exps.size()), 0);
  for (std::size_t i = 0; i < a.exps.size(); ++i) m.exps[i] += a.exps[i];
  for (std::size_t i = 0; i < b.exps.size(); ++i) m.exps[i] += b.exps[i];
  while (!m.exps.empty() && m.exps.back() == 0) m.exps.pop_back();
  m.exp_u = a.exp_u + b.exp_u;
  m.exp_E = a.exp_E + b.exp_E;
  return m;
}

// --- coefficients ------------------------------------------------------------

Coeff::Coeff(const Rational& c) {
  if (sgn(c) != 0) terms_.emplace(Monomial{}, c);
}

Coeff Coeff::var(int coord, int power) {
  Monomial m;
  m.set_exponent(coord, power);
  return term(Rational(1), std::move(m));
}

Coeff Coeff::exp_u(int s) {
  Monomial m;
  m.exp_u = s;
  return term(Rational(1), std::move(m));
}

Coeff Coeff::exp_E(int k) {
  Monomial m;
  m.exp_E = k;
  return term(Rational(1), std::move(m));
}

Coeff Coeff::term(const Rational& c, Monomial m) {
  Coeff r;
  r.add_term(m, c);
  return r;
}

void Coeff::add_term(const Monomial& m, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

bool Coeff::has_exp_E() const {
  return std::any_of(terms_.begin(), terms_.end(), [](const auto& kv) { return kv.first.exp_E != 0; });
}

bool Coeff::has_exp_u() const {
  return std::any_of(terms_.begin(), terms_.end(), [](const auto& kv) { return kv.first.exp_u != 0; });
}

int Coeff::max_coord() const {
  int m = -1;
  for (const auto& [mono, c] : terms_) m = std::max(m, static_cast<int>(mono.exps.size()) - 1);
  return m;
}

Coeff& Coeff::operator+=(const Coeff& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Coeff& Coeff::operator-=(const Coeff& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Coeff operator-(const Coeff& a) {
  Coeff r;
  for (const auto& [m, c] : a.terms_) r.terms_.emplace(m, -c);
  return r;
}

Coeff operator*(const Coeff& a, const Coeff& b) {
  Coeff r;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
  return r;
}

Coeff Coeff::pow(int n) const {
  if (n < 0) throw std::invalid_argument("Coeff::pow: negative exponent");
  Coeff r(Rational(1));
  for (int i = 0; i < n; ++i) r = r * *this;
  return r;
}

Coeff Coeff::derivative(int coord, const Coeff* exp_argument) const {
  Coeff r;
  std::optional<Coeff> f_w;
  for (const auto& [m, c] : terms_) {
    if (const int e = m.exponent(coord); e != 0) {
      Monomial dm = m;
      dm.set_exponent(coord, e - 1);
      r.add_term(dm, c * e);
    }
    if (coord == U && m.exp_u != 0) r.add_term(m, c * m.exp_u);
    if (m.exp_E != 0) {
      if (!exp_argument) throw std::logic_error("derivative of E requires the section exponent");
      if (!f_w) f_w = exp_argument->derivative(coord);
      r += Coeff::term(c * m.exp_E, m) * *f_w;
    }
  }
  return r;
}

namespace {

std::string factor_string(const Monomial& m) {
  std::vector<std::string> factors;
  if (m.exp_u == 1) factors.push_back("e^u");
  else if (m.exp_u == -1) factors.push_back("e^(-u)");
  else if (m.exp_u != 0) factors.push_back("e^(" + std::to_string(m.exp_u) + "u)");
  if (m.exp_E == 1) factors.push_back("E");
  else if (m.exp_E != 0) factors.push_back(m.exp_E > 0 ? "E^" + std::to_string(m.exp_E)
                                                       : "E^(" + std::to_string(m.exp_E) + ")");
  for (std::size_t v = 0; v < m.exps.size(); ++v) {
    const int e = m.exps[v];
    if (e == 0) continue;
    std::string f = coord_name(static_cast<int>(v));
    if (e != 1) f += "^" + std::to_string(e);
    factors.push_back(std::move(f));
  }
  std::string out;
  for (std::size_t i = 0; i < factors.size(); ++i) out += (i ? "*" : "") + factors[i];
  return out;
}

// Term with its sign stripped; the sign is returned separately.
std::string unsigned_term(const Monomial& m, const Rational& c, bool& negative) {
  negative = sgn(c) < 0;
  const Rational a = abs(c);
  const std::string f = factor_string(m);
  if (f.empty()) return format_rational(a);
  if (a == 1) return f;
  return format_rational(a) + "*" + f;
}

std::string mask_string(std::uint32_t mask) {
  std::string out;
  for (int v = 0; v < kMaxCoords; ++v) {
    if (!(mask >> v & 1u)) continue;
    if (!out.empty()) out += "^";
    out += "d" + coord_name(v);
  }
  return out;
}

}  // namespace

std::string Coeff::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    bool neg = false;
    const std::string t = unsigned_term(m, c, neg);
    if (first) out += (neg ? "-" : "") + t;
    else out += (neg ? " - " : " + ") + t;
    first = false;
  }
  return out;
}

// --- forms -------------------------------------------------------------------

Form Form::function(const Coeff& c) {
  Form f(0);
  f.add_term(0u, c);
  return f;
}

Form Form::d(int coord) {
  if (coord < 0 || coord >= kMaxCoords) throw std::out_of_range("coordinate index out of range");
  Form f(1);
  f.add_term(1u << coord, Coeff(Rational(1)));
  return f;
}

Form Form::monomial(std::uint32_t mask, const Coeff& c) {
  Form f(std::popcount(mask));
  f.add_term(mask, c);
  return f;
}

void Form::add_term(std::uint32_t mask, const Coeff& c) {
  if (std::popcount(mask) != degree_) throw std::logic_error("Form: wedge monomial of wrong degree");
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(mask, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

int Form::max_coord() const {
  int m = -1;
  for (const auto& [mask, c] : terms_) {
    if (mask) m = std::max(m, 31 - std::countl_zero(mask));
    m = std::max(m, c.max_coord());
  }
  return m;
}

Form& Form::operator+=(const Form& o) {
  if (o.degree_ != degree_ && !o.is_zero()) {
    if (is_zero()) degree_ = o.degree_;
    else throw std::invalid_argument("Form: adding forms of different degree");
  }
  for (const auto& [mask, c] : o.terms_) add_term(mask, c);
  return *this;
}

Form& Form::operator-=(const Form& o) { return *this += -o; }

Form operator-(const Form& a) {
  Form r(a.degree_);
  for (const auto& [mask, c] : a.terms_) r.terms_.emplace(mask, -c);
  return r;
}

Form operator*(const Coeff& c, const Form& f) {
  Form r(f.degree_);
  for (const auto& [mask, k] : f.terms_) r.add_term(mask, c * k);
  return r;
}

std::string Form::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [mask, c] : terms_) {
    const std::string ms = mask_string(mask);
    std::string piece;
    bool neg = false;
    if (c.terms().size() == 1) {
      const auto& [m, k] = *c.terms().begin();
      std::string t = unsigned_term(m, k, neg);
      if (ms.empty()) piece = t;
      else if (t == "1") piece = ms;
      else piece = t + " " + ms;
    } else {
      piece = "(" + c.to_string() + ")" + (ms.empty() ? "" : " " + ms);
    }
    if (first) out += (neg ? "-" : "") + piece;
    else out += (neg ? " - " : " + ") + piece;
    first = false;
  }
  return out;
}

namespace {

// Sign of dx_a ^ dx_b relative to the sorted monomial a|b.
int wedge_sign(std::uint32_t a, std::uint32_t b) {
  int inversions = 0;
  for (std::uint32_t rest = b; rest; rest &= rest - 1) {
    const int j = std::countr_zero(rest);
    inversions += std::popcount(j + 1 < 32 ? a >> (j + 1) : 0u);
  }
  return inversions % 2 == 0 ? 1 : -1;
}

}  // namespace

Form wedge(const Form& a, const Form& b) {
  Form r(a.degree() + b.degree());
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      if (ma & mb) continue;
      const Coeff prod = ca * cb;
      r += Form::monomial(ma | mb, wedge_sign(ma, mb) > 0 ? prod : -prod);
    }
  }
  return r;
}

Form ext_d(const Form& a, const Coeff* exp_argument) {
  Form r(a.degree() + 1);
  const int top = std::max(a.max_coord(), static_cast<int>(Rc));
  for (const auto& [mask, c] : a.terms()) {
    for (int v = 0; v <= top; ++v) {
      if (mask >> v & 1u) continue;
      Coeff dc = c.derivative(v, exp_argument);
      if (dc.is_zero()) continue;
      const int below = std::popcount(mask & ((1u << v) - 1u));
      r += Form::monomial(mask | (1u << v), below % 2 == 0 ? dc : -dc);
    }
  }
  return r;
}

std::vector<Form> base_ideal() {
  const Form dx = Form::d(X), dy = Form::d(Y), dz = Form::d(Z), du = Form::d(U);
  const Form dp = Form::d(Pc), dq = Form::d(Qc), dr = Form::d(Rc);
  const Form vol = wedge(wedge(dx, dy), dz);
  const Coeff r = Coeff::var(Rc), p = Coeff::var(Pc), q = Coeff::var(Qc), eu = Coeff::exp_u(1);
  return {
      wedge(wedge(du, dx), dy) - r * vol,
      wedge(wedge(du, dy), dz) - p * vol,
      wedge(wedge(du, dx), dz) + q * vol,
      wedge(wedge(dp, dy), dz) - wedge(wedge(dq, dx), dz) + eu * wedge(wedge(dr, dx), dy) + (eu * r * r) * vol,
  };
}

// --- sections ----------------------------------------------------------------

Section::Section(Coeff f) : f_(std::move(f)) {
  for (const auto& [m, c] : f_.terms())
    if (m.exp_u != 0 || m.exp_E != 0 || m.exps.size() > 3)
      throw std::invalid_argument("Section: f must be a polynomial in x, y, z");
  images_.resize(kMaxCoords);
  d_images_.resize(kMaxCoords);
  for (int v = 0; v < kMaxCoords; ++v) {
    images_[v] = Coeff::var(v);
    d_images_[v] = Form::d(v);
  }
  const Coeff fx = f_.derivative(X), fy = f_.derivative(Y), fz = f_.derivative(Z);
  const std::pair<int, Coeff> subst[] = {{U, f_}, {Pc, fx}, {Qc, fy}, {Rc, fz}};
  for (const auto& [v, img] : subst) {
    images_[v] = img;
    d_images_[v] = ext_d(Form::function(img));
  }
}

Coeff Section::pullback(const Coeff& c) const {
  Coeff out;
  for (const auto& [m, k] : c.terms()) {
    if (m.exp_E != 0) throw std::invalid_argument("Section::pullback: coefficient already pulled back");
    Monomial e;
    e.exp_E = m.exp_u;
    Coeff t = Coeff::term(k, e);
    for (std::size_t v = 0; v < m.exps.size(); ++v)
      if (m.exps[v] != 0) t = t * images_[v].pow(m.exps[v]);
    out += t;
  }
  return out;
}

Form Section::pullback(const Form& a) const {
  Form out(a.degree());
  for (const auto& [mask, c] : a.terms()) {
    Form piece = Form::function(pullback(c));
    for (int v = 0; v < kMaxCoords; ++v)
      if (mask >> v & 1u) piece = wedge(piece, d_images_[v]);
    out += piece;
  }
  return out;
}

Coeff random_polynomial(SeededRng& rng, int degree) {
  Coeff f;
  for (int a = 0; a <= degree; ++a)
    for (int b = 0; a + b <= degree; ++b)
      for (int c = 0; a + b + c <= degree; ++c) {
        if (rng.integer(0, 2) == 0) continue;  // sparse-ish
        Monomial m;
        m.set_exponent(X, a);
        m.set_exponent(Y, b);
        m.set_exponent(Z, c);
        f += Coeff::term(rng.small_rational(3, 2), m);
      }
  return f;
}

Coeff parse_monomial_key(const std::string& key) {
  Monomial m;
  if (key == "1" || key.empty()) return Coeff::term(Rational(1), m);
  std::stringstream ss(key);
  std::string factor;
  while (std::getline(ss, factor, '*')) {
    std::string name = factor;
    int power = 1;
    if (auto caret = factor.find('^'); caret != std::string::npos) {
      name = factor.substr(0, caret);
      try {
        power = std::stoi(factor.substr(caret + 1));
      } catch (const std::exception&) {
        throw std::invalid_argument("bad exponent in monomial '" + key + "'");
      }
      if (power < 0) throw std::invalid_argument("negative exponent in monomial '" + key + "'");
    }
    int coord = -1;
    if (name == "x") coord = X;
    else if (name == "y") coord = Y;
    else if (name == "z") coord = Z;
    else throw std::invalid_argument("section monomials use x, y, z only: '" + key + "'");
    m.set_exponent(coord, m.exponent(coord) + power);
  }
  return Coeff::term(Rational(1), m);
}

std::string monomial_key(const Monomial& m) {
  const std::string f = factor_string(m);
  return f.empty() ? "1" : f;
}

VerificationReport check_proposition1(const Section& s, const std::string& label) {
  VerificationReport report;
  const auto ideal = base_ideal();
  const std::string suite = "eds-proposition1";
  for (int i = 0; i < 3; ++i) {
    const Form pb = s.pullback(ideal[static_cast<std::size_t>(i)]);
    report.add(required_check(suite, label + "/theta" + std::to_string(i + 1),
                              "theta_" + std::to_string(i + 1) + " pulls back to 0",
                              static_cast<double>(pb.terms().size()), 0.0,
                              pb.is_zero() ? "" : "pullback: " + pb.to_string()));
  }
  const Coeff& f = s.f();
  const Coeff E = Coeff::exp_E(1);
  const Coeff lhs = f.derivative(X).derivative(X) + f.derivative(Y).derivative(Y) +
                    E.derivative(Z, &f).derivative(Z, &f);
  const Form expected = Form::monomial(0b111u, lhs);
  const Form pb4 = s.pullback(ideal[3]);
  const Form diff = pb4 - expected;
  report.add(required_check(suite, label + "/theta4", "theta_4 pulls back to (u_xx + u_yy + (e^u)_zz) dx^dy^dz",
                            static_cast<double>(diff.terms().size()), 0.0,
                            diff.is_zero() ? "" : "difference: " + diff.to_string()));
  return report;
}

// --- ideal membership --------------------------------------------------------

namespace {

struct SparseRow {
  std::map<int, Rational> cols;
  Rational rhs;
};

// Exact elimination; free variables are set to zero. Returns nothing when
// the system is inconsistent.
std::optional<std::vector<Rational>> solve_sparse(std::vector<SparseRow> rows, int ncols) {
  std::map<int, SparseRow> pivots;
  for (auto& row : rows) {
    while (!row.cols.empty()) {
      auto first = row.cols.begin();
      auto piv = pivots.find(first->first);
      if (piv == pivots.end()) break;
      const Rational factor = first->second;
      for (const auto& [c, v] : piv->second.cols) {
        auto [it, inserted] = row.cols.try_emplace(c, -factor * v);
        if (!inserted) {
          it->second -= factor * v;
          if (sgn(it->second) == 0) row.cols.erase(it);
        }
      }
      row.rhs -= factor * piv->second.rhs;
    }
    if (row.cols.empty()) {
      if (sgn(row.rhs) != 0) return std::nullopt;
      continue;
    }
    const int pc = row.cols.begin()->first;
    const Rational inv = 1 / Rational(row.cols.begin()->second);
    for (auto& [c, v] : row.cols) v *= inv;
    row.rhs *= inv;
    pivots.emplace(pc, std::move(row));
  }
  std::vector<Rational> x(static_cast<std::size_t>(ncols), Rational(0));
  for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
    Rational v = it->second.rhs;
    for (const auto& [c, a] : it->second.cols)
      if (c != it->first) v -= a * x[static_cast<std::size_t>(c)];
    x[static_cast<std::size_t>(it->first)] = v;
  }
  return x;
}

void collect_vars(const Form& f, std::uint32_t& diff_coords, std::vector<bool>& poly_vars, bool& has_exp_u) {
  for (const auto& [mask, c] : f.terms()) {
    diff_coords |= mask;
    for (const auto& [m, k] : c.terms()) {
      for (std::size_t v = 0; v < m.exps.size(); ++v)
        if (m.exps[v] != 0) {
          poly_vars[v] = true;
          diff_coords |= 1u << v;
        }
      if (m.exp_u != 0) has_exp_u = true;
    }
  }
}

void enumerate_monomials(const std::vector<int>& vars, std::size_t idx, int budget, Monomial& cur,
                         std::vector<Monomial>& out) {
  if (idx == vars.size()) {
    out.push_back(cur);
    return;
  }
  for (int e = 0; e <= budget; ++e) {
    cur.set_exponent(vars[idx], e);
    enumerate_monomials(vars, idx + 1, budget - e, cur, out);
  }
  cur.set_exponent(vars[idx], 0);
}

void enumerate_masks(const std::vector<int>& coords, std::size_t idx, int remaining, std::uint32_t cur,
                     std::vector<std::uint32_t>& out) {
  if (remaining == 0) {
    out.push_back(cur);
    return;
  }
  if (idx == coords.size()) return;
  enumerate_masks(coords, idx + 1, remaining - 1, cur | (1u << coords[idx]), out);
  enumerate_masks(coords, idx + 1, remaining, cur, out);
}

}  // namespace

Form expand_witness(const std::vector<Form>& multipliers, const std::vector<Form>& generators) {
  if (multipliers.size() != generators.size()) throw std::invalid_argument("witness size mismatch");
  Form sum(0);
  for (std::size_t j = 0; j < generators.size(); ++j) sum += wedge(multipliers[j], generators[j]);
  return sum;
}

MembershipResult ideal_membership(const Form& target, const std::vector<Form>& generators, int multiplier_degree) {
  if (generators.empty()) throw std::invalid_argument("ideal_membership: no generators");
  if (multiplier_degree < 0) throw std::invalid_argument("ideal_membership: negative degree bound");
  for (const auto& g : generators)
    if (target.degree() < g.degree())
      throw std::invalid_argument("ideal_membership: target degree below generator degree");

  std::uint32_t diff_coords = 0;
  std::vector<bool> poly(kMaxCoords, false);
  bool has_eu = false;
  collect_vars(target, diff_coords, poly, has_eu);
  for (const auto& g : generators) collect_vars(g, diff_coords, poly, has_eu);
  if (has_eu) diff_coords |= 1u << U;
  // Multiplier differentials range over every base coordinate as well.
  diff_coords |= (1u << kBaseCoords) - 1u;

  std::vector<int> coords, vars;
  for (int v = 0; v < kMaxCoords; ++v) {
    if (diff_coords >> v & 1u) coords.push_back(v);
    if (poly[static_cast<std::size_t>(v)]) vars.push_back(v);
  }

  std::vector<Monomial> polys;
  Monomial cur;
  enumerate_monomials(vars, 0, multiplier_degree, cur, polys);
  std::vector<Monomial> monos;
  for (int s = -1; s <= 1; ++s)
    for (Monomial m : polys) {
      m.exp_u = s;
      monos.push_back(std::move(m));
    }

  struct Column {
    std::size_t gen;
    std::uint32_t mask;
    Monomial mono;
  };
  std::vector<Column> columns;
  std::map<std::pair<std::uint32_t, Monomial>, int> row_index;
  std::vector<SparseRow> rows;
  auto row_of = [&](std::uint32_t mask, const Monomial& m) {
    auto [it, inserted] = row_index.try_emplace({mask, m}, static_cast<int>(rows.size()));
    if (inserted) rows.emplace_back();
    return it->second;
  };

  for (std::size_t j = 0; j < generators.size(); ++j) {
    const int dk = target.degree() - generators[j].degree();
    std::vector<std::uint32_t> masks;
    enumerate_masks(coords, 0, dk, 0u, masks);
    for (std::uint32_t mask : masks) {
      for (const auto& mono : monos) {
        const Form contrib = wedge(Form::monomial(mask, Coeff::term(Rational(1), mono)), generators[j]);
        if (contrib.is_zero()) continue;
        const int col = static_cast<int>(columns.size());
        columns.push_back({j, mask, mono});
        for (const auto& [m2, c] : contrib.terms())
          for (const auto& [mono2, k] : c.terms()) rows[static_cast<std::size_t>(row_of(m2, mono2))].cols[col] += k;
      }
    }
  }
  for (const auto& [m2, c] : target.terms())
    for (const auto& [mono2, k] : c.terms()) rows[static_cast<std::size_t>(row_of(m2, mono2))].rhs += k;

  MembershipResult result;
  result.degree = multiplier_degree;
  result.unknowns = columns.size();
  result.equations = rows.size();
  for (auto& r : rows)
    for (auto it = r.cols.begin(); it != r.cols.end();)
      it = sgn(it->second) == 0 ? r.cols.erase(it) : std::next(it);

  const auto solution = solve_sparse(std::move(rows), static_cast<int>(columns.size()));
  if (!solution) return result;

  result.found = true;
  for (const auto& g : generators) result.multipliers.emplace_back(target.degree() - g.degree());
  for (std::size_t col = 0; col < columns.size(); ++col) {
    const Rational& v = (*solution)[col];
    if (sgn(v) == 0) continue;
    const auto& c = columns[col];
    result.multipliers[c.gen] += Form::monomial(c.mask, Coeff::term(v, c.mono));
  }
  return result;
}

MembershipResult ideal_membership_escalating(const Form& target, const std::vector<Form>& generators,
                                             int start_degree, int cap) {
  MembershipResult last;
  for (int d = start_degree; d <= cap; ++d) {
    last = ideal_membership(target, generators, d);
    if (last.found) return last;
  }
  return last;
}

VerificationReport check_base_closure(int start_degree, int cap) {
  VerificationReport report;
  const auto ideal = base_ideal();
  for (std::size_t i = 0; i < ideal.size(); ++i) {
    const std::string id = "d(theta" + std::to_string(i + 1) + ")";
    const std::string identity = "d(theta_" + std::to_string(i + 1) + ") in I(theta_1..theta_4)";
    const Form target = ext_d(ideal[i]);
    const MembershipResult res = ideal_membership_escalating(target, ideal, start_degree, cap);
    if (!res.found) {
      report.add(inconclusive_check("eds-closure", id, identity,
                                    "no witness up to multiplier degree " + std::to_string(cap)));
      continue;
    }
    const Form diff = expand_witness(res.multipliers, ideal) - target;
    std::string witness;
    for (std::size_t j = 0; j < res.multipliers.size(); ++j) {
      if (res.multipliers[j].is_zero()) continue;
      if (!witness.empty()) witness += "; ";
      witness += "sigma" + std::to_string(j + 1) + " = " + res.multipliers[j].to_string();
    }
    report.add(required_check("eds-closure", id, identity, static_cast<double>(diff.terms().size()), 0.0,
                              "degree " + std::to_string(res.degree) + ": " + witness));
  }
  return report;
}

// --- prolongation forms ------------------------------------------------------

std::vector<Form> prolongation_forms(const Operator<Rational>& H, const Operator<Rational>& F,
                                     const Operator<Rational>& G, const Operator<Rational>& A,
                                     const Operator<Rational>& B) {
  const std::size_t n = H.dim();
  for (const auto* op : {&F, &G, &A, &B})
    if (op->dim() != n) throw std::invalid_argument("prolongation_forms: dimension mismatch");
  if (n > static_cast<std::size_t>(kMaxXi)) throw std::invalid_argument("prolongation_forms: too many pseudopotentials");

  const Form dx = Form::d(X), dy = Form::d(Y), dz = Form::d(Z);
  const Form dxdy = wedge(dx, dy), dxdz = wedge(dx, dz), dydz = wedge(dy, dz);
  auto component = [&](const Operator<Rational>& m, std::size_t k) {
    Coeff c;
    for (std::size_t j = 0; j < n; ++j) c += Coeff(m(j, k)) * Coeff::var(xi(static_cast<int>(j) + 1));
    return c;
  };
  std::vector<Form> forms;
  for (std::size_t k = 0; k < n; ++k) {
    Form omega = component(H, k) * dxdy + component(F, k) * dxdz + component(G, k) * dydz;
    for (std::size_t m = 0; m < n; ++m) {
      const Form dxi = Form::d(xi(static_cast<int>(m) + 1));
      omega += Coeff(A(k, m)) * wedge(dxi, dx);
      omega += Coeff(B(k, m)) * wedge(dxi, dz);
    }
    omega += wedge(Form::d(xi(static_cast<int>(k) + 1)), dy);
    forms.push_back(std::move(omega));
  }
  return forms;
}

// --- closure constraints -----------------------------------------------------

std::vector<ConstraintSample> default_constraint_samples(std::size_t n, const std::vector<double>& u_values) {
  std::vector<ConstraintSample> out;
  for (double u : u_values)
    for (double ux : {-1.0, 0.0, 1.0})
      for (double uy : {-1.0, 0.0, 1.0})
        for (double uz : {-1.0, 0.0, 1.0})
          for (std::size_t k = 0; k < n; ++k) {
            std::vector<double> e(n, 0.0);
            e[k] = 1.0;
            out.push_back({u, ux, uy, uz, std::move(e)});
          }
  return out;
}

namespace {

std::vector<double> mat_vec(const Operator<double>& m, const std::vector<double>& v) {
  std::vector<double> out(m.dim(), 0.0);
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out[i] += m(i, j) * v[j];
  return out;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> axpy(double a, const std::vector<double>& x, std::vector<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
  return y;
}

Operator<double> inverse(const Operator<double>& a) {
  const std::size_t n = a.dim();
  Operator<double> m = a;
  Operator<double> inv = Operator<double>::identity(n);
  const double scale = std::max(frobenius(a), std::numeric_limits<double>::min());
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (std::abs(m(piv, col)) <= 1e-13 * scale) throw std::domain_error("singular B: spectral constraints need B^{-1}");
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(m(col, j), m(piv, j));
      std::swap(inv(col, j), inv(piv, j));
    }
    const double d = m(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      m(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m(r, col) == 0.0) continue;
      const double f = m(r, col);
      for (std::size_t j = 0; j < n; ++j) {
        m(r, j) -= f * m(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

}  // namespace

template <Field T>
ConstraintValues evaluate_constraints(const ProlongationInstance<T>& inst, const SolutionSeries<T>& sol,
                                      const ConstraintSample& s, double safety_factor) {
  const std::size_t n = inst.dim();
  if (s.xi.size() != n) throw std::invalid_argument("constraint sample: xi has wrong dimension");
  const ProlongationState st = evaluate_state(inst, sol, s.u);
  const double e = st.var.exp_u;
  const std::size_t degree = sol.M.degree();

  auto build = [&](double ux, double uy, double uz) { return build_HFG(inst, sol, s.u, ux, uy, uz); };
  const HFG base = build(s.u_x, s.u_y, s.u_z);
  // H, F, G are affine in the slopes; unit forward differences are their slope derivatives.
  const HFG sx = build(s.u_x + 1.0, s.u_y, s.u_z);
  const HFG sy = build(s.u_x, s.u_y + 1.0, s.u_z);
  const HFG sz = build(s.u_x, s.u_y, s.u_z + 1.0);
  auto field_at = [&](const Operator<double>& op) { return mat_vec(field_matrix(op), s.xi); };

  const Operator<double> H_uz = sz.H - base.H, G_ux = sx.G - base.G, F_uy = sy.F - base.F;
  ConstraintValues cv;
  cv.hz_minus_eu_gx = norm(field_at(H_uz - G_ux * e));
  cv.fy_plus_gx = norm(field_at(F_uy + G_ux));
  const Operator<double> zero_slopes[] = {sx.H - base.H, sy.H - base.H, sx.F - base.F,
                                          sz.F - base.F, sy.G - base.G, sz.G - base.G};
  for (const auto& d : zero_slopes) cv.vanishing_slopes = std::max(cv.vanishing_slopes, norm(field_at(d)));

  // u-derivatives by the chain rule.
  const Operator<double> H_u = st.L * (e * s.u_z) + st.P_u;
  const Operator<double> F_u(n);
  const Operator<double>& G_u = st.M_u;

  // Vector-field bracket [G,H]^k = G^j dH^k/dxi^j - H^j dG^k/dxi^j.
  const std::vector<double> Gv = field_at(base.G), Hv = field_at(base.H);
  const std::vector<double> bracket = axpy(-1.0, mat_vec(field_matrix(base.G), Hv), mat_vec(field_matrix(base.H), Gv));
  std::vector<double> structure = bracket;
  structure = axpy(s.u_z, field_at(H_u), structure);
  structure = axpy(-s.u_y, field_at(F_u), structure);
  structure = axpy(s.u_x, field_at(G_u), structure);
  structure = axpy(-e * s.u_z * s.u_z, field_at(G_ux), structure);
  cv.structure = norm(structure);

  const double xin = norm(s.xi);
  const double l2 = 2.0 * frobenius(st.L);
  const double slopes = 1.0 + std::abs(s.u_x) + std::abs(s.u_y) + std::abs(s.u_z);
  const double ansatz_mag = xin * slopes * (frobenius(base.H) + frobenius(base.F) + frobenius(base.G) + e * frobenius(st.L));
  cv.ansatz_bound = safety_factor * rounding_allowance(ansatz_mag, static_cast<double>(n + 4));

  // The structure equation equals the field of
  //   u_z (P_u - e^u[L,M]) + u_x (M_u + [L,P]) + [M,P].
  const double trunc = std::abs(s.u_z) * (st.tail_P_u + e * l2 * st.tail_M) +
                       std::abs(s.u_x) * (st.tail_M_u + l2 * st.tail_P) +
                       2.0 * (frobenius(st.M) * st.tail_P + frobenius(st.P) * st.tail_M + st.tail_M * st.tail_P);
  const double struct_mag = std::abs(s.u_z) * (frobenius(H_u) + st.mag_P_u + e * std::abs(s.u_z) * frobenius(st.L)) +
                            std::abs(s.u_x) * (frobenius(G_u) + st.mag_M_u) + 2.0 * frobenius(base.G) * frobenius(base.H) +
                            l2 * (st.mag_M + st.mag_P);
  cv.structure_bound = residual_tolerance(trunc * xin, struct_mag * xin, degree, n, safety_factor);

  const Operator<double> A = to_float(inst.A), B = to_float(inst.B);
  cv.spectral1_matrix = field_matrix(base.F) - field_matrix(base.G) * A - field_matrix(base.H) * B;
  cv.spectral1 = frobenius(cv.spectral1_matrix);
  const Operator<double> binv = inverse(B);
  const Operator<double> Fv = field_matrix(base.F), Gf = field_matrix(base.G);
  const std::vector<double> Fxi = field_at(base.F);
  cv.spectral2 = norm(axpy(-1.0, mat_vec(Gf * binv, Fxi), mat_vec(Fv * binv, Gv)));
  return cv;
}

template <Field T>
VerificationReport constraint_residuals(const ProlongationInstance<T>& inst, const std::vector<ConstraintSample>& samples,
                                        std::size_t degree, double safety_factor) {
  inst.validate();
  const SolutionSeries<T> sol = solution_cal_form(inst, degree);
  const std::string suite = "eds-constraints";

  struct Worst {
    double residual = 0.0;
    double bound = 0.0;
    double ratio = -1.0;
    std::string where;
  };
  auto describe = [](const ConstraintSample& s) {
    std::ostringstream o;
    o << "u=" << format_u(s.u) << " slopes=(" << s.u_x << "," << s.u_y << "," << s.u_z << ") xi=(";
    for (std::size_t i = 0; i < s.xi.size(); ++i) o << (i ? "," : "") << s.xi[i];
    o << ")";
    return o.str();
  };
  auto update = [](Worst& w, double r, double b, const std::string& where) {
    const double ratio = b > 0.0 ? r / b : (r > 0.0 ? INFINITY : 0.0);
    if (ratio > w.ratio) w = {r, b, ratio, where};
  };

  Worst c1, c2, c3, st;
  double sp1 = 0.0, sp2 = 0.0;
  std::string sp1_at, sp2_at;
  for (const auto& s : samples) {
    const ConstraintValues cv = evaluate_constraints(inst, sol, s, safety_factor);
    const std::string where = describe(s);
    update(c1, cv.hz_minus_eu_gx, cv.ansatz_bound, where);
    update(c2, cv.fy_plus_gx, cv.ansatz_bound, where);
    update(c3, cv.vanishing_slopes, cv.ansatz_bound, where);
    update(st, cv.structure, cv.structure_bound, where);
    if (cv.spectral1 > sp1 || sp1_at.empty()) sp1 = cv.spectral1, sp1_at = where;
    if (cv.spectral2 > sp2 || sp2_at.empty()) sp2 = cv.spectral2, sp2_at = where;
  }

  VerificationReport report;
  const std::string count = std::to_string(samples.size()) + " samples";
  auto add = [&](const char* id, const char* identity, const Worst& w) {
    report.add(required_check(suite, id, identity, w.residual, w.bound, "worst at " + w.where + ", " + count));
  };
  add("ansatz/Hz-euGx", "H_{u_z} - e^u G_{u_x} = 0", c1);
  add("ansatz/Fy+Gx", "F_{u_y} + G_{u_x} = 0", c2);
  add("ansatz/vanishing-slopes", "H_{u_x} = H_{u_y} = F_{u_x} = F_{u_z} = G_{u_y} = G_{u_z} = 0", c3);
  add("structure", "u_z H_u - u_y F_u + u_x G_u - e^u u_z^2 G_{u_x} + [G,H] = 0", st);
  report.add(informational_check(suite, "spectral/xi-linear", "F_xi - G_xi A - H_xi B = 0", sp1, "max at " + sp1_at));
  report.add(informational_check(suite, "spectral/xi-bracket", "F_xi B^{-1} G - G_xi B^{-1} F = 0", sp2,
                                 "max at " + sp2_at));

  const double ab = frobenius(commutator(inst.A, inst.B));
  double ab_bound = 0.0;
  if constexpr (!is_exact_v<T>)
    ab_bound = safety_factor * rounding_allowance(2.0 * frobenius(inst.A) * frobenius(inst.B), static_cast<double>(inst.dim()));
  report.add(required_check(suite, "spectral/AB", "[A,B] = 0", ab, ab_bound));
  return report;
}

template ConstraintValues evaluate_constraints(const ProlongationInstance<Rational>&, const SolutionSeries<Rational>&,
                                               const ConstraintSample&, double);
template ConstraintValues evaluate_constraints(const ProlongationInstance<double>&, const SolutionSeries<double>&,
                                               const ConstraintSample&, double);
template VerificationReport constraint_residuals(const ProlongationInstance<Rational>&,
                                                 const std::vector<ConstraintSample>&, std::size_t, double);
template VerificationReport constraint_residuals(const ProlongationInstance<double>&,
                                                 const std::vector<ConstraintSample>&, std::size_t, double);

}  // namespace opbessel::eds
