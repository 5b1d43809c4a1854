#include "mbt/predicate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "mbt/sexpr.hpp"

namespace mbt::logic {

// ---------------------------------------------------------------- declarations

Declarations::Declarations(std::vector<VarDecl> decls) {
  for (auto& d : decls) add(std::move(d));
}

void Declarations::add(VarDecl decl) {
  if (index_.count(decl.name)) throw std::invalid_argument("duplicate variable '" + decl.name + "'");
  if (decl.bounds && decl.bounds->lo > decl.bounds->hi)
    throw std::invalid_argument("empty bounds for '" + decl.name + "'");
  if (decl.kind == VarKind::Enumerated && decl.values.empty())
    throw std::invalid_argument("enumerated variable '" + decl.name + "' without values");
  index_.emplace(decl.name, decls_.size());
  decls_.push_back(std::move(decl));
}

const VarDecl* Declarations::find(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &decls_[it->second];
}

const VarDecl& Declarations::at(std::string_view name) const {
  const VarDecl* d = find(name);
  if (!d) throw EvalError("undeclared variable '" + std::string(name) + "'", std::string(name));
  return *d;
}

std::optional<std::size_t> Declarations::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Declarations Declarations::with_bounds(std::string_view name, Bound b) const {
  Declarations out = *this;
  auto idx = index_of(name);
  if (!idx) throw std::invalid_argument("undeclared variable '" + std::string(name) + "'");
  out.decls_[*idx].bounds = std::move(b);
  return out;
}

// ---------------------------------------------------------------- numbers

Rational lift(double d) {
  Rational r(d);
  r *= 1000000000;
  // round half away from zero
  mpz_class num = r.get_num(), den = r.get_den();
  mpz_class twice = 2 * num + (num >= 0 ? den : -den);
  mpz_class q;
  mpz_tdiv_q(q.get_mpz_t(), twice.get_mpz_t(), mpz_class(2 * den).get_mpz_t());
  Rational out(q, 1000000000);
  out.canonicalize();
  return out;
}

std::string format_rational(const Rational& r) {
  mpz_class den = r.get_den();
  int twos = 0, fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) { den /= 2; ++twos; }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) { den /= 5; ++fives; }
  if (den != 1) return r.get_str();
  int digits = std::max(twos, fives);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  Rational scaled = r * scale;
  mpz_class n = scaled.get_num();
  bool neg = n < 0;
  if (neg) n = -n;
  std::string s = n.get_str();
  if (digits > 0) {
    if (static_cast<int>(s.size()) <= digits) s.insert(0, digits - s.size() + 1, '0');
    s.insert(s.size() - digits, ".");
  }
  return neg ? "-" + s : s;
}

Rational parse_rational(std::string_view text) {
  std::string t(text);
  if (t.empty()) throw ParseError("empty number");
  auto slash = t.find('/');
  if (slash != std::string::npos) {
    Rational r(mpz_class(t.substr(0, slash), 10), mpz_class(t.substr(slash + 1), 10));
    r.canonicalize();
    return r;
  }
  bool neg = t[0] == '-';
  std::string body = (neg || t[0] == '+') ? t.substr(1) : t;
  std::string mant = body;
  long exp10 = 0;
  auto e = body.find_first_of("eE");
  if (e != std::string::npos) {
    mant = body.substr(0, e);
    exp10 = std::stol(body.substr(e + 1));
  }
  auto dot = mant.find('.');
  if (dot != std::string::npos) {
    exp10 -= static_cast<long>(mant.size() - dot - 1);
    mant.erase(dot, 1);
  }
  if (mant.empty() || !std::all_of(mant.begin(), mant.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw ParseError("malformed number '" + t + "'");
  mpz_class m(mant, 10), p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
  Rational r = exp10 >= 0 ? Rational(m * p) : Rational(m, p);
  r.canonicalize();
  return neg ? Rational(-r) : r;
}

// ---------------------------------------------------------------- valuation

void Valuation::set_real(const std::string& name, double d) { values_[name] = lift(d); }

const Value& Valuation::get(std::string_view name) const {
  auto it = values_.find(std::string(name));
  if (it == values_.end())
    throw EvalError("unbound variable '" + std::string(name) + "'", std::string(name));
  return it->second;
}

bool Valuation::get_bool(std::string_view name) const {
  const Value& v = get(name);
  if (auto b = std::get_if<bool>(&v)) return *b;
  throw EvalError("variable '" + std::string(name) + "' is not boolean", std::string(name));
}

const Rational& Valuation::get_real(std::string_view name) const {
  const Value& v = get(name);
  if (auto r = std::get_if<Rational>(&v)) return *r;
  throw EvalError("variable '" + std::string(name) + "' is not real", std::string(name));
}

Valuation Valuation::merged(const Valuation& other) const {
  Valuation out = *this;
  for (const auto& [k, v] : other.values_) out.values_[k] = v;
  return out;
}

namespace {
std::string value_text(const Value& v) {
  if (auto b = std::get_if<bool>(&v)) return *b ? "1" : "0";
  if (auto r = std::get_if<Rational>(&v)) return format_rational(*r);
  return std::get<std::string>(v);
}
}  // namespace

std::string Valuation::to_string(const Declarations& decls) const {
  std::string out;
  std::set<std::string> seen;
  auto emit = [&](const std::string& k, const Value& v) {
    if (!out.empty()) out += ' ';
    out += k + "=" + value_text(v);
    seen.insert(k);
  };
  for (const auto& d : decls.all()) {
    auto it = values_.find(d.name);
    if (it != values_.end()) emit(d.name, it->second);
  }
  for (const auto& [k, v] : values_)
    if (!seen.count(k)) emit(k, v);
  return out;
}

// ---------------------------------------------------------------- affine

void AffineExpr::add_term(const std::string& var, const Rational& raw) {
  Rational coef = raw;
  coef.canonicalize();
  for (auto it = terms.begin(); it != terms.end(); ++it) {
    if (it->first == var) {
      it->second += coef;
      if (it->second == 0) terms.erase(it);
      return;
    }
  }
  if (coef != 0) terms.emplace_back(var, coef);
}

AffineExpr AffineExpr::operator+(const AffineExpr& o) const {
  AffineExpr r = *this;
  for (const auto& [v, c] : o.terms) r.add_term(v, c);
  r.constant += o.constant;
  return r;
}

AffineExpr AffineExpr::scaled(const Rational& k) const {
  AffineExpr r;
  if (k == 0) return r;
  for (const auto& [v, c] : terms) r.terms.emplace_back(v, c * k);
  r.constant = constant * k;
  return r;
}

AffineExpr AffineExpr::operator-(const AffineExpr& o) const { return *this + o.scaled(-1); }

Rational AffineExpr::evaluate(const Valuation& u) const {
  Rational s = constant;
  for (const auto& [v, c] : terms) s += c * u.get_real(v);
  return s;
}

std::string_view rel_symbol(Rel r) {
  switch (r) {
    case Rel::Lt: return "<";
    case Rel::Le: return "<=";
    case Rel::Eq: return "=";
    case Rel::Ge: return ">=";
    case Rel::Gt: return ">";
  }
  return "?";
}

namespace {
Rel flip(Rel r) {
  switch (r) {
    case Rel::Lt: return Rel::Gt;
    case Rel::Le: return Rel::Ge;
    case Rel::Eq: return Rel::Eq;
    case Rel::Ge: return Rel::Le;
    case Rel::Gt: return Rel::Lt;
  }
  return r;
}

bool compare(const Rational& a, Rel r, const Rational& b) {
  switch (r) {
    case Rel::Lt: return a < b;
    case Rel::Le: return a <= b;
    case Rel::Eq: return a == b;
    case Rel::Ge: return a >= b;
    case Rel::Gt: return a > b;
  }
  return false;
}
}  // namespace

// ---------------------------------------------------------------- atoms

Atom Atom::boolean(std::string var) {
  Atom a;
  a.kind = Kind::BoolVar;
  a.var = std::move(var);
  return a;
}

Atom Atom::enum_eq(std::string var, std::string value) {
  Atom a;
  a.kind = Kind::EnumEq;
  a.var = std::move(var);
  a.value = std::move(value);
  return a;
}

Atom Atom::compare(const AffineExpr& left, Rel rel, const AffineExpr& right) {
  // gmp arithmetic assumes canonical operands; callers may build 4/2.
  auto canon = [](AffineExpr e) {
    e.constant.canonicalize();
    for (auto& t : e.terms) t.second.canonicalize();
    return e;
  };
  AffineExpr d = canon(left) - canon(right);
  Atom a;
  a.kind = Kind::Compare;
  a.rhs = -d.constant;
  d.constant = 0;
  a.rel = rel;
  bool all_neg = !d.terms.empty() &&
                 std::all_of(d.terms.begin(), d.terms.end(), [](const auto& t) { return t.second < 0; });
  if (all_neg) {
    d = d.scaled(-1);
    a.rhs = -a.rhs;
    a.rel = flip(a.rel);
  }
  a.lhs = std::move(d);
  return a;
}

bool Atom::evaluate(const Valuation& u) const {
  switch (kind) {
    case Kind::BoolVar: return u.get_bool(var);
    case Kind::EnumEq: {
      const Value& v = u.get(var);
      if (auto s = std::get_if<std::string>(&v)) return *s == value;
      throw EvalError("variable '" + var + "' is not enumerated", var);
    }
    case Kind::Compare: return mbt::logic::compare(lhs.evaluate(u), rel, rhs);
  }
  return false;
}

std::vector<std::string> Atom::variables() const {
  if (kind != Kind::Compare) return {var};
  std::vector<std::string> out;
  for (const auto& [v, c] : lhs.terms) out.push_back(v);
  return out;
}

std::string Atom::canonical_key() const {
  if (kind == Kind::BoolVar) return "b:" + var;
  if (kind == Kind::EnumEq) return "e:" + var + "=" + value;
  auto terms = lhs.terms;
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  if (terms.empty()) return "c:" + std::string(rel_symbol(rel)) + format_rational(rhs);
  Rational lead = terms.front().second;
  Rational scale = 1 / abs(lead);
  Rel r = rel;
  if (lead < 0) {
    scale = -scale;
    r = flip(r);
  }
  std::string key = "c:";
  for (const auto& [v, c] : terms) key += format_rational(c * scale) + "*" + v + " ";
  key += std::string(rel_symbol(r)) + " " + format_rational(rhs * scale);
  return key;
}

// ---------------------------------------------------------------- predicate nodes

struct Predicate::Node {
  Kind kind = Kind::True;
  Literal lit;
  std::vector<Predicate> children;
};

Predicate::Predicate() : Predicate(truth()) {}

Predicate Predicate::truth() {
  static const auto n = std::make_shared<const Node>(Node{Kind::True, {}, {}});
  return Predicate(n);
}

Predicate Predicate::falsity() {
  static const auto n = std::make_shared<const Node>(Node{Kind::False, {}, {}});
  return Predicate(n);
}

Predicate Predicate::literal(Atom a, bool positive) {
  if (a.kind == Atom::Kind::Compare && a.lhs.terms.empty()) {
    bool v = mbt::logic::compare(Rational(0), a.rel, a.rhs);
    return v == positive ? truth() : falsity();
  }
  return Predicate(std::make_shared<const Node>(Node{Kind::Lit, Literal{std::move(a), positive}, {}}));
}

Predicate Predicate::conj(std::vector<Predicate> parts) {
  std::vector<Predicate> flat;
  for (auto& p : parts) {
    if (p.kind() == Kind::False) return falsity();
    if (p.kind() == Kind::True) continue;
    if (p.kind() == Kind::And)
      for (const auto& c : p.children()) flat.push_back(c);
    else
      flat.push_back(std::move(p));
  }
  if (flat.empty()) return truth();
  if (flat.size() == 1) return flat.front();
  return Predicate(std::make_shared<const Node>(Node{Kind::And, {}, std::move(flat)}));
}

Predicate Predicate::disj(std::vector<Predicate> parts) {
  std::vector<Predicate> flat;
  for (auto& p : parts) {
    if (p.kind() == Kind::True) return truth();
    if (p.kind() == Kind::False) continue;
    if (p.kind() == Kind::Or)
      for (const auto& c : p.children()) flat.push_back(c);
    else
      flat.push_back(std::move(p));
  }
  if (flat.empty()) return falsity();
  if (flat.size() == 1) return flat.front();
  return Predicate(std::make_shared<const Node>(Node{Kind::Or, {}, std::move(flat)}));
}

Predicate::Kind Predicate::kind() const { return node_->kind; }
const Literal& Predicate::lit() const { return node_->lit; }
const std::vector<Predicate>& Predicate::children() const { return node_->children; }

bool Predicate::evaluate(const Valuation& u) const {
  switch (kind()) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Lit: return lit().evaluate(u);
    case Kind::And:
      for (const auto& c : children())
        if (!c.evaluate(u)) return false;
      return true;
    case Kind::Or:
      for (const auto& c : children())
        if (c.evaluate(u)) return true;
      return false;
  }
  return false;
}

Predicate Predicate::negated() const {
  switch (kind()) {
    case Kind::True: return falsity();
    case Kind::False: return truth();
    case Kind::Lit: return literal(lit().atom, !lit().positive);
    case Kind::And: {
      std::vector<Predicate> parts;
      for (const auto& c : children()) parts.push_back(c.negated());
      return disj(std::move(parts));
    }
    case Kind::Or: {
      std::vector<Predicate> parts;
      for (const auto& c : children()) parts.push_back(c.negated());
      return conj(std::move(parts));
    }
  }
  return truth();
}

std::vector<std::string> Predicate::variables() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto visit = [&](auto&& self, const Predicate& p) -> void {
    if (p.kind() == Kind::Lit) {
      for (auto& v : p.lit().atom.variables())
        if (seen.insert(v).second) out.push_back(v);
    }
    for (const auto& c : p.children()) self(self, c);
  };
  visit(visit, *this);
  return out;
}

Predicate Predicate::substituted(const std::map<std::string, AffineExpr>& subst) const {
  switch (kind()) {
    case Kind::True:
    case Kind::False: return *this;
    case Kind::Lit: {
      const Atom& a = lit().atom;
      if (a.kind != Atom::Kind::Compare) return *this;
      AffineExpr e;
      bool touched = false;
      for (const auto& [v, c] : a.lhs.terms) {
        auto it = subst.find(v);
        if (it == subst.end()) {
          e.add_term(v, c);
        } else {
          e = e + it->second.scaled(c);
          touched = true;
        }
      }
      if (!touched) return *this;
      AffineExpr rhs;
      rhs.constant = a.rhs;
      return literal(Atom::compare(e, a.rel, rhs), lit().positive);
    }
    case Kind::And:
    case Kind::Or: {
      std::vector<Predicate> parts;
      for (const auto& c : children()) parts.push_back(c.substituted(subst));
      return kind() == Kind::And ? conj(std::move(parts)) : disj(std::move(parts));
    }
  }
  return *this;
}

Predicate Predicate::restricted(const Valuation& fixed) const {
  switch (kind()) {
    case Kind::True:
    case Kind::False: return *this;
    case Kind::Lit: {
      const Atom& a = lit().atom;
      if (a.kind != Atom::Kind::Compare) {
        if (!fixed.has(a.var)) return *this;
        return a.evaluate(fixed) == lit().positive ? truth() : falsity();
      }
      AffineExpr e;
      Rational k = 0;
      bool touched = false;
      for (const auto& [v, c] : a.lhs.terms) {
        if (fixed.has(v)) {
          k += c * fixed.get_real(v);
          touched = true;
        } else {
          e.add_term(v, c);
        }
      }
      if (!touched) return *this;
      AffineExpr rhs;
      rhs.constant = a.rhs - k;
      return literal(Atom::compare(e, a.rel, rhs), lit().positive);
    }
    case Kind::And:
    case Kind::Or: {
      std::vector<Predicate> parts;
      for (const auto& c : children()) parts.push_back(c.restricted(fixed));
      return kind() == Kind::And ? conj(std::move(parts)) : disj(std::move(parts));
    }
  }
  return *this;
}

std::optional<std::vector<Literal>> Predicate::as_conjunction() const {
  if (kind() == Kind::True) return std::vector<Literal>{};
  if (kind() == Kind::Lit) return std::vector<Literal>{lit()};
  if (kind() != Kind::And) return std::nullopt;
  std::vector<Literal> out;
  for (const auto& c : children()) {
    if (c.kind() != Kind::Lit) return std::nullopt;
    out.push_back(c.lit());
  }
  return out;
}

// ---------------------------------------------------------------- printing

namespace {
std::string affine_text(const AffineExpr& e) {
  if (e.terms.size() == 1 && e.terms[0].second == 1) return e.terms[0].first;
  if (e.terms.size() == 2 && e.terms[0].second == 1 && e.terms[1].second == -1)
    return "(- " + e.terms[0].first + " " + e.terms[1].first + ")";
  std::string s = "(+";
  for (const auto& [v, c] : e.terms) {
    if (c == 1)
      s += " " + v;
    else if (c == -1)
      s += " (- " + v + ")";
    else
      s += " (* " + format_rational(c) + " " + v + ")";
  }
  return s + ")";
}

std::string atom_text(const Atom& a, bool positive) {
  switch (a.kind) {
    case Atom::Kind::BoolVar: return "(= " + a.var + (positive ? " 1)" : " 0)");
    case Atom::Kind::EnumEq: {
      std::string t = "(= " + a.var + " " + a.value + ")";
      return positive ? t : "(not " + t + ")";
    }
    case Atom::Kind::Compare: {
      std::string t = "(" + std::string(rel_symbol(a.rel)) + " " + affine_text(a.lhs) + " " + format_rational(a.rhs) + ")";
      if (positive) return t;
      // print the complementary comparison when it is a single atom
      switch (a.rel) {
        case Rel::Lt: return "(>= " + affine_text(a.lhs) + " " + format_rational(a.rhs) + ")";
        case Rel::Le: return "(> " + affine_text(a.lhs) + " " + format_rational(a.rhs) + ")";
        case Rel::Ge: return "(< " + affine_text(a.lhs) + " " + format_rational(a.rhs) + ")";
        case Rel::Gt: return "(<= " + affine_text(a.lhs) + " " + format_rational(a.rhs) + ")";
        case Rel::Eq: return "(not " + t + ")";
      }
    }
  }
  return "?";
}
}  // namespace

std::string Predicate::to_string() const {
  switch (kind()) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Lit: return atom_text(lit().atom, lit().positive);
    case Kind::And:
    case Kind::Or: {
      std::string s = kind() == Kind::And ? "(and" : "(or";
      for (const auto& c : children()) s += " " + c.to_string();
      return s + ")";
    }
  }
  return "?";
}

// ---------------------------------------------------------------- parsing

namespace {

AffineExpr to_affine(const sexpr::Node& n, const Declarations& decls, const Constants& consts) {
  if (n.is_atom()) {
    const std::string& t = n.text;
    if (std::isdigit(static_cast<unsigned char>(t[0])) || ((t[0] == '-' || t[0] == '.' || t[0] == '+') && t.size() > 1)) {
      AffineExpr e;
      e.constant = parse_rational(t);
      return e;
    }
    if (auto c = consts.find(t); c != consts.end()) {
      AffineExpr e;
      e.constant = c->second;
      return e;
    }
    const VarDecl* d = decls.find(t);
    if (!d) throw ParseError("unknown name '" + t + "'");
    if (d->kind != VarKind::Real) throw ParseError("variable '" + t + "' used in arithmetic is not real");
    AffineExpr e;
    e.add_term(t, 1);
    return e;
  }
  if (n.items.empty() || !n.items[0].is_atom()) throw ParseError("malformed expression " + n.to_string());
  const std::string& op = n.items[0].text;
  std::vector<AffineExpr> args;
  for (std::size_t i = 1; i < n.items.size(); ++i) args.push_back(to_affine(n.items[i], decls, consts));
  if (op == "+") {
    AffineExpr e;
    for (auto& a : args) e = e + a;
    return e;
  }
  if (op == "-") {
    if (args.empty()) throw ParseError("'-' needs arguments");
    if (args.size() == 1) return args[0].scaled(-1);
    AffineExpr e = args[0];
    for (std::size_t i = 1; i < args.size(); ++i) e = e - args[i];
    return e;
  }
  if (op == "*") {
    if (args.size() != 2) throw ParseError("'*' takes two arguments");
    if (args[0].is_constant()) return args[1].scaled(args[0].constant);
    if (args[1].is_constant()) return args[0].scaled(args[1].constant);
    throw ParseError("nonlinear product " + n.to_string());
  }
  if (op == "/") {
    if (args.size() != 2 || !args[1].is_constant() || args[1].constant == 0)
      throw ParseError("'/' needs a nonzero constant divisor");
    return args[0].scaled(1 / args[1].constant);
  }
  throw ParseError("unknown operator '" + op + "'");
}

Predicate to_predicate(const sexpr::Node& n, const Declarations& decls, const Constants& consts) {
  if (n.is_atom()) {
    if (n.text == "true") return Predicate::truth();
    if (n.text == "false") return Predicate::falsity();
    const VarDecl* d = decls.find(n.text);
    if (!d) throw ParseError("unknown name '" + n.text + "'");
    if (d->kind != VarKind::Boolean) throw ParseError("'" + n.text + "' is not boolean");
    return Predicate::literal(Atom::boolean(n.text));
  }
  if (n.items.empty() || !n.items[0].is_atom()) throw ParseError("malformed predicate " + n.to_string());
  const std::string& op = n.items[0].text;
  if (op == "and" || op == "or") {
    std::vector<Predicate> parts;
    for (std::size_t i = 1; i < n.items.size(); ++i) parts.push_back(to_predicate(n.items[i], decls, consts));
    return op == "and" ? Predicate::conj(std::move(parts)) : Predicate::disj(std::move(parts));
  }
  if (op == "not") {
    if (n.items.size() != 2) throw ParseError("'not' takes one argument");
    return to_predicate(n.items[1], decls, consts).negated();
  }
  if (op == "=>" || op == "implies") {
    if (n.items.size() != 3) throw ParseError("'=>' takes two arguments");
    return to_predicate(n.items[1], decls, consts).negated() || to_predicate(n.items[2], decls, consts);
  }
  Rel rel;
  if (op == "<") rel = Rel::Lt;
  else if (op == "<=") rel = Rel::Le;
  else if (op == "=") rel = Rel::Eq;
  else if (op == ">=") rel = Rel::Ge;
  else if (op == ">") rel = Rel::Gt;
  else if (op == "!=") return to_predicate(sexpr::Node::list_of({sexpr::Node::atom("not"), sexpr::Node::list_of({sexpr::Node::atom("="), n.items[1], n.items[2]})}), decls, consts);
  else throw ParseError("unknown connective '" + op + "'");
  if (n.items.size() != 3) throw ParseError("comparison takes two arguments: " + n.to_string());
  const auto& l = n.items[1];
  const auto& r = n.items[2];
  if (rel == Rel::Eq && l.is_atom()) {
    if (const VarDecl* d = decls.find(l.text)) {
      if (d->kind == VarKind::Boolean) {
        if (!r.is_atom() || (r.text != "0" && r.text != "1"))
          throw ParseError("boolean '" + l.text + "' compared with non 0/1 value");
        return Predicate::literal(Atom::boolean(l.text), r.text == "1");
      }
      if (d->kind == VarKind::Enumerated) {
        if (!r.is_atom() || std::find(d->values.begin(), d->values.end(), r.text) == d->values.end())
          throw ParseError("'" + r.to_string() + "' is not a value of '" + l.text + "'");
        return Predicate::literal(Atom::enum_eq(l.text, r.text));
      }
    }
  }
  return Predicate::literal(Atom::compare(to_affine(l, decls, consts), rel, to_affine(r, decls, consts)));
}

}  // namespace

Predicate parse_predicate(std::string_view text, const Declarations& decls, const Constants& consts) {
  return to_predicate(sexpr::parse(text), decls, consts);
}

Predicate predicate_from_sexpr(const sexpr::Node& n, const Declarations& decls, const Constants& consts) {
  return to_predicate(n, decls, consts);
}

AffineExpr parse_affine(std::string_view text, const Declarations& decls, const Constants& consts) {
  return to_affine(sexpr::parse(text), decls, consts);
}

}  // namespace mbt::logic
