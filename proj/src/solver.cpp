// Satisfiability and model finding for affine predicates: a DPLL-style
// search over disjunctions with Fourier-Motzkin elimination deciding each
// conjunction of linear constraints exactly over the rationals.

#include <algorithm>
#include <map>
#include <set>

#include "mbt/predicate.hpp"

namespace mbt::logic {
namespace {

// a . x  (< | <=)  b
struct LinCon {
  std::vector<Rational> a;
  Rational b;
  bool strict = false;
};

void normalize(LinCon& c) {
  for (const auto& coef : c.a) {
    if (coef != 0) {
      Rational s = 1 / abs(coef);
      for (auto& x : c.a) x *= s;
      c.b *= s;
      return;
    }
  }
}

std::string con_key(const LinCon& c) {
  std::string k;
  for (const auto& x : c.a) k += x.get_str() + ",";
  return k + (c.strict ? "<" : "<=") + c.b.get_str();
}

bool trivially_false(const LinCon& c) { return c.strict ? !(0 < c.b) : !(0 <= c.b); }

bool all_zero(const LinCon& c) {
  return std::all_of(c.a.begin(), c.a.end(), [](const Rational& x) { return x == 0; });
}

// Eliminates variable `j`. Returns false when a contradiction appears.
bool eliminate(std::vector<LinCon>& cons, std::size_t j) {
  std::vector<LinCon> pos, neg, rest;
  for (auto& c : cons) {
    if (c.a[j] > 0) pos.push_back(std::move(c));
    else if (c.a[j] < 0) neg.push_back(std::move(c));
    else rest.push_back(std::move(c));
  }
  std::set<std::string> seen;
  for (const auto& c : rest) seen.insert(con_key(c));
  for (const auto& p : pos) {
    for (const auto& n : neg) {
      LinCon r;
      Rational mp = -n.a[j], mn = p.a[j];
      r.a.resize(p.a.size());
      for (std::size_t k = 0; k < p.a.size(); ++k) r.a[k] = p.a[k] * mp + n.a[k] * mn;
      r.a[j] = 0;
      r.b = p.b * mp + n.b * mn;
      r.strict = p.strict || n.strict;
      if (all_zero(r)) {
        if (trivially_false(r)) return false;
        continue;
      }
      normalize(r);
      if (seen.insert(con_key(r)).second) rest.push_back(std::move(r));
    }
  }
  cons = std::move(rest);
  return true;
}

bool fm_feasible(std::vector<LinCon> cons, std::size_t nvars) {
  for (const auto& c : cons)
    if (all_zero(c) && trivially_false(c)) return false;
  for (std::size_t j = 0; j < nvars; ++j)
    if (!eliminate(cons, j)) return false;
  for (const auto& c : cons)
    if (trivially_false(c)) return false;
  return true;
}

enum class Status { Entailed, Contradicted, Unknown };

// Partial assignment accumulated along one search branch.
class Cube {
 public:
  explicit Cube(const Declarations& decls) : decls_(&decls) {}

  // Adds a literal that is not a negated real equality.
  bool add(const Literal& l) {
    const Atom& a = l.atom;
    switch (a.kind) {
      case Atom::Kind::BoolVar: {
        auto [it, inserted] = bools_.emplace(a.var, l.positive);
        return inserted || it->second == l.positive;
      }
      case Atom::Kind::EnumEq: {
        if (l.positive) {
          auto [it, inserted] = enum_eq_.emplace(a.var, a.value);
          if (!inserted && it->second != a.value) return false;
          return !enum_ne_[a.var].count(a.value);
        }
        auto it = enum_eq_.find(a.var);
        if (it != enum_eq_.end() && it->second == a.value) return false;
        auto& ne = enum_ne_[a.var];
        ne.insert(a.value);
        return ne.size() < decls_->at(a.var).values.size();
      }
      case Atom::Kind::Compare:
        reals_.push_back(l);
        return true;
    }
    return false;
  }

  Status status(const Literal& l) const {
    const Atom& a = l.atom;
    if (a.kind == Atom::Kind::BoolVar) {
      auto it = bools_.find(a.var);
      if (it == bools_.end()) return Status::Unknown;
      return it->second == l.positive ? Status::Entailed : Status::Contradicted;
    }
    if (a.kind == Atom::Kind::EnumEq) {
      auto it = enum_eq_.find(a.var);
      bool ne = false;
      if (auto n = enum_ne_.find(a.var); n != enum_ne_.end()) ne = n->second.count(a.value) > 0;
      bool holds;
      if (it != enum_eq_.end()) holds = it->second == a.value;
      else if (ne) holds = false;
      else return Status::Unknown;
      return holds == l.positive ? Status::Entailed : Status::Contradicted;
    }
    std::string key = a.canonical_key();
    for (const auto& r : reals_) {
      if (r.atom.canonical_key() == key) {
        if (r.positive == l.positive) return Status::Entailed;
        if (a.rel != Rel::Eq) return Status::Contradicted;
      }
    }
    if (!feasible_with(l)) return Status::Contradicted;
    Literal neg{a, !l.positive};
    if (!feasible_with(neg)) return Status::Entailed;
    return Status::Unknown;
  }

  bool feasible() const { return feasible_with(std::nullopt); }

  // Constraints over real variables in declaration order.
  std::pair<std::vector<std::string>, std::vector<LinCon>> system(const std::optional<Literal>& extra) const {
    std::vector<Literal> lits = reals_;
    if (extra) lits.push_back(*extra);
    std::set<std::size_t> idx;
    for (const auto& l : lits)
      for (const auto& [v, c] : l.atom.lhs.terms) idx.insert(*decls_->index_of(v));
    std::vector<std::string> vars;
    std::map<std::string, std::size_t> local;
    for (auto i : idx) {
      local[decls_->all()[i].name] = vars.size();
      vars.push_back(decls_->all()[i].name);
    }
    std::vector<LinCon> cons;
    auto push = [&](const AffineExpr& e, const Rational& b, bool strict, int sign) {
      LinCon c;
      c.a.assign(vars.size(), 0);
      for (const auto& [v, k] : e.terms) c.a[local[v]] = k * sign;
      c.b = b * sign;
      c.strict = strict;
      cons.push_back(std::move(c));
    };
    for (const auto& l : lits) {
      const Atom& a = l.atom;
      Rel r = a.rel;
      if (!l.positive) {
        switch (r) {
          case Rel::Lt: r = Rel::Ge; break;
          case Rel::Le: r = Rel::Gt; break;
          case Rel::Ge: r = Rel::Lt; break;
          case Rel::Gt: r = Rel::Le; break;
          case Rel::Eq: throw std::logic_error("negated equality must be split before reaching the cube");
        }
      }
      switch (r) {
        case Rel::Lt: push(a.lhs, a.rhs, true, 1); break;
        case Rel::Le: push(a.lhs, a.rhs, false, 1); break;
        case Rel::Eq:
          push(a.lhs, a.rhs, false, 1);
          push(a.lhs, a.rhs, false, -1);
          break;
        case Rel::Ge: push(a.lhs, a.rhs, false, -1); break;
        case Rel::Gt: push(a.lhs, a.rhs, true, -1); break;
      }
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const VarDecl& d = decls_->at(vars[i]);
      if (!d.bounds) continue;
      LinCon hi, lo;
      hi.a.assign(vars.size(), 0);
      lo.a.assign(vars.size(), 0);
      hi.a[i] = 1;
      hi.b = d.bounds->hi;
      lo.a[i] = -1;
      lo.b = -d.bounds->lo;
      cons.push_back(hi);
      cons.push_back(lo);
    }
    return {vars, cons};
  }

  const std::map<std::string, bool>& bools() const { return bools_; }
  const std::map<std::string, std::string>& enum_eq() const { return enum_eq_; }
  const std::map<std::string, std::set<std::string>>& enum_ne() const { return enum_ne_; }

 private:
  bool feasible_with(const std::optional<Literal>& extra) const {
    if (extra && extra->atom.kind == Atom::Kind::Compare && !extra->positive && extra->atom.rel == Rel::Eq) {
      Literal lt{Atom::compare(extra->atom.lhs, Rel::Lt, AffineExpr{{}, extra->atom.rhs}), true};
      Literal gt{Atom::compare(extra->atom.lhs, Rel::Gt, AffineExpr{{}, extra->atom.rhs}), true};
      return feasible_with(lt) || feasible_with(gt);
    }
    auto [vars, cons] = system(extra);
    return fm_feasible(std::move(cons), vars.size());
  }

  const Declarations* decls_;
  std::map<std::string, bool> bools_;
  std::map<std::string, std::string> enum_eq_;
  std::map<std::string, std::set<std::string>> enum_ne_;
  std::vector<Literal> reals_;
};

bool is_negated_equality(const Literal& l) {
  return l.atom.kind == Atom::Kind::Compare && !l.positive && l.atom.rel == Rel::Eq;
}

Predicate split_negated_equality(const Literal& l) {
  AffineExpr rhs;
  rhs.constant = l.atom.rhs;
  return Predicate::literal(Atom::compare(l.atom.lhs, Rel::Lt, rhs)) ||
         Predicate::literal(Atom::compare(l.atom.lhs, Rel::Gt, rhs));
}

std::optional<Cube> solve(std::vector<Predicate> pending, Cube cube) {
  std::vector<Predicate> ors;
  while (!pending.empty()) {
    Predicate p = pending.back();
    pending.pop_back();
    switch (p.kind()) {
      case Predicate::Kind::True: break;
      case Predicate::Kind::False: return std::nullopt;
      case Predicate::Kind::Lit:
        if (is_negated_equality(p.lit()))
          ors.push_back(split_negated_equality(p.lit()));
        else if (!cube.add(p.lit()))
          return std::nullopt;
        break;
      case Predicate::Kind::And:
        for (auto it = p.children().rbegin(); it != p.children().rend(); ++it) pending.push_back(*it);
        break;
      case Predicate::Kind::Or: ors.push_back(p); break;
    }
  }
  if (!cube.feasible()) return std::nullopt;

  // Simplify the open disjunctions against the cube; propagate units first.
  std::vector<std::vector<Predicate>> viable_sets;
  for (const auto& o : ors) {
    std::vector<Predicate> viable;
    bool satisfied = false;
    for (const auto& d : o.children()) {
      if (d.kind() == Predicate::Kind::Lit && !is_negated_equality(d.lit())) {
        Status s = cube.status(d.lit());
        if (s == Status::Entailed) {
          satisfied = true;
          break;
        }
        if (s == Status::Contradicted) continue;
      }
      viable.push_back(d);
    }
    if (satisfied) continue;
    if (viable.empty()) return std::nullopt;
    viable_sets.push_back(std::move(viable));
  }
  if (viable_sets.empty()) return cube;

  std::size_t best = 0;
  for (std::size_t i = 1; i < viable_sets.size(); ++i)
    if (viable_sets[i].size() < viable_sets[best].size()) best = i;
  std::vector<Predicate> rest;
  for (std::size_t i = 0; i < viable_sets.size(); ++i)
    if (i != best) rest.push_back(Predicate::disj(viable_sets[i]));
  for (const auto& choice : viable_sets[best]) {
    std::vector<Predicate> next = rest;
    next.push_back(choice);
    if (auto r = solve(std::move(next), cube)) return r;
  }
  return std::nullopt;
}

Rational pow10(int j) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(j < 0 ? -j : j));
  return j >= 0 ? Rational(p) : Rational(1, p);
}

Rational round_half_even(const Rational& x) {
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  Rational frac = x - Rational(fl);
  if (frac > Rational(1, 2)) return Rational(fl + 1);
  if (frac < Rational(1, 2)) return Rational(fl);
  return mpz_even_p(fl.get_mpz_t()) ? Rational(fl) : Rational(fl + 1);
}

struct Interval {
  std::optional<Rational> lo, hi;
  bool lo_strict = false, hi_strict = false;
};

Rational pick(const Interval& iv) {
  if (iv.lo && iv.hi) return coarsest_decimal(*iv.lo, iv.lo_strict, *iv.hi, iv.hi_strict);
  if (iv.lo) return coarsest_decimal(*iv.lo, iv.lo_strict, *iv.lo + 2, false);
  if (iv.hi) return coarsest_decimal(*iv.hi - 2, false, *iv.hi, iv.hi_strict);
  return 0;
}

// Chooses real values one variable at a time in declaration order.
Valuation realize(const Cube& cube, const Declarations& decls) {
  auto [vars, cons] = cube.system(std::nullopt);
  Valuation u;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    std::vector<LinCon> sys;
    for (const auto& c : cons) {
      LinCon r = c;
      for (std::size_t j = 0; j < i; ++j) {
        r.b -= r.a[j] * u.get_real(vars[j]);
        r.a[j] = 0;
      }
      sys.push_back(std::move(r));
    }
    for (std::size_t j = i + 1; j < vars.size(); ++j) eliminate(sys, j);
    Interval iv;
    for (const auto& c : sys) {
      const Rational& k = c.a[i];
      if (k == 0) continue;
      Rational bound = c.b / k;
      if (k > 0) {
        if (!iv.hi || bound < *iv.hi || (bound == *iv.hi && c.strict)) {
          iv.hi = bound;
          iv.hi_strict = c.strict;
        }
      } else {
        if (!iv.lo || bound > *iv.lo || (bound == *iv.lo && c.strict)) {
          iv.lo = bound;
          iv.lo_strict = c.strict;
        }
      }
    }
    u.set_real(vars[i], pick(iv));
  }
  for (const auto& d : decls.all()) {
    if (u.has(d.name)) continue;
    switch (d.kind) {
      case VarKind::Boolean: {
        auto it = cube.bools().find(d.name);
        u.set_bool(d.name, it != cube.bools().end() && it->second);
        break;
      }
      case VarKind::Enumerated: {
        auto it = cube.enum_eq().find(d.name);
        if (it != cube.enum_eq().end()) {
          u.set_enum(d.name, it->second);
          break;
        }
        auto ne = cube.enum_ne().find(d.name);
        for (const auto& v : d.values) {
          if (ne == cube.enum_ne().end() || !ne->second.count(v)) {
            u.set_enum(d.name, v);
            break;
          }
        }
        break;
      }
      case VarKind::Real: {
        Interval iv;
        if (d.bounds) {
          iv.lo = d.bounds->lo;
          iv.hi = d.bounds->hi;
        }
        u.set_real(d.name, pick(iv));
        break;
      }
    }
  }
  return u;
}

// Enumerates assignments of the discrete variables of `p` in declaration
// order (false before true, enum values in declared order).
std::optional<Cube> first_cube(const Predicate& p, const Declarations& decls) {
  std::vector<const VarDecl*> discrete;
  for (const auto& name : p.variables()) {
    const VarDecl& d = decls.at(name);
    if (d.kind != VarKind::Real) discrete.push_back(&d);
  }
  std::sort(discrete.begin(), discrete.end(),
            [&](const VarDecl* a, const VarDecl* b) { return *decls.index_of(a->name) < *decls.index_of(b->name); });
  std::vector<std::size_t> choice(discrete.size(), 0);
  for (;;) {
    Cube cube(decls);
    std::vector<Predicate> pending{p};
    for (std::size_t i = 0; i < discrete.size(); ++i) {
      const VarDecl& d = *discrete[i];
      if (d.kind == VarKind::Boolean)
        pending.push_back(Predicate::literal(Atom::boolean(d.name), choice[i] == 1));
      else
        pending.push_back(Predicate::literal(Atom::enum_eq(d.name, d.values[choice[i]])));
    }
    if (auto c = solve(std::move(pending), std::move(cube))) return c;
    std::size_t k = discrete.size();
    while (k > 0) {
      --k;
      std::size_t arity = discrete[k]->kind == VarKind::Boolean ? 2 : discrete[k]->values.size();
      if (++choice[k] < arity) break;
      choice[k] = 0;
      if (k == 0) return std::nullopt;
    }
    if (discrete.empty()) return std::nullopt;
  }
}

}  // namespace

Rational coarsest_decimal(const Rational& lo, bool lo_strict, const Rational& hi, bool hi_strict) {
  if (lo == hi) return lo;
  Rational mid = (lo + hi) / 2;
  auto inside = [&](const Rational& x) {
    bool above = lo_strict ? x > lo : x >= lo;
    bool below = hi_strict ? x < hi : x <= hi;
    return above && below;
  };
  for (int j = 15; j >= -15; --j) {
    Rational step = pow10(j);
    Rational cand = round_half_even(mid / step) * step;
    if (inside(cand)) return cand;
  }
  return mid;
}

bool is_satisfiable(const Predicate& p, const Declarations& decls) {
  return solve({p}, Cube(decls)).has_value();
}

std::optional<Valuation> find_model(const Predicate& p, const Declarations& decls) {
  auto cube = first_cube(p, decls);
  if (!cube) return std::nullopt;
  return realize(*cube, decls);
}

bool implies(const Predicate& p, const Predicate& q, const Declarations& decls) {
  return !is_satisfiable(p && q.negated(), decls);
}

bool equivalent(const Predicate& p, const Predicate& q, const Declarations& decls) {
  return implies(p, q, decls) && implies(q, p, decls);
}

}  // namespace mbt::logic
