#pragma once

// Guard and invariant language: boolean combinations of affine comparisons
// over typed variables, decided exactly over the rationals.

#include <gmpxx.h>

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mbt/sexpr.hpp"

namespace mbt::logic {

using Rational = mpq_class;

enum class VarKind { Boolean, Real, Enumerated };

struct Bound {
  Rational lo;
  Rational hi;
};

struct VarDecl {
  std::string name;
  VarKind kind = VarKind::Real;
  std::optional<Bound> bounds;       // reals only
  std::vector<std::string> values;   // enumerated only
  std::string unit;                  // metadata
};

class EvalError : public std::runtime_error {
 public:
  EvalError(const std::string& what, std::string var)
      : std::runtime_error(what), var_(std::move(var)) {}
  const std::string& variable() const { return var_; }

 private:
  std::string var_;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ordered set of variable declarations with unique names.
class Declarations {
 public:
  Declarations() = default;
  explicit Declarations(std::vector<VarDecl> decls);

  void add(VarDecl decl);
  const VarDecl* find(std::string_view name) const;
  const VarDecl& at(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;
  const std::vector<VarDecl>& all() const { return decls_; }
  std::size_t size() const { return decls_.size(); }

  /// Copy with the named real variable's bounds replaced.
  Declarations with_bounds(std::string_view name, Bound b) const;

 private:
  std::vector<VarDecl> decls_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

using Value = std::variant<bool, Rational, std::string>;

/// Complete assignment of values to variables.
class Valuation {
 public:
  void set(const std::string& name, Value v) { values_[name] = std::move(v); }
  void set_bool(const std::string& name, bool b) { values_[name] = b; }
  void set_real(const std::string& name, const Rational& r) { values_[name] = r; }
  void set_real(const std::string& name, double d);
  void set_enum(const std::string& name, std::string v) { values_[name] = std::move(v); }

  bool has(std::string_view name) const { return values_.find(std::string(name)) != values_.end(); }
  const Value& get(std::string_view name) const;
  bool get_bool(std::string_view name) const;
  const Rational& get_real(std::string_view name) const;
  double get_double(std::string_view name) const { return get_real(name).get_d(); }
  const std::map<std::string, Value>& values() const { return values_; }

  /// Values of `other` override values of this valuation.
  Valuation merged(const Valuation& other) const;

  bool operator==(const Valuation& o) const { return values_ == o.values_; }

  /// Declaration-ordered `name=value` list; names not declared are appended.
  std::string to_string(const Declarations& decls) const;

 private:
  std::map<std::string, Value> values_;
};

/// Converts a double observation to an exact rational on the 1e-9 grid.
Rational lift(double d);
/// Shortest decimal rendering of a rational (exact when it terminates).
std::string format_rational(const Rational& r);
Rational parse_rational(std::string_view text);

/// Affine expression sum(coef * var) + constant, in authored variable order.
struct AffineExpr {
  std::vector<std::pair<std::string, Rational>> terms;
  Rational constant = 0;

  void add_term(const std::string& var, const Rational& coef);
  AffineExpr operator+(const AffineExpr& o) const;
  AffineExpr operator-(const AffineExpr& o) const;
  AffineExpr scaled(const Rational& k) const;
  Rational evaluate(const Valuation& u) const;
  bool is_constant() const { return terms.empty(); }
};

enum class Rel { Lt, Le, Eq, Ge, Gt };

std::string_view rel_symbol(Rel r);

/// Atomic proposition. Comparisons are stored as `lhs rel rhs` with all
/// variables on the left.
struct Atom {
  enum class Kind { BoolVar, EnumEq, Compare };
  Kind kind = Kind::BoolVar;
  std::string var;            // BoolVar, EnumEq
  std::string value;          // EnumEq
  AffineExpr lhs;             // Compare (constant folded into rhs)
  Rel rel = Rel::Le;
  Rational rhs = 0;

  static Atom boolean(std::string var);
  static Atom enum_eq(std::string var, std::string value);
  static Atom compare(const AffineExpr& left, Rel rel, const AffineExpr& right);

  bool evaluate(const Valuation& u) const;
  std::vector<std::string> variables() const;
  /// Orientation-independent key; atoms with equal keys denote the same set.
  std::string canonical_key() const;
};

struct Literal {
  Atom atom;
  bool positive = true;
  bool evaluate(const Valuation& u) const { return atom.evaluate(u) == positive; }
};

/// Immutable NNF predicate tree.
class Predicate {
 public:
  enum class Kind { True, False, Lit, And, Or };

  Predicate();  // true
  static Predicate truth();
  static Predicate falsity();
  static Predicate literal(Atom a, bool positive = true);
  static Predicate conj(std::vector<Predicate> parts);
  static Predicate disj(std::vector<Predicate> parts);

  Kind kind() const;
  const Literal& lit() const;
  const std::vector<Predicate>& children() const;

  bool evaluate(const Valuation& u) const;
  Predicate negated() const;
  std::vector<std::string> variables() const;
  /// Replaces every occurrence of a real variable by an affine expression.
  Predicate substituted(const std::map<std::string, AffineExpr>& subst) const;
  /// Fixes variables to values; the result mentions none of them.
  Predicate restricted(const Valuation& fixed) const;

  /// Canonical s-expression text.
  std::string to_string() const;
  /// Conjunction of atoms flattened to its literal list (empty if not a pure conjunction).
  std::optional<std::vector<Literal>> as_conjunction() const;

  Predicate operator&&(const Predicate& o) const { return conj({*this, o}); }
  Predicate operator||(const Predicate& o) const { return disj({*this, o}); }
  Predicate operator!() const { return negated(); }

 private:
  struct Node;
  explicit Predicate(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

using Constants = std::map<std::string, Rational, std::less<>>;

/// Parses s-expression text; names found in `consts` denote numbers.
Predicate parse_predicate(std::string_view text, const Declarations& decls, const Constants& consts = {});
AffineExpr parse_affine(std::string_view text, const Declarations& decls, const Constants& consts = {});
Predicate predicate_from_sexpr(const sexpr::Node& n, const Declarations& decls, const Constants& consts = {});

bool is_satisfiable(const Predicate& p, const Declarations& decls);
std::optional<Valuation> find_model(const Predicate& p, const Declarations& decls);
bool implies(const Predicate& p, const Predicate& q, const Declarations& decls);
bool equivalent(const Predicate& p, const Predicate& q, const Declarations& decls);

/// Picks the coarsest decimal inside the interval, starting from its midpoint.
Rational coarsest_decimal(const Rational& lo, bool lo_strict, const Rational& hi, bool hi_strict);

/// Uniform random in-bounds valuation; reals drawn on a 1/`grid` lattice.
template <class Rng>
Valuation random_valuation(const Declarations& decls, Rng& rng, long grid = 1000);

}  // namespace mbt::logic

#include "mbt/predicate_random.inl"
