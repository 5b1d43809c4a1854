#include "mbt/eqclass.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace mbt::eqclass {

using logic::Atom;
using logic::Literal;

namespace {

std::string key_of(const Predicate& p) {
  using K = Predicate::Kind;
  switch (p.kind()) {
    case K::True:
    case K::False:
    case K::Lit: return p.to_string();
    case K::And:
    case K::Or: {
      std::vector<std::string> parts;
      for (const auto& c : p.children()) parts.push_back(key_of(c));
      std::sort(parts.begin(), parts.end());
      std::string s = p.kind() == K::And ? "(and" : "(or";
      for (const auto& x : parts) s += " " + x;
      return s + ")";
    }
  }
  return "";
}

void collect_atoms(const Predicate& p, std::vector<Atom>& out, std::set<std::string>& seen) {
  using K = Predicate::Kind;
  if (p.kind() == K::Lit) {
    auto k = p.lit().atom.canonical_key();
    if (seen.insert(k).second) out.push_back(p.lit().atom);
    return;
  }
  if (p.kind() == K::And || p.kind() == K::Or)
    for (const auto& c : p.children()) collect_atoms(c, out, seen);
}

bool negated_equality(const Literal& l) {
  return !l.positive && l.atom.kind == Atom::Kind::Compare && l.atom.rel == logic::Rel::Eq;
}

}  // namespace

std::string guard_key(const Predicate& g) { return key_of(g); }

std::vector<Predicate> distinct_guards(const std::vector<Predicate>& guards) {
  std::vector<Predicate> out;
  std::set<std::string> seen;
  for (const auto& g : guards)
    if (seen.insert(key_of(g)).second) out.push_back(g);
  return out;
}

namespace {

std::vector<std::string> atom_vars(const Atom& a) { return a.variables(); }

Predicate conj_of(const std::vector<Atom>& atoms, const std::vector<std::size_t>& idx, const std::vector<bool>& signs) {
  std::vector<Predicate> parts;
  for (std::size_t k = 0; k < idx.size(); ++k) parts.push_back(Predicate::literal(atoms[idx[k]], signs[k]));
  return Predicate::conj(std::move(parts));
}

// Sign vectors of one variable component, positive branch first.
void component_cells(const std::vector<Atom>& atoms, const std::vector<std::size_t>& idx, const Declarations& decls,
                     std::vector<bool>& prefix, const Valuation& witness,
                     std::vector<std::pair<std::vector<bool>, Valuation>>& out) {
  std::size_t i = prefix.size();
  if (i == idx.size()) {
    out.emplace_back(prefix, witness);
    return;
  }
  bool here = atoms[idx[i]].evaluate(witness);
  for (bool sign : {true, false}) {
    prefix.push_back(sign);
    if (sign == here) {
      component_cells(atoms, idx, decls, prefix, witness, out);
    } else {
      std::vector<std::size_t> sub(idx.begin(), idx.begin() + static_cast<long>(i) + 1);
      if (auto w = logic::find_model(conj_of(atoms, sub, prefix), decls))
        component_cells(atoms, idx, decls, prefix, *w, out);
    }
    prefix.pop_back();
  }
}

}  // namespace

CellSet atom_cells(const std::vector<Predicate>& preds, const Declarations& decls) {
  CellSet cs;
  std::set<std::string> seen;
  for (const auto& g : preds) collect_atoms(g, cs.atoms, seen);

  // Union-find over variables; atoms sharing a variable share a component.
  std::map<std::string, std::string> parent;
  std::function<std::string(const std::string&)> root = [&](const std::string& v) {
    auto it = parent.find(v);
    if (it == parent.end() || it->second == v) return v;
    return it->second = root(it->second);
  };
  for (const auto& a : cs.atoms) {
    auto vs = atom_vars(a);
    for (const auto& v : vs) parent.emplace(v, v);
    for (std::size_t k = 1; k < vs.size(); ++k) parent[root(vs[k])] = root(vs[0]);
  }
  std::vector<std::string> comp_roots;
  std::vector<std::vector<std::size_t>> comps;
  for (std::size_t i = 0; i < cs.atoms.size(); ++i) {
    auto vs = atom_vars(cs.atoms[i]);
    std::string r = vs.empty() ? std::string() : root(vs[0]);
    auto pos = std::find(comp_roots.begin(), comp_roots.end(), r);
    if (pos == comp_roots.end()) {
      comp_roots.push_back(r);
      comps.emplace_back();
      pos = comp_roots.end() - 1;
    }
    comps[static_cast<std::size_t>(pos - comp_roots.begin())].push_back(i);
  }

  Valuation base = logic::find_model(Predicate::truth(), decls).value();
  std::vector<std::vector<std::pair<std::vector<bool>, Valuation>>> per;
  for (const auto& idx : comps) {
    std::vector<std::pair<std::vector<bool>, Valuation>> out;
    std::vector<bool> prefix;
    component_cells(cs.atoms, idx, decls, prefix, base, out);
    per.push_back(std::move(out));
  }

  // Cartesian product, first component varying slowest.
  std::vector<std::size_t> pick(per.size(), 0);
  bool empty = std::any_of(per.begin(), per.end(), [](const auto& v) { return v.empty(); });
  while (!empty) {
    std::vector<bool> signs(cs.atoms.size());
    Valuation w;
    for (std::size_t c = 0; c < per.size(); ++c) {
      const auto& [sg, wit] = per[c][pick[c]];
      for (std::size_t k = 0; k < comps[c].size(); ++k) signs[comps[c][k]] = sg[k];
      for (const auto& [name, val] : wit.values()) {
        auto vars_here = std::any_of(comps[c].begin(), comps[c].end(), [&](std::size_t ai) {
          auto vs = atom_vars(cs.atoms[ai]);
          return std::find(vs.begin(), vs.end(), name) != vs.end();
        });
        if (vars_here || !w.has(name)) w.set(name, val);
      }
    }
    cs.signs.push_back(std::move(signs));
    cs.witnesses.push_back(std::move(w));
    std::size_t c = per.size();
    while (c > 0) {
      --c;
      if (++pick[c] < per[c].size()) break;
      pick[c] = 0;
      if (c == 0) empty = true;
    }
    if (per.empty()) break;
  }
  return cs;
}

namespace {

// Cube over cell atoms; sign -1 means the atom is absent.
bool cube_matches(const std::vector<int>& cube, const std::vector<bool>& cell) {
  for (std::size_t i = 0; i < cube.size(); ++i)
    if (cube[i] >= 0 && static_cast<bool>(cube[i]) != cell[i]) return false;
  return true;
}

// Irredundant cube cover of exactly the cells in `members`.
Predicate cover_predicate(const CellSet& cs, const std::vector<bool>& member) {
  std::vector<std::vector<int>> cover;
  std::vector<bool> covered(member.size(), false);
  auto inside = [&](const std::vector<int>& cube) {
    for (std::size_t k = 0; k < member.size(); ++k)
      if (!member[k] && cube_matches(cube, cs.signs[k])) return false;
    return true;
  };
  for (std::size_t k = 0; k < member.size(); ++k) {
    if (!member[k] || covered[k]) continue;
    std::vector<int> cube(cs.atoms.size());
    for (std::size_t i = 0; i < cube.size(); ++i) cube[i] = cs.signs[k][i] ? 1 : 0;
    // Negated equalities are the least informative literals; drop them first.
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < cube.size(); ++i) {
        Literal l{cs.atoms[i], cube[i] == 1};
        if (cube[i] < 0 || negated_equality(l) != (pass == 0)) continue;
        int saved = cube[i];
        cube[i] = -1;
        if (!inside(cube)) cube[i] = saved;
      }
    for (std::size_t j = 0; j < member.size(); ++j)
      if (member[j] && cube_matches(cube, cs.signs[j])) covered[j] = true;
    cover.push_back(std::move(cube));
  }
  // Drop cubes whose cells are covered by the others.
  for (std::size_t c = cover.size(); c-- > 0;) {
    bool needed = false;
    for (std::size_t k = 0; k < member.size() && !needed; ++k) {
      if (!member[k] || !cube_matches(cover[c], cs.signs[k])) continue;
      bool elsewhere = false;
      for (std::size_t d = 0; d < cover.size(); ++d)
        if (d != c && cube_matches(cover[d], cs.signs[k])) elsewhere = true;
      needed = !elsewhere;
    }
    if (!needed) cover.erase(cover.begin() + static_cast<long>(c));
  }
  std::vector<Predicate> disj;
  for (const auto& cube : cover) {
    std::vector<Predicate> lits;
    for (std::size_t i = 0; i < cube.size(); ++i)
      if (cube[i] >= 0) lits.push_back(Predicate::literal(cs.atoms[i], cube[i] == 1));
    disj.push_back(Predicate::conj(std::move(lits)));
  }
  if (disj.empty()) return Predicate::falsity();
  return disj.size() == 1 ? disj.front() : Predicate::disj(std::move(disj));
}

}  // namespace

ClassTable input_classes(const std::vector<Predicate>& guards, const Declarations& domain) {
  ClassTable t;
  t.domain = domain;
  t.guards = distinct_guards(guards);
  CellSet cs = atom_cells(t.guards, domain);

  // Guard truth is constant on each cell.
  std::vector<std::vector<bool>> value(cs.witnesses.size());
  for (std::size_t k = 0; k < cs.witnesses.size(); ++k)
    for (const auto& g : t.guards) value[k].push_back(g.evaluate(cs.witnesses[k]));

  // Depth-first over guard signs; a prefix survives while some cell matches it.
  std::vector<std::pair<std::vector<bool>, std::vector<std::size_t>>> leaves;
  std::vector<bool> signs;
  std::function<void(const std::vector<std::size_t>&)> dfs = [&](const std::vector<std::size_t>& cells) {
    std::size_t i = signs.size();
    if (i == t.guards.size()) {
      leaves.emplace_back(signs, cells);
      return;
    }
    for (bool positive : {true, false}) {
      std::vector<std::size_t> sub;
      for (auto k : cells)
        if (value[k][i] == positive) sub.push_back(k);
      if (sub.empty()) continue;
      signs.push_back(positive);
      dfs(sub);
      signs.pop_back();
    }
  };
  std::vector<std::size_t> all(cs.witnesses.size());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  dfs(all);

  for (std::size_t n = 0; n < leaves.size(); ++n) {
    InputClass c;
    c.id = "c" + std::to_string(n + 1);
    c.signs = leaves[n].first;
    std::vector<Predicate> parts;
    for (std::size_t i = 0; i < t.guards.size(); ++i)
      parts.push_back(c.signs[i] ? t.guards[i] : t.guards[i].negated());
    c.minterm = Predicate::conj(std::move(parts));
    std::vector<bool> member(cs.witnesses.size(), false);
    for (auto k : leaves[n].second) member[k] = true;
    c.predicate = cover_predicate(cs, member);
    c.representative = *logic::find_model(c.predicate, domain);
    t.classes.push_back(std::move(c));
  }
  return t;
}

ClassTable input_classes(const model::Sfsm& m) {
  std::vector<Predicate> gs;
  for (const auto& tr : m.transitions) gs.push_back(tr.guard);
  return input_classes(gs, m.guard_domain());
}

std::optional<std::size_t> ClassTable::classify(const Valuation& u) const {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i].predicate.evaluate(u)) return i;
  return std::nullopt;
}

std::optional<std::size_t> ClassTable::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < classes.size(); ++i)
    if (classes[i].id == id) return i;
  return std::nullopt;
}

const InputClass& ClassTable::at(std::string_view id) const {
  auto i = index_of(id);
  if (!i) throw std::out_of_range("unknown input class '" + std::string(id) + "'");
  return classes[*i];
}

std::string render(const ClassTable& t) {
  std::ostringstream os;
  for (const auto& c : t.classes)
    os << c.id << "\t" << c.predicate.to_string() << "\t" << c.representative.to_string(t.domain) << "\n";
  return os.str();
}

}  // namespace mbt::eqclass
