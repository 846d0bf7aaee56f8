#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "orn/errors.hpp"
#include "orn/value.hpp"

namespace orn {

class FinSetExpr;
struct FinFn;

using Env = std::map<std::string, FinSetExpr>;
using ValueMap = std::map<Value, Value, ValueLess>;

template <typename T>
using BranchMap = std::map<Value, T, ValueLess>;

// Symbolic finite set. The first six forms are the surface algebra; the
// last three arise internally when interpreting descriptions (dependent
// sums and products of sets, and literal sets of already-built values
// such as bounded fixpoint trees).
class FinSetExpr {
 public:
  enum class Kind { Enum, Sum, Prod, Eq, InvImg, Named, Lit, DepSum, DepProd };

  FinSetExpr() : FinSetExpr(lit({})) {}

  static FinSetExpr make_enum(std::vector<std::string> labels);
  static FinSetExpr sum(FinSetExpr l, FinSetExpr r);
  static FinSetExpr prod(FinSetExpr l, FinSetExpr r);
  static FinSetExpr eq(Value lhs, Value rhs);
  static FinSetExpr inv_img(FinFn fn, Value target);
  static FinSetExpr named(std::string alias);
  static FinSetExpr lit(std::vector<Value> elems);
  static FinSetExpr unit_set() { return lit({Value::unit()}); }
  static FinSetExpr dep_sum(FinSetExpr index, BranchMap<FinSetExpr> branches);
  static FinSetExpr dep_prod(FinSetExpr index, BranchMap<FinSetExpr> branches);

  Kind kind() const { return node_->kind; }

  const std::vector<std::string>& labels() const { return node_->labels; }
  const std::vector<Value>& lit_elems() const { return node_->elems; }
  const FinSetExpr& left() const { return node_->children[0]; }
  const FinSetExpr& right() const { return node_->children[1]; }
  const Value& eq_lhs() const { return node_->values[0]; }
  const Value& eq_rhs() const { return node_->values[1]; }
  const FinFn& fn() const;
  const Value& target() const { return node_->values[0]; }
  const std::string& alias() const { return node_->alias; }
  const FinSetExpr& index() const { return node_->children[0]; }
  const BranchMap<FinSetExpr>& branches() const { return node_->branches; }

 private:
  struct Node {
    Kind kind;
    std::vector<std::string> labels;
    std::vector<Value> elems;
    std::vector<Value> values;
    std::vector<FinSetExpr> children;
    BranchMap<FinSetExpr> branches;
    std::shared_ptr<const FinFn> fn;
    std::string alias;
  };

  explicit FinSetExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static FinSetExpr make(Node n) {
    return FinSetExpr(std::make_shared<const Node>(std::move(n)));
  }

  std::shared_ptr<const Node> node_;
};

// Total function between two enumerable sets, tabulated over the whole
// domain. Extensional: two functions are equal when their domains
// enumerate equally and the tables agree pointwise.
struct FinFn {
  FinSetExpr dom;
  FinSetExpr cod;
  ValueMap table;
};

// Set-indexed family of sets: a total finite map from index values to sets.
struct Family {
  FinSetExpr index;
  BranchMap<FinSetExpr> at;

  const FinSetExpr& operator()(const Value& i) const {
    auto it = at.find(i);
    if (it == at.end())
      throw IndexMismatchError("family has no component at " + i.to_text());
    return it->second;
  }
};

inline const FinFn& FinSetExpr::fn() const { return *node_->fn; }

inline FinSetExpr FinSetExpr::make_enum(std::vector<std::string> labels) {
  std::set<std::string> seen;
  for (const auto& l : labels)
    if (!seen.insert(l).second)
      throw ValidationError("duplicate enum label: " + l);
  Node n;
  n.kind = Kind::Enum;
  n.labels = std::move(labels);
  return make(std::move(n));
}

inline FinSetExpr FinSetExpr::sum(FinSetExpr l, FinSetExpr r) {
  Node n;
  n.kind = Kind::Sum;
  n.children = {std::move(l), std::move(r)};
  return make(std::move(n));
}

inline FinSetExpr FinSetExpr::prod(FinSetExpr l, FinSetExpr r) {
  Node n;
  n.kind = Kind::Prod;
  n.children = {std::move(l), std::move(r)};
  return make(std::move(n));
}

inline FinSetExpr FinSetExpr::eq(Value lhs, Value rhs) {
  Node n;
  n.kind = Kind::Eq;
  n.values = {std::move(lhs), std::move(rhs)};
  return make(std::move(n));
}

inline FinSetExpr FinSetExpr::inv_img(FinFn fn, Value target) {
  Node n;
  n.kind = Kind::InvImg;
  n.fn = std::make_shared<const FinFn>(std::move(fn));
  n.values = {std::move(target)};
  return make(std::move(n));
}

inline FinSetExpr FinSetExpr::named(std::string alias) {
  Node n;
  n.kind = Kind::Named;
  n.alias = std::move(alias);
  return make(std::move(n));
}

inline FinSetExpr FinSetExpr::lit(std::vector<Value> elems) {
  Node n;
  n.kind = Kind::Lit;
  n.elems = std::move(elems);
  return make(std::move(n));
}

inline FinSetExpr FinSetExpr::dep_sum(FinSetExpr index, BranchMap<FinSetExpr> branches) {
  Node n;
  n.kind = Kind::DepSum;
  n.children = {std::move(index)};
  n.branches = std::move(branches);
  return make(std::move(n));
}

inline FinSetExpr FinSetExpr::dep_prod(FinSetExpr index, BranchMap<FinSetExpr> branches) {
  Node n;
  n.kind = Kind::DepProd;
  n.children = {std::move(index)};
  n.branches = std::move(branches);
  return make(std::move(n));
}

// Canonical enumeration. Deterministic and duplicate-free:
//   Enum     declaration order
//   Sum      all left injections, then all right
//   Prod     lexicographic, first component most significant
//   Eq       [Refl] iff the two sides are structurally equal
//   InvImg   witnesses in domain order
//   Lit      given order
//   DepSum   index-major lexicographic pairs
//   DepProd  ordered tuples, first index value most significant
inline std::vector<Value> enumerate(const FinSetExpr& s, const Env* env = nullptr) {
  using K = FinSetExpr::Kind;
  std::vector<Value> out;
  switch (s.kind()) {
    case K::Enum:
      for (const auto& l : s.labels()) out.push_back(Value::label(l));
      return out;
    case K::Sum: {
      for (const auto& v : enumerate(s.left(), env)) out.push_back(Value::inl(v));
      for (const auto& v : enumerate(s.right(), env)) out.push_back(Value::inr(v));
      return out;
    }
    case K::Prod: {
      auto ls = enumerate(s.left(), env);
      auto rs = enumerate(s.right(), env);
      for (const auto& a : ls)
        for (const auto& b : rs) out.push_back(Value::pair(a, b));
      return out;
    }
    case K::Eq:
      if (s.eq_lhs() == s.eq_rhs()) out.push_back(Value::refl());
      return out;
    case K::InvImg: {
      const FinFn& f = s.fn();
      for (const auto& a : enumerate(f.dom, env)) {
        auto it = f.table.find(a);
        if (it == f.table.end())
          throw ValidationError("function table missing entry at " + a.to_text());
        if (it->second == s.target()) out.push_back(Value::inv_wit(a));
      }
      return out;
    }
    case K::Named: {
      if (env == nullptr)
        throw UnresolvedNameError("unresolved set alias: " + s.alias());
      auto it = env->find(s.alias());
      if (it == env->end())
        throw UnresolvedNameError("unresolved set alias: " + s.alias());
      return enumerate(it->second, env);
    }
    case K::Lit:
      return s.lit_elems();
    case K::DepSum: {
      for (const auto& i : enumerate(s.index(), env)) {
        auto it = s.branches().find(i);
        if (it == s.branches().end())
          throw MalformedSetError("dependent sum missing branch at " + i.to_text());
        for (const auto& v : enumerate(it->second, env)) out.push_back(Value::pair(i, v));
      }
      return out;
    }
    case K::DepProd: {
      auto idx = enumerate(s.index(), env);
      std::vector<std::vector<Value>> cols;
      for (const auto& i : idx) {
        auto it = s.branches().find(i);
        if (it == s.branches().end())
          throw MalformedSetError("dependent product missing branch at " + i.to_text());
        cols.push_back(enumerate(it->second, env));
        if (cols.back().empty()) return out;
      }
      std::vector<size_t> digit(cols.size(), 0);
      while (true) {
        std::vector<Value> tup;
        tup.reserve(cols.size());
        for (size_t k = 0; k < cols.size(); ++k) tup.push_back(cols[k][digit[k]]);
        out.push_back(tuple_of(tup));
        size_t k = cols.size();
        while (k > 0) {
          --k;
          if (++digit[k] < cols[k].size()) break;
          digit[k] = 0;
          if (k == 0) return out;
        }
        if (cols.empty()) return out;
      }
    }
  }
  return out;
}

inline std::vector<Value> enumerate(const FinSetExpr& s, const Env& env) {
  return enumerate(s, &env);
}

inline size_t count(const FinSetExpr& s, const Env* env = nullptr) {
  return enumerate(s, env).size();
}

inline bool contains(const FinSetExpr& s, const Value& v, const Env* env = nullptr) {
  auto es = enumerate(s, env);
  return std::find(es.begin(), es.end(), v) != es.end();
}

// Sets compare by canonical enumeration, not by expression shape.
inline bool set_equal(const FinSetExpr& a, const FinSetExpr& b, const Env* env = nullptr) {
  return enumerate(a, env) == enumerate(b, env);
}

inline Value apply_fn(const FinFn& f, const Value& v) {
  auto it = f.table.find(v);
  if (it == f.table.end())
    throw DomainError("value outside function domain: " + v.to_text());
  return it->second;
}

inline FinSetExpr inverse_image(const FinFn& f, const Value& target) {
  if (!contains(f.cod, target))
    throw DomainError("inverse image target outside codomain: " + target.to_text());
  return FinSetExpr::inv_img(f, target);
}

inline bool fn_equal(const FinFn& f, const FinFn& g) {
  auto df = enumerate(f.dom);
  if (df != enumerate(g.dom)) return false;
  for (const auto& a : df)
    if (apply_fn(f, a) != apply_fn(g, a)) return false;
  return true;
}

// Checks totality of the table over the domain and that images land in
// the codomain. Returns human-readable violations; empty means valid.
inline std::vector<std::string> validate_fn(const FinFn& f, const Env* env = nullptr) {
  std::vector<std::string> bad;
  auto dom = enumerate(f.dom, env);
  auto cod = enumerate(f.cod, env);
  for (const auto& a : dom) {
    auto it = f.table.find(a);
    if (it == f.table.end()) {
      bad.push_back("missing entry at " + a.to_text());
      continue;
    }
    if (std::find(cod.begin(), cod.end(), it->second) == cod.end())
      bad.push_back("image outside codomain at " + a.to_text() + ": " + it->second.to_text());
  }
  for (const auto& [k, v] : f.table) {
    (void)v;
    if (std::find(dom.begin(), dom.end(), k) == dom.end())
      bad.push_back("table entry outside domain: " + k.to_text());
  }
  return bad;
}

inline std::vector<std::string> validate_family(const Family& fam, const Env* env = nullptr) {
  std::vector<std::string> bad;
  for (const auto& i : enumerate(fam.index, env))
    if (fam.at.find(i) == fam.at.end())
      bad.push_back("family missing component at " + i.to_text());
  return bad;
}

inline FinFn make_fn(FinSetExpr dom, FinSetExpr cod,
                     const std::function<Value(const Value&)>& f) {
  FinFn fn{std::move(dom), std::move(cod), {}};
  for (const auto& a : enumerate(fn.dom)) {
    Value b = f(a);
    if (!contains(fn.cod, b))
      throw ValidationError("function image outside codomain at " + a.to_text() + ": " +
                            b.to_text());
    fn.table.emplace(a, b);
  }
  return fn;
}

inline FinFn identity_fn(const FinSetExpr& s) {
  return make_fn(s, s, [](const Value& v) { return v; });
}

inline FinFn constant_fn(const FinSetExpr& dom, const FinSetExpr& cod, const Value& v) {
  return make_fn(dom, cod, [&](const Value&) { return v; });
}

inline FinFn compose_fn(const FinFn& g, const FinFn& f) {
  if (!set_equal(f.cod, g.dom))
    throw FrameMismatchError("function composition: codomain/domain mismatch");
  return make_fn(f.dom, g.cod, [&](const Value& a) { return apply_fn(g, apply_fn(f, a)); });
}

inline Family make_family(const FinSetExpr& index,
                          const std::function<FinSetExpr(const Value&)>& f) {
  Family fam{index, {}};
  for (const auto& i : enumerate(index)) fam.at.emplace(i, f(i));
  return fam;
}

// Truncated naturals: Nat<n as the enumeration "0", "1", ..., "n-1".
// Partial successor convention: a successor that would leave the
// truncation has no representative, so equations mentioning it are
// empty sets and function builders below stay within range by typing.
inline FinSetExpr nat_lt(int n) {
  std::vector<std::string> ls;
  for (int k = 0; k < n; ++k) ls.push_back(std::to_string(k));
  return FinSetExpr::make_enum(std::move(ls));
}

inline long long nat_of(const Value& v) {
  const std::string& s = v.name();
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
    throw DomainError("not a numeral label: " + v.to_text());
  return std::stoll(s);
}

// Doubling map Nat<n -> Nat<2n.
inline FinFn twice_fn(int n) {
  return make_fn(nat_lt(n), nat_lt(2 * n),
                 [](const Value& v) { return Value::num(2 * nat_of(v)); });
}

// Strict successor Nat<n -> Nat<n+1; zero has no preimage.
inline FinFn succ_into_fn(int n) {
  return make_fn(nat_lt(n), nat_lt(n + 1),
                 [](const Value& v) { return Value::num(nat_of(v) + 1); });
}

// The set Eq(i, suc i') inside Nat<n: empty whenever suc i' overflows.
inline FinSetExpr eq_suc(int n, const Value& i, const Value& i_prev) {
  long long prev = nat_of(i_prev);
  if (prev + 1 >= n) return FinSetExpr::lit({});
  return FinSetExpr::eq(i, Value::num(prev + 1));
}

}  // namespace orn
