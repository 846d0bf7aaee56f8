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
#include "orn/finset.hpp"
#include "orn/value.hpp"

namespace orn {

// Code for one datatype node shape over an index set I:
//
//   Var(i)         a recursive occurrence at index i
//   One            no payload
//   Sigma(S, T)    a dependent choice: pick s in S, continue as T(s)
//   Pi(S, T)       a dependent tuple: one component T(s) for every s in S
class DescCode {
 public:
  enum class Kind { Var, One, Sigma, Pi };

  DescCode() : DescCode(one()) {}

  static DescCode var(Value idx) {
    Node n;
    n.kind = Kind::Var;
    n.idx = std::move(idx);
    return make(std::move(n));
  }
  static DescCode one() {
    Node n;
    n.kind = Kind::One;
    return make(std::move(n));
  }
  static DescCode sigma(FinSetExpr s, BranchMap<DescCode> branches) {
    Node n;
    n.kind = Kind::Sigma;
    n.set = std::move(s);
    n.branches = std::move(branches);
    return make(std::move(n));
  }
  static DescCode pi(FinSetExpr s, BranchMap<DescCode> branches) {
    Node n;
    n.kind = Kind::Pi;
    n.set = std::move(s);
    n.branches = std::move(branches);
    return make(std::move(n));
  }

  Kind kind() const { return node_->kind; }
  const Value& idx() const { return node_->idx; }
  const FinSetExpr& set() const { return node_->set; }
  const BranchMap<DescCode>& branches() const { return node_->branches; }

  const DescCode& branch(const Value& v) const {
    auto it = node_->branches.find(v);
    if (it == node_->branches.end())
      throw MalformedSetError("description branch missing at " + v.to_text());
    return it->second;
  }

 private:
  struct Node {
    Kind kind;
    Value idx;
    FinSetExpr set;
    BranchMap<DescCode> branches;
  };

  explicit DescCode(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static DescCode make(Node n) { return DescCode(std::make_shared<const Node>(std::move(n))); }

  std::shared_ptr<const Node> node_;
};

// An indexed family of descriptions: for each output index j, the code of
// nodes at j, whose Var leaves point into the input index set.
struct DescFam {
  FinSetExpr in_index;
  FinSetExpr out_index;
  BranchMap<DescCode> at;

  const DescCode& code_at(const Value& j) const {
    auto it = at.find(j);
    if (it == at.end())
      throw IndexMismatchError("description has no code at " + j.to_text());
    return it->second;
  }
};

inline void validate_code(const DescCode& c, const std::vector<Value>& in_values,
                          std::vector<std::string>& bad) {
  switch (c.kind()) {
    case DescCode::Kind::Var:
      if (std::find(in_values.begin(), in_values.end(), c.idx()) == in_values.end())
        bad.push_back("var index outside input index set: " + c.idx().to_text());
      return;
    case DescCode::Kind::One:
      return;
    case DescCode::Kind::Sigma:
    case DescCode::Kind::Pi: {
      for (const auto& s : enumerate(c.set())) {
        auto it = c.branches().find(s);
        if (it == c.branches().end()) {
          bad.push_back("branch table missing entry at " + s.to_text());
          continue;
        }
        validate_code(it->second, in_values, bad);
      }
      return;
    }
  }
}

inline std::vector<std::string> validate_descfam(const DescFam& d) {
  std::vector<std::string> bad;
  auto in_values = enumerate(d.in_index);
  for (const auto& j : enumerate(d.out_index)) {
    auto it = d.at.find(j);
    if (it == d.at.end()) {
      bad.push_back("no code at index " + j.to_text());
      continue;
    }
    validate_code(it->second, in_values, bad);
  }
  return bad;
}

// Interpretation of one code against a family x of sets over the input
// index set. Sigma becomes a dependent sum of interpretations, Pi a
// dependent product whose values are ordered tuples.
inline FinSetExpr interp_code(const DescCode& c, const Family& x) {
  switch (c.kind()) {
    case DescCode::Kind::Var:
      return x(c.idx());
    case DescCode::Kind::One:
      return FinSetExpr::unit_set();
    case DescCode::Kind::Sigma:
    case DescCode::Kind::Pi: {
      BranchMap<FinSetExpr> bs;
      for (const auto& s : enumerate(c.set())) bs.emplace(s, interp_code(c.branch(s), x));
      return c.kind() == DescCode::Kind::Sigma ? FinSetExpr::dep_sum(c.set(), std::move(bs))
                                               : FinSetExpr::dep_prod(c.set(), std::move(bs));
    }
  }
  throw MalformedSetError("unreachable description kind");
}

inline Family interp_desc(const DescFam& d, const Family& x) {
  if (!set_equal(d.in_index, x.index))
    throw IndexMismatchError("family index set does not match description input");
  Family out{d.out_index, {}};
  for (const auto& j : enumerate(d.out_index)) out.at.emplace(j, interp_code(d.code_at(j), x));
  return out;
}

inline bool is_endo(const DescFam& d) { return set_equal(d.in_index, d.out_index); }

// Bounded fixpoint enumeration: all trees of depth <= depth at every
// index, iterating the interpretation from the empty family. The result
// at a given depth is a prefix of the result at any greater depth.
inline BranchMap<std::vector<Value>> mu_enumerate_all(const DescFam& d, int depth) {
  if (!is_endo(d))
    throw IndexMismatchError("fixpoint of a description whose index sets differ");
  auto idx = enumerate(d.out_index);
  BranchMap<std::vector<Value>> cur;
  BranchMap<std::set<Value, ValueLess>> seen;
  for (const auto& i : idx) {
    cur[i] = {};
    seen[i] = {};
  }
  for (int step = 0; step < depth; ++step) {
    Family fam{d.in_index, {}};
    for (const auto& i : idx) fam.at.emplace(i, FinSetExpr::lit(cur[i]));
    for (const auto& j : idx) {
      for (const auto& p : enumerate(interp_code(d.code_at(j), fam))) {
        Value t = Value::con(p);
        if (seen[j].insert(t).second) cur[j].push_back(t);
      }
    }
  }
  return cur;
}

inline std::vector<Value> mu_enumerate(const DescFam& d, const Value& j, int depth) {
  auto all = mu_enumerate_all(d, depth);
  auto it = all.find(j);
  if (it == all.end())
    throw IndexMismatchError("fixpoint index outside the index set: " + j.to_text());
  return it->second;
}

// Family whose component at i is the literal set of bounded trees at i.
inline Family mu_family(const DescFam& d, int depth) {
  auto all = mu_enumerate_all(d, depth);
  Family fam{d.out_index, {}};
  for (auto& [i, ts] : all) fam.at.emplace(i, FinSetExpr::lit(ts));
  return fam;
}

inline size_t tree_depth(const Value& t);

inline size_t payload_max_depth(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Con:
      return tree_depth(v);
    case Value::Kind::Pair:
      return std::max(payload_max_depth(v.first()), payload_max_depth(v.second()));
    case Value::Kind::InL:
    case Value::Kind::InR:
    case Value::Kind::InvWit:
      return payload_max_depth(v.arg());
    default:
      return 0;
  }
}

inline size_t tree_depth(const Value& t) {
  if (!t.is(Value::Kind::Con))
    throw MalformedElementError("not a fixpoint tree: " + t.to_text());
  return 1 + payload_max_depth(t.arg());
}

inline bool well_indexed(const DescFam& d, const Value& i, const Value& t);

inline bool well_indexed_payload(const DescFam& d, const DescCode& c, const Value& v) {
  switch (c.kind()) {
    case DescCode::Kind::Var:
      return well_indexed(d, c.idx(), v);
    case DescCode::Kind::One:
      return v.is(Value::Kind::Unit);
    case DescCode::Kind::Sigma: {
      if (!v.is(Value::Kind::Pair)) return false;
      if (!contains(c.set(), v.first())) return false;
      return well_indexed_payload(d, c.branch(v.first()), v.second());
    }
    case DescCode::Kind::Pi: {
      auto dom = enumerate(c.set());
      try {
        auto parts = tuple_parts(v, dom.size());
        for (size_t k = 0; k < dom.size(); ++k)
          if (!well_indexed_payload(d, c.branch(dom[k]), parts[k])) return false;
        return true;
      } catch (const MalformedElementError&) {
        return false;
      }
    }
  }
  return false;
}

inline bool well_indexed(const DescFam& d, const Value& i, const Value& t) {
  if (!t.is(Value::Kind::Con)) return false;
  if (!contains(d.out_index, i)) return false;
  return well_indexed_payload(d, d.code_at(i), t.arg());
}

// An algebra for an endo description: a carrier family over the index
// set and, per index, a tabulated map from one interpretation layer over
// the carrier into the carrier. Tables built over truncated carriers may
// omit entries whose result would escape; fold reports those as
// carrier overflow.
struct Algebra {
  DescFam desc;
  Family carrier;
  BranchMap<FinFn> table;
};

inline std::vector<std::string> validate_algebra(const Algebra& a) {
  std::vector<std::string> bad;
  if (!is_endo(a.desc)) bad.push_back("algebra description is not endo-indexed");
  if (!set_equal(a.desc.out_index, a.carrier.index))
    bad.push_back("carrier family indexed by a different set");
  for (const auto& v : validate_family(a.carrier)) bad.push_back(v);
  if (!bad.empty()) return bad;
  Family layer = interp_desc(a.desc, a.carrier);
  for (const auto& i : enumerate(a.desc.out_index)) {
    auto it = a.table.find(i);
    if (it == a.table.end()) {
      bad.push_back("no table at index " + i.to_text());
      continue;
    }
    auto dom = enumerate(layer(i));
    auto car = enumerate(a.carrier(i));
    for (const auto& [k, v] : it->second.table) {
      if (std::find(dom.begin(), dom.end(), k) == dom.end())
        bad.push_back("table key outside interpretation at " + i.to_text() + ": " + k.to_text());
      if (std::find(car.begin(), car.end(), v) == car.end())
        bad.push_back("table image outside carrier at " + i.to_text() + ": " + v.to_text());
    }
  }
  return bad;
}

inline Value fold(const Algebra& a, const Value& i, const Value& t);

inline Value fold_payload(const Algebra& a, const DescCode& c, const Value& v) {
  switch (c.kind()) {
    case DescCode::Kind::Var:
      return fold(a, c.idx(), v);
    case DescCode::Kind::One:
      return v;
    case DescCode::Kind::Sigma:
      return Value::pair(v.first(), fold_payload(a, c.branch(v.first()), v.second()));
    case DescCode::Kind::Pi: {
      auto dom = enumerate(c.set());
      auto parts = tuple_parts(v, dom.size());
      for (size_t k = 0; k < dom.size(); ++k)
        parts[k] = fold_payload(a, c.branch(dom[k]), parts[k]);
      return tuple_of(parts);
    }
  }
  throw MalformedElementError("unreachable payload kind");
}

inline Value fold(const Algebra& a, const Value& i, const Value& t) {
  if (!t.is(Value::Kind::Con))
    throw MalformedElementError("fold target is not a tree: " + t.to_text());
  Value collapsed = fold_payload(a, a.desc.code_at(i), t.arg());
  auto ti = a.table.find(i);
  if (ti == a.table.end())
    throw IndexMismatchError("algebra has no table at " + i.to_text());
  auto hit = ti->second.table.find(collapsed);
  if (hit == ti->second.table.end())
    throw CarrierOverflowError("fold result escapes the carrier at " + i.to_text() + ": " +
                               collapsed.to_text());
  return hit->second;
}

// Structural substitution of one description family into another: every
// Var(b) leaf of d's code is replaced by e's code at b. Interprets as the
// composite of the two interpretations.
inline DescCode subst_code(const DescCode& c, const DescFam& e) {
  switch (c.kind()) {
    case DescCode::Kind::Var:
      return e.code_at(c.idx());
    case DescCode::Kind::One:
      return DescCode::one();
    case DescCode::Kind::Sigma:
    case DescCode::Kind::Pi: {
      BranchMap<DescCode> bs;
      for (const auto& [k, b] : c.branches()) bs.emplace(k, subst_code(b, e));
      return c.kind() == DescCode::Kind::Sigma ? DescCode::sigma(c.set(), std::move(bs))
                                               : DescCode::pi(c.set(), std::move(bs));
    }
  }
  throw MalformedSetError("unreachable description kind");
}

inline DescFam compose_desc(const DescFam& d, const DescFam& e) {
  if (!set_equal(d.in_index, e.out_index))
    throw IndexMismatchError("description composition: index sets out of joint");
  DescFam out{e.in_index, d.out_index, {}};
  for (const auto& [j, c] : d.at) out.at.emplace(j, subst_code(c, e));
  return out;
}

enum class AdjointKind { Reindex, Exists, Forall };

// The reindexing functor along f and its two adjoints, as descriptions:
//   Reindex f : at a, a bare Var at f(a)
//   Exists f  : at b, a choice of preimage witness followed by Var there
//   Forall f  : at b, a tuple over all preimage witnesses
inline DescFam adjoint_desc(AdjointKind kind, const FinFn& f) {
  DescFam out;
  if (kind == AdjointKind::Reindex) {
    out.in_index = f.cod;
    out.out_index = f.dom;
    for (const auto& a : enumerate(f.dom)) out.at.emplace(a, DescCode::var(apply_fn(f, a)));
    return out;
  }
  out.in_index = f.dom;
  out.out_index = f.cod;
  for (const auto& b : enumerate(f.cod)) {
    FinSetExpr fib = inverse_image(f, b);
    BranchMap<DescCode> bs;
    for (const auto& w : enumerate(fib)) bs.emplace(w, DescCode::var(w.arg()));
    out.at.emplace(b, kind == AdjointKind::Exists ? DescCode::sigma(fib, std::move(bs))
                                                  : DescCode::pi(fib, std::move(bs)));
  }
  return out;
}

inline DescFam identity_desc(const FinSetExpr& index) {
  return adjoint_desc(AdjointKind::Reindex, identity_fn(index));
}

inline DescCode rename_vars(const DescCode& c, const FinFn& u) {
  switch (c.kind()) {
    case DescCode::Kind::Var:
      return DescCode::var(apply_fn(u, c.idx()));
    case DescCode::Kind::One:
      return DescCode::one();
    case DescCode::Kind::Sigma:
    case DescCode::Kind::Pi: {
      BranchMap<DescCode> bs;
      for (const auto& [k, b] : c.branches()) bs.emplace(k, rename_vars(b, u));
      return c.kind() == DescCode::Kind::Sigma ? DescCode::sigma(c.set(), std::move(bs))
                                               : DescCode::pi(c.set(), std::move(bs));
    }
  }
  throw MalformedSetError("unreachable description kind");
}

// Pushes a description along a pair of index maps: the result at l sums
// over the fibre of v at l and renames every Var through u.
inline DescFam cobase_change(const DescFam& d, const FinFn& u, const FinFn& v) {
  if (!set_equal(u.dom, d.in_index) || !set_equal(v.dom, d.out_index))
    throw FrameMismatchError("cobase change maps must start at the description's index sets");
  DescFam out{u.cod, v.cod, {}};
  for (const auto& l : enumerate(v.cod)) {
    FinSetExpr fib = inverse_image(v, l);
    BranchMap<DescCode> bs;
    for (const auto& w : enumerate(fib)) bs.emplace(w, rename_vars(d.code_at(w.arg()), u));
    out.at.emplace(l, DescCode::sigma(fib, std::move(bs)));
  }
  return out;
}

// Convenience algebras.

inline Algebra constant_algebra(const DescFam& d, const Value& v) {
  Algebra a;
  a.desc = d;
  a.carrier = make_family(d.out_index, [&](const Value&) { return FinSetExpr::lit({v}); });
  Family layer = interp_desc(d, a.carrier);
  for (const auto& i : enumerate(d.out_index)) {
    FinFn fn{layer(i), a.carrier(i), {}};
    for (const auto& el : enumerate(layer(i))) fn.table.emplace(el, v);
    a.table.emplace(i, std::move(fn));
  }
  return a;
}

inline std::pair<long long, size_t> count_rec_leaves(const DescCode& c, const Value& v) {
  switch (c.kind()) {
    case DescCode::Kind::Var:
      return {nat_of(v), 1};
    case DescCode::Kind::One:
      return {0, 0};
    case DescCode::Kind::Sigma: {
      auto [s, n] = count_rec_leaves(c.branch(v.first()), v.second());
      return {s, n};
    }
    case DescCode::Kind::Pi: {
      auto dom = enumerate(c.set());
      auto parts = tuple_parts(v, dom.size());
      long long s = 0;
      size_t n = 0;
      for (size_t k = 0; k < dom.size(); ++k) {
        auto [s2, n2] = count_rec_leaves(c.branch(dom[k]), parts[k]);
        s += s2;
        n += n2;
      }
      return {s, n};
    }
  }
  throw MalformedElementError("unreachable payload kind");
}

// Counts recursive constructors: a node contributes one when it has at
// least one recursive position, plus the counts at those positions. On
// lists this is the length, on naturals the numeral value. The carrier
// is truncated at `bound`; entries that would escape are omitted.
inline Algebra length_algebra(const DescFam& d, int bound) {
  Algebra a;
  a.desc = d;
  a.carrier = make_family(d.out_index, [&](const Value&) { return nat_lt(bound); });
  Family layer = interp_desc(d, a.carrier);
  for (const auto& i : enumerate(d.out_index)) {
    FinFn fn{layer(i), a.carrier(i), {}};
    for (const auto& el : enumerate(layer(i))) {
      auto [s, n] = count_rec_leaves(d.code_at(i), el);
      long long total = s + (n > 0 ? 1 : 0);
      if (total < bound) fn.table.emplace(el, Value::num(total));
    }
    a.table.emplace(i, std::move(fn));
  }
  return a;
}

// Projects the head choice of a Sigma-rooted description.
inline Algebra tag_algebra(const DescFam& d) {
  Algebra a;
  a.desc = d;
  a.carrier = make_family(d.out_index, [&](const Value& i) {
    const DescCode& c = d.code_at(i);
    if (c.kind() != DescCode::Kind::Sigma)
      throw ValidationError("tag algebra needs a choice-rooted description at " + i.to_text());
    return c.set();
  });
  Family layer = interp_desc(d, a.carrier);
  for (const auto& i : enumerate(d.out_index)) {
    FinFn fn{layer(i), a.carrier(i), {}};
    for (const auto& el : enumerate(layer(i))) fn.table.emplace(el, el.first());
    a.table.emplace(i, std::move(fn));
  }
  return a;
}

}  // namespace orn
