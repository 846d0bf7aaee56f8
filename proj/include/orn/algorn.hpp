#pragma once

#include <string>
#include <utility>
#include <vector>

#include "orn/container.hpp"
#include "orn/desc.hpp"
#include "orn/errors.hpp"
#include "orn/finset.hpp"
#include "orn/ornament.hpp"
#include "orn/value.hpp"

namespace orn {

// The algebraic ornament of an algebra: the same container, reindexed by
// pairs of an index and a carrier value, where a shape additionally
// records the carrier values of its positions and is kept only when the
// algebra maps it to the paired value.
struct AlgOrnResult {
  Algebra alg;
  FinSetExpr pair_index;
  Container refined;
  DescFam refined_desc;
  CartMorphism morphism;
  OrnFam ornament;
};

inline AlgOrnResult algebraic_ornament(const Algebra& alg) {
  if (auto bad = validate_algebra(alg); !bad.empty())
    throw ValidationError("algebraic ornament over an invalid algebra: " + bad.front());
  AlgOrnResult r;
  r.alg = alg;
  Container c = desc_to_container(alg.desc);

  BranchMap<FinSetExpr> pair_branches;
  for (const auto& i : enumerate(alg.desc.out_index)) pair_branches.emplace(i, alg.carrier(i));
  r.pair_index = FinSetExpr::dep_sum(alg.desc.out_index, std::move(pair_branches));

  r.refined.in_index = r.pair_index;
  r.refined.out_index = r.pair_index;
  for (const auto& ix : enumerate(r.pair_index)) {
    const Value& i = ix.first();
    const Value& x = ix.second();
    const FinFn& table = alg.table.at(i);
    std::vector<Value> shapes;
    BranchMap<FinSetExpr> pos;
    BranchMap<FinFn> nxt;
    for (const auto& sh : enumerate(c.shape_set(i))) {
      auto ps = enumerate(c.position_set(i, sh));
      const FinFn& n = c.next_fn(i, sh);
      std::vector<std::vector<Value>> cols;
      for (const auto& p : ps) cols.push_back(enumerate(alg.carrier(apply_fn(n, p))));
      // Every assignment of carrier values to positions, odometer order.
      std::vector<size_t> digit(cols.size(), 0);
      bool live = true;
      for (const auto& col : cols) live = live && !col.empty();
      while (live) {
        std::vector<Value> f;
        for (size_t k = 0; k < cols.size(); ++k) f.push_back(cols[k][digit[k]]);
        Value rsh = Value::pair(sh, tuple_of(f));
        Value payload = from_container_value(alg.desc.code_at(i), rsh);
        auto hit = table.table.find(payload);
        if (hit != table.table.end() && hit->second == x) {
          shapes.push_back(rsh);
          pos.emplace(rsh, c.position_set(i, sh));
          FinFn rn{c.position_set(i, sh), r.pair_index, {}};
          for (size_t k = 0; k < ps.size(); ++k)
            rn.table.emplace(ps[k], Value::pair(apply_fn(n, ps[k]), f[k]));
          nxt.emplace(rsh, std::move(rn));
        }
        size_t k = cols.size();
        if (k == 0) break;
        while (true) {
          --k;
          if (++digit[k] < cols[k].size()) break;
          digit[k] = 0;
          if (k == 0) {
            live = false;
            break;
          }
        }
      }
    }
    r.refined.shapes.emplace(ix, FinSetExpr::lit(shapes));
    r.refined.positions.emplace(ix, std::move(pos));
    r.refined.next.emplace(ix, std::move(nxt));
  }

  FinFn proj = make_fn(r.pair_index, alg.desc.out_index,
                       [](const Value& ix) { return ix.first(); });
  r.morphism = CartMorphism{r.refined, c, proj, proj, {}};
  for (const auto& ix : enumerate(r.pair_index)) {
    BranchMap<Value> row;
    for (const auto& rsh : enumerate(r.refined.shape_set(ix))) row.emplace(rsh, rsh.first());
    r.morphism.sigma.emplace(ix, std::move(row));
  }
  r.refined_desc = container_to_desc(r.refined);
  r.ornament = cart_to_orn(r.morphism);
  return r;
}

// Decorates a tree with its own fold results: every node keeps its shape
// and records the folded values of its subtrees in the refined index.
inline Value remember_tree(const AlgOrnResult& r, const Value& i, const Value& t) {
  const DescCode& code = r.alg.desc.code_at(i);
  Value shape;
  std::vector<Value> ps;
  split_payload(code, t.arg(), shape, ps);
  auto pos = enumerate(code_positions(code, shape));
  std::vector<Value> folded;
  for (size_t k = 0; k < pos.size(); ++k) {
    Value ik = code_pos_index(code, shape, pos[k]);
    folded.push_back(fold(r.alg, ik, ps[k]));
    ps[k] = remember_tree(r, ik, ps[k]);
  }
  return Value::con(Value::pair(Value::pair(shape, tuple_of(folded)), tuple_of(ps)));
}

inline std::pair<Value, Value> remember(const AlgOrnResult& r, const Value& i, const Value& t) {
  Value x = fold(r.alg, i, t);
  Value ix = Value::pair(i, x);
  Value refined = remember_tree(r, i, t);
  return {ix, psi_wrap_tree(r.morphism, ix, refined)};
}

inline std::pair<Value, Value> remember(const Algebra& alg, const Value& i, const Value& t) {
  return remember(algebraic_ornament(alg), i, t);
}

// Strips the decoration and re-folds; the refined index must already
// carry the answer.
inline std::pair<Value, Value> recompute(const AlgOrnResult& r, const Value& ix,
                                         const Value& t_ref) {
  const Value& i = ix.first();
  const Value& x = ix.second();
  Value nf = psi_unwrap_tree(r.morphism, ix, t_ref);
  // Rebuild the base tree: drop the recorded carrier values at every node.
  std::function<Value(const Value&, const Value&)> strip =
      [&](const Value& at, const Value& t) -> Value {
    const Value& rsh = t.arg().first();
    const Value& sh = rsh.first();
    const Value& base_i = at.first();
    const FinFn& n = r.refined.next_fn(at, rsh);
    auto pvals = enumerate(r.refined.position_set(at, rsh));
    std::vector<Value> subs = tuple_parts(t.arg().second(), pvals.size());
    for (size_t k = 0; k < pvals.size(); ++k)
      subs[k] = strip(apply_fn(n, pvals[k]), subs[k]);
    size_t cursor = 0;
    Value payload = join_payload(r.alg.desc.code_at(base_i), sh, subs, cursor);
    return Value::con(payload);
  };
  Value t = strip(ix, nf);
  Value back = fold(r.alg, i, t);
  if (back != x)
    throw CoherenceViolationError("recomputed value " + back.to_text() +
                                  " differs from the recorded index " + x.to_text());
  return {t, Value::refl()};
}

struct CoherenceReport {
  bool pass = true;
  size_t refined_count = 0;
  size_t filtered_count = 0;
  std::vector<CheckViolation> violations;

  void fail(std::string rule, std::string detail) {
    pass = false;
    violations.push_back({std::move(rule), std::move(detail)});
  }
};

// Brute-force coherence of the algebraic ornament at one refined index:
// its bounded fixpoint matches { t | fold t = x } through remember and
// recompute, which must be mutually inverse.
inline CoherenceReport check_coherence(const Algebra& alg, const Value& i, const Value& x,
                                       int depth) {
  AlgOrnResult r = algebraic_ornament(alg);
  Value ix = Value::pair(i, x);
  if (!contains(r.pair_index, ix))
    throw DomainError("no refined index " + ix.to_text());
  CoherenceReport rep;
  DescFam refined_interp = interp_orn(r.ornament);
  auto lhs = mu_enumerate(refined_interp, ix, depth);
  std::vector<Value> rhs;
  for (const auto& t : mu_enumerate(alg.desc, i, depth)) {
    try {
      if (fold(alg, i, t) == x) rhs.push_back(t);
    } catch (const CarrierOverflowError&) {
    }
  }
  rep.refined_count = lhs.size();
  rep.filtered_count = rhs.size();
  if (lhs.size() != rhs.size())
    rep.fail("count", std::to_string(lhs.size()) + " refined trees vs " +
                          std::to_string(rhs.size()) + " matching base trees");
  std::set<Value, ValueLess> lhs_set(lhs.begin(), lhs.end());
  for (const auto& t : rhs) {
    auto [ix2, dec] = remember(r, i, t);
    if (ix2 != ix) {
      rep.fail("remember-index", "tree remembered at " + ix2.to_text());
      continue;
    }
    if (!lhs_set.count(dec)) {
      rep.fail("remember-range", "decorated tree not in the refined fixpoint: " + dec.to_text());
      continue;
    }
    auto [t2, w] = recompute(r, ix, dec);
    (void)w;
    if (t2 != t) rep.fail("recompute-inverse", "recompute(remember(t)) differs at " + t.to_text());
  }
  for (const auto& dec : lhs) {
    auto [t, w] = recompute(r, ix, dec);
    (void)w;
    auto [ix2, dec2] = remember(r, i, t);
    (void)ix2;
    if (dec2 != dec) rep.fail("remember-inverse", "remember(recompute(d)) differs at " + dec.to_text());
  }
  return rep;
}

}  // namespace orn
