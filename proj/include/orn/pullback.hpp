#pragma once

#include <set>
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

// The pullback of two ornaments of one base description: indices pair up
// when they agree under the frame maps, shapes pair up when they forget
// to the same base shape, and positions are the shared base positions.
struct PullbackResult {
  OrnFam o1;
  OrnFam o2;
  CartMorphism m1;
  CartMorphism m2;
  Container apex;
  DescFam apex_desc;
  CartMorphism proj1;
  CartMorphism proj2;
  OrnFam proj1_orn;
  OrnFam proj2_orn;
};

namespace detail {

inline FinSetExpr paired_index(const FinSetExpr& a, const FinSetExpr& b, const FinFn& fa,
                               const FinFn& fb) {
  BranchMap<FinSetExpr> bs;
  for (const auto& i1 : enumerate(a)) {
    std::vector<Value> mates;
    for (const auto& i2 : enumerate(b))
      if (apply_fn(fb, i2) == apply_fn(fa, i1)) mates.push_back(i2);
    bs.emplace(i1, FinSetExpr::lit(std::move(mates)));
  }
  return FinSetExpr::dep_sum(a, std::move(bs));
}

}  // namespace detail

inline PullbackResult pullback_orn(const OrnFam& o1, const OrnFam& o2) {
  PullbackResult r;
  r.o1 = o1;
  r.o2 = o2;
  r.m1 = orn_to_cart(o1);
  r.m2 = orn_to_cart(o2);
  if (!container_equal(r.m1.tgt, r.m2.tgt))
    throw BaseMismatchError("pullback needs ornaments of one and the same base");

  r.apex.in_index = detail::paired_index(r.m1.src.in_index, r.m2.src.in_index, r.m1.u, r.m2.u);
  r.apex.out_index =
      detail::paired_index(r.m1.src.out_index, r.m2.src.out_index, r.m1.v, r.m2.v);

  for (const auto& jj : enumerate(r.apex.out_index)) {
    const Value& j1 = jj.first();
    const Value& j2 = jj.second();
    Value vj = apply_fn(r.m1.v, j1);
    std::vector<Value> shapes;
    BranchMap<FinSetExpr> pos;
    BranchMap<FinFn> nxt;
    BranchMap<Value> row1;
    BranchMap<Value> row2;
    for (const auto& sh1 : enumerate(r.m1.src.shape_set(j1))) {
      Value base_sh = r.m1.sigma_at(j1, sh1);
      for (const auto& sh2 : enumerate(r.m2.src.shape_set(j2))) {
        if (r.m2.sigma_at(j2, sh2) != base_sh) continue;
        Value sh = Value::pair(sh1, sh2);
        shapes.push_back(sh);
        const FinSetExpr& ps = r.m1.tgt.position_set(vj, base_sh);
        const FinFn& n1 = r.m1.src.next_fn(j1, sh1);
        const FinFn& n2 = r.m2.src.next_fn(j2, sh2);
        FinFn n{ps, r.apex.in_index, {}};
        for (const auto& p : enumerate(ps))
          n.table.emplace(p, Value::pair(apply_fn(n1, p), apply_fn(n2, p)));
        pos.emplace(sh, ps);
        nxt.emplace(sh, std::move(n));
        row1.emplace(sh, sh1);
        row2.emplace(sh, sh2);
      }
    }
    r.apex.shapes.emplace(jj, FinSetExpr::lit(std::move(shapes)));
    r.apex.positions.emplace(jj, std::move(pos));
    r.apex.next.emplace(jj, std::move(nxt));
    r.proj1.sigma.emplace(jj, std::move(row1));
    r.proj2.sigma.emplace(jj, std::move(row2));
  }

  r.proj1.src = r.apex;
  r.proj1.tgt = r.m1.src;
  r.proj1.u = make_fn(r.apex.in_index, r.m1.src.in_index,
                      [](const Value& ii) { return ii.first(); });
  r.proj1.v = make_fn(r.apex.out_index, r.m1.src.out_index,
                      [](const Value& jj) { return jj.first(); });
  r.proj2.src = r.apex;
  r.proj2.tgt = r.m2.src;
  r.proj2.u = make_fn(r.apex.in_index, r.m2.src.in_index,
                      [](const Value& ii) { return ii.second(); });
  r.proj2.v = make_fn(r.apex.out_index, r.m2.src.out_index,
                      [](const Value& jj) { return jj.second(); });

  r.apex_desc = container_to_desc(r.apex);
  r.proj1_orn = cart_to_orn(r.proj1);
  r.proj2_orn = cart_to_orn(r.proj2);
  return r;
}

struct PullbackReport {
  bool pass = true;
  bool commutes = true;
  bool universal = true;
  size_t trees_checked = 0;
  std::vector<CheckViolation> violations;

  void fail(std::string rule, std::string detail) {
    pass = false;
    violations.push_back({std::move(rule), std::move(detail)});
  }
};

// Brute-force verification of the pullback square: both projections are
// cartesian, the square commutes on morphisms and on every bounded tree,
// and the apex is universal (its shapes are exactly the agreeing pairs
// and its bounded fixpoint is in bijection with the fibre product of the
// refined fixpoints over the base).
inline PullbackReport check_pullback_square(const PullbackResult& r, int depth) {
  PullbackReport rep;

  for (const auto* mp : {&r.proj1, &r.proj2}) {
    CheckReport c = check_cartesian(*mp);
    if (!c.pass) {
      rep.fail("projection-cartesian", c.violations.front().rule + ": " +
                                            c.violations.front().detail);
      rep.commutes = false;
    }
  }
  if (!rep.pass) return rep;

  CartMorphism left = compose_cart(r.m1, r.proj1);
  CartMorphism right = compose_cart(r.m2, r.proj2);
  if (!fn_equal(left.u, right.u) || !fn_equal(left.v, right.v)) {
    rep.commutes = false;
    rep.fail("square-frames", "composite frame maps disagree");
  }
  for (const auto& jj : enumerate(r.apex.out_index))
    for (const auto& sh : enumerate(r.apex.shape_set(jj)))
      if (left.sigma_at(jj, sh) != right.sigma_at(jj, sh)) {
        rep.commutes = false;
        rep.fail("square-shapes", "composite shape maps disagree at " + jj.to_text() + ", " +
                                      sh.to_text());
      }

  DescFam src1_desc = container_to_desc(r.m1.src);
  DescFam src2_desc = container_to_desc(r.m2.src);
  auto apex_mu = mu_enumerate_all(r.apex_desc, depth);
  auto src1_mu = mu_enumerate_all(src1_desc, depth);
  auto src2_mu = mu_enumerate_all(src2_desc, depth);

  for (const auto& jj : enumerate(r.apex.out_index)) {
    const Value& j1 = jj.first();
    const Value& j2 = jj.second();

    std::vector<Value> expected;
    for (const auto& sh1 : enumerate(r.m1.src.shape_set(j1)))
      for (const auto& sh2 : enumerate(r.m2.src.shape_set(j2)))
        if (r.m1.sigma_at(j1, sh1) == r.m2.sigma_at(j2, sh2))
          expected.push_back(Value::pair(sh1, sh2));
    auto actual = enumerate(r.apex.shape_set(jj));
    if (actual != expected) {
      rep.universal = false;
      rep.fail("universal-shapes", "apex shapes at " + jj.to_text() +
                                       " are not the agreeing pairs");
    }

    std::set<Value, ValueLess> fibre_pairs;
    for (const auto& t1 : src1_mu.at(j1)) {
      Value f1 = cart_forget_tree(r.m1, j1, t1);
      for (const auto& t2 : src2_mu.at(j2))
        if (cart_forget_tree(r.m2, j2, t2) == f1)
          fibre_pairs.insert(Value::pair(t1, t2));
    }
    std::set<Value, ValueLess> image;
    for (const auto& t : apex_mu.at(jj)) {
      ++rep.trees_checked;
      Value t1 = cart_forget_tree(r.proj1, jj, t);
      Value t2 = cart_forget_tree(r.proj2, jj, t);
      if (cart_forget_tree(r.m1, j1, t1) != cart_forget_tree(r.m2, j2, t2)) {
        rep.commutes = false;
        rep.fail("square-trees", "projections of " + t.to_text() +
                                     " forget to different base trees");
      }
      if (!image.insert(Value::pair(t1, t2)).second) {
        rep.universal = false;
        rep.fail("universal-injective", "two apex trees project to one pair at " + jj.to_text());
      }
    }
    if (image != fibre_pairs) {
      rep.universal = false;
      rep.fail("universal-trees",
               "apex fixpoint at " + jj.to_text() + " has " + std::to_string(image.size()) +
                   " trees, fibre product has " + std::to_string(fibre_pairs.size()));
    }
  }
  return rep;
}

}  // namespace orn
