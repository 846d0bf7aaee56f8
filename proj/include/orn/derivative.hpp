#pragma once

#include <string>
#include <utility>
#include <vector>

#include "orn/container.hpp"
#include "orn/errors.hpp"
#include "orn/finset.hpp"
#include "orn/value.hpp"

namespace orn {

// The formal derivative of a container in the input direction i: a shape
// becomes a shape together with one of its positions over i (the hole),
// and the remaining positions keep their order and destinations.
inline Container derive_container(const Container& c, const Value& i) {
  if (!contains(c.in_index, i))
    throw DomainError("derivative direction outside the input index set: " + i.to_text());
  Container d{c.in_index, c.out_index, {}, {}, {}};
  for (const auto& j : enumerate(c.out_index)) {
    BranchMap<FinSetExpr> holes;
    BranchMap<FinSetExpr> pos;
    BranchMap<FinFn> nxt;
    for (const auto& sh : enumerate(c.shape_set(j))) {
      const FinFn& n = c.next_fn(j, sh);
      auto ps = enumerate(c.position_set(j, sh));
      std::vector<Value> over_i;
      for (const auto& p : ps)
        if (apply_fn(n, p) == i) over_i.push_back(p);
      holes.emplace(sh, FinSetExpr::lit(over_i));
      for (const auto& hole : over_i) {
        Value dsh = Value::pair(sh, hole);
        std::vector<Value> rest;
        for (const auto& p : ps)
          if (p != hole) rest.push_back(p);
        FinSetExpr rest_set = FinSetExpr::lit(rest);
        FinFn dn{rest_set, c.in_index, {}};
        for (const auto& p : rest) dn.table.emplace(p, apply_fn(n, p));
        pos.emplace(dsh, std::move(rest_set));
        nxt.emplace(dsh, std::move(dn));
      }
    }
    d.shapes.emplace(j, FinSetExpr::dep_sum(c.shape_set(j), std::move(holes)));
    d.positions.emplace(j, std::move(pos));
    d.next.emplace(j, std::move(nxt));
  }
  return d;
}

// A one-hole context: an element of the derivative's interpretation,
// parsed into its parts.
struct ZipperCtx {
  Value j;
  Value shape;
  Value hole;
  ValueMap rest;
};

inline ZipperCtx zipper_of(const Container& c, const Value& i, const Value& j, const Value& el) {
  if (!el.is(Value::Kind::Pair) || !el.first().is(Value::Kind::Pair))
    throw MalformedElementError("not a one-hole context: " + el.to_text());
  ZipperCtx z;
  z.j = j;
  z.shape = el.first().first();
  z.hole = el.first().second();
  const FinFn& n = c.next_fn(j, z.shape);
  if (apply_fn(n, z.hole) != i)
    throw MalformedElementError("hole does not sit over the derivative direction: " +
                                z.hole.to_text());
  std::vector<Value> rest;
  for (const auto& p : enumerate(c.position_set(j, z.shape)))
    if (p != z.hole) rest.push_back(p);
  auto parts = tuple_parts(el.second(), rest.size());
  for (size_t k = 0; k < rest.size(); ++k) z.rest.emplace(rest[k], parts[k]);
  return z;
}

// Fills the hole of a context with a payload, recovering an element of
// the original container's interpretation.
inline Value plug(const Container& c, const ZipperCtx& z, const Value& val) {
  std::vector<Value> payload;
  for (const auto& p : enumerate(c.position_set(z.j, z.shape))) {
    if (p == z.hole) {
      payload.push_back(val);
      continue;
    }
    auto it = z.rest.find(p);
    if (it == z.rest.end())
      throw MalformedElementError("context payload missing at position " + p.to_text());
    payload.push_back(it->second);
  }
  return Value::pair(z.shape, tuple_of(payload));
}

// Brute-force verification of the dissection law at one input direction:
// plugging is a bijection from (one-hole context, filler) pairs onto
// (element, position over i) pairs, at every output index.
inline CheckReport check_derivative(const Container& c, const Value& i, const Family& x) {
  CheckReport rep;
  Container d = derive_container(c, i);
  Family dx = interp_container(d, x);
  Family cx = interp_container(c, x);
  auto fillers = enumerate(x(i));
  for (const auto& j : enumerate(c.out_index)) {
    std::map<Value, Value, ValueLess> hit;
    for (const auto& del : enumerate(dx(j))) {
      ZipperCtx z = zipper_of(c, i, j, del);
      for (const auto& val : fillers) {
        Value whole = plug(c, z, val);
        if (!contains(cx(j), whole)) {
          rep.fail("plug-range", "plugged element escapes the interpretation at " + j.to_text() +
                                     ": " + whole.to_text());
          continue;
        }
        Value key = Value::pair(whole, z.hole);
        if (!hit.emplace(key, del).second)
          rep.fail("plug-injective", "two contexts plug to one element and hole at " +
                                         j.to_text() + ": " + key.to_text());
      }
    }
    size_t holes_total = 0;
    for (const auto& el : enumerate(cx(j))) {
      const Value& sh = el.first();
      const FinFn& n = c.next_fn(j, sh);
      for (const auto& p : enumerate(c.position_set(j, sh))) {
        if (apply_fn(n, p) != i) continue;
        ++holes_total;
        if (hit.find(Value::pair(el, p)) == hit.end())
          rep.fail("plug-surjective", "no context plugs to " + el.to_text() + " with hole " +
                                          p.to_text());
      }
    }
    if (hit.size() != holes_total)
      rep.fail("plug-count", "context-filler pairs at " + j.to_text() + ": " +
                                 std::to_string(hit.size()) + ", holes over the direction: " +
                                 std::to_string(holes_total));
  }
  return rep;
}

// Derivative of a cartesian morphism: differentiates source and target in
// matching directions and keeps the hole through the shape translation.
inline CartMorphism derive_cart(const CartMorphism& m, const Value& i) {
  CartMorphism d;
  d.src = derive_container(m.src, i);
  d.tgt = derive_container(m.tgt, apply_fn(m.u, i));
  d.u = m.u;
  d.v = m.v;
  for (const auto& j : enumerate(d.src.out_index)) {
    BranchMap<Value> row;
    for (const auto& dsh : enumerate(d.src.shape_set(j)))
      row.emplace(dsh, Value::pair(m.sigma_at(j, dsh.first()), dsh.second()));
    d.sigma.emplace(j, std::move(row));
  }
  return d;
}

}  // namespace orn
