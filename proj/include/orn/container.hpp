#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "orn/desc.hpp"
#include "orn/errors.hpp"
#include "orn/finset.hpp"
#include "orn/value.hpp"

namespace orn {

// Indexed container: per output index a set of shapes, per shape a set of
// positions, and for every position the input index of the subobject
// sitting there. Interpretation: sum over shapes of the tuple of payloads.
struct Container {
  FinSetExpr in_index;
  FinSetExpr out_index;
  BranchMap<FinSetExpr> shapes;
  BranchMap<BranchMap<FinSetExpr>> positions;
  BranchMap<BranchMap<FinFn>> next;

  const FinSetExpr& shape_set(const Value& j) const {
    auto it = shapes.find(j);
    if (it == shapes.end())
      throw IndexMismatchError("container has no shapes at " + j.to_text());
    return it->second;
  }
  const FinSetExpr& position_set(const Value& j, const Value& sh) const {
    auto ji = positions.find(j);
    if (ji == positions.end())
      throw IndexMismatchError("container has no positions at " + j.to_text());
    auto si = ji->second.find(sh);
    if (si == ji->second.end())
      throw MalformedElementError("not a shape at " + j.to_text() + ": " + sh.to_text());
    return si->second;
  }
  const FinFn& next_fn(const Value& j, const Value& sh) const {
    auto ji = next.find(j);
    if (ji == next.end())
      throw IndexMismatchError("container has no next maps at " + j.to_text());
    auto si = ji->second.find(sh);
    if (si == ji->second.end())
      throw MalformedElementError("not a shape at " + j.to_text() + ": " + sh.to_text());
    return si->second;
  }
};

// A container morphism in the cartesian fragment: index frame maps u
// (inputs) and v (outputs), plus a shape translation. Position sets are
// required to enumerate equally across the morphism (the strictified
// pullback condition), so positions transport identically.
struct CartMorphism {
  Container src;
  Container tgt;
  FinFn u;
  FinFn v;
  BranchMap<BranchMap<Value>> sigma;

  const Value& sigma_at(const Value& j, const Value& sh) const {
    auto ji = sigma.find(j);
    if (ji == sigma.end())
      throw IndexMismatchError("morphism has no shape map at " + j.to_text());
    auto si = ji->second.find(sh);
    if (si == ji->second.end())
      throw MalformedElementError("shape map undefined at " + j.to_text() + ": " + sh.to_text());
    return si->second;
  }

  FinFn sigma_fn(const Value& j) const {
    FinFn f{src.shape_set(j), tgt.shape_set(apply_fn(v, j)), {}};
    for (const auto& sh : enumerate(f.dom)) f.table.emplace(sh, sigma_at(j, sh));
    return f;
  }
};

struct CheckViolation {
  std::string rule;
  std::string detail;
};

struct CheckReport {
  bool pass = true;
  std::vector<CheckViolation> violations;

  void fail(std::string rule, std::string detail) {
    pass = false;
    violations.push_back({std::move(rule), std::move(detail)});
  }
};

// Shapes of one code: everything but the recursive content of a node.
inline FinSetExpr code_shapes(const DescCode& c) {
  switch (c.kind()) {
    case DescCode::Kind::Var:
    case DescCode::Kind::One:
      return FinSetExpr::unit_set();
    case DescCode::Kind::Sigma:
    case DescCode::Kind::Pi: {
      BranchMap<FinSetExpr> bs;
      for (const auto& s : enumerate(c.set())) bs.emplace(s, code_shapes(c.branch(s)));
      return c.kind() == DescCode::Kind::Sigma ? FinSetExpr::dep_sum(c.set(), std::move(bs))
                                               : FinSetExpr::dep_prod(c.set(), std::move(bs));
    }
  }
  throw MalformedSetError("unreachable description kind");
}

// Positions of one code under a fixed shape: the recursive slots.
inline FinSetExpr code_positions(const DescCode& c, const Value& sh) {
  switch (c.kind()) {
    case DescCode::Kind::Var:
      return FinSetExpr::unit_set();
    case DescCode::Kind::One:
      return FinSetExpr::lit({});
    case DescCode::Kind::Sigma:
      return code_positions(c.branch(sh.first()), sh.second());
    case DescCode::Kind::Pi: {
      auto dom = enumerate(c.set());
      auto parts = tuple_parts(sh, dom.size());
      BranchMap<FinSetExpr> bs;
      for (size_t k = 0; k < dom.size(); ++k)
        bs.emplace(dom[k], code_positions(c.branch(dom[k]), parts[k]));
      return FinSetExpr::dep_sum(c.set(), std::move(bs));
    }
  }
  throw MalformedSetError("unreachable description kind");
}

// Input index seen through one position of a shaped code.
inline Value code_pos_index(const DescCode& c, const Value& sh, const Value& p) {
  switch (c.kind()) {
    case DescCode::Kind::Var:
      return c.idx();
    case DescCode::Kind::One:
      throw MalformedElementError("position into a payload-free code");
    case DescCode::Kind::Sigma:
      return code_pos_index(c.branch(sh.first()), sh.second(), p);
    case DescCode::Kind::Pi: {
      auto dom = enumerate(c.set());
      auto parts = tuple_parts(sh, dom.size());
      const Value& s = p.first();
      for (size_t k = 0; k < dom.size(); ++k)
        if (dom[k] == s) return code_pos_index(c.branch(s), parts[k], p.second());
      throw MalformedElementError("position tag outside tuple domain: " + s.to_text());
    }
  }
  throw MalformedSetError("unreachable description kind");
}

inline Container desc_to_container(const DescFam& d) {
  Container c{d.in_index, d.out_index, {}, {}, {}};
  for (const auto& j : enumerate(d.out_index)) {
    const DescCode& code = d.code_at(j);
    FinSetExpr shs = code_shapes(code);
    c.shapes.emplace(j, shs);
    BranchMap<FinSetExpr> pos;
    BranchMap<FinFn> nxt;
    for (const auto& sh : enumerate(shs)) {
      FinSetExpr ps = code_positions(code, sh);
      FinFn n{ps, d.in_index, {}};
      for (const auto& p : enumerate(ps)) n.table.emplace(p, code_pos_index(code, sh, p));
      pos.emplace(sh, std::move(ps));
      nxt.emplace(sh, std::move(n));
    }
    c.positions.emplace(j, std::move(pos));
    c.next.emplace(j, std::move(nxt));
  }
  return c;
}

// The normal form of a container as a description: choose a shape, then
// one recursive payload per position.
inline DescFam container_to_desc(const Container& c) {
  DescFam d{c.in_index, c.out_index, {}};
  for (const auto& j : enumerate(c.out_index)) {
    BranchMap<DescCode> shape_branches;
    for (const auto& sh : enumerate(c.shape_set(j))) {
      const FinSetExpr& ps = c.position_set(j, sh);
      const FinFn& n = c.next_fn(j, sh);
      BranchMap<DescCode> pos_branches;
      for (const auto& p : enumerate(ps)) pos_branches.emplace(p, DescCode::var(apply_fn(n, p)));
      shape_branches.emplace(sh, DescCode::pi(ps, std::move(pos_branches)));
    }
    d.at.emplace(j, DescCode::sigma(c.shape_set(j), std::move(shape_branches)));
  }
  return d;
}

inline Family interp_container(const Container& c, const Family& x) {
  if (!set_equal(c.in_index, x.index))
    throw IndexMismatchError("family index set does not match container input");
  Family out{c.out_index, {}};
  for (const auto& j : enumerate(c.out_index)) {
    BranchMap<FinSetExpr> bs;
    for (const auto& sh : enumerate(c.shape_set(j))) {
      const FinFn& n = c.next_fn(j, sh);
      BranchMap<FinSetExpr> payload;
      for (const auto& p : enumerate(c.position_set(j, sh)))
        payload.emplace(p, x(apply_fn(n, p)));
      bs.emplace(sh, FinSetExpr::dep_prod(c.position_set(j, sh), std::move(payload)));
    }
    out.at.emplace(j, FinSetExpr::dep_sum(c.shape_set(j), std::move(bs)));
  }
  return out;
}

inline std::vector<std::string> validate_container(const Container& c) {
  std::vector<std::string> bad;
  auto in_values = enumerate(c.in_index);
  for (const auto& j : enumerate(c.out_index)) {
    auto si = c.shapes.find(j);
    if (si == c.shapes.end()) {
      bad.push_back("no shapes at " + j.to_text());
      continue;
    }
    for (const auto& sh : enumerate(si->second)) {
      try {
        const FinFn& n = c.next_fn(j, sh);
        if (!set_equal(n.dom, c.position_set(j, sh)))
          bad.push_back("next map domain differs from positions at " + j.to_text());
        for (const auto& p : enumerate(c.position_set(j, sh))) {
          Value i = apply_fn(n, p);
          if (std::find(in_values.begin(), in_values.end(), i) == in_values.end())
            bad.push_back("next index outside input set: " + i.to_text());
        }
      } catch (const EngineError& e) {
        bad.push_back(e.what());
      }
    }
  }
  return bad;
}

// Element bijection between a code's interpretation payloads and the
// container normal form Pair(shape, ordered tuple of position payloads).
inline void split_payload(const DescCode& c, const Value& v, Value& shape,
                          std::vector<Value>& ps) {
  switch (c.kind()) {
    case DescCode::Kind::Var:
      shape = Value::unit();
      ps.push_back(v);
      return;
    case DescCode::Kind::One:
      shape = Value::unit();
      return;
    case DescCode::Kind::Sigma: {
      Value inner;
      split_payload(c.branch(v.first()), v.second(), inner, ps);
      shape = Value::pair(v.first(), inner);
      return;
    }
    case DescCode::Kind::Pi: {
      auto dom = enumerate(c.set());
      auto parts = tuple_parts(v, dom.size());
      std::vector<Value> shapes;
      for (size_t k = 0; k < dom.size(); ++k) {
        Value inner;
        split_payload(c.branch(dom[k]), parts[k], inner, ps);
        shapes.push_back(inner);
      }
      shape = tuple_of(shapes);
      return;
    }
  }
}

inline Value to_container_value(const DescCode& c, const Value& v) {
  Value shape;
  std::vector<Value> ps;
  split_payload(c, v, shape, ps);
  return Value::pair(shape, tuple_of(ps));
}

inline Value join_payload(const DescCode& c, const Value& shape,
                          const std::vector<Value>& ps, size_t& cursor) {
  switch (c.kind()) {
    case DescCode::Kind::Var: {
      if (cursor >= ps.size())
        throw MalformedElementError("container element with too few position payloads");
      return ps[cursor++];
    }
    case DescCode::Kind::One:
      return Value::unit();
    case DescCode::Kind::Sigma:
      return Value::pair(shape.first(),
                         join_payload(c.branch(shape.first()), shape.second(), ps, cursor));
    case DescCode::Kind::Pi: {
      auto dom = enumerate(c.set());
      auto parts = tuple_parts(shape, dom.size());
      std::vector<Value> out;
      for (size_t k = 0; k < dom.size(); ++k)
        out.push_back(join_payload(c.branch(dom[k]), parts[k], ps, cursor));
      return tuple_of(out);
    }
  }
  throw MalformedSetError("unreachable description kind");
}

inline Value from_container_value(const DescCode& c, const Value& el) {
  const Value& shape = el.first();
  std::vector<Value> ps = tuple_parts(el.second(), count(code_positions(c, shape)));
  size_t cursor = 0;
  Value out = join_payload(c, shape, ps, cursor);
  if (cursor != ps.size())
    throw MalformedElementError("container element with too many position payloads");
  return out;
}

// Transports an interpretation element across a cartesian morphism:
// identity on the payload tuple, since position sets enumerate equally.
inline Value apply_cart(const CartMorphism& m, const Value& j, const Value& el) {
  if (!el.is(Value::Kind::Pair))
    throw MalformedElementError("container element must pair a shape with payloads");
  const Value& sh = el.first();
  if (!contains(m.src.shape_set(j), sh))
    throw MalformedElementError("shape outside the source container: " + sh.to_text());
  auto src_ps = enumerate(m.src.position_set(j, sh));
  std::vector<Value> payload = tuple_parts(el.second(), src_ps.size());
  const Value& tsh = m.sigma_at(j, sh);
  auto tgt_ps = enumerate(m.tgt.position_set(apply_fn(m.v, j), tsh));
  if (src_ps != tgt_ps)
    throw NotCartesianError("position sets differ across the morphism at " + j.to_text());
  return Value::pair(tsh, tuple_of(payload));
}

// Verifies the cartesian-morphism laws: frame maps typed by the index
// sets, total shape translation, equal position enumerations, and
// coherence of next maps through u.
inline CheckReport check_cartesian(const CartMorphism& m) {
  CheckReport r;
  if (!set_equal(m.u.dom, m.src.in_index) || !set_equal(m.u.cod, m.tgt.in_index))
    r.fail("frame", "input frame map is not typed src.in -> tgt.in");
  if (!set_equal(m.v.dom, m.src.out_index) || !set_equal(m.v.cod, m.tgt.out_index))
    r.fail("frame", "output frame map is not typed src.out -> tgt.out");
  if (!r.pass) return r;
  for (const auto& j : enumerate(m.src.out_index)) {
    Value vj = apply_fn(m.v, j);
    for (const auto& sh : enumerate(m.src.shape_set(j))) {
      Value tsh;
      try {
        tsh = m.sigma_at(j, sh);
      } catch (const EngineError&) {
        r.fail("sigma-total", "no shape image at " + j.to_text() + ", " + sh.to_text());
        continue;
      }
      if (!contains(m.tgt.shape_set(vj), tsh)) {
        r.fail("sigma-image",
               "shape image outside target at " + j.to_text() + ": " + tsh.to_text());
        continue;
      }
      auto sp = enumerate(m.src.position_set(j, sh));
      auto tp = enumerate(m.tgt.position_set(vj, tsh));
      if (sp != tp) {
        r.fail("rho", "position sets differ at " + j.to_text() + ", " + sh.to_text());
        continue;
      }
      const FinFn& ns = m.src.next_fn(j, sh);
      const FinFn& nt = m.tgt.next_fn(vj, tsh);
      for (const auto& p : sp) {
        if (apply_fn(m.u, apply_fn(ns, p)) != apply_fn(nt, p))
          r.fail("q-coherence", "next maps disagree at " + j.to_text() + ", " + sh.to_text() +
                                    ", position " + p.to_text());
      }
    }
  }
  return r;
}

inline bool container_equal(const Container& a, const Container& b) {
  if (!set_equal(a.in_index, b.in_index) || !set_equal(a.out_index, b.out_index)) return false;
  for (const auto& j : enumerate(a.out_index)) {
    if (!set_equal(a.shape_set(j), b.shape_set(j))) return false;
    for (const auto& sh : enumerate(a.shape_set(j))) {
      if (!set_equal(a.position_set(j, sh), b.position_set(j, sh))) return false;
      if (!fn_equal(a.next_fn(j, sh), b.next_fn(j, sh))) return false;
    }
  }
  return true;
}

inline CartMorphism identity_cart(const Container& c) {
  CartMorphism m{c, c, identity_fn(c.in_index), identity_fn(c.out_index), {}};
  for (const auto& j : enumerate(c.out_index)) {
    BranchMap<Value> row;
    for (const auto& sh : enumerate(c.shape_set(j))) row.emplace(sh, sh);
    m.sigma.emplace(j, std::move(row));
  }
  return m;
}

// Composition m1 after m2; the middle containers must agree on the nose.
inline CartMorphism compose_cart(const CartMorphism& m1, const CartMorphism& m2) {
  if (!container_equal(m2.tgt, m1.src))
    throw BaseMismatchError("morphism composition: middle containers differ");
  CartMorphism m{m2.src, m1.tgt, compose_fn(m1.u, m2.u), compose_fn(m1.v, m2.v), {}};
  for (const auto& j : enumerate(m2.src.out_index)) {
    Value vj = apply_fn(m2.v, j);
    BranchMap<Value> row;
    for (const auto& sh : enumerate(m2.src.shape_set(j)))
      row.emplace(sh, m1.sigma_at(vj, m2.sigma_at(j, sh)));
    m.sigma.emplace(j, std::move(row));
  }
  return m;
}

// Tree conversions between the two fixpoint presentations of one
// description: payload form (over d itself) and container normal form
// (over container_to_desc(desc_to_container(d))).
inline Value normalize_mu(const DescFam& d, const Value& i, const Value& t) {
  if (!t.is(Value::Kind::Con))
    throw MalformedElementError("not a fixpoint tree: " + t.to_text());
  const DescCode& code = d.code_at(i);
  Value shape;
  std::vector<Value> ps;
  split_payload(code, t.arg(), shape, ps);
  auto pos = enumerate(code_positions(code, shape));
  for (size_t k = 0; k < ps.size(); ++k)
    ps[k] = normalize_mu(d, code_pos_index(code, shape, pos[k]), ps[k]);
  return Value::con(Value::pair(shape, tuple_of(ps)));
}

inline Value denormalize_mu(const DescFam& d, const Value& i, const Value& t) {
  if (!t.is(Value::Kind::Con))
    throw MalformedElementError("not a fixpoint tree: " + t.to_text());
  const DescCode& code = d.code_at(i);
  const Value& shape = t.arg().first();
  auto pos = enumerate(code_positions(code, shape));
  std::vector<Value> ps = tuple_parts(t.arg().second(), pos.size());
  for (size_t k = 0; k < pos.size(); ++k)
    ps[k] = denormalize_mu(d, code_pos_index(code, shape, pos[k]), ps[k]);
  size_t cursor = 0;
  Value payload = join_payload(code, shape, ps, cursor);
  return Value::con(payload);
}

// Folds a cartesian morphism over container-form trees: relabels every
// node's shape through sigma, keeping the position tuple.
inline Value cart_forget_tree(const CartMorphism& m, const Value& j, const Value& t) {
  if (!t.is(Value::Kind::Con))
    throw MalformedElementError("not a fixpoint tree: " + t.to_text());
  const Value& sh = t.arg().first();
  auto pos = enumerate(m.src.position_set(j, sh));
  std::vector<Value> ps = tuple_parts(t.arg().second(), pos.size());
  const FinFn& n = m.src.next_fn(j, sh);
  for (size_t k = 0; k < pos.size(); ++k)
    ps[k] = cart_forget_tree(m, apply_fn(n, pos[k]), ps[k]);
  return Value::con(Value::pair(m.sigma_at(j, sh), tuple_of(ps)));
}

}  // namespace orn
