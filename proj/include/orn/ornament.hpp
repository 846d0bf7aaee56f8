#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "orn/container.hpp"
#include "orn/desc.hpp"
#include "orn/errors.hpp"
#include "orn/finset.hpp"
#include "orn/value.hpp"

namespace orn {

// Code describing how one datatype refines another, aligned node by node
// with the base description it ornaments:
//
//   Insert(S, T)    new data: choose s in S, continue as T(s) on the same base
//   Delete(w, T)    a base choice fixed to witness w; T ornaments that branch
//   VarInv(w)       a recursive slot, refined to the index wrapped by w
//   OUnit           copies One
//   OSigma(T)       copies a choice, branch by branch
//   OPi(T)          copies a tuple, branch by branch
class OrnCode {
 public:
  enum class Kind { Insert, Delete, VarInv, OUnit, OSigma, OPi };

  OrnCode() : OrnCode(ounit()) {}

  static OrnCode insert(FinSetExpr s, BranchMap<OrnCode> branches) {
    Node n;
    n.kind = Kind::Insert;
    n.set = std::move(s);
    n.branches = std::move(branches);
    return make(std::move(n));
  }
  static OrnCode del(Value witness, OrnCode rest) {
    Node n;
    n.kind = Kind::Delete;
    n.wit = std::move(witness);
    n.child.push_back(std::move(rest));
    return make(std::move(n));
  }
  static OrnCode var_inv(Value witness) {
    Node n;
    n.kind = Kind::VarInv;
    n.wit = std::move(witness);
    return make(std::move(n));
  }
  static OrnCode ounit() {
    Node n;
    n.kind = Kind::OUnit;
    return make(std::move(n));
  }
  static OrnCode osigma(BranchMap<OrnCode> branches) {
    Node n;
    n.kind = Kind::OSigma;
    n.branches = std::move(branches);
    return make(std::move(n));
  }
  static OrnCode opi(BranchMap<OrnCode> branches) {
    Node n;
    n.kind = Kind::OPi;
    n.branches = std::move(branches);
    return make(std::move(n));
  }

  Kind kind() const { return node_->kind; }
  const FinSetExpr& set() const { return node_->set; }
  const Value& witness() const { return node_->wit; }
  const BranchMap<OrnCode>& branches() const { return node_->branches; }
  const OrnCode& rest() const { return node_->child[0]; }

  const OrnCode& branch(const Value& v) const {
    auto it = node_->branches.find(v);
    if (it == node_->branches.end())
      throw AlignmentError("ornament branch missing at " + v.to_text());
    return it->second;
  }

 private:
  struct Node {
    Kind kind;
    FinSetExpr set;
    Value wit;
    BranchMap<OrnCode> branches;
    std::vector<OrnCode> child;
  };

  explicit OrnCode(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static OrnCode make(Node n) { return OrnCode(std::make_shared<const Node>(std::move(n))); }

  std::shared_ptr<const Node> node_;
};

// An ornament of a base description family: frame maps u (inputs) and v
// (outputs) into the base index sets, and per refined output index j a
// code aligned with the base code at v(j).
struct OrnFam {
  DescFam base;
  FinFn u;
  FinFn v;
  BranchMap<OrnCode> at;

  const OrnCode& orn_at(const Value& j) const {
    auto it = at.find(j);
    if (it == at.end())
      throw IndexMismatchError("ornament has no code at " + j.to_text());
    return it->second;
  }
};

inline void validate_orn_code(const OrnFam& o, const OrnCode& oc, const DescCode& base,
                              std::vector<std::string>& bad) {
  switch (oc.kind()) {
    case OrnCode::Kind::OUnit:
      if (base.kind() != DescCode::Kind::One) bad.push_back("copied unit over a non-unit code");
      return;
    case OrnCode::Kind::VarInv: {
      if (base.kind() != DescCode::Kind::Var) {
        bad.push_back("refined slot over a non-recursive code");
        return;
      }
      const Value& w = oc.witness();
      if (!w.is(Value::Kind::InvWit)) {
        bad.push_back("refined slot witness is not a preimage witness: " + w.to_text());
        return;
      }
      if (!contains(o.u.dom, w.arg())) {
        bad.push_back("refined index outside the input index set: " + w.arg().to_text());
        return;
      }
      if (apply_fn(o.u, w.arg()) != base.idx())
        bad.push_back("refined index maps to " + apply_fn(o.u, w.arg()).to_text() +
                      ", expected " + base.idx().to_text());
      return;
    }
    case OrnCode::Kind::OSigma:
    case OrnCode::Kind::OPi: {
      auto want =
          oc.kind() == OrnCode::Kind::OSigma ? DescCode::Kind::Sigma : DescCode::Kind::Pi;
      if (base.kind() != want) {
        bad.push_back("copied node does not match the base code");
        return;
      }
      for (const auto& s : enumerate(base.set())) {
        auto it = oc.branches().find(s);
        if (it == oc.branches().end()) {
          bad.push_back("ornament branch table missing entry at " + s.to_text());
          continue;
        }
        validate_orn_code(o, it->second, base.branch(s), bad);
      }
      return;
    }
    case OrnCode::Kind::Insert: {
      for (const auto& s : enumerate(oc.set())) {
        auto it = oc.branches().find(s);
        if (it == oc.branches().end()) {
          bad.push_back("inserted branch table missing entry at " + s.to_text());
          continue;
        }
        validate_orn_code(o, it->second, base, bad);
      }
      return;
    }
    case OrnCode::Kind::Delete: {
      if (base.kind() != DescCode::Kind::Sigma) {
        bad.push_back("deleted choice over a non-choice code");
        return;
      }
      if (!contains(base.set(), oc.witness())) {
        bad.push_back("deleted witness outside the base choice set: " + oc.witness().to_text());
        return;
      }
      validate_orn_code(o, oc.rest(), base.branch(oc.witness()), bad);
      return;
    }
  }
}

inline std::vector<std::string> validate_ornfam(const OrnFam& o) {
  std::vector<std::string> bad;
  if (!set_equal(o.u.cod, o.base.in_index))
    bad.push_back("input frame map does not land in the base input index set");
  if (!set_equal(o.v.cod, o.base.out_index))
    bad.push_back("output frame map does not land in the base output index set");
  if (!bad.empty()) return bad;
  for (const auto& j : enumerate(o.v.dom)) {
    auto it = o.at.find(j);
    if (it == o.at.end()) {
      bad.push_back("no ornament code at index " + j.to_text());
      continue;
    }
    validate_orn_code(o, it->second, o.base.code_at(apply_fn(o.v, j)), bad);
  }
  return bad;
}

// The refined description an ornament denotes.
inline DescCode interp_orn_code(const OrnFam& o, const OrnCode& oc, const DescCode& base) {
  switch (oc.kind()) {
    case OrnCode::Kind::OUnit:
      if (base.kind() != DescCode::Kind::One)
        throw AlignmentError("copied unit over a non-unit code");
      return DescCode::one();
    case OrnCode::Kind::VarInv: {
      if (base.kind() != DescCode::Kind::Var)
        throw AlignmentError("refined slot over a non-recursive code");
      const Value& w = oc.witness();
      if (!w.is(Value::Kind::InvWit) || apply_fn(o.u, w.arg()) != base.idx())
        throw AlignmentError("refined slot witness outside the fibre: " + w.to_text());
      return DescCode::var(w.arg());
    }
    case OrnCode::Kind::OSigma:
    case OrnCode::Kind::OPi: {
      auto want =
          oc.kind() == OrnCode::Kind::OSigma ? DescCode::Kind::Sigma : DescCode::Kind::Pi;
      if (base.kind() != want) throw AlignmentError("copied node does not match the base code");
      BranchMap<DescCode> bs;
      for (const auto& s : enumerate(base.set()))
        bs.emplace(s, interp_orn_code(o, oc.branch(s), base.branch(s)));
      return oc.kind() == OrnCode::Kind::OSigma ? DescCode::sigma(base.set(), std::move(bs))
                                                : DescCode::pi(base.set(), std::move(bs));
    }
    case OrnCode::Kind::Insert: {
      BranchMap<DescCode> bs;
      for (const auto& s : enumerate(oc.set()))
        bs.emplace(s, interp_orn_code(o, oc.branch(s), base));
      return DescCode::sigma(oc.set(), std::move(bs));
    }
    case OrnCode::Kind::Delete: {
      if (base.kind() != DescCode::Kind::Sigma)
        throw AlignmentError("deleted choice over a non-choice code");
      if (!contains(base.set(), oc.witness()))
        throw AlignmentError("deleted witness outside the base choice set");
      return interp_orn_code(o, oc.rest(), base.branch(oc.witness()));
    }
  }
  throw AlignmentError("unreachable ornament kind");
}

inline DescFam interp_orn(const OrnFam& o) {
  DescFam d{o.u.dom, o.v.dom, {}};
  for (const auto& j : enumerate(o.v.dom))
    d.at.emplace(j, interp_orn_code(o, o.orn_at(j), o.base.code_at(apply_fn(o.v, j))));
  return d;
}

// Shape-level forgetful translation: drops inserted data, reinstates
// deleted witnesses, and hands refined recursive slots to `leaf`.
inline Value forget_shape(const OrnCode& oc, const DescCode& base, const Value& sh,
                          const std::function<Value(const Value&, const Value&)>& leaf) {
  switch (oc.kind()) {
    case OrnCode::Kind::OUnit:
      return Value::unit();
    case OrnCode::Kind::VarInv:
      return leaf(oc.witness().arg(), sh);
    case OrnCode::Kind::OSigma:
      return Value::pair(sh.first(),
                         forget_shape(oc.branch(sh.first()), base.branch(sh.first()),
                                      sh.second(), leaf));
    case OrnCode::Kind::OPi: {
      auto dom = enumerate(base.set());
      auto parts = tuple_parts(sh, dom.size());
      for (size_t k = 0; k < dom.size(); ++k)
        parts[k] = forget_shape(oc.branch(dom[k]), base.branch(dom[k]), parts[k], leaf);
      return tuple_of(parts);
    }
    case OrnCode::Kind::Insert:
      return forget_shape(oc.branch(sh.first()), base, sh.second(), leaf);
    case OrnCode::Kind::Delete:
      return Value::pair(oc.witness(),
                         forget_shape(oc.rest(), base.branch(oc.witness()), sh, leaf));
  }
  throw AlignmentError("unreachable ornament kind");
}

// The cartesian morphism an ornament induces, from the refined container
// to the base container.
inline CartMorphism orn_to_cart(const OrnFam& o) {
  DescFam refined = interp_orn(o);
  CartMorphism m{desc_to_container(refined), desc_to_container(o.base), o.u, o.v, {}};
  auto unit_leaf = [](const Value&, const Value&) { return Value::unit(); };
  for (const auto& j : enumerate(refined.out_index)) {
    const OrnCode& oc = o.orn_at(j);
    const DescCode& base = o.base.code_at(apply_fn(o.v, j));
    BranchMap<Value> row;
    for (const auto& sh : enumerate(m.src.shape_set(j)))
      row.emplace(sh, forget_shape(oc, base, sh, unit_leaf));
    m.sigma.emplace(j, std::move(row));
  }
  return m;
}

// Reads an ornament back off a cartesian morphism, over the normal form
// of the target container: per target shape, insert the fibre of the
// shape translation, then copy every position with its refined index.
inline OrnFam cart_to_orn(const CartMorphism& m) {
  CheckReport r = check_cartesian(m);
  if (!r.pass)
    throw NotCartesianError("cannot read an ornament off a non-cartesian morphism: " +
                            r.violations.front().detail);
  OrnFam o{container_to_desc(m.tgt), m.u, m.v, {}};
  for (const auto& j : enumerate(m.src.out_index)) {
    Value vj = apply_fn(m.v, j);
    FinFn sf = m.sigma_fn(j);
    BranchMap<OrnCode> shape_branches;
    for (const auto& sh : enumerate(m.tgt.shape_set(vj))) {
      FinSetExpr fib = inverse_image(sf, sh);
      BranchMap<OrnCode> wit_branches;
      for (const auto& w : enumerate(fib)) {
        const FinFn& n_src = m.src.next_fn(j, w.arg());
        BranchMap<OrnCode> pos_branches;
        for (const auto& p : enumerate(m.tgt.position_set(vj, sh)))
          pos_branches.emplace(p, OrnCode::var_inv(Value::inv_wit(apply_fn(n_src, p))));
        wit_branches.emplace(w, OrnCode::opi(std::move(pos_branches)));
      }
      shape_branches.emplace(sh, OrnCode::insert(fib, std::move(wit_branches)));
    }
    o.at.emplace(j, OrnCode::osigma(std::move(shape_branches)));
  }
  return o;
}

// The forgetful algebra of an ornament: carrier the bounded base
// fixpoint, action the induced morphism followed by the constructor.
// Requires matching input and output frames, so the carrier component
// and the landing index of the action agree.
inline Algebra ornamental_algebra(const OrnFam& o, int depth) {
  if (!fn_equal(o.u, o.v))
    throw FrameMismatchError("ornamental algebra needs equal input and output frame maps");
  DescFam refined = interp_orn(o);
  if (!is_endo(refined))
    throw FrameMismatchError("ornamental algebra needs an endo-indexed refinement");
  if (!is_endo(o.base))
    throw FrameMismatchError("ornamental algebra needs an endo-indexed base");
  CartMorphism m = orn_to_cart(o);
  Family base_mu = mu_family(o.base, depth);
  Algebra a;
  a.desc = refined;
  a.carrier = make_family(refined.out_index,
                          [&](const Value& i) { return base_mu(apply_fn(o.u, i)); });
  Family layer = interp_desc(refined, a.carrier);
  for (const auto& i : enumerate(refined.out_index)) {
    Value vi = apply_fn(o.v, i);
    FinFn fn{layer(i), a.carrier(i), {}};
    for (const auto& el : enumerate(layer(i))) {
      Value moved = apply_cart(m, i, to_container_value(refined.code_at(i), el));
      Value t = Value::con(from_container_value(o.base.code_at(vi), moved));
      if (tree_depth(t) <= static_cast<size_t>(depth)) fn.table.emplace(el, t);
    }
    a.table.emplace(i, std::move(fn));
  }
  return a;
}

// Forgets the refinement of one tree: the fold of the ornamental algebra,
// bounded by the tree's own depth.
inline Value forget(const OrnFam& o, const Value& j, const Value& t) {
  return fold(ornamental_algebra(o, static_cast<int>(tree_depth(t))), j, t);
}

inline OrnCode copy_code(const DescCode& c) {
  switch (c.kind()) {
    case DescCode::Kind::Var:
      return OrnCode::var_inv(Value::inv_wit(c.idx()));
    case DescCode::Kind::One:
      return OrnCode::ounit();
    case DescCode::Kind::Sigma:
    case DescCode::Kind::Pi: {
      BranchMap<OrnCode> bs;
      for (const auto& [k, b] : c.branches()) bs.emplace(k, copy_code(b));
      return c.kind() == DescCode::Kind::Sigma ? OrnCode::osigma(std::move(bs))
                                               : OrnCode::opi(std::move(bs));
    }
  }
  throw MalformedSetError("unreachable description kind");
}

// The identity ornament: copies the code, refining nothing.
inline OrnFam identity_orn(const DescFam& d) {
  OrnFam o{d, identity_fn(d.in_index), identity_fn(d.out_index), {}};
  for (const auto& j : enumerate(d.out_index)) o.at.emplace(j, copy_code(d.code_at(j)));
  return o;
}

// Vertical composition through the container detour: compose the two
// induced morphisms, then read the ornament back.
inline OrnFam vcompose(const OrnFam& o2, const OrnFam& o1) {
  CartMorphism m1 = orn_to_cart(o1);
  CartMorphism m2 = orn_to_cart(o2);
  if (!container_equal(m2.tgt, m1.src))
    throw BaseMismatchError("vertical composition: the outer base must be the inner refinement");
  return cart_to_orn(compose_cart(m1, m2));
}

// Horizontal composition: a cartesian morphism between the composite
// containers, built by translating composite shapes leafwise through the
// inner ornament's shape maps.
inline CartMorphism hcompose_cart(const OrnFam& o2, const OrnFam& o1) {
  if (!fn_equal(o2.u, o1.v))
    throw FrameMismatchError("horizontal composition: middle frames disagree");
  DescFam f2 = interp_orn(o2);
  DescFam f1 = interp_orn(o1);
  DescFam src_desc = compose_desc(f2, f1);
  DescFam tgt_desc = compose_desc(o2.base, o1.base);
  CartMorphism m1 = orn_to_cart(o1);
  CartMorphism m{desc_to_container(src_desc), desc_to_container(tgt_desc), o1.u, o2.v, {}};
  auto inner_leaf = [&](const Value& j1, const Value& sh) { return m1.sigma_at(j1, sh); };
  for (const auto& j : enumerate(src_desc.out_index)) {
    const OrnCode& oc = o2.orn_at(j);
    const DescCode& base = o2.base.code_at(apply_fn(o2.v, j));
    BranchMap<Value> row;
    for (const auto& sh : enumerate(m.src.shape_set(j)))
      row.emplace(sh, forget_shape(oc, base, sh, inner_leaf));
    m.sigma.emplace(j, std::move(row));
  }
  return m;
}

inline OrnFam hcompose(const OrnFam& o2, const OrnFam& o1) {
  return cart_to_orn(hcompose_cart(o2, o1));
}

// Reindexing along (u, v): exhibits d as an ornament of its cobase
// change. At each original index, delete the fibre choice down to that
// index's own witness and copy the code, refining every slot back to its
// original input index.
inline OrnFam reindex_orn(const DescFam& d, const FinFn& u, const FinFn& v) {
  OrnFam o{cobase_change(d, u, v), u, v, {}};
  for (const auto& j : enumerate(v.dom))
    o.at.emplace(j, OrnCode::del(Value::inv_wit(j), copy_code(d.code_at(j))));
  return o;
}

// Bridges between container-form trees over m.src and trees of the
// description that cart_to_orn(m) denotes (whose nodes additionally
// record the target shape and the fibre witness).
inline Value psi_wrap_tree(const CartMorphism& m, const Value& j, const Value& t) {
  const Value& sh = t.arg().first();
  auto pos = enumerate(m.src.position_set(j, sh));
  std::vector<Value> ps = tuple_parts(t.arg().second(), pos.size());
  const FinFn& n = m.src.next_fn(j, sh);
  for (size_t k = 0; k < pos.size(); ++k)
    ps[k] = psi_wrap_tree(m, apply_fn(n, pos[k]), ps[k]);
  return Value::con(Value::pair(
      m.sigma_at(j, sh), Value::pair(Value::inv_wit(sh), tuple_of(ps))));
}

inline Value psi_unwrap_tree(const CartMorphism& m, const Value& j, const Value& t) {
  const Value& sh = t.arg().second().first().arg();
  auto pos = enumerate(m.src.position_set(j, sh));
  std::vector<Value> ps = tuple_parts(t.arg().second().second(), pos.size());
  const FinFn& n = m.src.next_fn(j, sh);
  for (size_t k = 0; k < pos.size(); ++k)
    ps[k] = psi_unwrap_tree(m, apply_fn(n, pos[k]), ps[k]);
  return Value::con(Value::pair(sh, tuple_of(ps)));
}

}  // namespace orn
