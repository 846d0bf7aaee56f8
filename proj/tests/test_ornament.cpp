#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "corpus.hpp"
#include "orn/ornament.hpp"

using namespace orn;
using namespace corpus;

TEST_CASE("corpus ornaments are well formed and interpret as expected") {
  CHECK(validate_ornfam(list_orn()).empty());
  CHECK(validate_ornfam(vec_orn(4)).empty());
  CHECK(validate_ornfam(fin_orn(4)).empty());
  CHECK(validate_ornfam(height_orn(3)).empty());
  CHECK(validate_ornfam(identity_orn(nat_desc())).empty());

  CHECK(validate_descfam(interp_orn(vec_orn(4))).empty());
  CHECK(validate_descfam(interp_orn(fin_orn(4))).empty());
  CHECK(validate_descfam(interp_orn(height_orn(3))).empty());
}

TEST_CASE("misaligned ornaments are rejected") {
  OrnFam o = list_orn();
  o.at[star()] = OrnCode::ounit();
  CHECK_FALSE(validate_ornfam(o).empty());
  CHECK_THROWS_AS(interp_orn(o), AlignmentError);

  OrnFam bad_wit = vec_orn(3);
  bad_wit.at[Value::num(0)] = OrnCode::del(Value::label("bogus"), OrnCode::ounit());
  CHECK_FALSE(validate_ornfam(bad_wit).empty());

  OrnFam bad_idx = list_orn();
  BranchMap<OrnCode> cons;
  for (const auto& x : enumerate(ab_set()))
    cons.emplace(x, OrnCode::var_inv(Value::inv_wit(Value::label("elsewhere"))));
  BranchMap<OrnCode> bs;
  bs.emplace(Value::label("z"), OrnCode::ounit());
  bs.emplace(Value::label("s"), OrnCode::insert(ab_set(), std::move(cons)));
  bad_idx.at[star()] = OrnCode::osigma(std::move(bs));
  CHECK_FALSE(validate_ornfam(bad_idx).empty());
}

TEST_CASE("induced morphisms are cartesian") {
  for (const auto& o : {list_orn(), vec_orn(4), fin_orn(4), height_orn(3)}) {
    CartMorphism m = orn_to_cart(o);
    CheckReport r = check_cartesian(m);
    CAPTURE(r.pass ? "" : r.violations.front().detail);
    CHECK(r.pass);
  }
}

TEST_CASE("forgetting a list yields its length") {
  CHECK(forget(list_orn(), star(), list_tree({})) == nat_tree(0));
  CHECK(forget(list_orn(), star(), list_tree({"a", "b"})) == nat_tree(2));
  CHECK(forget(list_orn(), star(), list_tree({"b", "a", "b"})) == nat_tree(3));
}

TEST_CASE("forgetting a vector yields the list of its entries") {
  for (int n = 0; n < 4; ++n) {
    std::set<Value, ValueLess> images;
    for (const auto& t : mu_enumerate(vec_desc(4), Value::num(n), 5)) {
      Value back = forget(vec_orn(4), Value::num(n), t);
      CHECK(well_indexed(list_desc(), star(), back));
      Algebra len = length_algebra(list_desc(), 5);
      CHECK(fold(len, star(), back) == Value::num(n));
      images.insert(back);
    }
    CHECK(images.size() == (size_t{1} << n));
  }
}

TEST_CASE("forgetting a bounded index yields the numeral it names") {
  for (int n = 0; n < 4; ++n) {
    std::set<Value, ValueLess> images;
    for (const auto& t : mu_enumerate(fin_desc(4), Value::num(n), 5))
      images.insert(forget(fin_orn(4), Value::num(n), t));
    std::set<Value, ValueLess> expected;
    for (int k = 0; k < n; ++k) expected.insert(nat_tree(k));
    CHECK(images == expected);
  }
}

TEST_CASE("forgetting an exact height keeps depth and reaches every such tree") {
  for (int h = 0; h < 3; ++h) {
    std::set<Value, ValueLess> images;
    for (const auto& t : mu_enumerate(height_desc(3), Value::num(h), 4)) {
      Value back = forget(height_orn(3), Value::num(h), t);
      CHECK(well_indexed(tree_desc(), star(), back));
      CHECK(tree_depth(back) == static_cast<size_t>(h) + 1);
      images.insert(back);
    }
    size_t expected[] = {1, 1, 3};
    CHECK(images.size() == expected[h]);
  }
}

TEST_CASE("the identity ornament forgets nothing") {
  for (const auto& t : mu_enumerate(list_desc(), star(), 4))
    CHECK(forget(identity_orn(list_desc()), star(), t) == t);
}

TEST_CASE("reading an ornament back off its morphism preserves the fixpoint") {
  for (const auto& o : {list_orn(), vec_orn(3), fin_orn(3)}) {
    CartMorphism m = orn_to_cart(o);
    OrnFam back = cart_to_orn(m);
    CHECK(validate_ornfam(back).empty());
    DescFam round = interp_orn(back);
    auto direct = mu_enumerate_all(interp_orn(o), 4);
    auto through = mu_enumerate_all(round, 4);
    for (const auto& [i, ts] : direct) {
      REQUIRE(through.at(i).size() == ts.size());
      std::set<Value, ValueLess> have(through.at(i).begin(), through.at(i).end());
      for (const auto& t : ts) {
        Value w = psi_wrap_tree(m, i, normalize_mu(interp_orn(o), i, t));
        CHECK(have.count(w) == 1);
        CHECK(denormalize_mu(interp_orn(o), i,
                             psi_unwrap_tree(m, i, w)) == t);
      }
    }
  }
}

TEST_CASE("the two forgetful routes agree") {
  OrnFam o = vec_orn(4);
  CartMorphism m = orn_to_cart(o);
  OrnFam psi = cart_to_orn(m);
  DescFam refined = interp_orn(o);
  for (int n = 0; n < 4; ++n) {
    Value idx = Value::num(n);
    for (const auto& t : mu_enumerate(refined, idx, 5)) {
      Value nf = normalize_mu(refined, idx, t);
      Value via_cart =
          denormalize_mu(o.base, star(), cart_forget_tree(m, idx, nf));
      Value via_algebra = forget(o, idx, t);
      CHECK(via_cart == via_algebra);
      Value via_psi = forget(psi, idx, psi_wrap_tree(m, idx, nf));
      CHECK(denormalize_mu(o.base, star(), via_psi) == via_algebra);
    }
  }
}

TEST_CASE("the ornamental algebra needs one frame") {
  FinFn swap = make_fn(nat_lt(2), nat_lt(2),
                       [](const Value& v) { return Value::num(1 - nat_of(v)); });
  OrnFam crooked = reindex_orn(vec_desc(2), identity_fn(nat_lt(2)), swap);
  CHECK(validate_ornfam(crooked).empty());
  CHECK_THROWS_AS(ornamental_algebra(crooked, 3), FrameMismatchError);
}

TEST_CASE("vertical composition forgets in stages") {
  OrnFam vc = vcompose(vec_orn(4), list_orn());
  CHECK(validate_ornfam(vc).empty());

  CartMorphism m1 = orn_to_cart(list_orn());
  CartMorphism m2 = orn_to_cart(vec_orn(4));
  CartMorphism mc = compose_cart(m1, m2);
  DescFam refined = interp_orn(vec_orn(4));

  for (int n = 0; n < 4; ++n) {
    Value idx = Value::num(n);
    auto vecs = mu_enumerate(refined, idx, 5);
    CHECK(mu_enumerate(interp_orn(vc), idx, 5).size() == vecs.size());
    for (const auto& t : vecs) {
      Value wrapped = psi_wrap_tree(mc, idx, normalize_mu(refined, idx, t));
      Value once = forget(vc, idx, wrapped);
      Value staged = forget(list_orn(), star(), forget(vec_orn(4), idx, t));
      CHECK(denormalize_mu(nat_desc(), star(), once) == staged);
    }
  }

  CHECK_THROWS_AS(vcompose(list_orn(), list_orn()), BaseMismatchError);
}

TEST_CASE("horizontal composition spans the composite descriptions") {
  CartMorphism m = hcompose_cart(vec_orn(3), vec_orn(3));
  CHECK(check_cartesian(m).pass);
  OrnFam h = hcompose(vec_orn(3), vec_orn(3));
  CHECK(validate_ornfam(h).empty());

  auto composite = mu_enumerate_all(interp_orn(h), 5);
  size_t expected[] = {1, 2, 4};
  for (int n = 0; n < 3; ++n) CHECK(composite.at(Value::num(n)).size() == expected[n]);

  DescFam tgt = compose_desc(list_desc(), list_desc());
  for (int n = 0; n < 3; ++n) {
    Value idx = Value::num(n);
    for (const auto& t : mu_enumerate(container_to_desc(m.src), idx, 5)) {
      Value back = cart_forget_tree(m, idx, t);
      CHECK(well_indexed(container_to_desc(m.tgt), star(), back));
      CHECK(well_indexed(tgt, star(),
                         denormalize_mu(tgt, star(), back)));
    }
  }

  CHECK_THROWS_AS(hcompose(vec_orn(3), list_orn()), FrameMismatchError);
}

TEST_CASE("reindexing exhibits a description as an ornament of its pushforward") {
  FinFn tw = twice_fn(4);
  OrnFam ro = reindex_orn(vec_desc(4), tw, tw);
  CHECK(validate_ornfam(ro).empty());

  DescFam back = interp_orn(ro);
  auto orig = mu_enumerate_all(vec_desc(4), 5);
  auto through = mu_enumerate_all(back, 5);
  for (const auto& [i, ts] : orig) CHECK(through.at(i).size() == ts.size());

  for (int n = 0; n < 4; ++n) {
    Value idx = Value::num(n);
    for (const auto& t : mu_enumerate(back, idx, 5)) {
      Value moved = forget(ro, idx, t);
      CHECK(well_indexed(ro.base, Value::num(2 * n), moved));
    }
  }
}
