#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "corpus.hpp"
#include "orn/pullback.hpp"

using namespace orn;
using namespace corpus;

TEST_CASE("lists pulled back with bounded indices give bounded lists") {
  PullbackResult r = pullback_orn(list_orn(), fin_orn(4));

  CHECK(validate_container(r.apex).empty());
  CHECK(validate_ornfam(r.proj1_orn).empty());
  CHECK(validate_ornfam(r.proj2_orn).empty());

  size_t expected[] = {0, 1, 3, 7};
  for (int n = 0; n < 4; ++n)
    CHECK(mu_enumerate(r.apex_desc, Value::pair(star(), Value::num(n)), 4).size() ==
          expected[n]);

  PullbackReport rep = check_pullback_square(r, 4);
  CAPTURE(rep.violations.empty() ? "" : rep.violations.front().rule + ": " +
                                            rep.violations.front().detail);
  CHECK(rep.pass);
  CHECK(rep.commutes);
  CHECK(rep.universal);
  CHECK(rep.trees_checked > 0);
}

TEST_CASE("bounded indices pulled back with themselves meet at the minimum") {
  PullbackResult r = pullback_orn(fin_orn(4), fin_orn(4));
  CHECK(check_pullback_square(r, 5).pass);
  for (int n = 0; n < 4; ++n)
    for (int m = 0; m < 4; ++m)
      CHECK(mu_enumerate(r.apex_desc, Value::pair(Value::num(n), Value::num(m)), 5).size() ==
            static_cast<size_t>(std::min(n, m)));
}

TEST_CASE("lists pulled back with lists pair equal skeletons") {
  PullbackResult r = pullback_orn(list_orn(), list_orn());
  CHECK(check_pullback_square(r, 4).pass);
  size_t expected[] = {1, 5, 21, 85};
  for (int d = 1; d <= 4; ++d)
    CHECK(mu_enumerate(r.apex_desc, Value::pair(star(), star()), d).size() ==
          expected[d - 1]);
}

TEST_CASE("vectors pulled back with themselves sit on the diagonal") {
  PullbackResult r = pullback_orn(vec_orn(3), vec_orn(3));
  CHECK(check_pullback_square(r, 4).pass);
  for (int n = 0; n < 3; ++n)
    for (int m = 0; m < 3; ++m) {
      size_t got =
          mu_enumerate(r.apex_desc, Value::pair(Value::num(n), Value::num(m)), 4).size();
      CHECK(got == (n == m ? size_t{1} << n : 0));
    }
}

TEST_CASE("pullbacks need a shared base") {
  CHECK_THROWS_AS(pullback_orn(list_orn(), vec_orn(3)), BaseMismatchError);
}

TEST_CASE("a tampered apex fails universality") {
  PullbackResult r = pullback_orn(list_orn(), fin_orn(3));
  Value jj = Value::pair(star(), Value::num(2));
  auto shapes = enumerate(r.apex.shape_set(jj));
  REQUIRE_FALSE(shapes.empty());
  shapes.pop_back();
  r.apex.shapes[jj] = FinSetExpr::lit(shapes);
  r.apex_desc = container_to_desc(r.apex);
  PullbackReport rep = check_pullback_square(r, 4);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.universal);
}
