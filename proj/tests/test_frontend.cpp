#include <catch2/catch_amalgamated.hpp>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "orn/session.hpp"

using namespace orn;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

const char* kPrelude = R"(
(set star (enum star))
(set ab (enum a b))
(fn idstar star star ((star star)))
(desc NatD star star ((star (sigma (enum z s) ((z one) (s (var star)))))))
(desc ListA star star ((star (sigma (enum z s) ((z one) (s (sigma ab ((a (var star)) (b (var star))))))))))
(orn ListOrn NatD idstar idstar ((star (sigma ((z one) (s (insert ab ((a (var-inv (inv-wit star))) (b (var-inv (inv-wit star)))))))))))
)";

const char* kLengthAlg = R"(
(alg lengthAlg ListA ((star (nat< 4))) ((star (
  ((pair z unit) (num 0))
  ((pair s (pair a (num 0))) (num 1)) ((pair s (pair a (num 1))) (num 2)) ((pair s (pair a (num 2))) (num 3))
  ((pair s (pair b (num 0))) (num 1)) ((pair s (pair b (num 1))) (num 2)) ((pair s (pair b (num 2))) (num 3))))))
)";

std::string head_of(const Record& rec) {
  const std::string& cmd = rec.at("cmd").get_ref<const std::string&>();
  size_t sp = cmd.find(' ');
  return cmd.substr(1, sp - 1);
}

}  // namespace

TEST_CASE("the reader tracks positions and skips comments") {
  auto forms = read_forms("; a comment\n(set x (enum a b)) ; trailing\n  (fn f x x ((a a) (b b)))");
  REQUIRE(forms.size() == 2);
  CHECK(forms[0].line == 2);
  CHECK(forms[0].column == 1);
  CHECK(forms[1].line == 3);
  CHECK(forms[1].column == 3);
  CHECK(forms[0].to_text() == "(set x (enum a b))");

  CHECK_THROWS_AS(read_forms("(set x"), ParseError);
  CHECK_THROWS_AS(read_forms(")"), ParseError);
  CHECK_THROWS_AS(read_forms("naked"), ParseError);
  try {
    read_forms("(a\n  (b c)\n  ?");
    FAIL("unterminated form accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 1);
  }
  CHECK(read_forms("  ; only comments\n").empty());
}

TEST_CASE("value forms parse and print consistently") {
  auto val = [](const std::string& src) {
    return session_detail::parse_val(read_forms("(" + src + ")")[0].at(0));
  };
  auto roundtrip = [&](const Value& v) { CHECK(val(v.to_text()) == v); };
  roundtrip(Value::unit());
  roundtrip(Value::refl());
  roundtrip(Value::label("star"));
  roundtrip(Value::pair(Value::inl(Value::num(3)), Value::inr(Value::label("x"))));
  roundtrip(Value::inv_wit(Value::pair(Value::num(0), Value::num(1))));
  roundtrip(Value::con(Value::pair(Value::label("z"), Value::unit())));
  CHECK(val("(num 12)") == Value::num(12));
  CHECK(val("12") == Value::num(12));
  CHECK_THROWS_AS(val("(frob 1)"), ParseError);
}

TEST_CASE("set expressions resolve names and keep declared orders") {
  Session s;
  auto forms = read_forms(kPrelude);
  for (const auto& f : forms) bind_form(s, f);

  auto se = [&](const std::string& src) {
    return session_detail::parse_setexpr(s, read_forms("(x " + src + ")")[0].at(1));
  };
  CHECK(count(se("(sum ab (nat< 3))")) == 5);
  CHECK(enumerate(se("(prod ab ab)")).front() ==
        Value::pair(Value::label("a"), Value::label("a")));
  CHECK(count(se("(eq unit unit)")) == 1);
  CHECK(count(se("(eq a b)")) == 0);
  CHECK(count(se("(inv idstar star)")) == 1);
  CHECK(count(se("(enum)")) == 0);
  CHECK(count(se("ab")) == 2);
  CHECK_THROWS_AS(se("nope"), NameError);
  CHECK_THROWS_AS(se("(frob 1 2)"), ParseError);
}

TEST_CASE("the fixture session binds two descriptions and one ornament") {
  Session s;
  for (const auto& f : read_forms(kPrelude)) bind_form(s, f);
  CHECK(s.sets.size() == 2);
  CHECK(s.fns.size() == 1);
  CHECK(s.descs.size() == 2);
  CHECK(s.orns.size() == 1);
  CHECK(s.algs.empty());
  CHECK(validate_descfam(s.descs.at("ListA")).empty());
  CHECK(validate_ornfam(s.orns.at("ListOrn")).empty());
}

TEST_CASE("broken definitions are rejected before binding") {
  auto expect_parse_error = [](const std::string& text, const std::string& needle) {
    SessionOutcome out = run_session(text);
    REQUIRE(out.exit_code == 2);
    REQUIRE(out.records.size() == 1);
    CHECK(out.records[0].at("code") == "parse-error");
    const std::string& msg = out.records[0].at("error").get_ref<const std::string&>();
    INFO(msg);
    CHECK(msg.find(needle) != std::string::npos);
  };
  expect_parse_error("(set star (enum star))\n"
                     "(desc D star star ((star (sigma (enum x y) ((x one))))))",
                     "missing entry at y");
  expect_parse_error("(set s (enum a))\n(set s (enum b))", "duplicate set name");
  expect_parse_error("(widget w)", "unknown form head");
  expect_parse_error("(set star (enum star))\n(orn O NoSuch f f ())",
                     "unbound description name");
  expect_parse_error("(fn f (enum a) (enum a b) ((a c)))", "");

  SessionOutcome empty = run_session("");
  CHECK(empty.exit_code == 0);
  CHECK(empty.records.empty());
}

TEST_CASE("record payloads match the hand counts") {
  std::string text = std::string(kPrelude) + kLengthAlg +
                     "(mu-count ListA star 3)\n"
                     "(forget ListOrn star (con (pair s (pair a (con (pair s (pair b "
                     "(con (pair z unit)))))))))\n"
                     "(coherence lengthAlg star (num 2) 4)\n";
  SessionOutcome out = run_session(text);
  REQUIRE(out.exit_code == 0);
  REQUIRE(out.records.size() == 3);

  CHECK(out.records[0].at("count") == 7);
  CHECK(out.records[1].at("value") ==
        "(con (pair s (con (pair s (con (pair z unit))))))");
  CHECK(out.records[2].at("status") == "pass");
  CHECK(out.records[2].at("lhs") == 4);
  CHECK(out.records[2].at("rhs") == 4);
}

TEST_CASE("every command head dispatches onto the library") {
  SessionOutcome out = run_session(slurp(std::string(SESSION_DIR) + "/coverage.ses"));
  REQUIRE(out.exit_code == 0);

  std::set<std::string> heads;
  for (const auto& rec : out.records) {
    const std::string& st = rec.at("status").get_ref<const std::string&>();
    INFO(rec.dump());
    CHECK((st == "ok" || st == "pass"));
    heads.insert(head_of(rec));
  }
  std::set<std::string> expected = {
      "enumerate", "interp-count", "mu-count",  "forget",         "orn-interp",
      "orn-to-cart", "cart-check", "vcompose",  "hcompose",       "compose-desc",
      "algorn",      "remember",   "recompute", "coherence",      "pullback",
      "pullback-check", "derive",  "derive-orn", "reindex"};
  CHECK(heads == expected);
}

TEST_CASE("running a session twice renders identical bytes") {
  std::string text = slurp(std::string(SESSION_DIR) + "/coverage.ses");
  std::string first = render_records(run_session(text).records);
  std::string second = render_records(run_session(text).records);
  CHECK(first == second);
  CHECK(!first.empty());
}

TEST_CASE("exit codes distinguish command failures from bad input") {
  std::string err_cmd = slurp(std::string(SESSION_DIR) + "/err_command.ses");
  SessionOutcome failing = run_session(err_cmd);
  CHECK(failing.exit_code == 1);
  REQUIRE(failing.records.size() == 2);
  CHECK(failing.records[0].at("status") == "ok");
  CHECK(failing.records[1].at("status") == "error");
  CHECK(failing.records[1].at("code") == "base-mismatch");

  SessionOutcome broken = run_session(slurp(std::string(SESSION_DIR) + "/err_parse.ses"));
  CHECK(broken.exit_code == 2);
  REQUIRE(broken.records.size() == 1);
  CHECK(broken.records[0].at("code") == "parse-error");
  CHECK(broken.records[0].contains("line"));
  CHECK(broken.records[0].contains("column"));
}

TEST_CASE("commands may lean on the session depth") {
  std::string text = std::string(kPrelude) + "(mu-count ListA star)\n";
  CHECK(run_session(text, 3).records[0].at("count") == 7);
  CHECK(run_session(text, 4).records[0].at("count") == 15);

  std::string with_extra = std::string(kPrelude);
  SessionOutcome out = run_session(with_extra, 3, {"(mu-count ListA star)"});
  REQUIRE(out.records.size() == 1);
  CHECK(out.records[0].at("count") == 7);
}
