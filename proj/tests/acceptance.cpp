#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "orn/session.hpp"

using namespace orn;
using corpus::star;

#define REQ(cond, msg)                                  \
  do {                                                  \
    if (!(cond)) throw std::runtime_error(msg);         \
  } while (0)

namespace {

int failures = 0;

template <typename F>
void criterion(int n, const std::string& label, F body) {
  std::string detail;
  bool ok = true;
  try {
    detail = body();
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  ++failures;
  if (ok) --failures;
  std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", n, label.c_str(),
              detail.c_str());
}

// Every family over `index` whose components are initial segments of the
// naturals with at most `max_size` elements.
std::vector<Family> families_up_to(const FinSetExpr& index, int max_size) {
  auto idx = enumerate(index);
  std::vector<Family> out;
  std::vector<int> sizes(idx.size(), 0);
  while (true) {
    BranchMap<FinSetExpr> table;
    for (size_t k = 0; k < idx.size(); ++k) table.emplace(idx[k], nat_lt(sizes[k]));
    out.push_back(make_family(index, [table](const Value& i) { return table.at(i); }));
    size_t k = 0;
    for (; k < idx.size(); ++k) {
      if (++sizes[k] <= max_size) break;
      sizes[k] = 0;
    }
    if (k == idx.size()) break;
  }
  return out;
}

std::vector<std::vector<std::string>> words_up_to(int max_len) {
  std::vector<std::vector<std::string>> out = {{}};
  std::vector<std::vector<std::string>> frontier = {{}};
  for (int l = 0; l < max_len; ++l) {
    std::vector<std::vector<std::string>> next;
    for (const auto& w : frontier)
      for (const char* c : {"a", "b"}) {
        auto ext = w;
        ext.push_back(c);
        next.push_back(ext);
      }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQ(in.good(), "cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int run_engine(const std::string& args) {
  std::string cmd = std::string(ENGINE_BINARY) + " " + args + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  REQ(rc != -1, "could not launch the engine");
  return WEXITSTATUS(rc);
}

std::string c1() {
  std::vector<std::pair<std::string, DescFam>> descs = {
      {"nat", corpus::nat_desc()},
      {"list", corpus::list_desc()},
      {"fin", corpus::fin_desc(4)},
      {"vec", corpus::vec_desc(4)}};
  size_t families = 0;
  for (const auto& [name, d] : descs) {
    Container c = desc_to_container(d);
    DescFam back = container_to_desc(c);
    for (const Family& x : families_up_to(d.in_index, 2)) {
      ++families;
      Family by_desc = interp_desc(d, x);
      Family by_cont = interp_container(c, x);
      Family by_back = interp_desc(back, x);
      for (const auto& j : enumerate(d.out_index)) {
        auto de = enumerate(by_desc(j));
        REQ(de.size() == count(by_cont(j)) && de.size() == count(by_back(j)),
            name + ": interpretation counts disagree at " + j.to_text());
        std::set<Value, ValueLess> image;
        for (const auto& el : de) {
          Value cv = to_container_value(d.code_at(j), el);
          REQ(contains(by_cont(j), cv), name + ": translated element escapes");
          REQ(image.insert(cv).second, name + ": translation collides");
          REQ(from_container_value(d.code_at(j), cv) == el,
              name + ": translation fails to invert");
        }
      }
    }
  }
  return std::to_string(descs.size()) + " descriptions, " + std::to_string(families) +
         " families, three presentations each";
}

std::string c2() {
  OrnFam o = corpus::list_orn();
  auto words = words_up_to(3);
  REQ(words.size() == 15, "expected 15 lists");
  for (const auto& w : words) {
    Value t = corpus::list_tree(w);
    REQ(forget(o, star(), t) == corpus::nat_tree(static_cast<int>(w.size())),
        "forgetting a list misses its length");
  }
  return "15 lists forget to their lengths";
}

std::string c3() {
  Algebra alg = length_algebra(corpus::list_desc(), 4);
  for (int n = 0; n <= 3; ++n) {
    CoherenceReport rep = check_coherence(alg, star(), Value::num(n), 4);
    REQ(rep.pass, "coherence fails at " + std::to_string(n) + ": " +
                      (rep.violations.empty() ? "" : rep.violations.front().detail));
    size_t want = size_t{1} << n;
    REQ(rep.refined_count == want && rep.filtered_count == want,
        "refined fixpoint at length " + std::to_string(n) + " has " +
            std::to_string(rep.refined_count) + " trees, wanted " + std::to_string(want));
  }
  return "refined fixpoints sized 1,2,4,8; remember and forget invert";
}

std::string c4() {
  PullbackResult r = pullback_orn(corpus::list_orn(), corpus::fin_orn(4));
  size_t want[] = {1, 3, 7};
  for (int n = 1; n <= 3; ++n) {
    size_t got = mu_enumerate(r.apex_desc, Value::pair(star(), Value::num(n)), 4).size();
    REQ(got == want[n - 1], "bound " + std::to_string(n) + " enumerates " +
                                std::to_string(got) + " trees, wanted " +
                                std::to_string(want[n - 1]));
  }
  PullbackReport rep = check_pullback_square(r, 4);
  REQ(rep.pass, rep.violations.empty() ? "square check fails"
                                       : rep.violations.front().detail);
  return "1,3,7 bounded lists; square commutes and is universal on " +
         std::to_string(rep.trees_checked) + " trees";
}

std::string c5() {
  std::vector<std::pair<std::string, OrnFam>> orns = {
      {"list", corpus::list_orn()},
      {"fin", corpus::fin_orn(4)},
      {"vec", corpus::vec_orn(4)},
      {"height", corpus::height_orn(4)},
      {"vec-by-algebra", algebraic_ornament(length_algebra(corpus::list_desc(), 4)).ornament},
      {"id-nat", identity_orn(corpus::nat_desc())},
      {"id-list", identity_orn(corpus::list_desc())},
      {"id-tree", identity_orn(corpus::tree_desc())},
      {"id-vec", identity_orn(corpus::vec_desc(4))},
      {"id-fin", identity_orn(corpus::fin_desc(4))},
      {"vec-then-list", vcompose(corpus::vec_orn(4), corpus::list_orn())},
      {"vec-beside-height", hcompose(corpus::vec_orn(4), corpus::height_orn(4))},
      {"vec-beside-vec", hcompose(corpus::vec_orn(3), corpus::vec_orn(3))}};
  for (const auto& [name, o] : orns) {
    CartMorphism m = orn_to_cart(o);
    CheckReport rep = check_cartesian(m);
    REQ(rep.pass, name + " is not cartesian: " +
                      (rep.violations.empty() ? "" : rep.violations.front().detail));
    DescFam direct = interp_orn(o);
    DescFam again = interp_orn(cart_to_orn(m));
    for (const auto& j : enumerate(direct.out_index))
      REQ(mu_enumerate(direct, j, 3).size() == mu_enumerate(again, j, 3).size(),
          name + ": reading the ornament back changes the fixpoint at " + j.to_text());
  }
  return std::to_string(orns.size()) + " morphisms cartesian, round trips preserved";
}

std::string c6() {
  OrnFam vc = vcompose(corpus::vec_orn(4), corpus::list_orn());
  CartMorphism mc =
      compose_cart(orn_to_cart(corpus::list_orn()), orn_to_cart(corpus::vec_orn(4)));
  DescFam refined = interp_orn(corpus::vec_orn(4));
  size_t trees = 0;
  for (const auto& j : enumerate(refined.out_index)) {
    for (const auto& t : mu_enumerate(refined, j, 3)) {
      ++trees;
      Value wrapped = psi_wrap_tree(mc, j, normalize_mu(refined, j, t));
      Value once = forget(vc, j, wrapped);
      Value staged = forget(corpus::list_orn(), star(), forget(corpus::vec_orn(4), j, t));
      REQ(denormalize_mu(corpus::nat_desc(), star(), once) == staged,
          "one-step and staged forgets disagree at " + j.to_text());
    }
  }

  CartMorphism m = hcompose_cart(corpus::vec_orn(4), corpus::height_orn(4));
  CheckReport rep = check_cartesian(m);
  REQ(rep.pass, "composite of vectors beside heights is not cartesian");
  DescFam direct = compose_desc(interp_orn(corpus::vec_orn(4)),
                                interp_orn(corpus::height_orn(4)));
  DescFam via_psi = interp_orn(cart_to_orn(m));
  size_t balanced = 0;
  for (const auto& j : enumerate(direct.out_index)) {
    size_t n1 = mu_enumerate(direct, j, 2).size();
    REQ(n1 == mu_enumerate(via_psi, j, 2).size(),
        "composite enumerations disagree at " + j.to_text());
    balanced += n1;
  }
  return "staged forgets agree on " + std::to_string(trees) +
         " trees; composite checks out with " + std::to_string(balanced) +
         " trees at depth 2";
}

std::string c7() {
  std::vector<std::pair<std::string, DescFam>> descs = {
      {"nat", corpus::nat_desc()},   {"list", corpus::list_desc()},
      {"tree", corpus::tree_desc()}, {"vec", corpus::vec_desc(4)},
      {"fin", corpus::fin_desc(4)},  {"height", corpus::height_desc(4)}};
  size_t checks = 0;
  for (const auto& [name, d] : descs) {
    Container c = desc_to_container(d);
    for (const auto& i : enumerate(d.in_index))
      for (const Family& x : families_up_to(d.in_index, 2)) {
        ++checks;
        CheckReport rep = check_derivative(c, i, x);
        REQ(rep.pass, name + ": plug law fails over " + i.to_text() + ": " +
                          (rep.violations.empty() ? "" : rep.violations.front().detail));
      }
  }

  std::vector<std::pair<std::string, CartMorphism>> morphisms = {
      {"list", orn_to_cart(corpus::list_orn())},
      {"fin", orn_to_cart(corpus::fin_orn(4))},
      {"vec", orn_to_cart(corpus::vec_orn(4))},
      {"height", orn_to_cart(corpus::height_orn(4))},
      {"vec-by-algebra",
       algebraic_ornament(length_algebra(corpus::list_desc(), 4)).morphism},
      {"id-tree", identity_cart(desc_to_container(corpus::tree_desc()))},
      {"vec-then-list", orn_to_cart(vcompose(corpus::vec_orn(4), corpus::list_orn()))}};
  for (const auto& [name, m] : morphisms)
    for (const auto& i : enumerate(m.src.in_index)) {
      CheckReport rep = check_cartesian(derive_cart(m, i));
      REQ(rep.pass, name + ": derivative over " + i.to_text() + " is not cartesian");
    }

  Container list_c = desc_to_container(corpus::list_desc());
  Container dlist = derive_container(list_c, star());
  for (const Family& x : families_up_to(list_c.in_index, 2))
    REQ(count(interp_container(dlist, x)(star())) == 2,
        "list one-hole contexts miscounted");
  return std::to_string(checks) + " plug-law checks, " +
         std::to_string(morphisms.size()) + " derived morphisms cartesian";
}

std::string c8() {
  const std::string dir = SESSION_DIR;
  const std::string scratch = dir + "/../../build";
  std::vector<std::string> golden = {
      "g1_roundtrip.ses", "g2_forget.ses",  "g3_coherence.ses", "g4_pullback.ses",
      "g5_cartesian.ses", "g6_compose.ses", "g7_derivative.ses", "coverage.ses"};
  for (const auto& name : golden) {
    std::string a = scratch + "/" + name + ".a.jsonl";
    std::string b = scratch + "/" + name + ".b.jsonl";
    REQ(run_engine("run " + dir + "/" + name + " --out " + a) == 0,
        name + " does not exit cleanly");
    REQ(run_engine("run " + dir + "/" + name + " --out " + b) == 0,
        name + " does not exit cleanly on the second run");
    std::string ra = slurp(a);
    REQ(!ra.empty() && ra == slurp(b), name + " renders differently across runs");
  }
  REQ(run_engine("run " + dir + "/err_command.ses --out " + scratch +
                 "/err_command.jsonl") == 1,
      "a failing command should exit 1");
  REQ(run_engine("run " + dir + "/err_parse.ses --out " + scratch +
                 "/err_parse.jsonl") == 2,
      "a parse error should exit 2");
  return std::to_string(golden.size()) + " sessions byte-identical twice; exit codes 0/1/2";
}

}  // namespace

int main() {
  criterion(1, "interpretation counts agree across the three presentations", c1);
  criterion(2, "forgetting the list ornament computes length", c2);
  criterion(3, "the length ornament is coherent and invertible", c3);
  criterion(4, "pulling back lists against bounds yields bounded lists", c4);
  criterion(5, "every ornament induces a cartesian morphism", c5);
  criterion(6, "vertical and horizontal compositions behave", c6);
  criterion(7, "derivatives obey the plug bijection law", c7);
  criterion(8, "the engine reproduces the golden sessions byte for byte", c8);
  if (failures) {
    std::printf("%d criteria failing\n", failures);
    return 1;
  }
  std::printf("all 8 criteria pass\n");
  return 0;
}
