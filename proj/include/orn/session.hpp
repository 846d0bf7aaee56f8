#pragma once

#include <json.hpp>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "orn/algorn.hpp"
#include "orn/container.hpp"
#include "orn/derivative.hpp"
#include "orn/desc.hpp"
#include "orn/errors.hpp"
#include "orn/finset.hpp"
#include "orn/ornament.hpp"
#include "orn/pullback.hpp"
#include "orn/sexp.hpp"

namespace orn {

using Record = nlohmann::ordered_json;

// A session binds names to the five kinds of objects the command
// language can talk about. Names are unique per kind; every definition
// is validated before it is bound.
struct Session {
  std::map<std::string, FinSetExpr> sets;
  std::map<std::string, FinFn> fns;
  std::map<std::string, DescFam> descs;
  std::map<std::string, OrnFam> orns;
  std::map<std::string, Algebra> algs;
  int default_depth = 3;
};

namespace session_detail {

[[noreturn]] inline void bad(const SExp& where, const std::string& msg) {
  throw ParseError(msg, where.line, where.column);
}

inline void need(const SExp& form, size_t lo, size_t hi) {
  if (form.size() < lo || form.size() > hi)
    bad(form, "'" + form.head() + "' takes " + std::to_string(lo - 1) +
                  (hi == lo ? "" : ".." + std::to_string(hi - 1)) + " arguments, got " +
                  std::to_string(form.size() - 1));
}

inline const std::string& name_of(const SExp& e) {
  if (!e.is_atom) bad(e, "expected a name");
  return e.atom;
}

inline int int_of(const SExp& e) {
  if (!e.is_atom || e.atom.empty()) bad(e, "expected an integer");
  for (char c : e.atom)
    if (c < '0' || c > '9') bad(e, "expected an integer, got '" + e.atom + "'");
  return std::stoi(e.atom);
}

inline Value parse_val(const SExp& e) {
  if (e.is_atom) {
    if (e.atom == "unit") return Value::unit();
    if (e.atom == "refl") return Value::refl();
    return Value::label(e.atom);
  }
  const std::string& h = e.head();
  if (h == "num") {
    need(e, 2, 2);
    return Value::label(std::to_string(int_of(e.at(1))));
  }
  if (h == "pair") {
    need(e, 3, 3);
    return Value::pair(parse_val(e.at(1)), parse_val(e.at(2)));
  }
  if (h == "inl") {
    need(e, 2, 2);
    return Value::inl(parse_val(e.at(1)));
  }
  if (h == "inr") {
    need(e, 2, 2);
    return Value::inr(parse_val(e.at(1)));
  }
  if (h == "inv-wit") {
    need(e, 2, 2);
    return Value::inv_wit(parse_val(e.at(1)));
  }
  if (h == "con") {
    need(e, 2, 2);
    return Value::con(parse_val(e.at(1)));
  }
  bad(e, "unknown value head '" + h + "'");
}

inline const FinFn& fn_ref(const Session& s, const SExp& e) {
  auto it = s.fns.find(name_of(e));
  if (it == s.fns.end()) throw NameError("unbound function name: " + e.atom);
  return it->second;
}

inline FinSetExpr parse_setexpr(const Session& s, const SExp& e) {
  if (e.is_atom) {
    auto it = s.sets.find(e.atom);
    if (it == s.sets.end()) throw NameError("unbound set name: " + e.atom);
    return it->second;
  }
  const std::string& h = e.head();
  if (h == "enum") {
    std::vector<std::string> labels;
    for (size_t k = 1; k < e.size(); ++k) labels.push_back(name_of(e.at(k)));
    return FinSetExpr::make_enum(std::move(labels));
  }
  if (h == "sum") {
    need(e, 3, 3);
    return FinSetExpr::sum(parse_setexpr(s, e.at(1)), parse_setexpr(s, e.at(2)));
  }
  if (h == "prod") {
    need(e, 3, 3);
    return FinSetExpr::prod(parse_setexpr(s, e.at(1)), parse_setexpr(s, e.at(2)));
  }
  if (h == "eq") {
    need(e, 3, 3);
    return FinSetExpr::eq(parse_val(e.at(1)), parse_val(e.at(2)));
  }
  if (h == "inv") {
    need(e, 3, 3);
    return inverse_image(fn_ref(s, e.at(1)), parse_val(e.at(2)));
  }
  if (h == "nat<") {
    need(e, 2, 2);
    return nat_lt(int_of(e.at(1)));
  }
  bad(e, "unknown set head '" + h + "'");
}

// Branch tables are written ((key form)*); `parse` turns each form into
// the table's payload.
template <typename T, typename F>
inline BranchMap<T> parse_table(const SExp& e, F parse) {
  if (e.is_atom) bad(e, "expected a branch table");
  BranchMap<T> out;
  for (size_t k = 0; k < e.size(); ++k) {
    const SExp& row = e.at(k);
    if (row.is_atom || row.size() != 2) bad(row, "branch rows are (key form) pairs");
    Value key = parse_val(row.at(0));
    if (!out.emplace(key, parse(row.at(1))).second)
      bad(row, "duplicate branch key " + key.to_text());
  }
  return out;
}

inline DescCode parse_desccode(const Session& s, const SExp& e) {
  if (e.is_atom) {
    if (e.atom == "one") return DescCode::one();
    bad(e, "unknown description code '" + e.atom + "'");
  }
  const std::string& h = e.head();
  if (h == "var") {
    need(e, 2, 2);
    return DescCode::var(parse_val(e.at(1)));
  }
  if (h == "sigma" || h == "pi") {
    need(e, 3, 3);
    FinSetExpr set = parse_setexpr(s, e.at(1));
    auto branches = parse_table<DescCode>(
        e.at(2), [&](const SExp& b) { return parse_desccode(s, b); });
    return h == "sigma" ? DescCode::sigma(std::move(set), std::move(branches))
                        : DescCode::pi(std::move(set), std::move(branches));
  }
  bad(e, "unknown description head '" + h + "'");
}

inline OrnCode parse_orncode(const Session& s, const SExp& e) {
  if (e.is_atom) {
    if (e.atom == "one") return OrnCode::ounit();
    bad(e, "unknown ornament code '" + e.atom + "'");
  }
  const std::string& h = e.head();
  if (h == "insert") {
    need(e, 3, 3);
    FinSetExpr set = parse_setexpr(s, e.at(1));
    auto branches = parse_table<OrnCode>(
        e.at(2), [&](const SExp& b) { return parse_orncode(s, b); });
    return OrnCode::insert(std::move(set), std::move(branches));
  }
  if (h == "delete") {
    need(e, 3, 3);
    return OrnCode::del(parse_val(e.at(1)), parse_orncode(s, e.at(2)));
  }
  if (h == "var-inv") {
    need(e, 2, 2);
    return OrnCode::var_inv(parse_val(e.at(1)));
  }
  if (h == "sigma" || h == "pi") {
    need(e, 2, 2);
    auto branches = parse_table<OrnCode>(
        e.at(1), [&](const SExp& b) { return parse_orncode(s, b); });
    return h == "sigma" ? OrnCode::osigma(std::move(branches))
                        : OrnCode::opi(std::move(branches));
  }
  bad(e, "unknown ornament head '" + h + "'");
}

// A family spec ((index setexpr)*) builds a set family over the given
// index set; rows must cover it.
inline Family parse_famspec(const Session& s, const SExp& e, const FinSetExpr& index) {
  auto table = parse_table<FinSetExpr>(
      e, [&](const SExp& b) { return parse_setexpr(s, b); });
  for (const auto& i : enumerate(index))
    if (!table.count(i)) bad(e, "family spec missing entry at " + i.to_text());
  return make_family(index, [table](const Value& i) {
    auto it = table.find(i);
    if (it == table.end()) throw IndexMismatchError("family has no set at " + i.to_text());
    return it->second;
  });
}

// References in command position: a description is a bound name or an
// adjoint form, an ornament is a bound name or the identity ornament of
// a description.
inline DescFam desc_ref(const Session& s, const SExp& e) {
  if (e.is_atom) {
    auto it = s.descs.find(e.atom);
    if (it == s.descs.end()) throw NameError("unbound description name: " + e.atom);
    return it->second;
  }
  if (e.head() == "adjoint") {
    need(e, 3, 3);
    const std::string& k = name_of(e.at(1));
    AdjointKind kind;
    if (k == "reindex")
      kind = AdjointKind::Reindex;
    else if (k == "exists")
      kind = AdjointKind::Exists;
    else if (k == "forall")
      kind = AdjointKind::Forall;
    else
      bad(e.at(1), "adjoint kind is reindex, exists, or forall");
    return adjoint_desc(kind, fn_ref(s, e.at(2)));
  }
  bad(e, "expected a description name or (adjoint ...)");
}

inline OrnFam orn_ref(const Session& s, const SExp& e) {
  if (e.is_atom) {
    auto it = s.orns.find(e.atom);
    if (it == s.orns.end()) throw NameError("unbound ornament name: " + e.atom);
    return it->second;
  }
  const std::string& h = e.head();
  if (h == "identity") {
    need(e, 2, 2);
    return identity_orn(desc_ref(s, e.at(1)));
  }
  if (h == "vcompose" || h == "hcompose") {
    need(e, 3, 3);
    OrnFam o2 = orn_ref(s, e.at(1));
    OrnFam o1 = orn_ref(s, e.at(2));
    return h == "vcompose" ? vcompose(o2, o1) : hcompose(o2, o1);
  }
  bad(e, "expected an ornament name, (identity ...), (vcompose ...), or (hcompose ...)");
}

inline const Algebra& alg_ref(const Session& s, const SExp& e) {
  auto it = s.algs.find(name_of(e));
  if (it == s.algs.end()) throw NameError("unbound algebra name: " + e.atom);
  return it->second;
}

inline int opt_depth(const Session& s, const SExp& form, size_t k) {
  return form.size() > k ? int_of(form.at(k)) : s.default_depth;
}

inline void add_violations(Record& rec, const std::vector<CheckViolation>& vs) {
  if (vs.empty()) return;
  Record arr = Record::array();
  for (size_t k = 0; k < vs.size() && k < 3; ++k)
    arr.push_back({{"rule", vs[k].rule}, {"detail", vs[k].detail}});
  rec["violations"] = std::move(arr);
}

inline void set_status(Record& rec, bool pass) { rec["status"] = pass ? "pass" : "fail"; }

}  // namespace session_detail

// Definition forms: (set ...), (fn ...), (desc ...), (orn ...), (alg ...).
// Anything invalid is rejected here, before the name is bound.
inline void bind_form(Session& s, const SExp& form) {
  using namespace session_detail;
  const std::string& h = form.head();
  const std::string& name = name_of(form.at(1));
  try {
    if (h == "set") {
      need(form, 3, 3);
      if (s.sets.count(name)) bad(form, "duplicate set name '" + name + "'");
      FinSetExpr set = parse_setexpr(s, form.at(2));
      enumerate(set);
      s.sets.emplace(name, std::move(set));
      return;
    }
    if (h == "fn") {
      need(form, 5, 5);
      if (s.fns.count(name)) bad(form, "duplicate function name '" + name + "'");
      FinFn f{parse_setexpr(s, form.at(2)), parse_setexpr(s, form.at(3)),
              parse_table<Value>(form.at(4), parse_val)};
      if (auto probs = validate_fn(f); !probs.empty()) bad(form, probs.front());
      s.fns.emplace(name, std::move(f));
      return;
    }
    if (h == "desc") {
      need(form, 5, 5);
      if (s.descs.count(name)) bad(form, "duplicate description name '" + name + "'");
      DescFam d{parse_setexpr(s, form.at(2)), parse_setexpr(s, form.at(3)),
                parse_table<DescCode>(form.at(4), [&](const SExp& b) {
                  return parse_desccode(s, b);
                })};
      if (auto probs = validate_descfam(d); !probs.empty()) bad(form, probs.front());
      s.descs.emplace(name, std::move(d));
      return;
    }
    if (h == "orn") {
      need(form, 6, 6);
      if (s.orns.count(name)) bad(form, "duplicate ornament name '" + name + "'");
      OrnFam o{desc_ref(s, form.at(2)), fn_ref(s, form.at(3)), fn_ref(s, form.at(4)),
               parse_table<OrnCode>(form.at(5), [&](const SExp& b) {
                 return parse_orncode(s, b);
               })};
      if (auto probs = validate_ornfam(o); !probs.empty()) bad(form, probs.front());
      s.orns.emplace(name, std::move(o));
      return;
    }
    if (h == "alg") {
      need(form, 5, 5);
      if (s.algs.count(name)) bad(form, "duplicate algebra name '" + name + "'");
      Algebra a;
      a.desc = desc_ref(s, form.at(2));
      a.carrier = parse_famspec(s, form.at(3), a.desc.out_index);
      Family layer = interp_desc(a.desc, a.carrier);
      auto rows = parse_table<BranchMap<Value>>(form.at(4), [&](const SExp& b) {
        return parse_table<Value>(b, parse_val);
      });
      for (const auto& i : enumerate(a.desc.out_index)) {
        auto it = rows.find(i);
        if (it == rows.end()) bad(form, "algebra table missing entry at " + i.to_text());
        a.table.emplace(i, FinFn{layer(i), a.carrier(i), it->second});
      }
      if (auto probs = validate_algebra(a); !probs.empty()) bad(form, probs.front());
      s.algs.emplace(name, std::move(a));
      return;
    }
    bad(form, "unknown form head '" + h + "'");
  } catch (const ParseError&) {
    throw;
  } catch (const EngineError& e) {
    bad(form, std::string(e.what()));
  }
}

inline bool is_definition_head(const std::string& h) {
  return h == "set" || h == "fn" || h == "desc" || h == "orn" || h == "alg";
}

// The command evaluator. Each command maps onto one operation of the
// library; check-style commands carry a pass/fail status and the first
// three counterexamples on failure.
inline Record run_command(Session& s, const SExp& form) {
  using namespace session_detail;
  const std::string& h = form.head();
  Record rec;
  rec["cmd"] = form.to_text();

  if (h == "enumerate") {
    need(form, 2, 2);
    auto values = enumerate(parse_setexpr(s, form.at(1)));
    rec["status"] = "ok";
    rec["count"] = values.size();
    Record arr = Record::array();
    for (const auto& v : values) arr.push_back(v.to_text());
    rec["values"] = std::move(arr);
    return rec;
  }

  if (h == "interp-count") {
    need(form, 3, 3);
    DescFam d = desc_ref(s, form.at(1));
    Family x = parse_famspec(s, form.at(2), d.in_index);
    Container c = desc_to_container(d);
    DescFam back = container_to_desc(c);
    Family by_desc = interp_desc(d, x);
    Family by_cont = interp_container(c, x);
    Family by_back = interp_desc(back, x);
    bool pass = true;
    std::vector<CheckViolation> vs;
    Record per = Record::array();
    for (const auto& j : enumerate(d.out_index)) {
      auto de = enumerate(by_desc(j));
      size_t nc = count(by_cont(j));
      size_t nb = count(by_back(j));
      if (de.size() != nc || de.size() != nb) {
        pass = false;
        vs.push_back({"count", "interpretations disagree at " + j.to_text()});
      }
      std::set<Value, ValueLess> seen;
      for (const auto& el : de) {
        Value cv = to_container_value(d.code_at(j), el);
        if (!contains(by_cont(j), cv) || !seen.insert(cv).second ||
            from_container_value(d.code_at(j), cv) != el) {
          pass = false;
          vs.push_back({"bijection", "element fails to round trip: " + el.to_text()});
        }
      }
      per.push_back({{"index", j.to_text()},
                     {"desc", de.size()},
                     {"container", nc},
                     {"roundtrip", nb}});
    }
    set_status(rec, pass);
    rec["per_index"] = std::move(per);
    add_violations(rec, vs);
    return rec;
  }

  if (h == "mu-count") {
    need(form, 3, 4);
    DescFam d = desc_ref(s, form.at(1));
    rec["status"] = "ok";
    rec["count"] = mu_enumerate(d, parse_val(form.at(2)), opt_depth(s, form, 3)).size();
    return rec;
  }

  if (h == "forget") {
    need(form, 4, 4);
    OrnFam o = orn_ref(s, form.at(1));
    rec["status"] = "ok";
    rec["value"] = forget(o, parse_val(form.at(2)), parse_val(form.at(3))).to_text();
    return rec;
  }

  if (h == "orn-interp") {
    need(form, 2, 3);
    OrnFam o = orn_ref(s, form.at(1));
    DescFam refined = interp_orn(o);
    int depth = opt_depth(s, form, 2);
    rec["status"] = "ok";
    Record counts = Record::object();
    for (const auto& [j, ts] : mu_enumerate_all(refined, depth))
      counts[j.to_text()] = ts.size();
    rec["mu_counts"] = std::move(counts);
    return rec;
  }

  if (h == "orn-to-cart") {
    need(form, 2, 3);
    OrnFam o = orn_ref(s, form.at(1));
    int depth = opt_depth(s, form, 2);
    CartMorphism m = orn_to_cart(o);
    CheckReport cart = check_cartesian(m);
    DescFam refined = interp_orn(o);
    DescFam again = interp_orn(cart_to_orn(m));
    bool counts_match = true;
    for (const auto& j : enumerate(refined.out_index))
      if (mu_enumerate(refined, j, depth).size() != mu_enumerate(again, j, depth).size())
        counts_match = false;
    set_status(rec, cart.pass && counts_match);
    rec["cartesian"] = cart.pass;
    rec["psi_phi"] = counts_match ? "pass" : "fail";
    add_violations(rec, cart.violations);
    return rec;
  }

  if (h == "cart-check") {
    need(form, 2, 2);
    CheckReport rep = check_cartesian(orn_to_cart(orn_ref(s, form.at(1))));
    set_status(rec, rep.pass);
    add_violations(rec, rep.violations);
    return rec;
  }

  if (h == "vcompose") {
    need(form, 3, 4);
    OrnFam o2 = orn_ref(s, form.at(1));
    OrnFam o1 = orn_ref(s, form.at(2));
    int depth = opt_depth(s, form, 3);
    OrnFam vc = vcompose(o2, o1);
    CartMorphism mc = compose_cart(orn_to_cart(o1), orn_to_cart(o2));
    DescFam refined = interp_orn(o2);
    bool pass = true;
    std::vector<CheckViolation> vs;
    size_t trees = 0;
    for (const auto& j : enumerate(refined.out_index)) {
      auto ts = mu_enumerate(refined, j, depth);
      if (mu_enumerate(interp_orn(vc), j, depth).size() != ts.size()) {
        pass = false;
        vs.push_back({"count", "composite fixpoint size differs at " + j.to_text()});
      }
      for (const auto& t : ts) {
        ++trees;
        Value wrapped = psi_wrap_tree(mc, j, normalize_mu(refined, j, t));
        Value once = forget(vc, j, wrapped);
        Value mid = apply_fn(o2.v, j);
        Value staged = forget(o1, mid, forget(o2, j, t));
        if (denormalize_mu(o1.base, apply_fn(o1.v, mid), once) != staged) {
          pass = false;
          vs.push_back({"staged", "one-step and two-step forgets differ at " + t.to_text()});
        }
      }
    }
    set_status(rec, pass);
    rec["trees"] = trees;
    add_violations(rec, vs);
    return rec;
  }

  if (h == "hcompose") {
    need(form, 3, 4);
    OrnFam o2 = orn_ref(s, form.at(1));
    OrnFam o1 = orn_ref(s, form.at(2));
    int depth = opt_depth(s, form, 3);
    CartMorphism m = hcompose_cart(o2, o1);
    CheckReport cart = check_cartesian(m);
    OrnFam oc = cart_to_orn(m);
    DescFam direct = compose_desc(interp_orn(o2), interp_orn(o1));
    DescFam via_psi = interp_orn(oc);
    bool pass = cart.pass;
    Record counts = Record::object();
    for (const auto& j : enumerate(direct.out_index)) {
      size_t n1 = mu_enumerate(direct, j, depth).size();
      if (mu_enumerate(via_psi, j, depth).size() != n1) pass = false;
      counts[j.to_text()] = n1;
    }
    set_status(rec, pass);
    rec["cartesian"] = cart.pass;
    rec["mu_counts"] = std::move(counts);
    add_violations(rec, cart.violations);
    return rec;
  }

  if (h == "compose-desc") {
    need(form, 4, 4);
    DescFam d = desc_ref(s, form.at(1));
    DescFam e = desc_ref(s, form.at(2));
    Family x = parse_famspec(s, form.at(3), e.in_index);
    DescFam dc = compose_desc(d, e);
    Family once = interp_desc(dc, x);
    Family twice = interp_desc(d, interp_desc(e, x));
    bool pass = true;
    Record counts = Record::object();
    for (const auto& j : enumerate(d.out_index)) {
      if (!set_equal(once(j), twice(j))) pass = false;
      counts[j.to_text()] = count(once(j));
    }
    set_status(rec, pass);
    rec["counts"] = std::move(counts);
    return rec;
  }

  if (h == "algorn") {
    need(form, 2, 2);
    AlgOrnResult r = algebraic_ornament(alg_ref(s, form.at(1)));
    CheckReport cart = check_cartesian(r.morphism);
    set_status(rec, cart.pass);
    rec["pair_index"] = count(r.pair_index);
    rec["cartesian"] = cart.pass;
    add_violations(rec, cart.violations);
    return rec;
  }

  if (h == "remember") {
    need(form, 4, 4);
    auto [ix, dec] = remember(alg_ref(s, form.at(1)), parse_val(form.at(2)),
                              parse_val(form.at(3)));
    rec["status"] = "ok";
    rec["index"] = ix.to_text();
    rec["value"] = dec.to_text();
    return rec;
  }

  if (h == "recompute") {
    need(form, 4, 4);
    AlgOrnResult r = algebraic_ornament(alg_ref(s, form.at(1)));
    auto [t, proof] = recompute(r, parse_val(form.at(2)), parse_val(form.at(3)));
    rec["status"] = "ok";
    rec["value"] = t.to_text();
    rec["proof"] = proof.to_text();
    return rec;
  }

  if (h == "coherence") {
    need(form, 4, 5);
    CoherenceReport rep = check_coherence(alg_ref(s, form.at(1)), parse_val(form.at(2)),
                                          parse_val(form.at(3)), opt_depth(s, form, 4));
    set_status(rec, rep.pass);
    rec["lhs"] = rep.refined_count;
    rec["rhs"] = rep.filtered_count;
    add_violations(rec, rep.violations);
    return rec;
  }

  if (h == "pullback") {
    need(form, 4, 5);
    PullbackResult r = pullback_orn(orn_ref(s, form.at(1)), orn_ref(s, form.at(2)));
    rec["status"] = "ok";
    rec["count"] =
        mu_enumerate(r.apex_desc, parse_val(form.at(3)), opt_depth(s, form, 4)).size();
    return rec;
  }

  if (h == "pullback-check") {
    need(form, 3, 4);
    PullbackResult r = pullback_orn(orn_ref(s, form.at(1)), orn_ref(s, form.at(2)));
    PullbackReport rep = check_pullback_square(r, opt_depth(s, form, 3));
    set_status(rec, rep.pass);
    rec["commutes"] = rep.commutes;
    rec["universal"] = rep.universal;
    rec["trees"] = rep.trees_checked;
    add_violations(rec, rep.violations);
    return rec;
  }

  if (h == "derive") {
    need(form, 4, 4);
    DescFam d = desc_ref(s, form.at(1));
    Value dir = parse_val(form.at(2));
    Family x = parse_famspec(s, form.at(3), d.in_index);
    Container c = desc_to_container(d);
    CheckReport rep = check_derivative(c, dir, x);
    Container dc = derive_container(c, dir);
    Family ctxs = interp_container(dc, x);
    set_status(rec, rep.pass);
    Record counts = Record::object();
    for (const auto& j : enumerate(dc.out_index)) counts[j.to_text()] = count(ctxs(j));
    rec["contexts"] = std::move(counts);
    add_violations(rec, rep.violations);
    return rec;
  }

  if (h == "derive-orn") {
    need(form, 3, 3);
    CartMorphism dm =
        derive_cart(orn_to_cart(orn_ref(s, form.at(1))), parse_val(form.at(2)));
    CheckReport rep = check_cartesian(dm);
    set_status(rec, rep.pass);
    add_violations(rec, rep.violations);
    return rec;
  }

  if (h == "reindex") {
    need(form, 4, 5);
    DescFam d = desc_ref(s, form.at(1));
    OrnFam o = reindex_orn(d, fn_ref(s, form.at(2)), fn_ref(s, form.at(3)));
    int depth = opt_depth(s, form, 4);
    bool pass = validate_ornfam(o).empty();
    DescFam refined = interp_orn(o);
    Record counts = Record::object();
    for (const auto& j : enumerate(d.out_index)) {
      size_t n = mu_enumerate(refined, j, depth).size();
      if (n != mu_enumerate(d, j, depth).size()) pass = false;
      counts[j.to_text()] = n;
    }
    set_status(rec, pass);
    rec["counts"] = std::move(counts);
    return rec;
  }

  session_detail::bad(form, "unknown form head '" + h + "'");
}

struct SessionOutcome {
  std::vector<Record> records;
  int exit_code = 0;
};

// Runs a whole session: definitions bind in order, commands evaluate in
// order, one record each. Extra command forms run after the file.
// Parse and validation problems stop the run with exit code 2; a
// command that errors or fails a check yields exit code 1.
inline SessionOutcome run_session(const std::string& text, int default_depth = 3,
                                  const std::vector<std::string>& extra_commands = {}) {
  SessionOutcome out;
  Session s;
  s.default_depth = default_depth;
  try {
    std::vector<SExp> forms = read_forms(text);
    for (const std::string& src : extra_commands)
      for (SExp& f : read_forms(src)) forms.push_back(std::move(f));
    for (const SExp& form : forms) {
      if (is_definition_head(form.head())) {
        bind_form(s, form);
        continue;
      }
      Record rec;
      try {
        rec = run_command(s, form);
      } catch (const ParseError&) {
        throw;
      } catch (const EngineError& e) {
        rec = Record{{"cmd", form.to_text()},
                     {"status", "error"},
                     {"code", e.code()},
                     {"error", e.what()}};
      }
      const std::string& st = rec["status"].get_ref<const std::string&>();
      if (st == "fail" || st == "error") out.exit_code = 1;
      out.records.push_back(std::move(rec));
    }
  } catch (const ParseError& e) {
    out.records.push_back(Record{{"status", "error"},
                                 {"code", e.code()},
                                 {"line", e.line()},
                                 {"column", e.column()},
                                 {"error", e.what()}});
    out.exit_code = 2;
  }
  return out;
}

inline std::string render_records(const std::vector<Record>& records) {
  std::string out;
  for (const auto& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

}  // namespace orn
