#pragma once

#include <compare>
#include <memory>
#include <string>
#include <vector>

#include "orn/errors.hpp"

namespace orn {

// First-order element of a finite set. Values are immutable trees shared
// by reference; equality and ordering are structural.
//
//   Unit            the canonical inhabitant of the unit set
//   Refl            the proof inhabiting an equality set
//   Label(name)     a named atom, including decimal numerals like "3"
//   Pair(a, b)      dependent-sum / product component
//   InL(v), InR(v)  binary sum injections
//   InvWit(v)       a member of an inverse-image set, wrapping the preimage
//   Con(v)          a fixpoint tree node wrapping one payload
//
// Total finite maps (Pi values, position assignments) are reified as
// ordered tuples: right-nested pairs terminated by Unit.
class Value {
 public:
  enum class Kind { Unit, Refl, Label, Pair, InL, InR, InvWit, Con };

  Value() : Value(unit()) {}

  static Value unit() { return Value(std::make_shared<Node>(Kind::Unit)); }
  static Value refl() { return Value(std::make_shared<Node>(Kind::Refl)); }
  static Value label(std::string name) {
    auto n = std::make_shared<Node>(Kind::Label);
    n->name = std::move(name);
    return Value(n);
  }
  static Value num(long long k) { return label(std::to_string(k)); }
  static Value pair(Value a, Value b) { return node(Kind::Pair, {std::move(a), std::move(b)}); }
  static Value inl(Value v) { return node(Kind::InL, {std::move(v)}); }
  static Value inr(Value v) { return node(Kind::InR, {std::move(v)}); }
  static Value inv_wit(Value v) { return node(Kind::InvWit, {std::move(v)}); }
  static Value con(Value v) { return node(Kind::Con, {std::move(v)}); }

  Kind kind() const { return node_->kind; }
  bool is(Kind k) const { return node_->kind == k; }

  const std::string& name() const {
    require(Kind::Label, "label");
    return node_->name;
  }
  const Value& first() const {
    require(Kind::Pair, "pair");
    return node_->args[0];
  }
  const Value& second() const {
    require(Kind::Pair, "pair");
    return node_->args[1];
  }
  // Sole argument of InL / InR / InvWit / Con.
  const Value& arg() const {
    if (node_->args.size() != 1)
      throw MalformedElementError("value has no single argument: " + to_text());
    return node_->args[0];
  }

  friend bool operator==(const Value& a, const Value& b) { return compare(a, b) == 0; }
  friend bool operator!=(const Value& a, const Value& b) { return compare(a, b) != 0; }
  friend bool operator<(const Value& a, const Value& b) { return compare(a, b) < 0; }

  static int compare(const Value& a, const Value& b) {
    if (a.node_ == b.node_) return 0;
    if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
    if (a.kind() == Kind::Label) return a.node_->name.compare(b.node_->name);
    const auto& xs = a.node_->args;
    const auto& ys = b.node_->args;
    if (xs.size() != ys.size()) return xs.size() < ys.size() ? -1 : 1;
    for (size_t i = 0; i < xs.size(); ++i)
      if (int c = compare(xs[i], ys[i]); c != 0) return c;
    return 0;
  }

  // Canonical text form; parses back to a structurally equal value.
  std::string to_text() const {
    std::string out;
    print(out);
    return out;
  }

 private:
  struct Node {
    explicit Node(Kind k) : kind(k) {}
    Kind kind;
    std::string name;
    std::vector<Value> args;
  };

  explicit Value(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static Value node(Kind k, std::vector<Value> args) {
    auto n = std::make_shared<Node>(k);
    n->args = std::move(args);
    return Value(n);
  }

  void require(Kind k, const char* what) const {
    if (node_->kind != k)
      throw MalformedElementError(std::string("expected ") + what + ", got " + to_text());
  }

  void print(std::string& out) const {
    switch (node_->kind) {
      case Kind::Unit: out += "unit"; return;
      case Kind::Refl: out += "refl"; return;
      case Kind::Label: out += node_->name; return;
      case Kind::Pair:
        out += "(pair ";
        node_->args[0].print(out);
        out += ' ';
        node_->args[1].print(out);
        out += ')';
        return;
      case Kind::InL:
      case Kind::InR:
      case Kind::InvWit:
      case Kind::Con: {
        const char* head = node_->kind == Kind::InL      ? "inl"
                           : node_->kind == Kind::InR    ? "inr"
                           : node_->kind == Kind::InvWit ? "inv-wit"
                                                         : "con";
        out += '(';
        out += head;
        out += ' ';
        node_->args[0].print(out);
        out += ')';
        return;
      }
    }
  }

  std::shared_ptr<const Node> node_;
};

struct ValueLess {
  bool operator()(const Value& a, const Value& b) const { return Value::compare(a, b) < 0; }
};

// Ordered tupling: the reified form of a total finite map whose domain
// enumerates to n elements. An empty tuple is Unit.
inline Value tuple_of(const std::vector<Value>& vs) {
  Value acc = Value::unit();
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) acc = Value::pair(*it, acc);
  return acc;
}

inline std::vector<Value> tuple_parts(const Value& v, size_t n) {
  std::vector<Value> out;
  out.reserve(n);
  Value cur = v;
  for (size_t i = 0; i < n; ++i) {
    if (!cur.is(Value::Kind::Pair))
      throw MalformedElementError("tuple too short: " + v.to_text());
    out.push_back(cur.first());
    cur = cur.second();
  }
  if (!cur.is(Value::Kind::Unit))
    throw MalformedElementError("tuple too long: " + v.to_text());
  return out;
}

}  // namespace orn
