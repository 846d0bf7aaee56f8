#pragma once

#include <string>
#include <utility>
#include <vector>

#include "orn/errors.hpp"

namespace orn {

// Parenthesized-form reader: atoms and lists, with `;` line comments.
// Every node keeps the line and column it started at.
struct SExp {
  bool is_atom = false;
  std::string atom;
  std::vector<SExp> items;
  int line = 0;
  int column = 0;

  const SExp& at(size_t k) const {
    if (is_atom || k >= items.size())
      throw ParseError("form too short", line, column);
    return items[k];
  }
  size_t size() const { return is_atom ? 0 : items.size(); }
  const std::string& head() const {
    if (is_atom || items.empty() || !items[0].is_atom)
      throw ParseError("form has no head symbol", line, column);
    return items[0].atom;
  }

  // Canonical text: atoms verbatim, lists space-separated.
  std::string to_text() const {
    if (is_atom) return atom;
    std::string out = "(";
    for (size_t k = 0; k < items.size(); ++k) {
      if (k) out += ' ';
      out += items[k].to_text();
    }
    out += ')';
    return out;
  }
};

namespace sexp_detail {

struct Cursor {
  const std::string& text;
  size_t pos = 0;
  int line = 1;
  int column = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  void advance() {
    if (text[pos] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
    ++pos;
  }
  void skip_blank() {
    while (!done()) {
      char c = peek();
      if (c == ';') {
        while (!done() && peek() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        return;
      }
    }
  }
};

inline bool atom_char(char c) {
  return c != '(' && c != ')' && c != ';' && c != ' ' && c != '\t' && c != '\r' && c != '\n';
}

inline SExp read_one(Cursor& cur) {
  cur.skip_blank();
  if (cur.done()) throw ParseError("unexpected end of input", cur.line, cur.column);
  SExp node;
  node.line = cur.line;
  node.column = cur.column;
  if (cur.peek() == '(') {
    cur.advance();
    while (true) {
      cur.skip_blank();
      if (cur.done()) throw ParseError("unclosed form", node.line, node.column);
      if (cur.peek() == ')') {
        cur.advance();
        return node;
      }
      node.items.push_back(read_one(cur));
    }
  }
  if (cur.peek() == ')') throw ParseError("stray closing paren", cur.line, cur.column);
  node.is_atom = true;
  while (!cur.done() && atom_char(cur.peek())) {
    node.atom += cur.peek();
    cur.advance();
  }
  return node;
}

}  // namespace sexp_detail

inline std::vector<SExp> read_forms(const std::string& text) {
  sexp_detail::Cursor cur{text};
  std::vector<SExp> forms;
  while (true) {
    cur.skip_blank();
    if (cur.done()) return forms;
    SExp form = sexp_detail::read_one(cur);
    if (form.is_atom)
      throw ParseError("expected a parenthesized form, got atom '" + form.atom + "'",
                       form.line, form.column);
    forms.push_back(std::move(form));
  }
}

}  // namespace orn
