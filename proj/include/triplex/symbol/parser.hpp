#pragma once

// Recursive-descent parser for symbol expressions.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | atom ('^' integer)?
//   atom   := number | 't' | 'x' | 'xi' | func '(' expr ')' | '(' expr ')'
//   func   := sin | cos | exp | sqrt | jp
//
// Numbers are decimal literals with an optional exponent part (1.5e-3).

#include <cctype>
#include <charconv>
#include <string>
#include <string_view>

#include "triplex/errors.hpp"
#include "triplex/symbol/expr.hpp"

namespace triplex {

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= src_.size()) fail(std::string("expected '") + c + "' but input ended");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::raw_binary(Expr::Kind::add, lhs, term());
      } else if (accept('-')) {
        lhs = Expr::raw_binary(Expr::Kind::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::raw_binary(Expr::Kind::mul, lhs, factor());
      } else if (accept('/')) {
        lhs = Expr::raw_binary(Expr::Kind::div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  Expr factor() {
    if (accept('-')) {
      Expr inner = factor();
      // Fold "-<literal>" into a negative constant so printed forms round-trip.
      if (inner.kind() == Expr::Kind::constant) return Expr(-inner.value());
      return Expr::raw_unary_minus(inner);
    }
    Expr base = atom();
    if (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (start == pos_) fail("expected non-negative integer exponent");
      int n = 0;
      auto [p, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, n);
      if (ec != std::errc{} || p != src_.data() + pos_) {
        pos_ = start;
        fail("exponent out of range");
      }
      return Expr::raw_pow(base, n);
    }
    return base;
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t nd = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      nd += digits();
    }
    if (nd == 0) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      const std::size_t mark = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = mark;  // not an exponent; leave 'e' for the caller
    }
    double v = 0.0;
    auto [p, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (ec != std::errc{} || p != src_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr(v);
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      const std::string_view id = src_.substr(start, pos_ - start);
      if (id == "t") return Expr::t();
      if (id == "x") return Expr::x();
      if (id == "xi") return Expr::xi();
      for (Func f : {Func::sin, Func::cos, Func::exp, Func::sqrt, Func::jp}) {
        if (id == name_of(f)) {
          expect('(');
          Expr arg = expr();
          expect(')');
          return Expr::raw_call(f, arg);
        }
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(id) + "'");
    }
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a symbol expression. Throws ParseError carrying the byte offset.
inline Expr parse_symbol(std::string_view text) { return detail::Parser(text).parse(); }

}  // namespace triplex
