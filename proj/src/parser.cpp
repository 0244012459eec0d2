#include <cctype>
#include <charconv>

#include "sdym/calculus.hpp"
#include "sdym/expr.hpp"

namespace sdym {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Expr run() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) {
        e += term();
      } else if (accept('-')) {
        e -= term();
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) {
        e = e * unary();
      } else if (accept('/')) {
        std::size_t at = pos_;
        Expr d = unary();
        if (d.size() != 1 || !d.terms()[0].factors.empty() || !d.terms()[0].coords.is_one()) {
          pos_ = at;
          fail("division by a non-numeric expression");
        }
        e = e * (Coefficient(1) / d.terms()[0].coeff);
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!accept('^')) return base;
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    int k = 0;
    std::from_chars(s_.data() + start, s_.data() + pos_, k);
    Expr r = Expr::identity();
    for (int i = 0; i < k; ++i) r = r * base;
    return r;
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (c == '[') {
      ++pos_;
      Expr a = expr();
      expect(',');
      Expr b = expr();
      expect(']');
      return commutator(a, b);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (ident_start(c)) return symbol();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string_view whole = s_.substr(start, pos_ - start);
    std::string_view frac;
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      std::size_t f = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      frac = s_.substr(f, pos_ - f);
    }
    if (whole.empty() && frac.empty()) fail("malformed number");
    if (whole.size() + frac.size() > 17) fail("numeric literal too long");
    std::int64_t num = 0;
    for (char d : whole) num = num * 10 + (d - '0');
    std::int64_t den = 1;
    for (char d : frac) {
      num = num * 10 + (d - '0');
      den *= 10;
    }
    Coefficient value(Rational(num, den));
    if (pos_ < s_.size() && s_[pos_] == 'i' &&
        (pos_ + 1 >= s_.size() || !ident_char(s_[pos_ + 1]))) {
      ++pos_;
      value = value * Coefficient::imaginary_unit();
    }
    return Expr::scalar(value);
  }

  std::string identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  MultiIndex suffix() {
    MultiIndex d{0, 0, 0};
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::islower(static_cast<unsigned char>(s_[pos_]))) {
      if (s_.compare(pos_, 2, "yb") == 0) {
        d[index_of(Coordinate::ybar)]++;
        pos_ += 2;
      } else if (s_[pos_] == 'y') {
        d[index_of(Coordinate::y)]++;
        ++pos_;
      } else if (s_[pos_] == 'z') {
        d[index_of(Coordinate::z)]++;
        ++pos_;
      } else {
        fail("bad derivative suffix");
      }
    }
    if (pos_ == start) fail("empty derivative suffix");
    if (pos_ < s_.size() && ident_char(s_[pos_])) fail("bad derivative suffix");
    return d;
  }

  Expr symbol() {
    std::size_t start = pos_;
    std::string name = identifier();
    bool has_suffix = pos_ < s_.size() && s_[pos_] == '_';

    if (name == "Int" && has_suffix) {
      if (s_.compare(pos_, 2, "_z") != 0 || (pos_ + 2 < s_.size() && ident_char(s_[pos_ + 2]))) {
        fail("only Int_z is supported");
      }
      pos_ += 2;
      expect('(');
      Expr inner = expr();
      expect(')');
      return formal_z_integral(inner);
    }

    MultiIndex d{0, 0, 0};
    if (has_suffix) {
      ++pos_;
      d = suffix();
    }

    if (std::islower(static_cast<unsigned char>(name[0]))) {
      if (has_suffix) {
        pos_ = start;
        fail("scalar '" + name + "' cannot carry a derivative suffix");
      }
      if (name == "y") return Expr::coordinate(Coordinate::y);
      if (name == "z") return Expr::coordinate(Coordinate::z);
      if (name == "yb") return Expr::coordinate(Coordinate::ybar);
      if (name == "lam") return Expr::lambda();
      if (name == "i") return Expr::scalar(Coefficient::imaginary_unit());
      pos_ = start;
      fail("unknown symbol '" + name + "'");
    }

    if (name == "Id") {
      if (has_suffix) return Expr::zero();
      return Expr::identity();
    }
    if (name == "X") return Expr::x(d);
    if (name == "J") return Expr::j(d);
    if (name == "Jinv") return total_derivative(Expr::jinv(), d);
    if (name == "Int") {
      pos_ = start;
      fail("Int must be written Int_z(...)");
    }
    return total_derivative(Expr::constant(name), d);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).run(); }

}  // namespace sdym
