#include "thetasing/local_function.hpp"

#include <cctype>

namespace thetasing {

Jet PolynomialFunction::jet(const CVector& z, int order) const {
  const int g = dim();
  if (z.size() != g) throw Error(ErrorCode::InvalidInput, "point dimension does not match polynomial");
  Jet out(g, order);
  std::vector<cplx> point(z.data(), z.data() + z.size());
  const auto convert = [](const Rational& q) { return cplx(q.get_d(), 0.0); };
  for (std::size_t i = 0; i < out.indices().size(); ++i) {
    out.values()[i] = poly_.derivative(out.indices()[i]).evaluate(point, convert);
  }
  return out;
}

namespace {

// expr := term (('+'|'-') term)* ; term := unary (('*'|'/') unary)* ;
// unary := '-' unary | power ; power := atom ('^' int)? ; atom := number | zK | '(' expr ')'
class PolyParser {
 public:
  PolyParser(const std::string& text, int g) : s_(text), g_(g) {}

  QPolynomial parse() {
    QPolynomial p = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::InvalidInput, "polynomial parse error at " + std::to_string(pos_) + ": " + msg);
  }

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

  QPolynomial expr() {
    QPolynomial p = term();
    while (true) {
      if (accept('+')) {
        p += term();
      } else if (accept('-')) {
        p -= term();
      } else {
        return p;
      }
    }
  }

  QPolynomial term() {
    QPolynomial p = unary();
    while (true) {
      if (accept('*')) {
        p = p * unary();
      } else if (accept('/')) {
        QPolynomial d = unary();
        if (d.degree() > 0 || d.is_zero()) fail("division only by non-zero constants");
        p *= Rational(1) / d.coefficient(MultiIndex(g_));
      } else {
        skip();
        // implicit multiplication: "2z1", "z1 z2", "3(z1+z2)"
        if (pos_ < s_.size() && (s_[pos_] == 'z' || s_[pos_] == '(' ||
                                 std::isdigit(static_cast<unsigned char>(s_[pos_])))) {
          p = p * unary();
        } else {
          return p;
        }
      }
    }
  }

  QPolynomial unary() {
    if (accept('-')) return unary() * Rational(-1);
    if (accept('+')) return unary();
    return power();
  }

  QPolynomial power() {
    QPolynomial base = atom();
    if (accept('^')) {
      skip();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected exponent");
      const int e = std::stoi(s_.substr(start, pos_ - start));
      QPolynomial out = QPolynomial::constant(g_, Rational(1));
      for (int k = 0; k < e; ++k) out = out * base;
      return out;
    }
    return base;
  }

  QPolynomial atom() {
    skip();
    if (accept('(')) {
      QPolynomial p = expr();
      if (!accept(')')) fail("expected ')'");
      return p;
    }
    if (pos_ < s_.size() && s_[pos_] == 'z') {
      ++pos_;
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected variable index");
      const int idx = std::stoi(s_.substr(start, pos_ - start));
      if (idx < 1 || idx > g_) fail("variable index out of range");
      return QPolynomial::variable(g_, idx - 1);
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (start == pos_) fail("expected number, variable or '('");
    return QPolynomial::constant(g_, parse_rational(s_.substr(start, pos_ - start)));
  }

  const std::string& s_;
  int g_;
  std::size_t pos_ = 0;
};

}  // namespace

QPolynomial parse_polynomial(const std::string& text, int g) {
  if (g <= 0) throw Error(ErrorCode::InvalidInput, "polynomial dimension must be positive");
  return PolyParser(text, g).parse();
}

}  // namespace thetasing
