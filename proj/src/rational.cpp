#include "thetasing/rational.hpp"

#include <cctype>

#include "thetasing/types.hpp"

namespace thetasing {

Rational parse_rational(const std::string& raw) {
  std::string text;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) text.push_back(c);
  }
  if (text.empty()) throw Error(ErrorCode::InvalidInput, "empty rational");
  try {
    const auto dot = text.find('.');
    if (dot != std::string::npos) {
      if (text.find('/') != std::string::npos) throw Error(ErrorCode::InvalidInput, "mixed decimal and fraction");
      std::string digits = text.substr(0, dot) + text.substr(dot + 1);
      const std::size_t scale = text.size() - dot - 1;
      if (digits.empty() || digits == "-" || digits == "+") throw Error(ErrorCode::InvalidInput, text);
      if (digits.front() == '+') digits.erase(0, 1);
      Integer num(digits, 10);
      Integer den = 1;
      for (std::size_t i = 0; i < scale; ++i) den *= 10;
      Rational q(num, den);
      q.canonicalize();
      return q;
    }
    if (text.front() == '+') text.erase(0, 1);
    Rational q(text, 10);
    if (q.get_den() == 0) throw Error(ErrorCode::InvalidInput, "zero denominator in " + raw);
    q.canonicalize();
    return q;
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::InvalidInput, "not a rational number: " + raw);
  }
}

std::string format_rational(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

}  // namespace thetasing
