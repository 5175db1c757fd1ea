#include "sftkit/rational.hpp"

#include <string>

#include "sftkit/errors.hpp"

namespace sft {

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&] { return SemanticError("malformed rational '" + s + "'"); };
  if (s.empty()) throw bad();
  std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  bool seenSlash = false;
  bool digitBefore = false;
  bool digitAfter = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    char c = s[i];
    if (c == '/') {
      if (seenSlash) throw bad();
      seenSlash = true;
    } else if (c >= '0' && c <= '9') {
      (seenSlash ? digitAfter : digitBefore) = true;
    } else {
      throw bad();
    }
  }
  if (!digitBefore || (seenSlash && !digitAfter)) throw bad();
  if (s[0] == '+') s.erase(0, 1);
  Rational value;
  if (value.set_str(s, 10) != 0) throw bad();
  if (value.get_den() == 0) throw SemanticError("zero denominator in '" + s + "'");
  value.canonicalize();
  return value;
}

std::string format_rational(const Rational& value) {
  Rational v = value;
  v.canonicalize();
  return v.get_str(10);
}

}  // namespace sft
