#include "okflow/rational.hpp"

#include <stdexcept>

namespace okflow {

Rat rat_parse(const std::string& s) {
  if (s.empty()) throw std::runtime_error("rat_parse: empty string");
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den == 0) throw std::runtime_error("rat_parse: zero denominator in '" + s + "'");
    return Rat(num, den);
  } catch (const std::exception&) {
    throw std::runtime_error("rat_parse: malformed rational '" + s + "'");
  }
}

std::string rat_str(const Rat& q) {
  if (rat_den(q) == 1) return rat_num(q).str();
  return rat_num(q).str() + "/" + rat_den(q).str();
}

double rat_to_double(const Rat& q) { return q.convert_to<double>(); }

Int rat_floor(const Rat& q) {
  Int n = rat_num(q), d = rat_den(q);
  Int t = n / d; // truncates toward zero
  if (n < 0 && t * d != n) --t;
  return t;
}

Int rat_ceil(const Rat& q) { return -rat_floor(-q); }

Rat dot(const QVec& a, const QVec& b) {
  if (a.size() != b.size()) throw std::runtime_error("dot: arity mismatch");
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

} // namespace okflow
