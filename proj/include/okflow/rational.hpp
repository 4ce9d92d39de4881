#ifndef OKFLOW_RATIONAL_HPP
#define OKFLOW_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace okflow {

// Arbitrary-precision integer and rational scalars. Expression templates are
// disabled so values always materialize; numerator()/denominator() then work
// on any expression result and the types behave like plain value types.
namespace mp = boost::multiprecision;
using Int = mp::number<mp::cpp_int_backend<>, mp::et_off>;
using Rat = mp::number<mp::rational_adaptor<mp::cpp_int_backend<>>, mp::et_off>;

inline Int rat_num(const Rat& q) { return mp::numerator(q); }
inline Int rat_den(const Rat& q) { return mp::denominator(q); }

inline Rat rat_abs(const Rat& q) { return q < 0 ? Rat(-q) : q; }
inline Int int_abs(const Int& z) { return z < 0 ? Int(-z) : z; }

// Parses "p", "-p", or "p/q". Throws std::runtime_error on malformed input.
Rat rat_parse(const std::string& s);

// Canonical text form: "p" when the denominator is 1, else "p/q".
std::string rat_str(const Rat& q);

double rat_to_double(const Rat& q);

Int rat_floor(const Rat& q);
Int rat_ceil(const Rat& q);

// Exact conversion helpers for points in Q^n.
using QVec = std::vector<Rat>;

Rat dot(const QVec& a, const QVec& b);

} // namespace okflow

#endif
