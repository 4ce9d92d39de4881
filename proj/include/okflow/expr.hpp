#ifndef OKFLOW_EXPR_HPP
#define OKFLOW_EXPR_HPP

#include "okflow/series.hpp"

#include <string>
#include <vector>

namespace okflow {

// Parses a polynomial expression over the named variables into an exact
// TruncSeries. Supports + - * ^ and parentheses; '/' only with an integer
// literal divisor. Example: "y^2 - x^3 - 1".
TruncSeries parse_polynomial(const std::string& text, const std::vector<std::string>& variables);

} // namespace okflow

#endif
