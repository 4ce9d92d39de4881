#ifndef OKFLOW_LINPROG_HPP
#define OKFLOW_LINPROG_HPP

#include "okflow/qlinalg.hpp"

namespace okflow {

struct LpResult {
  enum class Status { Optimal, Infeasible, Unbounded } status;
  Rat objective;
  QVec x;
};

// Exact two-phase primal simplex with Bland's rule.
// maximize c.x  subject to  A x <= b,  x >= 0.
LpResult lp_maximize(const QMat& a, const QVec& b, const QVec& c);

} // namespace okflow

#endif
