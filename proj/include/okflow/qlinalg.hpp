#ifndef OKFLOW_QLINALG_HPP
#define OKFLOW_QLINALG_HPP

#include "okflow/rational.hpp"

#include <optional>
#include <vector>

namespace okflow {

// Small dense rational matrices as row vectors. Everything here is exact.
using QMat = std::vector<QVec>;

std::size_t qmat_rank(QMat m);

// Solves A*x = b for A with full column rank (A given as rows). Returns
// nullopt when the system is inconsistent or the rank is deficient.
std::optional<QVec> qmat_solve(QMat a, QVec b);

Rat qmat_det(QMat m);

} // namespace okflow

#endif
