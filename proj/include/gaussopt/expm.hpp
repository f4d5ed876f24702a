#pragma once

#include <Eigen/Dense>

namespace gaussopt {

/// Dense matrix exponential by scaling-and-squaring with diagonal Pade
/// approximants of order 3/5/7/9/13, selected from the 1-norm so that the
/// backward error stays below double precision (Higham's theta thresholds).
Eigen::MatrixXcd matrix_exp(const Eigen::MatrixXcd& a);

}  // namespace gaussopt
