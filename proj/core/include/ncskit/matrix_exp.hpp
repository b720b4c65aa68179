#pragma once

#include <Eigen/Dense>

namespace ncskit {

/// Dense matrix exponential via scaling-and-squaring with a diagonal Pade
/// approximant of order 6. The argument is halved until its infinity norm
/// is at most 0.5 before the rational approximation is applied.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& a);

}  // namespace ncskit
