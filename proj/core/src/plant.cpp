#include "ncskit/plant.hpp"

#include <stdexcept>

#include "ncskit/matrix_exp.hpp"

namespace ncskit {

namespace {

// Top-right block of exp([[A, B],[0, 0]] * t): the integral of e^{A s} B
// over [0, t]. Shares the exponential evaluation with the A_d block.
void augmented_exponential(const ContinuousPlant& plant, double t, Eigen::MatrixXd* a_part,
                           Eigen::MatrixXd* b_part) {
  const int n = plant.state_dim();
  const int m = plant.input_dim();
  Eigen::MatrixXd augmented = Eigen::MatrixXd::Zero(n + m, n + m);
  augmented.topLeftCorner(n, n) = plant.a * t;
  augmented.topRightCorner(n, m) = plant.b * t;
  const Eigen::MatrixXd exponential = matrix_exponential(augmented);
  if (a_part != nullptr) {
    *a_part = exponential.topLeftCorner(n, n);
  }
  if (b_part != nullptr) {
    *b_part = exponential.topRightCorner(n, m);
  }
}

}  // namespace

ContinuousPlant make_continuous_plant(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() < 1 || b.cols() < 1) {
    throw std::invalid_argument("plant: state and input dimensions must be at least 1");
  }
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("plant: A must be square");
  }
  if (b.rows() != a.rows()) {
    throw std::invalid_argument("plant: B must have the same number of rows as A");
  }
  if (!a.allFinite() || !b.allFinite()) {
    throw std::invalid_argument("plant: matrices must be finite");
  }
  return ContinuousPlant{a, b};
}

NetworkBound delta_bound(int max_delay_steps, int max_consecutive_drops) {
  if (max_delay_steps < 1) {
    throw std::invalid_argument("delta_bound: max_delay_steps must be at least 1");
  }
  if (max_consecutive_drops < 0) {
    throw std::invalid_argument("delta_bound: max_consecutive_drops must be nonnegative");
  }
  return NetworkBound{max_delay_steps, max_consecutive_drops};
}

DiscretePlant discretize(const ContinuousPlant& plant, double period) {
  if (!(period > 0.0)) {
    throw std::invalid_argument("discretize: period must be positive");
  }
  DiscretePlant result;
  result.period = period;
  augmented_exponential(plant, period, &result.a_d, &result.b_d);
  return result;
}

Eigen::MatrixXd input_interval_matrix(const ContinuousPlant& plant, double period, double t1,
                                      double t2) {
  if (!(period > 0.0)) {
    throw std::invalid_argument("input_interval_matrix: period must be positive");
  }
  if (t1 < 0.0 || t2 < t1 || t2 > period) {
    throw std::invalid_argument("input_interval_matrix: need 0 <= t1 <= t2 <= period");
  }
  // Substituting sigma = T - s turns the integral into
  // G(T - t1) - G(T - t2) with G(t) = int_0^t e^{A sigma} B dsigma.
  Eigen::MatrixXd upper;
  Eigen::MatrixXd lower;
  augmented_exponential(plant, period - t1, nullptr, &upper);
  augmented_exponential(plant, period - t2, nullptr, &lower);
  return upper - lower;
}

}  // namespace ncskit
