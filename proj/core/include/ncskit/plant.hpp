#pragma once

#include <Eigen/Dense>

namespace ncskit {

/// Continuous-time LTI plant xdot = A x + B u.
struct ContinuousPlant {
  Eigen::MatrixXd a;  // n x n
  Eigen::MatrixXd b;  // n x m

  int state_dim() const { return static_cast<int>(a.rows()); }
  int input_dim() const { return static_cast<int>(b.cols()); }
};

/// Zero-order-hold discretization of a ContinuousPlant at a fixed period.
struct DiscretePlant {
  Eigen::MatrixXd a_d;  // n x n
  Eigen::MatrixXd b_d;  // n x m
  double period = 0.0;  // seconds

  int state_dim() const { return static_cast<int>(a_d.rows()); }
  int input_dim() const { return static_cast<int>(b_d.cols()); }
};

/// Worst-case network latency budget, in sampling periods: at most
/// `max_delay_steps` periods of transmission delay plus at most
/// `max_consecutive_drops` lost packets in a row.
struct NetworkBound {
  int max_delay_steps = 1;        // d_bar >= 1
  int max_consecutive_drops = 0;  // p_bar >= 0

  /// Total number of periods a control value may lag its sample.
  int latency_bound() const { return max_delay_steps + max_consecutive_drops; }
};

/// Validates and constructs a plant; throws std::invalid_argument on
/// non-square A, row mismatch, empty dimensions, or non-finite entries.
ContinuousPlant make_continuous_plant(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Combines the delay and dropout bounds. Requires max_delay_steps >= 1:
/// the actuation buffer rounds every latency up to at least one period,
/// so a zero-delay network is not representable.
NetworkBound delta_bound(int max_delay_steps, int max_consecutive_drops);

/// Exact ZOH discretization. Both matrices come from the exponential of the
/// (n+m)-dimensional block matrix [[A, B], [0, 0]] scaled by the period,
/// which stays exact when A is singular.
DiscretePlant discretize(const ContinuousPlant& plant, double period);

/// Integral of e^{A (T - s)} B over s in [t1, t2], the input contribution of
/// a sub-interval of one sampling period. Requires 0 <= t1 <= t2 <= T.
Eigen::MatrixXd input_interval_matrix(const ContinuousPlant& plant, double period, double t1,
                                      double t2);

}  // namespace ncskit
