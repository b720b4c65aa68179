#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ncskit/plant.hpp"

namespace ncskit {

/// Switched representation of the buffered loop. The lifted state stacks the
/// plant state with the last `latency_bound` inputs, newest first:
///   xi_k = [x_k, u_{k-1}, u_{k-2}, ..., u_{k-latency_bound}].
/// Mode i (1-based) is active when the input applied during step k is
/// u_{k-i}; `modes[i-1]` is the corresponding transition matrix.
struct LiftedModel {
  std::vector<Eigen::MatrixXd> modes;  // latency_bound square matrices
  Eigen::MatrixXd input_map;           // routes u_k into the newest history slot
  int state_dim = 0;
  int input_dim = 0;
  int latency_bound = 0;

  int lifted_dim() const { return state_dim + latency_bound * input_dim; }
  int mode_count() const { return latency_bound; }
};

/// Builds all mode matrices and the shared input map.
LiftedModel build_lifted(const DiscretePlant& plant, const NetworkBound& bound);

/// Convex combination of the mode matrices. `alpha` must lie on the unit
/// simplex (entries in [0,1], summing to 1 within 1e-12).
Eigen::MatrixXd mode_matrix(const LiftedModel& lifted, const Eigen::VectorXd& alpha);

}  // namespace ncskit
