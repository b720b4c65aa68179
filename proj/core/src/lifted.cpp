#include "ncskit/lifted.hpp"

#include <cmath>
#include <stdexcept>

namespace ncskit {

LiftedModel build_lifted(const DiscretePlant& plant, const NetworkBound& bound) {
  const int n = plant.state_dim();
  const int m = plant.input_dim();
  const int delta = bound.latency_bound();
  const int dim = n + delta * m;

  LiftedModel lifted;
  lifted.state_dim = n;
  lifted.input_dim = m;
  lifted.latency_bound = delta;
  lifted.modes.reserve(delta);

  for (int mode = 1; mode <= delta; ++mode) {
    Eigen::MatrixXd a_hat = Eigen::MatrixXd::Zero(dim, dim);
    a_hat.topLeftCorner(n, n) = plant.a_d;
    // The applied input is history slot `mode`; the slot for u_{k-i} starts
    // at column n + (i-1) m.
    a_hat.block(0, n + (mode - 1) * m, n, m) = plant.b_d;
    // History shift: slot i+1 of the next state copies slot i.
    if (delta > 1) {
      a_hat.block(n + m, n, (delta - 1) * m, (delta - 1) * m) =
          Eigen::MatrixXd::Identity((delta - 1) * m, (delta - 1) * m);
    }
    lifted.modes.push_back(std::move(a_hat));
  }

  lifted.input_map = Eigen::MatrixXd::Zero(dim, m);
  lifted.input_map.block(n, 0, m, m) = Eigen::MatrixXd::Identity(m, m);
  return lifted;
}

Eigen::MatrixXd mode_matrix(const LiftedModel& lifted, const Eigen::VectorXd& alpha) {
  if (alpha.size() != lifted.mode_count()) {
    throw std::invalid_argument("mode_matrix: alpha length must equal the mode count");
  }
  if ((alpha.array() < 0.0).any() || (alpha.array() > 1.0).any() ||
      std::abs(alpha.sum() - 1.0) > 1e-12) {
    throw std::invalid_argument("mode_matrix: alpha must lie on the unit simplex");
  }
  Eigen::MatrixXd combined = Eigen::MatrixXd::Zero(lifted.lifted_dim(), lifted.lifted_dim());
  for (int i = 0; i < lifted.mode_count(); ++i) {
    combined += alpha(i) * lifted.modes[static_cast<size_t>(i)];
  }
  return combined;
}

}  // namespace ncskit
