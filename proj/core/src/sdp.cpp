#include "ncskit/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ncskit {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Symmetric matrix <-> scaled vector of the lower triangle. Off-diagonal
// entries carry sqrt(2) so Frobenius inner products are preserved.
int svec_length(int dim) { return dim * (dim + 1) / 2; }

void svec_into(const Eigen::MatrixXd& m, double* out) {
  int k = 0;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c <= r; ++c) {
      out[k++] = (r == c) ? m(r, c) : kSqrt2 * m(r, c);
    }
  }
}

Eigen::MatrixXd unsvec(const double* in, int dim) {
  Eigen::MatrixXd m(dim, dim);
  int k = 0;
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c <= r; ++c) {
      const double v = (r == c) ? in[k] : in[k] / kSqrt2;
      m(r, c) = v;
      m(c, r) = v;
      ++k;
    }
  }
  return m;
}

struct ScaledSystem {
  std::vector<AffineMatrixConstraint> constraints;
  std::vector<int> offsets;  // svec offset of each constraint
  int total_length = 0;
  bool homogeneous = true;
};

ScaledSystem validate_and_scale(const std::vector<AffineMatrixConstraint>& constraints) {
  if (constraints.empty()) {
    throw std::invalid_argument("sdp: constraint list is empty");
  }
  ScaledSystem sys;
  sys.constraints.reserve(constraints.size());
  for (const auto& constraint : constraints) {
    if (constraint.size < 1 || constraint.constant.rows() != constraint.size ||
        constraint.constant.cols() != constraint.size) {
      throw std::invalid_argument("sdp: constraint size mismatch");
    }
    auto check_symmetry = [&](const Eigen::MatrixXd& m) {
      if (m.rows() != constraint.size || m.cols() != constraint.size) {
        throw std::invalid_argument("sdp: constraint size mismatch");
      }
      const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
      const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
      if (asym > 1e-12 * scale) {
        throw std::invalid_argument("sdp: constraint matrix is not symmetric");
      }
    };
    check_symmetry(constraint.constant);
    double scale = constraint.constant.cwiseAbs().maxCoeff();
    for (const auto& [id, coeff] : constraint.coefficients) {
      (void)id;
      check_symmetry(coeff);
      scale = std::max(scale, coeff.cwiseAbs().maxCoeff());
    }
    if (scale <= 0.0) {
      scale = 1.0;
    }
    AffineMatrixConstraint scaled;
    scaled.size = constraint.size;
    // Exact symmetrization guards against representable round-off in inputs.
    scaled.constant = ((constraint.constant + constraint.constant.transpose()) / (2.0 * scale));
    if (scaled.constant.cwiseAbs().maxCoeff() > 0.0) {
      sys.homogeneous = false;
    }
    for (const auto& [id, coeff] : constraint.coefficients) {
      scaled.coefficients.emplace_back(id, (coeff + coeff.transpose()) / (2.0 * scale));
    }
    sys.offsets.push_back(sys.total_length);
    sys.total_length += svec_length(constraint.size);
    sys.constraints.push_back(std::move(scaled));
  }
  return sys;
}

// Minimum eigenvalue per block plus the distance to the shifted cone.
struct ConeGap {
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  double distance = 0.0;
};

ConeGap cone_gap(const ScaledSystem& sys, const Eigen::VectorXd& stacked, double shift) {
  ConeGap gap;
  double dist_sq = 0.0;
  for (size_t c = 0; c < sys.constraints.size(); ++c) {
    const int dim = sys.constraints[c].size;
    const Eigen::MatrixXd block = unsvec(stacked.data() + sys.offsets[c], dim);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(block, Eigen::EigenvaluesOnly);
    const auto& values = eig.eigenvalues();
    gap.min_eigenvalue = std::min(gap.min_eigenvalue, values.minCoeff());
    for (int i = 0; i < values.size(); ++i) {
      const double defect = shift - values(i);
      if (defect > 0.0) {
        dist_sq += defect * defect;
      }
    }
  }
  gap.distance = std::sqrt(dist_sq);
  return gap;
}

Eigen::VectorXd project_cone(const ScaledSystem& sys, const Eigen::VectorXd& stacked,
                             double shift) {
  Eigen::VectorXd projected(stacked.size());
  for (size_t c = 0; c < sys.constraints.size(); ++c) {
    const int dim = sys.constraints[c].size;
    Eigen::MatrixXd block = unsvec(stacked.data() + sys.offsets[c], dim);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(block);
    Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(shift);
    block = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
    svec_into(block, projected.data() + sys.offsets[c]);
  }
  return projected;
}

double margin_of_assignment(const ScaledSystem& sys, const Eigen::VectorXd& assignment) {
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& constraint : sys.constraints) {
    const Eigen::MatrixXd value = constraint.evaluate(assignment);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(value, Eigen::EigenvaluesOnly);
    margin = std::min(margin, eig.eigenvalues().minCoeff());
  }
  return margin;
}

Eigen::VectorXd identity_stack(const ScaledSystem& sys) {
  Eigen::VectorXd stacked = Eigen::VectorXd::Zero(sys.total_length);
  std::vector<double> scratch;
  for (size_t c = 0; c < sys.constraints.size(); ++c) {
    const int dim = sys.constraints[c].size;
    scratch.resize(static_cast<size_t>(svec_length(dim)));
    svec_into(Eigen::MatrixXd::Identity(dim, dim), scratch.data());
    stacked.segment(sys.offsets[c], svec_length(dim)) =
        Eigen::Map<Eigen::VectorXd>(scratch.data(), svec_length(dim));
  }
  return stacked;
}

void check_variable_ids(const ScaledSystem& sys, int num_variables) {
  for (const auto& constraint : sys.constraints) {
    for (const auto& [id, coeff] : constraint.coefficients) {
      (void)coeff;
      if (id < 0 || id >= num_variables) {
        throw std::invalid_argument("sdp: variable id out of range");
      }
    }
  }
}

// Verifies a candidate assignment with a fresh eigenvalue computation.
// Homogeneous systems scale, so any strictly positive margin is pushed up to
// the requested floor before the final check.
FeasibilityOutcome verified_outcome(const ScaledSystem& sys, const SolveOptions& options,
                                    Eigen::VectorXd assignment, long iterations) {
  double margin = margin_of_assignment(sys, assignment);
  if (sys.homogeneous && margin > 0.0 && margin < options.epsilon) {
    assignment *= 1.5 * options.epsilon / margin;
    margin = margin_of_assignment(sys, assignment);
  }
  FeasibilityOutcome outcome;
  if (margin >= options.epsilon * (1.0 - 1e-3)) {
    outcome.status = FeasStatus::feasible;
    outcome.assignment = std::move(assignment);
  } else {
    outcome.status = FeasStatus::unknown;
  }
  outcome.margin = margin;
  outcome.iterations = iterations;
  return outcome;
}

FeasibilityOutcome direct_check(const ScaledSystem& sys, const SolveOptions& options) {
  Eigen::VectorXd empty(0);
  const double margin = margin_of_assignment(sys, empty);
  FeasibilityOutcome outcome;
  outcome.status = margin >= options.epsilon ? FeasStatus::feasible : FeasStatus::infeasible;
  outcome.assignment = empty;
  outcome.margin = margin;
  return outcome;
}

}  // namespace

FeasibilityOutcome ProjectionSolver::solve(const std::vector<AffineMatrixConstraint>& constraints,
                                           int num_variables,
                                           const SolveOptions& options) const {
  if (!(options.epsilon > 0.0)) {
    throw std::invalid_argument("sdp: epsilon must be positive");
  }
  ScaledSystem sys = validate_and_scale(constraints);
  check_variable_ids(sys, num_variables);

  const int total = sys.total_length;
  const double shift = std::max(options.epsilon, options.target_margin);

  // No free variables: the verdict is a direct eigenvalue check.
  if (num_variables == 0) {
    return direct_check(sys, options);
  }

  // Stacked svec coordinates: the affine set is { j0 + J x : x in R^N }.
  Eigen::MatrixXd design = Eigen::MatrixXd::Zero(total, num_variables);
  Eigen::VectorXd base = Eigen::VectorXd::Zero(total);
  {
    std::vector<double> scratch;
    for (size_t c = 0; c < sys.constraints.size(); ++c) {
      const auto& constraint = sys.constraints[c];
      const int len = svec_length(constraint.size);
      scratch.resize(static_cast<size_t>(len));
      svec_into(constraint.constant, scratch.data());
      base.segment(sys.offsets[c], len) = Eigen::Map<Eigen::VectorXd>(scratch.data(), len);
      for (const auto& [id, coeff] : constraint.coefficients) {
        svec_into(coeff, scratch.data());
        design.col(id).segment(sys.offsets[c], len) +=
            Eigen::Map<Eigen::VectorXd>(scratch.data(), len);
      }
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const auto rank = qr.rank();
  const Eigen::MatrixXd thin_q = qr.householderQ() * Eigen::MatrixXd::Identity(total, rank);

  // Homogeneous systems are scale free: the affine set is a subspace through
  // the origin, where it nearly touches the shifted cone no matter whether
  // the system is feasible. Pinning the total trace onto a hyperplane removes
  // that degree of freedom. A subspace orthogonal to the identity stack can
  // never meet the positive cone at all.
  const Eigen::VectorXd ones = identity_stack(sys);
  Eigen::VectorXd trace_dir = Eigen::VectorXd::Zero(rank);
  double trace_norm_sq = 0.0;
  double trace_target = 0.0;
  bool pin_trace = false;
  if (sys.homogeneous) {
    trace_dir = thin_q.transpose() * ones;
    trace_norm_sq = trace_dir.squaredNorm();
    trace_target = double(total);
    if (trace_norm_sq < 1e-24 * ones.squaredNorm()) {
      FeasibilityOutcome outcome;
      outcome.status = FeasStatus::infeasible;
      outcome.margin = -std::numeric_limits<double>::infinity();
      return outcome;
    }
    pin_trace = true;
  }

  auto project_affine = [&](const Eigen::VectorXd& point) -> Eigen::VectorXd {
    Eigen::VectorXd reduced = thin_q.transpose() * (point - base);
    if (pin_trace) {
      reduced += ((trace_target - trace_dir.dot(reduced)) / trace_norm_sq) * trace_dir;
    }
    return base + thin_q * reduced;
  };
  auto recover_assignment = [&](const Eigen::VectorXd& affine_point) -> Eigen::VectorXd {
    return qr.solve(affine_point - base);
  };

  // Douglas-Rachford splitting over (cone, affine): y = P_K(z),
  // x = P_A(2y - z), z += x - y. The affine iterate x is the candidate that
  // margin checks and the stall detector watch.
  Eigen::VectorXd z;
  if (options.warm_start.size() == num_variables && options.warm_start.size() > 0) {
    z = base + design * options.warm_start;
  } else {
    z = ones;
  }

  double window_min = std::numeric_limits<double>::infinity();
  double window_max = 0.0;
  double window_margin = -std::numeric_limits<double>::infinity();
  double last_margin = -std::numeric_limits<double>::infinity();
  const double step = options.relaxation;

  for (long iteration = 1; iteration <= options.max_iterations; ++iteration) {
    const Eigen::VectorXd cone_point = project_cone(sys, z, shift);
    const Eigen::VectorXd affine_point = project_affine(2.0 * cone_point - z);
    const double splitting_gap = (affine_point - cone_point).norm();
    z += step * (affine_point - cone_point);

    const ConeGap gap = cone_gap(sys, affine_point, shift);
    last_margin = gap.min_eigenvalue;

    const double block_scale = std::max(1.0, affine_point.cwiseAbs().maxCoeff());
    const bool candidate = sys.homogeneous
                               ? gap.min_eigenvalue > 1e-11 * block_scale
                               : gap.min_eigenvalue >= options.epsilon * (1.0 - 1e-3);
    if (candidate) {
      FeasibilityOutcome outcome =
          verified_outcome(sys, options, recover_assignment(affine_point), iteration);
      if (outcome.status == FeasStatus::feasible) {
        return outcome;
      }
    }

    // A flatlined, strictly positive splitting gap means the two sets do not
    // meet; the margin guard keeps borderline feasible runs iterating.
    window_min = std::min(window_min, splitting_gap);
    window_max = std::max(window_max, splitting_gap);
    window_margin = std::max(window_margin, gap.min_eigenvalue);
    if (iteration % options.stall_window == 0) {
      const bool flat = (window_max - window_min) < options.stall_flatline * window_max;
      if (flat && window_margin < -options.margin_guard) {
        FeasibilityOutcome outcome;
        outcome.status = FeasStatus::infeasible;
        outcome.margin = gap.min_eigenvalue;
        outcome.iterations = iteration;
        return outcome;
      }
      window_min = std::numeric_limits<double>::infinity();
      window_max = 0.0;
      window_margin = -std::numeric_limits<double>::infinity();
    }

    if (!z.allFinite()) {
      break;
    }
  }

  FeasibilityOutcome outcome;
  outcome.status = FeasStatus::unknown;
  outcome.margin = last_margin;
  outcome.iterations = options.max_iterations;
  return outcome;
}

FeasibilityOutcome BarrierSolver::solve(const std::vector<AffineMatrixConstraint>& constraints,
                                        int num_variables, const SolveOptions& options) const {
  if (!(options.epsilon > 0.0)) {
    throw std::invalid_argument("sdp: epsilon must be positive");
  }
  ScaledSystem sys = validate_and_scale(constraints);
  check_variable_ids(sys, num_variables);
  if (num_variables == 0) {
    return direct_check(sys, options);
  }

  const int n_vars = num_variables;
  const size_t n_cons = sys.constraints.size();
  double barrier_param = 2.0;  // ball and margin-cap terms
  for (const auto& constraint : sys.constraints) {
    barrier_param += constraint.size;
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n_vars);
  if (options.warm_start.size() == n_vars && options.warm_start.size() > 0 &&
      options.warm_start.allFinite()) {
    x = options.warm_start;
  }
  double t = margin_of_assignment(sys, x) - 1.0;  // keeps every slack block PD
  const double radius_sq = std::max(1e16, 4.0 * x.squaredNorm() + 1.0);
  const double margin_cap = 1e6;

  auto slack_cholesky = [&](const Eigen::VectorXd& point, double level,
                            std::vector<Eigen::LLT<Eigen::MatrixXd>>& out) -> bool {
    out.clear();
    out.reserve(n_cons);
    for (const auto& constraint : sys.constraints) {
      Eigen::MatrixXd s = constraint.evaluate(point);
      s.diagonal().array() -= level;
      out.emplace_back(s);
      if (out.back().info() != Eigen::Success) {
        return false;
      }
    }
    return true;
  };
  auto barrier_value = [&](const Eigen::VectorXd& point, double level, double mu,
                           const std::vector<Eigen::LLT<Eigen::MatrixXd>>& chols) {
    double value = -level / mu;
    for (const auto& llt : chols) {
      value -= 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
    }
    value -= std::log(radius_sq - point.squaredNorm());
    value -= std::log(margin_cap - level);
    return value;
  };

  std::vector<Eigen::LLT<Eigen::MatrixXd>> chols;
  if (!slack_cholesky(x, t, chols)) {
    // Should not happen: t sits one unit below the smallest eigenvalue.
    FeasibilityOutcome outcome;
    outcome.status = FeasStatus::unknown;
    return outcome;
  }

  double mu = std::max(1.0, std::abs(t));
  constexpr double kMuFloor = 1e-10;
  constexpr double kMuShrink = 0.2;
  long newton_steps = 0;
  const long budget = std::max<long>(options.max_iterations, 100);

  Eigen::VectorXd grad(n_vars + 1);
  Eigen::MatrixXd hess(n_vars + 1, n_vars + 1);

  while (newton_steps < budget) {
    ++newton_steps;

    grad.setZero();
    hess.setZero();
    for (size_t c = 0; c < n_cons; ++c) {
      const auto& constraint = sys.constraints[c];
      const int dim = constraint.size;
      const auto& llt = chols[c];
      const int terms = static_cast<int>(constraint.coefficients.size());

      // Whitened coefficient blocks W_a = L^-1 A_a L^-T; the last column is
      // the margin direction (A_t = -I). Gradients are traces, the Hessian
      // block is the Gram matrix of the whitened svecs.
      Eigen::MatrixXd whitened_svecs(svec_length(dim), terms + 1);
      std::vector<int> ids(static_cast<size_t>(terms) + 1);
      std::vector<double> scratch(static_cast<size_t>(svec_length(dim)));
      for (int a = 0; a <= terms; ++a) {
        Eigen::MatrixXd coeff;
        if (a < terms) {
          ids[size_t(a)] = constraint.coefficients[size_t(a)].first;
          coeff = constraint.coefficients[size_t(a)].second;
        } else {
          ids[size_t(a)] = n_vars;  // margin variable
          coeff = -Eigen::MatrixXd::Identity(dim, dim);
        }
        Eigen::MatrixXd half = llt.matrixL().solve(coeff);
        Eigen::MatrixXd whitened = llt.matrixL().solve(half.transpose()).transpose();
        grad(ids[size_t(a)]) -= whitened.trace();
        svec_into(0.5 * (whitened + whitened.transpose()), scratch.data());
        whitened_svecs.col(a) = Eigen::Map<Eigen::VectorXd>(scratch.data(), svec_length(dim));
      }
      const Eigen::MatrixXd gram = whitened_svecs.transpose() * whitened_svecs;
      for (int a = 0; a <= terms; ++a) {
        for (int b = 0; b <= terms; ++b) {
          hess(ids[size_t(a)], ids[size_t(b)]) += gram(a, b);
        }
      }
    }
    // Ball barrier on x and cap barrier on the margin variable.
    const double ball_slack = radius_sq - x.squaredNorm();
    grad.head(n_vars) += (2.0 / ball_slack) * x;
    hess.topLeftCorner(n_vars, n_vars) +=
        (2.0 / ball_slack) * Eigen::MatrixXd::Identity(n_vars, n_vars);
    hess.topLeftCorner(n_vars, n_vars) += (4.0 / (ball_slack * ball_slack)) * (x * x.transpose());
    const double cap_slack = margin_cap - t;
    grad(n_vars) += 1.0 / cap_slack;
    hess(n_vars, n_vars) += 1.0 / (cap_slack * cap_slack);
    grad(n_vars) -= 1.0 / mu;

    Eigen::VectorXd step;
    {
      const double ridge = 1e-12 * std::max(1.0, hess.diagonal().maxCoeff());
      Eigen::MatrixXd regularized = hess;
      regularized.diagonal().array() += ridge;
      step = regularized.ldlt().solve(-grad);
      if (!step.allFinite()) {
        regularized.diagonal().array() += 1e6 * ridge;
        step = regularized.ldlt().solve(-grad);
        if (!step.allFinite()) {
          break;
        }
      }
    }
    const double decrement_sq = -grad.dot(step);

    // Damped step: stay strictly inside every barrier, then Armijo.
    const double phi_here = barrier_value(x, t, mu, chols);
    double alpha = 1.0;
    Eigen::VectorXd x_next;
    double t_next = t;
    std::vector<Eigen::LLT<Eigen::MatrixXd>> chols_next;
    bool moved = false;
    while (alpha > 1e-14) {
      x_next = x + alpha * step.head(n_vars);
      t_next = t + alpha * step(n_vars);
      if (x_next.squaredNorm() < radius_sq && t_next < margin_cap &&
          slack_cholesky(x_next, t_next, chols_next)) {
        const double phi_next = barrier_value(x_next, t_next, mu, chols_next);
        if (phi_next <= phi_here - 0.25 * alpha * decrement_sq ||
            phi_next < phi_here - 1e-18 * std::abs(phi_here)) {
          moved = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (moved) {
      x.swap(x_next);
      t = t_next;
      chols.swap(chols_next);
    }

    // The margin variable lower-bounds the true margin; test as soon as it
    // turns positive (plus a cheap recheck near centering).
    if (t > 0.0 || (sys.homogeneous && t > -1e-9)) {
      FeasibilityOutcome outcome = verified_outcome(sys, options, x, newton_steps);
      if (outcome.status == FeasStatus::feasible) {
        return outcome;
      }
    }

    const bool centered = !moved || decrement_sq < 0.05;
    if (centered) {
      // Path bound: optimum <= t + mu * barrier_param. Inhomogeneous systems
      // get a certified negative optimum; homogeneous ones have optimum 0
      // exactly on the boundary, so the verdict falls out at the mu floor.
      if (!sys.homogeneous && t + 2.0 * mu * barrier_param < 0.0) {
        FeasibilityOutcome outcome;
        outcome.status = FeasStatus::infeasible;
        outcome.margin = t;
        outcome.iterations = newton_steps;
        return outcome;
      }
      if (mu <= kMuFloor) {
        FeasibilityOutcome outcome = verified_outcome(sys, options, x, newton_steps);
        if (outcome.status == FeasStatus::feasible) {
          return outcome;
        }
        outcome.status = sys.homogeneous ? FeasStatus::infeasible : FeasStatus::unknown;
        outcome.margin = t;
        outcome.iterations = newton_steps;
        return outcome;
      }
      mu *= kMuShrink;
    }
  }

  FeasibilityOutcome outcome = verified_outcome(sys, options, x, newton_steps);
  if (outcome.status != FeasStatus::feasible) {
    outcome.status = FeasStatus::unknown;
    outcome.margin = t;
    outcome.iterations = newton_steps;
  }
  return outcome;
}

}  // namespace ncskit
