#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ncskit/lmi.hpp"

namespace ncskit {

enum class FeasStatus { feasible, infeasible, unknown };

struct FeasibilityOutcome {
  FeasStatus status = FeasStatus::unknown;
  Eigen::VectorXd assignment;  // valid only when status == feasible
  double margin = 0.0;         // min eigenvalue across scaled constraints
  long iterations = 0;
};

struct SolveOptions {
  /// Positive-definiteness floor, applied after per-constraint scaling.
  double epsilon = 1e-7;
  long max_iterations = 50000;
  /// Depth of the cone shift the projection iterates aim for. Values above
  /// epsilon give the iteration an interior to converge into.
  double target_margin = 1e-5;
  /// Step scaling of the splitting iteration, in (0, 2).
  double relaxation = 1.0;
  /// Infeasibility is declared once the projection gap flatlines at a
  /// positive value over one window while the margin stays clearly negative.
  int stall_window = 500;
  double stall_flatline = 1e-3;
  double margin_guard = 1e-4;
  /// Optional warm start (size = number of variables).
  Eigen::VectorXd warm_start;
};

/// Decides strict feasibility of a set of symmetric affine matrix
/// inequalities F_c(x) >= epsilon I and returns a feasible point when one is
/// found. Implementations must validate any claimed solution with an
/// independent eigenvalue computation before reporting it feasible.
class SdpBackend {
 public:
  virtual ~SdpBackend() = default;
  virtual FeasibilityOutcome solve(const std::vector<AffineMatrixConstraint>& constraints,
                                   int num_variables, const SolveOptions& options) const = 0;
  virtual std::string name() const = 0;
};

/// Default backend: maximizes the common eigenvalue margin
///   max t  s.t.  F_c(x) >= t I  for all c
/// along the log-det barrier central path with damped Newton steps. The sign
/// of the optimum decides feasibility; the barrier duality gap certifies the
/// infeasible verdict. Handles thin feasible sets that defeat first-order
/// projection methods.
class BarrierSolver final : public SdpBackend {
 public:
  FeasibilityOutcome solve(const std::vector<AffineMatrixConstraint>& constraints,
                           int num_variables, const SolveOptions& options) const override;
  std::string name() const override { return "central-path-barrier"; }
};

/// Alternative backend: alternating projections between the affine set
/// spanned by the constraints and the product of shifted PSD cones,
/// reflection-accelerated, cone-side correction. Adequate for systems whose
/// feasible set has noticeable width; kept for cross-checking the default.
///
/// Homogeneous systems (zero constant blocks) are decided exactly up to
/// iteration limits: any strictly positive margin proves feasibility since
/// solutions scale.
class ProjectionSolver final : public SdpBackend {
 public:
  FeasibilityOutcome solve(const std::vector<AffineMatrixConstraint>& constraints,
                           int num_variables, const SolveOptions& options) const override;
  std::string name() const override { return "alternating-projections"; }
};

}  // namespace ncskit
