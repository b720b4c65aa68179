#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ncskit/lifted.hpp"
#include "ncskit/lmi.hpp"
#include "ncskit/sdp.hpp"

namespace ncskit {

/// The three synthesis families. Per-mode decay rates are not a separate
/// assembly: any variant can carry a per-mode GammaSpec.
enum class TheoremVariant {
  static_gain,    // one K_x acting on the plant state
  switched_gain,  // one K_x per delay mode
  extended_gain,  // [K_x K_u] acting on the full lifted state
};

std::string variant_name(TheoremVariant variant);

/// Guaranteed per-step decay of the switched Lyapunov function: either one
/// rate for every mode or one rate per mode, each in [0, 1).
struct GammaSpec {
  enum class Kind { single, per_mode };
  Kind kind = Kind::single;
  std::vector<double> values;

  static GammaSpec single(double value) { return GammaSpec{Kind::single, {value}}; }
  static GammaSpec per_mode(std::vector<double> values) {
    return GammaSpec{Kind::per_mode, std::move(values)};
  }

  /// Rate applied in the LMI row of `mode` (1-based).
  double for_mode(int mode) const {
    return kind == Kind::single ? values.front() : values[static_cast<size_t>(mode - 1)];
  }
  double min_value() const;
};

struct StaticGain {
  Eigen::MatrixXd k_x;  // m x n
};
struct SwitchedGain {
  std::vector<Eigen::MatrixXd> k_x;  // latency_bound gains, each m x n
};
struct ExtendedGain {
  Eigen::MatrixXd k_x;  // m x n
  Eigen::MatrixXd k_u;  // m x (latency_bound * m)
};
using ControllerGains = std::variant<StaticGain, SwitchedGain, ExtendedGain>;

/// Gain on the lifted state for the given mode (1-based): [K_x 0] for the
/// static family, [K_{x,i} 0] switched, [K_x K_u] extended.
Eigen::MatrixXd lifted_gain(const ControllerGains& gains, const LiftedModel& lifted, int mode);

/// Assembled feasibility problem: mode_count^2 symmetric affine constraints
/// of size 2 * lifted_dim over scalar decision variables, plus the block
/// structure needed to pull gains and Lyapunov matrices back out.
struct LmiSystem {
  VariableRegistry variables;
  std::vector<AffineMatrixConstraint> constraints;  // row-major over (i, j)
  TheoremVariant variant = TheoremVariant::static_gain;
  GammaSpec gamma;
  int state_dim = 0;
  int input_dim = 0;
  int latency_bound = 0;

  std::vector<MatrixVar> y_blocks;       // one symmetric block per mode
  std::vector<MatrixVar> x1_blocks;      // shared (size 1) or per mode
  std::vector<MatrixVar> x2_blocks;      // per mode, or shared for extended
  std::vector<MatrixVar> x3_blocks;      // per mode, or shared for extended
  std::vector<MatrixVar> z_blocks;       // shared (size 1) or per mode
  std::optional<MatrixVar> z_u_block;    // extended family only

  int num_scalar_variables() const { return variables.size(); }
  int num_constraints() const { return static_cast<int>(constraints.size()); }
};

LmiSystem assemble_lmis(const LiftedModel& lifted, TheoremVariant variant,
                        const GammaSpec& gamma);

enum class SynthesisStatus { feasible, infeasible, unknown, extraction_failed };

struct SynthesisDiagnostics {
  std::string backend;
  FeasStatus backend_status = FeasStatus::unknown;
  double margin = 0.0;
  long iterations = 0;
  double wall_seconds = 0.0;
  double extraction_condition = 0.0;  // condition number of the inverted block
};

struct SynthesisResult {
  SynthesisStatus status = SynthesisStatus::unknown;
  ControllerGains gains;
  std::vector<Eigen::MatrixXd> lyapunov;  // P_i per mode, symmetric positive definite
  GammaSpec gamma;
  SynthesisDiagnostics diagnostics;
  Eigen::VectorXd raw_assignment;  // backend solution the gains were read from

  bool feasible() const { return status == SynthesisStatus::feasible; }
};

/// Solves the assembled system and, on strict feasibility, extracts gains and
/// Lyapunov certificates. Infeasible and unknown verdicts are outcomes, not
/// errors. A near-singular inversion block (condition above 1e12) triggers
/// one re-solve with a tightened floor before failing extraction.
SynthesisResult solve_feasibility(const LmiSystem& system, const SdpBackend& backend,
                                  SolveOptions options = {});

/// Which decay rates the bisection moves. Free modes (1-based) move jointly;
/// all other modes stay pinned at zero.
struct GammaSearch {
  GammaSpec::Kind kind = GammaSpec::Kind::single;
  std::vector<int> free_modes;

  static GammaSearch single() { return {GammaSpec::Kind::single, {}}; }
  static GammaSearch per_mode(std::vector<int> free) {
    return {GammaSpec::Kind::per_mode, std::move(free)};
  }
};

struct MaximizeOutcome {
  bool found = false;  // false when even gamma = 0 has no solution
  GammaSpec gamma;
  SynthesisResult result;  // the last feasible solve
  int solves = 0;
  int unknown_verdicts = 0;  // unknowns were treated as infeasible
};

/// Largest admissible decay rate by bisection over [0, 1), using
/// solve_feasibility as the oracle; stops when the bracket is below `tol`.
MaximizeOutcome maximize_gamma(const LiftedModel& lifted, TheoremVariant variant,
                               const GammaSearch& search, double tol, const SdpBackend& backend,
                               SolveOptions options = {});

struct VerificationReport {
  double min_q_eigenvalue = 0.0;        // over all mode pairs
  std::vector<double> spectral_radii;   // closed loop, per mode
  double max_spectral_radius = 0.0;
  double schur_margin = 0.0;            // min residual eigenvalue over samples
  int schur_samples = 0;
  bool lyapunov_positive = false;
  bool modes_stable = false;
  bool schur_ok = false;

  bool ok() const { return lyapunov_positive && modes_stable && schur_ok; }
};

/// Checks a feasible result through the proof chain: positive definiteness of
/// every coupled certificate block, spectral radius of every closed-loop
/// mode, and the decay inequality on randomly sampled simplex pairs (all
/// vertex pairs are always included).
VerificationReport verify_solution(const LiftedModel& lifted, const SynthesisResult& result,
                                   int schur_samples = 200, std::uint64_t seed = 20260809ULL);

struct BaselineLmiCount {
  std::uint64_t lmi_count = 0;
  bool saturated = false;  // exponent exceeded 63 bits
  std::string comparison;
};

/// LMI count 2^(2 * latency_bound * multiplicity) of the over-approximation
/// synthesis this toolkit replaces, with a comparison line against the
/// switched design's latency_bound^2.
BaselineLmiCount baseline_counts(int latency_bound, int modal_multiplicity);

}  // namespace ncskit
