#include "ncskit/synthesis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace ncskit {

namespace {

void validate_gamma(const GammaSpec& gamma, int mode_count) {
  const size_t expected = gamma.kind == GammaSpec::Kind::single ? 1 : size_t(mode_count);
  if (gamma.values.size() != expected) {
    throw std::invalid_argument("gamma: value count does not match the mode count");
  }
  for (double value : gamma.values) {
    if (!(value >= 0.0) || !(value < 1.0)) {
      throw std::invalid_argument("gamma: every value must lie in [0, 1)");
    }
  }
}

// X block with the lower-block-triangular structure of the theorems:
// [[X1, 0], [X2, X3]].
AffineMatrix structured_x(const MatrixVar& x1, const MatrixVar& x2, const MatrixVar& x3, int n,
                          int history) {
  AffineMatrix x(n + history, n + history);
  x.set_block(0, 0, x1.expr());
  x.set_block(n, 0, x2.expr());
  x.set_block(n, n, x3.expr());
  return x;
}

Eigen::MatrixXd structured_x_value(const MatrixVar& x1, const MatrixVar& x2, const MatrixVar& x3,
                                   const Eigen::VectorXd& assignment, int n, int history) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n + history, n + history);
  x.topLeftCorner(n, n) = x1.value(assignment);
  x.bottomLeftCorner(history, n) = x2.value(assignment);
  x.bottomRightCorner(history, history) = x3.value(assignment);
  return x;
}

double condition_number(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const double smallest = svd.singularValues().minCoeff();
  if (smallest <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return svd.singularValues().maxCoeff() / smallest;
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

double spectral_radius(const Eigen::MatrixXd& m) {
  return m.eigenvalues().cwiseAbs().maxCoeff();
}

struct Extraction {
  ControllerGains gains;
  std::vector<Eigen::MatrixXd> lyapunov;
  double condition = 0.0;
  bool ok = false;
};

Extraction extract(const LmiSystem& system, const Eigen::VectorXd& assignment) {
  Extraction out;
  const int n = system.state_dim;
  const int m = system.input_dim;
  const int delta = system.latency_bound;
  const int history = delta * m;

  out.lyapunov.reserve(size_t(delta));
  for (const auto& y : system.y_blocks) {
    const Eigen::MatrixXd y_value = y.value(assignment);
    Eigen::LLT<Eigen::MatrixXd> llt(y_value);
    if (llt.info() != Eigen::Success) {
      return out;  // Y_i not positive definite; extraction fails
    }
    out.lyapunov.push_back(symmetrize(y_value.inverse()));
  }

  constexpr double kConditionLimit = 1e12;
  switch (system.variant) {
    case TheoremVariant::static_gain: {
      const Eigen::MatrixXd x1 = system.x1_blocks[0].value(assignment);
      out.condition = condition_number(x1);
      if (out.condition > kConditionLimit) {
        return out;
      }
      out.gains = StaticGain{system.z_blocks[0].value(assignment) * x1.inverse()};
      break;
    }
    case TheoremVariant::switched_gain: {
      SwitchedGain gains;
      for (int i = 0; i < delta; ++i) {
        const Eigen::MatrixXd x1 = system.x1_blocks[size_t(i)].value(assignment);
        out.condition = std::max(out.condition, condition_number(x1));
        if (out.condition > kConditionLimit) {
          return out;
        }
        gains.k_x.push_back(system.z_blocks[size_t(i)].value(assignment) * x1.inverse());
      }
      out.gains = std::move(gains);
      break;
    }
    case TheoremVariant::extended_gain: {
      const Eigen::MatrixXd x = structured_x_value(system.x1_blocks[0], system.x2_blocks[0],
                                                   system.x3_blocks[0], assignment, n, history);
      out.condition = condition_number(x);
      if (out.condition > kConditionLimit) {
        return out;
      }
      Eigen::MatrixXd z_hat(m, n + history);
      z_hat.leftCols(n) = system.z_blocks[0].value(assignment);
      z_hat.rightCols(history) = system.z_u_block->value(assignment);
      const Eigen::MatrixXd k_hat = z_hat * x.inverse();
      out.gains = ExtendedGain{k_hat.leftCols(n), k_hat.rightCols(history)};
      break;
    }
  }
  out.ok = true;
  return out;
}

}  // namespace

std::string variant_name(TheoremVariant variant) {
  switch (variant) {
    case TheoremVariant::static_gain:
      return "static";
    case TheoremVariant::switched_gain:
      return "switched";
    case TheoremVariant::extended_gain:
      return "extended";
  }
  return "unknown";
}

double GammaSpec::min_value() const {
  return *std::min_element(values.begin(), values.end());
}

Eigen::MatrixXd lifted_gain(const ControllerGains& gains, const LiftedModel& lifted, int mode) {
  const int m = lifted.input_dim;
  const int dim = lifted.lifted_dim();
  Eigen::MatrixXd k_hat = Eigen::MatrixXd::Zero(m, dim);
  if (const auto* fixed = std::get_if<StaticGain>(&gains)) {
    k_hat.leftCols(lifted.state_dim) = fixed->k_x;
  } else if (const auto* switched = std::get_if<SwitchedGain>(&gains)) {
    k_hat.leftCols(lifted.state_dim) = switched->k_x.at(size_t(mode - 1));
  } else {
    const auto& extended = std::get<ExtendedGain>(gains);
    k_hat.leftCols(lifted.state_dim) = extended.k_x;
    k_hat.rightCols(dim - lifted.state_dim) = extended.k_u;
  }
  return k_hat;
}

LmiSystem assemble_lmis(const LiftedModel& lifted, TheoremVariant variant,
                        const GammaSpec& gamma) {
  const int n = lifted.state_dim;
  const int m = lifted.input_dim;
  const int delta = lifted.latency_bound;
  const int history = delta * m;
  const int dim = n + history;
  validate_gamma(gamma, delta);

  LmiSystem system;
  system.variant = variant;
  system.gamma = gamma;
  system.state_dim = n;
  system.input_dim = m;
  system.latency_bound = delta;

  auto& reg = system.variables;
  for (int i = 1; i <= delta; ++i) {
    system.y_blocks.push_back(MatrixVar::symmetric(reg, "Y" + std::to_string(i), dim));
  }
  switch (variant) {
    case TheoremVariant::static_gain:
      system.x1_blocks.push_back(MatrixVar::full(reg, "X1", n, n));
      for (int i = 1; i <= delta; ++i) {
        system.x2_blocks.push_back(MatrixVar::full(reg, "X2_" + std::to_string(i), history, n));
      }
      for (int i = 1; i <= delta; ++i) {
        system.x3_blocks.push_back(
            MatrixVar::full(reg, "X3_" + std::to_string(i), history, history));
      }
      system.z_blocks.push_back(MatrixVar::full(reg, "Z", m, n));
      break;
    case TheoremVariant::switched_gain:
      for (int i = 1; i <= delta; ++i) {
        system.x1_blocks.push_back(MatrixVar::full(reg, "X1_" + std::to_string(i), n, n));
      }
      for (int i = 1; i <= delta; ++i) {
        system.x2_blocks.push_back(MatrixVar::full(reg, "X2_" + std::to_string(i), history, n));
      }
      for (int i = 1; i <= delta; ++i) {
        system.x3_blocks.push_back(
            MatrixVar::full(reg, "X3_" + std::to_string(i), history, history));
      }
      for (int i = 1; i <= delta; ++i) {
        system.z_blocks.push_back(MatrixVar::full(reg, "Z" + std::to_string(i), m, n));
      }
      break;
    case TheoremVariant::extended_gain:
      system.x1_blocks.push_back(MatrixVar::full(reg, "X1", n, n));
      system.x2_blocks.push_back(MatrixVar::full(reg, "X2", history, n));
      system.x3_blocks.push_back(MatrixVar::full(reg, "X3", history, history));
      system.z_blocks.push_back(MatrixVar::full(reg, "Zx", m, n));
      system.z_u_block = MatrixVar::full(reg, "Zu", m, history);
      break;
  }

  // Z-hat on the lifted state: [Z 0] for the state-feedback families, the
  // full [Zx Zu] for the extended one.
  auto z_hat_for_mode = [&](int mode) {
    AffineMatrix z_hat(m, dim);
    const MatrixVar& z =
        system.z_blocks[variant == TheoremVariant::switched_gain ? size_t(mode - 1) : 0];
    z_hat.set_block(0, 0, z.expr());
    if (variant == TheoremVariant::extended_gain) {
      z_hat.set_block(0, n, system.z_u_block->expr());
    }
    return z_hat;
  };
  auto x_for_mode = [&](int mode) {
    const bool per_mode_x = variant != TheoremVariant::extended_gain;
    const bool per_mode_x1 = variant == TheoremVariant::switched_gain;
    const size_t xi = per_mode_x ? size_t(mode - 1) : 0;
    return structured_x(system.x1_blocks[per_mode_x1 ? size_t(mode - 1) : 0],
                        system.x2_blocks[xi], system.x3_blocks[xi], n, history);
  };

  system.constraints.reserve(size_t(delta) * size_t(delta));
  for (int i = 1; i <= delta; ++i) {
    const AffineMatrix x_i = x_for_mode(i);
    const AffineMatrix z_hat = z_hat_for_mode(i);
    const AffineMatrix closed = lifted.modes[size_t(i - 1)] * x_i - lifted.input_map * z_hat;
    const AffineMatrix closed_t = closed.transpose();
    AffineMatrix top_left = x_i + x_i.transpose() - system.y_blocks[size_t(i - 1)].expr();
    const double rate = gamma.for_mode(i);
    for (int j = 1; j <= delta; ++j) {
      AffineMatrix block(2 * dim, 2 * dim);
      block.set_block(0, 0, top_left);
      block.set_block(0, dim, closed_t);
      block.set_block(dim, 0, closed);
      block.set_block(dim, dim, (1.0 - rate) * system.y_blocks[size_t(j - 1)].expr());
      system.constraints.push_back(block.to_constraint(reg.size()));
    }
  }
  return system;
}

SynthesisResult solve_feasibility(const LmiSystem& system, const SdpBackend& backend,
                                  SolveOptions options) {
  const auto start = std::chrono::steady_clock::now();
  SynthesisResult result;
  result.gamma = system.gamma;
  result.diagnostics.backend = backend.name();

  FeasibilityOutcome outcome =
      backend.solve(system.constraints, system.num_scalar_variables(), options);
  result.diagnostics.backend_status = outcome.status;
  result.diagnostics.margin = outcome.margin;
  result.diagnostics.iterations = outcome.iterations;

  if (outcome.status == FeasStatus::feasible) {
    Extraction extraction = extract(system, outcome.assignment);
    if (!extraction.ok) {
      // Near-singular inversion block: re-solve once with a tighter floor.
      SolveOptions retry = options;
      retry.epsilon *= 10.0;
      retry.target_margin = std::max(retry.target_margin, retry.epsilon);
      FeasibilityOutcome second =
          backend.solve(system.constraints, system.num_scalar_variables(), retry);
      if (second.status == FeasStatus::feasible) {
        extraction = extract(system, second.assignment);
        outcome = std::move(second);
      }
    }
    if (extraction.ok) {
      result.status = SynthesisStatus::feasible;
      result.gains = std::move(extraction.gains);
      result.lyapunov = std::move(extraction.lyapunov);
      result.raw_assignment = outcome.assignment;
    } else {
      result.status = SynthesisStatus::extraction_failed;
    }
    result.diagnostics.extraction_condition = extraction.condition;
    result.diagnostics.margin = outcome.margin;
    result.diagnostics.iterations = outcome.iterations;
  } else if (outcome.status == FeasStatus::infeasible) {
    result.status = SynthesisStatus::infeasible;
  } else {
    result.status = SynthesisStatus::unknown;
  }

  result.diagnostics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

MaximizeOutcome maximize_gamma(const LiftedModel& lifted, TheoremVariant variant,
                               const GammaSearch& search, double tol, const SdpBackend& backend,
                               SolveOptions options) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("maximize_gamma: tol must be positive");
  }
  const int delta = lifted.latency_bound;
  if (search.kind == GammaSpec::Kind::per_mode) {
    if (search.free_modes.empty()) {
      throw std::invalid_argument("maximize_gamma: per-mode search needs free modes");
    }
    for (int mode : search.free_modes) {
      if (mode < 1 || mode > delta) {
        throw std::invalid_argument("maximize_gamma: free mode index out of range");
      }
    }
  }

  auto gamma_at = [&](double value) {
    if (search.kind == GammaSpec::Kind::single) {
      return GammaSpec::single(value);
    }
    std::vector<double> values(size_t(delta), 0.0);
    for (int mode : search.free_modes) {
      values[size_t(mode - 1)] = value;
    }
    return GammaSpec::per_mode(std::move(values));
  };

  MaximizeOutcome outcome;
  auto solve_at = [&](double value) {
    const LmiSystem system = assemble_lmis(lifted, variant, gamma_at(value));
    SolveOptions local = options;
    if (outcome.result.feasible()) {
      local.warm_start = outcome.result.raw_assignment;
    }
    SynthesisResult result = solve_feasibility(system, backend, local);
    ++outcome.solves;
    if (result.status == SynthesisStatus::unknown) {
      ++outcome.unknown_verdicts;
    }
    return result;
  };

  SynthesisResult at_zero = solve_at(0.0);
  if (!at_zero.feasible()) {
    outcome.found = false;
    outcome.result = std::move(at_zero);
    return outcome;
  }
  outcome.found = true;
  outcome.gamma = gamma_at(0.0);
  outcome.result = std::move(at_zero);

  double lo = 0.0;
  double hi = 1.0;
  constexpr int kMaxBisectionSteps = 60;
  for (int step = 0; step < kMaxBisectionSteps && (hi - lo) > tol; ++step) {
    const double mid = 0.5 * (lo + hi);
    SynthesisResult result = solve_at(mid);
    if (result.feasible()) {
      lo = mid;
      outcome.gamma = gamma_at(mid);
      outcome.result = std::move(result);
    } else {
      hi = mid;
    }
  }
  return outcome;
}

VerificationReport verify_solution(const LiftedModel& lifted, const SynthesisResult& result,
                                   int schur_samples, std::uint64_t seed) {
  if (!result.feasible()) {
    throw std::invalid_argument("verify_solution: result must come from a feasible solve");
  }
  const int delta = lifted.latency_bound;
  const int dim = lifted.lifted_dim();
  const auto& p = result.lyapunov;

  VerificationReport report;
  report.min_q_eigenvalue = std::numeric_limits<double>::infinity();
  report.schur_margin = std::numeric_limits<double>::infinity();

  std::vector<Eigen::MatrixXd> closed_loops;
  closed_loops.reserve(size_t(delta));
  for (int i = 1; i <= delta; ++i) {
    closed_loops.push_back(lifted.modes[size_t(i - 1)] -
                           lifted.input_map * lifted_gain(result.gains, lifted, i));
  }

  // Coupled certificate blocks, one per mode pair.
  for (int i = 1; i <= delta; ++i) {
    const double rate = result.gamma.for_mode(i);
    for (int j = 1; j <= delta; ++j) {
      Eigen::MatrixXd q(2 * dim, 2 * dim);
      q.topLeftCorner(dim, dim) = p[size_t(i - 1)];
      q.topRightCorner(dim, dim) = closed_loops[size_t(i - 1)].transpose() * p[size_t(j - 1)];
      q.bottomLeftCorner(dim, dim) = q.topRightCorner(dim, dim).transpose();
      q.bottomRightCorner(dim, dim) = (1.0 - rate) * p[size_t(j - 1)];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrize(q), Eigen::EigenvaluesOnly);
      report.min_q_eigenvalue = std::min(report.min_q_eigenvalue, eig.eigenvalues().minCoeff());
    }
  }
  report.lyapunov_positive = report.min_q_eigenvalue > 0.0;

  report.max_spectral_radius = 0.0;
  for (const auto& loop : closed_loops) {
    report.spectral_radii.push_back(spectral_radius(loop));
    report.max_spectral_radius = std::max(report.max_spectral_radius, report.spectral_radii.back());
  }
  report.modes_stable = report.max_spectral_radius < 1.0;

  // Decay inequality on the simplex: vertices first, then random points.
  std::mt19937_64 rng(seed);
  auto random_simplex = [&]() {
    Eigen::VectorXd alpha(delta);
    double total = 0.0;
    for (int i = 0; i < delta; ++i) {
      const double u = double(rng() >> 11) * 0x1.0p-53;
      alpha(i) = -std::log(std::max(u, 1e-300));
      total += alpha(i);
    }
    return Eigen::VectorXd(alpha / total);
  };
  auto check_pair = [&](const Eigen::VectorXd& alpha, const Eigen::VectorXd& alpha_next) {
    Eigen::MatrixXd p_now = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd p_next = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd loop = Eigen::MatrixXd::Zero(dim, dim);
    double rate = 0.0;
    for (int i = 0; i < delta; ++i) {
      p_now += alpha(i) * p[size_t(i)];
      p_next += alpha_next(i) * p[size_t(i)];
      loop += alpha(i) * closed_loops[size_t(i)];
      rate += alpha(i) * result.gamma.for_mode(i + 1);
    }
    const Eigen::MatrixXd residual =
        symmetrize(p_now - loop.transpose() * p_next * loop - rate * p_now);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(residual, Eigen::EigenvaluesOnly);
    report.schur_margin = std::min(report.schur_margin, eig.eigenvalues().minCoeff());
  };

  for (int i = 0; i < delta; ++i) {
    for (int j = 0; j < delta; ++j) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(delta);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(delta);
      a(i) = 1.0;
      b(j) = 1.0;
      check_pair(a, b);
    }
  }
  for (int s = 0; s < schur_samples; ++s) {
    check_pair(random_simplex(), random_simplex());
  }
  report.schur_samples = schur_samples;
  report.schur_ok = report.schur_margin > 0.0;
  return report;
}

BaselineLmiCount baseline_counts(int latency_bound, int modal_multiplicity) {
  if (latency_bound < 1 || modal_multiplicity < 1) {
    throw std::invalid_argument("baseline_counts: arguments must be positive");
  }
  BaselineLmiCount out;
  const long exponent = 2L * latency_bound * modal_multiplicity;
  if (exponent >= 64) {
    out.saturated = true;
    out.lmi_count = std::numeric_limits<std::uint64_t>::max();
  } else {
    out.lmi_count = std::uint64_t(1) << exponent;
  }
  const std::uint64_t switched = std::uint64_t(latency_bound) * std::uint64_t(latency_bound);
  out.comparison = "over-approximation synthesis: " +
                   (out.saturated ? std::string("2^") + std::to_string(exponent) + " (saturated)"
                                  : std::to_string(out.lmi_count)) +
                   " LMIs vs " + std::to_string(switched) + " for the switched design";
  return out;
}

}  // namespace ncskit
