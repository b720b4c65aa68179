// Scratch probe for the barrier backend on the rotary-servo system.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "ncskit/lifted.hpp"
#include "ncskit/plant.hpp"
#include "ncskit/sdp.hpp"
#include "ncskit/synthesis.hpp"

using namespace ncskit;

int main() {
  Eigen::MatrixXd a_c(2, 2);
  a_c << 0.0, 1.0, 0.0, -72.47703619909503;
  Eigen::MatrixXd b_c(2, 1);
  b_c << 0.0, 75.31694148176616;
  const ContinuousPlant plant = make_continuous_plant(a_c, b_c);
  const DiscretePlant dp = discretize(plant, 0.02);
  const LiftedModel lifted = build_lifted(dp, delta_bound(4, 0));
  BarrierSolver backend;

  auto probe = [&](TheoremVariant variant, const GammaSpec& gamma, const char* label) {
    const LmiSystem system = assemble_lmis(lifted, variant, gamma);
    const auto t0 = std::chrono::steady_clock::now();
    SynthesisResult r = solve_feasibility(system, backend, {});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s -> status=%d margin=%+.3e steps=%ld time=%.2fs", label, int(r.status),
                r.diagnostics.margin, r.diagnostics.iterations, secs);
    if (r.feasible()) {
      VerificationReport v = verify_solution(lifted, r, 50);
      std::printf("  rho=%.4f ok=%d", v.max_spectral_radius, int(v.ok()));
      if (auto* s = std::get_if<StaticGain>(&r.gains)) std::printf("  Kx=[%.3f %.4f]", s->k_x(0,0), s->k_x(0,1));
    }
    std::printf("\n");
    std::fflush(stdout);
  };

  for (double g : {0.0, 0.085, 0.089, 0.095, 0.105, 0.30, 0.35}) {
    char label[64];
    std::snprintf(label, sizeof(label), "T1 g=%.3f", g);
    probe(TheoremVariant::static_gain, GammaSpec::single(g), label);
  }
  for (double g : {0.29, 0.30, 0.31, 0.32, 0.34}) {
    char label[64];
    std::snprintf(label, sizeof(label), "T3 g=%.3f", g);
    probe(TheoremVariant::extended_gain, GammaSpec::single(g), label);
  }
  for (double g : {0.20, 0.225, 0.24, 0.26}) {
    char label[64];
    std::snprintf(label, sizeof(label), "T2 g1=%.3f", g);
    probe(TheoremVariant::switched_gain, GammaSpec::per_mode({g, 0, 0, 0}), label);
  }
  for (double g : {0.17, 0.19, 0.21, 0.23}) {
    char label[64];
    std::snprintf(label, sizeof(label), "T4s g1=%.3f", g);
    probe(TheoremVariant::static_gain, GammaSpec::per_mode({g, 0, 0, 0}), label);
  }
  return 0;
}
