#pragma once

#include <optional>
#include <string_view>

#include "consensus_lab/sim.hpp"
#include "consensus_lab/spectral.hpp"
#include "consensus_lab/stability.hpp"

namespace consensus_lab {

struct NoDsrOptimum {
  double alpha = 0.0;
  double sigma = 0.0;
};

/// Gain minimising max |1 - alpha lambda| over a real spectrum
/// [lambda_min, lambda_max]. Equal extremes give alpha = 1/lambda, sigma = 0.
NoDsrOptimum optimal_no_dsr(double lambda_min, double lambda_max);

/// Closed-form momentum-only design that places every closed-loop root on
/// the circle of radius sqrt(beta2), critically damping both extremal modes.
/// Requires 0 < lambda_min < lambda_max; equal extremes are rejected with a
/// pointer to optimal_no_dsr.
Gains robust_adsr(double lambda_min, double lambda_max);

/// 5 / |ln sqrt(beta2)| sampling periods, for 0 < beta2 < 1.
double predicted_settling(double beta2);

/// z^2 + 2 zeta omega z + omega^2 view of the characteristic quadratic for a
/// real eigenvalue.
struct SecondOrderParams {
  /// omega^2 = beta2 - alpha_hat beta1 lambda.
  double omega_squared = 0.0;
  /// sqrt(omega_squared); zero when omega_squared < 0.
  double omega = 0.0;
  /// False when omega_squared < 0: no real natural frequency exists.
  bool omega_real = true;
  /// Unset when omega is zero or not real.
  std::optional<double> zeta;
};

SecondOrderParams damping_params(const Gains& gains, double lambda);

enum class Objective { kSigma, kSettlingTime };

std::string_view to_string(Objective objective) noexcept;
/// "sigma" or "ts".
Objective parse_objective(std::string_view name);

struct SearchConfig {
  int grid_points = 41;
  int refine_rounds = 3;
  double shrink = 5.0;
  /// Worker threads for grid evaluation; 0 picks hardware concurrency.
  unsigned threads = 0;
};

struct DesignResult {
  Gains gains;
  double sigma = 0.0;
  /// Simulated settling time of the scenario, unset when the run never settles.
  std::optional<int> settling_steps;
  /// Analytic estimate; set for the closed-form momentum design only.
  std::optional<double> predicted_settling;
  Objective objective = Objective::kSigma;
  /// Jury slacks of the chosen point at each eigenvalue (real spectra).
  std::vector<JuryRealResult> real_margins;
  std::vector<JuryComplexResult> complex_margins;
  /// Number of stable candidates evaluated.
  long long evaluated = 0;
};

/// Numerical design over the method-constrained box
///   alpha_hat in (0, 2 abar (1 + max(0, beta1))], beta1 in [-0.5, 1],
///   beta2 in [-0.5, 1)
/// using a coarse grid and local refinement, restricted to Jury-stable points.
/// The closed-form no-DSR and momentum optima are added as seed candidates
/// when they fall inside the method's family.
///
/// kSigma minimises the spectral radius (ties: alpha_hat, beta2, beta1).
/// kSettlingTime minimises simulated settling steps (ties: sigma, alpha_hat,
/// beta2, beta1); runs that do not settle within max_steps score infinity.
///
/// Throws Error(kInfeasible) when no stable candidate exists, or for a
/// kSettlingTime search when no candidate settles.
DesignResult search_design(const PinnedSystem& system, const SpectralSummary& summary,
                           Method method, Objective objective, const SearchConfig& search,
                           const Scenario& scenario);

/// Attaches sigma, simulated settling and Jury margins to fixed gains.
DesignResult evaluate_design(const PinnedSystem& system, const SpectralSummary& summary,
                             const Gains& gains, Objective objective, const Scenario& scenario);

}  // namespace consensus_lab
