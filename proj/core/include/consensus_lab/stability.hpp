#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "consensus_lab/spectral.hpp"

namespace consensus_lab {

/// Update-law family. All share the recursion
///   X[k+1] = X[k] - a K {X[k] + b1 dX} + b2 dX + a B {Xs[k] + b1 dXs},
/// with dX = X[k] - X[k-1]; the families restrict (b1, b2).
enum class Method {
  kNoDsr,     // b1 = b2 = 0
  kAdsr,      // unconstrained
  kNesterov,  // b1 = b2
  kMomentum,  // b1 = 0
  kOutdated,  // b2 = 0
};

std::string_view to_string(Method method) noexcept;
/// Accepts "no-dsr", "adsr", "nesterov", "momentum", "outdated".
Method parse_method(std::string_view name);

struct Gains {
  Method method = Method::kAdsr;
  double alpha_hat = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;

  /// Validating constructor: the method's equality constraints must hold
  /// exactly, all values finite, and beta1 != -1.
  static Gains make(Method method, double alpha_hat, double beta1, double beta2);

  /// Underlying gradient gain alpha = alpha_hat / (1 + beta1).
  double base_alpha() const noexcept { return alpha_hat / (1.0 + beta1); }

  friend bool operator==(const Gains&, const Gains&) = default;
};

/// Largest stable gain without reinforcement: min over eigenvalues of
/// 2 Re(l) / |l|^2, which is 2 / lambda_max for a real spectrum.
double alpha_bar(std::span<const Complex> eigenvalues);
double alpha_bar(const SpectralSummary& summary);

/// z^2 + c1 z + c0 for one eigenvalue lambda of K.
struct Quadratic {
  Complex c1;
  Complex c0;
};

Quadratic char_quadratic(const Gains& gains, Complex lambda);

/// Both roots; the larger-magnitude root is formed without cancellation and
/// the other follows from the product c0.
std::array<Complex, 2> quadratic_roots(const Quadratic& q);

/// z^4 + a3 z^3 + a2 z^2 + a1 z + a0 for a conjugate eigenvalue pair a +- jb.
struct Quartic {
  double a3 = 0.0;
  double a2 = 0.0;
  double a1 = 0.0;
  double a0 = 0.0;
};

Quartic char_quartic(const Gains& gains, double re, double im);

/// Slack of each strict inequality; positive means satisfied.
struct JuryRealResult {
  bool stable = false;
  double alpha_slack = 0.0;  // alpha_hat > 0
  double lower_slack = 0.0;  // beta2 - [alpha_hat l (beta1 + 1/2) - 1]
  double upper_slack = 0.0;  // (alpha_hat beta1 l + 1) - beta2
};

JuryRealResult jury_real(const Gains& gains, double lambda);

struct JuryComplexResult {
  bool stable = false;
  /// |a0| within 1e-12 of 1: the tabular test is inconclusive and the point
  /// is reported as not stable.
  bool degenerate = false;
  std::array<double, 5> slack{};
};

JuryComplexResult jury_complex(const Gains& gains, Complex lambda);

/// Per-eigenvalue stability test specialised to the Nesterov, momentum and
/// outdated-feedback families. Throws Error(kValidation) for other methods.
bool corollary_method_conditions(const Gains& gains, double lambda);

/// Sufficient test over the whole eigenvalue range [lambda_min, lambda_max]
/// using the extremal eigenvalue that binds each inequality for the sign of
/// beta1. For real spectra it coincides with checking every eigenvalue in
/// the range.
bool range_conditions(const Gains& gains, double lambda_min, double lambda_max);

struct EigenvalueRoots {
  Complex lambda;
  std::array<Complex, 2> roots;
  double max_magnitude = 0.0;
  bool jury_stable = false;
};

struct StabilityReport {
  bool stable = false;
  std::vector<EigenvalueRoots> per_eigenvalue;
  double spectral_radius = 0.0;
  double margin = 0.0;
  /// Every per-eigenvalue Jury verdict equals (max_magnitude < 1).
  bool jury_agrees = true;
};

StabilityReport closed_loop_radius(const Gains& gains, std::span<const Complex> eigenvalues);
StabilityReport closed_loop_radius(const Gains& gains, const SpectralSummary& summary);

/// Spectral radius alone, without building the per-eigenvalue report.
double spectral_radius(const Gains& gains, std::span<const Complex> eigenvalues);

struct PerturbationPoint {
  double e = 0.0;
  double sigma = 0.0;
  bool stable = false;
  bool real_spectrum = false;
  std::vector<Complex> eigenvalues;
};

/// Closed-loop radius on the perturbed example system for each e.
std::vector<PerturbationPoint> perturbation_sweep(std::span<const double> e_values,
                                                  const Gains& gains);

/// count values log-spaced over [lo, hi].
std::vector<double> log_space(double lo, double hi, int count);

}  // namespace consensus_lab
