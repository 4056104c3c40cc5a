#include "consensus_lab/stability.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>

#include <fmt/format.h>

#include "consensus_lab/error.hpp"

namespace consensus_lab {
namespace {

constexpr double kDegenerateTolerance = 1e-12;

bool all_positive(std::initializer_list<double> slacks) {
  return std::all_of(slacks.begin(), slacks.end(), [](double s) { return s > 0.0; });
}

}  // namespace

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::kNoDsr:
      return "no-dsr";
    case Method::kAdsr:
      return "adsr";
    case Method::kNesterov:
      return "nesterov";
    case Method::kMomentum:
      return "momentum";
    case Method::kOutdated:
      return "outdated";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kNoDsr, Method::kAdsr, Method::kNesterov, Method::kMomentum,
                   Method::kOutdated}) {
    if (name == to_string(m)) return m;
  }
  fail(ErrorKind::kValidation, fmt::format("unknown method '{}'", name));
}

Gains Gains::make(Method method, double alpha_hat, double beta1, double beta2) {
  if (!std::isfinite(alpha_hat) || !std::isfinite(beta1) || !std::isfinite(beta2)) {
    fail(ErrorKind::kValidation, "gains must be finite");
  }
  if (beta1 == -1.0) {
    fail(ErrorKind::kValidation, "beta1 = -1 leaves the base gain undefined");
  }
  switch (method) {
    case Method::kNoDsr:
      if (beta1 != 0.0 || beta2 != 0.0) {
        fail(ErrorKind::kValidation, "no-dsr requires beta1 = beta2 = 0");
      }
      break;
    case Method::kNesterov:
      if (beta1 != beta2) fail(ErrorKind::kValidation, "nesterov requires beta1 = beta2");
      break;
    case Method::kMomentum:
      if (beta1 != 0.0) fail(ErrorKind::kValidation, "momentum requires beta1 = 0");
      break;
    case Method::kOutdated:
      if (beta2 != 0.0) fail(ErrorKind::kValidation, "outdated requires beta2 = 0");
      break;
    case Method::kAdsr:
      break;
  }
  return Gains{method, alpha_hat, beta1, beta2};
}

double alpha_bar(std::span<const Complex> eigenvalues) {
  double bound = std::numeric_limits<double>::infinity();
  for (const Complex& l : eigenvalues) {
    bound = std::min(bound, 2.0 * l.real() / std::norm(l));
  }
  return bound;
}

double alpha_bar(const SpectralSummary& summary) { return alpha_bar(summary.eigenvalues); }

Quadratic char_quadratic(const Gains& g, Complex lambda) {
  return Quadratic{
      g.alpha_hat * (1.0 + g.beta1) * lambda - (1.0 + g.beta2),
      g.beta2 - g.alpha_hat * g.beta1 * lambda,
  };
}

std::array<Complex, 2> quadratic_roots(const Quadratic& q) {
  Complex disc = q.c1 * q.c1 - 4.0 * q.c0;
  // Below rounding noise the pair is a double root; sqrt would split it by
  // ~sqrt(eps).
  const double noise = 8.0 * std::numeric_limits<double>::epsilon() *
                       (std::norm(q.c1) + 4.0 * std::abs(q.c0));
  if (std::abs(disc) <= noise) disc = 0.0;
  Complex s = std::sqrt(disc);
  if ((std::conj(q.c1) * s).real() < 0.0) s = -s;
  const Complex big = -(q.c1 + s) / 2.0;
  if (big == Complex(0.0, 0.0)) return {big, big};
  return {big, q.c0 / big};
}

Quartic char_quartic(const Gains& g, double a, double b) {
  const double ah = g.alpha_hat;
  const double b1 = g.beta1;
  const double b2 = g.beta2;
  const double d = a * ah * b1 - b2;
  const double b_sq = b * b;

  Quartic q;
  q.a0 = d * d + ah * ah * b_sq * b1 * b1;
  q.a1 = -2.0 * (d * d + a * ah * b1 * (a * ah - 1.0) + ah * (ah * b_sq * b1 - a * b2) +
                 ah * ah * b_sq * b1 * b1 + b2);
  q.a2 = d * d + (a * ah - 1.0) * (a * ah - 1.0) + 2.0 * ah * ah * b1 * (a * a + b_sq) +
         4.0 * b2 - 2.0 * a * ah * (2.0 * b1 + b2) + ah * ah * b_sq * (b1 * b1 + 1.0);
  q.a3 = 2.0 * a * ah * (b1 + 1.0) - 2.0 * (b2 + 1.0);
  return q;
}

JuryRealResult jury_real(const Gains& g, double lambda) {
  JuryRealResult r;
  r.alpha_slack = g.alpha_hat;
  r.lower_slack = g.beta2 - (g.alpha_hat * lambda * (g.beta1 + 0.5) - 1.0);
  r.upper_slack = (g.alpha_hat * g.beta1 * lambda + 1.0) - g.beta2;
  r.stable = all_positive({r.alpha_slack, r.lower_slack, r.upper_slack});
  return r;
}

JuryComplexResult jury_complex(const Gains& g, Complex lambda) {
  const double a = lambda.real();
  const double b = lambda.imag();
  const Quartic q = char_quartic(g, a, b);
  const double ah = g.alpha_hat;

  // Jury table rows for the monic quartic.
  const double b0 = q.a0 * q.a0 - 1.0;
  const double b1 = q.a0 * q.a1 - q.a3;
  const double b2 = q.a2 * (q.a0 - 1.0);
  const double b3 = q.a0 * q.a3 - q.a1;
  const double c0 = b0 * b0 - b3 * b3;
  const double c2 = b0 * b2 - b3 * b1;

  JuryComplexResult r;
  const double at_minus_one = 2.0 * (g.beta2 + 1.0) - ah * (2.0 * g.beta1 + 1.0) * a;
  r.slack[0] = ah * ah;
  r.slack[1] = at_minus_one * at_minus_one + ah * ah * (2.0 * g.beta1 + 1.0) *
                                                 (2.0 * g.beta1 + 1.0) * b * b;
  r.slack[2] = std::min(q.a0 + 1.0, 1.0 - q.a0);
  r.slack[3] = std::abs(b0) - std::abs(b3);
  r.slack[4] = std::abs(c0) - std::abs(c2);
  r.degenerate = std::abs(std::abs(q.a0) - 1.0) <= kDegenerateTolerance;
  r.stable = !r.degenerate && std::all_of(r.slack.begin(), r.slack.end(),
                                          [](double s) { return s > 0.0; });
  return r;
}

bool corollary_method_conditions(const Gains& g, double lambda) {
  if (g.method != Method::kNesterov && g.method != Method::kMomentum &&
      g.method != Method::kOutdated) {
    fail(ErrorKind::kValidation,
         fmt::format("method conditions apply to nesterov, momentum and outdated, not {}",
                     to_string(g.method)));
  }
  if (!(g.alpha_hat > 0.0)) return false;
  const double al = g.alpha_hat * lambda;
  if (g.method == Method::kNesterov) {
    const double mid = g.beta1 * (1.0 - al);
    return al / 2.0 - 1.0 < mid && mid < 1.0;
  }
  if (g.method == Method::kMomentum) {
    return al / 2.0 - 1.0 < g.beta2 && g.beta2 < 1.0;
  }
  const double mid = al * g.beta1;
  return -1.0 < mid && mid < 1.0 - al / 2.0;
}

bool range_conditions(const Gains& g, double lambda_min, double lambda_max) {
  if (!(g.alpha_hat > 0.0)) return false;
  const double lower_binding = g.beta1 <= -0.5 ? lambda_min : lambda_max;
  const double upper_binding = g.beta1 <= 0.0 ? lambda_max : lambda_min;
  const double lower = g.alpha_hat * lower_binding * (g.beta1 + 0.5) - 1.0;
  const double upper = g.alpha_hat * g.beta1 * upper_binding + 1.0;
  return lower < g.beta2 && g.beta2 < upper;
}

double spectral_radius(const Gains& gains, std::span<const Complex> eigenvalues) {
  double radius = 0.0;
  for (const Complex& l : eigenvalues) {
    const auto roots = quadratic_roots(char_quadratic(gains, l));
    radius = std::max({radius, std::abs(roots[0]), std::abs(roots[1])});
  }
  return radius;
}

StabilityReport closed_loop_radius(const Gains& gains, std::span<const Complex> eigenvalues) {
  StabilityReport report;
  report.per_eigenvalue.reserve(eigenvalues.size());
  for (const Complex& l : eigenvalues) {
    EigenvalueRoots entry;
    entry.lambda = l;
    entry.roots = quadratic_roots(char_quadratic(gains, l));
    entry.max_magnitude = std::max(std::abs(entry.roots[0]), std::abs(entry.roots[1]));
    entry.jury_stable =
        l.imag() == 0.0 ? jury_real(gains, l.real()).stable : jury_complex(gains, l).stable;
    report.jury_agrees = report.jury_agrees && (entry.jury_stable == (entry.max_magnitude < 1.0));
    report.spectral_radius = std::max(report.spectral_radius, entry.max_magnitude);
    report.per_eigenvalue.push_back(entry);
  }
  report.margin = 1.0 - report.spectral_radius;
  report.stable = report.spectral_radius < 1.0;
  return report;
}

StabilityReport closed_loop_radius(const Gains& gains, const SpectralSummary& summary) {
  return closed_loop_radius(gains, summary.eigenvalues);
}

std::vector<PerturbationPoint> perturbation_sweep(std::span<const double> e_values,
                                                  const Gains& gains) {
  std::vector<PerturbationPoint> points;
  points.reserve(e_values.size());
  for (double e : e_values) {
    const SpectralSummary summary = summarize(perturbed_example(e));
    const StabilityReport report = closed_loop_radius(gains, summary);
    points.push_back(PerturbationPoint{e, report.spectral_radius, report.stable,
                                       summary.is_real_spectrum, summary.eigenvalues});
  }
  return points;
}

std::vector<double> log_space(double lo, double hi, int count) {
  if (count < 1 || !(lo > 0.0) || !(hi >= lo)) {
    fail(ErrorKind::kValidation, "log_space needs count >= 1 and 0 < lo <= hi");
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    values.push_back(lo);
    return values;
  }
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) values.push_back(lo * std::exp(step * i));
  values.back() = hi;
  return values;
}

}  // namespace consensus_lab
