#include "consensus_lab/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <tuple>

#include <fmt/format.h>

#include "consensus_lab/error.hpp"

namespace consensus_lab {

NoDsrOptimum optimal_no_dsr(double lambda_min, double lambda_max) {
  if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min) || !std::isfinite(lambda_max)) {
    fail(ErrorKind::kValidation,
         fmt::format("optimal no-DSR gain needs 0 < lambda_min <= lambda_max, got [{}, {}]",
                     lambda_min, lambda_max));
  }
  if (lambda_min == lambda_max) return NoDsrOptimum{1.0 / lambda_max, 0.0};
  return NoDsrOptimum{2.0 / (lambda_max + lambda_min),
                      (lambda_max - lambda_min) / (lambda_max + lambda_min)};
}

Gains robust_adsr(double lambda_min, double lambda_max) {
  if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min) || !std::isfinite(lambda_max)) {
    fail(ErrorKind::kValidation,
         fmt::format("robust A-DSR needs 0 < lambda_min < lambda_max, got [{}, {}]", lambda_min,
                     lambda_max));
  }
  if (lambda_min == lambda_max) {
    fail(ErrorKind::kValidation,
         "robust A-DSR needs two distinct extremal eigenvalues; use the optimal no-DSR gain "
         "1/lambda, which already reaches sigma = 0");
  }
  const double root_max = std::sqrt(lambda_max);
  const double root_min = std::sqrt(lambda_min);
  const double sum = root_max + root_min;
  const double diff = root_max - root_min;
  return Gains::make(Method::kAdsr, 4.0 / (sum * sum), 0.0, (diff * diff) / (sum * sum));
}

double predicted_settling(double beta2) {
  if (!(beta2 > 0.0 && beta2 < 1.0)) {
    fail(ErrorKind::kValidation,
         fmt::format("settling estimate needs 0 < beta2 < 1, got {}", beta2));
  }
  return 5.0 / std::abs(std::log(std::sqrt(beta2)));
}

SecondOrderParams damping_params(const Gains& g, double lambda) {
  SecondOrderParams p;
  p.omega_squared = g.beta2 - g.alpha_hat * g.beta1 * lambda;
  p.omega_real = p.omega_squared >= 0.0;
  p.omega = p.omega_real ? std::sqrt(p.omega_squared) : 0.0;
  if (p.omega_real && p.omega > 0.0) {
    const double linear = g.alpha_hat * (1.0 + g.beta1) * lambda - (1.0 + g.beta2);
    p.zeta = linear / (2.0 * p.omega);
  }
  return p;
}

std::string_view to_string(Objective objective) noexcept {
  return objective == Objective::kSigma ? "sigma" : "ts";
}

Objective parse_objective(std::string_view name) {
  if (name == "sigma") return Objective::kSigma;
  if (name == "ts") return Objective::kSettlingTime;
  fail(ErrorKind::kValidation, fmt::format("unknown objective '{}' (expected sigma or ts)", name));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Candidate {
  Gains gains;
  double sigma = kInf;
  double settling = kInf;

  bool valid() const noexcept { return std::isfinite(sigma); }
};

bool better(const Candidate& a, const Candidate& b, Objective objective) {
  if (!b.valid()) return a.valid();
  if (!a.valid()) return false;
  const auto key = [objective](const Candidate& c) {
    const double primary = objective == Objective::kSettlingTime ? c.settling : c.sigma;
    const double secondary = objective == Objective::kSettlingTime ? c.sigma : 0.0;
    return std::make_tuple(primary, secondary, c.gains.alpha_hat, c.gains.beta2, c.gains.beta1);
  };
  return key(a) < key(b);
}

struct Box {
  double alpha_max = 0.0;  // upper bound on alpha_hat at beta1 = 1
  double abar = 0.0;
  double beta1_lo = 0.0, beta1_hi = 0.0;
  double beta2_lo = 0.0, beta2_hi = 0.0;
  bool beta1_free = false;
  bool beta2_free = false;
  bool tied = false;  // beta1 = beta2

  double alpha_bound(double beta1) const { return 2.0 * abar * (1.0 + std::max(0.0, beta1)); }
};

Box make_box(Method method, double abar) {
  Box box;
  box.abar = abar;
  switch (method) {
    case Method::kNoDsr:
      break;
    case Method::kAdsr:
      box.beta1_free = box.beta2_free = true;
      box.beta1_lo = -0.5, box.beta1_hi = 1.0;
      box.beta2_lo = -0.5, box.beta2_hi = 1.0;
      break;
    case Method::kMomentum:
      box.beta2_free = true;
      box.beta2_lo = -0.5, box.beta2_hi = 1.0;
      break;
    case Method::kOutdated:
      box.beta1_free = true;
      box.beta1_lo = -0.5, box.beta1_hi = 1.0;
      break;
    case Method::kNesterov:
      box.beta1_free = box.tied = true;
      box.beta1_lo = -0.5, box.beta1_hi = 1.0;
      break;
  }
  box.alpha_max = box.alpha_bound(box.beta1_hi);
  return box;
}

struct Window {
  double alpha_lo, alpha_hi;
  double beta1_lo, beta1_hi;
  double beta2_lo, beta2_hi;
};

std::vector<double> axis(double lo, double hi, int points, bool free) {
  if (!free) return {0.0};
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(points));
  if (points == 1 || hi <= lo) return {0.5 * (lo + hi)};
  for (int i = 0; i < points; ++i) values.push_back(lo + (hi - lo) * i / (points - 1));
  return values;
}

class Evaluator {
 public:
  Evaluator(const PinnedSystem& system, const SpectralSummary& summary, Method method,
            Objective objective, const Scenario& scenario, const Box& box)
      : system_(system),
        summary_(summary),
        method_(method),
        objective_(objective),
        scenario_(scenario),
        box_(box) {}

  /// Invalid candidate when the point is outside the box or not Jury-stable.
  Candidate evaluate(double alpha_hat, double beta1, double beta2) const {
    Candidate c;
    if (!(alpha_hat > 0.0) || alpha_hat > box_.alpha_bound(beta1) * (1.0 + 1e-12)) return c;
    if (beta2 >= 1.0 && method_ != Method::kNoDsr) return c;
    if (beta1 == -1.0) return c;
    c.gains = Gains{method_, alpha_hat, beta1, beta2};

    if (summary_.is_real_spectrum) {
      if (!range_conditions(c.gains, *summary_.lambda_min, summary_.lambda_max)) return c;
      for (const Complex& l : summary_.eigenvalues) {
        if (!jury_real(c.gains, l.real()).stable) return c;
      }
    } else {
      for (const Complex& l : summary_.eigenvalues) {
        const bool ok = l.imag() == 0.0 ? jury_real(c.gains, l.real()).stable
                                        : jury_complex(c.gains, l).stable;
        if (!ok) return c;
      }
    }

    const double sigma = spectral_radius(c.gains, summary_.eigenvalues);
    if (!(sigma < 1.0)) return c;
    if (objective_ == Objective::kSettlingTime) {
      const auto ts = simulate_settling(system_, c.gains, scenario_);
      c.settling = ts ? static_cast<double>(*ts) : kInf;
    }
    c.sigma = sigma;
    return c;
  }

  Objective objective() const noexcept { return objective_; }

 private:
  const PinnedSystem& system_;
  const SpectralSummary& summary_;
  Method method_;
  Objective objective_;
  const Scenario& scenario_;
  const Box& box_;
};

struct GridOutcome {
  Candidate best;
  long long feasible = 0;
};

GridOutcome evaluate_grid(const Evaluator& evaluator, const Box& box, const Window& w,
                          int points, unsigned threads) {
  const auto alphas = axis(w.alpha_lo, w.alpha_hi, points, true);
  const auto betas1 = axis(w.beta1_lo, w.beta1_hi, points, box.beta1_free);
  const auto betas2 = box.tied ? std::vector<double>{0.0}
                               : axis(w.beta2_lo, w.beta2_hi, points, box.beta2_free);

  const std::size_t total = alphas.size() * betas1.size() * betas2.size();
  const auto point = [&](std::size_t index) {
    const std::size_t ia = index % alphas.size();
    const std::size_t rest = index / alphas.size();
    const std::size_t i1 = rest % betas1.size();
    const std::size_t i2 = rest / betas1.size();
    const double beta1 = betas1[i1];
    const double beta2 = box.tied ? beta1 : betas2[i2];
    return evaluator.evaluate(alphas[ia], beta1, beta2);
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(
                                                   1, total / 256))));
  std::vector<GridOutcome> partial(workers);
  const auto run = [&](unsigned worker) {
    GridOutcome& out = partial[worker];
    for (std::size_t i = worker; i < total; i += workers) {
      const Candidate c = point(i);
      if (!c.valid()) continue;
      ++out.feasible;
      if (better(c, out.best, evaluator.objective())) out.best = c;
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(run, t);
  }

  GridOutcome merged;
  for (const GridOutcome& p : partial) {
    merged.feasible += p.feasible;
    if (better(p.best, merged.best, evaluator.objective())) merged.best = p.best;
  }
  return merged;
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

void attach_margins(DesignResult& result, const SpectralSummary& summary) {
  result.real_margins.clear();
  result.complex_margins.clear();
  for (const Complex& l : summary.eigenvalues) {
    if (l.imag() == 0.0) {
      result.real_margins.push_back(jury_real(result.gains, l.real()));
    } else {
      result.complex_margins.push_back(jury_complex(result.gains, l));
    }
  }
}

}  // namespace

DesignResult evaluate_design(const PinnedSystem& system, const SpectralSummary& summary,
                             const Gains& gains, Objective objective, const Scenario& scenario) {
  scenario.validate();
  DesignResult result;
  result.gains = gains;
  result.objective = objective;
  result.sigma = spectral_radius(gains, summary.eigenvalues);
  result.settling_steps = simulate_settling(system, gains, scenario);
  result.evaluated = 1;
  attach_margins(result, summary);
  return result;
}

DesignResult search_design(const PinnedSystem& system, const SpectralSummary& summary,
                           Method method, Objective objective, const SearchConfig& search,
                           const Scenario& scenario) {
  validate(system);
  scenario.validate();
  if (search.grid_points < 2 || search.refine_rounds < 0 || !(search.shrink > 1.0)) {
    fail(ErrorKind::kValidation, "search needs grid_points >= 2, refine_rounds >= 0, shrink > 1");
  }
  if (summary.is_real_spectrum && !summary.lambda_min) {
    fail(ErrorKind::kValidation, "real spectrum summary is missing lambda_min");
  }

  const double abar = alpha_bar(summary);
  if (!std::isfinite(abar) || !(abar > 0.0)) {
    fail(ErrorKind::kInfeasible, "spectrum admits no positive stable gain");
  }
  const Box box = make_box(method, abar);
  const Evaluator evaluator(system, summary, method, objective, scenario, box);
  const unsigned threads = resolve_threads(search.threads);

  Candidate best;
  long long feasible = 0;

  // Closed-form seeds inside the method family.
  if (summary.is_real_spectrum) {
    const NoDsrOptimum plain = optimal_no_dsr(*summary.lambda_min, summary.lambda_max);
    const Candidate seed = evaluator.evaluate(plain.alpha, 0.0, 0.0);
    if (seed.valid()) {
      ++feasible;
      best = seed;
    }
    if (summary.extremal_distinct && (method == Method::kAdsr || method == Method::kMomentum)) {
      const Gains robust = robust_adsr(*summary.lambda_min, summary.lambda_max);
      const Candidate c = evaluator.evaluate(robust.alpha_hat, 0.0, robust.beta2);
      if (c.valid()) {
        ++feasible;
        if (better(c, best, objective)) best = c;
      }
    }
  }

  Window window{0.0, box.alpha_max, box.beta1_lo, box.beta1_hi, box.beta2_lo, box.beta2_hi};
  // Coarse alpha axis starts one step above zero.
  window.alpha_lo = box.alpha_max / search.grid_points;
  GridOutcome outcome = evaluate_grid(evaluator, box, window, search.grid_points, threads);
  feasible += outcome.feasible;
  if (better(outcome.best, best, objective)) best = outcome.best;

  double alpha_width = box.alpha_max;
  double beta1_width = box.beta1_hi - box.beta1_lo;
  double beta2_width = box.beta2_hi - box.beta2_lo;
  for (int round = 0; round < search.refine_rounds && best.valid(); ++round) {
    alpha_width /= search.shrink;
    beta1_width /= search.shrink;
    beta2_width /= search.shrink;
    const Gains& c = best.gains;
    Window local{
        std::max(box.alpha_max * 1e-9, c.alpha_hat - alpha_width / 2),
        std::min(box.alpha_max, c.alpha_hat + alpha_width / 2),
        std::max(box.beta1_lo, c.beta1 - beta1_width / 2),
        std::min(box.beta1_hi, c.beta1 + beta1_width / 2),
        std::max(box.beta2_lo, c.beta2 - beta2_width / 2),
        std::min(box.beta2_hi, c.beta2 + beta2_width / 2),
    };
    outcome = evaluate_grid(evaluator, box, local, search.grid_points, threads);
    feasible += outcome.feasible;
    if (better(outcome.best, best, objective)) best = outcome.best;
  }

  if (!best.valid()) {
    fail(ErrorKind::kInfeasible,
         fmt::format("no Jury-stable {} gains found in the search box", to_string(method)));
  }
  if (objective == Objective::kSettlingTime && !std::isfinite(best.settling)) {
    fail(ErrorKind::kInfeasible,
         fmt::format("no {} candidate settles within {} steps", to_string(method),
                     scenario.max_steps));
  }

  DesignResult result;
  result.gains = Gains::make(method, best.gains.alpha_hat, best.gains.beta1, best.gains.beta2);
  result.objective = objective;
  result.sigma = best.sigma;
  result.settling_steps = simulate_settling(system, result.gains, scenario);
  result.evaluated = feasible;
  attach_margins(result, summary);
  return result;
}

}  // namespace consensus_lab
