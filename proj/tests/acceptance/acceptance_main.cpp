// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "consensus_lab/design.hpp"
#include "consensus_lab/error.hpp"
#include "consensus_lab/sim.hpp"
#include "consensus_lab/spectral.hpp"
#include "consensus_lab/stability.hpp"
#include "oracles.hpp"

using namespace consensus_lab;

namespace {

constexpr const char* kExampleDocument =
    R"({"nodes": 5, "source": 5, "edges": [[5,4,1.0],[4,3,1.0],[3,4,1.0],[3,2,1.0],[2,1,1.0]]})";

struct Outcome {
  bool pass = false;
  std::string detail;
};

bool near(double x, double ref, double tol) { return std::abs(x - ref) <= tol; }

PinnedSystem example() { return pin(parse_graph(kExampleDocument)); }

Outcome spectrum() {
  const auto values = eigenvalues(example().K);
  const double expected[] = {0.382, 1.0, 1.0, 2.618};
  bool ok = values.size() == 4;
  std::string got;
  for (std::size_t i = 0; ok && i < 4; ++i) {
    ok = near(values[i].real(), expected[i], 1e-3) && near(values[i].imag(), 0.0, 1e-3);
    got += fmt::format("{}{:.6f}", i ? ", " : "", values[i].real());
  }
  return {ok, "{" + got + "}"};
}

Outcome optimal_no_dsr_gain() {
  const SpectralSummary s = summarize(example());
  const NoDsrOptimum opt = optimal_no_dsr(*s.lambda_min, s.lambda_max);
  const StabilityReport r = closed_loop_radius(Gains::make(Method::kNoDsr, opt.alpha, 0, 0), s);
  const bool ok = near(opt.alpha, 0.6667, 1e-4) && near(opt.sigma, 0.745, 1e-3) &&
                  near(r.spectral_radius, 0.745, 1e-3) && near(r.margin, 0.255, 1e-3);
  return {ok, fmt::format("alpha*={:.6f} sigma*={:.6f} d*={:.6f}", opt.alpha, r.spectral_radius,
                          r.margin)};
}

Outcome robust_closed_form() {
  const SpectralSummary s = summarize(example());
  const Gains g = robust_adsr(*s.lambda_min, s.lambda_max);
  bool ok = near(g.alpha_hat, 0.8, 1e-9) && g.beta1 == 0.0 && near(g.beta2, 0.2, 1e-9);
  const StabilityReport r = closed_loop_radius(g, s);
  ok = ok && near(r.spectral_radius, 0.4472, 1e-4);
  int roots = 0;
  double worst = 0;
  for (const auto& e : r.per_eigenvalue) {
    for (const Complex& z : e.roots) {
      worst = std::max(worst, std::abs(std::abs(z) - std::sqrt(0.2)));
      ++roots;
    }
  }
  ok = ok && roots == 8 && worst <= 1e-9;
  const double zeta_min = damping_params(g, *s.lambda_min).zeta.value_or(NAN);
  const double zeta_max = damping_params(g, s.lambda_max).zeta.value_or(NAN);
  ok = ok && near(zeta_min, -1.0, 1e-9) && near(zeta_max, 1.0, 1e-9);
  return {ok, fmt::format("gains=({:.10f}, {}, {:.10f}) sigma={:.6f} max||z|-sqrt(0.2)|={:.1e} "
                          "zeta=({:.10f}, {:.10f})",
                          g.alpha_hat, g.beta1, g.beta2, r.spectral_radius, worst, zeta_min,
                          zeta_max)};
}

Outcome settling() {
  const PinnedSystem p = example();
  const Scenario sc{0.0, 100.0, 200, 0.05, 0.0};
  const auto plain = simulate_central(p, Gains::make(Method::kNoDsr, 2.0 / 3.0, 0, 0), sc).settled_step;
  const auto robust = simulate_central(p, Gains::make(Method::kAdsr, 0.8, 0, 0.2), sc).settled_step;
  const double predicted = predicted_settling(0.2);
  const bool ok = plain == 14 && robust == 7 && near(predicted, 6.2, 0.05);
  return {ok, fmt::format("no-DSR Ts={} robust Ts={} predicted={:.4f}", plain.value_or(-1),
                          robust.value_or(-1), predicted)};
}

struct TableRow {
  const char* label;
  Method method;
  Objective objective;
  double sigma;
  int ts;
};

Outcome table_one() {
  const PinnedSystem p = example();
  const SpectralSummary s = summarize(p);
  const Scenario sc{};
  const SearchConfig config{};
  const TableRow rows[] = {
      {"A-DSR/sigma", Method::kAdsr, Objective::kSigma, 0.4472, 7},
      {"A-DSR/ts", Method::kAdsr, Objective::kSettlingTime, 0.6634, 6},
      {"Momentum/sigma", Method::kMomentum, Objective::kSigma, 0.4479, 7},
      {"Momentum/ts", Method::kMomentum, Objective::kSettlingTime, 0.4845, 6},
      {"Nesterov/sigma", Method::kNesterov, Objective::kSigma, 0.5706, 11},
      {"Nesterov/ts", Method::kNesterov, Objective::kSettlingTime, 0.7599, 7},
      {"Outdated/sigma", Method::kOutdated, Objective::kSigma, 0.5973, 8},
      {"Outdated/ts", Method::kOutdated, Objective::kSettlingTime, 0.7318, 6},
  };
  bool ok = true;
  std::string detail;
  for (const TableRow& row : rows) {
    bool row_ok = false;
    std::string got = "infeasible";
    try {
      const DesignResult r = search_design(p, s, row.method, row.objective, config, sc);
      const bool sigma_ok = row.objective == Objective::kSigma ? near(r.sigma, row.sigma, 0.005)
                                                               : r.sigma <= row.sigma;
      row_ok = sigma_ok && r.settling_steps && std::abs(*r.settling_steps - row.ts) <= 1;
      got = fmt::format("{:.4f}/{}", r.sigma, r.settling_steps.value_or(-1));
    } catch (const Error& e) {
      got = e.what();
    }
    ok = ok && row_ok;
    detail += fmt::format("{}{} {}{}", detail.empty() ? "" : "; ", row.label, got, row_ok ? "" : " (FAIL)");
  }
  const NoDsrOptimum opt = optimal_no_dsr(*s.lambda_min, s.lambda_max);
  const auto plain = simulate_settling(p, Gains::make(Method::kNoDsr, opt.alpha, 0, 0), sc);
  const bool plain_ok = plain && std::abs(*plain - 14) <= 1;
  ok = ok && plain_ok;
  detail += fmt::format("; no-DSR {:.4f}/{}", opt.sigma, plain.value_or(-1));
  return {ok, detail};
}

Outcome perturbation() {
  const auto points = perturbation_sweep(log_space(1e-5, 1e-1, 41), Gains::make(Method::kNoDsr, 0.6667, 0, 0));
  bool ok = !points.empty();
  double worst = 0;
  for (const auto& pt : points) {
    ok = ok && pt.stable;
    worst = std::max(worst, pt.sigma);
  }
  return {ok, fmt::format("{} values of e, max sigma={:.6f}", points.size(), worst)};
}

Outcome jury_oracle() {
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> a(0.0, 3.0), b1(-0.9, 1.0), b2(-1.0, 1.5), lam(0.05, 4.0),
      im(0.05, 3.0);
  int real_disagree = 0, real_used = 0, complex_disagree = 0, complex_used = 0;
  for (int i = 0; i < 10000; ++i) {
    const Gains g = Gains::make(Method::kAdsr, a(rng), b1(rng), b2(rng));
    const double l = lam(rng);
    const JuryRealResult r = jury_real(g, l);
    const double c1 = g.alpha_hat * (1 + g.beta1) * l - (1 + g.beta2);
    const double c0 = g.beta2 - g.alpha_hat * g.beta1 * l;
    const Complex disc = std::sqrt(Complex(c1 * c1 - 4 * c0, 0.0));
    const double m = std::max(std::abs((-c1 + disc) / 2.0), std::abs((-c1 - disc) / 2.0));
    if (std::min({std::abs(r.alpha_slack), std::abs(r.lower_slack), std::abs(r.upper_slack),
                  std::abs(m - 1.0)}) < 1e-9) {
      continue;
    }
    ++real_used;
    real_disagree += r.stable != (m < 1.0);
  }
  for (int i = 0; i < 10000; ++i) {
    const Gains g = Gains::make(Method::kAdsr, a(rng), b1(rng), b2(rng));
    const double re = lam(rng), b = im(rng);
    const Quartic q = char_quartic(g, re, b);
    double m = 0;
    for (const auto& z : oracles::companion_roots({1.0, q.a3, q.a2, q.a1, q.a0})) m = std::max(m, std::abs(z));
    const JuryComplexResult r = jury_complex(g, {re, b});
    if (std::min({std::abs(r.slack[2]), std::abs(r.slack[3]), std::abs(r.slack[4]),
                  std::abs(m - 1.0)}) < 1e-9) {
      continue;
    }
    ++complex_used;
    complex_disagree += r.stable != (m < 1.0);
  }
  return {real_disagree == 0 && complex_disagree == 0 && real_used > 9900 && complex_used > 9900,
          fmt::format("real {}/{} disagree, complex {}/{} disagree", real_disagree, real_used,
                      complex_disagree, complex_used)};
}

Outcome quartic() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> a(0.0, 3.0), b1(-0.9, 1.0), b2(-1.0, 1.5), re(0.05, 4.0),
      im(0.05, 3.0), zs(-2.0, 2.0);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const Gains g = Gains::make(Method::kAdsr, a(rng), b1(rng), b2(rng));
    const double x = re(rng), y = im(rng);
    const Quartic q = char_quartic(g, x, y);
    const Quadratic p = char_quadratic(g, Complex(x, y));
    const Quadratic c = char_quadratic(g, Complex(x, -y));
    const double product[] = {(p.c1 + c.c1).real(), (p.c0 + c.c0 + p.c1 * c.c1).real(),
                              (p.c1 * c.c0 + p.c0 * c.c1).real(), (p.c0 * c.c0).real()};
    const double mine[] = {q.a3, q.a2, q.a1, q.a0};
    for (int k = 0; k < 4; ++k) {
      worst = std::max(worst, std::abs(mine[k] - product[k]) / std::max(1.0, std::abs(product[k])));
    }
    Eigen::Matrix2d j;
    j << x, y, -y, x;
    const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
    for (int s = 0; s < 3; ++s) {
      const double z = zs(rng);
      const double det = (z * z * id - z * ((1 + g.beta2) * id - g.alpha_hat * (1 + g.beta1) * j) -
                          (g.alpha_hat * g.beta1 * j - g.beta2 * id))
                             .determinant();
      const double poly = (((z + q.a3) * z + q.a2) * z + q.a1) * z + q.a0;
      worst = std::max(worst, std::abs(poly - det) / std::max(1.0, std::abs(det)));
    }
  }
  return {worst <= 1e-10, fmt::format("1000 tuples, max relative error {:.2e}", worst)};
}

double max_deviation(const Trajectory& a, const Trajectory& b) {
  double worst = 0;
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    worst = std::max(worst, (a.states[k] - b.states[k]).cwiseAbs().maxCoeff());
  }
  return worst;
}

Outcome decentralized() {
  const GraphSpec example_graph = parse_graph(kExampleDocument);
  const Gains robust = Gains::make(Method::kAdsr, 0.8, 0, 0.2);
  double worst = max_deviation(simulate_central(pin(example_graph), robust, Scenario{}),
                               simulate_decentralized(example_graph, robust, Scenario{}));
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const GraphSpec g = oracles::random_rooted_graph(rng, 1 + trial % 8, 0.3);
    const PinnedSystem p = pin(g);
    const SpectralSummary s = summarize(p);
    Gains gains;
    do {
      gains = Gains::make(Method::kAdsr, 2.0 * alpha_bar(s) * u(rng), -0.4 + 1.2 * u(rng),
                          -0.4 + 1.2 * u(rng));
    } while (!(gains.alpha_hat > 0) || spectral_radius(gains, s.eigenvalues) >= 0.99);
    Scenario sc;
    sc.x_final = 100.0;
    sc.d0 = 10.0 * u(rng);
    worst = std::max(worst, max_deviation(simulate_central(p, gains, sc), simulate_decentralized(g, gains, sc)));
  }
  return {worst <= 1e-9, fmt::format("example + 100 random graphs, max deviation {:.2e}", worst)};
}

Outcome reductions() {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> a(0.01, 2.0), re(0.05, 4.0), im(0.0, 2.0);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<Complex> spectrum{{re(rng), 0.0}, {re(rng), im(rng)}, {re(rng), 0.0}};
    const double ah = a(rng);
    double expected = 0;
    for (const Complex& l : spectrum) expected = std::max(expected, std::abs(1.0 - ah * l));
    worst = std::max(worst, std::abs(closed_loop_radius(Gains::make(Method::kNoDsr, ah, 0, 0), spectrum)
                                         .spectral_radius - expected));
  }
  const PinnedSystem single = pin(GraphSpec{2, 1, {{1, 0, 2.0}}});
  const SpectralSummary s = summarize(single);
  const NoDsrOptimum opt = optimal_no_dsr(*s.lambda_min, s.lambda_max);
  const double sigma = closed_loop_radius(Gains::make(Method::kNoDsr, opt.alpha, 0, 0), s).spectral_radius;
  return {worst <= 1e-12 && opt.sigma == 0.0 && sigma == 0.0,
          fmt::format("max |radius - max|1-a l|| {:.1e}; equal extremes sigma={}", worst, sigma)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"example-network spectrum", spectrum},
      {"optimal no-DSR gain", optimal_no_dsr_gain},
      {"robust A-DSR closed form", robust_closed_form},
      {"simulated settling", settling},
      {"method comparison table", table_one},
      {"perturbation robustness", perturbation},
      {"Jury vs root oracle", jury_oracle},
      {"quartic consistency", quartic},
      {"decentralized equivalence", decentralized},
      {"reductions", reductions},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += o.pass ? 0 : 1;
    std::printf("criterion %2zu %s: %s [%s] (%.2fs)\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first, o.detail.c_str(), seconds);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
