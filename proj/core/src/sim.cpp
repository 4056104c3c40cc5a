#include "consensus_lab/sim.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "consensus_lab/error.hpp"

namespace consensus_lab {
namespace {

constexpr double kDivergenceLimit = 1e12;

bool diverged(const Vector& x) {
  return !x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergenceLimit;
}

[[noreturn]] void unstable(int step) {
  fail(ErrorKind::kInfeasible, fmt::format("unstable trajectory (|X| > 1e12 at step {})", step));
}

// One step of the matrix recursion. `next` must not alias the inputs.
class CentralStepper {
 public:
  CentralStepper(const PinnedSystem& system, const Gains& gains, const Scenario& scenario)
      : system_(system),
        gains_(gains),
        current_(Vector::Constant(system.size(), scenario.x_init)),
        previous_(current_),
        next_(system.size()),
        work_(system.size()),
        source_previous_(scenario.x_init),
        source_(scenario.x_final) {}

  const Vector& state() const noexcept { return current_; }

  void advance() {
    const double a = gains_.alpha_hat;
    const double source_term = a * (source_ + gains_.beta1 * (source_ - source_previous_));
    work_ = current_ + gains_.beta1 * (current_ - previous_);
    next_.noalias() = system_.K * work_;
    next_ = current_ - a * next_ + gains_.beta2 * (current_ - previous_) +
            source_term * system_.B;
    previous_.swap(current_);
    current_.swap(next_);
    source_previous_ = source_;
  }

 private:
  const PinnedSystem& system_;
  Gains gains_;
  Vector current_;
  Vector previous_;
  Vector next_;
  Vector work_;
  double source_previous_;
  double source_;
};

bool within_band(const Vector& x, double target, double tolerance) {
  return (x.array() - target).abs().maxCoeff() <= tolerance;
}

// Per-agent memory: nothing beyond what the agent measures or computed itself.
struct Agent {
  double state = 0.0;
  double previous_state = 0.0;
  double aggregate = 0.0;
  double previous_aggregate = 0.0;
  bool has_previous_aggregate = false;
  double previous_source = 0.0;
};

struct Link {
  int neighbour = 0;
  double weight = 0.0;
};

}  // namespace

void Scenario::validate() const {
  if (!std::isfinite(x_init) || !std::isfinite(x_final) || !std::isfinite(d0)) {
    fail(ErrorKind::kValidation, "scenario values must be finite");
  }
  if (max_steps < 1) fail(ErrorKind::kValidation, "scenario needs max_steps >= 1");
  if (!(band > 0.0 && band < 1.0)) {
    fail(ErrorKind::kValidation, fmt::format("settling band must lie in (0, 1), got {}", band));
  }
}

Trajectory simulate_central(const PinnedSystem& system, const Gains& gains,
                            const Scenario& scenario) {
  validate(system);
  scenario.validate();

  Trajectory t;
  t.x_init = scenario.x_init;
  t.x_final = scenario.x_final;
  t.states.reserve(static_cast<std::size_t>(scenario.max_steps) + 1);
  t.source.assign(static_cast<std::size_t>(scenario.max_steps) + 1, scenario.x_final);

  CentralStepper stepper(system, gains, scenario);
  t.states.push_back(stepper.state());
  for (int k = 0; k < scenario.max_steps; ++k) {
    stepper.advance();
    if (diverged(stepper.state())) unstable(k + 1);
    t.states.push_back(stepper.state());
  }
  t.settled_step = settling_time(t, scenario.band);
  return t;
}

std::optional<int> simulate_settling(const PinnedSystem& system, const Gains& gains,
                                     const Scenario& scenario) {
  const double delta = std::abs(scenario.x_final - scenario.x_init);
  if (delta == 0.0) return 0;
  const double tolerance = scenario.band * delta;

  CentralStepper stepper(system, gains, scenario);
  int last_outside = within_band(stepper.state(), scenario.x_final, tolerance) ? -1 : 0;
  for (int k = 1; k <= scenario.max_steps; ++k) {
    stepper.advance();
    if (diverged(stepper.state())) return std::nullopt;
    if (!within_band(stepper.state(), scenario.x_final, tolerance)) last_outside = k;
  }
  if (last_outside >= scenario.max_steps) return std::nullopt;
  return last_outside + 1;
}

Trajectory simulate_decentralized(const GraphSpec& graph, const Gains& gains,
                                  const Scenario& scenario) {
  validate(graph);
  scenario.validate();

  // Wiring known to each agent: its in-neighbours (agents it can measure) and
  // its pinning weight towards the source.
  const int node_count = graph.node_count;
  std::vector<std::vector<Link>> inbound(static_cast<std::size_t>(node_count));
  std::vector<double> pinning(static_cast<std::size_t>(node_count), 0.0);
  for (const Edge& e : graph.edges) {
    if (e.from == graph.source) {
      pinning[static_cast<std::size_t>(e.to)] = e.weight;
    } else {
      inbound[static_cast<std::size_t>(e.to)].push_back(Link{e.from, e.weight});
    }
  }

  std::vector<int> agents_in_order;
  for (int node = 0; node < node_count; ++node) {
    if (node != graph.source) agents_in_order.push_back(node);
  }

  std::vector<Agent> agents(static_cast<std::size_t>(node_count));
  for (int node : agents_in_order) {
    Agent& agent = agents[static_cast<std::size_t>(node)];
    agent.state = agent.previous_state = scenario.x_init;
    agent.previous_source = scenario.x_init;
  }

  const double a = gains.alpha_hat;
  const double d0 = scenario.d0;
  auto snapshot = [&] {
    Vector x(static_cast<Eigen::Index>(agents_in_order.size()));
    for (std::size_t r = 0; r < agents_in_order.size(); ++r) {
      x(static_cast<Eigen::Index>(r)) = agents[static_cast<std::size_t>(agents_in_order[r])].state;
    }
    return x;
  };

  Trajectory t;
  t.x_init = scenario.x_init;
  t.x_final = scenario.x_final;
  t.states.reserve(static_cast<std::size_t>(scenario.max_steps) + 1);
  t.source.assign(static_cast<std::size_t>(scenario.max_steps) + 1, scenario.x_final);
  t.states.push_back(snapshot());

  std::vector<double> next_state(static_cast<std::size_t>(node_count), 0.0);
  for (int k = 0; k < scenario.max_steps; ++k) {
    const double source_value = scenario.x_final;

    // Phase 1: every agent measures relative offsets at step k and computes.
    for (int node : agents_in_order) {
      const auto i = static_cast<std::size_t>(node);
      const Agent& self = agents[i];

      double laplacian_row = 0.0;
      for (const Link& link : inbound[i]) {
        const double neighbour = agents[static_cast<std::size_t>(link.neighbour)].state;
        const double measured = (neighbour - self.state) + d0;
        laplacian_row += link.weight * (d0 - measured);
      }

      double source_term = 0.0;
      double recovered_source = 0.0;
      if (pinning[i] != 0.0) {
        const double measured = (source_value - self.state) + d0;
        recovered_source = self.state + (measured - d0);
        laplacian_row += pinning[i] * self.state;
        source_term = a * pinning[i] *
                      (recovered_source + gains.beta1 * (recovered_source - self.previous_source));
      }

      const double aggregate = a * laplacian_row;
      const double previous_aggregate =
          self.has_previous_aggregate ? self.previous_aggregate : aggregate;
      next_state[i] = self.state - (aggregate + gains.beta1 * (aggregate - previous_aggregate)) +
                      gains.beta2 * (self.state - self.previous_state) + source_term;

      // Stored for the next round; only the agent's own quantities.
      Agent& writable = agents[i];
      writable.aggregate = aggregate;
      if (pinning[i] != 0.0) writable.previous_source = recovered_source;
    }

    // Phase 2: commit.
    for (int node : agents_in_order) {
      Agent& agent = agents[static_cast<std::size_t>(node)];
      agent.previous_state = agent.state;
      agent.state = next_state[static_cast<std::size_t>(node)];
      agent.previous_aggregate = agent.aggregate;
      agent.has_previous_aggregate = true;
    }

    Vector x = snapshot();
    if (diverged(x)) unstable(k + 1);
    t.states.push_back(std::move(x));
  }
  t.settled_step = settling_time(t, scenario.band);
  return t;
}

std::optional<int> settling_time(const Trajectory& trajectory, double band) {
  if (trajectory.states.empty()) {
    fail(ErrorKind::kValidation, "settling time needs a trajectory with at least one step");
  }
  const double delta = std::abs(trajectory.x_final - trajectory.x_init);
  if (delta == 0.0) return 0;
  const double tolerance = band * delta;

  int k = trajectory.steps();
  if (!within_band(trajectory.states.back(), trajectory.x_final, tolerance)) return std::nullopt;
  while (k > 0 && within_band(trajectory.states[static_cast<std::size_t>(k - 1)],
                              trajectory.x_final, tolerance)) {
    --k;
  }
  return k;
}

double consensus_error(const Trajectory& trajectory) {
  if (trajectory.states.empty()) return 0.0;
  return (trajectory.states.back().array() - trajectory.x_final).abs().maxCoeff();
}

}  // namespace consensus_lab
