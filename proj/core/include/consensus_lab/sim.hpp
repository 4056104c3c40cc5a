#pragma once

#include <optional>
#include <vector>

#include "consensus_lab/graph.hpp"
#include "consensus_lab/stability.hpp"

namespace consensus_lab {

/// Step transition of the source value from x_init (all k < 0) to x_final
/// (all k >= 0). Agents start in consensus at x_init.
struct Scenario {
  double x_init = 0.0;
  double x_final = 100.0;
  int max_steps = 200;
  /// Settling band as a fraction of |x_final - x_init|.
  double band = 0.05;
  /// Desired inter-agent offset seen by the relative-distance sensors.
  double d0 = 0.0;

  /// Throws Error(kValidation) unless max_steps >= 1, 0 < band < 1 and all
  /// values are finite.
  void validate() const;
};

struct Trajectory {
  /// states[k] holds X[k] for k = 0..max_steps.
  std::vector<Vector> states;
  /// source[k] holds Xs[k].
  std::vector<double> source;
  std::optional<int> settled_step;
  double x_init = 0.0;
  double x_final = 0.0;

  int steps() const noexcept { return static_cast<int>(states.size()) - 1; }
};

/// Matrix-form recursion with X[-1] = X[0] = x_init 1 and Xs[-1] = x_init.
/// Throws Error(kInfeasible, "unstable trajectory") once any |X_i| > 1e12.
Trajectory simulate_central(const PinnedSystem& system, const Gains& gains,
                            const Scenario& scenario);

/// Lock-step per-agent simulation. Each agent keeps only its own state, the
/// network aggregate alpha_hat K_i X and their one-step delays, plus the last
/// source value when it is pinned. K_i X is rebuilt from offset-coded relative
/// displacements to in-neighbours; pinned agents recover Xs from the
/// measurement towards the source.
Trajectory simulate_decentralized(const GraphSpec& graph, const Gains& gains,
                                  const Scenario& scenario);

/// Smallest Ts with |X_i[k] - x_final| <= band |x_final - x_init| for every
/// agent and every k >= Ts. Zero when x_final == x_init.
std::optional<int> settling_time(const Trajectory& trajectory, double band);

/// max_i |X_i[last] - x_final|.
double consensus_error(const Trajectory& trajectory);

/// Settling steps of the central recursion without storing the trajectory.
/// Returns nullopt for runs that never settle or diverge.
std::optional<int> simulate_settling(const PinnedSystem& system, const Gains& gains,
                                     const Scenario& scenario);

}  // namespace consensus_lab
