#pragma once

#include <optional>
#include <string>
#include <vector>

#include "consensus_lab/design.hpp"
#include "consensus_lab/graph.hpp"
#include "consensus_lab/sim.hpp"

namespace consensus_lab::cli {

struct Options {
  std::string command;
  std::string graph_path;
  std::optional<std::string> method;  // design family, or robust-adsr
  std::string objective = "sigma";
  std::optional<double> alpha_hat;
  std::optional<double> beta1;
  std::optional<double> beta2;
  Scenario scenario;
  bool decentralized = false;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;  // csv or json; unset prints the report
  // perturbation sweep over log-spaced e
  bool perturb_sweep = false;
  double perturb_lo = 1e-5;
  double perturb_hi = 1e-1;
  int perturb_count = 25;
  SearchConfig search;
};

/// Loaded --graph input: a graph document or a pinned {"K","B"} document.
struct Input {
  std::optional<GraphSpec> graph;
  PinnedSystem system;
  std::string digest;
  std::string path;
};

struct OutputFile {
  std::string name;
  std::string content;
};

struct CommandResult {
  std::vector<OutputFile> files;
  std::string report;  // human-readable summary
  int exit_code = 0;
};

Input load_input(const std::string& path);
Input load_input_text(const std::string& text, const std::string& label);

CommandResult run_command(const Options& options);

/// Parses argv, runs the command and writes outputs. Returns the exit code.
int run(int argc, char** argv);

}  // namespace consensus_lab::cli
