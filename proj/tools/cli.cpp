#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#ifdef CONSENSUS_LAB_VENDORED_CLI11
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif
#include <fmt/chrono.h>
#include <fmt/format.h>

#include "consensus_lab/error.hpp"
#include "output.hpp"

namespace consensus_lab::cli {
namespace {

const char* const kCommands[][2] = {
    {"analyze", "Eigenvalues and spectral summary of the pinned Laplacian"},
    {"design", "Design gains (--method robust-adsr, no-dsr, adsr, nesterov, momentum, outdated)"},
    {"simulate", "Step-transition simulation"},
    {"roots", "Closed-loop characteristic roots per eigenvalue"},
    {"perturb", "Stability over the perturbed example system"},
    {"stability", "Stability report for fixed gains"},
    {"reproduce-table1", "Regenerate the method comparison table"},
};

unsigned thread_cap() {
  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("CONSENSUS_LAB_THREADS");
  if (!env || !*env) return hardware;
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (*end != '\0' || value < 1) {
    fail(ErrorKind::kValidation,
         fmt::format("CONSENSUS_LAB_THREADS must be a positive integer, got '{}'", env));
  }
  return std::min(hardware, static_cast<unsigned>(value));
}

json parameters(const Options& o) {
  const auto opt = [](const auto& v) { return v ? json(*v) : json(nullptr); };
  return json{{"method", opt(o.method)},
              {"objective", o.objective},
              {"alpha_hat", opt(o.alpha_hat)},
              {"beta1", opt(o.beta1)},
              {"beta2", opt(o.beta2)},
              {"xi", o.scenario.x_init},
              {"xf", o.scenario.x_final},
              {"steps", o.scenario.max_steps},
              {"band", o.scenario.band},
              {"d0", o.scenario.d0},
              {"decentralized", o.decentralized},
              {"perturb_sweep", o.perturb_sweep},
              {"perturb_range", {o.perturb_lo, o.perturb_hi, o.perturb_count}}};
}

void write_outputs(const Options& o, const CommandResult& result) {
  namespace fs = std::filesystem;
  const fs::path dir(*o.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kValidation, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));

  json files = json::array();
  for (const OutputFile& f : result.files) {
    std::ofstream out(dir / f.name, std::ios::binary);
    out << f.content;
    if (!out) fail(ErrorKind::kValidation, fmt::format("cannot write '{}'", (dir / f.name).string()));
    files.push_back(json{{"name", f.name}, {"digest", hex_digest(f.content)}});
  }
  std::string input_digest = "none";
  std::string input_path = "<example network>";
  if (!o.graph_path.empty()) {
    input_path = o.graph_path;
    input_digest = load_input(o.graph_path).digest;
  }
  const json manifest{
      {"command", o.command},
      {"tool_version", CONSENSUS_LAB_VERSION},
      {"input", {{"path", input_path}, {"digest", input_digest}}},
      {"parameters", parameters(o)},
      {"files", files},
      {"created", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(
                                                           std::chrono::system_clock::now())))}};
  std::ofstream(dir / "manifest.json") << dump(manifest);
}

void print(const Options& o, const CommandResult& result) {
  if (o.out_dir) {
    write_outputs(o, result);
    std::cout << result.report;
    return;
  }
  if (!o.format) {
    std::cout << result.report;
    return;
  }
  const std::string suffix = "." + *o.format;
  for (const OutputFile& f : result.files) {
    if (f.name.size() > suffix.size() && f.name.ends_with(suffix)) {
      std::cout << f.content;
      return;
    }
  }
  fail(ErrorKind::kValidation, fmt::format("{} has no {} output", o.command, *o.format));
}

}  // namespace

int run(int argc, char** argv) {
  Options o;
  CLI::App app{"Design, certify and simulate accelerated DSR consensus on directed networks",
               "consensus-lab"};
  app.set_version_flag("--version", std::string(CONSENSUS_LAB_VERSION));
  app.require_subcommand(1);

  std::string method, format, out_dir;
  double alpha_hat = 0, beta1 = 0, beta2 = 0;
  std::vector<double> sweep;
  app.add_option("--graph", o.graph_path, "Graph or pinned-system JSON document");
  auto* method_opt = app.add_option("--method", method, "Gain family or robust-adsr");
  app.add_option("--objective", o.objective, "Design objective")->check(CLI::IsMember({"sigma", "ts"}));
  auto* alpha_opt = app.add_option("--alpha-hat", alpha_hat, "Explicit alpha_hat");
  auto* beta1_opt = app.add_option("--beta1", beta1, "Explicit beta1 (outdated feedback)");
  auto* beta2_opt = app.add_option("--beta2", beta2, "Explicit beta2 (momentum)");
  app.add_option("--xi", o.scenario.x_init, "Initial consensus value");
  app.add_option("--xf", o.scenario.x_final, "Final source value");
  app.add_option("--steps", o.scenario.max_steps, "Simulation steps");
  app.add_option("--band", o.scenario.band, "Settling band fraction");
  app.add_option("--d0", o.scenario.d0, "Inter-agent offset for relative measurements");
  app.add_flag("--decentralized", o.decentralized, "Per-agent relative-measurement simulation");
  auto* out_opt = app.add_option("--out", out_dir, "Write outputs and manifest to DIR");
  auto* format_opt =
      app.add_option("--format", format, "Print csv or json output")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--perturb-sweep", o.perturb_sweep, "Sweep e over the perturbed example system");
  auto* range_opt = app.add_option("--perturb-range", sweep, "LO HI COUNT for the e sweep")->expected(3);
  app.add_option("--grid", o.search.grid_points, "Search grid points per axis");
  app.add_option("--refine", o.search.refine_rounds, "Search refinement rounds");

  for (const auto& [name, description] : kCommands) {
    app.add_subcommand(name, description)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_code(ErrorKind::kValidation);
  }

  try {
    o.command = app.get_subcommands().front()->get_name();
    if (*method_opt) o.method = method;
    if (*alpha_opt) o.alpha_hat = alpha_hat;
    if (*beta1_opt) o.beta1 = beta1;
    if (*beta2_opt) o.beta2 = beta2;
    if (*out_opt) o.out_dir = out_dir;
    if (*format_opt) o.format = format;
    if (*range_opt) {
      o.perturb_lo = sweep[0];
      o.perturb_hi = sweep[1];
      o.perturb_count = static_cast<int>(sweep[2]);
      if (o.perturb_count != sweep[2]) fail(ErrorKind::kValidation, "--perturb-range COUNT must be an integer");
    }
    o.search.threads = thread_cap();
    print(o, run_command(o));
    return 0;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error (numerical): " << e.what() << '\n';
    return exit_code(ErrorKind::kNumerical);
  }
}

}  // namespace consensus_lab::cli
