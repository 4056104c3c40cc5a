#include "output.hpp"

#include <fmt/format.h>

namespace consensus_lab::cli {

std::string csv_number(double value) {
  if (value == 0.0) return "0";  // folds -0
  return fmt::format("{:.12g}", value);
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) { row(header); }

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
  return *this;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string hex_digest(std::string_view bytes) { return fmt::format("fnv1a64:{:016x}", fnv1a(bytes)); }

json to_json(Complex value) { return json{{"re", value.real()}, {"im", value.imag()}}; }

json to_json(const Gains& gains) {
  return json{{"method", to_string(gains.method)},
              {"alpha_hat", gains.alpha_hat},
              {"beta1", gains.beta1},
              {"beta2", gains.beta2},
              {"alpha", gains.base_alpha()}};
}

json to_json(const SpectralSummary& summary) {
  json eig = json::array();
  for (const Complex& l : summary.eigenvalues) eig.push_back(to_json(l));
  json out{{"eigenvalues", eig},
           {"is_real_spectrum", summary.is_real_spectrum},
           {"lambda_min", summary.lambda_min ? json(*summary.lambda_min) : json(nullptr)},
           {"lambda_max", summary.lambda_max},
           {"extremal_distinct", summary.extremal_distinct},
           {"alpha_bar", alpha_bar(summary)}};
  return out;
}

json to_json(const JuryRealResult& r) {
  return json{{"stable", r.stable},
              {"alpha_slack", r.alpha_slack},
              {"lower_slack", r.lower_slack},
              {"upper_slack", r.upper_slack}};
}

json to_json(const JuryComplexResult& r) {
  return json{{"stable", r.stable}, {"degenerate", r.degenerate}, {"slack", r.slack}};
}

json to_json(const StabilityReport& report) {
  json rows = json::array();
  for (const EigenvalueRoots& e : report.per_eigenvalue) {
    json roots = json::array();
    for (const Complex& z : e.roots) roots.push_back(to_json(z));
    rows.push_back(json{{"lambda", to_json(e.lambda)},
                        {"roots", roots},
                        {"max_magnitude", e.max_magnitude},
                        {"jury_stable", e.jury_stable}});
  }
  return json{{"stable", report.stable},
              {"spectral_radius", report.spectral_radius},
              {"margin", report.margin},
              {"jury_agrees", report.jury_agrees},
              {"per_eigenvalue", rows}};
}

json to_json(const DesignResult& result) {
  json margins = json::array();
  for (const auto& m : result.real_margins) margins.push_back(to_json(m));
  for (const auto& m : result.complex_margins) margins.push_back(to_json(m));
  return json{
      {"gains", to_json(result.gains)},
      {"objective", to_string(result.objective)},
      {"sigma", result.sigma},
      {"margin", 1.0 - result.sigma},
      {"settling_steps", result.settling_steps ? json(*result.settling_steps) : json(nullptr)},
      {"predicted_settling",
       result.predicted_settling ? json(*result.predicted_settling) : json(nullptr)},
      {"evaluated", result.evaluated},
      {"jury_margins", margins}};
}

std::string dump(const json& value) { return value.dump(2) + "\n"; }

}  // namespace consensus_lab::cli
