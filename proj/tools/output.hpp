#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "consensus_lab/design.hpp"
#include "consensus_lab/sim.hpp"
#include "consensus_lab/stability.hpp"

namespace consensus_lab::cli {

using json = nlohmann::ordered_json;

/// 12 significant digits, the CSV convention.
std::string csv_number(double value);

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);
  CsvWriter& row(const std::vector<std::string>& cells);
  std::string str() const { return text_; }

 private:
  std::string text_;
};

std::uint64_t fnv1a(std::string_view bytes);
std::string hex_digest(std::string_view bytes);

json to_json(Complex value);
json to_json(const Gains& gains);
json to_json(const SpectralSummary& summary);
json to_json(const StabilityReport& report);
json to_json(const DesignResult& result);
json to_json(const JuryRealResult& r);
json to_json(const JuryComplexResult& r);

std::string dump(const json& value);

}  // namespace consensus_lab::cli
