#pragma once

#include <nlohmann/json.hpp>

#include <fstream>
#include <string>

#include "afree/convexity.hpp"
#include "afree/density.hpp"
#include "afree/dynamics.hpp"
#include "afree/projection.hpp"
#include "afree/statics.hpp"
#include "afree/symbol.hpp"

namespace afree {

/// Fixed shortest-roundtrip formatting so reports and CSVs are byte-stable.
std::string format_double(double v);

/// Minimal CSV emitter; all numeric cells go through format_double.
class CsvWriter {
public:
  explicit CsvWriter(const std::string& path);
  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& cells);

private:
  std::ofstream out_;
};

nlohmann::json to_json(const RankReport& r);
nlohmann::json to_json(const CompatReport& r);
nlohmann::json to_json(const SymbolSample& s);
nlohmann::json to_json(const PrimitiveBoundsReport& r);
nlohmann::json to_json(const DecompositionDiagnostics& d);
nlohmann::json to_json(const DensityCheckReport& r);
nlohmann::json to_json(const ExcessBoundsReport& r);
nlohmann::json to_json(const LambdaConvexityReport& r);
nlohmann::json to_json(const AqcReport& r);
nlohmann::json to_json(const GardingReport& r);
nlohmann::json to_json(const QuadraticGardingReport& r);
nlohmann::json to_json(const EntropyCompatReport& r);
nlohmann::json to_json(const StabilityReport& r);
nlohmann::json to_json(const MinimalityReport& r);

/// 64-bit FNV-1a of a string, hex-encoded; used to stamp reports with the
/// run-spec they came from.
std::string fnv1a_hex(const std::string& text);

} // namespace afree
