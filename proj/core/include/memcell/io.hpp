#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "memcell/channel.hpp"
#include "memcell/fixpoint.hpp"
#include "memcell/memory.hpp"
#include "memcell/superactivation.hpp"
#include "memcell/types.hpp"

namespace memcell::io {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Raw contents of a channel file before any CPTP check, so that `validate`
/// can report the residual of a non-TP Kraus set.
struct ChannelFile {
  Index dim = 0;
  std::vector<Matrix> kraus;
  std::string source;
};

/// Whole file or stdin when path is "-". Throws ParseError when unreadable.
std::string read_text(const std::string& path);

/// Parses {"dim": d, "kraus": [[[ [re, im], ... ], ...], ...]}. Matrices are
/// row-major. Errors name the line and column or the offending field.
ChannelFile parse_channel_file(const std::string& text, const std::string& source = "<input>");
ChannelFile load_channel_file(const std::string& path);

/// Parses and validates; a non-TP set raises DomainError with the residual.
QuantumChannel load_channel(const std::string& path, double tol_cptp = Tolerances{}.cptp);

Json channel_to_json(const QuantumChannel& channel);

/// Values are rounded to a 1e-12 grid so reports stay byte-stable under
/// harmless last-digit noise. Negative zero is printed as 0.
double rounded(double x);
Json to_json(Complex z);
Json to_json(const Matrix& m);
Json to_json(const Shape& shape);
Json to_json(const SpectrumEntry& entry);
Json to_json(const PeripheralSpectrum& spectrum);
Json to_json(const StructureDecomposition& dec);
Json to_json(const CyclicFamily& family);
Json to_json(const EntanglementCertificate& cert);
Json to_json(const SuperactivationReport& report);

/// Settings shared by every command. Loaded from an optional JSON config
/// file; command-line flags override individual fields afterwards.
struct AnalysisConfig {
  Tolerances tol{};
  std::uint64_t seed = AnalysisOptions{}.seed;
  int t_max = 4;
  GrowthBudget budget{};
  std::string format = "json";

  AnalysisOptions options() const;
  /// Throws DomainError for non-positive tolerances, t_max < 1 or an unknown
  /// format.
  void check() const;
};

/// Keys: tol_cptp, tol_psd, tol_eig, clustering, seed, t_max, max_dim,
/// max_fix_dimension, format. Unknown keys are rejected.
AnalysisConfig parse_config(const std::string& text, const std::string& source = "<config>");
Json to_json(const AnalysisConfig& config);

/// "basis:i", "plus", "mixed", "random" (seeded) or "@file" holding a JSON
/// matrix in the channel entry format.
DensityOperator parse_payload(const std::string& spec, Index dim, std::uint64_t seed);

/// Report bodies. Each starts with "schema" and "command".
Json validate_report(const ChannelFile& file, const CptpReport& report, double tol);
Json analyze_report(const CellAnalysis& analysis, const AnalysisConfig& config);
Json superactivate_report(const SuperactivationReport& report, const AnalysisConfig& config);
Json roundtrip_report(const std::vector<RoundTrip>& rows, const std::string& payload_spec,
                      const AnalysisConfig& config);

/// Two-space indentation and a trailing newline.
std::string dump(const Json& j);

}  // namespace memcell::io
