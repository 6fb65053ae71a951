#pragma once

#include <filesystem>
#include <string>

#include "cma/audit.hpp"
#include "cma/certificates.hpp"
#include "cma/report.hpp"
#include "cma/solver.hpp"

// File-format layer: CSV with fixed versioned columns and 17-significant-digit
// floats (round-trip exact), JSON summaries with sorted keys, and the flat
// binary field format with its sidecar header. Summaries never carry
// timestamps or wall times; those live in the run metadata file.

namespace cma::output {

inline constexpr int kCsvSchemaVersion = 1;

std::string fmt_g17(double v);

void write_text(const std::filesystem::path& path, const std::string& content);

/// <stem>.bin: 64-bit floats over all grid nodes in node-index order
/// (axis 0 fastest), 0 at non-value-carrying nodes. <stem>_header.json:
/// dims, origin, spacing, classification run-length encoding.
void write_field(const std::filesystem::path& dir, const std::string& stem,
                 const solver::GridField& u);

std::string field_header_json(const solver::Grid4& grid);

std::string solve_report_json(const solver::SolveReport& rep);

std::string rank_map_csv(const audit::RankMap& map);
std::string rank_map_summary_json(const audit::RankMap& map);

std::string rank2_suite_csv(const cert::Rank2Suite& suite);
std::string rank3_suite_csv(const cert::Rank3Suite& suite);
std::string suite_summary_json(const cert::SuiteSummary& summary);

std::string certificate_report_json(const CertificateReport& rep);

/// audit_<bodyhash16>_h<h>_psi<psi>[_t<t>] with '.' kept readable.
std::string tagged_stem(const std::string& prefix, const bodies::ConvexBody& body,
                        double h, double psi, double t = -1.0);

std::string run_meta_json(double wall_ms_total);

} // namespace cma::output
