#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "hrb/bounds.hpp"
#include "hrb/dynamics.hpp"
#include "hrb/manifold.hpp"
#include "hrb/phase.hpp"
#include "hrb/slope.hpp"

namespace hrb::io {

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

// Atomic file creation: writes to a sibling temp file, then renames into
// place. Creates parent directories. Throws IoError on failure.
void write_text_file(const std::string& path, const std::string& content);
void write_binary_file(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

// 64-bit FNV-1a digest as 16 lowercase hex characters.
std::string fnv1a64_hex(const std::string& bytes);

// Generic CSV with one numeric table; values use format_double.
std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Specialized tables.
void write_spectrum_csv(const std::string& path, const Eigen::VectorXd& lambda);
void write_eigenspectrum_csv(const std::string& path,
                             const PcaDecomposition& dec);
void write_trajectories_csv(const std::string& path,
                            const TrajectoryEnsemble& ensemble);
void write_grid_csv(const std::string& path, const PhaseGrid& grid);
void write_bound_report_csv(const std::string& path, const BoundReport& report);

// Reads a numeric CSV (optionally with a single header row, which is
// skipped); throws IoError naming the offending line otherwise.
Eigen::MatrixXd read_csv_matrix(const std::string& path);

// JSON payloads; every document carries {"hrb_schema": 1, "kind": ...}.
nlohmann::json bound_report_json(const BoundReport& report);
nlohmann::json contours_json(const PhaseGrid& grid,
                             const std::vector<std::vector<ContourSet>>& per_ratio);
nlohmann::json slope_json(const SlopeEstimate& estimate);
nlohmann::json file_entry_json(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::string& path);

// Packed trajectory archive: magic "HRB1", then little-endian u64 n (state
// size), T (stored steps per trajectory), N (trajectories), then N * T * n
// float64 components, trajectory-major.
void write_ensemble_hrb1(const std::string& path,
                         const TrajectoryEnsemble& ensemble);

struct Hrb1Data {
  std::uint64_t n = 0;
  std::uint64_t steps = 0;
  std::uint64_t trajectories = 0;
  std::vector<double> data;
};
Hrb1Data read_ensemble_hrb1(const std::string& path);

// Figures: a log-scale eigenvalue plot and a phase heatmap with contours.
void write_spectrum_svg(const std::string& path, const PcaDecomposition& dec);
void write_phase_svg(const std::string& path, const PhaseGrid& grid,
                     int ratio_index, const std::vector<ContourSet>& contours);

}  // namespace hrb::io
