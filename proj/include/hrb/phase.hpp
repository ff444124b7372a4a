#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace hrb {

// Base parameters shared by every cell of a dimensionality sweep.
struct PhaseBase {
  int n = 50;
  int d = 100;
  double alpha = 1.0;
  double sigma_w_sq = 1.0;
  double threshold = 0.95;
  std::uint64_t seed = 1;
};

// Grid over training horizon T, spectrum decay rate c, and the
// signal-to-initialization ratio sigma_star / sigma_w.
struct PhaseGridSpec {
  std::vector<int> T_values;
  std::vector<double> c_values;
  std::vector<double> ratio_values;
  PhaseBase base;

  void validate() const;
  static PhaseGridSpec defaults();
};

struct PhaseGrid {
  PhaseGridSpec spec;
  // Flattened as ((it * |c| + ic) * |ratio| + ir).
  std::vector<int> dims;

  int dim_at(int it, int ic, int ir) const;
};

// Evaluates the closed-form covariance in every cell and records how many
// principal directions are needed to reach the explained-variance threshold.
// Cell targets are redrawn per decay rate and shared across T and ratio so
// slices through the grid vary only the intended parameter.
PhaseGrid phase_sweep(const PhaseGridSpec& spec, int threads = 1);

struct ContourPoint {
  double x = 0.0;  // decay rate c
  double y = 0.0;  // horizon T
};
using ContourLine = std::vector<ContourPoint>;

struct ContourSet {
  int level = 0;  // iso value is level + 1/2
  std::vector<ContourLine> lines;
};

// Marching squares on a rectilinear grid. field(row, col) is sampled at
// (xs[col], ys[row]); segments are chained into polylines. Saddle cells are
// disambiguated by the cell-center average.
std::vector<ContourLine> iso_lines(const Eigen::MatrixXd& field,
                                   const std::vector<double>& xs,
                                   const std::vector<double>& ys, double iso);

// Contours of the dimension field at iso values level + 1/2 for one ratio
// slice; x = c, y = T.
std::vector<ContourSet> extract_contours(const PhaseGrid& grid, int ratio_index,
                                         const std::vector<int>& levels);

}  // namespace hrb
