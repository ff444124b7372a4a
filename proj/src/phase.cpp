#include "hrb/phase.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <utility>

#include "hrb/dataset.hpp"
#include "hrb/errors.hpp"
#include "hrb/manifold.hpp"
#include "hrb/parallel.hpp"

namespace hrb {

void PhaseGridSpec::validate() const {
  if (T_values.empty() || c_values.empty() || ratio_values.empty())
    throw ConfigError("phase grid: every axis needs at least one value");
  for (int t : T_values)
    if (t < 1) throw ConfigError("phase grid: horizons must be positive");
  for (double c : c_values)
    if (!(c > 0.0) || !(c * base.n > 1.0))
      throw ConfigError("phase grid: decay rate must satisfy c * n > 1");
  for (double r : ratio_values)
    if (!(r > 0.0)) throw ConfigError("phase grid: ratios must be positive");
  if (base.n < 2) throw ConfigError("phase grid: need n >= 2");
  if (!(base.alpha > 0.0)) throw ConfigError("phase grid: step size must be positive");
  if (!(base.sigma_w_sq > 0.0))
    throw ConfigError("phase grid: initialization variance must be positive");
  if (!(base.threshold > 0.0) || base.threshold > 1.0)
    throw ConfigError("phase grid: threshold must lie in (0, 1]");
}

PhaseGridSpec PhaseGridSpec::defaults() {
  PhaseGridSpec spec;
  spec.T_values = {1,   2,   3,   4,    7,    11,   18,   30,   48,   78,
                   127, 207, 336, 546,  886,  1438, 2336, 3793, 6158, 10000};
  spec.c_values.resize(20);
  for (int i = 0; i < 20; ++i)
    spec.c_values[i] = 0.025 + i * (1.0 - 0.025) / 19.0;
  spec.ratio_values = {4.38, 1.32, 0.33};
  return spec;
}

int PhaseGrid::dim_at(int it, int ic, int ir) const {
  const int nc = static_cast<int>(spec.c_values.size());
  const int nr = static_cast<int>(spec.ratio_values.size());
  return dims[(static_cast<std::size_t>(it) * nc + ic) * nr + ir];
}

PhaseGrid phase_sweep(const PhaseGridSpec& spec, int threads) {
  spec.validate();
  const int nt = static_cast<int>(spec.T_values.size());
  const int nc = static_cast<int>(spec.c_values.size());
  const int nr = static_cast<int>(spec.ratio_values.size());

  PhaseGrid grid;
  grid.spec = spec;
  grid.dims.assign(static_cast<std::size_t>(nt) * nc * nr, 0);

  parallel_for(nt * nc * nr, threads, [&](int flat) {
    const int ir = flat % nr;
    const int ic = (flat / nr) % nc;
    const int it = flat / (nr * nc);
    const double ratio = spec.ratio_values[ir];
    const double sigma_star_sq =
        ratio * ratio * spec.base.sigma_w_sq;
    const SpectralProblem problem = synthesize_spectral(
        spec.base.n, spec.c_values[ic], sigma_star_sq, spec.base.seed,
        static_cast<std::uint64_t>(ic));
    const PcaDecomposition dec = analytic_pca(problem, spec.base.alpha,
                                              spec.T_values[it],
                                              spec.base.sigma_w_sq);
    grid.dims[flat] =
        hyper_ribbon_dim(dec.lambda_P, spec.base.threshold).dims;
  });
  return grid;
}

namespace {

struct Key {
  long long x;
  long long y;
  bool operator<(const Key& o) const {
    return x != o.x ? x < o.x : y < o.y;
  }
};

Key quantize(const ContourPoint& p) {
  return {llround(p.x * 1e9), llround(p.y * 1e6)};
}

struct Segment {
  ContourPoint a;
  ContourPoint b;
  bool used = false;
};

ContourPoint lerp(double xa, double ya, double va, double xb, double yb,
                  double vb, double iso) {
  const double t = (iso - va) / (vb - va);
  return {xa + t * (xb - xa), ya + t * (yb - ya)};
}

}  // namespace

std::vector<ContourLine> iso_lines(const Eigen::MatrixXd& field,
                                   const std::vector<double>& xs,
                                   const std::vector<double>& ys, double iso) {
  const int rows = static_cast<int>(field.rows());
  const int cols = static_cast<int>(field.cols());
  if (rows != static_cast<int>(ys.size()) || cols != static_cast<int>(xs.size()))
    throw ConfigError("iso_lines: coordinate sizes do not match the field");
  if (rows < 2 || cols < 2) return {};

  std::vector<Segment> segments;
  for (int r = 0; r + 1 < rows; ++r) {
    for (int c = 0; c + 1 < cols; ++c) {
      const double x0 = xs[c], x1 = xs[c + 1];
      const double y0 = ys[r], y1 = ys[r + 1];
      const double vA = field(r, c);       // (x0, y0)
      const double vB = field(r, c + 1);   // (x1, y0)
      const double vC = field(r + 1, c + 1);  // (x1, y1)
      const double vD = field(r + 1, c);   // (x0, y1)
      const int code = (vA >= iso ? 1 : 0) | (vB >= iso ? 2 : 0) |
                       (vC >= iso ? 4 : 0) | (vD >= iso ? 8 : 0);
      if (code == 0 || code == 15) continue;

      auto bottom = [&] { return lerp(x0, y0, vA, x1, y0, vB, iso); };
      auto right = [&] { return lerp(x1, y0, vB, x1, y1, vC, iso); };
      auto top = [&] { return lerp(x0, y1, vD, x1, y1, vC, iso); };
      auto left = [&] { return lerp(x0, y0, vA, x0, y1, vD, iso); };
      auto emit = [&](ContourPoint a, ContourPoint b) {
        segments.push_back({a, b, false});
      };

      switch (code) {
        case 1: emit(left(), bottom()); break;
        case 2: emit(bottom(), right()); break;
        case 3: emit(left(), right()); break;
        case 4: emit(right(), top()); break;
        case 5: {
          const bool center = (vA + vB + vC + vD) / 4.0 >= iso;
          if (center) {
            emit(bottom(), right());
            emit(top(), left());
          } else {
            emit(left(), bottom());
            emit(right(), top());
          }
          break;
        }
        case 6: emit(bottom(), top()); break;
        case 7: emit(left(), top()); break;
        case 8: emit(top(), left()); break;
        case 9: emit(bottom(), top()); break;
        case 10: {
          const bool center = (vA + vB + vC + vD) / 4.0 >= iso;
          if (center) {
            emit(left(), bottom());
            emit(right(), top());
          } else {
            emit(bottom(), right());
            emit(top(), left());
          }
          break;
        }
        case 11: emit(right(), top()); break;
        case 12: emit(right(), left()); break;
        case 13: emit(bottom(), right()); break;
        case 14: emit(left(), bottom()); break;
        default: break;
      }
    }
  }

  // Chain segments that share endpoints into polylines.
  std::multimap<Key, int> by_end;
  for (int i = 0; i < static_cast<int>(segments.size()); ++i) {
    by_end.emplace(quantize(segments[i].a), i);
    by_end.emplace(quantize(segments[i].b), i);
  }
  auto take_neighbor = [&](const ContourPoint& p, int self) -> int {
    auto [lo, hi] = by_end.equal_range(quantize(p));
    for (auto it = lo; it != hi; ++it)
      if (it->second != self && !segments[it->second].used) return it->second;
    return -1;
  };

  auto same = [](const Key& a, const Key& b) { return !(a < b) && !(b < a); };
  std::vector<ContourLine> lines;
  for (int i = 0; i < static_cast<int>(segments.size()); ++i) {
    if (segments[i].used) continue;
    segments[i].used = true;
    std::deque<ContourPoint> line{segments[i].a, segments[i].b};
    for (;;) {  // extend the tail
      const int j = take_neighbor(line.back(), i);
      if (j < 0) break;
      segments[j].used = true;
      line.push_back(same(quantize(segments[j].a), quantize(line.back()))
                         ? segments[j].b
                         : segments[j].a);
    }
    for (;;) {  // extend the head
      const int j = take_neighbor(line.front(), i);
      if (j < 0) break;
      segments[j].used = true;
      line.push_front(same(quantize(segments[j].a), quantize(line.front()))
                          ? segments[j].b
                          : segments[j].a);
    }
    lines.emplace_back(line.begin(), line.end());
  }
  return lines;
}

std::vector<ContourSet> extract_contours(const PhaseGrid& grid, int ratio_index,
                                         const std::vector<int>& levels) {
  const int nt = static_cast<int>(grid.spec.T_values.size());
  const int nc = static_cast<int>(grid.spec.c_values.size());
  const int nr = static_cast<int>(grid.spec.ratio_values.size());
  if (ratio_index < 0 || ratio_index >= nr)
    throw ConfigError("extract_contours: ratio index out of range");

  Eigen::MatrixXd field(nt, nc);
  for (int it = 0; it < nt; ++it)
    for (int ic = 0; ic < nc; ++ic)
      field(it, ic) = grid.dim_at(it, ic, ratio_index);

  std::vector<double> xs(grid.spec.c_values.begin(), grid.spec.c_values.end());
  std::vector<double> ys(nt);
  for (int it = 0; it < nt; ++it) ys[it] = grid.spec.T_values[it];

  std::vector<ContourSet> out;
  for (int level : levels) {
    ContourSet set;
    set.level = level;
    set.lines = iso_lines(field, xs, ys, level + 0.5);
    out.push_back(std::move(set));
  }
  return out;
}

}  // namespace hrb
