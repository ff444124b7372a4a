#include "hrb/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hrb/errors.hpp"

namespace hrb::io {

namespace fs = std::filesystem;

std::string format_double(double value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec == std::errc{}) return std::string(buf, res.ptr);
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

void write_bytes_atomic(const std::string& path, const std::string& bytes) {
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError("failed while writing " + tmp.string());
  }
  fs::rename(tmp, target, ec);
  if (ec)
    throw IoError("cannot move " + tmp.string() + " into place: " + ec.message());
}

std::uint64_t bswap64(std::uint64_t v) {
  std::uint64_t out = 0;
  for (int i = 0; i < 8; ++i) out = (out << 8) | ((v >> (8 * i)) & 0xffULL);
  return out;
}

void put_u64(std::string& out, std::uint64_t v) {
  if constexpr (std::endian::native != std::endian::little) v = bswap64(v);
  char buf[8];
  std::memcpy(buf, &v, 8);
  out.append(buf, 8);
}

std::uint64_t get_u64(const std::string& bytes, std::size_t offset) {
  std::uint64_t v = 0;
  std::memcpy(&v, bytes.data() + offset, 8);
  if constexpr (std::endian::native != std::endian::little) v = bswap64(v);
  return v;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  write_bytes_atomic(path, content);
}

void write_binary_file(const std::string& path, const std::string& bytes) {
  write_bytes_atomic(path, bytes);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("failed while reading " + path);
  return ss.str();
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string csv_table(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw IoError("csv row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  write_text_file(path, csv_table(header, rows));
}

void write_spectrum_csv(const std::string& path, const Eigen::VectorXd& lambda) {
  std::vector<std::vector<double>> rows;
  rows.reserve(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i)
    rows.push_back({static_cast<double>(i + 1), lambda[i]});
  write_csv(path, {"index", "lambda_K"}, rows);
}

void write_eigenspectrum_csv(const std::string& path,
                             const PcaDecomposition& dec) {
  std::vector<std::vector<double>> rows;
  const Eigen::Index n = dec.lambda_P.size();
  rows.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i)
    rows.push_back({static_cast<double>(i + 1), dec.lambda_P[i], dec.lambda_P1[i],
                    dec.lambda_sigma_w[i], dec.lambda_y[i],
                    dec.explained_variance[i]});
  write_csv(path,
            {"index", "lambda_P", "lambda_P1", "lambda_sigma_w", "lambda_y",
             "explained_variance"},
            rows);
}

void write_trajectories_csv(const std::string& path,
                            const TrajectoryEnsemble& ensemble) {
  std::vector<std::string> header = {"trajectory", "step"};
  for (int i = 1; i <= ensemble.n; ++i) header.push_back("r_" + std::to_string(i));
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (int traj = 0; traj < ensemble.N; ++traj) {
    for (int step = 0; step < ensemble.T; ++step) {
      out += std::to_string(traj);
      out += ',';
      out += std::to_string(step);
      const auto r = ensemble.residual(traj, step);
      for (int i = 0; i < ensemble.n; ++i) {
        out += ',';
        out += format_double(r[i]);
      }
      out += '\n';
    }
  }
  write_text_file(path, out);
}

void write_grid_csv(const std::string& path, const PhaseGrid& grid) {
  std::vector<std::vector<double>> rows;
  const auto& s = grid.spec;
  rows.reserve(grid.dims.size());
  for (std::size_t it = 0; it < s.T_values.size(); ++it)
    for (std::size_t ic = 0; ic < s.c_values.size(); ++ic)
      for (std::size_t ir = 0; ir < s.ratio_values.size(); ++ir)
        rows.push_back({static_cast<double>(s.T_values[it]), s.c_values[ic],
                        s.ratio_values[ir],
                        static_cast<double>(grid.dim_at(
                            static_cast<int>(it), static_cast<int>(ic),
                            static_cast<int>(ir)))});
  write_csv(path, {"T", "c", "ratio", "dims"}, rows);
}

void write_bound_report_csv(const std::string& path, const BoundReport& report) {
  std::string out = "family,index,numeric,bound,satisfied,slack\n";
  for (const auto& c : report.checks) {
    out += c.family;
    out += ',';
    out += std::to_string(c.index);
    out += ',';
    out += format_double(c.numeric);
    out += ',';
    out += format_double(c.bound);
    out += ',';
    out += c.satisfied ? '1' : '0';
    out += ',';
    out += format_double(c.slack);
    out += '\n';
  }
  write_text_file(path, out);
}

Eigen::MatrixXd read_csv_matrix(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool maybe_header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // Trim whitespace-only lines.
    if (line.find_first_not_of(" \t") == std::string::npos) continue;

    std::vector<double> row;
    bool ok = true;
    std::size_t field_start = 0;
    for (;;) {
      std::size_t comma = line.find(',', field_start);
      std::string tok = line.substr(
          field_start, comma == std::string::npos ? std::string::npos
                                                  : comma - field_start);
      const std::size_t a = tok.find_first_not_of(" \t");
      const std::size_t b = tok.find_last_not_of(" \t");
      tok = a == std::string::npos ? std::string() : tok.substr(a, b - a + 1);
      double value = 0.0;
      const char* begin = tok.data();
      const char* finish = tok.data() + tok.size();
      const auto res = std::from_chars(begin, finish, value);
      if (res.ec != std::errc{} || res.ptr != finish) {
        ok = false;
        if (!maybe_header)
          throw IoError(path + ": line " + std::to_string(line_no) +
                        ": bad number '" + tok + "'");
      }
      row.push_back(value);
      if (comma == std::string::npos) break;
      field_start = comma + 1;
    }
    if (!ok) {  // header row: allowed once, at the top
      maybe_header = false;
      continue;
    }
    maybe_header = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError(path + ": line " + std::to_string(line_no) +
                    ": expected " + std::to_string(rows.front().size()) +
                    " columns, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(path + ": no numeric rows");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

namespace {

nlohmann::json check_json(const BoundCheck& c) {
  return {{"family", c.family}, {"index", c.index},     {"numeric", c.numeric},
          {"bound", c.bound},   {"satisfied", c.satisfied}, {"slack", c.slack}};
}

}  // namespace

nlohmann::json bound_report_json(const BoundReport& report) {
  nlohmann::json doc;
  doc["hrb_schema"] = 1;
  doc["kind"] = "bound_report";
  doc["config"] = {{"n", report.config.n},
                   {"c", report.config.c},
                   {"alpha", report.config.alpha},
                   {"T", report.config.T},
                   {"sigma_w_sq", report.config.sigma_w_sq},
                   {"sigma_star_sq", report.config.sigma_star_sq},
                   {"method", report.config.method},
                   {"batch_size", report.config.batch_size},
                   {"lambda_wd", report.config.lambda_wd}};
  doc["rho"] = report.rho;
  doc["k_star"] = report.k_star;
  doc["y_norm_sq"] = report.y_norm_sq;
  doc["lemma2"] = {{"lower", report.lemma2.lower},
                   {"upper", report.lemma2.upper},
                   {"center", report.lemma2.center}};
  doc["all_satisfied"] = report.all_satisfied();
  doc["num_checks"] = report.checks.size();
  doc["violations"] = report.violations;
  doc["warnings"] = report.warnings;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) checks.push_back(check_json(c));
  doc["checks"] = std::move(checks);
  return doc;
}

nlohmann::json contours_json(
    const PhaseGrid& grid, const std::vector<std::vector<ContourSet>>& per_ratio) {
  nlohmann::json doc;
  doc["hrb_schema"] = 1;
  doc["kind"] = "contours";
  doc["T_values"] = grid.spec.T_values;
  doc["c_values"] = grid.spec.c_values;
  doc["ratio_values"] = grid.spec.ratio_values;
  doc["threshold"] = grid.spec.base.threshold;
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t ir = 0; ir < per_ratio.size(); ++ir) {
    for (const ContourSet& set : per_ratio[ir]) {
      nlohmann::json lines = nlohmann::json::array();
      for (const ContourLine& line : set.lines) {
        nlohmann::json pts = nlohmann::json::array();
        for (const ContourPoint& p : line)
          pts.push_back(nlohmann::json::array({p.x, p.y}));
        lines.push_back(std::move(pts));
      }
      entries.push_back({{"ratio_index", ir},
                         {"level", set.level},
                         {"lines", std::move(lines)}});
    }
  }
  doc["contours"] = std::move(entries);
  return doc;
}

nlohmann::json slope_json(const SlopeEstimate& estimate) {
  nlohmann::json doc;
  doc["hrb_schema"] = 1;
  doc["kind"] = "slope";
  doc["c_hat"] = estimate.c_hat;
  doc["r_squared"] = estimate.r_squared;
  doc["flat_spectrum"] = estimate.flat_spectrum;
  doc["index_range"] =
      nlohmann::json::array({estimate.index_range.first, estimate.index_range.second});
  doc["eigenvalues"] = std::vector<double>(
      estimate.eigenvalues.data(),
      estimate.eigenvalues.data() + estimate.eigenvalues.size());
  return doc;
}

nlohmann::json file_entry_json(const std::string& path) {
  const std::string bytes = read_file(path);
  return {{"bytes", bytes.size()}, {"fnv1a64", fnv1a64_hex(bytes)}};
}

void write_json(const std::string& path, const nlohmann::json& doc) {
  write_text_file(path, doc.dump(2) + "\n");
}

nlohmann::json read_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_ensemble_hrb1(const std::string& path,
                         const TrajectoryEnsemble& ensemble) {
  std::string out;
  const std::uint64_t steps = static_cast<std::uint64_t>(ensemble.T);
  const std::uint64_t count =
      static_cast<std::uint64_t>(ensemble.N) * steps * ensemble.n;
  out.reserve(4 + 24 + count * 8);
  out.append("HRB1", 4);
  put_u64(out, static_cast<std::uint64_t>(ensemble.n));
  put_u64(out, steps);
  put_u64(out, static_cast<std::uint64_t>(ensemble.N));
  if constexpr (std::endian::native == std::endian::little) {
    out.append(reinterpret_cast<const char*>(ensemble.data.data()), count * 8);
  } else {
    for (double v : ensemble.data) {
      std::uint64_t bits = 0;
      std::memcpy(&bits, &v, 8);
      put_u64(out, bits);
    }
  }
  write_binary_file(path, out);
}

Hrb1Data read_ensemble_hrb1(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 28 || bytes.compare(0, 4, "HRB1") != 0)
    throw IoError(path + ": not a trajectory archive");
  Hrb1Data out;
  out.n = get_u64(bytes, 4);
  out.steps = get_u64(bytes, 12);
  out.trajectories = get_u64(bytes, 20);
  const std::uint64_t count = out.n * out.steps * out.trajectories;
  if (out.n == 0 || out.steps == 0 || count > (1ULL << 33) ||
      bytes.size() != 28 + count * 8)
    throw IoError(path + ": corrupt trajectory archive");
  out.data.resize(count);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(out.data.data(), bytes.data() + 28, count * 8);
  } else {
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::uint64_t bits = get_u64(bytes, 28 + i * 8);
      std::memcpy(&out.data[i], &bits, 8);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG figures
// ---------------------------------------------------------------------------

namespace {

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Ramp {
  // Two-stop blue-to-yellow ramp; t in [0, 1].
  static std::string color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(40 + 215 * t);
    const int g = static_cast<int>(60 + 170 * t);
    const int b = static_cast<int>(130 * (1.0 - t) + 40);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    return buf;
  }
};

}  // namespace

void write_spectrum_svg(const std::string& path, const PcaDecomposition& dec) {
  const int n = static_cast<int>(dec.lambda_P.size());
  const double W = 640, H = 480, L = 70, R = 20, Tm = 20, B = 50;
  double vmax = dec.lambda_P1.size() ? dec.lambda_P1[0] : 1.0;
  vmax = std::max(vmax, 1e-300);
  const double floor_value = vmax * 1e-20;

  auto ylog = [&](double v) {
    const double lv = std::log10(std::max(v, floor_value));
    const double lmax = std::log10(vmax);
    const double lmin = std::log10(floor_value);
    return Tm + (lmax - lv) / (lmax - lmin) * (H - Tm - B);
  };
  auto xpos = [&](int i) {
    return L + (n > 1 ? (i - 1.0) / (n - 1.0) : 0.5) * (W - L - R);
  };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    px(W) + "\" height=\"" + px(H) + "\" viewBox=\"0 0 " +
                    px(W) + " " + px(H) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Decade grid lines.
  const int lmax = static_cast<int>(std::floor(std::log10(vmax)));
  const int lmin = static_cast<int>(std::ceil(std::log10(floor_value)));
  const int stride = std::max(1, (lmax - lmin) / 8);
  for (int e = lmax; e >= lmin; e -= stride) {
    const double y = ylog(std::pow(10.0, e));
    svg += "<line x1=\"" + px(L) + "\" y1=\"" + px(y) + "\" x2=\"" + px(W - R) +
           "\" y2=\"" + px(y) + "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + px(L - 6) + "\" y=\"" + px(y + 4) +
           "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">1e" +
           std::to_string(e) + "</text>\n";
  }

  struct Series {
    const Eigen::VectorXd* values;
    const char* color;
    const char* label;
  };
  const Series series[] = {
      {&dec.lambda_P, "#202020", "combined"},
      {&dec.lambda_P1, "#1f77b4", "uncentered"},
      {&dec.lambda_sigma_w, "#ff7f0e", "initialization part"},
      {&dec.lambda_y, "#2ca02c", "target part"},
  };
  double legend_y = Tm + 14;
  for (const Series& s : series) {
    if (!s.values->size()) continue;
    std::string pts;
    for (int i = 1; i <= n; ++i) {
      pts += px(xpos(i)) + "," + px(ylog((*s.values)[i - 1])) + " ";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(s.color) +
           "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    svg += "<text x=\"" + px(W - R - 150) + "\" y=\"" + px(legend_y) +
           "\" font-size=\"12\" font-family=\"sans-serif\" fill=\"" + s.color +
           "\">" + s.label + "</text>\n";
    legend_y += 16;
  }

  // Axes.
  svg += "<line x1=\"" + px(L) + "\" y1=\"" + px(Tm) + "\" x2=\"" + px(L) +
         "\" y2=\"" + px(H - B) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + px(L) + "\" y1=\"" + px(H - B) + "\" x2=\"" + px(W - R) +
         "\" y2=\"" + px(H - B) + "\" stroke=\"black\"/>\n";
  const int xticks = std::min(n, 10);
  for (int k = 0; k < xticks; ++k) {
    const int i = 1 + k * std::max(1, (n - 1) / std::max(1, xticks - 1));
    if (i > n) break;
    svg += "<text x=\"" + px(xpos(i)) + "\" y=\"" + px(H - B + 16) +
           "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">" +
           std::to_string(i) + "</text>\n";
  }
  svg += "<text x=\"" + px((L + W - R) / 2) + "\" y=\"" + px(H - 12) +
         "\" text-anchor=\"middle\" font-size=\"13\" "
         "font-family=\"sans-serif\">component index</text>\n";
  svg += "<text x=\"16\" y=\"" + px((Tm + H - B) / 2) +
         "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 16 " + px((Tm + H - B) / 2) +
         ")\">eigenvalue</text>\n";
  svg += "</svg>\n";
  write_text_file(path, svg);
}

void write_phase_svg(const std::string& path, const PhaseGrid& grid,
                     int ratio_index, const std::vector<ContourSet>& contours) {
  const auto& s = grid.spec;
  const int nt = static_cast<int>(s.T_values.size());
  const int nc = static_cast<int>(s.c_values.size());
  if (ratio_index < 0 || ratio_index >= static_cast<int>(s.ratio_values.size()))
    throw ConfigError("write_phase_svg: ratio index out of range");

  const double W = 640, H = 480, L = 70, R = 90, Tm = 30, B = 55;
  const double cmin = s.c_values.front(), cmax = s.c_values.back();
  const double tmin = std::log10(std::max(1.0, double(s.T_values.front())));
  const double tmax = std::log10(double(s.T_values.back()));

  auto xpos = [&](double c) {
    return L + (cmax > cmin ? (c - cmin) / (cmax - cmin) : 0.5) * (W - L - R);
  };
  auto ypos = [&](double T) {
    const double lt = std::log10(std::max(1.0, T));
    return H - B - (tmax > tmin ? (lt - tmin) / (tmax - tmin) : 0.5) * (H - Tm - B);
  };

  int dmin = grid.dims.empty() ? 0 : grid.dim_at(0, 0, ratio_index);
  int dmax = dmin;
  for (int it = 0; it < nt; ++it)
    for (int ic = 0; ic < nc; ++ic) {
      const int d = grid.dim_at(it, ic, ratio_index);
      dmin = std::min(dmin, d);
      dmax = std::max(dmax, d);
    }

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    px(W) + "\" height=\"" + px(H) + "\" viewBox=\"0 0 " +
                    px(W) + " " + px(H) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Heatmap cells: each grid point owns the rectangle between midpoints.
  auto mid = [](double a, double b) { return 0.5 * (a + b); };
  for (int it = 0; it < nt; ++it) {
    const double y_lo =
        it + 1 < nt ? mid(ypos(s.T_values[it]), ypos(s.T_values[it + 1]))
                    : Tm;
    const double y_hi =
        it > 0 ? mid(ypos(s.T_values[it]), ypos(s.T_values[it - 1])) : H - B;
    for (int ic = 0; ic < nc; ++ic) {
      const double x_lo =
          ic > 0 ? mid(xpos(s.c_values[ic]), xpos(s.c_values[ic - 1])) : L;
      const double x_hi = ic + 1 < nc
                              ? mid(xpos(s.c_values[ic]), xpos(s.c_values[ic + 1]))
                              : W - R;
      const int d = grid.dim_at(it, ic, ratio_index);
      const double t = dmax > dmin ? double(d - dmin) / (dmax - dmin) : 0.5;
      svg += "<rect x=\"" + px(x_lo) + "\" y=\"" + px(y_lo) + "\" width=\"" +
             px(x_hi - x_lo) + "\" height=\"" + px(y_hi - y_lo) + "\" fill=\"" +
             Ramp::color(t) + "\"/>\n";
    }
  }

  // Contour polylines.
  for (const ContourSet& set : contours) {
    for (const ContourLine& line : set.lines) {
      if (line.size() < 2) continue;
      std::string pts;
      for (const ContourPoint& p : line)
        pts += px(xpos(p.x)) + "," + px(ypos(p.y)) + " ";
      svg += "<polyline fill=\"none\" stroke=\"white\" stroke-width=\"2\" "
             "points=\"" + pts + "\"/>\n";
      svg += "<text x=\"" + px(xpos(line.front().x) + 4) + "\" y=\"" +
             px(ypos(line.front().y) - 4) +
             "\" font-size=\"11\" font-family=\"sans-serif\" fill=\"white\">" +
             std::to_string(set.level) + "</text>\n";
    }
  }

  // Axes and ticks.
  svg += "<line x1=\"" + px(L) + "\" y1=\"" + px(Tm) + "\" x2=\"" + px(L) +
         "\" y2=\"" + px(H - B) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + px(L) + "\" y1=\"" + px(H - B) + "\" x2=\"" + px(W - R) +
         "\" y2=\"" + px(H - B) + "\" stroke=\"black\"/>\n";
  for (double c = 0.2; c <= cmax + 1e-9; c += 0.2) {
    if (c < cmin) continue;
    svg += "<text x=\"" + px(xpos(c)) + "\" y=\"" + px(H - B + 16) +
           "\" text-anchor=\"middle\" font-size=\"11\" "
           "font-family=\"sans-serif\">" + px(c).substr(0, 4) + "</text>\n";
  }
  for (int e = 0; e <= 5; ++e) {
    const double T = std::pow(10.0, e);
    if (T < s.T_values.front() || T > s.T_values.back()) continue;
    svg += "<text x=\"" + px(L - 6) + "\" y=\"" + px(ypos(T) + 4) +
           "\" text-anchor=\"end\" font-size=\"11\" "
           "font-family=\"sans-serif\">1e" + std::to_string(e) + "</text>\n";
  }
  svg += "<text x=\"" + px((L + W - R) / 2) + "\" y=\"" + px(H - 12) +
         "\" text-anchor=\"middle\" font-size=\"13\" "
         "font-family=\"sans-serif\">decay rate c</text>\n";
  svg += "<text x=\"16\" y=\"" + px((Tm + H - B) / 2) +
         "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 16 " + px((Tm + H - B) / 2) +
         ")\">training steps T</text>\n";

  // Colorbar.
  const double bar_x = W - R + 20, bar_w = 16;
  for (int k = 0; k < 64; ++k) {
    const double t = 1.0 - k / 63.0;
    const double y = Tm + k * (H - Tm - B) / 64.0;
    svg += "<rect x=\"" + px(bar_x) + "\" y=\"" + px(y) + "\" width=\"" +
           px(bar_w) + "\" height=\"" + px((H - Tm - B) / 64.0 + 0.5) +
           "\" fill=\"" + Ramp::color(t) + "\"/>\n";
  }
  svg += "<text x=\"" + px(bar_x + bar_w + 4) + "\" y=\"" + px(Tm + 10) +
         "\" font-size=\"11\" font-family=\"sans-serif\">" +
         std::to_string(dmax) + "</text>\n";
  svg += "<text x=\"" + px(bar_x + bar_w + 4) + "\" y=\"" + px(H - B) +
         "\" font-size=\"11\" font-family=\"sans-serif\">" +
         std::to_string(dmin) + "</text>\n";
  svg += "<text x=\"" + px(bar_x) + "\" y=\"" + px(Tm - 8) +
         "\" font-size=\"11\" font-family=\"sans-serif\">dims</text>\n";

  svg += "</svg>\n";
  write_text_file(path, svg);
}

}  // namespace hrb::io
