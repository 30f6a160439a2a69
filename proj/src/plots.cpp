#include "regaug/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace regaug {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string join_values(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

void svg_open(std::ostringstream& o, double w, double h) {
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
    << "\" viewBox=\"0 0 " << fmt(w) << ' ' << fmt(h) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void line(std::ostringstream& o, double x1, double y1, double x2, double y2, std::string_view extra) {
  o << "<line x1=\"" << fmt(x1) << "\" y1=\"" << fmt(y1) << "\" x2=\"" << fmt(x2) << "\" y2=\"" << fmt(y2) << "\" "
    << extra << "/>\n";
}

void text(std::ostringstream& o, double x, double y, std::string_view anchor, std::string_view body,
          std::string_view extra = {}) {
  o << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" text-anchor=\"" << anchor << "\"";
  if (!extra.empty()) o << ' ' << extra;
  o << '>' << xml_escape(body) << "</text>\n";
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> cd_cliques(std::vector<double> sorted_ranks, double cd) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (!(cd > 0.0)) return out;
  std::sort(sorted_ranks.begin(), sorted_ranks.end());
  const std::size_t m = sorted_ranks.size();
  std::size_t covered_to = 0;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t j = i;
    while (j + 1 < m && sorted_ranks[j + 1] - sorted_ranks[i] < cd) ++j;
    if (j == i) continue;
    // Skip groups contained in the previous one.
    if (!out.empty() && j <= covered_to) continue;
    out.emplace_back(i, j);
    covered_to = j;
  }
  return out;
}

std::string cd_diagram_svg(const std::vector<std::string>& names, const std::vector<double>& mean_ranks, double cd,
                           const std::string& title) {
  if (names.size() != mean_ranks.size()) throw Error("cd diagram: names and ranks differ in length");
  if (names.empty()) throw Error("cd diagram: no methods");
  const std::size_t m = names.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mean_ranks[a] < mean_ranks[b]; });
  std::vector<double> sorted(m);
  for (std::size_t i = 0; i < m; ++i) sorted[i] = mean_ranks[order[i]];
  const auto cliques = cd_cliques(sorted, cd);

  const double lo = 1.0;
  const double hi = std::max<double>(2.0, static_cast<double>(m));
  const double x0 = 160.0;
  const double x1 = 480.0;
  const double axis_y = title.empty() ? 60.0 : 80.0;
  auto xpos = [&](double r) { return x0 + (r - lo) / (hi - lo) * (x1 - x0); };
  const std::size_t left_count = (m + 1) / 2;
  const double label_base = axis_y + 28.0 + 6.0 * static_cast<double>(cliques.size());
  const double height = label_base + 20.0 * static_cast<double>(left_count) + 20.0;

  std::ostringstream o;
  svg_open(o, 640.0, height);
  if (!title.empty()) text(o, 320.0, 20.0, "middle", title, "font-weight=\"bold\"");
  if (cd > 0.0 && std::isfinite(cd)) {
    const double cy = axis_y - 36.0;
    line(o, xpos(lo), cy, xpos(std::min(hi, lo + cd)), cy, "class=\"cd\" stroke=\"black\" stroke-width=\"2\"");
    text(o, xpos(lo), cy - 6.0, "start", "CD = " + fmt_label(cd));
  }
  line(o, x0, axis_y, x1, axis_y, "class=\"axis\" stroke=\"black\"");
  for (int t = 1; t <= static_cast<int>(hi); ++t) {
    line(o, xpos(t), axis_y - 5.0, xpos(t), axis_y, "class=\"tick\" stroke=\"black\"");
    text(o, xpos(t), axis_y - 9.0, "middle", std::to_string(t));
  }
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t idx = order[i];
    const double x = xpos(sorted[i]);
    o << "<circle class=\"method\" data-rank=\"" << format_double(sorted[i]) << "\" cx=\"" << fmt(x) << "\" cy=\""
      << fmt(axis_y) << "\" r=\"3\" fill=\"black\"/>\n";
    const bool left = i < left_count;
    const double ly = label_base + 20.0 * static_cast<double>(left ? i : m - 1 - i);
    const double lx = left ? x0 - 10.0 : x1 + 10.0;
    o << "<polyline points=\"" << fmt(x) << ',' << fmt(axis_y) << ' ' << fmt(x) << ',' << fmt(ly) << ' ' << fmt(lx)
      << ',' << fmt(ly) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
    text(o, left ? lx - 4.0 : lx + 4.0, ly + 4.0, left ? "end" : "start",
         names[idx] + " (" + fmt(sorted[i]) + ")");
  }
  for (std::size_t c = 0; c < cliques.size(); ++c) {
    const double y = axis_y + 14.0 + 6.0 * static_cast<double>(c);
    line(o, xpos(sorted[cliques[c].first]) - 3.0, y, xpos(sorted[cliques[c].second]) + 3.0, y,
         "class=\"clique\" stroke=\"black\" stroke-width=\"4\"");
  }
  o << "</svg>\n";
  return o.str();
}

void emit_cd_diagram(const std::vector<std::string>& names, const std::vector<double>& mean_ranks, double cd,
                     const std::filesystem::path& out_path, const std::string& title) {
  write_file_atomic(out_path, cd_diagram_svg(names, mean_ranks, cd, title));
}

SCurve s_curve_data(const ExperimentReport& report, const std::string& dataset, RegressorKind reg,
                    const std::vector<std::size_t>& s_values, std::size_t folds) {
  if (s_values.empty()) throw Error("s curve: no S values");
  SCurve c;
  c.s_values = s_values;
  for (std::size_t s : s_values) {
    c.augmented_test.push_back(mean(report.test_rmses(dataset, reg, Arm::augmented, s, folds)));
    c.augmented_train.push_back(mean(report.train_rmses(dataset, reg, Arm::augmented, s, folds)));
  }
  c.native_test = mean(report.test_rmses(dataset, reg, Arm::native, s_values.front(), folds));
  c.native_train = mean(report.train_rmses(dataset, reg, Arm::native, s_values.front(), folds));
  return c;
}

std::string s_curve_svg(const SCurve& c, const std::string& title) {
  const std::size_t k = c.s_values.size();
  if (k == 0 || c.augmented_test.size() != k || c.augmented_train.size() != k) {
    throw Error("s curve: inconsistent series lengths");
  }
  const double px0 = 70.0, px1 = 520.0, py0 = 40.0, py1 = 300.0;
  double vmin = std::min(c.native_test, c.native_train);
  double vmax = std::max(c.native_test, c.native_train);
  for (std::size_t i = 0; i < k; ++i) {
    vmin = std::min({vmin, c.augmented_test[i], c.augmented_train[i]});
    vmax = std::max({vmax, c.augmented_test[i], c.augmented_train[i]});
  }
  if (vmax - vmin <= 0.0) {
    const double pad = vmax != 0.0 ? std::abs(vmax) * 0.5 : 1.0;
    vmin -= pad;
    vmax += pad;
  } else {
    const double pad = 0.05 * (vmax - vmin);
    vmin -= pad;
    vmax += pad;
  }
  std::vector<double> lx(k);
  for (std::size_t i = 0; i < k; ++i) lx[i] = std::log2(static_cast<double>(c.s_values[i]));
  const double lmin = *std::min_element(lx.begin(), lx.end());
  const double lmax = *std::max_element(lx.begin(), lx.end());
  auto xpos = [&](double l) { return lmax > lmin ? px0 + (l - lmin) / (lmax - lmin) * (px1 - px0) : (px0 + px1) / 2; };
  auto ypos = [&](double v) { return py1 - (v - vmin) / (vmax - vmin) * (py1 - py0); };

  std::ostringstream o;
  svg_open(o, 640.0, 360.0);
  if (!title.empty()) text(o, 295.0, 20.0, "middle", title, "font-weight=\"bold\"");
  line(o, px0, py1, px1, py1, "class=\"axis\" stroke=\"black\"");
  line(o, px0, py0, px0, py1, "class=\"axis\" stroke=\"black\"");
  for (std::size_t i = 0; i < k; ++i) {
    line(o, xpos(lx[i]), py1, xpos(lx[i]), py1 + 5.0, "stroke=\"black\"");
    text(o, xpos(lx[i]), py1 + 18.0, "middle", std::to_string(c.s_values[i]));
  }
  for (int t = 0; t <= 4; ++t) {
    const double v = vmin + (vmax - vmin) * t / 4.0;
    line(o, px0 - 5.0, ypos(v), px0, ypos(v), "stroke=\"black\"");
    text(o, px0 - 8.0, ypos(v) + 4.0, "end", fmt_label(v));
  }
  text(o, (px0 + px1) / 2.0, py1 + 36.0, "middle", "S");
  text(o, 18.0, (py0 + py1) / 2.0, "middle", "RMSE",
       "transform=\"rotate(-90 18 " + fmt((py0 + py1) / 2.0) + ")\"");

  auto baseline = [&](std::string_view cls, double v, std::string_view colour) {
    o << "<line class=\"" << cls << "\" data-value=\"" << format_double(v) << "\" x1=\"" << fmt(px0) << "\" y1=\""
      << fmt(ypos(v)) << "\" x2=\"" << fmt(px1) << "\" y2=\"" << fmt(ypos(v)) << "\" stroke=\"" << colour
      << "\" stroke-dasharray=\"6 4\"/>\n";
  };
  auto series = [&](std::string_view cls, const std::vector<double>& v, std::string_view colour) {
    o << "<polyline class=\"" << cls << "\" data-values=\"" << join_values(v) << "\" points=\"";
    for (std::size_t i = 0; i < k; ++i) {
      if (i) o << ' ';
      o << fmt(xpos(lx[i])) << ',' << fmt(ypos(v[i]));
    }
    o << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
  };
  baseline("native-test", c.native_test, "#1f77b4");
  baseline("native-train", c.native_train, "#ff7f0e");
  series("augmented-test", c.augmented_test, "#1f77b4");
  series("augmented-train", c.augmented_train, "#ff7f0e");

  const double ly = py0 + 4.0;
  const char* labels[] = {"augmented test", "augmented train", "native test", "native train"};
  const char* colours[] = {"#1f77b4", "#ff7f0e", "#1f77b4", "#ff7f0e"};
  for (int i = 0; i < 4; ++i) {
    const double y = ly + 16.0 * i;
    line(o, 530.0, y, 555.0, y,
         std::string("stroke=\"") + colours[i] + "\" stroke-width=\"2\"" + (i >= 2 ? " stroke-dasharray=\"6 4\"" : ""));
    text(o, 560.0, y + 4.0, "start", labels[i], "font-size=\"9\"");
  }
  o << "</svg>\n";
  return o.str();
}

void emit_s_curve(const ExperimentReport& report, const std::string& dataset, RegressorKind reg,
                  const std::vector<std::size_t>& s_values, std::size_t folds, const std::filesystem::path& out_path) {
  const SCurve c = s_curve_data(report, dataset, reg, s_values, folds);
  write_file_atomic(out_path, s_curve_svg(c, dataset + " / " + to_string(reg)));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace regaug
