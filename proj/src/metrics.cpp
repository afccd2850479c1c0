#include "perf/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace perf {

GroupMetrics evaluate(const LinearModel& m, const Dataset& data, const LossKind& loss) {
  if (data.task != Task::classification)
    throw std::invalid_argument("evaluate: accuracy undefined for regression task");
  data.validate();
  const Eigen::VectorXd s = predict_scores(m, data.X);
  const Eigen::VectorXd l = batch_losses(m, data, loss);

  GroupMetrics gm;
  std::map<std::string, std::pair<double, long>> acc_count;  // group -> (correct, n)
  std::map<std::string, double> loss_sum;
  double correct = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const double pred = s(i) > 0.0 ? 1.0 : 0.0;
    const double hit = (pred == data.y(i)) ? 1.0 : 0.0;
    correct += hit;
    if (data.has_groups()) {
      auto& ac = acc_count[data.group[static_cast<size_t>(i)]];
      ac.first += hit;
      ac.second += 1;
      loss_sum[data.group[static_cast<size_t>(i)]] += l(i);
    }
  }
  gm.accuracy = correct / static_cast<double>(data.n());
  gm.mean_loss = l.mean();
  if (data.has_groups()) {
    double amin = 1.0, amax = 0.0;
    for (const auto& [g, ac] : acc_count) {
      const double a = ac.first / static_cast<double>(ac.second);
      gm.group_accuracy[g] = a;
      gm.group_loss[g] = loss_sum[g] / static_cast<double>(ac.second);
      amin = std::min(amin, a);
      amax = std::max(amax, a);
    }
    gm.fairness_gap = std::max(0.0, amax - amin);
  }
  return gm;
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no platform newline translation
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

}  // namespace

void emit_csv(const TrajectoryRecord& traj, const std::string& path) {
  std::ofstream out = open_for_write(path);
  out << "t,theta_gap,sup_loss,perf_loss,acc_all,acc_A,acc_B,eta\n";
  for (const auto& r : traj.iterations) {
    out << r.t << ',' << format_g17(r.theta_gap) << ',' << format_g17(r.sup_loss) << ','
        << format_g17(r.perf_loss) << ',' << format_g17(r.acc_all) << ',' << format_g17(r.acc_a)
        << ',' << format_g17(r.acc_b) << ',' << format_g17(r.eta) << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void emit_csv_table(const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows, const std::string& path) {
  std::ofstream out = open_for_write(path);
  for (size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  for (const auto& row : rows) {
    for (size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

void emit_svg_lines(const std::vector<SvgSeries>& series, const std::string& path,
                    const std::string& title, const std::string& x_label,
                    const std::string& y_label, bool log_y) {
  if (series.empty()) throw std::invalid_argument("emit_svg_lines: no series");
  const double W = 720, H = 480, ml = 70, mr = 160, mt = 50, mb = 55;

  // Collect finite (log-transformable when asked) points; count drops.
  struct Pt { double x, y; };
  std::vector<std::vector<Pt>> pts(series.size());
  long dropped = 0;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (size_t k = 0; k < series.size(); ++k) {
    if (series[k].x.size() != series[k].y.size() || series[k].x.empty())
      throw std::invalid_argument("emit_svg_lines: series '" + series[k].name + "' malformed");
    for (size_t i = 0; i < series[k].x.size(); ++i) {
      double x = series[k].x[i], y = series[k].y[i];
      if (!std::isfinite(x) || !std::isfinite(y) || (log_y && y <= 0.0)) {
        ++dropped;
        continue;
      }
      if (log_y) y = std::log10(y);
      pts[k].push_back({x, y});
      xmin = std::min(xmin, x); xmax = std::max(xmax, x);
      ymin = std::min(ymin, y); ymax = std::max(ymax, y);
    }
  }
  if (xmin > xmax) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
  if (xmax - xmin < 1e-12) { xmin -= 0.5; xmax += 0.5; }
  if (ymax - ymin < 1e-12) { ymin -= 0.5; ymax += 0.5; }

  auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto sy = [&](double y) { return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb); };

  std::ofstream out = open_for_write(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
      << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
      << "<text x=\"" << W / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">"
      << xml_escape(title) << "</text>\n"
      << "<text x=\"" << (ml + (W - ml - mr) / 2) << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << xml_escape(x_label) << "</text>\n"
      << "<text x=\"18\" y=\"" << (mt + (H - mt - mb) / 2)
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
      << (mt + (H - mt - mb) / 2) << ")\">" << xml_escape(y_label)
      << (log_y ? " (log10)" : "") << "</text>\n"
      << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\""
      << H - mt - mb << "\" fill=\"none\" stroke=\"#444\"/>\n";

  // axis ticks: 5 per axis
  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    out << "<text x=\"" << sx(xv) << "\" y=\"" << H - mb + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << format_g17(std::round(xv * 1e6) / 1e6).substr(0, 8)
        << "</text>\n"
        << "<text x=\"" << ml - 8 << "\" y=\"" << sy(yv) + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << format_g17(std::round(yv * 1e6) / 1e6).substr(0, 8)
        << "</text>\n";
  }

  for (size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % 8];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : pts[k]) out << sx(p.x) << ',' << sy(p.y) << ' ';
    out << "\"/>\n";
    const double ly = mt + 18.0 * static_cast<double>(k) + 10;
    out << "<line x1=\"" << W - mr + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - mr + 34
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << W - mr + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
        << xml_escape(series[k].name) << "</text>\n";
  }
  if (dropped > 0)
    out << "<text x=\"" << ml + 6 << "\" y=\"" << mt + 16 << "\" font-size=\"11\" fill=\"#a00\">"
        << dropped << " non-finite point(s) dropped</text>\n";
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace perf
