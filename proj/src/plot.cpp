#include "faassim/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace faassim {

namespace {

struct Series {
    std::string policy;
    std::vector<std::pair<double, double>> points; // (load, metric), seeds averaged
};

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(sep, pos);
        out.push_back(line.substr(pos, next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Axis tick positions: 1-2-5 progression covering [lo, hi].
std::vector<double> linear_ticks(double lo, double hi) {
    if (hi <= lo) return {lo};
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step)
        ticks.push_back(t);
    return ticks;
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

} // namespace

void plot_summary(const std::string& summary_csv_path, const PlotOptions& options,
                  const std::string& out_path) {
    std::ifstream in(summary_csv_path);
    if (!in) throw std::invalid_argument("cannot open summary '" + summary_csv_path + "'");

    std::string header;
    if (!std::getline(in, header)) throw std::invalid_argument("empty summary file");
    const auto columns = split(header, ',');
    std::size_t metric_col = columns.size();
    std::size_t policy_col = columns.size(), load_col = columns.size();
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == options.metric) metric_col = i;
        if (columns[i] == "policy") policy_col = i;
        if (columns[i] == "load") load_col = i;
    }
    if (policy_col == columns.size() || load_col == columns.size())
        throw std::invalid_argument("summary is missing policy/load columns");
    if (metric_col == columns.size()) {
        std::string cols;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) cols += ", ";
            cols += columns[i];
        }
        throw std::invalid_argument("unknown metric '" + options.metric +
                                    "'; available columns: " + cols);
    }

    // policy -> load -> (sum, count) across seeds
    std::map<std::string, std::map<double, std::pair<double, int>>> acc;
    std::vector<std::string> policy_order;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != columns.size())
            throw std::invalid_argument("malformed summary row: " + line);
        const std::string& policy = fields[policy_col];
        const double load = std::stod(fields[load_col]);
        const double value = std::stod(fields[metric_col]);
        if (acc.find(policy) == acc.end()) policy_order.push_back(policy);
        auto& slot = acc[policy][load];
        slot.first += value;
        slot.second += 1;
    }
    if (policy_order.empty()) throw std::invalid_argument("summary has no data rows");

    std::vector<Series> series;
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (const auto& policy : policy_order) {
        Series s;
        s.policy = policy;
        for (const auto& [load, sum_count] : acc[policy]) {
            const double y = sum_count.first / sum_count.second;
            s.points.emplace_back(load, y);
            x_lo = std::min(x_lo, load);
            x_hi = std::max(x_hi, load);
            if (!options.log_y || y > 0.0) {
                y_lo = std::min(y_lo, y);
                y_hi = std::max(y_hi, y);
            }
        }
        series.push_back(std::move(s));
    }
    if (x_hi <= x_lo) {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    if (y_hi <= y_lo) {
        y_lo = y_lo > 0.0 && options.log_y ? y_lo / 2.0 : y_lo - 0.5;
        y_hi = y_hi + (options.log_y ? y_hi : 0.5);
    }

    const double margin_l = 70, margin_r = 160, margin_t = 40, margin_b = 50;
    const double plot_w = options.width - margin_l - margin_r;
    const double plot_h = options.height - margin_t - margin_b;

    const auto x_of = [&](double x) { return margin_l + (x - x_lo) / (x_hi - x_lo) * plot_w; };
    const auto y_of = [&](double y) {
        if (options.log_y) {
            const double ly = std::log10(std::max(y, 1e-12));
            const double lo = std::log10(std::max(y_lo, 1e-12));
            const double hi = std::log10(std::max(y_hi, 1e-12));
            return margin_t + plot_h - (ly - lo) / std::max(hi - lo, 1e-12) * plot_h;
        }
        return margin_t + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << options.width << "\" height=\""
        << options.height << "\" viewBox=\"0 0 " << options.width << ' ' << options.height
        << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!options.title.empty())
        svg << "<text x=\"" << margin_l << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\""
            << " font-weight=\"bold\">" << options.title << "</text>\n";

    // axes
    svg << "<line x1=\"" << margin_l << "\" y1=\"" << margin_t + plot_h << "\" x2=\""
        << margin_l + plot_w << "\" y2=\"" << margin_t + plot_h << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << margin_l << "\" y1=\"" << margin_t << "\" x2=\"" << margin_l
        << "\" y2=\"" << margin_t + plot_h << "\" stroke=\"black\"/>\n";

    for (double t : linear_ticks(x_lo, x_hi)) {
        const double px = x_of(t);
        svg << "<line x1=\"" << px << "\" y1=\"" << margin_t + plot_h << "\" x2=\"" << px
            << "\" y2=\"" << margin_t + plot_h + 5 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << px << "\" y=\"" << margin_t + plot_h + 20
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << fmt(t)
            << "</text>\n";
    }
    if (options.log_y) {
        const int e_lo = static_cast<int>(std::floor(std::log10(std::max(y_lo, 1e-12))));
        const int e_hi = static_cast<int>(std::ceil(std::log10(std::max(y_hi, 1e-12))));
        for (int e = e_lo; e <= e_hi; ++e) {
            const double v = std::pow(10.0, e);
            const double py = y_of(v);
            if (py < margin_t - 1 || py > margin_t + plot_h + 1) continue;
            svg << "<line x1=\"" << margin_l - 5 << "\" y1=\"" << py << "\" x2=\"" << margin_l
                << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
            svg << "<text x=\"" << margin_l - 8 << "\" y=\"" << py + 4
                << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fmt(v)
                << "</text>\n";
        }
    } else {
        for (double t : linear_ticks(y_lo, y_hi)) {
            const double py = y_of(t);
            svg << "<line x1=\"" << margin_l - 5 << "\" y1=\"" << py << "\" x2=\"" << margin_l
                << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
            svg << "<text x=\"" << margin_l - 8 << "\" y=\"" << py + 4
                << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fmt(t)
                << "</text>\n";
        }
    }
    svg << "<text x=\"" << margin_l + plot_w / 2 << "\" y=\"" << options.height - 12
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">load</text>\n";
    svg << "<text x=\"18\" y=\"" << margin_t + plot_h / 2
        << "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
        << margin_t + plot_h / 2 << ")\">" << options.metric << (options.log_y ? " (log)" : "")
        << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
        const Series& s = series[i];
        if (s.points.size() > 1) {
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
            for (const auto& [x, y] : s.points) svg << fmt(x_of(x)) << ',' << fmt(y_of(y)) << ' ';
            svg << "\"/>\n";
        }
        for (const auto& [x, y] : s.points)
            svg << "<circle cx=\"" << fmt(x_of(x)) << "\" cy=\"" << fmt(y_of(y))
                << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        const double ly = margin_t + 16 + 18 * static_cast<double>(i);
        svg << "<line x1=\"" << margin_l + plot_w + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
            << margin_l + plot_w + 34 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << margin_l + plot_w + 40 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.policy << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    out << svg.str();
}

} // namespace faassim
