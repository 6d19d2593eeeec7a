#pragma once

// Static SVG figures from the CSV tables written by write_analysis().

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lamarck/analysis/metrics.hpp"

namespace lamarck {

using CsvRow = std::map<std::string, std::string>;

/// Minimal reader for the unquoted CSV files this library writes.
inline std::vector<CsvRow> read_csv(const std::filesystem::path& p) {
    std::ifstream f(p);
    if (!f) return {};
    std::vector<CsvRow> rows;
    std::string line;
    std::vector<std::string> header;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(cell);
        return out;
    };
    if (!std::getline(f, line)) return {};
    header = split(line);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        CsvRow row;
        for (std::size_t i = 0; i < header.size() && i < cells.size(); ++i) row[header[i]] = cells[i];
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace svg {

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    return colors;
}

inline std::string num(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> lo;  // optional band
    std::vector<double> hi;
    bool dashed = false;
    bool points_only = false;
    int color = 0;
};

struct Arrow {
    std::string label;
    double x = 0.0;
    double y = 0.0;
};

struct Chart {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<Series> series;
    std::vector<Arrow> arrows;  // drawn from the origin
};

class Frame {
public:
    Frame(double x0, double x1, double y0, double y1) : x0_(x0), x1_(x1), y0_(y0), y1_(y1) {
        if (x1_ <= x0_) x1_ = x0_ + 1.0;
        if (y1_ <= y0_) {
            y0_ -= 0.5;
            y1_ += 0.5;
        }
    }
    double px(double x) const { return kLeft + (x - x0_) / (x1_ - x0_) * kWidth; }
    double py(double y) const { return kTop + (1.0 - (y - y0_) / (y1_ - y0_)) * kHeight; }
    double x0() const { return x0_; }
    double x1() const { return x1_; }
    double y0() const { return y0_; }
    double y1() const { return y1_; }

    static constexpr double kLeft = 70, kTop = 40, kWidth = 520, kHeight = 320;

private:
    double x0_, x1_, y0_, y1_;
};

inline std::string render(const Chart& c) {
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    auto grow = [&](double x, double y) {
        if (!std::isfinite(x) || !std::isfinite(y)) return;
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    };
    for (const auto& s : c.series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            grow(s.x[i], s.y[i]);
            if (i < s.lo.size()) grow(s.x[i], s.lo[i]);
            if (i < s.hi.size()) grow(s.x[i], s.hi[i]);
        }
    }
    for (const auto& a : c.arrows) {
        grow(a.x, a.y);
        grow(0.0, 0.0);
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    const double pad = (y1 - y0) * 0.05;
    const Frame f(x0, x1, y0 - pad, y1 + pad);

    std::ostringstream o;
    o << R"(<svg xmlns="http://www.w3.org/2000/svg" width="760" height="420" font-family="sans-serif" font-size="12">)"
      << "\n<rect width=\"760\" height=\"420\" fill=\"white\"/>\n";
    o << "<text x=\"330\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(c.title) << "</text>\n";
    o << "<rect x=\"" << Frame::kLeft << "\" y=\"" << Frame::kTop << "\" width=\"" << Frame::kWidth << "\" height=\""
      << Frame::kHeight << "\" fill=\"none\" stroke=\"#444\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xv = f.x0() + (f.x1() - f.x0()) * t / 4.0;
        const double yv = f.y0() + (f.y1() - f.y0()) * t / 4.0;
        o << "<text x=\"" << num(f.px(xv)) << "\" y=\"" << Frame::kTop + Frame::kHeight + 16
          << "\" text-anchor=\"middle\">" << num(xv) << "</text>\n";
        o << "<text x=\"" << Frame::kLeft - 6 << "\" y=\"" << num(f.py(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
          << "</text>\n";
    }
    o << "<text x=\"" << Frame::kLeft + Frame::kWidth / 2 << "\" y=\"" << Frame::kTop + Frame::kHeight + 36
      << "\" text-anchor=\"middle\">" << escape(c.xlabel) << "</text>\n";
    o << "<text transform=\"translate(18," << Frame::kTop + Frame::kHeight / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << escape(c.ylabel) << "</text>\n";

    for (const auto& s : c.series) {
        const std::string& col = palette()[static_cast<std::size_t>(s.color) % palette().size()];
        if (!s.lo.empty() && s.lo.size() == s.x.size() && s.hi.size() == s.x.size()) {
            o << "<polygon fill=\"" << col << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) o << num(f.px(s.x[i])) << ',' << num(f.py(s.hi[i])) << ' ';
            for (std::size_t i = s.x.size(); i-- > 0;) o << num(f.px(s.x[i])) << ',' << num(f.py(s.lo[i])) << ' ';
            o << "\"/>\n";
        }
        if (s.points_only) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                o << "<circle cx=\"" << num(f.px(s.x[i])) << "\" cy=\"" << num(f.py(s.y[i])) << "\" r=\"2.5\" fill=\""
                  << col << "\" fill-opacity=\"0.6\"/>\n";
            }
        } else {
            o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\""
              << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) o << num(f.px(s.x[i])) << ',' << num(f.py(s.y[i])) << ' ';
            o << "\"/>\n";
        }
    }
    for (const auto& a : c.arrows) {
        o << "<line x1=\"" << num(f.px(0)) << "\" y1=\"" << num(f.py(0)) << "\" x2=\"" << num(f.px(a.x)) << "\" y2=\""
          << num(f.py(a.y)) << "\" stroke=\"#333\" stroke-width=\"1.5\"/>\n";
        o << "<text x=\"" << num(f.px(a.x)) << "\" y=\"" << num(f.py(a.y) - 4) << "\" fill=\"#333\">" << escape(a.label)
          << "</text>\n";
    }
    // Legend.
    double ly = Frame::kTop + 8;
    std::set<std::string> shown;
    for (const auto& s : c.series) {
        if (s.name.empty() || !shown.insert(s.name).second) continue;
        const std::string& col = palette()[static_cast<std::size_t>(s.color) % palette().size()];
        o << "<line x1=\"605\" y1=\"" << ly << "\" x2=\"625\" y2=\"" << ly << "\" stroke=\"" << col
          << "\" stroke-width=\"3\"" << (s.dashed ? " stroke-dasharray=\"4,3\"" : "") << "/>\n";
        o << "<text x=\"630\" y=\"" << ly + 4 << "\">" << escape(s.name) << "</text>\n";
        ly += 18;
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace svg

namespace detail {

inline double cell_number(const CsvRow& r, const std::string& key) {
    const auto it = r.find(key);
    if (it == r.end() || it->second == "NA") return NAN;
    return std::stod(it->second);
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    f << s;
}

}  // namespace detail

/// Draws every figure whose data is present in `analysis_dir`; returns the
/// written file paths. An empty metric set produces no files.
inline std::vector<std::filesystem::path> plot_analysis(const std::filesystem::path& analysis_dir,
                                                        const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::vector<fs::path> written;
    const auto aggregate = read_csv(analysis_dir / "aggregate.csv");
    const auto scatter = read_csv(analysis_dir / "scatter.csv");
    const auto descriptors = read_csv(analysis_dir / "descriptors.csv");
    const auto pca_rows = read_csv(analysis_dir / "pca.csv");
    if (aggregate.empty() && scatter.empty() && descriptors.empty()) return written;
    fs::create_directories(out_dir);
    auto save = [&](const std::string& name, const svg::Chart& c) {
        const fs::path p = out_dir / name;
        detail::write_text(p, svg::render(c));
        written.push_back(p);
    };

    std::set<std::string> setups, modes;
    for (const auto& r : aggregate) {
        setups.insert(r.at("setup"));
        modes.insert(r.at("mode"));
    }
    std::map<std::string, int> mode_color;
    for (const auto& m : modes) mode_color[m] = static_cast<int>(mode_color.size());

    auto series_for = [&](const std::string& setup, const std::string& mode, const std::string& metric,
                          const std::string& column, bool band) {
        svg::Series s;
        for (const auto& r : aggregate) {
            if (r.at("setup") != setup || r.at("mode") != mode || r.at("metric") != metric) continue;
            s.x.push_back(detail::cell_number(r, "generation"));
            s.y.push_back(detail::cell_number(r, column));
            if (band) {
                s.lo.push_back(detail::cell_number(r, "ci_low"));
                s.hi.push_back(detail::cell_number(r, "ci_high"));
            }
        }
        s.color = mode_color[mode];
        return s;
    };

    for (const auto& setup : setups) {
        svg::Chart fit{"Fitness, " + setup, "generation", "fitness", {}, {}};
        for (const auto& mode : modes) {
            auto mean_s = series_for(setup, mode, "fitness_mean", "mean", true);
            mean_s.name = mode + " mean";
            auto max_s = series_for(setup, mode, "fitness_max", "mean", false);
            max_s.name = mode + " max";
            max_s.dashed = true;
            if (!mean_s.x.empty()) fit.series.push_back(std::move(mean_s));
            if (!max_s.x.empty()) fit.series.push_back(std::move(max_s));
        }
        if (!fit.series.empty()) save("fitness_" + setup + ".svg", fit);

        for (const std::string metric :
             {"learning_delta", "controller_similarity", "tree_similarity", "descriptor_similarity"}) {
            svg::Chart c{metric + ", " + setup, "generation", metric, {}, {}};
            for (const auto& mode : modes) {
                auto s = series_for(setup, mode, metric, "mean", true);
                s.name = mode;
                if (!s.x.empty()) c.series.push_back(std::move(s));
            }
            if (!c.series.empty()) save(metric + "_" + setup + ".svg", c);
        }
    }

    // Transferability: one point per (setup, mode, change generation) with its CI.
    {
        svg::Chart c{"Transferability at environment changes", "generation", "mean(new) / mean(old)", {}, {}};
        for (const auto& setup : setups) {
            for (const auto& mode : modes) {
                auto s = series_for(setup, mode, "transferability", "mean", true);
                if (s.x.empty()) continue;
                s.name = setup + " " + mode;
                s.points_only = s.x.size() == 1;
                c.series.push_back(std::move(s));
            }
        }
        if (!c.series.empty()) save("transferability.svg", c);
    }

    if (!scatter.empty()) {
        svg::Chart c{"Fitness vs controller similarity", "controller similarity", "fitness", {}, {}};
        std::map<std::string, svg::Series> groups;
        for (const auto& r : scatter) {
            const std::string key = r.at("setup") + " " + r.at("mode");
            auto& s = groups[key];
            s.name = key;
            s.points_only = true;
            s.color = static_cast<int>(std::distance(groups.begin(), groups.find(key)));
            s.x.push_back(detail::cell_number(r, "controller_similarity"));
            s.y.push_back(detail::cell_number(r, "fitness"));
        }
        int k = 0;
        for (auto& [_, s] : groups) {
            s.color = k++;
            c.series.push_back(std::move(s));
        }
        save("correlation.svg", c);
    }

    if (!descriptors.empty() && !pca_rows.empty()) {
        svg::Chart c{"Morphological traits PCA", "Dim1", "Dim2", {}, {}};
        std::map<std::string, svg::Series> groups;
        for (const auto& r : descriptors) {
            const std::string key = r.at("setup") + " " + r.at("mode");
            auto& s = groups[key];
            s.name = key;
            s.points_only = true;
            s.x.push_back(detail::cell_number(r, "pc1"));
            s.y.push_back(detail::cell_number(r, "pc2"));
        }
        int k = 0;
        for (auto& [_, s] : groups) {
            s.color = k++;
            c.series.push_back(std::move(s));
        }
        double reach = 0.0;
        for (const auto& s : c.series) {
            for (std::size_t i = 0; i < s.x.size(); ++i) reach = std::max({reach, std::abs(s.x[i]), std::abs(s.y[i])});
        }
        if (reach == 0.0) reach = 1.0;
        for (const auto& r : pca_rows) {
            c.arrows.push_back({r.at("trait"), reach * detail::cell_number(r, "pc1_loading"),
                                reach * detail::cell_number(r, "pc2_loading")});
        }
        save("pca_biplot.svg", c);
    }
    return written;
}

}  // namespace lamarck
