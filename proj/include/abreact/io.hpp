#pragma once

// Flat-file outputs: CSV tables (12 significant digits, deterministic bytes)
// and a self-contained SVG population plot with +/- sigma bands and the CPT
// reference level.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "abreact/ensemble.hpp"
#include "abreact/integrator.hpp"

namespace abreact {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void write_csv(const Table& table, std::ostream& out) {
    for (std::size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "," : "") << table.header[i];
    out << "\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_value(row[i]);
        out << "\n";
    }
}

inline void emit_csv(const Table& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("emit_csv: cannot open '" + path + "' for writing");
    write_csv(table, out);
    if (!out) throw IoError("emit_csv: write failed for '" + path + "'");
}

inline const std::array<const char*, species::count> kSpeciesNames = {"a", "b", "b2", "ab", "t"};

inline Table to_table(const EnsembleStats& stats) {
    Table t;
    t.header.push_back("time");
    for (const char* s : kSpeciesNames) t.header.push_back(std::string("mean_") + s);
    for (const char* s : kSpeciesNames) t.header.push_back(std::string("std_") + s);
    t.header.push_back("corr_ab_b");
    for (std::size_t p = 0; p < stats.times.size(); ++p) {
        std::vector<double> row;
        row.reserve(t.header.size());
        row.push_back(stats.times[p]);
        for (int i = 0; i < species::count; ++i) row.push_back(stats.mean[i][p]);
        for (int i = 0; i < species::count; ++i) row.push_back(stats.stddev[i][p]);
        row.push_back(stats.corr_ab_b[p]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table to_table(const TrajectoryResult& traj) {
    Table t;
    t.header.push_back("time");
    for (const char* s : kSpeciesNames) t.header.push_back(std::string("n_") + s);
    t.header.push_back("q_a");
    t.header.push_back("q_b");
    for (std::size_t p = 0; p < traj.times.size(); ++p) {
        std::vector<double> row;
        row.reserve(t.header.size());
        row.push_back(traj.times[p]);
        for (int i = 0; i < species::count; ++i) row.push_back(traj.populations[i][p]);
        row.push_back(traj.q_a[p]);
        row.push_back(traj.q_b[p]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace detail

// Mean populations with shaded +/- standard-deviation bands per species and
// a dashed horizontal line at the ideal CPT product level.
inline void write_plot(const EnsembleStats& stats, double cpt_reference, std::ostream& out) {
    if (stats.times.empty()) throw std::invalid_argument("write_plot: empty stats");

    constexpr double width = 760.0, height = 480.0;
    constexpr double ml = 70.0, mr = 160.0, mt = 30.0, mb = 55.0;
    const double pw = width - ml - mr, ph = height - mt - mb;

    const double t0 = stats.times.front(), t1 = stats.times.back();
    double y_max = cpt_reference;
    for (int i = 0; i < species::count; ++i)
        for (std::size_t p = 0; p < stats.times.size(); ++p)
            y_max = std::max(y_max, stats.mean[i][p] + stats.stddev[i][p]);
    if (!(y_max > 0.0)) y_max = 1.0;
    y_max *= 1.05;

    const auto sx = [&](double t) { return ml + (t - t0) / (t1 - t0) * pw; };
    const auto sy = [&](double v) { return mt + ph - v / y_max * ph; };

    static constexpr std::array<const char*, species::count> colors = {
        "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};
    static constexpr std::array<const char*, species::count> labels = {
        "N_a", "N_b", "N_b2", "N_ab", "N_t"};

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
        << mt + ph << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
        << "\" stroke=\"black\"/>\n";
    constexpr int n_ticks = 5;
    for (int k = 0; k <= n_ticks; ++k) {
        const double tv = t0 + (t1 - t0) * k / n_ticks;
        const double vv = y_max * k / n_ticks;
        out << "<line x1=\"" << detail::svg_num(sx(tv)) << "\" y1=\"" << mt + ph << "\" x2=\""
            << detail::svg_num(sx(tv)) << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << detail::svg_num(sx(tv)) << "\" y=\"" << mt + ph + 20
            << "\" font-size=\"12\" text-anchor=\"middle\">" << format_value(tv) << "</text>\n"
            << "<line x1=\"" << ml - 5 << "\" y1=\"" << detail::svg_num(sy(vv)) << "\" x2=\"" << ml
            << "\" y2=\"" << detail::svg_num(sy(vv)) << "\" stroke=\"black\"/>\n"
            << "<text x=\"" << ml - 8 << "\" y=\"" << detail::svg_num(sy(vv) + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">" << format_value(vv) << "</text>\n";
    }
    out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
        << "\" font-size=\"14\" text-anchor=\"middle\">time (1/lambda)</text>\n"
        << "<text x=\"18\" y=\"" << mt + ph / 2
        << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << mt + ph / 2
        << ")\">population fraction</text>\n";

    // sigma bands, then mean curves on top
    for (int i = 0; i < species::count; ++i) {
        out << "<path d=\"M";
        for (std::size_t p = 0; p < stats.times.size(); ++p)
            out << (p ? " L" : "") << detail::svg_num(sx(stats.times[p])) << " "
                << detail::svg_num(sy(stats.mean[i][p] + stats.stddev[i][p]));
        for (std::size_t p = stats.times.size(); p-- > 0;)
            out << " L" << detail::svg_num(sx(stats.times[p])) << " "
                << detail::svg_num(sy(std::max(0.0, stats.mean[i][p] - stats.stddev[i][p])));
        out << " Z\" fill=\"" << colors[i] << "\" fill-opacity=\"0.22\" stroke=\"none\"/>\n";
    }
    for (int i = 0; i < species::count; ++i) {
        out << "<polyline fill=\"none\" stroke=\"" << colors[i] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t p = 0; p < stats.times.size(); ++p)
            out << (p ? " " : "") << detail::svg_num(sx(stats.times[p])) << ","
                << detail::svg_num(sy(stats.mean[i][p]));
        out << "\"/>\n";
    }

    // CPT reference level
    out << "<line x1=\"" << ml << "\" y1=\"" << detail::svg_num(sy(cpt_reference)) << "\" x2=\""
        << ml + pw << "\" y2=\"" << detail::svg_num(sy(cpt_reference))
        << "\" stroke=\"black\" stroke-dasharray=\"6 4\"/>\n"
        << "<text x=\"" << ml + pw - 4 << "\" y=\"" << detail::svg_num(sy(cpt_reference) - 6)
        << "\" font-size=\"12\" text-anchor=\"end\">CPT</text>\n";

    // legend
    for (int i = 0; i < species::count; ++i) {
        const double ly = mt + 18.0 + 22.0 * i;
        out << "<line x1=\"" << ml + pw + 16 << "\" y1=\"" << ly << "\" x2=\"" << ml + pw + 44
            << "\" y2=\"" << ly << "\" stroke=\"" << colors[i] << "\" stroke-width=\"2\"/>\n"
            << "<text x=\"" << ml + pw + 50 << "\" y=\"" << ly + 4 << "\" font-size=\"13\">"
            << labels[i] << "</text>\n";
    }
    out << "</svg>\n";
}

inline void emit_plot(const EnsembleStats& stats, double cpt_reference, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("emit_plot: cannot open '" + path + "' for writing");
    write_plot(stats, cpt_reference, out);
    if (!out) throw IoError("emit_plot: write failed for '" + path + "'");
}

}  // namespace abreact
