#include "paracalc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace paracalc {

namespace {

constexpr double kWidth = 640.0, kPanelHeight = 360.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
        if (c == '<') o += "&lt;";
        else if (c == '>') o += "&gt;";
        else if (c == '&') o += "&amp;";
        else o += c;
    }
    return o;
}

struct Range {
    double lo = 0.0, hi = 1.0;
};

Range range_of(const std::vector<Series>& series, bool use_x) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : series)
        for (double v : use_x ? s.x : s.y)
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    if (!std::isfinite(lo)) return {};
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.04 * (hi - lo);
    return {lo - pad, hi + pad};
}

void draw_panel(std::ostringstream& out, const Panel& p, double y0) {
    const double w = kWidth - kLeft - kRight, h = kPanelHeight - kTop - kBottom;
    const Range rx = range_of(p.series, true), ry = range_of(p.series, false);
    auto X = [&](double v) { return kLeft + (v - rx.lo) / (rx.hi - rx.lo) * w; };
    auto Y = [&](double v) { return y0 + kTop + h - (v - ry.lo) / (ry.hi - ry.lo) * h; };

    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << y0 + 22 << "\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(p.title) << "</text>\n";
    out << "<rect x=\"" << kLeft << "\" y=\"" << y0 + kTop << "\" width=\"" << w << "\" height=\"" << h
        << "\" fill=\"none\" stroke=\"#000\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double fx = rx.lo + (rx.hi - rx.lo) * i / 4.0, fy = ry.lo + (ry.hi - ry.lo) * i / 4.0;
        out << "<line x1=\"" << X(fx) << "\" y1=\"" << y0 + kTop + h << "\" x2=\"" << X(fx) << "\" y2=\""
            << y0 + kTop + h + 5 << "\" stroke=\"#000\"/>\n";
        out << "<text x=\"" << X(fx) << "\" y=\"" << y0 + kTop + h + 18 << "\" text-anchor=\"middle\" font-size=\"10\">"
            << fmt(fx) << "</text>\n";
        out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << Y(fy) << "\" x2=\"" << kLeft << "\" y2=\"" << Y(fy)
            << "\" stroke=\"#000\"/>\n";
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << Y(fy) + 3 << "\" text-anchor=\"end\" font-size=\"10\">"
            << fmt(fy) << "</text>\n";
    }
    out << "<text x=\"" << kLeft + w / 2 << "\" y=\"" << y0 + kPanelHeight - 12
        << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(p.xlabel) << "</text>\n";
    out << "<text x=\"16\" y=\"" << y0 + kTop + h / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
        << y0 + kTop + h / 2 << ")\">" << escape(p.ylabel) << "</text>\n";

    std::size_t color = 0;
    double legend_y = y0 + kTop + 14;
    for (const auto& s : p.series) {
        std::string d;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            d += (d.empty() ? "M" : " L") + fmt(X(s.x[i])) + " " + fmt(Y(s.y[i]));
        }
        const char* c = kPalette[color++ % 8];
        if (d.empty()) continue;
        out << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\""
            << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
        out << "<text x=\"" << kLeft + w - 6 << "\" y=\"" << legend_y << "\" text-anchor=\"end\" font-size=\"10\" fill=\""
            << c << "\">" << escape(s.label) << "</text>\n";
        legend_y += 12;
    }
    double note_y = y0 + kTop + 14;
    for (const auto& n : p.notes) {
        out << "<text x=\"" << kLeft + 6 << "\" y=\"" << note_y << "\" font-size=\"11\">" << escape(n) << "</text>\n";
        note_y += 13;
    }
}

void fit(const std::vector<double>& x, const std::vector<double>& y, double& slope, double& intercept) {
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    slope = den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
    intercept = n > 0 ? (sy - slope * sx) / n : 0.0;
}

void require_header(const CsvTable& csv, const std::vector<std::string>& want, const std::string& kind) {
    if (csv.header != want) {
        std::string w;
        for (const auto& h : want) w += (w.empty() ? "" : ",") + h;
        throw std::invalid_argument("csv header does not match kind '" + kind + "': expected " + w);
    }
}

}  // namespace

std::string render_svg(const std::vector<Panel>& panels) {
    std::ostringstream out;
    const double height = kPanelHeight * double(std::max<std::size_t>(panels.size(), 1));
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << kWidth << ' ' << height << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    for (std::size_t i = 0; i < panels.size(); ++i) draw_panel(out, panels[i], kPanelHeight * double(i));
    out << "</svg>\n";
    return out.str();
}

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::invalid_argument("csv has no column '" + name + "'");
    return std::size_t(it - header.begin());
}

double CsvTable::number(std::size_t row, std::size_t col) const {
    const std::string& s = rows.at(row).at(col);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw std::invalid_argument("csv row " + std::to_string(row + 2) + ": '" + s + "' is not a number");
    return v;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read " + path);
    CsvTable t;
    std::string line;
    auto split = [](const std::string& l) {
        std::vector<std::string> f;
        std::stringstream ss(l);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (!l.empty() && l.back() == ',') f.emplace_back();
        return f;
    };
    if (!std::getline(in, line)) throw std::invalid_argument(path + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    t.header = split(line);
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split(line);
        if (f.size() != t.header.size())
            throw std::invalid_argument(path + ": row " + std::to_string(t.rows.size() + 2) + " has " +
                                        std::to_string(f.size()) + " fields, header has " +
                                        std::to_string(t.header.size()));
        t.rows.push_back(std::move(f));
    }
    return t;
}

std::vector<Panel> plot_panels(const CsvTable& csv, const std::string& kind) {
    if (kind == "energy") {
        require_header(csv, {"t", "s_t", "E", "E_log", "norm_Hs_t", "margin"}, kind);
        Panel p{"Energy", "t", "log10 energy", {}, {}};
        Series e{"E", {}, {}, false}, el{"E_log", {}, {}, true};
        for (std::size_t r = 0; r < csv.rows.size(); ++r) {
            const double t = csv.number(r, 0);
            e.x.push_back(t);
            e.y.push_back(std::log10(csv.number(r, 2)));
            el.x.push_back(t);
            el.y.push_back(std::log10(csv.number(r, 3)));
        }
        if (!e.x.empty()) {
            double slope, icpt;
            fit(e.x, e.y, slope, icpt);
            p.notes.push_back("fitted slope of log10 E: " + fmt(slope));
        }
        p.series = {e, el};
        return {p};
    }
    if (kind == "loss") {
        require_header(csv, {"j", "t", "g", "rate", "corr"}, kind);
        Panel curves{"Growth per packet", "t", "log2 norm ratio", {}, {}};
        std::map<int, Series> by_j;
        std::map<int, double> rate;
        for (std::size_t r = 0; r < csv.rows.size(); ++r) {
            const int j = int(csv.number(r, 0));
            auto& s = by_j[j];
            s.label = "j=" + std::to_string(j);
            s.x.push_back(csv.number(r, 1));
            s.y.push_back(csv.number(r, 2));
            rate[j] = csv.number(r, 3);
        }
        for (auto& [j, s] : by_j) curves.series.push_back(s);
        Panel rates{"Growth rate against frequency", "j", "rate", {}, {}};
        if (!rate.empty()) {
            Series pts{"rate", {}, {}, false};
            for (const auto& [j, r] : rate) {
                pts.x.push_back(j);
                pts.y.push_back(r);
            }
            const std::size_t top = pts.x.size() / 2;
            const std::vector<double> tx(pts.x.begin() + long(top), pts.x.end()), ty(pts.y.begin() + long(top), pts.y.end());
            double slope, icpt;
            fit(tx, ty, slope, icpt);
            Series line{"beta_hat fit", {tx.front(), tx.back()}, {icpt + slope * tx.front(), icpt + slope * tx.back()}, true};
            rates.series = {pts, line};
            rates.notes.push_back("beta_hat = " + fmt(slope));
        }
        return {curves, rates};
    }
    if (kind == "order") {
        require_header(csv, {"probe", "s", "alpha", "j", "log2_ratio"}, kind);
        Panel p{"Operator order probes", "j", "log2 ratio", {}, {}};
        std::map<std::string, Series> by_key;
        std::vector<std::string> order;
        for (std::size_t r = 0; r < csv.rows.size(); ++r) {
            const std::string key = csv.rows[r][0] + " s=" + csv.rows[r][1] + " a=" + csv.rows[r][2];
            if (!by_key.count(key)) order.push_back(key);
            auto& s = by_key[key];
            s.label = key;
            s.x.push_back(csv.number(r, 3));
            s.y.push_back(csv.number(r, 4));
        }
        for (const auto& k : order) {
            const Series& s = by_key[k];
            double slope, icpt;
            fit(s.x, s.y, slope, icpt);
            p.series.push_back(s);
            p.notes.push_back(k + ": slope " + fmt(slope));
        }
        return {p};
    }
    throw std::invalid_argument("unknown plot kind '" + kind + "' (energy, loss, order)");
}

std::string plot_csv(const std::string& csv_path, const std::string& kind) {
    return render_svg(plot_panels(read_csv(csv_path), kind));
}

}  // namespace paracalc
