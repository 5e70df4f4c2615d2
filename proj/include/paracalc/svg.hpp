#pragma once

#include <string>
#include <vector>

namespace paracalc {

struct Series {
    std::string label;
    std::vector<double> x, y;
    bool dashed = false;
};

struct Panel {
    std::string title, xlabel, ylabel;
    std::vector<Series> series;
    std::vector<std::string> notes;  // annotation lines, top left
};

// Self-contained SVG, panels stacked vertically. Each non-empty series is exactly one <path>;
// an empty panel still gets its axes.
std::string render_svg(const std::vector<Panel>& panels);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const;  // throws std::invalid_argument
    double number(std::size_t row, std::size_t col) const;
};

CsvTable read_csv(const std::string& path);

// kind: energy (t,s_t,E,E_log,norm_Hs_t,margin), loss (j,t,g,rate,corr), order (probe,s,alpha,j,log2_ratio).
// Throws std::invalid_argument when the header does not match the kind.
std::vector<Panel> plot_panels(const CsvTable& csv, const std::string& kind);
std::string plot_csv(const std::string& csv_path, const std::string& kind);

}  // namespace paracalc
