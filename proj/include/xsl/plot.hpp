#pragma once

#include <string>
#include <utility>
#include <vector>

#include "xsl/table.hpp"

namespace xsl {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;  // (x, y); for bar panels x is the category index
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::vector<std::string> categories;  // non-empty for grouped bar panels
};

struct Figure {
    std::string title;
    std::vector<Panel> panels;
    std::size_t columns = 1;
};

// Standalone SVG document (no scripts, fonts or external references).
std::string render_svg(const Figure& figure);

// Builds the standard figure for an experiment table, recognized by its
// columns: learning curves ("step"), final scores ("relative_drop"), frequency
// bands ("band" without "trial"), homonym probes ("meaning") and synonym
// probes ("label"). Values are averaged over seeds and probe words. Throws
// Error for any other table. An empty title selects the standard one.
Figure figure_from_table(const Table& table, const std::string& title = {});

inline std::string render_table_svg(const Table& table, const std::string& title = {}) {
    return render_svg(figure_from_table(table, title));
}

}  // namespace xsl
