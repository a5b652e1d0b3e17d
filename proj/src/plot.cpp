#include "xsl/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <tuple>

#include "xsl/error.hpp"
#include "xsl/learner.hpp"

namespace xsl {

namespace {

constexpr double kPanelWidth = 420;
constexpr double kPanelHeight = 300;
constexpr double kMarginLeft = 56;
constexpr double kMarginRight = 130;
constexpr double kMarginTop = 34;
constexpr double kMarginBottom = 44;
constexpr double kTitleHeight = 36;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
                                "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string escape(const std::string& s) {
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

// Upper bound for the y axis: 1 for probability-like data, else a round number.
double y_top(const Panel& p) {
    double hi = 0.0;
    for (const auto& s : p.series) {
        for (const auto& [x, y] : s.points) hi = std::max(hi, y);
    }
    if (hi <= 1.0) return 1.0;
    const double mag = std::pow(10.0, std::floor(std::log10(hi)));
    return std::ceil(hi / mag) * mag;
}

void render_panel(std::ostringstream& out, const Panel& p, double ox, double oy) {
    const double pw = kPanelWidth - kMarginLeft - kMarginRight;
    const double ph = kPanelHeight - kMarginTop - kMarginBottom;
    const double left = ox + kMarginLeft;
    const double top = oy + kMarginTop;
    const bool bars = !p.categories.empty();

    double x_lo = 0.0, x_hi = 1.0;
    if (bars) {
        x_hi = static_cast<double>(p.categories.size());
    } else {
        bool first = true;
        for (const auto& s : p.series) {
            for (const auto& [x, y] : s.points) {
                if (first) x_lo = x_hi = x;
                x_lo = std::min(x_lo, x);
                x_hi = std::max(x_hi, x);
                first = false;
            }
        }
        if (x_hi <= x_lo) x_hi = x_lo + 1.0;
    }
    const double y_hi = y_top(p);
    auto sx = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };
    auto sy = [&](double y) { return top + ph - y / y_hi * ph; };

    out << "<g>\n";
    out << "<text x=\"" << num(ox + kPanelWidth / 2) << "\" y=\"" << num(oy + 20)
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(p.title) << "</text>\n";
    out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\""
        << num(ph) << "\" fill=\"none\" stroke=\"#444\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double y = y_hi * i / 4.0;
        out << "<line x1=\"" << num(left - 4) << "\" y1=\"" << num(sy(y)) << "\" x2=\"" << num(left + pw)
            << "\" y2=\"" << num(sy(y)) << "\" stroke=\"#ddd\"/>\n";
        out << "<text x=\"" << num(left - 6) << "\" y=\"" << num(sy(y) + 4)
            << "\" text-anchor=\"end\" font-size=\"10\">" << tick(y) << "</text>\n";
    }
    if (bars) {
        for (std::size_t c = 0; c < p.categories.size(); ++c) {
            out << "<text x=\"" << num(sx(c + 0.5)) << "\" y=\"" << num(top + ph + 16)
                << "\" text-anchor=\"middle\" font-size=\"10\">" << escape(p.categories[c]) << "</text>\n";
        }
    } else {
        for (int i = 0; i <= 4; ++i) {
            const double x = x_lo + (x_hi - x_lo) * i / 4.0;
            out << "<text x=\"" << num(sx(x)) << "\" y=\"" << num(top + ph + 16)
                << "\" text-anchor=\"middle\" font-size=\"10\">" << tick(x) << "</text>\n";
        }
    }
    out << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(top + ph + 34)
        << "\" text-anchor=\"middle\" font-size=\"11\">" << escape(p.x_label) << "</text>\n";
    out << "<text x=\"" << num(ox + 14) << "\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" font-size=\"11\""
        << " transform=\"rotate(-90 " << num(ox + 14) << ' ' << num(top + ph / 2) << ")\">" << escape(p.y_label)
        << "</text>\n";

    const std::size_t n = p.series.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = p.series[i];
        const char* color = kPalette[i % std::size(kPalette)];
        if (bars) {
            const double slot = pw / static_cast<double>(p.categories.size());
            const double width = slot * 0.8 / static_cast<double>(n);
            for (const auto& [x, y] : s.points) {
                const double bx = left + x * slot + slot * 0.1 + width * static_cast<double>(i);
                out << "<rect x=\"" << num(bx) << "\" y=\"" << num(sy(y)) << "\" width=\"" << num(width)
                    << "\" height=\"" << num(top + ph - sy(y)) << "\" fill=\"" << color << "\"/>\n";
            }
        } else if (!s.points.empty()) {
            out << "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" << color << "\" points=\"";
            for (std::size_t k = 0; k < s.points.size(); ++k) {
                if (k) out << ' ';
                out << num(sx(s.points[k].first)) << ',' << num(sy(s.points[k].second));
            }
            out << "\"/>\n";
        }
        const double ly = top + 10 + 16 * static_cast<double>(i);
        out << "<rect x=\"" << num(left + pw + 10) << "\" y=\"" << num(ly - 8) << "\" width=\"10\" height=\"10\" fill=\""
            << color << "\"/>\n";
        out << "<text x=\"" << num(left + pw + 24) << "\" y=\"" << num(ly + 1) << "\" font-size=\"10\">"
            << escape(s.name) << "</text>\n";
    }
    out << "</g>\n";
}

// Ordered accumulation of means keyed by (panel, series, x).
struct Accumulator {
    std::vector<std::string> panels;
    std::map<std::string, std::vector<std::string>> series;
    std::map<std::string, std::vector<std::string>> categories;
    std::map<std::tuple<std::string, std::string, double>, std::pair<double, std::size_t>> sums;

    static void note(std::vector<std::string>& order, const std::string& v) {
        if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
    }

    void add(const std::string& panel, const std::string& name, double x, double y) {
        note(panels, panel);
        note(series[panel], name);
        auto& [s, n] = sums[{panel, name, x}];
        s += y;
        ++n;
    }

    void add_bar(const std::string& panel, const std::string& name, const std::string& category, double y) {
        auto& cats = categories[panel];
        note(cats, category);
        const auto idx = static_cast<double>(std::find(cats.begin(), cats.end(), category) - cats.begin());
        add(panel, name, idx, y);
    }

    std::vector<Panel> build(const std::string& x_label, const std::string& y_label,
                             const std::string& panel_prefix) const {
        std::vector<Panel> out;
        for (const auto& pname : panels) {
            Panel p;
            p.title = panel_prefix + pname;
            p.x_label = x_label;
            p.y_label = y_label;
            if (auto it = categories.find(pname); it != categories.end()) p.categories = it->second;
            for (const auto& sname : series.at(pname)) {
                Series s;
                s.name = sname;
                for (auto it = sums.lower_bound({pname, sname, -1e300});
                     it != sums.end() && std::get<0>(it->first) == pname && std::get<1>(it->first) == sname;
                     ++it) {
                    s.points.emplace_back(std::get<2>(it->first),
                                          it->second.first / static_cast<double>(it->second.second));
                }
                p.series.push_back(std::move(s));
            }
            out.push_back(std::move(p));
        }
        return out;
    }
};

// Plot legends use the model notation rather than the file id.
std::string model_name(const std::string& id) {
    try {
        return ModelConfig::from_id(id, 0.01, 100).label();
    } catch (const Error&) {
        return id;
    }
}

}  // namespace

std::string render_svg(const Figure& figure) {
    const std::size_t cols = std::max<std::size_t>(1, std::min(figure.columns, std::max<std::size_t>(1, figure.panels.size())));
    const std::size_t rows = (figure.panels.size() + cols - 1) / cols;
    const double width = kPanelWidth * static_cast<double>(cols);
    const double height = kTitleHeight + kPanelHeight * static_cast<double>(std::max<std::size_t>(rows, 1));

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height) << "\" font-family=\"sans-serif\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << escape(figure.title) << "</text>\n";
    for (std::size_t i = 0; i < figure.panels.size(); ++i) {
        const double ox = kPanelWidth * static_cast<double>(i % cols);
        const double oy = kTitleHeight + kPanelHeight * static_cast<double>(i / cols);
        render_panel(out, figure.panels[i], ox, oy);
    }
    out << "</svg>\n";
    return out.str();
}

Figure figure_from_table(const Table& t, const std::string& title) {
    Figure fig;
    Accumulator acc;
    std::string fallback;
    if (t.has_column("meaning")) {
        for (std::size_t i = 0; i < t.size(); ++i) {
            acc.add(model_name(t.at(i, "model")), t.at(i, "band") + " " + t.at(i, "meaning"), t.number(i, "trial"),
                    t.number(i, "probability"));
        }
        fig.panels = acc.build("trial", "meaning probability", "");
        fig.columns = 2;
        fallback = "Pseudo-homonyms: first and second meaning";
    } else if (t.has_column("label")) {
        for (std::size_t i = 0; i < t.size(); ++i) {
            acc.add(model_name(t.at(i, "model")), t.at(i, "label") + " label", t.number(i, "trial"), t.number(i, "probability"));
        }
        fig.panels = acc.build("trial", "meaning probability", "");
        fig.columns = 2;
        fallback = "Pseudo-synonyms: first and second label";
    } else if (t.has_column("step")) {
        for (std::size_t i = 0; i < t.size(); ++i) {
            acc.add(t.at(i, "corpus"), model_name(t.at(i, "model")), t.number(i, "step"), t.number(i, "score"));
        }
        fig.panels = acc.build("input pairs", "average comprehension", "corpus: ");
        fig.columns = 3;
        fallback = "Average comprehension over input pairs";
    } else if (t.has_column("relative_drop")) {
        for (std::size_t i = 0; i < t.size(); ++i) {
            acc.add_bar("final score", model_name(t.at(i, "model")), t.at(i, "corpus"), t.number(i, "final_score"));
        }
        fig.panels = acc.build("corpus", "average comprehension", "");
        fallback = "Final average comprehension by corpus";
    } else if (t.has_column("band")) {
        for (std::size_t i = 0; i < t.size(); ++i) {
            acc.add_bar(t.at(i, "corpus"), model_name(t.at(i, "model")), t.at(i, "band"), t.number(i, "score"));
        }
        fig.panels = acc.build("frequency band", "average comprehension", "corpus: ");
        fig.columns = 3;
        fallback = "Average comprehension by word frequency";
    } else {
        throw Error("table columns do not match any known experiment");
    }
    fig.title = title.empty() ? fallback : title;
    return fig;
}

}  // namespace xsl
