#include "xsl/table.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "xsl/error.hpp"

namespace xsl {

namespace {

bool needs_quotes(const std::string& s) {
    return s.find_first_of(",\"\n\r") != std::string::npos;
}

void write_cell(std::ostream& out, const std::string& s) {
    if (!needs_quotes(s)) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

bool parse_double(const std::string& s, double& v) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, v);
    return res.ec == std::errc{} && res.ptr == last;
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw ParseError("unterminated quote", line_no);
    cells.push_back(std::move(cur));
    return cells;
}

}  // namespace

void Table::add_row(std::vector<std::string> cells) {
    if (cells.size() != columns_.size()) {
        throw Error("row has " + std::to_string(cells.size()) + " cells, table has " +
                    std::to_string(columns_.size()) + " columns");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].empty()) throw Error("empty cell in column '" + columns_[i].name + "'");
    }
    rows_.push_back(std::move(cells));
}

std::size_t Table::column(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return i;
    }
    throw Error("no column '" + std::string(name) + "'");
}

bool Table::has_column(std::string_view name) const {
    for (const auto& c : columns_) {
        if (c.name == name) return true;
    }
    return false;
}

const std::string& Table::at(std::size_t row, std::string_view name) const { return rows_.at(row)[column(name)]; }

double Table::number(std::size_t row, std::string_view name) const {
    double v = 0.0;
    const auto& s = at(row, name);
    if (!parse_double(s, v)) throw Error("cell '" + s + "' in column '" + std::string(name) + "' is not a number");
    return v;
}

std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string format_number(std::size_t v) { return std::to_string(v); }

void write_csv(std::ostream& out, const Table& table) {
    const auto& cols = table.columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out << ',';
        write_cell(out, cols[i].name);
    }
    out << '\n';
    for (const auto& row : table.rows()) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            write_cell(out, row[i]);
        }
        out << '\n';
    }
}

void write_jsonl(std::ostream& out, const Table& table) {
    const auto& cols = table.columns();
    for (const auto& row : table.rows()) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            double v = 0.0;
            if (cols[i].numeric && parse_double(row[i], v)) {
                obj[cols[i].name] = v;
            } else {
                obj[cols[i].name] = row[i];
            }
        }
        out << obj.dump() << '\n';
    }
}

Table read_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty CSV input", 1);
    ++line_no;
    auto header = split_csv_line(line, line_no);
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = split_csv_line(line, line_no);
        if (cells.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " cells, got " +
                                 std::to_string(cells.size()),
                             line_no);
        }
        rows.push_back(std::move(cells));
    }
    std::vector<Table::Column> cols;
    for (std::size_t i = 0; i < header.size(); ++i) {
        bool numeric = !rows.empty();
        double v = 0.0;
        for (const auto& r : rows) {
            if (!parse_double(r[i], v)) {
                numeric = false;
                break;
            }
        }
        cols.push_back({header[i], numeric});
    }
    Table t(std::move(cols));
    std::size_t row_line = 2;
    for (auto& r : rows) {
        try {
            t.add_row(std::move(r));
        } catch (const Error& e) {
            throw ParseError(e.what(), row_line);
        }
        ++row_line;
    }
    return t;
}

}  // namespace xsl
