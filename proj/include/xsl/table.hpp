#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace xsl {

// A small column-typed table used for every experiment artifact.
class Table {
public:
    struct Column {
        std::string name;
        bool numeric = false;
        friend bool operator==(const Column&, const Column&) = default;
    };

    Table() = default;
    explicit Table(std::vector<Column> columns) : columns_(std::move(columns)) {}

    const std::vector<Column>& columns() const noexcept { return columns_; }
    const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.size(); }

    // Throws Error if the width does not match or a cell is empty.
    void add_row(std::vector<std::string> cells);

    // Index of a column; throws Error when missing.
    std::size_t column(std::string_view name) const;
    bool has_column(std::string_view name) const;
    const std::string& at(std::size_t row, std::string_view name) const;
    double number(std::size_t row, std::string_view name) const;

    friend bool operator==(const Table&, const Table&) = default;

private:
    std::vector<Column> columns_;
    std::vector<std::vector<std::string>> rows_;
};

// Shortest text that reads back to the same double, e.g. "0.1", "1e-05".
std::string format_number(double v);
std::string format_number(std::size_t v);

void write_csv(std::ostream& out, const Table& table);
// One JSON object per row; numeric columns are written as JSON numbers.
void write_jsonl(std::ostream& out, const Table& table);
// Columns are numeric when every cell parses as a number. Throws ParseError.
Table read_csv(std::istream& in);

}  // namespace xsl
