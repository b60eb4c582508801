#include "causal/tabular.hpp"

#include "causal/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#ifdef CAUSAL_USE_OPENMP
#include <omp.h>
#endif

namespace causal {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::optional<double> parse_number(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

void centered_columns(const DataTable& table, std::vector<std::vector<double>>& centered,
                      std::vector<double>& norms) {
    const std::size_t n = table.rows();
    const std::size_t c = table.cols();
    if (n < 2) throw DataError("correlation needs at least 2 rows, table '" + table.name() + "' has " + std::to_string(n));
    centered.assign(c, {});
    norms.assign(c, 0.0);
    for (std::size_t j = 0; j < c; ++j) {
        const auto col = table.column(j);
        double mean = 0.0;
        for (double v : col) mean += v;
        mean /= static_cast<double>(n);
        auto& out = centered[j];
        out.resize(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = col[i] - mean;
            ss += out[i] * out[i];
        }
        if (!(ss > 0.0)) throw DataError("column '" + table.columns()[j] + "' is constant (zero variance)");
        norms[j] = std::sqrt(ss);
    }
}

double pair_correlation(const std::vector<double>& a, const std::vector<double>& b, double na, double nb) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return std::clamp(s / (na * nb), -1.0, 1.0);
}

}  // namespace

DataTable::DataTable(std::string name, std::vector<std::string> columns,
                     std::vector<std::vector<double>> column_data)
    : name_(std::move(name)), columns_(std::move(columns)), data_(std::move(column_data)) {
    if (columns_.empty()) throw DataError("table '" + name_ + "' has no columns");
    if (data_.size() != columns_.size()) throw DataError("table '" + name_ + "': column count mismatch");
    std::set<std::string_view> seen;
    for (const auto& c : columns_) {
        if (c.empty()) throw DataError("table '" + name_ + "' has an empty column name");
        if (!seen.insert(c).second) throw DataError("table '" + name_ + "' has duplicate column name '" + c + "'");
    }
    rows_ = data_.front().size();
    if (rows_ == 0) throw DataError("table '" + name_ + "' is empty");
    for (std::size_t j = 0; j < data_.size(); ++j) {
        if (data_[j].size() != rows_) throw DataError("table '" + name_ + "': column '" + columns_[j] + "' has a different length");
        for (std::size_t i = 0; i < rows_; ++i) {
            if (!std::isfinite(data_[j][i])) {
                throw DataError("table '" + name_ + "': non-finite value at row " + std::to_string(i + 1) +
                                ", column " + columns_[j]);
            }
        }
    }
}

std::optional<std::size_t> DataTable::find(std::string_view column) const {
    const auto it = std::find(columns_.begin(), columns_.end(), column);
    if (it == columns_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - columns_.begin());
}

std::size_t DataTable::index_of(std::string_view column) const {
    if (auto idx = find(column)) return *idx;
    throw DataError("unknown variable '" + std::string(column) + "' in table '" + name_ + "'");
}

DataTable DataTable::select(std::span<const std::string> names) const {
    if (names.empty()) throw DataError("cannot select an empty column set from '" + name_ + "'");
    std::vector<std::vector<double>> cols;
    cols.reserve(names.size());
    for (const auto& n : names) cols.push_back(data_[index_of(n)]);
    return DataTable(name_, std::vector<std::string>(names.begin(), names.end()), std::move(cols));
}

DataTable DataTable::renamed(std::string name, std::vector<std::string> columns) const {
    if (columns.size() != columns_.size()) throw DataError("rename of '" + name_ + "' needs " + std::to_string(columns_.size()) + " names");
    return DataTable(std::move(name), std::move(columns), data_);
}

DataTable parse_csv(std::istream& in, std::string name) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("'" + name + "' is empty (no header row)");
    std::vector<std::string> header;
    for (auto field : split_commas(line)) header.emplace_back(trim(field));

    std::vector<std::vector<double>> cols(header.size());
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const auto fields = split_commas(line);
        if (fields.size() != header.size()) {
            throw DataError("'" + name + "' row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(header.size()));
        }
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const auto value = parse_number(fields[j]);
            if (!value) {
                throw DataError("'" + name + "' row " + std::to_string(row) + ", column " + header[j] +
                                ": non-numeric value '" + std::string(trim(fields[j])) + "'");
            }
            cols[j].push_back(*value);
        }
    }
    if (row == 0) throw DataError("'" + name + "' has no data rows");
    return DataTable(std::move(name), std::move(header), std::move(cols));
}

DataTable load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return parse_csv(in, path.filename().string());
}

void write_csv(const DataTable& table, std::ostream& out) {
    const auto& cols = table.columns();
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].find(',') != std::string::npos) throw DataError("column name '" + cols[j] + "' contains a comma");
        out << (j ? "," : "") << cols[j];
    }
    out << '\n';
    char buf[64];
    for (std::size_t i = 0; i < table.rows(); ++i) {
        for (std::size_t j = 0; j < table.cols(); ++j) {
            const auto res = std::to_chars(buf, buf + sizeof(buf), table.at(i, j));
            if (j) out << ',';
            out.write(buf, res.ptr - buf);
        }
        out << '\n';
    }
}

void save_csv(const DataTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    write_csv(table, out);
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

CorrelationMatrix::CorrelationMatrix(std::vector<std::string> variables, std::vector<double> values)
    : variables_(std::move(variables)), values_(std::move(values)) {
    if (values_.size() != variables_.size() * variables_.size()) throw DataError("correlation matrix shape mismatch");
}

std::size_t CorrelationMatrix::index_of(std::string_view name) const {
    const auto it = std::find(variables_.begin(), variables_.end(), name);
    if (it == variables_.end()) throw DataError("unknown variable '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - variables_.begin());
}

double CorrelationMatrix::at(std::string_view a, std::string_view b) const {
    return (*this)(index_of(a), index_of(b));
}

CorrelationMatrix correlation_matrix_serial(const DataTable& table) {
    std::vector<std::vector<double>> centered;
    std::vector<double> norms;
    centered_columns(table, centered, norms);
    const std::size_t c = table.cols();
    std::vector<double> values(c * c, 0.0);
    for (std::size_t i = 0; i < c; ++i) {
        values[i * c + i] = 1.0;
        for (std::size_t j = i + 1; j < c; ++j) {
            const double r = pair_correlation(centered[i], centered[j], norms[i], norms[j]);
            values[i * c + j] = r;
            values[j * c + i] = r;
        }
    }
    return CorrelationMatrix(table.columns(), std::move(values));
}

CorrelationMatrix correlation_matrix(const DataTable& table) {
    std::vector<std::vector<double>> centered;
    std::vector<double> norms;
    centered_columns(table, centered, norms);
    const auto c = static_cast<std::ptrdiff_t>(table.cols());
    std::vector<double> values(static_cast<std::size_t>(c * c), 0.0);
    // Each (i, j>i) entry is owned by exactly one iteration, so the mirror
    // writes never race.
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < c; ++i) {
        values[i * c + i] = 1.0;
        for (std::ptrdiff_t j = i + 1; j < c; ++j) {
            const double r = pair_correlation(centered[i], centered[j], norms[i], norms[j]);
            values[i * c + j] = r;
            values[j * c + i] = r;
        }
    }
    return CorrelationMatrix(table.columns(), std::move(values));
}

}  // namespace causal
