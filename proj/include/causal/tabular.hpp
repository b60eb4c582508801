#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace causal {

/// Immutable numeric table with named columns. Storage is column-major.
class DataTable {
public:
    DataTable(std::string name, std::vector<std::string> columns,
              std::vector<std::vector<double>> column_data);

    const std::string& name() const { return name_; }
    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return columns_.size(); }

    std::optional<std::size_t> find(std::string_view column) const;
    /// Throws DataError naming the column when absent.
    std::size_t index_of(std::string_view column) const;

    std::span<const double> column(std::size_t index) const { return data_[index]; }
    std::span<const double> column(std::string_view name) const { return data_[index_of(name)]; }
    double at(std::size_t row, std::size_t col) const { return data_[col][row]; }

    /// Projection onto the named columns, in the given order.
    DataTable select(std::span<const std::string> names) const;
    DataTable renamed(std::string name, std::vector<std::string> columns) const;

    bool operator==(const DataTable& other) const = default;

private:
    std::string name_;
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> data_;
    std::size_t rows_ = 0;
};

DataTable parse_csv(std::istream& in, std::string name);
DataTable load_csv(const std::filesystem::path& path);

/// Shortest round-trip representation for every cell.
void write_csv(const DataTable& table, std::ostream& out);
void save_csv(const DataTable& table, const std::filesystem::path& path);

/// Pearson correlations over the table's columns. Symmetric with unit diagonal.
class CorrelationMatrix {
public:
    CorrelationMatrix(std::vector<std::string> variables, std::vector<double> values);

    const std::vector<std::string>& variables() const { return variables_; }
    std::size_t size() const { return variables_.size(); }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
    double at(std::string_view a, std::string_view b) const;
    std::size_t index_of(std::string_view name) const;

private:
    std::vector<std::string> variables_;
    std::vector<double> values_;
};

/// Two-pass mean-then-covariance; columns are processed in parallel when
/// OpenMP is available.
CorrelationMatrix correlation_matrix(const DataTable& table);

/// Serial reference kept for testing and benchmarking the parallel kernel.
CorrelationMatrix correlation_matrix_serial(const DataTable& table);

}  // namespace causal
