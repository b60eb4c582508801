#include "causal/error.hpp"
#include "causal/tabular.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace causal;

namespace {

DataTable parse(const std::string& text, std::string name = "t.csv") {
    std::istringstream in(text);
    return parse_csv(in, std::move(name));
}

std::string message_of(const std::string& text) {
    try {
        parse(text);
    } catch (const DataError& e) {
        return e.what();
    }
    return {};
}

DataTable random_table(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::vector<std::string> names;
    std::vector<std::vector<double>> data(cols, std::vector<double>(rows));
    for (std::size_t j = 0; j < cols; ++j) {
        names.push_back("c" + std::to_string(j));
        for (std::size_t i = 0; i < rows; ++i) data[j][i] = z(rng) + (j ? 0.5 * data[j - 1][i] : 0.0);
    }
    return DataTable("random", names, data);
}

}  // namespace

TEST_CASE("csv parsing keeps header order and values") {
    const auto t = parse("A,B,C\n1,2,3\n4,5.5,-6e-1\n");
    CHECK(t.name() == "t.csv");
    CHECK(t.columns() == std::vector<std::string>{"A", "B", "C"});
    CHECK(t.rows() == 2);
    CHECK(t.at(1, 1) == 5.5);
    CHECK(t.at(1, 2) == -0.6);
    CHECK(t.index_of("C") == 2);
    CHECK_FALSE(t.find("D").has_value());
    CHECK_THROWS_AS(t.index_of("D"), DataError);
}

TEST_CASE("csv errors name the data row and the column") {
    CHECK(message_of("A,B\n1,2\n3,abc\n").find("row 2, column B") != std::string::npos);
    CHECK(message_of("A,B\n1,2\n3,abc\n").find("abc") != std::string::npos);
    CHECK(message_of("A,A\n1,2\n").find("duplicate column name 'A'") != std::string::npos);
    CHECK(message_of("").find("empty") != std::string::npos);
    CHECK(message_of("A,B\n").find("no data rows") != std::string::npos);
    CHECK(message_of("A,B\n1,2\n3\n").find("row 2") != std::string::npos);
    CHECK(message_of("A,B\n1,inf\n").find("row 1") != std::string::npos);
}

TEST_CASE("csv round trip is exact") {
    const auto t = random_table(50, 4, 7);
    std::ostringstream out;
    write_csv(t, out);
    const auto back = parse(out.str(), "random");
    CHECK(back == t);
}

TEST_CASE("select and rename") {
    const auto t = parse("A,B,C\n1,2,3\n4,5,6\n");
    const std::vector<std::string> pick{"C", "A"};
    const auto s = t.select(pick);
    CHECK(s.columns() == pick);
    CHECK(s.at(1, 0) == 6.0);
    const auto r = t.renamed("r.csv", {"x", "y", "z"});
    CHECK(r.name() == "r.csv");
    CHECK(r.column("y")[0] == 2.0);
    CHECK_THROWS_AS(t.renamed("bad", {"x"}), DataError);
}

TEST_CASE("correlation matches the textbook formula") {
    const auto t = random_table(300, 5, 11);
    const auto c = correlation_matrix(t);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(c(i, i) == 1.0);
        for (std::size_t j = 0; j < 5; ++j) {
            CHECK(c(i, j) == c(j, i));
            CHECK(c(i, j) == doctest::Approx(oracle::pearson(t.column(i), t.column(j))).epsilon(1e-12));
        }
    }
    CHECK(c.at("c0", "c1") == c(0, 1));
}

TEST_CASE("parallel correlation equals the serial reference bit for bit") {
    const auto t = random_table(1000, 9, 3);
    const auto a = correlation_matrix(t);
    const auto b = correlation_matrix_serial(t);
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = 0; j < 9; ++j) CHECK(a(i, j) == b(i, j));
}

TEST_CASE("correlation rejects constant columns and single rows") {
    const auto flat = parse("A,B\n1,2\n1,3\n1,4\n");
    CHECK_THROWS_WITH_AS(correlation_matrix(flat), doctest::Contains("'A' is constant"), DataError);
    CHECK_THROWS_AS(correlation_matrix(parse("A,B\n1,2\n")), DataError);
}
