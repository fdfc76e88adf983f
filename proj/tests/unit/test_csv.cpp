#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hmlc/csv.hpp"
#include "hmlc/errors.hpp"

using namespace hmlc;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream f(p, std::ios::trunc);
    f << content;
    return p;
}

} // namespace

TEST_CASE("read_csv parses header and rows") {
    const auto p = temp_file("csv_basic.csv", "a,b,c\n1,2,3\n4,5,6\n");
    const CsvTable t = read_csv(p);
    CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == std::vector<std::string>{"1", "2", "3"});
    CHECK(t.column("b") == 1);
    CHECK(t.has_column("c"));
    CHECK_FALSE(t.has_column("d"));
    CHECK_THROWS_AS((void)t.column("d"), ValidationError);
}

TEST_CASE("read_csv keeps empty cells and handles crlf") {
    const auto p = temp_file("csv_empty.csv", "a,b\r\n1,\r\n,2\r\n");
    const CsvTable t = read_csv(p);
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0][1] == "");
    CHECK(t.rows[1][0] == "");
}

TEST_CASE("read_csv rejects ragged rows") {
    const auto p = temp_file("csv_ragged.csv", "a,b\n1,2,3\n");
    CHECK_THROWS_AS(read_csv(p), ValidationError);
}

TEST_CASE("read_csv rejects a missing file") {
    CHECK_THROWS_AS(read_csv("/nonexistent/nope.csv"), ValidationError);
}

TEST_CASE("write then read round-trips") {
    CsvTable t;
    t.header = {"x", "y"};
    t.rows = {{"1", "hello"}, {"", "world"}};
    const fs::path p = fs::temp_directory_path() / "csv_roundtrip.csv";
    write_csv(p, t);
    const CsvTable back = read_csv(p);
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
}

TEST_CASE("trim strips surrounding whitespace only") {
    CHECK(trim("  a b  ") == "a b");
    CHECK(trim("\tx\r") == "x");
    CHECK(trim("") == "");
}
