#include <doctest.h>

#include "cxnprobe/errors.hpp"
#include "cxnprobe/io.hpp"
#include "support/helpers.hpp"

using namespace cxnprobe;

TEST_CASE("delimiter declared by the header row") {
    auto tsv = io::parse_table("a\tb\nx\ty\n");
    CHECK(tsv.delimiter == '\t');
    REQUIRE(tsv.rows.size() == 1);
    CHECK(tsv.rows[0][1] == "y");

    auto csv = io::parse_table("a,b\nx,y\n");
    CHECK(csv.delimiter == ',');
    CHECK(csv.rows[0][0] == "x");
}

TEST_CASE("csv quoting round-trips commas, quotes and newlines") {
    io::Table t;
    t.delimiter = ',';
    t.header = {"id", "sentence"};
    t.rows = {{"1", "una frase, con virgole"},
              {"2", "dice \"ciao\" e va"},
              {"3", "riga\nspezzata"}};
    const std::string formatted = io::format_table(t);
    auto back = io::parse_table(formatted);
    REQUIRE(back.rows.size() == 3);
    CHECK(back.rows[0][1] == "una frase, con virgole");
    CHECK(back.rows[1][1] == "dice \"ciao\" e va");
    CHECK(back.rows[2][1] == "riga\nspezzata");
}

TEST_CASE("jsonl read/write") {
    testsupport::TempDir dir("io");
    const auto path = dir.path() / "records.jsonl";
    io::write_jsonl(path, {{{"a", 1}}, {{"b", "x"}}});
    auto records = io::read_jsonl(path);
    REQUIRE(records.size() == 2);
    CHECK(records[0].at("a") == 1);
    CHECK(records[1].at("b") == "x");
}

TEST_CASE("empty table content is a schema error") {
    CHECK_THROWS_AS(io::parse_table(""), SchemaError);
}
