#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "spreadlab/report.hpp"
#include "spreadlab/toml_lite.hpp"

using namespace spreadlab;
namespace fs = std::filesystem;

TEST_CASE("toml scalars, arrays and tables") {
  auto doc = parse_toml(R"(
# comment
title = "depth report"   # trailing comment
count = 42
ratio = 0.85
negated = -3.5e-2
enabled = true
spreads = [5, 10, 15]
names = ["a", "b"]

[limits]
max = 50
[limits.inner]
floor = 1

[[tier]]
label = "T1"
rate = 0.0001
[[tier]]
label = "T2"
rate = 0.00015
)");
  CHECK(doc.at("title").as_string() == "depth report");
  CHECK(doc.at("count").as_int() == 42);
  CHECK(doc.at("ratio").as_double() == Catch::Approx(0.85));
  CHECK(doc.at("negated").as_double() == Catch::Approx(-0.035));
  CHECK(doc.at("enabled").as_bool());
  REQUIRE(doc.at("spreads").as_array().size() == 3);
  CHECK(doc.at("spreads").as_array()[2].as_int() == 15);
  CHECK(doc.at("names").as_array()[1].as_string() == "b");
  CHECK(doc.at("limits").at("max").as_int() == 50);
  CHECK(doc.at("limits").at("inner").at("floor").as_int() == 1);
  REQUIRE(doc.at("tier").as_array().size() == 2);
  CHECK(doc.at("tier").as_array()[1].at("label").as_string() == "T2");
}

TEST_CASE("toml error reporting") {
  CHECK_THROWS_AS(parse_toml("= 5"), ParseError);
  CHECK_THROWS_AS(parse_toml("key ="), ParseError);
  CHECK_THROWS_AS(parse_toml("a = 1\na = 2"), ParseError);
  CHECK_THROWS_AS(parse_toml("[unclosed"), ParseError);
  CHECK_THROWS_AS(parse_toml("v = [1, 2"), ParseError);
  CHECK_THROWS_AS(parse_toml("v = what"), ParseError);
  try {
    parse_toml("ok = 1\nbroken = \n");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("csv escaping round-trips") {
  std::vector<std::string> fields{"plain", "with,comma", "with\"quote", ""};
  auto line = csv_join(fields);
  auto parsed = csv_split(line.substr(0, line.size() - 1));
  CHECK(parsed == fields);
}

TEST_CASE("report tables emit identical records in csv and json") {
  ReportTable table;
  table.header = {"market", "minute", "depth"};
  table.rows = {{"AAA-USD", "2023-05-11T12:00:00Z", "1000.5"},
                {"BBB-USD", "2023-05-11T12:01:00Z", "2"}};

  fs::path dir = fs::temp_directory_path() / "spreadlab_report_test";
  fs::remove_all(dir);
  auto csv_entry = emit_table(dir, "sample", table, ReportFormat::Csv);
  auto json_entry = emit_table(dir, "sample", table, ReportFormat::Json);
  CHECK(csv_entry.rows == 2);
  CHECK(json_entry.rows == 2);

  auto csv_text = read_file_auto(dir / "sample.csv");
  CHECK(csv_text == "market,minute,depth\n"
                    "AAA-USD,2023-05-11T12:00:00Z,1000.5\n"
                    "BBB-USD,2023-05-11T12:01:00Z,2\n");

  auto records = nlohmann::json::parse(read_file_auto(dir / "sample.json"));
  REQUIRE(records.size() == 2);
  auto lines = split_lines(csv_text);
  for (size_t r = 0; r < records.size(); ++r) {
    auto fields = csv_split(lines[r + 1]);
    for (size_t c = 0; c < table.header.size(); ++c)
      CHECK(records[r].at(table.header[c]).get<std::string>() == fields[c]);
  }
}

TEST_CASE("emission is deterministic and manifest-hashed") {
  ReportTable table;
  table.header = {"a", "b"};
  table.rows = {{"1", "0.5"}, {"2", "0.25"}};
  fs::path dir = fs::temp_directory_path() / "spreadlab_manifest_test";
  fs::remove_all(dir);

  auto first = emit_table(dir, "t", table, ReportFormat::Csv);
  auto second = emit_table(dir, "t", table, ReportFormat::Csv);
  CHECK(first.content_hash == second.content_hash);

  emit_manifest(dir, {first});
  auto manifest = nlohmann::json::parse(read_file_auto(dir / "manifest.json"));
  REQUIRE(manifest.at("files").size() == 1);
  CHECK(manifest.at("files")[0].at("file") == "t.csv");
  CHECK(manifest.at("files")[0].at("rows") == 2);
  CHECK(manifest.at("files")[0].at("hash") == first.content_hash);

  // no stray temp files left behind
  size_t files = 0;
  for (auto& p : fs::directory_iterator(dir)) {
    ++files;
    CHECK(p.path().extension() != ".tmp");
  }
  CHECK(files == 2);
}

TEST_CASE("shortest_double formatting is stable and minimal") {
  CHECK(shortest_double(0.5) == "0.5");
  CHECK(shortest_double(20.054) == "20.054");
  CHECK(shortest_double(1e21) == "1e+21");
  CHECK(shortest_double(0.0) == "0");
}
