#include <algorithm>

#include "doctest.h"
#include "pars/dataset.hpp"
#include "test_util.hpp"

using namespace pars;

TEST_CASE("schema inference by column content") {
  const std::vector<std::string> header = {"a", "b", "c"};
  const std::vector<std::vector<std::string>> cells = {
      {"1.5", "ON", "1"},
      {"2.0", "OFF", "x"},
      {"3", "ON", "3"},
  };
  const Schema schema = infer_schema(header, cells);
  CHECK(schema.features[0].kind == FeatureKind::Numeric);
  CHECK(schema.features[1].kind == FeatureKind::Categorical);
  CHECK(schema.features[2].kind == FeatureKind::Categorical);  // mixed content
}

TEST_CASE("schema validation") {
  CHECK_THROWS_AS(Schema{}.validate(), Error);
  Schema dup{{{"x", FeatureKind::Numeric}, {"x", FeatureKind::Categorical}}};
  CHECK_THROWS_AS(dup.validate(), Error);
  Schema unnamed{{{"", FeatureKind::Numeric}}};
  CHECK_THROWS_AS(unnamed.validate(), Error);
}

TEST_CASE("water-tank csv loads with two numeric and two categorical features") {
  testutil::TempDir dir;
  const std::string path = dir.file("tank.csv");
  write_text_file(path,
                  "Level,Pump,Valve,Temperature\n"
                  "11.1,ON,Close,25\n"
                  "3.2,OFF,Open,24\n"
                  "8.9,OFF,Close,26\n"
                  "12.5,ON,Open,25\n");
  const Dataset d = load_csv(path);
  REQUIRE(d.n_rows() == 4);
  CHECK(d.schema.features[0].kind == FeatureKind::Numeric);
  CHECK(d.schema.features[1].kind == FeatureKind::Categorical);
  CHECK(d.schema.features[2].kind == FeatureKind::Categorical);
  CHECK(d.schema.features[3].kind == FeatureKind::Numeric);
  CHECK(cell_number(d.rows[0][0]) == doctest::Approx(11.1));
  CHECK(cell_category(d.rows[0][2]) == "Close");
}

TEST_CASE("header-only file is an empty dataset error") {
  testutil::TempDir dir;
  const std::string path = dir.file("empty.csv");
  write_text_file(path, "a,b\n");
  CHECK_THROWS_WITH_AS(load_csv(path), doctest::Contains("empty dataset"), Error);
}

TEST_CASE("unparseable numeric cell reports row and column") {
  Schema schema{{{"v", FeatureKind::Numeric}}};
  const std::vector<std::vector<std::string>> cells = {{"1"}, {"abc"}, {"3"}};
  try {
    dataset_from_cells({"v"}, cells, schema);
    FAIL("expected an error");
  } catch (const Error& e) {
    const std::string message = e.what();
    CHECK(message.find("row 2") != std::string::npos);
    CHECK(message.find("'v'") != std::string::npos);
  }
}

TEST_CASE("nan and inf tokens are not numeric") {
  const Schema schema = infer_schema({"a"}, {{"nan"}, {"1.0"}});
  CHECK(schema.features[0].kind == FeatureKind::Categorical);
  CHECK(!parse_number("inf"));
  CHECK(!parse_number("-inf"));
  CHECK(!parse_number("1,5"));
  CHECK(parse_number("1e-3"));
}

TEST_CASE("missing values rejected when training, carried when explaining") {
  const std::vector<std::string> header = {"a", "b"};
  const std::vector<std::vector<std::string>> cells = {{"1.0", "x"}, {"", "y"}};
  Schema schema{{{"a", FeatureKind::Numeric}, {"b", FeatureKind::Categorical}}};
  CHECK_THROWS_WITH_AS(dataset_from_cells(header, cells, schema),
                       doctest::Contains("missing value"), Error);
  const Dataset lenient = dataset_from_cells(header, cells, schema, MissingPolicy::Allow);
  CHECK(is_missing(lenient.rows[1][0]));
  CHECK(cell_category(lenient.rows[1][1]) == "y");
}

TEST_CASE("cells are trimmed") {
  const Dataset d = dataset_from_cells({"a", "b"}, {{" 1.5 ", "  ON "}});
  CHECK(cell_number(d.rows[0][0]) == 1.5);
  CHECK(cell_category(d.rows[0][1]) == "ON");
}

TEST_CASE("utf-8 byte order mark is ignored") {
  const auto records = parse_csv("\xEF\xBB\xBF" "a,b\n1,2\n");
  REQUIRE(records.size() == 2);
  CHECK(records[0][0] == "a");
}

TEST_CASE("split cardinality, determinism, and exact partition") {
  Rng rng(99);
  const Dataset d = testutil::random_dataset(rng, 100, 2, 1);

  auto [train, test] = split(d, 0.8, 7);
  CHECK(train.n_rows() == 80);
  CHECK(test.n_rows() == 20);

  auto [train2, test2] = split(d, 0.8, 7);
  CHECK(train.rows == train2.rows);
  CHECK(test.rows == test2.rows);

  // 4:1 on five rows.
  const Dataset small = testutil::random_dataset(rng, 5, 1, 0);
  auto [t5, e5] = split(small, 0.8, 1);
  CHECK(t5.n_rows() == 4);
  CHECK(e5.n_rows() == 1);

  CHECK_THROWS_AS(split(d, 0.0, 1), Error);
  CHECK_THROWS_AS(split(d, 1.0, 1), Error);
  CHECK_THROWS_AS(split(d, 1.5, 1), Error);

  // Union equals the input multiset, intersection empty, for several sizes.
  for (std::size_t rows : {2u, 17u, 63u}) {
    const Dataset any = testutil::random_dataset(rng, rows, 2, 1);
    auto [a, b] = split(any, 0.37, 1234);
    CHECK(a.n_rows() + b.n_rows() == rows);
    std::vector<Instance> merged = a.rows;
    merged.insert(merged.end(), b.rows.begin(), b.rows.end());
    auto key = [](const Instance& x) {
      std::string s;
      for (const auto& c : x) s += cell_to_string(c) + "|";
      return s;
    };
    std::vector<std::string> got, want;
    for (const auto& r : merged) got.push_back(key(r));
    for (const auto& r : any.rows) want.push_back(key(r));
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK(got == want);
  }
}

TEST_CASE("csv round-trips datasets including quoting edge cases") {
  Dataset d;
  d.schema.features = {{"name, with comma", FeatureKind::Categorical},
                       {"x", FeatureKind::Numeric}};
  d.rows.push_back({std::string("plain"), 0.1});
  d.rows.push_back({std::string("has \"quotes\""), 1.0 / 3.0});
  d.rows.push_back({std::string("multi\nline"), -1.25e-17});
  d.rows.push_back({std::string("inner  spaces"), 12345678901234.5});

  const std::string text = to_csv(d);
  auto records = parse_csv(text);
  REQUIRE(records.size() == 5);
  std::vector<std::string> header = records.front();
  records.erase(records.begin());
  const Dataset back = dataset_from_cells(header, records, d.schema);
  CHECK(back.rows == d.rows);
  CHECK(back.schema == d.schema);
}

TEST_CASE("schema sidecar parses names and kinds") {
  testutil::TempDir dir;
  const std::string path = dir.file("schema.csv");
  write_text_file(path, "Level,numeric\nPump,categorical\n");
  const Schema schema = load_schema_sidecar(path);
  REQUIRE(schema.size() == 2);
  CHECK(schema.features[0].name == "Level");
  CHECK(schema.features[0].kind == FeatureKind::Numeric);
  CHECK(schema.features[1].kind == FeatureKind::Categorical);

  write_text_file(path, "Level,float\n");
  CHECK_THROWS_AS(load_schema_sidecar(path), Error);
}

TEST_CASE("explicit schema must match csv header") {
  Schema schema{{{"a", FeatureKind::Numeric}, {"b", FeatureKind::Categorical}}};
  CHECK_THROWS_WITH_AS(dataset_from_cells({"a", "c"}, {{"1", "x"}}, schema),
                       doctest::Contains("schema expects"), Error);
  CHECK_THROWS_AS(dataset_from_cells({"a"}, {{"1"}}, schema), Error);
}
