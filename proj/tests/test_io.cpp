#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "merge_metrics/errors.hpp"
#include "merge_metrics/io.hpp"

using namespace merge_metrics;
namespace fs = std::filesystem;
using io::json;

namespace {

std::string kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return "none";
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("mm_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return path_ / name;
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

}  // namespace

TEST(SpaceJson, RoundTripsEveryKind) {
  const std::vector<json> docs = {
      json::parse(R"({"points": [[0], [0.3], [5]], "metric": "euclidean"})"),
      json::parse(R"({"points": [[0, 1], [2, 2]], "metric": "l1"})"),
      json::parse(R"({"points": null, "metric": "matrix", "matrix": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]})"),
      json::parse(R"({"points": [[1], [4]], "metric": "matrix", "matrix": [[0, 0.25], [0.25, 0]]})"),
      json::parse(R"({"metric": "discrete", "size": 4})"),
  };
  for (const auto& doc : docs) {
    const auto s = io::space_from_json(doc);
    const auto back = io::space_from_json(io::space_to_json(*s));
    EXPECT_TRUE(*s == *back) << doc.dump();
    EXPECT_EQ(io::space_to_json(*back), io::space_to_json(*s));
  }
  EXPECT_EQ(io::space_from_json(docs[2])->dist(0, 2), 2.0);
  EXPECT_EQ(io::space_from_json(docs[4])->dist(1, 3), 1.0);
}

TEST(SpaceJson, Errors) {
  EXPECT_EQ(kind_of([] { (void)io::space_from_json(json::parse(R"({"points": [[0]]})")); }), "InvalidInput");
  EXPECT_EQ(kind_of([] { (void)io::space_from_json(json::parse(R"({"points": [[0]], "metric": "cosine"})")); }),
            "InvalidInput");
  EXPECT_EQ(kind_of([] { (void)io::space_from_json(json::parse(R"({"points": [[0], ["a"]], "metric": "l1"})")); }),
            "InvalidInput");
  EXPECT_EQ(kind_of([] { (void)io::space_from_json(json::parse(R"({"metric": "euclidean"})")); }), "InvalidInput");
  EXPECT_EQ(kind_of([] {
              (void)io::space_from_json(json::parse(R"({"metric": "matrix", "matrix": [[0, 5, 1], [5, 0, 1], [1, 1, 0]]})"));
            }),
            "AxiomViolation");
}

TEST(MeasureJson, InlineAndReferencedSpaces) {
  TempDir dir;
  dir.write("space.json", R"({"points": [[0], [1]], "metric": "euclidean"})");
  const auto a = dir.write("a.json", R"({"space": "space.json", "weights": [0.25, 0.75]})");
  const auto b = dir.write("b.json", R"({"space": {"points": [[0], [1]], "metric": "euclidean"}, "weights": [1, 0]})");
  const auto pa = io::load_measure(a);
  const auto pb = io::load_measure(b);
  EXPECT_EQ(pa.weights(), (std::vector<double>{0.25, 0.75}));
  EXPECT_TRUE(*pa.space() == *pb.space());
  const auto again = io::measure_from_json(io::measure_to_json(pa));
  EXPECT_EQ(again.weights(), pa.weights());

  const auto bad = dir.write("bad.json", R"({"space": "space.json", "weights": [0.5, 0.6]})");
  EXPECT_EQ(kind_of([&] { (void)io::load_measure(bad); }), "NotNormalized");
  const auto neg = dir.write("neg.json", R"({"space": "space.json", "weights": [1.5, -0.5]})");
  EXPECT_EQ(kind_of([&] { (void)io::load_measure(neg); }), "NegativeWeight");
  const auto short_w = dir.write("short.json", R"({"space": "space.json", "weights": [1]})");
  EXPECT_EQ(kind_of([&] { (void)io::load_measure(short_w); }), "InvalidInput");
  EXPECT_EQ(kind_of([&] { (void)io::load_measure(dir.path() / "missing.json"); }), "IoError");
  const auto garbage = dir.write("garbage.json", "{not json");
  EXPECT_EQ(kind_of([&] { (void)io::load_measure(garbage); }), "InvalidInput");
}

TEST(SampleCsv, HeaderBlankLinesAndErrors) {
  TempDir dir;
  const auto s = dir.write("s.csv", "x,y\n0,1\n\n2, 3\r\n0,1\n");
  const auto rows = io::read_sample_csv(s);
  EXPECT_EQ(rows, (Coordinates{{0, 1}, {2, 3}, {0, 1}}));
  const auto p = io::load_measure(s);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_DOUBLE_EQ(p[0], 2.0 / 3.0);
  EXPECT_EQ(kind_of([&] { (void)io::read_sample_csv(dir.write("r.csv", "1,2\n3\n")); }), "InvalidInput");
  EXPECT_EQ(kind_of([&] { (void)io::read_sample_csv(dir.write("t.csv", "1\nabc\n")); }), "InvalidInput");
  EXPECT_EQ(kind_of([&] { (void)io::read_sample_csv(dir.write("e.csv", "x\n")); }), "EmptySample");
}

TEST(ModulusJson, RoundTrip) {
  const auto m = io::modulus_from_json(json::parse(R"({"knots": [[0.5, 0.25], [2, 1]], "tail": "linear"})"));
  EXPECT_EQ(m.tail(), Modulus::Tail::Linear);
  EXPECT_DOUBLE_EQ(m(0.25), 0.125);
  const auto back = io::modulus_from_json(io::modulus_to_json(m));
  EXPECT_EQ(back.knots(), m.knots());
  EXPECT_EQ(kind_of([] { (void)io::modulus_from_json(json::parse(R"({"knots": [[1]], "tail": "const"})")); }),
            "InvalidInput");
  EXPECT_EQ(kind_of([] { (void)io::modulus_from_json(json::parse(R"({"knots": [[1, 1]], "tail": "cubic"})")); }),
            "InvalidInput");
}

TEST(FunctionJson, TabulatedAndAnalytic) {
  const auto s = io::space_from_json(json::parse(R"({"points": [[0], [2]], "metric": "euclidean"})"));
  const auto t = io::function_from_json(json::parse(R"({"kind": "tabulated", "values": [1, -1]})"), s);
  EXPECT_EQ(t.values(), (std::vector<double>{1, -1}));
  const auto a = io::function_from_json(json::parse(R"({"kind": "analytic", "name": "identity", "modulus": null})"), s);
  EXPECT_EQ(a.values(), (std::vector<double>{0, 2}));
  EXPECT_EQ(kind_of([&] {
              (void)io::function_from_json(
                  json::parse(R"({"kind": "analytic", "name": "identity", "modulus": {"knots": [[1, 0.5]], "tail": "linear"}})"), s);
            }),
            "InvalidModulus");
  EXPECT_EQ(kind_of([&] { (void)io::function_from_json(json::parse(R"({"kind": "tabulated", "values": [1]})"), s); }),
            "InvalidInput");
  EXPECT_EQ(kind_of([&] { (void)io::function_from_json(json::parse(R"({"kind": "spline"})"), s); }), "InvalidInput");
}

TEST(ReportIo, JsonAndCsvLayout) {
  const auto sc = scenario_remark1(index_range(2, 30));
  const auto rep = diagnose(sc, sc.indices());
  const json j = io::to_json(rep);
  EXPECT_EQ(j.at("scenario"), "remark1");
  EXPECT_EQ(j.at("records").size(), 29u);
  EXPECT_EQ(j.at("records").at(0).at("metrics").at("pi"), 0.5);
  EXPECT_EQ(j.at("verdict").at(0).at("merging"), true);
  ASSERT_EQ(j.at("flags").size(), 1u);
  EXPECT_EQ(j.at("flags").at(0).at("flag"), "non-UC witness");

  const auto short_rep = diagnose(sc, index_range(2, 8));
  EXPECT_EQ(io::to_json(short_rep).at("verdict").at(0).at("merging"), false);  // 1/8 is not below 0.05
  EXPECT_TRUE(io::to_json(short_rep).at("flags").empty());

  const std::string csv = io::to_csv(rep);
  const std::string header = csv.substr(0, csv.find('\n'));
  EXPECT_EQ(header, "n,pi,beta,F1,integral:indicator_x,verdict@0.05");
  EXPECT_NE(csv.find("\n2,0.5,"), std::string::npos);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 30);
}

TEST(FormatNumber, ShortestRoundTrip) {
  EXPECT_EQ(io::format_number(0.3), "0.3");
  EXPECT_EQ(io::format_number(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(io::format_number(1.0), "1.0");
  EXPECT_EQ(io::format_number(std::nan("")), "null");
}
