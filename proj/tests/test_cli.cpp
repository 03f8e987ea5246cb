#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hardynorm/cli.hpp"
#include "hardynorm/constants.hpp"
#include "hardynorm/io.hpp"

using namespace hardynorm;
using io::Json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("hardynorm_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream in(line);
  for (std::string cell; std::getline(in, cell, ',');) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

// ---------------------------------------------------------------------------
// constant / ratio / sharpness

TEST(CliConstant, InteriorExample) {
  const auto r = run({"constant", "--p", "1.5", "--m", "1", "--lambda", "2"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const Json j = r.json();
  EXPECT_NEAR(j["C_pow_p"].get<double>(), 1.81442, 1e-5);
  EXPECT_EQ(j["branch"], "interior_optimum");
  EXPECT_NEAR(j["argmax"][0].get<double>(), 0.4, 0.1);
  EXPECT_NEAR(j["argmax"][1].get<double>(), 5.7, 0.5);
  EXPECT_NEAR(j["conjectured_value"].get<double>(), 1.4, 1e-11);
}

TEST(CliConstant, PEqualsTwo) {
  const Json j = run({"constant", "--p", "2", "--m", "0", "--lambda", "0.5"}).json();
  EXPECT_EQ(j["C"].get<double>(), 1.0);
  EXPECT_EQ(j["branch"], "p_equals_two");
}

TEST(CliConstant, InvalidExponentNamesConstraint) {
  const auto r = run({"constant", "--p", "0.9", "--m", "0", "--lambda", "1"});
  EXPECT_EQ(r.code, cli::kInputError);
  EXPECT_NE(r.err.find("p must exceed 1"), std::string::npos);
}

TEST(CliConstant, MissingOptionIsInputError) {
  EXPECT_EQ(run({"constant", "--p", "2"}).code, cli::kInputError);
  EXPECT_EQ(run({"nonsense"}).code, cli::kInputError);
}

TEST(CliConstant, TruncatedSearchIsNumericalFailure) {
  const auto r = run({"constant", "--p", "3", "--m", "1", "--lambda", "2", "--max-iter", "1", "--starts", "1"});
  EXPECT_EQ(r.code, cli::kNumericalFailure);
  EXPECT_FALSE(r.json()["converged"].get<bool>());
  EXPECT_TRUE(r.json().contains("error"));
}

TEST(CliConstant, Deterministic) {
  const std::vector<std::string> args{"constant", "--p", "2.7", "--m", "0.4", "--lambda", "1.9", "--seed", "5"};
  EXPECT_EQ(run(args).out, run(args).out);
}

TEST(CliConstant, OutputRoundTrips) {
  const auto r = run({"constant", "--p", "1.5", "--m", "1", "--lambda", "2"});
  EXPECT_EQ(Json::parse(r.out).dump(2) + "\n", r.out);
}

TEST(CliRatio, MatchesLibrary) {
  const Json j = run({"ratio", "--p", "1.5", "--m", "1", "--lambda", "2", "--alpha", "0.4", "--beta", "5.7"}).json();
  EXPECT_NEAR(j["c_ratio"].get<double>(), c_ratio({1.5, 1.0, 2.0}, 0.4, 5.7), 1e-11);
  EXPECT_EQ(j["c_ratio"], j["ratio_extremal"]);
}

TEST(CliRatio, InfeasiblePointIsInputError) {
  EXPECT_EQ(run({"ratio", "--p", "1.5", "--m", "1", "--lambda", "2", "--alpha", "1", "--beta", "5"}).code,
            cli::kInputError);
}

TEST(CliSharpness, GapVanishes) {
  const auto r = run({"sharpness", "--p", "1.5", "--m", "1", "--lambda", "2"});
  ASSERT_EQ(r.code, cli::kOk);
  EXPECT_LE(r.json()["gap"].get<double>(), 1e-6);
  EXPECT_LE(r.json()["ratio_nearby_max"].get<double>(), r.json()["C_pow_p"].get<double>());
}

TEST(CliSharpness, LambdaZeroBothSidesOne) {
  const Json j = run({"sharpness", "--p", "2.5", "--m", "0", "--lambda", "0"}).json();
  EXPECT_NEAR(j["C_pow_p"].get<double>(), 1.0, 1e-14);
  EXPECT_NEAR(j["ratio_extremal"].get<double>(), 1.0, 1e-11);
}

// ---------------------------------------------------------------------------
// majorize

TEST(CliMajorize, PassesOnMartingaleAndGeneralBranches) {
  for (auto args : {std::vector<std::string>{"--p", "4", "--m", "0", "--lambda", "1"},
                    std::vector<std::string>{"--p", "1.5", "--m", "1", "--lambda", "2"}}) {
    args.insert(args.begin(), "majorize");
    args.insert(args.end(), {"--points", "20001", "--x-range", "50"});
    const auto r = run(args);
    EXPECT_EQ(r.code, cli::kOk) << r.out;
    EXPECT_TRUE(r.json()["majorization"]["passed"].get<bool>());
  }
}

TEST(CliMajorize, MartingaleBranchReportsBurkholder) {
  const Json j = run({"majorize", "--p", "4", "--m", "0", "--lambda", "1", "--points", "2001"}).json();
  EXPECT_EQ(j["branch"], "mart_m0_l1");
  EXPECT_TRUE(j.contains("burkholder"));
}

TEST(CliMajorize, UndersizedConstantFailsWithWitness) {
  const auto r = run({"majorize", "--p", "4", "--m", "0", "--lambda", "1", "--force-c", "1.1", "--points", "20001"});
  EXPECT_EQ(r.code, cli::kCheckFailed);
  const Json j = r.json();
  EXPECT_FALSE(j["majorization"]["passed"].get<bool>());
  EXPECT_TRUE(j["majorization"]["witness_x"].is_number());
}

TEST(CliMajorize, UnbuildableBranchIsNumericalFailure) {
  EXPECT_EQ(run({"majorize", "--p", "3", "--m", "0", "--lambda", "-1"}).code, cli::kNumericalFailure);
}

// ---------------------------------------------------------------------------
// martingale

TEST(CliMartingale, QuarticSharpness) {
  const auto r = run({"martingale", "--alpha", "-2", "--s", "1e-4", "--n", "10000", "--p", "4"});
  ASSERT_EQ(r.code, cli::kOk);
  const Json j = r.json();
  EXPECT_NEAR(j["exact_ratio"].get<double>(), 3.0, 1e-2);
  EXPECT_NEAR(j["limit_ratio"].get<double>(), 3.0, 1e-10);
  EXPECT_TRUE(j["top_dominates"].get<bool>());
}

TEST(CliMartingale, AlphaZeroIsInputError) {
  EXPECT_EQ(run({"martingale", "--alpha", "0", "--s", "0.1", "--n", "5", "--p", "2"}).code, cli::kInputError);
}

TEST_F(TempDir, MartingaleFuzzWritesCsv) {
  const auto r = run({"martingale", "--alpha", "-2", "--s", "0.01", "--n", "10", "--p", "3", "--fuzz", "50",
                      "--jobs", "2", "--csv", path("fuzz.csv")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(r.json()["fuzz"]["violations"], 0);
  const auto lines = csv_lines(read("fuzz.csv"));
  ASSERT_EQ(lines.size(), 51u);
  EXPECT_EQ(lines[0], "seed,ratio,passed");
  EXPECT_EQ(split(lines[1])[0], "0");
}

// ---------------------------------------------------------------------------
// sweep

TEST_F(TempDir, SweepSingleRowMatchesConstant) {
  write("spec.json", R"({"p": [1.5], "m": [1], "lambda": [2]})");
  const auto r = run({"sweep", "--spec", path("spec.json"), "--out", path("out.csv")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto lines = csv_lines(read("out.csv"));
  ASSERT_EQ(lines.size(), 2u);
  const auto header = split(lines[0]);
  const auto row = split(lines[1]);
  ASSERT_EQ(header.size(), row.size());
  const Json constant = run({"constant", "--p", "1.5", "--m", "1", "--lambda", "2"}).json();
  EXPECT_EQ(row[4], io::format_number(constant["C_pow_p"].get<double>()));
  EXPECT_EQ(row[6], "interior_optimum");
  EXPECT_EQ(row[12], "ok");
}

TEST_F(TempDir, SweepNonPositiveLambda) {
  write("spec.json", R"({"p": [2.5], "m": [0.5], "lambda": {"lo": -2, "hi": 0, "steps": 3}})");
  ASSERT_EQ(run({"sweep", "--spec", path("spec.json"), "--out", path("out.csv")}).code, cli::kOk);
  const auto lines = csv_lines(read("out.csv"));
  ASSERT_EQ(lines.size(), 4u);
  const double g = gamma_pm({2.5, 0.5, 0.0}).value;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto row = split(lines[i]);
    const double l = std::stod(row[2]);
    EXPECT_EQ(row[6], "lambda_nonpositive");
    EXPECT_EQ(row[5], io::format_number(std::abs(l) / g + 1.0));
  }
}

TEST_F(TempDir, SweepEmptyGridWritesHeaderOnly) {
  write("spec.json", R"({"p": [], "m": [0], "lambda": [1]})");
  ASSERT_EQ(run({"sweep", "--spec", path("spec.json"), "--out", path("out.csv")}).code, cli::kOk);
  EXPECT_EQ(csv_lines(read("out.csv")).size(), 1u);
}

TEST_F(TempDir, SweepSkipsInfeasibleCells) {
  write("spec.json", R"({"p": [2], "m": [-1.5, 0], "lambda": [1]})");
  ASSERT_EQ(run({"sweep", "--spec", path("spec.json"), "--out", path("out.csv")}).code, cli::kOk);
  const auto lines = csv_lines(read("out.csv"));
  ASSERT_EQ(lines.size(), 3u);
  const auto skipped = split(lines[1]);
  EXPECT_EQ(skipped[12], "skipped");
  EXPECT_FALSE(skipped[13].empty());
  EXPECT_EQ(split(lines[2])[12], "ok");
}

TEST_F(TempDir, SweepRowsIndependentOfJobs) {
  write("spec.json", R"({"p": [1.5, 3], "m": [0, 1], "lambda": [0.5, 2]})");
  ASSERT_EQ(run({"sweep", "--spec", path("spec.json"), "--out", path("a.csv"), "--jobs", "1"}).code, cli::kOk);
  ASSERT_EQ(run({"sweep", "--spec", path("spec.json"), "--out", path("b.csv"), "--jobs", "4"}).code, cli::kOk);
  auto strip_time = [](const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& line : csv_lines(text)) {
      auto cells = split(line);
      cells.erase(cells.begin() + 11);
      rows.push_back(cells);
    }
    return rows;
  };
  const auto a = strip_time(read("a.csv"));
  EXPECT_EQ(a.size(), 9u);
  EXPECT_EQ(a, strip_time(read("b.csv")));
  for (std::size_t i = 2; i < a.size(); ++i) {
    const std::array<double, 3> prev{std::stod(a[i - 1][0]), std::stod(a[i - 1][1]), std::stod(a[i - 1][2])};
    const std::array<double, 3> cur{std::stod(a[i][0]), std::stod(a[i][1]), std::stod(a[i][2])};
    EXPECT_LT(prev, cur);
  }
}

TEST_F(TempDir, SweepJsonFormat) {
  write("spec.json", R"({"p": [2], "m": [0], "lambda": [0.5, 3], "format": "json"})");
  ASSERT_EQ(run({"sweep", "--spec", path("spec.json"), "--out", path("out.json")}).code, cli::kOk);
  const Json j = Json::parse(read("out.json"));
  ASSERT_TRUE(j.is_array() || j.contains("rows"));
}

TEST_F(TempDir, SweepUnwritableOutputIsInputError) {
  write("spec.json", R"({"p": [2], "m": [0], "lambda": [1]})");
  EXPECT_EQ(run({"sweep", "--spec", path("spec.json"), "--out", path("missing/dir/out.csv")}).code,
            cli::kInputError);
}

TEST_F(TempDir, SweepBadSpecIsInputError) {
  write("spec.json", R"({"p": [2], "m": 0)");
  EXPECT_EQ(run({"sweep", "--spec", path("spec.json"), "--out", path("out.csv")}).code, cli::kInputError);
  EXPECT_EQ(run({"sweep", "--spec", path("nope.json"), "--out", path("out.csv")}).code, cli::kInputError);
}

// ---------------------------------------------------------------------------
// apply

TEST_F(TempDir, ApplyPiecewiseExtremalFamily) {
  const Params params{1.5, 1.0, 2.0};
  write("f.json", io::to_json(extremal_family(params, 0.4, 5.7)).dump());
  const auto r = run({"apply", "--p", "1.5", "--m", "1", "--lambda", "2", "--in", path("f.json"), "--out",
                      path("g.json"), "--op", "i-minus-lambda-hm"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const Json j = r.json();
  const double ratio = std::pow(j["image_norm"].get<double>() / j["input_norm"].get<double>(), 1.5);
  EXPECT_NEAR(ratio, ratio_extremal(params, 0.4, 5.7), 1e-9);
  EXPECT_EQ(j["domain"][1], "inf");
  EXPECT_NO_THROW(io::piecewise_from_json(Json::parse(read("g.json"))));
}

TEST_F(TempDir, ApplySampledConstant) {
  write("f.json", R"({"grid": [0, 0.5, 1], "values_re": [1, 1, 1]})");
  ASSERT_EQ(run({"apply", "--p", "2", "--m", "2", "--lambda", "1", "--in", path("f.json"), "--out",
                 path("g.json"), "--op", "hm"})
                .code,
            cli::kOk);
  const auto g = io::sampled_from_json(Json::parse(read("g.json")));
  for (const auto& v : g.values) EXPECT_NEAR(v.real(), 0.5, 1e-12);
}

TEST_F(TempDir, ApplyRejectsGarbage) {
  write("f.json", R"({"something": 1})");
  EXPECT_EQ(run({"apply", "--p", "2", "--m", "0", "--lambda", "1", "--in", path("f.json"), "--out",
                 path("g.json")})
                .code,
            cli::kInputError);
  write("h.json", "not json");
  EXPECT_EQ(run({"apply", "--p", "2", "--m", "0", "--lambda", "1", "--in", path("h.json"), "--out",
                 path("g.json")})
                .code,
            cli::kInputError);
}
