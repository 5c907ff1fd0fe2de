#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "ssqt/cli.hpp"
#include "ssqt/random.hpp"

using namespace ssqt;
using namespace ssqt::cli;

namespace {

class Workspace : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("ssqt_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    std::string path = (dir_ / name).string();
    std::ofstream(path) << text;
    return path;
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "ssqt-cli");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return dispatch(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  std::filesystem::path dir_;
  std::ostringstream out_, err_;
};

const char* kIdentityChoi =
    R"({"kind": "choi", "dims": [2, 2], "out_dims": [2], "in_dims": [2],
        "re": [[1,0,0,1],[0,0,0,0],[0,0,0,0],[1,0,0,1]]})";
const char* kGamma = R"({"kind": "gamma", "dims": [2], "re": [[1,0],[0,0.5]]})";
const char* kMaxEntangled =
    R"({"kind": "state", "dims": [2, 2], "re": [[0.5,0,0,0.5],[0,0,0,0],[0,0,0,0],[0.5,0,0,0.5]]})";

}  // namespace

TEST_F(Workspace, LoadIdentityOperator) {
  std::string path = write("id.json", R"({"kind": "operator", "dims": [2], "re": [[1,0],[0,1]]})");
  Loaded obj = load(path);
  ASSERT_TRUE(std::holds_alternative<HermitianOperator>(obj));
  EXPECT_EQ(std::get<HermitianOperator>(obj).mat(), CMat(CMat::Identity(2, 2)));
  EXPECT_EQ(load_operator(path).dim(), 2);
}

TEST_F(Workspace, StateWithExcessTraceIsRejected) {
  std::string path = write("bad.json", R"({"kind": "state", "dims": [2], "re": [[1,0],[0,0.5]]})");
  try {
    load_state(path);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("1.5"), std::string::npos) << e.what();
  }
  EXPECT_EQ(run({"entropy", "--state", path}), 1);
  EXPECT_NE(err_.str().find("1.5"), std::string::npos);
}

TEST_F(Workspace, MalformedFilesAreRejected) {
  EXPECT_THROW(parse_matrix_file("{not json"), InputError);
  EXPECT_THROW(parse_matrix_file(R"({"kind": "state", "dims": [3], "re": [[1,0],[0,0]]})"), InputError);
  EXPECT_THROW(parse_matrix_file(R"({"kind": "banana", "dims": [1], "re": [[1]]})"), InputError);
  EXPECT_THROW(to_object(parse_matrix_file(R"({"kind": "gamma", "dims": [2], "re": [[1,0],[0,-1]]})")), InputError);
  EXPECT_THROW(load((dir_ / "missing.json").string()), InputError);
  Loaded ket = to_object(parse_matrix_file(R"({"kind": "ket", "dims": [2], "re": [[0.6],[0.8]]})"));
  ASSERT_TRUE(std::holds_alternative<Ket>(ket));
  EXPECT_NEAR(std::get<Ket>(ket).amps.norm(), 1.0, 1e-15);
}

TEST_F(Workspace, SerializeRoundTripIsBitExact) {
  Rng rng(100);
  for (int trial = 0; trial < 5; ++trial) {
    SubnormalizedState s(random_state(3, rng), {3});
    MatrixFile f = to_file(s);
    std::string text = serialize(f);
    MatrixFile back = parse_matrix_file(text);
    EXPECT_EQ(back.m, f.m);
    EXPECT_EQ(serialize(back), text);
    std::string path = (dir_ / "s.json").string();
    write_matrix_file(path, f);
    EXPECT_EQ(read_matrix_file(path).m, f.m);
  }
  ChoiChannel id = identity_channel({2});
  MatrixFile cf = to_file(id);
  EXPECT_EQ(cf.kind, "choi");
  EXPECT_EQ(parse_matrix_file(serialize(cf)).out_dims, Dims{2});
}

TEST(Render, FormatsParseBackConsistently) {
  Report r;
  r.command = "ssqt-cli test";
  r.inputs_digest = digest({"test"}, {});
  r.results.push_back({"alpha", 0.1 + 0.2, "bits", "SDP", 1.5e-9, 0.01});
  r.results.push_back({"flag", 1.0, "bool", "LP", std::nullopt, std::nullopt});
  r.warnings.push_back("a, \"quoted\" warning");

  Report back = report_from_json(render(r, Format::json));
  EXPECT_EQ(back.command, r.command);
  EXPECT_EQ(back.inputs_digest, r.inputs_digest);
  ASSERT_EQ(back.results.size(), 2u);
  EXPECT_EQ(back.results[0].value, 0.1 + 0.2);
  EXPECT_EQ(back.results[0].gap, r.results[0].gap);
  EXPECT_FALSE(back.results[1].epsilon.has_value());
  EXPECT_EQ(back.warnings, r.warnings);

  std::vector<ResultRow> rows = rows_from_csv(render(r, Format::csv));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].name, "alpha");
  EXPECT_EQ(rows[0].value, 0.1 + 0.2);
  EXPECT_EQ(rows[0].epsilon, 0.01);
  EXPECT_EQ(rows[1].method, "LP");

  std::string text = render(r, Format::text);
  EXPECT_NE(text.find("alpha"), std::string::npos);
  EXPECT_NE(text.find("true"), std::string::npos);
}

TEST(Render, UnitsApplyOnlyToBitRows) {
  Report r;
  r.results.push_back({"work", 2.0, "bits", "exact", std::nullopt, std::nullopt});
  r.results.push_back({"alpha", 0.25, "", "SDP", std::nullopt, std::nullopt});
  std::vector<ResultRow> rows = rows_from_csv(render(r, Format::csv, Units::nats));
  EXPECT_NEAR(rows[0].value, 2.0 * std::log(2.0), 1e-15);
  EXPECT_EQ(rows[0].units, "nats");
  EXPECT_EQ(rows[1].value, 0.25);
  EXPECT_EQ(unit_factor(Units::kTln2), 1.0);
  EXPECT_EQ(parse_units("kTln2"), Units::kTln2);
  EXPECT_THROW(parse_units("joules"), InputError);
  EXPECT_THROW(parse_format("xml"), InputError);
}

TEST(Digest, DeterministicAndSensitive) {
  EXPECT_EQ(digest({"a", "b"}, {}), digest({"a", "b"}, {}));
  EXPECT_NE(digest({"a", "b"}, {}), digest({"ab"}, {}));
  EXPECT_EQ(digest({}, {}).size(), 16u);
}

TEST_F(Workspace, ClassicalGateExample) {
  EXPECT_EQ(run({"classical-workcost", "--gate", "and"}), 0);
  EXPECT_NE(out_.str().find("1.584963"), std::string::npos) << out_.str();
  EXPECT_EQ(run({"--format", "csv", "--units", "nats", "classical-workcost", "--gate", "xor"}), 0);
  std::vector<ResultRow> rows = rows_from_csv(out_.str());
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_NEAR(rows[0].value, std::log(2.0), 1e-15);
  EXPECT_EQ(run({"classical-workcost", "--gate", "implies"}), 1);
}

TEST_F(Workspace, CoherentIdentityExample) {
  std::string choi = write("id.json", kIdentityChoi), g = write("g.json", kGamma);
  std::string proc = write("proc.json", kMaxEntangled);
  EXPECT_EQ(run({"--format", "json", "coherent", "--proc", proc, "--gamma-r", g, "--gamma-x", g}), 0) << err_.str();
  Report r = report_from_json(out_.str());
  ASSERT_FALSE(r.results.empty());
  EXPECT_NEAR(r.results[0].value, 0.0, 1e-6);
  EXPECT_EQ(run({"workcost", "--channel", choi, "--input", proc}), 1);  // input has the wrong dimension
}

TEST_F(Workspace, ThermoMajorizationExample) {
  EXPECT_EQ(run({"thermo-major", "--p", "1,0", "--q", "0.5,0.5", "--gibbs", "0.6667,0.3333"}), 0);
  EXPECT_NE(out_.str().find("true"), std::string::npos) << out_.str();
  EXPECT_EQ(run({"--format", "csv", "thermo-major", "--p", "1,0", "--q", "0.5,0.5", "--gibbs", "0.6667,0.3333",
                 "--slack", "1e-9"}),
            0);
  EXPECT_EQ(rows_from_csv(out_.str())[0].value, 0.0);
  EXPECT_EQ(run({"thermo-major", "--p", "1,0", "--q", "0.5", "--gibbs", "1,1"}), 1);
}

TEST_F(Workspace, ExitCodes) {
  EXPECT_EQ(run({}), 1);
  EXPECT_EQ(run({"no-such-command"}), 1);
  EXPECT_EQ(run({"entropy", "--state", (dir_ / "missing.json").string()}), 1);
  EXPECT_EQ(run({"potential", "--toy-gas", "3", "--energy", "1"}), 0);
  EXPECT_NE(out_.str().find("-1.58496"), std::string::npos) << out_.str();

  std::string state = write("s.json", R"({"kind": "state", "dims": [2, 2],
      "re": [[0.4,0,0,0.3],[0,0.1,0,0],[0,0,0.1,0],[0.3,0,0,0.4]]})");
  EXPECT_EQ(run({"entropy", "--state", state, "--kind", "min", "--cond", "1"}), 0);
  setenv("SSQT_SDP_MAX_ITERS", "2", 1);
  const int capped = run({"entropy", "--state", state, "--kind", "min", "--cond", "1"});
  unsetenv("SSQT_SDP_MAX_ITERS");
  EXPECT_EQ(capped, 2);
  EXPECT_NE(err_.str().find("max_iters"), std::string::npos) << err_.str();
}

TEST_F(Workspace, OutputsAreDeterministicForSeed) {
  EXPECT_EQ(run({"--format", "json", "--seed", "7", "demo", "toy-gas", "--n", "40"}), 0);
  std::string first = out_.str();
  EXPECT_EQ(run({"--format", "json", "--seed", "7", "demo", "toy-gas", "--n", "40"}), 0);
  EXPECT_EQ(out_.str(), first);
  Report a = demo_paper_numbers(11), b = demo_paper_numbers(11);
  ASSERT_EQ(a.results.size(), b.results.size());
  for (std::size_t i = 0; i < a.results.size(); ++i) EXPECT_EQ(a.results[i].value, b.results[i].value);
}
