#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spps/cli.hpp"

using namespace spps;
using namespace spps::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("spps_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write(const std::string& name, const std::string& body) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << body;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::string& args) {
  static int counter = 0;
  const fs::path o = scratch() / ("out" + std::to_string(counter) + ".txt");
  const fs::path e = scratch() / ("err" + std::to_string(counter++) + ".txt");
  const std::string cmd = std::string(SPPS_BIN) + " " + args + " >" + o.string() + " 2>" + e.string();
  const int st = std::system(cmd.c_str());
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(o), slurp(e)};
}

std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<double> r;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) r.push_back(std::stod(cell));
    rows.push_back(r);
  }
  return rows;
}

const std::string kBessel = std::string(SPPS_PROBLEMS) + "/bessel.txt";

}  // namespace

TEST(ProblemFile, KeyValueDocument) {
  const ProblemFile pf = parse_problem("# comment\nl = 1/4\nq = x^2  # trailing\nbeta = 1+2i\nN = 30\nshift = 10,1,0.5\n"
                                       "strategy = adaptive\nreal_mode = false\n");
  EXPECT_DOUBLE_EQ(pf.spec.l, 0.25);
  EXPECT_EQ(pf.spec.q, Expr::parse("x^2"));
  EXPECT_EQ(pf.spec.beta, cplx(1.0, 2.0));
  EXPECT_EQ(pf.settings.N, 30);
  EXPECT_EQ(pf.settings.step, 10.0);
  EXPECT_EQ(pf.settings.imag_step, 1.0);
  EXPECT_EQ(pf.settings.imag_offset, 0.5);
  EXPECT_EQ(pf.settings.strategy, Strategy::Adaptive);
  EXPECT_FALSE(pf.settings.real_mode);
}

TEST(ProblemFile, JsonRenderingIsEquivalent) {
  const ProblemFile a = parse_problem("l = 0.5\nq = sin(x)\ngamma = -2i\nM = 1000\nreal_mode = false\n");
  const ProblemFile b = parse_problem(R"js({"l": 0.5, "q": "sin(x)", "gamma": "-2i", "M": 1000, "real_mode": false})js");
  EXPECT_EQ(a.spec.l, b.spec.l);
  EXPECT_EQ(a.spec.q, b.spec.q);
  EXPECT_EQ(a.spec.gamma, b.spec.gamma);
  EXPECT_EQ(a.settings.M, b.settings.M);
  EXPECT_EQ(a.settings.real_mode, b.settings.real_mode);
}

TEST(ProblemFile, RenderParsesBack) {
  ProblemFile pf = parse_problem("l = 1/3\na = pi\nq = 1/x + sin(x)\nalpha = -1\nbeta = 0.1-0.7i\nu0 = x^(4/3)\ndu0 = 4/3*x^(1/3)\n"
                                 "delta = 0.5-1i\ncount = 7\n");
  const ProblemFile back = parse_problem(render_problem(pf));
  EXPECT_EQ(back.spec.l, pf.spec.l);
  EXPECT_EQ(back.spec.a, pf.spec.a);
  EXPECT_EQ(back.spec.q, pf.spec.q);
  EXPECT_EQ(back.spec.beta, pf.spec.beta);
  EXPECT_EQ(*back.spec.u0, *pf.spec.u0);
  EXPECT_EQ(back.settings.delta, pf.settings.delta);
  EXPECT_EQ(back.settings.count, 7);
  const ProblemFile j = parse_problem(problem_json(pf).dump());
  EXPECT_EQ(j.spec.q, pf.spec.q);
  EXPECT_EQ(j.settings.count, 7);
}

TEST(ProblemFile, UnknownAndDuplicateKeysAreRejected) {
  EXPECT_THROW(parse_problem("l = 1\nfoo = 2\n"), ParseError);
  EXPECT_THROW(parse_problem("l = 1\nl = 2\n"), ParseError);
  EXPECT_THROW(parse_problem(R"({"bar": 1})"), ParseError);
  EXPECT_THROW(parse_problem("l 1\n"), ParseError);
  EXPECT_THROW(parse_problem("N = 4.5\n"), ParseError);
  EXPECT_THROW(parse_problem("strategy = random\n"), ParseError);
}

TEST(ProblemFile, ExpressionErrorsReportFileOffsets) {
  const std::string text = "l = 0\nq = sin(x\n";
  try {
    parse_problem(text);
    FAIL() << "no error";
  } catch (const ParseError& e) {
    // "sin(x" starts at byte 10 and ends at byte 15, where ')' is missing.
    EXPECT_EQ(e.offset(), 15u);
    EXPECT_NE(std::string(e.what()).find("q:"), std::string::npos);
  }
}

TEST(Format, FifteenSignificantDigits) {
  EXPECT_EQ(fmt(12.187139468095112), "12.1871394680951");
  EXPECT_EQ(fmt_complex(cplx(1.5, -2.0)), "1.5-2i");
  EXPECT_EQ(round15(1.0 / 3.0), 0.333333333333333);
}

TEST(Cli, SolveBesselFirstRow) {
  const Outcome r = run("solve " + kBessel + " --count 2");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_NE(row.find("12.1871394680951"), std::string::npos) << row;
}

TEST(Cli, OutputsAreDeterministic) {
  const Outcome a = run("solve " + kBessel + " --count 3 --format json");
  const Outcome b = run("solve " + kBessel + " --count 3 --format json");
  ASSERT_EQ(a.code, 0);
  const json ja = json::parse(a.out), jb = json::parse(b.out);
  EXPECT_EQ(ja["eigenvalues"], jb["eigenvalues"]);
  EXPECT_EQ(ja["centers"], jb["centers"]);
}

TEST(Cli, MalformedExpressionExitsWithParseCode) {
  const fs::path p = write("bad.txt", "l = 0\nq = 1/(x+\n");
  const Outcome r = run("solve " + p.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("offset"), std::string::npos) << r.err;
}

TEST(Cli, InvalidProblemExitsWithValidateCode) {
  const fs::path p = write("neg.txt", "a = -1\n");
  EXPECT_EQ(run("validate " + p.string()).code, 3);
  EXPECT_EQ(run("solve " + p.string()).code, 3);
}

TEST(Cli, UnusableSeedExitsWithU0Code) {
  const fs::path p = write("seed.txt", "l = 0\nu0 = x*(x-1/2)\ndu0 = 2*x-1/2\n");
  EXPECT_EQ(run("solve " + p.string()).code, 4);
}

TEST(Cli, SolverFailureExitsWithSolverCode) {
  // The next centre is far outside the reach of the series.
  const fs::path p = write("far.txt", "l = 0\nM = 1000\nstrategy = adaptive\ndelta = 1e200\nreal_mode = false\ncount = 2\n");
  EXPECT_EQ(run("solve " + p.string()).code, 5);
}

TEST(Cli, EigenfunctionFilesForReciprocal) {
  const fs::path dir = scratch() / "reciprocal";
  const Outcome r = run("solve " + std::string(SPPS_PROBLEMS) + "/reciprocal.txt --eigenfunctions 1,2,3,4,5,6,7,8,9,10 --out-dir " + dir.string());
  ASSERT_EQ(r.code, 0) << r.err;
  for (int k = 1; k <= 10; ++k) {
    const fs::path f = dir / ("eigenfunction_" + std::to_string(k) + ".csv");
    ASSERT_TRUE(fs::exists(f)) << f;
    const auto rows = csv_rows(slurp(f));
    ASSERT_GT(rows.size(), 100u);
    EXPECT_EQ(rows.front()[0], 0.0);
    EXPECT_EQ(rows.back()[0], 1.0);
    // Dirichlet condition at x = 1, relative to the largest sample.
    double big = 0.0;
    for (const auto& row : rows) big = std::max(big, std::hypot(row[1], row[2]));
    EXPECT_LE(std::hypot(rows.back()[1], rows.back()[2]), 1e-9 * big) << k;
  }
  EXPECT_TRUE(fs::exists(dir / "eigenvalues.txt"));
  const json j = json::parse(slurp(dir / "eigenvalues.json"));
  EXPECT_EQ(j["eigenvalues"].size(), 10u);
}

// q = 0, u0 = x^{l+1}: X(2k) = (-x^2/4)^k / (k! (l+3/2)_k) and
// X(2k-1) = -x^{2l+2} d/dx X(2k).
TEST(Cli, PowersMatchTheBesselClosedForm) {
  const Outcome r = run("powers " + kBessel + " --N 3 --M 1000 --every 10");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 101u);
  const double l = 0.25;
  for (const auto& row : rows) {
    const double x = row[1];
    if (x < 0.1) continue;
    for (int k = 0; k <= 3; ++k) {
      const double even = std::pow(-x * x / 4.0, k) / (std::tgamma(k + 1.0) * static_cast<double>(bench::pochhammer(l + 1.5, k)));
      EXPECT_NEAR(row[2 + 4 * k], even, 1e-12 * std::max(1e-3, std::abs(even))) << "x=" << x << " k=" << k;
      if (k == 0) continue;
      const double odd = -std::pow(x, 2 * l + 2) * 2.0 * k * even / x;
      EXPECT_NEAR(row[2 + 2 * (2 * k - 1)], odd, 1e-12 * std::max(1e-3, std::abs(odd))) << "x=" << x << " k=" << k;
    }
  }
}

TEST(Cli, TransmuteIsTheIdentityWithoutPotential) {
  const Outcome r = run("transmute " + kBessel + " --kmax 4 --M 2000 --every 20");
  ASSERT_EQ(r.code, 0) << r.err;
  for (const auto& row : csv_rows(r.out)) {
    const double x = row[0];
    for (int k = 0; k <= 4; ++k) {
      const double want = std::pow(x, 2 * k + 1.25);
      EXPECT_NEAR(row[1 + 2 * k], want, 1e-12 * std::max(1.0, want)) << "x=" << x << " k=" << k;
      EXPECT_EQ(row[2 + 2 * k], 0.0);
    }
  }
}

TEST(Cli, BenchSingleCaseReportsPass) {
  const Outcome r = run("bench reciprocal --count 1 --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_LE(j["rows"][0]["error"].get<double>(), 1e-10);
}

TEST(Cli, BenchUnknownCaseIsAValidationError) { EXPECT_EQ(run("bench nope").code, 3); }

TEST(Cli, UnknownFlagIsAParseError) { EXPECT_EQ(run("solve " + kBessel + " --bogus").code, 2); }
