#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spps/cli.hpp"

int main(int argc, char** argv) {
  using namespace spps;
  CLI::App app{"Eigenvalues of perturbed Bessel equations by spectral parameter power series"};
  app.require_subcommand(1);

  cli::SolveFlags sf;
  std::string path;
  auto* solve = app.add_subcommand("solve", "solve a problem file");
  solve->add_option("problem", path, "problem file")->required();
  solve->add_option("--N", sf.N, "number of formal power pairs");
  solve->add_option("--M", sf.M, "grid panels (multiple of 5)");
  solve->add_option("--strategy", sf.strategy, "linear or adaptive")->check(CLI::IsMember({"linear", "adaptive"}));
  solve->add_option("--shift", sf.shift, "linear schedule \"step,imag_step[,imag_offset]\"");
  solve->add_option("--delta", sf.delta, "adaptive offset, e.g. -1i");
  solve->add_option("--count", sf.count, "eigenvalues wanted");
  solve->add_flag("--real-mode,!--complex-mode", sf.real_mode, "keep only (nearly) real roots");
  solve->add_flag("--strict", sf.strict, "bound violations are errors");
  solve->add_option("--out-dir", sf.out_dir, "directory for tables, eigenfunctions and dumps");
  solve->add_option("--format", sf.format, "stdout format")->check(CLI::IsMember({"table", "json", "csv"}));
  solve->add_option("--eigenfunctions", sf.eigenfunctions, "indices k1,k2,... to write as CSV")->delimiter(',');
  solve->add_flag("--dump-powers", sf.dump_powers, "write the powers of the first centre as CSV");

  std::string bench_id = "all", bench_format = "table", bench_out;
  bench::Overrides bo;
  auto* bench = app.add_subcommand("bench", "run built-in benchmarks");
  bench->add_option("id", bench_id, "case id or all");
  bench->add_option("--N", bo.N);
  bench->add_option("--M", bo.M);
  bench->add_option("--count", bo.count, "compare eigenvalues up to this index");
  bench->add_option("--format", bench_format)->check(CLI::IsMember({"table", "json", "csv"}));
  bench->add_option("--out-dir", bench_out, "write one JSON report per case");

  std::optional<int> pN;
  std::optional<std::size_t> pM;
  std::size_t every = 0;
  auto* powers = app.add_subcommand("powers", "formal powers at the seed as CSV");
  powers->add_option("problem", path)->required();
  powers->add_option("--N", pN);
  powers->add_option("--M", pM);
  powers->add_option("--every", every, "row stride (default about 2000 rows)");

  int kmax = 5;
  auto* transmute = app.add_subcommand("transmute", "images of x^(2k+l+1) under the transmutation as CSV");
  transmute->add_option("problem", path)->required();
  transmute->add_option("--kmax", kmax);
  transmute->add_option("--M", pM);
  transmute->add_option("--every", every);

  std::string vformat = "table";
  auto* val = app.add_subcommand("validate", "check a problem file and its particular solution");
  val->add_option("problem", path)->required();
  val->add_option("--format", vformat)->check(CLI::IsMember({"table", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParse;
  }

  if (*solve) return cli::cmd_solve(path, sf, std::cout, std::cerr);
  if (*bench) return cli::cmd_bench(bench_id, bo, bench_format, bench_out, std::cout, std::cerr);
  if (*powers) return cli::cmd_powers(path, pN, pM, every, std::cout, std::cerr);
  if (*transmute) return cli::cmd_transmute(path, kmax, pM, every, std::cout, std::cerr);
  if (*val) return cli::cmd_validate(path, vformat, std::cout, std::cerr);
  return kExitGeneric;
}
