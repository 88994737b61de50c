#pragma once

// Problem files, report formatting and the subcommands behind the `spps`
// executable. Commands write to the given streams and return an exit code.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "spps/bench.hpp"
#include "spps/error.hpp"
#include "spps/expr.hpp"
#include "spps/problem.hpp"
#include "spps/series.hpp"
#include "spps/spectrum.hpp"
#include "spps/usol.hpp"

namespace spps::cli {

using json = nlohmann::json;

struct ProblemFile {
  ProblemSpec spec;
  SolverSettings settings;
};

// ---------------------------------------------------------------- formatting

/// 15 significant digits.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

/// Round-trip precision, used when a problem is written back.
inline std::string fmt_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// "a+bi" literal.
inline std::string fmt_complex(cplx z, bool exact = false) {
  auto f = exact ? fmt_exact : fmt;
  if (z.imag() == 0.0) return f(z.real());
  std::string s = f(z.real());
  s += std::signbit(z.imag()) ? "-" : "+";
  s += f(std::abs(z.imag()));
  s += "i";
  return s;
}

/// A double cut to 15 significant digits, for JSON output.
inline double round15(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(fmt(v));
}

// ------------------------------------------------------------- problem files

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

/// Rethrows a parse error from inside a value with the offset moved to the file.
[[noreturn]] inline void rethrow_at(const ParseError& e, const std::string& key, std::size_t base) {
  std::string msg = e.what();
  const std::size_t cut = msg.rfind(" at offset ");
  if (cut != std::string::npos) msg.resize(cut);
  throw ParseError(key + ": " + msg, base + e.offset());
}

inline Expr parse_expr(const std::string& key, const std::string& v, std::size_t at) {
  try {
    return Expr::parse(v);
  } catch (const ParseError& e) {
    rethrow_at(e, key, at);
  }
}

inline cplx parse_cplx(const std::string& key, const std::string& v, std::size_t at) {
  try {
    return parse_complex(v);
  } catch (const ParseError& e) {
    rethrow_at(e, key, at);
  } catch (const DomainError& e) {
    throw ParseError(key + ": " + e.what(), at);
  }
}

inline double parse_real(const std::string& key, const std::string& v, std::size_t at) {
  const cplx z = parse_cplx(key, v, at);
  if (z.imag() != 0.0) throw ParseError(key + ": real value expected", at);
  return z.real();
}

inline long long parse_int(const std::string& key, const std::string& v, std::size_t at) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) throw ParseError(key + ": integer expected", at);
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v, std::size_t at) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ParseError(key + ": true or false expected", at);
}

inline Strategy parse_strategy(const std::string& v, std::size_t at) {
  if (v == "linear") return Strategy::Linear;
  if (v == "adaptive") return Strategy::Adaptive;
  throw ParseError("strategy: linear or adaptive expected", at);
}

/// "s,d" or "s,d,o": real step, imaginary step, imaginary offset.
inline void parse_shift(SolverSettings& st, const std::string& v, std::size_t at) {
  std::vector<std::string> parts;
  std::size_t from = 0;
  for (;;) {
    const std::size_t comma = v.find(',', from);
    parts.push_back(trim(std::string_view(v).substr(from, comma - from)));
    if (comma == std::string::npos) break;
    from = comma + 1;
  }
  if (parts.size() < 2 || parts.size() > 3) throw ParseError("shift: expected \"step,imag_step\" or \"step,imag_step,imag_offset\"", at);
  st.step = parse_real("shift", parts[0], at);
  st.imag_step = parse_real("shift", parts[1], at);
  if (parts.size() == 3) st.imag_offset = parse_real("shift", parts[2], at);
}

inline void set_key(ProblemFile& pf, const std::string& key, const std::string& v, std::size_t at) {
  ProblemSpec& p = pf.spec;
  SolverSettings& st = pf.settings;
  if (key == "l") p.l = parse_real(key, v, at);
  else if (key == "a") p.a = parse_real(key, v, at);
  else if (key == "alpha") p.alpha = parse_real(key, v, at);
  else if (key == "q") p.q = parse_expr(key, v, at);
  else if (key == "r0") p.r0 = parse_expr(key, v, at);
  else if (key == "r1") p.r1 = parse_expr(key, v, at);
  else if (key == "beta") p.beta = parse_cplx(key, v, at);
  else if (key == "gamma") p.gamma = parse_cplx(key, v, at);
  else if (key == "u0") p.u0 = parse_expr(key, v, at);
  else if (key == "du0") p.du0 = parse_expr(key, v, at);
  else if (key == "N") st.N = static_cast<int>(parse_int(key, v, at));
  else if (key == "M") {
    const long long m = parse_int(key, v, at);
    if (m < 0) throw ParseError("M: non-negative integer expected", at);
    st.M = static_cast<std::size_t>(m);
  } else if (key == "strategy") st.strategy = parse_strategy(v, at);
  else if (key == "shift") parse_shift(st, v, at);
  else if (key == "shift_offset") st.imag_offset = parse_real(key, v, at);
  else if (key == "delta") st.delta = parse_cplx(key, v, at);
  else if (key == "count") st.count = static_cast<int>(parse_int(key, v, at));
  else if (key == "real_mode") st.real_mode = parse_bool(key, v, at);
  else if (key == "J_regularization") st.J = static_cast<int>(parse_int(key, v, at));
  else if (key == "strict") st.strict = parse_bool(key, v, at);
  else throw ParseError("unknown key '" + key + "'", at);
}

}  // namespace detail

/// key = value lines (`#` starts a comment) or the equivalent flat JSON object.
inline ProblemFile parse_problem(std::string_view text) {
  ProblemFile pf;
  std::map<std::string, bool> seen;
  auto once = [&](const std::string& key, std::size_t at) {
    if (seen[key]) throw ParseError("duplicate key '" + key + "'", at);
    seen[key] = true;
  };

  std::size_t first = 0;
  while (first < text.size() && std::isspace(static_cast<unsigned char>(text[first]))) ++first;
  if (first < text.size() && text[first] == '{') {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte > 0 ? e.byte - 1 : 0);
    }
    if (!doc.is_object()) throw ParseError("JSON problem must be an object", first);
    for (const auto& [key, val] : doc.items()) {
      std::string v;
      if (val.is_string()) v = val.get<std::string>();
      else if (val.is_boolean()) v = val.get<bool>() ? "true" : "false";
      else if (val.is_number_integer()) v = std::to_string(val.get<long long>());
      else if (val.is_number()) v = fmt_exact(val.get<double>());
      else throw ParseError("value of '" + key + "' must be a string, number or boolean", 0);
      once(key, 0);
      detail::set_key(pf, key, v, 0);
    }
    return pf;
  }

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    if (!detail::trim(line).empty()) {
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) throw ParseError("expected key = value", pos);
      const std::string key = detail::trim(line.substr(0, eq));
      std::size_t vstart = eq + 1;
      while (vstart < line.size() && std::isspace(static_cast<unsigned char>(line[vstart]))) ++vstart;
      std::string value = detail::trim(line.substr(vstart));
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
        value = value.substr(1, value.size() - 2);
        ++vstart;
      }
      if (key.empty()) throw ParseError("missing key", pos);
      once(key, pos);
      detail::set_key(pf, key, value, pos + vstart);
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  return pf;
}

inline ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read problem file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

inline std::vector<std::pair<std::string, std::string>> problem_entries(const ProblemFile& pf) {
  const ProblemSpec& p = pf.spec;
  const SolverSettings& st = pf.settings;
  std::vector<std::pair<std::string, std::string>> kv = {
      {"l", fmt_exact(p.l)},        {"a", fmt_exact(p.a)},   {"alpha", fmt_exact(p.alpha)},
      {"q", p.q.to_string()},       {"r0", p.r0.to_string()}, {"r1", p.r1.to_string()},
      {"beta", fmt_complex(p.beta, true)}, {"gamma", fmt_complex(p.gamma, true)}};
  if (p.u0) kv.emplace_back("u0", p.u0->to_string());
  if (p.du0) kv.emplace_back("du0", p.du0->to_string());
  kv.emplace_back("N", std::to_string(st.N));
  kv.emplace_back("M", std::to_string(st.M));
  kv.emplace_back("strategy", to_string(st.strategy));
  kv.emplace_back("shift", fmt_exact(st.step) + "," + fmt_exact(st.imag_step) + "," + fmt_exact(st.imag_offset));
  kv.emplace_back("delta", fmt_complex(st.delta, true));
  kv.emplace_back("count", std::to_string(st.count));
  kv.emplace_back("real_mode", st.real_mode ? "true" : "false");
  kv.emplace_back("J_regularization", std::to_string(st.J));
  kv.emplace_back("strict", st.strict ? "true" : "false");
  return kv;
}

inline std::string render_problem(const ProblemFile& pf) {
  std::string out;
  for (const auto& [k, v] : problem_entries(pf)) out += k + " = " + v + "\n";
  return out;
}

inline json problem_json(const ProblemFile& pf) {
  json j = json::object();
  for (const auto& [k, v] : problem_entries(pf)) j[k] = v;
  j["N"] = pf.settings.N;
  j["M"] = pf.settings.M;
  j["count"] = pf.settings.count;
  j["J_regularization"] = pf.settings.J;
  j["real_mode"] = pf.settings.real_mode;
  j["strict"] = pf.settings.strict;
  return j;
}

// ------------------------------------------------------------------ reports

inline json cplx_json(cplx z) { return json::array({round15(z.real()), round15(z.imag())}); }

inline json result_json(const EigenResult& R) {
  json j;
  j["eigenvalues"] = json::array();
  for (std::size_t i = 0; i < R.eigenvalues.size(); ++i) {
    const Eigenvalue& e = R.eigenvalues[i];
    j["eigenvalues"].push_back({{"n", i + 1},
                                {"re", round15(e.lambda.real())},
                                {"im", round15(e.lambda.imag())},
                                {"residual", round15(e.residual)},
                                {"trusted", e.trusted},
                                {"trust_radius", round15(e.trust_radius)},
                                {"center", cplx_json(e.center)},
                                {"shift_index", e.shift_index}});
  }
  j["centers"] = json::array();
  for (std::size_t i = 0; i < R.chain.size(); ++i)
    j["centers"].push_back({{"center", cplx_json(R.chain[i])}, {"trust_radius", round15(R.trust_radii[i])}});
  j["u0_source"] = to_string(R.u0_source);
  j["seed_lambda"] = cplx_json(R.seed_lambda);
  j["N"] = R.settings.N;
  j["M"] = R.settings.M;
  j["strategy"] = to_string(R.settings.strategy);
  j["warnings"] = R.warnings;
  j["seconds"] = round15(R.seconds);
  return j;
}

inline std::string result_table(const EigenResult& R) {
  std::ostringstream o;
  o << std::setw(4) << "n" << "  " << std::setw(22) << "Re lambda" << "  " << std::setw(22) << "Im lambda" << "  "
    << std::setw(10) << "residual" << "  " << std::setw(7) << "trusted" << "  center\n";
  for (std::size_t i = 0; i < R.eigenvalues.size(); ++i) {
    const Eigenvalue& e = R.eigenvalues[i];
    char res[16];
    std::snprintf(res, sizeof res, "%.2e", e.residual);
    o << std::setw(4) << i + 1 << "  " << std::setw(22) << fmt(e.lambda.real()) << "  " << std::setw(22) << fmt(e.lambda.imag())
      << "  " << std::setw(10) << res << "  " << std::setw(7) << (e.trusted ? "yes" : "no") << "  " << fmt_complex(e.center)
      << "\n";
  }
  return o.str();
}

inline std::string result_csv(const EigenResult& R) {
  std::ostringstream o;
  o << "n,re,im,residual,trusted,trust_radius,center_re,center_im\n";
  for (std::size_t i = 0; i < R.eigenvalues.size(); ++i) {
    const Eigenvalue& e = R.eigenvalues[i];
    o << i + 1 << "," << fmt(e.lambda.real()) << "," << fmt(e.lambda.imag()) << "," << fmt(e.residual) << ","
      << (e.trusted ? 1 : 0) << "," << fmt(e.trust_radius) << "," << fmt(e.center.real()) << "," << fmt(e.center.imag()) << "\n";
  }
  return o.str();
}

inline json bench_json(const bench::BenchmarkReport& rep) {
  json j;
  j["id"] = rep.bench.id;
  j["title"] = rep.bench.title;
  j["pass"] = rep.pass;
  j["sqrt_values"] = rep.bench.sqrt_values;
  j["rows"] = json::array();
  for (const auto& r : rep.rows)
    j["rows"].push_back({{"n", r.n},
                         {"found", r.found},
                         {"computed", cplx_json(r.computed)},
                         {"reference", cplx_json(r.reference)},
                         {"error", round15(r.error)},
                         {"tolerance", r.tol},
                         {"relative", r.relative},
                         {"pass", r.pass},
                         {"source", r.source}});
  j["result"] = result_json(rep.result);
  return j;
}

inline std::string bench_table(const bench::BenchmarkReport& rep) {
  std::ostringstream o;
  o << rep.bench.id << ": " << rep.bench.title << "\n";
  o << std::setw(4) << "n" << "  " << std::setw(36) << (rep.bench.sqrt_values ? "sqrt(lambda)" : "lambda") << "  " << std::setw(36)
    << "reference" << "  " << std::setw(9) << "error" << "  " << std::setw(7) << "tol" << "  ok\n";
  for (const auto& r : rep.rows) {
    char err[16], tol[16];
    std::snprintf(err, sizeof err, "%.2e", r.error);
    std::snprintf(tol, sizeof tol, "%.0e", r.tol);
    o << std::setw(4) << r.n << "  " << std::setw(36) << (r.found ? fmt_complex(r.computed) : std::string("missing")) << "  "
      << std::setw(36) << fmt_complex(r.reference) << "  " << std::setw(9) << (r.found ? err : "-") << "  " << std::setw(7)
      << tol << (r.relative ? "r" : "a") << " " << (r.pass ? "PASS" : "FAIL") << "\n";
  }
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.2f", rep.result.seconds);
  o << "centres " << rep.result.chain.size() << ", " << secs << " s, " << (rep.pass ? "PASS" : "FAIL") << "\n";
  return o.str();
}

// ------------------------------------------------------------------ commands

struct SolveFlags {
  std::optional<int> N;
  std::optional<std::size_t> M;
  std::optional<std::string> strategy;
  std::optional<std::string> shift;
  std::optional<std::string> delta;
  std::optional<bool> real_mode;
  std::optional<int> count;
  bool strict = false;
  std::string out_dir;
  std::string format = "table";
  std::vector<int> eigenfunctions;
  bool dump_powers = false;
};

inline void apply(ProblemFile& pf, const SolveFlags& f) {
  SolverSettings& st = pf.settings;
  if (f.N) st.N = *f.N;
  if (f.M) st.M = *f.M;
  if (f.strategy) st.strategy = detail::parse_strategy(*f.strategy, 0);
  if (f.shift) detail::parse_shift(st, *f.shift, 0);
  if (f.delta) st.delta = detail::parse_cplx("delta", *f.delta, 0);
  if (f.real_mode) st.real_mode = *f.real_mode;
  if (f.count) st.count = *f.count;
  if (f.strict) st.strict = true;
}

namespace detail {

inline void check_format(const std::string& f) {
  if (f != "table" && f != "json" && f != "csv") throw ValidationError("format", "table, json or csv expected");
}

inline std::filesystem::path out_path(const std::string& dir, const std::string& name) {
  const std::filesystem::path d = dir.empty() ? std::filesystem::path(".") : std::filesystem::path(dir);
  std::filesystem::create_directories(d);
  return d / name;
}

inline void write_file(const std::filesystem::path& p, const std::string& body) {
  std::ofstream o(p, std::ios::binary);
  if (!o) throw Error("cannot write '" + p.string() + "'");
  o << body;
}

/// Roughly `rows` samples of an M-panel grid, always including both ends.
inline std::size_t stride_for(std::size_t M, std::size_t rows = 2000) { return std::max<std::size_t>(1, M / rows); }

inline std::string powers_csv(const FormalPowerSet& Z, std::size_t stride) {
  std::ostringstream o;
  o << "node,x";
  const int top = 2 * Z.order;
  for (int n = 0; n <= top; ++n) o << ",re_" << n << ",im_" << n;
  o << "\n";
  const Grid& g = Z.grid();
  for (std::size_t j = 0; j < g.size(); j += stride) {
    o << j << "," << fmt(g.x(j));
    for (int n = 0; n <= top; ++n) o << "," << fmt(Z[n][j].real()) << "," << fmt(Z[n][j].imag());
    o << "\n";
    if (j + stride >= g.size() && j + 1 != g.size()) j = g.size() - 1 - stride;
  }
  return o.str();
}

inline std::string function_csv(const SeriesValue& v, std::size_t stride) {
  std::ostringstream o;
  o << "x,re_u,im_u,re_du,im_du\n";
  const Grid& g = *v.u.grid;
  for (std::size_t j = 0; j < g.size(); j += stride) {
    o << fmt(g.x(j)) << "," << fmt(v.u[j].real()) << "," << fmt(v.u[j].imag()) << "," << fmt(v.du[j].real()) << ","
      << fmt(v.du[j].imag()) << "\n";
    if (j + stride >= g.size() && j + 1 != g.size()) j = g.size() - 1 - stride;
  }
  return o.str();
}

template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitGeneric;
  }
}

}  // namespace detail

inline int cmd_solve(const std::string& path, const SolveFlags& f, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    detail::check_format(f.format);
    ProblemFile pf = load_problem(path);
    apply(pf, f);
    for (int k : f.eigenfunctions)
      if (k < 1) throw ValidationError("eigenfunctions", "indices start at 1");
    if (!f.eigenfunctions.empty()) {
      pf.settings.eigenfunctions = true;
      pf.settings.count = std::max(pf.settings.count, *std::max_element(f.eigenfunctions.begin(), f.eigenfunctions.end()));
    }
    std::optional<std::string> dump;
    const std::size_t stride = detail::stride_for(pf.settings.M);
    auto on_center = [&](const FormalPowerSet& Z, const ParticularSolution&, const CharPoly&) {
      if (f.dump_powers && !dump) dump = detail::powers_csv(Z, stride);
    };
    const EigenResult R = solve(pf.spec, pf.settings, on_center);

    for (const std::string& w : R.warnings) err << "warning: " << w << "\n";
    if (f.format == "json") out << result_json(R).dump(2) << "\n";
    else if (f.format == "csv") out << result_csv(R);
    else out << result_table(R);

    if (!f.out_dir.empty()) {
      detail::write_file(detail::out_path(f.out_dir, "eigenvalues.txt"), result_table(R));
      detail::write_file(detail::out_path(f.out_dir, "eigenvalues.json"), result_json(R).dump(2) + "\n");
    }
    if (dump) detail::write_file(detail::out_path(f.out_dir, "powers.csv"), *dump);
    for (int k : f.eigenfunctions) {
      if (k > static_cast<int>(R.eigenvalues.size())) {
        err << "warning: eigenvalue " << k << " was not found; no eigenfunction written\n";
        continue;
      }
      const Eigenvalue& e = R.eigenvalues[static_cast<std::size_t>(k - 1)];
      detail::write_file(detail::out_path(f.out_dir, "eigenfunction_" + std::to_string(k) + ".csv"),
                         detail::function_csv(*e.function, stride));
    }
    return static_cast<int>(kExitOk);
  });
}

inline int cmd_bench(const std::string& which, const bench::Overrides& o, const std::string& format, const std::string& out_dir,
                     std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    detail::check_format(format);
    std::vector<std::string> ids;
    if (which == "all") ids = bench::case_ids();
    else ids.push_back(which);
    bool all_pass = true;
    json summary = json::array();
    std::vector<std::pair<std::string, bool>> lines;
    for (const std::string& id : ids) {
      const bench::BenchmarkReport rep = bench::run_benchmark(id, o);
      all_pass = all_pass && rep.pass;
      const json j = bench_json(rep);
      if (!out_dir.empty()) detail::write_file(detail::out_path(out_dir, "bench_" + id + ".json"), j.dump(2) + "\n");
      if (format == "json") summary.push_back(j);
      else if (format == "csv") {
        if (lines.empty()) out << "id,n,computed_re,computed_im,reference_re,reference_im,error,tolerance,pass\n";
        for (const auto& r : rep.rows)
          out << id << "," << r.n << "," << fmt(r.computed.real()) << "," << fmt(r.computed.imag()) << "," << fmt(r.reference.real())
              << "," << fmt(r.reference.imag()) << "," << fmt(r.error) << "," << fmt(r.tol) << "," << (r.pass ? 1 : 0) << "\n";
      } else {
        out << bench_table(rep) << "\n";
      }
      lines.emplace_back(id, rep.pass);
    }
    if (format == "json") out << (ids.size() == 1 ? summary[0] : summary).dump(2) << "\n";
    else if (format == "table" && ids.size() > 1) {
      out << "summary\n";
      for (const auto& [id, ok] : lines) out << "  " << std::left << std::setw(20) << id << std::right << (ok ? "PASS" : "FAIL") << "\n";
    }
    return all_pass ? static_cast<int>(kExitOk) : static_cast<int>(kExitGeneric);
  });
}

namespace detail {

inline ParticularSolution seed_for(const ProblemFile& pf, const GridPtr& g, std::vector<std::string>& warnings) {
  PowerOptions opt;
  opt.J = pf.settings.J;
  opt.strict = pf.settings.strict;
  return spps::detail::initial_u0(pf.spec, g, pf.settings.N, opt, warnings);
}

}  // namespace detail

/// Formal powers at the seed of the problem, as CSV.
inline int cmd_powers(const std::string& path, std::optional<int> N, std::optional<std::size_t> M, std::size_t every,
                      std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    ProblemFile pf = load_problem(path);
    if (N) pf.settings.N = *N;
    if (M) pf.settings.M = *M;
    validate(pf.spec);
    const GridPtr g = make_grid(pf.spec.a, pf.settings.M);
    std::vector<std::string> warnings;
    const ParticularSolution s = detail::seed_for(pf, g, warnings);
    PowerOptions opt;
    opt.J = pf.settings.J;
    opt.strict = pf.settings.strict;
    const FormalPowerSet Z = compute_Z(pf.spec, s.u0, s.du0, s.lambda0, pf.settings.N, opt);
    for (const std::string& w : warnings) err << "warning: " << w << "\n";
    for (const std::string& w : Z.warnings) err << "warning: " << w << "\n";
    out << detail::powers_csv(Z, every == 0 ? detail::stride_for(pf.settings.M) : every);
    return static_cast<int>(kExitOk);
  });
}

/// Transmutation images T[x^{2k+l+1}], k = 0..kmax, as CSV.
inline int cmd_transmute(const std::string& path, int kmax, std::optional<std::size_t> M, std::size_t every, std::ostream& out,
                         std::ostream& err) {
  return detail::guarded(err, [&] {
    ProblemFile pf = load_problem(path);
    if (M) pf.settings.M = *M;
    if (kmax < 0) throw ValidationError("kmax", "must be non-negative");
    validate(pf.spec);
    const GridPtr g = make_grid(pf.spec.a, pf.settings.M);
    std::vector<std::string> warnings;
    const ParticularSolution s = detail::seed_for(pf, g, warnings);
    if (s.lambda0 != cplx(0.0)) throw U0Error("no particular solution at lambda = 0; transmutation images are unavailable");
    const FormalPowerSet X = compute_X(pf.spec, s.u0, s.du0, std::max(kmax, 1));
    std::vector<GridFunction> img;
    for (int k = 0; k <= kmax; ++k) img.push_back(transmute_power(X, s, k));
    for (const std::string& w : warnings) err << "warning: " << w << "\n";
    out << "x";
    for (int k = 0; k <= kmax; ++k) out << ",re_" << k << ",im_" << k;
    out << "\n";
    const std::size_t stride = every == 0 ? detail::stride_for(pf.settings.M) : every;
    for (std::size_t j = 0; j < g->size(); j += stride) {
      out << fmt(g->x(j));
      for (const GridFunction& f : img) out << "," << fmt(f[j].real()) << "," << fmt(f[j].imag());
      out << "\n";
      if (j + stride >= g->size() && j + 1 != g->size()) j = g->size() - 1 - stride;
    }
    return static_cast<int>(kExitOk);
  });
}

/// Parses, validates and builds the particular solution; reports what was found.
inline int cmd_validate(const std::string& path, const std::string& format, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    detail::check_format(format);
    const ProblemFile pf = load_problem(path);
    const ValidationReport rep = validate(pf.spec);
    const GridPtr g = make_grid(pf.spec.a, pf.settings.M);
    std::vector<std::string> warnings = rep.warnings;
    const ParticularSolution s = detail::seed_for(pf, g, warnings);
    for (const std::string& w : s.warnings) warnings.push_back(w);
    if (format == "json") {
      json j;
      j["problem"] = problem_json(pf);
      j["C"] = round15(rep.C);
      j["u0_source"] = to_string(s.source);
      j["seed_lambda"] = cplx_json(s.lambda0);
      j["u0_at_a"] = cplx_json(s.u0[g->size() - 1]);
      j["warnings"] = warnings;
      out << j.dump(2) << "\n";
    } else {
      out << render_problem(pf);
      out << "# C = " << fmt(rep.C) << "\n";
      out << "# u0: " << to_string(s.source) << " at lambda = " << fmt_complex(s.lambda0) << ", u0(a) = " << fmt_complex(s.u0[g->size() - 1])
          << "\n";
      for (const std::string& w : warnings) out << "# warning: " << w << "\n";
    }
    return static_cast<int>(kExitOk);
  });
}

}  // namespace spps::cli
