// Copyright (c) 2026 The cieig developers.
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: solve one problem, run a benchmark sweep, run
// the verification suite, sample the rational filter, or emit a generated
// problem to a file.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cieig/cieig.hpp"

namespace {

using namespace cieig;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitSolverError = 2;

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> sets;  // key=value overrides
};

ExperimentConfig build_config(const CommonFlags& flags) {
  ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = load_experiment_config(flags.config_path);
  for (const std::string& kv : flags.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects key=value, got \"" + kv + "\"");
    apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "key=value config file");
  cmd->add_option("--set", flags.sets,
                  "config override key=value (repeatable; wins over the file)");
}

/// Axis sweep spec "real:lo:hi:count" or "imag:lo:hi:count".
std::vector<cxd> parse_axis(const std::string& text) {
  const auto parts = detail::split(text, ':');
  if (parts.size() != 4)
    throw ConfigError("axis: expected real:lo:hi:count or imag:lo:hi:count");
  const double lo = detail::parse_double(parts[1], "axis.lo");
  const double hi = detail::parse_double(parts[2], "axis.hi");
  const long long count = detail::parse_int(parts[3], "axis.count");
  if (count < 1) throw ConfigError("axis: count must be >= 1");
  std::vector<cxd> samples;
  samples.reserve(count);
  for (long long i = 0; i < count; ++i) {
    const double t =
        count == 1 ? lo : lo + (hi - lo) * double(i) / double(count - 1);
    if (parts[0] == "real")
      samples.emplace_back(t, 0.0);
    else if (parts[0] == "imag")
      samples.emplace_back(0.0, t);
    else
      throw ConfigError("axis: unknown axis kind \"" + parts[0] + "\"");
  }
  return samples;
}

int run_solve(const ExperimentConfig& cfg0, index_t l, index_t m,
              const std::string& method_name_str) {
  ExperimentConfig cfg = cfg0;
  auto method = method_from_name(method_name_str);
  if (!method) throw ConfigError("unknown method: " + method_name_str);

  Problem prob = make_problem(cfg.problem, cfg.seed);
  SolverConfig scfg;
  scfg.l = l;
  scfg.m = m;
  scfg.n_points = cfg.n_points;
  scfg.rule_kind = cfg.rule_kind;
  scfg.rank_cutoff = cfg.delta;
  scfg.seed = cfg.seed;
  scfg.method = *method;
  scfg.refine_ell = cfg.refine_ell;
  scfg.max_feast_iters = cfg.max_feast_iters;
  scfg.feast_tol = cfg.feast_tol;
  scfg.moments.threads = cfg.threads;
  scfg.moments.compensated_sum = cfg.kahan;
  scfg.moments.half_contour = cfg.half_contour;

  EigenResult res = solve(prob.pencil, cfg.region, scfg);
  if (cfg.margin != 0.0) select_in_region(res.pairs, cfg.region, cfg.margin);

  for (const auto& note : res.notes) std::fprintf(stderr, "note: %s\n", note.c_str());
  std::printf("method=%s mhat=%zu pairs=%zu t_total=%.3fs\n",
              method_name(res.method), static_cast<size_t>(res.rank_used),
              res.pairs.size(), res.timing.t_total);
  for (const auto& p : res.pairs) {
    std::printf("lambda = % .15e %+.15ei   residual = %.3e   %s\n",
                p.value.real(), p.value.imag(), p.residual,
                p.inside ? "inside" : "outside");
  }
  return kExitOk;
}

int run_filter(const ExperimentConfig& cfg, const std::string& axis,
               const std::string& out_path) {
  QuadratureRule rule = build_rule(cfg.region, cfg.rule_kind, cfg.n_points);
  FilterProfile prof = filter_profile(rule, parse_axis(axis));
  std::string csv = "lambda_re,lambda_im,abs_f\n";
  char buf[160];
  for (index_t i = 0; i < prof.sample_points.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17e,%.17e,%.17e\n",
                  prof.sample_points[i].real(), prof.sample_points[i].imag(),
                  prof.magnitudes[i]);
    csv += buf;
  }
  if (out_path.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw ConfigError("cannot open output file: " + out_path);
    os << csv;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contour-integral interior eigensolvers"};
  app.require_subcommand(1);

  CommonFlags solve_flags, bench_flags, verify_flags, filter_flags, gen_flags;

  auto* solve_cmd = app.add_subcommand("solve", "run one solver on one problem");
  add_common(solve_cmd, solve_flags);
  std::string solve_method = "ss_rr";
  index_t solve_l = 4, solve_m = 2;
  solve_cmd->add_option("--method", solve_method, "solver method");
  solve_cmd->add_option("--L", solve_l, "block width");
  solve_cmd->add_option("--M", solve_m, "moment degree");

  auto* bench_cmd = app.add_subcommand("bench", "run a (L,M) x method sweep, CSV out");
  add_common(bench_cmd, bench_flags);

  auto* verify_cmd = app.add_subcommand("verify", "run the numerical verification suite");
  add_common(verify_cmd, verify_flags);
  bool strict = false;
  bool inject_zero_weights = false;
  std::vector<std::uint64_t> verify_seeds;
  verify_cmd->add_flag("--strict", strict, "exit nonzero unless every check passes");
  verify_cmd->add_flag("--inject-zero-weights", inject_zero_weights,
                       "fault injection: zero all quadrature weights (self test)");
  verify_cmd->add_option("--seeds", verify_seeds, "seeds to run (default 1 2 3)");

  auto* filter_cmd = app.add_subcommand("filter", "sample |f(lambda)| along an axis, CSV out");
  add_common(filter_cmd, filter_flags);
  std::string axis = "real:-2:2:401";
  std::string filter_out;
  filter_cmd->add_option("--axis", axis, "real:lo:hi:count or imag:lo:hi:count");
  filter_cmd->add_option("--out", filter_out, "CSV output path (default stdout)");

  auto* gen_cmd = app.add_subcommand("gen", "generate a problem and write it to a file");
  add_common(gen_cmd, gen_flags);
  std::string gen_out;
  bool with_truth = true;
  gen_cmd->add_option("--out", gen_out, "output problem file")->required();
  gen_cmd->add_flag("--with-truth,!--no-truth", with_truth,
                    "include the ground-truth section (default on)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) {
      return run_solve(build_config(solve_flags), solve_l, solve_m, solve_method);
    }
    if (bench_cmd->parsed()) {
      ExperimentConfig cfg = build_config(bench_flags);
      std::vector<ReportRow> rows;
      try {
        rows = run_experiment(cfg);
      } catch (const ConfigError&) {
        throw;
      }
      const std::string csv = format_csv(rows, cfg.timing_output);
      if (cfg.output.empty()) std::fputs(csv.c_str(), stdout);
      for (const auto& row : rows)
        if (row.solver_error)
          std::fprintf(stderr, "solver error (%s, L=%zu, M=%zu): %s\n",
                       method_name(row.method), static_cast<size_t>(row.l),
                       static_cast<size_t>(row.m), row.error.c_str());
      return kExitOk;
    }
    if (verify_cmd->parsed()) {
      ExperimentConfig cfg = build_config(verify_flags);
      VerifyConfig vcfg;
      vcfg.n_points = cfg.n_points;
      vcfg.threads = cfg.threads;
      vcfg.inject_zero_weights = inject_zero_weights;
      if (!verify_seeds.empty()) vcfg.seeds = verify_seeds;
      VerifyReport rep = verify_suite(vcfg);
      std::fputs(format_verify_report(rep).c_str(), stdout);
      return (strict && !rep.all_passed()) ? kExitSolverError : kExitOk;
    }
    if (filter_cmd->parsed()) {
      ExperimentConfig cfg = build_config(filter_flags);
      return run_filter(cfg, axis, filter_out);
    }
    if (gen_cmd->parsed()) {
      ExperimentConfig cfg = build_config(gen_flags);
      Problem prob = make_problem(cfg.problem, cfg.seed);
      write_problem_file(gen_out, prob.pencil,
                         (with_truth && prob.truth) ? &*prob.truth : nullptr);
      std::printf("wrote %s (n=%zu%s)\n", gen_out.c_str(),
                  static_cast<size_t>(prob.pencil.dim()),
                  (with_truth && prob.truth) ? ", with truth" : "");
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const Error& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolverError;
  }
  return kExitOk;
}
