// Copyright (c) 2026 The cieig developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cieig/forge.hpp"
#include "cieig/solvers.hpp"

namespace cieig {

// ---------------------------------------------------------------------------
// problem specification

struct SymmetricDenseParams {
  index_t n = 500;
  index_t m = 40;
  double inside_lo = -1.0, inside_hi = 1.0;
  double outside_lo = 1.5, outside_hi = 5.0;
};

struct ProblemSpec {
  enum class Kind { jordan, symmetric, file };
  Kind kind = Kind::symmetric;
  JordanSpec jordan;
  SymmetricDenseParams sym;
  std::string path;
};

struct ExperimentConfig {
  ProblemSpec problem;
  ContourRegion region = ContourRegion::ellipse(cxd(0.0, 0.0), 1.0, 0.1);
  RuleKind rule_kind = RuleKind::trapezoidal;
  index_t n_points = 32;
  std::vector<std::pair<index_t, index_t>> sweep;  // (L, M) with fixed L*M
  std::vector<Method> methods;
  double delta = 1e-14;
  std::uint64_t seed = 1;
  std::string output;
  bool half_contour = false;
  bool timing_output = true;  // false: zero the t_* CSV columns (reproducible bytes)
  int threads = 1;
  bool kahan = false;
  index_t refine_ell = 1;
  index_t max_feast_iters = 20;
  double feast_tol = 1e-12;
  double margin = 0.0;

  void validate() const {
    if (sweep.empty()) throw ConfigError("experiment: empty (L, M) sweep");
    const index_t lm = sweep.front().first * sweep.front().second;
    for (const auto& [l, m] : sweep) {
      if (l < 1 || m < 1) throw ConfigError("experiment: L and M must be >= 1");
      if (l * m != lm)
        throw ConfigError("experiment: every sweep cell must keep L*M fixed");
    }
    if (n_points < 2) throw ConfigError("experiment: N must be >= 2");
    if (!(delta >= 0.0) || delta >= 1.0)
      throw ConfigError("experiment: delta must be in [0, 1)");
  }
};

struct ReportRow {
  Method method = Method::ss_rr;
  index_t m = 0, l = 0, mhat = 0;
  double t_lu = 0.0, t_solve = 0.0, t_other = 0.0, t_total = 0.0;
  double max_res = std::numeric_limits<double>::quiet_NaN();
  double min_res = std::numeric_limits<double>::quiet_NaN();
  index_t found = 0;
  bool oracle_match = false;
  bool solver_error = false;
  std::string error;
};

inline constexpr const char* kCsvHeader =
    "method,M,L,mhat,t_lu,t_solve,t_other,t_total,max_res,min_res,found,oracle_match";

inline std::string format_csv(const std::vector<ReportRow>& rows,
                              bool timing_output) {
  std::string out(kCsvHeader);
  out += '\n';
  char buf[512];
  for (const auto& r : rows) {
    const double tl = timing_output ? r.t_lu : 0.0;
    const double ts = timing_output ? r.t_solve : 0.0;
    const double to = timing_output ? r.t_other : 0.0;
    const double tt = timing_output ? r.t_total : 0.0;
    std::snprintf(buf, sizeof buf,
                  "%s,%zu,%zu,%zu,%.6f,%.6f,%.6f,%.6f,%.17e,%.17e,%zu,%d\n",
                  method_name(r.method), static_cast<size_t>(r.m),
                  static_cast<size_t>(r.l), static_cast<size_t>(r.mhat), tl, ts,
                  to, tt, r.max_res, r.min_res, static_cast<size_t>(r.found),
                  r.oracle_match ? 1 : 0);
    out += buf;
  }
  return out;
}

// ---------------------------------------------------------------------------
// problem materialization and files

struct Problem {
  MatrixPencil pencil;
  std::optional<GroundTruth> truth;
};

namespace detail {

/// Attempted definite (Cholesky) factorization; true iff B is numerically
/// positive definite.
inline bool is_positive_definite(const ComplexMatrix& b) {
  const index_t n = b.rows();
  if (n != b.cols()) return false;
  ComplexMatrix l(n, n);
  for (index_t j = 0; j < n; ++j) {
    double diag = b(j, j).real();
    for (index_t k = 0; k < j; ++k) diag -= std::norm(l(j, k));
    if (!(diag > 0.0)) return false;
    const double dj = std::sqrt(diag);
    l(j, j) = dj;
    for (index_t i = j + 1; i < n; ++i) {
      cxd s = b(i, j);
      for (index_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / dj;
    }
  }
  return true;
}

}  // namespace detail

inline void write_problem_file(const std::string& path, const MatrixPencil& pencil,
                               const GroundTruth* truth = nullptr) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open problem file for writing: " + path);
  const index_t n = pencil.dim();
  os << "cieig-problem v1\n";
  os << "n " << n << "\n";
  char buf[64];
  auto write_matrix = [&](const ComplexMatrix& m) {
    for (index_t i = 0; i < m.rows(); ++i) {
      for (index_t j = 0; j < m.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17e %.17e", m(i, j).real(), m(i, j).imag());
        os << buf << (j + 1 < m.cols() ? " " : "");
      }
      os << "\n";
    }
  };
  os << "A\n";
  write_matrix(pencil.a);
  os << "B\n";
  write_matrix(pencil.b);
  if (truth != nullptr) {
    os << "truth\n";
    os << "conditioning " << truth->jordan.conditioning << "\n";
    os << "blocks " << truth->jordan.blocks.size() << "\n";
    for (const auto& blk : truth->jordan.blocks) {
      if (blk.infinite)
        os << "INF " << blk.size << "\n";
      else {
        std::snprintf(buf, sizeof buf, "%.17e %.17e %zu", blk.eigenvalue.real(),
                      blk.eigenvalue.imag(), static_cast<size_t>(blk.size));
        os << buf << "\n";
      }
    }
    os << "Q\n";
    write_matrix(truth->q);
    os << "Qtilde\n";
    write_matrix(truth->qtilde);
    os << "Ptilde\n";
    write_matrix(truth->ptilde);
  }
  os << "end\n";
}

inline Problem read_problem_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open problem file: " + path);
  std::string tok;
  is >> tok;
  if (tok != "cieig-problem") throw ConfigError("bad problem file magic in " + path);
  is >> tok;  // version
  is >> tok;
  if (tok != "n") throw ConfigError("problem file: expected dimension header");
  index_t n = 0;
  is >> n;
  if (n == 0) throw ConfigError("problem file: zero dimension");
  auto read_matrix = [&](index_t rows, index_t cols) {
    ComplexMatrix m(rows, cols);
    for (index_t i = 0; i < rows; ++i)
      for (index_t j = 0; j < cols; ++j) {
        double re, im;
        if (!(is >> re >> im))
          throw ConfigError("problem file: truncated matrix data");
        m(i, j) = cxd(re, im);
      }
    if (!m.all_finite()) throw ConfigError("problem file: non-finite entries");
    return m;
  };
  is >> tok;
  if (tok != "A") throw ConfigError("problem file: expected A section");
  ComplexMatrix a = read_matrix(n, n);
  is >> tok;
  if (tok != "B") throw ConfigError("problem file: expected B section");
  ComplexMatrix b = read_matrix(n, n);

  Problem prob;
  is >> tok;
  if (tok == "truth") {
    GroundTruth truth;
    is >> tok;
    if (tok != "conditioning") throw ConfigError("problem file: bad truth section");
    is >> truth.jordan.conditioning;
    is >> tok;
    index_t nblocks = 0;
    is >> nblocks;
    index_t off = 0;
    for (index_t i = 0; i < nblocks; ++i) {
      is >> tok;
      JordanBlockSpec blk;
      if (tok == "INF") {
        blk.infinite = true;
        is >> blk.size;
      } else {
        double im;
        is >> im >> blk.size;
        blk.eigenvalue = cxd(std::stod(tok), im);
      }
      truth.jordan.blocks.push_back(blk);
      truth.block_offsets.push_back(off);
      off += blk.size;
    }
    if (off != n) throw ConfigError("problem file: truth blocks do not sum to n");
    is >> tok;
    if (tok != "Q") throw ConfigError("problem file: expected Q");
    truth.q = read_matrix(n, n);
    is >> tok;
    if (tok != "Qtilde") throw ConfigError("problem file: expected Qtilde");
    truth.qtilde = read_matrix(n, n);
    is >> tok;
    if (tok != "Ptilde") throw ConfigError("problem file: expected Ptilde");
    truth.ptilde = read_matrix(n, n);
    for (index_t bi = 0; bi < truth.jordan.blocks.size(); ++bi) {
      const auto& blk = truth.jordan.blocks[bi];
      if (blk.infinite) continue;
      FinitePair fp;
      fp.value = blk.eigenvalue;
      fp.multiplicity = blk.size;
      fp.eigenvector.assign(truth.q.col(truth.block_offsets[bi]),
                            truth.q.col(truth.block_offsets[bi]) + n);
      const double nrm = vec_norm(fp.eigenvector);
      for (cxd& x : fp.eigenvector) x /= nrm;
      truth.finite.push_back(std::move(fp));
    }
    prob.truth = std::move(truth);
    is >> tok;
  }
  if (tok != "end") throw ConfigError("problem file: missing end marker");

  const bool herm_a = detail::is_hermitian(a, 1e-12);
  const bool herm_b = detail::is_hermitian(b, 1e-12);
  const bool hpd = herm_b && detail::is_positive_definite(b);
  prob.pencil = make_pencil(std::move(a), std::move(b), herm_a, hpd);
  return prob;
}

inline Problem make_problem(const ProblemSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case ProblemSpec::Kind::jordan: {
      auto [pencil, truth] = gen_weierstrass(spec.jordan, seed);
      return {std::move(pencil), std::move(truth)};
    }
    case ProblemSpec::Kind::symmetric: {
      auto [pencil, truth] = gen_symmetric_dense(
          spec.sym.n, spec.sym.m, spec.sym.inside_lo, spec.sym.inside_hi,
          spec.sym.outside_lo, spec.sym.outside_hi, seed);
      return {std::move(pencil), std::move(truth)};
    }
    case ProblemSpec::Kind::file:
      return read_problem_file(spec.path);
  }
  throw ConfigError("unknown problem kind");
}

// ---------------------------------------------------------------------------
// oracle comparison

/// Greedy nearest matching of the computed in-region eigenvalue multiset
/// against the oracle multiset (with multiplicity); true iff counts agree
/// and every match is within tol.
inline bool multisets_match(std::vector<cxd> computed, std::vector<cxd> reference,
                            double tol) {
  if (computed.size() != reference.size()) return false;
  for (const cxd& r : reference) {
    double best = std::numeric_limits<double>::infinity();
    index_t best_i = 0;
    for (index_t i = 0; i < computed.size(); ++i) {
      const double d = std::abs(computed[i] - r);
      if (d < best) { best = d; best_i = i; }
    }
    if (!(best <= tol)) return false;
    computed.erase(computed.begin() + best_i);
  }
  return computed.empty();
}

inline std::vector<cxd> oracle_values_flat(const std::vector<OraclePair>& oracle) {
  std::vector<cxd> out;
  for (const auto& p : oracle)
    for (index_t i = 0; i < p.multiplicity; ++i) out.push_back(p.value);
  return out;
}

inline std::vector<cxd> inside_values(const EigenResult& res) {
  std::vector<cxd> out;
  for (const auto& p : res.pairs)
    if (p.inside) out.push_back(p.value);
  return out;
}

// ---------------------------------------------------------------------------
// experiment runner

inline constexpr double kOracleMatchTol = 1e-8;

/// Run the configured (method, (L, M)) sweep on one generated problem.
/// The factorizations are shared across rows (they depend only on the
/// pencil and the rule); each row's t_lu column reports that shared phase.
/// Rows are emitted method-major, sweep cells in order.
inline std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.methods.empty()) return {};

  Problem prob = make_problem(cfg.problem, cfg.seed);
  const MatrixPencil& pencil = prob.pencil;

  bool any_arnoldi = false;
  for (Method m : cfg.methods) any_arnoldi |= (m == Method::ss_arnoldi);

  MomentOptions mopts;
  mopts.threads = cfg.threads;
  mopts.compensated_sum = cfg.kahan;
  mopts.half_contour = cfg.half_contour && !any_arnoldi && pencil.is_real() &&
                       cfg.region.real_symmetric();

  QuadratureRule rule = build_rule(cfg.region, cfg.rule_kind, cfg.n_points);
  PointFactorizations pf = factorize_points(pencil, rule, mopts);

  std::vector<OraclePair> oracle;
  bool oracle_available = true;
  try {
    oracle = dense_oracle(pencil, cfg.region,
                          prob.truth ? &*prob.truth : nullptr);
  } catch (const Error&) {
    oracle_available = false;
  }
  const std::vector<cxd> oracle_flat = oracle_values_flat(oracle);

  std::vector<ReportRow> rows;
  for (Method method : cfg.methods) {
    for (const auto& [l, m] : cfg.sweep) {
      ReportRow row;
      row.method = method;
      row.l = l;
      row.m = m;
      SolverConfig scfg;
      scfg.l = l;
      scfg.m = m;
      scfg.n_points = cfg.n_points;
      scfg.rule_kind = cfg.rule_kind;
      scfg.rank_cutoff = cfg.delta;
      scfg.seed = cfg.seed;
      scfg.method = method;
      scfg.refine_ell = cfg.refine_ell;
      scfg.max_feast_iters = cfg.max_feast_iters;
      scfg.feast_tol = cfg.feast_tol;
      scfg.moments = mopts;
      try {
        EigenResult res = solve(pencil, cfg.region, scfg, &pf);
        if (cfg.margin != 0.0) select_in_region(res.pairs, cfg.region, cfg.margin);
        row.mhat = res.rank_used;
        row.t_lu = res.timing.t_lu;
        row.t_solve = res.timing.t_solve;
        row.t_other = res.timing.t_other;
        row.t_total = res.timing.t_total;
        double mx = 0.0, mn = std::numeric_limits<double>::infinity();
        index_t found = 0;
        for (const auto& p : res.pairs) {
          if (!p.inside) continue;
          ++found;
          mx = std::max(mx, p.residual);
          mn = std::min(mn, p.residual);
        }
        row.found = found;
        if (found > 0) {
          row.max_res = mx;
          row.min_res = mn;
        }
        row.oracle_match =
            oracle_available &&
            multisets_match(inside_values(res), oracle_flat, kOracleMatchTol);
      } catch (const Error& e) {
        row.solver_error = true;
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }

  if (!cfg.output.empty()) {
    std::ofstream os(cfg.output, std::ios::binary);
    if (!os) throw ConfigError("cannot open output file: " + cfg.output);
    os << format_csv(rows, cfg.timing_output);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// config parsing (flat key=value text, '#' comments)

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad boolean for " + key + ": " + v);
}

inline double parse_double(const std::string& v, const std::string& key) {
  try {
    return std::stod(v);
  } catch (...) {
    throw ConfigError("bad number for " + key + ": " + v);
  }
}

inline long long parse_int(const std::string& v, const std::string& key) {
  try {
    return std::stoll(v);
  } catch (...) {
    throw ConfigError("bad integer for " + key + ": " + v);
  }
}

}  // namespace detail

inline ContourRegion parse_region(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ConfigError("region: expected circle:... or ellipse:... in \"" + text + "\"");
  const std::string kind = text.substr(0, colon);
  const auto parts = detail::split(text.substr(colon + 1), ',');
  if (kind == "circle") {
    if (parts.size() != 3) throw ConfigError("region: circle needs cx,cy,r");
    return ContourRegion::circle(cxd(detail::parse_double(parts[0], "region"),
                                     detail::parse_double(parts[1], "region")),
                                 detail::parse_double(parts[2], "region"));
  }
  if (kind == "ellipse") {
    if (parts.size() != 4) throw ConfigError("region: ellipse needs cx,cy,a,b");
    return ContourRegion::ellipse(cxd(detail::parse_double(parts[0], "region"),
                                      detail::parse_double(parts[1], "region")),
                                  detail::parse_double(parts[2], "region"),
                                  detail::parse_double(parts[3], "region"));
  }
  throw ConfigError("region: unknown kind \"" + kind + "\"");
}

inline ProblemSpec parse_problem(const std::string& text) {
  ProblemSpec spec;
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ConfigError("problem: expected jordan:/symmetric:/file: in \"" + text + "\"");
  const std::string kind = text.substr(0, colon);
  const std::string body = text.substr(colon + 1);
  if (kind == "jordan") {
    spec.kind = ProblemSpec::Kind::jordan;
    spec.jordan = parse_jordan_spec(body);
    return spec;
  }
  if (kind == "symmetric") {
    spec.kind = ProblemSpec::Kind::symmetric;
    for (const std::string& item : detail::split(body, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw ConfigError("problem: symmetric items need key=value, got \"" + item + "\"");
      const std::string k = item.substr(0, eq);
      const std::string v = item.substr(eq + 1);
      if (k == "n") spec.sym.n = detail::parse_int(v, "problem.n");
      else if (k == "m") spec.sym.m = detail::parse_int(v, "problem.m");
      else if (k == "inside") {
        const auto r = detail::split(v, ':');
        if (r.size() != 2) throw ConfigError("problem: inside needs lo:hi");
        spec.sym.inside_lo = detail::parse_double(r[0], "inside");
        spec.sym.inside_hi = detail::parse_double(r[1], "inside");
      } else if (k == "outside") {
        const auto r = detail::split(v, ':');
        if (r.size() != 2) throw ConfigError("problem: outside needs lo:hi");
        spec.sym.outside_lo = detail::parse_double(r[0], "outside");
        spec.sym.outside_hi = detail::parse_double(r[1], "outside");
      } else {
        throw ConfigError("problem: unknown symmetric key \"" + k + "\"");
      }
    }
    return spec;
  }
  if (kind == "file") {
    spec.kind = ProblemSpec::Kind::file;
    spec.path = body;
    return spec;
  }
  throw ConfigError("problem: unknown kind \"" + kind + "\"");
}

/// Apply one key=value setting onto the config; shared by the file loader
/// and the CLI flag overrides.
inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                               const std::string& value, int line_no = 0) {
  auto where = [&](const std::string& msg) {
    return line_no > 0 ? msg + " (line " + std::to_string(line_no) + ")" : msg;
  };
  try {
    if (key == "problem") cfg.problem = parse_problem(value);
    else if (key == "region") cfg.region = parse_region(value);
    else if (key == "rule") {
      if (value == "trapezoidal") cfg.rule_kind = RuleKind::trapezoidal;
      else if (value == "gauss_legendre") cfg.rule_kind = RuleKind::gauss_legendre;
      else throw ConfigError("unknown rule kind: " + value);
    } else if (key == "N") cfg.n_points = detail::parse_int(value, key);
    else if (key == "sweep") {
      cfg.sweep.clear();
      for (const std::string& cell : detail::split(value, ';')) {
        const auto lm = detail::split(cell, ',');
        if (lm.size() != 2) throw ConfigError("sweep cell needs L,M: " + cell);
        cfg.sweep.emplace_back(detail::parse_int(lm[0], "sweep.L"),
                               detail::parse_int(lm[1], "sweep.M"));
      }
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const std::string& name : detail::split(value, ',')) {
        if (name.empty()) continue;
        auto m = method_from_name(detail::trim(name));
        if (!m) throw ConfigError("unknown method: " + name);
        cfg.methods.push_back(*m);
      }
    } else if (key == "delta") cfg.delta = detail::parse_double(value, key);
    else if (key == "seed") cfg.seed = detail::parse_int(value, key);
    else if (key == "output") cfg.output = value;
    else if (key == "half_contour") cfg.half_contour = detail::parse_bool(value, key);
    else if (key == "timings") cfg.timing_output = detail::parse_bool(value, key);
    else if (key == "threads") cfg.threads = detail::parse_int(value, key);
    else if (key == "kahan") cfg.kahan = detail::parse_bool(value, key);
    else if (key == "refine") cfg.refine_ell = detail::parse_int(value, key);
    else if (key == "max_feast_iters") cfg.max_feast_iters = detail::parse_int(value, key);
    else if (key == "feast_tol") cfg.feast_tol = detail::parse_double(value, key);
    else if (key == "margin") cfg.margin = detail::parse_double(value, key);
    else throw ConfigError("unknown config key: " + key);
  } catch (const ConfigError& e) {
    throw ConfigError(where(e.what()));
  } catch (const Error& e) {
    throw ConfigError(where(std::string(e.what()) + " (key " + key + ")"));
  }
}

inline ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key=value, got \"" + line + "\"");
    apply_config_entry(cfg, detail::trim(line.substr(0, eq)),
                       detail::trim(line.substr(eq + 1)), line_no);
  }
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_experiment_config(ss.str());
}

}  // namespace cieig
