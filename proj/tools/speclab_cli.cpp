// Command-line front end: configuration-driven verification suites, raw
// scans, oracle cross-checks, and norm-table export.
//
// Exit codes: 0 all verdicts pass, 1 verdict failure or computational
// failure, 2 configuration error, 3 budget exceeded.

#include <CLI11.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "speclab/asymptotics.hpp"
#include "speclab/config.hpp"
#include "speclab/domain.hpp"
#include "speclab/functional_calculus.hpp"
#include "speclab/galerkin.hpp"
#include "speclab/kernels.hpp"
#include "speclab/spectral.hpp"

namespace {

using namespace speclab;

bool is_boundary_point(const DomainSpec& domain, const std::vector<Complex>& z) {
  double rho = -1.0;
  for (int j = 0; j < domain.n; ++j) {
    rho += domain.a[static_cast<std::size_t>(j)] * std::norm(z[static_cast<std::size_t>(j)]);
  }
  return std::abs(rho) <= 1e-9;
}

// Folds per-point reports into one suite report: the verdict is the
// conjunction, scalar and series panels are key-prefixed by point id.
AsymptoticsReport merge_reports(const std::string& claim,
                                const std::vector<std::pair<std::string, AsymptoticsReport>>& parts) {
  if (parts.empty()) {
    throw ConfigError("suite " + claim + " has no applicable points");
  }
  AsymptoticsReport out;
  out.claim = claim;
  out.pass = true;
  out.tolerance = parts.front().second.tolerance;
  out.k_ladder = parts.front().second.k_ladder;
  for (const auto& part : parts) {
    const AsymptoticsReport& rep = part.second;
    out.pass = out.pass && rep.pass;
    for (const auto& kv : rep.values) {
      out.values.emplace_back(part.first + "." + kv.first, kv.second);
    }
    for (const auto& kv : rep.series) {
      out.series.emplace_back(part.first + "." + kv.first, kv.second);
    }
    if (!rep.notes.empty()) {
      out.notes += (out.notes.empty() ? "" : "; ") + part.first + ": " + rep.notes;
    }
  }
  return out;
}

std::vector<NamedPoint> boundary_points(const RunConfig& cfg) {
  std::vector<NamedPoint> pts;
  for (const NamedPoint& p : cfg.points) {
    if (is_boundary_point(cfg.domain, p.z)) pts.push_back(p);
  }
  return pts;
}

AsymptoticsReport run_leading_suite(const RunConfig& cfg) {
  std::vector<std::pair<std::string, AsymptoticsReport>> parts;
  for (const NamedPoint& p : boundary_points(cfg)) {
    parts.emplace_back(
        p.id, leading_ratio_test(cfg.domain, p.z, cfg.chi, cfg.generator,
                                 cfg.k_ladder,
                                 cfg.tolerance_or("leading", 0.03),
                                 cfg.budgets.max_indices));
  }
  return merge_reports("leading", parts);
}

AsymptoticsReport run_interior_suite(const RunConfig& cfg) {
  std::vector<std::pair<std::string, AsymptoticsReport>> parts;
  for (const NamedPoint& p : boundary_points(cfg)) {
    parts.emplace_back(
        p.id, interior_damping_test(cfg.domain, p.z, cfg.interior_depth,
                                    cfg.chi, cfg.generator, cfg.k_ladder,
                                    cfg.tolerance_or("interior", 0.10),
                                    cfg.budgets.max_indices));
  }
  return merge_reports("interior", parts);
}

AsymptoticsReport run_trace_suite(const RunConfig& cfg) {
  AsymptoticsReport rep =
      trace_scan(cfg.domain, cfg.generator, cfg.chi, cfg.k_ladder);
  rep.claim = "trace";
  return rep;
}

AsymptoticsReport run_boundary_suite(const RunConfig& cfg) {
  if (!cfg.domain.is_ball()) {
    throw ConfigError("the boundary suite runs on the sphere model only");
  }
  AsymptoticsReport rep =
      boundary_trace_test(cfg.domain.n, cfg.generator, cfg.chi, cfg.k_ladder,
                          cfg.tolerance_or("boundary", 0.0));
  rep.claim = "boundary";
  return rep;
}

AsymptoticsReport run_offdiag_suite(const RunConfig& cfg, int jobs) {
  AsymptoticsReport rep =
      offdiagonal_decay_test(cfg.domain, cfg.pairs, cfg.chi, cfg.generator,
                             cfg.k_ladder, cfg.budgets.max_indices, jobs);
  rep.claim = "offdiag";
  return rep;
}

// Cross-checks three independent routes to the same objects: Monte Carlo
// norms vs closed form, resolvent functional calculus vs eigendecomposition,
// and the quadrature Galerkin matrix vs the symbolic diagonal. An optional
// norm-table file is revalidated against the closed form.
AsymptoticsReport run_oracles_suite(const RunConfig& cfg,
                                    const std::string& norm_table_path) {
  AsymptoticsReport rep;
  rep.claim = "oracles";
  rep.k_ladder = cfg.k_ladder;
  bool pass = true;

  // Monte Carlo vs closed-form norms on seeded random indices.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<int> pick(0, 6);
  double worst_sigma = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    MultiIndex alpha(static_cast<std::size_t>(cfg.domain.n));
    for (int j = 0; j < cfg.domain.n; ++j) {
      alpha[static_cast<std::size_t>(j)] = pick(rng);
    }
    const double exact = monomial_norm_sq(cfg.domain, alpha);
    const MonteCarloEstimate mc =
        monomial_norm_sq_oracle(cfg.domain, alpha, 100000, cfg.seed + trial);
    const double sigmas = std::abs(mc.value - exact) / mc.std_error;
    worst_sigma = std::max(worst_sigma, sigmas);
  }
  if (worst_sigma > 4.0) pass = false;
  rep.values.emplace_back("norms_worst_sigma", worst_sigma);

  // Resolvent functional calculus vs eigendecomposition on a seeded
  // Hermitian matrix with spectrum overlapping the chi_k window.
  {
    const int m = 24;
    const int k = 10;
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd g(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        g(i, j) = Complex(gauss(rng), gauss(rng));
      }
    }
    Eigen::MatrixXcd a = 0.5 * (g + g.adjoint());
    a *= (0.5 * k * cfg.chi.t_max()) / std::max(a.norm(), 1e-12);
    a += (0.8 * k * cfg.chi.center) * Eigen::MatrixXcd::Identity(m, m);
    const Eigen::MatrixXcd via_hs = helffer_sjostrand_chi(a, cfg.chi, k);
    const Eigen::MatrixXcd via_eig = apply_chi_eigendecomposition(a, cfg.chi, k);
    const double dev = (via_hs - via_eig).cwiseAbs().maxCoeff();
    if (dev > 1e-6) pass = false;
    rep.values.emplace_back("functional_calculus_max_dev", dev);
  }

  // Galerkin quadrature matrix vs the symbolic diagonal.
  {
    GalerkinQuadrature quad;
    quad.node_budget = cfg.budgets.max_quadrature_nodes;
    const GalerkinResult gk =
        galerkin_toeplitz_matrix(cfg.domain, cfg.generator, 4, quad);
    double off = 0.0, diag_dev = 0.0;
    for (Eigen::Index i = 0; i < gk.matrix.rows(); ++i) {
      for (Eigen::Index j = 0; j < gk.matrix.cols(); ++j) {
        if (i == j) continue;
        off = std::max(off, std::abs(gk.matrix(i, j)));
      }
      const double ev = toeplitz_eigenvalue(
          cfg.generator, gk.basis[static_cast<std::size_t>(i)]);
      const double scale = std::max(1.0, std::abs(ev));
      diag_dev = std::max(diag_dev,
                          std::abs(gk.matrix(i, i).real() - ev) / scale);
    }
    if (off > 1e-8 || diag_dev > 1e-2) pass = false;
    rep.values.emplace_back("galerkin_max_offdiagonal", off);
    rep.values.emplace_back("galerkin_diag_rel_dev", diag_dev);
  }

  // Optional: revalidate a previously exported norm table.
  if (!norm_table_path.empty()) {
    std::ifstream f(norm_table_path, std::ios::binary);
    if (!f) throw ConfigError("cannot read norm table " + norm_table_path);
    std::ostringstream buf;
    buf << f.rdbuf();
    const NormTable table = NormTable::from_csv(buf.str(), cfg.domain);
    double table_dev = 0.0;
    for (std::size_t i = 0; i < table.alphas.size(); ++i) {
      const double exact = log_monomial_norm_sq(cfg.domain, table.alphas[i]);
      table_dev = std::max(table_dev, std::abs(table.log_norm_sq[i] - exact));
    }
    if (table_dev > 1e-12) pass = false;
    rep.values.emplace_back("norm_table_max_dev", table_dev);
  }

  rep.pass = pass;
  return rep;
}

void write_reports(const RunConfig& cfg,
                   const std::vector<AsymptoticsReport>& reports) {
  std::filesystem::create_directories(cfg.out_dir);
  Provenance prov;
  prov.config_hash = cfg.hash();
  prov.seed = cfg.seed;
  prov.budgets = cfg.budgets;
  for (const AsymptoticsReport& rep : reports) {
    const Json j = report_to_json(rep, prov);
    write_text_file(cfg.out_dir + "/report_" + rep.claim + ".json",
                    j.dump(2) + "\n");
  }
  write_text_file(cfg.out_dir + "/summary.csv", summary_csv(reports));
}

int cmd_verify(const RunConfig& cfg, int jobs,
               const std::string& norm_table_path) {
  std::vector<AsymptoticsReport> reports;
  for (const std::string& suite : known_suites()) {
    if (std::find(cfg.suites.begin(), cfg.suites.end(), suite) ==
        cfg.suites.end()) {
      continue;
    }
    if (suite == "leading") reports.push_back(run_leading_suite(cfg));
    if (suite == "trace") reports.push_back(run_trace_suite(cfg));
    if (suite == "interior") reports.push_back(run_interior_suite(cfg));
    if (suite == "offdiag") reports.push_back(run_offdiag_suite(cfg, jobs));
    if (suite == "boundary") reports.push_back(run_boundary_suite(cfg));
    if (suite == "oracles") {
      reports.push_back(run_oracles_suite(cfg, norm_table_path));
    }
  }
  write_reports(cfg, reports);
  bool all = true;
  for (const AsymptoticsReport& rep : reports) {
    std::cout << rep.claim << ": " << (rep.pass ? "pass" : "fail") << "\n";
    all = all && rep.pass;
  }
  return all ? 0 : 1;
}

int cmd_scan(const RunConfig& cfg, const std::string& kind, int jobs) {
  std::filesystem::create_directories(cfg.out_dir);
  ScanSetup setup;
  setup.domain = cfg.domain;
  setup.generator = cfg.generator;
  setup.profile = cfg.chi;
  setup.term_budget = cfg.budgets.max_indices;

  const auto write_point_files = [&](const ScanTable& table, bool magnitude) {
    for (const std::string& id : table.point_ids()) {
      ScanTable one;
      one.rows = table.rows_for(id);
      one.write_csv(cfg.out_dir + "/scan_" + kind + "_" + id + ".csv");
      write_text_file(cfg.out_dir + "/scan_" + kind + "_" + id + ".dat",
                      table.dat_for(id, magnitude));
    }
  };

  if (kind == "diagonal") {
    if (cfg.points.empty()) throw ConfigError("diagonal scan needs points");
    write_point_files(diagonal_scan(setup, cfg.points, cfg.k_ladder, jobs),
                      false);
  } else if (kind == "offdiagonal") {
    if (cfg.pairs.empty()) throw ConfigError("offdiagonal scan needs pairs");
    write_point_files(offdiagonal_scan(setup, cfg.pairs, cfg.k_ladder, jobs),
                      true);
  } else if (kind == "boundary") {
    if (!cfg.domain.is_ball()) {
      throw ConfigError("boundary scans run on the sphere model only");
    }
    setup.boundary = true;
    std::vector<NamedPoint> pts;
    for (const NamedPoint& p : cfg.points) {
      if (is_boundary_point(cfg.domain, p.z)) pts.push_back(p);
    }
    if (pts.empty()) throw ConfigError("boundary scan needs boundary points");
    write_point_files(diagonal_scan(setup, pts, cfg.k_ladder, jobs), false);
  } else if (kind == "trace") {
    ScanTable table;
    for (double k : cfg.k_ladder) {
      ScanRow row;
      row.point_id = "trace";
      row.k = k;
      row.value = Complex(projector_trace(cfg.generator, cfg.chi, k), 0.0);
      table.rows.push_back(row);
    }
    write_point_files(table, false);
  } else {
    throw ConfigError(
        "scan kind must be diagonal, offdiagonal, boundary, or trace");
  }
  return 0;
}

int cmd_norms(const RunConfig& cfg, int max_degree) {
  std::filesystem::create_directories(cfg.out_dir);
  const NormTable table = NormTable::build(cfg.domain, max_degree,
                                           cfg.budgets.max_indices);
  table.write_csv(cfg.out_dir + "/norm_table.csv");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Spectral projector laboratory: verification suites, kernel scans, "
      "oracle cross-checks, and norm tables for rotation-invariant model "
      "domains"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string norm_table_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
  int max_degree = 16;
  std::string scan_kind;

  app.add_option("--config", config_path, "Path to the JSON run config")
      ->required();
  app.add_option("--out", out_dir, "Output directory (overrides config)");
  auto* seed_opt =
      app.add_option("--seed", seed, "Random seed (overrides config)");
  app.add_option("--jobs", jobs, "Worker threads for scans")
      ->check(CLI::PositiveNumber);

  CLI::App* verify = app.add_subcommand(
      "verify", "Run the configured suites and write verdict reports");
  verify->fallthrough();
  verify->add_option("--norm-table", norm_table_path,
                     "Norm-table CSV to revalidate in the oracles suite");
  CLI::App* scan = app.add_subcommand(
      "scan", "Emit raw scan tables without verdicts");
  scan->fallthrough();
  scan->add_option("--kind", scan_kind,
                   "diagonal | offdiagonal | boundary | trace")
      ->required();
  CLI::App* oracles = app.add_subcommand(
      "oracles", "Cross-check closed forms against independent oracles");
  oracles->fallthrough();
  oracles->add_option("--norm-table", norm_table_path,
                      "Norm-table CSV to revalidate");
  CLI::App* norms = app.add_subcommand(
      "norms", "Export the monomial norm table as CSV");
  norms->fallthrough();
  norms->add_option("--max-degree", max_degree,
                    "Degree bound for the norm table")
      ->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  seed_set = seed_opt->count() > 0;

  try {
    RunConfig cfg = speclab::load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed_set) cfg.seed = seed;

    if (verify->parsed()) return cmd_verify(cfg, jobs, norm_table_path);
    if (scan->parsed()) return cmd_scan(cfg, scan_kind, jobs);
    if (oracles->parsed()) {
      const speclab::AsymptoticsReport rep =
          run_oracles_suite(cfg, norm_table_path);
      write_reports(cfg, {rep});
      std::cout << rep.claim << ": " << (rep.pass ? "pass" : "fail") << "\n";
      return rep.pass ? 0 : 1;
    }
    if (norms->parsed()) return cmd_norms(cfg, max_degree);
    return 2;
  } catch (const speclab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const speclab::CapacityExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const speclab::QuadratureBudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const speclab::Error& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
