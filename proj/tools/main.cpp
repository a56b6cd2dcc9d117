#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "pcassoc/assoc.hpp"
#include "pcassoc/chisq.hpp"
#include "pcassoc/experiment.hpp"
#include "pcassoc/manifest.hpp"
#include "pcassoc/pca.hpp"
#include "pcassoc/power.hpp"
#include "pcassoc/scenario.hpp"
#include "pcassoc/simulate.hpp"
#include "pcassoc/table.hpp"
#include "pcassoc/version.hpp"

namespace fs = std::filesystem;
using namespace pcassoc;

namespace {

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ';');
  std::replace(s.begin(), s.end(), '\t', ' ');
  return s;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void ensure_out_dir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw std::runtime_error("cannot create output directory: " + out);
}

Scenario load_scenario(const std::string& path, bool seed_given, std::uint64_t seed_override) {
  Scenario s = parse_scenario(path);
  if (seed_given) {
    s.seed = seed_override;
    s.seed_set = true;
  }
  return s;
}

struct DataColumns {
  std::vector<int> genotype_cols;
  std::vector<int> trait_cols;
};

// genotype columns are named "G" or "G<number>"; everything else is a trait
DataColumns classify_columns(const Table& t) {
  DataColumns out;
  for (size_t j = 0; j < t.columns.size(); ++j) {
    const std::string& name = t.columns[j];
    bool is_geno = false;
    if (!name.empty() && name[0] == 'G') {
      is_geno = name.size() == 1 ||
                std::all_of(name.begin() + 1, name.end(),
                            [](unsigned char c) { return std::isdigit(c); });
    }
    (is_geno ? out.genotype_cols : out.trait_cols).push_back(static_cast<int>(j));
  }
  if (out.genotype_cols.empty()) {
    throw std::runtime_error("no genotype column (expected a column named G or G<number>)");
  }
  if (out.trait_cols.size() < 2) {
    throw std::runtime_error("need at least 2 trait columns");
  }
  return out;
}

// --- subcommand implementations -------------------------------------------

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir, bool seed_given,
                 std::uint64_t seed_override) {
  Timer timer;
  Scenario s = load_scenario(scenario_path, seed_given, seed_override);
  ensure_out_dir(out_dir);

  RandomStream rng = RandomStream::for_replicate(s.seed, 0);
  Eigen::MatrixXd phenotypes;
  Eigen::VectorXd genotype;
  std::vector<int> affected;
  Eigen::VectorXd shares, signs;

  switch (s.kind) {
    case GeneratorKind::bivariate: {
      BivariateData d = simulate_bivariate(s.n, s.bivariate.params, rng);
      phenotypes = std::move(d.phenotypes);
      genotype = std::move(d.genotype.values);
      shares.resize(2);
      shares[0] = s.bivariate.params.v1;
      shares[1] = s.bivariate.params.v2;
      signs.resize(2);
      signs[0] = 1.0;
      signs[1] = s.bivariate.params.sign2 == EffectSign::concordant ? 1.0 : -1.0;
      if (s.bivariate.params.v1 > 0) affected.push_back(0);
      if (s.bivariate.params.v2 > 0) affected.push_back(1);
      break;
    }
    case GeneratorKind::multitrait: {
      MultiTraitData d = simulate_multitrait(s.n, s.multitrait.scenario, rng);
      phenotypes = std::move(d.phenotypes);
      genotype = std::move(d.genotype.values);
      affected = std::move(d.affected);
      shares = std::move(d.variance_share);
      signs = std::move(d.effect_sign);
      break;
    }
    case GeneratorKind::latent: {
      const auto& cfg = s.latent;
      LatentSchemeParams structure;
      switch (cfg.scheme) {
        case LatentScheme::sc1:
          structure = make_sc1(cfg.n_phe, cfg.n_latent,
                               cfg.structure_seed ? cfg.structure_seed : 0x5c1);
          break;
        case LatentScheme::sc2:
          structure = make_sc2(cfg.n_phe, cfg.n_latent,
                               cfg.structure_seed ? cfg.structure_seed : 0x5c2);
          break;
        case LatentScheme::sc3:
          structure = make_sc3(cfg.n_phe, cfg.n_latent, cfg.n_clusters,
                               cfg.structure_seed ? cfg.structure_seed : 0x5c3);
          break;
      }
      LatentSampler sampler(std::move(structure));
      LatentSampler::GeneticPolicy policy{cfg.k_assoc, cfg.v_lo, cfg.v_hi, cfg.selection};
      LatentData d = sampler.sample(s.n, policy, rng);
      phenotypes = std::move(d.phenotypes);
      genotype = std::move(d.genotype.values);
      affected = std::move(d.affected);
      shares = std::move(d.variance_share);
      break;
    }
  }

  const int p = static_cast<int>(phenotypes.cols());
  Table data;
  data.columns.push_back("G");
  for (int j = 1; j <= p; ++j) data.columns.push_back("Y" + std::to_string(j));
  data.rows.resize(s.n);
  for (int i = 0; i < s.n; ++i) {
    data.rows[i].resize(p + 1);
    data.rows[i][0] = genotype[i];
    for (int j = 0; j < p; ++j) data.rows[i][j + 1] = phenotypes(i, j);
  }
  const std::string data_path = out_dir + "/data.tsv";
  write_tsv(data, data_path);

  Table effects;
  effects.columns = {"target_index", "variance_share", "sign"};
  for (int idx : affected) {
    const double share = idx < static_cast<int>(shares.size()) ? shares[idx] : 0.0;
    const double sign =
        (idx < static_cast<int>(signs.size()) && signs[idx] != 0.0) ? signs[idx] : 1.0;
    effects.rows.push_back({static_cast<double>(idx + 1), share, sign});
  }
  const std::string effects_path = out_dir + "/effects.tsv";
  write_tsv(effects, effects_path);

  RunManifest manifest;
  manifest.subcommand = "simulate";
  manifest.parameters["scenario"] = scenario_path;
  manifest.parameters["resolved"] = serialize_scenario(s);
  manifest.seed = std::to_string(s.seed);
  manifest.inputs = {scenario_path};
  manifest.outputs = {data_path, effects_path};
  manifest.wall_time_seconds = timer.seconds();
  manifest.timestamp_utc = utc_timestamp();
  manifest.write(out_dir + "/manifest.json");
  return 0;
}

int cmd_pca(const std::string& data_path, const std::string& out_dir) {
  Timer timer;
  Table data = read_tsv(data_path);
  DataColumns cols = classify_columns(data);
  ensure_out_dir(out_dir);

  Eigen::MatrixXd all = data.to_matrix();
  Eigen::MatrixXd y(all.rows(), cols.trait_cols.size());
  for (size_t j = 0; j < cols.trait_cols.size(); ++j) y.col(j) = all.col(cols.trait_cols[j]);

  PcaModel model = fit_pca(y);
  const int p = static_cast<int>(model.n_traits());

  LabeledTable out;
  out.label_header = "trait";
  for (int j = 1; j <= p; ++j) out.columns.push_back("PC" + std::to_string(j));
  for (size_t j = 0; j < cols.trait_cols.size(); ++j) {
    out.labels.push_back(data.columns[cols.trait_cols[j]]);
    std::vector<double> row(p);
    for (int k = 0; k < p; ++k) row[k] = model.loadings(static_cast<int>(j), k);
    out.rows.push_back(std::move(row));
  }
  out.labels.push_back("eigenvalue");
  out.rows.emplace_back(model.eigenvalues.data(), model.eigenvalues.data() + p);
  out.labels.push_back("var_explained");
  Eigen::VectorXd ve = model.variance_explained();
  out.rows.emplace_back(ve.data(), ve.data() + p);
  const std::string model_path = out_dir + "/model.tsv";
  write_labeled_tsv(out, model_path);

  LabeledTable stats;
  stats.label_header = "trait";
  stats.columns = {"mean", "sd"};
  for (size_t j = 0; j < cols.trait_cols.size(); ++j) {
    stats.labels.push_back(data.columns[cols.trait_cols[j]]);
    stats.rows.push_back({model.means[static_cast<int>(j)], model.sds[static_cast<int>(j)]});
  }
  const std::string stats_path = out_dir + "/standardization.tsv";
  write_labeled_tsv(stats, stats_path);

  RunManifest manifest;
  manifest.subcommand = "pca";
  manifest.parameters["data"] = data_path;
  manifest.inputs = {data_path};
  manifest.outputs = {model_path, stats_path};
  manifest.wall_time_seconds = timer.seconds();
  manifest.timestamp_utc = utc_timestamp();
  manifest.write(out_dir + "/manifest.json");
  return 0;
}

int cmd_assoc(const std::string& data_path, const std::string& out_dir, int split_k) {
  Timer timer;
  Table data = read_tsv(data_path);
  DataColumns cols = classify_columns(data);
  ensure_out_dir(out_dir);

  Eigen::MatrixXd all = data.to_matrix();
  Eigen::MatrixXd y(all.rows(), cols.trait_cols.size());
  for (size_t j = 0; j < cols.trait_cols.size(); ++j) y.col(j) = all.col(cols.trait_cols[j]);
  const int p = static_cast<int>(y.cols());
  const int k_split = split_k > 0 ? split_k : std::min(10, p - 1);
  if (k_split >= p) throw std::runtime_error("--split-k must be below the trait count");

  PcaModel model = fit_pca(y);
  Eigen::MatrixXd scores = project_scores(model, y);
  constexpr double kLn10 = 2.302585092994046;

  LabeledTable scan;
  scan.label_header = "genotype";
  for (size_t j = 0; j < cols.trait_cols.size(); ++j) {
    scan.columns.push_back(data.columns[cols.trait_cols[j]]);
  }
  for (int j = 1; j <= p; ++j) scan.columns.push_back("PC" + std::to_string(j));
  scan.columns.push_back("bestPC_index");
  scan.columns.push_back("bestPC");
  scan.columns.push_back("combPC");
  scan.columns.push_back("fisherSplit" + std::to_string(k_split));
  scan.columns.push_back("MANOVA");

  for (int gcol : cols.genotype_cols) {
    const Eigen::VectorXd g = all.col(gcol);
    std::vector<double> row;
    row.reserve(scan.columns.size());
    for (size_t j = 0; j < cols.trait_cols.size(); ++j) {
      row.push_back(-univariate_wald(y.col(static_cast<int>(j)), g).log_p / kLn10);
    }
    std::vector<double> pc_chi2(p);
    for (int j = 0; j < p; ++j) {
      AssocResult r = univariate_wald(scores.col(j), g);
      pc_chi2[j] = r.chi2;
      row.push_back(-r.log_p / kLn10);
    }
    BestPcResult best = best_pc_test(scores, g);
    row.push_back(static_cast<double>(best.index + 1));
    row.push_back(-best.log_p_adjusted / kLn10);
    GroupTestResult comb = combined_pc_test(scores, g);
    row.push_back(-comb.log_p / kLn10);
    GroupTestResult split = fisher_group_test(pc_chi2, k_split);
    row.push_back(-split.log_p / kLn10);
    row.push_back(-manova_wilks_log_p(y, g) / kLn10);

    scan.labels.push_back(data.columns[gcol]);
    scan.rows.push_back(std::move(row));
  }
  const std::string scan_path = out_dir + "/scan.tsv";
  write_labeled_tsv(scan, scan_path);

  RunManifest manifest;
  manifest.subcommand = "assoc";
  manifest.parameters["data"] = data_path;
  manifest.parameters["split_k"] = std::to_string(k_split);
  manifest.inputs = {data_path};
  manifest.outputs = {scan_path};
  manifest.wall_time_seconds = timer.seconds();
  manifest.timestamp_utc = utc_timestamp();
  manifest.write(out_dir + "/manifest.json");
  return 0;
}

int cmd_power_analytic(const std::string& out_dir, const PowerGrid& grid) {
  Timer timer;
  ensure_out_dir(out_dir);
  std::vector<PowerCurveRow> rows = power_curves(grid);

  Table t;
  t.columns = {"c",         "n",        "v1",        "v2",            "sign",
               "alpha",     "power_Y1", "power_PC1", "power_PC2",     "power_combined"};
  for (const PowerCurveRow& r : rows) {
    t.rows.push_back({r.c, static_cast<double>(r.n), r.v1, r.v2,
                      r.sign == EffectSign::concordant ? 1.0 : -1.0, r.alpha, r.power_y1,
                      r.power_pc1, r.power_pc2, r.power_combined});
  }
  const std::string curves_path = out_dir + "/curves.tsv";
  write_tsv(t, curves_path);

  RunManifest manifest;
  manifest.subcommand = "power-analytic";
  manifest.parameters["alpha"] = format_double(grid.alpha);
  manifest.outputs = {curves_path};
  manifest.wall_time_seconds = timer.seconds();
  manifest.timestamp_utc = utc_timestamp();
  manifest.write(out_dir + "/manifest.json");
  return 0;
}

int cmd_power_mc(const std::string& scenario_path, const std::string& out_dir, int threads,
                 bool seed_given, std::uint64_t seed_override) {
  Timer timer;
  Scenario s = load_scenario(scenario_path, seed_given, seed_override);
  ensure_out_dir(out_dir);

  StudyReport report = run_power_study(s, threads);

  LabeledTable t;
  t.label_header = "test";
  t.columns = {"power", "se", "power_adjusted", "replicates", "alpha"};
  for (const PowerEstimate& e : report.tests) {
    t.labels.push_back(e.test);
    t.rows.push_back({e.power, e.se, e.power_adjusted, static_cast<double>(report.replicates),
                      report.alpha});
  }
  const std::string report_path = out_dir + "/report.tsv";
  write_labeled_tsv(t, report_path);

  RunManifest manifest;
  manifest.subcommand = "power-mc";
  manifest.parameters["scenario"] = scenario_path;
  manifest.parameters["resolved"] = serialize_scenario(s);
  manifest.parameters["threads"] = std::to_string(threads);
  manifest.parameters["bonferroni_factor"] = std::to_string(report.bonferroni_factor);
  manifest.seed = std::to_string(s.seed);
  manifest.inputs = {scenario_path};
  manifest.outputs = {report_path};
  manifest.wall_time_seconds = timer.seconds();
  manifest.timestamp_utc = utc_timestamp();
  manifest.write(out_dir + "/manifest.json");
  return 0;
}

int cmd_calibrate_null(const std::string& scenario_path, const std::string& out_dir, int threads,
                       bool seed_given, std::uint64_t seed_override) {
  Timer timer;
  Scenario s = load_scenario(scenario_path, seed_given, seed_override);
  ensure_out_dir(out_dir);

  NullCalibration cal = calibrate_null(s, threads);

  LabeledTable t;
  t.label_header = "test";
  t.columns = {"lambda", "replicates"};
  std::vector<std::string> outputs;
  for (const TestCalibration& tc : cal.tests) {
    t.labels.push_back(tc.test);
    t.rows.push_back({tc.lambda, static_cast<double>(cal.replicates)});
  }
  const std::string lambda_path = out_dir + "/lambda.tsv";
  write_labeled_tsv(t, lambda_path);
  outputs.push_back(lambda_path);

  for (const TestCalibration& tc : cal.tests) {
    Table qq;
    qq.columns = {"expected_neglog10p", "observed_neglog10p"};
    for (const QqPoint& pt : tc.qq) qq.rows.push_back({pt.expected, pt.observed});
    const std::string qq_path = out_dir + "/qq_" + tc.test + ".tsv";
    write_tsv(qq, qq_path);
    outputs.push_back(qq_path);
  }

  RunManifest manifest;
  manifest.subcommand = "calibrate-null";
  manifest.parameters["scenario"] = scenario_path;
  manifest.parameters["resolved"] = serialize_scenario(s);
  manifest.parameters["threads"] = std::to_string(threads);
  manifest.seed = std::to_string(s.seed);
  manifest.inputs = {scenario_path};
  manifest.outputs = outputs;
  manifest.wall_time_seconds = timer.seconds();
  manifest.timestamp_utc = utc_timestamp();
  manifest.write(out_dir + "/manifest.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PCA-based multivariate association testing toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string scenario_path, data_path, out_dir;
  std::uint64_t seed_override = 0;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  int split_k = 0;

  auto* sim = app.add_subcommand("simulate", "Draw one dataset from a scenario");
  sim->add_option("--scenario", scenario_path, "Scenario file")->required();
  sim->add_option("--out", out_dir, "Output directory")->required();
  auto* sim_seed = sim->add_option("--seed", seed_override, "Seed override");

  auto* pca = app.add_subcommand("pca", "Fit principal components of the trait columns");
  pca->add_option("--data", data_path, "Data TSV (genotype + trait columns)")->required();
  pca->add_option("--out", out_dir, "Output directory")->required();

  auto* assoc = app.add_subcommand("assoc", "Association scan over the genotype columns");
  assoc->add_option("--data", data_path, "Data TSV (genotype + trait columns)")->required();
  assoc->add_option("--out", out_dir, "Output directory")->required();
  assoc->add_option("--split-k", split_k, "Split index of the two-group Fisher test");

  auto* pan = app.add_subcommand("power-analytic", "Closed-form bivariate power table");
  pan->add_option("--out", out_dir, "Output directory")->required();
  PowerGrid grid = PowerGrid::default_grid();
  double alpha = grid.alpha;
  std::vector<int> n_values;
  std::vector<double> v1_values, v2_values;
  pan->add_option("--alpha", alpha, "Significance level");
  pan->add_option("--n", n_values, "Sample sizes");
  pan->add_option("--v1", v1_values, "Trait-1 variance fractions");
  pan->add_option("--v2", v2_values, "Trait-2 variance fractions");

  auto* pmc = app.add_subcommand("power-mc", "Monte Carlo power study from a scenario");
  pmc->add_option("--scenario", scenario_path, "Scenario file")->required();
  pmc->add_option("--out", out_dir, "Output directory")->required();
  pmc->add_option("--threads", threads, "Worker threads");
  auto* pmc_seed = pmc->add_option("--seed", seed_override, "Seed override");

  auto* cal = app.add_subcommand("calibrate-null", "Genomic inflation under a null scenario");
  cal->add_option("--scenario", scenario_path, "Scenario file")->required();
  cal->add_option("--out", out_dir, "Output directory")->required();
  cal->add_option("--threads", threads, "Worker threads");
  auto* cal_seed = cal->add_option("--seed", seed_override, "Seed override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help / --version
    }
    std::cerr << "error: usage: " << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    if (sim->parsed()) {
      return cmd_simulate(scenario_path, out_dir, !sim_seed->empty(), seed_override);
    }
    if (pca->parsed()) {
      return cmd_pca(data_path, out_dir);
    }
    if (assoc->parsed()) {
      return cmd_assoc(data_path, out_dir, split_k);
    }
    if (pan->parsed()) {
      grid.alpha = alpha;
      if (!n_values.empty()) grid.n_values = n_values;
      if (!v1_values.empty()) grid.v1_values = v1_values;
      if (!v2_values.empty()) grid.v2_values = v2_values;
      return cmd_power_analytic(out_dir, grid);
    }
    if (pmc->parsed()) {
      return cmd_power_mc(scenario_path, out_dir, threads, !pmc_seed->empty(), seed_override);
    }
    if (cal->parsed()) {
      return cmd_calibrate_null(scenario_path, out_dir, threads, !cal_seed->empty(),
                                seed_override);
    }
  } catch (const ScenarioError& e) {
    std::string all;
    for (const std::string& issue : e.issues()) {
      if (!all.empty()) all += " | ";
      all += issue;
    }
    std::cerr << "error: scenario: " << one_line(all) << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: domain: " << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: input: " << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime: " << one_line(e.what()) << "\n";
    return 1;
  }
  return 0;
}
