#include "pcassoc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "pcassoc/assoc.hpp"
#include "pcassoc/chisq.hpp"
#include "pcassoc/pca.hpp"

namespace pcassoc {

namespace {

struct GeneratedData {
  Eigen::MatrixXd phenotypes;
  Eigen::VectorXd genotype;
  std::vector<int> affected;  // trait indices (empty for sc2/sc3 latents)
};

// Prepared generator shared by all replicates of one scenario.
class Generator {
 public:
  explicit Generator(const Scenario& s) : scenario_(s) {
    switch (s.kind) {
      case GeneratorKind::bivariate:
        s.bivariate.params.validate();
        break;
      case GeneratorKind::multitrait:
        multi_ = std::make_unique<MultiTraitSampler>(s.multitrait.scenario);
        break;
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
        latent_ = std::make_unique<LatentSampler>(std::move(structure));
        policy_.k_assoc = cfg.k_assoc;
        policy_.v_lo = cfg.v_lo;
        policy_.v_hi = cfg.v_hi;
        policy_.selection = cfg.selection;
        break;
      }
    }
  }

  GeneratedData draw(int n, RandomStream& rng) const {
    GeneratedData d;
    switch (scenario_.kind) {
      case GeneratorKind::bivariate: {
        BivariateData b = simulate_bivariate(n, scenario_.bivariate.params, rng);
        d.phenotypes = std::move(b.phenotypes);
        d.genotype = std::move(b.genotype.values);
        if (scenario_.bivariate.params.v1 > 0.0) d.affected.push_back(0);
        if (scenario_.bivariate.params.v2 > 0.0) d.affected.push_back(1);
        break;
      }
      case GeneratorKind::multitrait: {
        MultiTraitData m = multi_->sample(n, rng);
        d.phenotypes = std::move(m.phenotypes);
        d.genotype = std::move(m.genotype.values);
        d.affected = std::move(m.affected);
        break;
      }
      case GeneratorKind::latent: {
        LatentData l = latent_->sample(n, policy_, rng);
        d.phenotypes = std::move(l.phenotypes);
        d.genotype = std::move(l.genotype.values);
        if (scenario_.latent.scheme == LatentScheme::sc1) d.affected = std::move(l.affected);
        break;
      }
    }
    return d;
  }

 private:
  const Scenario& scenario_;
  std::unique_ptr<MultiTraitSampler> multi_;
  std::unique_ptr<LatentSampler> latent_;
  LatentSampler::GeneticPolicy policy_;
};

std::vector<TestSpec> effective_tests(const Scenario& s) {
  std::vector<TestSpec> specs;
  for (const TestSpec& t : s.tests) {
    if (t.kind == TestSpec::Kind::trait_affected && !s.has_genetic_effect()) continue;
    specs.push_back(t);
  }
  return specs;
}

// Per-replicate battery. Component statistics are computed in score space
// through the correlation eigendecomposition: for component i with loadings
// w_i, corr(score_i, g) = w_i' X' g_c / sqrt((n-1) lambda_i g_c'g_c), which
// matches univariate_wald on the projected score exactly.
class Battery {
 public:
  explicit Battery(const Scenario& s) : specs_(effective_tests(s)) {}

  ReplicateResult run(const GeneratedData& d) const {
    const Eigen::Index n = d.phenotypes.rows();
    const Eigen::Index p = d.phenotypes.cols();
    const double nd = static_cast<double>(n);

    const Eigen::MatrixXd x = standardize_columns(d.phenotypes);
    Eigen::VectorXd gc = d.genotype.array() - d.genotype.mean();
    const double sgg = gc.squaredNorm();
    if (!(sgg > 0.0)) throw std::invalid_argument("experiment: genotype is constant");

    const Eigen::VectorXd xg = x.transpose() * gc;  // p

    // trait statistics
    std::vector<double> trait_chi2(p);
    for (Eigen::Index j = 0; j < p; ++j) {
      const double r = xg[j] / std::sqrt(static_cast<double>(n - 1) * sgg);
      trait_chi2[j] = nd * r * r;
    }

    // component statistics, eigenvalue-descending
    Eigen::MatrixXd corr = (x.transpose() * x) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("experiment: eigendecomposition failed");
    }
    std::vector<double> pc_chi2(p);
    double r2 = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const Eigen::Index src = p - 1 - j;  // ascending -> descending
      const double lam = std::max(es.eigenvalues()[src], 1e-12);
      const double num = es.eigenvectors().col(src).dot(xg);
      const double r2_j = num * num / (static_cast<double>(n - 1) * lam * sgg);
      pc_chi2[j] = nd * r2_j;
      r2 += r2_j;
    }

    ReplicateResult out;
    out.outcomes.reserve(specs_.size() + 2 * p);
    for (const TestSpec& t : specs_) {
      switch (t.kind) {
        case TestSpec::Kind::trait:
          for (Eigen::Index j = 0; j < p; ++j) {
            out.outcomes.push_back(
                {trait_chi2[j], 1, log_pvalue_from_chisq(trait_chi2[j], 1)});
          }
          break;
        case TestSpec::Kind::trait_affected: {
          const int j = d.affected.empty() ? 0 : d.affected.front();
          out.outcomes.push_back({trait_chi2[j], 1, log_pvalue_from_chisq(trait_chi2[j], 1)});
          break;
        }
        case TestSpec::Kind::pc:
          for (Eigen::Index j = 0; j < p; ++j) {
            out.outcomes.push_back({pc_chi2[j], 1, log_pvalue_from_chisq(pc_chi2[j], 1)});
          }
          break;
        case TestSpec::Kind::best_pc: {
          double best = 0.0;
          for (Eigen::Index j = 0; j < p; ++j) best = std::max(best, pc_chi2[j]);
          const double log_p = std::min(
              0.0, log_pvalue_from_chisq(best, 1) + std::log(static_cast<double>(p)));
          out.outcomes.push_back({best, 1, log_p});
          break;
        }
        case TestSpec::Kind::combined_pc: {
          double sum = 0.0;
          for (double v : pc_chi2) sum += v;
          out.outcomes.push_back(
              {sum, static_cast<int>(p), log_pvalue_from_chisq(sum, static_cast<int>(p))});
          break;
        }
        case TestSpec::Kind::fisher_split: {
          const GroupTestResult r = fisher_group_test(pc_chi2, t.k);
          out.outcomes.push_back({r.statistic, r.df, r.log_p});
          break;
        }
        case TestSpec::Kind::group: {
          const GroupTestResult r = group_test(pc_chi2, t.lo, t.hi);
          out.outcomes.push_back({r.statistic, r.df, r.log_p});
          break;
        }
        case TestSpec::Kind::manova: {
          const double log_p = manova_wilks_log_p_from_r2(std::min(r2, 1.0 - 1e-15), n, p);
          out.outcomes.push_back({r2 * nd, static_cast<int>(p), log_p});
          break;
        }
      }
    }
    return out;
  }

 private:
  std::vector<TestSpec> specs_;
};

}  // namespace

std::vector<std::string> resolved_test_names(const Scenario& s) {
  const int p = s.trait_count();
  std::vector<std::string> names;
  for (const TestSpec& t : effective_tests(s)) {
    switch (t.kind) {
      case TestSpec::Kind::trait:
        for (int j = 1; j <= p; ++j) names.push_back("Y" + std::to_string(j));
        break;
      case TestSpec::Kind::trait_affected:
        names.push_back("Y_affected");
        break;
      case TestSpec::Kind::pc:
        for (int j = 1; j <= p; ++j) names.push_back("PC" + std::to_string(j));
        break;
      case TestSpec::Kind::best_pc:
        names.push_back("bestPC");
        break;
      case TestSpec::Kind::combined_pc:
        names.push_back("combPC");
        break;
      case TestSpec::Kind::fisher_split:
        names.push_back("fisherSplit" + std::to_string(t.k));
        break;
      case TestSpec::Kind::group:
        names.push_back("PC" + std::to_string(t.lo) + "-" + std::to_string(t.hi));
        break;
      case TestSpec::Kind::manova:
        names.push_back("MANOVA");
        break;
    }
  }
  return names;
}

std::vector<ReplicateResult> run_replicates(const Scenario& s, int threads) {
  if (s.replicates < 1) throw std::domain_error("experiment: need replicates >= 1");
  if (threads < 1) threads = 1;

  const Generator generator(s);
  const Battery battery(s);
  std::vector<ReplicateResult> results(s.replicates);

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::string error;

  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      const int idx = next.fetch_add(1);
      if (idx >= s.replicates) break;
      try {
        RandomStream rng = RandomStream::for_replicate(s.seed, static_cast<std::uint64_t>(idx));
        const GeneratedData data = generator.draw(s.n, rng);
        results[idx] = battery.run(data);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) {
          error = "replicate " + std::to_string(idx) + ": " + e.what();
        }
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw std::runtime_error(error);
  return results;
}

StudyReport run_power_study(const Scenario& s, int threads) {
  if (!s.has_genetic_effect()) {
    throw std::domain_error("power study: scenario has no genetic effect (use calibrate_null)");
  }
  const std::vector<std::string> names = resolved_test_names(s);
  const std::vector<ReplicateResult> reps = run_replicates(s, threads);
  const double log_alpha = std::log(s.alpha);
  const int p = s.trait_count();
  const int factor = s.bonferroni_factor > 0 ? s.bonferroni_factor : p;
  const double log_factor = std::log(static_cast<double>(factor));

  // adjusted rates apply to the per-trait and per-component columns
  std::vector<bool> adjustable(names.size(), false);
  {
    size_t idx = 0;
    for (const TestSpec& t : effective_tests(s)) {
      const size_t width =
          (t.kind == TestSpec::Kind::trait || t.kind == TestSpec::Kind::pc) ? p : 1;
      const bool adj = t.kind == TestSpec::Kind::trait || t.kind == TestSpec::Kind::pc;
      for (size_t j = 0; j < width; ++j) adjustable[idx + j] = adj;
      idx += width;
    }
  }

  StudyReport report;
  report.replicates = s.replicates;
  report.alpha = s.alpha;
  report.bonferroni_factor = factor;
  report.tests.resize(names.size());
  const double r = static_cast<double>(s.replicates);
  for (size_t t = 0; t < names.size(); ++t) {
    long hits = 0, hits_adj = 0;
    for (const ReplicateResult& rep : reps) {
      const double log_p = rep.outcomes[t].log_p;
      if (log_p <= log_alpha) ++hits;
      if (adjustable[t] && std::min(0.0, log_p + log_factor) <= log_alpha) ++hits_adj;
    }
    PowerEstimate& e = report.tests[t];
    e.test = names[t];
    e.power = hits / r;
    e.se = std::sqrt(e.power * (1.0 - e.power) / r);
    e.power_adjusted = adjustable[t] ? hits_adj / r : -1.0;
  }
  return report;
}

double chisq1_median() { return 0.45493642311957283; }

NullCalibration calibrate_null(const Scenario& s, int threads) {
  if (s.has_genetic_effect()) {
    throw std::domain_error("calibrate_null: scenario must have no genetic effect");
  }
  const std::vector<std::string> names = resolved_test_names(s);
  const std::vector<ReplicateResult> reps = run_replicates(s, threads);
  const double r = static_cast<double>(s.replicates);

  NullCalibration cal;
  cal.replicates = s.replicates;
  cal.tests.resize(names.size());
  for (size_t t = 0; t < names.size(); ++t) {
    std::vector<double> chi1(reps.size());
    std::vector<double> neglog10(reps.size());
    for (size_t i = 0; i < reps.size(); ++i) {
      const TestOutcome& o = reps[i].outcomes[t];
      neglog10[i] = -o.log_p / std::numbers::ln10;
      if (o.df == 1) {
        chi1[i] = o.statistic;
      } else {
        // map through the p-value to a 1-df equivalent
        double q = -std::expm1(o.log_p);  // 1 - p
        q = std::min(std::max(q, 1e-300), 1.0 - 1e-16);
        chi1[i] = chisq_quantile(q, 1);
      }
    }
    std::sort(chi1.begin(), chi1.end());
    const size_t half = chi1.size() / 2;
    const double median = chi1.size() % 2 == 1
                              ? chi1[half]
                              : 0.5 * (chi1[half - 1] + chi1[half]);

    TestCalibration& tc = cal.tests[t];
    tc.test = names[t];
    tc.lambda = median / chisq1_median();
    std::sort(neglog10.begin(), neglog10.end());
    tc.qq.resize(neglog10.size());
    for (size_t i = 0; i < neglog10.size(); ++i) {
      // smallest observed p (largest -log10) pairs with the smallest expected quantile
      tc.qq[i].expected = -std::log10((static_cast<double>(reps.size() - i) - 0.5) / r);
      tc.qq[i].observed = neglog10[i];
    }
  }
  return cal;
}

}  // namespace pcassoc
