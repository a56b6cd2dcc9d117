#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pcassoc/assoc.hpp"
#include "pcassoc/chisq.hpp"
#include "pcassoc/experiment.hpp"
#include "pcassoc/pca.hpp"
#include "pcassoc/power.hpp"
#include "pcassoc/scenario.hpp"
#include "pcassoc/simulate.hpp"
#include "pcassoc/version.hpp"

namespace py = pybind11;
using namespace pcassoc;

namespace {

EffectSign sign_from_string(const std::string& s) {
  if (s == "concordant") return EffectSign::concordant;
  if (s == "opposite") return EffectSign::opposite;
  throw std::domain_error("sign must be 'concordant' or 'opposite'");
}

GenotypeCoding coding_from_string(const std::string& s) {
  if (s == "biallelic") return GenotypeCoding::biallelic;
  if (s == "gaussian") return GenotypeCoding::gaussian;
  throw std::domain_error("coding must be 'biallelic' or 'gaussian'");
}

TraitSelection selection_from_string(const std::string& s) {
  if (s == "uniform") return TraitSelection::uniform;
  if (s == "correlation-weighted") return TraitSelection::correlation_weighted;
  throw std::domain_error("selection must be 'uniform' or 'correlation-weighted'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "PCA-based multivariate association testing for correlated traits";
  m.attr("__version__") = kVersion;

  // distribution kernels
  m.def("chisq_cdf", &chisq_cdf, py::arg("x"), py::arg("df"));
  m.def("noncentral_chisq_cdf", &noncentral_chisq_cdf, py::arg("x"), py::arg("df"),
        py::arg("ncp"));
  m.def("chisq_quantile", &chisq_quantile, py::arg("p"), py::arg("df"));
  m.def("log_pvalue_from_chisq", &log_pvalue_from_chisq, py::arg("x"), py::arg("df"));
  m.def("normal_cdf", &normal_cdf, py::arg("z"));
  m.def("normal_quantile", &normal_quantile, py::arg("p"));

  // closed-form bivariate theory
  m.def("pc_variance_fractions", &pc_variance_fractions, py::arg("c"), py::arg("v1"),
        py::arg("v2"));
  m.def(
      "pc_genetic_variance",
      [](double c, double v1, double v2, const std::string& sign) {
        return pc_genetic_variance(c, v1, v2, sign_from_string(sign));
      },
      py::arg("c"), py::arg("v1"), py::arg("v2"), py::arg("sign") = "concordant");
  m.def("power_1df", &power_1df, py::arg("n"), py::arg("v"), py::arg("alpha"));
  m.def("power_2df", &power_2df, py::arg("n"), py::arg("v_pc1"), py::arg("v_pc2"),
        py::arg("alpha"));
  m.def("power_curves_default", []() {
    std::vector<py::dict> out;
    for (const PowerCurveRow& r : power_curves(PowerGrid::default_grid())) {
      py::dict d;
      d["c"] = r.c;
      d["n"] = r.n;
      d["v1"] = r.v1;
      d["v2"] = r.v2;
      d["sign"] = r.sign == EffectSign::concordant ? "concordant" : "opposite";
      d["alpha"] = r.alpha;
      d["power_Y1"] = r.power_y1;
      d["power_PC1"] = r.power_pc1;
      d["power_PC2"] = r.power_pc2;
      d["power_combined"] = r.power_combined;
      out.push_back(std::move(d));
    }
    return out;
  });

  // PCA
  py::class_<PcaModel>(m, "PcaModel")
      .def_readonly("means", &PcaModel::means)
      .def_readonly("sds", &PcaModel::sds)
      .def_readonly("loadings", &PcaModel::loadings)
      .def_readonly("eigenvalues", &PcaModel::eigenvalues)
      .def_property_readonly("variance_explained", &PcaModel::variance_explained);
  m.def("fit_pca", &fit_pca, py::arg("Y"));
  m.def("project_scores", &project_scores, py::arg("model"), py::arg("Y"));

  // association tests
  py::class_<AssocResult>(m, "AssocResult")
      .def_readonly("beta", &AssocResult::beta)
      .def_readonly("chi2", &AssocResult::chi2)
      .def_readonly("log_p", &AssocResult::log_p);
  py::class_<GroupTestResult>(m, "GroupTestResult")
      .def_readonly("statistic", &GroupTestResult::statistic)
      .def_readonly("df", &GroupTestResult::df)
      .def_readonly("log_p", &GroupTestResult::log_p)
      .def_readonly("grouping", &GroupTestResult::grouping);
  py::class_<BestPcResult>(m, "BestPcResult")
      .def_readonly("best", &BestPcResult::best)
      .def_readonly("index", &BestPcResult::index)
      .def_readonly("log_p_adjusted", &BestPcResult::log_p_adjusted);

  m.def("univariate_wald", &univariate_wald, py::arg("y"), py::arg("g"));
  m.def("combined_pc_test", &combined_pc_test, py::arg("scores"), py::arg("g"));
  m.def("best_pc_test", &best_pc_test, py::arg("scores"), py::arg("g"));
  m.def("fisher_group_test", &fisher_group_test, py::arg("pc_chi2"), py::arg("K"));
  m.def(
      "eigen_partition_scan",
      [](const std::vector<double>& pc_chi2) {
        std::vector<py::dict> out;
        for (const PartitionScanRow& r : eigen_partition_scan(pc_chi2)) {
          py::dict d;
          d["n"] = r.n;
          d["top_statistic"] = r.top.statistic;
          d["top_df"] = r.top.df;
          d["top_log_p"] = r.top.log_p;
          d["bottom_statistic"] = r.bottom.statistic;
          d["bottom_df"] = r.bottom.df;
          d["bottom_log_p"] = r.bottom.log_p;
          out.push_back(std::move(d));
        }
        return out;
      },
      py::arg("pc_chi2"));
  m.def("manova_wilks_log_p", &manova_wilks_log_p, py::arg("Y"), py::arg("g"));
  m.def("residualize_covariates", &residualize_covariates, py::arg("y"), py::arg("X"));

  // simulation
  m.def(
      "gen_genotype",
      [](int n, double maf, const std::string& coding, std::uint64_t seed) {
        RandomStream rng(seed);
        return gen_genotype(n, maf, coding_from_string(coding), rng).values;
      },
      py::arg("n"), py::arg("maf") = 0.3, py::arg("coding") = "biallelic", py::arg("seed"));
  m.def("preset_correlation", &preset_correlation, py::arg("name"));
  m.def(
      "simulate_bivariate",
      [](int n, double c, double v1, double v2, const std::string& sign,
         const std::string& coding, double maf, std::uint64_t seed) {
        BivariateParams p;
        p.c = c;
        p.v1 = v1;
        p.v2 = v2;
        p.sign2 = sign_from_string(sign);
        p.coding = coding_from_string(coding);
        p.maf = maf;
        RandomStream rng(seed);
        BivariateData d = simulate_bivariate(n, p, rng);
        return py::make_tuple(d.phenotypes, d.genotype.values);
      },
      py::arg("n"), py::arg("c"), py::arg("v1"), py::arg("v2"),
      py::arg("sign") = "concordant", py::arg("coding") = "biallelic", py::arg("maf") = 0.3,
      py::arg("seed"));
  m.def(
      "simulate_multitrait",
      [](int n, const Eigen::MatrixXd& corr, int k_assoc, double v_lo, double v_hi,
         const std::string& selection, bool random_signs, const std::string& coding, double maf,
         std::uint64_t seed) {
        MultiTraitScenario s;
        s.corr = corr;
        s.k_assoc = k_assoc;
        s.v_lo = v_lo;
        s.v_hi = v_hi;
        s.selection = selection_from_string(selection);
        s.signs = random_signs ? SignMode::random_sign : SignMode::all_positive;
        s.coding = coding_from_string(coding);
        s.maf = maf;
        RandomStream rng(seed);
        MultiTraitData d = simulate_multitrait(n, s, rng);
        return py::make_tuple(d.phenotypes, d.genotype.values, d.affected, d.variance_share);
      },
      py::arg("n"), py::arg("corr"), py::arg("k_assoc") = 0, py::arg("v_lo") = 0.001,
      py::arg("v_hi") = 0.005, py::arg("selection") = "uniform",
      py::arg("random_signs") = false, py::arg("coding") = "biallelic", py::arg("maf") = 0.3,
      py::arg("seed"));

  py::class_<LatentSchemeParams>(m, "LatentSchemeParams")
      .def_readonly("n_phe", &LatentSchemeParams::n_phe)
      .def_readonly("n_latent", &LatentSchemeParams::n_latent)
      .def_readonly("beta", &LatentSchemeParams::beta)
      .def_readonly("c_vec", &LatentSchemeParams::c_vec);
  m.def("make_sc1", &make_sc1, py::arg("n_phe") = 100, py::arg("n_latent") = 30,
        py::arg("structure_seed") = 0x5c1);
  m.def("make_sc2", &make_sc2, py::arg("n_phe") = 100, py::arg("n_latent") = 30,
        py::arg("structure_seed") = 0x5c2);
  m.def("make_sc3", &make_sc3, py::arg("n_phe") = 100, py::arg("n_latent") = 1000,
        py::arg("n_clusters") = 10, py::arg("structure_seed") = 0x5c3);
  m.def(
      "simulate_latent_sc1",
      [](int n, int k_assoc, double v_lo, double v_hi, const std::string& selection,
         std::uint64_t seed, int n_phe, int n_latent, std::uint64_t structure_seed) {
        LatentSampler sampler(make_sc1(n_phe, n_latent, structure_seed));
        LatentSampler::GeneticPolicy policy{k_assoc, v_lo, v_hi,
                                            selection_from_string(selection)};
        RandomStream rng(seed);
        LatentData d = sampler.sample(n, policy, rng);
        return py::make_tuple(d.phenotypes, d.genotype.values, d.affected);
      },
      py::arg("n"), py::arg("k_assoc") = 0, py::arg("v_lo") = 0.001, py::arg("v_hi") = 0.005,
      py::arg("selection") = "uniform", py::arg("seed"), py::arg("n_phe") = 100,
      py::arg("n_latent") = 30, py::arg("structure_seed") = 0x5c1);

  // experiment engine (scenario files)
  m.def(
      "run_power_study_file",
      [](const std::string& path, int threads) {
        const Scenario s = parse_scenario(path);
        const StudyReport report = run_power_study(s, threads);
        std::vector<py::dict> out;
        for (const PowerEstimate& e : report.tests) {
          py::dict d;
          d["test"] = e.test;
          d["power"] = e.power;
          d["se"] = e.se;
          if (e.power_adjusted >= 0.0) d["power_adjusted"] = e.power_adjusted;
          out.push_back(std::move(d));
        }
        return out;
      },
      py::arg("path"), py::arg("threads") = 1);
  m.def(
      "calibrate_null_file",
      [](const std::string& path, int threads) {
        const Scenario s = parse_scenario(path);
        const NullCalibration cal = calibrate_null(s, threads);
        std::vector<py::dict> out;
        for (const TestCalibration& tc : cal.tests) {
          py::dict d;
          d["test"] = tc.test;
          d["lambda"] = tc.lambda;
          out.push_back(std::move(d));
        }
        return out;
      },
      py::arg("path"), py::arg("threads") = 1);
}
