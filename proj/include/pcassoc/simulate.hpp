#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "pcassoc/rng.hpp"

namespace pcassoc {

enum class GenotypeCoding { biallelic, gaussian };
enum class EffectSign { concordant, opposite };
enum class TraitSelection { uniform, correlation_weighted };
enum class SignMode { all_positive, random_sign };
enum class LatentScheme { sc1, sc2, sc3 };

struct GenotypeVector {
  Eigen::VectorXd values;
  GenotypeCoding coding = GenotypeCoding::biallelic;
  double maf = 0.0;  // only meaningful for biallelic coding
};

/// Allele-dosage genotype standardized to mean 0, variance 1. Biallelic mode
/// draws counts {0,1,2} under Hardy-Weinberg at the given minor allele
/// frequency and standardizes by the population moments; gaussian mode draws
/// standard normals.
GenotypeVector gen_genotype(int n, double maf, GenotypeCoding coding, RandomStream& rng);

// ---------------------------------------------------------------------------
// Two traits sharing one unobserved factor plus a genetic effect.

struct BivariateParams {
  double c = 0.0;   // shared-variance fraction
  double v1 = 0.0;  // genetic variance fraction of trait 1
  double v2 = 0.0;  // genetic variance fraction of trait 2
  EffectSign sign2 = EffectSign::concordant;
  GenotypeCoding coding = GenotypeCoding::biallelic;
  double maf = 0.3;

  void validate() const;  // throws std::domain_error
};

struct BivariateData {
  Eigen::MatrixXd phenotypes;  // n x 2
  GenotypeVector genotype;
};

BivariateData simulate_bivariate(int n, const BivariateParams& p, RandomStream& rng);

// ---------------------------------------------------------------------------
// Several traits with a target correlation matrix and a sparse genetic
// architecture drawn per call.

struct MultiTraitScenario {
  Eigen::MatrixXd corr;  // symmetric, unit diagonal, PSD
  int k_assoc = 0;       // number of genetically affected traits
  double v_lo = 0.001;
  double v_hi = 0.005;
  TraitSelection selection = TraitSelection::uniform;
  SignMode signs = SignMode::all_positive;
  GenotypeCoding coding = GenotypeCoding::biallelic;
  double maf = 0.3;

  void validate() const;
};

struct MultiTraitData {
  Eigen::MatrixXd phenotypes;  // n x p
  GenotypeVector genotype;
  std::vector<int> affected;       // trait indices carrying a genetic effect
  Eigen::VectorXd variance_share;  // per trait, 0 when unaffected
  Eigen::VectorXd effect_sign;     // per trait, +-1 when affected, 0 otherwise
};

/// Preset correlation patterns: "model1" and "model2" are gradients of
/// moderate/strong to low correlation, "model3" and "model4" are uniform 0.3
/// and 0.7.
Eigen::MatrixXd preset_correlation(const std::string& name);

/// Trait-selection weights: per trait the summed absolute correlation with
/// all other traits, normalized to sum 1.
Eigen::VectorXd correlation_selection_weights(const Eigen::MatrixXd& corr);

/// Weighted sampling of k distinct indices (sequential draw without
/// replacement). Weights need not be normalized.
std::vector<int> select_traits(const Eigen::VectorXd& weights, int k, RandomStream& rng);

/// Precomputes the residual factor and selection weights once so that many
/// replicates can be drawn cheaply.
class MultiTraitSampler {
 public:
  explicit MultiTraitSampler(MultiTraitScenario scenario);
  MultiTraitData sample(int n, RandomStream& rng) const;
  const MultiTraitScenario& scenario() const { return scenario_; }

 private:
  MultiTraitScenario scenario_;
  Eigen::MatrixXd factor_;  // L with L * L^T = corr
  Eigen::VectorXd weights_;
};

MultiTraitData simulate_multitrait(int n, const MultiTraitScenario& s, RandomStream& rng);

// ---------------------------------------------------------------------------
// Many traits driven by latent variables.
//
// sc1: independent latents generate the correlation; genetic effects act
//      directly on traits (per-trait shares in `gamma`).
// sc2: same latent structure; genetic effects are routed through a subset of
//      latents (per-latent shares in `delta`).
// sc3: a much larger latent layer organized in clusters of traits, genetics
//      on latents as in sc2.

struct LatentSchemeParams {
  LatentScheme scheme = LatentScheme::sc1;
  int n_phe = 0;
  int n_latent = 0;
  Eigen::MatrixXd beta;    // n_latent x n_phe, per-trait columns of unit squared norm
  Eigen::VectorXd c_vec;   // per-trait latent variance share
  Eigen::VectorXd gamma;   // per-trait direct genetic share (sc1), else empty/zero
  Eigen::VectorXd delta;   // per-latent genetic share (sc2/sc3), else empty/zero
  GenotypeCoding coding = GenotypeCoding::biallelic;
  double maf = 0.3;

  void validate() const;
};

struct CorrelationSummary {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

struct LatentData {
  Eigen::MatrixXd phenotypes;  // n x n_phe
  GenotypeVector genotype;
  std::vector<int> affected;       // traits (sc1) or latents (sc2/sc3)
  Eigen::VectorXd variance_share;  // gamma (sc1) or delta (sc2/sc3) realized
  CorrelationSummary implied_correlation;
};

/// Population trait-trait correlation implied by the latent structure
/// (genetic contributions excluded).
Eigen::MatrixXd implied_correlation(const LatentSchemeParams& p);

CorrelationSummary summarize_offdiagonal(const Eigen::MatrixXd& corr);

LatentData simulate_latent_scheme(int n, const LatentSchemeParams& p, RandomStream& rng);

/// Validates the structure once and redraws the genetic architecture per
/// call: affected traits (sc1) or latents (sc2/sc3) plus their variance
/// shares, then one dataset. Used by the experiment engine where thousands
/// of replicates share one structure.
class LatentSampler {
 public:
  struct GeneticPolicy {
    int k_assoc = 0;
    double v_lo = 0.001;
    double v_hi = 0.005;
    TraitSelection selection = TraitSelection::uniform;  // sc1 traits only
  };

  explicit LatentSampler(LatentSchemeParams structure);
  LatentData sample(int n, const GeneticPolicy& policy, RandomStream& rng) const;

  const LatentSchemeParams& params() const { return params_; }
  const Eigen::MatrixXd& implied() const { return implied_; }

 private:
  LatentSchemeParams params_;
  Eigen::MatrixXd implied_;
  Eigen::VectorXd corr_weights_;
  CorrelationSummary summary_;
};

/// Default structural parameterizations. The weight draws are deterministic
/// in `structure_seed`; genetic shares start at zero and are filled in by the
/// caller (directly or through an experiment scenario).
LatentSchemeParams make_sc1(int n_phe = 100, int n_latent = 30,
                            std::uint64_t structure_seed = 0x5c1);
LatentSchemeParams make_sc2(int n_phe = 100, int n_latent = 30,
                            std::uint64_t structure_seed = 0x5c2);
LatentSchemeParams make_sc3(int n_phe = 100, int n_latent = 1000, int n_clusters = 10,
                            std::uint64_t structure_seed = 0x5c3);

}  // namespace pcassoc
