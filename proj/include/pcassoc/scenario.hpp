#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pcassoc/simulate.hpp"

namespace pcassoc {

enum class GeneratorKind { bivariate, multitrait, latent };

/// Which statistics a study computes. `trait`/`pc` expand to one entry per
/// trait/component; `group` combines the components with eigenvalue ranks in
/// [lo, hi]; `fisher_split` is the two-group Fisher combination at split K.
struct TestSpec {
  enum class Kind {
    trait,
    trait_affected,
    pc,
    best_pc,
    combined_pc,
    fisher_split,
    group,
    manova,
  };
  Kind kind = Kind::combined_pc;
  int k = 0;   // fisher_split only
  int lo = 0;  // group only, 1-based inclusive
  int hi = 0;

  std::string to_string() const;
  static TestSpec parse(const std::string& token);  // throws std::domain_error
};

struct BivariateConfig {
  BivariateParams params;  // includes genotype coding + maf
};

struct MultiTraitConfig {
  std::string model = "model3";  // preset name, or "file" with corr loaded
  MultiTraitScenario scenario;
};

struct LatentConfig {
  LatentScheme scheme = LatentScheme::sc1;
  int n_phe = 100;
  int n_latent = 30;
  int n_clusters = 10;  // sc3 only
  std::uint64_t structure_seed = 0;  // 0 = scheme default
  int k_assoc = 0;      // affected traits (sc1) or latents (sc2/sc3)
  double v_lo = 0.001;
  double v_hi = 0.005;
  TraitSelection selection = TraitSelection::uniform;
  GenotypeCoding coding = GenotypeCoding::biallelic;
  double maf = 0.3;
};

/// Complete description of a simulation experiment. Parsed from a flat
/// key-value scenario file; the seed is mandatory.
struct Scenario {
  GeneratorKind kind = GeneratorKind::multitrait;
  BivariateConfig bivariate;
  MultiTraitConfig multitrait;
  LatentConfig latent;

  int n = 2000;
  int replicates = 1;
  double alpha = 5e-8;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int bonferroni_factor = 0;  // 0 = number of components
  std::vector<TestSpec> tests;

  int trait_count() const;
  bool has_genetic_effect() const;
};

/// Parse error carrying every violation found, not just the first.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

Scenario parse_scenario(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<string>");

/// Canonical key-value form; parses back to an equal scenario.
std::string serialize_scenario(const Scenario& s);

}  // namespace pcassoc
