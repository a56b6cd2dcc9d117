#include "pcassoc/simulate.hpp"
#include <cstdio>
#include <cstdlib>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pcassoc {

namespace {

void fill_normal(Eigen::Ref<Eigen::MatrixXd> m, RandomStream& rng) {
  // column-major fill order, part of the reproducibility contract
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      m(i, j) = rng.normal();
    }
  }
}

void check_correlation_matrix(const Eigen::MatrixXd& r,
                              Eigen::MatrixXd* factor_out = nullptr) {
  const Eigen::Index p = r.rows();
  if (p < 2 || r.cols() != p) {
    throw std::domain_error("correlation matrix must be square with >= 2 traits");
  }
  if (!r.isApprox(r.transpose(), 1e-12)) {
    throw std::domain_error("correlation matrix must be symmetric");
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    if (std::fabs(r(i, i) - 1.0) > 1e-12) {
      throw std::domain_error("correlation matrix must have unit diagonal");
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition of correlation matrix failed");
  }
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -1e-10) {
    throw std::domain_error("correlation matrix is not positive semi-definite: eigenvalue " +
                            std::to_string(min_eig));
  }
  if (factor_out != nullptr) {
    bool done = false;
    if (min_eig > 1e-12) {
      Eigen::LLT<Eigen::MatrixXd> llt(r);
      if (llt.info() == Eigen::Success) {
        *factor_out = llt.matrixL();
        done = true;
      }
    }
    if (!done) {
      // semi-definite after clipping: use the eigen square root
      Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
      *factor_out = es.eigenvectors() * lam.asDiagonal();
    }
  }
}

}  // namespace

GenotypeVector gen_genotype(int n, double maf, GenotypeCoding coding, RandomStream& rng) {
  if (n < 2) throw std::domain_error("gen_genotype: need n >= 2");
  GenotypeVector g;
  g.coding = coding;
  g.values.resize(n);
  if (coding == GenotypeCoding::gaussian) {
    g.maf = 0.0;
    for (int i = 0; i < n; ++i) g.values[i] = rng.normal();
    return g;
  }
  if (!(maf > 0.0 && maf <= 0.5)) {
    throw std::domain_error("gen_genotype: maf must be in (0, 0.5], got " + std::to_string(maf));
  }
  g.maf = maf;
  const double p0 = (1.0 - maf) * (1.0 - maf);      // no minor allele
  const double p1 = 2.0 * maf * (1.0 - maf);        // heterozygote
  const double mean = 2.0 * maf;
  const double sd = std::sqrt(2.0 * maf * (1.0 - maf));
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    const double count = u < p0 ? 0.0 : (u < p0 + p1 ? 1.0 : 2.0);
    g.values[i] = (count - mean) / sd;
  }
  return g;
}

// ---------------------------------------------------------------------------

void BivariateParams::validate() const {
  if (!(c >= 0.0 && c < 1.0)) throw std::domain_error("bivariate: c must be in [0, 1)");
  if (!(v1 >= 0.0 && v1 < 1.0) || !(v2 >= 0.0 && v2 < 1.0)) {
    throw std::domain_error("bivariate: v1, v2 must be in [0, 1)");
  }
  if (c + std::max(v1, v2) > 1.0) {
    throw std::domain_error("bivariate: c + max(v1, v2) must be <= 1");
  }
  if (coding == GenotypeCoding::biallelic && !(maf > 0.0 && maf <= 0.5)) {
    throw std::domain_error("bivariate: maf must be in (0, 0.5]");
  }
}

BivariateData simulate_bivariate(int n, const BivariateParams& p, RandomStream& rng) {
  p.validate();
  if (n < 2) throw std::domain_error("simulate_bivariate: need n >= 2");

  BivariateData out;
  out.genotype = gen_genotype(n, p.maf, p.coding, rng);
  const Eigen::VectorXd& g = out.genotype.values;

  Eigen::VectorXd u(n), e1(n), e2(n);
  for (int i = 0; i < n; ++i) u[i] = rng.normal();
  for (int i = 0; i < n; ++i) e1[i] = rng.normal();
  for (int i = 0; i < n; ++i) e2[i] = rng.normal();

  const double s2 = p.sign2 == EffectSign::concordant ? 1.0 : -1.0;
  out.phenotypes.resize(n, 2);
  out.phenotypes.col(0) =
      std::sqrt(p.c) * u + std::sqrt(p.v1) * g + std::sqrt(1.0 - p.c - p.v1) * e1;
  out.phenotypes.col(1) =
      std::sqrt(p.c) * u + s2 * std::sqrt(p.v2) * g + std::sqrt(1.0 - p.c - p.v2) * e2;
  return out;
}

// ---------------------------------------------------------------------------

void MultiTraitScenario::validate() const {
  check_correlation_matrix(corr);
  const int p = static_cast<int>(corr.rows());
  if (k_assoc < 0 || k_assoc > p) {
    throw std::domain_error("multitrait: k_assoc " + std::to_string(k_assoc) +
                            " out of range for " + std::to_string(p) + " traits");
  }
  if (!(v_lo > 0.0 && v_lo <= v_hi && v_hi < 1.0)) {
    throw std::domain_error("multitrait: need 0 < v_lo <= v_hi < 1");
  }
  if (coding == GenotypeCoding::biallelic && !(maf > 0.0 && maf <= 0.5)) {
    throw std::domain_error("multitrait: maf must be in (0, 0.5]");
  }
}

Eigen::MatrixXd preset_correlation(const std::string& name) {
  Eigen::MatrixXd r(5, 5);
  if (name == "model1") {
    r << 1.00, 0.50, 0.31, 0.15, 0.07,
         0.50, 1.00, 0.31, 0.15, 0.07,
         0.31, 0.31, 1.00, 0.09, 0.04,
         0.15, 0.15, 0.09, 1.00, 0.02,
         0.07, 0.07, 0.04, 0.02, 1.00;
  } else if (name == "model2") {
    r << 1.00, 0.80, 0.63, 0.32, 0.09,
         0.80, 1.00, 0.63, 0.32, 0.09,
         0.63, 0.63, 1.00, 0.09, 0.07,
         0.32, 0.32, 0.09, 1.00, 0.03,
         0.09, 0.09, 0.07, 0.03, 1.00;
  } else if (name == "model3") {
    r.setConstant(0.30);
    r.diagonal().setOnes();
  } else if (name == "model4") {
    r.setConstant(0.70);
    r.diagonal().setOnes();
  } else {
    throw std::domain_error("unknown correlation preset: " + name);
  }
  return r;
}

Eigen::VectorXd correlation_selection_weights(const Eigen::MatrixXd& corr) {
  const Eigen::Index p = corr.rows();
  Eigen::VectorXd w(p);
  for (Eigen::Index i = 0; i < p; ++i) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (j != i) s += std::fabs(corr(i, j));
    }
    w[i] = s;
  }
  const double total = w.sum();
  if (total <= 0.0) {
    w.setConstant(1.0 / static_cast<double>(p));
  } else {
    w /= total;
  }
  return w;
}

std::vector<int> select_traits(const Eigen::VectorXd& weights, int k, RandomStream& rng) {
  const int p = static_cast<int>(weights.size());
  if (k < 0 || k > p) throw std::domain_error("select_traits: k out of range");
  Eigen::VectorXd w = weights;
  std::vector<int> picked;
  picked.reserve(k);
  for (int draw = 0; draw < k; ++draw) {
    const double total = w.sum();
    double u = rng.uniform() * total;
    int idx = p - 1;
    for (int j = 0; j < p; ++j) {
      u -= w[j];
      if (u < 0.0 && w[j] > 0.0) {
        idx = j;
        break;
      }
    }
    picked.push_back(idx);
    w[idx] = 0.0;
  }
  return picked;
}

MultiTraitSampler::MultiTraitSampler(MultiTraitScenario scenario) : scenario_(std::move(scenario)) {
  scenario_.validate();
  check_correlation_matrix(scenario_.corr, &factor_);
  if (scenario_.selection == TraitSelection::correlation_weighted) {
    weights_ = correlation_selection_weights(scenario_.corr);
  } else {
    weights_ = Eigen::VectorXd::Constant(scenario_.corr.rows(), 1.0);
  }
}

MultiTraitData MultiTraitSampler::sample(int n, RandomStream& rng) const {
  if (n < 2) throw std::domain_error("multitrait: need n >= 2");
  const int p = static_cast<int>(scenario_.corr.rows());

  MultiTraitData out;
  out.genotype = gen_genotype(n, scenario_.maf, scenario_.coding, rng);
  out.affected = select_traits(weights_, scenario_.k_assoc, rng);
  out.variance_share = Eigen::VectorXd::Zero(p);
  out.effect_sign = Eigen::VectorXd::Zero(p);
  for (int j : out.affected) {
    out.variance_share[j] =
        scenario_.v_lo + (scenario_.v_hi - scenario_.v_lo) * rng.uniform();
  }
  for (int j : out.affected) {
    out.effect_sign[j] =
        scenario_.signs == SignMode::all_positive ? 1.0 : (rng.uniform() < 0.5 ? 1.0 : -1.0);
  }

  Eigen::MatrixXd z(n, p);
  fill_normal(z, rng);
  out.phenotypes.noalias() = z * factor_.transpose();
  for (int j : out.affected) {
    const double v = out.variance_share[j];
    out.phenotypes.col(j) = std::sqrt(1.0 - v) * out.phenotypes.col(j) +
                            out.effect_sign[j] * std::sqrt(v) * out.genotype.values;
  }
  return out;
}

MultiTraitData simulate_multitrait(int n, const MultiTraitScenario& s, RandomStream& rng) {
  return MultiTraitSampler(s).sample(n, rng);
}

// ---------------------------------------------------------------------------

void LatentSchemeParams::validate() const {
  if (n_phe < 2) throw std::domain_error("latent: need n_phe >= 2");
  if (n_latent < 1) throw std::domain_error("latent: need n_latent >= 1");
  if (beta.rows() != n_latent || beta.cols() != n_phe) {
    throw std::domain_error("latent: beta must be n_latent x n_phe");
  }
  for (int j = 0; j < n_phe; ++j) {
    const double norm2 = beta.col(j).squaredNorm();
    if (std::fabs(norm2 - 1.0) > 1e-8) {
      throw std::domain_error("latent: squared weights of trait " + std::to_string(j) +
                              " sum to " + std::to_string(norm2) + ", expected 1");
    }
  }
  if (c_vec.size() != n_phe) throw std::domain_error("latent: c_vec must have n_phe entries");
  for (int j = 0; j < n_phe; ++j) {
    if (!(c_vec[j] >= 0.0 && c_vec[j] < 1.0)) {
      throw std::domain_error("latent: c_vec entries must be in [0, 1)");
    }
  }
  if (scheme == LatentScheme::sc1) {
    if (gamma.size() != n_phe) throw std::domain_error("latent: gamma must have n_phe entries");
    for (int j = 0; j < n_phe; ++j) {
      if (!(gamma[j] >= 0.0 && gamma[j] < 1.0) || c_vec[j] + gamma[j] >= 1.0) {
        throw std::domain_error("latent: need 0 <= gamma < 1 and c + gamma < 1 per trait");
      }
    }
  } else {
    if (delta.size() != n_latent) {
      throw std::domain_error("latent: delta must have n_latent entries");
    }
    for (int i = 0; i < n_latent; ++i) {
      if (!(delta[i] >= 0.0 && delta[i] < 1.0)) {
        throw std::domain_error("latent: delta entries must be in [0, 1)");
      }
    }
  }
  if (coding == GenotypeCoding::biallelic && !(maf > 0.0 && maf <= 0.5)) {
    throw std::domain_error("latent: maf must be in (0, 0.5]");
  }
}

Eigen::MatrixXd implied_correlation(const LatentSchemeParams& p) {
  Eigen::VectorXd root_c = p.c_vec.cwiseSqrt();
  Eigen::MatrixXd gram = p.beta.transpose() * p.beta;  // n_phe x n_phe
  Eigen::MatrixXd corr = root_c.asDiagonal() * gram * root_c.asDiagonal();
  corr.diagonal().setOnes();
  return corr;
}

CorrelationSummary summarize_offdiagonal(const Eigen::MatrixXd& corr) {
  CorrelationSummary s;
  const Eigen::Index p = corr.rows();
  double lo = 1.0, hi = -1.0, sum = 0.0;
  long count = 0;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      lo = std::min(lo, corr(i, j));
      hi = std::max(hi, corr(i, j));
      sum += corr(i, j);
      ++count;
    }
  }
  s.min = lo;
  s.max = hi;
  s.mean = count > 0 ? sum / static_cast<double>(count) : 0.0;
  return s;
}

namespace {

// Data draw shared by the one-shot API and the prepared sampler; the caller
// is responsible for validation. Draw order: genotype, latent matrix
// (column-major), residual matrix (column-major).
LatentData draw_latent_data(int n, const LatentSchemeParams& p, RandomStream& rng) {
  LatentData out;
  out.genotype = gen_genotype(n, p.maf, p.coding, rng);
  const Eigen::VectorXd& g = out.genotype.values;

  Eigen::MatrixXd u(n, p.n_latent);
  fill_normal(u, rng);
  if (p.scheme != LatentScheme::sc1) {
    for (int i = 0; i < p.n_latent; ++i) {
      const double d = p.delta[i];
      if (d > 0.0) {
        u.col(i) = std::sqrt(d) * g + std::sqrt(1.0 - d) * u.col(i);
        out.affected.push_back(i);
      }
    }
    out.variance_share = p.delta;
  }

  Eigen::MatrixXd eps(n, p.n_phe);
  fill_normal(eps, rng);

  Eigen::MatrixXd latent_part = u * p.beta;  // n x n_phe, unit variance per column
  out.phenotypes.resize(n, p.n_phe);
  if (p.scheme == LatentScheme::sc1) {
    for (int j = 0; j < p.n_phe; ++j) {
      const double c = p.c_vec[j];
      const double gm = p.gamma[j];
      if (gm > 0.0) out.affected.push_back(j);
      out.phenotypes.col(j) = std::sqrt(c) * latent_part.col(j) + std::sqrt(gm) * g +
                              std::sqrt(1.0 - c - gm) * eps.col(j);
    }
    out.variance_share = p.gamma;
  } else {
    for (int j = 0; j < p.n_phe; ++j) {
      const double c = p.c_vec[j];
      out.phenotypes.col(j) =
          std::sqrt(c) * latent_part.col(j) + std::sqrt(1.0 - c) * eps.col(j);
    }
  }
  return out;
}

}  // namespace

LatentData simulate_latent_scheme(int n, const LatentSchemeParams& p, RandomStream& rng) {
  p.validate();
  if (n < 2) throw std::domain_error("latent: need n >= 2");
  LatentData out = draw_latent_data(n, p, rng);
  out.implied_correlation = summarize_offdiagonal(implied_correlation(p));
  return out;
}

LatentSampler::LatentSampler(LatentSchemeParams structure) : params_(std::move(structure)) {
  if (params_.scheme == LatentScheme::sc1 && params_.gamma.size() == 0) {
    params_.gamma = Eigen::VectorXd::Zero(params_.n_phe);
  }
  if (params_.scheme != LatentScheme::sc1 && params_.delta.size() == 0) {
    params_.delta = Eigen::VectorXd::Zero(params_.n_latent);
  }
  params_.validate();
  implied_ = implied_correlation(params_);
  summary_ = summarize_offdiagonal(implied_);
  corr_weights_ = correlation_selection_weights(implied_);
}

LatentData LatentSampler::sample(int n, const GeneticPolicy& policy, RandomStream& rng) const {
  const bool on_traits = params_.scheme == LatentScheme::sc1;
  const int target_count = on_traits ? params_.n_phe : params_.n_latent;
  if (policy.k_assoc < 0 || policy.k_assoc > target_count) {
    throw std::domain_error("latent sampler: k_assoc out of range");
  }
  if (!(policy.v_lo > 0.0 && policy.v_lo <= policy.v_hi && policy.v_hi < 1.0)) {
    throw std::domain_error("latent sampler: need 0 < v_lo <= v_hi < 1");
  }

  // architecture draw precedes the data draw
  Eigen::VectorXd weights;
  if (on_traits && policy.selection == TraitSelection::correlation_weighted) {
    weights = corr_weights_;
  } else {
    weights = Eigen::VectorXd::Constant(target_count, 1.0);
  }
  const std::vector<int> affected = select_traits(weights, policy.k_assoc, rng);

  LatentSchemeParams p = params_;
  for (int idx : affected) {
    const double share = policy.v_lo + (policy.v_hi - policy.v_lo) * rng.uniform();
    if (on_traits) {
      if (p.c_vec[idx] + share >= 1.0) {
        throw std::domain_error("latent sampler: c + genetic share >= 1 for trait " +
                                std::to_string(idx));
      }
      p.gamma[idx] = share;
    } else {
      p.delta[idx] = share;
    }
  }

  LatentData out = draw_latent_data(n, p, rng);
  out.affected = affected;  // keep the (randomized) selection order
  out.implied_correlation = summary_;
  return out;
}

namespace {

// Shared latent layout for the sc1/sc2 defaults: traits are grouped into
// consecutive blocks with one dominant latent each, plus weak cross-loadings
// spread over the remaining latents. The latent variance share rises as a
// power gradient and plateaus at c_top for the last `top_count` traits, with
// the gradient scaled so the shares average c_mean overall.
LatentSchemeParams make_block_structure(int n_phe, int n_latent, std::uint64_t structure_seed,
                                        double c_mean, double c_power, double c_top,
                                        int top_count, double cross_share, int cross_count) {
  LatentSchemeParams p;
  p.n_phe = n_phe;
  p.n_latent = n_latent;
  p.beta = Eigen::MatrixXd::Zero(n_latent, n_phe);
  p.c_vec.resize(n_phe);

  RandomStream rng(structure_seed);
  for (int j = 0; j < n_phe; ++j) {
    const int dom = static_cast<int>((static_cast<long>(j) * n_latent) / n_phe);
    const int n_cross = std::min(cross_count, n_latent - 1);
    // distinct cross latents, skipping the dominant one
    std::vector<int> cross;
    cross.reserve(n_cross);
    while (static_cast<int>(cross.size()) < n_cross) {
      const int cand = rng.uniform_int(n_latent);
      if (cand == dom) continue;
      if (std::find(cross.begin(), cross.end(), cand) != cross.end()) continue;
      cross.push_back(cand);
    }
    double raw2 = 0.0;
    std::vector<double> w(n_cross);
    for (int t = 0; t < n_cross; ++t) {
      w[t] = 0.5 + 0.5 * rng.uniform();
      raw2 += w[t] * w[t];
    }
    const double scale = raw2 > 0.0 ? std::sqrt(cross_share / raw2) : 0.0;
    p.beta(dom, j) = std::sqrt(1.0 - cross_share);
    for (int t = 0; t < n_cross; ++t) {
      p.beta(cross[t], j) = w[t] * scale;
    }
  }

  const int top = std::min(top_count, n_phe);
  const int lo_n = n_phe - top;
  if (lo_n > 0) {
    double raw_sum = 0.0;
    for (int j = 0; j < lo_n; ++j) {
      const double frac = lo_n > 1 ? static_cast<double>(j) / (lo_n - 1) : 0.0;
      p.c_vec[j] = std::pow(frac, c_power);
      raw_sum += p.c_vec[j];
    }
    const double lo_total = c_mean * n_phe - c_top * top;
    const double scale = lo_total > 0.0 && raw_sum > 0.0 ? lo_total / raw_sum : 0.0;
    for (int j = 0; j < lo_n; ++j) {
      p.c_vec[j] = std::min(p.c_vec[j] * scale, c_top);
    }
  }
  for (int j = lo_n; j < n_phe; ++j) p.c_vec[j] = c_top;
  return p;
}

}  // namespace

// Overlapping-window layout: latent i is centered at trait position
// n_phe*(i+0.5)/n_latent and loads on every trait within `halfwidth` of the
// center with a triangular kernel, so neighboring traits share most of their
// latents. The latent variance share follows a power gradient with mean
// c_mean, capped at c_top.
LatentSchemeParams make_window_structure(int n_phe, int n_latent, std::uint64_t structure_seed,
                                         double c_mean, double c_power, double c_top,
                                         double halfwidth, double jitter) {
  LatentSchemeParams p;
  p.n_phe = n_phe;
  p.n_latent = n_latent;
  p.beta = Eigen::MatrixXd::Zero(n_latent, n_phe);
  p.c_vec.resize(n_phe);

  RandomStream rng(structure_seed);
  for (int j = 0; j < n_phe; ++j) {
    double norm2 = 0.0;
    for (int i = 0; i < p.n_latent; ++i) {
      const double center = n_phe * (i + 0.5) / n_latent;
      const double d = std::fabs(center - (j + 0.5));
      if (d <= halfwidth) {
        const double w = (1.0 - d / (halfwidth + 1.0)) * (1.0 - jitter + jitter * rng.uniform());
        p.beta(i, j) = w;
        norm2 += w * w;
      }
    }
    p.beta.col(j) /= std::sqrt(norm2);
  }

  double raw_sum = 0.0;
  for (int j = 0; j < n_phe; ++j) {
    const double frac = n_phe > 1 ? static_cast<double>(j) / (n_phe - 1) : 0.0;
    p.c_vec[j] = std::pow(frac, c_power);
    raw_sum += p.c_vec[j];
  }
  const double scale = c_mean * n_phe / raw_sum;
  for (int j = 0; j < n_phe; ++j) p.c_vec[j] = std::min(p.c_vec[j] * scale, c_top);
  return p;
}

// Latent-share profile with one high-share "carrier" trait per block below a
// strongly-correlated top tier. Carrier blocks store latent variance with
// little pairwise correlation, so the share average can stay at c_mean while
// the selection weights concentrate on the top tier.
void apply_carrier_profile(LatentSchemeParams& p, double c_mean, double c_top, int top_count,
                           double c_hi_max) {
  const int n_phe = p.n_phe;
  const int lo_n = n_phe - top_count;
  const int block_of_first_top = static_cast<int>((static_cast<long>(lo_n) * p.n_latent) / n_phe);

  for (int j = lo_n; j < n_phe; ++j) p.c_vec[j] = c_top;

  // carriers: first trait of each low block; partners share the remainder
  double hi_sum = 0.0, lo_weight_sum = 0.0;
  std::vector<double> frac(lo_n);
  std::vector<bool> carrier(lo_n, false);
  int prev_block = -1;
  for (int j = 0; j < lo_n; ++j) {
    const int blk = static_cast<int>((static_cast<long>(j) * p.n_latent) / n_phe);
    frac[j] = block_of_first_top > 0 ? static_cast<double>(blk) / block_of_first_top : 0.0;
    if (blk != prev_block) {
      carrier[j] = true;
      prev_block = blk;
      hi_sum += c_hi_max * frac[j];
    } else {
      lo_weight_sum += frac[j];
    }
  }
  const double lo_budget = c_mean * n_phe - c_top * top_count - hi_sum;
  const double lo_scale = lo_weight_sum > 0.0 ? std::max(lo_budget, 0.0) / lo_weight_sum : 0.0;
  for (int j = 0; j < lo_n; ++j) {
    p.c_vec[j] = carrier[j] ? c_hi_max * frac[j] : std::min(lo_scale * frac[j], c_hi_max);
  }
}

// sc1/sc2 default layout. The last `top_count` traits form pairs, each pair
// driven by a dedicated latent at share c_top (one strongly correlated pair
// per latent); the remaining traits are grouped into blocks over the other
// latents with a rising carrier profile so that shares average c_mean. All
// traits additionally carry weak cross-loadings spread over the latents.
LatentSchemeParams make_paired_top_structure(int n_phe, int n_latent,
                                             std::uint64_t structure_seed, double c_mean,
                                             double c_top, int top_count, double c_hi_max,
                                             double cross_share, int cross_count,
                                             double hub_share) {
  if (top_count % 2 != 0) ++top_count;
  const int n_pairs = top_count / 2;
  if (n_pairs >= n_latent || top_count >= n_phe) {
    throw std::domain_error("sc structure: top tier too large");
  }
  const int lo_n = n_phe - top_count;
  const int lo_latents = n_latent - n_pairs;

  LatentSchemeParams p;
  p.n_phe = n_phe;
  p.n_latent = n_latent;
  p.beta = Eigen::MatrixXd::Zero(n_latent, n_phe);
  p.c_vec.resize(n_phe);

  RandomStream rng(structure_seed);
  const auto add_cross = [&](int j, int dom, double dom_extra, int hub) {
    const int n_cross = std::min(cross_count, n_latent - 1);
    std::vector<int> cross;
    cross.reserve(n_cross);
    while (static_cast<int>(cross.size()) < n_cross) {
      const int cand = rng.uniform_int(n_latent);
      if (cand == dom || cand == hub) continue;
      if (std::find(cross.begin(), cross.end(), cand) != cross.end()) continue;
      cross.push_back(cand);
    }
    double raw2 = 0.0;
    std::vector<double> w(n_cross);
    for (int t = 0; t < n_cross; ++t) {
      w[t] = 0.5 + 0.5 * rng.uniform();
      raw2 += w[t] * w[t];
    }
    const double scale = std::sqrt(cross_share / raw2);
    p.beta(dom, j) = std::sqrt(1.0 - cross_share - dom_extra);
    if (hub >= 0) p.beta(hub, j) = std::sqrt(dom_extra);
    for (int t = 0; t < n_cross; ++t) p.beta(cross[t], j) = w[t] * scale;
  };

  for (int j = 0; j < lo_n; ++j) {
    add_cross(j, static_cast<int>((static_cast<long>(j) * lo_latents) / lo_n), 0.0, -1);
  }
  // pair members also load on the first low latent, which ties the pairs
  // together at a moderate correlation
  for (int j = lo_n; j < n_phe; ++j) {
    add_cross(j, lo_latents + (j - lo_n) / 2, hub_share, 0);
  }

  // share profile: pairs at c_top; one carrier per low block on a rising
  // gradient, partners scaled to exhaust the c_mean budget
  for (int j = lo_n; j < n_phe; ++j) p.c_vec[j] = c_top;
  double hi_sum = 0.0, lo_weight_sum = 0.0;
  std::vector<double> frac(lo_n);
  std::vector<bool> carrier(lo_n, false);
  int prev_block = -1;
  for (int j = 0; j < lo_n; ++j) {
    const int blk = static_cast<int>((static_cast<long>(j) * lo_latents) / lo_n);
    frac[j] = lo_latents > 1 ? static_cast<double>(blk + 1) / lo_latents : 1.0;
    if (blk != prev_block) {
      carrier[j] = true;
      prev_block = blk;
      hi_sum += c_hi_max * frac[j];
    } else {
      lo_weight_sum += frac[j];
    }
  }
  const double lo_budget = c_mean * n_phe - c_top * top_count - hi_sum;
  const double lo_scale = lo_weight_sum > 0.0 ? std::max(lo_budget, 0.0) / lo_weight_sum : 0.0;
  for (int j = 0; j < lo_n; ++j) {
    p.c_vec[j] = carrier[j] ? c_hi_max * frac[j] : std::min(lo_scale * frac[j], c_hi_max);
  }
  return p;
}

// Turns the first two traits of `n_decoys` top-gradient low blocks into
// moderately correlated pairs whose contrast eigenvalues fall between the
// top-tier pair contrasts and the shared-factor difference modes.
void add_decoy_pairs(LatentSchemeParams& p, int lo_latents, int lo_n, int n_decoys,
                     double c_decoy) {
  for (int d = 0; d < n_decoys; ++d) {
    const int blk = lo_latents - 1 - d;
    int first = -1;
    for (int j = 0; j < lo_n; ++j) {
      if (static_cast<int>((static_cast<long>(j) * lo_latents) / lo_n) == blk) {
        first = j;
        break;
      }
    }
    if (first < 0 || first + 1 >= lo_n) continue;
    p.c_vec[first] = c_decoy;
    p.c_vec[first + 1] = c_decoy;
    for (int j = first + 2;
         j < lo_n &&
         static_cast<int>((static_cast<long>(j) * lo_latents) / lo_n) == blk;
         ++j) {
      p.c_vec[j] = std::min(p.c_vec[j], 0.02);
    }
  }
}

LatentSchemeParams make_sc1(int n_phe, int n_latent, std::uint64_t structure_seed) {
  double c_top = 0.8425, c_hi_max = 0.66, cross_share = 0.02, hub_share = 0.85;
  double c_decoy = 0.833;
  int top_count = 16, n_decoys = 3;
  if (const char* tune = std::getenv("PCASSOC_SC1_TUNE")) {  // TODO: remove after tuning
    std::sscanf(tune, "%d,%lf,%lf,%lf,%lf,%d,%lf", &top_count, &c_top, &c_hi_max, &cross_share,
                &hub_share, &n_decoys, &c_decoy);
  }
  LatentSchemeParams p = make_paired_top_structure(n_phe, n_latent, structure_seed, 0.30,
                                                   c_top, top_count, c_hi_max, cross_share, 11,
                                                   hub_share);
  if (n_decoys > 0) {
    add_decoy_pairs(p, n_latent - top_count / 2, n_phe - top_count, n_decoys, c_decoy);
  }
  p.scheme = LatentScheme::sc1;
  p.gamma = Eigen::VectorXd::Zero(n_phe);
  return p;
}

LatentSchemeParams make_sc2(int n_phe, int n_latent, std::uint64_t structure_seed) {
  LatentSchemeParams p =
      make_block_structure(n_phe, n_latent, structure_seed, 0.30, 2.0, 0.94, 12, 0.04, 11);
  p.scheme = LatentScheme::sc2;
  p.delta = Eigen::VectorXd::Zero(n_latent);
  return p;
}

LatentSchemeParams make_sc3(int n_phe, int n_latent, int n_clusters,
                            std::uint64_t structure_seed) {
  if (n_clusters < 1 || n_clusters > n_phe || n_clusters > n_latent) {
    throw std::domain_error("sc3: invalid cluster count");
  }
  LatentSchemeParams p;
  p.scheme = LatentScheme::sc3;
  p.n_phe = n_phe;
  p.n_latent = n_latent;
  p.beta = Eigen::MatrixXd::Zero(n_latent, n_phe);
  p.c_vec = Eigen::VectorXd::Constant(n_phe, 0.9);
  p.delta = Eigen::VectorXd::Zero(n_latent);

  RandomStream rng(structure_seed);
  const int pool = n_latent / n_clusters;
  // traits load on their cluster's latent pool, with a small share borrowed
  // from one other cluster so clusters are not fully disjoint
  const double borrow_share = 0.05;
  for (int j = 0; j < n_phe; ++j) {
    const int cluster = static_cast<int>((static_cast<long>(j) * n_clusters) / n_phe);
    int other = rng.uniform_int(n_clusters - 1);
    if (other >= cluster) ++other;

    double own2 = 0.0, oth2 = 0.0;
    std::vector<double> own(pool), oth(pool);
    for (int t = 0; t < pool; ++t) {
      own[t] = 0.5 + 0.5 * rng.uniform();
      own2 += own[t] * own[t];
      oth[t] = 0.5 + 0.5 * rng.uniform();
      oth2 += oth[t] * oth[t];
    }
    const double s_own = std::sqrt((1.0 - borrow_share) / own2);
    const double s_oth = std::sqrt(borrow_share / oth2);
    for (int t = 0; t < pool; ++t) {
      p.beta(cluster * pool + t, j) = own[t] * s_own;
      p.beta(other * pool + t, j) = oth[t] * s_oth;
    }
  }
  return p;
}

}  // namespace pcassoc
