"""PCA-based multivariate association testing for correlated quantitative traits.

The heavy lifting lives in the compiled extension; this package re-exports the
main operations: chi-square kernels, trait simulation, PCA, the association
test battery, closed-form bivariate power, and the Monte Carlo experiment
engine.
"""

from ._core import (
    AssocResult,
    BestPcResult,
    GroupTestResult,
    PcaModel,
    best_pc_test,
    calibrate_null_file,
    chisq_cdf,
    chisq_quantile,
    combined_pc_test,
    eigen_partition_scan,
    fisher_group_test,
    fit_pca,
    gen_genotype,
    log_pvalue_from_chisq,
    make_sc1,
    make_sc2,
    make_sc3,
    manova_wilks_log_p,
    noncentral_chisq_cdf,
    normal_cdf,
    normal_quantile,
    pc_genetic_variance,
    pc_variance_fractions,
    power_1df,
    power_2df,
    power_curves_default,
    preset_correlation,
    project_scores,
    residualize_covariates,
    run_power_study_file,
    simulate_bivariate,
    simulate_latent_sc1,
    simulate_multitrait,
    univariate_wald,
    __version__,
)

__all__ = [
    "AssocResult",
    "BestPcResult",
    "GroupTestResult",
    "PcaModel",
    "best_pc_test",
    "calibrate_null_file",
    "chisq_cdf",
    "chisq_quantile",
    "combined_pc_test",
    "eigen_partition_scan",
    "fisher_group_test",
    "fit_pca",
    "gen_genotype",
    "log_pvalue_from_chisq",
    "make_sc1",
    "make_sc2",
    "make_sc3",
    "manova_wilks_log_p",
    "noncentral_chisq_cdf",
    "normal_cdf",
    "normal_quantile",
    "pc_genetic_variance",
    "pc_variance_fractions",
    "power_1df",
    "power_2df",
    "power_curves_default",
    "preset_correlation",
    "project_scores",
    "residualize_covariates",
    "run_power_study_file",
    "simulate_bivariate",
    "simulate_latent_sc1",
    "simulate_multitrait",
    "univariate_wald",
    "__version__",
]
