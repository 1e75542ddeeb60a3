//! Sweep execution: one record per grid point, deterministic row order,
//! parallel evaluation within each curve.

use normgame::{
    beta_star, optimal_tax, sustainability_threshold, two_alpha_sustainability_threshold,
    ContributionNorm, EconomyTemplate, GridSpec, SearchConfig, TaxGrid, Utility,
};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::records::{NormRecord, TaxRecord, ThresholdRecord};

/// Parameter a threshold sweep can run over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdParam {
    M,
    Alpha,
    Alpha1,
    Beta,
}

impl ThresholdParam {
    pub fn parse(name: &str) -> CliResult<Self> {
        match name {
            "m" => Ok(Self::M),
            "alpha" => Ok(Self::Alpha),
            "alpha1" => Ok(Self::Alpha1),
            "beta" => Ok(Self::Beta),
            other => Err(CliError::Args(format!(
                "--param for threshold sweeps must be one of m, alpha, alpha1, beta; got {other:?}"
            ))),
        }
    }
}

pub struct ThresholdSweep {
    pub param: ThresholdParam,
    pub grid: GridSpec,
    pub n: usize,
    pub rho: f64,
    pub grant: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub ms: Vec<f64>,
    /// Period-0 inequality for `alpha1` sweeps.
    pub alpha0: Option<f64>,
}

pub fn run_threshold_sweep(spec: &ThresholdSweep) -> CliResult<Vec<ThresholdRecord>> {
    let utility = Utility::new(spec.rho)?;
    let grid: Vec<f64> = spec.grid.nodes().collect();
    let singleton = [f64::NAN];
    let (alphas, betas, ms): (&[f64], &[f64], &[f64]) = match spec.param {
        ThresholdParam::Alpha | ThresholdParam::Alpha1 => (&singleton, &spec.betas, &spec.ms),
        ThresholdParam::Beta => (&spec.alphas, &singleton, &spec.ms),
        ThresholdParam::M => (&spec.alphas, &spec.betas, &singleton),
    };
    if spec.param == ThresholdParam::Alpha1 && spec.alpha0.is_none() {
        return Err(CliError::Args("--param alpha1 requires --alpha0".into()));
    }
    let mut records = Vec::new();
    for &alpha_fixed in alphas {
        for &beta_fixed in betas {
            for &m_fixed in ms {
                let curve: Vec<ThresholdRecord> = grid
                    .par_iter()
                    .map(|&g| {
                        let (alpha, beta, m) = (
                            if spec.param == ThresholdParam::Alpha { g } else { alpha_fixed },
                            if spec.param == ThresholdParam::Beta { g } else { beta_fixed },
                            if spec.param == ThresholdParam::M { g } else { m_fixed },
                        );
                        let template = EconomyTemplate {
                            n: spec.n,
                            grant: spec.grant,
                            norm: ContributionNorm::new(beta)?,
                            utility,
                            mobility: m,
                        };
                        let (alpha0, alpha1, alpha_col, value) = match spec.param {
                            ThresholdParam::Alpha1 => {
                                let a0 = spec.alpha0.expect("checked above");
                                let d = two_alpha_sustainability_threshold(a0, g, &template)?;
                                (a0, g, a0, d)
                            }
                            _ => {
                                let d = sustainability_threshold(&template.economy(alpha)?)?;
                                (alpha, alpha, alpha, d)
                            }
                        };
                        Ok(ThresholdRecord {
                            n: spec.n,
                            rho: spec.rho,
                            alpha: alpha_col,
                            alpha0,
                            alpha1,
                            beta,
                            m,
                            delta_min: value,
                            sustainable: u8::from(value < 1.0),
                        })
                    })
                    .collect::<CliResult<_>>()?;
                records.extend(curve);
            }
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormParam {
    Alpha,
    M,
}

impl NormParam {
    pub fn parse(name: &str) -> CliResult<Self> {
        match name {
            "alpha" => Ok(Self::Alpha),
            "m" => Ok(Self::M),
            other => Err(CliError::Args(format!(
                "--param for norm selection must be alpha or m; got {other:?}"
            ))),
        }
    }
}

pub struct NormSweep {
    pub param: NormParam,
    pub grid: GridSpec,
    pub n: usize,
    pub rho: f64,
    pub grant: f64,
    pub alphas: Vec<f64>,
    pub ms: Vec<f64>,
    pub search: SearchConfig,
}

pub fn run_norm_sweep(spec: &NormSweep) -> CliResult<Vec<NormRecord>> {
    let utility = Utility::new(spec.rho)?;
    let template = EconomyTemplate {
        n: spec.n,
        grant: spec.grant,
        norm: ContributionNorm::new(1.0)?,
        utility,
        mobility: 0.5, // replaced per grid point
    };
    let grid: Vec<f64> = spec.grid.nodes().collect();
    let singleton = [f64::NAN];
    let (alphas, ms): (&[f64], &[f64]) = match spec.param {
        NormParam::Alpha => (&singleton, &spec.ms),
        NormParam::M => (&spec.alphas, &singleton),
    };
    let mut records = Vec::new();
    for &alpha_fixed in alphas {
        for &m_fixed in ms {
            // beta_star parallelizes internally over the beta grid.
            for &g in &grid {
                let (alpha, m) = match spec.param {
                    NormParam::Alpha => (g, m_fixed),
                    NormParam::M => (alpha_fixed, g),
                };
                let result = beta_star(alpha, m, &template, &spec.search)?;
                records.push(NormRecord {
                    n: spec.n,
                    rho: spec.rho,
                    m,
                    alpha,
                    beta_star: result.beta_star,
                    delta_min_at_star: result.delta_min_at_star,
                });
            }
        }
    }
    Ok(records)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaxParam {
    Alpha,
    M,
    Beta,
    Delta,
}

impl TaxParam {
    pub fn parse(name: &str) -> CliResult<Self> {
        match name {
            "alpha" => Ok(Self::Alpha),
            "m" => Ok(Self::M),
            "beta" => Ok(Self::Beta),
            "delta" => Ok(Self::Delta),
            other => Err(CliError::Args(format!(
                "--param for tax sweeps must be one of alpha, m, beta, delta; got {other:?}"
            ))),
        }
    }
}

pub struct TaxSweep {
    pub param: TaxParam,
    pub grid: GridSpec,
    pub n: usize,
    pub rho: f64,
    pub s: f64,
    pub delta: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub ms: Vec<f64>,
    pub tau_points: usize,
    pub golden_refine: bool,
}

pub fn run_tax_sweep(spec: &TaxSweep) -> CliResult<Vec<TaxRecord>> {
    let utility = Utility::new(spec.rho)?;
    let tax_grid = TaxGrid { points: spec.tau_points, golden_refine: spec.golden_refine };
    let grid: Vec<f64> = spec.grid.nodes().collect();
    let singleton = [f64::NAN];
    let (alphas, betas, ms): (&[f64], &[f64], &[f64]) = match spec.param {
        TaxParam::Alpha => (&singleton, &spec.betas, &spec.ms),
        TaxParam::Beta => (&spec.alphas, &singleton, &spec.ms),
        TaxParam::M => (&spec.alphas, &spec.betas, &singleton),
        TaxParam::Delta => (&spec.alphas, &spec.betas, &spec.ms),
    };
    let mut records = Vec::new();
    for &alpha_fixed in alphas {
        for &beta_fixed in betas {
            for &m_fixed in ms {
                let curve: Vec<TaxRecord> = grid
                    .par_iter()
                    .map(|&g| {
                        let (alpha, beta, m, delta) = (
                            if spec.param == TaxParam::Alpha { g } else { alpha_fixed },
                            if spec.param == TaxParam::Beta { g } else { beta_fixed },
                            if spec.param == TaxParam::M { g } else { m_fixed },
                            if spec.param == TaxParam::Delta { g } else { spec.delta },
                        );
                        let template = EconomyTemplate {
                            n: spec.n,
                            grant: 0.0,
                            norm: ContributionNorm::new(beta)?,
                            utility,
                            mobility: m,
                        };
                        let base = template.economy(alpha)?;
                        let result = optimal_tax(delta, spec.s, &base, &tax_grid)?;
                        Ok(TaxRecord {
                            n: spec.n,
                            rho: spec.rho,
                            s: spec.s,
                            delta,
                            m,
                            beta,
                            alpha,
                            tau_star: result.tau_star,
                            tau_dagger: result.tau_dagger,
                            tau_a: result.tau_a,
                            regime: result.regime.to_string(),
                            welfare: result.welfare_at_star,
                        })
                    })
                    .collect::<CliResult<_>>()?;
                records.extend(curve);
            }
        }
    }
    Ok(records)
}
