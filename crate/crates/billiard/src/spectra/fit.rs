//! Estimators: maximum likelihood for the spacing and localisation models,
//! least squares for the saturation curves.
//!
//! Fits run on raw (unbinned) samples so that no histogram choices enter the
//! estimates; goodness-of-fit is reported as the Kolmogorov-Smirnov
//! statistic of the sample against the fitted cumulative distribution.

use statrs::function::beta::ln_beta;

use super::models::{BetaDistModel, BrbModel, BrodyModel};
use super::SpectraError;
use crate::numerics::{brent_min, ks_statistic, nelder_mead};

/// Minimum sample count for the spacing-distribution fits.
const MIN_SPACINGS: usize = 500;
/// Minimum sample count for the localisation-measure fit.
const MIN_A_SAMPLES: usize = 200;

/// Maximum-likelihood Brody fit.
#[derive(Debug, Clone, Copy)]
pub struct BrodyFit {
    /// Fitted model.
    pub model: BrodyModel,
    /// Log-likelihood at the optimum.
    pub log_likelihood: f64,
    /// Kolmogorov-Smirnov statistic against the fitted CDF.
    pub ks: f64,
    /// Number of spacings used.
    pub n: usize,
}

/// Maximum-likelihood fit of the combined regular/localised-chaotic model.
#[derive(Debug, Clone, Copy)]
pub struct BrbFit {
    /// Fitted model.
    pub model: BrbModel,
    /// Whether the regular fraction was held fixed during the fit.
    pub rho1_fixed: bool,
    /// Log-likelihood at the optimum.
    pub log_likelihood: f64,
    /// Kolmogorov-Smirnov statistic against the fitted CDF.
    pub ks: f64,
    /// Number of spacings used.
    pub n: usize,
}

/// Maximum-likelihood beta-family fit of a localisation-measure sample.
#[derive(Debug, Clone, Copy)]
pub struct BetaDistFit {
    /// Fitted model.
    pub model: BetaDistModel,
    /// Log-likelihood at the optimum.
    pub log_likelihood: f64,
    /// Kolmogorov-Smirnov statistic against the fitted CDF.
    pub ks: f64,
    /// Mean of the fitted density by quadrature.
    pub mean: f64,
    /// Standard deviation of the fitted density by quadrature.
    pub sigma: f64,
    /// Number of samples used.
    pub n: usize,
}

/// Least-squares fit of the saturation curve `y(α) = y_∞ sα / (1 + sα)`.
#[derive(Debug, Clone, Copy)]
pub struct RationalFit {
    /// Saturation value `y_∞`.
    pub asymptote: f64,
    /// Rate parameter `s`.
    pub s: f64,
    /// Root-mean-square residual of the fit.
    pub rmse: f64,
}

impl RationalFit {
    /// The fitted curve at `alpha`.
    pub fn eval(&self, alpha: f64) -> f64 {
        let g = self.s * alpha;
        self.asymptote * g / (1.0 + g)
    }
}

/// Checks a spacing sample and returns it rescaled to unit mean.
///
/// The spacing models are the unit-mean normalised families, so estimated
/// parameters are only meaningful on unit-mean data; unfolded spectra are
/// already within a couple of percent of that and the rescaling removes the
/// residue.
fn unit_mean_spacings(spacings: &[f64], needed: usize) -> Result<Vec<f64>, SpectraError> {
    if spacings.len() < needed {
        return Err(SpectraError::InsufficientData {
            needed,
            got: spacings.len(),
        });
    }
    if spacings.iter().any(|&s| !s.is_finite() || s <= 0.0) {
        return Err(SpectraError::DegenerateFit(
            "spacings must be finite and positive".into(),
        ));
    }
    let mean = crate::numerics::mean(spacings);
    Ok(spacings.iter().map(|&s| s / mean).collect())
}

/// Maximum-likelihood estimate of the Brody parameter from a spacing sample.
pub fn fit_brody(spacings: &[f64]) -> Result<BrodyFit, SpectraError> {
    let scaled = unit_mean_spacings(spacings, MIN_SPACINGS)?;
    let nll = |beta: f64| {
        let model = BrodyModel::new(beta).expect("beta inside [0, 1] by construction");
        -scaled.iter().map(|&s| model.ln_pdf(s)).sum::<f64>()
    };
    let (beta, neg_ll) = brent_min(&nll, 0.0, 1.0, 1e-10, 200);
    let model = BrodyModel::new(beta)?;
    let ks = ks_statistic(&scaled, &|s| model.cdf(s));
    Ok(BrodyFit {
        model,
        log_likelihood: -neg_ll,
        ks,
        n: scaled.len(),
    })
}

/// Logistic map from the unconstrained optimiser line to `(0, 1)`.
fn expit(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(1e-12, 1.0 - 1e-12);
    (p / (1.0 - p)).ln()
}

/// Maximum-likelihood fit of the combined model.
///
/// With `rho1 = Some(value)` the regular fraction is held fixed (the
/// classical criterion: the fraction comes from the phase-space portrait)
/// and only the Brody parameter is free; with `rho1 = None` both parameters
/// are estimated from the spacings alone (the quantum criterion).
pub fn fit_brb(spacings: &[f64], rho1: Option<f64>) -> Result<BrbFit, SpectraError> {
    let scaled = unit_mean_spacings(spacings, MIN_SPACINGS)?;
    let nll_at = |r1: f64, beta: f64| -> f64 {
        let model = BrbModel::new(r1, beta).expect("parameters inside [0, 1] by construction");
        -scaled
            .iter()
            .map(|&s| model.pdf(s).max(1e-300).ln())
            .sum::<f64>()
    };
    let (model, neg_ll) = match rho1 {
        Some(r1) => {
            if !(0.0..=1.0).contains(&r1) {
                return Err(SpectraError::ParameterOutOfRange {
                    name: "rho1",
                    value: r1,
                    range: "[0, 1]",
                });
            }
            let (beta, neg_ll) = brent_min(&|b| nll_at(r1, b), 0.0, 1.0, 1e-10, 200);
            (BrbModel::new(r1, beta)?, neg_ll)
        }
        None => {
            // Unconstrained coordinates (logit of each parameter) keep the
            // simplex away from the hard [0, 1] walls.
            let objective =
                |x: &[f64]| nll_at(expit(x[0]), expit(x[1]));
            let start = [logit(0.5), logit(0.7)];
            let result = nelder_mead(&objective, &start, &[1.0, 1.0], 1e-9, 600);
            if !result.converged {
                return Err(SpectraError::OptimizerNotConverged {
                    best: vec![expit(result.point[0]), expit(result.point[1])],
                    spread: result.value,
                });
            }
            (
                BrbModel::new(expit(result.point[0]), expit(result.point[1]))?,
                result.value,
            )
        }
    };
    let ks = ks_statistic(&scaled, &|s| model.cdf(s));
    Ok(BrbFit {
        model,
        rho1_fixed: rho1.is_some(),
        log_likelihood: -neg_ll,
        ks,
        n: scaled.len(),
    })
}

/// Maximum-likelihood beta-family fit of localisation measures on `[0, a0]`.
pub fn fit_beta_dist(samples: &[f64], a0: f64) -> Result<BetaDistFit, SpectraError> {
    if a0 <= 0.0 || !a0.is_finite() {
        return Err(SpectraError::ParameterOutOfRange {
            name: "a0",
            value: a0,
            range: "(0, inf)",
        });
    }
    if samples.len() < MIN_A_SAMPLES {
        return Err(SpectraError::InsufficientData {
            needed: MIN_A_SAMPLES,
            got: samples.len(),
        });
    }
    if let Some(&bad) = samples
        .iter()
        .find(|&&x| !x.is_finite() || x <= 0.0 || x >= a0)
    {
        return Err(SpectraError::SampleOutOfRange {
            value: bad,
            limit: a0,
        });
    }
    // Work on t = A / a0 ~ Beta(a + 1, b + 1) in standard form.
    let t: Vec<f64> = samples.iter().map(|&x| x / a0).collect();
    let sum_ln_t: f64 = t.iter().map(|&v| v.ln()).sum();
    let sum_ln_1mt: f64 = t.iter().map(|&v| (1.0 - v).ln()).sum();
    let n = t.len() as f64;
    let nll = |alpha: f64, beta: f64| -> f64 {
        n * ln_beta(alpha, beta) - (alpha - 1.0) * sum_ln_t - (beta - 1.0) * sum_ln_1mt
    };
    // Method-of-moments starting point for the standard beta parameters.
    let m = crate::numerics::mean(&t);
    let v = crate::numerics::variance(&t).max(1e-12);
    let common = (m * (1.0 - m) / v - 1.0).max(1e-3);
    let start = [(m * common).max(1e-3).ln(), ((1.0 - m) * common).max(1e-3).ln()];
    let objective = |x: &[f64]| nll(x[0].exp(), x[1].exp());
    let result = nelder_mead(&objective, &start, &[0.5, 0.5], 1e-10, 600);
    if !result.converged {
        return Err(SpectraError::OptimizerNotConverged {
            best: result.point.iter().map(|&x| x.exp()).collect(),
            spread: result.value,
        });
    }
    let alpha = result.point[0].exp();
    let beta = result.point[1].exp();
    let model = BetaDistModel::new(alpha - 1.0, beta - 1.0, a0)?;
    let ks = ks_statistic(samples, &|x| model.cdf(x));
    let (mean, _, sigma) = super::models::beta_dist_moments(&model);
    // The likelihood above dropped the constant -n ln a0 from the change of
    // variables; restore it so the reported value refers to the density on
    // the original scale.
    let log_likelihood = -result.value - n * a0.ln();
    Ok(BetaDistFit {
        model,
        log_likelihood,
        ks,
        mean,
        sigma,
        n: samples.len(),
    })
}

/// Least-squares fit of the saturating curve `y = y_∞ sα / (1 + sα)` to
/// `(α, y)` points, with the asymptote profiled out analytically.
///
/// For a fixed rate `s` the model is linear in `y_∞`, so the inner solve is
/// exact and only `s` needs a line search (over `ln s`, keeping it
/// positive). The asymptote is clamped to `[0, 1.1]`: the curves this fits
/// are fractions and localisation measures, which cannot meaningfully
/// saturate beyond just over 1.
pub fn fit_rational(points: &[(f64, f64)]) -> Result<RationalFit, SpectraError> {
    if points.len() < 5 {
        return Err(SpectraError::InsufficientData {
            needed: 5,
            got: points.len(),
        });
    }
    if points.iter().any(|&(a, y)| a <= 0.0 || !a.is_finite() || !y.is_finite()) {
        return Err(SpectraError::DegenerateFit(
            "alpha values must be positive and finite".into(),
        ));
    }
    const LN_S_LO: f64 = -12.0;
    const LN_S_HI: f64 = 12.0;
    let profiled = |ln_s: f64| -> (f64, f64) {
        let s = ln_s.exp();
        let mut num = 0.0;
        let mut den = 0.0;
        for &(a, y) in points {
            let g = s * a / (1.0 + s * a);
            num += y * g;
            den += g * g;
        }
        let y_inf = if den > 0.0 { (num / den).clamp(0.0, 1.1) } else { 0.0 };
        let sse: f64 = points
            .iter()
            .map(|&(a, y)| {
                let g = s * a / (1.0 + s * a);
                let r = y - y_inf * g;
                r * r
            })
            .sum();
        (y_inf, sse)
    };
    let (ln_s, sse) = brent_min(&|x| profiled(x).1, LN_S_LO, LN_S_HI, 1e-12, 300);
    if ln_s <= LN_S_LO + 0.05 || ln_s >= LN_S_HI - 0.05 {
        return Err(SpectraError::DegenerateFit(
            "rate parameter ran to the search boundary: the points do not \
             resolve the saturation scale"
                .into(),
        ));
    }
    let (asymptote, _) = profiled(ln_s);
    Ok(RationalFit {
        asymptote,
        s: ln_s.exp(),
        rmse: (sse / points.len() as f64).sqrt(),
    })
}
