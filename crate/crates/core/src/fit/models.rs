//! The four concrete model fits: saturation curve, antibunching dip,
//! dip-rate-vs-power line, and Lorentzian spectral peak.
//!
//! Each fit runs through [`lm_fit`](super::lm_fit) and differs only in model
//! function, weighting, and initial guess. The model functions are public so
//! the engine can be exercised against them directly.

use crate::correlate::CorrelationHistogram;
use crate::error::{Error, Result};
use crate::fit::{lm_fit, FitResult};
use crate::units::CountRate;

/// Two-level saturation curve `I(P) = I_sat * P / (P + P_sat) + alpha * P`.
///
/// `theta = [i_sat_cps, p_sat_uw, alpha_cps_per_uw]`.
pub fn saturation_model(p_uw: f64, theta: &[f64]) -> f64 {
    theta[0] * p_uw / (p_uw + theta[1]) + theta[2] * p_uw
}

/// Antibunched autocorrelation `g2(tau) = 1 - (1 - b) * exp(-gamma |tau|)`.
///
/// `theta = [b, gamma_per_us]`, `tau` in us. Double-sided in |tau|; bins are
/// not folded.
pub fn g2_model(tau_us: f64, theta: &[f64]) -> f64 {
    1.0 - (1.0 - theta[0]) * (-theta[1] * tau_us.abs()).exp()
}

/// Straight line `y = c0 + c1 * x`, used for the dip rate versus pump power.
pub fn line_model(x: f64, theta: &[f64]) -> f64 {
    theta[0] + theta[1] * x
}

/// Lorentzian peak `f(E) = offset + A * (G/2)^2 / ((E - E0)^2 + (G/2)^2)`.
///
/// `theta = [center_mev, fwhm_mev, amplitude, offset]`.
pub fn lorentzian_model(e_mev: f64, theta: &[f64]) -> f64 {
    let half = theta[1] / 2.0;
    let d = e_mev - theta[0];
    theta[3] + theta[2] * half * half / (d * d + half * half)
}

/// Fitted saturation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaturationParams {
    pub i_sat: CountRate,
    pub p_sat_uw: f64,
    pub alpha_cps_per_uw: f64,
}

/// Fitted antibunching-dip parameters. Meaningful only when the paired
/// [`FitResult`] converged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2Params {
    /// Zero-delay autocorrelation b; up to 1.5 so bunching from
    /// contamination stays representable.
    pub g2_zero: f64,
    /// Dip decay rate in 1/us.
    pub gamma_c_per_us: f64,
}

/// Lifetime and pump coupling derived from the dip-rate line
/// `gamma_c = c0 + c1 * P`: `tau_rad = 1/c0`, `beta = c1/c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifetimeParams {
    pub tau_rad_us: f64,
    pub beta_per_uw: f64,
}

/// Fitted Lorentzian line parameters. The reported width is the FWHM in
/// ueV; no deconvolution of instrument resolution is applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianParams {
    pub center_mev: f64,
    pub fwhm_uev: f64,
    pub amplitude: f64,
    pub offset: f64,
}

/// Fits the saturation curve to `(pump_uw, rate_cps, sigma)` points.
///
/// Initial guess: `I_sat` from the largest rate, `P_sat` from the median
/// power, `alpha = 0`.
pub fn fit_saturation(points: &[(f64, f64, f64)]) -> Result<(SaturationParams, FitResult)> {
    if points.len() < 4 {
        return Err(Error::contract(format!(
            "saturation fit needs at least 4 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(p, _, _)| p < 0.0) {
        return Err(Error::contract("pump powers must be non-negative"));
    }
    let (xs, ys, sigmas) = split3(points);
    let max_rate = ys.iter().cloned().fold(f64::MIN, f64::max);
    let init = [max_rate, median(&xs), 0.0];
    let fit = lm_fit(saturation_model, &xs, &ys, &sigmas, &init)?;
    let params = SaturationParams {
        i_sat: CountRate::new(fit.params[0]).map_err(|_| {
            Error::domain(format!("fit gave nonphysical I_sat = {}", fit.params[0]))
        })?,
        p_sat_uw: fit.params[1],
        alpha_cps_per_uw: fit.params[2],
    };
    if fit.converged && params.p_sat_uw <= 0.0 {
        return Err(Error::domain(format!(
            "fit gave nonphysical P_sat = {} uW",
            params.p_sat_uw
        )));
    }
    Ok((params, fit))
}

/// Fits the antibunching model to a normalized histogram over its full
/// symmetric window.
///
/// Default weights are Poisson: `sigma_i = sqrt(max(counts_i, 1)) /
/// accidental_per_bin`. A histogram with no dip leaves the decay rate
/// unconstrained and comes back with `converged = false`.
pub fn fit_g2(
    hist: &CorrelationHistogram,
    sigmas: Option<&[f64]>,
) -> Result<(G2Params, FitResult)> {
    let values = hist
        .values()
        .ok_or_else(|| Error::contract("g2 fit requires a normalized histogram"))?;
    let taus_us: Vec<f64> = (0..hist.num_bins())
        .map(|i| hist.bin_center_ps(i) * 1e-6)
        .collect();
    let default_sigmas: Vec<f64>;
    let sigmas = match sigmas {
        Some(s) => {
            if s.len() != values.len() {
                return Err(Error::contract(format!(
                    "sigma length {} does not match bin count {}",
                    s.len(),
                    values.len()
                )));
            }
            s
        }
        None => {
            let factor = hist.accidental_per_bin();
            default_sigmas = hist
                .counts()
                .iter()
                .map(|&c| (c.max(1) as f64).sqrt() / factor)
                .collect();
            &default_sigmas
        }
    };
    fit_g2_points(&taus_us, values, sigmas)
}

/// Antibunching fit on explicit `(tau_us, value, sigma)` arrays — the
/// histogram-independent core of [`fit_g2`].
pub fn fit_g2_points(
    taus_us: &[f64],
    values: &[f64],
    sigmas: &[f64],
) -> Result<(G2Params, FitResult)> {
    if taus_us.len() < 3 {
        return Err(Error::contract(format!(
            "g2 fit needs at least 3 bins, got {}",
            taus_us.len()
        )));
    }
    let b_init = values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
        .clamp(-0.5, 1.49);
    let gamma_init = estimate_gamma_init(taus_us, values, b_init);
    let fit = lm_fit(g2_model, taus_us, values, sigmas, &[b_init, gamma_init])?;
    let params = G2Params {
        g2_zero: fit.params[0],
        gamma_c_per_us: fit.params[1],
    };
    if fit.converged && params.gamma_c_per_us <= 0.0 {
        return Err(Error::domain(format!(
            "fit gave nonphysical dip rate {} per us",
            params.gamma_c_per_us
        )));
    }
    Ok((params, fit))
}

/// Initial dip rate from where the dip has recovered to `1 - (1 - b)/e`.
fn estimate_gamma_init(taus_us: &[f64], values: &[f64], b: f64) -> f64 {
    let threshold = 1.0 - (1.0 - b) / std::f64::consts::E;
    let mut order: Vec<usize> = (0..taus_us.len()).collect();
    order.sort_by(|&i, &j| {
        taus_us[i]
            .abs()
            .partial_cmp(&taus_us[j].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut crossing = None;
    for &i in &order {
        if values[i] >= threshold {
            crossing = Some(taus_us[i].abs());
            break;
        }
    }
    let max_tau = taus_us.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let tau_star = crossing.unwrap_or(max_tau / 2.0).max(max_tau / 1e4);
    if tau_star > 0.0 {
        1.0 / tau_star
    } else {
        1.0
    }
}

/// Weighted linear fit of `(pump_uw, gamma_c_per_us, sigma)` points,
/// inverted to lifetime and pump coupling.
///
/// Errors when the fitted intercept is non-positive (a nonphysical
/// lifetime).
pub fn fit_lifetime(points: &[(f64, f64, f64)]) -> Result<(LifetimeParams, FitResult)> {
    fit_lifetime_impl(points, true)
}

/// [`fit_lifetime`] with unit weights instead of the supplied sigmas.
pub fn fit_lifetime_unweighted(
    points: &[(f64, f64, f64)],
) -> Result<(LifetimeParams, FitResult)> {
    fit_lifetime_impl(points, false)
}

fn fit_lifetime_impl(
    points: &[(f64, f64, f64)],
    weighted: bool,
) -> Result<(LifetimeParams, FitResult)> {
    if points.len() < 2 {
        return Err(Error::contract(format!(
            "lifetime fit needs at least 2 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(p, _, _)| p < 0.0) {
        return Err(Error::contract("pump powers must be non-negative"));
    }
    let (xs, ys, mut sigmas) = split3(points);
    if !weighted {
        sigmas = vec![1.0; xs.len()];
    }
    let span = xs.iter().cloned().fold(f64::MIN, f64::max)
        - xs.iter().cloned().fold(f64::MAX, f64::min);
    let init = if span > 0.0 {
        let slope = (ys[ys.len() - 1] - ys[0]) / span;
        [ys[0] - slope * xs[0], slope]
    } else {
        [ys.iter().sum::<f64>() / ys.len() as f64, 0.0]
    };
    let fit = lm_fit(line_model, &xs, &ys, &sigmas, &init)?;
    let c0 = fit.params[0];
    if c0 <= 0.0 {
        return Err(Error::domain(format!(
            "degenerate fit: intercept {c0} per us implies a nonphysical lifetime"
        )));
    }
    let params = LifetimeParams {
        tau_rad_us: 1.0 / c0,
        beta_per_uw: fit.params[1] / c0,
    };
    Ok((params, fit))
}

/// 1-sigma uncertainties of `(tau_rad_us, beta_per_uw)` propagated from the
/// line-fit covariance by the delta method.
pub fn lifetime_uncertainties(fit: &FitResult) -> (f64, f64) {
    let (c0, c1) = (fit.params[0], fit.params[1]);
    let cov = &fit.covariance;
    let var_tau = cov[0][0] / c0.powi(4);
    let var_beta = (c1 * c1 / c0.powi(4)) * cov[0][0] + cov[1][1] / (c0 * c0)
        - 2.0 * c1 / c0.powi(3) * cov[0][1];
    (var_tau.max(0.0).sqrt(), var_beta.max(0.0).sqrt())
}

/// Fits a Lorentzian to `(energy_mev, intensity)` samples with unit weights.
///
/// Initial guess: center at the sample maximum, width from the half-maximum
/// crossings, offset from the sample minimum.
pub fn fit_lorentzian(points: &[(f64, f64)]) -> Result<(LorentzianParams, FitResult)> {
    if points.len() < 5 {
        return Err(Error::contract(format!(
            "lorentzian fit needs at least 5 points, got {}",
            points.len()
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let sigmas = vec![1.0; xs.len()];

    let (i_max, _) = ys
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
        .expect("non-empty");
    let offset = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    let amplitude = ys[i_max] - offset;
    let width = half_max_width(&xs, &ys, i_max, offset, amplitude);
    let init = [xs[i_max], width, amplitude, offset];
    let fit = lm_fit(lorentzian_model, &xs, &ys, &sigmas, &init)?;
    let params = LorentzianParams {
        center_mev: fit.params[0],
        // The model is even in the width; report its magnitude.
        fwhm_uev: fit.params[1].abs() * 1e3,
        amplitude: fit.params[2],
        offset: fit.params[3],
    };
    if fit.converged && params.fwhm_uev <= 0.0 {
        return Err(Error::domain("fit gave a zero linewidth"));
    }
    Ok((params, fit))
}

fn half_max_width(xs: &[f64], ys: &[f64], i_max: usize, offset: f64, amplitude: f64) -> f64 {
    let threshold = offset + amplitude / 2.0;
    let mut left = xs[i_max];
    for i in (0..i_max).rev() {
        left = xs[i];
        if ys[i] < threshold {
            break;
        }
    }
    let mut right = xs[i_max];
    for i in i_max + 1..xs.len() {
        right = xs[i];
        if ys[i] < threshold {
            break;
        }
    }
    let span = xs.iter().cloned().fold(f64::MIN, f64::max)
        - xs.iter().cloned().fold(f64::MAX, f64::min);
    let width = right - left;
    if width > 0.0 {
        width
    } else {
        span / 4.0
    }
}

fn split3(points: &[(f64, f64, f64)]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let xs = points.iter().map(|p| p.0).collect();
    let ys = points.iter().map(|p| p.1).collect();
    let sigmas = points.iter().map(|p| p.2).collect();
    (xs, ys, sigmas)
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mid = sorted.len() / 2;
    if sorted.len().is_multiple_of(2) {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    }
}
