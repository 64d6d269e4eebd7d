//! Joins per-power artifacts into the final analysis report.

use std::path::Path;

use anyhow::{bail, Context, Result};
use photonstat::{
    background_correct_g2, corrected_rate, fiber_coupling_efficiency, fit_lifetime,
    fit_saturation, lifetime_uncertainties, ttg, CountRate,
};
use serde::{Deserialize, Serialize};

use crate::config::{self, PipelineConfig};
use crate::fitjson::{finite, G2File};

/// Per-power analysis results. `g2_zero` is the background-corrected dip
/// floor derived from the raw fit and the power's signal fraction.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PowerReport {
    #[serde(rename = "power_uW")]
    pub power_uw: f64,
    pub detected_cps: f64,
    pub background_cps: f64,
    pub rho: f64,
    pub g2_zero: f64,
    pub g2_zero_err: Option<f64>,
    pub gamma_c_per_us: f64,
    pub gamma_c_err: Option<f64>,
    /// `(I_det - B) * sqrt(1 - g2(0))`; absent when the corrected dip falls
    /// outside [0, 1] and the correction is undefined.
    pub corrected_cps: Option<f64>,
    pub converged: bool,
}

/// Results that combine all powers. Fields are null when their inputs are
/// unavailable (too few powers, diverged fits, missing budget inputs).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GlobalReport {
    pub tau_rad_us: Option<f64>,
    pub tau_rad_err_us: Option<f64>,
    #[serde(rename = "beta_per_uW")]
    pub beta_per_uw: Option<f64>,
    pub i_sat_cps: Option<f64>,
    #[serde(rename = "p_sat_uW")]
    pub p_sat_uw: Option<f64>,
    #[serde(rename = "alpha_cps_per_uW")]
    pub alpha_cps_per_uw: Option<f64>,
    pub eta: Option<f64>,
    pub all_converged: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub per_power: Vec<PowerReport>,
    pub global: GlobalReport,
}

fn require(path: &Path) -> Result<()> {
    if !path.exists() {
        bail!("missing artifact: {}", path.display());
    }
    Ok(())
}

/// Builds the report from the artifact directory. Requires, for every
/// power, the two `.ttg` channel files, the correlation CSV, and the g2 fit
/// JSON produced by the earlier pipeline stages.
pub fn build_report(cfg: &PipelineConfig, dir: &Path) -> Result<Report> {
    let mut per_power = Vec::with_capacity(cfg.powers_uw.len());
    let mut all_converged = true;
    let background = cfg.detected_background_cps();

    for (i, &power) in cfg.powers_uw.iter().enumerate() {
        for ch in 0..2u8 {
            require(&config::ttg_path(dir, i, ch))?;
        }
        require(&config::hist_path(dir, i))?;
        require(&config::g2fit_path(dir, i))?;

        let ch0 = ttg::read_file(config::ttg_path(dir, i, 0))?;
        let ch1 = ttg::read_file(config::ttg_path(dir, i, 1))?;
        let duration_s = ch0.duration_s();
        let detected = (ch0.len() + ch1.len()) as f64 / duration_s;

        let fit_path = config::g2fit_path(dir, i);
        let fit: G2File = serde_json::from_str(
            &std::fs::read_to_string(&fit_path)
                .with_context(|| format!("cannot read {}", fit_path.display()))?,
        )
        .with_context(|| format!("cannot parse {}", fit_path.display()))?;
        if fit.model != "g2" {
            bail!("{}: expected a g2 fit, found {}", fit_path.display(), fit.model);
        }
        all_converged &= fit.converged;

        let rho = if detected > 0.0 {
            ((detected - background) / detected).clamp(0.0, 1.0)
        } else {
            0.0
        };
        if rho <= 0.0 {
            bail!(
                "power {power} uW: detected rate {detected:.1} cps does not rise above the \
                 configured background {background:.1} cps; no signal to correct"
            );
        }
        let g2_zero = background_correct_g2(fit.params.g2_zero, rho)?;
        let g2_zero_err = fit.stderr.g2_zero.map(|e| e / (rho * rho));

        // The reported g2(0) stays unclamped; for the brightness correction
        // a slightly negative fitted dip is statistical noise around an
        // ideal emitter, so the correction input is floored at 0. Bunching
        // above 1 leaves the correction undefined (null).
        let corrected_cps = CountRate::new(detected.max(0.0))
            .ok()
            .zip(CountRate::new(background).ok())
            .and_then(|(i_det, b)| {
                corrected_rate(i_det, b, g2_zero.max(0.0)).ok().map(|r| r.cps())
            });

        per_power.push(PowerReport {
            power_uw: power,
            detected_cps: detected,
            background_cps: background,
            rho,
            g2_zero,
            g2_zero_err,
            gamma_c_per_us: fit.params.gamma_c_per_us,
            gamma_c_err: fit.stderr.gamma_c_per_us,
            corrected_cps,
            converged: fit.converged,
        });
    }

    // Dip rate versus power: weighted line fit over the converged powers.
    let lifetime_points: Vec<(f64, f64, f64)> = per_power
        .iter()
        .filter(|p| p.converged)
        .filter_map(|p| p.gamma_c_err.map(|e| (p.power_uw, p.gamma_c_per_us, e)))
        .collect();
    let (mut tau, mut tau_err, mut beta) = (None, None, None);
    if lifetime_points.len() >= 2 {
        if let Ok((params, fit)) = fit_lifetime(&lifetime_points) {
            if fit.converged {
                let (te, _) = lifetime_uncertainties(&fit);
                tau = Some(params.tau_rad_us);
                tau_err = finite(te);
                beta = Some(params.beta_per_uw);
            } else {
                all_converged = false;
            }
        } else {
            all_converged = false;
        }
    }

    // Background-subtracted rate versus power: the saturation curve. The
    // configured background is pump-independent, so it is removed here
    // rather than left to the fit's linear term.
    let sat_points: Vec<(f64, f64, f64)> = per_power
        .iter()
        .map(|p| {
            let counts = p.detected_cps * cfg.scenario.duration_ps as f64 * 1e-12;
            let sigma = counts.max(1.0).sqrt() / (cfg.scenario.duration_ps as f64 * 1e-12);
            (p.power_uw, p.detected_cps - background, sigma)
        })
        .collect();
    let (mut i_sat, mut p_sat, mut alpha) = (None, None, None);
    if sat_points.len() >= 4 {
        if let Ok((params, fit)) = fit_saturation(&sat_points) {
            if fit.converged {
                i_sat = Some(params.i_sat.cps());
                p_sat = Some(params.p_sat_uw);
                alpha = Some(params.alpha_cps_per_uw);
            } else {
                all_converged = false;
            }
        } else {
            all_converged = false;
        }
    }

    let eta = match &cfg.efficiency_budget {
        Some(inputs) => Some(
            fiber_coupling_efficiency(inputs.reflectivity, inputs.coupler_transmission)?.eta,
        ),
        None => None,
    };

    Ok(Report {
        per_power,
        global: GlobalReport {
            tau_rad_us: tau,
            tau_rad_err_us: tau_err,
            beta_per_uw: beta,
            i_sat_cps: i_sat,
            p_sat_uw: p_sat,
            alpha_cps_per_uw: alpha,
            eta,
            all_converged,
        },
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.4}"))
}

/// Human-readable summary table.
pub fn render(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(
        "power_uW  detected_cps  rho     g2(0)            gamma_c[1/us]    corrected_cps  fit\n",
    );
    for p in &report.per_power {
        out.push_str(&format!(
            "{:<9.3} {:<13.1} {:<7.4} {:<7.4} +-{:<6} {:<7.4} +-{:<6} {:<14} {}\n",
            p.power_uw,
            p.detected_cps,
            p.rho,
            p.g2_zero,
            fmt_opt(p.g2_zero_err),
            p.gamma_c_per_us,
            fmt_opt(p.gamma_c_err),
            p.corrected_cps
                .map_or_else(|| "-".into(), |c| format!("{c:.1}")),
            if p.converged { "ok" } else { "DIVERGED" },
        ));
    }
    let g = &report.global;
    out.push_str(&format!(
        "tau_rad = {} +- {} us, beta = {} 1/uW\n",
        fmt_opt(g.tau_rad_us),
        fmt_opt(g.tau_rad_err_us),
        fmt_opt(g.beta_per_uw),
    ));
    out.push_str(&format!(
        "I_sat = {} cps, P_sat = {} uW, alpha = {} cps/uW\n",
        fmt_opt(g.i_sat_cps),
        fmt_opt(g.p_sat_uw),
        fmt_opt(g.alpha_cps_per_uw),
    ));
    out.push_str(&format!(
        "eta = {}, all fits converged: {}\n",
        fmt_opt(g.eta),
        g.all_converged
    ));
    out
}
