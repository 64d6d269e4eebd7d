//! Machine-readable fit output: `{params, stderr, chi2_reduced, converged,
//! iterations}` per model. Non-finite uncertainties serialize as null.

use photonstat::{
    lifetime_uncertainties, FitResult, G2Params, LifetimeParams, LorentzianParams,
    SaturationParams,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitFile<P, E> {
    pub model: String,
    pub params: P,
    pub stderr: E,
    pub chi2_reduced: Option<f64>,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SaturationJson {
    pub i_sat_cps: f64,
    #[serde(rename = "p_sat_uW")]
    pub p_sat_uw: f64,
    #[serde(rename = "alpha_cps_per_uW")]
    pub alpha_cps_per_uw: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SaturationErrJson {
    pub i_sat_cps: Option<f64>,
    #[serde(rename = "p_sat_uW")]
    pub p_sat_uw: Option<f64>,
    #[serde(rename = "alpha_cps_per_uW")]
    pub alpha_cps_per_uw: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct G2Json {
    pub g2_zero: f64,
    pub gamma_c_per_us: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct G2ErrJson {
    pub g2_zero: Option<f64>,
    pub gamma_c_per_us: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LifetimeJson {
    pub tau_rad_us: f64,
    #[serde(rename = "beta_per_uW")]
    pub beta_per_uw: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LifetimeErrJson {
    pub tau_rad_us: Option<f64>,
    #[serde(rename = "beta_per_uW")]
    pub beta_per_uw: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LorentzianJson {
    #[serde(rename = "center_meV")]
    pub center_mev: f64,
    #[serde(rename = "fwhm_ueV")]
    pub fwhm_uev: f64,
    pub amplitude: f64,
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LorentzianErrJson {
    #[serde(rename = "center_meV")]
    pub center_mev: Option<f64>,
    #[serde(rename = "fwhm_ueV")]
    pub fwhm_uev: Option<f64>,
    pub amplitude: Option<f64>,
    pub offset: Option<f64>,
}

pub type SaturationFile = FitFile<SaturationJson, SaturationErrJson>;
pub type G2File = FitFile<G2Json, G2ErrJson>;
pub type LifetimeFile = FitFile<LifetimeJson, LifetimeErrJson>;
pub type LorentzianFile = FitFile<LorentzianJson, LorentzianErrJson>;

pub fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

pub fn saturation_file(params: &SaturationParams, fit: &FitResult) -> SaturationFile {
    FitFile {
        model: "saturation".into(),
        params: SaturationJson {
            i_sat_cps: params.i_sat.cps(),
            p_sat_uw: params.p_sat_uw,
            alpha_cps_per_uw: params.alpha_cps_per_uw,
        },
        stderr: SaturationErrJson {
            i_sat_cps: finite(fit.stderr(0)),
            p_sat_uw: finite(fit.stderr(1)),
            alpha_cps_per_uw: finite(fit.stderr(2)),
        },
        chi2_reduced: finite(fit.chi2_reduced),
        converged: fit.converged,
        iterations: fit.iterations,
    }
}

pub fn g2_file(params: &G2Params, fit: &FitResult) -> G2File {
    FitFile {
        model: "g2".into(),
        params: G2Json {
            g2_zero: params.g2_zero,
            gamma_c_per_us: params.gamma_c_per_us,
        },
        stderr: G2ErrJson {
            g2_zero: finite(fit.stderr(0)),
            gamma_c_per_us: finite(fit.stderr(1)),
        },
        chi2_reduced: finite(fit.chi2_reduced),
        converged: fit.converged,
        iterations: fit.iterations,
    }
}

pub fn lifetime_file(params: &LifetimeParams, fit: &FitResult) -> LifetimeFile {
    let (tau_err, beta_err) = lifetime_uncertainties(fit);
    FitFile {
        model: "lifetime".into(),
        params: LifetimeJson {
            tau_rad_us: params.tau_rad_us,
            beta_per_uw: params.beta_per_uw,
        },
        stderr: LifetimeErrJson {
            tau_rad_us: finite(tau_err),
            beta_per_uw: finite(beta_err),
        },
        chi2_reduced: finite(fit.chi2_reduced),
        converged: fit.converged,
        iterations: fit.iterations,
    }
}

pub fn lorentzian_file(params: &LorentzianParams, fit: &FitResult) -> LorentzianFile {
    FitFile {
        model: "lorentzian".into(),
        params: LorentzianJson {
            center_mev: params.center_mev,
            fwhm_uev: params.fwhm_uev,
            amplitude: params.amplitude,
            offset: params.offset,
        },
        stderr: LorentzianErrJson {
            center_mev: finite(fit.stderr(0)),
            fwhm_uev: finite(fit.stderr(1) * 1e3),
            amplitude: finite(fit.stderr(2)),
            offset: finite(fit.stderr(3)),
        },
        chi2_reduced: finite(fit.chi2_reduced),
        converged: fit.converged,
        iterations: fit.iterations,
    }
}
