//! Closed-form corrections: background-corrected g2, signal fraction,
//! g2(0)-corrected brightness, and the fiber-coupling efficiency budget.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::CountRate;

/// Measured signal and background count rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalBackground {
    pub signal_cps: CountRate,
    pub background_cps: CountRate,
}

/// Round-trip reflectivity, fiber-coupler transmission, and the
/// coupling efficiency derived from `R = eta^2 * T_fc`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyBudget {
    pub reflectivity: f64,
    pub coupler_transmission: f64,
    pub eta: f64,
}

/// How many corrected g2 values fell outside the model range. Out-of-range
/// values are preserved, not clamped; clamping would bias downstream fits.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CorrectionWarnings {
    /// Values below 0 (statistical noise below the background floor).
    pub below_zero: usize,
    /// Values above 1.5, the largest zero-delay level the dip model
    /// represents.
    pub above_model_range: usize,
}

impl CorrectionWarnings {
    pub fn any(&self) -> bool {
        self.below_zero > 0 || self.above_model_range > 0
    }
}

/// Signal fraction `rho = S / (S + B)`.
pub fn signal_fraction(sb: &SignalBackground) -> Result<f64> {
    let total = sb.signal_cps.cps() + sb.background_cps.cps();
    if total <= 0.0 {
        return Err(Error::domain(
            "signal fraction undefined: S + B must be positive",
        ));
    }
    Ok(sb.signal_cps.cps() / total)
}

fn check_rho(rho: f64) -> Result<()> {
    if !rho.is_finite() || rho <= 0.0 || rho > 1.0 {
        return Err(Error::domain(format!(
            "signal fraction must be in (0, 1], got {rho}"
        )));
    }
    Ok(())
}

/// Background-corrects one normalized coincidence value:
/// `g2 = (C - (1 - rho^2)) / rho^2`.
///
/// `rho = 1` is the identity map; `C = 1` is a fixed point for every rho.
pub fn background_correct_g2(c: f64, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let rho2 = rho * rho;
    Ok((c - (1.0 - rho2)) / rho2)
}

/// Applies [`background_correct_g2`] elementwise, reporting how many
/// corrected values left the physical range.
pub fn background_correct_g2_slice(
    values: &[f64],
    rho: f64,
) -> Result<(Vec<f64>, CorrectionWarnings)> {
    check_rho(rho)?;
    let rho2 = rho * rho;
    let mut warnings = CorrectionWarnings::default();
    let corrected = values
        .iter()
        .map(|&c| {
            let g = (c - (1.0 - rho2)) / rho2;
            if g < 0.0 {
                warnings.below_zero += 1;
            } else if g > 1.5 {
                warnings.above_model_range += 1;
            }
            g
        })
        .collect();
    Ok((corrected, warnings))
}

/// Inverse of the g2 background correction: `C = rho^2 * g2 + (1 - rho^2)`.
pub fn uncorrect_g2(g2: f64, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    let rho2 = rho * rho;
    Ok(rho2 * g2 + (1.0 - rho2))
}

/// Single-photon rate corrected for background and residual multi-photon
/// events: `I_corr = (I_det - B) * sqrt(1 - g2_zero)`.
///
/// Defined for `0 <= g2_zero <= 1` and `I_det >= B`; bunching (`g2 > 1`)
/// must be handled by the caller.
pub fn corrected_rate(i_det: CountRate, background: CountRate, g2_zero: f64) -> Result<CountRate> {
    if i_det.cps() < background.cps() {
        return Err(Error::domain(format!(
            "detected rate {} cps below background {} cps",
            i_det.cps(),
            background.cps()
        )));
    }
    if !g2_zero.is_finite() || !(0.0..=1.0).contains(&g2_zero) {
        return Err(Error::domain(format!(
            "corrected rate requires g2(0) in [0, 1], got {g2_zero}"
        )));
    }
    CountRate::new((i_det.cps() - background.cps()) * (1.0 - g2_zero).sqrt())
}

/// Derives the lensed-fiber coupling efficiency from a round-trip
/// reflectivity measurement: `eta = sqrt(R / T_fc)`, assuming equal
/// coupling-in and coupling-out efficiency.
pub fn fiber_coupling_efficiency(reflectivity: f64, coupler_transmission: f64) -> Result<EfficiencyBudget> {
    if !(0.0..=1.0).contains(&reflectivity) {
        return Err(Error::domain(format!(
            "reflectivity must be in [0, 1], got {reflectivity}"
        )));
    }
    if !(coupler_transmission > 0.0 && coupler_transmission <= 1.0) {
        return Err(Error::domain(format!(
            "coupler transmission must be in (0, 1], got {coupler_transmission}"
        )));
    }
    if reflectivity > coupler_transmission {
        return Err(Error::domain(format!(
            "reflectivity {reflectivity} above coupler transmission {coupler_transmission} \
             implies a coupling efficiency above 1"
        )));
    }
    Ok(EfficiencyBudget {
        reflectivity,
        coupler_transmission,
        eta: (reflectivity / coupler_transmission).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rate(cps: f64) -> CountRate {
        CountRate::new(cps).unwrap()
    }

    #[test]
    fn signal_fraction_basics() {
        let sb = SignalBackground {
            signal_cps: rate(100.0),
            background_cps: rate(0.0),
        };
        assert_eq!(signal_fraction(&sb).unwrap(), 1.0);
        let sb = SignalBackground {
            signal_cps: rate(50.0),
            background_cps: rate(50.0),
        };
        assert_eq!(signal_fraction(&sb).unwrap(), 0.5);
        let sb = SignalBackground {
            signal_cps: rate(0.0),
            background_cps: rate(0.0),
        };
        assert!(signal_fraction(&sb).is_err());
    }

    #[test]
    fn measured_rho_range_is_accepted() {
        // The instrument's working range of signal fractions.
        for rho in [0.76, 0.80, 0.87] {
            let s = 1000.0 * rho;
            let b = 1000.0 - s;
            let sb = SignalBackground {
                signal_cps: rate(s),
                background_cps: rate(b),
            };
            assert!((signal_fraction(&sb).unwrap() - rho).abs() < 1e-12);
        }
    }

    #[test]
    fn g2_correction_fixed_points() {
        for rho in [0.3, 0.76, 0.87, 1.0] {
            assert!((background_correct_g2(1.0, rho).unwrap() - 1.0).abs() < 1e-12);
            let floor = 1.0 - rho * rho;
            assert!(background_correct_g2(floor, rho).unwrap().abs() < 1e-12);
        }
        // rho = 1 is the identity map.
        for c in [0.0, 0.17, 0.5, 1.3] {
            assert_eq!(background_correct_g2(c, 1.0).unwrap(), c);
        }
        assert!(background_correct_g2(0.5, 0.0).is_err());
        assert!(background_correct_g2(0.5, 1.1).is_err());
    }

    #[test]
    fn g2_correction_roundtrips() {
        for rho in [0.05, 0.5, 0.76, 1.0] {
            for g2 in [0.0, 0.17, 1.0, 1.4] {
                let c = uncorrect_g2(g2, rho).unwrap();
                let back = background_correct_g2(c, rho).unwrap();
                assert!((back - g2).abs() < 1e-12, "rho {rho}, g2 {g2} -> {back}");
            }
        }
    }

    #[test]
    fn slice_correction_counts_out_of_range() {
        let values = [1.0, 0.36, 0.2, 2.0];
        let (corrected, warnings) = background_correct_g2_slice(&values, 0.8).unwrap();
        assert!((corrected[0] - 1.0).abs() < 1e-12);
        assert!(corrected[1].abs() < 1e-12);
        assert!(corrected[2] < 0.0);
        assert_eq!(warnings.below_zero, 1);
        assert_eq!(warnings.above_model_range, 1);
        assert!(warnings.any());
    }

    #[test]
    fn corrected_rate_limits_and_example() {
        // Ideal single photon source: background subtraction only.
        let r = corrected_rate(rate(1500.0), rate(100.0), 0.0).unwrap();
        assert_eq!(r.cps(), 1400.0);
        // Poissonian light corrects to zero.
        let r = corrected_rate(rate(1500.0), rate(100.0), 1.0).unwrap();
        assert_eq!(r.cps(), 0.0);
        // sqrt(1 - 0.19) = 0.9 exactly.
        let r = corrected_rate(rate(1500.0), rate(100.0), 0.19).unwrap();
        assert!((r.cps() - 1260.0).abs() < 1e-9);
    }

    #[test]
    fn corrected_rate_domain_errors() {
        assert!(corrected_rate(rate(90.0), rate(100.0), 0.1).is_err());
        assert!(corrected_rate(rate(1500.0), rate(100.0), 1.01).is_err());
        assert!(corrected_rate(rate(1500.0), rate(100.0), -0.01).is_err());
    }

    #[test]
    fn budget_reproduces_measured_efficiency() {
        let b = fiber_coupling_efficiency(0.42, 0.83).unwrap();
        assert!((b.eta - 0.711).abs() < 5e-4, "eta {}", b.eta);
        // Round trip: eta^2 * T_fc recovers R.
        assert!((b.eta * b.eta * b.coupler_transmission - 0.42).abs() < 1e-12);
    }

    #[test]
    fn budget_limits_and_errors() {
        assert_eq!(fiber_coupling_efficiency(0.83, 0.83).unwrap().eta, 1.0);
        assert_eq!(fiber_coupling_efficiency(0.0, 0.83).unwrap().eta, 0.0);
        assert!(fiber_coupling_efficiency(0.9, 0.83).is_err());
        assert!(fiber_coupling_efficiency(-0.1, 0.83).is_err());
        assert!(fiber_coupling_efficiency(0.4, 0.0).is_err());
        assert!(fiber_coupling_efficiency(0.4, 1.2).is_err());
    }
}
