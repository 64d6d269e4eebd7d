//! Physical quantity newtypes and unit conversions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// hc in eV·nm, CODATA-rounded. Pinned so energy/wavelength conversions are
/// reproducible bit-for-bit across builds.
pub const HC_EV_NM: f64 = 1239.84198;

/// Photon energy in milli-electron-volts. Always strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhotonEnergy {
    value_mev: f64,
}

impl PhotonEnergy {
    pub fn new(value_mev: f64) -> Result<Self> {
        if !value_mev.is_finite() || value_mev <= 0.0 {
            return Err(Error::domain(format!(
                "photon energy must be positive and finite, got {value_mev} meV"
            )));
        }
        Ok(PhotonEnergy { value_mev })
    }

    pub fn mev(&self) -> f64 {
        self.value_mev
    }
}

/// Count rate in counts per second. Never negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CountRate {
    cps: f64,
}

impl CountRate {
    pub fn new(cps: f64) -> Result<Self> {
        if !cps.is_finite() || cps < 0.0 {
            return Err(Error::domain(format!(
                "count rate must be non-negative and finite, got {cps} cps"
            )));
        }
        Ok(CountRate { cps })
    }

    pub fn cps(&self) -> f64 {
        self.cps
    }
}

/// Converts photon energy to vacuum wavelength in nanometers.
///
/// Exact inverse of [`wavelength_to_energy`] up to floating-point rounding.
pub fn energy_to_wavelength(e: PhotonEnergy) -> f64 {
    // meV -> eV inside the ratio keeps hc/E exact when E equals the constant.
    (HC_EV_NM / e.mev()) * 1000.0
}

/// Converts vacuum wavelength in nanometers to photon energy.
pub fn wavelength_to_energy(wavelength_nm: f64) -> Result<PhotonEnergy> {
    if !wavelength_nm.is_finite() || wavelength_nm <= 0.0 {
        return Err(Error::domain(format!(
            "wavelength must be positive and finite, got {wavelength_nm} nm"
        )));
    }
    PhotonEnergy::new((HC_EV_NM / wavelength_nm) * 1000.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_phonon_line_energy_maps_to_o_band() {
        let e = PhotonEnergy::new(935.4).unwrap();
        let wl = energy_to_wavelength(e);
        assert!((wl - 1325.5).abs() < 0.1, "got {wl} nm");
    }

    #[test]
    fn constant_energy_gives_exactly_1000_nm() {
        let e = PhotonEnergy::new(HC_EV_NM).unwrap();
        assert_eq!(energy_to_wavelength(e), 1000.0);
    }

    #[test]
    fn roundtrip_is_machine_precision() {
        for mev in [500.0, 935.0, 2000.0] {
            let e = PhotonEnergy::new(mev).unwrap();
            let back = wavelength_to_energy(energy_to_wavelength(e)).unwrap();
            assert!(
                (back.mev() - mev).abs() / mev < 1e-12,
                "roundtrip {mev} -> {}",
                back.mev()
            );
        }
    }

    #[test]
    fn non_positive_energy_rejected() {
        assert!(PhotonEnergy::new(0.0).is_err());
        assert!(PhotonEnergy::new(-1.0).is_err());
        assert!(PhotonEnergy::new(f64::NAN).is_err());
        assert!(wavelength_to_energy(0.0).is_err());
    }

    #[test]
    fn count_rate_validation() {
        assert!(CountRate::new(0.0).is_ok());
        assert!(CountRate::new(2423.0).is_ok());
        assert!(CountRate::new(-1.0).is_err());
    }
}
