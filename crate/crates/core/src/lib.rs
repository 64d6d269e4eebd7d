//! Time-tagged single-photon statistics toolkit.
//!
//! The crate covers the full characterization loop for a continuously
//! pumped two-level emitter measured through a 50:50 beam splitter:
//!
//! * [`stream`] / [`ttg`] — picosecond time-tag streams and their binary
//!   file format;
//! * [`sim`] — seeded Monte Carlo of emitter, background, detectors, and
//!   splitter, the ground truth the analysis chain is tested against;
//! * [`correlate`] — two-channel coincidence histogramming with a
//!   brute-force oracle and accidental-rate normalization;
//! * [`fit`] — a Levenberg–Marquardt engine plus the saturation,
//!   antibunching, dip-rate-line, and Lorentzian model fits;
//! * [`correct`] — background correction of g2, corrected brightness, and
//!   the fiber-coupling efficiency budget.
//!
//! Every random stage takes an explicit seed and is bit-reproducible.

pub mod correct;
pub mod correlate;
pub mod error;
pub mod fit;
pub mod sim;
pub mod stream;
pub mod ttg;
pub mod units;

pub use correct::{
    background_correct_g2, background_correct_g2_slice, corrected_rate,
    fiber_coupling_efficiency, signal_fraction, uncorrect_g2, CorrectionWarnings,
    EfficiencyBudget, SignalBackground,
};
pub use correlate::{brute_force_correlate, correlate, normalize, CorrelationHistogram};
pub use error::{Error, Result};
pub use fit::models::{
    fit_g2, fit_g2_points, fit_lifetime, fit_lifetime_unweighted, fit_lorentzian,
    fit_saturation, lifetime_uncertainties, G2Params, LifetimeParams, LorentzianParams,
    SaturationParams,
};
pub use fit::{fd_jacobian, lm_fit, FitResult, Termination};
pub use sim::{
    add_background, apply_detector, expected_emission_rate, hbt_split, simulate_detected_pair,
    simulate_emission, DetectorModel, EmitterScenario,
};
pub use stream::{merge_streams, TimeTag, TimeTagStream};
pub use units::{energy_to_wavelength, wavelength_to_energy, CountRate, PhotonEnergy};
