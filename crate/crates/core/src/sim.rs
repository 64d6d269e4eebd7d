//! Monte Carlo generation of time-tag streams from a continuously pumped
//! two-level emitter, plus Poissonian background, a detector model, and a
//! 50:50 beam-splitter stage.
//!
//! The emitter alternates between ground and excited states as a rate
//! process: from the ground state it waits `Exponential(gamma_p)` with pump
//! rate `gamma_p = beta * P / tau_rad`, from the excited state it waits
//! `Exponential(gamma_r)` with `gamma_r = 1 / tau_rad`, emitting one photon
//! on each de-excitation. This reproduces the stationary rate
//! `gamma_r * beta*P / (1 + beta*P)` and the antibunched autocorrelation
//! `g2(tau) = 1 - exp(-gamma_c |tau|)` with `gamma_c = (1 + beta*P) /
//! tau_rad`. Optical coherence (Rabi oscillation) is deliberately not
//! modeled; the rate-equation picture is the regime all downstream fits
//! assume.
//!
//! Randomness discipline: every sampler draws from a `ChaCha8Rng` seeded
//! with `seed_from_u64`, and exponential waits use the inverse CDF
//! `-ln(1 - u) / rate` on `u ~ U[0,1)`. Identical inputs therefore produce
//! bit-identical streams on every platform. Sub-streams of the pipeline
//! derive their seeds with [`seeds::derive`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stream::{merge_streams, TimeTag, TimeTagStream};
use crate::units::CountRate;

/// Deterministic seed splitting for independent random stages.
pub mod seeds {
    /// SplitMix64 finalizer; good avalanche, tiny state.
    pub fn splitmix64(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Derives an independent sub-seed from a base seed and a stream tag.
    ///
    /// `derive(base, tag) = splitmix64(base XOR tag * 0x9E3779B97F4A7C15)`.
    /// This is the documented splitting rule used by the simulation pipeline
    /// and the CLI power sweep.
    pub fn derive(base: u64, tag: u64) -> u64 {
        splitmix64(base ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

/// Stage tags used by [`simulate_detected_pair`] when deriving sub-seeds
/// from `EmitterScenario::seed`.
pub mod stage {
    pub const BACKGROUND: u64 = 1;
    pub const SPLIT: u64 = 2;
    pub const DETECTOR_CH0: u64 = 3;
    pub const DETECTOR_CH1: u64 = 4;
}

/// Full physical parameter set for one simulated acquisition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmitterScenario {
    /// Excited-state lifetime tau_rad in picoseconds.
    pub tau_rad_ps: f64,
    /// Pump coupling beta in 1/uW; the pump rate is `beta * P / tau_rad`.
    #[serde(rename = "beta_per_uW")]
    pub beta_per_uw: f64,
    /// Pump power P in uW.
    #[serde(rename = "pump_uW")]
    pub pump_uw: f64,
    /// Probability an emitted photon reaches the detectors. Lumps waveguide
    /// coupling, fiber coupling, filter, and detector efficiency.
    pub collection_efficiency: f64,
    /// Poissonian optical background rate at the detectors, counts/s.
    pub background_cps: f64,
    /// Acquisition length in picoseconds.
    pub duration_ps: u64,
    pub seed: u64,
}

impl EmitterScenario {
    pub fn validate(&self) -> Result<()> {
        if !self.tau_rad_ps.is_finite() || self.tau_rad_ps <= 0.0 {
            return Err(Error::contract(format!(
                "tau_rad must be positive, got {} ps",
                self.tau_rad_ps
            )));
        }
        if !self.beta_per_uw.is_finite() || self.beta_per_uw <= 0.0 {
            return Err(Error::contract(format!(
                "beta must be positive, got {} per uW",
                self.beta_per_uw
            )));
        }
        if !self.pump_uw.is_finite() || self.pump_uw < 0.0 {
            return Err(Error::contract(format!(
                "pump power must be non-negative, got {} uW",
                self.pump_uw
            )));
        }
        if !(0.0..=1.0).contains(&self.collection_efficiency) {
            return Err(Error::contract(format!(
                "collection efficiency must be in [0, 1], got {}",
                self.collection_efficiency
            )));
        }
        if !self.background_cps.is_finite() || self.background_cps < 0.0 {
            return Err(Error::contract(format!(
                "background rate must be non-negative, got {} cps",
                self.background_cps
            )));
        }
        Ok(())
    }

    /// Saturated detected rate `collection_efficiency / tau_rad` in cps —
    /// the asymptote of [`expected_emission_rate`] as P grows.
    pub fn i_sat_cps(&self) -> f64 {
        self.collection_efficiency / self.tau_rad_ps * 1e12
    }

    /// Saturation power `1 / beta` in uW for the ideal two-level model.
    pub fn p_sat_uw(&self) -> f64 {
        1.0 / self.beta_per_uw
    }

    /// Antibunching-dip decay rate `(1 + beta*P) / tau_rad` in 1/us.
    pub fn gamma_c_per_us(&self) -> f64 {
        (1.0 + self.beta_per_uw * self.pump_uw) / self.tau_rad_ps * 1e6
    }
}

/// Timing and efficiency model of one single-photon detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorModel {
    /// Gaussian timing jitter sigma in ps.
    pub jitter_sigma_ps: f64,
    /// Dead time after an accepted tag, in ps.
    pub dead_time_ps: u64,
    /// Dark count rate per detector, counts/s.
    pub dark_cps: f64,
    /// Detection efficiency in [0, 1].
    pub efficiency: f64,
}

impl DetectorModel {
    /// A detector that passes every tag through untouched.
    pub fn ideal() -> Self {
        DetectorModel {
            jitter_sigma_ps: 0.0,
            dead_time_ps: 0,
            dark_cps: 0.0,
            efficiency: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.jitter_sigma_ps.is_finite() || self.jitter_sigma_ps < 0.0 {
            return Err(Error::contract(format!(
                "jitter sigma must be non-negative, got {} ps",
                self.jitter_sigma_ps
            )));
        }
        if !self.dark_cps.is_finite() || self.dark_cps < 0.0 {
            return Err(Error::contract(format!(
                "dark rate must be non-negative, got {} cps",
                self.dark_cps
            )));
        }
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(Error::contract(format!(
                "efficiency must be in [0, 1], got {}",
                self.efficiency
            )));
        }
        Ok(())
    }
}

/// Inverse-CDF exponential wait in ps: `-ln(1 - u) / rate` with u in [0, 1).
#[inline]
fn exp_wait_ps(rng: &mut ChaCha8Rng, rate_per_ps: f64) -> f64 {
    let u: f64 = rng.random();
    -(1.0 - u).ln() / rate_per_ps
}

#[inline]
fn advance(t: u64, wait_ps: f64) -> u64 {
    // f64 -> u64 casts saturate, so an effectively infinite wait pushes t
    // past any duration instead of wrapping.
    t.saturating_add(wait_ps.round() as u64)
}

/// Generates the emitted-photon stream of one pumped two-level emitter on a
/// single logical channel (label 0).
///
/// Deterministic given `scenario.seed`. A zero pump power or zero duration
/// yields an empty stream.
pub fn simulate_emission(scenario: &EmitterScenario) -> Result<TimeTagStream> {
    scenario.validate()?;
    let duration = scenario.duration_ps;
    if scenario.pump_uw == 0.0 || duration == 0 {
        return Ok(TimeTagStream::empty(duration));
    }

    let gamma_p = scenario.beta_per_uw * scenario.pump_uw / scenario.tau_rad_ps;
    let gamma_r = 1.0 / scenario.tau_rad_ps;
    let keep = scenario.collection_efficiency;
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);

    // Rough capacity from the stationary rate.
    let expected = duration as f64 * gamma_p * gamma_r / (gamma_p + gamma_r) * keep;
    let mut tags = Vec::with_capacity(expected as usize + 16);

    let mut t: u64 = 0;
    loop {
        // Ground state: wait for pump excitation.
        t = advance(t, exp_wait_ps(&mut rng, gamma_p));
        if t > duration {
            break;
        }
        // Excited state: wait for radiative decay, then emit.
        t = advance(t, exp_wait_ps(&mut rng, gamma_r));
        if t > duration {
            break;
        }
        if rng.random::<f64>() < keep {
            tags.push(TimeTag::new(0, t));
        }
    }
    TimeTagStream::new(tags, duration)
}

/// Analytic stationary detected rate of the scenario, in cps:
/// `collection_efficiency * (1/tau_rad) * beta*P / (1 + beta*P)`.
///
/// Equal to `I_sat * P / (P + P_sat)` with `I_sat = collection_efficiency /
/// tau_rad` and `P_sat = 1 / beta`.
pub fn expected_emission_rate(scenario: &EmitterScenario) -> Result<CountRate> {
    scenario.validate()?;
    let bp = scenario.beta_per_uw * scenario.pump_uw;
    let rate_per_ps = scenario.collection_efficiency / scenario.tau_rad_ps * bp / (1.0 + bp);
    CountRate::new(rate_per_ps * 1e12)
}

/// Superposes a homogeneous Poisson process of rate `background_cps +
/// dark_cps` over the stream's acquisition window.
///
/// New tags inherit the channel label of the input stream (0 when empty).
pub fn add_background(
    stream: &TimeTagStream,
    background_cps: f64,
    dark_cps: f64,
    seed: u64,
) -> Result<TimeTagStream> {
    for (name, rate) in [("background", background_cps), ("dark", dark_cps)] {
        if !rate.is_finite() || rate < 0.0 {
            return Err(Error::contract(format!(
                "{name} rate must be non-negative, got {rate} cps"
            )));
        }
    }
    let total_cps = background_cps + dark_cps;
    if total_cps == 0.0 {
        return Ok(stream.clone());
    }
    let channel = stream.tags().first().map_or(0, |t| t.channel);
    let rate_per_ps = total_cps * 1e-12;
    let duration = stream.duration_ps();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tags = Vec::new();
    let mut t: u64 = 0;
    loop {
        t = advance(t, exp_wait_ps(&mut rng, rate_per_ps));
        if t > duration {
            break;
        }
        tags.push(TimeTag::new(channel, t));
    }
    merge_streams(stream, &TimeTagStream::new(tags, duration)?)
}

/// Passes a stream through a detector: Bernoulli thinning by efficiency,
/// then Gaussian timing jitter (with re-sort), then dead-time pruning.
///
/// The stage order is fixed; in particular jitter is applied before dead
/// time. Jittered timestamps are rounded to integer ps and clamped to
/// `[0, duration]`. Dark counts are not generated here — superpose them with
/// [`add_background`].
pub fn apply_detector(
    stream: &TimeTagStream,
    model: &DetectorModel,
    seed: u64,
) -> Result<TimeTagStream> {
    model.validate()?;
    let duration = stream.duration_ps();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut tags: Vec<TimeTag> = if model.efficiency >= 1.0 {
        stream.tags().to_vec()
    } else {
        stream
            .tags()
            .iter()
            .copied()
            .filter(|_| rng.random::<f64>() < model.efficiency)
            .collect()
    };

    if model.jitter_sigma_ps > 0.0 {
        let normal = Normal::new(0.0, model.jitter_sigma_ps)
            .expect("validated sigma is finite and positive");
        for tag in &mut tags {
            let jittered = tag.timestamp_ps as f64 + normal.sample(&mut rng);
            tag.timestamp_ps = (jittered.round().max(0.0) as u64).min(duration);
        }
        tags.sort_unstable_by_key(|tag| (tag.timestamp_ps, tag.channel));
    }

    if model.dead_time_ps > 0 {
        let mut last_accepted: [Option<u64>; 2] = [None, None];
        tags.retain(|tag| {
            let slot = &mut last_accepted[tag.channel as usize];
            match *slot {
                Some(prev) if tag.timestamp_ps - prev < model.dead_time_ps => false,
                _ => {
                    *slot = Some(tag.timestamp_ps);
                    true
                }
            }
        });
    }

    TimeTagStream::new(tags, duration)
}

/// Routes each tag of a single-channel stream to one of two output channels
/// with probability 1/2 each (a 50:50 fiber coupler).
///
/// One Bernoulli draw per tag: `false` routes to channel 0. The union of the
/// outputs is exactly the input.
pub fn hbt_split(stream: &TimeTagStream, seed: u64) -> Result<(TimeTagStream, TimeTagStream)> {
    if !stream.is_single_channel() {
        return Err(Error::contract(
            "hbt_split expects a single-channel input stream",
        ));
    }
    let duration = stream.duration_ps();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ch0 = Vec::with_capacity(stream.len() / 2 + 1);
    let mut ch1 = Vec::with_capacity(stream.len() / 2 + 1);
    for tag in stream.tags() {
        if rng.random::<bool>() {
            ch1.push(TimeTag::new(1, tag.timestamp_ps));
        } else {
            ch0.push(TimeTag::new(0, tag.timestamp_ps));
        }
    }
    Ok((
        TimeTagStream::new(ch0, duration)?,
        TimeTagStream::new(ch1, duration)?,
    ))
}

/// Runs the full measurement chain for one scenario: emitter, optical
/// background plus dark counts, 50:50 split, and one detector per arm.
///
/// Background and the dark counts of both detectors (`2 * dark_cps`) are
/// superposed before the splitter; after the 50:50 split each arm carries
/// the per-detector dark rate in distribution. Stage seeds derive from
/// `scenario.seed` via [`seeds::derive`] with the tags in [`stage`], so the
/// whole chain is reproducible from the one scenario seed.
pub fn simulate_detected_pair(
    scenario: &EmitterScenario,
    detector: &DetectorModel,
) -> Result<(TimeTagStream, TimeTagStream)> {
    detector.validate()?;
    let emitted = simulate_emission(scenario)?;
    let mixed = add_background(
        &emitted,
        scenario.background_cps,
        2.0 * detector.dark_cps,
        seeds::derive(scenario.seed, stage::BACKGROUND),
    )?;
    let (arm0, arm1) = hbt_split(&mixed, seeds::derive(scenario.seed, stage::SPLIT))?;
    let det0 = apply_detector(
        &arm0,
        detector,
        seeds::derive(scenario.seed, stage::DETECTOR_CH0),
    )?;
    let det1 = apply_detector(
        &arm1,
        detector,
        seeds::derive(scenario.seed, stage::DETECTOR_CH1),
    )?;
    Ok((det0, det1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn telecom_emitter(pump_uw: f64, efficiency: f64, duration_ps: u64, seed: u64) -> EmitterScenario {
        EmitterScenario {
            tau_rad_ps: 1.61e6,
            beta_per_uw: 1.0 / 0.93,
            pump_uw,
            collection_efficiency: efficiency,
            background_cps: 0.0,
            duration_ps,
            seed,
        }
    }

    #[test]
    fn zero_pump_or_duration_gives_empty_stream() {
        let s = telecom_emitter(0.0, 1.0, 1_000_000, 1);
        assert!(simulate_emission(&s).unwrap().is_empty());
        let s = telecom_emitter(1.0, 1.0, 0, 1);
        assert!(simulate_emission(&s).unwrap().is_empty());
    }

    #[test]
    fn identical_seed_reproduces_stream_bit_for_bit() {
        let s = telecom_emitter(0.5, 0.7, 50_000_000_000, 99);
        let a = simulate_emission(&s).unwrap();
        let b = simulate_emission(&s).unwrap();
        assert_eq!(a, b);
        let s2 = EmitterScenario { seed: 100, ..s };
        assert_ne!(simulate_emission(&s2).unwrap(), a);
    }

    #[test]
    fn saturated_rate_approaches_inverse_lifetime() {
        // beta*P = 1000 pins the emitter near its 1/tau_rad ceiling.
        let s = telecom_emitter(930.0, 1.0, 10_000_000_000_000, 7);
        let stream = simulate_emission(&s).unwrap();
        let expect = 1.0 / 1.61e6 * 1e12; // 6.211e5 cps
        let rate = stream.mean_rate_cps();
        assert!(
            (rate - expect).abs() / expect < 0.01,
            "rate {rate} vs {expect}"
        );
    }

    #[test]
    fn rate_at_saturation_power_is_half_the_ceiling() {
        let s = telecom_emitter(0.93, 1.0, 10_000_000_000_000, 11);
        let stream = simulate_emission(&s).unwrap();
        let expect = 0.5 / 1.61e6 * 1e12; // 3.106e5 cps
        let rate = stream.mean_rate_cps();
        assert!(
            (rate - expect).abs() / expect < 0.01,
            "rate {rate} vs {expect}"
        );
    }

    #[test]
    fn expected_rate_matches_saturation_form() {
        let mut s = telecom_emitter(0.0, 3.9011e-3, 1, 0);
        assert_eq!(expected_emission_rate(&s).unwrap().cps(), 0.0);

        // At P = P_sat the rate is exactly half the asymptote.
        s.pump_uw = s.p_sat_uw();
        let half = expected_emission_rate(&s).unwrap().cps();
        assert!((half - s.i_sat_cps() / 2.0).abs() < 1e-9);

        // Efficiency chosen so the asymptote is 2423 cps; the curve then
        // follows I_sat * P / (P + P_sat) with P_sat = 0.93 uW.
        for p in [0.1, 0.5, 1.0, 2.0] {
            s.pump_uw = p;
            let want = s.i_sat_cps() * p / (p + 0.93);
            let got = expected_emission_rate(&s).unwrap().cps();
            assert!((got - want).abs() / want < 1e-12);
        }
        assert!((s.i_sat_cps() - 2423.0).abs() / 2423.0 < 1e-3);
    }

    #[test]
    fn background_rate_zero_is_identity() {
        let s = simulate_emission(&telecom_emitter(1.0, 1.0, 100_000_000, 3)).unwrap();
        let out = add_background(&s, 0.0, 0.0, 5).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn background_counts_match_poisson_mean() {
        let duration = 1_000_000_000_000; // 1 s
        let rate = 10_000.0;
        let empty = TimeTagStream::empty(duration);
        let mut total = 0u64;
        let seeds_n = 20u64;
        for seed in 0..seeds_n {
            total += add_background(&empty, rate, 0.0, seed).unwrap().len() as u64;
        }
        let mean = rate * seeds_n as f64;
        let sigma = mean.sqrt();
        assert!(
            (total as f64 - mean).abs() < 3.0 * sigma,
            "total {total} vs {mean} +- {sigma}"
        );
    }

    #[test]
    fn background_superposition_is_exact_in_count() {
        let s = simulate_emission(&telecom_emitter(1.0, 1.0, 1_000_000_000_000, 17)).unwrap();
        let out = add_background(&s, 5_000.0, 500.0, 23).unwrap();
        let bg_only = add_background(&TimeTagStream::empty(s.duration_ps()), 5_000.0, 500.0, 23)
            .unwrap();
        assert_eq!(out.len(), s.len() + bg_only.len());
    }

    #[test]
    fn ideal_detector_is_identity() {
        let s = simulate_emission(&telecom_emitter(1.0, 1.0, 1_000_000_000_000, 29)).unwrap();
        let out = apply_detector(&s, &DetectorModel::ideal(), 1).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn dead_time_prunes_close_tags() {
        let s = TimeTagStream::new(
            vec![
                TimeTag::new(0, 0),
                TimeTag::new(0, 10_000), // 10 ns after the first: pruned
                TimeTag::new(0, 26_000), // 26 ns after the first: kept
                TimeTag::new(0, 51_000), // exactly at the 25 ns edge: kept
            ],
            100_000,
        )
        .unwrap();
        let model = DetectorModel {
            dead_time_ps: 25_000,
            ..DetectorModel::ideal()
        };
        let out = apply_detector(&s, &model, 1).unwrap();
        let times: Vec<u64> = out.tags().iter().map(|t| t.timestamp_ps).collect();
        assert_eq!(times, vec![0, 26_000, 51_000]);
    }

    #[test]
    fn dead_time_tracks_channels_independently() {
        let s = TimeTagStream::new(
            vec![
                TimeTag::new(0, 0),
                TimeTag::new(1, 1_000),
                TimeTag::new(0, 2_000),
            ],
            10_000,
        )
        .unwrap();
        let model = DetectorModel {
            dead_time_ps: 5_000,
            ..DetectorModel::ideal()
        };
        let out = apply_detector(&s, &model, 1).unwrap();
        // Channel 1's tag survives; channel 0's second tag does not.
        assert_eq!(out.len(), 2);
        assert_eq!(out.tags()[1].channel, 1);
    }

    #[test]
    fn thinning_survival_is_binomial() {
        let n = 1_000_000u64;
        let tags: Vec<TimeTag> = (0..n).map(|i| TimeTag::new(0, i * 1000)).collect();
        let s = TimeTagStream::new(tags, n * 1000).unwrap();
        let model = DetectorModel {
            efficiency: 0.5,
            ..DetectorModel::ideal()
        };
        let out = apply_detector(&s, &model, 41).unwrap();
        let sigma = (n as f64 * 0.25).sqrt();
        assert!(
            (out.len() as f64 - 5e5).abs() < 3.0 * sigma,
            "survivors {}",
            out.len()
        );
    }

    #[test]
    fn jitter_preserves_count_and_order() {
        let s = simulate_emission(&telecom_emitter(1.0, 1.0, 100_000_000_000, 31)).unwrap();
        let model = DetectorModel {
            jitter_sigma_ps: 150.0,
            ..DetectorModel::ideal()
        };
        let out = apply_detector(&s, &model, 2).unwrap();
        assert_eq!(out.len(), s.len());
        assert!(out
            .tags()
            .windows(2)
            .all(|w| w[0].timestamp_ps <= w[1].timestamp_ps));
    }

    #[test]
    fn split_partitions_and_balances() {
        let empty = TimeTagStream::empty(10);
        let (a, b) = hbt_split(&empty, 1).unwrap();
        assert!(a.is_empty() && b.is_empty());

        let n = 1_000_000u64;
        let tags: Vec<TimeTag> = (0..n).map(|i| TimeTag::new(0, i)).collect();
        let s = TimeTagStream::new(tags, n).unwrap();
        let (a, b) = hbt_split(&s, 77).unwrap();
        assert_eq!(a.len() + b.len(), s.len());
        let sigma = (n as f64 * 0.25).sqrt();
        assert!(
            (a.len() as f64 - n as f64 / 2.0).abs() < 3.0 * sigma,
            "ch0 {}",
            a.len()
        );
        // The union is the input: timestamps interleave back exactly.
        let merged = merge_streams(
            &TimeTagStream::new(
                a.tags().iter().map(|t| TimeTag::new(0, t.timestamp_ps)).collect(),
                n,
            )
            .unwrap(),
            &TimeTagStream::new(
                b.tags().iter().map(|t| TimeTag::new(0, t.timestamp_ps)).collect(),
                n,
            )
            .unwrap(),
        )
        .unwrap();
        assert_eq!(merged, s);
    }

    #[test]
    fn split_rejects_mixed_channels() {
        let s = TimeTagStream::new(vec![TimeTag::new(0, 1), TimeTag::new(1, 2)], 10).unwrap();
        assert!(hbt_split(&s, 1).is_err());
    }

    #[test]
    fn detected_pair_is_deterministic() {
        let scenario = telecom_emitter(0.93, 0.05, 20_000_000_000_000, 1234);
        let detector = DetectorModel {
            jitter_sigma_ps: 100.0,
            dead_time_ps: 20_000,
            dark_cps: 50.0,
            efficiency: 0.9,
        };
        let (a0, a1) = simulate_detected_pair(&scenario, &detector).unwrap();
        let (b0, b1) = simulate_detected_pair(&scenario, &detector).unwrap();
        assert_eq!(a0, b0);
        assert_eq!(a1, b1);
        assert!(!a0.is_empty() && !a1.is_empty());
    }

    #[test]
    fn scenario_validation_rejects_bad_fields() {
        let mut s = telecom_emitter(1.0, 1.0, 10, 0);
        s.collection_efficiency = 1.5;
        assert!(simulate_emission(&s).is_err());
        let mut s = telecom_emitter(1.0, 1.0, 10, 0);
        s.tau_rad_ps = 0.0;
        assert!(expected_emission_rate(&s).is_err());
    }
}
