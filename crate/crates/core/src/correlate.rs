//! Two-channel coincidence histogramming and its normalization.
//!
//! Binning convention, shared by the sweep correlator and the brute-force
//! oracle so the two can be compared bit-exactly:
//!
//! * a start/stop pair contributes the signed delay `t_stop - t_start`;
//! * pairs are kept when `-tau_max <= delay < tau_max` (half-open upper
//!   edge);
//! * with `k = ceil(tau_max / bin_width)` there are `2k` bins and bin `i`
//!   covers `[(i - k) * w, (i - k + 1) * w)` — symmetric about zero, and no
//!   bin straddles zero.
//!
//! Delays use 64-bit signed arithmetic; durations below 2^63 ps cannot
//! overflow.

use crate::error::{Error, Result};
use crate::stream::TimeTagStream;

/// Binned coincidence counts over a symmetric delay window, raw or
/// normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationHistogram {
    tau_max_ps: u64,
    bin_width_ps: u64,
    counts: Vec<u64>,
    n_start: u64,
    n_stop: u64,
    duration_ps: u64,
    /// Per-bin counts divided by the accidental-coincidence expectation;
    /// present only after [`normalize`].
    values: Option<Vec<f64>>,
}

impl CorrelationHistogram {
    pub fn tau_max_ps(&self) -> u64 {
        self.tau_max_ps
    }

    pub fn bin_width_ps(&self) -> u64 {
        self.bin_width_ps
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n_start(&self) -> u64 {
        self.n_start
    }

    pub fn n_stop(&self) -> u64 {
        self.n_stop
    }

    pub fn duration_ps(&self) -> u64 {
        self.duration_ps
    }

    pub fn num_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn is_normalized(&self) -> bool {
        self.values.is_some()
    }

    /// Normalized values; `None` until [`normalize`] has been applied.
    pub fn values(&self) -> Option<&[f64]> {
        self.values.as_deref()
    }

    /// Inclusive lower edge of bin `i`, in signed picoseconds.
    pub fn bin_lo_ps(&self, i: usize) -> i64 {
        let k = (self.counts.len() / 2) as i64;
        (i as i64 - k) * self.bin_width_ps as i64
    }

    /// Exclusive upper edge of bin `i`, in signed picoseconds.
    pub fn bin_hi_ps(&self, i: usize) -> i64 {
        self.bin_lo_ps(i) + self.bin_width_ps as i64
    }

    pub fn bin_center_ps(&self, i: usize) -> f64 {
        self.bin_lo_ps(i) as f64 + self.bin_width_ps as f64 / 2.0
    }

    /// Expected accidental coincidences per bin for independent Poisson
    /// streams at the observed rates: `n_start * n_stop * bin_width /
    /// duration`.
    pub fn accidental_per_bin(&self) -> f64 {
        self.n_start as f64 * self.n_stop as f64 * self.bin_width_ps as f64
            / self.duration_ps as f64
    }
}

fn check_params(
    ch0: &TimeTagStream,
    ch1: &TimeTagStream,
    tau_max_ps: u64,
    bin_width_ps: u64,
) -> Result<usize> {
    if bin_width_ps == 0 {
        return Err(Error::contract("bin width must be at least 1 ps"));
    }
    if tau_max_ps < bin_width_ps {
        return Err(Error::contract(format!(
            "tau_max ({tau_max_ps} ps) must be at least the bin width ({bin_width_ps} ps)"
        )));
    }
    if ch0.duration_ps() != ch1.duration_ps() {
        return Err(Error::contract(format!(
            "streams must share a duration, got {} ps and {} ps",
            ch0.duration_ps(),
            ch1.duration_ps()
        )));
    }
    if ch0.duration_ps() >= (1u64 << 63) {
        return Err(Error::contract(
            "durations of 2^63 ps or more overflow signed delay arithmetic",
        ));
    }
    // Half-bin count; ceil covers tau_max values that are not a multiple of
    // the bin width.
    Ok(tau_max_ps.div_ceil(bin_width_ps) as usize)
}

/// Histogram of stop-minus-start delays via a linear two-pointer sweep over
/// the sorted streams: `O(n0 + n1 + coincidences)`.
///
/// Channel labels inside the streams are ignored; the argument position
/// defines which stream supplies starts (`ch0`) and stops (`ch1`).
pub fn correlate(
    ch0: &TimeTagStream,
    ch1: &TimeTagStream,
    tau_max_ps: u64,
    bin_width_ps: u64,
) -> Result<CorrelationHistogram> {
    let half_bins = check_params(ch0, ch1, tau_max_ps, bin_width_ps)?;
    let k = half_bins as i64;
    let w = bin_width_ps as i64;
    let tau = tau_max_ps as i64;
    let mut counts = vec![0u64; 2 * half_bins];

    let stops = ch1.tags();
    let mut lo = 0usize;
    for start in ch0.tags() {
        let s = start.timestamp_ps as i64;
        // Advance past stops with delay below -tau_max; s is non-decreasing,
        // so `lo` only moves forward.
        while lo < stops.len() && (stops[lo].timestamp_ps as i64) < s - tau {
            lo += 1;
        }
        let mut j = lo;
        while j < stops.len() {
            let delta = stops[j].timestamp_ps as i64 - s;
            if delta >= tau {
                break;
            }
            counts[(delta.div_euclid(w) + k) as usize] += 1;
            j += 1;
        }
    }

    Ok(CorrelationHistogram {
        tau_max_ps,
        bin_width_ps,
        counts,
        n_start: ch0.len() as u64,
        n_stop: ch1.len() as u64,
        duration_ps: ch0.duration_ps(),
        values: None,
    })
}

/// `O(n0 * n1)` reference correlator with the identical binning convention.
///
/// This is the testing oracle for [`correlate`]; intended for streams up to
/// ~10^4 tags per channel.
pub fn brute_force_correlate(
    ch0: &TimeTagStream,
    ch1: &TimeTagStream,
    tau_max_ps: u64,
    bin_width_ps: u64,
) -> Result<CorrelationHistogram> {
    let half_bins = check_params(ch0, ch1, tau_max_ps, bin_width_ps)?;
    let k = half_bins as i64;
    let w = bin_width_ps as i64;
    let tau = tau_max_ps as i64;
    let mut counts = vec![0u64; 2 * half_bins];

    for start in ch0.tags() {
        for stop in ch1.tags() {
            let delta = stop.timestamp_ps as i64 - start.timestamp_ps as i64;
            if delta >= -tau && delta < tau {
                counts[(delta.div_euclid(w) + k) as usize] += 1;
            }
        }
    }

    Ok(CorrelationHistogram {
        tau_max_ps,
        bin_width_ps,
        counts,
        n_start: ch0.len() as u64,
        n_stop: ch1.len() as u64,
        duration_ps: ch0.duration_ps(),
        values: None,
    })
}

/// Divides each bin by the accidental-coincidence expectation, producing the
/// normalized coincidence histogram (1.0 = uncorrelated level).
///
/// Rates are estimated as `n / duration` with no edge correction; for
/// acquisitions much longer than `tau_max` the bias is negligible.
pub fn normalize(h: &CorrelationHistogram) -> Result<CorrelationHistogram> {
    if h.is_normalized() {
        return Err(Error::contract("histogram is already normalized"));
    }
    if h.n_start == 0 || h.n_stop == 0 {
        return Err(Error::domain(
            "cannot normalize: a channel has zero counts",
        ));
    }
    if h.duration_ps == 0 {
        return Err(Error::domain("cannot normalize: zero duration"));
    }
    let factor = h.accidental_per_bin();
    let values = h.counts.iter().map(|&c| c as f64 / factor).collect();
    Ok(CorrelationHistogram {
        values: Some(values),
        counts: h.counts.clone(),
        tau_max_ps: h.tau_max_ps,
        bin_width_ps: h.bin_width_ps,
        n_start: h.n_start,
        n_stop: h.n_stop,
        duration_ps: h.duration_ps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::TimeTag;

    fn stream(times_ps: &[u64], duration: u64) -> TimeTagStream {
        TimeTagStream::from_unsorted(
            times_ps.iter().map(|&t| TimeTag::new(0, t)).collect(),
            duration,
        )
        .unwrap()
    }

    #[test]
    fn worked_example_two_by_two() {
        // Delays (stop - start): 3, 12, -7, 2 ns. Window [-5, 5) ns keeps
        // 3 ns and 2 ns.
        let ch0 = stream(&[0, 10_000], 20_000);
        let ch1 = stream(&[3_000, 12_000], 20_000);
        let h = correlate(&ch0, &ch1, 5_000, 1_000).unwrap();
        assert_eq!(h.num_bins(), 10);
        let mut expected = vec![0u64; 10];
        expected[7] = 1; // [2, 3) ns
        expected[8] = 1; // [3, 4) ns
        assert_eq!(h.counts(), expected.as_slice());
        assert_eq!(h.bin_lo_ps(7), 2_000);
        assert_eq!(h.bin_hi_ps(7), 3_000);
    }

    #[test]
    fn empty_stream_gives_zero_histogram() {
        let ch0 = stream(&[], 1_000);
        let ch1 = stream(&[5, 10], 1_000);
        let h = correlate(&ch0, &ch1, 100, 10).unwrap();
        assert!(h.counts().iter().all(|&c| c == 0));
        let h = correlate(&ch1, &ch0, 100, 10).unwrap();
        assert!(h.counts().iter().all(|&c| c == 0));
    }

    #[test]
    fn pair_at_exactly_tau_max_is_excluded() {
        let ch0 = stream(&[0], 1_000);
        let ch1 = stream(&[100], 1_000);
        let h = correlate(&ch0, &ch1, 100, 10).unwrap();
        assert_eq!(h.counts().iter().sum::<u64>(), 0);
        // The mirrored pair at -tau_max is included.
        let h = correlate(&ch1, &ch0, 100, 10).unwrap();
        assert_eq!(h.counts().iter().sum::<u64>(), 1);
        assert_eq!(h.counts()[0], 1);
    }

    #[test]
    fn ragged_tau_max_rounds_bin_count_up() {
        let ch0 = stream(&[0], 1_000);
        let ch1 = stream(&[25], 1_000);
        let h = correlate(&ch0, &ch1, 25, 10).unwrap();
        // ceil(25/10) = 3 bins per side.
        assert_eq!(h.num_bins(), 6);
        assert_eq!(h.bin_lo_ps(0), -30);
        // Delay +25 excluded (>= tau_max), delay -25 lands in [-30, -20).
        assert_eq!(h.counts().iter().sum::<u64>(), 0);
        let h = correlate(&ch1, &ch0, 25, 10).unwrap();
        assert_eq!(h.counts()[0], 1);
    }

    #[test]
    fn matches_oracle_on_example() {
        let ch0 = stream(&[0, 7, 19, 19, 40], 100);
        let ch1 = stream(&[2, 7, 23, 39, 39, 60], 100);
        let a = correlate(&ch0, &ch1, 21, 4).unwrap();
        let b = brute_force_correlate(&ch0, &ch1, 21, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn parameter_contract_errors() {
        let s = stream(&[0], 10);
        assert!(correlate(&s, &s, 10, 0).is_err());
        assert!(correlate(&s, &s, 5, 10).is_err());
        let long = stream(&[0], 20);
        assert!(correlate(&s, &long, 10, 1).is_err());
    }

    #[test]
    fn all_zero_counts_normalize_to_all_zero_values() {
        // Plenty of tags in each channel, but none within the window.
        let ch0 = stream(&[0, 10, 20], 100_000);
        let ch1 = stream(&[90_000, 95_000], 100_000);
        let h = correlate(&ch0, &ch1, 100, 10).unwrap();
        assert!(h.counts().iter().all(|&c| c == 0));
        let n = normalize(&h).unwrap();
        assert!(n.values().unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn normalize_requires_counts_and_sets_values() {
        let ch0 = stream(&[0, 10, 20], 30);
        let ch1 = stream(&[], 30);
        let h = correlate(&ch0, &ch1, 10, 5).unwrap();
        assert!(normalize(&h).is_err());

        let ch1 = stream(&[1, 11], 30);
        let h = correlate(&ch0, &ch1, 10, 5).unwrap();
        let n = normalize(&h).unwrap();
        assert!(n.is_normalized());
        assert!(normalize(&n).is_err());
        let factor = 3.0 * 2.0 * 5.0 / 30.0;
        for (i, &c) in h.counts().iter().enumerate() {
            assert_eq!(n.values().unwrap()[i], c as f64 / factor);
        }
    }

    #[test]
    fn chunked_start_stream_sums_to_sequential_result() {
        // Contiguous partitions of the start stream add bin-for-bin to the
        // full sweep, which is what makes histograms mergeable.
        let times: Vec<u64> = (0..200u64).map(|i| (i * 37) % 900).collect();
        let ch0 = stream(&times, 1_000);
        let ch1 = stream(&[3, 141, 141, 500, 720, 897], 1_000);
        let full = correlate(&ch0, &ch1, 50, 7).unwrap();

        let mut summed = vec![0u64; full.num_bins()];
        for chunk in ch0.tags().chunks(61) {
            let part = TimeTagStream::new(chunk.to_vec(), 1_000).unwrap();
            let h = correlate(&part, &ch1, 50, 7).unwrap();
            for (acc, &c) in summed.iter_mut().zip(h.counts()) {
                *acc += c;
            }
        }
        assert_eq!(full.counts(), summed.as_slice());
    }
}
