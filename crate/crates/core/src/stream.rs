//! Time-tag streams: the exchange object between acquisition (or simulation)
//! and analysis.
//!
//! Timestamps are integer picoseconds since acquisition start. A 64-bit
//! picosecond clock spans ~106 days, far beyond any acquisition here, and
//! integer arithmetic keeps correlation bins reproducible — no drift from
//! accumulating floating-point tags.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One detection event: detector channel (0 or 1) and its arrival time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TimeTag {
    /// Picoseconds since acquisition start.
    pub timestamp_ps: u64,
    /// Detector index, 0 or 1.
    pub channel: u8,
}

impl TimeTag {
    pub fn new(channel: u8, timestamp_ps: u64) -> Self {
        TimeTag {
            timestamp_ps,
            channel,
        }
    }

    /// Sort key: timestamp first, ties broken by channel (0 before 1).
    #[inline]
    fn key(&self) -> (u64, u8) {
        (self.timestamp_ps, self.channel)
    }
}

/// A time-ordered sequence of detections over a fixed acquisition window.
///
/// Invariants, enforced at construction and preserved by every operation:
/// tags sorted by `(timestamp, channel)`, every timestamp within
/// `[0, duration_ps]`, channels in `{0, 1}`. Immutable once built; safe to
/// share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeTagStream {
    tags: Vec<TimeTag>,
    duration_ps: u64,
    resolution_ps: u32,
}

impl TimeTagStream {
    /// Builds a stream, validating every invariant.
    pub fn new(tags: Vec<TimeTag>, duration_ps: u64) -> Result<Self> {
        for (i, tag) in tags.iter().enumerate() {
            if tag.channel > 1 {
                return Err(Error::contract(format!(
                    "tag {i}: channel {} out of range (must be 0 or 1)",
                    tag.channel
                )));
            }
            if tag.timestamp_ps > duration_ps {
                return Err(Error::contract(format!(
                    "tag {i}: timestamp {} ps exceeds duration {} ps",
                    tag.timestamp_ps, duration_ps
                )));
            }
            if i > 0 && tags[i - 1].key() > tag.key() {
                return Err(Error::contract(format!(
                    "tags not sorted at index {i}: {:?} before {:?}",
                    tags[i - 1],
                    tag
                )));
            }
        }
        Ok(TimeTagStream {
            tags,
            duration_ps,
            resolution_ps: 1,
        })
    }

    /// Builds a stream from tags that may be out of order, sorting first.
    pub fn from_unsorted(mut tags: Vec<TimeTag>, duration_ps: u64) -> Result<Self> {
        tags.sort_unstable_by_key(TimeTag::key);
        Self::new(tags, duration_ps)
    }

    /// Empty stream spanning the given duration.
    pub fn empty(duration_ps: u64) -> Self {
        TimeTagStream {
            tags: Vec::new(),
            duration_ps,
            resolution_ps: 1,
        }
    }

    pub fn tags(&self) -> &[TimeTag] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn duration_ps(&self) -> u64 {
        self.duration_ps
    }

    pub fn resolution_ps(&self) -> u32 {
        self.resolution_ps
    }

    pub fn duration_s(&self) -> f64 {
        self.duration_ps as f64 * 1e-12
    }

    /// Mean detected rate over the acquisition, in counts per second.
    pub fn mean_rate_cps(&self) -> f64 {
        if self.duration_ps == 0 {
            return 0.0;
        }
        self.tags.len() as f64 / self.duration_s()
    }

    /// True when every tag carries the same channel label (or the stream is
    /// empty).
    pub fn is_single_channel(&self) -> bool {
        self.tags
            .windows(2)
            .all(|w| w[0].channel == w[1].channel)
    }

    pub fn into_tags(self) -> Vec<TimeTag> {
        self.tags
    }
}

/// Merges two streams covering the same acquisition window.
///
/// The output contains every tag of both inputs, ordered by
/// `(timestamp, channel)`. Merging is commutative because that key ordering
/// is total over indistinguishable tags.
pub fn merge_streams(a: &TimeTagStream, b: &TimeTagStream) -> Result<TimeTagStream> {
    if a.duration_ps != b.duration_ps {
        return Err(Error::contract(format!(
            "cannot merge streams with durations {} ps and {} ps",
            a.duration_ps, b.duration_ps
        )));
    }
    if a.resolution_ps != b.resolution_ps {
        return Err(Error::contract(format!(
            "cannot merge streams with resolutions {} ps and {} ps",
            a.resolution_ps, b.resolution_ps
        )));
    }
    let mut merged = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.tags.len() && j < b.tags.len() {
        if a.tags[i].key() <= b.tags[j].key() {
            merged.push(a.tags[i]);
            i += 1;
        } else {
            merged.push(b.tags[j]);
            j += 1;
        }
    }
    merged.extend_from_slice(&a.tags[i..]);
    merged.extend_from_slice(&b.tags[j..]);
    Ok(TimeTagStream {
        tags: merged,
        duration_ps: a.duration_ps,
        resolution_ps: a.resolution_ps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(tags: &[(u8, u64)], duration: u64) -> TimeTagStream {
        let tags = tags
            .iter()
            .map(|&(ch, t)| TimeTag::new(ch, t))
            .collect::<Vec<_>>();
        TimeTagStream::new(tags, duration).unwrap()
    }

    #[test]
    fn merge_with_empty_is_identity() {
        let s = stream(&[(0, 3), (1, 5)], 10);
        let e = TimeTagStream::empty(10);
        assert_eq!(merge_streams(&e, &s).unwrap(), s);
        assert_eq!(merge_streams(&s, &e).unwrap(), s);
    }

    #[test]
    fn merge_orders_by_timestamp() {
        let a = stream(&[(0, 5)], 10);
        let b = stream(&[(1, 3)], 10);
        let m = merge_streams(&a, &b).unwrap();
        assert_eq!(m.tags(), &[TimeTag::new(1, 3), TimeTag::new(0, 5)]);
    }

    #[test]
    fn merge_breaks_timestamp_ties_by_channel() {
        let a = stream(&[(1, 7)], 10);
        let b = stream(&[(0, 7)], 10);
        let m = merge_streams(&a, &b).unwrap();
        assert_eq!(m.tags(), &[TimeTag::new(0, 7), TimeTag::new(1, 7)]);
        assert_eq!(m, merge_streams(&b, &a).unwrap());
    }

    #[test]
    fn merge_rejects_mismatched_durations() {
        let a = stream(&[], 10);
        let b = stream(&[], 20);
        assert!(merge_streams(&a, &b).is_err());
    }

    #[test]
    fn constructor_rejects_violations() {
        assert!(TimeTagStream::new(vec![TimeTag::new(2, 0)], 10).is_err());
        assert!(TimeTagStream::new(vec![TimeTag::new(0, 11)], 10).is_err());
        assert!(
            TimeTagStream::new(vec![TimeTag::new(0, 5), TimeTag::new(0, 3)], 10).is_err()
        );
        // Equal timestamps must come channel 0 first.
        assert!(
            TimeTagStream::new(vec![TimeTag::new(1, 5), TimeTag::new(0, 5)], 10).is_err()
        );
        assert!(
            TimeTagStream::new(vec![TimeTag::new(0, 5), TimeTag::new(1, 5)], 10).is_ok()
        );
    }

    #[test]
    fn from_unsorted_sorts() {
        let s = TimeTagStream::from_unsorted(
            vec![TimeTag::new(0, 9), TimeTag::new(1, 2), TimeTag::new(0, 2)],
            10,
        )
        .unwrap();
        assert_eq!(
            s.tags(),
            &[TimeTag::new(0, 2), TimeTag::new(1, 2), TimeTag::new(0, 9)]
        );
    }
}
