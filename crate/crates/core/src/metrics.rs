//! Reordering metrics: reorder density, receive-window series, and a checker
//! for whether a metric is determined by the buffer sequence.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{check_range, permutations_with_first, MAX_EXHAUSTIVE_N};
use crate::receiver::map_m;
use crate::sequence::{BufferSequence, IdSequence, Permutation};

use rayon::prelude::*;

/// Displacement threshold for reorder density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Threshold {
    Finite(u64),
    Infinite,
}

impl Threshold {
    fn admits(self, displacement: i64) -> bool {
        match self {
            Threshold::Infinite => true,
            Threshold::Finite(dt) => displacement.unsigned_abs() <= dt,
        }
    }
}

impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("inf") {
            return Ok(Threshold::Infinite);
        }
        match s.parse::<u64>() {
            Ok(dt) if dt > 0 => Ok(Threshold::Finite(dt)),
            _ => Err(Error::InvalidParameter(format!(
                "threshold must be a positive integer or \"inf\", got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Finite(dt) => write!(f, "{dt}"),
            Threshold::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Threshold {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Threshold::Finite(dt) => s.serialize_u64(*dt),
            Threshold::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Exact displacement counts; fractions are `count / total`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DisplacementDistribution {
    pub counts: BTreeMap<i64, u64>,
    pub total: u64,
    pub dt: Threshold,
}

impl DisplacementDistribution {
    /// Mass that survived truncation.
    pub fn retained(&self) -> u64 {
        self.counts.values().sum()
    }
}

impl fmt::Display for DisplacementDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, (d, c)) in self.counts.iter().enumerate() {
            if idx > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{d}:{c}/{}", self.total)?;
        }
        Ok(())
    }
}

/// Distribution of `p[i] - i` (1-based `i`) restricted to `[-dt, dt]`.
pub fn reorder_density(p: &Permutation, dt: Threshold) -> Result<DisplacementDistribution> {
    if dt == Threshold::Finite(0) {
        return Err(Error::InvalidParameter("threshold must be positive".into()));
    }
    let mut counts = BTreeMap::new();
    for (idx, &id) in p.ids().iter().enumerate() {
        let d = id as i64 - (idx as i64 + 1);
        if dt.admits(d) {
            *counts.entry(d).or_insert(0) += 1;
        }
    }
    Ok(DisplacementDistribution {
        counts,
        total: p.len() as u64,
        dt,
    })
}

/// Advertised receive window after each arrival.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RcvWindowSeries {
    pub rcv_buffer: u64,
    pub values: Vec<u64>,
}

pub fn rcv_window_series(a: &IdSequence, rcv_buffer: u64) -> Result<RcvWindowSeries> {
    if rcv_buffer == 0 {
        return Err(Error::InvalidParameter(
            "receive buffer must be positive".into(),
        ));
    }
    let values = map_m(a)
        .values()
        .iter()
        .enumerate()
        .map(|(idx, &m)| {
            rcv_buffer.checked_sub(m).ok_or(Error::CapacityExceeded {
                position: idx + 1,
                required: m,
                capacity: rcv_buffer,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RcvWindowSeries { rcv_buffer, values })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Consistency {
    Consistent,
    /// Two permutations with the same buffer sequence but different metric
    /// values; `first < second` lexicographically.
    Counterexample {
        first: Permutation,
        second: Permutation,
        image: BufferSequence,
    },
}

impl Consistency {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Consistency::Consistent)
    }
}

/// Checks whether `metric` takes equal values on every pair of permutations of
/// length `n` sharing a buffer sequence.
///
/// The reported pair is the lexicographically smallest `(first, second)` over
/// all violating pairs, independent of how the scan is split across threads.
pub fn is_consistent_on<F, T>(metric: F, n: usize) -> Result<Consistency>
where
    F: Fn(&Permutation) -> T + Sync,
    T: PartialEq + Send,
{
    check_range(n, MAX_EXHAUSTIVE_N)?;
    // Per class, keep the lexicographically first member and the first later
    // member whose value differs from it. Since equality is transitive, a
    // class has a violating pair iff such a member exists.
    struct ClassScan<T> {
        first: Permutation,
        value: T,
        differing: Option<Permutation>,
    }

    let partials: Vec<BTreeMap<BufferSequence, ClassScan<T>>> = (1..=n as u64)
        .into_par_iter()
        .map(|lead| {
            let mut classes: BTreeMap<BufferSequence, ClassScan<T>> = BTreeMap::new();
            for perm in permutations_with_first(n, lead) {
                let image = map_m(&perm);
                match classes.get_mut(&image) {
                    Some(scan) => {
                        if scan.differing.is_none() && metric(&perm) != scan.value {
                            scan.differing = Some(perm);
                        }
                    }
                    None => {
                        let value = metric(&perm);
                        classes.insert(
                            image,
                            ClassScan {
                                first: perm,
                                value,
                                differing: None,
                            },
                        );
                    }
                }
            }
            classes
        })
        .collect();

    // Merge in lead order, which preserves lexicographic order within a class.
    let mut merged: BTreeMap<BufferSequence, ClassScan<T>> = BTreeMap::new();
    for part in partials {
        for (image, scan) in part {
            match merged.get_mut(&image) {
                None => {
                    merged.insert(image, scan);
                }
                Some(acc) if acc.differing.is_none() => {
                    if scan.value != acc.value {
                        acc.differing = Some(scan.first);
                    } else if scan.differing.is_some() {
                        acc.differing = scan.differing;
                    }
                }
                Some(_) => {}
            }
        }
    }

    let witness = merged
        .into_iter()
        .filter_map(|(image, scan)| scan.differing.map(|second| (scan.first, second, image)))
        .min_by(|x, y| (&x.0, &x.1).cmp(&(&y.0, &y.1)));
    Ok(match witness {
        None => Consistency::Consistent,
        Some((first, second, image)) => Consistency::Counterexample {
            first,
            second,
            image,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(ids: &[u64]) -> Permutation {
        Permutation::new(ids.to_vec()).unwrap()
    }

    fn counts(pairs: &[(i64, u64)]) -> BTreeMap<i64, u64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn rd_examples() {
        let rd = reorder_density(&perm(&[4, 3, 2, 1]), Threshold::Infinite).unwrap();
        assert_eq!(rd.counts, counts(&[(-3, 1), (-1, 1), (1, 1), (3, 1)]));
        assert_eq!(rd.total, 4);
        assert_eq!(rd.to_string(), "-3:1/4 -1:1/4 1:1/4 3:1/4");

        let rd = reorder_density(&perm(&[4, 2, 3, 1]), Threshold::Infinite).unwrap();
        assert_eq!(rd.counts, counts(&[(-3, 1), (0, 2), (3, 1)]));
        assert_eq!(rd.total, 4);

        for dt in [
            Threshold::Finite(1),
            Threshold::Finite(7),
            Threshold::Infinite,
        ] {
            let rd = reorder_density(&Permutation::identity(5), dt).unwrap();
            assert_eq!(rd.counts, counts(&[(0, 5)]));
            assert_eq!(rd.total, 5);
        }

        let rd = reorder_density(&perm(&[4, 3, 2, 1]), Threshold::Finite(1)).unwrap();
        assert_eq!(rd.counts, counts(&[(-1, 1), (1, 1)]));
        assert_eq!((rd.total, rd.retained()), (4, 2));
    }

    #[test]
    fn rd_rejects_zero_threshold() {
        assert!(matches!(
            reorder_density(&perm(&[1]), Threshold::Finite(0)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn threshold_parsing() {
        assert_eq!("inf".parse::<Threshold>().unwrap(), Threshold::Infinite);
        assert_eq!("3".parse::<Threshold>().unwrap(), Threshold::Finite(3));
        assert!("0".parse::<Threshold>().is_err());
        assert!("-1".parse::<Threshold>().is_err());
        assert!("x".parse::<Threshold>().is_err());
    }

    #[test]
    fn rcv_window_examples() {
        let a = IdSequence::new(vec![4, 3, 2, 1]).unwrap();
        assert_eq!(rcv_window_series(&a, 4).unwrap().values, vec![0, 0, 0, 4]);
        let b = IdSequence::new(vec![1, 2, 3]).unwrap();
        assert_eq!(rcv_window_series(&b, 2).unwrap().values, vec![2, 2, 2]);
        assert_eq!(
            rcv_window_series(&a, 3),
            Err(Error::CapacityExceeded {
                position: 1,
                required: 4,
                capacity: 3
            })
        );
        assert!(rcv_window_series(&b, 0).is_err());
    }

    #[test]
    fn rd_is_inconsistent_for_small_thresholds() {
        for dt in [Threshold::Infinite, Threshold::Finite(1)] {
            let result = is_consistent_on(|p| reorder_density(p, dt).unwrap(), 4).unwrap();
            assert_eq!(
                result,
                Consistency::Counterexample {
                    first: perm(&[4, 2, 3, 1]),
                    second: perm(&[4, 3, 2, 1]),
                    image: BufferSequence::new(vec![4, 4, 4, 0]),
                }
            );
        }
    }

    #[test]
    fn buffer_metrics_are_consistent() {
        for n in 1..=6 {
            let mean = |p: &Permutation| map_m(p).values().iter().sum::<u64>();
            assert!(is_consistent_on(mean, n).unwrap().is_consistent());
        }
    }

    #[test]
    fn consistency_guard() {
        assert!(is_consistent_on(|_| 0, 0).is_err());
        assert!(is_consistent_on(|_| 0, 10).is_err());
    }
}
