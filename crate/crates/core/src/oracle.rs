//! Exhaustive checks over all permutations of a small length.
//!
//! Permutations are visited in lexicographic order, split by their first
//! element across rayon workers and merged back in that order, so every report
//! and witness is the same whatever the thread count.

use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::disorder::{lds_bruteforce, sus_greedy};
use crate::error::{Error, Result};
use crate::receiver::{ack_from_buffer, ack_sequence, map_m, ReceiverState};
use crate::reconstruct::reconstruct;
use crate::sequence::{BufferSequence, Permutation};

/// Largest length enumerated exhaustively (9! = 362880 permutations).
pub const MAX_EXHAUSTIVE_N: usize = 9;
/// Largest length for [`verify_identities`].
pub const MAX_IDENTITY_N: usize = 7;

pub(crate) fn check_range(n: usize, max: usize) -> Result<()> {
    if (1..=max).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "length must be between 1 and {max}, got {n}"
        )))
    }
}

/// Permutations of 1..=n starting with `lead`, in lexicographic order.
pub(crate) fn permutations_with_first(n: usize, lead: u64) -> impl Iterator<Item = Permutation> {
    let rest: Vec<u64> = (1..=n as u64).filter(|&id| id != lead).collect();
    let k = rest.len();
    rest.into_iter().permutations(k).map(move |tail| {
        let mut ids = Vec::with_capacity(n);
        ids.push(lead);
        ids.extend(tail);
        Permutation::from_ids_unchecked(ids)
    })
}

/// All permutations of 1..=n in lexicographic order.
pub fn permutations(n: usize) -> impl Iterator<Item = Permutation> {
    (1..=n as u64).flat_map(move |lead| permutations_with_first(n, lead))
}

/// Runs `scan` over each first-element slice in parallel and returns the
/// results in lexicographic slice order.
fn scan_by_lead<R, F>(n: usize, scan: F) -> Vec<R>
where
    R: Send,
    F: Fn(Box<dyn Iterator<Item = Permutation>>) -> R + Sync,
{
    (1..=n as u64)
        .into_par_iter()
        .map(|lead| scan(Box::new(permutations_with_first(n, lead))))
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClassStats {
    pub class_count: usize,
    pub max_class_size: usize,
    /// Classes with at least two members.
    pub shared_classes: usize,
    /// Classes with at least two members of SUS at most 3.
    pub shared_low_sus_classes: usize,
}

/// All permutations of length `n` grouped by buffer sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceClassReport {
    pub n: usize,
    #[serde(serialize_with = "serialize_classes")]
    pub classes: BTreeMap<BufferSequence, Vec<Permutation>>,
    pub stats: ClassStats,
}

fn serialize_classes<S: Serializer>(
    classes: &BTreeMap<BufferSequence, Vec<Permutation>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Class<'a> {
        image: &'a BufferSequence,
        members: &'a [Permutation],
    }
    let mut seq = s.serialize_seq(Some(classes.len()))?;
    for (image, members) in classes {
        seq.serialize_element(&Class { image, members })?;
    }
    seq.end()
}

impl EquivalenceClassReport {
    /// Members of the class with buffer sequence `image`.
    pub fn class_of(&self, image: &BufferSequence) -> Option<&[Permutation]> {
        self.classes.get(image).map(Vec::as_slice)
    }

    /// Lexicographically smallest pair of distinct members with SUS at most 3
    /// sharing a class, if any.
    pub fn low_sus_collision(&self) -> Option<(Permutation, Permutation)> {
        self.classes
            .values()
            .filter_map(|members| {
                let mut low = members.iter().filter(|p| sus_greedy(p).u() <= 3);
                Some((low.next()?.clone(), low.next()?.clone()))
            })
            .min()
    }
}

pub fn enumerate_classes(n: usize) -> Result<EquivalenceClassReport> {
    check_range(n, MAX_EXHAUSTIVE_N)?;
    let partials = scan_by_lead(n, |perms| {
        let mut classes: BTreeMap<BufferSequence, Vec<Permutation>> = BTreeMap::new();
        for perm in perms {
            classes.entry(map_m(&perm)).or_default().push(perm);
        }
        classes
    });
    let mut classes: BTreeMap<BufferSequence, Vec<Permutation>> = BTreeMap::new();
    for part in partials {
        for (image, members) in part {
            classes.entry(image).or_default().extend(members);
        }
    }

    let mut stats = ClassStats {
        class_count: classes.len(),
        ..ClassStats::default()
    };
    for members in classes.values() {
        stats.max_class_size = stats.max_class_size.max(members.len());
        if members.len() >= 2 {
            stats.shared_classes += 1;
            if members.iter().filter(|p| sus_greedy(p).u() <= 3).count() >= 2 {
                stats.shared_low_sus_classes += 1;
            }
        }
    }
    Ok(EquivalenceClassReport { n, classes, stats })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", content = "witness", rename_all = "snake_case")]
pub enum Verdict<W> {
    Pass,
    Failure(W),
}

impl<W> Verdict<W> {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

/// Checks that no two distinct permutations of length `n` with SUS at most 3
/// share a buffer sequence.
pub fn verify_theorem(n: usize) -> Result<Verdict<(Permutation, Permutation)>> {
    let report = enumerate_classes(n)?;
    Ok(match report.low_sus_collision() {
        None => Verdict::Pass,
        Some(pair) => Verdict::Failure(pair),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// Largest ID seen equals `ACK_i + M_i - 1`.
    LargestSeen,
    /// Greedy list count equals the longest decreasing subsequence.
    GreedyMatchesLds,
    /// Reconstruction inverts the buffer mapping for SUS at most 3.
    RoundTrip,
    /// ACKs recovered from the buffer sequence match the direct ACKs.
    AckFromBuffer,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityViolation {
    pub permutation: Permutation,
    pub identity: Identity,
    /// 1-based step, for per-arrival identities.
    pub step: Option<usize>,
}

fn check_identities(perm: &Permutation) -> Option<IdentityViolation> {
    let violation = |identity, step| {
        Some(IdentityViolation {
            permutation: perm.clone(),
            identity,
            step,
        })
    };

    let image = map_m(perm);
    let acks = ack_sequence(perm);
    let mut state = ReceiverState::new();
    for (idx, &id) in perm.ids().iter().enumerate() {
        state.receive(id).expect("permutation IDs are distinct");
        if state.highest_seen() + 1 != acks.values()[idx] + image.values()[idx] {
            return violation(Identity::LargestSeen, Some(idx + 1));
        }
    }

    let sus = sus_greedy(perm).u();
    if sus != lds_bruteforce(perm) {
        return violation(Identity::GreedyMatchesLds, None);
    }
    if sus <= 3 && reconstruct(&image).as_ref() != Ok(perm) {
        return violation(Identity::RoundTrip, None);
    }
    if ack_from_buffer(&image) != acks {
        return violation(Identity::AckFromBuffer, None);
    }
    None
}

/// Checks the per-permutation identities over every permutation of length `n`
/// and reports the first violation in lexicographic order.
pub fn verify_identities(n: usize) -> Result<Verdict<IdentityViolation>> {
    check_range(n, MAX_IDENTITY_N)?;
    let first = scan_by_lead(n, |mut perms| perms.find_map(|p| check_identities(&p)))
        .into_iter()
        .flatten()
        .next();
    Ok(match first {
        None => Verdict::Pass,
        Some(v) => Verdict::Failure(v),
    })
}
