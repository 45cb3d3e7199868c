//! Sequence types: packet-ID traces and the per-arrival series derived from them.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;

use serde::Serialize;

use crate::error::{Error, Result};

/// Packet IDs in arrival order. IDs are positive and pairwise distinct; gaps
/// (lost packets) are allowed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct IdSequence(Vec<u64>);

impl IdSequence {
    pub fn new(ids: Vec<u64>) -> Result<Self> {
        let mut seen = HashMap::with_capacity(ids.len());
        for (idx, &id) in ids.iter().enumerate() {
            if id == 0 {
                return Err(Error::NonPositiveId {
                    position: idx + 1,
                    id: 0,
                });
            }
            if let Some(first) = seen.insert(id, idx + 1) {
                return Err(Error::DuplicateId {
                    position: idx + 1,
                    first,
                    id,
                });
            }
        }
        Ok(Self(ids))
    }

    /// Builds a sequence from signed values, as read from a trace file.
    pub fn from_signed(ids: &[i64]) -> Result<Self> {
        let unsigned = ids
            .iter()
            .enumerate()
            .map(|(idx, &id)| {
                u64::try_from(id)
                    .ok()
                    .filter(|&id| id > 0)
                    .ok_or(Error::NonPositiveId {
                        position: idx + 1,
                        id,
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(unsigned)
    }

    pub fn ids(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when the IDs are exactly 1..n in some order.
    pub fn is_permutation(&self) -> bool {
        // distinct and all within 1..=n implies a permutation
        let n = self.0.len() as u64;
        self.0.iter().all(|&id| id <= n)
    }

    pub fn into_inner(self) -> Vec<u64> {
        self.0
    }
}

impl TryFrom<Vec<u64>> for IdSequence {
    type Error = Error;

    fn try_from(ids: Vec<u64>) -> Result<Self> {
        Self::new(ids)
    }
}

impl fmt::Display for IdSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_spaced(f, &self.0)
    }
}

/// An [`IdSequence`] holding exactly the IDs 1..n.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Permutation(IdSequence);

impl Permutation {
    pub fn new(ids: Vec<u64>) -> Result<Self> {
        IdSequence::new(ids).and_then(Self::try_from)
    }

    pub fn identity(n: usize) -> Self {
        Self(IdSequence((1..=n as u64).collect()))
    }

    pub fn as_id_sequence(&self) -> &IdSequence {
        &self.0
    }

    /// Unchecked constructor for values produced by permutation enumeration.
    pub(crate) fn from_ids_unchecked(ids: Vec<u64>) -> Self {
        debug_assert!(IdSequence::new(ids.clone()).is_ok_and(|s| s.is_permutation()));
        Self(IdSequence(ids))
    }
}

impl TryFrom<IdSequence> for Permutation {
    type Error = Error;

    fn try_from(seq: IdSequence) -> Result<Self> {
        if seq.is_permutation() {
            Ok(Self(seq))
        } else {
            Err(Error::NotPermutation { len: seq.len() })
        }
    }
}

impl Deref for Permutation {
    type Target = IdSequence;

    fn deref(&self) -> &IdSequence {
        &self.0
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Minimal out-of-order buffer size after each arrival.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct BufferSequence(Vec<u64>);

impl BufferSequence {
    pub fn new(values: Vec<u64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Value before position `i` (1-based), with the `w_0 = 0` convention.
    pub(crate) fn prev(&self, i: usize) -> u64 {
        if i <= 1 {
            0
        } else {
            self.0[i - 2]
        }
    }
}

impl From<Vec<u64>> for BufferSequence {
    fn from(values: Vec<u64>) -> Self {
        Self(values)
    }
}

impl fmt::Display for BufferSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_spaced(f, &self.0)
    }
}

/// Cumulative ACK sent after each arrival: the first ID not yet received.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct AckSequence(Vec<u64>);

impl AckSequence {
    pub fn new(values: Vec<u64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<u64>> for AckSequence {
    fn from(values: Vec<u64>) -> Self {
        Self(values)
    }
}

impl fmt::Display for AckSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_spaced(f, &self.0)
    }
}

fn write_spaced(f: &mut fmt::Formatter<'_>, values: &[u64]) -> fmt::Result {
    for (idx, v) in values.iter().enumerate() {
        if idx > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_and_duplicates() {
        assert_eq!(
            IdSequence::new(vec![1, 0, 2]),
            Err(Error::NonPositiveId { position: 2, id: 0 })
        );
        assert_eq!(
            IdSequence::new(vec![3, 1, 3]),
            Err(Error::DuplicateId {
                position: 3,
                first: 1,
                id: 3
            })
        );
        assert_eq!(
            IdSequence::from_signed(&[2, -5]),
            Err(Error::NonPositiveId {
                position: 2,
                id: -5
            })
        );
    }

    #[test]
    fn losses_are_allowed_but_not_permutations() {
        let seq = IdSequence::new(vec![1, 2, 5]).unwrap();
        assert!(!seq.is_permutation());
        assert_eq!(
            Permutation::try_from(seq),
            Err(Error::NotPermutation { len: 3 })
        );
        assert!(Permutation::new(vec![3, 1, 2]).is_ok());
        assert!(Permutation::new(vec![]).is_ok());
    }

    #[test]
    fn display_is_space_separated() {
        let p = Permutation::new(vec![4, 2, 3, 1]).unwrap();
        assert_eq!(p.to_string(), "4 2 3 1");
        assert_eq!(BufferSequence::new(vec![]).to_string(), "");
    }
}
