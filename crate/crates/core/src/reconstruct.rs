//! Inverse of the buffer mapping for traces with at most three ascending runs.
//!
//! Such a trace is determined by its buffer sequence. The inverse runs in two
//! left-to-right passes. The first pass fixes every arrival where the buffer
//! size changes: a growing buffer means the new packet is the new maximum,
//! `ACK + w_i - 1`; a shrinking buffer means the packet is the awaited one,
//! `ACK`, and the ACK jumps by the amount released. The second pass fills each
//! position where the size is unchanged with the smallest ID not yet used.
//! The candidate is then checked by recomputing its buffer sequence and SUS.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::disorder::sus_greedy;
use crate::receiver::map_m;
use crate::sequence::{AckSequence, BufferSequence, IdSequence, Permutation};

/// Returned when no permutation with SUS at most 3 maps to the input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("NO PERMUTATION EXISTS")]
pub struct NoPreimage;

/// Working state of both passes, kept for inspection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReconstructionTrace {
    /// Assigned IDs; `None` marks positions left for the second pass.
    pub packet: Vec<Option<u64>>,
    pub ack: AckSequence,
    /// 1-based positions where the buffer size changed.
    pub phase1_positions: Vec<usize>,
    /// 1-based positions where the buffer size repeated.
    pub phase2_positions: Vec<usize>,
}

impl ReconstructionTrace {
    /// The candidate sequence, if every position has been assigned.
    pub fn candidate(&self) -> Option<Vec<u64>> {
        self.packet.iter().copied().collect()
    }
}

impl fmt::Display for ReconstructionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, p) in self.packet.iter().enumerate() {
            if idx > 0 {
                f.write_str(" ")?;
            }
            match p {
                Some(id) => write!(f, "{id}")?,
                None => f.write_str("_")?,
            }
        }
        Ok(())
    }
}

/// Runs only the first pass.
fn first_pass(w: &BufferSequence) -> ReconstructionTrace {
    let n = w.len();
    let mut packet = vec![None; n];
    let mut acks = Vec::with_capacity(n);
    let mut phase1 = Vec::new();
    let mut phase2 = Vec::new();
    let mut ack = 1u64;
    for (idx, &cur) in w.values().iter().enumerate() {
        let pos = idx + 1;
        let prev = w.prev(pos);
        if cur < prev {
            packet[idx] = Some(ack);
            ack += prev - cur;
            phase1.push(pos);
        } else if cur > prev {
            // previous maximum (ack + prev - 1) plus the growth
            packet[idx] = Some(ack + cur - 1);
            phase1.push(pos);
        } else {
            if cur == 0 {
                ack += 1;
            }
            phase2.push(pos);
        }
        acks.push(ack);
    }
    ReconstructionTrace {
        packet,
        ack: acks.into(),
        phase1_positions: phase1,
        phase2_positions: phase2,
    }
}

/// Runs both passes without verifying the result.
pub fn run_phases(w: &BufferSequence) -> ReconstructionTrace {
    let mut trace = first_pass(w);
    let n = trace.packet.len();
    // The smallest free ID never exceeds the number of assigned IDs plus one,
    // so IDs above n + 1 can be ignored when tracking what is taken.
    let mut taken = vec![false; n + 2];
    for id in trace.packet.iter().flatten() {
        if let Some(slot) = usize::try_from(*id).ok().and_then(|i| taken.get_mut(i)) {
            *slot = true;
        }
    }
    let mut smallest_free = 1usize;
    for &pos in &trace.phase2_positions {
        while taken[smallest_free] {
            smallest_free += 1;
        }
        taken[smallest_free] = true;
        trace.packet[pos - 1] = Some(smallest_free as u64);
    }
    trace
}

/// Rebuilds the unique permutation with SUS at most 3 whose buffer sequence is `w`.
pub fn reconstruct(w: &BufferSequence) -> Result<Permutation, NoPreimage> {
    let candidate = run_phases(w).candidate().ok_or(NoPreimage)?;
    let perm = IdSequence::new(candidate)
        .ok()
        .and_then(|seq| Permutation::try_from(seq).ok())
        .ok_or(NoPreimage)?;
    if map_m(&perm) != *w || sus_greedy(&perm).u() > 3 {
        return Err(NoPreimage);
    }
    Ok(perm)
}
