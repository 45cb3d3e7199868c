//! Receiver-side view of a trace: buffer sizes, cumulative ACKs and the
//! ordered/unordered episode structure.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequence::{AckSequence, BufferSequence, IdSequence};

/// What the receiver knows after a prefix of the trace.
#[derive(Debug, Clone, Default)]
pub struct ReceiverState {
    highest_seen: u64,
    uploadable: u64,
    received: HashSet<u64>,
}

impl ReceiverState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records an arrival.
    pub fn receive(&mut self, id: u64) -> Result<()> {
        if id == 0 {
            return Err(Error::NonPositiveId {
                position: self.received.len() + 1,
                id: 0,
            });
        }
        if !self.received.insert(id) {
            return Err(Error::RepeatedArrival {
                position: self.received.len() + 1,
                id,
            });
        }
        self.highest_seen = self.highest_seen.max(id);
        while self.received.contains(&(self.uploadable + 1)) {
            self.uploadable += 1;
        }
        Ok(())
    }

    /// Highest ID seen so far, 0 before any arrival.
    pub fn highest_seen(&self) -> u64 {
        self.highest_seen
    }

    /// Largest `L` such that every ID in 1..=L has arrived.
    pub fn uploadable(&self) -> u64 {
        self.uploadable
    }

    pub fn received(&self) -> &HashSet<u64> {
        &self.received
    }

    /// Minimal buffer size, reserving room for the gaps.
    pub fn buffer_size(&self) -> u64 {
        self.highest_seen - self.uploadable
    }

    /// Next in-order ID expected, i.e. the cumulative ACK.
    pub fn ack(&self) -> u64 {
        self.uploadable + 1
    }
}

/// Replays `a` through a fresh receiver, yielding the state after each arrival.
fn replay(a: &IdSequence) -> impl Iterator<Item = (u64, u64)> + '_ {
    let mut state = ReceiverState::new();
    a.ids().iter().map(move |&id| {
        state
            .receive(id)
            .expect("IdSequence holds distinct positive IDs");
        (state.highest_seen(), state.uploadable())
    })
}

/// Buffer size `H_i - L_i` after each arrival.
pub fn map_m(a: &IdSequence) -> BufferSequence {
    replay(a)
        .map(|(high, low)| high - low)
        .collect::<Vec<_>>()
        .into()
}

/// Cumulative ACK `L_i + 1` after each arrival.
pub fn ack_sequence(a: &IdSequence) -> AckSequence {
    replay(a).map(|(_, low)| low + 1).collect::<Vec<_>>().into()
}

/// Two traces are FB-equivalent when they produce the same buffer sequence.
pub fn fb_equivalent(a: &IdSequence, b: &IdSequence) -> bool {
    a.len() == b.len() && map_m(a) == map_m(b)
}

/// Two traces are behaviorally equivalent when the receiver sends the same ACKs.
pub fn behaviorally_equivalent(a: &IdSequence, b: &IdSequence) -> bool {
    a.len() == b.len() && ack_sequence(a) == ack_sequence(b)
}

/// Recovers the ACK stream from buffer sizes alone (`w_0 = 0`, `ACK_0 = 1`).
///
/// A shrinking buffer releases exactly the difference; a buffer that stays
/// empty releases one in-order packet; otherwise nothing is released.
/// Feasibility of `w` is not checked.
pub fn ack_from_buffer(w: &BufferSequence) -> AckSequence {
    let mut ack = 1u64;
    let mut prev = 0u64;
    let mut out = Vec::with_capacity(w.len());
    for &cur in w.values() {
        if cur < prev {
            ack += prev - cur;
        } else if cur == 0 && prev == 0 {
            ack += 1;
        }
        out.push(ack);
        prev = cur;
    }
    out.into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum State {
    /// Packets arrive in order and are delivered at once.
    #[serde(rename = "O")]
    Ordered,
    /// Packets are being reordered and buffered.
    #[serde(rename = "U")]
    Unordered,
}

impl State {
    pub fn symbol(self) -> char {
        match self {
            State::Ordered => 'O',
            State::Unordered => 'U',
        }
    }
}

/// A maximal run of positions sharing one state; bounds are 1-based and inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Episode {
    pub state: State,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EpisodeSegmentation {
    pub episodes: Vec<Episode>,
    /// 1-based positions whose arrival advanced the in-order prefix.
    pub pivots: BTreeSet<usize>,
}

impl EpisodeSegmentation {
    /// IDs of the pivot packets in `a`, in arrival order.
    pub fn pivot_ids(&self, a: &IdSequence) -> Vec<u64> {
        self.pivots.iter().map(|&pos| a.ids()[pos - 1]).collect()
    }
}

/// Splits a trace into ordered and unordered episodes and marks pivots.
///
/// Position `i` is ordered when the buffer is empty both before and after the
/// arrival; pivots are the arrivals that advance `L`.
pub fn segment_episodes(a: &IdSequence) -> EpisodeSegmentation {
    let mut episodes: Vec<Episode> = Vec::new();
    let mut pivots = BTreeSet::new();
    let (mut prev_low, mut prev_m) = (0u64, 0u64);
    for (idx, (high, low)) in replay(a).enumerate() {
        let pos = idx + 1;
        let m = high - low;
        if low > prev_low {
            pivots.insert(pos);
        }
        let state = if m == 0 && prev_m == 0 {
            State::Ordered
        } else {
            State::Unordered
        };
        match episodes.last_mut() {
            Some(last) if last.state == state => last.end = pos,
            _ => episodes.push(Episode {
                state,
                start: pos,
                end: pos,
            }),
        }
        prev_low = low;
        prev_m = m;
    }
    EpisodeSegmentation { episodes, pivots }
}
