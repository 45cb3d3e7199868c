//! Analysis of packet reordering as seen by a cumulative-ACK receiver.
//!
//! The central object is the buffer sequence of a packet-ID trace: after each
//! arrival, the distance between the highest ID seen and the highest ID that
//! could be delivered in order. From it the crate derives ACK streams,
//! ordered/unordered episodes and receive-window series, measures disorder with
//! the greedy ascending-list partition, inverts buffer sequences for traces
//! made of at most three ascending runs, and checks reordering metrics for
//! consistency across traces that share a buffer sequence.

pub mod disorder;
mod error;
pub mod metrics;
pub mod oracle;
pub mod receiver;
pub mod reconstruct;
pub mod sequence;

pub use disorder::{lds_bruteforce, sus_greedy, SusGreedy, SusPartition};
pub use error::{Error, Result};
pub use metrics::{
    is_consistent_on, rcv_window_series, reorder_density, Consistency, DisplacementDistribution,
    RcvWindowSeries, Threshold,
};
pub use oracle::{
    enumerate_classes, permutations, verify_identities, verify_theorem, ClassStats,
    EquivalenceClassReport, Identity, IdentityViolation, Verdict,
};
pub use receiver::{
    ack_from_buffer, ack_sequence, behaviorally_equivalent, fb_equivalent, map_m, segment_episodes,
    Episode, EpisodeSegmentation, ReceiverState, State,
};
pub use reconstruct::{reconstruct, run_phases, NoPreimage, ReconstructionTrace};
pub use sequence::{AckSequence, BufferSequence, IdSequence, Permutation};
