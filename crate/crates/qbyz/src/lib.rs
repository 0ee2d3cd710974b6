//! Deterministic simulator and library for detectable broadcast over
//! correlated private lists, with fault-tolerant clock synchronization on
//! top.
//!
//! The pieces, bottom up:
//!
//! * [`qudit`] — exact state-vector simulation of the single travelling
//!   qudit that distributes list positions, with post-selection and a
//!   detector-efficiency gate.
//! * [`lists`] — the correlated private lists, a trusted-dealer backend with
//!   the same output law, and claim checking.
//! * [`harness`] — synchronous slot-based network, fault-strategy library,
//!   JSON-Lines transcripts with seed replay.
//! * [`dba`] — the one-relay-round detectable-broadcast engine and its
//!   verdict table; tolerates any number of faults.
//! * [`om`] — the classical recursive oral-messages baseline with exact
//!   message counting (works only below one third faulty).
//! * [`clock`] — m rotated broadcast runs carrying bitwise-encoded clock
//!   differences, median adjustment, C1/C2 verification.
//! * [`cost`] — closed-form and Monte Carlo detection-cost comparison of the
//!   distribution schemes.
//!
//! Everything is driven by explicit `u64` seeds; identical seeds and
//! configurations reproduce byte-identical transcripts.

pub mod clock;
pub mod cost;
pub mod dba;
pub mod harness;
pub mod lists;
pub mod om;
pub mod qudit;
pub mod rng;
pub mod stats;

pub use clock::{check_c1_c2, run_sync, ClockState, ListBackend, SyncConfig, SyncReport};
pub use cost::{list_type_count, monte_carlo_efficiency, CostModel, Scheme};
pub use dba::{decide, run_qb, Decision, QbConfig, QbOutcome, Verdict, VerdictCase};
pub use harness::{
    apply_strategy, FaultPlan, Network, ProcessId, RelayPayload, Strategy, Transcript,
};
pub use lists::{
    check_claim, dealer_generate, positions_of, validate_list_set, Claim, ClaimCheck,
    CorrelatedListSet, Provenance,
};
pub use om::{om, om_message_count, OmConfig, OmOutcome};
pub use qudit::{
    generate_list_set, measure_initial_projection, run_distribution_round, Projection, QuditState,
    RoundRecord,
};
pub use rng::{derive_seed, process_rng, rng_from_seed, ProtocolRng};
