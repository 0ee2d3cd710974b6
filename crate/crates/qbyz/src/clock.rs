//! Fault-tolerant clock synchronization on top of rotated broadcast runs.
//!
//! The model is drift-free: each process owns an integer tick offset relative
//! to a global reference, rates are all 1, and a process can read the exact
//! difference between any other clock and its own. One sync round runs m
//! rotations; in rotation x the source P_x broadcasts its full difference
//! vector (offset_x - offset_k for every k), each entry as `bit_width`
//! independent broadcast runs over fresh list sets (one per bit). Honest
//! receivers cross-check the agreed vectors pairwise (triangle relations plus
//! antisymmetry against their own readings), reject sources inconsistent with
//! a majority, and adjust by the lower median of the accepted sources'
//! entries. Goals: C1 — honest clocks equal afterwards; C2 — no honest clock
//! moves farther than the largest honest pairwise offset before the round.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::dba::{run_qb, DbaError, Decision, QbConfig};
use crate::harness::{FaultPlan, ProcessId, Strategy, Transcript};
use crate::lists::{dealer_generate, CorrelatedListSet};
use crate::om::lower_median;
use crate::qudit::{default_round_budget, generate_list_set, DistributionError};
use crate::rng::{derive_seed, ProtocolRng};
use rand_chacha::rand_core::SeedableRng;

#[derive(Debug, Error)]
pub enum ClockError {
    #[error("difference {delta} does not fit in {bit_width} bits (two's complement)")]
    Range { delta: i64, bit_width: usize },
    #[error("invalid sync config: {0}")]
    BadConfig(String),
    #[error("list generation failed: {0}")]
    ListGeneration(#[from] DistributionError),
    #[error("broadcast failed: {0}")]
    Dba(#[from] DbaError),
}

/// A process clock in the drift-free model: rate fixed at 1, only the offset
/// matters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClockState {
    pub offset_ticks: i64,
}

impl ClockState {
    pub fn new(offset_ticks: i64) -> Self {
        Self { offset_ticks }
    }
}

/// Which backend distributes the per-bit list sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ListBackend {
    Quantum { eta: f64 },
    Dealer,
}

#[derive(Debug, Clone, Serialize)]
pub struct SyncConfig {
    /// Two's-complement width for encoded differences. Differences must
    /// satisfy |delta| < 2^(bit_width-1).
    pub bit_width: usize,
    /// Seconds per tick; reporting only in the drift-free model.
    pub resolution_secs: f64,
    /// Source order; must be a permutation of the process ids.
    pub rotation_order: Vec<ProcessId>,
    /// Claim-length tolerance handed to every broadcast run (None = default).
    pub theta: Option<f64>,
    /// List length per broadcast bit.
    pub list_length: usize,
    /// Quantum-backend round budget per list set (None = default).
    pub round_budget_per_list: Option<usize>,
    /// Tolerance for the pairwise vector cross-checks, in ticks. Two reads
    /// quantize at one tick each.
    pub triangle_tolerance_ticks: i64,
    pub backend: ListBackend,
}

impl SyncConfig {
    pub fn for_processes(m: usize) -> Self {
        Self {
            bit_width: 16,
            resolution_secs: 1e-3,
            rotation_order: (0..m).collect(),
            theta: None,
            list_length: 64,
            round_budget_per_list: None,
            triangle_tolerance_ticks: 2,
            backend: ListBackend::Dealer,
        }
    }

    pub fn validate(&self, m: usize) -> Result<(), ClockError> {
        if self.bit_width < 2 || self.bit_width > 62 {
            return Err(ClockError::BadConfig(format!(
                "bit_width must be in 2..=62, got {}",
                self.bit_width
            )));
        }
        if self.resolution_secs <= 0.0 {
            return Err(ClockError::BadConfig("resolution must be positive".into()));
        }
        let mut seen: BTreeSet<ProcessId> = BTreeSet::new();
        for &p in &self.rotation_order {
            if p >= m || !seen.insert(p) {
                return Err(ClockError::BadConfig(format!(
                    "rotation order must be a permutation of 0..{m}"
                )));
            }
        }
        if seen.len() != m {
            return Err(ClockError::BadConfig(format!(
                "rotation order must cover all {m} processes"
            )));
        }
        if self.list_length == 0 {
            return Err(ClockError::BadConfig(
                "list_length must be at least 1".into(),
            ));
        }
        if let Some(budget) = self.round_budget_per_list {
            if budget < self.list_length {
                return Err(ClockError::BadConfig(
                    "round budget cannot be below the list length".into(),
                ));
            }
        }
        if self.triangle_tolerance_ticks < 0 {
            return Err(ClockError::BadConfig(
                "triangle tolerance must be >= 0".into(),
            ));
        }
        if let ListBackend::Quantum { eta } = self.backend {
            if !(0.0..=1.0).contains(&eta) {
                return Err(ClockError::BadConfig(format!(
                    "detector efficiency must be in [0, 1], got {eta}"
                )));
            }
        }
        Ok(())
    }
}

/// Honest read of another clock: offset_x - offset_y, exact.
pub fn read_difference(x: ProcessId, y: ProcessId, clocks: &[ClockState]) -> i64 {
    clocks[x].offset_ticks - clocks[y].offset_ticks
}

/// Two's-complement encoding, most significant bit first.
pub fn encode_difference(delta: i64, bit_width: usize) -> Result<Vec<u8>, ClockError> {
    let lo = -(1i64 << (bit_width - 1));
    let hi = (1i64 << (bit_width - 1)) - 1;
    if delta < lo || delta > hi {
        return Err(ClockError::Range { delta, bit_width });
    }
    let unsigned = (delta as u64) & ((1u64 << bit_width) - 1);
    Ok((0..bit_width)
        .rev()
        .map(|i| ((unsigned >> i) & 1) as u8)
        .collect())
}

/// Inverse of `encode_difference`.
pub fn decode_difference(bits: &[u8]) -> i64 {
    let width = bits.len();
    let mut value: i64 = 0;
    for &b in bits {
        value = (value << 1) | b as i64;
    }
    if width > 0 && bits[0] == 1 {
        value -= 1i64 << width;
    }
    value
}

#[derive(Debug, Clone, Serialize)]
pub struct RotationReport {
    pub source: ProcessId,
    pub aborted: bool,
    /// The agreed vector as seen by the first honest receiver, if completed.
    pub vector: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SyncReport {
    pub per_rotation: Vec<RotationReport>,
    pub adjustments: Vec<i64>,
    pub c1: bool,
    pub c2: bool,
    pub aborted: bool,
    /// Sources rejected by the cross-checks (first honest receiver's view).
    pub rejected_sources: Vec<ProcessId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct C1C2Report {
    pub c1: bool,
    pub c2: bool,
}

/// C1: all honest offsets equal after the round (exact, drift-free model).
/// C2: every honest adjustment is bounded by the largest honest pairwise
/// offset difference before the round.
pub fn check_c1_c2(
    before: &[ClockState],
    after: &[ClockState],
    honest: &BTreeSet<ProcessId>,
) -> C1C2Report {
    let honest_after: Vec<i64> = honest.iter().map(|&p| after[p].offset_ticks).collect();
    let c1 = honest_after.windows(2).all(|w| w[0] == w[1]);
    let max_pairwise = honest
        .iter()
        .flat_map(|&a| honest.iter().map(move |&b| (a, b)))
        .map(|(a, b)| (before[a].offset_ticks - before[b].offset_ticks).abs())
        .max()
        .unwrap_or(0);
    let c2 = honest
        .iter()
        .all(|&p| (after[p].offset_ticks - before[p].offset_ticks).abs() <= max_pairwise);
    C1C2Report { c1, c2 }
}

/// True when vectors `a` (from source sa) and `b` (from source sb) tell a
/// consistent story within tolerance: antisymmetry of the cross entries and
/// equality of every entry difference with the claimed pairwise offset.
fn vectors_consistent(a: &[i64], sa: ProcessId, b: &[i64], sb: ProcessId, tolerance: i64) -> bool {
    if (a[sb] + b[sa]).abs() > tolerance {
        return false;
    }
    (0..a.len()).all(|z| (a[z] - b[z] + b[sa]).abs() <= tolerance)
}

struct ProcessView {
    /// Agreed vector per completed rotation source.
    vectors: BTreeMap<ProcessId, Vec<i64>>,
}

impl ProcessView {
    /// Sources whose vectors fail the cross-checks against a strict majority
    /// of the other completed sources, or whose self-entry is nonzero.
    fn rejected(&self, tolerance: i64) -> BTreeSet<ProcessId> {
        let sources: Vec<ProcessId> = self.vectors.keys().copied().collect();
        let mut rejected = BTreeSet::new();
        for &x in &sources {
            let vx = &self.vectors[&x];
            if vx[x].abs() > tolerance {
                rejected.insert(x);
                continue;
            }
            let others = sources.len().saturating_sub(1);
            if others == 0 {
                continue;
            }
            let bad = sources
                .iter()
                .filter(|&&y| y != x)
                .filter(|&&y| !vectors_consistent(vx, x, &self.vectors[&y], y, tolerance))
                .count();
            if 2 * bad > others {
                rejected.insert(x);
            }
        }
        rejected
    }

    fn adjustment(&self, own: ProcessId, tolerance: i64) -> Option<i64> {
        let rejected = self.rejected(tolerance);
        let entries: Vec<i64> = self
            .vectors
            .iter()
            .filter(|(x, _)| !rejected.contains(x))
            .map(|(_, v)| v[own])
            .collect();
        if entries.is_empty() {
            None
        } else {
            Some(lower_median(&entries))
        }
    }
}

/// Runs one synchronization round. Returns the adjusted clocks and a report;
/// if the round fails (every rotation aborted for some honest process, or no
/// source survives the cross-checks) the clocks are returned unchanged with
/// `aborted` set.
pub fn run_sync(
    clocks: &[ClockState],
    plan: &FaultPlan,
    cfg: &SyncConfig,
    seed: u64,
    transcript: &mut Transcript,
) -> Result<(Vec<ClockState>, SyncReport), ClockError> {
    let m = clocks.len();
    if plan.len() != m {
        return Err(ClockError::BadConfig(format!(
            "fault plan covers {} processes, clocks {m}",
            plan.len()
        )));
    }
    cfg.validate(m)?;
    // Honest differences must be encodable up front.
    for x in 0..m {
        for y in 0..m {
            let d = read_difference(x, y, clocks);
            encode_difference(d, cfg.bit_width)?;
        }
    }
    let honest = plan.honest_set();
    let lo = -(1i64 << (cfg.bit_width - 1));
    let hi = (1i64 << (cfg.bit_width - 1)) - 1;
    let qb_cfg = QbConfig { theta: cfg.theta };
    let budget = cfg
        .round_budget_per_list
        .unwrap_or_else(|| default_round_budget(m, cfg.list_length));

    // view[p] = what process p ended up agreeing to, per rotation.
    let mut views: Vec<ProcessView> = (0..m)
        .map(|_| ProcessView {
            vectors: BTreeMap::new(),
        })
        .collect();
    let mut per_rotation = Vec::with_capacity(cfg.rotation_order.len());
    let mut qb_trial = 0u64;

    for (rotation_idx, &source) in cfg.rotation_order.iter().enumerate() {
        // The source reads (or fakes) its difference vector.
        let mut vector: Vec<i64> = (0..m).map(|k| read_difference(source, k, clocks)).collect();
        if let Strategy::LieClockDifferences(lies) = plan.strategy(source) {
            for (&entry, &delta) in lies {
                if entry < m {
                    vector[entry] = (vector[entry] + delta).clamp(lo, hi);
                }
            }
        }
        transcript.push(
            qb_trial,
            0,
            source,
            source,
            "rotation_vector",
            json!({"rotation": rotation_idx, "vector": vector}),
            None,
        );

        // Broadcast each entry bit by bit over fresh list sets. A source that
        // is honest at the message layer evaluates the public length window
        // on its own claims: when a claim trips it every honest receiver
        // aborts, and the source must drop its own rotation in exactly the
        // same cases or the views diverge.
        let qb_honest_source = matches!(
            plan.strategy(source),
            Strategy::Honest | Strategy::LieClockDifferences(_)
        );
        let mut source_predicts_abort = false;
        let mut receiver_bits: Vec<Vec<Vec<u8>>> = vec![vec![Vec::new(); m]; m];
        let mut receiver_aborted: Vec<bool> = vec![false; m];
        for entry in 0..m {
            let bits = encode_difference(vector[entry], cfg.bit_width)?;
            for (bit_idx, &bit) in bits.iter().enumerate() {
                let tags = [rotation_idx as u64, entry as u64, bit_idx as u64];
                let list_seed = derive_seed(seed, &[0xA110C8, tags[0], tags[1], tags[2]]);
                let set: CorrelatedListSet = match cfg.backend {
                    ListBackend::Dealer => {
                        let mut rng: ProtocolRng = ProtocolRng::seed_from_u64(list_seed);
                        dealer_generate(m, cfg.list_length, &mut rng)
                    }
                    ListBackend::Quantum { eta } => {
                        let mut rng: ProtocolRng = ProtocolRng::seed_from_u64(list_seed);
                        generate_list_set(m, cfg.list_length, eta, budget, &mut rng)?.set
                    }
                };
                if qb_honest_source {
                    let count = set.source_list().iter().filter(|&&s| s == bit).count() as f64;
                    let expected = crate::lists::expected_value_count(m, cfg.list_length);
                    let theta = cfg
                        .theta
                        .unwrap_or_else(|| crate::lists::default_theta(m, cfg.list_length));
                    if (count - expected).abs() > theta {
                        source_predicts_abort = true;
                    }
                }
                let qb_seed = derive_seed(seed, &[0xB0B, tags[0], tags[1], tags[2]]);
                let outcome = run_qb(
                    source, bit, plan, &set, &qb_cfg, qb_seed, qb_trial, transcript,
                )?;
                qb_trial += 1;
                for (&p, verdict) in &outcome.verdicts {
                    match verdict.decision {
                        Decision::Value(v) => receiver_bits[p][entry].push(v),
                        Decision::Abort => receiver_aborted[p] = true,
                    }
                }
            }
        }

        // Receivers decode; the source trusts its own broadcast unless it
        // predicted the abort.
        for p in 0..m {
            if p == source {
                if !(qb_honest_source && source_predicts_abort) {
                    views[p].vectors.insert(source, vector.clone());
                }
            } else if !receiver_aborted[p] {
                let decoded: Vec<i64> = (0..m)
                    .map(|entry| decode_difference(&receiver_bits[p][entry]))
                    .collect();
                views[p].vectors.insert(source, decoded);
            }
        }
        let aborted_for_honest = honest
            .iter()
            .filter(|&&p| p != source)
            .any(|&p| receiver_aborted[p]);
        let first_honest_vector = honest
            .iter()
            .find(|&&p| views[p].vectors.contains_key(&source))
            .map(|&p| views[p].vectors[&source].clone());
        per_rotation.push(RotationReport {
            source,
            aborted: aborted_for_honest,
            vector: (!aborted_for_honest)
                .then_some(first_honest_vector)
                .flatten(),
        });
    }

    // Adjustment phase.
    let tolerance = cfg.triangle_tolerance_ticks;
    let mut adjustments = vec![0i64; m];
    let mut failed = false;
    for p in 0..m {
        match views[p].adjustment(p, tolerance) {
            Some(adj) => adjustments[p] = adj,
            None => {
                if honest.contains(&p) {
                    failed = true;
                }
            }
        }
    }

    let rejected_sources: Vec<ProcessId> = honest
        .first()
        .map(|&p| views[p].rejected(tolerance).into_iter().collect())
        .unwrap_or_default();

    if failed {
        // The round failed: clocks stay unchanged.
        let report = SyncReport {
            per_rotation,
            adjustments: vec![0; m],
            c1: check_c1_c2(clocks, clocks, &honest).c1,
            c2: true,
            aborted: true,
            rejected_sources,
        };
        return Ok((clocks.to_vec(), report));
    }

    let after: Vec<ClockState> = clocks
        .iter()
        .enumerate()
        .map(|(p, c)| ClockState::new(c.offset_ticks + adjustments[p]))
        .collect();
    let c1c2 = check_c1_c2(clocks, &after, &honest);
    let report = SyncReport {
        per_rotation,
        adjustments,
        c1: c1c2.c1,
        c2: c1c2.c2,
        aborted: false,
        rejected_sources,
    };
    Ok((after, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng;

    fn sync_cfg(m: usize, bits: usize, length: usize) -> SyncConfig {
        SyncConfig {
            bit_width: bits,
            list_length: length,
            ..SyncConfig::for_processes(m)
        }
    }

    fn transcript() -> Transcript {
        Transcript::new(0, json!({"run": "clocksync-test"}))
    }

    #[test]
    fn difference_reads_are_exact_and_antisymmetric() {
        let clocks = [ClockState::new(10), ClockState::new(3)];
        assert_eq!(read_difference(0, 0, &clocks), 0);
        assert_eq!(read_difference(0, 1, &clocks), 7);
        assert_eq!(read_difference(1, 0, &clocks), -7);
    }

    #[test]
    fn encoding_matches_twos_complement() {
        assert_eq!(encode_difference(0, 4).unwrap(), vec![0, 0, 0, 0]);
        assert_eq!(encode_difference(-1, 4).unwrap(), vec![1, 1, 1, 1]);
        assert_eq!(encode_difference(5, 4).unwrap(), vec![0, 1, 0, 1]);
        assert_eq!(encode_difference(-8, 4).unwrap(), vec![1, 0, 0, 0]);
        assert!(matches!(
            encode_difference(8, 4),
            Err(ClockError::Range {
                delta: 8,
                bit_width: 4
            })
        ));
    }

    #[test]
    fn round_trip_is_identity_over_the_full_range() {
        for delta in -32i64..32 {
            let bits = encode_difference(delta, 6).unwrap();
            assert_eq!(decode_difference(&bits), delta, "delta {delta}");
        }
    }

    #[test]
    fn honest_sync_equalizes_to_the_lower_median() {
        let clocks = [ClockState::new(5), ClockState::new(1), ClockState::new(0)];
        let plan = FaultPlan::all_honest(3);
        let cfg = sync_cfg(3, 5, 48);
        let mut t = transcript();
        let (after, report) = run_sync(&clocks, &plan, &cfg, 11, &mut t).unwrap();
        assert!(!report.aborted);
        for c in &after {
            assert_eq!(c.offset_ticks, 1, "all clocks land on lower-median(5,1,0)");
        }
        assert!(report.c1 && report.c2);
    }

    #[test]
    fn equal_offsets_are_a_fixed_point() {
        let clocks = [ClockState::new(4); 3];
        let plan = FaultPlan::all_honest(3);
        let cfg = sync_cfg(3, 5, 48);
        let mut t = transcript();
        let (after, report) = run_sync(&clocks, &plan, &cfg, 5, &mut t).unwrap();
        assert_eq!(after.to_vec(), clocks.to_vec());
        assert!(report.adjustments.iter().all(|&a| a == 0));
        assert!(report.c1 && report.c2);
    }

    #[test]
    fn inconsistent_liar_is_rejected_and_c1_survives() {
        let clocks = [
            ClockState::new(0),
            ClockState::new(10),
            ClockState::new(20),
            ClockState::new(6),
        ];
        let lies = BTreeMap::from([(0usize, 9i64), (1, -7), (2, 13)]);
        let plan = FaultPlan::all_honest(4).with(3, Strategy::LieClockDifferences(lies));
        let cfg = sync_cfg(4, 7, 64);
        let mut t = transcript();
        let (after, report) = run_sync(&clocks, &plan, &cfg, 17, &mut t).unwrap();
        assert!(!report.aborted);
        assert_eq!(report.rejected_sources, vec![3]);
        let honest: Vec<i64> = [0usize, 1, 2]
            .iter()
            .map(|&p| after[p].offset_ticks)
            .collect();
        assert!(
            honest.windows(2).all(|w| w[0] == w[1]),
            "honest clocks: {honest:?}"
        );
        assert!(report.c1 && report.c2);
    }

    #[test]
    fn uniform_shift_liar_is_rejected_by_antisymmetry() {
        // The liar claims its own clock sits 9 ticks away from where honest
        // processes read it; their direct readings expose the shift.
        let clocks = [
            ClockState::new(2),
            ClockState::new(12),
            ClockState::new(7),
            ClockState::new(4),
        ];
        let lies: BTreeMap<usize, i64> = (0..4).map(|k| (k, 9i64)).collect();
        let plan = FaultPlan::all_honest(4).with(1, Strategy::LieClockDifferences(lies));
        let cfg = sync_cfg(4, 7, 64);
        let mut t = transcript();
        let (after, report) = run_sync(&clocks, &plan, &cfg, 19, &mut t).unwrap();
        assert!(report.rejected_sources.contains(&1));
        let honest: Vec<i64> = [0usize, 2, 3]
            .iter()
            .map(|&p| after[p].offset_ticks)
            .collect();
        assert!(honest.windows(2).all(|w| w[0] == w[1]));
        assert!(report.c1);
    }

    #[test]
    fn c1_c2_flag_honest_only() {
        let before = [ClockState::new(0), ClockState::new(10), ClockState::new(99)];
        let after = [ClockState::new(5), ClockState::new(5), ClockState::new(77)];
        let honest = BTreeSet::from([0usize, 1]);
        let rep = check_c1_c2(&before, &after, &honest);
        assert!(rep.c1, "faulty process 2 must not affect C1");
        assert!(rep.c2, "adjustments of 5 within max pairwise 10");

        let after_bad = [ClockState::new(11), ClockState::new(11), ClockState::new(0)];
        let rep = check_c1_c2(&before, &after_bad, &honest);
        assert!(rep.c1);
        assert!(!rep.c2, "an 11-tick move exceeds the 10-tick honest spread");
    }

    #[test]
    fn config_validation_rejects_bad_inputs() {
        let mut cfg = SyncConfig::for_processes(3);
        cfg.bit_width = 1;
        assert!(cfg.validate(3).is_err());

        let mut cfg = SyncConfig::for_processes(3);
        cfg.rotation_order = vec![0, 0, 1];
        assert!(cfg.validate(3).is_err());

        let mut cfg = SyncConfig::for_processes(3);
        cfg.rotation_order = vec![0, 1];
        assert!(cfg.validate(3).is_err());

        let mut cfg = SyncConfig::for_processes(3);
        cfg.backend = ListBackend::Quantum { eta: 1.5 };
        assert!(cfg.validate(3).is_err());

        let cfg = SyncConfig::for_processes(3);
        assert!(cfg.validate(3).is_ok());
    }

    #[test]
    fn out_of_range_offsets_error_up_front() {
        let clocks = [ClockState::new(0), ClockState::new(100)];
        let plan = FaultPlan::all_honest(2);
        let cfg = sync_cfg(2, 4, 16);
        let mut t = transcript();
        assert!(matches!(
            run_sync(&clocks, &plan, &cfg, 1, &mut t),
            Err(ClockError::Range { .. })
        ));
    }

    #[test]
    fn quantum_backend_produces_the_same_outcome_as_dealer_for_honest_runs() {
        let clocks = [ClockState::new(3), ClockState::new(-2), ClockState::new(1)];
        let plan = FaultPlan::all_honest(3);
        let mut dealer_cfg = sync_cfg(3, 4, 32);
        dealer_cfg.backend = ListBackend::Dealer;
        let mut quantum_cfg = sync_cfg(3, 4, 32);
        quantum_cfg.backend = ListBackend::Quantum { eta: 1.0 };
        let mut t1 = transcript();
        let mut t2 = transcript();
        let (after_d, rep_d) = run_sync(&clocks, &plan, &dealer_cfg, 23, &mut t1).unwrap();
        let (after_q, rep_q) = run_sync(&clocks, &plan, &quantum_cfg, 23, &mut t2).unwrap();
        assert_eq!(after_d, after_q);
        assert_eq!(rep_d.adjustments, rep_q.adjustments);
        assert!(rep_d.c1 && rep_q.c1);
    }

    #[test]
    fn random_honest_offsets_always_reach_c1_and_c2() {
        let mut rng = rng_from_seed(29);
        let cfg = sync_cfg(3, 6, 48);
        for trial in 0..25 {
            let clocks: Vec<ClockState> = (0..3)
                .map(|_| ClockState::new(rng.random_range(-15..16)))
                .collect();
            let plan = FaultPlan::all_honest(3);
            let mut t = transcript();
            let (_, report) = run_sync(&clocks, &plan, &cfg, 1000 + trial, &mut t).unwrap();
            assert!(report.c1 && report.c2, "trial {trial}: {report:?}");
        }
    }
}
