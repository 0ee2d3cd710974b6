//! Detectable broadcast over correlated lists: source broadcast, relay with
//! consistency checking, and the verdict function.
//!
//! One run moves a single bit from a source to every other process in one
//! round of relaying. Each receiver checks every claim it sees against its
//! private list and partitions the senders into consistent, inconsistent and
//! BOT sets; the verdict rules guarantee that all honest processes either
//! adopt one value or all abort, for any number of faulty processes, with
//! failure probability exponentially small in the list length.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::harness::{
    apply_strategy, FaultPlan, Network, OutboundMessage, ProcessId, RelayPayload, StrategyContext,
    Transcript,
};
use crate::lists::{
    check_claim, default_theta, expected_value_count, positions_of, Claim, CorrelatedListSet,
    Provenance,
};
use crate::rng::{derive_seed, ProtocolRng};
use rand_chacha::rand_core::SeedableRng;

#[derive(Debug, Error)]
pub enum DbaError {
    #[error("fault plan covers {plan} processes but the list set has {lists}")]
    PlanListMismatch { plan: usize, lists: usize },
    #[error("source id {id} out of range for {m} processes")]
    SourceOutOfRange { id: ProcessId, m: usize },
    #[error("broadcast value {0} is not a bit")]
    NotABit(u8),
}

/// Check parameters shared by every process in a run.
#[derive(Debug, Clone, Default, Serialize)]
pub struct QbConfig {
    /// Claim-length tolerance; `None` picks the 3-sigma default for (m, L).
    pub theta: Option<f64>,
}

/// What a receiver concluded from the source's direct message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OwnResult {
    Consistent(Claim),
    Bot,
}

/// A relayed message as seen by a receiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelayMessage {
    pub sender: ProcessId,
    pub payload: RelayPayload,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Value(u8),
    Abort,
}

/// Which branch of the verdict analysis fired.
///
/// The first five mirror the protocol's decision table; the last three cover
/// situations the table leaves open (a receiver whose own check failed, a
/// consistent remainder with unequal values, and no consistent data at all).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictCase {
    /// Everything consistent, all values equal: no faulty process visible.
    Unanimous,
    /// Everything consistent but values differ: the source is faulty.
    ConflictingConsistent,
    /// Some senders inconsistent, the consistent remainder agrees.
    InconsistentMinority,
    /// Some senders reported BOT, the consistent remainder agrees.
    BotWithAgreement,
    /// BOT reports plus disagreeing consistent values: at least the source is
    /// faulty.
    BotWithConflict,
    /// The receiver's own source check failed (it relayed BOT itself).
    OwnCheckFailed,
    /// Consistent senders disagree while others are provably inconsistent.
    MixedConflict,
    /// No consistent claim survives to adopt a value from.
    NoConsistentData,
}

impl VerdictCase {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictCase::Unanimous => "unanimous",
            VerdictCase::ConflictingConsistent => "conflicting-consistent",
            VerdictCase::InconsistentMinority => "inconsistent-minority",
            VerdictCase::BotWithAgreement => "bot-with-agreement",
            VerdictCase::BotWithConflict => "bot-with-conflict",
            VerdictCase::OwnCheckFailed => "own-check-failed",
            VerdictCase::MixedConflict => "mixed-conflict",
            VerdictCase::NoConsistentData => "no-consistent-data",
        }
    }
}

/// A process's final decision plus the processes it can accuse.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub decision: Decision,
    pub suspected: BTreeSet<ProcessId>,
    pub case: VerdictCase,
    /// True for the dealer-mode measuring role, whose verdict the others
    /// treat as advisory.
    pub advisory: bool,
}

/// Everything needed to evaluate claims at one receiver.
#[derive(Debug, Clone)]
pub struct CheckParams {
    pub m: usize,
    pub theta: f64,
    pub source: ProcessId,
    /// Dealer-mode measuring role whose messages are excluded from the
    /// consistency partition (value-only announcements).
    pub exempt: Option<ProcessId>,
}

/// Honest source broadcast: the identical claim (value plus all supporting
/// positions of its list) for every recipient.
pub fn source_broadcast(
    source_list: &[u8],
    value: u8,
    recipients: &[ProcessId],
) -> BTreeMap<ProcessId, Claim> {
    let claim = Claim::new(value, positions_of(source_list, value));
    recipients.iter().map(|&r| (r, claim.clone())).collect()
}

/// Honest relay: forward the source's claim verbatim when it checked out,
/// otherwise report BOT.
pub fn relay(own_claim: &Claim, own_list: &[u8], params: &CheckParams) -> RelayPayload {
    if check_claim(own_claim, own_list, params.m, params.theta).is_consistent() {
        RelayPayload::Claim(own_claim.clone())
    } else {
        RelayPayload::Bot
    }
}

/// The verdict function: partitions everything the receiver saw and applies
/// the decision rules.
pub fn decide(
    own_result: &OwnResult,
    inbox: &BTreeMap<ProcessId, RelayMessage>,
    own_list: &[u8],
    params: &CheckParams,
) -> Verdict {
    let mut consistent_values: Vec<u8> = Vec::new();
    let mut inconsistent: BTreeSet<ProcessId> = BTreeSet::new();
    let mut bots: BTreeSet<ProcessId> = BTreeSet::new();

    if let OwnResult::Consistent(claim) = own_result {
        consistent_values.push(claim.value);
    }
    for (&sender, msg) in inbox {
        if params.exempt == Some(sender) {
            // Value-only announcements carry no checkable evidence.
            continue;
        }
        match &msg.payload {
            RelayPayload::Claim(claim) => {
                if check_claim(claim, own_list, params.m, params.theta).is_consistent() {
                    consistent_values.push(claim.value);
                } else {
                    inconsistent.insert(sender);
                }
            }
            RelayPayload::Announcement(_) => {
                // Announcements from a non-exempt sender are off-protocol.
                inconsistent.insert(sender);
            }
            RelayPayload::Bot => {
                bots.insert(sender);
            }
        }
    }

    let all_equal = consistent_values.windows(2).all(|w| w[0] == w[1]);
    let agreed = consistent_values.first().copied();

    match own_result {
        OwnResult::Consistent(_) => {
            // The receiver's own claim always participates, so the
            // consistent set is nonempty here.
            if all_equal {
                let value = agreed.expect("own claim present");
                if !inconsistent.is_empty() {
                    Verdict {
                        decision: Decision::Value(value),
                        suspected: inconsistent,
                        case: VerdictCase::InconsistentMinority,
                        advisory: false,
                    }
                } else if !bots.is_empty() {
                    Verdict {
                        decision: Decision::Value(value),
                        suspected: BTreeSet::new(),
                        case: VerdictCase::BotWithAgreement,
                        advisory: false,
                    }
                } else {
                    Verdict {
                        decision: Decision::Value(value),
                        suspected: BTreeSet::new(),
                        case: VerdictCase::Unanimous,
                        advisory: false,
                    }
                }
            } else if !inconsistent.is_empty() {
                let mut suspected = inconsistent;
                suspected.insert(params.source);
                Verdict {
                    decision: Decision::Abort,
                    suspected,
                    case: VerdictCase::MixedConflict,
                    advisory: false,
                }
            } else if !bots.is_empty() {
                Verdict {
                    decision: Decision::Abort,
                    suspected: BTreeSet::from([params.source]),
                    case: VerdictCase::BotWithConflict,
                    advisory: false,
                }
            } else {
                Verdict {
                    decision: Decision::Abort,
                    suspected: BTreeSet::from([params.source]),
                    case: VerdictCase::ConflictingConsistent,
                    advisory: false,
                }
            }
        }
        OwnResult::Bot => {
            // First-hand evidence against the source. Adopt a value only if
            // every non-BOT relay is consistent and they all agree.
            let mut suspected = BTreeSet::from([params.source]);
            if !inconsistent.is_empty() {
                suspected.extend(inconsistent);
                Verdict {
                    decision: Decision::Abort,
                    suspected,
                    case: VerdictCase::OwnCheckFailed,
                    advisory: false,
                }
            } else if consistent_values.is_empty() {
                Verdict {
                    decision: Decision::Abort,
                    suspected,
                    case: VerdictCase::NoConsistentData,
                    advisory: false,
                }
            } else if all_equal {
                Verdict {
                    decision: Decision::Value(agreed.expect("nonempty")),
                    suspected,
                    case: VerdictCase::OwnCheckFailed,
                    advisory: false,
                }
            } else {
                Verdict {
                    decision: Decision::Abort,
                    suspected,
                    case: VerdictCase::OwnCheckFailed,
                    advisory: false,
                }
            }
        }
    }
}

/// Outcome of one broadcast run.
#[derive(Debug, Clone)]
pub struct QbOutcome {
    pub source: ProcessId,
    pub source_value: u8,
    /// Verdicts of every non-source process.
    pub verdicts: BTreeMap<ProcessId, Verdict>,
    pub message_count: usize,
}

impl QbOutcome {
    /// Decisions of the honest non-source processes. Advisory verdicts (the
    /// dealer-mode measuring role) are excluded: that process cannot be
    /// cross-checked by the others and its decision is not binding.
    pub fn honest_decisions(&self, plan: &FaultPlan) -> Vec<Decision> {
        self.verdicts
            .iter()
            .filter(|(p, v)| plan.strategy(**p).is_honest() && !v.advisory)
            .map(|(_, v)| v.decision)
            .collect()
    }

    /// All honest processes hold the same value, or all abort.
    pub fn agreement_holds(&self, plan: &FaultPlan) -> bool {
        let decisions = self.honest_decisions(plan);
        decisions.windows(2).all(|w| w[0] == w[1])
    }

    /// With an honest source every honest process adopts the source value.
    pub fn validity_holds(&self, plan: &FaultPlan) -> bool {
        if !plan.strategy(self.source).is_honest() {
            return true;
        }
        self.honest_decisions(plan)
            .iter()
            .all(|d| *d == Decision::Value(self.source_value))
    }
}

/// Maps a process id to its list role for a run with the given source:
/// the source holds role 0, everyone else keeps id order.
pub fn role_of(process: ProcessId, source: ProcessId) -> usize {
    match process.cmp(&source) {
        std::cmp::Ordering::Less => process + 1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => process,
    }
}

/// Executes one full broadcast run over the simulated network.
///
/// Exactly (m-1)^2 protocol messages are delivered: m-1 broadcast slots plus
/// (m-1)(m-2) relay slots, independent of faults. In dealer mode the process
/// holding the measuring role (role m-1) sends a value-only announcement
/// instead of its claim, and its verdict is flagged advisory.
#[allow(clippy::too_many_arguments)]
pub fn run_qb(
    source: ProcessId,
    source_value: u8,
    plan: &FaultPlan,
    list_set: &CorrelatedListSet,
    cfg: &QbConfig,
    seed: u64,
    trial: u64,
    transcript: &mut Transcript,
) -> Result<QbOutcome, DbaError> {
    let m = list_set.m();
    if plan.len() != m {
        return Err(DbaError::PlanListMismatch {
            plan: plan.len(),
            lists: m,
        });
    }
    if source >= m {
        return Err(DbaError::SourceOutOfRange { id: source, m });
    }
    if source_value > 1 {
        return Err(DbaError::NotABit(source_value));
    }

    let length = list_set.len();
    let theta = cfg.theta.unwrap_or_else(|| default_theta(m, length));
    let forge_target = expected_value_count(m, length).round() as usize;
    let exempt = (list_set.provenance() == Provenance::Dealer).then(|| {
        // Process holding role m-1.
        (0..m)
            .find(|&p| role_of(p, source) == m - 1)
            .expect("role exists")
    });
    let params = CheckParams {
        m,
        theta,
        source,
        exempt,
    };

    let others: Vec<ProcessId> = (0..m).filter(|&p| p != source).collect();
    let rng_for = |p: ProcessId| -> ProtocolRng {
        ProtocolRng::seed_from_u64(derive_seed(seed, &[trial, p as u64]))
    };
    let mut net = Network::open(m, trial, transcript);

    // Round 0: source broadcast.
    let source_list = list_set.list_for_role(0);
    let honest_claims = source_broadcast(source_list, source_value, &others);
    let intended: Vec<OutboundMessage> = others
        .iter()
        .map(|&to| OutboundMessage::new(to, RelayPayload::Claim(honest_claims[&to].clone())))
        .collect();
    let ctx = StrategyContext {
        round: 0,
        is_source: true,
        own_list: source_list,
        m,
        forge_target,
        received_value: Some(source_value),
    };
    let actual = apply_strategy(plan.strategy(source), &intended, &ctx, &mut rng_for(source));
    let slots0: Vec<(ProcessId, ProcessId)> = others.iter().map(|&to| (source, to)).collect();
    let outbound0 = BTreeMap::from([(source, actual)]);
    let delivered0 = net.deliver_round(0, "broadcast", &outbound0, &slots0);

    // Each receiver analyzes the source message on its own.
    let mut own_results: BTreeMap<ProcessId, OwnResult> = BTreeMap::new();
    let mut received_values: BTreeMap<ProcessId, Option<u8>> = BTreeMap::new();
    for &p in &others {
        let own_list = list_set.list_for_role(role_of(p, source));
        let payload = &delivered0[&(source, p)];
        let (own, seen) = match payload {
            RelayPayload::Claim(claim) => {
                let res = if check_claim(claim, own_list, m, theta).is_consistent() {
                    OwnResult::Consistent(claim.clone())
                } else {
                    OwnResult::Bot
                };
                (res, Some(claim.value))
            }
            // Garbage or silence from the source is inconsistent data.
            RelayPayload::Announcement(v) => (OwnResult::Bot, Some(*v)),
            RelayPayload::Bot => (OwnResult::Bot, None),
        };
        own_results.insert(p, own);
        received_values.insert(p, seen);
    }

    // Round 1: every non-source process relays to the other non-source
    // processes.
    let mut outbound1: BTreeMap<ProcessId, Vec<OutboundMessage>> = BTreeMap::new();
    let mut slots1: Vec<(ProcessId, ProcessId)> = Vec::new();
    for &p in &others {
        let own_list = list_set.list_for_role(role_of(p, source));
        let recipients: Vec<ProcessId> = others.iter().copied().filter(|&q| q != p).collect();
        let honest_payload = if exempt == Some(p) {
            match received_values[&p] {
                Some(v) => RelayPayload::Announcement(v),
                None => RelayPayload::Bot,
            }
        } else {
            match &own_results[&p] {
                OwnResult::Consistent(claim) => relay(claim, own_list, &params),
                OwnResult::Bot => RelayPayload::Bot,
            }
        };
        let intended: Vec<OutboundMessage> = recipients
            .iter()
            .map(|&to| OutboundMessage::new(to, honest_payload.clone()))
            .collect();
        let ctx = StrategyContext {
            round: 1,
            is_source: false,
            own_list,
            m,
            forge_target,
            received_value: received_values[&p],
        };
        let actual = apply_strategy(plan.strategy(p), &intended, &ctx, &mut rng_for(p));
        slots1.extend(recipients.iter().map(|&to| (p, to)));
        outbound1.insert(p, actual);
    }
    let delivered1 = net.deliver_round(1, "relay", &outbound1, &slots1);
    let message_count = net.delivered();

    // Round 2: local verdicts.
    let mut verdicts = BTreeMap::new();
    for &p in &others {
        let own_list = list_set.list_for_role(role_of(p, source));
        let inbox: BTreeMap<ProcessId, RelayMessage> = others
            .iter()
            .copied()
            .filter(|&q| q != p)
            .map(|q| {
                (
                    q,
                    RelayMessage {
                        sender: q,
                        payload: delivered1[&(q, p)].clone(),
                    },
                )
            })
            .collect();
        let mut verdict = decide(&own_results[&p], &inbox, own_list, &params);
        if exempt == Some(p) {
            verdict.advisory = true;
        }
        net_push_verdict(transcript, trial, p, &verdict);
        verdicts.insert(p, verdict);
    }
    debug_assert_eq!(message_count, (m - 1) * (m - 1));

    Ok(QbOutcome {
        source,
        source_value,
        verdicts,
        message_count,
    })
}

fn net_push_verdict(transcript: &mut Transcript, trial: u64, p: ProcessId, verdict: &Verdict) {
    let decision = match verdict.decision {
        Decision::Value(v) => json!({"value": v}),
        Decision::Abort => json!("abort"),
    };
    transcript.push(
        trial,
        2,
        p,
        p,
        "verdict",
        json!({
            "decision": decision,
            "suspected": verdict.suspected,
            "advisory": verdict.advisory,
        }),
        Some(verdict.case.as_str().to_string()),
    );
}

/// Convenience wrapper: a fresh throwaway transcript, source = process 0.
pub fn run_qb_simple(
    source_value: u8,
    plan: &FaultPlan,
    list_set: &CorrelatedListSet,
    cfg: &QbConfig,
    seed: u64,
) -> Result<QbOutcome, DbaError> {
    let mut transcript = Transcript::new(seed, json!({"run": "qb"}));
    run_qb(
        0,
        source_value,
        plan,
        list_set,
        cfg,
        seed,
        0,
        &mut transcript,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::Strategy;
    use crate::lists::dealer_generate;
    use crate::rng::rng_from_seed;

    fn quantum_like_set(m: usize, length: usize, seed: u64) -> CorrelatedListSet {
        // Dealer law equals the quantum law; rebuild with quantum provenance
        // so no role is exempt in these unit tests.
        let mut rng = rng_from_seed(seed);
        let set = dealer_generate(m, length, &mut rng);
        CorrelatedListSet::new(
            m,
            set.source_list().to_vec(),
            (0..m - 1).map(|r| set.relay_list(r).to_vec()).collect(),
            Provenance::Quantum,
        )
        .unwrap()
    }

    #[test]
    fn honest_broadcast_sends_identical_claims() {
        let claims = source_broadcast(&[0, 2, 1, 0], 0, &[1, 2]);
        assert_eq!(claims[&1], Claim::new(0, vec![0, 3]));
        assert_eq!(claims[&1], claims[&2]);

        // Degenerate: no supporting positions -> empty claim (length check
        // will judge it downstream).
        let claims = source_broadcast(&[0, 2, 0, 0], 1, &[1]);
        assert_eq!(claims[&1], Claim::new(1, vec![]));
    }

    #[test]
    fn relay_forwards_consistent_and_bots_inconsistent() {
        let set = quantum_like_set(3, 90, 1);
        let params = CheckParams {
            m: 3,
            theta: default_theta(3, 90),
            source: 0,
            exempt: None,
        };
        let claim = Claim::new(0, positions_of(set.source_list(), 0));
        assert_eq!(
            relay(&claim, set.list_for_role(1), &params),
            RelayPayload::Claim(claim.clone())
        );

        // A claim with an out-of-range position is malformed, hence BOT.
        let bad = Claim::new(0, vec![5_000]);
        assert_eq!(
            relay(&bad, set.list_for_role(1), &params),
            RelayPayload::Bot
        );
    }

    #[test]
    fn all_honest_run_is_unanimous_with_exact_message_count() {
        for m in [3usize, 4, 5] {
            let set = quantum_like_set(m, 256, m as u64);
            let plan = FaultPlan::all_honest(m);
            let out = run_qb_simple(1, &plan, &set, &QbConfig::default(), 7).unwrap();
            assert_eq!(out.message_count, (m - 1) * (m - 1));
            for v in out.verdicts.values() {
                assert_eq!(v.decision, Decision::Value(1));
                assert_eq!(v.case, VerdictCase::Unanimous);
                assert!(v.suspected.is_empty());
            }
        }
    }

    #[test]
    fn split_source_with_valid_lists_makes_everyone_abort() {
        let set = quantum_like_set(3, 120, 3);
        let plan = FaultPlan::all_honest(3).with(
            0,
            Strategy::SplitBroadcast(BTreeMap::from([(1, 0u8), (2, 1u8)])),
        );
        let out = run_qb_simple(0, &plan, &set, &QbConfig::default(), 9).unwrap();
        for v in out.verdicts.values() {
            assert_eq!(v.decision, Decision::Abort);
            assert_eq!(v.case, VerdictCase::ConflictingConsistent);
            assert_eq!(v.suspected, BTreeSet::from([0]));
        }
        assert!(out.agreement_holds(&plan));
    }

    #[test]
    fn forged_flip_is_detected_and_outvoted() {
        let set = quantum_like_set(4, 200, 5);
        let plan = FaultPlan::all_honest(4).with(2, Strategy::FlipRelayForgedList);
        let out = run_qb_simple(0, &plan, &set, &QbConfig::default(), 11).unwrap();
        for (&p, v) in &out.verdicts {
            if p == 2 {
                continue;
            }
            assert_eq!(v.decision, Decision::Value(0));
            assert_eq!(v.case, VerdictCase::InconsistentMinority);
            assert_eq!(v.suspected, BTreeSet::from([2]));
        }
        assert!(out.validity_holds(&plan));
    }

    #[test]
    fn bot_relay_keeps_the_value_flowing() {
        let set = quantum_like_set(4, 200, 6);
        let plan = FaultPlan::all_honest(4).with(3, Strategy::BotAlways);
        let out = run_qb_simple(1, &plan, &set, &QbConfig::default(), 13).unwrap();
        for (&p, v) in &out.verdicts {
            if p == 3 {
                continue;
            }
            assert_eq!(v.decision, Decision::Value(1));
            assert_eq!(v.case, VerdictCase::BotWithAgreement);
        }
    }

    #[test]
    fn crashed_source_sends_everyone_to_no_consistent_data() {
        let set = quantum_like_set(3, 90, 7);
        let plan = FaultPlan::all_honest(3).with(0, Strategy::Crash { round: 0 });
        let out = run_qb_simple(0, &plan, &set, &QbConfig::default(), 17).unwrap();
        for v in out.verdicts.values() {
            assert_eq!(v.decision, Decision::Abort);
            assert_eq!(v.case, VerdictCase::NoConsistentData);
        }
        // Crash still consumes its message slots.
        assert_eq!(out.message_count, 4);
    }

    #[test]
    fn split_plus_bot_reaches_bot_with_conflict() {
        // Source splits valid claims between p1/p2 and garbage to p3; the BOT
        // from p3 plus the disagreeing consistent claims force an abort.
        let set = quantum_like_set(4, 200, 8);
        let script = vec![
            crate::harness::ScriptedMessage {
                round: 0,
                message: OutboundMessage::new(
                    1,
                    RelayPayload::Claim(Claim::new(0, positions_of(set.source_list(), 0))),
                ),
            },
            crate::harness::ScriptedMessage {
                round: 0,
                message: OutboundMessage::new(
                    2,
                    RelayPayload::Claim(Claim::new(1, positions_of(set.source_list(), 1))),
                ),
            },
            // Nothing for p3: its slot normalizes to BOT.
        ];
        let plan = FaultPlan::all_honest(4).with(0, Strategy::Arbitrary(script));
        let out = run_qb_simple(0, &plan, &set, &QbConfig::default(), 19).unwrap();
        assert_eq!(out.verdicts[&1].case, VerdictCase::BotWithConflict);
        assert_eq!(out.verdicts[&1].decision, Decision::Abort);
        assert_eq!(out.verdicts[&2].case, VerdictCase::BotWithConflict);
        // p3 went down the own-check-failed path and saw conflicting claims.
        assert_eq!(out.verdicts[&3].decision, Decision::Abort);
        assert!(out.agreement_holds(&plan));
    }

    #[test]
    fn rotated_source_maps_roles_consistently() {
        let set = quantum_like_set(3, 120, 9);
        let plan = FaultPlan::all_honest(3);
        let mut transcript = Transcript::new(23, json!({"run": "qb"}));
        let out = run_qb(
            2,
            1,
            &plan,
            &set,
            &QbConfig::default(),
            23,
            0,
            &mut transcript,
        )
        .unwrap();
        assert_eq!(out.verdicts.len(), 2);
        assert!(out.verdicts.contains_key(&0) && out.verdicts.contains_key(&1));
        for v in out.verdicts.values() {
            assert_eq!(v.decision, Decision::Value(1));
        }
    }

    #[test]
    fn dealer_mode_exempts_the_measuring_role() {
        let mut rng = rng_from_seed(31);
        let set = dealer_generate(4, 200, &mut rng);
        let plan = FaultPlan::all_honest(4);
        let out = run_qb_simple(1, &plan, &set, &QbConfig::default(), 37).unwrap();
        // Role 3 belongs to process 3 when the source is 0.
        assert!(out.verdicts[&3].advisory);
        // Announcements are excluded from partitions, so the others still see
        // unanimity (one fewer checkable relay).
        for (&p, v) in &out.verdicts {
            assert_eq!(v.decision, Decision::Value(1), "process {p}");
        }
        assert!(!out.verdicts[&1].advisory);
    }

    #[test]
    fn run_rejects_mismatched_inputs() {
        let set = quantum_like_set(3, 30, 10);
        let plan = FaultPlan::all_honest(4);
        assert!(matches!(
            run_qb_simple(0, &plan, &set, &QbConfig::default(), 1),
            Err(DbaError::PlanListMismatch { .. })
        ));
        let plan = FaultPlan::all_honest(3);
        let mut t = Transcript::new(0, json!({}));
        assert!(matches!(
            run_qb(5, 0, &plan, &set, &QbConfig::default(), 0, 0, &mut t),
            Err(DbaError::SourceOutOfRange { .. })
        ));
        assert!(matches!(
            run_qb_simple(2, &plan, &set, &QbConfig::default(), 1),
            Err(DbaError::NotABit(2))
        ));
    }
}
