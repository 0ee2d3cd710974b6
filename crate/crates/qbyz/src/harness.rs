//! Synchronous simulated network: pairwise authenticated channels, fault
//! strategy injection, deterministic scheduling and JSON-Lines transcripts.
//!
//! Delivery is slot-based: each round declares its expected (sender, receiver)
//! slots and every slot delivers exactly one payload. A sender that stays
//! silent (crash) has its slot normalized to a BOT payload at delivery, so the
//! protocol engines never see missing messages and the message budget is
//! independent of the number of faults. Sender identity is stamped by the
//! network; a scripted impersonation attempt is rejected and logged.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::lists::{positions_of, Claim};
use crate::rng::ProtocolRng;

pub type ProcessId = usize;

/// Message body exchanged during a broadcast run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelayPayload {
    /// A value with the positions said to support it.
    Claim(Claim),
    /// Value-only announcement (dealer-mode measuring role, which must not
    /// reveal list positions).
    Announcement(u8),
    /// "I have received inconsistent data", also the normalization of a
    /// missing message.
    Bot,
}

impl RelayPayload {
    /// Compact transcript form; position lists are summarized by length and a
    /// content hash so transcripts stay small but byte-stable.
    pub fn summary(&self) -> serde_json::Value {
        match self {
            RelayPayload::Claim(c) => json!({
                "type": "claim",
                "value": c.value,
                "positions_len": c.positions.len(),
                "positions_fnv": fnv1a(c.positions.iter().flat_map(|p| p.to_le_bytes())),
            }),
            RelayPayload::Announcement(v) => json!({"type": "announcement", "value": v}),
            RelayPayload::Bot => json!({"type": "bot"}),
        }
    }
}

/// One message a strategy wants delivered this round. `claimed_sender` is
/// only populated by scripted adversaries probing the channel authentication.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutboundMessage {
    pub to: ProcessId,
    pub payload: RelayPayload,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub claimed_sender: Option<ProcessId>,
}

impl OutboundMessage {
    pub fn new(to: ProcessId, payload: RelayPayload) -> Self {
        Self {
            to,
            payload,
            claimed_sender: None,
        }
    }
}

/// A scripted message for the `Arbitrary` strategy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedMessage {
    pub round: usize,
    pub message: OutboundMessage,
}

/// Per-process behavior. `Honest` follows the protocol exactly; everything
/// else is an adversary from the strategy library.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Honest,
    /// Stops sending from the given round on.
    Crash {
        round: usize,
    },
    /// Sends per-recipient bit values (as source: with valid position lists;
    /// as relay: with positions forged from its own list).
    SplitBroadcast(BTreeMap<ProcessId, u8>),
    /// Flips the received bit and supports it with positions drawn from its
    /// own list where the flipped value appears.
    FlipRelayForgedList,
    /// Flips the received bit and supports it with uniformly random positions
    /// of plausible length.
    FlipRelayRandomList,
    /// Always sends BOT.
    BotAlways,
    /// Honest at the message layer; corrupts broadcast clock differences by
    /// the given per-recipient-entry amounts (used by the clock layer).
    LieClockDifferences(BTreeMap<ProcessId, i64>),
    /// Fully scripted message map.
    Arbitrary(Vec<ScriptedMessage>),
}

impl Strategy {
    /// Honest in the DBA/OM sense: never deviates from the message protocol.
    /// A clock liar is protocol-honest at this layer but still a fault.
    pub fn is_honest(&self) -> bool {
        matches!(self, Strategy::Honest)
    }
}

/// One strategy per process.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultPlan {
    strategies: Vec<Strategy>,
}

impl FaultPlan {
    pub fn all_honest(m: usize) -> Self {
        Self {
            strategies: vec![Strategy::Honest; m],
        }
    }

    pub fn new(strategies: Vec<Strategy>) -> Self {
        Self { strategies }
    }

    pub fn with(mut self, process: ProcessId, strategy: Strategy) -> Self {
        self.strategies[process] = strategy;
        self
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn strategy(&self, process: ProcessId) -> &Strategy {
        &self.strategies[process]
    }

    /// Processes that behave honestly (strictly: `Strategy::Honest`).
    pub fn honest_set(&self) -> BTreeSet<ProcessId> {
        self.strategies
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.is_honest().then_some(i))
            .collect()
    }

    pub fn faulty_count(&self) -> usize {
        self.len() - self.honest_set().len()
    }
}

/// Inputs a strategy may consult when rewriting its outgoing messages.
pub struct StrategyContext<'a> {
    pub round: usize,
    pub is_source: bool,
    pub own_list: &'a [u8],
    pub m: usize,
    /// Plausible claim length a forger should aim for.
    pub forge_target: usize,
    /// Bit value received from the source this run, if any claim arrived.
    pub received_value: Option<u8>,
}

/// Positions sampled (without replacement, ascending) from where `own_list`
/// holds `value`; at most `target` of them.
pub fn forged_positions(
    own_list: &[u8],
    value: u8,
    target: usize,
    rng: &mut ProtocolRng,
) -> Vec<usize> {
    let pool = positions_of(own_list, value);
    if pool.len() <= target {
        return pool;
    }
    let picked = rand::seq::index::sample(rng, pool.len(), target);
    let mut out: Vec<usize> = picked.iter().map(|i| pool[i]).collect();
    out.sort_unstable();
    out
}

/// `target` distinct uniformly random positions in `[0, len)`, ascending.
pub fn random_positions(len: usize, target: usize, rng: &mut ProtocolRng) -> Vec<usize> {
    let take = target.min(len);
    let mut out: Vec<usize> = rand::seq::index::sample(rng, len, take)
        .into_iter()
        .collect();
    out.sort_unstable();
    out
}

/// Rewrites a process's intended outgoing messages according to its strategy.
/// `Honest` (and the clock liar, at this layer) is the identity.
pub fn apply_strategy(
    strategy: &Strategy,
    intended: &[OutboundMessage],
    ctx: &StrategyContext<'_>,
    rng: &mut ProtocolRng,
) -> Vec<OutboundMessage> {
    match strategy {
        Strategy::Honest | Strategy::LieClockDifferences(_) => intended.to_vec(),
        Strategy::Crash { round } => {
            if ctx.round >= *round {
                Vec::new()
            } else {
                intended.to_vec()
            }
        }
        Strategy::BotAlways => intended
            .iter()
            .map(|msg| OutboundMessage::new(msg.to, RelayPayload::Bot))
            .collect(),
        Strategy::SplitBroadcast(map) => intended
            .iter()
            .map(|msg| {
                let value = map.get(&msg.to).copied().unwrap_or_else(|| {
                    intended_value(&msg.payload).unwrap_or(ctx.received_value.unwrap_or(0))
                });
                let positions = if ctx.is_source {
                    positions_of(ctx.own_list, value)
                } else {
                    forged_positions(ctx.own_list, value, ctx.forge_target, rng)
                };
                OutboundMessage::new(msg.to, RelayPayload::Claim(Claim::new(value, positions)))
            })
            .collect(),
        Strategy::FlipRelayForgedList => {
            let flipped = 1 - ctx.received_value.unwrap_or(0).min(1);
            let positions = forged_positions(ctx.own_list, flipped, ctx.forge_target, rng);
            intended
                .iter()
                .map(|msg| {
                    OutboundMessage::new(
                        msg.to,
                        RelayPayload::Claim(Claim::new(flipped, positions.clone())),
                    )
                })
                .collect()
        }
        Strategy::FlipRelayRandomList => {
            let flipped = 1 - ctx.received_value.unwrap_or(0).min(1);
            let positions = random_positions(ctx.own_list.len(), ctx.forge_target, rng);
            intended
                .iter()
                .map(|msg| {
                    OutboundMessage::new(
                        msg.to,
                        RelayPayload::Claim(Claim::new(flipped, positions.clone())),
                    )
                })
                .collect()
        }
        Strategy::Arbitrary(script) => script
            .iter()
            .filter(|s| s.round == ctx.round)
            .map(|s| s.message.clone())
            .collect(),
    }
}

fn intended_value(payload: &RelayPayload) -> Option<u8> {
    match payload {
        RelayPayload::Claim(c) => Some(c.value),
        RelayPayload::Announcement(v) => Some(*v),
        RelayPayload::Bot => None,
    }
}

/// 64-bit FNV-1a over a byte stream; used for config hashes and payload
/// summaries.
pub fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64;
    for b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

pub const TRANSCRIPT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("transcript version {found} does not match this build ({expected}); refusing replay")]
    VersionMismatch { found: String, expected: String },
    #[error("malformed transcript: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// First line of every transcript file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptHeader {
    pub version: String,
    pub seed: u64,
    pub config_hash: u64,
    pub config: serde_json::Value,
}

/// One logical event; totally ordered per trial by emission order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEvent {
    pub trial: u64,
    pub round: usize,
    pub from: ProcessId,
    pub to: ProcessId,
    pub kind: String,
    pub payload: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
}

/// Append-only event log with a self-describing header. Replaying the header
/// config with the header seed must reproduce the event sequence byte for
/// byte.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub header: TranscriptHeader,
    pub events: Vec<TranscriptEvent>,
}

impl Transcript {
    pub fn new(seed: u64, config: serde_json::Value) -> Self {
        let config_hash = fnv1a(config.to_string().into_bytes());
        Self {
            header: TranscriptHeader {
                version: TRANSCRIPT_VERSION.to_string(),
                seed,
                config_hash,
                config,
            },
            events: Vec::new(),
        }
    }

    #[allow(clippy::too_many_arguments)] // mirrors the event schema
    pub fn push(
        &mut self,
        trial: u64,
        round: usize,
        from: ProcessId,
        to: ProcessId,
        kind: &str,
        payload: serde_json::Value,
        case: Option<String>,
    ) {
        self.events.push(TranscriptEvent {
            trial,
            round,
            from,
            to,
            kind: kind.to_string(),
            payload,
            case,
        });
    }

    /// JSON Lines: header line followed by one event per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = serde_json::to_string(&self.header).expect("header serializes");
        out.push('\n');
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("event serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, TranscriptError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header_line = lines
            .next()
            .ok_or_else(|| TranscriptError::Malformed("empty transcript".into()))?;
        let header: TranscriptHeader = serde_json::from_str(header_line)
            .map_err(|e| TranscriptError::Malformed(format!("bad header: {e}")))?;
        if header.version != TRANSCRIPT_VERSION {
            return Err(TranscriptError::VersionMismatch {
                found: header.version,
                expected: TRANSCRIPT_VERSION.to_string(),
            });
        }
        let mut events = Vec::new();
        for line in lines {
            events.push(
                serde_json::from_str(line)
                    .map_err(|e| TranscriptError::Malformed(format!("bad event: {e}")))?,
            );
        }
        Ok(Self { header, events })
    }
}

/// Slot-based synchronous network for one trial.
pub struct Network<'a> {
    m: usize,
    trial: u64,
    transcript: &'a mut Transcript,
    delivered: usize,
}

impl<'a> Network<'a> {
    /// Opens m*(m-1) directed authenticated channels.
    pub fn open(m: usize, trial: u64, transcript: &'a mut Transcript) -> Self {
        assert!(m >= 2, "a network needs at least two processes");
        Self {
            m,
            trial,
            transcript,
            delivered: 0,
        }
    }

    pub fn channel_count(&self) -> usize {
        self.m * (self.m - 1)
    }

    /// Protocol messages delivered so far (slots, including BOT
    /// normalizations).
    pub fn delivered(&self) -> usize {
        self.delivered
    }

    /// Delivers one synchronous round. `outbound` maps each sender to the
    /// messages its strategy produced; `slots` lists the (from, to) pairs the
    /// protocol expects this round. Returns the payload delivered on each
    /// slot. Spoofed or out-of-slot messages are rejected and logged.
    pub fn deliver_round(
        &mut self,
        round: usize,
        kind: &str,
        outbound: &BTreeMap<ProcessId, Vec<OutboundMessage>>,
        slots: &[(ProcessId, ProcessId)],
    ) -> BTreeMap<(ProcessId, ProcessId), RelayPayload> {
        let mut delivered = BTreeMap::new();
        let slot_set: BTreeSet<(ProcessId, ProcessId)> = slots.iter().copied().collect();
        // Authentication and slot filtering.
        let mut accepted: BTreeMap<(ProcessId, ProcessId), RelayPayload> = BTreeMap::new();
        for (&sender, msgs) in outbound {
            for msg in msgs {
                if msg.claimed_sender.is_some_and(|claimed| claimed != sender) {
                    self.transcript.push(
                        self.trial,
                        round,
                        sender,
                        msg.to,
                        "impersonation_rejected",
                        json!({"claimed_sender": msg.claimed_sender}),
                        None,
                    );
                    continue;
                }
                if !slot_set.contains(&(sender, msg.to)) {
                    self.transcript.push(
                        self.trial,
                        round,
                        sender,
                        msg.to,
                        "out_of_slot_rejected",
                        msg.payload.summary(),
                        None,
                    );
                    continue;
                }
                // First message per slot wins; duplicates are protocol noise.
                accepted
                    .entry((sender, msg.to))
                    .or_insert(msg.payload.clone());
            }
        }
        for &(from, to) in slots {
            let payload = accepted.remove(&(from, to)).unwrap_or(RelayPayload::Bot);
            self.transcript
                .push(self.trial, round, from, to, kind, payload.summary(), None);
            self.delivered += 1;
            delivered.insert((from, to), payload);
        }
        delivered
    }
}

/// Draws a plan where `faulty` distinct processes get strategies sampled from
/// the library (used by randomized sweeps).
pub fn random_plan(
    m: usize,
    faulty: usize,
    allow_faulty_source: bool,
    rng: &mut ProtocolRng,
) -> FaultPlan {
    let mut plan = FaultPlan::all_honest(m);
    let candidates: Vec<ProcessId> = if allow_faulty_source {
        (0..m).collect()
    } else {
        (1..m).collect()
    };
    let chosen = rand::seq::index::sample(rng, candidates.len(), faulty.min(candidates.len()));
    for idx in chosen.iter() {
        let p = candidates[idx];
        let strategy = match rng.random_range(0..5u8) {
            0 => Strategy::Crash {
                round: rng.random_range(0..2),
            },
            1 => Strategy::BotAlways,
            2 => Strategy::FlipRelayForgedList,
            3 => Strategy::FlipRelayRandomList,
            _ => {
                let mut map = BTreeMap::new();
                for t in 0..m {
                    if t != p {
                        map.insert(t, rng.random_range(0..2u8));
                    }
                }
                Strategy::SplitBroadcast(map)
            }
        };
        plan = plan.with(p, strategy);
    }
    plan
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty_transcript() -> Transcript {
        Transcript::new(0, json!({"test": true}))
    }

    #[test]
    fn channel_count_is_directed_pairs() {
        let mut t = empty_transcript();
        let net = Network::open(3, 0, &mut t);
        assert_eq!(net.channel_count(), 6);
    }

    #[test]
    fn missing_slots_normalize_to_bot() {
        let mut t = empty_transcript();
        let mut net = Network::open(3, 0, &mut t);
        let outbound = BTreeMap::new();
        let slots = vec![(0, 1), (0, 2)];
        let delivered = net.deliver_round(0, "broadcast", &outbound, &slots);
        assert_eq!(delivered[&(0, 1)], RelayPayload::Bot);
        assert_eq!(delivered[&(0, 2)], RelayPayload::Bot);
        assert_eq!(net.delivered(), 2);
    }

    #[test]
    fn impersonation_is_rejected_and_logged() {
        let mut t = empty_transcript();
        {
            let mut net = Network::open(3, 0, &mut t);
            let mut outbound = BTreeMap::new();
            outbound.insert(
                2usize,
                vec![OutboundMessage {
                    to: 1,
                    payload: RelayPayload::Announcement(1),
                    claimed_sender: Some(0), // pretend to be the source
                }],
            );
            let slots = vec![(2, 1)];
            let delivered = net.deliver_round(1, "relay", &outbound, &slots);
            // The spoofed message never lands; the slot normalizes to BOT.
            assert_eq!(delivered[&(2, 1)], RelayPayload::Bot);
        }
        assert!(t.events.iter().any(|e| e.kind == "impersonation_rejected"));
        // Sender field always carries the true originator.
        assert!(t.events.iter().all(|e| e.from == 2));
    }

    #[test]
    fn honest_strategy_is_identity() {
        let intended = vec![
            OutboundMessage::new(1, RelayPayload::Bot),
            OutboundMessage::new(2, RelayPayload::Announcement(1)),
        ];
        let ctx = StrategyContext {
            round: 0,
            is_source: true,
            own_list: &[0, 1, 0],
            m: 3,
            forge_target: 1,
            received_value: None,
        };
        let mut rng = crate::rng::rng_from_seed(0);
        let out = apply_strategy(&Strategy::Honest, &intended, &ctx, &mut rng);
        assert_eq!(out, intended);
    }

    #[test]
    fn crash_suppresses_from_its_round() {
        let intended = vec![OutboundMessage::new(1, RelayPayload::Bot)];
        let mut rng = crate::rng::rng_from_seed(0);
        let ctx = StrategyContext {
            round: 1,
            is_source: false,
            own_list: &[0],
            m: 2,
            forge_target: 1,
            received_value: None,
        };
        assert!(
            apply_strategy(&Strategy::Crash { round: 0 }, &intended, &ctx, &mut rng).is_empty()
        );
        assert!(
            apply_strategy(&Strategy::Crash { round: 1 }, &intended, &ctx, &mut rng).is_empty()
        );
        assert_eq!(
            apply_strategy(&Strategy::Crash { round: 2 }, &intended, &ctx, &mut rng),
            intended
        );
    }

    #[test]
    fn flip_forged_list_draws_from_own_flipped_positions() {
        let own = [0u8, 1, 1, 0, 1, 0, 1, 1];
        let intended = vec![OutboundMessage::new(2, RelayPayload::Bot)];
        let ctx = StrategyContext {
            round: 1,
            is_source: false,
            own_list: &own,
            m: 3,
            forge_target: 2,
            received_value: Some(0),
        };
        let mut rng = crate::rng::rng_from_seed(4);
        let out = apply_strategy(&Strategy::FlipRelayForgedList, &intended, &ctx, &mut rng);
        let RelayPayload::Claim(claim) = &out[0].payload else {
            panic!("expected a claim");
        };
        assert_eq!(claim.value, 1);
        assert_eq!(claim.positions.len(), 2);
        for &p in &claim.positions {
            assert_eq!(own[p], 1);
        }
    }

    #[test]
    fn transcript_round_trips_and_checks_version() {
        let mut t = Transcript::new(7, json!({"m": 3}));
        t.push(0, 0, 0, 1, "broadcast", json!({"type": "bot"}), None);
        let text = t.to_jsonl();
        let back = Transcript::from_jsonl(&text).unwrap();
        assert_eq!(back, t);

        let tampered = text.replace(TRANSCRIPT_VERSION, "0.0.0-other");
        assert!(matches!(
            Transcript::from_jsonl(&tampered),
            Err(TranscriptError::VersionMismatch { .. })
        ));
    }
}
