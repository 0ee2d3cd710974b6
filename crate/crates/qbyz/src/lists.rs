//! Correlated private lists: representation, validation, dealer generation
//! and claim checking.
//!
//! A list set over m processes holds one source list l_0 with symbols in
//! {0..m-1} and m-1 relay lists of bits, all of length L. The correlation
//! rules are:
//!
//! * source symbol 0 or 1 at position j  => every relay bit at j equals it;
//! * source symbol N in {2..m-1} at j    => the relay bits at j sum to m - N.
//!
//! Positions of the first kind are "correlated", the rest are uncorrelated;
//! a relay holder cannot tell which is which from its own list alone. The
//! per-position law shared by both backends is: relay bits i.i.d. uniform,
//! source symbol determined as (-sum of bits) mod m, i.e. the 2^{m-1}
//! relay-bit patterns are the equiprobable "list types".

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::ProtocolRng;

#[derive(Debug, Error, PartialEq)]
pub enum ListError {
    #[error("need at least 2 processes, got {0}")]
    TooFewProcesses(usize),
    #[error("need {expected} relay lists, got {got}")]
    WrongRelayCount { expected: usize, got: usize },
    #[error("list lengths differ: source has {source_len}, relay {relay} has {len}")]
    LengthMismatch {
        source_len: usize,
        relay: usize,
        len: usize,
    },
    #[error("symbol {symbol} at position {position} outside 0..{m}")]
    SymbolOutOfRange {
        symbol: u8,
        position: usize,
        m: usize,
    },
    #[error("relay list {relay} has non-bit value {value} at position {position}")]
    NonBitRelayValue {
        relay: usize,
        value: u8,
        position: usize,
    },
}

/// How a list set came to exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Distributed by the travelling-qudit protocol.
    Quantum,
    /// Produced by a trusted dealer standing in for pairwise key channels.
    Dealer,
}

/// The m private lists of one distribution session, indexed by role:
/// role 0 holds the source list, roles 1..m-1 hold relay bit lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelatedListSet {
    m: usize,
    source_list: Vec<u8>,
    relay_lists: Vec<Vec<u8>>,
    provenance: Provenance,
}

/// Wire form: `{m, L, provenance, lists: [[...], ...]}` with lists[0] the
/// source list.
#[derive(Serialize, Deserialize)]
struct ListSetWire {
    m: usize,
    #[serde(rename = "L")]
    length: usize,
    provenance: Provenance,
    lists: Vec<Vec<u8>>,
}

impl Serialize for CorrelatedListSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut lists = Vec::with_capacity(self.m);
        lists.push(self.source_list.clone());
        lists.extend(self.relay_lists.iter().cloned());
        ListSetWire {
            m: self.m,
            length: self.len(),
            provenance: self.provenance,
            lists,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CorrelatedListSet {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = ListSetWire::deserialize(deserializer)?;
        if wire.lists.len() != wire.m {
            return Err(serde::de::Error::custom(format!(
                "expected {} lists, got {}",
                wire.m,
                wire.lists.len()
            )));
        }
        let mut lists = wire.lists.into_iter();
        let source = lists.next().unwrap_or_default();
        let set = CorrelatedListSet::new(wire.m, source, lists.collect(), wire.provenance)
            .map_err(serde::de::Error::custom)?;
        if set.len() != wire.length {
            return Err(serde::de::Error::custom("declared L does not match lists"));
        }
        Ok(set)
    }
}

impl CorrelatedListSet {
    /// Builds a set after checking shapes and value ranges. Correlation-rule
    /// conformance is a separate, report-style check (`validate_list_set`).
    pub fn new(
        m: usize,
        source_list: Vec<u8>,
        relay_lists: Vec<Vec<u8>>,
        provenance: Provenance,
    ) -> Result<Self, ListError> {
        if m < 2 {
            return Err(ListError::TooFewProcesses(m));
        }
        if relay_lists.len() != m - 1 {
            return Err(ListError::WrongRelayCount {
                expected: m - 1,
                got: relay_lists.len(),
            });
        }
        for (r, list) in relay_lists.iter().enumerate() {
            if list.len() != source_list.len() {
                return Err(ListError::LengthMismatch {
                    source_len: source_list.len(),
                    relay: r,
                    len: list.len(),
                });
            }
            if let Some((position, &value)) = list.iter().enumerate().find(|(_, &v)| v > 1) {
                return Err(ListError::NonBitRelayValue {
                    relay: r,
                    value,
                    position,
                });
            }
        }
        if let Some((position, &symbol)) = source_list
            .iter()
            .enumerate()
            .find(|(_, &s)| s as usize >= m)
        {
            return Err(ListError::SymbolOutOfRange {
                symbol,
                position,
                m,
            });
        }
        Ok(Self {
            m,
            source_list,
            relay_lists,
            provenance,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// List length L.
    pub fn len(&self) -> usize {
        self.source_list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source_list.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn source_list(&self) -> &[u8] {
        &self.source_list
    }

    /// Relay list for relay index 0..m-2 (role 1..m-1).
    pub fn relay_list(&self, relay: usize) -> &[u8] {
        &self.relay_lists[relay]
    }

    /// List held by protocol role 0..m-1 (role 0 = source).
    pub fn list_for_role(&self, role: usize) -> &[u8] {
        if role == 0 {
            &self.source_list
        } else {
            &self.relay_lists[role - 1]
        }
    }
}

/// Report of correlation-rule conformance; `violations` holds every bad
/// position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<usize>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks both correlation rules at every position.
pub fn validate_list_set(set: &CorrelatedListSet) -> ValidationReport {
    let m = set.m() as u32;
    let mut violations = Vec::new();
    for j in 0..set.len() {
        let n = set.source_list()[j] as u32;
        let bits: Vec<u32> = (0..set.m() - 1)
            .map(|r| set.relay_list(r)[j] as u32)
            .collect();
        let ok = if n <= 1 {
            bits.iter().all(|&b| b == n)
        } else {
            bits.iter().sum::<u32>() == m - n
        };
        if !ok {
            violations.push(j);
        }
    }
    ValidationReport { violations }
}

/// Trusted-dealer backend: reproduces the quantum backend's per-position law
/// exactly by drawing the relay bits i.i.d. uniform and deriving the source
/// symbol as (-sum) mod m. Conditioned on a symbol N >= 2, every bit
/// combination with sum m-N is equiprobable.
pub fn dealer_generate(m: usize, length: usize, rng: &mut ProtocolRng) -> CorrelatedListSet {
    assert!(m >= 2, "dealer needs at least 2 processes");
    let mut source = Vec::with_capacity(length);
    let mut relays = vec![Vec::with_capacity(length); m - 1];
    for _ in 0..length {
        let mut sum = 0usize;
        for relay in relays.iter_mut() {
            let bit = rng.random_range(0..2u8);
            sum += bit as usize;
            relay.push(bit);
        }
        source.push(((m - sum % m) % m) as u8);
    }
    CorrelatedListSet::new(m, source, relays, Provenance::Dealer)
        .expect("dealer output satisfies shape constraints by construction")
}

/// Indices at which `list` holds `value`, ascending.
pub fn positions_of(list: &[u8], value: u8) -> Vec<usize> {
    list.iter()
        .enumerate()
        .filter_map(|(i, &v)| (v == value).then_some(i))
        .collect()
}

/// A broadcast claim: a bit value plus the positions where the sender's
/// source list is said to hold it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub value: u8,
    pub positions: Vec<usize>,
}

impl Claim {
    pub fn new(value: u8, positions: Vec<usize>) -> Self {
        Self { value, positions }
    }
}

/// Expected number of positions holding one specific bit value in the source
/// list: L / 2^{m-1}. Each of the 2^{m-1} equiprobable relay-bit patterns maps
/// to exactly one source symbol, and exactly one pattern each yields symbol 0
/// and symbol 1.
pub fn expected_value_count(m: usize, length: usize) -> f64 {
    length as f64 / 2f64.powi(m as i32 - 1)
}

/// Default claim-length tolerance: three binomial standard deviations of the
/// value count, rounded up.
pub fn default_theta(m: usize, length: usize) -> f64 {
    let p = 1.0 / 2f64.powi(m as i32 - 1);
    (3.0 * (length as f64 * p * (1.0 - p)).sqrt()).ceil()
}

/// Why a claim was found inconsistent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InconsistencyReason {
    /// Non-bit value, out-of-range / duplicate / unsorted positions.
    Malformed,
    /// Position count outside the expected window.
    Length,
    /// The checker's own list disagrees at some claimed position.
    Mismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimCheck {
    Consistent,
    Inconsistent(InconsistencyReason),
}

impl ClaimCheck {
    pub fn is_consistent(&self) -> bool {
        matches!(self, ClaimCheck::Consistent)
    }
}

/// Checks a claim against the checker's own list.
///
/// Consistent iff the claim is well-formed, its position count lies within
/// `expected_value_count(m, L) +- theta`, and the checker's list holds the
/// claimed value at every claimed position.
pub fn check_claim(claim: &Claim, own_list: &[u8], m: usize, theta: f64) -> ClaimCheck {
    if claim.value > 1 {
        return ClaimCheck::Inconsistent(InconsistencyReason::Malformed);
    }
    let length = own_list.len();
    let mut prev: Option<usize> = None;
    for &p in &claim.positions {
        if p >= length || prev.is_some_and(|q| p <= q) {
            return ClaimCheck::Inconsistent(InconsistencyReason::Malformed);
        }
        prev = Some(p);
    }
    let expected = expected_value_count(m, length);
    let count = claim.positions.len() as f64;
    if (count - expected).abs() > theta {
        return ClaimCheck::Inconsistent(InconsistencyReason::Length);
    }
    if claim.positions.iter().any(|&p| own_list[p] != claim.value) {
        return ClaimCheck::Inconsistent(InconsistencyReason::Mismatch);
    }
    ClaimCheck::Consistent
}
