//! Classical recursive oral-messages baseline with exact message counting.
//!
//! The commander distributes its value; with recursion depth n > 0 every
//! lieutenant re-distributes what it received to the remaining lieutenants at
//! depth n-1, and finally decides on the lower median of the m-1 values it
//! holds (its own plus one per other lieutenant). A missing message counts as
//! the configured default. Agreement and validity hold iff fewer than a third
//! of the processes are faulty; the exponential message cost is
//! M(n, m) = (m-1)(1 + M(n-1, m-1)), M(0, m) = m-1.
//!
//! Values are plain signed integers so the same recursion serves bit
//! broadcast and clock-difference variants.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::harness::{FaultPlan, ProcessId, Strategy};

#[derive(Debug, Error, PartialEq)]
pub enum OmError {
    #[error("recursion depth {n} needs at least {} processes, got {m}", n + 2)]
    IllFormed { n: usize, m: usize },
    #[error("fault plan covers {plan} processes but the config says {m}")]
    PlanMismatch { plan: usize, m: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct OmConfig {
    pub m: usize,
    pub n: usize,
    /// Substituted when a process receives no message.
    pub default_value: i64,
}

impl OmConfig {
    pub fn new(m: usize, n: usize) -> Result<Self, OmError> {
        if m < n + 2 {
            return Err(OmError::IllFormed { n, m });
        }
        Ok(Self {
            m,
            n,
            default_value: 0,
        })
    }
}

/// Exact transmitted-message count of the recursion.
pub fn om_message_count(n: usize, m: usize) -> Result<u64, OmError> {
    if m < n + 2 {
        return Err(OmError::IllFormed { n, m });
    }
    if n == 0 {
        Ok(m as u64 - 1)
    } else {
        Ok((m as u64 - 1) * (1 + om_message_count(n - 1, m - 1)?))
    }
}

/// Lower median: element at index (len-1)/2 of the sorted values.
pub fn lower_median(values: &[i64]) -> i64 {
    assert!(!values.is_empty(), "median of an empty set");
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    sorted[(sorted.len() - 1) / 2]
}

/// What one process sends another when relaying `value`, under its strategy.
/// `None` means the message is withheld (receiver substitutes the default).
fn om_send(strategy: &Strategy, value: i64, to: ProcessId) -> Option<i64> {
    match strategy {
        Strategy::Honest => Some(value),
        Strategy::Crash { .. } | Strategy::BotAlways | Strategy::Arbitrary(_) => None,
        Strategy::SplitBroadcast(map) => Some(map.get(&to).map(|&b| b as i64).unwrap_or(value)),
        Strategy::FlipRelayForgedList | Strategy::FlipRelayRandomList => Some(match value {
            0 => 1,
            1 => 0,
            v => -v,
        }),
        Strategy::LieClockDifferences(map) => Some(value + map.get(&to).copied().unwrap_or(0)),
    }
}

#[derive(Debug, Clone)]
pub struct OmOutcome {
    /// Final decision of every lieutenant (non-commander process).
    pub decisions: BTreeMap<ProcessId, i64>,
    /// Message slots consumed, crash slots included.
    pub messages_sent: u64,
}

/// Runs the oral-messages recursion with process 0 as commander.
pub fn om(cfg: &OmConfig, commander_value: i64, plan: &FaultPlan) -> Result<OmOutcome, OmError> {
    if plan.len() != cfg.m {
        return Err(OmError::PlanMismatch {
            plan: plan.len(),
            m: cfg.m,
        });
    }
    if cfg.m < cfg.n + 2 {
        return Err(OmError::IllFormed { n: cfg.n, m: cfg.m });
    }
    let lieutenants: Vec<ProcessId> = (1..cfg.m).collect();
    let mut messages = 0u64;
    let decisions = om_recursive(
        cfg.n,
        0,
        &lieutenants,
        commander_value,
        plan,
        cfg.default_value,
        &mut messages,
    );
    Ok(OmOutcome {
        decisions,
        messages_sent: messages,
    })
}

/// One sub-broadcast: `commander` distributes `value` to `lieutenants`;
/// returns each lieutenant's decided value for this sub-problem.
fn om_recursive(
    n: usize,
    commander: ProcessId,
    lieutenants: &[ProcessId],
    value: i64,
    plan: &FaultPlan,
    default: i64,
    messages: &mut u64,
) -> BTreeMap<ProcessId, i64> {
    // Distribution step: one slot per lieutenant, withheld messages become
    // the default at delivery.
    let mut received: BTreeMap<ProcessId, i64> = BTreeMap::new();
    for &l in lieutenants {
        *messages += 1;
        let v = om_send(plan.strategy(commander), value, l).unwrap_or(default);
        received.insert(l, v);
    }
    if n == 0 {
        return received;
    }
    // Relay step: lieutenant l re-distributes its value to the others at
    // depth n-1; relayed[j] collects what j obtained from each l.
    let mut relayed: BTreeMap<ProcessId, Vec<i64>> =
        lieutenants.iter().map(|&j| (j, Vec::new())).collect();
    for &l in lieutenants {
        let rest: Vec<ProcessId> = lieutenants.iter().copied().filter(|&j| j != l).collect();
        let sub = om_recursive(n - 1, l, &rest, received[&l], plan, default, messages);
        for (&j, &v) in &sub {
            relayed.get_mut(&j).expect("known lieutenant").push(v);
        }
    }
    // Decision step: lower median over the own value and the relayed ones.
    lieutenants
        .iter()
        .map(|&j| {
            let mut values = vec![received[&j]];
            values.extend(&relayed[&j]);
            (j, lower_median(&values))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn message_count_closed_form() {
        // Base case: one broadcast to each lieutenant.
        for m in 2..8 {
            assert_eq!(om_message_count(0, m).unwrap(), m as u64 - 1);
        }
        // Unrolled by hand: M(1,4) = 3 * (1 + M(0,3)) = 3 * 3 = 9.
        assert_eq!(om_message_count(1, 4).unwrap(), 9);
        assert_eq!(om_message_count(2, 5).unwrap(), 4 * (1 + 9));
        assert_eq!(om_message_count(0, 3), Ok(2));
        assert!(om_message_count(2, 3).is_err());
    }

    #[test]
    fn growth_stays_below_power_bound() {
        // M(n, m) / m^{n+1} stays bounded as m grows at fixed n.
        for n in 0..3usize {
            for m in (n + 2)..30 {
                let count = om_message_count(n, m).unwrap() as f64;
                let bound = (m as f64).powi(n as i32 + 1);
                assert!(count <= bound, "M({n},{m}) = {count} > {bound}");
            }
        }
    }

    #[test]
    fn all_honest_agree_with_commander() {
        let cfg = OmConfig::new(4, 1).unwrap();
        let plan = FaultPlan::all_honest(4);
        let out = om(&cfg, 1, &plan).unwrap();
        assert_eq!(out.decisions.len(), 3);
        assert!(out.decisions.values().all(|&v| v == 1));
        assert_eq!(out.messages_sent, 9);
    }

    #[test]
    fn one_flipping_lieutenant_cannot_break_m4() {
        let cfg = OmConfig::new(4, 1).unwrap();
        for value in [0i64, 1] {
            let plan = FaultPlan::all_honest(4).with(3, Strategy::FlipRelayForgedList);
            let out = om(&cfg, value, &plan).unwrap();
            for (&p, &d) in &out.decisions {
                if p != 3 {
                    assert_eq!(d, value, "lieutenant {p} betrayed value {value}");
                }
            }
        }
    }

    #[test]
    fn split_commander_at_m3_keeps_lieutenants_agreed_but_m3_is_still_broken() {
        // Split commander: both lieutenants end with the multiset {0, 1} and
        // the same lower median, so they agree.
        let cfg = OmConfig::new(3, 1).unwrap();
        let plan = FaultPlan::all_honest(3).with(
            0,
            Strategy::SplitBroadcast(BTreeMap::from([(1, 0u8), (2, 1u8)])),
        );
        let out = om(&cfg, 0, &plan).unwrap();
        assert_eq!(out.decisions[&1], out.decisions[&2]);

        // The classical bound shows up as a validity break instead: one
        // lying lieutenant makes the honest lieutenant decide against an
        // honest commander.
        let plan =
            FaultPlan::all_honest(3).with(1, Strategy::SplitBroadcast(BTreeMap::from([(2, 0u8)])));
        let out = om(&cfg, 1, &plan).unwrap();
        assert_ne!(out.decisions[&2], 1, "m = 3n should not satisfy validity");
    }

    #[test]
    fn crash_uses_default_value() {
        let cfg = OmConfig::new(4, 1).unwrap();
        let plan = FaultPlan::all_honest(4).with(0, Strategy::Crash { round: 0 });
        let out = om(&cfg, 1, &plan).unwrap();
        // Everyone falls back to the default 0 and stays in agreement.
        assert!(out.decisions.values().all(|&v| v == 0));
        assert_eq!(out.messages_sent, 9);
    }

    #[test]
    fn lower_median_is_the_lower_of_even_lists() {
        assert_eq!(lower_median(&[0, 1]), 0);
        assert_eq!(lower_median(&[1, 0, 1]), 1);
        assert_eq!(lower_median(&[5, 1, 0]), 1);
        assert_eq!(lower_median(&[3, 1, 4, 2]), 2);
    }

    #[test]
    fn clock_difference_values_flow_through() {
        // Generic integer payloads: a lying relay shifts what it relays.
        let cfg = OmConfig::new(4, 1).unwrap();
        let plan = FaultPlan::all_honest(4).with(
            2,
            Strategy::LieClockDifferences(BTreeMap::from([(1, 100i64), (3, -100)])),
        );
        let out = om(&cfg, 7, &plan).unwrap();
        // Honest lieutenants still hold a median dominated by honest copies.
        assert_eq!(out.decisions[&1], 7);
        assert_eq!(out.decisions[&3], 7);
    }
}
