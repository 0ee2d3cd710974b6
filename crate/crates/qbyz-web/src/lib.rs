//! Browser demo bindings: three interactive operations over the simulator,
//! each taking plain parameters and returning a JSON string for the page to
//! render. All entry points are seeded explicitly, so the demo never needs
//! platform randomness and runs identically everywhere.

use wasm_bindgen::prelude::*;

use qbyz::clock::{run_sync, ClockState, ListBackend, SyncConfig};
use qbyz::cost::{detections_per_position, list_type_count, CostModel, Scheme};
use qbyz::dba::{run_qb, Decision, QbConfig};
use qbyz::harness::{FaultPlan, Strategy, Transcript};
use qbyz::qudit::{default_round_budget, generate_list_set};
use qbyz::rng::rng_from_seed;
use serde_json::json;

fn err_json(message: impl std::fmt::Display) -> String {
    json!({"error": message.to_string()}).to_string()
}

/// Success-probability curves p(eta) for the three distribution schemes at a
/// given process count, sampled on a uniform eta grid.
#[wasm_bindgen]
pub fn efficiency_curves(m: u32, steps: u32) -> String {
    let m = m as usize;
    if m < 3 {
        return err_json("m must be at least 3 so all schemes are defined");
    }
    let steps = steps.clamp(2, 512);
    let mut schemes = Vec::new();
    for scheme in Scheme::ALL {
        let mut points = Vec::new();
        for i in 0..=steps {
            let eta = i as f64 / steps as f64;
            let model = match CostModel::new(scheme, m, eta) {
                Ok(model) => model,
                Err(e) => return err_json(e),
            };
            points.push(json!({"eta": eta, "p": model.p_success()}));
        }
        schemes.push(json!({
            "scheme": scheme.as_str(),
            "detections_per_position": detections_per_position(scheme, m),
            "points": points,
        }));
    }
    let types = match list_type_count(m) {
        Ok(c) => json!({
            "relay_patterns": c.relay_patterns.to_string(),
            "permutation_lists": c.permutation_lists.to_string(),
        }),
        Err(e) => return err_json(e),
    };
    json!({"m": m, "schemes": schemes, "list_types": types}).to_string()
}

fn strategy_from_name(name: &str, m: usize, p: usize) -> Result<Strategy, String> {
    Ok(match name {
        "honest" => Strategy::Honest,
        "crash" => Strategy::Crash { round: 0 },
        "crash-late" => Strategy::Crash { round: 1 },
        "bot" => Strategy::BotAlways,
        "flip-forged" => Strategy::FlipRelayForgedList,
        "flip-random" => Strategy::FlipRelayRandomList,
        "split" => {
            let map = (0..m)
                .filter(|&t| t != p)
                .map(|t| (t, (t % 2) as u8))
                .collect();
            Strategy::SplitBroadcast(map)
        }
        other => return Err(format!("unknown strategy {other:?}")),
    })
}

/// One detectable-broadcast round: the source (process 0) sends `value`, the
/// chosen processes follow the named fault strategies, and every verdict is
/// reported with its analysis case.
///
/// `faults_json` maps process ids to strategy names, e.g.
/// `{"2": "flip-forged"}`.
#[wasm_bindgen]
pub fn run_broadcast_demo(
    m: u32,
    value: u8,
    list_length: u32,
    seed: u32,
    faults_json: &str,
) -> String {
    let m = m as usize;
    if !(2..=10).contains(&m) {
        return err_json("m must be between 2 and 10");
    }
    if value > 1 {
        return err_json("value must be 0 or 1");
    }
    let length = (list_length as usize).clamp(8, 4096);
    let faults: std::collections::BTreeMap<String, String> =
        match serde_json::from_str(if faults_json.trim().is_empty() {
            "{}"
        } else {
            faults_json
        }) {
            Ok(map) => map,
            Err(e) => return err_json(format!("bad faults: {e}")),
        };
    let mut plan = FaultPlan::all_honest(m);
    for (pid, name) in &faults {
        let p: usize = match pid.parse() {
            Ok(p) if p < m => p,
            _ => return err_json(format!("bad process id {pid:?}")),
        };
        match strategy_from_name(name, m, p) {
            Ok(s) => plan = plan.with(p, s),
            Err(e) => return err_json(e),
        }
    }
    let seed = seed as u64;
    let mut rng = rng_from_seed(seed);
    // Lists come from the simulated quantum channel itself; at full detector
    // efficiency this stays fast even in the browser.
    let generated =
        match generate_list_set(m, length, 1.0, default_round_budget(m, length), &mut rng) {
            Ok(g) => g,
            Err(e) => return err_json(e),
        };
    let set = generated.set;
    let mut transcript = Transcript::new(seed, json!({"run": "web-dba"}));
    let outcome = match run_qb(
        0,
        value,
        &plan,
        &set,
        &QbConfig::default(),
        seed,
        0,
        &mut transcript,
    ) {
        Ok(out) => out,
        Err(e) => return err_json(e),
    };
    let verdicts: Vec<serde_json::Value> = outcome
        .verdicts
        .iter()
        .map(|(p, v)| {
            json!({
                "process": p,
                "honest": plan.strategy(*p).is_honest(),
                "decision": match v.decision {
                    Decision::Value(b) => json!({"value": b}),
                    Decision::Abort => json!("abort"),
                },
                "case": v.case.as_str(),
                "suspected": v.suspected,
                "advisory": v.advisory,
            })
        })
        .collect();
    let messages: Vec<serde_json::Value> = transcript
        .events
        .iter()
        .filter(|e| e.kind == "broadcast" || e.kind == "relay")
        .map(|e| {
            json!({
                "round": e.round,
                "from": e.from,
                "to": e.to,
                "payload": e.payload.get("type"),
                "value": e.payload.get("value"),
            })
        })
        .collect();
    json!({
        "m": m,
        "source_value": value,
        "verdicts": verdicts,
        "message_count": outcome.message_count,
        "agreement": outcome.agreement_holds(&plan),
        "validity": outcome.validity_holds(&plan),
        "messages": messages,
        "channel_rounds": generated.rounds_consumed,
        "seed": seed,
    })
    .to_string()
}

/// One clock-synchronization round over the given offsets. `liar` (-1 for
/// none) corrupts its broadcast differences by `lie_ticks` per entry.
#[wasm_bindgen]
pub fn run_clock_sync_demo(
    offsets_json: &str,
    bits: u32,
    list_length: u32,
    seed: u32,
    liar: i32,
    lie_ticks: i64,
) -> String {
    let offsets: Vec<i64> = match serde_json::from_str(offsets_json) {
        Ok(v) => v,
        Err(e) => return err_json(format!("bad offsets: {e}")),
    };
    let m = offsets.len();
    if !(2..=8).contains(&m) {
        return err_json("need 2..=8 clock offsets");
    }
    let bits = (bits as usize).clamp(3, 16);
    let max_offset = 1i64 << (bits - 2);
    if offsets.iter().any(|o| o.abs() >= max_offset) {
        return err_json(format!(
            "offsets must satisfy |offset| < {max_offset} for {bits}-bit differences"
        ));
    }
    let mut plan = FaultPlan::all_honest(m);
    if liar >= 0 {
        let liar = liar as usize;
        if liar >= m {
            return err_json("liar id out of range");
        }
        let lies: std::collections::BTreeMap<usize, i64> = (0..m)
            .map(|k| (k, if k % 2 == 0 { lie_ticks } else { -lie_ticks }))
            .collect();
        plan = plan.with(liar, Strategy::LieClockDifferences(lies));
    }
    let clocks: Vec<ClockState> = offsets.iter().map(|&o| ClockState::new(o)).collect();
    let cfg = SyncConfig {
        bit_width: bits,
        list_length: (list_length as usize).clamp(16, 512),
        backend: ListBackend::Dealer,
        ..SyncConfig::for_processes(m)
    };
    let seed = seed as u64;
    let mut transcript = Transcript::new(seed, json!({"run": "web-clocksync"}));
    let (after, report) = match run_sync(&clocks, &plan, &cfg, seed, &mut transcript) {
        Ok(r) => r,
        Err(e) => return err_json(e),
    };
    json!({
        "before": offsets,
        "after": after.iter().map(|c| c.offset_ticks).collect::<Vec<i64>>(),
        "adjustments": report.adjustments,
        "c1": report.c1,
        "c2": report.c2,
        "aborted": report.aborted,
        "rejected_sources": report.rejected_sources,
        "rotations": report
            .per_rotation
            .iter()
            .map(|r| json!({"source": r.source, "aborted": r.aborted, "vector": r.vector}))
            .collect::<Vec<_>>(),
        "seed": seed,
    })
    .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_cover_all_schemes() {
        let out: serde_json::Value = serde_json::from_str(&efficiency_curves(4, 10)).unwrap();
        assert_eq!(out["m"], 4);
        let schemes = out["schemes"].as_array().unwrap();
        assert_eq!(schemes.len(), 3);
        for s in schemes {
            let points = s["points"].as_array().unwrap();
            assert_eq!(points.len(), 11);
            // p(1) = 1 for every scheme.
            assert_eq!(points.last().unwrap()["p"], 1.0);
        }
        assert_eq!(out["list_types"]["relay_patterns"], "8");
        assert_eq!(out["list_types"]["permutation_lists"], "24");
    }

    #[test]
    fn curves_reject_small_m() {
        let out: serde_json::Value = serde_json::from_str(&efficiency_curves(2, 10)).unwrap();
        assert!(out["error"].is_string());
    }

    #[test]
    fn broadcast_demo_reports_verdicts() {
        let out: serde_json::Value =
            serde_json::from_str(&run_broadcast_demo(4, 1, 200, 7, r#"{"2": "flip-forged"}"#))
                .unwrap();
        assert_eq!(out["agreement"], true);
        assert_eq!(out["validity"], true);
        assert_eq!(out["message_count"], 9);
        let verdicts = out["verdicts"].as_array().unwrap();
        assert_eq!(verdicts.len(), 3);
        assert!(verdicts
            .iter()
            .filter(|v| v["honest"].as_bool().unwrap())
            .all(|v| v["decision"]["value"] == 1));
    }

    #[test]
    fn broadcast_demo_split_source_aborts() {
        let out: serde_json::Value =
            serde_json::from_str(&run_broadcast_demo(3, 0, 120, 3, r#"{"0": "split"}"#)).unwrap();
        let verdicts = out["verdicts"].as_array().unwrap();
        assert!(verdicts.iter().all(|v| v["decision"] == "abort"));
        assert_eq!(out["agreement"], true);
    }

    #[test]
    fn clock_demo_honest_round_synchronizes() {
        let out: serde_json::Value =
            serde_json::from_str(&run_clock_sync_demo("[5,1,0]", 6, 48, 9, -1, 0)).unwrap();
        assert_eq!(out["c1"], true);
        assert_eq!(out["c2"], true);
        let after = out["after"].as_array().unwrap();
        assert!(after.iter().all(|v| v == &after[0]));
    }

    #[test]
    fn clock_demo_liar_is_contained() {
        let out: serde_json::Value =
            serde_json::from_str(&run_clock_sync_demo("[5,1,0,7]", 7, 64, 11, 3, 9)).unwrap();
        assert_eq!(out["c1"], true, "{out}");
        let rejected = out["rejected_sources"].as_array().unwrap();
        assert!(rejected.iter().any(|v| v == 3));
    }

    #[test]
    fn demo_surfaces_errors_as_json() {
        let out: serde_json::Value =
            serde_json::from_str(&run_clock_sync_demo("[100000,0]", 4, 32, 1, -1, 0)).unwrap();
        assert!(out["error"].is_string());
        let out: serde_json::Value =
            serde_json::from_str(&run_broadcast_demo(4, 1, 100, 1, r#"{"9": "bot"}"#)).unwrap();
        assert!(out["error"].is_string());
    }
}
