//! Shared test oracles and helpers, independent of the library's own
//! computation paths wherever they stand in as ground truth.
#![allow(dead_code)] // each test binary uses its own subset

use num_complex::Complex64;
use qbyz::harness::{FaultPlan, ProcessId, Strategy};
use std::collections::BTreeMap;

/// Dense diagonal-matrix oracle for the basis-choice unitary: identity on
/// level 0, w^c elsewhere.
pub fn oracle_basis_diag(m: usize, c: usize) -> Vec<Complex64> {
    (0..m)
        .map(|k| {
            if k == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                omega(m, c)
            }
        })
        .collect()
}

/// Dense diagonal-matrix oracle for the encoding unitary: w^{jN} on level j.
pub fn oracle_encoding_diag(m: usize, n: usize) -> Vec<Complex64> {
    (0..m).map(|j| omega(m, (j * n) % m)).collect()
}

pub fn omega(m: usize, k: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m as f64)
}

/// Applies a diagonal matrix to a vector (the oracle's only operation).
pub fn oracle_apply(diag: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    diag.iter().zip(v).map(|(d, x)| d * x).collect()
}

/// Uniform superposition, built independently of the library.
pub fn oracle_uniform(m: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0 / (m as f64).sqrt(), 0.0); m]
}

pub fn oracle_overlap_with_uniform(v: &[Complex64]) -> Complex64 {
    let m = v.len() as f64;
    v.iter().sum::<Complex64>() / m.sqrt()
}

/// Iterates every (c_1..c_m, N_1, N_2..N_m) tuple of the distribution round.
/// The visitor receives the basis choices and encoded values; all tuples are
/// equiprobable, so probabilities are tuple-count ratios.
pub fn for_each_round_tuple(m: usize, mut visit: impl FnMut(&[usize], &[usize])) {
    let mut basis = vec![0usize; m];
    let mut encoded = vec![0usize; m];
    fn rec_basis(
        m: usize,
        idx: usize,
        basis: &mut Vec<usize>,
        encoded: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize], &[usize]),
    ) {
        if idx == m {
            rec_encoding(m, 0, basis, encoded, visit);
            return;
        }
        for c in 0..m {
            basis[idx] = c;
            rec_basis(m, idx + 1, basis, encoded, visit);
        }
    }
    fn rec_encoding(
        m: usize,
        idx: usize,
        basis: &mut Vec<usize>,
        encoded: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize], &[usize]),
    ) {
        if idx == m {
            visit(basis, encoded);
            return;
        }
        let limit = if idx == 0 { m } else { 2 };
        for n in 0..limit {
            encoded[idx] = n;
            rec_encoding(m, idx + 1, basis, encoded, visit);
        }
    }
    rec_basis(m, 0, &mut basis, &mut encoded, &mut visit);
}

/// Exhaustive-enumeration keep rate: the fraction of equiprobable round
/// tuples with basis sum and encoding sum both zero mod m.
pub fn enumerated_keep_rate(m: usize) -> f64 {
    let mut total: u64 = 0;
    let mut kept: u64 = 0;
    for_each_round_tuple(m, |basis, encoded| {
        total += 1;
        let c_ok = basis.iter().sum::<usize>() % m == 0;
        let s_ok = encoded.iter().sum::<usize>() % m == 0;
        if c_ok && s_ok {
            kept += 1;
        }
    });
    kept as f64 / total as f64
}

/// The exhaustive strategy library used by the sweep tests: every entry is a
/// concrete strategy instance for process `p` in an m-process run.
pub fn strategy_library(m: usize, p: ProcessId) -> Vec<Strategy> {
    let split = |phase: usize| -> Strategy {
        let map: BTreeMap<ProcessId, u8> = (0..m)
            .filter(|&t| t != p)
            .map(|t| (t, ((t + phase) % 2) as u8))
            .collect();
        Strategy::SplitBroadcast(map)
    };
    vec![
        Strategy::Honest,
        Strategy::Crash { round: 0 },
        Strategy::Crash { round: 1 },
        Strategy::BotAlways,
        Strategy::FlipRelayForgedList,
        Strategy::FlipRelayRandomList,
        split(0),
        split(1),
    ]
}

/// All m-process plans over the library (library_size^m assignments).
pub fn exhaustive_plans(m: usize) -> Vec<FaultPlan> {
    let libs: Vec<Vec<Strategy>> = (0..m).map(|p| strategy_library(m, p)).collect();
    let size = libs[0].len();
    let count = size.pow(m as u32);
    let mut plans = Vec::with_capacity(count);
    for mut index in 0..count {
        let mut strategies = Vec::with_capacity(m);
        for lib in &libs {
            strategies.push(lib[index % size].clone());
            index /= size;
        }
        plans.push(FaultPlan::new(strategies));
    }
    plans
}
