//! Closed-form detection-cost models for the three list-distribution schemes,
//! plus Monte Carlo checks of the same quantities.
//!
//! Per distributed list position, the travelling-qudit scheme needs exactly
//! one detection; distributing the same lists over pairwise key channels
//! needs m-2 bit transmissions plus ceil(log2 m) qubits to carry a full
//! symbol; the entangled-state scheme consumes (m-1)·ceil(log2 m) detections.
//! With detector efficiency eta the success probabilities are eta,
//! eta^(m-2+ceil(log2 m)) and eta^((m-1)·ceil(log2 m)).

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::qudit::run_distribution_round;
use crate::rng::ProtocolRng;

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("detector efficiency must be in [0, 1], got {0}")]
    BadEfficiency(f64),
    #[error("scheme {scheme:?} needs at least {min} processes, got {m}")]
    TooFewProcesses {
        scheme: Scheme,
        min: usize,
        m: usize,
    },
    #[error("list type count overflows u128 for m = {0}")]
    Overflow(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    SingleQudit,
    QkdLists,
    EntangledState,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [
        Scheme::SingleQudit,
        Scheme::QkdLists,
        Scheme::EntangledState,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::SingleQudit => "single_qudit",
            Scheme::QkdLists => "qkd_lists",
            Scheme::EntangledState => "entangled_state",
        }
    }
}

/// ceil(log2(m)) for m >= 1, exact integer arithmetic.
pub fn ceil_log2(m: usize) -> u32 {
    assert!(m >= 1);
    usize::BITS - (m - 1).leading_zeros()
}

/// Detections required per successfully distributed list position.
pub fn detections_per_position(scheme: Scheme, m: usize) -> u32 {
    match scheme {
        Scheme::SingleQudit => 1,
        Scheme::QkdLists => (m as u32 - 2) + ceil_log2(m),
        Scheme::EntangledState => (m as u32 - 1) * ceil_log2(m),
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CostModel {
    pub scheme: Scheme,
    pub m: usize,
    pub eta: f64,
}

impl CostModel {
    pub fn new(scheme: Scheme, m: usize, eta: f64) -> Result<Self, CostError> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(CostError::BadEfficiency(eta));
        }
        let min = match scheme {
            Scheme::SingleQudit => 2,
            Scheme::QkdLists => 2,
            Scheme::EntangledState => 3,
        };
        if m < min {
            return Err(CostError::TooFewProcesses { scheme, min, m });
        }
        Ok(Self { scheme, m, eta })
    }

    /// Closed-form success probability of distributing one position.
    pub fn p_success(&self) -> f64 {
        self.eta
            .powi(detections_per_position(self.scheme, self.m) as i32)
    }
}

/// Distinct list types each scheme must be able to hand out: the relay-bit
/// patterns (2^{m-1}) for the correlated-list protocol, against the m!
/// permutation lists of the entangled-state generalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ListTypeCount {
    pub relay_patterns: u128,
    pub permutation_lists: u128,
}

pub fn list_type_count(m: usize) -> Result<ListTypeCount, CostError> {
    if m < 2 {
        return Err(CostError::TooFewProcesses {
            scheme: Scheme::SingleQudit,
            min: 2,
            m,
        });
    }
    if m > 128 {
        return Err(CostError::Overflow(m));
    }
    let relay_patterns = 1u128 << (m - 1);
    let mut permutation_lists: u128 = 1;
    for k in 2..=m as u128 {
        permutation_lists = permutation_lists
            .checked_mul(k)
            .ok_or(CostError::Overflow(m))?;
    }
    Ok(ListTypeCount {
        relay_patterns,
        permutation_lists,
    })
}

/// Empirical success rate over `trials` position-distribution attempts.
///
/// The single-qudit scheme is simulated through the actual channel: rounds
/// run until `trials` of them pass post-selection (projection onto the
/// initial state plus basis-sum zero), and the reported rate is the detected
/// fraction among those. The key-channel schemes gate every required
/// detection with an independent Bernoulli(eta) draw.
pub fn monte_carlo_efficiency(model: &CostModel, trials: usize, rng: &mut ProtocolRng) -> f64 {
    assert!(trials >= 1);
    match model.scheme {
        Scheme::SingleQudit => {
            let mut accepted = 0usize;
            let mut detected = 0usize;
            while accepted < trials {
                let record = run_distribution_round(model.m, model.eta, rng)
                    .expect("valid dimension by construction");
                if record.projected_initial && record.basis_sum_ok {
                    accepted += 1;
                    if record.detected {
                        detected += 1;
                    }
                }
            }
            detected as f64 / trials as f64
        }
        Scheme::QkdLists | Scheme::EntangledState => {
            let needed = detections_per_position(model.scheme, model.m);
            let mut successes = 0usize;
            for _ in 0..trials {
                if (0..needed).all(|_| rng.random_bool(model.eta)) {
                    successes += 1;
                }
            }
            successes as f64 / trials as f64
        }
    }
}
