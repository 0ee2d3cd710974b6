//! Single-qudit channel: the quantum backend for list distribution.
//!
//! One m-level system travels P0 -> P1 -> ... -> P(m-1). Every process applies
//! two diagonal phase unitaries: a basis choice c (phase w^c on all levels
//! except level 0, w = exp(i 2 pi / m)) and an encoding value N (phase w^{jN}
//! on level j). The last process projects onto the initial uniform
//! superposition. A round is kept when the detector fires, the projection
//! succeeds, and the revealed basis choices sum to 0 mod m; the encoded values
//! of kept rounds then satisfy sum(N_k) = 0 mod m and become one position of
//! the correlated lists.

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::lists::{CorrelatedListSet, Provenance};
use crate::rng::ProtocolRng;

/// Norm / equality tolerance for amplitudes. Phase sums stay far below this
/// for any realistic process count.
pub const AMP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum QuditError {
    #[error("a qudit needs at least 2 levels, got {0}")]
    DimensionTooSmall(usize),
    #[error("phase index {index} out of range for dimension {dim}")]
    PhaseOutOfRange { index: usize, dim: usize },
}

#[derive(Debug, Error)]
pub enum DistributionError {
    #[error("round budget {budget} exhausted after {kept} of {wanted} kept rounds")]
    BudgetExhausted {
        budget: usize,
        kept: usize,
        wanted: usize,
    },
    #[error(transparent)]
    Qudit(#[from] QuditError),
}

/// Pure state of the travelling qudit: `dim` complex amplitudes, unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct QuditState {
    amps: Vec<Complex64>,
}

impl QuditState {
    /// The uniform superposition all protocol rounds start from:
    /// every amplitude equals 1/sqrt(m).
    pub fn uniform(m: usize) -> Result<Self, QuditError> {
        if m < 2 {
            return Err(QuditError::DimensionTooSmall(m));
        }
        let a = Complex64::new(1.0 / (m as f64).sqrt(), 0.0);
        Ok(Self { amps: vec![a; m] })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn omega_pow(&self, k: usize) -> Complex64 {
        let m = self.dim() as f64;
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m)
    }

    /// Basis-choice unitary: leaves level 0 alone, multiplies every other
    /// level by w^c.
    pub fn apply_basis_phase(&mut self, c: usize) -> Result<(), QuditError> {
        if c >= self.dim() {
            return Err(QuditError::PhaseOutOfRange {
                index: c,
                dim: self.dim(),
            });
        }
        let w = self.omega_pow(c);
        for amp in self.amps.iter_mut().skip(1) {
            *amp *= w;
        }
        Ok(())
    }

    /// Encoding unitary: multiplies level j by w^{jN}. N = 0 is the identity.
    pub fn apply_encoding(&mut self, n: usize) -> Result<(), QuditError> {
        if n >= self.dim() {
            return Err(QuditError::PhaseOutOfRange {
                index: n,
                dim: self.dim(),
            });
        }
        let m = self.dim();
        for (j, amp) in self.amps.iter_mut().enumerate() {
            let phase = (j * n) % m;
            let w =
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase as f64 / m as f64);
            *amp *= w;
        }
        Ok(())
    }

    /// Inner product with the uniform superposition of the same dimension.
    pub fn overlap_with_uniform(&self) -> Complex64 {
        let m = self.dim() as f64;
        self.amps.iter().sum::<Complex64>() / m.sqrt()
    }
}

/// Outcome of the final projective measurement behind a detector of
/// efficiency eta.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// The detector did not fire (probability 1 - eta); no outcome exists.
    NoDetection,
    /// The detector fired; `passed` is true when the outcome was the initial
    /// uniform state (probability |<psi0|psi>|^2).
    Detected { passed: bool },
}

/// Projects onto the initial state behind a Bernoulli(eta) detector gate.
/// Dark counts are not modeled. Caller guarantees 0 <= eta <= 1.
pub fn measure_initial_projection(
    state: &QuditState,
    eta: f64,
    rng: &mut ProtocolRng,
) -> Projection {
    debug_assert!((0.0..=1.0).contains(&eta));
    if !rng.random_bool(eta.clamp(0.0, 1.0)) {
        return Projection::NoDetection;
    }
    let p_pass = state.overlap_with_uniform().norm_sqr().clamp(0.0, 1.0);
    Projection::Detected {
        passed: rng.random_bool(p_pass),
    }
}

/// Full record of one distribution round.
///
/// `basis_choices` is stored in reveal order (last process first), matching
/// the protocol's reveal phase; `encoded_values[k]` is process k's N.
/// `projected_initial` is simulated independently of the detector gate so
/// lost rounds remain auditable.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct RoundRecord {
    pub basis_choices_reveal_order: Vec<usize>,
    pub encoded_values: Vec<usize>,
    pub detected: bool,
    pub projected_initial: bool,
    pub basis_sum_ok: bool,
    pub kept: bool,
}

impl RoundRecord {
    /// Basis choices back in process order P0..P(m-1).
    pub fn basis_choices(&self) -> Vec<usize> {
        self.basis_choices_reveal_order
            .iter()
            .rev()
            .copied()
            .collect()
    }
}

/// Runs one round of the distribution protocol: draws every process's basis
/// choice and encoded value, applies the phases in travel order, measures,
/// and post-selects.
pub fn run_distribution_round(
    m: usize,
    eta: f64,
    rng: &mut ProtocolRng,
) -> Result<RoundRecord, QuditError> {
    let mut state = QuditState::uniform(m)?;
    let mut basis = Vec::with_capacity(m);
    let mut encoded = Vec::with_capacity(m);
    for k in 0..m {
        let c = rng.random_range(0..m);
        // The source encodes a full symbol; relays encode one bit.
        let n = if k == 0 {
            rng.random_range(0..m)
        } else {
            rng.random_range(0..2usize)
        };
        state.apply_basis_phase(c)?;
        state.apply_encoding(n)?;
        basis.push(c);
        encoded.push(n);
    }
    let projection = measure_initial_projection(&state, eta, rng);
    let (detected, projected_initial) = match projection {
        Projection::NoDetection => {
            // The projection outcome is still simulated for auditability.
            let p = state.overlap_with_uniform().norm_sqr().clamp(0.0, 1.0);
            (false, rng.random_bool(p))
        }
        Projection::Detected { passed } => (true, passed),
    };
    let basis_sum_ok = basis.iter().sum::<usize>() % m == 0;
    let kept = detected && projected_initial && basis_sum_ok;
    let basis_choices_reveal_order = basis.iter().rev().copied().collect();
    Ok(RoundRecord {
        basis_choices_reveal_order,
        encoded_values: encoded,
        detected,
        projected_initial,
        basis_sum_ok,
        kept,
    })
}

/// Result of generating a full list set over the quantum channel. The kept
/// rounds are retained so the reveal phase stays auditable (one record per
/// list position, in position order).
#[derive(Debug, Clone)]
pub struct GeneratedLists {
    pub set: CorrelatedListSet,
    pub rounds_consumed: usize,
    pub kept_rounds: Vec<RoundRecord>,
}

/// Default round budget: expected consumption is m^2 per kept position at
/// eta = 1, scaled by 100 for slack.
pub fn default_round_budget(m: usize, length: usize) -> usize {
    100 * m * m * length
}

/// Repeats distribution rounds until `length` kept rounds fill one position
/// each, or the budget runs out (unreachable lengths, e.g. eta = 0).
pub fn generate_list_set(
    m: usize,
    length: usize,
    eta: f64,
    budget: usize,
    rng: &mut ProtocolRng,
) -> Result<GeneratedLists, DistributionError> {
    let mut kept_rounds: Vec<RoundRecord> = Vec::with_capacity(length);
    let mut rounds = 0usize;
    while kept_rounds.len() < length {
        if rounds >= budget {
            return Err(DistributionError::BudgetExhausted {
                budget,
                kept: kept_rounds.len(),
                wanted: length,
            });
        }
        let record = run_distribution_round(m, eta, rng)?;
        rounds += 1;
        if record.kept {
            kept_rounds.push(record);
        }
    }
    let mut source_list = Vec::with_capacity(length);
    let mut relay_lists = vec![Vec::with_capacity(length); m - 1];
    for record in &kept_rounds {
        source_list.push(record.encoded_values[0] as u8);
        for (k, relay) in relay_lists.iter_mut().enumerate() {
            relay.push(record.encoded_values[k + 1] as u8);
        }
    }
    let set = CorrelatedListSet::new(m, source_list, relay_lists, Provenance::Quantum)
        .expect("kept rounds satisfy the correlation rules by construction");
    Ok(GeneratedLists {
        set,
        rounds_consumed: rounds,
        kept_rounds,
    })
}
