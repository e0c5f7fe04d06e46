//! Brute-force verification path.
//!
//! Ground states are built as dense `2^L` real vectors, reduced by a literal
//! partial trace and diagonalized with a cyclic Jacobi solver. Nothing in
//! here touches the log-domain combinatorics of the analytic path; the two
//! meet only in [`suite`], where they are compared.
//!
//! Basis states are bit masks: bit `i` set means site `i` is spin up.
//! Arithmetic is real throughout, since every state and reduced matrix
//! involved is real symmetric.

mod density;
mod jacobi;
pub mod suite;

pub use density::{mixed_density, reduce, DensityMatrix};
pub use jacobi::{eigenvalues_by_magnetization, eigenvalues_symmetric};

use crate::{Error, Result};

/// Largest chain the oracle will allocate a dense state for.
pub const MAX_ORACLE_LENGTH: usize = 14;

/// Dense amplitude vector over all `2^L` spin configurations.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    length: usize,
    amplitudes: Vec<f64>,
}

impl StateVector {
    pub fn from_amplitudes(length: usize, amplitudes: Vec<f64>) -> Result<Self> {
        if length > MAX_ORACLE_LENGTH {
            return Err(Error::Oracle(format!(
                "chain length {length} exceeds the oracle limit {MAX_ORACLE_LENGTH}"
            )));
        }
        if amplitudes.len() != 1 << length {
            return Err(Error::Oracle(format!(
                "{} amplitudes for a chain of {length} sites",
                amplitudes.len()
            )));
        }
        Ok(StateVector { length, amplitudes })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum()
    }
}

/// Equal superposition of every configuration with `up` spins up, i.e. the
/// ground state `∝ (S^+)^N |↓…↓⟩` of the sector.
pub fn build_ground_state(length: usize, up: usize) -> Result<StateVector> {
    if length > MAX_ORACLE_LENGTH {
        return Err(Error::Oracle(format!(
            "chain length {length} exceeds the oracle limit {MAX_ORACLE_LENGTH}"
        )));
    }
    if up > length {
        return Err(Error::Oracle(format!(
            "up-spin count {up} exceeds chain length {length}"
        )));
    }
    let dim = 1usize << length;
    let count = (0..dim).filter(|s| s.count_ones() as usize == up).count();
    let amplitude = 1.0 / (count as f64).sqrt();
    let amplitudes = (0..dim)
        .map(|s| {
            if s.count_ones() as usize == up {
                amplitude
            } else {
                0.0
            }
        })
        .collect();
    Ok(StateVector { length, amplitudes })
}

/// Max-norm of `H ψ` for the periodic ferromagnet with `J = 1`.
///
/// Each bond contributes `-(σ_i·σ_{i+1} - 1)`, which annihilates the bond
/// triplet, so every state of the ground multiplet has energy exactly zero.
/// On a basis state `σ_i·σ_j` gives `±1` from `zz` and, when the two spins
/// differ, twice the state with them exchanged.
pub fn verify_zero_energy(state: &StateVector) -> f64 {
    let length = state.length;
    let psi = &state.amplitudes;
    let mut h_psi = vec![0.0; psi.len()];
    let bonds: Vec<(usize, usize)> = if length < 2 {
        Vec::new()
    } else {
        (0..length).map(|i| (i, (i + 1) % length)).collect()
    };
    for (s, &amp) in psi.iter().enumerate() {
        if amp == 0.0 {
            continue;
        }
        for &(i, j) in &bonds {
            let bi = (s >> i) & 1;
            let bj = (s >> j) & 1;
            if bi == bj {
                // zz = +1, exchange vanishes: -(1 - 1) = 0
                continue;
            }
            // zz = -1: diagonal -(-1 - 1) = 2; exchange term -2
            h_psi[s] += 2.0 * amp;
            let swapped = s ^ (1 << i) ^ (1 << j);
            h_psi[swapped] -= 2.0 * amp;
        }
    }
    h_psi.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Mask of the odd sites `1, 3, 5, …` of a chain of `length` sites.
pub fn staggered_mask(length: usize) -> usize {
    (0..length).filter(|i| i % 2 == 1).fold(0, |m, i| m | (1 << i))
}

/// Overturns every second spin. Maps the `Δ = -1` antiferromagnet onto the
/// ferromagnet; a product of local unitaries, so block entropies are unchanged.
pub fn staggered_flip(state: &StateVector) -> Result<StateVector> {
    if state.length % 2 != 0 {
        return Err(Error::Oracle(format!(
            "staggered flip needs an even chain, got L = {}",
            state.length
        )));
    }
    let mask = staggered_mask(state.length);
    let mut amplitudes = vec![0.0; state.amplitudes.len()];
    for (s, &a) in state.amplitudes.iter().enumerate() {
        amplitudes[s ^ mask] = a;
    }
    Ok(StateVector {
        length: state.length,
        amplitudes,
    })
}
