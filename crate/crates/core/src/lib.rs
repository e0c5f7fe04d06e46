//! Block entanglement entropy of the ferromagnetic spin-1/2 Heisenberg chain.
//!
//! The ground-state multiplet of the isotropic ferromagnet consists of the
//! symmetric (Dicke) states `|Ψ(L, N)⟩`, one per up-spin count `N`. Because
//! these states are permutation invariant, the reduced density matrix of any
//! block of `n` sites is diagonal in the symmetric block basis and its
//! eigenvalues are hypergeometric probabilities:
//!
//! ```text
//! λ_k(L, n, N) = binom(n, k) binom(L - n, N - k) / binom(L, N)
//! ```
//!
//! Modules:
//! - [`combinatorics`]: log-domain binomials and probability mass functions.
//! - [`spectrum`]: reduced-density-matrix spectra for every ensemble.
//! - [`entropy`]: Shannon/von Neumann entropy and the closed-form asymptotics.
//! - [`oracle`]: brute-force state vectors, partial traces and a Jacobi solver.
//! - [`scan`]: parameter sweeps and CSV output.
//! - [`cli`]: the `block-entropy` command-line front end.
//!
//! Binomials are written `binom(total, chosen)` throughout.

pub mod cli;
pub mod combinatorics;
pub mod entropy;
mod error;
pub mod oracle;
pub mod scan;
pub mod spectrum;

pub use combinatorics::{binomial_log_pmf, hypergeometric_log_pmf, log_binomial, LogProb};
pub use entropy::{
    asymptotic_entropy_finite, asymptotic_entropy_infinite, equal_weight_entropy,
    fit_log_prefactor, shannon_entropy_bits, AsymptoticEntropy, EntropyValue, LogFit,
};
pub use error::{Error, Result};
pub use spectrum::{
    equal_weight_spectrum, mixed_spectrum, sector_spectrum, thermodynamic_spectrum, Provenance,
    SectorSpec, Spectrum, WeightVector,
};
