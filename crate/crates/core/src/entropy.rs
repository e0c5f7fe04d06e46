//! Block entropies in bits: the exact Shannon sum over a spectrum and the
//! closed-form Gaussian asymptotics for fixed-sector ground states.

use std::f64::consts::{E, LN_2, PI};
use std::fmt;

use crate::spectrum::{sector_spectrum, SectorSpec, Spectrum};
use crate::{Error, Result};

/// Largest `|Σ λ_k - 1|` accepted by [`shannon_entropy_bits`].
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Below this value of `n p q` the Gaussian approximation is flagged as
/// unreliable.
pub const NPQ_WARNING_THRESHOLD: f64 = 10.0;

/// An entropy in bits.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct EntropyValue {
    bits: f64,
}

impl EntropyValue {
    pub fn from_bits(bits: f64) -> Self {
        EntropyValue { bits }
    }

    pub fn bits(self) -> f64 {
        self.bits
    }
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.bits.fmt(f)
    }
}

/// `-Σ λ_k log2 λ_k`, with zero eigenvalues contributing nothing.
pub fn shannon_entropy_bits(spectrum: &Spectrum) -> Result<EntropyValue> {
    let deviation = spectrum.normalization_error();
    if !(deviation <= NORMALIZATION_TOLERANCE) {
        return Err(Error::Unnormalized(deviation));
    }
    let nats: f64 = spectrum
        .log_values()
        .iter()
        .filter(|l| !l.is_zero())
        .map(|l| -l.prob() * l.ln())
        .sum();
    // + 0.0 turns a -0.0 from a point mass into 0.0
    Ok(EntropyValue::from_bits(nats / LN_2 + 0.0))
}

/// Exact entropy of a block in a fixed sector.
pub fn sector_entropy(spec: &SectorSpec) -> Result<EntropyValue> {
    shannon_entropy_bits(&sector_spectrum(spec)?)
}

/// Closed-form estimate together with the size of `n p q` it was evaluated at.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticEntropy {
    pub value: EntropyValue,
    pub npq: f64,
}

impl AsymptoticEntropy {
    pub fn bits(&self) -> f64 {
        self.value.bits()
    }

    /// False when `n p q` is below [`NPQ_WARNING_THRESHOLD`].
    pub fn is_reliable(&self) -> bool {
        self.npq >= NPQ_WARNING_THRESHOLD
    }
}

fn check_filling(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::FillingOutOfRange(p))
    }
}

/// `C(y) = 2πe (1/4 - y^2)`, the magnetization form of `2πe p q`.
pub fn magnetization_factor(y: f64) -> f64 {
    2.0 * PI * E * (0.25 - y * y)
}

/// `½ log2(2πe p q) + ½ log2(n (L - n) / L)`.
pub fn asymptotic_entropy_finite(length: u64, block: u64, p: f64) -> Result<AsymptoticEntropy> {
    check_filling(p)?;
    if block == 0 || block >= length {
        return Err(Error::Domain(format!(
            "asymptotic entropy needs 1 <= n <= L - 1, got n = {block}, L = {length}"
        )));
    }
    let q = 1.0 - p;
    let n = block as f64;
    let l = length as f64;
    let bits = 0.5 * (2.0 * PI * E * p * q).log2() + 0.5 * (n * (l - n) / l).log2();
    Ok(AsymptoticEntropy {
        value: EntropyValue::from_bits(bits),
        npq: n * p * q,
    })
}

/// `½ log2(2πe p q) + ½ log2 n`, the `L → ∞` limit of
/// [`asymptotic_entropy_finite`].
pub fn asymptotic_entropy_infinite(block: u64, p: f64) -> Result<AsymptoticEntropy> {
    check_filling(p)?;
    if block == 0 {
        return Err(Error::Domain("asymptotic entropy needs n >= 1".into()));
    }
    let q = 1.0 - p;
    let n = block as f64;
    let bits = 0.5 * (2.0 * PI * E * p * q).log2() + 0.5 * n.log2();
    Ok(AsymptoticEntropy {
        value: EntropyValue::from_bits(bits),
        npq: n * p * q,
    })
}

/// `log2(n + 1)`, the entropy of the equal-weight ensemble and the upper
/// bound for any block of `n` sites.
pub fn equal_weight_entropy(block: u64) -> EntropyValue {
    EntropyValue::from_bits(((block + 1) as f64).log2())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogFit {
    /// Slope `γ` of `S = γ log2 n + c`.
    pub gamma: f64,
    pub constant: f64,
}

/// Ordinary least squares of `S` against `log2 n`.
pub fn fit_log_prefactor(points: &[(u64, f64)]) -> Result<LogFit> {
    if points.len() < 3 || points.iter().any(|&(n, _)| n < 2) {
        return Err(Error::DegenerateFit);
    }
    let mut sizes: Vec<u64> = points.iter().map(|&(n, _)| n).collect();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() != points.len() {
        return Err(Error::DegenerateFit);
    }
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).log2()).collect();
    let x_mean = xs.iter().sum::<f64>() / m;
    let y_mean = points.iter().map(|&(_, s)| s).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, &(_, y)) in xs.iter().zip(points) {
        sxy += (x - x_mean) * (y - y_mean);
        sxx += (x - x_mean) * (x - x_mean);
    }
    let gamma = sxy / sxx;
    Ok(LogFit {
        gamma,
        constant: y_mean - gamma * x_mean,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::LogProb;
    use crate::spectrum::{equal_weight_spectrum, Provenance};

    #[test]
    fn shannon_examples() {
        let pure = Spectrum::from_log_values(vec![LogProb::ONE], Provenance::Sector);
        assert_eq!(shannon_entropy_bits(&pure).unwrap().bits(), 0.0);
        let half = Spectrum::from_probabilities(&[0.5, 0.5], Provenance::Sector);
        assert!((shannon_entropy_bits(&half).unwrap().bits() - 1.0).abs() < 1e-15);
        let s = sector_entropy(&SectorSpec::new(4, 2, 2).unwrap()).unwrap();
        let expected = 6f64.log2() / 3.0 + 2.0 / 3.0 * 1.5f64.log2();
        assert!((s.bits() - expected).abs() < 1e-14);
        assert!((s.bits() - 1.251_629_167_387_823).abs() < 1e-12);
    }

    #[test]
    fn zero_entries_are_skipped() {
        let s = Spectrum::from_probabilities(&[0.5, 0.0, 0.5, 0.0], Provenance::Oracle);
        assert!((shannon_entropy_bits(&s).unwrap().bits() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_spectrum_is_rejected() {
        let s = Spectrum::from_probabilities(&[0.5, 0.4], Provenance::Oracle);
        assert!(matches!(shannon_entropy_bits(&s), Err(Error::Unnormalized(_))));
    }

    #[test]
    fn equal_weight_examples() {
        assert_eq!(equal_weight_entropy(0).bits(), 0.0);
        assert_eq!(equal_weight_entropy(1).bits(), 1.0);
        assert_eq!(equal_weight_entropy(7).bits(), 3.0);
        let from_spectrum = shannon_entropy_bits(&equal_weight_spectrum(7)).unwrap();
        assert!((from_spectrum.bits() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn finite_asymptotic_example() {
        let a = asymptotic_entropy_finite(200, 100, 0.5).unwrap();
        let expected = 0.5 * (PI * E / 2.0).log2() + 0.5 * 50f64.log2();
        assert!((a.bits() - expected).abs() < 1e-14);
        assert!((a.bits() - 3.869).abs() < 5e-4);
        assert!(a.is_reliable());
    }

    #[test]
    fn magnetization_form_agrees() {
        for &(l, n, p) in &[(200u64, 37u64, 0.1), (50, 25, 0.5), (1000, 10, 0.73)] {
            let y = p - 0.5;
            let direct = asymptotic_entropy_finite(l, n, p).unwrap().bits();
            let nn = n as f64;
            let via_c = 0.5 * (nn * (l as f64 - nn) / l as f64 * magnetization_factor(y)).log2();
            assert!((direct - via_c).abs() < 1e-13);
        }
    }

    #[test]
    fn finite_minus_infinite_is_length_factor() {
        for l in [10u64, 100, 10_000, 1_000_000] {
            let d = asymptotic_entropy_finite(l, 7, 0.3).unwrap().bits()
                - asymptotic_entropy_infinite(7, 0.3).unwrap().bits();
            let expected = 0.5 * ((l - 7) as f64 / l as f64).log2();
            assert!((d - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn infinite_asymptotic_examples() {
        let a = asymptotic_entropy_infinite(1000, 0.5).unwrap();
        assert!((a.bits() - 6.030).abs() < 5e-4);
        for n in [1u64, 10, 1000] {
            let d = asymptotic_entropy_infinite(n, 0.5).unwrap().bits()
                - asymptotic_entropy_infinite(n, 0.1).unwrap().bits();
            assert!((d - 0.5 * (25.0f64 / 9.0).log2()).abs() < 1e-13);
        }
        assert!(!asymptotic_entropy_infinite(100, 0.01).unwrap().is_reliable());
    }

    #[test]
    fn asymptotics_reject_bad_input() {
        assert!(asymptotic_entropy_finite(10, 5, 0.0).is_err());
        assert!(asymptotic_entropy_finite(10, 5, 1.0).is_err());
        assert!(asymptotic_entropy_finite(10, 0, 0.5).is_err());
        assert!(asymptotic_entropy_finite(10, 10, 0.5).is_err());
        assert!(asymptotic_entropy_infinite(0, 0.5).is_err());
        assert!(asymptotic_entropy_infinite(3, -0.2).is_err());
    }

    #[test]
    fn fit_recovers_exact_linear_form() {
        let points: Vec<(u64, f64)> = (1..=10)
            .map(|i| {
                let n = 100 * i;
                (n, asymptotic_entropy_infinite(n, 0.5).unwrap().bits())
            })
            .collect();
        let fit = fit_log_prefactor(&points).unwrap();
        assert!((fit.gamma - 0.5).abs() < 1e-12);
        assert!((fit.constant - 0.5 * (PI * E / 2.0).log2()).abs() < 1e-11);
    }

    #[test]
    fn fit_rejects_degenerate_input() {
        assert!(fit_log_prefactor(&[(2, 1.0), (3, 1.5)]).is_err());
        assert!(fit_log_prefactor(&[(2, 1.0), (2, 1.5), (4, 2.0)]).is_err());
        assert!(fit_log_prefactor(&[(1, 1.0), (2, 1.5), (4, 2.0)]).is_err());
    }
}
