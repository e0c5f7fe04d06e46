//! Reduced-density-matrix spectra for the ground-state ensembles.
//!
//! Every reduced matrix of a block of `n` sites is diagonal in the same
//! symmetric block basis `|ψ(n, k)⟩`, `k = 0..=n`, so a spectrum is just a
//! vector indexed by the block up-spin count `k`. Entries outside a sector's
//! support are stored as explicit zeros; the vectors of different ensembles
//! are therefore directly comparable.

use rayon::prelude::*;

use crate::combinatorics::{
    binomial_log_pmf, hypergeometric_log_pmf_row, hypergeometric_support, LogProb,
};
use crate::{Error, Result};

/// Tolerance on `Σ α_N = 1` for a [`WeightVector`].
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Ground-state sector `(L, N)` together with a block size `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SectorSpec {
    length: u64,
    up: u64,
    block: u64,
}

impl SectorSpec {
    pub fn new(length: u64, up: u64, block: u64) -> Result<Self> {
        if length == 0 {
            return Err(Error::Domain("chain length must be positive".into()));
        }
        if up > length {
            return Err(Error::Domain(format!(
                "up-spin count {up} exceeds chain length {length}"
            )));
        }
        if block > length {
            return Err(Error::Domain(format!(
                "block size {block} exceeds chain length {length}"
            )));
        }
        Ok(SectorSpec { length, up, block })
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn up(&self) -> u64 {
        self.up
    }

    pub fn block(&self) -> u64 {
        self.block
    }

    /// Empty or full block: the spectrum is a point mass and `S = 0`.
    pub fn is_trivial_block(&self) -> bool {
        self.block == 0 || self.block == self.length
    }

    /// Filling `p = N / L`.
    pub fn filling(&self) -> f64 {
        self.up as f64 / self.length as f64
    }

    /// Magnetization per site `y = p - 1/2`.
    pub fn magnetization(&self) -> f64 {
        self.filling() - 0.5
    }

    /// Same sector, block replaced by its environment.
    pub fn complement(&self) -> Self {
        SectorSpec {
            block: self.length - self.block,
            ..*self
        }
    }

    /// Sector with every spin overturned.
    pub fn spin_flipped(&self) -> Self {
        SectorSpec {
            up: self.length - self.up,
            ..*self
        }
    }
}

/// Ensemble weights `α_0..α_L` over the ground-state multiplet.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    alphas: Vec<f64>,
}

impl WeightVector {
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidWeights("no weights given".into()));
        }
        if let Some((i, a)) = alphas
            .iter()
            .enumerate()
            .find(|(_, a)| !a.is_finite() || **a < 0.0)
        {
            return Err(Error::InvalidWeights(format!("alpha[{i}] = {a} is negative or not finite")));
        }
        let sum: f64 = alphas.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}, not 1")));
        }
        Ok(WeightVector { alphas })
    }

    /// Rescales `raw` to unit sum if it already sums to 1 within `tolerance`.
    pub fn normalized(raw: Vec<f64>, tolerance: f64) -> Result<Self> {
        let sum: f64 = raw.iter().sum();
        if !sum.is_finite() || (sum - 1.0).abs() > tolerance {
            return Err(Error::InvalidWeights(format!(
                "weights sum to {sum}, more than {tolerance:e} away from 1"
            )));
        }
        let scaled = raw.into_iter().map(|a| a / sum).collect::<Vec<_>>();
        // rescaling may leave the sum one ulp off; tolerate that here
        let rescaled: f64 = scaled.iter().sum();
        if (rescaled - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidWeights(format!("weights sum to {rescaled} after scaling")));
        }
        WeightVector::new(scaled)
    }

    /// All weight on the sector with `up` up-spins.
    pub fn delta(length: u64, up: u64) -> Result<Self> {
        if up > length {
            return Err(Error::Domain(format!(
                "up-spin count {up} exceeds chain length {length}"
            )));
        }
        let mut alphas = vec![0.0; length as usize + 1];
        alphas[up as usize] = 1.0;
        Ok(WeightVector { alphas })
    }

    /// Equal weight `1 / (L + 1)` on every sector.
    pub fn uniform(length: u64) -> Self {
        let m = length as usize + 1;
        WeightVector {
            alphas: vec![1.0 / m as f64; m],
        }
    }

    pub fn chain_length(&self) -> u64 {
        (self.alphas.len() - 1) as u64
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Sector,
    Mixed,
    EqualWeight,
    Thermodynamic,
    Oracle,
}

/// Eigenvalues of a reduced density matrix, stored as logarithms.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    log_values: Vec<LogProb>,
    provenance: Provenance,
}

impl Spectrum {
    pub fn from_log_values(log_values: Vec<LogProb>, provenance: Provenance) -> Self {
        Spectrum {
            log_values,
            provenance,
        }
    }

    /// Negative inputs (round-off from a numerical eigensolver) become zeros.
    pub fn from_probabilities(values: &[f64], provenance: Provenance) -> Self {
        Spectrum {
            log_values: values.iter().map(|&v| LogProb::from_prob(v)).collect(),
            provenance,
        }
    }

    pub fn log_values(&self) -> &[LogProb] {
        &self.log_values
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.log_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_values.is_empty()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.log_values.iter().map(|l| l.prob()).collect()
    }

    /// `|Σ λ_k - 1|`.
    pub fn normalization_error(&self) -> f64 {
        (self.log_values.iter().map(|l| l.prob()).sum::<f64>() - 1.0).abs()
    }

    pub fn nonzero_count(&self) -> usize {
        self.log_values.iter().filter(|l| !l.is_zero()).count()
    }

    /// Probabilities sorted descending.
    pub fn sorted_descending(&self) -> Vec<f64> {
        let mut v = self.probabilities();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

/// Exact spectrum of one sector: entry `k` is the hypergeometric probability
/// of finding `k` up-spins in the block.
pub fn sector_spectrum(spec: &SectorSpec) -> Result<Spectrum> {
    let row = hypergeometric_log_pmf_row(spec.length, spec.up, spec.block)?;
    Ok(Spectrum::from_log_values(row, Provenance::Sector))
}

#[derive(Clone, Copy)]
struct LogAccumulator {
    max: f64,
    sum: f64,
}

impl LogAccumulator {
    const EMPTY: LogAccumulator = LogAccumulator {
        max: f64::NEG_INFINITY,
        sum: 0.0,
    };

    fn push(&mut self, value: f64) {
        if value == f64::NEG_INFINITY {
            return;
        }
        if value > self.max {
            self.sum = self.sum * (self.max - value).exp() + 1.0;
            self.max = value;
        } else {
            self.sum += (value - self.max).exp();
        }
    }

    fn merge(mut self, other: LogAccumulator) -> LogAccumulator {
        if other.max == f64::NEG_INFINITY {
            return self;
        }
        if other.max > self.max {
            self.sum = self.sum * (self.max - other.max).exp() + other.sum;
            self.max = other.max;
        } else {
            self.sum += other.sum * (other.max - self.max).exp();
        }
        self
    }

    fn value(&self) -> LogProb {
        if self.max == f64::NEG_INFINITY {
            LogProb::ZERO
        } else {
            LogProb::new(self.max + self.sum.ln())
        }
    }
}

/// Spectrum of `Σ_N α_N ρ_n(N)`: entry `k` is `Σ_N α_N λ_k(L, n, N)`,
/// accumulated with a max-shifted log-sum-exp.
pub fn mixed_spectrum(length: u64, block: u64, weights: &WeightVector) -> Result<Spectrum> {
    let expected = length as usize + 1;
    if weights.alphas.len() != expected {
        return Err(Error::WeightLength {
            expected,
            got: weights.alphas.len(),
        });
    }
    // validates (length, block)
    SectorSpec::new(length.max(1), 0, block)?;
    let width = block as usize + 1;
    let accumulators = weights
        .alphas
        .par_iter()
        .enumerate()
        .filter(|(_, &a)| a > 0.0)
        .try_fold(
            || vec![LogAccumulator::EMPTY; width],
            |mut acc, (up, &alpha)| -> Result<Vec<LogAccumulator>> {
                let up = up as u64;
                let ln_alpha = alpha.ln();
                let row = hypergeometric_log_pmf_row(length, up, block)?;
                let (lo, hi) = hypergeometric_support(length, up, block);
                for k in lo as usize..=hi as usize {
                    acc[k].push(ln_alpha + row[k].ln());
                }
                Ok(acc)
            },
        )
        .try_reduce(
            || vec![LogAccumulator::EMPTY; width],
            |a, b| Ok(a.into_iter().zip(b).map(|(x, y)| x.merge(y)).collect()),
        )?;
    Ok(Spectrum::from_log_values(
        accumulators.iter().map(LogAccumulator::value).collect(),
        Provenance::Mixed,
    ))
}

/// Closed form for the equal-weight ensemble: `n + 1` entries of `1/(n + 1)`.
pub fn equal_weight_spectrum(block: u64) -> Spectrum {
    let value = LogProb::new(-((block + 1) as f64).ln());
    Spectrum::from_log_values(vec![value; block as usize + 1], Provenance::EqualWeight)
}

/// Thermodynamic-limit spectrum: the binomial distribution of `k` up-spins
/// among `n` sites at filling `p`.
pub fn thermodynamic_spectrum(block: u64, p: f64) -> Result<Spectrum> {
    let row = (0..=block as i64)
        .map(|k| binomial_log_pmf(block, p, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(Spectrum::from_log_values(row, Provenance::Thermodynamic))
}
