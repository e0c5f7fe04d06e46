//! The oracle sweep: brute-force reduced matrices compared against the
//! analytic spectra over every small chain, plus the Hamiltonian and
//! symmetry checks.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use super::{
    build_ground_state, eigenvalues_by_magnetization, eigenvalues_symmetric, mixed_density,
    reduce, staggered_flip, verify_zero_energy, DensityMatrix, StateVector, MAX_ORACLE_LENGTH,
};
use crate::entropy::shannon_entropy_bits;
use crate::spectrum::{
    equal_weight_spectrum, mixed_spectrum, sector_spectrum, Provenance, SectorSpec, Spectrum,
    WeightVector,
};
use crate::{Error, Result};

pub const EIGENVALUE_TOLERANCE: f64 = 1e-10;
pub const ENTROPY_TOLERANCE: f64 = 1e-9;
pub const RANK_THRESHOLD: f64 = 1e-10;
pub const ENERGY_TOLERANCE: f64 = 1e-12;
pub const FLIP_ENTROPY_TOLERANCE: f64 = 1e-12;
const SYMMETRY_TOLERANCE: f64 = 1e-13;
const TRACE_TOLERANCE: f64 = 1e-12;
const PSD_TOLERANCE: f64 = 1e-10;
const MAX_REPORTED_FAILURES: usize = 8;

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Largest chain for the sector-state families.
    pub max_length: usize,
    /// Largest chain for the mixed-ensemble and staggered-flip families.
    pub max_mixed_length: usize,
    /// Random weight vectors per chain length in the mixed family.
    pub mixed_trials: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            max_length: 12,
            max_mixed_length: 10,
            mixed_trials: 5,
            seed: 0x5eed_f00d,
        }
    }
}

impl SuiteConfig {
    pub fn with_max_length(max_length: usize) -> Self {
        SuiteConfig {
            max_length,
            max_mixed_length: max_length.min(10),
            ..SuiteConfig::default()
        }
    }
}

/// Outcome of one family of checks.
#[derive(Clone, Debug)]
pub struct FamilyReport {
    pub name: &'static str,
    pub checks: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub failures: Vec<String>,
    failure_count: usize,
}

impl FamilyReport {
    fn new(name: &'static str, tolerance: f64) -> Self {
        FamilyReport {
            name,
            checks: 0,
            max_deviation: 0.0,
            tolerance,
            failures: Vec::new(),
            failure_count: 0,
        }
    }

    fn record(&mut self, deviation: f64, context: impl FnOnce() -> String) {
        self.checks += 1;
        if deviation.is_nan() {
            self.max_deviation = f64::NAN;
        } else if !self.max_deviation.is_nan() {
            self.max_deviation = self.max_deviation.max(deviation);
        }
        if !(deviation <= self.tolerance) {
            self.failure_count += 1;
            if self.failures.len() < MAX_REPORTED_FAILURES {
                self.failures
                    .push(format!("{}: deviation {deviation:e}", context()));
            }
        }
    }

    fn absorb(&mut self, checks: impl IntoIterator<Item = (f64, String)>) {
        for (deviation, context) in checks {
            self.record(deviation, || context);
        }
    }

    pub fn failure_count(&self) -> usize {
        self.failure_count
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0 && self.checks > 0
    }
}

fn full_mask(length: usize) -> usize {
    (1usize << length) - 1
}

/// Whether the sites of `mask` form one run on the ring of `length` sites.
pub fn is_cyclic_interval(mask: usize, length: usize) -> bool {
    let changes = (0..length)
        .filter(|&i| (mask >> i & 1) != (mask >> ((i + 1) % length) & 1))
        .count();
    changes <= 2
}

/// The `length` rotations of the block `{0, …, size - 1}` around the ring.
pub fn contiguous_blocks(length: usize, size: usize) -> Vec<usize> {
    let base = (1usize << size) - 1;
    let mut masks: Vec<usize> = (0..length)
        .map(|start| ((base << start) | (base >> (length - start))) & full_mask(length))
        .collect();
    masks.sort_unstable();
    masks.dedup();
    masks
}

/// A random block of `size` sites, non-contiguous whenever the ring admits one.
pub fn random_block<R: Rng>(rng: &mut R, length: usize, size: usize) -> usize {
    let can_split = size >= 2 && size + 2 <= length;
    loop {
        let mask = rand::seq::index::sample(rng, length, size)
            .iter()
            .fold(0usize, |m, i| m | (1 << i));
        if !can_split || !is_cyclic_interval(mask, length) {
            return mask;
        }
    }
}

fn case_rng(seed: u64, tag: u64, length: usize, extra: usize) -> StdRng {
    StdRng::seed_from_u64(
        seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15)
            ^ ((length as u64) << 32)
            ^ extra as u64,
    )
}

/// Descending comparison of two spectra, zero-padded to equal length.
fn max_sorted_difference(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(|x, y| y.total_cmp(x));
    b.sort_by(|x, y| y.total_cmp(x));
    let len = a.len().max(b.len());
    a.resize(len, 0.0);
    b.resize(len, 0.0);
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn oracle_entropy(eigenvalues: &[f64]) -> Result<f64> {
    Ok(shannon_entropy_bits(&Spectrum::from_probabilities(eigenvalues, Provenance::Oracle))?.bits())
}

fn density_invariant_deviation(rho: &DensityMatrix, eigenvalues: &[f64]) -> f64 {
    let min_eig = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    // scaled so that each invariant's own tolerance maps onto 1
    let asym = rho.asymmetry() / SYMMETRY_TOLERANCE;
    let trace = (rho.trace() - 1.0).abs() / TRACE_TOLERANCE;
    let psd = (-min_eig).max(0.0) / PSD_TOLERANCE;
    asym.max(trace).max(psd)
}

/// Deviation of `ρ` from `Σ_k c_k |ψ(n,k)⟩⟨ψ(n,k)|`: every entry inside a
/// fixed-popcount block must be equal and every entry outside must vanish.
fn symmetric_block_deviation(rho: &DensityMatrix) -> f64 {
    let dim = rho.dim();
    let bits = dim.trailing_zeros();
    let mut worst = 0.0f64;
    for weight in 0..=bits {
        let idx: Vec<usize> = (0..dim).filter(|i| i.count_ones() == weight).collect();
        let reference = rho.get(idx[0], idx[0]);
        for &i in &idx {
            for &j in &idx {
                worst = worst.max((rho.get(i, j) - reference).abs());
            }
        }
    }
    for i in 0..dim {
        for j in 0..dim {
            if i.count_ones() != j.count_ones() {
                worst = worst.max(rho.get(i, j).abs());
            }
        }
    }
    worst
}

struct SectorCase {
    length: usize,
    up: usize,
    masks: Vec<usize>,
}

fn sector_cases(config: &SuiteConfig) -> Vec<SectorCase> {
    let mut cases = Vec::new();
    for length in 2..=config.max_length {
        let mut masks = Vec::new();
        for size in 1..length {
            masks.extend(contiguous_blocks(length, size));
            let mut rng = case_rng(config.seed, 1, length, size);
            masks.push(random_block(&mut rng, length, size));
        }
        masks.sort_unstable();
        masks.dedup();
        for up in 0..=length {
            cases.push(SectorCase {
                length,
                up,
                masks: masks.clone(),
            });
        }
    }
    cases
}

#[derive(Default)]
struct SectorOutcome {
    eigen: Vec<(f64, String)>,
    entropy: Vec<(f64, String)>,
    rank: Vec<(f64, String)>,
    structure: Vec<(f64, String)>,
    invariants: Vec<(f64, String)>,
}

fn run_sector_case(case: &SectorCase) -> Result<SectorOutcome> {
    let (length, up) = (case.length, case.up);
    let state = build_ground_state(length, up)?;
    let mut out = SectorOutcome::default();
    for &mask in &case.masks {
        let size = mask.count_ones() as usize;
        let label = || format!("L={length} N={up} block={mask:0width$b}", width = length);
        // a pure state and its environment share their nonzero spectrum;
        // reduce onto the smaller side
        let reduced_mask = if 2 * size > length {
            mask ^ full_mask(length)
        } else {
            mask
        };
        let rho = reduce(&state, reduced_mask)?;
        let oracle = eigenvalues_by_magnetization(&rho)?;
        let spec = SectorSpec::new(length as u64, up as u64, size as u64)?;
        let analytic = sector_spectrum(&spec)?;

        out.eigen.push((
            max_sorted_difference(oracle.clone(), analytic.probabilities()),
            label(),
        ));
        let s_oracle = oracle_entropy(&oracle)?;
        let s_analytic = shannon_entropy_bits(&analytic)?.bits();
        out.entropy.push(((s_oracle - s_analytic).abs(), label()));

        let rank = oracle.iter().filter(|&&v| v > RANK_THRESHOLD).count();
        out.rank.push((
            if rank <= size + 1 { 0.0 } else { 1.0 },
            format!("{} rank {rank} > n + 1 = {}", label(), size + 1),
        ));
        out.invariants
            .push((density_invariant_deviation(&rho, &oracle), label()));
        if reduced_mask == mask {
            out.structure.push((symmetric_block_deviation(&rho), label()));
        }
    }
    Ok(out)
}

/// Oracle eigenvalues and entropies against the hypergeometric spectrum for
/// every sector, every contiguous block and one random block per size.
///
/// Returns reports for: eigenvalues, entropies, rank bound, symmetric block
/// structure and density-matrix invariants.
pub fn sector_families(config: &SuiteConfig) -> Result<Vec<FamilyReport>> {
    check_config(config)?;
    let outcomes = sector_cases(config)
        .par_iter()
        .map(run_sector_case)
        .collect::<Result<Vec<_>>>()?;
    let mut eigen = FamilyReport::new("theorem: oracle eigenvalues = hypergeometric", EIGENVALUE_TOLERANCE);
    let mut entropy = FamilyReport::new("theorem: oracle entropy = Shannon entropy", ENTROPY_TOLERANCE);
    let mut rank = FamilyReport::new("rank bound: at most n + 1 nonzero eigenvalues", 0.5);
    let mut structure = FamilyReport::new(
        "block structure: rho = sum_k c_k |psi(n,k)><psi(n,k)|",
        SYMMETRY_TOLERANCE,
    );
    let mut invariants = FamilyReport::new("density matrix: symmetric, unit trace, PSD", 1.0);
    for o in outcomes {
        eigen.absorb(o.eigen);
        entropy.absorb(o.entropy);
        rank.absorb(o.rank);
        structure.absorb(o.structure);
        invariants.absorb(o.invariants);
    }
    Ok(vec![eigen, entropy, rank, structure, invariants])
}

/// A random weight vector with exponentially distributed raw weights.
pub fn random_weights<R: Rng>(rng: &mut R, length: usize) -> WeightVector {
    let raw: Vec<f64> = (0..=length)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let sum: f64 = raw.iter().sum();
    WeightVector::normalized(raw.iter().map(|r| r / sum).collect(), 1e-9)
        .expect("exponential weights normalize")
}

struct MixedCase {
    length: usize,
    weights: WeightVector,
    uniform: bool,
    masks: Vec<usize>,
}

/// Mixed-ensemble oracle checks: `mixed_density` against `mixed_spectrum`
/// for random weight vectors, and the uniform ensemble against the
/// `1/(n + 1)` closed form.
///
/// Returns reports for: eigenvalues, entropies, equal-weight law and rank bound.
pub fn mixed_families(config: &SuiteConfig) -> Result<Vec<FamilyReport>> {
    check_config(config)?;
    let mut cases = Vec::new();
    for length in 2..=config.max_mixed_length.min(config.max_length) {
        let mut masks = Vec::new();
        for size in 1..length {
            masks.push((1usize << size) - 1);
            let mut rng = case_rng(config.seed, 2, length, size);
            masks.push(random_block(&mut rng, length, size));
        }
        masks.sort_unstable();
        masks.dedup();
        let mut rng = case_rng(config.seed, 3, length, 0);
        for _ in 0..config.mixed_trials {
            cases.push(MixedCase {
                length,
                weights: random_weights(&mut rng, length),
                uniform: false,
                masks: masks.clone(),
            });
        }
        cases.push(MixedCase {
            length,
            weights: WeightVector::uniform(length as u64),
            uniform: true,
            masks,
        });
    }
    let jobs: Vec<(&MixedCase, usize)> = cases
        .iter()
        .flat_map(|c| c.masks.iter().map(move |&m| (c, m)))
        .collect();
    let outcomes = jobs
        .par_iter()
        .map(|&(case, mask)| -> Result<_> {
            let size = mask.count_ones() as u64;
            let rho = mixed_density(case.length, &case.weights, mask)?;
            let oracle = eigenvalues_by_magnetization(&rho)?;
            let analytic = mixed_spectrum(case.length as u64, size, &case.weights)?;
            let label = format!(
                "L={} block={mask:0width$b}{}",
                case.length,
                if case.uniform { " uniform" } else { "" },
                width = case.length
            );
            let eig = max_sorted_difference(oracle.clone(), analytic.probabilities());
            let ent = (oracle_entropy(&oracle)? - shannon_entropy_bits(&analytic)?.bits()).abs();
            let rank = oracle.iter().filter(|&&v| v > RANK_THRESHOLD).count();
            let rank_ok = if rank as u64 <= size + 1 { 0.0 } else { 1.0 };
            let equal = case.uniform.then(|| {
                max_sorted_difference(oracle.clone(), equal_weight_spectrum(size).probabilities())
            });
            Ok((label, eig, ent, rank_ok, equal))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut eigen = FamilyReport::new("mixed ensemble: oracle eigenvalues = mixed spectrum", EIGENVALUE_TOLERANCE);
    let mut entropy = FamilyReport::new("mixed ensemble: oracle entropy = Shannon entropy", ENTROPY_TOLERANCE);
    let mut equal = FamilyReport::new("equal-weight law: oracle eigenvalues = 1/(n+1)", EIGENVALUE_TOLERANCE);
    let mut rank = FamilyReport::new("mixed rank bound: at most n + 1 nonzero eigenvalues", 0.5);
    for (label, eig, ent, rank_ok, eq) in outcomes {
        eigen.record(eig, || label.clone());
        entropy.record(ent, || label.clone());
        rank.record(rank_ok, || label.clone());
        if let Some(d) = eq {
            equal.record(d, || label.clone());
        }
    }
    Ok(vec![eigen, entropy, equal, rank])
}

/// `‖H ψ‖_∞` for every sector state up to the configured length.
pub fn zero_energy_family(config: &SuiteConfig) -> Result<FamilyReport> {
    check_config(config)?;
    let states: Vec<(usize, usize)> = (1..=config.max_length)
        .flat_map(|l| (0..=l).map(move |n| (l, n)))
        .collect();
    let residuals = states
        .par_iter()
        .map(|&(l, n)| Ok((verify_zero_energy(&build_ground_state(l, n)?), format!("L={l} N={n}"))))
        .collect::<Result<Vec<_>>>()?;
    let mut report = FamilyReport::new("zero energy: |H psi| for every sector state", ENERGY_TOLERANCE);
    report.absorb(residuals);
    Ok(report)
}

fn full_entropy(state: &StateVector, mask: usize) -> Result<f64> {
    oracle_entropy(&eigenvalues_symmetric(&reduce(state, mask)?)?)
}

/// Block entropies before and after overturning every second spin.
pub fn staggered_flip_family(config: &SuiteConfig) -> Result<FamilyReport> {
    check_config(config)?;
    let mut jobs = Vec::new();
    for length in (2..=config.max_mixed_length.min(config.max_length)).step_by(2) {
        for size in 1..=length / 2 {
            let mut rng = case_rng(config.seed, 4, length, size);
            let mut masks = vec![(1usize << size) - 1, random_block(&mut rng, length, size)];
            masks.dedup();
            for up in 0..=length {
                for &mask in &masks {
                    jobs.push((length, up, mask));
                }
            }
        }
    }
    let deviations = jobs
        .par_iter()
        .map(|&(length, up, mask)| {
            let state = build_ground_state(length, up)?;
            let flipped = staggered_flip(&state)?;
            let d = (full_entropy(&state, mask)? - full_entropy(&flipped, mask)?).abs();
            Ok((d, format!("L={length} N={up} block={mask:0width$b}", width = length)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = FamilyReport::new("staggered flip: block entropy unchanged", FLIP_ENTROPY_TOLERANCE);
    report.absorb(deviations);
    Ok(report)
}

fn check_config(config: &SuiteConfig) -> Result<()> {
    if config.max_length > MAX_ORACLE_LENGTH {
        return Err(Error::Oracle(format!(
            "max length {} exceeds the oracle limit {MAX_ORACLE_LENGTH}",
            config.max_length
        )));
    }
    Ok(())
}

/// Every family, in a fixed order.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<FamilyReport>> {
    let mut reports = sector_families(config)?;
    reports.extend(mixed_families(config)?);
    reports.push(zero_energy_family(config)?);
    reports.push(staggered_flip_family(config)?);
    Ok(reports)
}
