use super::{build_ground_state, StateVector};
use crate::spectrum::WeightVector;
use crate::{Error, Result};

/// Dense real symmetric `2^n × 2^n` matrix, row-major.
///
/// Row/column index `a` is a block configuration: bit `j` of `a` is the spin
/// on the `j`-th lowest site of the block.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl DensityMatrix {
    pub fn from_entries(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Oracle(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        Ok(DensityMatrix { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|m_ij - m_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    fn add_scaled(&mut self, other: &DensityMatrix, weight: f64) {
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += weight * b;
        }
    }
}

fn site_list(mask: usize, length: usize) -> Vec<usize> {
    (0..length).filter(|i| mask >> i & 1 == 1).collect()
}

/// Scatters the bits of `index` onto `sites`.
fn deposit(index: usize, sites: &[usize]) -> usize {
    sites
        .iter()
        .enumerate()
        .fold(0, |acc, (j, &site)| acc | ((index >> j & 1) << site))
}

fn check_block(length: usize, block_mask: usize) -> Result<()> {
    let full = (1usize << length) - 1;
    if block_mask & !full != 0 {
        return Err(Error::Oracle(format!(
            "block mask {block_mask:#b} has sites outside a chain of {length}"
        )));
    }
    if block_mask == 0 || block_mask == full {
        return Err(Error::Oracle(
            "cannot reduce onto an empty or full block".into(),
        ));
    }
    Ok(())
}

/// Partial trace over the sites outside `block_mask`:
/// `ρ[a][b] = Σ_e ψ(a ⊕ e) ψ(b ⊕ e)`.
pub fn reduce(state: &StateVector, block_mask: usize) -> Result<DensityMatrix> {
    let length = state.length();
    check_block(length, block_mask)?;
    let block_sites = site_list(block_mask, length);
    let env_sites = site_list(!block_mask & ((1 << length) - 1), length);
    let dim = 1usize << block_sites.len();
    let env_dim = 1usize << env_sites.len();
    let block_part: Vec<usize> = (0..dim).map(|a| deposit(a, &block_sites)).collect();
    let env_part: Vec<usize> = (0..env_dim).map(|e| deposit(e, &env_sites)).collect();

    // M[a][e] = ψ(a ⊕ e); ρ = M Mᵀ
    let psi = state.amplitudes();
    let m: Vec<f64> = block_part
        .iter()
        .flat_map(|&a| env_part.iter().map(move |&e| psi[a | e]))
        .collect();
    let mut entries = vec![0.0; dim * dim];
    for a in 0..dim {
        let row_a = &m[a * env_dim..(a + 1) * env_dim];
        if row_a.iter().all(|&x| x == 0.0) {
            continue;
        }
        for b in a..dim {
            let row_b = &m[b * env_dim..(b + 1) * env_dim];
            let v: f64 = row_a.iter().zip(row_b).map(|(x, y)| x * y).sum();
            entries[a * dim + b] = v;
            entries[b * dim + a] = v;
        }
    }
    Ok(DensityMatrix { dim, entries })
}

/// `Σ_N α_N tr_env |Ψ(L, N)⟩⟨Ψ(L, N)|`.
pub fn mixed_density(
    length: usize,
    weights: &WeightVector,
    block_mask: usize,
) -> Result<DensityMatrix> {
    if weights.alphas().len() != length + 1 {
        return Err(Error::WeightLength {
            expected: length + 1,
            got: weights.alphas().len(),
        });
    }
    check_block(length, block_mask)?;
    let dim = 1usize << block_mask.count_ones();
    let mut rho = DensityMatrix {
        dim,
        entries: vec![0.0; dim * dim],
    };
    for (up, &alpha) in weights.alphas().iter().enumerate() {
        if alpha == 0.0 {
            continue;
        }
        let sector = reduce(&build_ground_state(length, up)?, block_mask)?;
        rho.add_scaled(&sector, alpha);
    }
    Ok(rho)
}
