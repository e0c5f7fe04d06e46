use super::DensityMatrix;
use crate::{Error, Result};

/// Sweeps stop once the off-diagonal Frobenius norm drops below this.
const OFF_DIAGONAL_TOLERANCE: f64 = 1e-13;
const MAX_SWEEPS: usize = 100;

fn off_diagonal_norm(a: &[f64], dim: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..dim {
        for j in i + 1..dim {
            sum += 2.0 * a[i * dim + j] * a[i * dim + j];
        }
    }
    sum.sqrt()
}

fn jacobi_in_place(a: &mut [f64], dim: usize) -> Result<()> {
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(a, dim) < OFF_DIAGONAL_TOLERANCE {
            return Ok(());
        }
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = a[p * dim + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * dim + p];
                let aqq = a[q * dim + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                a[p * dim + p] = app - t * apq;
                a[q * dim + q] = aqq + t * apq;
                a[p * dim + q] = 0.0;
                a[q * dim + p] = 0.0;
                for r in 0..dim {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = a[r * dim + p];
                    let arq = a[r * dim + q];
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    a[r * dim + p] = new_rp;
                    a[p * dim + r] = new_rp;
                    a[r * dim + q] = new_rq;
                    a[q * dim + r] = new_rq;
                }
            }
        }
    }
    if off_diagonal_norm(a, dim) < OFF_DIAGONAL_TOLERANCE {
        Ok(())
    } else {
        Err(Error::Oracle(format!(
            "Jacobi iteration did not converge in {MAX_SWEEPS} sweeps ({dim}x{dim})"
        )))
    }
}

fn sorted_diagonal(a: &[f64], dim: usize) -> Vec<f64> {
    let mut values: Vec<f64> = (0..dim).map(|i| a[i * dim + i]).collect();
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

/// All eigenvalues of a symmetric matrix, descending, by cyclic Jacobi
/// rotations.
pub fn eigenvalues_symmetric(m: &DensityMatrix) -> Result<Vec<f64>> {
    let dim = m.dim();
    let mut a = m.entries().to_vec();
    jacobi_in_place(&mut a, dim)?;
    Ok(sorted_diagonal(&a, dim))
}

/// Same result as [`eigenvalues_symmetric`], but diagonalizes each
/// fixed-magnetization block (block configurations of equal popcount)
/// separately when the matrix has no entries coupling different blocks.
/// Falls back to the full solver otherwise.
pub fn eigenvalues_by_magnetization(m: &DensityMatrix) -> Result<Vec<f64>> {
    let dim = m.dim();
    let couples = (0..dim).any(|i| {
        (0..dim).any(|j| i.count_ones() != j.count_ones() && m.get(i, j) != 0.0)
    });
    if couples {
        return eigenvalues_symmetric(m);
    }
    let bits = dim.trailing_zeros();
    let mut values = Vec::with_capacity(dim);
    for weight in 0..=bits {
        let idx: Vec<usize> = (0..dim).filter(|i| i.count_ones() == weight).collect();
        let k = idx.len();
        let mut sub: Vec<f64> = idx
            .iter()
            .flat_map(|&i| idx.iter().map(move |&j| m.get(i, j)))
            .collect();
        jacobi_in_place(&mut sub, k)?;
        values.extend((0..k).map(|i| sub[i * k + i]));
    }
    values.sort_by(|x, y| y.total_cmp(x));
    Ok(values)
}
