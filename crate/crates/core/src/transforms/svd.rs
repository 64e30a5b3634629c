//! Singular value decomposition of sparse operators.
//!
//! The matrix is split into connected components of its row/column
//! incidence graph and each block goes through one-sided (Hestenes) Jacobi.
//! Jacobi only rotates column pairs that are not already orthogonal, so
//! permutation-like blocks keep their unit singular vectors instead of an
//! arbitrary basis of the degenerate subspace. The conservative robustness
//! bound depends on that choice.

use super::operator::AffineOperator;
use crate::error::{Error, Result};

/// Largest operator dimension accepted by [`singular_spectrum`].
pub const DENSE_SVD_CAP: usize = 4096;

/// Singular values at or below `dim · σ_max · RANK_TOLERANCE_EPS` count as
/// zero.
pub const RANK_TOLERANCE_EPS: f64 = 64.0 * f64::EPSILON;

const MAX_SWEEPS: usize = 80;

/// One singular value with its left and right vectors, stored sparsely over
/// the rows and columns of the owning block.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularTriplet {
    pub value: f64,
    pub left: Vec<(usize, f64)>,
    pub right: Vec<(usize, f64)>,
}

/// `A = Σ σ_i u_i v_iᵀ`, sorted by descending `σ`. Only `min(rows, cols)`
/// of each block are listed; the remaining singular values are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub rows: usize,
    pub cols: usize,
    pub triplets: Vec<SingularTriplet>,
}

impl Decomposition {
    /// All `min(rows, cols)` singular values, descending.
    pub fn values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.triplets.iter().map(|t| t.value).collect();
        v.resize(self.rows.min(self.cols), 0.0);
        v
    }

    /// Row-major dense `Σ σ_i u_i v_iᵀ`.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.rows * self.cols];
        for t in &self.triplets {
            for &(r, u) in &t.left {
                for &(c, v) in &t.right {
                    dense[r * self.cols + c] += t.value * u * v;
                }
            }
        }
        dense
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Row and column index sets of each connected block, in order of first row.
fn components(op: &AffineOperator) -> Vec<(Vec<usize>, Vec<usize>)> {
    let m = op.out_dim();
    let mut parent: Vec<usize> = (0..m + op.in_dim()).collect();
    for &(r, c, _) in op.triplets() {
        let (a, b) = (find(&mut parent, r), find(&mut parent, m + c));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut slot = vec![usize::MAX; parent.len()];
    let mut blocks: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for i in 0..parent.len() {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = blocks.len();
            blocks.push((Vec::new(), Vec::new()));
        }
        let b = &mut blocks[slot[root]];
        if i < m {
            b.0.push(i);
        } else {
            b.1.push(i - m);
        }
    }
    blocks.retain(|(r, c)| !r.is_empty() && !c.is_empty());
    blocks
}

/// Jacobi on a column-major `m × n` block. Returns column norms, the
/// orthogonalised columns and the accumulated right rotations (column-major
/// `n × n`).
fn hestenes(a: &mut [f64], m: usize, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    // Columns this small relative to the whole block are numerically zero;
    // rotating them only chases rounding noise.
    let negligible = (f64::EPSILON * dot(a, a).sqrt()).powi(2);
    for _ in 0..MAX_SWEEPS {
        let mut norms: Vec<f64> = (0..n).map(|i| dot(&a[i * m..(i + 1) * m], &a[i * m..(i + 1) * m])).collect();
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let (alpha, beta) = (norms[i], norms[j]);
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let (head, tail) = a.split_at_mut(j * m);
                let (ai, aj) = (&mut head[i * m..(i + 1) * m], &mut tail[..m]);
                let gamma = dot(ai, aj);
                if gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(ai, aj, c, s);
                let (head, tail) = v.split_at_mut(j * n);
                rotate(&mut head[i * n..(i + 1) * n], &mut tail[..n], c, s);
                norms[i] = alpha - t * gamma;
                norms[j] = beta + t * gamma;
            }
        }
        if !rotated {
            let sigma = (0..n).map(|i| dot(&a[i * m..(i + 1) * m], &a[i * m..(i + 1) * m]).sqrt()).collect();
            return Ok((sigma, v));
        }
    }
    Err(Error::Numeric(format!("Jacobi SVD of a {m}x{n} block did not converge in {MAX_SWEEPS} sweeps")))
}

/// Dot product with independent partial sums so the loop vectorises.
fn dot(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = [0.0; 8];
    let (xc, yc) = (x.chunks_exact(8), y.chunks_exact(8));
    let tail: f64 = xc.remainder().iter().zip(yc.remainder()).map(|(p, q)| p * q).sum();
    for (p, q) in xc.zip(yc) {
        for k in 0..8 {
            acc[k] += p[k] * q[k];
        }
    }
    acc.iter().sum::<f64>() + tail
}

fn rotate(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (p, q) in x.iter_mut().zip(y.iter_mut()) {
        let (a, b) = (*p, *q);
        *p = c * a - s * b;
        *q = s * a + c * b;
    }
}

/// Full SVD of the operator's matrix (the bias is ignored).
///
/// Each connected block of the sparsity pattern is decomposed densely, so
/// block sizes rather than the full dimension are limited by
/// [`DENSE_SVD_CAP`].
pub fn decompose(op: &AffineOperator) -> Result<Decomposition> {
    let mut triplets = Vec::new();
    for (rows, cols) in components(op) {
        let (m, n) = (rows.len(), cols.len());
        if m.max(n) > DENSE_SVD_CAP {
            return Err(Error::ResourceLimit(format!(
                "a {m}x{n} block of {} exceeds the dense SVD cap {DENSE_SVD_CAP}",
                op.label()
            )));
        }
        let mut local_col = std::collections::HashMap::with_capacity(n);
        for (k, &c) in cols.iter().enumerate() {
            local_col.insert(c, k);
        }
        let mut a = vec![0.0; m * n];
        for (lr, &r) in rows.iter().enumerate() {
            for &(_, c, val) in op.row(r) {
                a[local_col[&c] * m + lr] = val;
            }
        }
        let (sigma, v) = hestenes(&mut a, m, n)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| sigma[y].total_cmp(&sigma[x]));
        for &k in order.iter().take(m.min(n)) {
            let s = sigma[k];
            if s == 0.0 {
                continue;
            }
            let left = rows
                .iter()
                .enumerate()
                .filter_map(|(lr, &r)| {
                    let u = a[k * m + lr] / s;
                    (u != 0.0).then_some((r, u))
                })
                .collect();
            let right = cols
                .iter()
                .enumerate()
                .filter_map(|(lc, &c)| {
                    let x = v[k * n + lc];
                    (x != 0.0).then_some((c, x))
                })
                .collect();
            triplets.push(SingularTriplet { value: s, left, right });
        }
    }
    triplets.sort_by(|x, y| y.value.total_cmp(&x.value));
    Ok(Decomposition { rows: op.out_dim(), cols: op.in_dim(), triplets })
}

/// Sorted singular values and the quantities derived from them.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    /// Descending, length `min(rows, cols)`.
    pub values: Vec<f64>,
    pub rank: usize,
    /// `∏ min(σ, 1)` over the nonzero values.
    pub xi: f64,
    pub log2_xi: f64,
    /// Product of the nonzero values.
    pub pseudo_determinant: f64,
    pub log2_pseudo_determinant: f64,
}

impl SingularSpectrum {
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        let tol = rank_tolerance(&values);
        let nonzero = || values.iter().copied().filter(|&s| s > tol);
        let rank = nonzero().count();
        let log2_xi: f64 = nonzero().map(|s| s.min(1.0).log2()).sum();
        let log2_pdet: f64 = nonzero().map(f64::log2).sum();
        Self {
            rank,
            xi: log2_xi.exp2(),
            log2_xi,
            pseudo_determinant: log2_pdet.exp2(),
            log2_pseudo_determinant: log2_pdet,
            values,
        }
    }

    pub fn tolerance(&self) -> f64 {
        rank_tolerance(&self.values)
    }

    /// The nonzero singular values, descending.
    pub fn nonzero(&self) -> &[f64] {
        &self.values[..self.rank]
    }
}

/// `dim · σ_max · RANK_TOLERANCE_EPS`.
pub fn rank_tolerance(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(0.0, f64::max);
    values.len() as f64 * max * RANK_TOLERANCE_EPS
}

/// Spectrum of a square operator of dimension at most `cap`.
pub fn singular_spectrum_capped(op: &AffineOperator, cap: usize) -> Result<SingularSpectrum> {
    if !op.is_square() {
        return Err(Error::InvalidArgument(format!(
            "spectrum needs a square operator, got {}x{}",
            op.out_dim(),
            op.in_dim()
        )));
    }
    if op.in_dim() > cap {
        return Err(Error::ResourceLimit(format!(
            "operator dimension {} exceeds the dense SVD cap {cap}",
            op.in_dim()
        )));
    }
    Ok(SingularSpectrum::from_values(decompose(op)?.values()))
}

pub fn singular_spectrum(op: &AffineOperator) -> Result<SingularSpectrum> {
    singular_spectrum_capped(op, DENSE_SVD_CAP)
}
