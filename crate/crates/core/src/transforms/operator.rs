//! Sparse affine operators `f(x) = A x + b` on flattened images.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::format::Image;

/// An affine map from `in_dim` to `out_dim` reals.
///
/// The matrix is kept as `(row, col, value)` triplets sorted by row and then
/// column, with no duplicates and no stored zeros. Row offsets are derived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorRepr", into = "OperatorRepr")]
pub struct AffineOperator {
    label: String,
    in_dim: usize,
    out_dim: usize,
    entries: Vec<(usize, usize, f64)>,
    row_start: Vec<usize>,
    bias: Vec<f64>,
}

/// The JSON form: `{label, in_dim, out_dim, triplets, bias}`.
#[derive(Serialize, Deserialize)]
struct OperatorRepr {
    label: String,
    in_dim: usize,
    out_dim: usize,
    triplets: Vec<(usize, usize, f64)>,
    bias: Vec<f64>,
}

impl TryFrom<OperatorRepr> for AffineOperator {
    type Error = Error;

    fn try_from(r: OperatorRepr) -> Result<Self> {
        AffineOperator::new(r.label, r.in_dim, r.out_dim, r.triplets, r.bias)
    }
}

impl From<AffineOperator> for OperatorRepr {
    fn from(op: AffineOperator) -> Self {
        OperatorRepr { label: op.label, in_dim: op.in_dim, out_dim: op.out_dim, triplets: op.entries, bias: op.bias }
    }
}

impl AffineOperator {
    /// Builds an operator from unordered triplets. Duplicate positions and
    /// out-of-range indices are rejected; explicit zeros are dropped.
    pub fn new(
        label: impl Into<String>,
        in_dim: usize,
        out_dim: usize,
        mut triplets: Vec<(usize, usize, f64)>,
        bias: Vec<f64>,
    ) -> Result<Self> {
        if bias.len() != out_dim {
            return invalid(format!("bias has length {}, expected {out_dim}", bias.len()));
        }
        if let Some(&(r, c, _)) = triplets.iter().find(|&&(r, c, _)| r >= out_dim || c >= in_dim) {
            return invalid(format!("entry ({r}, {c}) outside a {out_dim}x{in_dim} matrix"));
        }
        if let Some(&(r, c, v)) = triplets.iter().find(|t| !t.2.is_finite()) {
            return invalid(format!("entry ({r}, {c}) is not finite: {v}"));
        }
        if bias.iter().any(|b| !b.is_finite()) {
            return invalid("bias is not finite");
        }
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        if let Some(w) = triplets.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return invalid(format!("duplicate entry at ({}, {})", w[0].0, w[0].1));
        }
        triplets.retain(|t| t.2 != 0.0);
        Ok(Self::from_sorted(label.into(), in_dim, out_dim, triplets, bias))
    }

    fn from_sorted(
        label: String,
        in_dim: usize,
        out_dim: usize,
        entries: Vec<(usize, usize, f64)>,
        bias: Vec<f64>,
    ) -> Self {
        let mut row_start = vec![0; out_dim + 1];
        for &(r, _, _) in &entries {
            row_start[r + 1] += 1;
        }
        for i in 0..out_dim {
            row_start[i + 1] += row_start[i];
        }
        Self { label, in_dim, out_dim, entries, row_start, bias }
    }

    pub fn identity(dim: usize) -> Self {
        let entries = (0..dim).map(|i| (i, i, 1.0)).collect();
        Self::from_sorted("identity".into(), dim, dim, entries, vec![0.0; dim])
    }

    /// `diag(values)` with zero bias.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let entries = values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::new("diagonal", values.len(), values.len(), entries, vec![0.0; values.len()])
    }

    /// `x ↦ x + shift`.
    pub fn translation(shift: Vec<f64>) -> Result<Self> {
        let dim = shift.len();
        let entries = (0..dim).map(|i| (i, i, 1.0)).collect();
        Self::new("translation", dim, dim, entries, shift)
    }

    /// From a row-major dense matrix.
    pub fn from_dense(rows: usize, cols: usize, matrix: &[f64], bias: Vec<f64>) -> Result<Self> {
        if matrix.len() != rows * cols {
            return invalid(format!("dense matrix has {} entries, expected {}", matrix.len(), rows * cols));
        }
        let entries = matrix.iter().enumerate().map(|(i, &v)| (i / cols, i % cols, v)).collect();
        Self::new("dense", cols, rows, entries, bias)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn is_square(&self) -> bool {
        self.in_dim == self.out_dim
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn triplets(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    /// The stored entries of one row, sorted by column.
    pub fn row(&self, r: usize) -> &[(usize, usize, f64)] {
        &self.entries[self.row_start[r]..self.row_start[r + 1]]
    }

    /// Row-major dense copy of the matrix.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut dense = vec![0.0; self.out_dim * self.in_dim];
        for &(r, c, v) in &self.entries {
            dense[r * self.in_dim + c] = v;
        }
        dense
    }

    /// `A x + b`.
    pub fn act(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.in_dim {
            return invalid(format!("input has length {}, operator expects {}", x.len(), self.in_dim));
        }
        Ok((0..self.out_dim)
            .map(|r| self.bias[r] + self.row(r).iter().map(|&(_, c, v)| v * x[c]).sum::<f64>())
            .collect())
    }

    /// Left-to-right composition: `self` first, then `next`.
    pub fn then(&self, next: &AffineOperator) -> Result<AffineOperator> {
        if self.out_dim != next.in_dim {
            return invalid(format!(
                "cannot compose {} ({} outputs) with {} ({} inputs)",
                self.label, self.out_dim, next.label, next.in_dim
            ));
        }
        let mut acc = vec![0.0; self.in_dim];
        let mut touched = vec![false; self.in_dim];
        let mut cols = Vec::new();
        let mut entries = Vec::new();
        let mut bias = next.bias.clone();
        for (r, b) in bias.iter_mut().enumerate() {
            for &(_, k, w) in next.row(r) {
                *b += w * self.bias[k];
                for &(_, c, v) in self.row(k) {
                    if !touched[c] {
                        touched[c] = true;
                        cols.push(c);
                    }
                    acc[c] += w * v;
                }
            }
            cols.sort_unstable();
            for &c in &cols {
                if acc[c] != 0.0 {
                    entries.push((r, c, acc[c]));
                }
                acc[c] = 0.0;
                touched[c] = false;
            }
            cols.clear();
        }
        let label = format!("{} | {}", self.label, next.label);
        Ok(Self::from_sorted(label, self.in_dim, next.out_dim, entries, bias))
    }

    /// Block-diagonal operator applying `parts[i]` to the `i`-th slice of
    /// the input.
    pub fn block_diagonal(parts: &[AffineOperator]) -> AffineOperator {
        let (mut r0, mut c0) = (0, 0);
        let mut entries = Vec::new();
        let mut bias = Vec::new();
        for p in parts {
            entries.extend(p.entries.iter().map(|&(r, c, v)| (r + r0, c + c0, v)));
            bias.extend_from_slice(&p.bias);
            r0 += p.out_dim;
            c0 += p.in_dim;
        }
        let label = format!("per-channel[{}]", parts.iter().map(|p| p.label.as_str()).collect::<Vec<_>>().join(", "));
        Self::from_sorted(label, c0, r0, entries, bias)
    }
}

/// `a | b`, i.e. `b ∘ a`.
pub fn compose(a: &AffineOperator, b: &AffineOperator) -> Result<AffineOperator> {
    a.then(b)
}

/// Element-wise rounding mode of a [`Quantizer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    /// Nearest integer, ties to even.
    Round,
    Floor,
}

/// Maps reals to integer levels, optionally clamped to `[0, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Quantizer {
    pub mode: Rounding,
    pub max: Option<u32>,
}

impl Quantizer {
    /// Clamped to the pixel range `[0, rho]`.
    pub fn pixels(mode: Rounding, rho: u32) -> Self {
        Self { mode, max: Some(rho) }
    }

    /// No clamping, for lattice experiments around the origin.
    pub fn unbounded(mode: Rounding) -> Self {
        Self { mode, max: None }
    }

    pub fn level(&self, v: f64) -> f64 {
        let q = match self.mode {
            Rounding::Round => v.round_ties_even(),
            Rounding::Floor => v.floor(),
        };
        match self.max {
            Some(m) => q.clamp(0.0, f64::from(m)),
            None => q,
        }
    }
}

/// `Q[A x + b]` on an image. The operator must be square so the output keeps
/// the input format; the quantizer is clamped to the format's range.
pub fn apply(op: &AffineOperator, image: &Image, mode: Rounding) -> Result<Image> {
    let format = image.format();
    if op.in_dim() != format.dim() || op.out_dim() != format.dim() {
        return invalid(format!(
            "operator {} is {}x{}, image {} has {} values",
            op.label(),
            op.out_dim(),
            op.in_dim(),
            format,
            format.dim()
        ));
    }
    let x: Vec<f64> = image.pixels().iter().map(|&p| f64::from(p)).collect();
    let q = Quantizer::pixels(mode, format.rho());
    let pixels = op.act(&x)?.into_iter().map(|v| q.level(v) as u32).collect();
    Image::new(format, pixels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_bad_dims() {
        assert!(AffineOperator::new("d", 2, 2, vec![(0, 0, 1.0), (0, 0, 2.0)], vec![0.0; 2]).is_err());
        assert!(AffineOperator::new("d", 2, 2, vec![(2, 0, 1.0)], vec![0.0; 2]).is_err());
        assert!(AffineOperator::new("d", 2, 2, vec![], vec![0.0; 3]).is_err());
    }

    #[test]
    fn composition_order() {
        // a: scale by 2 then b: add 1  →  2x + 1
        let a = AffineOperator::diagonal(&[2.0]).unwrap();
        let b = AffineOperator::translation(vec![1.0]).unwrap();
        assert_eq!(a.then(&b).unwrap().act(&[3.0]).unwrap(), vec![7.0]);
        assert_eq!(b.then(&a).unwrap().act(&[3.0]).unwrap(), vec![8.0]);
    }

    #[test]
    fn dense_product_matches() {
        let a = AffineOperator::from_dense(2, 3, &[1.0, 2.0, 0.0, 0.0, -1.0, 3.0], vec![1.0, 2.0]).unwrap();
        let b = AffineOperator::from_dense(2, 2, &[0.5, 1.0, 2.0, 0.0], vec![0.0, -1.0]).unwrap();
        let ab = a.then(&b).unwrap();
        let x = [1.0, -2.0, 0.5];
        let direct = b.act(&a.act(&x).unwrap()).unwrap();
        let folded = ab.act(&x).unwrap();
        for (u, v) in direct.iter().zip(&folded) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip() {
        let op = AffineOperator::from_dense(1, 2, &[0.25, -1.0], vec![3.0]).unwrap().with_label("t");
        let json = serde_json::to_string(&op).unwrap();
        assert!(json.contains("\"triplets\""));
        let back: AffineOperator = serde_json::from_str(&json).unwrap();
        assert_eq!(back, op);
        let bad = r#"{"label":"x","in_dim":1,"out_dim":1,"triplets":[[0,0,1.0],[0,0,2.0]],"bias":[0.0]}"#;
        assert!(serde_json::from_str::<AffineOperator>(bad).is_err());
    }

    #[test]
    fn quantizer_modes() {
        let q = Quantizer::pixels(Rounding::Round, 255);
        assert_eq!(q.level(2.5), 2.0);
        assert_eq!(q.level(-3.0), 0.0);
        assert_eq!(q.level(300.0), 255.0);
        assert_eq!(Quantizer::unbounded(Rounding::Floor).level(-0.5), -1.0);
    }
}
