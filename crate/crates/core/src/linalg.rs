//! Dense complex matrices and the Hermitian eigensolver everything else
//! leans on. Matrices are row-major `Complex64`, sized for at most 12
//! qubits (dim 4096), so no sparse or blocked paths are attempted.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Inputs whose Hermiticity defect stays below this are symmetrized and
/// accepted; anything worse is rejected.
pub const HERMITICITY_TOL: f64 = 1e-10;

const QL_MAX_ITERS: usize = 64;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {left}x{left} vs {right}x{right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds tolerance {tol:.1e}")]
    NotHermitian { defect: f64, tol: f64 },
    #[error("eigensolver did not converge within {0} iterations")]
    NoConvergence(usize),
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * m.dim + i] = v;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.data[r * dim + c] = f(r, c);
            }
        }
        m
    }

    /// Rows as nested vectors; panics if the rows are not square.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "ragged rows");
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            data.extend_from_slice(r);
        }
        ComplexMatrix { dim, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.dim + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [Complex64] {
        let d = self.dim;
        &mut self.data[r * d..(r + 1) * d]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(ComplexMatrix { dim: self.dim, data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(ComplexMatrix { dim: self.dim, data })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn scale_mut(&mut self, s: Complex64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, s: Complex64) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        self.check_dim(other)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            let arow = self.row(i);
            let orow = &mut out.data[i * d..(i + 1) * d];
            for (k, &aik) in arow.iter().enumerate() {
                if aik.re == 0.0 && aik.im == 0.0 {
                    continue;
                }
                let brow = &other.data[k * d..(k + 1) * d];
                for (o, &bkj) in orow.iter_mut().zip(brow) {
                    *o += aik * bkj;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        Self::from_fn(d, |r, c| self.get(c, r).conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest magnitude of `self[r][c] - conj(self[c][r])`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                let defect = (self.get(r, c) - self.get(c, r).conj()).norm();
                worst = worst.max(defect);
            }
        }
        worst
    }

    /// `(A + A^dagger) / 2`.
    pub fn hermitized(&self) -> Self {
        let d = self.dim;
        Self::from_fn(d, |r, c| {
            (self.get(r, c) + self.get(c, r).conj()) * Complex64::new(0.5, 0.0)
        })
    }

    fn check_dim(&self, other: &Self) -> Result<(), LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }
}

/// JSON shape for a complex matrix: rows of `[re, im]` pairs.
impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.dim)
            .map(|r| self.row(r).iter().map(|v| [v.re, v.im]).collect())
            .collect();
        rows.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(de)?;
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(serde::de::Error::custom(format!(
                "matrix rows must all have length {dim}"
            )));
        }
        let mut m = ComplexMatrix::zeros(dim);
        for (r, row) in rows.iter().enumerate() {
            for (c, &[re, im]) in row.iter().enumerate() {
                m.set(r, c, Complex64::new(re, im));
            }
        }
        Ok(m)
    }
}

/// Kronecker product; the left factor indexes the more significant block.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    let dim = da * db;
    let mut out = ComplexMatrix::zeros(dim);
    for ia in 0..da {
        for ja in 0..da {
            let av = a.get(ia, ja);
            if av.re == 0.0 && av.im == 0.0 {
                continue;
            }
            for ib in 0..db {
                for jb in 0..db {
                    out.set(ia * db + ib, ja * db + jb, av * b.get(ib, jb));
                }
            }
        }
    }
    out
}

/// `ab - ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let ab = a.matmul(b)?;
    let ba = b.matmul(a)?;
    ab.sub(&ba)
}

/// Eigendecomposition of a Hermitian matrix: `values` ascending, columns of
/// `vectors` are the matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Checks the input is Hermitian to within [`HERMITICITY_TOL`] and returns
/// the symmetrized copy actually decomposed.
fn demand_hermitian(a: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    let defect = a.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(LinalgError::NotHermitian {
            defect,
            tol: HERMITICITY_TOL,
        });
    }
    Ok(a.hermitized())
}

/// Full eigendecomposition. Deterministic: Householder reduction to a real
/// symmetric tridiagonal followed by implicit-shift QL, then an ascending
/// sort. Cost is O(dim^3) with no randomness, so repeated calls on the same
/// input are bit-identical.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen, LinalgError> {
    let w = demand_hermitian(a)?;
    let (mut diag, mut off, mut q) = householder_tridiag(w, true);
    ql_implicit(&mut diag, &mut off, q.as_mut())?;
    // ascending eigenvalues, columns permuted to match
    let dim = diag.len();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let qm = q.unwrap();
    let mut vectors = ComplexMatrix::zeros(dim);
    for (newc, &oldc) in order.iter().enumerate() {
        for r in 0..dim {
            vectors.set(r, newc, qm.get(r, oldc));
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Ascending eigenvalues only; skips all eigenvector bookkeeping, which makes
/// it several times faster than [`hermitian_eigen`] on hot paths.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    let w = demand_hermitian(a)?;
    let (mut diag, mut off, _) = householder_tridiag(w, false);
    ql_implicit(&mut diag, &mut off, None)?;
    diag.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(diag)
}

/// Sum of singular values of a Hermitian matrix, i.e. the sum of absolute
/// eigenvalues.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64, LinalgError> {
    Ok(hermitian_eigenvalues(a)?.iter().map(|v| v.abs()).sum())
}

/// Largest absolute eigenvalue of a Hermitian matrix.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64, LinalgError> {
    Ok(hermitian_eigenvalues(a)?
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max))
}

/// Reduce a Hermitian matrix to real symmetric tridiagonal form by unitary
/// similarity. Returns `(diag, off, q)` where `off[i]` couples `i` and `i+1`
/// (`off[dim-1]` is a zero sentinel) and `q` satisfies `a = q T q^dagger`
/// when requested. Complex subdiagonal phases are folded into `q`.
fn householder_tridiag(
    mut w: ComplexMatrix,
    want_q: bool,
) -> (Vec<f64>, Vec<f64>, Option<ComplexMatrix>) {
    let dim = w.dim();
    let mut q = want_q.then(|| ComplexMatrix::identity(dim));
    let mut v = vec![Complex64::new(0.0, 0.0); dim];
    let mut bv = vec![Complex64::new(0.0, 0.0); dim];

    for k in 0..dim.saturating_sub(2) {
        // column k below the subdiagonal
        let mut tail = 0.0f64;
        for j in k + 2..dim {
            tail += w.get(j, k).norm_sqr();
        }
        if tail == 0.0 {
            continue; // already tridiagonal at this column
        }
        let x0 = w.get(k + 1, k);
        let xnorm = (tail + x0.norm_sqr()).sqrt();
        // alpha = -(phase of x0) * |x|, avoiding cancellation in v[k+1]
        let alpha = if x0.norm() > 0.0 {
            -(x0 / x0.norm()) * xnorm
        } else {
            Complex64::new(-xnorm, 0.0)
        };
        v[k + 1] = x0 - alpha;
        for j in k + 2..dim {
            v[j] = w.get(j, k);
        }
        // normalize v so tau = 2; keeps intermediates at matrix scale even
        // when the trailing block has decayed to denormal magnitudes
        let vnorm = (k + 1..dim)
            .map(|j| v[j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        for j in k + 1..dim {
            v[j] /= vnorm;
        }
        let tau = 2.0;

        // rank-2 update of the trailing block: B <- B - v kvec^H - kvec v^H
        for i in k + 1..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in k + 1..dim {
                acc += w.get(i, j) * v[j];
            }
            bv[i] = acc;
        }
        let s: f64 = (k + 1..dim)
            .map(|i| (v[i].conj() * bv[i]).re)
            .sum();
        let coef = tau * tau * s * 0.5;
        for i in k + 1..dim {
            bv[i] = bv[i] * tau - v[i] * coef; // now kvec
        }
        for i in k + 1..dim {
            let vi = v[i];
            let ki = bv[i];
            for j in k + 1..dim {
                let upd = vi * bv[j].conj() + ki * v[j].conj();
                w.set(i, j, w.get(i, j) - upd);
            }
        }
        w.set(k + 1, k, alpha);
        w.set(k, k + 1, alpha.conj());
        for j in k + 2..dim {
            w.set(j, k, Complex64::new(0.0, 0.0));
            w.set(k, j, Complex64::new(0.0, 0.0));
        }

        // Q <- Q H, touching columns k+1..dim only
        if let Some(q) = q.as_mut() {
            for r in 0..dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in k + 1..dim {
                    acc += q.get(r, j) * v[j];
                }
                let acc = acc * tau;
                for j in k + 1..dim {
                    let upd = acc * v[j].conj();
                    q.set(r, j, q.get(r, j) - upd);
                }
            }
        }
    }

    // strip subdiagonal phases so QL can run in real arithmetic
    let mut diag = vec![0.0f64; dim];
    let mut off = vec![0.0f64; dim];
    let mut phase = Complex64::new(1.0, 0.0);
    let mut phases = vec![Complex64::new(1.0, 0.0); dim];
    for i in 0..dim {
        diag[i] = w.get(i, i).re;
        phases[i] = phase;
        if i + 1 < dim {
            let e = w.get(i + 1, i);
            let mag = e.norm();
            off[i] = mag;
            if mag > 0.0 {
                phase *= e / mag;
            }
        }
    }
    if let Some(q) = q.as_mut() {
        for c in 0..dim {
            if (phases[c] - Complex64::new(1.0, 0.0)).norm() != 0.0 {
                for r in 0..dim {
                    q.set(r, c, q.get(r, c) * phases[c]);
                }
            }
        }
    }
    (diag, off, q)
}

/// Implicit-shift QL on a real symmetric tridiagonal, rotating the complex
/// columns of `q` alongside. Classic EISPACK tql2 control flow.
fn ql_implicit(
    d: &mut [f64],
    e: &mut [f64],
    mut q: Option<&mut ComplexMatrix>,
) -> Result<(), LinalgError> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    // absolute deflation floor: the relative test alone never fires on
    // segments whose diagonal entries are exactly zero
    let anorm = (0..n)
        .map(|i| d[i].abs() + e[i].abs() + if i > 0 { e[i - 1].abs() } else { 0.0 })
        .fold(0.0f64, f64::max);
    let floor = f64::EPSILON * anorm;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= floor {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_ITERS {
                return Err(LinalgError::NoConvergence(QL_MAX_ITERS));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(if g == 0.0 { 1.0 } else { g }));
            let (mut s, mut c, mut p) = (1.0f64, 1.0f64, 0.0f64);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(q) = q.as_deref_mut() {
                    let dim = q.dim();
                    for row in 0..dim {
                        let right = q.get(row, i + 1);
                        let left = q.get(row, i);
                        q.set(row, i + 1, left * s + right * c);
                        q.set(row, i, left * c - right * s);
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        a.sub(b).unwrap().max_abs()
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_diag(&[c(1.0, 0.0), c(-1.0, 0.0)])
    }

    #[test]
    fn tensor_pauli_z_with_identity() {
        let t = tensor(&pauli_z(), &ComplexMatrix::identity(2));
        let want = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)]);
        assert_eq!(max_diff(&t, &want), 0.0);
        // basis word "10" sits at index 2 and picks up eigenvalue -1
        let mut e2 = vec![c(0.0, 0.0); 4];
        e2[2] = c(1.0, 0.0);
        let out = t.mul_vec(&e2);
        assert_eq!(out[2], c(-1.0, 0.0));
        assert!(out.iter().enumerate().all(|(i, v)| i == 2 || v.norm() == 0.0));
    }

    #[test]
    fn tensor_identity_is_identity() {
        let t = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3));
        assert_eq!(max_diff(&t, &ComplexMatrix::identity(6)), 0.0);
    }

    #[test]
    fn tensor_mixed_product_rule() {
        // (A tensor B)(C tensor D) = AC tensor BD on fixed complex entries
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.3, 0.1), c(-1.0, 0.4)],
            vec![c(0.0, -0.2), c(2.0, 0.0)],
        ]);
        let b = ComplexMatrix::from_rows(&[
            vec![c(1.0, 1.0), c(0.5, 0.0)],
            vec![c(-0.3, 0.0), c(0.0, 0.7)],
        ]);
        let cmat = ComplexMatrix::from_rows(&[
            vec![c(0.9, 0.0), c(0.2, -0.1)],
            vec![c(0.4, 0.3), c(-0.6, 0.0)],
        ]);
        let dmat = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.8), c(1.1, 0.0)],
            vec![c(0.7, -0.7), c(0.2, 0.2)],
        ]);
        let lhs = tensor(&a, &b).matmul(&tensor(&cmat, &dmat)).unwrap();
        let rhs = tensor(&a.matmul(&cmat).unwrap(), &b.matmul(&dmat).unwrap());
        assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn tensor_associativity() {
        let a = pauli_z();
        let b = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ]);
        let d = ComplexMatrix::from_rows(&[
            vec![c(0.5, 0.0), c(0.5, 0.0)],
            vec![c(0.5, 0.0), c(0.5, 0.0)],
        ]);
        let lhs = tensor(&tensor(&a, &b), &d);
        let rhs = tensor(&a, &tensor(&b, &d));
        assert!(max_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn commutator_projector_against_flat_projector() {
        // [diag(0,1), (1/2)ones] = (1/2)[[0,-1],[1,0]]
        let p = ComplexMatrix::from_diag(&[c(0.0, 0.0), c(1.0, 0.0)]);
        let flat = ComplexMatrix::from_fn(2, |_, _| c(0.5, 0.0));
        let k = commutator(&p, &flat).unwrap();
        let want = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(-0.5, 0.0)],
            vec![c(0.5, 0.0), c(0.0, 0.0)],
        ]);
        assert!(max_diff(&k, &want) < 1e-15);
    }

    #[test]
    fn commutator_with_self_and_identity_vanishes() {
        let p = ComplexMatrix::from_fn(3, |r, c_| c((r + c_) as f64, (r as f64) - (c_ as f64)));
        assert_eq!(commutator(&p, &p).unwrap().max_abs(), 0.0);
        assert_eq!(
            commutator(&p, &ComplexMatrix::identity(3)).unwrap().max_abs(),
            0.0
        );
    }

    #[test]
    fn commutator_dimension_mismatch() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::identity(4);
        assert!(matches!(
            commutator(&a, &b),
            Err(LinalgError::DimensionMismatch { left: 2, right: 4 })
        ));
    }

    #[test]
    fn eigen_diagonal_matrix() {
        let a = ComplexMatrix::from_diag(&[c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let eig = hermitian_eigen(&a).unwrap();
        assert_eq!(eig.values, vec![1.0, 2.0, 3.0]);
        // columns are the basis vectors that picked those values
        assert_eq!(eig.vectors.get(1, 0).norm(), 1.0);
        assert_eq!(eig.vectors.get(2, 1).norm(), 1.0);
        assert_eq!(eig.vectors.get(0, 2).norm(), 1.0);
    }

    #[test]
    fn eigen_half_pauli_y() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, -0.5)],
            vec![c(0.0, 0.5), c(0.0, 0.0)],
        ]);
        let eig = hermitian_eigen(&a).unwrap();
        assert!((eig.values[0] + 0.5).abs() < 1e-14);
        assert!((eig.values[1] - 0.5).abs() < 1e-14);
        assert!(reconstruction_error(&a, &eig) < 1e-14);
    }

    #[test]
    fn eigen_zero_matrix() {
        let eig = hermitian_eigen(&ComplexMatrix::zeros(4)).unwrap();
        assert!(eig.values.iter().all(|v| *v == 0.0));
    }

    fn reconstruction_error(a: &ComplexMatrix, eig: &HermitianEigen) -> f64 {
        let lam = ComplexMatrix::from_diag(
            &eig.values.iter().map(|&v| c(v, 0.0)).collect::<Vec<_>>(),
        );
        let rebuilt = eig
            .vectors
            .matmul(&lam)
            .unwrap()
            .matmul(&eig.vectors.adjoint())
            .unwrap();
        max_diff(&rebuilt, a) / (1.0 + a.max_abs())
    }

    /// Exact unitary from a chain of phased Givens rotations; spectrum known
    /// by construction.
    fn planted_spectrum_case(dim: usize, lambda: &[f64]) -> (ComplexMatrix, Vec<f64>) {
        assert_eq!(lambda.len(), dim);
        let mut v = ComplexMatrix::identity(dim);
        let mut angle = 0.37f64;
        for i in 0..dim {
            for j in i + 1..dim {
                angle += 0.71;
                let (s, co) = angle.sin_cos();
                let phase = Complex64::from_polar(1.0, 1.3 * angle);
                let mut g = ComplexMatrix::identity(dim);
                g.set(i, i, c(co, 0.0));
                g.set(i, j, -phase.conj() * s);
                g.set(j, i, phase * s);
                g.set(j, j, c(co, 0.0));
                v = v.matmul(&g).unwrap();
            }
        }
        let lam = ComplexMatrix::from_diag(&lambda.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
        let a = v.matmul(&lam).unwrap().matmul(&v.adjoint()).unwrap();
        let mut sorted = lambda.to_vec();
        sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
        (a, sorted)
    }

    #[test]
    fn eigen_recovers_planted_spectrum() {
        for (dim, lambda) in [
            (4, vec![-2.0, 0.5, 0.5, 7.0]),
            (6, vec![0.0, 0.0, 1e-3, 1.0, 1.0, -5.5]),
            (9, vec![3.0, -3.0, 2.25, 0.125, -0.125, 8.0, 1.0, 1.0, 1.0]),
        ] {
            let (a, want) = planted_spectrum_case(dim, &lambda);
            let eig = hermitian_eigen(&a).unwrap();
            for (got, want) in eig.values.iter().zip(&want) {
                assert!((got - want).abs() < 1e-10, "dim {dim}: {got} vs {want}");
            }
            // orthonormal columns
            let gram = eig.vectors.adjoint().matmul(&eig.vectors).unwrap();
            assert!(max_diff(&gram, &ComplexMatrix::identity(dim)) < 1e-12);
            assert!(reconstruction_error(&a, &eig) < 1e-11);
            // values-only path agrees bit-for-bit
            let vals = hermitian_eigenvalues(&a).unwrap();
            assert_eq!(vals, eig.values);
        }
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        match hermitian_eigen(&a) {
            Err(LinalgError::NotHermitian { defect, .. }) => assert!((defect - 1.0).abs() < 1e-15),
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn eigen_symmetrizes_tiny_defects() {
        let mut a = pauli_z();
        a.set(0, 1, c(1e-12, 1e-12)); // asymmetric but inside tolerance
        let eig = hermitian_eigen(&a).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-11);
        assert!((eig.values[1] - 1.0).abs() < 1e-11);
    }

    #[test]
    fn trace_norm_cases() {
        assert_eq!(trace_norm(&pauli_z()).unwrap(), 2.0);
        assert_eq!(trace_norm(&ComplexMatrix::zeros(3)).unwrap(), 0.0);
        // i/2 (|1><0| - |0><1|) has singular values 1/2, 1/2
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, -0.5)],
            vec![c(0.0, 0.5), c(0.0, 0.0)],
        ]);
        assert!((trace_norm(&a).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn operator_norm_cases() {
        let p = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(operator_norm(&p).unwrap(), 1.0);
        assert_eq!(operator_norm(&ComplexMatrix::zeros(2)).unwrap(), 0.0);
        let (a, want) = planted_spectrum_case(5, &[-4.0, 1.0, 0.2, 3.0, -0.5]);
        assert!((operator_norm(&a).unwrap() - want.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .abs()
            < 1e-11);
    }

    #[test]
    fn trace_norm_dominates_pairings() {
        // |tr(A B)| <= trace_norm(A) for unit-norm Hermitian B built exactly
        let (a, _) = planted_spectrum_case(4, &[-1.5, 0.25, 2.0, -0.75]);
        let tn = trace_norm(&a).unwrap();
        for pattern in 0..16u32 {
            let diag: Vec<Complex64> = (0..4)
                .map(|b| c(if pattern >> b & 1 == 1 { 1.0 } else { -1.0 }, 0.0))
                .collect();
            let b = ComplexMatrix::from_diag(&diag);
            let val = a.matmul(&b).unwrap().trace().norm();
            assert!(val <= tn + 1e-12);
        }
    }

    #[test]
    fn matrix_serde_round_trip() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(0.25, -1.0), c(3.0, 0.5)],
            vec![c(0.0, 0.0), c(-2.0, 2.0)],
        ]);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, "[[[0.25,-1.0],[3.0,0.5]],[[0.0,0.0],[-2.0,2.0]]]");
        let back: ComplexMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(max_diff(&a, &back), 0.0);
    }

    #[test]
    fn matrix_serde_rejects_ragged() {
        let bad = "[[[1.0,0.0],[0.0,0.0]],[[0.0,0.0]]]";
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
    }
}

