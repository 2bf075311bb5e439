//! Per-qubit projector families and the observables built from them. A
//! family assigns each qubit a rank-1 projector by Bloch angles; its
//! averaging observable is `Qbar = (1/n) sum_i Q_i` embedded at qubit `i`.

use crate::linalg::{ComplexMatrix, LinalgError};
use crate::states::DensityMatrix;
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Imaginary residues above this signal non-Hermitian inputs.
pub const RESIDUE_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum ObservableError {
    #[error("family has {got} angle pairs but the state has {want} qubits")]
    FamilySizeMismatch { got: usize, want: usize },
    #[error("theta {0} outside [0, pi]")]
    ThetaOutOfRange(f64),
    #[error("phi {0} outside [0, 2*pi)")]
    PhiOutOfRange(f64),
    #[error("empty family")]
    EmptyFamily,
    #[error(
        "imaginary residue {0:.3e} exceeds {RESIDUE_TOL:.1e}; inputs are likely not Hermitian"
    )]
    ResidueTooLarge(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Rank-1 projector `(1/2)(I + sin t cos p X + sin t sin p Y + cos t Z)`.
pub fn bloch_projector(theta: f64, phi: f64) -> ComplexMatrix {
    let (st, ct) = (theta.sin(), theta.cos());
    let off = Complex64::from_polar(st / 2.0, -phi);
    ComplexMatrix::from_rows(&[
        vec![Complex64::new((1.0 + ct) / 2.0, 0.0), off],
        vec![off.conj(), Complex64::new((1.0 - ct) / 2.0, 0.0)],
    ])
}

/// One Bloch angle pair per qubit; theta in [0, pi], phi in [0, 2*pi).
#[derive(Debug, Clone, PartialEq)]
pub struct BlochFamily {
    angles: Vec<(f64, f64)>,
}

impl BlochFamily {
    pub fn new(angles: Vec<(f64, f64)>) -> Result<Self, ObservableError> {
        if angles.is_empty() {
            return Err(ObservableError::EmptyFamily);
        }
        for &(theta, phi) in &angles {
            if !(0.0..=std::f64::consts::PI).contains(&theta) {
                return Err(ObservableError::ThetaOutOfRange(theta));
            }
            if !(0.0..std::f64::consts::TAU).contains(&phi) {
                return Err(ObservableError::PhiOutOfRange(phi));
            }
        }
        Ok(BlochFamily { angles })
    }

    /// All-zeros angles: every projector is |0><0|.
    pub fn z_family(n: usize) -> Self {
        BlochFamily {
            angles: vec![(0.0, 0.0); n],
        }
    }

    /// Folds arbitrary real angle pairs into the canonical ranges; the
    /// projectors are unchanged.
    pub fn from_unnormalized(raw: &[f64]) -> Self {
        assert!(raw.len().is_multiple_of(2) && !raw.is_empty());
        let tau = std::f64::consts::TAU;
        let angles = raw
            .chunks(2)
            .map(|pair| {
                let (mut theta, mut phi) = (pair[0].rem_euclid(tau), pair[1]);
                if theta > std::f64::consts::PI {
                    theta = tau - theta;
                    phi += std::f64::consts::PI;
                }
                let mut phi = phi.rem_euclid(tau);
                if phi >= tau {
                    phi = 0.0;
                }
                (theta, phi)
            })
            .collect();
        BlochFamily { angles }
    }

    pub fn n(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[(f64, f64)] {
        &self.angles
    }

    pub fn projectors(&self) -> Vec<ComplexMatrix> {
        self.angles
            .iter()
            .map(|&(t, p)| bloch_projector(t, p))
            .collect()
    }
}

/// `Qbar` together with the per-qubit projectors that built it.
#[derive(Debug, Clone)]
pub struct AveragingObservable {
    n: usize,
    mat: ComplexMatrix,
    projectors: Vec<ComplexMatrix>,
}

impl AveragingObservable {
    pub fn from_family(family: &BlochFamily) -> Self {
        let projectors = family.projectors();
        Self::from_projectors(projectors)
    }

    /// The all-|1><1| family; built exactly, the matrix is diag(weight(r)/n).
    pub fn canonical_p(n: usize) -> Self {
        assert!(n >= 1, "empty projector family");
        let q = ComplexMatrix::from_diag(&[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        let diag: Vec<Complex64> = (0..1u64 << n)
            .map(|r| Complex64::new(r.count_ones() as f64 / n as f64, 0.0))
            .collect();
        AveragingObservable {
            n,
            mat: ComplexMatrix::from_diag(&diag),
            projectors: vec![q; n],
        }
    }

    pub fn from_projectors(projectors: Vec<ComplexMatrix>) -> Self {
        let n = projectors.len();
        assert!(n >= 1, "empty projector family");
        let dim = 1usize << n;
        let mut mat = ComplexMatrix::zeros(dim);
        let inv = Complex64::new(1.0 / n as f64, 0.0);
        for (qubit, q) in projectors.iter().enumerate() {
            let mask = 1usize << (n - 1 - qubit);
            for r in 0..dim {
                let b = usize::from(r & mask != 0);
                let diag = mat.get(r, r) + q.get(b, b) * inv;
                mat.set(r, r, diag);
                let off = mat.get(r, r ^ mask) + q.get(b, 1 - b) * inv;
                mat.set(r, r ^ mask, off);
            }
        }
        AveragingObservable { n, mat, projectors }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }
}

/// `i [rho, Qbar]` assembled entrywise from the per-qubit projectors in
/// O(n 4^n) instead of two dense dim^3 products. This is the optimizer's
/// inner-loop kernel.
pub(crate) fn i_commutator_with_average(
    rho: &ComplexMatrix,
    projectors: &[ComplexMatrix],
) -> ComplexMatrix {
    let n = projectors.len();
    let dim = 1usize << n;
    debug_assert_eq!(rho.dim(), dim);
    let inv = 1.0 / n as f64;
    let mut out = ComplexMatrix::zeros(dim);
    let i_unit = Complex64::new(0.0, 1.0);
    for r in 0..dim {
        for c in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for (qubit, q) in projectors.iter().enumerate() {
                let mask = 1usize << (n - 1 - qubit);
                let br = usize::from(r & mask != 0);
                let bc = usize::from(c & mask != 0);
                // (rho Qbar)[r][c] contribution
                acc += rho.get(r, c) * q.get(bc, bc) + rho.get(r, c ^ mask) * q.get(1 - bc, bc);
                // -(Qbar rho)[r][c] contribution
                acc -= q.get(br, br) * rho.get(r, c) + q.get(br, 1 - br) * rho.get(r ^ mask, c);
            }
            out.set(r, c, acc * inv * i_unit);
        }
    }
    out
}

/// `sqrt(tr(rho a^2) - tr(rho a)^2)`, clamped at zero against rounding.
pub fn std_dev(a: &ComplexMatrix, rho: &DensityMatrix) -> Result<f64, ObservableError> {
    if a.dim() != rho.dim() {
        return Err(LinalgError::DimensionMismatch {
            left: a.dim(),
            right: rho.dim(),
        }
        .into());
    }
    let defect = a.hermiticity_defect();
    if defect > crate::linalg::HERMITICITY_TOL {
        return Err(LinalgError::NotHermitian {
            defect,
            tol: crate::linalg::HERMITICITY_TOL,
        }
        .into());
    }
    let ra = rho.mat().matmul(a)?;
    let mean = ra.trace().re;
    // tr(rho a a) = sum_jk (rho a)[j][k] a[k][j]
    let dim = a.dim();
    let mut second = 0.0;
    for j in 0..dim {
        let row = ra.row(j);
        for k in 0..dim {
            second += (row[k] * a.get(k, j)).re;
        }
    }
    Ok((second - mean * mean).max(0.0).sqrt())
}

/// Real number `i tr(rho [a, b])`. The imaginary residue must stay under
/// `1e-10`, which it does exactly when all inputs are Hermitian.
pub fn commutator_expectation(
    rho: &DensityMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<f64, ObservableError> {
    let k = crate::linalg::commutator(rho.mat(), a)?;
    if b.dim() != k.dim() {
        return Err(LinalgError::DimensionMismatch {
            left: k.dim(),
            right: b.dim(),
        }
        .into());
    }
    // tr(rho [a,b]) = tr([rho,a] b)
    let dim = k.dim();
    let mut t = Complex64::new(0.0, 0.0);
    for j in 0..dim {
        let row = k.row(j);
        for kk in 0..dim {
            t += row[kk] * b.get(kk, j);
        }
    }
    let value = Complex64::new(0.0, 1.0) * t;
    if value.im.abs() > RESIDUE_TOL {
        return Err(ObservableError::ResidueTooLarge(value.im.abs()));
    }
    Ok(value.re)
}

/// JSON description of a projector family: either explicit angles or the
/// canonical all-|1><1| family.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FamilySpec {
    Canonical { canonical: String },
    Angles { angles: Vec<(f64, f64)> },
}

impl FamilySpec {
    pub fn canonical_p() -> Self {
        FamilySpec::Canonical {
            canonical: "P".to_string(),
        }
    }

    pub fn build(&self, n: usize) -> Result<AveragingObservable, ObservableError> {
        match self {
            FamilySpec::Canonical { .. } => Ok(AveragingObservable::canonical_p(n)),
            FamilySpec::Angles { angles } => {
                if angles.len() != n {
                    return Err(ObservableError::FamilySizeMismatch {
                        got: angles.len(),
                        want: n,
                    });
                }
                Ok(AveragingObservable::from_family(&BlochFamily::new(
                    angles.clone(),
                )?))
            }
        }
    }
}

// Hand-rolled so that unknown keys are rejected, which `untagged` cannot do.
impl<'de> Deserialize<'de> for FamilySpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(de)?;
        let obj = value
            .as_object()
            .ok_or_else(|| D::Error::custom("family must be a JSON object"))?;
        let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        match keys.as_slice() {
            ["canonical"] => {
                let tag = obj["canonical"]
                    .as_str()
                    .ok_or_else(|| D::Error::custom("field `canonical` must be a string"))?;
                if tag != "P" {
                    return Err(D::Error::custom(format!(
                        "unknown canonical family {tag:?}, expected \"P\""
                    )));
                }
                Ok(FamilySpec::canonical_p())
            }
            ["angles"] => {
                let angles: Vec<(f64, f64)> = serde_json::from_value(obj["angles"].clone())
                    .map_err(|e| D::Error::custom(format!("field `angles`: {e}")))?;
                Ok(FamilySpec::Angles { angles })
            }
            _ => Err(D::Error::custom(
                "family must have exactly one of the fields `angles` or `canonical`",
            )),
        }
    }
}
