//! n-qubit basis words and density matrices. Qubit 1 is the leftmost tensor
//! factor, i.e. the most significant bit of a basis index, and everything is
//! dense: the supported range is 1..=12 qubits.

use crate::linalg::{self, ComplexMatrix, LinalgError};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_QUBITS: usize = 12;

/// Validation thresholds for density matrices.
pub const DENSITY_HERMITICITY_TOL: f64 = 1e-10;
pub const DENSITY_TRACE_TOL: f64 = 1e-10;
pub const DENSITY_EIG_FLOOR: f64 = -1e-9;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("qubit count {0} outside supported range 1..={MAX_QUBITS}")]
    NOutOfRange(usize),
    #[error("binary word may only contain '0' and '1', found {0:?}")]
    BadWordChar(char),
    #[error("binary word is empty")]
    EmptyWord,
    #[error("words have different lengths: {0} vs {1}")]
    WordLengthMismatch(usize, usize),
    #[error("words in a pair family must be pairwise distinct, {0} repeats")]
    DuplicateWord(String),
    #[error("weights must be positive and sum to 1 (got sum {0})")]
    BadWeights(f64),
    #[error("matrix dimension {got} does not match 2^{n}")]
    WrongDimension { got: usize, n: usize },
    #[error("product factor {index} is not a single-qubit state")]
    FactorNotSingleQubit { index: usize },
    #[error("term count must be at least 1")]
    NoTerms,
    #[error("not a density matrix: {0}")]
    NotAState(ValidationReport),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Fixed-length bit string naming a computational basis vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BinaryWord {
    n: usize,
    bits: u64,
}

impl BinaryWord {
    pub fn parse(s: &str) -> Result<Self, StateError> {
        if s.is_empty() {
            return Err(StateError::EmptyWord);
        }
        let mut bits = 0u64;
        for ch in s.chars() {
            bits <<= 1;
            match ch {
                '0' => {}
                '1' => bits |= 1,
                other => return Err(StateError::BadWordChar(other)),
            }
        }
        Ok(BinaryWord { n: s.len(), bits })
    }

    /// Word for basis index `idx` on `n` qubits.
    pub fn from_index(n: usize, idx: usize) -> Self {
        assert!((1..=64).contains(&n) && idx < (1usize << n));
        BinaryWord {
            n,
            bits: idx as u64,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Basis index; the leftmost character is the most significant bit.
    pub fn index(&self) -> usize {
        self.bits as usize
    }

    /// Bit of qubit `i`, 1-based from the left.
    pub fn bit(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.n);
        (self.bits >> (self.n - i)) & 1 == 1
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn distance(&self, other: &BinaryWord) -> Result<u32, StateError> {
        if self.n != other.n {
            return Err(StateError::WordLengthMismatch(self.n, other.n));
        }
        Ok((self.bits ^ other.bits).count_ones())
    }
}

impl std::fmt::Display for BinaryWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 1..=self.n {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// What `validate` measured, with the thresholds already applied in `pass`.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub hermiticity_defect: f64,
    pub trace_defect: f64,
    pub min_eigenvalue: f64,
    pub pass: bool,
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "hermiticity defect {:.3e}, trace defect {:.3e}, min eigenvalue {:.3e}",
            self.hermiticity_defect, self.trace_defect, self.min_eigenvalue
        )
    }
}

/// Dense density matrix on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    mat: ComplexMatrix,
}

fn check_n(n: usize) -> Result<(), StateError> {
    if !(1..=MAX_QUBITS).contains(&n) {
        return Err(StateError::NOutOfRange(n));
    }
    Ok(())
}

impl DensityMatrix {
    /// Wraps and fully validates a candidate matrix.
    pub fn new(n: usize, mat: ComplexMatrix) -> Result<Self, StateError> {
        check_n(n)?;
        if mat.dim() != 1 << n {
            return Err(StateError::WrongDimension { got: mat.dim(), n });
        }
        let state = DensityMatrix { n, mat };
        let report = state.validate();
        if !report.pass {
            return Err(StateError::NotAState(report));
        }
        Ok(state)
    }

    /// Internal constructor for outputs that are density matrices by
    /// construction (channel outputs, convex mixtures of valid states).
    pub(crate) fn from_parts(n: usize, mat: ComplexMatrix) -> Self {
        debug_assert_eq!(mat.dim(), 1 << n);
        DensityMatrix { n, mat }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> ComplexMatrix {
        self.mat
    }

    /// tr(rho^2); 1 exactly for pure states.
    pub fn purity(&self) -> f64 {
        let f = self.mat.frobenius_norm();
        f * f
    }

    /// Measures Hermiticity, trace and positivity without failing; thresholds
    /// are `1e-10`, `1e-10` and `-1e-9`.
    pub fn validate(&self) -> ValidationReport {
        let hermiticity_defect = self.mat.hermiticity_defect();
        let trace_defect = (self.mat.trace() - Complex64::new(1.0, 0.0)).norm();
        // eigenvalues of the symmetrized copy; never fails
        let values = linalg::hermitian_eigenvalues(&self.mat.hermitized())
            .expect("symmetrized matrix is Hermitian");
        let min_eigenvalue = values.first().copied().unwrap_or(0.0);
        let pass = hermiticity_defect <= DENSITY_HERMITICITY_TOL
            && trace_defect <= DENSITY_TRACE_TOL
            && min_eigenvalue >= DENSITY_EIG_FLOOR;
        ValidationReport {
            hermiticity_defect,
            trace_defect,
            min_eigenvalue,
            pass,
        }
    }

    /// Convex mixture of equal-size states. Weights must be nonnegative and
    /// sum to 1 within 1e-12 (they are renormalized exactly).
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self, StateError> {
        if parts.is_empty() {
            return Err(StateError::NoTerms);
        }
        let n = parts[0].1.n;
        let sum: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(StateError::BadWeights(sum));
        }
        let mut mat = ComplexMatrix::zeros(1 << n);
        for (w, part) in parts {
            if part.n != n {
                return Err(StateError::WordLengthMismatch(n, part.n));
            }
            mat.add_assign_scaled(&part.mat, Complex64::new(w / sum, 0.0));
        }
        Ok(DensityMatrix::from_parts(n, mat))
    }
}

/// |word><word|.
pub fn basis_state(word: &BinaryWord) -> Result<DensityMatrix, StateError> {
    check_n(word.n())?;
    let mut mat = ComplexMatrix::zeros(1 << word.n());
    mat.set(word.index(), word.index(), Complex64::new(1.0, 0.0));
    Ok(DensityMatrix::from_parts(word.n(), mat))
}

/// Equal superposition of the all-zeros and all-ones words.
pub fn cat_state(n: usize) -> Result<DensityMatrix, StateError> {
    check_n(n)?;
    let dim = 1 << n;
    let mut mat = ComplexMatrix::zeros(dim);
    let h = Complex64::new(0.5, 0.0);
    mat.set(0, 0, h);
    mat.set(0, dim - 1, h);
    mat.set(dim - 1, 0, h);
    mat.set(dim - 1, dim - 1, h);
    Ok(DensityMatrix::from_parts(n, mat))
}

/// Product of per-qubit equal superpositions; every entry is 2^-n.
pub fn pi_state(n: usize) -> Result<DensityMatrix, StateError> {
    check_n(n)?;
    let dim = 1 << n;
    let v = Complex64::new(1.0 / dim as f64, 0.0);
    Ok(DensityMatrix::from_parts(
        n,
        ComplexMatrix::from_fn(dim, |_, _| v),
    ))
}

pub fn maximally_mixed(n: usize) -> Result<DensityMatrix, StateError> {
    check_n(n)?;
    let dim = 1 << n;
    let v = Complex64::new(1.0 / dim as f64, 0.0);
    Ok(DensityMatrix::from_parts(
        n,
        ComplexMatrix::from_diag(&vec![v; dim]),
    ))
}

/// Pure equal superposition of two distinct words of the same length.
pub fn pair_superposition(f: &BinaryWord, g: &BinaryWord) -> Result<DensityMatrix, StateError> {
    if f.n() != g.n() {
        return Err(StateError::WordLengthMismatch(f.n(), g.n()));
    }
    check_n(f.n())?;
    if f == g {
        return Err(StateError::DuplicateWord(f.to_string()));
    }
    let mut mat = ComplexMatrix::zeros(1 << f.n());
    let h = Complex64::new(0.5, 0.0);
    for &r in &[f.index(), g.index()] {
        for &c in &[f.index(), g.index()] {
            mat.set(r, c, h);
        }
    }
    Ok(DensityMatrix::from_parts(f.n(), mat))
}

/// Weighted mixture of word-pair superpositions over pairwise distinct words,
/// together with the unit-norm observable that exposes the mixture's
/// coherences: `b = sum_k (i|f_k><g_k| - i|g_k><f_k|)`.
pub fn pair_mixture(
    pairs: &[(BinaryWord, BinaryWord, f64)],
) -> Result<(DensityMatrix, ComplexMatrix), StateError> {
    if pairs.is_empty() {
        return Err(StateError::NoTerms);
    }
    let n = pairs[0].0.n();
    check_n(n)?;
    let mut seen = std::collections::HashSet::new();
    for (f, g, _) in pairs {
        for w in [f, g] {
            if w.n() != n {
                return Err(StateError::WordLengthMismatch(n, w.n()));
            }
            if !seen.insert(w.index()) {
                return Err(StateError::DuplicateWord(w.to_string()));
            }
        }
    }
    let sum: f64 = pairs.iter().map(|(_, _, w)| *w).sum();
    if pairs.iter().any(|(_, _, w)| *w <= 0.0) || (sum - 1.0).abs() > 1e-12 {
        return Err(StateError::BadWeights(sum));
    }
    let dim = 1 << n;
    let mut mat = ComplexMatrix::zeros(dim);
    let mut witness = ComplexMatrix::zeros(dim);
    for (f, g, w) in pairs {
        let half = Complex64::new(0.5 * w / sum, 0.0);
        for &r in &[f.index(), g.index()] {
            for &c in &[f.index(), g.index()] {
                mat.set(r, c, mat.get(r, c) + half);
            }
        }
        witness.set(f.index(), g.index(), Complex64::new(0.0, 1.0));
        witness.set(g.index(), f.index(), Complex64::new(0.0, -1.0));
    }
    Ok((DensityMatrix::from_parts(n, mat), witness))
}

/// Tensor product of validated single-qubit states.
pub fn product_state(factors: &[DensityMatrix]) -> Result<DensityMatrix, StateError> {
    check_n(factors.len())?;
    let mut mat = ComplexMatrix::identity(1);
    for (index, f) in factors.iter().enumerate() {
        if f.n() != 1 {
            return Err(StateError::FactorNotSingleQubit { index });
        }
        if !f.validate().pass {
            return Err(StateError::FactorNotSingleQubit { index });
        }
        mat = linalg::tensor(&mat, f.mat());
    }
    Ok(DensityMatrix::from_parts(factors.len(), mat))
}

fn haar_qubit(rng: &mut ChaCha8Rng) -> ComplexMatrix {
    // theta has density sin(theta)/2 on [0, pi]; phi is uniform
    let theta = (1.0 - 2.0 * rng.gen::<f64>()).acos();
    let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    let a = Complex64::new((theta / 2.0).cos(), 0.0);
    let b = Complex64::from_polar((theta / 2.0).sin(), phi);
    ComplexMatrix::from_rows(&[
        vec![a * a.conj(), a * b.conj()],
        vec![b * a.conj(), b * b.conj()],
    ])
}

/// Seed-deterministic random separable state: `terms` product states of
/// per-qubit Haar-random pure states, mixed with uniform-simplex weights.
pub fn random_separable(n: usize, terms: usize, seed: u64) -> Result<DensityMatrix, StateError> {
    check_n(n)?;
    if terms == 0 {
        return Err(StateError::NoTerms);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // normalized exponential draws = uniform on the simplex
    let raw: Vec<f64> = (0..terms)
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    let total: f64 = raw.iter().sum();
    let mut mat = ComplexMatrix::zeros(1 << n);
    for w in raw {
        let mut term = ComplexMatrix::identity(1);
        for _ in 0..n {
            term = linalg::tensor(&term, &haar_qubit(&mut rng));
        }
        mat.add_assign_scaled(&term, Complex64::new(w / total, 0.0));
    }
    Ok(DensityMatrix::from_parts(n, mat))
}

/// JSON description of a state, as accepted by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Basis { word: String },
    Cat { n: usize },
    Pi { n: usize },
    MaximallyMixed { n: usize },
    Pair { f: String, g: String },
    Separable { n: usize, terms: usize, seed: u64 },
    Product { factors: Vec<ComplexMatrix> },
}

impl StateSpec {
    pub fn build(&self) -> Result<DensityMatrix, StateError> {
        match self {
            StateSpec::Basis { word } => basis_state(&BinaryWord::parse(word)?),
            StateSpec::Cat { n } => cat_state(*n),
            StateSpec::Pi { n } => pi_state(*n),
            StateSpec::MaximallyMixed { n } => maximally_mixed(*n),
            StateSpec::Pair { f, g } => {
                pair_superposition(&BinaryWord::parse(f)?, &BinaryWord::parse(g)?)
            }
            StateSpec::Separable { n, terms, seed } => random_separable(*n, *terms, *seed),
            StateSpec::Product { factors } => {
                let factors = factors
                    .iter()
                    .enumerate()
                    .map(|(index, m)| {
                        if m.dim() != 2 {
                            return Err(StateError::FactorNotSingleQubit { index });
                        }
                        DensityMatrix::new(1, m.clone())
                            .map_err(|_| StateError::FactorNotSingleQubit { index })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                product_state(&factors)
            }
        }
    }

    /// True when the construction itself guarantees separability.
    pub fn separable_by_construction(&self) -> bool {
        !matches!(self, StateSpec::Cat { .. } | StateSpec::Pair { .. })
    }
}
