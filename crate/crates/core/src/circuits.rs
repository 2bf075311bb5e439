//! Noisy gate-model simulation. Single-qubit gates act perfectly; a
//! two-qubit gate either acts perfectly (probability `1 - w`) or fails, in
//! which case both touched qubits take a local error applied to the
//! pre-gate state instead.

use crate::channels::LocalErrorKind;
use crate::fragility::{haupt_term, haupt_x, FragilityError, FragilityReport};
use crate::linalg::ComplexMatrix;
use crate::sampling::random_unitary;
use crate::states::{DensityMatrix, StateError, StateSpec, MAX_QUBITS};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Gate matrices must satisfy `||m^dag m - I||_max <= 1e-10`.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("qubit {qubit} out of range 1..={n}")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("two-qubit gate addresses qubit {0} twice")]
    DuplicateQubit(usize),
    #[error("gate matrix is {got}x{got}, expected {want}x{want}")]
    WrongGateSize { got: usize, want: usize },
    #[error("gate matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error("qubit count {0} outside 1..={MAX_QUBITS}")]
    NOutOfRange(usize),
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("initial state must be separable by construction")]
    InitNotSeparable,
    #[error("initial state has {got} qubits, circuit declares {want}")]
    InitSizeMismatch { got: usize, want: usize },
    #[error("report witness covers {report_n} qubits, circuit has {circuit_n}")]
    ReportMismatch { report_n: usize, circuit_n: usize },
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Fragility(#[from] FragilityError),
}

/// One gate: a perfect unitary on one qubit, or a unitary on an ordered
/// pair that carries the circuit's error probability. For `U2` the matrix
/// index is `2 * bit(qi) + bit(qj)` regardless of where the qubits sit in
/// the register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Gate {
    U1 {
        q: usize,
        m: ComplexMatrix,
    },
    U2 {
        qi: usize,
        qj: usize,
        m: ComplexMatrix,
    },
}

impl Gate {
    fn check(&self, n: usize) -> Result<(), CircuitError> {
        let (m, want) = match self {
            Gate::U1 { q, m } => {
                check_qubit(*q, n)?;
                (m, 2usize)
            }
            Gate::U2 { qi, qj, m } => {
                check_qubit(*qi, n)?;
                check_qubit(*qj, n)?;
                if qi == qj {
                    return Err(CircuitError::DuplicateQubit(*qi));
                }
                (m, 4usize)
            }
        };
        if m.dim() != want {
            return Err(CircuitError::WrongGateSize {
                got: m.dim(),
                want,
            });
        }
        let defect = m
            .adjoint()
            .matmul(m)
            .expect("square")
            .sub(&ComplexMatrix::identity(want))
            .expect("same dimension")
            .max_abs();
        if defect > UNITARITY_TOL {
            return Err(CircuitError::NotUnitary(defect));
        }
        Ok(())
    }
}

fn check_qubit(qubit: usize, n: usize) -> Result<(), CircuitError> {
    if qubit == 0 || qubit > n {
        return Err(CircuitError::QubitOutOfRange { qubit, n });
    }
    Ok(())
}

/// Which local error hits the touched pair when a two-qubit gate fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorModel {
    Dephasing,
    Depolarizing,
}

impl ErrorModel {
    pub fn kind(self) -> LocalErrorKind {
        match self {
            ErrorModel::Dephasing => LocalErrorKind::Dephase,
            ErrorModel::Depolarizing => LocalErrorKind::Depolarize,
        }
    }
}

/// A gate list over `n` qubits with per-two-qubit-gate failure
/// probability `w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Circuit {
    pub n: usize,
    pub w: f64,
    pub error_model: ErrorModel,
    pub init: StateSpec,
    pub gates: Vec<Gate>,
}

// rho <- (U_q rho U_q^dag) with U embedded at `q`, in place
fn apply_u1(mat: &mut ComplexMatrix, n: usize, q: usize, u: &ComplexMatrix) {
    let dim = 1usize << n;
    let mask = 1usize << (n - q);
    let (u00, u01) = (u.get(0, 0), u.get(0, 1));
    let (u10, u11) = (u.get(1, 0), u.get(1, 1));
    for c in 0..dim {
        for r in 0..dim {
            if r & mask != 0 {
                continue;
            }
            let a = mat.get(r, c);
            let b = mat.get(r | mask, c);
            mat.set(r, c, u00 * a + u01 * b);
            mat.set(r | mask, c, u10 * a + u11 * b);
        }
    }
    for r in 0..dim {
        for c in 0..dim {
            if c & mask != 0 {
                continue;
            }
            let a = mat.get(r, c);
            let b = mat.get(r, c | mask);
            mat.set(r, c, a * u00.conj() + b * u01.conj());
            mat.set(r, c | mask, a * u10.conj() + b * u11.conj());
        }
    }
}

// rho <- (U_{qi qj} rho U^dag), gathering the four block indices of each base
fn apply_u2(mat: &mut ComplexMatrix, n: usize, qi: usize, qj: usize, u: &ComplexMatrix) {
    let dim = 1usize << n;
    let mi = 1usize << (n - qi);
    let mj = 1usize << (n - qj);
    let both = mi | mj;
    let idx = |base: usize, g: usize| {
        base | if g & 2 != 0 { mi } else { 0 } | if g & 1 != 0 { mj } else { 0 }
    };
    let mut v = [Complex64::new(0.0, 0.0); 4];
    for c in 0..dim {
        for base in 0..dim {
            if base & both != 0 {
                continue;
            }
            for (g, slot) in v.iter_mut().enumerate() {
                *slot = mat.get(idx(base, g), c);
            }
            for g in 0..4 {
                let mut acc = Complex64::new(0.0, 0.0);
                for (h, vh) in v.iter().enumerate() {
                    acc += u.get(g, h) * vh;
                }
                mat.set(idx(base, g), c, acc);
            }
        }
    }
    for r in 0..dim {
        for base in 0..dim {
            if base & both != 0 {
                continue;
            }
            for (g, slot) in v.iter_mut().enumerate() {
                *slot = mat.get(r, idx(base, g));
            }
            for g in 0..4 {
                let mut acc = Complex64::new(0.0, 0.0);
                for (h, vh) in v.iter().enumerate() {
                    acc += vh * u.get(g, h).conj();
                }
                mat.set(r, idx(base, g), acc);
            }
        }
    }
}

impl Circuit {
    /// Validates sizes, probabilities, and every gate's unitarity.
    pub fn check(&self) -> Result<(), CircuitError> {
        if self.n == 0 || self.n > MAX_QUBITS {
            return Err(CircuitError::NOutOfRange(self.n));
        }
        if !(0.0..=1.0).contains(&self.w) || self.w.is_nan() {
            return Err(CircuitError::BadProbability(self.w));
        }
        for gate in &self.gates {
            gate.check(self.n)?;
        }
        Ok(())
    }

    /// Number of distinct qubits addressed by at least one two-qubit gate
    /// (single-qubit gates are noiseless and do not count).
    pub fn touched_qubits(&self) -> usize {
        let mut mask = 0u64;
        for gate in &self.gates {
            if let Gate::U2 { qi, qj, .. } = gate {
                mask |= (1 << qi) | (1 << qj);
            }
        }
        mask.count_ones() as usize
    }

    /// Runs the noisy circuit. Single-qubit gates conjugate exactly; each
    /// two-qubit gate becomes `(1 - w) U rho U^dag + w (E_i . E_j)(rho)`
    /// where the local error `E` acts on the pre-gate state.
    pub fn simulate(&self) -> Result<DensityMatrix, CircuitError> {
        self.check()?;
        if !self.init.separable_by_construction() {
            return Err(CircuitError::InitNotSeparable);
        }
        let init = self.init.build()?;
        if init.n() != self.n {
            return Err(CircuitError::InitSizeMismatch {
                got: init.n(),
                want: self.n,
            });
        }
        let n = self.n;
        let kind = self.error_model.kind();
        let mut rho = init;
        for gate in &self.gates {
            match gate {
                Gate::U1 { q, m } => {
                    let mut next = rho.mat().clone();
                    apply_u1(&mut next, n, *q, m);
                    rho = DensityMatrix::from_parts(n, next);
                }
                Gate::U2 { qi, qj, m } => {
                    let mut clean = rho.mat().clone();
                    apply_u2(&mut clean, n, *qi, *qj, m);
                    if self.w == 0.0 {
                        rho = DensityMatrix::from_parts(n, clean);
                        continue;
                    }
                    let err = crate::channels::local_on_mat(
                        &crate::channels::local_on_mat(rho.mat(), 1 << (n - qi), kind),
                        1 << (n - qj),
                        kind,
                    );
                    let mut mixed = clean.scale(Complex64::new(1.0 - self.w, 0.0));
                    mixed.add_assign_scaled(&err, Complex64::new(self.w, 0.0));
                    rho = DensityMatrix::from_parts(n, mixed);
                }
            }
        }
        Ok(rho)
    }
}

/// The gate-model decay ceiling evaluated against a measured fragility.
#[derive(Debug, Clone, Serialize)]
pub struct HauptVerdict {
    pub n: usize,
    pub w: f64,
    pub e_estimate: f64,
    /// Worst-case ceiling over all touched counts.
    pub bound: f64,
    pub passes: bool,
    /// Distinct qubits addressed by this circuit's two-qubit gates.
    pub touched: usize,
    /// Sharper ceiling using the actual touched count.
    pub touched_bound: f64,
    pub touched_passes: bool,
}

/// Tolerance on the ceiling comparisons: estimate noise is far below this.
pub const HAUPT_TOL: f64 = 1e-6;

/// Compares a measured fragility report (produced from this circuit's
/// simulated output) against both forms of the decay ceiling.
pub fn verify_haupt(
    circuit: &Circuit,
    report: &FragilityReport,
) -> Result<HauptVerdict, CircuitError> {
    circuit.check()?;
    if report.n != circuit.n {
        return Err(CircuitError::ReportMismatch {
            report_n: report.n,
            circuit_n: circuit.n,
        });
    }
    let bound = haupt_x(circuit.n, circuit.w)?;
    let touched = circuit.touched_qubits();
    let touched_bound = haupt_term(circuit.n, circuit.w, touched)?;
    Ok(HauptVerdict {
        n: circuit.n,
        w: circuit.w,
        e_estimate: report.e_estimate,
        bound,
        passes: report.e_estimate <= bound + HAUPT_TOL,
        touched,
        touched_bound,
        touched_passes: report.e_estimate <= touched_bound + HAUPT_TOL,
    })
}

fn hadamard() -> ComplexMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(2, |r, c| {
        Complex64::new(if r == 1 && c == 1 { -h } else { h }, 0.0)
    })
}

fn cnot() -> ComplexMatrix {
    // control is the first (more significant) gate index
    let rows = [0usize, 1, 3, 2];
    ComplexMatrix::from_fn(4, |r, c| {
        Complex64::new(if rows[c] == r { 1.0 } else { 0.0 }, 0.0)
    })
}

/// Hadamard on qubit 1 plus a CNOT chain: prepares the cat state at `w = 0`.
pub fn cat_prep_circuit(n: usize, w: f64, error_model: ErrorModel) -> Circuit {
    let mut gates = vec![Gate::U1 {
        q: 1,
        m: hadamard(),
    }];
    for q in 1..n {
        gates.push(Gate::U2 {
            qi: q,
            qj: q + 1,
            m: cnot(),
        });
    }
    Circuit {
        n,
        w,
        error_model,
        init: StateSpec::Basis {
            word: "0".repeat(n),
        },
        gates,
    }
}

/// Random circuit on a random separable start: geometric gate count with
/// mean `3n`, each gate a Haar unitary, two-qubit with probability 1/2
/// (qubit pairs uniform).
pub fn random_circuit(n: usize, w: f64, error_model: ErrorModel, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let init = StateSpec::Separable {
        n,
        terms: rng.gen_range(1..=3),
        seed: rng.gen(),
    };
    let mean = 3 * n;
    // geometric on {0, 1, ...} with success probability 1/(mean + 1)
    let p = 1.0 / (mean as f64 + 1.0);
    let mut count = 0usize;
    while rng.gen::<f64>() >= p {
        count += 1;
    }
    let mut gates = Vec::with_capacity(count);
    for _ in 0..count {
        if n >= 2 && rng.gen_bool(0.5) {
            let qi = rng.gen_range(1..=n);
            let qj = loop {
                let q = rng.gen_range(1..=n);
                if q != qi {
                    break q;
                }
            };
            gates.push(Gate::U2 {
                qi,
                qj,
                m: random_unitary(4, &mut rng),
            });
        } else {
            gates.push(Gate::U1 {
                q: rng.gen_range(1..=n),
                m: random_unitary(2, &mut rng),
            });
        }
    }
    Circuit {
        n,
        w,
        error_model,
        init,
        gates,
    }
}
