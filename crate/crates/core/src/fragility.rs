//! The fragility functional `e` and the decay bounds it obeys under local
//! noise. For a fixed projector family the inner supremum over the bounded
//! observable `b` is a trace norm, so only the family angles need searching.

use crate::linalg::{
    hermitian_eigen, hermitian_eigenvalues, ComplexMatrix, LinalgError,
};
use crate::observables::{
    bloch_projector, i_commutator_with_average, AveragingObservable, BlochFamily, FamilySpec,
    ObservableError,
};
use crate::optim::{maximize, SimplexOptions};
use crate::sampling::random_bloch_family;
use crate::states::DensityMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

/// Values this close to 1 stop the search; the functional never exceeds 1.
const CEILING: f64 = 1.0 - 1e-13;

#[derive(Debug, Error)]
pub enum FragilityError {
    #[error("observable is over {got} qubits but the state has {want}")]
    QubitCountMismatch { got: usize, want: usize },
    #[error("subset size {l} outside 1..={n}")]
    BadSubsetSize { l: usize, n: usize },
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("alpha {0} outside the open interval (0, 1)")]
    BadAlpha(f64),
    #[error("need at least one qubit")]
    ZeroQubits,
    #[error("operator norm {0} exceeds 1; the probe must lie in the unit ball")]
    ProbeNotInBall(f64),
    #[error(transparent)]
    Observable(#[from] ObservableError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Exact inner supremum for a fixed family: the trace norm of
/// `H = i [rho, Qbar]`, attained by the sign observable of `H`'s spectrum.
/// Returns the value and that optimal `b` (a reflection, operator norm 1).
pub fn inner_sup(
    rho: &DensityMatrix,
    obs: &AveragingObservable,
) -> Result<(f64, ComplexMatrix), FragilityError> {
    if obs.n() != rho.n() {
        return Err(FragilityError::QubitCountMismatch {
            got: obs.n(),
            want: rho.n(),
        });
    }
    let h = i_commutator_with_average(rho.mat(), obs.projectors());
    let eig = hermitian_eigen(&h)?;
    let value: f64 = eig.values.iter().map(|v| v.abs()).sum();
    // b = V sign(Lambda) V^dag; zero eigenvalues get +1 so b stays a reflection
    let dim = h.dim();
    let v = &eig.vectors;
    let mut signed = v.clone();
    for c in 0..dim {
        if eig.values[c] < 0.0 {
            for r in 0..dim {
                let z = -signed.get(r, c);
                signed.set(r, c, z);
            }
        }
    }
    let b = signed.matmul(&v.adjoint())?;
    Ok((value, b))
}

fn family_objective(rho: &ComplexMatrix, raw_angles: &[f64]) -> f64 {
    let projectors: Vec<ComplexMatrix> = raw_angles
        .chunks(2)
        .map(|p| bloch_projector(p[0], p[1]))
        .collect();
    let h = i_commutator_with_average(rho, &projectors);
    hermitian_eigenvalues(&h)
        .expect("i[rho, Qbar] is Hermitian for Hermitian inputs")
        .iter()
        .map(|v| v.abs())
        .sum()
}

/// Whether the search runs over all families or pins the canonical one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchScope {
    /// Multi-start simplex over all `2n` Bloch angles.
    Full,
    /// Only the all-|1><1| family; no optimization.
    CanonicalP,
}

#[derive(Debug, Clone)]
pub struct EstimateConfig {
    /// Simplex restarts: the z family, the canonical family, then random.
    pub restarts: usize,
    /// Objective evaluation budget per restart.
    pub max_evals: usize,
    /// Simplex spread tolerance.
    pub value_tol: f64,
    /// Seeds the random restarts.
    pub seed: u64,
    pub scope: SearchScope,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        EstimateConfig {
            restarts: 16,
            max_evals: 5000,
            value_tol: 1e-9,
            seed: 0,
            scope: SearchScope::Full,
        }
    }
}

/// Outcome of a fragility search. `e_estimate` is a certified lower bound on
/// the supremum: the reported family and `witness_b` attain it.
#[derive(Debug, Clone, Serialize)]
pub struct FragilityReport {
    /// Qubit count of the measured state.
    pub n: usize,
    #[serde(rename = "e")]
    pub e_estimate: f64,
    pub witness_family: FamilySpec,
    #[serde(skip)]
    pub witness_b: ComplexMatrix,
    /// Starting points probed, counting the canonical probe.
    pub starts: usize,
    pub converged: bool,
}

/// Lower-bounds the fragility of `rho` by multi-start simplex search over
/// projector families, with the exact trace-norm inner step. Deterministic
/// for a fixed config.
pub fn estimate_e(
    rho: &DensityMatrix,
    config: &EstimateConfig,
) -> Result<FragilityReport, FragilityError> {
    let n = rho.n();
    let canonical = AveragingObservable::canonical_p(n);
    let (p_value, p_witness) = inner_sup(rho, &canonical)?;

    let mut best = FragilityReport {
        n,
        e_estimate: p_value,
        witness_family: FamilySpec::canonical_p(),
        witness_b: p_witness,
        starts: 1,
        converged: true,
    };
    if config.scope == SearchScope::CanonicalP || best.e_estimate >= CEILING {
        return Ok(best);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let opts = SimplexOptions {
        max_evals: config.max_evals,
        value_tol: config.value_tol,
        initial_step: 0.5,
        target: Some(CEILING),
    };
    for start_idx in 0..config.restarts {
        // the random generator advances every iteration so restart k draws
        // the same start regardless of short-circuits in earlier runs
        let random_start: Vec<f64> = random_bloch_family(n, &mut rng)
            .angles()
            .iter()
            .flat_map(|&(t, p)| [t, p])
            .collect();
        let x0: Vec<f64> = match start_idx {
            0 => vec![0.0; 2 * n],
            1 => (0..n).flat_map(|_| [std::f64::consts::PI, 0.0]).collect(),
            _ => random_start,
        };
        let run = maximize(|x| family_objective(rho.mat(), x), &x0, &opts);
        best.starts += 1;
        if run.value > best.e_estimate {
            let family = BlochFamily::from_unnormalized(&run.x);
            let obs = AveragingObservable::from_family(&family);
            let (value, witness) = inner_sup(rho, &obs)?;
            if value > best.e_estimate {
                best.e_estimate = value;
                best.witness_family = FamilySpec::Angles {
                    angles: family.angles().to_vec(),
                };
                best.witness_b = witness;
                best.converged = run.converged;
            }
        }
        if best.e_estimate >= CEILING {
            break;
        }
    }
    Ok(best)
}

/// Report for the separability threshold `2 / sqrt(n)`: any state whose
/// commutator expectation exceeds it cannot be a product of single-qubit
/// states.
#[derive(Debug, Clone, Serialize)]
pub struct HypersurfaceReport {
    pub value: f64,
    pub threshold: f64,
    pub exceeds: bool,
}

/// Evaluates `i tr(rho [Qbar, c])` against the product-state threshold.
/// `c` must lie in the unit operator-norm ball (tolerance 1e-9).
pub fn hypersurface_check(
    rho: &DensityMatrix,
    obs: &AveragingObservable,
    c: &ComplexMatrix,
) -> Result<HypersurfaceReport, FragilityError> {
    let norm = crate::linalg::operator_norm(c)?;
    if norm > 1.0 + 1e-9 {
        return Err(FragilityError::ProbeNotInBall(norm));
    }
    let value = crate::observables::commutator_expectation(rho, obs.mat(), c)?;
    let threshold = 2.0 / (rho.n() as f64).sqrt();
    Ok(HypersurfaceReport {
        value,
        threshold,
        // a small guard keeps borderline product states from tipping over
        // on rounding noise
        exceeds: value.abs() > threshold + 1e-12,
    })
}

/// `(2/n) sqrt(sum_i l_i^2)` for cluster sizes `l_i`: the fragility ceiling
/// for states separable across the given partition.
pub fn cluster_bound(partition: &[Vec<usize>]) -> Result<f64, FragilityError> {
    let n: usize = partition.iter().map(Vec::len).sum();
    if n == 0 {
        return Err(FragilityError::ZeroQubits);
    }
    let sum_sq: f64 = partition.iter().map(|c| (c.len() * c.len()) as f64).sum();
    Ok(2.0 / n as f64 * sum_sq.sqrt())
}

/// Fragility ceiling after dephasing a uniformly random size-`l` subset:
/// `(1/sqrt(l)) sqrt((n - l) / (n - 1))`. Zero when `n = 1` or `l = n`.
pub fn gl_bound(n: usize, l: usize) -> Result<f64, FragilityError> {
    if n == 0 {
        return Err(FragilityError::ZeroQubits);
    }
    if l == 0 || l > n {
        return Err(FragilityError::BadSubsetSize { l, n });
    }
    if n == 1 {
        return Ok(0.0);
    }
    Ok((((n - l) as f64) / ((n - 1) as f64)).sqrt() / (l as f64).sqrt())
}

/// Standard deviation of the overlap fraction when drawing `l` of `n`
/// positions without replacement, with a marked fraction `p`:
/// `sqrt((n-l) / (l (n-1)) * p (1-p))`.
pub fn hypergeom_sigma(n: usize, l: usize, p: f64) -> Result<f64, FragilityError> {
    if n == 0 {
        return Err(FragilityError::ZeroQubits);
    }
    if l == 0 || l > n {
        return Err(FragilityError::BadSubsetSize { l, n });
    }
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(FragilityError::BadProbability(p));
    }
    if n == 1 {
        return Ok(0.0);
    }
    Ok((((n - l) as f64) / ((l * (n - 1)) as f64) * p * (1.0 - p)).sqrt())
}

/// Fragility ceiling after independent dephasing of strength `w`:
/// the binomial average of `gl_bound` plus the no-error weight.
/// Computed in log space, so it is stable for very large `n`.
pub fn r_wn(n: usize, w: f64) -> Result<f64, FragilityError> {
    if n == 0 {
        return Err(FragilityError::ZeroQubits);
    }
    if !(0.0..=1.0).contains(&w) || w.is_nan() {
        return Err(FragilityError::BadProbability(w));
    }
    if w == 0.0 {
        return Ok(1.0);
    }
    if w == 1.0 {
        return gl_bound(n, n);
    }
    // ln of the binomial weight, advanced l -> l + 1 by one ratio step
    let ln_ratio = w.ln() - (-w).ln_1p();
    let mut ln_b = (n as f64) * (-w).ln_1p();
    let mut total = ln_b.exp(); // l = 0 contributes the no-error weight
    for l in 1..=n {
        ln_b += (((n - l + 1) as f64) / l as f64).ln() + ln_ratio;
        total += ln_b.exp() * gl_bound(n, l)?;
    }
    Ok(total)
}

/// `1 / (w n (1-alpha)^2) + 1 / sqrt(n w alpha)`: the closed-form large-`n`
/// envelope for the dephasing decay, with a free split point `alpha`.
pub fn asymptotic_bound(n: usize, w: f64, alpha: f64) -> Result<f64, FragilityError> {
    if n == 0 {
        return Err(FragilityError::ZeroQubits);
    }
    if !(w > 0.0 && w <= 1.0) {
        return Err(FragilityError::BadProbability(w));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(FragilityError::BadAlpha(alpha));
    }
    let nf = n as f64;
    Ok(1.0 / (w * nf * (1.0 - alpha) * (1.0 - alpha)) + 1.0 / (nf * w * alpha).sqrt())
}

/// One term of the gate-model ceiling: `(r_wk k + sqrt(n - k)) / n` for a
/// circuit that touches `k` of the `n` qubits.
pub fn haupt_term(n: usize, w: f64, k: usize) -> Result<f64, FragilityError> {
    if n == 0 {
        return Err(FragilityError::ZeroQubits);
    }
    if k > n {
        return Err(FragilityError::BadSubsetSize { l: k, n });
    }
    let touched = if k == 0 { 0.0 } else { r_wn(k, w)? * k as f64 };
    Ok((touched + ((n - k) as f64).sqrt()) / n as f64)
}

/// Gate-model fragility ceiling: the worst `haupt_term` over all touched
/// counts `k`. Quadratic in `n`.
pub fn haupt_x(n: usize, w: f64) -> Result<f64, FragilityError> {
    let mut best: f64 = 0.0;
    for k in 0..=n {
        best = best.max(haupt_term(n, w, k)?);
    }
    Ok(best)
}

/// How close `samples` random unit-ball probes get to the exact inner
/// supremum for a fixed family.
#[derive(Debug, Clone, Serialize)]
pub struct DualityProbe {
    pub exact: f64,
    pub best_random: f64,
    pub samples: usize,
}

/// Samples Haar-rotated unit-spectrum observables and compares the best
/// commutator expectation they reach against the trace-norm value.
pub fn oracle_random_b(
    rho: &DensityMatrix,
    obs: &AveragingObservable,
    samples: usize,
    seed: u64,
) -> Result<DualityProbe, FragilityError> {
    let (exact, _) = inner_sup(rho, obs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = i_commutator_with_average(rho.mat(), obs.projectors());
    let dim = h.dim();
    let mut best_random: f64 = 0.0;
    for _ in 0..samples {
        let b = crate::sampling::random_unit_hermitian(dim, &mut rng);
        // tr(H b) is the commutator expectation, H precomputed
        let mut t = Complex64::new(0.0, 0.0);
        for r in 0..dim {
            let row = h.row(r);
            for c in 0..dim {
                t += row[c] * b.get(c, r);
            }
        }
        best_random = best_random.max(t.re.abs());
    }
    Ok(DualityProbe {
        exact,
        best_random,
        samples,
    })
}

/// One row of precomputed decay ceilings for a given size and noise level.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub n: usize,
    pub w: f64,
    pub r_wn: f64,
    pub alpha: f64,
    pub asymptotic: f64,
    pub haupt_x: f64,
}

/// Evaluates every bound on the grid `ns x ws` with a shared `alpha`.
pub fn bound_table(ns: &[usize], ws: &[f64], alpha: f64) -> Result<Vec<BoundRow>, FragilityError> {
    let mut rows = Vec::with_capacity(ns.len() * ws.len());
    for &n in ns {
        for &w in ws {
            rows.push(BoundRow {
                n,
                w,
                r_wn: r_wn(n, w)?,
                alpha,
                asymptotic: if w == 0.0 {
                    f64::INFINITY
                } else {
                    asymptotic_bound(n, w, alpha)?
                },
                haupt_x: haupt_x(n, w)?,
            });
        }
    }
    Ok(rows)
}
