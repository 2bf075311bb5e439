//! Local error channels and their products. Each channel touches single
//! qubits only, so everything is applied by index arithmetic on the dense
//! matrix, never by building the channel as a superoperator.

use crate::linalg::ComplexMatrix;
use crate::states::DensityMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("qubit {qubit} out of range 1..={n}")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("subset size {l} outside 1..={n}")]
    BadSubsetSize { l: usize, n: usize },
    #[error("monte carlo mode needs at least one sample")]
    ZeroSamples,
    #[error("`samples`/`seed` only apply to monte_carlo mode")]
    SamplesRequireMonteCarlo,
    #[error("monte_carlo mode requires `samples`")]
    MissingSamples,
}

/// Single-qubit error applied at one site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalErrorKind {
    /// Kills coherences where the qubit's bit differs.
    Dephase,
    /// Conjugation by X on the qubit.
    BitFlip,
    /// Dephase, then mix with the bit-flipped copy; sends the qubit to I/2.
    Depolarize,
}

fn check_qubit(qubit: usize, n: usize) -> Result<usize, ChannelError> {
    if qubit == 0 || qubit > n {
        return Err(ChannelError::QubitOutOfRange { qubit, n });
    }
    // qubit 1 is the most significant bit of the index
    Ok(1usize << (n - qubit))
}

fn check_probability(w: f64) -> Result<(), ChannelError> {
    if !(0.0..=1.0).contains(&w) || w.is_nan() {
        return Err(ChannelError::BadProbability(w));
    }
    Ok(())
}

pub(crate) fn local_on_mat(mat: &ComplexMatrix, mask: usize, kind: LocalErrorKind) -> ComplexMatrix {
    let dim = mat.dim();
    match kind {
        LocalErrorKind::Dephase => ComplexMatrix::from_fn(dim, |r, c| {
            if (r ^ c) & mask != 0 {
                Complex64::new(0.0, 0.0)
            } else {
                mat.get(r, c)
            }
        }),
        LocalErrorKind::BitFlip => {
            ComplexMatrix::from_fn(dim, |r, c| mat.get(r ^ mask, c ^ mask))
        }
        LocalErrorKind::Depolarize => ComplexMatrix::from_fn(dim, |r, c| {
            if (r ^ c) & mask != 0 {
                Complex64::new(0.0, 0.0)
            } else {
                (mat.get(r, c) + mat.get(r ^ mask, c ^ mask)) * 0.5
            }
        }),
    }
}

/// Applies one local error at `qubit` (1-based, qubit 1 = most significant).
pub fn apply_local(
    rho: &DensityMatrix,
    qubit: usize,
    kind: LocalErrorKind,
) -> Result<DensityMatrix, ChannelError> {
    let mask = check_qubit(qubit, rho.n())?;
    Ok(DensityMatrix::from_parts(
        rho.n(),
        local_on_mat(rho.mat(), mask, kind),
    ))
}

// w * E_i(rho) + (1 - w) * rho, in place on a matrix
fn convex_factor(mat: &ComplexMatrix, mask: usize, kind: LocalErrorKind, w: f64) -> ComplexMatrix {
    let noisy = local_on_mat(mat, mask, kind);
    mat.scale(Complex64::new(1.0 - w, 0.0))
        .add(&noisy.scale(Complex64::new(w, 0.0)))
        .expect("same dimension")
}

/// Independent dephasing: every qubit dephases with probability `w`.
pub fn apply_g(rho: &DensityMatrix, w: f64) -> Result<DensityMatrix, ChannelError> {
    check_probability(w)?;
    let n = rho.n();
    let mut mat = rho.mat().clone();
    for qubit in 1..=n {
        mat = convex_factor(&mat, 1 << (n - qubit), LocalErrorKind::Dephase, w);
    }
    Ok(DensityMatrix::from_parts(n, mat))
}

/// Independent depolarizing: every qubit depolarizes with probability `w`.
pub fn apply_d(rho: &DensityMatrix, w: f64) -> Result<DensityMatrix, ChannelError> {
    check_probability(w)?;
    let n = rho.n();
    let mut mat = rho.mat().clone();
    for qubit in 1..=n {
        mat = convex_factor(&mat, 1 << (n - qubit), LocalErrorKind::Depolarize, w);
    }
    Ok(DensityMatrix::from_parts(n, mat))
}

/// How subset channels average over the `C(n, l)` qubit subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SubsetMode {
    /// Enumerates every subset. Cost grows as `C(n, l)`.
    Exact,
    /// Averages over `samples` uniform subsets drawn from `seed`.
    MonteCarlo { samples: usize, seed: u64 },
}

/// Which averaging strategy actually ran.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApplyMode {
    Exact,
    MonteCarlo,
}

/// A channel application together with how much averaging it did.
#[derive(Debug, Clone)]
pub struct InstrumentResult {
    pub state: DensityMatrix,
    pub mode: ApplyMode,
    /// Subsets averaged (or local factors applied, for the product channels).
    pub branches: usize,
    pub seed: Option<u64>,
}

// Lexicographic size-l subsets of {1, ..., n}, each passed as a sorted slice.
pub(crate) fn for_each_subset(n: usize, l: usize, mut f: impl FnMut(&[usize])) {
    let mut c: Vec<usize> = (1..=l).collect();
    loop {
        f(&c);
        // rightmost position that can still move up
        let mut i = l;
        while i > 0 && c[i - 1] == n - (l - i) {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        c[i - 1] += 1;
        for j in i..l {
            c[j] = c[j - 1] + 1;
        }
    }
}

fn subset_average(
    rho: &DensityMatrix,
    l: usize,
    mode: &SubsetMode,
    kind: LocalErrorKind,
) -> Result<InstrumentResult, ChannelError> {
    let n = rho.n();
    if l == 0 || l > n {
        return Err(ChannelError::BadSubsetSize { l, n });
    }
    let apply_subset = |subset: &[usize]| -> ComplexMatrix {
        let mut mat = rho.mat().clone();
        for &qubit in subset {
            mat = local_on_mat(&mat, 1 << (n - qubit), kind);
        }
        mat
    };
    match mode {
        SubsetMode::Exact => {
            let mut acc = ComplexMatrix::zeros(rho.dim());
            let mut count = 0usize;
            for_each_subset(n, l, |subset| {
                acc.add_assign_scaled(&apply_subset(subset), Complex64::new(1.0, 0.0));
                count += 1;
            });
            acc.scale_mut(Complex64::new(1.0 / count as f64, 0.0));
            Ok(InstrumentResult {
                state: DensityMatrix::from_parts(n, acc),
                mode: ApplyMode::Exact,
                branches: count,
                seed: None,
            })
        }
        SubsetMode::MonteCarlo { samples, seed } => {
            if *samples == 0 {
                return Err(ChannelError::ZeroSamples);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let mut acc = ComplexMatrix::zeros(rho.dim());
            for _ in 0..*samples {
                let mut subset: Vec<usize> = rand::seq::index::sample(&mut rng, n, l)
                    .into_iter()
                    .map(|q| q + 1)
                    .collect();
                subset.sort_unstable();
                acc.add_assign_scaled(&apply_subset(&subset), Complex64::new(1.0, 0.0));
            }
            acc.scale_mut(Complex64::new(1.0 / *samples as f64, 0.0));
            Ok(InstrumentResult {
                state: DensityMatrix::from_parts(n, acc),
                mode: ApplyMode::MonteCarlo,
                branches: *samples,
                seed: Some(*seed),
            })
        }
    }
}

/// Uniform average of full dephasing on every size-`l` qubit subset.
pub fn apply_gl(
    rho: &DensityMatrix,
    l: usize,
    mode: &SubsetMode,
) -> Result<InstrumentResult, ChannelError> {
    subset_average(rho, l, mode, LocalErrorKind::Dephase)
}

/// Uniform average of full depolarizing on every size-`l` qubit subset.
pub fn apply_dl(
    rho: &DensityMatrix,
    l: usize,
    mode: &SubsetMode,
) -> Result<InstrumentResult, ChannelError> {
    subset_average(rho, l, mode, LocalErrorKind::Depolarize)
}

/// `C(n, l) w^l (1 - w)^(n - l)`, stable for large `n` via log-space sums.
pub fn binomial_weight(n: usize, w: f64, l: usize) -> Result<f64, ChannelError> {
    check_probability(w)?;
    if l > n {
        return Ok(0.0);
    }
    if w == 0.0 {
        return Ok(if l == 0 { 1.0 } else { 0.0 });
    }
    if w == 1.0 {
        return Ok(if l == n { 1.0 } else { 0.0 });
    }
    let l_small = l.min(n - l);
    let ln_choose: f64 = (1..=l_small)
        .map(|j| (((n - l_small + j) as f64) / j as f64).ln())
        .sum();
    Ok((ln_choose + (l as f64) * w.ln() + ((n - l) as f64) * (1.0 - w).ln()).exp())
}

/// JSON description of one channel application.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "channel", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    G {
        w: f64,
    },
    D {
        w: f64,
    },
    Gl {
        l: usize,
        #[serde(default)]
        mode: Option<ApplyMode>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Dl {
        l: usize,
        #[serde(default)]
        mode: Option<ApplyMode>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        samples: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

fn resolve_mode(
    mode: Option<ApplyMode>,
    samples: Option<usize>,
    seed: Option<u64>,
) -> Result<SubsetMode, ChannelError> {
    match mode.unwrap_or(ApplyMode::Exact) {
        ApplyMode::Exact => {
            if samples.is_some() || seed.is_some() {
                return Err(ChannelError::SamplesRequireMonteCarlo);
            }
            Ok(SubsetMode::Exact)
        }
        ApplyMode::MonteCarlo => Ok(SubsetMode::MonteCarlo {
            samples: samples.ok_or(ChannelError::MissingSamples)?,
            seed: seed.unwrap_or(0),
        }),
    }
}

impl ChannelSpec {
    pub fn apply(&self, rho: &DensityMatrix) -> Result<InstrumentResult, ChannelError> {
        match self {
            ChannelSpec::G { w } => Ok(InstrumentResult {
                state: apply_g(rho, *w)?,
                mode: ApplyMode::Exact,
                branches: rho.n(),
                seed: None,
            }),
            ChannelSpec::D { w } => Ok(InstrumentResult {
                state: apply_d(rho, *w)?,
                mode: ApplyMode::Exact,
                branches: rho.n(),
                seed: None,
            }),
            ChannelSpec::Gl {
                l,
                mode,
                samples,
                seed,
            } => apply_gl(rho, *l, &resolve_mode(*mode, *samples, *seed)?),
            ChannelSpec::Dl {
                l,
                mode,
                samples,
                seed,
            } => apply_dl(rho, *l, &resolve_mode(*mode, *samples, *seed)?),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::random_density;
    use crate::states::{basis_state, cat_state, maximally_mixed, BinaryWord, DensityMatrix};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn word(s: &str) -> BinaryWord {
        BinaryWord::parse(s).unwrap()
    }

    fn rand_rho(n: usize, seed: u64) -> DensityMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_density(n, 1 << n, &mut rng)
    }

    #[test]
    fn dephase_kills_cat_coherence_qubit_by_qubit() {
        let cat = cat_state(2).unwrap();
        let out = apply_local(&cat, 1, LocalErrorKind::Dephase).unwrap();
        let m = out.mat();
        assert_eq!(m.get(0, 0).re, 0.5);
        assert_eq!(m.get(3, 3).re, 0.5);
        assert_eq!(m.get(0, 3).norm(), 0.0);
        assert_eq!(m.get(3, 0).norm(), 0.0);
        // dephasing any single qubit of a cat state kills both coherences
        let again = apply_local(&out, 1, LocalErrorKind::Dephase).unwrap();
        assert_eq!(again.mat().sub(m).unwrap().max_abs(), 0.0, "idempotent");
    }

    #[test]
    fn bitflip_permutes_basis_states() {
        let rho = basis_state(&word("00")).unwrap();
        let out = apply_local(&rho, 2, LocalErrorKind::BitFlip).unwrap();
        let expected = basis_state(&word("01")).unwrap();
        assert_eq!(out.mat().sub(expected.mat()).unwrap().max_abs(), 0.0);
        let out = apply_local(&rho, 1, LocalErrorKind::BitFlip).unwrap();
        let expected = basis_state(&word("10")).unwrap();
        assert_eq!(out.mat().sub(expected.mat()).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn depolarize_sends_any_qubit_to_identity() {
        // n = 1: every input lands on I/2
        for seed in 0..5 {
            let rho = rand_rho(1, seed);
            let out = apply_local(&rho, 1, LocalErrorKind::Depolarize).unwrap();
            let mm = maximally_mixed(1).unwrap();
            assert!(out.mat().sub(mm.mat()).unwrap().max_abs() < 1e-15);
        }
    }

    #[test]
    fn g_is_entrywise_hamming_decay() {
        let rho = rand_rho(4, 11);
        let w = 0.37;
        let out = apply_g(&rho, w).unwrap();
        for r in 0..16 {
            for c in 0..16 {
                let d = ((r ^ c) as u32).count_ones();
                let expected = rho.mat().get(r, c) * (1.0 - w).powi(d as i32);
                assert!((out.mat().get(r, c) - expected).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn g_factor_order_is_irrelevant() {
        let rho = rand_rho(3, 4);
        let w = 0.6;
        let fold = |order: &[usize]| {
            let mut acc = rho.clone();
            for &q in order {
                let noisy = apply_local(&acc, q, LocalErrorKind::Dephase).unwrap();
                acc = DensityMatrix::mixture(&[(w, &noisy), (1.0 - w, &acc)]).unwrap();
            }
            acc
        };
        let a = fold(&[1, 2, 3]);
        let b = fold(&[3, 1, 2]);
        assert!(a.mat().sub(b.mat()).unwrap().max_abs() < 1e-15);
        let direct = apply_g(&rho, w).unwrap();
        assert!(a.mat().sub(direct.mat()).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn d_at_full_strength_is_maximally_mixed() {
        for n in 1..=4 {
            let rho = rand_rho(n, n as u64);
            let out = apply_d(&rho, 1.0).unwrap();
            let mm = maximally_mixed(n).unwrap();
            assert!(out.mat().sub(mm.mat()).unwrap().max_abs() < 1e-14);
        }
    }

    #[test]
    fn channels_preserve_validity() {
        let rho = rand_rho(3, 9);
        for kind in [
            LocalErrorKind::Dephase,
            LocalErrorKind::BitFlip,
            LocalErrorKind::Depolarize,
        ] {
            let out = apply_local(&rho, 2, kind).unwrap();
            assert!(out.validate().pass, "{kind:?} broke the state");
        }
        assert!(apply_g(&rho, 0.3).unwrap().validate().pass);
        assert!(apply_d(&rho, 0.3).unwrap().validate().pass);
    }

    #[test]
    fn subset_enumeration_is_sorted_lexicographic() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![2, 3],
                vec![2, 4],
                vec![3, 4]
            ]
        );
        let mut count = 0;
        for_each_subset(6, 3, |_| count += 1);
        assert_eq!(count, 20);
        let mut full = Vec::new();
        for_each_subset(3, 3, |s| full.push(s.to_vec()));
        assert_eq!(full, vec![vec![1, 2, 3]]);
    }

    #[test]
    fn gl_exact_matches_combinatorial_decay() {
        // entry (r, c) survives in C(n - d, l) of the C(n, l) subsets,
        // where d is the Hamming distance between r and c
        let n = 5;
        let rho = rand_rho(n, 21);
        for l in [1usize, 2, 4, 5] {
            let out = apply_gl(&rho, l, &SubsetMode::Exact).unwrap();
            let choose = |n: usize, k: usize| -> f64 {
                if k > n {
                    return 0.0;
                }
                (1..=k).map(|j| (n - k + j) as f64 / j as f64).product()
            };
            for r in 0..1 << n {
                for c in 0..1 << n {
                    let d = ((r ^ c) as u32).count_ones() as usize;
                    let factor = choose(n - d, l) / choose(n, l);
                    let expected = rho.mat().get(r, c) * factor;
                    assert!(
                        (out.state.mat().get(r, c) - expected).norm() < 1e-13,
                        "l={l} r={r} c={c}"
                    );
                }
            }
            assert_eq!(out.branches, choose(n, l) as usize);
            assert_eq!(out.mode, ApplyMode::Exact);
        }
    }

    #[test]
    fn dl_full_subset_equals_full_depolarizing() {
        let rho = rand_rho(3, 30);
        let out = apply_dl(&rho, 3, &SubsetMode::Exact).unwrap();
        let direct = apply_d(&rho, 1.0).unwrap();
        assert!(out.state.mat().sub(direct.mat()).unwrap().max_abs() < 1e-14);
        assert_eq!(out.branches, 1);
    }

    #[test]
    fn monte_carlo_tracks_exact_average() {
        let cat = cat_state(6).unwrap();
        let exact = apply_gl(&cat, 3, &SubsetMode::Exact).unwrap();
        let mc = apply_gl(
            &cat,
            3,
            &SubsetMode::MonteCarlo {
                samples: 2000,
                seed: 1,
            },
        )
        .unwrap();
        let diff = mc.state.mat().sub(exact.state.mat()).unwrap().max_abs();
        assert!(diff < 0.05, "monte carlo error {diff:.3}");
        assert_eq!(mc.mode, ApplyMode::MonteCarlo);
        assert_eq!(mc.branches, 2000);
        assert_eq!(mc.seed, Some(1));
    }

    #[test]
    fn monte_carlo_reproduces_by_seed() {
        let rho = rand_rho(4, 2);
        let run = |seed: u64| {
            apply_dl(
                &rho,
                2,
                &SubsetMode::MonteCarlo { samples: 50, seed },
            )
            .unwrap()
        };
        assert_eq!(
            run(5).state.mat().sub(run(5).state.mat()).unwrap().max_abs(),
            0.0
        );
        assert!(run(5).state.mat().sub(run(6).state.mat()).unwrap().max_abs() > 1e-6);
    }

    #[test]
    fn binomial_weights_reference_values() {
        assert!((binomial_weight(4, 0.5, 2).unwrap() - 0.375).abs() < 1e-15);
        assert_eq!(binomial_weight(5, 0.0, 0).unwrap(), 1.0);
        assert_eq!(binomial_weight(5, 0.0, 1).unwrap(), 0.0);
        assert_eq!(binomial_weight(5, 1.0, 5).unwrap(), 1.0);
        assert_eq!(binomial_weight(5, 1.0, 4).unwrap(), 0.0);
        assert_eq!(binomial_weight(3, 0.4, 7).unwrap(), 0.0);
        for (n, w) in [(1usize, 0.3), (6, 0.5), (12, 0.07), (40, 0.9)] {
            let total: f64 = (0..=n).map(|l| binomial_weight(n, w, l).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-12, "n={n} w={w}: {total}");
        }
        // large n stays finite and normalized
        let total: f64 = (0..=2000)
            .map(|l| binomial_weight(2000, 0.01, l).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bad_arguments_are_rejected() {
        let rho = rand_rho(3, 1);
        assert!(matches!(
            apply_local(&rho, 0, LocalErrorKind::Dephase),
            Err(ChannelError::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            apply_local(&rho, 4, LocalErrorKind::Dephase),
            Err(ChannelError::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            apply_g(&rho, 1.2),
            Err(ChannelError::BadProbability(_))
        ));
        assert!(matches!(
            apply_g(&rho, -0.1),
            Err(ChannelError::BadProbability(_))
        ));
        assert!(matches!(
            apply_gl(&rho, 0, &SubsetMode::Exact),
            Err(ChannelError::BadSubsetSize { .. })
        ));
        assert!(matches!(
            apply_gl(&rho, 4, &SubsetMode::Exact),
            Err(ChannelError::BadSubsetSize { .. })
        ));
        assert!(matches!(
            apply_gl(
                &rho,
                2,
                &SubsetMode::MonteCarlo {
                    samples: 0,
                    seed: 0
                }
            ),
            Err(ChannelError::ZeroSamples)
        ));
    }

    #[test]
    fn channel_spec_round_trips_and_applies() {
        let rho = rand_rho(2, 3);

        let spec: ChannelSpec = serde_json::from_str(r#"{"channel":"g","w":0.25}"#).unwrap();
        let out = spec.apply(&rho).unwrap();
        assert_eq!(out.branches, 2);
        let direct = apply_g(&rho, 0.25).unwrap();
        assert_eq!(out.state.mat().sub(direct.mat()).unwrap().max_abs(), 0.0);

        let spec: ChannelSpec = serde_json::from_str(r#"{"channel":"dl","l":1}"#).unwrap();
        assert!(spec.apply(&rho).unwrap().branches == 2);

        let spec: ChannelSpec = serde_json::from_str(
            r#"{"channel":"gl","l":2,"mode":"monte_carlo","samples":10,"seed":4}"#,
        )
        .unwrap();
        let out = spec.apply(&rho).unwrap();
        assert_eq!(out.seed, Some(4));

        // missing samples in monte carlo mode
        let spec: ChannelSpec =
            serde_json::from_str(r#"{"channel":"gl","l":2,"mode":"monte_carlo"}"#).unwrap();
        assert!(matches!(spec.apply(&rho), Err(ChannelError::MissingSamples)));

        // samples with exact mode
        let spec: ChannelSpec =
            serde_json::from_str(r#"{"channel":"gl","l":2,"samples":7}"#).unwrap();
        assert!(matches!(
            spec.apply(&rho),
            Err(ChannelError::SamplesRequireMonteCarlo)
        ));

        assert!(serde_json::from_str::<ChannelSpec>(r#"{"channel":"g","w":0.2,"x":1}"#).is_err());
        assert!(serde_json::from_str::<ChannelSpec>(r#"{"channel":"q","w":0.2}"#).is_err());
    }
}
