//! Seeded random generators for matrices, states, and projector families.
//! Everything takes the caller's RNG so runs reproduce exactly from a seed.

use crate::linalg::ComplexMatrix;
use crate::observables::BlochFamily;
use crate::states::{BinaryWord, DensityMatrix};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

fn gaussian_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix by modified
/// Gram-Schmidt. Normalizing each column by its (real, positive) norm fixes
/// the diagonal-phase gauge, which is what makes the distribution Haar.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(dim >= 1);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
        for q in &cols {
            let overlap: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= overlap * qi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 1e-12, "degenerate Gaussian draw");
        for vi in &mut v {
            *vi /= norm;
        }
        cols.push(v);
    }
    ComplexMatrix::from_fn(dim, |r, c| cols[c][r])
}

/// Hermitian matrix with operator norm at most 1: conjugate a uniform
/// [-1, 1] spectrum by a Haar unitary.
pub fn random_unit_hermitian(dim: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let v = random_unitary(dim, rng);
    let spectrum: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let mut scaled = v.clone();
    for c in 0..dim {
        for r in 0..dim {
            let z = scaled.get(r, c) * spectrum[c];
            scaled.set(r, c, z);
        }
    }
    scaled.matmul(&v.adjoint()).unwrap()
}

/// Pure state drawn uniformly from the sphere in dimension `2^n`.
pub fn random_pure_density(n: usize, rng: &mut impl Rng) -> DensityMatrix {
    let dim = 1usize << n;
    let mut v: Vec<Complex64> = (0..dim).map(|_| gaussian_complex(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for vi in &mut v {
        *vi /= norm;
    }
    let mat = ComplexMatrix::from_fn(dim, |r, c| v[r] * v[c].conj());
    DensityMatrix::from_parts(n, mat)
}

/// Mixed state of the given rank: normalized `A A^dag` for a Gaussian
/// `2^n x rank` factor.
pub fn random_density(n: usize, rank: usize, rng: &mut impl Rng) -> DensityMatrix {
    let dim = 1usize << n;
    assert!((1..=dim).contains(&rank), "rank must be in 1..=2^n");
    let a: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| (0..rank).map(|_| gaussian_complex(rng)).collect())
        .collect();
    let mut mat = ComplexMatrix::from_fn(dim, |r, c| {
        (0..rank).map(|k| a[r][k] * a[c][k].conj()).sum()
    });
    let trace = mat.trace().re;
    mat.scale_mut(Complex64::new(1.0 / trace, 0.0));
    DensityMatrix::from_parts(n, mat)
}

/// Projector family with each Bloch axis uniform on the sphere.
pub fn random_bloch_family(n: usize, rng: &mut impl Rng) -> BlochFamily {
    let angles: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let theta = (1.0 - 2.0 * rng.gen::<f64>()).acos();
            let phi = rng.gen::<f64>() * std::f64::consts::TAU;
            (theta, phi)
        })
        .collect();
    BlochFamily::new(angles).expect("angles are in range by construction")
}

/// Splits qubits `1..=n` into `parts` nonempty clusters, uniformly over
/// orderings and cut positions.
pub fn random_partition(n: usize, parts: usize, rng: &mut impl Rng) -> Vec<Vec<usize>> {
    assert!((1..=n).contains(&parts), "parts must be in 1..=n");
    let mut qubits: Vec<usize> = (1..=n).collect();
    qubits.shuffle(rng);
    let mut cuts: Vec<usize> = rand::seq::index::sample(rng, n - 1, parts - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(n);
    cuts.windows(2)
        .map(|w| qubits[w[0]..w[1]].to_vec())
        .collect()
}

/// Uniform computational-basis word on `n` qubits.
pub fn random_basis_word(n: usize, rng: &mut impl Rng) -> BinaryWord {
    BinaryWord::from_index(n, rng.gen_range(0..1usize << n))
}
