#![allow(dead_code)]

use epistemic_qm::classical::{OutcomeSpace, ProbDist};
use epistemic_qm::numerics::ComplexMatrix;
use epistemic_qm::quantum::DensityOperator;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn space(n: usize) -> OutcomeSpace {
    OutcomeSpace::new((0..n).map(|i| format!("y{i}"))).unwrap()
}

/// Random distribution on `n` outcomes; each entry is zero with probability
/// `p_zero`, with at least one positive entry.
pub fn random_dist(rng: &mut impl Rng, n: usize, p_zero: f64) -> ProbDist {
    loop {
        let w: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen_bool(p_zero) {
                    0.0
                } else {
                    rng.gen_range(0.01..1.0)
                }
            })
            .collect();
        let total: f64 = w.iter().sum();
        if total > 0.0 {
            return ProbDist::new(space(n), w.iter().map(|x| x / total).collect()).unwrap();
        }
    }
}

pub fn random_complex(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// `dim × cols` complex matrix, column-major as a list of columns.
pub fn random_columns(rng: &mut impl Rng, dim: usize, cols: usize) -> Vec<Vec<Complex64>> {
    (0..cols)
        .map(|_| (0..dim).map(|_| random_complex(rng)).collect())
        .collect()
}

/// `Σ_k |c_k⟩⟨c_k|` for the given columns.
pub fn gram(cols: &[Vec<Complex64>]) -> ComplexMatrix {
    let dim = cols[0].len();
    cols.iter().fold(ComplexMatrix::zeros(dim), |acc, c| {
        &acc + &ComplexMatrix::outer(c)
    })
}

pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in (i + 1)..dim {
            let z = random_complex(rng);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Random PSD matrix of the given rank.
pub fn random_psd(rng: &mut impl Rng, dim: usize, rank: usize) -> ComplexMatrix {
    gram(&random_columns(rng, dim, rank))
}

pub fn normalise(m: &ComplexMatrix) -> DensityOperator {
    DensityOperator::new(m.scale_real(1.0 / m.trace().re)).unwrap()
}

/// Random density operator of random rank in `1..=dim`.
pub fn random_state(rng: &mut impl Rng, dim: usize) -> DensityOperator {
    let rank = rng.gen_range(1..=dim);
    normalise(&random_psd(rng, dim, rank))
}

/// Random unitary from Gram-Schmidt on random vectors.
pub fn random_unitary(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    while basis.len() < dim {
        let mut v: Vec<Complex64> = (0..dim).map(|_| random_complex(rng)).collect();
        for b in &basis {
            let overlap: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= overlap * bi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    let mut u = ComplexMatrix::zeros(dim);
    for (j, col) in basis.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}

/// `U diag(values) U†`.
pub fn in_basis(u: &ComplexMatrix, values: &[f64]) -> ComplexMatrix {
    &(u * &ComplexMatrix::diagonal(values)) * &u.adjoint()
}

/// Complex Gauss-Jordan inverse with partial pivoting.
pub fn inverse(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.dim();
    let mut a = m.clone();
    let mut inv = ComplexMatrix::identity(n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .unwrap();
        for k in 0..n {
            let t = a[(col, k)];
            a[(col, k)] = a[(pivot, k)];
            a[(pivot, k)] = t;
            let t = inv[(col, k)];
            inv[(col, k)] = inv[(pivot, k)];
            inv[(pivot, k)] = t;
        }
        let d = a[(col, col)];
        for k in 0..n {
            a[(col, k)] /= d;
            inv[(col, k)] /= d;
        }
        for i in 0..n {
            if i != col {
                let f = a[(i, col)];
                for k in 0..n {
                    let ak = a[(col, k)];
                    let ik = inv[(col, k)];
                    a[(i, k)] -= f * ak;
                    inv[(i, k)] -= f * ik;
                }
            }
        }
    }
    inv
}

/// Principal square root of a positive-definite matrix by the Denman-Beavers
/// iteration; independent of any eigendecomposition.
pub fn denman_beavers_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    let mut y = m.clone();
    let mut z = ComplexMatrix::identity(m.dim());
    for _ in 0..100 {
        let y_next = (&y + &inverse(&z)).scale_real(0.5);
        let z_next = (&z + &inverse(&y)).scale_real(0.5);
        let delta = y_next.max_abs_diff(&y);
        y = y_next;
        z = z_next;
        if delta < 1e-15 {
            break;
        }
    }
    y
}
