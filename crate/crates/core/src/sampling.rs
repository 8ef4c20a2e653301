//! Seeded random matrices.
//!
//! All randomness in the crate flows from a single [`ChaCha8Rng`] built by
//! [`seeded`]. The stream is identified in reports by [`GENERATOR`]; any
//! change in the order of draws must bump that string.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::numerics::{self, ComplexMatrix};

pub type SeededRng = ChaCha8Rng;

/// Name and version of the random stream.
pub const GENERATOR: &str = "chacha8/seed_from_u64/v1";

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries with independent standard normal real and imaginary parts.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    })
}

/// Gaussian matrix rescaled to operator norm one.
pub fn unit_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let m = gaussian_matrix(n, n, rng);
    let nrm = numerics::operator_norm(&m);
    m.unscale(nrm)
}

/// Hermitian matrix of operator norm one.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let b = gaussian_matrix(n, n, rng);
    let h = numerics::hermitian_part(&b);
    let nrm = numerics::operator_norm(&h);
    h.unscale(nrm)
}

/// PSD matrix `B*B` of operator norm one.
pub fn random_psd<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let b = gaussian_matrix(n, n, rng);
    let g = b.adjoint() * b;
    let nrm = numerics::operator_norm(&g);
    g.unscale(nrm)
}

/// Hermitian matrix with a strictly negative eigenvalue, norm one.
pub fn random_indefinite<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let h = random_hermitian(n, rng);
        if numerics::min_eigenvalue(&h) < -0.05 {
            return h;
        }
    }
}

/// Haar-distributed unitary from the QR factorization of a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let qr = gaussian_matrix(n, n, rng).qr();
    let (q, r) = qr.unpack();
    let mut q = q;
    for k in 0..n {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { numerics::ONE };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Smallest singular value accepted for a random contraction.
pub const MIN_WITNESS_SINGULAR_VALUE: f64 = 1e-3;

/// `rows × cols` contraction with full row rank (`rows ≤ cols`).
///
/// Draws a Gaussian matrix, divides by `max(1, ‖W‖·(1 + 1e-6))` and rejects
/// draws whose smallest singular value is below
/// [`MIN_WITNESS_SINGULAR_VALUE`].
pub fn random_contraction<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(rows <= cols, "contraction witness needs rows <= cols");
    loop {
        let w = gaussian_matrix(rows, cols, rng);
        let scale = (numerics::operator_norm(&w) * (1.0 + 1e-6)).max(1.0);
        let w = w.unscale(scale);
        if numerics::min_singular_value(&w) >= MIN_WITNESS_SINGULAR_VALUE {
            return w;
        }
    }
}
