//! Tolerance-aware dense complex linear algebra.
//!
//! Every algebra element in this crate is ultimately a square
//! [`ComplexMatrix`]. Comparisons between matrices use the max-entry norm
//! against [`Tolerance::eps_eq`]; positivity uses a full Hermitian
//! eigendecomposition with slack [`Tolerance::eps_psd`], so that every
//! verdict comes with a spectral margin that can be reported.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense complex matrix. Algebra elements are square; embedding witnesses
/// and superoperators may be rectangular.
pub type ComplexMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Eigenvalue slack for positivity tests.
    pub eps_psd: f64,
    /// Entrywise slack for matrix equality.
    pub eps_eq: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eps_psd: 1e-9,
            eps_eq: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(eps_psd: f64, eps_eq: f64) -> Result<Self> {
        for (name, v) in [("eps_psd", eps_psd), ("eps_eq", eps_eq)] {
            if !(0.0..1e-3).contains(&v) {
                return Err(Error::InvalidTolerance(format!("{name} = {v} must lie in [0, 1e-3)")));
            }
        }
        Ok(Self { eps_psd, eps_eq })
    }
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(n, n)
}

/// Real diagonal matrix.
pub fn diag(values: &[f64]) -> ComplexMatrix {
    let v = DVector::from_iterator(values.len(), values.iter().map(|&x| Complex64::new(x, 0.0)));
    ComplexMatrix::from_diagonal(&v)
}

/// Square matrix from real row-major entries.
pub fn real_matrix(n: usize, rows: &[f64]) -> ComplexMatrix {
    assert_eq!(rows.len(), n * n);
    ComplexMatrix::from_row_iterator(n, n, rows.iter().map(|&x| Complex64::new(x, 0.0)))
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `max |a_ij - b_ij|`; infinite when shapes differ.
pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn approx_eq(a: &ComplexMatrix, b: &ComplexMatrix, tol: Tolerance) -> bool {
    max_abs_diff(a, b) <= tol.eps_eq
}

/// Deviation from hermiticity, `‖m − m*‖_max`.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

pub fn is_hermitian(m: &ComplexMatrix, tol: Tolerance) -> bool {
    hermitian_deviation(m) <= tol.eps_eq
}

/// `(m + m*) / 2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// `(m − m*) / 2i`.
pub fn imaginary_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m - m.adjoint()) * Complex64::new(0.0, -0.5)
}

/// Eigendecomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (DVector<f64>, ComplexMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), ComplexMatrix::zeros(0, 0));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Smallest eigenvalue of the Hermitian part; `+∞` for an empty matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    let (vals, _) = hermitian_eigen(m);
    vals.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn is_psd(m: &ComplexMatrix, tol: Tolerance) -> bool {
    is_hermitian(m, tol) && min_eigenvalue(m) >= -tol.eps_psd
}

pub fn singular_values(m: &ComplexMatrix) -> DVector<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return DVector::zeros(0);
    }
    m.clone().svd(false, false).singular_values
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().copied().fold(0.0, f64::max)
}

/// Smallest singular value of a (possibly rectangular) matrix.
pub fn min_singular_value(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().copied().fold(f64::INFINITY, f64::min)
}

/// Rebuilds `V f(D) V*` from an eigendecomposition.
fn spectral_apply(vals: &DVector<f64>, vecs: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let mut scaled = vecs.clone();
    for (k, &v) in vals.iter().enumerate() {
        let s = f(v);
        scaled.column_mut(k).scale_mut(s);
    }
    &scaled * vecs.adjoint()
}

/// Applies a real function to a Hermitian matrix through its spectrum.
pub fn functional_calculus(h: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let (vals, vecs) = hermitian_eigen(h);
    spectral_apply(&vals, &vecs, f)
}

/// `m^{-1/2}` for a Hermitian positive definite `m`.
pub fn matrix_sqrt_inv(m: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let dev = hermitian_deviation(m);
    if dev > tol.eps_eq {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let (vals, vecs) = hermitian_eigen(m);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= tol.eps_psd {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    Ok(spectral_apply(&vals, &vecs, |v| 1.0 / v.sqrt()))
}

/// `m^{1/2}` for a Hermitian PSD `m`; small negative eigenvalues are clipped.
pub fn matrix_sqrt(m: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let dev = hermitian_deviation(m);
    if dev > tol.eps_eq {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let (vals, vecs) = hermitian_eigen(m);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol.eps_psd {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    Ok(spectral_apply(&vals, &vecs, |v| v.max(0.0).sqrt()))
}

/// Inverse of a Hermitian positive definite matrix through its spectrum.
pub fn hermitian_inverse(m: &ComplexMatrix, tol: Tolerance) -> Result<ComplexMatrix> {
    let (vals, vecs) = hermitian_eigen(m);
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= tol.eps_psd {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    Ok(spectral_apply(&vals, &vecs, |v| 1.0 / v))
}

/// Spectral split `h = p − n` with `p, n ⪰ 0` and `p n = 0`.
pub fn positive_negative_parts(h: &ComplexMatrix, tol: Tolerance) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let dev = hermitian_deviation(h);
    if dev > tol.eps_eq {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let (vals, vecs) = hermitian_eigen(h);
    let p = spectral_apply(&vals, &vecs, |v| v.max(0.0));
    let n = spectral_apply(&vals, &vecs, |v| (-v).max(0.0));
    Ok((p, n))
}

/// Smallest `λ ≥ 0` with `λu − h ⪰ 0` and `λu + h ⪰ 0`, or `None` when no
/// such `λ` exists because `h` has weight outside the range of `u`.
///
/// The pencil is restricted to the eigenvectors of `u` with eigenvalue
/// above `eps_psd`; `h` must vanish (to `eps_eq`) on the complement.
pub fn pencil_min_lambda(h: &ComplexMatrix, u: &ComplexMatrix, tol: Tolerance) -> Option<f64> {
    let n = h.nrows();
    let (uvals, uvecs) = hermitian_eigen(u);
    let h_eig = uvecs.adjoint() * hermitian_part(h) * &uvecs;
    let range: Vec<usize> = (0..n).filter(|&i| uvals[i] > tol.eps_psd).collect();
    let kernel: Vec<usize> = (0..n).filter(|&i| uvals[i] <= tol.eps_psd).collect();

    let off_range = kernel
        .iter()
        .flat_map(|&k| (0..n).map(move |j| (k, j)))
        .map(|(k, j)| h_eig[(k, j)].norm())
        .fold(0.0, f64::max);
    if off_range > tol.eps_eq {
        return None;
    }
    if range.is_empty() {
        return Some(0.0);
    }
    let r = range.len();
    let mut block = ComplexMatrix::zeros(r, r);
    for (a, &i) in range.iter().enumerate() {
        for (b, &j) in range.iter().enumerate() {
            block[(a, b)] = h_eig[(i, j)] / (uvals[i] * uvals[j]).sqrt();
        }
    }
    let (vals, _) = hermitian_eigen(&block);
    Some(vals.iter().map(|v| v.abs()).fold(0.0, f64::max))
}

/// Column-major vectorization, the convention used by superoperators.
pub fn vectorize(m: &ComplexMatrix) -> DVector<Complex64> {
    DVector::from_column_slice(m.as_slice())
}

pub fn unvectorize(v: &DVector<Complex64>, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_column_slice(n, n, v.as_slice())
}

/// `tr(a b)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Block-diagonal matrix with the given blocks in order.
pub fn block_diagonal(blocks: &[&ComplexMatrix]) -> ComplexMatrix {
    let total: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = ComplexMatrix::zeros(total, total);
    let mut offset = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((offset, offset), (k, k)).copy_from(b);
        offset += k;
    }
    out
}

/// JSON form `{dim, re, im}` (square) or `{rows, cols, re, im}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cols: Option<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let (r, c) = m.shape();
        let mut re = Vec::with_capacity(r * c);
        let mut im = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        if r == c {
            Self {
                dim: Some(r),
                rows: None,
                cols: None,
                re,
                im,
            }
        } else {
            Self {
                dim: None,
                rows: Some(r),
                cols: Some(c),
                re,
                im,
            }
        }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(j: MatrixJson) -> Result<Self> {
        let (r, c) = match (j.dim, j.rows, j.cols) {
            (Some(d), _, _) => (d, d),
            (None, Some(r), Some(c)) => (r, c),
            _ => return Err(Error::BadShape("matrix needs `dim` or `rows`+`cols`".into())),
        };
        if j.re.len() != r * c || j.im.len() != r * c {
            return Err(Error::DimensionMismatch {
                expected: r * c,
                found: j.re.len().min(j.im.len()),
            });
        }
        let m = ComplexMatrix::from_row_iterator(r, c, j.re.iter().zip(&j.im).map(|(&a, &b)| Complex64::new(a, b)));
        if !is_finite(&m) {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }
}

/// `#[serde(with = "matrix_serde")]` adapter for [`ComplexMatrix`] fields.
pub mod matrix_serde {
    use super::{ComplexMatrix, MatrixJson};
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ComplexMatrix, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        ComplexMatrix::try_from(j).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{gaussian_matrix, random_hermitian, seeded};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    /// Power iteration on `m* m`, kept independent of the SVD path.
    fn power_iteration_norm(m: &ComplexMatrix) -> f64 {
        let g = m.adjoint() * m;
        let n = g.nrows();
        let mut v = DVector::from_fn(n, |i, _| Complex64::new(1.0 + i as f64 * 0.37, 0.5 - i as f64 * 0.11));
        let mut lambda = 0.0;
        for _ in 0..5000 {
            let w = &g * &v;
            let nrm = w.norm();
            if nrm == 0.0 {
                return 0.0;
            }
            v = w / Complex64::new(nrm, 0.0);
            let next = (v.adjoint() * &g * &v)[(0, 0)].re;
            if (next - lambda).abs() < 1e-15 * next.abs().max(1.0) {
                lambda = next;
                break;
            }
            lambda = next;
        }
        lambda.sqrt()
    }

    /// Characteristic-polynomial-free eigenvalue oracle: Jacobi sweeps on
    /// the real symmetric embedding `[[A, -B], [B, A]]` of `A + iB`.
    #[allow(clippy::needless_range_loop)]
    fn jacobi_min_eigenvalue(h: &ComplexMatrix) -> f64 {
        let n = h.nrows();
        let m = 2 * n;
        let mut a = vec![vec![0.0; m]; m];
        for i in 0..n {
            for j in 0..n {
                let z = h[(i, j)];
                a[i][j] = z.re;
                a[i + n][j + n] = z.re;
                a[i][j + n] = -z.im;
                a[i + n][j] = z.im;
            }
        }
        for _ in 0..100 {
            let mut off = 0.0;
            for p in 0..m {
                for q in (p + 1)..m {
                    off += a[p][q] * a[p][q];
                }
            }
            if off < 1e-30 {
                break;
            }
            for p in 0..m {
                for q in (p + 1)..m {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..m {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..m {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        (0..m).map(|i| a[i][i]).fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn hermitian_predicate() {
        assert!(is_hermitian(&identity(3), tol()));
        assert!(!is_hermitian(&real_matrix(2, &[0.0, 1.0, 0.0, 0.0]), tol()));
        let mut rng = seeded(11);
        let b = gaussian_matrix(4, 4, &mut rng);
        let h = &b + b.adjoint();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(h[(i, j)], h[(j, i)].conj());
            }
        }
        assert!(is_hermitian(&h, tol()));
    }

    #[test]
    fn psd_predicate() {
        assert!(is_psd(&zeros(3), tol()));
        assert!(!is_psd(&diag(&[1.0, -1.0]), tol()));
        let mut rng = seeded(12);
        for _ in 0..10 {
            let b = gaussian_matrix(5, 5, &mut rng);
            let g = b.adjoint() * &b;
            assert!(jacobi_min_eigenvalue(&g) >= -1e-9);
            assert!(is_psd(&g, tol()));
        }
    }

    #[test]
    fn eigen_agrees_with_jacobi_oracle() {
        let mut rng = seeded(13);
        for _ in 0..10 {
            let h = random_hermitian(6, &mut rng);
            assert!((min_eigenvalue(&h) - jacobi_min_eigenvalue(&h)).abs() < 1e-10);
        }
    }

    #[test]
    fn operator_norm_cases() {
        assert!((operator_norm(&diag(&[3.0, -4.0])) - 4.0).abs() < 1e-12);
        assert!((operator_norm(&real_matrix(2, &[0.0, 1.0, 0.0, 0.0])) - 1.0).abs() < 1e-12);
        let mut rng = seeded(14);
        for _ in 0..10 {
            let m = gaussian_matrix(5, 5, &mut rng);
            assert!((operator_norm(&m) - power_iteration_norm(&m)).abs() < 1e-8);
        }
    }

    #[test]
    fn sqrt_inverse_cases() {
        let r = matrix_sqrt_inv(&identity(3), tol()).unwrap();
        assert!(approx_eq(&r, &identity(3), tol()));
        let r = matrix_sqrt_inv(&diag(&[4.0, 9.0]), tol()).unwrap();
        assert!(approx_eq(&r, &diag(&[0.5, 1.0 / 3.0]), tol()));
        let mut rng = seeded(15);
        for _ in 0..10 {
            let b = gaussian_matrix(4, 4, &mut rng);
            let g = identity(4) + b.adjoint() * &b;
            let r = matrix_sqrt_inv(&g, tol()).unwrap();
            assert!(is_psd(&r, tol()));
            assert!(max_abs(&(&r * &r * &g - identity(4))) <= 1e-9);
        }
        assert!(matches!(
            matrix_sqrt_inv(&diag(&[1.0, 0.0]), tol()),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn positive_negative_split() {
        let (p, n) = positive_negative_parts(&diag(&[1.0, -1.0]), tol()).unwrap();
        assert!(approx_eq(&p, &diag(&[1.0, 0.0]), tol()));
        assert!(approx_eq(&n, &diag(&[0.0, 1.0]), tol()));

        let q = real_matrix(2, &[2.0, 1.0, 1.0, 2.0]);
        let (p, n) = positive_negative_parts(&q, tol()).unwrap();
        assert!(approx_eq(&p, &q, tol()));
        assert!(max_abs(&n) <= 1e-9);

        let mut rng = seeded(16);
        for _ in 0..10 {
            let h = random_hermitian(5, &mut rng);
            let (p, n) = positive_negative_parts(&h, tol()).unwrap();
            assert!(max_abs(&(&p - &n - &h)) <= 1e-9);
            assert!(max_abs(&(&p * &n)) <= 1e-9);
            assert!(is_psd(&p, tol()) && is_psd(&n, tol()));
        }
        assert!(positive_negative_parts(&real_matrix(2, &[0.0, 1.0, 0.0, 0.0]), tol()).is_err());
    }

    #[test]
    fn pencil_cases() {
        let i2 = identity(2);
        assert!((pencil_min_lambda(&i2, &i2, tol()).unwrap() - 1.0).abs() < 1e-12);
        let mut rng = seeded(17);
        let h = random_hermitian(4, &mut rng);
        let (vals, _) = hermitian_eigen(&h);
        let expected = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!((pencil_min_lambda(&h, &identity(4), tol()).unwrap() - expected).abs() < 1e-12);
        assert_eq!(pencil_min_lambda(&diag(&[0.0, 1.0]), &diag(&[1.0, 0.0]), tol()), None);
        // supported on the range of a singular u
        let lam = pencil_min_lambda(&diag(&[3.0, 0.0]), &diag(&[2.0, 0.0]), tol()).unwrap();
        assert!((lam - 1.5).abs() < 1e-12);
    }

    #[test]
    fn matrix_json_round_trip() {
        let mut rng = seeded(18);
        let m = gaussian_matrix(3, 3, &mut rng);
        let s = serde_json::to_string(&MatrixJson::from(&m)).unwrap();
        let back = ComplexMatrix::try_from(serde_json::from_str::<MatrixJson>(&s).unwrap()).unwrap();
        assert!(approx_eq(&m, &back, tol()));
        let w = gaussian_matrix(2, 3, &mut rng);
        let j = MatrixJson::from(&w);
        assert_eq!((j.rows, j.cols, j.dim), (Some(2), Some(3), None));
        let back = ComplexMatrix::try_from(j).unwrap();
        assert_eq!(back.shape(), (2, 3));
    }

    #[test]
    fn tolerance_bounds() {
        assert!(Tolerance::new(1e-9, 1e-9).is_ok());
        assert!(Tolerance::new(1e-3, 1e-9).is_err());
        assert!(Tolerance::new(-1.0, 1e-9).is_err());
    }
}
