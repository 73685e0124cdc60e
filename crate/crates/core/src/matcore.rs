//! Dense complex linear algebra: a small row-major matrix type, a cyclic
//! Jacobi eigensolver for Hermitian matrices and LU determinants.
//!
//! Everything here is sized for the matrices this crate deals with (Gram
//! matrices and covariance exponents of at most a few hundred rows), so the
//! algorithms favour determinism over asymptotic speed.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum tolerated `|A - A^H|` entry (scaled by `max(1, |A|_max)`).
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Off-diagonal Frobenius threshold, relative to the Frobenius norm of the input.
pub const JACOBI_TOL: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(k) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Validation(format!(
                "non-finite entry at ({}, {})",
                k / cols.max(1),
                k % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_row_major(
            rows,
            cols,
            data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let rrow = rhs.row(k);
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::Shape(format!(
                "shape mismatch {}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// `max |A_ij - conj(A_ji)|` together with the offending position.
    pub fn hermitian_defect(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        worst
    }

    /// Validates Hermiticity and returns the symmetrized `(A + A^H) / 2`.
    pub fn hermitian_part(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Shape(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let (defect, i, j) = self.hermitian_defect();
        if defect > HERMITIAN_TOL * self.max_abs().max(1.0) {
            return Err(Error::NotHermitian {
                row: i,
                col: j,
                deviation: defect,
            });
        }
        let mut h = Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        });
        for i in 0..h.rows {
            h[(i, i)].im = 0.0;
        }
        Ok(h)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Spectral decomposition `A = Q diag(λ) Q^H` of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, phase-canonicalized so the
    /// largest-magnitude component of each is real and positive.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `Q diag(λ) Q^H`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvectors.rows();
        let q = &self.eigenvectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            self.eigenvalues
                .iter()
                .enumerate()
                .map(|(k, &l)| q[(i, k)] * q[(j, k)].conj() * l)
                .sum()
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let mut a = a.hermitian_part()?;
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius();
    let threshold = JACOBI_TOL * scale;

    let mut converged = n <= 1 || scale == 0.0;
    let mut sweeps = 0;
    while !converged {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            break;
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "Hermitian Jacobi eigensolver".into(),
            tolerance: threshold,
            achieved: off_diagonal_norm(&a),
        });
    }

    let values: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    for k in 0..n {
        canonicalize_phase(&mut v, k);
    }
    let mut order: Vec<usize> = (0..n).collect();
    // stable: exact ties keep their sweep order
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Applies `A <- G^H A G`, `V <- V G` with `G` chosen to annihilate `A[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    if mag <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    // phase that makes the pivot real, then a real symmetric Schur rotation
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on the (p, q) plane
    let gpp = Complex64::new(c, 0.0);
    let gpq = Complex64::new(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * gpp + akq * gqp;
        a[(k, q)] = akp * gpq + akq * gqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
        a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * gpp + vkq * gqp;
        v[(k, q)] = vkp * gpq + vkq * gqq;
    }
}

fn canonicalize_phase(v: &mut ComplexMatrix, col: usize) {
    let n = v.rows();
    let mut best = 0;
    let mut best_mag = -1.0;
    for i in 0..n {
        let m = v[(i, col)].norm();
        // first index wins among (numerically) equal magnitudes
        if m > best_mag * (1.0 + 1e-10) {
            best = i;
            best_mag = m;
        }
    }
    if best_mag <= 0.0 {
        return;
    }
    let phase = v[(best, col)].conj() / best_mag;
    for i in 0..n {
        v[(i, col)] *= phase;
    }
    v[(best, col)] = Complex64::new(v[(best, col)].norm(), 0.0);
}

/// LU factorization with partial pivoting; returns the determinant.
pub fn determinant(a: &ComplexMatrix) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "determinant of non-square {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm()))
            .unwrap_or(k);
        if lu[(pivot, k)].norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if pivot != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(pivot, j)];
                lu[(pivot, j)] = tmp;
            }
            det = -det;
        }
        let pkk = lu[(k, k)];
        det *= pkk;
        for i in k + 1..n {
            let f = lu[(i, k)] / pkk;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k + 1..n {
                let u = lu[(k, j)];
                lu[(i, j)] -= f * u;
            }
        }
    }
    Ok(det)
}

/// `det(I + s A)`.
pub fn det_shifted(a: &ComplexMatrix, s: f64) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::Shape(format!(
            "det(I + sA) needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if s == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let shifted = ComplexMatrix::identity(a.rows()).add(&a.scale_real(s))?;
    determinant(&shifted)
}

/// Eigenvalues of a real symmetric matrix given in row-major order, descending.
pub fn eig_symmetric_values(n: usize, data: &[f64]) -> Result<Vec<f64>> {
    let m = ComplexMatrix::from_real_row_major(n, n, data)?;
    Ok(eig_hermitian(&m)?.eigenvalues)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(rng.gen_range(-2.0..2.0), 0.0);
            for j in i + 1..n {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn identity_eigenvalues() {
        let e = eig_hermitian(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0]);
    }

    #[test]
    fn two_by_two_real() {
        let a = ComplexMatrix::from_real_row_major(2, 2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        let e = eig_hermitian(&a).unwrap();
        assert_relative_eq!(e.eigenvalues[0], 3.0, epsilon = 1e-14);
        assert_relative_eq!(e.eigenvalues[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_hermitian(6, &mut rng);
        let e = eig_hermitian(&a).unwrap();
        assert!(e.reconstruct().sub(&a).unwrap().max_abs() < 1e-10);
        let q = &e.eigenvectors;
        let gram = q.adjoint().matmul(q).unwrap();
        assert!(gram.sub(&ComplexMatrix::identity(6)).unwrap().max_abs() < 1e-12);
        for w in e.eigenvalues.windows(2) {
            assert!(w[0] >= w[1]);
        }
        for k in 0..6 {
            let col = q.column(k);
            let av: Vec<Complex64> = (0..6)
                .map(|i| (0..6).map(|j| a[(i, j)] * col[j]).sum())
                .collect();
            for i in 0..6 {
                assert!((av[i] - col[i] * e.eigenvalues[k]).norm() < 1e-12 * 10.0);
            }
        }
    }

    #[test]
    fn rejects_non_hermitian_with_position() {
        let a = ComplexMatrix::from_real_row_major(2, 2, &[1.0, 0.5, 0.2, 1.0]).unwrap();
        match eig_hermitian(&a) {
            Err(Error::NotHermitian { row, col, .. }) => assert_eq!((row, col), (0, 1)),
            other => panic!("unexpected {other:?}"),
        }
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(eig_hermitian(&rect), Err(Error::Shape(_))));
    }

    #[test]
    fn non_finite_rejected() {
        let r = ComplexMatrix::from_real_row_major(1, 1, &[f64::NAN]);
        assert!(r.is_err());
    }

    #[test]
    fn det_shifted_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_hermitian(3, &mut rng);
        assert_eq!(det_shifted(&a, 0.0).unwrap(), c(1.0, 0.0));
        let d = det_shifted(&ComplexMatrix::identity(2), 1.0).unwrap();
        assert_relative_eq!(d.re, 4.0, epsilon = 1e-15);
        assert_eq!(d.im, 0.0);
    }

    #[test]
    fn det_shifted_matches_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_hermitian(4, &mut rng);
        let e = eig_hermitian(&a).unwrap();
        for &s in &[0.3, -0.2, 1.7] {
            let d = det_shifted(&a, s).unwrap();
            let prod: f64 = e.eigenvalues.iter().map(|l| 1.0 + s * l).product();
            assert!((d.re - prod).abs() <= 1e-10 * prod.abs());
            assert!(d.im.abs() <= 1e-10 * prod.abs());
        }
    }

    #[test]
    fn permutation_keeps_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_hermitian(5, &mut rng);
        let perm = [3usize, 0, 4, 1, 2];
        let pa = ComplexMatrix::from_fn(5, 5, |i, j| a[(perm[i], perm[j])]);
        let e1 = eig_hermitian(&a).unwrap();
        let e2 = eig_hermitian(&pa).unwrap();
        for (x, y) in e1.eigenvalues.iter().zip(&e2.eigenvalues) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn deterministic_output() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_hermitian(7, &mut rng);
        let e1 = eig_hermitian(&a).unwrap();
        let e2 = eig_hermitian(&a).unwrap();
        assert_eq!(e1.eigenvalues, e2.eigenvalues);
        assert_eq!(e1.eigenvectors, e2.eigenvectors);
    }

    #[test]
    fn canonical_phase_is_real_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random_hermitian(4, &mut rng);
        let e = eig_hermitian(&a).unwrap();
        for k in 0..4 {
            let col = e.eigenvectors.column(k);
            let big = col
                .iter()
                .max_by(|x, y| x.norm().total_cmp(&y.norm()))
                .unwrap();
            assert!(big.re > 0.0 && big.im == 0.0);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn trace_equals_eigenvalue_sum(seed in any::<u64>(), n in 1usize..9) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a = random_hermitian(n, &mut rng);
                let e = eig_hermitian(&a).unwrap();
                let tr = a.trace().re;
                let sum: f64 = e.eigenvalues.iter().sum();
                prop_assert!((tr - sum).abs() <= 1e-12 * (1.0 + tr.abs()) * n as f64);
            }

            #[test]
            fn det_shifted_is_spectral_product(seed in any::<u64>(), n in 1usize..7, s in -0.3f64..0.3) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a = random_hermitian(n, &mut rng);
                let e = eig_hermitian(&a).unwrap();
                let prod: f64 = e.eigenvalues.iter().map(|l| 1.0 + s * l).product();
                let d = det_shifted(&a, s).unwrap();
                prop_assert!((d.re - prod).abs() <= 1e-10 * prod.abs().max(1e-3));
            }
        }
    }
}
