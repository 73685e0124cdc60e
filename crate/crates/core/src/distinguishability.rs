//! Distinguishability data: Gram matrices of internal states, their factor
//! `C` with `C C^H = S`, the internal-mode matrix `Γ = C^H C / n`, and the
//! one-parameter interpolation family `S(x)_ij = δ_ij + x (1 - δ_ij)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{eig_hermitian, ComplexMatrix, HermitianEigen};

pub const NORMALIZATION_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Largest imaginary part for which `S` is treated as real.
pub const REAL_TOL: f64 = 1e-12;

/// Hermitian positive-semidefinite overlap matrix with unit diagonal.
#[derive(Clone, Debug)]
pub struct GramMatrix {
    s: ComplexMatrix,
    eigen: HermitianEigen,
}

impl GramMatrix {
    pub fn n(&self) -> usize {
        self.s.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.s
    }

    pub fn eigen(&self) -> &HermitianEigen {
        &self.eigen
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen.min_eigenvalue()
    }

    pub fn is_real(&self) -> bool {
        self.s.max_imag() <= REAL_TOL
    }

    /// All photons in the same internal state.
    pub fn indistinguishable(n: usize) -> Result<Self> {
        validate_gram(&ComplexMatrix::from_fn(n, n, |_, _| Complex64::new(1.0, 0.0)))
    }

    /// Pairwise orthogonal internal states.
    pub fn distinguishable(n: usize) -> Result<Self> {
        validate_gram(&ComplexMatrix::identity(n))
    }
}

/// `S_ij = <φ_i|φ_j>`, conjugate-linear in the first slot.
pub fn gram_from_states(states: &[Vec<Complex64>]) -> Result<GramMatrix> {
    let Some(first) = states.first() else {
        return Err(Error::Shape("at least one state is required".into()));
    };
    let dim = first.len();
    for (i, phi) in states.iter().enumerate() {
        if phi.len() != dim {
            return Err(Error::Shape(format!(
                "state {i} has length {}, expected {dim}",
                phi.len()
            )));
        }
        if let Some(k) = phi.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Validation(format!("state {i} has a non-finite component {k}")));
        }
        let norm = phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { index: i, norm });
        }
    }
    let n = states.len();
    let mut s = ComplexMatrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            let z: Complex64 = states[i]
                .iter()
                .zip(&states[j])
                .map(|(a, b)| a.conj() * b)
                .sum();
            s[(i, j)] = z;
            s[(j, i)] = z.conj();
        }
    }
    validate_gram(&s)
}

/// Checks the Gram invariants and returns the validated matrix.
///
/// The diagonal must be within `1e-10` of one and is then overwritten with
/// exactly one; the Hermitian part is kept.
pub fn validate_gram(s: &ComplexMatrix) -> Result<GramMatrix> {
    if !s.is_square() {
        return Err(Error::Shape(format!(
            "Gram matrix must be square, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    if s.rows() == 0 {
        return Err(Error::Shape("Gram matrix is empty".into()));
    }
    for i in 0..s.rows() {
        let d = s[(i, i)];
        if (d - Complex64::new(1.0, 0.0)).norm() > NORMALIZATION_TOL {
            return Err(Error::NonUnitDiagonal {
                index: i,
                value: d.re,
            });
        }
    }
    let mut h = s.hermitian_part()?;
    for i in 0..h.rows() {
        h[(i, i)] = Complex64::new(1.0, 0.0);
    }
    let eigen = eig_hermitian(&h)?;
    let min_eigenvalue = eigen.min_eigenvalue();
    if min_eigenvalue < -PSD_TOL {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue });
    }
    // implied by PSD + unit diagonal up to roundoff, kept as an explicit guard
    for i in 0..h.rows() {
        for j in 0..h.cols() {
            if h[(i, j)].norm() > 1.0 + 1e-12 {
                return Err(Error::Validation(format!(
                    "overlap |S[{i}][{j}]| = {} exceeds one",
                    h[(i, j)].norm()
                )));
            }
        }
    }
    Ok(GramMatrix { s: h, eigen })
}

/// The `n x d` matrix `C` with rows `c_i` such that `C C^H = S`.
///
/// `c_{i,u} = <φ_i|u>` for an orthonormal internal basis `{|u>}`; any `C W`
/// with `W` unitary describes the same physics.
#[derive(Clone, Debug)]
pub struct InternalFactor {
    c: ComplexMatrix,
}

impl InternalFactor {
    /// Wraps an explicit factor, checking that its rows are unit vectors.
    pub fn new(c: ComplexMatrix) -> Result<Self> {
        if c.rows() == 0 || c.cols() == 0 {
            return Err(Error::Shape("internal factor must be non-empty".into()));
        }
        for i in 0..c.rows() {
            let norm2: f64 = c.row(i).iter().map(|z| z.norm_sqr()).sum();
            if (norm2 - 1.0).abs() > NORMALIZATION_TOL {
                return Err(Error::NotNormalized {
                    index: i,
                    norm: norm2.sqrt(),
                });
            }
        }
        Ok(Self { c })
    }

    pub fn n(&self) -> usize {
        self.c.rows()
    }

    pub fn d(&self) -> usize {
        self.c.cols()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        self.c.row(i)
    }

    pub fn is_real(&self) -> bool {
        self.c.max_imag() <= REAL_TOL
    }

    /// `C C^H`.
    pub fn gram(&self) -> ComplexMatrix {
        self.c
            .matmul(&self.c.adjoint())
            .expect("C and C^H are conformable")
    }

    /// `C W` for a `d x d` unitary `W`.
    pub fn regauge(&self, w: &ComplexMatrix) -> Result<Self> {
        if w.rows() != self.d() || w.cols() != self.d() {
            return Err(Error::Shape(format!(
                "gauge matrix must be {0}x{0}, got {1}x{2}",
                self.d(),
                w.rows(),
                w.cols()
            )));
        }
        let unitarity = w.adjoint().matmul(w)?.sub(&ComplexMatrix::identity(self.d()))?;
        if unitarity.max_abs() > 1e-10 {
            return Err(Error::Validation("gauge matrix is not unitary".into()));
        }
        Self::new(self.c.matmul(w)?)
    }

    /// Single-internal-mode factor for `n` indistinguishable photons.
    pub fn indistinguishable(n: usize) -> Self {
        Self {
            c: ComplexMatrix::from_fn(n, 1, |_, _| Complex64::new(1.0, 0.0)),
        }
    }
}

/// Factors `S = Q Λ Q^H` and keeps the eigenpairs above `rank_tol · λ_max`.
pub fn factor_gram(s: &GramMatrix, rank_tol: f64) -> Result<InternalFactor> {
    if !(0.0..1.0).contains(&rank_tol) {
        return Err(Error::Domain(format!("rank tolerance {rank_tol} outside [0, 1)")));
    }
    let eigen = s.eigen();
    let cutoff = rank_tol * eigen.max_eigenvalue();
    let d = eigen
        .eigenvalues
        .iter()
        .take_while(|&&l| l > cutoff)
        .count();
    let n = s.n();
    let q = &eigen.eigenvectors;
    let roots: Vec<f64> = eigen.eigenvalues[..d].iter().map(|l| l.sqrt()).collect();
    let c = ComplexMatrix::from_fn(n, d, |i, u| q[(i, u)] * roots[u]);
    Ok(InternalFactor { c })
}

/// `Γ = C^H C / n` with its spectrum.
#[derive(Clone, Debug)]
pub struct GammaMatrix {
    n: usize,
    gamma: ComplexMatrix,
    eigen: HermitianEigen,
}

impl GammaMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.gamma.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.gamma
    }

    /// Eigenvalues `λ_1 ≥ … ≥ λ_d`.
    pub fn spectrum(&self) -> &[f64] {
        &self.eigen.eigenvalues
    }

    /// Eigenbasis of the uniform mixture of internal states.
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigen.eigenvectors
    }

    /// `Tr Γ²`, the purity of the averaged internal state.
    pub fn purity(&self) -> f64 {
        self.spectrum().iter().map(|l| l * l).sum()
    }
}

pub fn gamma_of(c: &InternalFactor) -> Result<GammaMatrix> {
    let n = c.n();
    let gamma = c.matrix().adjoint().matmul(c.matrix())?.scale_real(1.0 / n as f64);
    let eigen = eig_hermitian(&gamma)?;
    Ok(GammaMatrix {
        n,
        gamma: eigen_consistent(gamma),
        eigen,
    })
}

fn eigen_consistent(mut g: ComplexMatrix) -> ComplexMatrix {
    for i in 0..g.rows() {
        g[(i, i)].im = 0.0;
    }
    g
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ModelSize {
    Finite(usize),
    Limit,
}

/// `S(x)_ij = δ_ij + x (1 - δ_ij)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterpolationModel {
    x: f64,
    size: ModelSize,
}

impl InterpolationModel {
    pub fn new(x: f64, size: ModelSize) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("interpolation x = {x} outside [0, 1]")));
        }
        if let ModelSize::Finite(n) = size {
            if n < 2 {
                return Err(Error::Domain(format!("interpolation model needs n >= 2, got {n}")));
            }
        }
        Ok(Self { x, size })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn size(&self) -> ModelSize {
        self.size
    }

    pub fn gram(&self) -> Result<GramMatrix> {
        let ModelSize::Finite(n) = self.size else {
            return Err(Error::Capability(
                "the n -> infinity interpolation model has no finite Gram matrix".into(),
            ));
        };
        let x = self.x;
        validate_gram(&ComplexMatrix::from_fn(n, n, |i, j| {
            Complex64::new(if i == j { 1.0 } else { x }, 0.0)
        }))
    }
}

/// Eigenvalues of `S(x) / n`.
#[derive(Clone, Debug, PartialEq)]
pub enum InterpolationSpectrum {
    /// `(eigenvalue, multiplicity)` pairs, largest first.
    Finite(Vec<(f64, usize)>),
    /// As `n → ∞`: one eigenvalue tends to `x`, the remaining ones form a cloud
    /// of vanishing eigenvalues with total weight `1 - x`.
    Limit { lambda_max: f64, cloud_weight: f64 },
}

impl InterpolationSpectrum {
    /// Expanded eigenvalue list (finite case only).
    pub fn values(&self) -> Option<Vec<f64>> {
        match self {
            Self::Finite(pairs) => Some(
                pairs
                    .iter()
                    .flat_map(|&(l, k)| std::iter::repeat_n(l, k))
                    .collect(),
            ),
            Self::Limit { .. } => None,
        }
    }
}

pub fn interpolation_spectrum(model: &InterpolationModel) -> InterpolationSpectrum {
    let x = model.x;
    match model.size {
        ModelSize::Finite(n) => {
            let nf = n as f64;
            let lmax = (1.0 + (nf - 1.0) * x) / nf;
            let lmin = (1.0 - x) / nf;
            InterpolationSpectrum::Finite(vec![(lmax, 1), (lmin, n - 1)])
        }
        ModelSize::Limit => InterpolationSpectrum::Limit {
            lambda_max: x,
            cloud_weight: 1.0 - x,
        },
    }
}

/// JSON input describing distinguishability data.
///
/// Complex numbers are `[re, im]` pairs. Exactly one of `states`, `gram` or
/// `interpolation` must be present.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GramInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interpolation: Option<InterpolationInput>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterpolationInput {
    pub x: f64,
    #[serde(default)]
    pub n: Option<usize>,
}

/// Where the distinguishability data of a run comes from.
#[derive(Clone, Debug)]
pub enum Distinguishability {
    Gram(GramMatrix),
    Interpolation(InterpolationModel),
}

impl GramInput {
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn resolve(&self) -> Result<Distinguishability> {
        let given = [
            self.states.is_some(),
            self.gram.is_some(),
            self.interpolation.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if given != 1 {
            return Err(Error::Validation(
                "input must contain exactly one of \"states\", \"gram\", \"interpolation\"".into(),
            ));
        }
        let to_c = |p: &[f64; 2]| Complex64::new(p[0], p[1]);
        if let Some(states) = &self.states {
            let states: Vec<Vec<Complex64>> =
                states.iter().map(|v| v.iter().map(to_c).collect()).collect();
            return gram_from_states(&states).map(Distinguishability::Gram);
        }
        if let Some(rows) = &self.gram {
            let n = rows.len();
            if let Some(i) = rows.iter().position(|r| r.len() != n) {
                return Err(Error::Shape(format!("gram row {i} does not have {n} entries")));
            }
            let data = rows.iter().flat_map(|r| r.iter().map(to_c)).collect();
            let s = ComplexMatrix::from_row_major(n, n, data)?;
            return validate_gram(&s).map(Distinguishability::Gram);
        }
        let interp = self.interpolation.as_ref().expect("counted above");
        let size = interp.n.map_or(ModelSize::Limit, ModelSize::Finite);
        InterpolationModel::new(interp.x, size).map(Distinguishability::Interpolation)
    }
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

    fn random_states(n: usize, dim: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
        (0..n)
            .map(|_| {
                let v: Vec<Complex64> = (0..dim)
                    .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect();
                let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                v.into_iter().map(|z| z / norm).collect()
            })
            .collect()
    }

    fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        // eigenvectors of a random Hermitian matrix
        let mut h = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            h[(i, i)] = c(rng.gen_range(-1.0..1.0), 0.0);
            for j in i + 1..d {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        eig_hermitian(&h).unwrap().eigenvectors
    }

    #[test]
    fn identical_states_give_all_ones() {
        let phi = vec![c(0.6, 0.0), c(0.0, 0.8)];
        let g = gram_from_states(&[phi.clone(), phi.clone(), phi]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((g.matrix()[(i, j)] - c(1.0, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn orthogonal_states_give_identity() {
        let states = vec![
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 1.0)],
        ];
        let g = gram_from_states(&states).unwrap();
        assert_eq!(g.matrix(), &ComplexMatrix::identity(2));
    }

    #[test]
    fn overlap_point_six() {
        let states = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.6, 0.0), c(0.8, 0.0)]];
        let g = gram_from_states(&states).unwrap();
        assert_relative_eq!(g.matrix()[(0, 1)].re, 0.6, epsilon = 1e-15);
        assert_relative_eq!(g.matrix()[(1, 0)].re, 0.6, epsilon = 1e-15);
    }

    #[test]
    fn conjugate_linear_in_first_argument() {
        let states = vec![vec![c(0.0, 1.0)], vec![c(1.0, 0.0)]];
        let g = gram_from_states(&states).unwrap();
        // <i|1> = -i
        assert!((g.matrix()[(0, 1)] - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn state_errors() {
        let bad = vec![vec![c(1.0, 0.0)], vec![c(0.5, 0.0)]];
        assert!(matches!(
            gram_from_states(&bad),
            Err(Error::NotNormalized { index: 1, .. })
        ));
        let ragged = vec![vec![c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]];
        assert!(matches!(gram_from_states(&ragged), Err(Error::Shape(_))));
    }

    #[test]
    fn validate_rejects_non_psd() {
        let s = ComplexMatrix::from_real_row_major(2, 2, &[1.0, 1.5, 1.5, 1.0]).unwrap();
        match validate_gram(&s) {
            Err(Error::NotPositiveSemidefinite { min_eigenvalue }) => {
                assert_relative_eq!(min_eigenvalue, -0.5, epsilon = 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validate_rejects_bad_diagonal() {
        let s = ComplexMatrix::from_real_row_major(2, 2, &[1.0, 0.1, 0.1, 0.9]).unwrap();
        assert!(matches!(
            validate_gram(&s),
            Err(Error::NonUnitDiagonal { index: 1, .. })
        ));
    }

    #[test]
    fn validate_accepts_identity_and_rank_one() {
        assert!(validate_gram(&ComplexMatrix::identity(4)).is_ok());
        let g = GramMatrix::indistinguishable(3).unwrap();
        assert!(g.min_eigenvalue().abs() < 1e-14);
    }

    #[test]
    fn factor_rank_one() {
        let g = GramMatrix::indistinguishable(5).unwrap();
        let f = factor_gram(&g, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(f.d(), 1);
        let phase = f.row(0)[0] / f.row(0)[0].norm();
        for i in 0..5 {
            assert!((f.row(i)[0].norm() - 1.0).abs() < 1e-12);
            assert!((f.row(i)[0] / phase - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn factor_identity_is_unitary() {
        let g = GramMatrix::distinguishable(4).unwrap();
        let f = factor_gram(&g, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(f.d(), 4);
        let prod = f.matrix().adjoint().matmul(f.matrix()).unwrap();
        assert!(prod.sub(&ComplexMatrix::identity(4)).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn interpolation_three_half() {
        let model = InterpolationModel::new(0.5, ModelSize::Finite(3)).unwrap();
        let g = model.gram().unwrap();
        let ev = &g.eigen().eigenvalues;
        assert_relative_eq!(ev[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(ev[1], 0.5, epsilon = 1e-12);
        assert_relative_eq!(ev[2], 0.5, epsilon = 1e-12);
        let f = factor_gram(&g, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(f.d(), 3);
        let gamma = gamma_of(&f).unwrap();
        let sp = gamma.spectrum();
        assert_relative_eq!(sp[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(sp[1], 1.0 / 6.0, epsilon = 1e-12);
        assert_relative_eq!(sp[2], 1.0 / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn gamma_extremes() {
        let f = InternalFactor::indistinguishable(6);
        let g = gamma_of(&f).unwrap();
        assert_eq!(g.d(), 1);
        assert_relative_eq!(g.spectrum()[0], 1.0, epsilon = 1e-15);

        let f = factor_gram(&GramMatrix::distinguishable(5).unwrap(), DEFAULT_RANK_TOL).unwrap();
        let g = gamma_of(&f).unwrap();
        for &l in g.spectrum() {
            assert_relative_eq!(l, 0.2, epsilon = 1e-12);
        }
    }

    #[test]
    fn interpolation_spectra() {
        let sp = interpolation_spectrum(&InterpolationModel::new(0.0, ModelSize::Finite(5)).unwrap());
        assert_eq!(sp.values().unwrap(), vec![0.2; 5]);
        let sp = interpolation_spectrum(&InterpolationModel::new(1.0, ModelSize::Finite(4)).unwrap());
        assert_eq!(sp.values().unwrap(), vec![1.0, 0.0, 0.0, 0.0]);
        let sp = interpolation_spectrum(&InterpolationModel::new(0.5, ModelSize::Finite(3)).unwrap());
        let v = sp.values().unwrap();
        assert_relative_eq!(v[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(v[1], 1.0 / 6.0, epsilon = 1e-15);
        assert!(InterpolationModel::new(1.2, ModelSize::Limit).is_err());
        assert!(InterpolationModel::new(-0.1, ModelSize::Finite(3)).is_err());
        assert_eq!(
            interpolation_spectrum(&InterpolationModel::new(0.3, ModelSize::Limit).unwrap()),
            InterpolationSpectrum::Limit {
                lambda_max: 0.3,
                cloud_weight: 0.7
            }
        );
    }

    #[test]
    fn json_input() {
        let doc = br#"{"gram": [[[1,0],[0.6,0]],[[0.6,0],[1,0]]]}"#;
        let Distinguishability::Gram(g) = GramInput::from_json(doc).unwrap().resolve().unwrap() else {
            panic!("expected Gram");
        };
        assert_relative_eq!(g.matrix()[(0, 1)].re, 0.6);

        let doc = br#"{"states": [[[1,0],[0,0]], [[0,0],[0,1]]]}"#;
        let Distinguishability::Gram(g) = GramInput::from_json(doc).unwrap().resolve().unwrap() else {
            panic!("expected Gram");
        };
        assert_eq!(g.matrix(), &ComplexMatrix::identity(2));

        let doc = br#"{"interpolation": {"x": 0.25, "n": 4}}"#;
        let Distinguishability::Interpolation(m) =
            GramInput::from_json(doc).unwrap().resolve().unwrap()
        else {
            panic!("expected interpolation");
        };
        assert_eq!(m.size(), ModelSize::Finite(4));

        assert!(GramInput::from_json(b"{}").unwrap().resolve().is_err());
        assert!(GramInput::from_json(b"{\"bogus\": 1}").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn factor_round_trips(seed in any::<u64>(), n in 1usize..8, dim in 1usize..6) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let g = gram_from_states(&random_states(n, dim, &mut rng)).unwrap();
                let f = factor_gram(&g, DEFAULT_RANK_TOL).unwrap();
                prop_assert!(f.d() <= dim.min(n));
                prop_assert!(f.gram().sub(g.matrix()).unwrap().max_abs() < 1e-9);
                for i in 0..n {
                    let norm2: f64 = f.row(i).iter().map(|z| z.norm_sqr()).sum();
                    prop_assert!((norm2 - 1.0).abs() < 1e-10);
                }
            }

            #[test]
            fn gamma_matches_gram_spectrum(seed in any::<u64>(), n in 2usize..8, dim in 1usize..6) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let g = gram_from_states(&random_states(n, dim, &mut rng)).unwrap();
                let f = factor_gram(&g, DEFAULT_RANK_TOL).unwrap();
                let gamma = gamma_of(&f).unwrap();
                prop_assert!((gamma.matrix().trace().re - 1.0).abs() < 1e-10);
                let nonzero: Vec<f64> = g.eigen().eigenvalues[..f.d()]
                    .iter()
                    .map(|l| l / n as f64)
                    .collect();
                for (a, b) in gamma.spectrum().iter().zip(&nonzero) {
                    prop_assert!((a - b).abs() < 1e-9);
                }
            }

            #[test]
            fn gauge_invariant_spectrum(seed in any::<u64>(), n in 2usize..7) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let g = gram_from_states(&random_states(n, 3, &mut rng)).unwrap();
                let f = factor_gram(&g, DEFAULT_RANK_TOL).unwrap();
                let w = random_unitary(f.d(), &mut rng);
                let fw = f.regauge(&w).unwrap();
                let a = gamma_of(&f).unwrap();
                let b = gamma_of(&fw).unwrap();
                for (x, y) in a.spectrum().iter().zip(b.spectrum()) {
                    prop_assert!((x - y).abs() < 1e-10);
                }
            }
        }
    }
}
