//! The limiting `d`-mode Gaussian state of one output port of an unbiased
//! interferometer, finite-`n` characteristic functions, and Hilbert–Schmidt
//! (Plancherel) distances between them.
//!
//! Conventions: `[a, a†] = 1`; characteristic functions are normally ordered,
//! `χ(z) = Tr(ρ e^{z·a†} e^{-z*·a})`; phase-space vectors are ordered
//! `y = (x_1..x_d, p_1..p_d)` with `z_u = x_u + i p_u`.

use num_complex::Complex64;
use serde::Serialize;

use crate::distinguishability::{GammaMatrix, InternalFactor};
use crate::error::{Error, Result};
use crate::matcore::{eig_hermitian, ComplexMatrix};
use crate::quadrature::gauss_hermite;
use crate::reduce::tree_sum;

/// Tolerance of the physicality checks on second moments.
pub const PHYSICALITY_TOL: f64 = 1e-10;

/// Normally-ordered second moments `⟨a†a⟩` and `⟨aa⟩` of a zero-mean single-mode state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct InputMoments {
    mean_n: f64,
    pair: Complex64,
}

impl InputMoments {
    pub fn new(mean_n: f64, pair: Complex64) -> Result<Self> {
        if !(mean_n.is_finite() && pair.re.is_finite() && pair.im.is_finite()) {
            return Err(Error::Validation("input moments must be finite".into()));
        }
        if mean_n < 0.0 {
            return Err(Error::Validation(format!("mean photon number {mean_n} is negative")));
        }
        let bound = (mean_n * (mean_n + 1.0)).sqrt();
        if pair.norm() > bound * (1.0 + PHYSICALITY_TOL) + PHYSICALITY_TOL {
            return Err(Error::Validation(format!(
                "|<aa>| = {} exceeds sqrt(N(N+1)) = {bound}",
                pair.norm()
            )));
        }
        Ok(Self { mean_n, pair })
    }

    /// Phase-insensitive input (`⟨aa⟩ = 0`) with `⟨a†a⟩ = r`: Fock and thermal states.
    pub fn isotropic(r: f64) -> Result<Self> {
        Self::new(r, Complex64::new(0.0, 0.0))
    }

    pub fn single_photon() -> Self {
        Self {
            mean_n: 1.0,
            pair: Complex64::new(0.0, 0.0),
        }
    }

    /// Pure squeezed vacuum with `⟨aa⟩ = pair`; `⟨a†a⟩` solves `|pair|² = N(N+1)`.
    pub fn squeezed_vacuum(pair: Complex64) -> Result<Self> {
        let mean_n = 0.5 * ((1.0 + 4.0 * pair.norm_sqr()).sqrt() - 1.0);
        Self::new(mean_n, pair)
    }

    pub fn mean_n(&self) -> f64 {
        self.mean_n
    }

    /// `⟨aa⟩`.
    pub fn pair(&self) -> Complex64 {
        self.pair
    }

    pub fn is_isotropic(&self) -> bool {
        self.pair.norm() == 0.0
    }

    /// Normally-ordered moment matrix `τ̃` with `γ = τ̃ ⊗ Γ` for real `C`.
    pub fn tau_tilde(&self) -> [[f64; 2]; 2] {
        let (a, b) = (self.pair.re, self.pair.im);
        [[self.mean_n - a, -b], [-b, self.mean_n + a]]
    }

    /// Symmetrized quadrature covariance `⟨{Δr, Δr}⟩/2` of the input, vacuum = `I/2`,
    /// in `(x, p)` order with `x = (a + a†)/√2`.
    pub fn symplectic_covariance(&self) -> [[f64; 2]; 2] {
        let (n, a, b) = (self.mean_n, self.pair.re, self.pair.im);
        [[n + 0.5 + a, b], [b, n + 0.5 - a]]
    }
}

/// A point `z ∈ C^d` of phase space.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpacePoint {
    pub z: Vec<Complex64>,
}

impl PhaseSpacePoint {
    pub fn new(z: Vec<Complex64>) -> Self {
        Self { z }
    }

    /// From `y = (x_1..x_d, p_1..p_d)`.
    pub fn from_xp(y: &[f64]) -> Self {
        let d = y.len() / 2;
        Self {
            z: (0..d).map(|u| Complex64::new(y[u], y[d + u])).collect(),
        }
    }

    pub fn to_xp(&self) -> Vec<f64> {
        self.z.iter().map(|z| z.re).chain(self.z.iter().map(|z| z.im)).collect()
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }
}

/// One internal mode of the generalized Gibbs state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GibbsMode {
    pub lambda: f64,
    /// `ln(1 + 1/(⟨a†a⟩ λ))`; infinite for an empty mode.
    pub beta: f64,
}

/// Limiting Gaussian state `χ(y) = exp(-yᵀ γ y)` over the `d` internal modes.
#[derive(Clone, Debug)]
pub struct AsymptoticState {
    gamma: GammaMatrix,
    moments: InputMoments,
    exponent: Vec<f64>,
    exponent_spectrum: Vec<f64>,
    gibbs: Option<Vec<GibbsMode>>,
}

impl AsymptoticState {
    pub fn d(&self) -> usize {
        self.gamma.d()
    }

    pub fn gamma(&self) -> &GammaMatrix {
        &self.gamma
    }

    pub fn moments(&self) -> &InputMoments {
        &self.moments
    }

    /// Real symmetric `2d x 2d` exponent `γ`, row-major.
    pub fn exponent(&self) -> &[f64] {
        &self.exponent
    }

    pub fn exponent_at(&self, i: usize, j: usize) -> f64 {
        self.exponent[i * 2 * self.d() + j]
    }

    /// Eigenvalues of `γ`, descending.
    pub fn exponent_spectrum(&self) -> &[f64] {
        &self.exponent_spectrum
    }

    /// Per-mode temperatures; present for phase-insensitive inputs only.
    pub fn gibbs(&self) -> Option<&[GibbsMode]> {
        self.gibbs.as_deref()
    }

    pub fn is_isotropic(&self) -> bool {
        self.moments.is_isotropic()
    }

    /// `yᵀ γ y`.
    pub fn quadratic_form(&self, y: &[f64]) -> f64 {
        let m = 2 * self.d();
        let mut s = 0.0;
        for i in 0..m {
            let row = &self.exponent[i * m..(i + 1) * m];
            let ri: f64 = row.iter().zip(y).map(|(g, v)| g * v).sum();
            s += y[i] * ri;
        }
        s
    }
}

/// Assembles the limiting state from `Γ = C^H C/n`, `K = Cᵀ C/n` and the input moments.
///
/// `ln χ(z) = -⟨a†a⟩ z^H Γ z + Re(⟨a†a†⟩ zᵀ K z)`, rewritten as `-yᵀ γ y`.
pub fn build_asymptotic(
    gamma: &GammaMatrix,
    c: &InternalFactor,
    moments: InputMoments,
) -> Result<AsymptoticState> {
    let d = gamma.d();
    if c.d() != d || c.n() != gamma.n() {
        return Err(Error::Shape(format!(
            "Γ is {d}x{d} for n = {}, factor is {}x{}",
            gamma.n(),
            c.n(),
            c.d()
        )));
    }
    let n = c.n() as f64;
    let g = gamma.matrix();
    let k = c.matrix().transpose().matmul(c.matrix())?.scale_real(1.0 / n);
    let q = moments.pair.conj();
    let nbar = moments.mean_n;
    let m = 2 * d;
    let mut ex = vec![0.0; m * m];
    for u in 0..d {
        for v in 0..d {
            let (a, b) = (g[(u, v)].re, g[(u, v)].im);
            let l = q * k[(u, v)];
            let (pr, qi) = (l.re, l.im);
            // N [[A, -B], [B, A]] + [[-P, Q], [Q, P]]
            ex[u * m + v] = nbar * a - pr;
            ex[u * m + d + v] = -nbar * b + qi;
            ex[(d + u) * m + v] = nbar * b + qi;
            ex[(d + u) * m + d + v] = nbar * a + pr;
        }
    }
    // exact symmetry
    for i in 0..m {
        for j in i + 1..m {
            let s = 0.5 * (ex[i * m + j] + ex[j * m + i]);
            ex[i * m + j] = s;
            ex[j * m + i] = s;
        }
    }

    let gm = ComplexMatrix::from_real_row_major(m, m, &ex)?;
    let exponent_spectrum = eig_hermitian(&gm)?.eigenvalues;

    // physical covariance γ + (I + iΩ)/2 ≥ 0
    let mut phys = gm.clone();
    for i in 0..m {
        phys[(i, i)] += 0.5;
    }
    for u in 0..d {
        phys[(u, d + u)] += Complex64::new(0.0, 0.5);
        phys[(d + u, u)] -= Complex64::new(0.0, 0.5);
    }
    let min_phys = eig_hermitian(&phys)?.min_eigenvalue();
    let scale = 1.0 + exponent_spectrum.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if min_phys < -PHYSICALITY_TOL * scale {
        return Err(Error::Inconsistent(format!(
            "asymptotic covariance violates the uncertainty relation (min eigenvalue {min_phys})"
        )));
    }

    let gibbs = moments.is_isotropic().then(|| {
        gamma
            .spectrum()
            .iter()
            .map(|&lambda| GibbsMode {
                lambda,
                beta: gibbs_beta(nbar, lambda),
            })
            .collect()
    });

    Ok(AsymptoticState {
        gamma: gamma.clone(),
        moments,
        exponent: ex,
        exponent_spectrum,
        gibbs,
    })
}

fn gibbs_beta(mean_n: f64, lambda: f64) -> f64 {
    let occ = mean_n * lambda;
    if occ <= 0.0 {
        f64::INFINITY
    } else {
        (1.0 / occ).ln_1p()
    }
}

/// A characteristic function over `C^d`.
pub trait CharacteristicFunction: Sync {
    fn modes(&self) -> usize;

    fn eval(&self, z: &[Complex64]) -> Complex64;

    /// Rate `a ≥ 0` such that `|χ(z)| ≤ C e^{-a|z|²}`; used to rescale quadrature.
    fn gaussian_envelope(&self) -> f64 {
        0.0
    }
}

impl CharacteristicFunction for AsymptoticState {
    fn modes(&self) -> usize {
        self.d()
    }

    fn eval(&self, z: &[Complex64]) -> Complex64 {
        let y: Vec<f64> = z.iter().map(|w| w.re).chain(z.iter().map(|w| w.im)).collect();
        Complex64::new((-self.quadratic_form(&y)).exp(), 0.0)
    }

    fn gaussian_envelope(&self) -> f64 {
        self.exponent_spectrum.last().copied().unwrap_or(0.0).max(0.0)
    }
}

pub fn char_fn_asymptotic(state: &AsymptoticState, at: &PhaseSpacePoint) -> Result<Complex64> {
    if at.dim() != state.d() {
        return Err(Error::Shape(format!(
            "point has {} coordinates, state has {} modes",
            at.dim(),
            state.d()
        )));
    }
    Ok(state.eval(&at.z))
}

/// Single-mode input state fed into every port.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InputKind {
    SinglePhoton,
    Thermal { mean_n: f64 },
    /// Zero-mean Gaussian state with the given moments.
    Squeezed(InputMoments),
}

impl InputKind {
    pub fn moments(&self) -> Result<InputMoments> {
        match *self {
            InputKind::SinglePhoton => Ok(InputMoments::single_photon()),
            InputKind::Thermal { mean_n } => InputMoments::isotropic(mean_n),
            InputKind::Squeezed(m) => Ok(m),
        }
    }

    /// Normally-ordered single-mode `χ_ρ(w)`.
    pub fn chi(&self, w: Complex64) -> Complex64 {
        match *self {
            InputKind::SinglePhoton => Complex64::new(1.0 - w.norm_sqr(), 0.0),
            InputKind::Thermal { mean_n } => Complex64::new((-mean_n * w.norm_sqr()).exp(), 0.0),
            InputKind::Squeezed(m) => {
                let expo = -m.mean_n * w.norm_sqr() + (m.pair.conj() * w * w).re;
                Complex64::new(expo.exp(), 0.0)
            }
        }
    }

    fn envelope(&self) -> f64 {
        match *self {
            InputKind::SinglePhoton => 0.0,
            InputKind::Thermal { mean_n } => mean_n,
            InputKind::Squeezed(m) => (m.mean_n - m.pair.norm()).max(0.0),
        }
    }
}

/// Exact output characteristic function `∏_i χ_ρ(Σ_u c_{i,u} z_u / √n)` of port 1.
#[derive(Clone, Debug)]
pub struct FiniteOutput {
    c: InternalFactor,
    kind: InputKind,
    envelope: f64,
}

impl FiniteOutput {
    pub fn new(c: InternalFactor, kind: InputKind) -> Result<Self> {
        kind.moments()?;
        // Σ_i |w_i|² = z^H Γ z ≥ λ_min(Γ) |z|²
        let lambda_min = crate::distinguishability::gamma_of(&c)?
            .spectrum()
            .last()
            .copied()
            .unwrap_or(0.0);
        let envelope = (kind.envelope() * lambda_min).max(0.0);
        Ok(Self { c, kind, envelope })
    }

    pub fn factor(&self) -> &InternalFactor {
        &self.c
    }
}

impl CharacteristicFunction for FiniteOutput {
    fn modes(&self) -> usize {
        self.c.d()
    }

    fn eval(&self, z: &[Complex64]) -> Complex64 {
        let scale = 1.0 / (self.c.n() as f64).sqrt();
        let mut acc = Complex64::new(1.0, 0.0);
        for i in 0..self.c.n() {
            let w: Complex64 = self.c.row(i).iter().zip(z).map(|(c, z)| c * z).sum();
            acc *= self.kind.chi(w * scale);
        }
        acc
    }

    fn gaussian_envelope(&self) -> f64 {
        self.envelope
    }
}

pub fn char_fn_finite(c: &InternalFactor, kind: InputKind, at: &PhaseSpacePoint) -> Result<Complex64> {
    if at.dim() != c.d() {
        return Err(Error::Shape(format!(
            "point has {} coordinates, factor has {} internal modes",
            at.dim(),
            c.d()
        )));
    }
    Ok(FiniteOutput::new(c.clone(), kind)?.eval(&at.z))
}

/// Adapter turning a closure into a characteristic function.
pub struct FnCharacteristic<F> {
    modes: usize,
    envelope: f64,
    f: F,
}

impl<F> FnCharacteristic<F>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    pub fn new(modes: usize, f: F) -> Self {
        Self {
            modes,
            envelope: 0.0,
            f,
        }
    }

    pub fn with_envelope(mut self, rate: f64) -> Self {
        self.envelope = rate.max(0.0);
        self
    }
}

impl<F> CharacteristicFunction for FnCharacteristic<F>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    fn modes(&self) -> usize {
        self.modes
    }

    fn eval(&self, z: &[Complex64]) -> Complex64 {
        (self.f)(z)
    }

    fn gaussian_envelope(&self) -> f64 {
        self.envelope
    }
}

#[derive(Clone, Debug)]
pub struct PlancherelOptions {
    /// Gauss–Hermite node counts per real dimension, refined in order.
    pub levels: Vec<usize>,
    /// Maximum change of the distance between the last two levels.
    pub tolerance: f64,
}

impl Default for PlancherelOptions {
    fn default() -> Self {
        Self {
            levels: vec![32, 64, 128],
            tolerance: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlancherelDistance {
    pub distance: f64,
    pub error_estimate: f64,
    pub nodes: usize,
}

/// Hilbert–Schmidt distance `‖ρ_a - ρ_b‖₂` from normally-ordered characteristic functions:
/// `∫ d^{2d}z/π^d e^{-|z|²} |χ_a(z) - χ_b(z)|²`.
pub fn plancherel_distance(
    chi_a: &dyn CharacteristicFunction,
    chi_b: &dyn CharacteristicFunction,
    opts: &PlancherelOptions,
) -> Result<PlancherelDistance> {
    let d = chi_a.modes();
    if chi_b.modes() != d {
        return Err(Error::Shape(format!(
            "characteristic functions have {} and {} modes",
            d,
            chi_b.modes()
        )));
    }
    if d == 0 || d > 2 {
        return Err(Error::Capability(format!(
            "Plancherel quadrature supports 1 or 2 modes, got {d}"
        )));
    }
    if opts.levels.is_empty() {
        return Err(Error::Domain("no quadrature levels requested".into()));
    }
    let mut previous: Option<f64> = None;
    let mut last = 0.0;
    let mut last_err = f64::INFINITY;
    let mut last_nodes = 0;
    for &nodes in &opts.levels {
        let value = hs_distance_squared(chi_a, chi_b, d, nodes).max(0.0).sqrt();
        last_nodes = nodes;
        if let Some(prev) = previous {
            last_err = (value - prev).abs();
            last = value;
            if last_err <= opts.tolerance {
                return Ok(PlancherelDistance {
                    distance: value,
                    error_estimate: last_err,
                    nodes,
                });
            }
        } else {
            last = value;
        }
        previous = Some(value);
    }
    if opts.levels.len() == 1 {
        // a single level gives no error estimate; report it as unknown
        return Ok(PlancherelDistance {
            distance: last,
            error_estimate: f64::NAN,
            nodes: last_nodes,
        });
    }
    Err(Error::NoConvergence {
        what: format!("Plancherel quadrature ({last_nodes} nodes, distance {last:e})"),
        tolerance: opts.tolerance,
        achieved: last_err,
    })
}

fn hs_distance_squared(
    chi_a: &dyn CharacteristicFunction,
    chi_b: &dyn CharacteristicFunction,
    d: usize,
    nodes: usize,
) -> f64 {
    let rule = gauss_hermite(nodes);
    let dims = 2 * d;
    let total = nodes.pow(dims as u32);
    let f = |idx: usize| {
        let mut rest = idx;
        let mut weight = 1.0;
        let mut y = [0.0f64; 4];
        for slot in y.iter_mut().take(dims) {
            let k = rest % nodes;
            rest /= nodes;
            *slot = rule.nodes[k];
            weight *= rule.weights[k];
        }
        let z: Vec<Complex64> = (0..d).map(|u| Complex64::new(y[u], y[d + u])).collect();
        let diff = chi_a.eval(&z) - chi_b.eval(&z);
        weight * diff.norm_sqr()
    };
    tree_sum(total, &f) / std::f64::consts::PI.powi(d as i32)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub distance: f64,
    pub error_estimate: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `ln distance` against `ln n`.
    pub slope: Option<f64>,
}

/// Plancherel distance between the exact port-1 state and its Gaussian limit for each `n`.
pub fn convergence_sweep<F>(
    family: F,
    kind: InputKind,
    n_list: &[usize],
    opts: &PlancherelOptions,
) -> Result<ConvergenceTable>
where
    F: Fn(usize) -> Result<InternalFactor>,
{
    let moments = kind.moments()?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let c = family(n)?;
        if c.n() != n {
            return Err(Error::Shape(format!("family returned {} rows for n = {n}", c.n())));
        }
        let gamma = crate::distinguishability::gamma_of(&c)?;
        let limit = build_asymptotic(&gamma, &c, moments)?;
        let finite = FiniteOutput::new(c, kind)?;
        let dist = plancherel_distance(&finite, &limit, opts)?;
        rows.push(ConvergenceRow {
            n,
            distance: dist.distance,
            error_estimate: dist.error_estimate,
        });
    }
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.distance)).collect();
    Ok(ConvergenceTable {
        slope: log_log_slope(&points),
        rows,
    })
}

/// Least-squares slope of `ln y` versus `ln x`; `None` unless at least two positive points exist.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 || logs.len() != points.len() {
        return None;
    }
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
