//! Photon-number statistics of the limiting Gaussian state.
//!
//! For a zero-mean Gaussian state with exponent `γ` the generating function
//! `G(β) = Σ_m p_m β^m` is `det(I + (1-β)γ)^{-1/2}`. Diagonalizing, every
//! distribution here is described by an [`OccupationSpectrum`]: a list of
//! occupations `g` with exponents `w` such that `G(β) = ∏ (1 + (1-β) g)^{-w}`.
//! Phase-insensitive inputs give `g = r λ_u` with `w = 1`; a general `γ`
//! gives its eigenvalues with `w = 1/2`.
//!
//! Logarithmic differentiation of `G` yields the recursion
//! `m p_m = Σ_{l<m} p_l s_{m-l}` with power sums `s_k = Σ w (g/(1+g))^k`.
//!
//! Truncation uses the Chernoff bound `P(N > M) ≤ G(t) / t^{M+1}` for
//! `1 < t < 1 + 1/g_max`, minimized over `t`.

use num_complex::Complex64;
use serde::Serialize;

use crate::asymptotic::{AsymptoticState, CharacteristicFunction};
use crate::distinguishability::{interpolation_spectrum, InterpolationModel, InterpolationSpectrum};
use crate::error::{Error, Result};
use crate::matcore::{det_shifted, ComplexMatrix};
use crate::quadrature::{gauss_laguerre, laguerre_all};

/// Normalization slack allowed by [`PhotonNumberDistribution::validate`].
pub const NORMALIZATION_TOL: f64 = 1e-9;
pub const DEFAULT_EPS: f64 = 1e-12;
pub const DEFAULT_M_MAX: usize = 10_000;
/// Tail bounds are always pushed at least this low, whatever `ε` asks for.
const TAIL_FLOOR: f64 = 1e-10;
/// Effective `n` for infinite-rank spectra approximated at finite size.
pub const DEFAULT_EFFECTIVE_N: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Recursion,
    GeneralRecursion,
    ClosedForm,
    Oracle,
    Quadrature,
}

/// Truncated photon-number distribution `p_0 … p_M` with a bound on the missing mass.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhotonNumberDistribution {
    probs: Vec<f64>,
    tail_bound: f64,
    source: Provenance,
}

impl PhotonNumberDistribution {
    pub fn new(probs: Vec<f64>, tail_bound: f64, source: Provenance) -> Self {
        Self {
            probs,
            tail_bound,
            source,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, m: usize) -> f64 {
        self.probs.get(m).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn source(&self) -> Provenance {
        self.source
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(m, p)| m as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.probs
            .iter()
            .enumerate()
            .map(|(m, p)| (m as f64 - mean).powi(2) * p)
            .sum()
    }

    /// Checks nonnegativity and `Σ p + tail ∈ [1 - 1e-9, 1 + 1e-9]`.
    pub fn validate(&self) -> Result<()> {
        if let Some(m) = self.probs.iter().position(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::Inconsistent(format!(
                "p[{m}] = {} is not a probability",
                self.probs[m]
            )));
        }
        if !(self.tail_bound.is_finite() && self.tail_bound >= 0.0) {
            return Err(Error::Inconsistent(format!("tail bound {} is invalid", self.tail_bound)));
        }
        let total = self.total() + self.tail_bound;
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Inconsistent(format!(
                "probabilities sum to {} with tail bound {}",
                self.total(),
                self.tail_bound
            )));
        }
        Ok(())
    }
}

/// Stopping rule for distributions computed term by term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncation {
    /// Requested bound on the discarded mass.
    pub eps: f64,
    /// Largest photon number that may be computed before giving up.
    pub m_max: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            eps: DEFAULT_EPS,
            m_max: DEFAULT_M_MAX,
        }
    }
}

impl Truncation {
    pub fn new(eps: f64, m_max: usize) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Domain(format!("truncation tolerance {eps} must be positive")));
        }
        Ok(Self { eps, m_max })
    }

    fn target(&self) -> f64 {
        self.eps.min(TAIL_FLOOR)
    }
}

/// `G(β) = ∏ (1 + (1-β) g)^{-w}` over `(g, w)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupationSpectrum {
    modes: Vec<(f64, f64)>,
}

impl OccupationSpectrum {
    /// `g = r λ_u`, `w = 1`: phase-insensitive inputs with mean photon number `r`.
    pub fn isotropic(lambdas: &[f64], r: f64) -> Result<Self> {
        let pairs: Vec<(f64, usize)> = lambdas.iter().map(|&l| (l, 1)).collect();
        Self::isotropic_with_multiplicity(&pairs, r)
    }

    /// As [`isotropic`](Self::isotropic) with `(λ, multiplicity)` pairs.
    pub fn isotropic_with_multiplicity(lambdas: &[(f64, usize)], r: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("mean photon number r = {r} must be >= 0")));
        }
        let mut modes = Vec::with_capacity(lambdas.len());
        for &(l, k) in lambdas {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(Error::Domain(format!("eigenvalue {l} must be >= 0")));
            }
            if k > 0 && l > 0.0 && r > 0.0 {
                modes.push((r * l, k as f64));
            }
        }
        Ok(Self { modes })
    }

    /// Eigenvalues of `γ` with `w = 1/2`.
    pub fn from_exponent(state: &AsymptoticState) -> Result<Self> {
        let mut modes = Vec::with_capacity(state.exponent_spectrum().len());
        for &g in state.exponent_spectrum() {
            if g <= -1.0 {
                return Err(Error::Inconsistent(format!(
                    "exponent eigenvalue {g} makes I + γ singular"
                )));
            }
            if g != 0.0 {
                modes.push((g, 0.5));
            }
        }
        Ok(Self { modes })
    }

    /// The isotropic form when the input is phase-insensitive, the exponent form otherwise.
    pub fn of_state(state: &AsymptoticState) -> Result<Self> {
        if state.is_isotropic() {
            Self::isotropic(state.gamma().spectrum(), state.moments().mean_n())
        } else {
            Self::from_exponent(state)
        }
    }

    pub fn modes(&self) -> &[(f64, f64)] {
        &self.modes
    }

    pub fn max_occupation(&self) -> f64 {
        self.modes.iter().map(|m| m.0).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Upper end of the open interval on which `G` is analytic.
    pub fn radius(&self) -> f64 {
        let gmax = self.max_occupation();
        if gmax > 0.0 {
            1.0 + 1.0 / gmax
        } else {
            f64::INFINITY
        }
    }

    fn lower_radius(&self) -> f64 {
        let gmin = self.modes.iter().map(|m| m.0).fold(f64::INFINITY, f64::min);
        if gmin < 0.0 {
            1.0 + 1.0 / gmin
        } else {
            f64::NEG_INFINITY
        }
    }

    fn check_domain(&self, beta: f64) -> Result<()> {
        if !(beta < self.radius() && beta > self.lower_radius()) {
            return Err(Error::Domain(format!(
                "β = {beta} outside the generating function's domain ({}, {})",
                self.lower_radius(),
                self.radius()
            )));
        }
        Ok(())
    }

    pub fn ln_generating(&self, beta: f64) -> Result<f64> {
        self.check_domain(beta)?;
        Ok(-self
            .modes
            .iter()
            .map(|&(g, w)| w * ((1.0 - beta) * g).ln_1p())
            .sum::<f64>())
    }

    pub fn generating(&self, beta: f64) -> Result<f64> {
        Ok(self.ln_generating(beta)?.exp())
    }

    pub fn p0(&self) -> f64 {
        (-self.modes.iter().map(|&(g, w)| w * g.ln_1p()).sum::<f64>()).exp()
    }

    /// Cumulants `(κ₁, κ₂)`: mean and variance of the photon number.
    pub fn cumulants(&self) -> (f64, f64) {
        let k1 = self.modes.iter().map(|&(g, w)| w * g).sum();
        let k2 = self.modes.iter().map(|&(g, w)| w * g * (1.0 + g)).sum();
        (k1, k2)
    }

    /// Chernoff bound on `P(N > m)`.
    pub fn tail_bound(&self, m: usize) -> f64 {
        let upper = self.radius();
        chernoff_tail(|t| self.ln_generating(t).unwrap_or(f64::INFINITY), upper, m)
    }

    /// Runs the recursion until the tail bound meets the truncation target.
    pub fn distribution(&self, trunc: &Truncation, source: Provenance) -> Result<PhotonNumberDistribution> {
        if self.modes.is_empty() {
            return Ok(PhotonNumberDistribution::new(vec![1.0], 0.0, source));
        }
        let ratios: Vec<(f64, f64)> = self.modes.iter().map(|&(g, w)| (g / (1.0 + g), w)).collect();
        let mut powers: Vec<f64> = ratios.iter().map(|_| 1.0).collect();
        // power_sums[k] = Σ w q^k, filled lazily; index 0 unused
        let mut power_sums = vec![0.0];
        let mut probs = vec![self.p0()];
        let target = trunc.target();
        let mut m = 0;
        loop {
            let tail = self.tail_bound(m);
            if tail <= target {
                return finish(probs, tail, source);
            }
            if m >= trunc.m_max {
                return Err(Error::NoConvergence {
                    what: format!("photon-number recursion up to m = {m}"),
                    tolerance: target,
                    achieved: tail,
                });
            }
            m += 1;
            let mut s = 0.0;
            for (p, &(q, w)) in powers.iter_mut().zip(&ratios) {
                *p *= q;
                s += w * *p;
            }
            power_sums.push(s);
            let acc: f64 = (0..m).map(|l| probs[l] * power_sums[m - l]).sum();
            probs.push(acc / m as f64);
        }
    }
}

fn finish(mut probs: Vec<f64>, tail: f64, source: Provenance) -> Result<PhotonNumberDistribution> {
    for (m, p) in probs.iter_mut().enumerate() {
        if *p < 0.0 {
            if *p < -1e-12 {
                return Err(Error::Inconsistent(format!("recursion produced p[{m}] = {p}")));
            }
            *p = 0.0;
        }
    }
    Ok(PhotonNumberDistribution::new(probs, tail, source))
}

/// `min_t G(t) t^{-(m+1)}` over `1 < t < upper`, by golden-section search in `ln t`.
fn chernoff_tail(ln_g: impl Fn(f64) -> f64, upper: f64, m: usize) -> f64 {
    let k = (m + 1) as f64;
    let hi = if upper.is_finite() {
        // stay strictly inside the domain
        upper.ln() * (1.0 - 1e-12)
    } else {
        // G(t) is bounded on [1, ∞): push t far out
        (k + 50.0).max(60.0)
    };
    let f = |s: f64| ln_g(s.exp()) - k * s;
    let (mut a, mut b) = (0.0f64, hi);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-12 * (1.0 + b.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    let best = fc.min(fd).min(f(0.0));
    best.exp().min(1.0)
}

/// Value of `G(β)` together with the occupations it was built from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratingFunctionEval {
    pub beta: f64,
    pub value: f64,
    /// `{r λ_u}` for phase-insensitive inputs, eigenvalues of `γ` otherwise.
    pub spectrum_used: Vec<f64>,
}

/// `G(β)` from the determinant: `1/det(I + r(1-β)Γ)` for phase-insensitive
/// inputs, `det(I + (1-β)γ)^{-1/2}` otherwise.
pub fn generating_function(state: &AsymptoticState, beta: f64) -> Result<GeneratingFunctionEval> {
    let spec = OccupationSpectrum::of_state(state)?;
    spec.check_domain(beta)?;
    let (value, spectrum_used) = if state.is_isotropic() {
        let r = state.moments().mean_n();
        let det = det_shifted(state.gamma().matrix(), r * (1.0 - beta))?;
        let used = state.gamma().spectrum().iter().map(|l| r * l).collect();
        (1.0 / det.re, used)
    } else {
        let m = 2 * state.d();
        let ex = ComplexMatrix::from_real_row_major(m, m, state.exponent())?;
        let det = det_shifted(&ex, 1.0 - beta)?;
        (1.0 / det.re.sqrt(), state.exponent_spectrum().to_vec())
    };
    Ok(GeneratingFunctionEval {
        beta,
        value,
        spectrum_used,
    })
}

/// Recursion for phase-insensitive inputs: spectrum `{λ_u}` of `Γ`, mean photon number `r`.
pub fn pnd_recursive(spectrum: &[f64], r: f64, trunc: &Truncation) -> Result<PhotonNumberDistribution> {
    OccupationSpectrum::isotropic(spectrum, r)?.distribution(trunc, Provenance::Recursion)
}

/// As [`pnd_recursive`] for a spectrum given as `(λ, multiplicity)` pairs.
pub fn pnd_recursive_weighted(
    spectrum: &[(f64, usize)],
    r: f64,
    trunc: &Truncation,
) -> Result<PhotonNumberDistribution> {
    OccupationSpectrum::isotropic_with_multiplicity(spectrum, r)?.distribution(trunc, Provenance::Recursion)
}

/// Recursion for an arbitrary exponent `γ` (squeezed inputs included):
/// `p_0 = det(I+γ)^{-1/2}`, `m p_m = Σ_{l<m} p_l · ½ Tr[(γ(I+γ)^{-1})^{m-l}]`.
pub fn pnd_general(state: &AsymptoticState, trunc: &Truncation) -> Result<PhotonNumberDistribution> {
    OccupationSpectrum::from_exponent(state)?.distribution(trunc, Provenance::GeneralRecursion)
}

/// Limit `n → ∞` of the interpolation model with single photons, `p_0 … p_{m_max}`.
///
/// The distribution is Poisson(1-x) convolved with a geometric law of mean `x`.
pub fn pnd_interpolation(x: f64, m_max: usize) -> Result<PhotonNumberDistribution> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("interpolation x = {x} outside [0, 1]")));
    }
    let probs: Vec<f64> = if x == 1.0 {
        (0..=m_max).map(|m| 0.5f64.powi(m as i32 + 1)).collect()
    } else if x > 0.9 {
        interpolation_by_convolution(x, m_max)
    } else {
        interpolation_closed_form(x, m_max)
    };
    let tail = interpolation_tail(x, m_max);
    finish(probs, tail, Provenance::ClosedForm)
}

/// [`pnd_interpolation`] with the length chosen by a truncation rule.
pub fn pnd_interpolation_truncated(x: f64, trunc: &Truncation) -> Result<PhotonNumberDistribution> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("interpolation x = {x} outside [0, 1]")));
    }
    let target = trunc.target();
    let mut m = 0;
    while interpolation_tail(x, m) > target {
        if m >= trunc.m_max {
            return Err(Error::NoConvergence {
                what: format!("interpolation distribution up to m = {m}"),
                tolerance: target,
                achieved: interpolation_tail(x, m),
            });
        }
        m += 1;
    }
    pnd_interpolation(x, m)
}

fn interpolation_tail(x: f64, m: usize) -> f64 {
    // G(t) = e^{(1-x)(t-1)} / (1 + x(1-t))
    let ln_g = |t: f64| {
        let geo = 1.0 + x * (1.0 - t);
        if geo <= 0.0 {
            f64::INFINITY
        } else {
            (1.0 - x) * (t - 1.0) - geo.ln()
        }
    };
    let upper = if x > 0.0 { 1.0 + 1.0 / x } else { f64::INFINITY };
    chernoff_tail(ln_g, upper, m)
}

fn ln_factorials(m: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=m {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// `e^{x-1}/(1+x) (1-x)^m Σ_{i≤m} (x/(1-x²))^i / (m-i)!`, term by term in log space.
fn interpolation_closed_form(x: f64, m_max: usize) -> Vec<f64> {
    let lnf = ln_factorials(m_max);
    let ln_pref = x - 1.0 - x.ln_1p();
    let ln_one_minus = (-x).ln_1p();
    let ln_ratio = if x > 0.0 { x.ln() - (-x * x).ln_1p() } else { f64::NEG_INFINITY };
    (0..=m_max)
        .map(|m| {
            let base = ln_pref + m as f64 * ln_one_minus;
            let mut s = (base - lnf[m]).exp();
            if x > 0.0 {
                for i in 1..=m {
                    s += (base + i as f64 * ln_ratio - lnf[m - i]).exp();
                }
            }
            s
        })
        .collect()
}

fn interpolation_by_convolution(x: f64, m_max: usize) -> Vec<f64> {
    let lnf = ln_factorials(m_max);
    let poisson: Vec<f64> = (0..=m_max)
        .map(|k| {
            let mean = 1.0 - x;
            if mean == 0.0 {
                if k == 0 { 1.0 } else { 0.0 }
            } else {
                (-mean + k as f64 * mean.ln() - lnf[k]).exp()
            }
        })
        .collect();
    let q = x / (1.0 + x);
    let geometric: Vec<f64> = (0..=m_max).map(|j| q.powi(j as i32) / (1.0 + x)).collect();
    (0..=m_max)
        .map(|m| (0..=m).map(|k| poisson[k] * geometric[m - k]).sum())
        .collect()
}

/// Two-point stand-in `{λ_max} ∪ {λ_min ×(n-1)}` for the interpolation spectrum.
pub fn effective_interpolation_spectrum(model: &InterpolationModel, n_eff: usize) -> Result<Vec<(f64, usize)>> {
    match interpolation_spectrum(model) {
        InterpolationSpectrum::Finite(pairs) => Ok(pairs),
        InterpolationSpectrum::Limit { .. } => {
            let finite = InterpolationModel::new(model.x(), crate::distinguishability::ModelSize::Finite(n_eff))?;
            match interpolation_spectrum(&finite) {
                InterpolationSpectrum::Finite(pairs) => Ok(pairs),
                InterpolationSpectrum::Limit { .. } => unreachable!("finite model"),
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct LaguerreOptions {
    pub levels: Vec<usize>,
    /// Maximum change of any `p_m` between the last two levels.
    pub tolerance: f64,
}

impl Default for LaguerreOptions {
    fn default() -> Self {
        Self {
            levels: vec![32, 64, 128],
            tolerance: 1e-12,
        }
    }
}

/// `p_m = ∫_0^∞ e^{-t} L_m(t) χ(√t) dt` for a radially symmetric single-mode `χ`.
///
/// The reported tail is `|1 - Σ p_m|`, an estimate rather than a bound.
pub fn pnd_quadrature(
    chi: &dyn CharacteristicFunction,
    m_max: usize,
    opts: &LaguerreOptions,
) -> Result<PhotonNumberDistribution> {
    if chi.modes() != 1 {
        return Err(Error::Capability(format!(
            "Laguerre quadrature needs a single-mode characteristic function, got {} modes",
            chi.modes()
        )));
    }
    check_radial(chi)?;
    if opts.levels.is_empty() {
        return Err(Error::Domain("no quadrature levels requested".into()));
    }
    // t = s/α absorbs an e^{-a t} envelope into the weight
    let alpha = 1.0 + chi.gaussian_envelope();
    let eval = |nodes: usize| -> Vec<f64> {
        let rule = gauss_laguerre(nodes);
        let mut p = vec![0.0; m_max + 1];
        for (&s, &w) in rule.nodes.iter().zip(&rule.weights) {
            let t = s / alpha;
            let chi_t = chi.eval(&[Complex64::new(t.sqrt(), 0.0)]).re;
            let factor = w * (s * (1.0 - 1.0 / alpha)).exp() * chi_t / alpha;
            if factor == 0.0 || !factor.is_finite() {
                continue;
            }
            for (pm, l) in p.iter_mut().zip(laguerre_all(m_max, t)) {
                *pm += factor * l;
            }
        }
        p
    };
    let mut prev: Option<Vec<f64>> = None;
    let mut achieved = f64::INFINITY;
    for &nodes in &opts.levels {
        let p = eval(nodes);
        if let Some(q) = &prev {
            achieved = p.iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if achieved <= opts.tolerance {
                let probs: Vec<f64> = p.iter().map(|&v| if v < 0.0 && v > -1e-12 { 0.0 } else { v }).collect();
                let tail = (1.0 - probs.iter().sum::<f64>()).abs();
                return Ok(PhotonNumberDistribution::new(probs, tail, Provenance::Quadrature));
            }
        }
        prev = Some(p);
    }
    Err(Error::NoConvergence {
        what: "Gauss–Laguerre photon-number quadrature".into(),
        tolerance: opts.tolerance,
        achieved,
    })
}

fn check_radial(chi: &dyn CharacteristicFunction) -> Result<()> {
    for &r in &[0.3, 0.9, 1.7] {
        let reference = chi.eval(&[Complex64::new(r, 0.0)]);
        for &theta in &[0.7f64, 1.9, 3.3, 5.1] {
            let v = chi.eval(&[Complex64::from_polar(r, theta)]);
            if (v - reference).norm() > 1e-10 * reference.norm().max(1.0) {
                return Err(Error::Capability(
                    "characteristic function is not radially symmetric".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Mean, variance and purity `Tr Γ²` for phase-insensitive inputs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub purity: f64,
}

/// `⟨N⟩ = r`, `Var N = r + r² Tr Γ²` (which is `r(1 + Tr Γ²)` for single photons).
pub fn moments(spectrum: &[f64], r: f64) -> Result<Moments> {
    let spec = OccupationSpectrum::isotropic(spectrum, r)?;
    let (mean, variance) = spec.cumulants();
    Ok(Moments {
        mean,
        variance,
        purity: spectrum.iter().map(|l| l * l).sum(),
    })
}

/// `M(β) = G(e^β)`.
pub fn moment_generating(spec: &OccupationSpectrum, beta: f64) -> Result<f64> {
    spec.generating(beta.exp())
}

/// `(M'(0), M''(0))` from the exact cumulants.
pub fn moment_generating_derivatives(spec: &OccupationSpectrum) -> (f64, f64) {
    let (k1, k2) = spec.cumulants();
    (k1, k2 + k1 * k1)
}
