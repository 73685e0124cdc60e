//! Exact finite-`n` output statistics by Fock-space expansion.
//!
//! Photon `i` enters port `i` in internal state `Σ_u conj(c_iu) |u⟩` and the
//! interferometer maps `a†_i → Σ_j U_ji a†_j`. The output state
//! `∏_i Σ_{j,u} U_ji conj(c_iu) a†_{j,u} |vac⟩` is expanded as a polynomial in
//! creation operators. A monomial is stored as the sorted multiset of its mode
//! indices `j·d + u`, packed one byte per photon into a `u64`.

use std::collections::HashMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::distinguishability::InternalFactor;
use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;
use crate::photonstats::{PhotonNumberDistribution, Provenance};

/// Largest `n` that fits the packed pattern representation.
pub const HARD_MAX_PHOTONS: usize = 8;
pub const DEFAULT_MAX_PHOTONS: usize = 7;
pub const DEFAULT_MAX_PATTERNS: u128 = 5_000_000;
const BUCKET_BITS: u32 = 4;
const BUCKETS: usize = 1 << BUCKET_BITS;
const UNITARY_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct OracleConfig {
    pub max_photons: usize,
    /// Cap on the number of output occupation patterns `C(nd + n - 1, n)`.
    pub max_patterns: u128,
    /// Interferometer to use instead of the Fourier matrix; its first row must be uniform.
    pub unitary: Option<ComplexMatrix>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_photons: DEFAULT_MAX_PHOTONS,
            max_patterns: DEFAULT_MAX_PATTERNS,
            unitary: None,
        }
    }
}

/// `U_jk = e^{2πi jk/n} / √n`.
pub fn unbiased_unitary(n: usize) -> ComplexMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |j, k| {
        // reduce jk mod n before taking the angle
        let phase = 2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64;
        Complex64::from_polar(scale, phase)
    })
}

/// `diag(1, V) · F`: another unitary sharing the Fourier matrix's first row.
pub fn complete_unbiased(v: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !v.is_square() {
        return Err(Error::Shape("completion block must be square".into()));
    }
    check_unitary(v)?;
    let n = v.rows() + 1;
    let block = ComplexMatrix::from_fn(n, n, |i, j| match (i, j) {
        (0, 0) => Complex64::new(1.0, 0.0),
        (0, _) | (_, 0) => Complex64::new(0.0, 0.0),
        _ => v[(i - 1, j - 1)],
    });
    block.matmul(&unbiased_unitary(n))
}

fn check_unitary(u: &ComplexMatrix) -> Result<()> {
    let defect = u
        .matmul(&u.adjoint())?
        .sub(&ComplexMatrix::identity(u.rows()))?
        .max_abs();
    if defect > UNITARY_TOL * (u.rows() as f64).max(1.0) {
        return Err(Error::Validation(format!("matrix is not unitary: |UU† - I| = {defect:e}")));
    }
    Ok(())
}

/// Number of occupation patterns of `n` photons in `modes` modes.
pub fn pattern_count(n: usize, modes: usize) -> u128 {
    if modes == 0 {
        return if n == 0 { 1 } else { 0 };
    }
    // C(modes + n - 1, n)
    let mut acc: u128 = 1;
    for k in 1..=n as u128 {
        acc = acc * (modes as u128 + k - 1) / k;
    }
    acc
}

/// Exact photon-number distribution of output port 1 for single photons with internal factor `c`.
pub fn exact_output_distribution(c: &InternalFactor, config: &OracleConfig) -> Result<PhotonNumberDistribution> {
    let n = c.n();
    let d = c.d();
    let estimated = pattern_count(n, n * d);
    let cap = config.max_photons.min(HARD_MAX_PHOTONS);
    if n > cap || n * d > 255 || estimated > config.max_patterns {
        return Err(Error::Capacity {
            estimated_terms: estimated,
            limit: config.max_patterns,
        });
    }
    let u = match &config.unitary {
        Some(u) => {
            if u.rows() != n || u.cols() != n {
                return Err(Error::Shape(format!("interferometer must be {n}×{n}")));
            }
            check_unitary(u)?;
            let uniform = 1.0 / (n as f64).sqrt();
            if let Some(k) = (0..n).find(|&k| (u[(0, k)] - uniform).norm() > UNITARY_TOL) {
                return Err(Error::Validation(format!(
                    "interferometer first row is not uniform at column {k}"
                )));
            }
            u.clone()
        }
        None => unbiased_unitary(n),
    };

    let mut terms: Vec<(u64, Complex64)> = vec![(0, Complex64::new(1.0, 0.0))];
    for i in 0..n {
        let factor: Vec<(u8, Complex64)> = (0..n)
            .flat_map(|j| (0..d).map(move |uu| (j, uu)))
            .map(|(j, uu)| ((j * d + uu) as u8, u[(j, i)] * c.row(i)[uu].conj()))
            .filter(|(_, a)| *a != Complex64::new(0.0, 0.0))
            .collect();
        terms = multiply(&terms, &factor, i);
    }

    let mut probs = vec![0.0; n + 1];
    for &(pattern, amp) in &terms {
        let (in_port_one, weight) = readout(pattern, n, d);
        probs[in_port_one] += amp.norm_sqr() * weight;
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::Inconsistent(format!("expanded state has norm² {total}")));
    }
    Ok(PhotonNumberDistribution::new(probs, 0.0, Provenance::Oracle))
}

/// Multiplies the polynomial by one linear factor; `k` photons are already present.
///
/// Each worker owns the output patterns of one hash bucket and scans every
/// input term in order, so the summation order per pattern is fixed.
fn multiply(terms: &[(u64, Complex64)], factor: &[(u8, Complex64)], k: usize) -> Vec<(u64, Complex64)> {
    let buckets: Vec<Vec<(u64, Complex64)>> = (0..BUCKETS as u64)
        .into_par_iter()
        .map(|bucket| {
            let mut map: HashMap<u64, Complex64> = HashMap::new();
            for &(pattern, amp) in terms {
                for &(mode, coef) in factor {
                    let key = insert(pattern, k, mode);
                    if bucket_of(key) == bucket {
                        *map.entry(key).or_default() += amp * coef;
                    }
                }
            }
            let mut out: Vec<(u64, Complex64)> = map.into_iter().collect();
            out.sort_unstable_by_key(|t| t.0);
            out
        })
        .collect();
    let mut out: Vec<(u64, Complex64)> = buckets.into_iter().flatten().collect();
    out.par_sort_unstable_by_key(|t| t.0);
    out
}

fn bucket_of(key: u64) -> u64 {
    key.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> (64 - BUCKET_BITS)
}

/// Inserts `mode` into a sorted packed multiset of `k` bytes.
fn insert(pattern: u64, k: usize, mode: u8) -> u64 {
    let mut bytes = [0u8; 8];
    for (b, slot) in bytes.iter_mut().enumerate().take(k) {
        *slot = (pattern >> (8 * (k - 1 - b))) as u8;
    }
    let pos = bytes[..k].partition_point(|&b| b <= mode);
    bytes.copy_within(pos..k, pos + 1);
    bytes[pos] = mode;
    bytes[..=k].iter().fold(0u64, |acc, &b| (acc << 8) | b as u64)
}

/// Photons in spatial port 1 and `∏ occ!` for a pattern of `n` photons.
fn readout(pattern: u64, n: usize, d: usize) -> (usize, f64) {
    let mut in_port_one = 0;
    let mut weight = 1.0;
    let mut run = 0u32;
    let mut prev: Option<u8> = None;
    for b in 0..n {
        let mode = (pattern >> (8 * (n - 1 - b))) as u8;
        if (mode as usize) < d {
            in_port_one += 1;
        }
        if prev == Some(mode) {
            run += 1;
            weight *= run as f64;
        } else {
            run = 1;
        }
        prev = Some(mode);
    }
    (in_port_one, weight)
}

/// `C(n, m) (1/n)^m (1 - 1/n)^{n-m}`.
pub fn classical_binomial(n: usize, m: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("classical_binomial needs n >= 1".into()));
    }
    if m > n {
        return Err(Error::Domain(format!("m = {m} exceeds n = {n}")));
    }
    let ln_choose: f64 = (1..=m).map(|k| ((n - m + k) as f64 / k as f64).ln()).sum();
    let nf = n as f64;
    let stay = if n == m { 0.0 } else { (n - m) as f64 * (-1.0 / nf).ln_1p() };
    Ok((ln_choose - m as f64 * nf.ln() + stay).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TvDistance {
    /// `½ Σ_m |p_m - q_m|` over the computed supports.
    pub distance: f64,
    /// `½ (tail_p + tail_q)`: mass neither distribution accounts for.
    pub allowance: f64,
}

pub fn tv_distance(p: &PhotonNumberDistribution, q: &PhotonNumberDistribution) -> TvDistance {
    let len = p.len().max(q.len());
    let distance = 0.5 * (0..len).map(|m| (p.get(m) - q.get(m)).abs()).sum::<f64>();
    TvDistance {
        distance: distance.min(1.0),
        allowance: 0.5 * (p.tail_bound() + q.tail_bound()),
    }
}
