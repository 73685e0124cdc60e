//! Gauss–Hermite and Gauss–Laguerre rules.
//!
//! Nodes are found by Newton iteration on the three-term recurrences and the
//! weights come from the derivative at each node, so even the far-tail
//! weights keep full relative precision.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

const NEWTON_EPS: f64 = 3e-15;
const NEWTON_MAX_ITER: usize = 100;

/// Rule for `∫ f(x) w(x) dx`.
#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// `n`-point rule for the weight `e^{-x²}` on the real line, nodes ascending.
pub fn gauss_hermite(n: usize) -> Arc<Rule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Rule>>>> = OnceLock::new();
    cached(&CACHE, n, compute_hermite)
}

/// `n`-point rule for the weight `e^{-t}` on `[0, ∞)`, nodes ascending.
pub fn gauss_laguerre(n: usize) -> Arc<Rule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Rule>>>> = OnceLock::new();
    cached(&CACHE, n, compute_laguerre)
}

fn cached(
    cache: &OnceLock<Mutex<HashMap<usize, Arc<Rule>>>>,
    n: usize,
    build: fn(usize) -> Rule,
) -> Arc<Rule> {
    let map = cache.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = map.lock().expect("quadrature cache poisoned");
    guard.entry(n).or_insert_with(|| Arc::new(build(n))).clone()
}

fn compute_hermite(n: usize) -> Rule {
    assert!(n > 0, "quadrature rule needs at least one node");
    // π^{-1/4}
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-0.166_67),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            // orthonormal Hermite recurrence
            let mut p1 = PIM4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= NEWTON_EPS * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[m - 1] = 0.0;
    }
    // ascending order
    x.reverse();
    w.reverse();
    Rule {
        nodes: x,
        weights: w,
    }
}

fn compute_laguerre(n: usize) -> Rule {
    assert!(n > 0, "quadrature rule needs at least one node");
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = 0.0;
    for i in 0..n {
        z = match i {
            0 => 3.0 / (1.0 + 2.4 * nf),
            1 => z + 15.0 / (1.0 + 2.5 * nf),
            _ => {
                let ai = (i - 1) as f64;
                z + (1.0 + 2.55 * ai) / (1.9 * ai) * (z - x[i - 2])
            }
        };
        let mut pp = 0.0;
        let mut p2 = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            let mut p1 = 1.0;
            p2 = 0.0;
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = ((2.0 * jf - 1.0 - z) * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = (nf * p1 - nf * p2) / z;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= NEWTON_EPS * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        w[i] = -1.0 / (pp * nf * p2);
    }
    Rule {
        nodes: x,
        weights: w,
    }
}

/// Laguerre polynomials `L_0(t) … L_m(t)`.
pub fn laguerre_all(m: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(m + 1);
    out.push(1.0);
    if m >= 1 {
        out.push(1.0 - t);
    }
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - t) * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    out
}
