//! Photon-number distributions of the limiting state: geometric and Poisson
//! extremes, a squeezed input, the generating function and the moments.

use bosonclt::photonstats::pnd_recursive_weighted;
use bosonclt::{
    build_asymptotic, gamma_of, generating_function, moments, pnd_general, pnd_recursive, Complex64, InputMoments,
    InternalFactor, Truncation,
};

fn head(p: &[f64], k: usize) -> Vec<String> {
    p.iter().take(k).map(|v| format!("{v:.5}")).collect()
}

fn main() -> bosonclt::Result<()> {
    let trunc = Truncation::default();

    let geometric = pnd_recursive(&[1.0], 1.0, &trunc)?;
    println!("indistinguishable: {:?} (tail ≤ {:.1e})", head(geometric.probs(), 5), geometric.tail_bound());

    let n = 1_000_000;
    let poisson = pnd_recursive_weighted(&[(1.0 / n as f64, n)], 1.0, &trunc)?;
    println!("distinguishable:   {:?}", head(poisson.probs(), 5));

    let m = moments(&[0.5, 0.3, 0.2], 2.0)?;
    println!("r = 2, Γ = diag(.5,.3,.2): mean {:.3}, variance {:.3}, purity {:.3}", m.mean, m.variance, m.purity);

    let c = InternalFactor::indistinguishable(3);
    let state = build_asymptotic(&gamma_of(&c)?, &c, InputMoments::squeezed_vacuum(Complex64::new(0.8, 0.0))?)?;
    let p = pnd_general(&state, &trunc)?;
    println!("squeezed vacuum:   {:?}", head(p.probs(), 7));
    for beta in [0.0, 0.5, 1.0] {
        let g = generating_function(&state, beta)?;
        println!("G({beta}) = {:.6}", g.value);
    }
    Ok(())
}
