//! Gram matrix from internal states, its factorization `S = C C†` and the spectrum of `Γ`.

use bosonclt::{factor_gram, gamma_of, gram_from_states, Complex64, DEFAULT_RANK_TOL};

fn main() -> bosonclt::Result<()> {
    let s = 0.5f64.sqrt();
    // three photons: two polarized alike, one diagonal
    let states = vec![
        vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        vec![Complex64::new(s, 0.0), Complex64::new(0.0, s)],
    ];
    let gram = gram_from_states(&states)?;
    println!("S =\n{:?}", gram.matrix());

    let c = factor_gram(&gram, DEFAULT_RANK_TOL)?;
    println!("n = {}, internal modes d = {}", c.n(), c.d());
    let rebuilt = c.gram().sub(gram.matrix())?;
    println!("|CC† - S|max = {:.2e}", rebuilt.max_abs());

    let gamma = gamma_of(&c)?;
    println!("spectrum of Γ = {:?}", gamma.spectrum());
    println!("purity Tr Γ² = {:.6}", gamma.purity());
    Ok(())
}
