//! Reads a Gram-matrix JSON document (the CLI input format) and prints the
//! limiting distribution for single photons.

use bosonclt::distinguishability::Distinguishability;
use bosonclt::{factor_gram, gamma_of, pnd_recursive, GramInput, Truncation, DEFAULT_RANK_TOL};

fn main() -> bosonclt::Result<()> {
    let bytes = match std::env::args().nth(1) {
        Some(path) => std::fs::read(path)?,
        None => include_bytes!("data/three_photons.json").to_vec(),
    };
    let Distinguishability::Gram(gram) = GramInput::from_json(&bytes)?.resolve()? else {
        println!("interpolation input: see the interpolation_model example");
        return Ok(());
    };
    let c = factor_gram(&gram, DEFAULT_RANK_TOL)?;
    let gamma = gamma_of(&c)?;
    println!("λ = {:?}", gamma.spectrum());
    let p = pnd_recursive(gamma.spectrum(), 1.0, &Truncation::default())?;
    for (m, v) in p.probs().iter().enumerate().take(6) {
        println!("p[{m}] = {v:.6}");
    }
    Ok(())
}
