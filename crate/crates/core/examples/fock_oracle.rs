//! Exact finite-`n` statistics of port 1: Hong–Ou–Mandel bunching, the
//! classical binomial, and the distance to the Gaussian limit.

use bosonclt::{
    classical_binomial, exact_output_distribution, pnd_recursive, tv_distance, validate_gram, ComplexMatrix,
    InternalFactor, OracleConfig, Truncation, DEFAULT_RANK_TOL,
};

fn main() -> bosonclt::Result<()> {
    let config = OracleConfig::default();

    let hom = exact_output_distribution(&InternalFactor::indistinguishable(2), &config)?;
    println!("two identical photons: {:?}", hom.probs());

    let s = validate_gram(&ComplexMatrix::identity(3))?;
    let c = bosonclt::factor_gram(&s, DEFAULT_RANK_TOL)?;
    let p = exact_output_distribution(&c, &config)?;
    let binom: Vec<f64> = (0..=3).map(|m| classical_binomial(3, m)).collect::<Result<_, _>>()?;
    println!("three orthogonal photons: {:?}\nbinomial:                 {binom:?}", p.probs());

    let geometric = pnd_recursive(&[1.0], 1.0, &Truncation::default())?;
    for n in 2..=7 {
        let exact = exact_output_distribution(&InternalFactor::indistinguishable(n), &config)?;
        println!("n = {n}: TV to geometric = {:.4}", tv_distance(&exact, &geometric).distance);
    }
    Ok(())
}
