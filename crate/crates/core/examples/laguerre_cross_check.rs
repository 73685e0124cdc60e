//! Photon-number distribution straight from a single-mode characteristic
//! function by Gauss–Laguerre quadrature, checked against the Fock oracle.

use bosonclt::photonstats::LaguerreOptions;
use bosonclt::{exact_output_distribution, pnd_quadrature, FiniteOutput, InputKind, InternalFactor, OracleConfig};

fn main() -> bosonclt::Result<()> {
    let c = InternalFactor::indistinguishable(4);
    let chi = FiniteOutput::new(c.clone(), InputKind::SinglePhoton)?;
    let q = pnd_quadrature(&chi, 4, &LaguerreOptions::default())?;
    let exact = exact_output_distribution(&c, &OracleConfig::default())?;
    for m in 0..=4 {
        println!("m = {m}: quadrature {:.12}  oracle {:.12}", q.get(m), exact.get(m));
    }
    Ok(())
}
