//! Limiting Gaussian state of port 1: exponent matrix, Gibbs temperatures,
//! and the characteristic function at finite `n` against its limit.

use bosonclt::{
    build_asymptotic, char_fn_asymptotic, char_fn_finite, gamma_of, Complex64, InputKind, InputMoments,
    InterpolationModel, ModelSize, PhaseSpacePoint, DEFAULT_RANK_TOL,
};

fn main() -> bosonclt::Result<()> {
    let gram = InterpolationModel::new(0.6, ModelSize::Finite(4))?.gram()?;
    let c = bosonclt::factor_gram(&gram, DEFAULT_RANK_TOL)?;
    let gamma = gamma_of(&c)?;

    let state = build_asymptotic(&gamma, &c, InputMoments::single_photon())?;
    for mode in state.gibbs().unwrap_or_default() {
        println!("λ = {:.4}  β = {:.4}", mode.lambda, mode.beta);
    }

    let at = PhaseSpacePoint::new(vec![Complex64::new(0.4, 0.1); c.d()]);
    let finite = char_fn_finite(&c, InputKind::SinglePhoton, &at)?;
    let limit = char_fn_asymptotic(&state, &at)?;
    println!("χ_4(z) = {:.6}, χ_∞(z) = {:.6}", finite.re, limit.re);

    // squeezed inputs give a phase-sensitive exponent
    let squeezed = InputMoments::squeezed_vacuum(Complex64::new(0.5, 0.0))?;
    let state = build_asymptotic(&gamma, &c, squeezed)?;
    println!("γ eigenvalues (squeezed) = {:?}", state.exponent_spectrum());
    Ok(())
}
