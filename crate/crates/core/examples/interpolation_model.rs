//! The interpolation model `S = (1-x) I + x J`: closed-form limit against
//! the finite-`n` recursion.

use bosonclt::photonstats::pnd_interpolation_truncated;
use bosonclt::{interpolation_spectrum, pnd_recursive, InterpolationModel, ModelSize, Truncation};

fn main() -> bosonclt::Result<()> {
    let trunc = Truncation::default();
    for x in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let limit = pnd_interpolation_truncated(x, &trunc)?;
        let model = InterpolationModel::new(x, ModelSize::Finite(50))?;
        let spectrum = interpolation_spectrum(&model).values().unwrap_or_default();
        let finite = pnd_recursive(&spectrum, 1.0, &trunc)?;
        println!(
            "x = {x:.2}: p0 = {:.6} (n=50: {:.6}), variance {:.4}, terms {}",
            limit.get(0),
            finite.get(0),
            limit.variance(),
            limit.len()
        );
    }
    Ok(())
}
