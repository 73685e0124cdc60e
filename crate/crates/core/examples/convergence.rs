//! Hilbert–Schmidt distance between the exact port-1 state and its Gaussian
//! limit as `n` grows.

use bosonclt::{convergence_sweep, InputKind, InternalFactor, PlancherelOptions};

fn main() -> bosonclt::Result<()> {
    let table = convergence_sweep(
        |n| Ok(InternalFactor::indistinguishable(n)),
        InputKind::SinglePhoton,
        &[2, 4, 8, 16, 32, 64],
        &PlancherelOptions::default(),
    )?;
    println!("{:>4} {:>12} {:>10}", "n", "distance", "quad err");
    for row in &table.rows {
        println!("{:>4} {:>12.6e} {:>10.1e}", row.n, row.distance, row.error_estimate);
    }
    if let Some(slope) = table.slope {
        println!("log-log slope {slope:.3}");
    }
    Ok(())
}
