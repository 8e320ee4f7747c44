//! Tolerance-gated Jordan structure at and near exceptional points.

use nhsim::matrix::{I, ONE, ZERO};
use nhsim::spectral::{jordan_decompose, ToleranceConfig};
use nhsim::ComplexMatrix;

fn trimer(gamma: f64) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![I * gamma, ONE, ZERO],
        vec![ONE, ZERO, ONE],
        vec![ZERO, ONE, -I * gamma],
    ])
    .unwrap()
}

fn main() -> nhsim::Result<()> {
    let cfg = ToleranceConfig::default();
    for gamma in [1.0, 1.4, 2f64.sqrt()] {
        let j = jordan_decompose(&trimer(gamma), &cfg)?;
        let blocks: Vec<String> = j
            .blocks
            .iter()
            .map(|b| format!("{:.3} (size {})", b.eigenvalue, b.size))
            .collect();
        println!(
            "gamma = {gamma:.6}: {}; residual {:.1e}, cond {:.1}",
            blocks.join(", "),
            j.residual,
            j.condition_number
        );
    }
    // derogatory: two blocks at the same eigenvalue
    let h = ComplexMatrix::from_real_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.0]])?;
    let j = jordan_decompose(&h, &cfg)?;
    println!("derogatory: block sizes {:?}", j.clusters[0].block_sizes);
    println!("J =\n{}", j.jordan_matrix());
    Ok(())
}
