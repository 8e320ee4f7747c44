//! Classify a few small matrices and print their witnesses.

use nhsim::classes::{classify, detect_special_cases};
use nhsim::matrix::{pauli, I};
use nhsim::spectral::ToleranceConfig;
use nhsim::ComplexMatrix;

fn main() -> nhsim::Result<()> {
    let cfg = ToleranceConfig::default();
    let samples = [
        (
            "dimer at gamma = 1",
            &pauli::sigma_x() + &pauli::sigma_z().scale(I),
        ),
        (
            "upper triangular [[1,1],[0,2]]",
            ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 2.0]])?,
        ),
        (
            "off-diagonal [[0,1],[4,0]]",
            ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[4.0, 0.0]])?,
        ),
        (
            "diag(1, 2i)",
            ComplexMatrix::from_diagonal(&[1.0.into(), I * 2.0]),
        ),
    ];
    for (name, h) in samples {
        let c = classify(&h, &cfg)?;
        println!("{name}");
        println!("  special cases: {:?}", detect_special_cases(&h, &cfg).flags);
        for w in &c.witnesses {
            println!(
                "  {:<18} residual {:.1e}  min singular value {:.3}",
                w.class.tag(),
                w.residual,
                w.min_singular_value
            );
        }
        for (class, reason) in &c.spectral_only {
            println!("  {:<18} spectrum fits, no witness: {reason}", class.tag());
        }
        if c.witnesses.is_empty() && c.spectral_only.is_empty() {
            println!("  no class");
        }
    }
    Ok(())
}
