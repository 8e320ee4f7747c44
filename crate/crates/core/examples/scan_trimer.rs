//! EP3 of the PT trimer and its splitting.
//!
//! The trimer determinant vanishes identically, so moving γ off the EP3 only
//! opens a square-root gap. A coupling δ between the outer sites makes
//! `det H = 2δ` and the generic cube-root splitting appears along δ.

use nhsim::classes::SimilarityClass;
use nhsim::ep::{certify_order, scan, splitting_exponent, Axis, ScanConfig};
use nhsim::family::{parse_family, FamilyTerm, MatrixFamily};
use nhsim::matrix::{ONE, ZERO};
use nhsim::spectral::ToleranceConfig;
use nhsim::ComplexMatrix;

fn main() -> nhsim::Result<()> {
    let tol = ToleranceConfig::default();
    let f = parse_family(include_bytes!("../data/trimer.json"))?;
    let cfg = ScanConfig::new(vec![Axis::new(0.0, 3.0, 101)?, Axis::fixed(1.0)]);
    let out = scan(&f, SimilarityClass::PseudoHermitian, &cfg)?;
    if let Some(note) = &out.note {
        println!("note: {note}");
    }
    let ep = out.certified().next().expect("EP3");
    let cert = certify_order(&f.evaluate(&ep.point)?, &tol)?;
    println!(
        "{} at gamma = {:.12}, blocks {:?}",
        cert.describe(),
        ep.point[0],
        cert.jordan.clusters[0].block_sizes
    );
    let fit = splitting_exponent(&f, &ep.point, &[1.0, 0.0], 12, &tol)?;
    println!("splitting along gamma: {:.4}", fit.exponent);

    let outer = ComplexMatrix::from_fn(3, |i, j| if i + j == 2 && i != j { ONE } else { ZERO });
    let mut terms = f
        .terms
        .iter()
        .map(|t| FamilyTerm {
            matrix: t.matrix.clone(),
            exponents: [t.exponents.clone(), vec![0]].concat(),
        })
        .collect::<Vec<_>>();
    terms.push(FamilyTerm {
        matrix: outer,
        exponents: vec![0, 0, 1],
    });
    let g = MatrixFamily::new(terms)?.with_names(&["gamma", "k", "delta"]);
    let at = [ep.point[0], 1.0, 0.0];
    let fit = splitting_exponent(&g, &at, &[0.0, 0.0, 1.0], 12, &tol)?;
    println!("splitting along delta: {:.4}", fit.exponent);
    Ok(())
}
