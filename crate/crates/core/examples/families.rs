//! Parameterized families: JSON round trip, sums and constraint Jacobians.

use nhsim::classes::SimilarityClass;
use nhsim::ep::ConstraintSystem;
use nhsim::family::{constraint_jacobian, parse_family};

fn main() -> nhsim::Result<()> {
    let trimer = parse_family(include_bytes!("../data/trimer.json"))?;
    println!("params {:?}, defaults {:?}", trimer.names, trimer.defaults);
    let again = parse_family(trimer.to_json().as_bytes())?;
    assert_eq!(again, trimer);

    let doubled = &trimer + &trimer;
    println!("H(1, 1) + H(1, 1) =\n{}", doubled.evaluate(&[1.0, 1.0])?);

    let system = ConstraintSystem::new(SimilarityClass::PseudoHermitian, 3);
    let g = |p: &[f64]| system.evaluate(&trimer.evaluate(p)?);
    let j = constraint_jacobian(g, &[2f64.sqrt(), 1.0], 1e-6)?;
    println!("d{:?}/d(gamma, k) at the EP3 =\n{j:.6}", system.labels());

    match parse_family(
        br#"{"dim": 2, "params": 1, "terms": [{"matrix": {"dim": 3, "entries": []}, "exponents": [1]}]}"#,
    ) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
