//! Reduced EP conditions per class and the family identity check.

use nhsim::classes::SimilarityClass;
use nhsim::ep::{class_identity_check, ConstraintSystem};
use nhsim::family::parse_family;

fn main() -> nhsim::Result<()> {
    for n in 2..=5 {
        for class in SimilarityClass::ALL {
            let s = ConstraintSystem::new(class, n);
            println!(
                "n = {n} {:<18} codim {}  {:?}",
                class.tag(),
                s.codimension,
                s.labels()
            );
        }
    }
    let dimer = parse_family(include_bytes!("../data/dimer.json"))?;
    for class in SimilarityClass::ALL {
        let r = class_identity_check(&dimer, class, 64, 1)?;
        println!(
            "dimer in {class}: {} (worst {:?} = {:.1e})",
            r.passed, r.worst_label, r.worst_value
        );
    }
    Ok(())
}
