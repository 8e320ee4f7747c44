//! Seeded random class members: reproducibility and spectral symmetry.

use nhsim::classes::{generate_random, GenerateOptions, SimilarityClass};
use nhsim::spectral::{eigenvalues, normality_defect};

fn main() -> nhsim::Result<()> {
    let opts = GenerateOptions {
        non_normal: true,
        ..Default::default()
    };
    for class in SimilarityClass::ALL {
        let h = generate_random(class, 3, 2024, &opts)?;
        assert_eq!(h, generate_random(class, 3, 2024, &opts)?);
        let spectrum = eigenvalues(&h)?;
        println!("{class} (normality defect {:.3})", normality_defect(&h));
        for e in &spectrum.values {
            let image = class.spectral_map().apply(*e);
            println!("  {e:>32.6}  ->  {image:.6}");
        }
    }
    println!(
        "\nmatrix JSON: {}",
        generate_random(SimilarityClass::Chiral, 2, 1, &opts)?.to_json()
    );
    Ok(())
}
