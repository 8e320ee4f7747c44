//! 2×2 class members carry both associated symmetries; 3×3 members need not.

use nhsim::classes::{generate_random, GenerateOptions, SimilarityClass};
use nhsim::specht::{check_similarity_implies_symmetry_2x2, fit_generator, n3_counterexample, SymmetryKind};
use nhsim::spectral::ToleranceConfig;

fn main() -> nhsim::Result<()> {
    let cfg = ToleranceConfig::default();
    let opts = GenerateOptions {
        non_normal: true,
        ..Default::default()
    };
    for class in SimilarityClass::ALL {
        let h = generate_random(class, 2, 5, &opts)?;
        let report = check_similarity_implies_symmetry_2x2(&h, class, &cfg)?;
        println!("2x2 {class}:");
        for c in &report.checks {
            println!(
                "  {:?} (H ~ {}): words match {}, generator found {} (property defect {:.2e})",
                c.kind, c.partner, c.words_match, c.fit.found, c.fit.property_defect
            );
        }
    }

    let h = generate_random(SimilarityClass::SelfSkewSimilar, 2, 5, &opts)?;
    let fit = fit_generator(&h, SymmetryKind::PseudoChiral);
    println!(
        "\npseudo-chiral fit on a 2x2 self-skew-similar matrix: UU* defect {:.4}",
        fit.property_defect
    );

    for class in SimilarityClass::ALL {
        let cx = n3_counterexample(class, 0)?;
        println!("\n3x3 {class} after {} draw(s):", cx.attempts);
        for p in &cx.comparisons {
            println!(
                "  vs {}: worst word {} differs by {:.3e} -> {}",
                p.partner,
                p.worst.word,
                p.worst.difference,
                if p.differs {
                    "not unitarily similar"
                } else {
                    "similar"
                }
            );
        }
    }
    Ok(())
}
