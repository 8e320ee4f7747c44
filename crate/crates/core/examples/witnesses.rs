//! Build η, Γ and S for random class members and factor H accordingly.

use nhsim::classes::{
    construct_eta, construct_gamma, construct_skew_witness, factor, generate_random, GenerateOptions,
    SimilarityClass,
};
use nhsim::spectral::ToleranceConfig;

fn main() -> nhsim::Result<()> {
    let cfg = ToleranceConfig::default();
    let opts = GenerateOptions::default();
    for class in SimilarityClass::ALL {
        let h = generate_random(class, 4, 11, &opts)?;
        let w = match class {
            SimilarityClass::PseudoHermitian => construct_eta(&h, &cfg)?,
            SimilarityClass::Chiral => construct_gamma(&h, &cfg)?,
            SimilarityClass::SelfSkewSimilar => construct_skew_witness(&h, &cfg)?,
        };
        println!(
            "{}: residual {:.1e}, hermiticity defect {:.1e}",
            class, w.residual, w.hermiticity_defect
        );
        println!("witness =\n{}", w.transform);
        let (t, rest) = factor(&h, class, &cfg)?;
        let rebuilt = match class {
            SimilarityClass::PseudoHermitian => &t * &rest,
            SimilarityClass::Chiral => (&t * &rest).scale(nhsim::matrix::I),
            SimilarityClass::SelfSkewSimilar => rest.clone(),
        };
        println!(
            "factorization error {:.1e}\n",
            rebuilt.distance(&h) / h.frobenius_norm()
        );
    }
    Ok(())
}
