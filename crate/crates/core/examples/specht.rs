//! Unitary similarity by word traces.

use nhsim::classes::random_unitary;
use nhsim::specht::{compare_profiles, unitary_similarity_test, word_list, WordTraceProfile};
use nhsim::ComplexMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> nhsim::Result<()> {
    let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0, 0.0], &[0.0, 1.0, 3.0], &[0.0, 0.0, -2.0]])?;
    let u = random_unitary(&mut ChaCha8Rng::seed_from_u64(3), 3);
    let b = &(&u * &a) * &u.adjoint();
    let c = a.transpose();

    for entry in &WordTraceProfile::canonical(&a)?.entries {
        println!("tr {:<18} = {:.6}", entry.word.to_string(), entry.trace);
    }
    println!("A ~ U A U†: {}", unitary_similarity_test(&a, &b, 1e-10)?);
    let d = compare_profiles(&a, &c, &word_list(3)?)?;
    println!(
        "A ~ Aᵀ: {} (word {} differs by {:.3e})",
        unitary_similarity_test(&a, &c, 1e-10)?,
        d.word,
        d.difference
    );
    Ok(())
}
