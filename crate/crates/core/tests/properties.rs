use itertools::Itertools;
use nhsim::classes::{
    classify, detect_special_cases, generate_random, random_hermitian, random_unitary, spectral_condition,
    GenerateOptions, SimilarityClass, SpecialCase,
};
use nhsim::ep::ConstraintSystem;
use nhsim::family::{constraint_jacobian, FamilyTerm, MatrixFamily};
use nhsim::specht::{unitary_similarity_test, word_list, word_trace, Letter, Word};
use nhsim::spectral::{eigenvalues, jordan_decompose, match_multisets, power_traces, ToleranceConfig};
use nhsim::{ComplexMatrix, C64};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn class_strategy() -> impl Strategy<Value = SimilarityClass> {
    prop_oneof![
        Just(SimilarityClass::PseudoHermitian),
        Just(SimilarityClass::Chiral),
        Just(SimilarityClass::SelfSkewSimilar),
    ]
}

fn member(class: SimilarityClass, n: usize, seed: u64) -> ComplexMatrix {
    generate_random(class, n, seed, &GenerateOptions::default()).unwrap()
}

fn unitary(n: usize, seed: u64) -> ComplexMatrix {
    random_unitary(&mut ChaCha8Rng::seed_from_u64(seed), n)
}

fn conjugate(u: &ComplexMatrix, h: &ComplexMatrix) -> ComplexMatrix {
    &(u * h) * &u.adjoint()
}

fn word_strategy() -> impl Strategy<Value = Word> {
    prop::collection::vec(prop_oneof![Just(Letter::X), Just(Letter::Xdag)], 1..8)
        .prop_map(|l| Word::new(l).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn class_survives_unitary_conjugation(class in class_strategy(), n in 2usize..=5, seed: u64, useed: u64) {
        let h = conjugate(&unitary(n, useed), &member(class, n, seed));
        let c = classify(&h, &ToleranceConfig::default()).unwrap();
        prop_assert!(c.contains(class));
        prop_assert!(c.witness(class).unwrap().residual <= 1e-8);
    }

    #[test]
    fn jordan_reconstructs(class in class_strategy(), n in 1usize..=6, seed: u64) {
        let h = member(class, n, seed);
        let j = jordan_decompose(&h, &ToleranceConfig::default()).unwrap();
        prop_assert_eq!(j.blocks.iter().map(|b| b.size).sum::<usize>(), n);
        let q = &j.basis;
        let back = &(q * &j.jordan_matrix()) * &q.try_inverse().unwrap();
        prop_assert!(back.distance(&h) <= 1e-8 * h.frobenius_norm().max(1.0) * j.condition_number);
    }

    #[test]
    fn traces_are_eigenvalue_power_sums(class in class_strategy(), n in 1usize..=6, seed: u64) {
        let h = member(class, n, seed);
        let s = eigenvalues(&h).unwrap();
        let scale = h.frobenius_norm();
        for (k, t) in (1..=n as u32).zip(power_traces(&h, n as u32).unwrap()) {
            prop_assert!((t - s.power_sum(k)).norm() <= 1e-9 * scale.powi(k as i32));
        }
    }

    #[test]
    fn members_meet_their_spectral_condition(class in class_strategy(), n in 1usize..=6, seed: u64) {
        let h = member(class, n, seed);
        prop_assert!(spectral_condition(&h, class, &ToleranceConfig::default()).unwrap());
    }

    #[test]
    fn forced_components_vanish(class in class_strategy(), n in 2usize..=6, seed: u64, scale in -3.0f64..3.0) {
        let h = member(class, n, seed).scale_real(scale);
        let system = ConstraintSystem::new(class, n);
        for (c, v) in system.forced_values(&h).unwrap() {
            prop_assert!(v <= 1e-9, "{} = {v:e}", c.label);
        }
    }

    #[test]
    fn word_traces_are_cyclic(n in 1usize..=4, seed: u64, w in word_strategy(), k in 0usize..8) {
        let h = member(SimilarityClass::PseudoHermitian, n, seed);
        let (a, b) = (word_trace(&h, &w), word_trace(&h, &w.rotate(k)));
        prop_assert!((a - b).norm() <= 1e-12 * h.frobenius_norm().powi(w.len() as i32).max(1.0));
    }

    #[test]
    fn unitary_conjugates_pass_specht(n in 2usize..=3, seed: u64, useed: u64) {
        let a = member(SimilarityClass::Chiral, n, seed);
        prop_assert!(unitary_similarity_test(&a, &conjugate(&unitary(n, useed), &a), 1e-10).unwrap());
    }

    #[test]
    fn specht_words_are_unitary_invariants(n in 2usize..=3, seed: u64, useed: u64) {
        let a = member(SimilarityClass::SelfSkewSimilar, n, seed);
        let b = conjugate(&unitary(n, useed), &a);
        for w in word_list(n).unwrap() {
            let scale = a.frobenius_norm().powi(w.len() as i32);
            prop_assert!((word_trace(&a, &w) - word_trace(&b, &w)).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn matching_agrees_with_permutations(
        pts in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=5),
        perm_seed: u64,
        tol in 1e-3f64..0.5,
    ) {
        let a: Vec<C64> = pts.iter().map(|&(x, y)| C64::new(x, y)).collect();
        // b is a shuffled, jittered copy of a
        let mut b = a.clone();
        let n = b.len();
        b.rotate_left((perm_seed as usize) % n);
        for (i, z) in b.iter_mut().enumerate() {
            *z += C64::new(((perm_seed >> i) & 1) as f64 * 0.1, 0.0);
        }
        let brute = (0..n)
            .permutations(n)
            .any(|p| p.iter().enumerate().all(|(i, &j)| (a[i] - b[j]).norm() <= tol));
        prop_assert_eq!(match_multisets(&a, &b, tol).is_some(), brute);
    }

    #[test]
    fn family_sum_is_pointwise(n in 1usize..=4, s1: u64, s2: u64, x in -2.0f64..2.0, y in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(s1 ^ s2);
        let terms = |rng: &mut ChaCha8Rng| {
            vec![
                FamilyTerm { matrix: random_hermitian(rng, n), exponents: vec![1, 0] },
                FamilyTerm { matrix: random_hermitian(rng, n), exponents: vec![2, 1] },
            ]
        };
        let f = MatrixFamily::new(terms(&mut rng)).unwrap();
        let g = MatrixFamily::new(terms(&mut rng)).unwrap();
        let lhs = (&f + &g).evaluate(&[x, y]).unwrap();
        let rhs = &f.evaluate(&[x, y]).unwrap() + &g.evaluate(&[x, y]).unwrap();
        prop_assert!(lhs.distance(&rhs) <= 1e-12 * (1.0 + rhs.frobenius_norm()));
    }

    #[test]
    fn jacobian_of_polynomial(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let g = |p: &[f64]| Ok(vec![p[0] * p[0] * p[1], p[1].powi(3) - p[0]]);
        let j = constraint_jacobian(g, &[a, b], 1e-6).unwrap();
        let exact = [[2.0 * a * b, a * a], [-1.0, 3.0 * b * b]];
        for r in 0..2 {
            for c in 0..2 {
                prop_assert!((j[(r, c)] - exact[r][c]).abs() <= 1e-7);
            }
        }
    }

    #[test]
    fn hermitian_implies_normal(n in 1usize..=6, seed: u64) {
        let h = random_hermitian(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let r = detect_special_cases(&h, &ToleranceConfig::default());
        prop_assert!(r.has(SpecialCase::Hermitian) && r.has(SpecialCase::Normal));
        let ih = h.scale(C64::new(0.0, 1.0));
        let r = detect_special_cases(&ih, &ToleranceConfig::default());
        prop_assert!(r.has(SpecialCase::AntiHermitian) && r.has(SpecialCase::Normal));
        prop_assert!(!r.has(SpecialCase::Hermitian) || h.frobenius_norm() == 0.0);
    }

    #[test]
    fn generation_is_deterministic(class in class_strategy(), n in 1usize..=6, seed: u64) {
        prop_assert_eq!(member(class, n, seed), member(class, n, seed));
    }
}
