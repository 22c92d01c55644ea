use std::sync::Arc;

use addlab::counting::{count_t, verify_telescoping, CountMethod, EquationSpec};
use addlab::dense_model::{build_dense_model, verify_model_properties, ModelMode};
use addlab::energy::{energy, set_energy, verify_lemma_e2, verify_lemma_es, verify_ra_large, verify_size_bound};
use addlab::functions::{convolve, fourier, inverse_fourier, mean_pow, sum_pow, Method};
use addlab::sets::{equation_free_greedy, greedy_kst_free, is_kst_free, random_subset, rep_diff, tuple_stats};
use addlab::spectral::{annihilator, bohr_set, span, spectrum, Rational};
use addlab::{Dfn, FieldCtx, GroupCtx, SetA};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn groups() -> Vec<Arc<GroupCtx>> {
    vec![
        Arc::new(GroupCtx::cyclic(24).unwrap()),
        Arc::new(GroupCtx::cyclic(31).unwrap()),
        Arc::new(GroupCtx::vector_space(FieldCtx::prime(3).unwrap(), 3).unwrap()),
        Arc::new(GroupCtx::vector_space(FieldCtx::builtin(3, 2).unwrap(), 2).unwrap()),
    ]
}

fn random_dfn(g: &Arc<GroupCtx>, r: &mut ChaCha8Rng, complex: bool) -> Dfn {
    if complex {
        let v = (0..g.order()).map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))).collect();
        Dfn::from_complex(g, v).unwrap()
    } else {
        Dfn::from_real(g, (0..g.order()).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap()
    }
}

fn close(a: Complex64, b: Complex64, scale: f64) -> bool {
    (a - b).norm() <= 1e-9 * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn inversion_and_parseval(gi in 0usize..4, seed in any::<u64>()) {
        let g = &groups()[gi];
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let h = random_dfn(g, &mut r, true);
        let hat = fourier(&h);
        let back = inverse_fourier(&hat);
        for x in 0..g.order() {
            prop_assert!(close(back.get(x), h.get(x), 1.0));
        }
        let lhs = sum_pow(&h, 2.0);
        prop_assert!((lhs - mean_pow(&hat, 2.0)).abs() <= 1e-9 * lhs);
    }

    #[test]
    fn convolution_theorem(gi in 0usize..4, seed in any::<u64>()) {
        let g = &groups()[gi];
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = (random_dfn(g, &mut r, true), random_dfn(g, &mut r, false));
        let fast = convolve(&a, &b, Method::Fast).unwrap();
        let direct = convolve(&a, &b, Method::Direct).unwrap();
        let (fa, fb, fc) = (fourier(&a), fourier(&b), fourier(&direct));
        let scale = g.order() as f64;
        for x in 0..g.order() {
            prop_assert!(close(fast.get(x), direct.get(x), scale));
            prop_assert!(close(fc.get(x), fa.get(x) * fb.get(x), scale * scale));
        }
    }

    #[test]
    fn energy_is_moment_of_representation(gi in 0usize..4, seed in any::<u64>(), s in 1u32..4) {
        let g = &groups()[gi];
        let a = random_subset(g, 0.3, seed).unwrap();
        let e = set_energy(&a, s).unwrap();
        let r = rep_diff(&a);
        let moment: f64 = r.values().iter().map(|v| v.re.powi(s as i32)).sum();
        prop_assert!((moment - e as f64).abs() <= 1e-9 * (e as f64).max(1.0));
        let fl = energy(&[a.indicator(), a.indicator().reflect()], s).unwrap();
        prop_assert!((fl - e as f64).abs() <= 1e-8 * (e as f64).max(1.0));
        let n = a.len() as i128;
        prop_assert!(e >= n * n);
    }

    #[test]
    fn counting_is_multilinear_and_translation_invariant(seed in any::<u64>()) {
        let g = Arc::new(GroupCtx::cyclic(18).unwrap());
        let eq: EquationSpec = "1,2,-3".parse().unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let hs: Vec<Dfn> = (0..3).map(|_| random_dfn(&g, &mut r, true)).collect();
        let extra = random_dfn(&g, &mut r, true);
        let (al, be) = (Complex64::new(r.gen(), r.gen()), Complex64::new(r.gen(), r.gen()));
        let t = |hs: &[Dfn]| count_t(&eq, hs, CountMethod::Fourier).unwrap().total;
        let base = t(&hs);
        let mut mixed = hs.clone();
        mixed[1] = hs[1].scale_complex(al).add(&extra.scale_complex(be)).unwrap();
        let mut swapped = hs.clone();
        swapped[1] = extra.clone();
        let want = al * base + be * t(&swapped);
        prop_assert!((t(&mixed) - want).norm() <= 1e-9 * want.norm().max(1.0));
        let c = r.gen_range(0..18);
        let shifted: Vec<Dfn> = hs.iter().map(|h| h.translate(c)).collect();
        prop_assert!((t(&shifted) - base).norm() <= 1e-9 * base.norm().max(1.0));
        let brute = count_t(&eq, &hs, CountMethod::Brute).unwrap().total;
        prop_assert!((brute - base).norm() <= 1e-9 * base.norm().max(1.0));
    }

    #[test]
    fn equation_free_sets_have_only_diagonal_solutions(seed in any::<u64>()) {
        let eq: EquationSpec = "1,1,-2".parse().unwrap();
        let g = Arc::new(GroupCtx::interval_model(40, 161).unwrap());
        let a = equation_free_greedy(&g, &eq, seed, None).unwrap();
        let hs = vec![a.indicator(); 3];
        for m in [CountMethod::Brute, CountMethod::Fourier] {
            let c = count_t(&eq, &hs, m).unwrap();
            prop_assert!((c.total.re - a.len() as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn annihilator_is_an_involution(seed in any::<u64>(), n in 1usize..5) {
        let g = Arc::new(GroupCtx::vector_space(FieldCtx::prime(3).unwrap(), n).unwrap());
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let vs: Vec<usize> = (0..r.gen_range(0..=n)).map(|_| r.gen_range(0..g.order())).collect();
        let v = span(&g, &vs).unwrap();
        let perp = annihilator(&v);
        prop_assert_eq!(v.dim() + perp.dim(), n);
        prop_assert_eq!(annihilator(&perp), v.clone());
        prop_assert_eq!(perp.elements().len(), perp.size());
    }

    #[test]
    fn spectrum_and_bohr_sets_are_monotone(seed in any::<u64>()) {
        let g = Arc::new(GroupCtx::cyclic(257).unwrap());
        let a = random_subset(&g, 0.05, seed).unwrap();
        prop_assume!(!a.is_empty());
        let grid = [Rational::new(1, 10), Rational::new(1, 5), Rational::new(1, 3), Rational::new(1, 2)];
        let specs: Vec<_> = grid.iter().map(|e| spectrum(&a, *e.numer() as f64 / *e.denom() as f64).unwrap()).collect();
        for w in specs.windows(2) {
            prop_assert!(w[1].frequencies.iter().all(|x| w[0].frequencies.contains(x)));
        }
        prop_assert!(specs.iter().all(|s| s.frequencies.contains(&0)));
        let bohrs: Vec<_> = grid.iter().zip(&specs).map(|(e, s)| bohr_set(s, *e, 100).unwrap()).collect();
        for w in bohrs.windows(2) {
            prop_assert!(w[0].elements.iter().all(|x| w[1].elements.contains(x)));
        }
        for b in &bohrs {
            prop_assert!(b.elements.contains(&0));
            prop_assert!(b.elements.iter().all(|&x| b.elements.contains(&g.neg(x))));
        }
    }

    #[test]
    fn freeness_is_max_shift_count_at_most_t_minus_two(seed in any::<u64>(), st in prop::sample::select(vec![(2usize, 2usize), (2, 3), (3, 3), (2, 4)])) {
        let g = Arc::new(GroupCtx::cyclic(29).unwrap());
        let a = random_subset(&g, 0.3, seed).unwrap();
        let stats = tuple_stats(&a, st.0, st.1);
        let sharp = stats.distinct_tuples == 0 || stats.max_r_distinct + 2 <= st.1 as u64;
        prop_assert_eq!(is_kst_free(&a, st.0, st.1).unwrap().is_free(), sharp);
    }

    #[test]
    fn telescoping_identity_holds(seed in any::<u64>(), eq in prop::sample::select(vec!["1,1,-2", "1,2,-1,-2", "1,1,1,-1,-2", "1,1,1,1,-2,-2"])) {
        let g = Arc::new(GroupCtx::cyclic(15).unwrap());
        let eq: EquationSpec = eq.parse().unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let f = Dfn::from_real(&g, (0..15).map(|_| r.gen_range(0.0..2.0)).collect()).unwrap();
        let big_f = Dfn::from_real(&g, (0..15).map(|_| r.gen_range(0.0..2.0)).collect()).unwrap();
        let rep = verify_telescoping(&eq, &f, &big_f).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep.failed_assertions());
    }

    #[test]
    fn freeness_is_hereditary(seed in any::<u64>()) {
        let g = Arc::new(GroupCtx::interval_model(60, 120).unwrap());
        let a = greedy_kst_free(&g, 2, 3, seed).unwrap();
        prop_assert!(is_kst_free(&a, 2, 4).unwrap().is_free());
        let sub = SetA::from_elements(&g, a.elements().iter().copied().step_by(2).collect()).unwrap();
        prop_assert!(is_kst_free(&sub, 2, 3).unwrap().is_free());
    }

    #[test]
    fn energy_lemmas_hold_on_greedy_sets(seed in any::<u64>(), st in prop::sample::select(vec![(2u32, 2u32), (2, 3), (3, 3)])) {
        let g = Arc::new(GroupCtx::interval_model(80, 160).unwrap());
        let a = greedy_kst_free(&g, st.0 as usize, st.1 as usize, seed).unwrap();
        for r in [
            verify_lemma_es(&a, st.0, st.1).unwrap(),
            verify_lemma_e2(&a, st.0).unwrap(),
            verify_ra_large(&a, st.0, st.1).unwrap(),
            verify_size_bound(&a, st.0, st.1).unwrap(),
        ] {
            prop_assert!(r.passed(), "{}: {:?}", r.lemma, r.failed_assertions());
        }
    }

    #[test]
    fn dense_models_are_nonnegative_with_exact_mass(seed in any::<u64>()) {
        let g = Arc::new(GroupCtx::vector_space(FieldCtx::prime(3).unwrap(), 4).unwrap());
        let a = greedy_kst_free(&g, 2, 3, seed).unwrap();
        let m = build_dense_model(&a, 2, 3, Rational::new(1, 3), ModelMode::FiniteField).unwrap();
        prop_assert!(m.f.values().iter().all(|v| v.re >= 0.0 && v.im == 0.0));
        prop_assert_eq!(m.smoothed.sum(), (a.len() * m.smoother.len()) as i128);
        let r = verify_model_properties(&m, &a, 2, 3).unwrap();
        prop_assert!(r.passed(), "{:?}", r.failed_assertions());
    }
}
