use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sumprod::cayley::{is_normal, random_generators, spectrum, CayleyDigraph, NormalityMode, SpectrumMethod};
use sumprod::charsums::{gauss_sum, kloosterman, weil_sums};
use sumprod::experiments::{
    distance_set, image_set, productset, random_poly, sumset, theorem2_check, PointSetSpec, SetSpec,
};
use sumprod::mixing::mixing_check;
use sumprod::{BiPoly, Elem, LinearForm, RingCtx, UniPoly};

fn field() -> impl Strategy<Value = RingCtx> {
    prop_oneof![
        Just((2u32, 1u32)),
        Just((5, 1)),
        Just((7, 1)),
        Just((11, 1)),
        Just((2, 3)),
        Just((3, 2)),
        Just((5, 2)),
    ]
    .prop_map(|(p, r)| RingCtx::field(p, r).unwrap())
}

fn ring() -> impl Strategy<Value = RingCtx> {
    prop_oneof![field(), (2u32..16).prop_map(|m| RingCtx::modular(m).unwrap())]
}

fn elem(ctx: &RingCtx, code: u32) -> Elem {
    Elem(code % ctx.order())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(ctx in ring(), a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let (a, b, c) = (elem(&ctx, a), elem(&ctx, b), elem(&ctx, c));
        prop_assert_eq!(ctx.add(a, b), ctx.add(b, a));
        prop_assert_eq!(ctx.mul(a, ctx.add(b, c)), ctx.add(ctx.mul(a, b), ctx.mul(a, c)));
        prop_assert_eq!(ctx.mul(ctx.mul(a, b), c), ctx.mul(a, ctx.mul(b, c)));
        prop_assert_eq!(ctx.add(a, ctx.neg(a)), Elem::ZERO);
        if ctx.is_unit(a) {
            prop_assert_eq!(ctx.mul(a, ctx.inv(a).unwrap()), ctx.one());
        } else {
            prop_assert!(ctx.inv(a).is_err());
        }
    }

    #[test]
    fn characters_are_homomorphisms(ctx in ring(), xi in any::<(u32, u32)>(), x in any::<(u32, u32)>(), y in any::<(u32, u32)>()) {
        let p = |v: (u32, u32)| (elem(&ctx, v.0), elem(&ctx, v.1));
        let (xi, x, y) = (p(xi), p(x), p(y));
        let sum = (ctx.add(x.0, y.0), ctx.add(x.1, y.1));
        let lhs = ctx.character(xi, sum);
        let rhs = ctx.character(xi, x) * ctx.character(xi, y);
        prop_assert!((lhs - rhs).norm() < 1e-9);
        prop_assert!((lhs.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trace_is_additive_and_frobenius_invariant(ctx in field(), a in any::<u32>(), b in any::<u32>()) {
        let (a, b) = (elem(&ctx, a), elem(&ctx, b));
        let t = |z| ctx.trace(z).unwrap();
        prop_assert_eq!(t(ctx.add(a, b)), ctx.add(t(a), t(b)));
        let frob = ctx.pow(a, ctx.characteristic() as u64);
        prop_assert_eq!(t(frob), t(a));
        prop_assert_eq!(t(a), ctx.frobenius_trace(a));
    }

    #[test]
    fn polynomial_display_round_trips(seed in any::<u64>(), k in 1u32..5, terms in 1usize..6) {
        let ctx = RingCtx::prime_field(11).unwrap();
        let p = random_poly(&ctx, k, terms, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(BiPoly::parse(&p.to_string(), &ctx).unwrap(), p);
    }

    #[test]
    fn evaluation_is_a_ring_map(seed in any::<u64>(), x in any::<(u32, u32)>()) {
        let ctx = RingCtx::prime_field(13).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_poly(&ctx, 3, 4, &mut rng);
        let q = random_poly(&ctx, 2, 3, &mut rng);
        let x = (elem(&ctx, x.0), elem(&ctx, x.1));
        prop_assert_eq!(p.mul(&q).eval(x), ctx.mul(p.eval(x), q.eval(x)));
        prop_assert_eq!(p.add(&q).eval(x), ctx.add(p.eval(x), q.eval(x)));
    }

    #[test]
    fn compositions_with_linear_forms_are_degenerate(
        coeffs in proptest::collection::vec(0u32..31, 2..5),
        alpha in 0u32..31,
        beta in 1u32..31,
    ) {
        let ctx = RingCtx::prime_field(31).unwrap();
        let mut c: Vec<Elem> = coeffs.into_iter().map(Elem).collect();
        let last = c.len() - 1;
        if c[last].is_zero() {
            c[last] = Elem::ONE;
        }
        let q = UniPoly::new(&ctx, c);
        let p = q.compose_linear(&LinearForm::new(Elem(alpha), Elem(beta)));
        match p.degeneracy_test().unwrap() {
            sumprod::Degeneracy::Degenerate { q, l } => prop_assert_eq!(q.compose_linear(&l), p),
            sumprod::Degeneracy::NonDegenerate => prop_assert!(false, "missed {}", p),
        }
    }

    #[test]
    fn bad_sets_are_small(seed in any::<u64>(), k in 2u32..5, terms in 2usize..6) {
        let ctx = RingCtx::prime_field(31).unwrap();
        let p = random_poly(&ctx, k, terms, &mut ChaCha8Rng::seed_from_u64(seed));
        if !p.is_degenerate().unwrap() {
            let bad = p.bad_set().unwrap();
            prop_assert!(bad.len() < k as usize);
            for a in bad {
                prop_assert!(p.sub_const(a).has_linear_factor().unwrap().is_some());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn spectral_methods_agree(ctx in ring(), size in 0usize..40, seed in any::<u64>()) {
        let gens = random_generators(&ctx, size, seed);
        let g = CayleyDigraph::build(&ctx, gens).unwrap();
        let d = spectrum(&g, SpectrumMethod::Direct).unwrap();
        let t = spectrum(&g, SpectrumMethod::Transform).unwrap();
        for (a, b) in d.values.iter().zip(&t.values) {
            prop_assert!((a - b).norm() < 1e-8);
        }
        prop_assert!((d.values[0].re - g.degree() as f64).abs() < 1e-9);
        prop_assert!(d.lambda <= g.degree() as f64 + 1e-9);
    }

    #[test]
    fn cayley_graphs_are_normal(ctx in ring(), size in 0usize..20, seed in any::<u64>()) {
        let g = CayleyDigraph::build(&ctx, random_generators(&ctx, size, seed)).unwrap();
        let mode = NormalityMode::Sampled { count: 200, seed };
        prop_assert!(is_normal(&g, mode).unwrap().normal);
    }

    #[test]
    fn mixing_holds_for_random_sets(seed in any::<u64>(), a in 1u32..11, mask_b in any::<u128>(), mask_c in any::<u128>()) {
        let ctx = RingCtx::prime_field(11).unwrap();
        let p = random_poly(&ctx, 3, 4, &mut ChaCha8Rng::seed_from_u64(seed));
        let g = CayleyDigraph::from_level(&p, Elem(a)).unwrap();
        let lambda = spectrum(&g, SpectrumMethod::Transform).unwrap().lambda;
        let pick = |mask: u128| (0..g.n()).filter(|&i| mask >> (i % 128) & 1 == 1).collect::<Vec<_>>();
        let r = mixing_check(&g, lambda, &pick(mask_b), &pick(mask_c));
        prop_assert!(r.holds && r.second_moment_holds);
    }

    #[test]
    fn weil_sums_match_spectrum(seed in any::<u64>(), k in 2u32..5) {
        let ctx = RingCtx::prime_field(13).unwrap();
        let p = random_poly(&ctx, k, 4, &mut ChaCha8Rng::seed_from_u64(seed));
        if p.has_linear_factor().unwrap().is_none() {
            let g = CayleyDigraph::from_level(&p, Elem::ZERO).unwrap();
            let s = spectrum(&g, SpectrumMethod::Direct).unwrap();
            let ys: Vec<_> = (1..g.n()).map(|i| g.point(i)).collect();
            for (y, w) in ys.iter().zip(weil_sums(&p, &ys).unwrap()) {
                prop_assert!((s.at(&g, *y) - num_complex::Complex64::new(w.re, w.im)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn gauss_sums_have_magnitude_sqrt_m(m in (0u32..200).prop_map(|k| 2 * k + 1), z in any::<u32>()) {
        let z = (0..m).map(|i| (z.wrapping_add(i)) % m).find(|&z| sumprod::algebra::gcd(z as u64, m as u64) == 1).unwrap_or(0);
        let s = gauss_sum(m, z).unwrap();
        prop_assert!((s.magnitude - (m as f64).sqrt()).abs() < 1e-9 * (m as f64).sqrt().max(1.0));
    }

    #[test]
    fn kloosterman_sums_are_real_and_symmetric(m in (0u32..60).prop_map(|k| 2 * k + 1), a in any::<u32>(), b in any::<u32>()) {
        let k1 = kloosterman(m, a % m, b % m).unwrap();
        let k2 = kloosterman(m, b % m, a % m).unwrap();
        prop_assert!(k1.im.abs() < 1e-9);
        prop_assert!((k1.re - k2.re).abs() < 1e-9);
    }

    #[test]
    fn product_of_coordinates_gives_the_product_set(seed in any::<u64>(), n in 1usize..40) {
        let ctx = RingCtx::prime_field(101).unwrap();
        let a = SetSpec::Random { n, seed }.generate(&ctx).unwrap();
        let p = BiPoly::parse("x1*x2", &ctx).unwrap();
        prop_assert_eq!(image_set(&p, &a).unwrap(), productset(&ctx, &a).unwrap());
    }

    #[test]
    fn short_intervals_have_minimal_doubling(n in 1usize..50) {
        let ctx = RingCtx::prime_field(101).unwrap();
        let a = SetSpec::Interval { n }.generate(&ctx).unwrap();
        prop_assert_eq!(sumset(&ctx, &a).unwrap().len(), 2 * n - 1);
    }

    #[test]
    fn distance_sets_are_translation_invariant(seed in any::<u64>(), n in 2usize..30, t in any::<(u32, u32)>()) {
        let ctx = RingCtx::prime_field(13).unwrap();
        let p = BiPoly::parse("x1^2 + 3*x2^2 + x1*x2", &ctx).unwrap();
        let pts = PointSetSpec::Random { n, seed }.generate(&ctx).unwrap();
        let t = (elem(&ctx, t.0), elem(&ctx, t.1));
        let moved: Vec<_> = pts.iter().map(|&(x, y)| (ctx.add(x, t.0), ctx.add(y, t.1))).collect();
        prop_assert_eq!(distance_set(&p, &pts).unwrap(), distance_set(&p, &moved).unwrap());
    }

    #[test]
    fn nonempty_checks_have_positive_delta(m in 2u32..200, n in 1usize..50, seed in any::<u64>()) {
        let ctx = RingCtx::modular(m).unwrap();
        let a = SetSpec::Random { n: n.min(m as usize), seed }.generate(&ctx).unwrap();
        let c = theorem2_check(&ctx, &a).unwrap();
        prop_assert!(c.lhs > 0 && c.empirical_delta > 0.0);
    }
}
