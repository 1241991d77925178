use proptest::prelude::*;
use rigidity_core::exact::{rat, Poly, QuadExt, RatFn};
use rigidity_core::scalar_algebra::{GlobalParams, UPoly};

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-6i64..=6, 0..4).prop_map(|c| Poly::from_ints(&c))
}

fn ratfn() -> impl Strategy<Value = RatFn> {
    (poly(), poly()).prop_filter_map("nonzero denominator", |(n, d)| RatFn::from_polys(n, d).ok())
}

fn upoly() -> impl Strategy<Value = UPoly> {
    prop::collection::vec((0u32..5, 0u32..3, -5i64..=5), 0..5)
        .prop_map(|ts| ts.into_iter().fold(UPoly::zero(), |acc, (i, j, c)| &acc + &UPoly::monomial(i, j, RatFn::int(c))))
}

proptest! {
    #[test]
    fn evaluation_is_a_ring_homomorphism(a in ratfn(), b in ratfn(), t in -20i64..20) {
        let (Ok(x), Ok(y)) = (a.eval_int(t), b.eval_int(t)) else { return Ok(()) };
        prop_assert_eq!((&a + &b).eval_int(t).unwrap(), &x + &y);
        prop_assert_eq!((&a * &b).eval_int(t).unwrap(), &x * &y);
        prop_assert_eq!((&a - &b).eval_int(t).unwrap(), &x - &y);
    }

    #[test]
    fn field_laws(a in ratfn(), b in ratfn(), c in ratfn()) {
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), RatFn::one());
        }
    }

    #[test]
    fn canonical_string_round_trips(a in ratfn()) {
        let back: RatFn = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn quadratic_extension_inverse(a in -9i64..9, b in -9i64..9, d in 2i64..30) {
        // perfect squares would make the extension degenerate
        prop_assume!(![4, 9, 16, 25].contains(&d));
        let x = QuadExt::new(RatFn::int(a), RatFn::int(b), RatFn::int(d));
        prop_assume!(!x.is_zero());
        let one = &x * &x.inv().unwrap();
        prop_assert_eq!(one, QuadExt::from_base(RatFn::one(), &RatFn::int(d)));
        prop_assert_eq!((&x * &x.conj()).a, x.norm());
    }

    #[test]
    fn laplacian_is_linear_and_integrates_to_zero(p in upoly(), q in upoly(), k in -4i64..4) {
        let g = GlobalParams::symbolic();
        let lhs = (&p + &q.scale(&RatFn::int(k))).laplacian(&g);
        let rhs = &p.laplacian(&g) + &q.laplacian(&g).scale(&RatFn::int(k));
        prop_assert_eq!(lhs, rhs);
        prop_assert!(p.laplacian(&g).integrate(&g).is_zero());
    }

    #[test]
    fn integration_commutes_with_specialization(p in upoly(), m in 2i64..9) {
        let g = GlobalParams::symbolic();
        let gm = GlobalParams::concrete(m).unwrap();
        let sym = p.integrate(&g);
        let conc = p.integrate(&gm);
        for k in 0..6 {
            prop_assert_eq!(RatFn::constant(sym.coefficient(k).eval_int(m).unwrap()), conc.coefficient(k));
        }
    }
}

#[test]
fn rational_constants() {
    assert_eq!(RatFn::constant(rat(6, 4)).to_string(), "3/2");
}
