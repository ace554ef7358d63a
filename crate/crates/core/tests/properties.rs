//! Invariants over randomly generated inputs.

use permcat::combinatorics::{enumerate_symbolic_matrices, partitions};
use permcat::deligne::{all_diagrams, PartitionDiagram};
use permcat::kron::kronecker;
use permcat::schur::specialize_to_map;
use permcat::serialize::{morphism_from_json, morphism_to_json};
use permcat::suites::run_suite;
use permcat::{compose_interpolated, IVPoly, Morphism, ObjectLabel, Rational};
use proptest::prelude::*;

/// Polynomial in two variables from `(coefficient, e1, e2)` triples.
fn poly(terms: &[(i64, u32, u32)]) -> IVPoly {
    let (x, y) = (IVPoly::var(2, 0), IVPoly::var(2, 1));
    let mut p = IVPoly::zero(2);
    for &(c, a, b) in terms {
        let mono = &x.pow(a) * &y.pow(b);
        p = &p + &mono.scale(&Rational::from_integer(c.into()));
    }
    p
}

fn arb_poly() -> impl Strategy<Value = IVPoly> {
    prop::collection::vec((-6i64..=6, 0u32..3, 0u32..3), 0..5).prop_map(|t| poly(&t))
}

const LABELS: [&str; 4] = ["L1", "L1-1,1", "L1-2,2", "L1-2,1,1"];

fn label(i: usize) -> ObjectLabel {
    ObjectLabel::parse(1, LABELS[i]).unwrap()
}

/// Random morphism `label(a) → label(b)` with integer coefficients on the
/// basis elements of off-diagonal degree at most 2.
fn arb_morphism(a: usize, b: usize) -> impl Strategy<Value = Morphism> {
    let basis = enumerate_symbolic_matrices(&label(a), &label(b), 2).unwrap();
    let n = basis.len();
    prop::collection::vec((-3i64..=3, 0u32..2), n).prop_map(move |cs| {
        let terms = basis
            .iter()
            .zip(cs)
            .filter(|(_, (c, _))| *c != 0)
            .map(|(q, (c, e))| (q.clone(), IVPoly::var(1, 0).pow(e).scale(&Rational::from_integer(c.into()))));
        Morphism::from_terms(label(a), label(b), terms).unwrap()
    })
}

fn arb_chain() -> impl Strategy<Value = (Morphism, Morphism, Morphism)> {
    (0usize..3, 0usize..3, 0usize..3, 0usize..3)
        .prop_flat_map(|(a, b, c, d)| (arb_morphism(c, d), arb_morphism(b, c), arb_morphism(a, b)))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn polynomial_ring_laws(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert!((&p - &p).is_zero());
        prop_assert_eq!(&p * &IVPoly::one(2), p.clone());
    }

    #[test]
    fn evaluation_is_a_homomorphism(p in arb_poly(), q in arb_poly(), x in -20i64..20, y in -20i64..20) {
        let pt = [x, y];
        let (a, b) = (p.eval_int(&pt).unwrap(), q.eval_int(&pt).unwrap());
        prop_assert_eq!((&p + &q).eval_int(&pt).unwrap(), &a + &b);
        prop_assert_eq!((&p * &q).eval_int(&pt).unwrap(), &a * &b);
    }

    #[test]
    fn polynomial_text_round_trip(p in arb_poly()) {
        prop_assert_eq!(IVPoly::parse(&p.to_string(), 2).unwrap(), p);
    }

    #[test]
    fn morphism_json_round_trip(f in (0usize..4, 0usize..4).prop_flat_map(|(a, b)| arb_morphism(a, b))) {
        let text = morphism_to_json(&f);
        let back = morphism_from_json(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(morphism_to_json(&back), text);
    }

    #[test]
    fn composition_is_associative_and_unital((f, g, h) in arb_chain()) {
        let fg = compose_interpolated(&f, &g).unwrap();
        let gh = compose_interpolated(&g, &h).unwrap();
        prop_assert_eq!(compose_interpolated(&fg, &h).unwrap(), compose_interpolated(&f, &gh).unwrap());
        prop_assert_eq!(compose_interpolated(&Morphism::identity(f.codomain()), &f).unwrap(), f.clone());
        prop_assert_eq!(compose_interpolated(&f, &Morphism::identity(f.domain())).unwrap(), f);
    }

    #[test]
    fn specialization_commutes_with_composition(
        (f, g, _) in arb_chain(),
        d in 3i64..=5,
    ) {
        let fg = compose_interpolated(&f, &g).unwrap();
        let (Some(sf), Some(sg)) = (specialize_to_map(&f, &[d]).unwrap(), specialize_to_map(&g, &[d]).unwrap()) else {
            return Ok(());
        };
        let lhs = specialize_to_map(&fg, &[d]).unwrap().expect("endpoints specialize");
        prop_assert_eq!(lhs, sf.compose(&sg).unwrap());
    }

    #[test]
    fn diagram_text_round_trip(m in 0usize..3, n in 0usize..3, k in any::<prop::sample::Index>()) {
        let all = all_diagrams(m, n);
        let d = &all[k.index(all.len())];
        let back = PartitionDiagram::parse(&d.to_string()).unwrap();
        if m + n > 0 {
            prop_assert_eq!(&back, d);
        }
    }

    #[test]
    fn kronecker_is_symmetric(n in 1i64..=7, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(), k in any::<prop::sample::Index>()) {
        let ps: Vec<Vec<usize>> = partitions(n).into_iter().map(|c| c.parts().iter().map(|&x| x as usize).collect()).collect();
        let (a, b, c) = (&ps[i.index(ps.len())], &ps[j.index(ps.len())], &ps[k.index(ps.len())]);
        let v = kronecker(a, b, c).unwrap();
        prop_assert!(v >= 0);
        prop_assert_eq!(v, kronecker(b, a, c).unwrap());
        prop_assert_eq!(v, kronecker(c, a, b).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn suites_are_deterministic(seed in any::<u64>(), which in 0usize..2) {
        let name = ["chevalley", "oracle"][which];
        let a = run_suite(name, 4, seed).unwrap();
        let b = run_suite(name, 4, seed).unwrap();
        prop_assert!(a.pass);
        prop_assert_eq!(a, b);
    }
}
