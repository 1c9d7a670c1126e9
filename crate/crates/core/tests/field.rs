//! `F_q` and Laurent series against schoolbook polynomial arithmetic.

use std::collections::BTreeMap;

use proptest::prelude::*;
use ramify::field::{parse_series, FieldSpec, FqElem, GaloisField, LaurentSeries};

const FIELDS: [(u32, u32); 6] = [(2, 1), (2, 3), (3, 1), (3, 2), (5, 2), (7, 1)];

fn field(i: usize) -> GaloisField {
    let (p, f) = FIELDS[i];
    GaloisField::of_order(p, f).unwrap()
}

/// Product of coordinate vectors reduced modulo the monic modulus.
fn poly_mul(spec: &FieldSpec, a: &[u32], b: &[u32]) -> Vec<u32> {
    let (p, f) = (spec.p, spec.f as usize);
    let mut prod = vec![0u32; 2 * f];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for d in (f..2 * f).rev() {
        let c = prod[d];
        if c != 0 {
            for (k, &m) in spec.modulus.iter().enumerate().take(f) {
                let idx = d - f + k;
                prod[idx] = (prod[idx] + (p - c) * m % p) % p;
            }
            prod[d] = 0;
        }
    }
    prod.truncate(f);
    prod
}

fn elem(fld: &GaloisField) -> impl Strategy<Value = FqElem> {
    let fld = fld.clone();
    (0..fld.order()).prop_map(move |i| fld.element(i).unwrap())
}

fn arb_field_and_elems() -> impl Strategy<Value = (GaloisField, FqElem, FqElem, FqElem)> {
    (0..FIELDS.len()).prop_flat_map(|i| {
        let fld = field(i);
        (Just(fld.clone()), elem(&fld), elem(&fld), elem(&fld))
    })
}

proptest! {
    #[test]
    fn fq_matches_polynomial_arithmetic((fld, a, b, _c) in arb_field_and_elems()) {
        let spec = fld.spec();
        let (ca, cb) = (fld.coords(a), fld.coords(b));
        let sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % spec.p).collect();
        prop_assert_eq!(fld.coords(fld.add(a, b)), sum);
        prop_assert_eq!(fld.coords(fld.mul(a, b)), poly_mul(spec, &ca, &cb));
    }

    #[test]
    fn fq_field_axioms((fld, a, b, c) in arb_field_and_elems()) {
        prop_assert_eq!(fld.mul(a, fld.add(b, c)), fld.add(fld.mul(a, b), fld.mul(a, c)));
        prop_assert_eq!(fld.mul(fld.mul(a, b), c), fld.mul(a, fld.mul(b, c)));
        prop_assert_eq!(fld.add(a, fld.neg(a)), FqElem::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(fld.mul(a, fld.inv(a)), fld.from_int(1));
        }
        // Frobenius is an additive bijection with the stated inverse.
        prop_assert_eq!(fld.frobenius(fld.add(a, b)), fld.add(fld.frobenius(a), fld.frobenius(b)));
        prop_assert_eq!(fld.frobenius(fld.frobenius_inv(a)), a);
        prop_assert_eq!(fld.pow(a, fld.order() as u64), a);
    }

    #[test]
    fn wp_solve_inverts_wp((fld, a, _b, _c) in arb_field_and_elems()) {
        let c = fld.wp(a);
        let x = fld.wp_solve(c).expect("wp(a) is in the image");
        prop_assert_eq!(fld.wp(x), c);
        // The image of x -> x^p - x has index p in F_q.
        let image = fld.elements().filter(|&e| fld.wp_solve(e).is_some()).count() as u32;
        prop_assert_eq!(image * fld.characteristic(), fld.order());
    }
}

fn arb_series(exact: bool) -> impl Strategy<Value = (usize, Vec<(i64, u32)>, Option<i64>)> {
    let prec = if exact { Just(None).boxed() } else { prop::option::of(-5i64..15).boxed() };
    (0..FIELDS.len(), prop::collection::vec((-15i64..12, 0u32..64), 0..8), prec)
}

fn build(fld: &GaloisField, terms: &[(i64, u32)], prec: Option<i64>) -> LaurentSeries {
    let terms = terms.iter().map(|&(e, c)| (e, fld.element(c % fld.order()).unwrap()));
    LaurentSeries::from_terms(fld, terms, prec)
}

/// Naive convolution on coefficient maps.
fn convolve(fld: &GaloisField, a: &LaurentSeries, b: &LaurentSeries) -> BTreeMap<i64, FqElem> {
    let mut out: BTreeMap<i64, FqElem> = BTreeMap::new();
    for (ea, ca) in a.terms() {
        for (eb, cb) in b.terms() {
            let slot = out.entry(ea + eb).or_insert(FqElem::ZERO);
            *slot = fld.add(*slot, fld.mul(ca, cb));
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

proptest! {
    #[test]
    fn exact_series_form_a_ring(
        (i, ta, _) in arb_series(true),
        tb in prop::collection::vec((-15i64..12, 0u32..64), 0..8),
        tc in prop::collection::vec((-15i64..12, 0u32..64), 0..8),
    ) {
        let fld = field(i);
        let (a, b, c) = (build(&fld, &ta, None), build(&fld, &tb, None), build(&fld, &tc, None));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        let product: BTreeMap<i64, FqElem> = (&a * &b).terms().collect();
        prop_assert_eq!(product, convolve(&fld, &a, &b));
    }

    #[test]
    fn truncated_products_keep_known_coefficients((i, ta, pa) in arb_series(false), (_, tb, pb) in arb_series(false)) {
        let fld = field(i);
        let (a, b) = (build(&fld, &ta, pa), build(&fld, &tb, pb));
        let prod = &a * &b;
        let exact = convolve(&fld, &a, &b);
        if let Some(n) = prod.prec() {
            // Every coefficient below the reported precision is the true one.
            for e in -40..n {
                prop_assert_eq!(prod.coeff(e), exact.get(&e).copied().unwrap_or(FqElem::ZERO));
            }
        } else {
            prop_assert!(a.is_exact() && b.is_exact() || a.is_zero() && a.is_exact() || b.is_zero() && b.is_exact());
        }
    }

    #[test]
    fn text_round_trip((i, ta, prec) in arb_series(false)) {
        let fld = field(i);
        let a = build(&fld, &ta, prec);
        let back = parse_series(&fld, &a.to_string(), None).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn frobenius_is_the_pth_power((i, ta, _) in arb_series(true)) {
        let fld = field(i);
        let a = build(&fld, &ta, None);
        prop_assert_eq!(a.frobenius(), a.pow(fld.characteristic()));
    }
}

#[test]
fn parsing_examples() {
    let f4 = GaloisField::of_order(2, 2).unwrap();
    let g = f4.g();
    let s = parse_series(&f4, "(g + 1)*t^-3 + g*t^-1 + O(t^2)", None).unwrap();
    assert_eq!(s.prec(), Some(2));
    assert_eq!(s.coeff(-3), f4.add(g, f4.from_int(1)));
    assert_eq!(s.coeff(-1), g);
    assert_eq!(s.num_terms(), 2);

    let f5 = GaloisField::of_order(5, 1).unwrap();
    let s = parse_series(&f5, "t^-2 - 2*t^-1 + 3", Some(4)).unwrap();
    assert_eq!(s.coeff(-1), f5.from_int(3));
    assert_eq!(s.prec(), Some(4));
    assert!(parse_series(&f5, "t^-2 +", None).is_err());
    assert!(parse_series(&f5, "g*t^-1", None).is_err(), "F_5 has no generator symbol");
}

#[test]
fn invalid_fields_are_rejected() {
    assert!(FieldSpec::prime(4).is_err());
    assert!(FieldSpec::new(2, 2, vec![1, 0, 1]).is_err());
    assert!(FieldSpec::new(2, 2, vec![1, 1, 1]).is_ok());
    assert!(FieldSpec::new(3, 2, vec![1, 0, 2]).is_err(), "not monic");
}
