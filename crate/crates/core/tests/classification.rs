//! Decomposition and classification on random instances.

use proptest::prelude::*;
use ramify::artin_schreier::{reduce_k, WpDefect};
use ramify::classify::{
    classify, classify_prepared, lower_to_upper, prepare, upper_to_lower, AuxBreaks, GroupKind, SubgroupChoice,
};
use ramify::decomp::decompose;
use ramify::field::{GaloisField, LaurentSeries};
use ramify::sample::{random_pair, random_reduced};
use ramify::{Error, Rational64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIELDS: [(u32, u32); 5] = [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)];

fn field(i: usize) -> GaloisField {
    let (p, f) = FIELDS[i];
    GaloisField::of_order(p, f).unwrap()
}

fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

/// Lower numbering from scratch: `l_i = l_{i-1} + p^(i-1) (u_i - u_{i-1})`.
fn herbrand_lower(p: i64, upper: [Rational64; 3]) -> [Rational64; 3] {
    let mut out = [upper[0]; 3];
    out[1] = out[0] + r(p) * (upper[1] - upper[0]);
    out[2] = out[1] + r(p * p) * (upper[2] - upper[1]);
    out
}

fn neg_val(a: &LaurentSeries) -> Option<i64> {
    a.valuation().map(|v| -v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn decomposition_recomposes(i in 0..FIELDS.len(), seed in any::<u64>()) {
        let fld = field(i);
        let p = fld.characteristic() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = random_pair(&mut rng, &fld, 30);
        let (b1, b2) = (&pair.beta1.value, &pair.beta2.value);
        let d = decompose(b1, b2).unwrap();
        prop_assert_eq!(d.mu.len(), p);
        prop_assert!(d.mu[0].terms().all(|(e, _)| e == 0), "mu_0 = {} is not constant", d.mu[0]);

        // Sum of mu_i^p beta1^i rebuilt here, compared modulo the Weierstrass image.
        let mut sum = d.mu[0].pow(p as u32);
        for (k, m) in d.mu.iter().enumerate().skip(1) {
            sum = &sum + &(&m.pow(p as u32) * &b1.pow(k as u32));
        }
        prop_assert_eq!(reduce_k(&(b2 - &sum)).unwrap().df, WpDefect::Infinite);

        let last = &d.mu[p - 1];
        prop_assert_eq!(d.s, neg_val(&(&last.pow(p as u32) * &b1.pow(p as u32 - 1))));
        let minus_one = &LaurentSeries::one(&fld) + last;
        let is_minus_one = minus_one.valuation().is_none_or(|v| v > 0) && !last.is_zero();
        prop_assert_eq!(d.mu_last_is_minus_one, is_minus_one);
        if p == 2 {
            prop_assert_eq!(d.m, neg_val(last).map(|m| m.max(0)));
        }
    }

    #[test]
    fn classification_is_consistent(i in 0..FIELDS.len(), seed in any::<u64>(), with_kappa3 in any::<bool>()) {
        let fld = field(i);
        let p = fld.characteristic();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = random_pair(&mut rng, &fld, 20);
        let kappa3 = if with_kappa3 {
            let b = (1..60).filter(|b| b % p as i64 != 0).nth(rng.gen_range(0..30)).unwrap();
            random_reduced(&mut rng, &fld, b, 0.3)
        } else {
            LaurentSeries::exact_zero(&fld)
        };
        for g in GroupKind::ALL.into_iter().filter(|g| g.valid_for(p)) {
            for choice in SubgroupChoice::ALL {
                let res = match classify(g, &pair.beta1.value, &pair.beta2.value, &kappa3, choice) {
                    Ok(res) => res,
                    Err(Error::DegenerateTower(_)) => continue,
                    Err(e) => return Err(TestCaseError::fail(format!("{g:?} {choice:?}: {e}"))),
                };
                prop_assert_eq!((res.u1, res.u2), (pair.u1(), pair.u2()));
                prop_assert_eq!(res.ubar3, res.b_g);
                prop_assert!(r(res.u2) <= res.ubar3);
                let expected_u3 = match res.b3 {
                    Some(b) => res.ubar3.max(r(b)),
                    None => res.ubar3,
                };
                prop_assert_eq!(res.u3, expected_u3);
                let upper = res.sequence.upper;
                prop_assert_eq!(upper, [r(res.u1), r(res.u2), res.u3]);
                let lower = herbrand_lower(p as i64, upper);
                prop_assert_eq!(res.sequence.lower.map(r), lower);
                prop_assert!(res.sequence.lower.iter().all(|l| l % p as i64 != 0));
                prop_assert_eq!(res.hasse_arf_integral, res.u3.is_integer());
            }
        }
    }

    #[test]
    fn closed_forms_agree_with_the_oracle(i in 0..FIELDS.len(), seed in any::<u64>()) {
        let fld = field(i);
        let p = fld.characteristic();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = random_pair(&mut rng, &fld, 15);
        let zero = LaurentSeries::exact_zero(&fld);
        for g in GroupKind::ALL.into_iter().filter(|g| g.valid_for(p)) {
            let prep = prepare(g, &pair.beta1.value, &pair.beta2.value).unwrap();
            let closed = AuxBreaks::closed_form(&prep.decomposition, prep.q8.as_ref());
            let oracle = AuxBreaks::from_oracle(&prep.pair, &prep.decomposition, prep.q8.as_ref()).unwrap();
            for choice in SubgroupChoice::ALL {
                let a = classify_prepared(g, &prep, &closed, &zero, choice).unwrap();
                let b = classify_prepared(g, &prep, &oracle, &zero, choice).unwrap();
                prop_assert_eq!(a.ubar3, b.ubar3, "{:?} {:?}", g, choice);
            }
        }
    }

    #[test]
    fn lower_and_upper_numbering_round_trip(p in prop::sample::select(vec![2u32, 3, 5]), l1 in 1i64..30, d2 in 0i64..40, d3 in 0i64..200) {
        let pi = p as i64;
        let lower = [l1, l1 + d2, l1 + d2 + d3];
        prop_assume!(lower.iter().all(|l| l % pi != 0));
        let upper = lower_to_upper(p, lower);
        prop_assert_eq!(herbrand_lower(pi, upper).map(|x| x.to_integer()), lower);
        prop_assert_eq!(upper_to_lower(p, upper).unwrap(), lower);
    }
}

#[test]
fn nonintegral_upper_breaks_occur() {
    // The modular group over F_3 with u1 = 1, u2 = 4 lands on 13/3.
    let f3 = GaloisField::of_order(3, 1).unwrap();
    let one = f3.from_int(1);
    let b1 = LaurentSeries::monomial(&f3, one, -1);
    let b2 = LaurentSeries::monomial(&f3, one, -4);
    let zero = LaurentSeries::exact_zero(&f3);
    let res = classify(GroupKind::Mod, &b1, &b2, &zero, SubgroupChoice::Sigma1pSigma2).unwrap();
    assert_eq!(res.u3, Rational64::new(13, 3));
    assert_eq!(herbrand_lower(3, res.sequence.upper).map(|x| x.to_integer()), res.sequence.lower);
    assert!(!res.hasse_arf_integral);
}

#[test]
fn groups_check_the_characteristic() {
    let f3 = GaloisField::of_order(3, 1).unwrap();
    let one = f3.from_int(1);
    let b1 = LaurentSeries::monomial(&f3, one, -1);
    let b2 = LaurentSeries::monomial(&f3, one, -2);
    let zero = LaurentSeries::exact_zero(&f3);
    for g in [GroupKind::Q8, GroupKind::D8] {
        assert!(matches!(
            classify(g, &b1, &b2, &zero, SubgroupChoice::default()),
            Err(Error::WrongCharacteristic { .. })
        ));
    }
    assert!(classify(GroupKind::Heis, &b1, &b2, &zero, SubgroupChoice::default()).is_ok());
}
