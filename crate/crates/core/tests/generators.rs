//! Generator packages and the symbolic Galois action on `M = K(x_1, x_2)`.

use proptest::prelude::*;
use ramify::artin_schreier::reduce_k;
use ramify::classify::GroupKind;
use ramify::field::{GaloisField, LaurentSeries};
use ramify::genlab::{
    build_generators, commutator_shift, m_ring, pth_power_shift, verify_galois, verify_witt_identities,
    SymbolicMElement,
};
use ramify::sample::{random_pair, random_reduced, random_series};
use ramify::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FIELDS: [(u32, u32); 4] = [(2, 1), (2, 2), (3, 1), (5, 1)];

fn field(i: usize) -> GaloisField {
    let (p, f) = FIELDS[i];
    GaloisField::of_order(p, f).unwrap()
}

/// `(σ_1^p, σ_2^p)` read off the presentations: `1` where the power is the
/// central generator, `0` where it is trivial.
fn expected_powers(g: GroupKind) -> (bool, bool) {
    match g {
        GroupKind::Q8 => (true, true),
        GroupKind::D8 | GroupKind::Mod => (true, false),
        GroupKind::Heis => (false, false),
    }
}

fn random_element(rng: &mut ChaCha8Rng, one: &SymbolicMElement) -> SymbolicMElement {
    let fld = one.coeff(0, 0).field().clone();
    let p = fld.characteristic() as usize;
    let mut e = one.zero();
    for i in 0..p {
        for j in 0..p {
            if rng.gen_bool(0.4) {
                e.add_at(i, j, &random_series(rng, &fld, -4, 2, 0.4));
            }
        }
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn presentations_hold(i in 0..FIELDS.len(), seed in any::<u64>()) {
        let fld = field(i);
        let p = fld.characteristic();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = random_pair(&mut rng, &fld, 12);
        let b3 = (1..40).filter(|b| b % p as i64 != 0).nth(rng.gen_range(0..20)).unwrap();
        let k3 = random_reduced(&mut rng, &fld, b3, 0.3);
        for g in GroupKind::ALL.into_iter().filter(|g| g.valid_for(p)) {
            let gd = build_generators(g, &pair.beta1.value, &pair.beta2.value, &k3).unwrap();
            let check = verify_galois(&gd);
            prop_assert!(check.holds, "{:?}: {}", g, gd);
            let one = m_ring(&gd.kappa[0].value, &gd.kappa[1].value).unwrap();
            prop_assert_eq!(commutator_shift(&gd), one.clone());
            let (e1, e2) = expected_powers(g);
            let val = |b: bool| if b { one.clone() } else { one.zero() };
            prop_assert_eq!(pth_power_shift(&gd, 1), val(e1), "{:?}", g);
            prop_assert_eq!(pth_power_shift(&gd, 2), val(e2), "{:?}", g);
        }
    }

    #[test]
    fn m_is_a_commutative_ring_with_the_right_relations(i in 0..FIELDS.len(), seed in any::<u64>()) {
        let fld = field(i);
        let p = fld.characteristic();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pair = random_pair(&mut rng, &fld, 9);
        let (k1, k2) = (&pair.beta1.value, &pair.beta2.value);
        let one = m_ring(k1, k2).unwrap();
        prop_assert_eq!(one.x(1).wp(), one.constant(k1));
        prop_assert_eq!(one.x(2).wp(), one.constant(k2));

        let (a, b, c) = (random_element(&mut rng, &one), random_element(&mut rng, &one), random_element(&mut rng, &one));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        // The p-th power via repeated products matches the Frobenius shortcut.
        let mut power = a.clone();
        for _ in 1..p {
            power = &power * &a;
        }
        prop_assert_eq!(power, a.frobenius());

        // sigma_1 and sigma_2 are commuting ring automorphisms of order p.
        prop_assert_eq!(a.apply_sigma(1).apply_sigma(2), a.apply_sigma(2).apply_sigma(1));
        prop_assert_eq!((&a * &b).apply_sigma(1), &a.apply_sigma(1) * &b.apply_sigma(1));
        let mut cur = a.clone();
        for _ in 0..p {
            cur = cur.apply_sigma(2);
        }
        prop_assert_eq!(cur, a);
    }

    #[test]
    fn witt_identities(i in 0..FIELDS.len(), seed in any::<u64>()) {
        let fld = field(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = fld.characteristic() as i64;
        let b = (1..30).filter(|b| b % p != 0).nth(rng.gen_range(0..10)).unwrap();
        let kappa = reduce_k(&random_reduced(&mut rng, &fld, b, 0.5)).unwrap();
        prop_assert!(verify_witt_identities(&kappa));
    }
}

#[test]
fn wrong_characteristic_and_dependent_inputs_are_refused() {
    let f3 = GaloisField::of_order(3, 1).unwrap();
    let one = f3.from_int(1);
    let t = |e| LaurentSeries::monomial(&f3, one, e);
    let zero = LaurentSeries::exact_zero(&f3);
    assert!(matches!(build_generators(GroupKind::Q8, &t(-1), &t(-2), &zero), Err(Error::WrongCharacteristic { .. })));
    assert!(matches!(build_generators(GroupKind::Heis, &t(-1), &t(-3), &zero), Err(Error::DependentGenerators(_))));
}
