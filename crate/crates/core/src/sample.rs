//! Random instances for property tests, self-tests and sweeps.
//!
//! Every sampler takes an explicit `Rng`, so seeded callers get
//! reproducible instances.

use rand::Rng;

use crate::artin_schreier::{independent_pair, reduce_k, PreparedPair};
use crate::cp_ext::{CpExtension, ExtElement};
use crate::decomp::decompose;
use crate::error::Result;
use crate::field::{FqElem, GaloisField, LaurentSeries};

pub fn random_coeff<R: Rng + ?Sized>(rng: &mut R, fld: &GaloisField) -> FqElem {
    fld.element(rng.gen_range(0..fld.order())).expect("index below the field order")
}

pub fn random_unit<R: Rng + ?Sized>(rng: &mut R, fld: &GaloisField) -> FqElem {
    fld.element(rng.gen_range(1..fld.order())).expect("index below the field order")
}

/// A break in `lo..=hi` coprime to `p`. Panics if the range has none.
pub fn random_break<R: Rng + ?Sized>(rng: &mut R, p: u32, lo: i64, hi: i64) -> i64 {
    let choices: Vec<i64> = (lo.max(1)..=hi).filter(|b| b % p as i64 != 0).collect();
    choices[rng.gen_range(0..choices.len())]
}

/// An exact series with terms in `lo..=hi`, each present with probability
/// `density`.
pub fn random_series<R: Rng + ?Sized>(rng: &mut R, fld: &GaloisField, lo: i64, hi: i64, density: f64) -> LaurentSeries {
    let mut terms = Vec::new();
    for e in lo..=hi {
        if rng.gen_bool(density) {
            terms.push((e, random_unit(rng, fld)));
        }
    }
    LaurentSeries::from_terms(fld, terms, None)
}

/// A reduced generator with break `b`: a pole of order `b`, further terms
/// only at exponents prime to `p`, and possibly a constant outside `℘(F_q)`.
pub fn random_reduced<R: Rng + ?Sized>(rng: &mut R, fld: &GaloisField, b: i64, density: f64) -> LaurentSeries {
    let p = fld.characteristic() as i64;
    let mut terms = vec![(-b, random_unit(rng, fld))];
    for e in (-b + 1)..0 {
        if e % p != 0 && rng.gen_bool(density) {
            terms.push((e, random_unit(rng, fld)));
        }
    }
    let c = random_coeff(rng, fld);
    if fld.wp_solve(c).is_none() {
        terms.push((0, c));
    }
    LaurentSeries::from_terms(fld, terms, None)
}

/// A pair of reduced generators with `u_1 <= u_2 <= max_break`, ordered and
/// normalized as the classification expects.
pub fn random_pair<R: Rng + ?Sized>(rng: &mut R, fld: &GaloisField, max_break: i64) -> PreparedPair {
    let p = fld.characteristic();
    loop {
        let u2 = random_break(rng, p, 1, max_break);
        let u1 = random_break(rng, p, 1, u2);
        let density = rng.gen_range(0.2..0.8);
        let b1 = random_reduced(rng, fld, u1, density);
        let b2 = random_reduced(rng, fld, u2, density);
        if let Ok(pair) = independent_pair(&b1, &b2) {
            return pair;
        }
    }
}

/// For `p > 2`, a pair whose decomposition has `μ_{p-1} ∈ -1 + M_K` with a
/// nonzero tail `ε` that is visible in `β_2`. Returns `None` if `p = 2` or no
/// such pair turned up within `attempts` tries.
pub fn engineered_minus_one<R: Rng + ?Sized>(
    rng: &mut R,
    fld: &GaloisField,
    max_break: i64,
    attempts: usize,
) -> Result<Option<PreparedPair>> {
    let p = fld.characteristic();
    let pi = p as i64;
    if p == 2 {
        return Ok(None);
    }
    // ε needs p·v(ε) < (p-1)u_1 to leave a trace, so u_1 >= 2.
    let top = (max_break / (pi - 1)).max(2);
    for _ in 0..attempts {
        let u1 = random_break(rng, p, 2, top);
        let beta1 = random_reduced(rng, fld, u1, 0.5);
        let e_max = ((pi - 1) * u1 - 1) / pi;
        if e_max < 1 {
            continue;
        }
        let mut mu = vec![LaurentSeries::exact_zero(fld); p as usize];
        mu[0] = LaurentSeries::constant(fld, random_coeff(rng, fld));
        for (i, slot) in mu.iter_mut().enumerate().take(p as usize - 1).skip(1) {
            if rng.gen_bool(0.5) {
                let v_max = (i as i64 * u1 - 1).div_euclid(pi);
                let v = rng.gen_range(v_max.min(-1)..=v_max);
                *slot = LaurentSeries::monomial(fld, random_unit(rng, fld), v);
            }
        }
        let eps = random_series(rng, fld, 1, e_max, 0.5);
        if eps.is_zero() {
            continue;
        }
        mu[p as usize - 1] = &eps - &LaurentSeries::one(fld);

        let mut acc = mu[0].frobenius();
        let mut power = LaurentSeries::one(fld);
        for m in &mu[1..] {
            power = &power * &beta1;
            acc = &acc + &(&m.frobenius() * &power);
        }
        let beta2 = reduce_k(&acc)?.value;
        let Ok(pair) = independent_pair(&beta1, &beta2) else { continue };
        if pair.swapped || pair.u2() > max_break {
            continue;
        }
        let d = decompose(&pair.beta1.value, &pair.beta2.value)?;
        if d.mu_last_is_minus_one && d.t.is_some() {
            return Ok(Some(pair));
        }
    }
    Ok(None)
}

/// A random exact element of `L = K(y)` with coefficients in `t^lo..t^hi`.
pub fn random_ext_element<R: Rng + ?Sized>(
    rng: &mut R,
    ext: &CpExtension,
    lo: i64,
    hi: i64,
    density: f64,
) -> ExtElement {
    let coeffs = (0..ext.p()).map(|_| random_series(rng, ext.field(), lo, hi, density)).collect();
    ext.element(coeffs)
}
