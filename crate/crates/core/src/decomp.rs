//! Writing `β_2 ≡ μ_0^p + Σ_{i≥1} μ_i^p β_1^i (mod K^℘)` and reading off
//! the parameters `r, s, t, ε, e, ω, m` used by the break formulas.

use serde::Serialize;

use crate::artin_schreier::{reduce_k, wp};
use crate::cp_ext::{CpExtension, ExtElement};
use crate::error::{Error, Result};
use crate::field::{FqElem, GaloisField, LaurentSeries};

#[derive(Debug, Clone)]
pub struct DecompData {
    pub p: u32,
    pub u1: i64,
    pub u2: i64,
    /// `μ_0, ..., μ_{p-1}`; `μ_0` is a constant.
    pub mu: Vec<LaurentSeries>,
    /// `-v(Σ_{i=1}^{p-2} μ_i^p β_1^i)`, absent for an empty or zero sum.
    pub r: Option<i64>,
    /// `-v(μ_{p-1}^p β_1^{p-1})`, absent when `μ_{p-1} = 0`.
    pub s: Option<i64>,
    /// `-v(ε^p β_1^{p-1})` when `μ_{p-1} ∈ -1 + M_K` and `ε ≠ 0`.
    pub t: Option<i64>,
    /// For `p > 2`: `μ_{p-1} + 1` when `μ_{p-1} ∈ -1 + M_K`. For `p = 2` with
    /// `m = 0`: the tail `μ - ω`.
    pub epsilon: Option<LaurentSeries>,
    /// `v(ε)` for nonzero `ε`.
    pub e: Option<i64>,
    /// `p = 2`, `m = 0`: the constant term of `μ = μ_1`.
    pub omega: Option<FqElem>,
    /// `p = 2`: `-v(μ_1)`, so that `u_2 = u_1 + 2m`.
    pub m: Option<i64>,
    pub mu_last_is_minus_one: bool,
}

impl DecompData {
    /// `μ_0^p + Σ μ_i^p β_1^i`, which must agree with `β_2` modulo `K^℘`.
    pub fn recompose(&self, beta1: &LaurentSeries) -> LaurentSeries {
        let mut acc = self.mu[0].frobenius();
        let mut power = LaurentSeries::one(beta1.field());
        for mu in &self.mu[1..] {
            power = &power * beta1;
            acc = &acc + &(&mu.frobenius() * &power);
        }
        acc
    }
}

fn leading_break(beta: &LaurentSeries, p: u32) -> Result<(i64, FqElem)> {
    if !beta.is_exact() {
        return Err(Error::InsufficientPrecision(format!("decomposition needs exact reduced generators, got {beta}")));
    }
    let (v, c) = beta.leading_term().ok_or_else(|| Error::PreconditionViolated("zero generator".into()))?;
    if v >= 0 {
        return Err(Error::PreconditionViolated(format!("generator {beta} has no pole")));
    }
    if v % p as i64 == 0 {
        return Err(Error::NonCoprimeValuation { valuation: v, p });
    }
    Ok((-v, c))
}

fn neg_valuation(a: &LaurentSeries) -> Option<i64> {
    a.valuation().map(|v| -v)
}

/// Greedy split of `β_2` over the `K^p`-basis `1, β_1, ..., β_1^(p-1)`.
///
/// The lowest remaining term `c t^n` of the residual decides the step:
/// `n ≡ 0 mod p` (`n < 0`) is traded for `c^(1/p) t^(n/p)` modulo `K^℘`; a
/// constant is either absorbed into `K^℘` or becomes `μ_0^p`; otherwise the
/// unique `i` with `n ≡ -i u_1 (mod p)` receives `(c' t^m)` with
/// `pm - i u_1 = n`. Positive exponents lie in `M_K ⊆ K^℘` and end the loop.
pub fn decompose(beta1: &LaurentSeries, beta2: &LaurentSeries) -> Result<DecompData> {
    let fld = beta1.field().clone();
    if fld != *beta2.field() {
        return Err(Error::FieldMismatch);
    }
    let p = fld.characteristic();
    let pi = p as i64;
    let (u1, lc1) = leading_break(beta1, p)?;
    let (u2, _) = leading_break(beta2, p)?;
    if u1 > u2 {
        return Err(Error::PreconditionViolated(format!("need u1 <= u2, got u1 = {u1}, u2 = {u2}")));
    }

    let mut powers = vec![LaurentSeries::one(&fld)];
    for i in 1..p as usize {
        powers.push(&powers[i - 1] * beta1);
    }
    let minus_u1_inv = (1..pi).find(|x| (x * -u1).rem_euclid(pi) == 1).unwrap();

    let mut mu = vec![LaurentSeries::exact_zero(&fld); p as usize];
    let mut residual = beta2.clone();
    while let Some((n, c)) = residual.leading_term() {
        if n > 0 {
            break;
        }
        if n == 0 {
            if fld.wp_solve(c).is_none() {
                mu[0] = LaurentSeries::constant(&fld, fld.frobenius_inv(c));
            }
            residual = &residual - &LaurentSeries::constant(&fld, c);
            continue;
        }
        if n % pi == 0 {
            let d = fld.frobenius_inv(c);
            let step = &LaurentSeries::monomial(&fld, d, n / pi) - &LaurentSeries::monomial(&fld, c, n);
            residual = &residual + &step;
            continue;
        }
        let i = (n * minus_u1_inv).rem_euclid(pi) as usize;
        let m = (n + i as i64 * u1) / pi;
        let coeff = fld.frobenius_inv(fld.div(c, fld.pow(lc1, i as u64)));
        let piece = LaurentSeries::monomial(&fld, coeff, m);
        mu[i] = &mu[i] + &piece;
        residual = &residual - &(&piece.frobenius() * &powers[i]);
    }

    let middle =
        (1..p as usize - 1).fold(LaurentSeries::exact_zero(&fld), |acc, i| &acc + &(&mu[i].frobenius() * &powers[i]));
    let last = &mu[p as usize - 1];
    let r = neg_valuation(&middle);
    let s = neg_valuation(&(&last.frobenius() * &powers[p as usize - 1]));
    let minus_one = fld.neg(FqElem::ONE);
    let mu_last_is_minus_one = last.valuation() == Some(0) && last.coeff(0) == minus_one;

    let mut data = DecompData {
        p,
        u1,
        u2,
        mu: mu.clone(),
        r,
        s,
        t: None,
        epsilon: None,
        e: None,
        omega: None,
        m: None,
        mu_last_is_minus_one,
    };
    if p == 2 {
        let m = -last.valuation().expect("μ_1 cannot vanish for a ramified β_2");
        data.m = Some(m);
        if m == 0 {
            let omega = last.coeff(0);
            let eps = last - &LaurentSeries::constant(&fld, omega);
            data.omega = Some(omega);
            data.e = eps.valuation();
            data.epsilon = Some(eps);
        }
    }
    if mu_last_is_minus_one {
        let eps = last + &LaurentSeries::one(&fld);
        data.t = neg_valuation(&(&eps.frobenius() * &powers[p as usize - 1]));
        data.e = eps.valuation();
        data.epsilon = Some(eps);
    }
    Ok(data)
}

/// Whether `β_2` and the recomposition differ by an element of `K^℘`.
pub fn recomposition_holds(d: &DecompData, beta1: &LaurentSeries, beta2: &LaurentSeries) -> Result<bool> {
    let diff = beta2 - &d.recompose(beta1);
    Ok(reduce_k(&diff)?.df == crate::artin_schreier::WpDefect::Infinite)
}

/// A monomial `a x_1^i X^j` of `𝔰_2 ∈ M = L(X)`, `X = x_2 - μ x_1`.
#[derive(Debug, Clone)]
pub struct MTerm {
    pub coeff: LaurentSeries,
    pub x1_power: u8,
    pub x_power: u8,
}

/// The quaternion preparation: `𝔰 ≡ 𝔰_1 + 𝔰_2` with `𝔰_1 ∈ L = K(x_1)`.
#[derive(Debug, Clone)]
pub struct Q8Prep {
    pub decomposition: DecompData,
    pub mu: LaurentSeries,
    pub mu0: LaurentSeries,
    pub m: i64,
    pub omega: Option<FqElem>,
    pub omega_cubed_is_one: Option<bool>,
    pub e: Option<i64>,
    /// `ε` was dropped because `v(ε) >= u_1/2`.
    pub epsilon_truncated: bool,
    pub s1: ExtElement,
    pub s2: Vec<MTerm>,
    /// Break of `L(X)/L`, `u_1 + 4m`.
    pub b_x: i64,
    /// `v_L(𝔰_1)`, absent when `𝔰_1 = 0`.
    pub v_s1: Option<i64>,
    pub v_s2: i64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Q8Valuations {
    pub v_s1: Option<i64>,
    pub v_s2: i64,
}

/// `v_M(a x_1^i X^j) = 4 v(a) - 2 i u_1 - j b_X`; distinct monomials never tie.
pub fn v_m(term: &MTerm, u1: i64, b_x: i64) -> Option<i64> {
    term.coeff.valuation().map(|v| 4 * v - 2 * term.x1_power as i64 * u1 - term.x_power as i64 * b_x)
}

/// Builds `𝔰_1 ∈ K(x_1)` and `𝔰_2 ∈ M` from `κ_2 = μ^2 κ_1 + μ_0^2`.
pub fn q8_prepare(kappa1: &LaurentSeries, kappa2: &LaurentSeries) -> Result<Q8Prep> {
    let fld: &GaloisField = kappa1.field();
    let p = fld.characteristic();
    if p != 2 {
        return Err(Error::WrongCharacteristic { expected: "p = 2".into(), actual: p });
    }
    let d = decompose(kappa1, kappa2)?;
    let u1 = d.u1;
    let m = d.m.expect("set for p = 2");
    let mut mu = d.mu[1].clone();
    let mu0 = d.mu[0].clone();
    let mu0_sq = mu0.frobenius();
    let one = LaurentSeries::one(fld);
    let ext = CpExtension::new(kappa1)?;

    let mut epsilon_truncated = false;
    let mut e = d.e;
    let (coeff1, s2, b_x) = if m > 0 {
        let mu2 = mu.frobenius();
        let mu3 = &mu2 * &mu;
        let c1 = &(&(&(&one + &mu2) + &mu3) * kappa1) + &(&mu0_sq * &(&one + &mu));
        let b_x = u1 + 4 * m;
        let s2 = vec![MTerm { coeff: &(&mu2 * kappa1) + &mu0_sq, x1_power: 0, x_power: 1 }];
        (c1, s2, b_x)
    } else {
        if let Some(ev) = e {
            if 2 * ev >= u1 {
                mu = LaurentSeries::constant(fld, d.omega.unwrap());
                epsilon_truncated = true;
                e = None;
            }
        }
        let mu2 = mu.frobenius();
        let mu4 = mu2.frobenius();
        let c1 = &(&(&(&one + &mu2) + &mu4) * kappa1) + &(&mu0_sq * &(&(&one + &mu) + &mu2));
        let wp_mu = wp(&mu);
        let s2 = vec![
            MTerm { coeff: wp_mu.clone(), x1_power: 1, x_power: 1 },
            MTerm { coeff: wp_mu, x1_power: 0, x_power: 1 },
            MTerm { coeff: mu0_sq.clone(), x1_power: 0, x_power: 1 },
        ];
        (c1, s2, u1)
    };
    // The X-terms with equal (i, j) are merged so that valuations are read off exactly.
    let mut merged: Vec<MTerm> = Vec::new();
    for t in s2 {
        match merged.iter_mut().find(|x| x.x1_power == t.x1_power && x.x_power == t.x_power) {
            Some(x) => x.coeff = &x.coeff + &t.coeff,
            None => merged.push(t),
        }
    }
    merged.retain(|t| !t.coeff.is_zero());
    let v_s2 = merged
        .iter()
        .filter_map(|t| v_m(t, u1, b_x))
        .min()
        .ok_or_else(|| Error::DegenerateTower("s2 vanishes".into()))?;

    let s1 = ext.times_y_power(&coeff1, 1);
    let v_s1 = s1.valuation()?;
    let omega = d.omega;
    let omega_cubed_is_one = omega.map(|w| fld.pow(w, 3) == FqElem::ONE);
    Ok(Q8Prep {
        mu,
        mu0,
        m,
        omega,
        omega_cubed_is_one,
        e,
        epsilon_truncated,
        s1,
        s2: merged,
        b_x,
        v_s1,
        v_s2,
        decomposition: d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::parse_series;

    fn s(fld: &GaloisField, text: &str) -> LaurentSeries {
        parse_series(fld, text, None).unwrap()
    }

    #[test]
    fn single_power_examples() {
        let f3 = GaloisField::of_order(3, 1).unwrap();
        let b1 = s(&f3, "t^-1");
        let d = decompose(&b1, &s(&f3, "t^-5")).unwrap();
        assert_eq!(d.mu[2], s(&f3, "t^-1"));
        assert!(d.mu[1].is_zero() && d.mu[0].is_zero());
        assert_eq!((d.r, d.s), (None, Some(5)));

        let d = decompose(&b1, &s(&f3, "t^-4")).unwrap();
        assert_eq!(d.mu[1], s(&f3, "t^-1"));
        assert_eq!((d.r, d.s), (Some(4), None));

        let d = decompose(&b1, &s(&f3, "2*t^-2")).unwrap();
        assert_eq!(d.mu[2], s(&f3, "2"));
        assert_eq!(d.s, Some(2));
        assert!(d.mu_last_is_minus_one);
        assert_eq!((d.t, d.e), (None, None));
        assert!(d.epsilon.unwrap().is_zero());
    }

    #[test]
    fn recomposition_is_checked_modulo_wp() {
        let f5 = GaloisField::of_order(5, 1).unwrap();
        let b1 = s(&f5, "2*t^-3 + t^-1");
        let b2 = s(&f5, "t^-17 + 3*t^-11 + 4*t^-4 + 2");
        let d = decompose(&b1, &b2).unwrap();
        assert!(recomposition_holds(&d, &b1, &b2).unwrap());
        assert_eq!(d.u2, 17);
        assert_eq!(d.u2, d.r.max(d.s).unwrap());
    }

    #[test]
    fn rejects_bad_inputs() {
        let f3 = GaloisField::of_order(3, 1).unwrap();
        assert!(matches!(
            decompose(&s(&f3, "t^-3"), &s(&f3, "t^-4")),
            Err(Error::NonCoprimeValuation { valuation: -3, p: 3 })
        ));
        let inexact = parse_series(&f3, "t^-4", Some(2)).unwrap();
        assert!(matches!(decompose(&s(&f3, "t^-1"), &inexact), Err(Error::InsufficientPrecision(_))));
    }

    #[test]
    fn q8_two_breaks() {
        let f2 = GaloisField::of_order(2, 1).unwrap();
        let q = q8_prepare(&s(&f2, "t^-1"), &s(&f2, "t^-3")).unwrap();
        assert_eq!(q.m, 1);
        assert_eq!(q.mu, s(&f2, "t^-1"));
        assert_eq!((q.v_s1, q.v_s2), (Some(-9), -17));
    }

    #[test]
    fn q8_cube_root_of_unity_kills_s1() {
        let f4 = GaloisField::of_order(2, 2).unwrap();
        let q = q8_prepare(&s(&f4, "t^-1"), &s(&f4, "g^2*t^-1")).unwrap();
        assert_eq!(q.m, 0);
        assert_eq!(q.omega, Some(f4.g()));
        assert_eq!(q.omega_cubed_is_one, Some(true));
        assert_eq!((q.v_s1, q.v_s2), (None, -3));
    }

    #[test]
    fn q8_generic_unit_over_f16() {
        let f16 = GaloisField::of_order(2, 4).unwrap();
        // g has order 15, so g^3 != 1
        let k2 = &s(&f16, "t^-1").scale(f16.pow(f16.g(), 2));
        let q = q8_prepare(&s(&f16, "t^-1"), k2).unwrap();
        assert_eq!(q.omega_cubed_is_one, Some(false));
        assert_eq!((q.v_s1, q.v_s2), (Some(-3), -3));
    }

    #[test]
    fn q8_requires_characteristic_two() {
        let f3 = GaloisField::of_order(3, 1).unwrap();
        assert!(matches!(
            q8_prepare(&s(&f3, "t^-1"), &s(&f3, "t^-2")),
            Err(Error::WrongCharacteristic { actual: 3, .. })
        ));
    }
}
