//! The Weierstrass map `℘(x) = x^p - x` over `K = F_q((t))`, the Witt
//! polynomial `S`, and reduction of Artin-Schreier generators.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{FqElem, LaurentSeries};

/// Minimal ring interface shared by series, elements of `K(y)` and symbolic
/// elements of `K(x_1, x_2)`, so that `S(X_1, X_2)` has one implementation.
pub trait FpAlgebra: Clone {
    fn characteristic(&self) -> u32;
    fn zero_like(&self) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    /// Multiplication by the integer `k` read in `F_p`.
    fn times_int(&self, k: u32) -> Self;

    fn power(&self, n: u32) -> Self {
        let mut acc: Option<Self> = None;
        for _ in 0..n {
            acc = Some(match acc {
                None => self.clone(),
                Some(a) => a.times(self),
            });
        }
        acc.expect("power() needs a positive exponent")
    }
}

impl FpAlgebra for LaurentSeries {
    fn characteristic(&self) -> u32 {
        LaurentSeries::characteristic(self)
    }
    fn zero_like(&self) -> Self {
        LaurentSeries::exact_zero(self.field())
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn times_int(&self, k: u32) -> Self {
        self.scale(self.field().from_int(k as i64))
    }
}

/// `℘(a) = a^p - a`.
pub fn wp(a: &LaurentSeries) -> LaurentSeries {
    &a.frobenius() - a
}

fn binomial(n: u32, k: u32) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// `S(X_1, X_2) = sum_k c_k X_1^k X_2^(p-k)` for `1 <= k <= p-1`; returns the
/// pairs `(k, c_k)` with `c_k = -binom(p, k)/p mod p`.
pub fn witt_s_coefficients(p: u32) -> Vec<(u32, u32)> {
    (1..p)
        .map(|k| {
            let c = (binomial(p, k) / p as u64) % p as u64;
            (k, ((p as u64 - c) % p as u64) as u32)
        })
        .filter(|&(_, c)| c != 0)
        .collect()
}

/// Evaluates the Witt polynomial `S(a, b)`.
pub fn witt_s<T: FpAlgebra>(a: &T, b: &T) -> T {
    let p = a.characteristic();
    let mut acc = a.zero_like();
    for (k, c) in witt_s_coefficients(p) {
        let term = a.power(k).times(&b.power(p - k)).times_int(c);
        acc = acc.plus(&term);
    }
    acc
}

/// The group valuation `df_K`: the largest valuation in `κ + K^℘`, split into
/// the ramified, unramified and trivial regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum WpDefect {
    Finite(i64),
    Zero,
    Infinite,
}

impl WpDefect {
    pub fn finite(self) -> Option<i64> {
        match self {
            WpDefect::Finite(n) => Some(n),
            _ => None,
        }
    }

    /// Ordering key with `Zero` above every finite value and `Infinite` on top.
    fn rank(self) -> (u8, i64) {
        match self {
            WpDefect::Finite(n) => (0, n),
            WpDefect::Zero => (1, 0),
            WpDefect::Infinite => (2, 0),
        }
    }
}

impl PartialOrd for WpDefect {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for WpDefect {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rank().cmp(&other.rank())
    }
}

/// An Artin-Schreier generator together with its group valuation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ASGenerator {
    pub value: LaurentSeries,
    pub reduced: bool,
    pub df: WpDefect,
}

impl ASGenerator {
    /// The ramification break `-df`, if the generator is ramified.
    pub fn break_value(&self) -> Option<i64> {
        self.df.finite().map(|n| -n)
    }
}

/// Reduces `κ` modulo `K^℘` to a representative of maximal valuation.
///
/// Terms are processed from the lowest exponent up: `c t^(-pm)` is traded
/// for `c^(1/p) t^(-m)`, a solvable constant is dropped, and positive
/// exponents vanish since `M_K ⊆ K^℘`. When the input is known past the
/// constant term the result is exact.
pub fn reduce_k(kappa: &LaurentSeries) -> Result<ASGenerator> {
    let fld = kappa.field();
    let p = kappa.characteristic() as i64;
    let prec = kappa.prec();
    let known = |e: i64| prec.is_none_or(|n| e < n);

    let mut work: BTreeMap<i64, FqElem> = kappa.terms().collect();
    let mut kept = Vec::new();
    while let Some((e, c)) = work.pop_first() {
        if e > 0 {
            break;
        }
        if e == 0 {
            if fld.wp_solve(c).is_none() {
                kept.push((0, c));
            }
            break;
        }
        if e % p != 0 {
            kept.push((e, c));
            continue;
        }
        let d = fld.frobenius_inv(c);
        let target = e / p;
        if known(target) {
            let sum = fld.add(work.get(&target).copied().unwrap_or(FqElem::ZERO), d);
            if sum.is_zero() {
                work.remove(&target);
            } else {
                work.insert(target, sum);
            }
        }
    }

    let exact = prec.is_none_or(|n| n >= 1);
    let value = LaurentSeries::from_terms(fld, kept, if exact { None } else { prec });
    let df = match value.leading_term() {
        Some((e, _)) if e < 0 => WpDefect::Finite(e),
        _ if !exact => {
            return Err(Error::InsufficientPrecision(format!(
                "no term survives reduction below t^{}",
                prec.unwrap_or(0)
            )))
        }
        Some(_) => WpDefect::Zero,
        None => WpDefect::Infinite,
    };
    Ok(ASGenerator { value, reduced: true, df })
}

/// Outcome of [`break_of`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Break {
    Ramified(i64),
    Unramified,
    Trivial,
}

pub fn break_of(kappa: &LaurentSeries) -> Result<Break> {
    Ok(match reduce_k(kappa)?.df {
        WpDefect::Finite(n) => Break::Ramified(-n),
        WpDefect::Zero => Break::Unramified,
        WpDefect::Infinite => Break::Trivial,
    })
}

/// A pair of reduced generators with breaks `u_1 <= u_2`, prepared for
/// building a `C_p^2`-extension.
#[derive(Debug, Clone)]
pub struct PreparedPair {
    pub beta1: ASGenerator,
    pub beta2: ASGenerator,
    /// The inputs were exchanged to put the smaller break first.
    pub swapped: bool,
    /// Equal breaks with `F_p`-proportional leading terms forced a
    /// replacement `κ_2 ← κ_2 - aκ_1`.
    pub renormalized: bool,
}

impl PreparedPair {
    pub fn u1(&self) -> i64 {
        self.beta1.break_value().expect("prepared pairs are ramified")
    }

    pub fn u2(&self) -> i64 {
        self.beta2.break_value().expect("prepared pairs are ramified")
    }
}

fn check_independent(k1: &LaurentSeries, k2: &LaurentSeries) -> Result<Option<String>> {
    let fld = k1.field();
    let p = k1.characteristic();
    let mut combos = vec![(1, 0)];
    combos.extend((0..p).map(|a| (a, 1)));
    for (a, b) in combos {
        let comb = &k1.scale(fld.from_int(a as i64)) + &k2.scale(fld.from_int(b as i64));
        let df = reduce_k(&comb)?.df;
        if df.finite().is_none() {
            return Ok(Some(format!("{a}*kappa1 + {b}*kappa2 has df {df:?}")));
        }
    }
    Ok(None)
}

/// Whether every nontrivial `F_p`-combination of the two generators is ramified.
pub fn are_independent(k1: &LaurentSeries, k2: &LaurentSeries) -> Result<bool> {
    if k1.field() != k2.field() {
        return Err(Error::FieldMismatch);
    }
    Ok(check_independent(k1, k2)?.is_none())
}

/// Reduces both generators, checks independence and orders them by break.
/// With equal breaks and leading coefficients related by some `a ∈ F_p`,
/// `κ_2` is replaced by the reduction of `κ_2 - aκ_1` until the leading
/// coefficients are independent or the breaks separate.
pub fn independent_pair(k1: &LaurentSeries, k2: &LaurentSeries) -> Result<PreparedPair> {
    if k1.field() != k2.field() {
        return Err(Error::FieldMismatch);
    }
    if let Some(msg) = check_independent(k1, k2)? {
        return Err(Error::DependentGenerators(msg));
    }
    let fld = k1.field().clone();
    let mut a1 = reduce_k(k1)?;
    let mut a2 = reduce_k(k2)?;
    let mut swapped = false;
    let mut renormalized = false;
    loop {
        let (u1, u2) = (a1.break_value().unwrap(), a2.break_value().unwrap());
        if u1 > u2 {
            std::mem::swap(&mut a1, &mut a2);
            swapped = !swapped;
            continue;
        }
        if u1 < u2 {
            break;
        }
        let c1 = a1.value.leading_term().unwrap().1;
        let c2 = a2.value.leading_term().unwrap().1;
        let Some(a) = fld.prime_value(fld.div(c2, c1)) else { break };
        let diff = &a2.value - &a1.value.scale(fld.from_int(a as i64));
        a2 = reduce_k(&diff)?;
        renormalized = true;
    }
    Ok(PreparedPair { beta1: a1, beta2: a2, swapped, renormalized })
}
