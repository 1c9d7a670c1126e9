//! Arithmetic in a ramified Artin-Schreier extension `L = K(y)`,
//! `y^p - y = β`, and the brute-force computation of
//! `df_{L/K}(ℓ) = max { v_L(x) : x ∈ ℓ + ℘(L) + K }`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::Rational64;
use serde::Serialize;

use crate::artin_schreier::{reduce_k, FpAlgebra, WpDefect};
use crate::error::{Error, Result};
use crate::field::{FqElem, GaloisField, LaurentSeries};

struct Inner {
    field: GaloisField,
    p: u32,
    beta: LaurentSeries,
    b: i64,
    /// `binom(i, j) β^(i-j)` as term lists, indexed `[i][j]` for `j <= i < p`.
    expansion: Vec<Vec<Vec<(i64, FqElem)>>>,
}

/// `L = K(y)` with `℘(y) = β`, `β` reduced with break `b`.
#[derive(Clone)]
pub struct CpExtension(Arc<Inner>);

impl PartialEq for CpExtension {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.field == other.0.field && self.0.beta == other.0.beta)
    }
}

impl Eq for CpExtension {}

impl fmt::Debug for CpExtension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K(y), y^{} - y = {}", self.0.p, self.0.beta)
    }
}

impl CpExtension {
    /// Builds the extension after reducing `β`; fails unless `K(y)/K` is
    /// ramified.
    pub fn new(beta: &LaurentSeries) -> Result<Self> {
        let red = reduce_k(beta)?;
        let b = red.break_value().ok_or_else(|| {
            Error::PreconditionViolated(format!("β = {beta} does not define a ramified extension ({:?})", red.df))
        })?;
        let field = beta.field().clone();
        let p = field.characteristic();
        let beta = red.value;
        let mut powers = vec![LaurentSeries::one(&field)];
        for k in 1..p as usize {
            powers.push(&powers[k - 1] * &beta);
        }
        let expansion = (0..p as usize)
            .map(|i| {
                (0..=i)
                    .map(|j| {
                        let c = field.from_int(binom(i, j) as i64);
                        powers[i - j].scale(c).terms().collect()
                    })
                    .collect()
            })
            .collect();
        Ok(CpExtension(Arc::new(Inner { field, p, beta, b, expansion })))
    }

    pub fn field(&self) -> &GaloisField {
        &self.0.field
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }

    pub fn beta(&self) -> &LaurentSeries {
        &self.0.beta
    }

    /// The ramification break `b = -v_K(β)`.
    pub fn b(&self) -> i64 {
        self.0.b
    }

    pub fn element(&self, coeffs: Vec<LaurentSeries>) -> ExtElement {
        assert_eq!(coeffs.len(), self.0.p as usize, "an element of K(y) has p coefficients");
        ExtElement { ext: self.clone(), coeffs }
    }

    pub fn zero(&self) -> ExtElement {
        self.from_k(&LaurentSeries::exact_zero(&self.0.field))
    }

    pub fn from_k(&self, a: &LaurentSeries) -> ExtElement {
        let mut coeffs = vec![LaurentSeries::exact_zero(&self.0.field); self.0.p as usize];
        coeffs[0] = a.clone();
        self.element(coeffs)
    }

    /// `a y^i` for `a ∈ K`, `0 <= i < p`.
    pub fn times_y_power(&self, a: &LaurentSeries, i: usize) -> ExtElement {
        let mut coeffs = vec![LaurentSeries::exact_zero(&self.0.field); self.0.p as usize];
        coeffs[i] = a.clone();
        self.element(coeffs)
    }

    pub fn y(&self) -> ExtElement {
        self.times_y_power(&LaurentSeries::one(&self.0.field), 1)
    }

    /// `v_L(c t^a y^i) = pa - ib`.
    pub fn level(&self, a: i64, i: usize) -> i64 {
        self.0.p as i64 * a - i as i64 * self.0.b
    }

    /// Inverse of [`level`](Self::level) on levels not divisible by `p`.
    pub fn monomial_at(&self, level: i64) -> (i64, usize) {
        let p = self.0.p as i64;
        let b_inv = mod_inverse(self.0.b.rem_euclid(p), p);
        let i = (-level * b_inv).rem_euclid(p);
        debug_assert!(i != 0, "level {level} is divisible by p");
        ((level + i * self.0.b) / p, i as usize)
    }

    /// The Hasse-Herbrand function `φ_{L/K}`.
    pub fn phi(&self, x: Rational64) -> Rational64 {
        hasse_herbrand_phi(self.0.b, self.0.p, x)
    }

    /// The inverse function `ψ_{L/K}`.
    pub fn psi(&self, x: Rational64) -> Rational64 {
        hasse_herbrand_psi(self.0.b, self.0.p, x)
    }
}

fn binom(n: usize, k: usize) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

fn mod_inverse(a: i64, p: i64) -> i64 {
    (1..p).find(|x| (a * x).rem_euclid(p) == 1).expect("unit modulo p")
}

/// `φ(x) = x` for `x <= b` and `b + (x - b)/p` beyond.
pub fn hasse_herbrand_phi(b: i64, p: u32, x: Rational64) -> Rational64 {
    let b = Rational64::from_integer(b);
    if x <= b {
        x
    } else {
        b + (x - b) / Rational64::from_integer(p as i64)
    }
}

pub fn hasse_herbrand_psi(b: i64, p: u32, x: Rational64) -> Rational64 {
    let b = Rational64::from_integer(b);
    if x <= b {
        x
    } else {
        b + (x - b) * Rational64::from_integer(p as i64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HerbrandDirection {
    Phi,
    Psi,
}

pub fn hasse_herbrand(ext: &CpExtension, x: Rational64, direction: HerbrandDirection) -> Rational64 {
    match direction {
        HerbrandDirection::Phi => ext.phi(x),
        HerbrandDirection::Psi => ext.psi(x),
    }
}

/// `Σ a_i y^i` with `a_i ∈ K`.
#[derive(Clone, PartialEq, Eq)]
pub struct ExtElement {
    ext: CpExtension,
    coeffs: Vec<LaurentSeries>,
}

impl fmt::Debug for ExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero() || !a.is_exact())
            .map(|(i, a)| format!("({a})*y^{i}"))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl ExtElement {
    pub fn extension(&self) -> &CpExtension {
        &self.ext
    }

    pub fn coeffs(&self) -> &[LaurentSeries] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &LaurentSeries {
        &self.coeffs[i]
    }

    /// The same element with its `y^0` coefficient removed.
    pub fn without_k_part(&self) -> ExtElement {
        let mut coeffs = self.coeffs.clone();
        coeffs[0] = LaurentSeries::exact_zero(self.ext.field());
        ExtElement { ext: self.ext.clone(), coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(LaurentSeries::is_zero)
    }

    /// Level below which every `y`-coefficient is known: `min_i (p·prec(a_i) - ib)`.
    pub fn precision_level(&self) -> Option<i64> {
        self.coeffs.iter().enumerate().filter_map(|(i, a)| a.prec().map(|n| self.ext.level(n, i))).min()
    }

    /// `v_L = min_i (p v_K(a_i) - ib)`; `None` for an exact zero.
    pub fn valuation(&self) -> Result<Option<i64>> {
        let known =
            self.coeffs.iter().enumerate().filter_map(|(i, a)| a.valuation().map(|v| self.ext.level(v, i))).min();
        match (known, self.precision_level()) {
            (Some(v), Some(n)) if v >= n => {
                Err(Error::InsufficientPrecision(format!("valuation of {self:?} not determined below level {n}")))
            }
            (None, Some(n)) => Err(Error::InsufficientPrecision(format!("element is zero up to level {n}"))),
            (v, _) => Ok(v),
        }
    }

    /// Multiplication by an element of `K`.
    pub fn scale_k(&self, a: &LaurentSeries) -> ExtElement {
        let coeffs = self.coeffs.iter().map(|c| c * a).collect();
        ExtElement { ext: self.ext.clone(), coeffs }
    }

    /// `℘(e) = e^p - e`, using `e^p = Σ a_i^p (y + β)^i`.
    pub fn wp(&self) -> ExtElement {
        let fld = self.ext.field();
        let p = self.ext.p() as usize;
        let mut out = vec![LaurentSeries::exact_zero(fld); p];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() && a.is_exact() {
                continue;
            }
            let ap = a.frobenius();
            for (j, slot) in out.iter_mut().enumerate().take(i + 1) {
                let bj = LaurentSeries::from_terms(fld, self.ext.0.expansion[i][j].iter().copied(), None);
                *slot = &*slot + &(&ap * &bj);
            }
        }
        &self.ext.element(out) - self
    }

    /// Coefficients of `y^1 .. y^(p-1)` indexed by level, for levels below `cap`.
    fn level_vector(&self, cap: i64) -> BTreeMap<i64, FqElem> {
        let mut out = BTreeMap::new();
        for (i, a) in self.coeffs.iter().enumerate().skip(1) {
            for (e, c) in a.terms() {
                let lvl = self.ext.level(e, i);
                if lvl < cap {
                    out.insert(lvl, c);
                }
            }
        }
        out
    }
}

impl Add for &ExtElement {
    type Output = ExtElement;
    fn add(self, rhs: &ExtElement) -> ExtElement {
        debug_assert_eq!(self.ext, rhs.ext);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        ExtElement { ext: self.ext.clone(), coeffs }
    }
}

impl Neg for &ExtElement {
    type Output = ExtElement;
    fn neg(self) -> ExtElement {
        ExtElement { ext: self.ext.clone(), coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }
}

impl Sub for &ExtElement {
    type Output = ExtElement;
    fn sub(self, rhs: &ExtElement) -> ExtElement {
        self + &(-rhs)
    }
}

impl Mul for &ExtElement {
    type Output = ExtElement;
    fn mul(self, rhs: &ExtElement) -> ExtElement {
        debug_assert_eq!(self.ext, rhs.ext);
        let fld = self.ext.field();
        let p = self.ext.p() as usize;
        let mut wide = vec![LaurentSeries::exact_zero(fld); 2 * p - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if (a.is_zero() && a.is_exact()) || (b.is_zero() && b.is_exact()) {
                    continue;
                }
                wide[i + j] = &wide[i + j] + &(a * b);
            }
        }
        // y^(p+k) = y^(k+1) + β y^k, folded from the top degree down
        for d in (p..2 * p - 1).rev() {
            let c = std::mem::replace(&mut wide[d], LaurentSeries::exact_zero(fld));
            wide[d - p + 1] = &wide[d - p + 1] + &c;
            wide[d - p] = &wide[d - p] + &(&c * self.ext.beta());
        }
        wide.truncate(p);
        ExtElement { ext: self.ext.clone(), coeffs: wide }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ExtElement {
            type Output = ExtElement;
            fn $m(self, rhs: ExtElement) -> ExtElement {
                (&self).$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl FpAlgebra for ExtElement {
    fn characteristic(&self) -> u32 {
        self.ext.p()
    }
    fn zero_like(&self) -> Self {
        self.ext.zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn times_int(&self, k: u32) -> Self {
        self.scale_k(&LaurentSeries::constant(self.ext.field(), self.ext.field().from_int(k as i64)))
    }
}

/// `df_{L/K}`: finite values are negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum ExtDefect {
    Finite(i64),
    Infinite,
}

impl ExtDefect {
    pub fn finite(self) -> Option<i64> {
        match self {
            ExtDefect::Finite(n) => Some(n),
            ExtDefect::Infinite => None,
        }
    }
}

impl From<WpDefect> for ExtDefect {
    fn from(d: WpDefect) -> Self {
        match d.finite() {
            Some(n) => ExtDefect::Finite(n),
            None => ExtDefect::Infinite,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleOutcome {
    /// `e + ℘(l)` for the `l` found by the elimination, `y^0` part dropped.
    pub reduced: ExtElement,
    pub df: ExtDefect,
    /// The final valuation also satisfies one of the sufficient congruence
    /// conditions for being reduced (`≢ -b mod p`, or `≡ (p-1)b mod p^2`).
    pub certified_by_congruence: bool,
    pub window: i64,
    pub rows: usize,
}

/// Default elimination window `2|v_L(e)| + pb`.
pub fn default_window(ext: &CpExtension, e: &ExtElement) -> Result<i64> {
    let v = e.without_k_part().valuation()?.unwrap_or(0).min(0);
    Ok(2 * v.abs() + ext.p() as i64 * ext.b())
}

/// Number of window doublings attempted by [`reduce_lk`].
pub const WINDOW_DOUBLINGS: u32 = 4;

/// [`reduce_lk_oracle`] with the default window, doubled on
/// [`Error::WindowTooSmall`] up to [`WINDOW_DOUBLINGS`] times.
pub fn reduce_lk(ext: &CpExtension, e: &ExtElement) -> Result<OracleOutcome> {
    let mut window = default_window(ext, e)?;
    let mut attempt = 0;
    loop {
        match reduce_lk_oracle(ext, e, window) {
            Err(Error::WindowTooSmall { .. }) if attempt < WINDOW_DOUBLINGS => {
                window *= 2;
                attempt += 1;
            }
            other => return other,
        }
    }
}

type LevelVec = BTreeMap<i64, FqElem>;

struct Pivot {
    row: LevelVec,
    /// The combination of monomials `c t^a y^i` whose `℘` is `row`, keyed by level.
    preimage: LevelVec,
}

struct Eliminator<'a> {
    fld: &'a GaloisField,
    p: u32,
    pivots: HashMap<(i64, usize), Pivot>,
}

impl Eliminator<'_> {
    fn leading_key(&self, v: &LevelVec) -> Option<(i64, usize, u32)> {
        let (&lvl, &c) = v.iter().next()?;
        let coords = self.fld.coords(c);
        let (j, &x) = coords.iter().enumerate().find(|(_, &x)| x != 0).expect("stored coefficients are nonzero");
        Some((lvl, j, x))
    }

    fn axpy(&self, v: &mut LevelVec, lambda: u32, w: &LevelVec) {
        for (&lvl, &c) in w {
            let delta = self.fld.scale(c, lambda);
            let sum = self.fld.add(v.get(&lvl).copied().unwrap_or(FqElem::ZERO), delta);
            if sum.is_zero() {
                v.remove(&lvl);
            } else {
                v.insert(lvl, sum);
            }
        }
    }

    /// Reduces `v` (and its preimage) until its leading key has no pivot.
    fn reduce(&self, v: &mut LevelVec, pre: &mut LevelVec) {
        while let Some((lvl, j, x)) = self.leading_key(v) {
            let Some(piv) = self.pivots.get(&(lvl, j)) else { return };
            let lambda = self.p - x;
            self.axpy(v, lambda, &piv.row);
            self.axpy(pre, lambda, &piv.preimage);
        }
    }

    fn insert(&mut self, mut row: LevelVec, mut pre: LevelVec) {
        self.reduce(&mut row, &mut pre);
        let Some((lvl, j, x)) = self.leading_key(&row) else { return };
        let inv = mod_inverse(x as i64, self.p as i64) as u32;
        let scale = |m: &LevelVec| m.iter().map(|(&l, &c)| (l, self.fld.scale(c, inv))).collect::<LevelVec>();
        let piv = Pivot { row: scale(&row), preimage: scale(&pre) };
        self.pivots.insert((lvl, j), piv);
    }
}

/// Brute-force `L/K`-reduction by `F_p`-linear elimination.
///
/// For every monomial `c t^a y^i` (`c` in an `F_p`-basis of `F_q`) whose
/// level lies in `[-window, -b]`, the vector `℘(c t^a y^i)` modulo `K` is
/// added to an echelon basis keyed by (level, first nonzero `F_p`
/// coordinate). Entries above level `-b` are discarded, as everything there
/// lies in `℘(L) + K`. The input is then reduced against the basis; the level
/// of the first irreducible entry is `df_{L/K}(e)`.
pub fn reduce_lk_oracle(ext: &CpExtension, e: &ExtElement, window: i64) -> Result<OracleOutcome> {
    let fld = ext.field();
    let p = ext.p();
    let b = ext.b();
    let e_mod_k = e.without_k_part();
    let prec_level = e_mod_k.precision_level();
    let cap = prec_level.map_or(-b + 1, |n| n.min(-b + 1));
    let mut target = e_mod_k.level_vector(cap);

    let lowest = target.keys().next().copied();
    if let Some(v) = lowest {
        if v < -window {
            return Err(Error::WindowTooSmall { window, needed: -v });
        }
    }

    let mut elim = Eliminator { fld, p, pivots: HashMap::new() };
    let basis = fld.basis();
    let mut rows = 0;
    for n in b..=window {
        if n % p as i64 == 0 {
            continue;
        }
        let (a, i) = ext.monomial_at(-n);
        for &c in &basis {
            let mut row = LevelVec::new();
            let cp = fld.frobenius(c);
            for j in 1..=i {
                for &(k, coef) in &ext.0.expansion[i][j] {
                    let lvl = ext.level(p as i64 * a + k, j);
                    if lvl <= -b {
                        let val = fld.mul(cp, coef);
                        let sum = fld.add(row.get(&lvl).copied().unwrap_or(FqElem::ZERO), val);
                        if sum.is_zero() {
                            row.remove(&lvl);
                        } else {
                            row.insert(lvl, sum);
                        }
                    }
                }
            }
            let own = fld.sub(row.get(&-n).copied().unwrap_or(FqElem::ZERO), c);
            if own.is_zero() {
                row.remove(&-n);
            } else {
                row.insert(-n, own);
            }
            rows += 1;
            elim.insert(row, LevelVec::from([(-n, c)]));
        }
    }

    let mut pre = LevelVec::new();
    elim.reduce(&mut target, &mut pre);

    let df = match target.keys().next() {
        Some(&lvl) => ExtDefect::Finite(lvl),
        None if prec_level.is_none_or(|n| n > -b) => ExtDefect::Infinite,
        None => {
            return Err(Error::InsufficientPrecision(format!(
                "element reduces to zero below level {}, but only known below level {}",
                cap,
                prec_level.unwrap()
            )))
        }
    };

    let mut l_coeffs = vec![LaurentSeries::exact_zero(fld); p as usize];
    for (&lvl, &c) in &pre {
        let (a, i) = ext.monomial_at(lvl);
        l_coeffs[i].add_term(a, c);
    }
    let l = ext.element(l_coeffs);
    let reduced = (&e_mod_k + &l.wp()).without_k_part();

    let certified_by_congruence = match df {
        ExtDefect::Finite(d) if d < -b => {
            let (pi, p2) = (p as i64, (p * p) as i64);
            (d + b).rem_euclid(pi) != 0 || (d - (pi - 1) * b).rem_euclid(p2) == 0
        }
        _ => false,
    };
    Ok(OracleOutcome { reduced, df, certified_by_congruence, window, rows })
}
