//! Truncated Laurent series over `F_q`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::gf::{FqElem, GaloisField};
use crate::error::{Error, Result};

/// An element of `F_q((t))` known modulo `t^prec`.
///
/// `prec == None` marks an exact Laurent polynomial. Stored exponents are
/// always below `prec` and stored coefficients are never zero.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    field: GaloisField,
    terms: BTreeMap<i64, FqElem>,
    prec: Option<i64>,
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl LaurentSeries {
    /// The zero series `O(t^prec)` (exact zero when `prec` is `None`).
    pub fn zero(field: &GaloisField, prec: Option<i64>) -> Self {
        LaurentSeries { field: field.clone(), terms: BTreeMap::new(), prec }
    }

    pub fn exact_zero(field: &GaloisField) -> Self {
        Self::zero(field, None)
    }

    /// The exact monomial `c t^exp`.
    pub fn monomial(field: &GaloisField, c: FqElem, exp: i64) -> Self {
        let mut s = Self::exact_zero(field);
        if !c.is_zero() {
            s.terms.insert(exp, c);
        }
        s
    }

    pub fn constant(field: &GaloisField, c: FqElem) -> Self {
        Self::monomial(field, c, 0)
    }

    pub fn one(field: &GaloisField) -> Self {
        Self::constant(field, FqElem::ONE)
    }

    /// Builds a series from `(exponent, coefficient)` pairs; repeated exponents
    /// are summed and terms at or above `prec` are dropped.
    pub fn from_terms<I>(field: &GaloisField, terms: I, prec: Option<i64>) -> Self
    where
        I: IntoIterator<Item = (i64, FqElem)>,
    {
        let mut s = Self::zero(field, prec);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// Adds `c t^exp` in place, ignoring it beyond the precision.
    pub fn add_term(&mut self, exp: i64, c: FqElem) {
        if c.is_zero() || self.prec.is_some_and(|n| exp >= n) {
            return;
        }
        let fld = &self.field;
        match self.terms.get_mut(&exp) {
            Some(old) => {
                let sum = fld.add(*old, c);
                if sum.is_zero() {
                    self.terms.remove(&exp);
                } else {
                    *old = sum;
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn characteristic(&self) -> u32 {
        self.field.characteristic()
    }

    /// Absolute precision; `None` for exact series.
    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Least exponent with nonzero coefficient; `None` when the series is
    /// zero up to its precision.
    pub fn valuation(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    /// Lower bound for the valuation of the true element: the valuation when
    /// known, otherwise the precision (or `None` for an exact zero).
    fn valuation_bound(&self) -> Option<i64> {
        self.valuation().or(self.prec)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading_term(&self) -> Option<(i64, FqElem)> {
        self.terms.iter().next().map(|(&e, &c)| (e, c))
    }

    pub fn coeff(&self, exp: i64) -> FqElem {
        self.terms.get(&exp).copied().unwrap_or(FqElem::ZERO)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, FqElem)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Lowers the precision to `min(prec, n)`, dropping terms at or above it.
    pub fn truncate(&self, n: i64) -> Self {
        let prec = min_prec(self.prec, Some(n));
        let terms = self.terms.range(..n).map(|(&e, &c)| (e, c)).collect();
        LaurentSeries { field: self.field.clone(), terms, prec }
    }

    /// Part with exponents strictly below `n`, declared exact.
    pub fn head_below(&self, n: i64) -> Self {
        let terms = self.terms.range(..n).map(|(&e, &c)| (e, c)).collect();
        LaurentSeries { field: self.field.clone(), terms, prec: None }
    }

    /// Same terms with the precision replaced.
    pub fn with_prec(&self, prec: Option<i64>) -> Self {
        match prec {
            Some(n) => LaurentSeries { prec: Some(n), ..self.truncate(n) },
            None => LaurentSeries { prec: None, ..self.clone() },
        }
    }

    pub fn scale(&self, c: FqElem) -> Self {
        if c.is_zero() {
            return Self::zero(&self.field, self.prec);
        }
        let terms = self.terms.iter().map(|(&e, &x)| (e, self.field.mul(x, c))).collect();
        LaurentSeries { field: self.field.clone(), terms, prec: self.prec }
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        let terms = self.terms.iter().map(|(&e, &c)| (e + k, c)).collect();
        LaurentSeries { field: self.field.clone(), terms, prec: self.prec.map(|n| n + k) }
    }

    /// `self^p`; in characteristic `p` the unknown tail is raised to the
    /// `p`-th power as well, so `O(t^N)` becomes `O(t^(pN))`.
    pub fn frobenius(&self) -> Self {
        let p = self.characteristic() as i64;
        let fld = &self.field;
        let terms = self.terms.iter().map(|(&e, &c)| (e * p, fld.frobenius(c))).collect();
        LaurentSeries { field: fld.clone(), terms, prec: self.prec.map(|n| n * p) }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one(&self.field);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(self + other)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(self * other)
    }

    /// Whether the two series agree on every exponent known to both.
    pub fn agrees_with(&self, other: &Self) -> bool {
        let cut = min_prec(self.prec, other.prec);
        let (a, b) = match cut {
            Some(n) => (self.truncate(n), other.truncate(n)),
            None => (self.clone(), other.clone()),
        };
        a.terms == b.terms
    }
}

impl Add for &LaurentSeries {
    type Output = LaurentSeries;

    fn add(self, rhs: &LaurentSeries) -> LaurentSeries {
        debug_assert_eq!(self.field, rhs.field);
        let prec = min_prec(self.prec, rhs.prec);
        let mut out = match prec {
            Some(n) => self.truncate(n),
            None => self.clone(),
        };
        out.prec = prec;
        for (&e, &c) in &rhs.terms {
            out.add_term(e, c);
        }
        out
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;

    fn neg(self) -> LaurentSeries {
        let fld = &self.field;
        let terms = self.terms.iter().map(|(&e, &c)| (e, fld.neg(c))).collect();
        LaurentSeries { field: fld.clone(), terms, prec: self.prec }
    }
}

impl Sub for &LaurentSeries {
    type Output = LaurentSeries;

    fn sub(self, rhs: &LaurentSeries) -> LaurentSeries {
        self + &(-rhs)
    }
}

impl Mul for &LaurentSeries {
    type Output = LaurentSeries;

    fn mul(self, rhs: &LaurentSeries) -> LaurentSeries {
        debug_assert_eq!(self.field, rhs.field);
        let fld = &self.field;
        // v(a) + prec(b) and v(b) + prec(a); an exact zero kills the product.
        let va = self.valuation_bound();
        let vb = rhs.valuation_bound();
        let prec = match (va, vb) {
            (None, _) | (_, None) => None,
            (Some(va), Some(vb)) => min_prec(rhs.prec.map(|n| va + n), self.prec.map(|n| vb + n)),
        };
        let mut out = LaurentSeries::zero(fld, prec);
        if va.is_none() || vb.is_none() {
            out.prec = None;
            return out;
        }
        for (&ea, &ca) in &self.terms {
            for (&eb, &cb) in &rhs.terms {
                out.add_term(ea + eb, fld.mul(ca, cb));
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentSeries {
            type Output = LaurentSeries;
            fn $m(self, rhs: LaurentSeries) -> LaurentSeries {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&LaurentSeries> for LaurentSeries {
            type Output = LaurentSeries;
            fn $m(self, rhs: &LaurentSeries) -> LaurentSeries {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        -&self
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::text::format_series(self))
    }
}

/// Series serialize as their text form.
impl serde::Serialize for LaurentSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::text::format_series(self))
    }
}

/// Splits `a = sum_j c_j^p t^j` (`0 <= j < p`) over the `K^p`-basis
/// `1, t, ..., t^(p-1)`. Each `c_j` carries precision `ceil((prec(a) - j)/p)`.
pub fn ls_p_power_split(a: &LaurentSeries) -> Vec<LaurentSeries> {
    let fld = a.field();
    let p = a.characteristic() as i64;
    (0..p)
        .map(|j| {
            let prec = a.prec().map(|n| num_integer::Integer::div_ceil(&(n - j), &p));
            let terms =
                a.terms().filter(|(e, _)| e.rem_euclid(p) == j).map(|(e, c)| ((e - j) / p, fld.frobenius_inv(c)));
            LaurentSeries::from_terms(fld, terms, prec)
        })
        .collect()
}
