//! Finite fields `F_q`, `q = p^f`, realized as `F_p[g]/(modulus)`.
//!
//! Elements are stored as their coordinate index `sum c_j p^j` with respect to
//! the power basis `1, g, ..., g^(f-1)`. Multiplication goes through
//! discrete-log tables; addition through a table for small `q` and digit-wise
//! otherwise.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;
/// Largest supported characteristic.
pub const MAX_CHARACTERISTIC: u32 = 13;

const ADD_TABLE_LIMIT: u32 = 256;

/// Defining data of `F_q`: characteristic, degree and a monic irreducible
/// modulus (coefficients from low to high degree, length `f + 1`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub f: u32,
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    /// Validates `p` prime in range, `modulus` monic of degree `f` and
    /// irreducible over `F_p`.
    pub fn new(p: u32, f: u32, modulus: Vec<u32>) -> Result<Self> {
        check_parameters(p, f)?;
        if modulus.len() != f as usize + 1 {
            return Err(Error::InvalidField(format!(
                "modulus must have {} coefficients, got {}",
                f + 1,
                modulus.len()
            )));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField("modulus coefficients must lie in 0..p".into()));
        }
        if modulus[f as usize] != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        if !is_irreducible(p, &modulus) {
            return Err(Error::InvalidField(format!("modulus {modulus:?} is reducible over F_{p}")));
        }
        Ok(FieldSpec { p, f, modulus })
    }

    /// The prime field `F_p`.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, vec![0, 1])
    }

    /// `F_{p^f}` with the first irreducible monic modulus in the ordering by
    /// coordinate index of the lower coefficients.
    pub fn with_default_modulus(p: u32, f: u32) -> Result<Self> {
        check_parameters(p, f)?;
        if f == 1 {
            return Self::prime(p);
        }
        let count = (p as u64).pow(f);
        for idx in 0..count {
            let mut modulus = digits(idx, p, f as usize);
            modulus.push(1);
            if is_irreducible(p, &modulus) {
                return Ok(FieldSpec { p, f, modulus });
            }
        }
        Err(Error::InvalidField(format!("no irreducible polynomial of degree {f} over F_{p}")))
    }

    pub fn order(&self) -> u32 {
        self.p.pow(self.f)
    }
}

fn check_parameters(p: u32, f: u32) -> Result<()> {
    if !(2..=MAX_CHARACTERISTIC).contains(&p) || !is_prime(p) {
        return Err(Error::InvalidField(format!(
            "characteristic must be a prime in 2..={MAX_CHARACTERISTIC}, got {p}"
        )));
    }
    if f == 0 {
        return Err(Error::InvalidField("extension degree must be at least 1".into()));
    }
    match (p as u64).checked_pow(f) {
        Some(q) if q <= MAX_ORDER as u64 => Ok(()),
        _ => Err(Error::InvalidField(format!("field order {p}^{f} exceeds {MAX_ORDER}"))),
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn digits(mut idx: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((idx % p as u64) as u32);
        idx /= p as u64;
    }
    out
}

// Dense polynomials over F_p, low degree first, trailing zeros trimmed.
fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = poly_trim(a.to_vec());
    let m = poly_trim(m.to_vec());
    let dm = m.len() - 1;
    let inv_lead = inv_mod(m[dm], p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let factor = r[r.len() - 1] * inv_lead % p;
        for (i, &c) in m.iter().enumerate() {
            r[shift + i] = (r[shift + i] + p * p - factor * c % p) % p;
        }
        r = poly_trim(r);
    }
    r
}

fn inv_mod(a: u32, p: u32) -> u32 {
    (1..p).find(|x| a * x % p == 1).expect("nonzero residue is invertible")
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible(p: u32, modulus: &[u32]) -> bool {
    let deg = modulus.len() - 1;
    for d in 1..=deg / 2 {
        for idx in 0..(p as u64).pow(d as u32) {
            let mut divisor = digits(idx, p, d);
            divisor.push(1);
            if poly_rem(modulus, &divisor, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// An element of `F_q`, identified by its coordinate index.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default, Serialize, Deserialize)]
pub struct FqElem(u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

struct Tables {
    spec: FieldSpec,
    q: u32,
    // exp[k] = gen^k for k in 0..q-1; log[0] unused.
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add: Option<Vec<u32>>,
    wp_preimage: Vec<Option<u32>>,
}

/// Cheap, cloneable handle to the arithmetic tables of one finite field.
#[derive(Clone)]
pub struct GaloisField(Arc<Tables>);

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}

impl Eq for GaloisField {}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)?;
        if self.0.spec.f > 1 {
            write!(f, "[mod {:?}]", self.0.spec.modulus)?;
        }
        Ok(())
    }
}

impl GaloisField {
    pub fn new(spec: FieldSpec) -> Self {
        let p = spec.p;
        let f = spec.f as usize;
        let q = spec.order();

        let to_poly = |idx: u32| digits(idx as u64, p, f);
        let from_poly = |c: &[u32]| c.iter().rev().fold(0u32, |acc, &d| acc * p + d);
        let poly_mul = |a: u32, b: u32| -> u32 {
            let (a, b) = (to_poly(a), to_poly(b));
            let mut prod = vec![0u32; 2 * f];
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            let mut r = poly_rem(&prod, &spec.modulus, p);
            r.resize(f, 0);
            from_poly(&r)
        };

        let generator = (1..q)
            .find(|&cand| {
                let mut x = cand;
                let mut order = 1;
                while x != 1 {
                    x = poly_mul(x, cand);
                    order += 1;
                }
                order == q - 1
            })
            .expect("multiplicative group of a finite field is cyclic");

        let mut exp = Vec::with_capacity((q - 1) as usize);
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for k in 0..q - 1 {
            exp.push(x);
            log[x as usize] = k;
            x = poly_mul(x, generator);
        }

        let digit_add = |a: u32, b: u32| -> u32 {
            let (a, b) = (to_poly(a), to_poly(b));
            let s: Vec<u32> = a.iter().zip(&b).map(|(x, y)| (x + y) % p).collect();
            from_poly(&s)
        };
        let neg: Vec<u32> = (0..q)
            .map(|a| {
                let c: Vec<u32> = to_poly(a).iter().map(|&d| (p - d) % p).collect();
                from_poly(&c)
            })
            .collect();
        let add = (q <= ADD_TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity((q * q) as usize);
            for a in 0..q {
                for b in 0..q {
                    t.push(digit_add(a, b));
                }
            }
            t
        });

        let mut gf = GaloisField(Arc::new(Tables { spec, q, exp, log, neg, add, wp_preimage: Vec::new() }));
        let mut pre = vec![None; q as usize];
        for w in 0..q {
            let img = gf.wp(FqElem(w)).0 as usize;
            if pre[img].is_none() {
                pre[img] = Some(w);
            }
        }
        Arc::get_mut(&mut gf.0).expect("freshly built tables are unshared").wp_preimage = pre;
        gf
    }

    /// Convenience constructor for `F_{p^f}` with the default modulus.
    pub fn of_order(p: u32, f: u32) -> Result<Self> {
        Ok(Self::new(FieldSpec::with_default_modulus(p, f)?))
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.0.spec
    }

    pub fn characteristic(&self) -> u32 {
        self.0.spec.p
    }

    pub fn degree(&self) -> u32 {
        self.0.spec.f
    }

    pub fn order(&self) -> u32 {
        self.0.q
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.0.q).map(FqElem)
    }

    pub fn element(&self, index: u32) -> Option<FqElem> {
        (index < self.0.q).then_some(FqElem(index))
    }

    /// Image of an integer under `Z -> F_p -> F_q`.
    pub fn from_int(&self, n: i64) -> FqElem {
        FqElem(n.rem_euclid(self.characteristic() as i64) as u32)
    }

    /// The class `g` of the indeterminate (the root of the modulus).
    pub fn g(&self) -> FqElem {
        if self.degree() == 1 {
            // F_p[g]/(g) collapses g to 0.
            FqElem(0)
        } else {
            FqElem(self.characteristic())
        }
    }

    /// `F_p`-basis `1, g, ..., g^(f-1)`.
    pub fn basis(&self) -> Vec<FqElem> {
        (0..self.degree()).map(|j| FqElem(self.characteristic().pow(j))).collect()
    }

    pub fn coords(&self, a: FqElem) -> Vec<u32> {
        digits(a.0 as u64, self.characteristic(), self.degree() as usize)
    }

    pub fn from_coords(&self, coords: &[u32]) -> FqElem {
        let p = self.characteristic();
        FqElem(coords.iter().rev().fold(0u32, |acc, &d| acc * p + d % p))
    }

    /// `Some(k)` when `a` lies in the prime field, as its residue `0..p`.
    pub fn prime_value(&self, a: FqElem) -> Option<u32> {
        (a.0 < self.characteristic()).then_some(a.0)
    }

    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        let t = &self.0;
        if let Some(table) = &t.add {
            return FqElem(table[(a.0 * t.q + b.0) as usize]);
        }
        let p = t.spec.p;
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        FqElem(out)
    }

    pub fn neg(&self, a: FqElem) -> FqElem {
        FqElem(self.0.neg[a.0 as usize])
    }

    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if a.is_zero() || b.is_zero() {
            return FqElem::ZERO;
        }
        let t = &self.0;
        let k = (t.log[a.0 as usize] as u64 + t.log[b.0 as usize] as u64) % (t.q as u64 - 1);
        FqElem(t.exp[k as usize])
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: FqElem) -> FqElem {
        assert!(!a.is_zero(), "inverse of zero in {self:?}");
        let t = &self.0;
        let k = (t.q - 1 - t.log[a.0 as usize]) % (t.q - 1);
        FqElem(t.exp[k as usize])
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> FqElem {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: FqElem, e: u64) -> FqElem {
        if e == 0 {
            return FqElem::ONE;
        }
        if a.is_zero() {
            return FqElem::ZERO;
        }
        let t = &self.0;
        let k = (t.log[a.0 as usize] as u64 * (e % (t.q as u64 - 1))) % (t.q as u64 - 1);
        FqElem(t.exp[k as usize])
    }

    /// `a^p`.
    pub fn frobenius(&self, a: FqElem) -> FqElem {
        self.pow(a, self.characteristic() as u64)
    }

    /// The unique `d` with `d^p = c`, namely `c^(q/p)`.
    pub fn frobenius_inv(&self, c: FqElem) -> FqElem {
        self.pow(c, (self.order() / self.characteristic()) as u64)
    }

    /// `a^p - a`.
    pub fn wp(&self, a: FqElem) -> FqElem {
        self.sub(self.frobenius(a), a)
    }

    /// Least `w` (by coordinate index) with `w^p - w = c`, if any.
    pub fn wp_solve(&self, c: FqElem) -> Option<FqElem> {
        self.0.wp_preimage[c.0 as usize].map(FqElem)
    }

    /// Multiplies by the prime-field scalar `k`.
    pub fn scale(&self, a: FqElem, k: u32) -> FqElem {
        self.mul(a, self.from_int(k as i64))
    }
}

/// Least `w` with `w^p - w = c`, or `None` when `c` is not in `wp(F_q)`.
pub fn ff_wp_solve(field: &GaloisField, c: FqElem) -> Option<FqElem> {
    field.wp_solve(c)
}

/// `c^(1/p)` in `F_q`.
pub fn frobenius_inv(field: &GaloisField, c: FqElem) -> FqElem {
    field.frobenius_inv(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f4() -> GaloisField {
        GaloisField::of_order(2, 2).unwrap()
    }

    #[test]
    fn default_moduli() {
        assert_eq!(FieldSpec::with_default_modulus(2, 2).unwrap().modulus, vec![1, 1, 1]);
        assert_eq!(FieldSpec::with_default_modulus(3, 2).unwrap().modulus, vec![1, 0, 1]);
        assert_eq!(FieldSpec::with_default_modulus(2, 4).unwrap().modulus, vec![1, 1, 0, 0, 1]);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(FieldSpec::new(4, 1, vec![0, 1]).is_err());
        assert!(FieldSpec::new(17, 1, vec![0, 1]).is_err());
        assert!(FieldSpec::new(2, 2, vec![1, 0, 1]).is_err(), "x^2+1 = (x+1)^2 over F_2");
        assert!(FieldSpec::new(3, 2, vec![1, 0, 2]).is_err(), "not monic");
        assert!(FieldSpec::new(2, 0, vec![1]).is_err());
    }

    #[test]
    fn every_element_is_fixed_by_q_power() {
        for (p, f) in [(2, 1), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (3, 4), (5, 2), (7, 2), (13, 1)] {
            let fld = GaloisField::of_order(p, f).unwrap();
            let q = fld.order() as u64;
            for a in fld.elements() {
                assert_eq!(fld.pow(a, q), a, "F_{q}: {a:?}");
            }
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, f) in [(2, 2), (3, 2), (2, 3)] {
            let fld = GaloisField::of_order(p, f).unwrap();
            for a in fld.elements() {
                assert_eq!(fld.add(a, fld.neg(a)), FqElem::ZERO);
                if !a.is_zero() {
                    assert_eq!(fld.mul(a, fld.inv(a)), FqElem::ONE);
                }
                for b in fld.elements() {
                    assert_eq!(fld.add(a, b), fld.add(b, a));
                    for c in fld.elements() {
                        let lhs = fld.mul(a, fld.add(b, c));
                        let rhs = fld.add(fld.mul(a, b), fld.mul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn g_satisfies_modulus_in_f4() {
        let fld = f4();
        let g = fld.g();
        assert_eq!(fld.mul(g, g), fld.add(g, FqElem::ONE));
    }

    #[test]
    fn wp_solve_examples() {
        let f3 = GaloisField::of_order(3, 1).unwrap();
        assert_eq!(ff_wp_solve(&f3, FqElem::ZERO), Some(FqElem::ZERO));
        let f2 = GaloisField::of_order(2, 1).unwrap();
        assert_eq!(ff_wp_solve(&f2, FqElem::ONE), None);
        let f4 = f4();
        assert_eq!(ff_wp_solve(&f4, FqElem::ONE), Some(f4.g()));
    }

    #[test]
    fn wp_solve_matches_exhaustive_search() {
        for (p, f) in [(2, 1), (2, 2), (2, 4), (3, 1), (3, 2), (3, 4), (5, 2)] {
            let fld = GaloisField::of_order(p, f).unwrap();
            for c in fld.elements() {
                let brute = fld.elements().find(|&w| fld.sub(fld.pow(w, p as u64), w) == c);
                assert_eq!(ff_wp_solve(&fld, c), brute);
            }
        }
    }

    #[test]
    fn frobenius_inverse_examples() {
        let f2 = GaloisField::of_order(2, 1).unwrap();
        for c in f2.elements() {
            assert_eq!(frobenius_inv(&f2, c), c);
        }
        let f4 = f4();
        let g = f4.g();
        assert_eq!(frobenius_inv(&f4, g), f4.mul(g, g));
        let f9 = GaloisField::of_order(3, 2).unwrap();
        let two = f9.from_int(2);
        assert_eq!(frobenius_inv(&f9, two), two);
        for c in f9.elements() {
            assert_eq!(f9.frobenius(frobenius_inv(&f9, c)), c);
        }
    }
}
