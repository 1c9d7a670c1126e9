//! Artin-Schreier generator packages for the four groups of order `p^3`.
//!
//! An extension with group `Q8`, `D8`, `Heis` or `Mod` is `K(x_1, x_2, x_3)`
//! with `℘(x_1) = κ_1`, `℘(x_2) = κ_2` and `℘(x_3) = 𝔰(x_1, x_2) + κ_3`.
//! Elements of `M = K(x_1, x_2)` are held symbolically as polynomials of
//! degree below `p` in each variable, kept in that shape by the rewrite
//! `x_k^p = x_k + κ_k`. The root `x_3` is never materialized: only the rows
//! `(σ_i - 1) x_3` are, and closure is checked by showing that each
//! `(σ_i - 1)(𝔰 + κ_3)` is the `℘`-image of its row.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::artin_schreier::{independent_pair, reduce_k, witt_s, ASGenerator, FpAlgebra};
use crate::classify::GroupKind;
use crate::error::{Error, Result};
use crate::field::{GaloisField, LaurentSeries};

#[derive(Debug)]
struct Relations {
    p: usize,
    kappa: [LaurentSeries; 2],
}

/// An element of `K(x_1, x_2)`: coefficient `(i, j)` multiplies `x_1^i x_2^j`.
#[derive(Clone)]
pub struct SymbolicMElement {
    rel: Arc<Relations>,
    coeffs: Vec<LaurentSeries>,
}

impl SymbolicMElement {
    fn field(&self) -> &GaloisField {
        self.rel.kappa[0].field()
    }

    fn p(&self) -> usize {
        self.rel.p
    }

    fn blank(rel: &Arc<Relations>) -> Self {
        let fld = rel.kappa[0].field();
        SymbolicMElement { rel: rel.clone(), coeffs: vec![LaurentSeries::exact_zero(fld); rel.p * rel.p] }
    }

    fn with_coeff(&self, i: usize, j: usize, c: LaurentSeries) -> Self {
        let mut out = Self::blank(&self.rel);
        out.coeffs[i * self.p() + j] = c;
        out
    }

    pub fn zero(&self) -> Self {
        Self::blank(&self.rel)
    }

    /// The element `c` of `K`, embedded.
    pub fn constant(&self, c: &LaurentSeries) -> Self {
        self.with_coeff(0, 0, c.clone())
    }

    pub fn one(&self) -> Self {
        self.constant(&LaurentSeries::one(self.field()))
    }

    /// `x_k` for `k = 1, 2`.
    pub fn x(&self, k: usize) -> Self {
        let one = LaurentSeries::one(self.field());
        match k {
            1 => self.with_coeff(1 % self.p(), 0, one),
            2 => self.with_coeff(0, 1 % self.p(), one),
            _ => panic!("M has generators x_1 and x_2 only"),
        }
    }

    pub fn coeff(&self, i: usize, j: usize) -> &LaurentSeries {
        &self.coeffs[i * self.p() + j]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(LaurentSeries::is_zero)
    }

    /// Nonzero monomials `((i, j), c)`.
    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), &LaurentSeries)> {
        let p = self.p();
        self.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(k, c)| ((k / p, k % p), c))
    }

    /// Adds `c` to the coefficient of `x_1^i x_2^j`.
    pub fn add_at(&mut self, i: usize, j: usize, c: &LaurentSeries) {
        let p = self.p();
        let slot = &mut self.coeffs[i * p + j];
        *slot = &*slot + c;
    }

    fn same_relations(&self, other: &Self) {
        assert!(Arc::ptr_eq(&self.rel, &other.rel) || self.rel.kappa == other.rel.kappa, "elements of different M");
    }

    /// `σ_i`: the substitution `x_i → x_i + 1`.
    pub fn apply_sigma(&self, i: usize) -> Self {
        let p = self.p();
        let fld = self.field().clone();
        let mut out = self.zero();
        for ((a, b), c) in self.terms() {
            let (deg, keep) = if i == 1 { (a, b) } else { (b, a) };
            for low in 0..=deg {
                let binom = binomial_mod(deg, low, p);
                if binom == 0 {
                    continue;
                }
                let scaled = c.scale(fld.from_int(binom as i64));
                let (x1, x2) = if i == 1 { (low, keep) } else { (keep, low) };
                out.add_at(x1, x2, &scaled);
            }
        }
        out
    }

    /// `x^p`, using `(c m)^p = c^p m^p` and `x_k^p = x_k + κ_k`.
    pub fn frobenius(&self) -> Self {
        let mut out = self.zero();
        let x1p = &self.x(1) + &self.constant(&self.rel.kappa[0]);
        let x2p = &self.x(2) + &self.constant(&self.rel.kappa[1]);
        for ((i, j), c) in self.terms() {
            let mut term = self.constant(&c.frobenius());
            for _ in 0..i {
                term = &term * &x1p;
            }
            for _ in 0..j {
                term = &term * &x2p;
            }
            out = &out + &term;
        }
        out
    }

    /// `℘(x) = x^p - x`.
    pub fn wp(&self) -> Self {
        &self.frobenius() - self
    }
}

fn binomial_mod(n: usize, k: usize, p: usize) -> usize {
    // n < p, so the binomial fits comfortably before reduction.
    let mut acc: u64 = 1;
    for t in 0..k {
        acc = acc * (n - t) as u64 / (t + 1) as u64;
    }
    (acc % p as u64) as usize
}

/// The ring `K(x_1, x_2)` for the given `κ_1, κ_2`, as its unit element.
pub fn m_ring(kappa1: &LaurentSeries, kappa2: &LaurentSeries) -> Result<SymbolicMElement> {
    if kappa1.field() != kappa2.field() {
        return Err(Error::FieldMismatch);
    }
    if !kappa1.is_exact() || !kappa2.is_exact() {
        return Err(Error::InsufficientPrecision("symbolic M-arithmetic needs exact generators".into()));
    }
    let rel = Arc::new(Relations { p: kappa1.characteristic() as usize, kappa: [kappa1.clone(), kappa2.clone()] });
    Ok(SymbolicMElement::blank(&rel).one())
}

impl PartialEq for SymbolicMElement {
    fn eq(&self, other: &Self) -> bool {
        self.rel.kappa == other.rel.kappa && (self - other).is_zero()
    }
}

impl<'a> std::ops::Add<&'a SymbolicMElement> for &'a SymbolicMElement {
    type Output = SymbolicMElement;
    fn add(self, rhs: &SymbolicMElement) -> SymbolicMElement {
        self.same_relations(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        SymbolicMElement { rel: self.rel.clone(), coeffs }
    }
}

impl<'a> std::ops::Sub<&'a SymbolicMElement> for &'a SymbolicMElement {
    type Output = SymbolicMElement;
    fn sub(self, rhs: &SymbolicMElement) -> SymbolicMElement {
        self.same_relations(rhs);
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        SymbolicMElement { rel: self.rel.clone(), coeffs }
    }
}

impl std::ops::Neg for &SymbolicMElement {
    type Output = SymbolicMElement;
    fn neg(self) -> SymbolicMElement {
        SymbolicMElement { rel: self.rel.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl<'a> std::ops::Mul<&'a SymbolicMElement> for &'a SymbolicMElement {
    type Output = SymbolicMElement;
    fn mul(self, rhs: &SymbolicMElement) -> SymbolicMElement {
        self.same_relations(rhs);
        let p = self.p();
        let w = 2 * p - 1;
        let zero = LaurentSeries::exact_zero(self.field());
        let mut wide = vec![zero; w * w];
        for ((a, b), c) in self.terms() {
            for ((d, e), f) in rhs.terms() {
                let slot = &mut wide[(a + d) * w + b + e];
                *slot = &*slot + &(c * f);
            }
        }
        let [k1, k2] = &self.rel.kappa;
        // x_1^i = x_1^(i-p+1) + κ_1 x_1^(i-p) for i ≥ p, top degree first.
        for i in (p..w).rev() {
            for j in 0..w {
                let c = std::mem::replace(&mut wide[i * w + j], LaurentSeries::exact_zero(self.field()));
                if c.is_zero() {
                    continue;
                }
                let hi = &mut wide[(i - p + 1) * w + j];
                *hi = &*hi + &c;
                let lo = &mut wide[(i - p) * w + j];
                *lo = &*lo + &(&c * k1);
            }
        }
        for j in (p..w).rev() {
            for i in 0..p {
                let c = std::mem::replace(&mut wide[i * w + j], LaurentSeries::exact_zero(self.field()));
                if c.is_zero() {
                    continue;
                }
                let hi = &mut wide[i * w + j - p + 1];
                *hi = &*hi + &c;
                let lo = &mut wide[i * w + j - p];
                *lo = &*lo + &(&c * k2);
            }
        }
        let mut out = self.zero();
        for i in 0..p {
            for j in 0..p {
                out.coeffs[i * p + j] =
                    std::mem::replace(&mut wide[i * w + j], LaurentSeries::exact_zero(self.field()));
            }
        }
        out
    }
}

impl FpAlgebra for SymbolicMElement {
    fn characteristic(&self) -> u32 {
        self.p() as u32
    }
    fn zero_like(&self) -> Self {
        self.zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn times_int(&self, k: u32) -> Self {
        let c = self.field().from_int(k as i64);
        SymbolicMElement { rel: self.rel.clone(), coeffs: self.coeffs.iter().map(|s| s.scale(c)).collect() }
    }
}

fn monomial_name(i: usize, j: usize) -> String {
    let var = |name: &str, e: usize| match e {
        0 => None,
        1 => Some(name.to_string()),
        _ => Some(format!("{name}^{e}")),
    };
    let parts: Vec<String> = [var("x1", i), var("x2", j)].into_iter().flatten().collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for SymbolicMElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for ((i, j), c) in self.terms() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let coeff = c.to_string();
            if i == 0 && j == 0 {
                f.write_str(&coeff)?;
            } else if c.num_terms() == 1 && coeff == "1" {
                f.write_str(&monomial_name(i, j))?;
            } else if c.num_terms() == 1 {
                write!(f, "{coeff}*{}", monomial_name(i, j))?;
            } else {
                write!(f, "({coeff})*{}", monomial_name(i, j))?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for SymbolicMElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serialized as a map from monomial (`"x1^2*x2"`, `"1"`) to coefficient.
impl Serialize for SymbolicMElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, String> =
            self.terms().map(|((i, j), c)| (monomial_name(i, j), c.to_string())).collect();
        map.serialize(s)
    }
}

/// One entry `(σ_i - 1) x_j` of the action table.
#[derive(Debug, Clone, Serialize)]
pub struct ActionEntry {
    pub sigma: usize,
    pub x: usize,
    pub value: SymbolicMElement,
}

/// The generator package for one group.
#[derive(Debug, Clone, Serialize)]
pub struct GeneratorData {
    pub group: GroupKind,
    pub kappa: [ASGenerator; 3],
    /// `𝔰(x_1, x_2)`; `℘(x_3) = 𝔰 + κ_3`.
    pub s_term: SymbolicMElement,
    pub action: Vec<ActionEntry>,
}

impl GeneratorData {
    /// `(σ_i - 1) x_j`.
    pub fn action_of(&self, sigma: usize, x: usize) -> &SymbolicMElement {
        &self.action.iter().find(|a| a.sigma == sigma && a.x == x).expect("action table is complete").value
    }

    /// The right-hand side `𝔰 + κ_3` of the equation for `x_3`.
    pub fn x3_rhs(&self) -> SymbolicMElement {
        &self.s_term + &self.s_term.constant(&self.kappa[2].value)
    }
}

impl fmt::Display for GeneratorData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "group {}", self.group)?;
        for (k, g) in self.kappa.iter().enumerate() {
            writeln!(f, "kappa{} = {}", k + 1, g.value)?;
        }
        writeln!(f, "x1^p - x1 = kappa1")?;
        writeln!(f, "x2^p - x2 = kappa2")?;
        writeln!(f, "x3^p - x3 = {} + kappa3", self.s_term)?;
        for a in &self.action {
            writeln!(f, "(sigma{} - 1) x{} = {}", a.sigma, a.x, a.value)?;
        }
        Ok(())
    }
}

fn as_generator(k: &LaurentSeries) -> Result<ASGenerator> {
    let r = reduce_k(k)?;
    Ok(ASGenerator { reduced: r.value == *k, value: k.clone(), df: r.df })
}

/// The package of generators for group `g`.
///
/// `κ_1, κ_2` are used as given (they must span independent cosets); `κ_3`
/// is replaced by its reduced representative.
pub fn build_generators(
    g: GroupKind,
    k1: &LaurentSeries,
    k2: &LaurentSeries,
    k3: &LaurentSeries,
) -> Result<GeneratorData> {
    let p = k1.characteristic();
    g.check_characteristic(p)?;
    if k3.field() != k1.field() {
        return Err(Error::FieldMismatch);
    }
    independent_pair(k1, k2)?;
    let one = m_ring(k1, k2)?;
    let kappa3 = reduce_k(k3)?;
    if !kappa3.value.is_exact() {
        return Err(Error::InsufficientPrecision("κ_3 must reduce to an exact series".into()));
    }
    let kappa = [as_generator(k1)?, as_generator(k2)?, kappa3];

    let (x1, x2) = (one.x(1), one.x(2));
    let c1 = one.constant(k1);
    let c2 = one.constant(k2);
    let base = -&(&c2 * &x1);
    let (extra, row13, row23) = match g {
        GroupKind::Q8 => (&(&c1 * &x1) + &(&c2 * &x2), x1.clone(), x2.clone()),
        GroupKind::D8 => (&c1 * &x1, x1.clone(), one.zero()),
        GroupKind::Heis => (one.zero(), one.zero(), one.zero()),
        GroupKind::Mod => (witt_s(&x1, &c1), witt_s(&x1, &one), one.zero()),
    };
    let s_term = &base + &extra;

    let mut action = Vec::with_capacity(9);
    for sigma in 1..=3 {
        for x in 1..=3 {
            let value = match (sigma, x) {
                (1, 3) => &row13 - &x2,
                (2, 3) => row23.clone(),
                _ if sigma == x => one.clone(),
                _ => one.zero(),
            };
            action.push(ActionEntry { sigma, x, value });
        }
    }
    Ok(GeneratorData { group: g, kappa, s_term, action })
}

/// `(σ_i - 1) e` for `i = 1, 2`.
pub fn galois_action(e: &SymbolicMElement, i: usize) -> SymbolicMElement {
    &e.apply_sigma(i) - e
}

/// One row of the closure check: `(σ_i - 1)(𝔰 + κ_3) - ℘(w_i)` where `w_i`
/// is the action row `(σ_i - 1) x_3`.
#[derive(Debug, Clone, Serialize)]
pub struct ClosureRow {
    pub sigma: usize,
    pub witness: SymbolicMElement,
    pub difference: SymbolicMElement,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosureCheck {
    pub holds: bool,
    pub rows: Vec<ClosureRow>,
}

/// Checks that `(σ_i - 1)(𝔰 + κ_3) ∈ M^℘` for `i = 1, 2`, using the action
/// rows as explicit preimages. Never fails; a mismatch shows up as a
/// nonzero difference.
pub fn verify_galois(gd: &GeneratorData) -> ClosureCheck {
    let rhs = gd.x3_rhs();
    let rows: Vec<ClosureRow> = (1..=2)
        .map(|sigma| {
            let witness = gd.action_of(sigma, 3).clone();
            let difference = &galois_action(&rhs, sigma) - &witness.wp();
            ClosureRow { sigma, witness, difference }
        })
        .collect();
    ClosureCheck { holds: rows.iter().all(|r| r.difference.is_zero()), rows }
}

/// `σ_1 σ_2 x_3 - σ_2 σ_1 x_3`, which is `1` when `[σ_1, σ_2] = σ_3^(±1)`
/// acts as the presentation demands.
pub fn commutator_shift(gd: &GeneratorData) -> SymbolicMElement {
    let w1 = gd.action_of(1, 3);
    let w2 = gd.action_of(2, 3);
    &galois_action(w2, 1) - &galois_action(w1, 2)
}

/// `σ_i^p x_3 - x_3 = Σ_{k<p} σ_i^k w_i`. It is `0` when `σ_i` has order
/// `p` and `1` when `σ_i^p = σ_3`.
pub fn pth_power_shift(gd: &GeneratorData, i: usize) -> SymbolicMElement {
    let w = gd.action_of(i, 3);
    let mut acc = w.zero();
    let mut cur = w.clone();
    for _ in 0..w.p() {
        acc = &acc + &cur;
        cur = cur.apply_sigma(i);
    }
    acc
}

/// The two Witt identities in `K(x_1)`: `Tr S(x_1, 1) = 1` and
/// `(σ_1 - 1) S(x_1, κ_1) = ℘(S(x_1, 1))`.
pub fn verify_witt_identities(kappa1: &ASGenerator) -> bool {
    let k = &kappa1.value;
    let Ok(one) = m_ring(k, &LaurentSeries::exact_zero(k.field())) else {
        return false;
    };
    let x1 = one.x(1);
    let s1 = witt_s(&x1, &one);
    let mut trace = one.zero();
    let mut cur = s1.clone();
    for _ in 0..one.p() {
        trace = &trace + &cur;
        cur = cur.apply_sigma(1);
    }
    let sk = witt_s(&x1, &one.constant(k));
    trace == one && galois_action(&sk, 1) == s1.wp()
}
