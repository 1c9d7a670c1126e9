//! Upper and lower ramification breaks of the degree-`p^3` towers.
//!
//! Two independent encodings of the third upper break `ū_3` live here: the
//! case table for the lower bound `B_G` ([`bound_bg`]) and the ladder of
//! auxiliary `C_p`-breaks `t_0..t_4`, `s_0..s_4` ([`ubar3`]). They must agree.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Serialize, Serializer};

use crate::artin_schreier::{independent_pair, reduce_k, witt_s, PreparedPair, WpDefect};
use crate::cp_ext::{reduce_lk, CpExtension, ExtDefect};
use crate::decomp::{decompose, q8_prepare, DecompData, Q8Prep};
use crate::error::{Error, Result};
use crate::field::LaurentSeries;

pub fn serialize_ratio<S: Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&ratio_string(r))
}

fn serialize_ratios<S: Serializer>(rs: &[Rational64; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(rs.iter().map(ratio_string))
}

/// `7/3`, or `6` for integers.
pub fn ratio_string(r: &Rational64) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKind {
    Q8,
    D8,
    Heis,
    Mod,
}

impl GroupKind {
    pub const ALL: [GroupKind; 4] = [GroupKind::Q8, GroupKind::D8, GroupKind::Heis, GroupKind::Mod];

    pub fn name(self) -> &'static str {
        match self {
            GroupKind::Q8 => "q8",
            GroupKind::D8 => "d8",
            GroupKind::Heis => "heis",
            GroupKind::Mod => "mod",
        }
    }

    /// `Q8` and `D8` live in characteristic 2 and `Heis` in odd
    /// characteristic; `Mod` is allowed everywhere (it coincides with `D8`
    /// when `p = 2`).
    pub fn check_characteristic(self, p: u32) -> Result<()> {
        let expected = match self {
            GroupKind::Q8 | GroupKind::D8 if p != 2 => "p = 2",
            GroupKind::Heis if p == 2 => "p > 2",
            _ => return Ok(()),
        };
        Err(Error::WrongCharacteristic { expected: format!("{expected} for {}", self.name()), actual: p })
    }

    pub fn valid_for(self, p: u32) -> bool {
        self.check_characteristic(p).is_ok()
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "q8" | "q" | "quaternion" => Ok(GroupKind::Q8),
            "d8" | "d" | "dihedral" => Ok(GroupKind::D8),
            "heis" | "h" | "heisenberg" => Ok(GroupKind::Heis),
            "mod" | "m" | "modular" => Ok(GroupKind::Mod),
            _ => Err(Error::Parse(format!("unknown group {s:?} (expected q8, d8, heis or mod)"))),
        }
    }
}

/// Which subgroup is `G_{l_2}` when `u_1 < u_2`: `⟨σ_1⟩` (`Sigma1Full`) or
/// `⟨σ_1^p, σ_2⟩` (`Sigma1pSigma2`). Only `D8` and `Mod` are sensitive to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Default)]
pub enum SubgroupChoice {
    #[serde(rename = "sigma1")]
    Sigma1Full,
    #[default]
    #[serde(rename = "sigma1p-sigma2")]
    Sigma1pSigma2,
}

impl SubgroupChoice {
    pub const ALL: [SubgroupChoice; 2] = [SubgroupChoice::Sigma1Full, SubgroupChoice::Sigma1pSigma2];

    pub fn name(self) -> &'static str {
        match self {
            SubgroupChoice::Sigma1Full => "sigma1",
            SubgroupChoice::Sigma1pSigma2 => "sigma1p-sigma2",
        }
    }
}

impl FromStr for SubgroupChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sigma1" | "sigma1-full" => Ok(SubgroupChoice::Sigma1Full),
            "sigma1p-sigma2" | "sigma1p,sigma2" => Ok(SubgroupChoice::Sigma1pSigma2),
            _ => Err(Error::Parse(format!("unknown subgroup choice {s:?} (expected sigma1 or sigma1p-sigma2)"))),
        }
    }
}

fn swapped_case(g: GroupKind, u1: i64, u2: i64, choice: SubgroupChoice) -> bool {
    matches!(g, GroupKind::D8 | GroupKind::Mod) && u1 != u2 && choice == SubgroupChoice::Sigma1Full
}

/// `df_{K(y_1)/K}(β_2 y_1) = -max{ps + u_1, pr - (p-2)u_1}`.
pub fn df_beta2_y1(d: &DecompData) -> ExtDefect {
    let (p, u1) = (d.p as i64, d.u1);
    let cands = [d.s.map(|s| p * s + u1), d.r.map(|r| p * r - (p - 2) * u1)];
    ExtDefect::Finite(-cands.iter().flatten().max().copied().expect("β_2 is ramified"))
}

/// `df_{K(y_1)/K}(-β_2 y_1 + S(y_1, β_1))`, with the `μ_{p-1} ∈ -1 + M_K`
/// branch.
pub fn df_dm_term(d: &DecompData) -> ExtDefect {
    let (p, u1) = (d.p as i64, d.u1);
    let r_term = d.r.map(|r| p * r - (p - 2) * u1);
    let cands = if d.mu_last_is_minus_one {
        [Some((p * p - 2 * p + 2) * u1), d.t.map(|t| p * t + u1), r_term]
    } else {
        [Some((p * p - p + 1) * u1), d.s.map(|s| p * s + u1), r_term]
    };
    ExtDefect::Finite(-cands.iter().flatten().max().copied().unwrap())
}

/// Break of `M(z)/M` for `℘(z) = α ∈ L` reduced with `-df(α) = a`, where
/// `l` is the break of `M/L`. Above `l` it is `pa - (p-1)l`; below `l` the
/// subgroup fixing `M` carries the smaller lower break, so it is `a`.
pub fn lift_break(p: u32, a: i64, l: i64) -> Result<i64> {
    if a == l {
        return Err(Error::PreconditionViolated(format!("lift_break needs a != l, got a = l = {l}")));
    }
    if a < l {
        return Ok(a);
    }
    Ok(p as i64 * a - (p as i64 - 1) * l)
}

fn rat(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

fn max_present(cands: &[Option<Rational64>]) -> Result<Rational64> {
    cands
        .iter()
        .flatten()
        .max()
        .copied()
        .ok_or_else(|| Error::DegenerateTower("every candidate of the maximum is absent".into()))
}

/// `B_G` together with the name of the case that produced it.
pub fn bound_bg(
    g: GroupKind,
    d: &DecompData,
    prep: Option<&Q8Prep>,
    choice: SubgroupChoice,
) -> Result<(Rational64, &'static str)> {
    g.check_characteristic(d.p)?;
    let (p, u1, u2) = (d.p as i64, d.u1, d.u2);
    let over_p = |x: i64| Rational64::new(x, p);
    let s_plus = d.s.map(|s| rat(s + u1));
    let r_plus = d.r.map(|r| rat(r) + over_p(u1));
    Ok(match g {
        GroupKind::D8 if swapped_case(g, u1, u2, choice) => (rat(2 * u2), "d8: 2u2"),
        GroupKind::D8 => (rat(u1 + u2), "d8: u1+u2"),
        GroupKind::Heis => (max_present(&[s_plus, r_plus])?, "heis"),
        GroupKind::Mod if swapped_case(g, u1, u2, choice) => (rat(p * u2), "mod: pu2"),
        GroupKind::Mod if d.mu_last_is_minus_one => {
            let first = rat((p - 1) * u1) + over_p(u1);
            (max_present(&[Some(first), d.t.map(|t| rat(t + u1)), r_plus])?, "mod: mu_last = -1 mod M_K")
        }
        GroupKind::Mod => (max_present(&[Some(rat(p * u1)), s_plus, r_plus])?, "mod: generic"),
        GroupKind::Q8 => {
            let prep = prep.ok_or_else(|| Error::PreconditionViolated("Q8 needs the quaternion preparation".into()))?;
            if prep.m > 0 || prep.omega_cubed_is_one == Some(false) {
                (rat(2 * u2), "q8: 2u2")
            } else {
                let e_term = prep.e.map(|e| rat(2 * u1 - 2 * e));
                (max_present(&[Some(Rational64::new(3 * u1, 2)), e_term])?, "q8: omega^3 = 1")
            }
        }
    })
}

/// Breaks `t_0..t_4` of the auxiliary `C_p`-extensions; absent entries do
/// not apply to the instance (`t_3` when `𝔰_1 = 0`, `t_3, t_4` outside `Q8`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AuxBreaks {
    pub t: [Option<i64>; 5],
}

impl AuxBreaks {
    /// The closed-form values.
    pub fn closed_form(d: &DecompData, prep: Option<&Q8Prep>) -> Self {
        let p = d.p as i64;
        let neg = |x: ExtDefect| x.finite().map(|v| -v);
        AuxBreaks {
            t: [
                neg(df_beta2_y1(d)),
                neg(df_dm_term(d)),
                Some((p * p - p + 1) * d.u2),
                prep.and_then(|q| q.v_s1.map(|v| -v)),
                prep.map(|q| -q.v_s2),
            ],
        }
    }

    /// `t_0`, `t_1`, `t_2` and `t_3` from the elimination oracle; `t_4` is an
    /// `M`-level quantity and keeps its closed form.
    pub fn from_oracle(pair: &PreparedPair, d: &DecompData, prep: Option<&Q8Prep>) -> Result<Self> {
        let neg = |x: ExtDefect| x.finite().map(|v| -v);
        let l1 = CpExtension::new(&pair.beta1.value)?;
        let y1 = l1.y();
        let b2y1 = l1.from_k(&pair.beta2.value) * y1.clone();
        let t0 = neg(reduce_lk(&l1, &b2y1)?.df);
        let dm = &witt_s(&y1, &l1.from_k(&pair.beta1.value)) - &b2y1;
        let t1 = neg(reduce_lk(&l1, &dm)?.df);
        let l2 = CpExtension::new(&pair.beta2.value)?;
        let y2 = l2.y();
        let t2 = neg(reduce_lk(&l2, &witt_s(&y2, &l2.from_k(&pair.beta2.value)))?.df);
        let t3 = match prep {
            Some(q) if !q.s1.is_zero() => neg(reduce_lk(q.s1.extension(), &q.s1)?.df),
            _ => None,
        };
        let mut t = Self::closed_form(d, prep).t;
        t[..4].copy_from_slice(&[t0, t1, t2, t3]);
        Ok(AuxBreaks { t })
    }
}

/// The ladder computation of `ū_3`.
#[derive(Debug, Clone, Serialize)]
pub struct Ladder {
    pub l2: i64,
    pub t: [Option<i64>; 5],
    pub s: [Option<i64>; 5],
    /// Lower break of `M(x̄_3)/M`.
    pub l3bar: i64,
    #[serde(serialize_with = "serialize_ratio")]
    pub ubar3: Rational64,
    pub selected: &'static str,
}

/// `ū_3` via the auxiliary breaks: `s_i = p t_i - (p-1) l_2` (`i = 0, 1, 3`),
/// `s_2 = p t_2 - (p-1) u_1`, `s_4 = t_4`, then `ū_3 = u_2 + (l̄_3 - l_2)/p^2`.
pub fn ubar3(g: GroupKind, d: &DecompData, aux: &AuxBreaks, choice: SubgroupChoice) -> Result<Ladder> {
    g.check_characteristic(d.p)?;
    let (p, u1, u2) = (d.p, d.u1, d.u2);
    let l2 = p as i64 * u2 - (p as i64 - 1) * u1;
    let t = aux.t;
    let lift = |ti: Option<i64>, l: i64| ti.map(|a| lift_break(p, a, l)).transpose();
    let missing = |i: usize| Error::PreconditionViolated(format!("auxiliary break t_{i} is not available"));
    let s0 = lift(t[0], l2);
    let s1 = lift(t[1], l2);
    let s2 = lift(t[2], u1);
    let s3 = lift(t[3], l2);
    let s4 = Ok(t[4]);

    let (l3bar, selected) = match g {
        GroupKind::Heis => (s0.clone()?.ok_or_else(|| missing(0))?, "s0"),
        GroupKind::D8 | GroupKind::Mod if swapped_case(g, u1, u2, choice) => {
            let a = s0.clone()?.ok_or_else(|| missing(0))?;
            let b = s2.clone()?.ok_or_else(|| missing(2))?;
            (a.max(b), if a > b { "max(s0, s2) = s0" } else { "max(s0, s2) = s2" })
        }
        GroupKind::D8 | GroupKind::Mod => (s1.clone()?.ok_or_else(|| missing(1))?, "s1"),
        GroupKind::Q8 => {
            let b = s4.clone()?.ok_or_else(|| missing(4))?;
            match s3.clone()? {
                None => (b, "s4 (L-part of the S-term vanishes)"),
                Some(a) if a > b => (a, "max(s3, s4) = s3"),
                Some(_) => (b, "max(s3, s4) = s4"),
            }
        }
    };
    let p2 = (p * p) as i64;
    let ubar3 = rat(u2) + Rational64::new(l3bar - l2, p2);
    let s = [s0.ok().flatten(), s1.ok().flatten(), s2.ok().flatten(), s3.ok().flatten(), s4.ok().flatten()];
    Ok(Ladder { l2, t, s, l3bar, ubar3, selected })
}

/// Upper and lower breaks `u_1 <= u_2 <= u_3`, `l_1 <= l_2 <= l_3`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BreakSequence {
    #[serde(serialize_with = "serialize_ratios")]
    pub upper: [Rational64; 3],
    pub lower: [i64; 3],
}

/// `l_1 = u_1`, `l_i - l_{i-1} = p^{i-1}(u_i - u_{i-1})`; each `l_i` must be a
/// positive integer prime to `p`.
pub fn upper_to_lower(p: u32, upper: [Rational64; 3]) -> Result<[i64; 3]> {
    if upper[0] > upper[1] || upper[1] > upper[2] {
        return Err(Error::PreconditionViolated(format!(
            "upper breaks must increase: {}",
            upper.iter().map(ratio_string).collect::<Vec<_>>().join(", ")
        )));
    }
    let p = p as i64;
    let mut lower = [Rational64::zero(); 3];
    lower[0] = upper[0];
    let mut scale = 1;
    for i in 1..3 {
        scale *= p;
        lower[i] = lower[i - 1] + (upper[i] - upper[i - 1]) * rat(scale);
    }
    let mut out = [0; 3];
    for (slot, l) in out.iter_mut().zip(lower) {
        if !l.is_integer() || l <= Rational64::zero() || l.to_integer().is_multiple_of(&p) {
            return Err(Error::NonIntegralLower(format!(
                "lower break {} is not a positive integer prime to p = {p}",
                ratio_string(&l)
            )));
        }
        *slot = l.to_integer();
    }
    Ok(out)
}

pub fn lower_to_upper(p: u32, lower: [i64; 3]) -> [Rational64; 3] {
    let p = p as i64;
    let mut upper = [Rational64::zero(); 3];
    upper[0] = rat(lower[0]);
    let mut scale = 1;
    for i in 1..3 {
        scale *= p;
        upper[i] = upper[i - 1] + Rational64::new(lower[i] - lower[i - 1], scale);
    }
    upper
}

/// Result of combining `ū_3` with the break of `κ_3`.
#[derive(Debug, Clone, Serialize)]
pub struct Composition {
    #[serde(serialize_with = "serialize_ratio")]
    pub u3: Rational64,
    pub b3: Option<i64>,
    pub kappa3_reduced: String,
    pub kappa3_df: WpDefect,
    pub sequence: BreakSequence,
    pub notes: Vec<String>,
}

/// `u_3 = max(ū_3, b_3)`, where `b_3` is the break of `κ_3` if ramified.
pub fn compose_with_kappa3(p: u32, u1: i64, u2: i64, ubar3: Rational64, kappa3: &LaurentSeries) -> Result<Composition> {
    let red = reduce_k(kappa3)?;
    let mut notes = Vec::new();
    if !red.value.terms().eq(kappa3.terms()) {
        notes.push(format!("kappa3 auto-reduced from {kappa3} to {}", red.value));
    }
    let b3 = red.break_value();
    match red.df {
        WpDefect::Zero => notes.push("kappa3 is unramified; it does not contribute a break".into()),
        WpDefect::Infinite => notes.push("kappa3 lies in K^wp; it does not contribute a break".into()),
        WpDefect::Finite(_) => {}
    }
    let u3 = match b3 {
        Some(b) if rat(b) == ubar3 => {
            return Err(Error::DegenerateTower(format!("b3 = {b} coincides with ubar3")));
        }
        Some(b) => ubar3.max(rat(b)),
        None => ubar3,
    };
    let upper = [rat(u1), rat(u2), u3];
    let lower = upper_to_lower(p, upper)?;
    Ok(Composition {
        u3,
        b3,
        kappa3_reduced: red.value.to_string(),
        kappa3_df: red.df,
        sequence: BreakSequence { upper, lower },
        notes,
    })
}

/// Parameters of the decomposition, as recorded in the trace.
#[derive(Debug, Clone, Serialize)]
pub struct ParamTrace {
    pub r: Option<i64>,
    pub s: Option<i64>,
    pub t: Option<i64>,
    pub e: Option<i64>,
    pub m: Option<i64>,
    pub omega: Option<String>,
    pub mu: Vec<String>,
    pub mu_last_is_minus_one: bool,
}

impl ParamTrace {
    fn new(d: &DecompData, prep: Option<&Q8Prep>) -> Self {
        let fld = d.mu[0].field();
        let e = prep.map_or(d.e, |q| q.e);
        ParamTrace {
            r: d.r,
            s: d.s,
            t: d.t,
            e,
            m: d.m,
            omega: d.omega.map(|w| crate::field::format_coeff(fld, w)),
            mu: d.mu.iter().map(ToString::to_string).collect(),
            mu_last_is_minus_one: d.mu_last_is_minus_one,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Trace {
    pub bound_branch: &'static str,
    pub swapped_inputs: bool,
    pub renormalized_inputs: bool,
    pub beta1: String,
    pub beta2: String,
    pub params: ParamTrace,
    pub ladder: Ladder,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassificationResult {
    pub group: GroupKind,
    pub p: u32,
    pub q: u32,
    pub choice: SubgroupChoice,
    pub u1: i64,
    pub u2: i64,
    #[serde(rename = "B", serialize_with = "serialize_ratio")]
    pub b_g: Rational64,
    #[serde(serialize_with = "serialize_ratio")]
    pub ubar3: Rational64,
    #[serde(serialize_with = "serialize_ratio")]
    pub u3: Rational64,
    pub b3: Option<i64>,
    pub sequence: BreakSequence,
    pub hasse_arf_integral: bool,
    pub trace: Trace,
}

/// Everything [`classify`] derives from `(β_1, β_2)` before `κ_3` enters.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub pair: PreparedPair,
    pub decomposition: DecompData,
    pub q8: Option<Q8Prep>,
}

pub fn prepare(g: GroupKind, beta1: &LaurentSeries, beta2: &LaurentSeries) -> Result<Prepared> {
    g.check_characteristic(beta1.characteristic())?;
    let pair = independent_pair(beta1, beta2)?;
    let decomposition = decompose(&pair.beta1.value, &pair.beta2.value)?;
    let q8 = match g {
        GroupKind::Q8 => Some(q8_prepare(&pair.beta1.value, &pair.beta2.value)?),
        _ => None,
    };
    Ok(Prepared { pair, decomposition, q8 })
}

/// The full pipeline: independence and ordering, decomposition, `B_G` and
/// the ladder (which must agree), then composition with `κ_3`.
pub fn classify(
    g: GroupKind,
    beta1: &LaurentSeries,
    beta2: &LaurentSeries,
    kappa3: &LaurentSeries,
    choice: SubgroupChoice,
) -> Result<ClassificationResult> {
    let prep = prepare(g, beta1, beta2)?;
    classify_prepared(g, &prep, &AuxBreaks::closed_form(&prep.decomposition, prep.q8.as_ref()), kappa3, choice)
}

pub fn classify_prepared(
    g: GroupKind,
    prep: &Prepared,
    aux: &AuxBreaks,
    kappa3: &LaurentSeries,
    choice: SubgroupChoice,
) -> Result<ClassificationResult> {
    let d = &prep.decomposition;
    let (p, u1, u2) = (d.p, d.u1, d.u2);
    let (b_g, bound_branch) = bound_bg(g, d, prep.q8.as_ref(), choice)?;
    let ladder = ubar3(g, d, aux, choice)?;
    if ladder.ubar3 != b_g {
        return Err(Error::PreconditionViolated(format!(
            "case table gives B = {} but the ladder gives {}",
            ratio_string(&b_g),
            ratio_string(&ladder.ubar3)
        )));
    }
    let comp = compose_with_kappa3(p, u1, u2, ladder.ubar3, kappa3)?;
    let mut notes = comp.notes.clone();
    if u1 == u2 && matches!(g, GroupKind::D8 | GroupKind::Mod) {
        notes.push("u1 = u2: the subgroup choice does not apply".into());
    }
    if let Some(q) = &prep.q8 {
        if q.epsilon_truncated {
            notes.push("epsilon dropped since v(epsilon) >= u1/2; e treated as absent".into());
        }
    }
    Ok(ClassificationResult {
        group: g,
        p,
        q: d.mu[0].field().order(),
        choice,
        u1,
        u2,
        b_g,
        ubar3: ladder.ubar3,
        u3: comp.u3,
        b3: comp.b3,
        hasse_arf_integral: comp.u3.is_integer(),
        sequence: comp.sequence,
        trace: Trace {
            bound_branch,
            swapped_inputs: prep.pair.swapped,
            renormalized_inputs: prep.pair.renormalized,
            beta1: prep.pair.beta1.value.to_string(),
            beta2: prep.pair.beta2.value.to_string(),
            params: ParamTrace::new(d, prep.q8.as_ref()),
            ladder,
            notes,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{parse_series, GaloisField};

    fn s(fld: &GaloisField, text: &str) -> LaurentSeries {
        parse_series(fld, text, None).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn run(p: u32, f: u32, g: GroupKind, b1: &str, b2: &str, k3: &str, choice: SubgroupChoice) -> ClassificationResult {
        let fld = GaloisField::of_order(p, f).unwrap();
        classify(g, &s(&fld, b1), &s(&fld, b2), &s(&fld, k3), choice).unwrap()
    }

    #[test]
    fn heisenberg_example() {
        let res = run(3, 1, GroupKind::Heis, "t^-1", "t^-5", "0", SubgroupChoice::default());
        assert_eq!(res.b_g, r(6, 1));
        assert_eq!(res.sequence.upper, [r(1, 1), r(5, 1), r(6, 1)]);
        assert_eq!(res.sequence.lower, [1, 13, 22]);
        assert_eq!(res.trace.ladder.t[0], Some(16));
        assert_eq!(res.trace.ladder.l3bar, 22);
    }

    #[test]
    fn nonintegral_witnesses() {
        let res = run(3, 1, GroupKind::Mod, "t^-1", "2*t^-2", "0", SubgroupChoice::default());
        assert_eq!(res.u3, r(7, 3));
        assert!(!res.hasse_arf_integral);
        assert_eq!(res.sequence.lower, [1, 4, 7]);

        let res = run(2, 2, GroupKind::Q8, "t^-1", "g^2*t^-1", "0", SubgroupChoice::default());
        assert_eq!(res.u3, r(3, 2));
        assert!(!res.hasse_arf_integral);
    }

    #[test]
    fn dihedral_cases() {
        let res = run(2, 1, GroupKind::D8, "t^-1", "t^-3", "t^-5", SubgroupChoice::Sigma1pSigma2);
        assert_eq!((res.b_g, res.u3, res.b3), (r(4, 1), r(5, 1), Some(5)));
        assert!(res.hasse_arf_integral);
        let res = run(2, 1, GroupKind::D8, "t^-1", "t^-3", "0", SubgroupChoice::Sigma1Full);
        assert_eq!(res.b_g, r(6, 1));
        let res = run(2, 1, GroupKind::Mod, "t^-1", "t^-3", "0", SubgroupChoice::Sigma1Full);
        assert_eq!(res.b_g, r(6, 1));
    }

    #[test]
    fn closed_form_df_values() {
        let f3 = GaloisField::of_order(3, 1).unwrap();
        let d = |b2: &str| decompose(&s(&f3, "t^-1"), &s(&f3, b2)).unwrap();
        assert_eq!(df_beta2_y1(&d("t^-5")), ExtDefect::Finite(-16));
        assert_eq!(df_beta2_y1(&d("t^-4")), ExtDefect::Finite(-11));
        assert_eq!(df_dm_term(&d("2*t^-2")), ExtDefect::Finite(-5));
        assert_eq!(df_dm_term(&d("t^-5")), ExtDefect::Finite(-16));
        let f2 = GaloisField::of_order(2, 1).unwrap();
        let d2 = decompose(&s(&f2, "t^-1"), &s(&f2, "t^-3")).unwrap();
        assert_eq!(df_beta2_y1(&d2), ExtDefect::Finite(-7));
        assert_eq!(df_dm_term(&d2), ExtDefect::Finite(-7));
    }

    #[test]
    fn oracle_backs_the_closed_forms_on_examples() {
        for (p, f, b1, b2) in
            [(3, 1, "t^-1", "t^-5"), (3, 1, "t^-1", "2*t^-2"), (2, 1, "t^-1", "t^-3"), (2, 2, "t^-1", "g^2*t^-1")]
        {
            let fld = GaloisField::of_order(p, f).unwrap();
            let g = if p == 2 { GroupKind::Q8 } else { GroupKind::Mod };
            let prep = prepare(g, &s(&fld, b1), &s(&fld, b2)).unwrap();
            let closed = AuxBreaks::closed_form(&prep.decomposition, prep.q8.as_ref());
            let oracle = AuxBreaks::from_oracle(&prep.pair, &prep.decomposition, prep.q8.as_ref()).unwrap();
            for i in [0, 1, 2, 4] {
                assert_eq!(closed.t[i], oracle.t[i], "t_{i}, p = {p}, beta2 = {b2}");
            }
            // 𝔰_1 can sit deeper than its valuation suggests, never shallower.
            assert!(oracle.t[3] <= closed.t[3]);
            let choice = SubgroupChoice::default();
            let a = ubar3(g, &prep.decomposition, &closed, choice).unwrap().ubar3;
            let b = ubar3(g, &prep.decomposition, &oracle, choice).unwrap().ubar3;
            assert_eq!(a, b, "p = {p}, beta2 = {b2}");
        }
    }

    #[test]
    fn lift_and_conversions() {
        assert_eq!(lift_break(3, 5, 4).unwrap(), 7);
        assert_eq!(lift_break(2, 7, 5).unwrap(), 9);
        assert!(lift_break(3, 4, 4).is_err());
        assert_eq!(lift_break(2, 3, 5).unwrap(), 3);
        assert_eq!(upper_to_lower(2, [r(1, 1), r(3, 1), r(11, 1)]).unwrap(), [1, 5, 37]);
        assert_eq!(upper_to_lower(5, [r(7, 1), r(7, 1), r(7, 1)]).unwrap(), [7, 7, 7]);
        assert_eq!(upper_to_lower(3, [r(1, 1), r(5, 1), r(6, 1)]).unwrap(), [1, 13, 22]);
        assert!(matches!(upper_to_lower(3, [r(1, 1), r(5, 1), r(11, 2)]), Err(Error::NonIntegralLower(_))));
        assert_eq!(lower_to_upper(3, [1, 13, 22]), [r(1, 1), r(5, 1), r(6, 1)]);
    }

    #[test]
    fn kappa3_composition() {
        let f3 = GaloisField::of_order(3, 1).unwrap();
        let c = compose_with_kappa3(3, 1, 2, r(7, 3), &s(&f3, "t^-3 + t^-1")).unwrap();
        assert_eq!(c.u3, r(7, 3));
        assert!(!c.notes.is_empty(), "reduction of t^-3 is logged");
        let c = compose_with_kappa3(3, 1, 2, r(7, 3), &s(&f3, "t^-4")).unwrap();
        assert_eq!((c.u3, c.b3), (r(4, 1), Some(4)));
        let f2 = GaloisField::of_order(2, 1).unwrap();
        let c = compose_with_kappa3(2, 1, 3, r(4, 1), &s(&f2, "t^2 + 1")).unwrap();
        assert_eq!((c.u3, c.b3), (r(4, 1), None));
    }

    #[test]
    fn group_characteristic_rules() {
        assert!(GroupKind::Mod.valid_for(2));
        assert!(!GroupKind::Heis.valid_for(2));
        assert!(!GroupKind::Q8.valid_for(3));
        assert_eq!("Heis".parse::<GroupKind>().unwrap(), GroupKind::Heis);
    }
}
