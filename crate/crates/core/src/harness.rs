//! Cross-checks of the closed forms against the elimination oracle, and
//! the per-cell work of a parameter sweep.

use num_rational::Rational64;
use rand::Rng;
use serde::Serialize;

use crate::artin_schreier::{independent_pair, PreparedPair};
use crate::classify::{
    bound_bg, classify_prepared, df_beta2_y1, df_dm_term, ratio_string, serialize_ratio, ubar3, AuxBreaks, GroupKind,
    Prepared, SubgroupChoice,
};
use crate::cp_ext::ExtDefect;
use crate::decomp::{decompose, q8_prepare, DecompData};
use crate::error::{Error, Result};
use crate::field::{GaloisField, LaurentSeries};
use crate::sample::{random_break, random_reduced};

/// The decomposition-parameter invariants: `s ≡ -u_1`, `r ≢ 0, -u_1`
/// (mod `p`) and `u_2 = max(r, s)`. Returns the violated ones.
pub fn parameter_violations(d: &DecompData) -> Vec<String> {
    let p = d.p as i64;
    let mut out = Vec::new();
    if let Some(s) = d.s {
        if (s + d.u1).rem_euclid(p) != 0 {
            out.push(format!("s = {s} is not -u1 mod {p}"));
        }
    }
    if let Some(r) = d.r {
        if r.rem_euclid(p) == 0 || (r + d.u1).rem_euclid(p) == 0 {
            out.push(format!("r = {r} is 0 or -u1 mod {p}"));
        }
    }
    let top = d.r.into_iter().chain(d.s).max();
    if top != Some(d.u2) {
        out.push(format!("max(r, s) = {top:?} differs from u2 = {}", d.u2));
    }
    out
}

/// Both routes to `ū_3` for one group and subgroup choice.
#[derive(Debug, Clone, Serialize)]
pub struct RouteCheck {
    pub group: GroupKind,
    pub choice: SubgroupChoice,
    #[serde(rename = "B", serialize_with = "serialize_ratio")]
    pub bound: Rational64,
    #[serde(serialize_with = "serialize_ratio")]
    pub ladder_closed_form: Rational64,
    #[serde(serialize_with = "serialize_ratio")]
    pub ladder_oracle: Rational64,
}

impl RouteCheck {
    pub fn agrees(&self) -> bool {
        self.bound == self.ladder_closed_form && self.bound == self.ladder_oracle
    }
}

/// Closed form against oracle for one pair `(β_1, β_2)`.
#[derive(Debug, Clone, Serialize)]
pub struct InstanceCheck {
    pub p: u32,
    pub q: u32,
    pub u1: i64,
    pub u2: i64,
    pub beta1: String,
    pub beta2: String,
    pub mu_last_is_minus_one: bool,
    pub df_beta2_y1: [ExtDefect; 2],
    pub df_dm_term: [ExtDefect; 2],
    pub parameter_violations: Vec<String>,
    pub routes: Vec<RouteCheck>,
}

impl InstanceCheck {
    pub fn beta2_y1_agrees(&self) -> bool {
        self.df_beta2_y1[0] == self.df_beta2_y1[1]
    }

    pub fn dm_term_agrees(&self) -> bool {
        self.df_dm_term[0] == self.df_dm_term[1]
    }

    pub fn routes_agree(&self) -> bool {
        self.routes.iter().all(RouteCheck::agrees)
    }

    pub fn passed(&self) -> bool {
        self.beta2_y1_agrees() && self.dm_term_agrees() && self.parameter_violations.is_empty() && self.routes_agree()
    }

    /// One line naming what failed, for reports.
    pub fn describe_failure(&self) -> Option<String> {
        let mut parts = Vec::new();
        if !self.beta2_y1_agrees() {
            parts.push(format!("df(beta2*y1) closed {:?} oracle {:?}", self.df_beta2_y1[0], self.df_beta2_y1[1]));
        }
        if !self.dm_term_agrees() {
            parts.push(format!("df(S - beta2*y1) closed {:?} oracle {:?}", self.df_dm_term[0], self.df_dm_term[1]));
        }
        parts.extend(self.parameter_violations.iter().cloned());
        for r in self.routes.iter().filter(|r| !r.agrees()) {
            parts.push(format!(
                "{} {}: B = {}, ladder {} / {}",
                r.group,
                r.choice.name(),
                ratio_string(&r.bound),
                ratio_string(&r.ladder_closed_form),
                ratio_string(&r.ladder_oracle)
            ));
        }
        if parts.is_empty() {
            None
        } else {
            Some(format!("p = {}, beta1 = {}, beta2 = {}: {}", self.p, self.beta1, self.beta2, parts.join("; ")))
        }
    }
}

/// Runs every cross-check on a prepared pair, over each group valid in
/// this characteristic and both subgroup choices.
pub fn check_pair(pair: &PreparedPair) -> Result<InstanceCheck> {
    let (b1, b2) = (&pair.beta1.value, &pair.beta2.value);
    let p = b1.characteristic();
    let d = decompose(b1, b2)?;
    let groups: Vec<GroupKind> = GroupKind::ALL.into_iter().filter(|g| g.valid_for(p)).collect();
    let q8 = if p == 2 { Some(q8_prepare(b1, b2)?) } else { None };

    let closed = AuxBreaks::closed_form(&d, q8.as_ref());
    let oracle = AuxBreaks::from_oracle(pair, &d, q8.as_ref())?;
    let as_defect = |t: Option<i64>| t.map_or(ExtDefect::Infinite, |v| ExtDefect::Finite(-v));

    let mut routes = Vec::new();
    for g in groups {
        let q = if g == GroupKind::Q8 { q8.as_ref() } else { None };
        for choice in SubgroupChoice::ALL {
            let (bound, _) = bound_bg(g, &d, q, choice)?;
            routes.push(RouteCheck {
                group: g,
                choice,
                bound,
                ladder_closed_form: ubar3(g, &d, &closed, choice)?.ubar3,
                ladder_oracle: ubar3(g, &d, &oracle, choice)?.ubar3,
            });
        }
    }

    Ok(InstanceCheck {
        p,
        q: b1.field().order(),
        u1: d.u1,
        u2: d.u2,
        beta1: b1.to_string(),
        beta2: b2.to_string(),
        mu_last_is_minus_one: d.mu_last_is_minus_one,
        df_beta2_y1: [df_beta2_y1(&d), as_defect(oracle.t[0])],
        df_dm_term: [df_dm_term(&d), as_defect(oracle.t[1])],
        parameter_violations: parameter_violations(&d),
        routes,
    })
}

/// A pair of reduced generators with exactly the breaks `u_1 <= u_2`.
pub fn pair_with_breaks<R: Rng + ?Sized>(rng: &mut R, fld: &GaloisField, u1: i64, u2: i64) -> Result<PreparedPair> {
    let p = fld.characteristic() as i64;
    if u1 > u2 || u1 % p == 0 || u2 % p == 0 || u1 < 1 {
        return Err(Error::PreconditionViolated(format!("no pair with breaks ({u1}, {u2}) for p = {p}")));
    }
    for _ in 0..1000 {
        let density = rng.gen_range(0.2..0.8);
        let b1 = random_reduced(rng, fld, u1, density);
        let b2 = random_reduced(rng, fld, u2, density);
        if let Ok(pair) = independent_pair(&b1, &b2) {
            if pair.u1() == u1 && pair.u2() == u2 {
                return Ok(pair);
            }
        }
    }
    Err(Error::DependentGenerators(format!("no independent pair with breaks ({u1}, {u2}) found")))
}

/// One classified sweep instance.
#[derive(Debug, Clone, Serialize, PartialEq, Eq, PartialOrd, Ord)]
pub struct SweepRow {
    pub p: u32,
    pub q: u32,
    pub group: GroupKind,
    pub choice: SubgroupChoice,
    pub u1: i64,
    pub u2: i64,
    pub sample: u32,
    #[serde(rename = "B", serialize_with = "serialize_ratio")]
    pub b_g: Rational64,
    #[serde(serialize_with = "serialize_ratio")]
    pub u3: Rational64,
    pub b3: Option<i64>,
    pub integral: bool,
    pub beta1: String,
    pub beta2: String,
    pub kappa3: String,
    /// How often `κ_3` was redrawn because its break hit `ū_3`.
    pub kappa3_redraws: u32,
}

/// A random `κ_3`: zero a third of the time, otherwise reduced with a
/// break up to `max_break`.
pub fn random_kappa3<R: Rng + ?Sized>(rng: &mut R, fld: &GaloisField, max_break: i64) -> LaurentSeries {
    if rng.gen_range(0..3) == 0 {
        LaurentSeries::exact_zero(fld)
    } else {
        let b = random_break(rng, fld.characteristic(), 1, max_break);
        random_reduced(rng, fld, b, 0.3)
    }
}

/// Classifies one random instance with breaks `(u_1, u_2)` for every valid
/// group and both subgroup choices. A `κ_3` whose break lands on `ū_3` is
/// redrawn.
pub fn sweep_cell<R: Rng + ?Sized>(
    rng: &mut R,
    fld: &GaloisField,
    groups: &[GroupKind],
    u1: i64,
    u2: i64,
    sample: u32,
) -> Result<Vec<SweepRow>> {
    let pair = pair_with_breaks(rng, fld, u1, u2)?;
    let (b1, b2) = (&pair.beta1.value, &pair.beta2.value);
    let d = decompose(b1, b2)?;
    let p = fld.characteristic();
    let mut rows = Vec::new();
    for &g in groups.iter().filter(|g| g.valid_for(p)) {
        let q8 = if g == GroupKind::Q8 { Some(q8_prepare(b1, b2)?) } else { None };
        let prep = Prepared { pair: pair.clone(), decomposition: d.clone(), q8 };
        let aux = AuxBreaks::closed_form(&prep.decomposition, prep.q8.as_ref());
        for choice in SubgroupChoice::ALL {
            let mut attempt = 0;
            let res = loop {
                let k3 = random_kappa3(rng, fld, 4 * u2);
                match classify_prepared(g, &prep, &aux, &k3, choice) {
                    Err(Error::DegenerateTower(_)) if attempt < 20 => attempt += 1,
                    other => break other.map(|r| (r, k3)),
                }
            }?;
            let (r, k3) = res;
            rows.push(SweepRow {
                p,
                q: fld.order(),
                group: g,
                choice,
                u1,
                u2,
                sample,
                b_g: r.b_g,
                u3: r.u3,
                b3: r.b3,
                integral: r.hasse_arf_integral,
                beta1: b1.to_string(),
                beta2: b2.to_string(),
                kappa3: k3.to_string(),
                kappa3_redraws: attempt,
            });
        }
    }
    Ok(rows)
}

/// The `(u_1, u_2)` grid with `u_1 <= u_2 <= max_break`, both prime to `p`.
/// Equal breaks need leading coefficients independent over `F_p`, so the
/// diagonal is left out over the prime field.
pub fn break_grid(fld: &GaloisField, max_break: i64) -> Vec<(i64, i64)> {
    let p = fld.characteristic() as i64;
    let ok = |u: &i64| u % p != 0;
    let mut out = Vec::new();
    for u2 in (1..=max_break).filter(ok) {
        for u1 in (1..=u2).filter(ok) {
            if u1 < u2 || fld.degree() > 1 {
                out.push((u1, u2));
            }
        }
    }
    out
}
