use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use ramify::artin_schreier::{independent_pair, reduce_k, WpDefect};
use ramify::classify::{ratio_string, serialize_ratio, ClassificationResult, GroupKind, SubgroupChoice};
use ramify::cp_ext::{reduce_lk, reduce_lk_oracle, CpExtension, ExtDefect};
use ramify::decomp::{decompose as split, recomposition_holds};
use ramify::field::{format_coeff, parse_series, FieldSpec, GaloisField, LaurentSeries};
use ramify::harness::{break_grid, check_pair, sweep_cell, SweepRow};
use ramify::sample::{engineered_minus_one, random_pair};
use ramify::{Error, Result};

use crate::render::{Document, Table};
use crate::{ClassifyArgs, DecomposeArgs, Failure, ReduceArgs, SelftestArgs, SweepArgs};

/// How many times an input written without `O(t^N)` is re-read at a larger
/// precision after an InsufficientPrecision error.
const PRECISION_RETRIES: u32 = 3;

fn next_precision(prec: i64) -> i64 {
    if prec < 1 {
        1
    } else {
        2 * prec
    }
}

/// Runs `f` on inputs parsed at `precision`, widening the precision on
/// InsufficientPrecision. Returns the result, the final precision and the
/// number of retries.
fn with_precision_retry<T>(precision: i64, mut f: impl FnMut(i64) -> Result<T>) -> Result<(T, i64, u32)> {
    let mut prec = precision;
    let mut retries = 0;
    loop {
        match f(prec) {
            Err(Error::InsufficientPrecision(_)) if retries < PRECISION_RETRIES => {
                prec = next_precision(prec);
                retries += 1;
            }
            other => return other.map(|v| (v, prec, retries)),
        }
    }
}

#[derive(Serialize)]
pub struct ClassifyDoc {
    command: &'static str,
    field: FieldSpec,
    precision: i64,
    precision_retries: u32,
    #[serde(flatten)]
    result: ClassificationResult,
}

impl Document for ClassifyDoc {
    fn table(&self) -> Table {
        let r = &self.result;
        let seq = |v: Vec<String>| v.join(", ");
        let mut t = Table::new(&["field", "value"]);
        t.row(["group", r.group.name()]);
        t.row(["q".into(), r.q.to_string()]);
        t.row(["choice", r.choice.name()]);
        t.row(["B", &ratio_string(&r.b_g)]);
        t.row(["bound branch", r.trace.bound_branch]);
        t.row(["ubar3", &ratio_string(&r.ubar3)]);
        t.row(["b3".into(), r.b3.map_or("none".into(), |b| b.to_string())]);
        t.row(["upper".into(), seq(r.sequence.upper.iter().map(ratio_string).collect())]);
        t.row(["lower".into(), seq(r.sequence.lower.iter().map(ToString::to_string).collect())]);
        t.row(["hasse-arf integral", if r.hasse_arf_integral { "yes" } else { "no" }]);
        for n in &r.trace.notes {
            t.row(["note", n.as_str()]);
        }
        t
    }

    fn csv(&self) -> Table {
        let r = &self.result;
        let mut t = Table::new(&[
            "group", "p", "q", "choice", "u1", "u2", "B", "ubar3", "u3", "b3", "l1", "l2", "l3", "integral",
        ]);
        t.row([
            r.group.name().to_string(),
            r.p.to_string(),
            r.q.to_string(),
            r.choice.name().to_string(),
            r.u1.to_string(),
            r.u2.to_string(),
            ratio_string(&r.b_g),
            ratio_string(&r.ubar3),
            ratio_string(&r.u3),
            r.b3.map_or(String::new(), |b| b.to_string()),
            r.sequence.lower[0].to_string(),
            r.sequence.lower[1].to_string(),
            r.sequence.lower[2].to_string(),
            r.hasse_arf_integral.to_string(),
        ]);
        t
    }
}

pub fn classify(a: &ClassifyArgs) -> std::result::Result<Box<dyn Document>, Failure> {
    let fld = a.common.field.field()?;
    let (result, precision, precision_retries) = with_precision_retry(a.common.precision, |prec| {
        let parse = |text: &str| parse_series(&fld, text, Some(prec));
        ramify::classify::classify(a.group, &parse(&a.beta1)?, &parse(&a.beta2)?, &parse(&a.kappa3)?, a.choice)
    })?;
    Ok(Box::new(ClassifyDoc { command: "classify", field: fld.spec().clone(), precision, precision_retries, result }))
}

#[derive(Serialize)]
pub struct ReduceKDoc {
    command: &'static str,
    field: FieldSpec,
    over: &'static str,
    input: String,
    reduced: String,
    df: WpDefect,
    #[serde(rename = "break")]
    break_value: Option<i64>,
}

impl Document for ReduceKDoc {
    fn table(&self) -> Table {
        let mut t = Table::new(&["field", "value"]);
        t.row(["input", &self.input]);
        t.row(["reduced", &self.reduced]);
        t.row(["df".into(), defect_string(self.df)]);
        t.row(["break".into(), self.break_value.map_or("none".into(), |b| b.to_string())]);
        t
    }

    fn csv(&self) -> Table {
        let mut t = Table::new(&["input", "reduced", "df", "break"]);
        t.row([
            self.input.clone(),
            self.reduced.clone(),
            defect_string(self.df),
            self.break_value.map_or(String::new(), |b| b.to_string()),
        ]);
        t
    }
}

fn defect_string(d: WpDefect) -> String {
    match d {
        WpDefect::Finite(v) => v.to_string(),
        WpDefect::Zero => "zero".into(),
        WpDefect::Infinite => "infinite".into(),
    }
}

fn ext_defect_string(d: ExtDefect) -> String {
    match d {
        ExtDefect::Finite(v) => v.to_string(),
        ExtDefect::Infinite => "infinite".into(),
    }
}

#[derive(Serialize)]
pub struct ReduceLDoc {
    command: &'static str,
    field: FieldSpec,
    over: &'static str,
    beta: String,
    input: Vec<String>,
    reduced: Vec<String>,
    df: ExtDefect,
    certified_by_congruence: bool,
    window: i64,
    rows: usize,
}

impl Document for ReduceLDoc {
    fn table(&self) -> Table {
        let mut t = Table::new(&["field", "value"]);
        t.row(["beta", &self.beta]);
        for (i, c) in self.input.iter().enumerate() {
            t.row([format!("input y^{i}"), c.clone()]);
        }
        for (i, c) in self.reduced.iter().enumerate() {
            t.row([format!("reduced y^{i}"), c.clone()]);
        }
        t.row(["df".into(), ext_defect_string(self.df)]);
        t.row(["certified by congruence", if self.certified_by_congruence { "yes" } else { "no" }]);
        t.row(["window".into(), self.window.to_string()]);
        t
    }

    fn csv(&self) -> Table {
        let mut t = Table::new(&["beta", "input", "reduced", "df", "certified_by_congruence", "window", "rows"]);
        t.row([
            self.beta.clone(),
            self.input.join(" | "),
            self.reduced.join(" | "),
            ext_defect_string(self.df),
            self.certified_by_congruence.to_string(),
            self.window.to_string(),
            self.rows.to_string(),
        ]);
        t
    }
}

pub fn reduce(a: &ReduceArgs) -> std::result::Result<Box<dyn Document>, Failure> {
    let fld = a.common.field.field()?;
    let spec = fld.spec().clone();
    if let Some(kappa) = &a.kappa {
        let ((input, red), _, _) = with_precision_retry(a.common.precision, |prec| {
            let k = parse_series(&fld, kappa, Some(prec))?;
            let red = reduce_k(&k)?;
            Ok((k, red))
        })?;
        return Ok(Box::new(ReduceKDoc {
            command: "reduce",
            field: spec,
            over: "K",
            input: input.to_string(),
            reduced: red.value.to_string(),
            df: red.df,
            break_value: red.break_value(),
        }));
    }
    let Some(beta) = &a.beta else {
        return Err(Failure::Usage(Error::Parse("reduce needs --kappa, or --beta with --ell".into())));
    };
    let ((ext, e, out), _, _) = with_precision_retry(a.common.precision, |prec| {
        let ext = CpExtension::new(&parse_series(&fld, beta, None)?)?;
        let coeffs = a.ell.iter().map(|c| parse_series(&fld, c, Some(prec))).collect::<Result<Vec<_>>>()?;
        if coeffs.len() > ext.p() as usize {
            return Err(Error::Parse(format!("at most p = {} coefficients for y^0..y^(p-1)", ext.p())));
        }
        let mut padded = coeffs;
        padded.resize(ext.p() as usize, LaurentSeries::exact_zero(&fld));
        let e = ext.element(padded);
        let out = match a.window {
            Some(w) => reduce_lk_oracle(&ext, &e, w)?,
            None => reduce_lk(&ext, &e)?,
        };
        Ok((ext, e, out))
    })?;
    Ok(Box::new(ReduceLDoc {
        command: "reduce",
        field: spec,
        over: "L",
        beta: ext.beta().to_string(),
        input: e.coeffs().iter().map(ToString::to_string).collect(),
        reduced: out.reduced.coeffs().iter().map(ToString::to_string).collect(),
        df: out.df,
        certified_by_congruence: out.certified_by_congruence,
        window: out.window,
        rows: out.rows,
    }))
}

#[derive(Serialize)]
pub struct DecomposeDoc {
    command: &'static str,
    field: FieldSpec,
    beta1: String,
    beta2: String,
    swapped_inputs: bool,
    renormalized_inputs: bool,
    u1: i64,
    u2: i64,
    mu: Vec<String>,
    r: Option<i64>,
    s: Option<i64>,
    t: Option<i64>,
    epsilon: Option<String>,
    e: Option<i64>,
    omega: Option<String>,
    m: Option<i64>,
    mu_last_is_minus_one: bool,
    recomposition_holds: bool,
}

fn opt(v: Option<i64>) -> String {
    v.map_or("none".into(), |x| x.to_string())
}

impl Document for DecomposeDoc {
    fn table(&self) -> Table {
        let mut t = Table::new(&["field", "value"]);
        t.row(["beta1", &self.beta1]);
        t.row(["beta2", &self.beta2]);
        t.row(["u1, u2".into(), format!("{}, {}", self.u1, self.u2)]);
        for (i, m) in self.mu.iter().enumerate() {
            t.row([format!("mu{i}"), m.clone()]);
        }
        t.row(["r".into(), opt(self.r)]);
        t.row(["s".into(), opt(self.s)]);
        t.row(["t".into(), opt(self.t)]);
        t.row(["e".into(), opt(self.e)]);
        if let Some(w) = &self.omega {
            t.row(["omega", w.as_str()]);
        }
        if self.m.is_some() {
            t.row(["m".into(), opt(self.m)]);
        }
        t.row(["mu_(p-1) = -1 mod M_K", if self.mu_last_is_minus_one { "yes" } else { "no" }]);
        t.row(["recomposition holds", if self.recomposition_holds { "yes" } else { "no" }]);
        t
    }

    fn csv(&self) -> Table {
        let mut t =
            Table::new(&["beta1", "beta2", "u1", "u2", "mu", "r", "s", "t", "e", "omega", "m", "mu_last_is_minus_one"]);
        let o = |v: Option<i64>| v.map_or(String::new(), |x| x.to_string());
        t.row([
            self.beta1.clone(),
            self.beta2.clone(),
            self.u1.to_string(),
            self.u2.to_string(),
            self.mu.join(" | "),
            o(self.r),
            o(self.s),
            o(self.t),
            o(self.e),
            self.omega.clone().unwrap_or_default(),
            o(self.m),
            self.mu_last_is_minus_one.to_string(),
        ]);
        t
    }
}

pub fn decompose(a: &DecomposeArgs) -> std::result::Result<Box<dyn Document>, Failure> {
    let fld = a.common.field.field()?;
    let ((pair, d), _, _) = with_precision_retry(a.common.precision, |prec| {
        let pair =
            independent_pair(&parse_series(&fld, &a.beta1, Some(prec))?, &parse_series(&fld, &a.beta2, Some(prec))?)?;
        let d = split(&pair.beta1.value, &pair.beta2.value)?;
        Ok((pair, d))
    })?;
    let (b1, b2) = (&pair.beta1.value, &pair.beta2.value);
    let holds = recomposition_holds(&d, b1, b2)?;
    Ok(Box::new(DecomposeDoc {
        command: "decompose",
        field: fld.spec().clone(),
        beta1: b1.to_string(),
        beta2: b2.to_string(),
        swapped_inputs: pair.swapped,
        renormalized_inputs: pair.renormalized,
        u1: d.u1,
        u2: d.u2,
        mu: d.mu.iter().map(ToString::to_string).collect(),
        r: d.r,
        s: d.s,
        t: d.t,
        epsilon: d.epsilon.as_ref().map(ToString::to_string),
        e: d.e,
        omega: d.omega.map(|w| format_coeff(&fld, w)),
        m: d.m,
        mu_last_is_minus_one: d.mu_last_is_minus_one,
        recomposition_holds: holds,
    }))
}

/// Seeded generator for one unit of work: the same seed and index always
/// give the same stream, whatever thread runs it.
fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

#[derive(Serialize, Default, Clone)]
pub struct SweepSummary {
    group: String,
    choice: String,
    instances: usize,
    integral: usize,
    nonintegral: usize,
    above_bound: usize,
    #[serde(serialize_with = "serialize_ratio")]
    max_u3: ramify::Rational64,
}

#[derive(Serialize)]
pub struct SweepDoc {
    command: &'static str,
    field: FieldSpec,
    seed: u64,
    max_break: i64,
    samples: u32,
    groups: Vec<GroupKind>,
    summary: Vec<SweepSummary>,
    rows: Vec<SweepRow>,
}

impl Document for SweepDoc {
    fn table(&self) -> Table {
        let mut t = Table::new(&["group", "choice", "instances", "integral u3", "nonintegral u3", "u3 > B", "max u3"]);
        for s in &self.summary {
            t.row([
                s.group.clone(),
                s.choice.clone(),
                s.instances.to_string(),
                s.integral.to_string(),
                s.nonintegral.to_string(),
                s.above_bound.to_string(),
                ratio_string(&s.max_u3),
            ]);
        }
        t
    }

    fn csv(&self) -> Table {
        let mut t = Table::new(&[
            "group", "choice", "p", "q", "u1", "u2", "sample", "B", "u3", "b3", "integral", "beta1", "beta2", "kappa3",
        ]);
        for r in &self.rows {
            t.row([
                r.group.name().to_string(),
                r.choice.name().to_string(),
                r.p.to_string(),
                r.q.to_string(),
                r.u1.to_string(),
                r.u2.to_string(),
                r.sample.to_string(),
                ratio_string(&r.b_g),
                ratio_string(&r.u3),
                r.b3.map_or(String::new(), |b| b.to_string()),
                r.integral.to_string(),
                r.beta1.clone(),
                r.beta2.clone(),
                r.kappa3.clone(),
            ]);
        }
        t
    }
}

pub fn sweep(a: &SweepArgs) -> std::result::Result<Box<dyn Document>, Failure> {
    let fld = a.common.field.field()?;
    let p = fld.characteristic();
    let groups: Vec<GroupKind> = match a.group {
        Some(g) => {
            g.check_characteristic(p)?;
            vec![g]
        }
        None => GroupKind::ALL.into_iter().filter(|g| g.valid_for(p)).collect(),
    };
    let cells: Vec<(i64, i64, u32)> = break_grid(&fld, a.max_break)
        .into_iter()
        .flat_map(|(u1, u2)| (0..a.samples).map(move |s| (u1, u2, s)))
        .collect();
    let results: Vec<Result<Vec<SweepRow>>> = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(u1, u2, sample))| sweep_cell(&mut stream(a.seed, i), &fld, &groups, u1, u2, sample))
        .collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    rows.sort();

    let mut summary: BTreeMap<(GroupKind, SubgroupChoice), SweepSummary> = BTreeMap::new();
    for r in &rows {
        let s = summary.entry((r.group, r.choice)).or_insert_with(|| SweepSummary {
            group: r.group.name().into(),
            choice: r.choice.name().into(),
            ..Default::default()
        });
        s.instances += 1;
        if r.integral {
            s.integral += 1;
        } else {
            s.nonintegral += 1;
        }
        if r.u3 > r.b_g {
            s.above_bound += 1;
        }
        s.max_u3 = s.max_u3.max(r.u3);
    }
    Ok(Box::new(SweepDoc {
        command: "sweep",
        field: fld.spec().clone(),
        seed: a.seed,
        max_break: a.max_break,
        samples: a.samples,
        groups,
        summary: summary.into_values().collect(),
        rows,
    }))
}

#[derive(Serialize)]
pub struct SelftestDoc {
    command: &'static str,
    field: FieldSpec,
    seed: u64,
    trials: usize,
    max_break: i64,
    checked: usize,
    engineered: usize,
    mu_last_is_minus_one: usize,
    agreements: BTreeMap<&'static str, usize>,
    failures: Vec<String>,
    errors: Vec<String>,
    passed: bool,
}

impl Document for SelftestDoc {
    fn table(&self) -> Table {
        let mut t = Table::new(&["check", "agreeing", "checked"]);
        for (k, v) in &self.agreements {
            t.row([k.to_string(), v.to_string(), self.checked.to_string()]);
        }
        t.row(["errors".into(), String::new(), self.errors.len().to_string()]);
        t.row(["result".into(), if self.passed { "pass" } else { "FAIL" }.into(), String::new()]);
        t
    }

    fn csv(&self) -> Table {
        let mut t = Table::new(&["p", "q", "seed", "checked", "engineered", "failures", "errors", "passed"]);
        t.row([
            self.field.p.to_string(),
            self.field.order().to_string(),
            self.seed.to_string(),
            self.checked.to_string(),
            self.engineered.to_string(),
            self.failures.len().to_string(),
            self.errors.len().to_string(),
            self.passed.to_string(),
        ]);
        t
    }

    fn passed(&self) -> bool {
        self.passed
    }
}

pub fn selftest(a: &SelftestArgs) -> std::result::Result<Box<dyn Document>, Failure> {
    let fld: GaloisField = a.common.field.field()?;
    if a.max_break < 2 {
        return Err(Failure::Usage(Error::Parse("--max-break must be at least 2".into())));
    }
    let engineered_trials = if fld.characteristic() > 2 { a.trials.div_ceil(10) } else { 0 };
    let checks: Vec<std::result::Result<ramify::harness::InstanceCheck, String>> = (0..a.trials + engineered_trials)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = stream(a.seed, i);
            let pair = if i < a.trials {
                random_pair(&mut rng, &fld, a.max_break)
            } else {
                match engineered_minus_one(&mut rng, &fld, a.max_break, 500) {
                    Ok(Some(pair)) => pair,
                    Ok(None) => return None,
                    Err(e) => return Some(Err(e.to_string())),
                }
            };
            Some(
                check_pair(&pair)
                    .map_err(|e| format!("beta1 = {}, beta2 = {}: {e}", pair.beta1.value, pair.beta2.value)),
            )
        })
        .collect();

    let mut agreements = BTreeMap::from([("df_beta2_y1", 0), ("df_dm_term", 0), ("parameters", 0), ("routes", 0)]);
    let mut failures = Vec::new();
    let mut errors = Vec::new();
    let mut checked = 0;
    let mut minus_one = 0;
    for c in checks {
        let c = match c {
            Ok(c) => c,
            Err(e) => {
                errors.push(e);
                continue;
            }
        };
        checked += 1;
        minus_one += c.mu_last_is_minus_one as usize;
        *agreements.get_mut("df_beta2_y1").unwrap() += c.beta2_y1_agrees() as usize;
        *agreements.get_mut("df_dm_term").unwrap() += c.dm_term_agrees() as usize;
        *agreements.get_mut("parameters").unwrap() += c.parameter_violations.is_empty() as usize;
        *agreements.get_mut("routes").unwrap() += c.routes_agree() as usize;
        failures.extend(c.describe_failure());
    }
    let passed = failures.is_empty() && errors.is_empty();
    Ok(Box::new(SelftestDoc {
        command: "selftest",
        field: fld.spec().clone(),
        seed: a.seed,
        trials: a.trials,
        max_break: a.max_break,
        checked,
        engineered: checked.saturating_sub(a.trials),
        mu_last_is_minus_one: minus_one,
        agreements,
        failures,
        errors,
        passed,
    }))
}
