use std::fmt::Write as _;

use anyhow::anyhow;
use majorize_core::catalysis::{find_catalytic_n, find_large_sample_n, SearchOptions};
use majorize_core::certify::{
    certify_dichotomy_exact, certify_dominating, certify_general_dichotomy_asymptotic, certify_minimal,
    certify_minimal_asymptotic, Check,
};
use majorize_core::grid::simplex_grid;
use majorize_core::io::{experiment_to_csv, experiment_to_json_value};
use majorize_core::monotone::{multivar_divergence, phi_at, renyi};
use majorize_core::report::{format_float, to_canonical_json};
use majorize_core::thermal::{thermal_check, Answer, ThermalSystem};
use majorize_core::universal::{
    classify_dominating, classify_minimal, homomorphism_criterion_dominating, homomorphism_criterion_minimal,
};
use majorize_core::{majorizes, CertReport, Error, Experiment, GridSpec, LpOptions, Verdict};
use serde_json::{json, Value};

use crate::input::{load_experiment, read_text};
use crate::{DivergenceKind, Format, KindArg, ModeArg, RegimeArg};

/// An error together with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn usage(msg: impl Into<String>) -> Self {
        Failure { code: 64, error: anyhow!(msg.into()) }
    }

    pub fn data(msg: impl Into<String>) -> Self {
        Failure { code: 65, error: anyhow!(msg.into()) }
    }

    pub fn missing(error: anyhow::Error) -> Self {
        Failure { code: 66, error }
    }

    pub fn from_core(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) => 64,
            Error::Numerical(_) => 70,
            _ => 65,
        };
        Failure { code, error: e.into() }
    }

    pub fn context(self, what: &str) -> Self {
        Failure { code: self.code, error: self.error.context(what.to_string()) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::from_core(e)
    }
}

fn emit(value: Value) {
    print!("{}", to_canonical_json(&value));
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn with_log_base(mut v: Value) -> Value {
    if let Some(map) = v.as_object_mut() {
        map.insert("log_base".into(), json!("natural"));
    }
    v
}

pub fn check_exact(p: &str, q: &str, tol: f64) -> Result<u8, Failure> {
    let (p, q) = (load_experiment(p)?, load_experiment(q)?);
    let res = majorizes(&p, &q, &LpOptions::with_tol(tol))?;
    emit(to_value(&res));
    Ok(if res.feasible { 0 } else { 1 })
}

fn admits(regime: RegimeArg, e: &Experiment) -> bool {
    match regime {
        RegimeArg::Auto => true,
        RegimeArg::Minimal => e.in_semiring(),
        RegimeArg::Dominating => e.in_semiring() && e.has_dominating_column(),
        RegimeArg::Dichotomy => e.is_dichotomy(),
    }
}

fn regime_name(r: RegimeArg) -> &'static str {
    match r {
        RegimeArg::Auto => "auto",
        RegimeArg::Minimal => "minimal",
        RegimeArg::Dominating => "dominating",
        RegimeArg::Dichotomy => "dichotomy",
    }
}

/// Most specific regime holding for both experiments; a declared regime must hold too.
fn resolve_regime(declared: RegimeArg, p: &Experiment, q: &Experiment) -> Result<RegimeArg, Failure> {
    let both = |r| admits(r, p) && admits(r, q);
    let detected = [RegimeArg::Dichotomy, RegimeArg::Dominating, RegimeArg::Minimal]
        .into_iter()
        .find(|&r| both(r))
        .ok_or_else(|| {
            Failure::data(format!(
                "no common regime: first experiment is {}, second is {}",
                p.classify_regime(),
                q.classify_regime()
            ))
        })?;
    match declared {
        RegimeArg::Auto => Ok(detected),
        r if both(r) => Ok(r),
        r => Err(Failure::from_core(Error::RegimeMismatch {
            expected: regime_name(r).into(),
            found: regime_name(detected).into(),
        })),
    }
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Sufficient => 0,
        Verdict::NecessaryFail => 1,
        Verdict::Inconclusive => 2,
    }
}

fn join_floats(xs: &[f64]) -> String {
    xs.iter().map(|x| format_float(*x)).collect::<Vec<_>>().join(" ")
}

fn join_indices(xs: impl IntoIterator<Item = usize>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn check_record(c: &Check) -> Vec<String> {
    vec![
        c.functional.to_string(),
        join_floats(&c.alpha),
        join_indices(c.character.iter()),
        join_indices(c.columns.iter().copied()),
        format!("{:?}", c.direction),
        format_float(c.p_value),
        format_float(c.q_value),
        format_float(c.margin),
        c.strict.to_string(),
        c.condition.unwrap_or("").to_string(),
    ]
}

const CHECK_HEADER: [&str; 10] = ["functional", "alpha", "C", "columns", "direction", "P", "Q", "margin", "strict", "condition"];

fn write_csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| Failure::data(e.to_string());
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(&r).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::data(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn render_table(rep: &CertReport) -> String {
    let rows: Vec<Vec<String>> = rep.checks.iter().map(check_record).collect();
    let mut widths: Vec<usize> = CHECK_HEADER.iter().map(|h| h.len()).collect();
    for r in &rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "verdict: {}  certifier: {:?}  mode: {:?}", rep.verdict.name(), rep.certifier, rep.mode);
    for note in &rep.notes {
        let _ = writeln!(out, "note: {note}");
    }
    let line = |cells: Vec<&str>| {
        cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
    };
    let _ = writeln!(out, "{}", line(CHECK_HEADER.to_vec()));
    for r in &rows {
        let _ = writeln!(out, "{}", line(r.iter().map(String::as_str).collect()));
    }
    out
}

pub fn certify(
    p: &str,
    q: &str,
    regime: RegimeArg,
    mode: ModeArg,
    grid: &GridSpec,
    format: Format,
) -> Result<u8, Failure> {
    let (p, q) = (load_experiment(p)?, load_experiment(q)?);
    let regime = resolve_regime(regime, &p, &q)?;
    let rep = match (regime, mode) {
        (RegimeArg::Minimal, ModeArg::Exact) => certify_minimal(&p, &q, grid)?,
        (RegimeArg::Minimal, ModeArg::Asymptotic) => certify_minimal_asymptotic(&p, &q, grid)?,
        (RegimeArg::Dominating, ModeArg::Exact) => certify_dominating(&p, &q, grid)?,
        (RegimeArg::Dominating, ModeArg::Asymptotic) => {
            return Err(Failure::usage(
                "no asymptotic certifier for dominating-column experiments beyond two columns; \
                 use --mode exact or --regime minimal",
            ))
        }
        (RegimeArg::Dichotomy, ModeArg::Exact) => certify_dichotomy_exact(&p, &q, grid)?,
        (RegimeArg::Dichotomy, ModeArg::Asymptotic) => certify_general_dichotomy_asymptotic(&p, &q, grid)?,
        (RegimeArg::Auto, _) => unreachable!("regime resolved above"),
    };
    match format {
        Format::Json => emit(with_log_base(to_value(&rep))),
        Format::Table => print!("{}", render_table(&rep)),
        Format::Csv => print!("{}", write_csv(&CHECK_HEADER, rep.checks.iter().map(check_record))?),
    }
    Ok(verdict_code(rep.verdict))
}

pub fn search(p: &str, q: &str, kind: KindArg, n_max: usize, row_cap: usize, tol: f64) -> Result<u8, Failure> {
    let (p, q) = (load_experiment(p)?, load_experiment(q)?);
    let opts = SearchOptions { n_max, row_cap, lp: LpOptions::with_tol(tol) };
    let res = match kind {
        KindArg::LargeSample => find_large_sample_n(&p, &q, &opts)?,
        KindArg::Catalytic => find_catalytic_n(&p, &q, &opts)?,
    };
    emit(to_value(&res));
    Ok(if res.n_found.is_some() { 0 } else { 1 })
}

/// Margin with the larger value favouring the first experiment, or the smaller one when `reverse`.
fn margin(p: f64, q: f64, reverse: bool) -> f64 {
    if p == q {
        0.0
    } else if reverse {
        q - p
    } else {
        p - q
    }
}

struct Row {
    alpha: Vec<f64>,
    character: Vec<usize>,
}

pub fn divergence(
    p: &str,
    q: Option<&str>,
    kind: DivergenceKind,
    alpha: Option<&[f64]>,
    grid: &GridSpec,
) -> Result<u8, Failure> {
    grid.validate()?;
    let p = load_experiment(p)?;
    let q = q.map(load_experiment).transpose()?;
    let d = p.n_cols();
    if let Some(q) = &q {
        if q.n_cols() != d {
            return Err(Error::ColumnCountMismatch { left: d, right: q.n_cols() }.into());
        }
    }
    let rows: Vec<Row> = match kind {
        DivergenceKind::Renyi => {
            if d != 2 {
                return Err(Failure::data(format!("renyi needs two columns, found {d}")));
            }
            let orders = alpha.map_or_else(|| grid.renyi_orders(), <[f64]>::to_vec);
            orders.into_iter().map(|a| Row { alpha: vec![a], character: vec![0, 1] }).collect()
        }
        DivergenceKind::Phi | DivergenceKind::Multivar => {
            if alpha.is_some() {
                return Err(Failure::usage("--alpha applies to renyi only"));
            }
            simplex_grid(d, grid.simplex_resolution)
                .into_iter()
                .filter(|a| kind == DivergenceKind::Phi || a.iter().all(|&x| x < 1.0))
                .map(|a| {
                    let character = (0..d).filter(|&k| a[k] > 0.0).collect();
                    Row { alpha: a, character }
                })
                .collect()
        }
    };
    let eval = |e: &Experiment, r: &Row| -> Result<f64, Error> {
        match kind {
            DivergenceKind::Renyi => renyi(&e.column(0), &e.column(1), r.alpha[0]),
            DivergenceKind::Phi => phi_at(e, &r.alpha, &r.character),
            DivergenceKind::Multivar => multivar_divergence(e, &r.alpha),
        }
    };
    let name = match kind {
        DivergenceKind::Renyi => "RenyiAlpha",
        DivergenceKind::Phi => "PhiAC",
        DivergenceKind::Multivar => "MultivarD",
    };
    let mut records = Vec::with_capacity(rows.len());
    for r in &rows {
        let pv = eval(&p, r)?;
        let mut rec = vec![name.to_string(), join_floats(&r.alpha), join_indices(r.character.iter().copied()), format_float(pv)];
        if let Some(q) = &q {
            let qv = eval(q, r)?;
            rec.push(format_float(qv));
            rec.push(format_float(margin(pv, qv, kind == DivergenceKind::Phi)));
        }
        records.push(rec);
    }
    let header: &[&str] = if q.is_some() {
        &["functional", "alpha", "C", "P", "Q", "margin"]
    } else {
        &["functional", "alpha", "C", "P"]
    };
    print!("{}", write_csv(header, records.into_iter())?);
    Ok(0)
}

fn float_vec(v: &Value, key: &str) -> Result<Vec<f64>, Failure> {
    v.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Failure::data(format!("missing array {key:?}")))?
        .iter()
        .map(|x| x.as_f64().ok_or_else(|| Failure::data(format!("{key:?} must hold numbers"))))
        .collect()
}

pub fn thermal(path: &str, grid: &GridSpec) -> Result<u8, Failure> {
    let text = read_text(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::data(format!("{path}: {e}")))?;
    let beta = v.get("beta").and_then(Value::as_f64).ok_or_else(|| Failure::data("missing number \"beta\""))?;
    let sys = ThermalSystem::new(float_vec(&v, "energies")?, beta)?;
    let verdict = thermal_check(&float_vec(&v, "rho")?, &float_vec(&v, "sigma")?, &sys, grid)?;
    emit(with_log_base(to_value(&verdict)));
    Ok(match verdict.answer {
        Answer::Yes => 0,
        Answer::No => 1,
        Answer::Inconclusive => 2,
    })
}

pub fn classify(path: &str, regime: RegimeArg) -> Result<u8, Failure> {
    let u = load_experiment(path)?;
    let regime = match regime {
        RegimeArg::Auto if u.has_dominating_column() => RegimeArg::Dominating,
        RegimeArg::Auto => RegimeArg::Minimal,
        RegimeArg::Dichotomy => RegimeArg::Dominating,
        r => r,
    };
    let (rep, criterion) = match regime {
        RegimeArg::Dominating => (classify_dominating(&u)?, homomorphism_criterion_dominating(&u)?),
        _ => (classify_minimal(&u)?, homomorphism_criterion_minimal(&u)?),
    };
    let mut v = to_value(&rep);
    if let Some(map) = v.as_object_mut() {
        map.insert("regime".into(), json!(regime_name(regime)));
        map.insert("homomorphism_criterion".into(), json!(criterion));
    }
    emit(v);
    Ok(if rep.power_universal { 0 } else { 1 })
}

pub fn canon(path: &str, format: Format) -> Result<u8, Failure> {
    let e = load_experiment(path)?;
    match format {
        Format::Json => emit(experiment_to_json_value(&e)),
        Format::Csv => print!("{}", experiment_to_csv(&e)?),
        Format::Table => return Err(Failure::usage("canon writes json or csv")),
    }
    Ok(0)
}
