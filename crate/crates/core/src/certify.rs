//! Grid certificates for large-sample and catalytic majorization.
//!
//! Each certifier evaluates a finite sample of the relevant monotone families
//! on both experiments and compares them. A verdict of `SUFFICIENT` means every
//! sampled inequality holds on the grid; it is a grid certificate, not a proof
//! over the continuum. `NECESSARY_FAIL` means some monotone is violated, which
//! rules the conversion out. Everything else is `INCONCLUSIVE`.
//!
//! Margins are signed so that positive always favours the first experiment.
//! Simplex-weight homomorphisms are compared on their natural scale; the
//! order-above-one, tropical and KL families are compared as divergences.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::{positive, Experiment, IndexSet, SupportRegime};
use crate::grid::{simplex_grid, GridSpec};
use crate::monotone::{derivation_kl, log_phi_dc, phi, phi_tropical, renyi, Direction, FunctionalId, ParamPoint};
use crate::universal::classify_minimal;

/// Relative tolerance for matching column norms.
const NORM_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Sufficient,
    NecessaryFail,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Sufficient => "SUFFICIENT",
            Verdict::NecessaryFail => "NECESSARY_FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Exact certifiers need every margin strictly positive; asymptotic ones
/// accept ties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Asymptotic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certifier {
    Minimal,
    MinimalAsymptotic,
    Dominating,
    DichotomyExact,
    DichotomyAsymptotic,
    GeneralDichotomyAsymptotic,
}

/// One compared monotone.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub functional: FunctionalId,
    /// Weight vector, or the single order for one-parameter families.
    #[serde(serialize_with = "crate::report::ser_ext_vec")]
    pub alpha: Vec<f64>,
    /// Character for simplex-weight homomorphisms, empty otherwise.
    #[serde(rename = "C")]
    pub character: IndexSet,
    /// Ordered column pair for divergence-type checks.
    pub columns: Vec<usize>,
    pub direction: Direction,
    #[serde(rename = "P", serialize_with = "crate::report::ser_ext")]
    pub p_value: f64,
    #[serde(rename = "Q", serialize_with = "crate::report::ser_ext")]
    pub q_value: f64,
    /// Positive when the check favours the first experiment.
    #[serde(serialize_with = "crate::report::ser_ext")]
    pub margin: f64,
    /// `margin > tie_tol`.
    pub strict: bool,
    /// For three columns with a dominating column, the condition group the check belongs to.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<&'static str>,
}

/// Result of a certifier.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertReport {
    pub certifier: Certifier,
    pub mode: Mode,
    pub verdict: Verdict,
    /// Shorthand for a `SUFFICIENT` verdict: sufficient on the sampled grid only.
    pub grid_certified: bool,
    pub regime_p: SupportRegime,
    pub regime_q: SupportRegime,
    pub grid: GridSpec,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl CertReport {
    /// The check with the smallest margin.
    pub fn worst(&self) -> Option<&Check> {
        self.checks.iter().min_by(|a, b| a.margin.total_cmp(&b.margin))
    }

    /// Smallest margin, `+∞` without checks.
    pub fn min_margin(&self) -> f64 {
        self.worst().map_or(f64::INFINITY, |c| c.margin)
    }
}

/// A check before evaluation.
#[derive(Clone, Debug)]
enum Probe {
    Phi(ParamPoint),
    PhiDc { alpha: f64, c: usize },
    Tropical { c: usize },
    Kl { c: usize },
    Renyi { alpha: f64, first: usize, second: usize },
}

fn signed_margin(direction: Direction, p: f64, q: f64) -> f64 {
    if p == q {
        return 0.0;
    }
    match direction {
        Direction::LargerIsStronger => p - q,
        Direction::SmallerIsStronger => q - p,
    }
}

fn evaluate(probe: &Probe, p: &Experiment, q: &Experiment, tie_tol: f64) -> Result<Check> {
    let d = p.n_cols();
    let last = d - 1;
    let (functional, alpha, character, columns, direction, pv, qv) = match probe {
        Probe::Phi(pt) => (
            FunctionalId::PhiAc,
            pt.alpha.clone(),
            pt.character.clone(),
            vec![],
            Direction::SmallerIsStronger,
            phi(p, pt)?,
            phi(q, pt)?,
        ),
        Probe::PhiDc { alpha, c } => {
            let scale = |e: &Experiment| log_phi_dc(e, *alpha, *c).map(|l| l / (alpha - 1.0));
            (
                FunctionalId::PhiAlphaCDc,
                vec![*alpha],
                IndexSet::default(),
                vec![*c, last],
                Direction::LargerIsStronger,
                scale(p)?,
                scale(q)?,
            )
        }
        Probe::Tropical { c } => (
            FunctionalId::PhiTropC,
            vec![f64::INFINITY],
            IndexSet::default(),
            vec![*c, last],
            Direction::LargerIsStronger,
            phi_tropical(p, *c)?.ln(),
            phi_tropical(q, *c)?.ln(),
        ),
        Probe::Kl { c } => (
            FunctionalId::DerivationKl,
            vec![1.0],
            IndexSet::default(),
            vec![*c, last],
            Direction::LargerIsStronger,
            derivation_kl(p, *c)?,
            derivation_kl(q, *c)?,
        ),
        Probe::Renyi { alpha, first, second } => (
            FunctionalId::RenyiAlpha,
            vec![*alpha],
            IndexSet::default(),
            vec![*first, *second],
            Direction::LargerIsStronger,
            renyi(&p.column(*first), &p.column(*second), *alpha)?,
            renyi(&q.column(*first), &q.column(*second), *alpha)?,
        ),
    };
    if pv.is_nan() || qv.is_nan() {
        return Err(Error::NaN("monotone value"));
    }
    let margin = signed_margin(direction, pv, qv);
    let condition = if d == 3 && last == 2 { three_column_condition(functional, &alpha, &character, &columns) } else { None };
    Ok(Check {
        functional,
        alpha,
        character,
        columns,
        direction,
        p_value: pv,
        q_value: qv,
        margin,
        strict: margin > tie_tol,
        condition,
    })
}

/// Condition group of a check for three columns with the last dominating.
///
/// `d3.1` interior weights; `d3.2` divergences of column 1 against 3 at all
/// orders; `d3.3` the same restricted to the support of column 2 below order
/// one; `d3.4` and `d3.5` the mirror images for column 2; `d3.6` divergences
/// between columns 1 and 2 at orders up to one half in both directions.
fn three_column_condition(
    functional: FunctionalId,
    alpha: &[f64],
    character: &IndexSet,
    columns: &[usize],
) -> Option<&'static str> {
    match functional {
        FunctionalId::PhiAlphaCDc | FunctionalId::PhiTropC | FunctionalId::DerivationKl => {
            Some(if columns.first() == Some(&0) { "d3.2" } else { "d3.4" })
        }
        FunctionalId::PhiAc => {
            let c = character.as_slice();
            if alpha.iter().all(|&a| a > 0.0) {
                Some("d3.1")
            } else if alpha[1] == 0.0 {
                match c {
                    [0, 2] => Some("d3.2"),
                    [1, 2] => Some("d3.4"),
                    [0, 1, 2] => Some(if alpha[0] == 1.0 { "d3.6" } else { "d3.3" }),
                    _ => None,
                }
            } else if alpha[0] == 0.0 {
                match c {
                    [1, 2] => Some("d3.4"),
                    [0, 1, 2] => Some(if alpha[1] == 1.0 { "d3.6" } else { "d3.5" }),
                    _ => None,
                }
            } else {
                Some("d3.6")
            }
        }
        _ => None,
    }
}

fn cmp_f64s(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

fn verdict_of(checks: &[Check], mode: Mode, tie_tol: f64) -> Verdict {
    if checks.iter().any(|c| c.margin < -tie_tol) {
        Verdict::NecessaryFail
    } else if mode == Mode::Asymptotic || checks.iter().all(|c| c.strict) {
        Verdict::Sufficient
    } else {
        Verdict::Inconclusive
    }
}

fn run(
    certifier: Certifier,
    mode: Mode,
    probes: Vec<Probe>,
    p: &Experiment,
    q: &Experiment,
    grid: &GridSpec,
    notes: Vec<String>,
) -> Result<CertReport> {
    let mut checks = probes
        .par_iter()
        .map(|s| evaluate(s, p, q, grid.tie_tol))
        .collect::<Result<Vec<Check>>>()?;
    checks.sort_by(|a, b| {
        a.functional
            .cmp(&b.functional)
            .then_with(|| cmp_f64s(&a.alpha, &b.alpha))
            .then_with(|| a.character.cmp(&b.character))
            .then_with(|| a.columns.cmp(&b.columns))
    });
    let verdict = verdict_of(&checks, mode, grid.tie_tol);
    Ok(CertReport {
        certifier,
        mode,
        verdict,
        grid_certified: verdict == Verdict::Sufficient,
        regime_p: p.classify_regime(),
        regime_q: q.classify_regime(),
        grid: *grid,
        checks,
        notes,
    })
}

fn check_pair(p: &Experiment, q: &Experiment, grid: &GridSpec) -> Result<()> {
    grid.validate()?;
    if p.n_cols() != q.n_cols() {
        return Err(Error::ColumnCountMismatch { left: p.n_cols(), right: q.n_cols() });
    }
    if p.n_cols() < 2 {
        return Err(Error::InvalidParameter("at least two columns are needed".into()));
    }
    for (k, (a, b)) in p.column_norms().iter().zip(q.column_norms()).enumerate() {
        if (a - b).abs() > NORM_TOL * a.max(b).max(1.0) {
            return Err(Error::NormMismatch { column: k, left: *a, right: b });
        }
    }
    Ok(())
}

fn regime_error(expected: &str, e: &Experiment) -> Error {
    Error::RegimeMismatch { expected: expected.into(), found: e.classify_regime().to_string() }
}

fn require_semiring(p: &Experiment, q: &Experiment) -> Result<()> {
    for e in [p, q] {
        if !e.in_semiring() {
            return Err(regime_error("MinimalRestrictions", e));
        }
    }
    Ok(())
}

fn require_dominating(p: &Experiment, q: &Experiment) -> Result<()> {
    require_semiring(p, q)?;
    for e in [p, q] {
        if !e.has_dominating_column() {
            return Err(regime_error("DominatingColumn", e));
        }
    }
    Ok(())
}

fn require_dichotomies(p: &Experiment, q: &Experiment) -> Result<()> {
    for e in [p, q] {
        if !e.is_dichotomy() {
            return Err(regime_error("Dichotomy", e));
        }
    }
    Ok(())
}

/// Supersets of `base` inside `[d]`.
fn supersets(base: &IndexSet, d: usize) -> impl Iterator<Item = IndexSet> + '_ {
    IndexSet::all_subsets(d).filter(move |c| !c.is_empty() && base.is_subset(c))
}

/// Checks `Φ(P) < Φ(Q)` for every non-degenerate homomorphism on the grid.
pub fn certify_minimal(p: &Experiment, q: &Experiment, grid: &GridSpec) -> Result<CertReport> {
    check_pair(p, q, grid)?;
    require_semiring(p, q)?;
    let d = p.n_cols();
    let mut probes = Vec::new();
    for alpha in simplex_grid(d, grid.simplex_resolution) {
        let base = IndexSet::new((0..d).filter(|&k| alpha[k] > 0.0));
        for c in supersets(&base, d) {
            let pt = ParamPoint::simplex(alpha.clone(), c)?;
            if pt.vertex().is_some() && pt.character.len() == 1 {
                continue;
            }
            probes.push(Probe::Phi(pt));
        }
    }
    run(Certifier::Minimal, Mode::Exact, probes, p, q, grid, vec![])
}

/// Non-strict comparison of the continuous homomorphisms; needs a power universal `P`.
pub fn certify_minimal_asymptotic(p: &Experiment, q: &Experiment, grid: &GridSpec) -> Result<CertReport> {
    check_pair(p, q, grid)?;
    require_semiring(p, q)?;
    if !classify_minimal(p)?.power_universal {
        return Err(Error::NotPowerUniversal);
    }
    let d = p.n_cols();
    let mut probes = Vec::new();
    for alpha in simplex_grid(d, grid.simplex_resolution) {
        let c = IndexSet::new((0..d).filter(|&k| alpha[k] > 0.0));
        if c.len() == 1 {
            continue;
        }
        probes.push(Probe::Phi(ParamPoint::simplex(alpha, c)?));
    }
    run(Certifier::MinimalAsymptotic, Mode::Asymptotic, probes, p, q, grid, vec![])
}

/// Strict comparison of all three families with the last column dominating.
pub fn certify_dominating(p: &Experiment, q: &Experiment, grid: &GridSpec) -> Result<CertReport> {
    check_pair(p, q, grid)?;
    require_dominating(p, q)?;
    let d = p.n_cols();
    let last = d - 1;
    let mut probes = Vec::new();
    for alpha in simplex_grid(d, grid.simplex_resolution) {
        let base = IndexSet::new((0..d).filter(|&k| alpha[k] > 0.0).chain([last]));
        for c in supersets(&base, d) {
            let pt = ParamPoint::simplex(alpha.clone(), c)?;
            let degenerate = match pt.vertex() {
                Some(k) if k == last => pt.character.len() == 1,
                Some(_) => pt.character.len() == 2,
                None => false,
            };
            if !degenerate {
                probes.push(Probe::Phi(pt));
            }
        }
    }
    for c in 0..last {
        probes.extend(grid.ray_orders().into_iter().map(|alpha| Probe::PhiDc { alpha, c }));
        probes.push(Probe::Kl { c });
        if grid.include_infinity {
            probes.push(Probe::Tropical { c });
        }
    }
    run(Certifier::Dominating, Mode::Exact, probes, p, q, grid, vec![])
}

fn renyi_probes(orders: impl IntoIterator<Item = f64>, first: usize, second: usize) -> Vec<Probe> {
    orders.into_iter().map(|alpha| Probe::Renyi { alpha, first, second }).collect()
}

/// Strict Rényi comparison for orders in `[0, alpha_max] ∪ {∞}`.
pub fn certify_dichotomy_exact(p: &Experiment, q: &Experiment, grid: &GridSpec) -> Result<CertReport> {
    check_pair(p, q, grid)?;
    require_dichotomies(p, q)?;
    run(Certifier::DichotomyExact, Mode::Exact, renyi_probes(grid.renyi_orders(), 0, 1), p, q, grid, vec![])
}

fn strict_support(e: &Experiment) -> bool {
    e.rows().any(|r| !positive(r[0]) && positive(r[1]))
}

/// Non-strict Rényi comparison for orders in `(0, ∞]`; needs `supp p1 ⊊ supp p2`.
pub fn certify_dichotomy_asymptotic(p: &Experiment, q: &Experiment, grid: &GridSpec) -> Result<CertReport> {
    check_pair(p, q, grid)?;
    require_dichotomies(p, q)?;
    if !strict_support(p) {
        return Err(Error::NotPowerUniversal);
    }
    let orders = grid.renyi_orders().into_iter().filter(|&a| a > 0.0);
    run(Certifier::DichotomyAsymptotic, Mode::Asymptotic, renyi_probes(orders, 0, 1), p, q, grid, vec![])
}

/// Asymptotic comparison of pairs whose second columns have full support.
///
/// With `supp p1 ⊊ supp p2` this is [`certify_dichotomy_asymptotic`]. With
/// equal supports, orders from one half upwards are compared in both
/// directions; if `Q` then has a strictly smaller first support the
/// conversion is impossible, which the order-zero check exposes.
pub fn certify_general_dichotomy_asymptotic(p: &Experiment, q: &Experiment, grid: &GridSpec) -> Result<CertReport> {
    check_pair(p, q, grid)?;
    require_dichotomies(p, q)?;
    if p.column(0) == p.column(1) {
        return Err(Error::InvalidParameter("the two columns of the first experiment coincide".into()));
    }
    if strict_support(p) {
        let mut rep = certify_dichotomy_asymptotic(p, q, grid)?;
        rep.certifier = Certifier::GeneralDichotomyAsymptotic;
        rep.notes.push("first column has strictly smaller support; one-sided orders (0, ∞] compared".into());
        return Ok(rep);
    }
    if strict_support(q) {
        let note = "equal supports cannot reach a strictly smaller support".to_string();
        return run(
            Certifier::GeneralDichotomyAsymptotic,
            Mode::Asymptotic,
            renyi_probes([0.0], 0, 1),
            p,
            q,
            grid,
            vec![note],
        );
    }
    let mut orders = vec![0.5];
    orders.extend(grid.renyi_orders().into_iter().filter(|&a| a > 0.5));
    let mut probes = renyi_probes(orders.clone(), 0, 1);
    probes.extend(renyi_probes(orders, 1, 0));
    run(Certifier::GeneralDichotomyAsymptotic, Mode::Asymptotic, probes, p, q, grid, vec![])
}
