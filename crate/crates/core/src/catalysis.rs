//! Explicit catalysts, large-sample and catalytic searches, and output
//! perturbation.
//!
//! The catalyst of order `n` for a pair `(P, Q)` is the direct sum over
//! `ℓ = 0..=n` of `Q^⊠ℓ ⊠ P^⊠(n−ℓ)`, scaled by `1/(n+1)`. If
//! `P^⊠(n+1)` majorizes `Q^⊠(n+1)` then `R ⊠ P` majorizes `R ⊠ Q`: the two
//! sides share all blocks except `P^⊠(n+1)` against `Q^⊠(n+1)`.
//!
//! Searches work on lumped representatives (proportional rows merged), which
//! are majorization-equivalent to the full tensor powers but polynomial in
//! size. Witnesses are returned for those representatives. Two-column
//! inputs are decided through Lorenz curves rather than the LP.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::{Experiment, DEFAULT_ROW_CAP};
use crate::feasibility::{dichotomy_majorizes, majorizes, FeasibilityStatus, LpOptions, StochasticMatrix};

const NORM_TOL: f64 = 1e-9;

/// A catalyst with its blocks kept apart.
#[derive(Clone, Debug)]
pub struct Catalyst {
    pub order: usize,
    /// Block `ℓ` is `Q^⊠ℓ ⊠ P^⊠(order−ℓ) / (order+1)`.
    pub blocks: Vec<Experiment>,
    /// Direct sum of the blocks.
    pub experiment: Experiment,
}

fn check_inputs(p: &Experiment, q: &Experiment) -> Result<()> {
    if p.n_cols() != q.n_cols() {
        return Err(Error::ColumnCountMismatch { left: p.n_cols(), right: q.n_cols() });
    }
    p.require_unit_norm(NORM_TOL)?;
    q.require_unit_norm(NORM_TOL)
}

fn sum_blocks(d: usize, blocks: &[Experiment]) -> Result<Experiment> {
    blocks.iter().try_fold(Experiment::zero(d), |acc, b| acc.box_plus(b))
}

/// Builds the order-`n` catalyst from full tensor powers.
pub fn build_catalyst(p: &Experiment, q: &Experiment, n: usize, row_cap: usize) -> Result<Catalyst> {
    check_inputs(p, q)?;
    let rows: u128 = (0..=n as u32)
        .map(|l| (q.n_rows() as u128).saturating_pow(l).saturating_mul((p.n_rows() as u128).saturating_pow(n as u32 - l)))
        .fold(0u128, u128::saturating_add);
    if rows > row_cap as u128 {
        return Err(Error::RowCapExceeded { rows, cap: row_cap });
    }
    let weight = 1.0 / (n + 1) as f64;
    let blocks = (0..=n as u32)
        .map(|l| {
            let qs = q.tensor_power(l, row_cap)?;
            let ps = p.tensor_power(n as u32 - l, row_cap)?;
            qs.box_times(&ps)?.scaled(weight)
        })
        .collect::<Result<Vec<_>>>()?;
    let experiment = sum_blocks(p.n_cols(), &blocks)?;
    Ok(Catalyst { order: n, blocks, experiment })
}

/// Lumped tensor powers `X^⊠0, …, X^⊠top`.
fn lumped_powers(x: &Experiment, top: usize, row_cap: usize) -> Result<Vec<Experiment>> {
    let mut out = vec![Experiment::unit(x.n_cols())];
    for _ in 0..top {
        let prev = out.last().expect("nonempty");
        let rows = prev.n_rows() as u128 * x.n_rows() as u128;
        if rows > row_cap as u128 {
            return Err(Error::RowCapExceeded { rows, cap: row_cap });
        }
        out.push(prev.box_times(x)?.lump().reduced);
    }
    Ok(out)
}

/// The order-`n` catalyst with every block lumped.
pub fn build_catalyst_lumped(p: &Experiment, q: &Experiment, n: usize, row_cap: usize) -> Result<Catalyst> {
    check_inputs(p, q)?;
    let pp = lumped_powers(p, n, row_cap)?;
    let qp = lumped_powers(q, n, row_cap)?;
    let weight = 1.0 / (n + 1) as f64;
    let blocks = (0..=n)
        .map(|l| {
            let rows = qp[l].n_rows() as u128 * pp[n - l].n_rows() as u128;
            if rows > row_cap as u128 {
                return Err(Error::RowCapExceeded { rows, cap: row_cap });
            }
            qp[l].box_times(&pp[n - l])?.lump().reduced.scaled(weight)
        })
        .collect::<Result<Vec<_>>>()?;
    let experiment = sum_blocks(p.n_cols(), &blocks)?.lump().reduced;
    Ok(Catalyst { order: n, blocks, experiment })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SearchKind {
    LargeSample,
    Catalytic,
}

/// Limits for the searches.
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub n_max: usize,
    pub row_cap: usize,
    pub lp: LpOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { n_max: 8, row_cap: DEFAULT_ROW_CAP, lp: LpOptions::default() }
    }
}

/// Outcome of a search.
#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub kind: SearchKind,
    /// Smallest order found.
    pub n_found: Option<usize>,
    /// Orders for which the LP was solved, all infeasible except possibly the last.
    pub checked: Vec<usize>,
    /// Witness mapping `source` to `target`.
    pub witness: Option<StochasticMatrix>,
    #[serde(skip)]
    pub source: Option<Experiment>,
    #[serde(skip)]
    pub target: Option<Experiment>,
    pub max_residual: Option<f64>,
    /// Set when a size cap stopped the search before `n_max`.
    pub cap_notice: Option<String>,
}

fn search(
    kind: SearchKind,
    orders: impl Iterator<Item = usize>,
    opts: &SearchOptions,
    mut instance: impl FnMut(usize) -> Result<(Experiment, Experiment)>,
) -> Result<SearchResult> {
    let mut out = SearchResult {
        kind,
        n_found: None,
        checked: vec![],
        witness: None,
        source: None,
        target: None,
        max_residual: None,
        cap_notice: None,
    };
    for n in orders {
        let (src, dst) = match instance(n) {
            Ok(pair) => pair,
            Err(e @ Error::RowCapExceeded { .. }) => {
                out.cap_notice = Some(format!("stopped at n = {n}: {e}"));
                break;
            }
            Err(e) => return Err(e),
        };
        let decided = if src.n_cols() == 2 { dichotomy_majorizes(&src, &dst, &opts.lp) } else { majorizes(&src, &dst, &opts.lp) };
        let res = match decided {
            Ok(r) => r,
            Err(e @ Error::LpTooLarge { .. }) => {
                out.cap_notice = Some(format!("stopped at n = {n}: {e}"));
                break;
            }
            Err(e) => return Err(e),
        };
        out.checked.push(n);
        if res.status == FeasibilityStatus::InfeasibleNorm {
            return Err(Error::InvalidParameter("column norms differ".into()));
        }
        if res.feasible {
            out.n_found = Some(n);
            out.max_residual = Some(res.max_residual);
            out.witness = res.witness;
            out.source = Some(src);
            out.target = Some(dst);
            break;
        }
    }
    Ok(out)
}

/// Smallest `n ≤ n_max` with `P^⊠n` majorizing `Q^⊠n`.
pub fn find_large_sample_n(p: &Experiment, q: &Experiment, opts: &SearchOptions) -> Result<SearchResult> {
    check_inputs(p, q)?;
    let (pl, ql) = (p.lump().reduced, q.lump().reduced);
    let mut cur: Option<(Experiment, Experiment)> = None;
    search(SearchKind::LargeSample, 1..=opts.n_max, opts, |_| {
        let next = match &cur {
            None => (pl.clone(), ql.clone()),
            Some((a, b)) => {
                for (x, base) in [(a, &pl), (b, &ql)] {
                    let rows = x.n_rows() as u128 * base.n_rows() as u128;
                    if rows > opts.row_cap as u128 {
                        return Err(Error::RowCapExceeded { rows, cap: opts.row_cap });
                    }
                }
                (a.box_times(&pl)?.lump().reduced, b.box_times(&ql)?.lump().reduced)
            }
        };
        cur = Some(next.clone());
        Ok(next)
    })
}

/// Smallest `n ≤ n_max` with `R_n ⊠ P` majorizing `R_n ⊠ Q` for the order-`n` catalyst.
pub fn find_catalytic_n(p: &Experiment, q: &Experiment, opts: &SearchOptions) -> Result<SearchResult> {
    check_inputs(p, q)?;
    search(SearchKind::Catalytic, 0..=opts.n_max, opts, |n| {
        let r = build_catalyst_lumped(p, q, n, opts.row_cap)?.experiment;
        for x in [p, q] {
            let rows = r.n_rows() as u128 * x.n_rows() as u128;
            if rows > opts.row_cap as u128 {
                return Err(Error::RowCapExceeded { rows, cap: opts.row_cap });
            }
        }
        Ok((r.box_times(p)?.lump().reduced, r.box_times(q)?.lump().reduced))
    })
}

/// Mixing target for [`perturb_output`].
#[derive(Clone, Debug, PartialEq)]
pub enum Anchor {
    /// Uniform over the rows of `Q`.
    Uniform,
    /// One of the columns of `Q`.
    Column(usize),
    /// An explicit distribution over the rows of `Q`.
    Vector(Vec<f64>),
}

/// `(1 − ε/2) q^(k) + (ε/2) w` for every column, rows aligned with `q`.
///
/// Entries where the column already equals the anchor are copied unchanged,
/// so anchoring at a column leaves that column bit-for-bit intact.
pub fn perturb_columns(q: &Experiment, eps: f64, anchor: &Anchor) -> Result<Vec<Vec<f64>>> {
    q.require_unit_norm(NORM_TOL)?;
    if !(eps > 0.0 && eps <= 2.0) {
        return Err(Error::InvalidParameter(format!("epsilon {eps} outside (0, 2]")));
    }
    let n = q.n_rows();
    let w = match anchor {
        Anchor::Uniform => vec![1.0 / n as f64; n],
        Anchor::Column(k) if *k < q.n_cols() => q.column(*k),
        Anchor::Column(k) => return Err(Error::InvalidParameter(format!("anchor column {k} out of range"))),
        Anchor::Vector(v) => {
            if v.len() != n {
                return Err(Error::LengthMismatch { left: n, right: v.len() });
            }
            if v.iter().any(|x| !x.is_finite() || *x < 0.0) || (v.iter().sum::<f64>() - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidParameter("anchor must be a probability vector".into()));
            }
            v.clone()
        }
    };
    Ok(q.columns()
        .into_iter()
        .map(|col| {
            col.iter()
                .zip(&w)
                .map(|(&x, &a)| if x == a { x } else { (1.0 - eps / 2.0) * x + (eps / 2.0) * a })
                .collect()
        })
        .collect())
}

/// `Q_ε = (1 − ε/2) Q + (ε/2) W` with every column of `W` equal to the anchor.
pub fn perturb_output(q: &Experiment, eps: f64, anchor: &Anchor) -> Result<Experiment> {
    Experiment::from_columns(&perturb_columns(q, eps, anchor)?)
}
