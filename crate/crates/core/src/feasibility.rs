//! Exact matrix majorization: does a column-stochastic `T` with `T P = Q` exist?

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::Experiment;
use crate::lorenz;
use crate::simplex::{phase_one, ColumnSource, SimplexOptions};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Limits and tolerances for [`majorizes`].
#[derive(Clone, Copy, Debug)]
pub struct LpOptions {
    /// Residual tolerance for the returned witness.
    pub tol: f64,
    /// Cap on `rows(Q) · rows(P)` after merging proportional rows.
    pub max_variables: usize,
    /// Cap on `rows(P) + d · rows(Q)` after merging.
    pub max_constraints: usize,
    /// Merge proportional rows before solving.
    pub lump: bool,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { tol: DEFAULT_TOL, max_variables: 2_000_000, max_constraints: 2_500, lump: true }
    }
}

impl LpOptions {
    pub fn with_tol(tol: f64) -> Self {
        LpOptions { tol, ..Self::default() }
    }
}

/// A dense column-stochastic matrix, row major.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StochasticMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl StochasticMatrix {
    /// Checks shape, nonnegativity and column sums (within `tol`).
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>, tol: f64) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::LengthMismatch { left: rows * cols, right: entries.len() });
        }
        if let Some(idx) = entries.iter().position(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::NegativeEntry { row: idx / cols, column: idx % cols, value: entries[idx] });
        }
        let m = StochasticMatrix { rows, cols, entries };
        if m.column_sum_error() > tol {
            return Err(Error::InvalidParameter(format!(
                "column sums deviate from 1 by {}",
                m.column_sum_error()
            )));
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::new(rows.len(), cols, rows.iter().flatten().copied().collect(), tol)
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.cols.max(1)).map(<[f64]>::to_vec).collect()
    }

    /// Largest deviation of a column sum from one.
    pub fn column_sum_error(&self) -> f64 {
        (0..self.cols)
            .map(|j| ((0..self.rows).map(|i| self.get(i, j)).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `T x` for a vector indexed like the columns of `T`.
    pub fn apply_vector(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::LengthMismatch { left: self.cols, right: x.len() });
        }
        Ok((0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect())
    }

    /// Columns of `T P`, row order following `T`.
    pub fn apply_columns(&self, p: &Experiment) -> Result<Vec<Vec<f64>>> {
        (0..p.n_cols()).map(|k| self.apply_vector(&p.column(k))).collect()
    }

    /// `T P` as a canonical experiment.
    pub fn apply(&self, p: &Experiment) -> Result<Experiment> {
        Experiment::from_columns(&self.apply_columns(p)?)
    }

    /// `max(‖T P − Q‖∞, column-sum error)`, rows of `Q` in canonical order.
    pub fn residual(&self, p: &Experiment, q: &Experiment) -> Result<f64> {
        if q.n_rows() != self.rows || p.n_rows() != self.cols || p.n_cols() != q.n_cols() {
            return Err(Error::InvalidParameter("witness shape does not match experiments".into()));
        }
        let tp = self.apply_columns(p)?;
        let mut worst = self.column_sum_error();
        for (k, col) in tp.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                worst = worst.max((v - q.get(i, k)).abs());
            }
        }
        Ok(worst)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FeasibilityStatus {
    Feasible,
    Infeasible,
    /// Column norms of the two experiments differ.
    InfeasibleNorm,
}

/// Outcome of [`majorizes`].
#[derive(Clone, Debug, Serialize)]
pub struct FeasibilityResult {
    pub status: FeasibilityStatus,
    pub feasible: bool,
    /// Maps canonical rows of the first experiment to canonical rows of the second.
    pub witness: Option<StochasticMatrix>,
    /// Residual of the witness on column-normalised data (phase-one optimum when infeasible).
    pub max_residual: f64,
    pub variables: usize,
    pub constraints: usize,
    pub iterations: usize,
}

impl FeasibilityResult {
    fn norm_mismatch() -> Self {
        FeasibilityResult {
            status: FeasibilityStatus::InfeasibleNorm,
            feasible: false,
            witness: None,
            max_residual: f64::INFINITY,
            variables: 0,
            constraints: 0,
            iterations: 0,
        }
    }
}

/// Constraint columns of the transport LP: variable `i·n + j` is `T[i][j]`.
///
/// Rows are the `n` column sums of `T` followed by `(TP)_{ik} = q_{ik}` for
/// `i < m − 1`. The equations for the last output row follow from the others
/// once column norms agree, and keeping them would make every basis carry `d`
/// dependent rows.
struct TransportColumns<'a> {
    p: &'a Experiment,
    m: usize,
}

impl TransportColumns<'_> {
    fn output_row(&self, k: usize, i: usize) -> Option<usize> {
        (i + 1 < self.m).then(|| self.p.n_rows() + k * (self.m - 1) + i)
    }
}

impl ColumnSource for TransportColumns<'_> {
    fn n_rows(&self) -> usize {
        self.p.n_rows() + self.p.n_cols() * (self.m - 1)
    }

    fn n_columns(&self) -> usize {
        self.p.n_rows() * self.m
    }

    fn column(&self, v: usize, out: &mut Vec<(usize, f64)>) {
        let n = self.p.n_rows();
        let (i, j) = (v / n, v % n);
        out.push((j, 1.0));
        for (k, &x) in self.p.row(j).iter().enumerate() {
            if let (true, Some(row)) = (x != 0.0, self.output_row(k, i)) {
                out.push((row, x));
            }
        }
    }

    fn dot(&self, v: usize, y: &[f64]) -> f64 {
        let n = self.p.n_rows();
        let (i, j) = (v / n, v % n);
        let mut acc = y[j];
        if i + 1 < self.m {
            for (k, &x) in self.p.row(j).iter().enumerate() {
                acc += y[n + k * (self.m - 1) + i] * x;
            }
        }
        acc
    }
}

fn norms_match(p: &Experiment, q: &Experiment, tol: f64) -> bool {
    p.column_norms()
        .iter()
        .zip(q.column_norms())
        .all(|(a, b)| (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0))
}

/// Solves the transport LP on already normalised, lumped inputs.
fn solve_reduced(p: &Experiment, q: &Experiment, opts: &LpOptions) -> Result<(Option<Vec<f64>>, f64, usize)> {
    let (n, m, d) = (p.n_rows(), q.n_rows(), p.n_cols());
    let src = TransportColumns { p, m };
    let mut rhs = vec![1.0; n];
    for k in 0..d {
        rhs.extend(q.rows().take(m - 1).map(|r| r[k]));
    }
    let out = phase_one(&src, &rhs, &SimplexOptions::default())?;
    if out.infeasibility > opts.tol {
        return Ok((None, out.infeasibility, out.iterations));
    }
    let mut t = vec![0.0; m * n];
    for (v, x) in out.values {
        t[v] = x.max(0.0);
    }
    // remove round-off in the column sums
    for j in 0..n {
        let s: f64 = (0..m).map(|i| t[i * n + j]).sum();
        if s > 0.0 {
            (0..m).for_each(|i| t[i * n + j] /= s);
        }
    }
    Ok((Some(t), out.infeasibility, out.iterations))
}

/// Decides whether `p` majorizes `q`, returning a verified witness when it does.
pub fn majorizes(p: &Experiment, q: &Experiment, opts: &LpOptions) -> Result<FeasibilityResult> {
    if p.n_cols() != q.n_cols() {
        return Err(Error::ColumnCountMismatch { left: p.n_cols(), right: q.n_cols() });
    }
    if !norms_match(p, q, opts.tol) {
        return Ok(FeasibilityResult::norm_mismatch());
    }
    let (pn, qn) = (p.normalized(), q.normalized());
    if qn.is_zero() || pn.is_zero() {
        // matching norms force both to be zero; the empty map is the witness
        return Ok(FeasibilityResult {
            status: FeasibilityStatus::Feasible,
            feasible: true,
            witness: None,
            max_residual: 0.0,
            variables: 0,
            constraints: 0,
            iterations: 0,
        });
    }

    let (pl, ql) = if opts.lump { (Some(pn.lump()), Some(qn.lump())) } else { (None, None) };
    let pr = pl.as_ref().map_or(&pn, |l| &l.reduced);
    let qr = ql.as_ref().map_or(&qn, |l| &l.reduced);

    let (n, m, d) = (pr.n_rows(), qr.n_rows(), pr.n_cols());
    let variables = n * m;
    let constraints = n + d * (m - 1);
    if variables > opts.max_variables || constraints > opts.max_constraints {
        return Err(Error::LpTooLarge {
            variables,
            constraints,
            max_variables: opts.max_variables,
            max_constraints: opts.max_constraints,
        });
    }

    let (solution, infeasibility, iterations) = solve_reduced(pr, qr, opts)?;
    let infeasible = |residual: f64| FeasibilityResult {
        status: FeasibilityStatus::Infeasible,
        feasible: false,
        witness: None,
        max_residual: residual,
        variables,
        constraints,
        iterations,
    };
    let Some(t) = solution else {
        return Ok(infeasible(infeasibility));
    };

    // expand to the original row sets
    let (big_n, big_m) = (pn.n_rows(), qn.n_rows());
    let mut entries = vec![0.0; big_m * big_n];
    for i in 0..big_m {
        let (gi, share) = ql.as_ref().map_or((i, 1.0), |l| (l.group_of[i], l.share[i]));
        for j in 0..big_n {
            let hj = pl.as_ref().map_or(j, |l| l.group_of[j]);
            entries[i * big_n + j] = share * t[gi * n + hj];
        }
    }
    let witness = StochasticMatrix { rows: big_m, cols: big_n, entries };
    let residual = witness.residual(&pn, &qn)?;
    if residual > opts.tol {
        return Ok(infeasible(residual));
    }
    Ok(FeasibilityResult {
        status: FeasibilityStatus::Feasible,
        feasible: true,
        witness: Some(witness),
        max_residual: residual,
        variables,
        constraints,
        iterations,
    })
}

/// [`majorizes`] for two-column experiments, decided by comparing Lorenz
/// curves instead of solving the LP.
///
/// The witness is built directly from the curves and verified like the LP
/// one; should it miss the tolerance, the LP decides instead.
pub fn dichotomy_majorizes(p: &Experiment, q: &Experiment, opts: &LpOptions) -> Result<FeasibilityResult> {
    if p.n_cols() != q.n_cols() {
        return Err(Error::ColumnCountMismatch { left: p.n_cols(), right: q.n_cols() });
    }
    if p.n_cols() != 2 {
        return Err(Error::InvalidParameter(format!("expected two columns, got {}", p.n_cols())));
    }
    if !norms_match(p, q, opts.tol) {
        return Ok(FeasibilityResult::norm_mismatch());
    }
    let (pn, qn) = (p.normalized(), q.normalized());
    let (n, m) = (pn.n_rows(), qn.n_rows());
    let mut out = FeasibilityResult {
        status: FeasibilityStatus::Feasible,
        feasible: true,
        witness: None,
        max_residual: 0.0,
        variables: n * m,
        constraints: 0,
        iterations: 0,
    };
    if qn.is_zero() || pn.is_zero() {
        return Ok(out);
    }
    let deficit = lorenz::deficit(&pn, &qn);
    if deficit > opts.tol {
        out.status = FeasibilityStatus::Infeasible;
        out.feasible = false;
        out.max_residual = deficit;
        return Ok(out);
    }
    let witness = StochasticMatrix { rows: m, cols: n, entries: lorenz::cut_windows(&pn, &qn) };
    let residual = witness.residual(&pn, &qn)?;
    if residual > opts.tol {
        return majorizes(p, q, opts);
    }
    out.witness = Some(witness);
    out.max_residual = residual;
    Ok(out)
}

/// Classical majorization of nonnegative vectors via sorted partial sums.
/// The shorter vector is padded with zeros.
pub fn vector_majorizes(p: &[f64], q: &[f64], tol: f64) -> Result<bool> {
    for (name, v) in [("p", p), ("q", q)] {
        if v.iter().any(|x| x.is_nan()) {
            return Err(Error::NaN(if name == "p" { "p" } else { "q" }));
        }
        if let Some(i) = v.iter().position(|x| *x < 0.0 || !x.is_finite()) {
            return Err(Error::NegativeEntry { row: i, column: 0, value: v[i] });
        }
    }
    let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
    if (sp - sq).abs() > tol * sp.max(sq).max(1.0) {
        return Err(Error::NormMismatch { column: 0, left: sp, right: sq });
    }
    let sorted = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(|a, b| b.total_cmp(a));
        s.resize(p.len().max(q.len()), 0.0);
        s
    };
    let (ps, qs) = (sorted(p), sorted(q));
    let mut acc_p = 0.0;
    let mut acc_q = 0.0;
    for (a, b) in ps.iter().zip(&qs) {
        acc_p += a;
        acc_q += b;
        if acc_p < acc_q - tol {
            return Ok(false);
        }
    }
    Ok(true)
}
