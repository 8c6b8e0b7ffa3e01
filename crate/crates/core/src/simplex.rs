//! Phase-one revised simplex for `A x = b, x ≥ 0` with `b ≥ 0`.
//!
//! The basis inverse is kept dense and refreshed by Gauss-Jordan elimination
//! every few dozen pivots. Columns are produced on demand by a
//! [`ColumnSource`], so problems with many sparse columns never materialise `A`.
//! Pricing is Dantzig's rule; after a run of degenerate pivots the solver
//! switches to Bland's rule until the objective moves again, which rules out
//! cycling.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Supplies the constraint matrix column by column.
pub(crate) trait ColumnSource: Sync {
    fn n_rows(&self) -> usize;
    fn n_columns(&self) -> usize;
    /// Nonzero entries of column `j` as `(row, value)`.
    fn column(&self, j: usize, out: &mut Vec<(usize, f64)>);
    /// `y · a_j`.
    fn dot(&self, j: usize, y: &[f64]) -> f64;
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct SimplexOptions {
    pub max_iterations: usize,
    pub refactor_every: usize,
    /// Stop as soon as the total infeasibility drops below this.
    pub zero_tol: f64,
    pub price_tol: f64,
    pub pivot_tol: f64,
    /// Degenerate pivots in a row before switching to Bland's rule; zero means always.
    pub stall_limit: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            max_iterations: 0,
            refactor_every: 64,
            zero_tol: 1e-13,
            price_tol: 1e-12,
            pivot_tol: 1e-11,
            stall_limit: 25,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct PhaseOne {
    /// Remaining sum of artificial variables at termination.
    pub infeasibility: f64,
    /// Nonzero structural variables.
    pub values: Vec<(usize, f64)>,
    pub iterations: usize,
}

struct State {
    r: usize,
    ncols: usize,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
}

impl State {
    fn is_artificial(&self, var: usize) -> bool {
        var >= self.ncols
    }

    fn objective(&self) -> f64 {
        self.basis.iter().zip(&self.xb).filter(|(v, _)| **v >= self.ncols).map(|(_, x)| x.max(0.0)).sum()
    }

    fn duals(&self) -> Vec<f64> {
        let r = self.r;
        let mut y = vec![0.0; r];
        for (s, &var) in self.basis.iter().enumerate() {
            if self.is_artificial(var) {
                for (yi, b) in y.iter_mut().zip(&self.binv[s * r..(s + 1) * r]) {
                    *yi += b;
                }
            }
        }
        y
    }

    fn pivot(&mut self, row: usize, w: &[f64], theta: f64, entering: usize) {
        let r = self.r;
        for (s, x) in self.xb.iter_mut().enumerate() {
            if s != row {
                *x -= theta * w[s];
                if *x < 0.0 && *x > -1e-15 {
                    *x = 0.0;
                }
            }
        }
        self.xb[row] = theta;
        let inv = 1.0 / w[row];
        let (before, rest) = self.binv.split_at_mut(row * r);
        let (pivot_row, after) = rest.split_at_mut(r);
        pivot_row.iter_mut().for_each(|x| *x *= inv);
        let update = |chunk: &mut [f64], ws: f64| {
            if ws != 0.0 {
                chunk.iter_mut().zip(pivot_row.iter()).for_each(|(x, p)| *x -= ws * p);
            }
        };
        before.chunks_exact_mut(r).zip(&w[..row]).for_each(|(c, &ws)| update(c, ws));
        after.chunks_exact_mut(r).zip(&w[row + 1..]).for_each(|(c, &ws)| update(c, ws));

        let leaving = self.basis[row];
        if !self.is_artificial(leaving) {
            self.in_basis[leaving] = false;
        }
        self.basis[row] = entering;
        self.in_basis[entering] = true;
    }

    /// Rebuilds the inverse from scratch and recomputes basic values.
    fn refactor<S: ColumnSource>(&mut self, src: &S, rhs: &[f64]) -> Result<()> {
        let r = self.r;
        let mut m = vec![0.0; r * r];
        let mut col = Vec::new();
        for (s, &var) in self.basis.iter().enumerate() {
            if self.is_artificial(var) {
                m[(var - self.ncols) * r + s] = 1.0;
            } else {
                col.clear();
                src.column(var, &mut col);
                for &(i, v) in &col {
                    m[i * r + s] = v;
                }
            }
        }
        self.binv = invert(&mut m, r).ok_or_else(|| Error::Numerical("singular basis".into()))?;
        for s in 0..r {
            let row = &self.binv[s * r..(s + 1) * r];
            let x: f64 = row.iter().zip(rhs).map(|(a, b)| a * b).sum();
            self.xb[s] = if x < 0.0 && x > -1e-9 { 0.0 } else { x };
        }
        Ok(())
    }
}

/// Gauss-Jordan inverse with partial pivoting; `m` is destroyed.
fn invert(m: &mut [f64], r: usize) -> Option<Vec<f64>> {
    let mut inv = vec![0.0; r * r];
    for i in 0..r {
        inv[i * r + i] = 1.0;
    }
    for c in 0..r {
        let p = (c..r).max_by(|&a, &b| m[a * r + c].abs().total_cmp(&m[b * r + c].abs()))?;
        if m[p * r + c].abs() < 1e-13 {
            return None;
        }
        if p != c {
            for k in 0..r {
                m.swap(p * r + k, c * r + k);
                inv.swap(p * r + k, c * r + k);
            }
        }
        let d = 1.0 / m[c * r + c];
        for k in 0..r {
            m[c * r + k] *= d;
            inv[c * r + k] *= d;
        }
        for i in 0..r {
            if i == c {
                continue;
            }
            let f = m[i * r + c];
            if f != 0.0 {
                for k in 0..r {
                    m[i * r + k] -= f * m[c * r + k];
                    inv[i * r + k] -= f * inv[c * r + k];
                }
            }
        }
    }
    Some(inv)
}

/// Minimises the sum of artificial variables for `A x = rhs`.
pub(crate) fn phase_one<S: ColumnSource>(src: &S, rhs: &[f64], opts: &SimplexOptions) -> Result<PhaseOne> {
    let r = src.n_rows();
    let ncols = src.n_columns();
    if rhs.len() != r {
        return Err(Error::LengthMismatch { left: r, right: rhs.len() });
    }
    if rhs.iter().any(|&b| b < 0.0 || !b.is_finite()) {
        return Err(Error::InvalidParameter("right-hand side must be finite and nonnegative".into()));
    }
    let max_iterations = if opts.max_iterations == 0 { 10_000 + 200 * (r + ncols.min(50 * r)) } else { opts.max_iterations };

    let mut st = State {
        r,
        ncols,
        basis: (ncols..ncols + r).collect(),
        in_basis: vec![false; ncols + r],
        binv: vec![0.0; r * r],
        xb: rhs.to_vec(),
    };
    for s in 0..r {
        st.binv[s * r + s] = 1.0;
        st.in_basis[ncols + s] = true;
    }

    let always_bland = opts.stall_limit == 0;
    let mut bland = always_bland;
    let mut stall = 0usize;
    let mut iterations = 0usize;
    let mut col = Vec::new();
    let mut w = vec![0.0; r];

    loop {
        if st.objective() <= opts.zero_tol {
            break;
        }
        if iterations >= max_iterations {
            return Err(Error::Numerical(format!("no convergence after {iterations} pivots")));
        }
        let y = st.duals();
        let Some((entering, reduced)) = price(src, &y, &st.in_basis, bland, opts.price_tol) else {
            break;
        };

        col.clear();
        src.column(entering, &mut col);
        w.iter_mut().for_each(|x| *x = 0.0);
        for &(i, v) in &col {
            for (s, ws) in w.iter_mut().enumerate() {
                *ws += st.binv[s * r + i] * v;
            }
        }

        let Some((row, theta)) = ratio_test(&st, &w, bland, opts.pivot_tol) else {
            // phase one is bounded below, so this only happens through round-off
            st.refactor(src, rhs)?;
            iterations += 1;
            bland = true;
            continue;
        };

        if theta * reduced.abs() <= 1e-16 {
            stall += 1;
            if stall >= opts.stall_limit {
                bland = true;
            }
        } else {
            stall = 0;
            bland = always_bland;
        }

        st.pivot(row, &w, theta, entering);
        iterations += 1;
        if iterations.is_multiple_of(opts.refactor_every) {
            st.refactor(src, rhs)?;
        }
    }

    let values = st
        .basis
        .iter()
        .zip(&st.xb)
        .filter(|(v, x)| **v < ncols && **x > 0.0)
        .map(|(v, x)| (*v, *x))
        .collect();
    Ok(PhaseOne { infeasibility: st.objective(), values, iterations })
}

fn price<S: ColumnSource>(src: &S, y: &[f64], in_basis: &[bool], bland: bool, tol: f64) -> Option<(usize, f64)> {
    let reduced = |j: usize| -> Option<(usize, f64)> {
        if in_basis[j] {
            return None;
        }
        let d = -src.dot(j, y);
        (d < -tol).then_some((j, d))
    };
    let ncols = src.n_columns();
    if bland {
        return (0..ncols).find_map(reduced);
    }
    let better = |a: (usize, f64), b: (usize, f64)| {
        if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a }
    };
    if ncols > 20_000 {
        (0..ncols).into_par_iter().filter_map(reduced).reduce_with(better)
    } else {
        (0..ncols).filter_map(reduced).reduce(better)
    }
}

fn ratio_test(st: &State, w: &[f64], bland: bool, pivot_tol: f64) -> Option<(usize, f64)> {
    // tiny entries relative to the column are round-off, never pivots
    let scale = w.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let tol = pivot_tol.max(1e-9 * scale);
    let theta = w
        .iter()
        .zip(&st.xb)
        .filter(|(ws, _)| **ws > tol)
        .map(|(ws, x)| x.max(0.0) / ws)
        .min_by(f64::total_cmp)?;
    let slack = 1e-12 * theta.max(1e-12);
    let candidates: Vec<usize> = w
        .iter()
        .zip(&st.xb)
        .enumerate()
        .filter(|(_, (ws, x))| **ws > tol && x.max(0.0) / **ws <= theta + slack)
        .map(|(s, _)| s)
        .collect();
    let row = if bland {
        candidates.into_iter().min_by_key(|&s| st.basis[s])?
    } else {
        // prefer driving out artificials, unless their pivot is much smaller than the best one
        let best = candidates.iter().map(|&s| w[s]).fold(0.0, f64::max);
        candidates.into_iter().max_by(|&a, &b| {
            let key = |s: usize| (st.is_artificial(st.basis[s]) && w[s] >= 1e-3 * best, w[s]);
            let (ka, kb) = (key(a), key(b));
            ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1)).then(b.cmp(&a))
        })?
    };
    Some((row, theta))
}
