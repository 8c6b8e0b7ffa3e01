//! Lorenz curves of two-column experiments.
//!
//! Rows are taken in order of decreasing ratio of the first column to the
//! second, and the curve joins the cumulative sums `(second, first)`. Rows
//! with a zero second entry come first and form a vertical stretch at the
//! origin, so points on the curve are addressed by arc position: height along
//! the vertical stretch, then abscissa.
//!
//! For experiments with equal column sums, `P` majorizes `Q` exactly when the
//! curve of `P` lies on or above every vertex of the curve of `Q`. A witness is
//! built one output row at a time, highest ratio first: each row of `Q` is
//! served by a window of the remaining curve of `P` with the same width and
//! height. Cutting such a window out keeps the remainder above the rest of
//! `Q`'s curve, so the process never gets stuck.

use crate::experiment::Experiment;

fn ratio_order(e: &Experiment) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..e.n_rows()).collect();
    idx.sort_by(|&x, &y| (e.get(y, 0) * e.get(x, 1)).total_cmp(&(e.get(x, 0) * e.get(y, 1))));
    idx
}

/// A share of one row of `P`.
#[derive(Clone, Copy, Debug)]
struct Piece {
    row: usize,
    frac: f64,
}

struct Curve {
    /// Arc position where each piece starts, plus the total at the end.
    arc: Vec<f64>,
    /// Height where each piece starts, plus the total at the end.
    height: Vec<f64>,
    /// Length of the vertical stretch.
    vertical: f64,
}

impl Curve {
    fn new(p: &Experiment, pieces: &[Piece]) -> Self {
        let mut arc = Vec::with_capacity(pieces.len() + 1);
        let mut height = Vec::with_capacity(pieces.len() + 1);
        let (mut u, mut y, mut vertical) = (0.0, 0.0, 0.0);
        for pc in pieces {
            arc.push(u);
            height.push(y);
            let (a, b) = (pc.frac * p.get(pc.row, 0), pc.frac * p.get(pc.row, 1));
            if b > 0.0 {
                u += b;
            } else {
                u += a;
                vertical += a;
            }
            y += a;
        }
        arc.push(u);
        height.push(y);
        Curve { arc, height, vertical }
    }

    fn total(&self) -> f64 {
        *self.arc.last().expect("nonempty")
    }

    fn len(&self, k: usize) -> f64 {
        self.arc[k + 1] - self.arc[k]
    }

    fn at_arc(&self, u: f64) -> f64 {
        let k = self.arc.partition_point(|&s| s <= u).clamp(1, self.arc.len() - 1) - 1;
        let len = self.len(k);
        if len <= 0.0 {
            return self.height[k + 1];
        }
        let t = ((u - self.arc[k]) / len).clamp(0.0, 1.0);
        self.height[k] + t * (self.height[k + 1] - self.height[k])
    }

    /// Top of the curve at abscissa `x`.
    fn at(&self, x: f64) -> f64 {
        self.at_arc((self.vertical + x).min(self.total()))
    }

    /// Arc interval of width `b` holding height `a`, as close as the data allows.
    fn window(&self, a: f64, b: f64) -> (f64, f64) {
        let total = self.total();
        let end_of = |u: f64| (u.max(self.vertical) + b).min(total);
        let content = |u: f64| self.at_arc(end_of(u)) - self.at_arc(u);
        let last = (total - b).max(self.vertical).min(total);
        if content(0.0) <= a {
            return (0.0, end_of(0.0));
        }
        if content(last) >= a {
            return (last, end_of(last));
        }
        // content decreases along the curve
        let (mut lo, mut hi) = (0.0, last);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if content(mid) > a {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let u = if (content(lo) - a).abs() <= (content(hi) - a).abs() { lo } else { hi };
        (u, end_of(u))
    }
}

/// Largest amount by which a vertex of `q`'s curve rises above `p`'s curve.
/// Inputs must have unit column sums.
pub(crate) fn deficit(p: &Experiment, q: &Experiment) -> f64 {
    let pieces: Vec<Piece> = ratio_order(p).into_iter().map(|row| Piece { row, frac: 1.0 }).collect();
    let curve = Curve::new(p, &pieces);
    let (mut x, mut y) = (0.0, 0.0);
    let mut worst = f64::NEG_INFINITY;
    for i in ratio_order(q) {
        x += q.get(i, 1);
        y += q.get(i, 0);
        worst = worst.max(y - curve.at(x));
    }
    worst
}

/// Row-major `rows(q) × rows(p)` column-stochastic matrix sending `p` towards
/// `q` by window cutting. Exact only when the curve of `p` dominates.
pub(crate) fn cut_windows(p: &Experiment, q: &Experiment) -> Vec<f64> {
    let (n, m) = (p.n_rows(), q.n_rows());
    let mut t = vec![0.0; m * n];
    let mut pieces: Vec<Piece> = ratio_order(p).into_iter().map(|row| Piece { row, frac: 1.0 }).collect();
    let order = ratio_order(q);
    for (step, &i) in order.iter().enumerate() {
        let out = &mut t[i * n..(i + 1) * n];
        if step + 1 == m {
            pieces.iter().for_each(|pc| out[pc.row] += pc.frac);
            break;
        }
        let curve = Curve::new(p, &pieces);
        let (lo, hi) = curve.window(q.get(i, 0), q.get(i, 1));
        let mut rest = Vec::with_capacity(pieces.len() + 1);
        for (k, pc) in pieces.iter().enumerate() {
            let (s, e) = (curve.arc[k], curve.arc[k + 1]);
            let overlap = e.min(hi) - s.max(lo);
            if overlap <= 0.0 || e <= s {
                rest.push(*pc);
                continue;
            }
            let taken = (pc.frac * overlap / (e - s)).min(pc.frac);
            let left = pc.frac - taken;
            if left <= 1e-13 * pc.frac {
                out[pc.row] += pc.frac;
            } else {
                out[pc.row] += taken;
                rest.push(Piece { row: pc.row, frac: left });
            }
        }
        pieces = rest;
    }
    t
}
