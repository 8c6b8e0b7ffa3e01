//! Finite parameter grids standing in for the continuous monotone families.

use serde::Serialize;

use crate::error::{Error, Result};

/// Grid used by the certifiers.
///
/// Grids for resolution `r` are contained in the grids for `2r`, so doubling
/// the resolution only adds checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    /// Weights on the simplex are multiples of `1 / simplex_resolution`.
    pub simplex_resolution: usize,
    /// Largest finite order on the rays above one.
    pub alpha_max: f64,
    /// Add the order `∞` (max-based functionals).
    pub include_infinity: bool,
    /// Margins within this distance of zero count as ties.
    pub tie_tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { simplex_resolution: 8, alpha_max: 64.0, include_infinity: true, tie_tol: 1e-9 }
    }
}

impl GridSpec {
    pub fn new(simplex_resolution: usize, alpha_max: f64) -> Self {
        GridSpec { simplex_resolution, alpha_max, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.simplex_resolution < 2 {
            return Err(Error::InvalidParameter("grid resolution must be at least 2".into()));
        }
        if !(self.alpha_max.is_finite() && self.alpha_max > 1.0) {
            return Err(Error::InvalidParameter(format!("alpha_max {} must be finite and above 1", self.alpha_max)));
        }
        if self.tie_tol.is_nan() || self.tie_tol < 0.0 {
            return Err(Error::InvalidParameter("tie tolerance must be nonnegative".into()));
        }
        Ok(())
    }

    /// Orders `j / r` for `j = 0, …, r − 1`.
    pub fn sub_unit_orders(&self) -> Vec<f64> {
        let r = self.simplex_resolution;
        (0..r).map(|j| j as f64 / r as f64).collect()
    }

    /// `4r` log-spaced orders in `(1, alpha_max]`.
    pub fn ray_orders(&self) -> Vec<f64> {
        let k = 4 * self.simplex_resolution;
        (1..=k).map(|j| if j == k { self.alpha_max } else { self.alpha_max.powf(j as f64 / k as f64) }).collect()
    }

    /// Sub-unit orders, one, the ray, and `∞` when included.
    pub fn renyi_orders(&self) -> Vec<f64> {
        let mut v = self.sub_unit_orders();
        v.push(1.0);
        v.extend(self.ray_orders());
        if self.include_infinity {
            v.push(f64::INFINITY);
        }
        v
    }
}

/// All weight vectors of length `d` whose entries are multiples of `1/r` summing to one.
pub fn simplex_grid(d: usize, r: usize) -> Vec<Vec<f64>> {
    fn rec(d: usize, left: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() + 1 == d {
            cur.push(left);
            out.push(cur.iter().map(|&j| j as f64 / r as f64).collect());
            cur.pop();
            return;
        }
        for j in (0..=left).rev() {
            cur.push(j);
            rec(d, left - j, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if d > 0 {
        rec(d, r, r, &mut Vec::with_capacity(d), &mut out);
    }
    out
}
