//! Monotone functionals: Rényi divergences, their multivariate and tropical
//! versions, the semiring homomorphisms and the KL derivation.
//!
//! All logarithms are natural. Sums of products are evaluated in log space
//! and rescaled by the largest term, so large exponents neither overflow nor
//! underflow. Entries at or below [`SUPPORT_FLOOR`](crate::experiment::SUPPORT_FLOOR)
//! count as zero.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::{positive, Experiment, IndexSet};

/// Which functional a value came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FunctionalId {
    /// `Σ_{rows positive on C} Π_k p_k^{α_k}`, α in the simplex.
    #[serde(rename = "PhiAC")]
    PhiAc,
    /// `Σ p_c^α p_d^{1-α}`, α > 1, dominating column `d`.
    #[serde(rename = "PhiAlphaC_dc")]
    PhiAlphaCDc,
    /// `max p_c / p_d`.
    #[serde(rename = "PhiTropC")]
    PhiTropC,
    /// Column norm; degenerate.
    #[serde(rename = "PhiDegenerate_k")]
    PhiDegenerate,
    #[serde(rename = "RenyiAlpha")]
    RenyiAlpha,
    #[serde(rename = "MultivarD")]
    MultivarD,
    #[serde(rename = "TropicalD")]
    TropicalD,
    #[serde(rename = "Derivation_KL")]
    DerivationKl,
}

impl fmt::Display for FunctionalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        f.write_str(&s)
    }
}

/// Whether a larger value means a stronger (more informative) experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Direction {
    LargerIsStronger,
    SmallerIsStronger,
}

/// Where a parameter point lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// All weights positive.
    SimplexInterior,
    /// Some weights zero.
    SimplexFacet,
    /// One weight above one, dominating column negative.
    Ray,
    /// The max-based endpoint.
    Tropical,
}

/// A weight vector in the probability simplex together with a character.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamPoint {
    pub alpha: Vec<f64>,
    pub region: Region,
    pub character: IndexSet,
}

impl ParamPoint {
    /// Validates `alpha ≥ 0`, `Σ alpha = 1` and `supp alpha ⊆ character ⊆ [d]`.
    pub fn simplex(alpha: Vec<f64>, character: IndexSet) -> Result<Self> {
        if alpha.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::InvalidParameter(format!("weights {alpha:?} must be finite and nonnegative")));
        }
        let s: f64 = alpha.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("weights sum to {s}, expected 1")));
        }
        if character.iter().any(|k| k >= alpha.len()) {
            return Err(Error::InvalidParameter(format!("character {character} exceeds {} columns", alpha.len())));
        }
        if let Some(k) = (0..alpha.len()).find(|&k| alpha[k] > 0.0 && !character.contains(k)) {
            return Err(Error::InvalidParameter(format!("weight {k} is positive but outside character {character}")));
        }
        let region = if alpha.iter().all(|&a| a > 0.0) { Region::SimplexInterior } else { Region::SimplexFacet };
        Ok(ParamPoint { alpha, region, character })
    }

    pub fn support(&self) -> IndexSet {
        IndexSet::new((0..self.alpha.len()).filter(|&k| self.alpha[k] > 0.0))
    }

    /// `alpha = e_k`.
    pub fn vertex(&self) -> Option<usize> {
        let s = self.support();
        (s.len() == 1 && self.alpha[s.as_slice()[0]] == 1.0).then(|| s.as_slice()[0])
    }
}

/// `Σ exp(l)` computed by factoring out the largest term.
pub(crate) fn scaled_exp_sum(logs: impl IntoIterator<Item = f64>) -> f64 {
    let logs: Vec<f64> = logs.into_iter().collect();
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m.exp();
    }
    m.exp() * logs.iter().map(|l| (l - m).exp()).sum::<f64>()
}

/// `log Σ exp(l)`.
pub(crate) fn log_sum_exp(logs: impl IntoIterator<Item = f64>) -> f64 {
    let logs: Vec<f64> = logs.into_iter().collect();
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
}

fn check_vector(v: &[f64], what: &'static str) -> Result<()> {
    if v.iter().any(|x| x.is_nan()) {
        return Err(Error::NaN(what));
    }
    if let Some(i) = v.iter().position(|x| *x < 0.0 || !x.is_finite()) {
        return Err(Error::NegativeEntry { row: i, column: 0, value: v[i] });
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_nan() {
        return Err(Error::NaN("alpha"));
    }
    if alpha < 0.0 {
        return Err(Error::InvalidParameter(format!("order {alpha} is negative")));
    }
    Ok(())
}

/// Rényi divergence `D_α(p‖q)` for `α ∈ [0, ∞]`, natural log.
///
/// Vectors need not be normalised; the formulas are applied as they stand.
/// Orders `α ≥ 1` give `+∞` unless `supp p ⊆ supp q`; orders below one give
/// `+∞` when the supports are disjoint.
pub fn renyi(p: &[f64], q: &[f64], alpha: f64) -> Result<f64> {
    // adding zero turns a −0 from log(1) into +0
    renyi_signed(p, q, alpha).map(|v| v + 0.0)
}

fn renyi_signed(p: &[f64], q: &[f64], alpha: f64) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch { left: p.len(), right: q.len() });
    }
    check_vector(p, "p")?;
    check_vector(q, "q")?;
    check_alpha(alpha)?;
    let pairs = || p.iter().zip(q).map(|(&a, &b)| (a, b));
    let both = || pairs().filter(|(a, b)| positive(*a) && positive(*b));

    if alpha < 1.0 {
        if both().next().is_none() {
            return Ok(f64::INFINITY);
        }
        if alpha == 0.0 {
            return Ok(-both().map(|(_, b)| b).sum::<f64>().ln());
        }
        let l = log_sum_exp(both().map(|(a, b)| alpha * a.ln() + (1.0 - alpha) * b.ln()));
        return Ok(l / (alpha - 1.0));
    }
    if pairs().any(|(a, b)| positive(a) && !positive(b)) {
        return Ok(f64::INFINITY);
    }
    let on_p = || pairs().filter(|(a, _)| positive(*a));
    if alpha == 1.0 {
        Ok(on_p().map(|(a, b)| a * (a / b).ln()).sum())
    } else if alpha == f64::INFINITY {
        Ok(on_p().map(|(a, b)| a.ln() - b.ln()).fold(f64::NEG_INFINITY, f64::max))
    } else {
        let l = log_sum_exp(on_p().map(|(a, b)| alpha * a.ln() + (1.0 - alpha) * b.ln()));
        Ok(l / (alpha - 1.0))
    }
}

fn check_weights(p: &Experiment, w: &[f64]) -> Result<()> {
    if w.len() != p.n_cols() {
        return Err(Error::LengthMismatch { left: p.n_cols(), right: w.len() });
    }
    if w.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("weights must be finite".into()));
    }
    Ok(())
}

/// Log of row `r`'s term `Π p_k^{w_k}`; `None` when a positive weight hits a zero.
fn log_term(r: &[f64], w: &[f64]) -> Option<f64> {
    if r.iter().zip(w).any(|(x, a)| *a > 0.0 && !positive(*x)) {
        return None;
    }
    if r.iter().zip(w).any(|(x, a)| *a < 0.0 && !positive(*x)) {
        return Some(f64::INFINITY);
    }
    Some(r.iter().zip(w).filter(|(_, a)| **a != 0.0).map(|(x, a)| a * x.ln()).sum())
}

/// Multivariate divergence `(max α − 1)^{-1} log Σ_i Π_k p_{ik}^{α_k}` for weights summing to one.
///
/// Rows where a positively weighted entry vanishes contribute nothing; a
/// vanishing entry under a negative weight makes the sum infinite.
pub fn multivar_divergence(p: &Experiment, alpha: &[f64]) -> Result<f64> {
    check_weights(p, alpha)?;
    let s: f64 = alpha.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("weights sum to {s}, expected 1")));
    }
    let top = alpha.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top == 1.0 {
        return Err(Error::InvalidParameter("largest weight equals one".into()));
    }
    let l = log_sum_exp(p.rows().filter_map(|r| log_term(r, alpha)));
    Ok(l / (top - 1.0))
}

/// Tropical divergence `(max β)^{-1} log max_i Π_k p_{ik}^{β_k}`.
pub fn tropical_divergence(p: &Experiment, beta: &[f64]) -> Result<f64> {
    check_weights(p, beta)?;
    let top = beta.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if top <= 0.0 {
        return Err(Error::InvalidParameter("largest weight must be positive".into()));
    }
    let m = p.rows().filter_map(|r| log_term(r, beta)).fold(f64::NEG_INFINITY, f64::max);
    Ok(m / top)
}

/// `Σ_{i ∈ I(P,C)} Π_k p_{ik}^{α_k}` over rows positive on every column of the character.
pub fn phi(p: &Experiment, point: &ParamPoint) -> Result<f64> {
    check_weights(p, &point.alpha)?;
    let c = &point.character;
    Ok(scaled_exp_sum(p.rows().filter(|r| c.iter().all(|k| positive(r[k]))).map(|r| {
        r.iter().zip(&point.alpha).filter(|(_, a)| **a != 0.0).map(|(x, a)| a * x.ln()).sum::<f64>()
    })))
}

/// Shorthand for [`phi`] with an unchecked-by-type weight vector.
pub fn phi_at(p: &Experiment, alpha: &[f64], character: &[usize]) -> Result<f64> {
    phi(p, &ParamPoint::simplex(alpha.to_vec(), IndexSet::new(character.iter().copied()))?)
}

/// The degenerate homomorphism at vertex `k`: the norm of column `k`.
pub fn phi_degenerate(p: &Experiment, k: usize) -> Result<f64> {
    if k >= p.n_cols() {
        return Err(Error::InvalidParameter(format!("column {k} out of range")));
    }
    Ok(p.column_norms()[k])
}

fn require_dominating(p: &Experiment, c: usize) -> Result<usize> {
    let d = p.n_cols();
    if d < 2 || c >= d - 1 {
        return Err(Error::InvalidParameter(format!("column {c} must precede the dominating column {}", d.max(1) - 1)));
    }
    if !p.has_dominating_column() || !p.in_semiring() {
        return Err(Error::RegimeMismatch {
            expected: "DominatingColumn".into(),
            found: p.classify_regime().to_string(),
        });
    }
    Ok(d - 1)
}

/// `log Σ_i p_{ic}^α p_{id}^{1−α}`, α > 1, summed over rows with `p_c > 0`.
pub fn log_phi_dc(p: &Experiment, alpha: f64, c: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if alpha <= 1.0 || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("order {alpha} must lie in (1, ∞)")));
    }
    let d = require_dominating(p, c)?;
    Ok(log_sum_exp(
        p.rows().filter(|r| positive(r[c])).map(|r| alpha * r[c].ln() + (1.0 - alpha) * r[d].ln()),
    ))
}

/// `Σ_i p_{ic}^α p_{id}^{1−α}` for α > 1 in the dominating-column regime.
pub fn phi_dc(p: &Experiment, alpha: f64, c: usize) -> Result<f64> {
    log_phi_dc(p, alpha, c).map(f64::exp)
}

/// `max_i p_{ic} / p_{id}` in the dominating-column regime (0 if column `c` vanishes).
pub fn phi_tropical(p: &Experiment, c: usize) -> Result<f64> {
    let d = require_dominating(p, c)?;
    Ok(p.rows().filter(|r| positive(r[c])).map(|r| r[c] / r[d]).fold(0.0, f64::max))
}

/// KL divergence of column `k` from the dominating column.
///
/// Outside the dominating-column regime the only derivation is zero, so the
/// call is rejected there.
pub fn derivation_kl(p: &Experiment, k: usize) -> Result<f64> {
    let d = require_dominating(p, k)?;
    Ok(p.rows().filter(|r| positive(r[k])).map(|r| r[k] * (r[k] / r[d]).ln()).sum())
}

/// Margins of one order in [`klimesh_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KlimeshMargin {
    #[serde(serialize_with = "crate::report::ser_ext")]
    pub alpha: f64,
    /// `D_α(p‖u) − D_α(q‖u)`.
    #[serde(serialize_with = "crate::report::ser_ext")]
    pub from_uniform: f64,
    /// `D_α(u‖p) − D_α(u‖q)`.
    #[serde(serialize_with = "crate::report::ser_ext")]
    pub to_uniform: f64,
}

fn ext_diff(a: f64, b: f64) -> f64 {
    if a == b { 0.0 } else { a - b }
}

fn padded(p: &[f64], q: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = p.len().max(q.len());
    let mut a = p.to_vec();
    let mut b = q.to_vec();
    a.resize(n, 0.0);
    b.resize(n, 0.0);
    (a, b)
}

/// Divergence margins against the uniform distribution on `supp p ∪ supp q`.
pub fn klimesh_check(p: &[f64], q: &[f64], grid: &[f64]) -> Result<Vec<KlimeshMargin>> {
    let (p, q) = padded(p, q);
    let union = p.iter().zip(&q).filter(|(a, b)| positive(**a) || positive(**b)).count();
    let u: Vec<f64> = p
        .iter()
        .zip(&q)
        .map(|(a, b)| if positive(*a) || positive(*b) { 1.0 / union as f64 } else { 0.0 })
        .collect();
    grid.iter()
        .map(|&alpha| {
            if alpha < 0.5 {
                return Err(Error::InvalidParameter(format!("order {alpha} below 1/2")));
            }
            Ok(KlimeshMargin {
                alpha,
                from_uniform: ext_diff(renyi(&p, &u, alpha)?, renyi(&q, &u, alpha)?),
                to_uniform: ext_diff(renyi(&u, &p, alpha)?, renyi(&u, &q, alpha)?),
            })
        })
        .collect()
}

/// `‖v‖_α`, with `α = ∞` the max norm.
pub fn lalpha_norm(v: &[f64], alpha: f64) -> f64 {
    if alpha == f64::INFINITY {
        return v.iter().copied().fold(0.0, f64::max);
    }
    let l = log_sum_exp(v.iter().filter(|x| positive(**x)).map(|x| alpha * x.ln()));
    (l / alpha).exp()
}

/// Margins `‖p‖_α − ‖q‖_α` for orders `α ≥ 1`.
pub fn lalpha_norm_check(p: &[f64], q: &[f64], grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_vector(p, "p")?;
    check_vector(q, "q")?;
    grid.iter()
        .map(|&alpha| {
            if alpha.is_nan() || alpha < 1.0 {
                return Err(Error::InvalidParameter(format!("order {alpha} below 1")));
            }
            Ok((alpha, lalpha_norm(p, alpha) - lalpha_norm(q, alpha)))
        })
        .collect()
}
