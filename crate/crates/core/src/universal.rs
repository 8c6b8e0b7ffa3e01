//! Power universality: experiments whose tensor powers can absorb any
//! majorization slack.
//!
//! In the minimal-restrictions regime `U` is power universal exactly when no
//! column support contains another. With a dominating last column every other
//! support must in addition be a strict subset of the last one.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiment::{positive, Experiment, IndexSet};
use crate::monotone::phi_at;

/// Tolerance for unit-norm preconditions.
const NORM_TOL: f64 = 1e-9;
/// `Φ < 1 − PHI_GAP` counts as strictly below one.
const PHI_GAP: f64 = 1e-12;

/// Which support relation a pair was tested for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// Some row is positive in `k` and zero in `k_prime`.
    NotContained,
    /// `k_prime` is the dominating column and some row is zero in `k`, positive in `k_prime`.
    StrictlyInside,
}

/// Outcome for one ordered pair of columns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairEvidence {
    pub k: usize,
    pub k_prime: usize,
    pub relation: Relation,
    /// A row witnessing the relation, if any.
    pub row: Option<usize>,
}

/// Classification result.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniversalityReport {
    pub power_universal: bool,
    pub evidence: Vec<PairEvidence>,
}

fn first_row(u: &Experiment, pred: impl Fn(&[f64]) -> bool) -> Option<usize> {
    u.rows().position(pred)
}

fn not_contained(u: &Experiment, k: usize, kp: usize) -> PairEvidence {
    PairEvidence {
        k,
        k_prime: kp,
        relation: Relation::NotContained,
        row: first_row(u, |r| positive(r[k]) && !positive(r[kp])),
    }
}

fn finish(evidence: Vec<PairEvidence>) -> UniversalityReport {
    UniversalityReport { power_universal: evidence.iter().all(|e| e.row.is_some()), evidence }
}

fn require_semiring(u: &Experiment) -> Result<()> {
    u.require_unit_norm(NORM_TOL)?;
    if !u.in_semiring() {
        return Err(Error::RegimeMismatch { expected: "MinimalRestrictions".into(), found: "Invalid".into() });
    }
    Ok(())
}

fn require_dominating(u: &Experiment) -> Result<()> {
    require_semiring(u)?;
    if !u.has_dominating_column() {
        return Err(Error::RegimeMismatch {
            expected: "DominatingColumn".into(),
            found: u.classify_regime().to_string(),
        });
    }
    Ok(())
}

/// Support test in the minimal-restrictions regime.
pub fn classify_minimal(u: &Experiment) -> Result<UniversalityReport> {
    require_semiring(u)?;
    let d = u.n_cols();
    let evidence = (0..d)
        .flat_map(|k| (0..d).filter(move |&kp| kp != k).map(move |kp| (k, kp)))
        .map(|(k, kp)| not_contained(u, k, kp))
        .collect();
    Ok(finish(evidence))
}

/// Support test in the dominating-column regime.
pub fn classify_dominating(u: &Experiment) -> Result<UniversalityReport> {
    require_dominating(u)?;
    let last = u.n_cols() - 1;
    let mut evidence: Vec<PairEvidence> = (0..last)
        .map(|k| PairEvidence {
            k,
            k_prime: last,
            relation: Relation::StrictlyInside,
            row: first_row(u, |r| !positive(r[k]) && positive(r[last])),
        })
        .collect();
    for k in 0..last {
        for kp in (0..last).filter(|&kp| kp != k) {
            evidence.push(not_contained(u, k, kp));
        }
    }
    Ok(finish(evidence))
}

fn unit(d: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[k] = 1.0;
    v
}

/// `Φ_{e_k,{k,k'}}(U) < 1` for all `k ≠ k'`.
pub fn homomorphism_criterion_minimal(u: &Experiment) -> Result<bool> {
    require_semiring(u)?;
    let d = u.n_cols();
    for k in 0..d {
        for kp in (0..d).filter(|&kp| kp != k) {
            if phi_at(u, &unit(d, k), &[k, kp])? >= 1.0 - PHI_GAP {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `Φ_{e_d,{k,d}}(U) ≠ 1` for `k < d` and `Φ_{e_k,{k,k',d}}(U) ≠ 1` for `k ≠ k' < d`.
pub fn homomorphism_criterion_dominating(u: &Experiment) -> Result<bool> {
    require_dominating(u)?;
    let d = u.n_cols();
    let last = d - 1;
    let below_one = |v: f64| (v - 1.0).abs() > PHI_GAP;
    for k in 0..last {
        if !below_one(phi_at(u, &unit(d, last), &[k, last])?) {
            return Ok(false);
        }
        for kp in (0..last).filter(|&kp| kp != k) {
            if !below_one(phi_at(u, &unit(d, k), &[k, kp, last])?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// For each column `k`, whether `U^⊠(d−1)` has a row whose support is exactly `{k}`.
pub fn singleton_rows(u: &Experiment, row_cap: usize) -> Result<Vec<bool>> {
    let d = u.n_cols();
    let power = u.tensor_power(d.saturating_sub(1) as u32, row_cap)?;
    Ok((0..d)
        .map(|k| {
            let target = IndexSet::new([k]);
            power.rows().any(|r| IndexSet::new((0..d).filter(|&j| positive(r[j]))) == target)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp(cols: &[&[f64]]) -> Experiment {
        Experiment::from_columns(&cols.iter().map(|c| c.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn crossing_supports_are_universal() {
        let u = exp(&[&[0.5, 0.5, 0.0], &[0.5, 0.0, 0.5]]);
        let rep = classify_minimal(&u).unwrap();
        assert!(rep.power_universal);
        assert!(homomorphism_criterion_minimal(&u).unwrap());
        assert_eq!(singleton_rows(&u, 1000).unwrap(), vec![true, true]);
    }

    #[test]
    fn nested_supports_are_not() {
        let u = exp(&[&[1.0, 0.0], &[0.5, 0.5]]);
        let rep = classify_minimal(&u).unwrap();
        assert!(!rep.power_universal);
        assert!(!homomorphism_criterion_minimal(&u).unwrap());
        // but in the dominating-column semiring it is
        assert!(classify_dominating(&u).unwrap().power_universal);
        assert!(homomorphism_criterion_dominating(&u).unwrap());
    }

    #[test]
    fn three_column_star_pattern() {
        let u = exp(&[&[0.3, 0.7, 0.0], &[0.4, 0.0, 0.6], &[0.2, 0.3, 0.5]]);
        assert!(classify_dominating(&u).unwrap().power_universal);
        assert!(homomorphism_criterion_dominating(&u).unwrap());
        let nested = exp(&[&[0.3, 0.7, 0.0], &[0.3, 0.7, 0.0], &[0.2, 0.3, 0.5]]);
        assert!(!classify_dominating(&nested).unwrap().power_universal);
    }

    #[test]
    fn preconditions() {
        let u = exp(&[&[2.0, 0.0], &[0.5, 0.5]]);
        assert!(matches!(classify_minimal(&u), Err(Error::NotUnitNorm { .. })));
        let min = exp(&[&[0.5, 0.5, 0.0], &[0.5, 0.0, 0.5]]);
        assert!(classify_dominating(&min).is_err());
    }
}
