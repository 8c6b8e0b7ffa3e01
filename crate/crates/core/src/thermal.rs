//! Thermal state conversion for states diagonal in the energy eigenbasis.
//!
//! A channel that fixes the Gibbs state maps `ρ` to `σ` exactly when the
//! pair (spectrum of `ρ`, Gibbs vector) majorizes (spectrum of `σ`, Gibbs
//! vector), so every question here becomes a dichotomy question with the
//! Gibbs vector as the dominating column.

use serde::Serialize;

use crate::certify::{certify_dichotomy_asymptotic, certify_general_dichotomy_asymptotic, CertReport, Verdict};
use crate::error::{Error, Result};
use crate::experiment::{positive, Experiment};
use crate::grid::GridSpec;
use crate::monotone::renyi;

const NORM_TOL: f64 = 1e-9;
/// Spectra closer than this (max norm) are treated as the same state.
const SAME_STATE_TOL: f64 = 1e-12;

/// Energy levels and inverse temperature.
///
/// Levels are shifted so that the lowest is 1 whenever some level is not
/// positive; the shift leaves the Gibbs vector unchanged and is recorded.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThermalSystem {
    energies: Vec<f64>,
    beta: f64,
    shift: f64,
}

impl ThermalSystem {
    pub fn new(energies: Vec<f64>, beta: f64) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::InvalidParameter("no energy levels".into()));
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidParameter("energies must be finite".into()));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::InvalidParameter(format!("inverse temperature {beta} must be positive")));
        }
        let low = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let shift = if low <= 0.0 { 1.0 - low } else { 0.0 };
        let energies = energies.into_iter().map(|e| e + shift).collect();
        Ok(ThermalSystem { energies, beta, shift })
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Constant added to every level by [`ThermalSystem::new`].
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// `e^{−βE_i} / Z`.
    pub fn gibbs(&self) -> Vec<f64> {
        let low = self.energies.iter().copied().fold(f64::INFINITY, f64::min);
        let w: Vec<f64> = self.energies.iter().map(|e| (-self.beta * (e - low)).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    }

    fn check_state(&self, v: &[f64], name: &'static str) -> Result<()> {
        if v.len() != self.energies.len() {
            return Err(Error::LengthMismatch { left: self.energies.len(), right: v.len() });
        }
        if v.iter().any(|x| x.is_nan()) {
            return Err(Error::NaN(name));
        }
        if let Some(i) = v.iter().position(|x| *x < 0.0 || !x.is_finite()) {
            return Err(Error::NegativeEntry { row: i, column: 0, value: v[i] });
        }
        let s: f64 = v.iter().sum();
        if (s - 1.0).abs() > NORM_TOL {
            return Err(Error::NotUnitNorm { column: 0, norm: s });
        }
        Ok(())
    }
}

/// Gibbs vector for the given levels.
pub fn gibbs_vector(energies: &[f64], beta: f64) -> Result<Vec<f64>> {
    Ok(ThermalSystem::new(energies.to_vec(), beta)?.gibbs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ThermalCase {
    BothFullRank,
    RhoNotFullRank,
    /// A full-rank state cannot reach a rank-deficient one.
    ImpossibleSupport,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Answer {
    Yes,
    No,
    Inconclusive,
}

/// Outcome of [`thermal_check`].
#[derive(Clone, Debug, Serialize)]
pub struct ThermalVerdict {
    pub answer: Answer,
    pub case: ThermalCase,
    pub energy_shift: f64,
    /// The underlying dichotomy certificate, when one was run.
    pub report: Option<CertReport>,
    pub notes: Vec<String>,
}

fn full_rank(v: &[f64]) -> bool {
    v.iter().all(|&x| positive(x))
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= SAME_STATE_TOL)
}

/// Asymptotic (equivalently, catalytic with vanishing error) thermal
/// convertibility of `rho` into `sigma`.
pub fn thermal_check(rho: &[f64], sigma: &[f64], sys: &ThermalSystem, grid: &GridSpec) -> Result<ThermalVerdict> {
    sys.check_state(rho, "rho")?;
    sys.check_state(sigma, "sigma")?;
    let gamma = sys.gibbs();
    let case = match (full_rank(rho), full_rank(sigma)) {
        (true, false) => ThermalCase::ImpossibleSupport,
        (true, true) => ThermalCase::BothFullRank,
        (false, _) => ThermalCase::RhoNotFullRank,
    };
    let verdict = |answer, report, notes| ThermalVerdict { answer, case, energy_shift: sys.shift(), report, notes };

    if rho == sigma {
        return Ok(verdict(Answer::Yes, None, vec!["identical states".into()]));
    }
    if case == ThermalCase::ImpossibleSupport {
        return Ok(verdict(Answer::No, None, vec![]));
    }
    if case == ThermalCase::BothFullRank && close(rho, &gamma) {
        // the Gibbs state is a fixed point of every allowed channel
        let answer = if close(sigma, &gamma) { Answer::Yes } else { Answer::No };
        return Ok(verdict(answer, None, vec!["input is the Gibbs state".into()]));
    }
    let p = Experiment::from_columns(&[rho.to_vec(), gamma.clone()])?;
    let q = Experiment::from_columns(&[sigma.to_vec(), gamma])?;
    let report = match case {
        ThermalCase::BothFullRank => certify_general_dichotomy_asymptotic(&p, &q, grid)?,
        _ => certify_dichotomy_asymptotic(&p, &q, grid)?,
    };
    let answer = match report.verdict {
        Verdict::Sufficient => Answer::Yes,
        Verdict::NecessaryFail => Answer::No,
        Verdict::Inconclusive => Answer::Inconclusive,
    };
    Ok(verdict(answer, Some(report), vec![]))
}

/// Which argument order of the divergence against the Gibbs vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FreeEnergySign {
    /// `D_α(ρ‖γ)`.
    Plus,
    /// `D_α(γ‖ρ)`.
    Minus,
}

/// Rényi free-energy difference of `rho` from the Gibbs state.
pub fn free_energy(rho: &[f64], sys: &ThermalSystem, alpha: f64, sign: FreeEnergySign) -> Result<f64> {
    sys.check_state(rho, "rho")?;
    let gamma = sys.gibbs();
    match sign {
        FreeEnergySign::Plus => renyi(rho, &gamma, alpha),
        FreeEnergySign::Minus => renyi(&gamma, rho, alpha),
    }
}
