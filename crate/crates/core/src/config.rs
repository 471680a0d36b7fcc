//! Centralized numerical tolerances and solver settings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Every tolerance used for validation, in one place.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed `|H - H†|` relative to the largest entry magnitude.
    pub hermitian: f64,
    /// Allowed negative eigenvalue for PSD checks and POVM effects.
    pub psd: f64,
    /// Allowed deviation of a state's trace from 1.
    pub trace: f64,
    /// Allowed `‖Σ effects − Id‖_∞` for a POVM.
    pub completeness: f64,
    /// Relative eigen-reconstruction tolerance.
    pub eigen: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            hermitian: 1e-12,
            psd: 1e-9,
            trace: 1e-9,
            completeness: 1e-9,
            eigen: 1e-9,
        }
    }
}

impl Tolerances {
    /// Defaults widened so they remain meaningful at the precision of `T`.
    pub fn for_scalar<T: Real>() -> Self {
        let eps = T::epsilon_f64();
        let d = Self::default();
        let floor = eps * 1e3;
        Tolerances {
            hermitian: d.hermitian.max(eps * 100.0),
            psd: d.psd.max(floor),
            trace: d.trace.max(floor),
            completeness: d.completeness.max(floor),
            eigen: d.eigen.max(floor),
        }
    }
}

/// Settings for the splitting solvers, the seesaw and the sphere ascent.
///
/// Serialized as a flat key-value record; CLI overrides use the same keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Residual stopping threshold (relative to the problem scale).
    pub tolerance: f64,
    /// Certified-gap stopping threshold (relative to the certified value).
    pub gap_tolerance: f64,
    pub max_iterations: usize,
    pub restarts: usize,
    pub penalty: f64,
    pub over_relaxation: f64,
    /// Iterations between certificate evaluations.
    pub check_every: usize,
    /// Cap on alternating-projection rounds when restoring feasibility.
    pub restoration_rounds: usize,
    /// Outer iterations of the one-way LOCC seesaw.
    pub seesaw_iterations: usize,
    /// Inner iteration cap of the POVM SDP used by the seesaw.
    pub inner_max_iterations: usize,
    /// Iterations of the sphere ascent used for LO estimates.
    pub ascent_iterations: usize,
    pub ascent_restarts: usize,
    pub ascent_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tolerance: 1e-7,
            gap_tolerance: 1e-6,
            max_iterations: 20_000,
            restarts: 5,
            penalty: 1.0,
            over_relaxation: 1.0,
            check_every: 50,
            restoration_rounds: 500,
            seesaw_iterations: 60,
            inner_max_iterations: 4_000,
            ascent_iterations: 2_000,
            ascent_restarts: 50,
            ascent_step: 0.1,
        }
    }
}

impl SolverConfig {
    /// Applies one `key = value` override; unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<F: std::str::FromStr>(key: &str, v: &str) -> Result<F> {
            v.trim()
                .parse::<F>()
                .map_err(|_| Error::validation(format!("solver.{key}: cannot parse {v:?}")))
        }
        match key {
            "tolerance" => self.tolerance = num(key, value)?,
            "gap_tolerance" => self.gap_tolerance = num(key, value)?,
            "max_iterations" => self.max_iterations = num(key, value)?,
            "restarts" => self.restarts = num(key, value)?,
            "penalty" => self.penalty = num(key, value)?,
            "over_relaxation" => self.over_relaxation = num(key, value)?,
            "check_every" => self.check_every = num(key, value)?,
            "restoration_rounds" => self.restoration_rounds = num(key, value)?,
            "seesaw_iterations" => self.seesaw_iterations = num(key, value)?,
            "inner_max_iterations" => self.inner_max_iterations = num(key, value)?,
            "ascent_iterations" => self.ascent_iterations = num(key, value)?,
            "ascent_restarts" => self.ascent_restarts = num(key, value)?,
            "ascent_step" => self.ascent_step = num(key, value)?,
            _ => return Err(Error::validation(format!("unknown solver key {key:?}"))),
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || !(self.gap_tolerance > 0.0) {
            return Err(Error::validation("solver tolerances must be positive"));
        }
        if !(self.penalty > 0.0) {
            return Err(Error::validation("solver penalty must be positive"));
        }
        if !(self.over_relaxation > 0.0 && self.over_relaxation < 2.0) {
            return Err(Error::validation("over_relaxation must lie in (0, 2)"));
        }
        if self.max_iterations == 0 || self.check_every == 0 || self.restarts == 0 {
            return Err(Error::validation(
                "max_iterations, check_every and restarts must be at least 1",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse_and_reject() {
        let mut cfg = SolverConfig::default();
        cfg.set("tolerance", "1e-5").unwrap();
        cfg.set("restarts", "3").unwrap();
        assert_eq!(cfg.tolerance, 1e-5);
        assert_eq!(cfg.restarts, 3);
        assert!(cfg.set("bogus", "1").is_err());
        assert!(cfg.set("penalty", "-1").is_err());
        assert!(cfg.set("max_iterations", "many").is_err());
    }

    #[test]
    fn f32_tolerances_are_looser() {
        let t = Tolerances::for_scalar::<f32>();
        assert!(t.psd > Tolerances::default().psd);
        assert_eq!(Tolerances::for_scalar::<f64>(), Tolerances::default());
    }
}
