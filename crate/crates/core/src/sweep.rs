//! Hou-family sweeps along the theta slice and detection-threshold search.

use std::f64::consts::FRAC_PI_4;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::criteria::{Criterion, Registry, Subject};
use crate::error::{Error, Result};
use crate::states::{closed_witness, hou_state, slice_to_params, HouParams, ThetaSlice};

pub const DEFAULT_Q2: f64 = 0.5;
pub const DEFAULT_Q4: f64 = 0.01;
pub const DEFAULT_STEPS: usize = 200;
pub const DEFAULT_THRESHOLD_TOL: f64 = 1e-6;

pub const CSV_HEADER: &str = "theta,q1,q3,bound_phi,bound_ppt,bound_realign,bound_witness";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub theta: f64,
    pub q1: f64,
    pub q3: f64,
    pub bound_phi: f64,
    pub bound_ppt: f64,
    pub bound_realign: f64,
    pub bound_witness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceRange {
    pub q2: f64,
    pub q4: f64,
    pub theta_min: f64,
    pub theta_max: f64,
}

impl Default for SliceRange {
    fn default() -> Self {
        SliceRange {
            q2: DEFAULT_Q2,
            q4: DEFAULT_Q4,
            theta_min: 0.0,
            theta_max: FRAC_PI_4,
        }
    }
}

impl SliceRange {
    pub fn validate(&self) -> Result<()> {
        ThetaSlice::new(self.q2, self.q4, self.theta_min)?;
        ThetaSlice::new(self.q2, self.q4, self.theta_max)?;
        if self.theta_min >= self.theta_max {
            return Err(Error::InvalidParams(format!(
                "theta_min = {} must be below theta_max = {}",
                self.theta_min, self.theta_max
            )));
        }
        Ok(())
    }

    pub fn params_at(&self, theta: f64) -> Result<HouParams> {
        slice_to_params(&ThetaSlice::new(self.q2, self.q4, theta)?)
    }
}

/// Inclusive grid of `steps` points; the last point is exactly `max`.
pub fn theta_grid(min: f64, max: f64, steps: usize) -> Vec<f64> {
    let h = (max - min) / (steps - 1) as f64;
    (0..steps)
        .map(|k| if k + 1 == steps { max } else { min + k as f64 * h })
        .collect()
}

/// Bound of `criterion` for the slice state at `theta`.
///
/// With `closed_form` the analytic Hou expression is used; otherwise the state is
/// built and the criterion evaluated numerically.
pub fn bound_on_slice(criterion: &dyn Criterion, range: &SliceRange, theta: f64, closed_form: bool) -> Result<f64> {
    let q = range.params_at(theta)?;
    if closed_form {
        if let Some(v) = criterion.closed_form(&q) {
            return Ok(v);
        }
    }
    let rho = hou_state(&q)?;
    Ok(criterion.evaluate(&Subject::hou(&rho, q))?.bound)
}

/// One row per grid point, ordered by theta. The witness column is always the
/// closed form since it has no numeric route.
pub fn sweep(range: &SliceRange, steps: usize, closed_form: bool) -> Result<Vec<SweepRow>> {
    range.validate()?;
    if steps < 2 {
        return Err(Error::InvalidParams(format!("steps = {steps}, need at least 2")));
    }
    let registry = Registry::builtin();
    let phi = registry.lookup("phi")?;
    let ppt = registry.lookup("ppt")?;
    let realign = registry.lookup("realign")?;

    theta_grid(range.theta_min, range.theta_max, steps)
        .into_par_iter()
        .map(|theta| {
            let q = range.params_at(theta)?;
            Ok(SweepRow {
                theta,
                q1: q.q1,
                q3: q.q3,
                bound_phi: bound_on_slice(phi, range, theta, closed_form)?,
                bound_ppt: bound_on_slice(ppt, range, theta, closed_form)?,
                bound_realign: bound_on_slice(realign, range, theta, closed_form)?,
                bound_witness: closed_witness(&q),
            })
        })
        .collect()
}

/// CSV with full round-trip float formatting.
pub fn write_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.theta, r.q1, r.q3, r.bound_phi, r.bound_ppt, r.bound_realign, r.bound_witness
        )?;
    }
    Ok(())
}

/// Smallest theta on the slice where the bound exceeds `detection_tol`, by bisection
/// down to an interval of width `tol`.
pub fn threshold(
    criterion: &dyn Criterion,
    range: &SliceRange,
    tol: f64,
    detection_tol: f64,
    closed_form: bool,
) -> Result<f64> {
    range.validate()?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParams(format!("bisection tolerance {tol} must be positive")));
    }
    let detects = |theta: f64| -> Result<bool> { Ok(bound_on_slice(criterion, range, theta, closed_form)? > detection_tol) };

    let (mut lo, mut hi) = (range.theta_min, range.theta_max);
    if detects(lo)? {
        return Err(Error::NoCrossing(format!(
            "'{}' already detects entanglement at theta = {lo}",
            criterion.name()
        )));
    }
    if !detects(hi)? {
        return Err(Error::NoCrossing(format!(
            "'{}' never exceeds {detection_tol:e} on [{lo}, {hi}]",
            criterion.name()
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if detects(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn grid_is_inclusive() {
        let g = theta_grid(0.0, FRAC_PI_4, 5);
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[4], FRAC_PI_4);
        assert_abs_diff_eq!(g[2], FRAC_PI_4 / 2.0, epsilon = 1e-16);
    }

    #[test]
    fn sweep_rejects_bad_ranges() {
        assert!(sweep(&SliceRange::default(), 1, true).is_err());
        let r = SliceRange { theta_min: 0.5, theta_max: 0.2, ..Default::default() };
        assert!(sweep(&r, 10, true).is_err());
        let r = SliceRange { theta_max: 1.0, ..Default::default() };
        assert!(sweep(&r, 10, true).is_err());
        let r = SliceRange { q2: 0.9, q4: 0.2, ..Default::default() };
        assert!(sweep(&r, 10, true).is_err());
    }

    #[test]
    fn rows_respect_slice_invariant() {
        let rows = sweep(&SliceRange::default(), 17, false).unwrap();
        for r in &rows {
            assert_abs_diff_eq!(r.q1 + r.q3, 1.0 - DEFAULT_Q2 - DEFAULT_Q4, epsilon = 1e-12);
        }
    }

    #[test]
    fn csv_layout() {
        let rows = sweep(&SliceRange::default(), 3, true).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,0,"));
        let parsed: Vec<f64> = lines[3].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(parsed[0], FRAC_PI_4);
    }

    #[test]
    fn witness_has_no_crossing() {
        let r = Registry::builtin();
        let err = threshold(r.lookup("witness").unwrap(), &SliceRange::default(), 1e-6, 1e-9, true).unwrap_err();
        assert!(matches!(err, Error::NoCrossing(_)));
    }

    #[test]
    fn phi_threshold_closed_form() {
        let r = Registry::builtin();
        let t = threshold(r.lookup("phi").unwrap(), &SliceRange::default(), 1e-10, 1e-9, true).unwrap();
        assert_abs_diff_eq!(t, (1.0f64 / 7.0).asin(), epsilon = 1e-6);
    }
}
