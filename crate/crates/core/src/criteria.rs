//! Named bound criteria behind a common trait, selectable at runtime.
//!
//! The built-in registry holds `phi`, `ppt`, `realign` and `witness`. The witness
//! bound exists only for Hou-family states; the other three work on any state and
//! additionally know their Hou closed forms.

use crate::bipartite::DensityMatrix;
use crate::bounds::{bound_from_functional, phi_trace_norm, ppt_trace_norm, realign_trace_norm};
use crate::error::{Error, Result};
use crate::states::{closed_phi, closed_ppt, closed_realign, closed_witness, HouParams};

/// A state together with its Hou parameters when it belongs to that family.
#[derive(Debug, Clone, Copy)]
pub struct Subject<'a> {
    pub rho: &'a DensityMatrix,
    pub hou: Option<HouParams>,
}

impl<'a> Subject<'a> {
    pub fn new(rho: &'a DensityMatrix) -> Self {
        Subject { rho, hou: None }
    }

    pub fn hou(rho: &'a DensityMatrix, q: HouParams) -> Self {
        Subject { rho, hou: Some(q) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    /// The trace norm the functional was built from, if any.
    pub trace_norm: Option<f64>,
    pub functional: f64,
    pub bound: f64,
}

pub trait Criterion: Send + Sync {
    fn name(&self) -> &'static str;

    fn summary(&self) -> &'static str;

    fn evaluate(&self, subject: &Subject<'_>) -> Result<Evaluation>;

    /// Analytic bound on the Hou family, when known.
    fn closed_form(&self, _q: &HouParams) -> Option<f64> {
        None
    }
}

fn from_trace_norm(rho: &DensityMatrix, trace_norm: f64, offset: f64) -> Result<Evaluation> {
    let functional = trace_norm - offset;
    Ok(Evaluation {
        trace_norm: Some(trace_norm),
        functional,
        bound: bound_from_functional(functional, rho.dim())?,
    })
}

pub struct PositiveMap;

impl Criterion for PositiveMap {
    fn name(&self) -> &'static str {
        "phi"
    }

    fn summary(&self) -> &'static str {
        "||(I ⊗ Φ) rho|| - (N - 1)"
    }

    fn evaluate(&self, s: &Subject<'_>) -> Result<Evaluation> {
        from_trace_norm(s.rho, phi_trace_norm(s.rho)?, s.rho.dim() as f64 - 1.0)
    }

    fn closed_form(&self, q: &HouParams) -> Option<f64> {
        Some(closed_phi(q))
    }
}

pub struct PartialTranspose;

impl Criterion for PartialTranspose {
    fn name(&self) -> &'static str {
        "ppt"
    }

    fn summary(&self) -> &'static str {
        "||rho^T1|| - 1"
    }

    fn evaluate(&self, s: &Subject<'_>) -> Result<Evaluation> {
        from_trace_norm(s.rho, ppt_trace_norm(s.rho)?, 1.0)
    }

    fn closed_form(&self, q: &HouParams) -> Option<f64> {
        Some(closed_ppt(q))
    }
}

pub struct Realignment;

impl Criterion for Realignment {
    fn name(&self) -> &'static str {
        "realign"
    }

    fn summary(&self) -> &'static str {
        "||realign(rho)|| - 1"
    }

    fn evaluate(&self, s: &Subject<'_>) -> Result<Evaluation> {
        from_trace_norm(s.rho, realign_trace_norm(s.rho)?, 1.0)
    }

    fn closed_form(&self, q: &HouParams) -> Option<f64> {
        Some(closed_realign(q))
    }
}

/// Breuer witness bound, available only in closed form on the Hou family.
pub struct HouWitness;

impl Criterion for HouWitness {
    fn name(&self) -> &'static str {
        "witness"
    }

    fn summary(&self) -> &'static str {
        "-tr(W rho), Hou family only"
    }

    fn evaluate(&self, s: &Subject<'_>) -> Result<Evaluation> {
        let q = s.hou.ok_or(Error::Unsupported {
            criterion: "witness",
            reason: "the witness bound is only defined for Hou-family states",
        })?;
        let bound = closed_witness(&q);
        let nf = s.rho.dim() as f64;
        Ok(Evaluation {
            trace_norm: None,
            functional: bound / (2.0 / (nf * (nf - 1.0))).sqrt(),
            bound,
        })
    }

    fn closed_form(&self, q: &HouParams) -> Option<f64> {
        Some(closed_witness(q))
    }
}

#[derive(Default)]
pub struct Registry {
    entries: Vec<Box<dyn Criterion>>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// `phi`, `ppt`, `realign`, `witness`, in that order.
    pub fn builtin() -> Self {
        let mut r = Registry::new();
        for c in [
            Box::new(PositiveMap) as Box<dyn Criterion>,
            Box::new(PartialTranspose),
            Box::new(Realignment),
            Box::new(HouWitness),
        ] {
            r.register(c).expect("built-in names are distinct");
        }
        r
    }

    pub fn register(&mut self, criterion: Box<dyn Criterion>) -> Result<()> {
        if self.get(criterion.name()).is_some() {
            return Err(Error::DuplicateCriterion(criterion.name().to_string()));
        }
        self.entries.push(criterion);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&dyn Criterion> {
        self.entries.iter().find(|c| c.name() == name).map(|c| c.as_ref())
    }

    pub fn lookup(&self, name: &str) -> Result<&dyn Criterion> {
        self.get(name).ok_or_else(|| Error::UnknownCriterion(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.iter().map(|c| c.name())
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn Criterion> {
        self.entries.iter().map(|c| c.as_ref())
    }

    /// Resolves a comma-separated list such as `"phi,ppt"`, keeping its order.
    pub fn select(&self, list: &str) -> Result<Vec<&dyn Criterion>> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|name| self.lookup(name))
            .collect()
    }
}
