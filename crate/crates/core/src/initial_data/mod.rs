//! Asymptotic data (e, k) on hyperbolic space, with derivative providers.

mod constraints;
mod decay;
mod families;
mod grid;
mod spline;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ChartPoint;

pub use constraints::{
    boundary_k_vector, classify_causal, constraint_deficit, constraints_map, dec_check, dec_sample,
    integrability_probe, BoundaryData, BoundaryVector, CausalVerdict, ConstraintDeficit, DecSample,
    DecSampleReport, IntegrabilityReport, DEC_TOL,
};
pub use decay::{validate_decay, DecayReport};
pub use families::{ExactHyperbolic, GaussianPerturbation, LinearCombination, SchwarzschildAds};
pub use grid::{export_grid, GridData, GridHeader};

/// Default finite-difference step in r and in the angles.
pub const DEFAULT_FD_STEP: f64 = 1e-4;
/// Steps below this lose second derivatives to roundoff.
pub const MIN_FD_STEP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference { step: f64 },
}

/// e, k and their chart partials at one point. `de[a]` is ∂_a e and
/// `dde[a * n + b]` is ∂_a ∂_b e.
#[derive(Clone, Debug)]
pub struct FieldJet {
    pub e: DMatrix<f64>,
    pub k: DMatrix<f64>,
    pub de: Vec<DMatrix<f64>>,
    pub dk: Vec<DMatrix<f64>>,
    pub dde: Vec<DMatrix<f64>>,
}

impl FieldJet {
    pub fn zeros(n: usize, second: bool) -> Self {
        let z = DMatrix::zeros(n, n);
        FieldJet {
            e: z.clone(),
            k: z.clone(),
            de: vec![z.clone(); n],
            dk: vec![z.clone(); n],
            dde: if second { vec![z; n * n] } else { Vec::new() },
        }
    }

    pub fn has_second(&self) -> bool {
        !self.dde.is_empty()
    }
}

/// A provider of the chart components of e = g − b and k.
pub trait FieldSource: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    /// e and k at `p`.
    fn values(&self, p: &ChartPoint) -> Result<(DMatrix<f64>, DMatrix<f64>)>;

    /// Closed-form jet up to `order` (1: ∂e, ∂k; 2: also ∂²e), when available.
    fn analytic_jet(&self, _p: &ChartPoint, _order: usize) -> Option<Result<FieldJet>> {
        None
    }

    /// Data are defined for r > min_radius.
    fn min_radius(&self) -> f64 {
        0.0
    }
}

/// Initial data (g = b + e, k) with declared decay rate τ.
#[derive(Clone)]
pub struct InitialData {
    pub source: Arc<dyn FieldSource>,
    pub tau: f64,
    pub mode: DerivativeMode,
    pub label: String,
}

impl fmt::Debug for InitialData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InitialData")
            .field("label", &self.label)
            .field("n", &self.dim())
            .field("tau", &self.tau)
            .field("mode", &self.mode)
            .finish()
    }
}

impl InitialData {
    pub fn new(
        source: Arc<dyn FieldSource>,
        tau: f64,
        mode: DerivativeMode,
        label: impl Into<String>,
    ) -> Result<Self> {
        if let DerivativeMode::FiniteDifference { step } = mode {
            if !(step >= MIN_FD_STEP) || !step.is_finite() {
                return Err(Error::StepUnderflow(step));
            }
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "decay rate {tau} must be positive"
            )));
        }
        Ok(InitialData {
            source,
            tau,
            mode,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    /// Same source with another derivative mode.
    pub fn with_mode(&self, mode: DerivativeMode) -> Result<Self> {
        InitialData::new(self.source.clone(), self.tau, mode, self.label.clone())
    }

    pub fn values(&self, p: &ChartPoint) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        self.check_point(p)?;
        self.source.values(p)
    }

    fn check_point(&self, p: &ChartPoint) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: p.dim(),
            });
        }
        let min = self.source.min_radius();
        if p.r() <= min {
            return Err(Error::OutsideDomain {
                r: p.r(),
                min_radius: min,
            });
        }
        Ok(())
    }

    /// Jet up to `order` (1 or 2) in the configured derivative mode.
    pub fn jet(&self, p: &ChartPoint, order: usize) -> Result<FieldJet> {
        self.check_point(p)?;
        if !(1..=2).contains(&order) {
            return Err(Error::DerivativesUnavailable(order));
        }
        match self.mode {
            DerivativeMode::Analytic => self
                .source
                .analytic_jet(p, order)
                .unwrap_or(Err(Error::DerivativesUnavailable(order))),
            DerivativeMode::FiniteDifference { step } => {
                fd_jet(self.source.as_ref(), p, order, step)
            }
        }
    }
}

/// Central differences: fourth order for first partials, second order for
/// second partials (mixed ones from the four-point stencil).
fn fd_jet(source: &dyn FieldSource, p: &ChartPoint, order: usize, h: f64) -> Result<FieldJet> {
    if h < MIN_FD_STEP {
        return Err(Error::StepUnderflow(h));
    }
    let n = p.dim();
    let x0 = p.coords();
    let at = |shift: &[(usize, f64)]| -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let mut x = x0.clone();
        for &(a, s) in shift {
            x[a] += s;
        }
        source.values(&ChartPoint::from_coords(&x)?)
    };
    let (e, k) = source.values(p)?;
    let mut jet = FieldJet::zeros(n, order == 2);
    for a in 0..n {
        let (ep1, kp1) = at(&[(a, h)])?;
        let (em1, km1) = at(&[(a, -h)])?;
        let (ep2, kp2) = at(&[(a, 2.0 * h)])?;
        let (em2, km2) = at(&[(a, -2.0 * h)])?;
        jet.de[a] = (&em2 - &ep2 + (&ep1 - &em1) * 8.0) / (12.0 * h);
        jet.dk[a] = (&km2 - &kp2 + (&kp1 - &km1) * 8.0) / (12.0 * h);
        if order == 2 {
            jet.dde[a * n + a] = (&ep1 - &e * 2.0 + &em1) / (h * h);
        }
    }
    if order == 2 {
        for a in 0..n {
            for b in a + 1..n {
                let (pp, _) = at(&[(a, h), (b, h)])?;
                let (pm, _) = at(&[(a, h), (b, -h)])?;
                let (mp, _) = at(&[(a, -h), (b, h)])?;
                let (mm, _) = at(&[(a, -h), (b, -h)])?;
                let d = (pp - pm - mp + mm) / (4.0 * h * h);
                jet.dde[a * n + b] = d.clone();
                jet.dde[b * n + a] = d;
            }
        }
    }
    jet.e = e;
    jet.k = k;
    Ok(jet)
}

/// Family parameters as given on the command line (`key=value`).
pub type FamilyParams = BTreeMap<String, String>;

struct ParamReader<'a> {
    params: &'a FamilyParams,
    used: Vec<&'static str>,
}

impl<'a> ParamReader<'a> {
    fn new(params: &'a FamilyParams) -> Self {
        ParamReader {
            params,
            used: Vec::new(),
        }
    }

    fn string(&mut self, key: &'static str) -> Option<&'a str> {
        self.used.push(key);
        self.params.get(key).map(|s| s.as_str())
    }

    fn float(&mut self, key: &'static str) -> Result<Option<f64>> {
        match self.string(key) {
            None => Ok(None),
            Some(s) => s
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(Some)
                .ok_or_else(|| {
                    Error::InvalidParameter(format!("{key} = `{s}` is not a finite number"))
                }),
        }
    }

    fn dim(&mut self) -> Result<usize> {
        match self.string("n") {
            None => Ok(3),
            Some(s) => match s.trim().parse::<usize>() {
                Ok(n) if n >= 3 => Ok(n),
                _ => Err(Error::InvalidParameter(format!(
                    "n = `{s}` must be an integer >= 3"
                ))),
            },
        }
    }

    fn mode(&mut self, analytic_available: bool) -> Result<DerivativeMode> {
        let step = self.float("step")?;
        let mode = self.string("mode");
        match (mode, analytic_available) {
            (None, true) | (Some("analytic"), true) => {
                if step.is_some() {
                    return Err(Error::InvalidParameter(
                        "step is only meaningful with mode=fd".into(),
                    ));
                }
                Ok(DerivativeMode::Analytic)
            }
            (None, false) | (Some("fd"), _) => Ok(DerivativeMode::FiniteDifference {
                step: step.unwrap_or(DEFAULT_FD_STEP),
            }),
            (Some("analytic"), false) => Err(Error::InvalidParameter(
                "this family only supports mode=fd".into(),
            )),
            (Some(other), _) => Err(Error::InvalidParameter(format!("unknown mode `{other}`"))),
        }
    }

    fn finish(self) -> Result<()> {
        for key in self.params.keys() {
            if !self.used.contains(&key.as_str()) {
                return Err(Error::InvalidParameter(format!(
                    "unknown parameter `{key}`"
                )));
            }
        }
        Ok(())
    }
}

pub const FAMILY_NAMES: [&str; 4] = [
    "exact_hyperbolic",
    "schwarzschild_ads",
    "gaussian_perturbation",
    "grid",
];

/// Builds one of the named data families.
///
/// Common parameters: `n` (default 3), `mode` (`analytic` or `fd`) and `step`.
/// `schwarzschild_ads` takes `m`; `gaussian_perturbation` takes `amplitude`,
/// `tau`, `center_theta`, `center_phi`; `grid` takes `path`.
pub fn builtin_family(name: &str, params: &FamilyParams) -> Result<InitialData> {
    let mut rd = ParamReader::new(params);
    let data = match name {
        "exact_hyperbolic" => {
            let n = rd.dim()?;
            let mode = rd.mode(true)?;
            let tau = rd.float("tau")?.unwrap_or(n as f64);
            InitialData::new(Arc::new(ExactHyperbolic::new(n)), tau, mode, name)?
        }
        "schwarzschild_ads" => {
            let n = rd.dim()?;
            let mode = rd.mode(true)?;
            let m = rd.float("m")?.unwrap_or(1.0);
            let src = SchwarzschildAds::new(n, m)?;
            let tau = match rd.float("tau")? {
                None => n as f64,
                Some(t) if (t - n as f64).abs() <= 1e-12 => t,
                Some(t) => {
                    return Err(Error::DecayViolation(format!(
                        "schwarzschild_ads decays like e^(-{n} r); declared tau = {t}"
                    )))
                }
            };
            InitialData::new(
                Arc::new(src),
                tau,
                mode,
                format!("schwarzschild_ads(m={m})"),
            )?
        }
        "gaussian_perturbation" => {
            let n = rd.dim()?;
            let mode = rd.mode(false)?;
            let amplitude = rd.float("amplitude")?.unwrap_or(0.1);
            let tau = rd.float("tau")?.unwrap_or(n as f64 + 2.5);
            let theta = rd.float("center_theta")?.unwrap_or(1.0);
            let phi = rd.float("center_phi")?.unwrap_or(0.5);
            let src = GaussianPerturbation::new(n, amplitude, tau, theta, phi)?;
            InitialData::new(Arc::new(src), tau, mode, name)?
        }
        "grid" => {
            let path = rd
                .string("path")
                .ok_or_else(|| Error::InvalidParameter("grid needs path=<file>".into()))?;
            let mode = rd.mode(false)?;
            let grid = GridData::load(std::path::Path::new(path))?;
            let tau = grid.header.tau;
            InitialData::new(Arc::new(grid), tau, mode, format!("grid({path})"))?
        }
        other => return Err(Error::UnknownFamily(other.to_string())),
    };
    rd.finish()?;
    Ok(data)
}
