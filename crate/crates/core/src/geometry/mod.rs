//! Hyperbolic space (H^n, b) in the polar chart, with b = dr² + sinh²r g_S.

mod jet;
mod killing;

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin3::{lambda_iso, HermMatrix, MinkVector};
use crate::tensor::{christoffel, Christoffel, MetricJet};

pub(crate) use jet::{direction_monomials, embedding_monomials, metric_diagonal_monomials};
pub use killing::{generator_basis, killing_field, KillingField, SoN1Generator};

/// Default distance kept from the coordinate singularities of the chart.
pub const DEFAULT_GUARD: f64 = 1e-8;

/// A point of H^n: radius and the n−1 angles (θ_1, …, θ_{n−2}, φ).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    r: f64,
    angles: Vec<f64>,
}

impl ChartPoint {
    /// Validates ranges; the azimuth is wrapped into [0, 2π).
    pub fn new(r: f64, angles: Vec<f64>) -> Result<Self> {
        if angles.len() < 2 {
            return Err(Error::InvalidPoint(format!(
                "need at least 2 angles (n >= 3), got {}",
                angles.len()
            )));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidPoint(format!("radius {r} must be positive")));
        }
        let mut angles = angles;
        let last = angles.len() - 1;
        for (i, a) in angles[..last].iter().enumerate() {
            if !(a.is_finite() && *a > 0.0 && *a < PI) {
                return Err(Error::InvalidPoint(format!(
                    "polar angle {} = {a} outside (0, π)",
                    i + 1
                )));
            }
        }
        let phi = angles[last];
        if !phi.is_finite() {
            return Err(Error::InvalidPoint("azimuth is not finite".into()));
        }
        let wrapped = phi.rem_euclid(TAU);
        angles[last] = if wrapped >= TAU { 0.0 } else { wrapped };
        Ok(ChartPoint { r, angles })
    }

    /// Three-dimensional shorthand (r, θ, φ).
    pub fn new3(r: f64, theta: f64, phi: f64) -> Result<Self> {
        Self::new(r, vec![theta, phi])
    }

    /// Builds a point from the full coordinate vector (r, angles…).
    pub fn from_coords(x: &[f64]) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidPoint("empty coordinate vector".into()));
        }
        Self::new(x[0], x[1..].to_vec())
    }

    pub fn dim(&self) -> usize {
        self.angles.len() + 1
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// (r, θ_1, …, φ).
    pub fn coords(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.dim());
        x.push(self.r);
        x.extend_from_slice(&self.angles);
        x
    }

    /// Unit direction ω ∈ S^{n−1}.
    pub fn direction(&self) -> Vec<f64> {
        let x = self.coords();
        direction_monomials(self.dim())
            .iter()
            .map(|m| m.value(&x))
            .collect()
    }

    /// y = (cosh r, sinh r ω) on the future sheet of the hyperboloid.
    pub fn embedding(&self) -> Vec<f64> {
        let x = self.coords();
        embedding_monomials(self.dim())
            .iter()
            .map(|m| m.value(&x))
            .collect()
    }

    fn check_guard(&self, guard: f64) -> Result<()> {
        if self.r < guard {
            return Err(Error::CoordinateSingularity {
                what: format!("r = {}", self.r),
                guard,
            });
        }
        let last = self.angles.len() - 1;
        for (i, &a) in self.angles[..last].iter().enumerate() {
            if a < guard || a > PI - guard {
                return Err(Error::CoordinateSingularity {
                    what: format!("polar angle {} = {a}", i + 1),
                    guard,
                });
            }
        }
        Ok(())
    }
}

/// Background metric, its inverse, Christoffel symbols and sphere measure at a point.
#[derive(Clone, Debug)]
pub struct FrameData {
    pub point: ChartPoint,
    pub metric: DMatrix<f64>,
    pub inverse_metric: DMatrix<f64>,
    pub christoffels: Christoffel,
    pub area_density: f64,
}

impl FrameData {
    pub fn dim(&self) -> usize {
        self.point.dim()
    }

    /// b^{ij} v_j for a chart covector.
    pub fn raise(&self, v: &[f64]) -> Vec<f64> {
        // b is diagonal in this chart
        v.iter()
            .enumerate()
            .map(|(i, x)| x * self.inverse_metric[(i, i)])
            .collect()
    }

    /// b-norm of a chart covector.
    pub fn covector_norm(&self, v: &[f64]) -> f64 {
        v.iter()
            .enumerate()
            .map(|(i, x)| x * x * self.inverse_metric[(i, i)])
            .sum::<f64>()
            .sqrt()
    }
}

pub fn frame_at(p: &ChartPoint) -> Result<FrameData> {
    frame_at_with_guard(p, DEFAULT_GUARD)
}

pub fn frame_at_with_guard(p: &ChartPoint, guard: f64) -> Result<FrameData> {
    p.check_guard(guard)?;
    let jet = background_jet_unchecked(p, false);
    let n = p.dim();
    let inverse_metric = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        (0..n).map(|i| 1.0 / jet.g[(i, i)]),
    ));
    let christoffels = christoffel(&inverse_metric, &jet.dg);
    Ok(FrameData {
        point: p.clone(),
        metric: jet.g,
        inverse_metric,
        christoffels,
        area_density: area_density(p),
    })
}

/// sinh^{n−1} r · Π_m sin^{n−1−m} θ_m.
pub fn area_density(p: &ChartPoint) -> f64 {
    let n = p.dim();
    let mut d = p.r.sinh().powi(n as i32 - 1);
    for (m, a) in p.angles[..n - 2].iter().enumerate() {
        d *= a.sin().powi((n - 2 - m) as i32);
    }
    d
}

/// Background metric with exact first and second chart partials.
pub fn background_jet(p: &ChartPoint) -> Result<MetricJet> {
    p.check_guard(DEFAULT_GUARD)?;
    Ok(background_jet_unchecked(p, true))
}

fn background_jet_unchecked(p: &ChartPoint, second: bool) -> MetricJet {
    let n = p.dim();
    let x = p.coords();
    let mut g = DMatrix::zeros(n, n);
    let mut dg = vec![DMatrix::zeros(n, n); n];
    let mut ddg = if second {
        vec![DMatrix::zeros(n, n); n * n]
    } else {
        Vec::new()
    };
    for (l, m) in metric_diagonal_monomials(n).iter().enumerate() {
        let j = m.jet(&x, second);
        g[(l, l)] = j.value;
        for a in 0..n {
            dg[a][(l, l)] = j.grad[a];
            if second {
                for b in 0..n {
                    ddg[a * n + b][(l, l)] = j.hess[a * n + b];
                }
            }
        }
    }
    MetricJet { g, dg, ddg }
}

/// Restriction x_k of the Minkowski coordinate y_k to the hyperboloid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MassFunction {
    pub index: usize,
}

/// Value, chart gradient and covariant Hessian of a mass function.
#[derive(Clone, Debug)]
pub struct MassFunctionJet {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: DMatrix<f64>,
}

impl MassFunction {
    pub fn new(index: usize, n: usize) -> Result<Self> {
        if index > n {
            return Err(Error::InvalidParameter(format!(
                "mass function index {index} exceeds n = {n}"
            )));
        }
        Ok(MassFunction { index })
    }

    /// Value and chart gradient only.
    pub fn value_gradient(&self, p: &ChartPoint) -> Result<(f64, Vec<f64>)> {
        let n = p.dim();
        if self.index > n {
            return Err(Error::Dimension {
                expected: n,
                got: self.index,
            });
        }
        let j = embedding_monomials(n)[self.index].jet(&p.coords(), false);
        Ok((j.value, j.grad))
    }

    /// Hess f = ∂∂f − Γ^k ∂_k f, which equals f·b for every mass function.
    pub fn eval(&self, p: &ChartPoint) -> Result<MassFunctionJet> {
        let frame = frame_at(p)?;
        let n = p.dim();
        if self.index > n {
            return Err(Error::Dimension {
                expected: n,
                got: self.index,
            });
        }
        let j = embedding_monomials(n)[self.index].jet(&p.coords(), true);
        let mut hessian = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let mut h = j.hess[a * n + b];
                for k in 0..n {
                    h -= frame.christoffels.get(k, a, b) * j.grad[k];
                }
                hessian[(a, b)] = h;
            }
        }
        Ok(MassFunctionJet {
            value: j.value,
            gradient: j.grad,
            hessian,
        })
    }
}

pub fn mass_function_eval(k: usize, p: &ChartPoint) -> Result<MassFunctionJet> {
    MassFunction::new(k, p.dim())?.eval(p)
}

/// W = Λ(y(p)), a unimodular positive Hermitian matrix (n = 3 only).
pub fn chart_to_hermitian(p: &ChartPoint) -> Result<HermMatrix> {
    if p.dim() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            got: p.dim(),
        });
    }
    let y = p.embedding();
    Ok(lambda_iso(&MinkVector([y[0], y[1], y[2], y[3]])))
}

/// Chart partials ∂_μ y of the embedding, as rows μ.
pub(crate) fn embedding_jacobian(p: &ChartPoint) -> (Vec<f64>, Vec<Vec<f64>>) {
    let x = p.coords();
    let mut y = Vec::with_capacity(p.dim() + 1);
    let mut dy = vec![Vec::with_capacity(p.dim() + 1); p.dim()];
    for m in embedding_monomials(p.dim()) {
        let j = m.jet(&x, false);
        y.push(j.value);
        for (mu, g) in j.grad.iter().enumerate() {
            dy[mu].push(*g);
        }
    }
    (y, dy)
}
