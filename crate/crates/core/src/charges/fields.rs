//! Providers of the mass function f and the Killing 1-form α of a couple.

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{embedding_jacobian, ChartPoint, MassFunction, SoN1Generator};
use crate::spin3::{
    adjugate, alpha_closed_form, alpha_field, lambda_iso, section, HermMatrix, Mat2, MinkVector,
    SpinorData,
};

/// A function in N_b with its chart gradient.
pub trait MassField: Send + Sync + Debug {
    fn value_gradient(&self, p: &ChartPoint) -> Result<(f64, Vec<f64>)>;
}

/// A 1-form on H^n given by chart components.
pub trait KillingForm: Send + Sync + Debug {
    fn covector(&self, p: &ChartPoint) -> Result<Vec<f64>>;
}

impl MassField for MassFunction {
    fn value_gradient(&self, p: &ChartPoint) -> Result<(f64, Vec<f64>)> {
        MassFunction::value_gradient(self, p)
    }
}

impl KillingForm for SoN1Generator {
    fn covector(&self, p: &ChartPoint) -> Result<Vec<f64>> {
        self.dual_form(p)
    }
}

/// Σ_k c_k x_k.
#[derive(Clone, Debug, PartialEq)]
pub struct MassCombination {
    pub coefficients: Vec<f64>,
}

impl MassField for MassCombination {
    fn value_gradient(&self, p: &ChartPoint) -> Result<(f64, Vec<f64>)> {
        if self.coefficients.len() != p.dim() + 1 {
            return Err(Error::Dimension {
                expected: p.dim() + 1,
                got: self.coefficients.len(),
            });
        }
        let (y, dy) = embedding_jacobian(p);
        let value = self.coefficients.iter().zip(&y).map(|(c, v)| c * v).sum();
        let grad = dy
            .iter()
            .map(|row| self.coefficients.iter().zip(row).map(|(c, v)| c * v).sum())
            .collect();
        Ok((value, grad))
    }
}

/// W = Λ(y) and the tangent vectors ∂_μ W = Λ(∂_μ y) at a point of H³.
fn hermitian_jet(p: &ChartPoint) -> Result<(HermMatrix, Vec<Mat2>)> {
    if p.dim() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            got: p.dim(),
        });
    }
    let (y, dy) = embedding_jacobian(p);
    let w = lambda_iso(&MinkVector([y[0], y[1], y[2], y[3]]));
    let dw = dy
        .iter()
        .map(|d| *lambda_iso(&MinkVector([d[0], d[1], d[2], d[3]])).matrix())
        .collect();
    Ok((w, dw))
}

/// The mass part V of the Killing map image of a spinor datum, evaluated
/// through the spinor bilinear 2(w* Ŵ w + u* W u).
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorMassField {
    pub data: SpinorData,
}

impl MassField for SpinorMassField {
    fn value_gradient(&self, p: &ChartPoint) -> Result<(f64, Vec<f64>)> {
        let (w, dw) = hermitian_jet(p)?;
        let (a, b) = (self.data.w, self.data.u);
        let bilinear = |m: &Mat2| {
            2.0 * ((a.adjoint() * adjugate(m) * a)[(0, 0)] + (b.adjoint() * m * b)[(0, 0)]).re
        };
        Ok((bilinear(w.matrix()), dw.iter().map(bilinear).collect()))
    }
}

/// The angular part α of the Killing map image, evaluated on the chart
/// directions through the frame section W^{1/2}.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorKillingForm {
    pub data: SpinorData,
}

impl KillingForm for SpinorKillingForm {
    fn covector(&self, p: &ChartPoint) -> Result<Vec<f64>> {
        let (w, dw) = hermitian_jet(p)?;
        let g = section(&w)?;
        dw.iter().map(|t| alpha_field(&self.data, &g, t)).collect()
    }
}

/// The Killing form 4 Re tr(Ŵ Ẇ A) attached to a trace-free pairing matrix A.
#[derive(Clone, Debug, PartialEq)]
pub struct PairingKillingForm {
    pub pairing: Mat2,
}

impl KillingForm for PairingKillingForm {
    fn covector(&self, p: &ChartPoint) -> Result<Vec<f64>> {
        let (w, dw) = hermitian_jet(p)?;
        Ok(dw
            .iter()
            .map(|t| alpha_closed_form(&self.pairing, &w, t))
            .collect())
    }
}

/// A pair (f, α) ∈ N_b ⊕ Kill; either side may be absent (zero).
#[derive(Clone, Debug)]
pub struct ChargeCouple {
    pub label: String,
    pub f: Option<Arc<dyn MassField>>,
    pub alpha: Option<Arc<dyn KillingForm>>,
    /// α is asserted to satisfy the Killing equation.
    pub killing: bool,
}

impl ChargeCouple {
    pub fn zero(label: impl Into<String>) -> Self {
        ChargeCouple {
            label: label.into(),
            f: None,
            alpha: None,
            killing: true,
        }
    }

    pub fn mass(label: impl Into<String>, f: Arc<dyn MassField>) -> Self {
        ChargeCouple {
            label: label.into(),
            f: Some(f),
            alpha: None,
            killing: true,
        }
    }

    pub fn angular(label: impl Into<String>, alpha: Arc<dyn KillingForm>) -> Self {
        ChargeCouple {
            label: label.into(),
            f: None,
            alpha: Some(alpha),
            killing: true,
        }
    }

    /// (x_k, 0).
    pub fn mass_function(k: usize, n: usize) -> Result<Self> {
        Ok(Self::mass(
            format!("x{k}"),
            Arc::new(MassFunction::new(k, n)?),
        ))
    }

    /// (0, dual form of the generator).
    pub fn generator(label: impl Into<String>, a: SoN1Generator) -> Self {
        Self::angular(label, Arc::new(a))
    }

    /// (V, α) of the imaginary Killing spinor with data w ⊕ u (n = 3).
    pub fn spinor(label: impl Into<String>, d: SpinorData) -> Self {
        ChargeCouple {
            label: label.into(),
            f: Some(Arc::new(SpinorMassField { data: d })),
            alpha: Some(Arc::new(SpinorKillingForm { data: d })),
            killing: true,
        }
    }

    /// Largest |∇_i α_j + ∇_j α_i| at p, by central differences of step h.
    pub fn killing_residual(&self, p: &ChartPoint, h: f64) -> Result<f64> {
        let Some(alpha) = &self.alpha else {
            return Ok(0.0);
        };
        killing_residual(alpha.as_ref(), p, h)
    }
}

/// Symmetrized covariant derivative of a 1-form, differentiated numerically.
pub fn killing_residual(alpha: &dyn KillingForm, p: &ChartPoint, h: f64) -> Result<f64> {
    let frame = crate::geometry::frame_at(p)?;
    let n = p.dim();
    let x = p.coords();
    let a0 = alpha.covector(p)?;
    let mut d = vec![vec![0.0; n]; n];
    for (mu, row) in d.iter_mut().enumerate() {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[mu] += h;
        xm[mu] -= h;
        let ap = alpha.covector(&ChartPoint::from_coords(&xp)?)?;
        let am = alpha.covector(&ChartPoint::from_coords(&xm)?)?;
        for nu in 0..n {
            row[nu] = (ap[nu] - am[nu]) / (2.0 * h);
        }
    }
    let scale = a0.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut s = d[i][j] + d[j][i];
            for k in 0..n {
                s -= 2.0 * frame.christoffels.get(k, i, j) * a0[k];
            }
            worst = worst.max(s.abs() / scale);
        }
    }
    Ok(worst)
}
