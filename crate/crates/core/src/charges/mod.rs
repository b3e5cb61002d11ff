//! The global charge functional H(f, α) over coordinate spheres and its
//! limit at infinity.

mod energy;
mod fields;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{frame_at, ChartPoint, FrameData};
use crate::initial_data::{FieldJet, InitialData};
use crate::quadrature::{
    pairwise_sum, SphereQuadrature, DEFAULT_AZIMUTH_NODES, DEFAULT_POLAR_NODES,
};

pub use energy::{
    angular_to_xi, energy_momentum, energy_momentum_with_diagnostics, q_assemble_from_charges,
    q_assemble_with_diagnostics, q_from_components, xi_to_angular, EnergyMomentum, QAssembly,
    QEntries, QForm,
};
pub use fields::{
    killing_residual, ChargeCouple, KillingForm, MassCombination, MassField, PairingKillingForm,
    SpinorKillingForm, SpinorMassField,
};

/// Radii and tolerances of a limit evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeOptions {
    pub schedule: Vec<f64>,
    pub tol: f64,
    pub polar_nodes: usize,
    pub azimuth_nodes: usize,
    /// Re-evaluate the last radius with doubled quadrature orders.
    pub check_quadrature: bool,
}

impl Default for ChargeOptions {
    fn default() -> Self {
        ChargeOptions {
            schedule: vec![4.0, 5.0, 6.0, 7.0, 8.0],
            tol: 1e-6,
            polar_nodes: DEFAULT_POLAR_NODES,
            azimuth_nodes: DEFAULT_AZIMUTH_NODES,
            check_quadrature: false,
        }
    }
}

impl ChargeOptions {
    pub fn validate(&self) -> Result<()> {
        if self.schedule.len() < 3 {
            return Err(Error::InvalidSchedule(
                "at least 3 radii are required".into(),
            ));
        }
        if self.schedule.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidSchedule("radii must be positive".into()));
        }
        if self.schedule.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSchedule(
                "radii must be strictly increasing".into(),
            ));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerance {} must be positive",
                self.tol
            )));
        }
        Ok(())
    }

    pub fn quadrature(&self, n: usize) -> Result<SphereQuadrature> {
        SphereQuadrature::new(n, self.polar_nodes, self.azimuth_nodes)
    }
}

/// The integrand of H contracted with the outward normal ∂_r, including the
/// sphere area density:
/// f(div e − d tr e) − e(∇f) + tr e df − 2 k(α♯) + 2 tr k α, all with b.
fn integrand(frame: &FrameData, jet: &FieldJet, f: f64, df: &[f64], alpha: &[f64]) -> f64 {
    let n = frame.dim();
    let binv: Vec<f64> = (0..n).map(|i| frame.inverse_metric[(i, i)]).collect();
    let gamma = &frame.christoffels;
    let (e, k) = (&jet.e, &jet.k);
    const J: usize = 0;

    // (div e)_j = b^{il} ∇_l e_ij and ∂_j tr e = b^{ab} ∇_j e_ab
    let mut div = 0.0;
    let mut d_tr = 0.0;
    for i in 0..n {
        let mut cov = jet.de[i][(i, J)];
        let mut cov_tr = jet.de[J][(i, i)];
        for m in 0..n {
            cov -= gamma.get(m, i, i) * e[(m, J)] + gamma.get(m, i, J) * e[(i, m)];
            cov_tr -= 2.0 * gamma.get(m, J, i) * e[(m, i)];
        }
        div += binv[i] * cov;
        d_tr += binv[i] * cov_tr;
    }
    let tr_e: f64 = (0..n).map(|i| binv[i] * e[(i, i)]).sum();
    let tr_k: f64 = (0..n).map(|i| binv[i] * k[(i, i)]).sum();
    let grad_f_e: f64 = (0..n).map(|i| binv[i] * df[i] * e[(i, J)]).sum();
    let alpha_k: f64 = (0..n).map(|i| binv[i] * alpha[i] * k[(i, J)]).sum();

    let u = f * (div - d_tr) - grad_f_e + tr_e * df[J] - 2.0 * alpha_k + 2.0 * tr_k * alpha[J];
    u * frame.area_density
}

struct CoupleValues {
    f: f64,
    df: Vec<f64>,
    alpha: Vec<f64>,
}

fn couple_values(c: &ChargeCouple, p: &ChartPoint) -> Result<CoupleValues> {
    let n = p.dim();
    let (f, df) = match &c.f {
        Some(field) => field.value_gradient(p)?,
        None => (0.0, vec![0.0; n]),
    };
    let alpha = match &c.alpha {
        Some(form) => form.covector(p)?,
        None => vec![0.0; n],
    };
    if df.len() != n || alpha.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: df.len().min(alpha.len()),
        });
    }
    Ok(CoupleValues { f, df, alpha })
}

/// Pointwise integrand of H(f, α) times the area density of b.
pub fn charge_integrand(data: &InitialData, couple: &ChargeCouple, p: &ChartPoint) -> Result<f64> {
    let frame = frame_at(p)?;
    let jet = data.jet(p, 1)?;
    let v = couple_values(couple, p)?;
    Ok(integrand(&frame, &jet, v.f, &v.df, &v.alpha))
}

/// Sphere integrals of several couples sharing the data evaluation at each
/// node. Nodes are processed in parallel and summed pairwise in node order.
pub fn charge_on_sphere_batch(
    data: &InitialData,
    couples: &[ChargeCouple],
    r: f64,
    quad: &SphereQuadrature,
) -> Result<Vec<f64>> {
    if quad.dim() != data.dim() {
        return Err(Error::Dimension {
            expected: data.dim(),
            got: quad.dim(),
        });
    }
    let per_node: Vec<Result<Vec<f64>>> = quad
        .nodes()
        .par_iter()
        .zip(quad.weights().par_iter())
        .map(|(node, w)| {
            let p = ChartPoint::new(r, node.clone())?;
            let frame = frame_at(&p)?;
            let jet = data.jet(&p, 1)?;
            couples
                .iter()
                .map(|c| {
                    let v = couple_values(c, &p)?;
                    Ok(w * integrand(&frame, &jet, v.f, &v.df, &v.alpha))
                })
                .collect()
        })
        .collect();
    let per_node = per_node.into_iter().collect::<Result<Vec<_>>>()?;
    Ok((0..couples.len())
        .map(|c| pairwise_sum(&per_node.iter().map(|v| v[c]).collect::<Vec<_>>()))
        .collect())
}

pub fn charge_on_sphere(
    data: &InitialData,
    couple: &ChargeCouple,
    r: f64,
    quad: &SphereQuadrature,
) -> Result<f64> {
    Ok(charge_on_sphere_batch(data, std::slice::from_ref(couple), r, quad)?[0])
}

/// Values of one charge along the schedule with the extrapolated limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeLimit {
    pub label: String,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// H(r_{j+1}) − H(r_j).
    pub differences: Vec<f64>,
    /// Extrapolated limit, or the last value when no extrapolation applies.
    pub value: f64,
    pub extrapolated: bool,
    /// Fitted c in the error model H(r) − H(∞) ≈ C e^{−c r}.
    pub fitted_rate: Option<f64>,
    /// |differences| strictly decrease (or vanish).
    pub monotone: bool,
    pub converged: bool,
}

impl ChargeLimit {
    fn from_values(label: String, radii: &[f64], values: Vec<f64>, tol: f64) -> Self {
        let differences: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
        let last = *values.last().expect("schedule is non-empty");
        let all_zero = differences.iter().all(|d| *d == 0.0);
        let monotone = all_zero || differences.windows(2).all(|w| w[1].abs() < w[0].abs());
        let scale = last.abs().max(1.0);
        let converged = differences
            .iter()
            .rev()
            .take(2)
            .all(|d| d.abs() < tol * scale);

        let mut value = last;
        let mut extrapolated = false;
        let mut fitted_rate = None;
        if !all_zero && monotone {
            let m = radii.len();
            let (d1, d2) = (differences[m - 3], differences[m - 2]);
            let (h1, h2) = (radii[m - 2] - radii[m - 3], radii[m - 1] - radii[m - 2]);
            if d1 != 0.0 && d2 / d1 > 0.0 {
                if let Some(c) = solve_rate(d2 / d1, h1, h2) {
                    value = last + d2 / (c * h2).exp_m1();
                    extrapolated = true;
                    fitted_rate = Some(c);
                }
            }
        }
        ChargeLimit {
            label,
            radii: radii.to_vec(),
            values,
            differences,
            value,
            extrapolated,
            fitted_rate,
            monotone,
            converged,
        }
    }

    pub fn require_converged(&self) -> Result<()> {
        if self.converged {
            Ok(())
        } else {
            let last = self.differences.last().copied().unwrap_or(f64::NAN);
            Err(Error::NonConvergence {
                label: self.label.clone(),
                reason: format!("last difference {last:e}, monotone = {}", self.monotone),
            })
        }
    }
}

/// Solves (e^{−c h2} − 1) e^{−c h1} / (1 − e^{−c h1}) = ratio for c > 0, i.e.
/// the ratio of successive differences under H = H∞ + C e^{−c r}.
fn solve_rate(ratio: f64, h1: f64, h2: f64) -> Option<f64> {
    let model = |c: f64| (-(-c * h2).exp_m1()) * (-c * h1).exp() / (-(-c * h1).exp_m1());
    // model decreases from h2/h1 (c → 0) to 0 (c → ∞)
    if !(ratio > 0.0 && ratio < h2 / h1) {
        return None;
    }
    let (mut lo, mut hi) = (1e-12_f64, 1.0_f64);
    while model(hi) > ratio {
        hi *= 2.0;
        if hi > 1e6 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if model(mid) > ratio {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Limits of several charges over one schedule.
pub fn charge_limits(
    data: &InitialData,
    couples: &[ChargeCouple],
    opts: &ChargeOptions,
) -> Result<Vec<ChargeLimit>> {
    opts.validate()?;
    let min = data.source.min_radius();
    if opts.schedule[0] <= min {
        return Err(Error::OutsideDomain {
            r: opts.schedule[0],
            min_radius: min,
        });
    }
    let quad = opts.quadrature(data.dim())?;
    let mut per_radius = Vec::with_capacity(opts.schedule.len());
    for &r in &opts.schedule {
        per_radius.push(charge_on_sphere_batch(data, couples, r, &quad)?);
    }
    if opts.check_quadrature {
        let r = *opts.schedule.last().unwrap();
        let fine = charge_on_sphere_batch(data, couples, r, &quad.refined()?)?;
        let coarse = per_radius.last().unwrap();
        for (a, b) in coarse.iter().zip(&fine) {
            let diff = (a - b).abs();
            if diff > opts.tol * b.abs().max(1.0) {
                return Err(Error::QuadratureTooLow(diff));
            }
        }
    }
    Ok(couples
        .iter()
        .enumerate()
        .map(|(c, couple)| {
            let values = per_radius.iter().map(|v| v[c]).collect();
            ChargeLimit::from_values(couple.label.clone(), &opts.schedule, values, opts.tol)
        })
        .collect())
}

pub fn charge_limit(
    data: &InitialData,
    couple: &ChargeCouple,
    schedule: &[f64],
    tol: f64,
) -> Result<ChargeLimit> {
    let opts = ChargeOptions {
        schedule: schedule.to_vec(),
        tol,
        ..ChargeOptions::default()
    };
    Ok(charge_limits(data, std::slice::from_ref(couple), &opts)?.remove(0))
}
