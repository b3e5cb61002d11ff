use serde::{Deserialize, Serialize};

use super::InitialData;
use crate::error::Result;
use crate::fit::log_slope;
use crate::geometry::{frame_at, ChartPoint};
use crate::quadrature::SphereQuadrature;

/// Sup over a sphere of frame-normalized norms of e, ∂e, ∂²e, k, ∂k.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SphereSups {
    pub e: f64,
    pub de: f64,
    pub dde: f64,
    pub k: f64,
    pub dk: f64,
}

impl SphereSups {
    pub fn max(&self) -> f64 {
        [self.e, self.de, self.dde, self.k, self.dk]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn sphere_sups(data: &InitialData, r: f64, quad: &SphereQuadrature) -> Result<SphereSups> {
    let n = data.dim();
    let mut s = SphereSups::default();
    for node in quad.nodes() {
        let p = ChartPoint::new(r, node.clone())?;
        let frame = frame_at(&p)?;
        let inv: Vec<f64> = (0..n).map(|i| 1.0 / frame.metric[(i, i)].sqrt()).collect();
        let jet = data.jet(&p, 2)?;
        let norm2 = |m: &nalgebra::DMatrix<f64>, extra: f64| -> f64 {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += (m[(i, j)] * inv[i] * inv[j] * extra).powi(2);
                }
            }
            acc
        };
        s.e = s.e.max(norm2(&jet.e, 1.0).sqrt());
        s.k = s.k.max(norm2(&jet.k, 1.0).sqrt());
        let de: f64 = (0..n).map(|a| norm2(&jet.de[a], inv[a])).sum();
        let dk: f64 = (0..n).map(|a| norm2(&jet.dk[a], inv[a])).sum();
        let dde: f64 = (0..n * n)
            .map(|ab| norm2(&jet.dde[ab], inv[ab / n] * inv[ab % n]))
            .sum();
        s.de = s.de.max(de.sqrt());
        s.dk = s.dk.max(dk.sqrt());
        s.dde = s.dde.max(dde.sqrt());
    }
    Ok(s)
}

/// Largest frame-normalized field quantity on the sphere of radius r.
pub(crate) fn field_scale(data: &InitialData, r: f64, quad: &SphereQuadrature) -> Result<f64> {
    Ok(sphere_sups(data, r, quad)?.max())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayReport {
    pub radii: Vec<f64>,
    pub sups: Vec<SphereSups>,
    pub declared_tau: f64,
    /// Fitted τ from the combined sup, None when the data vanish.
    pub fitted_tau: Option<f64>,
    pub accepted: bool,
    pub reason: String,
}

/// Accepts iff the declared τ exceeds n/2 and the sampled decay rate agrees
/// with it within 10%.
pub fn validate_decay(
    data: &InitialData,
    radii: &[f64],
    quad: &SphereQuadrature,
) -> Result<DecayReport> {
    let n = data.dim() as f64;
    let tau = data.tau;
    let sups = radii
        .iter()
        .map(|&r| sphere_sups(data, r, quad))
        .collect::<Result<Vec<_>>>()?;
    let combined: Vec<f64> = sups.iter().map(SphereSups::max).collect();
    let vanishing = combined.iter().all(|v| *v == 0.0);
    let fitted_tau = if vanishing {
        None
    } else {
        log_slope(radii, &combined).map(|s| -s)
    };
    let (accepted, reason) = if tau <= 0.5 * n {
        (
            false,
            format!("declared tau = {tau} does not exceed n/2 = {}", 0.5 * n),
        )
    } else if vanishing {
        (true, "data vanish identically".to_string())
    } else {
        match fitted_tau {
            Some(f) if (f - tau).abs() <= 0.1 * tau => (true, format!("fitted tau = {f:.4}")),
            Some(f) => (
                false,
                format!("fitted tau = {f:.4} differs from declared {tau} by more than 10%"),
            ),
            None => (false, "decay rate could not be fitted".to_string()),
        }
    };
    Ok(DecayReport {
        radii: radii.to_vec(),
        sups,
        declared_tau: tau,
        fitted_tau,
        accepted,
        reason,
    })
}
