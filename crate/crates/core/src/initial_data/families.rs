use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::{FieldJet, FieldSource};
use crate::error::{Error, Result};
use crate::geometry::{direction_monomials, metric_diagonal_monomials, ChartPoint};

/// The hyperbolic slice itself: e = 0, k = 0.
#[derive(Clone, Debug)]
pub struct ExactHyperbolic {
    n: usize,
}

impl ExactHyperbolic {
    pub fn new(n: usize) -> Self {
        ExactHyperbolic { n }
    }
}

impl FieldSource for ExactHyperbolic {
    fn dim(&self) -> usize {
        self.n
    }

    fn values(&self, _p: &ChartPoint) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        Ok((
            DMatrix::zeros(self.n, self.n),
            DMatrix::zeros(self.n, self.n),
        ))
    }

    fn analytic_jet(&self, _p: &ChartPoint, order: usize) -> Option<Result<FieldJet>> {
        Some(Ok(FieldJet::zeros(self.n, order == 2)))
    }
}

/// Time-symmetric slice of Schwarzschild-AdS. With s = sinh r the metric
/// ds²/(1 + s² − 2m s^{2−n}) + s² dΩ² differs from b only in
/// e_rr = P/D, P = 2m s^{2−n}, D = cosh²r − P.
#[derive(Clone, Debug)]
pub struct SchwarzschildAds {
    n: usize,
    m: f64,
    horizon: f64,
}

impl SchwarzschildAds {
    pub fn new(n: usize, m: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Dimension {
                expected: 3,
                got: n,
            });
        }
        if !(m.is_finite() && m >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mass m = {m} must be non-negative"
            )));
        }
        let mut s = SchwarzschildAds { n, m, horizon: 0.0 };
        s.horizon = s.find_horizon();
        Ok(s)
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    /// Radius where D vanishes; the data live outside it.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    fn p_and_d(&self, r: f64) -> (f64, f64) {
        let p = 2.0 * self.m * r.sinh().powi(2 - self.n as i32);
        (p, r.cosh().powi(2) - p)
    }

    fn find_horizon(&self) -> f64 {
        if self.m == 0.0 {
            return 0.0;
        }
        let (mut lo, mut hi) = (1e-300_f64, 1.0_f64);
        while self.p_and_d(hi).1 <= 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.p_and_d(mid).1 > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                break;
            }
        }
        hi
    }

    /// e_rr and its first two r-derivatives.
    fn radial(&self, r: f64) -> Result<[f64; 3]> {
        if r <= self.horizon {
            return Err(Error::OutsideDomain {
                r,
                min_radius: self.horizon,
            });
        }
        if self.m == 0.0 {
            return Ok([0.0; 3]);
        }
        let n = self.n as i32;
        let (s, c) = (r.sinh(), r.cosh());
        let k = 2.0 * self.m * (2 - n) as f64;
        let p = 2.0 * self.m * s.powi(2 - n);
        let p1 = k * s.powi(1 - n) * c;
        let p2 = k * ((1 - n) as f64 * s.powi(-n) * c * c + s.powi(2 - n));
        let d = c * c - p;
        let d1 = 2.0 * s * c - p1;
        let d2 = 2.0 * (c * c + s * s) - p2;
        let num = p1 * d - p * d1;
        let e = p / d;
        let e1 = num / (d * d);
        let e2 = (p2 * d - p * d2) / (d * d) - 2.0 * d1 * num / (d * d * d);
        Ok([e, e1, e2])
    }
}

impl FieldSource for SchwarzschildAds {
    fn dim(&self) -> usize {
        self.n
    }

    fn values(&self, p: &ChartPoint) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let [e0, _, _] = self.radial(p.r())?;
        let mut e = DMatrix::zeros(self.n, self.n);
        e[(0, 0)] = e0;
        Ok((e, DMatrix::zeros(self.n, self.n)))
    }

    fn analytic_jet(&self, p: &ChartPoint, order: usize) -> Option<Result<FieldJet>> {
        Some(self.radial(p.r()).map(|[e0, e1, e2]| {
            let mut jet = FieldJet::zeros(self.n, order == 2);
            jet.e[(0, 0)] = e0;
            jet.de[0][(0, 0)] = e1;
            if order == 2 {
                jet.dde[0][(0, 0)] = e2;
            }
            jet
        }))
    }

    fn min_radius(&self) -> f64 {
        self.horizon
    }
}

/// A smooth non-symmetric perturbation concentrated around a direction c.
///
/// With ρ = A e^{−τr} and G = exp(4(⟨c, ω⟩ − 1)):
/// e_rr = ρG, e_ra = 0.3 ρG sinh r ⟨c, ∂_a ω⟩, e_ab = −0.5 ρG b_ab,
/// k_rr = 0.5 ρG, k_ra = ρG sinh r ⟨Jω + c, ∂_a ω⟩ with J the rotation of the
/// (ω_0, ω_1) plane, and k_ab = 0.
#[derive(Clone, Debug)]
pub struct GaussianPerturbation {
    n: usize,
    amplitude: f64,
    tau: f64,
    center: Vec<f64>,
}

const CONCENTRATION: f64 = 4.0;
const RADIAL_WEIGHT: f64 = 1.0;
const ANGULAR_WEIGHT: f64 = -0.5;
const MIXED_WEIGHT: f64 = 0.3;
const K_RADIAL_WEIGHT: f64 = 0.5;

impl GaussianPerturbation {
    pub fn new(
        n: usize,
        amplitude: f64,
        tau: f64,
        center_theta: f64,
        center_phi: f64,
    ) -> Result<Self> {
        if n < 3 {
            return Err(Error::Dimension {
                expected: 3,
                got: n,
            });
        }
        if !(amplitude.abs() < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "|amplitude| = {} must be below 0.5",
                amplitude.abs()
            )));
        }
        if !(tau > 0.5 * n as f64) {
            return Err(Error::DecayViolation(format!(
                "tau = {tau} must exceed n/2 = {}",
                0.5 * n as f64
            )));
        }
        let mut x = vec![1.0, center_theta];
        x.extend(std::iter::repeat_n(FRAC_PI_2, n - 3));
        x.push(center_phi);
        let center = direction_monomials(n).iter().map(|m| m.value(&x)).collect();
        Ok(GaussianPerturbation {
            n,
            amplitude,
            tau,
            center,
        })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }
}

impl FieldSource for GaussianPerturbation {
    fn dim(&self) -> usize {
        self.n
    }

    fn values(&self, p: &ChartPoint) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let n = self.n;
        let x = p.coords();
        let r = x[0];
        let jets: Vec<_> = direction_monomials(n)
            .iter()
            .map(|m| m.jet(&x, false))
            .collect();
        let omega: Vec<f64> = jets.iter().map(|j| j.value).collect();
        let cdot: f64 = omega.iter().zip(&self.center).map(|(a, b)| a * b).sum();
        let amp = self.amplitude * (-self.tau * r).exp() * (CONCENTRATION * (cdot - 1.0)).exp();
        let s = r.sinh();
        let mut j_omega = vec![0.0; n];
        j_omega[0] = -omega[1];
        j_omega[1] = omega[0];

        let mut e = DMatrix::zeros(n, n);
        let mut k = DMatrix::zeros(n, n);
        e[(0, 0)] = amp * RADIAL_WEIGHT;
        k[(0, 0)] = amp * K_RADIAL_WEIGHT;
        for (a, bm) in metric_diagonal_monomials(n).iter().enumerate().skip(1) {
            let c_da: f64 = jets
                .iter()
                .zip(&self.center)
                .map(|(j, c)| c * j.grad[a])
                .sum();
            let j_da: f64 = jets.iter().zip(&j_omega).map(|(j, c)| c * j.grad[a]).sum();
            e[(0, a)] = amp * MIXED_WEIGHT * s * c_da;
            e[(a, 0)] = e[(0, a)];
            e[(a, a)] = amp * ANGULAR_WEIGHT * bm.value(&x);
            k[(0, a)] = amp * s * (j_da + c_da);
            k[(a, 0)] = k[(0, a)];
        }
        Ok((e, k))
    }
}

/// Σ_i c_i (e_i, k_i) over sources of one dimension.
#[derive(Clone, Debug)]
pub struct LinearCombination {
    n: usize,
    parts: Vec<(f64, Arc<dyn FieldSource>)>,
}

impl LinearCombination {
    pub fn new(parts: Vec<(f64, Arc<dyn FieldSource>)>) -> Result<Self> {
        let n = parts
            .first()
            .map(|p| p.1.dim())
            .ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?;
        if let Some(bad) = parts.iter().find(|p| p.1.dim() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: bad.1.dim(),
            });
        }
        Ok(LinearCombination { n, parts })
    }
}

impl FieldSource for LinearCombination {
    fn dim(&self) -> usize {
        self.n
    }

    fn values(&self, p: &ChartPoint) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let mut e = DMatrix::zeros(self.n, self.n);
        let mut k = DMatrix::zeros(self.n, self.n);
        for (c, src) in &self.parts {
            let (ei, ki) = src.values(p)?;
            e += ei * *c;
            k += ki * *c;
        }
        Ok((e, k))
    }

    fn analytic_jet(&self, p: &ChartPoint, order: usize) -> Option<Result<FieldJet>> {
        let mut acc = FieldJet::zeros(self.n, order == 2);
        for (c, src) in &self.parts {
            let jet = match src.analytic_jet(p, order)? {
                Ok(j) => j,
                Err(e) => return Some(Err(e)),
            };
            acc.e += jet.e * *c;
            acc.k += jet.k * *c;
            for (a, b) in acc.de.iter_mut().zip(jet.de) {
                *a += b * *c;
            }
            for (a, b) in acc.dk.iter_mut().zip(jet.dk) {
                *a += b * *c;
            }
            for (a, b) in acc.dde.iter_mut().zip(jet.dde) {
                *a += b * *c;
            }
        }
        Some(Ok(acc))
    }

    fn min_radius(&self) -> f64 {
        self.parts
            .iter()
            .map(|p| p.1.min_radius())
            .fold(0.0, f64::max)
    }
}
