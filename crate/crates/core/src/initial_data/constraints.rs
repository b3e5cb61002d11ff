use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::decay::field_scale;
use super::{DerivativeMode, InitialData};
use crate::error::{Error, Result};
use crate::fit::log_slope;
use crate::geometry::{background_jet, ChartPoint};
use crate::quadrature::SphereQuadrature;
use crate::tensor::{curvature, invert_symmetric, MetricJet};

/// Default tolerance of the causal verdicts.
pub const DEC_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalVerdict {
    Satisfied,
    Marginal,
    Violated,
}

impl CausalVerdict {
    /// Satisfied or within tolerance of the light cone.
    pub fn is_causal(self) -> bool {
        !matches!(self, CausalVerdict::Violated)
    }
}

/// Verdict for the vector (time, space) with |space| = `space_norm`: causal
/// and future-directed when time ≥ |space|.
pub fn classify_causal(time: f64, space_norm: f64, tol: f64) -> CausalVerdict {
    let gap = time - space_norm;
    if gap < -tol {
        CausalVerdict::Violated
    } else if time.abs() <= tol && space_norm <= tol {
        CausalVerdict::Satisfied
    } else if gap <= tol {
        CausalVerdict::Marginal
    } else {
        CausalVerdict::Satisfied
    }
}

/// Φ(g, k) − Φ(b, 0) at a point, with the physical metric g kept for norms.
#[derive(Clone, Debug)]
pub struct ConstraintDeficit {
    pub scalar_part: f64,
    pub vector_part: Vec<f64>,
    pub point: ChartPoint,
    pub metric: DMatrix<f64>,
}

impl ConstraintDeficit {
    /// |vector_part|_g.
    pub fn vector_norm(&self) -> f64 {
        covector_norm(&self.vector_part, &self.metric)
    }

    pub fn verdict(&self) -> CausalVerdict {
        dec_check(self, &self.metric)
    }
}

fn covector_norm(v: &[f64], g: &DMatrix<f64>) -> f64 {
    match invert_symmetric(g) {
        Ok(ginv) => {
            let v = nalgebra::DVector::from_column_slice(v);
            (v.transpose() * ginv * &v)[(0, 0)].max(0.0).sqrt()
        }
        Err(_) => f64::INFINITY,
    }
}

struct Physical {
    scalar: f64,
    vector: Vec<f64>,
    g: DMatrix<f64>,
}

fn physical(data: &InitialData, p: &ChartPoint) -> Result<Physical> {
    let n = p.dim();
    let b = background_jet(p)?;
    let f = data.jet(p, 2)?;
    let g = &b.g + &f.e;
    let dg: Vec<DMatrix<f64>> = b.dg.iter().zip(&f.de).map(|(x, y)| x + y).collect();
    let ddg: Vec<DMatrix<f64>> = b.ddg.iter().zip(&f.dde).map(|(x, y)| x + y).collect();
    let jet = MetricJet {
        g: g.clone(),
        dg: dg.clone(),
        ddg,
    };
    let curv = curvature(&jet)?;
    let ginv = &curv.ginv;
    let k = &f.k;

    let tr_k = ginv.component_mul(k).sum();
    let k_sq = (ginv * k * ginv).component_mul(k).sum();
    let scalar = curv.scalar + tr_k * tr_k - k_sq;

    let gamma = &curv.christoffel;
    let mut vector = vec![0.0; n];
    for (j, out) in vector.iter_mut().enumerate() {
        let mut div = 0.0;
        for i in 0..n {
            for l in 0..n {
                let gil = ginv[(i, l)];
                if gil == 0.0 {
                    continue;
                }
                let mut cov = f.dk[l][(i, j)];
                for m in 0..n {
                    cov -= gamma.get(m, l, i) * k[(m, j)] + gamma.get(m, l, j) * k[(i, m)];
                }
                div += gil * cov;
            }
        }
        let dginv = -(ginv * &dg[j] * ginv);
        let d_tr = dginv.component_mul(k).sum() + ginv.component_mul(&f.dk[j]).sum();
        *out = 2.0 * (-div + d_tr);
    }
    Ok(Physical { scalar, vector, g })
}

/// Φ(g, k) = (Scal^g + (tr_g k)² − |k|²_g, 2(δ_g k + d tr_g k)).
pub fn constraints_map(data: &InitialData, p: &ChartPoint) -> Result<(f64, Vec<f64>)> {
    let ph = physical(data, p)?;
    Ok((ph.scalar, ph.vector))
}

/// Φ(g, k) − Φ(b, 0). The background scalar curvature is computed by the
/// same chart routine as Scal^g, so the exact slice gives an exact zero.
pub fn constraint_deficit(data: &InitialData, p: &ChartPoint) -> Result<ConstraintDeficit> {
    let ph = physical(data, p)?;
    let scal_b = curvature(&background_jet(p)?)?.scalar;
    Ok(ConstraintDeficit {
        scalar_part: ph.scalar - scal_b,
        vector_part: ph.vector,
        point: p.clone(),
        metric: ph.g,
    })
}

/// Dominant energy condition: scalar_part ≥ |vector_part|_g.
pub fn dec_check(d: &ConstraintDeficit, g: &DMatrix<f64>) -> CausalVerdict {
    classify_causal(d.scalar_part, covector_norm(&d.vector_part, g), DEC_TOL)
}

/// Data of an inner boundary: tr k̆ (second fundamental form trace with
/// respect to the induced metric) and the 1-form k(ν).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    pub tr_breve_k: f64,
    pub k_nu: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryVector {
    pub time: f64,
    pub space: Vec<f64>,
    pub space_norm: f64,
    pub verdict: CausalVerdict,
}

/// k⃗ = (−tr k̆ + (n − 1)) e_0 + k(ν), required causal and future-directed.
pub fn boundary_k_vector(bd: &BoundaryData, g: &DMatrix<f64>) -> Result<BoundaryVector> {
    let n = g.nrows();
    if bd.k_nu.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: bd.k_nu.len(),
        });
    }
    let time = -bd.tr_breve_k + (n as f64 - 1.0);
    let space_norm = covector_norm(&bd.k_nu, g);
    Ok(BoundaryVector {
        time,
        space: bd.k_nu.clone(),
        space_norm,
        verdict: classify_causal(time, space_norm, DEC_TOL),
    })
}

/// One sampled DEC evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecSample {
    pub r: f64,
    pub angles: Vec<f64>,
    pub scalar_part: f64,
    pub vector_norm: f64,
    pub verdict: CausalVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecSampleReport {
    pub satisfied: usize,
    pub marginal: usize,
    pub violated: usize,
    pub samples: Vec<DecSample>,
}

impl DecSampleReport {
    pub fn all_causal(&self) -> bool {
        self.violated == 0
    }
}

/// DEC verdicts at `count` seeded random points with r in `[r_min, r_max)`,
/// polar angles kept 0.05 away from the axis.
pub fn dec_sample(
    data: &InitialData,
    count: usize,
    seed: u64,
    r_min: f64,
    r_max: f64,
) -> Result<DecSampleReport> {
    use rand::{Rng, SeedableRng};
    if !(r_min < r_max && r_min > data.source.min_radius()) {
        return Err(Error::InvalidParameter(format!(
            "sampling shell [{r_min}, {r_max}) must lie above r = {}",
            data.source.min_radius()
        )));
    }
    let n = data.dim();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut report = DecSampleReport {
        satisfied: 0,
        marginal: 0,
        violated: 0,
        samples: Vec::with_capacity(count),
    };
    for _ in 0..count {
        let r = rng.random_range(r_min..r_max);
        let mut angles: Vec<f64> = (0..n - 2)
            .map(|_| rng.random_range(0.05..std::f64::consts::PI - 0.05))
            .collect();
        angles.push(rng.random_range(0.0..std::f64::consts::TAU));
        let d = constraint_deficit(data, &ChartPoint::new(r, angles.clone())?)?;
        let verdict = d.verdict();
        match verdict {
            CausalVerdict::Satisfied => report.satisfied += 1,
            CausalVerdict::Marginal => report.marginal += 1,
            CausalVerdict::Violated => report.violated += 1,
        }
        report.samples.push(DecSample {
            r,
            angles,
            scalar_part: d.scalar_part,
            vector_norm: d.vector_norm(),
            verdict,
        });
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegrabilityReport {
    pub radii: Vec<f64>,
    /// max over the sphere of |Φ(g,k) − Φ(b,0)| e^r sinh^{n−1} r.
    pub probes: Vec<f64>,
    /// max over the sphere of the deficit itself.
    pub deficit_max: Vec<f64>,
    /// Fitted exponent λ in probe ≈ C e^{λ r}.
    pub fitted_rate: Option<f64>,
    /// The deficit is at the noise level of the derivative mode.
    pub vanishing: bool,
    pub integrable: bool,
}

/// Relative size of the derivative noise in the deficit, by mode.
fn noise_level(mode: DerivativeMode) -> f64 {
    match mode {
        DerivativeMode::Analytic => 0.0,
        DerivativeMode::FiniteDifference { .. } => 1e-4,
    }
}

/// Sup-norm decay probe of the weighted deficit over coordinate spheres.
pub fn integrability_probe(
    data: &InitialData,
    radii: &[f64],
    quad: &SphereQuadrature,
) -> Result<IntegrabilityReport> {
    if radii.windows(2).any(|w| w[1] <= w[0]) || radii.is_empty() {
        return Err(Error::InvalidSchedule(
            "probe radii must be strictly increasing".into(),
        ));
    }
    let n = data.dim();
    let mut probes = Vec::with_capacity(radii.len());
    let mut deficit_max = Vec::with_capacity(radii.len());
    let mut vanishing = true;
    for &r in radii {
        let mut worst: f64 = 0.0;
        for node in quad.nodes() {
            let p = ChartPoint::new(r, node.clone())?;
            let d = constraint_deficit(data, &p)?;
            worst = worst.max(d.scalar_part.hypot(d.vector_norm()));
        }
        let scale = field_scale(data, r, quad)?;
        if worst > DEC_TOL.max(noise_level(data.mode) * scale) {
            vanishing = false;
        }
        deficit_max.push(worst);
        probes.push(worst * r.exp() * r.sinh().powi(n as i32 - 1));
    }
    let fitted_rate = if vanishing {
        None
    } else {
        log_slope(radii, &probes)
    };
    let integrable = vanishing || fitted_rate.is_some_and(|s| s < 0.0);
    Ok(IntegrabilityReport {
        radii: radii.to_vec(),
        probes,
        deficit_max,
        fitted_rate,
        vanishing,
        integrable,
    })
}
