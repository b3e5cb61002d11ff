//! Tabulated three-dimensional data on a uniform (r, θ, φ) grid.
//!
//! File layout: a JSON object with `n`, `tau`, `r_values`, `theta_values`,
//! `phi_values` and the arrays `e[r][θ][φ]`, `k[r][θ][φ]`. Each tensor is
//! either three rows `[[x00, x01, x02], [x11, x12], [x22]]` (upper triangle)
//! or a full 3×3 array.
//!
//! Interpolation acts on the rescaled fields `e^{τr}·e` and `e^{τr}·k`,
//! which stay bounded as r grows.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::spline::{Axis, TensorSpline3};
use super::{FieldSource, InitialData};
use crate::error::{Error, Result};
use crate::geometry::ChartPoint;

const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];
const AXIS_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub n: usize,
    pub tau: f64,
    pub r_values: Vec<f64>,
    pub theta_values: Vec<f64>,
    pub phi_values: Vec<f64>,
}

type TensorRows = Vec<Vec<f64>>;
type Payload = Vec<Vec<Vec<TensorRows>>>;

/// On-disk representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFile {
    pub n: usize,
    pub tau: f64,
    pub r_values: Vec<f64>,
    pub theta_values: Vec<f64>,
    pub phi_values: Vec<f64>,
    pub e: Payload,
    pub k: Payload,
}

impl GridFile {
    pub fn header(&self) -> GridHeader {
        GridHeader {
            n: self.n,
            tau: self.tau,
            r_values: self.r_values.clone(),
            theta_values: self.theta_values.clone(),
            phi_values: self.phi_values.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Spline interpolant of a grid file.
#[derive(Clone, Debug)]
pub struct GridData {
    pub header: GridHeader,
    splines: Vec<TensorSpline3>,
}

fn uniform_axis(name: &str, xs: &[f64], periodic: bool) -> Result<Axis> {
    if xs.len() < 4 {
        return Err(Error::Grid(format!("{name} needs at least 4 values")));
    }
    let step = if periodic {
        TAU / xs.len() as f64
    } else {
        (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64
    };
    if !(step > 0.0) {
        return Err(Error::Grid(format!("{name} must be increasing")));
    }
    for (i, x) in xs.iter().enumerate() {
        let expected = xs[0] + step * i as f64;
        if !((x - expected).abs() <= AXIS_TOL * x.abs().max(1.0)) {
            return Err(Error::Grid(if periodic {
                format!("{name} must be uniform and cover one period")
            } else {
                format!("{name} must be uniformly spaced")
            }));
        }
    }
    Ok(Axis {
        start: xs[0],
        step,
        len: xs.len(),
        periodic,
    })
}

fn upper_entry(rows: &TensorRows, i: usize, j: usize) -> Result<f64> {
    if rows.len() != 3 {
        return Err(Error::Grid(format!(
            "tensor must have 3 rows, got {}",
            rows.len()
        )));
    }
    let row = &rows[i];
    match row.len() {
        3 => Ok(row[j]),
        l if l == 3 - i => Ok(row[j - i]),
        l => Err(Error::Grid(format!("tensor row {i} has {l} entries"))),
    }
}

impl GridData {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str::<GridFile>(text)?)
    }

    pub fn from_file(file: &GridFile) -> Result<Self> {
        if file.n != 3 {
            return Err(Error::Grid(format!(
                "only n = 3 grids are supported, got n = {}",
                file.n
            )));
        }
        if !(file.tau > 1.5) {
            return Err(Error::DecayViolation(format!(
                "grid tau = {} must exceed n/2",
                file.tau
            )));
        }
        let ra = uniform_axis("r_values", &file.r_values, false)?;
        let ta = uniform_axis("theta_values", &file.theta_values, false)?;
        let pa = uniform_axis("phi_values", &file.phi_values, true)?;
        if file.r_values[0] <= 0.0 {
            return Err(Error::Grid("r_values must be positive".into()));
        }
        if file.tau * file.r_values[file.r_values.len() - 1] > 700.0 {
            return Err(Error::Grid(
                "tau · r exceeds the floating-point range of the rescaling".into(),
            ));
        }
        if file.theta_values[0] <= 0.0 || *file.theta_values.last().unwrap() >= PI {
            return Err(Error::Grid("theta_values must lie inside (0, π)".into()));
        }
        let dims = [ra.len, ta.len, pa.len];
        let mut splines = Vec::with_capacity(12);
        for payload in [&file.e, &file.k] {
            let shape_ok = payload.len() == dims[0]
                && payload
                    .iter()
                    .all(|a| a.len() == dims[1] && a.iter().all(|b| b.len() == dims[2]));
            if !shape_ok {
                return Err(Error::Grid(format!(
                    "payload shape must be {}×{}×{}",
                    dims[0], dims[1], dims[2]
                )));
            }
            for &(i, j) in &PAIRS {
                let mut vals = Vec::with_capacity(dims.iter().product());
                for (a, &r) in payload.iter().zip(&file.r_values) {
                    let w = (file.tau * r).exp();
                    for b in a {
                        for t in b {
                            let v = upper_entry(t, i, j)?;
                            if !v.is_finite() {
                                return Err(Error::Grid("non-finite payload value".into()));
                            }
                            vals.push(v * w);
                        }
                    }
                }
                splines.push(TensorSpline3::new(
                    [ra.clone(), ta.clone(), pa.clone()],
                    &vals,
                ));
            }
        }
        Ok(GridData {
            header: file.header(),
            splines,
        })
    }
}

impl FieldSource for GridData {
    fn dim(&self) -> usize {
        3
    }

    fn min_radius(&self) -> f64 {
        self.header.r_values[0]
    }

    fn values(&self, p: &ChartPoint) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        let x = [p.r(), p.angles()[0], p.angles()[1]];
        let w = (-self.header.tau * x[0]).exp();
        let mut e = DMatrix::zeros(3, 3);
        let mut k = DMatrix::zeros(3, 3);
        for (s, &(i, j)) in PAIRS.iter().enumerate() {
            e[(i, j)] = w * self.splines[s].eval(x)?;
            e[(j, i)] = e[(i, j)];
            k[(i, j)] = w * self.splines[6 + s].eval(x)?;
            k[(j, i)] = k[(i, j)];
        }
        Ok((e, k))
    }
}

/// Samples three-dimensional data on a grid with θ ∈ [0.02, π − 0.02] and
/// φ uniform on [0, 2π).
pub fn export_grid(
    data: &InitialData,
    r_values: &[f64],
    n_theta: usize,
    n_phi: usize,
) -> Result<GridFile> {
    if data.dim() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            got: data.dim(),
        });
    }
    if n_theta < 4 || n_phi < 4 {
        return Err(Error::Grid(
            "at least 4 angular samples per axis are required".into(),
        ));
    }
    let (t0, t1) = (0.02, PI - 0.02);
    let theta_values: Vec<f64> = (0..n_theta)
        .map(|i| t0 + (t1 - t0) * i as f64 / (n_theta - 1) as f64)
        .collect();
    let phi_values: Vec<f64> = (0..n_phi).map(|j| TAU * j as f64 / n_phi as f64).collect();
    let rows = |m: &DMatrix<f64>| -> TensorRows {
        (0..3)
            .map(|i| (i..3).map(|j| m[(i, j)]).collect())
            .collect()
    };
    let mut e = Vec::with_capacity(r_values.len());
    let mut k = Vec::with_capacity(r_values.len());
    for &r in r_values {
        let mut er = Vec::with_capacity(n_theta);
        let mut kr = Vec::with_capacity(n_theta);
        for &t in &theta_values {
            let mut et = Vec::with_capacity(n_phi);
            let mut kt = Vec::with_capacity(n_phi);
            for &ph in &phi_values {
                let (ev, kv) = data.values(&ChartPoint::new3(r, t, ph)?)?;
                et.push(rows(&ev));
                kt.push(rows(&kv));
            }
            er.push(et);
            kr.push(kt);
        }
        e.push(er);
        k.push(kr);
    }
    Ok(GridFile {
        n: 3,
        tau: data.tau,
        r_values: r_values.to_vec(),
        theta_values,
        phi_values,
        e,
        k,
    })
}
