//! Interpolating tensor-product cubic B-splines on uniform axes.

use nalgebra::{DMatrix, DVector, Dyn, LU};

use crate::error::{Error, Result};

/// A uniform axis; periodic axes wrap with period `len * step`.
#[derive(Clone, Debug)]
pub(crate) struct Axis {
    pub start: f64,
    pub step: f64,
    pub len: usize,
    pub periodic: bool,
}

impl Axis {
    /// Number of stored coefficients (natural axes carry one ghost per end).
    fn coeff_len(&self) -> usize {
        if self.periodic {
            self.len
        } else {
            self.len + 2
        }
    }

    /// Interpolation matrix (1, 4, 1)/6 with natural or periodic closure.
    fn system(&self) -> LU<f64, Dyn, Dyn> {
        let n = self.len;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 4.0 / 6.0;
            if self.periodic {
                m[(i, (i + 1) % n)] += 1.0 / 6.0;
                m[(i, (i + n - 1) % n)] += 1.0 / 6.0;
            } else if i == 0 || i == n - 1 {
                // zero second derivative makes the end coefficient equal the value
                m[(i, i)] = 1.0;
            } else {
                m[(i, i - 1)] = 1.0 / 6.0;
                m[(i, i + 1)] = 1.0 / 6.0;
            }
        }
        m.lu()
    }

    /// Solves for the coefficients of one line and appends natural ghosts.
    fn solve_line(&self, lu: &LU<f64, Dyn, Dyn>, values: &[f64]) -> Vec<f64> {
        let c = lu
            .solve(&DVector::from_column_slice(values))
            .expect("spline system is nonsingular");
        if self.periodic {
            return c.iter().copied().collect();
        }
        let n = self.len;
        let mut out = Vec::with_capacity(n + 2);
        out.push(2.0 * c[0] - c[1]);
        out.extend(c.iter().copied());
        out.push(2.0 * c[n - 1] - c[n - 2]);
        out
    }

    /// Coefficient indices and B-spline weights for coordinate x.
    fn stencil(&self, x: f64) -> Result<([usize; 4], [f64; 4])> {
        let u = (x - self.start) / self.step;
        let (cell, t) = if self.periodic {
            let u = u.rem_euclid(self.len as f64);
            let cell = (u.floor() as usize).min(self.len - 1);
            (cell, u - cell as f64)
        } else {
            let last = (self.len - 1) as f64;
            let tol = 1e-12 * last.max(1.0);
            if !(u >= -tol && u <= last + tol) {
                return Err(Error::Grid(format!(
                    "coordinate {x} outside [{}, {}]",
                    self.start,
                    self.start + last * self.step
                )));
            }
            let u = u.clamp(0.0, last);
            let cell = (u.floor() as usize).min(self.len - 2);
            (cell, u - cell as f64)
        };
        let idx = if self.periodic {
            let n = self.len;
            [(cell + n - 1) % n, cell, (cell + 1) % n, (cell + 2) % n]
        } else {
            // natural storage is shifted by the leading ghost
            [cell, cell + 1, cell + 2, cell + 3]
        };
        let s = 1.0 - t;
        let w = [
            s * s * s / 6.0,
            (3.0 * t * t * t - 6.0 * t * t + 4.0) / 6.0,
            (-3.0 * t * t * t + 3.0 * t * t + 3.0 * t + 1.0) / 6.0,
            t * t * t / 6.0,
        ];
        Ok((idx, w))
    }
}

/// Trivariate interpolant; values are given row-major over (axis0, axis1, axis2).
#[derive(Clone, Debug)]
pub(crate) struct TensorSpline3 {
    axes: [Axis; 3],
    dims: [usize; 3],
    coeffs: Vec<f64>,
}

impl TensorSpline3 {
    pub fn new(axes: [Axis; 3], values: &[f64]) -> Self {
        let mut dims = [axes[0].len, axes[1].len, axes[2].len];
        assert_eq!(
            values.len(),
            dims.iter().product::<usize>(),
            "value count mismatch"
        );
        let mut data = values.to_vec();
        for (ax, axis) in axes.iter().enumerate() {
            let lu = axis.system();
            let mut out_dims = dims;
            out_dims[ax] = axis.coeff_len();
            let mut out = vec![0.0; out_dims.iter().product()];
            let stride = |d: &[usize; 3], a: usize| -> usize { d[a + 1..].iter().product() };
            let (s_in, s_out) = (stride(&dims, ax), stride(&out_dims, ax));
            let outer: usize = dims[..ax].iter().product();
            let inner: usize = dims[ax + 1..].iter().product();
            let mut line = vec![0.0; dims[ax]];
            for o in 0..outer {
                for i in 0..inner {
                    let base_in = o * dims[ax] * inner + i;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[base_in + j * s_in];
                    }
                    let c = axis.solve_line(&lu, &line);
                    let base_out = o * out_dims[ax] * inner + i;
                    for (j, v) in c.iter().enumerate() {
                        out[base_out + j * s_out] = *v;
                    }
                }
            }
            data = out;
            dims = out_dims;
        }
        TensorSpline3 {
            axes,
            dims,
            coeffs: data,
        }
    }

    pub fn eval(&self, x: [f64; 3]) -> Result<f64> {
        let (i0, w0) = self.axes[0].stencil(x[0])?;
        let (i1, w1) = self.axes[1].stencil(x[1])?;
        let (i2, w2) = self.axes[2].stencil(x[2])?;
        let [_, d1, d2] = self.dims;
        let mut acc = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let row = (i0[a] * d1 + i1[b]) * d2;
                let wab = w0[a] * w1[b];
                for c in 0..4 {
                    acc += wab * w2[c] * self.coeffs[row + i2[c]];
                }
            }
        }
        Ok(acc)
    }
}
