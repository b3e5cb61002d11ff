//! Chart tensor calculus shared by the background and the physical metric.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Levi-Civita symbols Γ^k_ij stored densely as `[k][i][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(n: usize) -> Self {
        Christoffel {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    #[inline]
    fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.data[(k * self.n + i) * self.n + j] = v;
    }

    /// Largest |Γ^k_ij − Γ^k_ji|.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    worst = worst.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }
}

/// Metric components with first and second chart partials.
/// `dg[a]` is ∂_a g and `ddg[a * n + b]` is ∂_a ∂_b g.
#[derive(Clone, Debug)]
pub struct MetricJet {
    pub g: DMatrix<f64>,
    pub dg: Vec<DMatrix<f64>>,
    pub ddg: Vec<DMatrix<f64>>,
}

impl MetricJet {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }
}

pub fn invert_symmetric(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let inv = g.clone().cholesky().ok_or(Error::SingularMetric)?.inverse();
    if inv.iter().all(|v| v.is_finite()) {
        Ok(inv)
    } else {
        Err(Error::SingularMetric)
    }
}

/// Γ^k_ij = ½ g^{kl}(∂_i g_lj + ∂_j g_li − ∂_l g_ij).
pub fn christoffel(ginv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Christoffel {
    let n = ginv.nrows();
    let mut out = Christoffel::zeros(n);
    for i in 0..n {
        for j in i..n {
            for k in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    let gkl = ginv[(k, l)];
                    if gkl != 0.0 {
                        s += gkl * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)]);
                    }
                }
                out.set(k, i, j, 0.5 * s);
                out.set(k, j, i, 0.5 * s);
            }
        }
    }
    out
}

/// Curvature data of a metric jet.
#[derive(Clone, Debug)]
pub struct Curvature {
    pub ginv: DMatrix<f64>,
    pub christoffel: Christoffel,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

/// Ricci tensor R_ij = ∂_kΓ^k_ij − ∂_jΓ^k_ik + Γ^k_kl Γ^l_ij − Γ^k_jl Γ^l_ik and
/// its trace, computed from the full chart jet without linearization.
pub fn curvature(jet: &MetricJet) -> Result<Curvature> {
    let n = jet.dim();
    let ginv = invert_symmetric(&jet.g)?;
    let gamma = christoffel(&ginv, &jet.dg);

    // ∂_m g^{kl} = −g^{ka} ∂_m g_ab g^{bl}
    let dginv: Vec<DMatrix<f64>> = jet.dg.iter().map(|d| -(&ginv * d * &ginv)).collect();

    // S_lij = ∂_i g_lj + ∂_j g_li − ∂_l g_ij and its partials
    let s =
        |l: usize, i: usize, j: usize| jet.dg[i][(l, j)] + jet.dg[j][(l, i)] - jet.dg[l][(i, j)];
    let ds = |m: usize, l: usize, i: usize, j: usize| {
        jet.ddg[m * n + i][(l, j)] + jet.ddg[m * n + j][(l, i)] - jet.ddg[m * n + l][(i, j)]
    };
    // ∂_m Γ^k_ij
    let dgamma = |m: usize, k: usize, i: usize, j: usize| {
        let mut acc = 0.0;
        for l in 0..n {
            acc += dginv[m][(k, l)] * s(l, i, j) + ginv[(k, l)] * ds(m, l, i, j);
        }
        0.5 * acc
    };

    let mut ricci = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let mut r = 0.0;
            for k in 0..n {
                r += dgamma(k, k, i, j) - dgamma(j, k, i, k);
                for l in 0..n {
                    r += gamma.get(k, k, l) * gamma.get(l, i, j)
                        - gamma.get(k, j, l) * gamma.get(l, i, k);
                }
            }
            ricci[(i, j)] = r;
            ricci[(j, i)] = r;
        }
    }
    let scalar = ginv.component_mul(&ricci).sum();
    Ok(Curvature {
        ginv,
        christoffel: gamma,
        ricci,
        scalar,
    })
}
