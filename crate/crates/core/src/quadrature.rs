//! Product quadrature on S^{n−1} in the polar chart.
//!
//! Each polar angle θ_m carries the density sin^k θ_m. Substituting x = cos θ
//! turns this into the Gauss-Jacobi weight (1 − x²)^{(k−1)/2}, so the rule is
//! exact for spherical polynomials. The azimuth uses the periodic trapezoid rule.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_POLAR_NODES: usize = 24;
pub const DEFAULT_AZIMUTH_NODES: usize = 48;

/// Gauss-Legendre nodes and weights on [−1, 1], ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre needs at least one node");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let (p, pm1) = if n == 1 { (z, 1.0) } else { (p1, p0) };
            dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss rule for the weight (1 − x²)^a on [−1, 1], by Golub-Welsch.
pub fn gauss_jacobi_symmetric(n: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0 && a > -1.0, "invalid Gauss-Jacobi parameters");
    let mut jm = nalgebra::DMatrix::<f64>::zeros(n, n);
    for j in 1..n {
        let jf = j as f64;
        let s = 2.0 * jf + 2.0 * a;
        let b2 = 4.0 * jf * (jf + a) * (jf + a) * (jf + 2.0 * a) / (s * s * (s + 1.0) * (s - 1.0));
        jm[(j, j - 1)] = b2.sqrt();
        jm[(j - 1, j)] = b2.sqrt();
    }
    let mu0 = PI.sqrt() * gamma(a + 1.0) / gamma(a + 1.5);
    let eig = jm.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    pairs.into_iter().unzip()
}

/// Γ on half-integers and integers, via [`gamma_half`].
fn gamma(x: f64) -> f64 {
    let k = (2.0 * x).round();
    assert!(
        (2.0 * x - k).abs() < 1e-12 && k > 0.0,
        "gamma is only needed at half-integers"
    );
    gamma_half(k as usize)
}

/// Nodes (angles θ_1 … θ_{n−2}, φ) with weights for the coordinate measure;
/// multiplying by the sphere density Π sin^{n−1−m} θ_m integrates over S^{n−1}.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SphereQuadrature {
    n: usize,
    polar_nodes: usize,
    azimuth_nodes: usize,
    nodes: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl SphereQuadrature {
    pub fn new(n: usize, polar_nodes: usize, azimuth_nodes: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Dimension {
                expected: 3,
                got: n,
            });
        }
        if polar_nodes < 2 || azimuth_nodes < 3 {
            return Err(Error::InvalidParameter(format!(
                "quadrature orders ({polar_nodes}, {azimuth_nodes}) are too small"
            )));
        }
        // θ_m has density sin^{n−1−m} θ_m
        let polar: Vec<Vec<(f64, f64)>> = (1..n - 1)
            .map(|m| {
                let k = (n - 1 - m) as i32;
                let (x, w) = if k == 1 {
                    gauss_legendre(polar_nodes)
                } else {
                    gauss_jacobi_symmetric(polar_nodes, 0.5 * (k - 1) as f64)
                };
                x.iter()
                    .zip(&w)
                    .rev()
                    .map(|(&xi, &wi)| {
                        let t = xi.acos();
                        (t, wi / t.sin().powi(k))
                    })
                    .collect()
            })
            .collect();
        let azimuth: Vec<(f64, f64)> = (0..azimuth_nodes)
            .map(|j| {
                (
                    TAU * j as f64 / azimuth_nodes as f64,
                    TAU / azimuth_nodes as f64,
                )
            })
            .collect();

        let mut axes: Vec<&[(f64, f64)]> = polar.iter().map(|a| a.as_slice()).collect();
        axes.push(&azimuth);
        let total: usize = axes.iter().map(|a| a.len()).product();
        let mut nodes = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; axes.len()];
        for _ in 0..total {
            let mut node = Vec::with_capacity(axes.len());
            let mut wt = 1.0;
            for (a, &i) in axes.iter().zip(&idx) {
                node.push(a[i].0);
                wt *= a[i].1;
            }
            nodes.push(node);
            weights.push(wt);
            for d in (0..axes.len()).rev() {
                idx[d] += 1;
                if idx[d] < axes[d].len() {
                    break;
                }
                idx[d] = 0;
            }
        }
        Ok(SphereQuadrature {
            n,
            polar_nodes,
            azimuth_nodes,
            nodes,
            weights,
        })
    }

    pub fn default_for(n: usize) -> Result<Self> {
        Self::new(n, DEFAULT_POLAR_NODES, DEFAULT_AZIMUTH_NODES)
    }

    /// Same scheme with both orders doubled.
    pub fn refined(&self) -> Result<Self> {
        Self::new(self.n, 2 * self.polar_nodes, 2 * self.azimuth_nodes)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn orders(&self) -> (usize, usize) {
        (self.polar_nodes, self.azimuth_nodes)
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Total degree of spherical polynomials integrated exactly.
    pub fn design_degree(&self) -> usize {
        (2 * self.polar_nodes - 1).min(self.azimuth_nodes - 1)
    }

    /// Σ weight · density · f(ω) for a function of the unit direction.
    pub fn integrate_direction(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(node, w)| {
                let (omega, dens) = direction_and_density(self.n, node);
                w * dens * f(&omega)
            })
            .collect();
        pairwise_sum(&terms)
    }

    /// Largest error on the monomials ω^a of total degree ≤ `degree`, relative
    /// to the sphere area.
    pub fn self_test(&self, degree: usize) -> f64 {
        let area = sphere_area(self.n);
        let mut worst: f64 = 0.0;
        let n = self.n;
        // per node: weight·density and the table ω_i^e for e ≤ degree
        let pre: Vec<(f64, Vec<Vec<f64>>)> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(node, w)| {
                let (omega, dens) = direction_and_density(n, node);
                let powers = omega
                    .iter()
                    .map(|o| {
                        std::iter::successors(Some(1.0), |p| Some(p * o))
                            .take(degree + 1)
                            .collect()
                    })
                    .collect();
                (w * dens, powers)
            })
            .collect();
        let mut terms = vec![0.0; pre.len()];
        for_each_exponent(n, degree, &mut |exps: &[usize]| {
            let exact = monomial_integral(exps);
            for (t, (wd, powers)) in terms.iter_mut().zip(&pre) {
                *t = wd * exps.iter().zip(powers).map(|(&e, p)| p[e]).product::<f64>();
            }
            worst = worst.max((pairwise_sum(&terms) - exact).abs() / area);
        });
        worst
    }

    /// Runs [`self_test`](Self::self_test) at the design degree.
    pub fn checked(self, tol: f64) -> Result<Self> {
        let err = self.self_test(self.design_degree());
        if err > tol {
            return Err(Error::QuadratureTooLow(err));
        }
        Ok(self)
    }
}

fn direction_and_density(n: usize, angles: &[f64]) -> (Vec<f64>, f64) {
    let mut x = Vec::with_capacity(n);
    x.push(1.0);
    x.extend_from_slice(angles);
    let omega = crate::geometry::direction_monomials(n)
        .iter()
        .map(|m| m.value(&x))
        .collect();
    let dens = angles[..n - 2]
        .iter()
        .enumerate()
        .map(|(m, a)| a.sin().powi((n - 2 - m) as i32))
        .product();
    (omega, dens)
}

fn for_each_exponent(n: usize, degree: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(slot: usize, left: usize, exps: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if slot == exps.len() {
            f(exps);
            return;
        }
        for e in 0..=left {
            exps[slot] = e;
            rec(slot + 1, left - e, exps, f);
        }
        exps[slot] = 0;
    }
    let mut exps = vec![0; n];
    rec(0, degree, &mut exps, f);
}

/// Γ(k/2) for a positive integer k.
pub fn gamma_half(k: usize) -> f64 {
    assert!(k > 0, "gamma_half needs a positive argument");
    let (mut g, mut x) = if k.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = k as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// ∫_{S^{n−1}} Π ω_i^{a_i} dΩ = 2 Π Γ((a_i+1)/2) / Γ((Σa_i + n)/2) for even a_i, else 0.
pub fn monomial_integral(exps: &[usize]) -> f64 {
    if exps.iter().any(|e| e % 2 == 1) {
        return 0.0;
    }
    let num: f64 = exps.iter().map(|&e| gamma_half(e + 1)).product();
    let total: usize = exps.iter().sum::<usize>() + exps.len();
    2.0 * num / gamma_half(total)
}

/// |S^{n−1}|.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// Deterministic pairwise (tree) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        len => {
            let (a, b) = xs.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}
