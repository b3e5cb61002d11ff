//! Non-negativity of Q: principal minors, an eigenvalue oracle, the SL(2,C)
//! orbit normal form and the reduced inequality.

use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};

use crate::charges::{q_from_components, EnergyMomentum, QForm};
use crate::error::{Error, Result};
use crate::spin3::{adjugate, pauli, HermMatrix, Mat2, Mat4, SL2Element, C64};

/// Default relative band for three-valued verdicts.
pub const DEFAULT_EPS: f64 = 1e-9;

/// Three-valued verdict; `Marginal` means within the tolerance band of the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Marginal,
    Fails,
}

impl Verdict {
    /// Classifies `value ≥ 0` with a band of half-width `band`.
    pub fn classify(value: f64, band: f64) -> Self {
        if value.is_nan() || value < -band {
            Verdict::Fails
        } else if value <= band {
            Verdict::Marginal
        } else {
            Verdict::Holds
        }
    }

    /// Fails dominates Marginal, which dominates Holds.
    pub fn combine(self, other: Self) -> Self {
        use Verdict::*;
        match (self, other) {
            (Fails, _) | (_, Fails) => Fails,
            (Marginal, _) | (_, Marginal) => Marginal,
            _ => Holds,
        }
    }

    /// True unless the verdict is `Fails`.
    pub fn non_negative(self) -> bool {
        self != Verdict::Fails
    }
}

/// S = diag(ẽ⁻¹, ẽ*), so that the form of `group_action(ẽ, em)` is S* Q S.
pub fn congruence_matrix(e: &SL2Element) -> Mat4 {
    let (a, b) = (*e.inverse().matrix(), *e.adjoint().matrix());
    Mat4::from_fn(|i, j| match (i / 2, j / 2) {
        (0, 0) => a[(i, j)],
        (1, 1) => b[(i - 2, j - 2)],
        _ => C64::new(0.0, 0.0),
    })
}

/// Dual action on M ⊕ Ξ: M ↦ ẽ M ẽ*, Ξ ↦ (ẽ*)⁻¹ Ξ ẽ*.
pub fn group_action(e: &SL2Element, em: &EnergyMomentum) -> Result<EnergyMomentum> {
    let (m, xi) = em.matrices()?;
    let g = e.matrix();
    let m2 = HermMatrix::new(g * m.matrix() * g.adjoint())?;
    let xi2 = e.adjoint().inverse().matrix() * xi * g.adjoint();
    EnergyMomentum::from_components(&m2, &remove_trace(&xi2))
}

fn remove_trace(x: &Mat2) -> Mat2 {
    x - Mat2::identity() * (x.trace() * 0.5)
}

/// Orbit representative m₀ I ⊕ (n₁ diag(1,−1) + i [[r₁, r₂], [r₂, −r₁]]).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalForm {
    pub m0: f64,
    pub n1: f64,
    pub r1: f64,
    pub r2: f64,
    /// Maps the input energy-momentum to the representative under [`group_action`].
    pub transform: SL2Element,
}

impl NormalForm {
    /// The representative (M, Ξ).
    pub fn components(&self) -> (HermMatrix, Mat2) {
        let i = C64::new(0.0, 1.0);
        let m =
            HermMatrix::new(Mat2::identity() * C64::new(self.m0, 0.0)).expect("real multiple of I");
        let xi = pauli(1) * C64::new(self.n1, 0.0)
            + Mat2::new(
                C64::new(self.r1, 0.0),
                C64::new(self.r2, 0.0),
                C64::new(self.r2, 0.0),
                C64::new(-self.r1, 0.0),
            ) * i;
        (m, xi)
    }

    /// Q of the representative.
    pub fn q(&self) -> QForm {
        let (m, xi) = self.components();
        q_from_components(&m, &xi).expect("representative is trace-free")
    }

    /// Largest entry deviation between the transformed input and the representative.
    pub fn residual(&self, em: &EnergyMomentum) -> Result<f64> {
        let (m, xi) = group_action(&self.transform, em)?.matrices()?;
        let (m0, xi0) = self.components();
        let dm = (m.matrix() - m0.matrix())
            .iter()
            .fold(0.0_f64, |a, z| a.max(z.norm()));
        let dx = (xi - xi0).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        Ok(dm.max(dx))
    }
}

/// Positive square root of a positive definite Hermitian 2×2 matrix.
fn hermitian_sqrt(m: &Mat2) -> Mat2 {
    // for det m = d and trace t, √m = (m + √d I)/√(t + 2√d)
    let d = (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re.sqrt();
    let t = (m[(0, 0)] + m[(1, 1)]).re;
    (m + Mat2::identity() * C64::new(d, 0.0)) / C64::new((t + 2.0 * d).sqrt(), 0.0)
}

/// Unitary with U A U* = diag(λ, −λ), λ ≥ 0, for trace-free Hermitian A;
/// identity when A vanishes to rounding.
fn su2_diagonalizer(a: &Mat2, scale: f64) -> SL2Element {
    let (d, b) = (a[(0, 0)].re, a[(0, 1)]);
    let lambda = (d * d + b.norm_sqr()).sqrt();
    if lambda <= 1e-14 * scale.max(1.0) {
        return SL2Element::identity();
    }
    // eigenvector for +λ, taking the better conditioned of two forms
    let v = if d >= 0.0 {
        nalgebra::Vector2::new(C64::new(lambda + d, 0.0), b.conj())
    } else {
        nalgebra::Vector2::new(b, C64::new(lambda - d, 0.0))
    };
    let v = v / C64::new(v.norm(), 0.0);
    let w = nalgebra::Vector2::new(-v[1].conj(), v[0].conj());
    let u_star = Mat2::from_columns(&[v, w]);
    SL2Element::new(u_star.adjoint()).expect("unit determinant by construction")
}

/// Reduces a timelike future-directed energy-momentum to its orbit representative.
/// Stage 1 scales M to m₀ I, stage 2 diagonalizes the Hermitian part N with
/// n₁ ≥ 0 and stage 3 applies a diagonal phase making R's off-diagonal r₂ ≥ 0.
pub fn normalize(em: &EnergyMomentum) -> Result<NormalForm> {
    let (m, xi) = em.matrices()?;
    let (det, trace) = (m.det(), m.trace());
    if !(det > 0.0 && trace > 0.0) {
        return Err(Error::NotTimelike { det, trace });
    }
    let m0 = det.sqrt();
    let e1 = SL2Element::normalized(adjugate(&hermitian_sqrt(&(m.matrix() / C64::new(m0, 0.0)))))?;
    let scale = xi.iter().fold(m0, |a, z| a.max(z.norm()));

    let xi1 = e1.adjoint().inverse().matrix() * xi * e1.adjoint().matrix();
    let half = C64::new(0.5, 0.0);
    let n_part = (xi1 + xi1.adjoint()) * half;
    let u = su2_diagonalizer(&n_part, scale);

    let xi2 = u.matrix() * xi1 * u.matrix().adjoint();
    let r_part = (xi2 - xi2.adjoint()) * C64::new(0.0, -0.5);
    let z = r_part[(0, 1)];
    let p = if z.norm() > 0.0 {
        let phase = (z.conj() / C64::new(z.norm(), 0.0)).sqrt();
        Mat2::new(phase, C64::new(0.0, 0.0), C64::new(0.0, 0.0), phase.conj())
    } else {
        Mat2::identity()
    };
    let transform = SL2Element::new(p)?.compose(&u).compose(&e1);

    let xi3 = p * xi2 * p.adjoint();
    let n3 = (xi3 + xi3.adjoint()) * half;
    let r3 = (xi3 - xi3.adjoint()) * C64::new(0.0, -0.5);
    let m3 = transform.matrix() * m.matrix() * transform.matrix().adjoint();
    Ok(NormalForm {
        m0: 0.5 * (m3[(0, 0)].re + m3[(1, 1)].re),
        n1: 0.5 * (n3[(0, 0)].re - n3[(1, 1)].re),
        r1: 0.5 * (r3[(0, 0)].re - r3[(1, 1)].re),
        r2: r3[(0, 1)].re,
        transform,
    })
}

/// One principal minor of Q.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Minor {
    pub indices: Vec<usize>,
    pub value: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinorsReport {
    pub verdict: Verdict,
    pub minors: Vec<Minor>,
}

/// Determinant of a small complex matrix by cofactor expansion along the first row.
fn cofactor_det(a: &[Vec<C64>]) -> C64 {
    let k = a.len();
    match k {
        0 => C64::new(1.0, 0.0),
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        _ => (0..k)
            .map(|j| {
                let sub: Vec<Vec<C64>> = a[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, z)| *z)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                a[0][j] * cofactor_det(&sub) * sign
            })
            .sum(),
    }
}

/// Determinant of the principal submatrix on `indices` (real for Hermitian input).
pub fn principal_minor(q: &Mat4, indices: &[usize]) -> f64 {
    let sub: Vec<Vec<C64>> = indices
        .iter()
        .map(|&i| indices.iter().map(|&j| q[(i, j)]).collect())
        .collect();
    cofactor_det(&sub).re
}

fn frobenius(q: &Mat4) -> f64 {
    q.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// All 15 principal minors, ordered by size then lexicographically.
pub fn minors_check(q: &QForm) -> MinorsReport {
    minors_check_eps(q, DEFAULT_EPS)
}

/// [`minors_check`] with band ε·max(1, ‖Q‖)^k for minors of order k.
pub fn minors_check_eps(q: &QForm, eps: f64) -> MinorsReport {
    let scale = frobenius(q.matrix()).max(1.0);
    let mut minors = Vec::with_capacity(15);
    for order in 1..=4 {
        for mask in 1u32..16 {
            if mask.count_ones() as usize != order {
                continue;
            }
            let indices: Vec<usize> = (0..4).filter(|i| mask & (1 << i) != 0).collect();
            let value = principal_minor(q.matrix(), &indices);
            let verdict = Verdict::classify(value, eps * scale.powi(order as i32));
            minors.push(Minor {
                indices,
                value,
                verdict,
            });
        }
    }
    minors.sort_by(|a, b| {
        a.indices
            .len()
            .cmp(&b.indices.len())
            .then_with(|| a.indices.cmp(&b.indices))
    });
    let verdict = minors
        .iter()
        .fold(Verdict::Holds, |v, m| v.combine(m.verdict));
    MinorsReport { verdict, minors }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub verdict: Verdict,
    /// Eigenvalues in increasing order.
    pub eigenvalues: [f64; 4],
    pub band: f64,
}

/// Eigenvalue-based PSD verdict with band ε·max(1, ‖Q‖).
pub fn psd_oracle(q: &QForm) -> PsdReport {
    psd_oracle_eps(q, DEFAULT_EPS)
}

pub fn psd_oracle_eps(q: &QForm, eps: f64) -> PsdReport {
    let dq = DMatrix::from_fn(4, 4, |i, j| q.matrix()[(i, j)]);
    let mut ev: Vec<f64> = dq.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    let band = eps * frobenius(q.matrix()).max(1.0);
    PsdReport {
        verdict: Verdict::classify(ev[0], band),
        eigenvalues: [ev[0], ev[1], ev[2], ev[3]],
        band,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedInequality {
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: Verdict,
}

/// m₀ ≥ √((|n₁| + |r₂|)² + r₁²), band ε·max(1, m₀).
pub fn reduced_inequality(nf: &NormalForm) -> ReducedInequality {
    reduced_inequality_eps(nf, DEFAULT_EPS)
}

pub fn reduced_inequality_eps(nf: &NormalForm, eps: f64) -> ReducedInequality {
    let lhs = nf.m0;
    let rhs = (nf.n1.abs() + nf.r2.abs()).hypot(nf.r1);
    ReducedInequality {
        lhs,
        rhs,
        verdict: Verdict::classify(lhs - rhs, eps * lhs.abs().max(1.0)),
    }
}

/// Closed-form principal minors of P = Q/2 in terms of (m₀, m, n, r), with
/// M = m₀ I + Σ m_j σ_j and Ξ = Σ (n_j + i r_j) σ_j.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentInequalities {
    pub entries: Vec<(String, f64)>,
    pub verdict: Verdict,
}

impl ComponentInequalities {
    /// Principal minor of P indexed like the entry with the given position.
    pub fn minor_indices() -> [&'static [usize]; 9] {
        [
            &[1],
            &[0],
            &[0, 1],
            &[1, 2],
            &[0, 3],
            &[0, 2],
            &[0, 1, 2],
            &[0, 1, 3],
            &[0, 1, 2, 3],
        ]
    }
}

pub fn component_inequalities(em: &EnergyMomentum, eps: f64) -> Result<ComponentInequalities> {
    let mv = &em.mass_vector;
    if mv.len() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            got: mv.len(),
        });
    }
    let m0 = mv[0];
    let m = Vector3::new(mv[1], mv[2], mv[3]);
    let n = Vector3::from(em.n_vector()?);
    let r = Vector3::from(em.r_vector()?);
    let (m1, m2, m3) = (m[0], m[1], m[2]);
    let (n1, n2, n3) = (n[0], n[1], n[2]);
    let (r1, r2, r3) = (r[0], r[1], r[2]);
    let mm = m.norm_squared();
    let (nn, rr) = (n.norm_squared(), r.norm_squared());
    let s1 = m0 * m0 - (mm + n1 * n1 + r1 * r1);
    let det3 =
        nalgebra::Matrix3::from_rows(&[m.transpose(), n.transpose(), r.transpose()]).determinant();
    let entries = vec![
        ("m0+m1", m0 + m1),
        ("m0-m1", m0 - m1),
        ("m0^2-|m|^2", m0 * m0 - mm),
        (
            "(m0+m1)^2-(n2+r3)^2-(r2-n3)^2",
            (m0 + m1).powi(2) - (n2 + r3).powi(2) - (r2 - n3).powi(2),
        ),
        (
            "(m0-m1)^2-(n2-r3)^2-(r2+n3)^2",
            (m0 - m1).powi(2) - (n2 - r3).powi(2) - (r2 + n3).powi(2),
        ),
        ("m0^2-m1^2-n1^2-r1^2", m0 * m0 - m1 * m1 - n1 * n1 - r1 * r1),
        (
            "cubic+",
            (m0 + m1) * s1
                - (m0 - m1) * ((n2 + r3).powi(2) + (n3 - r2).powi(2))
                - 2.0 * ((n2 + r3) * (m2 * n1 + m3 * r1) + (r2 - n3) * (m2 * r1 - m3 * n1)),
        ),
        (
            "cubic-",
            (m0 - m1) * s1 - (m0 + m1) * ((n2 - r3).powi(2) + (n3 + r2).powi(2))
                + 2.0 * ((n2 - r3) * (m2 * n1 - m3 * r1) + (n3 + r2) * (m2 * r1 + m3 * n1)),
        ),
        (
            "quartic",
            (m0 * m0 - (mm + nn + rr)).powi(2) - 4.0 * (mm * nn + mm * rr + nn * rr)
                + 4.0 * (m.dot(&n).powi(2) + m.dot(&r).powi(2) + n.dot(&r).powi(2))
                + 8.0 * m0 * det3,
        ),
    ];
    let orders = [1, 1, 2, 2, 2, 2, 3, 3, 4];
    let (mat, x) = em.matrices()?;
    let p = q_from_components(&mat, &x)?;
    let scale = (0.5 * frobenius(p.matrix())).max(1.0);
    let verdict = entries
        .iter()
        .zip(orders)
        .fold(Verdict::Holds, |v, (e, k)| {
            v.combine(Verdict::classify(e.1, eps * scale.powi(k)))
        });
    Ok(ComponentInequalities {
        entries: entries
            .into_iter()
            .map(|(l, v)| (l.to_string(), v))
            .collect(),
        verdict,
    })
}
