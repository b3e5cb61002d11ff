//! Energy-momentum M ⊕ Ξ and the Hermitian form Q (n = 3).

use std::sync::OnceLock;

use nalgebra::{Matrix6, Vector4, Vector6};
use serde::{Deserialize, Serialize};

use super::{charge_limits, ChargeCouple, ChargeLimit, ChargeOptions};
use crate::error::{Error, Result};
use crate::geometry::{generator_basis, SoN1Generator};
use crate::initial_data::InitialData;
use crate::spin3::{
    adjugate, lambda_iso, mu_algebra, pauli, HermMatrix, Mat2, Mat4, MinkVector, SpinorData, C64,
};

const TRACE_TOL: f64 = 1e-10;
const Q_HERMITIAN_TOL: f64 = 1e-10;

/// Charges against x_0..x_n and the so(n,1) basis; for n = 3 also
/// M = Λ(mass_vector) and the trace-free Ξ = N + iR.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyMomentum {
    pub n: usize,
    pub mass_vector: Vec<f64>,
    pub angular: Vec<f64>,
    pub m: Option<HermMatrix>,
    pub xi: Option<Mat2>,
}

impl EnergyMomentum {
    pub fn from_charges(n: usize, mass_vector: Vec<f64>, angular: Vec<f64>) -> Result<Self> {
        if mass_vector.len() != n + 1 {
            return Err(Error::Dimension {
                expected: n + 1,
                got: mass_vector.len(),
            });
        }
        if angular.len() != n * (n + 1) / 2 {
            return Err(Error::Dimension {
                expected: n * (n + 1) / 2,
                got: angular.len(),
            });
        }
        let (m, xi) = if n == 3 {
            let mv = MinkVector([
                mass_vector[0],
                mass_vector[1],
                mass_vector[2],
                mass_vector[3],
            ]);
            let a: [f64; 6] = angular.as_slice().try_into().expect("length checked");
            (Some(lambda_iso(&mv)), Some(angular_to_xi(&a)))
        } else {
            (None, None)
        };
        Ok(EnergyMomentum {
            n,
            mass_vector,
            angular,
            m,
            xi,
        })
    }

    /// Builds the n = 3 energy-momentum from its matrix form.
    pub fn from_components(m: &HermMatrix, xi: &Mat2) -> Result<Self> {
        let tr = xi.trace().norm();
        let scale = xi.iter().fold(1.0_f64, |a, z| a.max(z.norm()));
        if tr > TRACE_TOL * scale {
            return Err(Error::NotTraceFree { residual: tr });
        }
        let y = crate::spin3::lambda_inv(m.matrix())?;
        Ok(EnergyMomentum {
            n: 3,
            mass_vector: y.0.to_vec(),
            angular: xi_to_angular(xi).to_vec(),
            m: Some(*m),
            xi: Some(*xi),
        })
    }

    /// From (m_0..m_3) and the components of N = Σ n_j σ_j, R = Σ r_j σ_j.
    pub fn from_vectors(m: [f64; 4], n: [f64; 3], r: [f64; 3]) -> Result<Self> {
        let mut xi = Mat2::zeros();
        for j in 0..3 {
            xi += pauli(j + 1) * C64::new(n[j], r[j]);
        }
        Self::from_components(&lambda_iso(&MinkVector(m)), &xi)
    }

    fn require3(&self) -> Result<(&HermMatrix, &Mat2)> {
        match (&self.m, &self.xi) {
            (Some(m), Some(xi)) => Ok((m, xi)),
            _ => Err(Error::Dimension {
                expected: 3,
                got: self.n,
            }),
        }
    }

    /// M and Ξ (n = 3 only).
    pub fn matrices(&self) -> Result<(HermMatrix, Mat2)> {
        self.require3().map(|(m, x)| (*m, *x))
    }

    /// Components n_j of N = (Ξ + Ξ*)/2 = Σ n_j σ_j.
    pub fn n_vector(&self) -> Result<[f64; 3]> {
        let (_, xi) = self.require3()?;
        let herm = (xi + xi.adjoint()) * C64::new(0.5, 0.0);
        Ok(pauli_components(&herm))
    }

    /// Components r_j of R = (Ξ − Ξ*)/2i = Σ r_j σ_j.
    pub fn r_vector(&self) -> Result<[f64; 3]> {
        let (_, xi) = self.require3()?;
        let herm = (xi - xi.adjoint()) * C64::new(0.0, -0.5);
        Ok(pauli_components(&herm))
    }
}

fn pauli_components(h: &Mat2) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (j, o) in out.iter_mut().enumerate() {
        *o = 0.5 * (pauli(j + 1) * h).trace().re;
    }
    out
}

/// Real basis ξ_b of sl(2,C): σ_1, σ_2, σ_3, iσ_1, iσ_2, iσ_3.
fn xi_basis() -> [Mat2; 6] {
    let i = C64::new(0.0, 1.0);
    [
        pauli(1),
        pauli(2),
        pauli(3),
        pauli(1) * i,
        pauli(2) * i,
        pauli(3) * i,
    ]
}

/// T_ba: coordinates of the generator dμ(4 ξ_b*) in the so(3,1) basis, so that
/// the Killing form 4 Re tr(Ŵ Ẇ ξ_b) is Σ_a T_ba (dual form of A_a).
fn pairing_transfer() -> &'static Matrix6<f64> {
    static T: OnceLock<Matrix6<f64>> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = Matrix6::zeros();
        for (b, xi) in xi_basis().iter().enumerate() {
            let g = mu_algebra(&(xi.adjoint() * C64::new(4.0, 0.0)));
            let gen = SoN1Generator::new(nalgebra::DMatrix::from_fn(4, 4, |i, j| g[(i, j)]))
                .expect("the derivative of the covering lands in so(3,1)");
            for (a, c) in gen.coefficients().into_iter().enumerate() {
                t[(b, a)] = c;
            }
        }
        t
    })
}

/// Ξ with 4 Re tr(ξ_b Ξ) equal to the charge of the Killing form with pairing ξ_b.
pub fn angular_to_xi(angular: &[f64; 6]) -> Mat2 {
    let h = pairing_transfer() * Vector6::from_column_slice(angular);
    let n: Vec<f64> = (0..3).map(|j| h[j] / 8.0).collect();
    let r: Vec<f64> = (0..3).map(|j| -h[j + 3] / 8.0).collect();
    let mut xi = Mat2::zeros();
    for j in 0..3 {
        xi += pauli(j + 1) * C64::new(n[j], r[j]);
    }
    xi
}

/// Inverse of [`angular_to_xi`].
pub fn xi_to_angular(xi: &Mat2) -> [f64; 6] {
    let h = Vector6::from_iterator(xi_basis().iter().map(|b| 4.0 * (b * xi).trace().re));
    let t_inv = pairing_transfer()
        .try_inverse()
        .expect("pairing transfer is invertible");
    let a = t_inv * h;
    [a[0], a[1], a[2], a[3], a[4], a[5]]
}

/// Couples (x_k, 0) followed by (0, A_a) in basis order.
fn component_couples(n: usize) -> Result<Vec<ChargeCouple>> {
    let mut couples = (0..=n)
        .map(|k| ChargeCouple::mass_function(k, n))
        .collect::<Result<Vec<_>>>()?;
    let labels = generator_labels(n);
    for (g, label) in generator_basis(n).into_iter().zip(labels) {
        couples.push(ChargeCouple::generator(label, g));
    }
    Ok(couples)
}

fn generator_labels(n: usize) -> Vec<String> {
    let mut out: Vec<String> = (1..=n).map(|i| format!("A0{i}")).collect();
    for i in 1..=n {
        for j in i + 1..=n {
            out.push(format!("A{i}{j}"));
        }
    }
    out
}

/// Energy-momentum with the per-charge limit diagnostics; convergence is
/// reported in the diagnostics, not enforced.
pub fn energy_momentum_with_diagnostics(
    data: &InitialData,
    opts: &ChargeOptions,
) -> Result<(EnergyMomentum, Vec<ChargeLimit>)> {
    let n = data.dim();
    let couples = component_couples(n)?;
    let limits = charge_limits(data, &couples, opts)?;
    let mass_vector = limits[..=n].iter().map(|l| l.value).collect();
    let angular = limits[n + 1..].iter().map(|l| l.value).collect();
    Ok((
        EnergyMomentum::from_charges(n, mass_vector, angular)?,
        limits,
    ))
}

/// Energy-momentum; fails if any charge did not converge.
pub fn energy_momentum(data: &InitialData, opts: &ChargeOptions) -> Result<EnergyMomentum> {
    let (em, limits) = energy_momentum_with_diagnostics(data, opts)?;
    limits.iter().try_for_each(ChargeLimit::require_converged)?;
    Ok(em)
}

/// A 4×4 Hermitian matrix on C² ⊕ C².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QForm(Mat4);

impl QForm {
    pub fn new(q: Mat4) -> Result<Self> {
        let scale = q.iter().fold(1.0_f64, |a, z| a.max(z.norm()));
        let residual = (q - q.adjoint())
            .iter()
            .fold(0.0_f64, |a, z| a.max(z.norm()));
        if residual > Q_HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { residual });
        }
        Ok(QForm((q + q.adjoint()) * C64::new(0.5, 0.0)))
    }

    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    /// x* Q x.
    pub fn eval(&self, x: &Vector4<C64>) -> f64 {
        (x.adjoint() * self.0 * x)[(0, 0)].re
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |a, z| a.max(z.norm()))
    }
}

/// Q = 2 [[M̂, Ξ], [Ξ*, M]].
pub fn q_from_components(m: &HermMatrix, xi: &Mat2) -> Result<QForm> {
    let tr = xi.trace().norm();
    if tr > TRACE_TOL * xi.iter().fold(1.0_f64, |a, z| a.max(z.norm())) {
        return Err(Error::NotTraceFree { residual: tr });
    }
    let blocks = [[adjugate(m.matrix()), *xi], [xi.adjoint(), *m.matrix()]];
    let two = C64::new(2.0, 0.0);
    QForm::new(Mat4::from_fn(|i, j| {
        blocks[i / 2][j / 2][(i % 2, j % 2)] * two
    }))
}

/// Q from spinor charges with the limits that produced it.
#[derive(Clone, Debug)]
pub struct QAssembly {
    pub q: QForm,
    pub limits: Vec<ChargeLimit>,
}

/// Assembles Q by polarization of q(x) = H(V_x, α_x) over the basis of C⁴:
/// Q_ii = q(e_i), Re Q_ij = (q(e_i + e_j) − q_i − q_j)/2 and
/// Im Q_ij = −(q(e_i + i e_j) − q_i − q_j)/2.
/// Fails if any of the 16 charges did not converge.
pub fn q_assemble_from_charges(data: &InitialData, opts: &ChargeOptions) -> Result<QForm> {
    let assembly = q_assemble_with_diagnostics(data, opts)?;
    assembly
        .limits
        .iter()
        .try_for_each(ChargeLimit::require_converged)?;
    Ok(assembly.q)
}

/// Like [`q_assemble_from_charges`] but reports convergence instead of enforcing it.
pub fn q_assemble_with_diagnostics(data: &InitialData, opts: &ChargeOptions) -> Result<QAssembly> {
    if data.dim() != 3 {
        return Err(Error::Dimension {
            expected: 3,
            got: data.dim(),
        });
    }
    let e = SpinorData::basis;
    let i = C64::new(0.0, 1.0);
    let mut couples: Vec<ChargeCouple> = (0..4)
        .map(|a| ChargeCouple::spinor(format!("q(e{a})"), e(a)))
        .collect();
    let mut pairs = Vec::new();
    for a in 0..4 {
        for b in a + 1..4 {
            pairs.push((a, b));
            couples.push(ChargeCouple::spinor(
                format!("q(e{a}+e{b})"),
                e(a).add(&e(b)),
            ));
            couples.push(ChargeCouple::spinor(
                format!("q(e{a}+ie{b})"),
                e(a).add(&e(b).scaled(i)),
            ));
        }
    }
    let limits = charge_limits(data, &couples, opts)?;
    let q: Vec<f64> = limits.iter().map(|l| l.value).collect();
    let mut m = Mat4::zeros();
    for a in 0..4 {
        m[(a, a)] = C64::new(q[a], 0.0);
    }
    for (p, &(a, b)) in pairs.iter().enumerate() {
        let (re_q, im_q) = (q[4 + 2 * p], q[5 + 2 * p]);
        let re = 0.5 * (re_q - q[a] - q[b]);
        let im = -0.5 * (im_q - q[a] - q[b]);
        m[(a, b)] = C64::new(re, im);
        m[(b, a)] = C64::new(re, -im);
    }
    Ok(QAssembly {
        q: QForm::new(m)?,
        limits,
    })
}

/// Serializable view of the form for reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QEntries {
    pub re: [[f64; 4]; 4],
    pub im: [[f64; 4]; 4],
}

impl From<&QForm> for QEntries {
    fn from(q: &QForm) -> Self {
        let mut out = QEntries {
            re: [[0.0; 4]; 4],
            im: [[0.0; 4]; 4],
        };
        for i in 0..4 {
            for j in 0..4 {
                out.re[i][j] = q.0[(i, j)].re;
                out.im[i][j] = q.0[(i, j)].im;
            }
        }
        out
    }
}
