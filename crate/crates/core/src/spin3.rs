//! Spin algebra of R^{3,1} realized on 2×2 complex matrices.
//!
//! Minkowski space is identified with Hermitian matrices through
//! Λ(y) = [[y0+y1, y2+iy3], [y2−iy3, y0−y1]], so that −det Λ(y) = q(y), and
//! SL(2,C) acts by X ↦ g X g*.

use nalgebra::{Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type Mat2 = Matrix2<C64>;
pub type Mat4 = Matrix4<C64>;

/// Tolerance for exact-algebra invariants (Hermiticity, unit determinant).
pub const ALGEBRA_TOL: f64 = 1e-12;

const I: C64 = C64::new(0.0, 1.0);

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn scale(m: &Mat2) -> f64 {
    m.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()))
}

/// A vector of R^{3,1} with signature (−,+,+,+).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinkVector(pub [f64; 4]);

impl MinkVector {
    /// q(y) = −y0² + y1² + y2² + y3².
    pub fn q(&self) -> f64 {
        let y = self.0;
        -y[0] * y[0] + y[1] * y[1] + y[2] * y[2] + y[3] * y[3]
    }

    pub fn dot(&self, other: &MinkVector) -> f64 {
        let (a, b) = (self.0, other.0);
        -a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
    }
}

/// A 2×2 Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermMatrix(Mat2);

impl HermMatrix {
    pub fn new(m: Mat2) -> Result<Self> {
        let residual = (m - m.adjoint())
            .iter()
            .fold(0.0_f64, |a, z| a.max(z.norm()));
        if residual > ALGEBRA_TOL * scale(&m) {
            return Err(Error::NotHermitian { residual });
        }
        // drop the anti-Hermitian roundoff
        Ok(HermMatrix((m + m.adjoint()) * c(0.5)))
    }

    pub fn identity() -> Self {
        HermMatrix(Mat2::identity())
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn det(&self) -> f64 {
        (self.0[(0, 0)] * self.0[(1, 1)] - self.0[(0, 1)] * self.0[(1, 0)]).re
    }

    pub fn trace(&self) -> f64 {
        (self.0[(0, 0)] + self.0[(1, 1)]).re
    }
}

/// An element of SL(2,C).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SL2Element(Mat2);

impl SL2Element {
    pub fn new(m: Mat2) -> Result<Self> {
        let residual = (m.determinant() - c(1.0)).norm();
        if residual > ALGEBRA_TOL * scale(&m).powi(2) {
            return Err(Error::Determinant { residual });
        }
        Ok(SL2Element(m))
    }

    /// Rescales an invertible matrix to unit determinant.
    pub fn normalized(m: Mat2) -> Result<Self> {
        let d = m.determinant();
        if d.norm() == 0.0 || !d.is_finite() {
            return Err(Error::Determinant { residual: 1.0 });
        }
        Ok(SL2Element(m / d.sqrt()))
    }

    pub fn identity() -> Self {
        SL2Element(Mat2::identity())
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    /// Inverse through the adjugate (det = 1).
    pub fn inverse(&self) -> Self {
        SL2Element(adjugate(&self.0))
    }

    pub fn adjoint(&self) -> Self {
        SL2Element(self.0.adjoint())
    }

    pub fn compose(&self, other: &Self) -> Self {
        SL2Element(self.0 * other.0)
    }
}

/// A spinor ξ = ξ1 ⊕ ξ2 ∈ C² ⊕ C².
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spinor4(pub Vector4<C64>);

impl Spinor4 {
    pub fn from_halves(a: &Vector2<C64>, b: &Vector2<C64>) -> Self {
        Spinor4(Vector4::new(a[0], a[1], b[0], b[1]))
    }

    pub fn first(&self) -> Vector2<C64> {
        Vector2::new(self.0[0], self.0[1])
    }

    pub fn second(&self) -> Vector2<C64> {
        Vector2::new(self.0[2], self.0[3])
    }
}

/// ⟨a, b⟩ = Σ a_i conj(b_i) on C^k.
fn herm2(a: &Vector2<C64>, b: &Vector2<C64>) -> C64 {
    a[0] * b[0].conj() + a[1] * b[1].conj()
}

/// (ξ, η) = ⟨ξ1, η2⟩ + ⟨ξ2, η1⟩.
pub fn split_pairing(xi: &Spinor4, eta: &Spinor4) -> C64 {
    herm2(&xi.first(), &eta.second()) + herm2(&xi.second(), &eta.first())
}

/// ⟨ξ, η⟩ = (½ f0 · ξ, η) with f0 = Λ(1,0,0,0) acting through Θ.
pub fn spinor_product(xi: &Spinor4, eta: &Spinor4) -> C64 {
    let f0 = clifford_theta(&HermMatrix::identity()) * c(0.5);
    split_pairing(&Spinor4(f0 * xi.0), eta)
}

/// Parameters w ⊕ u of an imaginary Killing spinor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinorData {
    pub w: Vector2<C64>,
    pub u: Vector2<C64>,
}

/// Image of w ⊕ u under the Killing map: coefficients of V in the basis
/// x_0..x_3 and the trace-free pairing matrix of α.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KImage {
    pub coefficients: [f64; 4],
    pub pairing: Mat2,
}

impl SpinorData {
    pub fn new(w: [C64; 2], u: [C64; 2]) -> Self {
        SpinorData {
            w: Vector2::new(w[0], w[1]),
            u: Vector2::new(u[0], u[1]),
        }
    }

    /// Standard basis vector e_i of C⁴ = C²(w) ⊕ C²(u).
    pub fn basis(i: usize) -> Self {
        Self::from_c4(&Vector4::from_fn(
            |k, _| if k == i { c(1.0) } else { c(0.0) },
        ))
    }

    pub fn from_c4(v: &Vector4<C64>) -> Self {
        SpinorData {
            w: Vector2::new(v[0], v[1]),
            u: Vector2::new(v[2], v[3]),
        }
    }

    pub fn to_c4(&self) -> Vector4<C64> {
        Vector4::new(self.w[0], self.w[1], self.u[0], self.u[1])
    }

    /// U = (u1, −conj w2).
    pub fn big_u(&self) -> Vector2<C64> {
        Vector2::new(self.u[0], -self.w[1].conj())
    }

    /// V = (u2, conj w1).
    pub fn big_v(&self) -> Vector2<C64> {
        Vector2::new(self.u[1], self.w[0].conj())
    }

    /// χ = conj(u1) w1 + conj(u2) w2.
    pub fn chi(&self) -> C64 {
        self.u[0].conj() * self.w[0] + self.u[1].conj() * self.w[1]
    }

    /// Inner product of U and V, conjugate-linear in U.
    pub fn uv_product(&self) -> C64 {
        let (a, b) = (self.big_u(), self.big_v());
        a[0].conj() * b[0] + a[1].conj() * b[1]
    }

    /// det(U, V) with U, V as columns.
    pub fn uv_det(&self) -> C64 {
        let (a, b) = (self.big_u(), self.big_v());
        a[0] * b[1] - a[1] * b[0]
    }

    /// ẽ ∗ (w ⊕ u) = ẽ w ⊕ (ẽ*)⁻¹ u.
    pub fn act(&self, e: &SL2Element) -> Self {
        SpinorData {
            w: e.matrix() * self.w,
            u: e.adjoint().inverse().matrix() * self.u,
        }
    }

    pub fn scaled(&self, a: C64) -> Self {
        SpinorData {
            w: self.w * a,
            u: self.u * a,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        SpinorData {
            w: self.w + other.w,
            u: self.u + other.u,
        }
    }
}

/// Λ(y).
pub fn lambda_iso(y: &MinkVector) -> HermMatrix {
    let [y0, y1, y2, y3] = y.0;
    HermMatrix(Mat2::new(
        c(y0 + y1),
        C64::new(y2, y3),
        C64::new(y2, -y3),
        c(y0 - y1),
    ))
}

/// Λ⁻¹(A) for Hermitian A.
pub fn lambda_inv(a: &Mat2) -> Result<MinkVector> {
    let h = HermMatrix::new(*a)?;
    Ok(lambda_inv_unchecked(h.matrix()))
}

fn lambda_inv_unchecked(a: &Mat2) -> MinkVector {
    MinkVector([
        0.5 * (a[(0, 0)] + a[(1, 1)]).re,
        0.5 * (a[(0, 0)] - a[(1, 1)]).re,
        a[(0, 1)].re,
        a[(0, 1)].im,
    ])
}

/// Transposed comatrix: [[a, b], [c, d]] ↦ [[d, −b], [−c, a]].
pub fn adjugate(a: &Mat2) -> Mat2 {
    Mat2::new(a[(1, 1)], -a[(0, 1)], -a[(1, 0)], a[(0, 0)])
}

/// Θ(X) = [[0, 2X], [2X̂, 0]].
pub fn clifford_theta(x: &HermMatrix) -> Mat4 {
    theta_of(x.matrix())
}

pub(crate) fn theta_of(x: &Mat2) -> Mat4 {
    let adj = adjugate(x);
    let mut t = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            t[(i, j + 2)] = x[(i, j)] * 2.0;
            t[(i + 2, j)] = adj[(i, j)] * 2.0;
        }
    }
    t
}

/// Matrix of y ↦ Λ⁻¹(g Λ(y) g*).
pub fn mu_cover(g: &SL2Element) -> Matrix4<f64> {
    let m = g.matrix();
    basis_image(|x| m * x * m.adjoint())
}

/// Derivative of the covering at the identity: y ↦ Λ⁻¹(X Λ(y) + Λ(y) X*).
pub fn mu_algebra(x: &Mat2) -> Matrix4<f64> {
    basis_image(|w| x * w + w * x.adjoint())
}

fn basis_image(f: impl Fn(&Mat2) -> Mat2) -> Matrix4<f64> {
    let mut out = Matrix4::zeros();
    for k in 0..4 {
        let mut e = [0.0; 4];
        e[k] = 1.0;
        let image = lambda_inv_unchecked(&f(lambda_iso(&MinkVector(e)).matrix()));
        for (row, v) in image.0.iter().enumerate() {
            out[(row, k)] = *v;
        }
    }
    out
}

/// The Hermitian triple σ_j = Λ(e_j), j = 1, 2, 3.
pub fn pauli(j: usize) -> Mat2 {
    assert!((1..=3).contains(&j), "Pauli index must be 1, 2 or 3");
    let mut e = [0.0; 4];
    e[j] = 1.0;
    *lambda_iso(&MinkVector(e)).matrix()
}

/// The positive square root W^{1/2}, a smooth section of SL(2,C) → hyperboloid.
pub fn section(w: &HermMatrix) -> Result<SL2Element> {
    check_on_hyperboloid(w)?;
    let t = w.trace();
    let root = (w.matrix() + Mat2::identity()) / c((t + 2.0).sqrt());
    SL2Element::new(root)
}

fn check_on_hyperboloid(w: &HermMatrix) -> Result<()> {
    let s = scale(w.matrix());
    let d = w.det();
    if (d - 1.0).abs() > ALGEBRA_TOL * s * s {
        return Err(Error::NotOnHyperboloid(format!("det W = {d}")));
    }
    if w.trace() <= 0.0 {
        return Err(Error::NotOnHyperboloid("W is not positive".into()));
    }
    Ok(())
}

/// Fiber value at the frame g̃ of the imaginary Killing spinor with data w ⊕ u:
/// (g̃⁻¹w, −i g̃⁻¹w) + (g̃* u, i g̃* u).
pub fn iks_eval(d: &SpinorData, g: &SL2Element) -> Spinor4 {
    let a = g.inverse().matrix() * d.w;
    let b = g.matrix().adjoint() * d.u;
    Spinor4::from_halves(&(a + b), &((b - a) * I))
}

/// V = 2(w* Ŵ w + u* W u).
pub fn v_field(d: &SpinorData, w: &HermMatrix) -> Result<f64> {
    check_on_hyperboloid(w)?;
    let m = w.matrix();
    let a = (d.w.adjoint() * adjugate(m) * d.w)[(0, 0)];
    let b = (d.u.adjoint() * m * d.u)[(0, 0)];
    Ok(2.0 * (a + b).re)
}

/// V evaluated in the frame, as the squared length ⟨σ, σ⟩ of the fiber value.
pub fn v_frame(d: &SpinorData, g: &SL2Element) -> f64 {
    let s = iks_eval(d, g);
    spinor_product(&s, &s).re
}

fn check_trace_free_hermitian(z: &Mat2) -> Result<HermMatrix> {
    let h = HermMatrix::new(*z)?;
    let tr = h.trace();
    if tr.abs() > ALGEBRA_TOL * scale(z) {
        return Err(Error::NotTraceFree { residual: tr.abs() });
    }
    Ok(h)
}

/// α(ζ) = ⟨Θ(½ζ) Θ(½I) σ, σ⟩ at the frame g̃, for a frame component ζ ∈ su(2)^⊥.
pub fn alpha_frame(d: &SpinorData, g: &SL2Element, zeta: &Mat2) -> Result<f64> {
    let z = check_trace_free_hermitian(zeta)?;
    let s = iks_eval(d, g);
    let x = theta_of(&(z.matrix() * c(0.5)));
    let e0 = theta_of(&(Mat2::identity() * c(0.5)));
    Ok(spinor_product(&Spinor4(x * e0 * s.0), &s).re)
}

/// α evaluated on an ambient tangent vector Ẇ at W = g̃ g̃*.
pub fn alpha_field(d: &SpinorData, g: &SL2Element, tangent: &Mat2) -> Result<f64> {
    let h = HermMatrix::new(*tangent)?;
    let gi = g.inverse();
    let zeta = gi.matrix() * h.matrix() * gi.matrix().adjoint();
    let zeta = (zeta + zeta.adjoint()) * c(0.5);
    // the trace is d log det W, zero for a tangent; drop its rounding residue
    let tr = zeta.trace();
    if tr.norm() > 1e-8 * scale(&zeta) {
        return Err(Error::NotTraceFree {
            residual: tr.norm(),
        });
    }
    alpha_frame(d, g, &(zeta - Mat2::identity() * (tr * 0.5)))
}

/// Closed form 4 Re tr(Ŵ Ẇ A) of the α field with pairing matrix A.
pub fn alpha_closed_form(pairing: &Mat2, w: &HermMatrix, tangent: &Mat2) -> f64 {
    4.0 * (adjugate(w.matrix()) * tangent * pairing).trace().re
}

/// Killing-map image of w ⊕ u.
pub fn k_map(d: &SpinorData) -> KImage {
    let (uu, vv) = (d.big_u().norm_squared(), d.big_v().norm_squared());
    let p = d.uv_product();
    let uw = d.u * d.w.adjoint();
    let tr = uw.trace() * 0.5;
    KImage {
        coefficients: [uu + vv, uu - vv, 2.0 * p.re, -2.0 * p.im],
        pairing: uw - Mat2::identity() * tr,
    }
}

impl KImage {
    /// V at the point y of the hyperboloid.
    pub fn v_at(&self, y: &MinkVector) -> f64 {
        2.0 * self
            .coefficients
            .iter()
            .zip(y.0.iter())
            .map(|(a, b)| a * b)
            .sum::<f64>()
    }

    /// Squared norm of the image: q(c)/4 − 4 Re det A.
    pub fn norm_squared(&self) -> f64 {
        MinkVector(self.coefficients).q() / 4.0 - 4.0 * self.pairing.determinant().re
    }
}

/// |𝒦|² = |⟨U,V⟩|² − |U|²|V|² + Re(χ²).
pub fn k_norm_squared(d: &SpinorData) -> f64 {
    let (uu, vv) = (d.big_u().norm_squared(), d.big_v().norm_squared());
    d.uv_product().norm_sqr() - uu * vv + (d.chi() * d.chi()).re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn herm(a: f64, b: C64, d: f64) -> Mat2 {
        Mat2::new(c(a), b, b.conj(), c(d))
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(
            *lambda_iso(&MinkVector([1.0, 0.0, 0.0, 0.0])).matrix(),
            Mat2::identity()
        );
        let s = lambda_iso(&MinkVector([0.0, 0.0, 1.0, 0.0]));
        assert_eq!(*s.matrix(), Mat2::new(c(0.0), c(1.0), c(1.0), c(0.0)));
        assert_eq!(-s.det(), 1.0);
        let bad = Mat2::new(c(1.0), c(2.0), c(0.0), c(1.0));
        assert!(matches!(lambda_inv(&bad), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn adjugate_examples() {
        assert_eq!(adjugate(&Mat2::identity()), Mat2::identity());
        let a = Mat2::new(C64::new(1.0, 2.0), c(3.0), C64::new(0.0, -1.0), c(4.0));
        assert_eq!(
            adjugate(&a),
            Mat2::new(c(4.0), c(-3.0), C64::new(0.0, 1.0), C64::new(1.0, 2.0))
        );
        let y = MinkVector([0.3, 1.2, -0.7, 2.0]);
        let flipped = MinkVector([0.3, -1.2, 0.7, -2.0]);
        assert_eq!(
            adjugate(lambda_iso(&y).matrix()),
            *lambda_iso(&flipped).matrix()
        );
    }

    #[test]
    fn theta_examples() {
        let t = clifford_theta(&HermMatrix::identity());
        assert_eq!(t * t, Mat4::identity() * c(4.0));
        let x = lambda_iso(&MinkVector([0.0, 0.0, 1.0, 0.0]));
        let tx = clifford_theta(&x);
        assert_eq!(tx * tx, Mat4::identity() * c(-4.0));
    }

    #[test]
    fn mu_examples() {
        assert_eq!(mu_cover(&SL2Element::identity()), Matrix4::identity());
        let t = 0.8_f64;
        let g = SL2Element::new(Mat2::new(
            c((t / 2.0).exp()),
            c(0.0),
            c(0.0),
            c((-t / 2.0).exp()),
        ))
        .unwrap();
        let m = mu_cover(&g);
        assert!((m[(0, 0)] - t.cosh()).abs() < 1e-14);
        assert!((m[(0, 1)] - t.sinh()).abs() < 1e-14);
        assert!((m[(1, 0)] - t.sinh()).abs() < 1e-14);
        assert!((m[(2, 2)] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn iks_examples() {
        let id = SL2Element::identity();
        let s = iks_eval(&SpinorData::new([c(1.0), c(0.0)], [c(0.0); 2]), &id);
        assert_eq!(s.0, Vector4::new(c(1.0), c(0.0), -I, c(0.0)));
        let s = iks_eval(&SpinorData::new([c(0.0); 2], [c(0.0), c(1.0)]), &id);
        assert_eq!(s.0, Vector4::new(c(0.0), c(1.0), c(0.0), I));
    }

    #[test]
    fn v_examples() {
        let id = HermMatrix::identity();
        assert_eq!(
            v_field(&SpinorData::new([c(1.0), c(0.0)], [c(0.0); 2]), &id).unwrap(),
            2.0
        );
        assert_eq!(
            v_field(&SpinorData::new([c(0.0); 2], [c(1.0), c(0.0)]), &id).unwrap(),
            2.0
        );
        let k = k_map(&SpinorData::new([c(1.0), c(0.0)], [c(0.0); 2]));
        assert_eq!(k.coefficients, [1.0, -1.0, 0.0, 0.0]);
        let z = k_map(&SpinorData::new([c(0.0); 2], [c(0.0); 2]));
        assert_eq!(z.coefficients, [0.0; 4]);
        assert_eq!(z.pairing, Mat2::zeros());
        let off = HermMatrix::new(herm(2.0, c(0.0), 2.0)).unwrap();
        assert!(v_field(&SpinorData::basis(0), &off).is_err());
    }

    #[test]
    fn alpha_example_at_identity() {
        let d = SpinorData::new([c(1.0), c(0.0)], [c(0.0), c(1.0)]);
        let zeta = herm(0.0, c(1.0), 0.0);
        let a = alpha_frame(&d, &SL2Element::identity(), &zeta).unwrap();
        let expected = 4.0 * (d.w.adjoint() * zeta * d.u)[(0, 0)].re;
        assert!((a - expected).abs() < 1e-15);
        assert_eq!(expected, 4.0);
        let w_only = SpinorData::new([c(0.3), C64::new(0.1, 0.2)], [c(0.0); 2]);
        assert_eq!(
            alpha_frame(&w_only, &SL2Element::identity(), &zeta).unwrap(),
            0.0
        );
        assert!(alpha_frame(&d, &SL2Element::identity(), &Mat2::identity()).is_err());
    }

    #[test]
    fn section_is_square_root() {
        let y = MinkVector([
            2.0_f64.cosh(),
            2.0_f64.sinh() * 0.6,
            0.0,
            2.0_f64.sinh() * 0.8,
        ]);
        let w = lambda_iso(&y);
        let g = section(&w).unwrap();
        let back = g.matrix() * g.matrix().adjoint();
        assert!((back - w.matrix()).iter().all(|z| z.norm() < 1e-12));
        assert!((g.matrix() - g.matrix().adjoint())
            .iter()
            .all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn products_agree_with_standard() {
        let a = Spinor4(Vector4::new(
            C64::new(1.0, 2.0),
            c(-0.5),
            C64::new(0.0, 3.0),
            c(1.0),
        ));
        let b = Spinor4(Vector4::new(
            c(0.3),
            C64::new(0.7, -1.0),
            c(2.0),
            C64::new(-1.0, 0.5),
        ));
        let std =
            a.0.iter()
                .zip(b.0.iter())
                .map(|(x, y)| x * y.conj())
                .sum::<C64>();
        assert!((spinor_product(&a, &b) - std).norm() < 1e-15);
    }
}
