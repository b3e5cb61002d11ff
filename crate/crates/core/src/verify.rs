//! Seeded invariant suites: algebra identities, causality, equivariance,
//! oracle equivalences and background geometry.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charges::{
    killing_residual, q_from_components, EnergyMomentum, PairingKillingForm, QForm,
    SpinorKillingForm,
};
use crate::error::{Error, Result};
use crate::geometry::{frame_at, generator_basis, mass_function_eval, ChartPoint};
use crate::positivity::{
    component_inequalities, congruence_matrix, group_action, minors_check_eps, normalize,
    principal_minor, psd_oracle_eps, reduced_inequality_eps, ComponentInequalities, NormalForm,
    Verdict,
};
use crate::spin3::{
    adjugate, alpha_closed_form, alpha_field, clifford_theta, k_map, k_norm_squared, lambda_inv,
    lambda_iso, mu_cover, section, v_frame, HermMatrix, Mat2, Mat4, MinkVector, SL2Element,
    SpinorData, C64,
};

/// Names of the suites in run order.
pub const SUITES: [&str; 12] = [
    "lambda",
    "adjugate",
    "clifford",
    "covering",
    "causality",
    "equivariance",
    "section",
    "geometry",
    "minors",
    "reduced",
    "normal_form",
    "components",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Samples for identity suites.
    pub samples: usize,
    /// Samples for the oracle sweeps (minors, reduced).
    pub sweep_samples: usize,
    /// Relative perturbation injected into Θ, to exercise failure reporting.
    pub corrupt_theta: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            samples: 1000,
            sweep_samples: 10_000,
            corrupt_theta: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub samples: usize,
    pub failures: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Suite-specific counters and extremes.
    pub details: BTreeMap<String, f64>,
}

struct Tally {
    samples: usize,
    failures: usize,
    max_residual: f64,
    tolerance: f64,
    details: BTreeMap<String, f64>,
}

impl Tally {
    fn new(tolerance: f64) -> Self {
        Tally {
            samples: 0,
            failures: 0,
            max_residual: 0.0,
            tolerance,
            details: BTreeMap::new(),
        }
    }

    fn residual(&mut self, r: f64) {
        self.max_residual = self.max_residual.max(r);
        if !(r <= self.tolerance) {
            self.failures += 1;
        }
    }

    fn check(&mut self, ok: bool) {
        if !ok {
            self.failures += 1;
        }
    }

    fn count(&mut self, key: &str) {
        *self.details.entry(key.to_string()).or_insert(0.0) += 1.0;
    }

    fn extreme(&mut self, key: &str, v: f64) {
        let e = self.details.entry(key.to_string()).or_insert(v);
        *e = e.max(v);
    }

    fn finish(self, name: &str) -> SuiteReport {
        SuiteReport {
            name: name.to_string(),
            samples: self.samples,
            failures: self.failures,
            max_residual: self.max_residual,
            tolerance: self.tolerance,
            passed: self.failures == 0 && self.samples > 0,
            details: self.details,
        }
    }
}

/// Deterministic generator for suite `index` under `seed`.
pub fn suite_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn cplx<R: Rng>(rng: &mut R, s: f64) -> C64 {
    C64::new(rng.random_range(-s..s), rng.random_range(-s..s))
}

pub fn random_mink<R: Rng>(rng: &mut R, s: f64) -> MinkVector {
    MinkVector(std::array::from_fn(|_| rng.random_range(-s..s)))
}

pub fn random_hermitian2<R: Rng>(rng: &mut R, s: f64) -> HermMatrix {
    lambda_iso(&random_mink(rng, s))
}

/// Random SL(2,C) element with entries of order one.
pub fn random_sl2<R: Rng>(rng: &mut R) -> SL2Element {
    loop {
        let m = Mat2::from_fn(|_, _| cplx(rng, 1.0));
        if m.determinant().norm() > 0.2 {
            return SL2Element::normalized(m).expect("determinant bounded away from zero");
        }
    }
}

/// Random SU(2) element from a unit quaternion.
pub fn random_su2<R: Rng>(rng: &mut R) -> SL2Element {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            let (a, b) = (C64::new(q[0], q[1]) / n, C64::new(q[2], q[3]) / n);
            return SL2Element::new(Mat2::new(a, -b.conj(), b, a.conj())).expect("unit quaternion");
        }
    }
}

pub fn random_spinor<R: Rng>(rng: &mut R) -> SpinorData {
    SpinorData::new(
        [cplx(rng, 1.0), cplx(rng, 1.0)],
        [cplx(rng, 1.0), cplx(rng, 1.0)],
    )
}

/// Random 4×4 unitary from the QR factorization of a complex Gaussian-like matrix.
pub fn random_unitary4<R: Rng>(rng: &mut R) -> Mat4 {
    let a = DMatrix::from_fn(4, 4, |_, _| cplx(rng, 1.0));
    let q = a.qr().q();
    Mat4::from_fn(|i, j| q[(i, j)])
}

/// U diag(λ) U* with eigenvalues drawn from [−1, 3].
pub fn random_hermitian4<R: Rng>(rng: &mut R) -> QForm {
    let u = random_unitary4(rng);
    let d = Mat4::from_diagonal(&Vector4::from_fn(|_, _| {
        C64::new(rng.random_range(-1.0..3.0), 0.0)
    }));
    QForm::new(u * d * u.adjoint()).expect("Hermitian by construction")
}

/// Random energy-momentum with timelike future M.
pub fn random_timelike_em<R: Rng>(rng: &mut R) -> EnergyMomentum {
    let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let m0 = (v.iter().map(|x| x * x).sum::<f64>()).sqrt() + rng.random_range(0.1..2.0);
    let n = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let r = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    EnergyMomentum::from_vectors([m0, v[0], v[1], v[2]], n, r).expect("trace-free by construction")
}

fn max_abs(m: &Mat2) -> f64 {
    m.iter().fold(0.0_f64, |a, z| a.max(z.norm()))
}

fn max_abs4(m: &Mat4) -> f64 {
    m.iter().fold(0.0_f64, |a, z| a.max(z.norm()))
}

fn eta() -> Matrix4<f64> {
    Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, 1.0, 1.0, 1.0))
}

/// Runs one suite by name.
pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<SuiteReport> {
    let index = SUITES
        .iter()
        .position(|s| *s == name)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {name:?}")))?;
    let mut rng = suite_rng(opts.seed, index as u64);
    let n = opts.samples;
    let tally = match name {
        "lambda" => lambda_suite(&mut rng, n),
        "adjugate" => adjugate_suite(&mut rng, n),
        "clifford" => clifford_suite(&mut rng, n, opts.corrupt_theta),
        "covering" => covering_suite(&mut rng, n),
        "causality" => causality_suite(&mut rng, n.max(1) * 10),
        "equivariance" => equivariance_suite(&mut rng, n.div_ceil(10).max(1))?,
        "section" => section_suite(&mut rng, n.div_ceil(10).max(1))?,
        "geometry" => geometry_suite(&mut rng, n.div_ceil(10).max(1))?,
        "minors" => minors_suite(&mut rng, opts.sweep_samples, crate::positivity::DEFAULT_EPS),
        "reduced" => reduced_suite(&mut rng, opts.sweep_samples, 1e-6),
        "normal_form" => normal_form_suite(&mut rng, n.div_ceil(10).max(1))?,
        "components" => components_suite(&mut rng, n)?,
        _ => unreachable!(),
    };
    Ok(tally.finish(name))
}

/// Runs every suite, in parallel, reporting in [`SUITES`] order.
pub fn run_all(opts: &VerifyOptions) -> Result<Vec<SuiteReport>> {
    SUITES.par_iter().map(|s| run_suite(s, opts)).collect()
}

fn lambda_suite<R: Rng>(rng: &mut R, n: usize) -> Tally {
    let mut t = Tally::new(1e-10);
    for _ in 0..n {
        let y = random_mink(rng, 2.0);
        let h = lambda_iso(&y);
        let scale = y.0.iter().map(|v| v * v).sum::<f64>().max(1.0);
        t.residual((-h.det() - y.q()).abs() / scale);
        let back = lambda_inv(h.matrix()).expect("Hermitian");
        t.residual(
            back.0
                .iter()
                .zip(y.0)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
                / scale.sqrt(),
        );
        t.samples += 1;
    }
    t
}

fn adjugate_suite<R: Rng>(rng: &mut R, n: usize) -> Tally {
    let mut t = Tally::new(1e-10);
    for _ in 0..n {
        let a = Mat2::from_fn(|_, _| cplx(rng, 2.0));
        let scale = max_abs(&a).max(1.0).powi(2);
        t.residual(max_abs(&(a * adjugate(&a) - Mat2::identity() * a.determinant())) / scale);
        let y = random_mink(rng, 2.0);
        let flipped = MinkVector([y.0[0], -y.0[1], -y.0[2], -y.0[3]]);
        t.residual(max_abs(
            &(adjugate(lambda_iso(&y).matrix()) - lambda_iso(&flipped).matrix()),
        ));
        t.samples += 1;
    }
    t
}

fn clifford_suite<R: Rng>(rng: &mut R, n: usize, corrupt: Option<f64>) -> Tally {
    let mut t = Tally::new(1e-10);
    for _ in 0..n {
        let x = random_hermitian2(rng, 2.0);
        let mut theta = clifford_theta(&x);
        if let Some(delta) = corrupt {
            for i in 0..2 {
                for j in 2..4 {
                    theta[(i, j)] *= 1.0 + delta;
                }
            }
        }
        let expected = Mat4::identity() * C64::new(4.0 * x.det(), 0.0);
        let scale = max_abs(x.matrix()).max(1.0).powi(2);
        t.residual(max_abs4(&(theta * theta - expected)) / scale);
        t.samples += 1;
    }
    t
}

fn covering_suite<R: Rng>(rng: &mut R, n: usize) -> Tally {
    let mut t = Tally::new(1e-10);
    let eta = eta();
    for _ in 0..n {
        let (g, h) = (random_sl2(rng), random_sl2(rng));
        let (mg, mh) = (mu_cover(&g), mu_cover(&h));
        let mgh = mu_cover(&g.compose(&h));
        let scale = mgh.amax().max(1.0);
        t.residual((mgh - mg * mh).amax() / scale);
        t.residual((mg.transpose() * eta * mg - eta).amax() / mg.amax().max(1.0).powi(2));
        let neg = SL2Element::new(-g.matrix()).expect("det(−g) = det g");
        t.residual((mu_cover(&neg) - mg).amax() / mg.amax().max(1.0));
        t.check(mg[(0, 0)] > 0.0 && mg.determinant() > 0.0);
        t.samples += 1;
    }
    t
}

fn causality_suite<R: Rng>(rng: &mut R, n: usize) -> Tally {
    let mut t = Tally::new(1e-12);
    for k in 0..n {
        let d = if k % 10 == 9 {
            // proportional U and V: the isotropic equality case
            let u: [C64; 2] = [cplx(rng, 1.0), cplx(rng, 1.0)];
            let lam = cplx(rng, 1.0);
            let v = [u[0] * lam, u[1] * lam];
            SpinorData::new([v[1].conj(), -u[1].conj()], [u[0], v[0]])
        } else {
            random_spinor(rng)
        };
        let (uu, vv) = (d.big_u().norm_squared(), d.big_v().norm_squared());
        let gap = d.uv_product().norm_sqr() - uu * vv;
        let scale = (uu * vv).max(f64::MIN_POSITIVE);
        t.residual(gap.max(0.0) / scale);
        let c = k_map(&d).coefficients;
        t.check(c[0] >= 0.0);
        t.extreme("max_q_over_uv", MinkVector(c).q() / (4.0 * scale));
        if k % 10 == 9 {
            t.count("equality_cases");
            let s = uu.max(vv).max(1.0);
            let worst = [
                d.chi().norm() / s,
                d.uv_det().norm() / s,
                k_norm_squared(&d).abs() / (s * s),
            ];
            let worst = worst.into_iter().fold(0.0, f64::max);
            t.extreme("equality_max_residual", worst);
            t.check(worst <= 1e-10);
        }
        t.samples += 1;
    }
    t
}

fn equivariance_suite<R: Rng>(rng: &mut R, n: usize) -> Result<Tally> {
    let mut t = Tally::new(1e-10);
    for _ in 0..n {
        let e = random_sl2(rng);
        let d = random_spinor(rng);
        let moved = d.act(&e);
        let (k0, k1) = (k_map(&d), k_map(&moved));

        // V coefficients transform by μ(ẽ⁻¹)ᵀ, the pairing by Ad((ẽ*)⁻¹)
        let expected_c =
            mu_cover(&e.inverse()).transpose() * nalgebra::Vector4::from(k0.coefficients);
        let c1 = nalgebra::Vector4::from(k1.coefficients);
        t.residual((c1 - expected_c).amax() / expected_c.amax().max(1e-300));
        let einv_star = e.adjoint().inverse();
        let expected_a = einv_star.matrix() * k0.pairing * e.adjoint().matrix();
        t.residual(max_abs(&(k1.pairing - expected_a)) / max_abs(&expected_a).max(1e-300));

        // the spinor field itself is invariant under the joint action on frame and data
        let g = random_sl2(rng);
        let s0 = crate::spin3::iks_eval(&d, &g).0;
        let s1 = crate::spin3::iks_eval(&moved, &e.compose(&g)).0;
        let smax = s0.iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        t.residual((s1 - s0).iter().fold(0.0_f64, |a, z| a.max(z.norm())) / smax.max(1e-300));

        // congruence of Q under the dual action
        let em = random_timelike_em(rng);
        let (m, xi) = em.matrices()?;
        let q = q_from_components(&m, &xi)?;
        let acted = group_action(&e, &em)?;
        let (m2, xi2) = acted.matrices()?;
        let q2 = q_from_components(&m2, &xi2)?;
        let s = congruence_matrix(&e);
        let expected_q = s.adjoint() * q.matrix() * s;
        t.residual(max_abs4(&(q2.matrix() - expected_q)) / max_abs4(&expected_q).max(1.0));

        // Q(ẽ⁻¹ ∗ x) = Q'(x) pointwise
        let x = random_spinor(rng);
        let lhs = q2.eval(&x.to_c4());
        let rhs = q.eval(&x.act(&e.inverse()).to_c4());
        t.residual((lhs - rhs).abs() / rhs.abs().max(1.0));
        t.samples += 1;
    }
    Ok(t)
}

/// Random point of H³ with r ≤ 3 away from the polar axis.
fn random_point<R: Rng>(rng: &mut R, rmin: f64, rmax: f64) -> Result<ChartPoint> {
    ChartPoint::new3(
        rng.random_range(rmin..rmax),
        rng.random_range(0.2..std::f64::consts::PI - 0.2),
        rng.random_range(0.0..std::f64::consts::TAU),
    )
}

fn section_suite<R: Rng>(rng: &mut R, n: usize) -> Result<Tally> {
    let mut t = Tally::new(1e-10);
    for _ in 0..n {
        let p = random_point(rng, 0.1, 3.0)?;
        let y = p.embedding();
        let y = MinkVector([y[0], y[1], y[2], y[3]]);
        let w = lambda_iso(&y);
        let v = random_mink(rng, 1.0);
        // project onto the tangent space {ẏ : ⟨y, ẏ⟩ = 0}
        let c = y.dot(&v);
        let tangent = MinkVector(std::array::from_fn(|k| v.0[k] + c * y.0[k]));
        let tw = *lambda_iso(&tangent).matrix();
        let d = random_spinor(rng);
        let g = section(&w)?;
        let gs = g.compose(&random_su2(rng));
        let (v0, v1) = (v_frame(&d, &g), v_frame(&d, &gs));
        t.residual((v0 - v1).abs() / v0.abs().max(1.0));
        let (a0, a1) = (alpha_field(&d, &g, &tw)?, alpha_field(&d, &gs, &tw)?);
        let scale = a0.abs().max(1.0);
        t.residual((a0 - a1).abs() / scale);
        let pairing = k_map(&d).pairing;
        t.residual((a0 - alpha_closed_form(&pairing, &w, &tw)).abs() / scale);
        t.samples += 1;
    }
    Ok(t)
}

/// Fourth-order central first derivative along coordinate `i`.
fn d1(f: &dyn Fn(&[f64]) -> f64, x: &[f64], i: usize, h: f64) -> f64 {
    let at = |s: f64| {
        let mut y = x.to_vec();
        y[i] += s;
        f(&y)
    };
    (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h)
}

fn geometry_suite<R: Rng>(rng: &mut R, n: usize) -> Result<Tally> {
    let mut t = Tally::new(1e-6);
    let h = 1e-2;
    let gens = generator_basis(3);
    for _ in 0..n {
        let p = random_point(rng, 0.3, 4.0)?;
        let x = p.coords();
        let frame = frame_at(&p)?;
        for k in 0..4 {
            let f = |c: &[f64]| {
                mass_function_eval(k, &ChartPoint::from_coords(c).expect("inside chart"))
                    .expect("valid")
                    .value
            };
            let df = |c: &[f64], i: usize| d1(&f, c, i, h);
            let jet = mass_function_eval(k, &p)?;
            let grad: Vec<f64> = (0..3).map(|i| df(&x, i)).collect();
            let mut worst: f64 = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    let g_b = |c: &[f64]| df(c, b);
                    let mut hess = d1(&g_b, &x, a, h);
                    for (m, gm) in grad.iter().enumerate() {
                        hess -= frame.christoffels.get(m, a, b) * gm;
                    }
                    worst = worst.max((hess - jet.value * frame.metric[(a, b)]).abs());
                }
            }
            t.residual(worst / jet.value.abs().max(1.0));
        }
        for g in &gens {
            t.residual(killing_residual(g, &p, 1e-4)?);
        }
        let d = random_spinor(rng);
        t.residual(killing_residual(&SpinorKillingForm { data: d }, &p, 1e-4)?);
        t.residual(killing_residual(
            &PairingKillingForm {
                pairing: k_map(&d).pairing,
            },
            &p,
            1e-4,
        )?);
        t.samples += 1;
    }
    Ok(t)
}

fn minors_suite<R: Rng>(rng: &mut R, n: usize, eps: f64) -> Tally {
    let mut t = Tally::new(0.0);
    for _ in 0..n {
        let q = random_hermitian4(rng);
        let psd = psd_oracle_eps(&q, eps);
        let minors = minors_check_eps(&q, eps);
        if psd.verdict == Verdict::Marginal {
            t.count("in_band");
        } else {
            t.count(if psd.verdict == Verdict::Holds {
                "psd"
            } else {
                "not_psd"
            });
            if minors.verdict != psd.verdict {
                t.count("disagreements");
                t.failures += 1;
            }
        }
        t.samples += 1;
    }
    t
}

fn normal_tuple<R: Rng>(rng: &mut R) -> NormalForm {
    NormalForm {
        m0: rng.random_range(1e-3..3.0),
        n1: rng.random_range(-3.0..3.0),
        r1: rng.random_range(-3.0..3.0),
        r2: rng.random_range(-3.0..3.0),
        transform: SL2Element::identity(),
    }
}

/// Random tuples, one in ten placed within 0.4 ε of equality.
fn reduced_suite<R: Rng>(rng: &mut R, n: usize, eps: f64) -> Tally {
    let mut t = Tally::new(0.0);
    for k in 0..n {
        let mut nf = normal_tuple(rng);
        let near = k % 10 == 0;
        if near {
            let rhs = (nf.n1.abs() + nf.r2.abs()).hypot(nf.r1);
            nf.m0 = rhs + rng.random_range(-0.4..0.4) * eps;
        }
        let red = reduced_inequality_eps(&nf, eps);
        let psd = psd_oracle_eps(&nf.q(), eps);
        if near {
            t.count("near_boundary");
            t.extreme("near_boundary_max_gap", (red.lhs - red.rhs).abs());
            if red.verdict == Verdict::Marginal && psd.verdict == Verdict::Marginal {
                t.count("near_boundary_marginal_both");
            } else {
                t.failures += 1;
            }
        } else if red.verdict == Verdict::Marginal || psd.verdict == Verdict::Marginal {
            t.count("in_band");
        } else if red.verdict == psd.verdict {
            t.count("agreements");
        } else {
            t.count("disagreements");
            t.failures += 1;
        }
        t.samples += 1;
    }
    t
}

fn normal_form_suite<R: Rng>(rng: &mut R, n: usize) -> Result<Tally> {
    let mut t = Tally::new(1e-8);
    for _ in 0..n {
        let em = random_timelike_em(rng);
        let nf = normalize(&em)?;
        let scale = em.mass_vector.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
        t.residual(nf.residual(&em)? / scale);
        t.check(nf.n1 >= 0.0 && nf.r2 >= 0.0);

        // representative pattern of Q: zero (0,1) and (2,3) entries, equal diagonal
        let q = nf.q();
        let qm = q.matrix();
        t.residual(qm[(0, 1)].norm().max(qm[(2, 3)].norm()) / scale);

        // orbit invariants under a random action
        let e = random_sl2(rng);
        let nf2 = normalize(&group_action(&e, &em)?)?;
        for (a, b) in [
            (nf.m0, nf2.m0),
            (nf.n1.abs(), nf2.n1.abs()),
            (nf.r1 * nf.r1, nf2.r1 * nf2.r1),
            (nf.r2 * nf.r2, nf2.r2 * nf2.r2),
        ] {
            t.residual((a - b).abs() / scale.powi(2));
        }

        // PSD verdict is invariant under congruence
        let (m, xi) = em.matrices()?;
        let (m2, xi2) = group_action(&e, &em)?.matrices()?;
        let v0 = psd_oracle_eps(&q_from_components(&m, &xi)?, 1e-9).verdict;
        let v1 = psd_oracle_eps(&q_from_components(&m2, &xi2)?, 1e-9).verdict;
        if v0 != Verdict::Marginal && v1 != Verdict::Marginal {
            t.check(v0 == v1);
        }
        t.samples += 1;
    }
    Ok(t)
}

fn components_suite<R: Rng>(rng: &mut R, n: usize) -> Result<Tally> {
    let mut t = Tally::new(1e-9);
    for _ in 0..n {
        let em = random_timelike_em(rng);
        let ci = component_inequalities(&em, 1e-9)?;
        let (m, xi) = em.matrices()?;
        let p = q_from_components(&m, &xi)?.matrix() * C64::new(0.5, 0.0);
        let scale = max_abs4(&p).max(1.0);
        for ((_, v), idx) in ci
            .entries
            .iter()
            .zip(ComponentInequalities::minor_indices())
        {
            t.residual((v - principal_minor(&p, idx)).abs() / scale.powi(idx.len() as i32));
        }
        t.samples += 1;
    }
    Ok(t)
}
