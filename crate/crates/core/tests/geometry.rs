use std::f64::consts::{FRAC_PI_2, PI, TAU};

use adsmass::geometry::{
    area_density, chart_to_hermitian, frame_at, generator_basis, killing_field, mass_function_eval,
    ChartPoint, SoN1Generator,
};
use adsmass::Error;
use approx::assert_relative_eq;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = ChartPoint> {
    (0.05..6.0f64, 0.05..PI - 0.05, 0.0..TAU)
        .prop_map(|(r, t, p)| ChartPoint::new3(r, t, p).unwrap())
}

#[test]
fn equatorial_frame_and_area() {
    let p = ChartPoint::new3(1.0, FRAC_PI_2, 0.0).unwrap();
    let f = frame_at(&p).unwrap();
    let s2 = 1f64.sinh().powi(2);
    let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, s2, s2]));
    assert!((&f.metric - expected).amax() < 1e-15);
    let q = ChartPoint::new3(2.0, FRAC_PI_2, 0.3).unwrap();
    assert_relative_eq!(area_density(&q), 2f64.sinh().powi(2), max_relative = 1e-15);
}

#[test]
fn guard_bands() {
    assert!(ChartPoint::new3(1.0, 0.0, 0.0).is_err());
    let near_axis = ChartPoint::new3(1.0, 1e-9, 0.0).unwrap();
    assert!(matches!(
        frame_at(&near_axis),
        Err(Error::CoordinateSingularity { .. })
    ));
    let near_origin = ChartPoint::new3(1e-9, 1.0, 0.0).unwrap();
    assert!(matches!(
        frame_at(&near_origin),
        Err(Error::CoordinateSingularity { .. })
    ));
}

#[test]
fn mass_function_values() {
    let p = ChartPoint::new3(1.0, FRAC_PI_2, 0.0).unwrap();
    let x0 = mass_function_eval(0, &p).unwrap();
    assert_relative_eq!(x0.value, 1f64.cosh(), max_relative = 1e-15);
    let x1 = mass_function_eval(1, &p).unwrap();
    assert_relative_eq!(x1.value, 1f64.sinh(), max_relative = 1e-15);
    assert_relative_eq!(x1.hessian[(0, 0)], 1f64.sinh(), max_relative = 1e-14);
    let near = ChartPoint::new3(1e-6, 1.0, 1.0).unwrap();
    let j = mass_function_eval(0, &near).unwrap();
    assert!((j.value - 1.0).abs() < 1e-11 && j.gradient.iter().all(|g| g.abs() < 1e-5));
}

#[test]
fn rotation_field_is_azimuthal() {
    // rotation in the (y1, y2) plane about the polar axis
    let a = SoN1Generator::rotation(3, 1, 2);
    let p = ChartPoint::new3(1.5, 0.01, 0.7).unwrap();
    let k = killing_field(&a, &p).unwrap();
    assert!(k.vector[0].abs() < 1e-14 && k.vector[1].abs() < 1e-14);
    let norm = frame_at(&p).unwrap().covector_norm(&k.dual_form);
    assert_relative_eq!(norm, 1.5f64.sinh() * 0.01f64.sin(), max_relative = 1e-12);
    let zero = killing_field(&SoN1Generator::zero(3), &p).unwrap();
    assert!(zero.vector.iter().chain(&zero.dual_form).all(|v| *v == 0.0));
}

#[test]
fn generators_close_under_commutator() {
    let basis = generator_basis(3);
    assert_eq!(basis.len(), 6);
    for a in &basis {
        for b in &basis {
            let c = a.commutator(b).unwrap();
            assert!(SoN1Generator::new(c.matrix().clone()).is_ok());
        }
    }
    let mut bad = DMatrix::zeros(4, 4);
    bad[(1, 2)] = 1.0;
    assert!(matches!(
        SoN1Generator::new(bad),
        Err(Error::InvalidGenerator { .. })
    ));
}

#[test]
fn hermitian_image_convention() {
    // the y2 direction sits on the real off-diagonal of Λ
    let p = ChartPoint::new3(1.0, FRAC_PI_2, FRAC_PI_2).unwrap();
    let w = chart_to_hermitian(&p).unwrap();
    let (c, s) = (1f64.cosh(), 1f64.sinh());
    assert_relative_eq!(w.matrix()[(0, 0)].re, c, max_relative = 1e-15);
    assert_relative_eq!(w.matrix()[(1, 1)].re, c, max_relative = 1e-15);
    assert_relative_eq!(w.matrix()[(0, 1)].re, s, max_relative = 1e-15);
    let origin = chart_to_hermitian(&ChartPoint::new3(1e-12, 1.0, 2.0).unwrap()).unwrap();
    assert!((origin.matrix() - adsmass::spin3::Mat2::identity())
        .iter()
        .all(|z| z.norm() < 1e-11));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hyperboloid_constraint(p in point()) {
        let y = p.embedding();
        let q = -y[0] * y[0] + y[1..].iter().map(|v| v * v).sum::<f64>();
        prop_assert!((q + 1.0).abs() <= 1e-12 * y[0] * y[0]);
        let w = chart_to_hermitian(&p).unwrap();
        prop_assert!((w.det() - 1.0).abs() <= 1e-12 * y[0] * y[0]);
    }

    #[test]
    fn inverse_metric(p in point()) {
        let f = frame_at(&p).unwrap();
        let id = &f.inverse_metric * &f.metric;
        prop_assert!((id - DMatrix::identity(3, 3)).amax() < 1e-12);
        prop_assert!(f.christoffels.symmetry_residual() == 0.0);
    }

    #[test]
    fn analytic_hessian(p in point(), k in 0usize..4) {
        let j = mass_function_eval(k, &p).unwrap();
        let f = frame_at(&p).unwrap();
        let res = (&j.hessian - &f.metric * j.value).amax();
        prop_assert!(res <= 1e-10 * j.value.abs().max(1.0) * p.r().cosh());
    }
}
