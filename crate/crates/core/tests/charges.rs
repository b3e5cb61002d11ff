use std::sync::Arc;

use adsmass::charges::{
    charge_integrand, charge_limit, charge_on_sphere, energy_momentum, q_assemble_from_charges,
    q_from_components, ChargeCouple, ChargeOptions, EnergyMomentum,
};
use adsmass::geometry::{generator_basis, ChartPoint};
use adsmass::initial_data::{
    builtin_family, DerivativeMode, FamilyParams, FieldSource, GaussianPerturbation, InitialData,
    LinearCombination, SchwarzschildAds,
};
use adsmass::quadrature::SphereQuadrature;
use adsmass::spin3::{lambda_iso, HermMatrix, Mat2, MinkVector, SpinorData, C64};
use adsmass::Error;
use nalgebra::DMatrix;

fn schwarzschild(m: f64) -> InitialData {
    let params: FamilyParams = [("m".to_string(), m.to_string())].into();
    builtin_family("schwarzschild_ads", &params).unwrap()
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[test]
fn zero_couple_gives_zero() {
    let d = schwarzschild(1.0);
    let quad = SphereQuadrature::new(3, 12, 24).unwrap();
    assert_eq!(
        charge_on_sphere(&d, &ChargeCouple::zero("0"), 5.0, &quad).unwrap(),
        0.0
    );
}

#[test]
fn exact_hyperbolic_charges_vanish() {
    let params = FamilyParams::new();
    let d = builtin_family("exact_hyperbolic", &params).unwrap();
    let em = energy_momentum(&d, &ChargeOptions::default()).unwrap();
    assert!(em.mass_vector.iter().chain(&em.angular).all(|v| *v == 0.0));
}

#[test]
fn mass_scales_linearly() {
    let schedule = [4.0, 5.0, 6.0, 7.0, 8.0];
    let x0 = ChargeCouple::mass_function(0, 3).unwrap();
    let one = charge_limit(&schwarzschild(1.0), &x0, &schedule, 1e-6).unwrap();
    let two = charge_limit(&schwarzschild(2.0), &x0, &schedule, 1e-6).unwrap();
    assert!(one.converged && two.converged);
    assert!(
        (two.value / one.value - 2.0).abs() < 1e-6,
        "{} vs {}",
        one.value,
        two.value
    );
    // H(r) − H(∞) decays like e^{−3r}
    let rate = one.fitted_rate.unwrap();
    assert!((rate - 3.0).abs() < 0.6, "rate {rate}");
}

#[test]
fn integrand_is_linear_in_the_data() {
    let a: Arc<dyn FieldSource> = Arc::new(SchwarzschildAds::new(3, 0.8).unwrap());
    let b: Arc<dyn FieldSource> =
        Arc::new(GaussianPerturbation::new(3, 0.3, 5.5, 1.0, 0.4).unwrap());
    let mk = |src: Arc<dyn FieldSource>| {
        InitialData::new(
            src,
            3.0,
            DerivativeMode::FiniteDifference { step: 1e-4 },
            "part",
        )
        .unwrap()
    };
    let combo = LinearCombination::new(vec![(2.5, a.clone()), (-1.5, b.clone())]).unwrap();
    let (da, db, dc) = (mk(a), mk(b), mk(Arc::new(combo)));
    let couples = [
        ChargeCouple::mass_function(0, 3).unwrap(),
        ChargeCouple::mass_function(2, 3).unwrap(),
        ChargeCouple::generator("boost", generator_basis(3)[1].clone()),
        ChargeCouple::generator("rotation", generator_basis(3)[4].clone()),
        ChargeCouple::spinor(
            "spinor",
            SpinorData::new([c(1.0), c(0.5)], [c(0.2), C64::new(0.0, 1.0)]),
        ),
    ];
    for p in [
        ChartPoint::new3(3.0, 0.7, 1.2).unwrap(),
        ChartPoint::new3(5.0, 2.0, 4.0).unwrap(),
    ] {
        for cp in &couples {
            let (ia, ib) = (
                charge_integrand(&da, cp, &p).unwrap(),
                charge_integrand(&db, cp, &p).unwrap(),
            );
            let ic = charge_integrand(&dc, cp, &p).unwrap();
            let expected = 2.5 * ia - 1.5 * ib;
            let scale = (2.5 * ia).abs() + (1.5 * ib).abs();
            assert!(
                (ic - expected).abs() <= 1e-10 * scale.max(1e-300),
                "{}: {ic} vs {expected}",
                cp.label
            );
        }
    }
}

#[test]
fn doubling_quadrature_is_stable() {
    let d = schwarzschild(1.0);
    let g = builtin_family("gaussian_perturbation", &FamilyParams::new()).unwrap();
    let (base, fine) = (
        SphereQuadrature::new(3, 24, 48).unwrap(),
        SphereQuadrature::new(3, 48, 96).unwrap(),
    );
    let couples = [
        ChargeCouple::mass_function(0, 3).unwrap(),
        ChargeCouple::spinor(
            "spinor",
            SpinorData::new([c(1.0), c(0.0)], [c(0.0), c(1.0)]),
        ),
    ];
    for data in [&d, &g] {
        for cp in &couples {
            let (a, b) = (
                charge_on_sphere(data, cp, 6.0, &base).unwrap(),
                charge_on_sphere(data, cp, 6.0, &fine).unwrap(),
            );
            assert!(
                (a - b).abs() < 1e-8 * a.abs().max(1.0),
                "{}: {a} vs {b}",
                cp.label
            );
        }
    }
}

#[test]
fn q_block_examples() {
    let id = HermMatrix::identity();
    let q = q_from_components(&id, &Mat2::zeros()).unwrap();
    assert_eq!(*q.matrix(), adsmass::spin3::Mat4::identity() * c(2.0));

    let xi = Mat2::new(c(1.0), c(0.0), c(0.0), c(-1.0));
    let q = q_from_components(&id, &xi).unwrap();
    let dq = DMatrix::from_fn(4, 4, |i, j| q.matrix()[(i, j)]);
    let mut ev: Vec<f64> = dq.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    for (got, want) in ev.iter().zip([0.0, 0.0, 4.0, 4.0]) {
        assert!((got - want).abs() < 1e-12, "{ev:?}");
    }
    assert!(matches!(
        q_from_components(&id, &Mat2::identity()),
        Err(Error::NotTraceFree { .. })
    ));
}

#[test]
fn q_lower_block_is_twice_lambda() {
    let em = EnergyMomentum::from_charges(
        3,
        vec![3.0, 0.5, -1.0, 0.25],
        vec![0.1, 0.2, 0.3, -0.4, 0.5, 0.6],
    )
    .unwrap();
    let (m, xi) = em.matrices().unwrap();
    let q = q_from_components(&m, &xi).unwrap();
    let lam = lambda_iso(&MinkVector([3.0, 0.5, -1.0, 0.25]));
    for i in 0..2 {
        for j in 0..2 {
            assert_eq!(q.matrix()[(i + 2, j + 2)], lam.matrix()[(i, j)] * c(2.0));
        }
    }
}

#[test]
fn schwarzschild_q_is_proportional_to_identity() {
    let d = schwarzschild(1.0);
    let opts = ChargeOptions::default();
    let q = q_assemble_from_charges(&d, &opts).unwrap();
    let x0 = charge_limit(
        &d,
        &ChargeCouple::mass_function(0, 3).unwrap(),
        &opts.schedule,
        opts.tol,
    )
    .unwrap();
    let scale = q.max_abs().max(1.0);
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { 2.0 * x0.value } else { 0.0 };
            assert!(
                (q.matrix()[(i, j)] - c(want)).norm() <= 4.0 * opts.tol * scale,
                "Q[{i}{j}]"
            );
        }
    }
}

#[test]
fn bad_schedules_and_non_convergence() {
    let d = schwarzschild(1.0);
    let x0 = ChargeCouple::mass_function(0, 3).unwrap();
    assert!(matches!(
        charge_limit(&d, &x0, &[5.0, 4.0, 6.0], 1e-6),
        Err(Error::InvalidSchedule(_))
    ));
    assert!(matches!(
        charge_limit(&d, &x0, &[4.0, 5.0], 1e-6),
        Err(Error::InvalidSchedule(_))
    ));
    // the horizon of m = 1 sits near r ≈ 0.6
    assert!(charge_limit(&d, &x0, &[0.1, 2.0, 3.0], 1e-6).is_err());
    let early = charge_limit(&d, &x0, &[1.0, 1.5, 2.0], 1e-9).unwrap();
    assert!(!early.converged);
    assert!(matches!(
        early.require_converged(),
        Err(Error::NonConvergence { .. })
    ));
}
