//! Acceptance criteria, one line of output per criterion.

// a NaN in a checked quantity must fail the criterion
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use adsmass::charges::{
    energy_momentum_with_diagnostics, q_assemble_with_diagnostics, q_from_components, ChargeLimit,
    ChargeOptions,
};
use adsmass::geometry::ChartPoint;
use adsmass::initial_data::{
    boundary_k_vector, builtin_family, constraint_deficit, constraints_map, dec_sample,
    BoundaryData, CausalVerdict, InitialData,
};
use adsmass::positivity::{congruence_matrix, normalize, NormalForm};
use adsmass::spin3::{Mat4, SL2Element, C64};
use adsmass::verify::{random_timelike_em, run_suite, suite_rng, SuiteReport, VerifyOptions};
use nalgebra::DMatrix;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !($cond) {
            return Err(format!($($fmt)+));
        }
    };
}

fn family(name: &str, kv: &[(&str, &str)]) -> Result<InitialData, String> {
    let params = kv
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect();
    builtin_family(name, &params).map_err(|e| e.to_string())
}

fn suite(name: &str) -> Result<SuiteReport, String> {
    let r = run_suite(name, &VerifyOptions::default()).map_err(|e| e.to_string())?;
    ensure!(
        r.passed,
        "suite {name} failed: {} of {} samples, max residual {:e}",
        r.failures,
        r.samples,
        r.max_residual
    );
    Ok(r)
}

fn detail(r: &SuiteReport, key: &str) -> f64 {
    r.details.get(key).copied().unwrap_or(0.0)
}

fn max_abs4(m: &Mat4) -> f64 {
    m.iter().fold(0.0_f64, |a, z| a.max(z.norm()))
}

fn ac01() -> Outcome {
    let start = Instant::now();
    let data = family("exact_hyperbolic", &[])?;
    let opts = ChargeOptions::default();
    let (_, limits) = energy_momentum_with_diagnostics(&data, &opts).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    ensure!(
        limits.len() == 10,
        "expected 10 charges, got {}",
        limits.len()
    );
    for l in &limits {
        ensure!(l.radii == opts.schedule, "{} skipped radii", l.label);
        ensure!(
            l.values.iter().all(|v| *v == 0.0) && l.value == 0.0,
            "{} is not exactly zero: {:?}",
            l.label,
            l.values
        );
    }
    ensure!(elapsed < 10.0, "took {elapsed:.2} s");
    Ok(format!(
        "10 charges × {} radii exactly 0, {elapsed:.2} s",
        opts.schedule.len()
    ))
}

fn ac02() -> Outcome {
    let mut worst: f64 = 0.0;
    for name in ["lambda", "adjugate", "clifford", "covering"] {
        let r = suite(name)?;
        ensure!(
            r.samples >= 1000 && r.tolerance <= 1e-10,
            "{name}: {} samples at tolerance {:e}",
            r.samples,
            r.tolerance
        );
        worst = worst.max(r.max_residual);
    }
    Ok(format!("4 suites × 1000 samples, max residual {worst:.2e}"))
}

fn ac03() -> Outcome {
    let r = suite("causality")?;
    let eq = detail(&r, "equality_cases");
    ensure!(
        r.samples >= 10_000 && r.tolerance <= 1e-12,
        "{} samples",
        r.samples
    );
    ensure!(
        eq > 0.0 && detail(&r, "equality_max_residual") <= 1e-10,
        "equality cases not verified"
    );
    Ok(format!(
        "{} samples, max gap {:.2e}, {eq} equality cases with residual {:.2e}",
        r.samples,
        r.max_residual,
        detail(&r, "equality_max_residual")
    ))
}

fn ac04() -> Outcome {
    let r = suite("equivariance")?;
    ensure!(
        r.samples >= 100 && r.tolerance <= 1e-10,
        "{} samples",
        r.samples
    );
    Ok(format!(
        "{} samples, max relative error {:.2e}",
        r.samples, r.max_residual
    ))
}

/// The representative's Q written out entry by entry.
fn explicit_q(m0: f64, n1: f64, r1: f64, r2: f64) -> Mat4 {
    let c = |re: f64, im: f64| C64::new(2.0 * re, 2.0 * im);
    let z = c(0.0, 0.0);
    #[rustfmt::skip]
    let q = Mat4::new(
        c(m0, 0.0), z,           c(n1, r1),   c(0.0, r2),
        z,          c(m0, 0.0),  c(0.0, r2),  c(-n1, -r1),
        c(n1, -r1), c(0.0, -r2), c(m0, 0.0),  z,
        c(0.0, -r2), c(-n1, r1), z,           c(m0, 0.0),
    );
    q
}

fn ac05() -> Outcome {
    // pattern: each basis tuple reproduces its coefficient matrix exactly
    for k in 0..4 {
        let mut t = [0.0; 4];
        t[k] = 1.0;
        let nf = NormalForm {
            m0: t[0],
            n1: t[1],
            r1: t[2],
            r2: t[3],
            transform: SL2Element::identity(),
        };
        let q = nf.q();
        ensure!(
            *q.matrix() == explicit_q(t[0], t[1], t[2], t[3]),
            "pattern mismatch for basis tuple {k}"
        );
    }
    let mut rng = suite_rng(5, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let em = random_timelike_em(&mut rng);
        let nf = normalize(&em).map_err(|e| e.to_string())?;
        let q = nf.q();
        let expected = explicit_q(nf.m0, nf.n1, nf.r1, nf.r2);
        for (a, b) in q.matrix().iter().zip(expected.iter()) {
            ensure!(
                (*b == C64::new(0.0, 0.0)) == (*a == C64::new(0.0, 0.0)),
                "zero pattern differs"
            );
            worst = worst.max((a - b).norm() / max_abs4(&expected).max(1.0));
        }
        // the representative is the congruence image of the input Q
        let (m, xi) = em.matrices().map_err(|e| e.to_string())?;
        let q_in = q_from_components(&m, &xi).map_err(|e| e.to_string())?;
        let s = congruence_matrix(&nf.transform);
        let moved = s.adjoint() * q_in.matrix() * s;
        let off = max_abs4(&(moved - q.matrix())) / max_abs4(q.matrix()).max(1.0);
        ensure!(
            off <= 1e-8,
            "normal form is not congruent to the input: {off:e}"
        );
    }
    ensure!(worst <= 1e-14, "value mismatch {worst:e}");
    Ok(format!(
        "exact zero pattern, 200 normalized tuples, max deviation {worst:.1e}"
    ))
}

fn ac06() -> Outcome {
    let r = suite("minors")?;
    ensure!(r.samples >= 10_000, "{} samples", r.samples);
    ensure!(detail(&r, "disagreements") == 0.0, "disagreements");
    ensure!(
        detail(&r, "psd") > 0.0 && detail(&r, "not_psd") > 0.0,
        "sweep does not cross the cone boundary"
    );
    Ok(format!(
        "{} samples: {} psd, {} not psd, {} in band, 0 disagreements",
        r.samples,
        detail(&r, "psd"),
        detail(&r, "not_psd"),
        detail(&r, "in_band")
    ))
}

fn ac07() -> Outcome {
    let r = suite("reduced")?;
    let near = detail(&r, "near_boundary_marginal_both");
    ensure!(r.samples >= 10_000, "{} samples", r.samples);
    ensure!(near >= 100.0, "only {near} near-boundary samples");
    ensure!(
        detail(&r, "near_boundary_max_gap") < 1e-6,
        "near-boundary samples too far from equality"
    );
    Ok(format!(
        "{} samples: {} agreements, {near} near-boundary marginal in both",
        r.samples,
        detail(&r, "agreements")
    ))
}

fn c3_fixture() -> Result<f64, String> {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/schwarzschild_c3.json"
    );
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let v: BTreeMap<String, serde_json::Value> =
        serde_json::from_str(&text).map_err(|e| e.to_string())?;
    v.get("c3")
        .and_then(|c| c.as_f64())
        .ok_or_else(|| "fixture lacks c3".to_string())
}

fn ac08() -> Outcome {
    let oracle = c3_fixture()?;
    let opts = ChargeOptions::default();
    let mut c3s = Vec::new();
    for m in [0.1, 0.5, 1.0] {
        let data = family("schwarzschild_ads", &[("m", &m.to_string())])?;
        let (em, limits) =
            energy_momentum_with_diagnostics(&data, &opts).map_err(|e| e.to_string())?;
        limits
            .iter()
            .try_for_each(ChargeLimit::require_converged)
            .map_err(|e| e.to_string())?;
        let c3 = em.mass_vector[0] / m;
        ensure!(c3 > 0.0, "c3 = {c3} at m = {m}");
        let bound = 1e-6 * c3 * m;
        let others = em.mass_vector[1..]
            .iter()
            .chain(&em.angular)
            .fold(0.0_f64, |a, v| a.max(v.abs()));
        ensure!(
            others < bound,
            "m = {m}: spatial/angular charge {others:e} ≥ {bound:e}"
        );
        ensure!(
            limits[0].monotone,
            "m = {m}: x0 differences not monotone: {:?}",
            limits[0].differences
        );
        let dec = dec_sample(&data, 100, 0, 1.0, 8.0).map_err(|e| e.to_string())?;
        ensure!(
            dec.satisfied == 100,
            "m = {m}: DEC {} satisfied, {} marginal, {} violated",
            dec.satisfied,
            dec.marginal,
            dec.violated
        );
        c3s.push(c3);
    }
    let mean = c3s.iter().sum::<f64>() / 3.0;
    let spread = c3s.iter().fold(0.0_f64, |a, c| a.max((c - mean).abs())) / mean;
    ensure!(spread < 1e-3, "c3 spread {spread:e}: {c3s:?}");
    let off = (mean - oracle).abs() / oracle;
    ensure!(
        off < 1e-3,
        "c3 = {mean} differs from the large-r oracle {oracle} by {off:e}"
    );
    Ok(format!(
        "c3 = {mean:.10} (oracle {oracle:.10}), spread {spread:.1e}, DEC 100/100"
    ))
}

fn ac09() -> Outcome {
    let opts = ChargeOptions::default();
    let cases = [
        ("exact_hyperbolic", vec![]),
        ("schwarzschild_ads", vec![("m", "1")]),
        (
            "gaussian_perturbation",
            vec![("amplitude", "0.2"), ("tau", "5.5")],
        ),
    ];
    let mut out = Vec::new();
    for (name, kv) in cases {
        let data = family(name, &kv)?;
        let qa = q_assemble_with_diagnostics(&data, &opts).map_err(|e| e.to_string())?;
        qa.limits
            .iter()
            .try_for_each(ChargeLimit::require_converged)
            .map_err(|e| format!("{name}: {e}"))?;
        let (em, limits) =
            energy_momentum_with_diagnostics(&data, &opts).map_err(|e| e.to_string())?;
        limits
            .iter()
            .try_for_each(ChargeLimit::require_converged)
            .map_err(|e| format!("{name}: {e}"))?;
        let (m, xi) = em.matrices().map_err(|e| e.to_string())?;
        let q = q_from_components(&m, &xi).map_err(|e| e.to_string())?;
        let diff = max_abs4(&(qa.q.matrix() - q.matrix()));
        let bound = 2.0 * opts.tol * q.max_abs().max(1.0);
        ensure!(
            diff <= bound,
            "{name}: paths differ by {diff:e} > {bound:e}"
        );
        out.push(format!("{name} {diff:.1e}"));
    }
    Ok(out.join(", "))
}

fn ac10() -> Outcome {
    let g = suite("geometry")?;
    let s = suite("section")?;
    ensure!(
        g.samples >= 100 && g.tolerance <= 1e-6,
        "{} geometry samples",
        g.samples
    );
    ensure!(
        s.samples >= 100 && s.tolerance <= 1e-10,
        "{} section samples",
        s.samples
    );
    Ok(format!(
        "Hess/Killing over {} points max {:.1e}; section over {} points max {:.1e}",
        g.samples, g.max_residual, s.samples, s.max_residual
    ))
}

fn ac11() -> Outcome {
    let g = DMatrix::<f64>::identity(3, 3);
    let cases: [(f64, [f64; 3], f64, CausalVerdict); 5] = [
        (2.0, [0.0; 3], 0.0, CausalVerdict::Satisfied),
        (0.0, [0.0; 3], 2.0, CausalVerdict::Satisfied),
        (3.0, [0.0; 3], -1.0, CausalVerdict::Violated),
        (0.0, [1.0, 0.0, 0.0], 2.0, CausalVerdict::Satisfied),
        (0.0, [0.0, 3.0, 0.0], 2.0, CausalVerdict::Violated),
    ];
    for (tr, k_nu, time, verdict) in cases {
        let bd = BoundaryData {
            tr_breve_k: tr,
            k_nu: k_nu.to_vec(),
        };
        let v = boundary_k_vector(&bd, &g).map_err(|e| e.to_string())?;
        ensure!(
            v.time == time && v.space == k_nu.to_vec(),
            "tr k̆ = {tr}: k⃗ = ({}, {:?})",
            v.time,
            v.space
        );
        ensure!(
            v.verdict == verdict,
            "tr k̆ = {tr}, k(ν) = {k_nu:?}: {:?}, expected {verdict:?}",
            v.verdict
        );
    }
    Ok("null, timelike future and violated rows reproduced".into())
}

fn ac12() -> Outcome {
    let data = family("exact_hyperbolic", &[])?;
    let mut rng = suite_rng(12, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = ChartPoint::new3(
            rng.random_range(0.2..8.0),
            rng.random_range(0.05..std::f64::consts::PI - 0.05),
            rng.random_range(0.0..std::f64::consts::TAU),
        )
        .map_err(|e| e.to_string())?;
        let d = constraint_deficit(&data, &p).map_err(|e| e.to_string())?;
        ensure!(
            d.scalar_part == 0.0 && d.vector_part.iter().all(|v| *v == 0.0),
            "deficit at {p:?} is not (0, 0)"
        );
        let (scal, vector) = constraints_map(&data, &p).map_err(|e| e.to_string())?;
        ensure!(
            vector.iter().all(|v| *v == 0.0),
            "background momentum constraint nonzero"
        );
        worst = worst.max((scal + 6.0).abs());
    }
    ensure!(worst <= 1e-8, "Φ(b, 0) scalar part off by {worst:e}");
    Ok(format!(
        "deficit (0, 0) at 100 points, |Φ(b,0) + 6| ≤ {worst:.1e}"
    ))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("AC-01", ac01),
        ("AC-02", ac02),
        ("AC-03", ac03),
        ("AC-04", ac04),
        ("AC-05", ac05),
        ("AC-06", ac06),
        ("AC-07", ac07),
        ("AC-08", ac08),
        ("AC-09", ac09),
        ("AC-10", ac10),
        ("AC-11", ac11),
        ("AC-12", ac12),
    ];
    let mut failed = 0;
    for (id, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(msg) => println!("[PASS] {id} {msg}"),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] {id} {msg}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
