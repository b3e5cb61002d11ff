use std::path::Path;

use adsmass::charges::{
    energy_momentum_with_diagnostics, q_assemble_with_diagnostics, q_from_components,
    ChargeOptions, EnergyMomentum, QEntries,
};
use adsmass::initial_data::{
    boundary_k_vector, builtin_family, dec_sample, export_grid as sample_grid, integrability_probe,
    BoundaryData, DerivativeMode, FamilyParams, InitialData,
};
use adsmass::positivity::{
    component_inequalities, minors_check, normalize as normal_form, psd_oracle, reduced_inequality,
    DEFAULT_EPS,
};
use adsmass::verify::{run_suite, VerifyOptions, SUITES};
use adsmass::Error;
use nalgebra::DMatrix;

use crate::report::{
    to_json, ChargesReport, DataInfo, DecCheckReport, DecSummary, NormalFormEntry, NormalizeReport,
    PositivitySection, QuadratureInfo, VerifyReport, XiComponents, SCHEMA,
};
use crate::{ChargesArgs, DataArgs, DecCheckArgs, ExportGridArgs, NormalizeArgs, VerifyArgs};
use crate::{EXIT_CONFIG, EXIT_FAILURE, EXIT_PRECONDITION};

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidSchedule(_)
            | Error::InvalidParameter(_)
            | Error::UnknownFamily(_)
            | Error::DecayViolation(_)
            | Error::StepUnderflow(_)
            | Error::OutsideDomain { .. }
            | Error::Grid(_)
            | Error::Io(_)
            | Error::Json(_)
            | Error::Dimension { .. } => EXIT_CONFIG,
            Error::NotTimelike { .. } => EXIT_PRECONDITION,
            _ => EXIT_FAILURE,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = Result<u8, CliError>;

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::config(format!("{what}: `{t}` is not a finite number")))
        })
        .collect()
}

fn emit<T: serde::Serialize>(report: &T, out: Option<&Path>) -> Result<(), CliError> {
    let text = to_json(report).map_err(|e| CliError {
        code: EXIT_FAILURE,
        message: e.to_string(),
    })?;
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

struct LoadedData {
    data: InitialData,
    family: String,
    params: FamilyParams,
}

fn load_data(args: &DataArgs) -> Result<LoadedData, CliError> {
    let mut params = FamilyParams::new();
    for kv in &args.params {
        let (k, v) = kv.split_once('=').ok_or_else(|| {
            CliError::config(format!("parameter `{kv}` is not of the form key=value"))
        })?;
        if params
            .insert(k.trim().to_string(), v.trim().to_string())
            .is_some()
        {
            return Err(CliError::config(format!("parameter `{k}` given twice")));
        }
    }
    let family = match (&args.family, &args.grid) {
        (Some(_), Some(_)) => {
            return Err(CliError::config("give either --family or --grid, not both"))
        }
        (None, None) => return Err(CliError::config("one of --family or --grid is required")),
        (Some(f), None) => f.clone(),
        (None, Some(path)) => {
            params.insert("path".into(), path.display().to_string());
            "grid".into()
        }
    };
    let data = builtin_family(&family, &params)?;
    Ok(LoadedData {
        data,
        family,
        params,
    })
}

fn data_info(l: &LoadedData) -> DataInfo {
    DataInfo {
        family: l.family.clone(),
        params: l.params.clone(),
        label: l.data.label.clone(),
        n: l.data.dim(),
        tau: l.data.tau,
        derivative_mode: match l.data.mode {
            DerivativeMode::Analytic => "analytic".into(),
            DerivativeMode::FiniteDifference { step } => format!("fd(step={step:e})"),
        },
    }
}

fn xi_components(em: &EnergyMomentum) -> Result<XiComponents, CliError> {
    Ok(XiComponents {
        n: em.n_vector()?,
        r: em.r_vector()?,
    })
}

/// Q, minors, eigenvalue oracle and, for timelike future M, the normal form.
fn positivity_section(em: &EnergyMomentum) -> Result<PositivitySection, CliError> {
    let (m, xi) = em.matrices()?;
    let q = q_from_components(&m, &xi)?;
    let psd = psd_oracle(&q);
    let minors = minors_check(&q);
    let components = component_inequalities(em, DEFAULT_EPS)?;
    let (normal, note, reduced) = match normal_form(em) {
        Ok(nf) => {
            let residual = nf.residual(em)?;
            (
                Some(NormalFormEntry::new(&nf, residual)),
                None,
                Some(reduced_inequality(&nf)),
            )
        }
        Err(e @ Error::NotTimelike { .. }) => (None, Some(e.to_string()), None),
        Err(e) => return Err(e.into()),
    };
    let verdict = psd.verdict;
    Ok(PositivitySection {
        q: QEntries::from(&q),
        psd,
        minors,
        component_inequalities: components,
        normal_form: normal,
        normal_form_note: note,
        reduced_inequality: reduced,
        verdict,
    })
}

/// Sampling shell just outside the data domain.
fn default_r_min(data: &InitialData) -> f64 {
    let min = data.source.min_radius();
    if min > 0.0 {
        min + 0.25
    } else {
        0.5
    }
}

pub fn charges(args: &ChargesArgs) -> CliResult {
    let opts = ChargeOptions {
        schedule: parse_list(&args.schedule, "schedule")?,
        tol: args.tol,
        polar_nodes: args.polar_nodes,
        azimuth_nodes: args.azimuth_nodes,
        check_quadrature: args.check_quadrature,
    };
    opts.validate()?;
    let loaded = load_data(&args.data)?;
    let data = &loaded.data;
    let n = data.dim();

    let quad = opts.quadrature(n)?;
    let degree = quad.design_degree();
    let self_test_residual = quad.self_test(degree);
    let quad = quad.checked(1e-12)?;

    let boundary = match (&args.boundary_tr_k, &args.boundary_k_nu) {
        (Some(t), Some(k)) => {
            let bd = BoundaryData {
                tr_breve_k: *t,
                k_nu: parse_list(k, "boundary-k-nu")?,
            };
            Some(boundary_k_vector(&bd, &DMatrix::identity(n, n))?)
        }
        _ => None,
    };

    let (em, limits) = energy_momentum_with_diagnostics(data, &opts)?;
    let converged = limits.iter().all(|l| l.converged);

    let (xi, positivity, q_pol, q_pol_converged, cross) = if n == 3 {
        let section = positivity_section(&em)?;
        let assembly = q_assemble_with_diagnostics(data, &opts)?;
        let (m, x) = em.matrices()?;
        let qc = q_from_components(&m, &x)?;
        let diff = (qc.matrix() - assembly.q.matrix())
            .iter()
            .fold(0.0_f64, |a, z| a.max(z.norm()));
        (
            Some(xi_components(&em)?),
            Some(section),
            Some(QEntries::from(&assembly.q)),
            Some(assembly.limits.iter().all(|l| l.converged)),
            Some(diff),
        )
    } else {
        (None, None, None, None, None)
    };

    let r_min = default_r_min(data);
    let r_max = opts
        .schedule
        .last()
        .expect("validated schedule")
        .max(r_min + 1.0);
    let dec = dec_sample(data, args.dec_samples, args.seed, r_min, r_max)?;
    let integrability = integrability_probe(data, &opts.schedule, &quad)?;

    let c3 = if loaded.family == "schwarzschild_ads" {
        let m: f64 = loaded
            .params
            .get("m")
            .map_or(Ok(1.0), |s| s.parse())
            .unwrap_or(f64::NAN);
        (m > 0.0).then(|| em.mass_vector[0] / m)
    } else {
        None
    };

    let report = ChargesReport {
        schema: SCHEMA,
        command: "charges".into(),
        data: data_info(&loaded),
        schedule: opts.schedule.clone(),
        tol: opts.tol,
        quadrature: QuadratureInfo {
            polar_nodes: opts.polar_nodes,
            azimuth_nodes: opts.azimuth_nodes,
            design_degree: degree,
            self_test_residual,
        },
        charges: limits,
        converged,
        mass_vector: em.mass_vector.clone(),
        angular: em.angular.clone(),
        xi,
        positivity,
        q_polarization: q_pol,
        q_polarization_converged: q_pol_converged,
        q_cross_path_difference: cross,
        dec: DecSummary::new(&dec, r_min, r_max, args.seed),
        integrability,
        boundary,
        c3,
    };
    emit(&report, args.out.as_deref())?;
    if !converged || report.q_polarization_converged == Some(false) {
        let bad: Vec<&str> = report
            .charges
            .iter()
            .filter(|l| !l.converged)
            .map(|l| l.label.as_str())
            .collect();
        eprintln!(
            "error: charges did not converge: {}",
            if bad.is_empty() {
                "polarization".into()
            } else {
                bad.join(", ")
            }
        );
        return Ok(EXIT_FAILURE);
    }
    Ok(0)
}

pub fn verify(args: &VerifyArgs) -> CliResult {
    let opts = VerifyOptions {
        seed: args.seed,
        samples: args.samples,
        sweep_samples: args.sweep_samples,
        corrupt_theta: args.corrupt_theta,
    };
    let names: Vec<String> = if args.suites.is_empty() {
        SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        args.suites.clone()
    };
    let suites = names
        .iter()
        .map(|s| run_suite(s, &opts))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = suites.iter().all(|s| s.passed);
    for s in &suites {
        eprintln!(
            "[{}] {} ({} samples, max residual {:e})",
            if s.passed { "PASS" } else { "FAIL" },
            s.name,
            s.samples,
            s.max_residual
        );
    }
    let report = VerifyReport {
        schema: SCHEMA,
        command: "verify".into(),
        seed: args.seed,
        samples: args.samples,
        sweep_samples: args.sweep_samples,
        corrupt_theta: args.corrupt_theta,
        suites,
        passed,
    };
    emit(&report, args.out.as_deref())?;
    Ok(if passed { 0 } else { EXIT_FAILURE })
}

fn parse_energy_momentum(m: &str, xi: &str) -> Result<EnergyMomentum, CliError> {
    let m = parse_list(m, "m")?;
    let m: [f64; 4] = m
        .try_into()
        .map_err(|v: Vec<f64>| CliError::config(format!("--m needs 4 values, got {}", v.len())))?;
    let x = parse_list(xi, "xi")?;
    let (n, r) = match x.len() {
        6 => ([x[0], x[1], x[2]], [x[3], x[4], x[5]]),
        8 => {
            if x[0] != 0.0 || x[4] != 0.0 {
                return Err(CliError::config(
                    "N and R must be trace-free: their time components must vanish",
                ));
            }
            ([x[1], x[2], x[3]], [x[5], x[6], x[7]])
        }
        k => {
            return Err(CliError::config(format!(
                "--xi needs 6 or 8 values, got {k}"
            )))
        }
    };
    Ok(EnergyMomentum::from_vectors(m, n, r)?)
}

pub fn normalize(args: &NormalizeArgs) -> CliResult {
    let em = parse_energy_momentum(&args.m, &args.xi)?;
    let (m, _) = em.matrices()?;
    if !(m.det() > 0.0 && m.trace() > 0.0) {
        return Err(Error::NotTimelike {
            det: m.det(),
            trace: m.trace(),
        }
        .into());
    }
    let positivity = positivity_section(&em)?;
    if let Some(red) = &positivity.reduced_inequality {
        if red.verdict != positivity.psd.verdict {
            eprintln!(
                "warning: reduced inequality ({:?}) and eigenvalue oracle ({:?}) disagree",
                red.verdict, positivity.psd.verdict
            );
        }
    }
    let report = NormalizeReport {
        schema: SCHEMA,
        command: "normalize".into(),
        mass_vector: em.mass_vector.clone(),
        xi: xi_components(&em)?,
        positivity,
    };
    emit(&report, args.out.as_deref())?;
    Ok(0)
}

pub fn deccheck(args: &DecCheckArgs) -> CliResult {
    let loaded = load_data(&args.data)?;
    let r_min = args.r_min.unwrap_or_else(|| default_r_min(&loaded.data));
    let rep = dec_sample(&loaded.data, args.samples, args.seed, r_min, args.r_max)?;
    let report = DecCheckReport {
        schema: SCHEMA,
        command: "deccheck".into(),
        data: data_info(&loaded),
        summary: DecSummary::new(&rep, r_min, args.r_max, args.seed),
        samples: rep,
    };
    emit(&report, args.out.as_deref())?;
    Ok(if report.summary.violated == 0 {
        0
    } else {
        EXIT_FAILURE
    })
}

pub fn export_grid(args: &ExportGridArgs) -> CliResult {
    let loaded = load_data(&args.data)?;
    let radii = parse_list(&args.radii, "radii")?;
    let grid = sample_grid(&loaded.data, &radii, args.n_theta, args.n_phi)?;
    grid.write(&args.out)?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_parsing() {
        assert_eq!(parse_list("4, 5,6", "x").unwrap(), vec![4.0, 5.0, 6.0]);
        assert_eq!(parse_list("4,x", "x").unwrap_err().code, EXIT_CONFIG);
        assert_eq!(parse_list("inf", "x").unwrap_err().code, EXIT_CONFIG);
    }

    #[test]
    fn xi_forms_agree() {
        let a = parse_energy_momentum("1,0,0,0", "0.1,0.2,0.3,0.4,0.5,0.6").unwrap();
        let b = parse_energy_momentum("1,0,0,0", "0,0.1,0.2,0.3,0,0.4,0.5,0.6").unwrap();
        assert_eq!(a, b);
        assert_eq!(
            parse_energy_momentum("1,0,0,0", "1,0,0,0,0,0,0,0")
                .unwrap_err()
                .code,
            EXIT_CONFIG
        );
    }

    #[test]
    fn error_codes() {
        assert_eq!(
            CliError::from(Error::NotTimelike {
                det: -1.0,
                trace: 0.0
            })
            .code,
            EXIT_PRECONDITION
        );
        assert_eq!(
            CliError::from(Error::InvalidSchedule("x".into())).code,
            EXIT_CONFIG
        );
        assert_eq!(
            CliError::from(Error::NonConvergence {
                label: "x0".into(),
                reason: String::new()
            })
            .code,
            EXIT_FAILURE
        );
    }
}
