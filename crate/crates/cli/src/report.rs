//! Versioned JSON reports. Floats are written with 17 significant digits so
//! that parsing a report and writing it again reproduces it byte for byte.

use std::collections::BTreeMap;
use std::io;

use adsmass::charges::{ChargeLimit, QEntries};
use adsmass::initial_data::{BoundaryVector, DecSampleReport, IntegrabilityReport};
use adsmass::positivity::{
    ComponentInequalities, MinorsReport, NormalForm, PsdReport, ReducedInequality, Verdict,
};
use adsmass::spin3::Mat2;
use adsmass::verify::SuiteReport;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

pub const SCHEMA: u32 = 1;

/// Pretty-printing formatter that writes every f64 as `{:.16e}`.
struct ReportFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for ReportFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes a report; non-finite floats become `null`.
pub fn to_json<T: Serialize>(report: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, ReportFormatter(PrettyFormatter::new()));
    report.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixEntries {
    pub re: [[f64; 2]; 2],
    pub im: [[f64; 2]; 2],
}

impl From<&Mat2> for MatrixEntries {
    fn from(m: &Mat2) -> Self {
        MatrixEntries {
            re: [[m[(0, 0)].re, m[(0, 1)].re], [m[(1, 0)].re, m[(1, 1)].re]],
            im: [[m[(0, 0)].im, m[(0, 1)].im], [m[(1, 0)].im, m[(1, 1)].im]],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalFormEntry {
    pub m0: f64,
    pub n1: f64,
    pub r1: f64,
    pub r2: f64,
    pub transform: MatrixEntries,
    /// Largest deviation of the transformed input from the representative.
    pub residual: f64,
}

impl NormalFormEntry {
    pub fn new(nf: &NormalForm, residual: f64) -> Self {
        NormalFormEntry {
            m0: nf.m0,
            n1: nf.n1,
            r1: nf.r1,
            r2: nf.r2,
            transform: MatrixEntries::from(nf.transform.matrix()),
            residual,
        }
    }
}

/// Components of Ξ = N + iR with N = Σ n_j σ_j and R = Σ r_j σ_j.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiComponents {
    pub n: [f64; 3],
    pub r: [f64; 3],
}

/// Positivity analysis of a 4×4 form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivitySection {
    pub q: QEntries,
    pub psd: PsdReport,
    pub minors: MinorsReport,
    pub component_inequalities: ComponentInequalities,
    pub normal_form: Option<NormalFormEntry>,
    /// Why no normal form was computed.
    pub normal_form_note: Option<String>,
    pub reduced_inequality: Option<ReducedInequality>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureInfo {
    pub polar_nodes: usize,
    pub azimuth_nodes: usize,
    pub design_degree: usize,
    pub self_test_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecSummary {
    pub satisfied: usize,
    pub marginal: usize,
    pub violated: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub seed: u64,
    /// Smallest scalar_part − vector_norm over the samples.
    pub worst_gap: Option<f64>,
}

impl DecSummary {
    pub fn new(rep: &DecSampleReport, r_min: f64, r_max: f64, seed: u64) -> Self {
        DecSummary {
            satisfied: rep.satisfied,
            marginal: rep.marginal,
            violated: rep.violated,
            r_min,
            r_max,
            seed,
            worst_gap: rep
                .samples
                .iter()
                .map(|s| s.scalar_part - s.vector_norm)
                .reduce(f64::min),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataInfo {
    pub family: String,
    pub params: BTreeMap<String, String>,
    pub label: String,
    pub n: usize,
    pub tau: f64,
    pub derivative_mode: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargesReport {
    pub schema: u32,
    pub command: String,
    pub data: DataInfo,
    pub schedule: Vec<f64>,
    pub tol: f64,
    pub quadrature: QuadratureInfo,
    pub charges: Vec<ChargeLimit>,
    pub converged: bool,
    pub mass_vector: Vec<f64>,
    pub angular: Vec<f64>,
    pub xi: Option<XiComponents>,
    pub positivity: Option<PositivitySection>,
    /// Q from the 16 polarization charges.
    pub q_polarization: Option<QEntries>,
    pub q_polarization_converged: Option<bool>,
    /// Largest entry difference between the two constructions of Q.
    pub q_cross_path_difference: Option<f64>,
    pub dec: DecSummary,
    pub integrability: IntegrabilityReport,
    pub boundary: Option<BoundaryVector>,
    /// H(x_0)/m for schwarzschild_ads with m > 0.
    pub c3: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub command: String,
    pub seed: u64,
    pub samples: usize,
    pub sweep_samples: usize,
    pub corrupt_theta: Option<f64>,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizeReport {
    pub schema: u32,
    pub command: String,
    pub mass_vector: Vec<f64>,
    pub xi: XiComponents,
    pub positivity: PositivitySection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecCheckReport {
    pub schema: u32,
    pub command: String,
    pub data: DataInfo,
    pub summary: DecSummary,
    pub samples: DecSampleReport,
}
