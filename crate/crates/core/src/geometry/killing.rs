use nalgebra::DMatrix;

use super::{embedding_jacobian, frame_at, ChartPoint};
use crate::error::{Error, Result};

const GENERATOR_TOL: f64 = 1e-10;

/// An element of so(n,1): Aᵀη + ηA = 0 with η = diag(−1, 1, …, 1).
#[derive(Clone, Debug, PartialEq)]
pub struct SoN1Generator {
    matrix: DMatrix<f64>,
}

fn eta(n1: usize) -> DMatrix<f64> {
    let mut e = DMatrix::identity(n1, n1);
    e[(0, 0)] = -1.0;
    e
}

impl SoN1Generator {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() < 4 {
            return Err(Error::Dimension {
                expected: 4,
                got: matrix.nrows(),
            });
        }
        let e = eta(matrix.nrows());
        let residual = (matrix.transpose() * &e + &e * &matrix).amax();
        if !(residual <= GENERATOR_TOL) {
            return Err(Error::InvalidGenerator { residual });
        }
        Ok(SoN1Generator { matrix })
    }

    pub fn zero(n: usize) -> Self {
        SoN1Generator {
            matrix: DMatrix::zeros(n + 1, n + 1),
        }
    }

    /// Boost A_{0i}, 1 ≤ i ≤ n.
    pub fn boost(n: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= n, "boost index out of range");
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m[(0, i)] = 1.0;
        m[(i, 0)] = 1.0;
        SoN1Generator { matrix: m }
    }

    /// Rotation A_{ij}, 1 ≤ i < j ≤ n, acting as y_i ∂_j − y_j ∂_i.
    pub fn rotation(n: usize, i: usize, j: usize) -> Self {
        assert!(1 <= i && i < j && j <= n, "rotation indices out of range");
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m[(i, j)] = -1.0;
        m[(j, i)] = 1.0;
        SoN1Generator { matrix: m }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Self::new(&self.matrix * &other.matrix - &other.matrix * &self.matrix)
    }

    /// Coordinates in [`generator_basis`] order.
    pub fn coefficients(&self) -> Vec<f64> {
        let n = self.dim();
        let mut c: Vec<f64> = (1..=n).map(|i| self.matrix[(0, i)]).collect();
        for i in 1..=n {
            for j in i + 1..=n {
                c.push(self.matrix[(j, i)]);
            }
        }
        c
    }

    pub fn from_coefficients(n: usize, coeffs: &[f64]) -> Result<Self> {
        let basis = generator_basis(n);
        if coeffs.len() != basis.len() {
            return Err(Error::Dimension {
                expected: basis.len(),
                got: coeffs.len(),
            });
        }
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for (c, b) in coeffs.iter().zip(&basis) {
            m += &b.matrix * *c;
        }
        Ok(SoN1Generator { matrix: m })
    }
}

/// Boosts A_{01}, …, A_{0n}, then rotations A_{ij} with i < j in lexicographic order.
pub fn generator_basis(n: usize) -> Vec<SoN1Generator> {
    let mut out: Vec<SoN1Generator> = (1..=n).map(|i| SoN1Generator::boost(n, i)).collect();
    for i in 1..=n {
        for j in i + 1..=n {
            out.push(SoN1Generator::rotation(n, i, j));
        }
    }
    out
}

/// Killing vector (chart components) and its b-dual 1-form.
#[derive(Clone, Debug, PartialEq)]
pub struct KillingField {
    pub vector: Vec<f64>,
    pub dual_form: Vec<f64>,
}

impl SoN1Generator {
    /// α_μ = q(∂_μ y, A y) without the frame lookup.
    pub(crate) fn dual_form(&self, p: &ChartPoint) -> Result<Vec<f64>> {
        let n = p.dim();
        if self.dim() != n {
            return Err(Error::Dimension {
                expected: n,
                got: self.dim(),
            });
        }
        let (y, dy) = embedding_jacobian(p);
        let ay: Vec<f64> = (0..=n)
            .map(|a| (0..=n).map(|b| self.matrix[(a, b)] * y[b]).sum())
            .collect();
        Ok(dy
            .iter()
            .map(|row| -row[0] * ay[0] + (1..=n).map(|a| row[a] * ay[a]).sum::<f64>())
            .collect())
    }
}

/// Restriction of the linear field y ↦ A y to the hyperboloid.
pub fn killing_field(a: &SoN1Generator, p: &ChartPoint) -> Result<KillingField> {
    let frame = frame_at(p)?;
    let dual_form = a.dual_form(p)?;
    let vector = frame.raise(&dual_form);
    Ok(KillingField { vector, dual_form })
}
