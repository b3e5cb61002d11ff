//! Closed-form derivatives of products of single-variable factors.
//!
//! Every coordinate expression of the background (embedding, metric diagonal)
//! is a product in which each chart coordinate appears at most once, so first
//! and second partials follow from the one-variable derivatives alone.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Factor {
    Sin,
    Cos,
    Sinh,
    Cosh,
    SinSq,
    SinhSq,
}

impl Factor {
    /// Value, first and second derivative at `x`.
    fn eval(self, x: f64) -> [f64; 3] {
        match self {
            Factor::Sin => {
                let (s, c) = x.sin_cos();
                [s, c, -s]
            }
            Factor::Cos => {
                let (s, c) = x.sin_cos();
                [c, -s, -c]
            }
            Factor::Sinh => {
                let (sh, ch) = (x.sinh(), x.cosh());
                [sh, ch, sh]
            }
            Factor::Cosh => {
                let (sh, ch) = (x.sinh(), x.cosh());
                [ch, sh, ch]
            }
            Factor::SinSq => {
                let (s, c) = x.sin_cos();
                [s * s, 2.0 * s * c, 2.0 * (c * c - s * s)]
            }
            Factor::SinhSq => {
                let (sh, ch) = (x.sinh(), x.cosh());
                [sh * sh, 2.0 * sh * ch, 2.0 * (ch * ch + sh * sh)]
            }
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Monomial {
    pub coeff: f64,
    pub factors: Vec<(usize, Factor)>,
}

/// Value with chart gradient and (flattened, row-major) chart Hessian.
#[derive(Clone, Debug)]
pub(crate) struct Jet {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
}

impl Monomial {
    pub fn new(factors: Vec<(usize, Factor)>) -> Self {
        debug_assert!({
            let mut seen: Vec<usize> = factors.iter().map(|f| f.0).collect();
            seen.sort_unstable();
            seen.windows(2).all(|w| w[0] != w[1])
        });
        Monomial {
            coeff: 1.0,
            factors,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.factors
            .iter()
            .fold(self.coeff, |acc, &(i, f)| acc * f.eval(x[i])[0])
    }

    /// Value and gradient; `hess` is filled only when `second` is set.
    pub fn jet(&self, x: &[f64], second: bool) -> Jet {
        let dim = x.len();
        let evals: Vec<[f64; 3]> = self.factors.iter().map(|&(i, f)| f.eval(x[i])).collect();
        let m = evals.len();
        let product_except = |skip_a: usize, skip_b: usize| -> f64 {
            (0..m)
                .filter(|&j| j != skip_a && j != skip_b)
                .fold(self.coeff, |acc, j| acc * evals[j][0])
        };
        let value = product_except(usize::MAX, usize::MAX);
        let mut grad = vec![0.0; dim];
        for (a, &(ia, _)) in self.factors.iter().enumerate() {
            grad[ia] = evals[a][1] * product_except(a, usize::MAX);
        }
        let mut hess = Vec::new();
        if second {
            hess = vec![0.0; dim * dim];
            for (a, &(ia, _)) in self.factors.iter().enumerate() {
                hess[ia * dim + ia] = evals[a][2] * product_except(a, usize::MAX);
                for (b, &(ib, _)) in self.factors.iter().enumerate().skip(a + 1) {
                    let v = evals[a][1] * evals[b][1] * product_except(a, b);
                    hess[ia * dim + ib] = v;
                    hess[ib * dim + ia] = v;
                }
            }
        }
        Jet { value, grad, hess }
    }
}

/// Unit direction ω(angles) on S^{n-1} as monomials in chart coordinates
/// (coordinate 0 is r, 1..n-2 are the polar angles, n-1 is the azimuth).
pub(crate) fn direction_monomials(n: usize) -> Vec<Monomial> {
    let azimuth = n - 1;
    let polar = 1..n - 1;
    let mut out = vec![Monomial::new(Vec::new()); n];
    let sines =
        |upto: usize| -> Vec<(usize, Factor)> { (1..=upto).map(|m| (m, Factor::Sin)).collect() };
    out[n - 1] = Monomial::new(vec![(1, Factor::Cos)]);
    for a in 2..n - 1 {
        let mut f = sines(n - 1 - a);
        f.push((n - a, Factor::Cos));
        out[a] = Monomial::new(f);
    }
    let mut f1 = sines(polar.end - 1);
    f1.push((azimuth, Factor::Sin));
    out[1] = Monomial::new(f1);
    let mut f0 = sines(polar.end - 1);
    f0.push((azimuth, Factor::Cos));
    out[0] = Monomial::new(f0);
    out
}

/// Hyperboloid embedding y = (cosh r, sinh r ω).
pub(crate) fn embedding_monomials(n: usize) -> Vec<Monomial> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(Monomial::new(vec![(0, Factor::Cosh)]));
    for w in direction_monomials(n) {
        let mut f = vec![(0, Factor::Sinh)];
        f.extend(w.factors);
        out.push(Monomial::new(f));
    }
    out
}

/// Diagonal of b: b_00 = 1, b_ll = sinh^2 r prod_{m<l} sin^2 x_m.
pub(crate) fn metric_diagonal_monomials(n: usize) -> Vec<Monomial> {
    let mut out = Vec::with_capacity(n);
    out.push(Monomial::new(Vec::new()));
    for l in 1..n {
        let mut f = vec![(0, Factor::SinhSq)];
        f.extend((1..l).map(|m| (m, Factor::SinSq)));
        out.push(Monomial::new(f));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_grad(m: &Monomial, x: &[f64], h: f64) -> Vec<f64> {
        (0..x.len())
            .map(|i| {
                let mut p = x.to_vec();
                let mut q = x.to_vec();
                p[i] += h;
                q[i] -= h;
                (m.value(&p) - m.value(&q)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn gradient_matches_differences() {
        let x = [0.7, 1.1, 0.4, 2.3];
        for m in embedding_monomials(4)
            .iter()
            .chain(metric_diagonal_monomials(4).iter())
        {
            let j = m.jet(&x, true);
            let g = fd_grad(m, &x, 1e-6);
            for i in 0..4 {
                assert!((j.grad[i] - g[i]).abs() < 1e-7, "{:?}", m);
                // Hessian row i by differencing the analytic gradient
                let mut p = x.to_vec();
                let mut q = x.to_vec();
                p[i] += 1e-6;
                q[i] -= 1e-6;
                let gp = m.jet(&p, false).grad;
                let gq = m.jet(&q, false).grad;
                for k in 0..4 {
                    let fd = (gp[k] - gq[k]) / 2e-6;
                    assert!((j.hess[i * 4 + k] - fd).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn direction_is_unit() {
        for n in 3..7 {
            let x: Vec<f64> = (0..n).map(|i| 0.3 + 0.37 * i as f64).collect();
            let s: f64 = direction_monomials(n)
                .iter()
                .map(|m| m.value(&x).powi(2))
                .sum();
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn three_dimensional_convention() {
        let (t, p) = (0.8_f64, 2.1_f64);
        let w: Vec<f64> = direction_monomials(3)
            .iter()
            .map(|m| m.value(&[1.0, t, p]))
            .collect();
        assert!((w[0] - t.sin() * p.cos()).abs() < 1e-15);
        assert!((w[1] - t.sin() * p.sin()).abs() < 1e-15);
        assert!((w[2] - t.cos()).abs() < 1e-15);
    }
}
