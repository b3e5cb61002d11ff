//! Small least-squares helpers for decay fits.

/// Least-squares slope of ys against xs.
pub fn linear_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Slope of ln y against x; None unless every y is positive and finite.
pub fn log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if ys.iter().any(|y| !(y.is_finite() && *y > 0.0)) {
        return None;
    }
    let logs: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_slope(xs, &logs)
}
