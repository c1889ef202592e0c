//! Least-squares slopes on log-log data.

/// Slope of the least-squares line through `(ln x_i, ln y_i)`.
///
/// `None` with fewer than three points or any non-positive coordinate.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return None;
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0 && v.is_finite())) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law_exponent() {
        let xs = [10.0, 100.0, 1000.0, 10_000.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.7)).collect();
        assert!((log_log_slope(&xs, &ys).unwrap() + 0.7).abs() < 1e-12);
    }

    #[test]
    fn refuses_degenerate_input() {
        assert_eq!(log_log_slope(&[1.0, 2.0], &[1.0, 2.0]), None);
        assert_eq!(log_log_slope(&[1.0, 2.0, 3.0], &[1.0, 0.0, 2.0]), None);
        assert_eq!(log_log_slope(&[2.0, 2.0, 2.0], &[1.0, 3.0, 2.0]), None);
    }
}
