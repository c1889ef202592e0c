//! Poisson probabilities on a window of indices.
//!
//! Small rates use the forward recurrence `P(k) = P(k-1) · y / k` seeded at
//! `e^{-y}`. Above [`LOG_SPACE_THRESHOLD`] the seed `e^{-y}` underflows, so the
//! recurrence is started at the mode from a log-space value and run in both
//! directions. Either way the window is renormalised to unit mass; the mass
//! outside the window is below `e^{-70}`.

/// Above this rate `e^{-y}` is too close to the subnormal range to seed from.
pub const LOG_SPACE_THRESHOLD: f64 = 700.0;

/// Number of standard deviations kept on each side of the mean.
const TAIL_SIGMAS: f64 = 12.0;
/// Additive slack on the window, dominating for small rates.
const TAIL_SLACK: f64 = 50.0;

/// Probabilities `P(start), …, P(start + len - 1)` of a Poisson(y) law.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonWindow {
    pub start: usize,
    pub probs: Vec<f64>,
}

impl PoissonWindow {
    pub fn end(&self) -> usize {
        self.start + self.probs.len() - 1
    }

    /// Probability at absolute index `k`, zero outside the window.
    pub fn get(&self, k: usize) -> f64 {
        if k < self.start {
            return 0.0;
        }
        self.probs.get(k - self.start).copied().unwrap_or(0.0)
    }
}

/// Hard upper index of the window: `ceil(y + 12 √y + 50)`.
pub fn upper_cap(y: f64) -> usize {
    (y + TAIL_SIGMAS * y.sqrt() + TAIL_SLACK).ceil() as usize
}

fn lower_cap(y: f64) -> usize {
    (y - TAIL_SIGMAS * y.sqrt() - TAIL_SLACK).floor().max(0.0) as usize
}

/// `ln P(m)` for integer `m ≥ 1` near `y`, with Stirling's series for `ln m!`.
///
/// Written as `m ln(y/m) + (m - y) - ½ ln(2πm) - series` so that the two
/// large terms of `-y + m ln y - ln m!` cancel analytically.
fn ln_pmf_near_mode(m: f64, y: f64) -> f64 {
    let inv = 1.0 / m;
    let inv2 = inv * inv;
    let series = inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
    m * ((y - m) / m).ln_1p() + (m - y) - 0.5 * (2.0 * std::f64::consts::PI * m).ln() - series
}

pub fn poisson_window(y: f64) -> PoissonWindow {
    debug_assert!(y >= 0.0 && y.is_finite());
    let hi = upper_cap(y);
    let mut probs;
    let start;
    if y <= LOG_SPACE_THRESHOLD {
        start = 0;
        probs = Vec::with_capacity(hi + 1);
        let mut p = (-y).exp();
        probs.push(p);
        for k in 1..=hi {
            p *= y / k as f64;
            probs.push(p);
        }
    } else {
        start = lower_cap(y);
        let mode = y.floor() as usize;
        probs = vec![0.0; hi - start + 1];
        let seed = ln_pmf_near_mode(mode as f64, y).exp();
        probs[mode - start] = seed;
        let mut p = seed;
        for k in (start..mode).rev() {
            // P(k) = P(k+1) · (k+1) / y
            p *= (k + 1) as f64 / y;
            probs[k - start] = p;
        }
        p = seed;
        for k in mode + 1..=hi {
            p *= y / k as f64;
            probs[k - start] = p;
        }
    }
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    PoissonWindow { start, probs }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_factorial_direct(m: usize) -> f64 {
        (1..=m).map(|i| (i as f64).ln()).sum()
    }

    #[test]
    fn point_mass_at_zero() {
        let w = poisson_window(0.0);
        assert_eq!(w.start, 0);
        assert_eq!(w.probs[0], 1.0);
        assert!(w.probs[1..].iter().all(|&p| p == 0.0));
    }

    #[test]
    fn small_rate_matches_closed_form() {
        let y = 3.5_f64;
        let w = poisson_window(y);
        for k in 0..20 {
            let direct = (-y + k as f64 * y.ln() - ln_factorial_direct(k)).exp();
            assert!((w.get(k) - direct).abs() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn log_space_seed_agrees_with_direct_log() {
        for &(m, y) in &[(800usize, 800.3_f64), (5000, 5000.9), (1000, 1000.0)] {
            let direct = -y + m as f64 * y.ln() - ln_factorial_direct(m);
            let seeded = ln_pmf_near_mode(m as f64, y);
            assert!(
                (direct - seeded).abs() < 1e-9,
                "m={m}: {direct} vs {seeded}"
            );
        }
    }

    #[test]
    fn both_paths_agree_at_threshold() {
        let y = LOG_SPACE_THRESHOLD;
        let a = poisson_window(y);
        let b = poisson_window(y + 1e-9);
        for k in 650..750 {
            let rel = (a.get(k) - b.get(k)).abs() / a.get(k);
            assert!(rel < 1e-8, "k={k} rel={rel}");
        }
    }

    #[test]
    fn huge_rate_is_finite_and_normalised() {
        let w = poisson_window(1e6);
        assert!(w.probs.iter().all(|p| p.is_finite() && *p >= 0.0));
        let total: f64 = w.probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let mean: f64 = w
            .probs
            .iter()
            .enumerate()
            .map(|(i, p)| (w.start + i) as f64 * p)
            .sum();
        assert!((mean - 1e6).abs() < 1e-3);
    }
}
