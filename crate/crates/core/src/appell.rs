//! Generating functions, Appell polynomials and the normalised kernel weights.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::poisson::{poisson_window, upper_cap};

/// Polynomial generating function `g(u) = a_0 + a_1 u + … + a_M u^M`.
///
/// The derived constants `g(1)`, `g'(1)` and `g''(1)` are exact finite sums
/// of the coefficients and are fixed at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GfSpec", into = "GfSpec")]
pub struct GeneratingFunction {
    coeffs: Vec<f64>,
    g1: f64,
    g1p: f64,
    g1pp: f64,
}

/// Config-file shape: `{"coeffs": [a0, a1, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GfSpec {
    coeffs: Vec<f64>,
}

impl TryFrom<GfSpec> for GeneratingFunction {
    type Error = LabError;

    fn try_from(spec: GfSpec) -> Result<Self> {
        GeneratingFunction::new(spec.coeffs)
    }
}

impl From<GeneratingFunction> for GfSpec {
    fn from(gf: GeneratingFunction) -> Self {
        GfSpec { coeffs: gf.coeffs }
    }
}

impl GeneratingFunction {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(LabError::EmptyCoefficients);
        }
        if let Some(i) = coeffs.iter().position(|a| !a.is_finite()) {
            return Err(LabError::NonFiniteCoefficient(i));
        }
        let g1: f64 = coeffs.iter().sum();
        if g1 == 0.0 {
            return Err(LabError::ZeroG1);
        }
        let g1p = coeffs.iter().enumerate().map(|(i, a)| i as f64 * a).sum();
        let g1pp = coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| (i * i.saturating_sub(1)) as f64 * a)
            .sum();
        Ok(Self {
            coeffs,
            g1,
            g1p,
            g1pp,
        })
    }

    /// `g ≡ 1`, the classical Szász–Mirakjan case.
    pub fn szasz() -> Self {
        Self::new(vec![1.0]).expect("constant generating function")
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Highest coefficient index `M`.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn g1(&self) -> f64 {
        self.g1
    }

    pub fn g1p(&self) -> f64 {
        self.g1p
    }

    pub fn g1pp(&self) -> f64 {
        self.g1pp
    }

    /// `g'(1) / g(1)`.
    pub fn first_ratio(&self) -> f64 {
        self.g1p / self.g1
    }

    /// `g''(1) / g(1)`.
    pub fn second_ratio(&self) -> f64 {
        self.g1pp / self.g1
    }

    /// Horner evaluation of `g(u)`.
    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &a| acc * u + a)
    }
}

/// `x^m / m!` as a running product, which neither overflows nor loses the
/// small-`x` regime the way `powi` followed by a factorial would.
fn power_over_factorial(x: f64, m: usize) -> f64 {
    (1..=m).fold(1.0, |acc, l| acc * (x / l as f64))
}

/// `p_k(x) = Σ_{i=0}^{min(k,M)} a_i x^{k-i} / (k-i)!`.
pub fn appell_eval(gf: &GeneratingFunction, k: usize, x: f64) -> f64 {
    gf.coeffs
        .iter()
        .take(k + 1)
        .enumerate()
        .map(|(i, &a)| a * power_over_factorial(x, k - i))
        .sum()
}

/// Ascending monomial coefficients of `p_k`: entry `m` is `a_{k-m} / m!`.
pub fn appell_coefficients(gf: &GeneratingFunction, k: usize) -> Vec<f64> {
    let mut out = vec![0.0; k + 1];
    let mut inv_factorial = 1.0;
    for (m, slot) in out.iter_mut().enumerate() {
        if m > 0 {
            inv_factorial /= m as f64;
        }
        if let Some(&a) = gf.coeffs.get(k - m) {
            *slot = a * inv_factorial;
        }
    }
    out
}

/// `|g(u) e^{ux} - Σ_{k≤K} p_k(x) u^k|`.
pub fn identity_residual(gf: &GeneratingFunction, u: f64, x: f64, terms: usize) -> f64 {
    let lhs = gf.eval(u) * (u * x).exp();
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut u_pow = 1.0;
    for k in 0..=terms {
        let term = appell_eval(gf, k, x) * u_pow;
        // Neumaier summation; the partial sums reach e^{ux} g(u).
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        u_pow *= u;
    }
    (lhs - (sum + comp)).abs()
}

/// Wood's criterion: the operators are positive iff every `a_k / g(1) ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    pub is_positive: bool,
    pub offending_index: Option<usize>,
    pub ratios: Vec<f64>,
}

impl PositivityReport {
    /// Criterion on a raw coefficient list, which may not form a valid
    /// [`GeneratingFunction`].
    pub fn from_coeffs(coeffs: &[f64]) -> Result<Self> {
        let g1: f64 = coeffs.iter().sum();
        if g1 == 0.0 {
            return Err(LabError::ZeroG1);
        }
        let ratios: Vec<f64> = coeffs.iter().map(|a| a / g1).collect();
        let offending_index = ratios.iter().position(|&r| r < 0.0);
        Ok(Self {
            is_positive: offending_index.is_none(),
            offending_index,
            ratios,
        })
    }

    fn into_result(self) -> Result<Self> {
        match self.offending_index {
            Some(index) => Err(LabError::NotPositive {
                index,
                ratio: self.ratios[index],
            }),
            None => Ok(self),
        }
    }
}

pub fn positivity_check(gf: &GeneratingFunction) -> PositivityReport {
    PositivityReport::from_coeffs(&gf.coeffs).expect("g(1) != 0 is a type invariant")
}

/// Truncated kernel weights `w_k(y) = e^{-y} p_k(y) / g(1)`.
///
/// `weights[i]` is `w_{start + i}`; everything before `start` is below the
/// double-precision floor and is counted in `tail_mass` together with the
/// right tail.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    pub y: f64,
    pub start: usize,
    pub weights: Vec<f64>,
    pub tail_mass: f64,
    pub epsilon: f64,
}

impl WeightTable {
    /// Last retained index `K`.
    pub fn last_index(&self) -> usize {
        self.start + self.weights.len() - 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, &w)| (self.start + i, w))
    }

    pub fn retained_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Mixture weights `w_k = Σ_i (a_i / g(1)) · Pois(k - i; y)`.
///
/// The truncation index is the first `K` with cumulative mass `≥ 1 - ε`,
/// never beyond `ceil(y + 12√y + 50 + M)`.
pub fn weight_table(gf: &GeneratingFunction, y: f64, epsilon: f64) -> Result<WeightTable> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(LabError::InvalidEpsilon(epsilon));
    }
    if !(y >= 0.0 && y.is_finite()) {
        return Err(LabError::InvalidArgument(format!(
            "kernel argument y = {y} must be finite and >= 0"
        )));
    }
    let report = positivity_check(gf).into_result()?;
    let ratios = report.ratios;
    let pois = poisson_window(y);
    let cap = upper_cap(y) + gf.degree();
    let start = pois.start;

    let mut weights = Vec::with_capacity(cap - start + 1);
    let mut cumulative = 0.0;
    for k in start..=cap {
        let w: f64 = ratios
            .iter()
            .enumerate()
            .take(k + 1)
            .map(|(i, r)| r * pois.get(k - i))
            .sum();
        weights.push(w);
        cumulative += w;
        if cumulative >= 1.0 - epsilon {
            break;
        }
    }
    let tail_mass = (1.0 - cumulative).max(0.0);
    Ok(WeightTable {
        y,
        start,
        weights,
        tail_mass,
        epsilon,
    })
}
