//! Test functions on `[0, ∞)` with the analytic metadata the experiments need:
//! exponential-type growth constants, exact cell integrals, sup norms of the
//! first two derivatives, Lipschitz constants and `ρ`-weighted tail bounds.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFunction {
    /// `x^degree`.
    Monomial { degree: u32 },
    /// `e^{c x}`.
    Exp { c: f64 },
    /// `|x - c|`.
    AbsShift { c: f64 },
    /// `sin(c x)`.
    Sin { c: f64 },
    /// Piecewise-linear interpolation through `(x, y)` samples with strictly
    /// increasing `x`, held constant outside the sampled range.
    Tabulated { samples: Vec<(f64, f64)> },
    /// `min(x, cap)^degree`, a bounded stand-in for a monomial.
    ClampedMonomial { degree: u32, cap: f64 },
    /// `x^degree e^{c x}`. Integrated by quadrature.
    MonomialExp { degree: u32, c: f64 },
    /// `Σ coef · f`.
    Linear { terms: Vec<Term> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coef: f64,
    pub f: TestFunction,
}

/// `|f(x)| ≤ beta · e^{alpha x}` on `[0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Growth {
    pub alpha: f64,
    pub beta: f64,
}

impl Growth {
    pub fn majorant(&self, t: f64) -> f64 {
        self.beta * (self.alpha * t).exp()
    }
}

/// `sup_{x ≥ 0} x^m e^{-r x} = (m / (r e))^m` for `r > 0`.
fn sup_power_exp(m: u32, r: f64) -> f64 {
    if m == 0 {
        1.0
    } else {
        (m as f64 / (r * std::f64::consts::E)).powi(m as i32)
    }
}

/// `|x - c|` has antiderivative `(x - c)|x - c| / 2`.
fn abs_antiderivative(t: f64, c: f64) -> f64 {
    let d = t - c;
    0.5 * d * d.abs()
}

/// `∫_lo^hi t^j dt` with the difference of powers factored out, so narrow
/// cells far from the origin keep their relative accuracy.
fn monomial_integral(j: u32, lo: f64, hi: f64) -> f64 {
    let mut sum = 0.0;
    let mut hi_pow = 1.0;
    for a in 0..=j {
        sum += hi_pow * lo.powi((j - a) as i32);
        hi_pow *= hi;
    }
    (hi - lo) * sum / (j as f64 + 1.0)
}

impl TestFunction {
    pub fn monomial(degree: u32) -> Self {
        TestFunction::Monomial { degree }
    }

    pub fn constant(value: f64) -> Self {
        TestFunction::Linear {
            terms: vec![Term {
                coef: value,
                f: TestFunction::monomial(0),
            }],
        }
    }

    /// The weight `ρ(x) = 1 + x²`.
    pub fn rho() -> Self {
        TestFunction::Linear {
            terms: vec![
                Term {
                    coef: 1.0,
                    f: TestFunction::monomial(0),
                },
                Term {
                    coef: 1.0,
                    f: TestFunction::monomial(2),
                },
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::InvalidArgument(msg));
        match self {
            TestFunction::Exp { c } | TestFunction::AbsShift { c } | TestFunction::Sin { c } => {
                if !c.is_finite() {
                    return bad(format!("{}: parameter must be finite", self.label()));
                }
            }
            TestFunction::MonomialExp { c, .. } => {
                if !c.is_finite() {
                    return bad(format!("{}: rate must be finite", self.label()));
                }
            }
            TestFunction::ClampedMonomial { cap, .. } => {
                if !(cap.is_finite() && *cap > 0.0) {
                    return bad(format!("clamped_monomial: cap {cap} must be positive"));
                }
            }
            TestFunction::Tabulated { samples } => {
                if samples.is_empty() {
                    return bad("tabulated: no samples".into());
                }
                if samples
                    .iter()
                    .any(|(x, y)| !x.is_finite() || !y.is_finite())
                {
                    return bad("tabulated: non-finite sample".into());
                }
                if samples.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return bad("tabulated: abscissae must be strictly increasing".into());
                }
            }
            TestFunction::Linear { terms } => {
                if terms.is_empty() {
                    return bad("linear: no terms".into());
                }
                for t in terms {
                    if !t.coef.is_finite() {
                        return bad("linear: non-finite coefficient".into());
                    }
                    t.f.validate()?;
                }
            }
            TestFunction::Monomial { .. } => {}
        }
        Ok(())
    }

    /// Short comma-free identifier used in report rows.
    pub fn label(&self) -> String {
        match self {
            TestFunction::Monomial { degree } => format!("monomial({degree})"),
            TestFunction::Exp { c } => format!("exp({c})"),
            TestFunction::AbsShift { c } => format!("abs_shift({c})"),
            TestFunction::Sin { c } => format!("sin({c})"),
            TestFunction::Tabulated { samples } => format!("tabulated[{}]", samples.len()),
            TestFunction::ClampedMonomial { degree, cap } => {
                format!("clamped_monomial({degree};{cap})")
            }
            TestFunction::MonomialExp { degree, c } => format!("monomial_exp({degree};{c})"),
            TestFunction::Linear { terms } => terms
                .iter()
                .map(|t| format!("{}*{}", t.coef, t.f.label()))
                .collect::<Vec<_>>()
                .join("+"),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            TestFunction::Monomial { degree } => x.powi(*degree as i32),
            TestFunction::Exp { c } => (c * x).exp(),
            TestFunction::AbsShift { c } => (x - c).abs(),
            TestFunction::Sin { c } => (c * x).sin(),
            TestFunction::Tabulated { samples } => interpolate(samples, x),
            TestFunction::ClampedMonomial { degree, cap } => x.min(*cap).powi(*degree as i32),
            TestFunction::MonomialExp { degree, c } => x.powi(*degree as i32) * (c * x).exp(),
            TestFunction::Linear { terms } => terms.iter().map(|t| t.coef * t.f.eval(x)).sum(),
        }
    }

    pub fn growth(&self) -> Growth {
        let g = |alpha: f64, beta: f64| Growth { alpha, beta };
        match self {
            TestFunction::Monomial { degree: 0 } => g(0.0, 1.0),
            TestFunction::Monomial { degree } => g(1.0, sup_power_exp(*degree, 1.0)),
            TestFunction::Exp { c } => g(c.max(0.0), 1.0),
            TestFunction::AbsShift { c } => g(1.0, 1.0 + c.abs()),
            TestFunction::Sin { .. } => g(0.0, 1.0),
            TestFunction::Tabulated { samples } => g(0.0, max_abs_sample(samples)),
            TestFunction::ClampedMonomial { degree, cap } => g(0.0, cap.powi(*degree as i32)),
            TestFunction::MonomialExp { degree, c } if *c < 0.0 => {
                g(0.0, sup_power_exp(*degree, -c))
            }
            TestFunction::MonomialExp { degree, c } => g(c + 1.0, sup_power_exp(*degree, 1.0)),
            TestFunction::Linear { terms } => terms.iter().fold(g(0.0, 0.0), |acc, t| {
                let part = t.f.growth();
                g(
                    acc.alpha.max(part.alpha),
                    acc.beta + t.coef.abs() * part.beta,
                )
            }),
        }
    }

    /// Closed-form `∫_lo^hi f(t) dt`, or `None` when the function needs
    /// quadrature.
    pub fn integral(&self, lo: f64, hi: f64) -> Option<f64> {
        match self {
            TestFunction::Monomial { degree } => Some(monomial_integral(*degree, lo, hi)),
            TestFunction::Exp { c } => Some(if *c == 0.0 {
                hi - lo
            } else {
                (c * lo).exp() * (c * (hi - lo)).exp_m1() / c
            }),
            TestFunction::AbsShift { c } => {
                Some(abs_antiderivative(hi, *c) - abs_antiderivative(lo, *c))
            }
            TestFunction::Sin { c } => Some(if *c == 0.0 {
                0.0
            } else {
                // cos(c lo) - cos(c hi) = 2 sin(c (lo + hi)/2) sin(c (hi - lo)/2)
                2.0 * (0.5 * c * (lo + hi)).sin() * (0.5 * c * (hi - lo)).sin() / c
            }),
            TestFunction::Tabulated { samples } => Some(piecewise_linear_integral(samples, lo, hi)),
            TestFunction::ClampedMonomial { degree, cap } => {
                let flat = cap.powi(*degree as i32);
                Some(if hi <= *cap {
                    monomial_integral(*degree, lo, hi)
                } else if lo >= *cap {
                    flat * (hi - lo)
                } else {
                    monomial_integral(*degree, lo, *cap) + flat * (hi - cap)
                })
            }
            TestFunction::MonomialExp { .. } => None,
            TestFunction::Linear { terms } => terms
                .iter()
                .map(|t| t.f.integral(lo, hi).map(|v| t.coef * v))
                .sum(),
        }
    }

    pub fn antiderivative_known(&self) -> bool {
        self.integral(0.0, 1.0).is_some()
    }

    /// Upper bounds for `(‖f‖, ‖f'‖, ‖f''‖)` over `[0, ∞)`, when `f ∈ C_B²`.
    pub fn sup_norms(&self) -> Option<[f64; 3]> {
        match self {
            TestFunction::Monomial { degree: 0 } => Some([1.0, 0.0, 0.0]),
            TestFunction::Exp { c } if *c <= 0.0 => Some([1.0, c.abs(), c * c]),
            TestFunction::Sin { c } => Some([1.0, c.abs(), c * c]),
            TestFunction::MonomialExp { degree: 0, c } if *c == 0.0 => Some([1.0, 0.0, 0.0]),
            TestFunction::MonomialExp { degree, c } if *c < 0.0 => {
                let r = -c;
                let j = *degree;
                let s = |m: i64| {
                    if m < 0 {
                        0.0
                    } else {
                        sup_power_exp(m as u32, r)
                    }
                };
                let jf = j as f64;
                let m = j as i64;
                Some([
                    s(m),
                    jf * s(m - 1) + r * s(m),
                    jf * (jf - 1.0) * s(m - 2) + 2.0 * jf * r * s(m - 1) + r * r * s(m),
                ])
            }
            TestFunction::Linear { terms } => terms.iter().try_fold([0.0; 3], |acc, t| {
                let n = t.f.sup_norms()?;
                let a = t.coef.abs();
                Some([acc[0] + a * n[0], acc[1] + a * n[1], acc[2] + a * n[2]])
            }),
            _ => None,
        }
    }

    pub fn derivatives_known(&self) -> bool {
        self.sup_norms().is_some()
    }

    /// Upper bound for `sup_{x ≥ 0} |f(x)|`, if finite.
    pub fn sup_abs(&self) -> Option<f64> {
        if let Some([s, _, _]) = self.sup_norms() {
            return Some(s);
        }
        match self {
            TestFunction::Tabulated { samples } => Some(max_abs_sample(samples)),
            TestFunction::ClampedMonomial { degree, cap } => Some(cap.powi(*degree as i32)),
            TestFunction::Linear { terms } => terms
                .iter()
                .map(|t| t.f.sup_abs().map(|s| t.coef.abs() * s))
                .sum(),
            _ => None,
        }
    }

    /// Global Lipschitz constant on `[0, ∞)`, if finite.
    pub fn lipschitz(&self) -> Option<f64> {
        match self {
            TestFunction::Monomial { degree: 0 } => Some(0.0),
            TestFunction::Monomial { degree: 1 } => Some(1.0),
            TestFunction::Monomial { .. } => None,
            TestFunction::Exp { c } if *c <= 0.0 => Some(c.abs()),
            TestFunction::Exp { .. } => None,
            TestFunction::AbsShift { .. } => Some(1.0),
            TestFunction::Sin { c } => Some(c.abs()),
            TestFunction::Tabulated { samples } => Some(
                samples
                    .windows(2)
                    .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
                    .fold(0.0, f64::max),
            ),
            TestFunction::ClampedMonomial { degree: 0, .. } => Some(0.0),
            TestFunction::ClampedMonomial { degree, cap } => {
                Some(*degree as f64 * cap.powi(*degree as i32 - 1))
            }
            TestFunction::MonomialExp { .. } => self.sup_norms().map(|n| n[1]),
            TestFunction::Linear { terms } => terms
                .iter()
                .map(|t| t.f.lipschitz().map(|l| t.coef.abs() * l))
                .sum(),
        }
    }

    /// Coefficients `[c0, c1, c2]` when `f` is a polynomial of degree ≤ 2.
    pub fn quadratic_coeffs(&self) -> Option<[f64; 3]> {
        match self {
            TestFunction::Monomial { degree } if *degree <= 2 => {
                let mut c = [0.0; 3];
                c[*degree as usize] = 1.0;
                Some(c)
            }
            TestFunction::Linear { terms } => terms.iter().try_fold([0.0; 3], |acc, t| {
                let q = t.f.quadratic_coeffs()?;
                Some([
                    acc[0] + t.coef * q[0],
                    acc[1] + t.coef * q[1],
                    acc[2] + t.coef * q[2],
                ])
            }),
            _ => None,
        }
    }

    /// `K_f = lim_{x→∞} f(x) / (1 + x²)`; `None` when the limit does not
    /// exist or is infinite, i.e. `f ∉ C_ρ^k`.
    pub fn rho_limit(&self) -> Option<f64> {
        match self {
            TestFunction::Monomial { degree } => match degree {
                0 | 1 => Some(0.0),
                2 => Some(1.0),
                _ => None,
            },
            TestFunction::Exp { c } if *c <= 0.0 => Some(0.0),
            TestFunction::Exp { .. } => None,
            TestFunction::AbsShift { .. }
            | TestFunction::Sin { .. }
            | TestFunction::Tabulated { .. }
            | TestFunction::ClampedMonomial { .. } => Some(0.0),
            TestFunction::MonomialExp { c, .. } if *c < 0.0 => Some(0.0),
            TestFunction::MonomialExp { degree, .. } => TestFunction::monomial(*degree).rho_limit(),
            TestFunction::Linear { terms } => terms
                .iter()
                .map(|t| t.f.rho_limit().map(|l| t.coef * l))
                .sum(),
        }
    }

    /// Upper bound for `sup_{x ≥ X} |f(x)| / (1 + x²)`, `X ≥ 1`.
    pub fn weighted_tail_bound(&self, x_cap: f64) -> Result<f64> {
        if !(x_cap >= 1.0) {
            return Err(LabError::InvalidArgument(format!(
                "tail bounds need X >= 1, got {x_cap}"
            )));
        }
        let rho = 1.0 + x_cap * x_cap;
        let unbounded = || Err(LabError::TailUnbounded(self.label()));
        match self {
            TestFunction::Monomial { degree } => match degree {
                0 => Ok(1.0 / rho),
                1 => Ok(x_cap / rho),
                2 => Ok(1.0),
                _ => unbounded(),
            },
            TestFunction::Exp { c } if *c <= 0.0 => Ok((c * x_cap).exp() / rho),
            TestFunction::Exp { .. } => unbounded(),
            TestFunction::Sin { .. } => Ok(1.0 / rho),
            // (x + |c|)/(1 + x²) decreases for x ≥ 1.
            TestFunction::AbsShift { c } => Ok((x_cap + c.abs()) / rho),
            TestFunction::Tabulated { samples } => Ok(max_abs_sample(samples) / rho),
            TestFunction::ClampedMonomial { degree, cap } => Ok(cap.powi(*degree as i32) / rho),
            TestFunction::MonomialExp { degree, c } if *c < 0.0 => {
                let r = -c;
                // x^j e^{-r x} decreases beyond j / r.
                let peak = if x_cap >= *degree as f64 / r {
                    x_cap.powi(*degree as i32) * (c * x_cap).exp()
                } else {
                    sup_power_exp(*degree, r)
                };
                Ok(peak / rho)
            }
            TestFunction::MonomialExp { degree, c } if *c == 0.0 => {
                TestFunction::monomial(*degree).weighted_tail_bound(x_cap)
            }
            TestFunction::MonomialExp { .. } => unbounded(),
            TestFunction::Linear { terms } => terms.iter().try_fold(0.0, |acc, t| {
                Ok(acc + t.coef.abs() * t.f.weighted_tail_bound(x_cap)?)
            }),
        }
    }
}

fn max_abs_sample(samples: &[(f64, f64)]) -> f64 {
    samples.iter().map(|s| s.1.abs()).fold(0.0, f64::max)
}

fn interpolate(samples: &[(f64, f64)], x: f64) -> f64 {
    let first = samples[0];
    let last = samples[samples.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    let i = samples.partition_point(|s| s.0 <= x);
    let (x0, y0) = samples[i - 1];
    let (x1, y1) = samples[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Trapezoid rule on the breakpoints inside `[lo, hi]`, exact for the
/// piecewise-linear interpolant.
fn piecewise_linear_integral(samples: &[(f64, f64)], lo: f64, hi: f64) -> f64 {
    let mut total = 0.0;
    let mut a = lo;
    let mut fa = interpolate(samples, a);
    let from = samples.partition_point(|s| s.0 <= lo);
    for &(xb, yb) in samples[from..].iter().take_while(|s| s.0 < hi) {
        total += 0.5 * (xb - a) * (fa + yb);
        a = xb;
        fa = yb;
    }
    let fh = interpolate(samples, hi);
    total + 0.5 * (hi - a) * (fa + fh)
}
