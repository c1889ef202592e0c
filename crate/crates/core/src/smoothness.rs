//! Grid estimates of the moduli of continuity and pass/fail certificates for
//! the error bounds of `L_n*`.
//!
//! Every certificate carries two right-hand sides: `rhs_paper` evaluates the
//! printed bound with `θ_n` / `ξ_n` as stated, `rhs_oracle` evaluates the same
//! inequality with the measured central moments. Only the oracle side is an
//! instance of an inequality that holds for every positive operator with
//! `L(1) = 1`, so only it is expected to pass everywhere.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::function::TestFunction;
use crate::moments::{central_moments, theta_n, xi_n, MomentReport};
use crate::operator::{Operator, OperatorConfig};

/// Slack allowed on `lhs ≤ rhs`.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-10;
/// The grid step must not exceed `delta / COARSEST_STEP_RATIO`.
pub const COARSEST_STEP_RATIO: f64 = 10.0;
/// Certificates use the refined step `delta / REFINED_STEP_RATIO`.
pub const REFINED_STEP_RATIO: f64 = 100.0;
/// Grid points per axis for the Lipschitz-constant check inside T5.
pub const LIP_SAMPLES: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusEstimate {
    pub delta: f64,
    pub value: f64,
    pub grid_step: f64,
    pub domain: (f64, f64),
}

struct Grid {
    step: f64,
    values: Vec<f64>,
}

fn sample_grid<F: Fn(f64) -> f64>(f: &F, delta: f64, a: f64, grid_n: usize) -> Result<Grid> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(LabError::InvalidArgument(format!(
            "delta = {delta} must be positive"
        )));
    }
    if !(a > 0.0 && a.is_finite()) || grid_n == 0 {
        return Err(LabError::InvalidArgument(format!(
            "domain [0, {a}] with {grid_n} cells"
        )));
    }
    let step = a / grid_n as f64;
    if step > delta / COARSEST_STEP_RATIO {
        return Err(LabError::GridTooCoarse { step, delta });
    }
    let values = (0..=grid_n).map(|i| f(i as f64 * step)).collect();
    Ok(Grid { step, values })
}

/// Grid points `0, step, …, a`, offsets `step, 2 step, …` up to `delta`, plus
/// the exact offset `delta` itself. The result under-estimates `ω(f, δ)` on
/// `[0, a]` by at most the modulus of `f` at the grid step.
pub fn modulus_of<F: Fn(f64) -> f64>(
    f: F,
    delta: f64,
    a: f64,
    grid_n: usize,
) -> Result<ModulusEstimate> {
    let grid = sample_grid(&f, delta, a, grid_n)?;
    let max_shift = ((delta / grid.step).floor() as usize).min(grid_n);
    let mut sup = 0.0_f64;
    for i in 0..=grid_n {
        for j in 1..=max_shift.min(grid_n - i) {
            sup = sup.max((grid.values[i + j] - grid.values[i]).abs());
        }
        let x = i as f64 * grid.step;
        if x + delta <= a {
            sup = sup.max((f(x + delta) - grid.values[i]).abs());
        }
    }
    Ok(ModulusEstimate {
        delta,
        value: sup,
        grid_step: grid.step,
        domain: (0.0, a),
    })
}

/// `ω(f, δ)` on `[0, a]`.
pub fn modulus(f: &TestFunction, delta: f64, a: f64, grid_n: usize) -> Result<ModulusEstimate> {
    modulus_of(|x| f.eval(x), delta, a, grid_n)
}

/// `ω₂(f, δ) = sup_{0 < t ≤ δ} sup_x |f(x + 2t) - 2 f(x + t) + f(x)|` over
/// grid `x` with `x + 2t ≤ a`.
pub fn second_modulus_of<F: Fn(f64) -> f64>(
    f: F,
    delta: f64,
    a: f64,
    grid_n: usize,
) -> Result<ModulusEstimate> {
    let grid = sample_grid(&f, delta, a, grid_n)?;
    let max_shift = (delta / grid.step).floor() as usize;
    let mut sup = 0.0_f64;
    for i in 0..=grid_n {
        let room = (grid_n - i) / 2;
        for j in 1..=max_shift.min(room) {
            let d = grid.values[i + 2 * j] - 2.0 * grid.values[i + j] + grid.values[i];
            sup = sup.max(d.abs());
        }
        let x = i as f64 * grid.step;
        if x + 2.0 * delta <= a {
            let d = f(x + 2.0 * delta) - 2.0 * f(x + delta) + grid.values[i];
            sup = sup.max(d.abs());
        }
    }
    Ok(ModulusEstimate {
        delta,
        value: sup,
        grid_step: grid.step,
        domain: (0.0, a),
    })
}

pub fn second_modulus(
    f: &TestFunction,
    delta: f64,
    a: f64,
    grid_n: usize,
) -> Result<ModulusEstimate> {
    second_modulus_of(|x| f.eval(x), delta, a, grid_n)
}

/// Which printed bound a certificate instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Theorem {
    /// `|L f - f| ≤ 2 ω(f, √θ_n)`.
    T2,
    /// `|L f - f| ≤ ξ_n ‖f‖_{C_B²}`.
    T3,
    /// `|L f - f| ≤ 2M (ω₂(f, √δ_n) + min(1, δ_n) ‖f‖)`, `δ_n = ξ_n / 2`.
    T4,
    /// Lipschitz-type class bound.
    T5,
}

impl Theorem {
    pub const ALL: [Theorem; 4] = [Theorem::T2, Theorem::T3, Theorem::T4, Theorem::T5];

    pub fn name(&self) -> &'static str {
        match self {
            Theorem::T2 => "T2",
            Theorem::T3 => "T3",
            Theorem::T4 => "T4",
            Theorem::T5 => "T5",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub theorem: Theorem,
    pub n: u64,
    pub x: f64,
    pub function: String,
    pub lhs: f64,
    pub rhs_paper: f64,
    pub rhs_oracle: f64,
    pub pass_paper: bool,
    pub pass_oracle: bool,
    /// T4 only: `lhs / (ω₂(f, √δ) + min(1, δ) ‖f‖)`, i.e. the smallest `2M`
    /// that would make the bound hold at this point.
    pub ratio_paper: Option<f64>,
    pub ratio_oracle: Option<f64>,
}

impl BoundCertificate {
    fn new(
        theorem: Theorem,
        op: &Operator,
        f: &TestFunction,
        x: f64,
        lhs: f64,
        rhs_paper: f64,
        rhs_oracle: f64,
    ) -> Self {
        Self {
            theorem,
            n: op.n(),
            x,
            function: f.label(),
            lhs,
            rhs_paper,
            rhs_oracle,
            pass_paper: lhs <= rhs_paper + CERTIFICATE_TOLERANCE,
            pass_oracle: lhs <= rhs_oracle + CERTIFICATE_TOLERANCE,
            ratio_paper: None,
            ratio_oracle: None,
        }
    }
}

/// Shared pieces of a certificate at `(n, x)`: the error, the measured
/// moments and the domain covering every retained kernel cell.
struct Setup {
    op: Operator,
    lhs: f64,
    moments: MomentReport,
    domain: f64,
}

fn setup(cfg: &OperatorConfig, f: &TestFunction, x: f64, a: f64) -> Result<Setup> {
    let op = Operator::new(cfg.clone())?;
    let lhs = (op.l_star(f, x)? - f.eval(x)).abs();
    let moments = central_moments(cfg, x)?;
    let domain = a.max(op.support_end(x)?).max(x);
    Ok(Setup {
        op,
        lhs,
        moments,
        domain,
    })
}

fn refined_cells(domain: f64, delta: f64) -> usize {
    (domain * REFINED_STEP_RATIO / delta).ceil() as usize
}

fn refined_modulus(f: &TestFunction, delta: f64, domain: f64) -> Result<f64> {
    Ok(modulus(f, delta, domain, refined_cells(domain, delta))?.value)
}

fn refined_second_modulus(f: &TestFunction, delta: f64, domain: f64) -> Result<f64> {
    Ok(second_modulus(f, delta, domain, refined_cells(domain, delta))?.value)
}

/// `|L_n* f(x) - f(x)| ≤ 2 ω(f, δ)` with `δ = √θ_n` (printed) or `δ = √μ₂`
/// (oracle). The modulus is taken over `[0, max(a, end of retained cells)]`.
pub fn certificate_t2(
    cfg: &OperatorConfig,
    f: &TestFunction,
    x: f64,
    a: f64,
) -> Result<BoundCertificate> {
    let s = setup(cfg, f, x, a)?;
    let rhs_paper = 2.0 * refined_modulus(f, theta_n(cfg).sqrt(), s.domain)?;
    let rhs_oracle = 2.0 * refined_modulus(f, s.moments.mu2().sqrt(), s.domain)?;
    Ok(BoundCertificate::new(
        Theorem::T2,
        &s.op,
        f,
        x,
        s.lhs,
        rhs_paper,
        rhs_oracle,
    ))
}

/// Printed: `ξ_n (‖f‖ + ‖f'‖ + ‖f''‖)`. Oracle: the Taylor bound
/// `‖f'‖ |μ₁| + ½ ‖f''‖ μ₂`.
pub fn certificate_t3(cfg: &OperatorConfig, f: &TestFunction, x: f64) -> Result<BoundCertificate> {
    let [n0, n1, n2] = f
        .sup_norms()
        .ok_or_else(|| LabError::DerivativesUnknown(f.label()))?;
    let op = Operator::new(cfg.clone())?;
    let lhs = (op.l_star(f, x)? - f.eval(x)).abs();
    let m = central_moments(cfg, x)?;
    let rhs_paper = xi_n(cfg) * (n0 + n1 + n2);
    let rhs_oracle = n1 * m.mu1().abs() + 0.5 * n2 * m.mu2();
    Ok(BoundCertificate::new(
        Theorem::T3,
        &op,
        f,
        x,
        lhs,
        rhs_paper,
        rhs_oracle,
    ))
}

/// Peetre-type bound. `M` is existential, so the certificate records the
/// ratio `lhs / (ω₂(f, √δ) + min(1, δ) ‖f‖)`; `rhs_*` are evaluated with
/// `M = 1`. The printed `δ_n = ξ_n / 2`; the oracle uses `(|μ₁| + ½ μ₂) / 2`,
/// the factor for which `|L g - g| ≤ 2 δ ‖g‖_{C_B²}` holds.
pub fn certificate_t4(
    cfg: &OperatorConfig,
    f: &TestFunction,
    x: f64,
    a: f64,
) -> Result<BoundCertificate> {
    let norm = f.sup_abs().ok_or_else(|| LabError::Unbounded(f.label()))?;
    let s = setup(cfg, f, x, a)?;
    let majorant = |delta: f64| -> Result<f64> {
        Ok(refined_second_modulus(f, delta.sqrt(), s.domain)? + delta.min(1.0) * norm)
    };
    // Residuals at rounding level carry no approximation error.
    let noise = 64.0 * f64::EPSILON * norm.max(1.0);
    let ratio = |lhs: f64, d: f64| {
        if lhs <= noise {
            0.0
        } else {
            lhs / d
        }
    };
    let delta_paper = 0.5 * xi_n(cfg);
    let delta_oracle = 0.5 * (s.moments.mu1().abs() + 0.5 * s.moments.mu2());
    let d_paper = majorant(delta_paper)?;
    let d_oracle = majorant(delta_oracle)?;
    let mut cert = BoundCertificate::new(
        Theorem::T4,
        &s.op,
        f,
        x,
        s.lhs,
        2.0 * d_paper,
        2.0 * d_oracle,
    );
    cert.ratio_paper = Some(ratio(s.lhs, d_paper));
    cert.ratio_oracle = Some(ratio(s.lhs, d_oracle));
    Ok(cert)
}

/// Parameters of the class `|f(t) - f(x)| ≤ M |t - x|^α / (t + α₁ x² + α₂ x)^{α/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LipClass {
    pub alpha: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Declared constant; when absent the grid estimate is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_lip: Option<f64>,
}

impl LipClass {
    pub fn new(alpha: f64, alpha1: f64, alpha2: f64, m_lip: f64) -> Self {
        Self {
            alpha,
            alpha1,
            alpha2,
            m_lip: Some(m_lip),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(LabError::InvalidArgument(format!(
                "alpha = {} must lie in (0, 1]",
                self.alpha
            )));
        }
        if !(self.alpha1 > 0.0 && self.alpha2 > 0.0) {
            return Err(LabError::InvalidArgument(
                "alpha1 and alpha2 must be positive".into(),
            ));
        }
        if let Some(m) = self.m_lip {
            if !(m >= 0.0 && m.is_finite()) {
                return Err(LabError::InvalidArgument(format!("M = {m} must be >= 0")));
            }
        }
        Ok(())
    }
}

/// Sup over ordered sample pairs `t ≠ x` of
/// `|f(t) - f(x)| (t + α₁ x² + α₂ x)^{α/2} / |t - x|^α`. A lower bound for
/// the class constant; adding points never decreases it.
pub fn lip_m_estimate(f: &TestFunction, class: &LipClass, points: &[f64]) -> f64 {
    let values: Vec<f64> = points.iter().map(|&p| f.eval(p)).collect();
    let half = 0.5 * class.alpha;
    let mut sup = 0.0_f64;
    for (&x, &fx) in points.iter().zip(&values) {
        let base = class.alpha1 * x * x + class.alpha2 * x;
        for (&t, &ft) in points.iter().zip(&values) {
            if t == x {
                continue;
            }
            let diff = (ft - fx).abs();
            if diff == 0.0 {
                continue;
            }
            let r = diff * (t + base).powf(half) / (t - x).abs().powf(class.alpha);
            sup = sup.max(r);
        }
    }
    sup
}

/// [`lip_m_estimate`] on `samples` equispaced points of `[lo, hi]`.
pub fn lip_m_estimate_grid(
    f: &TestFunction,
    class: &LipClass,
    lo: f64,
    hi: f64,
    samples: usize,
) -> f64 {
    let samples = samples.max(2);
    let step = (hi - lo) / (samples - 1) as f64;
    let points: Vec<f64> = (0..samples).map(|i| lo + i as f64 * step).collect();
    lip_m_estimate(f, class, &points)
}

/// `M (μ / (α₁ x² + α₂ x))^{α/2}`, with the `α = 1` square-root form kept
/// as its own branch.
fn lip_bound(m: f64, mu2: f64, class: &LipClass, x: f64) -> f64 {
    let denom = class.alpha1 * x * x + class.alpha2 * x;
    if class.alpha == 1.0 {
        m * (mu2 / denom).sqrt()
    } else {
        m * (mu2 / denom).powf(0.5 * class.alpha)
    }
}

/// Lipschitz-class bound at `x > 0`. Membership is first checked by
/// [`lip_m_estimate`] on a grid over the kernel support plus the point `x`.
pub fn certificate_t5(
    cfg: &OperatorConfig,
    f: &TestFunction,
    class: &LipClass,
    x: f64,
) -> Result<BoundCertificate> {
    class.validate()?;
    if !(x > 0.0) {
        return Err(LabError::XNonPositive(x));
    }
    let s = setup(cfg, f, x, x)?;
    let step = s.domain / (LIP_SAMPLES - 1) as f64;
    let mut points: Vec<f64> = (0..LIP_SAMPLES).map(|i| i as f64 * step).collect();
    points.push(x);
    let estimate = lip_m_estimate(f, class, &points);
    let m = match class.m_lip {
        Some(m) if estimate > m * (1.0 + 1e-12) => {
            return Err(LabError::NotInLipClass { estimate, m_lip: m })
        }
        Some(m) => m,
        None => estimate,
    };
    let rhs_paper = lip_bound(m, theta_n(cfg), class, x);
    let rhs_oracle = lip_bound(m, s.moments.mu2(), class, x);
    Ok(BoundCertificate::new(
        Theorem::T5,
        &s.op,
        f,
        x,
        s.lhs,
        rhs_paper,
        rhs_oracle,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::appell::GeneratingFunction;
    use crate::operator::ScaleSequence;

    fn cfg(n: u64) -> OperatorConfig {
        OperatorConfig::new(
            GeneratingFunction::szasz(),
            n,
            ScaleSequence::Power { theta: 0.5 },
        )
    }

    #[test]
    fn modulus_examples() {
        let m = modulus(&TestFunction::monomial(1), 0.1, 1.0, 1000).unwrap();
        assert!((m.value - 0.1).abs() < 1e-12);
        let m = modulus(&TestFunction::monomial(2), 0.1, 1.0, 1000).unwrap();
        assert!((m.value - 0.19).abs() < 1e-3);
        let m = modulus(&TestFunction::constant(3.0), 0.1, 1.0, 1000).unwrap();
        assert_eq!(m.value, 0.0);
        assert!(matches!(
            modulus(&TestFunction::monomial(1), 0.1, 1.0, 50),
            Err(LabError::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn second_modulus_examples() {
        let m = second_modulus(&TestFunction::monomial(1), 0.1, 1.0, 1000).unwrap();
        assert!(m.value < 1e-14);
        let m = second_modulus(&TestFunction::monomial(2), 0.1, 1.0, 1000).unwrap();
        assert!((m.value - 0.02).abs() < 1e-4);
        let m = second_modulus(&TestFunction::constant(-2.0), 0.1, 1.0, 1000).unwrap();
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn t2_examples() {
        let c = cfg(1000);
        let cert = certificate_t2(&c, &TestFunction::monomial(1), 0.5, 1.0).unwrap();
        assert!(cert.pass_oracle);
        let cert = certificate_t2(&c, &TestFunction::constant(2.0), 0.5, 1.0).unwrap();
        assert!(cert.lhs <= 1e-15, "{}", cert.lhs);
        assert!(cert.pass_oracle && cert.pass_paper);
        let cert = certificate_t2(&cfg(100), &TestFunction::AbsShift { c: 0.5 }, 0.5, 1.0).unwrap();
        assert!(cert.pass_oracle);
    }

    #[test]
    fn t3_examples() {
        let cert = certificate_t3(&cfg(1000), &TestFunction::Sin { c: 1.0 }, 1.0).unwrap();
        assert!(cert.pass_oracle);
        let cert = certificate_t3(&cfg(1000), &TestFunction::constant(1.0), 1.0).unwrap();
        assert!(cert.lhs <= 1e-15, "{}", cert.lhs);
        for n in [100, 1000, 10_000] {
            let cert = certificate_t3(&cfg(n), &TestFunction::Sin { c: 2.0 }, 0.7).unwrap();
            assert!(cert.lhs / cert.rhs_oracle <= 1.0);
        }
        assert!(matches!(
            certificate_t3(&cfg(10), &TestFunction::AbsShift { c: 0.5 }, 1.0),
            Err(LabError::DerivativesUnknown(_))
        ));
    }

    #[test]
    fn t4_constant_has_zero_ratio() {
        let cert = certificate_t4(&cfg(100), &TestFunction::constant(1.5), 0.5, 1.0).unwrap();
        assert!(cert.ratio_paper.unwrap() < 1e-12);
        assert!(matches!(
            certificate_t4(&cfg(100), &TestFunction::monomial(2), 0.5, 1.0),
            Err(LabError::Unbounded(_))
        ));
    }

    #[test]
    fn t5_examples() {
        let constant = TestFunction::constant(1.0);
        let class = LipClass::new(0.5, 1.0, 1.0, 1.0);
        let cert = certificate_t5(&cfg(100), &constant, &class, 0.5).unwrap();
        assert!(cert.lhs <= 1e-15, "{}", cert.lhs);
        assert!(cert.pass_oracle && cert.pass_paper);
        assert!(matches!(
            certificate_t5(&cfg(100), &constant, &class, 0.0),
            Err(LabError::XNonPositive(_))
        ));
        let tight = LipClass::new(1.0, 1.0, 1.0, 1e-3);
        assert!(matches!(
            certificate_t5(&cfg(100), &TestFunction::monomial(1), &tight, 1.0),
            Err(LabError::NotInLipClass { .. })
        ));
        let loose = LipClass {
            m_lip: None,
            ..tight
        };
        let cert = certificate_t5(&cfg(100), &TestFunction::monomial(1), &loose, 1.0).unwrap();
        assert!(cert.rhs_oracle > 0.0);
    }

    #[test]
    fn alpha_one_branch_is_continuous() {
        let mu2 = 0.013;
        let a = LipClass::new(1.0, 1.0, 2.0, 3.0);
        let b = LipClass {
            alpha: 0.999_999,
            ..a
        };
        let (ya, yb) = (lip_bound(3.0, mu2, &a, 0.8), lip_bound(3.0, mu2, &b, 0.8));
        assert!((ya - yb).abs() < 1e-5 * ya);
    }

    #[test]
    fn lip_estimate_is_homogeneous() {
        let class = LipClass::new(1.0, 1.0, 1.0, 1.0);
        let f = TestFunction::Sin { c: 1.0 };
        let twice = TestFunction::Linear {
            terms: vec![crate::function::Term {
                coef: 2.0,
                f: f.clone(),
            }],
        };
        let a = lip_m_estimate_grid(&f, &class, 0.0, 2.0, 200);
        let b = lip_m_estimate_grid(&twice, &class, 0.0, 2.0, 200);
        assert!((b - 2.0 * a).abs() < 1e-12);
        assert_eq!(
            lip_m_estimate_grid(&TestFunction::constant(4.0), &class, 0.0, 2.0, 200),
            0.0
        );
    }
}
