//! The point-evaluation operator `P_n` and its Kantorovich variant `L_n*`.

use serde::{Deserialize, Serialize};

use crate::appell::{positivity_check, weight_table, GeneratingFunction, WeightTable};
use crate::error::{LabError, Result};
use crate::function::TestFunction;
use crate::quadrature::GaussLegendre;

pub const DEFAULT_EPSILON: f64 = 1e-12;
pub const DEFAULT_QUAD_ORDER: usize = 8;

/// The sequence `b_n`; it must satisfy `b_n → ∞` and `b_n / n → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScaleSequence {
    /// `b_n = n^theta`.
    Power { theta: f64 },
    /// `b_n = ln(n + 1)`.
    Log,
    /// `b_n = c`.
    Constant { c: f64 },
}

impl ScaleSequence {
    pub fn b(&self, n: u64) -> f64 {
        let n = n as f64;
        match *self {
            ScaleSequence::Power { theta } => n.powf(theta),
            ScaleSequence::Log => n.ln_1p(),
            ScaleSequence::Constant { c } => c,
        }
    }

    pub fn description(&self) -> String {
        match self {
            ScaleSequence::Power { theta } => format!("b_n = n^{theta}"),
            ScaleSequence::Log => "b_n = ln(n+1)".into(),
            ScaleSequence::Constant { c } => format!("b_n = {c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleVerdict {
    pub valid: bool,
    pub reasons: Vec<String>,
}

/// Symbolic check of `b_n > 0` increasing, `b_n → ∞` and `b_n / n → 0`.
pub fn scale_validate(scale: &ScaleSequence) -> ScaleVerdict {
    let mut reasons = Vec::new();
    match *scale {
        ScaleSequence::Power { theta } => {
            if !theta.is_finite() {
                reasons.push(format!("exponent {theta} is not finite"));
            } else if theta <= 0.0 {
                reasons.push(format!("b_n = n^{theta} does not tend to infinity"));
            } else if theta >= 1.0 {
                let limit = if theta == 1.0 { "1" } else { "inf" };
                reasons.push(format!("b_n/n → {limit} ≠ 0"));
            }
        }
        ScaleSequence::Log => {}
        ScaleSequence::Constant { c } => {
            if !(c > 0.0) {
                reasons.push(format!("b_n = {c} is not positive"));
            }
            reasons.push("constant b_n does not tend to infinity".into());
        }
    }
    ScaleVerdict {
        valid: reasons.is_empty(),
        reasons,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorConfig {
    pub gf: GeneratingFunction,
    pub n: u64,
    pub scale: ScaleSequence,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_quad_order")]
    pub quad_order: usize,
    /// Evaluate `L_n*` even when the scale fails [`scale_validate`].
    #[serde(default)]
    pub allow_invalid_scale: bool,
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_quad_order() -> usize {
    DEFAULT_QUAD_ORDER
}

impl OperatorConfig {
    pub fn new(gf: GeneratingFunction, n: u64, scale: ScaleSequence) -> Self {
        Self {
            gf,
            n,
            scale,
            epsilon: DEFAULT_EPSILON,
            quad_order: DEFAULT_QUAD_ORDER,
            allow_invalid_scale: false,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_quad_order(mut self, quad_order: usize) -> Self {
        self.quad_order = quad_order;
        self
    }

    pub fn allowing_invalid_scale(mut self) -> Self {
        self.allow_invalid_scale = true;
        self
    }

    pub fn b_n(&self) -> f64 {
        self.scale.b(self.n)
    }

    /// Cell width `b_n / n`.
    pub fn step(&self) -> f64 {
        self.b_n() / self.n as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(LabError::InvalidArgument("n must be >= 1".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(LabError::InvalidEpsilon(self.epsilon));
        }
        if self.quad_order < 2 {
            return Err(LabError::InvalidArgument(format!(
                "quad_order {} must be >= 2",
                self.quad_order
            )));
        }
        Ok(())
    }
}

/// A validated configuration with its quadrature rule built once.
#[derive(Debug, Clone)]
pub struct Operator {
    cfg: OperatorConfig,
    b_n: f64,
    h: f64,
    scale_verdict: ScaleVerdict,
    rule: GaussLegendre,
}

fn check_x(x: f64) -> Result<()> {
    if x >= 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(LabError::InvalidArgument(format!(
            "x = {x} must be finite and >= 0"
        )))
    }
}

impl Operator {
    pub fn new(cfg: OperatorConfig) -> Result<Self> {
        cfg.validate()?;
        let positivity = positivity_check(&cfg.gf);
        if let Some(index) = positivity.offending_index {
            return Err(LabError::NotPositive {
                index,
                ratio: positivity.ratios[index],
            });
        }
        let b_n = cfg.b_n();
        let h = b_n / cfg.n as f64;
        Ok(Self {
            scale_verdict: scale_validate(&cfg.scale),
            rule: GaussLegendre::new(cfg.quad_order),
            cfg,
            b_n,
            h,
        })
    }

    pub fn config(&self) -> &OperatorConfig {
        &self.cfg
    }

    pub fn n(&self) -> u64 {
        self.cfg.n
    }

    pub fn b_n(&self) -> f64 {
        self.b_n
    }

    /// Cell width `b_n / n`.
    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn gf(&self) -> &GeneratingFunction {
        &self.cfg.gf
    }

    fn check_scale(&self) -> Result<()> {
        if self.scale_verdict.valid || self.cfg.allow_invalid_scale {
            Ok(())
        } else {
            Err(LabError::InvalidScale(self.scale_verdict.reasons.clone()))
        }
    }

    /// Kernel weights of `L_n*` at `x`, i.e. at `y = n x / b_n`.
    pub fn kantorovich_weights(&self, x: f64) -> Result<WeightTable> {
        check_x(x)?;
        self.check_scale()?;
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(LabError::InvalidScale(vec![format!(
                "b_n/n = {} is not a positive cell width",
                self.h
            )]));
        }
        weight_table(&self.cfg.gf, x / self.h, self.cfg.epsilon)
    }

    /// Right end `(K + 1) b_n / n` of the last retained cell at `x`.
    pub fn support_end(&self, x: f64) -> Result<f64> {
        let table = self.kantorovich_weights(x)?;
        Ok((table.last_index() + 1) as f64 * self.h)
    }

    /// `(1 / h) ∫_{kh}^{(k+1)h} f`.
    fn cell_average(&self, f: &TestFunction, k: usize) -> Result<f64> {
        let lo = k as f64 * self.h;
        let hi = (k + 1) as f64 * self.h;
        Ok(cell_integral(f, lo, hi, &self.rule)? / self.h)
    }

    fn sum_cells(&self, table: &WeightTable, f: &TestFunction) -> Result<f64> {
        let t_max = (table.last_index() + 1) as f64 * self.h;
        if !f.growth().majorant(t_max).is_finite() {
            return Err(LabError::GrowthOverflow { t_max });
        }
        let mut acc = 0.0;
        for (k, w) in table.iter() {
            if w != 0.0 {
                acc += w * self.cell_average(f, k)?;
            }
        }
        acc /= table.retained_mass();
        if acc.is_finite() {
            Ok(acc)
        } else {
            Err(LabError::GrowthOverflow { t_max })
        }
    }

    /// `L_n*(f; x)`.
    ///
    /// The retained weights are rescaled to unit mass, so constants are
    /// reproduced to rounding and the truncated operator stays positive and
    /// normalised. The truncation error is at most `2ε` times the growth
    /// majorant of `f` on the cells beyond `K`.
    pub fn l_star(&self, f: &TestFunction, x: f64) -> Result<f64> {
        let table = self.kantorovich_weights(x)?;
        self.sum_cells(&table, f)
    }

    /// `L_n*` of several functions at one point, sharing the weight table.
    pub fn l_star_many(&self, fs: &[&TestFunction], x: f64) -> Result<Vec<f64>> {
        let table = self.kantorovich_weights(x)?;
        fs.iter().map(|f| self.sum_cells(&table, f)).collect()
    }

    /// `P_n(f; x) = Σ_k w_k(n x) f(k / n)`; the scale plays no role here.
    /// Normalised like [`Operator::l_star`].
    pub fn p_n(&self, f: &TestFunction, x: f64) -> Result<f64> {
        check_x(x)?;
        let n = self.cfg.n as f64;
        let table = weight_table(&self.cfg.gf, n * x, self.cfg.epsilon)?;
        let t_max = table.last_index() as f64 / n;
        if !f.growth().majorant(t_max).is_finite() {
            return Err(LabError::GrowthOverflow { t_max });
        }
        let mut acc = 0.0;
        for (k, w) in table.iter() {
            let t = k as f64 / n;
            let v = f.eval(t);
            if !v.is_finite() {
                return Err(LabError::NonFiniteSample { t });
            }
            acc += w * v;
        }
        Ok(acc / table.retained_mass())
    }
}

/// Cell integral with a prebuilt rule. Linear combinations recurse so that
/// closed-form parts stay exact next to quadrature parts.
pub(crate) fn cell_integral(
    f: &TestFunction,
    lo: f64,
    hi: f64,
    rule: &GaussLegendre,
) -> Result<f64> {
    if let TestFunction::Linear { terms } = f {
        let mut acc = 0.0;
        for t in terms {
            acc += t.coef * cell_integral(&t.f, lo, hi, rule)?;
        }
        return Ok(acc);
    }
    let value = match f.integral(lo, hi) {
        Some(v) => v,
        None => rule.try_integrate(lo, hi, |t| {
            let v = f.eval(t);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(LabError::NonFiniteSample { t })
            }
        })?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(LabError::NonFiniteSample { t: hi })
    }
}

/// `∫_lo^hi f(t) dt`, closed form when available, otherwise Gauss–Legendre
/// with `quad_order` nodes.
pub fn kantorovich_cell_integral(
    f: &TestFunction,
    lo: f64,
    hi: f64,
    quad_order: usize,
) -> Result<f64> {
    if !(lo < hi) {
        return Err(LabError::InvalidArgument(format!(
            "empty cell [{lo}, {hi}]"
        )));
    }
    if quad_order == 0 {
        return Err(LabError::InvalidArgument("quad_order must be >= 1".into()));
    }
    cell_integral(f, lo, hi, &GaussLegendre::new(quad_order))
}

pub fn eval_p(cfg: &OperatorConfig, f: &TestFunction, x: f64) -> Result<f64> {
    Operator::new(cfg.clone())?.p_n(f, x)
}

pub fn eval_l_star(cfg: &OperatorConfig, f: &TestFunction, x: f64) -> Result<f64> {
    Operator::new(cfg.clone())?.l_star(f, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(c: &[f64]) -> GeneratingFunction {
        GeneratingFunction::new(c.to_vec()).unwrap()
    }

    fn half_power(gfc: &[f64], n: u64) -> OperatorConfig {
        OperatorConfig::new(gf(gfc), n, ScaleSequence::Power { theta: 0.5 })
    }

    #[test]
    fn scale_verdicts() {
        assert!(scale_validate(&ScaleSequence::Power { theta: 0.5 }).valid);
        let v = scale_validate(&ScaleSequence::Power { theta: 1.0 });
        assert!(!v.valid);
        assert_eq!(v.reasons, vec!["b_n/n → 1 ≠ 0".to_string()]);
        assert!(!scale_validate(&ScaleSequence::Power { theta: 1.5 }).valid);
        assert!(!scale_validate(&ScaleSequence::Power { theta: 0.0 }).valid);
        assert!(scale_validate(&ScaleSequence::Log).valid);
        assert!(!scale_validate(&ScaleSequence::Constant { c: 3.0 }).valid);
    }

    #[test]
    fn p_n_examples() {
        let cfg = OperatorConfig::new(gf(&[1.0]), 10, ScaleSequence::Log);
        let v = eval_p(&cfg, &TestFunction::monomial(0), 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let v = eval_p(&cfg, &TestFunction::monomial(1), 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-10);

        // Poisson mgf: E e^{N/n} = exp(n x (e^{1/n} - 1)).
        let cfg = OperatorConfig::new(gf(&[1.0]), 100, ScaleSequence::Log);
        let v = eval_p(&cfg, &TestFunction::Exp { c: 1.0 }, 0.5).unwrap();
        let want = 1.652_862_038_723_333;
        assert!(((v - want) / want).abs() < 1e-8);
    }

    #[test]
    fn l_star_examples() {
        for c in [&[1.0][..], &[1.0, 1.0], &[1.0, 2.0, 1.0]] {
            for x in [0.0, 0.3, 2.0] {
                let v = eval_l_star(&half_power(c, 50), &TestFunction::monomial(0), x).unwrap();
                assert!((v - 1.0).abs() < 1e-12);
            }
        }
        let v = eval_l_star(&half_power(&[1.0], 100), &TestFunction::monomial(1), 0.0).unwrap();
        assert!((v - 0.05).abs() < 1e-14);
        let v = eval_l_star(&half_power(&[1.0], 10_000), &TestFunction::monomial(1), 1.0).unwrap();
        assert!((v - 1.005).abs() < 1e-10);
    }

    #[test]
    fn l_star_rejects_invalid_scale_unless_overridden() {
        let cfg = OperatorConfig::new(gf(&[1.0]), 100, ScaleSequence::Constant { c: 10.0 });
        assert!(matches!(
            eval_l_star(&cfg, &TestFunction::monomial(1), 0.0),
            Err(LabError::InvalidScale(_))
        ));
        // P_n ignores b_n.
        assert!(eval_p(&cfg, &TestFunction::monomial(1), 0.0).is_ok());
        let v = eval_l_star(
            &cfg.allowing_invalid_scale(),
            &TestFunction::monomial(1),
            0.0,
        )
        .unwrap();
        assert!((v - 0.05).abs() < 1e-14);
    }

    #[test]
    fn config_errors() {
        let base = half_power(&[1.0], 10);
        let cfg = OperatorConfig {
            n: 0,
            ..base.clone()
        };
        assert!(Operator::new(cfg).is_err());
        assert!(Operator::new(base.clone().with_quad_order(1)).is_err());
        assert_eq!(
            Operator::new(base.clone().with_epsilon(2.0)).err(),
            Some(LabError::InvalidEpsilon(2.0))
        );
        let neg = OperatorConfig::new(gf(&[1.0, -0.5]), 10, ScaleSequence::Log);
        assert!(matches!(
            Operator::new(neg),
            Err(LabError::NotPositive { .. })
        ));
        let op = Operator::new(base).unwrap();
        assert!(op.l_star(&TestFunction::monomial(0), -1.0).is_err());
    }

    #[test]
    fn overflow_is_reported() {
        let op = Operator::new(half_power(&[1.0], 100)).unwrap();
        let f = TestFunction::Exp { c: 500.0 };
        assert!(matches!(
            op.l_star(&f, 1.0),
            Err(LabError::GrowthOverflow { .. })
        ));
        assert!(matches!(
            op.p_n(&f, 2.0),
            Err(LabError::GrowthOverflow { .. })
        ));
    }

    #[test]
    fn cell_integral_examples() {
        let v = kantorovich_cell_integral(&TestFunction::monomial(1), 0.0, 0.1, 1).unwrap();
        assert!((v - 0.005).abs() < 1e-18);
        let v = kantorovich_cell_integral(&TestFunction::monomial(0), 0.3, 0.9, 4).unwrap();
        assert_eq!(v, 0.9 - 0.3);
        let v = kantorovich_cell_integral(&TestFunction::Exp { c: 1.0 }, 0.0, 1.0, 8).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-12);
        assert!(kantorovich_cell_integral(&TestFunction::monomial(1), 1.0, 1.0, 8).is_err());
    }

    #[test]
    fn quadrature_path_is_exact_for_low_degree() {
        // monomial_exp with c = 0 has no closed form registered, so this hits
        // the Gauss-Legendre branch.
        for degree in 0..16u32 {
            let f = TestFunction::MonomialExp { degree, c: 0.0 };
            let got = kantorovich_cell_integral(&f, 0.5, 1.5, 8).unwrap();
            let want = (1.5f64.powi(degree as i32 + 1) - 0.5f64.powi(degree as i32 + 1))
                / (degree as f64 + 1.0);
            assert!(((got - want) / want).abs() < 1e-14, "degree {degree}");
        }
    }

    #[test]
    fn quadrature_rejects_non_finite_samples() {
        let f = TestFunction::MonomialExp {
            degree: 1,
            c: 800.0,
        };
        assert!(matches!(
            kantorovich_cell_integral(&f, 0.0, 2.0, 8),
            Err(LabError::NonFiniteSample { .. })
        ));
    }
}
