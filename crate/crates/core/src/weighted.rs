//! The `ρ(x) = 1 + x²` weighted norm and the weighted Korovkin checks.
//!
//! A sup over `[0, ∞)` is split into a grid sup on `[0, X_max]` and an
//! analytic bound on `[X_max, ∞)` derived from the growth class of the
//! function involved.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::function::TestFunction;
use crate::moments::central_second_closed_form;
use crate::operator::{Operator, OperatorConfig};
use crate::regression::log_log_slope;

pub const DEFAULT_X_MAX: f64 = 50.0;
pub const DEFAULT_GRID_N: usize = 1000;

pub fn rho(x: f64) -> f64 {
    1.0 + x * x
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedNormEstimate {
    /// `max(grid_sup, tail_bound)`.
    pub value: f64,
    pub grid_sup: f64,
    /// Grid point attaining `grid_sup`.
    pub argmax_x: f64,
    pub domain_cap: f64,
    /// Bound on `sup_{x ≥ X_max} |f(x)| / ρ(x)`.
    pub tail_bound: f64,
}

fn check_domain(x_max: f64, grid_n: usize) -> Result<()> {
    if !(x_max >= 1.0 && x_max.is_finite()) || grid_n == 0 {
        return Err(LabError::InvalidArgument(format!(
            "weighted grid [0, {x_max}] with {grid_n} cells (X_max >= 1 required)"
        )));
    }
    Ok(())
}

/// Weighted sup of an arbitrary fallible function given its tail bound.
pub fn weighted_sup<F>(
    g: F,
    x_max: f64,
    grid_n: usize,
    tail_bound: f64,
) -> Result<WeightedNormEstimate>
where
    F: Fn(f64) -> Result<f64>,
{
    check_domain(x_max, grid_n)?;
    let step = x_max / grid_n as f64;
    let mut grid_sup = 0.0;
    let mut argmax_x = 0.0;
    for i in 0..=grid_n {
        let x = i as f64 * step;
        let r = g(x)?.abs() / rho(x);
        if r > grid_sup {
            grid_sup = r;
            argmax_x = x;
        }
    }
    Ok(WeightedNormEstimate {
        value: grid_sup.max(tail_bound),
        grid_sup,
        argmax_x,
        domain_cap: x_max,
        tail_bound,
    })
}

/// `‖f‖_ρ = sup_{x ≥ 0} |f(x)| / (1 + x²)`.
pub fn weighted_norm(f: &TestFunction, x_max: f64, grid_n: usize) -> Result<WeightedNormEstimate> {
    check_domain(x_max, grid_n)?;
    let tail = f.weighted_tail_bound(x_max)?;
    weighted_sup(|x| Ok(f.eval(x)), x_max, grid_n, tail)
}

/// Bound on `sup_{x ≥ X} |L_n* f(x) - f(x)| / ρ(x)` for `X ≥ 1`.
///
/// Quadratic parts use the exact error `a x + b`; other parts need a global
/// Lipschitz constant `L`, giving `L √μ₂(x) / ρ(x)`, which decreases on
/// `[1, ∞)`.
pub fn error_tail_bound(op: &Operator, f: &TestFunction, x_cap: f64) -> Result<f64> {
    if let TestFunction::Linear { terms } = f {
        return terms.iter().try_fold(0.0, |acc, t| {
            Ok(acc + t.coef.abs() * error_tail_bound(op, &t.f, x_cap)?)
        });
    }
    let cfg = op.config();
    let h = op.step();
    let g1 = cfg.gf.first_ratio();
    let g2 = cfg.gf.second_ratio();
    if let Some([_, c1, c2]) = f.quadratic_coeffs() {
        let slope = c2 * h * (2.0 + 2.0 * g1);
        let offset = c1 * h * (g1 + 0.5) + c2 * h * h * (2.0 * g1 + g2 + 1.0 / 3.0);
        return Ok(slope.abs() / x_cap + offset.abs() / (x_cap * x_cap));
    }
    match f.lipschitz() {
        Some(l) => Ok(l * central_second_closed_form(cfg, x_cap).sqrt() / rho(x_cap)),
        None => Err(LabError::TailUnbounded(format!(
            "L_n* {} - {}",
            f.label(),
            f.label()
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma3Row {
    pub n: u64,
    pub b_n: f64,
    /// `‖L_n*(ρ)‖_ρ`.
    pub value: f64,
    /// `(value - 1) / (b_n / n)`.
    pub excess_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma3Report {
    pub rows: Vec<Lemma3Row>,
    pub sup_value: f64,
    /// Every value finite and `≥ 1`, and nonincreasing after the first `n`.
    pub bounded: bool,
}

/// `‖L_n*(ρ; ·)‖_ρ` over a sweep of configurations.
pub fn lemma3_check(cfgs: &[OperatorConfig], x_max: f64, grid_n: usize) -> Result<Lemma3Report> {
    let rho_f = TestFunction::rho();
    let mut rows = Vec::with_capacity(cfgs.len());
    for cfg in cfgs {
        let op = Operator::new(cfg.clone())?;
        let tail = 1.0 + error_tail_bound(&op, &rho_f, x_max)?;
        let est = weighted_sup(|x| op.l_star(&rho_f, x), x_max, grid_n, tail)?;
        rows.push(Lemma3Row {
            n: cfg.n,
            b_n: op.b_n(),
            value: est.value,
            excess_ratio: (est.value - 1.0) / op.step(),
        });
    }
    let sup_value = rows
        .iter()
        .map(|r| r.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let bounded = sup_value.is_finite()
        && rows.iter().all(|r| r.value >= 1.0 - 1e-12)
        && rows.windows(2).skip(1).all(|w| w[1].value <= w[0].value);
    Ok(Lemma3Report {
        rows,
        sup_value,
        bounded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem7Row {
    pub n: u64,
    pub b_n: f64,
    /// `e0`, `e1`, `e2` or the label of `f`.
    pub label: String,
    pub weighted_error: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem7Table {
    pub rows: Vec<Theorem7Row>,
    /// Log-log slope of `weighted_error` against `n` per label.
    pub slopes: Vec<(String, Option<f64>)>,
}

impl Theorem7Table {
    pub fn errors(&self, label: &str) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.label == label)
            .map(|r| r.weighted_error)
            .collect()
    }

    pub fn slope(&self, label: &str) -> Option<f64> {
        self.slopes
            .iter()
            .find(|(l, _)| l == label)
            .and_then(|(_, s)| *s)
    }
}

pub const KOROVKIN_LABELS: [&str; 3] = ["e0", "e1", "e2"];

/// `‖L_n* e_v - e_v‖_ρ` for `v = 0, 1, 2` and `‖L_n* f - f‖_ρ` over a sweep.
pub fn theorem7_experiment(
    cfgs: &[OperatorConfig],
    f: &TestFunction,
    x_max: f64,
    grid_n: usize,
) -> Result<Theorem7Table> {
    theorem7_suite(cfgs, std::slice::from_ref(f), x_max, grid_n)
}

/// [`theorem7_experiment`] for several functions, sharing the kernel
/// evaluations and the Korovkin rows.
pub fn theorem7_suite(
    cfgs: &[OperatorConfig],
    fs: &[TestFunction],
    x_max: f64,
    grid_n: usize,
) -> Result<Theorem7Table> {
    if let Some(f) = fs.iter().find(|f| f.rho_limit().is_none()) {
        return Err(LabError::NotInCRhoK(f.label()));
    }
    check_domain(x_max, grid_n)?;
    let mut all = vec![
        TestFunction::monomial(0),
        TestFunction::monomial(1),
        TestFunction::monomial(2),
    ];
    all.extend(fs.iter().cloned());
    let labels: Vec<String> = KOROVKIN_LABELS
        .iter()
        .map(|s| s.to_string())
        .chain(fs.iter().map(|f| f.label()))
        .collect();

    let mut rows = Vec::new();
    for cfg in cfgs {
        rows.extend(theorem7_rows(cfg, &all, &labels, x_max, grid_n)?);
    }
    Ok(Theorem7Table {
        slopes: slopes_by_label(cfgs, &rows, &labels),
        rows,
    })
}

/// Rows of one `n` for `fns = [e0, e1, e2, f...]`.
pub(crate) fn theorem7_rows(
    cfg: &OperatorConfig,
    fns: &[TestFunction],
    labels: &[String],
    x_max: f64,
    grid_n: usize,
) -> Result<Vec<Theorem7Row>> {
    let op = Operator::new(cfg.clone())?;
    let refs: Vec<&TestFunction> = fns.iter().collect();
    let step = x_max / grid_n as f64;
    let mut sups = vec![0.0_f64; fns.len()];
    for i in 0..=grid_n {
        let x = i as f64 * step;
        let values = op.l_star_many(&refs, x)?;
        for (k, (v, g)) in values.iter().zip(fns).enumerate() {
            sups[k] = sups[k].max((v - g.eval(x)).abs() / rho(x));
        }
    }
    let mut rows = Vec::with_capacity(fns.len());
    for (k, g) in fns.iter().enumerate() {
        // L_n* e0 = e0 exactly, so its tail contributes nothing.
        let tail = if k == 0 {
            0.0
        } else {
            error_tail_bound(&op, g, x_max)?
        };
        rows.push(Theorem7Row {
            n: cfg.n,
            b_n: op.b_n(),
            label: labels[k].clone(),
            weighted_error: sups[k].max(tail),
            tail_bound: tail,
        });
    }
    Ok(rows)
}

pub(crate) fn slopes_by_label(
    cfgs: &[OperatorConfig],
    rows: &[Theorem7Row],
    labels: &[String],
) -> Vec<(String, Option<f64>)> {
    let ns: Vec<f64> = cfgs.iter().map(|c| c.n as f64).collect();
    labels
        .iter()
        .map(|l| {
            let errs: Vec<f64> = rows
                .iter()
                .filter(|r| &r.label == l)
                .map(|r| r.weighted_error)
                .collect();
            (l.clone(), log_log_slope(&ns, &errs))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::appell::GeneratingFunction;
    use crate::function::Term;
    use crate::operator::ScaleSequence;

    fn sweep(theta: f64, ns: &[u64]) -> Vec<OperatorConfig> {
        ns.iter()
            .map(|&n| {
                OperatorConfig::new(
                    GeneratingFunction::szasz(),
                    n,
                    ScaleSequence::Power { theta },
                )
            })
            .collect()
    }

    #[test]
    fn weighted_norm_examples() {
        let e = weighted_norm(&TestFunction::monomial(2), 50.0, 1000).unwrap();
        assert_eq!(e.value, 1.0);
        assert_eq!(e.tail_bound, 1.0);
        let e = weighted_norm(&TestFunction::monomial(0), 50.0, 1000).unwrap();
        assert_eq!((e.value, e.argmax_x), (1.0, 0.0));
        let e = weighted_norm(&TestFunction::monomial(1), 50.0, 1000).unwrap();
        assert!((e.value - 0.5).abs() < 1e-15);
        assert!((e.argmax_x - 1.0).abs() < 1e-12);
        assert!(matches!(
            weighted_norm(&TestFunction::monomial(3), 50.0, 1000),
            Err(LabError::TailUnbounded(_))
        ));
        assert!(matches!(
            weighted_norm(&TestFunction::Exp { c: 0.1 }, 50.0, 1000),
            Err(LabError::TailUnbounded(_))
        ));
    }

    #[test]
    fn triangle_inequality_on_presets() {
        let a = TestFunction::Sin { c: 3.0 };
        let b = TestFunction::AbsShift { c: 2.0 };
        let sum = TestFunction::Linear {
            terms: vec![
                Term {
                    coef: 1.0,
                    f: a.clone(),
                },
                Term {
                    coef: 1.0,
                    f: b.clone(),
                },
            ],
        };
        let na = weighted_norm(&a, 20.0, 2000).unwrap().value;
        let nb = weighted_norm(&b, 20.0, 2000).unwrap().value;
        let ns = weighted_norm(&sum, 20.0, 2000).unwrap().value;
        assert!(ns <= na + nb + 1e-12);
    }

    #[test]
    fn error_tail_bound_dominates_beyond_cap() {
        let cfg = sweep(0.5, &[400]).remove(0);
        let op = Operator::new(cfg).unwrap();
        for f in [
            TestFunction::monomial(1),
            TestFunction::monomial(2),
            TestFunction::Sin { c: 1.0 },
            TestFunction::AbsShift { c: 0.5 },
        ] {
            let cap = 5.0;
            let bound = error_tail_bound(&op, &f, cap).unwrap();
            for i in 0..40 {
                let x = cap + i as f64 * 0.5;
                let err = (op.l_star(&f, x).unwrap() - f.eval(x)).abs() / rho(x);
                assert!(err <= bound * (1.0 + 1e-9), "{} at {x}", f.label());
            }
        }
    }

    #[test]
    fn lemma3_values_decrease_toward_one() {
        let report = lemma3_check(&sweep(0.5, &[100, 1000, 10_000]), 50.0, 1000).unwrap();
        assert!(report.bounded);
        assert!(report.rows.iter().all(|r| r.value >= 1.0));
        assert!(report.rows.windows(2).all(|w| w[1].value < w[0].value));
        let first = report.rows[0].value;
        assert!(report.sup_value <= 1.0 + 2.0 * (first - 1.0));
    }

    #[test]
    fn theorem7_rejects_fast_growth() {
        assert!(matches!(
            theorem7_experiment(
                &sweep(0.5, &[100]),
                &TestFunction::Exp { c: 1.0 },
                50.0,
                100
            ),
            Err(LabError::NotInCRhoK(_))
        ));
    }
}
