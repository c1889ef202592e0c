//! Reference values computed independently at 40 digits and frozen here.
#![allow(clippy::excessive_precision)]

use kantorovich_lab::{
    eval_l_star, eval_p, moment_oracle, weight_table, GeneratingFunction, OperatorConfig,
    ScaleSequence, TestFunction,
};

fn cfg(coeffs: &[f64], n: u64, scale: ScaleSequence) -> OperatorConfig {
    OperatorConfig::new(GeneratingFunction::new(coeffs.to_vec()).unwrap(), n, scale)
        .with_epsilon(1e-15)
}

fn power(theta: f64) -> ScaleSequence {
    ScaleSequence::Power { theta }
}

fn close(got: f64, want: f64, rel: f64) {
    assert!(
        (got - want).abs() <= rel * want.abs().max(1.0),
        "got {got:e}, want {want:e}"
    );
}

#[test]
fn first_moment_shifted_kernel() {
    let m1 = moment_oracle(&cfg(&[1.0, 1.0], 1000, power(0.5)), 1, 1.0).unwrap();
    close(m1, 1.031_622_776_601_683_8, 1e-14);
}

#[test]
fn second_moment_szasz_kernel() {
    let m2 = moment_oracle(&cfg(&[1.0], 100, power(0.5)), 2, 1.0).unwrap();
    close(m2, 1.203_333_333_333_333_3, 1e-14);
    let m1 = moment_oracle(&cfg(&[1.0], 10_000, power(0.5)), 1, 1.0).unwrap();
    close(m1, 1.005, 1e-14);
}

#[test]
fn point_evaluation_of_exponentials() {
    let e = TestFunction::Exp { c: 1.0 };
    let p = eval_p(&cfg(&[1.0], 100, power(0.5)), &e, 0.5).unwrap();
    close(p, 1.652_862_038_723_333_1, 1e-13);
    let p = eval_p(&cfg(&[1.0, 2.0, 1.0], 10, power(0.5)), &e, 2.0).unwrap();
    close(p, 9.078_575_713_295_500_6, 1e-13);
}

#[test]
fn first_weight() {
    let t = weight_table(
        &GeneratingFunction::new(vec![1.0, 1.0]).unwrap(),
        2.0,
        1e-12,
    )
    .unwrap();
    close(t.weights[0], 0.067_667_641_618_306_346, 1e-15);
}

#[test]
fn kantorovich_values() {
    let v = eval_l_star(
        &cfg(&[1.0, 1.0], 100, power(0.5)),
        &TestFunction::Exp { c: -1.0 },
        0.5,
    )
    .unwrap();
    close(v, 0.563_185_174_395_380_80, 1e-13);
    let v = eval_l_star(
        &cfg(&[1.0, 2.0, 1.0], 1000, power(0.5)),
        &TestFunction::Sin { c: 1.0 },
        0.7,
    )
    .unwrap();
    close(v, 0.671_997_011_583_762_46, 1e-13);
    let v = eval_l_star(
        &cfg(&[1.0], 64, power(0.5)),
        &TestFunction::AbsShift { c: 0.5 },
        0.5,
    )
    .unwrap();
    close(v, 0.203_683_049_767_325_97, 1e-13);
}

/// `L_n* e^{c·}` has the closed form `(u - 1)/(c h) · g(u)/g(1) · e^{y (u - 1)}`
/// with `u = e^{c h}`, from the generating-function identity.
#[test]
fn exponential_closed_form_across_scales() {
    for coeffs in [
        &[1.0][..],
        &[1.0, 1.0],
        &[1.0, 2.0, 1.0],
        &[0.2, 0.0, 0.3, 0.5],
    ] {
        for n in [10_u64, 1000, 100_000] {
            for c in [-2.0, -0.5, 1.0] {
                for x in [0.0, 0.3, 2.0] {
                    let op = cfg(coeffs, n, power(0.4));
                    let gf = &op.gf;
                    let h = op.step();
                    let y = x / h;
                    let u = (c * h).exp();
                    let want = (c * h).exp_m1() / (c * h) * gf.eval(u) / gf.g1()
                        * (y * (c * h).exp_m1()).exp();
                    let got = eval_l_star(&op, &TestFunction::Exp { c }, x).unwrap();
                    close(got, want, 1e-11);
                }
            }
        }
    }
}
