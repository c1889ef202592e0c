use kantorovich_lab::harness::{run_convergence, run_moment_audit, ExperimentConfig};

fn config(coeffs: &str, n_list: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(&format!(
        r#"{{
            "gf": {{"coeffs": {coeffs}}},
            "scale": {{"kind": "power", "theta": 0.5}},
            "n_list": {n_list},
            "x_grid": {{"a": 1.0, "points": 33}},
            "functions": [
                {{"kind": "monomial", "degree": 0}},
                {{"kind": "exp", "c": -1.0}},
                {{"kind": "abs_shift", "c": 0.5}}
            ]
        }}"#
    ))
    .unwrap()
}

#[test]
fn szasz_kernel_rates() {
    let n_list: Vec<String> = (6..=14).map(|p| (1u64 << p).to_string()).collect();
    let report = run_convergence(&config("[1]", &format!("[{}]", n_list.join(",")))).unwrap();
    assert!(report.errors("monomial(0)").iter().all(|&e| e <= 1e-12));
    assert!(report.rows.iter().all(|r| r.sup_error >= 0.0));
    assert!(report.is_monotone("exp(-1)"));
    assert!(report.is_monotone("abs_shift(0.5)"));
    let s = report.slope("exp(-1)").unwrap();
    assert!((s + 0.5).abs() <= 0.15, "{s}");
    let s = report.slope("abs_shift(0.5)").unwrap();
    assert!((s + 0.25).abs() <= 0.15, "{s}");
}

#[test]
fn slope_needs_three_points() {
    let report = run_convergence(&config("[1, 1]", "[64, 128]")).unwrap();
    assert_eq!(report.slope("exp(-1)"), None);
}

#[test]
fn moment_audit_example_row() {
    let mut cfg = config("[1]", "[100]");
    cfg.x_grid.points = 2;
    let rows = run_moment_audit(&cfg).unwrap();
    let at_zero = rows.iter().find(|r| r.x == 0.0).unwrap();
    assert!((at_zero.mu1() - 0.05).abs() < 1e-15);
    assert!((at_zero.delta_paper_raw[1] - 0.05).abs() < 1e-15);
    assert!(rows.iter().all(|r| (r.raw[0] - 1.0).abs() <= 1e-12));
}
