//! Numerical laboratory for the Kantorovich variant of the Jakimovski–Leviatan
//! operators.
//!
//! For a generating function `g(u) = Σ a_i u^i` with Appell polynomials `p_k`
//! and a scale sequence `b_n` (`b_n → ∞`, `b_n / n → 0`), the operator is
//!
//! ```text
//! L_n*(f; x) = (n / b_n) Σ_k w_k(n x / b_n) ∫_{k b_n/n}^{(k+1) b_n/n} f(t) dt,
//! w_k(y) = e^{-y} p_k(y) / g(1).
//! ```
//!
//! The crate evaluates `L_n*` and the point-evaluation operator `P_n`,
//! compares closed-form moments against brute-force summation, estimates
//! moduli of continuity, emits error-bound certificates, and measures
//! convergence in the uniform and `ρ(x) = 1 + x²` weighted norms.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod appell;
pub mod error;
pub mod function;
pub mod harness;
pub mod moments;
pub mod operator;
pub mod poisson;
pub mod quadrature;
pub mod regression;
pub mod smoothness;
pub mod weighted;

pub use appell::{
    appell_coefficients, appell_eval, identity_residual, positivity_check, weight_table,
    GeneratingFunction, PositivityReport, WeightTable,
};
pub use error::{LabError, Result};
pub use function::{Term, TestFunction};
pub use moments::{central_moments, moment_closed_form, moment_oracle, MomentReport};
pub use operator::{
    eval_l_star, eval_p, kantorovich_cell_integral, scale_validate, Operator, OperatorConfig,
    ScaleSequence, ScaleVerdict,
};
pub use smoothness::{
    certificate_t2, certificate_t3, certificate_t4, certificate_t5, lip_m_estimate, modulus,
    second_modulus, BoundCertificate, LipClass, ModulusEstimate, Theorem,
};
pub use weighted::{
    lemma3_check, theorem7_experiment, theorem7_suite, weighted_norm, Lemma3Report, Theorem7Table,
    WeightedNormEstimate,
};
