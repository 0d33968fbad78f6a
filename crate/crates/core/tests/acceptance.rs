//! Acceptance criteria A1 to A12, one test each.

use nhmagic::verify::{self, CriterionResult, VerifyOptions};

fn check(result: CriterionResult) {
    println!("{}", result.line());
    assert!(result.passed, "{}", result.line());
}

macro_rules! criterion {
    ($name:ident, $f:path) => {
        #[test]
        fn $name() {
            check($f(VerifyOptions::default()));
        }
    };
}

criterion!(a01_h_state_optimum, verify::a1);
criterion!(a02_t_state_optimum, verify::a2);
criterion!(a03_exceptional_point, verify::a3);
criterion!(a04_large_decay_asymptotics, verify::a4);
criterion!(a05_liouvillian_oracle_equivalence, verify::a5);
criterion!(a06_noisy_optimum, verify::a6);
criterion!(a07_success_rates, verify::a7);
criterion!(a08_sde_strong_order, verify::a8);
criterion!(a09_trajectory_average_consistency, verify::a9);
criterion!(a10_sre_bounds, verify::a10);
criterion!(a11_analytic_time_evolution, verify::a11);
criterion!(a12_generic_sre_oracle, verify::a12);
