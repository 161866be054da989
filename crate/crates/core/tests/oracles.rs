// The shared oracles checked against closed forms before anything leans on them.
mod common;

use std::f64::consts::{PI, TAU};

#[test]
fn quadrature_on_known_integrals() {
    assert!((common::integrate(&|x| x.sin(), 0.0, PI, 1e-14) - 2.0).abs() < 1e-13);
    assert!((common::integrate(&|x| (-x * x).exp(), -8.0, 8.0, 1e-14) - PI.sqrt()).abs() < 1e-13);
    // a sharp peak: ∫ 1/(x² + a²) over the line segment is 2 atan(L/a)/a
    let a = 1e-4;
    let v = common::integrate(&|x| 1.0 / (x * x + a * a), -1.0, 1.0, 1e-10);
    assert!((v - 2.0 * (1.0 / a).atan() / a).abs() < 1e-9 * v);
}

#[test]
fn poisson_kernel_has_unit_mean() {
    for (x, y) in [(0.0, 0.0), (0.5, -0.2), (0.0, 0.99), (-0.999, 0.0)] {
        let m = common::integrate(&|t| common::poisson(x, y, t), 0.0, TAU, 1e-13) / TAU;
        assert!((m - 1.0).abs() < 1e-12, "({x},{y}) {m}");
    }
}

#[test]
fn bisection_finds_roots() {
    let r = common::bisect_increasing(&|x| x * x * x, 2.0, 0.0, 2.0);
    assert!((r - 2f64.cbrt()).abs() < 1e-15);
    let r = common::bisect_increasing(&|x| x.exp(), 10.0, 0.0, 5.0);
    assert!((r - 10f64.ln()).abs() < 1e-15);
}
