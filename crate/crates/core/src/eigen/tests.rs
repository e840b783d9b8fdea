use super::*;
use crate::kernel::Kernel;
use crate::model::{LimitConstants, ModelParams};
use crate::Error;

fn dense_top(op: &DiscreteOperator) -> f64 {
    op.to_dense()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn matches_dense_oracle() {
    let p = ModelParams::p1();
    for &(l, n) in &[(0.5, 40), (3.0, 120), (12.0, 300)] {
        let spec = OperatorSpec::for_lambda1(l, &p).with_resolution(n);
        let op = assemble(&spec).unwrap();
        let e = principal_eigenpair_of(&op, Method::Accelerated).unwrap();
        let oracle = dense_top(&op);
        assert!(
            (e.lambda_p - oracle).abs() < 1e-9,
            "l={l}: {} vs {oracle}",
            e.lambda_p
        );
        assert!(e.residual < 1e-10, "residual {}", e.residual);
        assert!(e.min_component() > 0.0);
    }
}

#[test]
fn plain_power_agrees_with_accelerated() {
    let p = ModelParams::p1();
    let spec = OperatorSpec::for_lambda1(2.0, &p).with_resolution(40);
    let op = assemble(&spec).unwrap();
    let a = principal_eigenpair_of(&op, Method::Accelerated).unwrap();
    let b = principal_eigenpair_of(&op, Method::Power).unwrap();
    assert!((a.lambda_p - b.lambda_p).abs() < 1e-10);
    for (x, y) in a.phi1.iter().zip(&b.phi1) {
        assert!(
            (x - y).abs() < 1e-5,
            "{x} {y} {} {}",
            a.residual,
            b.residual
        );
    }
}

#[test]
fn dense_matches_matvec() {
    let mut p = ModelParams::p1();
    p.kernel2 = Kernel::gaussian(0.7);
    p.d2 = 0.3;
    let spec = OperatorSpec::for_lambda1(4.0, &p).with_resolution(150);
    let op = assemble(&spec).unwrap();
    let m = op.to_dense();
    let x: Vec<f64> = (0..300).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
    let mut y = vec![0.0; 300];
    op.apply(&x, &mut y);
    let z = &m * nalgebra::DVector::from_vec(x);
    for i in 0..300 {
        assert!((y[i] - z[i]).abs() < 1e-11);
    }
}

#[test]
fn limits_in_domain_length() {
    let p = ModelParams::p1();
    let lim = LimitConstants::new(-1.0, 2.0, 2.0, -1.0, 1.0, 1.0);
    let small = lambda1(1e-3, &p).unwrap();
    assert!((small - lim.gamma_b).abs() < 1e-2, "small l: {small}");
    let large = lambda1(60.0, &p).unwrap();
    assert!(
        large < lim.gamma_a && lim.gamma_a - large < 5e-3,
        "large l: {large}"
    );
}

#[test]
fn increasing_in_length() {
    let p = ModelParams::p1();
    let values: Vec<f64> = (1..=12).map(|k| 0.5 * k as f64).collect();
    let table = sweep(
        |l| OperatorSpec::for_lambda1(l, &p),
        SweepVariable::L,
        &values,
        Some(Monotonicity::Increasing),
    )
    .unwrap();
    assert!(table.violations.is_empty(), "{:?}", table.violations);
    assert!(table.rows.iter().all(|r| r.residual < 1e-10));
}

#[test]
fn degenerate_first_diffusion() {
    let mut p = ModelParams::p1();
    p.d1 = 0.0;
    let l = 5.0;
    let spec = OperatorSpec::for_lambda1(l, &p).with_resolution(200);
    let full = principal_eigenpair(&spec).unwrap().lambda_p;
    let kappa = scalar_principal_with(p.d2, -p.b, &p.kernel2, l, 200).unwrap();
    let closed = degenerate_closed_form(-p.a, 2.0, 2.0, kappa);
    assert!((full - closed).abs() < 1e-9, "{full} vs {closed}");
}

#[test]
fn scalar_limits() {
    let k = Kernel::laplace(1.0);
    let short = scalar_principal(1.0, 0.0, &k, 1e-3).unwrap();
    assert!((short + 0.5).abs() < 1e-3);
    let long = scalar_principal(1.0, 0.0, &k, 80.0).unwrap();
    assert!(long < 0.0 && long > -2e-3);
}

#[test]
fn rescaled_problem_shares_sign() {
    let p = ModelParams::p1();
    for &l in &[0.2, 1.0, 4.0] {
        let a = lambda1(l, &p).unwrap();
        let b = lambda2(l, &p).unwrap();
        assert_eq!(a > 0.0, b > 0.0, "l={l}: {a} {b}");
    }
}

#[test]
fn rejects_bad_specs() {
    let p = ModelParams::p1();
    let spec = OperatorSpec::for_lambda1(1.0, &p).with_resolution(4);
    assert!(matches!(
        principal_eigenpair(&spec),
        Err(Error::InvalidParameter(_))
    ));
    let mut spec = OperatorSpec::for_lambda1(1.0, &p);
    spec.d1 = 0.0;
    spec.d2 = 0.0;
    let err = principal_eigenpair(&spec).unwrap_err();
    assert!(err.to_string().contains("d1 + d2 > 0"));
    let mut spec = OperatorSpec::for_lambda1(1.0, &p);
    spec.l = -1.0;
    assert!(principal_eigenpair(&spec).is_err());
}

#[test]
fn resolution_defaults() {
    assert_eq!(default_resolution(1.0), 200);
    assert_eq!(default_resolution(10.0), 400);
    assert_eq!(default_resolution(500.0), MAX_DEFAULT_CELLS);
}

#[test]
fn resolution_refinement() {
    let p = ModelParams::p1();
    for &l in &[1.0, 5.0] {
        let coarse =
            principal_eigenpair(&OperatorSpec::for_lambda1(l, &p).with_resolution(200)).unwrap();
        let fine =
            principal_eigenpair(&OperatorSpec::for_lambda1(l, &p).with_resolution(400)).unwrap();
        assert!((coarse.lambda_p - fine.lambda_p).abs() < 5e-3);
    }
}

#[test]
fn self_adjoint_case_is_a_maximum_of_the_quadratic_form() {
    let p = ModelParams::p1();
    let spec = OperatorSpec::for_lambda1(3.0, &p).with_resolution(100);
    let op = assemble(&spec).unwrap();
    let dense = op.to_dense();
    assert!((&dense - dense.transpose()).abs().max() < 1e-15);
    let sup = dense
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let e = principal_eigenpair_of(&op, Method::Accelerated).unwrap();
    assert!((e.lambda_p - sup).abs() < 1e-8);
}

#[test]
fn constant_test_vectors_bound_the_eigenvalue() {
    let mut p = ModelParams::p1();
    p.d2 = 0.4;
    p.kernel2 = Kernel::gaussian(2.0);
    let lim = LimitConstants::new(-p.a, 2.0, 2.0, -p.b, p.d1, p.d2);
    for &l in &[0.3, 2.0, 15.0] {
        let spec = OperatorSpec::for_lambda1(l, &p);
        let op = assemble(&spec).unwrap();
        let n = op.cells();
        let mut phi = vec![lim.theta_a; 2 * n];
        phi[n..].fill(1.0);
        let mut image = vec![0.0; 2 * n];
        op.apply(&phi, &mut image);
        assert!(image
            .iter()
            .zip(&phi)
            .all(|(y, x)| y - lim.gamma_a * x <= 1e-12));
        let e = principal_eigenpair_of(&op, Method::Accelerated).unwrap();
        assert!(e.lambda_p <= lim.gamma_a + 1e-6);
        assert!(e.lambda_p >= lim.gamma_b - 1e-6);
    }
}

#[test]
fn rescaled_sandwich() {
    let mut p = ModelParams::p1();
    p.nonlinearity = crate::Nonlinearity::saturating(3.0, 1.5);
    let (hp, gp) = (3.0f64, 1.5f64);
    for &l in &[0.1, 1.0, 10.0, 100.0] {
        let a = lambda1(l, &p).unwrap();
        let b = lambda2(l, &p).unwrap();
        assert_eq!(a > 0.0, b > 0.0);
        if a >= 0.0 {
            assert!(
                a / hp.max(gp) <= b + 1e-12 && b <= a / hp.min(gp) + 1e-12,
                "l={l}"
            );
        }
    }
}

#[test]
fn row_sums_bounded_by_diffusion() {
    let p = ModelParams::p1_with_diffusion(3.0);
    let op = assemble(&OperatorSpec::for_lambda1(4.0, &p)).unwrap();
    let nodes = cell_centers(4.0, op.cells());
    for (s, x) in op.kernel_row_sums(0).iter().zip(&nodes) {
        assert!(*s <= 3.0 * p.kernel1.boundary_weight(*x) + 1e-12);
    }
}

#[test]
fn scalar_examples() {
    let k = Kernel::laplace(1.0);
    let kappa = scalar_principal(1.0, 0.0, &k, 1.0).unwrap();
    assert!(kappa > -0.5 && kappa < 0.0);
    let shifted = scalar_principal(1.0, 0.7, &k, 1.0).unwrap();
    assert!((shifted - kappa - 0.7).abs() < 1e-12);
    let long = scalar_principal(2.0, -0.3, &k, 500.0).unwrap();
    assert!((long + 0.3).abs() < 0.02);
}

#[test]
fn diffusion_asymptotics() {
    let p = ModelParams::p1();
    let at = |d1: f64, d2: f64, l: f64| {
        let mut s = OperatorSpec::for_lambda1(l, &p);
        s.d1 = d1;
        s.d2 = d2;
        principal_eigenpair(&s).unwrap().lambda_p
    };
    // Large joint diffusion drives lambda_p to -infinity like d * kappa(l).
    assert!(at(100.0, 100.0, 1.0) < -5.0);
    let kappa = scalar_principal(1.0, 0.0, &p.kernel1, 10.0).unwrap();
    let big = at(1000.0, 1000.0, 10.0);
    assert!(big < -5.0 && (big - 1000.0 * kappa).abs() < 1.5, "{big}");
    let zeta = scalar_principal(1.0, -1.0, &p.kernel1, 10.0).unwrap();
    assert!((at(1.0, 1e4, 10.0) - zeta).abs() < 0.05);
    assert!((at(1e-3, 1e-3, 10.0) - 1.0).abs() < 0.05);
}

#[test]
fn decreasing_in_diffusion() {
    let p = ModelParams::p1();
    let values = [0.1, 0.5, 1.0, 2.0, 4.0, 8.0];
    let table = sweep(
        |d1| {
            let mut s = OperatorSpec::for_lambda1(5.0, &p);
            s.d1 = d1;
            s
        },
        SweepVariable::D1,
        &values,
        Some(Monotonicity::Decreasing),
    )
    .unwrap();
    assert!(table.violations.is_empty());
}

#[test]
fn sweep_records_failures() {
    let p = ModelParams::p1();
    let table = sweep(
        |l| OperatorSpec::for_lambda1(l, &p),
        SweepVariable::L,
        &[1.0, -1.0, 2.0],
        Some(Monotonicity::Increasing),
    )
    .unwrap();
    assert!(table.rows[1].lambda_p.is_none() && table.rows[1].error.is_some());
    assert!(table.violations.is_empty());
    assert!(sweep(
        |l| OperatorSpec::for_lambda1(l, &p),
        SweepVariable::L,
        &[],
        None
    )
    .is_err());
}
