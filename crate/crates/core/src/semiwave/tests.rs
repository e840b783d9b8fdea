use super::*;
use crate::model::equilibrium;

fn cauchy_params(scale: f64) -> ModelParams {
    ModelParams {
        kernel1: Kernel::cauchy(scale),
        kernel2: Kernel::cauchy(scale),
        ..ModelParams::p1()
    }
}

#[test]
fn far_tail_flux_oracle() {
    // int_L^inf int_s^inf e^{-t}/2 dt ds = e^{-L}/2
    for l in [0.5, 2.0, 7.0] {
        let got = far_tail_flux(&Kernel::laplace(1.0), l).unwrap();
        assert!((got - 0.5 * (-l).exp()).abs() < 1e-12, "{got}");
    }
    assert!(far_tail_flux(&Kernel::cauchy(1.0), 10.0)
        .unwrap()
        .is_infinite());
    let truncated = Kernel::cauchy(1.0).truncated(5).unwrap();
    assert_eq!(far_tail_flux(&truncated, 10.0).unwrap(), 0.0);
}

#[test]
fn zero_expansion_rates_give_zero_speed() {
    let params = ModelParams {
        mu1: 0.0,
        mu2: 0.0,
        ..ModelParams::p1()
    };
    let s = solve_semiwave(&params, 0.0, None, 20.0).unwrap();
    assert_eq!(s.c, 0.0);
    assert_eq!(s.speed_gap, 0.0);
}

#[test]
fn reference_profile() {
    let params = ModelParams::p1();
    let s = solve_semiwave(&params, 0.0, None, 60.0).unwrap();
    let (u, v) = equilibrium(&params, 0.0).unwrap();
    assert!(s.c > 0.0);
    assert!((s.far_field.0 - u).abs() < 1e-12 && (s.far_field.1 - v).abs() < 1e-12);
    assert!(s.far_field_mismatch() < 0.01, "{}", s.far_field_mismatch());
    assert!(s.monotone());
    assert_eq!(*s.p.last().unwrap(), 0.0);
    assert_eq!(*s.q.last().unwrap(), 0.0);
    assert!(s.speed_gap < 1e-5 * s.c);
    assert!(s.profile_residual < 1e-6, "{}", s.profile_residual);
    let trap = trapezoid_residual(&s, &params, 4);
    assert!(trap < 5e-3, "{trap}");
    // The speed is bounded by the flux of the constant far field.
    assert!(s.c < params.mu1 * u * 0.5 + params.mu2 * v * 0.5);
}

#[test]
fn cut_off_length_barely_matters() {
    let params = ModelParams::p1();
    let a = solve_semiwave(&params, 0.0, None, 30.0).unwrap();
    let b = solve_semiwave(&params, 0.0, None, 60.0).unwrap();
    assert!((a.c - b.c).abs() < 0.005 * b.c, "{} {}", a.c, b.c);
}

#[test]
fn multi_start_uniqueness() {
    let params = ModelParams::p1();
    let opts = SemiWaveOptions::new(0.0, None, 30.0);
    let spread = uniqueness_spread(&params, &opts, &[0.1, 1.0, 2.839]).unwrap();
    assert!(spread < 1e-5, "{spread}");
}

#[test]
fn thin_tail_limits() {
    let params = ModelParams::p1();
    let table = speed_limits(&params, &[0.01, 0.1], &[Some(2), Some(20), None], 30.0).unwrap();
    assert!(table.increasing_in_n);
    assert!(table.decreasing_in_sigma);
    assert!(!table.heavy_tailed && !table.accelerating);
    let full = solve_semiwave(&params, 0.0, None, 30.0).unwrap().c;
    let c20 = table
        .rows
        .iter()
        .find(|r| r.sigma == 0.01 && r.n == Some(20))
        .and_then(|r| r.c)
        .unwrap();
    assert!((c20 - full).abs() < 0.02 * full, "{c20} vs {full}");
    assert!(c20 <= full);
}

#[test]
fn heavy_tail_speeds_keep_growing() {
    let params = cauchy_params(10.0);
    let ns: Vec<Option<u32>> = [20, 40, 80, 160].iter().map(|&n| Some(n)).collect();
    let table = speed_limits(&params, &[0.01], &ns, DEFAULT_LENGTH).unwrap();
    let cs: Vec<f64> = table.rows.iter().map(|r| r.c.unwrap()).collect();
    assert!(cs.windows(2).all(|w| w[1] > w[0]), "{cs:?}");
    assert!(cs[3] / cs[0] > 3.0, "{cs:?}");
    assert!(table.heavy_tailed && table.accelerating);
}

#[test]
fn untruncated_heavy_tail_escapes() {
    let err = solve_semiwave(&cauchy_params(1.0), 0.0, None, 10.0).unwrap_err();
    assert_eq!(err.kind(), "speed_escape");
}

#[test]
fn predicted_speed_flags_acceleration() {
    let mut params = ModelParams::p1();
    params.kernel2 = Kernel::cauchy(1.0);
    assert_eq!(
        predicted_speed(&params).unwrap(),
        PredictedSpeed::Accelerated
    );
    assert!(predicted_speed(&ModelParams::subcritical()).is_err());
}

#[test]
fn faster_expansion_faster_wave() {
    let params = ModelParams::p1();
    let doubled = ModelParams {
        mu1: 2.0,
        mu2: 2.0,
        ..params.clone()
    };
    let a = predicted_speed_with(&params, 30.0, DEFAULT_DX).unwrap();
    let b = predicted_speed_with(&doubled, 30.0, DEFAULT_DX).unwrap();
    match (a, b) {
        (PredictedSpeed::Finite { c: ca }, PredictedSpeed::Finite { c: cb }) => assert!(cb > ca),
        other => panic!("{other:?}"),
    }
}

#[test]
fn rejects_bad_input() {
    let params = ModelParams::p1();
    assert!(solve_semiwave(&params, -0.1, None, 30.0)
        .unwrap_err()
        .is_validation());
    assert!(solve_semiwave(&params, 0.0, None, 0.0)
        .unwrap_err()
        .is_validation());
    assert!(speed_limits(&params, &[], &[None], 30.0).is_err());
    // Perturbation large enough to remove the equilibrium.
    assert_eq!(
        solve_semiwave(&params, 2.0, None, 30.0).unwrap_err().kind(),
        "no_positive_equilibrium"
    );
}
