use super::*;
use crate::eigen::lambda1;
use proptest::prelude::*;

fn p1_d6() -> ModelParams {
    ModelParams::p1_with_diffusion(6.0)
}

#[test]
fn ell_star_straddles_zero() {
    let params = p1_d6();
    let t = find_ell_star(&params).unwrap();
    assert_eq!(t.name, ThresholdName::EllStar);
    assert!(t.width_within_tolerance(), "{t:?}");
    assert!(t.certificate_flips());
    assert!(t.bracket.0 <= t.value && t.value <= t.bracket.1);
    let n = t.resolution.unwrap();
    let below = lambda1_at_resolution(t.value - 0.01, &params, n).unwrap();
    let above = lambda1_at_resolution(t.value + 0.01, &params, n).unwrap();
    assert!(below < 0.0 && above > 0.0, "{below} {above}");
    let at = lambda1_at_resolution(t.value, &params, n).unwrap();
    assert!(at.abs() < EIGEN_TOL, "{at}");
}

#[test]
fn ell_star_needs_intermediate_regime() {
    // P1 itself has R* >= 1 and spreads from any habitat.
    assert_eq!(
        find_ell_star(&ModelParams::p1()).unwrap_err().kind(),
        "no_threshold"
    );
    assert_eq!(
        find_ell_star(&ModelParams::subcritical())
            .unwrap_err()
            .kind(),
        "no_threshold"
    );
}

#[test]
fn ell_star_is_deterministic() {
    let a = find_ell_star(&p1_d6()).unwrap();
    let b = find_ell_star(&p1_d6()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn larger_diffusion_needs_larger_habitat() {
    let ells: Vec<f64> = [4.0, 6.0, 10.0]
        .iter()
        .map(|&d| {
            find_ell_star(&ModelParams::p1_with_diffusion(d))
                .unwrap()
                .value
        })
        .collect();
    assert!(ells.windows(2).all(|w| w[1] > w[0]), "{ells:?}");
}

#[test]
fn nu1_limits() {
    let params = ModelParams::p1();
    // d2 -> inf: the v-equation is pinned at zero and nu1 -> -a.
    let far = nu1(1e4, &params, 1.0).unwrap();
    assert!((far + params.a).abs() < 0.05, "{far}");
    let lambda_cap = derived_constants(&params).lambda_cap;
    assert!(nu1(lambda_cap, &params, 1.0).unwrap() > 0.0);
    assert!(nu1(0.0, &params, 1.0).unwrap_err().is_validation());
}

#[test]
fn nu1_matches_small_d1_eigenvalue() {
    let params = ModelParams::p1();
    for d2 in [1.0, 5.0, 20.0] {
        let limit = nu1(d2, &params, 1.0).unwrap();
        let q = ModelParams {
            d1: 1e-4,
            d2,
            ..params.clone()
        };
        let lam = lambda1(1.0, &q).unwrap();
        assert!((lam - limit).abs() < 0.05, "d2 = {d2}: {lam} vs {limit}");
    }
}

#[test]
fn d2_under_closed_form() {
    // nu1(d2) = 0 exactly when a (b - d2 kappa1) = H'G', so
    // d2_under = Lambda / (-2 kappa1) for a = 1.
    let params = ModelParams::p1();
    let kappa = kappa1(&params, params.h0).unwrap();
    let lambda_cap = derived_constants(&params).lambda_cap;
    let oracle = lambda_cap / (-2.0 * kappa);
    let t = find_d2_under(&params).unwrap();
    assert!(
        (t.value - oracle).abs() < 1e-6 * oracle,
        "{} vs {oracle}",
        t.value
    );
    assert!(t.value > lambda_cap);
    assert!(t.certificate_flips());
}

#[test]
fn linked_diffusion_threshold() {
    let params = ModelParams::p1();
    let report = find_d_thresholds(
        &params,
        DMode::Linked {
            link: Link::identity(),
        },
    )
    .unwrap();
    let DThresholdReport::Threshold {
        r_star_root,
        threshold,
    } = report
    else {
        panic!("expected a threshold");
    };
    // R*(d, d) = 4 / (1 + d/2)^2 = 1 at d = 2.
    assert_eq!(r_star_root.unwrap(), 2.0);
    assert_eq!(threshold.name, ThresholdName::D1Star);
    assert!(threshold.value > 2.0);
    assert!(threshold.width_within_tolerance());
    let d = threshold.value;
    let at = ModelParams {
        d1: d,
        d2: d,
        ..params
    };
    let lam = lambda2_at_resolution(at.h0, &at, threshold.resolution.unwrap()).unwrap();
    assert!(lam.abs() < EIGEN_TOL, "{lam}");
}

#[test]
fn power_link_root_solves_r_star() {
    let params = ModelParams::p1();
    let link = Link::Power {
        coefficient: 2.0,
        exponent: 0.5,
    };
    let report = find_d_thresholds(&params, DMode::Linked { link }).unwrap();
    let DThresholdReport::Threshold {
        r_star_root,
        threshold,
    } = report
    else {
        panic!("expected a threshold");
    };
    let d = r_star_root.unwrap();
    let r = crate::model::r_star(4.0, 1.0, 1.0, d, link.eval(d));
    assert!((r - 1.0).abs() < 1e-14, "{r}");
    assert!(threshold.value > d);
}

#[test]
fn small_fixed_d2_threshold() {
    let params = ModelParams {
        d2: 1.0,
        ..ModelParams::p1()
    };
    let report = find_d_thresholds(&params, DMode::FixedD2Small).unwrap();
    let DThresholdReport::Threshold {
        r_star_root,
        threshold,
    } = report
    else {
        panic!("expected a threshold");
    };
    // 4 = (1 + D/2) * 3/2
    assert!((r_star_root.unwrap() - 10.0 / 3.0).abs() < 1e-12);
    assert_eq!(threshold.name, ThresholdName::D1Hat);
    assert!(threshold.value > 10.0 / 3.0);
    assert!(threshold.certificate_flips());
}

#[test]
fn mid_fixed_d2_threshold() {
    let params = ModelParams {
        d2: 8.0,
        ..ModelParams::p1()
    };
    let report = find_d_thresholds(&params, DMode::FixedD2Mid).unwrap();
    let DThresholdReport::Threshold {
        r_star_root,
        threshold,
    } = report
    else {
        panic!("expected a threshold");
    };
    assert!(r_star_root.is_none());
    assert_eq!(threshold.name, ThresholdName::D1Tilde);
    assert!(threshold.certificate_flips());
    assert!(threshold.width_within_tolerance());
}

#[test]
fn large_d2_is_a_regime() {
    let params = ModelParams::p1();
    let d2_under = find_d2_under(&params).unwrap().value;
    let big = ModelParams {
        d2: 2.0 * d2_under,
        ..params
    };
    let report = find_d_thresholds(&big, DMode::FixedD2Large).unwrap();
    let DThresholdReport::Regime {
        samples,
        d2_under: reported,
        ..
    } = report
    else {
        panic!("expected a regime report");
    };
    assert!((reported - d2_under).abs() < 1e-12);
    assert_eq!(samples.len(), 3);
    assert!(samples.iter().all(|&(_, lam)| lam < 0.0), "{samples:?}");
}

#[test]
fn wrong_mode_names_the_right_one() {
    let params = ModelParams {
        d2: 1.0,
        ..ModelParams::p1()
    };
    let err = find_d_thresholds(&params, DMode::FixedD2Mid).unwrap_err();
    assert_eq!(err.kind(), "wrong_mode");
    assert!(err.to_string().contains("fixed_d2_small"), "{err}");
    let err = find_d_thresholds(&ModelParams::subcritical(), DMode::FixedD2Small).unwrap_err();
    assert_eq!(err.kind(), "precondition");
}

#[test]
fn bad_links_rejected() {
    assert!(Link::Linear { slope: 0.0 }.validate().is_err());
    assert!(Link::Power {
        coefficient: 1.0,
        exponent: -1.0
    }
    .validate()
    .is_err());
    assert!(Link::Power {
        coefficient: 2.0,
        exponent: 0.5
    }
    .validate()
    .is_ok());
    let link: Link = serde_json::from_str(r#"{"link":"linear","slope":2.0}"#).unwrap();
    assert_eq!(link, Link::Linear { slope: 2.0 });
}

#[test]
fn mu_star_flips_verdict() {
    let params = p1_d6();
    let t = find_mu_star(&params, Link::identity(), &MuSearch::default()).unwrap();
    assert_eq!(t.name, ThresholdName::Mu1Star);
    assert!(t.certificate_flips(), "{t:?}");
    assert!(t.width_within_tolerance(), "{t:?}");
    let bound = vanishing_mu_bound(&params, find_ell_star(&params).unwrap().value).unwrap();
    assert!(2.0 * t.value > bound);
    let run = |mu: f64| {
        let p = ModelParams {
            mu1: mu,
            mu2: mu,
            ..params.clone()
        };
        classify(&p, &ClassifyPolicy::default()).unwrap().verdict
    };
    assert_eq!(run(2.0 * t.value), Verdict::Spreading);
    assert_eq!(run(0.5 * t.value), Verdict::Vanishing);
}

#[test]
fn mu_star_needs_small_habitat() {
    let params = ModelParams { h0: 5.0, ..p1_d6() };
    let err = find_mu_star(&params, Link::identity(), &MuSearch::default()).unwrap_err();
    assert_eq!(err.kind(), "precondition");
}

#[test]
fn vanishing_bound_is_small_and_positive() {
    let params = p1_d6();
    let ell = find_ell_star(&params).unwrap().value;
    let bound = vanishing_mu_bound(&params, ell).unwrap();
    assert!(bound > 0.0 && bound < 1.0, "{bound}");
    assert!(vanishing_mu_bound(&params, 0.5).is_err());
}

#[test]
fn decision_tree_branches() {
    let vanish = decision_tree(&ModelParams::subcritical()).unwrap();
    assert_eq!(vanish.verdict, RegimeVerdict::Vanishing);
    assert!(vanish.summary.starts_with("vanishing, R0="));
    assert!(vanish.certificates.iter().any(|c| c.kind == "mass_bound"));

    let spread = decision_tree(&ModelParams::p1()).unwrap();
    assert_eq!(spread.verdict, RegimeVerdict::Spreading);
    assert!(spread.summary.starts_with("spreading, R*="));

    let mid = decision_tree(&p1_d6()).unwrap();
    assert_eq!(mid.verdict, RegimeVerdict::MuDependent);
    assert!(mid
        .summary
        .starts_with("mu-dependent; thresholds available"));
    let ell = mid.ell_star.unwrap();

    let big = decision_tree(&ModelParams {
        h0: ell + 0.5,
        ..p1_d6()
    })
    .unwrap();
    assert_eq!(big.verdict, RegimeVerdict::Spreading);

    let slow = decision_tree(&ModelParams {
        mu1: 1e-3,
        mu2: 1e-3,
        ..p1_d6()
    })
    .unwrap();
    assert_eq!(slow.verdict, RegimeVerdict::Vanishing);
}

#[test]
fn regime_report_serializes() {
    let report = decision_tree(&p1_d6()).unwrap();
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["verdict"], "mu_dependent");
    assert!(json["R0"].as_f64().unwrap() > 1.0);
    assert!(json["Rstar"].as_f64().unwrap() < 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn nu1_decreases_in_d2(d2 in 0.1f64..1e3, factor in 1.01f64..10.0) {
        let params = ModelParams::p1();
        let a = nu1(d2, &params, 1.0).unwrap();
        let b = nu1(d2 * factor, &params, 1.0).unwrap();
        prop_assert!(b < a);
        prop_assert!(b > -params.a - 1e-12);
    }

    #[test]
    fn link_sum_inverts(slope in 0.1f64..10.0, exponent in 0.3f64..3.0, total in 1e-3f64..1e3) {
        for link in [Link::Linear { slope }, Link::Power { coefficient: slope, exponent }] {
            let s = link.invert_sum(total);
            prop_assert!((s + link.eval(s) - total).abs() < 1e-9 * total.max(1.0));
        }
    }
}
