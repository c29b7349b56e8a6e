use evenparity::engineering::LAMBDA_UNIT_LIMIT;
use evenparity::metrics::{fidelity, IdealCat};
use evenparity::optimize::*;
use evenparity::{cat_herald, C64};

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[test]
fn non_integer_size_beats_both_neighbours() {
    let beta = re(2.5f64.sqrt());
    let lambda = 0.7;
    let r = optimize_cat_fidelity(beta, lambda, &SearchOptions::default()).unwrap();
    let baseline = [2usize, 3]
        .iter()
        .map(|&n| cat_fidelity_at(beta, lambda, beta * lambda, n, 100))
        .fold(0.0, f64::max);
    assert!(
        r.best_value > baseline - 1e-12,
        "{} vs {baseline}",
        r.best_value
    );
    let alpha = C64::new(r.best_params["alpha_re"], r.best_params["alpha_im"]);
    let again = cat_fidelity_at(beta, lambda, alpha, r.best_params["n"] as usize, 100);
    assert!((again - r.best_value).abs() < 1e-9);
}

#[test]
fn tiny_cat_reaches_vacuum_limit() {
    let beta = re(0.1f64.sqrt());
    let r = optimize_cat_fidelity(beta, 0.5, &SearchOptions::default()).unwrap();
    let target = IdealCat::two(beta).state(100).unwrap();
    let vacuum = evenparity::FockVector::vacuum(100);
    let f_vac = evenparity::metrics::pure_fidelity(&vacuum, &target).unwrap();
    assert!(r.best_value >= f_vac - 1e-12);
    assert!(f_vac > 0.99);
}

#[test]
fn optimization_dominates_default_parameters() {
    for b2 in [1.5f64, 4.0, 7.3] {
        let beta = re(b2.sqrt());
        let r = optimize_cat_fidelity(beta, 0.8, &SearchOptions::default()).unwrap();
        let n = evenparity::engineering::round_half_down(b2);
        let h = cat_herald(beta, 0.8, n, 100).unwrap();
        let base = fidelity(&h.state, &IdealCat::two(beta).state(100).unwrap()).unwrap();
        assert!(r.best_value >= base - 1e-12, "b2={b2}");
    }
}

#[test]
fn optimal_lambda_is_a_maximum() {
    let beta = re(10f64.sqrt());
    let r = optimal_lambda(beta, 10, 100).unwrap();
    let best = r.best_value;
    for l in [0.5, 0.95] {
        assert!(best >= cat_success_probability(beta, l, 10, 100).unwrap());
    }
    let beta20 = re(20f64.sqrt());
    let r20 = optimal_lambda(beta20, 20, 100).unwrap();
    assert!(!r20.boundary);
    assert!(r20.derivative.unwrap().abs() < 1e-6 * r20.best_value);
    assert!((r20.best_params["lambda"] - optimal_lambda_analytic(beta20, 20)).abs() < 1e-6);
}

#[test]
fn four_component_search_tracks_squeezing() {
    let beta = re(2.0);
    let opts = SearchOptions {
        n_trunc: 80,
        ..Default::default()
    };
    let unit = optimize_four_component(beta, LAMBDA_UNIT_LIMIT, &opts).unwrap();
    let weak = optimize_four_component(beta, 0.5, &opts).unwrap();
    assert!(weak.best_value < unit.best_value - 0.05);
    let again = four_component_value(beta, LAMBDA_UNIT_LIMIT, &unit.best_params, 80).unwrap();
    assert!((again - unit.best_value).abs() < 1e-9);
    let json = serde_json::to_value(&unit).unwrap();
    assert_eq!(json["trace"].as_array().unwrap().len(), unit.evaluations);
}

#[test]
fn scaling_fit_reports_every_size() {
    let sizes = [2.0, 4.0, 6.0, 8.0, 10.0];
    let fit = scaling_fit(&sizes, 60).unwrap();
    assert_eq!(fit.points.len(), 5);
    assert!(fit.exponent < 0.0 && fit.r_squared > 0.9);
    for (s, lam, pr) in &fit.points {
        let direct = cat_success_probability(re(s.sqrt()), *lam, s.round() as usize, 60).unwrap();
        assert!((direct - pr).abs() < 1e-15);
    }
}
