mod common;

use common::{position_wavefunction, random_density};
use evenparity::engineering::{cat_herald, prepare, SchemeConfig};
use evenparity::metrics::*;
use evenparity::{coherent_state, FockVector, State, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[test]
fn closed_form_agrees_with_heralding() {
    for n in 1..=30usize {
        let beta = re((n as f64).sqrt());
        let target = IdealCat::two(beta).state(160).unwrap();
        let expected = cat_fidelity_closed_form(n).unwrap();
        for lambda in [0.4, 0.9] {
            let h = cat_herald(beta, lambda, n, 160).unwrap();
            let f = fidelity(&h.state, &target).unwrap();
            assert!(
                (f - expected).abs() < 1e-9,
                "n={n} lambda={lambda}: {f} vs {expected}"
            );
        }
    }
}

#[test]
fn wigner_marginal_matches_position_density() {
    let states = [
        FockVector::vacuum(10),
        FockVector::basis(1, 10),
        coherent_state(re(2.0), 40),
    ];
    for psi in states {
        let grid = GridSpec::square(8.0, 201);
        let w = wigner(&State::Pure(psi.clone()), &grid).unwrap();
        let marginal = w.x_marginal();
        let dx = grid.dx();
        let tv: f64 = marginal
            .iter()
            .enumerate()
            .map(|(i, m)| (m - position_wavefunction(&psi, grid.x(i)).norm_sqr()).abs() * dx)
            .sum::<f64>()
            / 2.0;
        assert!(tv < 1e-3, "total variation {tv}");
    }
}

#[test]
fn parity_relation_for_random_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let origin = GridSpec::square(1e-3, 1);
    for _ in 0..10 {
        let rho = random_density(&mut rng, 12, 15);
        let expected: f64 = rho
            .diagonal()
            .iter()
            .enumerate()
            .map(|(j, p)| if j % 2 == 0 { *p } else { -p })
            .sum::<f64>()
            / PI;
        let w = wigner(&State::Mixed(rho), &origin).unwrap();
        assert!((w.values[[0, 0]] - expected).abs() < 1e-12);
    }
}

#[test]
fn negativity_is_stable_under_refinement() {
    let one = State::Pure(FockVector::basis(1, 4));
    let cat = State::Pure(IdealCat::two(re(3f64.sqrt())).state(60).unwrap());
    for (state, g) in [
        (one, GridSpec::square(6.0, 121)),
        (cat, GridSpec::for_beta(re(3f64.sqrt()))),
    ] {
        let a = negativity_volume(&wigner(&state, &g).unwrap());
        let b = negativity_volume(&wigner(&state, &g.refined()).unwrap());
        assert!((a - b).abs() < 0.01 * b, "{a} vs {b}");
    }
}

#[test]
fn cat_fringes_alternate_along_p() {
    let beta = re(10f64.sqrt());
    let cat = State::Pure(IdealCat::two(beta).state(80).unwrap());
    // a column at x = 0 through the interference region
    let g = GridSpec {
        x_min: -0.01,
        x_max: 0.01,
        p_min: -2.0,
        p_max: 2.0,
        nx: 1,
        np: 161,
    };
    let w = wigner(&cat, &g).unwrap();
    let col: Vec<f64> = w.values.column(0).to_vec();
    let sign_changes = col
        .windows(2)
        .filter(|p| p[0].signum() != p[1].signum())
        .count();
    // fringe period pi / (sqrt 2 |beta|) in p
    let expected = (4.0 / (PI / (2f64.sqrt() * beta.re))).round() as usize * 2;
    assert!(
        sign_changes + 2 >= expected && sign_changes <= expected + 2,
        "{sign_changes}"
    );
    assert!(col.iter().any(|v| *v < -0.25));
    // the lobes themselves are positive Gaussians
    let (x0, _) = quadratures(beta);
    let lobe = GridSpec::square(0.01, 1);
    let shifted = GridSpec {
        x_min: x0 + lobe.x_min,
        x_max: x0 + lobe.x_max,
        ..lobe
    };
    assert!(wigner(&cat, &shifted).unwrap().values[[0, 0]] > 0.15);
}

#[test]
fn negativity_drops_with_loss() {
    let beta = re(10f64.sqrt());
    let nn = |eta: f64| {
        let out = prepare(
            &SchemeConfig::two_component(beta, 0.82)
                .with_n(10)
                .with_eta(eta),
        )
        .unwrap();
        normalized_negativity(&out.state, beta, None).unwrap()
    };
    let (hi, lo) = (nn(0.99), nn(0.9));
    assert!(lo < hi, "{lo} vs {hi}");
}

#[test]
fn four_component_target_structure() {
    // photon-number weight on n = 0 and 2 (mod 4); odd classes vanish
    let goldens = [
        (2.0, 0.166429174284403, 0.8335708257155969),
        (10.0, 0.7040410316077442, 0.2959589683922555),
    ];
    for (b2, w0, w2) in goldens {
        let v = IdealCat::four(re(f64::sqrt(b2))).state(160).unwrap();
        let pops = v.populations();
        let class = |r: usize| pops.iter().skip(r).step_by(4).sum::<f64>();
        assert!((class(0) - w0).abs() < 1e-12 && (class(2) - w2).abs() < 1e-12);
        assert_eq!(class(1) + class(3), 0.0);
    }
}

#[test]
fn wigner_grid_serializes_with_header_fields() {
    let w = wigner(
        &State::Pure(FockVector::vacuum(2)),
        &GridSpec::square(3.0, 4),
    )
    .unwrap();
    let v = serde_json::to_value(&w).unwrap();
    assert_eq!(v["nx"], 4);
    assert_eq!(v["convention"], WIGNER_CONVENTION);
    assert_eq!(w.to_csv().lines().count(), 4);
    assert_eq!(w.to_le_bytes().len(), 16 * 8);
}
