mod common;

use common::*;
use evenparity::beam_splitter::BeamSplitterConvention;
use evenparity::detector::{loss_weight, povm_element, povm_element_with};
use evenparity::{FockVector, State, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

#[test]
fn povm_matches_dense_kraus_channel() {
    let u = beam_splitter_unitary(FRAC_PI_4);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..6 {
        let control = random_vector(&mut rng, 4, K);
        let signal = random_density(&mut rng, 3, 3);
        for n in 0..=3 {
            for eta in [1.0, 0.9, 0.6] {
                let effect = povm_element(&control, n, eta, K).unwrap();
                let ours = effect.probability(&State::Mixed(signal.clone()));
                let oracle = brute_force_probability(&u, &signal, &control, n, eta);
                assert!(
                    (ours - oracle).abs() < 1e-9,
                    "trial {trial} n={n} eta={eta}: {ours} vs {oracle}"
                );
            }
        }
    }
}

#[test]
fn loss_weights_match_monte_carlo() {
    // |3,4> and |5,5> through the splitter, then binomial thinning per arm
    let (n, eta, samples) = (3usize, 0.8, 1_000_000usize);
    let bs = BeamSplitterConvention::symmetric();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for (p, q) in [(3usize, 4usize), (5, 5)] {
        let m = p + q;
        let block = bs.sector(m);
        let dist: Vec<f64> = (0..=m).map(|x| block.entry(x, p).norm_sqr()).collect();
        let analytic: f64 = (0..=m)
            .map(|x| dist[x] * loss_weight(x, m - x, n, eta))
            .sum();

        // the POVM element must assign the same probability to |p> with control |q>
        let control = FockVector::basis(q, 2 * K + 4);
        let effect = povm_element(&control, n, eta, 40).unwrap();
        let povm = effect.probability(&State::Pure(FockVector::basis(p, 2 * K + 4)));
        assert!((povm - analytic).abs() < 1e-12, "{povm} vs {analytic}");

        let mut hits = 0usize;
        for _ in 0..samples {
            let mut u: f64 = rng.gen();
            let mut x = m;
            for (i, w) in dist.iter().enumerate() {
                if u < *w {
                    x = i;
                    break;
                }
                u -= w;
            }
            let a = (0..x).filter(|_| rng.gen_bool(eta)).count();
            let b = (0..m - x).filter(|_| rng.gen_bool(eta)).count();
            if a == n && b == n {
                hits += 1;
            }
        }
        let est = hits as f64 / samples as f64;
        let sigma = (analytic * (1.0 - analytic) / samples as f64).sqrt();
        assert!(
            (est - analytic).abs() < 3.0 * sigma,
            "|{p},{q}>: MC {est} vs {analytic} (sigma {sigma})"
        );
    }
}

#[test]
fn splitter_conventions_agree_up_to_phases() {
    // [[1,1],[i,-i]]/sqrt2 = symmetric * diag(1,-i): an output phase only.
    // [[1,1],[1,-1]]/sqrt2 = diag(1,-i) * symmetric * diag(1,-i): also an
    // input phase (-i)^k on the control photons.
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let i = C64::new(0.0, FRAC_1_SQRT_2);
    let output_phase = BeamSplitterConvention::custom([[s, s], [i, -i]]).unwrap();
    let both_phases = BeamSplitterConvention::custom([[s, s], [s, -s]]).unwrap();
    let symmetric = BeamSplitterConvention::symmetric();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pr = |bs: &BeamSplitterConvention, c: &FockVector, n, eta, sig: &State| {
        povm_element_with(bs, c, n, eta, 12)
            .unwrap()
            .probability(sig)
    };
    for _ in 0..4 {
        let control = random_vector(&mut rng, 7, 12);
        let signal = State::Mixed(random_density(&mut rng, 9, 12));
        for (n, eta) in [(2usize, 1.0), (3, 0.85)] {
            let sym = pr(&symmetric, &control, n, eta, &signal);
            let a = pr(&output_phase, &control, n, eta, &signal);
            assert!((a - sym).abs() < 1e-12, "{a} vs {sym}");
            let b = pr(&both_phases, &control, n, eta, &signal);
            let rotated = pr(&symmetric, &control.rotated(FRAC_PI_2), n, eta, &signal);
            assert!((b - rotated).abs() < 1e-12, "{b} vs {rotated}");
        }
        // phase-insensitive controls see no difference at all
        let fock = FockVector::basis(4, 12);
        let sym = pr(&symmetric, &fock, 3, 0.9, &signal);
        for bs in [&output_phase, &both_phases] {
            assert!((pr(bs, &fock, 3, 0.9, &signal) - sym).abs() < 1e-12);
        }
    }
}
