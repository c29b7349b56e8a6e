//! Dense brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use evenparity::math::ln_binomial;
use evenparity::{DensityMatrix, FockVector, C64};
use ndarray::Array2;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Per-mode cutoff of the dense two-mode space; sectors up to this total
/// photon number are represented exactly.
pub const K: usize = 6;
pub const D: usize = K + 1;

fn idx(a: usize, b: usize) -> usize {
    a * D + b
}

/// `exp(m)` by scaling and squaring a Taylor series.
pub fn expm(m: &Array2<C64>) -> Array2<C64> {
    let norm = m.iter().map(|z| z.norm()).sum::<f64>();
    let s = (norm.max(1.0).log2().ceil() as i32 + 1).max(0);
    let scaled = m.mapv(|z| z / 2f64.powi(s));
    let dim = m.nrows();
    let mut result = Array2::<C64>::eye(dim);
    let mut term = Array2::<C64>::eye(dim);
    for k in 1..30 {
        term = term.dot(&scaled).mapv(|z| z / k as f64);
        result += &term;
    }
    for _ in 0..s {
        result = result.dot(&result);
    }
    result
}

/// Dense two-mode unitary `exp(i theta (a^dag b + b^dag a))`; `theta = pi/4`
/// maps `a^dag -> (a^dag + i b^dag)/sqrt 2`.
pub fn beam_splitter_unitary(theta: f64) -> Array2<C64> {
    let mut g = Array2::<C64>::zeros((D * D, D * D));
    for a in 0..D {
        for b in 0..D {
            // a^dag b |a, b> = sqrt((a+1) b) |a+1, b-1>
            if a + 1 < D && b > 0 {
                let v = ((a + 1) as f64 * b as f64).sqrt();
                g[[idx(a + 1, b - 1), idx(a, b)]] += C64::new(v, 0.0);
                g[[idx(a, b), idx(a + 1, b - 1)]] += C64::new(v, 0.0);
            }
        }
    }
    expm(&g.mapv(|z| z * C64::new(0.0, theta)))
}

/// Single-mode pure-loss Kraus operators `K_k`.
pub fn loss_kraus(eta: f64) -> Vec<Array2<C64>> {
    (0..D)
        .map(|k| {
            let mut op = Array2::<C64>::zeros((D, D));
            for m in k..D {
                let amp = if eta == 1.0 {
                    if k == 0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    (0.5 * (ln_binomial(m, k)
                        + (m - k) as f64 * eta.ln()
                        + k as f64 * (1.0 - eta).ln()))
                    .exp()
                };
                op[[m - k, m]] = C64::new(amp, 0.0);
            }
            op
        })
        .collect()
}

fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let mut out = Array2::<C64>::zeros((D * D, D * D));
    for i in 0..D {
        for j in 0..D {
            for k in 0..D {
                for l in 0..D {
                    out[[idx(i, k), idx(j, l)]] = a[[i, j]] * b[[k, l]];
                }
            }
        }
    }
    out
}

/// Probability of `(n, n)` for `signal` (mode a) and a pure `control`
/// (mode b) through splitter `u` and loss `eta` on both outputs.
pub fn brute_force_probability(
    u: &Array2<C64>,
    signal: &DensityMatrix,
    control: &FockVector,
    n: usize,
    eta: f64,
) -> f64 {
    let mut rho = Array2::<C64>::zeros((D * D, D * D));
    for a in 0..signal.dim().min(D) {
        for a2 in 0..signal.dim().min(D) {
            for b in 0..control.len().min(D) {
                for b2 in 0..control.len().min(D) {
                    rho[[idx(a, b), idx(a2, b2)]] =
                        signal.0[[a, a2]] * control.get(b) * control.get(b2).conj();
                }
            }
        }
    }
    let u_dag = u.t().mapv(|z| z.conj());
    let out = u.dot(&rho).dot(&u_dag);
    let kraus = loss_kraus(eta);
    let mut p = 0.0;
    for k1 in &kraus {
        for k2 in &kraus {
            let op = kron(k1, k2);
            // only the (n, n) diagonal entry is needed
            let row = op.row(idx(n, n));
            let v = out.dot(&row.mapv(|z| z.conj()));
            p += row.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<C64>().re;
        }
    }
    p
}

pub fn random_vector(rng: &mut ChaCha8Rng, support: usize, n_trunc: usize) -> FockVector {
    let mut amps = vec![C64::new(0.0, 0.0); n_trunc + 1];
    for a in amps.iter_mut().take(support) {
        *a = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    FockVector::new(amps).normalized().unwrap()
}

/// Random mixture of three random pure states.
pub fn random_density(rng: &mut ChaCha8Rng, support: usize, n_trunc: usize) -> DensityMatrix {
    let mut rho = DensityMatrix::zeros(n_trunc);
    for _ in 0..3 {
        let w: f64 = rng.gen_range(0.1..1.0);
        let v = random_vector(rng, support, n_trunc);
        rho.0 = &rho.0 + &v.to_density().0.mapv(|z| z * w);
    }
    rho.normalized().unwrap()
}

/// Position wavefunction `<x|psi>` from normalized Hermite functions
/// (vacuum variance 1/2).
pub fn position_wavefunction(psi: &FockVector, x: f64) -> C64 {
    let mut h0 = std::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp();
    let mut h1 = std::f64::consts::SQRT_2 * x * h0;
    let mut acc = psi.get(0) * h0 + psi.get(1) * h1;
    for k in 2..psi.len() {
        let kf = k as f64;
        let h2 = (2.0 / kf).sqrt() * x * h1 - ((kf - 1.0) / kf).sqrt() * h0;
        acc += psi.get(k) * h2;
        h0 = h1;
        h1 = h2;
    }
    acc
}
