//! Fixtures shared by the benchmarks.

use evenparity::{cat_herald, FockVector, SchemeConfig, State, C64};

pub fn real(b2: f64) -> C64 {
    C64::new(b2.sqrt(), 0.0)
}

/// Flat control long enough for the lossy sums at `(n, eta)`.
pub fn flat_control(n: usize, eta: f64) -> FockVector {
    FockVector::flat(2 * evenparity::default_cutoff(n, eta))
}

/// Normalized heralded cat of size `b2`.
pub fn heralded_cat(b2: f64) -> State {
    let n = b2.round() as usize;
    cat_herald(real(b2), 0.9, n, 100)
        .and_then(|h| h.normalized_state())
        .expect("heralded cat")
}

pub fn four_component(b2: f64) -> SchemeConfig {
    SchemeConfig::four_component(real(b2), evenparity::LAMBDA_UNIT_LIMIT).with_trunc(80)
}
