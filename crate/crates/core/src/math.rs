//! Log-space factorials and scaled Laguerre recurrences.
//!
//! Everything that would otherwise need `(2n)!` or `x^k / k!` goes through
//! these helpers so that photon numbers in the hundreds stay finite.

use num_complex::Complex64 as C64;

/// `ln(k!)`.
#[inline]
pub fn ln_factorial(k: usize) -> f64 {
    statrs::function::factorial::ln_factorial(k as u64)
}

/// `ln C(n, k)`; `-inf` when `k > n`.
#[inline]
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `i^k` without going through `powi`.
#[inline]
pub fn i_pow(k: i64) -> C64 {
    match k.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Normalized generalized Laguerre values
/// `ell[n] = sqrt(n! / (n + k)!) * L_n^{(k)}(x)` for `n = 0..=n_max`.
///
/// The square-root factorial weight is folded into the three-term recurrence,
/// which keeps the values O(e^{x/2}) instead of O(x^n / n!). Every entry is
/// additionally multiplied by `exp(ln_prefactor)`; the recurrence is linear so
/// the factor is applied once to the seed.
pub fn scaled_laguerre(k: usize, x: f64, n_max: usize, ln_prefactor: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let kf = k as f64;
    let l0 = (ln_prefactor - 0.5 * ln_factorial(k)).exp();
    out.push(l0);
    if n_max == 0 {
        return out;
    }
    // ell_1 = sqrt(1/(k+1)!) (1 + k - x)
    let l1 = (1.0 + kf - x) * l0 / (kf + 1.0).sqrt();
    out.push(l1);
    for n in 1..n_max {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0 + kf - x) * out[n] - (nf * (nf + kf)).sqrt() * out[n - 1])
            / ((nf + 1.0) * (nf + 1.0 + kf)).sqrt();
        out.push(next);
    }
    out
}

/// Log-sum-exp of a slice, ignoring `-inf` entries.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laguerre_direct(n: usize, k: usize, x: f64) -> f64 {
        // explicit sum, fine for small n
        (0..=n)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                sign * (ln_binomial(n + k, n - i) - ln_factorial(i)).exp() * x.powi(i as i32)
            })
            .sum()
    }

    #[test]
    fn scaled_laguerre_matches_explicit_sum() {
        for &k in &[0usize, 1, 3, 7] {
            for &x in &[0.0, 0.3, 2.5, 9.0] {
                let ell = scaled_laguerre(k, x, 12, 0.0);
                for (n, v) in ell.iter().enumerate() {
                    let scale = (0.5 * (ln_factorial(n) - ln_factorial(n + k))).exp();
                    let expected = scale * laguerre_direct(n, k, x);
                    assert!(
                        (v - expected).abs() < 1e-8 * (1.0 + expected.abs()),
                        "k={k} x={x} n={n}: {v} vs {expected}"
                    );
                }
            }
        }
    }

    #[test]
    fn ln_factorial_small_values() {
        assert_eq!(ln_factorial(0), 0.0);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-13);
        assert!(ln_factorial(200).is_finite());
        assert!((ln_binomial(10, 3) - 120f64.ln()).abs() < 1e-12);
        assert_eq!(ln_binomial(3, 5), f64::NEG_INFINITY);
    }

    #[test]
    fn i_pow_cycles() {
        assert_eq!(i_pow(0), C64::new(1.0, 0.0));
        assert_eq!(i_pow(5), C64::new(0.0, 1.0));
        assert_eq!(i_pow(-1), C64::new(0.0, -1.0));
    }
}
