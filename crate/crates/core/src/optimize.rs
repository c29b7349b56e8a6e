//! Parameter searches: cat fidelity over the control amplitude and outcome,
//! the squeezing that maximizes the heralding rate, the rate's scaling law,
//! and the four-component pipeline's free parameters.
//!
//! Continuous parameters use a Nelder-Mead simplex (or golden-section search
//! in one dimension); integer parameters are enumerated over small windows.
//! Nothing is random, so traces are reproducible.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

use crate::engineering::{four_component_pipeline, herald, round_half_down, SchemeConfig};
use crate::error::{Error, Result};
use crate::fock::{coherent_state, DEFAULT_TRUNCATION};
use crate::metrics::{fidelity, IdealCat};

pub type Params = BTreeMap<String, f64>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub params: Params,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizationResult {
    pub best_params: Params,
    pub best_value: f64,
    pub trace: Vec<TraceEntry>,
    pub converged: bool,
    pub evaluations: usize,
    /// Optimum sits on the edge of the search interval.
    pub boundary: bool,
    /// Central finite-difference derivative at the optimum (1-D searches).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derivative: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOptions {
    /// Objective calls per continuous search.
    pub budget: usize,
    pub xatol: f64,
    pub fatol: f64,
    /// Multipliers applied to the analytic start point.
    pub starts: Vec<f64>,
    /// Half-width of the integer windows.
    pub window: usize,
    pub n_trunc: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            budget: 500,
            xatol: 1e-7,
            fatol: 1e-12,
            starts: vec![0.8, 1.0, 1.2],
            window: 2,
            n_trunc: DEFAULT_TRUNCATION,
        }
    }
}

/// Outcome of a single local search.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalMinimum {
    pub x: Vec<f64>,
    pub fx: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `f` from `x0` with an axis-aligned initial simplex of size `step`.
///
/// Standard reflection / expansion / contraction / shrink coefficients
/// (1, 2, 1/2, 1/2). Stops when both the simplex diameter and the spread of
/// values drop below the tolerances, or when `budget` calls are spent.
pub fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    budget: usize,
    xatol: f64,
    fatol: f64,
) -> LocalMinimum
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let f0 = eval(x0, &mut evals);
    simplex.push((x0.to_vec(), f0));
    for i in 0..dim {
        let mut x = x0.to_vec();
        x[i] += step[i];
        let fx = eval(&x, &mut evals);
        simplex.push((x, fx));
    }
    let mut converged = false;
    while evals < budget {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0];
        let spread_f = simplex
            .iter()
            .map(|s| (s.1 - best.1).abs())
            .fold(0.0, f64::max);
        let spread_x = simplex
            .iter()
            .flat_map(|s| s.0.iter().zip(&best.0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread_x <= xatol && spread_f <= fatol {
            converged = true;
            break;
        }
        let worst = simplex[dim].clone();
        let centroid: Vec<f64> = (0..dim)
            .map(|i| simplex[..dim].iter().map(|s| s.0[i]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(1.0);
        let fr = eval(&xr, &mut evals);
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = eval(&xe, &mut evals);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = along(0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(-0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < worst.1.min(fr) {
            simplex[dim] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for s in simplex.iter_mut().skip(1) {
            let x: Vec<f64> =
                s.0.iter()
                    .zip(&x_best)
                    .map(|(a, b)| b + 0.5 * (a - b))
                    .collect();
            let fx = eval(&x, &mut evals);
            *s = (x, fx);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, fx) = simplex.swap_remove(0);
    LocalMinimum {
        x,
        fx,
        evaluations: evals,
        converged,
    }
}

/// Maximizes a unimodal `f` on `[a, b]`; returns `(x, f(x), evaluations)`.
pub fn golden_section_max<F>(mut f: F, a: f64, b: f64, tol: f64, budget: usize) -> (f64, f64, usize)
where
    F: FnMut(f64) -> f64,
{
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evals = 2;
    while (b - a).abs() > tol && evals < budget {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        evals += 1;
    }
    if fc > fd {
        (c, fc, evals)
    } else {
        (d, fd, evals)
    }
}

fn params(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Integer window `center - w ..= center + w` clipped to `[lo, hi]`.
fn window(center: usize, w: usize, lo: usize, hi: usize) -> Vec<usize> {
    (center.saturating_sub(w).max(lo)..=(center + w).min(hi)).collect()
}

/// Fidelity of the cat heralded with control `alpha` and outcome `n`
/// against the ideal cat of `beta`.
pub fn cat_fidelity_at(beta: C64, lambda: f64, alpha: C64, n: usize, n_trunc: usize) -> f64 {
    let target = match IdealCat::two(beta).state(n_trunc) {
        Ok(t) => t,
        Err(_) => return 0.0,
    };
    cat_fidelity_with_target(&target, lambda, alpha, n, n_trunc)
}

fn cat_fidelity_with_target(
    target: &crate::fock::FockVector,
    lambda: f64,
    alpha: C64,
    n: usize,
    n_trunc: usize,
) -> f64 {
    herald(&coherent_state(alpha, n_trunc), lambda, n)
        .and_then(|h| fidelity(&h.state, target))
        .unwrap_or(0.0)
}

struct Candidate {
    key: usize,
    local: LocalMinimum,
    trace: Vec<TraceEntry>,
}

fn pick_best(mut candidates: Vec<Candidate>) -> Option<(Candidate, Vec<TraceEntry>, usize)> {
    // highest value wins; ties go to the earliest candidate
    let mut trace = Vec::new();
    let mut evals = 0;
    let mut best: Option<usize> = None;
    for (i, c) in candidates.iter().enumerate() {
        evals += c.local.evaluations;
        trace.extend(c.trace.iter().cloned());
        match best {
            Some(b) if candidates[b].local.fx <= c.local.fx => {}
            _ => best = Some(i),
        }
    }
    let b = best?;
    Some((candidates.swap_remove(b), trace, evals))
}

/// Maximizes the two-component cat fidelity over the control amplitude
/// (complex, two real coordinates) and the outcome `n` in a window around
/// `|beta|^2`.
pub fn optimize_cat_fidelity(
    beta: C64,
    lambda: f64,
    opts: &SearchOptions,
) -> Result<OptimizationResult> {
    crate::fock::check_lambda(lambda)?;
    let size = beta.norm_sqr();
    if 2.0 * size > opts.n_trunc as f64 {
        return Err(Error::Domain(format!(
            "|beta|^2 = {size} above n_trunc / 2 = {}",
            opts.n_trunc / 2
        )));
    }
    let target = IdealCat::two(beta).state(opts.n_trunc)?;
    let lo = (size.floor() as usize).saturating_sub(opts.window);
    let hi = (size.ceil() as usize + opts.window).min(opts.n_trunc / 2);
    let ns: Vec<usize> = (lo..=hi).collect();
    let start = beta * lambda;

    let jobs: Vec<(usize, f64)> = ns
        .iter()
        .flat_map(|&n| opts.starts.iter().map(move |&s| (n, s)))
        .collect();
    let candidates: Vec<Candidate> = jobs
        .par_iter()
        .enumerate()
        .map(|(key, &(n, s))| {
            let x0 = [start.re * s, start.im * s];
            let scale = start.norm().max(0.1);
            let step = [0.05 * scale, 0.05 * scale];
            let mut trace = Vec::new();
            let local = nelder_mead(
                |x| {
                    let v = cat_fidelity_with_target(
                        &target,
                        lambda,
                        C64::new(x[0], x[1]),
                        n,
                        opts.n_trunc,
                    );
                    trace.push(TraceEntry {
                        params: params(&[("n", n as f64), ("alpha_re", x[0]), ("alpha_im", x[1])]),
                        value: v,
                    });
                    -v
                },
                &x0,
                &step,
                opts.budget,
                opts.xatol,
                opts.fatol,
            );
            Candidate { key, local, trace }
        })
        .collect();
    let (best, trace, evaluations) =
        pick_best(candidates).ok_or_else(|| Error::Domain("empty search window".into()))?;
    let n = jobs[best.key].0;
    Ok(OptimizationResult {
        best_params: params(&[
            ("n", n as f64),
            ("alpha_re", best.local.x[0]),
            ("alpha_im", best.local.x[1]),
        ]),
        best_value: -best.local.fx,
        trace,
        converged: best.local.converged,
        evaluations,
        boundary: n == lo && lo > 0 || n == hi,
        derivative: None,
    })
}

/// Heralding probability of the cat scheme with control `beta * lambda`.
pub fn cat_success_probability(beta: C64, lambda: f64, n: usize, n_trunc: usize) -> Result<f64> {
    Ok(herald(&coherent_state(beta * lambda, n_trunc), lambda, n)?.success_probability)
}

pub const LAMBDA_SEARCH: (f64, f64) = (0.01, 0.999);

/// `lambda` maximizing the cat heralding probability, by golden-section
/// search, with the central finite-difference derivative at the optimum.
pub fn optimal_lambda(beta: C64, n: usize, n_trunc: usize) -> Result<OptimizationResult> {
    if n_trunc < 2 * n {
        return Err(Error::Domain(format!(
            "n_trunc = {n_trunc} below 2n = {}",
            2 * n
        )));
    }
    let mut trace = Vec::new();
    let (a, b) = LAMBDA_SEARCH;
    let (lam, pr, evals) = golden_section_max(
        |l| {
            let v = cat_success_probability(beta, l, n, n_trunc).unwrap_or(0.0);
            trace.push(TraceEntry {
                params: params(&[("lambda", l), ("n", n as f64)]),
                value: v,
            });
            v
        },
        a,
        b,
        1e-10,
        500,
    );
    // golden section stalls near sqrt(eps); polish on the derivative's root
    let pr_at = |l: f64| cat_success_probability(beta, l, n, n_trunc);
    let h = 1e-5;
    let deriv = |l: f64| -> Result<f64> { Ok((pr_at(l + h)? - pr_at(l - h)?) / (2.0 * h)) };
    let (mut lam, mut pr) = (lam, pr);
    let mut fd = deriv(lam)?;
    if lam - a > 1e-3 && b - lam > 1e-3 {
        for _ in 0..4 {
            let h2 = 1e-4;
            let curv = (pr_at(lam + h2)? - 2.0 * pr_at(lam)? + pr_at(lam - h2)?) / (h2 * h2);
            if !(curv < 0.0) {
                break;
            }
            let next = lam - fd / curv;
            let fd_next = deriv(next)?;
            if fd_next.abs() >= fd.abs() {
                break;
            }
            lam = next;
            fd = fd_next;
            pr = pr_at(lam)?;
            trace.push(TraceEntry {
                params: params(&[("lambda", lam), ("n", n as f64)]),
                value: pr,
            });
        }
    }
    let boundary = (lam - a).abs() < 1e-6 || (b - lam).abs() < 1e-6;
    Ok(OptimizationResult {
        best_params: params(&[("lambda", lam), ("n", n as f64)]),
        best_value: pr,
        trace,
        converged: evals < 500,
        evaluations: evals,
        boundary,
        derivative: Some(fd),
    })
}

/// Stationary point of `ln pr = ln(1 - u) - u |beta|^2 + 2n ln u`, `u = lambda^2`,
/// which ignores truncation: `2n - u/(1-u) - u |beta|^2 = 0`.
pub fn optimal_lambda_analytic(beta: C64, n: usize) -> f64 {
    let b2 = beta.norm_sqr();
    let g = |u: f64| 2.0 * n as f64 - u / (1.0 - u) - u * b2;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingFit {
    /// Slope of `ln pr` against `ln |beta|`.
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `(|beta|^2, lambda*, pr(lambda*))` per size.
    pub points: Vec<(f64, f64, f64)>,
}

/// Least-squares line through `(ln |beta|, ln pr)`.
pub fn fit_power_law(sizes: &[f64], probabilities: &[f64]) -> Result<(f64, f64, f64)> {
    if sizes.len() != probabilities.len() || sizes.len() < 2 {
        return Err(Error::Domain(
            "need at least two (size, probability) pairs".into(),
        ));
    }
    if sizes.iter().chain(probabilities).any(|v| *v <= 0.0) {
        return Err(Error::Domain(
            "sizes and probabilities must be positive".into(),
        ));
    }
    let xs: Vec<f64> = sizes.iter().map(|s| 0.5 * s.ln()).collect();
    let ys: Vec<f64> = probabilities.iter().map(|p| p.ln()).collect();
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("sizes must not all be equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Ok((slope, intercept, r2))
}

/// Heralding-rate scaling law, using the optimal squeezing for each size and
/// the outcome closest to `|beta|^2`.
pub fn scaling_fit(sizes: &[f64], n_trunc: usize) -> Result<ScalingFit> {
    if sizes.len() < 5 {
        return Err(Error::Domain("scaling fit needs at least 5 sizes".into()));
    }
    let (lo, hi) = sizes
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(l, h), s| (l.min(*s), h.max(*s)));
    if !(lo > 0.0 && hi >= 4.0 * lo) {
        return Err(Error::Domain(
            "sizes must span at least a factor of 4".into(),
        ));
    }
    let points: Vec<(f64, f64, f64)> = sizes
        .par_iter()
        .map(|&s| {
            let beta = C64::new(s.sqrt(), 0.0);
            let r = optimal_lambda(beta, round_half_down(s), n_trunc)?;
            Ok((s, r.best_params["lambda"], r.best_value))
        })
        .collect::<Result<_>>()?;
    let pr: Vec<f64> = points.iter().map(|p| p.2).collect();
    let (exponent, intercept, r_squared) = fit_power_law(sizes, &pr)?;
    Ok(ScalingFit {
        exponent,
        intercept,
        r_squared,
        points,
    })
}

/// Pipeline configuration for the four-component search coordinates: stage
/// outcomes, real control amplitude along `beta` and displacement along
/// `i conj(beta)`.
pub fn four_component_config(
    beta: C64,
    lambda: f64,
    n1: usize,
    n2: usize,
    control: f64,
    displacement: f64,
    n_trunc: usize,
) -> SchemeConfig {
    let unit = if beta.norm() > 0.0 {
        beta / beta.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    let mut cfg = SchemeConfig::four_component(beta, lambda).with_trunc(n_trunc);
    cfg.n = Some(n1);
    cfg.second_outcome = Some(n2);
    cfg.amplitude_scale = Some(if beta.norm() > 0.0 {
        control / (beta.norm() * lambda)
    } else {
        0.0
    });
    cfg.displacement = Some(C64::new(0.0, 1.0) * unit.conj() * displacement);
    cfg
}

pub const FOUR_COMPONENT_TRUNCATION: usize = 140;

/// Maximizes the pipeline fidelity with the four-component target over the
/// two outcomes (windows around `|beta|^2` and `2|beta|^2`), the control
/// amplitude and the displacement.
///
/// The search runs on `|beta|`; for `beta = |beta| e^{i phi}` the same
/// parameters apply through [`four_component_config`] and the output
/// rotates by `phi`.
pub fn optimize_four_component(
    beta: C64,
    lambda: f64,
    opts: &SearchOptions,
) -> Result<OptimizationResult> {
    crate::fock::check_lambda(lambda)?;
    let b = C64::new(beta.norm(), 0.0);
    let n_trunc = opts.n_trunc;
    let target = IdealCat::four(b).state(n_trunc)?;
    let c1 = round_half_down(b.norm_sqr());
    let n1s = window(c1, opts.window, 0, n_trunc / 2);
    let n2s = window(2 * c1, opts.window, 0, n_trunc / 2);
    let a0 = b.re * lambda * lambda;
    let d0 = b.re * lambda;
    let jobs: Vec<(usize, usize, f64)> = n1s
        .iter()
        .flat_map(|&n1| {
            let n2s = &n2s;
            n2s.iter()
                .flat_map(move |&n2| opts.starts.iter().map(move |&s| (n1, n2, s)))
        })
        .collect();
    let candidates: Vec<Candidate> = jobs
        .par_iter()
        .enumerate()
        .map(|(key, &(n1, n2, s))| {
            let mut trace = Vec::new();
            let scale = a0.max(0.1);
            let local = nelder_mead(
                |x| {
                    let cfg = four_component_config(b, lambda, n1, n2, x[0], x[1], n_trunc);
                    let v = four_component_pipeline(&cfg)
                        .and_then(|o| fidelity(&o.state, &target))
                        .unwrap_or(0.0);
                    trace.push(TraceEntry {
                        params: params(&[
                            ("n1", n1 as f64),
                            ("n2", n2 as f64),
                            ("control", x[0]),
                            ("displacement", x[1]),
                        ]),
                        value: v,
                    });
                    -v
                },
                &[a0 * s, d0 * s],
                &[0.05 * scale, 0.05 * scale],
                opts.budget,
                opts.xatol,
                opts.fatol,
            );
            Candidate { key, local, trace }
        })
        .collect();
    let (best, trace, evaluations) =
        pick_best(candidates).ok_or_else(|| Error::Domain("empty search window".into()))?;
    let (n1, n2, _) = jobs[best.key];
    Ok(OptimizationResult {
        best_params: params(&[
            ("n1", n1 as f64),
            ("n2", n2 as f64),
            ("control", best.local.x[0]),
            ("displacement", best.local.x[1]),
        ]),
        best_value: -best.local.fx,
        trace,
        converged: best.local.converged,
        evaluations,
        boundary: n1 == *n1s.first().unwrap() && n1 > 0
            || n1 == *n1s.last().unwrap()
            || n2 == *n2s.first().unwrap() && n2 > 0
            || n2 == *n2s.last().unwrap(),
        derivative: None,
    })
}

/// Re-evaluates a four-component result at its reported parameters.
pub fn four_component_value(beta: C64, lambda: f64, best: &Params, n_trunc: usize) -> Result<f64> {
    let b = C64::new(beta.norm(), 0.0);
    let cfg = four_component_config(
        b,
        lambda,
        best["n1"] as usize,
        best["n2"] as usize,
        best["control"],
        best["displacement"],
        n_trunc,
    );
    let out = four_component_pipeline(&cfg)?;
    fidelity(&out.state, &IdealCat::four(b).state(n_trunc)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::cat_fidelity_closed_form;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let r = nelder_mead(
            |x| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2),
            &[-1.2, 1.0],
            &[0.1, 0.1],
            5000,
            1e-10,
            1e-14,
        );
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn nelder_mead_budget_flag() {
        let r = nelder_mead(|x| x[0] * x[0], &[5.0], &[1.0], 6, 1e-12, 1e-12);
        assert!(!r.converged);
        assert!(r.evaluations <= 8);
    }

    #[test]
    fn golden_section_parabola() {
        let (x, fx, _) = golden_section_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-10, 200);
        assert!((x - 0.3).abs() < 1e-8);
        assert!(fx.abs() < 1e-15);
    }

    #[test]
    fn cat_search_integer_size() {
        let beta = re(20f64.sqrt());
        let r = optimize_cat_fidelity(beta, 0.8, &SearchOptions::default()).unwrap();
        assert_eq!(r.best_params["n"], 20.0);
        assert!(r.best_value >= cat_fidelity_closed_form(20).unwrap() - 1e-12);
        let alpha = C64::new(r.best_params["alpha_re"], r.best_params["alpha_im"]);
        assert!((alpha - beta * 0.8).norm() < 0.05 * beta.norm());
        let again = cat_fidelity_at(beta, 0.8, alpha, 20, DEFAULT_TRUNCATION);
        assert!((again - r.best_value).abs() < 1e-9);
        assert!(!r.trace.is_empty());
    }

    #[test]
    fn cat_search_is_deterministic() {
        let opts = SearchOptions {
            starts: vec![1.0],
            window: 1,
            ..Default::default()
        };
        let a = optimize_cat_fidelity(re(1.5), 0.6, &opts).unwrap();
        let b = optimize_cat_fidelity(re(1.5), 0.6, &opts).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.best_params, b.best_params);
    }

    #[test]
    fn analytic_lambda_matches_search() {
        let beta = re(10f64.sqrt());
        let r = optimal_lambda(beta, 10, 100).unwrap();
        let lam = r.best_params["lambda"];
        assert!((lam - optimal_lambda_analytic(beta, 10)).abs() < 1e-6);
        assert!(!r.boundary);
        assert!(r.derivative.unwrap().abs() < 1e-6 * r.best_value);
    }

    #[test]
    fn power_law_fit_sanity() {
        let sizes = [5.0, 10.0, 20.0, 40.0];
        let flat = [0.1; 4];
        let (e, _, _) = fit_power_law(&sizes, &flat).unwrap();
        assert!(e.abs() < 1e-14);
        let pr: Vec<f64> = sizes
            .iter()
            .map(|s: &f64| 3.0 * s.sqrt().powf(-2.5))
            .collect();
        let doubled: Vec<f64> = pr.iter().map(|p| 2.0 * p).collect();
        let (e1, i1, r1) = fit_power_law(&sizes, &pr).unwrap();
        let (e2, i2, _) = fit_power_law(&sizes, &doubled).unwrap();
        assert!((e1 + 2.5).abs() < 1e-12 && (r1 - 1.0).abs() < 1e-12);
        assert!((e1 - e2).abs() < 1e-12 && (i2 - i1 - 2f64.ln()).abs() < 1e-12);
        assert!(scaling_fit(&[1.0, 2.0, 3.0], 100).is_err());
        assert!(scaling_fit(&[5.0, 6.0, 7.0, 8.0, 9.0], 100).is_err());
    }
}
