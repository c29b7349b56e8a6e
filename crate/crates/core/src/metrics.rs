//! State-quality measures: fidelities, ideal cat targets, Wigner functions.
//!
//! Phase-space convention: `hbar = 1`, `alpha = (x + i p) / sqrt(2)`, vacuum
//! variance 1/2 in both quadratures and `int W dx dp = 1`. Under this
//! convention the single-photon state has `W(0, 0) = -1/pi`.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use crate::error::{Error, Result, TruncationWarning};
use crate::fock::{coherent_state, DensityMatrix, FockVector, State};
use crate::math::{ln_binomial, ln_factorial, log_sum_exp};

pub const WIGNER_CONVENTION: &str =
    "hbar=1; alpha=(x+ip)/sqrt(2); vacuum variance 1/2; int W dx dp = 1";

/// Default sample count per axis.
pub const DEFAULT_GRID_POINTS: usize = 281;

/// Largest `n` accepted by [`cat_fidelity_closed_form`].
pub const CLOSED_FORM_MAX_N: usize = 10_000;

/// `|<a|b>|^2` for pure `a`, `<b|rho|b>` for mixed `a`, both normalized.
pub fn fidelity(a: &State, b: &FockVector) -> Result<f64> {
    let b = b.normalized()?;
    match a {
        State::Pure(v) => {
            let v = v.normalized()?;
            Ok(v.inner(&b).norm_sqr().min(1.0))
        }
        State::Mixed(r) => {
            let r = r.normalized()?;
            Ok(r.expectation(&b).clamp(0.0, 1.0))
        }
    }
}

pub fn pure_fidelity(a: &FockVector, b: &FockVector) -> Result<f64> {
    fidelity(&State::Pure(a.clone()), b)
}

/// Even cat targets: `|beta> + |-beta>` or the four-component state
/// `|b - ib> + |-b + ib> + e^{-2i|b|^2}(|b + ib> + |-b - ib>)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdealCat {
    pub beta: C64,
    pub components: u8,
}

impl IdealCat {
    pub fn two(beta: C64) -> Self {
        Self {
            beta,
            components: 2,
        }
    }

    pub fn four(beta: C64) -> Self {
        Self {
            beta,
            components: 4,
        }
    }

    /// `[2(1 + e^{-2|beta|^2})]^{-1/2}`.
    pub fn normalization(&self) -> f64 {
        (2.0 * (1.0 + (-2.0 * self.beta.norm_sqr()).exp()))
            .sqrt()
            .recip()
    }

    /// Unit-norm Fock amplitudes up to `n_trunc`.
    pub fn state(&self, n_trunc: usize) -> Result<FockVector> {
        let b = self.beta;
        let i = C64::new(0.0, 1.0);
        let raw = match self.components {
            2 => add(
                &[(C64::new(1.0, 0.0), b), (C64::new(1.0, 0.0), -b)],
                n_trunc,
            ),
            4 => {
                let phase = C64::from_polar(1.0, -2.0 * b.norm_sqr());
                let one = C64::new(1.0, 0.0);
                add(
                    &[
                        (one, b - i * b),
                        (one, -b + i * b),
                        (phase, b + i * b),
                        (phase, -b - i * b),
                    ],
                    n_trunc,
                )
            }
            c => {
                return Err(Error::Domain(format!(
                    "cat with {c} components (only 2 or 4 supported)"
                )))
            }
        };
        // both targets are exactly even; drop the rounding residue
        let mut raw = raw;
        for (j, a) in raw.amplitudes_mut().iter_mut().enumerate() {
            if j % 2 == 1 {
                *a = C64::new(0.0, 0.0);
            }
        }
        if raw.norm_sqr() == 0.0 {
            return Err(Error::ZeroNorm);
        }
        // the truncated coherent states carry their own leakage warnings
        raw.normalized()
    }
}

fn add(terms: &[(C64, C64)], n_trunc: usize) -> FockVector {
    let mut acc = FockVector::zeros(n_trunc);
    for (w, alpha) in terms {
        let c = coherent_state(*alpha, n_trunc);
        for (a, z) in acc.amplitudes_mut().iter_mut().zip(c.amplitudes()) {
            *a += w * z;
        }
    }
    acc
}

/// Fidelity of the heralded cat with its target when `|beta|^2 = n`:
/// `2^{2n+1} e^{-n} / (1 + e^{-2n}) / sum_k C(n,k)^2 (2k)! / n^{2k}`.
pub fn cat_fidelity_closed_form(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("closed form needs n >= 1".into()));
    }
    if n > CLOSED_FORM_MAX_N {
        return Err(Error::Domain(format!(
            "n = {n} above the closed-form limit {CLOSED_FORM_MAX_N}"
        )));
    }
    let nf = n as f64;
    let terms: Vec<f64> = (0..=n)
        .map(|k| 2.0 * ln_binomial(n, k) + ln_factorial(2 * k) - 2.0 * k as f64 * nf.ln())
        .collect();
    let ln_s = log_sum_exp(&terms);
    let ln_f = (2.0 * nf + 1.0) * 2f64.ln() - nf - (-2.0 * nf).exp().ln_1p() - ln_s;
    Ok(ln_f.exp())
}

/// Rectangular midpoint grid in `(x, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl GridSpec {
    pub fn square(half_width: f64, points: usize) -> Self {
        Self {
            x_min: -half_width,
            x_max: half_width,
            p_min: -half_width,
            p_max: half_width,
            nx: points,
            np: points,
        }
    }

    /// `[-(|beta| + 5), |beta| + 5]^2` with the default sample count.
    pub fn for_beta(beta: C64) -> Self {
        Self::square(beta.norm() + 5.0, DEFAULT_GRID_POINTS)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.nx as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / self.np as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx()
    }

    pub fn p(&self, i: usize) -> f64 {
        self.p_min + (i as f64 + 0.5) * self.dp()
    }

    pub fn refined(&self) -> Self {
        Self {
            nx: 2 * self.nx,
            np: 2 * self.np,
            ..*self
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.nx > 0
            && self.np > 0
            && self.x_max > self.x_min
            && self.p_max > self.p_min
            && [self.x_min, self.x_max, self.p_min, self.p_max]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("bad grid {self:?}")))
        }
    }
}

/// Wigner samples; `values[[ip, ix]]` holds `W(x_ix, p_ip)`.
#[derive(Clone, Debug, Serialize)]
pub struct WignerGrid {
    pub values: Array2<f64>,
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
    pub convention: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<TruncationWarning>,
}

impl WignerGrid {
    pub fn spec(&self) -> GridSpec {
        GridSpec {
            x_min: self.x_min,
            x_max: self.x_max,
            p_min: self.p_min,
            p_max: self.p_max,
            nx: self.nx,
            np: self.np,
        }
    }

    pub fn cell_area(&self) -> f64 {
        let s = self.spec();
        s.dx() * s.dp()
    }

    /// Midpoint-rule integral of `W`.
    pub fn integral(&self) -> f64 {
        self.values.sum() * self.cell_area()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn value_at(&self, ix: usize, ip: usize) -> f64 {
        self.values[[ip, ix]]
    }

    /// `alpha = (x + i p) / sqrt(2)` of a sample.
    pub fn alpha_at(&self, ix: usize, ip: usize) -> C64 {
        let s = self.spec();
        C64::new(s.x(ix), s.p(ip)) * FRAC_1_SQRT_2
    }

    /// `sum_p W dp` on each `x` sample.
    pub fn x_marginal(&self) -> Vec<f64> {
        let dp = self.spec().dp();
        (0..self.nx)
            .map(|ix| self.values.column(ix).sum() * dp)
            .collect()
    }

    /// Strict local maxima of `|W|` (8-neighbourhood), interior points only.
    pub fn local_maxima_abs(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for ip in 1..self.np.saturating_sub(1) {
            for ix in 1..self.nx.saturating_sub(1) {
                let v = self.values[[ip, ix]].abs();
                let mut is_max = true;
                'nb: for dp in [-1i64, 0, 1] {
                    for dx in [-1i64, 0, 1] {
                        if dp == 0 && dx == 0 {
                            continue;
                        }
                        let u = self.values[[(ip as i64 + dp) as usize, (ix as i64 + dx) as usize]]
                            .abs();
                        if u >= v {
                            is_max = false;
                            break 'nb;
                        }
                    }
                }
                if is_max {
                    out.push((ix, ip, v));
                }
            }
        }
        out
    }

    /// Largest `|W|` on the outermost ring of samples.
    pub fn boundary_max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for ix in 0..self.nx {
            m = m.max(self.values[[0, ix]].abs());
            m = m.max(self.values[[self.np - 1, ix]].abs());
        }
        for ip in 0..self.np {
            m = m.max(self.values[[ip, 0]].abs());
            m = m.max(self.values[[ip, self.nx - 1]].abs());
        }
        m
    }

    /// Row-major CSV, one `p` row per line, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::with_capacity(self.nx * self.np * 24);
        for row in self.values.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }

    /// Row-major little-endian f64.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        self.values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }
}

/// Boundary-ring coverage threshold relative to `max |W|`.
pub const COVERAGE_THRESHOLD: f64 = 1e-4;

/// Wigner function of a pure or mixed state on a midpoint grid.
///
/// Uses the Laguerre kernel on the density matrix directly:
/// `W = (1/pi) sum_n rho_nn K_n^0 + (2/pi) Re sum_{k>0} e^{ik theta} sum_n
/// rho_{n,n+k} K_n^k` with `K_n^k = (-1)^n sqrt(n!/(n+k)!) (2r)^k
/// e^{-2r^2} L_n^{(k)}(4r^2)` and `alpha = r e^{i theta}`.
pub fn wigner(state: &State, grid: &GridSpec) -> Result<WignerGrid> {
    grid.validate()?;
    let kernel = WignerKernel::new(&state.to_density());
    let nx = grid.nx;
    let values: Vec<f64> = (0..grid.np * nx)
        .into_par_iter()
        .map(|idx| {
            let alpha = C64::new(grid.x(idx % nx), grid.p(idx / nx)) * FRAC_1_SQRT_2;
            kernel.eval(alpha)
        })
        .collect();
    let values =
        Array2::from_shape_vec((grid.np, nx), values).map_err(|e| Error::Domain(e.to_string()))?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Underflow("non-finite Wigner value".into()));
    }
    let mut out = WignerGrid {
        values,
        x_min: grid.x_min,
        x_max: grid.x_max,
        p_min: grid.p_min,
        p_max: grid.p_max,
        nx: grid.nx,
        np: grid.np,
        convention: WIGNER_CONVENTION.to_string(),
        warnings: Vec::new(),
    };
    let peak = out.max_abs();
    if peak > 0.0 {
        let ratio = out.boundary_max_abs() / peak;
        if ratio > COVERAGE_THRESHOLD {
            out.warnings.extend(TruncationWarning::check(
                "wigner grid coverage",
                1.0 - ratio,
                COVERAGE_THRESHOLD,
            ));
        }
    }
    Ok(out)
}

/// Populations below this fraction of the trace are dropped from the top of
/// the basis before evaluating the kernel.
pub const WIGNER_SUPPORT_CUT: f64 = 1e-20;

/// Sign-weighted diagonals `(-1)^n rho_{n,n+k}` of a density matrix.
struct WignerKernel {
    diags: Vec<Vec<C64>>,
    half_ln_fact: Vec<f64>,
}

impl WignerKernel {
    fn new(rho: &DensityMatrix) -> Self {
        let tr = rho.trace().abs();
        let diag = rho.diagonal();
        let d = diag
            .iter()
            .rposition(|p| p.abs() > WIGNER_SUPPORT_CUT * tr)
            .map_or(1, |i| i + 1);
        let diags = (0..d)
            .map(|k| {
                (0..d - k)
                    .map(|n| {
                        let z = rho.0[[n, n + k]];
                        if n % 2 == 0 {
                            z
                        } else {
                            -z
                        }
                    })
                    .collect()
            })
            .collect();
        let half_ln_fact = (0..d).map(|k| 0.5 * ln_factorial(k)).collect();
        Self {
            diags,
            half_ln_fact,
        }
    }

    fn eval(&self, alpha: C64) -> f64 {
        let r = alpha.norm();
        let r2 = r * r;
        let x = 4.0 * r2;
        let step = if r > 0.0 {
            alpha / r
        } else {
            C64::new(1.0, 0.0)
        };
        let ln_2r = (2.0 * r).ln();
        let mut phase = C64::new(1.0, 0.0);
        let mut total = 0.0;
        for (k, diag) in self.diags.iter().enumerate() {
            if k > 0 && r == 0.0 {
                break;
            }
            let kf = k as f64;
            let ln_pref = if k == 0 {
                -2.0 * r2
            } else {
                kf * ln_2r - 2.0 * r2
            };
            // normalized Laguerre recurrence, as in math::scaled_laguerre
            let mut prev = 0.0;
            let mut cur = (ln_pref - self.half_ln_fact[k]).exp();
            let mut s = diag[0] * cur;
            for (n, z) in diag.iter().enumerate().skip(1) {
                let m = (n - 1) as f64;
                let next = ((2.0 * m + 1.0 + kf - x) * cur - (m * (m + kf)).sqrt() * prev)
                    / ((m + 1.0) * (m + 1.0 + kf)).sqrt();
                prev = cur;
                cur = next;
                s += z * cur;
            }
            total += if k == 0 { s.re } else { 2.0 * (phase * s).re };
            phase *= step;
        }
        total / PI
    }
}

/// `int (|W| - W) / 2 dx dp` by the grid's midpoint rule.
pub fn negativity_volume(grid: &WignerGrid) -> f64 {
    grid.values
        .iter()
        .map(|v| if *v < 0.0 { -v } else { 0.0 })
        .sum::<f64>()
        * grid.cell_area()
}

/// Smallest ideal-cat negativity accepted as a denominator.
pub const NEGATIVITY_FLOOR: f64 = 1e-12;

/// Negativity of `state` over that of the ideal two-component cat of
/// amplitude `beta`, both on `grid` (default [`GridSpec::for_beta`]).
pub fn normalized_negativity(state: &State, beta: C64, grid: Option<GridSpec>) -> Result<f64> {
    let grid = grid.unwrap_or_else(|| GridSpec::for_beta(beta));
    let n_trunc = state.n_trunc().max(ideal_trunc(beta));
    let ideal = IdealCat::two(beta).state(n_trunc)?;
    let reference = negativity_volume(&wigner(&State::Pure(ideal), &grid)?);
    if reference < NEGATIVITY_FLOOR {
        return Err(Error::Underflow(format!(
            "ideal cat negativity {reference:.3e} too small to normalize by"
        )));
    }
    let state = state.normalized()?;
    Ok(negativity_volume(&wigner(&state, &grid)?) / reference)
}

/// Truncation comfortably containing a coherent state of amplitude `beta`.
pub fn ideal_trunc(beta: C64) -> usize {
    let m = beta.norm_sqr();
    (m + 10.0 * m.sqrt() + 20.0).ceil() as usize
}

/// `(x, p)` of a phase-space amplitude.
pub fn quadratures(alpha: C64) -> (f64, f64) {
    (SQRT_2 * alpha.re, SQRT_2 * alpha.im)
}
