//! Single- and two-mode states on a truncated photon-number basis.

use std::f64::consts::LOG10_E;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result, TruncationWarning};
use crate::math::{ln_factorial, scaled_laguerre};

/// Truncation used when nothing else is specified.
pub const DEFAULT_TRUNCATION: usize = 100;

/// Pure single-mode state, amplitudes indexed by photon number `0..=n_trunc`.
///
/// Vectors are allowed to be unnormalized; for heralded states the squared
/// norm is the heralding probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FockVector {
    amps: Vec<C64>,
}

impl FockVector {
    pub fn new(amps: Vec<C64>) -> Self {
        assert!(
            !amps.is_empty(),
            "a Fock vector needs at least the vacuum entry"
        );
        Self { amps }
    }

    pub fn zeros(n_trunc: usize) -> Self {
        Self::new(vec![C64::new(0.0, 0.0); n_trunc + 1])
    }

    /// Number state `|m>`.
    pub fn basis(m: usize, n_trunc: usize) -> Self {
        assert!(m <= n_trunc, "|{m}> outside truncation {n_trunc}");
        let mut v = Self::zeros(n_trunc);
        v.amps[m] = C64::new(1.0, 0.0);
        v
    }

    pub fn vacuum(n_trunc: usize) -> Self {
        Self::basis(0, n_trunc)
    }

    /// Unnormalized control with `c_m = 1` for every retained `m`.
    pub fn flat(n_trunc: usize) -> Self {
        Self::new(vec![C64::new(1.0, 0.0); n_trunc + 1])
    }

    pub fn from_real(amps: &[f64]) -> Self {
        Self::new(amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    pub fn n_trunc(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    /// Amplitude at `j`, zero beyond the truncation.
    #[inline]
    pub fn get(&self, j: usize) -> C64 {
        self.amps.get(j).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        let s = 1.0 / n.sqrt();
        Ok(Self::new(self.amps.iter().map(|a| a * s).collect()))
    }

    /// `<self|other>`, over the common support.
    pub fn inner(&self, other: &FockVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Copy padded with zeros or cut at `n_trunc`.
    pub fn resized(&self, n_trunc: usize) -> Self {
        let mut amps = self.amps.clone();
        amps.resize(n_trunc + 1, C64::new(0.0, 0.0));
        Self::new(amps)
    }

    /// One past the highest photon number with a non-zero amplitude (at least 1).
    pub fn support_len(&self) -> usize {
        self.amps
            .iter()
            .rposition(|a| a.norm_sqr() > 0.0)
            .map_or(1, |i| i + 1)
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self::new(self.amps.iter().map(|a| a * factor).collect())
    }

    /// Photon-number distribution `|a_j|^2`.
    pub fn populations(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Squared norm carried by odd photon numbers.
    pub fn odd_weight(&self) -> f64 {
        self.amps
            .iter()
            .skip(1)
            .step_by(2)
            .map(|a| a.norm_sqr())
            .sum()
    }

    /// Applies a square matrix acting on the same basis; the result has the
    /// matrix's row count.
    pub fn transformed(&self, op: &Array2<C64>) -> Result<Self> {
        if op.ncols() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: op.ncols(),
                got: self.len(),
            });
        }
        let v = Array1::from(self.amps.clone());
        Ok(Self::new(op.dot(&v).to_vec()))
    }

    /// Phase-space rotation `exp(-i theta n)`.
    pub fn rotated(&self, theta: f64) -> Self {
        Self::new(
            self.amps
                .iter()
                .enumerate()
                .map(|(j, a)| a * C64::from_polar(1.0, -theta * j as f64))
                .collect(),
        )
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }

    /// Warning when a state meant to be normalized lost more than 1e-6 of
    /// its norm to the truncation.
    pub fn truncation_warning(&self, context: &str) -> Option<TruncationWarning> {
        TruncationWarning::check(
            context,
            self.norm_sqr(),
            TruncationWarning::DEFAULT_THRESHOLD,
        )
    }
}

/// Single-mode density matrix (possibly unnormalized).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(pub Array2<C64>);

impl DensityMatrix {
    pub fn zeros(n_trunc: usize) -> Self {
        Self(Array2::zeros((n_trunc + 1, n_trunc + 1)))
    }

    pub fn from_pure(v: &FockVector) -> Self {
        let a = v.amplitudes();
        let d = a.len();
        Self(Array2::from_shape_fn((d, d), |(i, j)| a[i] * a[j].conj()))
    }

    pub fn n_trunc(&self) -> usize {
        self.0.nrows() - 1
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.diag().iter().map(|z| z.re).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self(self.0.mapv(|z| z / t)))
    }

    /// `<v|rho|v>` over the common support.
    pub fn expectation(&self, v: &FockVector) -> f64 {
        let a = v.amplitudes();
        let d = self.dim().min(a.len());
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            if a[i].norm_sqr() == 0.0 {
                continue;
            }
            let row: C64 = self.0.row(i).iter().zip(&a[..d]).map(|(m, x)| m * x).sum();
            acc += a[i].conj() * row;
        }
        acc.re
    }

    /// `Tr(rho^2) / Tr(rho)^2`.
    pub fn purity(&self) -> f64 {
        let t = self.trace();
        let s: f64 = self.0.iter().map(|z| z.norm_sqr()).sum();
        s / (t * t)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.0.diag().iter().map(|z| z.re).collect()
    }

    pub fn odd_weight(&self) -> f64 {
        self.diagonal().iter().skip(1).step_by(2).sum()
    }

    pub fn resized(&self, n_trunc: usize) -> Self {
        let d = n_trunc + 1;
        let k = d.min(self.dim());
        let mut out = Array2::zeros((d, d));
        out.slice_mut(ndarray::s![..k, ..k])
            .assign(&self.0.slice(ndarray::s![..k, ..k]));
        Self(out)
    }

    /// `U rho U^dagger`.
    pub fn conjugated_by(&self, op: &Array2<C64>) -> Result<Self> {
        if op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: op.ncols(),
                got: self.dim(),
            });
        }
        let adj = op.t().mapv(|z| z.conj());
        Ok(Self(op.dot(&self.0).dot(&adj)))
    }

    /// One past the highest index with a non-zero diagonal entry.
    pub fn support_len(&self) -> usize {
        self.0
            .diag()
            .iter()
            .rposition(|z| z.re.abs() > 0.0)
            .map_or(1, |i| i + 1)
    }
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<C64>> = self.0.rows().into_iter().map(|r| r.to_vec()).collect();
        rows.serialize(serializer)
    }
}

/// Either a pure vector or a density matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum State {
    Pure(FockVector),
    Mixed(DensityMatrix),
}

impl State {
    /// Squared norm of a pure state, trace of a mixed one.
    pub fn weight(&self) -> f64 {
        match self {
            State::Pure(v) => v.norm_sqr(),
            State::Mixed(r) => r.trace(),
        }
    }

    pub fn n_trunc(&self) -> usize {
        match self {
            State::Pure(v) => v.n_trunc(),
            State::Mixed(r) => r.n_trunc(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            State::Pure(v) => v.to_density(),
            State::Mixed(r) => r.clone(),
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        Ok(match self {
            State::Pure(v) => State::Pure(v.normalized()?),
            State::Mixed(r) => State::Mixed(r.normalized()?),
        })
    }

    pub fn populations(&self) -> Vec<f64> {
        match self {
            State::Pure(v) => v.populations(),
            State::Mixed(r) => r.diagonal(),
        }
    }

    pub fn odd_weight(&self) -> f64 {
        match self {
            State::Pure(v) => v.odd_weight(),
            State::Mixed(r) => r.odd_weight(),
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, State::Pure(_))
    }

    pub fn as_pure(&self) -> Option<&FockVector> {
        match self {
            State::Pure(v) => Some(v),
            State::Mixed(_) => None,
        }
    }
}

impl From<FockVector> for State {
    fn from(v: FockVector) -> Self {
        State::Pure(v)
    }
}

impl From<DensityMatrix> for State {
    fn from(r: DensityMatrix) -> Self {
        State::Mixed(r)
    }
}

/// Bipartite pure state, `amps[(j, k)]` for `j` photons in mode 1 and `k` in mode 2.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeState {
    amps: Array2<C64>,
}

impl TwoModeState {
    pub fn new(amps: Array2<C64>) -> Self {
        assert_eq!(amps.nrows(), amps.ncols(), "two-mode states are square");
        Self { amps }
    }

    pub fn product(a: &FockVector, b: &FockVector) -> Self {
        let d = a.len().max(b.len());
        Self::new(Array2::from_shape_fn((d, d), |(j, k)| a.get(j) * b.get(k)))
    }

    pub fn n_trunc(&self) -> usize {
        self.amps.nrows() - 1
    }

    pub fn amplitudes(&self) -> &Array2<C64> {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<chi|_1 |Psi>`: projects mode 1 onto `chi`, leaving mode 2.
    pub fn project_first_mode(&self, chi: &FockVector) -> FockVector {
        let d = self.amps.nrows();
        let mut out = vec![C64::new(0.0, 0.0); d];
        for j in 0..d.min(chi.len()) {
            let c = chi.get(j).conj();
            if c.norm_sqr() == 0.0 {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate() {
                *o += c * self.amps[[j, k]];
            }
        }
        FockVector::new(out)
    }

    /// Mean photon number of mode 1 (relative to the state's norm).
    pub fn mean_photons_first_mode(&self) -> f64 {
        let mut num = 0.0;
        for ((j, _), a) in self.amps.indexed_iter() {
            num += j as f64 * a.norm_sqr();
        }
        num / self.norm_sqr()
    }
}

/// Coherent state `|beta>` on `0..=n_trunc`.
pub fn coherent_state(beta: C64, n_trunc: usize) -> FockVector {
    let r = beta.norm();
    let mut amps = vec![C64::new(0.0, 0.0); n_trunc + 1];
    if r == 0.0 {
        amps[0] = C64::new(1.0, 0.0);
        return FockVector::new(amps);
    }
    if r * r > n_trunc as f64 / 2.0 {
        log::warn!(
            "coherent amplitude |beta|^2 = {:.3} exceeds n_trunc/2",
            r * r
        );
    }
    let theta = beta.arg();
    let (ln_r, half_r2) = (r.ln(), 0.5 * r * r);
    for (j, a) in amps.iter_mut().enumerate() {
        let mag = (j as f64 * ln_r - half_r2 - 0.5 * ln_factorial(j)).exp();
        *a = C64::from_polar(mag, theta * j as f64);
    }
    let v = FockVector::new(amps);
    v.truncation_warning("coherent_state");
    v
}

/// Two-mode squeezed vacuum with `lambda = tanh r`; amplitude of `|k,k>` is
/// `sqrt(1 - lambda^2) lambda^k`.
pub fn two_mode_squeezed_vacuum(lambda: f64, n_trunc: usize) -> Result<TwoModeState> {
    check_lambda(lambda)?;
    let pref = (1.0 - lambda * lambda).sqrt();
    let mut amps = Array2::zeros((n_trunc + 1, n_trunc + 1));
    let mut lk = 1.0;
    for k in 0..=n_trunc {
        amps[[k, k]] = C64::new(pref * lk, 0.0);
        lk *= lambda;
    }
    let s = TwoModeState::new(amps);
    TruncationWarning::check(
        "two_mode_squeezed_vacuum",
        s.norm_sqr(),
        TruncationWarning::DEFAULT_THRESHOLD,
    );
    Ok(s)
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::Domain(format!("lambda = {lambda} outside [0, 1)")));
    }
    Ok(())
}

/// Squeezing in dB to `lambda = tanh r`, with `r = dB / (20 log10 e)`.
pub fn squeezing_db_to_lambda(db: f64) -> f64 {
    (db / (20.0 * LOG10_E)).tanh()
}

pub fn lambda_to_squeezing_db(lambda: f64) -> f64 {
    20.0 * LOG10_E * lambda.atanh()
}

/// Fock-basis matrix of `D(alpha) = exp(alpha a^dagger - alpha^* a)` on `0..=n_trunc`.
///
/// Entries come from the closed-form Laguerre expression, so every retained
/// element is exact; only norm that would land above `n_trunc` is lost.
pub fn displacement_matrix(alpha: C64, n_trunc: usize) -> Array2<C64> {
    let d = n_trunc + 1;
    let mut m = Array2::zeros((d, d));
    let r = alpha.norm();
    if r == 0.0 {
        for i in 0..d {
            m[[i, i]] = C64::new(1.0, 0.0);
        }
        return m;
    }
    if r * r > n_trunc as f64 / 4.0 {
        log::warn!(
            "displacement |alpha|^2 = {:.3} exceeds n_trunc/4; high columns are truncated",
            r * r
        );
    }
    let x = r * r;
    let theta = alpha.arg();
    let ln_r = r.ln();
    for k in 0..d {
        // ell[n] = sqrt(n!/(n+k)!) L_n^{(k)}(x) r^k e^{-x/2}
        let ell = scaled_laguerre(k, x, d - 1 - k, k as f64 * ln_r - 0.5 * x);
        // below diagonal: <n+k|D|n> = alpha^k/|alpha|^k * ell[n]
        let below = C64::from_polar(1.0, k as f64 * theta);
        // above diagonal: <n|D|n+k> = (-alpha^*)^k/|alpha|^k * ell[n]
        let above = C64::from_polar(1.0, k as f64 * (std::f64::consts::PI - theta));
        for (n, &l) in ell.iter().enumerate() {
            m[[n + k, n]] = below * l;
            if k > 0 {
                m[[n, n + k]] = above * l;
            }
        }
    }
    m
}
