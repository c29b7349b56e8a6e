//! Balanced beam splitter in the Fock basis.
//!
//! The splitter maps input creation operators to output ones,
//!
//! ```text
//! a_in^dagger -> m00 a^dagger + m01 b^dagger
//! b_in^dagger -> m10 a^dagger + m11 b^dagger
//! ```
//!
//! and the default (symmetric) convention is `M = [[1, i], [i, 1]] / sqrt(2)`.
//! With it, `<j, 2n-j| U |n, n>` equals `(i/2)^n sqrt((2n-j)! j!) / ((j/2)! (n-j/2)!)`
//! for even `j` and vanishes for odd `j`.
//!
//! Two independent routes to the matrix elements are provided: a closed
//! finite sum ([`BeamSplitterConvention::matrix_element`]) and a ladder
//! recursion building whole photon-number sectors ([`SectorBlock`]).

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI};

use crate::error::{Error, Result};
use crate::math::{i_pow, ln_binomial, ln_factorial};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BeamSplitterConvention {
    pub matrix: [[C64; 2]; 2],
}

impl Default for BeamSplitterConvention {
    fn default() -> Self {
        Self::symmetric()
    }
}

impl BeamSplitterConvention {
    /// `[[1, i], [i, 1]] / sqrt(2)`; reproduces the Holland-Burnett phase `(i/2)^n`.
    pub fn symmetric() -> Self {
        let r = C64::new(FRAC_1_SQRT_2, 0.0);
        let t = C64::new(0.0, FRAC_1_SQRT_2);
        Self {
            matrix: [[r, t], [t, r]],
        }
    }

    /// Arbitrary 2x2 mode matrix; rejected unless unitary to 1e-12.
    pub fn custom(matrix: [[C64; 2]; 2]) -> Result<Self> {
        let bs = Self { matrix };
        if bs.unitarity_defect() > 1e-12 {
            return Err(Error::Domain("beam-splitter matrix is not unitary".into()));
        }
        Ok(bs)
    }

    /// `max |(M M^dagger - I)_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        let m = &self.matrix;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let s: C64 = (0..2).map(|k| m[i][k] * m[j][k].conj()).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// `<p, q| U |x, y>` by expanding the transformed creation operators.
    ///
    /// Zero when `p + q != x + y`.
    pub fn matrix_element(&self, p: usize, q: usize, x: usize, y: usize) -> C64 {
        if p + q != x + y {
            return C64::new(0.0, 0.0);
        }
        let [[m00, m01], [m10, m11]] = self.matrix;
        let ln_pref = 0.5 * (ln_factorial(p) + ln_factorial(q) - ln_factorial(x) - ln_factorial(y));
        // k photons of the first input go to output a, p-k of the second input do too
        let k_lo = p.saturating_sub(y);
        let k_hi = x.min(p);
        let mut acc = C64::new(0.0, 0.0);
        for k in k_lo..=k_hi {
            let exps = [k, x - k, p - k, y + k - p];
            let coeffs = [m00, m01, m10, m11];
            let mut ln_mag = ln_pref + ln_binomial(x, k) + ln_binomial(y, p - k);
            let mut phase = 0.0;
            let mut vanishes = false;
            for (c, &e) in coeffs.iter().zip(&exps) {
                if e == 0 {
                    continue;
                }
                let r = c.norm();
                if r == 0.0 {
                    vanishes = true;
                    break;
                }
                ln_mag += e as f64 * r.ln();
                phase += e as f64 * c.arg();
            }
            if !vanishes {
                acc += C64::from_polar(ln_mag.exp(), phase);
            }
        }
        acc
    }

    /// Block of `U` on the sector with `m` photons in total.
    pub fn sector(&self, m: usize) -> SectorBlock {
        let mut block = SectorBlock::vacuum();
        while block.photons() < m {
            block = block.next(self);
        }
        block
    }

    /// Iterator over sectors `0, 1, 2, ...`.
    pub fn sectors(&self) -> SectorIter<'_> {
        SectorIter {
            bs: self,
            current: None,
        }
    }
}

/// `U` restricted to the `m`-photon sector.
///
/// `entry(p, x)` is `<p, m-p| U |x, m-x>`.
#[derive(Clone, Debug)]
pub struct SectorBlock {
    m: usize,
    // rows: output photons in mode a; columns: input photons in mode a
    block: Array2<C64>,
}

impl SectorBlock {
    fn vacuum() -> Self {
        Self {
            m: 0,
            block: Array2::from_elem((1, 1), C64::new(1.0, 0.0)),
        }
    }

    pub fn photons(&self) -> usize {
        self.m
    }

    /// `<p, m-p| U |x, m-x>`.
    #[inline]
    pub fn entry(&self, p: usize, x: usize) -> C64 {
        self.block[[p, x]]
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.block
    }

    /// Sector `m + 1` from sector `m`.
    ///
    /// Uses `m U|x,y> = sqrt(x) A^dagger U|x-1,y> + sqrt(y) B^dagger U|x,y-1>`
    /// with `A^dagger = m00 a^dagger + m01 b^dagger` and `B^dagger = m10 a^dagger + m11 b^dagger`.
    /// Averaging both ladder paths keeps rounding errors from compounding;
    /// the one-sided ladder loses all accuracy by ~100 photons.
    pub fn next(&self, bs: &BeamSplitterConvention) -> SectorBlock {
        let m = self.m + 1;
        let mf = m as f64;
        let [[m00, m01], [m10, m11]] = bs.matrix;
        let mut block = Array2::zeros((m + 1, m + 1));
        let sq: Vec<f64> = (0..=m).map(|k| (k as f64).sqrt()).collect();
        for x in 0..=m {
            let y = m - x;
            // (source column in sector m, coefficient for a^dagger, for b^dagger, weight)
            let mut paths = [(0usize, m00, m01, 0.0f64); 2];
            let mut n_paths = 0;
            if x > 0 {
                paths[n_paths] = (x - 1, m00, m01, sq[x]);
                n_paths += 1;
            }
            if y > 0 {
                paths[n_paths] = (x, m10, m11, sq[y]);
                n_paths += 1;
            }
            for &(src, ca, cb, w) in &paths[..n_paths] {
                let (ca, cb) = (ca * (w / mf), cb * (w / mf));
                for p in 0..m {
                    let v = self.block[[p, src]];
                    let q = m - 1 - p;
                    block[[p + 1, x]] += ca * v * sq[p + 1];
                    block[[p, x]] += cb * v * sq[q + 1];
                }
            }
        }
        SectorBlock { m, block }
    }

    /// `max |(B^dagger B - I)_{ij}|`.
    pub fn unitarity_defect(&self) -> f64 {
        let b = &self.block;
        let g = b.t().mapv(|z| z.conj()).dot(b);
        let mut worst: f64 = 0.0;
        for ((i, j), z) in g.indexed_iter() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((z - target).norm());
        }
        worst
    }
}

pub struct SectorIter<'a> {
    bs: &'a BeamSplitterConvention,
    current: Option<SectorBlock>,
}

impl Iterator for SectorIter<'_> {
    type Item = SectorBlock;

    fn next(&mut self) -> Option<SectorBlock> {
        let next = match &self.current {
            None => SectorBlock::vacuum(),
            Some(b) => b.next(self.bs),
        };
        self.current = Some(next.clone());
        Some(next)
    }
}

/// `A_{j,n} = <j, 2n-j| U |n, n>` in the symmetric convention.
pub fn hb_coefficient(j: usize, n: usize) -> Result<C64> {
    if j > 2 * n {
        return Err(Error::Domain(format!("j = {j} outside [0, {}]", 2 * n)));
    }
    if j % 2 == 1 {
        return Ok(C64::new(0.0, 0.0));
    }
    let h = j / 2;
    let ln_mag = -(n as f64) * LN_2 + 0.5 * (ln_factorial(2 * n - j) + ln_factorial(j))
        - ln_factorial(h)
        - ln_factorial(n - h);
    Ok(i_pow(n as i64) * ln_mag.exp())
}

/// All `A_{j,n}` for `j = 0..=2n`.
pub fn hb_coefficients(n: usize) -> Vec<C64> {
    (0..=2 * n)
        .map(|j| hb_coefficient(j, n).expect("j in range"))
        .collect()
}

/// Stirling form `i^n / sqrt(pi) * [(j/2)(n - j/2)]^{-1/4}`.
///
/// Only meaningful for analysis near `j = n`; singular at the end points.
pub fn hb_coefficient_stirling(j: usize, n: usize) -> Result<C64> {
    if j == 0 || j >= 2 * n || j % 2 == 1 {
        return Err(Error::Domain(format!(
            "Stirling form needs even j in (0, 2n); got j = {j}, n = {n}"
        )));
    }
    let h = j as f64 / 2.0;
    let mag = 1.0 / (PI.sqrt() * (h * (n as f64 - h)).powf(0.25));
    Ok(i_pow(n as i64) * mag)
}

/// `<p, q| U |x, y>` for the symmetric convention.
pub fn bs_matrix_element(p: usize, q: usize, x: usize, y: usize) -> C64 {
    BeamSplitterConvention::symmetric().matrix_element(p, q, x, y)
}
