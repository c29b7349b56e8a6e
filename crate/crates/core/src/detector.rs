//! The even-parity detector: a control state and an input meet on a balanced
//! beam splitter and both outputs are counted; the outcome `(n, n)` projects
//! the input onto an even-parity vector shaped by the control.
//!
//! With detection efficiency `eta < 1` the outcome is described by a POVM
//! element `Pi = sum_{x,y >= n} w(x,y) |chi_xy><chi_xy|` where
//! `w(x,y) = C(x,n) C(y,n) eta^{2n} (1-eta)^{x+y-2n}` is the probability that
//! `x` and `y` photons are thinned down to `n` each.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::beam_splitter::{hb_coefficient, BeamSplitterConvention};
use crate::error::{Error, Result, TruncationWarning};
use crate::fock::{FockVector, State};
use crate::math::ln_binomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EffectKind {
    Ideal,
    Lossy,
}

/// One `(x, y)` term of the POVM element.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectComponent {
    pub x: usize,
    pub y: usize,
    pub weight: f64,
    pub vector: FockVector,
}

/// Measurement operator of the detector for the outcome `(n, n)`.
#[derive(Clone, Debug)]
pub struct DetectorEffect {
    pub kind: EffectKind,
    pub eta: f64,
    pub n: usize,
    pub control: FockVector,
    /// Largest `x` and `y` kept in the sums.
    pub cutoff: usize,
    pub components: Vec<EffectComponent>,
    /// Fraction of the total loss weight `1/eta^2` dropped by the cutoff.
    pub tail_weight: f64,
    pub warnings: Vec<TruncationWarning>,
}

impl DetectorEffect {
    /// Input-mode dimension of the component vectors.
    pub fn dim(&self) -> usize {
        self.components
            .iter()
            .map(|c| c.vector.len())
            .max()
            .unwrap_or(1)
    }

    /// The projector vector of an ideal detector.
    pub fn chi(&self) -> Option<&FockVector> {
        match self.kind {
            EffectKind::Ideal => self.components.first().map(|c| &c.vector),
            EffectKind::Lossy => None,
        }
    }

    pub fn trace(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * c.vector.norm_sqr())
            .sum()
    }

    /// `<v| Pi |v>`.
    pub fn expectation(&self, v: &FockVector) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * c.vector.inner(v).norm_sqr())
            .sum()
    }

    /// `Tr(Pi rho)`; for a pure input this is `<psi|Pi|psi>`.
    pub fn probability(&self, input: &State) -> f64 {
        match input {
            State::Pure(v) => self.expectation(v),
            State::Mixed(rho) => self
                .components
                .iter()
                .map(|c| c.weight * rho.expectation(&c.vector))
                .sum(),
        }
    }

    /// `pr(j) = <j|Pi|j>`.
    pub fn diagonal(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for c in &self.components {
            for (o, a) in out.iter_mut().zip(c.vector.amplitudes()) {
                *o += c.weight * a.norm_sqr();
            }
        }
        out
    }
}

impl Serialize for DetectorEffect {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("DetectorEffect", 8)?;
        s.serialize_field("kind", &self.kind)?;
        s.serialize_field("eta", &self.eta)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("cutoff", &self.cutoff)?;
        s.serialize_field("tail_weight", &self.tail_weight)?;
        let xy: Vec<(usize, usize)> = self.components.iter().map(|c| (c.x, c.y)).collect();
        s.serialize_field("xy", &xy)?;
        let weights: Vec<f64> = self.components.iter().map(|c| c.weight).collect();
        s.serialize_field("weights", &weights)?;
        let vectors: Vec<&FockVector> = self.components.iter().map(|c| &c.vector).collect();
        s.serialize_field("vectors", &vectors)?;
        s.end()
    }
}

/// `chi_j = conj(c_{2n-j}) A_{j,n}` for `j = 0..=2n`, zero above.
pub fn project_chi(control: &FockVector, n: usize) -> Result<FockVector> {
    if control.n_trunc() < 2 * n {
        return Err(Error::Domain(format!(
            "control truncated at {} but outcome n = {n} needs photon number {}",
            control.n_trunc(),
            2 * n
        )));
    }
    let mut amps = vec![C64::new(0.0, 0.0); control.len()];
    for (j, a) in amps.iter_mut().enumerate().take(2 * n + 1).step_by(2) {
        *a = control.get(2 * n - j).conj() * hb_coefficient(j, n)?;
    }
    Ok(FockVector::new(amps))
}

/// Ideal-detector probability `<chi| rho |chi>` of the outcome `(n, n)`.
pub fn detection_probability(input: &State, control: &FockVector, n: usize) -> Result<f64> {
    let chi = project_chi(control, n)?;
    Ok(match input {
        State::Pure(v) => chi.inner(v).norm_sqr(),
        State::Mixed(rho) => rho.expectation(&chi),
    })
}

/// Cutoff rule for the loss sums: `n + ceil(10 (1 - eta) n) + 20`.
pub fn default_cutoff(n: usize, eta: f64) -> usize {
    n + (10.0 * (1.0 - eta) * n as f64).ceil() as usize + 20
}

/// `C(x,n) C(y,n) eta^{2n} (1-eta)^{x+y-2n}`.
pub fn loss_weight(x: usize, y: usize, n: usize, eta: f64) -> f64 {
    if x < n || y < n {
        return 0.0;
    }
    let extra = (x + y - 2 * n) as i32;
    if eta >= 1.0 {
        return if extra == 0 { 1.0 } else { 0.0 };
    }
    let ln_w = ln_binomial(x, n)
        + ln_binomial(y, n)
        + 2.0 * n as f64 * eta.ln()
        + extra as f64 * (1.0 - eta).ln();
    ln_w.exp()
}

/// POVM element for outcome `(n, n)` with efficiency `eta` (symmetric splitter).
///
/// At `eta = 1` this is the single projector from [`project_chi`].
pub fn povm_element(
    control: &FockVector,
    n: usize,
    eta: f64,
    cutoff: usize,
) -> Result<DetectorEffect> {
    if eta == 1.0 {
        let chi = project_chi(control, n)?;
        return Ok(DetectorEffect {
            kind: EffectKind::Ideal,
            eta,
            n,
            control: control.clone(),
            cutoff: n,
            components: vec![EffectComponent {
                x: n,
                y: n,
                weight: 1.0,
                vector: chi,
            }],
            tail_weight: 0.0,
            warnings: Vec::new(),
        });
    }
    povm_element_with(
        &BeamSplitterConvention::symmetric(),
        control,
        n,
        eta,
        cutoff,
    )
}

/// POVM element built from the sector blocks of an arbitrary splitter.
///
/// `chi_xy = <phi| U^dagger |x, y>` up to the per-term phase `(-1)^x`, which
/// leaves `Pi` unchanged and makes the `(n, n)` term coincide with
/// [`project_chi`] for the symmetric splitter.
pub fn povm_element_with(
    bs: &BeamSplitterConvention,
    control: &FockVector,
    n: usize,
    eta: f64,
    cutoff: usize,
) -> Result<DetectorEffect> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!(
            "efficiency eta = {eta} outside (0, 1]"
        )));
    }
    if cutoff < n {
        return Err(Error::Domain(format!(
            "cutoff {cutoff} below outcome n = {n}"
        )));
    }
    if control.n_trunc() < 2 * n {
        return Err(Error::Domain(format!(
            "control truncated at {} but outcome n = {n} needs photon number {}",
            control.n_trunc(),
            2 * n
        )));
    }
    let cutoff = if eta == 1.0 { n } else { cutoff };
    let dim = 2 * cutoff + 1;
    let mut components = Vec::new();
    let mut kept = 0.0;
    for block in bs.sectors().take(2 * cutoff + 1).skip(2 * n) {
        let m = block.photons();
        let x_lo = n.max(m.saturating_sub(cutoff));
        let x_hi = cutoff.min(m - n);
        if x_lo > x_hi {
            continue;
        }
        let terms: Vec<EffectComponent> = (x_lo..=x_hi)
            .into_par_iter()
            .map(|x| {
                let y = m - x;
                let weight = loss_weight(x, y, n, eta);
                let sign = if x % 2 == 0 { 1.0 } else { -1.0 };
                let mut amps = vec![C64::new(0.0, 0.0); dim];
                for (p, a) in amps.iter_mut().enumerate().take(m + 1) {
                    let c = control.get(m - p);
                    if c.norm_sqr() == 0.0 {
                        continue;
                    }
                    *a = (c * block.entry(x, p)).conj() * sign;
                }
                EffectComponent {
                    x,
                    y,
                    weight,
                    vector: FockVector::new(amps),
                }
            })
            .collect();
        kept += terms.iter().map(|t| t.weight).sum::<f64>();
        components.extend(terms);
    }
    let tail_weight = (1.0 - eta * eta * kept).max(0.0);
    let warnings = TruncationWarning::check("povm_element loss tail", 1.0 - tail_weight, 1e-6)
        .into_iter()
        .collect();
    Ok(DetectorEffect {
        kind: if eta == 1.0 {
            EffectKind::Ideal
        } else {
            EffectKind::Lossy
        },
        eta,
        n,
        control: control.clone(),
        cutoff,
        components,
        tail_weight,
        warnings,
    })
}

/// `pr(j) = <j| Pi |j>`.
pub fn povm_diagonal(effect: &DetectorEffect) -> Vec<f64> {
    effect.diagonal()
}

/// `<chi^|Pi|chi^> / Tr(Pi)` with `chi^` the unit-normalized `chi`.
///
/// Both sides are normalized so an ideal detector scores exactly 1.
pub fn projector_fidelity(effect: &DetectorEffect, chi: &FockVector) -> Result<f64> {
    let chi = chi.normalized()?;
    let tr = effect.trace();
    if !(tr > 0.0) {
        return Err(Error::ZeroNorm);
    }
    if effect.kind == EffectKind::Ideal {
        if let Some(v) = effect.chi() {
            if let Ok(v) = v.normalized() {
                if (v.inner(&chi).norm_sqr() - 1.0).abs() < 1e-14 {
                    return Ok(1.0);
                }
            }
        }
    }
    Ok((effect.expectation(&chi) / tr).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::coherent_state;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn chi_for_vacuum_and_two_photon_controls() {
        let chi = project_chi(&FockVector::vacuum(4), 1).unwrap();
        assert!((chi.get(2) - C64::new(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((chi.norm_sqr() - 0.5).abs() < 1e-15);
        assert_eq!(chi.get(0), C64::new(0.0, 0.0));

        let chi = project_chi(&FockVector::basis(2, 4), 1).unwrap();
        assert!((chi.get(0) - C64::new(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!(chi.amplitudes()[1..].iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn chi_flat_control_follows_hb_distribution() {
        let chi = project_chi(&FockVector::flat(60), 20).unwrap();
        for j in 0..=40 {
            let a = hb_coefficient(j, 20).unwrap();
            assert!((chi.get(j).norm_sqr() - a.norm_sqr()).abs() < 1e-15);
        }
    }

    #[test]
    fn chi_rejects_short_control() {
        assert!(project_chi(&FockVector::vacuum(3), 2).is_err());
    }

    #[test]
    fn odd_inputs_never_fire() {
        let control = coherent_state(C64::new(1.3, 0.4), 30);
        for n_in in [1usize, 3, 5] {
            for n in 0..=10 {
                let input = State::Pure(FockVector::basis(n_in, 30));
                assert_eq!(detection_probability(&input, &control, n).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn hong_ou_mandel_pair() {
        // |1>|1> never exits as |1,1>
        let one = FockVector::basis(1, 4);
        let p = detection_probability(&State::Pure(one.clone()), &one, 1).unwrap();
        assert!(p.abs() < 1e-30);
    }

    #[test]
    fn ideal_povm_is_projector() {
        let control = coherent_state(C64::new(2.0, 0.0), 20);
        let e = povm_element(&control, 4, 1.0, 10).unwrap();
        assert_eq!(e.components.len(), 1);
        assert_eq!(e.kind, EffectKind::Ideal);
        assert_eq!(e.components[0].vector, project_chi(&control, 4).unwrap());
        let fid = projector_fidelity(&e, &project_chi(&control, 4).unwrap()).unwrap();
        assert_eq!(fid, 1.0);
    }

    #[test]
    fn ideal_term_of_general_builder_matches_projector() {
        let control = coherent_state(C64::new(1.5, -0.5), 24);
        let e =
            povm_element_with(&BeamSplitterConvention::symmetric(), &control, 5, 1.0, 5).unwrap();
        let chi = project_chi(&control, 5).unwrap();
        assert_eq!(e.components.len(), 1);
        for j in 0..=10 {
            assert!((e.components[0].vector.get(j) - chi.get(j)).norm() < 1e-12);
        }
    }

    #[test]
    fn lossy_diagonal_is_positive_with_odd_terms() {
        let e = povm_element(&FockVector::flat(140), 10, 0.85, default_cutoff(10, 0.85)).unwrap();
        let d = povm_diagonal(&e);
        assert!(d.iter().all(|v| v.is_finite() && *v >= 0.0));
        assert!(d.iter().skip(1).step_by(2).sum::<f64>() > 0.0);
        assert!(e.tail_weight < 1e-6);
        assert!(e.components.iter().all(|c| c.weight >= 0.0));
    }

    #[test]
    fn vacuum_outcome_keeps_only_vacuum() {
        let e = povm_element(&FockVector::flat(10), 0, 1.0, 0).unwrap();
        let d = povm_diagonal(&e);
        assert!(d[0] > 0.0);
        assert!(d[1..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn loss_weight_closed_form() {
        let (n, eta) = (3usize, 0.8f64);
        let w = loss_weight(n + 1, n, n, eta);
        assert!((w - 4.0 * eta.powi(6) * 0.2).abs() < 1e-15);
        assert_eq!(loss_weight(2, 5, 3, eta), 0.0);
        // sum over x, y >= n is 1/eta^2
        let s: f64 = (n..200)
            .flat_map(|x| (n..200).map(move |y| (x, y)))
            .map(|(x, y)| loss_weight(x, y, n, eta))
            .sum();
        assert!((s - 1.0 / (eta * eta)).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_efficiency() {
        let c = FockVector::flat(10);
        assert!(povm_element(&c, 2, 0.0, 5).is_err());
        assert!(povm_element(&c, 2, 1.2, 5).is_err());
        assert!(povm_element(&c, 2, 0.9, 1).is_err());
    }
}
