//! Heralded state preparation from a two-mode squeezed vacuum.
//!
//! One arm of `sqrt(1 - lambda^2) sum_k lambda^k |k, k>` is sent into the
//! even-parity detector; the outcome `(n, n)` leaves the other arm in
//! `psi_j = sqrt(1 - lambda^2) c_{2n-j} lambda^j conj(A_{j,n})`.
//!
//! A coherent control of amplitude `beta * lambda` cancels the `lambda^j`
//! tilt and yields an even cat of size `|beta|^2`. Two such stages with a
//! displacement in between give a four-component cat.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beam_splitter::{hb_coefficient, BeamSplitterConvention};
use crate::detector::{default_cutoff, loss_weight, povm_element};
use crate::error::{Error, Result, TruncationWarning};
use crate::fock::{
    check_lambda, coherent_state, displacement_matrix, DensityMatrix, FockVector, State,
    DEFAULT_TRUNCATION,
};

/// Stand-in for infinite squeezing; the TMSV prefactor vanishes at exactly 1.
pub const LAMBDA_UNIT_LIMIT: f64 = 1.0 - 1e-6;

/// Largest fraction of the intermediate state's norm that the displacement
/// may push above the truncation before the pipeline refuses to continue.
pub const MAX_DISPLACEMENT_LEAK: f64 = 1e-4;

/// Closest integer to `v`, with exact halves going down.
pub fn round_half_down(v: f64) -> usize {
    let f = v.floor();
    let n = if v - f > 0.5 { f + 1.0 } else { f };
    n.max(0.0) as usize
}

/// Every free parameter of a preparation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    /// Target cat amplitude.
    pub beta: C64,
    pub lambda: f64,
    /// Stage-1 outcome `(n, n)`; defaults to the integer closest to
    /// `|beta * amplitude_scale|^2`.
    pub n: Option<usize>,
    pub eta: f64,
    /// Efficiency of the second stage's detectors; defaults to `eta`.
    pub eta_stage2: Option<f64>,
    pub n_trunc: usize,
    /// 1 for a two-component cat, 2 for the four-component pipeline.
    pub stages: u8,
    /// Stage 1 heralds a cat of amplitude `beta * amplitude_scale` using the
    /// control `beta * amplitude_scale * lambda`. Defaults to 1 for one
    /// stage and to `lambda` for two.
    pub amplitude_scale: Option<f64>,
    /// Displacement between the stages; defaults to `i conj(beta) lambda`,
    /// which equals `i beta lambda` for real `beta`. Each heralding step
    /// mirrors the phase of its control, so the conjugate keeps the output
    /// aligned with the target for complex `beta`.
    pub displacement: Option<C64>,
    /// Stage-2 outcome; defaults to `2 * round(|beta|^2)`.
    pub second_outcome: Option<usize>,
    /// Largest `x, y` in the loss sums; defaults to [`default_cutoff`].
    pub cutoff: Option<usize>,
}

impl SchemeConfig {
    pub fn two_component(beta: C64, lambda: f64) -> Self {
        Self {
            beta,
            lambda,
            n: None,
            eta: 1.0,
            eta_stage2: None,
            n_trunc: DEFAULT_TRUNCATION,
            stages: 1,
            amplitude_scale: None,
            displacement: None,
            second_outcome: None,
            cutoff: None,
        }
    }

    pub fn four_component(beta: C64, lambda: f64) -> Self {
        Self {
            stages: 2,
            n_trunc: 140,
            ..Self::two_component(beta, lambda)
        }
    }

    pub fn with_eta(mut self, eta: f64) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_trunc(mut self, n_trunc: usize) -> Self {
        self.n_trunc = n_trunc;
        self
    }

    pub fn amplitude_scale(&self) -> f64 {
        self.amplitude_scale
            .unwrap_or(if self.stages >= 2 { self.lambda } else { 1.0 })
    }

    /// Amplitude of the cat heralded by stage 1.
    pub fn stage1_cat_amplitude(&self) -> C64 {
        self.beta * self.amplitude_scale()
    }

    /// Coherent amplitude of the stage-1 control.
    pub fn control_amplitude(&self) -> C64 {
        self.stage1_cat_amplitude() * self.lambda
    }

    pub fn outcome(&self) -> usize {
        self.n
            .unwrap_or_else(|| round_half_down(self.stage1_cat_amplitude().norm_sqr()))
    }

    pub fn second_outcome(&self) -> usize {
        self.second_outcome
            .unwrap_or_else(|| 2 * round_half_down(self.beta.norm_sqr()))
    }

    pub fn displacement(&self) -> C64 {
        self.displacement
            .unwrap_or(C64::new(0.0, 1.0) * self.beta.conj() * self.lambda)
    }

    pub fn eta_stage2(&self) -> f64 {
        self.eta_stage2.unwrap_or(self.eta)
    }

    pub fn cutoff_for(&self, n: usize, eta: f64) -> usize {
        self.cutoff.unwrap_or_else(|| default_cutoff(n, eta))
    }

    /// Fills every defaulted field with its resolved value.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        c.amplitude_scale = Some(self.amplitude_scale());
        c.n = Some(self.outcome());
        c.eta_stage2 = Some(self.eta_stage2());
        if self.stages >= 2 {
            c.displacement = Some(self.displacement());
            c.second_outcome = Some(self.second_outcome());
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        check_lambda(self.lambda).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        for eta in [self.eta, self.eta_stage2()] {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(Error::InvalidConfig(format!("eta = {eta} outside (0, 1]")));
            }
        }
        if !(1..=2).contains(&self.stages) {
            return Err(Error::InvalidConfig(format!(
                "stages = {} (only 1 or 2 supported)",
                self.stages
            )));
        }
        let top = if self.stages == 2 {
            self.outcome().max(self.second_outcome())
        } else {
            self.outcome()
        };
        if self.n_trunc < 2 * top {
            return Err(Error::InvalidConfig(format!(
                "n_trunc = {} below 2 x outcome {top}",
                self.n_trunc
            )));
        }
        Ok(())
    }
}

/// Output of a heralding run; `state` is unnormalized.
#[derive(Clone, Debug, Serialize)]
pub struct HeraldedState {
    pub config: Option<SchemeConfig>,
    pub success_probability: f64,
    pub state: State,
    pub normalized: bool,
    /// Per-stage probabilities for multi-stage runs.
    pub stage_probabilities: Vec<f64>,
    pub warnings: Vec<TruncationWarning>,
}

impl HeraldedState {
    fn from_state(state: State) -> Self {
        Self {
            config: None,
            success_probability: state.weight(),
            state,
            normalized: false,
            stage_probabilities: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn normalized_state(&self) -> Result<State> {
        self.state.normalized()
    }

    pub fn normalized_vector(&self) -> Result<FockVector> {
        match &self.state {
            State::Pure(v) => v.normalized(),
            State::Mixed(_) => Err(Error::Domain("heralded state is mixed".into())),
        }
    }
}

/// `psi_j = sqrt(1 - lambda^2) c_{2n-j} lambda^j conj(A_{j,n})`, `j = 0..=2n`.
pub fn herald(control: &FockVector, lambda: f64, n: usize) -> Result<HeraldedState> {
    check_lambda(lambda)?;
    if control.n_trunc() < 2 * n {
        return Err(Error::Domain(format!(
            "control truncated at {} but outcome n = {n} needs photon number {}",
            control.n_trunc(),
            2 * n
        )));
    }
    let pref = (1.0 - lambda * lambda).sqrt();
    let mut amps = vec![C64::new(0.0, 0.0); control.len()];
    let mut lj = 1.0;
    for (j, a) in amps.iter_mut().enumerate().take(2 * n + 1) {
        if j % 2 == 0 {
            *a = control.get(2 * n - j) * hb_coefficient(j, n)?.conj() * (pref * lj);
        }
        lj *= lambda;
    }
    Ok(HeraldedState::from_state(State::Pure(FockVector::new(
        amps,
    ))))
}

/// Two-component cat from a coherent control `beta * lambda`.
///
/// The normalized output depends on `beta` only; it approximates the even
/// cat of `conj(beta)` (identical to that of `beta` for real or imaginary
/// `beta`).
pub fn cat_herald(beta: C64, lambda: f64, n: usize, n_trunc: usize) -> Result<HeraldedState> {
    let control = coherent_state(beta * lambda, n_trunc.max(2 * n));
    let mut out = herald(&control, lambda, n)?;
    let mut cfg = SchemeConfig::two_component(beta, lambda)
        .with_n(n)
        .with_trunc(n_trunc.max(2 * n));
    cfg.amplitude_scale = Some(1.0);
    out.config = Some(cfg);
    Ok(out)
}

/// Heralding through a detector of efficiency `eta`: the output is the
/// mixture of the arm-2 contractions against every POVM component.
pub fn herald_lossy(
    control: &FockVector,
    lambda: f64,
    n: usize,
    eta: f64,
    cutoff: usize,
) -> Result<HeraldedState> {
    check_lambda(lambda)?;
    if eta == 1.0 {
        let mut out = herald(control, lambda, n)?;
        out.state = State::Mixed(out.state.to_density());
        return Ok(out);
    }
    let effect = povm_element(control, n, eta, cutoff)?;
    let d = control.len();
    let pref = (1.0 - lambda * lambda).sqrt();
    let powers: Vec<f64> = (0..effect.dim())
        .map(|j| pref * lambda.powi(j as i32))
        .collect();

    let totals: Vec<f64> = effect
        .components
        .iter()
        .map(|comp| {
            comp.weight
                * comp
                    .vector
                    .amplitudes()
                    .iter()
                    .zip(&powers)
                    .map(|(v, p)| v.norm_sqr() * p * p)
                    .sum::<f64>()
        })
        .collect();
    let total: f64 = totals.iter().sum();
    let rho = ordered_sum(&effect.components, d, |acc, comp| {
        let psi: Vec<C64> = comp
            .vector
            .amplitudes()
            .iter()
            .zip(&powers)
            .take(d)
            .map(|(v, p)| v.conj() * *p)
            .collect();
        rank_one_update(acc, comp.weight, &psi);
    });
    let rho = DensityMatrix(rho);
    let mut out = HeraldedState::from_state(State::Mixed(rho));
    out.warnings.extend(effect.warnings);
    if total > 0.0 {
        out.warnings.extend(TruncationWarning::check(
            "herald_lossy output truncation",
            out.success_probability / total,
            1e-6,
        ));
    }
    Ok(out)
}

/// Sums per-item contributions in fixed-size chunks, in order, so the result
/// does not depend on the thread count.
fn ordered_sum<T, F>(items: &[T], d: usize, add: F) -> Array2<C64>
where
    T: Sync,
    F: Fn(&mut Array2<C64>, &T) + Sync,
{
    const CHUNK: usize = 32;
    let partials: Vec<Array2<C64>> = items
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = Array2::<C64>::zeros((d, d));
            for item in chunk {
                add(&mut acc, item);
            }
            acc
        })
        .collect();
    let mut total = Array2::<C64>::zeros((d, d));
    for p in &partials {
        total += p;
    }
    total
}

fn rank_one_update(rho: &mut Array2<C64>, w: f64, psi: &[C64]) {
    let last = match psi.iter().rposition(|z| z.norm_sqr() > 0.0) {
        Some(i) => i + 1,
        None => return,
    };
    for i in 0..last {
        let a = psi[i] * w;
        if a.norm_sqr() == 0.0 {
            continue;
        }
        for j in 0..last {
            rho[[i, j]] += a * psi[j].conj();
        }
    }
}

/// Heralding with an arbitrary (possibly mixed) control and efficiency `eta`.
///
/// Works directly with the beam-splitter sector blocks:
/// `rho_out[j,j'] = (1-lambda^2) lambda^{j+j'} sum_{x,y} w(x,y)
/// E_x(j) conj(E_x(j')) rho_c[m-j, m-j']` with `E_x(p) = <x,y|U|p,m-p>`.
pub fn herald_with_control_state(
    control: &State,
    lambda: f64,
    n: usize,
    eta: f64,
    cutoff: usize,
    n_trunc: usize,
) -> Result<HeraldedState> {
    check_lambda(lambda)?;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(format!(
            "efficiency eta = {eta} outside (0, 1]"
        )));
    }
    if control.n_trunc() < 2 * n {
        return Err(Error::Domain(format!(
            "control truncated at {} but outcome n = {n} needs photon number {}",
            control.n_trunc(),
            2 * n
        )));
    }
    let rho_c = control.to_density();
    let nc = rho_c.n_trunc();
    let cutoff = if eta == 1.0 { n } else { cutoff.max(n) };
    let d = n_trunc + 1;
    let bs = BeamSplitterConvention::symmetric();
    let lp: Vec<f64> = (0..=2 * cutoff)
        .map(|j| (1.0 - lambda * lambda).sqrt() * lambda.powi(j as i32))
        .collect();
    let mut rho = Array2::<C64>::zeros((d, d));
    let mut kept = 0.0;
    for block in bs.sectors().take(2 * cutoff + 1).skip(2 * n) {
        let m = block.photons();
        let x_lo = n.max(m.saturating_sub(cutoff));
        let x_hi = cutoff.min(m - n);
        if x_lo > x_hi {
            continue;
        }
        // only j with m - j inside the control's support contribute
        let j_lo = m.saturating_sub(nc);
        let j_hi = m.min(d - 1);
        if j_lo > j_hi {
            continue;
        }
        let xs: Vec<usize> = (x_lo..=x_hi).collect();
        let partial = ordered_sum(&xs, d, |acc, &x| {
            let w = loss_weight(x, m - x, n, eta);
            if w == 0.0 {
                return;
            }
            let e: Vec<C64> = (j_lo..=j_hi).map(|j| block.entry(x, j) * lp[j]).collect();
            for (a, j) in (j_lo..=j_hi).enumerate() {
                if e[a].norm_sqr() == 0.0 {
                    continue;
                }
                for (b, jp) in (j_lo..=j_hi).enumerate() {
                    acc[[j, jp]] += e[a] * e[b].conj() * rho_c.0[[m - j, m - jp]] * w;
                }
            }
        });
        kept += (x_lo..=x_hi)
            .map(|x| loss_weight(x, m - x, n, eta))
            .sum::<f64>();
        rho += &partial;
    }
    let mut out = HeraldedState::from_state(State::Mixed(DensityMatrix(rho)));
    if eta < 1.0 {
        out.warnings.extend(TruncationWarning::check(
            "herald loss tail",
            eta * eta * kept,
            1e-6,
        ));
    }
    Ok(out)
}

/// Single-stage cat preparation for `config` (lossy when `eta < 1`).
pub fn prepare_cat(config: &SchemeConfig) -> Result<HeraldedState> {
    config.validate()?;
    let n = config.outcome();
    let control = coherent_state(config.control_amplitude(), config.n_trunc);
    let mut out = if config.eta == 1.0 {
        herald(&control, config.lambda, n)?
    } else {
        herald_lossy(
            &control,
            config.lambda,
            n,
            config.eta,
            config.cutoff_for(n, config.eta),
        )?
    };
    out.config = Some(config.resolved());
    out.stage_probabilities = vec![out.success_probability];
    Ok(out)
}

/// Intermediate states of the four-component pipeline.
#[derive(Clone, Debug)]
pub struct PipelineStages {
    /// (i) coherent control of stage 1.
    pub control: FockVector,
    /// (ii) heralded two-component cat (unnormalized).
    pub cat: HeraldedState,
    /// (iii) displaced, normalized cat used as the stage-2 control.
    pub displaced: State,
    /// (iv) final four-component state (unnormalized).
    pub output: HeraldedState,
}

/// Two concatenated detectors with a displacement in between.
pub fn four_component_pipeline(config: &SchemeConfig) -> Result<HeraldedState> {
    Ok(four_component_stages(config)?.output)
}

pub fn four_component_stages(config: &SchemeConfig) -> Result<PipelineStages> {
    let mut config = config.clone();
    config.stages = 2;
    config.validate()?;
    let n_trunc = config.n_trunc;
    let n1 = config.outcome();
    let n2 = config.second_outcome();
    let control = coherent_state(config.control_amplitude(), n_trunc);

    let stage1 = if config.eta == 1.0 {
        herald(&control, config.lambda, n1)?
    } else {
        herald_lossy(
            &control,
            config.lambda,
            n1,
            config.eta,
            config.cutoff_for(n1, config.eta),
        )?
    };
    let p1 = stage1.success_probability;
    let mut warnings = stage1.warnings.clone();

    let dmat = displacement_matrix(config.displacement(), n_trunc);
    let cat = stage1.normalized_state()?;
    let displaced = match &cat {
        State::Pure(v) => State::Pure(v.resized(n_trunc).transformed(&dmat)?),
        State::Mixed(r) => State::Mixed(r.resized(n_trunc).conjugated_by(&dmat)?),
    };
    let retained = displaced.weight();
    if 1.0 - retained > MAX_DISPLACEMENT_LEAK {
        return Err(Error::Truncation(format!(
            "displaced intermediate lost {:.3e} of its norm above n_trunc = {n_trunc}",
            1.0 - retained
        )));
    }
    warnings.extend(TruncationWarning::check(
        "displaced intermediate",
        retained,
        TruncationWarning::DEFAULT_THRESHOLD,
    ));
    let displaced = displaced.normalized()?;

    let eta2 = config.eta_stage2();
    let stage2 = match (&displaced, eta2 == 1.0) {
        (State::Pure(v), true) => herald(v, config.lambda, n2)?,
        (State::Pure(v), false) => {
            herald_lossy(v, config.lambda, n2, eta2, config.cutoff_for(n2, eta2))?
        }
        (State::Mixed(_), _) => herald_with_control_state(
            &displaced,
            config.lambda,
            n2,
            eta2,
            config.cutoff_for(n2, eta2),
            n_trunc,
        )?,
    };
    let p2 = stage2.success_probability;
    warnings.extend(stage2.warnings.iter().cloned());

    let output = HeraldedState {
        config: Some(config.resolved()),
        success_probability: p1 * p2,
        state: stage2.state,
        normalized: false,
        stage_probabilities: vec![p1, p2],
        warnings,
    };
    Ok(PipelineStages {
        control,
        cat: stage1,
        displaced,
        output,
    })
}

/// Heralding probability of the run described by `config`: the squared norm
/// (or trace) for one stage, the product of stage probabilities for two.
pub fn success_probability(config: &SchemeConfig) -> Result<f64> {
    Ok(prepare(config)?.success_probability)
}

/// Dispatches on `config.stages`.
pub fn prepare(config: &SchemeConfig) -> Result<HeraldedState> {
    match config.stages {
        1 => prepare_cat(config),
        2 => four_component_pipeline(config),
        s => Err(Error::InvalidConfig(format!("stages = {s}"))),
    }
}
