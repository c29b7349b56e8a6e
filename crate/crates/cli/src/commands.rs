//! Subcommand implementations. Each returns the resolved parameters, the
//! replay arguments and a results summary; files go through [`Ctx`].

use crate::output::{fmt_f64, to_json, OutDir, RunManifest, Table};
use crate::spec::{fmt_complex, fmt_list};
use crate::{
    Amplitude, CatArgs, Common, DetectorDistArgs, FourCatArgs, GridArgs, PovmFidelityArgs,
    ScalingArgs, Squeezing, WignerArgs,
};
use evenparity::detector::{default_cutoff, povm_element, project_chi};
use evenparity::engineering::round_half_down;
use evenparity::metrics::{ideal_trunc, wigner as wigner_grid, WIGNER_CONVENTION};
use evenparity::optimize::{four_component_config, FOUR_COMPONENT_TRUNCATION};
use evenparity::{
    fidelity, lambda_to_squeezing_db, negativity_volume, normalized_negativity,
    optimize_four_component, prepare, projector_fidelity, scaling_fit, squeezing_db_to_lambda,
    Error, FockVector, GridSpec, IdealCat, SchemeConfig, SearchOptions, State, WignerGrid, C64,
    DEFAULT_TRUNCATION, LAMBDA_UNIT_LIMIT,
};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or inputs: exit code 2.
    Usage(String),
    /// Truncation or other numerical failure: exit code 3.
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) | Self::Numerical(m) | Self::Io(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::InvalidConfig(_) | Error::DimensionMismatch { .. } => {
                Self::Usage(e.to_string())
            }
            Error::Truncation(_) | Error::ZeroNorm | Error::Underflow(_) => {
                Self::Numerical(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub struct Outcome {
    pub parameters: Value,
    pub replay: Vec<String>,
    pub results: Value,
}

/// Output directory plus the warnings collected during a run.
pub struct Ctx {
    out: OutDir,
    warnings: Vec<String>,
}

impl Ctx {
    pub fn new(dir: &Path) -> CliResult<Self> {
        let out = OutDir::create(dir)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self {
            out,
            warnings: Vec::new(),
        })
    }

    fn warn(&mut self, msg: impl fmt::Display) {
        let msg = msg.to_string();
        log::warn!("{msg}");
        if !self.warnings.contains(&msg) {
            self.warnings.push(msg);
        }
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        self.out
            .write(name, bytes)
            .map_err(|e| CliError::Io(format!("cannot write {name}: {e}")))
    }

    /// Writes `<command>.manifest.json` and returns its path.
    pub fn finish(self, command: &str, outcome: Outcome, wall: f64) -> CliResult<PathBuf> {
        let manifest = RunManifest {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            parameters: outcome.parameters,
            replay: outcome.replay,
            results: outcome.results,
            wall_time_s: wall,
            outputs: self.out.files.clone(),
            warnings: self.warnings,
        };
        let path = self.out.path().join(format!("{command}.manifest.json"));
        crate::output::write_atomic(&path, &to_json(&manifest))?;
        Ok(path)
    }
}

fn c64_json(z: C64) -> Value {
    json!([z.re, z.im])
}

fn beta_of(a: &Amplitude) -> CliResult<C64> {
    match (a.beta, a.size) {
        (Some(b), _) => Ok(b),
        (None, Some(s)) if s >= 0.0 && s.is_finite() => Ok(C64::new(s.sqrt(), 0.0)),
        (None, Some(s)) => Err(usage(format!("--size {s} must be a non-negative number"))),
        (None, None) => Err(usage("one of --beta or --size is required")),
    }
}

/// Resolves `--lambda` / `--db`, mapping the unit limit to [`LAMBDA_UNIT_LIMIT`].
fn lambda_of(sq: &Squeezing, default: Option<f64>, ctx: &mut Ctx) -> CliResult<f64> {
    let lambda = match (sq.lambda, sq.db, default) {
        (Some(l), _, _) => l,
        (None, Some(db), _) if db >= 0.0 && db.is_finite() => squeezing_db_to_lambda(db),
        (None, Some(db), _) => return Err(usage(format!("--db {db} must be non-negative"))),
        (None, None, Some(l)) => l,
        (None, None, None) => return Err(usage("one of --lambda or --db is required")),
    };
    if !(0.0..=1.0).contains(&lambda) {
        return Err(usage(format!("lambda = {lambda} outside [0, 1]")));
    }
    if lambda > LAMBDA_UNIT_LIMIT {
        ctx.warn(format!(
            "lambda = {lambda} replaced by the unit limit {LAMBDA_UNIT_LIMIT}"
        ));
        return Ok(LAMBDA_UNIT_LIMIT);
    }
    Ok(lambda)
}

fn check_eta(eta: f64) -> CliResult<f64> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(eta)
    } else {
        Err(usage(format!("eta = {eta} outside (0, 1]")))
    }
}

fn grid_of(g: &GridArgs, default_half_width: f64) -> CliResult<GridSpec> {
    if g.grid_points < 3 {
        return Err(usage("--grid-points must be at least 3"));
    }
    let mut spec = GridSpec::square(default_half_width, g.grid_points);
    if let Some(h) = g.half_width {
        if !(h > 0.0 && h.is_finite()) {
            return Err(usage(format!("--half-width {h} must be positive")));
        }
        spec = GridSpec::square(h, g.grid_points);
    }
    if let Some(b) = &g.bounds {
        let v = crate::spec::parse_f64_list(b).map_err(usage)?;
        let [x_min, x_max, p_min, p_max] = v[..] else {
            return Err(usage("--bounds takes x_min,x_max,p_min,p_max"));
        };
        if !(x_max > x_min && p_max > p_min) {
            return Err(usage("--bounds must have x_max > x_min and p_max > p_min"));
        }
        spec = GridSpec {
            x_min,
            x_max,
            p_min,
            p_max,
            nx: g.grid_points,
            np: g.grid_points,
        };
    }
    Ok(spec)
}

fn grid_json(g: &GridSpec) -> Value {
    json!({
        "bounds": {"x_min": g.x_min, "x_max": g.x_max, "p_min": g.p_min, "p_max": g.p_max},
        "shape": [g.np, g.nx],
    })
}

fn grid_replay(g: &GridSpec) -> Vec<String> {
    vec![
        "--grid-points".into(),
        g.nx.to_string(),
        "--bounds".into(),
        format!("{},{},{},{}", g.x_min, g.x_max, g.p_min, g.p_max),
    ]
}

fn args(items: &[(&str, String)]) -> Vec<String> {
    items
        .iter()
        .flat_map(|(k, v)| [format!("--{k}"), v.clone()])
        .collect()
}

/// Writes `<stem>.csv`, `<stem>.bin` and the JSON header `<stem>.json`.
fn write_grid(ctx: &mut Ctx, stem: &str, grid: &WignerGrid, extra: Value) -> CliResult<Value> {
    for w in &grid.warnings {
        ctx.warn(format!("{stem}: {w}"));
    }
    let (csv, bin) = (format!("{stem}.csv"), format!("{stem}.bin"));
    ctx.write(&csv, grid.to_csv().as_bytes())?;
    ctx.write(&bin, &grid.to_le_bytes())?;
    let stats = json!({
        "integral": grid.integral(),
        "negativity_volume": negativity_volume(grid),
        "max_abs": grid.max_abs(),
        "boundary_max_abs": grid.boundary_max_abs(),
    });
    let mut header = grid_json(&grid.spec());
    let h = header.as_object_mut().unwrap();
    h.insert("convention".into(), json!(WIGNER_CONVENTION));
    h.insert(
        "layout".into(),
        json!("row-major; row k is p_k, column l is x_l; samples at cell midpoints"),
    );
    h.insert("dtype".into(), json!("f64 little-endian"));
    h.insert("csv".into(), json!(csv));
    h.insert("bin".into(), json!(bin));
    h.insert("stats".into(), stats.clone());
    if let Value::Object(m) = extra {
        h.extend(m);
    }
    ctx.write(&format!("{stem}.json"), &to_json(&header))?;
    Ok(stats)
}

pub fn detector_dist(a: &DetectorDistArgs, common: &Common, ctx: &mut Ctx) -> CliResult<Outcome> {
    let n = a.n;
    let etas: Vec<f64> = a
        .eta
        .iter()
        .map(|&e| check_eta(e))
        .collect::<CliResult<_>>()?;
    let cutoffs: Vec<usize> = etas
        .iter()
        .map(|&eta| a.cutoff.unwrap_or_else(|| default_cutoff(n, eta)).max(n))
        .collect();
    let n_trunc = common
        .trunc
        .unwrap_or(DEFAULT_TRUNCATION)
        .max(2 * cutoffs.iter().max().unwrap());
    let control = a.control.vector(n_trunc).map_err(usage)?;
    let effects = etas
        .par_iter()
        .zip(&cutoffs)
        .map(|(&eta, &cutoff)| povm_element(&control, n, eta, cutoff))
        .collect::<Result<Vec<_>, _>>()?;
    let diags: Vec<Vec<f64>> = effects.iter().map(|e| e.diagonal()).collect();
    let rows = diags
        .iter()
        .map(|d| d.iter().rposition(|v| *v != 0.0).map_or(1, |k| k + 1))
        .max()
        .unwrap_or(1);

    let mut table = Table::new(
        std::iter::once("j".to_string()).chain(etas.iter().map(|e| format!("pr_eta_{e}"))),
    );
    for j in 0..rows {
        let mut row = vec![j.to_string()];
        row.extend(
            diags
                .iter()
                .map(|d| fmt_f64(d.get(j).copied().unwrap_or(0.0))),
        );
        table.push(row);
    }
    ctx.write("detector-dist.csv", &table.to_bytes())?;

    let mut summary = Vec::new();
    for ((effect, d), &eta) in effects.iter().zip(&diags).zip(&etas) {
        for w in &effect.warnings {
            ctx.warn(format!("eta = {eta}: {w}"));
        }
        let odd: f64 = d.iter().skip(1).step_by(2).sum();
        summary.push(json!({
            "eta": eta,
            "cutoff": effect.cutoff,
            "trace": d.iter().sum::<f64>(),
            "odd_weight": odd,
            "tail_weight": effect.tail_weight,
        }));
    }
    Ok(Outcome {
        parameters: json!({
            "n": n,
            "eta": etas,
            "control": a.control.to_string(),
            "cutoff": cutoffs,
            "cutoff_rule": if a.cutoff.is_some() { "fixed" } else { "n + ceil(10 (1 - eta) n) + 20" },
            "n_trunc": n_trunc,
            "rows": rows,
        }),
        replay: [
            vec!["detector-dist".to_string()],
            args(&[
                ("n", n.to_string()),
                ("eta", fmt_list(&etas)),
                ("control", a.control.to_string()),
                ("trunc", n_trunc.to_string()),
            ]),
            a.cutoff
                .map(|c| args(&[("cutoff", c.to_string())]))
                .unwrap_or_default(),
        ]
        .concat(),
        results: json!({ "per_eta": summary }),
    })
}

struct CatRun {
    config: SchemeConfig,
    cutoff: Option<usize>,
    out: evenparity::HeraldedState,
    fidelity: f64,
    negativity: Option<f64>,
    negativity_note: Option<String>,
}

fn run_cat(cfg: &SchemeConfig, grid: &GridSpec) -> CliResult<CatRun> {
    let out = prepare(cfg)?;
    let config = out.config.clone().unwrap_or_else(|| cfg.resolved());
    // the scheme heralds the even cat of conj(beta)
    let target = IdealCat::two(cfg.beta.conj()).state(cfg.n_trunc)?;
    let fidelity = fidelity(&out.state, &target)?;
    let (negativity, negativity_note) =
        match normalized_negativity(&out.state, cfg.beta, Some(*grid)) {
            Ok(v) => (Some(v), None),
            Err(Error::Underflow(m)) => (None, Some(m)),
            Err(e) => return Err(e.into()),
        };
    let n = config.outcome();
    Ok(CatRun {
        cutoff: (cfg.eta < 1.0).then(|| cfg.cutoff_for(n, cfg.eta)),
        config,
        out,
        fidelity,
        negativity,
        negativity_note,
    })
}

pub fn cat(a: &CatArgs, common: &Common, ctx: &mut Ctx) -> CliResult<Outcome> {
    let beta = beta_of(&a.amplitude)?;
    let lambda = lambda_of(&a.squeezing, None, ctx)?;
    let n_trunc = common.trunc.unwrap_or(DEFAULT_TRUNCATION);
    let grid = grid_of(&a.grid, GridSpec::for_beta(beta).x_max)?;
    let etas = match &a.sweep_eta {
        Some(r) => crate::spec::parse_range(r).map_err(usage)?,
        None => vec![a.eta],
    };
    for &eta in &etas {
        check_eta(eta)?;
    }
    let base = {
        let mut c = SchemeConfig::two_component(beta, lambda).with_trunc(n_trunc);
        c.n = a.n;
        c.cutoff = a.cutoff;
        c
    };
    let runs = etas
        .par_iter()
        .map(|&eta| run_cat(&base.clone().with_eta(eta), &grid))
        .collect::<CliResult<Vec<_>>>()?;
    for r in &runs {
        for w in &r.out.warnings {
            ctx.warn(format!("eta = {}: {w}", r.config.eta));
        }
        if let Some(m) = &r.negativity_note {
            ctx.warn(format!("normalized negativity undefined: {m}"));
        }
    }
    let n = runs[0].config.outcome();
    let report = |r: &CatRun| {
        json!({
            "eta": r.config.eta,
            "fidelity": r.fidelity,
            "success_probability": r.out.success_probability,
            "normalized_negativity": r.negativity,
        })
    };

    let mut replay = vec!["cat".to_string()];
    replay.extend(args(&[
        ("beta", fmt_complex(beta)),
        ("lambda", lambda.to_string()),
        ("n", n.to_string()),
        ("trunc", n_trunc.to_string()),
    ]));
    if let Some(c) = a.cutoff {
        replay.extend(args(&[("cutoff", c.to_string())]));
    }
    match &a.sweep_eta {
        Some(r) => replay.extend(args(&[("sweep-eta", r.clone())])),
        None => replay.extend(args(&[("eta", a.eta.to_string())])),
    }
    replay.extend(grid_replay(&grid));

    let results = if a.sweep_eta.is_some() {
        let mut table = Table::new([
            "eta",
            "fidelity",
            "success_probability",
            "normalized_negativity",
        ]);
        for r in &runs {
            table.push(vec![
                fmt_f64(r.config.eta),
                fmt_f64(r.fidelity),
                fmt_f64(r.out.success_probability),
                r.negativity.map(fmt_f64).unwrap_or_default(),
            ]);
        }
        ctx.write("cat.sweep.csv", &table.to_bytes())?;
        json!({ "points": runs.len() })
    } else {
        let r = &runs[0];
        ctx.write("cat.state.json", &to_json(&r.out))?;
        let rep = report(r);
        ctx.write("cat.report.json", &to_json(&rep))?;
        rep
    };
    Ok(Outcome {
        parameters: json!({
            "beta": c64_json(beta),
            "target_beta": c64_json(beta.conj()),
            "lambda": lambda,
            "squeezing_db": lambda_to_squeezing_db(lambda),
            "n": n,
            "eta": etas,
            "cutoff": runs.iter().map(|r| r.cutoff).collect::<Vec<_>>(),
            "n_trunc": n_trunc,
            "control_amplitude": c64_json(runs[0].config.control_amplitude()),
            "grid": grid_json(&grid),
        }),
        replay,
        results,
    })
}

pub fn four_cat(a: &FourCatArgs, common: &Common, ctx: &mut Ctx) -> CliResult<Outcome> {
    let beta = beta_of(&a.amplitude)?;
    let lambda = lambda_of(&a.squeezing, Some(LAMBDA_UNIT_LIMIT), ctx)?;
    let eta = check_eta(a.eta)?;
    let eta2 = check_eta(a.eta2.unwrap_or(eta))?;
    let n_trunc = common.trunc.unwrap_or(FOUR_COMPONENT_TRUNCATION);
    let grid = grid_of(&a.grid, std::f64::consts::SQRT_2 * beta.norm() + 5.0)?;

    let mut optimization = None;
    let mut cfg = if a.optimize {
        let opts = SearchOptions {
            n_trunc,
            ..SearchOptions::default()
        };
        let r = optimize_four_component(beta, lambda, &opts)?;
        let p = &r.best_params;
        let cfg = four_component_config(
            beta,
            lambda,
            p["n1"] as usize,
            p["n2"] as usize,
            p["control"],
            p["displacement"],
            n_trunc,
        );
        optimization = Some(r);
        cfg
    } else {
        let mut c = SchemeConfig::four_component(beta, lambda).with_trunc(n_trunc);
        c.n = a.n1;
        c.second_outcome = a.n2;
        c.amplitude_scale = a.control_scale;
        c.displacement = a.displacement;
        c
    };
    cfg.eta = eta;
    cfg.eta_stage2 = Some(eta2);
    cfg.cutoff = a.cutoff;
    let cfg = cfg.resolved();

    let stages = evenparity::four_component_stages(&cfg)?;
    let target = IdealCat::four(beta).state(n_trunc)?;
    let fid = fidelity(&stages.output.state, &target)?;
    for w in &stages.output.warnings {
        ctx.warn(w);
    }
    let states = [
        (
            "i",
            "coherent control of stage 1",
            State::Pure(stages.control.clone()),
        ),
        (
            "ii",
            "heralded two-component cat",
            stages.cat.normalized_state()?,
        ),
        (
            "iii",
            "displaced cat, control of stage 2",
            stages.displaced.clone(),
        ),
        (
            "iv",
            "four-component output",
            stages.output.normalized_state()?,
        ),
    ];
    let grids = states
        .par_iter()
        .map(|(_, _, s)| wigner_grid(s, &grid))
        .collect::<Result<Vec<_>, _>>()?;
    let mut stage_stats = serde_json::Map::new();
    for ((label, what, _), g) in states.iter().zip(&grids) {
        let stats = write_grid(
            ctx,
            &format!("four-cat.stage-{label}"),
            g,
            json!({"stage": label, "description": what}),
        )?;
        stage_stats.insert(label.to_string(), stats);
    }
    ctx.write("four-cat.state.json", &to_json(&stages.output))?;
    let report = json!({
        "fidelity": fid,
        "target": "|b - ib> + |-b + ib> + exp(-2i|b|^2) (|b + ib> + |-b - ib>), normalized",
        "success_probability": stages.output.success_probability,
        "stage_probabilities": stages.output.stage_probabilities,
        "stages": stage_stats,
    });
    ctx.write("four-cat.report.json", &to_json(&report))?;
    if let Some(r) = &optimization {
        ctx.write("four-cat.optimization.json", &to_json(r))?;
        if r.boundary {
            ctx.warn("optimal outcome sits on the edge of its search window");
        }
        if !r.converged {
            ctx.warn("four-component search stopped on its evaluation budget");
        }
    }

    let n1 = cfg.outcome();
    let n2 = cfg.second_outcome();
    let cutoffs = [
        (eta < 1.0).then(|| cfg.cutoff_for(n1, eta)),
        (eta2 < 1.0).then(|| cfg.cutoff_for(n2, eta2)),
    ];
    let mut replay = vec!["four-cat".to_string()];
    replay.extend(args(&[
        ("beta", fmt_complex(beta)),
        ("lambda", lambda.to_string()),
        ("eta", eta.to_string()),
        ("eta2", eta2.to_string()),
        ("n1", n1.to_string()),
        ("n2", n2.to_string()),
        ("control-scale", cfg.amplitude_scale().to_string()),
        ("displacement", fmt_complex(cfg.displacement())),
        ("trunc", n_trunc.to_string()),
    ]));
    if let Some(c) = a.cutoff {
        replay.extend(args(&[("cutoff", c.to_string())]));
    }
    replay.extend(grid_replay(&grid));
    Ok(Outcome {
        parameters: json!({
            "beta": c64_json(beta),
            "lambda": lambda,
            "squeezing_db": lambda_to_squeezing_db(lambda),
            "eta": eta,
            "eta2": eta2,
            "n1": n1,
            "n2": n2,
            "control_scale": cfg.amplitude_scale(),
            "control_amplitude": c64_json(cfg.control_amplitude()),
            "displacement": c64_json(cfg.displacement()),
            "cutoff": cutoffs,
            "n_trunc": n_trunc,
            "optimized": a.optimize,
            "grid": grid_json(&grid),
        }),
        replay,
        results: json!({
            "fidelity": fid,
            "success_probability": stages.output.success_probability,
        }),
    })
}

pub fn scaling(a: &ScalingArgs, common: &Common, ctx: &mut Ctx) -> CliResult<Outcome> {
    let n_trunc = common.trunc.unwrap_or(DEFAULT_TRUNCATION);
    let fit = scaling_fit(&a.sizes, n_trunc)?;
    let mut table = Table::new(["size", "lambda", "squeezing_db", "success_probability"]);
    for &(s, l, p) in &fit.points {
        table.push(vec![
            fmt_f64(s),
            fmt_f64(l),
            fmt_f64(lambda_to_squeezing_db(l)),
            fmt_f64(p),
        ]);
    }
    ctx.write("scaling.csv", &table.to_bytes())?;
    ctx.write("scaling.fit.json", &to_json(&fit))?;
    let outcomes: Vec<usize> = a.sizes.iter().map(|&s| round_half_down(s)).collect();
    Ok(Outcome {
        parameters: json!({
            "sizes": a.sizes,
            "n": outcomes,
            "lambda_search": evenparity::optimize::LAMBDA_SEARCH,
            "n_trunc": n_trunc,
        }),
        replay: [
            vec!["scaling".to_string()],
            args(&[
                ("sizes", fmt_list(&a.sizes)),
                ("trunc", n_trunc.to_string()),
            ]),
        ]
        .concat(),
        results: json!({
            "exponent": fit.exponent,
            "intercept": fit.intercept,
            "r_squared": fit.r_squared,
        }),
    })
}

pub fn povm_fidelity(a: &PovmFidelityArgs, common: &Common, ctx: &mut Ctx) -> CliResult<Outcome> {
    let etas: Vec<f64> = a
        .eta
        .iter()
        .map(|&e| check_eta(e))
        .collect::<CliResult<_>>()?;
    let jobs: Vec<(usize, f64)> =
        a.n.iter()
            .flat_map(|&n| etas.iter().map(move |&eta| (n, eta)))
            .collect();
    let resolved: Vec<(usize, usize)> = jobs
        .iter()
        .map(|&(n, eta)| {
            let cutoff = a.cutoff.unwrap_or_else(|| default_cutoff(n, eta)).max(n);
            (cutoff, common.trunc.unwrap_or(2 * cutoff).max(2 * n))
        })
        .collect();
    let values = jobs
        .par_iter()
        .zip(&resolved)
        .map(|(&(n, eta), &(cutoff, n_trunc))| {
            let control = FockVector::flat(n_trunc);
            let chi = project_chi(&control, n)?;
            let effect = povm_element(&control, n, eta, cutoff)?;
            Ok((projector_fidelity(&effect, &chi)?, effect.warnings))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    for ((n, eta), (_, warnings)) in jobs.iter().zip(&values) {
        for w in warnings {
            ctx.warn(format!("n = {n}, eta = {eta}: {w}"));
        }
    }
    let mut table = Table::new(
        std::iter::once("eta".to_string()).chain(a.n.iter().map(|n| format!("fidelity_n{n}"))),
    );
    for (k, &eta) in etas.iter().enumerate() {
        let mut row = vec![fmt_f64(eta)];
        row.extend((0..a.n.len()).map(|i| fmt_f64(values[i * etas.len() + k].0)));
        table.push(row);
    }
    ctx.write("povm-fidelity.csv", &table.to_bytes())?;
    let per_job: Vec<Value> = jobs
        .iter()
        .zip(&resolved)
        .map(
            |(&(n, eta), &(cutoff, t))| json!({"n": n, "eta": eta, "cutoff": cutoff, "n_trunc": t}),
        )
        .collect();
    let mut replay = vec!["povm-fidelity".to_string()];
    replay.extend(args(&[("n", fmt_list(&a.n)), ("eta", fmt_list(&etas))]));
    if let Some(c) = a.cutoff {
        replay.extend(args(&[("cutoff", c.to_string())]));
    }
    if let Some(t) = common.trunc {
        replay.extend(args(&[("trunc", t.to_string())]));
    }
    Ok(Outcome {
        parameters: json!({
            "n": a.n,
            "eta": etas,
            "control": "flat",
            "trunc_rule": if common.trunc.is_some() { "max(trunc, 2n)" } else { "2 * cutoff" },
            "resolved": per_job,
        }),
        replay,
        results: json!({}),
    })
}

pub fn wigner(a: &WignerArgs, common: &Common, ctx: &mut Ctx) -> CliResult<Outcome> {
    use crate::spec::StateSpec;
    let n_trunc = common.trunc.unwrap_or(match a.state {
        StateSpec::Cat(b) | StateSpec::Cat4(b) => DEFAULT_TRUNCATION.max(ideal_trunc(b * 1.5)),
        StateSpec::Control(crate::spec::ControlSpec::Coherent(b)) => {
            DEFAULT_TRUNCATION.max(ideal_trunc(b))
        }
        _ => DEFAULT_TRUNCATION,
    });
    let psi = a.state.vector(n_trunc).map_err(usage)?;
    let grid = grid_of(&a.grid, a.state.half_width(n_trunc).map_err(usage)?)?;
    let w = wigner_grid(&State::Pure(psi), &grid)?;
    let stats = write_grid(ctx, "wigner", &w, json!({"state": a.state.to_string()}))?;
    let mut replay = vec!["wigner".to_string()];
    replay.extend(args(&[
        ("state", a.state.to_string()),
        ("trunc", n_trunc.to_string()),
    ]));
    replay.extend(grid_replay(&grid));
    Ok(Outcome {
        parameters: json!({
            "state": a.state.to_string(),
            "n_trunc": n_trunc,
            "grid": grid_json(&grid),
            "convention": WIGNER_CONVENTION,
        }),
        replay,
        results: stats,
    })
}
