//! Experiment runner behind the `gpcond` binary: parse a flat key-value
//! config, execute a condition / refine / contract / sample workflow, and
//! write CSV reports.
//!
//! Config format: one `key = value` per line, `#` starts a comment, lists are
//! comma-separated. Unknown keys, duplicate keys, type mismatches, and
//! constraint violations are reported with their line number.
//!
//! CSV layouts (all real values with 17 significant digits, so they re-parse
//! to the identical binary value):
//!
//! * `condition` / `sample` report: `t[,…], posterior_mean, posterior_var`
//! * `refine` / `contract` report:
//!   `n, sup_mean_delta, trace_cov_delta, posterior_trace, char_delta_max, sup_mean_err_vs_truth`
//!   (delta cells are empty on the first level, the truth column is empty
//!   unless a truth path exists)
//! * `paths.csv`: header row of grid coordinates, one row per sample

use std::fs;
use std::path::{Path, PathBuf};

use crate::conditioning::{condition_with_tol, ObservationSet};
use crate::domain::{Domain, Point};
use crate::error::{GpError, Result};
use crate::kernels::{GpPrior, Kernel, MeanFunction, ObservationFunctional};
use crate::linalg::DEFAULT_PINV_TOL;
use crate::refinement::{
    contraction_experiment, refine_and_monitor, CharProbe, ConvergenceReport, PathObservable,
    RefineOptions, RefinementSchedule,
};
use crate::sampling::{sample_paths, GaussianModel, PathSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Condition,
    Refine,
    Contract,
    Sample,
}

/// Which observable the `refine` command conditions on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableSpec {
    /// `g ≡ m`: the posterior mean stays at the prior mean.
    PriorMean,
    /// A path sampled from the prior, tabulated over the region.
    SampledFromPrior,
    /// `g(t) = sin(2π t₁)`.
    Sine,
}

/// A fully parsed and validated experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub command: Command,
    pub kernel: Kernel,
    pub mean: f64,
    pub domain: Domain,
    pub region: Domain,
    pub observations: Vec<(ObservationFunctional, f64)>,
    pub schedule: Option<RefinementSchedule>,
    pub test_grid_size: usize,
    pub noise_variance: f64,
    pub pinv_tol: f64,
    pub mean_tol: f64,
    pub cov_tol: f64,
    pub seed: u64,
    pub samples: usize,
    pub observable: ObservableSpec,
    pub output: PathBuf,
}

fn config_err(line: usize, message: impl Into<String>) -> GpError {
    GpError::Config {
        line,
        message: message.into(),
    }
}

struct RawEntry {
    value: String,
    line: usize,
}

struct RawConfig {
    entries: Vec<(String, RawEntry)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(String, RawEntry)> = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            };
            if content.trim().is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| {
                config_err(line, format!("expected `key = value`, got `{}`", content.trim()))
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(config_err(line, "empty key"));
            }
            if entries.iter().any(|(k, _)| *k == key) {
                return Err(config_err(line, format!("duplicate key `{key}`")));
            }
            entries.push((key, RawEntry { value, line }));
        }
        Ok(RawConfig { entries })
    }

    fn take(&mut self, key: &str) -> Option<RawEntry> {
        let pos = self.entries.iter().position(|(k, _)| k == key)?;
        Some(self.entries.remove(pos).1)
    }

    fn finish(self) -> Result<()> {
        match self.entries.first() {
            Some((key, entry)) => Err(config_err(entry.line, format!("unknown key `{key}`"))),
            None => Ok(()),
        }
    }
}

fn parse_f64(entry: &RawEntry, key: &str) -> Result<f64> {
    entry.value.parse::<f64>().map_err(|_| {
        config_err(
            entry.line,
            format!("key `{key}` expects a number, got `{}`", entry.value),
        )
    })
}

fn parse_usize(entry: &RawEntry, key: &str) -> Result<usize> {
    entry.value.parse::<usize>().map_err(|_| {
        config_err(
            entry.line,
            format!("key `{key}` expects a non-negative integer, got `{}`", entry.value),
        )
    })
}

fn parse_u64(entry: &RawEntry, key: &str) -> Result<u64> {
    entry.value.parse::<u64>().map_err(|_| {
        config_err(
            entry.line,
            format!("key `{key}` expects a non-negative integer, got `{}`", entry.value),
        )
    })
}

fn parse_f64_list(entry: &RawEntry, key: &str) -> Result<Vec<f64>> {
    entry
        .value
        .split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|_| {
                config_err(
                    entry.line,
                    format!("key `{key}` expects comma-separated numbers, got `{}`", s.trim()),
                )
            })
        })
        .collect()
}

fn parse_bounds(entry: &RawEntry, key: &str) -> Result<Domain> {
    let values = parse_f64_list(entry, key)?;
    if values.is_empty() || values.len() % 2 != 0 {
        return Err(config_err(
            entry.line,
            format!("key `{key}` expects pairs `lo,hi[,lo,hi,…]`, got {} numbers", values.len()),
        ));
    }
    let bounds = values.chunks(2).map(|c| (c[0], c[1])).collect();
    Domain::new(bounds).map_err(|e| config_err(entry.line, format!("key `{key}`: {e}")))
}

/// One observation entry: `x[ y …]:value`, or `d:x:value` for a derivative
/// observation.
fn parse_observation(text: &str, line: usize) -> Result<(ObservationFunctional, f64)> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let (deriv, coords_text, value_text) = match parts.as_slice() {
        [coords, value] => (false, *coords, *value),
        ["d", coords, value] => (true, *coords, *value),
        _ => {
            return Err(config_err(
                line,
                format!("observation `{text}` must look like `x:value` or `d:x:value`"),
            ))
        }
    };
    let coords: Vec<f64> = coords_text
        .split_whitespace()
        .map(|c| {
            c.parse::<f64>()
                .map_err(|_| config_err(line, format!("bad observation coordinate `{c}`")))
        })
        .collect::<Result<_>>()?;
    if coords.is_empty() {
        return Err(config_err(line, format!("observation `{text}` has no coordinates")));
    }
    let value = value_text
        .parse::<f64>()
        .map_err(|_| config_err(line, format!("bad observation value `{value_text}`")))?;
    let point = Point::new(coords);
    let functional = if deriv {
        ObservationFunctional::DerivEval(point)
    } else {
        ObservationFunctional::PointEval(point)
    };
    Ok((functional, value))
}

/// Parse and validate a config file's text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut raw = RawConfig::parse(text)?;

    let command_entry = raw
        .take("command")
        .ok_or_else(|| GpError::InvalidArgument("missing required key `command`".into()))?;
    let command = match command_entry.value.as_str() {
        "condition" => Command::Condition,
        "refine" => Command::Refine,
        "contract" => Command::Contract,
        "sample" => Command::Sample,
        other => {
            return Err(config_err(
                command_entry.line,
                format!("unknown command `{other}` (expected condition|refine|contract|sample)"),
            ))
        }
    };

    let kernel_entry = raw
        .take("kernel")
        .ok_or_else(|| GpError::InvalidArgument("missing required key `kernel`".into()))?;
    let lengthscale = raw.take("lengthscale");
    let variance = raw.take("variance");
    let kernel = {
        let var = match &variance {
            Some(e) => parse_f64(e, "variance")?,
            None => 1.0,
        };
        let ls = |name: &str| -> Result<f64> {
            match &lengthscale {
                Some(e) => parse_f64(e, "lengthscale"),
                None => Err(config_err(
                    kernel_entry.line,
                    format!("kernel `{name}` requires the `lengthscale` key"),
                )),
            }
        };
        let built = match kernel_entry.value.as_str() {
            "brownian" => {
                if let Some(e) = &lengthscale {
                    return Err(config_err(e.line, "`lengthscale` does not apply to the brownian kernel"));
                }
                if let Some(e) = &variance {
                    return Err(config_err(e.line, "`variance` does not apply to the brownian kernel"));
                }
                Ok(Kernel::brownian())
            }
            "rbf" => Kernel::rbf(ls("rbf")?, var),
            "matern12" => Kernel::matern12(ls("matern12")?, var),
            "matern32" => Kernel::matern32(ls("matern32")?, var),
            "matern52" => Kernel::matern52(ls("matern52")?, var),
            "linear" => {
                if let Some(e) = &lengthscale {
                    return Err(config_err(e.line, "`lengthscale` does not apply to the linear kernel"));
                }
                Kernel::linear(var)
            }
            other => {
                return Err(config_err(kernel_entry.line, format!("unknown kernel `{other}`")))
            }
        };
        built.map_err(|e| config_err(kernel_entry.line, e.to_string()))?
    };

    let mean = match raw.take("mean") {
        Some(e) => parse_f64(&e, "mean")?,
        None => 0.0,
    };

    let domain_entry = raw
        .take("domain")
        .ok_or_else(|| GpError::InvalidArgument("missing required key `domain`".into()))?;
    let domain = parse_bounds(&domain_entry, "domain")?;

    let region = match raw.take("region") {
        Some(e) => {
            let region = parse_bounds(&e, "region")?;
            if !domain.contains_domain(&region) {
                return Err(config_err(e.line, "`region` must lie within `domain`"));
            }
            region
        }
        None => domain.clone(),
    };

    let mut observations = Vec::new();
    if let Some(e) = raw.take("observations") {
        if !e.value.is_empty() {
            for part in e.value.split(',') {
                observations.push(parse_observation(part, e.line)?);
            }
        }
    }
    let observations_file = raw.take("observations_file");
    if let Some(e) = &observations_file {
        let text = fs::read_to_string(&e.value).map_err(|io| {
            config_err(e.line, format!("cannot read observations file `{}`: {io}", e.value))
        })?;
        for (idx, line) in text.lines().enumerate() {
            let content = match line.find('#') {
                Some(pos) => &line[..pos],
                None => line,
            };
            if content.trim().is_empty() {
                continue;
            }
            observations.push(parse_observation(content.trim(), idx + 1)?);
        }
    }
    for (f, _) in &observations {
        let point = match f {
            ObservationFunctional::PointEval(p) | ObservationFunctional::DerivEval(p) => p,
            ObservationFunctional::WeightedSum(_) => unreachable!("not produced by the parser"),
        };
        if !domain.contains(point) {
            return Err(GpError::InvalidArgument(format!(
                "observation point {:?} lies outside the domain",
                point.coords()
            )));
        }
    }
    if command == Command::Condition && observations.is_empty() && observations_file.is_none() {
        return Err(GpError::InvalidArgument(
            "command `condition` requires the `observations` or `observations_file` key".into(),
        ));
    }

    let schedule = match raw.take("schedule") {
        Some(e) => {
            let sizes: Vec<usize> = e
                .value
                .split(',')
                .map(|s| {
                    s.trim().parse::<usize>().map_err(|_| {
                        config_err(e.line, format!("key `schedule` expects integers, got `{}`", s.trim()))
                    })
                })
                .collect::<Result<_>>()?;
            Some(RefinementSchedule::new(sizes).map_err(|err| config_err(e.line, err.to_string()))?)
        }
        None => None,
    };
    if matches!(command, Command::Refine | Command::Contract) && schedule.is_none() {
        return Err(GpError::InvalidArgument(format!(
            "command `{}` requires the `schedule` key",
            if command == Command::Refine { "refine" } else { "contract" }
        )));
    }

    let test_grid_size = match raw.take("test_grid_size") {
        Some(e) => {
            let v = parse_usize(&e, "test_grid_size")?;
            if v < 2 {
                return Err(config_err(e.line, "`test_grid_size` must be at least 2"));
            }
            v
        }
        None => 257,
    };

    let noise_variance = match raw.take("noise_variance") {
        Some(e) => {
            let v = parse_f64(&e, "noise_variance")?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(config_err(e.line, "`noise_variance` must be >= 0"));
            }
            v
        }
        None => 0.0,
    };

    let pinv_tol = match raw.take("pinv_tol") {
        Some(e) => {
            let v = parse_f64(&e, "pinv_tol")?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(config_err(e.line, "`pinv_tol` must be >= 0"));
            }
            v
        }
        None => DEFAULT_PINV_TOL,
    };

    let mean_tol = match raw.take("mean_tol") {
        Some(e) => parse_f64(&e, "mean_tol")?,
        None => 1e-6,
    };
    let cov_tol = match raw.take("cov_tol") {
        Some(e) => parse_f64(&e, "cov_tol")?,
        None => 1e-6,
    };

    let seed = match raw.take("seed") {
        Some(e) => parse_u64(&e, "seed")?,
        None => 0,
    };

    let samples = match raw.take("samples") {
        Some(e) => {
            let v = parse_usize(&e, "samples")?;
            if v == 0 {
                return Err(config_err(e.line, "`samples` must be >= 1"));
            }
            v
        }
        None => 10,
    };

    let observable = match raw.take("observable") {
        Some(e) => match e.value.as_str() {
            "mean" => ObservableSpec::PriorMean,
            "sample" => ObservableSpec::SampledFromPrior,
            "sine" => ObservableSpec::Sine,
            other => {
                return Err(config_err(
                    e.line,
                    format!("unknown observable `{other}` (expected mean|sample|sine)"),
                ))
            }
        },
        None => ObservableSpec::PriorMean,
    };

    let output = match raw.take("output") {
        Some(e) => PathBuf::from(e.value),
        None => PathBuf::from("."),
    };

    raw.finish()?;

    Ok(ExperimentConfig {
        command,
        kernel,
        mean,
        domain,
        region,
        observations,
        schedule,
        test_grid_size,
        noise_variance,
        pinv_tol,
        mean_tol,
        cov_tol,
        seed,
        samples,
        observable,
        output,
    })
}

/// Format with 17 significant digits; parsing the text recovers the exact
/// binary value.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn point_header(dim: usize) -> String {
    if dim == 1 {
        "t".to_string()
    } else {
        (1..=dim).map(|i| format!("t{i}")).collect::<Vec<_>>().join(",")
    }
}

fn point_cells(p: &Point) -> String {
    p.coords().iter().map(|&c| fmt_f64(c)).collect::<Vec<_>>().join(",")
}

/// Render a mean/variance table over a grid (the `condition`/`sample` report).
pub fn moments_csv<M: GaussianModel>(model: &M, grid: &[Point]) -> String {
    let mut out = String::new();
    out.push_str(&point_header(grid.first().map_or(1, Point::dim)));
    out.push_str(",posterior_mean,posterior_var\n");
    let gram = model.gram_on(grid);
    for (i, t) in grid.iter().enumerate() {
        out.push_str(&point_cells(t));
        out.push(',');
        out.push_str(&fmt_f64(model.mean_at(t)));
        out.push(',');
        out.push_str(&fmt_f64(gram.get(i, i)));
        out.push('\n');
    }
    out
}

/// Render a convergence report as CSV.
pub fn report_csv(report: &ConvergenceReport) -> String {
    let mut out = String::from(
        "n,sup_mean_delta,trace_cov_delta,posterior_trace,char_delta_max,sup_mean_err_vs_truth\n",
    );
    for level in &report.levels {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            level.n,
            opt(level.sup_mean_delta),
            opt(level.trace_cov_delta),
            fmt_f64(level.posterior_trace),
            opt(level.max_char_delta()),
            opt(level.sup_mean_err_vs_truth),
        ));
    }
    out
}

/// Render sampled paths as CSV: header row of grid coordinates, one row per
/// sample. Multi-dimensional grid points join their coordinates with spaces
/// inside one cell.
pub fn paths_csv(sample: &PathSample) -> String {
    let mut out = String::new();
    let header: Vec<String> = sample
        .grid()
        .iter()
        .map(|p| {
            p.coords()
                .iter()
                .map(|&c| fmt_f64(c))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in sample.values() {
        let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Flag overrides applied on top of a parsed config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub pinv_tol: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Files written by a run, with the exit code the process should return:
/// 0 on success, 2 when a refine/contract run finished without meeting its
/// tolerances (the report is still written).
#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub files: Vec<PathBuf>,
}

/// Read, parse, and run a config file.
pub fn run_file(path: &Path, overrides: &Overrides) -> Result<RunOutcome> {
    let text = fs::read_to_string(path)?;
    let mut config = parse_config(&text)?;
    if let Some(tol) = overrides.pinv_tol {
        config.pinv_tol = tol;
    }
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(out) = &overrides.out {
        config.output = out.clone();
    }
    run(&config)
}

/// Execute a validated experiment.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    let mean = if config.mean == 0.0 {
        MeanFunction::Zero
    } else {
        MeanFunction::Constant(config.mean)
    };
    let prior = GpPrior::new(config.domain.clone(), mean, config.kernel.clone())?;
    fs::create_dir_all(&config.output)?;
    let report_path = config.output.join("report.csv");

    match config.command {
        Command::Condition => {
            let (functionals, values): (Vec<_>, Vec<_>) =
                config.observations.iter().cloned().unzip();
            let obs = ObservationSet::new(functionals, values, config.noise_variance)?;
            let post = condition_with_tol(&prior, &obs, config.pinv_tol)?;
            let grid = config.domain.uniform_grid(config.test_grid_size);
            fs::write(&report_path, moments_csv(&post, &grid))?;
            eprintln!(
                "conditioned on {} observations; wrote {}",
                obs.len(),
                report_path.display()
            );
            Ok(RunOutcome {
                exit_code: 0,
                files: vec![report_path],
            })
        }
        Command::Refine => {
            let schedule = config.schedule.as_ref().expect("validated at parse time");
            let options = RefineOptions {
                noise_variance: config.noise_variance,
                mean_tol: config.mean_tol,
                cov_tol: config.cov_tol,
                pinv_tol: config.pinv_tol,
                snap_grid: None,
            };
            let g = match config.observable {
                ObservableSpec::PriorMean => {
                    let m = prior.mean().clone();
                    PathObservable::analytic(move |t| m.eval(t))
                }
                ObservableSpec::Sine => {
                    PathObservable::analytic(|t| (2.0 * std::f64::consts::PI * t.coords()[0]).sin())
                }
                ObservableSpec::SampledFromPrior => {
                    if config.region.dim() != 1 {
                        return Err(GpError::InvalidArgument(
                            "observable `sample` tabulates a path on a 1-D region".into(),
                        ));
                    }
                    let tab_grid = config.region.uniform_grid(config.test_grid_size);
                    let sample = sample_paths(&prior, &tab_grid, 1, config.seed)?;
                    PathObservable::sampled(
                        tab_grid.iter().map(Point::x).collect(),
                        sample.values()[0].clone(),
                    )?
                }
            };
            let test_grid = config.domain.uniform_grid(config.test_grid_size);
            let probes = CharProbe::default_family(&config.domain);
            let report = refine_and_monitor(
                &prior,
                &config.region,
                &g,
                schedule,
                &test_grid,
                &probes,
                &options,
            )?;
            fs::write(&report_path, report_csv(&report))?;
            let exit_code = if report.converged { 0 } else { 2 };
            eprintln!(
                "refined through {:?}; converged = {}, diverging = {}; wrote {}",
                schedule.sizes(),
                report.converged,
                report.diverging,
                report_path.display()
            );
            Ok(RunOutcome {
                exit_code,
                files: vec![report_path],
            })
        }
        Command::Contract => {
            let schedule = config.schedule.as_ref().expect("validated at parse time");
            let options = RefineOptions {
                noise_variance: config.noise_variance,
                mean_tol: config.mean_tol,
                cov_tol: config.cov_tol,
                pinv_tol: config.pinv_tol,
                snap_grid: None,
            };
            let fine_grid = config.domain.uniform_grid(config.test_grid_size);
            let report =
                contraction_experiment(&prior, config.seed, schedule, &fine_grid, &options)?;
            fs::write(&report_path, report_csv(&report))?;
            let exit_code = if report.converged { 0 } else { 2 };
            eprintln!(
                "contraction through {:?}; converged = {}; final sup error vs truth = {:?}; wrote {}",
                schedule.sizes(),
                report.converged,
                report.final_level().sup_mean_err_vs_truth,
                report_path.display()
            );
            Ok(RunOutcome {
                exit_code,
                files: vec![report_path],
            })
        }
        Command::Sample => {
            let grid = config.domain.uniform_grid(config.test_grid_size);
            let paths_path = config.output.join("paths.csv");
            let (report_text, paths_text) = if config.observations.is_empty() {
                let sample = sample_paths(&prior, &grid, config.samples, config.seed)?;
                (moments_csv(&prior, &grid), paths_csv(&sample))
            } else {
                let (functionals, values): (Vec<_>, Vec<_>) =
                    config.observations.iter().cloned().unzip();
                let obs = ObservationSet::new(functionals, values, config.noise_variance)?;
                let post = condition_with_tol(&prior, &obs, config.pinv_tol)?;
                let sample = sample_paths(&post, &grid, config.samples, config.seed)?;
                (moments_csv(&post, &grid), paths_csv(&sample))
            };
            fs::write(&report_path, report_text)?;
            fs::write(&paths_path, paths_text)?;
            eprintln!(
                "sampled {} paths on {} grid points; wrote {} and {}",
                config.samples,
                grid.len(),
                report_path.display(),
                paths_path.display()
            );
            Ok(RunOutcome {
                exit_code: 0,
                files: vec![report_path, paths_path],
            })
        }
    }
}
