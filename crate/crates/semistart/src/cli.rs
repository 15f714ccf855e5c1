//! The `semistart` command line.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use semistart_core::bandwidth::{select_bandwidth, BandwidthOptions};
use semistart_core::regression::{nadaraya_watson, MeanStartKind, RegressionFit};
use semistart_core::starts::{fit_start_with_clip, DEFAULT_CLIP};
use semistart_core::{marron_wand, BandwidthMethod, DensityEstimate, KernelShape, KernelSpec, StartFamily};

use crate::bench;
use crate::io::{self, Precision, Table};
use crate::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "semistart", version, about = "Kernel density estimation with a parametric start")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate a density on a grid: columns x, f_hat [, f_tilde].
    Estimate(EstimateArgs),
    /// Select a bandwidth and print it as JSON.
    Bandwidth(BandwidthArgs),
    /// Difficulty scores of the Marron–Wand test densities.
    BenchAmise(BenchAmiseArgs),
    /// Exact-MISE optima for the Marron–Wand test densities.
    BenchMise(BenchMiseArgs),
    /// Correction-factor curve and Z statistic: columns x, r_hat, log_r, z.
    Gof(GofArgs),
    /// Draw a sample from a normal mixture.
    Sample(SampleArgs),
    /// Generalised Nadaraya–Watson regression: columns x, m_hat, m_classic.
    Regress(RegressArgs),
}

/// `lo,hi,count` with count ≥ 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.hi } else { self.lo + step * i as f64 }).collect()
    }
}

impl std::str::FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [lo, hi, count] = parts[..] else {
            return Err(format!("expected lo,hi,count, got '{s}'"));
        };
        let lo: f64 = lo.parse().map_err(|_| format!("bad grid start '{lo}'"))?;
        let hi: f64 = hi.parse().map_err(|_| format!("bad grid end '{hi}'"))?;
        let count: usize = count.parse().map_err(|_| format!("bad grid count '{count}'"))?;
        if count < 2 {
            return Err(format!("grid count must be at least 2, got {count}"));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(format!("grid needs finite lo < hi, got {lo},{hi}"));
        }
        Ok(GridSpec { lo, hi, count })
    }
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input CSV (first column used; stdin when absent or '-').
    pub input: Option<PathBuf>,
    /// The input CSV starts with a header row.
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file (stdout when absent or '-').
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Significant digits, or 'full'.
    #[arg(long, default_value = "6")]
    pub precision: Precision,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, default_value = "gaussian")]
    pub kernel: KernelShape,
    /// constant, normal, lognormal, gamma, mixture or mixture:K.
    #[arg(long, default_value = "normal")]
    pub start: StartFamily,
    /// Clip threshold of the start in standard units.
    #[arg(long, default_value_t = DEFAULT_CLIP, conflicts_with = "no_clip")]
    pub clip: f64,
    #[arg(long)]
    pub no_clip: bool,
    /// Seed for the EM restarts of a mixture start.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl ModelArgs {
    fn kernel(&self) -> KernelSpec {
        KernelSpec::new(self.kernel)
    }

    fn start(&self, data: &[f64]) -> Result<semistart_core::FittedStart> {
        let family = match (self.start, self.seed) {
            (StartFamily::NormalMixture { k, .. }, Some(seed)) => StartFamily::NormalMixture { k, seed },
            (f, _) => f,
        };
        if !self.no_clip && !(self.clip > 0.0) {
            return Err(CliError::Usage(format!("--clip must be positive, got {}", self.clip)));
        }
        Ok(fit_start_with_clip(family, data, (!self.no_clip).then_some(self.clip))?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SmoothingArgs {
    /// Fixed bandwidth.
    #[arg(long, conflicts_with = "method")]
    pub h: Option<f64>,
    /// Bandwidth selector (default rule_delta).
    #[arg(long)]
    pub method: Option<BandwidthMethod>,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub smoothing: SmoothingArgs,
    /// Evaluation grid; defaults to the data range widened by 3h, 201 points.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    /// Divide by the estimate's integral.
    #[arg(long)]
    pub normalize: bool,
    /// Add the classic kernel estimate as column f_tilde.
    #[arg(long)]
    pub compare: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BandwidthArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "rule_delta")]
    pub method: BandwidthMethod,
    /// Known roughness for the amise_oracle method.
    #[arg(long)]
    pub oracle_roughness: Option<f64>,
    /// Pilot bandwidth for the plug-in.
    #[arg(long)]
    pub pilot: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub iterations: usize,
    /// Bandwidth grid for bcv and ucv.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    /// Log-spaced rather than evenly spaced grid.
    #[arg(long)]
    pub log_grid: bool,
    /// Output file (stdout when absent or '-').
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchAmiseArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15")]
    pub cases: Vec<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BenchMiseArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8,9,10,11,12,13,14,15")]
    pub cases: Vec<usize>,
    #[arg(long = "n", value_delimiter = ',', default_value = "25,100,1000")]
    pub ns: Vec<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GofArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub smoothing: SmoothingArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["mixture", "case"]))]
pub struct SampleArgs {
    /// Mixture JSON: {"components":[{"p":…,"mu":…,"sd":…},…]}.
    #[arg(long)]
    pub mixture: Option<PathBuf>,
    /// Marron–Wand test density 1..=15.
    #[arg(long)]
    pub case: Option<usize>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write an "x" header row.
    #[arg(long)]
    pub header: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RegressArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "gaussian")]
    pub kernel: KernelShape,
    #[arg(long)]
    pub h: f64,
    #[arg(long, default_value = "linear")]
    pub mean_start: MeanStartKind,
    /// Evaluation grid; defaults to the covariate range, 101 points.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code: 0 on success, 2 on usage errors, 1 on anything else.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Estimate(a) => estimate(a),
        Command::Bandwidth(a) => bandwidth(a),
        Command::BenchAmise(a) => {
            let table = bench::amise_table(&bench::amise_rows(&a.cases)?);
            write_table(&table, &a.output)
        }
        Command::BenchMise(a) => {
            let table = bench::mise_table(&bench::mise_rows(&a.cases, &a.ns)?);
            write_table(&table, &a.output)
        }
        Command::Gof(a) => gof(a),
        Command::Sample(a) => sample(a),
        Command::Regress(a) => regress(a),
    }
}

fn write_table(table: &Table, output: &OutputArgs) -> Result<()> {
    io::with_output(output.out.as_deref(), |w| table.write(w, true, output.precision))
}

fn check_h(h: f64) -> Result<f64> {
    if h > 0.0 && h.is_finite() {
        Ok(h)
    } else {
        Err(CliError::Usage(format!("--h must be positive, got {h}")))
    }
}

fn fitted(input: &InputArgs, model: &ModelArgs, smoothing: &SmoothingArgs) -> Result<DensityEstimateParts> {
    let data = io::read_data(input.input.as_deref(), input.header)?;
    let kernel = model.kernel();
    let start = model.start(&data)?;
    let h = match smoothing.h {
        Some(h) => check_h(h)?,
        None => {
            let method = smoothing.method.unwrap_or(BandwidthMethod::RuleDelta);
            select_bandwidth(&data, method, &start, &kernel, &BandwidthOptions::default())?.h
        }
    };
    Ok(DensityEstimateParts { data, kernel, start, h })
}

struct DensityEstimateParts {
    data: Vec<f64>,
    kernel: KernelSpec,
    start: semistart_core::FittedStart,
    h: f64,
}

fn default_grid(data: &[f64], pad: f64, count: usize) -> Vec<f64> {
    let lo = data.iter().copied().fold(f64::INFINITY, f64::min) - pad;
    let hi = data.iter().copied().fold(f64::NEG_INFINITY, f64::max) + pad;
    if !(hi > lo) {
        return vec![lo];
    }
    GridSpec { lo, hi, count }.points()
}

fn estimate(a: EstimateArgs) -> Result<()> {
    let p = fitted(&a.input, &a.model, &a.smoothing)?;
    let grid = a.grid.map(|g| g.points()).unwrap_or_else(|| default_grid(&p.data, 3.0 * p.h, 201));
    let classic = if a.compare { Some(DensityEstimate::kernel_only(p.data.clone(), p.kernel, p.h)?) } else { None };
    let e = DensityEstimate::new(p.data, p.kernel, p.h, p.start, a.normalize)?;
    let mut table = Table::new(if a.compare { &["x", "f_hat", "f_tilde"] } else { &["x", "f_hat"] });
    for &x in &grid {
        let mut row = vec![Some(x), Some(e.eval(x))];
        if let Some(c) = &classic {
            row.push(Some(c.eval(x)));
        }
        table.push(row);
    }
    write_table(&table, &a.output)
}

fn bandwidth(a: BandwidthArgs) -> Result<()> {
    let data = io::read_data(a.input.input.as_deref(), a.input.header)?;
    let kernel = a.model.kernel();
    let start = a.model.start(&data)?;
    if a.log_grid && a.grid.is_some_and(|g| !(g.lo > 0.0)) {
        return Err(CliError::Usage("--log-grid needs a positive grid start".into()));
    }
    let grid = a.grid.map(|g| {
        if a.log_grid {
            let (l0, l1) = (g.lo.ln(), g.hi.ln());
            GridSpec { lo: l0, hi: l1, count: g.count }.points().into_iter().map(f64::exp).collect()
        } else {
            g.points()
        }
    });
    let opts = BandwidthOptions {
        oracle_roughness: a.oracle_roughness,
        pilot: a.pilot,
        plugin_iterations: a.iterations,
        grid,
    };
    if a.method == BandwidthMethod::AmiseOracle && opts.oracle_roughness.is_none() {
        return Err(CliError::Usage("amise_oracle needs --oracle-roughness".into()));
    }
    let choice = select_bandwidth(&data, a.method, &start, &kernel, &opts)?;
    io::with_output(a.out.as_deref(), |w| {
        serde_json::to_writer_pretty(&mut *w, &choice)?;
        writeln!(w)?;
        Ok(())
    })
}

fn gof(a: GofArgs) -> Result<()> {
    let p = fitted(&a.input, &a.model, &a.smoothing)?;
    let grid = a.grid.map(|g| g.points()).unwrap_or_else(|| default_grid(&p.data, 0.0, 201));
    let e = DensityEstimate::new(p.data, p.kernel, p.h, p.start, false)?;
    let curve = e.correction_curve(&grid)?;
    let mut table = Table::new(&["x", "r_hat", "log_r", "z"]);
    for i in 0..curve.grid.len() {
        table.push(vec![Some(curve.grid[i]), Some(curve.r_hat[i]), curve.log_r[i], curve.z[i]]);
    }
    write_table(&table, &a.output)
}

fn sample(a: SampleArgs) -> Result<()> {
    let mixture = match (&a.mixture, a.case) {
        (Some(path), _) => io::read_mixture(path)?,
        (None, Some(case)) => marron_wand(case)?,
        (None, None) => unreachable!("clap requires one source"),
    };
    let data = mixture.sample(a.n, a.seed)?;
    let mut table = Table::new(&["x"]);
    for x in data {
        table.push(vec![Some(x)]);
    }
    io::with_output(a.output.out.as_deref(), |w| table.write(w, a.header, a.output.precision))
}

fn regress(a: RegressArgs) -> Result<()> {
    let (x, y) = io::read_pairs(a.input.input.as_deref(), a.input.header)?;
    let h = check_h(a.h)?;
    let kernel = KernelSpec::new(a.kernel);
    let grid = a.grid.map(|g| g.points()).unwrap_or_else(|| default_grid(&x, 0.0, 101));
    let fit = RegressionFit::new(x.clone(), y.clone(), kernel, h, a.mean_start)?;
    let mut table = Table::new(&["x", "m_hat", "m_classic"]);
    for &at in &grid {
        // points without kernel mass are left empty
        let m = fit.eval(at).ok();
        let c = nadaraya_watson(&x, &y, &kernel, h, at).ok();
        table.push(vec![Some(at), m, c]);
    }
    write_table(&table, &a.output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn grid_spec_parses() {
        let g: GridSpec = "-1,1,3".parse().unwrap();
        assert_eq!(g.points(), vec![-1.0, 0.0, 1.0]);
        assert!("0,1,1".parse::<GridSpec>().is_err());
        assert!("1,0,5".parse::<GridSpec>().is_err());
        assert!("0,1".parse::<GridSpec>().is_err());
    }

    #[test]
    fn h_and_method_are_exclusive() {
        let r = Cli::try_parse_from(["semistart", "estimate", "--h", "1", "--method", "bcv"]);
        assert_eq!(r.unwrap_err().exit_code(), 2);
    }
}
