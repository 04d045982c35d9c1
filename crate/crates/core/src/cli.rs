//! `zollcut` command line: flag/config parsing and experiment dispatch.
//!
//! Settings resolve as flags, then an optional `key=value` config file,
//! then built-in defaults (the oscillator splitting run: `N = 100`,
//! `w = −0.25 − 0.6i`, `t ∈ {0, 0.25, 0.5}`).

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::bargmann::{coherent_state, husimi, GridSpec, SimulationScale};
use crate::cutops::MatrixEntries;
use crate::error::{Error, Result};
use crate::experiments::{self, cut_q, ExperimentReport, Observable, SpectralFunction};
use crate::spectral::Propagator;

pub const THREADS_ENV: &str = "ZOLLCUT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "zollcut", version, about = "Cut observables and coherent-state propagation in Bargmann space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Subcmd {
    Husimi,
    Propagate,
    Szego,
    Egorov,
    Commutator,
    EdgeSymbol,
    Reversibility,
    Figure2,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Husimi density of the projected coherent state
    Husimi(Flags),
    /// Propagate the projected coherent state under exp(-itN ΠQ̂Π)
    Propagate(Flags),
    /// Trace of f(ΠQ̂Π) against the phase-space integral
    Szego(Flags),
    /// Expectation of an observable along a P-commuting flow vs the classical flow
    Egorov(Flags),
    /// Support and size of [Π_N, Q̂]
    Commutator(Flags),
    /// Corner of ΠQ̂Π (and of its square) against the fiber Toeplitz model
    EdgeSymbol(Flags),
    /// Norm preservation and forward-then-backward recovery
    Reversibility(Flags),
    /// Husimi grids of the splitting run at t = 0, 0.25, 0.5
    Figure2(Flags),
}

#[derive(Debug, Clone, Default, Args)]
struct Flags {
    /// Semiclassical parameter, hbar = 1/N [default: 100]
    #[arg(long = "N", value_name = "N")]
    n: Option<u32>,
    /// Energy cutoff of the disk {(x²+p²)/2 ≤ E} [default: 1]
    #[arg(long = "E", value_name = "E", allow_hyphen_values = true)]
    e: Option<f64>,
    /// Real part of the coherent-state center z = (x − ip)/√2 [default: -0.25]
    #[arg(long = "w-re", value_name = "RE", allow_hyphen_values = true)]
    w_re: Option<f64>,
    /// Imaginary part of the coherent-state center [default: -0.6]
    #[arg(long = "w-im", value_name = "IM", allow_hyphen_values = true)]
    w_im: Option<f64>,
    /// Time; repeatable [default: 0, 0.25, 0.5; egorov: 0, π/4, π/2, 3π/4, π; reversibility: 0.5]
    #[arg(long = "t", value_name = "T", allow_hyphen_values = true)]
    t: Vec<f64>,
    /// Husimi grid nx:np:xmin:xmax:pmin:pmax [default: 200:200:-2:2:-2:2]
    #[arg(long, value_name = "SPEC")]
    grid: Option<GridSpec>,
    /// Spectral function: id, square, quartic, cos [default: square]
    #[arg(long = "f", value_name = "F")]
    f: Option<SpectralFunction>,
    /// Comma-separated N values for a Szegő convergence series [default: none]
    #[arg(long, value_name = "N,N,...")]
    series: Option<String>,
    /// Corner size for edge-symbol checks [default: 6]
    #[arg(long = "K", value_name = "K")]
    k: Option<usize>,
    /// Observable for egorov: p or q [default: q]
    #[arg(long, value_name = "OBS")]
    observable: Option<Observable>,
    /// Generator for egorov; must commute with P [default: p]
    #[arg(long, value_name = "GEN")]
    generator: Option<Observable>,
    /// Normalize propagated states before sampling Husimi grids [default: off]
    #[arg(long)]
    renormalize: bool,
    /// Also write ΠQ̂Π (and the commutator, if computed) as i,j,value CSV [default: off]
    #[arg(long)]
    dump_matrix: bool,
    /// Output directory [default: out]
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// key=value config file; flags take precedence [default: none]
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcmd,
    pub n: u32,
    pub energy: f64,
    pub w: Complex64,
    pub times: Vec<f64>,
    pub grid: GridSpec,
    pub f: SpectralFunction,
    pub series: Vec<u32>,
    pub corner: usize,
    pub observable: Observable,
    pub generator: Observable,
    pub renormalize: bool,
    pub dump_matrix: bool,
    pub out: PathBuf,
}

fn default_times(sub: Subcmd) -> Vec<f64> {
    match sub {
        Subcmd::Egorov => (0..=4).map(|k| k as f64 * PI / 4.0).collect(),
        Subcmd::Reversibility => vec![0.5],
        _ => vec![0.0, 0.25, 0.5],
    }
}

/// Parses a `key=value` config file; blank lines and `#` comments are ignored.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got {raw:?}", lineno + 1)))?;
        out.insert(k.trim().to_owned(), v.trim().to_owned());
    }
    Ok(out)
}

fn parse_list<T: std::str::FromStr>(key: &str, v: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<T>().map_err(|e| Error::Config(format!("{key}: {e}"))))
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| Error::Config(format!("{key}={v:?}: {e}")))
}

fn apply_config(flags: &mut Flags, cfg: &BTreeMap<String, String>) -> Result<()> {
    for (k, v) in cfg {
        match k.as_str() {
            "N" => flags.n = flags.n.or(Some(parse_one(k, v)?)),
            "E" => flags.e = flags.e.or(Some(parse_one(k, v)?)),
            "w_re" | "w-re" => flags.w_re = flags.w_re.or(Some(parse_one(k, v)?)),
            "w_im" | "w-im" => flags.w_im = flags.w_im.or(Some(parse_one(k, v)?)),
            "t" => {
                if flags.t.is_empty() {
                    flags.t = parse_list(k, v)?;
                }
            }
            "grid" => flags.grid = flags.grid.or(Some(parse_one(k, v)?)),
            "f" => flags.f = flags.f.or(Some(parse_one(k, v)?)),
            "series" => flags.series = flags.series.clone().or(Some(v.clone())),
            "K" => flags.k = flags.k.or(Some(parse_one(k, v)?)),
            "observable" => flags.observable = flags.observable.or(Some(parse_one(k, v)?)),
            "generator" => flags.generator = flags.generator.or(Some(parse_one(k, v)?)),
            "renormalize" => flags.renormalize |= parse_one::<bool>(k, v)?,
            "dump_matrix" | "dump-matrix" => flags.dump_matrix |= parse_one::<bool>(k, v)?,
            "out" => flags.out = flags.out.clone().or(Some(PathBuf::from(v))),
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
    }
    Ok(())
}

fn resolve(sub: Subcmd, mut flags: Flags) -> Result<RunConfig> {
    if let Some(path) = flags.config.clone() {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        apply_config(&mut flags, &parse_config_file(&text)?)?;
    }
    let cfg = RunConfig {
        subcommand: sub,
        n: flags.n.unwrap_or(100),
        energy: flags.e.unwrap_or(1.0),
        w: Complex64::new(flags.w_re.unwrap_or(-0.25), flags.w_im.unwrap_or(-0.6)),
        times: if flags.t.is_empty() { default_times(sub) } else { flags.t },
        grid: flags.grid.unwrap_or_default(),
        f: flags.f.unwrap_or(SpectralFunction::Square),
        series: match flags.series {
            Some(s) => parse_list("series", &s)?,
            None => Vec::new(),
        },
        corner: flags.k.unwrap_or(6),
        observable: flags.observable.unwrap_or(Observable::Q),
        generator: flags.generator.unwrap_or(Observable::P),
        renormalize: flags.renormalize,
        dump_matrix: flags.dump_matrix,
        out: flags.out.unwrap_or_else(|| PathBuf::from("out")),
    };
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("N must be at least 1".into()));
        }
        if !(self.energy.is_finite() && self.energy > 0.0) {
            return Err(Error::Config(format!("E must be positive, got {}", self.energy)));
        }
        if !(self.w.re.is_finite() && self.w.im.is_finite()) {
            return Err(Error::Config("w must be finite".into()));
        }
        if self.times.iter().any(|t| !t.is_finite()) {
            return Err(Error::Config("times must be finite".into()));
        }
        if self.corner == 0 {
            return Err(Error::Config("K must be at least 1".into()));
        }
        self.grid.validate().map_err(|e| Error::Config(e.to_string()))
    }

    fn ensure_output_dir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.out)
            .map_err(|e| Error::Config(format!("output dir {}: {e}", self.out.display())))?;
        let probe = self.out.join(".zollcut-write-probe");
        std::fs::write(&probe, b"")
            .map_err(|e| Error::Config(format!("output dir {} not writable: {e}", self.out.display())))?;
        let _ = std::fs::remove_file(probe);
        Ok(())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn time_tag(t: f64) -> String {
    format!("{t:.3}")
}

fn write_report(dir: &Path, r: &ExperimentReport, stem: &str) -> Result<()> {
    std::fs::write(dir.join(format!("{stem}_report.json")), r.to_json()?)?;
    Ok(())
}

fn projected_state(cfg: &RunConfig) -> Result<crate::bargmann::BargmannState> {
    let scale = SimulationScale::new(cfg.n)?;
    coherent_state(cfg.w, scale, scale.cutoff_index(cfg.energy))
}

/// Runs one configured command and returns its reports.
pub fn execute(cfg: &RunConfig) -> Result<Vec<ExperimentReport>> {
    cfg.ensure_output_dir()?;
    let scale = SimulationScale::new(cfg.n)?;
    if cfg.dump_matrix {
        cut_q(scale, cfg.energy)?.write_csv(&cfg.path("cut_matrix.csv"))?;
    }
    let mut reports = Vec::new();
    match cfg.subcommand {
        Subcmd::Husimi => {
            let state = projected_state(cfg)?;
            let g = husimi(&state, &cfg.grid)?.with_source(
                Some(cfg.w),
                0.0,
                format!("projected coherent state, N={}", cfg.n),
            );
            g.write(&cfg.path("husimi.csv"), &cfg.path("husimi.json"))?;
            let mut r = ExperimentReport::new("husimi");
            r.param("N", cfg.n).param("w_re", cfg.w.re).param("w_im", cfg.w.im).param("grid", cfg.grid.to_string());
            let min = g.values().iter().copied().fold(f64::INFINITY, f64::min);
            r.value("max", g.max()).value("min", min);
            r.require("nonnegative", min >= 0.0);
            r.bound("max_at_most_norm", g.max() - state.norm(), 1e-10);
            r.value("peak_count", g.peaks(experiments::PEAK_FRACTION).len() as f64);
            reports.push(r);
        }
        Subcmd::Propagate => {
            let state = projected_state(cfg)?;
            let prop = Propagator::new(&cut_q(scale, cfg.energy)?)?;
            let mut r = ExperimentReport::new("propagate");
            r.param("N", cfg.n).param("w_re", cfg.w.re).param("w_im", cfg.w.im).param("t", cfg.times.clone());
            for &t in &cfg.times {
                let st = prop.propagate(&state, t)?;
                st.write_csv(&cfg.path(&format!("state_t{}.csv", time_tag(t))))?;
                r.compare(format!("norm_preserved[t={t}]"), st.norm(), state.norm(), 1e-10);
                if t == 0.0 {
                    r.bound("identity_at_t0", st.distance(&state)?, 0.0);
                }
            }
            reports.push(r);
        }
        Subcmd::Szego => {
            if cfg.series.is_empty() {
                reports.push(experiments::szego_check(cfg.f, cfg.n, cfg.energy)?);
            } else {
                let (runs, summary) = experiments::szego_series(cfg.f, &cfg.series, cfg.energy)?;
                for (run, n) in runs.iter().zip(&cfg.series) {
                    write_report(&cfg.out, run, &format!("szego_N{n}"))?;
                }
                reports.push(summary);
            }
        }
        Subcmd::Egorov => {
            reports.push(experiments::egorov_check(
                cfg.generator,
                cfg.observable,
                cfg.w,
                &cfg.times,
                cfg.n,
                cfg.energy,
            )?);
        }
        Subcmd::Commutator => {
            let (c, r) = experiments::commutator_check(cfg.n, cfg.n as usize + 3)?;
            if cfg.dump_matrix {
                c.write_csv(&cfg.path("commutator_matrix.csv"))?;
            }
            reports.push(r);
        }
        Subcmd::EdgeSymbol => {
            reports.push(experiments::edge_symbol_check(cfg.n, cfg.corner, cfg.energy)?);
            reports.push(experiments::composition_check(cfg.n, 4, 64, cfg.energy)?);
        }
        Subcmd::Reversibility => {
            reports.push(experiments::reversibility_check(cfg.n, cfg.w, &cfg.times, cfg.energy)?);
        }
        Subcmd::Figure2 => {
            let (grids, r) = experiments::splitting_experiment(cfg.n, cfg.w, &cfg.times, &cfg.grid, cfg.renormalize)?;
            for (g, &t) in grids.iter().zip(&cfg.times) {
                let stem = format!("husimi_t{}", time_tag(t));
                g.write(&cfg.path(&format!("{stem}.csv")), &cfg.path(&format!("{stem}.json")))?;
            }
            reports.push(r);
        }
    }
    for r in &reports {
        write_report(&cfg.out, r, &r.name)?;
    }
    Ok(reports)
}

fn configure_threads() {
    let n = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    // a pool may already exist when called from tests
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}

/// Entry point; returns the process exit code (0 all checks pass, 1 a check
/// failed or a numerical error occurred, 2 usage or configuration error).
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let (sub, flags) = match cli.command {
        Command::Husimi(f) => (Subcmd::Husimi, f),
        Command::Propagate(f) => (Subcmd::Propagate, f),
        Command::Szego(f) => (Subcmd::Szego, f),
        Command::Egorov(f) => (Subcmd::Egorov, f),
        Command::Commutator(f) => (Subcmd::Commutator, f),
        Command::EdgeSymbol(f) => (Subcmd::EdgeSymbol, f),
        Command::Reversibility(f) => (Subcmd::Reversibility, f),
        Command::Figure2(f) => (Subcmd::Figure2, f),
    };
    let cfg = match resolve(sub, flags) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 2;
        }
    };
    configure_threads();
    match execute(&cfg) {
        Ok(reports) => {
            let mut ok = true;
            for r in &reports {
                for line in r.summary_lines() {
                    let _ = writeln!(out, "{line}");
                }
                ok &= r.pass;
            }
            if ok { 0 } else { 1 }
        }
        Err(Error::Config(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
