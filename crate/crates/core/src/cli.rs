//! `wavepacket` command-line front end.
//!
//! Subcommands: `spectrum`, `width`, `adjust`, `recoil`, plus `replay` which
//! re-executes the configuration embedded in an earlier JSON output.
//!
//! JSON output is an object with a `config` key (the full effective
//! [`RunConfig`]) and a `results` key. Numbers in JSON use the shortest
//! round-trip form; CSV uses 17 significant digits.
//!
//! Exit codes: 0 success, 1 runtime or domain error, 2 usage error.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::adjustment::{
    adjusted_energy_consistent, adjusted_energy_paper, expand_product, paper_zeta,
    solve_imag_zero_default, ComplexEnergy, ComplexObservable,
};
use crate::pulse::Pulse;
use crate::recoil::{for_each_momentum, recoil_stats};
use crate::spectral::{
    energy_moments, first_zero_halfwidth, fmt17, fourier_intensity, linspace, uncertainty_product,
    width_report, width_report_numeric, SampledWaveform, Spectrum,
};
use crate::{Complex64, Error, DEFAULT_HBAR};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum AdjustMode {
    Paper,
    Consistent,
    Both,
}

#[derive(Debug, Parser)]
#[command(
    name = "wavepacket",
    version,
    about = "Wave-packet spectra, widths, recoil sampling and complex-energy adjustment"
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Output file (default: standard output).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Spectrum of a rectangular pulse (analytic) or of a sampled waveform.
    Spectrum(SpectrumArgs),
    /// Widths, time-bandwidth product and energy moments of a pulse.
    Width(WidthArgs),
    /// Adjusted real value of a complex energy E + iΔE.
    Adjust(AdjustArgs),
    /// Monte Carlo recoil momentum over the forward hemisphere.
    Recoil(RecoilArgs),
    /// Re-run the configuration embedded in a JSON output file.
    Replay(ReplayArgs),
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct SpectrumArgs {
    #[arg(long)]
    a0: Option<f64>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    /// Waveform CSV (`t,re,im` or `t,amp`) for numeric mode.
    #[arg(long, conflicts_with_all = ["a0", "omega0", "tau"])]
    input: Option<PathBuf>,
    #[arg(long)]
    omega_min: f64,
    #[arg(long)]
    omega_max: f64,
    #[arg(long)]
    points: usize,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct WidthArgs {
    #[arg(long, default_value_t = 1.0)]
    a0: f64,
    #[arg(long)]
    omega0: f64,
    #[arg(long)]
    tau: f64,
    #[arg(long, default_value_t = DEFAULT_HBAR)]
    hbar: f64,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct AdjustArgs {
    #[arg(long)]
    e: f64,
    #[arg(long)]
    de: f64,
    #[arg(long)]
    t: f64,
    #[arg(long, value_enum, default_value_t = AdjustMode::Both)]
    mode: AdjustMode,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
struct RecoilArgs {
    #[arg(long)]
    k: f64,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write every per-sample momentum as `kx,ky,kz` CSV.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    /// JSON output produced by an earlier run.
    #[arg(long)]
    input: PathBuf,
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: CommandConfig,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", content = "params", rename_all = "lowercase")]
pub enum CommandConfig {
    Spectrum {
        a0: Option<f64>,
        omega0: Option<f64>,
        tau: Option<f64>,
        omega_min: f64,
        omega_max: f64,
        points: usize,
    },
    Width {
        a0: f64,
        omega0: f64,
        tau: f64,
        hbar: f64,
    },
    Adjust {
        e: f64,
        de: f64,
        t: f64,
        mode: AdjustMode,
    },
    Recoil {
        k: f64,
        n: u64,
        dump: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime(e: Error) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };

    let result = match config_from_cli(cli) {
        Ok(config) => execute(&config, stdout, stderr),
        Err(e) => Err(e),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            if e.code() == EXIT_USAGE {
                let _ = writeln!(stderr, "\nFor more information, try '--help'.");
            }
            e.code()
        }
    }
}

fn config_from_cli(cli: Cli) -> Result<RunConfig, CliError> {
    let (command, input, seed) = match cli.command {
        Command::Spectrum(a) => (
            CommandConfig::Spectrum {
                a0: a.a0,
                omega0: a.omega0,
                tau: a.tau,
                omega_min: a.omega_min,
                omega_max: a.omega_max,
                points: a.points,
            },
            a.input,
            None,
        ),
        Command::Width(a) => (
            CommandConfig::Width {
                a0: a.a0,
                omega0: a.omega0,
                tau: a.tau,
                hbar: a.hbar,
            },
            None,
            None,
        ),
        Command::Adjust(a) => (
            CommandConfig::Adjust {
                e: a.e,
                de: a.de,
                t: a.t,
                mode: a.mode,
            },
            None,
            None,
        ),
        Command::Recoil(a) => (
            CommandConfig::Recoil {
                k: a.k,
                n: a.n,
                dump: a.dump,
            },
            None,
            Some(a.seed),
        ),
        Command::Replay(a) => return load_config(&a.input),
    };
    Ok(RunConfig {
        command,
        input,
        output: cli.output,
        format: cli.format,
        seed,
    })
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let mut doc: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
    let config = doc
        .get_mut("config")
        .map(Value::take)
        .ok_or_else(|| CliError::Runtime(format!("{}: no `config` key", path.display())))?;
    serde_json::from_value(config)
        .map_err(|e| CliError::Runtime(format!("{}: invalid config: {e}", path.display())))
}

/// Runs a fully specified configuration. Returns the exit code.
pub fn run_config(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match execute(config, stdout, stderr) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.code()
        }
    }
}

fn execute(
    config: &RunConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let mut buf = Vec::new();
    match &config.command {
        CommandConfig::Spectrum { .. } => cmd_spectrum(config, &mut buf, stderr)?,
        CommandConfig::Width { .. } => cmd_width(config, &mut buf)?,
        CommandConfig::Adjust { .. } => cmd_adjust(config, &mut buf)?,
        CommandConfig::Recoil { .. } => cmd_recoil(config, &mut buf)?,
    }
    match &config.output {
        Some(path) => std::fs::write(path, &buf)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?,
        None => stdout.write_all(&buf)?,
    }
    Ok(())
}

fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be finite, got {v}")))
    }
}

fn write_json(out: &mut dyn Write, config: &RunConfig, results: Value) -> Result<(), CliError> {
    let mut doc = Map::new();
    doc.insert(
        "config".into(),
        serde_json::to_value(config).map_err(|e| CliError::Runtime(e.to_string()))?,
    );
    doc.insert("results".into(), results);
    let text = serde_json::to_string_pretty(&Value::Object(doc))
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) if n.is_f64() => fmt17(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// One header row and one value row.
fn write_record_csv(out: &mut dyn Write, record: &Map<String, Value>) -> Result<(), CliError> {
    let keys: Vec<&str> = record.keys().map(String::as_str).collect();
    let cells: Vec<String> = record.values().map(csv_cell).collect();
    writeln!(out, "{}", keys.join(","))?;
    writeln!(out, "{}", cells.join(","))?;
    Ok(())
}

fn emit_record(
    out: &mut dyn Write,
    config: &RunConfig,
    record: Map<String, Value>,
) -> Result<(), CliError> {
    match config.format {
        Format::Json => write_json(out, config, Value::Object(record)),
        Format::Csv => write_record_csv(out, &record),
    }
}

fn num(v: f64) -> Value {
    Value::from(v)
}

fn opt_num(v: Option<f64>) -> Value {
    v.map_or(Value::Null, Value::from)
}

fn cmd_spectrum(
    config: &RunConfig,
    out: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let CommandConfig::Spectrum {
        a0,
        omega0,
        tau,
        omega_min,
        omega_max,
        points,
    } = config.command
    else {
        unreachable!()
    };
    let omega_min = finite("omega-min", omega_min)?;
    let omega_max = finite("omega-max", omega_max)?;
    if points < 2 {
        return Err(CliError::Usage(format!(
            "--points must be at least 2, got {points}"
        )));
    }
    if omega_max <= omega_min {
        return Err(CliError::Usage(
            "--omega-max must exceed --omega-min".into(),
        ));
    }
    let grid = linspace(omega_min, omega_max, points);

    let (mode, spectrum, duration, pulse) = match (&config.input, omega0, tau) {
        (Some(path), None, None) if a0.is_none() => {
            let file = File::open(path)
                .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
            let waveform = SampledWaveform::read_csv(io::BufReader::new(file))
                .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
            let spectrum = fourier_intensity(&waveform, &grid).map_err(runtime)?;
            ("numeric", spectrum, waveform.duration(), None)
        }
        (None, Some(omega0), Some(tau)) => {
            let pulse = Pulse::new(a0.unwrap_or(1.0), omega0, tau).map_err(usage)?;
            let spectrum = Spectrum::analytic(&pulse, grid).map_err(usage)?;
            ("analytic", spectrum, pulse.tau(), Some(pulse))
        }
        _ => {
            return Err(CliError::Usage(
                "give either --input, or --omega0 and --tau (with optional --a0)".into(),
            ))
        }
    };

    let widths = width_report_numeric(&spectrum, duration);
    if let Err(e) = &widths {
        writeln!(stderr, "warning: widths unavailable: {e}")?;
    }
    let widths = widths.ok();

    let mut summary = Map::new();
    summary.insert("mode".into(), Value::from(mode));
    summary.insert("peak_omega".into(), num(spectrum.peak_omega()));
    summary.insert("peak_intensity".into(), num(spectrum.peak_intensity()));
    summary.insert(
        "first_zero_halfwidth".into(),
        opt_num(widths.map(|w| w.first_zero_halfwidth)),
    );
    summary.insert("fwhm".into(), opt_num(widths.map(|w| w.fwhm)));
    summary.insert("duration".into(), num(duration));
    summary.insert("product".into(), opt_num(widths.map(|w| w.product)));
    if let Some(p) = &pulse {
        summary.insert(
            "first_zero_halfwidth_exact".into(),
            num(first_zero_halfwidth(p)),
        );
        summary.insert("product_exact".into(), num(uncertainty_product(p)));
    }

    match config.format {
        Format::Json => {
            let mut results = Map::new();
            results.insert("summary".into(), Value::Object(summary));
            results.insert(
                "spectrum".into(),
                serde_json::to_value(&spectrum).map_err(|e| CliError::Runtime(e.to_string()))?,
            );
            write_json(out, config, Value::Object(results))
        }
        Format::Csv => {
            spectrum.write_csv(&mut *out)?;
            for (key, value) in &summary {
                writeln!(stderr, "# {key} = {}", csv_cell(value))?;
            }
            Ok(())
        }
    }
}

fn cmd_width(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let CommandConfig::Width {
        a0,
        omega0,
        tau,
        hbar,
    } = config.command
    else {
        unreachable!()
    };
    let pulse = Pulse::new(a0, omega0, tau).map_err(usage)?;
    let moments = energy_moments(&pulse, hbar).map_err(usage)?;
    let widths = width_report(&pulse);

    let mut record = Map::new();
    record.insert(
        "first_zero_halfwidth".into(),
        num(widths.first_zero_halfwidth),
    );
    record.insert("fwhm".into(), num(widths.fwhm));
    record.insert("product".into(), num(widths.product));
    record.insert("mean_omega".into(), num(moments.mean_omega));
    record.insert("mean_energy".into(), num(moments.mean_energy));
    record.insert("delta_e_convention".into(), num(moments.delta_e_convention));
    record.insert("hbar".into(), num(moments.hbar));
    emit_record(out, config, record)
}

fn cmd_adjust(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let CommandConfig::Adjust { e, de, t, mode } = config.command else {
        unreachable!()
    };
    let e = finite("e", e)?;
    let de = finite("de", de)?;
    let t = finite("t", t)?;
    let ce = ComplexEnergy::new(e, de).map_err(usage)?;

    let mut record = Map::new();
    record.insert("e".into(), num(e));
    record.insert("de".into(), num(de));
    record.insert("t".into(), num(t));

    if matches!(mode, AdjustMode::Paper | AdjustMode::Both) {
        let energy = adjusted_energy_paper(ce).map_err(runtime)?;
        let zeta = paper_zeta(ce, t).map_err(runtime)?;
        let product = expand_product(ce, t, zeta);
        record.insert("paper_energy".into(), num(energy));
        record.insert("zeta_paper".into(), num(zeta));
        record.insert("paper_value".into(), num(product.re));
        record.insert("residual_im_paper".into(), num(product.im));
    }
    if matches!(mode, AdjustMode::Consistent | AdjustMode::Both) {
        let c = adjusted_energy_consistent(ce, t).map_err(runtime)?;
        let product = expand_product(ce, t, c.zeta);
        let energy_c = ce.as_complex();
        let solved =
            solve_imag_zero_default(&ComplexObservable::new(move |z: Complex64| energy_c * z, t))
                .map_err(runtime)?;
        record.insert("consistent_energy".into(), num(ce.e + ce.de * ce.de / ce.e));
        record.insert("zeta_consistent".into(), num(c.zeta));
        record.insert("consistent_value".into(), num(c.value));
        record.insert("residual_im_consistent".into(), num(product.im));
        record.insert("zeta_solver".into(), num(solved.zeta));
        record.insert("solver_value".into(), num(solved.adjusted_value));
        record.insert("residual_im_solver".into(), num(solved.residual_im));
        record.insert(
            "solver_evaluations".into(),
            Value::from(solved.evaluations as u64),
        );
    }
    emit_record(out, config, record)
}

fn cmd_recoil(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let CommandConfig::Recoil { k, n, ref dump } = config.command else {
        unreachable!()
    };
    let seed = config.seed.unwrap_or(0);
    let stats = recoil_stats(k, n, seed).map_err(usage)?;

    if let Some(path) = dump {
        let file = File::create(path)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "kx,ky,kz")?;
        for_each_momentum(k, n, seed, |p| {
            writeln!(w, "{},{},{}", fmt17(p[0]), fmt17(p[1]), fmt17(p[2]))
        })
        .map_err(runtime)?;
        w.flush()?;
    }

    let record = match serde_json::to_value(&stats) {
        Ok(Value::Object(m)) => m,
        _ => {
            return Err(CliError::Runtime(
                "cannot serialize recoil statistics".into(),
            ))
        }
    };
    emit_record(out, config, record)
}
