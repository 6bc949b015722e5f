mod config;
mod error;
mod methods;
mod sweep;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dcesim::cavity::{CavityConfig, Mode};
use dcesim::detuning::threshold_scan;
use dcesim::effective::{resonance_report, DriveConfig};
use dcesim::par::Execution;
use dcesim::units::time_to_si;
use serde_json::{json, Value};

use config::{parse, resolve, Config, Resolved, Units};
use error::CliError;
use methods::run_method;
use table::{ensure_dir, sha256_hex, write_json, write_table, Cell, Format, Table};

#[derive(Parser, Debug)]
#[command(name = "dcesim", version, about = "Photon creation in a vibrating two-chamber cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate every selected method on the time grid.
    Run(Common),
    /// Evaluate the selected methods over the `sweep` grid.
    Sweep(Common),
    /// Critical drive detuning over the `threshold.delta_big` range.
    Threshold(Common),
    /// Fundamental mode and the right-dominated resonance candidates.
    Modes(Common),
    /// Validate a scenario and print its resolved parameters.
    Check {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// Scenario file, or a metadata.json written by an earlier run.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, env = "DCE_OUT_DIR", default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    jobs: Option<usize>,
    /// Reserved; every method is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

fn load(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

fn execution(jobs: Option<usize>) -> Result<Execution, CliError> {
    match jobs {
        Some(0) => Err(CliError::Validation("--jobs: must be at least 1".into())),
        Some(1) => Ok(Execution::Sequential),
        Some(n) => {
            #[cfg(feature = "parallel")]
            {
                // A second call in the same process fails harmlessly.
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            let _ = n;
            Ok(Execution::Parallel)
        }
        None => Ok(Execution::Parallel),
    }
}

fn opt(x: Option<f64>) -> Value {
    x.filter(|v| v.is_finite()).map_or(Value::Null, |v| json!(v))
}

fn parameters(u: Units, r: &Resolved) -> Value {
    let natural = json!({
        "xi": r.xi,
        "chis": r.chis,
        "chi_eff": r.chi_eff(),
        "omega_l": opt(r.omega_l),
        "omega_r": opt(r.omega_r),
        "eta": opt(r.eta),
        "beta": opt(r.beta),
        "n_l0": r.n_l0,
        "n_r0": r.n_r0,
        "delta": r.delta,
        "delta_big": r.delta_big,
        "right_mode": r.right_mode,
    });
    let beta_out = |b: f64| match u {
        Units::Si => time_to_si(b),
        Units::Natural => b,
    };
    let file = json!({
        "xi": u.freq_out(r.xi),
        "chis": r.chis.iter().map(|&c| u.freq_out(c)).collect::<Vec<_>>(),
        "omega_l": opt(r.omega_l.map(|w| u.freq_out(w))),
        "omega_r": opt(r.omega_r.map(|w| u.freq_out(w))),
        "beta": opt(r.beta.map(beta_out)),
        "n_l0": r.n_l0,
        "n_r0": r.n_r0,
        "delta": r.delta,
        "delta_big": r.delta_big,
    });
    json!({ "config_units": file, "natural": natural })
}

fn write_metadata(
    dir: &Path,
    command: &str,
    cfg: &Config,
    r: Option<&Resolved>,
    warnings: &[String],
    outputs: &[String],
) -> Result<(), CliError> {
    let canonical = cfg.canonical();
    let config: Value = serde_json::from_slice(&canonical).expect("canonical config is json");
    let meta = json!({
        "tool": "dcesim",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "config_hash": sha256_hex(&canonical),
        "parameters": r.map_or(Value::Null, |r| parameters(cfg.units, r)),
        "warnings": warnings,
        "outputs": outputs,
        "config": config,
    });
    write_json(dir, "metadata.json", &meta)
}

fn run(c: &Common) -> Result<(), CliError> {
    let cfg = load(&c.config)?;
    let exec = execution(c.jobs)?;
    let r = resolve(&cfg)?;
    ensure_dir(&c.out)?;
    let mut warnings = r.warnings.clone();
    let mut outputs = Vec::new();
    for &m in &cfg.methods {
        let res = run_method(m, &r, &cfg.numerics, exec);
        let name = res.method.name();
        if let Some(e) = &res.error {
            warnings.push(format!("{name}: {e}"));
        }
        let bad = res.invalid_rows();
        if bad > 0 {
            warnings.push(format!("{name}: {bad} of {} rows invalid", res.table.rows.len()));
        }
        outputs.push(write_table(&c.out, name, &res.table, c.format)?);
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    write_metadata(&c.out, "run", &cfg, Some(&r), &warnings, &outputs)
}

fn run_sweep(c: &Common) -> Result<(), CliError> {
    let cfg = load(&c.config)?;
    let exec = execution(c.jobs)?;
    let r = resolve(&cfg)?;
    let table = sweep::run(&cfg, exec)?;
    ensure_dir(&c.out)?;
    let valid = table.column("valid").expect("sweep column");
    let bad = table.rows.iter().filter(|row| row[valid] != Cell::Bool(true)).count();
    let mut warnings = r.warnings.clone();
    if bad > 0 {
        warnings.push(format!("sweep: {bad} of {} rows invalid", table.rows.len()));
    }
    let out = write_table(&c.out, "sweep", &table, c.format)?;
    write_metadata(&c.out, "sweep", &cfg, Some(&r), &warnings, &[out])
}

fn run_threshold(c: &Common) -> Result<(), CliError> {
    let cfg = load(&c.config)?;
    let exec = execution(c.jobs)?;
    let th = cfg
        .threshold
        .as_ref()
        .ok_or_else(|| CliError::Validation("threshold: section required".into()))?;
    let r = resolve(&cfg)?;
    let omega_l = r
        .omega_l
        .ok_or_else(|| CliError::Validation("effective.omega_l: required by the threshold scan".into()))?;
    let deltas = th.delta_big.values();
    let results = threshold_scan(r.xi, r.chi_eff(), omega_l, &deltas, exec);
    let mut table = Table::new(vec!["delta_big", "delta_c", "analytic_bound", "ideal", "valid", "error"]);
    for (d, res) in deltas.iter().zip(results) {
        table.push(match res {
            Ok(t) => vec![
                (*d).into(),
                t.delta_c.into(),
                t.analytic_bound.into(),
                t.ideal.into(),
                true.into(),
                Cell::Text(String::new()),
            ],
            Err(e) => vec![
                (*d).into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                false.into(),
                Cell::Text(e.to_string()),
            ],
        });
    }
    ensure_dir(&c.out)?;
    let out = write_table(&c.out, "threshold", &table, c.format)?;
    write_metadata(&c.out, "threshold", &cfg, Some(&r), &r.warnings, &[out])
}

fn run_modes(c: &Common) -> Result<(), CliError> {
    let cfg = load(&c.config)?;
    let (g, d) = match (&cfg.geometry, &cfg.drive) {
        (Some(g), Some(d)) => (g, d),
        _ => return Err(CliError::Validation("geometry: required by the modes listing".into())),
    };
    // The listing is how a partner gets chosen, so it must work without one.
    let r = resolve(&cfg).ok();
    let u = cfg.units;
    let cav = CavityConfig::new(g.a0, g.b, g.c, g.dy, g.dz, g.gamma)?;
    let t_end = cfg.time.points().last().map_or(0.0, |&t| u.time_in(t));
    let duration = d.duration.map(|t| u.time_in(t)).unwrap_or(if t_end > 0.0 { t_end } else { 1.0 });
    let drive = DriveConfig::resonant(&cav, d.epsilon, d.delta, duration)?;
    let report = resonance_report(&cav, &drive, None)?;
    let l = Mode::fundamental(&cav)?;
    let mut table = Table::new(vec![
        "role",
        "nx",
        "ny",
        "nz",
        "omega",
        "delta_big",
        "minus_detuning",
        "plus_detuning",
        "minus_resonant",
        "plus_resonant",
    ]);
    let idx = |m: &Mode| [Cell::Int(m.nx.into()), Cell::Int(m.ny.into()), Cell::Int(m.nz.into())];
    let mut row = vec![Cell::from("left")];
    row.extend(idx(&l));
    row.extend([Cell::Num(u.freq_out(l.omega_total)), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
    table.push(row);
    for (k, cand) in report.candidates.iter().enumerate() {
        let role = if report.partner == Some(k) { "partner" } else { "candidate" };
        let mut row = vec![Cell::from(role)];
        row.extend(idx(&cand.mode));
        row.extend([
            Cell::Num(u.freq_out(cand.mode.omega_total)),
            cand.delta_big.into(),
            cand.minus_detuning.into(),
            cand.plus_detuning.into(),
            cand.minus_resonant.into(),
            cand.plus_resonant.into(),
        ]);
        table.push(row);
    }
    ensure_dir(&c.out)?;
    let out = write_table(&c.out, "modes", &table, c.format)?;
    let warnings = r.as_ref().map(|r| r.warnings.clone()).unwrap_or_default();
    write_metadata(&c.out, "modes", &cfg, r.as_ref(), &warnings, &[out])
}

fn check(path: &Path) -> Result<(), CliError> {
    let cfg = load(path)?;
    let r = resolve(&cfg)?;
    let times = &r.times;
    println!("ok: {}", path.display());
    println!("  methods: {}", cfg.methods.iter().map(|m| m.name()).collect::<Vec<_>>().join(", "));
    println!("  xi = {:e} 1/m, chi_eff = {:e} 1/m", r.xi, r.chi_eff());
    if let Some(eta) = r.eta {
        println!("  eta = {eta:e}");
    }
    println!("  initial occupations: n_l = {:e}, n_r = {:e}", r.n_l0, r.n_r0);
    if let (Some(first), Some(last)) = (times.first(), times.last()) {
        println!(
            "  {} samples, xi*t from {:e} to {:e}",
            times.len(),
            r.xi * first.1,
            r.xi * last.1
        );
    }
    if cfg.sweep.is_some() {
        println!("  sweep: {} points", sweep::points(&cfg)?.len());
    }
    for w in &r.warnings {
        println!("warning: {w}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run(c) => run(c),
        Command::Sweep(c) => run_sweep(c),
        Command::Threshold(c) => run_threshold(c),
        Command::Modes(c) => run_modes(c),
        Command::Check { config } => check(config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
