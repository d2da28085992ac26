//! `toa-lab` command-line driver.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 usage error.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use toa_core::dirac::EventKinematics;
use toa_core::flow::GradientMode;
use toa_core::grid::Grid1D;
use toa_core::shift::ShiftForm;
use toa_lab::checks::find;
use toa_lab::suite::apply_overrides;
use toa_lab::params::{parse_species, parse_spins};
use toa_lab::tools::{flow_csv, fock_stats, fock_summary, lattice_modes, shift_export};
use toa_lab::{emit_report, run_suite, CheckSpec, Format, LabError, LabResult, Profile, ReportDocument, DEFAULT_SUITE};

#[derive(Debug, Parser)]
#[command(name = "toa-lab", version, about = "Numerical checks of Dirac time-of-arrival operators and their event-space duals")]
struct Cli {
    #[command(flatten)]
    opts: Opts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Opts {
    /// Particle mass.
    #[arg(long, global = true, allow_negative_numbers = true)]
    m: Option<f64>,

    /// Event position.
    #[arg(long, global = true, allow_negative_numbers = true)]
    x: Option<f64>,

    /// Proper time of arrival τ.
    #[arg(long, global = true, allow_negative_numbers = true)]
    tau: Option<f64>,

    /// up, down or both.
    #[arg(long, global = true)]
    spin: Option<String>,

    /// Spins of a Fock mode set: up, down or both.
    #[arg(long, global = true)]
    spins: Option<String>,

    /// electron, positron or both (a single species for `shift`).
    #[arg(long, global = true)]
    species: Option<String>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    p_min: Option<f64>,

    #[arg(long, global = true, allow_negative_numbers = true)]
    p_max: Option<f64>,

    /// Grid points (coarsest level for refinement studies; N_p for lattices).
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Number of grid levels in refinement studies.
    #[arg(long, global = true)]
    refinements: Option<usize>,

    #[arg(long, global = true)]
    eps_span: Option<f64>,

    #[arg(long, global = true)]
    step: Option<f64>,

    /// Conjugate-lattice indices, comma separated.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    lattice_k: Option<Vec<i64>>,

    /// Seed for randomized sweeps; recorded in the report.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    #[arg(long, global = true, value_enum, default_value_t = ProfileArg::Default)]
    tolerance_profile: ProfileArg,

    /// Overrides the tolerance of every selected check.
    #[arg(long, global = true)]
    tolerance: Option<f64>,

    /// Print the identity behind each selected check and exit.
    #[arg(long, global = true)]
    explain: bool,

    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProfileArg {
    Strict,
    Default,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one group of checks.
    Verify {
        #[arg(value_enum)]
        target: VerifyTarget,
    },
    /// Integrate the dual flow of T = −qE/k and emit the trajectory as CSV.
    Flow {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        q0: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        k0: f64,
        /// Use difference gradients instead of the closed form.
        #[arg(long)]
        fd_gradient: bool,
    },
    /// Energy-shift fields.
    Shift {
        #[command(subcommand)]
        action: ShiftAction,
    },
    /// Fock space of event modes on a conjugate lattice.
    Fock {
        #[command(subcommand)]
        action: FockAction,
    },
    /// Run a suite and emit the full report.
    Report {
        /// Check ids to run (repeatable); default is the whole suite.
        #[arg(long = "check")]
        checks: Vec<String>,
        /// JSON array of check specs.
        #[arg(long)]
        specs: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VerifyTarget {
    Clifford,
    Spinors,
    AppendixA,
    Commutators,
    EnergyShift,
    FieldCar,
}

impl VerifyTarget {
    fn checks(self) -> &'static [&'static str] {
        match self {
            VerifyTarget::Clifford => &["clifford", "car"],
            VerifyTarget::Spinors => &["spinors"],
            VerifyTarget::AppendixA => &["eigenfunction-plus", "eigenfunction-minus", "derivative-identity", "f-vector"],
            VerifyTarget::Commutators => &["commutators"],
            VerifyTarget::EnergyShift => &["energy-shift", "action"],
            VerifyTarget::FieldCar => &["field-car"],
        }
    }
}

#[derive(Debug, Subcommand)]
enum ShiftAction {
    /// Sample one elementary mode on an (ε, p) grid as flat complex values.
    Field {
        /// Carry the amplitude (x²/(x²+τ²))^{1/4}.
        #[arg(long)]
        amplitude: bool,
    },
}

#[derive(Debug, Subcommand)]
enum FockAction {
    /// List modes and the spectrum of the quantized arrival time.
    Build,
    /// Compare the field quadratic form with the number-operator form.
    Compare,
    /// Mean and variance of the arrival time in a basis state.
    Stats {
        /// Occupied mode indices, comma separated; empty for the vacuum.
        #[arg(long, value_delimiter = ',')]
        occupied: Vec<usize>,
    },
}

impl Opts {
    fn profile(&self) -> Profile {
        match self.tolerance_profile {
            ProfileArg::Strict => Profile::Strict,
            ProfileArg::Default => Profile::Default,
        }
    }

    fn format(&self, default: Format) -> Format {
        match self.format {
            Some(FormatArg::Json) => Format::Json,
            Some(FormatArg::Table) => Format::Table,
            None => default,
        }
    }

    fn overrides(&self) -> BTreeMap<String, Value> {
        let mut o = BTreeMap::new();
        let nums = [("m", self.m), ("x", self.x), ("tau", self.tau), ("p_min", self.p_min), ("p_max", self.p_max), ("eps_span", self.eps_span), ("step", self.step)];
        for (k, v) in nums {
            if let Some(v) = v {
                o.insert(k.to_string(), Value::from(v));
            }
        }
        if let Some(g) = self.grid {
            o.insert("grid".into(), Value::from(g));
        }
        if let Some(s) = &self.spin {
            o.insert("spin".into(), Value::from(s.clone()));
        }
        if let Some(k) = &self.lattice_k {
            o.insert("lattice_k".into(), Value::from(k.clone()));
        }
        o
    }
}

enum Failure {
    Usage(String),
    Checks,
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn write_out(opts: &Opts, bytes: &[u8]) -> LabResult<()> {
    match &opts.output {
        Some(path) => fs::write(path, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn explain(ids: &[String]) -> Result<(), Failure> {
    let mut out = String::new();
    for id in ids {
        out.push_str(&format!("{id}: {}\n", find(id)?.anchor));
    }
    print!("{out}");
    Ok(())
}

fn run_checks(opts: &Opts, mut specs: Vec<CheckSpec>, default: Format) -> Result<(), Failure> {
    if opts.explain {
        return explain(&specs.iter().map(|s| s.check_id.clone()).collect::<Vec<_>>());
    }
    apply_overrides(&mut specs, &opts.overrides(), opts.refinements, opts.tolerance);
    let outcome = run_suite(&specs, opts.seed)?;
    let pass = outcome.all_pass();
    let doc = ReportDocument::new(opts.seed, opts.profile(), outcome.reports);
    write_out(opts, &emit_report(&doc, opts.format(default))?)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Checks)
    }
}

fn default_specs(ids: &[&str], profile: Profile) -> LabResult<Vec<CheckSpec>> {
    ids.iter().map(|id| CheckSpec::default_for(id, profile)).collect()
}

fn choice<T>(key: &str, given: Option<&str>, default: &str, parse: fn(&str) -> Option<Vec<T>>) -> LabResult<Vec<T>> {
    let v = given.unwrap_or(default);
    parse(v).ok_or_else(|| LabError::Parameter { key: key.into(), reason: format!("unrecognised value {v:?}") })
}

fn lattice_from(opts: &Opts) -> LabResult<(toa_core::fock::ModeSet, toa_core::fock::MomentumLattice)> {
    let ks = opts.lattice_k.clone().unwrap_or_else(|| vec![1, 2]);
    let spins = choice("spins", opts.spins.as_deref(), "both", parse_spins)?;
    let species = choice("species", opts.species.as_deref(), "both", parse_species)?;
    lattice_modes(&ks, &spins, &species, opts.grid.unwrap_or(5), 0.3, opts.tau.unwrap_or(0.5))
}

fn single<T: Copy>(key: &str, v: Vec<T>) -> LabResult<T> {
    match v[..] {
        [one] => Ok(one),
        _ => Err(LabError::Parameter { key: key.into(), reason: "exactly one value required".into() }),
    }
}

fn shift_field(opts: &Opts, amplitude: bool) -> LabResult<Vec<u8>> {
    let species = single("species", choice("species", opts.species.as_deref(), "electron", parse_species)?)?;
    let spin = single("spin", choice("spin", opts.spin.as_deref(), "up", parse_spins)?)?;
    let e = EventKinematics::new(opts.x.unwrap_or(1.0), opts.tau.unwrap_or(0.6))?;
    let (span, step) = (opts.eps_span.unwrap_or(1.0), opts.step.unwrap_or(0.1));
    if !(span > 0.0 && step > 0.0 && step <= span) {
        return Err(LabError::Parameter { key: "step".into(), reason: "need 0 < step ≤ eps-span".into() });
    }
    let eps_grid = Grid1D::energy(0.0, span, (span / step).round() as usize + 1)?;
    let p_grid = Grid1D::momentum(opts.p_min.unwrap_or(0.5), opts.p_max.unwrap_or(3.5), opts.grid.unwrap_or(31), 0.0)?;
    let form = if amplitude { ShiftForm::WithAmplitude } else { ShiftForm::CNumberTau };
    let out = shift_export(species, &e, spin, form, eps_grid, p_grid)?;
    match opts.format(Format::Json) {
        Format::Json => Ok(serde_json::to_vec_pretty(&out)?),
        Format::Table => {
            let mut w = csv::Writer::from_writer(vec![]);
            w.write_record(["eps", "p", "component", "re", "im"])?;
            let (ne, np) = (eps_grid.len(), p_grid.len());
            for i in 0..ne {
                for j in 0..np {
                    for c in 0..4 {
                        let at = 2 * ((i * np + j) * 4 + c);
                        let row = [eps_grid.point(i), p_grid.point(j), c as f64, out.values[at], out.values[at + 1]];
                        w.write_record(row.map(|v| v.to_string()))?;
                    }
                }
            }
            w.into_inner().map_err(|e| LabError::Io(e.into_error()))
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let opts = &cli.opts;
    match cli.command {
        Command::Verify { target } => run_checks(opts, default_specs(target.checks(), opts.profile())?, Format::Table),
        Command::Report { checks, specs } => {
            let list = match specs {
                Some(path) => CheckSpec::parse_list(&fs::read_to_string(path).map_err(LabError::from)?, opts.profile())?,
                None if checks.is_empty() => default_specs(&DEFAULT_SUITE, opts.profile())?,
                None => checks.iter().map(|c| CheckSpec::default_for(c, opts.profile())).collect::<LabResult<_>>()?,
            };
            run_checks(opts, list, Format::Json)
        }
        Command::Flow { q0, k0, fd_gradient } => {
            if opts.explain {
                return explain(&["flow".to_string()]);
            }
            let mode = if fd_gradient { GradientMode::FiniteDifference } else { GradientMode::Analytic };
            let csv = flow_csv(opts.m.unwrap_or(1.0), q0, k0, opts.eps_span.unwrap_or(10.0), opts.step.unwrap_or(1e-3), mode)?;
            write_out(opts, csv.as_bytes())?;
            Ok(())
        }
        Command::Shift { action: ShiftAction::Field { amplitude } } => {
            write_out(opts, &shift_field(opts, amplitude)?)?;
            Ok(())
        }
        Command::Fock { action } => match action {
            FockAction::Compare => run_checks(opts, default_specs(&["fock-compare", "fock-vacuum"], opts.profile())?, Format::Table),
            FockAction::Build => {
                let (modes, _) = lattice_from(opts)?;
                let summary = fock_summary(&modes)?;
                let bytes = match opts.format(Format::Table) {
                    Format::Json => serde_json::to_vec_pretty(&summary).map_err(LabError::from)?,
                    Format::Table => {
                        let mut s = format!("fock dimension {}\nindex  species        x                     spin  T_x\n", summary.fock_dim);
                        for r in &summary.modes {
                            s.push_str(&format!("{:<5}  {:<13?}  {:<20}  {:<4}  {}\n", r.index, r.species, r.x, r.spin, r.arrival));
                        }
                        s.push_str("occupation  T\n");
                        for (bits, t) in summary.spectrum.iter().enumerate() {
                            s.push_str(&format!("{bits:0width$b}  {t}\n", width = summary.modes.len().max(1)));
                        }
                        s.into_bytes()
                    }
                };
                write_out(opts, &bytes)?;
                Ok(())
            }
            FockAction::Stats { occupied } => {
                let (modes, _) = lattice_from(opts)?;
                let stats = fock_stats(&modes, &occupied)?;
                let bytes = match opts.format(Format::Table) {
                    Format::Json => serde_json::to_vec_pretty(&stats).map_err(LabError::from)?,
                    Format::Table => format!("mean {}\nvariance {}\n", stats.mean, stats.variance).into_bytes(),
                };
                write_out(opts, &bytes)?;
                Ok(())
            }
        },
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
