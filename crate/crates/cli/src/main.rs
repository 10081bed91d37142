//! `lamsab`: laminate failure analysis, orientation attacks and detectability.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 numerical failure or
//! no solution (the best state found is still written), 3 I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};

use lamsab_core::attack::{
    run_attack, AttackError, AttackKind, AttackSpec, AttackStatus, CriticalRule, DEFAULT_MAX_EVALUATIONS,
    DEFAULT_MAX_SWEEPS,
};
use lamsab_core::design::{Design, DesignError};
use lamsab_core::detect::detectability;
use lamsab_core::failure::{classify_failure_mode, simulate_progressive_failure, DEFAULT_GAP_THRESHOLD};
use lamsab_core::report::{ladders_to_csv, AttackReport, InputEcho, LadderReport, RunReport};
use lamsab_core::LaminateError;

#[derive(Parser)]
#[command(name = "lamsab", version, about = "Laminate failure analysis and ply-orientation attack search")]
struct Cli {
    /// Gap ratio below which a failure ladder counts as catastrophic.
    #[arg(long, global = true, default_value_t = DEFAULT_GAP_THRESHOLD)]
    gap_threshold: f64,
    /// Record the wall-clock time in the report (reports then differ between runs).
    #[arg(long, global = true)]
    timestamp: bool,
    /// Do not print the text table to stdout.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Progressive failure ladder of a design.
    Analyze {
        design: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Search for an orientation attack that lowers the safety factor.
    Attack {
        design: PathBuf,
        #[arg(long = "type", value_enum)]
        kind: KindArg,
        /// One or more target safety factors; defaults to the design file's list.
        #[arg(long, num_args = 1..)]
        target_sf: Vec<f64>,
        #[arg(short, long)]
        output: PathBuf,
        /// Type 2: maximum number of failure evaluations.
        #[arg(long, default_value_t = DEFAULT_MAX_EVALUATIONS)]
        budget: usize,
        /// Type 1: maximum number of middle-outward sweeps.
        #[arg(long, default_value_t = DEFAULT_MAX_SWEEPS)]
        max_sweeps: usize,
        #[arg(long, value_enum, default_value_t = RuleArg::ForceSensitive)]
        critical_rule: RuleArg,
        /// Type 2: skip re-descending earlier plies after each new one.
        #[arg(long)]
        no_resettle: bool,
        /// Write each tampered design as a TOML file into this directory.
        #[arg(long)]
        design_out: Option<PathBuf>,
    },
    /// Stiffness and frequency shift between an original and an attacked design.
    Detect {
        original: PathBuf,
        attacked: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Export every failure ladder in a report as CSV.
    ExportLadder {
        report: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    ForceSensitive,
    MinimumGroup,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

impl From<DesignError> for Failure {
    fn from(e: DesignError) -> Self {
        match e {
            DesignError::Io { .. } => Failure::Io(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<LaminateError> for Failure {
    fn from(e: LaminateError) -> Self {
        Failure::Numerical(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if !(cli.gap_threshold.is_finite()) {
        return Err(Failure::Usage("--gap-threshold must be finite".into()));
    }
    match &cli.command {
        Command::Analyze { design, output } => analyze(cli, design, output),
        Command::Attack {
            design,
            kind,
            target_sf,
            output,
            budget,
            max_sweeps,
            critical_rule,
            no_resettle,
            design_out,
        } => {
            let kind = match kind {
                KindArg::One => AttackKind::MinimalDeviation,
                KindArg::Two => AttackKind::MinimalPlyCount,
            };
            let rule = match critical_rule {
                RuleArg::ForceSensitive => CriticalRule::ForceSensitive,
                RuleArg::MinimumGroup => CriticalRule::MinimumGroup,
            };
            let opts = AttackOpts { kind, budget: *budget, max_sweeps: *max_sweeps, rule, resettle: !no_resettle };
            attack(cli, design, target_sf, &opts, output, design_out.as_deref())
        }
        Command::Detect { original, attacked, output } => detect(cli, original, attacked, output),
        Command::ExportLadder { report, output } => export_ladder(report, output),
    }
}

fn new_report(cli: &Cli, command: &str) -> RunReport {
    let mut r = RunReport::new(command, cli.gap_threshold);
    if cli.timestamp {
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        r.timestamp = Some(format!("unix:{secs}"));
    }
    r
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn emit(cli: &Cli, report: &RunReport, output: &Path) -> Result<(), Failure> {
    write_file(output, &report.to_json())?;
    if !cli.quiet {
        print!("{}", report.render_text());
    }
    Ok(())
}

fn analyze(cli: &Cli, path: &Path, output: &Path) -> Result<(), Failure> {
    let design = Design::load(path)?;
    let lam = design.laminate()?;
    let ladder = simulate_progressive_failure(&lam, &design.load)?;
    let mut report = new_report(cli, "analyze");
    report.inputs.push(InputEcho::new("design", &design));
    report.ladders.push(LadderReport::new("original", ladder, cli.gap_threshold));
    emit(cli, &report, output)
}

struct AttackOpts {
    kind: AttackKind,
    budget: usize,
    max_sweeps: usize,
    rule: CriticalRule,
    resettle: bool,
}

fn attack(
    cli: &Cli,
    path: &Path,
    targets: &[f64],
    opts: &AttackOpts,
    output: &Path,
    design_out: Option<&Path>,
) -> Result<(), Failure> {
    let design = Design::load(path)?;
    let targets = if targets.is_empty() { design.safety.target_sf.clone() } else { targets.to_vec() };
    if targets.is_empty() {
        return Err(Failure::Usage("no --target-sf given and the design lists none".into()));
    }
    let design_sf = design.safety.design_sf;
    for t in &targets {
        if !(t.is_finite() && *t > 0.0 && *t < design_sf) {
            return Err(Failure::Usage(format!("--target-sf {t} must lie in (0, design_sf = {design_sf})")));
        }
    }
    let lam = design.laminate()?;
    let ladder = simulate_progressive_failure(&lam, &design.load)?;

    let specs: Vec<AttackSpec> = targets
        .iter()
        .map(|&t| AttackSpec {
            max_evaluations: opts.budget,
            max_sweeps: opts.max_sweeps,
            certified_force: design.safety.certified_multiplier,
            critical_rule: opts.rule,
            resettle: opts.resettle,
            ..AttackSpec::new(design_sf, t, design.load)
        })
        .collect();
    // the searches are independent, so run one thread per target
    let outcomes: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = specs.iter().map(|spec| s.spawn(|| run_attack(opts.kind, &lam, spec))).collect();
        handles.into_iter().map(|h| h.join().expect("attack thread panicked")).collect()
    });

    let mut report = new_report(cli, "attack");
    report.inputs.push(InputEcho::new("design", &design));
    report.ladders.push(LadderReport::new("original", ladder, cli.gap_threshold));
    let mut failure = None;
    for (spec, outcome) in specs.iter().zip(outcomes) {
        let label = format!("type{}-sf{}", opts.kind.number(), spec.target_sf);
        let (status, error, result) = match outcome {
            Ok(r) => (r.status, None, Some(r)),
            Err(AttackError::InvalidSpec(m)) => return Err(Failure::Usage(m)),
            Err(e) => {
                let msg = format!("{label}: {e}");
                failure.get_or_insert_with(|| Failure::Numerical(msg.clone()));
                let status = match &e {
                    AttackError::BudgetExhausted(_) => AttackStatus::BudgetExhausted,
                    _ => AttackStatus::NoSolution,
                };
                (status, Some(msg), e.best_found().cloned())
            }
        };
        if let (Some(dir), Some(r)) = (design_out, &result) {
            let tampered = design.with_angles(&format!("{}-{label}", design.name), &r.new_angles)?;
            write_file(&dir.join(format!("{}-{label}.toml", design.name)), &tampered.to_toml())?;
        }
        report.attacks.push(AttackReport {
            label,
            kind: opts.kind,
            target_sf: spec.target_sf,
            status,
            error,
            ladder_mode: result.as_ref().map(|r| classify_failure_mode(&r.ladder, cli.gap_threshold)),
            result,
        });
    }
    emit(cli, &report, output)?;
    failure.map_or(Ok(()), Err)
}

fn detect(cli: &Cli, original: &Path, attacked: &Path, output: &Path) -> Result<(), Failure> {
    let a = Design::load(original)?;
    let b = Design::load(attacked)?;
    let (la, lb) = (a.laminate()?, b.laminate()?);
    if !la.same_structure(&lb) {
        return Err(Failure::Usage(
            "designs differ in more than ply orientation (ply count, thickness or material)".into(),
        ));
    }
    let det = detectability(&la, &lb)?;
    let mut report = new_report(cli, "detect");
    report.inputs.push(InputEcho::new("original", &a));
    report.inputs.push(InputEcho::new("attacked", &b));
    report.detectability = Some(det);
    emit(cli, &report, output)
}

fn export_ladder(path: &Path, output: &Path) -> Result<(), Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    if text.trim().is_empty() {
        return Err(Failure::Io(format!("{} is empty", path.display())));
    }
    let report = RunReport::from_json(&text)
        .map_err(|e| Failure::Usage(format!("{} is not a valid report: {e}", path.display())))?;
    let csv = ladders_to_csv(&report).map_err(|e| Failure::Io(e.to_string()))?;
    write_file(output, &csv)
}
