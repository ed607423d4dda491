//! Argument parsing and the four subcommands.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use ort_core::channels::DephasingKernel;
use ort_core::roof::RoofOptions;
use ort_core::spec::{set_param, StateSpec};
use ort_core::Error;

use crate::eval::{evaluate, Evaluation, Measure};
use crate::figures;
use crate::opts::{parse_roof_options, SweepAxis};
use crate::table::{Cell, Table};
use crate::verify;

#[derive(Parser, Debug)]
#[command(name = "ort", version, about = "Nonclassicality and metrological power of single-mode states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one state.
    Compute {
        #[command(flatten)]
        state: StateArgs,
        /// Write the numeric roof decomposition (weight, x, theta rows) here.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Evaluate a state over a range of one parameter.
    Sweep {
        #[command(flatten)]
        state: StateArgs,
        /// param=from:to:steps
        #[arg(long)]
        sweep: String,
    },
    /// Write a figure dataset (`list` prints the ids).
    Figure {
        id: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "")]
        opts: String,
    },
    /// Run the verification battery.
    Verify {
        /// Comma-separated check ids or groups.
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value_t = verify::DEFAULT_SEED)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct StateArgs {
    /// State spec, e.g. `mix2fock:n=0,p=0.5,f=0`.
    #[arg(long)]
    state: String,
    /// Dephasing kernel applied first, e.g. `lorentzian:gt=0.3`.
    #[arg(long)]
    kernel: Option<String>,
    /// n, m or both.
    #[arg(long, default_value = "both")]
    measure: String,
    /// Roof solver options: gx, gtheta, refine, gap_tol, cap.
    #[arg(long, default_value = "")]
    opts: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Numeric(String),
    Verify(Vec<String>),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Verify(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::InvalidParameter(_)
            | Error::InvalidRecipeParameter(_)
            | Error::PreconditionViolation(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Numeric(m) => eprintln!("numeric failure: {m}"),
                Failure::Verify(ids) => eprintln!("failed checks: {}", ids.join(", ")),
            }
            f.code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Compute { state, dump } => {
            let setup = Setup::new(&state)?;
            let ev = evaluate(&setup.spec, setup.kernel.as_ref(), setup.measure, &setup.opts)?;
            if let (Some(path), Some(sol)) = (dump, &ev.roof) {
                write_out(Some(&path), &sol.to_csv())?;
            }
            let mut table = setup.table(&[]);
            table.push(row(&ev));
            write_out(state.out.as_ref(), &table.to_csv())
        }
        Command::Sweep { state, sweep } => {
            let setup = Setup::new(&state)?;
            let axis: SweepAxis = sweep.parse()?;
            let specs = axis
                .points()
                .into_iter()
                .map(|x| Ok((x, set_param(&state.state, &axis.param, x)?.parse::<StateSpec>()?)))
                .collect::<Result<Vec<_>, Error>>()?;
            let evals = specs
                .par_iter()
                .map(|(_, s)| evaluate(s, setup.kernel.as_ref(), setup.measure, &setup.opts))
                .collect::<Result<Vec<_>, Error>>()?;
            let mut table = setup.table(&[axis.param.as_str()]);
            for ((x, _), ev) in specs.iter().zip(&evals) {
                let mut r = vec![Cell::Num(*x)];
                r.extend(row(ev));
                table.push(r);
            }
            write_out(state.out.as_ref(), &table.to_csv())
        }
        Command::Figure { id, out, opts } => {
            if id == "list" {
                let text: String =
                    figures::FIGURES.iter().map(|(id, what)| format!("{id}\t{what}\n")).collect();
                return write_out(out.as_ref(), &text);
            }
            let opts = parse_roof_options(&opts)?;
            let table = figures::figure(&id, &opts)?;
            write_out(out.as_ref(), &table.to_csv())
        }
        Command::Verify { only, seed } => {
            let selection = verify::select(only.as_deref())?;
            let mut failed = Vec::new();
            for check in selection {
                let outcome = verify::run_check(check, seed);
                println!("{}", outcome.line());
                if !outcome.passed {
                    failed.push(check.id.to_string());
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(Failure::Verify(failed))
            }
        }
    }
}

struct Setup {
    spec: StateSpec,
    kernel: Option<DephasingKernel>,
    measure: Measure,
    opts: RoofOptions,
    notes: Vec<String>,
}

impl Setup {
    fn new(a: &StateArgs) -> Result<Self, Failure> {
        let spec: StateSpec = a.state.parse()?;
        let kernel = a.kernel.as_deref().map(str::parse::<DephasingKernel>).transpose()?;
        let mut notes = vec![format!("state={}", a.state.trim())];
        if let Some(k) = &kernel {
            notes.push(format!("kernel={k}"));
        }
        Ok(Self {
            spec,
            kernel,
            measure: a.measure.parse()?,
            opts: parse_roof_options(&a.opts)?,
            notes,
        })
    }

    fn table(&self, leading: &[&str]) -> Table {
        let mut cols = leading.to_vec();
        cols.extend(COLUMNS);
        let mut t = Table::new(&cols);
        t.params = self.notes.clone();
        t
    }
}

const COLUMNS: [&str; 9] = ["N", "branch", "route", "M", "mu_star", "witness", "q_part", "mean_n", "a2_abs"];

fn row(ev: &Evaluation) -> Vec<Cell> {
    vec![
        ev.n.into(),
        ev.branch.map_or("none", |b| b.name()).into(),
        ev.route.name().into(),
        ev.m.into(),
        ev.mu_star.into(),
        ev.witness.into(),
        ev.q_part.into(),
        ev.mean_n.into(),
        ev.a2_abs.into(),
    ]
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
