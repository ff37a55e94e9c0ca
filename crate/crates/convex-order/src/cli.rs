//! Command-line frontend.
//!
//! Subcommands mirror the library surface one for one:
//!
//! ```text
//! convex-order w2 A.json B.json [--plan out.json]
//! convex-order check A.json B.json [--tol T] [--cert out.json]
//! convex-order gap A.json B.json R.json
//! convex-order adversarial A.json B.json [--rho out.json]
//! convex-order verify A.json B.json [--n-rho N] [--seed S]
//! convex-order gen --mode ordered|unordered|rho --dim D --atoms M --seed S --out prefix
//! ```
//!
//! Exit codes: `0` success / ordered / inequality holds, `1` not ordered or
//! violation found (still a successful computation), `2` input error, `3`
//! numerical inconsistency. All numeric output is printed with 12 significant
//! digits so byte-identical golden runs are possible.
//!
//! File formats: measures as described in [`crate::measure`]; martingale
//! plans as `{"triples": [[i, j, mass], ...]}`; witnesses as `{"anchors":
//! [...], "values": [...], "slopes": [...], "gap": g}`.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::genlab::{self, GenConfig};
use crate::measure::{Coupling, DiscreteMeasure};
use crate::order::{self, OrderVerdict, WitnessFunction};
use crate::theorem::{self, GapReport};
use crate::transport;
use crate::{Error, Result};

/// Process status of a CLI run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    /// success / Ordered / inequality holds
    Success,
    /// NotOrdered or violation found (still a successful computation)
    Violation,
    /// malformed files or flags
    InputError,
    /// tolerance-band conflict between the two LP routes
    Inconsistency,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Violation => 1,
            ExitStatus::InputError => 2,
            ExitStatus::Inconsistency => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "convex-order",
    about = "Convex order between discrete measures, with certificates and W2 cross-checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact squared 2-Wasserstein distance between two measures
    W2 {
        a: PathBuf,
        b: PathBuf,
        /// Write the optimal plan as sparse triples
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Decide the convex order A ≤c B with a certificate either way
    Check {
        a: PathBuf,
        b: PathBuf,
        /// Witness-gap tolerance for the verdict
        #[arg(long, default_value_t = order::DEFAULT_TOL)]
        tol: f64,
        /// Write the certificate (martingale plan or witness) here
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Evaluate the W2 inequality for the triple (A, B, R)
    Gap { a: PathBuf, b: PathBuf, r: PathBuf },
    /// Push A through the witness subgradients to build the violating rho
    Adversarial {
        a: PathBuf,
        b: PathBuf,
        /// Write the adversarial measure here
        #[arg(long)]
        rho: Option<PathBuf>,
    },
    /// Full equivalence run: forward rho sampling or reverse construction
    Verify {
        a: PathBuf,
        b: PathBuf,
        /// Number of sampled rho trials when ordered
        #[arg(long = "n-rho", default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        n_rho: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate seeded instances as measure files
    Gen {
        #[arg(long)]
        mode: Mode,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        atoms: usize,
        #[arg(long)]
        seed: u64,
        /// Output prefix: writes <prefix>_mu.json / _nu.json, or _rho.json
        #[arg(long)]
        out: String,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Ordered,
    Unordered,
    Rho,
}

/// Entry point: parse `argv` (including the program name) and dispatch.
pub fn run<I, T>(argv: I) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitStatus::Success;
            }
            let text = e.to_string();
            eprintln!("{}", text.lines().next().unwrap_or("invalid arguments"));
            return ExitStatus::InputError;
        }
    };
    match dispatch(cli.command) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("{e}");
            match e {
                Error::NumericalInconsistency(_) => ExitStatus::Inconsistency,
                _ => ExitStatus::InputError,
            }
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitStatus> {
    match cmd {
        Command::W2 { a, b, plan } => {
            let mu = load(&a)?;
            let nu = load(&b)?;
            let result = transport::solve_w2(&mu, &nu)?;
            if let Some(path) = plan {
                write_file(&path, &plan_json(&result.plan))?;
            }
            println!("{}", fmt_sig(result.cost));
            Ok(ExitStatus::Success)
        }
        Command::Check { a, b, tol, cert } => {
            let mu = load(&a)?;
            let nu = load(&b)?;
            match order::check_with_tol(&mu, &nu, tol)? {
                OrderVerdict::Ordered(c) => {
                    if let Some(path) = cert {
                        write_file(&path, &plan_json(c.plan()))?;
                    }
                    println!("ordered");
                    Ok(ExitStatus::Success)
                }
                OrderVerdict::NotOrdered(w) => {
                    if let Some(path) = cert {
                        write_file(&path, &witness_json(&w))?;
                    }
                    println!("not ordered (gap = {})", fmt_sig(w.gap()));
                    Ok(ExitStatus::Violation)
                }
            }
        }
        Command::Gap { a, b, r } => {
            let report = theorem::inequality_gap(&load(&a)?, &load(&b)?, &load(&r)?)?;
            println!("{}", gap_json(&report));
            Ok(if report.slack >= -theorem::SLACK_TOL {
                ExitStatus::Success
            } else {
                ExitStatus::Violation
            })
        }
        Command::Adversarial { a, b, rho } => {
            let mu = load(&a)?;
            let nu = load(&b)?;
            match order::check(&mu, &nu)? {
                OrderVerdict::Ordered(_) => {
                    println!("ordered; no adversarial rho exists");
                    Ok(ExitStatus::Success)
                }
                OrderVerdict::NotOrdered(w) => {
                    let (adversary, report) = theorem::adversarial_rho(&mu, &nu, &w)?;
                    if let Some(path) = rho {
                        write_file(&path, &adversary.to_json_string())?;
                    }
                    println!("gap = {}", fmt_sig(w.gap()));
                    println!("{}", gap_json(&report));
                    Ok(ExitStatus::Violation)
                }
            }
        }
        Command::Verify { a, b, n_rho, seed } => {
            let report = theorem::equivalence_report(&load(&a)?, &load(&b)?, n_rho as usize, seed)?;
            if report.ordered {
                println!("ordered = true");
                println!("trials = {}", report.trials.len());
                println!("min_slack = {}", fmt_sig(report.min_slack()));
                println!("forward_checks = pass");
                Ok(ExitStatus::Success)
            } else {
                let adv = report
                    .adversarial
                    .expect("unordered report always carries the reverse record");
                println!("ordered = false");
                println!("witness_gap = {}", fmt_sig(adv.witness_gap));
                println!("adversarial_slack = {}", fmt_sig(adv.slack));
                println!("required_bound = {}", fmt_sig(adv.required_bound));
                println!("reverse_check = pass");
                Ok(ExitStatus::Violation)
            }
        }
        Command::Gen {
            mode,
            dim,
            atoms,
            seed,
            out,
        } => {
            let cfg = GenConfig {
                seed,
                dimension: dim,
                atoms,
                coordinate_scale: 1.0,
                spread_children: 3,
            };
            match mode {
                Mode::Ordered => {
                    let (mu, nu) = genlab::gen_ordered_pair(&cfg);
                    write_measure(&format!("{out}_mu.json"), &mu)?;
                    write_measure(&format!("{out}_nu.json"), &nu)?;
                }
                Mode::Unordered => {
                    let (mu, nu) = genlab::gen_unordered_pair(&cfg);
                    write_measure(&format!("{out}_mu.json"), &mu)?;
                    write_measure(&format!("{out}_nu.json"), &nu)?;
                }
                Mode::Rho => {
                    let rho = genlab::gen_rho(&cfg);
                    write_measure(&format!("{out}_rho.json"), &rho)?;
                }
            }
            Ok(ExitStatus::Success)
        }
    }
}

fn load(path: &Path) -> Result<DiscreteMeasure> {
    let text = fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    DiscreteMeasure::from_json_str(&text)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, format!("{contents}\n"))?;
    Ok(())
}

fn write_measure(path: &str, m: &DiscreteMeasure) -> Result<()> {
    write_file(Path::new(path), &m.to_json_string())?;
    println!("wrote {path}");
    Ok(())
}

#[derive(Serialize)]
struct PlanFile {
    triples: Vec<(usize, usize, f64)>,
}

fn plan_json(plan: &Coupling) -> String {
    let file = PlanFile {
        triples: plan.support().collect(),
    };
    serde_json::to_string(&file).expect("plan serialization cannot fail")
}

#[derive(Serialize)]
struct WitnessFile {
    anchors: Vec<Vec<f64>>,
    values: Vec<f64>,
    slopes: Vec<Vec<f64>>,
    gap: f64,
}

fn witness_json(w: &WitnessFunction) -> String {
    let file = WitnessFile {
        anchors: w.anchors().iter().map(|p| p.coords().to_vec()).collect(),
        values: w.values().to_vec(),
        slopes: w.slopes().iter().map(|p| p.coords().to_vec()).collect(),
        gap: w.gap(),
    };
    serde_json::to_string(&file).expect("witness serialization cannot fail")
}

fn gap_json(r: &GapReport) -> String {
    format!(
        "{{\"w2_nu_rho\": {}, \"w2_mu_rho\": {}, \"moment_diff\": {}, \"slack\": {}}}",
        fmt_sig(r.w2_nu_rho),
        fmt_sig(r.w2_mu_rho),
        fmt_sig(r.moment_diff),
        fmt_sig(r.slack)
    )
}

/// Fixed 12-significant-digit decimal formatting, scientific beyond
/// [1e−4, 1e15). Keeps golden-file comparison byte-stable.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000000".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let mut mag = x.abs().log10().floor() as i32;
    if !(-4..15).contains(&mag) {
        return format!("{x:.11e}");
    }
    loop {
        let decimals = (11 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // Rounding may carry into one more leading digit; reformat if so.
        let parsed: f64 = s.parse().expect("formatted float parses back");
        let new_mag = if parsed == 0.0 {
            mag
        } else {
            parsed.abs().log10().floor() as i32
        };
        if new_mag > mag && decimals > 0 {
            mag = new_mag;
            continue;
        }
        return s;
    }
}
