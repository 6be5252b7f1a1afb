use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cellular::format::{
    parse_chain_map, parse_complex, ComplexFile, DecompositionFile, ExtensionFile, HomFile, VerdictFile,
};
use cellular::lattice::{is_acyclic_over, is_cellular, Verdict};
use cellular::oracle::{cross_check, random_extension, AgreementEntry, SizeGuard};
use cellular::{ops, random, ChainComplex, Error, RingSpec};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const HOLDS: u8 = 0;
const FAILS: u8 = 1;
const USAGE: u8 = 2;
const INVALID: u8 = 3;
const GUARD: u8 = 4;

/// Rand with --allow-units gives up after this many rejected draws.
const REJECTION_BUDGET: usize = 10_000;

#[derive(Parser, Debug)]
#[command(
    name = "cellular",
    version,
    about = "Decompose perfect complexes over Z/p² and F_p[X]/(X²)"
)]
struct Cli {
    /// Ring, "zpsq:<p>" or "dual:<p>"; must match every input file.
    #[arg(long, global = true)]
    ring: Option<RingSpec>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Largest search space the brute-force oracle will enumerate.
    #[arg(long, global = true, default_value_t = SizeGuard::default().max_search_space)]
    guard: u128,

    /// Load complexes even if d∘d ≠ 0 (for diagnosis only).
    #[arg(long, global = true)]
    force: bool,

    #[arg(long, global = true, value_enum, default_value_t = Output::Compact)]
    output: Output,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Compact,
    Pretty,
    Explain,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a complex file.
    Validate {
        x: PathBuf,
    },
    /// Homology modules, lowest degree first.
    Homology {
        x: PathBuf,
    },
    /// Minimal model and split-off disks.
    Minimize {
        x: PathBuf,
    },
    /// Interval and disk multiplicities.
    Decompose {
        x: PathBuf,
    },
    /// Decide X ≫ A; exit 0 if it holds, 1 if not.
    Cell {
        x: PathBuf,
        a: PathBuf,
    },
    /// Decide X > A; exit 0 if it holds, 1 if not.
    Acyclic {
        x: PathBuf,
        a: PathBuf,
    },
    /// Mapping cone of a chain-map file.
    Cone {
        f: PathBuf,
    },
    Sum {
        x: PathBuf,
        y: PathBuf,
    },
    Tensor {
        x: PathBuf,
        y: PathBuf,
    },
    Hom {
        x: PathBuf,
        y: PathBuf,
    },
    Shift {
        x: PathBuf,
        n: usize,
    },
    /// Emit a standard complex.
    Gen {
        #[command(subcommand)]
        shape: Shape,
    },
    /// Seeded random complex.
    Rand {
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[arg(long, default_value_t = 3)]
        max_rank: usize,
        /// Sample entries from all of R and reject until d∘d = 0.
        #[arg(long)]
        allow_units: bool,
    },
    /// Compare the lattice verdict for X ≫ A with brute-force enumeration.
    Crosscheck {
        x: PathBuf,
        a: PathBuf,
    },
    /// Random extension X → Y → Z.
    Extension {
        x: PathBuf,
        z: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum Shape {
    Interval { i: usize, j: usize },
    Sphere { n: usize },
    Disk { n: usize },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::RingMismatch(..) | Error::Domain(_) => USAGE,
            Error::Guard { .. } => GUARD,
            Error::Shape(_)
            | Error::InvalidComplex { .. }
            | Error::InvalidMap { .. }
            | Error::NotMinimal { .. }
            | Error::Parse(_) => INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// What a command produces: a JSON value, a human rendering, and an exit code.
struct Report {
    json: Value,
    explain: String,
    code: u8,
}

impl Report {
    fn new(json: Value) -> Self {
        let explain = serde_json::to_string_pretty(&json).expect("serializable");
        Report {
            json,
            explain,
            code: HOLDS,
        }
    }

    fn complex(x: &ChainComplex) -> Self {
        Report::new(to_value(ComplexFile::from(x)))
    }

    fn verdict(v: &Verdict) -> Self {
        Report {
            json: to_value(VerdictFile::from(v)),
            explain: format!("{}: {}", if v.holds { "holds" } else { "does not hold" }, v.explain()),
            code: if v.holds { HOLDS } else { FAILS },
        }
    }
}

fn to_value<T: serde::Serialize>(t: T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

struct Context {
    ring: Option<RingSpec>,
    force: bool,
}

impl Context {
    fn read(&self, path: &Path) -> Result<String, Failure> {
        std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
    }

    fn check_ring(&self, found: RingSpec, path: &Path) -> Result<(), Failure> {
        match self.ring {
            Some(r) if r != found => Err(Failure::usage(format!(
                "{}: file ring {found} disagrees with --ring {r}",
                path.display()
            ))),
            _ => Ok(()),
        }
    }

    fn complex(&self, path: &Path) -> Result<ChainComplex, Failure> {
        let x = parse_complex(&self.read(path)?, self.force).map_err(|e| Failure {
            message: format!("{}: {e}", path.display()),
            ..e.into()
        })?;
        self.check_ring(x.ring(), path)?;
        Ok(x)
    }

    fn pair(&self, x: &Path, y: &Path) -> Result<(ChainComplex, ChainComplex), Failure> {
        Ok((self.complex(x)?, self.complex(y)?))
    }

    fn ring_for_generation(&self) -> Result<RingSpec, Failure> {
        self.ring
            .ok_or_else(|| Failure::usage("--ring is required to generate a complex"))
    }
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let cx = Context {
        ring: cli.ring,
        force: cli.force,
    };
    let guard = SizeGuard::new(cli.guard);
    Ok(match &cli.command {
        Command::Validate { x } => {
            let c = cx.complex(x)?;
            c.validate()?;
            let mut report = Report::new(json!({
                "valid": true,
                "ring": c.ring().to_string(),
                "ranks": c.ranks(),
                "minimal": c.is_minimal(),
            }));
            report.explain = format!(
                "valid complex over {} with ranks {:?}{}",
                c.ring(),
                c.ranks(),
                if c.is_minimal() { ", minimal" } else { "" }
            );
            report
        }
        Command::Homology { x } => {
            let h = cx.complex(x)?.homology()?;
            let mut report = Report::new(to_value(&h));
            report.explain = h.iter().enumerate().fold(String::new(), |mut s, (n, m)| {
                let _ = writeln!(s, "H_{n} = {m}");
                s
            });
            report
        }
        Command::Minimize { x } => {
            let m = cellular::minimize(&cx.complex(x)?)?;
            let mut disks = std::collections::BTreeMap::<usize, usize>::new();
            for &n in &m.disks {
                *disks.entry(n).or_default() += 1;
            }
            let disks: Vec<[usize; 2]> = disks.into_iter().map(|(n, k)| [n, k]).collect();
            Report::new(json!({ "minimal": ComplexFile::from(&m.minimal), "disks": disks }))
        }
        Command::Decompose { x } => {
            let d = cellular::decompose(&cx.complex(x)?)?;
            let mut report = Report::new(to_value(DecompositionFile::from(&d)));
            let mut parts: Vec<String> = d
                .interval_counts()
                .into_iter()
                .map(|(iv, k)| format!("{k}·Σ^{} E_{}", iv.i, iv.j))
                .collect();
            parts.extend(d.disk_counts().into_iter().map(|(n, k)| format!("{k}·D^{n}")));
            report.explain = if parts.is_empty() {
                "0".into()
            } else {
                parts.join(" ⊕ ")
            };
            report
        }
        Command::Cell { x, a } => {
            let (x, a) = cx.pair(x, a)?;
            Report::verdict(&is_cellular(&x, &a)?)
        }
        Command::Acyclic { x, a } => {
            let (x, a) = cx.pair(x, a)?;
            Report::verdict(&is_acyclic_over(&x, &a)?)
        }
        Command::Cone { f } => {
            let map = parse_chain_map(&cx.read(f)?, cx.force).map_err(|e| Failure {
                message: format!("{}: {e}", f.display()),
                ..e.into()
            })?;
            cx.check_ring(map.ring(), f)?;
            Report::complex(&ops::cone(&map)?)
        }
        Command::Sum { x, y } => {
            let (x, y) = cx.pair(x, y)?;
            Report::complex(&ops::direct_sum(&x, &y)?)
        }
        Command::Tensor { x, y } => {
            let (x, y) = cx.pair(x, y)?;
            Report::complex(&ops::tensor(&x, &y)?)
        }
        Command::Hom { x, y } => {
            let (x, y) = cx.pair(x, y)?;
            let h = ops::hom_complex(&x, &y)?;
            let mut report = Report::new(to_value(HomFile::from(&h)));
            report.explain = format!(
                "chain maps: {}\nboundaries into degree 0: {}\ndegrees ≥ 1 ranks: {:?}",
                h.degree0,
                h.boundary_image,
                h.upper.ranks()
            );
            report
        }
        Command::Shift { x, n } => Report::complex(&ops::shift(&cx.complex(x)?, *n)),
        Command::Gen { shape } => {
            let spec = cx.ring_for_generation()?;
            Report::complex(&match *shape {
                Shape::Interval { i, j } => ChainComplex::interval(spec, i, j),
                Shape::Sphere { n } => ChainComplex::sphere(spec, n),
                Shape::Disk { n } => ChainComplex::disk(spec, n)?,
            })
        }
        Command::Rand {
            max_degree,
            max_rank,
            allow_units,
        } => {
            let spec = cx.ring_for_generation()?;
            let mut rng = random::rng(cli.seed);
            Report::complex(&if *allow_units {
                random::unrestricted_complex(spec, *max_degree, *max_rank, REJECTION_BUDGET, &mut rng)?
            } else {
                random::minimal_complex(spec, *max_degree, *max_rank, &mut rng)
            })
        }
        Command::Crosscheck { x: px, a: pa } => {
            let (x, a) = cx.pair(px, pa)?;
            let check = cross_check(&x, &a, guard)?;
            let entry = AgreementEntry::new(
                px.display().to_string(),
                pa.display().to_string(),
                &check,
                Some(cli.seed),
            );
            let mut report = Report::new(to_value(vec![entry]));
            report.explain = format!(
                "lattice: {}, oracle: {} ({:?}, shift {}): {}",
                check.lattice_verdict,
                check.oracle_verdict,
                check.method,
                check.shift,
                if check.agree { "agree" } else { "MISMATCH" }
            );
            report.code = if check.agree { HOLDS } else { FAILS };
            report
        }
        Command::Extension { x, z } => {
            let (x, z) = cx.pair(x, z)?;
            Report::new(to_value(ExtensionFile::from(&random_extension(&x, &z, cli.seed)?)))
        }
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { HOLDS });
        }
    };
    match run(&cli) {
        Ok(report) => {
            let text = match cli.output {
                Output::Compact => serde_json::to_string(&report.json).expect("serializable"),
                Output::Pretty => serde_json::to_string_pretty(&report.json).expect("serializable"),
                Output::Explain => report.explain.trim_end().to_string(),
            };
            println!("{text}");
            ExitCode::from(report.code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
