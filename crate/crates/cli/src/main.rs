use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use permcat::deligne::{compose_diagrams, PartitionDiagram};
use permcat::hsmod::{hs_scalar_on, Side};
use permcat::kron::{self, LabelOffsets, MultiplicityParams, XSpec};
use permcat::schur::tensor_interpolated;
use permcat::serialize::{blockmap_to_json, morphism_from_json, morphism_to_json};
use permcat::{compose_interpolated, specialize_morphism, suites, CosetMatrix, Error, ObjectLabel, Rational};

#[derive(Parser)]
#[command(name = "permcat", version, about = "Interpolated permutation-module morphisms")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// f ∘ g
    Compose(Pair),
    /// f ⊗ g, written as a block map
    Tensor(Pair),
    /// Evaluate at an integer point
    Specialize {
        #[arg(long)]
        mu: String,
        #[arg(short = 'f')]
        f: PathBuf,
        #[arg(short = 'o')]
        out: Option<PathBuf>,
    },
    /// Scalar by which a basis element acts on the highest weight vector
    Hs {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value = "left")]
        side: String,
    },
    /// Partition diagram operations
    Deligne {
        #[command(subcommand)]
        cmd: DeligneCmd,
    },
    /// Run a verification suite
    Verify {
        suite: String,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Kronecker coefficient of three partitions
    Kron {
        #[arg(long)]
        triple: String,
    },
    /// Dimension sequence along λ = mμ0 as CSV
    Stability {
        #[arg(long)]
        mu: String,
        #[arg(long, default_value = "unit")]
        x: String,
        #[arg(long, default_value_t = 6)]
        mmax: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "")]
        sigma_alpha: String,
        #[arg(long, default_value = "")]
        tau_alpha: String,
        #[arg(long, default_value = "")]
        sigma_beta: String,
        #[arg(long, default_value = "")]
        tau_beta: String,
    },
    /// Idempotent classes in the two-row endomorphism algebra
    Krull {
        #[arg(long, allow_hyphen_values = true)]
        l1: String,
        #[arg(long, allow_hyphen_values = true)]
        l2: String,
    },
}

#[derive(Args)]
struct Pair {
    #[arg(short = 'f')]
    f: PathBuf,
    #[arg(short = 'g')]
    g: PathBuf,
    #[arg(short = 'o')]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum DeligneCmd {
    /// Compose two partition diagrams, d1 on top of d2
    Compose {
        #[arg(long)]
        d1: String,
        #[arg(long)]
        d2: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("ERR:2:{}", msg.lines().next().unwrap_or("bad arguments"));
            return ExitCode::from(2);
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = e.exit_code();
            eprintln!("ERR:{code}:{e}");
            ExitCode::from(code as u8)
        }
    }
}

fn read(p: &Path) -> Result<String, Error> {
    fs::read_to_string(p).map_err(|e| Error::Input(format!("{}: {e}", p.display())))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn ints(s: &str) -> Result<Vec<i64>, Error> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| Error::Input(format!("not an integer: {t}"))))
        .collect()
}

fn partition(s: &str) -> Result<Vec<usize>, Error> {
    ints(s)?
        .into_iter()
        .map(|v| usize::try_from(v).map_err(|_| Error::Input(format!("negative part in {s}"))))
        .collect()
}

fn rational(s: &str) -> Result<Rational, Error> {
    s.trim().parse::<Rational>().map_err(|_| Error::Input(format!("not a rational number: {s}")))
}

fn run(cmd: Cmd) -> Result<(), Error> {
    match cmd {
        Cmd::Compose(p) => {
            let f = morphism_from_json(&read(&p.f)?)?;
            let g = morphism_from_json(&read(&p.g)?)?;
            emit(&p.out, &morphism_to_json(&compose_interpolated(&f, &g)?))
        }
        Cmd::Tensor(p) => {
            let f = morphism_from_json(&read(&p.f)?)?;
            let g = morphism_from_json(&read(&p.g)?)?;
            emit(&p.out, &blockmap_to_json(&tensor_interpolated(&f, &g)?))
        }
        Cmd::Specialize { mu, f, out } => {
            let f = morphism_from_json(&read(&f)?)?;
            match specialize_morphism(&f, &ints(&mu)?)? {
                Some(m) => emit(&out, &morphism_to_json(&m)),
                // An endpoint vanished; only the zero map remains.
                None => emit(&out, "null\n"),
            }
        }
        Cmd::Hs { alpha, matrix, side } => {
            let q = CosetMatrix::parse(&matrix)?;
            let a = ObjectLabel::parse(q.l(), &alpha)?;
            let side = match side.as_str() {
                "left" => Side::Left,
                "right" => Side::Right,
                s => return Err(Error::Input(format!("side must be left or right, got {s}"))),
            };
            println!("{}", hs_scalar_on(&q, &a, side)?);
            Ok(())
        }
        Cmd::Deligne { cmd: DeligneCmd::Compose { d1, d2 } } => {
            let a = PartitionDiagram::parse(&d1)?;
            let b = PartitionDiagram::parse(&d2)?;
            let (r, d) = a.compose(&b)?;
            println!("t^{r}");
            println!("{d}");
            // Cross-check against the linear extension.
            let combo = compose_diagrams(&a, &b)?;
            if combo.terms().len() != 1 || !combo.terms().contains_key(&d) {
                return Err(Error::Verification(format!("linear composition disagrees: {combo}")));
            }
            Ok(())
        }
        Cmd::Verify { suite, samples, seed } => {
            let seed = match (suite.as_str(), seed) {
                ("genfun", s) => s.unwrap_or(0),
                (_, Some(s)) => s,
                (_, None) => return Err(Error::Input(format!("suite {suite} is randomized; --seed is required"))),
            };
            let out = suites::run_suite(&suite, samples, seed)?;
            print!("{}", out.report);
            if out.pass {
                Ok(())
            } else {
                Err(Error::Verification(format!("suite {suite} failed; witnesses above")))
            }
        }
        Cmd::Kron { triple } => {
            let parts: Vec<&str> = triple.split(';').collect();
            if parts.len() != 3 {
                return Err(Error::Input("expected three partitions separated by ';'".into()));
            }
            let (a, b, c) = (partition(parts[0])?, partition(parts[1])?, partition(parts[2])?);
            println!("{}", kron::kronecker(&a, &b, &c)?);
            Ok(())
        }
        Cmd::Stability { mu, x, mmax, seed, sigma_alpha, tau_alpha, sigma_beta, tau_beta } => {
            let mu0 = partition(&mu)?;
            let x = XSpec::parse(&x)?;
            let offsets = LabelOffsets {
                sigma_alpha: ints(&sigma_alpha)?,
                tau_alpha: ints(&tau_alpha)?,
                sigma_beta: ints(&sigma_beta)?,
                tau_beta: ints(&tau_beta)?,
            };
            let params = MultiplicityParams::seeded(mu0.len(), seed);
            let report = kron::stability_check(&mu0, &offsets, &x, 1..=mmax.max(1), &params)?;
            print!("{}", report.to_csv());
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            Ok(())
        }
        Cmd::Krull { l1, l2 } => {
            let report = kron::krull_schmidt_report(rational(&l1)?, rational(&l2)?)?;
            print!("{}", report.text);
            if report.verified() {
                Ok(())
            } else {
                Err(Error::Verification("Krull-Schmidt witness did not verify".into()))
            }
        }
    }
}
