//! The `dms` command line. Exit codes: 0 success, 2 validation failure,
//! 3 unreadable input, 4 unmet precondition.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use dms_core::field::{critical_cells, validate_field, validate_function};
use dms_core::homology::betti_mod2;
use dms_core::splitter::decompose;
use dms_core::surgery::compose;
use dms_core::{Complex, MorseFunction, VectorField};

use crate::error::ToolError;
use crate::export::{to_dot, to_off};
use crate::fixtures::{build, FixtureKind, FixtureSpec};
use crate::formats::{parse_complex, parse_dmf, parse_dvf, write_cwp, write_dmf, write_dvf};
use crate::report::Report;

pub const EXIT_INVALID: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "dms", version, about = "Perfect discrete Morse functions on cell complexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Off,
    Dot,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a complex, and optionally a vector field or a Morse function on it.
    Validate {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long, conflicts_with = "function")]
        field: Option<PathBuf>,
        #[arg(long)]
        function: Option<PathBuf>,
    },
    /// Print mod 2 Betti numbers.
    Betti {
        #[arg(long)]
        complex: PathBuf,
    },
    /// Print critical cell counts and ids.
    Critical {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        field: PathBuf,
    },
    /// Connected sum of two complexes with perfect functions.
    Compose {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        left_function: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        right_function: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split a surface with a perfect function into two summands.
    Decompose {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        function: PathBuf,
        #[arg(long)]
        g1: usize,
        #[arg(long)]
        g2: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a canonical complex with its tree-cotree field and function.
    Fixture {
        kind: FixtureKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Export a complex for viewing.
    Export {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        field: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

struct Fail(i32, Vec<String>);

impl From<ToolError> for Fail {
    fn from(e: ToolError) -> Fail {
        let code = match e {
            ToolError::Parse { .. } | ToolError::Io(_) => EXIT_PARSE,
            ToolError::Core(_) | ToolError::Disconnected => EXIT_PRECONDITION,
        };
        Fail(code, vec![e.to_string()])
    }
}

type Outcome = Result<Vec<String>, Fail>;

fn read(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path).map_err(|e| Fail(EXIT_PARSE, vec![format!("{}: {e}", path.display())]))
}

fn parse_with<T>(path: &Path, parse: impl FnOnce(&str) -> crate::error::Result<T>) -> Result<T, Fail> {
    let text = read(path)?;
    parse(&text).map_err(|e| Fail(EXIT_PARSE, vec![format!("{}: {e}", path.display())]))
}

fn load_complex(path: &Path) -> Result<Complex, Fail> {
    parse_with(path, parse_complex)
}

fn load_field(path: &Path, k: &Complex) -> Result<VectorField, Fail> {
    parse_with(path, |t| parse_dvf(t, k))
}

fn load_function(path: &Path, k: &Complex) -> Result<MorseFunction, Fail> {
    parse_with(path, |t| parse_dmf(t, k))
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn write(path: PathBuf, text: &str) -> Result<(), Fail> {
    fs::write(&path, text).map_err(|e| Fail(EXIT_PRECONDITION, vec![format!("{}: {e}", path.display())]))
}

fn precondition(e: dms_core::Error) -> Fail {
    Fail(EXIT_PRECONDITION, vec![e.to_string()])
}

fn write_triple(prefix: &Path, k: &Complex, v: &VectorField, f: &MorseFunction) -> Result<(), Fail> {
    write(with_ext(prefix, "cwp"), &write_cwp(k))?;
    write(with_ext(prefix, "dvf"), &write_dvf(v, k))?;
    write(with_ext(prefix, "dmf"), &write_dmf(f))
}

fn counts_line(m: &[usize]) -> String {
    m.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn execute(cmd: Command) -> Outcome {
    match cmd {
        Command::Validate { complex, field, function } => {
            let k = load_complex(&complex)?;
            if let Some(p) = field {
                let v = load_field(&p, &k)?;
                let report = validate_field(&k, &v);
                if !report.ok {
                    let mut lines: Vec<String> = report.violations.iter().map(|x| x.to_string()).collect();
                    if let Some(w) = report.cycle_witness {
                        let steps: Vec<&str> = w.steps.iter().map(|c| c.as_str()).collect();
                        lines.push(format!("closed V-path: {}", steps.join(" ")));
                    }
                    return Err(Fail(EXIT_INVALID, lines));
                }
            }
            if let Some(p) = function {
                let f = load_function(&p, &k)?;
                let report = validate_function(&k, &f).map_err(|e| Fail(EXIT_INVALID, vec![e.to_string()]))?;
                if !report.ok {
                    let lines = report.violations.iter().map(|(c, x)| format!("{c}: {x}")).collect();
                    return Err(Fail(EXIT_INVALID, lines));
                }
            }
            Ok(vec!["ok".into()])
        }
        Command::Betti { complex } => {
            let k = load_complex(&complex)?;
            Ok(vec![counts_line(&betti_mod2(&k).b)])
        }
        Command::Critical { complex, field } => {
            let k = load_complex(&complex)?;
            let v = load_field(&field, &k)?;
            let report = validate_field(&k, &v);
            if !report.ok {
                return Err(Fail(EXIT_INVALID, report.violations.iter().map(|x| x.to_string()).collect()));
            }
            let (m, cells) = critical_cells(&v, &k);
            let mut out = vec![counts_line(&m.m)];
            for (p, ids) in cells.iter().enumerate() {
                let ids: Vec<&str> = ids.iter().map(|c| c.as_str()).collect();
                out.push(format!("{p}: {}", ids.join(" ")));
            }
            Ok(out)
        }
        Command::Compose { left, left_function, right, right_function, out } => {
            let a = load_complex(&left)?;
            let fa = load_function(&left_function, &a)?;
            let b = load_complex(&right)?;
            let fb = load_function(&right_function, &b)?;
            let c = compose(&a, &fa, &b, &fb).map_err(precondition)?;
            write_triple(&out, &c.complex, &c.field, &c.function)?;
            write(with_ext(&out, "report.json"), &Report::compose(&c).to_json())?;
            Ok(vec![format!("chi {} counts {}", c.report.euler, counts_line(&c.report.counts.m))])
        }
        Command::Decompose { complex, function, g1, g2, out } => {
            let k = load_complex(&complex)?;
            let f = load_function(&function, &k)?;
            let d = decompose(&k, &f, g1, g2).map_err(precondition)?;
            write_triple(&with_ext(&out, "m1"), &d.m1.complex, &d.m1.field, &d.m1.function)?;
            write_triple(&with_ext(&out, "m2"), &d.m2.complex, &d.m2.field, &d.m2.function)?;
            let circle: String = d.circle.iter().map(|e| format!("{e}\n")).collect();
            write(with_ext(&out, "circle.txt"), &circle)?;
            write(with_ext(&out, "report.json"), &Report::decompose(&d).to_json())?;
            Ok(vec![format!(
                "m1 chi {} counts {}; m2 chi {} counts {}",
                d.m1.complex.euler_characteristic(),
                counts_line(&critical_cells(&d.m1.field, &d.m1.complex).0.m),
                d.m2.complex.euler_characteristic(),
                counts_line(&critical_cells(&d.m2.field, &d.m2.complex).0.m),
            )])
        }
        Command::Fixture { kind, out, seed } => {
            let fx = build(FixtureSpec { kind, seed })?;
            write(with_ext(&out, "cwp"), &write_cwp(&fx.complex))?;
            if let (Some(v), Some(f)) = (&fx.field, &fx.function) {
                write(with_ext(&out, "dvf"), &write_dvf(v, &fx.complex))?;
                write(with_ext(&out, "dmf"), &write_dmf(f))?;
            }
            Ok(vec![format!("{kind}: {} cells", fx.complex.len())])
        }
        Command::Export { complex, format, field, out } => {
            let k = load_complex(&complex)?;
            let v = field.map(|p| load_field(&p, &k)).transpose()?;
            let text = match format {
                Format::Off => {
                    if k.dim() != 2 {
                        return Err(precondition(dms_core::Error::Unsupported));
                    }
                    to_off(&k)
                }
                Format::Dot => to_dot(&k, v.as_ref()),
            };
            write(out, &text)?;
            Ok(Vec::new())
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
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(lines) => {
            let mut out = std::io::stdout().lock();
            for l in lines {
                let _ = writeln!(out, "{l}");
            }
            0
        }
        Err(Fail(code, lines)) => {
            let mut err = std::io::stderr().lock();
            for l in lines {
                let _ = writeln!(err, "{l}");
            }
            code
        }
    }
}
