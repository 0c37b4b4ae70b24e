//! The `calat` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::analyze;
use crate::compat::{field_residuals, tzitzeica_to_centroaffine};
use crate::error::{Error, Result};
use crate::export::{to_obj, to_off};
use crate::invariants::{extract_field, CoefficientField, CoefficientSource};
use crate::io::{self, CompatRow};
use crate::lattice::{validate_window, LatticeWindow, Rect};
use crate::scalar::{Rational, Scalar, Tolerance};
use crate::synthesis::{generate_example_in, synthesize, CoefficientInput, ExampleName, Frame};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_SINGULAR: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeshFormat {
    Obj,
    Off,
}

#[derive(Debug, Parser)]
#[command(name = "calat", version, about = "Discrete centroaffine indefinite surfaces on Z^2 lattices")]
pub struct Cli {
    /// Numeric backend.
    #[arg(long, value_enum, env = "CALAT_BACKEND", default_value = "exact", global = true)]
    pub backend: Backend,

    /// Relative tolerance of the float backend.
    #[arg(long, default_value_t = 1e-9, global = true)]
    pub tol: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Source {
    /// Lattice JSON file.
    #[arg(long, conflicts_with = "example")]
    pub lattice: Option<PathBuf>,

    /// Built-in example surface.
    #[arg(long)]
    pub example: Option<String>,

    /// Index rectangle for a built-in example.
    #[arg(long, num_args = 4, allow_negative_numbers = true, value_names = ["IMIN", "IMAX", "JMIN", "JMAX"])]
    pub window: Option<Vec<i64>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize a lattice from coefficient data and write lattice JSON.
    Synth {
        /// Coefficient set or field JSON.
        #[arg(long, conflicts_with_all = ["example", "config"])]
        coeffs: Option<PathBuf>,
        /// Built-in example coefficients.
        #[arg(long, conflicts_with = "config")]
        example: Option<String>,
        /// Synthesis config JSON (coefficients, window, frame).
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, num_args = 4, allow_negative_numbers = true, value_names = ["IMIN", "IMAX", "JMIN", "JMAX"])]
        window: Option<Vec<i64>>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Extract the coefficient field of a lattice.
    Extract {
        #[command(flatten)]
        source: Source,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate the compatibility conditions of coefficient data.
    CheckCompat {
        #[arg(long, conflicts_with_all = ["example", "tzitzeica"])]
        coeffs: Option<PathBuf>,
        #[arg(long, conflicts_with = "tzitzeica")]
        example: Option<String>,
        /// Discrete Tzitzeica data (H, A, B), converted to centroaffine coefficients first.
        #[arg(long)]
        tzitzeica: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Laplacian, convexity and volume report.
    Analyze {
        #[command(flatten)]
        source: Source,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also write the per-site table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Export a lattice as an OBJ or OFF mesh.
    Export {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_enum, default_value = "obj")]
        format: MeshFormat,
        /// Fractional digits for OFF coordinates.
        #[arg(long, default_value_t = 12)]
        digits: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print a built-in example: coefficients and default lattice.
    Example {
        /// Example name; omit with --list.
        name: Option<String>,
        #[arg(long)]
        list: bool,
        #[arg(long, num_args = 4, allow_negative_numbers = true, value_names = ["IMIN", "IMAX", "JMIN", "JMAX"])]
        window: Option<Vec<i64>>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Failure with an exit code; the message goes to stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse(_) | Error::Io(_) | Error::InvalidWindow(_) => EXIT_USAGE,
            Error::ZeroDenominator { .. }
            | Error::SingularTransition { .. }
            | Error::DegenerateFrame(_)
            | Error::NonFinite(_) => EXIT_SINGULAR,
            Error::MissingStencil { .. }
            | Error::AssumptionViolated { .. }
            | Error::IncompatibleField { .. }
            | Error::CrossCheck(_) => EXIT_VALIDATION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| fail(EXIT_USAGE, format!("stdout: {e}")))
        }
    }
}

fn rect_arg(w: &Option<Vec<i64>>) -> CliResult<Option<Rect>> {
    match w.as_deref() {
        None => Ok(None),
        Some(&[imin, imax, jmin, jmax]) => Ok(Some(Rect::new(imin, imax, jmin, jmax)?)),
        Some(_) => Err(fail(EXIT_USAGE, "--window takes IMIN IMAX JMIN JMAX")),
    }
}

fn example_arg(name: &str) -> CliResult<ExampleName> {
    name.parse().map_err(|e: Error| fail(EXIT_USAGE, e.to_string()))
}

fn load_lattice<S: Scalar>(src: &Source) -> CliResult<LatticeWindow<S>> {
    match (&src.lattice, &src.example) {
        (Some(p), _) => {
            if src.window.is_some() {
                return Err(fail(EXIT_USAGE, "--window applies to --example only"));
            }
            Ok(io::lattice_from_json(&read(p)?)
                .map_err(|e| fail(Failure::from(e.clone()).code, format!("{}: {e}", p.display())))?)
        }
        (None, Some(name)) => {
            let name = example_arg(name)?;
            let rect = rect_arg(&src.window)?.unwrap_or_else(|| name.default_window());
            Ok(generate_example_in(name, rect)?.1)
        }
        (None, None) => Err(fail(EXIT_USAGE, "one of --lattice or --example is required")),
    }
}

fn require_valid<S: Scalar>(w: &LatticeWindow<S>, tol: &Tolerance) -> CliResult<()> {
    let rep = validate_window(w, tol);
    if rep.is_valid() {
        return Ok(());
    }
    let mut msg = format!("lattice fails validation at {} check(s):", rep.violations.len());
    for v in &rep.violations {
        msg.push_str(&format!(
            "\n  {}: {} ({} = {})",
            v.site,
            v.kind,
            v.determinant,
            v.value.to_decimal(12)
        ));
    }
    Err(fail(EXIT_VALIDATION, msg))
}

fn compat_rows<S: Scalar>(
    src: &impl CoefficientSource<S>,
    rect: Rect,
    tol: &Tolerance,
) -> Result<Vec<CompatRow<S>>> {
    Ok(field_residuals(src, rect)?
        .into_iter()
        .map(|(site, (residuals, matrix_residual))| {
            let compatible = residuals.is_compatible(tol) && tol.is_zero(&matrix_residual, 1.0);
            CompatRow {
                site,
                residuals,
                matrix_residual,
                compatible,
            }
        })
        .collect())
}

fn residual_table<S: Scalar>(rows: &[CompatRow<S>], tol: &Tolerance) -> String {
    let mut s = String::from("site      failing residuals");
    for r in rows.iter().filter(|r| !r.compatible) {
        let failing: Vec<String> = r
            .residuals
            .failing(tol)
            .iter()
            .zip(r.residuals.residuals())
            .map(|(n, v)| format!("{n}={}", v.to_decimal(12)))
            .collect();
        s.push_str(&format!(
            "\n{:<9} {} matrix={}",
            r.site.to_string(),
            failing.join(" "),
            r.matrix_residual.to_decimal(12)
        ));
    }
    s
}

fn cmd_synth<S: Scalar>(
    coeffs: &Option<PathBuf>,
    example: &Option<String>,
    config: &Option<PathBuf>,
    window: &Option<Vec<i64>>,
    output: Option<&Path>,
    tol: &Tolerance,
) -> CliResult<()> {
    let window = rect_arg(window)?;
    let (input, rect, frame) = match (coeffs, example, config) {
        (Some(p), None, None) => {
            let input: CoefficientInput<S> = io::coefficients_from_json(&read(p)?)?;
            let rect = match (&input, window) {
                (_, Some(r)) => r,
                (CoefficientInput::Field(f), None) => f.rect(),
                (CoefficientInput::Constant(_), None) => Rect::new(-2, 2, -2, 2)?,
            };
            (input, rect, Frame::canonical())
        }
        (None, Some(name), None) => {
            let name = example_arg(name)?;
            let rect = window.unwrap_or_else(|| name.default_window());
            (CoefficientInput::Constant(name.coefficients()), rect, Frame::canonical())
        }
        (None, None, Some(p)) => {
            let base = p.parent().unwrap_or(Path::new("."));
            let cfg = io::synth_config_from_json::<S>(&read(p)?, base)?;
            let rect = match (window.or(cfg.window), &cfg.coefficients) {
                (Some(r), _) => r,
                (None, CoefficientInput::Field(f)) => f.rect(),
                (None, CoefficientInput::Constant(_)) => Rect::new(-2, 2, -2, 2)?,
            };
            (cfg.coefficients, rect, cfg.frame)
        }
        _ => return Err(fail(EXIT_USAGE, "exactly one of --coeffs, --example or --config is required")),
    };
    match synthesize(&input, rect, &frame, tol) {
        Ok(w) => write_out(output, &io::to_pretty(&io::lattice_to_json(&w))),
        Err(e @ Error::IncompatibleField { .. }) => {
            let mut msg = e.to_string();
            if let CoefficientInput::Field(f) = &input {
                if let Ok(rows) = compat_rows(f, f.rect(), tol) {
                    msg.push('\n');
                    msg.push_str(&residual_table(&rows, tol));
                }
            }
            Err(fail(EXIT_VALIDATION, msg))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_extract<S: Scalar>(source: &Source, output: Option<&Path>, tol: &Tolerance) -> CliResult<()> {
    let w: LatticeWindow<S> = load_lattice(source)?;
    require_valid(&w, tol)?;
    let ex = extract_field(&w, tol)?;
    for warn in &ex.warnings {
        eprintln!("warning: assumption {} fails at {}", warn.clause, warn.site);
    }
    write_out(output, &io::to_pretty(&io::field_to_json(&ex.field, &ex.warnings)))
}

fn cmd_check_compat<S: Scalar>(
    coeffs: &Option<PathBuf>,
    example: &Option<String>,
    tzitzeica: &Option<PathBuf>,
    output: Option<&Path>,
    tol: &Tolerance,
) -> CliResult<()> {
    let rows = match (coeffs, example, tzitzeica) {
        (Some(p), None, None) => match io::coefficients_from_json::<S>(&read(p)?)? {
            CoefficientInput::Field(f) => compat_rows(&f, f.rect(), tol)?,
            CoefficientInput::Constant(s) => compat_rows(&s, Rect::new(0, 1, 0, 1)?, tol)?,
        },
        (None, Some(name), None) => {
            let s = example_arg(name)?.coefficients::<S>();
            compat_rows(&s, Rect::new(0, 1, 0, 1)?, tol)?
        }
        (None, None, Some(p)) => {
            let t = io::tzitzeica_from_json::<S>(&read(p)?)?;
            let mut sets = std::collections::BTreeMap::new();
            for (site, _) in t.iter() {
                if let Ok(s) = tzitzeica_to_centroaffine(&t, *site) {
                    sets.insert(*site, s);
                }
            }
            let f = CoefficientField::new(t.rect(), sets)?;
            compat_rows(&f, f.rect(), tol)?
        }
        _ => return Err(fail(EXIT_USAGE, "exactly one of --coeffs, --example or --tzitzeica is required")),
    };
    write_out(output, &io::to_pretty(&io::compat_table_to_json(&rows)))?;
    if rows.iter().all(|r| r.compatible) {
        eprintln!("compatible at {} site(s)", rows.len());
        Ok(())
    } else {
        Err(fail(EXIT_VALIDATION, format!("incompatible\n{}", residual_table(&rows, tol))))
    }
}

fn cmd_analyze<S: Scalar>(
    source: &Source,
    output: Option<&Path>,
    csv: Option<&Path>,
    tol: &Tolerance,
) -> CliResult<()> {
    let w: LatticeWindow<S> = load_lattice(source)?;
    require_valid(&w, tol)?;
    let rep = analyze(&w, tol)?;
    write_out(output, &io::to_pretty(&io::report_to_json(&rep)))?;
    if let Some(p) = csv {
        write_out(Some(p), &io::report_to_csv(&rep))?;
    }
    for d in &rep.diagnostics {
        eprintln!("diagnostic: {d}");
    }
    let eigen = rep
        .summary
        .eigen_s
        .as_ref()
        .map(|s| s.to_decimal(12))
        .unwrap_or_else(|| "none".into());
    eprintln!(
        "harmonic={} eigen_s={} convex_everywhere={}",
        rep.summary.harmonic, eigen, rep.summary.convex_everywhere
    );
    Ok(())
}

fn cmd_export<S: Scalar>(
    source: &Source,
    format: MeshFormat,
    digits: usize,
    output: Option<&Path>,
) -> CliResult<()> {
    let w: LatticeWindow<S> = load_lattice(source)?;
    let text = match format {
        MeshFormat::Obj => to_obj(&w),
        MeshFormat::Off => to_off(&w, digits),
    };
    write_out(output, &text)
}

fn cmd_example<S: Scalar>(
    name: &Option<String>,
    list: bool,
    window: &Option<Vec<i64>>,
    output: Option<&Path>,
) -> CliResult<()> {
    if list {
        let names: Vec<&str> = ExampleName::ALL.iter().map(|e| e.as_str()).collect();
        return write_out(output, &format!("{}\n", names.join("\n")));
    }
    let Some(name) = name else {
        return Err(fail(EXIT_USAGE, "an example name or --list is required"));
    };
    let name = example_arg(name)?;
    let rect = rect_arg(window)?.unwrap_or_else(|| name.default_window());
    let (set, w) = generate_example_in::<S>(name, rect)?;
    let v = serde_json::json!({
        "name": name.as_str(),
        "coefficients": io::set_to_json(&set),
        "lattice": io::lattice_to_json(&w),
    });
    write_out(output, &io::to_pretty(&v))
}

fn dispatch<S: Scalar>(cli: &Cli, tol: &Tolerance) -> CliResult<()> {
    match &cli.command {
        Command::Synth {
            coeffs,
            example,
            config,
            window,
            output,
        } => cmd_synth::<S>(coeffs, example, config, window, output.as_deref(), tol),
        Command::Extract { source, output } => cmd_extract::<S>(source, output.as_deref(), tol),
        Command::CheckCompat {
            coeffs,
            example,
            tzitzeica,
            output,
        } => cmd_check_compat::<S>(coeffs, example, tzitzeica, output.as_deref(), tol),
        Command::Analyze { source, output, csv } => {
            cmd_analyze::<S>(source, output.as_deref(), csv.as_deref(), tol)
        }
        Command::Export {
            source,
            format,
            digits,
            output,
        } => cmd_export::<S>(source, *format, *digits, output.as_deref()),
        Command::Example {
            name,
            list,
            window,
            output,
        } => cmd_example::<S>(name, *list, window, output.as_deref()),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let tol = match Tolerance::new(cli.tol) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let result = match cli.backend {
        Backend::Exact => dispatch::<Rational>(&cli, &tol),
        Backend::Float => dispatch::<f64>(&cli, &tol),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
