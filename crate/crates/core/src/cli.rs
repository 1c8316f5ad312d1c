//! Command-line front end. `run` parses argv, does the work and returns the
//! process exit code: 0 on success, 1 when a checked bound fails, 2 on bad input.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::barcode::{cauchy_limit, dprime_witness, CauchyBarcodeSequence, GradedBarcode, LimitError};
use crate::demo::{demo, Demo, MeshBundle, DEMO_NAMES};
use crate::fcomplex::{
    cone_torsion_bound_check, kernel_isomorphism_cone_check, InterleavingCertificate,
};
use crate::field::PrimeField;
use crate::random::{random_certified_pair, random_symmetric_pair};
use crate::specinv::{gamma_duality_check, ls_check, spectral_norm};
use crate::sublevel::{CellComplex, SampledFunction, SublevelSpec};
use crate::svg::persistence_diagrams;

#[derive(Debug, Parser)]
#[command(name = "tamarkin", version, about = "Barcodes, interleavings and spectral invariants")]
pub struct Cli {
    /// Prime characteristic of the coefficient field.
    #[arg(long, global = true, default_value_t = 2)]
    pub field: u32,
    /// Tolerance for reported equalities.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Report levels in the sheaf coordinate `t = -c` instead of sublevel values.
    #[arg(long, global = true)]
    pub sheaf_sign: bool,
    /// Write persistence diagrams of the main barcode to this file.
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
    /// Seed for randomized reports.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Human-readable output instead of JSON.
    #[arg(long, global = true)]
    pub table: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// d' between two barcode files and the bracket it gives for d.
    Dist { left: PathBuf, right: PathBuf },
    /// Limit of a Cauchy sequence file with its certificate.
    Limit { sequence: PathBuf },
    /// Barcode, module and Spec of a sampled function.
    ///
    /// Inputs are `complex.json function.csv`, a single bundle file, or a bundle on stdin.
    Spec { inputs: Vec<PathBuf> },
    /// Cup-length counting report for the function's module.
    LsCheck { inputs: Vec<PathBuf> },
    /// Spectral norm of S against -S and its duality with shifted d'.
    Gamma { inputs: Vec<PathBuf> },
    /// Cone torsion of a certificate file, or of a seeded random suite.
    ConeCheck {
        certificate: Option<PathBuf>,
        /// Number of random certified pairs instead of a file.
        #[arg(long)]
        random: Option<usize>,
    },
    /// Print a worked example.
    Demo {
        name: String,
        /// Write the example's files here instead of printing it.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{message}")]
    Failed { message: String, report: Value },
}

impl CliError {
    fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Failed { .. } => 1,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            CliError::Input(m) => json!({"error": "input", "message": m}),
            CliError::Failed { message, report } => {
                json!({"error": "assertion", "message": message, "report": report})
            }
        }
    }
}

/// Reals as JSON, with `+inf` spelled out.
fn real(x: f64) -> Value {
    if x.is_infinite() {
        json!(if x > 0.0 { "inf" } else { "-inf" })
    } else {
        json!(x)
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable report")
}

fn read_text(path: &Path, stdin: &mut dyn Read) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(CliError::input)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path, stdin: &mut dyn Read) -> Result<T, CliError> {
    let text = read_text(path, stdin)?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_bundle(inputs: &[PathBuf], stdin: &mut dyn Read) -> Result<MeshBundle, CliError> {
    match inputs {
        [] => read_json(Path::new("-"), stdin),
        [bundle] => read_json(bundle, stdin),
        [complex, function] => {
            let k: CellComplex = read_json(complex, stdin)?;
            let text = read_text(function, stdin)?;
            let s = SampledFunction::from_csv(text.as_bytes()).map_err(CliError::input)?;
            Ok(MeshBundle {
                complex: k,
                function: s,
                clamp: None,
                fiber_dim: 0,
                action: None,
            })
        }
        _ => Err(CliError::Input("expected a bundle or a complex and a function".into())),
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    field: PrimeField,
    stdin: &'a mut dyn Read,
}

impl Ctx<'_> {
    fn level(&self, c: f64) -> f64 {
        if self.cli.sheaf_sign {
            -c
        } else {
            c
        }
    }

    fn svg(&self, b: &GradedBarcode, title: &str) -> Result<(), CliError> {
        if let Some(p) = &self.cli.svg {
            fs::write(p, persistence_diagrams(b, title))
                .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
        }
        Ok(())
    }

    fn spec_value(&self, r: &SublevelSpec) -> Value {
        let values: Vec<f64> = r.spec.values.iter().map(|&c| self.level(c)).collect();
        json!({
            "barcode": to_value(&r.barcode),
            "spec": {"values": values, "multiplicity": r.spec.multiplicity},
            "classes": r.classes.iter().map(|&(d, c)| json!({"degree": d, "level": self.level(c)})).collect::<Vec<_>>(),
            "ring": to_value(&r.ring),
            "module": to_value(&r.module),
        })
    }
}

fn check(holds: bool, message: &str, report: Value) -> Result<Value, CliError> {
    if holds {
        Ok(report)
    } else {
        Err(CliError::Failed {
            message: message.into(),
            report,
        })
    }
}

fn dist(ctx: &mut Ctx, left: &Path, right: &Path) -> Result<Value, CliError> {
    let b1: GradedBarcode = read_json(left, ctx.stdin)?;
    let b2: GradedBarcode = read_json(right, ctx.stdin)?;
    let w = dprime_witness(&b1, &b2);
    let d = w.as_ref().map_or(f64::INFINITY, |w| w.value);
    Ok(json!({
        "dprime": real(d),
        "d_bracket": [real(d / 2.0), real(d)],
        "witness": w.map(|w| json!({"a": w.a, "b": w.b, "epsilon": w.epsilon, "shift": w.shift})),
    }))
}

fn limit(ctx: &mut Ctx, path: &Path) -> Result<Value, CliError> {
    let seq: CauchyBarcodeSequence = read_json(path, ctx.stdin)?;
    let (lim, cert) = match cauchy_limit(&seq) {
        Ok(r) => r,
        Err(e @ LimitError::NotCauchy { .. }) => {
            return Err(CliError::Failed {
                message: e.to_string(),
                report: json!({"not_cauchy": e.to_string()}),
            })
        }
        Err(e) => return Err(CliError::input(e)),
    };
    ctx.svg(&lim, "limit")?;
    let holds = cert.holds;
    check(
        holds,
        "limit certificate exceeds its constants",
        json!({"limit": to_value(&lim), "certificate": to_value(&cert)}),
    )
}

fn spec_cmd(ctx: &mut Ctx, inputs: &[PathBuf]) -> Result<Value, CliError> {
    let bundle = load_bundle(inputs, ctx.stdin)?;
    let r = bundle.spec(ctx.field).map_err(CliError::input)?;
    ctx.svg(&r.barcode, "spec")?;
    Ok(ctx.spec_value(&r))
}

fn ls_cmd(ctx: &mut Ctx, inputs: &[PathBuf]) -> Result<Value, CliError> {
    let bundle = load_bundle(inputs, ctx.stdin)?;
    let r = bundle.spec(ctx.field).map_err(CliError::input)?;
    ctx.svg(&r.barcode, "ls-check")?;
    let mut rep = ls_check(&r.module, &r.ring).map_err(CliError::input)?;
    rep.spec.iter_mut().for_each(|c| *c = ctx.level(*c));
    rep.quotients.iter_mut().for_each(|q| q.level = ctx.level(q.level));
    rep.degenerate_level = rep.degenerate_level.map(|c| ctx.level(c));
    let holds = rep.holds && rep.flag_subadditivity.iter().all(|s| s.holds);
    check(holds, "cup-length count fails", to_value(&rep))
}

fn gamma_cmd(ctx: &mut Ctx, inputs: &[PathBuf]) -> Result<Value, CliError> {
    let bundle = load_bundle(inputs, ctx.stdin)?;
    if !bundle.is_graph_case() {
        return Err(CliError::Input("gamma needs an unclamped function without fiber".into()));
    }
    let fwd = bundle.spec(ctx.field).map_err(CliError::input)?;
    let dual = MeshBundle {
        function: bundle.function.dual(),
        ..bundle.clone()
    };
    let bwd = dual.spec(ctx.field).map_err(CliError::input)?;
    ctx.svg(&fwd.barcode, "gamma")?;
    let gamma = spectral_norm(&fwd.module, &bwd.module).map_err(CliError::input)?;
    let duality =
        gamma_duality_check(&fwd.barcode, &fwd.module, &bwd.module, ctx.cli.tol).map_err(CliError::input)?;
    let osc = bundle.function.max() - bundle.function.min();
    let osc_holds = (gamma - osc).abs() <= ctx.cli.tol;
    let report = json!({
        "gamma": gamma,
        "oscillation": osc,
        "oscillation_holds": osc_holds,
        "duality": to_value(&duality),
    });
    check(duality.holds && osc_holds, "spectral norm duality fails", report)
}

fn cone_cmd(ctx: &mut Ctx, file: Option<&Path>, random: Option<usize>) -> Result<Value, CliError> {
    match (file, random) {
        (Some(p), None) => {
            let cert: InterleavingCertificate = read_json(p, ctx.stdin)?;
            let prop = cone_torsion_bound_check(&cert).map_err(CliError::input)?;
            let kernel = if (cert.a() - cert.b()).abs() <= ctx.cli.tol {
                Some(kernel_isomorphism_cone_check(&cert).map_err(CliError::input)?)
            } else {
                None
            };
            let holds = prop.holds && kernel.as_ref().is_none_or(|k| k.holds);
            check(
                holds,
                "cone torsion exceeds its bound",
                json!({"cone": to_value(&prop), "kernel": to_value(&kernel)}),
            )
        }
        (None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.cli.seed);
            let (mut pass, mut kpass, mut worst, mut kworst) = (0, 0, 0.0f64, 0.0f64);
            for _ in 0..n {
                let c = random_certified_pair(&mut rng, 6, ctx.field);
                let r = cone_torsion_bound_check(&c).map_err(CliError::input)?;
                pass += r.holds as usize;
                if r.bound > 0.0 {
                    worst = worst.max(r.torsion / r.bound);
                }
                let s = random_symmetric_pair(&mut rng, 6, ctx.field);
                let k = kernel_isomorphism_cone_check(&s).map_err(CliError::input)?;
                kpass += k.holds as usize;
                if k.bound > 0.0 {
                    kworst = kworst.max(k.torsion / k.bound);
                }
            }
            let report = json!({
                "seed": ctx.cli.seed,
                "cases": n,
                "cone_pass": pass,
                "kernel_pass": kpass,
                "max_cone_ratio": worst,
                "max_kernel_ratio": kworst,
            });
            check(pass == n && kpass == n, "a random certificate exceeds its bound", report)
        }
        _ => Err(CliError::Input("give a certificate file or --random n".into())),
    }
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    fs::write(dir.join(name), text).map_err(|e| CliError::Input(format!("{}: {e}", dir.join(name).display())))
}

fn pretty<T: Serialize>(t: &T) -> String {
    serde_json::to_string_pretty(t).expect("serializable")
}

fn demo_cmd(name: &str, out_dir: Option<&Path>) -> Result<Value, CliError> {
    let d = demo(name).ok_or_else(|| {
        CliError::Input(format!("unknown demo {name}; choose one of {}", DEMO_NAMES.join(", ")))
    })?;
    let Some(dir) = out_dir else {
        return Ok(match &d {
            Demo::Mesh(m) => to_value(m),
            Demo::Sequence(s) => to_value(s),
            Demo::Pair(p) => to_value(&p.certificate),
        });
    };
    fs::create_dir_all(dir).map_err(CliError::input)?;
    let mut files = Vec::new();
    match &d {
        Demo::Mesh(m) => {
            write_file(dir, "bundle.json", &pretty(m))?;
            write_file(dir, "complex.json", &pretty(&m.complex))?;
            write_file(dir, "function.csv", &m.function.to_csv())?;
            files.extend(["bundle.json", "complex.json", "function.csv"]);
        }
        Demo::Sequence(s) => {
            write_file(dir, "sequence.json", &pretty(s))?;
            files.push("sequence.json");
        }
        Demo::Pair(p) => {
            write_file(dir, "left.json", &pretty(&p.left))?;
            write_file(dir, "right.json", &pretty(&p.right))?;
            write_file(dir, "certificate.json", &pretty(&p.certificate))?;
            files.extend(["left.json", "right.json", "certificate.json"]);
        }
    }
    Ok(json!({"demo": name, "files": files}))
}

/// Flat `key: value` lines for `--table`.
fn table(v: &Value, prefix: &str, out: &mut String) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                table(x, &key, out);
            }
        }
        Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) && a.len() > 8 => {
            out.push_str(&format!("{prefix}: [{} items]\n", a.len()));
        }
        _ => out.push_str(&format!("{prefix}: {v}\n")),
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<Value, CliError> {
    if !(cli.tol > 0.0 && cli.tol.is_finite()) {
        return Err(CliError::Input(format!("tolerance must be positive, got {}", cli.tol)));
    }
    let field = PrimeField::new(cli.field).map_err(CliError::input)?;
    let mut ctx = Ctx { cli, field, stdin };
    match &cli.command {
        Command::Dist { left, right } => dist(&mut ctx, left, right),
        Command::Limit { sequence } => limit(&mut ctx, sequence),
        Command::Spec { inputs } => spec_cmd(&mut ctx, inputs),
        Command::LsCheck { inputs } => ls_cmd(&mut ctx, inputs),
        Command::Gamma { inputs } => gamma_cmd(&mut ctx, inputs),
        Command::ConeCheck { certificate, random } => cone_cmd(&mut ctx, certificate.as_deref(), *random),
        Command::Demo { name, out_dir } => demo_cmd(name, out_dir.as_deref()),
    }
}

fn emit(v: &Value, as_table: bool, out: &mut dyn Write) {
    let text = if as_table {
        let mut s = String::new();
        table(v, "", &mut s);
        s
    } else {
        format!("{}\n", serde_json::to_string_pretty(v).expect("json"))
    };
    let _ = out.write_all(text.as_bytes());
}

/// Runs one invocation against the given streams.
pub fn run_with<I, T>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return 0;
        }
        Err(e) => {
            let msg = json!({"error": "usage", "message": e.to_string()});
            let _ = writeln!(stderr, "{msg}");
            return 2;
        }
    };
    match execute(&cli, stdin) {
        Ok(v) => {
            emit(&v, cli.table, stdout);
            0
        }
        Err(e) => {
            if let CliError::Failed { report, .. } = &e {
                emit(report, cli.table, stdout);
            }
            let _ = writeln!(stderr, "{}", e.to_json());
            e.exit_code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdin(), &mut std::io::stdout(), &mut std::io::stderr())
}
