//! The `pmcone` command line.
//!
//! Exit codes: 0 when every check passes, 1 on a verification failure, 2 on
//! bad input.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::cone::cone_report;
use crate::document::{matrix_of, Document, DocumentError};
use crate::extend::{extend_lip_preserving, PartialPseudometric};
use crate::fuzz::{parse_family, run_fuzz, FuzzConfig};
use crate::operator::{broken, compose, ConeFamily, Corruption, IsometryOracle};
use crate::peaking::build_peaking;
use crate::rational::{self, Rational};
use crate::reconstruct::{run_pipeline, PipelineConfig, DEFAULT_PROBES_PER_PAIR};
use crate::space::{Bijection, Space};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "pmcone",
    version,
    about = "Exact pseudometric cones on finite metric spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate the space and every named pseudometric, and report cone membership.
    Validate(ValidateArgs),
    /// Extend a pseudometric from a subset, keeping norm and Lipschitz constant.
    Extend(ExtendArgs),
    /// Build a pseudometric that makes `d + rho` peak only at one pair.
    Peak(PeakArgs),
    /// Recover the point bijection behind a cone isometry.
    Reconstruct(ReconstructArgs),
    /// Run the randomized peaking, extension and reconstruction suites.
    Fuzz(FuzzArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub file: String,
    /// Lipschitz bound for the LPM_k membership report.
    #[arg(long, default_value = "1", value_parser = parse_rational)]
    pub k: Rational,
}

#[derive(Debug, Args)]
pub struct ExtendArgs {
    pub file: String,
    /// Comma-separated subset labels; defaults to the document's `subset`.
    #[arg(long, value_delimiter = ',')]
    pub subset: Option<Vec<String>>,
    /// Named pseudometric, either on the subset or on the whole space.
    #[arg(long, default_value = "d")]
    pub metric: String,
    /// Re-verify restriction, norm and Lipschitz constant.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
pub struct PeakArgs {
    pub file: String,
    #[arg(long, default_value = "d")]
    pub metric: String,
    /// Target pair as `x,y`.
    #[arg(long)]
    pub pair: String,
    /// Include a, b, n0, the annuli and every level.
    #[arg(long)]
    pub transcript: bool,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Document describing the domain space X.
    pub file_x: String,
    /// Document describing the codomain space Y.
    pub file_y: String,
    /// `composition:FILE` (bijection Y -> X in FILE), or a broken fixture
    /// `constant-shift`, `entrywise-squaring`, `probe-permutation`, `flatten`,
    /// optionally followed by `:FILE`.
    #[arg(long, default_value = "composition")]
    pub oracle: String,
    /// `pm`, `lpm` or `lpmk:k`.
    #[arg(long, default_value = "pm", value_parser = parse_family)]
    pub family: ConeFamily,
    #[arg(long, default_value_t = DEFAULT_PROBES_PER_PAIR)]
    pub probes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct FuzzArgs {
    #[arg(long, env = "PMCONE_FUZZ_TRIALS", default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 8)]
    pub max_points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "pm", value_parser = parse_family)]
    pub family: ConeFamily,
    /// Swap in the untruncated extension to check that failures surface.
    #[arg(long)]
    pub break_extension: bool,
}

fn parse_rational(text: &str) -> Result<Rational, String> {
    rational::parse(text).ok_or_else(|| format!("`{text}` is not a rational"))
}

/// Runs a parsed command; returns the exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let outcome = match cli.command {
        Command::Validate(args) => validate(&args, out),
        Command::Extend(args) => extend(&args, out),
        Command::Peak(args) => peak(&args, out),
        Command::Reconstruct(args) => reconstruct(&args, out),
        Command::Fuzz(args) => fuzz(&args, out),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

type Outcome = Result<i32, DocumentError>;

fn io(e: std::io::Error) -> DocumentError {
    DocumentError::Io {
        path: "<output>".into(),
        source: e,
    }
}

fn input(message: impl Into<String>) -> DocumentError {
    DocumentError::Missing(message.into())
}

fn validate(args: &ValidateArgs, out: &mut dyn Write) -> Outcome {
    let doc = Document::read(&args.file)?;
    let space = doc.space()?;
    writeln!(out, "space: {} points, valid metric", space.len()).map_err(io)?;
    let mut all_valid = true;
    for name in doc.pseudometrics.keys() {
        let d = match doc.pseudometric(&space, name) {
            Ok(d) => d,
            Err(e) => {
                all_valid = false;
                writeln!(out, "{name}: INVALID: {e}").map_err(io)?;
                continue;
            }
        };
        let r = cone_report(&d, &args.k).map_err(|e| input(e.to_string()))?;
        let maximizers: Vec<String> = r.maximizers.iter().map(|p| space.show(*p)).collect();
        let membership = if r.in_lpmk {
            "in LPM_k"
        } else if r.in_lpmk_closure {
            "on the boundary: in the closure of LPM_k, not in LPM_k"
        } else {
            "outside the closure of LPM_k"
        };
        writeln!(
            out,
            "{name}: valid; norm = {}, lip = {}, admissible = {}, maximizers = [{}], Pp = {}, k = {}: {membership}",
            r.sup_norm,
            r.lip,
            r.is_admissible,
            maximizers.join(", "),
            r.in_pp,
            r.k
        )
        .map_err(io)?;
    }
    Ok(if all_valid { EXIT_OK } else { EXIT_FAILED })
}

fn extend(args: &ExtendArgs, out: &mut dyn Write) -> Outcome {
    let doc = Document::read(&args.file)?;
    let space = doc.space()?;
    let subset: Vec<usize> = match &args.subset {
        Some(labels) => labels
            .iter()
            .map(|l| {
                space
                    .index_of(l.trim())
                    .map_err(|e| input(format!("--subset: {e}")))
            })
            .collect::<Result<_, _>>()?,
        None => doc
            .subset(&space)?
            .ok_or_else(|| input("no subset: pass --subset or add a `subset` field"))?,
    };
    let matrix = doc.matrix(&args.metric)?;
    let at = format!("pseudometrics.{}", args.metric);
    let partial = if matrix.len() == space.len() && subset.len() != space.len() {
        let d = doc.pseudometric(&space, &args.metric)?;
        PartialPseudometric::restrict(&d, &subset)
    } else {
        PartialPseudometric::new(&space, subset, matrix)
    }
    .map_err(|source| DocumentError::Invalid { at, source })?;
    let ext = extend_lip_preserving(&partial);

    let mut result = Document::from_space(&space).with_pseudometric(&args.metric, &ext);
    result.subset = Some(
        partial
            .subset()
            .iter()
            .map(|&p| space.label(p).to_string())
            .collect(),
    );
    let mut code = EXIT_OK;
    if args.check {
        let sub = partial.subset();
        let restriction = sub.iter().enumerate().all(|(i, &a)| {
            sub.iter()
                .enumerate()
                .all(|(j, &b)| ext.get(a, b) == partial.get(i, j))
        });
        let norm = ext.sup_norm() == partial.sup_norm();
        let lip = ext.lip_constant().unwrap_or_else(|_| rational::zero()) == partial.lip_constant();
        let checks = BTreeMap::from([
            ("restriction".to_string(), restriction),
            ("norm".to_string(), norm),
            ("lip".to_string(), lip),
        ]);
        if checks.values().any(|ok| !ok) {
            code = EXIT_FAILED;
        }
        result.checks = Some(checks);
    }
    writeln!(out, "{}", result.to_json()).map_err(io)?;
    Ok(code)
}

fn labels(space: &Space, points: &[usize]) -> Vec<String> {
    points.iter().map(|&p| space.label(p).to_string()).collect()
}

fn peak(args: &PeakArgs, out: &mut dyn Write) -> Outcome {
    let doc = Document::read(&args.file)?;
    let space = doc.space()?;
    let d = doc.pseudometric(&space, &args.metric)?;
    let (x, y) = args
        .pair
        .split_once(',')
        .ok_or_else(|| input(format!("--pair `{}` must be `x,y`", args.pair)))?;
    let x = space
        .index_of(x.trim())
        .map_err(|e| input(format!("--pair: {e}")))?;
    let y = space
        .index_of(y.trim())
        .map_err(|e| input(format!("--pair: {e}")))?;
    let t = build_peaking(&d, x, y).map_err(|e| input(format!("--pair: {e}")))?;
    let mut result = Document::from_space(&space)
        .with_pseudometric("rho", &t.rho)
        .with_pseudometric("peaked", &t.peaked());
    if args.transcript {
        let annuli: Vec<_> = t
            .annuli
            .iter()
            .zip(&t.rho_levels)
            .map(|(ring, level)| {
                json!({
                    "level": ring.level,
                    "near_x": labels(&space, &ring.near_x),
                    "near_y": labels(&space, &ring.near_y),
                    "outer": labels(&space, &ring.outer),
                    "rho_n": matrix_of(level),
                })
            })
            .collect();
        result.transcript = Some(json!({
            "pair": [space.label(x), space.label(y)],
            "a": rational::format(&t.a),
            "b": rational::format(&t.b),
            "n0": t.n0,
            "e": matrix_of(&t.e),
            "d_prime": matrix_of(&t.d_prime),
            "levels": annuli,
            "lip_bound": rational::format(&t.lip_bound()),
        }));
    }
    writeln!(out, "{}", result.to_json()).map_err(io)?;
    Ok(EXIT_OK)
}

fn corruption(name: &str) -> Option<Corruption> {
    match name {
        "constant-shift" => Some(Corruption::ConstantShift(rational::one())),
        "entrywise-squaring" => Some(Corruption::EntrywiseSquare),
        "probe-permutation" => Some(Corruption::ProbePermutation),
        "flatten" => Some(Corruption::Flatten),
        _ => None,
    }
}

/// The oracle named by `--oracle`. The bijection comes from the given file,
/// else from `file_y`, else is the identity in point order.
fn build_oracle(
    args: &ReconstructArgs,
    x: &Arc<Space>,
    y: &Arc<Space>,
    doc_y: &Document,
) -> Result<IsometryOracle, DocumentError> {
    let (kind, file) = match args.oracle.split_once(':') {
        Some((kind, file)) => (kind, Some(file)),
        None => (args.oracle.as_str(), None),
    };
    let phi = match file {
        Some(path) => Document::read(path)?.bijection(y, x)?,
        None if doc_y.bijection.is_some() => doc_y.bijection(y, x)?,
        None if kind == "composition" => {
            return Err(input("composition oracle needs a bijection Y -> X"))
        }
        None => Bijection::identity(y.len()),
    };
    let family = args.family.clone();
    let oracle = if kind == "composition" {
        compose(phi, x, y, family)
    } else {
        let c = corruption(kind).ok_or_else(|| input(format!("unknown oracle `{kind}`")))?;
        broken(c, phi, x, y, family)
    };
    oracle.map_err(|e| input(format!("--oracle: {e}")))
}

fn reconstruct(args: &ReconstructArgs, out: &mut dyn Write) -> Outcome {
    let doc_x = Document::read(&args.file_x)?;
    let doc_y = Document::read(&args.file_y)?;
    let x = doc_x.space()?;
    let y = doc_y.space()?;
    if x.len() != y.len() {
        return Err(input(format!(
            "X has {} points, Y has {}",
            x.len(),
            y.len()
        )));
    }
    if args.probes < 2 {
        return Err(input("--probes must be at least 2"));
    }
    let mut oracle = build_oracle(args, &x, &y, &doc_y)?;
    let config = PipelineConfig {
        probes_per_pair: args.probes,
        seed: args.seed,
        ..PipelineConfig::default()
    };
    let report = run_pipeline(&mut oracle, &config);
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(io);

    w(
        out,
        format!("oracle: {}, family {}", oracle.name(), oracle.family()),
    )?;
    for check in &report.checks {
        w(out, format!("check {check}"))?;
    }
    match &report.doubleton_map {
        Err(e) => w(out, format!("doubleton map: FAILED: {}", e.explain(&x, &y)))?,
        Ok(map) => {
            w(out, format!("doubleton map: {} probes", map.probes_used))?;
            for (pair, image) in &map.table {
                w(out, format!("  {} -> {}", y.show(*pair), x.show(*image)))?;
            }
        }
    }
    match &report.reconstruction {
        None => {}
        Some(Err(e)) => w(out, format!("point map: FAILED: {}", e.explain(&x, &y)))?,
        Some(Ok(result)) => {
            w(out, format!("phi: {}", result.phi.show(&y, &x)))?;
            w(out, format!("ambiguity: {}", result.ambiguity))?;
        }
    }
    if let Some(formula) = &report.formula {
        if formula.passed() {
            w(
                out,
                format!("composition formula: pass on {} probes", formula.probes),
            )?;
        } else {
            w(out, "composition formula: FAIL".into())?;
            for wit in &formula.witnesses {
                w(
                    out,
                    format!(
                        "  probe #{} at {{{}, {}}}: T(d) = {}, d(phi, phi) = {}",
                        wit.probe,
                        y.label(wit.y1),
                        y.label(wit.y2),
                        wit.oracle_value,
                        wit.pullback_value
                    ),
                )?;
            }
            for (i, e) in &formula.errors {
                w(out, format!("  probe #{i}: {e}"))?;
            }
        }
    }
    match &report.certificate {
        None => {}
        Some(Err(e)) => w(
            out,
            format!("classification: FAILED: {}", e.explain(&x, &y)),
        )?,
        Some(Ok(cert)) => {
            w(
                out,
                format!("verdict: {}, lambda = {}", cert.verdict, cert.lambda),
            )?;
            for line in &cert.witnesses {
                w(out, format!("  {line}"))?;
            }
        }
    }
    w(out, format!("queries: {}", report.queries))?;
    let passed = report.passed();
    w(
        out,
        format!("result: {}", if passed { "pass" } else { "FAIL" }),
    )?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}

fn fuzz(args: &FuzzArgs, out: &mut dyn Write) -> Outcome {
    let config = FuzzConfig {
        trials: args.trials,
        max_points: args.max_points,
        seed: args.seed,
        family: args.family.clone(),
        break_extension: args.break_extension,
    };
    let report = run_fuzz(&config);
    write!(out, "{}", report.render(&config)).map_err(io)?;
    Ok(if report.passed() {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

/// Parses the process arguments and runs; clap's own usage errors exit 2.
pub fn main_from_env() -> i32 {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(cli, &mut stdout.lock(), &mut stderr.lock())
}
