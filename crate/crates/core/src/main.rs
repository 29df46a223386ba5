use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use framekit::document::{load_signal, Loaded, SystemDocument};
use framekit::frames::{self, BoundsReport};
use framekit::fusion::{self, FusionSystem};
use framekit::numkit::{identity, vec_norm, Field, Mat, Tolerances, Vector};
use framekit::{demo, FrameError, Subspace, VectorFrame};

/// Frames, K-frames, fusion frames and K-fusion frames: bounds,
/// constructions, reconstruction and randomized property runs.
///
/// Exit status: 0 verified, 1 property fails, 2 input error.
#[derive(Parser)]
#[command(name = "framekit", version)]
struct Cli {
    /// Relative rank cutoff for singular values.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_rank: f64,
    /// Tolerance for equalities and residuals.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol_eq: f64,
    /// Allowed negativity for positive semidefinite checks.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol_psd: f64,
    /// Scalar field for random instances and emitted documents.
    #[arg(long, global = true, default_value = "real")]
    field: Field,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal bounds of a vector frame or fusion system, optionally against K.
    Bounds {
        system: PathBuf,
        /// Operator document for the K-lower bound.
        #[arg(long)]
        k: Option<PathBuf>,
    },
    /// Build a system from a construction and verify its certified constants.
    Construct {
        #[command(subcommand)]
        kind: Construction,
    },
    /// Randomized property run for a registered theorem id.
    Demo {
        /// One of the registered ids, or `list`.
        theorem_id: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        dim: usize,
    },
    /// Reconstruct a signal from its frame or fusion frame measurements.
    Reconstruct { system: PathBuf, signal: PathBuf },
}

#[derive(Args)]
struct Output {
    /// Where to write the system document (stdout when omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Construction {
    /// Atomic system `{(span K e_n, |K e_n|)}` for an operator K.
    Atomic {
        #[arg(long)]
        k: PathBuf,
        /// Operator document whose columns are the orthonormal basis (default: standard basis).
        #[arg(long)]
        basis: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Spans of the parts of a partitioned K-frame.
    Partition {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        k: PathBuf,
        /// One-based indices, parts separated by `;`, e.g. `1,2;3`.
        #[arg(long)]
        parts: String,
        /// Comma-separated weights, one per part (default: all 1).
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        #[command(flatten)]
        output: Output,
    },
    /// Member-wise direct sum of K_j-fusion frames with shared weights.
    #[command(name = "direct_sum", alias = "direct-sum")]
    DirectSum {
        #[arg(long, value_delimiter = ',', required = true)]
        systems: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', required = true)]
        ks: Vec<PathBuf>,
        /// Where to write the block-diagonal operator.
        #[arg(long)]
        k_out: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Intersect every member with V; projections must commute with P_V.
    Intersect {
        #[arg(long)]
        system: PathBuf,
        /// Vector frame document whose columns span V.
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        k: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = Tolerances::new(cli.tol_rank, cli.tol_psd, cli.tol_eq).and_then(|tol| run(&cli, &tol));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}

fn run(cli: &Cli, tol: &Tolerances) -> framekit::Result<bool> {
    match &cli.command {
        Command::Bounds { system, k } => cmd_bounds(system, k.as_deref(), tol),
        Command::Construct { kind } => cmd_construct(kind, cli.field, tol),
        Command::Demo { theorem_id, seed, dim } => {
            if theorem_id == "list" {
                for t in demo::REGISTRY {
                    println!("{:<8} {}", t.id, t.claim);
                }
                return Ok(true);
            }
            let report = demo::run_demo(theorem_id, *seed, *dim, cli.field, tol)?;
            print!("{report}");
            Ok(report.passed())
        }
        Command::Reconstruct { system, signal } => cmd_reconstruct(system, signal, tol),
    }
}

fn load(path: &Path, tol: &Tolerances) -> framekit::Result<(SystemDocument, Loaded)> {
    let doc = SystemDocument::load(path)?;
    let loaded = doc.interpret(tol)?;
    Ok((doc, loaded))
}

fn load_operator(path: &Path, tol: &Tolerances) -> framekit::Result<Mat> {
    match load(path, tol)?.1 {
        Loaded::Operator(k) => Ok(k),
        _ => Err(FrameError::Parse(format!("{} is not an operator document", path.display()))),
    }
}

fn load_fusion(path: &Path, tol: &Tolerances) -> framekit::Result<FusionSystem> {
    match load(path, tol)?.1 {
        Loaded::Fusion(w) => Ok(w),
        _ => Err(FrameError::Parse(format!("{} is not a fusion_system document", path.display()))),
    }
}

fn load_frame(path: &Path, tol: &Tolerances) -> framekit::Result<VectorFrame> {
    match load(path, tol)?.1 {
        Loaded::Frame(f) => Ok(f),
        _ => Err(FrameError::Parse(format!("{} is not a vector_frame document", path.display()))),
    }
}

fn fmt_vec(v: &Vector, field: Field) -> String {
    let parts: Vec<String> = v
        .iter()
        .map(|z| match field {
            Field::Real => format!("{:.16e}", z.re),
            Field::Complex => format!("[{:.16e}, {:.16e}]", z.re, z.im),
        })
        .collect();
    format!("[{}]", parts.join(", "))
}

fn print_bounds(report: &BoundsReport, field: Field) {
    println!("is_bessel: {}", report.is_bessel);
    println!("lower_ok: {}", report.lower_ok);
    println!("a_opt: {:.16e}", report.a_opt);
    println!("b_opt: {:.16e}", report.b_opt);
    if let Some(a) = report.a_cross_check {
        println!("a_cross_check: {a:.16e}");
    }
    println!("tight: {}", report.tight);
    println!("parseval: {}", report.parseval);
    if let Some(flags) = report.fusion {
        println!("orthonormal: {}", flags.orthonormal);
        println!("uniform: {}", flags.uniform);
    }
    println!("witness_low: {}", fmt_vec(&report.witness_low, field));
    println!("witness_high: {}", fmt_vec(&report.witness_high, field));
}

fn cmd_bounds(system: &Path, k: Option<&Path>, tol: &Tolerances) -> framekit::Result<bool> {
    let (doc, loaded) = load(system, tol)?;
    let k = k.map(|p| load_operator(p, tol)).transpose()?;
    let field = k.iter().fold(doc.field_tag, |f, k| f.join(Field::detect(k)));
    println!("kind: {}", doc.kind.as_str());
    println!("ambient_dim: {}", doc.ambient_dim);
    println!("field: {}", field.as_str());
    println!("against: {}", if k.is_some() { "K" } else { "identity" });
    let (report, noun) = match (&loaded, &k) {
        (Loaded::Frame(f), None) => (frames::frame_bounds(f, tol)?, "frame"),
        (Loaded::Frame(f), Some(k)) => (frames::kframe_bounds(f, k, tol)?, "K-frame"),
        (Loaded::Fusion(w), None) => (fusion::fusion_bounds(w, tol)?, "fusion frame"),
        (Loaded::Fusion(w), Some(k)) => (fusion::kfusion_bounds(w, k, tol)?, "K-fusion frame"),
        (Loaded::Operator(_), _) => {
            return Err(FrameError::Parse("bounds needs a vector_frame or fusion_system document".into()))
        }
    };
    print_bounds(&report, field);
    if let (Loaded::Frame(f), None) = (&loaded, &k) {
        println!("exact: {}", frames::is_exact(f, tol)?);
    }
    if report.lower_ok {
        println!("verdict: {noun}");
    } else {
        println!("verdict: not a {noun}");
    }
    Ok(report.lower_ok)
}

/// Names the construction whose hypothesis an error breaks.
fn hypothesis(citation: &str, e: FrameError) -> FrameError {
    use FrameError::*;
    match e {
        NotAFrame | NotAFusionFrame | NotAKFrame | NotKFusion | ZeroOperator | ZeroOperatorInProduct { .. }
        | NonCommutingProjections { .. } | CommutationHypothesisFailed { .. } | WeightMismatch { .. }
        | MemberCountMismatch { .. } => HypothesisViolated {
            citation: citation.to_string(),
            detail: e.to_string(),
        },
        other => other,
    }
}

fn emit(system: &FusionSystem, field: Field, output: &Output) -> framekit::Result<()> {
    let doc = SystemDocument::from_fusion(system).with_field(field);
    match &output.out {
        Some(path) => {
            doc.save(path)?;
            println!("written: {}", path.display());
        }
        None => print!("{}", doc.to_canonical_string()),
    }
    Ok(())
}

fn check(label: &str, certified: f64, actual: f64, lower: bool, tol: &Tolerances) -> bool {
    let slack = tol.eq_tol * certified.abs().max(actual.abs()).max(1.0);
    let ok = if certified.is_infinite() || actual.is_infinite() {
        if lower { certified <= actual } else { actual <= certified }
    } else if lower {
        certified <= actual + slack
    } else {
        actual <= certified + slack
    };
    println!("{label}: certified {certified:.16e} actual {actual:.16e} {}", if ok { "ok" } else { "VIOLATED" });
    ok
}

fn parse_parts(parts: &str) -> framekit::Result<Vec<Vec<usize>>> {
    parts.split(';')
        .map(|part| {
            part.split(',')
                .map(|s| {
                    let i: usize = s
                        .trim()
                        .parse()
                        .map_err(|_| FrameError::BadPartition(format!("{s:?} is not an index")))?;
                    i.checked_sub(1)
                        .ok_or_else(|| FrameError::BadPartition("indices are one-based".into()))
                })
                .collect()
        })
        .collect()
}

fn cmd_construct(kind: &Construction, field: Field, tol: &Tolerances) -> framekit::Result<bool> {
    match kind {
        Construction::Atomic { k, basis, output } => {
            let k = load_operator(k, tol)?;
            let basis = match basis {
                Some(p) => load_operator(p, tol)?,
                None => identity(k.nrows()),
            };
            let w = fusion::construct_atomic(&k, &basis, tol).map_err(|e| hypothesis("thm3.2", e))?;
            let report = fusion::verify_atomic(&w, &k, tol)?;
            let bounds = fusion::kfusion_bounds(&w, &k, tol)?;
            println!("members: {}", w.len());
            let mut ok = report.is_atomic && report.consistent;
            ok &= check("lower", 1.0, bounds.a_opt, true, tol);
            ok &= check("upper", framekit::numkit::op_norm(&k)?.powi(2), bounds.b_opt, false, tol);
            println!("decomposition_c: {:.16e}", report.decomposition_c);
            emit(&w, field, output)?;
            Ok(ok)
        }
        Construction::Partition { frame, k, parts, weights, output } => {
            let frame = load_frame(frame, tol)?;
            let k = load_operator(k, tol)?;
            let parts = parse_parts(parts)?;
            let report = fusion::partition_kframe(&frame, &k, &parts, weights.as_deref(), tol)
                .map_err(|e| hypothesis("thm4.6", e))?;
            println!("members: {}", report.system.len());
            let mut ok = check("lower", report.certified_lower, report.actual.a_opt, true, tol);
            ok &= check("upper", report.certified_upper, report.actual.b_opt, false, tol);
            emit(&report.system, field, output)?;
            Ok(ok)
        }
        Construction::DirectSum { systems, ks, k_out, output } => {
            let systems = systems.iter().map(|p| load_fusion(p, tol)).collect::<framekit::Result<Vec<_>>>()?;
            let ks = ks.iter().map(|p| load_operator(p, tol)).collect::<framekit::Result<Vec<_>>>()?;
            let shared = systems.first().map(|s| s.weights()).unwrap_or_default();
            let report = fusion::direct_sum_kfusion(&systems, &ks, &shared, tol).map_err(|e| hypothesis("thm4.9", e))?;
            println!("ambient_dim: {}", report.system.ambient_dim());
            let mut ok = check("lower", report.certified_lower, report.actual.a_opt, true, tol);
            ok &= check("upper", report.certified_upper, report.actual.b_opt, false, tol);
            if let Some(path) = k_out {
                SystemDocument::from_operator(&report.k).with_field(field).save(path)?;
                println!("operator written: {}", path.display());
            }
            emit(&report.system, field, output)?;
            Ok(ok)
        }
        Construction::Intersect { system, v, k, output } => {
            let w = load_fusion(system, tol)?;
            let v = Subspace::span(load_frame(v, tol)?.vectors(), tol)?;
            let k = k.as_ref().map(|p| load_operator(p, tol)).transpose()?;
            let citation = if k.is_some() { "thm4.13" } else { "lem4.11" };
            let report = fusion::intersect_system(&w, &v, k.as_ref(), tol).map_err(|e| hypothesis(citation, e))?;
            let mut ok = check("bessel", report.bessel_before, report.bessel_after, false, tol);
            if let Some(r) = &report.restricted {
                ok &= check("restricted_lower", r.certified_lower, r.actual.a_opt, true, tol);
            }
            emit(&report.system, field, output)?;
            Ok(ok)
        }
    }
}

fn cmd_reconstruct(system: &Path, signal: &Path, tol: &Tolerances) -> framekit::Result<bool> {
    let (doc, loaded) = load(system, tol)?;
    let f = load_signal(signal)?;
    let out = match &loaded {
        Loaded::Frame(frame) => frames::reconstruct(frame, &f, tol)?,
        Loaded::Fusion(w) => fusion::fusion_reconstruct(w, &fusion::analysis(w, &f)?, tol)?,
        Loaded::Operator(_) => {
            return Err(FrameError::Parse("reconstruct needs a vector_frame or fusion_system document".into()))
        }
    };
    let error = vec_norm(&(&out - &f)) / vec_norm(&f).max(f64::MIN_POSITIVE);
    let field = doc.field_tag.join(Field::detect(&Mat::from_columns(std::slice::from_ref(&f))));
    println!("reconstruction: {}", fmt_vec(&out, field));
    println!("relative_error: {error:.3e}");
    Ok(error <= tol.eq_tol)
}
