//! Command-line front end: load algebras and term files, run axiom checks,
//! theorem audits and lattice listings, and enumerate small models.
//!
//! Exit codes: 0 when every check passes, 1 when some check fails, 2 on
//! input errors. Output is deterministic for a fixed command line and
//! seed; the machine format is one JSON record per line.

mod audits;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use idealkit::algebra::{algebra_from_json, FiniteAlgebra};
use idealkit::congruence::{all_congruences, point_class};
use idealkit::error::Error;
use idealkit::ideal::{self, render_set};
use idealkit::quasi;
use idealkit::report::AuditReport;
use idealkit::residuated::{self, ResiduatedView, RoleBindings};
use idealkit::term::Term;
use idealkit::variety::VarietyPresentation;

use audits::{run_theorem, Bounds, THEOREMS};

#[derive(Parser)]
#[command(
    name = "idealkit",
    version,
    about = "Finite-algebra workbench: congruences, ideals, filters and their audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgebraClass {
    Generic,
    Rl,
    Flw,
    Flew,
    Quasi,
}

#[derive(Args)]
struct AlgebraInput {
    /// Algebra file (JSON)
    #[arg(long)]
    algebra: PathBuf,
    /// Override the file's designated point constant
    #[arg(long)]
    point: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an algebra file and check the axioms of a class
    Check {
        #[command(flatten)]
        input: AlgebraInput,
        #[arg(long, value_enum, default_value = "generic")]
        class: AlgebraClass,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Run theorem audits (PASS, or FAIL with a counterexample)
    Audit {
        #[command(flatten)]
        input: AlgebraInput,
        /// One of lemma1|thm2|cormain|maincon|gummursini|special|sec3-iso|prop35|prop36|sec5|sec6-1|sec6-2|all
        #[arg(long)]
        theorem: String,
        /// Term file for the `special` audit (one term per line)
        #[arg(long)]
        terms: Option<PathBuf>,
        /// Depth bound for term enumeration and witness searches
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Length bound for difference-term tuples
        #[arg(long, default_value_t = 2)]
        max_n: usize,
        /// Composition depth for operator polynomials
        #[arg(long, default_value_t = 4)]
        poly_depth: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// List the congruence lattice with point-classes and covers
    Congruences {
        #[command(flatten)]
        input: AlgebraInput,
    },
    /// List the ideal lattice for the enumerated ideal terms
    Ideals {
        #[command(flatten)]
        input: AlgebraInput,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        x: usize,
        #[arg(long, default_value_t = 2)]
        y: usize,
        /// Use the terms in this file (one per line, x*/y* slots) instead
        /// of enumerating
        #[arg(long)]
        gamma: Option<PathBuf>,
    },
    /// List the filter lattice of a residuated view
    Filters {
        #[command(flatten)]
        input: AlgebraInput,
        /// Require the conjugation closure
        #[arg(long)]
        normal: bool,
    },
    /// Enumerate models or terms
    Enumerate {
        /// Enumerate quasi models up to isomorphism
        #[arg(long)]
        quasi: bool,
        /// Enumerate ideal terms of an algebra
        #[arg(long)]
        ideal_terms: bool,
        #[arg(long)]
        size: Option<usize>,
        /// Sample this many random candidates instead of exhausting
        #[arg(long)]
        sample: Option<usize>,
        /// Seed for sampling (overridden by IDEALKIT_SEED)
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for the model corpus and manifest
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        algebra: Option<PathBuf>,
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, default_value_t = 1)]
        x: usize,
        #[arg(long, default_value_t = 1)]
        y: usize,
    },
}

struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError(e.to_string())
    }
}

fn load_algebra(path: &Path, point: &Option<String>) -> Result<FiniteAlgebra, InputError> {
    let text =
        fs::read_to_string(path).map_err(|e| InputError(format!("{}: {}", path.display(), e)))?;
    let alg =
        algebra_from_json(&text).map_err(|e| InputError(format!("{}: {}", path.display(), e)))?;
    match point {
        Some(p) => Ok(alg.with_point(p)?),
        None => Ok(alg),
    }
}

fn load_terms(path: &Path) -> Result<Vec<Term>, InputError> {
    let text =
        fs::read_to_string(path).map_err(|e| InputError(format!("{}: {}", path.display(), e)))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(
            line.parse()
                .map_err(|e| InputError(format!("{}:{}: {}", path.display(), i + 1, e)))?,
        );
    }
    Ok(out)
}

fn record(report: &AuditReport, algebra: &str) -> serde_json::Value {
    json!({
        "theorem": report.check,
        "algebra": algebra,
        "status": report.status,
        "witness": report.witness,
        "vacuous": report.vacuous,
        "notes": report.notes,
    })
}

fn emit(reports: &[AuditReport], algebra: &str, format: Format) -> bool {
    let mut any_fail = false;
    for r in reports {
        if !r.passed() {
            any_fail = true;
        }
        match format {
            Format::Machine => println!("{}", record(r, algebra)),
            Format::Text => println!("{}", r),
        }
    }
    if format == Format::Text {
        let failed = reports.iter().filter(|r| !r.passed()).count();
        let vacuous = reports.iter().filter(|r| r.vacuous).count();
        println!(
            "{}: {} check(s), {} failed, {} vacuous",
            algebra,
            reports.len(),
            failed,
            vacuous
        );
    }
    any_fail
}

fn cmd_check(alg: &FiniteAlgebra, class: AlgebraClass, format: Format) -> Result<bool, InputError> {
    let mut reports = vec![AuditReport::pass("check/well-formed").with_note(format!(
        "size {}, {} operations",
        alg.size(),
        alg.signature().symbols().len()
    ))];
    match class {
        AlgebraClass::Generic => {}
        AlgebraClass::Rl | AlgebraClass::Flw | AlgebraClass::Flew => {
            let bindings = RoleBindings::of_algebra(alg)?;
            let check = residuated::check_residuated_axioms(alg, &bindings)?;
            let flags = check.flags;
            reports.extend(check.reports);
            match (class, flags) {
                (AlgebraClass::Flw, Some(flags)) => reports.push(if flags.fl_w {
                    AuditReport::pass("check/flw")
                } else {
                    AuditReport::fail("check/flw", "not bounded integral")
                }),
                (AlgebraClass::Flew, Some(flags)) => reports.push(if flags.fl_ew {
                    AuditReport::pass("check/flew")
                } else {
                    AuditReport::fail("check/flew", "not bounded integral commutative")
                }),
                _ => {}
            }
        }
        AlgebraClass::Quasi => {
            let bindings = RoleBindings::of_algebra(alg)?;
            let check = quasi::check_quasi_axioms(alg, &bindings)?;
            reports.extend(check.reports);
        }
    }
    Ok(emit(&reports, alg.name(), format))
}

fn cmd_audit(
    alg: &FiniteAlgebra,
    theorem: &str,
    bounds: Bounds,
    terms: Option<Vec<Term>>,
    format: Format,
) -> Result<bool, InputError> {
    let ids: Vec<&str> = if theorem == "all" {
        THEOREMS.to_vec()
    } else if THEOREMS.contains(&theorem) {
        vec![theorem]
    } else {
        return Err(InputError(format!("unknown theorem id `{}`", theorem)));
    };
    let mut reports = Vec::new();
    let mut cache = None;
    for id in ids {
        reports.extend(run_theorem(alg, id, bounds, terms.as_ref(), &mut cache)?);
    }
    Ok(emit(&reports, alg.name(), format))
}

fn cmd_congruences(alg: &FiniteAlgebra) {
    let lattice = all_congruences(alg);
    println!("{} congruence(s) of {}", lattice.len(), alg.name());
    for (i, theta) in lattice.iter().enumerate() {
        println!(
            "{}: blockOf={:?} {}  point-class {}",
            i,
            theta.block_array(),
            theta.render(),
            render_set(&point_class(alg, theta))
        );
    }
    println!("covers:");
    for (i, j) in lattice.covers() {
        println!("{} < {}", i, j);
    }
}

fn cmd_ideals(
    alg: &FiniteAlgebra,
    n_x: usize,
    n_y: usize,
    depth: usize,
    gamma_file: Option<&Path>,
) -> Result<(), InputError> {
    let variety = VarietyPresentation::single(alg.clone());
    let gamma = match gamma_file {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| InputError(format!("{}: {}", path.display(), e)))?;
            let gamma = ideal::GammaSet::parse(&text)
                .map_err(|e| InputError(format!("{}: {}", path.display(), e)))?;
            let verified = gamma.verify_over(&variety)?;
            if !verified.passed() {
                return Err(InputError(format!(
                    "{}: {}",
                    path.display(),
                    verified.witness.unwrap_or_default()
                )));
            }
            gamma
        }
        None => ideal::enumerate_ideal_terms(&variety, n_x, n_y, depth)?,
    };
    let lattice = ideal::ideal_lattice(alg, &gamma)?;
    println!(
        "{} ideal(s) of {} for {} ideal term(s) at depth {}",
        lattice.len(),
        alg.name(),
        gamma.len(),
        depth
    );
    for (i, ideal) in lattice.ideals.iter().enumerate() {
        println!("{}: {}", i, render_set(ideal));
    }
    println!("covers:");
    for (i, j) in lattice.covers() {
        println!("{} < {}", i, j);
    }
    Ok(())
}

fn cmd_filters(alg: &FiniteAlgebra, normal: bool) -> Result<(), InputError> {
    let view = ResiduatedView::of_algebra(alg)?;
    let family = if normal {
        residuated::normal_filters(&view)
    } else {
        residuated::filters(&view)
    };
    println!(
        "{} {}filter(s) of {}",
        family.len(),
        if normal { "normal " } else { "" },
        alg.name()
    );
    for (i, set) in family.sets.iter().enumerate() {
        println!("{}: {}", i, render_set(set));
    }
    println!("covers:");
    for (i, j) in family.covers() {
        println!("{} < {}", i, j);
    }
    Ok(())
}

fn enumerate_quasi(
    size: usize,
    sample: Option<usize>,
    seed: u64,
    out: Option<&Path>,
) -> Result<bool, InputError> {
    if size > 3 && sample.is_none() {
        return Err(InputError(format!(
            "exhaustive enumeration is limited to size 3; pass --sample for size {}",
            size
        )));
    }
    let models = quasi::enumerate_quasi_models(size, sample.map(|k| (k, seed)))?;
    let mut findings = Vec::new();
    for model in &models {
        let view = quasi::quasi_view_of(model)?;
        let lattice = all_congruences(model);
        for report in [
            quasi::theorem_audit_61(&view, &lattice),
            quasi::theorem_audit_62(&view, &lattice),
        ] {
            if !report.passed() {
                findings.push(record(&report, model.name()));
            }
        }
    }
    let manifest = json!({
        "size": size,
        "count": models.len(),
        "sampled": sample.is_some(),
        "seed": sample.map(|_| seed),
        "models": models.iter().map(|m| m.name()).collect::<Vec<_>>(),
        "findings": findings,
    });
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|e| InputError(format!("{}: {}", dir.display(), e)))?;
        for model in &models {
            let path = dir.join(format!("{}.json", model.name()));
            let text = serde_json::to_string_pretty(&model.to_json()).expect("serializable");
            fs::write(&path, text + "\n")
                .map_err(|e| InputError(format!("{}: {}", path.display(), e)))?;
        }
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest).expect("serializable");
        fs::write(&path, text + "\n")
            .map_err(|e| InputError(format!("{}: {}", path.display(), e)))?;
    }
    println!("{}", manifest);
    Ok(false)
}

fn enumerate_ideal_terms_cmd(
    alg: &FiniteAlgebra,
    n_x: usize,
    n_y: usize,
    depth: usize,
) -> Result<(), InputError> {
    let variety = VarietyPresentation::single(alg.clone());
    let gamma = ideal::enumerate_ideal_terms(&variety, n_x, n_y, depth)?;
    println!(
        "{} ideal term(s) of {} at depth {} over x1..x{}, y1..y{}",
        gamma.len(),
        alg.name(),
        depth,
        n_x,
        n_y
    );
    for it in &gamma.terms {
        println!("{}", it.term);
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<bool, InputError> {
    match cli.command {
        Command::Check {
            input,
            class,
            format,
        } => {
            let alg = load_algebra(&input.algebra, &input.point)?;
            cmd_check(&alg, class, format)
        }
        Command::Audit {
            input,
            theorem,
            terms,
            depth,
            max_n,
            poly_depth,
            format,
        } => {
            let alg = load_algebra(&input.algebra, &input.point)?;
            let terms = terms.as_deref().map(load_terms).transpose()?;
            let bounds = Bounds {
                depth,
                max_n,
                poly_depth,
                ..Bounds::default()
            };
            cmd_audit(&alg, &theorem, bounds, terms, format)
        }
        Command::Congruences { input } => {
            let alg = load_algebra(&input.algebra, &input.point)?;
            cmd_congruences(&alg);
            Ok(false)
        }
        Command::Ideals {
            input,
            depth,
            x,
            y,
            gamma,
        } => {
            let alg = load_algebra(&input.algebra, &input.point)?;
            cmd_ideals(&alg, x, y, depth, gamma.as_deref())?;
            Ok(false)
        }
        Command::Filters { input, normal } => {
            let alg = load_algebra(&input.algebra, &input.point)?;
            cmd_filters(&alg, normal)?;
            Ok(false)
        }
        Command::Enumerate {
            quasi: quasi_mode,
            ideal_terms,
            size,
            sample,
            seed,
            out,
            algebra,
            point,
            depth,
            x,
            y,
        } => {
            if quasi_mode == ideal_terms {
                return Err(InputError(
                    "pass exactly one of --quasi or --ideal-terms".into(),
                ));
            }
            if quasi_mode {
                let size = size.ok_or_else(|| InputError("--size is required".into()))?;
                let seed = std::env::var("IDEALKIT_SEED")
                    .ok()
                    .and_then(|s| s.parse().ok())
                    .or(seed)
                    .unwrap_or(0xA11CE);
                enumerate_quasi(size, sample, seed, out.as_deref())
            } else {
                let algebra = algebra.ok_or_else(|| InputError("--algebra is required".into()))?;
                let alg = load_algebra(&algebra, &point)?;
                enumerate_ideal_terms_cmd(&alg, x, y, depth)?;
                Ok(false)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(InputError(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
