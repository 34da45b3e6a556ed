//! Command-line front end: reproduce the reference table, run ball-based
//! certifications, and emit machine-readable reports.
//!
//! Exit codes: 0 success, 1 certification failure, 2 reference-fixture
//! mismatch, 64 usage error, 70 internal consistency error, 75 resource
//! cap exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use surface_walks::ball::{build_ball_capped, check_geometric_proposition, vertex_types, Ball, DEFAULT_VERTEX_CAP};
use surface_walks::report::{self, CheckOutcome, CheckStatus};
use surface_walks::words::Presentation;
use surface_walks::{bounds, forest, poisson, walks, Error};

/// Write to stdout, exiting quietly with the conventional `128 + SIGPIPE`
/// code when the reader has gone away (e.g. when piped into `head`).
fn stdout_write(args: std::fmt::Arguments) {
    use std::io::Write;
    if let Err(e) = std::io::stdout().lock().write_fmt(args) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(141);
        }
        eprintln!("error: writing stdout: {e}");
        std::process::exit(70);
    }
}

macro_rules! out {
    ($($arg:tt)*) => { stdout_write(format_args!($($arg)*)) };
}

macro_rules! outln {
    ($($arg:tt)*) => { stdout_write(format_args!("{}\n", format_args!($($arg)*))) };
}

const NU_TOL_DEFAULT: f64 = 1e-6;
const EIG_TOL_DEFAULT: f64 = 1e-9;
/// Walk-count depth used by `verify` (capped: the DP cost grows with the
/// ball, and deeper counts only sharpen an already-satisfied lower bound).
const VERIFY_NMAX_CAP: usize = 7;

#[derive(Parser)]
#[command(
    name = "surface-walks",
    version,
    about = "Certified bounds on the spectral radius of simple random walks on surface groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug)]
struct GenusRange {
    lo: u64,
    hi: u64,
}

fn parse_genus_range(s: &str) -> Result<GenusRange, String> {
    let parse_one = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|_| format!("invalid genus `{t}`"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse_one(a)?, parse_one(b)?),
        None => {
            let g = parse_one(s)?;
            (g, g)
        }
    };
    if lo < 2 || hi > 100 || lo > hi {
        return Err(format!(
            "genus range must lie within 2..100 with lo ≤ hi, got `{s}`"
        ));
    }
    Ok(GenusRange { lo, hi })
}

fn parse_genus(s: &str) -> Result<u64, String> {
    let r = parse_genus_range(s)?;
    if r.lo != r.hi {
        return Err(format!("expected a single genus, got a range `{s}`"));
    }
    Ok(r.lo)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Md,
    Csv,
    Json,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Md => "md",
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the five-column table of bounds over a genus range and
    /// compare it against the embedded reference fixture.
    Table {
        /// Genus or inclusive range, e.g. `2..10`.
        #[arg(long, default_value = "2..10", value_parser = parse_genus_range)]
        genus: GenusRange,
        #[arg(long, value_enum, default_value_t = Format::Md)]
        format: Format,
        /// Write the rendered table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build one ball and run every certification on it.
    Verify {
        #[arg(long, value_parser = parse_genus)]
        genus: u64,
        #[arg(long)]
        radius: usize,
        /// Abort ball construction beyond this many vertices.
        #[arg(long)]
        vertex_cap: Option<usize>,
    },
    /// Optimize the kernel-power upper bound at one genus.
    Poisson {
        #[arg(long, value_parser = parse_genus)]
        genus: u64,
        /// Golden-section tolerance on the exponent.
        #[arg(long, default_value_t = NU_TOL_DEFAULT)]
        nu_tol: f64,
        /// Angular grid step for the maximum scan (default π/(64g)).
        #[arg(long)]
        phi_step: Option<f64>,
    },
    /// Build the spanning forest on one ball and certify it.
    Forest {
        #[arg(long, value_parser = parse_genus)]
        genus: u64,
        #[arg(long)]
        radius: usize,
        /// Write the edge list with kept/removed markers here.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Exact closed-walk counts on the ball of radius nmax, as CSV.
    Walks {
        #[arg(long, value_parser = parse_genus)]
        genus: u64,
        #[arg(long)]
        nmax: usize,
    },
    /// Evaluate the per-genus scalar inequality table.
    PocketCheck {
        /// Genus or inclusive range, e.g. `2..27`.
        #[arg(long, default_value = "2..27", value_parser = parse_genus_range)]
        genus: GenusRange,
        #[arg(long, value_enum, default_value_t = Format::Md)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::VertexCapExceeded { .. } => 75,
        Error::Internal(_) | Error::ConvergenceFailed { .. } | Error::Construction(_) => 70,
        _ => 64,
    }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Table { genus, format, out } => run_table(genus, format, out.as_deref()),
        Command::Verify { genus, radius, vertex_cap } => run_verify(genus, radius, vertex_cap),
        Command::Poisson { genus, nu_tol, phi_step } => run_poisson(genus, nu_tol, phi_step),
        Command::Forest { genus, radius, dump } => run_forest(genus, radius, dump.as_deref()),
        Command::Walks { genus, nmax } => run_walks(genus, nmax),
        Command::PocketCheck { genus, format } => run_pocket(genus, format),
    }
}

fn timestamp() -> String {
    report::resolve_timestamp(std::env::var("SOURCE_DATE_EPOCH").ok().as_deref())
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Internal(format!("writing {}: {e}", path.display()))),
        None => {
            out!("{text}");
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn config_json(
    command: &str,
    range: (u64, u64),
    radius: Option<usize>,
    nu_tol: f64,
    phi_step: Option<f64>,
    eig_tol: f64,
    format: &str,
    out: Option<&Path>,
    vertex_cap: usize,
) -> serde_json::Value {
    json!({
        "command": command,
        "genusRange": [range.0, range.1],
        "radius": radius,
        "nuTolerance": nu_tol,
        "phiGridStep": phi_step,
        "eigTolerance": eig_tol,
        "format": format,
        "outputPath": out.map(|p| p.display().to_string()),
        "vertexCap": vertex_cap,
    })
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<serde_json::Value, Error> {
    serde_json::to_value(value).map_err(|e| Error::Internal(format!("serialization: {e}")))
}

fn run_table(range: GenusRange, format: Format, out: Option<&Path>) -> Result<u8, Error> {
    let mut rows = Vec::new();
    for g in range.lo..=range.hi {
        rows.push(report::compute_table_row(g, NU_TOL_DEFAULT, None)?);
    }
    let mut deviations = Vec::new();
    for row in &rows {
        deviations.extend(report::fixture_deviations(row)?);
    }
    let text = match format {
        Format::Md => report::render_table_md(&rows),
        Format::Csv => report::render_table_csv(&rows),
        Format::Json => report::json_envelope(
            "table",
            config_json(
                "table",
                (range.lo, range.hi),
                None,
                NU_TOL_DEFAULT,
                None,
                EIG_TOL_DEFAULT,
                format.name(),
                out,
                DEFAULT_VERTEX_CAP,
            ),
            "rows",
            to_json(&rows)?,
            &timestamp(),
        ),
    };
    emit(&text, out)?;
    for d in &deviations {
        eprintln!("fixture deviation: {d}");
    }
    Ok(if deviations.is_empty() { 0 } else { 2 })
}

fn push_check(
    checks: &mut Vec<CheckOutcome>,
    name: &str,
    status: CheckStatus,
    detail: serde_json::Value,
) {
    checks.push(CheckOutcome {
        name: name.to_string(),
        status,
        detail,
    });
}

fn verify_walk_chain(
    b: &Ball,
    genus: u64,
    c_star: f64,
    checks: &mut Vec<CheckOutcome>,
) -> Result<(), Error> {
    let k = 4 * genus;
    let nmax = b.radius().min(VERIFY_NMAX_CAP);
    let t = walks::closed_walk_counts(b, nmax)?;
    let lower = walks::return_prob_lower(&t);
    let eig = walks::dirichlet_top_eigenvalue(b, EIG_TOL_DEFAULT)?;
    let tree = bounds::tree_bound(k, k - 1)?;
    let pb = poisson::optimized_upper_bound(&poisson::constants(genus as u32)?, NU_TOL_DEFAULT, None)?;
    let min_upper = c_star.min(tree).min(pb.bound);
    let exact_ok = t.is_supermultiplicative() && t.roots_nondecreasing();
    let chain_ok = lower <= eig + EIG_TOL_DEFAULT && eig + EIG_TOL_DEFAULT <= min_upper;
    let status = if exact_ok && chain_ok {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    push_check(
        checks,
        "walk-ordering",
        status,
        json!({
            "nmax": nmax,
            "w2": t.count(1).to_string(),
            "w4": if nmax >= 2 { t.count(2).to_string() } else { "-".to_string() },
            "returnProbLower": lower,
            "dirichlet": eig,
            "minUpper": min_upper,
            "supermultiplicative": t.is_supermultiplicative(),
            "rootsNondecreasing": t.roots_nondecreasing(),
        }),
    );
    Ok(())
}

fn run_verify(genus: u64, radius: usize, vertex_cap: Option<usize>) -> Result<u8, Error> {
    let cap = vertex_cap.unwrap_or(DEFAULT_VERTEX_CAP);
    let pres = Presentation::surface(genus as u32)?;
    let b = build_ball_capped(&pres, radius, cap)?;
    let k = 4 * genus;
    let mut checks: Vec<CheckOutcome> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();

    // 1. Vertex-type structure.
    let tr = vertex_types(&b);
    let mut type_counts = [0u64; 3];
    for &t in &tr.types {
        type_counts[t.min(2) as usize] += 1;
    }
    push_check(
        &mut checks,
        "ball-structure",
        if tr.violations.is_empty() {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        json!({
            "vertices": b.num_vertices(),
            "typeCounts": type_counts.to_vec(),
            "typeViolations": tr.violations.len(),
        }),
    );

    // 2. Type-2 separation and convenient neighbours.
    match check_geometric_proposition(&b) {
        Ok(r) => {
            push_check(
                &mut checks,
                "geometric-proposition",
                if r.is_clean() {
                    CheckStatus::Pass
                } else {
                    CheckStatus::Fail
                },
                json!({
                    "type2Pairs": r.type2_pairs.len(),
                    "convenientMisses": r.convenient_misses.len(),
                    "skippedPairs": r.skipped_pairs,
                    "checkedType1": r.checked_type1,
                    "deferredType1": r.deferred_type1,
                    "minConvenientCount": r.min_convenient_count,
                }),
            );
        }
        Err(Error::InsufficientRadius { radius, needed }) => {
            warnings.push(format!(
                "geometric proposition inconclusive at radius {radius}: {needed}"
            ));
            push_check(
                &mut checks,
                "geometric-proposition",
                CheckStatus::Inconclusive,
                json!({ "reason": needed }),
            );
        }
        Err(e) => return Err(e),
    }

    // 3. 1-form row sums at the optimal weight.
    let (b_star, c_star) = bounds::one_form_bound(k)?;
    let cert = bounds::verify_one_form(&b, b_star)?;
    let one_form_status = if cert.checked == 0 {
        warnings.push("no interior vertices; 1-form row sums inconclusive".to_string());
        CheckStatus::Inconclusive
    } else if cert.certified() {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    push_check(
        &mut checks,
        "one-form",
        one_form_status,
        json!({
            "weight": b_star,
            "rowSumBound": cert.row_sum_bound,
            "maxRowSum": cert.max_row_sum,
            "normalizedMax": cert.max_row_sum / k as f64,
            "checked": cert.checked,
            "violations": cert.violations.len(),
            "typeMismatches": cert.type_mismatches.len(),
        }),
    );

    // 4. Spanning forest.
    let mask = forest::build_forest(&b)?;
    let fc = forest::verify_forest(&b, &mask);
    let components = forest::count_components(&b, &mask);
    let (p1, p2) = mask.counts();
    let forest_status = if radius < 3 || fc.certified_vertices == 0 {
        warnings.push(format!(
            "forest coverage at radius {radius} is boundary-deferred only; inconclusive"
        ));
        CheckStatus::Inconclusive
    } else if fc.passed() {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail
    };
    push_check(
        &mut checks,
        "forest",
        forest_status,
        json!({
            "certifiedVertices": fc.certified_vertices,
            "deferredVertices": fc.deferred_vertices,
            "removedPhase1": p1,
            "removedPhase2": p2,
            "components": components,
            "degreeViolations": fc.degree_violations.len(),
            "cycleFound": fc.cycle_witness.is_some(),
            "matchingViolations": fc.matching_violations.len(),
        }),
    );

    // 5. Walk-count and eigenvalue lower bounds under every upper bound.
    if radius == 0 {
        warnings.push("radius 0 has no closed walks; ordering chain inconclusive".to_string());
        push_check(
            &mut checks,
            "walk-ordering",
            CheckStatus::Inconclusive,
            json!({ "reason": "radius 0" }),
        );
    } else {
        verify_walk_chain(&b, genus, c_star, &mut checks)?;
    }

    for c in &checks {
        let tag = match c.status {
            CheckStatus::Pass => "PASS",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Inconclusive => "INCONCLUSIVE",
        };
        outln!("{tag} {}", c.name);
    }
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let blob = report::json_envelope(
        "verify",
        config_json(
            "verify",
            (genus, genus),
            Some(radius),
            NU_TOL_DEFAULT,
            None,
            EIG_TOL_DEFAULT,
            "json",
            None,
            cap,
        ),
        "checks",
        to_json(&checks)?,
        &timestamp(),
    );
    out!("{blob}");
    let failed = checks.iter().any(|c| c.status == CheckStatus::Fail);
    Ok(if failed { 1 } else { 0 })
}

fn run_poisson(genus: u64, nu_tol: f64, phi_step: Option<f64>) -> Result<u8, Error> {
    let cst = poisson::constants(genus as u32)?;
    let ub = poisson::optimized_upper_bound(&cst, nu_tol, phi_step)?;
    outln!("g {genus}: upper bound {:.6} at nu* {:.6}", ub.bound, ub.nu);
    outln!(
        "scan: max {:.6} at phi {:.6} (step {:.6}); value at zero {:.6}; max at zero: {}",
        ub.evaluation.max_value,
        ub.evaluation.max_phi,
        ub.evaluation.grid_step,
        ub.evaluation.value_at_zero,
        ub.evaluation.max_is_at_zero(),
    );
    Ok(0)
}

fn run_forest(genus: u64, radius: usize, dump: Option<&Path>) -> Result<u8, Error> {
    let pres = Presentation::surface(genus as u32)?;
    let b = build_ball_capped(&pres, radius, DEFAULT_VERTEX_CAP)?;
    let mask = forest::build_forest(&b)?;
    let cert = forest::verify_forest(&b, &mask);
    let components = forest::count_components(&b, &mask);
    let (p1, p2) = mask.counts();
    outln!("vertices {} radius {radius} genus {genus}", b.num_vertices());
    outln!("removed phase1 {p1} phase2 {p2}");
    outln!(
        "certified {} deferred {}",
        cert.certified_vertices, cert.deferred_vertices
    );
    outln!("components {components}");
    outln!("certificate {}", if cert.passed() { "pass" } else { "fail" });
    if let Some(path) = dump {
        std::fs::write(path, mask.dump_edges(&b))
            .map_err(|e| Error::Internal(format!("writing {}: {e}", path.display())))?;
    }
    Ok(if cert.passed() { 0 } else { 1 })
}

fn run_walks(genus: u64, nmax: usize) -> Result<u8, Error> {
    let pres = Presentation::surface(genus as u32)?;
    let b = build_ball_capped(&pres, nmax, DEFAULT_VERTEX_CAP)?;
    let t = walks::closed_walk_counts(&b, nmax)?;
    out!("{}", t.to_csv());
    Ok(0)
}

fn run_pocket(range: GenusRange, format: Format) -> Result<u8, Error> {
    let rows: Vec<poisson::PocketRow> = poisson::pocket_check(range.hi as u32)?
        .into_iter()
        .filter(|r| u64::from(r.g) >= range.lo)
        .collect();
    let text = match format {
        Format::Md => report::render_pocket_md(&rows),
        Format::Csv => report::render_pocket_csv(&rows),
        Format::Json => report::json_envelope(
            "pocket-check",
            config_json(
                "pocket-check",
                (range.lo, range.hi),
                None,
                NU_TOL_DEFAULT,
                None,
                EIG_TOL_DEFAULT,
                format.name(),
                None,
                DEFAULT_VERTEX_CAP,
            ),
            "rows",
            report::pocket_rows_json(&rows),
            &timestamp(),
        ),
    };
    out!("{text}");
    Ok(0)
}
