//! The reference table of bounds for genus 2–10, fixture comparison, and
//! the renderers (markdown, CSV, JSON) behind the command-line interface.
//!
//! Three cells of the published reference table disagree with their own
//! closed formulas by more than the table's print precision; they are
//! carried here as explicit corrections, and the correction itself is
//! machine-verified every time the fixture is evaluated, so a regression
//! in either direction cannot hide behind the carve-out.

use serde::Serialize;

use crate::poisson;
use crate::{bounds, Error, Result};

/// Inclusive genus range covered by the embedded reference fixture.
pub const REFERENCE_GENUS_RANGE: (u64, u64) = (2, 10);

/// Tolerance on the four bound columns when comparing against the fixture.
pub const BOUND_TOLERANCE: f64 = 1e-4;
/// Tolerance on the exponent column when comparing against the fixture.
pub const NU_TOLERANCE: f64 = 1e-3;

/// One row of computed bounds, full precision.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TableRow {
    pub g: u64,
    pub kesten_lower: f64,
    pub one_form_upper: f64,
    pub nu_star: f64,
    pub poisson_upper: f64,
    pub tree_upper: f64,
}

/// One row of the reference fixture, exactly as printed.
#[derive(Debug, Clone, Copy)]
pub struct ReferenceRow {
    pub g: u64,
    pub kesten_lower: f64,
    pub one_form_upper: f64,
    pub nu_star: f64,
    pub poisson_upper: f64,
    pub tree_upper: f64,
}

/// The published table for g = 2..=10, digit for digit.
pub const REFERENCE_TABLE: [ReferenceRow; 9] = [
    ReferenceRow { g: 2, kesten_lower: 0.6614, one_form_upper: 0.8660, nu_star: 0.2990, poisson_upper: 0.7675, tree_upper: 0.7373 },
    ReferenceRow { g: 3, kesten_lower: 0.5529, one_form_upper: 0.7453, nu_star: 0.2944, poisson_upper: 0.6588, tree_upper: 0.6104 },
    ReferenceRow { g: 4, kesten_lower: 0.4841, one_form_upper: 0.6615, nu_star: 0.2932, poisson_upper: 0.5872, tree_upper: 0.5303 },
    ReferenceRow { g: 5, kesten_lower: 0.4359, one_form_upper: 0.6000, nu_star: 0.2926, poisson_upper: 0.5352, tree_upper: 0.4742 },
    ReferenceRow { g: 6, kesten_lower: 0.3997, one_form_upper: 0.5529, nu_star: 0.2920, poisson_upper: 0.4953, tree_upper: 0.4325 },
    ReferenceRow { g: 7, kesten_lower: 0.3712, one_form_upper: 0.5153, nu_star: 0.2916, poisson_upper: 0.4633, tree_upper: 0.3999 },
    ReferenceRow { g: 8, kesten_lower: 0.3480, one_form_upper: 0.4841, nu_star: 0.2912, poisson_upper: 0.4369, tree_upper: 0.3736 },
    ReferenceRow { g: 9, kesten_lower: 0.3287, one_form_upper: 0.4581, nu_star: 0.2908, poisson_upper: 0.4147, tree_upper: 0.3518 },
    ReferenceRow { g: 10, kesten_lower: 0.3123, one_form_upper: 0.4359, nu_star: 0.2905, poisson_upper: 0.3956, tree_upper: 0.3332 },
];

/// Which column of a reference row a correction applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefColumn {
    Kesten,
    OneForm,
}

/// Misprinted cells: the printed digits differ from the column's own
/// closed formula by more than [`BOUND_TOLERANCE`]. Each entry is
/// revalidated at runtime by [`corrected_reference`].
pub const KNOWN_ERRATA: [(u64, RefColumn, f64); 3] = [
    (3, RefColumn::Kesten, 0.5529),   // formula 2√11/12 ≈ 0.55277
    (6, RefColumn::OneForm, 0.5529),  // formula 2√44/24 ≈ 0.55277
    (7, RefColumn::OneForm, 0.5153),  // formula 2√52/28 ≈ 0.51508
];

fn column_formula(g: u64, column: RefColumn) -> Result<f64> {
    let k = 4 * g;
    match column {
        RefColumn::Kesten => bounds::kesten_lower(k),
        RefColumn::OneForm => Ok(bounds::one_form_bound(k)?.1),
    }
}

/// The reference row for `g` with misprinted cells replaced by their
/// closed-formula values.
///
/// Every correction is checked on the spot: the printed digits must
/// really deviate from the formula by more than the comparison tolerance
/// (otherwise the carve-out is stale and an internal error is raised),
/// and untouched cells keep their printed values. Returns `None` for a
/// genus outside the fixture.
pub fn corrected_reference(g: u64) -> Result<Option<ReferenceRow>> {
    let Some(row) = REFERENCE_TABLE.iter().find(|r| r.g == g).copied() else {
        return Ok(None);
    };
    let mut corrected = row;
    for &(eg, column, printed) in &KNOWN_ERRATA {
        if eg != g {
            continue;
        }
        let formula = column_formula(g, column)?;
        if (formula - printed).abs() <= BOUND_TOLERANCE {
            return Err(Error::Internal(format!(
                "stale correction for g = {g}: printed {printed} is within \
                 tolerance of formula {formula}"
            )));
        }
        let cell = match column {
            RefColumn::Kesten => &mut corrected.kesten_lower,
            RefColumn::OneForm => &mut corrected.one_form_upper,
        };
        if *cell != printed {
            return Err(Error::Internal(format!(
                "correction for g = {g} does not match the printed cell"
            )));
        }
        *cell = formula;
    }
    Ok(Some(corrected))
}

/// Compute all five columns for one genus.
///
/// `nu_tol` and `phi_step` are forwarded to the Poisson-kernel optimizer;
/// the remaining columns are closed-form. The per-row sanity invariant —
/// the lower bound sits strictly under every upper bound — is enforced
/// here, not left to callers.
pub fn compute_table_row(g: u64, nu_tol: f64, phi_step: Option<f64>) -> Result<TableRow> {
    let k = 4 * g;
    let kesten = bounds::kesten_lower(k)?;
    let (_, one_form) = bounds::one_form_bound(k)?;
    let tree = bounds::tree_bound(k, k - 1)?;
    let cst = poisson::constants(g as u32)?;
    let upper = poisson::optimized_upper_bound(&cst, nu_tol, phi_step)?;
    let row = TableRow {
        g,
        kesten_lower: kesten,
        one_form_upper: one_form,
        nu_star: upper.nu,
        poisson_upper: upper.bound,
        tree_upper: tree,
    };
    let min_upper = row
        .one_form_upper
        .min(row.poisson_upper)
        .min(row.tree_upper);
    if row.kesten_lower >= min_upper {
        return Err(Error::Internal(format!(
            "bound ordering violated at g = {g}: lower {} vs upper {}",
            row.kesten_lower, min_upper
        )));
    }
    Ok(row)
}

/// Deviations of a computed row from the (corrected) fixture, as
/// human-readable strings; empty means the row is in tolerance or not
/// covered by the fixture.
pub fn fixture_deviations(row: &TableRow) -> Result<Vec<String>> {
    let Some(reference) = corrected_reference(row.g)? else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    let mut check = |name: &str, got: f64, want: f64, tol: f64| {
        if (got - want).abs() > tol {
            out.push(format!(
                "g={} {name}: computed {got:.6} vs reference {want:.6} \
                 (tolerance {tol})",
                row.g
            ));
        }
    };
    check("kestenLower", row.kesten_lower, reference.kesten_lower, BOUND_TOLERANCE);
    check("oneFormUpper", row.one_form_upper, reference.one_form_upper, BOUND_TOLERANCE);
    check("nuStar", row.nu_star, reference.nu_star, NU_TOLERANCE);
    check("poissonUpper", row.poisson_upper, reference.poisson_upper, BOUND_TOLERANCE);
    check("treeUpper", row.tree_upper, reference.tree_upper, BOUND_TOLERANCE);
    Ok(out)
}

/// Round to four decimals, ties to even — the display precision used by
/// the text renderers. JSON output keeps full precision instead.
pub fn round4(x: f64) -> f64 {
    (x * 1e4).round_ties_even() * 1e-4
}

fn fmt4(x: f64) -> String {
    format!("{:.4}", round4(x))
}

/// Markdown renderer for table rows.
pub fn render_table_md(rows: &[TableRow]) -> String {
    let mut out = String::new();
    out.push_str("| g | kesten | one-form | nu* | poisson | forest |\n");
    out.push_str("|---|--------|----------|-----|---------|--------|\n");
    for r in rows {
        out.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} |\n",
            r.g,
            fmt4(r.kesten_lower),
            fmt4(r.one_form_upper),
            fmt4(r.nu_star),
            fmt4(r.poisson_upper),
            fmt4(r.tree_upper),
        ));
    }
    out
}

/// CSV renderer for table rows.
pub fn render_table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from("g,kestenLower,oneFormUpper,nuStar,poissonUpper,treeUpper\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.g,
            fmt4(r.kesten_lower),
            fmt4(r.one_form_upper),
            fmt4(r.nu_star),
            fmt4(r.poisson_upper),
            fmt4(r.tree_upper),
        ));
    }
    out
}

/// One certification check as reported by the `verify` subcommand.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckOutcome {
    pub name: String,
    pub status: CheckStatus,
    pub detail: serde_json::Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

/// Resolve the report timestamp: an override (the `SOURCE_DATE_EPOCH`
/// convention, seconds since the Unix epoch) wins over the wall clock, so
/// pinned environments get byte-identical JSON.
pub fn resolve_timestamp(source_date_epoch: Option<&str>) -> String {
    let stamp = source_date_epoch
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0))
        .unwrap_or_else(chrono::Utc::now);
    stamp.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

/// The JSON envelope shared by every subcommand: tool identity, command,
/// effective configuration, payload, timestamp.
pub fn json_envelope(
    command: &str,
    config: serde_json::Value,
    payload_key: &str,
    payload: serde_json::Value,
    timestamp: &str,
) -> String {
    let mut doc = serde_json::Map::new();
    doc.insert("tool".into(), "surface-walks".into());
    doc.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    doc.insert("command".into(), command.into());
    doc.insert("config".into(), config);
    doc.insert(payload_key.into(), payload);
    doc.insert("timestamp".into(), timestamp.into());
    let value = serde_json::Value::Object(doc);
    let mut text = serde_json::to_string_pretty(&value).expect("serializable document");
    text.push('\n');
    text
}

/// Markdown renderer for pocket-check rows.
pub fn render_pocket_md(rows: &[poisson::PocketRow]) -> String {
    let mut out = String::new();
    out.push_str("| g | delta | rate(1) | margin | pass |\n");
    out.push_str("|---|-------|---------|--------|------|\n");
    for r in rows {
        out.push_str(&format!(
            "| {} | {:.6} | {:.6} | {:.6} | {} |\n",
            r.g, r.delta, r.rate, r.margin, r.pass
        ));
    }
    out
}

/// CSV renderer for pocket-check rows.
pub fn render_pocket_csv(rows: &[poisson::PocketRow]) -> String {
    let mut out = String::from("g,delta,rateAtOne,margin,pass\n");
    for r in rows {
        out.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{}\n",
            r.g, r.delta, r.rate, r.margin, r.pass
        ));
    }
    out
}

/// JSON rows for pocket-check output.
pub fn pocket_rows_json(rows: &[poisson::PocketRow]) -> serde_json::Value {
    serde_json::Value::Array(
        rows.iter()
            .map(|r| {
                serde_json::json!({
                    "g": r.g,
                    "delta": r.delta,
                    "rateAtOne": r.rate,
                    "margin": r.margin,
                    "pass": r.pass,
                })
            })
            .collect(),
    )
}
