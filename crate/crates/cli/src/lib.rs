//! Command-line front end: argument types, the six subcommands and their
//! JSON/CSV rendering. `main.rs` only parses, runs and writes.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use euler_approx::approximation::Approximant;
use euler_approx::error_analysis::{error_report, ErrorReport};
use euler_approx::euler::TruncationLevel;
use euler_approx::numerics::DEFAULT_BITS;
use euler_approx::principal_part::{enumerate_poles, PoleWindow};
use euler_approx::reference::{l_reference, xi_reference};
use euler_approx::{BigComplex, DirichletCharacter, Error, Precision};

pub const TABLE_CHARS: [&str; 3] = ["5.4", "7.6", "8.5"];
pub const TABLE_S0: [&str; 5] = ["1/2+8i", "1/2+9i", "1/2+10i", "1/2+11i", "1/2+12i"];
pub const TABLE_U: [f64; 3] = [5.0, 7.0, 11.0];
/// Significant digits shown in table documents.
const TABLE_DIGITS: usize = 20;

#[derive(Parser, Debug)]
#[command(
    name = "euler-approx",
    version,
    about = "Entire approximations of Dirichlet L-functions from truncated Euler products",
    long_about = "Evaluates L≈_u and ξ≈_u, independent reference values, error tables \
                  with the exact error series and its incomplete-gamma bound, pole \
                  catalogues of ξ_u and functional-equation residuals.\n\n\
                  Exit status: 0 when every requested value met its accuracy target, \
                  1 when some did not, 2 on invalid input or evaluation failure \
                  (a JSON error object with a stable code is written to stderr)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// L≈_u(s, χ) (or ξ≈_u with --xi) with an error estimate
    Eval(EvalArgs),
    /// Reference L(s, χ) (or ξ with --xi) from the Hurwitz decomposition
    Oracle(OracleArgs),
    /// Tables of L(s₀, χ) and |L − L≈_u|, s₀ across and u down
    Table(TableArgs),
    /// Per-cell errors with the exact series and the incomplete-gamma bound
    ErrorTable(TableArgs),
    /// Poles of ξ_u with residues (Laurent coefficients at the origin)
    Poles(PolesArgs),
    /// Residual of ξ≈_u(s, χ) = ε(χ) ξ≈_u(1 − s, χ̄)
    FeCheck(EvalArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Primitive character as a Conrey label q.n (repeatable)
    #[arg(long = "char", value_name = "q.n")]
    pub chars: Vec<String>,
    /// Truncation level u (repeatable)
    #[arg(long = "u", value_name = "U")]
    pub us: Vec<f64>,
    /// Point s as "re,im" or shorthand like 1/2+8i (repeatable)
    #[arg(long = "s", value_name = "S", allow_hyphen_values = true)]
    pub ss: Vec<String>,
    /// Target precision in bits
    #[arg(long, default_value_t = DEFAULT_BITS, value_name = "BITS")]
    pub prec: u32,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the document here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    /// Evaluate the completed function ξ
    #[arg(long, conflicts_with = "l")]
    pub xi: bool,
    /// Evaluate L (default)
    #[arg(long)]
    pub l: bool,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: Common,
    /// Return ξ = g·L instead of L
    #[arg(long)]
    pub xi: bool,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct PolesArgs {
    #[command(flatten)]
    pub common: Common,
    /// Largest |Im ρ| listed
    #[arg(long, default_value_t = 30.0)]
    pub max_imag: f64,
    /// Gamma-factor poles are listed down to Re ρ = −depth
    #[arg(long, default_value_t = 10.0)]
    pub depth: f64,
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::Eval(a) | Command::FeCheck(a) => &a.common,
            Command::Oracle(a) => &a.common,
            Command::Table(a) | Command::ErrorTable(a) => &a.common,
            Command::Poles(a) => &a.common,
        }
    }
}

/// Failure with a stable machine-readable code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: e.code(),
            message: e.to_string(),
        }
    }
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        CliError {
            code: "INVALID_ARGUMENT",
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": { "code": self.code, "message": self.message } }).to_string()
    }
}

/// A rendered document and whether every accuracy target was met.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub document: String,
    pub ok: bool,
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Inputs {
    prec: Precision,
    chars: Vec<DirichletCharacter>,
    us: Vec<f64>,
    ss: Vec<(String, BigComplex)>,
}

fn resolve(common: &Common, need_s: bool, defaults: bool) -> CliResult<Inputs> {
    let prec = Precision::with_bits(common.prec)?;
    let labels: Vec<String> = if common.chars.is_empty() && defaults {
        TABLE_CHARS.iter().map(|s| s.to_string()).collect()
    } else {
        common.chars.clone()
    };
    if labels.is_empty() {
        return Err(CliError::invalid("at least one --char is required"));
    }
    // Every label is validated before any computation starts.
    let chars = labels
        .iter()
        .map(|l| DirichletCharacter::parse_label(l))
        .collect::<euler_approx::Result<Vec<_>>>()?;
    let us = if common.us.is_empty() && defaults {
        TABLE_U.to_vec()
    } else {
        common.us.clone()
    };
    for &u in &us {
        TruncationLevel::new(u)?;
    }
    let texts: Vec<String> = if common.ss.is_empty() && defaults {
        TABLE_S0.iter().map(|s| s.to_string()).collect()
    } else {
        common.ss.clone()
    };
    if need_s && texts.is_empty() {
        return Err(CliError::invalid("at least one --s is required"));
    }
    let ss = texts
        .into_iter()
        .map(|t| BigComplex::parse(&t, prec).map(|z| (t, z)))
        .collect::<euler_approx::Result<Vec<_>>>()?;
    Ok(Inputs { prec, chars, us, ss })
}

fn require_u(inputs: &Inputs) -> CliResult<()> {
    if inputs.us.is_empty() {
        Err(CliError::invalid("at least one --u is required"))
    } else {
        Ok(())
    }
}

/// Significant digits justified by an absolute error estimate.
pub fn digits_for(value: &BigComplex, est_err: f64, prec: Precision) -> usize {
    let cap = ((prec.bits() - prec.guard_bits().min(prec.bits() / 2)) as f64 * std::f64::consts::LOG10_2).floor() as usize;
    let mag = value.abs_f64();
    if mag == 0.0 || !(mag.is_finite()) {
        return cap.max(1);
    }
    if !(est_err > 0.0) {
        return cap.max(1);
    }
    let d = (mag / est_err).log10().floor();
    if d < 1.0 {
        1
    } else {
        (d as usize).min(cap).max(1)
    }
}

fn fmt_err(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else if !x.is_finite() {
        "inf".into()
    } else {
        format!("{x:.3e}")
    }
}

fn fmt_u(u: f64) -> String {
    format!("{u}")
}

fn join_complex(re: &str, im: &str) -> String {
    if im.starts_with('-') {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

#[derive(Serialize)]
struct ValueRecord {
    char: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    u: Option<f64>,
    s: String,
    quantity: &'static str,
    value_re: String,
    value_im: String,
    est_err: String,
    digits: usize,
    ok: bool,
}

impl ValueRecord {
    const CSV_HEADER: [&'static str; 9] = ["char", "u", "s", "quantity", "value_re", "value_im", "est_err", "digits", "ok"];

    fn csv_row(&self) -> Vec<String> {
        vec![
            self.char.clone(),
            self.u.map(fmt_u).unwrap_or_default(),
            self.s.clone(),
            self.quantity.to_string(),
            self.value_re.clone(),
            self.value_im.clone(),
            self.est_err.clone(),
            self.digits.to_string(),
            self.ok.to_string(),
        ]
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    command: &'a str,
    prec: u32,
    ok: bool,
    results: T,
}

fn render_values(command: &str, prec: Precision, records: Vec<ValueRecord>, format: Format) -> Outcome {
    let ok = records.iter().all(|r| r.ok);
    let document = match format {
        Format::Json => json(&Document {
            command,
            prec: prec.bits(),
            ok,
            results: &records,
        }),
        Format::Csv => {
            let mut rows = vec![header(&ValueRecord::CSV_HEADER)];
            rows.extend(records.iter().map(ValueRecord::csv_row));
            csv_doc(rows)
        }
    };
    Outcome { document, ok }
}

fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Rows rendered with standard CSV quoting; rows may differ in length.
fn csv_doc(rows: Vec<Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    for r in rows {
        w.write_record(&r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialise");
    s.push('\n');
    s
}

fn value_record(
    chi: &DirichletCharacter,
    u: Option<f64>,
    s: &str,
    quantity: &'static str,
    value: &BigComplex,
    est_err: f64,
    prec: Precision,
) -> ValueRecord {
    let digits = digits_for(value, est_err, prec);
    let (re, im) = value.to_string_digits(digits);
    let tolerance = prec.target() * value.abs_f64().max(1e-300) * 16.0;
    ValueRecord {
        char: chi.label(),
        u,
        s: s.to_string(),
        quantity,
        value_re: re,
        value_im: im,
        est_err: fmt_err(est_err),
        digits,
        ok: est_err.is_finite() && est_err <= tolerance.max(prec.target()),
    }
}

/// Runs one parsed command and renders its document.
pub fn run(command: &Command) -> CliResult<Outcome> {
    match command {
        Command::Eval(a) => cmd_eval(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Table(a) => cmd_table(a),
        Command::ErrorTable(a) => cmd_error_table(a),
        Command::Poles(a) => cmd_poles(a),
        Command::FeCheck(a) => cmd_fe_check(a),
    }
}

pub fn cmd_eval(args: &EvalArgs) -> CliResult<Outcome> {
    let inputs = resolve(&args.common, true, false)?;
    require_u(&inputs)?;
    let mut records = Vec::new();
    for chi in &inputs.chars {
        for &u in &inputs.us {
            let approx = Approximant::new(chi, &TruncationLevel::new(u)?, inputs.prec)?;
            for (text, s) in &inputs.ss {
                let (quantity, r) = if args.xi {
                    ("xi", approx.xi_approx(s)?)
                } else {
                    ("L", approx.l_approx(s)?)
                };
                records.push(value_record(chi, Some(u), text, quantity, &r.value, r.est_err, inputs.prec));
            }
        }
    }
    Ok(render_values("eval", inputs.prec, records, args.common.format))
}

pub fn cmd_oracle(args: &OracleArgs) -> CliResult<Outcome> {
    let inputs = resolve(&args.common, true, false)?;
    let mut records = Vec::new();
    for chi in &inputs.chars {
        for (text, s) in &inputs.ss {
            let (quantity, v) = if args.xi {
                ("xi", xi_reference(s, chi, inputs.prec)?)
            } else {
                ("L", l_reference(s, chi, inputs.prec)?)
            };
            let est = inputs.prec.target() * v.abs_f64();
            records.push(value_record(chi, None, text, quantity, &v, est, inputs.prec));
        }
    }
    Ok(render_values("oracle", inputs.prec, records, args.common.format))
}

pub fn cmd_fe_check(args: &EvalArgs) -> CliResult<Outcome> {
    let inputs = resolve(&args.common, true, false)?;
    require_u(&inputs)?;
    #[derive(Serialize)]
    struct FeRecord {
        char: String,
        u: f64,
        s: String,
        residual: String,
        magnitude: String,
        ok: bool,
    }
    let mut records = Vec::new();
    for chi in &inputs.chars {
        for &u in &inputs.us {
            let approx = Approximant::new(chi, &TruncationLevel::new(u)?, inputs.prec)?;
            for (text, s) in &inputs.ss {
                let r = approx.fe_residual(s)?;
                records.push(FeRecord {
                    char: chi.label(),
                    u,
                    s: text.clone(),
                    residual: fmt_err(r.residual),
                    magnitude: fmt_err(r.magnitude),
                    ok: r.residual <= inputs.prec.target() * r.magnitude.max(1.0),
                });
            }
        }
    }
    let ok = records.iter().all(|r| r.ok);
    let document = match args.common.format {
        Format::Json => json(&Document {
            command: "fe-check",
            prec: inputs.prec.bits(),
            ok,
            results: &records,
        }),
        Format::Csv => {
            let mut rows = vec![header(&["char", "u", "s", "residual", "magnitude", "ok"])];
            rows.extend(records.iter().map(|r| {
                vec![r.char.clone(), fmt_u(r.u), r.s.clone(), r.residual.clone(), r.magnitude.clone(), r.ok.to_string()]
            }));
            csv_doc(rows)
        }
    };
    Ok(Outcome { document, ok })
}

pub fn cmd_poles(args: &PolesArgs) -> CliResult<Outcome> {
    let inputs = resolve(&args.common, false, false)?;
    require_u(&inputs)?;
    let window = PoleWindow {
        max_imag: args.max_imag,
        max_real_depth: args.depth,
    };
    #[derive(Serialize)]
    struct PoleRecord {
        char: String,
        u: f64,
        source: String,
        location_re: String,
        location_im: String,
        order: u32,
        residue_re: String,
        residue_im: String,
        /// Coefficients of s^{-1}, …, s^{-order} at the origin.
        #[serde(skip_serializing_if = "Vec::is_empty")]
        laurent: Vec<[String; 2]>,
    }
    let digits = digits_for(&BigComplex::one(inputs.prec), inputs.prec.target(), inputs.prec);
    let mut records = Vec::new();
    for chi in &inputs.chars {
        for &u in &inputs.us {
            let poles = enumerate_poles(chi, &TruncationLevel::new(u)?, window, inputs.prec)?;
            for p in poles {
                let (lre, lim) = p.location.to_string_digits(digits);
                let residue = p.residue.clone().or_else(|| p.laurent.first().cloned());
                let (rre, rim) = residue
                    .map(|r| r.to_string_digits(digits))
                    .unwrap_or_else(|| ("0".into(), "0".into()));
                records.push(PoleRecord {
                    char: chi.label(),
                    u,
                    source: p.source.describe(),
                    location_re: lre,
                    location_im: lim,
                    order: p.order,
                    residue_re: rre,
                    residue_im: rim,
                    laurent: p
                        .laurent
                        .iter()
                        .map(|c| {
                            let (a, b) = c.to_string_digits(digits);
                            [a, b]
                        })
                        .collect(),
                });
            }
        }
    }
    let document = match args.common.format {
        Format::Json => json(&Document {
            command: "poles",
            prec: inputs.prec.bits(),
            ok: true,
            results: &records,
        }),
        Format::Csv => {
            let mut rows = vec![header(&[
                "char",
                "u",
                "source",
                "location_re",
                "location_im",
                "order",
                "residue_re",
                "residue_im",
            ])];
            rows.extend(records.iter().map(|r| {
                vec![
                    r.char.clone(),
                    fmt_u(r.u),
                    r.source.clone(),
                    r.location_re.clone(),
                    r.location_im.clone(),
                    r.order.to_string(),
                    r.residue_re.clone(),
                    r.residue_im.clone(),
                ]
            }));
            csv_doc(rows)
        }
    };
    Ok(Outcome { document, ok: true })
}

/// One computed cell of the error tables.
pub struct Cell {
    pub s_text: String,
    pub report: ErrorReport,
    /// `ξ^≈_u + Σ J(n)` agrees with the Hurwitz ξ within the series tail and
    /// evaluation slack.
    pub identity_ok: bool,
}

/// All cells for the requested grid, in (character, u, s₀) order.
pub fn compute_cells(inputs_common: &Common) -> CliResult<(Precision, Vec<DirichletCharacter>, Vec<f64>, Vec<String>, Vec<Cell>)> {
    let inputs = resolve(inputs_common, true, true)?;
    require_u(&inputs)?;
    let mut cells = Vec::new();
    for chi in &inputs.chars {
        for &u in &inputs.us {
            let approx = Approximant::new(chi, &TruncationLevel::new(u)?, inputs.prec)?;
            for (text, s) in &inputs.ss {
                let report = error_report(&approx, s)?;
                let identity_ok = report.identity_residual()
                    <= report.series_tail_bound + report.evaluation_slack + inputs.prec.target() * 1e-3 * report.exact_error.abs_f64();
                cells.push(Cell {
                    s_text: text.clone(),
                    report,
                    identity_ok,
                });
            }
        }
    }
    let texts = inputs.ss.iter().map(|(t, _)| t.clone()).collect();
    Ok((inputs.prec, inputs.chars, inputs.us, texts, cells))
}

fn table_complex(z: &BigComplex) -> String {
    let (re, im) = z.to_string_digits(TABLE_DIGITS);
    join_complex(&re, &im)
}

pub fn cmd_table(args: &TableArgs) -> CliResult<Outcome> {
    let (prec, chars, us, texts, cells) = compute_cells(&args.common)?;
    let ok = cells.iter().all(|c| c.identity_ok);
    let per_char = us.len() * texts.len();
    #[derive(Serialize)]
    struct Row {
        u: f64,
        l_error: Vec<String>,
        corollary_bound: String,
        identity_ok: Vec<bool>,
    }
    #[derive(Serialize)]
    struct CharTable {
        char: String,
        s0: Vec<String>,
        l_values: Vec<String>,
        rows: Vec<Row>,
    }
    let mut tables = Vec::new();
    for (ci, chi) in chars.iter().enumerate() {
        let block = &cells[ci * per_char..(ci + 1) * per_char];
        let l_values = block[..texts.len()].iter().map(|c| table_complex(&c.report.l_value)).collect();
        let rows = us
            .iter()
            .enumerate()
            .map(|(ui, &u)| {
                let row = &block[ui * texts.len()..(ui + 1) * texts.len()];
                Row {
                    u,
                    l_error: row.iter().map(|c| fmt_err(c.report.l_error())).collect(),
                    corollary_bound: fmt_err(row[0].report.corollary_bound),
                    identity_ok: row.iter().map(|c| c.identity_ok).collect(),
                }
            })
            .collect();
        tables.push(CharTable {
            char: chi.label(),
            s0: texts.clone(),
            l_values,
            rows,
        });
    }
    let document = match args.common.format {
        Format::Json => json(&Document {
            command: "table",
            prec: prec.bits(),
            ok,
            results: &tables,
        }),
        Format::Csv => {
            let mut rows = Vec::new();
            for t in &tables {
                rows.push([vec!["char".to_string(), "row".to_string()], t.s0.clone()].concat());
                rows.push([vec![t.char.clone(), "L".to_string()], t.l_values.clone()].concat());
                for r in &t.rows {
                    rows.push([vec![t.char.clone(), format!("u={}", fmt_u(r.u))], r.l_error.clone()].concat());
                }
            }
            csv_doc(rows)
        }
    };
    Ok(Outcome { document, ok })
}

pub fn cmd_error_table(args: &TableArgs) -> CliResult<Outcome> {
    let (prec, _, _, _, cells) = compute_cells(&args.common)?;
    let ok = cells.iter().all(|c| c.identity_ok);
    #[derive(Serialize)]
    struct ErrRecord {
        char: String,
        s0: String,
        u: String,
        l_error: String,
        xi_error: String,
        series_re: String,
        series_im: String,
        tail_bound: String,
        corollary_bound: String,
        identity_residual: String,
        identity_ok: bool,
    }
    let records: Vec<ErrRecord> = cells
        .iter()
        .map(|c| {
            let r = &c.report;
            let digits = digits_for(&r.series_error, r.series_tail_bound + r.evaluation_slack, prec).min(TABLE_DIGITS);
            let (sre, sim) = r.series_error.to_string_digits(digits);
            ErrRecord {
                char: r.label.clone(),
                s0: c.s_text.clone(),
                u: fmt_u(r.u),
                l_error: fmt_err(r.l_error()),
                xi_error: fmt_err(r.exact_error.abs_f64()),
                series_re: sre,
                series_im: sim,
                tail_bound: fmt_err(r.series_tail_bound),
                corollary_bound: fmt_err(r.corollary_bound),
                identity_residual: fmt_err(r.identity_residual()),
                identity_ok: c.identity_ok,
            }
        })
        .collect();
    let document = match args.common.format {
        Format::Json => json(&Document {
            command: "error-table",
            prec: prec.bits(),
            ok,
            results: &records,
        }),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &records {
                w.serialize(r).expect("in-memory csv");
            }
            String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
        }
    };
    Ok(Outcome { document, ok })
}
