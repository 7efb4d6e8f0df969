//! Command-line front end. [`run`] parses arguments, executes one subcommand
//! and writes a text or JSON report; the binary only forwards to it.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::chained::{chained_value, decompose_chained_with_residual, tightness_witness};
use crate::decomp222::{
    chsh_value, chsh_values, decompose_222_with_residual, decompose_local_222, estimator_weights, symmetry,
    variant_eberhard_family, variant_eberhard_values, violated_symmetry,
};
use crate::efficiency::{apply_efficiency, critical_efficiency, critical_efficiency_quadratic, EfficiencyParams};
use crate::error::{Error, Result};
use crate::io::{load_distribution, parse_settings, to_file};
use crate::matrix::{
    project_nonsignaling, validate, Decomposition, DistributionMatrix, Scenario, SettingsDistribution, Violation,
};
use crate::metrics::{kl_closest_local, tv_closest_local};
use crate::polytope::{enumerate_vertices, is_extremal};
use crate::rational::{fmt_decimal, fmt_q, parse_q, qi, Q};
use crate::vertex::{catalog_222, enumerate_gprs, enumerate_lds, GeneralizedPrBox, LocalDeterministic};

/// Largest equality residual that is silently repaired by projection.
const ROUNDING_TOLERANCE: (i64, i64) = (1, 1_000_000);

#[derive(Parser, Debug)]
#[command(name = "bellpoly", version, about = "Exact analysis of no-signaling Bell distributions")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct FileArg {
    /// Distribution file (JSON).
    file: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check probability and no-signaling constraints.
    Validate(FileArg),
    /// CHSH symmetry values of a (2,2,2) distribution.
    Chsh {
        file: PathBuf,
        #[arg(long, conflicts_with = "all")]
        symmetry: Option<usize>,
        #[arg(long)]
        all: bool,
    },
    /// One PR box plus LD weights, or an LD-only decomposition when local.
    Decompose(FileArg),
    /// The eight variant-Eberhard values.
    Eberhard {
        file: PathBuf,
        #[arg(long)]
        symmetry: Option<usize>,
    },
    /// Closest local distribution in total variation.
    TvClosest(FileArg),
    /// Closest local distribution in Kullback-Leibler divergence.
    KlClosest {
        file: PathBuf,
        /// `uniform` or a settings file.
        #[arg(long)]
        settings: Option<String>,
    },
    /// Apply detector efficiency.
    Eta {
        file: PathBuf,
        /// Efficiency for both parties (or Alice's when --value-b is given).
        #[arg(long)]
        value: String,
        #[arg(long)]
        value_b: Option<String>,
    },
    /// Efficiency below which the distribution becomes local.
    EtaCritical(FileArg),
    /// Mass on the zero cells of a generalized PR box.
    ChainedValue {
        file: PathBuf,
        #[arg(long, conflicts_with = "canonical")]
        gpr: Option<String>,
        #[arg(long)]
        canonical: bool,
    },
    /// Local weight attaining the chained bound.
    Tightness(FileArg),
    /// Enumerate polytope vertices.
    Vertices {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        slow: bool,
    },
    /// Rank test for extremality.
    ExtremalCheck(FileArg),
    /// Minimum-variance weights over the variant-Eberhard expressions.
    Estimator {
        file: PathBuf,
        #[arg(long)]
        settings: Option<String>,
    },
}

struct Report {
    command: String,
    input: Option<Value>,
    result: Value,
    text: Vec<String>,
    warnings: Vec<String>,
}

impl Report {
    fn new(command: &str, input: Option<Value>) -> Self {
        Report { command: command.into(), input, result: Value::Null, text: Vec::new(), warnings: Vec::new() }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let v = json!({
                    "command": self.command,
                    "input": self.input,
                    "result": self.result,
                    "warnings": self.warnings,
                });
                serde_json::to_string_pretty(&v).expect("serializable") + "\n"
            }
            Format::Text => {
                let mut s = String::new();
                for l in &self.text {
                    s.push_str(l);
                    s.push('\n');
                }
                s
            }
        }
    }
}

/// Runs the CLI on `args` (including the program name). Returns the exit
/// code: 0 success, 1 domain error, 2 malformed input or usage.
pub fn run<W: Write, E: Write>(args: &[String], out: &mut W, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let target: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let format = cli.format;
    match execute(cli.command) {
        Ok((report, code)) => {
            let _ = out.write_all(report.render(format).as_bytes());
            // JSON carries its warnings inline
            if let Format::Text = format {
                for w in &report.warnings {
                    let _ = writeln!(err, "warning: {w}");
                }
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Shape(_) | Error::Parse(_) | Error::Io(_) => 2,
        _ => 1,
    }
}

/// FNV-1a over the file bytes; identifies the input in reports.
fn digest(bytes: &[u8]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("fnv1a64:{h:016x}")
}

fn input_info(path: &Path) -> Result<Value> {
    let bytes = std::fs::read(path)?;
    Ok(json!({ "path": path.display().to_string(), "digest": digest(&bytes) }))
}

/// Exact decimal when the value terminates within 30 digits, otherwise
/// rounded to 12 places with a `~` prefix.
pub fn fmt_value(v: &Q) -> String {
    let mut d = v.denom().clone();
    let (mut twos, mut fives) = (0usize, 0usize);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while d.is_multiple_of(&two) {
        d /= &two;
        twos += 1;
    }
    while d.is_multiple_of(&five) {
        d /= &five;
        fives += 1;
    }
    let k = twos.max(fives);
    if d.is_one() && k <= 30 {
        fmt_decimal(v, k)
    } else {
        format!("~{}", fmt_decimal(v, 12))
    }
}

fn qjson(v: &Q) -> Value {
    json!({ "exact": fmt_q(v), "decimal": fmt_value(v) })
}

fn max_equality_residual(report: &[Violation]) -> Option<Q> {
    report
        .iter()
        .filter(|v| !matches!(v, Violation::Negative { .. }))
        .map(|v| v.residual().abs())
        .max()
}

/// The input as loaded, and an exactly nonsignaling version of it (projected
/// when the input misses the equalities by at most the rounding tolerance).
struct Prepared {
    raw: DistributionMatrix,
    exact: DistributionMatrix,
    settings: Option<SettingsDistribution>,
    info: Value,
    warnings: Vec<String>,
}

fn prepare(path: &Path) -> Result<Prepared> {
    let loaded = load_distribution(path)?;
    let info = input_info(path)?;
    let raw = loaded.matrix;
    let report = validate(&raw);
    let mut warnings = Vec::new();
    if report.iter().any(|v| matches!(v, Violation::Negative { .. })) {
        return Err(Error::Precondition("input has negative entries".into()));
    }
    let exact = if report.is_empty() {
        raw.clone()
    } else {
        let worst = max_equality_residual(&report).unwrap_or_else(Q::zero);
        let tol = Q::new(ROUNDING_TOLERANCE.0.into(), ROUNDING_TOLERANCE.1.into());
        if worst > tol {
            return Err(Error::Precondition(format!(
                "input is outside the no-signaling polytope (largest equality residual {})",
                fmt_value(&worst)
            )));
        }
        let p = project_nonsignaling(&raw);
        if !validate(&p).is_empty() {
            return Err(Error::Precondition(
                "projection onto the no-signaling equalities left negative entries".into(),
            ));
        }
        warnings.push(format!(
            "rounded input: equality residual up to {} repaired by least-norm projection (moved {} in TV)",
            fmt_value(&worst),
            fmt_value(&crate::matrix::cell_tv(&raw, &p))
        ));
        p
    };
    Ok(Prepared { raw, exact, settings: loaded.settings, info, warnings })
}

fn settings_from(arg: Option<&str>, p: &Prepared) -> Result<(SettingsDistribution, String)> {
    let sc = p.exact.scenario();
    match arg {
        Some("uniform") => Ok((SettingsDistribution::uniform(sc), "uniform".into())),
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            Ok((parse_settings(sc, &text)?, format!("from {path}")))
        }
        None => match &p.settings {
            Some(s) => Ok((s.clone(), "from distribution file".into())),
            None => Ok((
                SettingsDistribution::uniform(sc),
                "uniform (default; no settings distribution given)".into(),
            )),
        },
    }
}

fn require_222(dm: &DistributionMatrix) -> Result<()> {
    if dm.n() != 2 {
        return Err(Error::UnsupportedScenario(dm.n()));
    }
    Ok(())
}

fn ld_label(d: &LocalDeterministic) -> Value {
    let idx = if d.scenario().n() == 2 { catalog_222().ld_index(d) } else { None };
    json!({ "index": idx, "assignment": d.to_string() })
}

fn gpr_label(g: &GeneralizedPrBox) -> Value {
    let idx = if g.scenario().n() == 2 { catalog_222().pr_index(g) } else { None };
    json!({ "index": idx, "row_types": g.spec() })
}

fn ld_text(d: &LocalDeterministic) -> String {
    match (d.scenario().n() == 2).then(|| catalog_222().ld_index(d)).flatten() {
        Some(i) => format!("D{i} {d}"),
        None => d.to_string(),
    }
}

fn gpr_text(g: &GeneralizedPrBox) -> String {
    match (g.scenario().n() == 2).then(|| catalog_222().pr_index(g)).flatten() {
        Some(i) => format!("PR{i} {g}"),
        None => g.to_string(),
    }
}

fn decomposition_json(dec: &Decomposition) -> Value {
    json!({
        "pr_term": dec.pr_term.as_ref().map(|(g, w)| json!({ "box": gpr_label(g), "weight": qjson(w) })),
        "ld_terms": dec.ld_terms.iter().map(|(d, w)| json!({ "ld": ld_label(d), "weight": qjson(w) })).collect::<Vec<_>>(),
        "p_pr": qjson(&dec.pr_weight()),
    })
}

fn decomposition_text(dec: &Decomposition, r: &mut Report) {
    if let Some((g, w)) = &dec.pr_term {
        r.line(format!("p_PR = {}  ({})  {}", fmt_value(w), fmt_q(w), gpr_text(g)));
    } else {
        r.line("p_PR = 0 (local)");
    }
    for (d, w) in &dec.ld_terms {
        r.line(format!("  {:<24} {}  ({})", ld_text(d), fmt_value(w), fmt_q(w)));
    }
}

fn execute(cmd: Command) -> Result<(Report, i32)> {
    match cmd {
        Command::Validate(f) => cmd_validate(&f.file),
        Command::Chsh { file, symmetry, all } => cmd_chsh(&file, symmetry, all),
        Command::Decompose(f) => cmd_decompose(&f.file),
        Command::Eberhard { file, symmetry } => cmd_eberhard(&file, symmetry),
        Command::TvClosest(f) => cmd_tv(&f.file),
        Command::KlClosest { file, settings } => cmd_kl(&file, settings.as_deref()),
        Command::Eta { file, value, value_b } => cmd_eta(&file, &value, value_b.as_deref()),
        Command::EtaCritical(f) => cmd_eta_critical(&f.file),
        Command::ChainedValue { file, gpr, canonical: _ } => cmd_chained_value(&file, gpr.as_deref()),
        Command::Tightness(f) => cmd_tightness(&f.file),
        Command::Vertices { n, verify, slow } => cmd_vertices(n, verify, slow),
        Command::ExtremalCheck(f) => cmd_extremal(&f.file),
        Command::Estimator { file, settings } => cmd_estimator(&file, settings.as_deref()),
    }
}

fn cmd_validate(path: &Path) -> Result<(Report, i32)> {
    let loaded = load_distribution(path)?;
    let mut r = Report::new("validate", Some(input_info(path)?));
    let dm = loaded.matrix;
    let report = validate(&dm);
    let sc = dm.scenario();
    r.result = json!({
        "n": sc.n(),
        "valid": report.is_empty(),
        "violations": report.iter().map(|v| json!({ "constraint": v.describe(sc), "residual": qjson(v.residual()) })).collect::<Vec<_>>(),
    });
    if report.is_empty() {
        r.line(format!("valid: n = {}, all probability and no-signaling constraints hold", sc.n()));
    } else {
        r.line(format!("invalid: {} violated constraint(s)", report.len()));
        for v in &report {
            r.line(format!("  {} (residual {})", v.describe(sc), fmt_value(v.residual())));
        }
    }
    Ok((r, if report.is_empty() { 0 } else { 1 }))
}

fn cmd_chsh(path: &Path, sym: Option<usize>, _all: bool) -> Result<(Report, i32)> {
    let p = prepare(path)?;
    require_222(&p.exact)?;
    let mut r = Report::new("chsh", Some(p.info.clone()));
    r.warnings = p.warnings.clone();
    if let Some(k) = sym {
        let s = symmetry(k)?;
        let v = chsh_value(&p.raw, s)?;
        r.result = json!({ "symmetry": k, "value": qjson(&v) });
        r.line(format!("CHSH symmetry {k}: {}", fmt_value(&v)));
        return Ok((r, 0));
    }
    let vals = chsh_values(&p.raw)?;
    let violated = violated_symmetry(&p.exact)?.map(|s| s.index);
    r.result = json!({
        "values": vals.iter().enumerate().map(|(i, v)| json!({ "symmetry": i + 1, "value": qjson(v) })).collect::<Vec<_>>(),
        "violated_symmetry": violated,
    });
    for (i, v) in vals.iter().enumerate() {
        r.line(format!("CHSH symmetry {}: {}", i + 1, fmt_value(v)));
    }
    r.line(match violated {
        Some(k) => format!("violated: symmetry {k}"),
        None => "no symmetry exceeds 2 (local)".into(),
    });
    Ok((r, 0))
}

fn cmd_decompose(path: &Path) -> Result<(Report, i32)> {
    let p = prepare(path)?;
    let mut r = Report::new("decompose", Some(p.info.clone()));
    r.warnings = p.warnings.clone();
    let sc = p.raw.scenario();
    let nonlocal = if sc.n() == 2 {
        violated_symmetry(&p.exact)?.is_some()
    } else {
        crate::chained::identify_gpr(&p.exact)?.is_some()
    };
    let (dec, residual, method) = if !nonlocal {
        if sc.n() != 2 {
            return Err(Error::NotApplicable(
                "chained distribution is local; only nonlocal chained inputs are decomposed".into(),
            ));
        }
        (decompose_local_222(&p.exact)?, Q::zero(), "local")
    } else if sc.n() == 2 {
        let (d, res) = decompose_222_with_residual(&p.raw)?;
        (d, res, "pr+saturating")
    } else {
        let (d, res) = decompose_chained_with_residual(&p.raw)?;
        (d, res, "chained")
    };
    if !residual.is_zero() {
        r.warnings.push(format!(
            "rounded input: weights read from the determining cells; reconstruction residual {} in TV",
            fmt_value(&residual)
        ));
    }
    let mut res = decomposition_json(&dec);
    res["method"] = json!(method);
    res["residual"] = qjson(&residual);
    r.result = res;
    r.line(format!("decomposition ({method}, n = {})", sc.n()));
    decomposition_text(&dec, &mut r);
    r.line(format!("reconstruction residual (TV): {}", fmt_value(&residual)));
    Ok((r, 0))
}

fn cmd_eberhard(path: &Path, sym: Option<usize>) -> Result<(Report, i32)> {
    let p = prepare(path)?;
    require_222(&p.exact)?;
    let mut r = Report::new("eberhard", Some(p.info.clone()));
    r.warnings = p.warnings.clone();
    let s = match sym {
        Some(k) => symmetry(k)?,
        None => match violated_symmetry(&p.exact)? {
            Some(s) => s,
            None => {
                r.warnings.push("input is local; using symmetry 1".into());
                symmetry(1)?
            }
        },
    };
    let vals = variant_eberhard_values(&p.raw, s)?;
    let sc = Scenario::two_two_two();
    let fam = variant_eberhard_family();
    r.result = json!({
        "symmetry": s.index,
        "values": vals.iter().zip(fam).map(|(v, f)| json!({
            "support_cell": format!("{} {}", sc.row_label(f.support.0), f.support.1.label()),
            "lds": f.lds,
            "value": qjson(v),
        })).collect::<Vec<_>>(),
    });
    r.line(format!("variant-Eberhard values under symmetry {} (frame of PR1):", s.index));
    for (v, f) in vals.iter().zip(fam) {
        r.line(format!(
            "  {} {} minus LDs {:?}: {}",
            sc.row_label(f.support.0),
            f.support.1.label(),
            f.lds,
            fmt_value(v)
        ));
    }
    Ok((r, 0))
}

fn cmd_tv(path: &Path) -> Result<(Report, i32)> {
    let p = prepare(path)?;
    require_222(&p.exact)?;
    let mut r = Report::new("tv-closest", Some(p.info.clone()));
    r.warnings = p.warnings.clone();
    let c = tv_closest_local(&p.exact)?;
    r.result = json!({
        "distance": qjson(&c.distance),
        "weights": c.weights.iter().map(|(i, w)| json!({ "ld": i, "weight": qjson(w) })).collect::<Vec<_>>(),
        "closest": to_file(&c.closest, None),
    });
    r.line(format!("TV distance to local set: {}  ({})", fmt_value(&c.distance), fmt_q(&c.distance)));
    for (i, w) in &c.weights {
        r.line(format!("  s{i} = {}", fmt_value(w)));
    }
    Ok((r, 0))
}

fn cmd_kl(path: &Path, settings: Option<&str>) -> Result<(Report, i32)> {
    let p = prepare(path)?;
    require_222(&p.exact)?;
    let (s, note) = settings_from(settings, &p)?;
    let mut r = Report::new("kl-closest", Some(p.info.clone()));
    r.warnings = p.warnings.clone();
    let c = kl_closest_local(&p.exact, &s)?;
    r.result = json!({
        "distance_bits": c.distance,
        "weights": c.weights.iter().map(|(i, w)| json!({ "ld": i, "weight": w })).collect::<Vec<_>>(),
        "iterations": c.iterations,
        "settings": note,
    });
    r.line(format!("KL divergence to local set: {:.12} bits ({} iterations)", c.distance, c.iterations));
    r.line(format!("settings distribution: {note}"));
    for (i, w) in &c.weights {
        r.line(format!("  s{i} = {w:.12}"));
    }
    Ok((r, 0))
}

fn nonlocal_status(dm: &DistributionMatrix) -> Result<String> {
    if dm.n() == 2 {
        Ok(match violated_symmetry(dm)? {
            Some(s) => format!("nonlocal (CHSH symmetry {} = {})", s.index, fmt_value(&chsh_value(dm, s)?)),
            None => "local".into(),
        })
    } else {
        Ok(match crate::chained::identify_gpr(dm)? {
            Some(g) => format!("nonlocal (chained value {} for {g})", fmt_value(&chained_value(dm, &g)?)),
            None => "local".into(),
        })
    }
}

fn cmd_eta(path: &Path, value: &str, value_b: Option<&str>) -> Result<(Report, i32)> {
    let p = prepare(path)?;
    let ea = parse_q(value)?;
    let eb = match value_b {
        Some(v) => parse_q(v)?,
        None => ea.clone(),
    };
    let params = EfficiencyParams::new(ea, eb)?;
    let t = apply_efficiency(&p.exact, &params);
    let status = nonlocal_status(&t)?;
    let mut r = Report::new("eta", Some(p.info.clone()));
    r.warnings = p.warnings.clone();
    r.result = json!({
        "eta_a": qjson(&params.eta_a),
        "eta_b": qjson(&params.eta_b),
        "status": status,
        "distribution": to_file(&t, None),
    });
    r.line(format!("efficiency eta_a = {}, eta_b = {}", fmt_value(&params.eta_a), fmt_value(&params.eta_b)));
    r.line(format!("transformed distribution is {status}"));
    for k in 0..t.scenario().rows() {
        let row: Vec<String> = t.rows()[k].iter().map(fmt_value).collect();
        r.line(format!("  {:<6} {}", t.scenario().row_label(k), row.join("  ")));
    }
    Ok((r, 0))
}

/// Simplest rational (smallest denominator) in the closed interval `[lo, hi]`.
pub fn simplest_between(lo: &Q, hi: &Q) -> Q {
    let fl = lo.floor();
    if fl == *lo {
        return lo.clone();
    }
    if &fl + Q::one() <= *hi {
        return fl + Q::one();
    }
    // same integer part: recurse on reciprocals of the fractional parts
    let a = lo - &fl;
    let b = hi - &fl;
    let inner = simplest_between(&(Q::one() / b), &(Q::one() / a));
    fl + Q::one() / inner
}

fn cmd_eta_critical(path: &Path) -> Result<(Report, i32)> {
    let p = prepare(path)?;
    let mut r = Report::new("eta-critical", Some(p.info.clone()));
    r.warnings = p.warnings.clone();
    let Some(c) = critical_efficiency(&p.exact)? else {
        r.result = json!({ "critical_eta": Value::Null, "note": "already local" });
        r.line("already local at eta = 1; no critical efficiency");
        return Ok((r, 1));
    };
    let mut result = json!({
        "critical_eta": c.eta,
        "decimal": format!("{:.9}", c.eta),
        "bracket": [fmt_q(&c.bracket.0), fmt_q(&c.bracket.1)],
    });
    r.line(format!("critical efficiency: {:.9}", c.eta));
    if p.exact.n() == 2 {
        let sym = violated_symmetry(&p.exact)?.expect("nonlocal");
        let guess = simplest_between(&c.bracket.0, &c.bracket.1);
        let t = apply_efficiency(&p.exact, &EfficiencyParams::symmetric(guess.clone())?);
        let v = chsh_value(&t, sym)?;
        if v == qi(2) && guess.denom().to_u64().is_some_and(|d| d < 1_000_000) {
            let note = format!("CHSH({}) = 2", fmt_q(&guess));
            result["certificate"] = json!(note);
            r.line(format!("exact certificate: {note}"));
        } else if let Some(root) = critical_efficiency_quadratic(&p.exact)? {
            result["quadratic_root"] = json!(root);
            r.line(format!("threshold is not a small rational; quadratic root {root:.12}"));
        }
    }
    r.result = result;
    Ok((r, 0))
}

fn cmd_chained_value(path: &Path, gpr: Option<&str>) -> Result<(Report, i32)> {
    let p = prepare(path)?;
    let g = match gpr {
        Some(spec) => GeneralizedPrBox::from_spec(spec)?,
        None => GeneralizedPrBox::canonical(p.raw.scenario()),
    };
    let v = chained_value(&p.raw, &g)?;
    let mut r = Report::new("chained-value", Some(p.info.clone()));
    r.warnings = p.warnings.clone();
    r.result = json!({ "box": gpr_label(&g), "value": qjson(&v), "violates": v < Q::one() });
    r.line(format!("chained value for {}: {}", g, fmt_value(&v)));
    Ok((r, 0))
}

fn cmd_tightness(path: &Path) -> Result<(Report, i32)> {
    let p = prepare(path)?;
    let (w, dec) = tightness_witness(&p.exact)?;
    let g = &dec.pr_term.as_ref().expect("nonlocal").0;
    let v = chained_value(&p.exact, g)?;
    let mut r = Report::new("tightness", Some(p.info.clone()));
    r.warnings = p.warnings.clone();
    let mut res = decomposition_json(&dec);
    res["local_weight"] = qjson(&w);
    res["chained_value"] = qjson(&v);
    r.result = res;
    r.line(format!("local weight {} equals chained value {} for {}", fmt_value(&w), fmt_value(&v), g));
    decomposition_text(&dec, &mut r);
    Ok((r, 0))
}

fn cmd_vertices(n: usize, verify: bool, slow: bool) -> Result<(Report, i32)> {
    let sc = Scenario::new(n)?;
    let verts = enumerate_vertices(sc, slow)?;
    let mut r = Report::new("vertices", None);
    let mut line = format!("{} vertices", verts.len());
    let mut res = json!({ "n": n, "count": verts.len() });
    let mut code = 0;
    if verify {
        let mut want: Vec<Vec<Q>> = enumerate_lds(sc)?
            .iter()
            .map(|d| d.to_matrix().flat())
            .chain(enumerate_gprs(sc)?.iter().map(|g| g.to_matrix().flat()))
            .collect();
        want.sort();
        let mut got: Vec<Vec<Q>> = verts.iter().map(|m| m.flat()).collect();
        got.sort();
        let ok = got == want;
        res["catalogs_match"] = json!(ok);
        line.push_str(if ok { "; catalogs match" } else { "; catalogs DO NOT match" });
        if !ok {
            code = 1;
        }
    }
    r.result = res;
    r.line(line);
    Ok((r, code))
}

fn cmd_extremal(path: &Path) -> Result<(Report, i32)> {
    let loaded = load_distribution(path)?;
    let ext = is_extremal(&loaded.matrix)?;
    let mut r = Report::new("extremal-check", Some(input_info(path)?));
    r.result = json!({ "extremal": ext });
    r.line(if ext { "extremal: active constraints have full rank" } else { "not extremal" });
    Ok((r, 0))
}

fn cmd_estimator(path: &Path, settings: Option<&str>) -> Result<(Report, i32)> {
    let p = prepare(path)?;
    require_222(&p.exact)?;
    let (s, note) = settings_from(settings, &p)?;
    let w = estimator_weights(&p.exact, &s)?;
    let sym = violated_symmetry(&p.exact)?.expect("checked by estimator_weights");
    let mut r = Report::new("estimator", Some(p.info.clone()));
    r.warnings = p.warnings.clone();
    r.result = json!({ "symmetry": sym.index, "weights": w, "settings": note });
    r.line(format!("estimator weights over the variant-Eberhard expressions (symmetry {}):", sym.index));
    for (f, c) in variant_eberhard_family().iter().zip(w) {
        r.line(format!("  LDs {:?}: {c:.9}", f.lds));
    }
    r.line(format!("settings distribution: {note}"));
    Ok((r, 0))
}
