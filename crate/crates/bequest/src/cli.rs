//! Command-line front end over the library: pricing, valuation, strategy
//! queries, free-boundary curves, sensitivity sweeps, Monte Carlo runs, and
//! an analytic verification suite.
//!
//! Exit codes: 0 on success, 1 when a state lies outside an operation's
//! domain (or on I/O failure), 2 on validation errors (flags, config file,
//! parameters), 3 when `verify` finds a failing check.
//!
//! Settings resolve in three layers, later ones winning: built-in defaults,
//! a JSON config file (`--config PATH` or the `BEQUEST_CONFIG` environment
//! variable), then command-line flags. Every JSON report echoes the fully
//! resolved configuration so a run can be reproduced from its output alone.
//! `--out PATH` writes atomically (temp file, then rename), so a failed run
//! never leaves a partial file behind.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::model::{DomainError, ModelParams, ParamError, WealthState};
use crate::numerics::x_star;
use crate::oracle::{
    check_bvp_expected_bequest, check_variational_inequality, closed_form_bequest,
    closed_form_phi, simulate, GridSpec, OracleError, Product, StrategySpec,
};
use crate::single_premium::{
    expected_bequest_cash, expected_bequest_no_cash, hitting_time_safe_sp, optimal_action_cash,
    optimal_action_no_cash, phi_cash, phi_no_cash, safe_level_sp, surrender_threshold, SpAction,
    SpError,
};
use crate::term_life::{
    expected_bequest_term, hitting_times_term, optimal_coverage_term, phi_term, solve_term,
    w_star_sensitivities, SweepAxis, TermError, TermRegime,
};
use crate::whole_life::{
    buy_trigger_d0, classify_region, expected_bequest_whole, jump_boundary, optimal_action_whole,
    phi_whole, safe_level_whole, RegionLabel, WholeError, WlAction,
};

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "BEQUEST_CONFIG";

const EXIT_VERIFY_FAILED: u8 = 3;

// ---------------------------------------------------------------------------
// Errors and exit codes
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum CliError {
    /// Bad flags, config file, or model parameters (exit 2).
    Validation(String),
    /// State outside the requested operation's domain (exit 1).
    Domain(String),
    /// I/O or numerical failure (exit 1).
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Domain(_) | CliError::Runtime(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Domain(m) | CliError::Runtime(m) => m,
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

impl From<ParamError> for CliError {
    fn from(e: ParamError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<DomainError> for CliError {
    fn from(e: DomainError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<SpError> for CliError {
    fn from(e: SpError) -> Self {
        match e {
            SpError::Param(p) => p.into(),
            SpError::Domain(d) => d.into(),
        }
    }
}

impl From<TermError> for CliError {
    fn from(e: TermError) -> Self {
        match e {
            TermError::Param(p) => p.into(),
            TermError::Domain(d) => d.into(),
            TermError::Root(r) => CliError::Runtime(r.to_string()),
        }
    }
}

impl From<WholeError> for CliError {
    fn from(e: WholeError) -> Self {
        match e {
            WholeError::Param(p) => p.into(),
            WholeError::Domain(d) => d.into(),
            WholeError::Root(r) => CliError::Runtime(r.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Param(p) => p.into(),
            OracleError::Domain(d) => d.into(),
            OracleError::Root(r) => CliError::Runtime(r.to_string()),
            OracleError::Inadmissible { .. } | OracleError::NoPaths => {
                CliError::Validation(e.to_string())
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Output format for every subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// Aligned human-readable key/value or column layout.
    Table,
    /// Pretty-printed JSON with the effective config echoed.
    Json,
    /// Comma-separated, header row, LF line endings, full float precision.
    Csv,
}

fn parse_format(s: &str) -> Result<OutputFormat, CliError> {
    match s {
        "table" => Ok(OutputFormat::Table),
        "json" => Ok(OutputFormat::Json),
        "csv" => Ok(OutputFormat::Csv),
        other => Err(invalid(format!(
            "unknown format `{other}` (expected table | json | csv)"
        ))),
    }
}

fn parse_product(s: &str) -> Result<Product, CliError> {
    s.parse::<Product>().map_err(invalid)
}

/// Fully resolved invocation settings; echoed in every JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product: Option<Product>,
    pub b: f64,
    pub r: f64,
    pub lambda: f64,
    pub theta: f64,
    pub theta_bar: f64,
    pub rho: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    pub d: f64,
    pub n_paths: u64,
    pub seed: u64,
    pub grid: usize,
    pub format: OutputFormat,
    pub precision: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
}

impl RunConfig {
    fn params(&self) -> Result<ModelParams, CliError> {
        Ok(ModelParams::new(
            self.b,
            self.r,
            self.lambda,
            self.theta,
            self.theta_bar,
            self.rho,
        )?)
    }

    fn require_product(&self) -> Result<Product, CliError> {
        self.product
            .ok_or_else(|| invalid("--product is required (sp | sp-cash | term | whole)"))
    }

    fn require_w(&self) -> Result<f64, CliError> {
        self.w
            .ok_or_else(|| invalid("--w is required for this command"))
    }

    fn state(&self) -> Result<WealthState, CliError> {
        Ok(WealthState::new(self.require_w()?, self.d)?)
    }
}

/// JSON config file shape. Any subset of keys; unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    product: Option<String>,
    b: Option<f64>,
    r: Option<f64>,
    lambda: Option<f64>,
    theta: Option<f64>,
    theta_bar: Option<f64>,
    rho: Option<f64>,
    w: Option<f64>,
    d: Option<f64>,
    n_paths: Option<u64>,
    seed: Option<u64>,
    grid: Option<usize>,
    format: Option<String>,
    precision: Option<usize>,
    strategy: Option<String>,
    axis: Option<String>,
    values: Option<Vec<f64>>,
}

fn load_file_config(explicit: Option<&Path>) -> Result<FileConfig, CliError> {
    let path: Option<PathBuf> = match explicit {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::var_os(CONFIG_ENV).map(PathBuf::from),
    };
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| invalid(format!("invalid config {}: {e}", path.display())))
}

/// Per-command settings that resolve alongside the common flags.
#[derive(Debug, Default)]
struct Overrides {
    w: Option<f64>,
    d: Option<f64>,
    grid: Option<usize>,
    n_paths: Option<u64>,
    seed: Option<u64>,
    strategy: Option<String>,
    axis: Option<String>,
}

fn resolve(common: &CommonArgs, over: Overrides) -> Result<(RunConfig, FileConfig), CliError> {
    let file = load_file_config(common.config.as_deref())?;
    let product = match common.product.as_deref().or(file.product.as_deref()) {
        Some(s) => Some(parse_product(s)?),
        None => None,
    };
    check_product_flag_consistency(common, product)?;
    let theta = common.theta.or(file.theta).unwrap_or(0.25);
    let format = match common.format.as_deref().or(file.format.as_deref()) {
        Some(s) => parse_format(s)?,
        None => OutputFormat::Table,
    };
    let cfg = RunConfig {
        product,
        b: common.b.or(file.b).unwrap_or(1.0),
        r: common.r.or(file.r).unwrap_or(0.03),
        lambda: common.lambda.or(file.lambda).unwrap_or(0.08),
        theta,
        theta_bar: common.theta_bar.or(file.theta_bar).unwrap_or(theta),
        rho: common.rho.or(file.rho).unwrap_or(1.0),
        w: over.w.or(file.w),
        d: over.d.or(file.d).unwrap_or(0.0),
        n_paths: over.n_paths.or(file.n_paths).unwrap_or(100_000),
        seed: over.seed.or(file.seed).unwrap_or(42),
        grid: over.grid.or(file.grid).unwrap_or(200),
        format,
        precision: common.precision.or(file.precision).unwrap_or(6),
        strategy: over.strategy.or_else(|| file.strategy.clone()),
        axis: over.axis.or_else(|| file.axis.clone()),
    };
    Ok((cfg, file))
}

/// Flags that only make sense for some products are rejected elsewhere
/// rather than silently ignored. Config-file keys are exempt: one file may
/// serve several products.
fn check_product_flag_consistency(
    common: &CommonArgs,
    product: Option<Product>,
) -> Result<(), CliError> {
    let Some(p) = product else { return Ok(()) };
    let single = matches!(p, Product::SinglePremium | Product::SinglePremiumCash);
    if common.rho.is_some() && p != Product::SinglePremiumCash {
        return Err(invalid(format!(
            "--rho applies only to --product sp-cash, not {p}"
        )));
    }
    if common.theta.is_some() && !single {
        return Err(invalid(format!(
            "--theta applies only to the single-premium products, not {p}"
        )));
    }
    if common.theta_bar.is_some() && single {
        return Err(invalid(format!(
            "--theta-bar applies only to term and whole-life products, not {p}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Argument declarations
// ---------------------------------------------------------------------------

#[derive(Parser, Debug)]
#[command(
    name = "bequest",
    version,
    about = "Life-insurance purchasing strategies that maximize the probability of meeting a bequest goal"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Premium rates and the safe wealth level for a product
    Price(PriceArgs),
    /// Success probability, expected bequest, and optimal action at a state
    Value(StateArgs),
    /// Optimal action and every decision threshold at a state
    Strategy(StateArgs),
    /// Free boundaries: critical wealth (term) or purchase curves (whole)
    Boundary(BoundaryArgs),
    /// Critical-wealth sensitivity along a parameter axis
    Sweep(SweepArgs),
    /// Monte Carlo run of a strategy from a state, checked against closed form
    Simulate(SimulateArgs),
    /// Analytic residual and property checks; exits 3 if any check fails
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Product: sp | sp-cash | term | whole
    #[arg(long)]
    product: Option<String>,
    /// Bequest goal
    #[arg(long)]
    b: Option<f64>,
    /// Riskless interest rate
    #[arg(long)]
    r: Option<f64>,
    /// Force of mortality
    #[arg(long)]
    lambda: Option<f64>,
    /// Proportional loading on the single premium (sp, sp-cash)
    #[arg(long)]
    theta: Option<f64>,
    /// Proportional loading on the continuous premium rate (term, whole)
    #[arg(long = "theta-bar")]
    theta_bar: Option<f64>,
    /// Surrender charge in [0, 1] (sp-cash)
    #[arg(long)]
    rho: Option<f64>,
    /// Output format: table | json | csv
    #[arg(long)]
    format: Option<String>,
    /// Write output to PATH atomically instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// JSON config file with default settings (flags win)
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Significant digits in table output
    #[arg(long)]
    precision: Option<usize>,
}

#[derive(Args, Debug)]
struct PriceArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Death benefit already in force
    #[arg(long)]
    d: Option<f64>,
}

#[derive(Args, Debug)]
struct StateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Current wealth
    #[arg(long)]
    w: Option<f64>,
    /// Death benefit already in force
    #[arg(long)]
    d: Option<f64>,
}

#[derive(Args, Debug)]
struct BoundaryArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of wealth grid points
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Axis to vary: lambda | r | h | b
    #[arg(long)]
    axis: Option<String>,
    /// Comma-separated axis values (defaults to a built-in table)
    #[arg(long)]
    values: Option<String>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    state: StateArgs,
    /// optimal | never-buy | buy-now-full | threshold-buy:W | surrender-below:W
    #[arg(long)]
    strategy: Option<String>,
    /// Number of simulated lifetimes
    #[arg(long = "n-paths")]
    n_paths: Option<u64>,
    /// Master random seed (echoed in the report)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Residual grid resolution per axis
    #[arg(long)]
    grid: Option<usize>,
    /// Seed for the randomized property fuzz
    #[arg(long)]
    seed: Option<u64>,
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Parses `args` (including the program name) and runs one subcommand.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Cmd::Price(a) => {
            let (cfg, _) = resolve(&a.common, Overrides { d: a.d, ..Overrides::default() })?;
            let content = cmd_price(&cfg)?;
            emit(a.common.out.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Value(a) => {
            let over = Overrides { w: a.w, d: a.d, ..Overrides::default() };
            let (cfg, _) = resolve(&a.common, over)?;
            let content = cmd_value(&cfg)?;
            emit(a.common.out.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Strategy(a) => {
            let over = Overrides { w: a.w, d: a.d, ..Overrides::default() };
            let (cfg, _) = resolve(&a.common, over)?;
            let content = cmd_strategy(&cfg)?;
            emit(a.common.out.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Boundary(a) => {
            let (cfg, _) = resolve(&a.common, Overrides { grid: a.grid, ..Overrides::default() })?;
            let content = cmd_boundary(&cfg)?;
            emit(a.common.out.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Sweep(a) => {
            let over = Overrides { axis: a.axis.clone(), ..Overrides::default() };
            let (cfg, file) = resolve(&a.common, over)?;
            let content = cmd_sweep(&cfg, a.values.as_deref(), &file)?;
            emit(a.common.out.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Simulate(a) => {
            let over = Overrides {
                w: a.state.w,
                d: a.state.d,
                n_paths: a.n_paths,
                seed: a.seed,
                strategy: a.strategy.clone(),
                ..Overrides::default()
            };
            let (cfg, _) = resolve(&a.state.common, over)?;
            let content = cmd_simulate(&cfg)?;
            emit(a.state.common.out.as_deref(), &content)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify(a) => {
            let over = Overrides { grid: a.grid, seed: a.seed, ..Overrides::default() };
            let (cfg, _) = resolve(&a.common, over)?;
            let (content, all_pass) = cmd_verify(&cfg)?;
            emit(a.common.out.as_deref(), &content)?;
            Ok(if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VERIFY_FAILED)
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Rendering helpers
// ---------------------------------------------------------------------------

/// `v` to `digits` significant digits in plain decimal notation.
fn sig(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let mag = v.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - mag).max(0) as usize;
    format!("{v:.decimals$}")
}

fn sci(v: f64) -> String {
    format!("{v:.2e}")
}

/// Full-precision float for CSV: shortest string that round-trips.
fn full(v: f64) -> String {
    format!("{v}")
}

fn full_opt(v: Option<f64>) -> String {
    v.map(full).unwrap_or_default()
}

fn table_kv(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        out.push_str(&format!("{k:<width$}  {v}\n"));
    }
    out
}

fn table_columns(headers: &[&str], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (i, cell) in row.iter().enumerate().take(cols) {
            widths[i] = widths[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let render = |cells: Vec<String>, out: &mut String| {
        let line = cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{c:<w$}", w = widths[i]))
            .collect::<Vec<_>>()
            .join("  ");
        out.push_str(line.trim_end());
        out.push('\n');
    };
    render(headers.iter().map(|h| h.to_string()).collect(), &mut out);
    for row in rows {
        render(row.clone(), &mut out);
    }
    out
}

fn json_report(cfg: &RunConfig, report: serde_json::Value) -> String {
    let doc = json!({ "config": cfg, "report": report });
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

fn csv_doc(header: &str, rows: &[Vec<String>]) -> String {
    let mut out = String::with_capacity(rows.len() * 32 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Prints to stdout, or writes atomically to `path` via a sibling temp file.
fn emit(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    let Some(path) = path else {
        print!("{content}");
        return Ok(());
    };
    let mut tmp_name = path
        .file_name()
        .ok_or_else(|| invalid(format!("--out path {} has no file name", path.display())))?
        .to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, content)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| CliError::Runtime(format!("cannot rename {} to {}: {e}", tmp.display(), path.display())))
}

fn regime_str(regime: TermRegime) -> &'static str {
    match regime {
        TermRegime::LambdaGtR => "lambda>r",
        TermRegime::LambdaLeR => "lambda<=r",
    }
}

fn region_str(region: RegionLabel) -> &'static str {
    match region {
        RegionLabel::R0 => "R0",
        RegionLabel::Ra => "Ra",
        RegionLabel::RbWait => "Rb-wait",
        RegionLabel::RbJump => "Rb-jump",
        RegionLabel::Safe => "safe",
    }
}

fn sp_action_str(action: &SpAction, digits: usize) -> String {
    match action {
        SpAction::Wait => "wait".to_string(),
        SpAction::BuyAdditional { amount } => format!("buy-additional:{}", sig(*amount, digits)),
        SpAction::SurrenderAll { cash_received } => {
            format!("surrender-all:{}", sig(*cash_received, digits))
        }
        SpAction::AlreadyFunded => "already-funded".to_string(),
    }
}

fn wl_action_str(action: &WlAction, digits: usize) -> String {
    match action {
        WlAction::NoMoreInsurance => "no-more-insurance".to_string(),
        WlAction::WaitThenTrack => "wait-then-track".to_string(),
        WlAction::Wait => "wait".to_string(),
        WlAction::JumpToFullThenTrack { amount } => {
            format!("jump-to-full:{}", sig(*amount, digits))
        }
    }
}

/// Maps a `r = 0` rejection to `None` so φ-only reports still render.
fn term_bequest_opt(params: &ModelParams, w: f64) -> Result<Option<f64>, CliError> {
    match expected_bequest_term(params, w) {
        Ok(v) => Ok(Some(v)),
        Err(TermError::Param(ParamError::ZeroInterestRate { .. })) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

// ---------------------------------------------------------------------------
// price
// ---------------------------------------------------------------------------

fn cmd_price(cfg: &RunConfig) -> Result<String, CliError> {
    let params = cfg.params()?;
    let product = cfg.require_product()?;
    let p = cfg.precision;
    let (report, rows): (serde_json::Value, Vec<(&str, String)>) = match product {
        Product::SinglePremium | Product::SinglePremiumCash => {
            let rate = params.single_premium_rate()?;
            let safe = safe_level_sp(&params, cfg.d)?;
            let cost_now = rate * (params.b - cfg.d);
            let mut rows = vec![
                ("product", product.to_string()),
                ("single_premium_rate", sig(rate, p)),
                ("d", sig(cfg.d, p)),
                ("safe_level", sig(safe, p)),
                ("cost_to_fund_goal", sig(cost_now, p)),
            ];
            let mut report = json!({
                "product": product,
                "single_premium_rate": rate,
                "d": cfg.d,
                "safe_level": safe,
                "cost_to_fund_goal": cost_now,
            });
            if product == Product::SinglePremiumCash {
                let thr = surrender_threshold(&params, cfg.d)?;
                let cash_rate = (1.0 - params.rho) * rate;
                rows.push(("cash_value_rate", sig(cash_rate, p)));
                rows.push(("surrender_threshold", sig(thr, p)));
                report["cash_value_rate"] = json!(cash_rate);
                report["surrender_threshold"] = json!(thr);
            }
            (report, rows)
        }
        Product::Term => {
            let h = params.continuous_premium_rate()?;
            let sol = solve_term(&params)?;
            let report = json!({
                "product": product,
                "continuous_premium_rate": h,
                "safe_level": sol.safe_level,
                "regime": sol.regime,
            });
            let rows = vec![
                ("product", product.to_string()),
                ("continuous_premium_rate", sig(h, p)),
                ("safe_level", sig(sol.safe_level, p)),
                ("regime", regime_str(sol.regime).to_string()),
            ];
            (report, rows)
        }
        Product::Whole => {
            let h = params.continuous_premium_rate()?;
            let safe = safe_level_whole(&params, cfg.d)?;
            let kink = params.r * params.b / (params.r + h);
            let report = json!({
                "product": product,
                "continuous_premium_rate": h,
                "d": cfg.d,
                "safe_level": safe,
                "goal_kink": kink,
                "premium_flow": h * cfg.d,
            });
            let rows = vec![
                ("product", product.to_string()),
                ("continuous_premium_rate", sig(h, p)),
                ("d", sig(cfg.d, p)),
                ("safe_level", sig(safe, p)),
                ("goal_kink", sig(kink, p)),
                ("premium_flow", sig(h * cfg.d, p)),
            ];
            (report, rows)
        }
    };
    Ok(match cfg.format {
        OutputFormat::Table => table_kv(&rows),
        OutputFormat::Json => json_report(cfg, report),
        OutputFormat::Csv => scalar_csv(&report),
    })
}

/// One-row CSV from a flat JSON object: header of field names, then values.
fn scalar_csv(report: &serde_json::Value) -> String {
    let obj = report.as_object().expect("flat report object");
    let headers: Vec<&str> = obj.keys().map(String::as_str).collect();
    let row: Vec<String> = obj
        .values()
        .map(|v| match v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Null => String::new(),
            other => other.to_string(),
        })
        .collect();
    csv_doc(&headers.join(","), &[row])
}

// ---------------------------------------------------------------------------
// value
// ---------------------------------------------------------------------------

fn cmd_value(cfg: &RunConfig) -> Result<String, CliError> {
    let params = cfg.params()?;
    let product = cfg.require_product()?;
    let p = cfg.precision;
    let (report, rows) = match product {
        Product::SinglePremium | Product::SinglePremiumCash => {
            value_single(cfg, &params, product)?
        }
        Product::Term => {
            if cfg.d != 0.0 {
                return Err(invalid(
                    "term coverage carries no pre-existing benefit; use --d 0",
                ));
            }
            let w = cfg.require_w()?;
            let phi = phi_term(&params, w)?;
            let coverage = optimal_coverage_term(&params, w)?;
            let expected = term_bequest_opt(&params, w)?;
            let sol = solve_term(&params)?;
            let report = json!({
                "product": product,
                "w": w,
                "phi": phi,
                "expected_bequest": expected,
                "coverage": coverage,
                "safe_level": sol.safe_level,
                "w_star": sol.w_star,
                "regime": sol.regime,
            });
            let rows = vec![
                ("product", product.to_string()),
                ("w", sig(w, p)),
                ("phi", sig(phi, p)),
                (
                    "expected_bequest",
                    expected.map_or("undefined for r = 0".to_string(), |v| sig(v, p)),
                ),
                ("coverage", sig(coverage, p)),
                ("safe_level", sig(sol.safe_level, p)),
                ("w_star", sol.w_star.map_or("-".to_string(), |v| sig(v, p))),
                ("regime", regime_str(sol.regime).to_string()),
            ];
            (report, rows)
        }
        Product::Whole => {
            let state = cfg.state()?;
            let safe = safe_level_whole(&params, state.d)?;
            let region = if state.w >= safe {
                RegionLabel::Safe
            } else {
                classify_region(&params, &state)?
            };
            let phi = phi_whole(&params, &state)?;
            let expected = expected_bequest_whole(&params, &state)?;
            let action = optimal_action_whole(&params, &state)?;
            let report = json!({
                "product": product,
                "w": state.w,
                "d": state.d,
                "phi": phi,
                "expected_bequest": expected,
                "region": region,
                "action": action,
                "safe_level": safe,
            });
            let rows = vec![
                ("product", product.to_string()),
                ("w", sig(state.w, p)),
                ("d", sig(state.d, p)),
                ("phi", sig(phi, p)),
                ("expected_bequest", sig(expected, p)),
                ("region", region_str(region).to_string()),
                ("action", wl_action_str(&action, p)),
                ("safe_level", sig(safe, p)),
            ];
            (report, rows)
        }
    };
    Ok(match cfg.format {
        OutputFormat::Table => table_kv(&rows),
        OutputFormat::Json => json_report(cfg, report),
        OutputFormat::Csv => scalar_csv(&report),
    })
}

type Rendered = (serde_json::Value, Vec<(&'static str, String)>);

fn value_single(
    cfg: &RunConfig,
    params: &ModelParams,
    product: Product,
) -> Result<Rendered, CliError> {
    let cash = product == Product::SinglePremiumCash;
    let state = cfg.state()?;
    let p = cfg.precision;
    let phi = if cash {
        phi_cash(params, state)?
    } else {
        phi_no_cash(params, state)?
    };
    let action = if cash {
        optimal_action_cash(params, state)?
    } else {
        optimal_action_no_cash(params, state)?
    };
    let funded = state.d >= params.b;
    let expected = if funded {
        None
    } else if cash {
        Some(expected_bequest_cash(params, state)?)
    } else {
        Some(expected_bequest_no_cash(params, state)?)
    };
    let safe = if funded {
        None
    } else {
        Some(safe_level_sp(params, state.d)?)
    };
    let mut report = json!({
        "product": product,
        "w": state.w,
        "d": state.d,
        "phi": phi,
        "expected_bequest": expected,
        "action": action,
        "safe_level": safe,
    });
    let mut rows = vec![
        ("product", product.to_string()),
        ("w", sig(state.w, p)),
        ("d", sig(state.d, p)),
        ("phi", sig(phi, p)),
        (
            "expected_bequest",
            expected.map_or("goal already met".to_string(), |v| sig(v, p)),
        ),
        ("action", sp_action_str(&action, p)),
        ("safe_level", safe.map_or("-".to_string(), |v| sig(v, p))),
    ];
    if cash && !funded {
        let thr = surrender_threshold(params, state.d)?;
        report["surrender_threshold"] = json!(thr);
        rows.push(("surrender_threshold", sig(thr, p)));
    }
    Ok((report, rows))
}

// ---------------------------------------------------------------------------
// strategy
// ---------------------------------------------------------------------------

fn cmd_strategy(cfg: &RunConfig) -> Result<String, CliError> {
    let params = cfg.params()?;
    let product = cfg.require_product()?;
    let p = cfg.precision;
    let (report, rows) = match product {
        Product::SinglePremium | Product::SinglePremiumCash => {
            let cash = product == Product::SinglePremiumCash;
            let state = cfg.state()?;
            let action = if cash {
                optimal_action_cash(&params, state)?
            } else {
                optimal_action_no_cash(&params, state)?
            };
            let funded = state.d >= params.b;
            let rate = params.single_premium_rate()?;
            let safe = if funded { None } else { Some(safe_level_sp(&params, state.d)?) };
            let wealth_shortfall = safe.map(|s| (s - state.w).max(0.0));
            let mut report = json!({
                "product": product,
                "w": state.w,
                "d": state.d,
                "action": action,
                "single_premium_rate": rate,
                "safe_level": safe,
                "wealth_shortfall": wealth_shortfall,
            });
            let mut rows = vec![
                ("product", product.to_string()),
                ("w", sig(state.w, p)),
                ("d", sig(state.d, p)),
                ("action", sp_action_str(&action, p)),
                ("single_premium_rate", sig(rate, p)),
                ("safe_level", safe.map_or("-".to_string(), |v| sig(v, p))),
                (
                    "wealth_shortfall",
                    wealth_shortfall.map_or("-".to_string(), |v| sig(v, p)),
                ),
            ];
            if cash && !funded {
                let thr = surrender_threshold(&params, state.d)?;
                let cash_now = (1.0 - params.rho) * rate * state.d;
                report["surrender_threshold"] = json!(thr);
                report["cash_value_now"] = json!(cash_now);
                rows.push(("surrender_threshold", sig(thr, p)));
                rows.push(("cash_value_now", sig(cash_now, p)));
            }
            (report, rows)
        }
        Product::Term => {
            if cfg.d != 0.0 {
                return Err(invalid(
                    "term coverage carries no pre-existing benefit; use --d 0",
                ));
            }
            let w = cfg.require_w()?;
            let h = params.continuous_premium_rate()?;
            let coverage = optimal_coverage_term(&params, w)?;
            let sol = solve_term(&params)?;
            let report = json!({
                "product": product,
                "w": w,
                "coverage": coverage,
                "premium_flow": h * coverage,
                "safe_level": sol.safe_level,
                "w_star": sol.w_star,
                "regime": sol.regime,
            });
            let rows = vec![
                ("product", product.to_string()),
                ("w", sig(w, p)),
                ("coverage", sig(coverage, p)),
                ("premium_flow", sig(h * coverage, p)),
                ("safe_level", sig(sol.safe_level, p)),
                ("w_star", sol.w_star.map_or("-".to_string(), |v| sig(v, p))),
                ("regime", regime_str(sol.regime).to_string()),
            ];
            (report, rows)
        }
        Product::Whole => {
            let state = cfg.state()?;
            let h = params.continuous_premium_rate()?;
            let safe = safe_level_whole(&params, state.d)?;
            let region = if state.w >= safe {
                RegionLabel::Safe
            } else {
                classify_region(&params, &state)?
            };
            let action = optimal_action_whole(&params, &state)?;
            let term_safe = h * params.b / (params.r + h);
            let dj = if state.w <= term_safe {
                Some(jump_boundary(&params, state.w)?)
            } else {
                None
            };
            let d0 = if state.w <= term_safe {
                Some(buy_trigger_d0(&params, state.w)?)
            } else {
                None
            };
            let report = json!({
                "product": product,
                "w": state.w,
                "d": state.d,
                "region": region,
                "action": action,
                "safe_level": safe,
                "jump_boundary": dj,
                "buy_trigger": d0,
                "premium_flow": h * state.d,
            });
            let rows = vec![
                ("product", product.to_string()),
                ("w", sig(state.w, p)),
                ("d", sig(state.d, p)),
                ("region", region_str(region).to_string()),
                ("action", wl_action_str(&action, p)),
                ("safe_level", sig(safe, p)),
                ("jump_boundary", dj.map_or("-".to_string(), |v| sig(v, p))),
                ("buy_trigger", d0.map_or("-".to_string(), |v| sig(v, p))),
                ("premium_flow", sig(h * state.d, p)),
            ];
            (report, rows)
        }
    };
    Ok(match cfg.format {
        OutputFormat::Table => table_kv(&rows),
        OutputFormat::Json => json_report(cfg, report),
        OutputFormat::Csv => scalar_csv(&report),
    })
}

// ---------------------------------------------------------------------------
// boundary
// ---------------------------------------------------------------------------

fn cmd_boundary(cfg: &RunConfig) -> Result<String, CliError> {
    let params = cfg.params()?;
    let product = cfg.require_product()?;
    match product {
        Product::Term => {
            let sol = solve_term(&params)?;
            let p = cfg.precision;
            let report = json!({
                "product": product,
                "w_star": sol.w_star,
                "safe_level": sol.safe_level,
                "regime": sol.regime,
            });
            Ok(match cfg.format {
                OutputFormat::Table => table_kv(&[
                    ("product", product.to_string()),
                    ("w_star", sol.w_star.map_or("-".to_string(), |v| sig(v, p))),
                    ("safe_level", sig(sol.safe_level, p)),
                    ("regime", regime_str(sol.regime).to_string()),
                ]),
                OutputFormat::Json => json_report(cfg, report),
                OutputFormat::Csv => csv_doc(
                    "w_star,safe_level,regime",
                    &[vec![
                        full_opt(sol.w_star),
                        full(sol.safe_level),
                        regime_str(sol.regime).to_string(),
                    ]],
                ),
            })
        }
        Product::Whole => boundary_whole(cfg, &params),
        _ => Err(invalid(
            "boundary requires --product term or --product whole",
        )),
    }
}

fn boundary_whole(cfg: &RunConfig, params: &ModelParams) -> Result<String, CliError> {
    let h = params.continuous_premium_rate()?;
    let sol = solve_term(params)?;
    let term_safe = sol.safe_level;
    let kink = params.r * params.b / (params.r + h);
    let n = cfg.grid.max(2);
    let mut curve: Vec<(f64, f64, f64)> = Vec::with_capacity(n);
    for i in 0..n {
        let w = term_safe * ((i as f64) / ((n - 1) as f64));
        let dj = jump_boundary(params, w)?;
        let d0 = buy_trigger_d0(params, w)?;
        curve.push((w, dj, d0));
    }

    // Region census over the wealth-benefit rectangle: a textual picture of
    // how the plane splits into hold/buy regions.
    let mut counts = [0usize; 5];
    let m = cfg.grid.clamp(2, 400);
    for i in 0..m {
        let w = term_safe * ((i as f64) / ((m - 1) as f64));
        for j in 0..m {
            let d = 1.2 * params.b * ((j as f64) / ((m - 1) as f64));
            let state = WealthState::new(w, d)?;
            let safe = safe_level_whole(params, d)?;
            let region = if state.w >= safe {
                RegionLabel::Safe
            } else {
                classify_region(params, &state)?
            };
            let idx = match region {
                RegionLabel::R0 => 0,
                RegionLabel::Ra => 1,
                RegionLabel::RbWait => 2,
                RegionLabel::RbJump => 3,
                RegionLabel::Safe => 4,
            };
            counts[idx] += 1;
        }
    }
    let census = json!({
        "grid": m,
        "R0": counts[0],
        "Ra": counts[1],
        "Rb_wait": counts[2],
        "Rb_jump": counts[3],
        "safe": counts[4],
    });

    let p = cfg.precision;
    Ok(match cfg.format {
        OutputFormat::Csv => csv_doc(
            "w,d_jump,d_buy",
            &curve
                .iter()
                .map(|(w, dj, d0)| vec![full(*w), full(*dj), full(*d0)])
                .collect::<Vec<_>>(),
        ),
        OutputFormat::Json => json_report(
            cfg,
            json!({
                "product": Product::Whole,
                "w_star": sol.w_star,
                "safe_level": term_safe,
                "goal_kink": kink,
                "curve": curve
                    .iter()
                    .map(|(w, dj, d0)| json!({ "w": w, "d_jump": dj, "d_buy": d0 }))
                    .collect::<Vec<_>>(),
                "census": census,
            }),
        ),
        OutputFormat::Table => {
            let mut out = table_kv(&[
                ("product", Product::Whole.to_string()),
                ("w_star", sol.w_star.map_or("-".to_string(), |v| sig(v, p))),
                ("safe_level", sig(term_safe, p)),
                ("goal_kink", sig(kink, p)),
            ]);
            out.push('\n');
            out.push_str(&table_columns(
                &["w", "d_jump", "d_buy"],
                &curve
                    .iter()
                    .map(|(w, dj, d0)| vec![sig(*w, p), sig(*dj, p), sig(*d0, p)])
                    .collect::<Vec<_>>(),
            ));
            out.push('\n');
            out.push_str(&format!(
                "region census on a {m}x{m} grid: R0 {} | Ra {} | Rb-wait {} | Rb-jump {} | safe {}\n",
                counts[0], counts[1], counts[2], counts[3], counts[4]
            ));
            out
        }
    })
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

fn parse_axis(s: &str) -> Result<SweepAxis, CliError> {
    match s {
        "lambda" => Ok(SweepAxis::Lambda),
        "r" => Ok(SweepAxis::R),
        "h" => Ok(SweepAxis::H),
        "b" => Ok(SweepAxis::B),
        other => Err(invalid(format!(
            "unknown sweep axis `{other}` (expected lambda | r | h | b)"
        ))),
    }
}

fn axis_tag(axis: SweepAxis) -> &'static str {
    match axis {
        SweepAxis::Lambda => "lambda",
        SweepAxis::R => "r",
        SweepAxis::H => "h",
        SweepAxis::B => "b",
    }
}

fn default_sweep_values(axis: SweepAxis) -> Vec<f64> {
    match axis {
        SweepAxis::Lambda => vec![0.04, 0.05, 0.06, 0.08],
        SweepAxis::R => vec![0.00, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07],
        SweepAxis::H => vec![0.12, 0.15, 0.20, 0.25],
        SweepAxis::B => vec![0.5, 1.0, 1.5, 2.0],
    }
}

fn cmd_sweep(
    cfg: &RunConfig,
    cli_values: Option<&str>,
    file: &FileConfig,
) -> Result<String, CliError> {
    let params = cfg.params()?;
    let product = cfg.require_product()?;
    if !matches!(product, Product::Term | Product::Whole) {
        return Err(invalid(
            "sweep tracks the critical wealth of the continuously funded products; \
             use --product term or --product whole",
        ));
    }
    let axis = parse_axis(cfg.axis.as_deref().unwrap_or("lambda"))?;
    let values: Vec<f64> = match cli_values {
        Some(list) => list
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| invalid(format!("--values entry `{tok}` is not a number")))
            })
            .collect::<Result<_, _>>()?,
        None => file
            .values
            .clone()
            .unwrap_or_else(|| default_sweep_values(axis)),
    };
    if values.is_empty() {
        return Err(invalid("--values must name at least one axis value"));
    }
    let points = w_star_sensitivities(&params, axis, &values)?;
    let p = cfg.precision;
    let tag = axis_tag(axis);
    Ok(match cfg.format {
        OutputFormat::Csv => csv_doc(
            &format!("{tag},w_star,safe_level,regime"),
            &points
                .iter()
                .map(|pt| {
                    vec![
                        full(pt.axis_value),
                        full_opt(pt.w_star),
                        full(pt.safe_level),
                        regime_str(pt.regime).to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        OutputFormat::Json => json_report(
            cfg,
            json!({
                "product": product,
                "axis": tag,
                "rows": points,
            }),
        ),
        OutputFormat::Table => table_columns(
            &[tag, "w_star", "safe_level", "regime"],
            &points
                .iter()
                .map(|pt| {
                    vec![
                        sig(pt.axis_value, p),
                        pt.w_star.map_or("-".to_string(), |v| sig(v, p)),
                        sig(pt.safe_level, p),
                        regime_str(pt.regime).to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
    })
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn parse_strategy(s: &str, product: Product) -> Result<StrategySpec, CliError> {
    let tail = |prefix: &str| -> Result<f64, CliError> {
        s[prefix.len()..]
            .parse::<f64>()
            .map_err(|_| invalid(format!("strategy `{s}`: threshold is not a number")))
    };
    match s {
        "optimal" => Ok(match product {
            Product::SinglePremium => StrategySpec::OptimalSP,
            Product::SinglePremiumCash => StrategySpec::OptimalSPCash,
            Product::Term => StrategySpec::OptimalTerm,
            Product::Whole => StrategySpec::OptimalWhole,
        }),
        "never-buy" => Ok(StrategySpec::NeverBuy),
        "buy-now-full" => Ok(StrategySpec::BuyNowFull),
        _ if s.starts_with("threshold-buy:") => Ok(StrategySpec::ThresholdBuy {
            w_threshold: tail("threshold-buy:")?,
        }),
        _ if s.starts_with("surrender-below:") => Ok(StrategySpec::SurrenderBelow {
            w_threshold: tail("surrender-below:")?,
        }),
        other => Err(invalid(format!(
            "unknown strategy `{other}` (expected optimal | never-buy | buy-now-full | \
             threshold-buy:W | surrender-below:W)"
        ))),
    }
}

fn cmd_simulate(cfg: &RunConfig) -> Result<String, CliError> {
    let params = cfg.params()?;
    let product = cfg.require_product()?;
    let state = cfg.state()?;
    let strategy = parse_strategy(cfg.strategy.as_deref().unwrap_or("optimal"), product)?;
    let is_optimal = matches!(
        strategy,
        StrategySpec::OptimalSP
            | StrategySpec::OptimalSPCash
            | StrategySpec::OptimalTerm
            | StrategySpec::OptimalWhole
    );
    let report = simulate(&params, product, strategy, &state, cfg.n_paths, cfg.seed)?;
    let cf_phi = closed_form_phi(&params, product, &state)?;
    let cf_bequest = match closed_form_bequest(&params, product, &state) {
        Ok(v) => Some(v),
        Err(OracleError::Param(ParamError::ZeroInterestRate { .. })) => None,
        Err(e) => return Err(e.into()),
    };
    let phi_delta = report.success_prob - cf_phi;
    let phi_within = phi_delta.abs() <= 3.0 * report.success_se;
    let phi_dominated = report.success_prob <= cf_phi + 3.0 * report.success_se;
    let bequest_delta = cf_bequest.map(|v| report.mean_bequest - v);
    let bequest_within = bequest_delta.map(|d| d.abs() <= 3.0 * report.bequest_se);
    // Optimal runs must match the closed form; alternatives only need to
    // stay below it.
    let pass = if is_optimal {
        phi_within && bequest_within.unwrap_or(true)
    } else {
        phi_dominated
    };

    let json_doc = json!({
        "strategy": strategy.name(),
        "sim": report,
        "closed_form": { "phi": cf_phi, "expected_bequest": cf_bequest },
        "comparison": {
            "phi_delta": phi_delta,
            "phi_within_3se": phi_within,
            "phi_dominated": phi_dominated,
            "bequest_delta": bequest_delta,
            "bequest_within_3se": bequest_within,
            "pass": pass,
        },
    });
    let p = cfg.precision;
    let verdict = if pass { "pass" } else { "fail" };
    let rows = vec![
        ("product", product.to_string()),
        ("strategy", strategy.name().to_string()),
        ("w", sig(state.w, p)),
        ("d", sig(state.d, p)),
        ("n_paths", report.n_paths.to_string()),
        ("seed", report.seed.to_string()),
        ("success_prob", sig(report.success_prob, p)),
        ("success_se", sci(report.success_se)),
        ("closed_form_phi", sig(cf_phi, p)),
        ("phi_delta", sci(phi_delta)),
        ("mean_bequest", sig(report.mean_bequest, p)),
        ("bequest_se", sci(report.bequest_se)),
        (
            "closed_form_bequest",
            cf_bequest.map_or("undefined for r = 0".to_string(), |v| sig(v, p)),
        ),
        (
            "bequest_delta",
            bequest_delta.map_or("-".to_string(), sci),
        ),
        ("ruin_fraction", sig(report.ruin_frac, p)),
        ("check_3se", verdict.to_string()),
    ];
    Ok(match cfg.format {
        OutputFormat::Table => table_kv(&rows),
        OutputFormat::Json => json_report(cfg, json_doc),
        OutputFormat::Csv => csv_doc(
            "product,strategy,w,d,n_paths,seed,success_prob,success_se,closed_form_phi,\
             mean_bequest,bequest_se,closed_form_bequest,ruin_fraction,pass",
            &[vec![
                product.tag().to_string(),
                strategy.name().to_string(),
                full(state.w),
                full(state.d),
                report.n_paths.to_string(),
                report.seed.to_string(),
                full(report.success_prob),
                full(report.success_se),
                full(cf_phi),
                full(report.mean_bequest),
                full(report.bequest_se),
                full_opt(cf_bequest),
                full(report.ruin_frac),
                pass.to_string(),
            ]],
        ),
    })
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct CheckRow {
    name: String,
    pass: bool,
    metric: f64,
    threshold: f64,
}

fn cmd_verify(cfg: &RunConfig) -> Result<(String, bool), CliError> {
    let params = cfg.params()?;
    let products: Vec<Product> = match cfg.product {
        Some(p) => vec![p],
        None => vec![
            Product::SinglePremium,
            Product::SinglePremiumCash,
            Product::Term,
            Product::Whole,
        ],
    };
    let mut rows: Vec<CheckRow> = Vec::new();
    for &product in &products {
        // 1-D checks get double the axis resolution of 2-D ones.
        let grid = if product == Product::Term {
            GridSpec { n_w: 2 * cfg.grid, n_d: 2 * cfg.grid }
        } else {
            GridSpec { n_w: cfg.grid, n_d: cfg.grid }
        };
        let vi = check_variational_inequality(&params, product, &grid)?;
        for e in &vi.entries {
            rows.push(CheckRow {
                name: format!("vi/{}/{}", product.tag(), e.name),
                pass: e.pass,
                metric: e.max_abs,
                threshold: e.threshold,
            });
        }
        let bvp = check_bvp_expected_bequest(&params, product, &grid)?;
        for e in &bvp.entries {
            rows.push(CheckRow {
                name: format!("bvp/{}/{}", product.tag(), e.name),
                pass: e.pass,
                metric: e.max_abs,
                threshold: e.threshold,
            });
        }
    }
    if cfg.product.is_none() {
        rows.push(check_sign_structure(cfg.seed));
        rows.extend(check_jump_boundary_shape(&params)?);
        rows.extend(check_seam_continuity(&params)?);
        rows.extend(check_discount_identities(&params)?);
        rows.push(check_cash_dominance(&params)?);
    }
    let all_pass = rows.iter().all(|r| r.pass);

    let content = match cfg.format {
        OutputFormat::Json => json_report(
            cfg,
            json!({ "checks": rows, "pass": all_pass }),
        ),
        OutputFormat::Csv => csv_doc(
            "name,pass,metric,threshold",
            &rows
                .iter()
                .map(|r| {
                    vec![
                        r.name.clone(),
                        r.pass.to_string(),
                        full(r.metric),
                        full(r.threshold),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        OutputFormat::Table => {
            let mut out = table_columns(
                &["status", "check", "metric", "threshold"],
                &rows
                    .iter()
                    .map(|r| {
                        vec![
                            if r.pass { "PASS" } else { "FAIL" }.to_string(),
                            r.name.clone(),
                            sci(r.metric),
                            sci(r.threshold),
                        ]
                    })
                    .collect::<Vec<_>>(),
            );
            let failed = rows.iter().filter(|r| !r.pass).count();
            out.push('\n');
            if failed == 0 {
                out.push_str(&format!("verification: all {} checks passed\n", rows.len()));
            } else {
                out.push_str(&format!(
                    "verification: {failed} of {} checks FAILED\n",
                    rows.len()
                ));
            }
            out
        }
    };
    Ok((content, all_pass))
}

/// The critical-wealth equation `x^a + (1-x)^c - 1` must be negative left of
/// its interior root and positive right of it, for fuzzed exponent pairs.
fn check_sign_structure(seed: u64) -> CheckRow {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draws = 1000;
    let grid_n = 10_000u32;
    let mut violations = 0u64;
    for _ in 0..draws {
        let a = rng.gen_range(1.01f64.ln()..50f64.ln()).exp();
        let c = rng.gen_range(0.01..0.99);
        let xs = match x_star(a, c) {
            Ok(x) if x > 0.0 && x < 1.0 => x,
            _ => {
                violations += 1;
                continue;
            }
        };
        for i in 1..grid_n {
            let x = f64::from(i) / f64::from(grid_n);
            if (x - xs).abs() <= 1e-9 {
                continue;
            }
            let f = x.powf(a) + (1.0 - x).powf(c) - 1.0;
            if f.abs() <= 1e-12 {
                continue;
            }
            if (f < 0.0) != (x < xs) {
                violations += 1;
            }
        }
    }
    CheckRow {
        name: "property/critical-wealth-sign-structure".to_string(),
        pass: violations == 0,
        metric: violations as f64,
        threshold: 0.0,
    }
}

/// Jump-boundary shape: bounded by `r w / h`, matching the goal kink at the
/// safe level, nondecreasing where nonnegative, and nonnegative throughout
/// when the mortality rate does not exceed the interest rate.
fn check_jump_boundary_shape(params: &ModelParams) -> Result<Vec<CheckRow>, CliError> {
    let probes: Vec<(String, ModelParams)> = vec![
        ("configured".to_string(), *params),
        (
            "lambda=r".to_string(),
            ModelParams::new(1.0, 0.05, 0.05, 0.25, 0.25, 0.3)?,
        ),
        (
            "lambda<r".to_string(),
            ModelParams::new(1.0, 0.06, 0.05, 0.25, 0.4, 0.3)?,
        ),
    ];
    let mut out = Vec::new();
    for (tag, p) in probes {
        if p.r == 0.0 {
            continue;
        }
        let h = p.continuous_premium_rate()?;
        let sol = solve_term(&p)?;
        let kink = p.r * p.b / (p.r + h);
        let n = 2001;
        let mut worst: f64 = 0.0;
        let mut prev: Option<f64> = None;
        for i in 0..n {
            let w = sol.safe_level * ((i as f64) / ((n - 1) as f64));
            let dj = jump_boundary(&p, w)?;
            worst = worst.max(dj - p.r * w / h);
            if p.lambda <= p.r {
                worst = worst.max(-dj);
            }
            if let Some(prev) = prev {
                if prev >= 0.0 && dj >= 0.0 {
                    worst = worst.max(prev - dj);
                }
            }
            prev = Some(dj);
        }
        let end = jump_boundary(&p, sol.safe_level)?;
        worst = worst.max((end - kink).abs());
        out.push(CheckRow {
            name: format!("property/jump-boundary-shape/{tag}"),
            pass: worst <= 1e-9,
            metric: worst,
            threshold: 1e-9,
        });
    }
    Ok(out)
}

/// Success probabilities must be continuous across every interior seam the
/// region decomposition introduces.
fn check_seam_continuity(params: &ModelParams) -> Result<Vec<CheckRow>, CliError> {
    let h = params.continuous_premium_rate()?;
    params.require_positive_rate("seam continuity checks")?;
    let sol = solve_term(params)?;
    let b = params.b;
    let kink = params.r * b / (params.r + h);
    let mut out = Vec::new();
    let tol = 1e-7;
    let eps = |x: f64| 1e-9 * x.abs().max(1.0);

    if let Some(ws) = sol.w_star {
        let e = eps(ws);
        let gap = (phi_term(params, ws - e)? - phi_term(params, ws + e)?).abs();
        out.push(CheckRow {
            name: "property/continuity/term-critical-wealth".to_string(),
            pass: gap <= tol,
            metric: gap,
            threshold: tol,
        });
    }

    let lo = sol.w_star.unwrap_or(0.0);
    let mut worst_dj: f64 = 0.0;
    for frac in [0.25, 0.5, 0.75, 0.95] {
        let w = lo + (sol.safe_level - lo) * frac;
        let dj = jump_boundary(params, w)?;
        if dj <= 1e-6 {
            continue;
        }
        let e = eps(dj);
        let below = phi_whole(params, &WealthState::new(w, dj - e)?)?;
        let above = phi_whole(params, &WealthState::new(w, dj + e)?)?;
        worst_dj = worst_dj.max((below - above).abs());
    }
    out.push(CheckRow {
        name: "property/continuity/whole-jump-boundary".to_string(),
        pass: worst_dj <= tol,
        metric: worst_dj,
        threshold: tol,
    });

    let mut worst_line: f64 = 0.0;
    for frac in [0.3, 0.6, 0.9] {
        let d = kink + (b - kink) * frac;
        let w = b - d;
        let e = eps(w);
        if w <= e {
            continue;
        }
        let off = phi_whole(params, &WealthState::new(w - e, d)?)?;
        let on = phi_whole(params, &WealthState::new(w, d)?)?;
        worst_line = worst_line.max((off - on).abs());
    }
    out.push(CheckRow {
        name: "property/continuity/whole-goal-line".to_string(),
        pass: worst_line <= tol,
        metric: worst_line,
        threshold: tol,
    });

    let mut worst_full: f64 = 0.0;
    for frac in [0.3, 0.6, 0.9] {
        let w = frac * sol.safe_level;
        let e = eps(b);
        let below = phi_whole(params, &WealthState::new(w, b - e)?)?;
        let above = phi_whole(params, &WealthState::new(w, b + e)?)?;
        worst_full = worst_full.max((below - above).abs());
    }
    out.push(CheckRow {
        name: "property/continuity/whole-full-benefit".to_string(),
        pass: worst_full <= tol,
        metric: worst_full,
        threshold: tol,
    });
    Ok(out)
}

/// Waiting values must equal the survival discount of their hitting times,
/// and at the critical wealth the two hitting-time discounts split 1.
fn check_discount_identities(params: &ModelParams) -> Result<Vec<CheckRow>, CliError> {
    params.require_positive_rate("hitting-time identity checks")?;
    let mut out = Vec::new();

    let mut worst_sp: f64 = 0.0;
    for di in 0..6 {
        let d = 0.9 * params.b * (di as f64) / 5.0;
        let safe = safe_level_sp(params, d)?;
        for wi in 1..40 {
            let w = safe * (wi as f64) / 40.0;
            let state = WealthState::new(w, d)?;
            let phi = phi_no_cash(params, state)?;
            let tau = hitting_time_safe_sp(params, state)?;
            let rel = ((-params.lambda * tau).exp() - phi).abs() / phi.abs().max(1e-300);
            worst_sp = worst_sp.max(rel);
        }
    }
    out.push(CheckRow {
        name: "property/identity/single-premium-wait-discount".to_string(),
        pass: worst_sp <= 1e-12,
        metric: worst_sp,
        threshold: 1e-12,
    });

    let sol = solve_term(params)?;
    let lo = sol.w_star.unwrap_or(0.0);
    let mut worst_term: f64 = 0.0;
    for i in 1..40 {
        let w = lo + (sol.safe_level - lo) * (i as f64) / 40.0;
        let phi = phi_term(params, w)?;
        let (_, tau_safe) = hitting_times_term(params, w)?;
        if let Some(tau) = tau_safe {
            let rel = ((-params.lambda * tau).exp() - phi).abs() / phi.abs().max(1e-300);
            worst_term = worst_term.max(rel);
        }
    }
    out.push(CheckRow {
        name: "property/identity/term-wait-discount".to_string(),
        pass: worst_term <= 1e-12,
        metric: worst_term,
        threshold: 1e-12,
    });

    if let Some(ws) = sol.w_star {
        let (tau_zero, tau_safe) = hitting_times_term(params, ws)?;
        let (tau_zero, tau_safe) = (
            tau_zero.ok_or_else(|| CliError::Runtime("missing ruin time at w*".into()))?,
            tau_safe.ok_or_else(|| CliError::Runtime("missing safe time at w*".into()))?,
        );
        let gap = ((-params.lambda * tau_zero).exp() + (-params.lambda * tau_safe).exp() - 1.0)
            .abs();
        out.push(CheckRow {
            name: "property/identity/critical-wealth-split".to_string(),
            pass: gap <= 1e-9,
            metric: gap,
            threshold: 1e-9,
        });
    }
    Ok(out)
}

/// A surrender option can never hurt: its success probability dominates the
/// no-cash-value one everywhere.
fn check_cash_dominance(params: &ModelParams) -> Result<CheckRow, CliError> {
    let mut worst: f64 = 0.0;
    for di in 0..60 {
        let d = 0.9 * params.b * (di as f64) / 59.0;
        let safe = safe_level_sp(params, d)?;
        for wi in 0..60 {
            let w = safe * (wi as f64) / 59.0;
            let state = WealthState::new(w, d)?;
            let base = phi_no_cash(params, state)?;
            let cash = phi_cash(params, state)?;
            worst = worst.max(base - cash);
        }
    }
    Ok(CheckRow {
        name: "property/cash-value-dominance".to_string(),
        pass: worst <= 1e-12,
        metric: worst,
        threshold: 1e-12,
    })
}
