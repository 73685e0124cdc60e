//! Command-line frontend.
//!
//! [`run`] does all the work on already-read input bytes and returns the text
//! to print, so it can be tested without touching the file system.

use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::asymptotic::{build_asymptotic, convergence_sweep, InputKind, InputMoments, PlancherelOptions};
use crate::distinguishability::{
    factor_gram, gamma_of, interpolation_spectrum, Distinguishability, GramInput, GramMatrix, InternalFactor,
    InterpolationModel, InterpolationSpectrum, ModelSize, DEFAULT_RANK_TOL,
};
use crate::error::{Error, Result};
use crate::oracle::{exact_output_distribution, tv_distance, OracleConfig};
use crate::photonstats::{
    effective_interpolation_spectrum, moments, pnd_general, pnd_interpolation_truncated, pnd_recursive,
    pnd_recursive_weighted, OccupationSpectrum, PhotonNumberDistribution, Truncation, DEFAULT_EFFECTIVE_N,
};
use crate::VERSION;

pub const MAX_EPS: f64 = 1e-3;
pub const MAX_M_MAX: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Factor the Gram matrix and report the spectrum of Γ
    Gram,
    /// Limiting Gaussian state: exponent matrix and Gibbs temperatures
    Asymptote,
    /// Photon-number distribution of the limiting state
    Pnd,
    /// Closed-form distribution of the n → ∞ interpolation model
    Interp,
    /// Mean, variance and purity
    Moments,
    /// Finite-n versus limit distances over a list of n
    Converge,
    /// Exact finite-n distribution by Fock-space expansion
    Oracle,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, Parser, Serialize)]
#[command(name = "bosonclt", version, about = "Gaussian limits of partially distinguishable bosons in unbiased interferometers")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,

    /// JSON file with a "gram" matrix
    #[arg(long, value_name = "PATH", conflicts_with = "states")]
    pub gram: Option<PathBuf>,

    /// JSON file with internal "states"
    #[arg(long, value_name = "PATH")]
    pub states: Option<PathBuf>,

    /// Interpolation model S = (1-x) I + x J
    #[arg(long = "interpolation-x", visible_alias = "x", value_name = "X")]
    pub x: Option<f64>,

    /// All photons identical
    #[arg(long)]
    pub indistinguishable: bool,

    /// All photons mutually orthogonal
    #[arg(long)]
    pub distinguishable: bool,

    /// Photon counts, comma separated
    #[arg(long = "n", value_delimiter = ',', value_name = "N[,N...]")]
    pub n: Vec<usize>,

    /// Mean photon number per input port
    #[arg(long)]
    pub r: Option<f64>,

    /// Single-photon inputs (mean photon number 1)
    #[arg(long)]
    pub single_photon: bool,

    /// Real part of the pair moment ⟨a a⟩ of every input
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub pair_re: f64,

    /// Imaginary part of the pair moment ⟨a a⟩ of every input
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub pair_im: f64,

    /// Bound on the probability mass beyond the last reported m
    #[arg(long, default_value_t = 1e-12)]
    pub eps: f64,

    /// Largest photon number computed
    #[arg(long = "m-max", default_value_t = MAX_M_MAX)]
    pub m_max: usize,

    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    /// Output file; standard output when absent or "-"
    #[arg(long, value_name = "PATH")]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            gram: None,
            states: None,
            x: None,
            indistinguishable: false,
            distinguishable: false,
            n: Vec::new(),
            r: None,
            single_photon: false,
            pair_re: 0.0,
            pair_im: 0.0,
            eps: 1e-12,
            m_max: MAX_M_MAX,
            format: OutputFormat::Json,
            out: None,
        }
    }

    pub fn input_path(&self) -> Option<&PathBuf> {
        self.gram.as_ref().or(self.states.as_ref())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= MAX_EPS) {
            return Err(Error::Validation(format!("--eps {} outside (0, {MAX_EPS}]", self.eps)));
        }
        if self.m_max > MAX_M_MAX {
            return Err(Error::Validation(format!("--m-max {} exceeds {MAX_M_MAX}", self.m_max)));
        }
        if let Some(x) = self.x {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::Validation(format!("--interpolation-x {x} outside [0, 1]")));
            }
        }
        if let Some(r) = self.r {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::Validation(format!("--r {r} must be a finite number >= 0")));
            }
            if self.single_photon && r != 1.0 {
                return Err(Error::Validation("--single-photon fixes --r to 1".into()));
            }
        }
        if !(self.pair_re.is_finite() && self.pair_im.is_finite()) {
            return Err(Error::Validation("pair moment must be finite".into()));
        }
        if let Some(k) = self.n.iter().position(|&n| n == 0) {
            return Err(Error::Validation(format!("--n entry {k} is zero")));
        }
        let sources = [
            self.input_path().is_some(),
            self.x.is_some(),
            self.indistinguishable,
            self.distinguishable,
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        let needs_source = !matches!(self.command, Command::Interp);
        if needs_source && sources != 1 {
            return Err(Error::Validation(
                "give exactly one of --gram, --states, --interpolation-x, --indistinguishable, --distinguishable".into(),
            ));
        }
        if self.command == Command::Interp && self.x.is_none() {
            return Err(Error::Validation("interp needs --interpolation-x".into()));
        }
        if self.command != Command::Converge && self.n.len() > 1 {
            return Err(Error::Validation("--n takes a single value outside converge".into()));
        }
        if self.command == Command::Converge {
            if self.n.is_empty() {
                return Err(Error::Validation("converge needs --n".into()));
            }
            if self.input_path().is_some() {
                return Err(Error::Validation("converge needs a family of Gram matrices, not a file".into()));
            }
        }
        InputMoments::new(self.mean_photons(), self.pair())
            .map_err(|e| Error::Validation(e.to_string()))?;
        Ok(())
    }

    fn mean_photons(&self) -> f64 {
        self.r.unwrap_or(1.0)
    }

    fn pair(&self) -> Complex64 {
        Complex64::new(self.pair_re, self.pair_im)
    }

    fn input_moments(&self) -> Result<InputMoments> {
        InputMoments::new(self.mean_photons(), self.pair())
    }

    fn truncation(&self) -> Result<Truncation> {
        Truncation::new(self.eps, self.m_max)
    }
}

/// Exit code and printable text of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub exit_code: i32,
    /// Result document; empty on failure.
    pub stdout: String,
    /// One-line reason on failure.
    pub stderr: String,
}

/// Runs one command. `input` holds the bytes of the `--gram`/`--states` file when one was given.
pub fn run(config: &RunConfig, input: Option<&[u8]>) -> RunOutput {
    match execute(config, input).and_then(|doc| render(config, &doc)) {
        Ok(stdout) => RunOutput {
            exit_code: 0,
            stdout,
            stderr: String::new(),
        },
        Err(e) => RunOutput {
            exit_code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error[{}]: {}", error_kind(&e), e.to_string().replace('\n', " ")),
        },
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Io(_) => "io",
        Error::NoConvergence { .. } => "numeric",
        Error::Capacity { .. } => "capacity",
        Error::Capability(_) => "capability",
        Error::Parse(_) => "parse",
        _ => "validation",
    }
}

/// Result document before encoding.
#[derive(Clone, Debug)]
pub struct Document {
    command: Command,
    fields: Map<String, Value>,
    table: Table,
}

#[derive(Clone, Debug)]
enum Table {
    Distribution(PhotonNumberDistribution),
    Spectrum { lambda: Vec<f64>, beta: Option<Vec<f64>> },
    Moments { mean: f64, variance: f64, purity: f64 },
    Convergence { rows: Vec<ConvergeRow>, slope: Option<f64> },
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergeRow {
    pub n: usize,
    pub tv: f64,
    pub tv_allowance: f64,
    pub plancherel: Option<f64>,
    pub plancherel_error: Option<f64>,
}

enum Source {
    Gram(GramMatrix),
    Interpolation(InterpolationModel),
}

fn execute(config: &RunConfig, input: Option<&[u8]>) -> Result<Document> {
    config.validate()?;
    match config.command {
        Command::Interp => cmd_interp(config),
        Command::Converge => cmd_converge(config),
        _ => {
            let source = resolve_source(config, input)?;
            match config.command {
                Command::Gram => cmd_gram(config, source),
                Command::Asymptote => cmd_asymptote(config, source),
                Command::Pnd => cmd_pnd(config, source),
                Command::Moments => cmd_moments(config, source),
                Command::Oracle => cmd_oracle(config, source),
                Command::Interp | Command::Converge => unreachable!(),
            }
        }
    }
}

fn single_n(config: &RunConfig) -> Option<usize> {
    config.n.first().copied()
}

fn resolve_source(config: &RunConfig, input: Option<&[u8]>) -> Result<Source> {
    if let Some(path) = config.input_path() {
        let bytes = input.ok_or_else(|| Error::Validation(format!("no input read from {}", path.display())))?;
        let parsed = GramInput::from_json(bytes)?;
        if config.gram.is_some() && parsed.gram.is_none() && parsed.interpolation.is_none() {
            return Err(Error::Validation("--gram file has no \"gram\" key".into()));
        }
        if config.states.is_some() && parsed.states.is_none() {
            return Err(Error::Validation("--states file has no \"states\" key".into()));
        }
        return Ok(match parsed.resolve()? {
            Distinguishability::Gram(g) => Source::Gram(g),
            Distinguishability::Interpolation(m) => Source::Interpolation(m),
        });
    }
    let n = single_n(config);
    if let Some(x) = config.x {
        let size = n.map_or(ModelSize::Limit, ModelSize::Finite);
        return InterpolationModel::new(x, size).map(Source::Interpolation);
    }
    let n = n.unwrap_or(2);
    if config.indistinguishable {
        GramMatrix::indistinguishable(n).map(Source::Gram)
    } else {
        GramMatrix::distinguishable(n).map(Source::Gram)
    }
}

fn factor_of(gram: &GramMatrix) -> Result<InternalFactor> {
    factor_gram(gram, DEFAULT_RANK_TOL)
}

fn finite_gram(source: &Source) -> Result<Option<GramMatrix>> {
    match source {
        Source::Gram(g) => Ok(Some(g.clone())),
        Source::Interpolation(m) => match m.size() {
            ModelSize::Finite(_) => m.gram().map(Some),
            ModelSize::Limit => Ok(None),
        },
    }
}

fn base(config: &RunConfig) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("command".into(), json!(config.command));
    m.insert("version".into(), json!(VERSION));
    m.insert("args".into(), serde_json::to_value(config).unwrap_or(Value::Null));
    m
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn cmd_gram(config: &RunConfig, source: Source) -> Result<Document> {
    let mut fields = base(config);
    let lambda = match finite_gram(&source)? {
        Some(g) => {
            let c = factor_of(&g)?;
            let gamma = gamma_of(&c)?;
            fields.insert("n".into(), json!(c.n()));
            fields.insert("d".into(), json!(c.d()));
            fields.insert("gram_eigenvalues".into(), json!(g.eigen().eigenvalues));
            fields.insert("purity".into(), json!(gamma.purity()));
            gamma.spectrum().to_vec()
        }
        None => {
            let Source::Interpolation(m) = source else { unreachable!() };
            let InterpolationSpectrum::Limit { lambda_max, cloud_weight } = interpolation_spectrum(&m) else {
                unreachable!()
            };
            fields.insert("n".into(), Value::Null);
            fields.insert("cloud_weight".into(), json!(cloud_weight));
            fields.insert("purity".into(), json!(lambda_max * lambda_max));
            vec![lambda_max]
        }
    };
    fields.insert("lambda".into(), json!(lambda));
    Ok(Document {
        command: config.command,
        fields,
        table: Table::Spectrum { lambda, beta: None },
    })
}

fn gibbs_beta(mean_n: f64, lambda: f64) -> f64 {
    let occ = mean_n * lambda;
    if occ > 0.0 {
        (1.0 / occ).ln_1p()
    } else {
        f64::INFINITY
    }
}

fn cmd_asymptote(config: &RunConfig, source: Source) -> Result<Document> {
    let mut fields = base(config);
    let moments = config.input_moments()?;
    let (lambda, beta) = match finite_gram(&source)? {
        Some(g) => {
            let c = factor_of(&g)?;
            let state = build_asymptotic(&gamma_of(&c)?, &c, moments)?;
            let m = 2 * state.d();
            let rows: Vec<&[f64]> = state.exponent().chunks(m).collect();
            fields.insert("d".into(), json!(state.d()));
            fields.insert("gamma".into(), json!(rows));
            fields.insert("gamma_spectrum".into(), json!(state.exponent_spectrum()));
            let lambda = state.gamma().spectrum().to_vec();
            let beta = state.gibbs().map(|modes| modes.iter().map(|g| g.beta).collect::<Vec<_>>());
            (lambda, beta)
        }
        None => {
            if !moments.is_isotropic() {
                return Err(Error::Capability(
                    "the n -> infinity interpolation model supports phase-insensitive inputs only".into(),
                ));
            }
            let Source::Interpolation(m) = source else { unreachable!() };
            let InterpolationSpectrum::Limit { lambda_max, cloud_weight } = interpolation_spectrum(&m) else {
                unreachable!()
            };
            fields.insert("cloud_weight".into(), json!(cloud_weight));
            let beta = vec![gibbs_beta(moments.mean_n(), lambda_max)];
            (vec![lambda_max], Some(beta))
        }
    };
    fields.insert("mean_n".into(), json!(moments.mean_n()));
    fields.insert("pair".into(), json!([moments.pair().re, moments.pair().im]));
    fields.insert("lambda".into(), json!(lambda));
    fields.insert(
        "beta_gibbs".into(),
        match &beta {
            Some(b) => Value::Array(b.iter().map(|&v| finite_or_null(v)).collect()),
            None => Value::Null,
        },
    );
    Ok(Document {
        command: config.command,
        fields,
        table: Table::Spectrum { lambda, beta },
    })
}

fn distribution_doc(config: &RunConfig, mut fields: Map<String, Value>, p: PhotonNumberDistribution) -> Result<Document> {
    p.validate()?;
    fields.insert("p".into(), json!(p.probs()));
    fields.insert("tail_bound".into(), json!(p.tail_bound()));
    fields.insert("source".into(), json!(p.source()));
    fields.insert("mean".into(), json!(p.mean()));
    Ok(Document {
        command: config.command,
        fields,
        table: Table::Distribution(p),
    })
}

fn cmd_pnd(config: &RunConfig, source: Source) -> Result<Document> {
    let moments = config.input_moments()?;
    let trunc = config.truncation()?;
    let p = match finite_gram(&source)? {
        Some(g) => {
            let c = factor_of(&g)?;
            let state = build_asymptotic(&gamma_of(&c)?, &c, moments)?;
            if state.is_isotropic() {
                pnd_recursive(state.gamma().spectrum(), moments.mean_n(), &trunc)?
            } else {
                pnd_general(&state, &trunc)?
            }
        }
        None => {
            let Source::Interpolation(m) = source else { unreachable!() };
            if !moments.is_isotropic() {
                return Err(Error::Capability(
                    "the n -> infinity interpolation model supports phase-insensitive inputs only".into(),
                ));
            }
            if moments.mean_n() == 1.0 {
                pnd_interpolation_truncated(m.x(), &trunc)?
            } else {
                let spec = effective_interpolation_spectrum(&m, DEFAULT_EFFECTIVE_N)?;
                pnd_recursive_weighted(&spec, moments.mean_n(), &trunc)?
            }
        }
    };
    distribution_doc(config, base(config), p)
}

fn cmd_interp(config: &RunConfig) -> Result<Document> {
    let x = config.x.expect("validated");
    let p = pnd_interpolation_truncated(x, &config.truncation()?)?;
    distribution_doc(config, base(config), p)
}

fn cmd_moments(config: &RunConfig, source: Source) -> Result<Document> {
    let mut fields = base(config);
    let im = config.input_moments()?;
    let r = im.mean_n();
    let (mean, variance, purity, extension) = match finite_gram(&source)? {
        Some(g) => {
            let c = factor_of(&g)?;
            let state = build_asymptotic(&gamma_of(&c)?, &c, im)?;
            let purity = state.gamma().purity();
            if state.is_isotropic() {
                let m = moments(state.gamma().spectrum(), r)?;
                (m.mean, m.variance, m.purity, false)
            } else {
                let (mean, var) = OccupationSpectrum::from_exponent(&state)?.cumulants();
                (mean, var, purity, true)
            }
        }
        None => {
            if !im.is_isotropic() {
                return Err(Error::Capability(
                    "the n -> infinity interpolation model supports phase-insensitive inputs only".into(),
                ));
            }
            let Source::Interpolation(m) = source else { unreachable!() };
            let purity = m.x() * m.x();
            (r, r + r * r * purity, purity, false)
        }
    };
    fields.insert("mean".into(), json!(mean));
    fields.insert("variance".into(), json!(variance));
    fields.insert("purity".into(), json!(purity));
    fields.insert("extension".into(), json!(extension));
    Ok(Document {
        command: config.command,
        fields,
        table: Table::Moments { mean, variance, purity },
    })
}

fn cmd_oracle(config: &RunConfig, source: Source) -> Result<Document> {
    if config.r.is_some_and(|r| r != 1.0) || config.pair() != Complex64::new(0.0, 0.0) {
        return Err(Error::Capability("the Fock oracle handles single-photon inputs only".into()));
    }
    let g = finite_gram(&source)?
        .ok_or_else(|| Error::Capability("the oracle needs a finite number of photons".into()))?;
    let p = exact_output_distribution(&factor_of(&g)?, &OracleConfig::default())?;
    distribution_doc(config, base(config), p)
}

fn cmd_converge(config: &RunConfig) -> Result<Document> {
    if config.r.is_some_and(|r| r != 1.0) || config.pair() != Complex64::new(0.0, 0.0) {
        return Err(Error::Capability("converge compares against the Fock oracle: single photons only".into()));
    }
    let trunc = config.truncation()?;
    let family = |n: usize| -> Result<InternalFactor> {
        let g = if let Some(x) = config.x {
            if n == 1 {
                GramMatrix::indistinguishable(1)?
            } else {
                InterpolationModel::new(x, ModelSize::Finite(n))?.gram()?
            }
        } else if config.indistinguishable {
            GramMatrix::indistinguishable(n)?
        } else {
            GramMatrix::distinguishable(n)?
        };
        factor_of(&g)
    };
    let x_limit = match config.x {
        Some(x) => x,
        None if config.indistinguishable => 1.0,
        None => 0.0,
    };
    let limit = pnd_interpolation_truncated(x_limit, &trunc)?;
    let opts = PlancherelOptions::default();
    let mut rows = Vec::with_capacity(config.n.len());
    for &n in &config.n {
        let c = family(n)?;
        let exact = exact_output_distribution(&c, &OracleConfig::default())?;
        let tv = tv_distance(&exact, &limit);
        let (plancherel, plancherel_error) = if c.d() <= 2 {
            let table = convergence_sweep(|_| Ok(c.clone()), InputKind::SinglePhoton, &[n], &opts)?;
            let row = &table.rows[0];
            (Some(row.distance), Some(row.error_estimate))
        } else {
            (None, None)
        };
        rows.push(ConvergeRow {
            n,
            tv: tv.distance,
            tv_allowance: tv.allowance,
            plancherel,
            plancherel_error,
        });
    }
    let points: Vec<(f64, f64)> = if rows.iter().all(|r| r.plancherel.is_some()) {
        rows.iter().map(|r| (r.n as f64, r.plancherel.unwrap_or(0.0))).collect()
    } else {
        rows.iter().map(|r| (r.n as f64, r.tv)).collect()
    };
    let slope = crate::asymptotic::log_log_slope(&points);
    let mut fields = base(config);
    fields.insert("tv_table".into(), json!(rows));
    fields.insert("slope_estimate".into(), slope.map_or(Value::Null, |s| json!(s)));
    fields.insert("limit_x".into(), json!(x_limit));
    Ok(Document {
        command: config.command,
        fields,
        table: Table::Convergence { rows, slope },
    })
}

/// Shortest round-trip decimal, as in the JSON encoding; empty for missing or non-finite values.
fn num(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => serde_json::to_string(&x).unwrap_or_default(),
        _ => String::new(),
    }
}

fn render(config: &RunConfig, doc: &Document) -> Result<String> {
    debug_assert_eq!(config.command, doc.command);
    match config.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&Value::Object(doc.fields.clone()))
                .map_err(|e| Error::Parse(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Csv => Ok(render_csv(&doc.table)),
    }
}

fn render_csv(table: &Table) -> String {
    let mut out = String::new();
    match table {
        Table::Distribution(p) => {
            out.push_str("m,p,tail_bound_last_row\n");
            let last = p.len().saturating_sub(1);
            for (m, &v) in p.probs().iter().enumerate() {
                let tail = if m == last { num(Some(p.tail_bound())) } else { String::new() };
                out.push_str(&format!("{m},{},{tail}\n", num(Some(v))));
            }
        }
        Table::Spectrum { lambda, beta } => {
            out.push_str("u,lambda,beta_gibbs\n");
            for (u, &l) in lambda.iter().enumerate() {
                let b = beta.as_ref().and_then(|b| b.get(u).copied());
                out.push_str(&format!("{u},{},{}\n", num(Some(l)), num(b)));
            }
        }
        Table::Moments { mean, variance, purity } => {
            out.push_str("mean,variance,purity\n");
            out.push_str(&format!("{},{},{}\n", num(Some(*mean)), num(Some(*variance)), num(Some(*purity))));
        }
        Table::Convergence { rows, slope } => {
            out.push_str("n,tv,plancherel,slope_estimate_last_row\n");
            let last = rows.len().saturating_sub(1);
            for (k, r) in rows.iter().enumerate() {
                let s = if k == last { num(*slope) } else { String::new() };
                out.push_str(&format!("{},{},{},{s}\n", r.n, num(Some(r.tv)), num(r.plancherel)));
            }
        }
    }
    out
}
