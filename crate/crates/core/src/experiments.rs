//! Dataset generation behind the `distillery` command-line tool.
//!
//! Every command builds one or more [`Table`]s in memory and renders them as
//! CSV or JSON. CSV floats carry 17 significant digits so files re-parse to
//! the exact same doubles; `#` lines at the top record the configuration.
//! Nothing run-dependent (time, thread count) is written, so equal inputs
//! give byte-identical files.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::distill2::{fout_closed, fout_inverse, iterate_map, simulate_two_pair};
use crate::distill3::{iterated_two_pair_on_three, pareto_family_closed, simulate_three_pair, ParetoFamilyParam, ThreePairProtocol};
use crate::error::{Error, Result};
use crate::par;
use crate::pareto::{extract_front, sample_protocols, ParetoFront};
use crate::states::Fidelity;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_GRID_STEP: f64 = 0.005;
pub const DEFAULT_SWEEP_ALPHAS: [f64; 2] = [FRAC_PI_4, FRAC_PI_2];
pub const DEFAULT_SAMPLE_FIDELITIES: [f64; 3] = [0.6, 0.75, 0.9];
pub const DEFAULT_SAMPLES: usize = 200_000;
pub const DEFAULT_R_STEPS: usize = 21;
pub const DEFAULT_ROUNDS: usize = 10;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(u64),
    Real(f64),
}

impl Cell {
    pub fn as_f64(self) -> f64 {
        match self {
            Cell::Int(i) => i as f64,
            Cell::Real(x) => x,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Self {
        Cell::Int(i)
    }
}

/// Column-labelled rows with provenance comments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(comments: Vec<String>, columns: &[&str]) -> Self {
        Self {
            comments,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx].as_f64()).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Real(x) => format!("{x:.16e}"),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Inverse of [`Table::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut comments = Vec::new();
        let mut lines = text.lines();
        let header = loop {
            match lines.next() {
                Some(l) if l.starts_with('#') => comments.push(l.trim_start_matches('#').trim_start().to_string()),
                Some(l) => break l,
                None => return Err(Error::Empty("CSV header row")),
            }
        };
        let columns: Vec<String> = header.split(',').map(str::to_string).collect();
        let mut rows = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let row = line
                .split(',')
                .map(|s| {
                    if s.contains(['.', 'e', 'n', 'i']) {
                        s.parse::<f64>().map(Cell::Real)
                    } else {
                        s.parse::<u64>().map(Cell::Int).or_else(|_| s.parse::<f64>().map(Cell::Real))
                    }
                    .map_err(|_| Error::InvalidParameter(format!("bad CSV cell `{s}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            if row.len() != columns.len() {
                return Err(Error::Dimension(format!("row has {} cells, header {}", row.len(), columns.len())));
            }
            rows.push(row);
        }
        Ok(Self { comments, columns, rows })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Csv => Ok(self.to_csv()),
            Format::Json => self.to_json(),
        }
    }
}

/// A named output produced by a command.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

fn provenance(command: &str, settings: &[(&str, String)]) -> Vec<String> {
    let mut c = vec![format!("distillery {} {}", env!("CARGO_PKG_VERSION"), command)];
    c.extend(settings.iter().map(|(k, v)| format!("{k}={v}")));
    c
}

fn list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(";")
}

/// `n + 1` evenly spaced fidelities from 1/2 to 1, `step = 1/(2n)`.
pub fn fidelity_grid(step: f64) -> Result<Vec<f64>> {
    if !(step.is_finite() && step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidParameter(format!("grid step {step} must lie in (0, 0.5]")));
    }
    let n = (0.5 / step).round();
    if (n * step - 0.5).abs() > 1e-9 || n > 1e7 {
        return Err(Error::InvalidParameter(format!("grid step {step} must divide 0.5")));
    }
    let n = n as usize;
    Ok((0..=n).map(|i| if i == n { 1.0 } else { 0.5 + 0.5 * i as f64 / n as f64 }).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoPairSweepConfig {
    pub alphas: Vec<f64>,
    /// Bob's pulse area; `None` means `-alpha`.
    pub beta: Option<f64>,
    pub xi: f64,
    pub grid_step: f64,
}

impl Default for TwoPairSweepConfig {
    fn default() -> Self {
        Self {
            alphas: DEFAULT_SWEEP_ALPHAS.to_vec(),
            beta: None,
            xi: 1.0,
            grid_step: DEFAULT_GRID_STEP,
        }
    }
}

/// `F,alpha,F_out,F_out_sim,p_succ` for pulses `(alpha, beta)`, by default
/// `beta = -alpha`.
pub fn two_pair_sweep(cfg: &TwoPairSweepConfig) -> Result<Table> {
    if cfg.alphas.is_empty() {
        return Err(Error::Empty("pulse area list"));
    }
    if !cfg.xi.is_finite() || cfg.alphas.iter().chain(cfg.beta.iter()).any(|a| !a.is_finite()) {
        return Err(Error::InvalidParameter("pulse parameters must be finite".into()));
    }
    let fs = fidelity_grid(cfg.grid_step)?;
    let jobs: Vec<(f64, f64)> = cfg.alphas.iter().flat_map(|&a| fs.iter().map(move |&f| (a, f))).collect();
    let rows = par::map_slice(&jobs, |&(alpha, f)| -> Result<Vec<Cell>> {
        let beta = cfg.beta.unwrap_or(-alpha);
        let sim = simulate_two_pair(Fidelity::new(f)?, alpha, beta, cfg.xi)?;
        let closed = match cfg.beta {
            None => fout_inverse(f, alpha),
            Some(_) => fout_closed(f, alpha, beta, cfg.xi)?,
        };
        Ok(vec![
            f.into(),
            alpha.into(),
            closed.into(),
            sim.f_out.value().into(),
            sim.p_succ.into(),
        ])
    });
    let mut table = Table::new(
        provenance(
            "two-pair-sweep",
            &[
                ("alpha", list(&cfg.alphas)),
                ("beta", cfg.beta.map_or("-alpha".into(), |b| format!("{b:.16e}"))),
                ("xi", format!("{:.16e}", cfg.xi)),
                ("grid_step", format!("{:.16e}", cfg.grid_step)),
            ],
        ),
        &["F", "alpha", "F_out", "F_out_sim", "p_succ"],
    );
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoPairIterateConfig {
    pub f0: f64,
    pub alpha: f64,
    pub rounds: usize,
}

impl Default for TwoPairIterateConfig {
    fn default() -> Self {
        Self {
            f0: 0.75,
            alpha: FRAC_PI_2,
            rounds: DEFAULT_ROUNDS,
        }
    }
}

/// `round,F` of the recurrence with pulses `(alpha, -alpha)`.
pub fn two_pair_iterate(cfg: &TwoPairIterateConfig) -> Result<Table> {
    if !cfg.alpha.is_finite() {
        return Err(Error::InvalidParameter("pulse area must be finite".into()));
    }
    let it = iterate_map(Fidelity::new(cfg.f0)?, cfg.alpha, cfg.rounds)?;
    let mut settings = vec![
        ("F0", format!("{:.16e}", cfg.f0)),
        ("alpha", format!("{:.16e}", cfg.alpha)),
        ("rounds", cfg.rounds.to_string()),
    ];
    if it.below_repulsive_fixed_point {
        settings.push(("note", "F0 <= 1/2, the sequence does not increase".into()));
    }
    let mut table = Table::new(provenance("two-pair-iterate", &settings), &["round", "F"]);
    for (i, f) in it.values.iter().enumerate() {
        table.push(vec![(i as u64).into(), (*f).into()]);
    }
    Ok(table)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThreePairSampleConfig {
    pub fidelities: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ThreePairSampleConfig {
    fn default() -> Self {
        Self {
            fidelities: DEFAULT_SAMPLE_FIDELITIES.to_vec(),
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
        }
    }
}

/// Front of one sampled cloud, written next to the cloud itself.
#[derive(Clone, Debug, Serialize)]
pub struct FrontSidecar {
    pub fidelity: f64,
    pub samples: usize,
    pub seed: u64,
    pub front: Option<ParetoFront>,
}

/// One `F_out,P_succ` table and one front sidecar per input fidelity.
pub fn three_pair_sample(cfg: &ThreePairSampleConfig) -> Result<Vec<(Table, FrontSidecar)>> {
    if cfg.fidelities.is_empty() {
        return Err(Error::Empty("fidelity list"));
    }
    if cfg.samples == 0 {
        return Err(Error::InvalidParameter("at least one sample is required".into()));
    }
    cfg.fidelities
        .iter()
        .map(|&f| {
            let fid = Fidelity::new(f)?;
            let points = sample_protocols(fid, cfg.samples, cfg.seed)?;
            let mut table = Table::new(
                provenance(
                    "three-pair-sample",
                    &[
                        ("F", format!("{f:.16e}")),
                        ("samples", cfg.samples.to_string()),
                        ("seed", cfg.seed.to_string()),
                        ("law", "alpha,beta~U[0,2pi); a,b=rho*u, rho~U[0,2pi), u uniform on S2".into()),
                    ],
                ),
                &["F_out", "P_succ"],
            );
            for p in &points {
                table.push(vec![p.f_out.value().into(), p.p_succ.into()]);
            }
            let sidecar = FrontSidecar {
                fidelity: f,
                samples: cfg.samples,
                seed: cfg.seed,
                front: Some(extract_front(&points)?),
            };
            Ok((table, sidecar))
        })
        .collect()
}

/// File stem for a sampled fidelity, e.g. `three_pair_F0.75`.
pub fn sample_stem(f: f64) -> String {
    format!("three_pair_F{f}")
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParetoFamilyConfig {
    pub fidelities: Vec<f64>,
    pub r_steps: usize,
}

impl Default for ParetoFamilyConfig {
    fn default() -> Self {
        Self {
            fidelities: (0..=9).map(|i| 0.55 + 0.05 * i as f64).collect(),
            r_steps: DEFAULT_R_STEPS,
        }
    }
}

/// `F,r,F_out,P_succ,F_out_sim,P_succ_sim,F_iter2,P_iter2`.
pub fn pareto_family(cfg: &ParetoFamilyConfig) -> Result<Table> {
    if cfg.fidelities.is_empty() {
        return Err(Error::Empty("fidelity list"));
    }
    if cfg.r_steps < 2 {
        return Err(Error::InvalidParameter("r-steps must be at least 2".into()));
    }
    let rs = ParetoFamilyParam::grid(cfg.r_steps);
    let mut jobs = Vec::new();
    for &f in &cfg.fidelities {
        let fid = Fidelity::new(f)?;
        let iter = iterated_two_pair_on_three(fid)?;
        jobs.extend(rs.iter().map(|&r| (fid, r, iter.f_out, iter.p_succ)));
    }
    let rows = par::map_slice(&jobs, |&(f, r, f_iter, p_iter)| -> Result<Vec<Cell>> {
        let (f_out, p_succ) = pareto_family_closed(f.value(), r)?;
        let sim = simulate_three_pair(f, &ThreePairProtocol::pareto_family(r))?;
        Ok(vec![
            f.value().into(),
            r.value().into(),
            f_out.into(),
            p_succ.into(),
            sim.f_out.value().into(),
            sim.p_succ.into(),
            f_iter.into(),
            p_iter.into(),
        ])
    });
    let mut table = Table::new(
        provenance(
            "pareto-family",
            &[("F", list(&cfg.fidelities)), ("r_steps", cfg.r_steps.to_string())],
        ),
        &["F", "r", "F_out", "P_succ", "F_out_sim", "P_succ_sim", "F_iter2", "P_iter2"],
    );
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

/// Writes a single table to `path`, or returns it rendered when `path` is
/// `None`.
pub fn emit_table(table: &Table, format: Format, path: Option<&Path>) -> Result<Option<String>> {
    let text = table.render(format)?;
    match path {
        Some(p) => {
            fs::write(p, text)?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

pub fn cmd_two_pair_sweep(cfg: &TwoPairSweepConfig, format: Format, path: Option<&Path>) -> Result<Option<String>> {
    emit_table(&two_pair_sweep(cfg)?, format, path)
}

pub fn cmd_two_pair_iterate(cfg: &TwoPairIterateConfig, format: Format, path: Option<&Path>) -> Result<Option<String>> {
    emit_table(&two_pair_iterate(cfg)?, format, path)
}

pub fn cmd_pareto_family(cfg: &ParetoFamilyConfig, format: Format, path: Option<&Path>) -> Result<Option<String>> {
    emit_table(&pareto_family(cfg)?, format, path)
}

/// Renders the sampled clouds and their front sidecars.
pub fn three_pair_artifacts(cfg: &ThreePairSampleConfig, format: Format) -> Result<Vec<Artifact>> {
    let mut out = Vec::new();
    for (table, sidecar) in three_pair_sample(cfg)? {
        let stem = sample_stem(sidecar.fidelity);
        out.push(Artifact {
            file_name: format!("{stem}.{}", format.extension()),
            contents: table.render(format)?,
        });
        let mut json = serde_json::to_string_pretty(&sidecar)?;
        json.push('\n');
        out.push(Artifact {
            file_name: format!("{stem}_front.json"),
            contents: json,
        });
    }
    Ok(out)
}

/// Writes the sample artifacts into directory `dir`, creating it if needed.
pub fn cmd_three_pair_sample(cfg: &ThreePairSampleConfig, format: Format, dir: &Path) -> Result<Vec<PathBuf>> {
    let artifacts = three_pair_artifacts(cfg, format)?;
    fs::create_dir_all(dir)?;
    artifacts
        .into_iter()
        .map(|a| {
            let path = dir.join(&a.file_name);
            fs::write(&path, a.contents)?;
            Ok(path)
        })
        .collect()
}
