//! Seeded experiment campaigns and their CSV reports.
//!
//! CSV columns, in order:
//!
//! | column | meaning |
//! |---|---|
//! | `trial` | trial index |
//! | `seed` | seed of this trial (derived from the campaign seed) |
//! | `mode` | campaign mode |
//! | `host_n`, `host_min_degree`, `host_density` | host statistics |
//! | `seq_len`, `seq_max_degree` | sequence statistics |
//! | `outcome` | `embedded`, `failed` or `skipped` |
//! | `stages` | `;`-separated stages the pipeline completed |
//! | `failed_stage` | stage that failed, empty on success |
//! | `reason` | failure message of that stage |
//! | `map_valid` | independent check of the returned map |
//! | `oracle` | exact search verdict: `found`, `absent`, `timeout`, or empty when not run |
//! | `obstruction` | parity obstruction present (parity mode) |
//! | `edits` | edit count of the found host (edits mode) |
//! | `wall_ms` | trial wall time, only when timing is enabled |

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generators::{
    gen_bounded_graphic_seq, gen_host_min_degree, gen_sharpness_host, gen_unbalanced_seq, min_degree_target,
};
use crate::embed::{
    check_embedding, embed_backtracking, embed_pipeline, embed_sequence, embed_with_edits, parity_obstruction,
    EditOutcome, EmbedOutcome, PipelineInput, PipelineParams, SequenceOutcome, Stage,
};
use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::sequences::{is_graphic, realize_graphic, DegreeSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Thm13,
    Thm15,
    Sharpness,
    Parity,
    Edits,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thm13" => Ok(Mode::Thm13),
            "thm15" => Ok(Mode::Thm15),
            "sharpness" => Ok(Mode::Sharpness),
            "parity" => Ok(Mode::Parity),
            "edits" => Ok(Mode::Edits),
            other => Err(Error::InvalidInput(format!("unknown mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Thm13 => "thm13",
            Mode::Thm15 => "thm15",
            Mode::Sharpness => "sharpness",
            Mode::Parity => "parity",
            Mode::Edits => "edits",
        })
    }
}

fn default_oracle_cap() -> usize {
    40
}

fn default_budget() -> u64 {
    1_000_000
}

fn default_edit_budget() -> usize {
    1
}

/// Campaign description, usually read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub n: usize,
    pub q: usize,
    pub max_degree: usize,
    pub eta: f64,
    /// Cluster-graph density threshold.
    pub density: f64,
    pub cluster_size: usize,
    pub trials: usize,
    pub seed: u64,
    /// Host minimum degree as a fraction of `n`; defaults per mode.
    #[serde(default)]
    pub min_frac: Option<f64>,
    /// Host vertices left unused by unbalanced sequences; defaults to
    /// `ceil(n / 10)`.
    #[serde(default)]
    pub slack: Option<usize>,
    /// Largest host on which failures are re-checked by exact search.
    #[serde(default = "default_oracle_cap")]
    pub oracle_cap: usize,
    /// Node budget of every exact search.
    #[serde(default = "default_budget")]
    pub budget: u64,
    /// Edit budget in edits mode.
    #[serde(default = "default_edit_budget")]
    pub edit_budget: usize,
    /// Record wall time per trial. Off by default so that reports are
    /// byte-reproducible.
    #[serde(default)]
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(mode: Mode, n: usize, trials: usize, seed: u64) -> Self {
        ExperimentConfig {
            mode,
            n,
            q: 1,
            max_degree: 3,
            eta: 0.1,
            density: 0.4,
            cluster_size: 6,
            trials,
            seed,
            min_frac: None,
            slack: None,
            oracle_cap: default_oracle_cap(),
            budget: default_budget(),
            edit_budget: default_edit_budget(),
            timing: false,
        }
    }

    pub fn from_toml(text: &str, context: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::parse(context, e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, &path.display().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.n == 0 || self.q == 0 || self.max_degree == 0 || self.cluster_size == 0 {
            return bad("n, q, max_degree and cluster_size must be positive".into());
        }
        for (name, v) in [("eta", self.eta), ("density", self.density)] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} = {v} outside (0, 1)"));
            }
        }
        if let Some(f) = self.min_frac {
            if !(0.0..1.0).contains(&f) {
                return bad(format!("min_frac = {f} outside [0, 1)"));
            }
        }
        match self.mode {
            Mode::Sharpness | Mode::Parity if self.n % 2 == 1 || self.n < 4 => {
                bad(format!("{} mode needs an even n >= 4, got {}", self.mode, self.n))
            }
            Mode::Edits if self.n > 14 || self.edit_budget > 2 => {
                bad("edits mode is limited to n <= 14 and edit_budget <= 2".into())
            }
            _ => Ok(()),
        }
    }

    pub fn min_frac(&self) -> f64 {
        self.min_frac.unwrap_or(match self.mode {
            Mode::Thm15 => 1.0 / (self.q as f64 + 1.0) + self.eta,
            _ => 0.6,
        })
    }

    pub fn slack(&self) -> usize {
        self.slack.unwrap_or(self.n.div_ceil(10))
    }

    fn pipeline_params(&self, seed: u64) -> PipelineParams {
        PipelineParams {
            cluster_size: self.cluster_size,
            density: self.density,
            eta: self.eta,
            q: self.q,
            seed,
            max_degree: Some(self.max_degree),
            slack: self.slack(),
            star_budget: self.budget,
            completion_budget: self.budget,
        }
    }

    /// Seed of trial `i`.
    pub fn trial_seed(&self, i: usize) -> u64 {
        self.seed.wrapping_mul(1_000_003).wrapping_add(i as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Embedded,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Found,
    Absent,
    Timeout,
}

impl From<&EmbedOutcome> for Verdict {
    fn from(o: &EmbedOutcome) -> Self {
        match o {
            EmbedOutcome::Found(_) => Verdict::Found,
            EmbedOutcome::Absent => Verdict::Absent,
            EmbedOutcome::Timeout => Verdict::Timeout,
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub mode: Mode,
    pub host_n: usize,
    pub host_min_degree: usize,
    pub host_density: f64,
    pub seq_len: usize,
    pub seq_max_degree: usize,
    pub outcome: Outcome,
    pub stages: String,
    pub failed_stage: Option<Stage>,
    pub reason: Option<String>,
    pub map_valid: Option<bool>,
    pub oracle: Option<Verdict>,
    pub obstruction: Option<bool>,
    pub edits: Option<usize>,
    pub wall_ms: Option<u64>,
}

impl TrialRecord {
    fn new(cfg: &ExperimentConfig, trial: usize, seed: u64, host: &SimpleGraph, len: usize, max: usize) -> Self {
        TrialRecord {
            trial,
            seed,
            mode: cfg.mode,
            host_n: host.vertex_count(),
            host_min_degree: host.min_degree(),
            host_density: host.density(),
            seq_len: len,
            seq_max_degree: max,
            outcome: Outcome::Skipped,
            stages: String::new(),
            failed_stage: None,
            reason: None,
            map_valid: None,
            oracle: None,
            obstruction: None,
            edits: None,
            wall_ms: None,
        }
    }

    /// Completed stages, parsed back from the `stages` column.
    pub fn stage_list(&self) -> Vec<Stage> {
        self.stages
            .split(';')
            .filter(|s| !s.is_empty())
            .filter_map(|s| Stage::ALL.iter().copied().find(|st| st.name() == s))
            .collect()
    }
}

fn join_stages(stages: &[Stage]) -> String {
    stages.iter().map(|s| s.name()).collect::<Vec<_>>().join(";")
}

/// Runs the pipeline, checks any map it returns, and re-checks failures
/// with the exact search when the host is small enough.
fn pipeline_trial(cfg: &ExperimentConfig, host: &SimpleGraph, input: &PipelineInput, rec: &mut TrialRecord) {
    match embed_pipeline(host, input, &cfg.pipeline_params(rec.seed)) {
        Ok(ok) => {
            rec.outcome = Outcome::Embedded;
            rec.stages = join_stages(&Stage::ALL);
            rec.map_valid = Some(check_embedding(&ok.pattern, host, &ok.map).is_ok());
        }
        Err(fail) => {
            rec.outcome = Outcome::Failed;
            rec.stages = join_stages(fail.stage.predecessors());
            rec.failed_stage = Some(fail.stage);
            rec.reason = Some(fail.reason.clone());
            if host.vertex_count() <= cfg.oracle_cap {
                if let Some(pattern) = &fail.pattern {
                    let verdict = embed_backtracking(pattern, host, cfg.budget);
                    if let EmbedOutcome::Found(map) = &verdict {
                        rec.map_valid = Some(check_embedding(pattern, host, map).is_ok());
                    }
                    rec.oracle = Some(Verdict::from(&verdict));
                }
            }
        }
    }
}

/// An all-odd sequence on `n` vertices (random bounded degrees rounded up
/// to the next odd value, resampled until graphic) and a host made of two
/// dense pieces of odd order.
fn parity_instance(cfg: &ExperimentConfig, seed: u64) -> Result<(DegreeSequence, SimpleGraph)> {
    let n = cfg.n;
    let mut odd = n / 2;
    if odd.is_multiple_of(2) {
        odd -= 1;
    }
    let left = gen_host_min_degree(odd, cfg.min_frac(), seed)?;
    let right = gen_host_min_degree(n - odd, cfg.min_frac(), seed ^ 0x5151)?;
    let host = left.disjoint_union(&right);
    let top = if cfg.max_degree % 2 == 1 { cfg.max_degree } else { cfg.max_degree - 1 }.max(1);
    let mut attempt = 0u64;
    loop {
        let base = gen_bounded_graphic_seq(n, top, seed.wrapping_add(attempt))?;
        let degrees: Vec<usize> = base.degrees().iter().map(|&d| d | 1).collect();
        let seq = DegreeSequence::new(degrees);
        if is_graphic(&seq) {
            return Ok((seq, host));
        }
        attempt += 1;
    }
}

fn run_trial(cfg: &ExperimentConfig, trial: usize) -> Result<TrialRecord> {
    let start = Instant::now();
    let seed = cfg.trial_seed(trial);
    let seq_seed = seed ^ 0xA5A5_A5A5_A5A5_A5A5;
    let mut rec = match cfg.mode {
        Mode::Thm13 => {
            let host = gen_host_min_degree(cfg.n, cfg.min_frac(), seed)?;
            let seq = gen_bounded_graphic_seq(cfg.n, cfg.max_degree, seq_seed)?;
            let mut rec = TrialRecord::new(cfg, trial, seed, &host, seq.len(), seq.max_degree());
            pipeline_trial(cfg, &host, &PipelineInput::Graphic(seq), &mut rec);
            rec
        }
        Mode::Thm15 => {
            let host = gen_host_min_degree(cfg.n, cfg.min_frac(), seed)?;
            let len = cfg.n.saturating_sub(cfg.slack());
            let s = (len / (cfg.q + 1)).max(1);
            let t = len.saturating_sub(s).clamp(cfg.q * s, cfg.max_degree * s);
            let seq = gen_unbalanced_seq(s, t, cfg.q, cfg.max_degree, seq_seed)?;
            let mut rec = TrialRecord::new(cfg, trial, seed, &host, seq.len(), seq.max_degree());
            pipeline_trial(cfg, &host, &PipelineInput::Unbalanced(seq), &mut rec);
            rec
        }
        Mode::Sharpness => {
            let host = gen_sharpness_host(cfg.n)?;
            let seq = DegreeSequence::new(vec![1; cfg.n]);
            let mut rec = TrialRecord::new(cfg, trial, seed, &host, cfg.n, 1);
            pipeline_trial(cfg, &host, &PipelineInput::Graphic(seq), &mut rec);
            if rec.oracle.is_none() && host.vertex_count() <= cfg.oracle_cap {
                let pattern = realize_graphic(&DegreeSequence::new(vec![1; cfg.n]))?;
                rec.oracle = Some(Verdict::from(&embed_backtracking(&pattern, &host, cfg.budget)));
            }
            rec
        }
        Mode::Parity => {
            let (seq, host) = parity_instance(cfg, seq_seed)?;
            let mut rec = TrialRecord::new(cfg, trial, seed, &host, seq.len(), seq.max_degree());
            rec.obstruction = Some(parity_obstruction(&seq, &host));
            pipeline_trial(cfg, &host, &PipelineInput::Graphic(seq.clone()), &mut rec);
            if host.vertex_count() <= cfg.oracle_cap {
                rec.oracle = Some(match embed_sequence(&seq, &host, cfg.budget) {
                    SequenceOutcome::Found(_) => Verdict::Found,
                    SequenceOutcome::Absent => Verdict::Absent,
                    SequenceOutcome::Timeout => Verdict::Timeout,
                });
            }
            rec
        }
        Mode::Edits => {
            // A dense host with one vertex cut off, against a perfect matching
            // (or a near-perfect one for odd n).
            let mut host = gen_host_min_degree(cfg.n - 1, cfg.min_frac(), seed)?;
            host = host.disjoint_union(&SimpleGraph::new(1));
            let mut degrees = vec![1; cfg.n - cfg.n % 2];
            degrees.resize(cfg.n, 0);
            let seq = DegreeSequence::new(degrees);
            let mut rec = TrialRecord::new(cfg, trial, seed, &host, seq.len(), seq.max_degree());
            match embed_with_edits(&host, &seq, cfg.edit_budget, cfg.budget) {
                EditOutcome::Found {
                    edits,
                    edited,
                    pattern,
                    map,
                } => {
                    rec.outcome = Outcome::Embedded;
                    rec.edits = Some(edits.len());
                    rec.map_valid = Some(check_embedding(&pattern, &edited, &map).is_ok());
                    rec.oracle = Some(Verdict::Found);
                }
                EditOutcome::Absent => {
                    rec.outcome = Outcome::Failed;
                    rec.oracle = Some(Verdict::Absent);
                }
                EditOutcome::Timeout => {
                    rec.outcome = Outcome::Failed;
                    rec.oracle = Some(Verdict::Timeout);
                }
            }
            rec
        }
    };
    if cfg.timing {
        rec.wall_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(rec)
}

/// Runs all trials, in parallel, returning records in trial order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    (0..cfg.trials).into_par_iter().map(|i| run_trial(cfg, i)).collect()
}

pub fn records_to_csv(records: &[TrialRecord]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(|e| Error::parse("csv", e))?;
    for r in records {
        w.serialize(r).map_err(|e| Error::parse("csv", e))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::parse("csv", e))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn records_from_csv(text: &str, context: &str) -> Result<Vec<TrialRecord>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = r
        .headers()
        .map_err(|e| Error::parse(context, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    if header != CSV_HEADER {
        return Err(Error::parse(context, format!("unexpected columns {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(|e| Error::parse(context, e))).collect()
}

pub fn write_csv(path: &Path, records: &[TrialRecord]) -> Result<()> {
    std::fs::write(path, records_to_csv(records)?).map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    records_from_csv(&text, &path.display().to_string())
}

pub const CSV_HEADER: [&str; 17] = [
    "trial",
    "seed",
    "mode",
    "host_n",
    "host_min_degree",
    "host_density",
    "seq_len",
    "seq_max_degree",
    "outcome",
    "stages",
    "failed_stage",
    "reason",
    "map_valid",
    "oracle",
    "obstruction",
    "edits",
    "wall_ms",
];

/// Aggregate counts over a campaign.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub trials: usize,
    pub embedded: usize,
    pub failed: usize,
    pub valid_maps: usize,
    pub invalid_maps: usize,
    pub oracle_found: usize,
    pub oracle_absent: usize,
    pub oracle_timeout: usize,
    pub obstructions: usize,
    pub min_degree_target: Option<usize>,
}

impl Summary {
    pub fn of(cfg: &ExperimentConfig, records: &[TrialRecord]) -> Self {
        let mut s = Summary {
            trials: records.len(),
            min_degree_target: matches!(cfg.mode, Mode::Thm13 | Mode::Thm15)
                .then(|| min_degree_target(cfg.n, cfg.min_frac())),
            ..Summary::default()
        };
        for r in records {
            match r.outcome {
                Outcome::Embedded => s.embedded += 1,
                Outcome::Failed => s.failed += 1,
                Outcome::Skipped => {}
            }
            match r.map_valid {
                Some(true) => s.valid_maps += 1,
                Some(false) => s.invalid_maps += 1,
                None => {}
            }
            match r.oracle {
                Some(Verdict::Found) => s.oracle_found += 1,
                Some(Verdict::Absent) => s.oracle_absent += 1,
                Some(Verdict::Timeout) => s.oracle_timeout += 1,
                None => {}
            }
            if r.obstruction == Some(true) {
                s.obstructions += 1;
            }
        }
        s
    }
}

impl std::fmt::Display for Summary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let pct = |k: usize| if self.trials == 0 { 0.0 } else { 100.0 * k as f64 / self.trials as f64 };
        writeln!(f, "trials           {}", self.trials)?;
        writeln!(f, "embedded         {} ({:.1}%)", self.embedded, pct(self.embedded))?;
        writeln!(f, "failed           {} ({:.1}%)", self.failed, pct(self.failed))?;
        writeln!(f, "valid maps       {}", self.valid_maps)?;
        writeln!(f, "invalid maps     {}", self.invalid_maps)?;
        writeln!(
            f,
            "oracle           found {} / absent {} / timeout {}",
            self.oracle_found, self.oracle_absent, self.oracle_timeout
        )?;
        write!(f, "obstructions     {}", self.obstructions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_give_a_header_only() {
        let cfg = ExperimentConfig::new(Mode::Thm13, 20, 0, 1);
        let records = run_experiment(&cfg).unwrap();
        assert!(records.is_empty());
        assert_eq!(records_to_csv(&records).unwrap(), CSV_HEADER.join(",") + "\n");
    }

    #[test]
    fn unknown_mode_is_rejected_at_parse_time() {
        let text = ExperimentConfig::new(Mode::Thm13, 20, 1, 1).to_toml().replace("thm13", "thm99");
        assert!(ExperimentConfig::from_toml(&text, "cfg").is_err());
        assert!("thm99".parse::<Mode>().is_err());
    }

    #[test]
    fn toml_round_trip() {
        let cfg = ExperimentConfig::new(Mode::Sharpness, 8, 3, 9);
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml(), "cfg").unwrap(), cfg);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = ExperimentConfig::new(Mode::Thm13, 20, 1, 1);
        cfg.eta = 1.5;
        assert!(cfg.validate().is_err());
        assert!(ExperimentConfig::new(Mode::Sharpness, 9, 1, 1).validate().is_err());
        assert!(ExperimentConfig::new(Mode::Edits, 20, 1, 1).validate().is_err());
    }

    #[test]
    fn sharpness_is_never_embeddable() {
        let cfg = ExperimentConfig::new(Mode::Sharpness, 8, 4, 2);
        let records = run_experiment(&cfg).unwrap();
        for r in &records {
            assert_eq!(r.outcome, Outcome::Failed);
            assert_eq!(r.oracle, Some(Verdict::Absent));
        }
    }

    #[test]
    fn csv_round_trip_and_reproducibility() {
        for mode in [Mode::Thm13, Mode::Thm15, Mode::Parity, Mode::Edits] {
            let mut cfg = ExperimentConfig::new(mode, 12, 3, 4);
            cfg.q = 2;
            let a = run_experiment(&cfg).unwrap();
            let b = run_experiment(&cfg).unwrap();
            let text = records_to_csv(&a).unwrap();
            assert_eq!(text, records_to_csv(&b).unwrap());
            assert_eq!(records_from_csv(&text, "mem").unwrap(), a);
            for r in &a {
                let stages = r.stage_list();
                assert_eq!(&stages[..], &Stage::ALL[..stages.len()]);
            }
        }
    }
}
