//! Corpus configuration, the parallel check runner and report output.
//!
//! A corpus file is line oriented. Blank lines and `#` comments are
//! ignored, `set key=value` lines adjust the run, and every other line is
//! a [`GroupSpec`]:
//!
//! ```text
//! set seed=7
//! set checks=T1i,T2
//! semidirect p=2 m=3 n=1 t=5
//! dihedral m=3
//! ```
//!
//! Reports are written as JSON Lines, one record per check instance,
//! sorted by `(group_label, check_id, params)`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::constructors::{default_corpus, GroupSpec, SpecError};
use crate::kernel::{BuildOptions, GroupTable};
use crate::verifier::{run_check, CheckId, CheckReport, GroupContext, SkipReason, Status, SweepPolicy};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("thread pool: {0}")]
    Pool(String),
}

/// One group line of a corpus, parsed or not.
#[derive(Clone, Debug)]
pub struct SpecLine {
    pub line: usize,
    pub text: String,
    pub parsed: Result<GroupSpec, SpecError>,
}

#[derive(Clone, Debug)]
pub struct CorpusConfig {
    pub specs: Vec<SpecLine>,
    pub checks: Vec<CheckId>,
    pub order_cap: usize,
    pub exhaustive_threshold: usize,
    pub sample_count: usize,
    pub seed: u64,
    pub jobs: usize,
    pub output_path: Option<PathBuf>,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            specs: Vec::new(),
            checks: CheckId::ALL.to_vec(),
            order_cap: 4096,
            exhaustive_threshold: 256,
            sample_count: 10_000,
            seed: 0,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            output_path: None,
        }
    }
}

pub fn parse_checks(list: &str) -> Result<Vec<CheckId>, String> {
    let mut checks: Vec<CheckId> =
        list.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::parse).collect::<Result<_, _>>()?;
    checks.sort();
    checks.dedup();
    Ok(checks)
}

impl CorpusConfig {
    /// The shipped corpus with default settings.
    pub fn shipped() -> Self {
        CorpusConfig {
            specs: default_corpus()
                .into_iter()
                .enumerate()
                .map(|(i, s)| SpecLine { line: i + 1, text: s.label(), parsed: Ok(s) })
                .collect(),
            ..Default::default()
        }
    }

    /// Parses a corpus file. Malformed `set` lines are fatal; malformed
    /// group lines are kept as per-spec errors.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = CorpusConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(setting) = content.strip_prefix("set ") {
                config.apply_setting(setting.trim()).map_err(|message| ConfigError::Syntax { line, message })?;
                continue;
            }
            config.specs.push(SpecLine { line, text: content.to_string(), parsed: content.parse() });
        }
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    /// Applies one `key=value` setting.
    pub fn apply_setting(&mut self, setting: &str) -> Result<(), String> {
        let (key, value) = setting.split_once('=').ok_or_else(|| format!("expected key=value, found `{setting}`"))?;
        let (key, value) = (key.trim(), value.trim());
        let number = |v: &str| v.parse::<u64>().map_err(|_| format!("{key}: `{v}` is not a non-negative integer"));
        match key {
            "checks" => self.checks = parse_checks(value)?,
            "seed" => self.seed = number(value)?,
            "jobs" => self.jobs = number(value)?.max(1) as usize,
            "max-order" | "order_cap" => self.order_cap = number(value)? as usize,
            "exhaustive-threshold" | "exhaustive_threshold" => self.exhaustive_threshold = number(value)? as usize,
            "sample-count" | "sample_count" => self.sample_count = number(value)? as usize,
            "output" | "output_path" => self.output_path = Some(PathBuf::from(value)),
            other => return Err(format!("unknown setting `{other}`")),
        }
        Ok(())
    }

    /// Renders the configuration back into the corpus file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let checks: Vec<&str> = self.checks.iter().map(|c| c.as_str()).collect();
        let _ = writeln!(out, "set checks={}", checks.join(","));
        let _ = writeln!(out, "set seed={}", self.seed);
        let _ = writeln!(out, "set max-order={}", self.order_cap);
        let _ = writeln!(out, "set exhaustive-threshold={}", self.exhaustive_threshold);
        let _ = writeln!(out, "set sample-count={}", self.sample_count);
        for spec in &self.specs {
            let _ = writeln!(out, "{}", spec.text);
        }
        out
    }

    fn policy(&self) -> SweepPolicy {
        SweepPolicy {
            exhaustive_threshold: self.exhaustive_threshold,
            sample_count: self.sample_count,
            seed: self.seed,
        }
    }

    fn build_options(&self) -> BuildOptions {
        BuildOptions {
            order_cap: self.order_cap,
            dense_limit: self.order_cap.max(4096),
            seed: self.seed,
            ..Default::default()
        }
    }
}

/// A corpus line that could not be turned into a group.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SpecFailure {
    pub line: usize,
    pub text: String,
    pub error: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckTally {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupSummary {
    pub label: String,
    pub order: usize,
    pub powerful: bool,
}

/// Everything a run produced.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub reports: Vec<CheckReport>,
    pub groups: Vec<GroupSummary>,
    pub spec_failures: Vec<SpecFailure>,
    /// Powerful groups whose power sets contradicted the kernel.
    pub kernel_failures: Vec<String>,
}

impl RunOutcome {
    pub fn tally(&self) -> BTreeMap<CheckId, CheckTally> {
        let mut tally: BTreeMap<CheckId, CheckTally> = BTreeMap::new();
        for r in &self.reports {
            let t = tally.entry(r.check_id).or_default();
            match r.status {
                Status::Pass => t.pass += 1,
                Status::Fail => t.fail += 1,
                Status::Skipped(_) => t.skipped += 1,
            }
        }
        tally
    }

    /// `0` when nothing failed, `1` on any check or kernel failure, `2`
    /// when only corpus lines were rejected.
    pub fn exit_code(&self) -> i32 {
        if !self.kernel_failures.is_empty() || self.reports.iter().any(|r| r.status == Status::Fail) {
            1
        } else if !self.spec_failures.is_empty() {
            2
        } else {
            0
        }
    }

    /// Report records as JSON Lines.
    pub fn records(&self) -> String {
        let mut out = String::new();
        for r in &self.reports {
            out.push_str(&serde_json::to_string(r).expect("reports serialize"));
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        let powerful = self.groups.iter().filter(|g| g.powerful).count();
        let _ = writeln!(
            out,
            "groups: {} built ({} powerful, {} not powerful), {} rejected",
            self.groups.len(),
            powerful,
            self.groups.len() - powerful,
            self.spec_failures.len()
        );
        let _ = writeln!(out, "records: {}", self.reports.len());
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<8} {:>8} {:>6} {:>8}", "check", "pass", "fail", "skipped");
        for (check, t) in self.tally() {
            let _ = writeln!(out, "{:<8} {:>8} {:>6} {:>8}", check.as_str(), t.pass, t.fail, t.skipped);
        }

        let failures: Vec<&CheckReport> = self.reports.iter().filter(|r| r.status == Status::Fail).collect();
        if !failures.is_empty() {
            let _ = writeln!(out, "\nfailures:");
            for r in failures {
                let detail = r.witness.as_ref().map_or("", |w| w.detail.as_str());
                let params = serde_json::to_string(&r.params).expect("params serialize");
                let _ = writeln!(out, "  {} {} {}: {}", r.group_label, r.check_id, params, detail);
            }
        }

        let controls: Vec<&GroupSummary> = self.groups.iter().filter(|g| !g.powerful).collect();
        if !controls.is_empty() {
            let _ = writeln!(out, "\nnegative controls (not powerful):");
            for g in controls {
                let t2 = self.reports.iter().find(|r| {
                    r.group_label == g.label
                        && r.check_id == CheckId::T2
                        && r.status == Status::Skipped(SkipReason::NotPowerful)
                });
                match t2.and_then(|r| r.witness.as_ref()) {
                    Some(w) => {
                        let _ = writeln!(
                            out,
                            "  {}: T2 equality fails, {}",
                            g.label,
                            w.detail.trim_start_matches("negative control: ")
                        );
                    }
                    None if t2.is_some() => {
                        let _ = writeln!(out, "  {}: T2 equality holds anyway", g.label);
                    }
                    None => {
                        let _ = writeln!(out, "  {}", g.label);
                    }
                }
            }
        }

        let sharp: Vec<&CheckReport> =
            self.reports.iter().filter(|r| r.check_id == CheckId::Sharp && r.witness.is_some()).collect();
        if self.reports.iter().any(|r| r.check_id == CheckId::Sharp) {
            let _ = writeln!(out, "\nsharpness of exp Omega_i(G) <= 2^(i+1):");
            if sharp.is_empty() {
                let _ = writeln!(out, "  none found in corpus");
            }
            for r in sharp {
                let w = r.witness.as_ref().expect("filtered");
                let _ = writeln!(out, "  {} i={}: {}", r.group_label, r.params.i.unwrap_or_default(), w.detail);
            }
        }

        if !self.kernel_failures.is_empty() {
            let _ = writeln!(out, "\nkernel failures:");
            for k in &self.kernel_failures {
                let _ = writeln!(out, "  {k}");
            }
        }
        if !self.spec_failures.is_empty() {
            let _ = writeln!(out, "\nrejected corpus lines:");
            for f in &self.spec_failures {
                let _ = writeln!(out, "  line {}: `{}`: {}", f.line, f.text, f.error);
            }
        }
        let _ = writeln!(out, "\nexit status: {}", self.exit_code());
        out
    }
}

/// Builds every group, runs the selected checks on `config.jobs` workers
/// and merges the reports deterministically.
pub fn run(config: &CorpusConfig) -> Result<RunOutcome, ConfigError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| ConfigError::Pool(e.to_string()))?;
    Ok(pool.install(|| run_in_pool(config)))
}

fn run_in_pool(config: &CorpusConfig) -> RunOutcome {
    let opts = config.build_options();
    let policy = config.policy();

    let built: Vec<(&SpecLine, Result<GroupTable, SpecError>)> = config
        .specs
        .par_iter()
        .map(|line| {
            let table = match &line.parsed {
                Ok(spec) => spec.build(&opts),
                Err(e) => Err(e.clone()),
            };
            (line, table)
        })
        .collect();

    let mut spec_failures = Vec::new();
    let mut tables = Vec::new();
    for (line, table) in built {
        match table {
            Ok(t) => tables.push(t),
            Err(e) => {
                spec_failures.push(SpecFailure { line: line.line, text: line.text.clone(), error: e.to_string() })
            }
        }
    }
    spec_failures.sort();

    let contexts: Vec<GroupContext<'_>> = tables.par_iter().map(GroupContext::new).collect();
    let aborted: Vec<Option<String>> =
        contexts.par_iter().map(|c| if c.powerful { c.check_power_sets().err() } else { None }).collect();
    let mut kernel_failures: Vec<String> = aborted.iter().flatten().cloned().collect();
    kernel_failures.sort();

    let runnable: Vec<&GroupContext<'_>> =
        contexts.iter().zip(&aborted).filter(|(_, a)| a.is_none()).map(|(c, _)| c).collect();
    let units: Vec<(&GroupContext<'_>, CheckId)> =
        runnable.iter().flat_map(|&c| config.checks.iter().map(move |&id| (c, id))).collect();
    let mut reports: Vec<CheckReport> = units.par_iter().flat_map_iter(|&(c, id)| run_check(c, id, &policy)).collect();
    reports.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));

    let mut groups: Vec<GroupSummary> = contexts
        .iter()
        .map(|c| GroupSummary { label: c.table.label().to_string(), order: c.table.order(), powerful: c.powerful })
        .collect();
    groups.sort_by(|a, b| a.label.cmp(&b.label));

    RunOutcome { reports, groups, spec_failures, kernel_failures }
}

/// Writes the JSON Lines records to `path` and the summary next to it as
/// `<path>.summary.txt`.
pub fn emit_report(outcome: &RunOutcome, path: &Path) -> Result<PathBuf, ConfigError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ConfigError::Io { path, source }
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    fs::write(path, outcome.records()).map_err(io_err(path))?;
    let mut summary_path = path.as_os_str().to_owned();
    summary_path.push(".summary.txt");
    let summary_path = PathBuf::from(summary_path);
    fs::write(&summary_path, outcome.summary()).map_err(io_err(&summary_path))?;
    Ok(summary_path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_settings_and_specs() {
        let text = "# demo\nset seed=7\nset checks=T2,T1i\n\nsemidirect p=2 m=3 n=1 t=5  # trailing\nbogus p=1\n";
        let config = CorpusConfig::parse(text).unwrap();
        assert_eq!(config.seed, 7);
        assert_eq!(config.checks, vec![CheckId::T1i, CheckId::T2]);
        assert_eq!(config.specs.len(), 2);
        assert_eq!(config.specs[0].line, 5);
        assert!(config.specs[0].parsed.is_ok());
        assert!(config.specs[1].parsed.is_err());
    }

    #[test]
    fn bad_settings_are_fatal() {
        assert!(matches!(CorpusConfig::parse("set colour=blue"), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(CorpusConfig::parse("set seed=-1").is_err());
        assert!(CorpusConfig::parse("set checks=T9").is_err());
    }

    #[test]
    fn empty_corpus() {
        let outcome = run(&CorpusConfig { jobs: 1, ..Default::default() }).unwrap();
        assert!(outcome.reports.is_empty());
        assert_eq!(outcome.records(), "");
        assert_eq!(outcome.exit_code(), 0);
        assert!(outcome.summary().contains("records: 0"));
    }

    #[test]
    fn shipped_round_trips_through_text() {
        let shipped = CorpusConfig::shipped();
        let reparsed = CorpusConfig::parse(&shipped.to_text()).unwrap();
        assert_eq!(reparsed.specs.len(), shipped.specs.len());
        assert_eq!(reparsed.to_text(), shipped.to_text());
    }
}
