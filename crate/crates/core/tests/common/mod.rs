#![allow(dead_code)]

pub mod criteria;
pub mod gen;
pub mod oracle;

use std::collections::BTreeMap;
use std::path::PathBuf;

use demeterlint_core::adapt::{preset_documents, ConfigDocument};
use demeterlint_core::codemodel::ResolutionMode;
use demeterlint_core::javafront::SourceFile;
use demeterlint_core::pipeline::{analyze, Analysis, AnalysisInput};

pub const FIXTURES: &[&str] = &[
    "listing01", "listing03", "listing04", "listing05", "listing06", "listing07", "listing08", "listing12", "listing14",
    "listing15", "listing16", "listing17",
];

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

fn read(path: &std::path::Path) -> SourceFile {
    let text = std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let name = path.strip_prefix(fixtures_dir()).unwrap_or(path).to_string_lossy().replace('\\', "/");
    SourceFile { name, text }
}

pub fn fixture_input(name: &str, configs: Vec<ConfigDocument>) -> AnalysisInput {
    let dir = fixtures_dir().join(name);
    let mut java: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.expect("dir entry").path())
        .filter(|p| p.extension().is_some_and(|x| x == "java"))
        .collect();
    java.sort();
    let mut stubs = vec![read(&fixtures_dir().join("common-stubs.json"))];
    let local = dir.join("stubs.json");
    if local.exists() {
        stubs.push(read(&local));
    }
    AnalysisInput { sources: java.iter().map(|p| read(p)).collect(), stubs, configs, mode: ResolutionMode::Strict }
}

pub fn preset(name: &str) -> Vec<ConfigDocument> {
    preset_documents(name).expect("shipped preset")
}

pub fn run_fixture(name: &str, preset_name: Option<&str>) -> Analysis {
    let configs = preset_name.map(preset).unwrap_or_default();
    analyze(&fixture_input(name, configs)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Hand-enumerated expectations stored next to the fixtures.
pub struct FixtureOracle {
    pub accesses: usize,
    pub base: usize,
    pub silenced: BTreeMap<String, usize>,
    pub remaining: BTreeMap<String, usize>,
}

pub fn oracle_json() -> serde_json::Value {
    let text = std::fs::read_to_string(fixtures_dir().join("oracle.json")).expect("oracle.json");
    serde_json::from_str(&text).expect("oracle.json parses")
}

pub fn fixture_oracle(name: &str) -> FixtureOracle {
    let root = oracle_json();
    let f = &root["fixtures"][name];
    let counts = |v: &serde_json::Value| -> BTreeMap<String, usize> {
        v.as_object()
            .map(|m| m.iter().map(|(k, n)| (k.clone(), n.as_u64().expect("count") as usize)).collect())
            .unwrap_or_default()
    };
    FixtureOracle {
        accesses: f["accesses"].as_u64().expect("accesses") as usize,
        base: f["base"].as_u64().expect("base") as usize,
        silenced: counts(&f["silenced"]),
        remaining: counts(&f["remaining"]),
    }
}

/// Per-rule silenced counts and per-status remaining counts of an analysis.
pub fn attribution(a: &Analysis) -> (BTreeMap<String, usize>, BTreeMap<String, usize>) {
    use demeterlint_core::adapt::Outcome;
    let mut silenced = BTreeMap::new();
    let mut remaining = BTreeMap::new();
    for v in &a.verdicts {
        match &v.outcome {
            Outcome::Silenced { rule, .. } => *silenced.entry(rule.clone()).or_insert(0) += 1,
            Outcome::Remaining { status, .. } => *remaining.entry(status.as_str().to_string()).or_insert(0) += 1,
        }
    }
    (silenced, remaining)
}

/// Compares the engine's verdicts with the brute-force oracle; returns the
/// first disagreement.
pub fn oracle_disagreement(a: &Analysis) -> Option<String> {
    let expected = oracle::Oracle::new(&a.table, &a.config, &a.executables).run();
    let actual: BTreeMap<String, demeterlint_core::adapt::Outcome> =
        a.verdicts.iter().map(|v| (v.violation.site.site_id.clone(), v.outcome.clone())).collect();
    if actual.len() != a.verdicts.len() {
        return Some("duplicate site ids in verdicts".to_string());
    }
    for (site, want) in &expected {
        match actual.get(site) {
            None => return Some(format!("{site}: oracle reports a violation the engine misses")),
            Some(got) if got != want => return Some(format!("{site}: engine {got:?}, oracle {want:?}")),
            _ => {}
        }
    }
    actual.keys().find(|s| !expected.contains_key(*s)).map(|s| format!("{s}: engine reports a violation the oracle does not"))
}

/// Analyzes inline sources against the common stubs plus `extra_stubs`.
pub fn inline_input(sources: &[(&str, &str)], extra_stubs: Option<&str>, configs: &[&str]) -> AnalysisInput {
    let mut stubs = vec![read(&fixtures_dir().join("common-stubs.json"))];
    if let Some(text) = extra_stubs {
        stubs.push(SourceFile { name: "extra-stubs.json".to_string(), text: text.to_string() });
    }
    AnalysisInput {
        sources: sources.iter().map(|(n, t)| SourceFile { name: n.to_string(), text: t.to_string() }).collect(),
        stubs,
        configs: configs
            .iter()
            .enumerate()
            .map(|(i, t)| ConfigDocument { name: format!("inline{i}.json"), text: t.to_string() })
            .collect(),
        mode: ResolutionMode::Strict,
    }
}

pub fn inline(sources: &[(&str, &str)], extra_stubs: Option<&str>, configs: &[&str]) -> Analysis {
    analyze(&inline_input(sources, extra_stubs, configs)).unwrap_or_else(|e| panic!("{e}"))
}
