//! Argument handling, input collection and exit-code policy for the
//! `demeterlint` binary.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use demeterlint_core::adapt::{preset_documents, ConfigDocument, Explanation, Outcome, PRESETS};
use demeterlint_core::codemodel::ResolutionMode;
use demeterlint_core::javafront::SourceFile;
use demeterlint_core::pipeline::{analyze, Analysis, AnalysisInput};
use demeterlint_core::report::{format_percent, render, Format};

pub const EXIT_OK: u8 = 0;
pub const EXIT_THRESHOLD: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Analyze,
    Explain,
    Stats,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
    Table,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Format {
        match f {
            OutputFormat::Json => Format::Json,
            OutputFormat::Text => Format::Text,
            OutputFormat::Table => Format::Table,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "demeterlint", version, about = "Checks Java sources against the class form of the Law of Demeter")]
pub struct RunOptions {
    /// Java source files or directories searched recursively for `*.java`.
    pub paths: Vec<PathBuf>,
    /// Stub files, or directories searched for `*.json`.
    #[arg(long = "stubs", value_name = "PATH")]
    pub stub_paths: Vec<PathBuf>,
    /// Configuration documents, applied in the order given.
    #[arg(long = "config", value_name = "PATH")]
    pub config_paths: Vec<PathBuf>,
    /// Shipped rule set loaded before any `--config`.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    #[arg(long, value_enum, default_value = "analyze")]
    pub mode: Mode,
    /// Site id for `--mode explain`, e.g. `pkg.C#m(int)@3`.
    #[arg(long)]
    pub site: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
    /// Fail on any binding problem (the default).
    #[arg(long, conflicts_with = "lenient")]
    pub strict: bool,
    /// Bind what can be bound and report the rest as unresolved receivers.
    #[arg(long)]
    pub lenient: bool,
    /// Largest number of candidate true positives that still exits 0.
    #[arg(long, default_value_t = 0)]
    pub fail_threshold: usize,
    /// Worker threads; defaults to the number of CPUs.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl RunOptions {
    pub fn resolution(&self) -> ResolutionMode {
        if self.lenient {
            ResolutionMode::Lenient
        } else {
            ResolutionMode::Strict
        }
    }
}

/// What a run printed and how it exited.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

impl RunOutput {
    fn error(code: &str, message: impl std::fmt::Display) -> RunOutput {
        RunOutput { code: EXIT_ERROR, stdout: String::new(), stderr: format!("{code}: {message}\n") }
    }
}

pub fn run_from_args<I, T>(args: I) -> RunOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match RunOptions::try_parse_from(args) {
        Ok(opts) => run(&opts),
        Err(e) => {
            let text = e.render().to_string();
            match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    RunOutput { code: EXIT_OK, stdout: text, stderr: String::new() }
                }
                _ => RunOutput { code: EXIT_ERROR, stdout: String::new(), stderr: format!("E-USAGE: {text}") },
            }
        }
    }
}

fn collect(paths: &[PathBuf], extension: &str) -> Result<Vec<PathBuf>, String> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            for entry in walkdir::WalkDir::new(p).sort_by_file_name() {
                let entry = entry.map_err(|e| e.to_string())?;
                if entry.file_type().is_file() && entry.path().extension().is_some_and(|x| x == extension) {
                    out.push(entry.into_path());
                }
            }
        } else if p.exists() {
            out.push(p.clone());
        } else {
            return Err(format!("{}: no such file or directory", p.display()));
        }
    }
    Ok(out)
}

fn read_all(paths: &[PathBuf]) -> Result<Vec<SourceFile>, String> {
    paths
        .iter()
        .map(|p| {
            std::fs::read_to_string(p)
                .map(|text| SourceFile { name: display(p), text })
                .map_err(|e| format!("{}: {e}", p.display()))
        })
        .collect()
}

fn display(p: &Path) -> String {
    p.to_string_lossy().replace('\\', "/")
}

fn load_inputs(opts: &RunOptions) -> Result<AnalysisInput, RunOutput> {
    let io = |m: String| RunOutput::error("E-IO", m);
    let sources = read_all(&collect(&opts.paths, "java").map_err(io)?).map_err(io)?;
    let stubs = read_all(&collect(&opts.stub_paths, "json").map_err(|m| RunOutput::error("E-STUB", m))?)
        .map_err(|m| RunOutput::error("E-STUB", m))?;
    let mut configs = Vec::new();
    if let Some(name) = &opts.preset {
        match preset_documents(name) {
            Some(docs) => configs.extend(docs),
            None => {
                return Err(RunOutput::error(
                    "E-CONFIG",
                    format!("unknown preset `{name}` (known: {})", PRESETS.join(", ")),
                ))
            }
        }
    }
    for f in read_all(&opts.config_paths).map_err(|m| RunOutput::error("E-CONFIG", m))? {
        configs.push(ConfigDocument { name: f.name, text: f.text });
    }
    Ok(AnalysisInput { sources, stubs, configs, mode: opts.resolution() })
}

pub fn run(opts: &RunOptions) -> RunOutput {
    if opts.mode == Mode::Analyze && opts.paths.is_empty() {
        return RunOutput::error("E-USAGE", "analyze needs at least one source path");
    }
    if opts.mode == Mode::Explain && opts.site.is_none() {
        return RunOutput::error("E-USAGE", "explain needs --site");
    }
    let work = || -> RunOutput {
        let input = match load_inputs(opts) {
            Ok(i) => i,
            Err(out) => return out,
        };
        let analysis = match analyze(&input) {
            Ok(a) => a,
            Err(e) => return RunOutput::error(e.code(), e),
        };
        let mut stderr = String::new();
        for w in &analysis.warnings {
            let _ = writeln!(stderr, "warning: {w}");
        }
        let mut out = match opts.mode {
            Mode::Analyze => analyze_output(&analysis, opts),
            Mode::Stats => stats_output(&analysis, opts),
            Mode::Explain => explain_output(&analysis, opts),
        };
        out.stderr.insert_str(0, &stderr);
        out
    };
    match opts.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(e) => RunOutput::error("E-USAGE", e),
        },
        None => work(),
    }
}

fn exit_for(analysis: &Analysis, opts: &RunOptions) -> u8 {
    if analysis.report.tp_candidates() > opts.fail_threshold {
        EXIT_THRESHOLD
    } else {
        EXIT_OK
    }
}

fn analyze_output(analysis: &Analysis, opts: &RunOptions) -> RunOutput {
    RunOutput { code: exit_for(analysis, opts), stdout: render(&analysis.report, opts.format.into()), stderr: String::new() }
}

fn stats_output(analysis: &Analysis, opts: &RunOptions) -> RunOutput {
    let r = &analysis.report;
    let stdout = if opts.format == OutputFormat::Json {
        let value = serde_json::json!({
            "schema": r.schema,
            "digest": r.digest,
            "totals": r.totals,
            "waterfall": r.waterfall,
        });
        let mut s = serde_json::to_string_pretty(&value).expect("stats serialize");
        s.push('\n');
        s
    } else {
        let t = &r.totals;
        let mut s = String::new();
        let _ = writeln!(s, "accesses {}", t.accesses);
        let _ = writeln!(
            s,
            "potential violations {} ({})",
            t.potential_violations,
            format_percent(t.potential_violations, t.accesses)
        );
        for (info, lc) in r.layers.iter().zip(&t.silenced_per_layer) {
            let _ = writeln!(s, "layer {} {} silenced {}", info.layer, info.name, lc.count);
            for w in r.waterfall.iter().filter(|w| w.layer == info.layer) {
                let _ = writeln!(s, "  {} {}", w.rule, w.count);
            }
        }
        let _ = writeln!(s, "remaining {}", t.remaining);
        for (status, n) in &t.remaining_by_status {
            let _ = writeln!(s, "  {status} {n}");
        }
        s
    };
    RunOutput { code: exit_for(analysis, opts), stdout, stderr: String::new() }
}

fn explain_output(analysis: &Analysis, opts: &RunOptions) -> RunOutput {
    let site = opts.site.as_deref().unwrap_or_default();
    let Some(x) = analysis.explain(site) else {
        return RunOutput::error("E-SITE", format!("no access site `{site}`"));
    };
    let stdout = if opts.format == OutputFormat::Json {
        let mut s = serde_json::to_string_pretty(&serde_json::to_value(&x).expect("explain serializes")).expect("value");
        s.push('\n');
        s
    } else {
        explain_text(&x)
    };
    RunOutput { code: EXIT_OK, stdout, stderr: String::new() }
}

pub fn explain_text(x: &Explanation) -> String {
    let mut s = String::new();
    let site = &x.site;
    let _ = writeln!(s, "site {} at {}", site.site_id, site.source_span);
    let _ = writeln!(
        s,
        "access {} on {} receiver of type {}",
        site.member.display_name(),
        serde_json::to_value(site.receiver.form).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default(),
        site.receiver.static_type
    );
    let _ = writeln!(s, "base seeds:");
    for (ty, roles) in &x.base_seeds {
        let roles: Vec<String> = roles
            .iter()
            .map(|r| serde_json::to_value(r).ok().and_then(|v| v.get("role").and_then(|r| r.as_str()).map(str::to_string)).unwrap_or_default())
            .collect();
        let _ = writeln!(s, "  {ty} ({})", roles.join(", "));
    }
    let closure: Vec<String> = x.base_closure.iter().map(|t| t.to_string()).collect();
    let _ = writeln!(s, "base closure: {}", closure.join(", "));
    if !x.eligible {
        let _ = writeln!(s, "not eligible: accesses on the current object or on values never violate");
        return s;
    }
    let _ = writeln!(s, "base: {}", if x.base_violates { "violation" } else { "no violation" });
    for step in &x.steps {
        let added: Vec<String> = step.added.iter().map(|t| t.to_string()).collect();
        let mut grants = Vec::new();
        if !added.is_empty() {
            grants.push(format!("adds {}", added.join(", ")));
        }
        if !step.exemptions.is_empty() {
            grants.push(format!("exempts members by {}", step.exemptions.join(", ")));
        }
        if grants.is_empty() {
            grants.push("no new grants".to_string());
        }
        let _ = writeln!(
            s,
            "layer {} {}: {}; {}",
            step.layer,
            step.name,
            grants.join("; "),
            if step.violates { "still a violation" } else { "silenced" }
        );
    }
    let verdict = match &x.outcome {
        None => "not a potential violation".to_string(),
        Some(Outcome::Silenced { layer, rule, also_matched }) => {
            let mut v = format!("silenced at layer {layer} by {rule}");
            if !also_matched.is_empty() {
                let _ = write!(v, " (also {})", also_matched.join(", "));
            }
            v
        }
        Some(Outcome::Remaining { status, status_rule, hint }) => {
            let mut v = format!("remaining: {}", status.as_str());
            if let Some(r) = status_rule {
                let _ = write!(v, " by {r}");
            }
            if let Some(h) = hint {
                let _ = write!(v, " (hint: {h})");
            }
            v
        }
    };
    let _ = writeln!(s, "{verdict}");
    s
}
