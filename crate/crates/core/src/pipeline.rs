//! End-to-end analysis: stubs, sources and configuration in, report out.

use thiserror::Error;

use crate::adapt::{load_config, unknown_type_warnings, Adapter, ConfigDocument, ConfigError, Explanation, LayeredConfig, Verdict};
use crate::codemodel::{load_stubs, ModelError, ResolutionMode, TypeTable};
use crate::javafront::{bind_and_extract, declare_types, parse_units, BindError, Executable, ParseError, SourceFile};
use crate::report::{build_report, input_digest, AnalysisReport, ReportError};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Bind(#[from] BindError),
    #[error("{file}: {error}")]
    Stub { file: String, error: ModelError },
    #[error("type table: {0}")]
    Table(ModelError),
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Report(#[from] ReportError),
}

impl AnalysisError {
    /// Stable code printed in front of diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            AnalysisError::Parse(_) => "E-PARSE",
            AnalysisError::Bind(_) | AnalysisError::Table(_) => "E-BIND",
            AnalysisError::Stub { .. } => "E-STUB",
            AnalysisError::Config(_) => "E-CONFIG",
            AnalysisError::Report(_) => "E-INTERNAL",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct AnalysisInput {
    pub sources: Vec<SourceFile>,
    pub stubs: Vec<SourceFile>,
    pub configs: Vec<ConfigDocument>,
    pub mode: ResolutionMode,
}

#[derive(Debug)]
pub struct Analysis {
    pub table: TypeTable,
    pub executables: Vec<Executable>,
    pub config: LayeredConfig,
    pub verdicts: Vec<Verdict>,
    pub report: AnalysisReport,
    pub warnings: Vec<String>,
}

impl Analysis {
    pub fn explain(&self, site_id: &str) -> Option<Explanation> {
        Adapter::new(&self.table, &self.config, &self.executables).explain(site_id)
    }
}

/// Loads every stub file and merges them into one table.
pub fn load_stub_files(stubs: &[SourceFile]) -> Result<TypeTable, AnalysisError> {
    let mut table = TypeTable::new();
    for f in stubs {
        let part = load_stubs(&f.text).map_err(|error| AnalysisError::Stub { file: f.name.clone(), error })?;
        table = table.merge(&part).map_err(|error| AnalysisError::Stub { file: f.name.clone(), error })?;
    }
    Ok(table)
}

/// Parses sources, declares their types and merges them with `stubs`.
pub fn build_table(sources: &[SourceFile], stubs: &TypeTable, mode: ResolutionMode) -> Result<(TypeTable, Vec<crate::javafront::CompilationUnit>), AnalysisError> {
    let units = parse_units(sources)?;
    let declared = declare_types(&units, stubs, mode)?;
    let table = stubs.merge(&declared).map_err(AnalysisError::Table)?.with_builtins();
    table.validate(mode).map_err(AnalysisError::Table)?;
    Ok((table, units))
}

pub fn analyze(input: &AnalysisInput) -> Result<Analysis, AnalysisError> {
    let stubs = load_stub_files(&input.stubs)?;
    let config = load_config(&input.configs)?;
    let (table, units) = build_table(&input.sources, &stubs, input.mode)?;
    let executables = bind_and_extract(&units, &table, input.mode)?;
    let warnings = unknown_type_warnings(&config, &table);
    let verdicts = Adapter::new(&table, &config, &executables).classify_all();
    let digest = input_digest(
        input
            .sources
            .iter()
            .map(|f| ("source", f.name.as_str(), f.text.as_str()))
            .chain(input.stubs.iter().map(|f| ("stub", f.name.as_str(), f.text.as_str())))
            .chain(input.configs.iter().map(|d| ("config", d.name.as_str(), d.text.as_str()))),
    );
    let report = build_report(&executables, &verdicts, &config, &digest)?;
    Ok(Analysis { table, executables, config, verdicts, report, warnings })
}
