//! Parsing, name binding and access-site extraction for the analyzed dialect.

mod ast;
mod bind;
mod facts;
mod lexer;
mod names;
mod parser;
mod visit;

use std::fmt;

use rayon::prelude::*;

pub use ast::*;
pub use bind::{declare_types, extract_unit, infer_expression_type, source_type_names};
pub use facts::*;
pub use lexer::{tokenize, Tok, Token};
pub use names::{qualify, KnownTypes, UnitScope};
pub use parser::{parse_expression, parse_unit};
pub use visit::for_each_nested_type;

use crate::codemodel::{ResolutionMode, TypeTable};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub file: String,
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.file, self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BindError {
    pub file: String,
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl fmt::Display for BindError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.file, self.line, self.column, self.message)
    }
}

impl std::error::Error for BindError {}

/// One input file: display name and UTF-8 contents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceFile {
    pub name: String,
    pub text: String,
}

/// Parses every file, in parallel. The first error in input order wins.
pub fn parse_units(files: &[SourceFile]) -> Result<Vec<CompilationUnit>, ParseError> {
    files.par_iter().map(|f| parse_unit(&f.text, &f.name)).collect::<Vec<_>>().into_iter().collect()
}

/// Extracts executables from all units against the merged table, sorted by
/// (file, line, column, id) so the result does not depend on scheduling.
pub fn bind_and_extract(units: &[CompilationUnit], table: &TypeTable, mode: ResolutionMode) -> Result<Vec<Executable>, BindError> {
    let known = KnownTypes::new(table.entries.keys());
    let per_unit: Vec<Result<Vec<Executable>, BindError>> =
        units.par_iter().map(|u| extract_unit(u, table, &known, mode)).collect();
    let mut all = Vec::new();
    for r in per_unit {
        all.extend(r?);
    }
    all.sort_by(|a, b| {
        (&a.span.file, a.span.line, a.span.column, &a.id).cmp(&(&b.span.file, b.span.line, b.span.column, &b.id))
    });
    let mut seen = std::collections::HashSet::new();
    for e in &all {
        if !seen.insert(e.id.as_str()) {
            return Err(BindError {
                file: e.span.file.clone(),
                line: e.span.line,
                column: e.span.column,
                message: format!("`{}` is declared twice", e.id),
            });
        }
    }
    Ok(all)
}
