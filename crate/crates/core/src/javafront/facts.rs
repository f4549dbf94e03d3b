use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::codemodel::{MemberDecl, TypeRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExecKind {
    Method,
    Constructor,
    InstanceInitializer,
    StaticInitializer,
    FieldInitializer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParamOrigin {
    Declared,
    Catch,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamInfo {
    pub name: String,
    pub ty: TypeRef,
    pub origin: ParamOrigin,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourceSpan {
    pub file: String,
    pub line: u32,
    pub column: u32,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AccessKind {
    MethodCall,
    FieldRead,
    FieldWrite,
    StaticMemberAccess,
    ArrayLength,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReceiverForm {
    ThisImplicit,
    ThisExplicit,
    Super,
    OuterInstance,
    TypeName,
    Expression,
}

impl ReceiverForm {
    /// Receivers that denote the current object itself.
    pub fn is_self(self) -> bool {
        matches!(self, ReceiverForm::ThisImplicit | ReceiverForm::ThisExplicit | ReceiverForm::Super)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Step {
    Parameter { name: String },
    Field { name: String },
    Local { name: String },
    Call { name: String },
    Cast { to: TypeRef },
    New { of: TypeRef },
    StaticMember { name: String },
    Literal,
    /// Array element access.
    Index,
    /// Value computed by an operator (string concatenation, conditional).
    Operator,
}

/// One step of a receiver's provenance and the static type it produces.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProvStep {
    #[serde(flatten)]
    pub step: Step,
    #[serde(rename = "type")]
    pub ty: TypeRef,
}

impl ProvStep {
    /// Rendering used in text reports, e.g. `line: LineConnection` or `.start(): Connector`.
    pub fn render(&self, first: bool) -> String {
        let ty = self.ty.simple_name();
        match &self.step {
            Step::Parameter { name } | Step::Local { name } | Step::Field { name } if first => format!("{name}: {ty}"),
            Step::Parameter { name } | Step::Local { name } | Step::Field { name } => format!(".{name}: {ty}"),
            Step::Call { name } if first => format!("{name}(): {ty}"),
            Step::Call { name } => format!(".{name}(): {ty}"),
            Step::Cast { to } => format!("({}): {ty}", to.simple_name()),
            Step::New { of } => format!("new {}: {ty}", of.simple_name()),
            Step::StaticMember { name } => format!("{name}: {ty}"),
            Step::Literal => format!("literal: {ty}"),
            Step::Index => format!("[]: {ty}"),
            Step::Operator => format!("(expr): {ty}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReceiverDesc {
    pub form: ReceiverForm,
    pub static_type: TypeRef,
    pub provenance_chain: Vec<ProvStep>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessSite {
    pub site_id: String,
    pub access_kind: AccessKind,
    pub receiver: ReceiverDesc,
    pub member: MemberDecl,
    pub source_span: SourceSpan,
    /// Static types of call arguments (empty for field accesses).
    pub arg_types: Vec<TypeRef>,
}

impl AccessSite {
    pub fn is_call(&self) -> bool {
        self.member.kind == crate::codemodel::MemberKind::Method
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Executable {
    pub id: String,
    pub owner_type: TypeRef,
    pub exec_kind: ExecKind,
    pub params: Vec<ParamInfo>,
    pub instantiated_types: BTreeSet<TypeRef>,
    pub downcast_param_types: BTreeSet<TypeRef>,
    pub enclosing_executable: Option<String>,
    pub body_accesses: Vec<AccessSite>,
    pub span: SourceSpan,
}

impl Executable {
    pub fn declared_params(&self) -> impl Iterator<Item = &ParamInfo> {
        self.params.iter().filter(|p| p.origin == ParamOrigin::Declared)
    }
}
