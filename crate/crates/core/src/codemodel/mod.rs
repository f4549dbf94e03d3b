//! Type universe: analyzed and stubbed declarations, supertype closure and
//! member lookup.

mod stubs;
mod table;
mod types;

pub use stubs::{load_stubs, write_stubs, STUB_SCHEMA};
pub use table::{ModelError, ResolutionMode, TypeTable, OBJECT};
pub use types::{
    package_of, simple_name, Arity, DeclKind, MemberDecl, MemberKind, Origin, Primitive, TypeDecl, TypeRef, Visibility,
    UNKNOWN_TYPE_TEXT,
};
