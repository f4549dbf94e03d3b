use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Primitive {
    Boolean,
    Byte,
    Char,
    Short,
    Int,
    Long,
    Float,
    Double,
    Void,
}

impl Primitive {
    pub fn from_keyword(word: &str) -> Option<Primitive> {
        Some(match word {
            "boolean" => Primitive::Boolean,
            "byte" => Primitive::Byte,
            "char" => Primitive::Char,
            "short" => Primitive::Short,
            "int" => Primitive::Int,
            "long" => Primitive::Long,
            "float" => Primitive::Float,
            "double" => Primitive::Double,
            "void" => Primitive::Void,
            _ => return None,
        })
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Primitive::Boolean => "boolean",
            Primitive::Byte => "byte",
            Primitive::Char => "char",
            Primitive::Short => "short",
            Primitive::Int => "int",
            Primitive::Long => "long",
            Primitive::Float => "float",
            Primitive::Double => "double",
            Primitive::Void => "void",
        }
    }

    pub fn is_numeric(self) -> bool {
        !matches!(self, Primitive::Boolean | Primitive::Void)
    }

    /// Rank used for binary numeric promotion.
    fn rank(self) -> u8 {
        match self {
            Primitive::Double => 4,
            Primitive::Float => 3,
            Primitive::Long => 2,
            _ => 1,
        }
    }

    pub fn promote(a: Primitive, b: Primitive) -> Primitive {
        match a.rank().max(b.rank()) {
            4 => Primitive::Double,
            3 => Primitive::Float,
            2 => Primitive::Long,
            _ => Primitive::Int,
        }
    }
}

/// A reference to a type as seen by the analysis.
///
/// The textual form (used in stubs, configs and reports) is the qualified
/// name for declared types, the keyword for primitives, a trailing `[]` per
/// array dimension, `null` for the null literal and `<unknown>` for types that
/// lenient resolution could not bind.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeRef {
    Declared(String),
    Primitive(Primitive),
    Array(Box<TypeRef>),
    Null,
    Unknown,
}

pub const UNKNOWN_TYPE_TEXT: &str = "<unknown>";

impl TypeRef {
    pub fn declared(name: impl Into<String>) -> TypeRef {
        TypeRef::Declared(name.into())
    }

    pub fn array_of(element: TypeRef) -> TypeRef {
        TypeRef::Array(Box::new(element))
    }

    pub fn string() -> TypeRef {
        TypeRef::declared("java.lang.String")
    }

    pub fn object() -> TypeRef {
        TypeRef::declared("java.lang.Object")
    }

    /// Parses the textual form; never fails, since any dotted word is a
    /// plausible declared type name.
    pub fn parse(text: &str) -> TypeRef {
        let text = text.trim();
        if let Some(inner) = text.strip_suffix("[]") {
            return TypeRef::array_of(TypeRef::parse(inner));
        }
        if text == UNKNOWN_TYPE_TEXT {
            return TypeRef::Unknown;
        }
        if text == "null" {
            return TypeRef::Null;
        }
        match Primitive::from_keyword(text) {
            Some(p) => TypeRef::Primitive(p),
            None => TypeRef::Declared(text.to_string()),
        }
    }

    pub fn qualified_name(&self) -> String {
        self.to_string()
    }

    /// Name without the package prefix; nested `$` segments are kept.
    pub fn simple_name(&self) -> String {
        match self {
            TypeRef::Declared(name) => simple_name(name).to_string(),
            TypeRef::Array(inner) => format!("{}[]", inner.simple_name()),
            other => other.to_string(),
        }
    }

    pub fn declared_name(&self) -> Option<&str> {
        match self {
            TypeRef::Declared(name) => Some(name),
            _ => None,
        }
    }

    /// True for primitives and the null type: neither can be a friend or a
    /// violation receiver.
    pub fn is_value_type(&self) -> bool {
        matches!(self, TypeRef::Primitive(_) | TypeRef::Null)
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, TypeRef::Unknown)
    }

    pub fn element(&self) -> Option<&TypeRef> {
        match self {
            TypeRef::Array(inner) => Some(inner),
            _ => None,
        }
    }

    pub fn primitive(&self) -> Option<Primitive> {
        match self {
            TypeRef::Primitive(p) => Some(*p),
            _ => None,
        }
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeRef::Declared(name) => f.write_str(name),
            TypeRef::Primitive(p) => f.write_str(p.keyword()),
            TypeRef::Array(inner) => write!(f, "{inner}[]"),
            TypeRef::Null => f.write_str("null"),
            TypeRef::Unknown => f.write_str(UNKNOWN_TYPE_TEXT),
        }
    }
}

impl Serialize for TypeRef {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TypeRef {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Ok(TypeRef::parse(&text))
    }
}

pub fn simple_name(qualified: &str) -> &str {
    qualified.rsplit('.').next().unwrap_or(qualified)
}

pub fn package_of(qualified: &str) -> &str {
    match qualified.rfind('.') {
        Some(i) => &qualified[..i],
        None => "",
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MemberKind {
    Field,
    Method,
    Constructor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Visibility {
    Public,
    Protected,
    Package,
    Private,
}

impl Visibility {
    pub fn parse(text: &str) -> Option<Visibility> {
        Some(match text {
            "public" => Visibility::Public,
            "protected" => Visibility::Protected,
            "package" => Visibility::Package,
            "private" => Visibility::Private,
            _ => return None,
        })
    }
}

/// Lookup key component: fields are looked up by name alone, methods by
/// name and argument count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arity {
    Field,
    Method(usize),
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arity::Field => f.write_str("field"),
            Arity::Method(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MemberDecl {
    pub name: String,
    pub kind: MemberKind,
    pub is_static: bool,
    pub visibility: Visibility,
    pub declared_type: TypeRef,
    pub param_types: Vec<TypeRef>,
    pub declaring_type: TypeRef,
}

impl MemberDecl {
    pub fn arity(&self) -> Arity {
        match self.kind {
            MemberKind::Field => Arity::Field,
            _ => Arity::Method(self.param_types.len()),
        }
    }

    /// Synthetic member used when lenient resolution cannot find the target.
    pub fn unresolved(receiver: &TypeRef, name: &str, arity: Arity) -> MemberDecl {
        let (kind, param_types) = match arity {
            Arity::Field => (MemberKind::Field, Vec::new()),
            Arity::Method(n) => (MemberKind::Method, vec![TypeRef::Unknown; n]),
        };
        MemberDecl {
            name: name.to_string(),
            kind,
            is_static: false,
            visibility: Visibility::Package,
            declared_type: TypeRef::Unknown,
            param_types,
            declaring_type: receiver.clone(),
        }
    }

    /// The implicit `length` field of an array type.
    pub fn array_length(array: &TypeRef) -> MemberDecl {
        MemberDecl {
            name: "length".to_string(),
            kind: MemberKind::Field,
            is_static: false,
            visibility: Visibility::Public,
            declared_type: TypeRef::Primitive(Primitive::Int),
            param_types: Vec::new(),
            declaring_type: array.clone(),
        }
    }

    /// `Type.name` for fields, `Type.name(P1,P2)` for methods, with simple names.
    pub fn display_name(&self) -> String {
        let owner = self.declaring_type.simple_name();
        match self.kind {
            MemberKind::Field => format!("{owner}.{}", self.name),
            _ => {
                let params: Vec<String> = self.param_types.iter().map(TypeRef::simple_name).collect();
                format!("{owner}.{}({})", self.name, params.join(","))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeclKind {
    Class,
    Interface,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    AnalyzedSource,
    Stub,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeDecl {
    #[serde(rename = "ref")]
    pub tref: TypeRef,
    pub decl_kind: DeclKind,
    pub supertypes: Vec<TypeRef>,
    pub members: Vec<MemberDecl>,
    pub origin: Origin,
}

impl TypeDecl {
    pub fn name(&self) -> &str {
        self.tref.declared_name().unwrap_or("")
    }

    /// Equality ignoring where the declaration came from.
    pub fn same_structure(&self, other: &TypeDecl) -> bool {
        self.tref == other.tref
            && self.decl_kind == other.decl_kind
            && self.supertypes == other.supertypes
            && self.members == other.members
    }

    pub fn fields(&self) -> impl Iterator<Item = &MemberDecl> {
        self.members.iter().filter(|m| m.kind == MemberKind::Field)
    }
}
