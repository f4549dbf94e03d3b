use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use super::types::{Arity, DeclKind, MemberDecl, MemberKind, Origin, TypeDecl, TypeRef, Visibility};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ResolutionMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("duplicate type `{0}`")]
    DuplicateType(String),
    #[error("duplicate member `{name}` (arity {arity}) in `{owner}`")]
    DuplicateMember { owner: String, name: String, arity: String },
    #[error("cyclic supertypes: {}", .0.join(" -> "))]
    CyclicSupertypes(Vec<String>),
    #[error("supertype `{supertype}` of `{owner}` is not declared")]
    UnresolvedSupertype { owner: String, supertype: String },
    #[error("type `{0}` is declared differently in analyzed source and stubs")]
    MergeConflict(String),
    #[error("no member `{name}` with arity {arity} in `{receiver}` or its supertypes")]
    UnresolvedMember { receiver: String, name: String, arity: String },
    #[error("type `{0}` is not declared")]
    UnknownType(String),
}

pub const OBJECT: &str = "java.lang.Object";

/// The universe of declared types, keyed by qualified name.
///
/// Every declared type implicitly has `java.lang.Object` as its root
/// supertype; arrays close to their element closure plus the same root.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeTable {
    pub entries: BTreeMap<String, TypeDecl>,
}

impl TypeTable {
    pub fn new() -> TypeTable {
        TypeTable::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&TypeDecl> {
        self.entries.get(name)
    }

    pub fn get_ref(&self, tref: &TypeRef) -> Option<&TypeDecl> {
        tref.declared_name().and_then(|n| self.entries.get(n))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn insert(&mut self, decl: TypeDecl) -> Result<(), ModelError> {
        let name = decl.name().to_string();
        if self.entries.contains_key(&name) {
            return Err(ModelError::DuplicateType(name));
        }
        self.entries.insert(name, decl);
        Ok(())
    }

    /// A minimal `java.lang.Object` used when neither source nor stubs declare it.
    pub fn builtin_object() -> TypeDecl {
        let object = TypeRef::object();
        let method = |name: &str, ret: TypeRef, params: Vec<TypeRef>| MemberDecl {
            name: name.to_string(),
            kind: MemberKind::Method,
            is_static: false,
            visibility: Visibility::Public,
            declared_type: ret,
            param_types: params,
            declaring_type: object.clone(),
        };
        TypeDecl {
            tref: object.clone(),
            decl_kind: DeclKind::Class,
            supertypes: Vec::new(),
            members: vec![
                method("equals", TypeRef::parse("boolean"), vec![object.clone()]),
                method("getClass", TypeRef::declared("java.lang.Class"), Vec::new()),
                method("hashCode", TypeRef::parse("int"), Vec::new()),
                method("toString", TypeRef::string(), Vec::new()),
            ],
            origin: Origin::Stub,
        }
    }

    pub fn with_builtins(mut self) -> TypeTable {
        if !self.entries.contains_key(OBJECT) {
            self.entries.insert(OBJECT.to_string(), TypeTable::builtin_object());
        }
        self
    }

    /// Merges two tables. A name present in both is accepted only when both
    /// declarations are structurally identical; the analyzed-source copy wins.
    pub fn merge(&self, other: &TypeTable) -> Result<TypeTable, ModelError> {
        let mut out = self.clone();
        for (name, decl) in &other.entries {
            match out.entries.get(name) {
                None => {
                    out.entries.insert(name.clone(), decl.clone());
                }
                Some(existing) if existing.same_structure(decl) => {
                    if decl.origin == Origin::AnalyzedSource {
                        out.entries.insert(name.clone(), decl.clone());
                    }
                }
                Some(existing) => {
                    return Err(if existing.origin == decl.origin {
                        ModelError::DuplicateType(name.clone())
                    } else {
                        ModelError::MergeConflict(name.clone())
                    });
                }
            }
        }
        Ok(out)
    }

    /// Checks member keys and supertype acyclicity; in strict mode also that
    /// every supertype of an analyzed-source type is declared.
    pub fn validate(&self, mode: ResolutionMode) -> Result<(), ModelError> {
        for decl in self.entries.values() {
            let mut keys = HashSet::new();
            for m in &decl.members {
                if m.kind == MemberKind::Constructor {
                    continue;
                }
                if !keys.insert((m.name.as_str(), m.arity())) {
                    return Err(ModelError::DuplicateMember {
                        owner: decl.name().to_string(),
                        name: m.name.clone(),
                        arity: m.arity().to_string(),
                    });
                }
            }
            if mode == ResolutionMode::Strict && decl.origin == Origin::AnalyzedSource {
                for sup in &decl.supertypes {
                    if let TypeRef::Declared(name) = sup {
                        if !self.entries.contains_key(name) {
                            return Err(ModelError::UnresolvedSupertype {
                                owner: decl.name().to_string(),
                                supertype: name.clone(),
                            });
                        }
                    }
                }
            }
        }
        self.check_acyclic()
    }

    fn check_acyclic(&self) -> Result<(), ModelError> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        let mut marks: BTreeMap<&str, Mark> = BTreeMap::new();
        for start in self.entries.keys() {
            if marks.contains_key(start.as_str()) {
                continue;
            }
            // Iterative DFS keeping the active path for the error message.
            let mut path: Vec<(&str, usize)> = vec![(start.as_str(), 0)];
            marks.insert(start.as_str(), Mark::Active);
            while let Some((name, next)) = path.last().copied() {
                let sups = self.entries.get(name).map(|d| d.supertypes.as_slice()).unwrap_or(&[]);
                if next >= sups.len() {
                    marks.insert(name, Mark::Done);
                    path.pop();
                    continue;
                }
                path.last_mut().unwrap().1 += 1;
                let Some(sup) = sups[next].declared_name() else { continue };
                let Some((sup_key, _)) = self.entries.get_key_value(sup) else { continue };
                match marks.get(sup_key.as_str()) {
                    Some(Mark::Done) => {}
                    Some(Mark::Active) => {
                        let begin = path.iter().position(|(n, _)| *n == sup).unwrap_or(0);
                        let mut cycle: Vec<String> = path[begin..].iter().map(|(n, _)| n.to_string()).collect();
                        cycle.push(sup.to_string());
                        return Err(ModelError::CyclicSupertypes(cycle));
                    }
                    None => {
                        marks.insert(sup_key.as_str(), Mark::Active);
                        path.push((sup_key.as_str(), 0));
                    }
                }
            }
        }
        Ok(())
    }

    /// Direct supertypes, including the implicit root for declared types.
    pub fn direct_supertypes(&self, tref: &TypeRef) -> Vec<TypeRef> {
        match tref {
            TypeRef::Declared(name) => {
                let mut out: Vec<TypeRef> = self.entries.get(name).map(|d| d.supertypes.clone()).unwrap_or_default();
                if name != OBJECT && self.entries.contains_key(name) && !out.iter().any(|t| t.declared_name() == Some(OBJECT)) {
                    out.push(TypeRef::object());
                }
                out
            }
            TypeRef::Array(inner) => vec![(**inner).clone(), TypeRef::object()],
            _ => Vec::new(),
        }
    }

    /// Smallest superset of `seeds` closed under the supertype relation.
    pub fn supertype_closure<'a>(&self, seeds: impl IntoIterator<Item = &'a TypeRef>) -> BTreeSet<TypeRef> {
        let mut out = BTreeSet::new();
        let mut work: Vec<TypeRef> = Vec::new();
        for seed in seeds {
            if !seed.is_value_type() && out.insert(seed.clone()) {
                work.push(seed.clone());
            }
        }
        while let Some(t) = work.pop() {
            for sup in self.direct_supertypes(&t) {
                if !sup.is_value_type() && out.insert(sup.clone()) {
                    work.push(sup);
                }
            }
        }
        out
    }

    /// True when `sub` equals `sup` or reaches it through supertype edges.
    pub fn is_subtype(&self, sub: &TypeRef, sup: &TypeRef) -> bool {
        sub == sup || self.supertype_closure([sub]).contains(sup)
    }

    /// Finds a member by name and arity: receiver first, then supertypes
    /// depth-first in declared order, then the implicit root. Private members
    /// of supertypes are skipped.
    pub fn resolve_member(&self, receiver: &TypeRef, name: &str, arity: Arity, mode: ResolutionMode) -> Result<MemberDecl, ModelError> {
        if let Some(found) = self.find_member(receiver, name, arity) {
            return Ok(found);
        }
        match mode {
            ResolutionMode::Lenient => Ok(MemberDecl::unresolved(receiver, name, arity)),
            ResolutionMode::Strict => {
                if let TypeRef::Declared(n) = receiver {
                    if !self.entries.contains_key(n) {
                        return Err(ModelError::UnknownType(n.clone()));
                    }
                }
                Err(ModelError::UnresolvedMember {
                    receiver: receiver.to_string(),
                    name: name.to_string(),
                    arity: arity.to_string(),
                })
            }
        }
    }

    pub fn find_member(&self, receiver: &TypeRef, name: &str, arity: Arity) -> Option<MemberDecl> {
        let start = match receiver {
            TypeRef::Declared(_) => receiver.clone(),
            // Arrays expose Object's members besides the synthetic length.
            TypeRef::Array(_) => {
                if arity == Arity::Field && name == "length" {
                    return Some(MemberDecl::array_length(receiver));
                }
                TypeRef::object()
            }
            _ => return None,
        };
        let mut visited = HashSet::new();
        self.find_in(&start, &start, name, arity, &mut visited).or_else(|| {
            let root = TypeRef::object();
            if visited.contains(&root) {
                None
            } else {
                self.find_in(&root, &start, name, arity, &mut visited)
            }
        })
    }

    fn find_in(&self, current: &TypeRef, receiver: &TypeRef, name: &str, arity: Arity, visited: &mut HashSet<TypeRef>) -> Option<MemberDecl> {
        if !visited.insert(current.clone()) {
            return None;
        }
        let decl = self.get_ref(current)?;
        let hit = decl.members.iter().find(|m| {
            m.kind != MemberKind::Constructor
                && m.name == name
                && m.arity() == arity
                && (m.visibility != Visibility::Private || current == receiver)
        });
        if let Some(m) = hit {
            return Some(m.clone());
        }
        for sup in &decl.supertypes {
            if let Some(m) = self.find_in(sup, receiver, name, arity, visited) {
                return Some(m);
            }
        }
        None
    }

    /// Constructors declared directly in `tref`.
    pub fn constructors(&self, tref: &TypeRef) -> Vec<&MemberDecl> {
        self.get_ref(tref)
            .map(|d| d.members.iter().filter(|m| m.kind == MemberKind::Constructor).collect())
            .unwrap_or_default()
    }
}
