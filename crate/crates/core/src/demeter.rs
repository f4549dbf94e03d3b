//! The strict class form of the Law: base friend sets and the violation
//! predicate over access sites.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::codemodel::{TypeRef, TypeTable, Visibility};
use crate::glob::{glob_match, type_name_matches};
use crate::javafront::{AccessKind, AccessSite, Executable};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "role", content = "rule")]
pub enum SeedRole {
    SelfType,
    FieldType,
    ParamType,
    Instantiated,
    Granted(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum MemberPredicate {
    PublicStatic,
    ArrayLength,
    /// Declaring or receiver type matching `type_pattern`, member name matching `name_glob`.
    Pattern { type_pattern: String, name_glob: String },
}

impl MemberPredicate {
    pub fn matches(&self, site: &AccessSite) -> bool {
        match self {
            MemberPredicate::PublicStatic => site.member.is_static && site.member.visibility == Visibility::Public,
            MemberPredicate::ArrayLength => site.access_kind == AccessKind::ArrayLength,
            MemberPredicate::Pattern { type_pattern, name_glob } => {
                let type_hit = [&site.member.declaring_type, &site.receiver.static_type]
                    .iter()
                    .any(|t| t.declared_name().is_some_and(|n| type_name_matches(type_pattern, n)));
                type_hit && glob_match(name_glob, &site.member.name)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MemberExemption {
    pub rule_id: String,
    pub predicate: MemberPredicate,
}

/// Types an executable may talk to, closed under supertypes, plus
/// member-level exemptions granted by adaptation rules.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FriendSet {
    pub seeds: BTreeMap<TypeRef, BTreeSet<SeedRole>>,
    pub closure: BTreeSet<TypeRef>,
    pub member_exemptions: Vec<MemberExemption>,
}

impl FriendSet {
    /// Adds a seed; returns true if the type was not a seed before.
    pub fn add_seed(&mut self, ty: TypeRef, role: SeedRole) -> bool {
        if ty.is_value_type() {
            return false;
        }
        let entry = self.seeds.entry(ty);
        let fresh = matches!(entry, std::collections::btree_map::Entry::Vacant(_));
        entry.or_default().insert(role);
        fresh
    }

    pub fn reclose(&mut self, table: &TypeTable) {
        self.closure = table.supertype_closure(self.seeds.keys());
    }

    pub fn contains(&self, ty: &TypeRef) -> bool {
        self.closure.contains(ty)
    }

    pub fn exemption_for(&self, site: &AccessSite) -> Option<&MemberExemption> {
        self.member_exemptions.iter().find(|e| e.predicate.matches(site))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PotentialViolation {
    pub site: AccessSite,
    pub executable: String,
    pub receiver_type: TypeRef,
    pub note: Option<String>,
}

pub const UNRESOLVED_RECEIVER: &str = "unresolved-receiver";

pub fn base_friend_set(exec: &Executable, table: &TypeTable) -> FriendSet {
    let mut fs = FriendSet::default();
    fs.add_seed(exec.owner_type.clone(), SeedRole::SelfType);
    if let Some(decl) = table.get_ref(&exec.owner_type) {
        for f in decl.fields() {
            fs.add_seed(f.declared_type.clone(), SeedRole::FieldType);
        }
    }
    for p in &exec.params {
        fs.add_seed(p.ty.clone(), SeedRole::ParamType);
    }
    for t in &exec.instantiated_types {
        fs.add_seed(t.clone(), SeedRole::Instantiated);
    }
    fs.reclose(table);
    fs
}

/// Whether a site can be a violation at all: accesses on the current object
/// and on primitive values never are.
pub fn is_eligible(site: &AccessSite) -> bool {
    !site.receiver.form.is_self() && !site.receiver.static_type.is_value_type()
}

/// The violation predicate for one site. Unknown receivers always violate.
pub fn violates(site: &AccessSite, friends: &FriendSet) -> bool {
    if !is_eligible(site) {
        return false;
    }
    let ty = &site.receiver.static_type;
    if ty.is_unknown() {
        return true;
    }
    !friends.contains(ty) && friends.exemption_for(site).is_none()
}

pub fn detect(exec: &Executable, friends: &FriendSet) -> Vec<PotentialViolation> {
    exec.body_accesses
        .iter()
        .filter(|s| violates(s, friends))
        .map(|s| PotentialViolation {
            site: s.clone(),
            executable: exec.id.clone(),
            receiver_type: s.receiver.static_type.clone(),
            note: s.receiver.static_type.is_unknown().then(|| UNRESOLVED_RECEIVER.to_string()),
        })
        .collect()
}
