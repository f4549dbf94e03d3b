//! Brute-force reimplementation of detection and attribution. Nothing is
//! cached or precomputed: every friend set is rebuilt from the rules each
//! time it is needed, and closures are computed by repeated expansion.

use std::collections::{BTreeMap, BTreeSet};

use demeterlint_core::adapt::{GrantStatus, LayeredConfig, Outcome, RemainingStatus, RuleKind};
use demeterlint_core::codemodel::{MemberKind, TypeRef, TypeTable, Visibility};
use demeterlint_core::demeter::MemberPredicate;
use demeterlint_core::javafront::{AccessKind, AccessSite, ExecKind, Executable, ReceiverForm, Step};

const ROOT: &str = "java.lang.Object";

/// Backtracking glob: `*` is any run, `?` one character.
pub fn glob(p: &[u8], t: &[u8]) -> bool {
    match p.split_first() {
        None => t.is_empty(),
        Some((b'*', rest)) => (0..=t.len()).any(|i| glob(rest, &t[i..])),
        Some((c, rest)) => !t.is_empty() && (*c == b'?' || *c == t[0]) && glob(rest, &t[1..]),
    }
}

fn g(p: &str, t: &str) -> bool {
    glob(p.as_bytes(), t.as_bytes())
}

fn name_matches(pattern: &str, q: &str) -> bool {
    if pattern.contains('.') {
        g(pattern, q)
    } else {
        g(pattern, q.rsplit('.').next().unwrap_or(q))
    }
}

fn ty_matches(pattern: &str, t: &TypeRef) -> bool {
    match t {
        TypeRef::Declared(n) => name_matches(pattern, n),
        _ => false,
    }
}

fn package(q: &str) -> &str {
    q.rfind('.').map(|i| &q[..i]).unwrap_or("")
}

fn value(t: &TypeRef) -> bool {
    matches!(t, TypeRef::Primitive(_) | TypeRef::Null)
}

pub struct Oracle<'a> {
    table: &'a TypeTable,
    config: &'a LayeredConfig,
    execs: &'a [Executable],
}

#[derive(Clone, Default)]
struct Friends {
    closure: BTreeSet<TypeRef>,
    exemptions: Vec<MemberPredicate>,
}

impl<'a> Oracle<'a> {
    pub fn new(table: &'a TypeTable, config: &'a LayeredConfig, execs: &'a [Executable]) -> Oracle<'a> {
        Oracle { table, config, execs }
    }

    fn supers(&self, t: &TypeRef) -> Vec<TypeRef> {
        match t {
            TypeRef::Declared(n) => match self.table.entries.get(n) {
                Some(d) => {
                    let mut out = d.supertypes.clone();
                    if n != ROOT {
                        out.push(TypeRef::declared(ROOT));
                    }
                    out
                }
                None => Vec::new(),
            },
            TypeRef::Array(inner) => vec![(**inner).clone(), TypeRef::declared(ROOT)],
            _ => Vec::new(),
        }
    }

    fn close(&self, seeds: &BTreeSet<TypeRef>) -> BTreeSet<TypeRef> {
        let mut set: BTreeSet<TypeRef> = seeds.iter().filter(|t| !value(t)).cloned().collect();
        loop {
            let before = set.len();
            let items: Vec<TypeRef> = set.iter().cloned().collect();
            for t in items {
                for s in self.supers(&t) {
                    if !value(&s) {
                        set.insert(s);
                    }
                }
            }
            if set.len() == before {
                return set;
            }
        }
    }

    fn resolve(&self, name: &str) -> Vec<TypeRef> {
        if self.table.entries.contains_key(name) {
            return vec![TypeRef::declared(name)];
        }
        self.table.entries.keys().filter(|q| name_matches(name, q)).map(|q| TypeRef::declared(q.as_str())).collect()
    }

    fn base_seeds(&self, e: &Executable) -> BTreeSet<TypeRef> {
        let mut s = BTreeSet::new();
        s.insert(e.owner_type.clone());
        if let Some(d) = self.table.get_ref(&e.owner_type) {
            for m in &d.members {
                if m.kind == MemberKind::Field {
                    s.insert(m.declared_type.clone());
                }
            }
        }
        for p in &e.params {
            s.insert(p.ty.clone());
        }
        s.extend(e.instantiated_types.iter().cloned());
        s.retain(|t| !value(t));
        s
    }

    /// Seed types that rule `ri` grants to `e`, ignoring its status.
    fn contribution(&self, ri: usize, e: &Executable) -> Vec<TypeRef> {
        let rule = self.config.rules().nth(ri).expect("rule");
        let mut out: Vec<TypeRef> = Vec::new();
        match &rule.kind {
            RuleKind::UniversalFriendTypes { types, package_globs, implementors_of } => {
                for t in types {
                    out.extend(self.resolve(t));
                }
                let ifaces: Vec<TypeRef> = implementors_of.iter().flat_map(|n| self.resolve(n)).collect();
                for q in self.table.entries.keys() {
                    if package_globs.iter().any(|p| g(p, package(q)) || g(p, q)) {
                        out.push(TypeRef::declared(q.as_str()));
                    }
                    let t = TypeRef::declared(q.as_str());
                    let c = self.close(&[t.clone()].into());
                    if ifaces.iter().any(|i| c.contains(i)) {
                        out.push(t);
                    }
                }
            }
            RuleKind::CtorParamsAsFields { enabled: true } => {
                if let Some(d) = self.table.get_ref(&e.owner_type) {
                    for m in d.members.iter().filter(|m| m.kind == MemberKind::Constructor) {
                        out.extend(m.param_types.iter().cloned());
                    }
                }
            }
            RuleKind::AggregationElements { field_map, infer_via } => {
                for fe in field_map {
                    if ty_matches(&fe.class, &e.owner_type) {
                        out.extend(self.resolve(&fe.element));
                    }
                }
                let fields: Vec<String> = self
                    .table
                    .get_ref(&e.owner_type)
                    .map(|d| d.members.iter().filter(|m| m.kind == MemberKind::Field).map(|m| m.name.clone()).collect())
                    .unwrap_or_default();
                for other in self.execs.iter().filter(|o| o.owner_type == e.owner_type) {
                    for s in &other.body_accesses {
                        if s.member.kind != MemberKind::Method || !infer_via.iter().any(|v| g(v, &s.member.name)) {
                            continue;
                        }
                        let chain = &s.receiver.provenance_chain;
                        if chain.len() == 1 {
                            if let Step::Field { name } = &chain[0].step {
                                if fields.contains(name) {
                                    out.extend(s.arg_types.iter().cloned());
                                }
                            }
                        }
                    }
                }
            }
            RuleKind::CallGrant { matchers, grants } => {
                for s in e.body_accesses.iter().filter(|s| s.member.kind == MemberKind::Method) {
                    let rc = self.close(&[s.receiver.static_type.clone()].into());
                    let hit = matchers.iter().any(|m| {
                        g(&m.method_glob, &s.member.name)
                            && (ty_matches(&m.type_pattern, &s.member.declaring_type) || rc.iter().any(|t| ty_matches(&m.type_pattern, t)))
                    });
                    if hit {
                        match grants {
                            Some(names) => names.iter().for_each(|n| out.extend(self.resolve(n))),
                            None => out.push(s.member.declared_type.clone()),
                        }
                    }
                }
            }
            RuleKind::DowncastParam { enabled: true } => {
                if e.exec_kind == ExecKind::Method {
                    out.extend(e.downcast_param_types.iter().cloned());
                }
            }
            RuleKind::ExecutableGrant { executables, grants, .. } => {
                if executables.iter().any(|x| g(x, &e.id)) {
                    grants.iter().for_each(|n| out.extend(self.resolve(n)));
                }
            }
            _ => {}
        }
        out.retain(|t| !value(t) && !t.is_unknown());
        out
    }

    fn is_pending(&self, ri: usize) -> bool {
        matches!(
            self.config.rules().nth(ri).map(|r| &r.kind),
            Some(RuleKind::ExecutableGrant { status: GrantStatus::Adjourned | GrantStatus::ReviewPending, .. })
        )
    }

    fn rule_count(&self) -> usize {
        self.config.rules().count()
    }

    /// Rule indices in layer positions `0..=k`.
    fn through(&self, k: Option<usize>) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut i = 0;
        for (pos, layer) in self.config.layers.iter().enumerate() {
            for _ in &layer.rules {
                if k.is_some_and(|k| pos <= k) {
                    out.insert(i);
                }
                i += 1;
            }
        }
        out
    }

    fn layer_rules(&self, k: usize) -> Vec<usize> {
        let start: usize = self.config.layers[..k].iter().map(|l| l.rules.len()).sum();
        (start..start + self.config.layers[k].rules.len()).collect()
    }

    fn friends(&self, e: &Executable, active: &BTreeSet<usize>, promote: Option<usize>, depth: usize) -> Friends {
        let rules: Vec<_> = self.config.rules().collect();
        let mut seeds = self.base_seeds(e);
        for ri in 0..self.rule_count() {
            let on = (active.contains(&ri) && !self.is_pending(ri)) || promote == Some(ri);
            if on {
                seeds.extend(self.contribution(ri, e));
            }
        }
        let anon = (0..rules.len()).any(|ri| active.contains(&ri) && matches!(rules[ri].kind, RuleKind::AnonInnerShare { enabled: true }));
        if anon && depth < 64 {
            if let Some(parent) = e.enclosing_executable.as_ref().and_then(|p| self.execs.iter().find(|x| &x.id == p)) {
                seeds.extend(self.friends(parent, active, promote, depth + 1).closure);
            }
        }
        let mut closure = self.close(&seeds);
        loop {
            let mut grew = false;
            for ri in active.iter() {
                if let RuleKind::FriendImplication { pairs } = &rules[*ri].kind {
                    for (a, b) in pairs {
                        let from = self.resolve(a);
                        let to = self.resolve(b);
                        if to.is_empty() || !from.iter().any(|f| closure.contains(f)) {
                            continue;
                        }
                        for t in to {
                            grew |= seeds.insert(t);
                        }
                    }
                }
            }
            if !grew {
                break;
            }
            closure = self.close(&seeds);
        }
        let exemptions = active
            .iter()
            .filter_map(|ri| match &rules[*ri].kind {
                RuleKind::UniversalFriendMembers { predicate } => Some(predicate.clone()),
                _ => None,
            })
            .collect();
        Friends { closure, exemptions }
    }

    fn exempt(p: &MemberPredicate, s: &AccessSite) -> bool {
        match p {
            MemberPredicate::PublicStatic => s.member.is_static && s.member.visibility == Visibility::Public,
            MemberPredicate::ArrayLength => s.access_kind == AccessKind::ArrayLength,
            MemberPredicate::Pattern { type_pattern, name_glob } => {
                (ty_matches(type_pattern, &s.member.declaring_type) || ty_matches(type_pattern, &s.receiver.static_type))
                    && g(name_glob, &s.member.name)
            }
        }
    }

    fn bad(s: &AccessSite, f: &Friends) -> bool {
        let selfish = matches!(s.receiver.form, ReceiverForm::ThisImplicit | ReceiverForm::ThisExplicit | ReceiverForm::Super);
        let t = &s.receiver.static_type;
        if selfish || value(t) {
            return false;
        }
        if t.is_unknown() {
            return true;
        }
        !f.closure.contains(t) && !f.exemptions.iter().any(|p| Self::exempt(p, s))
    }

    fn hint(&self, e: &Executable, s: &AccessSite) -> Option<demeterlint_core::adapt::Hint> {
        for h in &self.config.hints {
            let exec_ok = h.executables.iter().any(|x| g(x, &e.id));
            let type_ok = match &h.member_type {
                None => true,
                Some(p) => ty_matches(p, &s.member.declaring_type) || ty_matches(p, &s.receiver.static_type),
            };
            let name_ok = h.member_name.as_ref().is_none_or(|p| g(p, &s.member.name));
            if exec_ok && type_ok && name_ok {
                return Some(h.hint);
            }
        }
        None
    }

    fn outcome(&self, e: &Executable, s: &AccessSite) -> Outcome {
        let rules: Vec<_> = self.config.rules().collect();
        let layers = self.config.layers.len();
        for k in 0..layers {
            let full = self.through(Some(k));
            if Self::bad(s, &self.friends(e, &full, None, 0)) {
                continue;
            }
            let mine = self.layer_rules(k);
            let index = self.config.layers[k].index;
            let necessary: Vec<usize> = mine
                .iter()
                .copied()
                .filter(|r| {
                    let mut a = full.clone();
                    a.remove(r);
                    Self::bad(s, &self.friends(e, &a, None, 0))
                })
                .collect();
            let below = self.through(k.checked_sub(1));
            let sufficient: Vec<usize> = mine
                .iter()
                .copied()
                .filter(|r| {
                    let mut a = below.clone();
                    a.insert(*r);
                    !Self::bad(s, &self.friends(e, &a, None, 0))
                })
                .collect();
            let pick = if !necessary.is_empty() { necessary } else { sufficient };
            if let Some((first, rest)) = pick.split_first() {
                return Outcome::Silenced {
                    layer: index,
                    rule: rules[*first].id.clone(),
                    also_matched: rest.iter().map(|r| rules[*r].id.clone()).collect(),
                };
            }
            let mut a = below;
            for r in mine {
                a.insert(r);
                if !Self::bad(s, &self.friends(e, &a, None, 0)) {
                    return Outcome::Silenced { layer: index, rule: rules[r].id.clone(), also_matched: Vec::new() };
                }
            }
            panic!("layer {k} silences {} as a whole but no prefix does", s.site_id);
        }
        let all = self.through(layers.checked_sub(1));
        for ri in 0..rules.len() {
            let RuleKind::ExecutableGrant { executables, status, .. } = &rules[ri].kind else { continue };
            if *status == GrantStatus::Accepted || !executables.iter().any(|x| g(x, &e.id)) {
                continue;
            }
            if !Self::bad(s, &self.friends(e, &all, Some(ri), 0)) {
                let st = if *status == GrantStatus::ReviewPending { RemainingStatus::ReviewPending } else { RemainingStatus::Adjourned };
                return Outcome::Remaining { status: st, status_rule: Some(rules[ri].id.clone()), hint: rules[ri].hint.or_else(|| self.hint(e, s)) };
            }
        }
        Outcome::Remaining { status: RemainingStatus::CandidateTruePositive, status_rule: None, hint: self.hint(e, s) }
    }

    /// Base violations and their outcomes, keyed by site id.
    pub fn run(&self) -> BTreeMap<String, Outcome> {
        let mut out = BTreeMap::new();
        for e in self.execs {
            let base = Friends { closure: self.close(&self.base_seeds(e)), exemptions: Vec::new() };
            for s in &e.body_accesses {
                if Self::bad(s, &base) {
                    out.insert(s.site_id.clone(), self.outcome(e, s));
                }
            }
        }
        out
    }
}
