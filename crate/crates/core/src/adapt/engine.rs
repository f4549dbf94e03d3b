use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{resolve_type_names, CallMatcher, GrantStatus, Hint, LayeredConfig, Rule, RuleKind};
use crate::codemodel::{package_of, TypeRef, TypeTable};
use crate::demeter::{base_friend_set, detect, is_eligible, violates, FriendSet, MemberExemption, PotentialViolation, SeedRole};
use crate::glob::{glob_match, type_name_matches};
use crate::javafront::{AccessSite, ExecKind, Executable, Step};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemainingStatus {
    CandidateTruePositive,
    Adjourned,
    ReviewPending,
}

impl RemainingStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RemainingStatus::CandidateTruePositive => "candidate-true-positive",
            RemainingStatus::Adjourned => "adjourned",
            RemainingStatus::ReviewPending => "review-pending",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "kebab-case")]
pub enum Outcome {
    Silenced {
        layer: u32,
        rule: String,
        also_matched: Vec<String>,
    },
    Remaining {
        status: RemainingStatus,
        status_rule: Option<String>,
        hint: Option<Hint>,
    },
}

impl Outcome {
    pub fn silenced_layer(&self) -> Option<u32> {
        match self {
            Outcome::Silenced { layer, .. } => Some(*layer),
            Outcome::Remaining { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub violation: PotentialViolation,
    pub outcome: Outcome,
}

/// Which rules contribute to an effective friend set. `promote` treats one
/// non-accepted executable grant as if it were accepted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Mask {
    active: Vec<bool>,
    promote: Option<usize>,
}

type Cache = HashMap<(usize, Mask), FriendSet>;

/// Precomputed rule contributions over a fixed program and configuration.
pub struct Adapter<'a> {
    table: &'a TypeTable,
    config: &'a LayeredConfig,
    execs: &'a [Executable],
    by_id: HashMap<&'a str, usize>,
    rules: Vec<&'a Rule>,
    rule_pos: Vec<usize>,
    bases: Vec<FriendSet>,
    /// Per executable: seed types granted by each rule.
    grants: Vec<Vec<(usize, Vec<TypeRef>)>>,
    /// Per executable: non-accepted executable grants that match it.
    pending: Vec<Vec<(usize, Vec<TypeRef>)>>,
    exemptions: Vec<(usize, MemberExemption)>,
    anon_rules: Vec<usize>,
    implications: Vec<(usize, Vec<(Vec<TypeRef>, Vec<TypeRef>)>)>,
}

fn non_value(types: impl IntoIterator<Item = TypeRef>) -> Vec<TypeRef> {
    let set: BTreeSet<TypeRef> = types.into_iter().filter(|t| !t.is_value_type() && !t.is_unknown()).collect();
    set.into_iter().collect()
}

fn resolve_all(names: &[String], table: &TypeTable) -> Vec<TypeRef> {
    names.iter().flat_map(|n| resolve_type_names(n, table)).collect()
}

fn type_matches(pattern: &str, ty: &TypeRef) -> bool {
    ty.declared_name().is_some_and(|n| type_name_matches(pattern, n))
}

impl<'a> Adapter<'a> {
    pub fn new(table: &'a TypeTable, config: &'a LayeredConfig, execs: &'a [Executable]) -> Adapter<'a> {
        let mut rules = Vec::new();
        let mut rule_pos = Vec::new();
        for (pos, layer) in config.layers.iter().enumerate() {
            for r in &layer.rules {
                rules.push(r);
                rule_pos.push(pos);
            }
        }
        let by_id = execs.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
        let bases: Vec<FriendSet> = execs.par_iter().map(|e| base_friend_set(e, table)).collect();

        let mut class_wide: Vec<HashMap<TypeRef, Vec<TypeRef>>> = vec![HashMap::new(); rules.len()];
        let mut universal: Vec<Vec<TypeRef>> = vec![Vec::new(); rules.len()];
        let mut exemptions = Vec::new();
        let mut anon_rules = Vec::new();
        let mut implications = Vec::new();
        let owners: BTreeSet<&TypeRef> = execs.iter().map(|e| &e.owner_type).collect();
        for (ri, rule) in rules.iter().enumerate() {
            match &rule.kind {
                RuleKind::UniversalFriendTypes { types, package_globs, implementors_of } => {
                    let mut out = resolve_all(types, table);
                    for (q, _) in table.entries.iter() {
                        if package_globs.iter().any(|g| glob_match(g, package_of(q)) || glob_match(g, q)) {
                            out.push(TypeRef::declared(q.as_str()));
                        }
                    }
                    let ifaces = resolve_all(implementors_of, table);
                    if !ifaces.is_empty() {
                        for q in table.entries.keys() {
                            let t = TypeRef::declared(q.as_str());
                            let closure = table.supertype_closure([&t]);
                            if ifaces.iter().any(|i| closure.contains(i)) {
                                out.push(t);
                            }
                        }
                    }
                    universal[ri] = non_value(out);
                }
                RuleKind::UniversalFriendMembers { predicate } => {
                    exemptions.push((ri, MemberExemption { rule_id: rule.id.clone(), predicate: predicate.clone() }));
                }
                RuleKind::AnonInnerShare { enabled: true } => anon_rules.push(ri),
                RuleKind::FriendImplication { pairs } => {
                    let resolved = pairs
                        .iter()
                        .map(|(a, b)| (resolve_type_names(a, table), resolve_type_names(b, table)))
                        .filter(|(a, b)| !a.is_empty() && !b.is_empty())
                        .collect();
                    implications.push((ri, resolved));
                }
                RuleKind::CtorParamsAsFields { enabled: true } => {
                    for owner in &owners {
                        let params = table.constructors(owner).into_iter().flat_map(|c| c.param_types.iter().cloned());
                        class_wide[ri].insert((*owner).clone(), non_value(params));
                    }
                }
                RuleKind::AggregationElements { field_map, infer_via } => {
                    let mut map: HashMap<TypeRef, Vec<TypeRef>> = HashMap::new();
                    for owner in &owners {
                        let explicit = field_map
                            .iter()
                            .filter(|fe| type_matches(&fe.class, owner))
                            .flat_map(|fe| resolve_type_names(&fe.element, table));
                        map.insert((*owner).clone(), explicit.collect());
                    }
                    for e in execs {
                        let own_fields: BTreeSet<&str> = table
                            .get_ref(&e.owner_type)
                            .map(|d| d.fields().map(|f| f.name.as_str()).collect())
                            .unwrap_or_default();
                        for site in &e.body_accesses {
                            let via_own_field = matches!(
                                site.receiver.provenance_chain.as_slice(),
                                [step] if matches!(&step.step, Step::Field { name } if own_fields.contains(name.as_str()))
                            );
                            if site.is_call() && via_own_field && infer_via.iter().any(|m| glob_match(m, &site.member.name)) {
                                map.entry(e.owner_type.clone()).or_default().extend(site.arg_types.iter().cloned());
                            }
                        }
                    }
                    class_wide[ri] = map.into_iter().map(|(k, v)| (k, non_value(v))).collect();
                }
                _ => {}
            }
        }

        let per_exec: Vec<_> = execs
            .par_iter()
            .map(|e| {
                let mut g = Vec::new();
                let mut p = Vec::new();
                for (ri, rule) in rules.iter().enumerate() {
                    let types: Vec<TypeRef> = match &rule.kind {
                        RuleKind::UniversalFriendTypes { .. } => universal[ri].clone(),
                        RuleKind::CtorParamsAsFields { enabled: true } | RuleKind::AggregationElements { .. } => {
                            class_wide[ri].get(&e.owner_type).cloned().unwrap_or_default()
                        }
                        RuleKind::CallGrant { matchers, grants } => non_value(call_grants(e, table, matchers, grants.as_deref())),
                        RuleKind::DowncastParam { enabled: true } if e.exec_kind == ExecKind::Method => {
                            non_value(e.downcast_param_types.iter().cloned())
                        }
                        RuleKind::ExecutableGrant { executables, grants, status } => {
                            if executables.iter().any(|x| glob_match(x, &e.id)) {
                                let types = non_value(resolve_all(grants, table));
                                if *status != GrantStatus::Accepted {
                                    p.push((ri, types));
                                    continue;
                                }
                                types
                            } else {
                                Vec::new()
                            }
                        }
                        _ => Vec::new(),
                    };
                    if !types.is_empty() {
                        g.push((ri, types));
                    }
                }
                (g, p)
            })
            .collect();
        let (grants, pending) = per_exec.into_iter().unzip();

        Adapter { table, config, execs, by_id, rules, rule_pos, bases, grants, pending, exemptions, anon_rules, implications }
    }

    fn mask_through(&self, pos: Option<usize>) -> Mask {
        Mask { active: self.rule_pos.iter().map(|p| pos.is_some_and(|k| *p <= k)).collect(), promote: None }
    }

    fn effective_masked(&self, e: usize, mask: &Mask, cache: &mut Cache, depth: usize) -> FriendSet {
        let key = (e, mask.clone());
        if let Some(fs) = cache.get(&key) {
            return fs.clone();
        }
        let mut fs = self.bases[e].clone();
        for (ri, types) in &self.grants[e] {
            if mask.active[*ri] {
                for t in types {
                    fs.add_seed(t.clone(), SeedRole::Granted(self.rules[*ri].id.clone()));
                }
            }
        }
        if let Some(pr) = mask.promote {
            for (ri, types) in &self.pending[e] {
                if *ri == pr {
                    for t in types {
                        fs.add_seed(t.clone(), SeedRole::Granted(self.rules[*ri].id.clone()));
                    }
                }
            }
        }
        if let Some(&ar) = self.anon_rules.iter().find(|r| mask.active[**r]) {
            let parent = self.execs[e].enclosing_executable.as_deref().and_then(|p| self.by_id.get(p));
            if let (Some(&pi), true) = (parent, depth < 64) {
                let pfs = self.effective_masked(pi, mask, cache, depth + 1);
                for t in pfs.closure {
                    fs.add_seed(t, SeedRole::Granted(self.rules[ar].id.clone()));
                }
            }
        }
        fs.reclose(self.table);
        loop {
            let mut changed = false;
            for (ri, pairs) in &self.implications {
                if !mask.active[*ri] {
                    continue;
                }
                for (from, to) in pairs {
                    if from.iter().any(|f| fs.closure.contains(f)) {
                        for t in to {
                            changed |= fs.add_seed(t.clone(), SeedRole::Granted(self.rules[*ri].id.clone()));
                        }
                    }
                }
            }
            if !changed {
                break;
            }
            fs.reclose(self.table);
        }
        fs.member_exemptions = self.exemptions.iter().filter(|(ri, _)| mask.active[*ri]).map(|(_, x)| x.clone()).collect();
        cache.insert(key, fs.clone());
        fs
    }

    /// Effective friend set of an executable with every layer up to and
    /// including `through` applied (`None` gives the base set).
    pub fn effective(&self, exec_id: &str, through: Option<u32>) -> Option<FriendSet> {
        let e = *self.by_id.get(exec_id)?;
        let pos = through.map(|k| self.config.layers.iter().filter(|l| l.index <= k).count()).and_then(|n| n.checked_sub(1));
        Some(self.effective_masked(e, &self.mask_through(pos), &mut Cache::new(), 0))
    }

    fn classify_exec(&self, e: usize) -> Vec<Verdict> {
        let exec = &self.execs[e];
        let base = detect(exec, &self.bases[e]);
        if base.is_empty() {
            return Vec::new();
        }
        let mut cache = Cache::new();
        let layers = self.config.layers.len();
        let prefix: Vec<FriendSet> =
            (0..layers).map(|k| self.effective_masked(e, &self.mask_through(Some(k)), &mut cache, 0)).collect();
        base.into_iter().map(|v| {
            let outcome = self.classify_site(e, &v.site, &prefix, &mut cache);
            Verdict { violation: v, outcome }
        })
        .collect()
    }

    fn classify_site(&self, e: usize, site: &AccessSite, prefix: &[FriendSet], cache: &mut Cache) -> Outcome {
        let Some(k) = prefix.iter().position(|fs| !violates(site, fs)) else {
            return self.remaining(e, site, cache);
        };
        let layer = &self.config.layers[k];
        let in_layer: Vec<usize> = (0..self.rules.len()).filter(|r| self.rule_pos[*r] == k).collect();
        let through_k = self.mask_through(Some(k));
        let necessary: Vec<usize> = in_layer
            .iter()
            .copied()
            .filter(|r| {
                let mut m = through_k.clone();
                m.active[*r] = false;
                violates(site, &self.effective_masked(e, &m, cache, 0))
            })
            .collect();
        let ids = |rs: &[usize]| rs.iter().map(|r| self.rules[*r].id.clone()).collect::<Vec<_>>();
        if let Some((first, rest)) = necessary.split_first() {
            return Outcome::Silenced { layer: layer.index, rule: self.rules[*first].id.clone(), also_matched: ids(rest) };
        }
        let below = self.mask_through(k.checked_sub(1));
        let sufficient: Vec<usize> = in_layer
            .iter()
            .copied()
            .filter(|r| {
                let mut m = below.clone();
                m.active[*r] = true;
                !violates(site, &self.effective_masked(e, &m, cache, 0))
            })
            .collect();
        if let Some((first, rest)) = sufficient.split_first() {
            return Outcome::Silenced { layer: layer.index, rule: self.rules[*first].id.clone(), also_matched: ids(rest) };
        }
        // Only a combination of rules silences the site: credit the rule
        // that completes the shortest prefix in document order.
        let mut m = below;
        for r in &in_layer {
            m.active[*r] = true;
            if !violates(site, &self.effective_masked(e, &m, cache, 0)) {
                return Outcome::Silenced { layer: layer.index, rule: self.rules[*r].id.clone(), also_matched: Vec::new() };
            }
        }
        unreachable!("the full layer silences the site")
    }

    fn remaining(&self, e: usize, site: &AccessSite, cache: &mut Cache) -> Outcome {
        let full = self.mask_through(self.config.layers.len().checked_sub(1));
        let mut pending: Vec<usize> = self.pending[e].iter().map(|(r, _)| *r).collect();
        pending.sort_unstable();
        for r in pending {
            let mut m = full.clone();
            m.promote = Some(r);
            if !violates(site, &self.effective_masked(e, &m, cache, 0)) {
                let rule = self.rules[r];
                let status = match &rule.kind {
                    RuleKind::ExecutableGrant { status: GrantStatus::ReviewPending, .. } => RemainingStatus::ReviewPending,
                    _ => RemainingStatus::Adjourned,
                };
                let hint = rule.hint.or_else(|| self.hint_for(e, site));
                return Outcome::Remaining { status, status_rule: Some(rule.id.clone()), hint };
            }
        }
        Outcome::Remaining { status: RemainingStatus::CandidateTruePositive, status_rule: None, hint: self.hint_for(e, site) }
    }

    fn hint_for(&self, e: usize, site: &AccessSite) -> Option<Hint> {
        let exec = &self.execs[e].id;
        let types = [&site.member.declaring_type, &site.receiver.static_type];
        self.config
            .hints
            .iter()
            .find(|h| {
                h.executables.iter().any(|x| glob_match(x, exec))
                    && h.member_type.as_ref().is_none_or(|p| types.iter().any(|t| type_matches(p, t)))
                    && h.member_name.as_ref().is_none_or(|p| glob_match(p, &site.member.name))
            })
            .map(|h| h.hint)
    }

    /// Classifies every base violation, ordered by executable then site ordinal.
    pub fn classify_all(&self) -> Vec<Verdict> {
        let mut out: Vec<Verdict> = (0..self.execs.len()).into_par_iter().flat_map_iter(|e| self.classify_exec(e)).collect();
        out.sort_by(|a, b| site_order(&a.violation.site.site_id).cmp(&site_order(&b.violation.site.site_id)));
        out
    }

    /// Layer-by-layer derivation for one site.
    pub fn explain(&self, site_id: &str) -> Option<Explanation> {
        let (exec_id, _) = site_id.rsplit_once('@')?;
        let e = *self.by_id.get(exec_id)?;
        let site = self.execs[e].body_accesses.iter().find(|s| s.site_id == site_id)?.clone();
        let mut cache = Cache::new();
        let base = self.bases[e].clone();
        let mut steps = Vec::new();
        let mut prev = base.clone();
        let mut prefix = Vec::new();
        for (k, layer) in self.config.layers.iter().enumerate() {
            let fs = self.effective_masked(e, &self.mask_through(Some(k)), &mut cache, 0);
            let added = fs.closure.difference(&prev.closure).cloned().collect();
            let exemptions = fs
                .member_exemptions
                .iter()
                .filter(|x| !prev.member_exemptions.contains(x))
                .map(|x| x.rule_id.clone())
                .collect();
            steps.push(ExplainStep { layer: layer.index, name: layer.name.clone(), added, exemptions, violates: violates(&site, &fs) });
            prev = fs.clone();
            prefix.push(fs);
        }
        let base_violates = violates(&site, &base);
        let outcome = base_violates.then(|| self.classify_site(e, &site, &prefix, &mut cache));
        Some(Explanation {
            executable: exec_id.to_string(),
            eligible: is_eligible(&site),
            base_seeds: base.seeds.iter().map(|(t, roles)| (t.clone(), roles.iter().cloned().collect())).collect(),
            base_closure: base.closure.iter().cloned().collect(),
            base_violates,
            steps,
            outcome,
            site,
        })
    }
}

/// Orders site ids by executable id, then numerically by ordinal.
pub fn site_order(site_id: &str) -> (&str, u64) {
    match site_id.rsplit_once('@') {
        Some((exec, n)) => (exec, n.parse().unwrap_or(u64::MAX)),
        None => (site_id, 0),
    }
}

fn call_grants(e: &Executable, table: &TypeTable, matchers: &[CallMatcher], grants: Option<&[String]>) -> Vec<TypeRef> {
    let mut out = Vec::new();
    for site in e.body_accesses.iter().filter(|s| s.is_call()) {
        let recv = &site.receiver.static_type;
        let hit = matchers.iter().any(|m| {
            glob_match(&m.method_glob, &site.member.name)
                && (type_matches(&m.type_pattern, &site.member.declaring_type)
                    || table.supertype_closure([recv]).iter().any(|t| type_matches(&m.type_pattern, t)))
        });
        if !hit {
            continue;
        }
        match grants {
            Some(names) => out.extend(resolve_all(names, table)),
            None => out.push(site.member.declared_type.clone()),
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplainStep {
    pub layer: u32,
    pub name: String,
    /// Types that joined the closure at this layer.
    pub added: Vec<TypeRef>,
    /// Rules whose member exemptions became active at this layer.
    pub exemptions: Vec<String>,
    pub violates: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Explanation {
    pub site: AccessSite,
    pub executable: String,
    pub eligible: bool,
    pub base_seeds: Vec<(TypeRef, Vec<SeedRole>)>,
    pub base_closure: Vec<TypeRef>,
    pub base_violates: bool,
    pub steps: Vec<ExplainStep>,
    pub outcome: Option<Outcome>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerTally {
    pub layer: u32,
    pub name: String,
    pub silenced: usize,
    /// Violations still standing once this layer is applied.
    pub remaining_after: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleTally {
    pub rule: String,
    pub layer: u32,
    pub silenced: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Waterfall {
    pub total: usize,
    pub layers: Vec<LayerTally>,
    pub rules: Vec<RuleTally>,
    pub remaining: usize,
    pub remaining_by_status: BTreeMap<String, usize>,
}

pub fn attribute_waterfall(verdicts: &[Verdict], config: &LayeredConfig) -> Waterfall {
    let mut by_layer: BTreeMap<u32, usize> = BTreeMap::new();
    let mut by_rule: HashMap<&str, usize> = HashMap::new();
    let mut by_status: BTreeMap<String, usize> = BTreeMap::new();
    for v in verdicts {
        match &v.outcome {
            Outcome::Silenced { layer, rule, .. } => {
                *by_layer.entry(*layer).or_default() += 1;
                *by_rule.entry(rule.as_str()).or_default() += 1;
            }
            Outcome::Remaining { status, .. } => *by_status.entry(status.as_str().to_string()).or_default() += 1,
        }
    }
    let mut left = verdicts.len();
    let layers = config
        .layers
        .iter()
        .map(|l| {
            let silenced = by_layer.get(&l.index).copied().unwrap_or(0);
            left -= silenced;
            LayerTally { layer: l.index, name: l.name.clone(), silenced, remaining_after: left }
        })
        .collect();
    let rules = config
        .rules()
        .map(|r| RuleTally { rule: r.id.clone(), layer: r.layer, silenced: by_rule.get(r.id.as_str()).copied().unwrap_or(0) })
        .collect();
    Waterfall { total: verdicts.len(), layers, rules, remaining: left, remaining_by_status: by_status }
}

/// Convenience wrapper: classify every base violation in `execs`.
pub fn classify_all(execs: &[Executable], table: &TypeTable, config: &LayeredConfig) -> Vec<Verdict> {
    Adapter::new(table, config, execs).classify_all()
}
