use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::codemodel::{TypeRef, TypeTable};
use crate::demeter::MemberPredicate;
use crate::glob::type_name_matches;

pub const CONFIG_SCHEMA: &str = "demeterlint-config/1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub source: String,
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.source, self.path, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrantStatus {
    Accepted,
    Adjourned,
    ReviewPending,
}

impl GrantStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            GrantStatus::Accepted => "accepted",
            GrantStatus::Adjourned => "adjourned",
            GrantStatus::ReviewPending => "review-pending",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hint {
    LiftForward,
    PushBack,
    PushUp,
    SpecializeCtorParam,
    KeepSpecializedReference,
}

impl Hint {
    pub fn as_str(self) -> &'static str {
        match self {
            Hint::LiftForward => "lift-forward",
            Hint::PushBack => "push-back",
            Hint::PushUp => "push-up",
            Hint::SpecializeCtorParam => "specialize-ctor-param",
            Hint::KeepSpecializedReference => "keep-specialized-reference",
        }
    }

    fn parse(text: &str) -> Option<Hint> {
        [Hint::LiftForward, Hint::PushBack, Hint::PushUp, Hint::SpecializeCtorParam, Hint::KeepSpecializedReference]
            .into_iter()
            .find(|h| h.as_str() == text)
    }
}

impl fmt::Display for Hint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    pub class: String,
    pub field: String,
    pub element: String,
}

/// Declaring type pattern and method name glob of a granting call.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CallMatcher {
    pub type_pattern: String,
    pub method_glob: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleKind {
    UniversalFriendTypes { types: Vec<String>, package_globs: Vec<String>, implementors_of: Vec<String> },
    UniversalFriendMembers { predicate: MemberPredicate },
    CallGrant { matchers: Vec<CallMatcher>, grants: Option<Vec<String>> },
    CtorParamsAsFields { enabled: bool },
    AnonInnerShare { enabled: bool },
    DowncastParam { enabled: bool },
    AggregationElements { field_map: Vec<FieldElement>, infer_via: Vec<String> },
    FriendImplication { pairs: Vec<(String, String)> },
    ExecutableGrant { executables: Vec<String>, grants: Vec<String>, status: GrantStatus },
}

impl RuleKind {
    pub fn name(&self) -> &'static str {
        match self {
            RuleKind::UniversalFriendTypes { .. } => "universal-friend-types",
            RuleKind::UniversalFriendMembers { .. } => "universal-friend-members",
            RuleKind::CallGrant { .. } => "call-grant",
            RuleKind::CtorParamsAsFields { .. } => "ctor-params-as-fields",
            RuleKind::AnonInnerShare { .. } => "anon-inner-share",
            RuleKind::DowncastParam { .. } => "downcast-param",
            RuleKind::AggregationElements { .. } => "aggregation-elements",
            RuleKind::FriendImplication { .. } => "friend-implication",
            RuleKind::ExecutableGrant { .. } => "executable-grant",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub id: String,
    pub layer: u32,
    pub tag: String,
    pub kind: RuleKind,
    pub hint: Option<Hint>,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    pub index: u32,
    pub name: String,
    pub source: String,
    pub rules: Vec<Rule>,
}

/// Attaches a refactoring label to remaining violations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HintRule {
    pub id: String,
    pub executables: Vec<String>,
    pub member_type: Option<String>,
    pub member_name: Option<String>,
    pub hint: Hint,
    pub source: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LayeredConfig {
    pub layers: Vec<Layer>,
    pub hints: Vec<HintRule>,
}

impl LayeredConfig {
    pub fn is_empty(&self) -> bool {
        self.layers.is_empty() && self.hints.is_empty()
    }

    pub fn rules(&self) -> impl Iterator<Item = &Rule> {
        self.layers.iter().flat_map(|l| l.rules.iter())
    }

    pub fn rule(&self, id: &str) -> Option<&Rule> {
        self.rules().find(|r| r.id == id)
    }

    pub fn layer_position(&self, index: u32) -> Option<usize> {
        self.layers.iter().position(|l| l.index == index)
    }

    /// The configuration restricted to layers with index at most `through`.
    pub fn truncated(&self, through: Option<u32>) -> LayeredConfig {
        LayeredConfig {
            layers: self.layers.iter().filter(|l| through.is_some_and(|k| l.index <= k)).cloned().collect(),
            hints: self.hints.clone(),
        }
    }
}

/// One configuration document with a display name for diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigDocument {
    pub name: String,
    pub text: String,
}

struct Ctx<'a> {
    source: &'a str,
}

impl Ctx<'_> {
    fn err<T>(&self, path: &str, message: impl Into<String>) -> Result<T, ConfigError> {
        Err(ConfigError { source: self.source.to_string(), path: path.to_string(), message: message.into() })
    }

    fn object<'v>(&self, v: &'v Value, path: &str) -> Result<&'v Map<String, Value>, ConfigError> {
        match v {
            Value::Object(m) => Ok(m),
            _ => self.err(path, "expected an object"),
        }
    }

    fn keys(&self, obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<(), ConfigError> {
        for k in obj.keys() {
            if !allowed.contains(&k.as_str()) {
                return self.err(&format!("{path}.{k}"), "unknown key");
            }
        }
        Ok(())
    }

    fn string(&self, obj: &Map<String, Value>, key: &str, path: &str) -> Result<String, ConfigError> {
        match obj.get(key) {
            Some(Value::String(s)) => Ok(s.clone()),
            Some(_) => self.err(&format!("{path}.{key}"), "expected a string"),
            None => self.err(&format!("{path}.{key}"), "missing"),
        }
    }

    fn opt_string(&self, obj: &Map<String, Value>, key: &str, path: &str) -> Result<Option<String>, ConfigError> {
        match obj.get(key) {
            None => Ok(None),
            Some(_) => self.string(obj, key, path).map(Some),
        }
    }

    /// A string or a list of strings.
    fn strings(&self, obj: &Map<String, Value>, key: &str, path: &str) -> Result<Option<Vec<String>>, ConfigError> {
        match obj.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(vec![s.clone()])),
            Some(Value::Array(items)) => items
                .iter()
                .enumerate()
                .map(|(i, v)| match v {
                    Value::String(s) => Ok(s.clone()),
                    _ => self.err(&format!("{path}.{key}[{i}]"), "expected a string"),
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(_) => self.err(&format!("{path}.{key}"), "expected a string or a list of strings"),
        }
    }

    fn enabled(&self, obj: &Map<String, Value>, path: &str) -> Result<bool, ConfigError> {
        match obj.get("enabled") {
            None => Ok(true),
            Some(Value::Bool(b)) => Ok(*b),
            Some(_) => self.err(&format!("{path}.enabled"), "expected a boolean"),
        }
    }

    fn list<'v>(&self, obj: &'v Map<String, Value>, key: &str, path: &str) -> Result<&'v [Value], ConfigError> {
        match obj.get(key) {
            None => Ok(&[]),
            Some(Value::Array(items)) => Ok(items),
            Some(_) => self.err(&format!("{path}.{key}"), "expected a list"),
        }
    }

    fn pattern(&self, obj: &Map<String, Value>, key: &str, path: &str, names: (&str, &str)) -> Result<(String, String), ConfigError> {
        let p = format!("{path}.{key}");
        let Some(v) = obj.get(key) else {
            return self.err(&p, "missing");
        };
        let m = self.object(v, &p)?;
        self.keys(m, &[names.0, names.1], &p)?;
        Ok((self.string(m, names.0, &p)?, self.string(m, names.1, &p)?))
    }
}

const COMMON_RULE_KEYS: &[&str] = &["id", "kind", "tag", "hint"];

fn payload_keys(kind: &str) -> Option<&'static [&'static str]> {
    Some(match kind {
        "universal-friend-types" => &["types", "package_glob", "implementors_of"],
        "universal-friend-members" => &["member_predicate", "member_pattern"],
        "call-grant" => &["matcher", "grants"],
        "ctor-params-as-fields" | "anon-inner-share" | "downcast-param" => &["enabled"],
        "aggregation-elements" => &["field_map", "infer_via"],
        "friend-implication" => &["pairs"],
        "executable-grant" => &["executables", "grants", "status"],
        _ => return None,
    })
}

fn parse_rule(ctx: &Ctx<'_>, v: &Value, path: &str, layer: u32) -> Result<Rule, ConfigError> {
    let obj = ctx.object(v, path)?;
    let id = ctx.string(obj, "id", path)?;
    let kind_name = ctx.string(obj, "kind", path)?;
    let Some(payload) = payload_keys(&kind_name) else {
        return ctx.err(&format!("{path}.kind"), format!("unknown rule kind `{kind_name}`"));
    };
    let allowed: Vec<&str> = COMMON_RULE_KEYS.iter().chain(payload.iter()).copied().collect();
    ctx.keys(obj, &allowed, path)?;
    let tag = ctx.opt_string(obj, "tag", path)?.unwrap_or_default();
    let hint = match ctx.opt_string(obj, "hint", path)? {
        None => None,
        Some(h) => match Hint::parse(&h) {
            Some(h) => Some(h),
            None => return ctx.err(&format!("{path}.hint"), format!("unknown hint `{h}`")),
        },
    };
    let kind = match kind_name.as_str() {
        "universal-friend-types" => RuleKind::UniversalFriendTypes {
            types: ctx.strings(obj, "types", path)?.unwrap_or_default(),
            package_globs: ctx.strings(obj, "package_glob", path)?.unwrap_or_default(),
            implementors_of: ctx.strings(obj, "implementors_of", path)?.unwrap_or_default(),
        },
        "universal-friend-members" => {
            let predicate = match (obj.get("member_predicate"), obj.get("member_pattern")) {
                (Some(_), Some(_)) | (None, None) => {
                    return ctx.err(path, "exactly one of `member_predicate` and `member_pattern` is required")
                }
                (Some(_), None) => match ctx.string(obj, "member_predicate", path)?.as_str() {
                    "public-static" => MemberPredicate::PublicStatic,
                    "array-length" => MemberPredicate::ArrayLength,
                    other => return ctx.err(&format!("{path}.member_predicate"), format!("unknown predicate `{other}`")),
                },
                (None, Some(_)) => {
                    let (type_pattern, name_glob) = ctx.pattern(obj, "member_pattern", path, ("type", "name"))?;
                    MemberPredicate::Pattern { type_pattern, name_glob }
                }
            };
            RuleKind::UniversalFriendMembers { predicate }
        }
        "call-grant" => {
            let p = format!("{path}.matcher");
            let items: Vec<&Value> = match obj.get("matcher") {
                None => return ctx.err(&p, "missing"),
                Some(Value::Array(items)) if !items.is_empty() => items.iter().collect(),
                Some(Value::Array(_)) => return ctx.err(&p, "expected at least one matcher"),
                Some(v) => vec![v],
            };
            let mut matchers = Vec::new();
            for (i, item) in items.into_iter().enumerate() {
                let ip = format!("{p}[{i}]");
                let m = ctx.object(item, &ip)?;
                ctx.keys(m, &["type", "method"], &ip)?;
                matchers.push(CallMatcher { type_pattern: ctx.string(m, "type", &ip)?, method_glob: ctx.string(m, "method", &ip)? });
            }
            RuleKind::CallGrant { matchers, grants: ctx.strings(obj, "grants", path)? }
        }
        "ctor-params-as-fields" => RuleKind::CtorParamsAsFields { enabled: ctx.enabled(obj, path)? },
        "anon-inner-share" => RuleKind::AnonInnerShare { enabled: ctx.enabled(obj, path)? },
        "downcast-param" => RuleKind::DowncastParam { enabled: ctx.enabled(obj, path)? },
        "aggregation-elements" => {
            let mut field_map = Vec::new();
            for (i, item) in ctx.list(obj, "field_map", path)?.iter().enumerate() {
                let p = format!("{path}.field_map[{i}]");
                let m = ctx.object(item, &p)?;
                ctx.keys(m, &["class", "field", "element"], &p)?;
                field_map.push(FieldElement {
                    class: ctx.string(m, "class", &p)?,
                    field: ctx.string(m, "field", &p)?,
                    element: ctx.string(m, "element", &p)?,
                });
            }
            RuleKind::AggregationElements { field_map, infer_via: ctx.strings(obj, "infer_via", path)?.unwrap_or_default() }
        }
        "friend-implication" => {
            let mut pairs = Vec::new();
            for (i, item) in ctx.list(obj, "pairs", path)?.iter().enumerate() {
                let p = format!("{path}.pairs[{i}]");
                let m = ctx.object(item, &p)?;
                ctx.keys(m, &["from", "to"], &p)?;
                pairs.push((ctx.string(m, "from", &p)?, ctx.string(m, "to", &p)?));
            }
            RuleKind::FriendImplication { pairs }
        }
        "executable-grant" => {
            let Some(executables) = ctx.strings(obj, "executables", path)? else {
                return ctx.err(&format!("{path}.executables"), "missing");
            };
            let Some(grants) = ctx.strings(obj, "grants", path)? else {
                return ctx.err(&format!("{path}.grants"), "missing");
            };
            let status = match ctx.opt_string(obj, "status", path)?.as_deref() {
                None | Some("accepted") => GrantStatus::Accepted,
                Some("adjourned") => GrantStatus::Adjourned,
                Some("review-pending") => GrantStatus::ReviewPending,
                Some(other) => return ctx.err(&format!("{path}.status"), format!("unknown status `{other}`")),
            };
            RuleKind::ExecutableGrant { executables, grants, status }
        }
        _ => unreachable!("payload_keys covers every kind"),
    };
    Ok(Rule { id, layer, tag, kind, hint, source: ctx.source.to_string() })
}

fn parse_hint(ctx: &Ctx<'_>, v: &Value, path: &str) -> Result<HintRule, ConfigError> {
    let obj = ctx.object(v, path)?;
    ctx.keys(obj, &["id", "executables", "member_pattern", "hint"], path)?;
    let id = ctx.string(obj, "id", path)?;
    let executables = ctx.strings(obj, "executables", path)?.unwrap_or_else(|| vec!["*".to_string()]);
    let (member_type, member_name) = match obj.get("member_pattern") {
        None => (None, None),
        Some(pv) => {
            let p = format!("{path}.member_pattern");
            let m = ctx.object(pv, &p)?;
            ctx.keys(m, &["type", "name"], &p)?;
            (ctx.opt_string(m, "type", &p)?, ctx.opt_string(m, "name", &p)?)
        }
    };
    let text = ctx.string(obj, "hint", path)?;
    let Some(hint) = Hint::parse(&text) else {
        return ctx.err(&format!("{path}.hint"), format!("unknown hint `{text}`"));
    };
    Ok(HintRule { id, executables, member_type, member_name, hint, source: ctx.source.to_string() })
}

/// Parses configuration documents in the given order. A document without an
/// explicit `layer` goes one above the highest layer seen so far.
pub fn load_config(documents: &[ConfigDocument]) -> Result<LayeredConfig, ConfigError> {
    let mut config = LayeredConfig::default();
    let mut next_layer = 0u32;
    let mut rule_ids = BTreeSet::new();
    let mut hint_ids = BTreeSet::new();
    for doc in documents {
        let ctx = Ctx { source: &doc.name };
        let root: Value = match serde_json::from_str(&doc.text) {
            Ok(v) => v,
            Err(e) => return ctx.err("$", e.to_string()),
        };
        let obj = ctx.object(&root, "$")?;
        ctx.keys(obj, &["schema", "layer", "name", "rules", "hints"], "$")?;
        let schema = ctx.string(obj, "schema", "$")?;
        if schema != CONFIG_SCHEMA {
            return ctx.err("$.schema", format!("expected `{CONFIG_SCHEMA}`, found `{schema}`"));
        }
        let index = match obj.get("layer") {
            None => next_layer,
            Some(v) => match v.as_u64().and_then(|n| u32::try_from(n).ok()) {
                Some(n) => n,
                None => return ctx.err("$.layer", "expected a non-negative integer"),
            },
        };
        if config.layers.iter().any(|l| l.index == index) {
            return ctx.err("$.layer", format!("layer {index} is defined twice"));
        }
        next_layer = next_layer.max(index + 1);
        let name = ctx.opt_string(obj, "name", "$")?.unwrap_or_else(|| format!("layer-{index}"));
        let mut rules = Vec::new();
        for (i, rv) in ctx.list(obj, "rules", "$")?.iter().enumerate() {
            let path = format!("$.rules[{i}]");
            let rule = parse_rule(&ctx, rv, &path, index)?;
            if !rule_ids.insert(rule.id.clone()) {
                return ctx.err(&format!("{path}.id"), format!("duplicate rule id `{}`", rule.id));
            }
            rules.push(rule);
        }
        for (i, hv) in ctx.list(obj, "hints", "$")?.iter().enumerate() {
            let path = format!("$.hints[{i}]");
            let hint = parse_hint(&ctx, hv, &path)?;
            if !hint_ids.insert(hint.id.clone()) {
                return ctx.err(&format!("{path}.id"), format!("duplicate hint id `{}`", hint.id));
            }
            config.hints.push(hint);
        }
        config.layers.push(Layer { index, name, source: doc.name.clone(), rules });
    }
    config.layers.sort_by_key(|l| l.index);
    Ok(config)
}

/// Type names in rules that match nothing in `table`. Such rules are inert.
pub fn unknown_type_warnings(config: &LayeredConfig, table: &TypeTable) -> Vec<String> {
    let known = |name: &str| -> bool { table.entries.keys().any(|q| type_name_matches(name, q)) };
    let mut out = Vec::new();
    for rule in config.rules() {
        let mut names: Vec<&str> = Vec::new();
        match &rule.kind {
            RuleKind::UniversalFriendTypes { types, implementors_of, .. } => {
                names.extend(types.iter().map(String::as_str));
                names.extend(implementors_of.iter().map(String::as_str));
            }
            RuleKind::CallGrant { grants: Some(g), .. } => names.extend(g.iter().map(String::as_str)),
            RuleKind::ExecutableGrant { grants, .. } => names.extend(grants.iter().map(String::as_str)),
            RuleKind::AggregationElements { field_map, .. } => {
                for fe in field_map {
                    names.push(&fe.class);
                    names.push(&fe.element);
                }
            }
            RuleKind::FriendImplication { pairs } => {
                for (a, b) in pairs {
                    names.push(a);
                    names.push(b);
                }
            }
            _ => {}
        }
        for n in names {
            if !known(n) {
                out.push(format!("{}: rule `{}` names unknown type `{n}`", rule.source, rule.id));
            }
        }
    }
    out
}

/// Resolves a configured type name to the table types it denotes.
pub fn resolve_type_names(name: &str, table: &TypeTable) -> Vec<TypeRef> {
    if table.contains(name) {
        return vec![TypeRef::declared(name)];
    }
    table.entries.keys().filter(|q| type_name_matches(name, q)).map(|q| TypeRef::declared(q.as_str())).collect()
}
