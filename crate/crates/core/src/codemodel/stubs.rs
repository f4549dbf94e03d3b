use serde_json::{Map, Value};

use super::table::{ModelError, TypeTable};
use super::types::{DeclKind, MemberDecl, MemberKind, Origin, TypeDecl, TypeRef, Visibility};

pub const STUB_SCHEMA: &str = "demeterlint-stubs/1";

fn schema_err(path: &str, message: impl Into<String>) -> ModelError {
    ModelError::Schema { path: path.to_string(), message: message.into() }
}

fn str_field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a str, ModelError> {
    match obj.get(key) {
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(schema_err(&format!("{path}.{key}"), "expected a string")),
        None => Err(schema_err(&format!("{path}.{key}"), "missing")),
    }
}

fn opt_str_list(obj: &Map<String, Value>, key: &str, path: &str) -> Result<Vec<String>, ModelError> {
    match obj.get(key) {
        None => Ok(Vec::new()),
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, v)| match v {
                Value::String(s) => Ok(s.clone()),
                _ => Err(schema_err(&format!("{path}.{key}[{i}]"), "expected a string")),
            })
            .collect(),
        Some(_) => Err(schema_err(&format!("{path}.{key}"), "expected a list of strings")),
    }
}

fn check_keys(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<(), ModelError> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(schema_err(&format!("{path}.{key}"), "unknown key"));
        }
    }
    Ok(())
}

/// Parses a stub document into a table holding exactly the declared types.
pub fn load_stubs(text: &str) -> Result<TypeTable, ModelError> {
    if text.trim().is_empty() {
        return Ok(TypeTable::new());
    }
    let root: Value = serde_json::from_str(text).map_err(|e| schema_err("$", e.to_string()))?;
    let Value::Object(root) = root else {
        return Err(schema_err("$", "expected an object"));
    };
    check_keys(&root, &["schema", "types"], "$")?;
    let schema = str_field(&root, "schema", "$")?;
    if schema != STUB_SCHEMA {
        return Err(schema_err("$.schema", format!("expected `{STUB_SCHEMA}`, found `{schema}`")));
    }
    let mut table = TypeTable::new();
    let types = match root.get("types") {
        None => return Ok(table),
        Some(Value::Array(items)) => items,
        Some(_) => return Err(schema_err("$.types", "expected a list")),
    };
    for (i, item) in types.iter().enumerate() {
        let path = format!("$.types[{i}]");
        let decl = parse_type(item, &path)?;
        table.insert(decl)?;
    }
    table.validate(crate::codemodel::ResolutionMode::Lenient)?;
    Ok(table)
}

fn parse_type(item: &Value, path: &str) -> Result<TypeDecl, ModelError> {
    let Value::Object(obj) = item else {
        return Err(schema_err(path, "expected an object"));
    };
    check_keys(obj, &["name", "kind", "supertypes", "members"], path)?;
    let name = str_field(obj, "name", path)?;
    if name.is_empty() || name.ends_with("[]") {
        return Err(schema_err(&format!("{path}.name"), "expected a declared type name"));
    }
    let decl_kind = match str_field(obj, "kind", path)? {
        "class" => DeclKind::Class,
        "interface" => DeclKind::Interface,
        other => return Err(schema_err(&format!("{path}.kind"), format!("unknown kind `{other}`"))),
    };
    let tref = TypeRef::declared(name);
    let supertypes = opt_str_list(obj, "supertypes", path)?.iter().map(|s| TypeRef::parse(s)).collect();
    let mut members = Vec::new();
    match obj.get("members") {
        None => {}
        Some(Value::Array(items)) => {
            for (j, m) in items.iter().enumerate() {
                members.push(parse_member(m, &tref, decl_kind, &format!("{path}.members[{j}]"))?);
            }
        }
        Some(_) => return Err(schema_err(&format!("{path}.members"), "expected a list")),
    }
    Ok(TypeDecl { tref, decl_kind, supertypes, members, origin: Origin::Stub })
}

fn parse_member(item: &Value, owner: &TypeRef, owner_kind: DeclKind, path: &str) -> Result<MemberDecl, ModelError> {
    let Value::Object(obj) = item else {
        return Err(schema_err(path, "expected an object"));
    };
    check_keys(obj, &["name", "kind", "static", "visibility", "type", "params"], path)?;
    let name = str_field(obj, "name", path)?.to_string();
    let kind = match str_field(obj, "kind", path)? {
        "field" => MemberKind::Field,
        "method" => MemberKind::Method,
        "constructor" => MemberKind::Constructor,
        other => return Err(schema_err(&format!("{path}.kind"), format!("unknown member kind `{other}`"))),
    };
    let is_static = match obj.get("static") {
        None => owner_kind == DeclKind::Interface && kind == MemberKind::Field,
        Some(Value::Bool(b)) => *b,
        Some(_) => return Err(schema_err(&format!("{path}.static"), "expected a boolean")),
    };
    let visibility = match obj.get("visibility") {
        None => Visibility::Public,
        Some(Value::String(s)) => {
            Visibility::parse(s).ok_or_else(|| schema_err(&format!("{path}.visibility"), format!("unknown visibility `{s}`")))?
        }
        Some(_) => return Err(schema_err(&format!("{path}.visibility"), "expected a string")),
    };
    let declared_type = match (kind, obj.get("type")) {
        (MemberKind::Constructor, _) => owner.clone(),
        (_, Some(Value::String(s))) => TypeRef::parse(s),
        (_, Some(_)) => return Err(schema_err(&format!("{path}.type"), "expected a string")),
        (_, None) => return Err(schema_err(&format!("{path}.type"), "missing")),
    };
    let param_types: Vec<TypeRef> = opt_str_list(obj, "params", path)?.iter().map(|s| TypeRef::parse(s)).collect();
    if kind == MemberKind::Field && !param_types.is_empty() {
        return Err(schema_err(&format!("{path}.params"), "fields take no parameters"));
    }
    Ok(MemberDecl { name, kind, is_static, visibility, declared_type, param_types, declaring_type: owner.clone() })
}

/// Serializes a table back into a stub document (stub-origin entries only).
pub fn write_stubs(table: &TypeTable) -> String {
    let types: Vec<Value> = table
        .entries
        .values()
        .filter(|d| d.origin == Origin::Stub)
        .map(|d| {
            let members: Vec<Value> = d
                .members
                .iter()
                .map(|m| {
                    serde_json::json!({
                        "name": m.name,
                        "kind": match m.kind { MemberKind::Field => "field", MemberKind::Method => "method", MemberKind::Constructor => "constructor" },
                        "static": m.is_static,
                        "visibility": match m.visibility { Visibility::Public => "public", Visibility::Protected => "protected", Visibility::Package => "package", Visibility::Private => "private" },
                        "type": m.declared_type.to_string(),
                        "params": m.param_types.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect();
            serde_json::json!({
                "name": d.name(),
                "kind": match d.decl_kind { DeclKind::Class => "class", DeclKind::Interface => "interface" },
                "supertypes": d.supertypes.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                "members": members,
            })
        })
        .collect();
    serde_json::to_string_pretty(&serde_json::json!({ "schema": STUB_SCHEMA, "types": types })).unwrap_or_default()
}
