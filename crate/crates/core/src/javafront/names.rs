use std::collections::{BTreeMap, BTreeSet};

use super::ast::{CompilationUnit, TypeDeclAst};

/// Index of every type name the binder may refer to.
#[derive(Debug, Default)]
pub struct KnownTypes {
    names: BTreeSet<String>,
    by_package: BTreeMap<String, BTreeMap<String, String>>,
}

impl KnownTypes {
    pub fn new<'a>(names: impl IntoIterator<Item = &'a String>) -> KnownTypes {
        let mut known = KnownTypes::default();
        for name in names {
            known.add(name);
        }
        known
    }

    pub fn add(&mut self, qualified: &str) {
        self.names.insert(qualified.to_string());
        let (pkg, simple) = match qualified.rfind('.') {
            Some(i) => (&qualified[..i], &qualified[i + 1..]),
            None => ("", qualified),
        };
        if !simple.contains('$') {
            self.by_package.entry(pkg.to_string()).or_default().insert(simple.to_string(), qualified.to_string());
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.contains(name)
    }
}

pub fn qualify(package: &Option<String>, path: &str) -> String {
    match package {
        Some(p) if !p.is_empty() => format!("{p}.{path}"),
        _ => path.to_string(),
    }
}

/// Per-unit resolution context for simple and dotted type names.
pub struct UnitScope<'a> {
    pub package: Option<String>,
    known: &'a KnownTypes,
    single: BTreeMap<String, String>,
    on_demand: Vec<String>,
    locals: BTreeMap<String, String>,
}

impl<'a> UnitScope<'a> {
    pub fn new(unit: &CompilationUnit, known: &'a KnownTypes) -> UnitScope<'a> {
        let mut single = BTreeMap::new();
        let mut on_demand = Vec::new();
        for imp in &unit.imports {
            if imp.on_demand {
                on_demand.push(imp.name.clone());
            } else {
                let simple = imp.name.rsplit('.').next().unwrap_or(&imp.name).to_string();
                single.insert(simple, imp.name.clone());
            }
        }
        for t in &unit.types {
            single.insert(t.name.clone(), qualify(&unit.package, &t.path));
        }
        let mut locals = BTreeMap::new();
        collect_local_classes(&unit.types, &unit.package, &mut locals);
        UnitScope { package: unit.package.clone(), known, single, on_demand, locals }
    }

    /// Resolves a type name as written inside the type at `context_path`.
    pub fn resolve(&self, segments: &[String], context_path: &str) -> Option<String> {
        let (first, rest) = segments.split_first()?;
        if let Some(head) = self.resolve_simple(first, context_path) {
            return self.descend(head, rest);
        }
        // Leading segments form a package name.
        for split in (1..segments.len()).rev() {
            let candidate = format!("{}.{}", segments[..split].join("."), segments[split]);
            if self.known.contains(&candidate) {
                return self.descend(candidate, &segments[split + 1..]);
            }
        }
        None
    }

    pub fn is_package_prefix(&self, segments: &[String]) -> bool {
        let prefix = segments.join(".");
        self.known_package_prefix(&prefix)
    }

    fn known_package_prefix(&self, prefix: &str) -> bool {
        let dotted = format!("{prefix}.");
        self.known.by_package.keys().any(|p| p == prefix || p.starts_with(&dotted))
    }

    fn descend(&self, mut head: String, rest: &[String]) -> Option<String> {
        for seg in rest {
            let nested = format!("{head}${seg}");
            if !self.known.contains(&nested) {
                return None;
            }
            head = nested;
        }
        Some(head)
    }

    pub fn resolve_simple(&self, name: &str, context_path: &str) -> Option<String> {
        // Member types of the enclosing chain, innermost first.
        let mut path = context_path.to_string();
        loop {
            let here = qualify(&self.package, &path);
            let candidate = format!("{here}${name}");
            if self.known.contains(&candidate) {
                return Some(candidate);
            }
            if path.rsplit('$').next() == Some(name) {
                return Some(here);
            }
            match path.rfind('$') {
                Some(i) => path.truncate(i),
                None => break,
            }
        }
        if let Some(q) = self.locals.get(name) {
            return Some(q.clone());
        }
        if let Some(q) = self.single.get(name) {
            if self.known.contains(q) {
                return Some(q.clone());
            }
        }
        let pkg = self.package.clone().unwrap_or_default();
        if let Some(q) = self.known.by_package.get(&pkg).and_then(|m| m.get(name)) {
            return Some(q.clone());
        }
        for imp in &self.on_demand {
            for candidate in [format!("{imp}.{name}"), format!("{imp}${name}")] {
                if self.known.contains(&candidate) {
                    return Some(candidate);
                }
            }
        }
        let lang = format!("java.lang.{name}");
        if self.known.contains(&lang) {
            return Some(lang);
        }
        None
    }
}

fn collect_local_classes(types: &[TypeDeclAst], package: &Option<String>, out: &mut BTreeMap<String, String>) {
    use super::visit::for_each_nested_type;
    for t in types {
        for_each_nested_type(t, &mut |nested| {
            if nested.kind == super::ast::TypeDeclKind::Local {
                out.entry(nested.name.clone()).or_insert_with(|| qualify(package, &nested.path));
            }
        });
    }
}
