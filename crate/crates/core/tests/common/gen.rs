//! Random small programs: a few stub types, a few analyzed classes and
//! interfaces with chained accesses, anonymous classes, casts and catches,
//! plus a random layered configuration over the same names.

use demeterlint_core::adapt::ConfigDocument;
use demeterlint_core::codemodel::ResolutionMode;
use demeterlint_core::javafront::SourceFile;
use demeterlint_core::pipeline::AnalysisInput;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum GTy {
    Int,
    Ref(usize),
    Arr(usize),
}

#[derive(Clone, Debug)]
struct GField {
    name: String,
    ty: GTy,
    is_static: bool,
}

#[derive(Clone, Debug)]
struct GMethod {
    name: String,
    ret: Option<GTy>,
    params: Vec<GTy>,
    is_static: bool,
}

#[derive(Clone, Debug)]
struct GType {
    qualified: String,
    simple: String,
    is_iface: bool,
    is_stub: bool,
    superclass: Option<usize>,
    interfaces: Vec<usize>,
    fields: Vec<GField>,
    methods: Vec<GMethod>,
    ctors: Vec<Vec<GTy>>,
}

struct World {
    types: Vec<GType>,
    rng: ChaCha8Rng,
    counter: usize,
}

const OBJECT: usize = 0;
const EXCEPTION: usize = 1;
const BAG: usize = 2;

impl World {
    fn supers(&self, t: usize) -> Vec<usize> {
        let ty = &self.types[t];
        let mut out: Vec<usize> = ty.superclass.into_iter().collect();
        out.extend(ty.interfaces.iter().copied());
        out
    }

    /// All supertypes including `t`, plus Object.
    fn ancestry(&self, t: usize) -> Vec<usize> {
        let mut seen = vec![t];
        let mut i = 0;
        while i < seen.len() {
            for s in self.supers(seen[i]) {
                if !seen.contains(&s) {
                    seen.push(s);
                }
            }
            i += 1;
        }
        if !seen.contains(&OBJECT) {
            seen.push(OBJECT);
        }
        seen
    }

    fn visible_fields(&self, t: usize) -> Vec<GField> {
        self.ancestry(t).iter().flat_map(|a| self.types[*a].fields.clone()).collect()
    }

    fn visible_methods(&self, t: usize) -> Vec<GMethod> {
        self.ancestry(t).iter().flat_map(|a| self.types[*a].methods.clone()).collect()
    }

    fn render(&self, ty: GTy) -> String {
        match ty {
            GTy::Int => "int".to_string(),
            GTy::Ref(t) => self.types[t].simple.clone(),
            GTy::Arr(t) => format!("{}[]", self.types[t].simple),
        }
    }

    fn stub_name(&self, ty: GTy) -> String {
        match ty {
            GTy::Int => "int".to_string(),
            GTy::Ref(t) => self.types[t].qualified.clone(),
            GTy::Arr(t) => format!("{}[]", self.types[t].qualified),
        }
    }

    fn fresh(&mut self, prefix: &str) -> String {
        self.counter += 1;
        format!("{prefix}{}", self.counter)
    }

    fn ref_types(&self) -> Vec<usize> {
        (0..self.types.len()).filter(|t| *t != EXCEPTION).collect()
    }

    fn random_ty(&mut self) -> GTy {
        let refs = self.ref_types();
        let t = *refs.choose(&mut self.rng).expect("types");
        match self.rng.gen_range(0..10) {
            0 | 1 => GTy::Int,
            2 => GTy::Arr(t),
            _ => GTy::Ref(t),
        }
    }
}

struct Ctx {
    owner: usize,
    vars: Vec<(String, GTy)>,
    /// Inside an anonymous class body: no `this.` or `super.` forms.
    in_anon: bool,
    depth: usize,
}

fn literal(w: &World, ty: GTy) -> String {
    match ty {
        GTy::Int => "1".to_string(),
        GTy::Ref(_) | GTy::Arr(_) => {
            let _ = w;
            "null".to_string()
        }
    }
}

fn args(w: &mut World, ctx: &Ctx, params: &[GTy]) -> String {
    let parts: Vec<String> = params
        .iter()
        .map(|p| {
            let same: Vec<&(String, GTy)> = ctx.vars.iter().filter(|(_, t)| t == p).collect();
            if !same.is_empty() && w.rng.gen_bool(0.6) {
                same.choose(&mut w.rng).expect("var").0.clone()
            } else {
                literal(w, *p)
            }
        })
        .collect();
    parts.join(", ")
}

/// A receiver root and its type.
fn root(w: &mut World, ctx: &Ctx) -> Option<(String, GTy)> {
    for _ in 0..8 {
        match w.rng.gen_range(0..9) {
            0 | 1 => {
                let refs: Vec<(String, GTy)> = ctx.vars.iter().filter(|(_, t)| *t != GTy::Int).cloned().collect();
                if let Some(v) = refs.choose(&mut w.rng) {
                    return Some(v.clone());
                }
            }
            2 => {
                let fields: Vec<GField> =
                    w.visible_fields(ctx.owner).into_iter().filter(|f| f.ty != GTy::Int && !f.is_static).collect();
                if let Some(f) = fields.choose(&mut w.rng).cloned() {
                    let text = if !ctx.in_anon && w.rng.gen_bool(0.3) { format!("this.{}", f.name) } else { f.name.clone() };
                    return Some((text, f.ty));
                }
            }
            3 => {
                let methods: Vec<GMethod> = w
                    .visible_methods(ctx.owner)
                    .into_iter()
                    .filter(|m| matches!(m.ret, Some(GTy::Ref(_) | GTy::Arr(_))) && !m.is_static)
                    .collect();
                if let Some(m) = methods.choose(&mut w.rng).cloned() {
                    let a = args(w, ctx, &m.params);
                    let text = if !ctx.in_anon && w.rng.gen_bool(0.3) { format!("this.{}({a})", m.name) } else { format!("{}({a})", m.name) };
                    return Some((text, m.ret.expect("ret")));
                }
            }
            4 => {
                let candidates: Vec<(usize, GMethod)> = (0..w.types.len())
                    .flat_map(|t| w.types[t].methods.iter().filter(|m| m.is_static && m.ret.is_some_and(|r| r != GTy::Int)).map(move |m| (t, m.clone())).collect::<Vec<_>>())
                    .collect();
                if let Some((t, m)) = candidates.choose(&mut w.rng).cloned() {
                    let a = args(w, ctx, &m.params);
                    return Some((format!("{}.{}({a})", w.types[t].simple, m.name), m.ret.expect("ret")));
                }
            }
            5 => {
                let classes: Vec<usize> = (0..w.types.len()).filter(|t| !w.types[*t].is_iface && !w.types[*t].ctors.is_empty()).collect();
                if let Some(&t) = classes.choose(&mut w.rng) {
                    let ctor = w.types[t].ctors.choose(&mut w.rng).expect("ctor").clone();
                    let a = args(w, ctx, &ctor);
                    return Some((format!("new {}({a})", w.types[t].simple), GTy::Ref(t)));
                }
            }
            6 => {
                let params: Vec<(String, GTy)> = ctx.vars.iter().filter(|(n, t)| n.starts_with('p') && matches!(t, GTy::Ref(_))).cloned().collect();
                if let Some((name, _)) = params.choose(&mut w.rng).cloned() {
                    let refs = w.ref_types();
                    let target = *refs.choose(&mut w.rng).expect("types");
                    return Some((format!("(({}) {name})", w.types[target].simple), GTy::Ref(target)));
                }
            }
            7 => {
                if !ctx.in_anon {
                    if let Some(sup) = w.types[ctx.owner].superclass {
                        let methods: Vec<GMethod> = w
                            .visible_methods(sup)
                            .into_iter()
                            .filter(|m| matches!(m.ret, Some(GTy::Ref(_))) && !m.is_static)
                            .collect();
                        if let Some(m) = methods.choose(&mut w.rng).cloned() {
                            let a = args(w, ctx, &m.params);
                            return Some((format!("super.{}({a})", m.name), m.ret.expect("ret")));
                        }
                    }
                }
            }
            _ => {
                let statics: Vec<(usize, GField)> = (0..w.types.len())
                    .flat_map(|t| w.types[t].fields.iter().filter(|f| f.is_static && f.ty != GTy::Int).map(move |f| (t, f.clone())).collect::<Vec<_>>())
                    .collect();
                if let Some((t, f)) = statics.choose(&mut w.rng).cloned() {
                    return Some((format!("{}.{}", w.types[t].simple, f.name), f.ty));
                }
            }
        }
    }
    None
}

/// Extends `base` with up to `steps` member accesses.
fn chain(w: &mut World, ctx: &Ctx, base: (String, GTy), steps: usize) -> (String, GTy) {
    let (mut text, mut ty) = base;
    for _ in 0..steps {
        match ty {
            GTy::Int => break,
            GTy::Arr(t) => {
                if w.rng.gen_bool(0.5) {
                    text = format!("{text}.length");
                    ty = GTy::Int;
                } else {
                    text = format!("{text}[0]");
                    ty = GTy::Ref(t);
                }
            }
            GTy::Ref(t) => {
                let fields: Vec<GField> = w.visible_fields(t).into_iter().filter(|f| !f.is_static).collect();
                let methods: Vec<GMethod> = w.visible_methods(t).into_iter().filter(|m| !m.is_static).collect();
                let pick_field = !fields.is_empty() && (methods.is_empty() || w.rng.gen_bool(0.35));
                if pick_field {
                    let f = fields.choose(&mut w.rng).expect("field").clone();
                    text = format!("{text}.{}", f.name);
                    ty = f.ty;
                } else if let Some(m) = methods.choose(&mut w.rng).cloned() {
                    let a = args(w, ctx, &m.params);
                    text = format!("{text}.{}({a})", m.name);
                    match m.ret {
                        Some(r) => ty = r,
                        None => return (text, GTy::Int),
                    }
                } else {
                    break;
                }
            }
        }
    }
    (text, ty)
}

fn statements(w: &mut World, ctx: &mut Ctx, count: usize, out: &mut Vec<String>, indent: &str) {
    for _ in 0..count {
        match w.rng.gen_range(0..10) {
            0..=4 => {
                if let Some(r) = root(w, ctx) {
                    let steps = w.rng.gen_range(0..=3);
                    let (text, ty) = chain(w, ctx, r, steps);
                    let name = w.fresh("v");
                    out.push(format!("{indent}{} {name} = {text};", w.render(ty)));
                    ctx.vars.push((name, ty));
                }
            }
            5 => {
                // Assignment to an own field.
                let fields: Vec<GField> = w.types[ctx.owner].fields.iter().filter(|f| !f.is_static).cloned().collect();
                if let Some(f) = fields.choose(&mut w.rng).cloned() {
                    let same: Vec<(String, GTy)> = ctx.vars.iter().filter(|(_, t)| *t == f.ty).cloned().collect();
                    let rhs = same.choose(&mut w.rng).map(|v| v.0.clone()).unwrap_or_else(|| literal(w, f.ty));
                    let lhs = if !ctx.in_anon && w.rng.gen_bool(0.5) { format!("this.{}", f.name) } else { f.name.clone() };
                    out.push(format!("{indent}{lhs} = {rhs};"));
                }
            }
            6 if ctx.depth < 2 => {
                // Anonymous class over a random interface.
                let ifaces: Vec<usize> = (0..w.types.len()).filter(|t| w.types[*t].is_iface).collect();
                if let Some(&i) = ifaces.choose(&mut w.rng) {
                    let name = w.fresh("run");
                    out.push(format!("{indent}new {}() {{", w.types[i].simple));
                    out.push(format!("{indent}    public void {name}(int q) {{"));
                    let mut inner = Ctx { owner: ctx.owner, vars: ctx.vars.clone(), in_anon: true, depth: ctx.depth + 1 };
                    let n = w.rng.gen_range(1..=3);
                    statements(w, &mut inner, n, out, &format!("{indent}        "));
                    out.push(format!("{indent}    }}"));
                    out.push(format!("{indent}}};"));
                }
            }
            7 if ctx.depth < 2 => {
                out.push(format!("{indent}try {{"));
                let mut inner = Ctx { owner: ctx.owner, vars: ctx.vars.clone(), in_anon: ctx.in_anon, depth: ctx.depth + 1 };
                statements(w, &mut inner, 1, out, &format!("{indent}    "));
                let e = w.fresh("e");
                out.push(format!("{indent}}} catch (Exception {e}) {{"));
                out.push(format!("{indent}    String {} = {e}.getMessage();", w.fresh("v")));
                out.push(format!("{indent}}}"));
            }
            8 => {
                // Aggregation through an own Bag field.
                let bags: Vec<GField> = w.visible_fields(ctx.owner).into_iter().filter(|f| f.ty == GTy::Ref(BAG) && !f.is_static).collect();
                let vars: Vec<(String, GTy)> = ctx.vars.iter().filter(|(_, t)| matches!(t, GTy::Ref(_))).cloned().collect();
                if let (Some(bag), Some(v)) = (bags.choose(&mut w.rng).cloned(), vars.choose(&mut w.rng).cloned()) {
                    out.push(format!("{indent}{}.addElement({});", bag.name, v.0));
                }
            }
            _ => {
                if let Some(r) = root(w, ctx) {
                    let steps = w.rng.gen_range(1..=3);
                    let (text, ty) = chain(w, ctx, r, steps);
                    if text.ends_with(')') && !text.starts_with("((") {
                        out.push(format!("{indent}{text};"));
                    } else {
                        let name = w.fresh("v");
                        out.push(format!("{indent}{} {name} = {text};", w.render(ty)));
                    }
                }
            }
        }
    }
}

fn build_world(seed: u64) -> World {
    let rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = World { types: Vec::new(), rng, counter: 0 };
    let stub = |q: &str, iface: bool| GType {
        qualified: q.to_string(),
        simple: q.rsplit('.').next().expect("name").to_string(),
        is_iface: iface,
        is_stub: true,
        superclass: None,
        interfaces: Vec::new(),
        fields: Vec::new(),
        methods: Vec::new(),
        ctors: vec![Vec::new()],
    };
    w.types.push(stub("java.lang.Object", false));
    let mut exc = stub("java.lang.Exception", false);
    exc.methods.push(GMethod { name: "getMessage".into(), ret: None, params: Vec::new(), is_static: false });
    w.types.push(exc);
    let mut bag = stub("ext.Bag", false);
    bag.methods.push(GMethod { name: "addElement".into(), ret: None, params: vec![GTy::Ref(OBJECT)], is_static: false });
    w.types.push(bag);
    let n_stub = w.rng.gen_range(1..=3);
    for i in 0..n_stub {
        let mut s = stub(&format!("ext.S{i}"), false);
        if i > 0 && w.rng.gen_bool(0.4) {
            s.superclass = Some(w.types.len() - 1);
        }
        w.types.push(s);
    }
    let n_iface = w.rng.gen_range(1..=2);
    for i in 0..n_iface {
        let mut t = stub(&format!("gen.I{i}"), true);
        t.is_stub = false;
        t.ctors.clear();
        if i > 0 && w.rng.gen_bool(0.5) {
            t.interfaces.push(w.types.len() - 1);
        }
        w.types.push(t);
    }
    let first_class = w.types.len();
    let n_class = w.rng.gen_range(2..=5);
    for i in 0..n_class {
        let mut t = stub(&format!("gen.C{i}"), false);
        t.is_stub = false;
        t.ctors.clear();
        if i > 0 && w.rng.gen_bool(0.5) {
            t.superclass = Some(w.rng.gen_range(first_class..w.types.len()));
        } else if w.rng.gen_bool(0.3) {
            t.superclass = Some(w.rng.gen_range(3..3 + n_stub));
        }
        let ifaces: Vec<usize> = (first_class - n_iface..first_class).collect();
        if w.rng.gen_bool(0.4) {
            t.interfaces.push(*ifaces.choose(&mut w.rng).expect("iface"));
        }
        w.types.push(t);
    }
    // Members, now that every type exists.
    for t in 2..w.types.len() {
        if w.types[t].qualified == "ext.Bag" {
            continue;
        }
        let iface = w.types[t].is_iface;
        let nf = if iface { 0 } else { w.rng.gen_range(0..=3) };
        for _ in 0..nf {
            let name = w.fresh("f");
            let ty = if w.rng.gen_bool(0.15) { GTy::Ref(BAG) } else { w.random_ty() };
            let is_static = w.types[t].is_stub && w.rng.gen_bool(0.3);
            w.types[t].fields.push(GField { name, ty, is_static });
        }
        let nm = w.rng.gen_range(1..=3);
        for _ in 0..nm {
            let name = w.fresh("m");
            let ret = if w.rng.gen_bool(0.2) { None } else { Some(w.random_ty()) };
            let np = w.rng.gen_range(0..=2);
            let params = (0..np).map(|_| w.random_ty()).collect();
            let is_static = !iface && w.rng.gen_bool(0.2);
            w.types[t].methods.push(GMethod { name, ret, params, is_static });
        }
        if !iface && !w.types[t].is_stub {
            let nc = w.rng.gen_range(0..=2);
            for _ in 0..nc {
                let np = w.rng.gen_range(0..=2);
                let ps: Vec<GTy> = (0..np).map(|_| w.random_ty()).collect();
                if !w.types[t].ctors.contains(&ps) {
                    w.types[t].ctors.push(ps);
                }
            }
        }
    }
    w
}

fn stub_document(w: &World) -> String {
    let mut types = Vec::new();
    for t in w.types.iter().filter(|t| t.is_stub) {
        let mut members: Vec<Value> = Vec::new();
        for f in &t.fields {
            members.push(json!({"name": f.name, "kind": "field", "type": w.stub_name(f.ty), "static": f.is_static}));
        }
        for m in &t.methods {
            let ret = m.ret.map(|r| w.stub_name(r)).unwrap_or_else(|| "void".to_string());
            let ret = if m.name == "getMessage" { "java.lang.String".to_string() } else { ret };
            let params: Vec<String> = m.params.iter().map(|p| w.stub_name(*p)).collect();
            members.push(json!({"name": m.name, "kind": "method", "type": ret, "params": params, "static": m.is_static}));
        }
        for c in &t.ctors {
            let params: Vec<String> = c.iter().map(|p| w.stub_name(*p)).collect();
            members.push(json!({"name": t.simple, "kind": "constructor", "params": params}));
        }
        let mut supers = Vec::new();
        if let Some(s) = t.superclass {
            supers.push(w.types[s].qualified.clone());
        }
        types.push(json!({"name": t.qualified, "kind": if t.is_iface { "interface" } else { "class" }, "supertypes": supers, "members": members}));
    }
    types.push(json!({"name": "java.lang.String", "kind": "class"}));
    types.push(json!({"name": "java.lang.Class", "kind": "class"}));
    serde_json::to_string_pretty(&json!({"schema": "demeterlint-stubs/1", "types": types})).expect("stubs")
}

fn source_files(w: &mut World) -> Vec<SourceFile> {
    let mut files = Vec::new();
    for t in 0..w.types.len() {
        if w.types[t].is_stub {
            continue;
        }
        let mut out = vec!["package gen;".to_string(), String::new(), "import ext.*;".to_string(), String::new()];
        let ty = w.types[t].clone();
        let supers = if ty.is_iface {
            if ty.interfaces.is_empty() { String::new() } else { format!(" extends {}", w.types[ty.interfaces[0]].simple) }
        } else {
            let mut s = String::new();
            if let Some(sc) = ty.superclass {
                s.push_str(&format!(" extends {}", w.types[sc].simple));
            }
            if !ty.interfaces.is_empty() {
                s.push_str(&format!(" implements {}", w.types[ty.interfaces[0]].simple));
            }
            s
        };
        let kw = if ty.is_iface { "interface" } else { "abstract class" };
        out.push(format!("public {kw} {}{supers} {{", ty.simple));
        for f in &ty.fields {
            out.push(format!("    {}{} {};", if f.is_static { "static " } else { "" }, w.render(f.ty), f.name));
        }
        for (ci, c) in ty.ctors.iter().enumerate() {
            let params: Vec<String> = c.iter().enumerate().map(|(i, p)| format!("{} p{i}", w.render(*p))).collect();
            out.push(format!("    public {}({}) {{", ty.simple, params.join(", ")));
            let mut ctx = Ctx { owner: t, vars: c.iter().enumerate().map(|(i, p)| (format!("p{i}"), *p)).collect(), in_anon: false, depth: 0 };
            let n = w.rng.gen_range(0..=2) + ci;
            let mut body = Vec::new();
            statements(w, &mut ctx, n, &mut body, "        ");
            out.extend(body);
            out.push("    }".to_string());
        }
        for m in &ty.methods {
            let params: Vec<String> = m.params.iter().enumerate().map(|(i, p)| format!("{} p{i}", w.render(*p))).collect();
            let ret = m.ret.map(|r| w.render(r)).unwrap_or_else(|| "void".to_string());
            if ty.is_iface {
                out.push(format!("    {ret} {}({});", m.name, params.join(", ")));
                continue;
            }
            let st = if m.is_static { "static " } else { "" };
            out.push(format!("    public {st}{ret} {}({}) {{", m.name, params.join(", ")));
            if !m.is_static {
                let mut ctx = Ctx { owner: t, vars: m.params.iter().enumerate().map(|(i, p)| (format!("p{i}"), *p)).collect(), in_anon: false, depth: 0 };
                let n = w.rng.gen_range(1..=5);
                let mut body = Vec::new();
                statements(w, &mut ctx, n, &mut body, "        ");
                out.extend(body);
            }
            if let Some(r) = m.ret {
                out.push(format!("        return {};", literal(w, r)));
            }
            out.push("    }".to_string());
        }
        out.push("}".to_string());
        files.push(SourceFile { name: format!("gen/{}.java", ty.simple), text: out.join("\n") + "\n" });
    }
    files
}

fn random_rule(w: &mut World, id: &str) -> Value {
    let names: Vec<String> = w.types.iter().map(|t| if w.rng.gen_bool(0.5) { t.simple.clone() } else { t.qualified.clone() }).collect();
    let pick = |w: &mut World, names: &[String]| names.choose(&mut w.rng).expect("name").clone();
    let methods: Vec<String> = w.types.iter().flat_map(|t| t.methods.iter().map(|m| m.name.clone())).collect();
    let execs: Vec<String> = w
        .types
        .iter()
        .filter(|t| !t.is_stub && !t.is_iface)
        .map(|t| format!("{}#*", t.qualified))
        .chain(std::iter::once("*".to_string()))
        .collect();
    match w.rng.gen_range(0..9) {
        0 => {
            let n = w.rng.gen_range(1..=2);
            let types: Vec<String> = (0..n).map(|_| pick(w, &names)).collect();
            let mut r = json!({"id": id, "kind": "universal-friend-types", "types": types});
            if w.rng.gen_bool(0.3) {
                r["package_glob"] = json!(if w.rng.gen_bool(0.5) { "ext" } else { "java.lang" });
            }
            if w.rng.gen_bool(0.3) {
                r["implementors_of"] = json!([pick(w, &names)]);
            }
            r
        }
        1 => match w.rng.gen_range(0..3) {
            0 => json!({"id": id, "kind": "universal-friend-members", "member_predicate": "public-static"}),
            1 => json!({"id": id, "kind": "universal-friend-members", "member_predicate": "array-length"}),
            _ => {
                let m = methods.choose(&mut w.rng).cloned().unwrap_or_else(|| "*".to_string());
                json!({"id": id, "kind": "universal-friend-members", "member_pattern": {"type": "*", "name": m}})
            }
        },
        2 => {
            let m = methods.choose(&mut w.rng).cloned().unwrap_or_else(|| "m*".to_string());
            let t = if w.rng.gen_bool(0.5) { "*".to_string() } else { pick(w, &names) };
            let mut r = json!({"id": id, "kind": "call-grant", "matcher": {"type": t, "method": m}});
            if w.rng.gen_bool(0.5) {
                r["grants"] = json!([pick(w, &names)]);
            }
            r
        }
        3 => json!({"id": id, "kind": "ctor-params-as-fields", "enabled": w.rng.gen_bool(0.9)}),
        4 => json!({"id": id, "kind": "anon-inner-share", "enabled": w.rng.gen_bool(0.9)}),
        5 => json!({"id": id, "kind": "downcast-param", "enabled": w.rng.gen_bool(0.9)}),
        6 => {
            let mut r = json!({"id": id, "kind": "aggregation-elements", "infer_via": ["addElement"]});
            if w.rng.gen_bool(0.4) {
                r["field_map"] = json!([{"class": pick(w, &names), "field": "f", "element": pick(w, &names)}]);
            }
            r
        }
        7 => {
            let n = w.rng.gen_range(1..=3);
            let pairs: Vec<Value> = (0..n).map(|_| json!({"from": pick(w, &names), "to": pick(w, &names)})).collect();
            json!({"id": id, "kind": "friend-implication", "pairs": pairs})
        }
        _ => {
            let status = *["accepted", "adjourned", "review-pending"].choose(&mut w.rng).expect("status");
            let e = execs.choose(&mut w.rng).expect("exec").clone();
            json!({"id": id, "kind": "executable-grant", "executables": e, "grants": [pick(w, &names)], "status": status})
        }
    }
}

fn random_configs(w: &mut World) -> Vec<ConfigDocument> {
    let layers = w.rng.gen_range(1..=4);
    let mut docs = Vec::new();
    let mut n = 0;
    for l in 0..layers {
        let count = w.rng.gen_range(1..=3);
        let rules: Vec<Value> = (0..count)
            .map(|_| {
                n += 1;
                random_rule(w, &format!("R{n}"))
            })
            .collect();
        let mut doc = json!({"schema": "demeterlint-config/1", "name": format!("layer{l}"), "rules": rules});
        // Omitted indices default to one past the highest so far.
        if l == 0 || w.rng.gen_bool(0.5) {
            doc["layer"] = json!(l * 2 + usize::from(l % 2 == 1));
        }
        if l == layers - 1 && w.rng.gen_bool(0.5) {
            doc["hints"] = json!([{"id": "H1", "executables": "*", "hint": "push-back"}]);
        }
        docs.push(ConfigDocument { name: format!("cfg{l}.json"), text: serde_json::to_string(&doc).expect("config") });
    }
    docs
}

/// A generated program together with a random configuration.
pub struct Generated {
    pub input: AnalysisInput,
}

pub fn generate(seed: u64) -> Generated {
    let mut w = build_world(seed);
    let stubs = stub_document(&w);
    let sources = source_files(&mut w);
    let configs = random_configs(&mut w);
    Generated {
        input: AnalysisInput {
            sources,
            stubs: vec![SourceFile { name: "gen-stubs.json".to_string(), text: stubs }],
            configs,
            mode: ResolutionMode::Strict,
        },
    }
}
