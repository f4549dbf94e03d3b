use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::ast::*;
use super::facts::*;
use super::names::{qualify, KnownTypes, UnitScope};
use super::visit::for_each_nested_type;
use super::BindError;
use crate::codemodel::{
    Arity, DeclKind, MemberDecl, MemberKind, ModelError, Origin, Primitive, ResolutionMode, TypeDecl, TypeRef, TypeTable,
    Visibility,
};

fn bind_err(file: &str, span: Span, message: impl Into<String>) -> BindError {
    BindError { file: file.to_string(), line: span.line, column: span.column, message: message.into() }
}

fn resolve_type_expr(
    scope: &UnitScope<'_>,
    ty: &TypeExpr,
    context_path: &str,
    mode: ResolutionMode,
    file: &str,
) -> Result<TypeRef, BindError> {
    let mut base = match &ty.base {
        TypeBase::Primitive(word) => TypeRef::Primitive(Primitive::from_keyword(word).unwrap_or(Primitive::Int)),
        TypeBase::Named(segs) => match scope.resolve(segs, context_path) {
            Some(q) => TypeRef::Declared(q),
            None if mode == ResolutionMode::Lenient => TypeRef::Unknown,
            None => return Err(bind_err(file, ty.span, format!("cannot resolve type `{}`", segs.join(".")))),
        },
    };
    for _ in 0..ty.dims {
        base = TypeRef::array_of(base);
    }
    Ok(base)
}

fn visibility_of(m: &Modifiers, in_interface: bool) -> Visibility {
    if in_interface || m.public {
        Visibility::Public
    } else if m.protected {
        Visibility::Protected
    } else if m.private {
        Visibility::Private
    } else {
        Visibility::Package
    }
}

/// Qualified names of every type declared in `units`, with duplicate detection.
pub fn source_type_names(units: &[CompilationUnit]) -> Result<Vec<String>, BindError> {
    let mut seen: BTreeMap<String, ()> = BTreeMap::new();
    let mut out = Vec::new();
    for unit in units {
        let mut dup = None;
        for top in &unit.types {
            for_each_nested_type(top, &mut |t| {
                let q = qualify(&unit.package, &t.path);
                if seen.insert(q.clone(), ()).is_some() && dup.is_none() {
                    dup = Some((q.clone(), t.span));
                }
                out.push(q);
            });
        }
        if let Some((name, span)) = dup {
            return Err(bind_err(&unit.file, span, format!("duplicate type `{name}`")));
        }
    }
    Ok(out)
}

/// Builds the analyzed-source part of the type table. `external` supplies
/// the names of stubbed types so that references to them resolve.
pub fn declare_types(units: &[CompilationUnit], external: &TypeTable, mode: ResolutionMode) -> Result<TypeTable, BindError> {
    let names = source_type_names(units)?;
    let mut all: Vec<String> = names;
    all.extend(external.entries.keys().cloned());
    all.push(crate::codemodel::OBJECT.to_string());
    let known = KnownTypes::new(all.iter());
    let mut table = TypeTable::new();
    for unit in units {
        let scope = UnitScope::new(unit, &known);
        for top in &unit.types {
            let mut result = Ok(());
            for_each_nested_type(top, &mut |t| {
                if result.is_err() {
                    return;
                }
                result = declare_one(&scope, unit, t, mode).and_then(|decl| {
                    table.insert(decl).map_err(|e| bind_err(&unit.file, t.span, e.to_string()))
                });
            });
            result?;
        }
    }
    Ok(table)
}

fn declare_one(scope: &UnitScope<'_>, unit: &CompilationUnit, t: &TypeDeclAst, mode: ResolutionMode) -> Result<TypeDecl, BindError> {
    let file = unit.file.as_str();
    let tref = TypeRef::Declared(qualify(&unit.package, &t.path));
    // Supertypes are written outside the body, so resolve them from the
    // enclosing context; a class may still name its own member types.
    let outer_path = match t.path.rfind('$') {
        Some(i) if t.kind != TypeDeclKind::Anonymous && t.kind != TypeDeclKind::Local => t.path[..i].to_string(),
        _ => t.path.clone(),
    };
    let mut supertypes = Vec::new();
    for sup in t.extends.iter().chain(&t.implements) {
        match resolve_type_expr(scope, sup, &outer_path, ResolutionMode::Lenient, file)? {
            TypeRef::Unknown => {
                if mode == ResolutionMode::Strict {
                    return Err(bind_err(file, sup.span, format!("cannot resolve supertype `{}`", type_text(sup))));
                }
                supertypes.push(TypeRef::Declared(type_text(sup)));
            }
            resolved => supertypes.push(resolved),
        }
    }
    let mut members = Vec::new();
    for m in &t.members {
        match m {
            MemberAst::Field(f) => {
                for d in &f.declarators {
                    members.push(MemberDecl {
                        name: d.name.clone(),
                        kind: MemberKind::Field,
                        is_static: f.modifiers.is_static || t.is_interface,
                        visibility: visibility_of(&f.modifiers, t.is_interface),
                        declared_type: resolve_type_expr(scope, &d.ty, &t.path, mode, file)?,
                        param_types: Vec::new(),
                        declaring_type: tref.clone(),
                    });
                }
            }
            MemberAst::Method(md) | MemberAst::Constructor(md) => {
                let params = md
                    .params
                    .iter()
                    .map(|p| resolve_type_expr(scope, &p.ty, &t.path, mode, file))
                    .collect::<Result<Vec<_>, _>>()?;
                let (kind, declared_type) = match &md.ret {
                    Some(ret) => (MemberKind::Method, resolve_type_expr(scope, ret, &t.path, mode, file)?),
                    None => (MemberKind::Constructor, tref.clone()),
                };
                members.push(MemberDecl {
                    name: md.name.clone(),
                    kind,
                    is_static: md.modifiers.is_static,
                    visibility: visibility_of(&md.modifiers, t.is_interface),
                    declared_type,
                    param_types: params,
                    declaring_type: tref.clone(),
                });
            }
            MemberAst::Initializer { .. } | MemberAst::Type(_) => {}
        }
    }
    let decl_kind = if t.is_interface { DeclKind::Interface } else { DeclKind::Class };
    Ok(TypeDecl { tref, decl_kind, supertypes, members, origin: Origin::AnalyzedSource })
}

fn type_text(t: &TypeExpr) -> String {
    let base = match &t.base {
        TypeBase::Primitive(p) => p.clone(),
        TypeBase::Named(segs) => segs.join("."),
    };
    format!("{base}{}", "[]".repeat(t.dims))
}

// ---- extraction ----

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VarKind {
    Local,
    Param,
    Catch,
    Captured,
}

#[derive(Clone, Debug)]
struct Var {
    ty: TypeRef,
    kind: VarKind,
}

struct TypeFrame {
    path: String,
    tref: TypeRef,
    superclass: TypeRef,
    enclosing_exec: Option<String>,
}

struct ExecBuilder {
    id: String,
    owner: TypeRef,
    kind: ExecKind,
    params: Vec<ParamInfo>,
    instantiated: BTreeSet<TypeRef>,
    downcasts: BTreeSet<TypeRef>,
    enclosing: Option<String>,
    sites: Vec<AccessSite>,
    span: SourceSpan,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Form {
    Plain,
    This,
    Outer,
}

#[derive(Clone, Debug)]
struct Value {
    ty: TypeRef,
    chain: Vec<ProvStep>,
    form: Form,
}

impl Value {
    fn plain(ty: TypeRef, chain: Vec<ProvStep>) -> Value {
        Value { ty, chain, form: Form::Plain }
    }

    fn single(step: Step, ty: TypeRef) -> Value {
        Value::plain(ty.clone(), vec![ProvStep { step, ty }])
    }
}

enum Val {
    Expr(Value),
    Type(TypeRef),
    Package(Vec<String>),
}

struct Recv {
    form: ReceiverForm,
    ty: TypeRef,
    chain: Vec<ProvStep>,
}

impl Recv {
    fn of(v: Value) -> Recv {
        let form = match v.form {
            Form::Plain => ReceiverForm::Expression,
            Form::This => ReceiverForm::ThisExplicit,
            Form::Outer => ReceiverForm::OuterInstance,
        };
        let chain = if form == ReceiverForm::Expression { v.chain } else { Vec::new() };
        Recv { form, ty: v.ty, chain }
    }
}

type BResult<T> = Result<T, BindError>;

pub(crate) struct Binder<'a> {
    table: &'a TypeTable,
    scope: UnitScope<'a>,
    mode: ResolutionMode,
    file: String,
    types: Vec<TypeFrame>,
    locals: Vec<HashMap<String, Var>>,
    exec: Vec<ExecBuilder>,
    out: Vec<Executable>,
}

/// Extracts every executable of one unit against the merged table.
pub fn extract_unit(unit: &CompilationUnit, table: &TypeTable, known: &KnownTypes, mode: ResolutionMode) -> BResult<Vec<Executable>> {
    let mut b = Binder {
        table,
        scope: UnitScope::new(unit, known),
        mode,
        file: unit.file.clone(),
        types: Vec::new(),
        locals: Vec::new(),
        exec: Vec::new(),
        out: Vec::new(),
    };
    for t in &unit.types {
        b.bind_type(t, None)?;
    }
    Ok(b.out)
}

/// Types a standalone expression as if it appeared in a method of `type_name`
/// with the given locals in scope. Accesses are bound but discarded.
pub fn infer_expression_type(
    expr: &Expr,
    table: &TypeTable,
    known: &KnownTypes,
    unit: &CompilationUnit,
    type_name: &str,
    locals: &[(String, TypeRef)],
    mode: ResolutionMode,
) -> BResult<TypeRef> {
    let mut b = Binder {
        table,
        scope: UnitScope::new(unit, known),
        mode,
        file: unit.file.clone(),
        types: Vec::new(),
        locals: Vec::new(),
        exec: Vec::new(),
        out: Vec::new(),
    };
    let tref = TypeRef::declared(type_name);
    let path = match &unit.package {
        Some(p) if type_name.starts_with(&format!("{p}.")) => type_name[p.len() + 1..].to_string(),
        _ => type_name.to_string(),
    };
    let superclass = table
        .get(type_name)
        .and_then(|d| d.supertypes.first().cloned())
        .unwrap_or_else(TypeRef::object);
    b.types.push(TypeFrame { path, tref: tref.clone(), superclass, enclosing_exec: None });
    let frame = locals.iter().map(|(n, t)| (n.clone(), Var { ty: t.clone(), kind: VarKind::Local })).collect();
    b.locals.push(frame);
    b.start_exec(format!("{type_name}#<expr>"), ExecKind::Method, Span::default());
    let v = b.rvalue(expr)?;
    Ok(v.ty)
}

impl<'a> Binder<'a> {
    fn err<T>(&self, span: Span, message: impl Into<String>) -> BResult<T> {
        Err(bind_err(&self.file, span, message))
    }

    fn lenient(&self) -> bool {
        self.mode == ResolutionMode::Lenient
    }

    fn frame(&self) -> &TypeFrame {
        self.types.last().expect("inside a type")
    }

    fn exec_mut(&mut self) -> &mut ExecBuilder {
        self.exec.last_mut().expect("inside an executable")
    }

    fn resolve_type(&self, ty: &TypeExpr) -> BResult<TypeRef> {
        let path = self.frame().path.clone();
        resolve_type_expr(&self.scope, ty, &path, self.mode, &self.file)
    }

    fn bind_type(&mut self, decl: &TypeDeclAst, enclosing_exec: Option<String>) -> BResult<()> {
        let qname = qualify(&self.scope.package, &decl.path);
        let tref = TypeRef::Declared(qname.clone());
        let superclass = if decl.is_interface {
            TypeRef::object()
        } else {
            match decl.extends.first() {
                None => TypeRef::object(),
                Some(_) => {
                    let first = self.table.get(&qname).and_then(|d| d.supertypes.first().cloned()).unwrap_or_else(TypeRef::object);
                    let is_interface = self.table.get_ref(&first).is_some_and(|d| d.decl_kind == DeclKind::Interface);
                    if is_interface {
                        TypeRef::object()
                    } else {
                        first
                    }
                }
            }
        };
        self.types.push(TypeFrame { path: decl.path.clone(), tref: tref.clone(), superclass, enclosing_exec });
        for member in &decl.members {
            match member {
                MemberAst::Field(f) => {
                    for d in &f.declarators {
                        let Some(init) = &d.init else { continue };
                        let id = format!("{qname}#<field-init:{}>", d.name);
                        self.start_exec(id, ExecKind::FieldInitializer, d.span);
                        self.locals.push(HashMap::new());
                        self.var_init(init)?;
                        self.locals.pop();
                        self.finish_exec();
                    }
                }
                MemberAst::Method(m) | MemberAst::Constructor(m) => {
                    let Some(body) = &m.body else { continue };
                    let is_ctor = m.ret.is_none();
                    let mut params = Vec::new();
                    let mut frame = HashMap::new();
                    let mut sig = Vec::new();
                    for p in &m.params {
                        let ty = self.resolve_type(&p.ty)?;
                        sig.push(if ty.is_unknown() { type_text(&p.ty) } else { ty.simple_name() });
                        frame.insert(p.name.clone(), Var { ty: ty.clone(), kind: VarKind::Param });
                        params.push(ParamInfo { name: p.name.clone(), ty, origin: ParamOrigin::Declared });
                    }
                    let id = format!("{qname}#{}({})", m.name, sig.join(","));
                    let kind = if is_ctor { ExecKind::Constructor } else { ExecKind::Method };
                    self.start_exec(id, kind, m.span);
                    self.exec_mut().params = params;
                    self.locals.push(frame);
                    self.block(body)?;
                    self.locals.pop();
                    self.finish_exec();
                }
                MemberAst::Initializer { is_static, body, index, span } => {
                    let (id, kind) = if *is_static {
                        (format!("{qname}#<static-block-{index}>"), ExecKind::StaticInitializer)
                    } else {
                        (format!("{qname}#<init-block-{index}>"), ExecKind::InstanceInitializer)
                    };
                    self.start_exec(id, kind, *span);
                    self.locals.push(HashMap::new());
                    self.block(body)?;
                    self.locals.pop();
                    self.finish_exec();
                }
                MemberAst::Type(t) => {
                    let saved = std::mem::take(&mut self.locals);
                    let result = self.bind_type(t, None);
                    self.locals = saved;
                    result?;
                }
            }
        }
        self.types.pop();
        Ok(())
    }

    /// Binds an anonymous or local class body with the current locals captured.
    fn bind_inner_type(&mut self, decl: &TypeDeclAst, enclosing_exec: Option<String>) -> BResult<()> {
        let mut captured = HashMap::new();
        for frame in &self.locals {
            for (name, var) in frame {
                captured.insert(name.clone(), Var { ty: var.ty.clone(), kind: VarKind::Captured });
            }
        }
        let saved = std::mem::replace(&mut self.locals, vec![captured]);
        let result = self.bind_type(decl, enclosing_exec);
        self.locals = saved;
        result
    }

    fn start_exec(&mut self, id: String, kind: ExecKind, span: Span) {
        let frame = self.frame();
        let builder = ExecBuilder {
            id,
            owner: frame.tref.clone(),
            kind,
            params: Vec::new(),
            instantiated: BTreeSet::new(),
            downcasts: BTreeSet::new(),
            enclosing: frame.enclosing_exec.clone(),
            sites: Vec::new(),
            span: SourceSpan { file: self.file.clone(), line: span.line, column: span.column },
        };
        self.exec.push(builder);
    }

    fn finish_exec(&mut self) {
        let mut b = self.exec.pop().expect("executable in progress");
        b.sites.sort_by_key(|s| (s.source_span.line, s.source_span.column));
        for (i, site) in b.sites.iter_mut().enumerate() {
            site.site_id = format!("{}@{}", b.id, i + 1);
        }
        self.out.push(Executable {
            id: b.id,
            owner_type: b.owner,
            exec_kind: b.kind,
            params: b.params,
            instantiated_types: b.instantiated,
            downcast_param_types: b.downcasts,
            enclosing_executable: b.enclosing,
            body_accesses: b.sites,
            span: b.span,
        });
    }

    fn lookup_var(&self, name: &str) -> Option<&Var> {
        self.locals.iter().rev().find_map(|f| f.get(name))
    }

    fn declare_var(&mut self, name: &str, ty: TypeRef, kind: VarKind) {
        if let Some(frame) = self.locals.last_mut() {
            frame.insert(name.to_string(), Var { ty, kind });
        }
    }

    // ---- statements ----

    fn block(&mut self, stmts: &[Stmt]) -> BResult<()> {
        self.locals.push(HashMap::new());
        let result = stmts.iter().try_for_each(|s| self.stmt(s));
        self.locals.pop();
        result
    }

    fn stmt(&mut self, stmt: &Stmt) -> BResult<()> {
        match stmt {
            Stmt::Block(b) => self.block(b),
            Stmt::Local(decls) => {
                for d in decls {
                    let ty = self.resolve_type(&d.ty)?;
                    if let Some(init) = &d.init {
                        self.var_init(init)?;
                    }
                    self.declare_var(&d.name, ty, VarKind::Local);
                }
                Ok(())
            }
            Stmt::LocalClass(t) => self.bind_inner_type(t, None),
            Stmt::Expr(e) | Stmt::Throw(e) => self.rvalue(e).map(|_| ()),
            Stmt::If { cond, then, otherwise } => {
                self.rvalue(cond)?;
                self.scoped_stmt(then)?;
                if let Some(o) = otherwise {
                    self.scoped_stmt(o)?;
                }
                Ok(())
            }
            Stmt::While { cond, body } => {
                self.rvalue(cond)?;
                self.scoped_stmt(body)
            }
            Stmt::DoWhile { body, cond } => {
                self.scoped_stmt(body)?;
                self.rvalue(cond).map(|_| ())
            }
            Stmt::For { init, cond, update, body } => {
                self.locals.push(HashMap::new());
                let result = (|| {
                    for s in init {
                        self.stmt(s)?;
                    }
                    if let Some(c) = cond {
                        self.rvalue(c)?;
                    }
                    for u in update {
                        self.rvalue(u)?;
                    }
                    self.scoped_stmt(body)
                })();
                self.locals.pop();
                result
            }
            Stmt::Switch { selector, groups } => {
                self.rvalue(selector)?;
                self.locals.push(HashMap::new());
                let result = (|| {
                    for g in groups {
                        for label in g.labels.iter().flatten() {
                            self.rvalue(label)?;
                        }
                        for s in &g.body {
                            self.stmt(s)?;
                        }
                    }
                    Ok(())
                })();
                self.locals.pop();
                result
            }
            Stmt::Try { body, catches, finally } => {
                self.block(body)?;
                for (param, handler) in catches {
                    let ty = self.resolve_type(&param.ty)?;
                    self.exec_mut().params.push(ParamInfo { name: param.name.clone(), ty: ty.clone(), origin: ParamOrigin::Catch });
                    let mut frame = HashMap::new();
                    frame.insert(param.name.clone(), Var { ty, kind: VarKind::Catch });
                    self.locals.push(frame);
                    let result = self.block(handler);
                    self.locals.pop();
                    result?;
                }
                if let Some(f) = finally {
                    self.block(f)?;
                }
                Ok(())
            }
            Stmt::Return(e) => {
                if let Some(e) = e {
                    self.rvalue(e)?;
                }
                Ok(())
            }
            Stmt::Synchronized { lock, body } => {
                self.rvalue(lock)?;
                self.block(body)
            }
            Stmt::Labeled(s) => self.stmt(s),
            Stmt::CtorCall { args } => {
                for a in args {
                    self.rvalue(a)?;
                }
                Ok(())
            }
            Stmt::Break | Stmt::Continue | Stmt::Empty => Ok(()),
        }
    }

    fn scoped_stmt(&mut self, stmt: &Stmt) -> BResult<()> {
        self.locals.push(HashMap::new());
        let result = self.stmt(stmt);
        self.locals.pop();
        result
    }

    fn var_init(&mut self, init: &VarInit) -> BResult<()> {
        match init {
            VarInit::Expr(e) => self.rvalue(e).map(|_| ()),
            VarInit::Array(items, _) => items.iter().try_for_each(|i| self.var_init(i)),
        }
    }

    // ---- expressions ----

    /// Binds an expression used as a value.
    fn rvalue(&mut self, e: &Expr) -> BResult<Value> {
        match self.val(e, false)? {
            Val::Expr(v) => Ok(v),
            Val::Type(t) => self.err(e.span, format!("type `{t}` used as a value")),
            Val::Package(p) => self.unresolved_name(e.span, &p.join(".")),
        }
    }

    fn unresolved_name(&self, span: Span, name: &str) -> BResult<Value> {
        if self.lenient() {
            Ok(Value::single(Step::Local { name: name.to_string() }, TypeRef::Unknown))
        } else {
            self.err(span, format!("cannot resolve symbol `{name}`"))
        }
    }

    fn val(&mut self, e: &Expr, write: bool) -> BResult<Val> {
        let v = match &e.kind {
            ExprKind::Literal(lit) => {
                let ty = match lit {
                    Literal::Int => TypeRef::Primitive(Primitive::Int),
                    Literal::Long => TypeRef::Primitive(Primitive::Long),
                    Literal::Float => TypeRef::Primitive(Primitive::Float),
                    Literal::Double => TypeRef::Primitive(Primitive::Double),
                    Literal::Char => TypeRef::Primitive(Primitive::Char),
                    Literal::Bool => TypeRef::Primitive(Primitive::Boolean),
                    Literal::Str => TypeRef::string(),
                    Literal::Null => TypeRef::Null,
                };
                Value::single(Step::Literal, ty)
            }
            ExprKind::Name(segs) => return self.name(segs, write),
            ExprKind::This => Value { ty: self.frame().tref.clone(), chain: Vec::new(), form: Form::This },
            ExprKind::QualifiedThis(names) => {
                let path = self.frame().path.clone();
                let Some(q) = self.scope.resolve(names, &path) else {
                    return self.err(e.span, format!("cannot resolve type `{}`", names.join(".")));
                };
                let tref = TypeRef::Declared(q);
                let form = if tref == self.frame().tref { Form::This } else { Form::Outer };
                Value { ty: tref, chain: Vec::new(), form }
            }
            ExprKind::Field { target, name } => {
                let target = self.val(target, false)?;
                return self.select(target, name, write);
            }
            ExprKind::SuperField { name } => {
                let recv = Recv { form: ReceiverForm::Super, ty: self.frame().superclass.clone(), chain: Vec::new() };
                self.access(recv, name, Arity::Field, write, Vec::new())?
            }
            ExprKind::Call { target, name, args } => {
                let arg_types = self.args(args)?;
                let arity = Arity::Method(args.len());
                match target {
                    None => self.unqualified(name, arity, false, arg_types)?,
                    Some(t) => match self.val(t, false)? {
                        Val::Expr(v) => self.access(Recv::of(v), name, arity, false, arg_types)?,
                        Val::Type(ty) => {
                            self.access(Recv { form: ReceiverForm::TypeName, ty, chain: Vec::new() }, name, arity, false, arg_types)?
                        }
                        Val::Package(p) => {
                            let recv = self.unresolved_name(t.span, &p.join("."))?;
                            self.access(Recv::of(recv), name, arity, false, arg_types)?
                        }
                    },
                }
            }
            ExprKind::SuperCall { name, args } => {
                let arg_types = self.args(args)?;
                let recv = Recv { form: ReceiverForm::Super, ty: self.frame().superclass.clone(), chain: Vec::new() };
                self.access(recv, name, Arity::Method(args.len()), false, arg_types)?
            }
            ExprKind::New { ty, args, body } => {
                let declared = self.resolve_type(ty)?;
                self.args(args)?;
                let created = match body {
                    Some(anon) => {
                        let anon_ref = TypeRef::Declared(qualify(&self.scope.package, &anon.path));
                        let enclosing = self.exec.last().map(|x| x.id.clone());
                        self.exec_mut().instantiated.insert(anon_ref.clone());
                        self.bind_inner_type(anon, enclosing)?;
                        anon_ref
                    }
                    None => {
                        if matches!(declared, TypeRef::Declared(_)) {
                            self.exec_mut().instantiated.insert(declared.clone());
                        }
                        declared
                    }
                };
                Value::single(Step::New { of: created.clone() }, created)
            }
            ExprKind::NewArray { ty, dims, init } => {
                let array = self.resolve_type(ty)?;
                for d in dims {
                    self.rvalue(d)?;
                }
                if let Some(items) = init {
                    for i in items {
                        self.var_init(i)?;
                    }
                }
                Value::single(Step::New { of: array.clone() }, array)
            }
            ExprKind::Index { array, index } => {
                let arr = self.rvalue(array)?;
                self.rvalue(index)?;
                let elem = arr.ty.element().cloned().unwrap_or(TypeRef::Unknown);
                let mut chain = arr.chain;
                chain.push(ProvStep { step: Step::Index, ty: elem.clone() });
                Value::plain(elem, chain)
            }
            ExprKind::Cast { ty, expr } => {
                let target = self.resolve_type(ty)?;
                if let ExprKind::Name(segs) = &expr.unparen().kind {
                    if segs.len() == 1 && matches!(target, TypeRef::Declared(_)) {
                        if let Some(var) = self.lookup_var(&segs[0].name) {
                            if var.kind == VarKind::Param {
                                self.exec_mut().downcasts.insert(target.clone());
                            }
                        }
                    }
                }
                let inner = self.rvalue(expr)?;
                let mut chain = inner.chain;
                chain.push(ProvStep { step: Step::Cast { to: target.clone() }, ty: target.clone() });
                Value::plain(target, chain)
            }
            ExprKind::Unary { op, expr } => {
                let inner = self.rvalue(expr)?;
                let ty = match (*op, inner.ty.primitive()) {
                    ("!", _) => TypeRef::Primitive(Primitive::Boolean),
                    (_, Some(p)) if p.is_numeric() => TypeRef::Primitive(Primitive::promote(p, Primitive::Int)),
                    _ => TypeRef::Unknown,
                };
                Value::single(Step::Operator, ty)
            }
            ExprKind::IncDec { expr, .. } => {
                let target = self.lvalue(expr)?;
                Value::plain(target.ty, target.chain)
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.rvalue(lhs)?;
                let r = self.rvalue(rhs)?;
                Value::single(Step::Operator, binary_type(op, &l.ty, &r.ty))
            }
            ExprKind::InstanceOf { expr, ty } => {
                self.rvalue(expr)?;
                self.resolve_type(ty)?;
                Value::single(Step::Operator, TypeRef::Primitive(Primitive::Boolean))
            }
            ExprKind::Conditional { cond, then, otherwise } => {
                self.rvalue(cond)?;
                let t = self.rvalue(then)?;
                let o = self.rvalue(otherwise)?;
                let ty = if t.ty == TypeRef::Null { o.ty } else { t.ty };
                Value::single(Step::Operator, ty)
            }
            ExprKind::Assign { lhs, rhs, .. } => {
                let target = self.lvalue(lhs)?;
                self.rvalue(rhs)?;
                Value::plain(target.ty, target.chain)
            }
            ExprKind::Paren(inner) => return self.val(inner, write),
            ExprKind::ClassLit(ty) => {
                self.resolve_type(ty)?;
                Value::single(Step::Literal, TypeRef::declared("java.lang.Class"))
            }
        };
        Ok(Val::Expr(v))
    }

    fn lvalue(&mut self, e: &Expr) -> BResult<Value> {
        match &e.kind {
            ExprKind::Name(_) | ExprKind::Field { .. } | ExprKind::SuperField { .. } | ExprKind::Paren(_) => match self.val(e, true)? {
                Val::Expr(v) => Ok(v),
                Val::Type(t) => self.err(e.span, format!("type `{t}` used as a value")),
                Val::Package(p) => self.unresolved_name(e.span, &p.join(".")),
            },
            _ => self.rvalue(e),
        }
    }

    fn args(&mut self, args: &[Expr]) -> BResult<Vec<TypeRef>> {
        args.iter().map(|a| self.rvalue(a).map(|v| v.ty)).collect()
    }

    fn name(&mut self, segs: &[NameSeg], write: bool) -> BResult<Val> {
        let mut val = self.name_head(&segs[0], write && segs.len() == 1)?;
        for (i, seg) in segs.iter().enumerate().skip(1) {
            val = self.select(val, seg, write && i == segs.len() - 1)?;
        }
        Ok(val)
    }

    fn name_head(&mut self, seg: &NameSeg, write: bool) -> BResult<Val> {
        if let Some(var) = self.lookup_var(&seg.name) {
            let step = match var.kind {
                VarKind::Param | VarKind::Catch => Step::Parameter { name: seg.name.clone() },
                VarKind::Local | VarKind::Captured => Step::Local { name: seg.name.clone() },
            };
            return Ok(Val::Expr(Value::single(step, var.ty.clone())));
        }
        if let Some(v) = self.try_unqualified(seg, Arity::Field, write, Vec::new())? {
            return Ok(Val::Expr(v));
        }
        let path = self.frame().path.clone();
        if let Some(q) = self.scope.resolve_simple(&seg.name, &path) {
            return Ok(Val::Type(TypeRef::Declared(q)));
        }
        if self.scope.is_package_prefix(std::slice::from_ref(&seg.name)) {
            return Ok(Val::Package(vec![seg.name.clone()]));
        }
        if self.lenient() {
            return Ok(Val::Expr(Value::single(Step::Local { name: seg.name.clone() }, TypeRef::Unknown)));
        }
        self.err(seg.span, format!("cannot resolve symbol `{}`", seg.name))
    }

    /// Member selection `target.seg` for field-like access.
    fn select(&mut self, target: Val, seg: &NameSeg, write: bool) -> BResult<Val> {
        match target {
            Val::Expr(v) => Ok(Val::Expr(self.access(Recv::of(v), seg, Arity::Field, write, Vec::new())?)),
            Val::Type(t) => {
                if self.table.find_member(&t, &seg.name, Arity::Field).is_some() {
                    let recv = Recv { form: ReceiverForm::TypeName, ty: t, chain: Vec::new() };
                    return Ok(Val::Expr(self.access(recv, seg, Arity::Field, write, Vec::new())?));
                }
                if let TypeRef::Declared(q) = &t {
                    let nested = format!("{q}${}", seg.name);
                    if self.table.contains(&nested) {
                        return Ok(Val::Type(TypeRef::Declared(nested)));
                    }
                }
                let recv = Recv { form: ReceiverForm::TypeName, ty: t, chain: Vec::new() };
                Ok(Val::Expr(self.access(recv, seg, Arity::Field, write, Vec::new())?))
            }
            Val::Package(mut p) => {
                let candidate = format!("{}.{}", p.join("."), seg.name);
                if self.table.contains(&candidate) {
                    return Ok(Val::Type(TypeRef::Declared(candidate)));
                }
                p.push(seg.name.clone());
                if self.scope.is_package_prefix(&p) {
                    return Ok(Val::Package(p));
                }
                self.unresolved_name(seg.span, &p.join(".")).map(Val::Expr)
            }
        }
    }

    fn unqualified(&mut self, seg: &NameSeg, arity: Arity, write: bool, arg_types: Vec<TypeRef>) -> BResult<Value> {
        if let Some(v) = self.try_unqualified(seg, arity, write, arg_types.clone())? {
            return Ok(v);
        }
        if self.lenient() {
            let recv = Recv { form: ReceiverForm::ThisImplicit, ty: self.frame().tref.clone(), chain: Vec::new() };
            return self.access(recv, seg, arity, write, arg_types);
        }
        self.err(seg.span, format!("cannot resolve method `{}` with {} argument(s)", seg.name, arity))
    }

    /// Looks a simple member name up in the current type, then the lexically
    /// enclosing types.
    fn try_unqualified(&mut self, seg: &NameSeg, arity: Arity, write: bool, arg_types: Vec<TypeRef>) -> BResult<Option<Value>> {
        let innermost = self.types.len() - 1;
        for (i, frame) in self.types.iter().enumerate().rev() {
            if self.table.find_member(&frame.tref, &seg.name, arity).is_some() {
                let form = if i == innermost { ReceiverForm::ThisImplicit } else { ReceiverForm::OuterInstance };
                let recv = Recv { form, ty: frame.tref.clone(), chain: Vec::new() };
                return self.access(recv, seg, arity, write, arg_types).map(Some);
            }
        }
        Ok(None)
    }

    fn access(&mut self, recv: Recv, seg: &NameSeg, arity: Arity, write: bool, arg_types: Vec<TypeRef>) -> BResult<Value> {
        let member = self.resolve_member(&recv.ty, seg, arity)?;
        let access_kind = if recv.form == ReceiverForm::TypeName {
            AccessKind::StaticMemberAccess
        } else if matches!(recv.ty, TypeRef::Array(_)) && arity == Arity::Field && seg.name == "length" {
            AccessKind::ArrayLength
        } else if member.kind == MemberKind::Method {
            AccessKind::MethodCall
        } else if write {
            AccessKind::FieldWrite
        } else {
            AccessKind::FieldRead
        };
        let result_ty = member.declared_type.clone();
        let step = match (recv.form, member.kind) {
            (ReceiverForm::TypeName, _) => Step::StaticMember { name: format!("{}.{}", recv.ty.simple_name(), seg.name) },
            (_, MemberKind::Method) => Step::Call { name: seg.name.clone() },
            _ => Step::Field { name: seg.name.clone() },
        };
        let mut chain = recv.chain.clone();
        chain.push(ProvStep { step, ty: result_ty.clone() });
        let site = AccessSite {
            site_id: String::new(),
            access_kind,
            receiver: ReceiverDesc { form: recv.form, static_type: recv.ty, provenance_chain: recv.chain },
            member,
            source_span: SourceSpan { file: self.file.clone(), line: seg.span.line, column: seg.span.column },
            arg_types: if arity == Arity::Field { Vec::new() } else { arg_types },
        };
        self.exec_mut().sites.push(site);
        Ok(Value::plain(result_ty, chain))
    }

    fn resolve_member(&self, receiver: &TypeRef, seg: &NameSeg, arity: Arity) -> BResult<MemberDecl> {
        if receiver.is_value_type() {
            if self.lenient() {
                return Ok(MemberDecl::unresolved(&TypeRef::Unknown, &seg.name, arity));
            }
            return self.err(seg.span, format!("member `{}` accessed on a value of type `{receiver}`", seg.name));
        }
        self.table.resolve_member(receiver, &seg.name, arity, self.mode).or_else(|e| match e {
            ModelError::UnresolvedMember { .. } | ModelError::UnknownType(_) => self.err(seg.span, e.to_string()),
            other => self.err(seg.span, other.to_string()),
        })
    }
}

fn binary_type(op: &str, l: &TypeRef, r: &TypeRef) -> TypeRef {
    let boolean = TypeRef::Primitive(Primitive::Boolean);
    match op {
        "==" | "!=" | "<" | ">" | "<=" | ">=" | "&&" | "||" => boolean,
        "+" if *l == TypeRef::string() || *r == TypeRef::string() => TypeRef::string(),
        "<<" | ">>" | ">>>" => match l.primitive() {
            Some(p) if p.is_numeric() => TypeRef::Primitive(Primitive::promote(p, Primitive::Int)),
            _ => TypeRef::Unknown,
        },
        _ => match (l.primitive(), r.primitive()) {
            (Some(Primitive::Boolean), Some(Primitive::Boolean)) => boolean,
            (Some(a), Some(b)) if a.is_numeric() && b.is_numeric() => TypeRef::Primitive(Primitive::promote(a, b)),
            _ => TypeRef::Unknown,
        },
    }
}
