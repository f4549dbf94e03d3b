use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::ParseError;

struct TypeCtx {
    path: String,
    name: String,
    anon_count: usize,
    local_count: usize,
    init_count: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    file: String,
    stack: Vec<TypeCtx>,
}

type PResult<T> = Result<T, ParseError>;

const MODIFIER_WORDS: &[&str] =
    &["public", "protected", "private", "static", "final", "abstract", "native", "synchronized", "transient", "volatile", "strictfp"];

const PRIMITIVES: &[&str] = &["boolean", "byte", "char", "short", "int", "long", "float", "double"];

const ASSIGN_OPS: &[&str] = &["=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", ">>>="];

/// Parses one compilation unit of the supported pre-generics dialect.
pub fn parse_unit(text: &str, file: &str) -> Result<CompilationUnit, ParseError> {
    let toks = tokenize(text, file)?;
    let mut p = Parser { toks, pos: 0, file: file.to_string(), stack: Vec::new() };
    p.unit()
}

/// Parses a standalone expression, as used by static-type queries.
pub fn parse_expression(text: &str, file: &str) -> Result<Expr, ParseError> {
    let toks = tokenize(text, file)?;
    let mut p = Parser { toks, pos: 0, file: file.to_string(), stack: Vec::new() };
    p.stack.push(TypeCtx { path: "<expr>".into(), name: "<expr>".into(), anon_count: 0, local_count: 0, init_count: 0 });
    let e = p.expr()?;
    if !matches!(p.peek(), Tok::Eof) {
        return p.error("unexpected token after expression");
    }
    Ok(e)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error_at<T>(&self, span: Span, message: impl Into<String>) -> PResult<T> {
        Err(ParseError { file: self.file.clone(), line: span.line, column: span.column, message: message.into() })
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        self.error_at(self.span(), message)
    }

    fn is_op(&self, op: &str) -> bool {
        matches!(self.peek(), Tok::Op(o) if *o == op)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Keyword(k) if *k == kw)
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.is_op(op) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: &str) -> PResult<()> {
        if self.eat_op(op) {
            Ok(())
        } else {
            self.unexpected(&format!("`{op}`"))
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        let found = match self.peek() {
            Tok::Op("@") => return self.error("annotations are not supported"),
            Tok::Op("->") => return self.error("lambda expressions are not supported"),
            Tok::Op("::") => return self.error("method references are not supported"),
            Tok::Op("...") => return self.error("variable-arity parameters are not supported"),
            Tok::Keyword("enum") => return self.error("enum declarations are not supported"),
            Tok::Eof => "end of file".to_string(),
            t => describe(t),
        };
        self.error(format!("expected {wanted}, found {found}"))
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                Ok(name)
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn qualified_name(&mut self) -> PResult<Vec<String>> {
        let mut parts = vec![self.ident()?];
        while self.is_op(".") && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.advance();
            parts.push(self.ident()?);
        }
        Ok(parts)
    }

    fn unit(&mut self) -> PResult<CompilationUnit> {
        let package = if self.eat_kw("package") {
            let name = self.qualified_name()?.join(".");
            self.expect_op(";")?;
            Some(name)
        } else {
            None
        };
        let mut imports = Vec::new();
        while self.is_kw("import") {
            let span = self.span();
            self.advance();
            if self.is_kw("static") {
                return self.error("static imports are not supported");
            }
            let mut parts = vec![self.ident()?];
            let mut on_demand = false;
            while self.eat_op(".") {
                if self.eat_op("*") {
                    on_demand = true;
                    break;
                }
                parts.push(self.ident()?);
            }
            self.expect_op(";")?;
            imports.push(Import { name: parts.join("."), on_demand, span });
        }
        let mut types = Vec::new();
        loop {
            if self.eat_op(";") {
                continue;
            }
            if matches!(self.peek(), Tok::Eof) {
                break;
            }
            let mods = self.modifiers()?;
            types.push(self.type_decl(mods, None)?);
        }
        Ok(CompilationUnit { file: self.file.clone(), package, imports, types })
    }

    fn modifiers(&mut self) -> PResult<Modifiers> {
        let mut m = Modifiers::default();
        loop {
            match self.peek() {
                Tok::Keyword(k) if MODIFIER_WORDS.contains(k) => {
                    match *k {
                        "public" => m.public = true,
                        "protected" => m.protected = true,
                        "private" => m.private = true,
                        "static" => m.is_static = true,
                        "final" => m.is_final = true,
                        "abstract" => m.is_abstract = true,
                        _ => {}
                    }
                    self.advance();
                }
                Tok::Op("@") => return self.error("annotations are not supported"),
                _ => return Ok(m),
            }
        }
    }

    /// Parses `class`/`interface` declarations. `local` carries the local
    /// class counter prefix when declared inside a block.
    fn type_decl(&mut self, modifiers: Modifiers, local: Option<String>) -> PResult<TypeDeclAst> {
        let span = self.span();
        let is_interface = if self.eat_kw("class") {
            false
        } else if self.eat_kw("interface") {
            true
        } else {
            return self.unexpected("`class` or `interface`");
        };
        let name = self.ident()?;
        if self.is_op("<") {
            return self.error("generic type declarations are not supported");
        }
        let (path, kind) = match (&local, self.stack.last()) {
            (Some(prefix), _) => (format!("{prefix}{name}"), TypeDeclKind::Local),
            (None, Some(outer)) => (format!("{}${name}", outer.path), if is_interface { TypeDeclKind::Interface } else { TypeDeclKind::Class }),
            (None, None) => (name.clone(), if is_interface { TypeDeclKind::Interface } else { TypeDeclKind::Class }),
        };
        let mut extends = Vec::new();
        let mut implements = Vec::new();
        if self.eat_kw("extends") {
            extends.push(self.type_expr()?);
            while is_interface && self.eat_op(",") {
                extends.push(self.type_expr()?);
            }
        }
        if !is_interface && self.eat_kw("implements") {
            implements.push(self.type_expr()?);
            while self.eat_op(",") {
                implements.push(self.type_expr()?);
            }
        }
        let members = self.class_body(path.clone(), name.clone())?;
        Ok(TypeDeclAst { path, name, kind, is_interface, modifiers, extends, implements, members, span })
    }

    fn class_body(&mut self, path: String, name: String) -> PResult<Vec<MemberAst>> {
        self.expect_op("{")?;
        self.stack.push(TypeCtx { path, name, anon_count: 0, local_count: 0, init_count: 0 });
        let mut members = Vec::new();
        while !self.eat_op("}") {
            if matches!(self.peek(), Tok::Eof) {
                return self.unexpected("`}`");
            }
            if self.eat_op(";") {
                continue;
            }
            members.push(self.member()?);
        }
        self.stack.pop();
        Ok(members)
    }

    fn member(&mut self) -> PResult<MemberAst> {
        let span = self.span();
        if self.is_kw("static") && matches!(self.peek_at(1), Tok::Op("{")) {
            self.advance();
            let body = self.block()?;
            let index = self.next_init_index();
            return Ok(MemberAst::Initializer { is_static: true, body, index, span });
        }
        if self.is_op("{") {
            let body = self.block()?;
            let index = self.next_init_index();
            return Ok(MemberAst::Initializer { is_static: false, body, index, span });
        }
        let modifiers = self.modifiers()?;
        if self.is_kw("class") || self.is_kw("interface") {
            return Ok(MemberAst::Type(self.type_decl(modifiers, None)?));
        }
        if self.is_op("<") {
            return self.error("generic methods are not supported");
        }
        let ctor_name = self.stack.last().map(|c| c.name.clone()).unwrap_or_default();
        if matches!(self.peek(), Tok::Ident(n) if *n == ctor_name) && matches!(self.peek_at(1), Tok::Op("(")) {
            let span = self.span();
            let name = self.ident()?;
            let params = self.params()?;
            self.throws_clause()?;
            let body = Some(self.block()?);
            return Ok(MemberAst::Constructor(MethodAst { modifiers, name, ret: None, params, body, span }));
        }
        let ty = if self.eat_kw("void") {
            TypeExpr { base: TypeBase::Primitive("void".into()), dims: 0, span }
        } else {
            self.type_expr()?
        };
        let name_span = self.span();
        let name = self.ident()?;
        if self.is_op("(") {
            let params = self.params()?;
            let mut extra = 0;
            while self.is_op("[") && matches!(self.peek_at(1), Tok::Op("]")) {
                self.advance();
                self.advance();
                extra += 1;
            }
            self.throws_clause()?;
            let body = if self.eat_op(";") { None } else { Some(self.block()?) };
            let ret = Some(ty.with_extra_dims(extra));
            return Ok(MemberAst::Method(MethodAst { modifiers, name, ret, params, body, span: name_span }));
        }
        let declarators = self.declarators_after_name(ty, name, name_span)?;
        self.expect_op(";")?;
        Ok(MemberAst::Field(FieldAst { modifiers, declarators }))
    }

    fn next_init_index(&mut self) -> usize {
        let ctx = self.stack.last_mut().expect("inside a type body");
        ctx.init_count += 1;
        ctx.init_count
    }

    fn throws_clause(&mut self) -> PResult<()> {
        if self.eat_kw("throws") {
            self.type_expr()?;
            while self.eat_op(",") {
                self.type_expr()?;
            }
        }
        Ok(())
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect_op("(")?;
        let mut out = Vec::new();
        if self.eat_op(")") {
            return Ok(out);
        }
        loop {
            self.modifiers()?;
            let ty = self.type_expr()?;
            if self.is_op("...") {
                return self.error("variable-arity parameters are not supported");
            }
            let span = self.span();
            let name = self.ident()?;
            let extra = self.dims()?;
            out.push(Param { name, ty: ty.with_extra_dims(extra), span });
            if self.eat_op(")") {
                return Ok(out);
            }
            self.expect_op(",")?;
        }
    }

    fn dims(&mut self) -> PResult<usize> {
        let mut n = 0;
        while self.is_op("[") && matches!(self.peek_at(1), Tok::Op("]")) {
            self.advance();
            self.advance();
            n += 1;
        }
        Ok(n)
    }

    fn type_expr(&mut self) -> PResult<TypeExpr> {
        let span = self.span();
        let base = match self.peek().clone() {
            Tok::Keyword(k) if PRIMITIVES.contains(&k) => {
                self.advance();
                TypeBase::Primitive(k.to_string())
            }
            Tok::Ident(_) => TypeBase::Named(self.qualified_name()?),
            _ => return self.unexpected("a type"),
        };
        if self.is_op("<") {
            return self.error("generic types are not supported");
        }
        let dims = self.dims()?;
        Ok(TypeExpr { base, dims, span })
    }

    fn declarators_after_name(&mut self, ty: TypeExpr, first: String, first_span: Span) -> PResult<Vec<VarDeclarator>> {
        let mut out = Vec::new();
        let mut name = first;
        let mut span = first_span;
        loop {
            let extra = self.dims()?;
            let init = if self.eat_op("=") { Some(self.var_init()?) } else { None };
            out.push(VarDeclarator { name, ty: ty.with_extra_dims(extra), init, span });
            if !self.eat_op(",") {
                return Ok(out);
            }
            span = self.span();
            name = self.ident()?;
        }
    }

    fn var_init(&mut self) -> PResult<VarInit> {
        if self.is_op("{") {
            let span = self.span();
            Ok(VarInit::Array(self.array_init()?, span))
        } else {
            Ok(VarInit::Expr(self.expr()?))
        }
    }

    fn array_init(&mut self) -> PResult<Vec<VarInit>> {
        self.expect_op("{")?;
        let mut items = Vec::new();
        while !self.eat_op("}") {
            items.push(self.var_init()?);
            if !self.eat_op(",") {
                self.expect_op("}")?;
                break;
            }
        }
        Ok(items)
    }

    // ---- statements ----

    fn block(&mut self) -> PResult<Block> {
        self.expect_op("{")?;
        let mut out = Vec::new();
        while !self.eat_op("}") {
            if matches!(self.peek(), Tok::Eof) {
                return self.unexpected("`}`");
            }
            out.push(self.block_stmt()?);
        }
        Ok(out)
    }

    fn block_stmt(&mut self) -> PResult<Stmt> {
        if self.is_kw("class") || ((self.is_kw("final") || self.is_kw("abstract")) && matches!(self.peek_at(1), Tok::Keyword("class"))) {
            let modifiers = self.modifiers()?;
            let prefix = {
                let ctx = self.stack.last_mut().expect("inside a type body");
                ctx.local_count += 1;
                format!("{}${}", ctx.path, ctx.local_count)
            };
            return Ok(Stmt::LocalClass(Box::new(self.type_decl(modifiers, Some(prefix))?)));
        }
        if self.is_kw("final") {
            self.advance();
            let decls = self.local_decl()?;
            self.expect_op(";")?;
            return Ok(Stmt::Local(decls));
        }
        if self.looks_like_local_decl()? {
            let decls = self.local_decl()?;
            if self.is_op(":") {
                return self.error("enhanced for loops are not supported");
            }
            self.expect_op(";")?;
            return Ok(Stmt::Local(decls));
        }
        self.stmt()
    }

    /// Speculatively checks for `Type name` at the current position.
    fn looks_like_local_decl(&mut self) -> PResult<bool> {
        let save = self.pos;
        let result = (|| -> PResult<bool> {
            match self.peek().clone() {
                Tok::Keyword(k) if PRIMITIVES.contains(&k) => {
                    self.advance();
                }
                Tok::Ident(_) => {
                    self.qualified_name()?;
                    if self.is_op("<") && matches!(self.peek_at(1), Tok::Ident(_)) {
                        // `a < b` cannot start a statement; only a generic type can.
                        if matches!(self.peek_at(2), Tok::Op(">") | Tok::Op(",") | Tok::Op("<")) {
                            return self.error("generic types are not supported");
                        }
                    }
                }
                _ => return Ok(false),
            }
            self.dims()?;
            Ok(matches!(self.peek(), Tok::Ident(_)))
        })();
        self.pos = save;
        match result {
            Ok(b) => Ok(b),
            Err(e) if e.message.contains("not supported") => Err(e),
            Err(_) => Ok(false),
        }
    }

    fn local_decl(&mut self) -> PResult<Vec<VarDeclarator>> {
        let ty = self.type_expr()?;
        let span = self.span();
        let name = self.ident()?;
        if self.is_op(":") {
            return self.error("enhanced for loops are not supported");
        }
        self.declarators_after_name(ty, name, span)
    }

    fn paren_expr(&mut self) -> PResult<Expr> {
        self.expect_op("(")?;
        let e = self.expr()?;
        self.expect_op(")")?;
        Ok(e)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        match self.peek().clone() {
            Tok::Op("{") => Ok(Stmt::Block(self.block()?)),
            Tok::Op(";") => {
                self.advance();
                Ok(Stmt::Empty)
            }
            Tok::Keyword("if") => {
                self.advance();
                let cond = self.paren_expr()?;
                let then = Box::new(self.block_stmt()?);
                let otherwise = if self.eat_kw("else") { Some(Box::new(self.block_stmt()?)) } else { None };
                Ok(Stmt::If { cond, then, otherwise })
            }
            Tok::Keyword("while") => {
                self.advance();
                let cond = self.paren_expr()?;
                let body = Box::new(self.block_stmt()?);
                Ok(Stmt::While { cond, body })
            }
            Tok::Keyword("do") => {
                self.advance();
                let body = Box::new(self.block_stmt()?);
                self.expect_kw("while")?;
                let cond = self.paren_expr()?;
                self.expect_op(";")?;
                Ok(Stmt::DoWhile { body, cond })
            }
            Tok::Keyword("for") => self.for_stmt(),
            Tok::Keyword("switch") => self.switch_stmt(),
            Tok::Keyword("try") => {
                self.advance();
                if self.is_op("(") {
                    return self.error("try-with-resources is not supported");
                }
                let body = self.block()?;
                let mut catches = Vec::new();
                while self.eat_kw("catch") {
                    self.expect_op("(")?;
                    self.modifiers()?;
                    let ty = self.type_expr()?;
                    if self.is_op("|") {
                        return self.error("multi-catch is not supported");
                    }
                    let span = self.span();
                    let name = self.ident()?;
                    self.expect_op(")")?;
                    let block = self.block()?;
                    catches.push((Param { name, ty, span }, block));
                }
                let finally = if self.eat_kw("finally") { Some(self.block()?) } else { None };
                if catches.is_empty() && finally.is_none() {
                    return self.unexpected("`catch` or `finally`");
                }
                Ok(Stmt::Try { body, catches, finally })
            }
            Tok::Keyword("return") => {
                self.advance();
                let value = if self.is_op(";") { None } else { Some(self.expr()?) };
                self.expect_op(";")?;
                Ok(Stmt::Return(value))
            }
            Tok::Keyword("break") | Tok::Keyword("continue") => {
                let is_break = self.is_kw("break");
                self.advance();
                if matches!(self.peek(), Tok::Ident(_)) {
                    self.advance();
                }
                self.expect_op(";")?;
                Ok(if is_break { Stmt::Break } else { Stmt::Continue })
            }
            Tok::Keyword("throw") => {
                self.advance();
                let e = self.expr()?;
                self.expect_op(";")?;
                Ok(Stmt::Throw(e))
            }
            Tok::Keyword("synchronized") => {
                self.advance();
                let lock = self.paren_expr()?;
                let body = self.block()?;
                Ok(Stmt::Synchronized { lock, body })
            }
            Tok::Keyword("this") | Tok::Keyword("super") if matches!(self.peek_at(1), Tok::Op("(")) => {
                self.advance();
                let args = self.args()?;
                self.expect_op(";")?;
                Ok(Stmt::CtorCall { args })
            }
            Tok::Ident(_) if matches!(self.peek_at(1), Tok::Op(":")) => {
                self.advance();
                self.advance();
                Ok(Stmt::Labeled(Box::new(self.block_stmt()?)))
            }
            Tok::Keyword("enum") => self.error("enum declarations are not supported"),
            Tok::Ident(ref w) if w == "assert" && !matches!(self.peek_at(1), Tok::Op("=") | Tok::Op("(") | Tok::Op(".")) => {
                self.error("assert statements are not supported")
            }
            _ => {
                let e = self.expr()?;
                self.expect_op(";")?;
                Ok(Stmt::Expr(e))
            }
        }
    }

    fn for_stmt(&mut self) -> PResult<Stmt> {
        self.advance();
        self.expect_op("(")?;
        let mut init = Vec::new();
        if !self.is_op(";") {
            if self.is_kw("final") {
                self.advance();
                init.push(Stmt::Local(self.local_decl()?));
            } else if self.looks_like_local_decl()? {
                init.push(Stmt::Local(self.local_decl()?));
            } else {
                init.push(Stmt::Expr(self.expr()?));
                while self.eat_op(",") {
                    init.push(Stmt::Expr(self.expr()?));
                }
            }
        }
        if self.is_op(":") {
            return self.error("enhanced for loops are not supported");
        }
        self.expect_op(";")?;
        let cond = if self.is_op(";") { None } else { Some(self.expr()?) };
        self.expect_op(";")?;
        let mut update = Vec::new();
        if !self.is_op(")") {
            update.push(self.expr()?);
            while self.eat_op(",") {
                update.push(self.expr()?);
            }
        }
        self.expect_op(")")?;
        let body = Box::new(self.block_stmt()?);
        Ok(Stmt::For { init, cond, update, body })
    }

    fn switch_stmt(&mut self) -> PResult<Stmt> {
        self.advance();
        let selector = self.paren_expr()?;
        self.expect_op("{")?;
        let mut groups: Vec<SwitchGroup> = Vec::new();
        while !self.eat_op("}") {
            let mut labels = Vec::new();
            loop {
                if self.eat_kw("case") {
                    labels.push(Some(self.expr()?));
                    if self.is_op("->") {
                        return self.error("switch rules are not supported");
                    }
                    self.expect_op(":")?;
                } else if self.eat_kw("default") {
                    labels.push(None);
                    self.expect_op(":")?;
                } else {
                    break;
                }
            }
            if labels.is_empty() {
                return self.unexpected("`case`, `default` or `}`");
            }
            let mut body = Vec::new();
            while !self.is_kw("case") && !self.is_kw("default") && !self.is_op("}") {
                if matches!(self.peek(), Tok::Eof) {
                    return self.unexpected("`}`");
                }
                body.push(self.block_stmt()?);
            }
            groups.push(SwitchGroup { labels, body });
        }
        Ok(Stmt::Switch { selector, groups })
    }

    // ---- expressions ----

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_op("(")?;
        let mut out = Vec::new();
        if self.eat_op(")") {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if self.eat_op(")") {
                return Ok(out);
            }
            self.expect_op(",")?;
        }
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.conditional()?;
        if let Tok::Op(op) = self.peek().clone() {
            if ASSIGN_OPS.contains(&op) {
                let span = self.span();
                self.advance();
                let rhs = self.expr()?;
                return Ok(Expr { kind: ExprKind::Assign { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span });
            }
            if op == "->" {
                return self.error("lambda expressions are not supported");
            }
        }
        Ok(lhs)
    }

    fn conditional(&mut self) -> PResult<Expr> {
        let cond = self.binary(0)?;
        if self.is_op("?") {
            let span = self.span();
            self.advance();
            let then = self.expr()?;
            self.expect_op(":")?;
            let otherwise = self.conditional()?;
            return Ok(Expr {
                kind: ExprKind::Conditional { cond: Box::new(cond), then: Box::new(then), otherwise: Box::new(otherwise) },
                span,
            });
        }
        Ok(cond)
    }

    fn binary(&mut self, level: usize) -> PResult<Expr> {
        const LEVELS: &[&[&str]] = &[
            &["||"],
            &["&&"],
            &["|"],
            &["^"],
            &["&"],
            &["==", "!="],
            &["<", ">", "<=", ">=", "instanceof"],
            &["<<", ">>", ">>>"],
            &["+", "-"],
            &["*", "/", "%"],
        ];
        if level == LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        loop {
            let span = self.span();
            if level == 6 && self.is_kw("instanceof") {
                self.advance();
                let ty = self.type_expr()?;
                lhs = Expr { kind: ExprKind::InstanceOf { expr: Box::new(lhs), ty }, span };
                continue;
            }
            let op = match self.peek() {
                Tok::Op(op) if LEVELS[level].contains(op) => *op,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.binary(level + 1)?;
            lhs = Expr { kind: ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span };
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Op(op @ ("++" | "--")) => {
                self.advance();
                let e = self.unary()?;
                Ok(Expr { kind: ExprKind::IncDec { op, expr: Box::new(e) }, span })
            }
            Tok::Op(op @ ("+" | "-" | "!" | "~")) => {
                self.advance();
                let e = self.unary()?;
                Ok(Expr { kind: ExprKind::Unary { op, expr: Box::new(e) }, span })
            }
            Tok::Op("(") => {
                if let Some(ty) = self.try_cast_type()? {
                    let e = self.unary()?;
                    return Ok(Expr { kind: ExprKind::Cast { ty, expr: Box::new(e) }, span });
                }
                self.postfix_expr()
            }
            _ => self.postfix_expr(),
        }
    }

    /// Recognizes `(Type)` when followed by a cast operand; consumes it on success.
    fn try_cast_type(&mut self) -> PResult<Option<TypeExpr>> {
        let save = self.pos;
        self.advance();
        match self.peek().clone() {
            Tok::Keyword(k) if PRIMITIVES.contains(&k) => {
                let ty = self.type_expr()?;
                if self.eat_op(")") {
                    return Ok(Some(ty));
                }
                self.pos = save;
                Ok(None)
            }
            Tok::Ident(_) => {
                let parsed = self.type_expr();
                let ok = match parsed {
                    Ok(ty) if self.is_op(")") => {
                        let next = self.peek_at(1);
                        let operand = match next {
                            Tok::Ident(_) | Tok::Int(_) | Tok::Long(_) | Tok::Float(_) | Tok::Double(_) | Tok::Char(_) | Tok::Str(_) => true,
                            Tok::Keyword(k) => matches!(*k, "this" | "super" | "new" | "true" | "false" | "null") || PRIMITIVES.contains(k),
                            Tok::Op(o) => matches!(*o, "(" | "!" | "~"),
                            Tok::Eof => false,
                        };
                        if operand {
                            Some(ty)
                        } else {
                            None
                        }
                    }
                    Err(e) if e.message.contains("not supported") => return Err(e),
                    _ => None,
                };
                match ok {
                    Some(ty) => {
                        self.advance();
                        Ok(Some(ty))
                    }
                    None => {
                        self.pos = save;
                        Ok(None)
                    }
                }
            }
            _ => {
                self.pos = save;
                Ok(None)
            }
        }
    }

    fn postfix_expr(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            let span = self.span();
            if self.is_op(".") {
                self.advance();
                match self.peek().clone() {
                    Tok::Ident(name) => {
                        let seg_span = self.span();
                        self.advance();
                        let seg = NameSeg { name, span: seg_span };
                        if self.is_op("(") {
                            let args = self.args()?;
                            e = Expr { span: seg_span, kind: ExprKind::Call { target: Some(Box::new(e)), name: seg, args } };
                        } else if let ExprKind::Name(segs) = &mut e.kind {
                            segs.push(seg);
                        } else {
                            e = Expr { span: seg_span, kind: ExprKind::Field { target: Box::new(e), name: seg } };
                        }
                    }
                    Tok::Keyword("this") => {
                        self.advance();
                        let ExprKind::Name(segs) = &e.kind else {
                            return self.error_at(span, "`.this` must follow a type name");
                        };
                        let names = segs.iter().map(|s| s.name.clone()).collect();
                        e = Expr { span: e.span, kind: ExprKind::QualifiedThis(names) };
                    }
                    Tok::Keyword("class") => {
                        self.advance();
                        let ExprKind::Name(segs) = &e.kind else {
                            return self.error_at(span, "`.class` must follow a type name");
                        };
                        let ty = TypeExpr { base: TypeBase::Named(segs.iter().map(|s| s.name.clone()).collect()), dims: 0, span: e.span };
                        e = Expr { span: e.span, kind: ExprKind::ClassLit(ty) };
                    }
                    Tok::Keyword("new") => return self.error("qualified inner class creation is not supported"),
                    Tok::Op("<") => return self.error("explicit generic method arguments are not supported"),
                    _ => return self.unexpected("a member name"),
                }
                continue;
            }
            if self.is_op("[") {
                if matches!(self.peek_at(1), Tok::Op("]")) {
                    // `Name[].class`
                    let ExprKind::Name(segs) = &e.kind else {
                        return self.unexpected("an index expression");
                    };
                    let names: Vec<String> = segs.iter().map(|s| s.name.clone()).collect();
                    let dims = self.dims()?;
                    self.expect_op(".")?;
                    self.expect_kw("class")?;
                    let ty = TypeExpr { base: TypeBase::Named(names), dims, span: e.span };
                    e = Expr { span: e.span, kind: ExprKind::ClassLit(ty) };
                    continue;
                }
                self.advance();
                let index = self.expr()?;
                self.expect_op("]")?;
                e = Expr { span, kind: ExprKind::Index { array: Box::new(e), index: Box::new(index) } };
                continue;
            }
            if let Tok::Op(op @ ("++" | "--")) = self.peek().clone() {
                self.advance();
                e = Expr { span, kind: ExprKind::IncDec { op, expr: Box::new(e) } };
                continue;
            }
            if self.is_op("::") {
                return self.error("method references are not supported");
            }
            return Ok(e);
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let span = self.span();
        let lit = |kind| Ok(Expr { kind: ExprKind::Literal(kind), span });
        match self.peek().clone() {
            Tok::Int(_) => {
                self.advance();
                lit(Literal::Int)
            }
            Tok::Long(_) => {
                self.advance();
                lit(Literal::Long)
            }
            Tok::Float(_) => {
                self.advance();
                lit(Literal::Float)
            }
            Tok::Double(_) => {
                self.advance();
                lit(Literal::Double)
            }
            Tok::Char(_) => {
                self.advance();
                lit(Literal::Char)
            }
            Tok::Str(_) => {
                self.advance();
                lit(Literal::Str)
            }
            Tok::Keyword("true") | Tok::Keyword("false") => {
                self.advance();
                lit(Literal::Bool)
            }
            Tok::Keyword("null") => {
                self.advance();
                lit(Literal::Null)
            }
            Tok::Keyword("this") => {
                self.advance();
                Ok(Expr { kind: ExprKind::This, span })
            }
            Tok::Keyword("super") => {
                self.advance();
                self.expect_op(".")?;
                let seg_span = self.span();
                let name = NameSeg { name: self.ident()?, span: seg_span };
                if self.is_op("(") {
                    let args = self.args()?;
                    Ok(Expr { kind: ExprKind::SuperCall { name, args }, span: seg_span })
                } else {
                    Ok(Expr { kind: ExprKind::SuperField { name }, span: seg_span })
                }
            }
            Tok::Keyword("new") => self.creator(),
            Tok::Op("(") => {
                self.advance();
                let inner = self.expr()?;
                self.expect_op(")")?;
                if self.is_op("->") {
                    return self.error("lambda expressions are not supported");
                }
                Ok(Expr { kind: ExprKind::Paren(Box::new(inner)), span })
            }
            Tok::Keyword(k) if PRIMITIVES.contains(&k) || k == "void" => {
                self.advance();
                let dims = self.dims()?;
                self.expect_op(".")?;
                self.expect_kw("class")?;
                Ok(Expr { kind: ExprKind::ClassLit(TypeExpr { base: TypeBase::Primitive(k.to_string()), dims, span }), span })
            }
            Tok::Ident(name) => {
                self.advance();
                let seg = NameSeg { name, span };
                if self.is_op("(") {
                    let args = self.args()?;
                    return Ok(Expr { kind: ExprKind::Call { target: None, name: seg, args }, span });
                }
                if self.is_op("->") {
                    return self.error("lambda expressions are not supported");
                }
                Ok(Expr { kind: ExprKind::Name(vec![seg]), span })
            }
            Tok::Op("@") => self.error("annotations are not supported"),
            _ => self.unexpected("an expression"),
        }
    }

    fn creator(&mut self) -> PResult<Expr> {
        let span = self.span();
        self.advance();
        let type_span = self.span();
        let base = match self.peek().clone() {
            Tok::Keyword(k) if PRIMITIVES.contains(&k) => {
                self.advance();
                TypeBase::Primitive(k.to_string())
            }
            Tok::Ident(_) => TypeBase::Named(self.qualified_name()?),
            _ => return self.unexpected("a type after `new`"),
        };
        if self.is_op("<") {
            return self.error("generic types are not supported");
        }
        if self.is_op("[") {
            let mut dims = Vec::new();
            let mut total = 0;
            while self.is_op("[") {
                self.advance();
                if self.eat_op("]") {
                    total += 1;
                    continue;
                }
                dims.push(self.expr()?);
                self.expect_op("]")?;
                total += 1;
            }
            let init = if self.is_op("{") { Some(self.array_init()?) } else { None };
            let ty = TypeExpr { base, dims: total, span: type_span };
            return Ok(Expr { kind: ExprKind::NewArray { ty, dims, init }, span });
        }
        let ty = TypeExpr { base, dims: 0, span: type_span };
        let args = self.args()?;
        let body = if self.is_op("{") {
            let outer = self.stack.last_mut().expect("inside a type body");
            outer.anon_count += 1;
            let name = format!("anon{}", outer.anon_count);
            let path = format!("{}${name}", outer.path);
            let members = self.class_body(path.clone(), name.clone())?;
            Some(Box::new(TypeDeclAst {
                path,
                name,
                kind: TypeDeclKind::Anonymous,
                is_interface: false,
                modifiers: Modifiers::default(),
                extends: vec![ty.clone()],
                implements: Vec::new(),
                members,
                span,
            }))
        } else {
            None
        };
        Ok(Expr { kind: ExprKind::New { ty, args, body }, span })
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Keyword(k) => format!("`{k}`"),
        Tok::Op(o) => format!("`{o}`"),
        Tok::Str(_) => "string literal".into(),
        Tok::Char(_) => "character literal".into(),
        Tok::Int(s) | Tok::Long(s) | Tok::Float(s) | Tok::Double(s) => format!("number `{s}`"),
        Tok::Eof => "end of file".into(),
    }
}
