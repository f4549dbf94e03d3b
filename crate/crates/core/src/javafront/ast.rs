use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Modifiers {
    pub public: bool,
    pub protected: bool,
    pub private: bool,
    pub is_static: bool,
    pub is_final: bool,
    pub is_abstract: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeBase {
    Primitive(String),
    /// Dotted name as written, e.g. `java.net.URL` or `Map.Entry`.
    Named(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypeExpr {
    pub base: TypeBase,
    pub dims: usize,
    pub span: Span,
}

impl TypeExpr {
    pub fn with_extra_dims(&self, extra: usize) -> TypeExpr {
        TypeExpr { base: self.base.clone(), dims: self.dims + extra, span: self.span }
    }
}

#[derive(Clone, Debug)]
pub struct CompilationUnit {
    pub file: String,
    pub package: Option<String>,
    pub imports: Vec<Import>,
    pub types: Vec<TypeDeclAst>,
}

#[derive(Clone, Debug)]
pub struct Import {
    pub name: String,
    pub on_demand: bool,
    pub span: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeDeclKind {
    Class,
    Interface,
    Anonymous,
    Local,
}

#[derive(Clone, Debug)]
pub struct TypeDeclAst {
    /// Binary-style path within the unit, e.g. `JavaDrawApp$anon1`.
    pub path: String,
    /// Name as written (the generated path segment for anonymous classes).
    pub name: String,
    pub kind: TypeDeclKind,
    pub is_interface: bool,
    pub modifiers: Modifiers,
    pub extends: Vec<TypeExpr>,
    pub implements: Vec<TypeExpr>,
    pub members: Vec<MemberAst>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum MemberAst {
    Field(FieldAst),
    Method(MethodAst),
    Constructor(MethodAst),
    Initializer { is_static: bool, body: Block, index: usize, span: Span },
    Type(TypeDeclAst),
}

#[derive(Clone, Debug)]
pub struct FieldAst {
    pub modifiers: Modifiers,
    pub declarators: Vec<VarDeclarator>,
}

#[derive(Clone, Debug)]
pub struct VarDeclarator {
    pub name: String,
    pub ty: TypeExpr,
    pub init: Option<VarInit>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum VarInit {
    Expr(Expr),
    Array(Vec<VarInit>, Span),
}

#[derive(Clone, Debug)]
pub struct Param {
    pub name: String,
    pub ty: TypeExpr,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct MethodAst {
    pub modifiers: Modifiers,
    pub name: String,
    /// `None` for constructors.
    pub ret: Option<TypeExpr>,
    pub params: Vec<Param>,
    pub body: Option<Block>,
    pub span: Span,
}

pub type Block = Vec<Stmt>;

#[derive(Clone, Debug)]
pub enum Stmt {
    Block(Block),
    Local(Vec<VarDeclarator>),
    LocalClass(Box<TypeDeclAst>),
    Expr(Expr),
    If { cond: Expr, then: Box<Stmt>, otherwise: Option<Box<Stmt>> },
    While { cond: Expr, body: Box<Stmt> },
    DoWhile { body: Box<Stmt>, cond: Expr },
    For { init: Vec<Stmt>, cond: Option<Expr>, update: Vec<Expr>, body: Box<Stmt> },
    Switch { selector: Expr, groups: Vec<SwitchGroup> },
    Try { body: Block, catches: Vec<(Param, Block)>, finally: Option<Block> },
    Return(Option<Expr>),
    Break,
    Continue,
    Throw(Expr),
    Synchronized { lock: Expr, body: Block },
    Labeled(Box<Stmt>),
    /// Explicit `this(...)` or `super(...)` constructor invocation.
    CtorCall { args: Vec<Expr> },
    Empty,
}

#[derive(Clone, Debug)]
pub struct SwitchGroup {
    /// `None` marks `default`.
    pub labels: Vec<Option<Expr>>,
    pub body: Vec<Stmt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Literal {
    Int,
    Long,
    Float,
    Double,
    Char,
    Str,
    Bool,
    Null,
}

#[derive(Clone, Debug)]
pub struct NameSeg {
    pub name: String,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    Literal(Literal),
    /// Ambiguous dotted name, classified during binding.
    Name(Vec<NameSeg>),
    This,
    /// `Outer.this`
    QualifiedThis(Vec<String>),
    Field { target: Box<Expr>, name: NameSeg },
    SuperField { name: NameSeg },
    Call { target: Option<Box<Expr>>, name: NameSeg, args: Vec<Expr> },
    SuperCall { name: NameSeg, args: Vec<Expr> },
    New { ty: TypeExpr, args: Vec<Expr>, body: Option<Box<TypeDeclAst>> },
    NewArray { ty: TypeExpr, dims: Vec<Expr>, init: Option<Vec<VarInit>> },
    Index { array: Box<Expr>, index: Box<Expr> },
    Cast { ty: TypeExpr, expr: Box<Expr> },
    Unary { op: &'static str, expr: Box<Expr> },
    IncDec { op: &'static str, expr: Box<Expr> },
    Binary { op: &'static str, lhs: Box<Expr>, rhs: Box<Expr> },
    InstanceOf { expr: Box<Expr>, ty: TypeExpr },
    Conditional { cond: Box<Expr>, then: Box<Expr>, otherwise: Box<Expr> },
    Assign { op: &'static str, lhs: Box<Expr>, rhs: Box<Expr> },
    Paren(Box<Expr>),
    ClassLit(TypeExpr),
}

impl Expr {
    /// Strips redundant parentheses.
    pub fn unparen(&self) -> &Expr {
        match &self.kind {
            ExprKind::Paren(inner) => inner.unparen(),
            _ => self,
        }
    }
}
