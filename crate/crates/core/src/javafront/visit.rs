use super::ast::*;

/// Calls `f` on `decl` and every type declared inside it (member, local and
/// anonymous classes), in source order.
pub fn for_each_nested_type<'a>(decl: &'a TypeDeclAst, f: &mut dyn FnMut(&'a TypeDeclAst)) {
    f(decl);
    for m in &decl.members {
        match m {
            MemberAst::Type(t) => for_each_nested_type(t, f),
            MemberAst::Field(field) => {
                for d in &field.declarators {
                    if let Some(init) = &d.init {
                        init_types(init, f);
                    }
                }
            }
            MemberAst::Method(m) | MemberAst::Constructor(m) => {
                if let Some(body) = &m.body {
                    block_types(body, f);
                }
            }
            MemberAst::Initializer { body, .. } => block_types(body, f),
        }
    }
}

fn init_types<'a>(init: &'a VarInit, f: &mut dyn FnMut(&'a TypeDeclAst)) {
    match init {
        VarInit::Expr(e) => expr_types(e, f),
        VarInit::Array(items, _) => items.iter().for_each(|i| init_types(i, f)),
    }
}

fn block_types<'a>(block: &'a [Stmt], f: &mut dyn FnMut(&'a TypeDeclAst)) {
    for s in block {
        stmt_types(s, f);
    }
}

fn stmt_types<'a>(stmt: &'a Stmt, f: &mut dyn FnMut(&'a TypeDeclAst)) {
    match stmt {
        Stmt::Block(b) => block_types(b, f),
        Stmt::Local(decls) => {
            for d in decls {
                if let Some(init) = &d.init {
                    init_types(init, f);
                }
            }
        }
        Stmt::LocalClass(t) => for_each_nested_type(t, f),
        Stmt::Expr(e) | Stmt::Throw(e) => expr_types(e, f),
        Stmt::If { cond, then, otherwise } => {
            expr_types(cond, f);
            stmt_types(then, f);
            if let Some(o) = otherwise {
                stmt_types(o, f);
            }
        }
        Stmt::While { cond, body } | Stmt::DoWhile { body, cond } => {
            expr_types(cond, f);
            stmt_types(body, f);
        }
        Stmt::For { init, cond, update, body } => {
            block_types(init, f);
            if let Some(c) = cond {
                expr_types(c, f);
            }
            update.iter().for_each(|e| expr_types(e, f));
            stmt_types(body, f);
        }
        Stmt::Switch { selector, groups } => {
            expr_types(selector, f);
            for g in groups {
                g.labels.iter().flatten().for_each(|e| expr_types(e, f));
                block_types(&g.body, f);
            }
        }
        Stmt::Try { body, catches, finally } => {
            block_types(body, f);
            catches.iter().for_each(|(_, b)| block_types(b, f));
            if let Some(b) = finally {
                block_types(b, f);
            }
        }
        Stmt::Return(e) => {
            if let Some(e) = e {
                expr_types(e, f);
            }
        }
        Stmt::Synchronized { lock, body } => {
            expr_types(lock, f);
            block_types(body, f);
        }
        Stmt::Labeled(s) => stmt_types(s, f),
        Stmt::CtorCall { args } => args.iter().for_each(|e| expr_types(e, f)),
        Stmt::Break | Stmt::Continue | Stmt::Empty => {}
    }
}

fn expr_types<'a>(expr: &'a Expr, f: &mut dyn FnMut(&'a TypeDeclAst)) {
    match &expr.kind {
        ExprKind::Field { target, .. } => expr_types(target, f),
        ExprKind::Call { target, args, .. } => {
            if let Some(t) = target {
                expr_types(t, f);
            }
            args.iter().for_each(|e| expr_types(e, f));
        }
        ExprKind::SuperCall { args, .. } => args.iter().for_each(|e| expr_types(e, f)),
        ExprKind::New { args, body, .. } => {
            args.iter().for_each(|e| expr_types(e, f));
            if let Some(b) = body {
                for_each_nested_type(b, f);
            }
        }
        ExprKind::NewArray { dims, init, .. } => {
            dims.iter().for_each(|e| expr_types(e, f));
            if let Some(items) = init {
                items.iter().for_each(|i| init_types(i, f));
            }
        }
        ExprKind::Index { array, index } => {
            expr_types(array, f);
            expr_types(index, f);
        }
        ExprKind::Cast { expr, .. }
        | ExprKind::Unary { expr, .. }
        | ExprKind::IncDec { expr, .. }
        | ExprKind::InstanceOf { expr, .. }
        | ExprKind::Paren(expr) => expr_types(expr, f),
        ExprKind::Binary { lhs, rhs, .. } | ExprKind::Assign { lhs, rhs, .. } => {
            expr_types(lhs, f);
            expr_types(rhs, f);
        }
        ExprKind::Conditional { cond, then, otherwise } => {
            expr_types(cond, f);
            expr_types(then, f);
            expr_types(otherwise, f);
        }
        ExprKind::Literal(_)
        | ExprKind::Name(_)
        | ExprKind::This
        | ExprKind::QualifiedThis(_)
        | ExprKind::SuperField { .. }
        | ExprKind::ClassLit(_) => {}
    }
}
