use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ArithOp {
    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
            ArithOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn apply(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }
}

/// A transition guard. Identifiers are kept as names and resolved against a net when
/// type checking or evaluating.
#[derive(Debug, Clone, PartialEq)]
pub enum CondExpr {
    Bool(bool),
    Num(f64),
    /// A bare place, base or type name. Only meaningful as a host-function argument.
    Ident(String),
    /// `val(a)`: the value assigned to base `a`.
    Val(String),
    /// `in(a, x)`: base `a` is currently in place `x`.
    In {
        base: String,
        place: String,
    },
    /// `bonded(a, b, x)`: bond `a~b` is currently in place `x`.
    Bonded {
        a: String,
        b: String,
        place: String,
    },
    /// `tokens_in(x, ty)`: bases of type `ty` in place `x`, lexicographic by id.
    TokensIn {
        place: String,
        ty: String,
    },
    Not(Box<CondExpr>),
    And(Box<CondExpr>, Box<CondExpr>),
    Or(Box<CondExpr>, Box<CondExpr>),
    Arith {
        op: ArithOp,
        lhs: Box<CondExpr>,
        rhs: Box<CondExpr>,
    },
    Compare {
        op: CmpOp,
        lhs: Box<CondExpr>,
        rhs: Box<CondExpr>,
    },
    Call {
        name: String,
        args: Vec<CondExpr>,
    },
}

impl CondExpr {
    pub fn negate(e: CondExpr) -> Self {
        CondExpr::Not(Box::new(e))
    }

    pub fn and(l: CondExpr, r: CondExpr) -> Self {
        CondExpr::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: CondExpr, r: CondExpr) -> Self {
        CondExpr::Or(Box::new(l), Box::new(r))
    }

    pub fn arith(op: ArithOp, lhs: CondExpr, rhs: CondExpr) -> Self {
        CondExpr::Arith {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn compare(op: CmpOp, lhs: CondExpr, rhs: CondExpr) -> Self {
        CondExpr::Compare {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn call(name: impl Into<String>, args: Vec<CondExpr>) -> Self {
        CondExpr::Call {
            name: name.into(),
            args,
        }
    }

    pub fn ident(name: impl Into<String>) -> Self {
        CondExpr::Ident(name.into())
    }

    // Binding strength, loosest first: or, and, not, comparison, sum, product, atom.
    fn level(&self) -> u8 {
        match self {
            CondExpr::Or(..) => 1,
            CondExpr::And(..) => 2,
            CondExpr::Not(..) => 3,
            CondExpr::Compare { .. } => 4,
            CondExpr::Arith {
                op: ArithOp::Add | ArithOp::Sub,
                ..
            } => 5,
            CondExpr::Arith { .. } => 6,
            _ => 7,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_level: u8) -> fmt::Result {
        if self.level() < min_level {
            f.write_str("(")?;
            self.write_at(f, 1)?;
            return f.write_str(")");
        }
        match self {
            CondExpr::Bool(b) => write!(f, "{b}"),
            CondExpr::Num(n) => write!(f, "{n}"),
            CondExpr::Ident(name) => f.write_str(name),
            CondExpr::Val(base) => write!(f, "val({base})"),
            CondExpr::In { base, place } => write!(f, "in({base}, {place})"),
            CondExpr::Bonded { a, b, place } => write!(f, "bonded({a}, {b}, {place})"),
            CondExpr::TokensIn { place, ty } => write!(f, "tokens_in({place}, {ty})"),
            CondExpr::Not(e) => {
                f.write_str("not ")?;
                e.write_at(f, 4)
            }
            CondExpr::Or(l, r) => {
                l.write_at(f, 1)?;
                f.write_str(" or ")?;
                r.write_at(f, 2)
            }
            CondExpr::And(l, r) => {
                l.write_at(f, 2)?;
                f.write_str(" and ")?;
                r.write_at(f, 3)
            }
            CondExpr::Compare { op, lhs, rhs } => {
                lhs.write_at(f, 5)?;
                write!(f, " {} ", op.symbol())?;
                rhs.write_at(f, 5)
            }
            CondExpr::Arith { op, lhs, rhs } => {
                let level = self.level();
                lhs.write_at(f, level)?;
                write!(f, " {} ", op.symbol())?;
                rhs.write_at(f, level + 1)
            }
            CondExpr::Call { name, args } => {
                write!(f, "{name}(")?;
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    arg.write_at(f, 1)?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Canonical concrete syntax with minimal parentheses.
impl fmt::Display for CondExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 1)
    }
}
