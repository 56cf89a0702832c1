use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::ast::{ArithOp, CondExpr};
use super::check::Kind;
use crate::model::{BaseId, Bond, Marking, Net, PlaceId, TokenValue, TypeId};

/// Runtime value of a guard sub-expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Bool(bool),
    Real(f64),
    Unit,
    Vector(Vec<f64>),
    Base(BaseId),
    Place(PlaceId),
    Type(TypeId),
    BaseList(Vec<BaseId>),
}

impl Value {
    pub fn kind(&self) -> Kind {
        match self {
            Value::Bool(_) => Kind::Bool,
            Value::Real(_) => Kind::Real,
            Value::Unit => Kind::Unit,
            Value::Vector(v) => Kind::Vector(v.len()),
            Value::Base(_) => Kind::Base,
            Value::Place(_) => Kind::Place,
            Value::Type(_) => Kind::Type,
            Value::BaseList(_) => Kind::BaseList,
        }
    }
}

impl From<&TokenValue> for Value {
    fn from(v: &TokenValue) -> Self {
        match v {
            TokenValue::Unit => Value::Unit,
            TokenValue::Bool(b) => Value::Bool(*b),
            TokenValue::Real(r) => Value::Real(*r),
            TokenValue::Vector(v) => Value::Vector(v.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no host function named `{0}` is registered")]
    MissingHostFunction(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("expected a {expected} value, found {found}")]
    KindMismatch { expected: Kind, found: Kind },
    #[error("host function `{name}` failed: {message}")]
    Host { name: String, message: String },
}

/// What a guard may observe: the static net (including the value assignment) and the
/// current marking. The history is deliberately absent.
#[derive(Clone, Copy)]
pub struct EvalContext<'a> {
    pub net: &'a Net,
    pub marking: &'a Marking,
}

pub type HostCallback = dyn Fn(&EvalContext<'_>, &[Value]) -> Result<Value, String> + Send + Sync;

/// A function callable from guard text, supplied by the embedding application.
#[derive(Clone)]
pub struct HostFunction {
    pub name: String,
    pub params: Vec<Kind>,
    pub result: Kind,
    callback: Arc<HostCallback>,
}

impl HostFunction {
    pub fn new<F>(name: impl Into<String>, params: Vec<Kind>, result: Kind, callback: F) -> Self
    where
        F: Fn(&EvalContext<'_>, &[Value]) -> Result<Value, String> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            params,
            result,
            callback: Arc::new(callback),
        }
    }
}

impl fmt::Debug for HostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HostFunction")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("result", &self.result)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Default)]
pub struct HostRegistry {
    functions: BTreeMap<String, HostFunction>,
}

impl HostRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `f`, replacing any function with the same name.
    pub fn register(&mut self, f: HostFunction) {
        self.functions.insert(f.name.clone(), f);
    }

    pub fn get(&self, name: &str) -> Option<&HostFunction> {
        self.functions.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.functions.keys().map(String::as_str)
    }
}

fn real(v: Value) -> Result<f64, EvalError> {
    match v {
        Value::Real(r) => Ok(r),
        other => Err(EvalError::KindMismatch {
            expected: Kind::Real,
            found: other.kind(),
        }),
    }
}

fn boolean(v: Value) -> Result<bool, EvalError> {
    match v {
        Value::Bool(b) => Ok(b),
        other => Err(EvalError::KindMismatch {
            expected: Kind::Bool,
            found: other.kind(),
        }),
    }
}

fn base(net: &Net, name: &str) -> Result<BaseId, EvalError> {
    net.base_id(name)
        .ok_or_else(|| EvalError::UnknownIdentifier(name.to_owned()))
}

fn place(net: &Net, name: &str) -> Result<PlaceId, EvalError> {
    net.place_id(name)
        .ok_or_else(|| EvalError::UnknownIdentifier(name.to_owned()))
}

fn reference(net: &Net, name: &str, kind: Kind) -> Result<Value, EvalError> {
    match kind {
        Kind::Base => base(net, name).map(Value::Base),
        Kind::Place => place(net, name).map(Value::Place),
        Kind::Type => net
            .type_id(name)
            .map(Value::Type)
            .ok_or_else(|| EvalError::UnknownIdentifier(name.to_owned())),
        _ => Err(EvalError::UnknownIdentifier(name.to_owned())),
    }
}

/// Strict evaluation of `e` in the given context. Expects `e` to have passed type checking;
/// kind mismatches on unchecked input surface as [`EvalError::KindMismatch`].
pub fn eval(e: &CondExpr, ctx: &EvalContext<'_>) -> Result<Value, EvalError> {
    let net = ctx.net;
    match e {
        CondExpr::Bool(b) => Ok(Value::Bool(*b)),
        CondExpr::Num(n) => Ok(Value::Real(*n)),
        CondExpr::Ident(name) => Err(EvalError::UnknownIdentifier(name.clone())),
        CondExpr::Val(name) => Ok(net.value(base(net, name)?).into()),
        CondExpr::In { base: b, place: p } => {
            let b = base(net, b)?;
            let p = place(net, p)?;
            Ok(Value::Bool(ctx.marking.get(p).contains_base(b)))
        }
        CondExpr::Bonded { a, b, place: p } => {
            let a = base(net, a)?;
            let b = base(net, b)?;
            let p = place(net, p)?;
            let present = Bond::new(a, b).is_some_and(|bond| ctx.marking.get(p).contains_bond(bond));
            Ok(Value::Bool(present))
        }
        CondExpr::TokensIn { place: p, ty } => {
            let p = place(net, p)?;
            let ty = net
                .type_id(ty)
                .ok_or_else(|| EvalError::UnknownIdentifier(ty.clone()))?;
            // BaseId order is lexicographic by name.
            let ids = ctx
                .marking
                .get(p)
                .bases
                .iter()
                .copied()
                .filter(|b| net.base_type(*b) == ty)
                .collect();
            Ok(Value::BaseList(ids))
        }
        CondExpr::Not(inner) => Ok(Value::Bool(!boolean(eval(inner, ctx)?)?)),
        CondExpr::And(l, r) => {
            let l = boolean(eval(l, ctx)?)?;
            let r = boolean(eval(r, ctx)?)?;
            Ok(Value::Bool(l && r))
        }
        CondExpr::Or(l, r) => {
            let l = boolean(eval(l, ctx)?)?;
            let r = boolean(eval(r, ctx)?)?;
            Ok(Value::Bool(l || r))
        }
        CondExpr::Arith { op, lhs, rhs } => {
            let l = real(eval(lhs, ctx)?)?;
            let r = real(eval(rhs, ctx)?)?;
            let v = match op {
                ArithOp::Add => l + r,
                ArithOp::Sub => l - r,
                ArithOp::Mul => l * r,
                ArithOp::Div if r == 0.0 => return Err(EvalError::DivisionByZero),
                ArithOp::Div => l / r,
            };
            Ok(Value::Real(v))
        }
        CondExpr::Compare { op, lhs, rhs } => {
            let l = real(eval(lhs, ctx)?)?;
            let r = real(eval(rhs, ctx)?)?;
            Ok(Value::Bool(op.apply(l, r)))
        }
        CondExpr::Call { name, args } => {
            let func = net
                .registry()
                .get(name)
                .ok_or_else(|| EvalError::MissingHostFunction(name.clone()))?;
            let mut values = Vec::with_capacity(args.len());
            for (i, arg) in args.iter().enumerate() {
                let want = func.params.get(i).copied();
                let v = match (arg, want) {
                    (CondExpr::Ident(id), Some(kind)) => reference(net, id, kind)?,
                    _ => eval(arg, ctx)?,
                };
                values.push(v);
            }
            (func.callback)(ctx, &values).map_err(|message| EvalError::Host {
                name: name.clone(),
                message,
            })
        }
    }
}
