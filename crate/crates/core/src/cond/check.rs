use std::fmt;

use thiserror::Error;

use super::ast::CondExpr;
use crate::model::{Net, ValueKind};

/// Static kind of a guard sub-expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Bool,
    Real,
    Unit,
    Vector(usize),
    Base,
    Place,
    Type,
    BaseList,
}

impl From<ValueKind> for Kind {
    fn from(kind: ValueKind) -> Self {
        match kind {
            ValueKind::Unit => Kind::Unit,
            ValueKind::Boolean => Kind::Bool,
            ValueKind::Real => Kind::Real,
            ValueKind::RealVector(d) => Kind::Vector(d),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Bool => f.write_str("bool"),
            Kind::Real => f.write_str("real"),
            Kind::Unit => f.write_str("unit"),
            Kind::Vector(d) => write!(f, "real[{d}]"),
            Kind::Base => f.write_str("base"),
            Kind::Place => f.write_str("place"),
            Kind::Type => f.write_str("type"),
            Kind::BaseList => f.write_str("base list"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("type error in `{node}`: {message}")]
pub struct TypeError {
    /// The offending sub-expression, printed.
    pub node: String,
    pub message: String,
}

fn fail<T>(node: &CondExpr, message: impl Into<String>) -> Result<T, TypeError> {
    Err(TypeError {
        node: node.to_string(),
        message: message.into(),
    })
}

fn expect(node: &CondExpr, net: &Net, want: Kind) -> Result<(), TypeError> {
    let got = typecheck(node, net)?;
    if got == want {
        Ok(())
    } else {
        fail(node, format!("expected {want}, found {got}"))
    }
}

fn resolve(node: &CondExpr, net: &Net, name: &str, want: Kind) -> Result<(), TypeError> {
    let known = match want {
        Kind::Base => net.base_id(name).is_some(),
        Kind::Place => net.place_id(name).is_some(),
        Kind::Type => net.type_id(name).is_some(),
        _ => return fail(node, format!("bare identifier `{name}` cannot have kind {want}")),
    };
    if known {
        Ok(())
    } else {
        fail(node, format!("unknown {want} `{name}`"))
    }
}

/// Infers the kind of `e` against the identifiers and host functions of `net`.
pub fn typecheck(e: &CondExpr, net: &Net) -> Result<Kind, TypeError> {
    match e {
        CondExpr::Bool(_) => Ok(Kind::Bool),
        CondExpr::Num(n) if n.is_finite() => Ok(Kind::Real),
        CondExpr::Num(_) => fail(e, "non-finite literal"),
        CondExpr::Ident(name) => fail(e, format!("bare identifier `{name}` outside a call argument")),
        CondExpr::Val(base) => match net.base_id(base) {
            Some(b) => Ok(net.type_kind(net.base_type(b)).into()),
            None => fail(e, format!("unknown base `{base}`")),
        },
        CondExpr::In { base, place } => {
            resolve(e, net, base, Kind::Base)?;
            resolve(e, net, place, Kind::Place)?;
            Ok(Kind::Bool)
        }
        CondExpr::Bonded { a, b, place } => {
            resolve(e, net, a, Kind::Base)?;
            resolve(e, net, b, Kind::Base)?;
            resolve(e, net, place, Kind::Place)?;
            Ok(Kind::Bool)
        }
        CondExpr::TokensIn { place, ty } => {
            resolve(e, net, place, Kind::Place)?;
            resolve(e, net, ty, Kind::Type)?;
            Ok(Kind::BaseList)
        }
        CondExpr::Not(inner) => {
            expect(inner, net, Kind::Bool)?;
            Ok(Kind::Bool)
        }
        CondExpr::And(l, r) | CondExpr::Or(l, r) => {
            expect(l, net, Kind::Bool)?;
            expect(r, net, Kind::Bool)?;
            Ok(Kind::Bool)
        }
        CondExpr::Arith { lhs, rhs, .. } => {
            expect(lhs, net, Kind::Real)?;
            expect(rhs, net, Kind::Real)?;
            Ok(Kind::Real)
        }
        CondExpr::Compare { lhs, rhs, .. } => {
            expect(lhs, net, Kind::Real)?;
            expect(rhs, net, Kind::Real)?;
            Ok(Kind::Bool)
        }
        CondExpr::Call { name, args } => {
            let Some(func) = net.registry().get(name) else {
                return fail(e, format!("unknown function `{name}`"));
            };
            if func.params.len() != args.len() {
                return fail(
                    e,
                    format!("`{name}` takes {} argument(s), {} given", func.params.len(), args.len()),
                );
            }
            for (arg, &want) in args.iter().zip(&func.params) {
                match arg {
                    CondExpr::Ident(id) => resolve(arg, net, id, want)?,
                    _ => expect(arg, net, want)?,
                }
            }
            Ok(func.result)
        }
    }
}

/// Checks that `e` is a well-typed boolean guard.
pub fn typecheck_guard(e: &CondExpr, net: &Net) -> Result<(), TypeError> {
    expect(e, net, Kind::Bool)
}
