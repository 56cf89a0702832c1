//! The `.rpn` net text format, marking dumps and trace CSV.
//!
//! ```text
//! TYPES
//!   radio: real[2]
//!   power: unit
//! TOKENS
//!   a_i: radio = [1, 0]
//!   p: power = ()
//! PLACES
//!   A_i, A_j, M_k
//! BONDS
//!   (a_i,m_k) @ M_k      # initial bond
//!   (a_j,m_k)            # declared only
//! MARKING
//!   p @ A_i
//! TRANSITIONS
//!   t_ij:
//!     in A_i: {p}
//!     in A_j: {a_j, !(a_j,m_k)}
//!     out A_j: {p}
//!     guard: true
//! ```
//!
//! Section headers stand alone on a line; `#` starts a comment. A transition without a
//! `guard:` line is unconditionally true.

mod dump;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::cond::{is_identifier, parse, HostRegistry};
use crate::model::{
    validate, ArcElement, ArcLabel, BuildError, ElemSpec, Net, NetBuilder, TokenValue, TransitionSpec, ValueKind,
    Violation,
};

pub use dump::{dump_marking, dump_marking_inline, trace_csv, TRACE_HEADER};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown {kind} `{name}`")]
    UnknownIdentifier { kind: &'static str, name: String },
    #[error(transparent)]
    Build(BuildError),
    #[error("net is not well-formed:\n{}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n"))]
    ValidationFailed(Vec<Violation>),
}

impl From<BuildError> for LoadError {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::UnknownIdentifier { kind, name } => LoadError::UnknownIdentifier { kind, name },
            other => LoadError::Build(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Types,
    Tokens,
    Places,
    Bonds,
    Marking,
    Transitions,
}

impl Section {
    fn from_header(s: &str) -> Option<Self> {
        Some(match s {
            "TYPES" => Section::Types,
            "TOKENS" => Section::Tokens,
            "PLACES" => Section::Places,
            "BONDS" => Section::Bonds,
            "MARKING" => Section::Marking,
            "TRANSITIONS" => Section::Transitions,
            _ => return None,
        })
    }
}

fn perr<T>(line: usize, message: impl Into<String>) -> Result<T, LoadError> {
    Err(LoadError::Parse {
        line,
        message: message.into(),
    })
}

fn ident(line: usize, s: &str) -> Result<String, LoadError> {
    let s = s.trim();
    if is_identifier(s) {
        Ok(s.to_owned())
    } else {
        perr(line, format!("`{s}` is not an identifier"))
    }
}

fn parse_kind(line: usize, s: &str) -> Result<ValueKind, LoadError> {
    let s = s.trim();
    match s {
        "unit" => Ok(ValueKind::Unit),
        "bool" => Ok(ValueKind::Boolean),
        "real" => Ok(ValueKind::Real),
        _ => {
            let dim = s
                .strip_prefix("real[")
                .and_then(|r| r.strip_suffix(']'))
                .and_then(|d| d.trim().parse::<usize>().ok());
            match dim {
                Some(d) => Ok(ValueKind::RealVector(d)),
                None => perr(line, format!("unknown value kind `{s}`")),
            }
        }
    }
}

fn parse_real(line: usize, s: &str) -> Result<f64, LoadError> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => perr(line, format!("`{}` is not a finite number", s.trim())),
    }
}

fn parse_value(line: usize, s: &str) -> Result<TokenValue, LoadError> {
    let s = s.trim();
    match s {
        "()" => Ok(TokenValue::Unit),
        "true" => Ok(TokenValue::Bool(true)),
        "false" => Ok(TokenValue::Bool(false)),
        _ => {
            if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                if inner.trim().is_empty() {
                    return Ok(TokenValue::Vector(Vec::new()));
                }
                inner
                    .split(',')
                    .map(|x| parse_real(line, x))
                    .collect::<Result<_, _>>()
                    .map(TokenValue::Vector)
            } else {
                parse_real(line, s).map(TokenValue::Real)
            }
        }
    }
}

fn parse_bond(line: usize, s: &str) -> Result<(String, String), LoadError> {
    let s = s.trim();
    let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) else {
        return perr(line, format!("expected a bond `(a,b)`, found `{s}`"));
    };
    let Some((a, b)) = inner.split_once(',') else {
        return perr(line, format!("expected a bond `(a,b)`, found `{s}`"));
    };
    Ok((ident(line, a)?, ident(line, b)?))
}

fn split_label_items(s: &str) -> Vec<&str> {
    let mut items = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                items.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    items.push(&s[start..]);
    items.into_iter().map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn parse_label_at(line: usize, s: &str) -> Result<Vec<ElemSpec>, LoadError> {
    let s = s.trim();
    let Some(inner) = s.strip_prefix('{').and_then(|r| r.strip_suffix('}')) else {
        return perr(line, format!("expected a label `{{...}}`, found `{s}`"));
    };
    split_label_items(inner)
        .into_iter()
        .map(|item| {
            let (negative, body) = match item.strip_prefix('!') {
                Some(rest) => (true, rest.trim()),
                None => (false, item),
            };
            if body.starts_with('(') {
                let (a, b) = parse_bond(line, body)?;
                Ok(if negative {
                    ElemSpec::NegBond(a, b)
                } else {
                    ElemSpec::Bond(a, b)
                })
            } else {
                let a = ident(line, body)?;
                Ok(if negative {
                    ElemSpec::NegBase(a)
                } else {
                    ElemSpec::Base(a)
                })
            }
        })
        .collect()
}

/// Parses an arc label such as `{p, !a, (a,b), !(a,b)}`.
pub fn parse_label(text: &str) -> Result<Vec<ElemSpec>, LoadError> {
    parse_label_at(1, text)
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses net text into a [`Net`] without running well-formedness validation.
pub fn parse_net(text: &str, registry: Arc<HostRegistry>) -> Result<Net, LoadError> {
    let mut builder = NetBuilder::new();
    builder.registry(registry);
    let mut section: Option<Section> = None;
    let mut seen = BTreeMap::new();
    let mut place_count = 0usize;
    let mut current: Option<(TransitionSpec, bool)> = None;
    let mut transitions = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        if let Some(sec) = Section::from_header(content) {
            if seen.insert(sec, line).is_some() {
                return perr(line, format!("section {content} appears twice"));
            }
            section = Some(sec);
            continue;
        }
        let Some(sec) = section else {
            return perr(line, "content before the first section header");
        };
        match sec {
            Section::Types => {
                let Some((name, kind)) = content.split_once(':') else {
                    return perr(line, "expected `name: kind`");
                };
                builder.token_type(ident(line, name)?, parse_kind(line, kind)?);
            }
            Section::Tokens => {
                let Some((name, rest)) = content.split_once(':') else {
                    return perr(line, "expected `name: type = value`");
                };
                let Some((ty, value)) = rest.split_once('=') else {
                    return perr(line, "expected `name: type = value`");
                };
                builder.base(ident(line, name)?, ident(line, ty)?, parse_value(line, value)?);
            }
            Section::Places => {
                for name in content.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    builder.place(ident(line, name)?);
                    place_count += 1;
                }
            }
            Section::Bonds => match content.split_once('@') {
                Some((bond, place)) => {
                    let (a, b) = parse_bond(line, bond)?;
                    builder.mark_bond(a, b, ident(line, place)?);
                }
                None => {
                    let (a, b) = parse_bond(line, content)?;
                    builder.bond(a, b);
                }
            },
            Section::Marking => {
                let Some((base, place)) = content.split_once('@') else {
                    return perr(line, "expected `base @ place`");
                };
                builder.mark(ident(line, base)?, ident(line, place)?);
            }
            Section::Transitions => {
                if let Some(rest) = content.strip_prefix("guard:") {
                    let Some((spec, has_guard)) = current.as_mut() else {
                        return perr(line, "guard outside a transition block");
                    };
                    if *has_guard {
                        return perr(line, format!("transition `{}` has two guards", spec.name));
                    }
                    spec.guard = parse(rest.trim()).map_err(|e| LoadError::Parse {
                        line,
                        message: format!("guard: {e}"),
                    })?;
                    *has_guard = true;
                } else if let Some((dir, rest)) = content
                    .strip_prefix("in ")
                    .map(|r| ("in", r))
                    .or_else(|| content.strip_prefix("out ").map(|r| ("out", r)))
                {
                    let Some((spec, _)) = current.as_mut() else {
                        return perr(line, "arc outside a transition block");
                    };
                    let Some((place, label)) = rest.split_once(':') else {
                        return perr(line, "expected `in|out place: {...}`");
                    };
                    let place = ident(line, place)?;
                    let label = parse_label_at(line, label)?;
                    if dir == "in" {
                        spec.inputs.push((place, label));
                    } else {
                        spec.outputs.push((place, label));
                    }
                } else if let Some(name) = content.strip_suffix(':') {
                    if let Some((done, _)) = current.take() {
                        transitions.push(done);
                    }
                    current = Some((TransitionSpec::new(ident(line, name)?), false));
                } else {
                    return perr(line, format!("unexpected `{content}` in TRANSITIONS"));
                }
            }
        }
    }
    if let Some((done, _)) = current.take() {
        transitions.push(done);
    }
    if place_count == 0 {
        let line = seen.get(&Section::Places).copied().unwrap_or(1);
        return perr(line, "PLACES section is missing or empty");
    }
    for t in transitions {
        builder.transition(t);
    }
    Ok(builder.build()?)
}

/// Parses and validates net text.
pub fn load_str(text: &str, registry: Arc<HostRegistry>) -> Result<Net, LoadError> {
    let net = parse_net(text, registry)?;
    let violations = validate(&net);
    if violations.is_empty() {
        Ok(net)
    } else {
        Err(LoadError::ValidationFailed(violations))
    }
}

pub fn load(path: impl AsRef<Path>, registry: Arc<HostRegistry>) -> Result<Net, LoadError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_str(&text, registry)
}

fn format_value(v: &TokenValue) -> String {
    match v {
        TokenValue::Unit => "()".into(),
        TokenValue::Bool(b) => b.to_string(),
        TokenValue::Real(r) => r.to_string(),
        TokenValue::Vector(xs) => {
            let items: Vec<String> = xs.iter().map(f64::to_string).collect();
            format!("[{}]", items.join(", "))
        }
    }
}

fn format_label(net: &Net, label: &ArcLabel) -> String {
    let items: Vec<String> = label
        .elements()
        .map(|e| match e {
            ArcElement::Base(b) => net.base_name(b).to_owned(),
            ArcElement::NegBase(b) => format!("!{}", net.base_name(b)),
            ArcElement::Bond(b) => net.bond_name(b),
            ArcElement::NegBond(b) => format!("!{}", net.bond_name(b)),
        })
        .collect();
    format!("{{{}}}", items.join(", "))
}

/// Canonical text for `net`: every section present, entries in lexicographic id order.
pub fn save(net: &Net) -> String {
    let mut out = String::new();
    out.push_str("TYPES\n");
    for (_, ty) in net.types() {
        let _ = writeln!(out, "  {}: {}", ty.name, ty.kind);
    }
    out.push_str("TOKENS\n");
    for b in net.bases() {
        let _ = writeln!(
            out,
            "  {}: {} = {}",
            net.base_name(b),
            net.type_name(net.base_type(b)),
            format_value(net.value(b))
        );
    }
    out.push_str("PLACES\n");
    let places: Vec<&str> = net.places().map(|p| net.place_name(p)).collect();
    let _ = writeln!(out, "  {}", places.join(", "));
    out.push_str("BONDS\n");
    let mut placed = std::collections::BTreeSet::new();
    for (p, contents) in net.initial_marking().iter() {
        for bond in &contents.bonds {
            placed.insert(*bond);
            let _ = writeln!(out, "  {} @ {}", net.bond_name(*bond), net.place_name(p));
        }
    }
    for bond in net.declared_bonds().difference(&placed) {
        let _ = writeln!(out, "  {}", net.bond_name(*bond));
    }
    out.push_str("MARKING\n");
    for (p, contents) in net.initial_marking().iter() {
        for b in &contents.bases {
            let _ = writeln!(out, "  {} @ {}", net.base_name(*b), net.place_name(p));
        }
    }
    out.push_str("TRANSITIONS\n");
    for t in net.transitions() {
        let tr = net.transition(t);
        let _ = writeln!(out, "  {}:", tr.name);
        for (p, label) in &tr.inputs {
            let _ = writeln!(out, "    in {}: {}", net.place_name(*p), format_label(net, label));
        }
        for (p, label) in &tr.outputs {
            let _ = writeln!(out, "    out {}: {}", net.place_name(*p), format_label(net, label));
        }
        let _ = writeln!(out, "    guard: {}", tr.guard);
    }
    out
}
