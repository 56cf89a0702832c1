use thiserror::Error;

use super::ast::{ArithOp, CmpOp, CondExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

const RESERVED: &[&str] = &["true", "false", "and", "or", "not", "val", "in", "bonded", "tokens_in"];

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    LParen,
    RParen,
    Comma,
    Cmp(CmpOp),
    Arith(ArithOp),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("number {n}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Cmp(op) => format!("`{}`", op.symbol()),
            Tok::Arith(op) => format!("`{}`", op.symbol()),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<(Vec<Spanned>, (usize, usize)), SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        let err = |message: String| SyntaxError {
            line: start_line,
            column: start_col,
            message,
        };
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let len = chars[i..]
                .iter()
                .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                .count();
            (Tok::Ident(chars[i..i + len].iter().collect()), len)
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            if j < chars.len() && chars[j] == '.' {
                j += 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
            }
            if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                let mut k = j + 1;
                if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    while k < chars.len() && chars[k].is_ascii_digit() {
                        k += 1;
                    }
                    j = k;
                }
            }
            let lexeme: String = chars[i..j].iter().collect();
            let value = lexeme
                .parse::<f64>()
                .map_err(|_| err(format!("malformed number `{lexeme}`")))?;
            (Tok::Number(value), j - i)
        } else {
            let next = chars.get(i + 1).copied();
            match (c, next) {
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                (',', _) => (Tok::Comma, 1),
                ('<', Some('=')) => (Tok::Cmp(CmpOp::Le), 2),
                ('<', _) => (Tok::Cmp(CmpOp::Lt), 1),
                ('>', Some('=')) => (Tok::Cmp(CmpOp::Ge), 2),
                ('>', _) => (Tok::Cmp(CmpOp::Gt), 1),
                ('!', Some('=')) => (Tok::Cmp(CmpOp::Ne), 2),
                ('=', _) => (Tok::Cmp(CmpOp::Eq), 1),
                ('+', _) => (Tok::Arith(ArithOp::Add), 1),
                ('-', _) => (Tok::Arith(ArithOp::Sub), 1),
                ('*', _) => (Tok::Arith(ArithOp::Mul), 1),
                ('/', _) => (Tok::Arith(ArithOp::Div), 1),
                _ => return Err(err(format!("unexpected character `{c}`"))),
            }
        };
        out.push(Spanned {
            tok,
            line: start_line,
            column: start_col,
        });
        i += len;
        column += len;
    }
    Ok((out, (line, column)))
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset).map(|s| &s.tok)
    }

    fn error_here(&self, message: impl Into<String>) -> SyntaxError {
        let (line, column) = self.toks.get(self.pos).map_or(self.end, |s| (s.line, s.column));
        SyntaxError {
            line,
            column,
            message: message.into(),
        }
    }

    fn unexpected(&self, wanted: &str) -> SyntaxError {
        match self.peek() {
            Some(t) => self.error_here(format!("expected {wanted}, found {}", t.describe())),
            None => self.error_here(format!("expected {wanted}, found end of input")),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn identifier(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !RESERVED.contains(&s.as_str()) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    fn expr(&mut self) -> Result<CondExpr, SyntaxError> {
        let mut lhs = self.and_expr()?;
        while self.is_keyword("or") {
            self.pos += 1;
            let rhs = self.and_expr()?;
            lhs = CondExpr::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<CondExpr, SyntaxError> {
        let mut lhs = self.not_expr()?;
        while self.is_keyword("and") {
            self.pos += 1;
            let rhs = self.not_expr()?;
            lhs = CondExpr::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> Result<CondExpr, SyntaxError> {
        if self.is_keyword("not") {
            self.pos += 1;
            Ok(CondExpr::negate(self.cmp()?))
        } else {
            self.cmp()
        }
    }

    fn cmp(&mut self) -> Result<CondExpr, SyntaxError> {
        let lhs = self.sum()?;
        if let Some(Tok::Cmp(op)) = self.peek() {
            let op = *op;
            self.pos += 1;
            let rhs = self.sum()?;
            return Ok(CondExpr::compare(op, lhs, rhs));
        }
        Ok(lhs)
    }

    fn sum(&mut self) -> Result<CondExpr, SyntaxError> {
        let mut lhs = self.prod()?;
        while let Some(Tok::Arith(op @ (ArithOp::Add | ArithOp::Sub))) = self.peek() {
            let op = *op;
            self.pos += 1;
            let rhs = self.prod()?;
            lhs = CondExpr::arith(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn prod(&mut self) -> Result<CondExpr, SyntaxError> {
        let mut lhs = self.atom()?;
        while let Some(Tok::Arith(op @ (ArithOp::Mul | ArithOp::Div))) = self.peek() {
            let op = *op;
            self.pos += 1;
            let rhs = self.atom()?;
            lhs = CondExpr::arith(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<CondExpr, SyntaxError> {
        match self.peek().cloned() {
            Some(Tok::Number(n)) => {
                self.pos += 1;
                Ok(CondExpr::Num(n))
            }
            Some(Tok::Arith(ArithOp::Sub)) => match self.peek_at(1) {
                Some(Tok::Number(n)) => {
                    let n = *n;
                    self.pos += 2;
                    Ok(CondExpr::Num(-n))
                }
                _ => Err(self.error_here("`-` is only allowed as a sign on a number literal")),
            },
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "true" => {
                    self.pos += 1;
                    Ok(CondExpr::Bool(true))
                }
                "false" => {
                    self.pos += 1;
                    Ok(CondExpr::Bool(false))
                }
                "val" => {
                    self.pos += 1;
                    self.expect(Tok::LParen)?;
                    let base = self.identifier()?;
                    self.expect(Tok::RParen)?;
                    Ok(CondExpr::Val(base))
                }
                "in" => {
                    self.pos += 1;
                    let [base, place] = self.id_args()?;
                    Ok(CondExpr::In { base, place })
                }
                "bonded" => {
                    self.pos += 1;
                    let [a, b, place] = self.id_args()?;
                    Ok(CondExpr::Bonded { a, b, place })
                }
                "tokens_in" => {
                    self.pos += 1;
                    let [place, ty] = self.id_args()?;
                    Ok(CondExpr::TokensIn { place, ty })
                }
                _ => {
                    let name = self.identifier()?;
                    if self.peek() != Some(&Tok::LParen) {
                        return Ok(CondExpr::Ident(name));
                    }
                    self.pos += 1;
                    let mut args = Vec::new();
                    if self.peek() != Some(&Tok::RParen) {
                        loop {
                            args.push(self.expr()?);
                            if self.peek() == Some(&Tok::Comma) {
                                self.pos += 1;
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen)?;
                    Ok(CondExpr::Call { name, args })
                }
            },
            _ => Err(self.unexpected("expression")),
        }
    }

    fn id_args<const N: usize>(&mut self) -> Result<[String; N], SyntaxError> {
        self.expect(Tok::LParen)?;
        let mut ids: [String; N] = std::array::from_fn(|_| String::new());
        for (i, slot) in ids.iter_mut().enumerate() {
            if i > 0 {
                self.expect(Tok::Comma)?;
            }
            *slot = self.identifier()?;
        }
        self.expect(Tok::RParen)?;
        Ok(ids)
    }
}

/// Parses guard text into an expression tree.
pub fn parse(text: &str) -> Result<CondExpr, SyntaxError> {
    let (toks, end) = lex(text)?;
    let mut parser = Parser { toks, pos: 0, end };
    let e = parser.expr()?;
    if parser.pos < parser.toks.len() {
        return Err(parser.unexpected("end of input"));
    }
    Ok(e)
}
