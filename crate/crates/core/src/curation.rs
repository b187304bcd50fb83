//! The curation DSL: a line-friendly record of expert modelling decisions.
//!
//! ```text
//! # comment
//! alias "abandoned dwellings" = "Abandoned Housing"
//! variable Inspection {
//!     value absent: "Little Inspection" | "Lack of Inspection"
//! }
//! interaction "Abandoned Housing" = (Vacancy = vacant) & (BuildingCondition = severe_disrepair)
//! deny Vacancy -> Infrastructure
//! set near_dup_threshold = 0.6
//! ```
//!
//! `deny` endpoints may also be quoted strings so that interaction names with
//! spaces can be denied.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    Alias, ArtificialNode, CausalVariable, Constituent, CurationSpec, DeniedRelation, VariableValue,
};
use crate::resolve::normalize;

/// 1-based position in the spec text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurationError {
    #[error("{span}: expected {expected}, found {found}")]
    Syntax {
        span: SourceSpan,
        expected: String,
        found: String,
    },
    #[error("{span}: duplicate {kind} `{name}`")]
    DuplicateName {
        span: SourceSpan,
        kind: &'static str,
        name: String,
    },
    #[error("{span}: unknown config key `{key}` (known: near_dup_threshold, max_path_len)")]
    UnknownConfigKey { span: SourceSpan, key: String },
    #[error("{span}: invalid value for `{key}`: {message}")]
    InvalidConfigValue {
        span: SourceSpan,
        key: String,
        message: String,
    },
    #[error("{span}: {message}")]
    Invalid { span: SourceSpan, message: String },
    #[error("{span}: alias target `{label}` is itself an alias key")]
    AliasChain { span: SourceSpan, label: String },
}

impl CurationError {
    pub fn span(&self) -> SourceSpan {
        match self {
            CurationError::Syntax { span, .. }
            | CurationError::DuplicateName { span, .. }
            | CurationError::UnknownConfigKey { span, .. }
            | CurationError::InvalidConfigValue { span, .. }
            | CurationError::Invalid { span, .. }
            | CurationError::AliasChain { span, .. } => *span,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Number(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Pipe,
    Eq,
    Amp,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Str(s) => write!(f, "string {s:?}"),
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            chars: text.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn span(&self) -> SourceSpan {
        SourceSpan {
            line: self.line,
            column: self.column,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn tokens(mut self) -> Result<Vec<(Tok, SourceSpan)>, CurationError> {
        let mut out = Vec::new();
        loop {
            while let Some(&c) = self.chars.peek() {
                if c == '#' {
                    while self.chars.peek().is_some_and(|c| *c != '\n') {
                        self.bump();
                    }
                } else if c.is_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let span = self.span();
            let Some(c) = self.bump() else {
                out.push((Tok::Eof, span));
                return Ok(out);
            };
            let tok = match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ':' => Tok::Colon,
                '|' => Tok::Pipe,
                '=' => Tok::Eq,
                '&' => Tok::Amp,
                '-' if self.chars.peek() == Some(&'>') => {
                    self.bump();
                    Tok::Arrow
                }
                '"' => Tok::Str(self.string(span)?),
                c if c.is_ascii_digit() => {
                    let mut s = c.to_string();
                    while let Some(&d) = self.chars.peek() {
                        if d.is_ascii_digit() || d == '.' {
                            s.push(d);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Tok::Number(s)
                }
                c if c.is_alphabetic() || c == '_' => {
                    let mut s = c.to_string();
                    while let Some(&d) = self.chars.peek() {
                        if d.is_alphanumeric() || d == '_' {
                            s.push(d);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Tok::Ident(s)
                }
                other => {
                    return Err(CurationError::Syntax {
                        span,
                        expected: "a statement token".into(),
                        found: format!("character {other:?}"),
                    })
                }
            };
            out.push((tok, span));
        }
    }

    fn string(&mut self, start: SourceSpan) -> Result<String, CurationError> {
        let mut s = String::new();
        loop {
            let span = self.span();
            match self.bump() {
                None | Some('\n') => {
                    return Err(CurationError::Syntax {
                        span: start,
                        expected: "closing `\"`".into(),
                        found: "end of line".into(),
                    })
                }
                Some('"') => return Ok(s),
                Some('\\') => match self.bump() {
                    Some('"') => s.push('"'),
                    Some('\\') => s.push('\\'),
                    Some('n') => s.push('\n'),
                    Some('t') => s.push('\t'),
                    other => {
                        return Err(CurationError::Syntax {
                            span,
                            expected: "escape `\\\"`, `\\\\`, `\\n` or `\\t`".into(),
                            found: other.map_or("end of input".into(), |c| format!("`\\{c}`")),
                        })
                    }
                },
                Some(c) => s.push(c),
            }
        }
    }
}

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].1
    }

    fn next(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> CurationError {
        CurationError::Syntax {
            span: self.span(),
            expected: expected.to_string(),
            found: self.peek().to_string(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<SourceSpan, CurationError> {
        if *self.peek() == tok {
            Ok(self.next().1)
        } else {
            Err(self.error(&tok.to_string()))
        }
    }

    fn ident(&mut self) -> Result<(String, SourceSpan), CurationError> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.next().1)),
            _ => Err(self.error("identifier")),
        }
    }

    fn string(&mut self) -> Result<(String, SourceSpan), CurationError> {
        match self.peek().clone() {
            Tok::Str(s) => Ok((s, self.next().1)),
            _ => Err(self.error("string")),
        }
    }

    fn name(&mut self) -> Result<(String, SourceSpan), CurationError> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Str(s) => Ok((s, self.next().1)),
            _ => Err(self.error("identifier or string")),
        }
    }
}

/// Parses spec text into a [`CurationSpec`].
pub fn parse_curation(text: &str) -> Result<CurationSpec, CurationError> {
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, pos: 0 };
    let mut spec = CurationSpec::default();
    let mut node_names = BTreeSet::new();
    let mut alias_spans = Vec::new();

    loop {
        let span = p.span();
        let keyword = match p.peek() {
            Tok::Eof => break,
            Tok::Ident(k) => k.clone(),
            _ => return Err(p.error("`alias`, `variable`, `interaction`, `deny` or `set`")),
        };
        match keyword.as_str() {
            "alias" => {
                p.next();
                let (from, from_span) = p.string()?;
                p.expect(Tok::Eq)?;
                let (to, _) = p.string()?;
                if spec
                    .aliases
                    .iter()
                    .any(|a| normalize(&a.from) == normalize(&from))
                {
                    return Err(CurationError::DuplicateName {
                        span: from_span,
                        kind: "alias",
                        name: from,
                    });
                }
                alias_spans.push(span);
                spec.aliases.push(Alias::new(from, to));
            }
            "variable" => {
                p.next();
                let (name, name_span) = p.ident()?;
                if !node_names.insert(name.clone()) {
                    return Err(CurationError::DuplicateName {
                        span: name_span,
                        kind: "node",
                        name,
                    });
                }
                p.expect(Tok::LBrace)?;
                let mut values: Vec<VariableValue> = Vec::new();
                while *p.peek() != Tok::RBrace {
                    match p.peek() {
                        Tok::Ident(k) if k == "value" => {
                            p.next();
                        }
                        _ => return Err(p.error("`value` or `}`")),
                    }
                    let (vname, vspan) = p.ident()?;
                    if values.iter().any(|v| v.name == vname) {
                        return Err(CurationError::DuplicateName {
                            span: vspan,
                            kind: "value",
                            name: vname,
                        });
                    }
                    p.expect(Tok::Colon)?;
                    let mut entities = vec![p.string()?.0];
                    while *p.peek() == Tok::Pipe {
                        p.next();
                        entities.push(p.string()?.0);
                    }
                    values.push(VariableValue {
                        name: vname,
                        entities,
                    });
                }
                p.expect(Tok::RBrace)?;
                if values.is_empty() {
                    return Err(CurationError::Invalid {
                        span: name_span,
                        message: format!("variable `{name}` declares no values"),
                    });
                }
                spec.variables.push(CausalVariable { name, values });
            }
            "interaction" => {
                p.next();
                let (name, name_span) = p.string()?;
                if !node_names.insert(name.clone()) {
                    return Err(CurationError::DuplicateName {
                        span: name_span,
                        kind: "node",
                        name,
                    });
                }
                p.expect(Tok::Eq)?;
                let mut constituents = vec![constituent(&mut p)?];
                p.expect(Tok::Amp)?;
                constituents.push(constituent(&mut p)?);
                while *p.peek() == Tok::Amp {
                    p.next();
                    constituents.push(constituent(&mut p)?);
                }
                spec.interactions
                    .push(ArtificialNode { name, constituents });
            }
            "deny" => {
                p.next();
                let (cause, _) = p.name()?;
                p.expect(Tok::Arrow)?;
                let (effect, effect_span) = p.name()?;
                let denial =
                    DeniedRelation::new(cause, effect).map_err(|e| CurationError::Invalid {
                        span: effect_span,
                        message: e.to_string(),
                    })?;
                if !spec.denials.contains(&denial) {
                    spec.denials.push(denial);
                }
            }
            "set" => {
                p.next();
                let (key, key_span) = p.ident()?;
                p.expect(Tok::Eq)?;
                let (value_tok, value_span) = p.next();
                let raw = match value_tok {
                    Tok::Number(n) => n,
                    Tok::Ident(i) => i,
                    other => {
                        return Err(CurationError::Syntax {
                            span: value_span,
                            expected: "number or identifier".into(),
                            found: other.to_string(),
                        })
                    }
                };
                set_config(&mut spec, &key, &raw, key_span, value_span)?;
            }
            _ => return Err(p.error("`alias`, `variable`, `interaction`, `deny` or `set`")),
        }
    }

    let keys = spec.alias_map();
    for (alias, span) in spec.aliases.iter().zip(alias_spans) {
        if keys.contains_key(&normalize(&alias.to)) {
            return Err(CurationError::AliasChain {
                span,
                label: alias.to.clone(),
            });
        }
    }
    Ok(spec)
}

fn constituent(p: &mut Parser) -> Result<Constituent, CurationError> {
    p.expect(Tok::LParen)?;
    let (variable, _) = p.ident()?;
    p.expect(Tok::Eq)?;
    let (value, _) = p.ident()?;
    p.expect(Tok::RParen)?;
    Ok(Constituent { variable, value })
}

fn set_config(
    spec: &mut CurationSpec,
    key: &str,
    raw: &str,
    key_span: SourceSpan,
    value_span: SourceSpan,
) -> Result<(), CurationError> {
    let invalid = |message: String| CurationError::InvalidConfigValue {
        span: value_span,
        key: key.to_string(),
        message,
    };
    let duplicate = || CurationError::DuplicateName {
        span: key_span,
        kind: "config key",
        name: key.to_string(),
    };
    match key {
        "near_dup_threshold" => {
            let t: f64 = raw
                .parse()
                .map_err(|_| invalid(format!("`{raw}` is not a number")))?;
            if !(0.0..=1.0).contains(&t) {
                return Err(invalid(format!("{t} is outside [0, 1]")));
            }
            if spec.config.near_dup_threshold.replace(t).is_some() {
                return Err(duplicate());
            }
        }
        "max_path_len" => {
            let n: usize = raw
                .parse()
                .map_err(|_| invalid(format!("`{raw}` is not a positive integer")))?;
            if n < 3 {
                return Err(invalid(format!("{n} is below the minimum path length 3")));
            }
            if spec.config.max_path_len.replace(n).is_some() {
                return Err(duplicate());
            }
        }
        _ => {
            return Err(CurationError::UnknownConfigKey {
                span: key_span,
                key: key.to_string(),
            })
        }
    }
    Ok(())
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn name_token(s: &str) -> String {
    if is_ident(s) {
        s.to_string()
    } else {
        quote(s)
    }
}

/// Canonical text form of `spec`. Reparsing the output yields `spec` again.
pub fn pretty_print(spec: &CurationSpec) -> String {
    let mut sections: Vec<String> = Vec::new();
    let mut push = |body: String| {
        if !body.is_empty() {
            sections.push(body);
        }
    };

    push(
        spec.aliases
            .iter()
            .map(|a| format!("alias {} = {}\n", quote(&a.from), quote(&a.to)))
            .collect(),
    );

    let mut vars = String::new();
    for (i, var) in spec.variables.iter().enumerate() {
        if i > 0 {
            vars.push('\n');
        }
        let _ = writeln!(vars, "variable {} {{", var.name);
        for value in &var.values {
            let labels: Vec<String> = value.entities.iter().map(|e| quote(e)).collect();
            let _ = writeln!(vars, "    value {}: {}", value.name, labels.join(" | "));
        }
        vars.push_str("}\n");
    }
    push(vars);

    push(
        spec.interactions
            .iter()
            .map(|i| {
                let parts: Vec<String> = i
                    .constituents
                    .iter()
                    .map(|c| format!("({} = {})", c.variable, c.value))
                    .collect();
                format!("interaction {} = {}\n", quote(&i.name), parts.join(" & "))
            })
            .collect(),
    );

    push(
        spec.denials
            .iter()
            .map(|d| {
                format!(
                    "deny {} -> {}\n",
                    name_token(d.cause()),
                    name_token(d.effect())
                )
            })
            .collect(),
    );

    let mut config = String::new();
    if let Some(t) = spec.config.near_dup_threshold {
        let _ = writeln!(config, "set near_dup_threshold = {t}");
    }
    if let Some(n) = spec.config.max_path_len {
        let _ = writeln!(config, "set max_path_len = {n}");
    }
    push(config);

    sections.join("\n")
}
