//! Surgery scripts.
//!
//! ```text
//! script  := stmt*
//! stmt    := "let" ID "=" expr ";" | "flip" "(" ID "," VERTEX ")" ";" | "report" ID ";"
//! expr    := "CP2" | "CP2BAR" | "S2XS2" | "S4"
//!          | "sum" "(" edgeref "," edgeref ["," pairing] ")"
//!          | "selfsum" "(" edgeref "," edgeref ["," pairing] ")"
//!          | "scale" "(" ID "," rational ")"
//!          | "smooth" "(" edgeref ")" | "smoothall" "(" ID ")"
//! edgeref := ID "@" EDGE
//! pairing := "straight" | "swapped"
//! ```
//!
//! `#` starts a comment running to the end of the line. `flip` re-gauges a
//! binding in place; every other binding is single-assignment.

use std::collections::HashSet;
use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

use crate::divisor::{EdgeId, VertexId};
use crate::scalar::{self, Rational};
use crate::surgery::{self, ManifoldState, SumPairing, SurgeryError};

/// 1-based line and column.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A value with its source position. Equality ignores the position so printed
/// and reparsed scripts compare equal.
#[derive(Clone, Debug)]
pub struct Spanned<T> {
    pub value: T,
    pub pos: Pos,
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl<T: Eq> Eq for Spanned<T> {}

impl<T> Spanned<T> {
    pub fn new(value: T, pos: Pos) -> Self {
        Spanned { value, pos }
    }

    /// Position-free value, for building ASTs by hand.
    pub fn bare(value: T) -> Self {
        Spanned { value, pos: Pos::default() }
    }
}

pub type Ident = Spanned<String>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Cp2,
    Cp2Bar,
    S2xS2,
    S4,
}

impl BlockKind {
    pub const ALL: [BlockKind; 4] = [BlockKind::Cp2, BlockKind::Cp2Bar, BlockKind::S2xS2, BlockKind::S4];

    pub fn keyword(self) -> &'static str {
        match self {
            BlockKind::Cp2 => "CP2",
            BlockKind::Cp2Bar => "CP2BAR",
            BlockKind::S2xS2 => "S2XS2",
            BlockKind::S4 => "S4",
        }
    }

    pub fn build(self) -> ManifoldState {
        match self {
            BlockKind::Cp2 => surgery::block_cp2(),
            BlockKind::Cp2Bar => surgery::block_cp2bar(),
            BlockKind::S2xS2 => surgery::block_s2xs2(),
            BlockKind::S4 => surgery::block_s4(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRef {
    pub state: Ident,
    pub edge: EdgeId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Block(BlockKind),
    Sum { left: EdgeRef, right: EdgeRef, pairing: Option<SumPairing> },
    SelfSum { left: EdgeRef, right: EdgeRef, pairing: Option<SumPairing> },
    Scale { state: Ident, factor: Rational },
    Smooth(EdgeRef),
    SmoothAll(Ident),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StmtKind {
    Let { name: Ident, expr: Expr },
    Flip { name: Ident, vertex: VertexId },
    Report { name: Ident },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: Pos,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Script {
    pub statements: Vec<Stmt>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{pos}: syntax error: expected {expected}, found {found}")]
    Syntax { pos: Pos, expected: String, found: String },
    #[error("{pos}: unexpected character {ch:?}")]
    Lex { pos: Pos, ch: char },
    #[error("{pos}: unbound identifier `{name}`")]
    Unbound { pos: Pos, name: String },
    #[error("{pos}: `{name}` is already bound (first at {first})")]
    Duplicate { pos: Pos, name: String, first: Pos },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::Lex { pos, .. }
            | ParseError::Unbound { pos, .. }
            | ParseError::Duplicate { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{pos}: {source}")]
pub struct ExecError {
    pub pos: Pos,
    #[source]
    pub source: SurgeryError,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Number(String),
    Punct(char),
    Eof,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::Number(s) => write!(f, "number {s}"),
            Token::Punct(c) => write!(f, "`{c}`"),
            Token::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Token, Pos)>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let mut pos = Pos { line: 1, column: 1 };
    let advance = |pos: &mut Pos, c: char| {
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    };
    while let Some(&c) = chars.peek() {
        let start = pos;
        if c.is_whitespace() {
            chars.next();
            advance(&mut pos, c);
        } else if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                advance(&mut pos, c);
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if !(c.is_ascii_alphanumeric() || c == '_') {
                    break;
                }
                word.push(c);
                chars.next();
                advance(&mut pos, c);
            }
            tokens.push((Token::Ident(word), start));
        } else if c.is_ascii_digit() || c == '-' {
            let mut number = String::new();
            number.push(c);
            chars.next();
            advance(&mut pos, c);
            while let Some(&c) = chars.peek() {
                if !c.is_ascii_digit() {
                    break;
                }
                number.push(c);
                chars.next();
                advance(&mut pos, c);
            }
            if number == "-" {
                return Err(ParseError::Lex { pos: start, ch: '-' });
            }
            tokens.push((Token::Number(number), start));
        } else if "()=,;@/".contains(c) {
            chars.next();
            advance(&mut pos, c);
            tokens.push((Token::Punct(c), start));
        } else {
            return Err(ParseError::Lex { pos: start, ch: c });
        }
    }
    tokens.push((Token::Eof, pos));
    Ok(tokens)
}

const RESERVED: &[&str] = &[
    "let", "flip", "report", "sum", "selfsum", "scale", "smooth", "smoothall", "straight", "swapped", "CP2",
    "CP2BAR", "S2XS2", "S4",
];

struct Parser {
    tokens: Vec<(Token, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &(Token, Pos) {
        &self.tokens[self.at]
    }

    fn next(&mut self) -> (Token, Pos) {
        let token = self.tokens[self.at].clone();
        if token.0 != Token::Eof {
            self.at += 1;
        }
        token
    }

    fn error<T>(&self, expected: &str) -> Result<T, ParseError> {
        let (token, pos) = self.peek();
        Err(ParseError::Syntax { pos: *pos, expected: expected.to_string(), found: token.to_string() })
    }

    fn punct(&mut self, c: char) -> Result<Pos, ParseError> {
        match self.peek() {
            (Token::Punct(x), pos) if *x == c => {
                let pos = *pos;
                self.next();
                Ok(pos)
            }
            _ => self.error(&format!("`{c}`")),
        }
    }

    fn keyword(&mut self, word: &str) -> Result<Pos, ParseError> {
        match self.peek() {
            (Token::Ident(x), pos) if x == word => {
                let pos = *pos;
                self.next();
                Ok(pos)
            }
            _ => self.error(&format!("`{word}`")),
        }
    }

    fn ident(&mut self) -> Result<Ident, ParseError> {
        match self.peek() {
            (Token::Ident(x), pos) if !RESERVED.contains(&x.as_str()) => {
                let ident = Spanned::new(x.clone(), *pos);
                self.next();
                Ok(ident)
            }
            _ => self.error("identifier"),
        }
    }

    fn prefixed_id<T: std::str::FromStr>(&mut self, what: &str) -> Result<T, ParseError> {
        match self.peek() {
            (Token::Ident(x), _) => match x.parse::<T>() {
                Ok(id) => {
                    self.next();
                    Ok(id)
                }
                Err(_) => self.error(what),
            },
            _ => self.error(what),
        }
    }

    fn edge_ref(&mut self) -> Result<EdgeRef, ParseError> {
        let state = self.ident()?;
        self.punct('@')?;
        let edge = self.prefixed_id::<EdgeId>("edge id like e1")?;
        Ok(EdgeRef { state, edge })
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let (numer, pos) = match self.peek() {
            (Token::Number(n), pos) => (n.clone(), *pos),
            _ => return self.error("rational"),
        };
        self.next();
        let text = if matches!(self.peek().0, Token::Punct('/')) {
            self.next();
            match self.next() {
                (Token::Number(d), _) => format!("{numer}/{d}"),
                (token, pos) => {
                    return Err(ParseError::Syntax { pos, expected: "denominator".into(), found: token.to_string() })
                }
            }
        } else {
            numer
        };
        scalar::parse_rational(&text).map_err(|e| ParseError::Syntax {
            pos,
            expected: "rational with nonzero denominator".into(),
            found: e.to_string(),
        })
    }

    fn two_edges(&mut self) -> Result<(EdgeRef, EdgeRef, Option<SumPairing>), ParseError> {
        self.punct('(')?;
        let left = self.edge_ref()?;
        self.punct(',')?;
        let right = self.edge_ref()?;
        let pairing = if matches!(self.peek().0, Token::Punct(',')) {
            self.next();
            match self.next() {
                (Token::Ident(w), _) if w == "straight" => Some(SumPairing::Straight),
                (Token::Ident(w), _) if w == "swapped" => Some(SumPairing::Swapped),
                (token, pos) => {
                    return Err(ParseError::Syntax {
                        pos,
                        expected: "`straight` or `swapped`".into(),
                        found: token.to_string(),
                    })
                }
            }
        } else {
            None
        };
        self.punct(')')?;
        Ok((left, right, pairing))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let word = match self.peek() {
            (Token::Ident(w), _) => w.clone(),
            _ => return self.error("expression"),
        };
        if let Some(kind) = BlockKind::ALL.into_iter().find(|k| k.keyword() == word) {
            self.next();
            return Ok(Expr::Block(kind));
        }
        match word.as_str() {
            "sum" | "selfsum" => {
                self.next();
                let (left, right, pairing) = self.two_edges()?;
                Ok(if word == "sum" {
                    Expr::Sum { left, right, pairing }
                } else {
                    Expr::SelfSum { left, right, pairing }
                })
            }
            "scale" => {
                self.next();
                self.punct('(')?;
                let state = self.ident()?;
                self.punct(',')?;
                let factor = self.rational()?;
                self.punct(')')?;
                Ok(Expr::Scale { state, factor })
            }
            "smooth" => {
                self.next();
                self.punct('(')?;
                let edge = self.edge_ref()?;
                self.punct(')')?;
                Ok(Expr::Smooth(edge))
            }
            "smoothall" => {
                self.next();
                self.punct('(')?;
                let state = self.ident()?;
                self.punct(')')?;
                Ok(Expr::SmoothAll(state))
            }
            _ => self.error("block name, sum, selfsum, scale, smooth or smoothall"),
        }
    }

    fn stmt(&mut self) -> Result<Stmt, ParseError> {
        let (token, pos) = self.peek().clone();
        let kind = match token {
            Token::Ident(w) if w == "let" => {
                self.next();
                let name = self.ident()?;
                self.punct('=')?;
                let expr = self.expr()?;
                StmtKind::Let { name, expr }
            }
            Token::Ident(w) if w == "flip" => {
                self.next();
                self.punct('(')?;
                let name = self.ident()?;
                self.punct(',')?;
                let vertex = self.prefixed_id::<VertexId>("vertex id like v1")?;
                self.punct(')')?;
                StmtKind::Flip { name, vertex }
            }
            Token::Ident(w) if w == "report" => {
                self.keyword("report")?;
                StmtKind::Report { name: self.ident()? }
            }
            _ => return self.error("`let`, `flip` or `report`"),
        };
        self.punct(';')?;
        Ok(Stmt { kind, pos })
    }
}

fn expr_uses(expr: &Expr) -> Vec<&Ident> {
    match expr {
        Expr::Block(_) => vec![],
        Expr::Sum { left, right, .. } | Expr::SelfSum { left, right, .. } => vec![&left.state, &right.state],
        Expr::Scale { state, .. } | Expr::SmoothAll(state) => vec![state],
        Expr::Smooth(edge) => vec![&edge.state],
    }
}

/// Rejects uses of unbound names and rebinding.
fn check_scopes(script: &Script) -> Result<(), ParseError> {
    let mut bound: IndexMap<&str, Pos> = IndexMap::new();
    for stmt in &script.statements {
        let (uses, binds): (Vec<&Ident>, Option<&Ident>) = match &stmt.kind {
            StmtKind::Let { name, expr } => (expr_uses(expr), Some(name)),
            StmtKind::Flip { name, .. } | StmtKind::Report { name } => (vec![name], None),
        };
        for ident in uses {
            if !bound.contains_key(ident.value.as_str()) {
                return Err(ParseError::Unbound { pos: ident.pos, name: ident.value.clone() });
            }
        }
        if let Some(name) = binds {
            if let Some(&first) = bound.get(name.value.as_str()) {
                return Err(ParseError::Duplicate { pos: name.pos, name: name.value.clone(), first });
            }
            bound.insert(&name.value, name.pos);
        }
    }
    Ok(())
}

pub fn parse(text: &str) -> Result<Script, ParseError> {
    let mut parser = Parser { tokens: lex(text)?, at: 0 };
    let mut statements = Vec::new();
    while parser.peek().0 != Token::Eof {
        statements.push(parser.stmt()?);
    }
    let script = Script { statements };
    check_scopes(&script)?;
    Ok(script)
}

fn pairing_suffix(pairing: &Option<SumPairing>) -> String {
    pairing.map(|p| format!(", {p}")).unwrap_or_default()
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.state.value, self.edge)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Block(kind) => f.write_str(kind.keyword()),
            Expr::Sum { left, right, pairing } => write!(f, "sum({left}, {right}{})", pairing_suffix(pairing)),
            Expr::SelfSum { left, right, pairing } => {
                write!(f, "selfsum({left}, {right}{})", pairing_suffix(pairing))
            }
            Expr::Scale { state, factor } => write!(f, "scale({}, {})", state.value, scalar::format_rational(factor)),
            Expr::Smooth(edge) => write!(f, "smooth({edge})"),
            Expr::SmoothAll(state) => write!(f, "smoothall({})", state.value),
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            StmtKind::Let { name, expr } => write!(f, "let {} = {expr};", name.value),
            StmtKind::Flip { name, vertex } => write!(f, "flip({}, {vertex});", name.value),
            StmtKind::Report { name } => write!(f, "report {};", name.value),
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for stmt in &self.statements {
            writeln!(f, "{stmt}")?;
        }
        Ok(())
    }
}

/// Canonical source text; `parse(&print(s)) == s`.
pub fn print(script: &Script) -> String {
    script.to_string()
}

/// Runs the statements in order and returns the reported states, keyed by name
/// in order of first report. A later report of the same name overwrites the
/// earlier snapshot.
pub fn execute(script: &Script) -> Result<IndexMap<String, ManifoldState>, ExecError> {
    let mut env: IndexMap<String, ManifoldState> = IndexMap::new();
    let mut reports = IndexMap::new();
    for stmt in &script.statements {
        let fail = |source: SurgeryError| ExecError { pos: stmt.pos, source };
        match &stmt.kind {
            StmtKind::Let { name, expr } => {
                let state = eval(&env, expr).map_err(fail)?;
                env.insert(name.value.clone(), state);
            }
            StmtKind::Flip { name, vertex } => {
                let state = lookup(&env, name).map_err(fail)?;
                let flipped = state.flip(*vertex).map_err(fail)?;
                env.insert(name.value.clone(), flipped);
            }
            StmtKind::Report { name } => {
                let state = lookup(&env, name).map_err(fail)?;
                reports.insert(name.value.clone(), state.clone());
            }
        }
    }
    Ok(reports)
}

/// Parses then executes.
pub fn run(text: &str) -> Result<IndexMap<String, ManifoldState>, RunError> {
    let script = parse(text)?;
    Ok(execute(&script)?)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RunError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Exec(#[from] ExecError),
}

fn lookup<'a>(env: &'a IndexMap<String, ManifoldState>, name: &Ident) -> Result<&'a ManifoldState, SurgeryError> {
    env.get(&name.value)
        .ok_or_else(|| SurgeryError::Internal(format!("`{}` unbound at run time", name.value)))
}

fn eval(env: &IndexMap<String, ManifoldState>, expr: &Expr) -> Result<ManifoldState, SurgeryError> {
    let mut state = match expr {
        Expr::Block(kind) => kind.build(),
        Expr::Sum { left, right, pairing } => {
            if left.state.value == right.state.value {
                return Err(SurgeryError::SameState);
            }
            surgery::connected_sum(
                lookup(env, &left.state)?,
                left.edge,
                lookup(env, &right.state)?,
                right.edge,
                pairing.unwrap_or_default(),
            )?
        }
        Expr::SelfSum { left, right, pairing } => {
            if left.state.value != right.state.value {
                return Err(SurgeryError::Internal(format!(
                    "selfsum needs both crossings in one state, got `{}` and `{}`",
                    left.state.value, right.state.value
                )));
            }
            surgery::self_connected_sum(lookup(env, &left.state)?, left.edge, right.edge, pairing.unwrap_or_default())?
        }
        Expr::Scale { state, factor } => surgery::scale(lookup(env, state)?, factor)?,
        Expr::Smooth(edge) => surgery::smooth_crossing(lookup(env, &edge.state)?, edge.edge)?,
        Expr::SmoothAll(state) => surgery::smooth_all(lookup(env, state)?)?,
    };
    state.label = expr.to_string();
    Ok(state)
}

/// Names bound by the script, in binding order.
pub fn bindings(script: &Script) -> Vec<&str> {
    let mut seen = HashSet::new();
    script
        .statements
        .iter()
        .filter_map(|s| match &s.kind {
            StmtKind::Let { name, .. } if seen.insert(name.value.as_str()) => Some(name.value.as_str()),
            _ => None,
        })
        .collect()
}
