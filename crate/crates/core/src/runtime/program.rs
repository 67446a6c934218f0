//! The guarded-command reactive language and its parser.
//!
//! A program is line-oriented text (see `docs/program-format.md`):
//!
//! ```text
//! # door controller
//! inputs: open close lock
//! outputs: ok alarm
//! var pos 0..3 = 0
//! rule in == open && pos < 3 -> pos := pos + 1; emit ok
//! rule in == lock && pos == 3 -> ; error 7
//! ```
//!
//! Rules are checked in order; the first rule whose guard holds fires. When
//! no rule matches, an implicit default rule emits the reserved `invalid`
//! output and leaves all variables unchanged.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::fsm::{Alphabet, SymbolId};
use crate::util::{rng_from_seed, RngCore};

use super::{error_label, ErrorId, INVALID_LABEL};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at {line}:{col}: {msg}")]
pub struct ProgramParseError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

/// What happens when an assignment leaves a variable's declared range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Overflow {
    /// Clamp to the nearer bound (the default).
    #[default]
    Clamp,
    /// Wrap around modulo the range size.
    Wrap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
    pub init: i64,
}

impl VarDecl {
    /// Bring a value back into `lo..=hi` according to the overflow mode.
    pub fn confine(&self, value: i64, mode: Overflow) -> i64 {
        if value >= self.lo && value <= self.hi {
            return value;
        }
        match mode {
            Overflow::Clamp => value.clamp(self.lo, self.hi),
            Overflow::Wrap => {
                let span = (self.hi - self.lo) + 1;
                let off = (value - self.lo).rem_euclid(span);
                self.lo + off
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntExpr {
    Const(i64),
    Var(usize),
    Neg(Box<IntExpr>),
    Add(Box<IntExpr>, Box<IntExpr>),
    Sub(Box<IntExpr>, Box<IntExpr>),
    Mul(Box<IntExpr>, Box<IntExpr>),
}

impl IntExpr {
    pub fn eval(&self, vals: &[i64]) -> i64 {
        match self {
            IntExpr::Const(c) => *c,
            IntExpr::Var(i) => vals[*i],
            IntExpr::Neg(e) => e.eval(vals).wrapping_neg(),
            IntExpr::Add(a, b) => a.eval(vals).wrapping_add(b.eval(vals)),
            IntExpr::Sub(a, b) => a.eval(vals).wrapping_sub(b.eval(vals)),
            IntExpr::Mul(a, b) => a.eval(vals).wrapping_mul(b.eval(vals)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl RelOp {
    fn holds(self, a: i64, b: i64) -> bool {
        match self {
            RelOp::Eq => a == b,
            RelOp::Ne => a != b,
            RelOp::Lt => a < b,
            RelOp::Le => a <= b,
            RelOp::Gt => a > b,
            RelOp::Ge => a >= b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Guard {
    Const(bool),
    /// The current input equals the given symbol.
    InputIs(SymbolId),
    Cmp(IntExpr, RelOp, IntExpr),
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
}

impl Guard {
    pub fn holds(&self, vals: &[i64], input: SymbolId) -> bool {
        match self {
            Guard::Const(b) => *b,
            Guard::InputIs(s) => input == *s,
            Guard::Cmp(a, op, b) => op.holds(a.eval(vals), b.eval(vals)),
            Guard::Not(g) => !g.holds(vals, input),
            Guard::And(a, b) => a.holds(vals, input) && b.holds(vals, input),
            Guard::Or(a, b) => a.holds(vals, input) || b.holds(vals, input),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    Emit(SymbolId),
    Error(ErrorId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardedRule {
    pub guard: Guard,
    /// `(variable index, expression)` pairs applied in order.
    pub assigns: Vec<(usize, IntExpr)>,
    pub action: Action,
    /// Instrumentation value recorded when the rule fires; unique per rule,
    /// drawn from a seedable PRNG at load time.
    pub location_id: u16,
}

/// A loaded reactive program: alphabets, bounded variables and ordered rules.
/// Immutable after load; execution state lives in
/// [`super::TargetInstance`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReactiveProgram {
    pub(crate) inputs: Alphabet,
    pub(crate) outputs: Alphabet,
    pub(crate) vars: Vec<VarDecl>,
    pub(crate) rules: Vec<GuardedRule>,
    pub(crate) overflow: Overflow,
    pub(crate) invalid_output: SymbolId,
    pub(crate) error_outputs: BTreeMap<ErrorId, SymbolId>,
    /// Instrumentation location of the implicit default rule.
    pub(crate) default_location: u16,
}

impl ReactiveProgram {
    /// Loads a program from source text. `instrumentation_seed` drives the
    /// PRNG assigning rule locations, so instrumentation is reproducible.
    pub fn parse(text: &str, instrumentation_seed: u64) -> Result<ReactiveProgram, ProgramParseError> {
        let mut builder = Builder::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx as u32 + 1;
            let line = match raw_line.find('#') {
                Some(p) => &raw_line[..p],
                None => raw_line,
            };
            if line.trim().is_empty() {
                continue;
            }
            builder.line(line, line_no)?;
        }
        builder.finish(instrumentation_seed)
    }

    pub fn inputs(&self) -> &Alphabet {
        &self.inputs
    }

    /// Declared outputs plus the reserved `invalid` and `error<id>` symbols.
    pub fn outputs(&self) -> &Alphabet {
        &self.outputs
    }

    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    pub fn rules(&self) -> &[GuardedRule] {
        &self.rules
    }

    pub fn overflow(&self) -> Overflow {
        self.overflow
    }

    pub fn invalid_output(&self) -> SymbolId {
        self.invalid_output
    }

    pub fn error_outputs(&self) -> &BTreeMap<ErrorId, SymbolId> {
        &self.error_outputs
    }

    pub fn default_location(&self) -> u16 {
        self.default_location
    }
}

#[derive(Default)]
struct Builder {
    inputs: Option<Alphabet>,
    declared_outputs: Option<Vec<String>>,
    overflow: Option<Overflow>,
    vars: Vec<VarDecl>,
    var_index: HashMap<String, usize>,
    // guard/assigns/action plus source line, locations assigned at finish
    rules: Vec<(Guard, Vec<(usize, IntExpr)>, RawAction, u32)>,
}

enum RawAction {
    Emit(String),
    Error(ErrorId),
}

fn err(line: u32, col: u32, msg: impl Into<String>) -> ProgramParseError {
    ProgramParseError {
        line,
        col,
        msg: msg.into(),
    }
}

impl Builder {
    fn line(&mut self, line: &str, line_no: u32) -> Result<(), ProgramParseError> {
        let trimmed = line.trim_start();
        if let Some(rest) = trimmed.strip_prefix("inputs:") {
            if self.inputs.is_some() {
                return Err(err(line_no, 1, "duplicate inputs: header"));
            }
            let alphabet = Alphabet::new(rest.split_whitespace())
                .map_err(|e| err(line_no, 1, format!("bad inputs: {e}")))?;
            self.inputs = Some(alphabet);
            return Ok(());
        }
        if let Some(rest) = trimmed.strip_prefix("outputs:") {
            if self.declared_outputs.is_some() {
                return Err(err(line_no, 1, "duplicate outputs: header"));
            }
            let labels: Vec<String> = rest.split_whitespace().map(String::from).collect();
            if labels.is_empty() {
                return Err(err(line_no, 1, "outputs: header declares no symbols"));
            }
            for l in &labels {
                if l == INVALID_LABEL || super::error_id_of_label(l).is_some() {
                    return Err(err(
                        line_no,
                        1,
                        format!("output label {l:?} collides with a reserved output"),
                    ));
                }
            }
            self.declared_outputs = Some(labels);
            return Ok(());
        }
        if let Some(rest) = trimmed.strip_prefix("overflow:") {
            if self.overflow.is_some() {
                return Err(err(line_no, 1, "duplicate overflow: header"));
            }
            self.overflow = Some(match rest.trim() {
                "clamp" => Overflow::Clamp,
                "wrap" => Overflow::Wrap,
                other => {
                    return Err(err(
                        line_no,
                        1,
                        format!("overflow mode must be clamp or wrap, got {other:?}"),
                    ))
                }
            });
            return Ok(());
        }
        if trimmed.starts_with("var") {
            return self.var_line(trimmed, line_no);
        }
        if trimmed.starts_with("rule") {
            return self.rule_line(line, line_no);
        }
        Err(err(
            line_no,
            1,
            format!(
                "unrecognized line {:?}: expected inputs:, outputs:, overflow:, var or rule",
                trimmed
            ),
        ))
    }

    fn var_line(&mut self, line: &str, line_no: u32) -> Result<(), ProgramParseError> {
        // var NAME LO..HI = INIT
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 5 || tokens[0] != "var" || tokens[3] != "=" {
            return Err(err(line_no, 1, "expected: var <name> <lo>..<hi> = <init>"));
        }
        let name = tokens[1];
        if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            || name.chars().next().is_some_and(|c| c.is_ascii_digit())
        {
            return Err(err(line_no, 1, format!("bad variable name {name:?}")));
        }
        if self.var_index.contains_key(name) {
            return Err(err(line_no, 1, format!("duplicate variable {name:?}")));
        }
        let Some((lo_s, hi_s)) = tokens[2].split_once("..") else {
            return Err(err(line_no, 1, format!("bad range {:?}", tokens[2])));
        };
        let lo: i64 = lo_s
            .parse()
            .map_err(|_| err(line_no, 1, format!("bad range bound {lo_s:?}")))?;
        let hi: i64 = hi_s
            .parse()
            .map_err(|_| err(line_no, 1, format!("bad range bound {hi_s:?}")))?;
        if lo > hi {
            return Err(err(line_no, 1, format!("empty range {lo}..{hi}")));
        }
        let init: i64 = tokens[4]
            .parse()
            .map_err(|_| err(line_no, 1, format!("bad initial value {:?}", tokens[4])))?;
        if init < lo || init > hi {
            return Err(err(
                line_no,
                1,
                format!("initial value {init} outside declared bounds {lo}..{hi}"),
            ));
        }
        self.var_index.insert(name.to_string(), self.vars.len());
        self.vars.push(VarDecl {
            name: name.to_string(),
            lo,
            hi,
            init,
        });
        Ok(())
    }

    fn rule_line(&mut self, line: &str, line_no: u32) -> Result<(), ProgramParseError> {
        let tokens = tokenize(line, line_no)?;
        let mut p = RuleParser {
            tokens: &tokens,
            pos: 0,
            line: line_no,
            inputs: self.inputs.as_ref().ok_or_else(|| {
                err(line_no, 1, "rule appears before the inputs: header")
            })?,
            vars: &self.var_index,
        };
        p.expect_ident("rule")?;
        let guard = p.guard()?;
        p.expect(Tok::Arrow)?;
        let mut assigns = Vec::new();
        if !p.peek_is(&Tok::Semi) {
            loop {
                let (var, expr) = p.assignment()?;
                assigns.push((var, expr));
                if p.peek_is(&Tok::Comma) {
                    p.advance();
                } else {
                    break;
                }
            }
        }
        p.expect(Tok::Semi)?;
        let action = match p.next_ident("emit or error")?.as_str() {
            "emit" => RawAction::Emit(p.next_ident("output label")?),
            "error" => {
                let id = p.next_int("error id")?;
                if id <= 0 || id > ErrorId::MAX as i64 {
                    return Err(err(line_no, p.col(), "error ids are positive integers"));
                }
                RawAction::Error(id as ErrorId)
            }
            other => {
                return Err(err(
                    line_no,
                    p.col(),
                    format!("expected emit or error, got {other:?}"),
                ))
            }
        };
        p.expect_end()?;
        self.rules.push((guard, assigns, action, line_no));
        Ok(())
    }

    fn finish(self, instrumentation_seed: u64) -> Result<ReactiveProgram, ProgramParseError> {
        let inputs = self
            .inputs
            .ok_or_else(|| err(1, 1, "missing inputs: header"))?;
        let declared = self
            .declared_outputs
            .ok_or_else(|| err(1, 1, "missing outputs: header"))?;

        // Collect error ids (must be unique) and resolve emit labels.
        let mut error_ids: Vec<ErrorId> = Vec::new();
        for (_, _, action, line_no) in &self.rules {
            if let RawAction::Error(id) = action {
                if error_ids.contains(id) {
                    return Err(err(*line_no, 1, format!("duplicate error id {id}")));
                }
                error_ids.push(*id);
            }
        }
        error_ids.sort_unstable();

        let mut outputs = Alphabet::new(declared.clone())
            .map_err(|e| err(1, 1, format!("bad outputs: {e}")))?;
        let invalid_output = outputs
            .push(INVALID_LABEL.to_string())
            .expect("reserved label collision was checked at parse time");
        let mut error_outputs = BTreeMap::new();
        for id in &error_ids {
            let sym = outputs
                .push(error_label(*id))
                .expect("reserved label collision was checked at parse time");
            error_outputs.insert(*id, sym);
        }

        // Assign pseudo-random, unique 16-bit locations: one per rule plus
        // one for the implicit default rule.
        let mut rng = rng_from_seed(instrumentation_seed);
        let mut used = std::collections::HashSet::new();
        let mut fresh_location = || loop {
            let loc = (rng.next_u64() & 0xffff) as u16;
            if used.insert(loc) {
                return loc;
            }
        };

        let mut rules = Vec::with_capacity(self.rules.len());
        for (guard, assigns, action, line_no) in self.rules {
            let action = match action {
                RawAction::Emit(label) => Action::Emit(outputs.id_of(&label).ok_or_else(|| {
                    err(line_no, 1, format!("emit of undeclared output {label:?}"))
                })?),
                RawAction::Error(id) => Action::Error(id),
            };
            rules.push(GuardedRule {
                guard,
                assigns,
                action,
                location_id: fresh_location(),
            });
        }
        let default_location = fresh_location();

        Ok(ReactiveProgram {
            inputs,
            outputs,
            vars: self.vars,
            rules,
            overflow: self.overflow.unwrap_or_default(),
            invalid_output,
            error_outputs,
            default_location,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Arrow,
    Assign,
    Comma,
    Semi,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Bang,
    AndAnd,
    OrOr,
    Rel(RelOp),
}

fn tokenize(line: &str, line_no: u32) -> Result<Vec<(Tok, u32)>, ProgramParseError> {
    let mut out = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let col = i as u32 + 1;
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let two = if i + 1 < bytes.len() {
            &line[i..i + 2]
        } else {
            ""
        };
        let tok = match two {
            "->" => {
                i += 2;
                Tok::Arrow
            }
            ":=" => {
                i += 2;
                Tok::Assign
            }
            "==" => {
                i += 2;
                Tok::Rel(RelOp::Eq)
            }
            "!=" => {
                i += 2;
                Tok::Rel(RelOp::Ne)
            }
            "<=" => {
                i += 2;
                Tok::Rel(RelOp::Le)
            }
            ">=" => {
                i += 2;
                Tok::Rel(RelOp::Ge)
            }
            "&&" => {
                i += 2;
                Tok::AndAnd
            }
            "||" => {
                i += 2;
                Tok::OrOr
            }
            _ => match c {
                '<' => {
                    i += 1;
                    Tok::Rel(RelOp::Lt)
                }
                '>' => {
                    i += 1;
                    Tok::Rel(RelOp::Gt)
                }
                '(' => {
                    i += 1;
                    Tok::LParen
                }
                ')' => {
                    i += 1;
                    Tok::RParen
                }
                '+' => {
                    i += 1;
                    Tok::Plus
                }
                '-' => {
                    i += 1;
                    Tok::Minus
                }
                '*' => {
                    i += 1;
                    Tok::Star
                }
                '!' => {
                    i += 1;
                    Tok::Bang
                }
                ',' => {
                    i += 1;
                    Tok::Comma
                }
                ';' => {
                    i += 1;
                    Tok::Semi
                }
                c if c.is_ascii_digit() => {
                    let start = i;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                    let value: i64 = line[start..i].parse().map_err(|_| {
                        err(line_no, col, format!("integer literal {:?} too large", &line[start..i]))
                    })?;
                    Tok::Int(value)
                }
                c if c.is_ascii_alphanumeric() || c == '_' => {
                    let start = i;
                    while i < bytes.len()
                        && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                    {
                        i += 1;
                    }
                    Tok::Ident(line[start..i].to_string())
                }
                other => {
                    return Err(err(line_no, col, format!("unexpected character {other:?}")))
                }
            },
        };
        out.push((tok, col));
    }
    Ok(out)
}

struct RuleParser<'a> {
    tokens: &'a [(Tok, u32)],
    pos: usize,
    line: u32,
    inputs: &'a Alphabet,
    vars: &'a HashMap<String, usize>,
}

impl<'a> RuleParser<'a> {
    fn col(&self) -> u32 {
        self.tokens
            .get(self.pos)
            .map(|(_, c)| *c)
            .unwrap_or_else(|| self.tokens.last().map(|(_, c)| c + 1).unwrap_or(1))
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn peek_is(&self, tok: &Tok) -> bool {
        self.peek() == Some(tok)
    }

    fn advance(&mut self) -> Option<&Tok> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t);
        self.pos += 1;
        t
    }

    fn fail(&self, msg: impl Into<String>) -> ProgramParseError {
        err(self.line, self.col(), msg)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ProgramParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.fail(format!("expected {tok:?}, found {:?}", self.peek())))
        }
    }

    fn expect_ident(&mut self, word: &str) -> Result<(), ProgramParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == word => {
                self.pos += 1;
                Ok(())
            }
            other => Err(self.fail(format!("expected {word:?}, found {other:?}"))),
        }
    }

    fn next_ident(&mut self, what: &str) -> Result<String, ProgramParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            other => Err(self.fail(format!("expected {what}, found {other:?}"))),
        }
    }

    fn next_int(&mut self, what: &str) -> Result<i64, ProgramParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.pos += 1;
                Ok(v)
            }
            other => Err(self.fail(format!("expected {what}, found {other:?}"))),
        }
    }

    fn expect_end(&mut self) -> Result<(), ProgramParseError> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(self.fail(format!("trailing tokens starting at {:?}", self.peek())))
        }
    }

    // guard := and_chain ('||' and_chain)*
    fn guard(&mut self) -> Result<Guard, ProgramParseError> {
        let mut left = self.and_chain()?;
        while self.peek_is(&Tok::OrOr) {
            self.advance();
            let right = self.and_chain()?;
            left = Guard::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn and_chain(&mut self) -> Result<Guard, ProgramParseError> {
        let mut left = self.guard_unary()?;
        while self.peek_is(&Tok::AndAnd) {
            self.advance();
            let right = self.guard_unary()?;
            left = Guard::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn guard_unary(&mut self) -> Result<Guard, ProgramParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.advance();
                Ok(Guard::Not(Box::new(self.guard_unary()?)))
            }
            Some(Tok::LParen) => {
                // Could be a parenthesized guard or a parenthesized integer
                // expression starting a comparison; try the guard first.
                let save = self.pos;
                self.advance();
                if let Ok(inner) = self.guard() {
                    if self.peek_is(&Tok::RParen) {
                        self.advance();
                        // `(x + 1) < y` parses `x + 1` as a degenerate guard
                        // only if `guard()` accepted it, which it does not;
                        // so a closing paren here really ends a guard.
                        return Ok(inner);
                    }
                }
                self.pos = save;
                self.comparison()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Guard, ProgramParseError> {
        match self.peek().cloned() {
            Some(Tok::Ident(word)) if word == "true" => {
                self.advance();
                Ok(Guard::Const(true))
            }
            Some(Tok::Ident(word)) if word == "false" => {
                self.advance();
                Ok(Guard::Const(false))
            }
            Some(Tok::Ident(word)) if word == "in" => {
                self.advance();
                let op = match self.advance() {
                    Some(Tok::Rel(RelOp::Eq)) => RelOp::Eq,
                    Some(Tok::Rel(RelOp::Ne)) => RelOp::Ne,
                    _ => {
                        self.pos -= 1;
                        return Err(self.fail("the input test supports only == and !="));
                    }
                };
                let label = self.next_ident("input label")?;
                let sym = self.inputs.id_of(&label).ok_or_else(|| {
                    err(self.line, self.col(), format!("unknown input {label:?}"))
                })?;
                let test = Guard::InputIs(sym);
                Ok(if op == RelOp::Eq {
                    test
                } else {
                    Guard::Not(Box::new(test))
                })
            }
            _ => self.comparison(),
        }
    }

    fn comparison(&mut self) -> Result<Guard, ProgramParseError> {
        let left = self.int_expr()?;
        let op = match self.advance() {
            Some(Tok::Rel(op)) => *op,
            _ => {
                self.pos -= 1;
                return Err(self.fail("expected a comparison operator"));
            }
        };
        let right = self.int_expr()?;
        Ok(Guard::Cmp(left, op, right))
    }

    fn int_expr(&mut self) -> Result<IntExpr, ProgramParseError> {
        let mut left = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.advance();
                    left = IntExpr::Add(Box::new(left), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.advance();
                    left = IntExpr::Sub(Box::new(left), Box::new(self.term()?));
                }
                _ => return Ok(left),
            }
        }
    }

    fn term(&mut self) -> Result<IntExpr, ProgramParseError> {
        let mut left = self.factor()?;
        while self.peek_is(&Tok::Star) {
            self.advance();
            left = IntExpr::Mul(Box::new(left), Box::new(self.factor()?));
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<IntExpr, ProgramParseError> {
        match self.peek().cloned() {
            Some(Tok::Int(v)) => {
                self.advance();
                Ok(IntExpr::Const(v))
            }
            Some(Tok::Minus) => {
                self.advance();
                Ok(IntExpr::Neg(Box::new(self.factor()?)))
            }
            Some(Tok::LParen) => {
                self.advance();
                let e = self.int_expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                let Some(&idx) = self.vars.get(&name) else {
                    return Err(self.fail(format!("unknown variable {name:?}")));
                };
                self.advance();
                Ok(IntExpr::Var(idx))
            }
            other => Err(self.fail(format!("expected an integer expression, found {other:?}"))),
        }
    }

    fn assignment(&mut self) -> Result<(usize, IntExpr), ProgramParseError> {
        let name = self.next_ident("variable name")?;
        let Some(&idx) = self.vars.get(&name) else {
            return Err(self.fail(format!("assignment to unknown variable {name:?}")));
        };
        self.expect(Tok::Assign)?;
        let expr = self.int_expr()?;
        Ok((idx, expr))
    }
}
