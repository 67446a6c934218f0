//! DOT serialization of Mealy machines.
//!
//! The format is a plain digraph: one node per state named `s0..s{n-1}`, the
//! initial state marked by an unlabeled edge from a hidden `__start` node,
//! and one edge per transition labelled `"input/output"`. The parser accepts
//! arbitrary whitespace and ignores node attribute statements it does not
//! know.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::{Alphabet, MealyMachine, StateId, SymbolId};

#[derive(Debug, Error, PartialEq, Eq)]
#[error("dot parse error at {line}:{col}: {msg}")]
pub struct DotParseError {
    pub line: u32,
    pub col: u32,
    pub msg: String,
}

impl MealyMachine {
    /// Renders the machine in the DOT dialect described in the module docs.
    /// Output is deterministic: states in index order, edges in input order.
    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        s.push_str("digraph mealy {\n");
        s.push_str("    __start [shape=none label=\"\"];\n");
        for q in self.states() {
            let _ = writeln!(s, "    s{q} [shape=circle];");
        }
        let _ = writeln!(s, "    __start -> s{};", self.initial());
        for q in self.states() {
            for a in self.inputs().ids() {
                let (t, o) = self.step(q, a);
                let _ = writeln!(
                    s,
                    "    s{q} -> s{t} [label=\"{}/{}\"];",
                    self.inputs().label(a),
                    self.outputs().label(o)
                );
            }
        }
        s.push_str("}\n");
        s
    }

    /// Parses a machine from DOT text produced by [`MealyMachine::to_dot`] or
    /// any equivalent digraph following the same conventions.
    ///
    /// Input and output alphabets are rebuilt from edge labels in order of
    /// first appearance, so `from_dot(to_dot(m))` reproduces `m` exactly up
    /// to unused output symbols.
    pub fn from_dot(text: &str) -> Result<MealyMachine, DotParseError> {
        Parser::new(text).parse()
    }
}

struct Parser<'a> {
    rest: &'a str,
    line: u32,
    col: u32,
}

#[derive(Debug, PartialEq)]
enum Token {
    Ident(String),
    Arrow,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Equals,
    Quoted(String),
    Eof,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Parser<'a> {
        Parser {
            rest: text,
            line: 1,
            col: 1,
        }
    }

    fn error(&self, msg: impl Into<String>) -> DotParseError {
        DotParseError {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn bump(&mut self, n_bytes: usize) {
        let (consumed, rest) = self.rest.split_at(n_bytes);
        for c in consumed.chars() {
            if c == '\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
        self.rest = rest;
    }

    fn skip_ws(&mut self) {
        loop {
            let trimmed = self.rest.trim_start_matches(|c: char| c.is_whitespace());
            let n = self.rest.len() - trimmed.len();
            if n > 0 {
                self.bump(n);
            }
            // // comments, as emitted by some graphviz tools
            if self.rest.starts_with("//") {
                let end = self.rest.find('\n').unwrap_or(self.rest.len());
                self.bump(end);
                continue;
            }
            break;
        }
    }

    fn next_token(&mut self) -> Result<Token, DotParseError> {
        self.skip_ws();
        let Some(c) = self.rest.chars().next() else {
            return Ok(Token::Eof);
        };
        match c {
            '{' => {
                self.bump(1);
                Ok(Token::LBrace)
            }
            '}' => {
                self.bump(1);
                Ok(Token::RBrace)
            }
            '[' => {
                self.bump(1);
                Ok(Token::LBracket)
            }
            ']' => {
                self.bump(1);
                Ok(Token::RBracket)
            }
            ';' => {
                self.bump(1);
            Ok(Token::Semi)
            }
            '=' => {
                self.bump(1);
                Ok(Token::Equals)
            }
            '-' => {
                if self.rest.starts_with("->") {
                    self.bump(2);
                    Ok(Token::Arrow)
                } else {
                    Err(self.error("expected '->'"))
                }
            }
            '"' => {
                let body = &self.rest[1..];
                let Some(end) = body.find('"') else {
                    return Err(self.error("unterminated string"));
                };
                let value = body[..end].to_string();
                self.bump(end + 2);
                Ok(Token::Quoted(value))
            }
            c if c.is_alphanumeric() || c == '_' => {
                let end = self
                    .rest
                    .find(|ch: char| !(ch.is_alphanumeric() || ch == '_'))
                    .unwrap_or(self.rest.len());
                let ident = self.rest[..end].to_string();
                self.bump(end);
                Ok(Token::Ident(ident))
            }
            other => Err(self.error(format!("unexpected character {other:?}"))),
        }
    }

    fn expect_ident(&mut self, expected: &str) -> Result<(), DotParseError> {
        match self.next_token()? {
            Token::Ident(s) if s == expected => Ok(()),
            other => Err(self.error(format!("expected {expected:?}, found {other:?}"))),
        }
    }

    /// Consumes a bracketed attribute list, returning the `label` value if
    /// present. Unknown attributes are ignored.
    fn parse_attrs(&mut self) -> Result<Option<String>, DotParseError> {
        let mut label = None;
        loop {
            match self.next_token()? {
                Token::RBracket => return Ok(label),
                Token::Ident(key) => {
                    // attribute values may be `= value` or bare flags
                    let save = (self.rest, self.line, self.col);
                    match self.next_token()? {
                        Token::Equals => {
                            let value = match self.next_token()? {
                                Token::Quoted(v) => v,
                                Token::Ident(v) => v,
                                other => {
                                    return Err(
                                        self.error(format!("bad attribute value: {other:?}"))
                                    )
                                }
                            };
                            if key == "label" {
                                label = Some(value);
                            }
                        }
                        _ => {
                            // bare flag; rewind and continue
                            self.rest = save.0;
                            self.line = save.1;
                            self.col = save.2;
                        }
                    }
                }
                Token::Eof => return Err(self.error("unterminated attribute list")),
                _ => {}
            }
        }
    }

    fn parse(mut self) -> Result<MealyMachine, DotParseError> {
        self.expect_ident("digraph")?;
        // optional graph name
        let save = (self.rest, self.line, self.col);
        match self.next_token()? {
            Token::Ident(_) => match self.next_token()? {
                Token::LBrace => {}
                other => return Err(self.error(format!("expected '{{', found {other:?}"))),
            },
            Token::LBrace => {}
            _ => {
                self.rest = save.0;
                self.line = save.1;
                self.col = save.2;
                return Err(self.error("expected '{'"));
            }
        }

        let mut in_labels: Vec<String> = Vec::new();
        let mut out_labels: Vec<String> = Vec::new();
        let mut in_map: HashMap<String, SymbolId> = HashMap::new();
        let mut out_map: HashMap<String, SymbolId> = HashMap::new();
        let mut edges: Vec<(String, String, SymbolId, SymbolId)> = Vec::new();
        let mut initial_name: Option<String> = None;

        loop {
            let tok = self.next_token()?;
            match tok {
                Token::RBrace => break,
                Token::Eof => return Err(self.error("missing closing '}'")),
                Token::Semi => continue,
                Token::Ident(from) => {
                    // either a node statement (ignored) or an edge
                    let save = (self.rest, self.line, self.col);
                    match self.next_token()? {
                        Token::Arrow => {
                            let to = match self.next_token()? {
                                Token::Ident(name) => name,
                                other => {
                                    return Err(self.error(format!(
                                        "expected target node, found {other:?}"
                                    )))
                                }
                            };
                            // optional attribute list with the edge label
                            let save2 = (self.rest, self.line, self.col);
                            let label = match self.next_token()? {
                                Token::LBracket => self.parse_attrs()?,
                                _ => {
                                    self.rest = save2.0;
                                    self.line = save2.1;
                                    self.col = save2.2;
                                    None
                                }
                            };
                            if from == "__start" {
                                if label.is_some() {
                                    return Err(
                                        self.error("__start edge must not carry a label")
                                    );
                                }
                                if initial_name.replace(to).is_some() {
                                    return Err(self.error("multiple __start edges"));
                                }
                            } else {
                                let Some(label) = label else {
                                    return Err(self.error(format!(
                                        "transition {from} -> {to} is missing a label"
                                    )));
                                };
                                let Some((in_label, out_label)) = label.split_once('/') else {
                                    return Err(self.error(format!(
                                        "edge label {label:?} is missing the '/' separator"
                                    )));
                                };
                                if in_label.is_empty() || out_label.is_empty() {
                                    return Err(self.error(format!(
                                        "edge label {label:?} has an empty side"
                                    )));
                                }
                                let next_in = in_map.len() as SymbolId;
                                let a = *in_map.entry(in_label.to_string()).or_insert(next_in);
                                if a == next_in {
                                    in_labels.push(in_label.to_string());
                                }
                                let next_out = out_map.len() as SymbolId;
                                let o = *out_map.entry(out_label.to_string()).or_insert(next_out);
                                if o == next_out {
                                    out_labels.push(out_label.to_string());
                                }
                                edges.push((from, to, a, o));
                            }
                        }
                        Token::LBracket => {
                            // node statement with attributes: ignore them all
                            let _ = self.parse_attrs()?;
                        }
                        Token::Semi => {
                            // bare node statement
                        }
                        _ => {
                            // something else entirely; rewind for a clearer error
                            self.rest = save.0;
                            self.line = save.1;
                            self.col = save.2;
                            return Err(self.error(format!(
                                "expected '->' or attributes after node {from:?}"
                            )));
                        }
                    }
                }
                other => return Err(self.error(format!("unexpected token {other:?}"))),
            }
        }

        if in_labels.is_empty() {
            return Err(self.error("graph contains no labelled transitions"));
        }
        let Some(initial_name) = initial_name else {
            return Err(self.error("missing __start edge marking the initial state"));
        };
        let inputs = Alphabet::new(in_labels)
            .map_err(|e| self.error(format!("bad input label: {e}")))?;
        let outputs = Alphabet::new(out_labels)
            .map_err(|e| self.error(format!("bad output label: {e}")))?;

        // map state names s0..s{n-1} to indices
        let state_id = |name: &str| -> Result<StateId, DotParseError> {
            name.strip_prefix('s')
                .and_then(|digits| digits.parse::<StateId>().ok())
                .ok_or_else(|| DotParseError {
                    line: 0,
                    col: 0,
                    msg: format!("state name {name:?} does not match s<index>"),
                })
        };
        let mut n_states = 0;
        for (from, to, _, _) in &edges {
            n_states = n_states.max(state_id(from)? + 1).max(state_id(to)? + 1);
        }
        let initial = state_id(&initial_name)?;
        if initial >= n_states {
            return Err(DotParseError {
                line: 0,
                col: 0,
                msg: format!("initial state s{initial} has no transitions"),
            });
        }

        let k = inputs.len();
        let mut table: Vec<Option<(StateId, SymbolId)>> = vec![None; n_states as usize * k];
        for (from, to, a, o) in &edges {
            let f = state_id(from)?;
            let t = state_id(to)?;
            let slot = &mut table[f as usize * k + *a as usize];
            if let Some(previous) = slot {
                if *previous != (t, *o) {
                    return Err(DotParseError {
                        line: 0,
                        col: 0,
                        msg: format!(
                            "conflicting transitions from s{f} on {:?}",
                            inputs.label(*a)
                        ),
                    });
                }
            }
            *slot = Some((t, *o));
        }
        let mut transitions = Vec::with_capacity(table.len());
        for (i, entry) in table.into_iter().enumerate() {
            match entry {
                Some(t) => transitions.push(t),
                None => {
                    return Err(DotParseError {
                        line: 0,
                        col: 0,
                        msg: format!(
                            "machine is incomplete: state s{} has no transition on {:?}",
                            i / k,
                            inputs.label((i % k) as SymbolId)
                        ),
                    })
                }
            }
        }
        MealyMachine::new(inputs, outputs, n_states, initial, transitions).map_err(|e| {
            DotParseError {
                line: 0,
                col: 0,
                msg: format!("invalid machine: {e}"),
            }
        })
    }
}
