//! Branch and loop condition language shared by behavior graphs, generated
//! BPEL and the simulator.
//!
//! ```text
//! expr       := term (('and' | 'or') term)*
//! term       := ['not'] comparison
//! comparison := path op literal
//! op         := '=' | '!=' | '<' | '<=' | '>' | '>='
//! path       := '$' var ('.' field)*
//! literal    := integer | quoted text | 'true' | 'false'
//! ```
//!
//! `and` binds tighter than `or`. A path without fields reads the `value`
//! field, which is where simple-typed messages keep their content.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Text(String),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Bool(_) => "boolean",
            Value::Int(_) => "integer",
            Value::Text(_) => "text",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Text(s) => {
                f.write_str("'")?;
                for c in s.chars() {
                    if c == '\'' || c == '\\' {
                        f.write_str("\\")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("'")
            }
        }
    }
}

/// A flat record: dotted field paths to literal values.
pub type Message = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub variable: String,
    pub fields: Vec<String>,
}

impl Path {
    /// Dotted field key inside the variable's message.
    pub fn field_key(&self) -> String {
        if self.fields.is_empty() {
            "value".to_string()
        } else {
            self.fields.join(".")
        }
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "${}", self.variable)?;
        for field in &self.fields {
            write!(f, ".{field}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Comparison {
    pub negated: bool,
    pub path: Path,
    pub op: CmpOp,
    pub literal: Value,
}

/// A condition in disjunctive layout: `or` over `and`-chains of terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Condition {
    pub disjuncts: Vec<Vec<Comparison>>,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        write!(f, "{} {} {}", self.path, self.op.symbol(), self.literal)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, conj) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" or ")?;
            }
            for (j, c) in conj.iter().enumerate() {
                if j > 0 {
                    f.write_str(" and ")?;
                }
                write!(f, "{c}")?;
            }
        }
        Ok(())
    }
}

/// Either side of an assignment copy: a variable path or a literal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Operand {
    Path(Path),
    Literal(Value),
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Path(p) => write!(f, "{p}"),
            Operand::Literal(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("condition `{text}`: {message} at offset {offset}")]
pub struct ParseError {
    pub text: String,
    pub message: String,
    pub offset: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("`{0}` is undefined")]
    Undefined(String),
    #[error("cannot compare {path} ({found}) with {expected} using `{op}`")]
    TypeMismatch {
        path: String,
        found: &'static str,
        expected: &'static str,
        op: &'static str,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Path(Path),
    Int(i64),
    Text(String),
    Word(String),
    Op(CmpOp),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            text: self.src.to_string(),
            message: message.into(),
            offset: self.pos,
        }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn ident(&mut self) -> String {
        let rest = &self.src[self.pos..];
        let len = rest
            .char_indices()
            .find(|&(_, c)| !(c == '_' || c == '-' || c.is_alphanumeric()))
            .map_or(rest.len(), |(i, _)| i);
        self.pos += len;
        rest[..len].to_string()
    }

    fn tokens(mut self) -> Result<Vec<(usize, Token)>, ParseError> {
        let mut out = Vec::new();
        loop {
            while self.peek_char().is_some_and(char::is_whitespace) {
                self.pos += self.peek_char().unwrap().len_utf8();
            }
            let start = self.pos;
            let Some(c) = self.peek_char() else { break };
            let tok = match c {
                '$' => {
                    self.pos += 1;
                    let variable = self.ident();
                    if variable.is_empty() {
                        return Err(self.err("expected variable name after `$`"));
                    }
                    let mut fields = Vec::new();
                    while self.peek_char() == Some('.') {
                        self.pos += 1;
                        let field = self.ident();
                        if field.is_empty() {
                            return Err(self.err("expected field name after `.`"));
                        }
                        fields.push(field);
                    }
                    Token::Path(Path { variable, fields })
                }
                '\'' | '"' => {
                    self.pos += 1;
                    let mut text = String::new();
                    loop {
                        let Some(ch) = self.peek_char() else {
                            return Err(self.err("unterminated text literal"));
                        };
                        self.pos += ch.len_utf8();
                        if ch == c {
                            break;
                        }
                        if ch == '\\' {
                            let Some(esc) = self.peek_char() else {
                                return Err(self.err("dangling escape"));
                            };
                            self.pos += esc.len_utf8();
                            text.push(esc);
                        } else {
                            text.push(ch);
                        }
                    }
                    Token::Text(text)
                }
                '-' | '0'..='9' => {
                    self.pos += 1;
                    while self.peek_char().is_some_and(|c| c.is_ascii_digit()) {
                        self.pos += 1;
                    }
                    let digits = &self.src[start..self.pos];
                    let n = digits.parse().map_err(|_| ParseError {
                        text: self.src.to_string(),
                        message: format!("invalid integer `{digits}`"),
                        offset: start,
                    })?;
                    Token::Int(n)
                }
                '=' => {
                    self.pos += 1;
                    Token::Op(CmpOp::Eq)
                }
                '!' | '<' | '>' => {
                    self.pos += 1;
                    let eq = self.peek_char() == Some('=');
                    if eq {
                        self.pos += 1;
                    }
                    Token::Op(match (c, eq) {
                        ('!', true) => CmpOp::Ne,
                        ('<', false) => CmpOp::Lt,
                        ('<', true) => CmpOp::Le,
                        ('>', false) => CmpOp::Gt,
                        ('>', true) => CmpOp::Ge,
                        _ => {
                            self.pos = start;
                            return Err(self.err("expected `!=`"));
                        }
                    })
                }
                c if c.is_alphabetic() => Token::Word(self.ident()),
                _ => return Err(self.err(format!("unexpected character `{c}`"))),
            };
            out.push((start, tok));
        }
        Ok(out)
    }
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<(usize, Token)>,
    at: usize,
}

impl Parser<'_> {
    fn offset(&self) -> usize {
        self.tokens.get(self.at).map_or(self.src.len(), |(o, _)| *o)
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            text: self.src.to_string(),
            message: message.into(),
            offset: self.offset(),
        }
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.at).map(|(_, t)| t.clone());
        self.at += 1;
        t
    }

    fn peek_word(&self, word: &str) -> bool {
        matches!(self.tokens.get(self.at), Some((_, Token::Word(w))) if w == word)
    }

    fn literal(&mut self) -> Result<Value, ParseError> {
        match self.next() {
            Some(Token::Int(i)) => Ok(Value::Int(i)),
            Some(Token::Text(s)) => Ok(Value::Text(s)),
            Some(Token::Word(w)) if w == "true" => Ok(Value::Bool(true)),
            Some(Token::Word(w)) if w == "false" => Ok(Value::Bool(false)),
            _ => {
                self.at -= 1;
                Err(self.err("expected literal"))
            }
        }
    }

    fn comparison(&mut self) -> Result<Comparison, ParseError> {
        let negated = self.peek_word("not");
        if negated {
            self.at += 1;
        }
        let path = match self.next() {
            Some(Token::Path(p)) => p,
            _ => {
                self.at -= 1;
                return Err(self.err("expected `$variable` path"));
            }
        };
        let op = match self.next() {
            Some(Token::Op(op)) => op,
            _ => {
                self.at -= 1;
                return Err(self.err("expected comparison operator"));
            }
        };
        let literal = self.literal()?;
        Ok(Comparison {
            negated,
            path,
            op,
            literal,
        })
    }

    fn condition(&mut self) -> Result<Condition, ParseError> {
        let mut disjuncts = vec![vec![self.comparison()?]];
        while self.at < self.tokens.len() {
            if self.peek_word("and") {
                self.at += 1;
                let c = self.comparison()?;
                disjuncts.last_mut().unwrap().push(c);
            } else if self.peek_word("or") {
                self.at += 1;
                disjuncts.push(vec![self.comparison()?]);
            } else {
                return Err(self.err("expected `and`, `or` or end of condition"));
            }
        }
        Ok(Condition { disjuncts })
    }
}

impl Condition {
    pub fn parse(text: &str) -> Result<Condition, ParseError> {
        let tokens = Lexer { src: text, pos: 0 }.tokens()?;
        let mut p = Parser {
            src: text,
            tokens,
            at: 0,
        };
        p.condition()
    }

    pub fn comparisons(&self) -> impl Iterator<Item = &Comparison> {
        self.disjuncts.iter().flatten()
    }

    /// Names of every variable the condition reads.
    pub fn variables(&self) -> BTreeSet<&str> {
        self.comparisons().map(|c| c.path.variable.as_str()).collect()
    }

    /// Rewrites variable names through `rename`; names it returns `None`
    /// for are left as they are.
    pub fn rename_variables(&self, rename: impl Fn(&str) -> Option<String>) -> Condition {
        let mut out = self.clone();
        for conj in &mut out.disjuncts {
            for c in conj {
                if let Some(n) = rename(&c.path.variable) {
                    c.path.variable = n;
                }
            }
        }
        out
    }

    /// Evaluates left to right with short-circuiting, so type errors in
    /// branches that are never reached do not surface.
    pub fn evaluate(&self, lookup: impl Fn(&Path) -> Option<Value>) -> Result<bool, EvalError> {
        for conj in &self.disjuncts {
            let mut all = true;
            for c in conj {
                if !c.evaluate(&lookup)? {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

impl Comparison {
    fn evaluate(&self, lookup: &impl Fn(&Path) -> Option<Value>) -> Result<bool, EvalError> {
        let value = lookup(&self.path).ok_or_else(|| EvalError::Undefined(self.path.to_string()))?;
        let ord = match (&value, &self.literal) {
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Text(a), Value::Text(b)) => a.cmp(b),
            (Value::Bool(a), Value::Bool(b)) if matches!(self.op, CmpOp::Eq | CmpOp::Ne) => a.cmp(b),
            _ => {
                return Err(EvalError::TypeMismatch {
                    path: self.path.to_string(),
                    found: value.type_name(),
                    expected: self.literal.type_name(),
                    op: self.op.symbol(),
                })
            }
        };
        let result = match self.op {
            CmpOp::Eq => ord.is_eq(),
            CmpOp::Ne => ord.is_ne(),
            CmpOp::Lt => ord.is_lt(),
            CmpOp::Le => ord.is_le(),
            CmpOp::Gt => ord.is_gt(),
            CmpOp::Ge => ord.is_ge(),
        };
        Ok(result != self.negated)
    }
}

impl Operand {
    /// Parses a lone path or literal.
    pub fn parse(text: &str) -> Result<Operand, ParseError> {
        let tokens = Lexer { src: text, pos: 0 }.tokens()?;
        let mut p = Parser {
            src: text,
            tokens,
            at: 0,
        };
        let operand = match p.tokens.first().map(|(_, t)| t.clone()) {
            Some(Token::Path(path)) => {
                p.at = 1;
                Operand::Path(path)
            }
            _ => Operand::Literal(p.literal()?),
        };
        if p.at != p.tokens.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(operand)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(path: &Path) -> Option<Value> {
        match (path.variable.as_str(), path.field_key().as_str()) {
            ("status", "valid") => Some(Value::Bool(true)),
            ("order", "amount") => Some(Value::Int(120)),
            ("order", "card.TypeCard") => Some(Value::Text("VISA".into())),
            ("n", "value") => Some(Value::Int(3)),
            _ => None,
        }
    }

    #[test]
    fn parse_and_print() {
        let c =
            Condition::parse("$status.valid = true and not $order.amount >= 100 or $order.card.TypeCard != \"AMEX\"")
                .unwrap();
        assert_eq!(c.disjuncts.len(), 2);
        assert_eq!(c.disjuncts[0].len(), 2);
        assert_eq!(
            c.to_string(),
            "$status.valid = true and not $order.amount >= 100 or $order.card.TypeCard != 'AMEX'"
        );
        assert_eq!(Condition::parse(&c.to_string()).unwrap(), c);
        assert_eq!(c.variables().into_iter().collect::<Vec<_>>(), vec!["order", "status"]);
    }

    #[test]
    fn evaluation() {
        let eval = |s: &str| Condition::parse(s).unwrap().evaluate(env);
        assert_eq!(eval("$status.valid = true"), Ok(true));
        assert_eq!(eval("$status.valid != true"), Ok(false));
        assert_eq!(eval("$order.amount > 100 and $order.amount <= 120"), Ok(true));
        assert_eq!(eval("not $order.amount < 121"), Ok(false));
        assert_eq!(eval("$n < 2 or $order.card.TypeCard = 'VISA'"), Ok(true));
        // `and` binds tighter: false or (true and false)
        assert_eq!(eval("$n = 0 or $n = 3 and $n = 4"), Ok(false));
        assert!(matches!(
            eval("$status.valid < true"),
            Err(EvalError::TypeMismatch { .. })
        ));
        assert!(matches!(
            eval("$order.amount = 'x'"),
            Err(EvalError::TypeMismatch { .. })
        ));
        assert_eq!(eval("$nope.x = 1"), Err(EvalError::Undefined("$nope.x".into())));
        // short-circuit skips the undefined read
        assert_eq!(eval("$n = 3 or $nope.x = 1"), Ok(true));
    }

    #[test]
    fn escapes_round_trip() {
        let c = Condition::parse(r#"$a.b = 'it\'s \\ here'"#).unwrap();
        assert_eq!(c.disjuncts[0][0].literal, Value::Text("it's \\ here".into()));
        assert_eq!(Condition::parse(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn errors() {
        for bad in [
            "",
            "$",
            "$a.",
            "$a = ",
            "$a == 1",
            "a = 1",
            "$a = 1 and",
            "$a = 1 $b = 2",
            "$a = 'x",
            "$a ! 1",
            "$a = #",
        ] {
            assert!(Condition::parse(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn operands() {
        assert_eq!(
            Operand::parse("$purchase.NumCard").unwrap(),
            Operand::Path(Path {
                variable: "purchase".into(),
                fields: vec!["NumCard".into()]
            })
        );
        assert_eq!(Operand::parse("-42").unwrap(), Operand::Literal(Value::Int(-42)));
        assert_eq!(
            Operand::parse("'x'").unwrap(),
            Operand::Literal(Value::Text("x".into()))
        );
        assert_eq!(Operand::parse("false").unwrap(), Operand::Literal(Value::Bool(false)));
        assert!(Operand::parse("$a $b").is_err());
        assert!(Operand::parse("and").is_err());
    }

    #[test]
    fn rename() {
        let c = Condition::parse("$status.valid = true and $x = 1").unwrap();
        let r = c.rename_variables(|v| (v == "status").then(|| "Resp".to_string()));
        assert_eq!(r.to_string(), "$Resp.valid = true and $x = 1");
    }

    #[test]
    fn value_json_shape() {
        let m: Message = serde_json::from_str(r#"{"a": 1, "b": "x", "c": true}"#).unwrap();
        assert_eq!(m["a"], Value::Int(1));
        assert_eq!(m["b"], Value::Text("x".into()));
        assert_eq!(m["c"], Value::Bool(true));
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"{"a":1,"b":"x","c":true}"#);
    }
}
