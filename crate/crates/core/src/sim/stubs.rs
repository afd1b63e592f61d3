//! Stub registry and message documents.
//!
//! ```json
//! {"stubs": [{"service": "ePayment", "operation": "pay",
//!             "cases": [{"when": "$request.amount > 10000", "fault": "LimitExceeded"},
//!                       {"respond": {"confirmation": "PAY-0001"}}]}]}
//! ```

use std::collections::HashSet;

use serde::Deserialize;

use super::*;
use crate::condition::Value;
use crate::pim::{self, ModelError};

#[derive(Deserialize)]
struct RegistryDoc {
    stubs: Vec<StubDoc>,
}

#[derive(Deserialize)]
struct StubDoc {
    service: String,
    operation: String,
    cases: Vec<CaseDoc>,
}

#[derive(Deserialize)]
struct CaseDoc {
    when: Option<String>,
    respond: Option<serde_json::Map<String, serde_json::Value>>,
    fault: Option<String>,
}

/// Variable name guards use for the incoming request.
pub(crate) const REQUEST: &str = "request";

fn syntax(e: ModelError) -> SimError {
    match e {
        ModelError::Syntax { message, line, column } => SimError::Syntax { message, line, column },
        other => SimError::Syntax {
            message: other.to_string(),
            line: 0,
            column: 0,
        },
    }
}

pub fn parse_stubs(bytes: &[u8]) -> Result<StubRegistry, SimError> {
    let doc: RegistryDoc = pim::deserialize_json(bytes, true).map_err(syntax)?;
    let mut seen = HashSet::new();
    let mut stubs = Vec::with_capacity(doc.stubs.len());
    for s in doc.stubs {
        let key = format!("{}.{}", s.service, s.operation);
        if !seen.insert(key.clone()) {
            return Err(SimError::InvalidStubs(format!("{key} is stubbed twice")));
        }
        let mut cases = Vec::with_capacity(s.cases.len());
        for (i, c) in s.cases.into_iter().enumerate() {
            let at = format!("{key} case {i}");
            let when = match &c.when {
                Some(text) => {
                    let cond = Condition::parse(text).map_err(|e| SimError::InvalidStubs(format!("{at}: {e}")))?;
                    if let Some(v) = cond.variables().into_iter().find(|v| *v != REQUEST) {
                        return Err(SimError::InvalidStubs(format!(
                            "{at}: guards may only read $request, not ${v}"
                        )));
                    }
                    Some(cond)
                }
                None => None,
            };
            let result = match (c.respond, c.fault) {
                (Some(m), None) => {
                    Outcome::Response(message_from_map(&m).map_err(|e| SimError::InvalidStubs(format!("{at}: {e}")))?)
                }
                (None, Some(f)) => Outcome::Fault(f),
                _ => {
                    return Err(SimError::InvalidStubs(format!(
                        "{at}: exactly one of `respond` and `fault` is required"
                    )))
                }
            };
            cases.push(StubCase { when, result });
        }
        match cases.last() {
            Some(last) if last.when.is_none() => {}
            _ => {
                return Err(SimError::InvalidStubs(format!(
                    "{key}: the last case must have no guard"
                )))
            }
        }
        stubs.push(Stub {
            service: s.service,
            operation: s.operation,
            cases,
        });
    }
    Ok(StubRegistry { stubs })
}

/// Reads a message document: a JSON object whose leaves are integers,
/// strings or booleans. Nested objects flatten to dotted field paths.
pub fn parse_message(bytes: &[u8]) -> Result<Message, SimError> {
    let map: serde_json::Map<String, serde_json::Value> = pim::deserialize_json(bytes, true).map_err(syntax)?;
    message_from_map(&map).map_err(|message| SimError::Syntax {
        message,
        line: 0,
        column: 0,
    })
}

fn message_from_map(map: &serde_json::Map<String, serde_json::Value>) -> Result<Message, String> {
    fn walk(prefix: &str, map: &serde_json::Map<String, serde_json::Value>, out: &mut Message) -> Result<(), String> {
        for (k, v) in map {
            let key = if prefix.is_empty() {
                k.clone()
            } else {
                format!("{prefix}.{k}")
            };
            let value = match v {
                serde_json::Value::Bool(b) => Value::Bool(*b),
                serde_json::Value::String(s) => Value::Text(s.clone()),
                serde_json::Value::Number(n) => Value::Int(
                    n.as_i64()
                        .ok_or_else(|| format!("`{key}`: {n} is not a 64-bit integer"))?,
                ),
                serde_json::Value::Object(inner) => {
                    walk(&key, inner, out)?;
                    continue;
                }
                other => return Err(format!("`{key}`: unsupported value {other}")),
            };
            out.insert(key, value);
        }
        Ok(())
    }
    let mut out = Message::new();
    walk("", map, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_messages_flatten() {
        let m = parse_message(br#"{"a": 1, "b": {"c": "x", "d": true}}"#).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m["b.c"], Value::Text("x".into()));
        assert!(parse_message(br#"{"a": 1.5}"#).is_err());
        assert!(parse_message(br#"{"a": [1]}"#).is_err());
    }

    #[test]
    fn registry_rules() {
        let ok = br#"{"stubs": [{"service": "S", "operation": "o", "cases": [
            {"when": "$request.n > 1", "fault": "Big"}, {"respond": {"n": 0}}]}]}"#;
        let reg = parse_stubs(ok).unwrap();
        assert_eq!(reg.get("S", "o").unwrap().cases.len(), 2);
        assert!(reg.get("S", "p").is_none());

        let guarded_last = br#"{"stubs": [{"service": "S", "operation": "o", "cases": [
            {"when": "$request.n > 1", "fault": "Big"}]}]}"#;
        assert!(matches!(parse_stubs(guarded_last), Err(SimError::InvalidStubs(_))));
        let both = br#"{"stubs": [{"service": "S", "operation": "o", "cases": [
            {"respond": {}, "fault": "F"}]}]}"#;
        assert!(matches!(parse_stubs(both), Err(SimError::InvalidStubs(_))));
        let other_var = br#"{"stubs": [{"service": "S", "operation": "o", "cases": [
            {"when": "$x.n > 1", "fault": "F"}, {"respond": {}}]}]}"#;
        assert!(matches!(parse_stubs(other_var), Err(SimError::InvalidStubs(_))));
        assert!(matches!(parse_stubs(b"{\"stubs\": ["), Err(SimError::Syntax { .. })));
    }
}
