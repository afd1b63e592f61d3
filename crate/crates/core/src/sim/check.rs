use std::fmt;

use super::*;

/// Expected trace event. Payloads other than the named fields are ignored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventMatcher {
    Received,
    /// An invocation of `operation`, on `service` if given.
    Invoked {
        service: Option<String>,
        operation: String,
    },
    Evaluated(bool),
    /// A reply carrying the output message.
    Replied,
    RepliedFault(String),
    Completed,
    Faulted(String),
}

impl EventMatcher {
    pub fn invoked(operation: impl Into<String>) -> Self {
        EventMatcher::Invoked {
            service: None,
            operation: operation.into(),
        }
    }

    pub fn matches(&self, e: &TraceEvent) -> bool {
        match (self, e) {
            (EventMatcher::Received, TraceEvent::Received { .. }) => true,
            (
                EventMatcher::Invoked { service, operation },
                TraceEvent::Invoked {
                    service: s,
                    operation: o,
                    ..
                },
            ) => o == operation && service.as_ref().is_none_or(|want| want == s),
            (EventMatcher::Evaluated(want), TraceEvent::Evaluated { value, .. }) => want == value,
            (EventMatcher::Replied, TraceEvent::Replied { fault: None, .. }) => true,
            (EventMatcher::RepliedFault(want), TraceEvent::Replied { fault: Some(f), .. }) => want == f,
            (EventMatcher::Completed, TraceEvent::Completed) => true,
            (EventMatcher::Faulted(want), TraceEvent::Faulted { name }) => want == name,
            _ => false,
        }
    }
}

impl fmt::Display for EventMatcher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventMatcher::Received => f.write_str("Received"),
            EventMatcher::Invoked {
                service: Some(s),
                operation,
            } => write!(f, "Invoked({s}.{operation})"),
            EventMatcher::Invoked {
                service: None,
                operation,
            } => write!(f, "Invoked({operation})"),
            EventMatcher::Evaluated(v) => write!(f, "Evaluated({v})"),
            EventMatcher::Replied => f.write_str("Replied"),
            EventMatcher::RepliedFault(name) => write!(f, "Replied(fault {name})"),
            EventMatcher::Completed => f.write_str("Completed"),
            EventMatcher::Faulted(name) => write!(f, "Faulted({name})"),
        }
    }
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Received { label } => write!(f, "Received({label})"),
            TraceEvent::Invoked {
                service,
                operation,
                outcome,
                ..
            } => match outcome {
                Outcome::Response(_) => write!(f, "Invoked({service}.{operation})"),
                Outcome::Fault(name) => write!(f, "Invoked({service}.{operation}, fault {name})"),
            },
            TraceEvent::Evaluated { condition, value } => write!(f, "Evaluated({condition}: {value})"),
            TraceEvent::Replied { fault: None, .. } => f.write_str("Replied"),
            TraceEvent::Replied { fault: Some(name), .. } => write!(f, "Replied(fault {name})"),
            TraceEvent::Completed => f.write_str("Completed"),
            TraceEvent::Faulted { name } => write!(f, "Faulted({name})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceCheck {
    pub matched: bool,
    /// Explains the first matcher that could not be placed.
    pub diagnostic: Option<String>,
}

/// Checks that the matchers occur in the trace in the given order, other
/// events in between being allowed. Placement is greedy, which finds an
/// alignment whenever one exists.
pub fn assert_trace(trace: &ExecutionTrace, pattern: &[EventMatcher]) -> TraceCheck {
    let events = &trace.events;
    let mut pos = 0;
    for (k, m) in pattern.iter().enumerate() {
        match events[pos..].iter().position(|e| m.matches(e)) {
            Some(offset) => pos += offset + 1,
            None => {
                let earlier = events[..pos].iter().position(|e| m.matches(e));
                let diagnostic = match earlier {
                    Some(i) => format!(
                        "matcher {k} `{m}` only matches event {i} `{}`, which precedes event {} `{}` matched by matcher {}",
                        events[i],
                        pos - 1,
                        events[pos - 1],
                        k - 1
                    ),
                    None if pos == 0 => format!("matcher {k} `{m}` matches no event"),
                    None => format!(
                        "matcher {k} `{m}` matches no event after event {} `{}`",
                        pos - 1,
                        events[pos - 1]
                    ),
                };
                return TraceCheck {
                    matched: false,
                    diagnostic: Some(diagnostic),
                };
            }
        }
    }
    TraceCheck {
        matched: true,
        diagnostic: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace() -> ExecutionTrace {
        let invoked = |s: &str, o: &str| TraceEvent::Invoked {
            service: s.into(),
            operation: o.into(),
            request: Message::new(),
            outcome: Outcome::Response(Message::new()),
        };
        ExecutionTrace {
            events: vec![
                TraceEvent::Received { label: "r".into() },
                invoked("A", "first"),
                invoked("B", "second"),
                TraceEvent::Completed,
            ],
        }
    }

    #[test]
    fn ordered_subsequences_match() {
        let t = trace();
        assert!(assert_trace(&t, &[]).matched);
        let check = assert_trace(&t, &[EventMatcher::invoked("first"), EventMatcher::Completed]);
        assert!(check.matched, "{check:?}");
    }

    #[test]
    fn order_violations_are_explained() {
        let check = assert_trace(
            &trace(),
            &[EventMatcher::invoked("second"), EventMatcher::invoked("first")],
        );
        assert!(!check.matched);
        let d = check.diagnostic.unwrap();
        assert!(d.contains("precedes"), "{d}");
        let check = assert_trace(&trace(), &[EventMatcher::Faulted(LOOP_LIMIT.into())]);
        assert_eq!(
            check.diagnostic.unwrap(),
            "matcher 0 `Faulted(LOOP_LIMIT)` matches no event"
        );
    }
}
