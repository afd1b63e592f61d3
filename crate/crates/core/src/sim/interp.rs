use std::collections::HashMap;

use super::stubs::REQUEST;
use super::*;
use crate::behavior::FAULT_FIELD;
use crate::bpel::{Activity, BpelDocument};
use crate::condition::{EvalError, Operand, Path, Value};
use crate::names::local_part;

pub const DEFAULT_LOOP_LIMIT: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    /// Total `while` iterations allowed in one run.
    pub loop_limit: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            loop_limit: DEFAULT_LOOP_LIMIT,
        }
    }
}

pub fn simulate(doc: &BpelDocument, stubs: &StubRegistry, initial: &Message) -> Result<ExecutionTrace, SimError> {
    simulate_with(doc, stubs, initial, &SimOptions::default())
}

/// Runs `doc` on `initial` as the request its receive accepts.
///
/// `flow` branches advance round-robin in document order, one activity per
/// turn. A stub fault is not a process fault: the output variable then
/// holds a single `fault` field naming it. Exceeding the loop limit ends
/// the trace with `Faulted(LOOP_LIMIT)`.
pub fn simulate_with(
    doc: &BpelDocument,
    stubs: &StubRegistry,
    initial: &Message,
    options: &SimOptions,
) -> Result<ExecutionTrace, SimError> {
    let mut m = Machine {
        stubs,
        initial,
        received: false,
        vars: HashMap::new(),
        events: Vec::new(),
        iterations: 0,
        limit: options.loop_limit,
    };
    let mut root = Thread::new(&doc.body);
    loop {
        match m.step(&mut root) {
            Ok(Turn::Progress) => {}
            Ok(Turn::Done) => break,
            Err(Halt::LoopLimit) => {
                m.events.push(TraceEvent::Faulted {
                    name: LOOP_LIMIT.to_string(),
                });
                return Ok(ExecutionTrace { events: m.events });
            }
            Err(Halt::Error(e)) => return Err(e),
        }
    }
    if !m.received {
        return Err(SimError::Unsupported("the process never receives a request".into()));
    }
    m.events.push(TraceEvent::Completed);
    Ok(ExecutionTrace { events: m.events })
}

enum Turn {
    Progress,
    Done,
}

enum Halt {
    LoopLimit,
    Error(SimError),
}

impl From<SimError> for Halt {
    fn from(e: SimError) -> Self {
        Halt::Error(e)
    }
}

/// A thread of control: pending activities (top is next) and, while a
/// `flow` runs, its branch threads.
struct Thread<'d> {
    stack: Vec<&'d Activity>,
    flow: Option<Flow<'d>>,
}

struct Flow<'d> {
    branches: Vec<Thread<'d>>,
    next: usize,
}

impl<'d> Thread<'d> {
    fn new(a: &'d Activity) -> Self {
        Thread {
            stack: vec![a],
            flow: None,
        }
    }

    fn finished(&self) -> bool {
        self.stack.is_empty() && self.flow.is_none()
    }
}

struct Machine<'d> {
    stubs: &'d StubRegistry,
    initial: &'d Message,
    received: bool,
    vars: HashMap<String, Message>,
    events: Vec<TraceEvent>,
    iterations: u64,
    limit: u64,
}

fn eval_error(e: EvalError) -> SimError {
    match e {
        EvalError::Undefined(p) => SimError::UndefinedField(p),
        mismatch @ EvalError::TypeMismatch { .. } => SimError::TypeMismatch(mismatch.to_string()),
    }
}

impl<'d> Machine<'d> {
    /// Executes one atomic activity of `t`, or reports that `t` is done.
    fn step(&mut self, t: &mut Thread<'d>) -> Result<Turn, Halt> {
        loop {
            if let Some(flow) = &mut t.flow {
                let n = flow.branches.len();
                for k in 0..n {
                    let i = (flow.next + k) % n;
                    if flow.branches[i].finished() {
                        continue;
                    }
                    if let Turn::Progress = self.step(&mut flow.branches[i])? {
                        flow.next = (i + 1) % n;
                        return Ok(Turn::Progress);
                    }
                }
                t.flow = None;
                continue;
            }
            let Some(a) = t.stack.pop() else {
                return Ok(Turn::Done);
            };
            match a {
                Activity::Sequence(items) => t.stack.extend(items.iter().rev()),
                Activity::Empty => {}
                Activity::Flow { branches, .. } => {
                    t.flow = Some(Flow {
                        branches: branches.iter().map(Thread::new).collect(),
                        next: 0,
                    })
                }
                Activity::If {
                    name,
                    branches,
                    otherwise,
                } => {
                    self.require_receive()?;
                    let mut chosen = None;
                    for (c, body) in branches {
                        if self.evaluate(c)? {
                            chosen = Some(body);
                            break;
                        }
                    }
                    match chosen.or(otherwise.as_deref()) {
                        Some(body) => t.stack.push(body),
                        None => return Err(SimError::NoMatchingExclusiveBranch(name.clone()).into()),
                    }
                    return Ok(Turn::Progress);
                }
                Activity::While { condition, body, .. } => {
                    self.require_receive()?;
                    if self.evaluate(condition)? {
                        self.iterations += 1;
                        if self.iterations > self.limit {
                            return Err(Halt::LoopLimit);
                        }
                        t.stack.push(a);
                        t.stack.push(body);
                    }
                    return Ok(Turn::Progress);
                }
                atomic => {
                    self.execute(atomic)?;
                    return Ok(Turn::Progress);
                }
            }
        }
    }

    fn require_receive(&self) -> Result<(), SimError> {
        if self.received {
            Ok(())
        } else {
            Err(SimError::Unsupported("the process must start with a receive".into()))
        }
    }

    fn lookup(&self, p: &Path) -> Option<Value> {
        self.vars.get(&p.variable)?.get(&p.field_key()).cloned()
    }

    fn evaluate(&mut self, c: &Condition) -> Result<bool, SimError> {
        let value = c.evaluate(|p| self.lookup(p)).map_err(eval_error)?;
        self.events.push(TraceEvent::Evaluated {
            condition: c.to_string(),
            value,
        });
        Ok(value)
    }

    fn execute(&mut self, a: &Activity) -> Result<(), SimError> {
        if !matches!(a, Activity::Receive(_)) {
            self.require_receive()?;
        }
        match a {
            Activity::Receive(r) => {
                if self.received {
                    return Err(SimError::Unsupported(format!("second receive `{}`", r.hint.id)));
                }
                self.received = true;
                self.vars.insert(r.variable.clone(), self.initial.clone());
                self.events.push(TraceEvent::Received {
                    label: r.hint.label.clone(),
                });
            }
            Activity::Assign(assign) => {
                for c in &assign.copies {
                    let value = match &c.from {
                        Operand::Literal(v) => v.clone(),
                        Operand::Path(p) => self.lookup(p).ok_or_else(|| SimError::UndefinedField(p.to_string()))?,
                    };
                    self.vars
                        .entry(c.to.variable.clone())
                        .or_default()
                        .insert(c.to.field_key(), value);
                }
            }
            Activity::Invoke(i) => {
                let service = i
                    .service()
                    .ok_or_else(|| SimError::Unsupported(format!("port type `{}` names no service", i.port_type)))?;
                let request = self.vars.get(&i.input_variable).cloned().unwrap_or_default();
                let stub = self
                    .stubs
                    .get(service, &i.operation)
                    .ok_or_else(|| SimError::MissingStub {
                        service: service.to_string(),
                        operation: i.operation.clone(),
                    })?;
                let mut outcome = None;
                for case in &stub.cases {
                    let hit = match &case.when {
                        None => true,
                        Some(c) => c
                            .evaluate(|p| {
                                (p.variable == REQUEST)
                                    .then(|| request.get(&p.field_key()).cloned())
                                    .flatten()
                            })
                            .map_err(eval_error)?,
                    };
                    if hit {
                        outcome = Some(case.result.clone());
                        break;
                    }
                }
                let outcome = outcome
                    .ok_or_else(|| SimError::InvalidStubs(format!("no case of {service}.{} applies", i.operation)))?;
                if let Some(out) = &i.output_variable {
                    let value = match &outcome {
                        Outcome::Response(m) => m.clone(),
                        Outcome::Fault(f) => Message::from([(FAULT_FIELD.to_string(), Value::Text(f.clone()))]),
                    };
                    self.vars.insert(out.clone(), value);
                }
                self.events.push(TraceEvent::Invoked {
                    service: service.to_string(),
                    operation: i.operation.clone(),
                    request,
                    outcome,
                });
            }
            Activity::Reply(r) => {
                let message = r
                    .variable
                    .as_ref()
                    .and_then(|v| self.vars.get(v).cloned())
                    .unwrap_or_default();
                self.events.push(TraceEvent::Replied {
                    fault: r.fault_name.as_deref().map(|f| local_part(f).to_string()),
                    message,
                });
            }
            _ => unreachable!("structured activities are stepped, not executed"),
        }
        Ok(())
    }
}
