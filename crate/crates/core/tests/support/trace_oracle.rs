//! Brute-force task-trace enumeration by token play, written against the
//! plain graph so it shares no code with the region decomposition.

use std::collections::{BTreeSet, HashMap, HashSet};

use swsforge_core::behavior::{BehaviorModel, NodeKind};

/// How an enumerated run ended.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ending {
    /// No tokens left.
    Done,
    /// Tokens left but nothing can fire.
    Stuck,
    /// The trace reached the length bound.
    Cut,
}

/// Every maximal sequence of task ids the graph can produce, up to
/// `max_len` tasks. Exclusive splits may take any outgoing flow (conditions
/// are abstracted away); parallel splits fork; parallel joins wait for all
/// inputs; exclusive joins pass any token through.
pub fn task_traces(b: &BehaviorModel, max_len: usize) -> BTreeSet<(Vec<String>, Ending)> {
    let index: HashMap<&str, usize> = b.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
    let mut outgoing = vec![Vec::new(); b.nodes.len()];
    let mut incoming = vec![Vec::new(); b.nodes.len()];
    for (e, edge) in b.edges.iter().enumerate() {
        outgoing[index[edge.from.as_str()]].push(e);
        incoming[index[edge.to.as_str()]].push(e);
    }
    let mut marking = vec![0u8; b.edges.len()];
    for (i, n) in b.nodes.iter().enumerate() {
        if n.kind == NodeKind::Start {
            for &e in &outgoing[i] {
                marking[e] += 1;
            }
        }
    }

    let mut out = BTreeSet::new();
    let mut seen = HashSet::new();
    let mut stack = vec![(marking, Vec::<String>::new())];
    while let Some((m, trace)) = stack.pop() {
        if !seen.insert((m.clone(), trace.clone())) {
            continue;
        }
        if m.iter().all(|&t| t == 0) {
            out.insert((trace, Ending::Done));
            continue;
        }
        if trace.len() == max_len {
            out.insert((trace, Ending::Cut));
            continue;
        }
        let mut fired = false;
        for (i, n) in b.nodes.iter().enumerate() {
            let ins = &incoming[i];
            let outs = &outgoing[i];
            let mut succ: Vec<(Vec<u8>, bool)> = Vec::new();
            match n.kind {
                NodeKind::Start => {}
                NodeKind::Parallel => {
                    if !ins.is_empty() && ins.iter().all(|&e| m[e] > 0) {
                        let mut next = m.clone();
                        ins.iter().for_each(|&e| next[e] -= 1);
                        outs.iter().for_each(|&e| next[e] += 1);
                        succ.push((next, false));
                    }
                }
                NodeKind::Exclusive => {
                    for &e in ins.iter().filter(|&&e| m[e] > 0) {
                        for &o in outs {
                            let mut next = m.clone();
                            next[e] -= 1;
                            next[o] += 1;
                            succ.push((next, false));
                        }
                    }
                }
                NodeKind::End => {
                    for &e in ins.iter().filter(|&&e| m[e] > 0) {
                        let mut next = m.clone();
                        next[e] -= 1;
                        succ.push((next, false));
                    }
                }
                _ => {
                    for &e in ins.iter().filter(|&&e| m[e] > 0) {
                        let mut next = m.clone();
                        next[e] -= 1;
                        outs.iter().for_each(|&o| next[o] += 1);
                        succ.push((next, true));
                    }
                }
            }
            for (next, task) in succ {
                fired = true;
                let mut t = trace.clone();
                if task {
                    t.push(n.id.clone());
                }
                stack.push((next, t));
            }
        }
        if !fired {
            out.insert((trace, Ending::Stuck));
        }
    }
    out
}
