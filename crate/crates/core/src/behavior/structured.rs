//! Region decomposition of behavior graphs into nested blocks.

use std::collections::HashSet;

use super::*;

/// The well-nested form of a behavior: a block tree whose leaves are the
/// graph's task nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuredBehavior {
    pub process: String,
    pub variables: Vec<Variable>,
    pub body: Block,
}

/// A sequence of steps.
pub type Block = Vec<Step>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    /// A receive, reply or invoke node.
    Task(Node),
    /// Exclusive choice: branches are tried in order, `otherwise` is the
    /// default flow. `join` is absent when every branch ends the process.
    If {
        split: String,
        join: Option<String>,
        branches: Vec<(Condition, Block)>,
        otherwise: Option<Block>,
    },
    Parallel {
        split: String,
        join: Option<String>,
        branches: Vec<Block>,
    },
    /// Pre-tested loop: an exclusive merge feeding an exclusive split whose
    /// conditional flow runs `body` and returns to the merge.
    While {
        join: String,
        split: String,
        condition: Condition,
        body: Block,
    },
}

impl Step {
    fn collect_tasks<'a>(&'a self, out: &mut Vec<&'a Node>) {
        match self {
            Step::Task(n) => out.push(n),
            Step::If {
                branches, otherwise, ..
            } => {
                for (_, b) in branches {
                    b.iter().for_each(|s| s.collect_tasks(out));
                }
                otherwise.iter().flatten().for_each(|s| s.collect_tasks(out));
            }
            Step::Parallel { branches, .. } => branches.iter().flatten().for_each(|s| s.collect_tasks(out)),
            Step::While { body, .. } => body.iter().for_each(|s| s.collect_tasks(out)),
        }
    }
}

impl StructuredBehavior {
    /// Task leaves in document order.
    pub fn tasks(&self) -> Vec<&Node> {
        let mut out = Vec::new();
        self.body.iter().for_each(|s| s.collect_tasks(&mut out));
        out
    }

    /// Expands the tree back into a graph: one start event, gateways for
    /// each construct, and a fresh end event for every way out.
    pub fn to_graph(&self) -> BehaviorModel {
        let mut taken = HashSet::new();
        for n in self.tasks() {
            taken.insert(n.id.clone());
        }
        fn gateways(block: &Block, taken: &mut HashSet<String>) {
            for s in block {
                match s {
                    Step::Task(_) => {}
                    Step::If {
                        split,
                        join,
                        branches,
                        otherwise,
                    } => {
                        taken.insert(split.clone());
                        taken.extend(join.clone());
                        branches.iter().for_each(|(_, b)| gateways(b, taken));
                        otherwise.iter().for_each(|b| gateways(b, taken));
                    }
                    Step::Parallel { split, join, branches } => {
                        taken.insert(split.clone());
                        taken.extend(join.clone());
                        branches.iter().for_each(|b| gateways(b, taken));
                    }
                    Step::While { join, split, body, .. } => {
                        taken.insert(join.clone());
                        taken.insert(split.clone());
                        gateways(body, taken);
                    }
                }
            }
        }
        gateways(&self.body, &mut taken);

        let mut g = Expander {
            out: BehaviorModel {
                process: self.process.clone(),
                variables: self.variables.clone(),
                nodes: Vec::new(),
                edges: Vec::new(),
            },
            taken,
        };
        let start = g.fresh("start");
        g.node(&start, NodeKind::Start);
        let exit = g.block(&self.body, Pending::plain(start));
        if let Some(p) = exit {
            g.finish(p);
        }
        g.out
    }
}

struct Pending {
    from: String,
    condition: Option<Condition>,
    default: bool,
}

impl Pending {
    fn plain(from: String) -> Self {
        Pending {
            from,
            condition: None,
            default: false,
        }
    }
}

struct Expander {
    out: BehaviorModel,
    taken: HashSet<String>,
}

impl Expander {
    fn fresh(&mut self, base: &str) -> String {
        let mut id = base.to_string();
        let mut k = 1;
        while self.taken.contains(&id) {
            id = format!("{base}_{k}");
            k += 1;
        }
        self.taken.insert(id.clone());
        id
    }

    fn node(&mut self, id: &str, kind: NodeKind) {
        self.out.nodes.push(Node {
            id: id.to_string(),
            label: None,
            kind,
        });
    }

    fn connect(&mut self, p: Pending, to: &str) {
        self.out.edges.push(Edge {
            from: p.from,
            to: to.to_string(),
            condition: p.condition,
            default: p.default,
        });
    }

    fn finish(&mut self, p: Pending) {
        let end = self.fresh("end");
        self.node(&end, NodeKind::End);
        self.connect(p, &end);
    }

    /// Emits `block` after `entry`; returns the open flow leaving it, or
    /// `None` when every path has ended.
    fn block(&mut self, block: &Block, entry: Pending) -> Option<Pending> {
        let mut pred = entry;
        for step in block {
            match step {
                Step::Task(n) => {
                    self.out.nodes.push(n.clone());
                    self.connect(pred, &n.id);
                    pred = Pending::plain(n.id.clone());
                }
                Step::If {
                    split,
                    join,
                    branches,
                    otherwise,
                } => {
                    self.node(split, NodeKind::Exclusive);
                    self.connect(pred, split);
                    let mut flows: Vec<(Pending, &Block)> = branches
                        .iter()
                        .map(|(c, b)| {
                            (
                                Pending {
                                    from: split.clone(),
                                    condition: Some(c.clone()),
                                    default: false,
                                },
                                b,
                            )
                        })
                        .collect();
                    if let Some(b) = otherwise {
                        flows.push((
                            Pending {
                                from: split.clone(),
                                condition: None,
                                default: true,
                            },
                            b,
                        ));
                    }
                    match self.branches(flows, join.as_deref(), NodeKind::Exclusive) {
                        Some(p) => pred = p,
                        None => return None,
                    }
                }
                Step::Parallel { split, join, branches } => {
                    self.node(split, NodeKind::Parallel);
                    self.connect(pred, split);
                    let flows = branches.iter().map(|b| (Pending::plain(split.clone()), b)).collect();
                    match self.branches(flows, join.as_deref(), NodeKind::Parallel) {
                        Some(p) => pred = p,
                        None => return None,
                    }
                }
                Step::While {
                    join,
                    split,
                    condition,
                    body,
                } => {
                    self.node(join, NodeKind::Exclusive);
                    self.connect(pred, join);
                    self.node(split, NodeKind::Exclusive);
                    self.connect(Pending::plain(join.clone()), split);
                    let into_body = Pending {
                        from: split.clone(),
                        condition: Some(condition.clone()),
                        default: false,
                    };
                    if let Some(back) = self.block(body, into_body) {
                        self.connect(back, join);
                    }
                    pred = Pending {
                        from: split.clone(),
                        condition: None,
                        default: true,
                    };
                }
            }
        }
        Some(pred)
    }

    fn branches(&mut self, flows: Vec<(Pending, &Block)>, join: Option<&str>, kind: NodeKind) -> Option<Pending> {
        let exits: Vec<Option<Pending>> = flows.into_iter().map(|(p, b)| self.block(b, p)).collect();
        match join {
            Some(j) => {
                self.node(j, kind);
                for p in exits.into_iter().flatten() {
                    self.connect(p, j);
                }
                Some(Pending::plain(j.to_string()))
            }
            None => {
                for p in exits.into_iter().flatten() {
                    self.finish(p);
                }
                None
            }
        }
    }
}

enum Outcome {
    /// The walk stopped at this join gateway.
    Join(usize),
    /// Every path ended at an end event.
    Terminated,
}

/// Decomposes a validated behavior graph into nested single-entry
/// single-exit regions.
///
/// Splits must be closed by one join of the same kind that all their
/// branches reach (or every branch must end the process). Loops are
/// recognized as an exclusive merge, entered once from outside and once
/// by a back edge, that feeds an exclusive split with one conditional flow
/// into the body and a default flow out.
pub fn normalize_to_structured(b: &BehaviorModel) -> Result<StructuredBehavior, UnstructuredGraph> {
    let topo = Topology::new(b);
    let start = b
        .nodes
        .iter()
        .enumerate()
        .find(|(i, n)| n.kind == NodeKind::Start && !topo.outgoing[*i].is_empty())
        .map(|(i, _)| i)
        .ok_or_else(|| UnstructuredGraph {
            entry: b.process.clone(),
            reason: "no start event with an outgoing flow".into(),
        })?;
    let back = back_edges(&topo, start, b.edges.len());
    let mut n = Normalizer {
        b,
        topo,
        back,
        active: Vec::new(),
        visited: vec![false; b.nodes.len()],
    };
    let first = n.single_successor(start)?;
    let (body, outcome) = n.walk(first)?;
    if let Outcome::Join(j) = outcome {
        return Err(n.err(j, "join without a matching split"));
    }
    Ok(StructuredBehavior {
        process: b.process.clone(),
        variables: b.variables.clone(),
        body,
    })
}

/// Edges closing a cycle in a depth-first search from `start`.
fn back_edges(t: &Topology, start: usize, edge_count: usize) -> Vec<bool> {
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Grey,
        Black,
    }
    let mut color = vec![Color::White; t.outgoing.len()];
    let mut back = vec![false; edge_count];
    let mut stack = vec![(start, 0usize)];
    color[start] = Color::Grey;
    while let Some(&mut (n, ref mut next)) = stack.last_mut() {
        if let Some(&e) = t.outgoing[n].get(*next) {
            *next += 1;
            let to = t.target(e);
            match color[to] {
                Color::White => {
                    color[to] = Color::Grey;
                    stack.push((to, 0));
                }
                Color::Grey => back[e] = true,
                Color::Black => {}
            }
        } else {
            color[n] = Color::Black;
            stack.pop();
        }
    }
    back
}

struct Normalizer<'a> {
    b: &'a BehaviorModel,
    topo: Topology,
    back: Vec<bool>,
    /// Loop headers whose body is being walked.
    active: Vec<usize>,
    visited: Vec<bool>,
}

impl Normalizer<'_> {
    fn err(&self, n: usize, reason: impl Into<String>) -> UnstructuredGraph {
        UnstructuredGraph {
            entry: self.b.nodes[n].id.clone(),
            reason: reason.into(),
        }
    }

    fn single_successor(&self, n: usize) -> Result<usize, UnstructuredGraph> {
        match self.topo.outgoing[n].as_slice() {
            [e] => Ok(self.topo.target(*e)),
            other => Err(self.err(n, format!("expected one outgoing flow, found {}", other.len()))),
        }
    }

    fn visit(&mut self, n: usize) -> Result<(), UnstructuredGraph> {
        if std::mem::replace(&mut self.visited[n], true) {
            return Err(self.err(n, "node is entered from two regions"));
        }
        Ok(())
    }

    fn is_loop_header(&self, n: usize) -> bool {
        self.topo.incoming[n].iter().any(|&e| self.back[e])
    }

    fn walk(&mut self, mut n: usize) -> Result<(Block, Outcome), UnstructuredGraph> {
        let mut block = Block::new();
        loop {
            let node = &self.b.nodes[n];
            let (ins, outs) = (self.topo.incoming[n].len(), self.topo.outgoing[n].len());
            match node.kind {
                NodeKind::End => return Ok((block, Outcome::Terminated)),
                NodeKind::Start => return Err(self.err(n, "start event inside the flow")),
                NodeKind::Receive(_) | NodeKind::Reply(_) | NodeKind::Invoke(_) => {
                    self.visit(n)?;
                    block.push(Step::Task(node.clone()));
                    n = self.single_successor(n)?;
                }
                NodeKind::Exclusive | NodeKind::Parallel if ins >= 2 => {
                    if !self.is_loop_header(n) || self.active.contains(&n) {
                        return Ok((block, Outcome::Join(n)));
                    }
                    let (step, exit) = self.loop_region(n)?;
                    block.push(step);
                    n = exit;
                }
                NodeKind::Exclusive | NodeKind::Parallel if outs >= 2 => {
                    self.visit(n)?;
                    let (step, next) = self.split_region(n)?;
                    block.push(step);
                    match next {
                        Some(m) => n = m,
                        None => return Ok((block, Outcome::Terminated)),
                    }
                }
                NodeKind::Exclusive | NodeKind::Parallel => {
                    return Err(self.err(n, "gateway is neither a split nor a join"));
                }
            }
        }
    }

    /// Parses the region opened by split `s`; returns the step and the node
    /// after its join, or `None` when all branches end the process.
    fn split_region(&mut self, s: usize) -> Result<(Step, Option<usize>), UnstructuredGraph> {
        let b = self.b;
        let kind = &b.nodes[s].kind;
        let mut parsed = Vec::new();
        for &e in &self.topo.outgoing[s].clone() {
            let (block, outcome) = self.walk(self.topo.target(e))?;
            parsed.push((e, block, outcome));
        }
        let joins: HashSet<Option<usize>> = parsed
            .iter()
            .map(|(_, _, o)| match o {
                Outcome::Join(j) => Some(*j),
                Outcome::Terminated => None,
            })
            .collect();
        let join = match joins.into_iter().collect::<Vec<_>>().as_slice() {
            [None] => None,
            [Some(j)] => {
                let j = *j;
                if &b.nodes[j].kind != kind {
                    return Err(self.err(s, format!("closed by `{}`, a join of the other kind", b.nodes[j].id)));
                }
                if self.topo.incoming[j].len() != parsed.len() {
                    return Err(self.err(
                        s,
                        format!("join `{}` also merges flows from outside the region", b.nodes[j].id),
                    ));
                }
                self.visit(j)?;
                Some(j)
            }
            _ => return Err(self.err(s, "branches do not meet at a common join")),
        };
        let split = b.nodes[s].id.clone();
        let join_id = join.map(|j| b.nodes[j].id.clone());
        let step = match kind {
            NodeKind::Exclusive => {
                let mut branches = Vec::new();
                let mut otherwise = None;
                for (e, block, _) in parsed {
                    let edge = &b.edges[e];
                    match (&edge.condition, edge.default) {
                        (Some(c), false) => branches.push((c.clone(), block)),
                        (None, true) if otherwise.is_none() => otherwise = Some(block),
                        _ => return Err(self.err(s, "exclusive flows need a condition or a single default")),
                    }
                }
                Step::If {
                    split,
                    join: join_id,
                    branches,
                    otherwise,
                }
            }
            _ => Step::Parallel {
                split,
                join: join_id,
                branches: parsed.into_iter().map(|(_, block, _)| block).collect(),
            },
        };
        let next = match join {
            Some(j) => Some(self.single_successor(j)?),
            None => None,
        };
        Ok((step, next))
    }

    /// Parses a loop headed by merge `j`; returns the step and the node the
    /// exit flow leads to.
    fn loop_region(&mut self, j: usize) -> Result<(Step, usize), UnstructuredGraph> {
        let b = self.b;
        let t = &self.topo;
        let backs = t.incoming[j].iter().filter(|&&e| self.back[e]).count();
        if b.nodes[j].kind != NodeKind::Exclusive || t.incoming[j].len() != 2 || backs != 1 {
            return Err(self.err(
                j,
                "loop entry must be an exclusive merge of one entry and one back flow",
            ));
        }
        self.visit(j)?;
        let s = self.single_successor(j)?;
        let t = &self.topo;
        if b.nodes[s].kind != NodeKind::Exclusive || t.incoming[s].len() != 1 || t.outgoing[s].len() != 2 {
            return Err(self.err(j, "loop entry must feed an exclusive split with two flows"));
        }
        let (mut body_edge, mut exit_edge) = (None, None);
        for &e in &t.outgoing[s] {
            let edge = &b.edges[e];
            match (&edge.condition, edge.default) {
                (Some(_), false) => body_edge = Some(e),
                (None, true) => exit_edge = Some(e),
                _ => {}
            }
        }
        let (Some(body_edge), Some(exit_edge)) = (body_edge, exit_edge) else {
            return Err(self.err(
                s,
                "loop split needs one conditional flow into the body and a default flow out",
            ));
        };
        let (body_start, exit) = (t.target(body_edge), t.target(exit_edge));
        self.visit(s)?;
        self.active.push(j);
        let walked = self.walk(body_start);
        self.active.pop();
        let (body, outcome) = walked?;
        if !matches!(outcome, Outcome::Join(x) if x == j) {
            return Err(self.err(j, "loop body does not return to its entry"));
        }
        let condition = b.edges[body_edge].condition.clone().expect("conditional flow");
        Ok((
            Step::While {
                join: b.nodes[j].id.clone(),
                split: b.nodes[s].id.clone(),
                condition,
                body,
            },
            exit,
        ))
    }
}
