//! Exhaustive exploration of the terms reachable from a start term.
//!
//! The graph is built breadth-first with structural deduplication, so shared
//! reducts are explored once. On a complete acyclic graph, reduction lengths
//! to normal form are computed by dynamic programming over the DAG instead of
//! enumerating paths.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::criterion::SigmaPrime;
use crate::engine::{contract, redexes, Redex, ReductionTrace, TraceStep};
use crate::term::{Position, Term};
use crate::trs::Trs;
use crate::unify::match_pattern;

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub rule_index: usize,
    pub position: Position,
}

/// The reachable part of the one-step rewrite relation from `root`.
#[derive(Debug, Clone)]
pub struct ReductionGraph {
    nodes: Vec<Term>,
    edges: Vec<Edge>,
    out: Vec<Vec<usize>>,
    complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("exploration hit the node budget; the graph is incomplete")]
    Incomplete,
    #[error("the graph contains a cycle through {0} (possible nontermination)")]
    Cyclic(Term),
    #[error("more than one normal form is reachable: {0} and {1}")]
    MultipleNormalForms(Term, Term),
    #[error("start term {0} is not basic")]
    NonBasicRoot(Term),
}

/// Breadth-first exploration from `t`, stopping once `max_nodes` distinct
/// terms have been discovered and some of them are still unexpanded.
pub fn explore(trs: &Trs, t: &Term, max_nodes: usize) -> ReductionGraph {
    let max_nodes = max_nodes.max(1);
    let mut nodes = vec![t.clone()];
    let mut index: HashMap<Term, NodeId> = HashMap::from([(t.clone(), 0)]);
    let mut edges = Vec::new();
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    let mut queue = VecDeque::from([0]);
    let mut complete = true;
    'bfs: while let Some(id) = queue.pop_front() {
        let term = nodes[id].clone();
        for r in redexes(trs, &term) {
            let next = contract(trs, &term, &r);
            let to = match index.get(&next) {
                Some(&to) => to,
                None => {
                    if nodes.len() >= max_nodes {
                        complete = false;
                        break 'bfs;
                    }
                    let to = nodes.len();
                    index.insert(next.clone(), to);
                    nodes.push(next);
                    out.push(Vec::new());
                    queue.push_back(to);
                    to
                }
            };
            out[id].push(edges.len());
            edges.push(Edge {
                from: id,
                to,
                rule_index: r.rule_index,
                position: r.position,
            });
        }
    }
    if !queue.is_empty() {
        complete = false;
    }
    ReductionGraph {
        nodes,
        edges,
        out,
        complete,
    }
}

impl ReductionGraph {
    pub fn root(&self) -> &Term {
        &self.nodes[0]
    }

    pub fn nodes(&self) -> &[Term] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn outgoing(&self, id: NodeId) -> impl Iterator<Item = &Edge> {
        self.out[id].iter().map(move |&e| &self.edges[e])
    }

    /// Distinct one-step reducts of a node, in edge order.
    pub fn successors(&self, id: NodeId) -> Vec<NodeId> {
        let mut seen = HashSet::new();
        self.outgoing(id)
            .map(|e| e.to)
            .filter(|to| seen.insert(*to))
            .collect()
    }

    /// Nodes without outgoing edges. Only meaningful for complete graphs.
    pub fn normal_forms(&self) -> Vec<NodeId> {
        (0..self.nodes.len()).filter(|&n| self.out[n].is_empty()).collect()
    }

    /// Nodes in an order where every edge goes forward, or a node on a cycle.
    fn topological_order(&self) -> Result<Vec<NodeId>, NodeId> {
        let n = self.nodes.len();
        let mut indegree = vec![0usize; n];
        for e in &self.edges {
            indegree[e.to] += 1;
        }
        let mut ready: VecDeque<NodeId> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_front() {
            order.push(v);
            for e in self.outgoing(v) {
                indegree[e.to] -= 1;
                if indegree[e.to] == 0 {
                    ready.push_back(e.to);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err((0..n).find(|&v| indegree[v] > 0).expect("leftover node"))
        }
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_ok()
    }

    /// The redex an edge contracts, with its matcher recomputed.
    pub fn redex(&self, trs: &Trs, edge: &Edge) -> Redex {
        let at = self.nodes[edge.from]
            .subterm_at(&edge.position)
            .expect("edge position");
        let matcher = match_pattern(trs.rules()[edge.rule_index].lhs(), at).expect("edge rule");
        Redex {
            position: edge.position.clone(),
            rule_index: edge.rule_index,
            matcher,
        }
    }

    fn trace_along(&self, trs: &Trs, choice: &[Option<usize>]) -> ReductionTrace {
        let mut trace = ReductionTrace::new(self.root().clone());
        let mut cur = 0;
        while let Some(e) = choice[cur] {
            let edge = &self.edges[e];
            trace.steps.push(TraceStep {
                redex: self.redex(trs, edge),
                result: self.nodes[edge.to].clone(),
            });
            cur = edge.to;
        }
        trace
    }
}

/// Lengths of all reductions from the root to its normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthCertificate {
    pub uniform: bool,
    pub lengths: BTreeSet<usize>,
    pub normal_form: Term,
    /// A shortest and a longest reduction, present iff lengths differ.
    pub witness_pair: Option<(ReductionTrace, ReductionTrace)>,
}

impl LengthCertificate {
    pub fn min_length(&self) -> usize {
        *self.lengths.first().expect("nonempty")
    }

    pub fn max_length(&self) -> usize {
        *self.lengths.last().expect("nonempty")
    }
}

/// `UNIFORM k` or `NONUNIFORM {k1,k2,...}`.
impl std::fmt::Display for LengthCertificate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.uniform {
            write!(f, "UNIFORM {}", self.min_length())
        } else {
            let ks: Vec<String> = self.lengths.iter().map(|k| k.to_string()).collect();
            write!(f, "NONUNIFORM {{{}}}", ks.join(","))
        }
    }
}

/// Decides whether all reductions from the root to normal form have the
/// same length.
pub fn certify_uniform_length(
    g: &ReductionGraph,
    trs: &Trs,
) -> Result<LengthCertificate, GraphError> {
    if !g.complete {
        return Err(GraphError::Incomplete);
    }
    let order = g
        .topological_order()
        .map_err(|v| GraphError::Cyclic(g.nodes[v].clone()))?;
    let nfs = g.normal_forms();
    if nfs.len() > 1 {
        return Err(GraphError::MultipleNormalForms(
            g.nodes[nfs[0]].clone(),
            g.nodes[nfs[1]].clone(),
        ));
    }
    let nf = nfs[0];

    // shortest and longest distance to the normal form, with the edge taken
    let n = g.nodes.len();
    let mut lo = vec![0usize; n];
    let mut hi = vec![0usize; n];
    let mut lo_edge = vec![None; n];
    let mut hi_edge = vec![None; n];
    for &v in order.iter().rev() {
        for &e in &g.out[v] {
            let to = g.edges[e].to;
            if lo_edge[v].is_none() || lo[to] + 1 < lo[v] {
                lo[v] = lo[to] + 1;
                lo_edge[v] = Some(e);
            }
            if hi_edge[v].is_none() || hi[to] + 1 > hi[v] {
                hi[v] = hi[to] + 1;
                hi_edge[v] = Some(e);
            }
        }
    }

    let normal_form = g.nodes[nf].clone();
    if lo[0] == hi[0] {
        return Ok(LengthCertificate {
            uniform: true,
            lengths: BTreeSet::from([lo[0]]),
            normal_form,
            witness_pair: None,
        });
    }

    // full length sets are only needed when min and max differ
    let mut sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    sets[nf].insert(0);
    for &v in order.iter().rev() {
        if v == nf {
            continue;
        }
        let mut acc = BTreeSet::new();
        for to in g.successors(v) {
            acc.extend(sets[to].iter().map(|k| k + 1));
        }
        sets[v] = acc;
    }
    Ok(LengthCertificate {
        uniform: false,
        lengths: std::mem::take(&mut sets[0]),
        normal_form,
        witness_pair: Some((g.trace_along(trs, &lo_edge), g.trace_along(trs, &hi_edge))),
    })
}

/// A node `s` with distinct reducts `t`, `u` that have no common one-step reduct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiamondViolation {
    pub source: Term,
    pub left: Term,
    pub right: Term,
}

/// Every violation of the one-step diamond property, in node order.
pub fn diamond_violations(g: &ReductionGraph) -> Result<Vec<DiamondViolation>, GraphError> {
    if !g.complete {
        return Err(GraphError::Incomplete);
    }
    let mut found = Vec::new();
    for s in 0..g.nodes.len() {
        let succ = g.successors(s);
        for (i, &t) in succ.iter().enumerate() {
            let from_t: HashSet<NodeId> = g.successors(t).into_iter().collect();
            for &u in &succ[i + 1..] {
                if !g.successors(u).iter().any(|w| from_t.contains(w)) {
                    found.push(DiamondViolation {
                        source: g.nodes[s].clone(),
                        left: g.nodes[t].clone(),
                        right: g.nodes[u].clone(),
                    });
                }
            }
        }
    }
    Ok(found)
}

/// `None` if the diamond property holds on the graph, else the first
/// counterexample.
pub fn check_diamond(g: &ReductionGraph) -> Result<Option<DiamondViolation>, GraphError> {
    Ok(diamond_violations(g)?.into_iter().next())
}

/// A reachable term with a distinguished symbol whose arguments contain a
/// defined symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachabilityViolation {
    pub term: Term,
    pub position: Position,
}

/// Checks that in every node, arguments of distinguished symbols are free of
/// defined symbols.
pub fn check_sigma_prime_reachability(
    g: &ReductionGraph,
    trs: &Trs,
    sp: &SigmaPrime,
) -> Result<Option<ReachabilityViolation>, GraphError> {
    if !trs.is_basic_term(g.root()) {
        return Err(GraphError::NonBasicRoot(g.root().clone()));
    }
    if !g.complete {
        return Err(GraphError::Incomplete);
    }
    for t in &g.nodes {
        for (p, u) in t.subterms() {
            if !u.root().is_some_and(|f| sp.contains(f)) {
                continue;
            }
            if u.args().iter().any(|a| a.contains_symbol(|f| trs.is_defined(f))) {
                return Ok(Some(ReachabilityViolation {
                    term: t.clone(),
                    position: p,
                }));
            }
        }
    }
    Ok(None)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering. Node ids follow discovery order; normal forms of a
/// complete graph are drawn as double circles.
pub fn to_dot(g: &ReductionGraph) -> String {
    let mut s = String::from("digraph reductions {\n  rankdir=TB;\n");
    let nfs: HashSet<NodeId> = if g.complete {
        g.normal_forms().into_iter().collect()
    } else {
        HashSet::new()
    };
    for (i, t) in g.nodes.iter().enumerate() {
        let shape = if nfs.contains(&i) { "doublecircle" } else { "ellipse" };
        let _ = writeln!(s, "  n{i} [label=\"{}\", shape={shape}];", dot_escape(&t.to_string()));
    }
    for e in &g.edges {
        let _ = writeln!(
            s,
            "  n{} -> n{} [label=\"{}@{}\"];",
            e.from, e.to, e.rule_index, e.position
        );
    }
    s.push_str("}\n");
    s
}
