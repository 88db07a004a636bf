//! Memoized exact reduction-length sets without materializing the graph.
//!
//! Two observations keep the search small:
//!
//! * a term whose root is a constructor is never rewritten at the root, so its
//!   lengths are the pairwise sums of its arguments' lengths and its normal
//!   form is the constructor applied to theirs;
//! * below a defined root, constructors reached through constructors cannot
//!   change until the root fires. A root rule that clashes with them is out of
//!   play. A subterm that every remaining root rule binds to a variable
//!   occurring once on each side, through constructors only, neither
//!   influences whether the root fires nor gets copied or erased when it does,
//!   so its steps can be moved past the root step. Such subterms are left
//!   alone until the root fires, or are solved independently once nothing
//!   else can move.
//!
//! Results agree with [`certify_uniform_length`](crate::graph::certify_uniform_length)
//! on complete graphs; the difference is that states are terms reached under
//! the deferral discipline, each solved once.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use thiserror::Error;

use crate::criterion::SigmaPrime;
use crate::engine::{collect_redexes, contract};
use crate::term::{Node, Position, Symbol, Term, Variable};
use crate::trs::Trs;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthSummary {
    pub lengths: BTreeSet<usize>,
    pub normal_form: Term,
    /// With a distinguished set configured: a reachable subterm whose root is
    /// distinguished and whose arguments contain a defined symbol.
    pub sigma_prime_violation: Option<Term>,
}

impl LengthSummary {
    pub fn is_uniform(&self) -> bool {
        self.lengths.len() == 1
    }

    pub fn min_length(&self) -> usize {
        *self.lengths.first().expect("nonempty")
    }

    pub fn max_length(&self) -> usize {
        *self.lengths.last().expect("nonempty")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} reduces to itself (possible nontermination)")]
    Cyclic(Term),
    #[error("more than one normal form is reachable: {0} and {1}")]
    MultipleNormalForms(Term, Term),
    #[error("more than {0} states")]
    Budget(usize),
}

/// How one root rule relates to a term with the same root.
enum RootRule {
    /// Clashes with a constructor that cannot change before a root step.
    Excluded,
    /// Positions of linear variables reached through matching constructors.
    Frontier(Vec<Position>),
}

fn root_rule(lhs: &Term, t: &Term, linear: &BTreeSet<Variable>, trs: &Trs) -> RootRule {
    fn walk(
        pat: &Term,
        t: &Term,
        path: &mut Vec<usize>,
        linear: &BTreeSet<Variable>,
        trs: &Trs,
        out: &mut Vec<Position>,
    ) -> bool {
        match (pat.node(), t.node()) {
            (Node::Var(x), _) => {
                if linear.contains(x) {
                    out.push(Position::new(path.clone()));
                }
                true
            }
            (Node::App(g, ps), Node::App(h, ts)) if !path.is_empty() => {
                if trs.is_defined(h) {
                    true
                } else if g != h {
                    false
                } else {
                    walk_args(ps, ts, path, linear, trs, out)
                }
            }
            (Node::App(_, ps), Node::App(_, ts)) => walk_args(ps, ts, path, linear, trs, out),
            (Node::App(..), Node::Var(_)) => true,
        }
    }
    fn walk_args(
        ps: &[Term],
        ts: &[Term],
        path: &mut Vec<usize>,
        linear: &BTreeSet<Variable>,
        trs: &Trs,
        out: &mut Vec<Position>,
    ) -> bool {
        for (i, (p, u)) in ps.iter().zip(ts).enumerate() {
            path.push(i + 1);
            let ok = walk(p, u, path, linear, trs, out);
            path.pop();
            if !ok {
                return false;
            }
        }
        true
    }
    let mut out = Vec::new();
    if walk(lhs, t, &mut Vec::new(), linear, trs, &mut out) {
        RootRule::Frontier(out)
    } else {
        RootRule::Excluded
    }
}

/// Defined positions of a term, each with the frontiers of its remaining
/// rules. A position is deferred if it lies strictly below one of them and
/// under a frontier of every remaining rule there.
struct Deferral(Vec<(Vec<usize>, Vec<Vec<Position>>)>);

impl Deferral {
    fn covers(&self, q: &[usize]) -> bool {
        self.0.iter().any(|(a, frontiers)| {
            q.len() > a.len()
                && q.starts_with(a)
                && frontiers
                    .iter()
                    .all(|vs| vs.iter().any(|v| q[a.len()..].starts_with(v.indices())))
        })
    }

    /// Outermost deferred positions of `t`.
    fn maximal(&self, t: &Term) -> Vec<Position> {
        fn go(d: &Deferral, t: &Term, path: &mut Vec<usize>, out: &mut Vec<Position>) {
            if d.covers(path) {
                out.push(Position::new(path.clone()));
                return;
            }
            for (i, a) in t.args().iter().enumerate() {
                path.push(i + 1);
                go(d, a, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        go(self, t, &mut Vec::new(), &mut out);
        out
    }
}

/// Solves terms of one system, sharing results across queries.
///
/// Recursion depth grows with reduction length; very long reductions need a
/// correspondingly large stack.
pub struct LengthOracle<'a> {
    trs: &'a Trs,
    /// Per rule, the lhs variables occurring once on each side.
    linear: Vec<BTreeSet<Variable>>,
    /// Symbols below which nested deferral is allowed: all their rules are
    /// linear and only introduce such symbols. Empty unless the system is
    /// constructor-based.
    transparent: HashSet<Symbol>,
    memo: HashMap<Term, Arc<LengthSummary>>,
    active: HashSet<Term>,
    max_states: usize,
    sigma_prime: Option<SigmaPrime>,
}

impl<'a> LengthOracle<'a> {
    pub fn new(trs: &'a Trs, max_states: usize) -> LengthOracle<'a> {
        let linear = trs
            .rules()
            .iter()
            .map(|r| {
                r.lhs()
                    .vars()
                    .into_iter()
                    .filter(|x| r.lhs().occurrences(x) == 1 && r.rhs().occurrences(x) == 1)
                    .collect()
            })
            .collect::<Vec<BTreeSet<Variable>>>();
        let constructor_based = trs.rules().iter().all(|r| {
            r.lhs()
                .args()
                .iter()
                .all(|a| !a.contains_symbol(|g| trs.is_defined(g)))
        });
        let mut transparent: HashSet<Symbol> = HashSet::new();
        if constructor_based {
            transparent = trs
                .defined_symbols()
                .into_iter()
                .filter(|f| {
                    trs.rules_for(f)
                        .iter()
                        .all(|&i| trs.rules()[i].lhs().vars().len() == linear[i].len())
                })
                .collect();
            loop {
                let drop: Vec<Symbol> = transparent
                    .iter()
                    .filter(|f| {
                        trs.rules_for(f).iter().any(|&i| {
                            trs.rules()[i]
                                .rhs()
                                .contains_symbol(|g| trs.is_defined(g) && !transparent.contains(g))
                        })
                    })
                    .cloned()
                    .collect();
                if drop.is_empty() {
                    break;
                }
                for f in drop {
                    transparent.remove(&f);
                }
            }
        }
        LengthOracle {
            trs,
            linear,
            transparent,
            memo: HashMap::new(),
            active: HashSet::new(),
            max_states,
            sigma_prime: None,
        }
    }

    /// Also tracks whether every reachable term keeps the arguments of
    /// symbols in `sp` free of defined symbols.
    pub fn with_sigma_prime(mut self, sp: SigmaPrime) -> LengthOracle<'a> {
        self.sigma_prime = Some(sp);
        self
    }

    fn breaks_sigma_prime(&self, t: &Term) -> bool {
        self.sigma_prime.as_ref().is_some_and(|sp| {
            t.root().is_some_and(|f| sp.contains(f))
                && t.args().iter().any(|a| a.contains_symbol(|g| self.trs.is_defined(g)))
        })
    }

    fn first_violation(&self, t: &Term) -> Option<Term> {
        self.sigma_prime.as_ref()?;
        t.subterms()
            .map(|(_, u)| u)
            .find(|u| self.breaks_sigma_prime(u))
            .cloned()
    }

    /// Number of memoized terms.
    pub fn states(&self) -> usize {
        self.memo.len()
    }

    pub fn solve(&mut self, t: &Term) -> Result<Arc<LengthSummary>, OracleError> {
        if let Some(s) = self.memo.get(t) {
            return Ok(s.clone());
        }
        let summary = match t.node() {
            Node::Var(_) => LengthSummary {
                lengths: BTreeSet::from([0]),
                normal_form: t.clone(),
                sigma_prime_violation: None,
            },
            Node::App(f, args) if !self.trs.is_defined(f) => {
                let all: Vec<Position> = (1..=args.len()).map(|i| Position::new(vec![i])).collect();
                let mut s = self.solve_apart(t, &all)?;
                if self.breaks_sigma_prime(t) {
                    s.sigma_prime_violation = Some(t.clone());
                }
                s
            }
            Node::App(..) => {
                if !self.active.insert(t.clone()) {
                    return Err(OracleError::Cyclic(t.clone()));
                }
                let r = self.solve_defined(t);
                self.active.remove(t);
                r?
            }
        };
        if self.memo.len() >= self.max_states {
            return Err(OracleError::Budget(self.max_states));
        }
        let summary = Arc::new(summary);
        self.memo.insert(t.clone(), summary.clone());
        Ok(summary)
    }

    fn frontiers(&self, t: &Term, f: &Symbol) -> Vec<Vec<Position>> {
        let mut frontiers = Vec::new();
        for &i in self.trs.rules_for(f) {
            match root_rule(self.trs.rules()[i].lhs(), t, &self.linear[i], self.trs) {
                RootRule::Excluded => {}
                RootRule::Frontier(vs) => frontiers.push(vs),
            }
        }
        frontiers
    }

    fn deferral(&self, t: &Term) -> Deferral {
        fn go(
            o: &LengthOracle<'_>,
            u: &Term,
            path: &mut Vec<usize>,
            out: &mut Vec<(Vec<usize>, Vec<Vec<Position>>)>,
        ) {
            if let Some(g) = u.root().filter(|g| o.trs.is_defined(g)) {
                out.push((path.clone(), o.frontiers(u, g)));
                if !o.transparent.contains(g) {
                    return;
                }
            }
            for (i, a) in u.args().iter().enumerate() {
                path.push(i + 1);
                go(o, a, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        go(self, t, &mut Vec::new(), &mut out);
        Deferral(out)
    }

    fn solve_defined(&mut self, t: &Term) -> Result<LengthSummary, OracleError> {
        let here = self.first_violation(t);
        let deferral = self.deferral(t);
        let mut found = Vec::new();
        collect_redexes(self.trs, t, &mut Vec::new(), &mut found);
        found.retain(|r| !deferral.covers(r.position.indices()));
        if found.is_empty() {
            let mut s = self.solve_apart(t, &deferral.maximal(t))?;
            s.sigma_prime_violation = here.or(s.sigma_prime_violation);
            return Ok(s);
        }

        let mut seen = HashSet::new();
        let mut acc: Option<LengthSummary> = None;
        for r in &found {
            let next = contract(self.trs, t, r);
            if !seen.insert(next.clone()) {
                continue;
            }
            let sub = self.solve(&next)?;
            match &mut acc {
                None => {
                    acc = Some(LengthSummary {
                        lengths: sub.lengths.iter().map(|k| k + 1).collect(),
                        normal_form: sub.normal_form.clone(),
                        sigma_prime_violation: here.clone(),
                    })
                }
                Some(a) => {
                    if a.normal_form != sub.normal_form {
                        return Err(OracleError::MultipleNormalForms(
                            a.normal_form.clone(),
                            sub.normal_form.clone(),
                        ));
                    }
                    a.lengths.extend(sub.lengths.iter().map(|k| k + 1));
                }
            }
            let a = acc.as_mut().expect("set above");
            if a.sigma_prime_violation.is_none() {
                a.sigma_prime_violation = sub.sigma_prime_violation.clone();
            }
        }
        Ok(acc.expect("at least one successor"))
    }

    /// Reduces the subterms at disjoint positions `at` independently and in
    /// place; nothing else in `t` may be reducible.
    fn solve_apart(&mut self, t: &Term, at: &[Position]) -> Result<LengthSummary, OracleError> {
        let mut lengths = BTreeSet::from([0]);
        let mut normal_form = t.clone();
        let mut violation = None;
        for q in at {
            let s = self.solve(t.subterm_at(q).expect("position in term"))?;
            if s.lengths != BTreeSet::from([0]) {
                lengths = lengths
                    .iter()
                    .flat_map(|x| s.lengths.iter().map(move |y| x + y))
                    .collect();
                normal_form = normal_form
                    .replace_at(q, s.normal_form.clone())
                    .expect("position in term");
            }
            if violation.is_none() {
                violation = s.sigma_prime_violation.clone();
            }
        }
        Ok(LengthSummary {
            lengths,
            normal_form,
            sigma_prime_violation: violation,
        })
    }
}

/// One-shot [`LengthOracle::solve`].
pub fn reduction_lengths(
    trs: &Trs,
    t: &Term,
    max_states: usize,
) -> Result<LengthSummary, OracleError> {
    LengthOracle::new(trs, max_states)
        .solve(t)
        .map(|s| (*s).clone())
}
