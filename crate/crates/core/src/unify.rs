//! Matching, syntactic unification and variable renaming.

use std::collections::{BTreeMap, BTreeSet};

use crate::term::{Node, Substitution, Term, Variable};

/// Finds `sigma` with `pattern^sigma == subject`.
///
/// Non-linear patterns are supported: repeated variables must bind to equal
/// subterms. The domain of the result is exactly the variables of `pattern`.
pub fn match_pattern(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    match_into(pattern, subject, &mut sigma).then_some(sigma)
}

pub(crate) fn match_into(pattern: &Term, subject: &Term, sigma: &mut Substitution) -> bool {
    match pattern.node() {
        Node::Var(v) => match sigma.get(v) {
            Some(bound) => bound == subject,
            None => {
                sigma.insert(v.clone(), subject.clone());
                true
            }
        },
        Node::App(f, pargs) => match subject.node() {
            Node::App(g, sargs) if f == g => pargs
                .iter()
                .zip(sargs)
                .all(|(p, s)| match_into(p, s, sigma)),
            _ => false,
        },
    }
}

/// Most general unifier of `t1` and `t2`, with occurs check.
///
/// The result is idempotent: no variable of its domain occurs in its range.
/// Callers unifying rule sides should rename them apart first.
pub fn unify(t1: &Term, t2: &Term) -> Option<Substitution> {
    let mut bindings: BTreeMap<Variable, Term> = BTreeMap::new();
    let mut work = vec![(t1.clone(), t2.clone())];
    while let Some((a, b)) = work.pop() {
        let a = walk(&a, &bindings);
        let b = walk(&b, &bindings);
        if a == b {
            continue;
        }
        match (a.node(), b.node()) {
            (Node::Var(v), _) => {
                if occurs(v, &b, &bindings) {
                    return None;
                }
                bindings.insert(v.clone(), b.clone());
            }
            (_, Node::Var(v)) => {
                if occurs(v, &a, &bindings) {
                    return None;
                }
                bindings.insert(v.clone(), a.clone());
            }
            (Node::App(f, fa), Node::App(g, ga)) => {
                if f != g {
                    return None;
                }
                work.extend(fa.iter().cloned().zip(ga.iter().cloned()));
            }
        }
    }
    let resolved = bindings
        .keys()
        .map(|v| (v.clone(), resolve(&Term::var(v.clone()), &bindings)))
        .collect();
    Some(resolved)
}

fn walk(t: &Term, bindings: &BTreeMap<Variable, Term>) -> Term {
    let mut cur = t.clone();
    while let Some(v) = cur.as_var() {
        match bindings.get(v) {
            Some(next) => cur = next.clone(),
            None => break,
        }
    }
    cur
}

fn occurs(v: &Variable, t: &Term, bindings: &BTreeMap<Variable, Term>) -> bool {
    let t = walk(t, bindings);
    match t.node() {
        Node::Var(w) => w == v,
        Node::App(_, args) => args.iter().any(|a| occurs(v, a, bindings)),
    }
}

fn resolve(t: &Term, bindings: &BTreeMap<Variable, Term>) -> Term {
    let t = walk(t, bindings);
    match t.node() {
        Node::Var(_) => t,
        Node::App(f, args) => Term::app(
            f.clone(),
            args.iter().map(|a| resolve(a, bindings)).collect(),
        ),
    }
}

/// Renames the variables of `t` that occur in `avoid`.
///
/// Each clashing variable `x` becomes `x<k>` for the least `k >= 1` such that
/// the new name is neither in `avoid`, nor a variable of `t`, nor already
/// chosen for another variable. Sharing is preserved.
pub fn rename_apart(t: &Term, avoid: &BTreeSet<Variable>) -> Term {
    let own: BTreeSet<Variable> = t.vars().into_iter().collect();
    let mut taken: BTreeSet<Variable> = avoid.union(&own).cloned().collect();
    let mut sigma = Substitution::new();
    for v in t.vars() {
        if !avoid.contains(&v) {
            continue;
        }
        let fresh = (1..)
            .map(|k| Variable::new(format!("{}{}", v.name(), k)))
            .find(|c| !taken.contains(c))
            .expect("unbounded suffixes");
        taken.insert(fresh.clone());
        sigma.insert(v, Term::var(fresh));
    }
    if sigma.is_empty() {
        t.clone()
    } else {
        t.apply(&sigma)
    }
}
