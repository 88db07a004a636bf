//! Random systems and terms shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng;
use redlen::{redexes, step, Signature, Symbol, Term, Trs, Variable};

const NAMES: [&str; 4] = ["a", "f", "g", "h"];

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub variable_preserving: bool,
    pub orthogonal: bool,
    pub max_rules: usize,
    pub max_symbols: usize,
}

impl Shape {
    /// Variable-preserving, orthogonal, at most five rules over four symbols.
    pub const LINEAR: Shape = Shape {
        variable_preserving: true,
        orthogonal: true,
        max_rules: 5,
        max_symbols: 4,
    };

    pub const ANY: Shape = Shape {
        variable_preserving: false,
        orthogonal: false,
        max_rules: 5,
        max_symbols: 4,
    };
}

fn symbols<R: Rng>(rng: &mut R, max: usize) -> Vec<Symbol> {
    let n = rng.gen_range(2..=max.max(2));
    (0..n)
        .map(|i| {
            let arity = if i == 0 { 0 } else { rng.gen_range(0..=2) };
            Symbol::new(NAMES[i], arity)
        })
        .collect()
}

fn pattern<R: Rng>(rng: &mut R, sig: &[Symbol], depth: usize, fresh: &mut usize) -> Term {
    if depth == 0 || rng.gen_bool(0.5) {
        *fresh += 1;
        return Term::var(Variable::new(format!("x{fresh}")));
    }
    let f = sig.choose(rng).expect("nonempty").clone();
    let args = (0..f.arity())
        .map(|_| pattern(rng, sig, depth - 1, fresh))
        .collect();
    Term::app(f, args)
}

fn ground_leaf<R: Rng>(rng: &mut R, sig: &[Symbol]) -> Term {
    let constants: Vec<&Symbol> = sig.iter().filter(|s| s.arity() == 0).collect();
    Term::constant((*constants.choose(rng).expect("a constant")).clone())
}

/// A term containing each of `vars` exactly once, or `None` if the
/// signature cannot combine them.
fn placing<R: Rng>(rng: &mut R, sig: &[Symbol], mut vars: Vec<Variable>, budget: usize) -> Option<Term> {
    if vars.len() == 1 && (budget == 0 || rng.gen_bool(0.4)) {
        return Some(Term::var(vars.pop().expect("one")));
    }
    if vars.is_empty() && (budget == 0 || rng.gen_bool(0.5)) {
        return Some(ground_leaf(rng, sig));
    }
    let need = if vars.len() >= 2 { 2 } else { 1 };
    let candidates: Vec<&Symbol> = sig.iter().filter(|s| s.arity() >= need).collect();
    let f = (*candidates.choose(rng)?).clone();
    vars.shuffle(rng);
    let mut parts: Vec<Vec<Variable>> = vec![Vec::new(); f.arity()];
    for (i, v) in vars.into_iter().enumerate() {
        // spread the first arity-many so that no child gets everything
        let k = if i < f.arity() { i } else { rng.gen_range(0..f.arity()) };
        parts[k].push(v);
    }
    let args = parts
        .into_iter()
        .map(|p| placing(rng, sig, p, budget.saturating_sub(1)))
        .collect::<Option<Vec<_>>>()?;
    Some(Term::app(f, args))
}

fn any_term<R: Rng>(rng: &mut R, sig: &[Symbol], vars: &[Variable], depth: usize) -> Term {
    if depth == 0 || rng.gen_bool(0.35) {
        if !vars.is_empty() && rng.gen_bool(0.6) {
            return Term::var(vars.choose(rng).expect("nonempty").clone());
        }
        return ground_leaf(rng, sig);
    }
    let f = sig.choose(rng).expect("nonempty").clone();
    let args = (0..f.arity())
        .map(|_| any_term(rng, sig, vars, depth - 1))
        .collect();
    Term::app(f, args)
}

fn attempt<R: Rng>(rng: &mut R, shape: Shape) -> Option<Trs> {
    let sig = symbols(rng, shape.max_symbols);
    let n = rng.gen_range(1..=shape.max_rules);
    let mut rules = Vec::with_capacity(n);
    for _ in 0..n {
        let mut fresh = 0;
        let root = sig.choose(rng).expect("nonempty").clone();
        let args = (0..root.arity())
            .map(|_| pattern(rng, &sig, 2, &mut fresh))
            .collect();
        let mut lhs = Term::app(root, args);
        if !shape.orthogonal && rng.gen_bool(0.15) {
            // occasionally make a pattern non-linear
            if let [x, y, ..] = lhs.vars().as_slice() {
                let mut sigma = redlen::Substitution::new();
                sigma.insert(y.clone(), Term::var(x.clone()));
                lhs = lhs.apply(&sigma);
            }
        }
        let vars = lhs.vars();
        let rhs = if shape.variable_preserving {
            placing(rng, &sig, vars, 3)?
        } else {
            any_term(rng, &sig, &vars, 3)
        };
        if lhs == rhs {
            return None;
        }
        rules.push((lhs, rhs));
    }
    let signature: Signature = sig.into_iter().collect();
    let trs = Trs::new(signature, BTreeSet::new(), rules).ok()?;
    if shape.variable_preserving && !trs.rules().iter().all(|r| r.is_variable_preserving()) {
        return None;
    }
    if shape.orthogonal && !trs.is_orthogonal().0 {
        return None;
    }
    Some(trs)
}

pub fn random_system<R: Rng>(rng: &mut R, shape: Shape) -> Trs {
    loop {
        if let Some(trs) = attempt(rng, shape) {
            return trs;
        }
    }
}

/// A random ground term over the signature of `trs` with at most `max_nodes`
/// nodes.
pub fn random_ground_term<R: Rng>(rng: &mut R, trs: &Trs, max_nodes: usize) -> Term {
    let sig: Vec<Symbol> = trs.signature().iter().cloned().collect();
    let mut budget = rng.gen_range(1..=max_nodes);
    build_ground(rng, &sig, &mut budget)
}

fn build_ground<R: Rng>(rng: &mut R, sig: &[Symbol], budget: &mut usize) -> Term {
    *budget = budget.saturating_sub(1);
    let fits: Vec<&Symbol> = sig.iter().filter(|s| s.arity() <= *budget).collect();
    let f = if *budget == 0 {
        sig.iter().find(|s| s.arity() == 0).expect("a constant")
    } else {
        *fits.choose(rng).expect("a constant fits")
    };
    *budget = budget.saturating_sub(f.arity());
    // children get one reserved node each, plus whatever remains
    let args = (0..f.arity())
        .map(|_| {
            *budget += 1;
            build_ground(rng, sig, budget)
        })
        .collect();
    Term::app(f.clone(), args)
}

/// A random basic ground term: a defined root over constructor arguments.
pub fn random_basic_term<R: Rng>(rng: &mut R, trs: &Trs, max_nodes: usize) -> Option<Term> {
    let defined: Vec<Symbol> = trs.defined_symbols().into_iter().collect();
    let constructors: Vec<Symbol> = trs
        .signature()
        .iter()
        .filter(|s| !trs.is_defined(s))
        .cloned()
        .collect();
    if !constructors.iter().any(|c| c.arity() == 0) {
        return None;
    }
    let f = defined.choose(rng)?.clone();
    let mut budget = max_nodes.saturating_sub(1 + f.arity());
    let args = (0..f.arity())
        .map(|_| {
            budget += 1;
            build_ground(rng, &constructors, &mut budget)
        })
        .collect();
    Some(Term::app(f, args))
}

/// Whether at most `max_terms` terms of size at most `max_size` are
/// reachable from `t`. Guards explicit exploration against systems whose
/// terms grow exponentially while sharing structure.
pub fn tame(trs: &Trs, t: &Term, max_terms: usize, max_size: usize) -> bool {
    let mut seen = HashSet::from([t.clone()]);
    let mut todo = VecDeque::from([t.clone()]);
    while let Some(u) = todo.pop_front() {
        for r in redexes(trs, &u) {
            let v = step(trs, &u, &r).expect("enumerated redex");
            if v.size() > max_size {
                return false;
            }
            if seen.insert(v.clone()) {
                if seen.len() > max_terms {
                    return false;
                }
                todo.push_back(v);
            }
        }
    }
    true
}
