//! One-step rewriting, redex enumeration and strategy-driven normalization.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::term::{Position, Substitution, Term};
use crate::trs::Trs;
use crate::unify::match_pattern;

/// A rule instance inside a term: `lhs(rule)^matcher` sits at `position`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Redex {
    pub position: Position,
    pub rule_index: usize,
    pub matcher: Substitution,
}

/// Which redex to contract next.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    LeftmostInnermost,
    LeftmostOutermost,
    /// Uniform choice among all redexes, determined by the seed and step number.
    RandomRedex(u64),
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Strategy::LeftmostInnermost => f.write_str("li"),
            Strategy::LeftmostOutermost => f.write_str("lo"),
            Strategy::RandomRedex(seed) => write!(f, "random:{seed}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown strategy `{0}` (expected li, lo, random or random:<seed>)")]
pub struct UnknownStrategy(String);

/// Accepts `li`, `lo`, `random` (seed 0) and `random:<seed>`.
impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Strategy, UnknownStrategy> {
        match s {
            "li" => Ok(Strategy::LeftmostInnermost),
            "lo" => Ok(Strategy::LeftmostOutermost),
            "random" => Ok(Strategy::RandomRedex(0)),
            other => other
                .strip_prefix("random:")
                .and_then(|n| n.parse().ok())
                .map(Strategy::RandomRedex)
                .ok_or_else(|| UnknownStrategy(other.to_string())),
        }
    }
}

fn redex_at(trs: &Trs, t: &Term, position: &Position) -> Option<Redex> {
    let f = t.root()?;
    trs.rules_for(f).iter().find_map(|&i| {
        match_pattern(trs.rules()[i].lhs(), t).map(|matcher| Redex {
            position: position.clone(),
            rule_index: i,
            matcher,
        })
    })
}

/// All redexes of `t`, ordered by preorder position, then rule index.
pub fn redexes(trs: &Trs, t: &Term) -> Vec<Redex> {
    let mut out = Vec::new();
    collect_redexes(trs, t, &mut Vec::new(), &mut out);
    out
}

pub(crate) fn collect_redexes(trs: &Trs, t: &Term, path: &mut Vec<usize>, out: &mut Vec<Redex>) {
    let Some(f) = t.root() else { return };
    for &i in trs.rules_for(f) {
        if let Some(matcher) = match_pattern(trs.rules()[i].lhs(), t) {
            out.push(Redex {
                position: Position::new(path.clone()),
                rule_index: i,
                matcher,
            });
        }
    }
    for (i, a) in t.args().iter().enumerate() {
        path.push(i + 1);
        collect_redexes(trs, a, path, out);
        path.pop();
    }
}

fn leftmost_outermost(trs: &Trs, t: &Term) -> Option<Redex> {
    t.subterms().find_map(|(p, u)| redex_at(trs, u, &p))
}

fn leftmost_innermost(trs: &Trs, t: &Term, at: &Position) -> Option<Redex> {
    for (i, a) in t.args().iter().enumerate() {
        if let Some(r) = leftmost_innermost(trs, a, &at.child(i + 1)) {
            return Some(r);
        }
    }
    redex_at(trs, t, at)
}

/// Picks the redex `strategy` would contract at step `step_no`, if any.
pub fn select(trs: &Trs, t: &Term, strategy: Strategy, step_no: u64) -> Option<Redex> {
    match strategy {
        Strategy::LeftmostOutermost => leftmost_outermost(trs, t),
        Strategy::LeftmostInnermost => leftmost_innermost(trs, t, &Position::root()),
        Strategy::RandomRedex(seed) => {
            let mut all = redexes(trs, t);
            if all.is_empty() {
                return None;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(step_no);
            let k = rng.gen_range(0..all.len());
            Some(all.swap_remove(k))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("rule {rule} does not match at position {position}")]
    StaleRedex { rule: usize, position: Position },
}

/// Contracts `r` in `t`.
pub fn step(trs: &Trs, t: &Term, r: &Redex) -> Result<Term, StepError> {
    let stale = || StepError::StaleRedex {
        rule: r.rule_index,
        position: r.position.clone(),
    };
    let rule = trs.rule(r.rule_index).ok_or_else(stale)?;
    let sub = t.subterm_at(&r.position).ok_or_else(stale)?;
    if rule.lhs().apply(&r.matcher) != *sub {
        return Err(stale());
    }
    Ok(contract(trs, t, r))
}

/// [`step`] without re-checking the redex; `r` must come from [`redexes`]
/// or [`select`] on `t`.
pub(crate) fn contract(trs: &Trs, t: &Term, r: &Redex) -> Term {
    let contractum = trs.rules()[r.rule_index].rhs().apply(&r.matcher);
    t.replace_at(&r.position, contractum).expect("redex position is valid")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub redex: Redex,
    pub result: Term,
}

/// A reduction sequence together with every intermediate term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    pub start: Term,
    pub steps: Vec<TraceStep>,
}

impl ReductionTrace {
    pub fn new(start: Term) -> ReductionTrace {
        ReductionTrace {
            start,
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last(&self) -> &Term {
        self.steps.last().map_or(&self.start, |s| &s.result)
    }

    /// Re-checks every step against the rules.
    pub fn validate(&self, trs: &Trs) -> Result<(), StepError> {
        let mut cur = self.start.clone();
        for s in &self.steps {
            let next = step(trs, &cur, &s.redex)?;
            if next != s.result {
                return Err(StepError::StaleRedex {
                    rule: s.redex.rule_index,
                    position: s.redex.position.clone(),
                });
            }
            cur = next;
        }
        Ok(())
    }
}

/// One line per step: `<step#> <position> <rule index> -> <term>`.
impl fmt::Display for ReductionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(
                f,
                "{} {} {} -> {}",
                i + 1,
                s.redex.position,
                s.redex.rule_index,
                s.result
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("fuel exhausted after {} steps", .partial.len())]
pub struct FuelExhausted {
    pub partial: ReductionTrace,
}

/// Rewrites `t` under `strategy` until a normal form is reached or `fuel`
/// steps have been taken.
pub fn normalize(
    trs: &Trs,
    t: &Term,
    strategy: Strategy,
    fuel: usize,
) -> Result<ReductionTrace, FuelExhausted> {
    let mut trace = ReductionTrace::new(t.clone());
    let mut cur = t.clone();
    loop {
        let Some(redex) = select(trs, &cur, strategy, trace.len() as u64) else {
            return Ok(trace);
        };
        if trace.len() >= fuel {
            return Err(FuelExhausted { partial: trace });
        }
        cur = contract(trs, &cur, &redex);
        trace.steps.push(TraceStep {
            redex,
            result: cur.clone(),
        });
    }
}

/// Step count only; avoids keeping intermediate terms alive.
pub fn count_steps(trs: &Trs, t: &Term, strategy: Strategy, fuel: usize) -> Result<(usize, Term), usize> {
    let mut cur = t.clone();
    let mut n = 0;
    while let Some(redex) = select(trs, &cur, strategy, n as u64) {
        if n >= fuel {
            return Err(n);
        }
        cur = contract(trs, &cur, &redex);
        n += 1;
    }
    Ok((n, cur))
}
