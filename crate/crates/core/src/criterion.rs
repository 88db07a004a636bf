//! Rule-shape criterion for strategy-independent reduction lengths.
//!
//! Given an orthogonal system and a distinguished symbol set `S`, every rule
//! must have one of two shapes:
//!
//! * **type 1**: variable preserving, and neither side mentions a symbol of `S`;
//! * **type 2**: the lhs root is in `S`, and every occurrence of an `S`-symbol
//!   in the rhs has arguments free of defined symbols.
//!
//! When this holds, all reductions of a basic term to normal form have the
//! same length. A failed check only means the criterion does not apply; it
//! says nothing about whether lengths actually differ.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::term::{Position, Symbol};
use crate::trs::{OverlapWitness, Rule, Trs};

/// The distinguished symbol set.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct SigmaPrime(BTreeSet<Symbol>);

impl SigmaPrime {
    pub fn new(symbols: impl IntoIterator<Item = Symbol>) -> SigmaPrime {
        SigmaPrime(symbols.into_iter().collect())
    }

    pub fn empty() -> SigmaPrime {
        SigmaPrime::default()
    }

    /// Resolves symbol names against the system's signature.
    pub fn from_names<S: AsRef<str>>(trs: &Trs, names: &[S]) -> Result<SigmaPrime, CriterionError> {
        names
            .iter()
            .map(|n| {
                trs.signature()
                    .get(n.as_ref())
                    .cloned()
                    .ok_or_else(|| CriterionError::UnknownSymbol(n.as_ref().to_string()))
            })
            .collect::<Result<BTreeSet<_>, _>>()
            .map(SigmaPrime)
    }

    pub fn contains(&self, f: &Symbol) -> bool {
        self.0.contains(f)
    }

    pub fn symbols(&self) -> &BTreeSet<Symbol> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_superset(&self, other: &SigmaPrime) -> bool {
        self.0.is_superset(&other.0)
    }
}

/// Prints as `{a,b}` in name order.
impl fmt::Display for SigmaPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.0.iter().map(Symbol::name).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CriterionError {
    #[error("symbol `{0}` is not in the signature")]
    UnknownSymbol(String),
}

/// Why a rule is not of the first shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Type1Failure {
    NotVariablePreserving { variable: String, occurrences: usize },
    SigmaPrimeInLhs { position: Position, symbol: Symbol },
    SigmaPrimeInRhs { position: Position, symbol: Symbol },
}

/// Why a rule is not of the second shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Type2Failure {
    RootNotInSigmaPrime { root: Symbol },
    /// `defined` occurs at `defined_at` inside an argument of the
    /// `S`-symbol `outer` at `outer_at` (positions in the rhs).
    DefinedSymbolInArgument {
        outer: Symbol,
        outer_at: Position,
        defined: Symbol,
        defined_at: Position,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub type1: Type1Failure,
    pub type2: Type2Failure,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuleClass {
    Type1,
    Type2,
    Violation(Violation),
}

impl RuleClass {
    pub fn is_ok(&self) -> bool {
        !matches!(self, RuleClass::Violation(_))
    }
}

impl fmt::Display for Type1Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type1Failure::NotVariablePreserving { variable, occurrences } => write!(
                f,
                "variable {variable} occurs {occurrences} times in the right-hand side"
            ),
            Type1Failure::SigmaPrimeInLhs { position, symbol } => {
                write!(f, "left-hand side contains {symbol} at {position}")
            }
            Type1Failure::SigmaPrimeInRhs { position, symbol } => {
                write!(f, "right-hand side contains {symbol} at {position}")
            }
        }
    }
}

impl fmt::Display for Type2Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type2Failure::RootNotInSigmaPrime { root } => {
                write!(f, "root {root} is not distinguished")
            }
            Type2Failure::DefinedSymbolInArgument {
                outer,
                outer_at,
                defined,
                defined_at,
            } => write!(
                f,
                "defined symbol {defined} at {defined_at} occurs in an argument of {outer} at {outer_at}"
            ),
        }
    }
}

impl fmt::Display for RuleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleClass::Type1 => f.write_str("TYPE1"),
            RuleClass::Type2 => f.write_str("TYPE2"),
            RuleClass::Violation(v) => {
                write!(f, "VIOLATION (type 1: {}; type 2: {})", v.type1, v.type2)
            }
        }
    }
}

fn type1_failure(rule: &Rule, sp: &SigmaPrime) -> Option<Type1Failure> {
    for v in rule.lhs().vars() {
        let n = rule.rhs().occurrences(&v);
        if n != 1 {
            return Some(Type1Failure::NotVariablePreserving {
                variable: v.name().to_string(),
                occurrences: n,
            });
        }
    }
    let first_distinguished = |t: &crate::term::Term| {
        t.subterms().find_map(|(p, u)| {
            u.root()
                .filter(|f| sp.contains(f))
                .map(|f| (p, f.clone()))
        })
    };
    if let Some((position, symbol)) = first_distinguished(rule.lhs()) {
        return Some(Type1Failure::SigmaPrimeInLhs { position, symbol });
    }
    if let Some((position, symbol)) = first_distinguished(rule.rhs()) {
        return Some(Type1Failure::SigmaPrimeInRhs { position, symbol });
    }
    None
}

fn type2_failure(trs: &Trs, rule: &Rule, sp: &SigmaPrime) -> Option<Type2Failure> {
    let root = rule.lhs().root().expect("non-variable lhs");
    if !sp.contains(root) {
        return Some(Type2Failure::RootNotInSigmaPrime { root: root.clone() });
    }
    for (outer_at, u) in rule.rhs().subterms() {
        let Some(outer) = u.root().filter(|f| sp.contains(f)) else {
            continue;
        };
        for (i, arg) in u.args().iter().enumerate() {
            let hit = arg
                .subterms()
                .find_map(|(p, w)| w.root().filter(|f| trs.is_defined(f)).map(|f| (p, f.clone())));
            if let Some((p, defined)) = hit {
                let mut at = outer_at.indices().to_vec();
                at.push(i + 1);
                at.extend_from_slice(p.indices());
                return Some(Type2Failure::DefinedSymbolInArgument {
                    outer: outer.clone(),
                    outer_at: outer_at.clone(),
                    defined,
                    defined_at: Position::new(at),
                });
            }
        }
    }
    None
}

/// Classifies `rule` against `sp`. A rule of both shapes is reported as type 1.
pub fn classify_rule(trs: &Trs, rule: &Rule, sp: &SigmaPrime) -> RuleClass {
    let Some(type1) = type1_failure(rule, sp) else {
        return RuleClass::Type1;
    };
    match type2_failure(trs, rule, sp) {
        None => RuleClass::Type2,
        Some(type2) => RuleClass::Violation(Violation { type1, type2 }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionReport {
    pub verdict: bool,
    pub per_rule: Vec<(usize, RuleClass)>,
    pub left_linear: bool,
    pub orthogonal: bool,
    pub overlaps: Vec<OverlapWitness>,
    pub sigma_prime: SigmaPrime,
}

impl CriterionReport {
    pub fn violations(&self) -> impl Iterator<Item = (usize, &Violation)> {
        self.per_rule.iter().filter_map(|(i, c)| match c {
            RuleClass::Violation(v) => Some((*i, v)),
            _ => None,
        })
    }
}

/// Checks orthogonality and the rule shapes for `sp`.
pub fn check_criterion(trs: &Trs, sp: &SigmaPrime) -> Result<CriterionReport, CriterionError> {
    if let Some(f) = sp.symbols().iter().find(|f| !trs.signature().contains(f)) {
        return Err(CriterionError::UnknownSymbol(f.name().to_string()));
    }
    let per_rule: Vec<(usize, RuleClass)> = trs
        .rules()
        .iter()
        .map(|r| (r.index(), classify_rule(trs, r, sp)))
        .collect();
    let left_linear = trs.is_left_linear();
    let (orthogonal, overlaps) = trs.is_orthogonal();
    Ok(CriterionReport {
        verdict: orthogonal && per_rule.iter().all(|(_, c)| c.is_ok()),
        per_rule,
        left_linear,
        orthogonal,
        overlaps,
        sigma_prime: sp.clone(),
    })
}

/// The least set forced by the shapes: roots of non-variable-preserving
/// rules, closed under "a rule mentioning a member adds its lhs root".
///
/// Any valid distinguished set contains this one, and growing it cannot
/// repair a rule it already fails, so it is the canonical candidate.
pub fn sigma_prime_candidate(trs: &Trs) -> SigmaPrime {
    let mut set: BTreeSet<Symbol> = trs
        .rules()
        .iter()
        .filter(|r| !r.is_variable_preserving())
        .filter_map(|r| r.lhs().root().cloned())
        .collect();
    loop {
        let before = set.len();
        for r in trs.rules() {
            let mentions = |t: &crate::term::Term| t.contains_symbol(|f| set.contains(f));
            if mentions(r.lhs()) || mentions(r.rhs()) {
                let root = r.lhs().root().expect("non-variable lhs").clone();
                set.insert(root);
            }
        }
        if set.len() == before {
            return SigmaPrime(set);
        }
    }
}

/// The candidate together with its report, whether or not it succeeds.
pub fn infer_with_report(trs: &Trs) -> (SigmaPrime, CriterionReport) {
    let candidate = sigma_prime_candidate(trs);
    let report = check_criterion(trs, &candidate).expect("candidate drawn from the signature");
    (candidate, report)
}

/// A distinguished set satisfying the criterion, if one exists.
pub fn infer_sigma_prime(trs: &Trs) -> Option<SigmaPrime> {
    let (candidate, report) = infer_with_report(trs);
    report.verdict.then_some(candidate)
}
