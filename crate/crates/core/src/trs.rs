//! Rewrite rules, rewrite systems and their structural properties.
//!
//! Systems are read from a TPDB-style text format:
//!
//! ```text
//! (VAR x y)
//! (RULES
//!   pl(z,x) -> x
//!   pl(s(x),y) -> s(pl(x,y))   ; comments run to end of line
//! )
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::parse::{raw_term, resolve, Lexer, ParseError, RawTerm, Tok};
use crate::term::{Position, Signature, Substitution, Symbol, Term, TermError, Variable};
use crate::unify::{rename_apart, unify};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrsError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("symbol `{name}` used with arity {first} and later with arity {second} (byte {offset})")]
    InconsistentArity {
        name: String,
        first: usize,
        second: usize,
        offset: usize,
    },
    #[error("rule {rule}: left-hand side is a variable")]
    LhsIsVariable { rule: usize },
    #[error("rule {rule}: variable `{var}` of the right-hand side does not occur on the left")]
    UnboundRhsVariable { rule: usize, var: String },
    #[error("rule {rule}: {source}")]
    IllFormed { rule: usize, source: TermError },
}

/// A rewrite rule `lhs -> rhs`, numbered by its position in the system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    lhs: Term,
    rhs: Term,
    index: usize,
}

impl Rule {
    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// Every variable of the left-hand side occurs exactly once on the right.
    pub fn is_variable_preserving(&self) -> bool {
        self.lhs
            .vars()
            .iter()
            .all(|v| self.rhs.occurrences(v) == 1)
    }

    pub fn is_left_linear(&self) -> bool {
        self.lhs.vars().iter().all(|v| self.lhs.occurrences(v) == 1)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// A term rewriting system: signature, declared variables and ordered rules.
#[derive(Debug, Clone)]
pub struct Trs {
    signature: Signature,
    variables: BTreeSet<Variable>,
    rules: Vec<Rule>,
    by_root: HashMap<Symbol, Vec<usize>>,
}

impl PartialEq for Trs {
    fn eq(&self, other: &Trs) -> bool {
        self.signature == other.signature
            && self.variables == other.variables
            && self.rules == other.rules
    }
}

impl Eq for Trs {}

impl Trs {
    /// Builds a system, checking every rule for well-formedness.
    ///
    /// Symbols occurring in rules are added to `signature`; variables are
    /// added to `variables`.
    pub fn new(
        mut signature: Signature,
        mut variables: BTreeSet<Variable>,
        rules: Vec<(Term, Term)>,
    ) -> Result<Trs, TrsError> {
        let mut out = Vec::with_capacity(rules.len());
        for (index, (lhs, rhs)) in rules.into_iter().enumerate() {
            if lhs.is_var() {
                return Err(TrsError::LhsIsVariable { rule: index });
            }
            let lhs_vars = lhs.vars();
            if let Some(v) = rhs.vars().into_iter().find(|v| !lhs_vars.contains(v)) {
                return Err(TrsError::UnboundRhsVariable {
                    rule: index,
                    var: v.name().to_string(),
                });
            }
            for side in [&lhs, &rhs] {
                for (_, t) in side.subterms() {
                    match t.root() {
                        Some(f) => signature
                            .insert(f.clone())
                            .map_err(|source| TrsError::IllFormed { rule: index, source })?,
                        None => {
                            variables.insert(t.as_var().expect("variable").clone());
                        }
                    }
                }
            }
            out.push(Rule { lhs, rhs, index });
        }
        let mut by_root: HashMap<Symbol, Vec<usize>> = HashMap::new();
        for r in &out {
            by_root
                .entry(r.lhs.root().expect("non-variable lhs").clone())
                .or_default()
                .push(r.index);
        }
        Ok(Trs {
            signature,
            variables,
            rules: out,
            by_root,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn variables(&self) -> &BTreeSet<Variable> {
        &self.variables
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, index: usize) -> Option<&Rule> {
        self.rules.get(index)
    }

    /// Indices of the rules whose left-hand side is rooted in `f`, in order.
    pub fn rules_for(&self, f: &Symbol) -> &[usize] {
        self.by_root.get(f).map_or(&[], Vec::as_slice)
    }

    /// Parses a term against this system's signature and variables.
    pub fn parse_term(&self, text: &str) -> Result<Term, ParseError> {
        crate::parse::parse_term(text, &self.signature, &self.variables)
    }

    /// Symbols that occur as the root of some left-hand side.
    pub fn defined_symbols(&self) -> BTreeSet<Symbol> {
        self.rules
            .iter()
            .filter_map(|r| r.lhs.root().cloned())
            .collect()
    }

    pub fn is_defined(&self, f: &Symbol) -> bool {
        self.by_root.contains_key(f)
    }

    /// True iff the root is defined and no other node carries a defined symbol.
    pub fn is_basic_term(&self, t: &Term) -> bool {
        let Some(root) = t.root() else {
            return false;
        };
        self.is_defined(root)
            && t.args()
                .iter()
                .all(|a| !a.contains_symbol(|f| self.is_defined(f)))
    }

    pub fn is_left_linear(&self) -> bool {
        self.rules.iter().all(Rule::is_left_linear)
    }

    /// All overlaps between left-hand sides, excluding each rule's trivial
    /// overlap with itself at the root.
    pub fn overlaps(&self) -> Vec<OverlapWitness> {
        let mut out = Vec::new();
        for outer in &self.rules {
            let outer_vars: BTreeSet<Variable> = outer.lhs.vars().into_iter().collect();
            for (pos, sub) in outer.lhs.subterms() {
                if sub.is_var() {
                    continue;
                }
                for inner in &self.rules {
                    if inner.index == outer.index && pos.is_root() {
                        continue;
                    }
                    let renamed = rename_apart(&inner.lhs, &outer_vars);
                    if let Some(mgu) = unify(sub, &renamed) {
                        out.push(OverlapWitness {
                            outer_rule: outer.index,
                            inner_rule: inner.index,
                            position: pos.clone(),
                            mgu,
                        });
                    }
                }
            }
        }
        out
    }

    /// Orthogonal means left-linear and overlap-free; overlaps are returned
    /// as diagnostics either way.
    pub fn is_orthogonal(&self) -> (bool, Vec<OverlapWitness>) {
        let witnesses = self.overlaps();
        (self.is_left_linear() && witnesses.is_empty(), witnesses)
    }

    /// Renders the system in the text format accepted by [`parse_trs`].
    pub fn to_file_string(&self) -> String {
        let mut s = String::new();
        if !self.variables.is_empty() {
            s.push_str("(VAR");
            for v in &self.variables {
                s.push(' ');
                s.push_str(v.name());
            }
            s.push_str(")\n");
        }
        s.push_str("(RULES\n");
        for r in &self.rules {
            s.push_str(&format!("  {r}\n"));
        }
        s.push_str(")\n");
        s
    }
}

/// Two left-hand sides that unify: the inner rule's lhs against the outer
/// rule's lhs at a non-variable `position`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapWitness {
    pub outer_rule: usize,
    pub inner_rule: usize,
    pub position: Position,
    pub mgu: Substitution,
}

impl fmt::Display for OverlapWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rule {} overlaps rule {} at position {} with mgu {}",
            self.inner_rule, self.outer_rule, self.position, self.mgu
        )
    }
}

/// Parses the `(VAR ...) (RULES ...)` format.
///
/// Arities are inferred from the first occurrence of each symbol and must be
/// consistent afterwards.
pub fn parse_trs(text: &str) -> Result<Trs, TrsError> {
    let mut lx = Lexer::new(text, true);
    let mut variables = BTreeSet::new();
    let mut raw_rules: Vec<(RawTerm<'_>, RawTerm<'_>)> = Vec::new();
    let mut seen_rules = false;
    while lx.peek()?.is_some() {
        lx.expect(Tok::LParen)?;
        let (o, section) = lx.ident()?;
        match section {
            "VAR" if !seen_rules => loop {
                match lx.next_tok()? {
                    Some((_, Tok::Ident(name))) => {
                        variables.insert(Variable::new(name));
                    }
                    Some((_, Tok::RParen)) => break,
                    Some((o, _)) => return Err(ParseError::syntax("expected variable name or `)`", o).into()),
                    None => return Err(ParseError::syntax("unclosed VAR section", text.len()).into()),
                }
            },
            "RULES" if !seen_rules => {
                seen_rules = true;
                loop {
                    if let Some((_, Tok::RParen)) = lx.peek()? {
                        lx.next_tok()?;
                        break;
                    }
                    if lx.peek()?.is_none() {
                        return Err(ParseError::syntax("unclosed RULES section", text.len()).into());
                    }
                    let lhs = raw_term(&mut lx)?;
                    lx.expect(Tok::Arrow)?;
                    let rhs = raw_term(&mut lx)?;
                    raw_rules.push((lhs, rhs));
                }
            }
            other => {
                return Err(ParseError::syntax(format!("unexpected section `{other}`"), o).into())
            }
        }
    }
    if !seen_rules {
        return Err(ParseError::syntax("missing RULES section", text.len()).into());
    }

    let mut signature = Signature::new();
    let mut first_use: HashMap<&str, (usize, usize)> = HashMap::new();
    fn infer<'a>(
        raw: &RawTerm<'a>,
        variables: &BTreeSet<Variable>,
        signature: &mut Signature,
        first_use: &mut HashMap<&'a str, (usize, usize)>,
    ) -> Result<(), TrsError> {
        if !variables.contains(&Variable::new(raw.name)) {
            let arity = raw.args.len();
            match first_use.get(raw.name) {
                Some(&(first, _)) if first != arity => {
                    return Err(TrsError::InconsistentArity {
                        name: raw.name.to_string(),
                        first,
                        second: arity,
                        offset: raw.offset,
                    })
                }
                Some(_) => {}
                None => {
                    first_use.insert(raw.name, (arity, raw.offset));
                    signature
                        .insert(Symbol::new(raw.name, arity))
                        .expect("first use of symbol");
                }
            }
        }
        raw.args
            .iter()
            .try_for_each(|a| infer(a, variables, signature, first_use))
    }
    for (l, r) in &raw_rules {
        infer(l, &variables, &mut signature, &mut first_use)?;
        infer(r, &variables, &mut signature, &mut first_use)?;
    }

    let rules = raw_rules
        .iter()
        .map(|(l, r)| {
            Ok((
                resolve(l, &signature, &variables)?,
                resolve(r, &signature, &variables)?,
            ))
        })
        .collect::<Result<Vec<_>, ParseError>>()?;
    Trs::new(signature, variables, rules)
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNARY: &str = "(VAR x y)
(RULES
  pl(z,x) -> x
  pl(s(x),y) -> s(pl(x,y))
  ml(z,x) -> z
  ml(s(x),y) -> pl(ml(x,y),y)
)";

    fn sym(n: &str, a: usize) -> Symbol {
        Symbol::new(n, a)
    }

    #[test]
    fn parses_single_rule() {
        let trs = parse_trs("(VAR x)\n(RULES pl(z,x) -> x)").unwrap();
        assert_eq!(trs.rules().len(), 1);
        assert_eq!(trs.rules()[0].to_string(), "pl(z,x) -> x");
        assert!(trs.signature().contains(&sym("pl", 2)));
    }

    #[test]
    fn rejects_variable_lhs() {
        assert_eq!(
            parse_trs("(VAR x)\n(RULES x -> x)").unwrap_err(),
            TrsError::LhsIsVariable { rule: 0 }
        );
    }

    #[test]
    fn rejects_unbound_rhs_variable() {
        assert_eq!(
            parse_trs("(VAR x y)\n(RULES f(x) -> g(x,y))").unwrap_err(),
            TrsError::UnboundRhsVariable { rule: 0, var: "y".into() }
        );
    }

    #[test]
    fn rejects_inconsistent_arity() {
        let e = parse_trs("(VAR x)\n(RULES f(x) -> f(x,x))").unwrap_err();
        assert!(matches!(e, TrsError::InconsistentArity { first: 1, second: 2, .. }));
    }

    #[test]
    fn rejects_applied_variable_and_syntax_errors() {
        assert!(matches!(parse_trs("(VAR x)\n(RULES f(x(z)) -> z)"), Err(TrsError::Parse(_))));
        assert!(matches!(parse_trs("(RULES f(z) z)"), Err(TrsError::Parse(_))));
        assert!(matches!(parse_trs("(VAR x)"), Err(TrsError::Parse(_))));
        assert!(matches!(parse_trs("(RULES f(z) -> z"), Err(TrsError::Parse(_))));
    }

    #[test]
    fn comments_are_skipped() {
        let trs = parse_trs("; header\n(VAR x) ; vars\n(RULES\n f(x) -> x ; id\n)").unwrap();
        assert_eq!(trs.rules().len(), 1);
    }

    #[test]
    fn defined_symbols_and_basic_terms() {
        let trs = parse_trs(UNARY).unwrap();
        let defined: Vec<String> = trs.defined_symbols().iter().map(|s| s.to_string()).collect();
        assert_eq!(defined, ["ml", "pl"]);
        assert!(trs.is_basic_term(&trs.parse_term("ml(s(z),s(z))").unwrap()));
        assert!(trs.is_basic_term(&trs.parse_term("ml(x,s(y))").unwrap()));
        assert!(!trs.is_basic_term(&trs.parse_term("ml(z,pl(z,z))").unwrap()));
        assert!(!trs.is_basic_term(&trs.parse_term("s(z)").unwrap()));
        assert!(!trs.is_basic_term(&trs.parse_term("x").unwrap()));

        let empty = parse_trs("(RULES)").unwrap();
        assert!(empty.defined_symbols().is_empty());
    }

    #[test]
    fn variable_preservation_counts_occurrences() {
        let trs = parse_trs(UNARY).unwrap();
        let vp: Vec<bool> = trs.rules().iter().map(Rule::is_variable_preserving).collect();
        assert_eq!(vp, [true, true, false, false]);
    }

    #[test]
    fn unary_system_is_orthogonal() {
        let (ok, w) = parse_trs(UNARY).unwrap().is_orthogonal();
        assert!(ok);
        assert!(w.is_empty());
    }

    #[test]
    fn self_overlap_below_root() {
        let trs = parse_trs("(VAR x)\n(RULES f(f(x)) -> x)").unwrap();
        let (ok, w) = trs.is_orthogonal();
        assert!(!ok);
        assert_eq!(w.len(), 1);
        assert_eq!((w[0].outer_rule, w[0].inner_rule), (0, 0));
        assert_eq!(w[0].position, Position::new(vec![1]));
    }

    #[test]
    fn root_overlap_between_distinct_rules() {
        let trs = parse_trs("(VAR x)\n(RULES f(x) -> x  f(z) -> z)").unwrap();
        let (ok, w) = trs.is_orthogonal();
        assert!(!ok);
        let pairs: Vec<(usize, usize)> = w.iter().map(|o| (o.outer_rule, o.inner_rule)).collect();
        assert_eq!(pairs, [(0, 1), (1, 0)]);
    }

    #[test]
    fn non_left_linear() {
        let trs = parse_trs("(VAR x)\n(RULES f(x,x) -> x)").unwrap();
        assert!(!trs.is_left_linear());
        assert!(!trs.is_orthogonal().0);
    }

    #[test]
    fn export_round_trips() {
        let trs = parse_trs(UNARY).unwrap();
        assert_eq!(parse_trs(&trs.to_file_string()).unwrap(), trs);
    }

    #[test]
    fn defined_symbols_monotone_under_rule_addition() {
        let base = parse_trs("(VAR x)\n(RULES pl(z,x) -> x)").unwrap();
        let bigger = parse_trs(UNARY).unwrap();
        assert!(base.defined_symbols().is_subset(&bigger.defined_symbols()));
    }
}
