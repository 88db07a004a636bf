//! First-order terms, positions, signatures and substitutions.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

/// A function symbol with a fixed arity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Symbol {
    name: Arc<str>,
    arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<Arc<str>>, arity: usize) -> Symbol {
        Symbol {
            name: name.into(),
            arity,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A term variable. Variables live in their own namespace and compare by name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Variable(Arc<str>);

impl Variable {
    pub fn new(name: impl Into<Arc<str>>) -> Variable {
        Variable(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("symbol {symbol} expects {expected} arguments, got {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("position {position} does not address a subterm of {term}")]
    InvalidPosition { position: Position, term: String },
    #[error("symbol {name} declared with arities {first} and {second}")]
    InconsistentArity {
        name: String,
        first: usize,
        second: usize,
    },
}

/// The shape of a term node.
#[derive(Debug, PartialEq, Eq)]
pub enum Node {
    Var(Variable),
    App(Symbol, Vec<Term>),
}

#[derive(Debug)]
struct TermData {
    node: Node,
    hash: u64,
    size: usize,
}

/// An immutable, cheaply clonable first-order term.
///
/// Equality and hashing are structural. Each node caches its structural hash
/// and size so that deduplicating large sets of terms stays cheap.
#[derive(Clone)]
pub struct Term(Arc<TermData>);

impl Term {
    pub fn var(v: Variable) -> Term {
        let mut h = DefaultHasher::new();
        0u8.hash(&mut h);
        v.hash(&mut h);
        Term(Arc::new(TermData {
            hash: h.finish(),
            size: 1,
            node: Node::Var(v),
        }))
    }

    /// Builds `symbol(args..)`.
    ///
    /// Panics if the number of arguments differs from the arity; use
    /// [`Term::try_app`] for unchecked input.
    pub fn app(symbol: Symbol, args: Vec<Term>) -> Term {
        Term::try_app(symbol, args).expect("arity mismatch")
    }

    pub fn try_app(symbol: Symbol, args: Vec<Term>) -> Result<Term, TermError> {
        if symbol.arity() != args.len() {
            return Err(TermError::ArityMismatch {
                symbol: symbol.name().to_string(),
                expected: symbol.arity(),
                found: args.len(),
            });
        }
        let mut h = DefaultHasher::new();
        1u8.hash(&mut h);
        symbol.hash(&mut h);
        let mut size = 1;
        for a in &args {
            h.write_u64(a.0.hash);
            size += a.0.size;
        }
        Ok(Term(Arc::new(TermData {
            hash: h.finish(),
            size,
            node: Node::App(symbol, args),
        })))
    }

    pub fn constant(symbol: Symbol) -> Term {
        Term::app(symbol, Vec::new())
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn is_var(&self) -> bool {
        matches!(self.0.node, Node::Var(_))
    }

    pub fn as_var(&self) -> Option<&Variable> {
        match &self.0.node {
            Node::Var(v) => Some(v),
            Node::App(..) => None,
        }
    }

    /// Root symbol; `None` for variables.
    pub fn root(&self) -> Option<&Symbol> {
        match &self.0.node {
            Node::Var(_) => None,
            Node::App(f, _) => Some(f),
        }
    }

    pub fn args(&self) -> &[Term] {
        match &self.0.node {
            Node::Var(_) => &[],
            Node::App(_, args) => args,
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        self.0.size
    }

    pub fn is_ground(&self) -> bool {
        self.subterms().all(|(_, t)| !t.is_var())
    }

    /// Distinct variables in order of first occurrence (preorder).
    pub fn vars(&self) -> Vec<Variable> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (_, t) in self.subterms() {
            if let Some(v) = t.as_var() {
                if seen.insert(v.clone()) {
                    out.push(v.clone());
                }
            }
        }
        out
    }

    /// Number of occurrences of `v`.
    pub fn occurrences(&self, v: &Variable) -> usize {
        self.subterms()
            .filter(|(_, t)| t.as_var() == Some(v))
            .count()
    }

    /// Preorder traversal yielding each position with its subterm.
    pub fn subterms(&self) -> Subterms<'_> {
        Subterms {
            stack: vec![(Position::root(), self)],
        }
    }

    /// All positions in preorder: root first, children left to right.
    pub fn positions(&self) -> Vec<Position> {
        self.subterms().map(|(p, _)| p).collect()
    }

    pub fn subterm_at(&self, p: &Position) -> Option<&Term> {
        let mut t = self;
        for &i in p.indices() {
            t = t.args().get(i.checked_sub(1)?)?;
        }
        Some(t)
    }

    /// Returns the term with the subterm at `p` replaced by `u`.
    /// Subterms off the path to `p` are shared, not copied.
    pub fn replace_at(&self, p: &Position, u: Term) -> Result<Term, TermError> {
        self.replace_from(p.indices(), u).ok_or_else(|| TermError::InvalidPosition {
            position: p.clone(),
            term: self.to_string(),
        })
    }

    fn replace_from(&self, path: &[usize], u: Term) -> Option<Term> {
        let Some((&first, rest)) = path.split_first() else {
            return Some(u);
        };
        let Node::App(f, args) = &self.0.node else {
            return None;
        };
        let idx = first.checked_sub(1)?;
        let child = args.get(idx)?.replace_from(rest, u)?;
        let mut new_args = args.clone();
        new_args[idx] = child;
        Some(Term::app(f.clone(), new_args))
    }

    /// Simultaneous application of `sigma`.
    pub fn apply(&self, sigma: &Substitution) -> Term {
        match &self.0.node {
            Node::Var(v) => sigma.get(v).cloned().unwrap_or_else(|| self.clone()),
            Node::App(f, args) => {
                if args.is_empty() {
                    return self.clone();
                }
                Term::app(f.clone(), args.iter().map(|a| a.apply(sigma)).collect())
            }
        }
    }

    pub fn contains_symbol(&self, pred: impl Fn(&Symbol) -> bool) -> bool {
        self.subterms().any(|(_, t)| t.root().is_some_and(&pred))
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.hash == other.0.hash
                && self.0.size == other.0.size
                && self.0.node == other.0.node)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.node {
            Node::Var(v) => write!(f, "{v}"),
            Node::App(s, args) => {
                write!(f, "{s}")?;
                if let Some((first, rest)) = args.split_first() {
                    write!(f, "({first}")?;
                    for a in rest {
                        write!(f, ",{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub struct Subterms<'a> {
    stack: Vec<(Position, &'a Term)>,
}

impl<'a> Iterator for Subterms<'a> {
    type Item = (Position, &'a Term);

    fn next(&mut self) -> Option<Self::Item> {
        let (p, t) = self.stack.pop()?;
        for (i, a) in t.args().iter().enumerate().rev() {
            self.stack.push((p.child(i + 1), a));
        }
        Some((p, t))
    }
}

/// A path of 1-based child indices; the empty path is the root.
///
/// The derived ordering is lexicographic, which coincides with preorder.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn new(indices: Vec<usize>) -> Position {
        Position(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Position {
        let mut v = self.0.clone();
        v.push(i);
        Position(v)
    }

    /// True if `self` is a (not necessarily proper) prefix of `other`.
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_above(&self, other: &Position) -> bool {
        self.0.len() < other.0.len() && self.is_prefix_of(other)
    }
}

/// Root prints as `e`, other positions as dot-joined indices.
impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

/// A finite map from variables to terms, applied simultaneously.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Substitution(BTreeMap<Variable, Term>);

impl Substitution {
    pub fn new() -> Substitution {
        Substitution::default()
    }

    pub fn get(&self, v: &Variable) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: Variable, t: Term) -> Option<Term> {
        self.0.insert(v, t)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Variable> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, &Term)> {
        self.0.iter()
    }
}

impl FromIterator<(Variable, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Variable, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v} -> {t}")?;
        }
        f.write_str("}")
    }
}

/// A set of symbols with unique names.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct Signature(BTreeMap<Arc<str>, Symbol>);

impl Signature {
    pub fn new() -> Signature {
        Signature::default()
    }

    /// Adds `symbol`; re-adding an identical symbol is a no-op.
    pub fn insert(&mut self, symbol: Symbol) -> Result<(), TermError> {
        match self.0.get(symbol.name()) {
            Some(existing) if existing.arity() != symbol.arity() => Err(TermError::InconsistentArity {
                name: symbol.name().to_string(),
                first: existing.arity(),
                second: symbol.arity(),
            }),
            Some(_) => Ok(()),
            None => {
                self.0.insert(symbol.name.clone(), symbol);
                Ok(())
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.0.get(name)
    }

    pub fn contains(&self, symbol: &Symbol) -> bool {
        self.0.get(symbol.name()) == Some(symbol)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Symbols sorted by name.
    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.0.values()
    }
}

impl FromIterator<Symbol> for Signature {
    /// Panics on conflicting arities.
    fn from_iter<I: IntoIterator<Item = Symbol>>(iter: I) -> Self {
        let mut sig = Signature::new();
        for s in iter {
            sig.insert(s).expect("conflicting arity");
        }
        sig
    }
}
