//! Builtin arithmetic systems, numeral encodings and step-count benchmarks.
//!
//! Unary numerals are `s^n(z)`. Binary numerals are built from `one` (1),
//! `p0` (x ↦ 2x) and `p1` (x ↦ 2x+1), written in prefix notation with the
//! most significant digit innermost, so 29 = 11101₂ is `p1(p0(p1(p1(one))))`.
//! There is no zero: every positive integer has exactly one representation.
//!
//! Binary operators are spelled `succ`, `add` and `mul`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use thiserror::Error;

use crate::criterion::SigmaPrime;
use crate::engine::{count_steps, Strategy};
use crate::term::{Node, Symbol, Term};
use crate::trs::{parse_trs, Trs};

const UNARY_PM: &str = "(VAR x y)
(RULES
  pl(z,x) -> x
  pl(s(x),y) -> s(pl(x,y))
  ml(z,x) -> z
  ml(s(x),y) -> pl(ml(x,y),y)
)
";

const UNARY_FIB: &str = "(VAR x y)
(RULES
  pl(z,x) -> x
  pl(s(x),y) -> s(pl(x,y))
  fib(z) -> z
  fib(s(z)) -> s(z)
  fib(s(s(x))) -> pl(fib(x),fib(s(x)))
)
";

const UNARY_FACT: &str = "(VAR x y)
(RULES
  pl(z,x) -> x
  pl(s(x),y) -> s(pl(x,y))
  ml(z,x) -> z
  ml(s(x),y) -> pl(ml(x,y),y)
  fact(z) -> s(z)
  fact(s(x)) -> ml(s(x),fact(x))
)
";

const SUCC_RULES: &str = "  succ(one) -> p0(one)
  succ(p0(x)) -> p1(x)
  succ(p1(x)) -> p0(succ(x))
";

const ADD_RULES: &str = "  add(one,x) -> succ(x)
  add(p0(x),one) -> p1(x)
  add(p1(x),one) -> p0(succ(x))
  add(p0(x),p0(y)) -> p0(add(x,y))
  add(p0(x),p1(y)) -> p1(add(x,y))
  add(p1(x),p0(y)) -> p1(add(x,y))
  add(p1(x),p1(y)) -> p0(succ(add(x,y)))
";

const MUL_RULES: &str = "  mul(one,x) -> x
  mul(p0(x),y) -> p0(mul(x,y))
  mul(p1(x),y) -> add(p0(mul(x,y)),y)
";

// Recursion descends whichever argument ends in a 0 digit, so both
// mul(2^n, m) and mul(m, 2^n) take O(n) steps.
const MUL_SYM_RULES: &str = "  mul(one,one) -> one
  mul(p0(x),one) -> p0(x)
  mul(p1(x),one) -> p1(x)
  mul(one,p0(x)) -> p0(x)
  mul(one,p1(x)) -> p1(x)
  mul(p0(x),p0(y)) -> p0(p0(mul(x,y)))
  mul(p0(x),p1(y)) -> p0(mul(x,p1(y)))
  mul(p1(x),p0(y)) -> p0(mul(p1(x),y))
  mul(p1(x),p1(y)) -> add(p0(mul(x,p1(y))),p1(y))
";

const FG_EXAMPLE: &str = "(VAR x)
(RULES
  f(z) -> z
  f(s(x)) -> s(z)
  g(x) -> f(f(x))
)
";

/// How numbers are written in a builtin system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Notation {
    Unary,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    UnaryPm,
    UnaryFib,
    UnaryFact,
    BinarySucc,
    BinaryAdd,
    BinaryMul,
    BinaryMulSym,
    FgExample,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown builtin system `{0}`")]
pub struct UnknownBuiltin(pub String);

impl Builtin {
    pub const ALL: [Builtin; 8] = [
        Builtin::UnaryPm,
        Builtin::UnaryFib,
        Builtin::UnaryFact,
        Builtin::BinarySucc,
        Builtin::BinaryAdd,
        Builtin::BinaryMul,
        Builtin::BinaryMulSym,
        Builtin::FgExample,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::UnaryPm => "unary-pm",
            Builtin::UnaryFib => "unary-fib",
            Builtin::UnaryFact => "unary-fact",
            Builtin::BinarySucc => "binary-succ",
            Builtin::BinaryAdd => "binary-add",
            Builtin::BinaryMul => "binary-mul",
            Builtin::BinaryMulSym => "binary-mul-sym",
            Builtin::FgExample => "fg-example",
        }
    }

    pub fn notation(self) -> Notation {
        match self {
            Builtin::UnaryPm | Builtin::UnaryFib | Builtin::UnaryFact | Builtin::FgExample => {
                Notation::Unary
            }
            _ => Notation::Binary,
        }
    }

    /// The system in the `(VAR ...) (RULES ...)` file format.
    pub fn source(self) -> String {
        let binary = |parts: &[&str]| format!("(VAR x y)\n(RULES\n{})\n", parts.concat());
        match self {
            Builtin::UnaryPm => UNARY_PM.to_string(),
            Builtin::UnaryFib => UNARY_FIB.to_string(),
            Builtin::UnaryFact => UNARY_FACT.to_string(),
            Builtin::BinarySucc => binary(&[SUCC_RULES]),
            Builtin::BinaryAdd => binary(&[SUCC_RULES, ADD_RULES]),
            Builtin::BinaryMul => binary(&[SUCC_RULES, ADD_RULES, MUL_RULES]),
            Builtin::BinaryMulSym => binary(&[SUCC_RULES, ADD_RULES, MUL_SYM_RULES]),
            Builtin::FgExample => FG_EXAMPLE.to_string(),
        }
    }

    pub fn trs(self) -> &'static Trs {
        static CACHE: [OnceLock<Trs>; 8] = [const { OnceLock::new() }; 8];
        let slot = Builtin::ALL.iter().position(|b| *b == self).expect("listed");
        CACHE[slot].get_or_init(|| parse_trs(&self.source()).expect("builtin systems parse"))
    }

    /// The distinguished set under which the criterion is known to hold.
    pub fn expected_sigma_prime(self) -> Option<SigmaPrime> {
        let names: &[&str] = match self {
            Builtin::UnaryPm => &["ml"],
            Builtin::UnaryFib => &["fib"],
            Builtin::BinarySucc | Builtin::BinaryAdd => &[],
            Builtin::BinaryMul | Builtin::BinaryMulSym => &["mul"],
            Builtin::UnaryFact | Builtin::FgExample => return None,
        };
        Some(SigmaPrime::from_names(self.trs(), names).expect("symbols exist"))
    }

    pub fn encode(self, n: u64) -> Result<Term, NumeralError> {
        match self.notation() {
            Notation::Unary => Ok(encode_unary(n)),
            Notation::Binary => encode_binary(n),
        }
    }

    pub fn decode(self, t: &Term) -> Result<u64, NumeralError> {
        match self.notation() {
            Notation::Unary => decode_unary(t),
            Notation::Binary => decode_binary(t),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = UnknownBuiltin;

    fn from_str(s: &str) -> Result<Builtin, UnknownBuiltin> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| UnknownBuiltin(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumeralError {
    #[error("binary numerals start at 1; 0 has no representation")]
    Zero,
    #[error("{0} is not a numeral")]
    NotNumeral(Term),
    #[error("numeral value overflows")]
    Overflow,
}

fn sym(name: &str, arity: usize) -> Symbol {
    Symbol::new(name, arity)
}

pub fn encode_unary(n: u64) -> Term {
    let s = sym("s", 1);
    (0..n).fold(Term::constant(sym("z", 0)), |t, _| Term::app(s.clone(), vec![t]))
}

pub fn decode_unary(t: &Term) -> Result<u64, NumeralError> {
    let mut n = 0u64;
    let mut cur = t;
    loop {
        match cur.node() {
            Node::App(f, args) if f.name() == "z" && args.is_empty() => return Ok(n),
            Node::App(f, args) if f.name() == "s" && args.len() == 1 => {
                n += 1;
                cur = &args[0];
            }
            _ => return Err(NumeralError::NotNumeral(t.clone())),
        }
    }
}

pub fn encode_binary(n: u64) -> Result<Term, NumeralError> {
    if n == 0 {
        return Err(NumeralError::Zero);
    }
    let bits = 64 - n.leading_zeros();
    let mut t = Term::constant(sym("one", 0));
    for i in (0..bits - 1).rev() {
        let digit = if (n >> i) & 1 == 1 { "p1" } else { "p0" };
        t = Term::app(sym(digit, 1), vec![t]);
    }
    Ok(t)
}

pub fn decode_binary(t: &Term) -> Result<u64, NumeralError> {
    let mut digits = Vec::new();
    let mut cur = t;
    loop {
        match cur.node() {
            Node::App(f, args) if f.name() == "one" && args.is_empty() => break,
            Node::App(f, args) if args.len() == 1 && (f.name() == "p0" || f.name() == "p1") => {
                digits.push(f.name() == "p1");
                cur = &args[0];
            }
            _ => return Err(NumeralError::NotNumeral(t.clone())),
        }
    }
    digits.iter().rev().try_fold(1u64, |acc, &d| {
        acc.checked_mul(2)
            .and_then(|v| v.checked_add(d as u64))
            .ok_or(NumeralError::Overflow)
    })
}

/// Number of binary digits of a positive integer.
pub fn bit_length(n: u64) -> u32 {
    64 - n.leading_zeros()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueError {
    #[error("term {0} is not ground")]
    NotGround(Term),
    #[error("symbol `{0}` has no arithmetic meaning in this system")]
    UnknownSymbol(String),
    #[error("value overflows")]
    Overflow,
}

fn fib(n: u128) -> Option<u128> {
    let (mut a, mut b) = (0u128, 1u128);
    for _ in 0..n {
        let next = a.checked_add(b)?;
        a = b;
        b = next;
    }
    Some(a)
}

fn factorial(n: u128) -> Option<u128> {
    (1..=n).try_fold(1u128, |acc, k| acc.checked_mul(k))
}

/// The arithmetic value denoted by a ground term of a builtin system.
///
/// Every rule of every builtin preserves this value.
pub fn value_of(system: Builtin, t: &Term) -> Result<u128, ValueError> {
    let Node::App(f, args) = t.node() else {
        return Err(ValueError::NotGround(t.clone()));
    };
    let vals = args
        .iter()
        .map(|a| value_of(system, a))
        .collect::<Result<Vec<_>, _>>()?;
    let of = ValueError::Overflow;
    let v = match (system.notation(), f.name(), vals.as_slice()) {
        (Notation::Unary, "z", []) => Some(0),
        (Notation::Unary, "s", [x]) => x.checked_add(1),
        (Notation::Unary, "pl", [x, y]) => x.checked_add(*y),
        (Notation::Unary, "ml", [x, y]) => x.checked_mul(*y),
        (Notation::Unary, "fib", [x]) => fib(*x),
        (Notation::Unary, "fact", [x]) => factorial(*x),
        (Notation::Unary, "f", [x]) => Some(u128::from(*x > 0)),
        (Notation::Unary, "g", [x]) => Some(u128::from(*x > 0)),
        (Notation::Binary, "one", []) => Some(1),
        (Notation::Binary, "p0", [x]) => x.checked_mul(2),
        (Notation::Binary, "p1", [x]) => x.checked_mul(2).and_then(|v| v.checked_add(1)),
        (Notation::Binary, "succ", [x]) => x.checked_add(1),
        (Notation::Binary, "add", [x, y]) => x.checked_add(*y),
        (Notation::Binary, "mul", [x, y]) => x.checked_mul(*y),
        _ => return Err(ValueError::UnknownSymbol(f.name().to_string())),
    };
    v.ok_or(of)
}

/// One measured normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchRow {
    pub system: Builtin,
    pub op: String,
    pub args: Vec<u64>,
    pub strategy: Strategy,
    pub steps: usize,
    pub value: u64,
}

impl BenchRow {
    pub const CSV_HEADER: &'static str = "system,op,args,strategy,steps,value";

    /// `system,op,args,strategy,steps,value` with args joined by spaces.
    pub fn to_csv(&self) -> String {
        let args: Vec<String> = self.args.iter().map(|a| a.to_string()).collect();
        format!(
            "{},{},{},{},{},{}",
            self.system,
            self.op,
            args.join(" "),
            self.strategy,
            self.steps,
            self.value
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("`{op}` is not a defined symbol of {system}")]
    UnknownOperator { system: Builtin, op: String },
    #[error("`{op}` takes {expected} arguments, got {found}")]
    Arity {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Numeral(#[from] NumeralError),
    #[error("fuel exhausted after {steps} steps under {strategy}")]
    FuelExhausted { strategy: Strategy, steps: usize },
}

/// Builds the basic term `op(args..)` in the system's notation.
pub fn basic_term(system: Builtin, op: &str, args: &[u64]) -> Result<Term, BenchError> {
    let trs = system.trs();
    let f = trs
        .defined_symbols()
        .into_iter()
        .find(|f| f.name() == op)
        .ok_or_else(|| BenchError::UnknownOperator {
            system,
            op: op.to_string(),
        })?;
    if f.arity() != args.len() {
        return Err(BenchError::Arity {
            op: op.to_string(),
            expected: f.arity(),
            found: args.len(),
        });
    }
    let encoded = args
        .iter()
        .map(|&a| system.encode(a))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Term::app(f, encoded))
}

/// Normalizes `op(args..)` under each strategy and decodes the result.
pub fn bench(
    system: Builtin,
    op: &str,
    args: &[u64],
    strategies: &[Strategy],
    fuel: usize,
) -> Result<Vec<BenchRow>, BenchError> {
    let t = basic_term(system, op, args)?;
    strategies
        .iter()
        .map(|&strategy| {
            let (steps, nf) = count_steps(system.trs(), &t, strategy, fuel)
                .map_err(|steps| BenchError::FuelExhausted { strategy, steps })?;
            Ok(BenchRow {
                system,
                op: op.to_string(),
                args: args.to_vec(),
                strategy,
                steps,
                value: system.decode(&nf)?,
            })
        })
        .collect()
}
