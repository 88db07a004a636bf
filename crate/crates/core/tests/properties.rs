mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use common::{random_ground_term, random_system, tame, Shape};
use redlen::arith::{basic_term, value_of};
use redlen::criterion::{check_criterion, infer_with_report, RuleClass, Type2Failure};
use redlen::engine::{count_steps, normalize};
use redlen::graph::{certify_uniform_length, check_diamond, explore, to_dot, ReductionGraph};
use redlen::{
    parse_trs, step, Builtin, Node, Notation, SigmaPrime, Strategy, Term, Trs, DEFAULT_FUEL,
};

fn small_basic_terms(sys: Builtin) -> Vec<Term> {
    let values: Vec<u64> = match sys.notation() {
        Notation::Unary => (0..=2).collect(),
        Notation::Binary => (1..=9).collect(),
    };
    let mut out = Vec::new();
    for f in sys.trs().defined_symbols() {
        if f.arity() == 1 {
            for &a in &values {
                out.push(basic_term(sys, f.name(), &[a]).unwrap());
            }
        } else {
            for &a in &values {
                for &b in &values {
                    out.push(basic_term(sys, f.name(), &[a, b]).unwrap());
                }
            }
        }
    }
    out
}

fn some_strategies() -> Vec<Strategy> {
    let mut s = vec![Strategy::LeftmostInnermost, Strategy::LeftmostOutermost];
    s.extend((0..8).map(Strategy::RandomRedex));
    s
}

fn assert_sound(g: &ReductionGraph, trs: &Trs) {
    let mut reached = vec![false; g.node_count()];
    reached[0] = true;
    for e in g.edges() {
        let r = g.redex(trs, e);
        let next = step(trs, &g.nodes()[e.from], &r).expect("edge re-validates");
        assert_eq!(next, g.nodes()[e.to]);
        reached[e.to] = true;
    }
    assert!(reached.iter().all(|&r| r), "a node lacks an incoming edge");
}

#[test]
fn graphs_of_builtins_are_sound_and_bracket_strategies() {
    for sys in Builtin::ALL {
        let trs = sys.trs();
        for t in small_basic_terms(sys) {
            let g = explore(trs, &t, 20_000);
            assert!(g.is_complete(), "{sys} {t}");
            assert_sound(&g, trs);
            let cert = certify_uniform_length(&g, trs).unwrap();
            for s in some_strategies() {
                let trace = normalize(trs, &t, s, DEFAULT_FUEL).unwrap();
                trace.validate(trs).unwrap();
                assert!(cert.lengths.contains(&trace.len()), "{sys} {t} {s}");
                assert!(cert.min_length() <= trace.len() && trace.len() <= cert.max_length());
                assert_eq!(trace.last(), &cert.normal_form);
            }
        }
    }
}

#[test]
fn rules_preserve_values() {
    for sys in Builtin::ALL {
        let trs = sys.trs();
        for t in small_basic_terms(sys) {
            let g = explore(trs, &t, 20_000);
            for e in g.edges() {
                let (a, b) = (&g.nodes()[e.from], &g.nodes()[e.to]);
                assert_eq!(value_of(sys, a).unwrap(), value_of(sys, b).unwrap(), "{sys}: {a} -> {b}");
            }
        }
    }
}

#[test]
fn normal_forms_are_numerals() {
    for sys in Builtin::ALL {
        let allowed: &[&str] = match sys.notation() {
            Notation::Unary => &["s", "z"],
            Notation::Binary => &["one", "p0", "p1"],
        };
        let trs = sys.trs();
        for t in small_basic_terms(sys) {
            let g = explore(trs, &t, 20_000);
            assert!(g.is_complete(), "{sys} {t}");
            for n in g.normal_forms() {
                let nf = &g.nodes()[n];
                assert!(nf.is_ground());
                assert!(!nf.contains_symbol(|f| !allowed.contains(&f.name())), "{sys}: {nf}");
                assert!(sys.decode(nf).is_ok());
            }
        }
    }
}

#[test]
fn verdict_true_builtins_are_strategy_independent() {
    let mut strategies = vec![Strategy::LeftmostInnermost, Strategy::LeftmostOutermost];
    strategies.extend((0..50).map(Strategy::RandomRedex));
    for sys in Builtin::ALL {
        if sys.expected_sigma_prime().is_none() {
            continue;
        }
        for t in small_basic_terms(sys) {
            let results: BTreeSet<(usize, String)> = strategies
                .iter()
                .map(|&s| count_steps(sys.trs(), &t, s, DEFAULT_FUEL).unwrap())
                .map(|(n, nf)| (n, nf.to_string()))
                .collect();
            assert_eq!(results.len(), 1, "{sys} {t}: {results:?}");
        }
    }
}

#[test]
fn results_do_not_depend_on_threads() {
    let sys = Builtin::BinaryMul;
    let trs = sys.trs();
    let terms: Vec<Term> = (1..=40u64)
        .map(|a| basic_term(sys, "mul", &[a, 41 - a]).unwrap())
        .collect();
    let run = |t: &Term| {
        let trace = normalize(trs, t, Strategy::RandomRedex(9), DEFAULT_FUEL).unwrap();
        let dot = to_dot(&explore(trs, t, 20_000));
        (trace.to_string(), dot)
    };
    let sequential: Vec<_> = terms.iter().map(run).collect();
    let parallel: Vec<_> = terms.par_iter().map(run).collect();
    assert_eq!(sequential, parallel);
}

#[test]
fn plus_rules_have_the_diamond_property() {
    let trs = parse_trs("(VAR x y)\n(RULES pl(z,x) -> x  pl(s(x),y) -> s(pl(x,y)))").unwrap();
    let num = |n: usize| "s(".repeat(n) + "z" + &")".repeat(n);
    for a in 0..3 {
        for b in 0..3 {
            let src = format!("pl(pl({},{}),pl({},{}))", num(a), num(b), num(b), num(a));
            let g = explore(&trs, &trs.parse_term(&src).unwrap(), 10_000);
            assert!(g.is_complete());
            assert_eq!(check_diamond(&g).unwrap(), None, "{src}");
        }
    }
}

#[test]
fn type2_failures_survive_enlarging_sigma_prime() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for sys in Builtin::ALL {
        let trs = sys.trs();
        let (candidate, report) = infer_with_report(trs);
        let argument_failures: Vec<usize> = report
            .per_rule
            .iter()
            .filter(|(_, c)| {
                matches!(c, RuleClass::Violation(v)
                    if matches!(v.type2, Type2Failure::DefinedSymbolInArgument { .. }))
            })
            .map(|(i, _)| *i)
            .collect();
        let all: Vec<_> = trs.signature().iter().cloned().collect();
        for _ in 0..30 {
            let k = rand::Rng::gen_range(&mut rng, 0..=all.len());
            let extra = all.choose_multiple(&mut rng, k);
            let bigger = SigmaPrime::new(candidate.symbols().iter().cloned().chain(extra.cloned()));
            let r = check_criterion(trs, &bigger).unwrap();
            for i in &argument_failures {
                assert!(!r.verdict, "{sys}: {bigger}");
                let (_, class) = &r.per_rule[*i];
                assert!(matches!(class, RuleClass::Violation(_)), "{sys} rule {i} under {bigger}");
            }
        }
    }
}

/// Overlap detection by a separate naive unifier.
mod naive {
    use std::collections::HashMap;

    use redlen::{Node, Term, Trs};

    #[derive(Clone, Debug)]
    enum T {
        V(String),
        F(String, Vec<T>),
    }

    fn convert(t: &Term, tag: &str) -> T {
        match t.node() {
            Node::Var(v) => T::V(format!("{}{tag}", v.name())),
            Node::App(f, args) => T::F(f.name().to_string(), args.iter().map(|a| convert(a, tag)).collect()),
        }
    }

    fn walk(t: &T, s: &HashMap<String, T>) -> T {
        match t {
            T::V(v) => s.get(v).map_or(t.clone(), |u| walk(u, s)),
            T::F(..) => t.clone(),
        }
    }

    fn occurs(v: &str, t: &T, s: &HashMap<String, T>) -> bool {
        match walk(t, s) {
            T::V(w) => w == v,
            T::F(_, args) => args.iter().any(|a| occurs(v, a, s)),
        }
    }

    fn unify(a: &T, b: &T, s: &mut HashMap<String, T>) -> bool {
        match (walk(a, s), walk(b, s)) {
            (T::V(x), T::V(y)) if x == y => true,
            (T::V(x), t) | (t, T::V(x)) => {
                if occurs(&x, &t, s) {
                    return false;
                }
                s.insert(x, t);
                true
            }
            (T::F(f, xs), T::F(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(&ys).all(|(x, y)| unify(x, y, s))
            }
        }
    }

    fn subterms(t: &T, root: bool, out: &mut Vec<(T, bool)>) {
        if let T::F(_, args) = t {
            out.push((t.clone(), root));
            for a in args {
                subterms(a, false, out);
            }
        }
    }

    pub fn has_overlap(trs: &Trs) -> bool {
        let rules = trs.rules();
        for (i, outer) in rules.iter().enumerate() {
            let mut subs = Vec::new();
            subterms(&convert(outer.lhs(), "_o"), true, &mut subs);
            for (j, inner) in rules.iter().enumerate() {
                let inner = convert(inner.lhs(), "_i");
                for (sub, root) in &subs {
                    if i == j && *root {
                        continue;
                    }
                    if unify(sub, &inner, &mut HashMap::new()) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

#[test]
fn orthogonality_matches_naive_check() {
    for sys in Builtin::ALL {
        let trs = sys.trs();
        let (ortho, _) = trs.is_orthogonal();
        assert_eq!(ortho, trs.is_left_linear() && !naive::has_overlap(trs), "{sys}");
        assert!(ortho, "{sys}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let trs = random_system(&mut rng, Shape::ANY);
        assert_eq!(trs.overlaps().is_empty(), !naive::has_overlap(&trs), "\n{}", trs.to_file_string());
    }
}

#[test]
fn defined_symbols_grow_with_rules() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let a = random_system(&mut rng, Shape::ANY);
        let b = random_system(&mut rng, Shape::ANY);
        let rules: Vec<(Term, Term)> = a.rules().iter().map(|r| (r.lhs().clone(), r.rhs().clone())).collect();
        let mut more = rules.clone();
        more.extend(b.rules().iter().map(|r| (r.lhs().clone(), r.rhs().clone())));
        let (Ok(small), Ok(big)) = (
            Trs::new(Default::default(), Default::default(), rules),
            Trs::new(Default::default(), Default::default(), more),
        ) else {
            continue;
        };
        assert!(small.defined_symbols().is_subset(&big.defined_symbols()));
    }
}

#[test]
fn random_linear_systems_descend_randomly() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    for _ in 0..200 {
        let trs = random_system(&mut rng, Shape::LINEAR);
        let t = random_ground_term(&mut rng, &trs, 10);
        if !tame(&trs, &t, 500, 60) {
            continue;
        }
        let g = explore(&trs, &t, 500);
        if !g.is_complete() || !g.is_acyclic() {
            continue;
        }
        assert_sound(&g, &trs);
        let cert = certify_uniform_length(&g, &trs).unwrap();
        assert!(cert.uniform);
        for s in some_strategies() {
            assert_eq!(count_steps(&trs, &t, s, 10_000).unwrap().0, cert.min_length());
        }
        checked += 1;
    }
    assert!(checked > 50);
}

fn unary(n: u64) -> String {
    "s(".repeat(n as usize) + "z" + &")".repeat(n as usize)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unary_pm_lengths_are_uniform(a in 0u64..5, b in 0u64..5) {
        let trs = Builtin::UnaryPm.trs();
        let t = trs.parse_term(&format!("ml({},{})", unary(a), unary(b))).unwrap();
        let cert = certify_uniform_length(&explore(trs, &t, 50_000), trs).unwrap();
        prop_assert!(cert.uniform);
        prop_assert_eq!(Builtin::UnaryPm.decode(&cert.normal_form).unwrap(), a * b);
    }

    #[test]
    fn binary_add_steps_match_across_strategies(a in 1u64..5000, b in 1u64..5000, seed in 0u64..1000) {
        let trs = Builtin::BinaryAdd.trs();
        let t = basic_term(Builtin::BinaryAdd, "add", &[a, b]).unwrap();
        let li = count_steps(trs, &t, Strategy::LeftmostInnermost, DEFAULT_FUEL).unwrap();
        let rnd = count_steps(trs, &t, Strategy::RandomRedex(seed), DEFAULT_FUEL).unwrap();
        prop_assert_eq!(&li, &rnd);
        prop_assert_eq!(Builtin::BinaryAdd.decode(&li.1).unwrap(), a + b);
        prop_assert!(matches!(li.1.node(), Node::App(..)));
    }
}
