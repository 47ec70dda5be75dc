//! Generators and oracles shared by the property suites and the acceptance target.
#![allow(dead_code)]

use pebble_core::dom::{DocumentHost, Position, Selector, VirtualDocument};
use pebble_core::reader::{parse_term, OperatorTable};
use pebble_core::term::{occurs_in, unify, variant, Number, Term, Var};
use pebble_core::tooling::{render_term, WriteOptions};
use pebble_core::{answer_all, consult_sync, Answer, Session};
use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::rc::Rc;

pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

const ATOMS: &[&str] = &[
    "a", "b", "foo", "[]", "{}", "A", "hello world", "don't", "-", "+", "*", ",", "|", "\\", "'", "é", "=..", ";", "!", ".", "mod", "_x", "",
];
const FUNCTORS: &[&str] = &["f", "g", "-", "+", "*", ",", ";", "->", ":-", "=", "\\+", "{}", "[]", ".", "foo bar", "is", "mod", "^", "@", "-->", "?-", "|"];

fn var_leaf(names: &'static [&'static str]) -> impl Strategy<Value = Term> {
    prop::sample::select(names).prop_map(Term::var)
}

fn number_leaf() -> impl Strategy<Value = Term> {
    prop_oneof![
        (-1000i64..1000).prop_map(Term::int),
        any::<i64>().prop_map(Term::int),
        (-1.0e6f64..1.0e6).prop_map(Term::float),
        prop::sample::select(vec![0.0, -0.5, 1.0e-7, 2.5e300, 1.5]).prop_map(Term::float),
        any::<u64>().prop_map(|n| Term::Num(Number::from_big(BigInt::from(n) * BigInt::from(u64::MAX)))),
    ]
}

/// Random terms over a small variable pool, operator-heavy.
pub fn term(vars: &'static [&'static str]) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        3 => var_leaf(vars),
        2 => number_leaf(),
        3 => prop::sample::select(ATOMS).prop_map(Term::atom),
    ];
    leaf.prop_recursive(4, 40, 4, |inner| {
        prop_oneof![
            3 => (prop::sample::select(FUNCTORS), prop::collection::vec(inner.clone(), 1..4)).prop_map(|(f, args)| Term::compound(f, args)),
            1 => prop::collection::vec(inner.clone(), 0..4).prop_map(Term::list),
            1 => (prop::collection::vec(inner.clone(), 1..3), inner).prop_map(|(items, tail)| Term::list_with_tail(items, tail)),
        ]
    })
}

/// Replaces subterms of `t` by pool variables, steered by `bits`.
fn generalize(t: &Term, bits: &[u8], pos: &mut usize, vars: &[&str]) -> Term {
    let b = bits[*pos % bits.len()];
    *pos += 1;
    if b.is_multiple_of(5) {
        return Term::var(vars[(b as usize / 5) % vars.len()]);
    }
    match t {
        Term::Compound(c) if !c.args().is_empty() => {
            let args = c.args().iter().map(|a| generalize(a, bits, pos, vars)).collect();
            Term::compound(c.name(), args)
        }
        other => other.clone(),
    }
}

/// Pairs that share structure often enough to unify.
pub fn unify_pair() -> impl Strategy<Value = (Term, Term)> {
    let related = (term(UNIFY_VARS), prop::collection::vec(any::<u8>(), 1..32), prop::collection::vec(any::<u8>(), 1..32))
        .prop_map(|(t, b1, b2)| (generalize(&t, &b1, &mut 0, UNIFY_VARS), generalize(&t, &b2, &mut 0, UNIFY_VARS)));
    prop_oneof![1 => (term(UNIFY_VARS), term(UNIFY_VARS)), 3 => related]
}

pub const UNIFY_VARS: &[&str] = &["X", "Y", "Z"];
pub const READER_VARS: &[&str] = &["X", "Y", "Z", "W", "_A"];

/// Soundness, symmetry and idempotence of the most general unifier.
pub fn check_unify_pair(a: &Term, b: &Term) -> Result<(), TestCaseError> {
    let ab = unify(a, b, true);
    let ba = unify(b, a, true);
    prop_assert_eq!(ab.is_some(), ba.is_some(), "symmetry: {:?} / {:?}", a, b);
    if let (Some(s1), Some(s2)) = (&ab, &ba) {
        prop_assert!(s1.apply(a) == s1.apply(b), "soundness: {:?} = {:?} under {:?}", a, b, s1);
        prop_assert!(s1.is_idempotent(), "idempotence: {:?}", s1);
        prop_assert!(variant(&s1.apply(a), &s2.apply(a)), "mgu up to renaming: {:?} vs {:?}", s1, s2);
        prop_assert!(unify(a, b, false).is_some(), "occurs check only removes unifiers");
    }
    Ok(())
}

/// `X = g(T, X)` never unifies under the occurs check and always without it.
pub fn check_occurs(t: &Term) -> Result<(), TestCaseError> {
    let x = Term::var("X");
    let cyclic = Term::compound("g", vec![t.clone(), x.clone()]);
    prop_assert!(occurs_in(Var::named("X"), &cyclic));
    prop_assert!(unify(&x, &cyclic, true).is_none(), "occurs check let {:?} through", cyclic);
    prop_assert!(unify(&x, &cyclic, false).is_some());
    Ok(())
}

/// The operator table a fresh session reads with.
pub fn session_ops() -> OperatorTable {
    Session::new(1).ops().clone()
}

/// Quoted rendering parses back to a variant of the original.
pub fn check_round_trip(t: &Term, ops: &OperatorTable) -> Result<(), TestCaseError> {
    let text = render_term(t, &WriteOptions::quoted(), ops);
    let back = parse_term(&format!("{text} ."), ops).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
    prop_assert!(variant(t, &back), "{} read back as {:?}", text, back);
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Arg {
    Var(u8),
    Const(u8),
}

#[derive(Clone, Debug)]
struct Atom {
    pred: usize,
    args: Vec<Arg>,
}

#[derive(Clone, Debug)]
struct Rule {
    head: Atom,
    body: Vec<Atom>,
}

/// A function-free program whose SLD search terminates: `edge/2` is a DAG,
/// `path/2` its right-recursive closure, and every other predicate depends
/// only on predicates defined before it.
#[derive(Clone, Debug)]
pub struct SmallProgram {
    names: Vec<String>,
    arities: Vec<usize>,
    facts: Vec<(usize, Vec<u8>)>,
    rules: Vec<Rule>,
}

const CONSTS: u8 = 5;

impl SmallProgram {
    pub fn generate(seed: u64) -> SmallProgram {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut names = vec!["edge".to_string(), "path".to_string()];
        let mut arities = vec![2, 2];
        let mut facts = Vec::new();
        for i in 0..CONSTS {
            for j in i + 1..CONSTS {
                if rng.gen_bool(0.5) {
                    facts.push((0, vec![i, j]));
                }
            }
        }
        let v = Arg::Var;
        let mut rules = vec![
            Rule { head: Atom { pred: 1, args: vec![v(0), v(1)] }, body: vec![Atom { pred: 0, args: vec![v(0), v(1)] }] },
            Rule {
                head: Atom { pred: 1, args: vec![v(0), v(1)] },
                body: vec![Atom { pred: 0, args: vec![v(0), v(2)] }, Atom { pred: 1, args: vec![v(2), v(1)] }],
            },
        ];
        let extra = rng.gen_range(2..5);
        for p in 0..extra {
            let pred = names.len();
            let arity = rng.gen_range(1..=2);
            names.push(format!("p{p}"));
            arities.push(arity);
            for _ in 0..rng.gen_range(1..4) {
                if rng.gen_bool(0.25) {
                    let tuple = (0..arity).map(|_| rng.gen_range(0..CONSTS)).collect();
                    facts.push((pred, tuple));
                    continue;
                }
                let mut body = Vec::new();
                let mut next_var = 0u8;
                for _ in 0..rng.gen_range(1..3) {
                    let q = rng.gen_range(0..pred);
                    let args = (0..arities[q])
                        .map(|_| {
                            if rng.gen_bool(0.15) {
                                Arg::Const(rng.gen_range(0..CONSTS))
                            } else if next_var > 0 && rng.gen_bool(0.5) {
                                Arg::Var(rng.gen_range(0..next_var))
                            } else {
                                next_var += 1;
                                Arg::Var(next_var - 1)
                            }
                        })
                        .collect();
                    body.push(Atom { pred: q, args });
                }
                let body_vars: Vec<Arg> = body.iter().flat_map(|a| a.args.iter().copied()).filter(|a| matches!(a, Arg::Var(_))).collect();
                let head = (0..arity)
                    .map(|_| match body_vars.choose(&mut rng) {
                        Some(a) if !rng.gen_bool(0.1) => *a,
                        _ => Arg::Const(rng.gen_range(0..CONSTS)),
                    })
                    .collect();
                rules.push(Rule { head: Atom { pred, args: head }, body });
            }
        }
        SmallProgram { names, arities, facts, rules }
    }

    fn atom_text(&self, a: &Atom) -> String {
        let args: Vec<String> = a
            .args
            .iter()
            .map(|x| match x {
                Arg::Var(i) => format!("V{i}"),
                Arg::Const(c) => format!("c{c}"),
            })
            .collect();
        format!("{}({})", self.names[a.pred], args.join(", "))
    }

    pub fn source(&self) -> String {
        let mut out = String::new();
        for (p, name) in self.names.iter().enumerate() {
            out.push_str(&format!(":- dynamic({name}/{}).\n", self.arities[p]));
        }
        for (p, t) in &self.facts {
            let args: Vec<String> = t.iter().map(|c| format!("c{c}")).collect();
            out.push_str(&format!("{}({}).\n", self.names[*p], args.join(", ")));
        }
        for r in &self.rules {
            let body: Vec<String> = r.body.iter().map(|a| self.atom_text(a)).collect();
            out.push_str(&format!("{} :- {}.\n", self.atom_text(&r.head), body.join(", ")));
        }
        out
    }

    /// Least model by naive fixpoint iteration.
    pub fn least_model(&self) -> Vec<BTreeSet<Vec<u8>>> {
        let mut model: Vec<HashSet<Vec<u8>>> = vec![HashSet::new(); self.names.len()];
        for (p, t) in &self.facts {
            model[*p].insert(t.clone());
        }
        loop {
            let mut added = false;
            for r in &self.rules {
                let mut envs: Vec<HashMap<u8, u8>> = vec![HashMap::new()];
                for atom in &r.body {
                    let mut next = Vec::new();
                    for env in &envs {
                        for tuple in &model[atom.pred] {
                            let mut e = env.clone();
                            let ok = atom.args.iter().zip(tuple).all(|(a, &c)| match a {
                                Arg::Const(k) => *k == c,
                                Arg::Var(v) => *e.entry(*v).or_insert(c) == c,
                            });
                            if ok {
                                next.push(e);
                            }
                        }
                    }
                    envs = next;
                }
                for env in envs {
                    let tuple: Vec<u8> = r.head.args.iter().map(|a| match a {
                        Arg::Const(k) => *k,
                        Arg::Var(v) => env[v],
                    }).collect();
                    added |= model[r.head.pred].insert(tuple);
                }
            }
            if !added {
                break;
            }
        }
        model.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    /// Answer sets of `p(A1, ..., An)` for every predicate, by SLD resolution.
    pub fn sld_model(&self) -> Result<Vec<BTreeSet<Vec<u8>>>, String> {
        let s = Session::new(50_000_000);
        consult_sync(&s, &self.source()).map_err(|e| format!("{e:?}"))?;
        let mut out = Vec::new();
        for (p, name) in self.names.iter().enumerate() {
            let vars: Vec<String> = (0..self.arities[p]).map(|i| format!("A{i}")).collect();
            let goal = format!("{name}({})", vars.join(", "));
            let mut set = BTreeSet::new();
            for a in answer_all(&s, &goal) {
                match a {
                    Answer::Success(sub) => {
                        let tuple = vars
                            .iter()
                            .map(|v| {
                                let t = sub.get(&Var::named(v)).ok_or("unbound answer")?;
                                let name = t.as_atom().ok_or("non-constant answer")?;
                                name.as_str()[1..].parse::<u8>().map_err(|_| "unexpected constant")
                            })
                            .collect::<Result<Vec<u8>, _>>()?;
                        set.insert(tuple);
                    }
                    Answer::Failure => {}
                    other => return Err(format!("{goal}: {other:?}")),
                }
            }
            out.push(set);
        }
        Ok(out)
    }
}

/// Compares SLD answers with the least model; returns the program on mismatch.
pub fn check_program(seed: u64) -> Result<(), String> {
    let p = SmallProgram::generate(seed);
    let sld = p.sld_model()?;
    let oracle = p.least_model();
    if sld != oracle {
        return Err(format!("seed {seed}: program\n{}\nSLD {sld:?}\noracle {oracle:?}", p.source()));
    }
    Ok(())
}

const FRAGMENTS: &[&str] = &["<p>x</p>", "<span class=\"c\">y</span><em>z</em>", "text", "<div><p>a</p><p>b</p></div>", ""];
const TAGS: &[&str] = &["div", "p", "span", "em"];

/// One random sequence of `dom` predicate calls as a single goal. Each step
/// is isolated so failures and errors do not stop the sequence.
pub fn dom_sequence(rng: &mut ChaCha8Rng, len: usize) -> String {
    let mut steps = vec!["get_by_tag(body, N0)".to_string()];
    let mut nodes = 1;
    for _ in 0..len {
        let a = rng.gen_range(0..nodes);
        let b = rng.gen_range(0..nodes);
        let step = match rng.gen_range(0..11) {
            0 | 1 => {
                nodes += 1;
                format!("create({}, N{})", TAGS.choose(rng).unwrap(), nodes - 1)
            }
            2 | 3 => format!("append_child(N{a}, N{b})"),
            4 => format!("insert_before(N{a}, N{b})"),
            5 => format!("insert_after(N{a}, N{b})"),
            6 => format!("set_html(N{a}, '{}')", FRAGMENTS.choose(rng).unwrap()),
            7 => {
                nodes += 1;
                format!("once(get_by_tag({}, N{}))", TAGS.choose(rng).unwrap(), nodes - 1)
            }
            8 => {
                nodes += 1;
                format!("once(parent_of(N{a}, N{}))", nodes - 1)
            }
            9 => format!("toggle(N{a})"),
            _ => format!("add_class(N{a}, c)"),
        };
        steps.push(format!("(catch({step}, _, fail) -> true ; true)"));
    }
    steps.join(", ")
}

/// Runs one random sequence, then audits the tree and probes that refused
/// insertions leave it untouched.
pub fn check_dom_sequence(seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let doc = Rc::new(VirtualDocument::from_markup("<html><body><div id=a><p>one</p></div><span class=c>two</span></body></html>"));
    let s = Session::new(1_000_000);
    pebble_core::dom::set_document(&s, doc.clone());
    let goal = dom_sequence(&mut rng, 20);
    match answer_all(&s, &goal).first() {
        Some(Answer::Success(_)) => {}
        other => return Err(format!("seed {seed}: sequence did not complete: {other:?}\n{goal}")),
    }
    doc.audit().map_err(|e| format!("seed {seed}: {e}\n{goal}"))?;
    let mut all = doc.query(Selector::Tag, "html");
    for tag in TAGS.iter().chain(&["body"]) {
        all.extend(doc.query(Selector::Tag, tag));
    }
    for _ in 0..5 {
        let (Some(&x), Some(&y)) = (all.choose(&mut rng), all.choose(&mut rng)) else { break };
        let before = doc.markup();
        let at = *[Position::Append, Position::Before, Position::After].choose(&mut rng).unwrap();
        if !doc.insert(x, y, at) && doc.markup() != before {
            return Err(format!("seed {seed}: refused insertion mutated the tree"));
        }
        doc.audit().map_err(|e| format!("seed {seed}: {e}"))?;
    }
    Ok(())
}
