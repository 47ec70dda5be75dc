use super::{Term, Var};
use rustc_hash::FxHashMap;
use std::cmp::Ordering;

fn rank(t: &Term) -> u8 {
    match t {
        Term::Var(_) => 0,
        Term::Num(_) => 1,
        Term::Compound(c) if c.arity() == 0 => 3,
        Term::Compound(_) => 4,
        Term::Host(_) => 5,
    }
}

fn compare_vars(a: &Var, b: &Var) -> Ordering {
    match (a, b) {
        (Var::Named(x), Var::Named(y)) => x.cmp(y),
        _ => a.age().cmp(&b.age()),
    }
}

/// Standard order of terms: Var < Number < Atom < Compound < host values.
/// Compounds order by arity, then name, then arguments left to right.
pub fn compare_terms(a: &Term, b: &Term) -> Ordering {
    let mut stack: Vec<(&Term, &Term)> = vec![(a, b)];
    while let Some((x, y)) = stack.pop() {
        let ord = match (x, y) {
            (Term::Var(v), Term::Var(w)) => compare_vars(v, w),
            (Term::Num(m), Term::Num(n)) => m.standard_order(n),
            (Term::Compound(f), Term::Compound(g)) => {
                if f.same_node(g) {
                    Ordering::Equal
                } else {
                    let o = f.arity().cmp(&g.arity()).then_with(|| f.name().cmp(&g.name()));
                    if o == Ordering::Equal {
                        stack.extend(f.args().iter().zip(g.args()).rev());
                    }
                    o
                }
            }
            (Term::Host(h), Term::Host(k)) => h.identity().cmp(&k.identity()),
            _ => rank(x).cmp(&rank(y)),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

/// True if `a` and `b` are equal up to a consistent renaming of variables.
pub fn variant(a: &Term, b: &Term) -> bool {
    let mut fwd: FxHashMap<Var, Var> = FxHashMap::default();
    let mut back: FxHashMap<Var, Var> = FxHashMap::default();
    let mut stack = vec![(a, b)];
    while let Some((x, y)) = stack.pop() {
        match (x, y) {
            (Term::Var(v), Term::Var(w)) => {
                if *fwd.entry(*v).or_insert(*w) != *w || *back.entry(*w).or_insert(*v) != *v {
                    return false;
                }
            }
            (Term::Compound(f), Term::Compound(g)) => {
                if f.name() != g.name() || f.arity() != g.arity() {
                    return false;
                }
                stack.extend(f.args().iter().zip(g.args()));
            }
            (Term::Num(m), Term::Num(n)) => {
                if !m.identical(n) {
                    return false;
                }
            }
            (Term::Host(h), Term::Host(k)) => {
                if !h.same_as(k) {
                    return false;
                }
            }
            _ => return false,
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_order_classes() {
        let v = Term::var("X");
        let n = Term::int(3);
        let a = Term::atom("a");
        let c = Term::compound("f", vec![Term::atom("a")]);
        assert_eq!(compare_terms(&v, &n), Ordering::Less);
        assert_eq!(compare_terms(&n, &a), Ordering::Less);
        assert_eq!(compare_terms(&a, &c), Ordering::Less);
    }

    #[test]
    fn compound_order_is_arity_name_args() {
        let f2 = Term::compound("a", vec![Term::int(1), Term::int(2)]);
        let g1 = Term::compound("z", vec![Term::int(1)]);
        assert_eq!(compare_terms(&g1, &f2), Ordering::Less);
        let f3 = Term::compound("a", vec![Term::int(1), Term::int(3)]);
        assert_eq!(compare_terms(&f2, &f3), Ordering::Less);
    }

    #[test]
    fn variants() {
        let a = Term::compound("f", vec![Term::var("X"), Term::var("Y"), Term::var("X")]);
        let b = Term::compound("f", vec![Term::var("A"), Term::var("B"), Term::var("A")]);
        let c = Term::compound("f", vec![Term::var("A"), Term::var("A"), Term::var("A")]);
        assert!(variant(&a, &b));
        assert!(!variant(&a, &c));
    }
}
