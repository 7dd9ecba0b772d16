use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{Atom, Formula, Formula::*};
use crate::words;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FragmentReport {
    /// Least `k` with the formula in `AF^[k]`; `None` when not adjacent.
    pub min_k: Option<usize>,
    pub var_count: usize,
    pub adjacent: bool,
    /// Membership only holds after bound variables are re-indexed.
    pub renamed: bool,
    pub fluted: bool,
    pub ordered: bool,
    pub forward: bool,
    pub two_variable: bool,
    pub guarded: bool,
    pub guarded_adjacent: bool,
}

/// Membership in `AF^[k]`: atoms are adjacent over `x_1 .. x_k` and a
/// quantifier at level `k` binds `x_{k+1}`.
pub fn in_af(f: &Formula, k: usize) -> bool {
    match f {
        Atom(a) => a.args.iter().all(|&x| x >= 1 && x <= k) && words::is_adjacent(&a.args),
        Not(g) => in_af(g, k),
        And(fs) | Or(fs) => fs.iter().all(|g| in_af(g, k)),
        Implies(a, b) | Iff(a, b) => in_af(a, k) && in_af(b, k),
        Forall(v, g) | Exists(v, g) => *v == k + 1 && in_af(g, k + 1),
    }
}

fn min_k(f: &Formula) -> Option<usize> {
    (0..=f.max_var()).find(|&k| in_af(f, k))
}

/// Re-indexes bound variables so that a quantifier at level `d` binds
/// `x_{d+1}`, where the top level is the largest free index.
pub fn index_normalize(f: &Formula) -> Formula {
    fn go(f: &Formula, d: usize, env: &BTreeMap<usize, usize>) -> Formula {
        match f {
            Atom(a) => Atom(super::Atom {
                pred: a.pred.clone(),
                args: a.args.iter().map(|x| *env.get(x).unwrap_or(x)).collect(),
            }),
            Not(g) => Formula::not(go(g, d, env)),
            And(fs) => And(fs.iter().map(|g| go(g, d, env)).collect()),
            Or(fs) => Or(fs.iter().map(|g| go(g, d, env)).collect()),
            Implies(a, b) => Formula::implies(go(a, d, env), go(b, d, env)),
            Iff(a, b) => Formula::iff(go(a, d, env), go(b, d, env)),
            Forall(v, g) | Exists(v, g) => {
                let mut env = env.clone();
                env.insert(*v, d + 1);
                let body = go(g, d + 1, &env);
                if matches!(f, Forall(..)) {
                    Formula::forall(d + 1, body)
                } else {
                    Formula::exists(d + 1, body)
                }
            }
        }
    }
    let top = f.free_vars().into_iter().max().unwrap_or(0);
    go(f, top, &BTreeMap::new())
}

/// Checks every atom against a shape predicate given the level it occurs at.
fn atoms_at_level(f: &Formula, k: usize, ok: &impl Fn(&Atom, usize) -> bool) -> bool {
    match f {
        Atom(a) => ok(a, k),
        Not(g) => atoms_at_level(g, k, ok),
        And(fs) | Or(fs) => fs.iter().all(|g| atoms_at_level(g, k, ok)),
        Implies(a, b) | Iff(a, b) => atoms_at_level(a, k, ok) && atoms_at_level(b, k, ok),
        Forall(_, g) | Exists(_, g) => atoms_at_level(g, k + 1, ok),
    }
}

fn is_suffix(a: &Atom, k: usize) -> bool {
    let m = a.arity();
    m <= k && a.args.iter().enumerate().all(|(i, &x)| x == k - m + 1 + i)
}

fn is_prefix(a: &Atom, _k: usize) -> bool {
    a.args.iter().enumerate().all(|(i, &x)| x == i + 1)
}

fn is_infix(a: &Atom, k: usize) -> bool {
    match a.args.first() {
        None => true,
        Some(&s) => a
            .args
            .iter()
            .enumerate()
            .all(|(i, &x)| x == s + i && x <= k),
    }
}

fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        And(fs) => fs.iter().flat_map(conjuncts).collect(),
        _ => vec![f],
    }
}

/// Guarded-fragment membership: quantifier blocks take the shapes
/// `∀x̄(α ∧ .. → ψ)` and `∃x̄(α ∧ ..)`, where the guard atom `α` contains the
/// block variables and every free variable of the rest of the body.
pub fn is_guarded(f: &Formula) -> bool {
    match f {
        Atom(_) => true,
        Not(g) => is_guarded(g),
        And(fs) | Or(fs) => fs.iter().all(is_guarded),
        Implies(a, b) | Iff(a, b) => is_guarded(a) && is_guarded(b),
        Forall(..) | Exists(..) => {
            let universal = matches!(f, Forall(..));
            let mut block = BTreeSet::new();
            let mut body = f;
            loop {
                match body {
                    Forall(v, g) if universal => {
                        block.insert(*v);
                        body = g;
                    }
                    Exists(v, g) if !universal => {
                        block.insert(*v);
                        body = g;
                    }
                    _ => break,
                }
            }
            let (premises, rest): (Vec<&Formula>, Vec<&Formula>) = match (universal, body) {
                (true, Implies(a, b)) => (conjuncts(a), vec![b.as_ref()]),
                (false, _) => (conjuncts(body), Vec::new()),
                _ => return false,
            };
            premises.iter().enumerate().any(|(i, g)| {
                let Atom(alpha) = g else { return false };
                let guard: BTreeSet<usize> = alpha.args.iter().copied().collect();
                let others = premises
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, h)| *h)
                    .chain(rest.iter().copied());
                let mut need = block.clone();
                let mut all_guarded = true;
                for h in others {
                    need.extend(h.free_vars());
                    all_guarded &= is_guarded(h);
                }
                all_guarded && need.is_subset(&guard)
            })
        }
    }
}

pub fn classify(f: &Formula) -> FragmentReport {
    let g = index_normalize(f);
    let (shape, k, renamed) = match (min_k(f), min_k(&g)) {
        (Some(d), Some(r)) if r < d => (g, Some(r), true),
        (Some(d), _) => (f.clone(), Some(d), false),
        (None, r) => (g, r, r.is_some()),
    };
    let adjacent = k.is_some();
    let level = k.unwrap_or(0);
    let shaped = |p: fn(&Atom, usize) -> bool| adjacent && atoms_at_level(&shape, level, &p);
    let guarded = is_guarded(f);
    let var_count = shape.all_vars().len();
    FragmentReport {
        min_k: k,
        var_count,
        adjacent,
        renamed,
        fluted: shaped(is_suffix),
        ordered: shaped(is_prefix),
        forward: shaped(is_infix),
        two_variable: f.all_vars().len() <= 2,
        guarded,
        guarded_adjacent: guarded && adjacent,
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    const EQ1: &str = "forall x1 forall x2 forall x3 exists x4 forall x5 \
        (p(x1,x2,x3,x2,x3,x4,x5) -> p(x1,x2,x3,x4,x3,x4,x5))";

    #[test]
    fn eq1_is_adjacent() {
        let r = classify(&parse(EQ1).unwrap());
        assert!(r.adjacent);
        assert_eq!(r.min_k, Some(0));
        assert_eq!(r.var_count, 5);
        assert!(!r.renamed);
    }

    #[test]
    fn symmetry_and_transitivity() {
        let sym = classify(&parse("forall x1 forall x2 (r(x1,x2) -> r(x2,x1))").unwrap());
        assert!(sym.adjacent && !sym.fluted);
        let tr = classify(
            &parse("forall x1 forall x2 (r(x1,x2) -> forall x3 (r(x2,x3) -> r(x1,x3)))").unwrap(),
        );
        assert!(!tr.adjacent);
        assert_eq!(tr.min_k, None);
    }

    #[test]
    fn requantification_is_renamed() {
        let r = classify(&parse("forall x1 exists x1 p(x1)").unwrap());
        assert!(r.adjacent && r.renamed);
        assert_eq!(r.min_k, Some(0));
    }

    #[test]
    fn fluted_ordered_forward() {
        let fl = classify(&parse("forall x1 forall x2 (q(x2) -> r(x1,x2))").unwrap());
        assert!(fl.fluted && !fl.ordered && fl.forward);
        let or = classify(&parse("forall x1 forall x2 (q(x1) -> r(x1,x2))").unwrap());
        assert!(or.ordered && !or.fluted && or.forward);
        let qf = classify(&parse("p(x2,x3)").unwrap());
        assert_eq!(qf.min_k, Some(3));
        assert!(qf.forward && qf.fluted && !qf.ordered);
    }

    #[test]
    fn guards() {
        assert!(is_guarded(
            &parse("forall x1 forall x2 (r(x1,x2) -> s(x2,x1))").unwrap()
        ));
        assert!(is_guarded(
            &parse("exists x1 exists x2 (v(x1,x2) & r(x1,x2))").unwrap()
        ));
        assert!(!is_guarded(
            &parse("forall x1 forall x2 (s(x1) -> r(x1,x2))").unwrap()
        ));
        assert!(!is_guarded(&parse("forall x1 p(x1)").unwrap()));
        let r = classify(
            &parse("forall x1 forall x2 (r(x1,x2) -> exists x3 (r(x2,x3) & p(x3)))").unwrap(),
        );
        assert!(r.guarded && r.adjacent && r.guarded_adjacent);
    }
}
