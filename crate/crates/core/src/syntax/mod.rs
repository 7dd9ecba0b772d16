//! Formula syntax: the AST, parsing and rendering, fragment classification
//! and the variable operators on quantifier-free formulas.
//!
//! Variables are positive indices; `x3` is the index 3.

mod classify;
mod fo2;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::words;

pub use classify::{classify, in_af, index_normalize, is_guarded, FragmentReport};
pub use fo2::{af_to_fo2, fo2_to_af, render_fo2};
pub use parse::parse;

/// Default cap on AST nodes produced by normal-form rewriting.
pub const DEFAULT_NODE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{line}:{col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("{line}:{col}: variable index 0 is not allowed")]
    ZeroVariable { line: usize, col: usize },
    #[error("predicate {name} used with arity {first} and {second}")]
    ArityMismatch {
        name: String,
        first: usize,
        second: usize,
    },
    #[error("{0}")]
    Domain(String),
    #[error("formula exceeds {cap} nodes")]
    Resource { cap: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<usize>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: Vec<usize>) -> Self {
        Atom {
            pred: pred.into(),
            args,
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    /// Conjunction; the empty conjunction is `true`.
    And(Vec<Formula>),
    /// Disjunction; the empty disjunction is `false`.
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(usize, Box<Formula>),
    Exists(usize, Box<Formula>),
}

pub use Formula::*;

impl Formula {
    pub fn atom(pred: impl Into<String>, args: Vec<usize>) -> Self {
        Formula::Atom(Atom::new(pred, args))
    }

    pub fn top() -> Self {
        And(Vec::new())
    }

    pub fn bottom() -> Self {
        Or(Vec::new())
    }

    pub fn not(f: Formula) -> Self {
        Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: usize, f: Formula) -> Self {
        Forall(v, Box::new(f))
    }

    pub fn exists(v: usize, f: Formula) -> Self {
        Exists(v, Box::new(f))
    }

    /// Quantifies `vars` in order, the first being outermost.
    pub fn forall_all(vars: impl IntoIterator<Item = usize>, f: Formula) -> Self {
        let vars: Vec<usize> = vars.into_iter().collect();
        vars.into_iter()
            .rev()
            .fold(f, |acc, v| Formula::forall(v, acc))
    }

    pub fn exists_all(vars: impl IntoIterator<Item = usize>, f: Formula) -> Self {
        let vars: Vec<usize> = vars.into_iter().collect();
        vars.into_iter()
            .rev()
            .fold(f, |acc, v| Formula::exists(v, acc))
    }

    /// Conjunction that collapses singletons.
    pub fn and_all(mut fs: Vec<Formula>) -> Self {
        if fs.len() == 1 {
            fs.pop().expect("one element")
        } else {
            And(fs)
        }
    }

    pub fn or_all(mut fs: Vec<Formula>) -> Self {
        if fs.len() == 1 {
            fs.pop().expect("one element")
        } else {
            Or(fs)
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Atom(_) => true,
            Not(f) => f.is_quantifier_free(),
            And(fs) | Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Implies(a, b) | Iff(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Forall(..) | Exists(..) => false,
        }
    }

    pub fn node_count(&self) -> usize {
        1 + match self {
            Atom(_) => 0,
            Not(f) | Forall(_, f) | Exists(_, f) => f.node_count(),
            And(fs) | Or(fs) => fs.iter().map(Formula::node_count).sum(),
            Implies(a, b) | Iff(a, b) => a.node_count() + b.node_count(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<usize> {
        match self {
            Atom(a) => a.args.iter().copied().collect(),
            Not(f) => f.free_vars(),
            And(fs) | Or(fs) => fs.iter().flat_map(Formula::free_vars).collect(),
            Implies(a, b) | Iff(a, b) => {
                let mut s = a.free_vars();
                s.extend(b.free_vars());
                s
            }
            Forall(v, f) | Exists(v, f) => {
                let mut s = f.free_vars();
                s.remove(v);
                s
            }
        }
    }

    /// Every variable index occurring free or bound.
    pub fn all_vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Atom(a) => out.extend(a.args.iter().copied()),
            Forall(v, _) | Exists(v, _) => {
                out.insert(*v);
            }
            _ => {}
        });
        out
    }

    pub fn max_var(&self) -> usize {
        self.all_vars().into_iter().max().unwrap_or(0)
    }

    /// Predicate names with their arities.
    pub fn signature(&self) -> BTreeMap<String, usize> {
        let mut sig = BTreeMap::new();
        self.visit(&mut |f| {
            if let Atom(a) = f {
                sig.entry(a.pred.clone()).or_insert(a.arity());
            }
        });
        sig
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.visit_ref(&mut |f| {
            if let Atom(a) = f {
                out.push(a);
            }
        });
        out
    }

    fn visit_ref<'a>(&'a self, cb: &mut impl FnMut(&'a Formula)) {
        cb(self);
        match self {
            Atom(_) => {}
            Not(f) | Forall(_, f) | Exists(_, f) => f.visit_ref(cb),
            And(fs) | Or(fs) => fs.iter().for_each(|f| f.visit_ref(cb)),
            Implies(a, b) | Iff(a, b) => {
                a.visit_ref(cb);
                b.visit_ref(cb);
            }
        }
    }

    fn visit(&self, cb: &mut impl FnMut(&Formula)) {
        self.visit_ref(&mut |f| cb(f));
    }

    /// Renames every variable occurrence (free and bound) through `m`.
    pub fn map_vars(&self, m: &impl Fn(usize) -> usize) -> Formula {
        match self {
            Atom(a) => Atom(crate::syntax::Atom {
                pred: a.pred.clone(),
                args: a.args.iter().map(|&x| m(x)).collect(),
            }),
            Not(f) => Formula::not(f.map_vars(m)),
            And(fs) => And(fs.iter().map(|f| f.map_vars(m)).collect()),
            Or(fs) => Or(fs.iter().map(|f| f.map_vars(m)).collect()),
            Implies(a, b) => Formula::implies(a.map_vars(m), b.map_vars(m)),
            Iff(a, b) => Formula::iff(a.map_vars(m), b.map_vars(m)),
            Forall(v, f) => Formula::forall(m(*v), f.map_vars(m)),
            Exists(v, f) => Formula::exists(m(*v), f.map_vars(m)),
        }
    }

    /// Checks that every predicate name is used with a single arity.
    pub fn check_arities(&self) -> Result<(), SyntaxError> {
        let mut sig: BTreeMap<&str, usize> = BTreeMap::new();
        for a in self.atoms() {
            match sig.get(a.pred.as_str()) {
                Some(&n) if n != a.arity() => {
                    return Err(SyntaxError::ArityMismatch {
                        name: a.pred.clone(),
                        first: n,
                        second: a.arity(),
                    })
                }
                _ => {
                    sig.insert(&a.pred, a.arity());
                }
            }
        }
        Ok(())
    }
}

fn require_quantifier_free(chi: &Formula, op: &str) -> Result<(), SyntaxError> {
    if chi.is_quantifier_free() {
        Ok(())
    } else {
        Err(SyntaxError::Domain(format!(
            "{op} needs a quantifier-free formula"
        )))
    }
}

/// `χ^g`: replaces each variable `x_h` by `x_{g(h)}`, so that an atom with
/// argument walk `f` receives the walk `g ∘ f`.
pub fn substitute_walk(chi: &Formula, g: &[usize]) -> Result<Formula, SyntaxError> {
    require_quantifier_free(chi, "substitution")?;
    if !words::is_adjacent(g) {
        return Err(SyntaxError::Domain(format!(
            "walk {} is not adjacent",
            words::format_walk(g)
        )));
    }
    if let Some(&h) = chi.all_vars().iter().find(|&&h| h == 0 || h > g.len()) {
        return Err(SyntaxError::Domain(format!(
            "variable x{h} is outside the domain of walk {}",
            words::format_walk(g)
        )));
    }
    Ok(chi.map_vars(&|h| g[h - 1]))
}

/// `χ⁻¹` for `χ` over `x_1 .. x_n`: maps `x_h` to `x_{n+1-h}`.
pub fn reverse_vars(chi: &Formula, n: usize) -> Result<Formula, SyntaxError> {
    require_quantifier_free(chi, "reversal")?;
    if chi.max_var() > n {
        return Err(SyntaxError::Domain(format!(
            "formula uses variables beyond x{n}"
        )));
    }
    Ok(chi.map_vars(&|h| n + 1 - h))
}

/// `χ̂ = χ ∧ χ⁻¹`.
pub fn hat(chi: &Formula, n: usize) -> Result<Formula, SyntaxError> {
    Ok(And(vec![chi.clone(), reverse_vars(chi, n)?]))
}

/// `η⁺`: increments every variable index.
pub fn shift_up(eta: &Formula) -> Result<Formula, SyntaxError> {
    require_quantifier_free(eta, "shift")?;
    Ok(eta.map_vars(&|h| h + 1))
}

fn prec(f: &Formula) -> u8 {
    match f {
        Iff(..) => 1,
        Implies(..) => 2,
        And(fs) | Or(fs) if fs.len() == 1 => prec(&fs[0]),
        Or(fs) if fs.len() > 1 => 3,
        And(fs) if fs.len() > 1 => 4,
        Forall(..) | Exists(..) => 0,
        _ => 5,
    }
}

fn render_with(f: &Formula, var: &dyn Fn(usize) -> String, out: &mut String) {
    let child = |c: &Formula, parent: u8, out: &mut String| {
        if prec(c) <= parent {
            out.push('(');
            render_with(c, var, out);
            out.push(')');
        } else {
            render_with(c, var, out);
        }
    };
    match f {
        Atom(a) => {
            out.push_str(&a.pred);
            if !a.args.is_empty() {
                out.push('(');
                let args: Vec<String> = a.args.iter().map(|&x| var(x)).collect();
                out.push_str(&args.join(","));
                out.push(')');
            }
        }
        Not(g) => {
            out.push('!');
            child(g, 4, out);
        }
        And(fs) if fs.is_empty() => out.push_str("true"),
        Or(fs) if fs.is_empty() => out.push_str("false"),
        And(fs) | Or(fs) => {
            let (p, op) = if matches!(f, And(_)) {
                (4, " & ")
            } else {
                (3, " | ")
            };
            if fs.len() == 1 {
                child(&fs[0], p, out);
                return;
            }
            for (i, g) in fs.iter().enumerate() {
                if i > 0 {
                    out.push_str(op);
                }
                child(g, p, out);
            }
        }
        Implies(a, b) | Iff(a, b) => {
            let (p, op) = if matches!(f, Implies(..)) {
                (2, " -> ")
            } else {
                (1, " <-> ")
            };
            child(a, p, out);
            out.push_str(op);
            child(b, p, out);
        }
        Forall(v, g) | Exists(v, g) => {
            out.push_str(if matches!(f, Forall(..)) {
                "forall "
            } else {
                "exists "
            });
            out.push_str(&var(*v));
            out.push(' ');
            if prec(g) < 5 && prec(g) > 0 {
                out.push('(');
                render_with(g, var, out);
                out.push(')');
            } else {
                render_with(g, var, out);
            }
        }
    }
}

/// Renders in the concrete grammar accepted by [`parse`].
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    render_with(f, &|x| format!("x{x}"), &mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution() {
        let chi = Formula::atom("p", vec![1, 2]);
        assert_eq!(
            substitute_walk(&chi, &[1, 1]).unwrap(),
            Formula::atom("p", vec![1, 1])
        );
        let chi3 = Formula::atom("p", vec![1, 2, 3]);
        assert_eq!(
            substitute_walk(&chi3, &[2, 3, 3]).unwrap(),
            Formula::atom("p", vec![2, 3, 3])
        );
        let prop = Formula::atom("p", vec![]);
        assert_eq!(substitute_walk(&prop, &[1, 2]).unwrap(), prop);
        assert!(substitute_walk(&chi, &[1, 3]).is_err());
        assert!(substitute_walk(&Formula::forall(1, chi.clone()), &[1, 1]).is_err());
    }

    #[test]
    fn variable_operators() {
        let p = Formula::atom("p", vec![1, 2]);
        assert_eq!(reverse_vars(&p, 2).unwrap(), Formula::atom("p", vec![2, 1]));
        assert_eq!(
            shift_up(&Formula::atom("q", vec![1, 1])).unwrap(),
            Formula::atom("q", vec![2, 2])
        );
        assert_eq!(
            hat(&p, 2).unwrap(),
            And(vec![p.clone(), Formula::atom("p", vec![2, 1])])
        );
    }

    #[test]
    fn render_shapes() {
        let f = Formula::forall(1, Formula::atom("r", vec![1, 1]));
        assert_eq!(render(&f), "forall x1 r(x1,x1)");
        let g = And(vec![
            Formula::exists(1, Formula::atom("p", vec![1])),
            Formula::atom("q", vec![]),
        ]);
        assert_eq!(render(&g), "(exists x1 p(x1)) & q");
        assert_eq!(render(&Formula::top()), "true");
    }
}
