//! Translations between the two-variable fragment and the adjacent fragment.
//!
//! Both directions push each quantifier through a clausal form of its body,
//! treating already-processed quantified subformulas as opaque units, and
//! keep inside the quantifier only the literals mentioning its variable.

use std::collections::{BTreeMap, BTreeSet};

use super::{classify, Formula, Formula::*, SyntaxError, DEFAULT_NODE_CAP};

type Clause = BTreeSet<Formula>;

fn negate(lit: &Formula) -> Formula {
    match lit {
        Not(g) => (**g).clone(),
        other => Formula::not(other.clone()),
    }
}

struct Clausifier {
    cap: usize,
}

impl Clausifier {
    /// Conjunctive normal form of `f` (or of `¬f` when `!pos`), with atoms
    /// and quantified subformulas as literals.
    fn cnf(&self, f: &Formula, pos: bool) -> Result<Vec<Clause>, SyntaxError> {
        let lit = |f: &Formula| {
            let mut c = Clause::new();
            c.insert(if pos {
                f.clone()
            } else {
                Formula::not(f.clone())
            });
            Ok(vec![c])
        };
        match f {
            Atom(_) | Forall(..) | Exists(..) => lit(f),
            Not(g) => self.cnf(g, !pos),
            And(fs) if pos => self.conj(fs.iter().map(|g| self.cnf(g, true))),
            Or(fs) if !pos => self.conj(fs.iter().map(|g| self.cnf(g, false))),
            And(fs) => self.disj(fs.iter().map(|g| self.cnf(g, false))),
            Or(fs) => self.disj(fs.iter().map(|g| self.cnf(g, true))),
            Implies(a, b) if pos => self.disj([self.cnf(a, false), self.cnf(b, true)].into_iter()),
            Implies(a, b) => self.conj([self.cnf(a, true), self.cnf(b, false)].into_iter()),
            Iff(a, b) => {
                // a ↔ b is (¬a ∨ b) ∧ (a ∨ ¬b); ¬(a ↔ b) is (¬a ∨ ¬b) ∧ (a ∨ b).
                let first = self.disj([self.cnf(a, false), self.cnf(b, pos)].into_iter())?;
                let second = self.disj([self.cnf(a, true), self.cnf(b, !pos)].into_iter())?;
                self.conj([Ok(first), Ok(second)].into_iter())
            }
        }
    }

    fn conj(
        &self,
        parts: impl Iterator<Item = Result<Vec<Clause>, SyntaxError>>,
    ) -> Result<Vec<Clause>, SyntaxError> {
        let mut out = Vec::new();
        for p in parts {
            out.extend(p?);
            self.check(&out)?;
        }
        Ok(out)
    }

    fn disj(
        &self,
        parts: impl Iterator<Item = Result<Vec<Clause>, SyntaxError>>,
    ) -> Result<Vec<Clause>, SyntaxError> {
        let mut acc: Vec<Clause> = vec![Clause::new()];
        for p in parts {
            let p = p?;
            let mut next = Vec::with_capacity(acc.len() * p.len());
            for a in &acc {
                for b in &p {
                    let mut c = a.clone();
                    c.extend(b.iter().cloned());
                    if !c.iter().any(|l| c.contains(&negate(l))) {
                        next.push(c);
                    }
                }
            }
            self.check(&next)?;
            acc = next;
        }
        Ok(acc)
    }

    fn check(&self, clauses: &[Clause]) -> Result<(), SyntaxError> {
        let size: usize = clauses.iter().map(|c| c.len() + 1).sum();
        if size > self.cap {
            Err(SyntaxError::Resource { cap: self.cap })
        } else {
            Ok(())
        }
    }

    /// Disjunctive normal form as a list of terms (conjunctions of literals).
    fn dnf(&self, f: &Formula) -> Result<Vec<Clause>, SyntaxError> {
        Ok(self
            .cnf(f, false)?
            .into_iter()
            .map(|c| c.iter().map(negate).collect())
            .collect())
    }

    /// Rebuilds `Q v body` by splitting each clause (universal) or term
    /// (existential) into the literals that mention `v` and those that do
    /// not; the quantifier keeps only the former.
    fn push_inward(
        &self,
        universal: bool,
        v: usize,
        body: &Formula,
    ) -> Result<Formula, SyntaxError> {
        let parts = if universal {
            self.cnf(body, true)?
        } else {
            self.dnf(body)?
        };
        let mut out = Vec::with_capacity(parts.len());
        for part in parts {
            let (inner, outer): (Vec<Formula>, Vec<Formula>) =
                part.into_iter().partition(|l| l.free_vars().contains(&v));
            let mut lits = outer;
            if !inner.is_empty() {
                lits.push(if universal {
                    Formula::forall(v, Formula::or_all(inner))
                } else {
                    Formula::exists(v, Formula::and_all(inner))
                });
            }
            out.push(if universal {
                Formula::or_all(lits)
            } else {
                Formula::and_all(lits)
            });
        }
        Ok(if universal {
            Formula::and_all(out)
        } else {
            Formula::or_all(out)
        })
    }
}

fn map_children(
    f: &Formula,
    rec: &mut impl FnMut(&Formula) -> Result<Formula, SyntaxError>,
) -> Result<Formula, SyntaxError> {
    Ok(match f {
        Atom(_) => f.clone(),
        Not(g) => Formula::not(rec(g)?),
        And(fs) => And(fs.iter().map(&mut *rec).collect::<Result<_, _>>()?),
        Or(fs) => Or(fs.iter().map(&mut *rec).collect::<Result<_, _>>()?),
        Implies(a, b) => Formula::implies(rec(a)?, rec(b)?),
        Iff(a, b) => Formula::iff(rec(a)?, rec(b)?),
        Forall(..) | Exists(..) => unreachable!("quantifiers are handled by the caller"),
    })
}

/// Pushes every quantifier inward, innermost first. On two-variable input the
/// result is properly sequenced: no quantifier on a variable occurs directly
/// in the scope of another quantifier on the same variable. On adjacent input
/// with predicates of arity at most two, every quantified subformula on
/// `x_{n+1}` has only `x_n` free. Vacuous quantifiers disappear on the way.
fn sequence(f: &Formula, cl: &Clausifier) -> Result<Formula, SyntaxError> {
    match f {
        Forall(y, g) | Exists(y, g) => {
            let body = sequence(g, cl)?;
            cl.push_inward(matches!(f, Forall(..)), *y, &body)
        }
        _ => map_children(f, &mut |g| sequence(g, cl)),
    }
}

fn to_af(f: &Formula, env: &BTreeMap<usize, usize>, d: usize) -> Result<Formula, SyntaxError> {
    match f {
        Atom(a) => {
            let args = a
                .args
                .iter()
                .map(|x| {
                    env.get(x)
                        .copied()
                        .ok_or_else(|| SyntaxError::Domain(format!("variable {x} is not in scope")))
                })
                .collect::<Result<_, _>>()?;
            Ok(Formula::atom(a.pred.clone(), args))
        }
        Forall(w, g) | Exists(w, g) => {
            let mut inner = BTreeMap::new();
            for z in g.free_vars() {
                if z == *w {
                    continue;
                }
                match env.get(&z) {
                    Some(&i) if i == d => {
                        inner.insert(z, d);
                    }
                    _ => {
                        return Err(SyntaxError::Domain(
                            "free variables cannot be placed adjacently".into(),
                        ))
                    }
                }
            }
            inner.insert(*w, d + 1);
            let body = to_af(g, &inner, d + 1)?;
            Ok(if matches!(f, Forall(..)) {
                Formula::forall(d + 1, body)
            } else {
                Formula::exists(d + 1, body)
            })
        }
        _ => map_children(f, &mut |g| to_af(g, env, d)),
    }
}

/// Translates a two-variable formula into an equivalent adjacent formula.
/// Free variables are placed at `x_1` (and `x_2`).
pub fn fo2_to_af(f: &Formula) -> Result<Formula, SyntaxError> {
    let vars = f.all_vars();
    if vars.len() > 2 {
        return Err(SyntaxError::Domain(format!(
            "expected at most two variables, found {}",
            vars.len()
        )));
    }
    let cl = Clausifier {
        cap: DEFAULT_NODE_CAP,
    };
    let seq = sequence(f, &cl)?;
    let free: Vec<usize> = f.free_vars().into_iter().collect();
    let orders: Vec<Vec<usize>> = match free.len() {
        0 | 1 => vec![free.clone()],
        _ => vec![free.clone(), free.iter().rev().copied().collect()],
    };
    let mut last = None;
    for order in orders {
        let env: BTreeMap<usize, usize> =
            order.iter().enumerate().map(|(i, &z)| (z, i + 1)).collect();
        match to_af(&seq, &env, order.len()) {
            Ok(g) => return Ok(g),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one placement tried"))
}

/// Translates an adjacent formula with predicates of arity at most two into
/// an equivalent formula over the variables `x1`, `x2` (rendered `u`, `v`).
pub fn af_to_fo2(f: &Formula) -> Result<Formula, SyntaxError> {
    if let Some(a) = f.atoms().into_iter().find(|a| a.arity() > 2) {
        return Err(SyntaxError::Domain(format!(
            "predicate {} has arity {} > 2",
            a.pred,
            a.arity()
        )));
    }
    let report = classify(f);
    if report.min_k.is_none() {
        return Err(SyntaxError::Domain("formula is not adjacent".into()));
    }
    let g = if report.renamed {
        super::index_normalize(f)
    } else {
        f.clone()
    };
    let free = g.free_vars();
    let parity: BTreeSet<usize> = free.iter().map(|x| x % 2).collect();
    if parity.len() < free.len() {
        return Err(SyntaxError::Domain(
            "free variables do not fit into two variable names".into(),
        ));
    }
    let cl = Clausifier {
        cap: DEFAULT_NODE_CAP,
    };
    let sep = sequence(&g, &cl)?;
    Ok(sep.map_vars(&|x| if x % 2 == 1 { 1 } else { 2 }))
}

/// Renders with `u` for `x1` and `v` for `x2`.
pub fn render_fo2(f: &Formula) -> String {
    let mut out = String::new();
    super::render_with(
        f,
        &|x| match x {
            1 => "u".into(),
            2 => "v".into(),
            n => format!("x{n}"),
        },
        &mut out,
    );
    out
}

#[cfg(test)]
mod tests {
    use super::super::{classify, parse};
    use super::*;

    #[test]
    fn already_sequenced() {
        let f = parse("forall u forall v r(u,v)").unwrap();
        assert_eq!(render_fo2(&f), "forall u forall v r(u,v)");
        let g = fo2_to_af(&f).unwrap();
        assert_eq!(g, parse("forall x1 forall x2 r(x1,x2)").unwrap());
    }

    #[test]
    fn requantified_example() {
        let f = parse("forall u exists v (r(u,v) & exists u r(v,u))").unwrap();
        let g = fo2_to_af(&f).unwrap();
        let r = classify(&g);
        assert_eq!(r.min_k, Some(0));
        assert!(!r.renamed);
        assert_eq!(r.var_count, 3);
    }

    #[test]
    fn reversed_atom() {
        let f = parse("forall u exists v r(v,u)").unwrap();
        assert_eq!(
            fo2_to_af(&f).unwrap(),
            parse("forall x1 exists x2 r(x2,x1)").unwrap()
        );
    }

    #[test]
    fn back_to_two_variables() {
        let f = parse("forall x1 forall x2 (r(x1,x2) -> forall x3 s(x2,x3))").unwrap();
        let g = af_to_fo2(&f).unwrap();
        assert!(g.all_vars().len() <= 2);
        let unary = parse("forall x1 r(x1,x1)").unwrap();
        assert_eq!(af_to_fo2(&unary).unwrap(), unary);
        let vac = parse("forall x1 forall x2 forall x3 (r(x2,x3) -> s(x3))").unwrap();
        assert!(af_to_fo2(&vac).unwrap().all_vars().len() <= 2);
        assert!(af_to_fo2(&parse("forall x1 p(x1,x1,x1)").unwrap()).is_err());
    }

    #[test]
    fn too_many_variables() {
        assert!(fo2_to_af(&parse("forall x1 forall x2 forall x3 p(x1,x2,x3)").unwrap()).is_err());
    }
}
