use std::collections::BTreeSet;

use crate::semantics::{evaluate, Elem, Structure};
use crate::syntax::{hat, in_af, index_normalize, substitute_walk, Formula, Formula::*};
use crate::types::{enumerate_types, project_circ, relevant_atoms};
use crate::words;

use super::{SatError, SatOptions};

/// A predicate introduced by a transformation, with the formula it stands for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreshPredicate {
    pub name: String,
    pub arity: usize,
    pub meaning: Formula,
}

/// `⋀_i ∀x̄_ℓ ∃x_{ℓ+1} γ_i ∧ ∀x̄_{ℓ+1} δ` with quantifier-free adjacent
/// `γ_i` and `δ` over `x_1 .. x_{ℓ+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalForm {
    pub ell: usize,
    pub gammas: Vec<Formula>,
    pub delta: Formula,
    pub fresh: Vec<FreshPredicate>,
}

fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        And(fs) => fs.iter().flat_map(conjuncts).collect(),
        _ => vec![f],
    }
}

fn dedup(fs: Vec<Formula>) -> Vec<Formula> {
    let mut seen = BTreeSet::new();
    fs.into_iter().filter(|f| seen.insert(f.clone())).collect()
}

/// Places each `∀x̄_d ∃x_{d+1} γ` at the last variables and conjoins the
/// universal bodies.
fn assemble(
    ell: usize,
    exists: Vec<(usize, Formula)>,
    universals: Vec<Formula>,
    fresh: Vec<FreshPredicate>,
) -> NormalForm {
    let gammas = exists
        .into_iter()
        .map(|(d, g)| {
            if d == ell {
                g
            } else {
                g.map_vars(&|h| h + ell - d)
            }
        })
        .collect();
    let universals: Vec<Formula> = dedup(
        universals
            .into_iter()
            .filter(|u| *u != Formula::top())
            .collect(),
    );
    let delta = match universals.len() {
        0 => Formula::top(),
        1 => universals.into_iter().next().expect("one element"),
        _ => And(universals),
    };
    NormalForm {
        ell,
        gammas: dedup(gammas),
        delta,
        fresh,
    }
}

impl NormalForm {
    pub fn variables(&self) -> usize {
        self.ell + 1
    }

    pub fn to_formula(&self) -> Formula {
        let mut parts: Vec<Formula> = self
            .gammas
            .iter()
            .map(|g| Formula::forall_all(1..=self.ell, Formula::exists(self.ell + 1, g.clone())))
            .collect();
        parts.push(Formula::forall_all(1..=self.ell + 1, self.delta.clone()));
        And(parts)
    }

    /// Reads a sentence that is already a conjunction of `∀x_1..x_d ∃x_{d+1} γ`
    /// and `∀x_1..x_d δ` blocks.
    pub fn recognize(f: &Formula) -> Option<NormalForm> {
        let mut exists = Vec::new();
        let mut universals = Vec::new();
        let mut ell = 2;
        for c in conjuncts(f) {
            let mut d = 0;
            let mut body = c;
            while let Forall(v, g) = body {
                if *v != d + 1 {
                    return None;
                }
                d += 1;
                body = g;
            }
            match body {
                Exists(v, g) if *v == d + 1 && g.is_quantifier_free() && in_af(g, d + 1) => {
                    ell = ell.max(d);
                    exists.push((d, (**g).clone()));
                }
                _ if body.is_quantifier_free() && in_af(body, d) => {
                    ell = ell.max(d.saturating_sub(1));
                    universals.push(body.clone());
                }
                _ => return None,
            }
        }
        Some(assemble(ell, exists, universals, Vec::new()))
    }
}

impl std::fmt::Display for NormalForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

struct FreshNames {
    used: BTreeSet<String>,
    prefix: &'static str,
    next: usize,
}

impl FreshNames {
    fn new(f: &Formula, prefix: &'static str) -> Self {
        FreshNames {
            used: f.signature().into_keys().collect(),
            prefix,
            next: 1,
        }
    }

    fn take(&mut self) -> String {
        loop {
            let name = format!("{}{}", self.prefix, self.next);
            self.next += 1;
            if self.used.insert(name.clone()) {
                return name;
            }
        }
    }
}

struct Normalizer {
    names: FreshNames,
    exists: Vec<(usize, Formula)>,
    universals: Vec<Formula>,
    fresh: Vec<FreshPredicate>,
}

impl Normalizer {
    /// Replaces quantified subformulas, innermost first, by fresh atoms.
    fn replace(&mut self, f: &Formula, d: usize) -> Formula {
        match f {
            Atom(_) => f.clone(),
            Not(g) => Formula::not(self.replace(g, d)),
            And(fs) => And(fs.iter().map(|g| self.replace(g, d)).collect()),
            Or(fs) => Or(fs.iter().map(|g| self.replace(g, d)).collect()),
            Implies(a, b) => Formula::implies(self.replace(a, d), self.replace(b, d)),
            Iff(a, b) => Formula::iff(self.replace(a, d), self.replace(b, d)),
            Forall(_, g) | Exists(_, g) => {
                let body = self.replace(g, d + 1);
                let name = self.names.take();
                let p = Formula::atom(name.clone(), (1..=d).collect());
                let meaning = if matches!(f, Forall(..)) {
                    self.universals
                        .push(Formula::implies(p.clone(), body.clone()));
                    self.exists
                        .push((d, Formula::implies(body.clone(), p.clone())));
                    Formula::forall(d + 1, body)
                } else {
                    self.exists
                        .push((d, Formula::implies(p.clone(), body.clone())));
                    self.universals
                        .push(Formula::implies(body.clone(), p.clone()));
                    Formula::exists(d + 1, body)
                };
                self.fresh.push(FreshPredicate {
                    name,
                    arity: d,
                    meaning,
                });
                p
            }
        }
    }
}

/// An equisatisfiable normal form over at least three variables, with fresh
/// predicates `_nf1, _nf2, ..` for the quantified subformulas.
pub fn normalize(phi: &Formula) -> Result<NormalForm, SatError> {
    if !phi.free_vars().is_empty() {
        return Err(SatError::Domain(
            "normal forms are defined for sentences".into(),
        ));
    }
    let f = if in_af(phi, 0) {
        phi.clone()
    } else {
        let g = index_normalize(phi);
        if !in_af(&g, 0) {
            return Err(SatError::Domain(
                "the sentence is not in the adjacent fragment".into(),
            ));
        }
        g
    };
    if let Some(nf) = NormalForm::recognize(&f) {
        return Ok(nf);
    }
    let mut n = Normalizer {
        names: FreshNames::new(&f, "_nf"),
        exists: Vec::new(),
        universals: Vec::new(),
        fresh: Vec::new(),
    };
    let top = n.replace(&f, 0);
    n.universals.push(top);
    let ell = n
        .exists
        .iter()
        .map(|(d, _)| *d)
        .chain(n.universals.iter().map(|u| u.max_var().saturating_sub(1)))
        .fold(2, usize::max);
    Ok(assemble(ell, n.exists, n.universals, n.fresh))
}

/// `φ^#`, a normal form over `ℓ` variables obtained by identifying
/// universally quantified variables along adjacent maps.
pub fn adjacent_closure(nf: &NormalForm) -> Result<NormalForm, SatError> {
    let ell = nf.ell;
    if ell < 2 {
        return Err(SatError::Domain(
            "the adjacent closure needs at least three variables".into(),
        ));
    }
    let mut exists = Vec::new();
    for gamma in &nf.gammas {
        for k in 1..ell {
            for f in words::end_anchored_walks(ell, k) {
                exists.push((k, substitute_walk(gamma, &words::extend_plus(&f, k))?));
            }
        }
    }
    let mut universals = Vec::new();
    for k in 1..=ell {
        for g in words::adjacent_walks(ell + 1, k) {
            universals.push(substitute_walk(&nf.delta, &g)?);
        }
    }
    Ok(assemble(ell - 1, exists, universals, nf.fresh.clone()))
}

/// `φ' = φ^# ∧ (ζ → p_ζ) ∧ (p_ζ → (ζ ∧ δ̂ ∧ γ_i)°) ∧ (p_ζ → (ζ ∧ δ̂)°)` over
/// the relevant `ℓ`-types `ζ`, with fresh `p_ζ` named `_pz1, _pz2, ..`.
pub fn reduce_step(nf: &NormalForm, opts: &SatOptions) -> Result<NormalForm, SatError> {
    let ell = nf.ell;
    if ell < 3 {
        return Err(SatError::Domain(
            "the reduction step needs at least four variables".into(),
        ));
    }
    let closure = adjacent_closure(nf)?;
    let whole = nf.to_formula();
    let atoms = relevant_atoms(&whole, ell);
    let types = 1usize
        .checked_shl(atoms.len() as u32)
        .filter(|&t| t <= opts.reduction_types);
    if types.is_none() {
        return Err(SatError::Resource {
            stage: format!("reduction types over {} atoms", atoms.len()),
            count: 1usize.checked_shl(atoms.len() as u32).unwrap_or(usize::MAX),
            cap: opts.reduction_types,
        });
    }
    let delta_hat = hat(&nf.delta, ell + 1)?;
    let mut names = FreshNames::new(&whole, "_pz");
    let mut exists: Vec<(usize, Formula)> = closure
        .gammas
        .iter()
        .map(|g| (ell - 1, g.clone()))
        .collect();
    let mut universals = vec![closure.delta.clone()];
    let mut fresh = nf.fresh.clone();
    for zeta in enumerate_types(&atoms, ell, opts.type_cap)? {
        let z = zeta.to_formula();
        let name = names.take();
        let tail = Formula::atom(name.clone(), (2..=ell).collect());
        let head = Formula::atom(name.clone(), (1..ell).collect());
        universals.push(Formula::implies(z.clone(), tail));
        for gamma in &nf.gammas {
            let chi = And(vec![z.clone(), delta_hat.clone(), gamma.clone()]);
            exists.push((
                ell - 1,
                Formula::implies(
                    head.clone(),
                    project_circ(&chi, &atoms, ell, opts.type_cap)?,
                ),
            ));
        }
        let chi = And(vec![z.clone(), delta_hat.clone()]);
        universals.push(Formula::implies(
            head,
            project_circ(&chi, &atoms, ell, opts.type_cap)?,
        ));
        fresh.push(FreshPredicate {
            name,
            arity: ell - 1,
            meaning: z,
        });
    }
    Ok(assemble(ell - 1, exists, universals, fresh))
}

/// Expands a model of `nf` by the predicates `p_ζ` that `reduced` added:
/// `p_ζ` holds of `ā` when `ζ[aā]` holds for some `a`.
pub fn expand_reduction(
    a: &Structure,
    nf: &NormalForm,
    reduced: &NormalForm,
) -> Result<Structure, SatError> {
    let mut out = a.clone();
    let ell = nf.ell;
    let n = a.domain.len();
    for p in &reduced.fresh[nf.fresh.len()..] {
        out.declare(&p.name, p.arity);
        let mut t = vec![0 as Elem; ell];
        loop {
            if evaluate(a, &p.meaning, &t)? {
                out.set(&p.name, t[1..].to_vec(), true);
            }
            let mut pos = 0;
            while pos < ell && t[pos] as usize + 1 == n {
                t[pos] = 0;
                pos += 1;
            }
            if pos == ell {
                break;
            }
            t[pos] += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{classify, parse};

    #[test]
    fn recognizes_normal_forms() {
        let f =
            parse("(forall x1 forall x2 exists x3 r(x2,x3)) & forall x1 forall x2 forall x3 true")
                .unwrap();
        let nf = normalize(&f).unwrap();
        assert_eq!(nf.ell, 2);
        assert_eq!(nf.gammas, vec![parse("r(x2,x3)").unwrap()]);
        assert!(nf.fresh.is_empty());
    }

    #[test]
    fn fresh_predicates() {
        let f = parse("exists x1 forall x2 exists x3 r(x2,x3)").unwrap();
        let nf = normalize(&f).unwrap();
        assert_eq!(nf.ell, 2);
        assert_eq!(nf.fresh.len(), 3);
        assert!(nf.fresh.iter().all(|p| p.name.starts_with("_nf")));
        assert_eq!(classify(&nf.to_formula()).min_k, Some(0));
        let q = normalize(&parse("q").unwrap()).unwrap();
        assert_eq!(q.delta, parse("q").unwrap());
        assert!(normalize(&parse("p(x1)").unwrap()).is_err());
    }

    #[test]
    fn closure_shape() {
        let f =
            parse("(forall x1 forall x2 exists x3 r(x2,x3)) & forall x1 forall x2 forall x3 true")
                .unwrap();
        let c = adjacent_closure(&normalize(&f).unwrap()).unwrap();
        assert_eq!(c.ell, 1);
        // one end-anchored map [1,1] gives γ^{[1,1,2]}
        assert_eq!(c.gammas, vec![parse("r(x1,x2)").unwrap()]);
        assert_eq!(c.delta, Formula::top());
    }
}
