//! Adjacent types over finite atom sets, propositional consistency, the
//! projection `χ°`, connector-types, compatibility and coherence.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::{json, Value};
use thiserror::Error;

use crate::sat::NormalForm;
use crate::semantics::{Elem, Interpretation, SemanticsError, Structure};
use crate::syntax::{self, Atom, Formula, Formula::*};
use crate::words;

/// `p(x̄_k^f)`: a predicate with an adjacent index word.
pub type AtomKey = Atom;

pub const DEFAULT_TYPE_CAP: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("{what}: {count} atoms exceed the cap of {cap}")]
    Resource {
        what: String,
        count: usize,
        cap: usize,
    },
    #[error("{0}")]
    Domain(String),
    #[error("atom {0} is not declared by the type")]
    Undeclared(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// A total truth assignment to a finite set of adjacent `k`-atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AdjacentType {
    pub k: usize,
    pub truth: BTreeMap<Atom, bool>,
}

impl AdjacentType {
    pub fn get(&self, a: &Atom) -> Option<bool> {
        self.truth.get(a).copied()
    }

    /// The conjunction of the literals.
    pub fn to_formula(&self) -> Formula {
        And(self
            .truth
            .iter()
            .map(|(a, &v)| {
                let f = Atom(a.clone());
                if v {
                    f
                } else {
                    Formula::not(f)
                }
            })
            .collect())
    }

    pub fn literals(&self) -> Vec<String> {
        self.truth
            .iter()
            .map(|(a, &v)| {
                let s = syntax::render(&Atom(a.clone()));
                if v {
                    s
                } else {
                    format!("!{s}")
                }
            })
            .collect()
    }

    fn map_args(&self, k: usize, m: impl Fn(usize) -> usize) -> AdjacentType {
        AdjacentType {
            k,
            truth: self
                .truth
                .iter()
                .map(|(a, &v)| {
                    (
                        Atom::new(a.pred.clone(), a.args.iter().map(|&h| m(h)).collect()),
                        v,
                    )
                })
                .collect(),
        }
    }

    /// `ζ⁻¹`: `x_h ↦ x_{k+1-h}`.
    pub fn inverse(&self) -> AdjacentType {
        let k = self.k;
        self.map_args(k, |h| k + 1 - h)
    }

    /// `η⁺`: `x_h ↦ x_{h+1}`, as a `(k+1)`-formula.
    pub fn shifted(&self) -> AdjacentType {
        self.map_args(self.k + 1, |h| h + 1)
    }

    /// The literals whose atoms satisfy `keep`.
    pub fn restrict(&self, keep: impl Fn(&Atom) -> bool) -> AdjacentType {
        AdjacentType {
            k: self.k,
            truth: self
                .truth
                .iter()
                .filter(|(a, _)| keep(a))
                .map(|(a, &v)| (a.clone(), v))
                .collect(),
        }
    }

    /// Every literal of `other` is a literal of `self`.
    pub fn entails(&self, other: &AdjacentType) -> bool {
        other
            .truth
            .iter()
            .all(|(a, v)| self.truth.get(a) == Some(v))
    }

    /// The 1-type on `x_1`: the literals whose atoms mention only `x_1`.
    pub fn one_type(&self) -> AdjacentType {
        AdjacentType {
            k: 1,
            ..self.restrict(|a| a.args.iter().all(|&h| h == 1))
        }
    }

    /// Evaluates a quantifier-free formula all of whose atoms are declared.
    pub fn eval(&self, f: &Formula) -> Result<bool, TypeError> {
        Ok(match f {
            Atom(a) => self
                .get(a)
                .ok_or_else(|| TypeError::Undeclared(syntax::render(f)))?,
            Not(g) => !self.eval(g)?,
            And(fs) => {
                for g in fs {
                    if !self.eval(g)? {
                        return Ok(false);
                    }
                }
                true
            }
            Or(fs) => {
                for g in fs {
                    if self.eval(g)? {
                        return Ok(true);
                    }
                }
                false
            }
            Implies(a, b) => !self.eval(a)? || self.eval(b)?,
            Iff(a, b) => self.eval(a)? == self.eval(b)?,
            Forall(..) | Exists(..) => {
                return Err(TypeError::Domain(
                    "types evaluate quantifier-free formulas".into(),
                ))
            }
        })
    }
}

impl std::fmt::Display for AdjacentType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.truth.is_empty() {
            return write!(f, "true");
        }
        write!(f, "{}", self.literals().join(" & "))
    }
}

/// Substitution instances `p(x̄_k^{g∘h})` of the atoms `p(x̄^h)` of `f`,
/// for adjacent `g` into `[1, k]`.
pub fn relevant_atoms(f: &Formula, k: usize) -> BTreeSet<Atom> {
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    for a in f.atoms() {
        let base = a.args.iter().min().copied().unwrap_or(1);
        let h: Vec<usize> = a.args.iter().map(|&x| x + 1 - base).collect();
        if !seen.insert((a.pred.clone(), h.clone())) {
            continue;
        }
        let n = h.iter().max().copied().unwrap_or(0);
        if n == 0 {
            out.insert(Atom::new(a.pred.clone(), Vec::new()));
            continue;
        }
        for g in words::adjacent_walks(n, k) {
            out.insert(Atom::new(a.pred.clone(), words::compose(&g, &h)));
        }
    }
    out
}

/// All assignments to `atoms` in binary-counter order, the first atom being
/// the least significant bit.
pub fn enumerate_types(
    atoms: &BTreeSet<Atom>,
    k: usize,
    cap: usize,
) -> Result<impl Iterator<Item = AdjacentType>, TypeError> {
    if atoms.len() > cap {
        return Err(TypeError::Resource {
            what: "type enumeration".into(),
            count: atoms.len(),
            cap,
        });
    }
    let atoms: Vec<Atom> = atoms.iter().cloned().collect();
    Ok((0u64..1u64 << atoms.len()).map(move |code| AdjacentType {
        k,
        truth: atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), code >> i & 1 == 1))
            .collect(),
    }))
}

/// A quantifier-free formula over numbered propositional variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Prop {
    Var(usize),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

/// Numbering of atoms as propositional variables.
#[derive(Debug, Clone, Default)]
pub struct AtomTable {
    atoms: Vec<Atom>,
    index: HashMap<Atom, usize>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn id(&mut self, a: &Atom) -> usize {
        if let Some(&i) = self.index.get(a) {
            return i;
        }
        self.atoms.push(a.clone());
        self.index.insert(a.clone(), self.atoms.len() - 1);
        self.atoms.len() - 1
    }

    pub fn get(&self, a: &Atom) -> Option<usize> {
        self.index.get(a).copied()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }
}

impl Prop {
    pub fn compile(f: &Formula, table: &mut AtomTable) -> Result<Prop, TypeError> {
        Ok(match f {
            Atom(a) => Prop::Var(table.id(a)),
            Not(g) => Prop::Not(Box::new(Prop::compile(g, table)?)),
            And(fs) => Prop::And(
                fs.iter()
                    .map(|g| Prop::compile(g, table))
                    .collect::<Result<_, _>>()?,
            ),
            Or(fs) => Prop::Or(
                fs.iter()
                    .map(|g| Prop::compile(g, table))
                    .collect::<Result<_, _>>()?,
            ),
            Implies(a, b) => Prop::Or(vec![
                Prop::Not(Box::new(Prop::compile(a, table)?)),
                Prop::compile(b, table)?,
            ]),
            Iff(a, b) => {
                let (a, b) = (Prop::compile(a, table)?, Prop::compile(b, table)?);
                Prop::And(vec![
                    Prop::Or(vec![Prop::Not(Box::new(a.clone())), b.clone()]),
                    Prop::Or(vec![a, Prop::Not(Box::new(b))]),
                ])
            }
            Forall(..) | Exists(..) => {
                return Err(TypeError::Domain(
                    "consistency is defined for quantifier-free formulas".into(),
                ))
            }
        })
    }

    /// Three-valued evaluation under a partial assignment.
    pub fn eval3(&self, assign: &[Option<bool>]) -> Option<bool> {
        match self {
            Prop::Var(i) => assign.get(*i).copied().flatten(),
            Prop::Not(p) => p.eval3(assign).map(|v| !v),
            Prop::And(ps) => {
                let mut unknown = false;
                for p in ps {
                    match p.eval3(assign) {
                        Some(false) => return Some(false),
                        None => unknown = true,
                        Some(true) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(true)
                }
            }
            Prop::Or(ps) => {
                let mut unknown = false;
                for p in ps {
                    match p.eval3(assign) {
                        Some(true) => return Some(true),
                        None => unknown = true,
                        Some(false) => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(false)
                }
            }
        }
    }

    /// An unassigned variable on which the value currently depends.
    fn branch_var(&self, assign: &[Option<bool>]) -> Option<usize> {
        match self {
            Prop::Var(i) => assign.get(*i).copied().flatten().is_none().then_some(*i),
            Prop::Not(p) => p.branch_var(assign),
            Prop::And(ps) | Prop::Or(ps) => ps
                .iter()
                .filter(|p| p.eval3(assign).is_none())
                .find_map(|p| p.branch_var(assign)),
        }
    }

    /// Extends `assign` to make the formula true, if possible. Variables the
    /// formula does not depend on stay unassigned.
    pub fn solve(&self, assign: &mut Vec<Option<bool>>) -> bool {
        match self.eval3(assign) {
            Some(v) => v,
            None => {
                let x = self
                    .branch_var(assign)
                    .expect("undetermined formula has a free variable");
                if assign.len() <= x {
                    assign.resize(x + 1, None);
                }
                for v in [true, false] {
                    assign[x] = Some(v);
                    if self.solve(assign) {
                        return true;
                    }
                }
                assign[x] = None;
                false
            }
        }
    }
}

/// Propositional satisfiability, each atom an independent variable.
pub fn consistent(chi: &Formula) -> Result<bool, TypeError> {
    let mut table = AtomTable::new();
    let p = Prop::compile(chi, &mut table)?;
    let mut assign = vec![None; table.len()];
    Ok(p.solve(&mut assign))
}

/// A satisfying assignment of `chi` extending `fixed`, over the atoms of both.
pub fn solve_with(
    chi: &Formula,
    fixed: &BTreeMap<Atom, bool>,
) -> Result<Option<BTreeMap<Atom, bool>>, TypeError> {
    let mut table = AtomTable::new();
    let p = Prop::compile(chi, &mut table)?;
    let mut assign = vec![None; table.len()];
    for (a, &v) in fixed {
        let i = table.id(a);
        if assign.len() <= i {
            assign.resize(i + 1, None);
        }
        assign[i] = Some(v);
    }
    if !p.solve(&mut assign) {
        return Ok(None);
    }
    Ok(Some(
        table
            .atoms()
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), assign.get(i).copied().flatten().unwrap_or(false)))
            .collect(),
    ))
}

/// `χ° = ⋁ { η : χ ∧ η⁺ consistent }` over the `ℓ`-types on `atoms`.
pub fn project_circ(
    chi: &Formula,
    atoms: &BTreeSet<Atom>,
    ell: usize,
    cap: usize,
) -> Result<Formula, TypeError> {
    if !chi.is_quantifier_free() {
        return Err(TypeError::Domain(
            "projection needs a quantifier-free formula".into(),
        ));
    }
    if chi.max_var() > ell + 1 {
        return Err(TypeError::Domain(format!(
            "formula uses variables beyond x{}",
            ell + 1
        )));
    }
    let mut table = AtomTable::new();
    let p = Prop::compile(chi, &mut table)?;
    let mut out = Vec::new();
    for eta in enumerate_types(atoms, ell, cap)? {
        let mut assign = vec![None; table.len()];
        let mut clash = false;
        for (a, &v) in &eta.shifted().truth {
            let i = table.id(a);
            if assign.len() <= i {
                assign.resize(i + 1, None);
            }
            clash |= assign[i].is_some_and(|w| w != v);
            assign[i] = Some(v);
        }
        if !clash && p.solve(&mut assign) {
            out.push(eta.to_formula());
        }
    }
    Ok(Or(out))
}

/// The type of `ā` in `A` over the given atoms.
pub fn type_of(
    a: &Structure,
    tuple: &[Elem],
    atoms: &BTreeSet<Atom>,
) -> Result<AdjacentType, TypeError> {
    let mut truth = BTreeMap::new();
    for atom in atoms {
        let t =
            words::apply_walk(tuple, &atom.args).map_err(|e| TypeError::Domain(e.to_string()))?;
        let v = match a.holds(&atom.pred, &t) {
            Ok(v) => v,
            Err(SemanticsError::Uninterpreted(_)) => false,
            Err(e) => return Err(e.into()),
        };
        truth.insert(atom.clone(), v);
    }
    Ok(AdjacentType {
        k: tuple.len(),
        truth,
    })
}

/// `π²`: the 2-type of a pair `aa` with `tp[a] = π`, over `atoms`.
pub fn one_type_squared(
    pi: &AdjacentType,
    atoms: &BTreeSet<Atom>,
) -> Result<AdjacentType, TypeError> {
    let mut truth = BTreeMap::new();
    for a in atoms {
        let diag = Atom::new(a.pred.clone(), vec![1; a.arity()]);
        let v = pi
            .get(&diag)
            .ok_or_else(|| TypeError::Undeclared(syntax::render(&Atom(diag.clone()))))?;
        truth.insert(a.clone(), v);
    }
    Ok(AdjacentType { k: 2, truth })
}

/// A set `ω` of 2-types sharing the 1-type `tp(ω)`, with `tp(ω)² ∈ ω`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConnectorType {
    pub one_type: AdjacentType,
    pub members: BTreeSet<AdjacentType>,
}

impl ConnectorType {
    /// Validates the connector-type conditions over the 2-atoms `atoms`.
    pub fn new(members: BTreeSet<AdjacentType>, atoms: &BTreeSet<Atom>) -> Result<Self, TypeError> {
        let first = members
            .iter()
            .next()
            .ok_or_else(|| TypeError::Domain("empty connector-type".into()))?;
        let pi = first.one_type();
        if !members.iter().all(|z| z.entails(&pi)) {
            return Err(TypeError::Domain("members disagree on the 1-type".into()));
        }
        if !members.contains(&one_type_squared(&pi, atoms)?) {
            return Err(TypeError::Domain(
                "the square of the 1-type is missing".into(),
            ));
        }
        Ok(ConnectorType {
            one_type: pi,
            members,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "one_type": self.one_type.literals(),
            "members": self.members.iter().map(AdjacentType::literals).collect::<Vec<_>>(),
        })
    }
}

/// `con^A[a] = { tp[a,b] : b ∈ A }` over the 2-atoms `atoms`.
pub fn connector_of(
    a: &Structure,
    e: Elem,
    atoms: &BTreeSet<Atom>,
) -> Result<ConnectorType, TypeError> {
    if e as usize >= a.size() {
        return Err(TypeError::Domain(format!(
            "element {e} is not in the domain"
        )));
    }
    let members = (0..a.size() as Elem)
        .map(|b| type_of(a, &[e, b], atoms))
        .collect::<Result<BTreeSet<_>, _>>()?;
    ConnectorType::new(members, atoms)
}

fn require_three(nf: &NormalForm) -> Result<(), TypeError> {
    if nf.ell != 2 {
        return Err(TypeError::Domain(format!(
            "expected a three-variable normal form, got {} variables",
            nf.ell + 1
        )));
    }
    Ok(())
}

/// The conditions L∃₁, L∃₂, L∀₁ and L∀₂.
pub fn compatible(omega: &ConnectorType, nf: &NormalForm) -> Result<bool, TypeError> {
    require_three(nf)?;
    let delta_hat = syntax::hat(&nf.delta, 3).map_err(|e| TypeError::Domain(e.to_string()))?;
    let sub = |f: &Formula, g: &[usize]| {
        syntax::substitute_walk(f, g).map_err(|e| TypeError::Domain(e.to_string()))
    };
    for gamma in &nf.gammas {
        let g112 = sub(gamma, &[1, 1, 2])?;
        let mut found = false;
        for eta in &omega.members {
            if eta.eval(&g112)? {
                found = true;
                break;
            }
        }
        if !found {
            return Ok(false);
        }
    }
    for eta in &omega.members {
        for f in words::adjacent_walks(3, 2) {
            if !eta.eval(&sub(&nf.delta, &f)?)? {
                return Ok(false);
            }
        }
    }
    for alpha in &omega.members {
        let zeta = alpha.inverse().to_formula();
        for eta in &omega.members {
            let f = And(vec![
                zeta.clone(),
                eta.shifted().to_formula(),
                delta_hat.clone(),
            ]);
            if !consistent(&f)? {
                return Ok(false);
            }
        }
        for gamma in &nf.gammas {
            let mut found = false;
            for eta in &omega.members {
                let f = And(vec![
                    zeta.clone(),
                    eta.shifted().to_formula(),
                    gamma.clone(),
                    delta_hat.clone(),
                ]);
                if consistent(&f)? {
                    found = true;
                    break;
                }
            }
            if !found {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The conditions G∃ and G∀.
pub fn coherent(omegas: &[ConnectorType]) -> bool {
    let g_exists = omegas.iter().all(|w| {
        w.members.iter().all(|z| {
            let inv = z.inverse();
            omegas.iter().any(|w2| w2.members.contains(&inv))
        })
    });
    let g_forall = omegas.iter().all(|w| {
        omegas
            .iter()
            .all(|w2| w.members.iter().any(|z| w2.members.contains(&z.inverse())))
    });
    g_exists && g_forall
}

/// A non-empty coherent set of compatible connector-types.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub members: Vec<ConnectorType>,
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        Value::Array(self.members.iter().map(ConnectorType::to_json).collect())
    }

    /// Re-checks every condition literally.
    pub fn validate(&self, nf: &NormalForm) -> Result<bool, TypeError> {
        if self.members.is_empty() || !coherent(&self.members) {
            return Ok(false);
        }
        for w in &self.members {
            if !compatible(w, nf)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::random_structure;
    use crate::syntax::parse;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn atoms(s: &[(&str, &[usize])]) -> BTreeSet<Atom> {
        s.iter().map(|(p, a)| Atom::new(*p, a.to_vec())).collect()
    }

    #[test]
    fn relevant() {
        let r = relevant_atoms(&parse("forall x1 r(x1,x1)").unwrap(), 2);
        assert_eq!(r, atoms(&[("r", &[1, 1]), ("r", &[2, 2])]));
        let r = relevant_atoms(&parse("forall x1 forall x2 p(x1,x2)").unwrap(), 2);
        assert_eq!(r.len(), 4);
        let r = relevant_atoms(&parse("q & forall x1 s(x1)").unwrap(), 3);
        assert!(r.contains(&Atom::new("q", vec![])));
        assert_eq!(r.len(), 4);
    }

    #[test]
    fn enumeration() {
        assert_eq!(enumerate_types(&BTreeSet::new(), 2, 24).unwrap().count(), 1);
        assert_eq!(
            enumerate_types(&atoms(&[("r", &[1, 1])]), 1, 24)
                .unwrap()
                .count(),
            2
        );
        let two: Vec<_> = enumerate_types(&atoms(&[("r", &[1, 2]), ("r", &[2, 1])]), 2, 24)
            .unwrap()
            .collect();
        assert_eq!(two.len(), 4);
        assert!(two[0].truth.values().all(|v| !v));
        let many: BTreeSet<Atom> = (0..25)
            .map(|i| Atom::new(format!("p{i}"), vec![]))
            .collect();
        assert!(matches!(
            enumerate_types(&many, 0, 24),
            Err(TypeError::Resource { .. })
        ));
    }

    #[test]
    fn consistency() {
        assert!(!consistent(&parse("p(x1,x2) & !p(x1,x2)").unwrap()).unwrap());
        assert!(consistent(&parse("p(x1,x2) & !p(x2,x1)").unwrap()).unwrap());
        assert!(consistent(&parse("(a <-> !b) & (b | c) & !c").unwrap()).unwrap());
        assert!(!consistent(&parse("(a <-> !a)").unwrap()).unwrap());
        assert!(consistent(&parse("forall x1 p(x1)").unwrap()).is_err());
    }

    #[test]
    fn projection() {
        let p12 = atoms(&[("p", &[1, 2])]);
        let out = project_circ(&parse("p(x2,x3)").unwrap(), &p12, 2, 24).unwrap();
        assert_eq!(out, Or(vec![And(vec![parse("p(x1,x2)").unwrap()])]));
        let none = project_circ(&parse("p(x2,x3) & !p(x2,x3)").unwrap(), &p12, 2, 24).unwrap();
        assert_eq!(none, Or(vec![]));
        let all = project_circ(&Formula::top(), &p12, 2, 24).unwrap();
        assert!(matches!(all, Or(v) if v.len() == 2));
    }

    #[test]
    fn squares_and_connectors() {
        let a2 = atoms(&[
            ("r", &[1, 1]),
            ("r", &[1, 2]),
            ("r", &[2, 1]),
            ("r", &[2, 2]),
        ]);
        let pi = AdjacentType {
            k: 1,
            truth: [(Atom::new("r", vec![1, 1]), true)].into(),
        };
        let sq = one_type_squared(&pi, &a2).unwrap();
        assert!(sq.truth.values().all(|&v| v));
        assert_eq!(sq.inverse(), sq);

        let sig: BTreeMap<String, usize> = [("r".to_string(), 2)].into();
        let mut s = Structure::new(2, &sig);
        s.set("r", vec![0, 1], true);
        assert_eq!(connector_of(&s, 0, &a2).unwrap().members.len(), 2);
        let one = Structure::new(1, &sig);
        let w = connector_of(&one, 0, &a2).unwrap();
        assert_eq!(w.members.len(), 1);
        assert!(w.members.iter().next().unwrap().truth.values().all(|v| !v));
        assert!(connector_of(&one, 3, &a2).is_err());
    }

    #[test]
    fn structures_yield_coherent_connectors() {
        let sig: BTreeMap<String, usize> = [("r".to_string(), 2), ("q".to_string(), 1)].into();
        let f = parse("forall x1 forall x2 (r(x1,x2) & q(x1))").unwrap();
        let a2 = relevant_atoms(&f, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let n = rand::Rng::gen_range(&mut rng, 1..=4);
            let s = random_structure(&sig, n, 0.5, &mut rng);
            let omegas: Vec<ConnectorType> = (0..n as Elem)
                .map(|e| connector_of(&s, e, &a2).unwrap())
                .collect();
            assert!(coherent(&omegas));
        }
        assert!(coherent(&[]));
    }

    #[test]
    fn incoherent_singleton() {
        let a2 = atoms(&[
            ("r", &[1, 1]),
            ("r", &[1, 2]),
            ("r", &[2, 1]),
            ("r", &[2, 2]),
        ]);
        let pi = AdjacentType {
            k: 1,
            truth: [(Atom::new("r", vec![1, 1]), false)].into(),
        };
        let sq = one_type_squared(&pi, &a2).unwrap();
        let mut asym = sq.clone();
        asym.truth.insert(Atom::new("r", vec![1, 2]), true);
        let w = ConnectorType::new([sq, asym].into(), &a2).unwrap();
        assert!(!coherent(&[w]));
    }
}
