//! Finite structures, layered structures of bounded primitive length, model
//! checking, products and agreement up to a primitive length.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering};

use rand::Rng;
use serde_json::{json, Map, Value};
use smallvec::SmallVec;
use thiserror::Error;

use crate::syntax::{Atom, Formula, Formula::*};
use crate::types::AdjacentType;
use crate::words;

pub type Elem = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("predicate {0} is not interpreted")]
    Uninterpreted(String),
    #[error("predicate {pred} has arity {expected}, queried with {got} arguments")]
    Arity {
        pred: String,
        expected: usize,
        got: usize,
    },
    #[error("{pred}{tuple:?} has primitive length above the layer bound {bound}")]
    Undefined {
        pred: String,
        tuple: Vec<Elem>,
        bound: usize,
    },
    #[error("{0}")]
    Domain(String),
    #[error("inconsistent assignment at {0:?}: {1}")]
    Consistency(Vec<Elem>, String),
    #[error("malformed structure: {0}")]
    Format(String),
}

/// Read access to a (possibly partial) interpretation.
pub trait Interpretation {
    fn size(&self) -> usize;
    fn holds(&self, pred: &str, tuple: &[Elem]) -> Result<bool, SemanticsError>;
    /// The tuples of `pred` when they can be listed; enables guarded
    /// quantification.
    fn listed(&self, _pred: &str) -> Option<&HashSet<Vec<Elem>>> {
        None
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Relation {
    pub arity: usize,
    pub tuples: HashSet<Vec<Elem>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Structure {
    pub domain: Vec<String>,
    pub relations: BTreeMap<String, Relation>,
}

impl Structure {
    /// A structure over `n` elements named `0 .. n-1` with empty relations
    /// for the given signature.
    pub fn new(n: usize, signature: &BTreeMap<String, usize>) -> Self {
        Structure {
            domain: (0..n).map(|i| i.to_string()).collect(),
            relations: signature
                .iter()
                .map(|(p, &m)| {
                    (
                        p.clone(),
                        Relation {
                            arity: m,
                            tuples: HashSet::new(),
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn signature(&self) -> BTreeMap<String, usize> {
        self.relations
            .iter()
            .map(|(p, r)| (p.clone(), r.arity))
            .collect()
    }

    pub fn declare(&mut self, pred: &str, arity: usize) {
        self.relations
            .entry(pred.to_string())
            .or_insert_with(|| Relation {
                arity,
                tuples: HashSet::new(),
            });
    }

    pub fn set(&mut self, pred: &str, tuple: Vec<Elem>, value: bool) {
        let rel = self
            .relations
            .entry(pred.to_string())
            .or_insert_with(|| Relation {
                arity: tuple.len(),
                tuples: HashSet::new(),
            });
        debug_assert_eq!(rel.arity, tuple.len());
        if value {
            rel.tuples.insert(tuple);
        } else {
            rel.tuples.remove(&tuple);
        }
    }

    pub fn element(&self, name: &str) -> Option<Elem> {
        self.domain
            .iter()
            .position(|d| d == name)
            .map(|i| i as Elem)
    }

    pub fn to_json(&self) -> Value {
        let mut preds = Map::new();
        for (p, rel) in &self.relations {
            let key = format!("{p}/{}", rel.arity);
            if rel.arity == 0 {
                preds.insert(key, Value::Bool(!rel.tuples.is_empty()));
            } else {
                let mut rows: Vec<&Vec<Elem>> = rel.tuples.iter().collect();
                rows.sort();
                let rows: Vec<Value> = rows
                    .into_iter()
                    .map(|t| {
                        Value::Array(t.iter().map(|&e| json!(self.domain[e as usize])).collect())
                    })
                    .collect();
                preds.insert(key, Value::Array(rows));
            }
        }
        json!({ "domain": self.domain, "predicates": preds })
    }

    pub fn from_json(v: &Value) -> Result<Self, SemanticsError> {
        let bad = |m: &str| SemanticsError::Format(m.to_string());
        let domain: Vec<String> = v
            .get("domain")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing domain array"))?
            .iter()
            .map(|e| {
                e.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| bad("domain elements must be strings"))
            })
            .collect::<Result<_, _>>()?;
        let index: HashMap<&str, Elem> = domain
            .iter()
            .enumerate()
            .map(|(i, d)| (d.as_str(), i as Elem))
            .collect();
        if index.len() != domain.len() {
            return Err(bad("duplicate domain element"));
        }
        let mut s = Structure {
            domain: domain.clone(),
            relations: BTreeMap::new(),
        };
        let preds = match v.get("predicates") {
            None => return Ok(s),
            Some(p) => p
                .as_object()
                .ok_or_else(|| bad("predicates must be an object"))?,
        };
        for (key, val) in preds {
            let (name, arity) = key
                .rsplit_once('/')
                .and_then(|(n, a)| a.parse::<usize>().ok().map(|a| (n.to_string(), a)))
                .ok_or_else(|| {
                    SemanticsError::Format(format!("predicate key {key} is not name/arity"))
                })?;
            s.declare(&name, arity);
            match val {
                Value::Bool(b) if arity == 0 => {
                    if *b {
                        s.set(&name, Vec::new(), true);
                    }
                }
                Value::Array(rows) => {
                    for row in rows {
                        let row = row.as_array().ok_or_else(|| bad("tuples must be arrays"))?;
                        if row.len() != arity {
                            return Err(SemanticsError::Format(format!(
                                "tuple of wrong arity for {key}"
                            )));
                        }
                        let t = row
                            .iter()
                            .map(|e| {
                                e.as_str()
                                    .and_then(|n| index.get(n).copied())
                                    .ok_or_else(|| {
                                        SemanticsError::Format(format!(
                                            "unknown element {e} in {key}"
                                        ))
                                    })
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        s.set(&name, t, true);
                    }
                }
                _ => return Err(SemanticsError::Format(format!("bad extension for {key}"))),
            }
        }
        Ok(s)
    }
}

impl Interpretation for Structure {
    fn size(&self) -> usize {
        self.domain.len()
    }

    fn holds(&self, pred: &str, tuple: &[Elem]) -> Result<bool, SemanticsError> {
        let rel = self
            .relations
            .get(pred)
            .ok_or_else(|| SemanticsError::Uninterpreted(pred.to_string()))?;
        if rel.arity != tuple.len() {
            return Err(SemanticsError::Arity {
                pred: pred.to_string(),
                expected: rel.arity,
                got: tuple.len(),
            });
        }
        Ok(rel.tuples.contains(tuple))
    }

    fn listed(&self, pred: &str) -> Option<&HashSet<Vec<Elem>>> {
        self.relations.get(pred).map(|r| &r.tuples)
    }
}

fn conjuncts(f: &Formula) -> Vec<&Formula> {
    match f {
        And(fs) => fs.iter().flat_map(conjuncts).collect(),
        _ => vec![f],
    }
}

struct Evaluator<'a, I: Interpretation + ?Sized> {
    m: &'a I,
    guards: bool,
    /// Free variables of quantified subformulas that do not use every
    /// variable in scope, keyed by node address.
    memo_vars: HashMap<*const Formula, Vec<usize>>,
    memo: RefCell<HashMap<(*const Formula, SmallVec<[Elem; 6]>), bool>>,
}

impl<I: Interpretation + ?Sized> Evaluator<'_, I> {
    fn plan(&mut self, f: &Formula, scope: &mut Vec<usize>) {
        match f {
            Atom(_) => {}
            Not(g) => self.plan(g, scope),
            And(fs) | Or(fs) => fs.iter().for_each(|g| self.plan(g, scope)),
            Implies(a, b) | Iff(a, b) => {
                self.plan(a, scope);
                self.plan(b, scope);
            }
            Forall(v, g) | Exists(v, g) => {
                let free = f.free_vars();
                let in_scope: BTreeSet<usize> = scope.iter().copied().collect();
                if free.len() < in_scope.len() {
                    self.memo_vars
                        .insert(f as *const Formula, free.into_iter().collect());
                }
                scope.push(*v);
                self.plan(g, scope);
                scope.pop();
            }
        }
    }

    fn eval(&self, f: &Formula, env: &mut Vec<Elem>) -> Result<bool, SemanticsError> {
        match f {
            Atom(a) => {
                let t: SmallVec<[Elem; 8]> = a.args.iter().map(|&x| env[x]).collect();
                self.m.holds(&a.pred, &t)
            }
            Not(g) => Ok(!self.eval(g, env)?),
            And(fs) => {
                for g in fs {
                    if !self.eval(g, env)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Or(fs) => {
                for g in fs {
                    if self.eval(g, env)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Implies(a, b) => Ok(!self.eval(a, env)? || self.eval(b, env)?),
            Iff(a, b) => Ok(self.eval(a, env)? == self.eval(b, env)?),
            Forall(..) | Exists(..) => {
                let Some(vars) = self.memo_vars.get(&(f as *const Formula)) else {
                    return self.quantify(f, env);
                };
                let key = (f as *const Formula, vars.iter().map(|&x| env[x]).collect());
                if let Some(&r) = self.memo.borrow().get(&key) {
                    return Ok(r);
                }
                let r = self.quantify(f, env)?;
                self.memo.borrow_mut().insert(key, r);
                Ok(r)
            }
        }
    }

    fn quantify(&self, f: &Formula, env: &mut Vec<Elem>) -> Result<bool, SemanticsError> {
        let (Forall(v, g) | Exists(v, g)) = f else {
            unreachable!("called on quantifiers")
        };
        let universal = matches!(f, Forall(..));
        if self.guards {
            if let Some(r) = self.guarded(f, universal, env)? {
                return Ok(r);
            }
        }
        let old = env[*v];
        let mut result = universal;
        for e in 0..self.m.size() as Elem {
            env[*v] = e;
            if self.eval(g, env)? != universal {
                result = !universal;
                break;
            }
        }
        env[*v] = old;
        Ok(result)
    }

    /// Quantifies a block `Q x̄` by walking the tuples of a guard atom whose
    /// arguments cover `x̄`, when the body has the guarded shape.
    fn guarded(
        &self,
        f: &Formula,
        universal: bool,
        env: &mut Vec<Elem>,
    ) -> Result<Option<bool>, SemanticsError> {
        let mut block = Vec::new();
        let mut body = f;
        loop {
            match body {
                Forall(v, g) if universal => {
                    block.push(*v);
                    body = g;
                }
                Exists(v, g) if !universal => {
                    block.push(*v);
                    body = g;
                }
                _ => break,
            }
        }
        let Some(alpha) = guard_atom(universal, &block, body) else {
            return Ok(None);
        };
        let Some(tuples) = self.m.listed(&alpha.pred) else {
            return Ok(None);
        };
        let saved: Vec<Elem> = block.iter().map(|&v| env[v]).collect();
        let mut result = universal;
        'tuples: for t in tuples {
            if t.len() != alpha.arity() {
                continue;
            }
            let mut bound: Vec<Option<Elem>> = vec![None; block.len()];
            for (pos, &x) in alpha.args.iter().enumerate() {
                match block.iter().position(|&v| v == x) {
                    Some(bi) => match bound[bi] {
                        Some(e) if e != t[pos] => continue 'tuples,
                        Some(_) => {}
                        None => bound[bi] = Some(t[pos]),
                    },
                    None if env[x] != t[pos] => continue 'tuples,
                    None => {}
                }
            }
            for (bi, &v) in block.iter().enumerate() {
                env[v] = bound[bi].expect("guard covers the block");
            }
            if self.eval(body, env)? != universal {
                result = !universal;
                break;
            }
        }
        for (&v, &e) in block.iter().zip(&saved) {
            env[v] = e;
        }
        Ok(Some(result))
    }
}

/// An atom covering the distinct variables of `block`, in guard position of
/// `body`.
fn guard_atom<'f>(universal: bool, block: &[usize], body: &'f Formula) -> Option<&'f Atom> {
    let distinct: BTreeSet<usize> = block.iter().copied().collect();
    if distinct.len() != block.len() {
        return None;
    }
    let candidates = match (universal, body) {
        (true, Implies(a, _)) => conjuncts(a),
        (false, _) => conjuncts(body),
        _ => return None,
    };
    candidates.into_iter().find_map(|g| match g {
        Atom(a) if block.iter().all(|v| a.args.contains(v)) => Some(a),
        _ => None,
    })
}

fn run<I: Interpretation + ?Sized>(
    m: &I,
    f: &Formula,
    assignment: &[Elem],
    fast: bool,
) -> Result<bool, SemanticsError> {
    if let Some(&x) = f.free_vars().iter().find(|&&x| x > assignment.len()) {
        return Err(SemanticsError::Domain(format!(
            "x{x} is free but unassigned"
        )));
    }
    if m.size() == 0 {
        return Err(SemanticsError::Domain("empty domain".into()));
    }
    let mut env = vec![0; f.max_var().max(assignment.len()) + 1];
    env[1..=assignment.len()].copy_from_slice(assignment);
    let mut ev = Evaluator {
        m,
        guards: fast,
        memo_vars: HashMap::new(),
        memo: RefCell::new(HashMap::new()),
    };
    if !fast {
        return ev.eval(f, &mut env);
    }
    let g = miniscope(f);
    ev.plan(&g, &mut (1..=assignment.len()).collect());
    ev.eval(&g, &mut env)
}

fn quantified(universal: bool, v: usize, body: Formula) -> Formula {
    if universal {
        Formula::forall(v, body)
    } else {
        Formula::exists(v, body)
    }
}

/// Pushes quantifiers inward past subformulas that do not mention the bound
/// variable. Equivalent on non-empty domains.
fn miniscope(f: &Formula) -> Formula {
    match f {
        Atom(_) => f.clone(),
        Not(g) => Formula::not(miniscope(g)),
        And(fs) => And(fs.iter().map(miniscope).collect()),
        Or(fs) => Or(fs.iter().map(miniscope).collect()),
        Implies(a, b) => Formula::implies(miniscope(a), miniscope(b)),
        Iff(a, b) => Formula::iff(miniscope(a), miniscope(b)),
        Forall(..) | Exists(..) => {
            let universal = matches!(f, Forall(..));
            let mut block = Vec::new();
            let mut body = f;
            while let (Forall(v, g), true) | (Exists(v, g), false) = (body, universal) {
                block.push(*v);
                body = g;
            }
            let inner = miniscope(body);
            if guard_atom(universal, &block, &inner).is_some() {
                return block
                    .iter()
                    .rev()
                    .fold(inner, |acc, &v| quantified(universal, v, acc));
            }
            block
                .iter()
                .rev()
                .fold(inner, |acc, &v| push(universal, v, acc))
        }
    }
}

fn push(universal: bool, v: usize, body: Formula) -> Formula {
    if !body.free_vars().contains(&v) {
        return body;
    }
    let conj = matches!(body, And(_));
    match body {
        And(fs) if universal => And(fs.into_iter().map(|g| push(true, v, g)).collect()),
        Or(fs) if !universal => Or(fs.into_iter().map(|g| push(false, v, g)).collect()),
        And(fs) | Or(fs) => {
            let (with, without): (Vec<Formula>, Vec<Formula>) =
                fs.into_iter().partition(|g| g.free_vars().contains(&v));
            if without.is_empty() {
                let inner = if conj { And(with) } else { Or(with) };
                return quantified(universal, v, inner);
            }
            let inner = if with.len() == 1 {
                with.into_iter().next().unwrap()
            } else if conj {
                And(with)
            } else {
                Or(with)
            };
            let mut out = without;
            out.push(push(universal, v, inner));
            if conj {
                And(out)
            } else {
                Or(out)
            }
        }
        Implies(a, b) => {
            let (in_a, in_b) = (a.free_vars().contains(&v), b.free_vars().contains(&v));
            match (in_a, in_b) {
                (false, _) => Formula::implies(*a, push(universal, v, *b)),
                (_, false) => Formula::implies(push(!universal, v, *a), *b),
                _ => quantified(universal, v, Implies(a, b)),
            }
        }
        other => quantified(universal, v, other),
    }
}

/// Truth of `f` under `x_i ↦ assignment[i-1]`. Guarded quantifier blocks
/// iterate over the guard's tuples.
pub fn evaluate<I: Interpretation + ?Sized>(
    m: &I,
    f: &Formula,
    assignment: &[Elem],
) -> Result<bool, SemanticsError> {
    run(m, f, assignment, true)
}

/// As [`evaluate`] but always quantifying over the whole domain.
pub fn evaluate_plain<I: Interpretation + ?Sized>(
    m: &I,
    f: &Formula,
    assignment: &[Elem],
) -> Result<bool, SemanticsError> {
    run(m, f, assignment, false)
}

/// `B × I` with `I = {0, .., copies-1}`; `⟨b, i⟩` is element `b·copies + i`.
pub fn product(b: &Structure, copies: usize) -> Result<Structure, SemanticsError> {
    if copies == 0 {
        return Err(SemanticsError::Domain(
            "the index set must be non-empty".into(),
        ));
    }
    let mut out = Structure {
        domain: b
            .domain
            .iter()
            .flat_map(|d| (0..copies).map(move |i| format!("{d}.{i}")))
            .collect(),
        relations: BTreeMap::new(),
    };
    for (p, rel) in &b.relations {
        out.declare(p, rel.arity);
        for t in &rel.tuples {
            let mut idx = vec![0usize; t.len()];
            loop {
                let lifted = t
                    .iter()
                    .zip(&idx)
                    .map(|(&e, &i)| e * copies as Elem + i as Elem)
                    .collect();
                out.set(p, lifted, true);
                let mut pos = 0;
                while pos < idx.len() && idx[pos] + 1 == copies {
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == idx.len() {
                    break;
                }
                idx[pos] += 1;
            }
        }
    }
    Ok(out)
}

/// `A ≈_ℓ A'`: the extensions agree on all tuples of primitive length ≤ ℓ.
pub fn agree_up_to(a: &Structure, b: &Structure, ell: usize) -> Result<bool, SemanticsError> {
    if a.domain.len() != b.domain.len() {
        return Err(SemanticsError::Domain(
            "structures have different domains".into(),
        ));
    }
    if a.signature() != b.signature() {
        return Err(SemanticsError::Domain(
            "structures have different signatures".into(),
        ));
    }
    for (p, ra) in &a.relations {
        let rb = &b.relations[p];
        for t in ra.tuples.symmetric_difference(&rb.tuples) {
            let pl = if t.is_empty() {
                0
            } else {
                words::primitive_length(t).expect("non-empty")
            };
            if pl <= ell {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn primitive_len(t: &[Elem]) -> usize {
    if t.is_empty() {
        0
    } else {
        words::primitive_length(t).expect("non-empty tuple")
    }
}

/// A structure defined only on tuples of primitive length at most `bound`.
/// Queries beyond the bound are rejected and counted.
#[derive(Debug)]
pub struct LayeredStructure {
    base: Structure,
    bound: usize,
    /// Canonical primitive generators whose types have been fixed.
    fixed: HashSet<Vec<Elem>>,
    rejected: AtomicUsize,
}

impl Clone for LayeredStructure {
    fn clone(&self) -> Self {
        LayeredStructure {
            base: self.base.clone(),
            bound: self.bound,
            fixed: self.fixed.clone(),
            rejected: AtomicUsize::new(self.rejected.load(Ordering::Relaxed)),
        }
    }
}

impl LayeredStructure {
    /// Keeps only the tuples of `s` whose primitive length is at most `bound`.
    pub fn truncate(s: &Structure, bound: usize) -> Self {
        let mut base = Structure {
            domain: s.domain.clone(),
            relations: BTreeMap::new(),
        };
        for (p, rel) in &s.relations {
            base.declare(p, rel.arity);
            for t in &rel.tuples {
                if primitive_len(t) <= bound {
                    base.set(p, t.clone(), true);
                }
            }
        }
        LayeredStructure {
            base,
            bound,
            fixed: HashSet::new(),
            rejected: AtomicUsize::new(0),
        }
    }

    pub fn empty(n: usize, signature: &BTreeMap<String, usize>, bound: usize) -> Self {
        LayeredStructure {
            base: Structure::new(n, signature),
            bound,
            fixed: HashSet::new(),
            rejected: AtomicUsize::new(0),
        }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// Number of queries rejected for exceeding the bound.
    pub fn rejected_queries(&self) -> usize {
        self.rejected.load(Ordering::Relaxed)
    }

    /// Records a fact; the tuple must lie within the bound.
    pub fn insert(
        &mut self,
        pred: &str,
        tuple: Vec<Elem>,
        value: bool,
    ) -> Result<(), SemanticsError> {
        if primitive_len(&tuple) > self.bound {
            return Err(SemanticsError::Undefined {
                pred: pred.to_string(),
                tuple,
                bound: self.bound,
            });
        }
        self.base.set(pred, tuple, value);
        Ok(())
    }

    /// The completion that makes every undefined tuple false.
    pub fn zero_completion(&self) -> Structure {
        self.base.clone()
    }

    /// Raises the bound from `k` to `k+1` by fixing the adjacent type of
    /// each primitive `(k+1)`-tuple (one per reversal pair).
    pub fn extend_layer(
        &self,
        assignments: &[(Vec<Elem>, AdjacentType)],
    ) -> Result<LayeredStructure, SemanticsError> {
        let k = self.bound;
        let mut next = self.clone();
        next.bound = k + 1;
        for (b, ty) in assignments {
            if b.len() != k + 1 || primitive_len(b) != k + 1 {
                return Err(SemanticsError::Consistency(
                    b.clone(),
                    format!("not a primitive {}-tuple", k + 1),
                ));
            }
            let rev: Vec<Elem> = b.iter().rev().copied().collect();
            let key = b.clone().min(rev);
            if !next.fixed.insert(key) {
                return Err(SemanticsError::Consistency(
                    b.clone(),
                    "type assigned twice up to reversal".into(),
                ));
            }
            for (atom, &value) in &ty.truth {
                let c = words::apply_walk(b, &atom.args)
                    .map_err(|e| SemanticsError::Consistency(b.clone(), e.to_string()))?;
                if words::is_surjective(&atom.args, k + 1) {
                    next.base.declare(&atom.pred, atom.arity());
                    next.base.set(&atom.pred, c, value);
                } else if self.holds(&atom.pred, &c).unwrap_or(false) != value {
                    return Err(SemanticsError::Consistency(
                        c,
                        format!(
                            "{} disagrees with a proper infix",
                            crate::syntax::render(&Formula::Atom(atom.clone()))
                        ),
                    ));
                }
            }
        }
        Ok(next)
    }
}

impl Interpretation for LayeredStructure {
    fn size(&self) -> usize {
        self.base.size()
    }

    fn holds(&self, pred: &str, tuple: &[Elem]) -> Result<bool, SemanticsError> {
        if primitive_len(tuple) > self.bound {
            self.rejected.fetch_add(1, Ordering::Relaxed);
            return Err(SemanticsError::Undefined {
                pred: pred.to_string(),
                tuple: tuple.to_vec(),
                bound: self.bound,
            });
        }
        self.base.holds(pred, tuple)
    }
}

/// Evaluates an adjacent formula with at most `L.bound()` variables; such a
/// formula only ever queries tuples within the bound.
pub fn evaluate_layered(
    l: &LayeredStructure,
    f: &Formula,
    assignment: &[Elem],
) -> Result<bool, SemanticsError> {
    if !crate::syntax::in_af(f, assignment.len()) || f.max_var() > l.bound() {
        return Err(SemanticsError::Domain(format!(
            "formula is not in the {}-variable adjacent fragment",
            l.bound()
        )));
    }
    evaluate(l, f, assignment)
}

/// Tuples of each predicate that an atom of `f` can reach over `n` elements.
pub fn sensitive_tuples(f: &Formula, n: usize) -> BTreeMap<String, BTreeSet<Vec<Elem>>> {
    let mut out: BTreeMap<String, BTreeSet<Vec<Elem>>> = BTreeMap::new();
    for a in f.atoms() {
        let vars: Vec<usize> = a
            .args
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let entry = out.entry(a.pred.clone()).or_default();
        let mut choice = vec![0 as Elem; vars.len()];
        loop {
            let t = a
                .args
                .iter()
                .map(|x| choice[vars.iter().position(|v| v == x).expect("collected")])
                .collect();
            entry.insert(t);
            let mut pos = 0;
            while pos < choice.len() && choice[pos] + 1 == n as Elem {
                choice[pos] = 0;
                pos += 1;
            }
            if pos == choice.len() {
                break;
            }
            choice[pos] += 1;
        }
    }
    out
}

/// A random structure over the signature, each tuple present with
/// probability `density`.
pub fn random_structure(
    signature: &BTreeMap<String, usize>,
    n: usize,
    density: f64,
    rng: &mut impl Rng,
) -> Structure {
    let mut s = Structure::new(n, signature);
    for (p, &m) in signature {
        let total = n.pow(m as u32);
        for code in 0..total {
            if rng.gen_bool(density) {
                let mut t = Vec::with_capacity(m);
                let mut c = code;
                for _ in 0..m {
                    t.push((c % n) as Elem);
                    c /= n;
                }
                s.set(p, t, true);
            }
        }
    }
    s
}

/// Every structure of size `n` over the signature, in order of the bit code
/// that lists all tuples predicate by predicate.
pub fn all_structures(
    signature: &BTreeMap<String, usize>,
    n: usize,
    max_bits: usize,
) -> Result<impl Iterator<Item = Structure> + '_, SemanticsError> {
    if n == 0 {
        return Err(SemanticsError::Domain("empty domain".into()));
    }
    let mut cells = Vec::new();
    for (p, &m) in signature {
        for code in 0..n.pow(m as u32) {
            let t: Vec<Elem> = (0..m)
                .map(|i| (code / n.pow(i as u32) % n) as Elem)
                .collect();
            cells.push((p.as_str(), t));
        }
    }
    if cells.len() > max_bits.min(30) {
        return Err(SemanticsError::Domain(format!(
            "{} tuples exceed the cap of {max_bits}",
            cells.len()
        )));
    }
    Ok((0u64..1 << cells.len()).map(move |code| {
        let mut s = Structure::new(n, signature);
        for (i, (p, t)) in cells.iter().enumerate() {
            if code >> i & 1 == 1 {
                s.set(p, t.clone(), true);
            }
        }
        s
    }))
}

/// The atom `p(x̄)` written out for error messages and traces.
pub fn describe_atom(a: &Atom) -> String {
    crate::syntax::render(&Formula::Atom(a.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, substitute_walk};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sig(items: &[(&str, usize)]) -> BTreeMap<String, usize> {
        items.iter().map(|(p, m)| (p.to_string(), *m)).collect()
    }

    const EQ1: &str = "forall x1 forall x2 forall x3 exists x4 forall x5 \
        (p(x1,x2,x3,x2,x3,x4,x5) -> p(x1,x2,x3,x4,x3,x4,x5))";

    #[test]
    fn eq1_small_cases() {
        let f = parse(EQ1).unwrap();
        let mut full = Structure::new(1, &sig(&[("p", 7)]));
        full.set("p", vec![0; 7], true);
        assert!(evaluate(&full, &f, &[]).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.gen_range(1..=3);
            let s = random_structure(&sig(&[("p", 7)]), n, 0.5, &mut rng);
            assert!(evaluate(&s, &f, &[]).unwrap());
        }
    }

    #[test]
    fn reflexivity_fails() {
        let mut s = Structure::new(2, &sig(&[("r", 2)]));
        s.set("r", vec![0, 0], true);
        assert!(!evaluate(&s, &parse("forall x1 r(x1,x1)").unwrap(), &[]).unwrap());
        assert!(matches!(
            evaluate(&s, &parse("forall x1 q(x1)").unwrap(), &[]),
            Err(SemanticsError::Uninterpreted(_))
        ));
    }

    #[test]
    fn json_roundtrip() {
        let text = r#"{"domain":["a","b"],"predicates":{"r/2":[["a","b"],["b","b"]],"q/0":true}}"#;
        let s = Structure::from_json(&serde_json::from_str(text).unwrap()).unwrap();
        assert!(s.holds("q", &[]).unwrap());
        assert!(s.holds("r", &[0, 1]).unwrap());
        assert!(!s.holds("r", &[1, 0]).unwrap());
        assert_eq!(Structure::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn product_sizes() {
        let mut b = Structure::new(2, &sig(&[("r", 2)]));
        b.domain = vec!["a".into(), "b".into()];
        b.set("r", vec![0, 1], true);
        let p = product(&b, 2).unwrap();
        assert_eq!(p.relations["r"].tuples.len(), 4);
        assert_eq!(product(&b, 1).unwrap().relations["r"].tuples.len(), 1);
        assert!(product(&b, 0).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let sg = sig(&[("p", 1), ("r", 2), ("q", 0)]);
        let all: Vec<Structure> = all_structures(&sg, 2, 20).unwrap().collect();
        assert_eq!(all.len(), 1 << 7);
        let distinct: HashSet<String> = all.iter().map(|s| s.to_json().to_string()).collect();
        assert_eq!(distinct.len(), all.len());
        assert!(all_structures(&sg, 3, 8).is_err());
    }

    #[test]
    fn layered_queries() {
        let mut l = LayeredStructure::empty(3, &sig(&[("p", 5)]), 3);
        // a=0, b=1, c=2
        l.insert("p", vec![1, 0, 1, 2, 2], true).unwrap();
        assert!(l.holds("p", &[1, 0, 1, 2, 2]).unwrap());
        assert!(matches!(
            l.holds("p", &[0, 1, 2, 0, 1]),
            Err(SemanticsError::Undefined { .. })
        ));
        assert_eq!(l.rejected_queries(), 1);
        assert!(l.insert("p", vec![0, 1, 2, 0, 1], true).is_err());
    }

    #[test]
    fn agreement() {
        let s = Structure::new(3, &sig(&[("p", 5)]));
        let mut t = s.clone();
        t.set("p", vec![0, 1, 2, 0, 1], true);
        assert!(agree_up_to(&s, &s, 1).unwrap());
        assert!(agree_up_to(&s, &t, 3).unwrap());
        assert!(!agree_up_to(&s, &t, 5).unwrap());
    }

    #[test]
    fn guarded_matches_plain() {
        let f = parse("forall x1 forall x2 (r(x1,x2) -> exists x3 (r(x2,x3) & q(x3)))").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let s = random_structure(&sig(&[("r", 2), ("q", 1)]), 3, 0.4, &mut rng);
            assert_eq!(
                evaluate(&s, &f, &[]).unwrap(),
                evaluate_plain(&s, &f, &[]).unwrap()
            );
        }
    }

    #[test]
    fn miniscoped_matches_plain() {
        let fs = [
            "forall x1 forall x2 exists x3 (!p(x2) & !q | r(x1,x2) | r(x2,x3))",
            "forall x1 exists x2 (p(x1) & forall x3 (r(x2,x3) | q) & r(x1,x2))",
            "exists x1 forall x2 (q | p(x2) | !exists x3 (r(x3,x3) & p(x1)))",
            "forall x1 forall x2 forall x3 (p(x2) <-> exists x4 r(x1,x4))",
            "forall x1 forall x2 exists x3 (r(x1,x2) | (p(x1) -> r(x3,x2)))",
            "forall x1 exists x2 (r(x2,x1) -> q) & exists x1 forall x2 (p(x2) -> r(x1,x1))",
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for text in fs {
            let f = parse(text).unwrap();
            for _ in 0..40 {
                let s = random_structure(&sig(&[("r", 2), ("p", 1), ("q", 0)]), 3, 0.5, &mut rng);
                assert_eq!(
                    evaluate(&s, &f, &[]).unwrap(),
                    evaluate_plain(&s, &f, &[]).unwrap(),
                    "{text}"
                );
            }
        }
    }

    #[test]
    fn sensitive() {
        let f = parse("forall x1 r(x1,x1)").unwrap();
        let t = sensitive_tuples(&f, 3);
        assert_eq!(t["r"].len(), 3);
    }

    fn arb_qf() -> impl Strategy<Value = Formula> {
        let leaf = (0usize..2, prop::collection::vec(1usize..4, 2..3))
            .prop_filter("adjacent", |(_, a)| words::is_adjacent(a))
            .prop_map(|(n, args)| Formula::atom(if n == 0 { "r" } else { "s" }, args));
        leaf.prop_recursive(3, 12, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                prop::collection::vec(inner.clone(), 2..3).prop_map(Formula::And),
                prop::collection::vec(inner, 2..3).prop_map(Formula::Or),
            ]
        })
    }

    proptest! {
        #[test]
        fn substitution_bridge(chi in arb_qf(), seed in any::<u64>(), k in 1usize..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let walks = words::adjacent_walks(3, k);
            let g = &walks[rng.gen_range(0..walks.len())];
            let s = random_structure(&sig(&[("r", 2), ("s", 2)]), 3, 0.5, &mut rng);
            let a: Vec<Elem> = (0..k).map(|_| rng.gen_range(0..3)).collect();
            let lhs = evaluate(&s, &substitute_walk(&chi, g).unwrap(), &a).unwrap();
            let ag = words::apply_walk(&a, g).unwrap();
            let rhs = evaluate(&s, &chi, &ag).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
