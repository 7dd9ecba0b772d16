use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::semantics::{evaluate, Elem, Structure};
use crate::syntax::{classify, render, Formula};

use super::atm::{Atm, ConfigTree, Kind, Side};
use super::counters::{eq, less, succ, BIT};
use super::lambda::{build_epsilon, build_zeta};
use super::HardnessError;

/// Constant in the size bound `nodes ≤ SIZE_FACTOR · (|Q| + |Σ|)² · n²`.
pub const SIZE_FACTOR: usize = 120;

/// The sentence for a machine and input, kept as its named conjuncts.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub n: usize,
    pub conjuncts: Vec<(String, Formula)>,
    pub signature: BTreeMap<String, usize>,
}

impl Encoding {
    pub fn sentence(&self) -> Formula {
        Formula::and_all(self.conjuncts.iter().map(|(_, f)| f.clone()).collect())
    }

    pub fn node_count(&self) -> usize {
        self.conjuncts.iter().map(|(_, f)| f.node_count()).sum()
    }

    /// Conjuncts that fail to classify as guarded and adjacent.
    pub fn unguarded(&self) -> Vec<String> {
        self.conjuncts
            .iter()
            .filter(|(_, f)| !classify(f).guarded_adjacent)
            .map(|(n, _)| n.clone())
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, f) in &self.conjuncts {
            out.push_str(&format!("# {name}\n{}\n", render(f)));
        }
        out
    }
}

pub fn state_pred(atm: &Atm, q: usize) -> String {
    format!("Q_{}", atm.states[q].0)
}

pub fn symbol_pred(atm: &Atm, s: usize) -> String {
    format!("S_{}", atm.alphabet[s])
}

fn edge_pred(side: Side) -> String {
    format!("E_{}", side.letter())
}

fn guard_pred(m: usize) -> String {
    format!("G_{m}")
}

fn dummy_pred(n: usize) -> String {
    format!("F_{n}")
}

/// `bin_n(x, y)(c)`: `n` bits of `c`, least significant first, `x` for zero
/// and `y` for one.
fn bin(n: usize, x: usize, y: usize, c: usize) -> Vec<usize> {
    (0..n)
        .map(|i| if c >> i & 1 == 1 { y } else { x })
        .collect()
}

fn range(a: usize, len: usize) -> Vec<usize> {
    (a..a + len).collect()
}

fn atom(p: &str, args: Vec<usize>) -> Formula {
    Formula::atom(p, args)
}

fn all(vars: usize, guard: Formula, body: Formula) -> Formula {
    Formula::forall_all(1..=vars, Formula::implies(guard, body))
}

/// Builds `φ_{T,w}`; `literal_succ` selects the bitwise successor rule
/// without the overflow guard.
pub fn encode_atm(atm: &Atm, w: &[usize], literal_succ: bool) -> Result<Encoding, HardnessError> {
    let n = w.len();
    if n == 0 {
        return Err(HardnessError::Domain(
            "the input word must be non-empty".into(),
        ));
    }
    let q = |i| state_pred(atm, i);
    let s = |i| symbol_pred(atm, i);
    let (gn, g2n, f) = (guard_pred(n), guard_pred(2 * n), dummy_pred(n));
    let nq = atm.states.len();
    let ns = atm.alphabet.len();
    let mut c: Vec<(String, Formula)> = Vec::new();

    c.push((
        "phi1".into(),
        all(
            2,
            atom("V", vec![1, 2]),
            Formula::and_all(vec![Formula::not(atom(BIT, vec![1])), atom(BIT, vec![2])]),
        ),
    ));

    let mut at_most_one_state = Vec::new();
    for p in 0..nq {
        for r in p + 1..nq {
            at_most_one_state.push(all(
                2,
                atom("V", vec![1, 2]),
                Formula::or_all(vec![
                    Formula::not(atom(&q(p), vec![1, 2])),
                    Formula::not(atom(&q(r), vec![1, 2])),
                ]),
            ));
        }
    }
    c.push(("phi2".into(), Formula::and_all(at_most_one_state)));

    let u = range(3, n);
    let mut one_symbol = Vec::new();
    for a in 0..ns {
        for b in a + 1..ns {
            one_symbol.push(all(
                n + 2,
                atom(&gn, range(1, n + 2)),
                Formula::not(Formula::and_all(vec![
                    atom(&s(a), u.clone()),
                    atom(&s(b), u.clone()),
                ])),
            ));
        }
    }
    c.push(("phi3".into(), Formula::and_all(one_symbol)));

    let v = range(n + 3, n);
    c.push((
        "phi4".into(),
        all(
            2 * n + 2,
            atom(&g2n, range(1, 2 * n + 2)),
            Formula::implies(
                Formula::and_all(vec![atom("H", u.clone()), atom("H", v.clone())]),
                eq(&u, &v),
            ),
        ),
    ));

    let mut mu1 = vec![
        atom(&q(atm.initial), vec![1, 2]),
        atom("H", bin(n, 1, 2, 0)),
    ];
    mu1.extend(
        w.iter()
            .enumerate()
            .map(|(i, &sym)| atom(&s(sym), bin(n, 1, 2, i))),
    );
    let mu2 = Formula::implies(
        less(&bin(n, 1, 2, n - 1), &u),
        atom(&s(atm.blank), u.clone()),
    );
    c.push((
        "phi5".into(),
        Formula::and_all(vec![
            Formula::exists_all(
                1..=2,
                Formula::and_all(vec![atom("V", vec![1, 2]), atom("R", vec![1, 2])]),
            ),
            all(
                2,
                atom("R", vec![1, 2]),
                Formula::and_all(vec![
                    Formula::and_all(mu1),
                    Formula::forall_all(
                        3..=n + 2,
                        Formula::implies(atom(&gn, range(1, n + 2)), mu2),
                    ),
                ]),
            ),
        ]),
    ));

    let states_where = |pick: &dyn Fn(usize) -> bool, args: Vec<usize>| {
        Formula::or_all(
            (0..nq)
                .filter(|&i| pick(i))
                .map(|i| atom(&q(i), args.clone()))
                .collect(),
        )
    };
    c.push((
        "phi6".into(),
        all(
            2,
            atom("V", vec![1, 2]),
            Formula::not(states_where(&|i| atm.rejecting(i), vec![1, 2])),
        ),
    ));

    // y is x1 and x is x2 here.
    let successor = |side| Formula::exists_all(3..=4, atom(&edge_pred(side), vec![1, 2, 3, 4]));
    let psi_all = Formula::and_all(vec![successor(Side::Left), successor(Side::Right)]);
    let psi_some = Formula::or_all(vec![successor(Side::Left), successor(Side::Right)]);
    let branching = |kind: Kind| move |i: usize| atm.states[i].1 == kind && !atm.halting(i);
    c.push((
        "phi7".into(),
        Formula::and_all(vec![
            all(
                2,
                atom("V", vec![2, 1]),
                Formula::implies(
                    states_where(&branching(Kind::Universal), vec![2, 1]),
                    psi_all,
                ),
            ),
            all(
                2,
                atom("V", vec![2, 1]),
                Formula::implies(
                    states_where(&branching(Kind::Existential), vec![2, 1]),
                    psi_some,
                ),
            ),
        ]),
    ));

    // ū y x x' y' v̄ is x1 .. x_{2n+4}.
    let uu = range(1, n);
    let (y, x, x2, y2) = (n + 1, n + 2, n + 3, n + 4);
    let vv = range(n + 5, n);
    let fguard = atom(&f, range(1, 2 * n + 4));
    c.push((
        "phi8".into(),
        all(
            2 * n + 4,
            fguard.clone(),
            Formula::implies(
                Formula::and_all(vec![Formula::not(atom("H", uu.clone())), eq(&uu, &vv)]),
                Formula::and_all(
                    (0..ns)
                        .map(|a| Formula::implies(atom(&s(a), uu.clone()), atom(&s(a), vv.clone())))
                        .collect(),
                ),
            ),
        ),
    ));

    let mut xis = Vec::new();
    for (&(side, st, sym), t) in &atm.delta {
        let premise = Formula::and_all(vec![
            atom(&edge_pred(side), vec![y, x, x2, y2]),
            atom(&q(st), vec![x, y]),
            atom("H", uu.clone()),
            atom(&s(sym), uu.clone()),
        ]);
        let chi = Formula::and_all(vec![
            atom(&q(t.next), vec![x2, y2]),
            Formula::implies(eq(&vv, &uu), atom(&s(t.write), vv.clone())),
            Formula::implies(
                succ(&vv, &uu, t.shift, literal_succ)?,
                atom("H", vv.clone()),
            ),
        ]);
        xis.push(all(
            2 * n + 4,
            fguard.clone(),
            Formula::implies(premise, chi),
        ));
    }
    c.push(("phi9".into(), Formula::and_all(xis)));

    c.push((format!("zeta_V_{n}"), build_zeta("V", &gn, n)?));
    c.push((format!("zeta_V_{}", 2 * n), build_zeta("V", &g2n, 2 * n)?));
    c.push(("epsilon_E_l".into(), build_epsilon("E_l", &f, n)?));
    c.push(("epsilon_E_r".into(), build_epsilon("E_r", &f, n)?));

    let mut signature = BTreeMap::new();
    for (_, g) in &c {
        signature.extend(g.signature());
    }
    for i in 0..nq {
        signature.insert(q(i), 2);
    }
    for i in 0..ns {
        signature.insert(s(i), n);
    }
    for (p, k) in [
        ("V", 2),
        ("R", 2),
        ("H", n),
        (BIT, 1),
        ("E_l", 4),
        ("E_r", 4),
    ] {
        signature.insert(p.to_string(), k);
    }
    Ok(Encoding {
        n,
        conjuncts: c,
        signature,
    })
}

/// The size bound for a machine and input length.
pub fn size_bound(atm: &Atm, n: usize) -> usize {
    let k = atm.states.len() + atm.alphabet.len();
    SIZE_FACTOR * k * k * n * n
}

fn zero(v: usize) -> Elem {
    (2 * v) as Elem
}

fn one(v: usize) -> Elem {
    (2 * v + 1) as Elem
}

/// All words over `{a, b}` of length `m`.
fn words2(a: Elem, b: Elem, m: usize) -> impl Iterator<Item = Vec<Elem>> {
    (0usize..1 << m).map(move |c| {
        (0..m)
            .map(|i| if c >> i & 1 == 1 { b } else { a })
            .collect()
    })
}

/// The structure embedding an accepting tree, expanded by `O`, the guards
/// `G_n`, `G_{2n}` and the dummy guard `F_n`. Vertex `v` owns elements
/// `2v` (zero bit) and `2v+1` (unit bit).
pub fn embed_and_expand(
    atm: &Atm,
    tree: &ConfigTree,
    n: usize,
) -> Result<Structure, HardnessError> {
    if n == 0 {
        return Err(HardnessError::Domain("n must be at least 1".into()));
    }
    if let Some(c) = tree.vertices.iter().find(|c| c.tape.len() != 1 << n) {
        return Err(HardnessError::Domain(format!(
            "tapes must have 2^{n} cells, found {}",
            c.tape.len()
        )));
    }
    let mut children = vec![Vec::new(); tree.vertices.len()];
    for &(u, _, side) in &tree.edges {
        children[u].push(side);
    }
    for (u, c) in tree.vertices.iter().enumerate() {
        let q = c.state;
        let ok = if atm.halting(q) {
            atm.accepting(q) && children[u].is_empty()
        } else {
            match atm.states[q].1 {
                Kind::Universal => children[u].len() == 2,
                Kind::Existential => children[u].len() == 1,
            }
        };
        if !ok {
            return Err(HardnessError::Domain(format!(
                "vertex {u} is not part of an accepting configuration tree"
            )));
        }
    }
    let sig = encode_atm(atm, &vec![atm.blank; n], false)?.signature;
    let mut s = Structure::new(2 * tree.vertices.len(), &sig);
    s.domain = (0..tree.vertices.len())
        .flat_map(|v| [format!("0_v{v}"), format!("1_v{v}")])
        .collect();
    for (v, c) in tree.vertices.iter().enumerate() {
        let (a, b) = (zero(v), one(v));
        s.set("V", vec![a, b], true);
        if v == 0 {
            s.set("R", vec![a, b], true);
        }
        s.set(&state_pred(atm, c.state), vec![a, b], true);
        for (cell, &sym) in c.tape.iter().enumerate() {
            let t: Vec<Elem> = bin(n, 0, 1, cell)
                .into_iter()
                .map(|bit| if bit == 1 { b } else { a })
                .collect();
            s.set(&symbol_pred(atm, sym), t.clone(), true);
            if cell == c.head {
                s.set("H", t, true);
            }
        }
        s.set(BIT, vec![b], true);
        for m in [n, 2 * n] {
            for w in words2(a, b, m) {
                let mut t = vec![a, b];
                t.extend(w);
                s.set(&guard_pred(m), t, true);
            }
        }
    }
    for &(u, v, side) in &tree.edges {
        let (a, b, a2, b2) = (zero(u), one(u), zero(v), one(v));
        s.set(&edge_pred(side), vec![b, a, a2, b2], true);
        for left in words2(a, b, n) {
            for right in words2(a2, b2, n) {
                let mut t = left.clone();
                t.extend([b, a, a2, b2]);
                t.extend(right);
                s.set(&dummy_pred(n), t, true);
            }
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjunctCheck {
    pub conjunct: String,
    pub verdict: bool,
    pub millis: u128,
}

/// Model-checks every conjunct against a structure.
pub fn check_conjuncts(enc: &Encoding, s: &Structure) -> Result<Vec<ConjunctCheck>, HardnessError> {
    enc.conjuncts
        .iter()
        .map(|(name, f)| {
            let t = Instant::now();
            let verdict = evaluate(s, f, &[])?;
            Ok(ConjunctCheck {
                conjunct: name.clone(),
                verdict,
                millis: t.elapsed().as_millis(),
            })
        })
        .collect()
}

/// A named mutation of the embedding structure.
#[derive(Debug, Clone)]
pub struct Fault {
    pub name: String,
    pub structure: Structure,
}

/// Deterministic single-tuple mutations, each of which breaks the embedding.
pub fn inject_faults(atm: &Atm, tree: &ConfigTree, n: usize, s: &Structure) -> Vec<Fault> {
    let mut out = Vec::new();
    let mut push = |name: String, edit: &dyn Fn(&mut Structure)| {
        let mut t = s.clone();
        edit(&mut t);
        out.push(Fault { name, structure: t });
    };
    let last = tree.vertices.len() - 1;
    let head_tuple = |v: usize| -> Vec<Elem> {
        bin(n, 0, 1, tree.vertices[v].head)
            .into_iter()
            .map(|bit| if bit == 1 { one(v) } else { zero(v) })
            .collect()
    };
    for v in if last == 0 { vec![0] } else { vec![0, last] } {
        let t = head_tuple(v);
        push(format!("drop H at vertex {v}"), &|m| {
            m.set("H", t.clone(), false)
        });
    }
    push("drop R at the root".into(), &|m| {
        m.set("R", vec![zero(0), one(0)], false)
    });
    push("drop O at the root unit bit".into(), &|m| {
        m.set(BIT, vec![one(0)], false)
    });
    let wrong = (tree.vertices[0].state + 1) % atm.states.len();
    if wrong != tree.vertices[0].state {
        let p = state_pred(atm, wrong);
        push(format!("add {p} at the root"), &|m| {
            m.set(&p, vec![zero(0), one(0)], true)
        });
    }
    let cell = (tree.vertices[last].head + 1) % (1 << n);
    let sym = tree.vertices[last].tape[cell];
    let other = (sym + 1) % atm.alphabet.len();
    if other != sym {
        let t: Vec<Elem> = bin(n, 0, 1, cell)
            .into_iter()
            .map(|bit| if bit == 1 { one(last) } else { zero(last) })
            .collect();
        let (from, to) = (symbol_pred(atm, sym), symbol_pred(atm, other));
        push(format!("rewrite square {cell} of vertex {last}"), &|m| {
            m.set(&from, t.clone(), false);
            m.set(&to, t.clone(), true);
        });
    }
    if let Some(&(u, v, side)) = tree.edges.first() {
        let e = edge_pred(side);
        push(format!("drop {e} from {u} to {v}"), &|m| {
            m.set(&e, vec![one(u), zero(u), zero(v), one(v)], false)
        });
    }
    let g = guard_pred(n);
    let mut gt = vec![zero(last), one(last)];
    gt.extend(std::iter::repeat_n(zero(last), n));
    push(format!("drop a {g} tuple"), &|m| {
        m.set(&g, gt.clone(), false)
    });
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct FaultCheck {
    pub fault: String,
    /// Conjuncts the mutated structure violates.
    pub failing: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub vertices: usize,
    pub domain: usize,
    pub nodes: usize,
    pub size_bound: usize,
    pub unguarded: Vec<String>,
    pub conjuncts: Vec<ConjunctCheck>,
    pub faults: Vec<FaultCheck>,
}

impl VerifyReport {
    /// Every conjunct is guarded, adjacent and true, the size bound holds and
    /// every fault is caught.
    pub fn passed(&self) -> bool {
        self.unguarded.is_empty()
            && self.nodes <= self.size_bound
            && self.conjuncts.iter().all(|c| c.verdict)
            && self.faults.iter().all(|f| !f.failing.is_empty())
    }
}

/// Encodes the machine, checks the embedding of an accepting tree against
/// every conjunct, then re-checks each injected fault.
pub fn verify_encoding(
    atm: &Atm,
    w: &[usize],
    tree: &ConfigTree,
    literal_succ: bool,
) -> Result<VerifyReport, HardnessError> {
    let n = w.len();
    let enc = encode_atm(atm, w, literal_succ)?;
    let s = embed_and_expand(atm, tree, n)?;
    let conjuncts = check_conjuncts(&enc, &s)?;
    let mut faults = Vec::new();
    for fault in inject_faults(atm, tree, n, &s) {
        let failing = check_conjuncts(&enc, &fault.structure)?
            .into_iter()
            .filter(|c| !c.verdict)
            .map(|c| c.conjunct)
            .collect();
        faults.push(FaultCheck {
            fault: fault.name,
            failing,
        });
    }
    Ok(VerifyReport {
        n,
        vertices: tree.vertices.len(),
        domain: s.domain.len(),
        nodes: enc.node_count(),
        size_bound: size_bound(atm, n),
        unguarded: enc.unguarded(),
        conjuncts,
        faults,
    })
}
