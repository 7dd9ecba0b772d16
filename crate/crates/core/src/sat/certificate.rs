use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::syntax::{self, Atom, Formula};
use crate::types::{
    coherent, compatible, relevant_atoms, AdjacentType, AtomTable, Certificate, ConnectorType, Prop,
};
use crate::words;

use super::model::build_model;
use super::{NormalForm, SatError, SatOptions, SatResult, Verdict};

/// Sizes met by the certificate search.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PoolStats {
    pub relevant_atoms: usize,
    /// 2-types satisfying every `δ^f` whose inverse does too.
    pub valid_types: usize,
    /// Compatible connector-types.
    pub pool: usize,
    /// Those surviving the inverse-closure fixpoint.
    pub closed: usize,
    pub certificate_size: Option<usize>,
    pub search_nodes: usize,
    /// The pool was too large to list and the requirement-driven search ran.
    pub lazy: bool,
}

struct Engine {
    atoms: Vec<Atom>,
    swap: Vec<usize>,
    diag: Vec<usize>,
    diag_mask: u64,
    types: Vec<u64>,
    inv: Vec<usize>,
    gammas3: Vec<Prop>,
    delta3: Prop,
    n3: usize,
    eta_slot: Vec<usize>,
    e112: Vec<Prop>,
}

fn internal(e: impl std::fmt::Display) -> SatError {
    SatError::Internal(e.to_string())
}

fn compile_closed(f: &Formula, table: &mut AtomTable) -> Result<Prop, SatError> {
    let before = table.len();
    let p = Prop::compile(f, table)?;
    if table.len() != before {
        return Err(internal(
            "an instance of the normal form mentions an atom outside the relevant set",
        ));
    }
    Ok(p)
}

fn assignment(mask: u64, n: usize) -> Vec<Option<bool>> {
    (0..n).map(|i| Some(mask >> i & 1 == 1)).collect()
}

fn all_models(p: &Prop, n: usize, assign: &mut Vec<Option<bool>>, i: usize, out: &mut Vec<u64>) {
    if p.eval3(assign) == Some(false) {
        return;
    }
    if i == n {
        out.push(
            (0..n)
                .filter(|&j| assign[j] == Some(true))
                .map(|j| 1u64 << j)
                .sum(),
        );
        return;
    }
    for v in [false, true] {
        assign[i] = Some(v);
        all_models(p, n, assign, i + 1, out);
    }
    assign[i] = None;
}

impl Engine {
    fn new(nf: &NormalForm, opts: &SatOptions) -> Result<Engine, SatError> {
        let atoms: Vec<Atom> = relevant_atoms(&nf.to_formula(), 2).into_iter().collect();
        let cap = opts.type_cap.min(63);
        if atoms.len() > cap {
            return Err(SatError::Resource {
                stage: "relevant 2-atoms".into(),
                count: atoms.len(),
                cap,
            });
        }
        let n2 = atoms.len();
        let mut table = AtomTable::new();
        for a in &atoms {
            table.id(a);
        }
        let find = |a: &Atom| {
            atoms
                .iter()
                .position(|b| b == a)
                .ok_or_else(|| internal("relevant atoms are not closed"))
        };
        let mut swap = Vec::with_capacity(n2);
        let mut diag = Vec::with_capacity(n2);
        for a in &atoms {
            swap.push(find(&Atom::new(
                a.pred.clone(),
                a.args.iter().map(|&h| 3 - h).collect(),
            ))?);
            diag.push(find(&Atom::new(a.pred.clone(), vec![1; a.arity()]))?);
        }
        let diag_mask = (0..n2).filter(|&i| diag[i] == i).map(|i| 1u64 << i).sum();

        let mut universal = Vec::new();
        for f in words::adjacent_walks(3, 2) {
            universal.push(compile_closed(
                &syntax::substitute_walk(&nf.delta, &f)?,
                &mut table,
            )?);
        }
        let universal = Prop::And(universal);
        let mut t1 = Vec::new();
        all_models(&universal, n2, &mut vec![None; n2], 0, &mut t1);
        t1.sort_unstable();
        let inv_mask = |m: u64| -> u64 {
            (0..n2)
                .filter(|&i| m >> swap[i] & 1 == 1)
                .map(|i| 1u64 << i)
                .sum()
        };
        let valid: BTreeSet<u64> = t1.iter().copied().collect();
        let types: Vec<u64> = t1
            .into_iter()
            .filter(|&m| valid.contains(&inv_mask(m)))
            .collect();
        let ids: HashMap<u64, usize> = types.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let inv = types.iter().map(|&m| ids[&inv_mask(m)]).collect();

        let e112 = nf
            .gammas
            .iter()
            .map(|g| compile_closed(&syntax::substitute_walk(g, &[1, 1, 2])?, &mut table))
            .collect::<Result<Vec<_>, _>>()?;

        let mut t3 = AtomTable::new();
        for a in &atoms {
            t3.id(a);
        }
        let eta_slot = atoms
            .iter()
            .map(|a| {
                t3.id(&Atom::new(
                    a.pred.clone(),
                    a.args.iter().map(|h| h + 1).collect(),
                ))
            })
            .collect();
        let delta_hat = syntax::hat(&nf.delta, 3)?;
        let delta3 = Prop::compile(&delta_hat, &mut t3)?;
        let gammas3 = nf
            .gammas
            .iter()
            .map(|g| Prop::compile(&Formula::And(vec![g.clone(), delta_hat.clone()]), &mut t3))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Engine {
            atoms,
            swap,
            diag,
            diag_mask,
            types,
            inv,
            gammas3,
            delta3,
            n3: t3.len(),
            eta_slot,
            e112,
        })
    }

    fn square(&self, pi: u64) -> u64 {
        (0..self.atoms.len())
            .filter(|&i| pi >> self.diag[i] & 1 == 1)
            .map(|i| 1u64 << i)
            .sum()
    }

    /// Consistency of `α⁻¹ ∧ η⁺ ∧ δ̂`, with `γ_i` when given.
    fn consistent3(&self, alpha: u64, eta: u64, gamma: Option<usize>) -> bool {
        let mut assign = vec![None; self.n3];
        for i in 0..self.atoms.len() {
            assign[i] = Some(alpha >> self.swap[i] & 1 == 1);
        }
        for i in 0..self.atoms.len() {
            let v = eta >> i & 1 == 1;
            let s = self.eta_slot[i];
            if assign[s].is_some_and(|w| w != v) {
                return false;
            }
            assign[s] = Some(v);
        }
        let p = gamma.map_or(&self.delta3, |g| &self.gammas3[g]);
        p.solve(&mut assign)
    }

    /// Types that pass every test needing no other chosen type: self-consistency,
    /// consistency with their square, a witness for each `γ_i` in some
    /// extension, and the same for their inverse.
    fn viable(&self) -> Vec<bool> {
        let n = self.types.len();
        let ids: HashMap<u64, usize> = self
            .types
            .iter()
            .enumerate()
            .map(|(i, &m)| (m, i))
            .collect();
        let sq: Vec<Option<usize>> = self
            .types
            .iter()
            .map(|&m| ids.get(&self.square(m & self.diag_mask)).copied())
            .collect();
        let mut ok: Vec<bool> = (0..n)
            .map(|t| {
                let m = self.types[t];
                let Some(s) = sq[t] else { return false };
                let s = self.types[s];
                self.consistent3(m, m, None)
                    && self.consistent3(m, s, None)
                    && self.consistent3(s, m, None)
                    && (0..self.gammas3.len()).all(|i| self.open_witness(m, i))
            })
            .collect();
        loop {
            let next: Vec<bool> = (0..n)
                .map(|t| ok[t] && ok[self.inv[t]] && sq[t].is_some_and(|s| ok[s]))
                .collect();
            if next == ok {
                return ok;
            }
            ok = next;
        }
    }

    fn open_witness(&self, alpha: u64, g: usize) -> bool {
        let mut assign = vec![None; self.n3];
        for i in 0..self.atoms.len() {
            assign[i] = Some(alpha >> self.swap[i] & 1 == 1);
        }
        self.gammas3[g].solve(&mut assign)
    }

    fn to_type(&self, mask: u64) -> AdjacentType {
        AdjacentType {
            k: 2,
            truth: self
                .atoms
                .iter()
                .enumerate()
                .map(|(i, a)| (a.clone(), mask >> i & 1 == 1))
                .collect(),
        }
    }
}

/// The compatible connector-types of one 1-type, as sorted global type ids.
struct Group {
    ids: Vec<usize>,
    r: Vec<Vec<bool>>,
    w: Vec<Vec<Vec<bool>>>,
    e: Vec<Vec<bool>>,
}

impl Group {
    fn witnessed(&self, a: usize, avail: &[usize]) -> bool {
        (0..self.w.len()).all(|i| avail.iter().any(|&b| self.w[i][a][b]))
    }

    fn enumerate(
        &self,
        sq: usize,
        cand: &[usize],
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> Result<(), SatError> {
        let mut chosen = vec![sq];
        self.rec(0, cand, &mut chosen, out, cap)
    }

    fn rec(
        &self,
        idx: usize,
        cand: &[usize],
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> Result<(), SatError> {
        let avail: Vec<usize> = chosen.iter().chain(&cand[idx..]).copied().collect();
        if !chosen.iter().all(|&a| self.witnessed(a, &avail)) {
            return Ok(());
        }
        if !(0..self.e.len()).all(|i| avail.iter().any(|&b| self.e[i][b])) {
            return Ok(());
        }
        if idx == cand.len() {
            let mut members: Vec<usize> = chosen.iter().map(|&a| self.ids[a]).collect();
            members.sort_unstable();
            out.push(members);
            if out.len() > cap {
                return Err(SatError::Resource {
                    stage: "connector-type pool".into(),
                    count: out.len(),
                    cap,
                });
            }
            return Ok(());
        }
        let c = cand[idx];
        if chosen.iter().all(|&x| self.r[c][x] && self.r[x][c]) {
            chosen.push(c);
            self.rec(idx + 1, cand, chosen, out, cap)?;
            chosen.pop();
        }
        self.rec(idx + 1, cand, chosen, out, cap)
    }
}

impl Engine {
    fn pool(
        &self,
        groups: &BTreeMap<u64, Vec<usize>>,
        cap: usize,
    ) -> Result<Vec<Vec<usize>>, SatError> {
        let mut out = Vec::new();
        for (&pi, ids) in groups {
            let sq_mask = self.square(pi);
            let ids = ids.clone();
            let Some(sq) = ids.iter().position(|&t| self.types[t] == sq_mask) else {
                continue;
            };
            let masks: Vec<u64> = ids.iter().map(|&t| self.types[t]).collect();
            let s = ids.len();
            let r: Vec<Vec<bool>> = (0..s)
                .map(|a| {
                    (0..s)
                        .map(|b| self.consistent3(masks[a], masks[b], None))
                        .collect()
                })
                .collect();
            let w: Vec<Vec<Vec<bool>>> = (0..self.gammas3.len())
                .map(|i| {
                    (0..s)
                        .map(|a| {
                            (0..s)
                                .map(|b| self.consistent3(masks[a], masks[b], Some(i)))
                                .collect()
                        })
                        .collect()
                })
                .collect();
            let e: Vec<Vec<bool>> = self
                .e112
                .iter()
                .map(|p| {
                    masks
                        .iter()
                        .map(|&m| p.eval3(&assignment(m, self.atoms.len())) == Some(true))
                        .collect()
                })
                .collect();
            let g = Group { ids, r, w, e };
            let mut cand: Vec<usize> = (0..s)
                .filter(|&a| g.r[a][a] && g.r[a][sq] && g.r[sq][a])
                .collect();
            loop {
                let keep: Vec<usize> = cand
                    .iter()
                    .copied()
                    .filter(|&a| g.witnessed(a, &cand))
                    .collect();
                if keep.len() == cand.len() {
                    break;
                }
                cand = keep;
            }
            if !cand.contains(&sq) {
                continue;
            }
            let rest: Vec<usize> = cand.into_iter().filter(|&a| a != sq).collect();
            g.enumerate(sq, &rest, &mut out, cap)?;
        }
        out.sort();
        Ok(out)
    }
}

/// Removes connector-types containing a type whose inverse no survivor contains.
fn inverse_closure(pool: &[Vec<usize>], inv: &[usize], ntypes: usize) -> Vec<bool> {
    let mut alive = vec![true; pool.len()];
    let mut count = vec![0usize; ntypes];
    let mut containing = vec![Vec::new(); ntypes];
    for (p, members) in pool.iter().enumerate() {
        for &t in members {
            count[t] += 1;
            containing[t].push(p);
        }
    }
    let mut work: Vec<usize> = (0..pool.len()).collect();
    while let Some(p) = work.pop() {
        if !alive[p] || pool[p].iter().all(|&t| count[inv[t]] > 0) {
            continue;
        }
        alive[p] = false;
        for &t in &pool[p] {
            count[t] -= 1;
            if count[t] == 0 {
                for &q in &containing[inv[t]] {
                    if alive[q] {
                        work.push(q);
                    }
                }
            }
        }
    }
    alive
}

struct Search<'a> {
    pool: &'a [Vec<usize>],
    closed: Vec<usize>,
    inv: &'a [usize],
    nodes: usize,
    budget: usize,
    cut: bool,
}

impl Search<'_> {
    fn linked(&self, a: usize, b: usize) -> bool {
        let (x, y) = (&self.pool[a], &self.pool[b]);
        x.iter().any(|&t| y.binary_search(&self.inv[t]).is_ok())
            && y.iter().any(|&t| x.binary_search(&self.inv[t]).is_ok())
    }

    fn unmet(&self, chosen: &[usize]) -> Option<usize> {
        let mut need = BTreeSet::new();
        for &c in chosen {
            for &t in &self.pool[c] {
                need.insert(self.inv[t]);
            }
        }
        need.into_iter().find(|t| {
            !chosen
                .iter()
                .any(|&c| self.pool[c].binary_search(t).is_ok())
        })
    }

    fn dfs(&mut self, chosen: &mut Vec<usize>, limit: usize) -> Result<bool, SatError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(SatError::Resource {
                stage: "certificate search nodes".into(),
                count: self.nodes,
                cap: self.budget,
            });
        }
        let Some(t) = self.unmet(chosen) else {
            return Ok(true);
        };
        if chosen.len() == limit {
            self.cut = true;
            return Ok(false);
        }
        for i in 0..self.closed.len() {
            let c = self.closed[i];
            if chosen.contains(&c) || self.pool[c].binary_search(&t).is_err() {
                continue;
            }
            if !chosen.iter().all(|&x| self.linked(x, c)) {
                continue;
            }
            chosen.push(c);
            if self.dfs(chosen, limit)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }

    fn run(&mut self) -> Result<Option<Vec<usize>>, SatError> {
        for limit in 1..=self.closed.len() {
            self.cut = false;
            for i in 0..self.closed.len() {
                let mut chosen = vec![self.closed[i]];
                if self.dfs(&mut chosen, limit)? {
                    return Ok(Some(chosen));
                }
            }
            if !self.cut {
                break;
            }
        }
        Ok(None)
    }
}

/// Requirement-driven search used when the pool is too large to list. It
/// only ever reports certificates; exhausting it proves nothing.
struct Lazy<'a> {
    eng: &'a Engine,
    classes: BTreeMap<u64, Vec<usize>>,
    memo: RefCell<HashMap<(usize, usize, Option<usize>), bool>>,
    steps: usize,
    budget: usize,
    branch: usize,
}

enum Need {
    Link(usize),
    Example(usize),
    Witness(usize, usize),
}

impl Lazy<'_> {
    fn check(&self, a: usize, b: usize, g: Option<usize>) -> bool {
        if let Some(&v) = self.memo.borrow().get(&(a, b, g)) {
            return v;
        }
        let v = self
            .eng
            .consistent3(self.eng.types[a], self.eng.types[b], g);
        self.memo.borrow_mut().insert((a, b, g), v);
        v
    }

    fn fits(&self, b: usize, set: &[usize]) -> bool {
        self.check(b, b, None)
            && set
                .iter()
                .all(|&x| self.check(b, x, None) && self.check(x, b, None))
    }

    fn example(&self, i: usize, t: usize) -> bool {
        self.eng.e112[i].eval3(&assignment(self.eng.types[t], self.eng.atoms.len())) == Some(true)
    }

    fn tick(&mut self) -> Result<(), SatError> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(SatError::Resource {
                stage: "certificate search nodes".into(),
                count: self.steps,
                cap: self.budget,
            });
        }
        Ok(())
    }

    fn need(&self, set: &[usize], omegas: &[Vec<usize>]) -> Option<Need> {
        let inv = &self.eng.inv;
        if let Some(o) = (0..omegas.len()).find(|&o| {
            !set.iter()
                .any(|&z| omegas[o].binary_search(&inv[z]).is_ok())
        }) {
            return Some(Need::Link(o));
        }
        if let Some(i) =
            (0..self.eng.e112.len()).find(|&i| !set.iter().any(|&b| self.example(i, b)))
        {
            return Some(Need::Example(i));
        }
        for &a in set {
            for i in 0..self.eng.gammas3.len() {
                if !set.iter().any(|&b| self.check(a, b, Some(i))) {
                    return Some(Need::Witness(a, i));
                }
            }
        }
        None
    }

    /// Compatible connector-types containing `t`, linked to every member of `omegas`.
    fn generate(&mut self, t: usize, omegas: &[Vec<usize>]) -> Result<Vec<Vec<usize>>, SatError> {
        let pi = self.eng.types[t] & self.eng.diag_mask;
        let sq_mask = self.eng.square(pi);
        let Some(&sq) = self.classes[&pi]
            .iter()
            .find(|&&x| self.eng.types[x] == sq_mask)
        else {
            return Ok(Vec::new());
        };
        let mut set = vec![sq];
        if t != sq {
            if !self.fits(t, &set) {
                return Ok(Vec::new());
            }
            set.push(t);
        } else if !self.fits(sq, &[]) {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        self.grow(pi, &mut set, omegas, &mut out)?;
        Ok(out)
    }

    fn grow(
        &mut self,
        pi: u64,
        set: &mut Vec<usize>,
        omegas: &[Vec<usize>],
        out: &mut Vec<Vec<usize>>,
    ) -> Result<(), SatError> {
        self.tick()?;
        let Some(need) = self.need(set, omegas) else {
            let mut done = set.clone();
            done.sort_unstable();
            if !out.contains(&done) {
                out.push(done);
            }
            return Ok(());
        };
        let class = self.classes[&pi].clone();
        for b in class {
            if out.len() >= self.branch {
                break;
            }
            if set.contains(&b) {
                continue;
            }
            let meets = match need {
                Need::Link(o) => omegas[o].binary_search(&self.eng.inv[b]).is_ok(),
                Need::Example(i) => self.example(i, b),
                Need::Witness(a, i) => self.check(a, b, Some(i)),
            };
            if meets && self.fits(b, set) {
                set.push(b);
                self.grow(pi, set, omegas, out)?;
                set.pop();
            }
        }
        Ok(())
    }

    fn dfs(&mut self, omegas: &mut Vec<Vec<usize>>) -> Result<bool, SatError> {
        self.tick()?;
        let inv = &self.eng.inv;
        let unmet = omegas
            .iter()
            .flatten()
            .map(|&t| inv[t])
            .filter(|t| !omegas.iter().any(|w| w.binary_search(t).is_ok()))
            .min();
        let Some(t) = unmet else { return Ok(true) };
        for w in self.generate(t, omegas)? {
            omegas.push(w);
            if self.dfs(omegas)? {
                return Ok(true);
            }
            omegas.pop();
        }
        Ok(false)
    }

    fn run(&mut self) -> Result<Option<Vec<Vec<usize>>>, SatError> {
        let roots: Vec<usize> = self
            .classes
            .keys()
            .filter_map(|&pi| {
                let sq = self.eng.square(pi);
                self.classes[&pi]
                    .iter()
                    .copied()
                    .find(|&x| self.eng.types[x] == sq)
            })
            .collect();
        for r in roots {
            for w in self.generate(r, &[])? {
                let mut omegas = vec![w];
                if self.dfs(&mut omegas)? {
                    return Ok(Some(omegas));
                }
            }
        }
        Ok(None)
    }
}

/// Largest 1-type class whose pairwise consistency is tabulated in full.
const CLASS_LIMIT: usize = 256;

/// Searches for a certificate of a three-variable normal form.
pub fn find_certificate(
    nf: &NormalForm,
    opts: &SatOptions,
) -> Result<(Option<Certificate>, PoolStats), SatError> {
    if nf.ell != 2 {
        return Err(SatError::Domain(format!(
            "expected a three-variable normal form, got {} variables",
            nf.ell + 1
        )));
    }
    let eng = Engine::new(nf, opts)?;
    let mut stats = PoolStats {
        relevant_atoms: eng.atoms.len(),
        valid_types: eng.types.len(),
        ..PoolStats::default()
    };
    let viable = eng.viable();
    let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (t, &m) in eng.types.iter().enumerate() {
        if viable[t] {
            classes.entry(m & eng.diag_mask).or_default().push(t);
        }
    }
    let largest = classes.values().map(Vec::len).max().unwrap_or(0);
    let pool = if largest <= CLASS_LIMIT {
        match eng.pool(&classes, opts.pool_cap) {
            Ok(p) => Some(p),
            Err(e) if e.is_resource() => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let found: Option<Vec<Vec<usize>>> = match pool {
        Some(pool) => {
            stats.pool = pool.len();
            let alive = inverse_closure(&pool, &eng.inv, eng.types.len());
            let closed: Vec<usize> = (0..pool.len()).filter(|&p| alive[p]).collect();
            stats.closed = closed.len();
            let mut search = Search {
                pool: &pool,
                closed,
                inv: &eng.inv,
                nodes: 0,
                budget: opts.search_budget,
                cut: false,
            };
            let found = search.run()?;
            stats.search_nodes = search.nodes;
            found.map(|mut c| {
                c.sort_unstable();
                c.into_iter().map(|p| pool[p].clone()).collect()
            })
        }
        None => {
            stats.lazy = true;
            let mut lazy = Lazy {
                eng: &eng,
                classes,
                memo: RefCell::new(HashMap::new()),
                steps: 0,
                budget: opts.search_budget,
                branch: 4,
            };
            let found = lazy.run()?;
            stats.search_nodes = lazy.steps;
            match found {
                Some(f) => Some(f),
                None => return Err(SatError::Resource {
                    stage:
                        "connector-type pool (listing skipped, bounded search found no certificate)"
                            .into(),
                    count: largest,
                    cap: CLASS_LIMIT,
                }),
            }
        }
    };
    let Some(chosen) = found else {
        return Ok((None, stats));
    };
    let atoms: BTreeSet<Atom> = eng.atoms.iter().cloned().collect();
    let mut members = chosen
        .iter()
        .map(|w| {
            ConnectorType::new(
                w.iter().map(|&t| eng.to_type(eng.types[t])).collect(),
                &atoms,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    shrink(&mut members, nf, &atoms)?;
    stats.certificate_size = Some(members.len());
    Ok((Some(Certificate { members }), stats))
}

/// Drops connector-types, then single 2-types, while the certificate stays
/// valid. Smaller certificates give smaller models.
fn shrink(
    members: &mut Vec<ConnectorType>,
    nf: &NormalForm,
    atoms: &BTreeSet<Atom>,
) -> Result<(), SatError> {
    let mut changed = true;
    while changed {
        changed = false;
        for i in (0..members.len()).rev() {
            if members.len() > 1 {
                let mut fewer = members.clone();
                fewer.remove(i);
                if coherent(&fewer) {
                    *members = fewer;
                    changed = true;
                }
            }
        }
        for i in 0..members.len() {
            let types: Vec<AdjacentType> = members[i].members.iter().cloned().collect();
            for z in types {
                let mut rest = members[i].members.clone();
                rest.remove(&z);
                let Ok(w) = ConnectorType::new(rest, atoms) else {
                    continue;
                };
                let mut trial = members.clone();
                trial[i] = w;
                if coherent(&trial) && compatible(&trial[i], nf)? {
                    *members = trial;
                    changed = true;
                }
            }
        }
    }
    Ok(())
}

/// Certificate search and, on SAT, model construction without verification.
pub(crate) fn decide_core(nf: &NormalForm, opts: &SatOptions) -> Result<SatResult, SatError> {
    let (cert, stats) = find_certificate(nf, opts)?;
    let mut trace = vec![
        format!("relevant 2-atoms: {}", stats.relevant_atoms),
        format!(
            "2-types satisfying the universal part: {}",
            stats.valid_types
        ),
    ];
    if stats.lazy {
        trace.push("connector-type pool too large to list; requirement-driven search".into());
    } else {
        trace.push(format!("compatible connector-types: {}", stats.pool));
        trace.push(format!("after inverse closure: {}", stats.closed));
    }
    trace.push(format!("search nodes: {}", stats.search_nodes));
    let Some(cert) = cert else {
        trace.push("no certificate".into());
        return Ok(SatResult {
            verdict: Verdict::Unsat,
            certificate: None,
            model: None,
            trace,
        });
    };
    trace.push(format!(
        "certificate with {} connector-types",
        cert.members.len()
    ));
    let model = if opts.build_model {
        match build_model(&cert, nf, &opts.model) {
            Ok(m) => {
                trace.push(format!("model with {} elements", m.size()));
                Some(m)
            }
            Err(e) if e.is_resource() => {
                trace.push(format!("model not built: {e}"));
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(SatResult {
        verdict: Verdict::Sat,
        certificate: Some(cert),
        model,
        trace,
    })
}

/// Decides a three-variable normal form and, on SAT, builds a model and
/// checks it against the normal form.
pub fn decide_af3(nf: &NormalForm, opts: &SatOptions) -> Result<SatResult, SatError> {
    let mut result = decide_core(nf, opts)?;
    if let Some(m) = &result.model {
        if !crate::semantics::evaluate(m, &nf.to_formula(), &[])? {
            return Err(SatError::Internal(
                "the certificate model does not satisfy the normal form".into(),
            ));
        }
        result.trace.push("model verified".into());
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::normalize;
    use crate::syntax::parse;

    fn nf(s: &str) -> NormalForm {
        normalize(&parse(s).unwrap()).unwrap()
    }

    #[test]
    fn certificates_validate() {
        let opts = SatOptions {
            build_model: false,
            ..SatOptions::default()
        };
        for s in [
            "(forall x1 forall x2 exists x3 r(x2,x3)) & forall x1 forall x2 forall x3 (r(x1,x2) -> !r(x2,x1))",
            "forall x1 forall x2 exists x3 (p(x2) <-> !p(x3))",
            "forall x1 forall x2 exists x3 s(x1,x2,x3)",
        ] {
            let f = nf(s);
            let (cert, _) = find_certificate(&f, &opts).unwrap();
            let cert = cert.unwrap();
            assert!(cert.validate(&f).unwrap(), "{s}");
        }
    }

    #[test]
    fn unsat_without_certificate() {
        let f = nf(
            "(forall x1 forall x2 exists x3 r(x2,x3)) & forall x1 forall x2 forall x3 !r(x1,x2)",
        );
        let (cert, stats) = find_certificate(&f, &SatOptions::default()).unwrap();
        assert!(cert.is_none());
        assert_eq!(stats.certificate_size, None);
    }
}
