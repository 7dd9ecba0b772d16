use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;

use crate::semantics::{Elem, Interpretation, SemanticsError, Structure};
use crate::syntax::{self, Atom, Formula};
use crate::types::{one_type_squared, relevant_atoms, solve_with, AdjacentType, Certificate};
use crate::words::{self, ChoiceFunction, ChoiceTable, FreshChoice};

use super::{NormalForm, SatError};

/// Which fresh-choice function indexes the last component of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChoiceMode {
    /// The closed-form function on `z^{k+1}` points.
    ClosedForm,
    /// The smallest tabulated function with the same two properties.
    Reduced,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelParams {
    pub choice: ChoiceMode,
    pub max_elements: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            choice: ChoiceMode::Reduced,
            max_elements: 400,
        }
    }
}

fn reduced_choice() -> &'static ChoiceTable {
    static TABLE: OnceLock<ChoiceTable> = OnceLock::new();
    TABLE.get_or_init(|| ChoiceTable::search(2, 16).expect("a choice table exists below 16 points"))
}

enum Choice {
    ClosedForm(FreshChoice),
    Reduced(&'static ChoiceTable),
}

impl Choice {
    fn size(&self) -> usize {
        match self {
            Choice::ClosedForm(c) => ChoiceFunction::size(c),
            Choice::Reduced(t) => t.size(),
        }
    }

    fn choose(&self, a: usize, b: usize) -> usize {
        match self {
            Choice::ClosedForm(c) => c.choose(&[a, b]),
            Choice::Reduced(t) => t.choose(&[a, b]),
        }
    }
}

type AtomIndex = HashMap<String, HashMap<u64, usize>>;

/// A word over `{1, 2, 3}` as base-4 digits.
fn word_code(word: impl IntoIterator<Item = usize>) -> u64 {
    word.into_iter().fold(0, |acc, h| acc * 4 + h as u64)
}

fn index(atoms: &[Atom]) -> AtomIndex {
    let mut out: AtomIndex = HashMap::new();
    for (i, a) in atoms.iter().enumerate() {
        out.entry(a.pred.clone())
            .or_default()
            .insert(word_code(a.args.iter().copied()), i);
    }
    out
}

/// A model given by 2-types of pairs and adjacent 3-types of primitive
/// triples; atoms are answered through primitive generators.
#[derive(Debug, Clone)]
pub struct CertificateModel {
    n: usize,
    names: Vec<String>,
    signature: BTreeMap<String, usize>,
    atoms2: Vec<Atom>,
    idx2: AtomIndex,
    types2: Vec<Vec<bool>>,
    two: Vec<u32>,
    atoms3: Vec<Atom>,
    idx3: AtomIndex,
    thetas: Vec<Vec<bool>>,
    /// `γ`-index coordinate of each element.
    icoord: Vec<u32>,
    ni: usize,
    /// Witness element and its 3-type for each pair and `γ`-index.
    witness: Vec<(u32, u32)>,
    /// 3-type by `(tp[x,y], tp[y,z])` for triples without a witness role.
    default: Vec<u32>,
    ntypes: usize,
}

const UNSET: u32 = u32::MAX;

/// The primitive generator of a tuple of primitive length at most 3, with
/// the code of the word that recovers the tuple from it, and for triples the
/// code of the reversed word.
#[derive(Debug, PartialEq, Eq)]
enum Generator {
    Pair(Elem, Elem, u64),
    Triple([Elem; 3], u64, u64),
    Longer,
}

fn generator(tuple: &[Elem]) -> Generator {
    let mut distinct = [0 as Elem; 3];
    let mut count = 0;
    for &e in tuple {
        if !distinct[..count].contains(&e) {
            if count == 3 {
                return Generator::Longer;
            }
            distinct[count] = e;
            count += 1;
        }
    }
    match count {
        0 => Generator::Pair(0, 0, 0),
        1 => Generator::Pair(distinct[0], distinct[0], word_code(tuple.iter().map(|_| 1))),
        2 => Generator::Pair(
            distinct[0],
            distinct[1],
            word_code(tuple.iter().map(|&e| if e == distinct[0] { 1 } else { 2 })),
        ),
        _ => {
            let mut adj = [[false; 3]; 3];
            let pos = |e: Elem| distinct.iter().position(|&d| d == e).expect("listed");
            for w in tuple.windows(2) {
                let (a, b) = (pos(w[0]), pos(w[1]));
                adj[a][b] = true;
                adj[b][a] = true;
            }
            let Some(m) = (0..3).find(|&m| (0..3).all(|o| o == m || adj[m][o])) else {
                return Generator::Longer;
            };
            let (e0, e1) = ((m + 1) % 3, (m + 2) % 3);
            if adj[e0][e1] {
                return Generator::Longer;
            }
            let (x, z) = (
                distinct[e0].min(distinct[e1]),
                distinct[e0].max(distinct[e1]),
            );
            let y = distinct[m];
            let digit = |e: Elem| {
                if e == x {
                    1
                } else if e == y {
                    2
                } else {
                    3
                }
            };
            Generator::Triple(
                [x, y, z],
                word_code(tuple.iter().map(|&e| digit(e))),
                word_code(tuple.iter().map(|&e| 4 - digit(e))),
            )
        }
    }
}

impl CertificateModel {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    fn theta_of(&self, t: [Elem; 3]) -> Result<(u32, bool), SemanticsError> {
        let (x, y, z) = (t[0] as usize, t[1] as usize, t[2] as usize);
        let (n, ni) = (self.n, self.ni);
        let (w, th) = self.witness[(x * n + y) * ni + self.icoord[z] as usize];
        if w as usize == z {
            return Ok((th, false));
        }
        let (w, th) = self.witness[(z * n + y) * ni + self.icoord[x] as usize];
        if w as usize == x {
            return Ok((th, true));
        }
        let key = self.two[x * n + y] as usize * self.ntypes + self.two[y * n + z] as usize;
        match self.default[key] {
            UNSET => Err(SemanticsError::Domain(format!(
                "no adjacent type for the triple {t:?}"
            ))),
            th => Ok((th, false)),
        }
    }

    /// Materializes every relation.
    pub fn to_structure(&self) -> Structure {
        let mut s = Structure::new(self.n, &self.signature);
        s.domain = self.names.clone();
        for x in 0..self.n {
            for y in 0..self.n {
                let ty = &self.types2[self.two[x * self.n + y] as usize];
                for (i, a) in self.atoms2.iter().enumerate() {
                    if ty[i] && (x != y || a.args.iter().all(|&h| h == 1)) {
                        let pair = [x as Elem, y as Elem];
                        s.set(&a.pred, a.args.iter().map(|&h| pair[h - 1]).collect(), true);
                    }
                }
            }
        }
        for x in 0..self.n as Elem {
            for y in 0..self.n as Elem {
                for z in x + 1..self.n as Elem {
                    if y == x || y == z {
                        continue;
                    }
                    let t = [x, y, z];
                    let Ok((th, rev)) = self.theta_of(t) else {
                        continue;
                    };
                    for (i, a) in self.atoms3.iter().enumerate() {
                        if self.thetas[th as usize][i] {
                            let tuple = a
                                .args
                                .iter()
                                .map(|&h| t[if rev { 3 - h } else { h - 1 }])
                                .collect();
                            s.set(&a.pred, tuple, true);
                        }
                    }
                }
            }
        }
        s
    }
}

impl Interpretation for CertificateModel {
    fn size(&self) -> usize {
        self.n
    }

    fn holds(&self, pred: &str, tuple: &[Elem]) -> Result<bool, SemanticsError> {
        let &arity = self
            .signature
            .get(pred)
            .ok_or_else(|| SemanticsError::Uninterpreted(pred.to_string()))?;
        if arity != tuple.len() {
            return Err(SemanticsError::Arity {
                pred: pred.to_string(),
                expected: arity,
                got: tuple.len(),
            });
        }
        if let Some(&e) = tuple.iter().find(|&&e| e as usize >= self.n) {
            return Err(SemanticsError::Domain(format!(
                "element {e} is not in the domain"
            )));
        }
        Ok(match generator(tuple) {
            Generator::Pair(x, y, code) => {
                let ty = self.two[x as usize * self.n + y as usize] as usize;
                match self.idx2.get(pred).and_then(|m| m.get(&code)) {
                    Some(&i) => self.types2[ty][i],
                    None => false,
                }
            }
            Generator::Triple(t, code, rev_code) => {
                let (th, rev) = self.theta_of(t)?;
                match self
                    .idx3
                    .get(pred)
                    .and_then(|m| m.get(if rev { &rev_code } else { &code }))
                {
                    Some(&i) => self.thetas[th as usize][i],
                    None => false,
                }
            }
            Generator::Longer => false,
        })
    }
}

struct Builder<'a> {
    types: &'a [AdjacentType],
    atoms3: &'a [Atom],
    delta_hat: Formula,
    gammas: &'a [Formula],
    thetas: Vec<Vec<bool>>,
    cache: HashMap<(usize, usize, Option<usize>), Option<u32>>,
}

impl Builder<'_> {
    /// An adjacent 3-type entailing `ζ ∧ η⁺ ∧ δ̂`, and `γ_i` when given.
    fn theta(
        &mut self,
        zeta: usize,
        eta: usize,
        gamma: Option<usize>,
    ) -> Result<Option<u32>, SatError> {
        if let Some(&r) = self.cache.get(&(zeta, eta, gamma)) {
            return Ok(r);
        }
        let mut parts = vec![
            self.types[zeta].to_formula(),
            self.types[eta].shifted().to_formula(),
            self.delta_hat.clone(),
        ];
        if let Some(i) = gamma {
            parts.push(self.gammas[i].clone());
        }
        let r = match solve_with(&Formula::And(parts), &BTreeMap::new())? {
            Some(sol) => {
                self.thetas.push(
                    self.atoms3
                        .iter()
                        .map(|a| sol.get(a).copied().unwrap_or(false))
                        .collect(),
                );
                Some(self.thetas.len() as u32 - 1)
            }
            None => None,
        };
        self.cache.insert((zeta, eta, gamma), r);
        Ok(r)
    }
}

/// Builds a model of a three-variable normal form from a certificate over
/// the domain `Ω × T × {0,1,2} × I × J`.
pub fn build_model(
    cert: &Certificate,
    nf: &NormalForm,
    params: &ModelParams,
) -> Result<CertificateModel, SatError> {
    if nf.ell != 2 {
        return Err(SatError::Domain(
            "models are built for three-variable normal forms".into(),
        ));
    }
    let omegas = &cert.members;
    if omegas.is_empty() {
        return Err(SatError::Domain("empty certificate".into()));
    }
    let types: Vec<AdjacentType> = omegas
        .iter()
        .flat_map(|w| w.members.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let tid: HashMap<&AdjacentType, usize> =
        types.iter().enumerate().map(|(i, t)| (t, i)).collect();
    let inv: Vec<usize> = types
        .iter()
        .map(|t| {
            tid.get(&t.inverse()).copied().ok_or_else(|| {
                SatError::Internal("certificate is not closed under inverses".into())
            })
        })
        .collect::<Result<_, _>>()?;
    let member: Vec<Vec<usize>> = omegas
        .iter()
        .map(|w| w.members.iter().map(|t| tid[t]).collect())
        .collect();
    let atoms2: BTreeSet<Atom> = types[0].truth.keys().cloned().collect();
    let square: Vec<usize> = omegas
        .iter()
        .map(|w| Ok(tid[&one_type_squared(&w.one_type, &atoms2)?]))
        .collect::<Result<_, SatError>>()?;
    let home: Vec<usize> = (0..types.len())
        .map(|t| {
            (0..omegas.len())
                .find(|&o| member[o].contains(&inv[t]))
                .ok_or_else(|| {
                    SatError::Internal(
                        "certificate violates the existential coherence condition".into(),
                    )
                })
        })
        .collect::<Result<_, _>>()?;
    let mut link = vec![vec![0usize; omegas.len()]; omegas.len()];
    for o in 0..omegas.len() {
        for o2 in 0..omegas.len() {
            link[o][o2] = *member[o]
                .iter()
                .find(|&&t| member[o2].contains(&inv[t]))
                .ok_or_else(|| {
                    SatError::Internal(
                        "certificate violates the universal coherence condition".into(),
                    )
                })?;
        }
    }

    let choice = match params.choice {
        ChoiceMode::ClosedForm => Choice::ClosedForm(FreshChoice::new(2)),
        ChoiceMode::Reduced => Choice::Reduced(reduced_choice()),
    };
    let (no, nt, ni, nj) = (
        omegas.len(),
        types.len(),
        nf.gammas.len().max(1),
        choice.size(),
    );
    let n = no * nt * 3 * ni * nj;
    if n > params.max_elements {
        return Err(SatError::Resource {
            stage: "model elements".into(),
            count: n,
            cap: params.max_elements,
        });
    }
    let enc = |o: usize, t: usize, h: usize, i: usize, j: usize| {
        (((o * nt + t) * 3 + h) * ni + i) * nj + j
    };
    let mut coords = Vec::with_capacity(n);
    let mut names = Vec::with_capacity(n);
    for o in 0..no {
        for t in 0..nt {
            for h in 0..3 {
                for i in 0..ni {
                    for j in 0..nj {
                        coords.push((o, t, h, i, j));
                        names.push(format!("w{o}.t{t}.h{h}.i{i}.j{j}"));
                    }
                }
            }
        }
    }

    let mut two = vec![UNSET; n * n];
    let set_pair = |two: &mut Vec<u32>, a: usize, b: usize, t: usize| -> Result<(), SatError> {
        let (ab, ba) = (two[a * n + b], two[b * n + a]);
        if (ab != UNSET && ab as usize != t) || (ba != UNSET && ba as usize != inv[t]) {
            return Err(SatError::Internal(format!(
                "clashing 2-types for {} and {}",
                a, b
            )));
        }
        two[a * n + b] = t as u32;
        two[b * n + a] = inv[t] as u32;
        Ok(())
    };
    for (a, &(o, ..)) in coords.iter().enumerate() {
        two[a * n + a] = square[o] as u32;
    }
    for (a, &(o, _, h, _, _)) in coords.iter().enumerate() {
        for &eta in &member[o] {
            for i2 in 0..ni {
                for j2 in 0..nj {
                    set_pair(&mut two, a, enc(home[eta], eta, (h + 1) % 3, i2, j2), eta)?;
                }
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if two[a * n + b] == UNSET {
                set_pair(&mut two, a, b, link[coords[a].0][coords[b].0])?;
            }
        }
    }

    let atoms3: Vec<Atom> = relevant_atoms(&nf.to_formula(), 3)
        .into_iter()
        .filter(|a| words::is_surjective(&a.args, 3))
        .collect();
    let mut b = Builder {
        types: &types,
        atoms3: &atoms3,
        delta_hat: syntax::hat(&nf.delta, 3)?,
        gammas: &nf.gammas,
        thetas: Vec::new(),
        cache: HashMap::new(),
    };
    let mut witness = vec![(UNSET, UNSET); n * n * ni];
    let mut pick: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for a in 0..n {
        for a2 in 0..n {
            if a == a2 {
                continue;
            }
            let zeta = two[a * n + a2] as usize;
            let (o2, _, h2, _, j2) = coords[a2];
            let j = coords[a].4;
            for i in 0..nf.gammas.len() {
                let eta = match pick.get(&(zeta, o2, i)) {
                    Some(&e) => e,
                    None => {
                        let mut found = None;
                        for &e in &member[o2] {
                            if b.theta(zeta, e, Some(i))?.is_some() {
                                found = Some(e);
                                break;
                            }
                        }
                        let e = found.ok_or_else(|| {
                            SatError::Internal("no witness type for a pair".into())
                        })?;
                        pick.insert((zeta, o2, i), e);
                        e
                    }
                };
                let th = b.theta(zeta, eta, Some(i))?.expect("cached as consistent");
                let w = enc(home[eta], eta, (h2 + 1) % 3, i, choice.choose(j, j2));
                if two[a2 * n + w] as usize != eta {
                    return Err(SatError::Internal(
                        "witness element has the wrong 2-type".into(),
                    ));
                }
                if w == a || w == a2 || witness[(w * n + a2) * ni + coords[a].3].0 as usize == a {
                    return Err(SatError::Internal(format!(
                        "triple ({a}, {a2}, {w}) assigned twice"
                    )));
                }
                witness[(a * n + a2) * ni + i] = (w as u32, th);
            }
        }
    }
    let mut default = vec![UNSET; types.len() * types.len()];
    for zeta in 0..types.len() {
        for eta in 0..types.len() {
            if types[zeta].inverse().one_type() != types[eta].one_type() {
                continue;
            }
            if let Some(th) = b.theta(zeta, eta, None)? {
                default[zeta * types.len() + eta] = th;
            }
        }
    }
    let thetas = b.thetas;
    let signature = nf.to_formula().signature();
    let atoms2: Vec<Atom> = atoms2.into_iter().collect();
    let types2 = types
        .iter()
        .map(|t| atoms2.iter().map(|a| t.truth[a]).collect())
        .collect();
    Ok(CertificateModel {
        n,
        names,
        signature,
        idx2: index(&atoms2),
        atoms2,
        types2,
        two,
        idx3: index(&atoms3),
        atoms3,
        thetas,
        icoord: coords.iter().map(|c| c.3 as u32).collect(),
        ni,
        witness,
        default,
        ntypes: types.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sat::{find_certificate, normalize, SatOptions};
    use crate::semantics::evaluate;
    use crate::syntax::parse;

    #[test]
    fn generators() {
        assert_eq!(
            generator(&[3, 1, 3]),
            Generator::Pair(3, 1, word_code([1, 2, 1]))
        );
        assert_eq!(
            generator(&[5, 2, 1]),
            Generator::Triple([1, 2, 5], word_code([3, 2, 1]), word_code([1, 2, 3]))
        );
        assert_eq!(generator(&[1, 2, 3, 1]), Generator::Longer);
        assert_eq!(generator(&[1, 2, 3, 4]), Generator::Longer);
        assert!(matches!(
            generator(&[1, 2, 1, 3]),
            Generator::Triple([2, 1, 3], _, _)
        ));
    }

    #[test]
    fn models_satisfy_and_materialize() {
        let f = parse("(forall x1 forall x2 exists x3 (r(x2,x3) & !r(x3,x2))) & forall x1 forall x2 forall x3 (r(x1,x2) -> !r(x2,x1))").unwrap();
        let nf = normalize(&f).unwrap();
        let (cert, _) = find_certificate(&nf, &SatOptions::default()).unwrap();
        let m = build_model(&cert.unwrap(), &nf, &ModelParams::default()).unwrap();
        assert!(evaluate(&m, &f, &[]).unwrap());
        let s = m.to_structure();
        assert_eq!(s.domain.len(), m.size());
        assert!(evaluate(&s, &f, &[]).unwrap());
    }

    #[test]
    fn closed_form_choice_is_capped() {
        let f = parse("forall x1 forall x2 exists x3 p(x3)").unwrap();
        let nf = normalize(&f).unwrap();
        let (cert, _) = find_certificate(&nf, &SatOptions::default()).unwrap();
        let params = ModelParams {
            choice: ChoiceMode::ClosedForm,
            max_elements: 1000,
        };
        let err = build_model(&cert.unwrap(), &nf, &params).unwrap_err();
        assert!(err.is_resource());
    }
}
