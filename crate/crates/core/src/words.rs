//! Adjacent walks over words, the generation preorder, primitive generators
//! and the fresh-choice function.
//!
//! Walks are 1-based: a walk `f` of length `m` into `[1, k]` is stored as the
//! vector `[f(1), .., f(m)]`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::hash::Hash;

use itertools::Itertools;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("walk step {step} at index {index} is outside [1, {len}]")]
    StepOutOfRange {
        index: usize,
        step: usize,
        len: usize,
    },
    #[error("the empty word has no generator")]
    Empty,
    #[error("tuple component {0:?} is not an element of J")]
    OutsideJ(Vec<u32>),
    #[error("expected a tuple of length {expected}, got {got}")]
    Arity { expected: usize, got: usize },
}

/// A word over opaque string symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<String>);

impl Word {
    /// Parses `abc` as three one-letter symbols, or `ab,c` as two symbols
    /// when a comma is present.
    pub fn parse(s: &str) -> Word {
        let s = s.trim();
        if s.contains(',') {
            Word(s.split(',').map(|t| t.trim().to_string()).collect())
        } else {
            Word(s.chars().map(|c| c.to_string()).collect())
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().cloned().collect())
    }
}

impl std::fmt::Display for Word {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.iter().all(|s| s.chars().count() == 1) {
            write!(f, "{}", self.0.concat())
        } else {
            write!(f, "{}", self.0.join(","))
        }
    }
}

/// Parses a walk written as `[1,2,3]` or `1,2,3`.
pub fn parse_walk(s: &str) -> Result<Vec<usize>, std::num::ParseIntError> {
    let body = s.trim().trim_start_matches('[').trim_end_matches(']');
    if body.trim().is_empty() {
        return Ok(Vec::new());
    }
    body.split(',').map(|t| t.trim().parse()).collect()
}

pub fn format_walk(f: &[usize]) -> String {
    let parts: Vec<String> = f.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

pub fn is_adjacent(f: &[usize]) -> bool {
    f.windows(2).all(|w| w[0].abs_diff(w[1]) <= 1)
}

pub fn is_surjective(f: &[usize], k: usize) -> bool {
    let mut seen = vec![false; k + 1];
    for &x in f {
        if x == 0 || x > k {
            return false;
        }
        seen[x] = true;
    }
    seen[1..].iter().all(|&b| b)
}

pub fn apply_walk<T: Clone>(w: &[T], f: &[usize]) -> Result<Vec<T>, WordError> {
    f.iter()
        .enumerate()
        .map(|(i, &x)| {
            if x == 0 || x > w.len() {
                Err(WordError::StepOutOfRange {
                    index: i + 1,
                    step: x,
                    len: w.len(),
                })
            } else {
                Ok(w[x - 1].clone())
            }
        })
        .collect()
}

/// Composition `g ∘ f`, i.e. the walk `i ↦ g(f(i))`.
pub fn compose(g: &[usize], f: &[usize]) -> Vec<usize> {
    f.iter().map(|&x| g[x - 1]).collect()
}

/// All adjacent walks `[1, m] → [1, k]`, in lexicographic order.
pub fn adjacent_walks(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        let (lo, hi) = match cur.last() {
            None => (1, k),
            Some(&p) => (p.saturating_sub(1).max(1), (p + 1).min(k)),
        };
        for x in lo..=hi {
            cur.push(x);
            go(m, k, cur, out);
            cur.pop();
        }
    }
    if m > 0 && k == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    go(m, k, &mut Vec::with_capacity(m), &mut out);
    out
}

/// The end-anchored adjacent walks `[1, m] → [1, k]` with `f(m) = k`.
pub fn end_anchored_walks(m: usize, k: usize) -> Vec<Vec<usize>> {
    adjacent_walks(m, k)
        .into_iter()
        .filter(|f| f.last() == Some(&k))
        .collect()
}

/// Extends an end-anchored walk into `[1, k]` by the step `k + 1`.
pub fn extend_plus(f: &[usize], k: usize) -> Vec<usize> {
    let mut g = f.to_vec();
    g.push(k + 1);
    g
}

/// Searches for a surjective adjacent walk `f` with `a^f = c`.
///
/// Start positions are tried left to right; from each state the steps stay,
/// left, right are tried in that order. The first witness found is returned.
pub fn generates<T: Eq>(a: &[T], c: &[T]) -> Option<Vec<usize>> {
    let k = a.len();
    if c.is_empty() {
        return if k == 0 { Some(Vec::new()) } else { None };
    }
    if k == 0 || c.len() < k {
        return None;
    }
    let full = VisitSet::full(k);
    let mut dead: HashSet<(usize, usize, VisitSet)> = HashSet::new();
    let mut path = Vec::with_capacity(c.len());

    fn go<T: Eq>(
        a: &[T],
        c: &[T],
        i: usize,
        pos: usize,
        seen: VisitSet,
        full: &VisitSet,
        path: &mut Vec<usize>,
        dead: &mut HashSet<(usize, usize, VisitSet)>,
    ) -> bool {
        if i + 1 == c.len() {
            return seen == *full;
        }
        // Positions still unvisited must be reachable in the remaining steps.
        let remaining = c.len() - 1 - i;
        if let (Some(lo), Some(hi)) = (seen.first_missing(a.len()), seen.last_missing(a.len())) {
            let need = if lo > pos {
                hi - pos
            } else if hi < pos {
                pos - lo
            } else {
                (pos - lo).min(hi - pos) + (hi - lo)
            };
            if need > remaining {
                return false;
            }
        }
        let key = (i, pos, seen.clone());
        if dead.contains(&key) {
            return false;
        }
        let steps = [
            Some(pos),
            pos.checked_sub(1).filter(|&p| p >= 1),
            Some(pos + 1).filter(|&p| p <= a.len()),
        ];
        for next in steps.into_iter().flatten() {
            if a[next - 1] == c[i + 1] {
                let mut s = seen.clone();
                s.insert(next);
                path.push(next);
                if go(a, c, i + 1, next, s, full, path, dead) {
                    return true;
                }
                path.pop();
            }
        }
        dead.insert(key);
        false
    }

    for start in 1..=k {
        if a[start - 1] != c[0] {
            continue;
        }
        let mut seen = VisitSet::empty(k);
        seen.insert(start);
        path.clear();
        path.push(start);
        if go(a, c, 0, start, seen, &full, &mut path, &mut dead) {
            return Some(path);
        }
    }
    None
}

/// Bitset over positions `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct VisitSet(Vec<u64>);

impl VisitSet {
    fn empty(k: usize) -> Self {
        VisitSet(vec![0; k / 64 + 1])
    }
    fn full(k: usize) -> Self {
        let mut s = Self::empty(k);
        for p in 1..=k {
            s.insert(p);
        }
        s
    }
    fn insert(&mut self, p: usize) {
        self.0[p / 64] |= 1 << (p % 64);
    }
    fn contains(&self, p: usize) -> bool {
        self.0[p / 64] >> (p % 64) & 1 == 1
    }
    fn first_missing(&self, k: usize) -> Option<usize> {
        (1..=k).find(|&p| !self.contains(p))
    }
    fn last_missing(&self, k: usize) -> Option<usize> {
        (1..=k).rev().find(|&p| !self.contains(p))
    }
}

/// A generator found by folding `c` along a walk: the generator word and the
/// walk that unfolds it back into `c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold<T> {
    pub generator: Vec<T>,
    pub walk: Vec<usize>,
}

/// Folds `c` along every direction sequence (stay, left, right) whose
/// positions carry consistent letters, keeping only folds of span at most
/// `bound`. With `bound = |c|` this is the exhaustive generator search.
fn folds<T: Eq + Clone>(c: &[T], bound: usize, best_only: bool) -> Vec<Fold<T>> {
    struct St<'a, T> {
        c: &'a [T],
        bound: usize,
        best_only: bool,
        // letters at offsets; offset o is stored at index o + n
        cells: Vec<Option<usize>>,
        offs: Vec<isize>,
        out: Vec<Fold<T>>,
    }
    fn go<T: Eq + Clone>(st: &mut St<T>, i: usize, lo: isize, hi: isize) {
        let n = st.c.len() as isize;
        if (hi - lo + 1) as usize > st.bound {
            return;
        }
        if i == st.c.len() {
            let span = (hi - lo + 1) as usize;
            if st.best_only && span < st.bound {
                st.bound = span;
                st.out.clear();
            }
            let generator = (lo..=hi)
                .map(|o| st.c[st.cells[(o + n) as usize].expect("visited")].clone())
                .collect();
            let walk = st.offs.iter().map(|&o| (o - lo + 1) as usize).collect();
            st.out.push(Fold { generator, walk });
            return;
        }
        let here = *st.offs.last().expect("non-empty");
        for d in [0isize, -1, 1] {
            let o = here + d;
            let slot = (o + n) as usize;
            let fresh = match st.cells[slot] {
                Some(j) if st.c[j] == st.c[i] => false,
                Some(_) => continue,
                None => true,
            };
            if fresh {
                st.cells[slot] = Some(i);
            }
            st.offs.push(o);
            go(st, i + 1, lo.min(o), hi.max(o));
            st.offs.pop();
            if fresh {
                st.cells[slot] = None;
            }
        }
    }
    if c.is_empty() {
        return Vec::new();
    }
    let n = c.len();
    let mut st = St {
        c,
        bound,
        best_only,
        cells: vec![None; 2 * n + 1],
        offs: vec![0],
        out: Vec::new(),
    };
    st.cells[n] = Some(0);
    go(&mut st, 1, 0, 0);
    st.out
}

/// Every pair `(a, f)` with `a^f = c`, `f` surjective adjacent and `|a|`
/// minimal. Generators are distinct words; several walks may yield the same
/// generator and all of them are returned.
pub fn minimal_folds<T: Eq + Clone>(c: &[T]) -> Vec<Fold<T>> {
    folds(c, c.len(), true)
}

/// Every pair `(a, f)` with `a^f = c` and `f` surjective adjacent, for any
/// length of `a`.
pub fn all_folds<T: Eq + Clone>(c: &[T]) -> Vec<Fold<T>> {
    folds(c, c.len(), false)
}

/// Orders `{w, reverse(w)}` lexicographically using the first-appearance
/// order of symbols in `reference`, and returns the lesser.
pub fn canonical_orientation<T: Eq + Hash + Clone>(w: &[T], reference: &[T]) -> Vec<T> {
    let mut rank: HashMap<&T, usize> = HashMap::new();
    for s in reference.iter().chain(w.iter()) {
        let next = rank.len();
        rank.entry(s).or_insert(next);
    }
    let fwd: Vec<usize> = w.iter().map(|s| rank[s]).collect();
    let bwd: Vec<usize> = fwd.iter().rev().copied().collect();
    if bwd < fwd {
        w.iter().rev().cloned().collect()
    } else {
        w.to_vec()
    }
}

pub fn primitive_generator<T: Eq + Hash + Clone>(c: &[T]) -> Result<Vec<T>, WordError> {
    if c.is_empty() {
        return Err(WordError::Empty);
    }
    minimal_folds(c)
        .into_iter()
        .map(|fold| canonical_orientation(&fold.generator, c))
        .min_by(|x, y| {
            let cx = canonical_ranks(x, c);
            let cy = canonical_ranks(y, c);
            cx.cmp(&cy)
        })
        .ok_or(WordError::Empty)
}

fn canonical_ranks<T: Eq + Hash>(w: &[T], reference: &[T]) -> Vec<usize> {
    let mut rank: HashMap<&T, usize> = HashMap::new();
    for s in reference.iter().chain(w.iter()) {
        let next = rank.len();
        rank.entry(s).or_insert(next);
    }
    w.iter().map(|s| rank[s]).collect()
}

pub fn primitive_length<T: Eq + Clone>(c: &[T]) -> Result<usize, WordError> {
    if c.is_empty() {
        return Err(WordError::Empty);
    }
    Ok(minimal_folds(c)
        .first()
        .map(|f| f.generator.len())
        .expect("a word always folds onto itself"))
}

pub fn is_primitive<T: Eq + Clone>(c: &[T]) -> Result<bool, WordError> {
    Ok(primitive_length(c)? == c.len())
}

/// The set `{a^f : f surjective adjacent, |f| = m}`.
pub fn enumerate_generated<T: Eq + Hash + Clone + Ord>(a: &[T], m: usize) -> BTreeSet<Vec<T>> {
    let k = a.len();
    let mut out = BTreeSet::new();
    if m < k || k == 0 {
        return out;
    }
    for f in adjacent_walks(m, k) {
        if is_surjective(&f, k) {
            out.insert(apply_walk(a, &f).expect("walk within bounds"));
        }
    }
    out
}

/// The fresh-choice function on `J = [1, z]^(k+1)` with `z = k² + k + 1`.
///
/// `g(i₁s̄₁, .., i_k s̄_k) = i₀ i₁ .. i_k`, where `i₀` is the least positive
/// integer occurring in none of the arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreshChoice {
    pub k: usize,
}

impl FreshChoice {
    pub fn new(k: usize) -> Self {
        assert!(k >= 1, "fresh choice needs k >= 1");
        FreshChoice { k }
    }

    pub fn z(&self) -> u32 {
        (self.k * self.k + self.k + 1) as u32
    }

    /// `|J| = z^(k+1)`.
    pub fn size(&self) -> usize {
        (self.z() as usize).pow(self.k as u32 + 1)
    }

    pub fn contains(&self, t: &[u32]) -> bool {
        t.len() == self.k + 1 && t.iter().all(|&x| x >= 1 && x <= self.z())
    }

    pub fn apply(&self, args: &[Vec<u32>]) -> Result<Vec<u32>, WordError> {
        if args.len() != self.k {
            return Err(WordError::Arity {
                expected: self.k,
                got: args.len(),
            });
        }
        if let Some(bad) = args.iter().find(|t| !self.contains(t)) {
            return Err(WordError::OutsideJ(bad.clone()));
        }
        let used: HashSet<u32> = args.iter().flatten().copied().collect();
        let i0 = (1..).find(|x| !used.contains(x)).expect("finite set");
        let mut out = Vec::with_capacity(self.k + 1);
        out.push(i0);
        out.extend(args.iter().map(|t| t[0]));
        Ok(out)
    }

    /// Index of an element of `J` in `[0, |J|)`.
    pub fn encode(&self, t: &[u32]) -> usize {
        let z = self.z() as usize;
        t.iter().fold(0, |acc, &x| acc * z + (x as usize - 1))
    }

    pub fn decode(&self, mut idx: usize) -> Vec<u32> {
        let z = self.z() as usize;
        let mut out = vec![0; self.k + 1];
        for slot in out.iter_mut().rev() {
            *slot = (idx % z) as u32 + 1;
            idx /= z;
        }
        out
    }

    /// [`FreshChoice::apply`] on encoded indices.
    pub fn apply_index(&self, args: &[usize]) -> usize {
        let tuples: Vec<Vec<u32>> = args.iter().map(|&i| self.decode(i)).collect();
        self.encode(&self.apply(&tuples).expect("decoded tuples lie in J"))
    }
}

/// A function `g: J^k → J` on `J = [0, size)`.
pub trait ChoiceFunction {
    fn k(&self) -> usize;
    fn size(&self) -> usize;
    fn choose(&self, args: &[usize]) -> usize;
}

impl ChoiceFunction for FreshChoice {
    fn k(&self) -> usize {
        self.k
    }

    fn size(&self) -> usize {
        FreshChoice::size(self)
    }

    fn choose(&self, args: &[usize]) -> usize {
        self.apply_index(args)
    }
}

/// Returns the first property violated at `t̄`: `Some(1)` if `g(t̄)` occurs in
/// `t̄`, `Some(2)` if `g(t̄′)` does for some rearrangement `t̄′` of
/// `t_2 .. t_k g(t̄)`.
pub fn choice_violation(g: &impl ChoiceFunction, t: &[usize]) -> Option<u8> {
    let v = g.choose(t);
    if t.contains(&v) {
        return Some(1);
    }
    let mut rest: Vec<usize> = t[1..].to_vec();
    rest.push(v);
    let n = rest.len();
    for perm in rest.into_iter().permutations(n) {
        if t.contains(&g.choose(&perm)) {
            return Some(2);
        }
    }
    None
}

/// Checks both properties on every tuple of `J^k`; returns the first failure.
pub fn check_choice_exhaustive(g: &impl ChoiceFunction) -> Result<(), Vec<usize>> {
    let (k, n) = (g.k(), g.size());
    let mut t = vec![0usize; k];
    loop {
        if choice_violation(g, &t).is_some() {
            return Err(t);
        }
        let mut pos = 0;
        while pos < k && t[pos] + 1 == n {
            t[pos] = 0;
            pos += 1;
        }
        if pos == k {
            return Ok(());
        }
        t[pos] += 1;
    }
}

/// A tabulated choice function, typically far smaller than [`FreshChoice`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceTable {
    pub k: usize,
    pub n: usize,
    pub table: Vec<usize>,
}

impl ChoiceFunction for ChoiceTable {
    fn k(&self) -> usize {
        self.k
    }

    fn size(&self) -> usize {
        self.n
    }

    fn choose(&self, args: &[usize]) -> usize {
        self.table[args.iter().fold(0, |acc, &a| acc * self.n + a)]
    }
}

impl ChoiceTable {
    /// The smallest table (by `|J|`, then lexicographically) with both
    /// properties, searching `|J| ≤ max_n`.
    pub fn search(k: usize, max_n: usize) -> Option<ChoiceTable> {
        (1..=max_n).find_map(|n| {
            let cells = n.pow(k as u32);
            let mut table = vec![usize::MAX; cells];
            Self::fill(k, n, &mut table, 0).then_some(ChoiceTable { k, n, table })
        })
    }

    fn decode(k: usize, n: usize, mut cell: usize) -> Vec<usize> {
        let mut t = vec![0; k];
        for slot in t.iter_mut().rev() {
            *slot = cell % n;
            cell /= n;
        }
        t
    }

    fn fill(k: usize, n: usize, table: &mut Vec<usize>, cell: usize) -> bool {
        if cell == table.len() {
            return true;
        }
        let t = Self::decode(k, n, cell);
        for v in 0..n {
            if t.contains(&v) {
                continue;
            }
            table[cell] = v;
            if Self::partial_ok(k, n, table) && Self::fill(k, n, table, cell + 1) {
                return true;
            }
        }
        table[cell] = usize::MAX;
        false
    }

    /// Property (ii) on every tuple whose relevant cells are filled.
    fn partial_ok(k: usize, n: usize, table: &[usize]) -> bool {
        let at = |t: &[usize]| table[t.iter().fold(0, |acc, &a| acc * n + a)];
        (0..table.len()).all(|cell| {
            let v = table[cell];
            if v == usize::MAX {
                return true;
            }
            let t = Self::decode(k, n, cell);
            let mut rest: Vec<usize> = t[1..].to_vec();
            rest.push(v);
            rest.into_iter().permutations(k).all(|p| {
                let w = at(&p);
                w == usize::MAX || !t.contains(&w)
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn adjacency() {
        assert!(is_adjacent(&[3, 2, 1, 2, 2, 2, 3, 4, 3]));
        assert!(!is_adjacent(&[1, 3, 2]));
        assert!(is_adjacent(&[]));
    }

    #[test]
    fn figure_walk() {
        let f = [3, 2, 1, 2, 3, 3, 3, 4, 5, 6, 5, 4, 3, 4, 5, 6, 7, 8, 7, 6];
        let out = apply_walk(&w("cbadefba"), &f).unwrap();
        assert_eq!(out, w("abcbaaadefedadefbabf"));
        assert_eq!(apply_walk(&w("abcd"), &[4, 3, 2, 1]).unwrap(), w("dcba"));
        assert_eq!(
            apply_walk(&w("ab"), &[1, 3]),
            Err(WordError::StepOutOfRange {
                index: 2,
                step: 3,
                len: 2
            })
        );
    }

    #[test]
    fn generation_witnesses() {
        assert_eq!(
            generates(&w("abcd"), &w("babcd")),
            Some(vec![2, 1, 2, 3, 4])
        );
        assert_eq!(generates(&w("abc"), &w("abc")), Some(vec![1, 2, 3]));
        assert_eq!(generates(&w("abcd"), &w("abdc")), None);
        assert_eq!(generates(&w("abc"), &w("ab")), None);
    }

    #[test]
    fn primitive_examples() {
        let pg = |s: &str| {
            primitive_generator(&w(s))
                .unwrap()
                .into_iter()
                .collect::<String>()
        };
        assert_eq!(pg("babcd"), "abcd");
        assert_eq!(pg("abcbda"), "abcbda");
        assert_eq!(pg("abcbcbd"), "abcbd");
        assert_eq!(pg("abcbcd"), "abcd");
        assert_eq!(pg("babcc"), "abc");
        assert_eq!(pg("x"), "x");
        assert!(!is_primitive(&w("abcbcd")).unwrap());
        assert_eq!(primitive_length(&w("abcbcd")).unwrap(), 4);
        assert_eq!(primitive_length::<char>(&[]), Err(WordError::Empty));
    }

    #[test]
    fn no_one_shorter_generator_for_abcbcd() {
        let c = w("abcbcd");
        let five: Vec<_> = all_folds(&c)
            .into_iter()
            .filter(|f| f.generator.len() == 5)
            .collect();
        assert!(five.is_empty());
    }

    #[test]
    fn two_modes_for_abcbcbd() {
        let c = w("abcbcbd");
        let walks: BTreeSet<_> = minimal_folds(&c)
            .into_iter()
            .filter(|f| f.generator == w("abcbd"))
            .map(|f| f.walk)
            .collect();
        assert!(walks.len() >= 2, "{walks:?}");
    }

    #[test]
    fn enumerate_small() {
        let set = |v: &[&str]| v.iter().map(|s| w(s)).collect::<BTreeSet<_>>();
        assert_eq!(enumerate_generated(&w("ab"), 2), set(&["ab", "ba"]));
        assert_eq!(
            enumerate_generated(&w("ab"), 3),
            set(&["aab", "abb", "aba", "bab", "bba", "baa"])
        );
        assert_eq!(enumerate_generated(&w("a"), 2), set(&["aa"]));
        assert!(enumerate_generated(&w("abc"), 2).is_empty());
    }

    #[test]
    fn walk_families() {
        assert_eq!(adjacent_walks(0, 3), vec![Vec::<usize>::new()]);
        assert!(adjacent_walks(2, 0).is_empty());
        assert_eq!(adjacent_walks(2, 2).len(), 4);
        assert_eq!(end_anchored_walks(2, 2), vec![vec![1, 2], vec![2, 2]]);
        assert_eq!(extend_plus(&[1, 2], 2), vec![1, 2, 3]);
    }

    #[test]
    fn fresh_choice_k1() {
        let fc = FreshChoice::new(1);
        assert_eq!(fc.z(), 3);
        assert_eq!(fc.apply(&[vec![1, 1]]).unwrap(), vec![2, 1]);
        assert_eq!(FreshChoice::new(2).size(), 343);
        assert!(fc.apply(&[vec![4, 1]]).is_err());
    }

    #[test]
    fn fresh_choice_k1_exhaustive() {
        let fc = FreshChoice::new(1);
        for t in 0..fc.size() {
            let g = fc.apply_index(&[t]);
            assert_ne!(g, t);
            // t̄′ = (g(t̄)) for k = 1
            assert_ne!(fc.apply_index(&[g]), t);
        }
    }

    #[test]
    fn reduced_tables() {
        let t1 = ChoiceTable::search(1, 8).unwrap();
        assert_eq!(t1.n, 3);
        assert!(check_choice_exhaustive(&t1).is_ok());
        let t2 = ChoiceTable::search(2, 8).unwrap();
        assert!(t2.n < 343);
        assert!(check_choice_exhaustive(&t2).is_ok());
        assert!(check_choice_exhaustive(&FreshChoice::new(1)).is_ok());
    }

    #[test]
    fn word_parsing() {
        assert_eq!(Word::parse("abc").len(), 3);
        assert_eq!(
            Word::parse("ab,c").0,
            vec!["ab".to_string(), "c".to_string()]
        );
        assert_eq!(Word::parse("abc").reversed().to_string(), "cba");
        assert_eq!(parse_walk("[1, 2,3]").unwrap(), vec![1, 2, 3]);
        assert_eq!(format_walk(&[1, 2]), "[1,2]");
    }

    fn small_word() -> impl Strategy<Value = Vec<u8>> {
        prop::collection::vec(0u8..3, 1..7)
    }

    proptest! {
        #[test]
        fn reversal_is_involution(v in small_word()) {
            let r: Vec<u8> = v.iter().rev().rev().copied().collect();
            prop_assert_eq!(r, v);
        }

        #[test]
        fn primitive_generator_idempotent(v in small_word()) {
            let g = primitive_generator(&v).unwrap();
            prop_assert_eq!(primitive_generator(&g).unwrap(), g.clone());
            prop_assert!(generates(&g, &v).is_some());
        }

        #[test]
        fn generation_transitive(a in prop::collection::vec(0u8..3, 1..4), e1 in 0usize..3, e2 in 0usize..3, pick1 in any::<prop::sample::Index>(), pick2 in any::<prop::sample::Index>()) {
            let bs: Vec<_> = enumerate_generated(&a, a.len() + e1).into_iter().collect();
            let b = pick1.get(&bs).clone();
            let cs: Vec<_> = enumerate_generated(&b, b.len() + e2).into_iter().collect();
            let c = pick2.get(&cs);
            prop_assert!(generates(&a, c).is_some());
        }

        #[test]
        fn fresh_choice_k2(t1 in 0usize..343, t2 in 0usize..343, swap in any::<bool>()) {
            let fc = FreshChoice::new(2);
            let g = fc.apply_index(&[t1, t2]);
            prop_assert!(g != t1 && g != t2);
            let next = if swap { [g, t2] } else { [t2, g] };
            let g2 = fc.apply_index(&next);
            prop_assert!(g2 != t1 && g2 != t2);
        }
    }
}
