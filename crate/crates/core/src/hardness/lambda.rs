use std::collections::BTreeSet;

use crate::syntax::Formula;
use crate::words;

use super::HardnessError;

/// Index row of `λ_i` on words of length `len = m + 2`, 1-based.
pub fn lambda_map(i: usize, len: usize) -> Result<Vec<usize>, HardnessError> {
    if len < 2 {
        return Err(HardnessError::Domain(format!(
            "λ maps act on words of length at least 2, got {len}"
        )));
    }
    let row = match i {
        0 => (1..=len).collect(),
        1 => [1, 2].into_iter().chain((3..=len).map(|k| k - 1)).collect(),
        2 => [1, 2].into_iter().chain((3..=len).map(|k| k - 2)).collect(),
        3 => (1..=len.min(3)).chain((4..=len).map(|k| k - 1)).collect(),
        _ => {
            return Err(HardnessError::Domain(format!(
                "no map λ{i}; expected 0 to 3"
            )))
        }
    };
    Ok(row)
}

/// `w^{λ_i}`: position `p` of the result reads `w[λ_i(p)]`.
pub fn lambda_apply<T: Clone>(i: usize, w: &[T]) -> Result<Vec<T>, HardnessError> {
    let row = lambda_map(i, w.len())?;
    words::apply_walk(w, &row).map_err(|e| HardnessError::Domain(e.to_string()))
}

/// Least superset of `seed` closed under `λ_1`, `λ_2` and `λ_3`.
pub fn closure_w<T: Clone + Ord>(
    m: usize,
    seed: &BTreeSet<Vec<T>>,
) -> Result<BTreeSet<Vec<T>>, HardnessError> {
    if let Some(w) = seed.iter().find(|w| w.len() != m + 2) {
        return Err(HardnessError::Domain(format!(
            "seed word of length {} where {} was expected",
            w.len(),
            m + 2
        )));
    }
    let mut all = seed.clone();
    let mut frontier: Vec<Vec<T>> = seed.iter().cloned().collect();
    while let Some(w) = frontier.pop() {
        for i in 1..=3 {
            let v = lambda_apply(i, &w)?;
            if all.insert(v.clone()) {
                frontier.push(v);
            }
        }
    }
    Ok(all)
}

/// Checks that `closure_w` of `0 1 1^m` contains every word `0 1 {0,1}^m`.
pub fn closure_covers(m: usize) -> Result<bool, HardnessError> {
    let seed: Vec<u8> = [0, 1]
        .into_iter()
        .chain(std::iter::repeat_n(1, m))
        .collect();
    let w = closure_w(m, &BTreeSet::from([seed]))?;
    Ok((0u64..1 << m).all(|c| {
        let word: Vec<u8> = [0, 1]
            .into_iter()
            .chain((0..m).map(|i| (c >> i & 1) as u8))
            .collect();
        w.contains(&word)
    }))
}

fn forall_block(vars: usize, body: Formula) -> Formula {
    Formula::forall_all(1..=vars, body)
}

/// `ζ^P_m`: every `P`-pair `ab` puts `G_m` on all of `a b {a,b}^m`.
pub fn build_zeta(p: &str, g: &str, m: usize) -> Result<Formula, HardnessError> {
    if m == 0 {
        return Err(HardnessError::Domain("ζ needs m ≥ 1".into()));
    }
    let len = m + 2;
    let seed_args: Vec<usize> = [1, 2]
        .into_iter()
        .chain(std::iter::repeat_n(2, m))
        .collect();
    let mut parts = vec![forall_block(
        2,
        Formula::implies(Formula::atom(p, vec![1, 2]), Formula::atom(g, seed_args)),
    )];
    for i in 1..=3 {
        parts.push(forall_block(
            len,
            Formula::implies(
                Formula::atom(g, (1..=len).collect()),
                Formula::atom(g, lambda_map(i, len)?),
            ),
        ));
    }
    Ok(Formula::and_all(parts))
}

/// `ε^R_m`: every `R`-quadruple `b a a' b'` puts `F_m` on all of
/// `c̄ b a a' b' c̄'` with `c̄ ∈ {a,b}^m` and `c̄' ∈ {a',b'}^m`.
///
/// Variables are numbered left to right along the `F_m` atom, so `z_k` is
/// `x_{m+3-k}` and `z'_k` is `x_{m+2+k}`.
pub fn build_epsilon(r: &str, f: &str, m: usize) -> Result<Formula, HardnessError> {
    if m == 0 {
        return Err(HardnessError::Domain("ε needs m ≥ 1".into()));
    }
    let len = m + 2;
    let seed_args: Vec<usize> = std::iter::repeat_n(1, m)
        .chain([1, 2, 3, 4])
        .chain(std::iter::repeat_n(4, m))
        .collect();
    let mut parts = vec![Formula::forall_all(
        1..=4,
        Formula::implies(
            Formula::atom(r, vec![1, 2, 3, 4]),
            Formula::atom(f, seed_args),
        ),
    )];
    let z = |k: usize| m + 3 - k;
    let z2 = |k: usize| m + 2 + k;
    for i in 0..=3 {
        let li = lambda_map(i, len)?;
        for j in 0..=3 {
            let lj = lambda_map(j, len)?;
            let args: Vec<usize> = (1..=len)
                .rev()
                .map(|p| z(li[p - 1]))
                .chain((1..=len).map(|p| z2(lj[p - 1])))
                .collect();
            parts.push(forall_block(
                2 * len,
                Formula::implies(
                    Formula::atom(f, (1..=2 * len).collect()),
                    Formula::atom(f, args),
                ),
            ));
        }
    }
    Ok(Formula::and_all(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::classify;

    #[test]
    fn maps_match_rows() {
        assert_eq!(
            lambda_apply(0, &['a', 'b', 'c', 'd']).unwrap(),
            vec!['a', 'b', 'c', 'd']
        );
        assert_eq!(
            lambda_apply(2, &['a', 'b', 'c', 'd']).unwrap(),
            vec!['a', 'b', 'a', 'b']
        );
        assert_eq!(lambda_apply(1, &[0, 1, 1, 1]).unwrap(), vec![0, 1, 1, 1]);
        assert_eq!(lambda_map(1, 4).unwrap(), vec![1, 2, 2, 3]);
        assert_eq!(lambda_map(3, 4).unwrap(), vec![1, 2, 3, 3]);
        assert_eq!(lambda_map(3, 6).unwrap(), vec![1, 2, 3, 3, 4, 5]);
        assert!(lambda_apply(1, &[0]).is_err());
        assert!(lambda_map(4, 3).is_err());
    }

    #[test]
    fn closure_examples() {
        let w = closure_w(1, &BTreeSet::from([vec![0, 1, 1]])).unwrap();
        assert!(w.contains(&vec![0, 1, 0]));
        assert_eq!(
            closure_w(0, &BTreeSet::from([vec![0, 1]])).unwrap().len(),
            1
        );
        for m in 0..=6 {
            assert!(closure_covers(m).unwrap(), "m = {m}");
        }
    }

    #[test]
    fn builders_are_guarded_adjacent() {
        for m in 1..=3 {
            for f in [
                build_zeta("P", "G", m).unwrap(),
                build_epsilon("R", "F", m).unwrap(),
            ] {
                let r = classify(&f);
                assert!(r.guarded_adjacent && !r.renamed, "{m}: {r:?}");
            }
        }
    }
}
