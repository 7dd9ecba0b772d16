//! Bit-string comparisons over the unary predicate `O`. Position 1 of a
//! bit-string is the least significant bit; an element in `O` is a one.

use std::collections::BTreeMap;

use crate::semantics::{evaluate, Structure};
use crate::syntax::Formula;

use super::HardnessError;

pub const BIT: &str = "O";

fn o(x: usize) -> Formula {
    Formula::atom(BIT, vec![x])
}

fn same(a: usize, b: usize) -> Formula {
    Formula::iff(o(a), o(b))
}

/// `val(z̄) < val(z̄')`.
pub fn less(z: &[usize], z2: &[usize]) -> Formula {
    let m = z.len();
    Formula::or_all(
        (0..m)
            .map(|i| {
                let mut parts = vec![Formula::not(o(z[i])), o(z2[i])];
                parts.extend((i + 1..m).map(|j| same(z[j], z2[j])));
                Formula::and_all(parts)
            })
            .collect(),
    )
}

/// `val(z̄) = val(z̄')`.
pub fn eq(z: &[usize], z2: &[usize]) -> Formula {
    Formula::and_all(z.iter().zip(z2).map(|(&a, &b)| same(a, b)).collect())
}

/// `val(z̄) = val(z̄') + 1` as the bitwise rule alone, which also accepts the
/// wrap-around from all ones to all zeros.
fn increment_mod(z: &[usize], z2: &[usize]) -> Formula {
    Formula::and_all(
        (0..z.len())
            .map(|i| {
                Formula::iff(
                    same(z[i], z2[i]),
                    Formula::or_all((0..i).map(|j| o(z[j])).collect()),
                )
            })
            .collect(),
    )
}

/// `val(z̄) = val(z̄') + k` for `k ∈ {-1, 0, 1}`. With `literal` the bitwise
/// rule is emitted on its own and wraps around modulo `2^m`; otherwise the
/// larger side is also required to be non-zero.
pub fn succ(z: &[usize], z2: &[usize], k: i8, literal: bool) -> Result<Formula, HardnessError> {
    let (hi, lo) = match k {
        0 => return Ok(eq(z, z2)),
        1 => (z, z2),
        -1 => (z2, z),
        _ => {
            return Err(HardnessError::Domain(format!(
                "offset {k} is outside -1..=1"
            )))
        }
    };
    let rule = increment_mod(hi, lo);
    if literal {
        return Ok(rule);
    }
    Ok(Formula::and_all(vec![
        rule,
        Formula::or_all(hi.iter().map(|&x| o(x)).collect()),
    ]))
}

/// The counter templates over `z̄ = x_1..x_m` and `z̄' = x_{m+1}..x_{2m}`.
#[derive(Debug, Clone)]
pub struct Counters {
    pub m: usize,
    pub less: Formula,
    pub eq: Formula,
    /// Indexed by `k + 1`.
    pub succ: [Formula; 3],
}

pub fn build_counters(m: usize, literal: bool) -> Result<Counters, HardnessError> {
    if m == 0 {
        return Err(HardnessError::Domain("counters need m ≥ 1".into()));
    }
    let z: Vec<usize> = (1..=m).collect();
    let z2: Vec<usize> = (m + 1..=2 * m).collect();
    Ok(Counters {
        m,
        less: less(&z, &z2),
        eq: eq(&z, &z2),
        succ: [
            succ(&z, &z2, -1, literal)?,
            succ(&z, &z2, 0, literal)?,
            succ(&z, &z2, 1, literal)?,
        ],
    })
}

/// A pair of bit-strings on which a counter formula disagrees with integer
/// arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterMismatch {
    pub formula: String,
    pub left: u64,
    pub right: u64,
}

/// Compares the templates with integer arithmetic on all `4^m` pairs.
pub fn check_counters(m: usize, literal: bool) -> Result<Vec<CounterMismatch>, HardnessError> {
    let c = build_counters(m, literal)?;
    let mut s = Structure::new(2, &BTreeMap::from([(BIT.to_string(), 1)]));
    s.set(BIT, vec![1], true);
    let mut out = Vec::new();
    for a in 0u64..1 << m {
        for b in 0u64..1 << m {
            let env: Vec<u32> = (0..m)
                .map(|i| (a >> i & 1) as u32)
                .chain((0..m).map(|i| (b >> i & 1) as u32))
                .collect();
            let (ai, bi) = (a as i64, b as i64);
            let checks = [
                ("less", &c.less, ai < bi),
                ("eq", &c.eq, ai == bi),
                ("succ-1", &c.succ[0], ai == bi - 1),
                ("succ0", &c.succ[1], ai == bi),
                ("succ+1", &c.succ[2], ai == bi + 1),
            ];
            for (name, f, want) in checks {
                if evaluate(&s, f, &env)? != want {
                    out.push(CounterMismatch {
                        formula: name.into(),
                        left: a,
                        right: b,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counters_match_integers() {
        for m in 1..=4 {
            assert_eq!(check_counters(m, false).unwrap(), vec![], "m = {m}");
        }
    }

    #[test]
    fn literal_successor_only_fails_on_wrap_around() {
        for m in 1..=4 {
            let top = (1u64 << m) - 1;
            let bad = check_counters(m, true).unwrap();
            assert_eq!(bad.len(), 2);
            assert!(bad.contains(&CounterMismatch {
                formula: "succ+1".into(),
                left: 0,
                right: top
            }));
            assert!(bad.contains(&CounterMismatch {
                formula: "succ-1".into(),
                left: top,
                right: 0
            }));
        }
    }

    #[test]
    fn lsb_first() {
        let mut s = Structure::new(2, &BTreeMap::from([(BIT.to_string(), 1)]));
        s.set(BIT, vec![1], true);
        let c = build_counters(2, false).unwrap();
        assert!(evaluate(&s, &c.less, &[0, 0, 1, 0]).unwrap());
        assert!(evaluate(&s, &c.succ[2], &[0, 1, 1, 0]).unwrap());
    }
}
