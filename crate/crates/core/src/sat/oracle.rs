use std::cell::Cell;
use std::collections::HashMap;

use crate::semantics::{
    evaluate, sensitive_tuples, Elem, Interpretation, SemanticsError, Structure,
};
use crate::syntax::Formula;

use super::SatError;

/// Result of exhaustive model search over small domains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleOutcome {
    /// The first model found, in order of size then of assignment code.
    pub model: Option<Structure>,
    /// Domain sizes searched exhaustively.
    pub searched: Vec<usize>,
    /// Domain sizes skipped because they need more than the bit cap.
    pub skipped: Vec<usize>,
}

struct Bits {
    n: usize,
    index: HashMap<String, HashMap<Vec<Elem>, usize>>,
    code: Cell<u64>,
}

impl Interpretation for Bits {
    fn size(&self) -> usize {
        self.n
    }

    fn holds(&self, pred: &str, tuple: &[Elem]) -> Result<bool, SemanticsError> {
        let rel = self
            .index
            .get(pred)
            .ok_or_else(|| SemanticsError::Uninterpreted(pred.to_string()))?;
        Ok(rel
            .get(tuple)
            .is_some_and(|&b| self.code.get() >> b & 1 == 1))
    }
}

/// Tries every interpretation of the tuples the sentence can reach, on
/// domains of size `1 ..= max_n`.
pub fn brute_force_sat(
    phi: &Formula,
    max_n: usize,
    bit_cap: usize,
) -> Result<OracleOutcome, SatError> {
    if !phi.free_vars().is_empty() {
        return Err(SatError::Domain("the oracle decides sentences".into()));
    }
    phi.check_arities()?;
    let bit_cap = bit_cap.min(40);
    let mut out = OracleOutcome {
        model: None,
        searched: Vec::new(),
        skipped: Vec::new(),
    };
    for n in 1..=max_n {
        let sens = sensitive_tuples(phi, n);
        let total: usize = sens.values().map(|s| s.len()).sum();
        if total > bit_cap {
            out.skipped.push(n);
            continue;
        }
        let mut index = HashMap::new();
        let mut bit = 0;
        for (p, tuples) in &sens {
            let m: HashMap<Vec<Elem>, usize> = tuples
                .iter()
                .map(|t| {
                    bit += 1;
                    (t.clone(), bit - 1)
                })
                .collect();
            index.insert(p.clone(), m);
        }
        let bits = Bits {
            n,
            index,
            code: Cell::new(0),
        };
        for code in 0..1u64 << total {
            bits.code.set(code);
            if evaluate(&bits, phi, &[])? {
                let mut s = Structure::new(n, &phi.signature());
                for (p, m) in &bits.index {
                    for (t, &b) in m {
                        if code >> b & 1 == 1 {
                            s.set(p, t.clone(), true);
                        }
                    }
                }
                out.searched.push(n);
                out.model = Some(s);
                return Ok(out);
            }
        }
        out.searched.push(n);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn oracle_finds_smallest_models() {
        let f = parse("exists x1 exists x2 (p(x1) & !p(x2))").unwrap();
        let out = brute_force_sat(&f, 3, 20).unwrap();
        let m = out.model.unwrap();
        assert_eq!(m.domain.len(), 2);
        assert!(evaluate(&m, &f, &[]).unwrap());
        let g = parse("forall x1 p(x1) & exists x1 !p(x1)").unwrap();
        let out = brute_force_sat(&g, 3, 20).unwrap();
        assert!(out.model.is_none());
        assert_eq!(out.searched, vec![1, 2, 3]);
    }
}
