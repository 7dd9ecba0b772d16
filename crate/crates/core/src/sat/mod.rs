//! Satisfiability: normal forms, the adjacent closure, the variable-reduction
//! step, the certificate decider for three variables with model construction,
//! and a brute-force oracle.

mod certificate;
mod model;
mod normal;
mod oracle;

use serde_json::{json, Value};
use thiserror::Error;

pub use certificate::{decide_af3, find_certificate, PoolStats};
pub use model::{build_model, CertificateModel, ModelParams};
pub use normal::{
    adjacent_closure, expand_reduction, normalize, reduce_step, FreshPredicate, NormalForm,
};
pub use oracle::{brute_force_sat, OracleOutcome};

use crate::semantics::{evaluate, SemanticsError, Structure};
use crate::syntax::{Formula, SyntaxError};
use crate::types::{Certificate, TypeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("{0}")]
    Domain(String),
    #[error("{stage}: {count} exceeds the cap of {cap}")]
    Resource {
        stage: String,
        count: usize,
        cap: usize,
    },
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

impl SatError {
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            SatError::Resource { .. }
                | SatError::Type(TypeError::Resource { .. })
                | SatError::Syntax(SyntaxError::Resource { .. })
        )
    }
}

/// Caps and switches shared by the decision procedures.
#[derive(Debug, Clone)]
pub struct SatOptions {
    /// Largest relevant atom set whose types are enumerated.
    pub type_cap: usize,
    /// Largest number of `ℓ`-types a reduction step introduces predicates for.
    pub reduction_types: usize,
    /// Largest pool of compatible connector-types.
    pub pool_cap: usize,
    /// Node budget of the certificate search.
    pub search_budget: usize,
    /// Largest variable count accepted by [`decide`].
    pub max_vars: usize,
    /// Build and verify a model on SAT.
    pub build_model: bool,
    pub model: ModelParams,
}

impl Default for SatOptions {
    fn default() -> Self {
        SatOptions {
            type_cap: 20,
            reduction_types: 1024,
            pool_cap: 50_000,
            search_budget: 2_000_000,
            max_vars: 6,
            build_model: true,
            model: ModelParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Sat,
    Unsat,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Sat => "SAT",
            Verdict::Unsat => "UNSAT",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SatResult {
    pub verdict: Verdict,
    pub certificate: Option<Certificate>,
    pub model: Option<CertificateModel>,
    pub trace: Vec<String>,
}

impl SatResult {
    pub fn to_json(&self) -> Value {
        json!({
            "verdict": self.verdict.to_string(),
            "certificate": self.certificate.as_ref().map(Certificate::to_json),
            "model_size": self.model.as_ref().map(|m| m.size()),
            "trace": self.trace,
        })
    }

    /// The model as an explicit structure, when one was built.
    pub fn structure(&self) -> Option<Structure> {
        self.model.as_ref().map(CertificateModel::to_structure)
    }
}

/// Decides a sentence: normal form, reduction to three variables, then the
/// certificate search. Models are built only when no reduction was needed.
pub fn decide(phi: &Formula, opts: &SatOptions) -> Result<SatResult, SatError> {
    let nf = normalize(phi)?;
    let mut trace = vec![format!(
        "normal form: {} variables, {} existential conjuncts, {} fresh predicates",
        nf.ell + 1,
        nf.gammas.len(),
        nf.fresh.len()
    )];
    if nf.ell + 1 > opts.max_vars {
        return Err(SatError::Resource {
            stage: "variable count".into(),
            count: nf.ell + 1,
            cap: opts.max_vars,
        });
    }
    let reduced = nf.ell > 2;
    let mut cur = nf;
    while cur.ell > 2 {
        let next = reduce_step(&cur, opts)?;
        trace.push(format!(
            "reduced to {} variables: {} existential conjuncts, {} predicates",
            next.ell + 1,
            next.gammas.len(),
            next.to_formula().signature().len()
        ));
        cur = next;
    }
    let mut inner = opts.clone();
    inner.build_model &= !reduced;
    let mut result = certificate::decide_core(&cur, &inner)?;
    trace.append(&mut result.trace);
    if let Some(m) = &result.model {
        if !evaluate(m, phi, &[])? {
            return Err(SatError::Internal(
                "the built model does not satisfy the input sentence".into(),
            ));
        }
        trace.push("model verified against the input sentence".into());
    }
    result.trace = trace;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn tiny_decisions() {
        let opts = SatOptions::default();
        let sat = decide(
            &parse("!(forall x1 r(x1,x1) & !forall x1 r(x1,x1))").unwrap(),
            &opts,
        )
        .unwrap();
        assert_eq!(sat.verdict, Verdict::Sat);
        let unsat = decide(&parse("forall x1 p(x1) & exists x1 !p(x1)").unwrap(), &opts).unwrap();
        assert_eq!(unsat.verdict, Verdict::Unsat);
    }
}
