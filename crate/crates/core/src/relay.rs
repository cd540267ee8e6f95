//! Serial composition of heralded links into a relay chain.
//!
//! Each hop is summarised by the Pauli error it leaves on the announced Bell
//! state: the conditional pair state in Bell populations `p_b`, relabelled by
//! `b ⊕ target` in (X, Z) bits. Swapping hops together composes these errors
//! by convolution over Z₂×Z₂, and the chain fidelity is the weight left on the
//! identity. This is a model choice for the chain, not a derived result:
//! coherences and the classical frame corrections are ignored.

use crate::engine::{run_protocol, ProtocolResult};
use crate::error::{Error, Result};
use crate::params::ProtocolParams;

/// Probability of each Pauli frame error, indexed by `2·x + z`.
pub type PauliErrors = [f64; 4];

fn pauli_index(x: bool, z: bool) -> usize {
    2 * usize::from(x) + usize::from(z)
}

/// Herald-weighted Pauli error distribution of one hop.
pub fn hop_errors(result: &ProtocolResult) -> Option<PauliErrors> {
    let mut errors = [0.0; 4];
    let mut total = 0.0;
    for record in &result.herald_log {
        let (tx, tz) = record.target.pauli_bits();
        for (label, p) in crate::bell::BellLabel::ALL
            .iter()
            .zip(record.bell_populations())
        {
            let (x, z) = label.pauli_bits();
            errors[pauli_index(x ^ tx, z ^ tz)] += record.weight * p;
        }
        total += record.weight;
    }
    (total > 0.0).then(|| errors.map(|e| e / total))
}

pub fn compose(a: &PauliErrors, b: &PauliErrors) -> PauliErrors {
    let mut out = [0.0; 4];
    for (i, &pa) in a.iter().enumerate() {
        for (j, &pb) in b.iter().enumerate() {
            out[i ^ j] += pa * pb;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainEstimate {
    pub hops: usize,
    pub chain_success: f64,
    /// `NaN` if some hop never heralds.
    pub chain_fidelity: f64,
}

/// Composes already computed hops.
pub fn relay_chain_from_results(hops: &[ProtocolResult]) -> Result<ChainEstimate> {
    if hops.is_empty() {
        return Err(Error::EmptyChain);
    }
    let chain_success = hops.iter().map(|h| h.total_success).product();
    let errors = hops
        .iter()
        .map(hop_errors)
        .try_fold([1.0, 0.0, 0.0, 0.0], |acc, e| e.map(|e| compose(&acc, &e)));
    Ok(ChainEstimate {
        hops: hops.len(),
        chain_success,
        chain_fidelity: errors.map_or(f64::NAN, |e| e[0]),
    })
}

pub fn relay_chain(hops: &[ProtocolParams]) -> Result<ChainEstimate> {
    if hops.is_empty() {
        return Err(Error::EmptyChain);
    }
    let results = hops.iter().map(run_protocol).collect::<Result<Vec<_>>>()?;
    relay_chain_from_results(&results)
}

/// Estimates for chains of 1..=`max_hops` identical hops.
pub fn chain_profile(params: &ProtocolParams, max_hops: usize) -> Result<Vec<ChainEstimate>> {
    if max_hops == 0 {
        return Err(Error::EmptyChain);
    }
    let hop = run_protocol(params)?;
    let errors = hop_errors(&hop);
    let mut acc = [1.0, 0.0, 0.0, 0.0];
    Ok((1..=max_hops)
        .map(|n| {
            if let Some(e) = &errors {
                acc = compose(&acc, e);
            }
            ChainEstimate {
                hops: n,
                chain_success: hop.total_success.powi(n as i32),
                chain_fidelity: if errors.is_some() { acc[0] } else { f64::NAN },
            }
        })
        .collect())
}
