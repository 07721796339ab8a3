//! Finite-length codes: instantiation, encoding and erasure decoding.

mod encode;
mod instance;
mod outer;
mod peel;
mod reduce;

pub use encode::{bits_to_string, encode, extract_info, is_codeword, Codeword, ReceivedWord};
pub use instance::{instantiate, largest_remainder, CodeInstance, Dimensions};
pub use outer::{ml_decode, outer_decode, OuterOutcome};
pub use peel::{peel_decode, PeelOutcome};
pub use reduce::{graph_reduce_instance, ParityUnionFind, ReducedCheck, ResidualGraph, Union};

use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    /// Punctured bits, `None` where still erased.
    pub v: Vec<Option<u8>>,
    /// Information bits in [`CodeInstance::info_positions`] order.
    pub info: Vec<Option<u8>>,
    /// Unknown residual variables after peeling.
    pub peel_unresolved: usize,
    /// Punctured bits still unknown after peeling, before the outer solve.
    pub peel_unresolved_bits: usize,
    /// Residual variables before peeling.
    pub residual_vars: usize,
    pub outer_attempted: bool,
    pub outer_success: bool,
    /// The received word contradicted the code.
    pub inconsistent: bool,
}

impl DecodeResult {
    pub fn success(&self) -> bool {
        self.info.iter().all(Option::is_some)
    }

    pub fn erased_info(&self) -> usize {
        self.info.iter().filter(|b| b.is_none()).count()
    }

    /// Peeling stalled and the outer code finished the job.
    pub fn rescued(&self) -> bool {
        self.outer_success && self.peel_unresolved > 0
    }
}

/// Graph reduction, peeling, then (if enabled and needed) the outer solve.
pub fn decode(inst: &CodeInstance, rcv: &ReceivedWord, use_outer: bool) -> Result<DecodeResult> {
    let mut graph = graph_reduce_instance(inst, rcv)?;
    let peel = peel_decode(&graph);
    let peel_unresolved = peel.unresolved();
    let mut values = peel.values.clone();
    let mut outer_attempted = false;
    let mut outer_success = false;
    if peel_unresolved > 0 && use_outer && inst.m_outer() > 0 {
        outer_attempted = true;
        let out = outer_decode(inst, &graph, &peel);
        outer_success = out.success;
        if out.success {
            values = out.values;
        }
    }

    let k = inst.k();
    // (root, parity) for v_{-1} = 0 and every punctured bit.
    let located: Vec<(usize, u8)> = (0..=k).map(|x| graph.uf.find(x)).collect();
    let value = |x: usize| -> Option<u8> {
        let (r, par) = located[x];
        if r == graph.zero_root {
            Some(par)
        } else {
            values[graph.var_of_root[r]].map(|b| b ^ par)
        }
    };
    let v: Vec<Option<u8>> = (1..=k).map(value).collect();
    let peel_unresolved_bits = (1..=k)
        .filter(|&x| {
            let r = located[x].0;
            r != graph.zero_root && peel.values[graph.var_of_root[r]].is_none()
        })
        .count();
    let info = inst
        .info_positions()
        .map(|j| {
            if !inst.has_upper() {
                return v[j];
            }
            if let Some(u) = rcv.0[j] {
                return Some(u);
            }
            // u_j = v_j ⊕ v_{j-1}; known if both are, or if they share a class.
            match (value(j + 1), value(j)) {
                (Some(a), Some(b)) => Some(a ^ b),
                _ if located[j + 1].0 == located[j].0 => Some(located[j + 1].1 ^ located[j].1),
                _ => None,
            }
        })
        .collect();
    Ok(DecodeResult {
        v,
        info,
        peel_unresolved,
        peel_unresolved_bits,
        residual_vars: graph.n_vars(),
        outer_attempted,
        outer_success,
        inconsistent: graph.inconsistent,
    })
}
