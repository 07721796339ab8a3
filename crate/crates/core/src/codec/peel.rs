//! Luby-style peeling on the reduced graph.

use std::collections::VecDeque;

use super::reduce::{ReducedCheck, ResidualGraph};

/// Result of peeling: a value per residual variable (`None` if still
/// unknown) and the checks that keep two or more unknowns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeelOutcome {
    pub values: Vec<Option<u8>>,
    pub leftover: Vec<ReducedCheck>,
}

impl PeelOutcome {
    pub fn unresolved(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

/// Repeatedly resolves the single unknown of a degree-1 check and removes
/// its edges, until no degree-1 check remains.
pub fn peel_decode(graph: &ResidualGraph) -> PeelOutcome {
    let n = graph.n_vars();
    let m = graph.checks.len();
    let mut start = vec![0usize; n + 1];
    for c in &graph.checks {
        for &v in &c.vars {
            start[v + 1] += 1;
        }
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut fill = start.clone();
    let mut adj = vec![0usize; start[n]];
    for (ci, c) in graph.checks.iter().enumerate() {
        for &v in &c.vars {
            adj[fill[v]] = ci;
            fill[v] += 1;
        }
    }

    let mut degree: Vec<usize> = graph.checks.iter().map(|c| c.vars.len()).collect();
    // XOR of the unknown variable indices left in each check.
    let mut xor: Vec<usize> = graph
        .checks
        .iter()
        .map(|c| c.vars.iter().fold(0, |a, &v| a ^ v))
        .collect();
    let mut rhs: Vec<u8> = graph.checks.iter().map(|c| c.rhs).collect();
    let mut values = vec![None; n];
    let mut queue: VecDeque<usize> = (0..m).filter(|&c| degree[c] == 1).collect();
    while let Some(c) = queue.pop_front() {
        if degree[c] != 1 {
            continue;
        }
        let var = xor[c];
        let val = rhs[c];
        values[var] = Some(val);
        for &c2 in &adj[start[var]..start[var + 1]] {
            degree[c2] -= 1;
            xor[c2] ^= var;
            rhs[c2] ^= val;
            if degree[c2] == 1 {
                queue.push_back(c2);
            }
        }
    }
    let leftover = graph
        .checks
        .iter()
        .enumerate()
        .filter(|&(c, _)| degree[c] >= 2)
        .map(|(c, orig)| ReducedCheck {
            vars: orig
                .vars
                .iter()
                .copied()
                .filter(|&v| values[v].is_none())
                .collect(),
            rhs: rhs[c],
            merged_degree: orig.merged_degree,
        })
        .collect();
    PeelOutcome { values, leftover }
}
