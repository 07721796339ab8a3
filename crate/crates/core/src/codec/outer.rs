//! Rescue decoding with the outer code, and a brute-force reference decoder.

use super::encode::ReceivedWord;
use super::instance::CodeInstance;
use super::peel::PeelOutcome;
use super::reduce::{ParityUnionFind, ResidualGraph, Union};
use crate::gf2::BitMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OuterOutcome {
    pub success: bool,
    /// Residual-variable values, complete when `success`.
    pub values: Vec<Option<u8>>,
    /// Unknowns left by peeling.
    pub unknowns: usize,
    /// Independent leftover degree-2 checks used to merge unknowns.
    pub merged: usize,
}

/// Solves the `l` unknowns left by peeling with the outer equations.
///
/// Leftover degree-2 checks merge pairs of unknowns first (a union-find
/// skips dependent ones), leaving `l - t` columns; decoding succeeds iff the
/// `m × (l - t)` system has full column rank.
pub fn outer_decode(
    inst: &CodeInstance,
    graph: &ResidualGraph,
    peel: &PeelOutcome,
) -> OuterOutcome {
    let mut values = peel.values.clone();
    let unknowns = peel.unresolved();
    if unknowns == 0 {
        return OuterOutcome {
            success: true,
            values,
            unknowns,
            merged: 0,
        };
    }
    let n = graph.n_vars();
    let mut classes = ParityUnionFind::new(n);
    let mut merged = 0;
    for c in peel.leftover.iter().filter(|c| c.vars.len() == 2) {
        if classes.union(c.vars[0], c.vars[1], c.rhs) == Union::Merged {
            merged += 1;
        }
    }
    let mut column = vec![usize::MAX; n];
    let mut n_cols = 0;
    for v in 0..n {
        if values[v].is_none() {
            let (r, _) = classes.find(v);
            if column[r] == usize::MAX {
                column[r] = n_cols;
                n_cols += 1;
            }
        }
    }
    let m = inst.m_outer();
    if n_cols > m {
        return OuterOutcome {
            success: false,
            values,
            unknowns,
            merged,
        };
    }

    let mut uf = graph.uf.clone();
    let free = inst.k() - m;
    let mut a = BitMatrix::zeros(m, n_cols);
    let mut rhs = vec![false; m];
    let p = inst.outer_p();
    for row in 0..m {
        let mut add = |j: usize, a: &mut BitMatrix, rhs: &mut bool| {
            let (r, par) = uf.find(j + 1);
            let mut constant = par;
            if r != graph.zero_root {
                let var = graph.var_of_root[r];
                match values[var] {
                    Some(x) => constant ^= x,
                    None => {
                        let (cr, cp) = classes.find(var);
                        constant ^= cp;
                        a.flip(row, column[cr]);
                    }
                }
            }
            *rhs ^= constant == 1;
        };
        add(free + row, &mut a, &mut rhs[row]);
        for i in 0..free {
            if p.get(row, i) {
                add(i, &mut a, &mut rhs[row]);
            }
        }
    }
    let Some(x) = a.solve_unique(&rhs) else {
        return OuterOutcome {
            success: false,
            values,
            unknowns,
            merged,
        };
    };
    for v in 0..n {
        if values[v].is_none() {
            let (cr, cp) = classes.find(v);
            values[v] = Some(x[column[cr]] as u8 ^ cp);
        }
    }
    OuterOutcome {
        success: true,
        values,
        unknowns,
        merged,
    }
}

/// Maximum-likelihood erasure decoding by Gaussian elimination on the full
/// code: every punctured bit plus the erased systematic and parity bits are
/// unknowns. Returns the punctured bits when they are uniquely determined.
pub fn ml_decode(inst: &CodeInstance, rcv: &ReceivedWord) -> Option<Vec<u8>> {
    let k = inst.k();
    let sys = inst.n_systematic();
    let nc = inst.n_checks();
    // Column layout: punctured bits, then erased transmitted positions.
    let mut col_of_pos = vec![usize::MAX; inst.n()];
    let mut n_cols = k;
    for (pos, b) in rcv.0.iter().enumerate() {
        if b.is_none() {
            col_of_pos[pos] = n_cols;
            n_cols += 1;
        }
    }
    let mut rows: Vec<(Vec<usize>, bool)> = Vec::new();
    let term = |pos: usize, cols: &mut Vec<usize>, rhs: &mut bool| match rcv.0[pos] {
        Some(b) => *rhs ^= b == 1,
        None => cols.push(col_of_pos[pos]),
    };
    if inst.has_upper() {
        for j in 0..k {
            let mut cols = vec![j];
            if j > 0 {
                cols.push(j - 1);
            }
            let mut rhs = false;
            term(j, &mut cols, &mut rhs);
            rows.push((cols, rhs));
        }
    }
    for &j in inst.pilots() {
        rows.push((vec![j], false));
    }
    let free = k - inst.m_outer();
    for row in 0..inst.m_outer() {
        let mut cols = vec![free + row];
        cols.extend((0..free).filter(|&i| inst.outer_p().get(row, i)));
        rows.push((cols, false));
    }
    for i in 0..nc {
        let mut cols: Vec<usize> = inst.check_sockets(i).to_vec();
        let mut rhs = false;
        term(sys + i, &mut cols, &mut rhs);
        if inst.has_lower() && i > 0 {
            term(sys + i - 1, &mut cols, &mut rhs);
        }
        rows.push((cols, rhs));
    }
    let mut a = BitMatrix::zeros(rows.len(), n_cols);
    let mut rhs = Vec::with_capacity(rows.len());
    for (r, (cols, b)) in rows.iter().enumerate() {
        for &c in cols {
            a.flip(r, c);
        }
        rhs.push(*b);
    }
    let x = a.solve_unique(&rhs)?;
    Some(x[..k].iter().map(|&b| b as u8).collect())
}
