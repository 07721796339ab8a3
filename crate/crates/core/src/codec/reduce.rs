//! Graph reduction: turns an ARA-type decoding problem into a plain LDPC
//! erasure problem over classes of punctured bits.

use super::encode::ReceivedWord;
use super::instance::CodeInstance;
use crate::error::{Error, Result};

/// Union-find over GF(2) variables where each node stores its parity
/// relative to the class root. Node 0 is never re-parented.
#[derive(Clone, Debug)]
pub struct ParityUnionFind {
    parent: Vec<usize>,
    parity: Vec<u8>,
    rank: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Union {
    Merged,
    /// Already in one class with the same relation.
    Redundant,
    /// Already in one class with the opposite relation.
    Conflict,
}

impl ParityUnionFind {
    pub fn new(n: usize) -> Self {
        ParityUnionFind {
            parent: (0..n).collect(),
            parity: vec![0; n],
            rank: vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Root of `x` and `x ⊕ root`.
    pub fn find(&mut self, x: usize) -> (usize, u8) {
        let mut root = x;
        let mut acc = 0u8;
        while self.parent[root] != root {
            acc ^= self.parity[root];
            root = self.parent[root];
        }
        // Path compression, keeping parities relative to the new parent.
        let mut cur = x;
        let mut cur_par = acc;
        while self.parent[cur] != root && cur != root {
            let next = self.parent[cur];
            let next_par = cur_par ^ self.parity[cur];
            self.parent[cur] = root;
            self.parity[cur] = cur_par;
            cur = next;
            cur_par = next_par;
        }
        (root, acc)
    }

    /// Records `a ⊕ b = rel`.
    pub fn union(&mut self, a: usize, b: usize, rel: u8) -> Union {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return if pa ^ pb == rel {
                Union::Redundant
            } else {
                Union::Conflict
            };
        }
        let link = pa ^ pb ^ rel;
        // Node 0 always stays a root, so its class can act as the constant
        // zero without tracking its own parity.
        let (child, root) = if rb == 0 || (ra != 0 && self.rank[ra] < self.rank[rb]) {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[child] = root;
        self.parity[child] = link;
        if self.rank[ra] == self.rank[rb] {
            self.rank[root] += 1;
        }
        Union::Merged
    }
}

/// One equation of the reduced graph: the XOR of `vars` equals `rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedCheck {
    pub vars: Vec<usize>,
    pub rhs: u8,
    /// Sum of the original check degrees merged into this one.
    pub merged_degree: usize,
}

/// LDPC erasure problem left after reduction.
///
/// Node 0 of the union-find is the constant zero (the accumulator start
/// `v_0`, and every pilot); node `j + 1` is punctured bit `j`. Variables are
/// the class roots other than the zero class.
#[derive(Clone, Debug)]
pub struct ResidualGraph {
    pub uf: ParityUnionFind,
    pub zero_root: usize,
    /// Union-find root of each residual variable.
    pub roots: Vec<usize>,
    /// Residual variable index of each root, `usize::MAX` if none.
    pub var_of_root: Vec<usize>,
    pub checks: Vec<ReducedCheck>,
    /// Summed degree of every closed run of checks, including runs whose
    /// unknowns cancelled completely.
    pub merged_degrees: Vec<usize>,
    /// Set when the received word contradicts the code.
    pub inconsistent: bool,
}

impl ResidualGraph {
    /// A bare LDPC erasure problem over `n_vars` unknowns, without any
    /// underlying instance.
    pub fn from_checks(n_vars: usize, checks: Vec<ReducedCheck>) -> Self {
        let mut uf = ParityUnionFind::new(n_vars + 1);
        let zero_root = uf.find(0).0;
        let roots: Vec<usize> = (1..=n_vars).collect();
        let mut var_of_root = vec![usize::MAX; n_vars + 1];
        for (v, &r) in roots.iter().enumerate() {
            var_of_root[r] = v;
        }
        let merged_degrees = checks.iter().map(|c| c.merged_degree).collect();
        ResidualGraph {
            uf,
            zero_root,
            roots,
            var_of_root,
            checks,
            merged_degrees,
            inconsistent: false,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.roots.len()
    }
}

/// Applies both reductions.
///
/// Observed systematic bits merge neighbouring punctured bits; erased ones
/// drop out. Observed parity bits close a run of checks, and erased parity
/// bits merge the checks on either side. Checks after the last observed
/// parity bit are unusable. Pilots are known zeros.
pub fn graph_reduce_instance(inst: &CodeInstance, rcv: &ReceivedWord) -> Result<ResidualGraph> {
    if rcv.len() != inst.n() {
        return Err(Error::InvalidInput(format!(
            "received word has {} positions, instance transmits {}",
            rcv.len(),
            inst.n()
        )));
    }
    let k = inst.k();
    let mut uf = ParityUnionFind::new(k + 1);
    let mut inconsistent = false;
    for &j in inst.pilots() {
        inconsistent |= uf.union(j + 1, 0, 0) == Union::Conflict;
    }
    let sys = inst.n_systematic();
    if inst.has_upper() {
        for j in 0..k {
            if let Some(u) = rcv.0[j] {
                inconsistent |= uf.union(j + 1, j, u) == Union::Conflict;
            }
        }
    }

    // Runs of checks between observed parity bits.
    let mut runs: Vec<(Vec<usize>, u8, usize)> = Vec::new();
    let mut members: Vec<usize> = Vec::new();
    let mut degree = 0;
    let mut prev_z = 0u8;
    for i in 0..inst.n_checks() {
        let z = rcv.0[sys + i];
        if inst.has_lower() {
            members.extend_from_slice(inst.check_sockets(i));
            degree += inst.check_degrees()[i];
            if let Some(z) = z {
                runs.push((std::mem::take(&mut members), prev_z ^ z, degree));
                degree = 0;
                prev_z = z;
            }
        } else if let Some(z) = z {
            runs.push((inst.check_sockets(i).to_vec(), z, inst.check_degrees()[i]));
        }
    }

    let zero_root = uf.find(0).0;
    let mut var_of_root = vec![usize::MAX; k + 1];
    let mut roots = Vec::new();
    for x in 1..=k {
        let (r, _) = uf.find(x);
        if r != zero_root && var_of_root[r] == usize::MAX {
            var_of_root[r] = roots.len();
            roots.push(r);
        }
    }
    let merged_degrees = runs.iter().map(|r| r.2).collect();
    let mut checks = Vec::with_capacity(runs.len());
    let mut scratch: Vec<usize> = Vec::new();
    for (sockets, mut rhs, merged_degree) in runs {
        scratch.clear();
        for j in sockets {
            let (r, par) = uf.find(j + 1);
            rhs ^= par;
            if r != zero_root {
                scratch.push(var_of_root[r]);
            }
        }
        scratch.sort_unstable();
        // Repeated variables cancel in pairs.
        let mut vars = Vec::with_capacity(scratch.len());
        let mut idx = 0;
        while idx < scratch.len() {
            let mut end = idx;
            while end < scratch.len() && scratch[end] == scratch[idx] {
                end += 1;
            }
            if (end - idx) % 2 == 1 {
                vars.push(scratch[idx]);
            }
            idx = end;
        }
        if vars.is_empty() {
            inconsistent |= rhs != 0;
            continue;
        }
        checks.push(ReducedCheck {
            vars,
            rhs,
            merged_degree,
        });
    }
    Ok(ResidualGraph {
        uf,
        zero_root,
        roots,
        var_of_root,
        checks,
        merged_degrees,
        inconsistent,
    })
}
