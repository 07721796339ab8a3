use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::powerseries::{DegreePair, Family, PowerSeries};
use crate::tilting::exact_mean_degree;

const STREAM_POSITIONS: u64 = 1;
const STREAM_SOCKETS: u64 = 2;
const STREAM_OUTER: u64 = 3;

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Quantization limits for [`instantiate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimensions {
    /// Number of punctured bits.
    pub k: usize,
    /// Punctured bits above this degree become pilots.
    pub d_l: usize,
    /// Checks above this degree are clipped to it.
    pub d_r: usize,
    /// Rows of the outer parity-check matrix.
    pub m_outer: usize,
}

impl Dimensions {
    pub fn new(k: usize, d_l: usize, d_r: usize, m_outer: usize) -> Self {
        Dimensions {
            k,
            d_l,
            d_r,
            m_outer,
        }
    }
}

/// A concrete Tanner graph drawn from an ensemble.
///
/// Punctured bit `j` (0-based) sits between systematic bits `u_j` and
/// `u_{j+1}` on the upper accumulator chain; check `i` feeds parity bit `z_i`
/// on the lower chain. Which chains exist depends on the family.
#[derive(Clone, Debug)]
pub struct CodeInstance {
    family: Family,
    seed: u64,
    bit_degrees: Vec<usize>,
    check_degrees: Vec<usize>,
    pilots: Vec<usize>,
    is_pilot: Vec<bool>,
    m_outer: usize,
    check_start: Vec<usize>,
    sockets: Vec<usize>,
    outer: BitMatrix,
}

#[derive(Serialize, Deserialize)]
struct InstanceDocument {
    family: Family,
    k: usize,
    seed: u64,
    bit_degrees: Vec<usize>,
    check_degrees: Vec<usize>,
    pilots: Vec<usize>,
    outer_rows: usize,
    outer_cols: usize,
}

/// Splits `total` items over bins proportional to `weights`, rounding by
/// largest remainder so the counts add up exactly.
pub fn largest_remainder(weights: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 || weights.is_empty() {
        return vec![0; weights.len()];
    }
    let exact: Vec<f64> = weights
        .iter()
        .map(|w| w.max(0.0) / sum * total as f64)
        .collect();
    let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &i in order.iter().take(total.saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

/// Degree multiset for the punctured bits. Mass above `d_l`, including the
/// series tail, becomes pilots of the tail's mean degree.
fn bit_degree_counts(
    node: &PowerSeries,
    k: usize,
    d_l: usize,
) -> (Vec<(usize, usize)>, usize, usize) {
    let c = node.coeffs();
    let top = d_l.min(node.order());
    let mut weights: Vec<f64> = (0..=top).map(|i| if i >= 1 { c[i] } else { 0.0 }).collect();
    let head: f64 = weights.iter().sum();
    let tail_mass = (1.0 - head).max(0.0);
    let (mut tail_edges, mut tail_nodes) = (0.0, 0.0);
    for (i, &ci) in c.iter().enumerate().skip(top + 1) {
        tail_edges += i as f64 * ci;
        tail_nodes += ci;
    }
    let pilot_degree = if tail_nodes > 0.0 {
        ((tail_edges / tail_nodes).round() as usize).max(d_l + 1)
    } else {
        d_l + 1
    };
    weights.push(tail_mass);
    let counts = largest_remainder(&weights, k);
    let pilots = counts[top + 1];
    let regular = (1..=top)
        .filter(|&i| counts[i] > 0)
        .map(|i| (i, counts[i]))
        .collect();
    (regular, pilots, pilot_degree)
}

fn check_degree_counts(node: &PowerSeries, n_checks: usize, d_r: usize) -> Vec<(usize, usize)> {
    let c = node.coeffs();
    let mut weights = vec![0.0; d_r + 1];
    for (i, &ci) in c.iter().enumerate().skip(1) {
        weights[i.min(d_r)] += ci;
    }
    let head: f64 = c.iter().skip(1).sum();
    weights[d_r] += (1.0 - head).max(0.0);
    largest_remainder(&weights, n_checks)
        .into_iter()
        .enumerate()
        .filter(|&(_, n)| n > 0)
        .collect()
}

/// Adjusts the most numerous check degree so both sides carry `bit_edges`
/// sockets. A remainder that is not a multiple of that degree goes to one
/// extra check of the leftover degree.
fn repair_sockets(counts: &mut Vec<(usize, usize)>, bit_edges: usize) -> Result<()> {
    let check_edges: usize = counts.iter().map(|&(d, n)| d * n).sum();
    if check_edges == bit_edges {
        return Ok(());
    }
    let (slot, &(d, n)) = counts
        .iter()
        .enumerate()
        .max_by_key(|&(_, &(d, n))| (n, d))
        .ok_or_else(|| Error::Construction("no check nodes to repair".into()))?;
    let mut extra = None;
    if bit_edges > check_edges {
        let diff = bit_edges - check_edges;
        counts[slot].1 = n + diff / d;
        if !diff.is_multiple_of(d) {
            extra = Some(diff % d);
        }
    } else {
        let diff = check_edges - bit_edges;
        let removed = diff.div_ceil(d);
        if removed > n {
            return Err(Error::Construction(format!(
                "cannot remove {removed} degree-{d} checks to match {bit_edges} bit sockets"
            )));
        }
        counts[slot].1 = n - removed;
        let back = removed * d - diff;
        if back > 0 {
            extra = Some(back);
        }
    }
    if let Some(e) = extra {
        match counts.iter_mut().find(|(deg, _)| *deg == e) {
            Some(entry) => entry.1 += 1,
            None => counts.push((e, 1)),
        }
    }
    counts.retain(|&(_, n)| n > 0);
    Ok(())
}

fn expand(counts: &[(usize, usize)]) -> Vec<usize> {
    counts
        .iter()
        .flat_map(|&(d, n)| std::iter::repeat_n(d, n))
        .collect()
}

/// Quantizes `pair` into a random graph with `dims.k` punctured bits.
pub fn instantiate(pair: &DegreePair, dims: Dimensions, seed: u64) -> Result<CodeInstance> {
    let Dimensions {
        k,
        d_l,
        d_r,
        m_outer,
    } = dims;
    if pair.family == Family::Ldpc {
        return Err(Error::Construction(
            "plain LDPC pairs have no accumulator structure to encode".into(),
        ));
    }
    if k < 2 {
        return Err(Error::param("k", k as f64, "must be at least 2"));
    }
    if d_l < 2 || d_r < 2 {
        return Err(Error::InvalidInput(format!(
            "degree limits must be at least 2 (d_L = {d_l}, d_R = {d_r})"
        )));
    }
    let (regular, n_pilots, pilot_degree) = bit_degree_counts(pair.bit.node(), k, d_l);
    if n_pilots + m_outer >= k {
        return Err(Error::Construction(format!(
            "{n_pilots} pilots and {m_outer} outer constraints leave no information bits"
        )));
    }
    let mean_ratio = exact_mean_degree(&pair.bit) / exact_mean_degree(&pair.check);
    let n_checks = ((k as f64 * mean_ratio).round() as usize).max(1);
    let mut check_counts = check_degree_counts(pair.check.node(), n_checks, d_r);

    let mut rng = rng_for(seed, STREAM_POSITIONS);
    let mut degrees: Vec<(usize, bool)> =
        expand(&regular).into_iter().map(|d| (d, false)).collect();
    degrees.extend(std::iter::repeat_n((pilot_degree, true), n_pilots));
    degrees.shuffle(&mut rng);
    // The last m positions are fixed by the outer code and cannot be pilots.
    let free = k - m_outer;
    for j in free..k {
        if degrees[j].1 {
            let candidates: Vec<usize> = (0..free).filter(|&i| !degrees[i].1).collect();
            let pick = candidates[rng.gen_range(0..candidates.len())];
            degrees.swap(j, pick);
        }
    }
    let bit_degrees: Vec<usize> = degrees.iter().map(|d| d.0).collect();
    let pilots: Vec<usize> = (0..k).filter(|&j| degrees[j].1).collect();

    let bit_edges: usize = bit_degrees.iter().sum();
    repair_sockets(&mut check_counts, bit_edges)?;
    let mut check_degrees = expand(&check_counts);
    check_degrees.shuffle(&mut rng);

    CodeInstance::assemble(
        pair.family,
        seed,
        bit_degrees,
        check_degrees,
        pilots,
        m_outer,
    )
}

impl CodeInstance {
    /// Builds an instance from explicit degree sequences. The socket
    /// permutation and outer matrix are drawn from `seed`.
    pub fn assemble(
        family: Family,
        seed: u64,
        bit_degrees: Vec<usize>,
        check_degrees: Vec<usize>,
        pilots: Vec<usize>,
        m_outer: usize,
    ) -> Result<Self> {
        let k = bit_degrees.len();
        if family == Family::Ldpc {
            return Err(Error::Construction(
                "plain LDPC pairs have no accumulator structure to encode".into(),
            ));
        }
        let bit_edges: usize = bit_degrees.iter().sum();
        let check_edges: usize = check_degrees.iter().sum();
        if bit_edges != check_edges {
            return Err(Error::Construction(format!(
                "socket counts differ: {bit_edges} bit sockets, {check_edges} check sockets"
            )));
        }
        if m_outer >= k {
            return Err(Error::Construction(format!(
                "outer code with {m_outer} rows needs more than {k} bits"
            )));
        }
        let mut is_pilot = vec![false; k];
        let unique: BTreeSet<usize> = pilots.iter().copied().collect();
        for &j in &unique {
            if j >= k - m_outer {
                return Err(Error::Construction(format!(
                    "pilot {j} lies in the outer-constrained range"
                )));
            }
            is_pilot[j] = true;
        }
        let pilots: Vec<usize> = unique.into_iter().collect();
        if pilots.len() + m_outer >= k {
            return Err(Error::Construction("no information bits remain".into()));
        }

        let mut sockets: Vec<usize> = bit_degrees
            .iter()
            .enumerate()
            .flat_map(|(j, &d)| std::iter::repeat_n(j, d))
            .collect();
        sockets.shuffle(&mut rng_for(seed, STREAM_SOCKETS));
        let mut check_start = Vec::with_capacity(check_degrees.len() + 1);
        check_start.push(0);
        for d in &check_degrees {
            check_start.push(check_start.last().unwrap() + d);
        }

        let mut outer = BitMatrix::zeros(m_outer, k - m_outer);
        let mut rng = rng_for(seed, STREAM_OUTER);
        for r in 0..m_outer {
            for c in 0..k - m_outer {
                outer.set(r, c, rng.gen::<bool>());
            }
        }
        Ok(CodeInstance {
            family,
            seed,
            bit_degrees,
            check_degrees,
            pilots,
            is_pilot,
            m_outer,
            check_start,
            sockets,
            outer,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn k(&self) -> usize {
        self.bit_degrees.len()
    }

    pub fn n_checks(&self) -> usize {
        self.check_degrees.len()
    }

    /// Whether systematic bits are accumulated into the punctured bits.
    pub fn has_upper(&self) -> bool {
        matches!(self.family, Family::Ara | Family::Aldpc)
    }

    /// Whether check outputs are accumulated into the parity bits.
    pub fn has_lower(&self) -> bool {
        matches!(self.family, Family::Ara | Family::Nsira)
    }

    /// Transmitted length: systematic bits (when sent) plus parity bits.
    pub fn n(&self) -> usize {
        self.n_systematic() + self.n_checks()
    }

    /// Number of transmitted systematic bits; zero for NSIRA, whose
    /// information bits are the punctured bits themselves.
    pub fn n_systematic(&self) -> usize {
        if self.has_upper() {
            self.k()
        } else {
            0
        }
    }

    pub fn info_len(&self) -> usize {
        self.k() - self.pilots.len() - self.m_outer
    }

    pub fn rate(&self) -> f64 {
        self.info_len() as f64 / self.n() as f64
    }

    pub fn bit_degrees(&self) -> &[usize] {
        &self.bit_degrees
    }

    pub fn check_degrees(&self) -> &[usize] {
        &self.check_degrees
    }

    pub fn pilots(&self) -> &[usize] {
        &self.pilots
    }

    pub fn is_pilot(&self, j: usize) -> bool {
        self.is_pilot[j]
    }

    pub fn m_outer(&self) -> usize {
        self.m_outer
    }

    /// `P` of the outer code `[P I]`, `m × (k - m)`.
    pub fn outer_p(&self) -> &BitMatrix {
        &self.outer
    }

    /// Punctured bits attached to check `i`, with repeats for multi-edges.
    pub fn check_sockets(&self, i: usize) -> &[usize] {
        &self.sockets[self.check_start[i]..self.check_start[i + 1]]
    }

    /// Positions carrying information: neither pilots nor outer-constrained.
    pub fn info_positions(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.k() - self.m_outer).filter(move |&j| !self.is_pilot[j])
    }

    /// Degree histogram of the checks, index = degree.
    pub fn check_histogram(&self) -> Vec<usize> {
        let top = self.check_degrees.iter().copied().max().unwrap_or(0);
        let mut h = vec![0; top + 1];
        for &d in &self.check_degrees {
            h[d] += 1;
        }
        h
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = InstanceDocument {
            family: self.family,
            k: self.k(),
            seed: self.seed,
            bit_degrees: self.bit_degrees.clone(),
            check_degrees: self.check_degrees.clone(),
            pilots: self.pilots.clone(),
            outer_rows: self.m_outer,
            outer_cols: self.k() - self.m_outer,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: InstanceDocument = serde_json::from_str(text)?;
        if doc.k != doc.bit_degrees.len() || doc.outer_rows + doc.outer_cols != doc.k {
            return Err(Error::InvalidInput(
                "instance dimensions are inconsistent".into(),
            ));
        }
        CodeInstance::assemble(
            doc.family,
            doc.seed,
            doc.bit_degrees,
            doc.check_degrees,
            doc.pilots,
            doc.outer_rows,
        )
    }
}
