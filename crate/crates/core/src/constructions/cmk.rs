use num::{FromPrimitive, Zero};
use std::ops::{Add, Div, Mul};

/// Triangular table of the weights `c_{m,k}` for `1 ≤ m ≤ ⌊k/2⌋`,
/// `2 ≤ k ≤ k_max`: the sum over ordered compositions of `k` into `m` parts,
/// each at least two, of the product of reciprocal parts.
#[derive(Clone, Debug)]
pub struct CmkTable<T> {
    k_max: usize,
    /// `rows[m-1][k]`, zero for `k < 2m`.
    rows: Vec<Vec<T>>,
}

pub trait CmkScalar:
    Clone + Zero + FromPrimitive + Add<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
}

impl<T> CmkScalar for T where
    T: Clone + Zero + FromPrimitive + Add<Output = T> + Mul<Output = T> + Div<Output = T>
{
}

impl<T: CmkScalar> CmkTable<T> {
    /// Fills the table from `c_{1,k} = 1/k` and
    /// `c_{m,k} = (m/k) Σ_{j=2(m-1)}^{k-2} c_{m-1,j}`.
    pub fn new(k_max: usize) -> Self {
        let k_max = k_max.max(2);
        let num = |v: usize| T::from_usize(v).expect("integer fits scalar type");
        let mut rows: Vec<Vec<T>> = Vec::with_capacity(k_max / 2);
        let first: Vec<T> = (0..=k_max)
            .map(|k| if k >= 2 { num(1) / num(k) } else { T::zero() })
            .collect();
        rows.push(first);
        for m in 2..=k_max / 2 {
            let prev = &rows[m - 2];
            // prefix[j] = Σ_{i<j} prev[i]; prev vanishes below 2(m-1).
            let mut prefix = Vec::with_capacity(k_max + 2);
            prefix.push(T::zero());
            for v in prev {
                let last = prefix.last().cloned().unwrap();
                prefix.push(last + v.clone());
            }
            let row: Vec<T> = (0..=k_max)
                .map(|k| {
                    if k < 2 * m {
                        T::zero()
                    } else {
                        let s = prefix[k - 1].clone();
                        num(m) * s / num(k)
                    }
                })
                .collect();
            rows.push(row);
        }
        CmkTable { k_max, rows }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn get(&self, m: usize, k: usize) -> T {
        if m == 0 || k > self.k_max || k < 2 * m {
            return T::zero();
        }
        self.rows[m - 1][k].clone()
    }
}
