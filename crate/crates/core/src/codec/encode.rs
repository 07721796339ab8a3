use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

use super::instance::CodeInstance;

/// Encoder output. `u` is empty when the family does not transmit
/// systematic bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    pub u: Vec<u8>,
    pub v: Vec<u8>,
    pub z: Vec<u8>,
}

impl Codeword {
    /// Transmitted bits: systematic then parity.
    pub fn transmitted(&self) -> Vec<u8> {
        let mut out = self.u.clone();
        out.extend_from_slice(&self.z);
        out
    }
}

/// Per-position channel output; `None` is an erasure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReceivedWord(pub Vec<Option<u8>>);

impl ReceivedWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn erasures(&self) -> usize {
        self.0.iter().filter(|b| b.is_none()).count()
    }

    pub fn clean(bits: &[u8]) -> Self {
        ReceivedWord(bits.iter().map(|&b| Some(b)).collect())
    }
}

impl fmt::Display for ReceivedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(match b {
                Some(0) => "0",
                Some(_) => "1",
                None => "e",
            })?;
        }
        Ok(())
    }
}

impl FromStr for ReceivedWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(Some(0)),
                '1' => Ok(Some(1)),
                'e' | 'E' => Ok(None),
                other => Err(Error::InvalidInput(format!(
                    "unexpected symbol {other:?} in received word"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(ReceivedWord)
    }
}

/// Renders bits as a `0`/`1` string.
pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter()
        .map(|&b| if b == 0 { '0' } else { '1' })
        .collect()
}

/// Systematic encoding with pilots forced to zero and the last `m` punctured
/// bits set by the outer code.
///
/// With the upper accumulator, `v_j = v_{j-1} ⊕ u_j`; a pilot takes
/// `u_j = v_{j-1}` and an outer position takes `u_j = v_{j-1} ⊕ Σ P v`.
/// Checks sum their punctured bits into `w`, and the lower accumulator gives
/// `z_i = z_{i-1} ⊕ w_i`.
pub fn encode(inst: &CodeInstance, info: &[u8]) -> Result<Codeword> {
    if info.len() != inst.info_len() {
        return Err(Error::InvalidInput(format!(
            "information word has {} bits, the code carries {}",
            info.len(),
            inst.info_len()
        )));
    }
    if info.iter().any(|&b| b > 1) {
        return Err(Error::InvalidInput(
            "information bits must be 0 or 1".into(),
        ));
    }
    let k = inst.k();
    let free = k - inst.m_outer();
    let p = inst.outer_p();
    let mut v = vec![0u8; k];
    let mut u = vec![0u8; k];
    let mut next = info.iter();
    let mut prev = 0u8;
    for j in 0..k {
        let target = if inst.is_pilot(j) {
            0
        } else if j >= free {
            let row = j - free;
            (0..free).fold(0u8, |acc, i| acc ^ (p.get(row, i) as u8 & v[i]))
        } else {
            // Information position: the systematic bit is the free choice.
            let bit = *next.next().expect("length checked above");
            if inst.has_upper() {
                prev ^ bit
            } else {
                bit
            }
        };
        v[j] = target;
        u[j] = if inst.has_upper() {
            prev ^ target
        } else {
            target
        };
        prev = target;
    }
    let z: Vec<u8> = {
        let mut acc = 0u8;
        (0..inst.n_checks())
            .map(|i| {
                let w = inst.check_sockets(i).iter().fold(0u8, |a, &j| a ^ v[j]);
                if inst.has_lower() {
                    acc ^= w;
                    acc
                } else {
                    w
                }
            })
            .collect()
    };
    if !inst.has_upper() {
        u.clear();
    }
    Ok(Codeword { u, v, z })
}

/// Information bits recovered from a codeword (inverse of [`encode`]).
pub fn extract_info(inst: &CodeInstance, cw: &Codeword) -> Vec<u8> {
    inst.info_positions()
        .map(|j| if inst.has_upper() { cw.u[j] } else { cw.v[j] })
        .collect()
}

/// Whether `cw` satisfies every constraint of the instance, including the
/// outer code `[P I] v = 0`.
pub fn is_codeword(inst: &CodeInstance, cw: &Codeword) -> bool {
    let k = inst.k();
    if cw.v.len() != k || cw.z.len() != inst.n_checks() {
        return false;
    }
    if inst.has_upper() {
        if cw.u.len() != k {
            return false;
        }
        let mut prev = 0u8;
        for j in 0..k {
            if prev ^ cw.u[j] != cw.v[j] {
                return false;
            }
            prev = cw.v[j];
        }
    }
    if inst.pilots().iter().any(|&j| cw.v[j] != 0) {
        return false;
    }
    let free = k - inst.m_outer();
    for row in 0..inst.m_outer() {
        let s = (0..free).fold(cw.v[free + row], |acc, i| {
            acc ^ (inst.outer_p().get(row, i) as u8 & cw.v[i])
        });
        if s != 0 {
            return false;
        }
    }
    let mut prev = 0u8;
    for i in 0..inst.n_checks() {
        let w = inst.check_sockets(i).iter().fold(0u8, |a, &j| a ^ cw.v[j]);
        let expect = if inst.has_lower() { prev ^ w } else { w };
        if cw.z[i] != expect {
            return false;
        }
        prev = cw.z[i];
    }
    true
}
