use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Shape, Tower};
use crate::error::{Error, Result};
use crate::field::FieldElement;

pub(crate) const ZERO_LOG: u32 = u32::MAX;

/// Which trace-constrained tuple set indexes the codeword coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// All tuples with Tr(c_1) + ... + Tr(c_k) = a.
    Hat,
    /// The same constraint restricted to tuples with every c_i nonzero.
    Tilde,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Hat => "hat",
            Variant::Tilde => "tilde",
        })
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hat" => Ok(Variant::Hat),
            "tilde" => Ok(Variant::Tilde),
            other => Err(Error::Domain(format!(
                "unknown variant {other:?} (expected hat or tilde)"
            ))),
        }
    }
}

/// Closed-form size of the hat set, q^{m_1+...+m_k-1}.
pub fn hat_size(shape: &Shape) -> u128 {
    (shape.q as u128).pow(shape.total_degree() - 1)
}

/// Closed-form size of the tilde set: (prod + (-1)^{k+1}) / q for a != 0 and
/// (prod + (-1)^k (q-1)) / q for a = 0, with prod = prod_i (q^{m_i} - 1).
pub fn tilde_size(shape: &Shape, a_is_zero: bool) -> u128 {
    let q = shape.q as i128;
    let prod = shape.character_count() as i128;
    let sign: i128 = if shape.k().is_multiple_of(2) { 1 } else { -1 };
    let numerator = if a_is_zero {
        prod + sign * (q - 1)
    } else {
        prod - sign
    };
    assert_eq!(numerator % q, 0, "tilde set size formula is not integral");
    (numerator / q) as u128
}

/// The enumerated tuples of a defining set, in lexicographic order of
/// element encodings (leftmost position most significant).
#[derive(Debug, Clone)]
pub struct DefiningSet {
    variant: Variant,
    a: FieldElement,
    k: usize,
    tuples: Vec<u32>,
    logs: Vec<u32>,
}

impl DefiningSet {
    pub fn enumerate(tower: &Tower, variant: Variant, a: FieldElement) -> Result<Self> {
        tower.base().check(&a)?;
        if variant == Variant::Hat && a.is_zero() {
            return Err(Error::Domain(
                "the hat defining set requires a nonzero a".into(),
            ));
        }
        let k = tower.k();
        let levels = tower.levels();
        let q = tower.q() as usize;
        let skip_zero = variant == Variant::Tilde;

        // Elements of the last level grouped by trace value, ascending.
        let last = &levels[k - 1];
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); q];
        for (x, &tr) in last.traces().iter().enumerate() {
            if !(skip_zero && x == 0) {
                buckets[tr as usize].push(x as u32);
            }
        }

        let mut walker = Walker {
            tower,
            skip_zero,
            target: a.value(),
            buckets: &buckets,
            prefix: Vec::with_capacity(k),
            out: Vec::new(),
        };
        walker.walk(0, 0);
        let tuples = walker.out;

        let len = (tuples.len() / k) as u128;
        let expected = match variant {
            Variant::Hat => hat_size(&tower.shape()),
            Variant::Tilde => tilde_size(&tower.shape(), a.is_zero()),
        };
        assert_eq!(
            len, expected,
            "{variant} set size disagrees with its closed form"
        );

        let logs = tuples
            .chunks(k)
            .flat_map(|t| {
                t.iter()
                    .zip(levels)
                    .map(|(&x, l)| l.field().log_raw(x).unwrap_or(ZERO_LOG))
            })
            .collect();
        Ok(Self {
            variant,
            a,
            k,
            tuples,
            logs,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn a(&self) -> FieldElement {
        self.a
    }

    pub fn len(&self) -> usize {
        self.tuples.len() / self.k
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    /// Encodings of the i-th tuple.
    pub fn tuple(&self, i: usize) -> &[u32] {
        &self.tuples[i * self.k..(i + 1) * self.k]
    }

    pub fn tuples(&self) -> impl Iterator<Item = &[u32]> {
        self.tuples.chunks(self.k)
    }

    /// The i-th tuple as field elements of the respective levels.
    pub fn elements(&self, tower: &Tower, i: usize) -> Vec<FieldElement> {
        self.tuple(i)
            .iter()
            .zip(tower.levels())
            .map(|(&x, l)| l.field().wrap(x))
            .collect()
    }

    /// Discrete logs of every coordinate, `ZERO_LOG` marking zero entries.
    pub(crate) fn logs(&self) -> impl Iterator<Item = &[u32]> {
        self.logs.chunks(self.k)
    }
}

struct Walker<'a> {
    tower: &'a Tower,
    skip_zero: bool,
    target: u32,
    buckets: &'a [Vec<u32>],
    prefix: Vec<u32>,
    out: Vec<u32>,
}

impl Walker<'_> {
    fn walk(&mut self, pos: usize, partial: u32) {
        let base = self.tower.base();
        if pos == self.tower.k() - 1 {
            let needed = base.add_raw(self.target, base.neg_raw(partial));
            for &x in &self.buckets[needed as usize] {
                self.out.extend_from_slice(&self.prefix);
                self.out.push(x);
            }
            return;
        }
        let level = &self.tower.levels()[pos];
        let start = u32::from(self.skip_zero);
        for x in start..level.field().order() {
            let tr = level.traces()[x as usize];
            self.prefix.push(x);
            self.walk(pos + 1, base.add_raw(partial, tr));
            self.prefix.pop();
        }
    }
}
