use std::collections::HashMap;
use std::sync::Arc;

use super::{FieldElement, FiniteField};
use crate::error::{Error, Result};

/// The identification of a field F_q = GF(p^m) with the subfield of order q
/// inside an extension GF(p^{m d}).
///
/// The class of the indeterminate of `base` is sent to the smallest root (by
/// encoding) of the base modulus in `ext`; every other element follows by
/// evaluating its coefficient polynomial at that root.
#[derive(Debug, Clone)]
pub struct SubfieldEmbedding {
    base: Arc<FiniteField>,
    ext: Arc<FiniteField>,
    root: u32,
    forward: Vec<u32>,
    backward: HashMap<u32, u32>,
}

impl SubfieldEmbedding {
    pub fn new(base: Arc<FiniteField>, ext: Arc<FiniteField>) -> Result<Self> {
        if base.characteristic() != ext.characteristic() {
            return Err(Error::InvalidTower(format!(
                "characteristics differ: {} vs {}",
                base.characteristic(),
                ext.characteristic()
            )));
        }
        if !ext.degree().is_multiple_of(base.degree()) {
            return Err(Error::InvalidTower(format!(
                "degree {} does not divide degree {}",
                base.degree(),
                ext.degree()
            )));
        }

        // Constants of the prime field encode identically in every field of
        // characteristic p, so the base modulus can be evaluated in `ext` directly.
        let modulus = base.modulus().to_vec();
        let eval = |r: u32| {
            modulus
                .iter()
                .rev()
                .fold(0u32, |acc, &c| ext.add_raw(ext.mul_raw(acc, r), c))
        };
        let root = (0..ext.order())
            .find(|&r| eval(r) == 0)
            .expect("the base modulus splits in any extension of its degree multiple");

        let p = base.characteristic();
        let mut forward = Vec::with_capacity(base.order() as usize);
        for y in 0..base.order() {
            let mut v = y;
            let mut acc = 0u32;
            let mut power = 1u32;
            for _ in 0..base.degree() {
                let c = v % p;
                v /= p;
                acc = ext.add_raw(acc, ext.mul_raw(c, power));
                power = ext.mul_raw(power, root);
            }
            forward.push(acc);
        }
        let backward: HashMap<u32, u32> = forward
            .iter()
            .enumerate()
            .map(|(y, &e)| (e, y as u32))
            .collect();
        assert_eq!(backward.len(), forward.len(), "embedding must be injective");

        Ok(Self {
            base,
            ext,
            root,
            forward,
            backward,
        })
    }

    pub fn base(&self) -> &Arc<FiniteField> {
        &self.base
    }

    pub fn ext(&self) -> &Arc<FiniteField> {
        &self.ext
    }

    /// Extension degree [ext : base].
    pub fn relative_degree(&self) -> u32 {
        self.ext.degree() / self.base.degree()
    }

    /// Image of the class of the base field's indeterminate (a root of the
    /// base modulus in `ext`).
    pub fn root(&self) -> FieldElement {
        self.ext.wrap(self.root)
    }

    pub fn image_of_base_generator(&self) -> FieldElement {
        self.ext
            .wrap(self.forward[self.base.generator().value() as usize])
    }

    pub(crate) fn apply_raw(&self, y: u32) -> u32 {
        self.forward[y as usize]
    }

    pub(crate) fn pull_back_raw(&self, x: u32) -> Option<u32> {
        self.backward.get(&x).copied()
    }

    pub fn apply(&self, y: FieldElement) -> Result<FieldElement> {
        self.base.check(&y)?;
        Ok(self.ext.wrap(self.apply_raw(y.value())))
    }

    /// Inverse image of `x`, if `x` lies in the embedded subfield.
    pub fn pull_back(&self, x: FieldElement) -> Result<Option<FieldElement>> {
        self.ext.check(&x)?;
        Ok(self.pull_back_raw(x.value()).map(|y| self.base.wrap(y)))
    }

    pub(crate) fn relative_trace_raw(&self, x: u32) -> u32 {
        let q = self.base.order() as u64;
        let mut acc = 0u32;
        let mut y = x;
        for _ in 0..self.relative_degree() {
            acc = self.ext.add_raw(acc, y);
            y = self.ext.pow_raw(y, q);
        }
        self.pull_back_raw(acc)
            .expect("relative trace lies in the embedded subfield")
    }

    /// Tr(x) = x + x^q + ... + x^{q^{d-1}} with q = |base| and d = [ext : base],
    /// pulled back to `base`.
    pub fn relative_trace(&self, x: FieldElement) -> Result<FieldElement> {
        self.ext.check(&x)?;
        Ok(self.base.wrap(self.relative_trace_raw(x.value())))
    }

    /// Exhaustively checks additivity and multiplicativity over all pairs of
    /// base elements.
    pub fn is_homomorphism(&self) -> bool {
        let (b, e) = (&self.base, &self.ext);
        (0..b.order()).all(|x| {
            (0..b.order()).all(|y| {
                self.apply_raw(b.add_raw(x, y)) == e.add_raw(self.apply_raw(x), self.apply_raw(y))
                    && self.apply_raw(b.mul_raw(x, y))
                        == e.mul_raw(self.apply_raw(x), self.apply_raw(y))
            })
        })
    }
}
