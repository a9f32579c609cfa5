//! Additive and multiplicative characters of a finite field.
//!
//! Multiplicative characters are indexed by an exponent `t` relative to the
//! field's fixed generator g: psi_t(g^k) = zeta^{t k} with zeta = e^{2 pi i/(q-1)}.
//! They are extended to zero by psi_0(0) = 1 and psi_t(0) = 0 for t != 0.
//! Additive characters are chi_a(x) = zeta_p^{Tr(a x)}.
//!
//! All values are lookups into a precomputed table of roots of unity, so
//! evaluating the same character twice gives bit-identical results.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FiniteField};

pub type Complex = Complex64;

/// The h-th roots of unity zeta_h^k, k in [0, h).
///
/// The second half of the table mirrors the first as exact conjugates, and
/// the points 1, i, -1, -i are stored exactly.
#[derive(Debug, Clone)]
pub struct RootsOfUnity {
    values: Vec<Complex>,
}

impl RootsOfUnity {
    pub fn new(order: u32) -> Self {
        assert!(order >= 1);
        let h = order as u64;
        let mut values: Vec<Complex> = Vec::with_capacity(order as usize);
        for k in 0..h {
            let v = if 2 * k > h {
                values[(h - k) as usize].conj()
            } else if k == 0 {
                Complex::new(1.0, 0.0)
            } else if 4 * k == h {
                Complex::new(0.0, 1.0)
            } else if 2 * k == h {
                Complex::new(-1.0, 0.0)
            } else {
                let angle = TAU * k as f64 / h as f64;
                Complex::new(angle.cos(), angle.sin())
            };
            values.push(v);
        }
        Self { values }
    }

    pub fn order(&self) -> u32 {
        self.values.len() as u32
    }

    /// zeta_h^k, with k reduced mod h.
    pub fn get(&self, k: u64) -> Complex {
        self.values[(k % self.values.len() as u64) as usize]
    }
}

/// Character tables of one field: the (q-1)-th roots of unity for
/// multiplicative characters and the p-th roots for additive ones.
#[derive(Debug, Clone)]
pub struct CharacterGroup {
    field: Arc<FiniteField>,
    mult_roots: Arc<RootsOfUnity>,
    add_roots: Arc<RootsOfUnity>,
}

impl CharacterGroup {
    pub fn new(field: Arc<FiniteField>) -> Self {
        let mult_roots = Arc::new(RootsOfUnity::new(field.group_order()));
        let add_roots = Arc::new(RootsOfUnity::new(field.characteristic()));
        Self {
            field,
            mult_roots,
            add_roots,
        }
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    /// psi_t, with t reduced modulo q - 1.
    pub fn character(&self, t: u64) -> MultiplicativeCharacter {
        MultiplicativeCharacter {
            field: self.field.clone(),
            roots: self.mult_roots.clone(),
            t: (t % self.field.group_order() as u64) as u32,
        }
    }

    pub fn trivial(&self) -> MultiplicativeCharacter {
        self.character(0)
    }

    /// All q - 1 multiplicative characters in exponent order.
    pub fn characters(&self) -> impl Iterator<Item = MultiplicativeCharacter> + '_ {
        (0..self.field.group_order() as u64).map(|t| self.character(t))
    }

    pub fn additive(&self, a: FieldElement) -> Result<AdditiveCharacter> {
        self.field.check(&a)?;
        Ok(AdditiveCharacter {
            field: self.field.clone(),
            roots: self.add_roots.clone(),
            a: a.value(),
        })
    }

    /// chi_1, the canonical additive character.
    pub fn canonical_additive(&self) -> AdditiveCharacter {
        self.additive(self.field.one())
            .expect("one belongs to its field")
    }

    /// Extended evaluation of psi_t at an element given by its discrete log
    /// (`None` for zero).
    pub(crate) fn value_at_log(&self, t: u32, log: Option<u32>) -> Complex {
        match log {
            Some(k) => self.mult_roots.get(t as u64 * k as u64),
            None if t == 0 => Complex::new(1.0, 0.0),
            None => Complex::new(0.0, 0.0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MultiplicativeCharacter {
    field: Arc<FiniteField>,
    roots: Arc<RootsOfUnity>,
    t: u32,
}

impl MultiplicativeCharacter {
    pub fn exponent(&self) -> u32 {
        self.t
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn is_trivial(&self) -> bool {
        self.t == 0
    }

    pub(crate) fn eval_raw(&self, x: u32) -> Complex {
        match self.field.log_raw(x) {
            Some(k) => self.roots.get(self.t as u64 * k as u64),
            None if self.t == 0 => Complex::new(1.0, 0.0),
            None => Complex::new(0.0, 0.0),
        }
    }

    pub fn eval(&self, x: FieldElement) -> Result<Complex> {
        self.field.check(&x)?;
        Ok(self.eval_raw(x.value()))
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                left_p: self.field.characteristic(),
                left_n: self.field.degree(),
                right_p: other.field.characteristic(),
                right_n: other.field.degree(),
            })
        }
    }

    /// Pointwise product psi * psi'.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let ord = self.field.group_order() as u64;
        Ok(Self {
            t: ((self.t as u64 + other.t as u64) % ord) as u32,
            ..self.clone()
        })
    }

    /// The conjugate character, which is also the inverse.
    pub fn conjugate(&self) -> Self {
        let ord = self.field.group_order();
        Self {
            t: (ord - self.t) % ord,
            ..self.clone()
        }
    }
}

impl PartialEq for MultiplicativeCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.t == other.t
    }
}

#[derive(Debug, Clone)]
pub struct AdditiveCharacter {
    field: Arc<FiniteField>,
    roots: Arc<RootsOfUnity>,
    a: u32,
}

impl AdditiveCharacter {
    pub fn parameter(&self) -> FieldElement {
        self.field.wrap(self.a)
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn is_trivial(&self) -> bool {
        self.a == 0
    }

    pub(crate) fn eval_raw(&self, x: u32) -> Complex {
        let tr = self.field.absolute_trace_raw(self.field.mul_raw(self.a, x));
        self.roots.get(tr as u64)
    }

    pub fn eval(&self, x: FieldElement) -> Result<Complex> {
        self.field.check(&x)?;
        Ok(self.eval_raw(x.value()))
    }
}
