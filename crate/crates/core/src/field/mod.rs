//! Finite fields GF(p^n) with deterministic construction.
//!
//! Elements are identified with the base-p integer encoding of their
//! coefficient vector (constant term least significant). The modulus is the
//! monic irreducible polynomial of degree n with the smallest encoding of its
//! lower coefficients, and the generator is the smallest element of full
//! multiplicative order. Multiplication, inversion and powers go through
//! exp/log tables; addition is digit-wise.

mod embedding;
pub(crate) mod poly;

pub use embedding::SubfieldEmbedding;

use std::fmt;

use crate::error::{Error, Result};

/// Largest field order that will be tabulated.
pub const MAX_FIELD_ORDER: u64 = 1 << 24;

const NO_LOG: u32 = u32::MAX;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` into `(p, m)` with `q = p^m`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut m = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p as u32, m))
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn checked_order(p: u32, n: u32) -> Result<u32> {
    if !is_prime(p as u64) {
        return Err(Error::NotPrime(p as u64));
    }
    if n == 0 {
        return Err(Error::Domain("extension degree must be at least 1".into()));
    }
    let order = (p as u64)
        .checked_pow(n)
        .filter(|&o| o <= MAX_FIELD_ORDER)
        .ok_or(Error::FieldTooLarge { p: p as u64, n })?;
    Ok(order as u32)
}

fn encode(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

fn decode(mut value: u32, p: u32, n: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(n as usize);
    for _ in 0..n {
        out.push(value % p);
        value /= p;
    }
    out
}

/// Returns the monic irreducible polynomial of degree `n` over F_p whose
/// lower coefficients encode the smallest base-p integer. The result has
/// `n + 1` entries, constant term first, ending in the leading 1.
pub fn find_irreducible(p: u32, n: u32) -> Result<Vec<u32>> {
    let order = checked_order(p, n)?;
    for candidate in 0..order {
        let mut f = decode(candidate, p, n);
        f.push(1);
        if poly::is_irreducible(&f, p) {
            return Ok(f);
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_{p}")
}

/// Identifies the field an element belongs to. Fields with equal `(p, n)`
/// share the same modulus and therefore the same element encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldTag {
    pub p: u32,
    pub n: u32,
}

/// An element of some GF(p^n), stored as its base-p encoding.
///
/// Ordering follows the encoding, which is the enumeration order used for
/// defining sets and codebook rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement {
    value: u32,
    tag: FieldTag,
}

impl FieldElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }
}

#[derive(Clone)]
pub struct FiniteField {
    p: u32,
    n: u32,
    order: u32,
    modulus: Vec<u32>,
    generator: u32,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteField")
            .field("p", &self.p)
            .field("n", &self.n)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator)
            .finish()
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.n == other.n && self.generator == other.generator
    }
}

impl Eq for FiniteField {}

impl FiniteField {
    /// Builds GF(p^n) with the canonical modulus and the smallest primitive element.
    pub fn new(p: u32, n: u32) -> Result<Self> {
        let order = checked_order(p, n)?;
        let modulus = find_irreducible(p, n)?;
        let group_order = (order - 1) as u64;
        let factors = distinct_prime_factors(group_order);
        let generator = (1..order)
            .find(|&g| {
                let g = decode(g, p, n);
                factors
                    .iter()
                    .all(|r| poly::powmod(&g, group_order / r, &modulus, p) != [1])
                    && poly::powmod(&g, group_order, &modulus, p) == [1]
            })
            .expect("the multiplicative group of a finite field is cyclic");
        Ok(Self::with_tables(p, n, order, modulus, generator))
    }

    fn with_tables(p: u32, n: u32, order: u32, modulus: Vec<u32>, generator: u32) -> Self {
        let group_order = (order - 1) as usize;
        let mut exp = Vec::with_capacity(group_order);
        let mut log = vec![NO_LOG; order as usize];
        let g = decode(generator, p, n);
        let mut current = vec![1u32];
        for k in 0..group_order {
            let mut coeffs = current.clone();
            coeffs.resize(n as usize, 0);
            let value = encode(&coeffs, p);
            assert_eq!(log[value as usize], NO_LOG, "generator is not primitive");
            exp.push(value);
            log[value as usize] = k as u32;
            current = poly::mulmod(&current, &g, &modulus, p);
        }
        assert_eq!(current, vec![1], "generator order does not divide p^n - 1");
        let field = Self {
            p,
            n,
            order,
            modulus,
            generator,
            exp,
            log,
        };
        debug_assert!(field.tables_consistent());
        field
    }

    /// Same field (same modulus, same encodings), tabulated against another
    /// primitive element.
    pub fn with_generator(&self, generator: FieldElement) -> Result<Self> {
        self.check(&generator)?;
        if !self.is_primitive(generator) {
            return Err(Error::Domain(format!(
                "element {} is not a primitive element of GF({}^{})",
                generator.value, self.p, self.n
            )));
        }
        Ok(Self::with_tables(
            self.p,
            self.n,
            self.order,
            self.modulus.clone(),
            generator.value,
        ))
    }

    fn tables_consistent(&self) -> bool {
        self.exp
            .iter()
            .enumerate()
            .all(|(k, &v)| v != 0 && self.log[v as usize] == k as u32)
            && self.log[0] == NO_LOG
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Number of elements, p^n.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Order of the multiplicative group, p^n - 1.
    pub fn group_order(&self) -> u32 {
        self.order - 1
    }

    pub fn tag(&self) -> FieldTag {
        FieldTag {
            p: self.p,
            n: self.n,
        }
    }

    /// Modulus coefficients, constant term first, including the leading 1.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElement {
        self.wrap(self.generator)
    }

    pub fn zero(&self) -> FieldElement {
        self.wrap(0)
    }

    pub fn one(&self) -> FieldElement {
        self.wrap(1)
    }

    pub fn element(&self, value: u32) -> Result<FieldElement> {
        if value >= self.order {
            return Err(Error::Domain(format!(
                "{value} does not encode an element of GF({}^{})",
                self.p, self.n
            )));
        }
        Ok(self.wrap(value))
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() != self.n as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::Domain(format!(
                "coefficient vector must have {} entries in [0, {})",
                self.n, self.p
            )));
        }
        Ok(self.wrap(encode(coeffs, self.p)))
    }

    pub fn coeffs(&self, x: FieldElement) -> Vec<u32> {
        decode(x.value, self.p, self.n)
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order).map(|v| self.wrap(v))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (1..self.order).map(|v| self.wrap(v))
    }

    pub(crate) fn wrap(&self, value: u32) -> FieldElement {
        debug_assert!(value < self.order);
        FieldElement {
            value,
            tag: self.tag(),
        }
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        x.tag == self.tag()
    }

    pub(crate) fn check(&self, x: &FieldElement) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                left_p: self.p,
                left_n: self.n,
                right_p: x.tag.p,
                right_n: x.tag.n,
            })
        }
    }

    // Raw arithmetic on encodings. Callers guarantee membership.

    pub(crate) fn add_raw(&self, x: u32, y: u32) -> u32 {
        if self.p == 2 {
            return x ^ y;
        }
        if self.n == 1 {
            return (x + y) % self.p;
        }
        let (p, mut x, mut y) = (self.p, x, y);
        let (mut out, mut scale) = (0u32, 1u32);
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * scale;
            x /= p;
            y /= p;
            scale = scale.wrapping_mul(p);
        }
        out
    }

    pub(crate) fn neg_raw(&self, x: u32) -> u32 {
        if self.p == 2 {
            return x;
        }
        let (p, mut x) = (self.p, x);
        let (mut out, mut scale) = (0u32, 1u32);
        while x > 0 {
            out += ((p - x % p) % p) * scale;
            x /= p;
            scale = scale.wrapping_mul(p);
        }
        out
    }

    pub(crate) fn mul_raw(&self, x: u32, y: u32) -> u32 {
        if x == 0 || y == 0 {
            return 0;
        }
        let k =
            (self.log[x as usize] as u64 + self.log[y as usize] as u64) % self.group_order() as u64;
        self.exp[k as usize]
    }

    /// x^e for e >= 0, with 0^0 = 1.
    pub(crate) fn pow_raw(&self, x: u32, e: u64) -> u32 {
        if x == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let k = (self.log[x as usize] as u128 * e as u128) % self.group_order() as u128;
        self.exp[k as usize]
    }

    /// Discrete log with respect to the generator; `None` for zero.
    pub(crate) fn log_raw(&self, x: u32) -> Option<u32> {
        match self.log[x as usize] {
            NO_LOG => None,
            k => Some(k),
        }
    }

    pub fn add(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        self.check(&x)?;
        self.check(&y)?;
        Ok(self.wrap(self.add_raw(x.value, y.value)))
    }

    pub fn neg(&self, x: FieldElement) -> Result<FieldElement> {
        self.check(&x)?;
        Ok(self.wrap(self.neg_raw(x.value)))
    }

    pub fn sub(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        self.check(&x)?;
        self.check(&y)?;
        Ok(self.wrap(self.add_raw(x.value, self.neg_raw(y.value))))
    }

    pub fn mul(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        self.check(&x)?;
        self.check(&y)?;
        Ok(self.wrap(self.mul_raw(x.value, y.value)))
    }

    pub fn inv(&self, x: FieldElement) -> Result<FieldElement> {
        self.check(&x)?;
        let k = self.log_raw(x.value).ok_or(Error::ZeroInverse)?;
        let ord = self.group_order();
        Ok(self.wrap(self.exp[((ord - k) % ord) as usize]))
    }

    /// x^e for any integer e. Nonzero bases reduce e modulo p^n - 1; a zero
    /// base accepts e >= 0 only (0^0 = 1).
    pub fn pow(&self, x: FieldElement, e: i64) -> Result<FieldElement> {
        self.check(&x)?;
        match self.log_raw(x.value) {
            None if e < 0 => Err(Error::ZeroInverse),
            None => Ok(self.wrap(if e == 0 { 1 } else { 0 })),
            Some(k) => {
                let ord = self.group_order() as i128;
                let idx = (k as i128 * e as i128).rem_euclid(ord);
                Ok(self.wrap(self.exp[idx as usize]))
            }
        }
    }

    /// Discrete logarithm base the field generator.
    pub fn log(&self, x: FieldElement) -> Result<u32> {
        self.check(&x)?;
        self.log_raw(x.value)
            .ok_or_else(|| Error::Domain("log of zero".into()))
    }

    pub fn multiplicative_order(&self, x: FieldElement) -> Result<u32> {
        let k = self.log(x)? as u64;
        let ord = self.group_order() as u64;
        Ok((ord / gcd_u64(k, ord)) as u32)
    }

    pub fn is_primitive(&self, x: FieldElement) -> bool {
        match self.log_raw(x.value) {
            Some(k) if self.contains(&x) => gcd_u64(k as u64, self.group_order() as u64) == 1,
            _ => false,
        }
    }

    /// Primitive elements in encoding order.
    pub fn primitive_elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        self.nonzero_elements().filter(|&x| self.is_primitive(x))
    }

    pub(crate) fn absolute_trace_raw(&self, x: u32) -> u32 {
        let mut acc = 0;
        let mut y = x;
        for _ in 0..self.n {
            acc = self.add_raw(acc, y);
            y = self.pow_raw(y, self.p as u64);
        }
        debug_assert!(acc < self.p, "absolute trace must land in the prime field");
        acc
    }

    /// Tr(x) = x + x^p + ... + x^{p^{n-1}}, returned as a residue in [0, p).
    pub fn absolute_trace(&self, x: FieldElement) -> Result<u32> {
        self.check(&x)?;
        Ok(self.absolute_trace_raw(x.value))
    }
}
