use std::collections::BTreeMap;
use std::sync::Arc;

use crate::characters::CharacterGroup;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FiniteField, SubfieldEmbedding};

/// The numeric shape of a tower: q and the degrees (m_1, ..., m_k).
/// Enough for every closed form; no fields are built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape {
    pub q: u64,
    pub ext_degrees: Vec<u32>,
}

impl Shape {
    pub fn new(q: u64, ext_degrees: &[u32]) -> Self {
        Self {
            q,
            ext_degrees: ext_degrees.to_vec(),
        }
    }

    pub fn k(&self) -> usize {
        self.ext_degrees.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.ext_degrees.iter().sum()
    }

    /// prod_i (q^{m_i} - 1).
    pub fn character_count(&self) -> u128 {
        self.ext_degrees
            .iter()
            .map(|&d| (self.q as u128).pow(d) - 1)
            .product()
    }
}

/// One extension F_{q^{m_i}} of the tower together with its embedding of
/// F_q, its character tables and the relative trace of every element.
#[derive(Debug, Clone)]
pub struct TowerLevel {
    degree: u32,
    embedding: Arc<SubfieldEmbedding>,
    group: CharacterGroup,
    traces: Arc<Vec<u32>>,
}

impl TowerLevel {
    /// m_i, the degree over F_q.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        self.embedding.ext()
    }

    pub fn embedding(&self) -> &SubfieldEmbedding {
        &self.embedding
    }

    pub fn characters(&self) -> &CharacterGroup {
        &self.group
    }

    /// Relative trace of every element, indexed by element encoding and
    /// given as the encoding of the image in F_q.
    pub(crate) fn traces(&self) -> &[u32] {
        &self.traces
    }

    /// Number of multiplicative characters, q^{m_i} - 1.
    pub fn character_count(&self) -> u32 {
        self.field().group_order()
    }
}

/// A base field F_q = GF(p^m) and extensions F_{q^{m_1}}, ..., F_{q^{m_k}}.
///
/// Every extension generator G_i is chosen so that G_i^{(q^{m_i}-1)/(q-1)} is
/// the embedded base generator. With that choice the canonical character of
/// each extension restricts to the canonical character of F_q, which is the
/// exponent bookkeeping the magnitude theorems rely on.
#[derive(Debug, Clone)]
pub struct Tower {
    p: u32,
    m: u32,
    base: Arc<FiniteField>,
    base_group: CharacterGroup,
    levels: Vec<TowerLevel>,
}

impl Tower {
    pub fn new(p: u32, m: u32, ext_degrees: &[u32]) -> Result<Self> {
        let base = FiniteField::new(p, m)?;
        Self::from_base(base, ext_degrees)
    }

    /// Builds the tower over `base` as given, so a non-canonical base
    /// generator propagates to every level.
    pub fn from_base(base: FiniteField, ext_degrees: &[u32]) -> Result<Self> {
        if ext_degrees.is_empty() {
            return Err(Error::InvalidTower(
                "at least one extension degree is required".into(),
            ));
        }
        if let Some(&d) = ext_degrees.iter().find(|&&d| d == 0) {
            return Err(Error::InvalidTower(format!(
                "extension degree {d} must be positive"
            )));
        }
        let (p, m) = (base.characteristic(), base.degree());
        let base = Arc::new(base);

        let mut by_degree: BTreeMap<u32, TowerLevel> = BTreeMap::new();
        for &d in ext_degrees {
            if by_degree.contains_key(&d) {
                continue;
            }
            let degree = m
                .checked_mul(d)
                .ok_or_else(|| Error::InvalidTower(format!("degree {m}*{d} overflows")))?;
            let level = Self::build_level(&base, FiniteField::new(p, degree)?, d)?;
            by_degree.insert(d, level);
        }
        let levels = ext_degrees.iter().map(|d| by_degree[d].clone()).collect();

        Ok(Self {
            p,
            m,
            base_group: CharacterGroup::new(base.clone()),
            base,
            levels,
        })
    }

    fn build_level(base: &Arc<FiniteField>, canonical: FiniteField, d: u32) -> Result<TowerLevel> {
        let canonical = Arc::new(canonical);
        let probe = SubfieldEmbedding::new(base.clone(), canonical.clone())?;
        let target = probe.image_of_base_generator();
        let cofactor = (canonical.group_order() / base.group_order()) as i64;
        let generator = canonical
            .primitive_elements()
            .find(|&g| canonical.pow(g, cofactor).ok() == Some(target))
            .expect("the norm map is onto the primitive elements of the subfield");
        let ext = Arc::new(canonical.with_generator(generator)?);
        let embedding = SubfieldEmbedding::new(base.clone(), ext.clone())?;
        if base.order() <= 1024 {
            assert!(
                embedding.is_homomorphism(),
                "subfield embedding is not a homomorphism"
            );
        }

        // phi_i(e(y)) = psi(y) on F_q^*, checked on discrete logs and on values.
        let group = CharacterGroup::new(ext.clone());
        let base_group = CharacterGroup::new(base.clone());
        let (phi, psi) = (group.character(1), base_group.character(1));
        for y in base.nonzero_elements() {
            let image = embedding.apply(y)?;
            assert_eq!(
                ext.log(image)? as u64,
                base.log(y)? as u64 * cofactor as u64,
                "extension generator is not compatible with the base generator"
            );
            let diff = phi.eval(image)? - psi.eval(y)?;
            assert!(diff.norm() <= 1e-12, "canonical characters disagree on F_q");
        }

        let traces = (0..ext.order())
            .map(|x| embedding.relative_trace_raw(x))
            .collect();
        Ok(TowerLevel {
            degree: d,
            embedding: Arc::new(embedding),
            group,
            traces: Arc::new(traces),
        })
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.q(), &self.ext_degrees())
    }

    /// m, with q = p^m.
    pub fn base_degree(&self) -> u32 {
        self.m
    }

    /// q, the order of the base field.
    pub fn q(&self) -> u64 {
        self.base.order() as u64
    }

    /// k, the number of extensions.
    pub fn k(&self) -> usize {
        self.levels.len()
    }

    pub fn ext_degrees(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.degree).collect()
    }

    /// m_1 + ... + m_k.
    pub fn total_degree(&self) -> u32 {
        self.levels.iter().map(|l| l.degree).sum()
    }

    pub fn base(&self) -> &Arc<FiniteField> {
        &self.base
    }

    pub fn base_characters(&self) -> &CharacterGroup {
        &self.base_group
    }

    pub fn levels(&self) -> &[TowerLevel] {
        &self.levels
    }

    /// Number of character tuples, prod_i (q^{m_i} - 1).
    pub fn character_count(&self) -> u64 {
        self.levels
            .iter()
            .map(|l| l.character_count() as u64)
            .product()
    }

    /// The tuple at position `index` in lexicographic exponent order
    /// (t_1 varies slowest).
    pub fn exponent_tuple(&self, mut index: u64) -> Vec<u32> {
        let mut out = vec![0u32; self.k()];
        for (slot, level) in out.iter_mut().zip(&self.levels).rev() {
            let radix = level.character_count() as u64;
            *slot = (index % radix) as u32;
            index /= radix;
        }
        out
    }

    pub fn exponent_tuples(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        (0..self.character_count()).map(|i| self.exponent_tuple(i))
    }

    /// Reduces each t_i modulo q^{m_i} - 1.
    pub fn canonical_exponents(&self, exponents: &[u64]) -> Result<Vec<u32>> {
        if exponents.len() != self.k() {
            return Err(Error::Domain(format!(
                "expected {} exponents, got {}",
                self.k(),
                exponents.len()
            )));
        }
        Ok(exponents
            .iter()
            .zip(&self.levels)
            .map(|(&t, l)| (t % l.character_count() as u64) as u32)
            .collect())
    }

    /// The tower made of the levels at `positions`, sharing fields and tables.
    pub fn restrict(&self, positions: &[usize]) -> Result<Self> {
        if positions.is_empty() || positions.iter().any(|&i| i >= self.k()) {
            return Err(Error::InvalidTower("invalid level selection".into()));
        }
        Ok(Self {
            levels: positions.iter().map(|&i| self.levels[i].clone()).collect(),
            ..self.clone()
        })
    }

    /// a = g^index for the base generator g.
    pub fn base_element_from_index(&self, index: i64) -> Result<FieldElement> {
        self.base.pow(self.base.generator(), index)
    }
}
