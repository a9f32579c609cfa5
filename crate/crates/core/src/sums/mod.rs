//! Gauss sums, Jacobi sums and the generalized Jacobi sums over trace
//! defining sets.
//!
//! Every sum here is a brute-force enumeration. The closed-form magnitudes
//! in [`predicted_magnitude`] are never used to compute a sum; they are what
//! [`verify_all`] checks the sums against.

mod defining_set;
mod tower;
mod verify;

pub use defining_set::{hat_size, tilde_size, DefiningSet, Variant};
pub use tower::{Shape, Tower, TowerLevel};
pub use verify::{
    verify_all, CharSumReport, RelationCheck, SumCheck, Verification, VerifyOptions,
    DEFAULT_TOLERANCE,
};

use std::fmt;

use serde::Serialize;

use crate::characters::{AdditiveCharacter, Complex, MultiplicativeCharacter};
use crate::error::{Error, Result};
use crate::field::FieldElement;
use defining_set::ZERO_LOG;

fn same_field(psi: &MultiplicativeCharacter, chi: &AdditiveCharacter) -> Result<()> {
    if psi.field() == chi.field() {
        Ok(())
    } else {
        Err(Error::FieldMismatch {
            left_p: psi.field().characteristic(),
            left_n: psi.field().degree(),
            right_p: chi.field().characteristic(),
            right_n: chi.field().degree(),
        })
    }
}

/// G(psi, chi) = sum over nonzero x of psi(x) chi(x).
pub fn gauss_sum(psi: &MultiplicativeCharacter, chi: &AdditiveCharacter) -> Result<Complex> {
    same_field(psi, chi)?;
    Ok((1..psi.field().order())
        .map(|x| psi.eval_raw(x) * chi.eval_raw(x))
        .sum())
}

/// The Gauss sum over all of F_q, with psi extended to zero.
pub fn extended_gauss_sum(
    psi: &MultiplicativeCharacter,
    chi: &AdditiveCharacter,
) -> Result<Complex> {
    same_field(psi, chi)?;
    Ok((0..psi.field().order())
        .map(|x| psi.eval_raw(x) * chi.eval_raw(x))
        .sum())
}

/// J_a(lambda_1, ..., lambda_k): the sum of lambda_1(c_1)...lambda_k(c_k) over
/// all tuples in F_q^k with c_1 + ... + c_k = a, characters extended to zero.
pub fn classical_jacobi(lams: &[MultiplicativeCharacter], a: FieldElement) -> Result<Complex> {
    let first = lams
        .first()
        .ok_or_else(|| Error::Domain("at least one character is required".into()))?;
    let field = first.field().clone();
    field.check(&a)?;
    if let Some(other) = lams.iter().find(|l| l.field() != &field) {
        return Err(Error::FieldMismatch {
            left_p: field.characteristic(),
            left_n: field.degree(),
            right_p: other.field().characteristic(),
            right_n: other.field().degree(),
        });
    }
    let q = field.order() as u64;
    let k = lams.len() as u32;
    let free = q.pow(k - 1);
    let mut total = Complex::new(0.0, 0.0);
    for index in 0..free {
        let mut rest = index;
        let mut partial = 0u32;
        let mut term = Complex::new(1.0, 0.0);
        for lam in &lams[..lams.len() - 1] {
            let c = (rest % q) as u32;
            rest /= q;
            partial = field.add_raw(partial, c);
            term *= lam.eval_raw(c);
        }
        let last = field.add_raw(a.value(), field.neg_raw(partial));
        total += term * lams[lams.len() - 1].eval_raw(last);
    }
    Ok(total)
}

/// sum over the tuples of `set` of lambda_1(c_1)...lambda_k(c_k), with
/// lambda_i the character of exponent `exponents[i]` on level i.
pub fn character_sum(tower: &Tower, set: &DefiningSet, exponents: &[u64]) -> Result<Complex> {
    let t = tower.canonical_exponents(exponents)?;
    Ok(character_sum_canonical(tower, set, &t))
}

pub(crate) fn character_sum_canonical(tower: &Tower, set: &DefiningSet, t: &[u32]) -> Complex {
    let levels = tower.levels();
    set.logs()
        .map(|logs| {
            logs.iter().zip(t).zip(levels).fold(
                Complex::new(1.0, 0.0),
                |acc, ((&log, &ti), level)| {
                    let log = (log != ZERO_LOG).then_some(log);
                    acc * level.characters().value_at_log(ti, log)
                },
            )
        })
        .sum()
}

/// The generalized Jacobi sum over the hat defining set; `a` must be nonzero.
pub fn generalized_jacobi(tower: &Tower, exponents: &[u64], a: FieldElement) -> Result<Complex> {
    if a.is_zero() {
        return Err(Error::Domain(
            "the generalized Jacobi sum is defined for nonzero a only".into(),
        ));
    }
    let set = DefiningSet::enumerate(tower, Variant::Hat, a)?;
    character_sum(tower, &set, exponents)
}

/// The related sum over the tilde defining set (every c_i nonzero); any a.
pub fn related_jacobi(tower: &Tower, exponents: &[u64], a: FieldElement) -> Result<Complex> {
    let set = DefiningSet::enumerate(tower, Variant::Tilde, a)?;
    character_sum(tower, &set, exponents)
}

/// Which clause of the magnitude theorems applies to an exponent tuple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum SumCase {
    /// Every character trivial: the sum is the size of the defining set.
    AllTrivial,
    /// Some but not all trivial (hat sum only): the sum vanishes.
    Mixed,
    /// `h` of the k characters nontrivial (tilde sum only) and their
    /// exponent sum is 0 mod q-1.
    PartialSumZero { h: usize },
    /// `h` of the k characters nontrivial (tilde sum only), exponent sum
    /// nonzero mod q-1.
    PartialSumNonzero { h: usize },
    /// All nontrivial, exponent sum 0 mod q-1.
    AllNontrivialSumZero,
    /// All nontrivial, exponent sum nonzero mod q-1.
    AllNontrivialSumNonzero,
}

impl SumCase {
    /// Cases whose theorem gives the exact value rather than only the magnitude.
    pub fn is_exact(&self) -> bool {
        matches!(self, SumCase::AllTrivial | SumCase::Mixed)
    }
}

impl fmt::Display for SumCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SumCase::AllTrivial => write!(f, "all trivial"),
            SumCase::Mixed => write!(f, "mixed"),
            SumCase::PartialSumZero { h } => write!(f, "{h} nontrivial, sum = 0"),
            SumCase::PartialSumNonzero { h } => write!(f, "{h} nontrivial, sum != 0"),
            SumCase::AllNontrivialSumZero => write!(f, "all nontrivial, sum = 0"),
            SumCase::AllNontrivialSumNonzero => write!(f, "all nontrivial, sum != 0"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    pub magnitude: f64,
    #[serde(flatten)]
    pub case: SumCase,
}

/// Closed-form magnitude of the hat sum (`Variant::Hat`) or the tilde sum
/// (`Variant::Tilde`) at a nonzero a.
///
/// For the hat sum the exponent sum runs over all positions; for the tilde
/// sum it runs over the nontrivial positions only, and so does the degree
/// sum in the exponent of q.
pub fn predicted_magnitude(
    tower: &Tower,
    exponents: &[u64],
    variant: Variant,
) -> Result<Prediction> {
    let t = tower.canonical_exponents(exponents)?;
    let q = tower.q();
    let qf = q as f64;
    let k = tower.k();
    let nontrivial: Vec<usize> = (0..k).filter(|&i| t[i] != 0).collect();
    let h = nontrivial.len();

    if h == 0 {
        let magnitude = match variant {
            Variant::Hat => hat_size(&tower.shape()) as f64,
            Variant::Tilde => tilde_size(&tower.shape(), false) as f64,
        };
        return Ok(Prediction {
            magnitude,
            case: SumCase::AllTrivial,
        });
    }
    if h < k && variant == Variant::Hat {
        return Ok(Prediction {
            magnitude: 0.0,
            case: SumCase::Mixed,
        });
    }

    let degrees: u32 = nontrivial.iter().map(|&i| tower.levels()[i].degree()).sum();
    let exponent_sum: u64 = nontrivial.iter().map(|&i| t[i] as u64).sum();
    let zero = exponent_sum.is_multiple_of(q - 1);
    let power = if zero {
        degrees as f64 - 2.0
    } else {
        degrees as f64 - 1.0
    };
    let case = match (h == k, zero) {
        (true, true) => SumCase::AllNontrivialSumZero,
        (true, false) => SumCase::AllNontrivialSumNonzero,
        (false, true) => SumCase::PartialSumZero { h },
        (false, false) => SumCase::PartialSumNonzero { h },
    };
    Ok(Prediction {
        magnitude: qf.powf(power / 2.0),
        case,
    })
}
