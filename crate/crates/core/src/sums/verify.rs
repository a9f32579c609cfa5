use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use super::{
    character_sum_canonical, hat_size, predicted_magnitude, tilde_size, DefiningSet, SumCase,
    Tower, Variant,
};
use crate::characters::Complex;
use crate::error::{Error, Result};
use crate::field::FieldElement;

/// Absolute tolerance for sums of up to ~10^6 unit-modulus terms.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub tolerance: f64,
    /// Maximum number of character-product terms to evaluate.
    pub budget: u128,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            budget: 1_000_000_000,
        }
    }
}

/// One computed sum against its theorem.
#[derive(Debug, Clone, Serialize)]
pub struct SumCheck {
    #[serde(serialize_with = "serialize_complex")]
    pub value: Complex,
    /// `None` where no magnitude theorem applies (tilde sum at a = 0).
    pub predicted: Option<f64>,
    pub case: SumCase,
    /// |value - predicted| for exact cases, ||value| - predicted| otherwise.
    pub deviation: f64,
    pub passed: bool,
}

/// The relation between the tilde and hat sums at the same exponents.
#[derive(Debug, Clone, Serialize)]
pub struct RelationCheck {
    /// (-1)^{k-h} times the hat sum over the h nontrivial positions.
    #[serde(serialize_with = "serialize_complex")]
    pub expected: Complex,
    pub deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CharSumReport {
    pub exponents: Vec<u32>,
    /// Encoding of a in F_q.
    pub a: u32,
    /// Absent when a = 0.
    pub hat: Option<SumCheck>,
    pub tilde: SumCheck,
    /// Absent when every character is trivial or a = 0.
    pub relation: Option<RelationCheck>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verification {
    pub reports: Vec<CharSumReport>,
    pub passed: usize,
    pub total: usize,
}

impl Verification {
    pub fn all_passed(&self) -> bool {
        self.passed == self.total
    }
}

fn serialize_complex<S: serde::Serializer>(
    z: &Complex,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn check(
    value: Complex,
    predicted: Option<(f64, SumCase)>,
    fallback: SumCase,
    tol: f64,
) -> SumCheck {
    match predicted {
        Some((magnitude, case)) => {
            let deviation = if case.is_exact() {
                (value - Complex::new(magnitude, 0.0)).norm()
            } else {
                (value.norm() - magnitude).abs()
            };
            SumCheck {
                value,
                predicted: Some(magnitude),
                case,
                deviation,
                passed: deviation <= tol,
            }
        }
        None => SumCheck {
            value,
            predicted: None,
            case: fallback,
            deviation: 0.0,
            passed: true,
        },
    }
}

/// Number of character-product terms `verify_all` evaluates for `a`.
pub fn verification_work(tower: &Tower, a_is_zero: bool) -> u128 {
    let tuples = tower.character_count() as u128;
    let shape = tower.shape();
    let hat = if a_is_zero { 0 } else { hat_size(&shape) };
    // sub-tower hat sums for the relation check are bounded by the full one
    tuples * (2 * hat + tilde_size(&shape, a_is_zero))
}

/// Computes the hat and tilde sums for every exponent tuple of `tower` at
/// `a`, and checks each against the magnitude theorems and the relation
/// between the two sums.
pub fn verify_all(tower: &Tower, a: FieldElement, options: &VerifyOptions) -> Result<Verification> {
    tower.base().check(&a)?;
    let required = verification_work(tower, a.is_zero());
    if required > options.budget {
        return Err(Error::BudgetExceeded {
            required,
            budget: options.budget,
        });
    }
    let tol = options.tolerance;
    let k = tower.k();

    let hat_set = (!a.is_zero())
        .then(|| DefiningSet::enumerate(tower, Variant::Hat, a))
        .transpose()?;
    let tilde_set = DefiningSet::enumerate(tower, Variant::Tilde, a)?;

    // Hat sets of every proper sub-tower, keyed by position mask.
    let mut sub_towers: HashMap<u32, (Tower, DefiningSet)> = HashMap::new();
    if hat_set.is_some() && k > 1 {
        for mask in 1..(1u32 << k) - 1 {
            let positions: Vec<usize> = (0..k).filter(|i| mask >> i & 1 == 1).collect();
            let sub = tower.restrict(&positions)?;
            let set = DefiningSet::enumerate(&sub, Variant::Hat, a)?;
            sub_towers.insert(mask, (sub, set));
        }
    }

    let reports: Vec<CharSumReport> = (0..tower.character_count())
        .into_par_iter()
        .map(|index| {
            let t = tower.exponent_tuple(index);
            let t64: Vec<u64> = t.iter().map(|&x| x as u64).collect();
            let mask = (0..k).fold(0u32, |m, i| if t[i] != 0 { m | 1 << i } else { m });

            let tilde_value = character_sum_canonical(tower, &tilde_set, &t);
            let tilde_prediction = (!a.is_zero()).then(|| {
                let p =
                    predicted_magnitude(tower, &t64, Variant::Tilde).expect("canonical exponents");
                (p.magnitude, p.case)
            });
            let tilde_case = predicted_magnitude(tower, &t64, Variant::Tilde)
                .expect("canonical exponents")
                .case;
            let tilde = check(tilde_value, tilde_prediction, tilde_case, tol);

            let hat = hat_set.as_ref().map(|set| {
                let value = character_sum_canonical(tower, set, &t);
                let p =
                    predicted_magnitude(tower, &t64, Variant::Hat).expect("canonical exponents");
                check(value, Some((p.magnitude, p.case)), p.case, tol)
            });

            let relation = hat.as_ref().and_then(|hat| {
                let h = mask.count_ones() as usize;
                if h == 0 {
                    return None;
                }
                let expected = if h == k {
                    hat.value
                } else {
                    let (sub, set) = &sub_towers[&mask];
                    let sub_t: Vec<u32> = t.iter().copied().filter(|&x| x != 0).collect();
                    let sign = if (k - h).is_multiple_of(2) { 1.0 } else { -1.0 };
                    character_sum_canonical(sub, set, &sub_t) * sign
                };
                let deviation = (tilde.value - expected).norm();
                Some(RelationCheck {
                    expected,
                    deviation,
                    passed: deviation <= tol,
                })
            });

            let passed = tilde.passed
                && hat.as_ref().is_none_or(|c| c.passed)
                && relation.as_ref().is_none_or(|r| r.passed);
            CharSumReport {
                exponents: t,
                a: a.value(),
                hat,
                tilde,
                relation,
                passed,
            }
        })
        .collect();

    let passed = reports.iter().filter(|r| r.passed).count();
    Ok(Verification {
        total: reports.len(),
        passed,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q4_tower_passes_everywhere() {
        let t = Tower::new(2, 2, &[1, 2]).unwrap();
        let v = verify_all(&t, t.base().generator(), &VerifyOptions::default()).unwrap();
        assert_eq!(v.total, 45);
        assert!(v.all_passed());
        let mixed = v
            .reports
            .iter()
            .filter(|r| r.exponents.contains(&0))
            .count();
        assert_eq!(mixed, 1 + 2 + 14);
    }

    #[test]
    fn magnitudes_do_not_depend_on_a() {
        let t = Tower::new(3, 1, &[2]).unwrap();
        let f = t.base().clone();
        let runs: Vec<Verification> = f
            .nonzero_elements()
            .map(|a| verify_all(&t, a, &VerifyOptions::default()).unwrap())
            .collect();
        for (x, y) in runs[0].reports.iter().zip(&runs[1].reports) {
            let (hx, hy) = (x.hat.as_ref().unwrap(), y.hat.as_ref().unwrap());
            assert!((hx.value.norm() - hy.value.norm()).abs() < 1e-9);
            assert!((x.tilde.value.norm() - y.tilde.value.norm()).abs() < 1e-9);
        }
        assert!(runs.iter().all(|v| v.all_passed()));
    }

    #[test]
    fn binary_base_has_only_the_trivial_tuple() {
        let t = Tower::new(2, 1, &[1, 1, 1]).unwrap();
        let v = verify_all(&t, t.base().one(), &VerifyOptions::default()).unwrap();
        assert_eq!(v.total, 1);
        assert_eq!(
            v.reports[0].hat.as_ref().unwrap().value,
            Complex::new(4.0, 0.0)
        );
        assert!(v.all_passed());
    }

    #[test]
    fn zero_a_reports_without_judgment() {
        let t = Tower::new(2, 2, &[1, 2]).unwrap();
        let v = verify_all(&t, t.base().zero(), &VerifyOptions::default()).unwrap();
        assert_eq!(v.total, 45);
        assert!(v
            .reports
            .iter()
            .all(|r| r.hat.is_none() && r.relation.is_none()));
        assert!(v.reports.iter().all(|r| r.tilde.predicted.is_none()));
        // all-trivial tilde sum at a = 0 counts the set: (45 + 3) / 4
        assert_eq!(v.reports[0].tilde.value, Complex::new(12.0, 0.0));
    }

    #[test]
    fn budget_is_enforced() {
        let t = Tower::new(2, 2, &[1, 2]).unwrap();
        let options = VerifyOptions {
            budget: 10,
            ..Default::default()
        };
        assert!(matches!(
            verify_all(&t, t.base().one(), &options),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
