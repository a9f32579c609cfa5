//! Codebooks built from character sums over trace defining sets.
//!
//! A codebook for a tower and a defining set S has one row per tuple of
//! multiplicative characters (lambda_1, ..., lambda_k), whose entries are
//! lambda_1(c_1)...lambda_k(c_k) over (c_1, ..., c_k) in S, followed by the
//! K rows of the standard basis. [`compute_imax`] finds the largest
//! cross-correlation by scanning every pair of rows.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::characters::Complex;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::sums::{hat_size, tilde_size, DefiningSet, Shape, Tower, Variant};

/// Upper limit on N * K for a materialized codebook.
pub const MAX_CODEBOOK_ENTRIES: u128 = 100_000_000;

/// Default limit on complex multiply-adds in one I_max scan.
pub const DEFAULT_SCAN_BUDGET: u128 = 1_000_000_000;

/// Environment variable capping the scan's worker threads (0 = automatic).
pub const THREADS_ENV: &str = "CODEBOOK_THREADS";

/// Where a codebook came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub p: u32,
    pub m: u32,
    pub ext_degrees: Vec<u32>,
    pub variant: Variant,
    /// Encoding of a in F_q.
    pub a: u32,
    /// Row order descriptor.
    pub ordering: &'static str,
}

pub const ROW_ORDERING: &str =
    "character tuples in lexicographic exponent order, then standard basis";

#[derive(Debug, Clone)]
pub struct Codebook {
    n: usize,
    k: usize,
    character_rows: usize,
    rows: Vec<Complex>,
    provenance: Option<Provenance>,
    q_below_theorem: bool,
}

impl Codebook {
    /// A codebook from explicit rows of length `k`, stored row-major.
    pub fn from_rows(k: usize, rows: Vec<Complex>) -> Result<Self> {
        if k == 0 || !rows.len().is_multiple_of(k) {
            return Err(Error::Domain(format!(
                "{} entries do not form rows of length {k}",
                rows.len()
            )));
        }
        Ok(Self {
            n: rows.len() / k,
            k,
            character_rows: 0,
            rows,
            provenance: None,
            q_below_theorem: false,
        })
    }

    /// N, the number of rows.
    pub fn n(&self) -> usize {
        self.n
    }

    /// K, the row length.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of character rows, which precede the standard basis.
    pub fn character_rows(&self) -> usize {
        self.character_rows
    }

    pub fn row(&self, i: usize) -> &[Complex] {
        &self.rows[i * self.k..(i + 1) * self.k]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex]> {
        self.rows.chunks(self.k)
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// Set for the hat construction over q < 4, where the I_max theorem
    /// does not apply.
    pub fn q_below_theorem(&self) -> bool {
        self.q_below_theorem
    }
}

/// Conjugate-bilinear inner product sum_l x_l * conj(y_l).
pub fn inner_product(x: &[Complex], y: &[Complex]) -> Complex {
    x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
}

/// N and K of the codebook for `shape` and `variant` at a nonzero a.
pub fn parameters(shape: &Shape, variant: Variant) -> (u128, u128) {
    let k = match variant {
        Variant::Hat => hat_size(shape),
        Variant::Tilde => tilde_size(shape, false),
    };
    (shape.character_count() + k, k)
}

/// The unit-norm codeword for exponent tuple `t` over `set`.
pub fn build_codeword(tower: &Tower, set: &DefiningSet, exponents: &[u64]) -> Result<Vec<Complex>> {
    let t = tower.canonical_exponents(exponents)?;
    if set.is_empty() {
        return Err(Error::Domain("the defining set is empty".into()));
    }
    let mut row = Vec::with_capacity(set.len());
    codeword_into(tower, set, &t, &mut row);
    Ok(row)
}

fn codeword_into(tower: &Tower, set: &DefiningSet, t: &[u32], out: &mut Vec<Complex>) {
    let start = out.len();
    let levels = tower.levels();
    let mut nonzero = 0usize;
    for tuple in set.tuples() {
        let mut value = Complex::new(1.0, 0.0);
        for ((&x, &ti), level) in tuple.iter().zip(t).zip(levels) {
            let log = level.field().log_raw(x);
            value *= level.characters().value_at_log(ti, log);
        }
        if value != Complex::new(0.0, 0.0) {
            nonzero += 1;
        }
        out.push(value);
    }
    assert!(nonzero >= 1, "codeword has no nonzero entry");
    let scale = 1.0 / (nonzero as f64).sqrt();
    for v in &mut out[start..] {
        *v *= scale;
    }
}

/// Builds the codebook of `tower` over the `variant` defining set at `a`.
pub fn build_codebook(tower: &Tower, variant: Variant, a: FieldElement) -> Result<Codebook> {
    tower.base().check(&a)?;
    if a.is_zero() {
        return Err(Error::Domain(
            "codebooks are defined for nonzero a only".into(),
        ));
    }
    let shape = tower.shape();
    let (n, k) = parameters(&shape, variant);
    if n.saturating_mul(k) > MAX_CODEBOOK_ENTRIES {
        return Err(Error::BudgetExceeded {
            required: n * k,
            budget: MAX_CODEBOOK_ENTRIES,
        });
    }
    let set = DefiningSet::enumerate(tower, variant, a)?;
    if set.is_empty() {
        return Err(Error::Domain(format!(
            "the {variant} defining set is empty, so the codebook has no coordinates"
        )));
    }
    let (n, k) = (n as usize, k as usize);
    let character_rows = tower.character_count() as usize;

    let mut rows: Vec<Complex> = Vec::with_capacity(n * k);
    for index in 0..character_rows as u64 {
        codeword_into(tower, &set, &tower.exponent_tuple(index), &mut rows);
    }
    for i in 0..k {
        rows.extend((0..k).map(|j| Complex::new(if i == j { 1.0 } else { 0.0 }, 0.0)));
    }
    debug_assert_eq!(rows.len(), n * k);

    Ok(Codebook {
        n,
        k,
        character_rows,
        rows,
        provenance: Some(Provenance {
            p: tower.characteristic(),
            m: tower.base_degree(),
            ext_degrees: tower.ext_degrees(),
            variant,
            a: a.value(),
            ordering: ROW_ORDERING,
        }),
        q_below_theorem: variant == Variant::Hat && tower.q() < 4,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ScanOptions {
    /// Worker threads; 0 uses the global pool.
    pub threads: usize,
    /// Maximum complex multiply-adds, N(N-1)/2 * K.
    pub budget: u128,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            threads: 0,
            budget: DEFAULT_SCAN_BUDGET,
        }
    }
}

impl ScanOptions {
    /// Defaults with the thread count taken from `CODEBOOK_THREADS`.
    pub fn from_env() -> Self {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(0);
        Self {
            threads,
            ..Self::default()
        }
    }
}

/// Multiply-adds needed for an exhaustive scan of an (N, K) codebook.
pub fn scan_work(n: u128, k: u128) -> u128 {
    n * n.saturating_sub(1) / 2 * k
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Imax {
    pub value: f64,
    /// The first pair (i, j), i < j, in lexicographic order attaining the value.
    pub pair: (usize, usize),
}

/// max_{i<j} |<c_i, c_j>| over every pair of rows.
pub fn compute_imax(cb: &Codebook, options: &ScanOptions) -> Result<Imax> {
    if cb.n() < 2 {
        return Err(Error::Precondition("I_max needs at least two rows".into()));
    }
    let required = scan_work(cb.n() as u128, cb.k() as u128);
    if required > options.budget {
        return Err(Error::BudgetExceeded {
            required,
            budget: options.budget,
        });
    }
    let scan = || scan_pairs(cb);
    let best = if options.threads == 0 {
        scan()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(options.threads)
            .build()
            .map_err(|e| Error::Precondition(format!("cannot start scan threads: {e}")))?
            .install(scan)
    };

    let (i, j) = best.pair;
    let back = inner_product(cb.row(j), cb.row(i)).norm();
    assert_eq!(
        back, best.value,
        "Gram matrix is not conjugate symmetric at ({i}, {j})"
    );
    Ok(best)
}

fn better(a: Imax, b: Imax) -> Imax {
    if b.value > a.value || (b.value == a.value && b.pair < a.pair) {
        b
    } else {
        a
    }
}

fn scan_pairs(cb: &Codebook) -> Imax {
    let n = cb.n();
    (0..n - 1)
        .into_par_iter()
        .map(|i| {
            let ri = cb.row(i);
            let mut best = Imax {
                value: f64::NEG_INFINITY,
                pair: (i, i + 1),
            };
            for j in i + 1..n {
                let value = inner_product(ri, cb.row(j)).norm();
                if value > best.value {
                    best = Imax {
                        value,
                        pair: (i, j),
                    };
                }
            }
            best
        })
        .reduce(
            || Imax {
                value: f64::NEG_INFINITY,
                pair: (usize::MAX, usize::MAX),
            },
            better,
        )
}

/// sqrt((N-K)/((N-1)K)), the lower bound on I_max of any (N, K) codebook.
pub fn welch_bound(n: u64, k: u64) -> Result<f64> {
    if k == 0 || n < 2 || n < k {
        return Err(Error::Precondition(format!(
            "the Welch bound needs N >= K >= 1 and N >= 2, got N = {n}, K = {k}"
        )));
    }
    let (n, k) = (n as f64, k as f64);
    Ok(((n - k) / ((n - 1.0) * k)).sqrt())
}

/// Whether the Levenshtein bound applies: N > K^2 for complex codebooks,
/// N > K(K+1)/2 for real ones.
pub fn levenshtein_applies(n: u64, k: u64, real_valued: bool) -> bool {
    let (n, k) = (n as u128, k as u128);
    if real_valued {
        2 * n > k * (k + 1)
    } else {
        n > k * k
    }
}

/// The Levenshtein bound, or `None` where it does not apply.
pub fn levenshtein_bound(n: u64, k: u64, real_valued: bool) -> Option<f64> {
    if k == 0 || !levenshtein_applies(n, k, real_valued) {
        return None;
    }
    let (n, k) = (n as f64, k as f64);
    let value = if real_valued {
        (3.0 * n - k * k - 2.0 * k) / ((n - k) * (k + 2.0))
    } else {
        (2.0 * n - k * k - k) / ((n - k) * (k + 1.0))
    };
    Some(value.sqrt())
}

/// q^{(m_1+...+m_k+1)/2} / (prod_i (q^{m_i}-1) + (-1)^{k+1}).
///
/// The hat theorem assumes q >= 4 and this refuses smaller q for it.
pub fn predicted_imax(shape: &Shape, variant: Variant) -> Result<f64> {
    if variant == Variant::Hat && shape.q < 4 {
        return Err(Error::Precondition(format!(
            "the I_max theorem for the hat construction requires q >= 4, got q = {}",
            shape.q
        )));
    }
    let q = shape.q as f64;
    let sign = if shape.k() % 2 == 1 { 1.0 } else { -1.0 };
    let denominator = shape.character_count() as f64 + sign;
    Ok(q.powf((shape.total_degree() as f64 + 1.0) / 2.0) / denominator)
}

/// Which bound a codebook family is nearly optimal against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    NearOptimalWelch,
    NearOptimalLevenshtein,
    Unclassified,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::NearOptimalWelch => "nearly optimal (Welch)",
            Classification::NearOptimalLevenshtein => "nearly optimal (Levenshtein)",
            Classification::Unclassified => "unclassified",
        })
    }
}

/// The family's classification by tower shape alone.
pub fn family_classification(shape: &Shape, variant: Variant) -> Classification {
    let degrees = &shape.ext_degrees;
    match variant {
        Variant::Hat if shape.q < 4 => Classification::Unclassified,
        Variant::Hat => match degrees.as_slice() {
            [2] => Classification::NearOptimalLevenshtein,
            [1] => Classification::Unclassified,
            _ => Classification::NearOptimalWelch,
        },
        Variant::Tilde => match degrees.as_slice() {
            [2] | [1, 1] => Classification::NearOptimalLevenshtein,
            _ => Classification::NearOptimalWelch,
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CodebookReport {
    #[serde(rename = "N")]
    pub n: u64,
    #[serde(rename = "K")]
    pub k: u64,
    pub measured_imax: Option<f64>,
    /// Absent for the hat construction over q < 4.
    pub predicted_imax: Option<f64>,
    pub welch: f64,
    /// Complex Levenshtein bound, where it applies.
    pub levenshtein: Option<f64>,
    /// I_W / I_max, using the measured value when there is one.
    pub ratio_welch: f64,
    pub ratio_lev: Option<f64>,
    pub classification: Classification,
    /// N > K^2.
    pub levenshtein_complex_applies: bool,
    /// N > K(K+1)/2.
    pub levenshtein_real_applies: bool,
}

impl CodebookReport {
    /// The I_max the ratios were computed from.
    pub fn imax(&self) -> f64 {
        self.measured_imax
            .or(self.predicted_imax)
            .expect("a report always carries an I_max")
    }
}

/// Bounds, ratios and classification for the codebook of `shape`.
pub fn classify(shape: &Shape, variant: Variant, measured: Option<f64>) -> Result<CodebookReport> {
    let (n, k) = parameters(shape, variant);
    let (n, k) = (
        u64::try_from(n).map_err(|_| Error::Domain("N does not fit in 64 bits".into()))?,
        k as u64,
    );
    let predicted = predicted_imax(shape, variant).ok();
    let imax = measured.or(predicted).ok_or_else(|| {
        Error::Precondition("neither a measured nor a predicted I_max is available".into())
    })?;
    if imax.is_nan() || imax <= 0.0 {
        return Err(Error::Precondition(format!(
            "I_max must be positive, got {imax}"
        )));
    }
    let welch = welch_bound(n, k)?;
    let levenshtein = levenshtein_bound(n, k, false);
    Ok(CodebookReport {
        n,
        k,
        measured_imax: measured,
        predicted_imax: predicted,
        welch,
        levenshtein,
        ratio_welch: welch / imax,
        ratio_lev: levenshtein.map(|l| l / imax),
        classification: family_classification(shape, variant),
        levenshtein_complex_applies: levenshtein_applies(n, k, false),
        levenshtein_real_applies: levenshtein_applies(n, k, true),
    })
}
