//! Acceptance run: one line per criterion, non-zero exit on any failure.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use jacobi_codebook::characters::{CharacterGroup, Complex};
use jacobi_codebook::codebook::{
    build_codebook, classify, compute_imax, inner_product, predicted_imax, welch_bound,
    Classification, ScanOptions,
};
use jacobi_codebook::field::FiniteField;
use jacobi_codebook::sums::{
    character_sum, extended_gauss_sum, gauss_sum, verify_all, DefiningSet, Tower, Variant,
    VerifyOptions,
};

/// Reference table values carry six decimals.
const TABLE_TOL: f64 = 1e-5;
const THEOREM_TOL: f64 = 1e-9;
const NORM_TOL: f64 = 1e-12;
const INTEGRALITY_TOL: f64 = 1e-6;
const TABLE_TIME_LIMIT: Duration = Duration::from_secs(5);
const GAUSS_TIME_LIMIT: Duration = Duration::from_secs(1);

type Check = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// (p, m) with p^m = q.
fn base_of(q: u32) -> (u32, u32) {
    match q {
        2 => (2, 1),
        3 => (3, 1),
        4 => (2, 2),
        5 => (5, 1),
        7 => (7, 1),
        8 => (2, 3),
        9 => (3, 2),
        _ => unreachable!("no base field of order {q} in this run"),
    }
}

fn tower(q: u32, ext: &[u32]) -> Tower {
    let (p, m) = base_of(q);
    Tower::new(p, m, ext).unwrap()
}

fn measure(t: &Tower, variant: Variant, a_index: i64) -> f64 {
    let a = t.base_element_from_index(a_index).unwrap();
    let cb = build_codebook(t, variant, a).unwrap();
    compute_imax(&cb, &ScanOptions::default()).unwrap().value
}

/// q, I_max, I_W, I_W/I_max as printed.
type TableRow = (u32, f64, f64, f64);

const TABLE_ONE: [TableRow; 4] = [
    (4, 0.363636, 0.216506, 0.595392),
    (5, 0.263158, 0.178885, 0.679763),
    (7, 0.170732, 0.132260, 0.774664),
    (9, 0.126761, 0.104756, 0.826406),
];

const TABLE_TWO: [TableRow; 4] = [
    (4, 0.363636, 0.272727, 0.750000),
    (5, 0.263158, 0.210526, 0.799998),
    (7, 0.170732, 0.146341, 0.857139),
    (9, 0.126761, 0.112676, 0.888885),
];

fn reproduce_table(variant: Variant, rows: &[TableRow]) -> Check {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for &(q, imax, welch, ratio) in rows {
        let t = tower(q, &[1, 2]);
        let measured = measure(&t, variant, 1);
        let report = classify(&t.shape(), variant, Some(measured)).unwrap();
        for (name, got, want) in [
            ("I_max", measured, imax),
            ("I_W", report.welch, welch),
            ("I_W/I_max", report.ratio_welch, ratio),
        ] {
            let dev = (got - want).abs();
            worst = worst.max(dev);
            ensure(dev <= TABLE_TOL, || {
                format!("q={q} {name}: {got:.8} vs {want:.6}")
            })?;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < TABLE_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "q in {{4,5,7,9}}, max deviation {worst:.1e}, {elapsed:.2?}"
    ))
}

fn ac1() -> Check {
    reproduce_table(Variant::Hat, &TABLE_ONE)
}

fn ac2() -> Check {
    reproduce_table(Variant::Tilde, &TABLE_TWO)
}

fn ac3() -> Check {
    let t = tower(4, &[1, 2]);
    let options = VerifyOptions {
        tolerance: THEOREM_TOL,
        ..Default::default()
    };
    let v = verify_all(&t, t.base().generator(), &options).map_err(|e| e.to_string())?;
    ensure(v.total == 45, || format!("{} tuples", v.total))?;
    let mut mixed = 0;
    for r in &v.reports {
        let hat = r.hat.as_ref().ok_or("missing hat sum")?;
        let allowed = [16.0, 0.0, 2.0, 4.0];
        let magnitude = hat.value.norm();
        ensure(
            allowed.iter().any(|x| (magnitude - x).abs() <= THEOREM_TOL),
            || format!("|hat J| = {magnitude} at {:?}", r.exponents),
        )?;
        ensure(hat.passed && r.tilde.passed, || {
            format!("theorem mismatch at {:?}", r.exponents)
        })?;
        let h = r.exponents.iter().filter(|&&x| x != 0).count();
        if h > 0 && h < t.k() {
            mixed += 1;
            let rel = r.relation.as_ref().ok_or("missing relation check")?;
            ensure(rel.deviation <= THEOREM_TOL, || {
                format!("relation off by {} at {:?}", rel.deviation, r.exponents)
            })?;
        }
    }
    ensure(v.all_passed(), || format!("{}/{} pass", v.passed, v.total))?;
    Ok(format!("45/45 tuples, relation on {mixed} mixed tuples"))
}

fn ac4() -> Check {
    let start = Instant::now();
    let mut pairs = 0;
    for (p, n) in [(2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
        let f = Arc::new(FiniteField::new(p, n).unwrap());
        let group = CharacterGroup::new(f.clone());
        let q = f.order() as f64;
        for psi in group.characters() {
            for b in f.elements() {
                let chi = group.additive(b).unwrap();
                let g = gauss_sum(&psi, &chi).unwrap();
                let ext = extended_gauss_sum(&psi, &chi).unwrap();
                let (want_g, want_ext) = match (psi.is_trivial(), chi.is_trivial()) {
                    (true, true) => (Some(q - 1.0), Some(q)),
                    (true, false) => (Some(-1.0), Some(0.0)),
                    (false, true) => (Some(0.0), Some(0.0)),
                    (false, false) => (None, None),
                };
                for (got, want) in [(g, want_g), (ext, want_ext)] {
                    let ok = match want {
                        Some(w) => (got - Complex::new(w, 0.0)).norm() <= THEOREM_TOL,
                        None => (got.norm() - q.sqrt()).abs() <= THEOREM_TOL,
                    };
                    ensure(ok, || {
                        format!("q={q} t={} b={}: {got}", psi.exponent(), b.value())
                    })?;
                }
                pairs += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < GAUSS_TIME_LIMIT, || format!("took {elapsed:?}"))?;
    Ok(format!(
        "{pairs} character pairs over q in {{4,5,7,8,9}}, {elapsed:.2?}"
    ))
}

/// Every ext tuple with 1 <= k <= 3 and m_1 + ... + m_k <= 4.
fn compositions() -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn extend(prefix: &mut Vec<u32>, left: u32, out: &mut Vec<Vec<u32>>) {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        if prefix.len() == 3 {
            return;
        }
        for d in 1..=left {
            prefix.push(d);
            extend(prefix, left - d, out);
            prefix.pop();
        }
    }
    extend(&mut Vec::new(), 4, &mut out);
    out
}

fn ac5() -> Check {
    let mut specs = 0;
    for q in [2u32, 3, 4, 5] {
        for ext in compositions() {
            let t = tower(q, &ext);
            let q = q as i128;
            let k = ext.len() as u32;
            let total: u32 = ext.iter().sum();
            let prod: i128 = ext.iter().map(|&d| q.pow(d) - 1).product();
            let hat = q.pow(total - 1);
            let tilde_nonzero = (prod + (-1i128).pow(k + 1)) / q;
            let tilde_zero = (prod + (-1i128).pow(k) * (q - 1)) / q;
            let mut partition = 0i128;
            for a in t.base().elements() {
                let tilde = DefiningSet::enumerate(&t, Variant::Tilde, a).unwrap().len() as i128;
                let want = if a.is_zero() {
                    tilde_zero
                } else {
                    tilde_nonzero
                };
                ensure(tilde == want, || {
                    format!(
                        "q={q} ext={ext:?} |S~({})| = {tilde}, want {want}",
                        a.value()
                    )
                })?;
                partition += tilde;
                if !a.is_zero() {
                    let n = DefiningSet::enumerate(&t, Variant::Hat, a).unwrap().len() as i128;
                    ensure(n == hat, || {
                        format!("q={q} ext={ext:?} |S^| = {n}, want {hat}")
                    })?;
                }
            }
            ensure(partition == prod, || {
                format!("q={q} ext={ext:?}: partition sums to {partition}")
            })?;
            specs += 1;
        }
    }
    Ok(format!(
        "{specs} tower shapes, all sets and the partition identity exact"
    ))
}

fn ac6() -> Check {
    let specs: [(u32, &[u32]); 6] = [
        (3, &[1, 2]),
        (4, &[1, 2]),
        (5, &[1, 2]),
        (4, &[2]),
        (5, &[1, 1]),
        (3, &[3]),
    ];
    let mut codebooks = 0;
    for (q, ext) in specs {
        let t = tower(q, ext);
        for variant in [Variant::Hat, Variant::Tilde] {
            let mut values = Vec::new();
            for a in t.base().nonzero_elements() {
                let cb = build_codebook(&t, variant, a).map_err(|e| e.to_string())?;
                for row in cb.rows() {
                    let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    ensure((norm - 1.0).abs() <= NORM_TOL, || {
                        format!("q={q} {ext:?} row norm {norm}")
                    })?;
                }
                let imax = compute_imax(&cb, &ScanOptions::default()).unwrap().value;
                let welch = welch_bound(cb.n() as u64, cb.k() as u64).unwrap();
                ensure(imax >= welch - NORM_TOL, || {
                    format!("q={q} {ext:?} {variant}: {imax} < {welch}")
                })?;
                if variant == Variant::Tilde {
                    let expected = 1.0 / (cb.k() as f64).sqrt();
                    for i in 0..cb.character_rows() {
                        for j in cb.character_rows()..cb.n() {
                            let v = inner_product(cb.row(i), cb.row(j)).norm();
                            ensure((v - expected).abs() <= NORM_TOL, || {
                                format!("cross-class {v}")
                            })?;
                        }
                    }
                }
                let set = DefiningSet::enumerate(&t, variant, a).unwrap();
                for tuple in t.exponent_tuples() {
                    let e: Vec<u64> = tuple.iter().map(|&x| x as u64).collect();
                    let s = character_sum(&t, &set, &e).unwrap().norm_sqr();
                    ensure((s - s.round()).abs() <= INTEGRALITY_TOL, || {
                        format!("|sum|^2 = {s}")
                    })?;
                }
                values.push(imax);
                codebooks += 1;
            }
            let spread = values
                .iter()
                .fold(0f64, |m, v| m.max((v - values[0]).abs()));
            ensure(spread <= THEOREM_TOL, || {
                format!("q={q} {ext:?} {variant}: a-spread {spread}")
            })?;

            let (p, m) = base_of(q);
            let base = FiniteField::new(p, m).unwrap();
            for g in base.primitive_elements().skip(1) {
                let alt = Tower::from_base(base.with_generator(g).unwrap(), ext).unwrap();
                let diff = (measure(&alt, variant, 1) - values[0]).abs();
                ensure(diff <= THEOREM_TOL, || {
                    format!("q={q} {ext:?} generator {}: {diff}", g.value())
                })?;
            }
        }
    }
    Ok(format!(
        "{codebooks} codebooks, every invariant within tolerance"
    ))
}

fn ac7() -> Check {
    let specs: [&[u32]; 6] = [&[1], &[2], &[3], &[1, 1], &[1, 2], &[2, 1]];
    let mut checked = 0;
    for q in [4u32, 5] {
        for ext in specs {
            let t = tower(q, ext);
            for variant in [Variant::Hat, Variant::Tilde] {
                let measured = measure(&t, variant, 1);
                let predicted = predicted_imax(&t.shape(), variant).map_err(|e| e.to_string())?;
                ensure((measured - predicted).abs() <= THEOREM_TOL, || {
                    format!("q={q} {ext:?} {variant}: measured {measured}, predicted {predicted}")
                })?;
                if ext == [2] {
                    let r = classify(&t.shape(), variant, Some(measured)).unwrap();
                    ensure(
                        (measured - 1.0 / (q as f64).sqrt()).abs() <= THEOREM_TOL,
                        || format!("q={q} m=2: I_max {measured}"),
                    )?;
                    ensure(
                        r.classification == Classification::NearOptimalLevenshtein,
                        || format!("q={q} m=2 {variant}: {}", r.classification),
                    )?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} codebooks match the closed form"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("AC1", "hat codebook table, k=2, (m1,m2)=(1,2)", ac1),
        ("AC2", "tilde codebook table, k=2, (m1,m2)=(1,2)", ac2),
        ("AC3", "generalized Jacobi theorem conformance at q=4", ac3),
        ("AC4", "Gauss sum values", ac4),
        ("AC5", "defining set cardinalities", ac5),
        ("AC6", "codebook property suite", ac6),
        ("AC7", "I_max closed form for k <= 2", ac7),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, name, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(format!("panic: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("[PASS] {id} {name}: {detail}"),
            Err(reason) => {
                failed += 1;
                println!("[FAIL] {id} {name}: {reason}");
            }
        }
    }
    println!("{}/7 acceptance criteria pass", 7 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
