//! Dense polynomial arithmetic over a prime field, used only while a field
//! is being constructed (modulus search, generator search, table fill).
//!
//! Polynomials are coefficient vectors with the constant term first. Results
//! are trimmed so that the last entry is nonzero; the zero polynomial is the
//! empty vector.

pub(crate) fn trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn mod_inverse(a: u32, p: u32) -> u32 {
    debug_assert!(!a.is_multiple_of(p));
    let mut result = 1u64;
    let mut base = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    result as u32
}

pub(crate) fn sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let len = a.len().max(b.len());
    let out = (0..len)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(out)
}

pub(crate) fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    trim(out.into_iter().map(|c| c as u32).collect())
}

/// Remainder of `a` divided by `b` (`b` nonzero).
pub(crate) fn rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut r = trim(a.to_vec());
    let lead_inv = mod_inverse(*b.last().unwrap(), p) as u64;
    let db = b.len() - 1;
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let factor = (*r.last().unwrap() as u64 * lead_inv) % p as u64;
        for (j, &c) in b.iter().enumerate() {
            let idx = shift + j;
            let delta = (factor * c as u64) % p as u64;
            r[idx] = ((r[idx] as u64 + p as u64 - delta) % p as u64) as u32;
        }
        r = trim(r);
    }
    r
}

pub(crate) fn gcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    // normalize to monic
    if let Some(&lead) = x.last() {
        let inv = mod_inverse(lead, p) as u64;
        for c in x.iter_mut() {
            *c = ((*c as u64 * inv) % p as u64) as u32;
        }
    }
    x
}

pub(crate) fn mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    rem(&mul(a, b, p), modulus, p)
}

pub(crate) fn powmod(base: &[u32], mut e: u64, modulus: &[u32], p: u32) -> Vec<u32> {
    let mut result = vec![1u32];
    let mut b = rem(base, modulus, p);
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod(&result, &b, modulus, p);
        }
        b = mulmod(&b, &b, modulus, p);
        e >>= 1;
    }
    trim(result)
}

/// Ben-Or irreducibility test: `f` (monic, degree n) is irreducible iff
/// gcd(x^{p^j} - x, f) = 1 for every 1 <= j <= n/2.
pub(crate) fn is_irreducible(f: &[u32], p: u32) -> bool {
    let f = trim(f.to_vec());
    let n = f.len() - 1;
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    let x = vec![0u32, 1];
    let mut frob = x.clone();
    for _ in 1..=n / 2 {
        frob = powmod(&frob, p as u64, &f, p);
        let g = gcd(&sub(&frob, &x, p), &f, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}
