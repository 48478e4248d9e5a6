//! Exact rational root candidates for dense polynomials over Q.
//!
//! Strategy: take the squarefree part, clear denominators, monicize by the
//! substitution `y = lc·x` (integer roots of the monic transform correspond
//! to rational roots of the original), find the roots of the monic polynomial
//! modulo a prime with squarefree reduction, Hensel-lift each simple root
//! past the Cauchy bound, and confirm by exact evaluation. Candidate lists
//! are verified by the caller through exact division, so this module only
//! needs to be complete, not minimal.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

/// All rational roots of the dense polynomial (index = degree). The list may
/// contain non-roots; it is guaranteed to contain every rational root.
pub(crate) fn rational_root_candidates(dense: &[Scalar]) -> Vec<Scalar> {
    let deg = dense.len().saturating_sub(1);
    if deg == 0 {
        return vec![];
    }
    let rat: Vec<BigRational> = dense.iter().map(|c| c.rational().clone()).collect();
    let sqf = squarefree_part(&rat);
    let int = clear_denominators(&sqf);
    let int = primitive_part(&int);
    integer_root_search(&int)
        .into_iter()
        .map(Scalar::from_big)
        .collect()
}

/// `f / gcd(f, f')` over Q, monic up to scale.
fn squarefree_part(f: &[BigRational]) -> Vec<BigRational> {
    let fp: Vec<BigRational> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect();
    let g = poly_gcd(f, &fp);
    if g.len() <= 1 {
        return f.to_vec();
    }
    poly_div_exact(f, &g)
}

fn trim(f: &mut Vec<BigRational>) {
    while f.last().map_or(false, |c| c.is_zero()) {
        f.pop();
    }
}

fn poly_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    // Normalize monic for stability.
    if let Some(lead) = a.last().cloned() {
        if !lead.is_zero() {
            for c in &mut a {
                *c = &*c / &lead;
            }
        }
    }
    a
}

fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = &r[dr] / &lead;
        for i in 0..=db {
            let idx = dr - db + i;
            r[idx] = &r[idx] - &(&factor * &b[i]);
        }
        trim(&mut r);
        if r.len() <= db {
            break;
        }
        // r[dr] was cleared; loop continues on the shorter polynomial.
    }
    r
}

fn poly_div_exact(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut q = vec![BigRational::zero(); r.len().saturating_sub(db)];
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = &r[dr] / &lead;
        q[dr - db] = factor.clone();
        for i in 0..=db {
            let idx = dr - db + i;
            r[idx] = &r[idx] - &(&factor * &b[i]);
        }
        trim(&mut r);
    }
    q
}

fn clear_denominators(f: &[BigRational]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for c in f {
        l = l.lcm(c.denom());
    }
    f.iter()
        .map(|c| c.numer() * (&l / c.denom()))
        .collect()
}

fn primitive_part(f: &[BigInt]) -> Vec<BigInt> {
    let mut g = BigInt::zero();
    for c in f {
        g = g.gcd(c);
    }
    if g.is_zero() || g.is_one() {
        return f.to_vec();
    }
    f.iter().map(|c| c / &g).collect()
}

/// Rational roots of a primitive squarefree integer polynomial.
fn integer_root_search(f: &[BigInt]) -> Vec<BigRational> {
    let deg = f.len() - 1;
    if deg == 0 {
        return vec![];
    }
    if deg == 1 {
        return vec![BigRational::new(-f[0].clone(), f[1].clone())];
    }
    let lc = f[deg].clone();
    // Monic transform G(y) = lc^(deg-1) f(y/lc): G_i = f_i · lc^(deg-1-i).
    let monic: Vec<BigInt> = f
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if i == deg {
                BigInt::one()
            } else {
                c * lc.pow((deg - 1 - i) as u32)
            }
        })
        .collect();
    let bound = monic
        .iter()
        .map(|c| c.abs())
        .max()
        .unwrap_or_else(BigInt::one)
        + BigInt::one();
    let mut out = Vec::new();
    for y in monic_integer_roots(&monic, &bound) {
        out.push(BigRational::new(y, lc.clone()));
    }
    out
}

/// Integer roots of a monic squarefree polynomial with |root| <= bound.
fn monic_integer_roots(g: &[BigInt], bound: &BigInt) -> Vec<BigInt> {
    let mut primes = PrimeIter::new();
    for _ in 0..64 {
        let p = primes.next().unwrap();
        let gp: Vec<u64> = g.iter().map(|c| bigint_mod_u64(c, p)).collect();
        if gp.last().map_or(true, |&l| l == 0) {
            continue;
        }
        if !modp_squarefree(&gp, p) {
            continue;
        }
        let roots_p = modp_roots(&gp, p);
        let mut out = Vec::new();
        for r in roots_p {
            if let Some(root) = hensel_lift(g, r, p, bound) {
                if eval_int(g, &root).is_zero() {
                    out.push(root);
                }
            }
        }
        return out;
    }
    // Astronomically unlikely: every tried prime divided the discriminant.
    vec![]
}

fn eval_int(f: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for c in f.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn eval_int_derivative(f: &[BigInt], x: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    for (i, c) in f.iter().enumerate().skip(1).rev() {
        acc = acc * x + c * BigInt::from(i);
    }
    acc
}

fn bigint_mod_u64(c: &BigInt, p: u64) -> u64 {
    let m = c.mod_floor(&BigInt::from(p));
    let (_, digits) = m.to_u64_digits();
    *digits.first().unwrap_or(&0)
}

/// Newton lifting of a simple root mod p to a symmetric representative mod
/// p^(2^k) > 2·bound.
fn hensel_lift(g: &[BigInt], r0: u64, p: u64, bound: &BigInt) -> Option<BigInt> {
    let mut modulus = BigInt::from(p);
    let target = BigInt::from(2) * bound + BigInt::one();
    let mut r = BigInt::from(r0);
    while modulus < target {
        modulus = &modulus * &modulus;
        let fr = eval_int(g, &r).mod_floor(&modulus);
        let dfr = eval_int_derivative(g, &r).mod_floor(&modulus);
        let inv = mod_inverse(&dfr, &modulus)?;
        r = (&r - fr * inv).mod_floor(&modulus);
    }
    // Symmetric representative.
    let half = &modulus / BigInt::from(2);
    if r > half {
        r -= &modulus;
    }
    Some(r)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

// ---- Arithmetic of polynomials over F_p (dense Vec<u64>, small degree) ----

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

fn ptrim(f: &mut Vec<u64>) {
    while f.last() == Some(&0) {
        f.pop();
    }
}

fn pmul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
        }
    }
    ptrim(&mut out);
    out
}

fn prem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    ptrim(&mut r);
    let db = b.len() - 1;
    let lead_inv = powmod(b[db], p - 2, p);
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = mulmod(r[dr], lead_inv, p);
        if factor != 0 {
            for i in 0..=db {
                let idx = dr - db + i;
                let sub = mulmod(factor, b[i], p);
                r[idx] = (r[idx] + p - sub) % p;
            }
        } else {
            r[dr] = 0;
        }
        ptrim(&mut r);
    }
    r
}

fn pgcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    ptrim(&mut a);
    ptrim(&mut b);
    while !b.is_empty() {
        let r = prem(&a, &b, p);
        a = b;
        b = r;
    }
    // Monic normalization.
    if let Some(&l) = a.last() {
        let inv = powmod(l, p - 2, p);
        for c in &mut a {
            *c = mulmod(*c, inv, p);
        }
    }
    a
}

/// `base^e mod (f, p)` for a polynomial base.
fn ppowmod(base: &[u64], mut e: u64, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = prem(base, f, p);
    while e > 0 {
        if e & 1 == 1 {
            acc = prem(&pmul(&acc, &b, p), f, p);
        }
        b = prem(&pmul(&b, &b, p), f, p);
        e >>= 1;
    }
    acc
}

fn modp_squarefree(f: &[u64], p: u64) -> bool {
    let mut fp: Vec<u64> = f
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| mulmod(c, (i as u64) % p, p))
        .collect();
    ptrim(&mut fp);
    if fp.is_empty() {
        return false;
    }
    pgcd(f, &fp, p).len() == 1
}

/// Roots of `f` in F_p, assuming `f` squarefree mod p.
fn modp_roots(f: &[u64], p: u64) -> Vec<u64> {
    // x^p - x splits off the product of linear factors.
    let xp = ppowmod(&[0, 1], p, f, p);
    let mut xpmx = xp;
    if xpmx.len() < 2 {
        xpmx.resize(2, 0);
    }
    xpmx[1] = (xpmx[1] + p - 1) % p;
    ptrim(&mut xpmx);
    let lin = pgcd(f, &xpmx, p);
    let mut out = Vec::new();
    split_linear_product(&lin, p, &mut out);
    out
}

/// Recursively splits a monic product of distinct linear factors.
fn split_linear_product(h: &[u64], p: u64, out: &mut Vec<u64>) {
    match h.len() {
        0 | 1 => {}
        2 => {
            // monic: x + h0 → root p - h0
            out.push((p - h[0]) % p);
        }
        _ => {
            for a in 0..p {
                // gcd((x+a)^((p-1)/2) - 1, h) separates roots by quadratic
                // residuosity of (root + a).
                let mut w = ppowmod(&[a, 1], (p - 1) / 2, h, p);
                if w.is_empty() {
                    w = vec![p - 1]; // 0 - 1
                } else {
                    w[0] = (w[0] + p - 1) % p;
                }
                ptrim(&mut w);
                if w.is_empty() {
                    continue;
                }
                let g = pgcd(h, &w, p);
                if g.len() > 1 && g.len() < h.len() {
                    let cof = pdiv_exact(h, &g, p);
                    split_linear_product(&g, p, out);
                    split_linear_product(&cof, p, out);
                    return;
                }
            }
        }
    }
}

fn pdiv_exact(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    ptrim(&mut r);
    let db = b.len() - 1;
    let lead_inv = powmod(b[db], p - 2, p);
    let mut q = vec![0u64; r.len() - db];
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = mulmod(r[dr], lead_inv, p);
        q[dr - db] = factor;
        for i in 0..=db {
            let idx = dr - db + i;
            let sub = mulmod(factor, b[i], p);
            r[idx] = (r[idx] + p - sub) % p;
        }
        ptrim(&mut r);
    }
    q
}

/// Deterministic odd-prime iterator starting from a few fixed large primes,
/// then scanning upward with a Miller–Rabin test that is deterministic for
/// all 64-bit integers.
struct PrimeIter {
    fixed: std::vec::IntoIter<u64>,
    cursor: u64,
}

impl PrimeIter {
    fn new() -> Self {
        PrimeIter {
            fixed: vec![
                2305843009213693951, // 2^61 - 1
                999999999999999989,
                2147483647, // 2^31 - 1
                4294967291,
                1000000007,
                998244353,
            ]
            .into_iter(),
            cursor: 1000000021,
        }
    }
}

impl Iterator for PrimeIter {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        if let Some(p) = self.fixed.next() {
            return Some(p);
        }
        loop {
            self.cursor += 2;
            if is_prime_u64(self.cursor) {
                return Some(self.cursor);
            }
        }
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}
