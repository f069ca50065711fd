//! Linear algebra for the recurrence guesser: nullspaces modulo word-size
//! primes and lifting to rationals by CRT and rational reconstruction.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::laurent::RationalValue;

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Inverse of a nonzero residue modulo a prime.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

pub(crate) fn big_mod(c: &BigInt, p: u64) -> u64 {
    let r = c.mod_floor(&BigInt::from(p));
    r.to_u64_digits().1.first().copied().unwrap_or(0)
}

/// Deterministic Miller–Rabin, exact for all 64-bit inputs.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The `k`-th prime below `2^62`, counting down.
pub(crate) fn large_prime(k: usize) -> u64 {
    let mut found = 0;
    let mut n = (1u64 << 62) - 1;
    loop {
        if is_prime_u64(n) {
            if found == k {
                return n;
            }
            found += 1;
        }
        n -= 2;
    }
}

/// Reduced row echelon form modulo `p`, in place. Returns pivot columns.
pub(crate) fn rref_mod(rows: &mut Vec<Vec<u64>>, cols: usize, p: u64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(sel) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, sel);
        let inv = inv_mod(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = row[c];
            for (x, &y) in row.iter_mut().zip(&pivot_row).skip(c) {
                if y != 0 {
                    *x = (*x + p - mul_mod(f, y, p)) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

/// Nullspace basis modulo `p` from an RREF: one vector per free column
/// `f`, equal to `1` at `f`, `-rref[i][f]` at pivot `i`, `0` elsewhere.
pub(crate) fn nullspace_from_rref(rref: &[Vec<u64>], pivots: &[usize], cols: usize, p: u64) -> (Vec<usize>, Vec<Vec<u64>>) {
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - rref[i][f]) % p;
            }
            v
        })
        .collect();
    (free, basis)
}

/// Combines residues `a mod m` and `b mod p` into one residue mod `m·p`.
pub(crate) fn crt(a: &BigInt, m: &BigInt, b: u64, p: u64) -> BigInt {
    let a_p = big_mod(a, p);
    let m_p = big_mod(m, p);
    let t = mul_mod((b + p - a_p) % p, inv_mod(m_p, p), p);
    a + m * BigInt::from(t)
}

/// The unique `n/d` with `|n|, d <= sqrt(m/2)` and `n ≡ a·d (mod m)`, if any.
pub(crate) fn rational_reconstruct(a: &BigInt, m: &BigInt) -> Option<RationalValue> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if !(&r1 - a * &t1).mod_floor(m).is_zero() {
        return None;
    }
    Some(RationalValue::new(r1, t1))
}

/// Rank of a rational matrix by exact elimination; intended for a handful
/// of rows.
#[cfg(test)]
fn rank_exact(rows: &[Vec<RationalValue>]) -> usize {
    let mut m: Vec<Vec<RationalValue>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(sel) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, sel);
        let pivot = m[rank][c].clone();
        let pivot_row: Vec<RationalValue> = m[rank].iter().map(|x| x / &pivot).collect();
        for row in m.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Scales a rational vector to a primitive integer vector whose first
/// nonzero entry is positive.
pub(crate) fn primitive_integer_vector(v: &[RationalValue]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<BigInt> = v.iter().map(|x| (x * RationalValue::from(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() {
        for x in ints.iter_mut() {
            *x /= &g;
        }
    }
    if ints.iter().find(|x| !x.is_zero()).map(|x| x.sign()) == Some(Sign::Minus) {
        for x in ints.iter_mut() {
            *x = -&*x;
        }
    }
    ints
}
