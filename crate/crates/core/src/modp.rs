//! Word-size prime-field arithmetic and multi-modular reconstruction.
//!
//! The norm sampler computes `Res(h, g)` modulo a handful of 62-bit primes
//! and lifts the result with Garner's algorithm, which is much cheaper than
//! a big-integer determinant for the 6..24 dimensional norms we need.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

/// Primes just below 2^62, descending.
pub fn crt_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(128);
        let mut c = (1u64 << 62) - 1;
        while out.len() < 128 {
            if is_prime_u64(c) {
                out.push(c);
            }
            c -= 2;
        }
        out
    })
}

/// Bits guaranteed per prime in `crt_primes`.
pub const BITS_PER_PRIME: f64 = 61.99;

#[inline]
pub fn mul_mod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, q: u64) -> u64 {
    let s = a + b;
    if s >= q {
        s - q
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, q: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + q - b
    }
}

pub fn pow_mod(mut b: u64, mut e: u64, q: u64) -> u64 {
    let mut r = 1 % q;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, q);
        }
        b = mul_mod(b, b, q);
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: u64, q: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(q));
    pow_mod(a, q - 2, q)
}

#[inline]
pub fn reduce_i128(v: i128, q: u64) -> u64 {
    v.rem_euclid(q as i128) as u64
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// `Res(a, b)` over F_q, for `a` monic. Inputs are ascending coefficient
/// vectors already reduced mod q; `b` may be zero.
pub fn resultant_mod(a: &[u64], b: &[u64], q: u64) -> u64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    let mut acc = 1u64;
    loop {
        let (Some(da), Some(db)) = (a.len().checked_sub(1), b.len().checked_sub(1)) else {
            return 0;
        };
        if db == 0 {
            return mul_mod(acc, pow_mod(b[0], da as u64, q), q);
        }
        if da == 0 {
            return mul_mod(acc, pow_mod(a[0], db as u64, q), q);
        }
        // r = a mod b
        let lb = b[db];
        let inv = inv_mod(lb, q);
        let mut r = a.clone();
        while r.len() > db {
            let top = r.pop().unwrap();
            if top == 0 {
                continue;
            }
            let c = mul_mod(top, inv, q);
            let base = r.len() - db;
            for j in 0..db {
                r[base + j] = sub_mod(r[base + j], mul_mod(c, b[j], q), q);
            }
        }
        trim(&mut r);
        if r.is_empty() {
            return 0;
        }
        let dr = r.len() - 1;
        // Res(a, b) = (-1)^(da db) lc(b)^(da - dr) Res(b, r)
        if (da * db) % 2 == 1 {
            acc = sub_mod(0, acc, q);
        }
        acc = mul_mod(acc, pow_mod(lb, (da - dr) as u64, q), q);
        a = b;
        b = r;
    }
}

/// Montgomery arithmetic modulo an odd q < 2^62, with R = 2^64.
#[derive(Clone, Copy, Debug)]
pub struct Mont {
    pub q: u64,
    neg_qinv: u64,
    r2: u64,
}

impl Mont {
    pub fn new(q: u64) -> Self {
        assert!(q % 2 == 1 && q < 1 << 62, "Montgomery modulus must be odd and < 2^62");
        let mut inv = q;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(q.wrapping_mul(inv)));
        }
        let r = ((1u128 << 64) % q as u128) as u64;
        Mont {
            q,
            neg_qinv: inv.wrapping_neg(),
            r2: mul_mod(r, r, q),
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let t = a as u128 * b as u128;
        let m = (t as u64).wrapping_mul(self.neg_qinv);
        let u = ((t + m as u128 * self.q as u128) >> 64) as u64;
        if u >= self.q {
            u - self.q
        } else {
            u
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        add_mod(a, b, self.q)
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        sub_mod(a, b, self.q)
    }

    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.q, self.r2)
    }

    pub fn from_i64(&self, v: i64) -> u64 {
        self.to_mont(reduce_i128(v as i128, self.q))
    }

    pub fn from_mont(&self, a: u64) -> u64 {
        self.mul(a, 1)
    }

    pub fn one(&self) -> u64 {
        self.to_mont(1)
    }

    pub fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let mut r = self.one();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.q - 2)
    }

    /// `Res(a, b)` for `a` monic, all values in Montgomery form; `a` and `b`
    /// are used as scratch space.
    pub fn resultant(&self, a: &mut Vec<u64>, b: &mut Vec<u64>) -> u64 {
        trim(a);
        trim(b);
        let mut acc = self.one();
        loop {
            let (Some(da), Some(db)) = (a.len().checked_sub(1), b.len().checked_sub(1)) else {
                return 0;
            };
            if db == 0 {
                return self.mul(acc, self.pow(b[0], da as u64));
            }
            if da == 0 {
                return self.mul(acc, self.pow(a[0], db as u64));
            }
            let lb = b[db];
            let inv = self.inv(lb);
            while a.len() > db {
                let top = a.pop().unwrap();
                if top == 0 {
                    continue;
                }
                let c = self.mul(top, inv);
                let base = a.len() - db;
                for j in 0..db {
                    a[base + j] = self.sub(a[base + j], self.mul(c, b[j]));
                }
            }
            trim(a);
            if a.is_empty() {
                return 0;
            }
            let dr = a.len() - 1;
            if (da * db) % 2 == 1 {
                acc = self.sub(0, acc);
            }
            acc = self.mul(acc, self.pow(lb, (da - dr) as u64));
            std::mem::swap(a, b);
        }
    }
}

/// Garner reconstruction of the symmetric residue modulo the product of
/// `primes[..residues.len()]`.
pub fn crt_symmetric(residues: &[u64], primes: &[u64]) -> BigInt {
    let k = residues.len();
    // Mixed-radix digits.
    let mut digits: Vec<u64> = Vec::with_capacity(k);
    for i in 0..k {
        let q = primes[i];
        let mut v = residues[i] % q;
        let mut prod = 1u64;
        // v = (r_i - (d_0 + d_1 q_0 + ...)) / (q_0 ... q_{i-1}) mod q_i
        let mut partial = 0u64;
        for j in 0..i {
            partial = add_mod(partial, mul_mod(digits[j] % q, prod, q), q);
            prod = mul_mod(prod, primes[j] % q, q);
        }
        v = sub_mod(v, partial, q);
        if i > 0 {
            v = mul_mod(v, inv_mod(prod, q), q);
        }
        digits.push(v);
    }
    let mut value = BigUint::zero();
    let mut modulus = BigUint::one();
    for (d, &q) in digits.iter().zip(primes) {
        value += &modulus * *d;
        modulus *= q;
    }
    let half = &modulus >> 1;
    if value > half {
        BigInt::from(value) - BigInt::from(modulus)
    } else {
        BigInt::from(value)
    }
}
