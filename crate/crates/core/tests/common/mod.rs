//! Independent oracles shared by integration tests.
#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Sylvester matrix of f (degree m) and g (degree n), rows of f first.
pub fn sylvester(f: &[i64], g: &[i64]) -> Vec<Vec<BigRational>> {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for (coeffs, shifts) in [(f, n), (g, m)] {
        for s in 0..shifts {
            let mut row = vec![BigRational::zero(); size];
            // Coefficients from the leading one down.
            for (j, c) in coeffs.iter().rev().enumerate() {
                row[s + j] = BigRational::from(BigInt::from(*c));
            }
            rows.push(row);
        }
    }
    rows
}

/// Determinant by Gaussian elimination over the rationals.
pub fn det(mut a: Vec<Vec<BigRational>>) -> BigInt {
    let n = a.len();
    let mut d = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigInt::zero();
        };
        if piv != col {
            a.swap(piv, col);
            d = -d;
        }
        let p = a[col][col].clone();
        d *= &p;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = &a[r][col] / &p;
            for c in col..n {
                let v = &factor * &a[col][c];
                a[r][c] -= v;
            }
        }
    }
    assert!(d.is_integer());
    d.to_integer()
}

/// Resultant of two dense integer polynomials (constant term first).
pub fn sylvester_resultant(f: &[i64], g: &[i64]) -> BigInt {
    let (m, n) = (f.len() - 1, g.len() - 1);
    match (m, n) {
        (0, _) => BigInt::from(f[0]).pow(n as u32),
        (_, 0) => BigInt::from(g[0]).pow(m as u32),
        _ => det(sylvester(f, g)),
    }
}

/// Miller-Rabin with the first 24 prime bases.
pub fn miller_rabin(n: &BigInt) -> bool {
    const BASES: [u32; 24] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    ];
    let Some(n) = n.to_biguint() else { return false };
    let two = BigUint::from(2u32);
    if n < two {
        return false;
    }
    for b in BASES {
        let b = BigUint::from(b);
        if n == b {
            return true;
        }
        if (&n % &b).is_zero() {
            return false;
        }
    }
    let m = &n - 1u32;
    let s = m.trailing_zeros().unwrap_or(0);
    let d = &m >> s;
    'bases: for b in BASES {
        let mut x = BigUint::from(b).modpow(&d, &n);
        if x.is_one() || x == m {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, &n);
            if x == m {
                continue 'bases;
            }
        }
        return false;
    }
    true
}
