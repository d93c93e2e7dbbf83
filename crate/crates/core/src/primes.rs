//! Probabilistic primality testing.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer as _;
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Miller-Rabin rounds; error probability below 4^-64 for any input.
pub const MR_ROUNDS: u32 = 64;

const TRIAL_LIMIT: u32 = 4096;

/// Primes below [`TRIAL_LIMIT`], grouped so each group's product fits in a
/// u64; trial division then needs one bignum remainder per group.
pub(crate) fn trial_groups() -> &'static [(u64, Vec<u64>)] {
    static GROUPS: OnceLock<Vec<(u64, Vec<u64>)>> = OnceLock::new();
    GROUPS.get_or_init(|| {
        let mut composite = vec![false; TRIAL_LIMIT as usize];
        let mut groups: Vec<(u64, Vec<u64>)> = Vec::new();
        for i in 2..TRIAL_LIMIT as u64 {
            if composite[i as usize] {
                continue;
            }
            (i * i..TRIAL_LIMIT as u64)
                .step_by(i as usize)
                .for_each(|j| composite[j as usize] = true);
            match groups.last_mut() {
                Some((prod, ps)) if prod.checked_mul(i).is_some() => {
                    *prod *= i;
                    ps.push(i);
                }
                _ => groups.push((i, vec![i])),
            }
        }
        groups
    })
}

/// n mod m for a machine-word modulus.
pub(crate) fn rem_u64(n: &BigUint, m: u64) -> u64 {
    n.iter_u64_digits()
        .rev()
        .fold(0u64, |acc, d| ((u128::from(acc) << 64 | u128::from(d)) % u128::from(m)) as u64)
}

fn has_small_factor(n: &BigUint) -> bool {
    trial_groups().iter().any(|(prod, ps)| {
        let r = rem_u64(n, *prod);
        ps.iter().any(|&q| r.is_multiple_of(q))
    })
}

pub fn is_probable_prime(n: &BigInt) -> bool {
    match n.sign() {
        Sign::Plus => is_probable_prime_u(n.magnitude()),
        _ => false,
    }
}

pub fn is_probable_prime_u(n: &BigUint) -> bool {
    match screen(n) {
        Screen::Decided(v) => v,
        Screen::Pending(w) => w.rounds(),
    }
}

/// Trial division plus one base-2 round. A false result proves n
/// composite; a true result is a strong hint, to be confirmed by
/// [`is_probable_prime`].
pub fn passes_quick_test(n: &BigInt) -> bool {
    match n.sign() {
        Sign::Plus => !matches!(screen(n.magnitude()), Screen::Decided(false)),
        _ => false,
    }
}

enum Screen<'a> {
    Decided(bool),
    Pending(Witness<'a>),
}

struct Witness<'a> {
    n: &'a BigUint,
    n_minus_1: BigUint,
    d: BigUint,
    s: u64,
}

impl Witness<'_> {
    /// True if `a` proves n composite.
    fn proves_composite(&self, a: &BigUint) -> bool {
        let mut x = a.modpow(&self.d, self.n);
        if x.is_one() || x == self.n_minus_1 {
            return false;
        }
        for _ in 1..self.s {
            x = (&x * &x) % self.n;
            if x == self.n_minus_1 {
                return false;
            }
            if x.is_one() {
                return true;
            }
        }
        true
    }

    fn rounds(&self) -> bool {
        // Bases are drawn from a fixed stream so verdicts are reproducible.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_9a1e);
        let two = BigUint::from(2u32);
        let upper = &self.n_minus_1 - 1u32;
        (1..MR_ROUNDS).all(|_| !self.proves_composite(&rng.gen_biguint_range(&two, &upper)))
    }
}

fn screen(n: &BigUint) -> Screen<'_> {
    if let Some(small) = n.to_u64() {
        if small < 2 {
            return Screen::Decided(false);
        }
        if small < 1 << 24 {
            return Screen::Decided((2..).take_while(|d| d * d <= small).all(|d| small % d != 0));
        }
    }
    if has_small_factor(n) {
        return Screen::Decided(false);
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let w = Witness { n, n_minus_1, d, s };
    // Base 2 first: rejects nearly every composite at the cost of one modpow.
    if w.proves_composite(&BigUint::from(2u32)) {
        return Screen::Decided(false);
    }
    Screen::Pending(w)
}

/// Smallest prime >= n (used by tests and the seed search).
pub fn next_prime(n: &BigUint) -> BigUint {
    let mut c = n.clone();
    if c < BigUint::from(2u32) {
        return BigUint::from(2u32);
    }
    if c.is_even() && c != BigUint::from(2u32) {
        c += 1u32;
    }
    while !is_probable_prime_u(&c) {
        c += 2u32;
    }
    c
}
