//! Arbitrary-precision integer polynomials in one variable (`UniPoly`) and
//! two variables (`BiPoly`), with Sylvester resultants and an
//! irreducibility test modulo a prime.
//!
//! Resultants are determinants of Sylvester matrices computed with
//! fraction-free (Bareiss) elimination. For bivariate inputs the matrix
//! entries live in Z[t] and the elimination divides exactly in Z[t];
//! `resultant_x_interp` computes the same polynomial by evaluating at
//! integer points of t and interpolating.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::primes::is_probable_prime;
use crate::{Error, Result};

/// Unbounded signed integer.
pub type Integer = BigInt;

/// Parses a decimal or `0x`-prefixed hexadecimal integer with optional sign.
pub fn parse_integer(s: &str) -> Option<BigInt> {
    let s = s.trim().replace('_', "");
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest.trim()),
        None => (false, s.strip_prefix('+').unwrap_or(&s).trim()),
    };
    let mag = if let Some(hex) = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) {
        BigInt::parse_bytes(hex.as_bytes(), 16)?
    } else {
        BigInt::parse_bytes(body.as_bytes(), 10)?
    };
    Some(if neg { -mag } else { mag })
}

/// Serde adapter: integers are written as decimal strings and read from
/// either a TOML/JSON integer or a string (decimal or hex).
/// log2 |v| to double precision, for values of any size (-inf for zero).
pub fn log2_abs(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        return v.to_f64().map_or(f64::NAN, |f| f.abs().log2());
    }
    let shift = bits - 64;
    let top = v.magnitude() >> shift;
    top.to_f64().map_or(f64::NAN, f64::log2) + shift as f64
}

pub mod serde_integer {
    use super::*;
    use serde::de::{self, Visitor};
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v.to_i64() {
            Some(small) => s.serialize_i64(small),
            None => s.serialize_str(&v.to_string()),
        }
    }

    struct IntVisitor;

    impl<'de> Visitor<'de> for IntVisitor {
        type Value = BigInt;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an integer or a decimal/hex integer string")
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<BigInt, E> {
            Ok(BigInt::from(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<BigInt, E> {
            Ok(BigInt::from(v))
        }

        fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<BigInt, E> {
            parse_integer(v).ok_or_else(|| E::custom(format!("bad integer literal `{v}`")))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        d.deserialize_any(IntVisitor)
    }

    pub mod option {
        use super::*;

        #[derive(Deserialize)]
        struct Wrapped(#[serde(with = "super")] BigInt);

        pub fn serialize<S: Serializer>(
            v: &Option<BigInt>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            match v {
                Some(x) => super::serialize(x, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Option<BigInt>, D::Error> {
            Ok(Option::<Wrapped>::deserialize(d)?.map(|w| w.0))
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        #[derive(Deserialize)]
        struct Wrapped(#[serde(with = "super")] BigInt);

        pub fn serialize<S: Serializer>(
            v: &[BigInt],
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for c in v {
                match c.to_i64() {
                    Some(small) => seq.serialize_element(&small)?,
                    None => seq.serialize_element(&c.to_string())?,
                }
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Vec<BigInt>, D::Error> {
            let raw: Vec<Wrapped> = Vec::deserialize(d)?;
            Ok(raw.into_iter().map(|w| w.0).collect())
        }
    }
}

/// Dense univariate polynomial, coefficients in ascending degree order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct UniPoly {
    #[serde(with = "serde_integer::vec")]
    coeffs: Vec<BigInt>,
}

impl<'de> Deserialize<'de> for UniPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        serde_integer::vec::deserialize(d).map(UniPoly::new)
    }
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: BigInt, degree: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// `self(inner(x))`.
    pub fn compose(&self, inner: &UniPoly) -> Self {
        self.coeffs.iter().rev().fold(UniPoly::zero(), |acc, c| {
            &(&acc * inner) + &UniPoly::constant(c.clone())
        })
    }

    /// Exact division over Z; `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &UniPoly) -> Option<UniPoly> {
        let dd = divisor.degree()?;
        if self.is_zero() {
            return Some(UniPoly::zero());
        }
        let lc = divisor.leading().unwrap();
        let mut rem = self.coeffs.clone();
        let n = self.degree().unwrap();
        if n < dd {
            return None;
        }
        let mut quot = vec![BigInt::zero(); n - dd + 1];
        for i in (0..=n - dd).rev() {
            let top = &rem[i + dd];
            if top.is_zero() {
                continue;
            }
            let (q, r) = top.div_rem(lc);
            if !r.is_zero() {
                return None;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[i + j] -= &q * d;
            }
            quot[i] = q;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(UniPoly::new(quot))
    }

    /// Largest absolute coefficient.
    /// Remainder modulo a monic polynomial (exact over Z).
    pub fn rem_monic(&self, m: &UniPoly) -> UniPoly {
        assert!(m.is_monic(), "rem_monic needs a monic modulus");
        let dm = m.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        while r.len() > dm {
            let lead = r.pop().expect("nonempty");
            if lead.is_zero() {
                continue;
            }
            let shift = r.len() - dm;
            for (i, c) in m.coeffs[..dm].iter().enumerate() {
                r[shift + i] -= &lead * c;
            }
        }
        UniPoly::new(r)
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.coeffs
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    pub fn to_i64s(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn display_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{mag}*{mono}"));
            }
        }
        out
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_in("x"))
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
}

/// Sparse bivariate polynomial in (x, t); keys are `(deg_x, deg_t)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl BiPoly {
    pub fn zero() -> Self {
        BiPoly::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ((u32, u32), BigInt)>>(terms: I) -> Self {
        let mut out = BiPoly::zero();
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }

    /// Builds `sum_j coeffs[j](t) * x^j`.
    pub fn from_x_coeffs(coeffs: &[UniPoly]) -> Self {
        let mut out = BiPoly::zero();
        for (j, c) in coeffs.iter().enumerate() {
            for (i, v) in c.coeffs().iter().enumerate() {
                out.add_term((j as u32, i as u32), v.clone());
            }
        }
        out
    }

    /// A polynomial in t only.
    pub fn from_t_poly(p: &UniPoly) -> Self {
        Self::from_x_coeffs(std::slice::from_ref(p))
    }

    /// A polynomial in x only.
    pub fn from_x_poly(p: &UniPoly) -> Self {
        Self::from_x_coeffs(
            &p.coeffs()
                .iter()
                .map(|c| UniPoly::constant(c.clone()))
                .collect::<Vec<_>>(),
        )
    }

    fn add_term(&mut self, key: (u32, u32), c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigInt)> {
        self.terms.iter()
    }

    pub fn deg_x(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).max()
    }

    pub fn deg_t(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.1).max()
    }

    /// Coefficients in Z[t] of each power of x, index = x-degree.
    pub fn x_coeffs(&self) -> Vec<UniPoly> {
        let Some(dx) = self.deg_x() else {
            return Vec::new();
        };
        let mut raw: Vec<Vec<BigInt>> = vec![Vec::new(); dx as usize + 1];
        for (&(ix, it), c) in &self.terms {
            let row = &mut raw[ix as usize];
            if row.len() <= it as usize {
                row.resize(it as usize + 1, BigInt::zero());
            }
            row[it as usize] = c.clone();
        }
        raw.into_iter().map(UniPoly::new).collect()
    }

    pub fn eval(&self, x: &BigInt, t: &BigInt) -> BigInt {
        self.x_coeffs()
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c.eval(t))
    }

    /// Specialises t, leaving a polynomial in x.
    pub fn eval_t(&self, t: &BigInt) -> UniPoly {
        UniPoly::new(self.x_coeffs().iter().map(|c| c.eval(t)).collect())
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default()
    }

    /// `outer(self)`, for an outer univariate polynomial.
    pub fn substitute_into(&self, outer: &UniPoly) -> BiPoly {
        outer.coeffs().iter().rev().fold(BiPoly::zero(), |acc, c| {
            let mut next = &acc * self;
            next.add_term((0, 0), c.clone());
            next
        })
    }

    pub fn display(&self) -> String {
        let xs = self.x_coeffs();
        let mut parts = Vec::new();
        for (j, c) in xs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let ct = c.display_in("t");
            let part = match (j, c.weight()) {
                (0, _) => format!("({ct})"),
                (_, 1) if c.coeffs() == [BigInt::one()] => mono_x(j),
                _ => format!("({ct})*{}", mono_x(j)),
            };
            parts.push(part);
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Serialized as the list of t-coefficient lists of each power of x.
impl Serialize for BiPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.x_coeffs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BiPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Vec::<UniPoly>::deserialize(d).map(|cs| BiPoly::from_x_coeffs(&cs))
    }
}

fn mono_x(j: usize) -> String {
    if j == 1 {
        "x".into()
    } else {
        format!("x^{j}")
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, c.clone());
        }
        out
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, -c);
        }
        out
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (ka, a) in &self.terms {
            for (kb, b) in &rhs.terms {
                out.add_term((ka.0 + kb.0, ka.1 + kb.1), a * b);
            }
        }
        out
    }
}

/// Commutative ring elements admitting exact division, as needed by
/// fraction-free elimination.
trait ExactRing: Clone {
    fn ring_zero() -> Self;
    fn ring_is_zero(&self) -> bool;
    fn mul(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div_exact(&self, rhs: &Self) -> Self;
}

impl ExactRing for BigInt {
    fn ring_zero() -> Self {
        Zero::zero()
    }
    fn ring_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        debug_assert!(Zero::is_zero(&(self % rhs)));
        self / rhs
    }
}

impl ExactRing for UniPoly {
    fn ring_zero() -> Self {
        UniPoly::zero()
    }
    fn ring_is_zero(&self) -> bool {
        UniPoly::is_zero(self)
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        UniPoly::div_exact(self, rhs).expect("Bareiss step must divide exactly")
    }
}

/// Bareiss fraction-free determinant.
fn bareiss_det<R: ExactRing>(mut m: Vec<Vec<R>>) -> R {
    let n = m.len();
    assert!(n > 0, "empty matrix");
    let mut negate = false;
    let mut prev: Option<R> = None;
    for k in 0..n - 1 {
        if m[k][k].ring_is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].ring_is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return R::ring_zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = match &prev {
                    Some(p) => v.div_exact(p),
                    None => v,
                };
            }
        }
        prev = Some(m[k][k].clone());
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        det.neg()
    } else {
        det
    }
}

/// Sylvester matrix of `f` (formal degree `m`) and `g` (formal degree `n`),
/// coefficients given in ascending order and padded to the formal degree.
fn sylvester<R: ExactRing>(f: &[R], m: usize, g: &[R], n: usize) -> Vec<Vec<R>> {
    let size = m + n;
    let at = |c: &[R], i: usize| c.get(i).cloned().unwrap_or_else(R::ring_zero);
    let mut rows = Vec::with_capacity(size);
    for r in 0..n {
        let mut row = vec![R::ring_zero(); size];
        for i in 0..=m {
            row[r + i] = at(f, m - i);
        }
        rows.push(row);
    }
    for r in 0..m {
        let mut row = vec![R::ring_zero(); size];
        for i in 0..=n {
            row[r + i] = at(g, n - i);
        }
        rows.push(row);
    }
    rows
}

fn pow_ring<R: ExactRing>(base: &R, e: usize, one: R) -> R {
    (0..e).fold(one, |acc, _| acc.mul(base))
}

/// Resultant of two nonzero univariate polynomials.
pub fn resultant_uni(f: &UniPoly, g: &UniPoly) -> Result<BigInt> {
    let (Some(m), Some(n)) = (f.degree(), g.degree()) else {
        return Err(Error::InvalidArgument(
            "resultant of a zero polynomial".into(),
        ));
    };
    Ok(match (m, n) {
        (0, 0) => BigInt::one(),
        (0, _) => pow_ring(&f.coeffs()[0], n, BigInt::one()),
        (_, 0) => pow_ring(&g.coeffs()[0], m, BigInt::one()),
        _ => bareiss_det(sylvester(f.coeffs(), m, g.coeffs(), n)),
    })
}

fn check_bivariate_pair(phi: &BiPoly, f: &BiPoly) -> Result<(u32, u32)> {
    if phi.is_zero() || f.is_zero() {
        return Err(Error::InvalidArgument(
            "resultant of a zero polynomial".into(),
        ));
    }
    let (m, n) = (phi.deg_x().unwrap(), f.deg_x().unwrap());
    if m == 0 && n == 0 {
        return Err(Error::InvalidArgument(
            "both polynomials are constant in x; nothing to eliminate".into(),
        ));
    }
    Ok((m, n))
}

/// Resultant with respect to x of two bivariate polynomials; a polynomial in t.
pub fn resultant_x(phi: &BiPoly, f: &BiPoly) -> Result<UniPoly> {
    let (m, n) = check_bivariate_pair(phi, f)?;
    let a = phi.x_coeffs();
    let b = f.x_coeffs();
    Ok(match (m, n) {
        (0, _) => pow_ring(&a[0], n as usize, UniPoly::constant(BigInt::one())),
        (_, 0) => pow_ring(&b[0], m as usize, UniPoly::constant(BigInt::one())),
        _ => bareiss_det(sylvester(&a, m as usize, &b, n as usize)),
    })
}

/// Same as [`resultant_x`], via evaluation at integer t and interpolation.
pub fn resultant_x_interp(phi: &BiPoly, f: &BiPoly) -> Result<UniPoly> {
    let (m, n) = check_bivariate_pair(phi, f)?;
    let bound = (m * f.deg_t().unwrap() + n * phi.deg_t().unwrap()) as i64;
    let a = phi.x_coeffs();
    let b = f.x_coeffs();
    let points: Vec<BigInt> = (0..=bound)
        .map(|i| BigInt::from(if i % 2 == 0 { -(i / 2) } else { i / 2 + 1 }))
        .collect();
    let values: Vec<BigInt> = points
        .iter()
        .map(|t| {
            let ea: Vec<BigInt> = a.iter().map(|c| c.eval(t)).collect();
            let eb: Vec<BigInt> = b.iter().map(|c| c.eval(t)).collect();
            match (m, n) {
                (0, _) => pow_ring(&ea[0], n as usize, BigInt::one()),
                (_, 0) => pow_ring(&eb[0], m as usize, BigInt::one()),
                _ => bareiss_det(sylvester(&ea, m as usize, &eb, n as usize)),
            }
        })
        .collect();
    Ok(interpolate(&points, &values))
}

/// Newton interpolation through integer points; the caller guarantees the
/// interpolant has integer coefficients.
fn interpolate(xs: &[BigInt], ys: &[BigInt]) -> UniPoly {
    let n = xs.len();
    let mut dd: Vec<BigRational> = ys.iter().map(|y| BigRational::from(y.clone())).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            let num = &dd[i] - &dd[i - 1];
            let den = BigRational::from(&xs[i] - &xs[i - level]);
            dd[i] = num / den;
        }
    }
    // Expand the Newton form from the innermost term outwards.
    let mut acc: Vec<BigRational> = vec![dd[n - 1].clone()];
    for i in (0..n - 1).rev() {
        let mut next = vec![BigRational::zero(); acc.len() + 1];
        let xi = BigRational::from(xs[i].clone());
        for (k, c) in acc.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * &xi;
        }
        next[0] += &dd[i];
        acc = next;
    }
    UniPoly::new(
        acc.into_iter()
            .map(|c| {
                assert!(c.is_integer(), "interpolant is not integral");
                c.to_integer()
            })
            .collect(),
    )
}

/// Polynomial over F_p with dense `BigUint` coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
struct FpPoly(Vec<BigUint>);

struct Fp<'a> {
    p: &'a BigUint,
}

impl Fp<'_> {
    fn reduce(&self, f: &UniPoly) -> FpPoly {
        let p = BigInt::from(self.p.clone());
        let mut v: Vec<BigUint> = f
            .coeffs()
            .iter()
            .map(|c| c.mod_floor(&p).to_biguint().unwrap())
            .collect();
        trim(&mut v);
        FpPoly(v)
    }

    fn inv(&self, a: &BigUint) -> BigUint {
        // p is prime: Fermat inverse.
        a.modpow(&(self.p - 2u32), self.p)
    }

    fn monic(&self, f: &mut FpPoly) {
        if let Some(lc) = f.0.last().cloned() {
            let inv = self.inv(&lc);
            for c in f.0.iter_mut() {
                *c = (&*c * &inv) % self.p;
            }
        }
    }

    /// `a mod b`, with `b` monic.
    fn rem_monic(&self, a: &mut Vec<BigUint>, b: &FpPoly) {
        let db = b.0.len() - 1;
        while a.len() > db {
            let top = a.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let base = a.len() - db;
            for j in 0..db {
                let sub = (&top * &b.0[j]) % self.p;
                a[base + j] = (&a[base + j] + self.p - sub) % self.p;
            }
        }
        trim(a);
    }

    fn mulmod(&self, a: &FpPoly, b: &FpPoly, m: &FpPoly) -> FpPoly {
        if a.0.is_empty() || b.0.is_empty() {
            return FpPoly(Vec::new());
        }
        let mut out = vec![BigUint::zero(); a.0.len() + b.0.len() - 1];
        for (i, x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        for c in out.iter_mut() {
            *c %= self.p;
        }
        self.rem_monic(&mut out, m);
        FpPoly(out)
    }

    fn powmod(&self, base: &FpPoly, e: &BigUint, m: &FpPoly) -> FpPoly {
        let mut result = FpPoly(vec![BigUint::one()]);
        for i in (0..e.bits()).rev() {
            result = self.mulmod(&result, &result, m);
            if e.bit(i) {
                result = self.mulmod(&result, base, m);
            }
        }
        result
    }

    /// `g(x_p) mod m` by Horner.
    fn compose(&self, g: &FpPoly, xp: &FpPoly, m: &FpPoly) -> FpPoly {
        let mut acc = FpPoly(Vec::new());
        for c in g.0.iter().rev() {
            acc = self.mulmod(&acc, xp, m);
            if acc.0.is_empty() {
                acc.0.push(BigUint::zero());
            }
            acc.0[0] = (&acc.0[0] + c) % self.p;
            trim(&mut acc.0);
        }
        acc
    }

    fn gcd(&self, a: &FpPoly, b: &FpPoly) -> FpPoly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.0.is_empty() {
            self.monic(&mut b);
            let mut r = a.0.clone();
            self.rem_monic(&mut r, &b);
            a = b;
            b = FpPoly(r);
        }
        self.monic(&mut a);
        a
    }
}

fn trim(v: &mut Vec<BigUint>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

/// Distinct-degree irreducibility test of `f` over F_p.
pub fn is_irreducible_mod_p(f: &UniPoly, p: &BigInt) -> Result<bool> {
    if p.sign() != Sign::Plus || !is_probable_prime(p) {
        return Err(Error::InvalidArgument(format!("modulus {p} is not prime")));
    }
    let pu = p.to_biguint().unwrap();
    let fp = Fp { p: &pu };
    let mut fm = fp.reduce(f);
    if fm.0.is_empty() {
        return Err(Error::InvalidArgument("polynomial vanishes mod p".into()));
    }
    fp.monic(&mut fm);
    let d = fm.0.len() - 1;
    match d {
        0 => return Ok(false),
        1 => return Ok(true),
        _ => {}
    }
    let x = FpPoly(vec![BigUint::zero(), BigUint::one()]);
    let x1 = fp.powmod(&x, &pu, &fm);
    let mut xi = x1.clone();
    for i in 1..=d / 2 {
        if i > 1 {
            xi = fp.compose(&xi, &x1, &fm);
        }
        // xi - x
        let mut diff = xi.0.clone();
        if diff.len() < 2 {
            diff.resize(2, BigUint::zero());
        }
        diff[1] = (&diff[1] + &pu - 1u32) % &pu;
        trim(&mut diff);
        let g = fp.gcd(&fm, &FpPoly(diff));
        if g.0.len() > 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Evaluates a univariate polynomial (alias kept for symmetry with `eval_bi`).
pub fn eval(f: &UniPoly, x: &BigInt) -> BigInt {
    f.eval(x)
}

pub fn eval_bi(f: &BiPoly, x: &BigInt, t: &BigInt) -> BigInt {
    f.eval(x, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(c: &[i64]) -> UniPoly {
        UniPoly::from_i64s(c)
    }

    fn bi(c: &[&[i64]]) -> BiPoly {
        BiPoly::from_x_coeffs(&c.iter().map(|t| up(t)).collect::<Vec<_>>())
    }

    #[test]
    fn resultant_examples() {
        assert_eq!(
            resultant_uni(&up(&[-3, 1]), &up(&[1, 0, 1])).unwrap(),
            10.into()
        );
        assert_eq!(
            resultant_uni(&up(&[1, 0, 1]), &up(&[-2, 1])).unwrap(),
            5.into()
        );
        assert_eq!(
            resultant_uni(&up(&[-1, 0, 1]), &up(&[-4, 0, 1])).unwrap(),
            9.into()
        );
    }

    #[test]
    fn resultant_rejects_zero() {
        assert!(matches!(
            resultant_uni(&UniPoly::zero(), &up(&[1, 1])),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn resultant_with_constants() {
        assert_eq!(resultant_uni(&up(&[3]), &up(&[1, 2, 1])).unwrap(), 9.into());
        assert_eq!(
            resultant_uni(&up(&[1, 2, 1]), &up(&[-2])).unwrap(),
            4.into()
        );
        assert_eq!(resultant_uni(&up(&[5]), &up(&[7])).unwrap(), 1.into());
    }

    #[test]
    fn resultant_x_linear_elimination() {
        // phi = a(t) - x b(t), f = x - u  ->  a(t) - u b(t)
        let a = up(&[3, -1, 2]);
        let b = up(&[1, 4]);
        let phi = BiPoly::from_x_coeffs(&[a.clone(), -&b]);
        let u = BigInt::from(11);
        let f = BiPoly::from_x_coeffs(&[UniPoly::constant(-u.clone()), up(&[1])]);
        let r = resultant_x(&phi, &f).unwrap();
        let expect = &a - &b.scale(&u);
        // Res(phi, f) with deg f = 1 is +-(a - u b).
        assert!(r == expect || r == -&expect);
    }

    #[test]
    fn resultant_x_substitution() {
        // phi = x - t, f = x^2 - t  ->  t^2 - t
        let phi = bi(&[&[0, -1], &[1]]);
        let f = bi(&[&[0, -1], &[0], &[1]]);
        assert_eq!(resultant_x(&phi, &f).unwrap(), up(&[0, -1, 1]));
        assert_eq!(resultant_x_interp(&phi, &f).unwrap(), up(&[0, -1, 1]));
    }

    #[test]
    fn resultant_x_constant_phi() {
        let phi = bi(&[&[7]]);
        let f = bi(&[&[1, 1], &[0, 2], &[0], &[1]]);
        assert_eq!(resultant_x(&phi, &f).unwrap(), up(&[343]));
        assert!(resultant_x(&bi(&[&[2]]), &bi(&[&[0, 1]])).is_err());
    }

    #[test]
    fn irreducible_examples() {
        assert!(is_irreducible_mod_p(&up(&[1, 0, 1]), &3.into()).unwrap());
        assert!(!is_irreducible_mod_p(&up(&[-1, 0, 1]), &5.into()).unwrap());
        assert!(is_irreducible_mod_p(&up(&[1, 0, 1]), &7.into()).unwrap());
        assert!(matches!(
            is_irreducible_mod_p(&up(&[1, 0, 1]), &9.into()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn irreducible_without_roots_but_reducible() {
        // (x^2 + 1)^2 has no roots mod 3 but is reducible.
        let f = &up(&[1, 0, 1]) * &up(&[1, 0, 1]);
        assert!(!is_irreducible_mod_p(&f, &3.into()).unwrap());
    }

    #[test]
    fn eval_examples() {
        assert_eq!(up(&[1, 0, 1]).eval(&0.into()), 1.into());
        let f = up(&[4, -3, 7, 2, -9]);
        let alt: i64 = [4, -3, 7, 2, -9]
            .iter()
            .enumerate()
            .map(|(i, c)| if i % 2 == 0 { *c } else { -*c })
            .sum();
        assert_eq!(f.eval(&(-1).into()), alt.into());
        let g = bi(&[&[1, 2], &[0, 0, 3]]);
        // 1 + 2t + 3 t^2 x at x=2, t=-1
        assert_eq!(eval_bi(&g, &2.into(), &(-1).into()), 5.into());
    }

    #[test]
    fn integer_literals() {
        assert_eq!(parse_integer("-0x10"), Some((-16).into()));
        assert_eq!(parse_integer(" 1_000 "), Some(1000.into()));
        assert_eq!(parse_integer("0xg"), None);
    }

    #[test]
    fn compose_and_div_exact() {
        let p = up(&[1, 6, 24, 36, 36]);
        let q = up(&[0, 0, 1]);
        let c = p.compose(&q);
        assert_eq!(c.degree(), Some(8));
        assert_eq!(c.coeff(8), 36.into());
        let prod = &up(&[1, 2]) * &up(&[-3, 0, 5]);
        assert_eq!(prod.div_exact(&up(&[1, 2])).unwrap(), up(&[-3, 0, 5]));
        assert!(up(&[1, 0, 1]).div_exact(&up(&[0, 2])).is_none());
    }
}
