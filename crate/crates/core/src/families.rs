//! Pairing-friendly curve families, standard curves and seed search.

use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer as _;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::intpoly::{serde_integer, UniPoly};
use crate::primes::{is_probable_prime, passes_quick_test, rem_u64, trial_groups};
use crate::setup::Recipe;
use crate::{Error, Result};

const BUILTIN_REGISTRY: &str = include_str!("../data/registry.toml");

/// Upper bound on seed candidates examined by [`find_seed`].
pub const SEED_SEARCH_BUDGET: u64 = 64_000_000;

const SEED_CHUNK: usize = 1024;

/// Allowed residues of the seed modulo `modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedCongruence {
    pub modulus: u64,
    pub residues: Vec<u64>,
}

impl SeedCongruence {
    pub fn admits(&self, u: &BigInt) -> bool {
        let m = BigInt::from(self.modulus);
        let r = u.mod_floor(&m).to_u64().unwrap_or(0);
        self.residues.binary_search(&r).is_ok()
    }
}

/// A polynomial family: p(u) = p_num(u)/p_den, r(u) = r_num(u)/r_den.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub name: String,
    pub k: u32,
    pub p_num: UniPoly,
    #[serde(with = "serde_integer")]
    pub p_den: BigInt,
    pub r_num: UniPoly,
    #[serde(with = "serde_integer")]
    pub r_den: BigInt,
    /// Trace of Frobenius t(u), when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<UniPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recipe: Option<Recipe>,
    #[serde(skip)]
    seed_congruences: Vec<SeedCongruence>,
}

impl FamilySpec {
    pub fn new(
        name: impl Into<String>,
        k: u32,
        p_num: UniPoly,
        p_den: BigInt,
        r_num: UniPoly,
        r_den: BigInt,
    ) -> Result<Self> {
        let mut f = FamilySpec {
            name: name.into(),
            k,
            p_num,
            p_den,
            r_num,
            r_den,
            trace: None,
            recipe: None,
            seed_congruences: Vec::new(),
        };
        f.finish()?;
        Ok(f)
    }

    fn finish(&mut self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config(format!(
                "{}: embedding degree must be positive",
                self.name
            )));
        }
        if self.p_den < BigInt::one() || self.r_den < BigInt::one() {
            return Err(Error::Config(format!(
                "{}: denominators must be >= 1",
                self.name
            )));
        }
        if self.p_num.degree().unwrap_or(0) == 0 || self.r_num.degree().unwrap_or(0) == 0 {
            return Err(Error::Config(format!(
                "{}: p and r must be non-constant",
                self.name
            )));
        }
        if let Some(rec) = &self.recipe {
            if rec.eta * rec.kappa != self.k {
                return Err(Error::Config(format!(
                    "{}: recipe eta*kappa = {} but k = {}",
                    self.name,
                    rec.eta * rec.kappa,
                    self.k
                )));
            }
        }
        self.seed_congruences = vec![derive_congruence(self)?];
        Ok(())
    }

    /// Residue classes of u for which p and r are odd integers.
    pub fn seed_congruences(&self) -> &[SeedCongruence] {
        &self.seed_congruences
    }

    pub fn admits_seed(&self, u: &BigInt) -> bool {
        self.seed_congruences.iter().all(|c| c.admits(u))
    }

    /// p(u), or `None` when the division is not exact.
    pub fn p_at(&self, u: &BigInt) -> Option<BigInt> {
        exact_div(&self.p_num.eval(u), &self.p_den)
    }

    pub fn r_at(&self, u: &BigInt) -> Option<BigInt> {
        exact_div(&self.r_num.eval(u), &self.r_den)
    }

    /// n(u) = p(u) + 1 - t(u) when a trace polynomial is registered.
    pub fn curve_order_at(&self, u: &BigInt) -> Option<BigInt> {
        let t = self.trace.as_ref()?.eval(u);
        Some(self.p_at(u)? + 1 - t)
    }

    pub fn p_degree(&self) -> usize {
        self.p_num.degree().unwrap_or(0)
    }
}

fn exact_div(n: &BigInt, d: &BigInt) -> Option<BigInt> {
    let (q, r) = n.div_rem(d);
    r.is_zero().then_some(q)
}

fn eval_mod(poly: &UniPoly, x: u64, m: u64) -> u64 {
    let mb = BigInt::from(m);
    let coeffs: Vec<u128> = poly
        .coeffs()
        .iter()
        .map(|c| c.mod_floor(&mb).to_u64().unwrap_or(0) as u128)
        .collect();
    let (x, m) = (x as u128, m as u128);
    coeffs.iter().rev().fold(0u128, |acc, &c| (acc * x + c) % m) as u64
}

/// For each small prime q not dividing the denominators, the residues of u
/// mod q at which q divides p(u) or r(u). Candidates hitting one are
/// rejected before any bignum arithmetic.
struct ResidueSieve {
    groups: Vec<(u64, Vec<(u64, Vec<bool>)>)>,
}

impl ResidueSieve {
    fn new(family: &FamilySpec) -> Self {
        let dens = &family.p_den * &family.r_den;
        let groups = trial_groups()
            .iter()
            .map(|(prod, qs)| {
                let rows = qs
                    .iter()
                    .filter(|&&q| !(&dens % q).is_zero())
                    .map(|&q| {
                        let pn = reduce_coeffs(&family.p_num, q);
                        let rn = reduce_coeffs(&family.r_num, q);
                        let bad = (0..q)
                            .map(|x| horner_mod(&pn, x, q) == 0 || horner_mod(&rn, x, q) == 0)
                            .collect();
                        (q, bad)
                    })
                    .collect();
                (*prod, rows)
            })
            .collect();
        ResidueSieve { groups }
    }

    fn passes(&self, u: &BigInt) -> bool {
        self.groups.iter().all(|(prod, rows)| {
            let mut r = rem_u64(u.magnitude(), *prod);
            if u.sign() == Sign::Minus && r != 0 {
                r = prod - r;
            }
            rows.iter().all(|(q, bad)| !bad[(r % q) as usize])
        })
    }
}

fn reduce_coeffs(poly: &UniPoly, m: u64) -> Vec<u64> {
    let mb = BigInt::from(m);
    poly.coeffs()
        .iter()
        .map(|c| c.mod_floor(&mb).to_u64().unwrap_or(0))
        .collect()
}

fn horner_mod(coeffs: &[u64], x: u64, m: u64) -> u64 {
    let (x, m) = (x as u128, m as u128);
    coeffs.iter().rev().fold(0u128, |acc, &c| (acc * x + c as u128) % m) as u64
}

/// Residues of u modulo 2*lcm(p_den, r_den) making p and r odd integers,
/// reduced to the smallest period.
fn derive_congruence(f: &FamilySpec) -> Result<SeedCongruence> {
    let (pd, rd) = match (f.p_den.to_u64(), f.r_den.to_u64()) {
        (Some(a), Some(b)) if a.lcm(&b) <= 1 << 24 => (a, b),
        _ => return Err(Error::Config(format!("{}: denominators too large", f.name))),
    };
    let modulus = 2 * pd.lcm(&rd);
    let ok = |u: u64| {
        let pv = eval_mod(&f.p_num, u % (2 * pd), 2 * pd);
        let rv = eval_mod(&f.r_num, u % (2 * rd), 2 * rd);
        pv.is_multiple_of(pd) && (pv / pd) % 2 == 1 && rv.is_multiple_of(rd) && (rv / rd) % 2 == 1
    };
    let admitted: Vec<bool> = (0..modulus).map(ok).collect();
    let period = (1..=modulus)
        .filter(|d| modulus % d == 0)
        .find(|&d| {
            (0..modulus).all(|u| admitted[u as usize] == admitted[((u + d) % modulus) as usize])
        })
        .unwrap_or(modulus);
    let residues: Vec<u64> = (0..period).filter(|&u| admitted[u as usize]).collect();
    if residues.is_empty() {
        return Err(Error::Config(format!(
            "{}: no seed makes p and r odd integers",
            f.name
        )));
    }
    Ok(SeedCongruence {
        modulus: period,
        residues,
    })
}

/// A concrete curve from a family and a seed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveInstance {
    pub family: String,
    #[serde(with = "serde_integer")]
    pub u: BigInt,
    #[serde(with = "serde_integer")]
    pub p: BigInt,
    #[serde(with = "serde_integer")]
    pub r: BigInt,
    pub k: u32,
    pub p_bits: u64,
    pub r_bits: u64,
}

impl CurveInstance {
    /// Bit length of Q = p^k.
    pub fn q_bits(&self) -> u64 {
        self.p_bits * self.k as u64
    }
}

pub fn instantiate(family: &FamilySpec, u: &BigInt) -> Result<CurveInstance> {
    let congruence_err = || Error::SeedCongruence {
        family: family.name.clone(),
        seed: format!("{u:#x}"),
    };
    let p = family.p_at(u).ok_or_else(congruence_err)?;
    let r = family.r_at(u).ok_or_else(congruence_err)?;
    for (which, v) in [("p", &p), ("r", &r)] {
        if !is_probable_prime(v) {
            return Err(Error::NonPrimeInstance {
                family: family.name.clone(),
                seed: format!("{u:#x}"),
                which,
            });
        }
    }
    Ok(CurveInstance {
        family: family.name.clone(),
        u: u.clone(),
        p_bits: p.bits(),
        r_bits: r.bits(),
        p,
        r,
        k: family.k,
    })
}

/// Visits the signed-binary integers ±(2^e0 ± 2^e1 ± ... ) with exactly
/// `weight` nonzero digits and magnitude in [lo, hi], highest digits first.
/// Branches that cannot reach the interval are pruned. Returns false when
/// the visitor asked to stop.
fn visit_seeds(weight: usize, lo: f64, hi: f64, visit: &mut dyn FnMut(BigInt) -> bool) -> bool {
    fn walk(
        sum: f64,
        u: &BigInt,
        below: u32,
        left: usize,
        lo: f64,
        hi: f64,
        visit: &mut dyn FnMut(BigInt) -> bool,
    ) -> bool {
        if left == 0 {
            return !(lo..=hi).contains(&sum) || (visit(u.clone()) && visit(-u));
        }
        for e in (left as u32 - 1..below).rev() {
            let term = (e as f64).exp2();
            let slack = if left > 1 { term } else { 0.0 };
            for sign in [1.0, -1.0] {
                let s = sum + sign * term;
                if s + slack < lo || s - slack > hi {
                    continue;
                }
                let next = if sign > 0.0 {
                    u + (BigInt::one() << e)
                } else {
                    u - (BigInt::one() << e)
                };
                if !walk(s, &next, e, left - 1, lo, hi, visit) {
                    return false;
                }
            }
        }
        true
    }
    if weight == 0 || !(hi >= lo) || hi < 1.0 {
        return true;
    }
    let top_lo = lo.max(1.0).log2().floor() as u32;
    let top_hi = hi.log2().ceil() as u32 + 1;
    for top in top_lo.saturating_sub(1)..=top_hi {
        let term = (top as f64).exp2();
        let slack = if weight > 1 { term } else { 0.0 };
        if term + slack < lo || term - slack > hi || (top as usize) + 1 < weight {
            continue;
        }
        let u = BigInt::one() << top;
        if !walk(term, &u, top, weight - 1, lo, hi, visit) {
            return false;
        }
    }
    true
}

/// Finds a low-weight seed u with p, r prime and p within 2 bits of the
/// target. Weights are tried in increasing order; within a batch of
/// candidates the smallest |u| wins.
pub fn find_seed(
    family: &FamilySpec,
    target_p_bits: u64,
    max_hamming_weight: usize,
) -> Result<BigInt> {
    find_instance(family, target_p_bits, max_hamming_weight).map(|c| c.u)
}

pub fn find_instance(
    family: &FamilySpec,
    target_p_bits: u64,
    max_hamming_weight: usize,
) -> Result<CurveInstance> {
    find_instance_with_budget(
        family,
        target_p_bits,
        max_hamming_weight,
        SEED_SEARCH_BUDGET,
    )
}

pub fn find_instance_with_budget(
    family: &FamilySpec,
    target_p_bits: u64,
    max_hamming_weight: usize,
    budget: u64,
) -> Result<CurveInstance> {
    if target_p_bits < 64 {
        return Err(Error::InvalidArgument(format!(
            "target_p_bits must be >= 64, got {target_p_bits}"
        )));
    }
    if max_hamming_weight < 2 {
        return Err(Error::InvalidArgument(
            "max_hamming_weight must be >= 2".into(),
        ));
    }
    let d = family.p_degree() as f64;
    let lc = family
        .p_num
        .leading()
        .map_or(1.0, |c| c.to_f64().unwrap_or(1.0).abs());
    let c = (lc / family.p_den.to_f64().unwrap_or(1.0)).log2();
    let lo = target_p_bits.saturating_sub(2);
    let hi = target_p_bits + 2;
    // |u| range for which the leading term puts p in [2^(lo-1), 2^hi),
    // widened so lower-order terms cannot hide a candidate.
    let slack = 0.5 / d;
    let u_lo = ((lo as f64 - 1.0 - c) / d - slack).exp2();
    let u_hi = ((hi as f64 - c) / d + slack).exp2();

    let sieve = ResidueSieve::new(family);
    let test = |chunk: &mut Vec<BigInt>| -> Option<CurveInstance> {
        chunk.sort_by(|a, b| a.abs().cmp(&b.abs()).then(a.cmp(b)));
        let found = chunk.par_iter().find_map_first(|u| {
            let p = family.p_at(u)?;
            if p.bits() < lo || p.bits() > hi {
                return None;
            }
            let r = family.r_at(u)?;
            let prime = passes_quick_test(&r)
                && passes_quick_test(&p)
                && is_probable_prime(&r)
                && is_probable_prime(&p);
            prime.then(|| instantiate(family, u).ok()).flatten()
        });
        chunk.clear();
        found
    };
    let mut examined = 0u64;
    for weight in 2..=max_hamming_weight {
        let mut chunk: Vec<BigInt> = Vec::with_capacity(SEED_CHUNK);
        let mut found = None;
        visit_seeds(weight, u_lo, u_hi, &mut |u| {
            examined += 1;
            if family.admits_seed(&u) && sieve.passes(&u) {
                chunk.push(u);
                if chunk.len() == SEED_CHUNK {
                    found = test(&mut chunk);
                }
            }
            found.is_none() && examined < budget
        });
        if found.is_none() {
            found = test(&mut chunk);
        }
        if let Some(inst) = found {
            return Ok(inst);
        }
        if examined >= budget {
            return Err(Error::NotFound {
                what: format!("{} seed for {target_p_bits}-bit p", family.name),
                budget,
            });
        }
    }
    Err(Error::NotFound {
        what: format!(
            "{} seed of weight <= {max_hamming_weight} for {target_p_bits}-bit p",
            family.name
        ),
        budget: examined,
    })
}

/// A named curve from the literature.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandardCurve {
    pub name: String,
    pub family: String,
    #[serde(with = "serde_integer")]
    pub u: BigInt,
    #[serde(default)]
    pub source: String,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    #[serde(default, rename = "family")]
    families: Vec<FamilySpec>,
    #[serde(default, rename = "curve")]
    curves: Vec<StandardCurve>,
}

/// Families and standard curves, looked up by case-insensitive name.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    families: Vec<FamilySpec>,
    curves: Vec<StandardCurve>,
}

impl Registry {
    /// The five families and eleven standard curves shipped with the crate.
    pub fn builtin() -> &'static Registry {
        static REG: OnceLock<Registry> = OnceLock::new();
        REG.get_or_init(|| {
            Registry::from_toml_str(BUILTIN_REGISTRY).expect("builtin registry is valid")
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: RegistryFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut reg = Registry::default();
        reg.extend_with(file)?;
        Ok(reg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        let file = RegistryFile {
            families: self.families.clone(),
            curves: self.curves.clone(),
        };
        toml::to_string(&file).expect("registry serializes")
    }

    /// Adds the entries of `other`, replacing same-named ones.
    pub fn merge(&mut self, other: &Registry) -> Result<()> {
        self.extend_with(RegistryFile {
            families: other.families.clone(),
            curves: other.curves.clone(),
        })
    }

    fn extend_with(&mut self, file: RegistryFile) -> Result<()> {
        for mut fam in file.families {
            fam.finish()?;
            self.families
                .retain(|f| !f.name.eq_ignore_ascii_case(&fam.name));
            self.families.push(fam);
        }
        for curve in file.curves {
            let fam = self.family(&curve.family)?;
            if fam.p_at(&curve.u).is_none() || fam.r_at(&curve.u).is_none() {
                return Err(Error::Config(format!(
                    "{}: seed does not give integral p and r",
                    curve.name
                )));
            }
            self.curves
                .retain(|c| !c.name.eq_ignore_ascii_case(&curve.name));
            self.curves.push(curve);
        }
        Ok(())
    }

    pub fn families(&self) -> &[FamilySpec] {
        &self.families
    }

    pub fn curves(&self) -> &[StandardCurve] {
        &self.curves
    }

    pub fn family(&self, name: &str) -> Result<&FamilySpec> {
        self.families
            .iter()
            .find(|f| f.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Unknown(name.to_string()))
    }

    pub fn curve(&self, name: &str) -> Result<&StandardCurve> {
        self.curves
            .iter()
            .find(|c| c.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Unknown(name.to_string()))
    }

    pub fn instance(&self, curve_name: &str) -> Result<CurveInstance> {
        let c = self.curve(curve_name)?;
        instantiate(self.family(&c.family)?, &c.u)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> &'static Registry {
        Registry::builtin()
    }

    #[test]
    fn builtin_loads() {
        assert_eq!(reg().families().len(), 5);
        assert_eq!(reg().curves().len(), 11);
        assert!(reg().family("bn").is_ok());
        assert!(matches!(reg().curve("BN999"), Err(Error::Unknown(_))));
    }

    #[test]
    fn bn256_instance() {
        let c = reg().instance("BN256").unwrap();
        assert_eq!((c.p_bits, c.r_bits, c.k), (256, 256, 12));
        let bn = reg().family("BN").unwrap();
        assert_eq!(bn.curve_order_at(&c.u).unwrap(), c.r);
    }

    #[test]
    fn bls12_381_instance() {
        let u = -((BigInt::one() << 63u32)
            + (BigInt::one() << 62u32)
            + (BigInt::one() << 60u32)
            + (BigInt::one() << 57u32)
            + (BigInt::one() << 48u32)
            + (BigInt::one() << 16u32));
        let c = instantiate(reg().family("BLS12").unwrap(), &u).unwrap();
        assert_eq!((c.p_bits, c.r_bits), (381, 255));
    }

    #[test]
    fn derived_congruences() {
        let kss16 = reg().family("KSS16").unwrap();
        assert_eq!(
            kss16.seed_congruences(),
            &[SeedCongruence {
                modulus: 70,
                residues: vec![25, 45]
            }]
        );
        let kss18 = reg().family("KSS18").unwrap();
        assert_eq!(
            kss18.seed_congruences(),
            &[SeedCongruence {
                modulus: 42,
                residues: vec![14, 28]
            }]
        );
    }

    #[test]
    fn bad_seed_errors() {
        let kss18 = reg().family("KSS18").unwrap();
        assert!(matches!(
            instantiate(kss18, &BigInt::from(1)),
            Err(Error::SeedCongruence { .. })
        ));
        let bn = reg().family("BN").unwrap();
        assert!(matches!(
            instantiate(bn, &BigInt::from(3)),
            Err(Error::NonPrimeInstance { .. })
        ));
    }

    #[test]
    fn seed_enumeration_weight() {
        let mut seeds = Vec::new();
        visit_seeds(3, 0.0, 1e9, &mut |u| {
            seeds.push(u);
            true
        });
        // Top 4 alone gives C(4,2) exponent pairs, 4 digit signs, 2 overall signs.
        assert!(seeds.len() >= 6 * 8);
        assert!(seeds.contains(&BigInt::from(16 + 2 + 1)));
        assert!(seeds.contains(&BigInt::from(-(16 - 8 - 4))));

        let mut ranged = Vec::new();
        visit_seeds(4, 1000.0, 1100.0, &mut |u| {
            ranged.push(u);
            true
        });
        assert!(!ranged.is_empty());
        assert!(ranged
            .iter()
            .all(|u| (1000..=1100).contains(&u.abs().to_i64().unwrap())));
    }

    #[test]
    fn roundtrip_registry_text() {
        let text = reg().to_toml_string();
        let back = Registry::from_toml_str(&text).unwrap();
        assert_eq!(back.curves(), reg().curves());
        assert_eq!(back.families().len(), 5);
        assert_eq!(
            back.family("KSS18").unwrap().recipe,
            reg().family("KSS18").unwrap().recipe
        );
    }
}
