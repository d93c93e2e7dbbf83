//! SexTNFS polynomial setups (h, f1, f2, w, 𝒜) per curve family.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::families::{CurveInstance, FamilySpec};
use crate::intpoly::{is_irreducible_mod_p, resultant_x, serde_integer, BiPoly, UniPoly};
use crate::{Error, Result};

/// Default number of candidates tried by [`select_h`].
pub const SELECT_H_BUDGET: u64 = 20_000;

/// Family-level description of the SexTNFS polynomials.
///
/// With X = x^kappa + shift(t): f1 = p_num(X) and f2 = X - u + f2_offset.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recipe {
    pub eta: u32,
    pub kappa: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<UniPoly>,
    #[serde(default, skip_serializing_if = "UniPoly::is_zero")]
    pub shift: UniPoly,
    #[serde(default, with = "serde_integer", skip_serializing_if = "Zero::is_zero")]
    pub f2_offset: BigInt,
    pub w: u32,
    pub aut: u32,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub extrapolated: bool,
}

/// What to do when the recipe's h is reducible modulo p.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HPolicy {
    /// Keep the published h and flag it.
    #[default]
    Recipe,
    /// Replace it by the first irreducible sparse h (w = 𝒜 = 1).
    Strict,
}

impl std::str::FromStr for HPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "recipe" => Ok(HPolicy::Recipe),
            "strict" => Ok(HPolicy::Strict),
            _ => Err(Error::Config(format!("unknown h policy `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HSource {
    Recipe,
    Selected,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TnfsSetup {
    pub eta: u32,
    pub kappa: u32,
    pub h: UniPoly,
    pub f1: BiPoly,
    pub f2: BiPoly,
    pub w: u32,
    pub aut: u32,
    /// f1(t, u) is this multiple of p.
    #[serde(with = "serde_integer")]
    pub multiplier: BigInt,
    pub h_source: HSource,
    pub h_irreducible: bool,
    #[serde(with = "serde_integer")]
    pub f2_offset: BigInt,
    pub extrapolated: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl TnfsSetup {
    /// Structured text export (TOML) for audit.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("setup serializes")
    }

    /// Polynomials as human-readable strings.
    pub fn describe(&self) -> String {
        format!(
            "eta={} kappa={} h={} f1={} f2={} w={} aut={}",
            self.eta,
            self.kappa,
            self.h.display_in("t"),
            self.f1.display(),
            self.f2.display(),
            self.w,
            self.aut
        )
    }
}

fn x_variable(kappa: u32, shift: &UniPoly) -> BiPoly {
    let mut terms: Vec<((u32, u32), BigInt)> = vec![((kappa, 0), BigInt::one())];
    terms.extend(
        shift
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| ((0, i as u32), c.clone())),
    );
    BiPoly::from_terms(terms)
}

fn check_h_shape(h: &UniPoly, eta: u32) -> Result<()> {
    if h.degree() != Some(eta as usize) || !h.is_monic() {
        return Err(Error::SetupValidation(format!(
            "h = {} is not monic of degree {eta}",
            h.display_in("t")
        )));
    }
    if h.coeffs().iter().any(|c| c.abs() > BigInt::one()) {
        return Err(Error::SetupValidation(format!(
            "h = {} has coefficients outside {{-1, 0, 1}}",
            h.display_in("t")
        )));
    }
    Ok(())
}

/// True when f1 and f2 share a root over F_p[t]/(h): Res_x(f1, f2) reduced
/// modulo h has every coefficient divisible by p.
pub fn shares_root(f1: &BiPoly, f2: &BiPoly, h: &UniPoly, p: &BigInt) -> Result<bool> {
    let res = resultant_x(f1, f2)?;
    Ok(res
        .rem_monic(h)
        .coeffs()
        .iter()
        .all(|c| c.mod_floor(p).is_zero()))
}

/// Instantiates the family recipe at the instance's seed and validates it.
pub fn build_setup(
    family: &FamilySpec,
    instance: &CurveInstance,
    policy: HPolicy,
) -> Result<TnfsSetup> {
    let recipe = family.recipe.as_ref().ok_or_else(|| {
        Error::InvalidArgument(format!("family {} has no SexTNFS recipe", family.name))
    })?;
    if recipe.eta * recipe.kappa != instance.k {
        return Err(Error::InvalidArgument(format!(
            "recipe eta*kappa = {} does not match k = {}",
            recipe.eta * recipe.kappa,
            instance.k
        )));
    }
    let p = &instance.p;
    let mut notes = Vec::new();

    let (h, h_source, h_irreducible, w, aut) = match &recipe.h {
        Some(h) => {
            check_h_shape(h, recipe.eta)?;
            let irreducible = is_irreducible_mod_p(h, p)?;
            match (irreducible, policy) {
                (true, _) => (h.clone(), HSource::Recipe, true, recipe.w, recipe.aut),
                (false, HPolicy::Recipe) => {
                    notes.push(format!("h = {} is reducible mod p", h.display_in("t")));
                    (h.clone(), HSource::Recipe, false, recipe.w, recipe.aut)
                }
                (false, HPolicy::Strict) => {
                    let sel = select_h(recipe.eta, p, SELECT_H_BUDGET)?;
                    notes.push(format!(
                        "h = {} is reducible mod p; replaced by {}",
                        h.display_in("t"),
                        sel.display_in("t")
                    ));
                    (sel, HSource::Selected, true, 1, 1)
                }
            }
        }
        None => (
            select_h(recipe.eta, p, SELECT_H_BUDGET)?,
            HSource::Selected,
            true,
            recipe.w,
            recipe.aut,
        ),
    };

    let xv = x_variable(recipe.kappa, &recipe.shift);
    let f1 = xv.substitute_into(&family.p_num);
    let f2_for =
        |offset: &BigInt| &xv + &BiPoly::from_t_poly(&UniPoly::constant(offset - &instance.u));

    let mut f2_offset = recipe.f2_offset.clone();
    let mut f2 = f2_for(&f2_offset);
    if !shares_root(&f1, &f2, &h, p)? {
        if f2_offset.is_zero() {
            return Err(Error::RecipeIncompatibility(format!(
                "{}: f1 and f2 share no root mod p",
                family.name
            )));
        }
        let plain = f2_for(&BigInt::zero());
        if !shares_root(&f1, &plain, &h, p)? {
            return Err(Error::RecipeIncompatibility(format!(
                "{}: neither f2 offset {} nor 0 shares a root with f1 mod p",
                family.name, f2_offset
            )));
        }
        notes.push(format!(
            "f2 with offset {f2_offset} shares no root with f1 mod p; using offset 0"
        ));
        f2_offset = BigInt::zero();
        f2 = plain;
    }
    if recipe.extrapolated {
        notes.push("extrapolated recipe".into());
    }

    Ok(TnfsSetup {
        eta: recipe.eta,
        kappa: recipe.kappa,
        h,
        f1,
        f2,
        w,
        aut,
        multiplier: family.p_den.clone(),
        h_source,
        h_irreducible,
        f2_offset,
        extrapolated: recipe.extrapolated,
        notes,
    })
}

/// Sparse monic h of degree eta with coefficients in {-1, 0, 1}, irreducible
/// mod p. Candidates are ordered by number of nonzero terms, then by the
/// exponents of the middle terms, then by signs.
pub fn select_h(eta: u32, p: &BigInt, budget: u64) -> Result<UniPoly> {
    if eta < 2 {
        return Err(Error::InvalidArgument(format!(
            "eta must be >= 2, got {eta}"
        )));
    }
    let mut tried = 0u64;
    for middle in 0..eta as usize {
        for exps in combinations(1, eta as usize - 1, middle) {
            for signs in 0u32..(1 << (middle + 1)) {
                if tried >= budget {
                    return Err(Error::NotFound {
                        what: format!("irreducible h of degree {eta}"),
                        budget,
                    });
                }
                tried += 1;
                let mut c = vec![0i64; eta as usize + 1];
                c[eta as usize] = 1;
                c[0] = if signs & 1 == 0 { 1 } else { -1 };
                for (i, &e) in exps.iter().enumerate() {
                    c[e] = if signs >> (i + 1) & 1 == 0 { 1 } else { -1 };
                }
                let h = UniPoly::from_i64s(&c);
                if is_irreducible_mod_p(&h, p)? {
                    return Ok(h);
                }
            }
        }
    }
    Err(Error::NotFound {
        what: format!("irreducible h of degree {eta}"),
        budget: tried,
    })
}

/// k-subsets of lo..=hi in lexicographic order.
fn combinations(lo: usize, hi: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, hi: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for e in start..=hi {
            if hi + 1 - e < k - cur.len() {
                break;
            }
            cur.push(e);
            rec(e + 1, hi, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        out.push(Vec::new());
    } else if hi >= lo {
        rec(lo, hi, k, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Registry;

    fn setup_for(curve: &str) -> TnfsSetup {
        let reg = Registry::builtin();
        let inst = reg.instance(curve).unwrap();
        let fam = reg.family(&inst.family).unwrap();
        build_setup(fam, &inst, HPolicy::Recipe).unwrap()
    }

    #[test]
    fn bn256_recipe() {
        let s = setup_for("BN256");
        let reg = Registry::builtin();
        let u = reg.curve("BN256").unwrap().u.clone();
        assert_eq!((s.eta, s.kappa, s.w, s.aut), (6, 2, 1, 2));
        assert_eq!(s.h, UniPoly::from_i64s(&[-1, -1, 0, -1, 0, 0, 1]));
        // f2 = x^2 + t - u
        let f2 = BiPoly::from_terms([
            ((2, 0), BigInt::one()),
            ((0, 1), BigInt::one()),
            ((0, 0), -u.clone()),
        ]);
        assert_eq!(s.f2, f2);
        // f1 = P(x^2 + t)
        let xv = BiPoly::from_terms([((2, 0), BigInt::one()), ((0, 1), BigInt::one())]);
        let p_bn = UniPoly::from_i64s(&[1, 6, 24, 36, 36]);
        assert_eq!(s.f1, xv.substitute_into(&p_bn));
        assert_eq!(s.f1.deg_x(), Some(8));
        assert_eq!(s.f1.deg_t(), Some(4));
        assert!(!s.h_irreducible);
    }

    #[test]
    fn bls24_recipe() {
        let s = setup_for("BLS24-479");
        assert_eq!((s.eta, s.kappa, s.w, s.aut), (24, 1, 1, 1));
        let mut h = vec![0i64; 25];
        h[24] = 1;
        h[4] = 1;
        h[3] = -1;
        h[1] = -1;
        h[0] = -1;
        assert_eq!(s.h, UniPoly::from_i64s(&h));
        assert_eq!(s.f1.deg_t(), Some(0));
        assert_eq!(s.multiplier, BigInt::from(3));
    }

    #[test]
    fn kss18_recipe_and_f2_variant() {
        let s = setup_for("KSS18-508");
        assert_eq!((s.eta, s.kappa, s.w, s.aut), (18, 1, 1, 1));
        assert_eq!(
            s.f1,
            BiPoly::from_x_poly(&UniPoly::from_i64s(&[
                2401, 1763, 343, 259, 188, 37, 7, 5, 1
            ]))
        );
        assert_eq!(s.multiplier, BigInt::from(21));
        assert_eq!(s.f2_offset, BigInt::zero());
        assert!(s.notes.iter().any(|n| n.contains("offset -2")));
    }

    #[test]
    fn kss18_676_h_irreducible() {
        assert!(setup_for("KSS18-676").h_irreducible);
        assert!(setup_for("BN446").h_irreducible);
    }

    #[test]
    fn strict_policy_replaces_reducible_h() {
        let reg = Registry::builtin();
        let inst = reg.instance("BN256").unwrap();
        let s = build_setup(reg.family("BN").unwrap(), &inst, HPolicy::Strict).unwrap();
        assert_eq!(s.h_source, HSource::Selected);
        assert!(s.h_irreducible);
        assert!(is_irreducible_mod_p(&s.h, &inst.p).unwrap());
        assert_eq!((s.w, s.aut), (1, 1));
    }

    #[test]
    fn select_h_small() {
        assert_eq!(
            select_h(2, &BigInt::from(7), 100).unwrap(),
            UniPoly::from_i64s(&[1, 0, 1])
        );
        // x^2 + 1 splits mod 5, so the search moves on.
        let h = select_h(2, &BigInt::from(5), 100).unwrap();
        assert_ne!(h, UniPoly::from_i64s(&[1, 0, 1]));
        assert!(is_irreducible_mod_p(&h, &BigInt::from(5)).unwrap());
        assert!(matches!(
            select_h(2, &BigInt::from(5), 1),
            Err(Error::NotFound { .. })
        ));
    }

    #[test]
    fn combination_order() {
        assert_eq!(
            combinations(1, 3, 2),
            vec![vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(1, 0, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn export_roundtrip() {
        let s = setup_for("BLS12-381");
        let back: TnfsSetup = toml::from_str(&s.to_toml_string()).unwrap();
        assert_eq!(back, s);
    }
}
