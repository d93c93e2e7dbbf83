//! Operation-count model of an optimal ate pairing: Miller loop plus final
//! exponentiation, counted in base-field multiplications and scaled by the
//! cost of one multiplication at the given size of p.
//!
//! The default weights follow Karatsuba-style towers: F_{p^k} multiplication
//! costs m_k base multiplications (m12 = 54, m16 = 81, m18 = 108,
//! m24 = 162), squarings and sparse line products are fixed fractions of
//! m_k, and line evaluations happen on the twist, over F_{p^(k/d)}.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::families::FamilySpec;
use crate::security::{min_p_for_level, LevelResult, SecurityConfig};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopParameter {
    /// |6u + 2| (BN optimal ate).
    SixUPlusTwo,
    /// |u|.
    U,
}

/// Weights for one family, in base-field multiplications unless noted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyPairing {
    pub loop_parameter: LoopParameter,
    /// One F_{p^k} multiplication.
    pub ext_mul: f64,
    /// One multiplication in the twist field F_{p^(k/d)}.
    pub twist_mul: f64,
    /// Twist multiplications per doubling step and line.
    pub dbl_line: f64,
    /// Twist multiplications per addition step and line.
    pub add_line: f64,
    /// Addition steps in the Miller loop.
    pub loop_additions: f64,
    /// Extra line evaluations and Frobenius maps after the loop, in F_{p^k}
    /// multiplications.
    pub loop_tail: f64,
    /// One cyclotomic squaring.
    pub cyclo_sqr: f64,
    /// Exponentiations by u in the hard part of the final exponentiation.
    pub hard_u_exps: f64,
    /// Remaining F_{p^k} multiplications of the final exponentiation
    /// (easy part, inversion, and hard-part glue).
    pub final_exp_muls: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PairingModel {
    /// F_{p^k} squaring cost relative to multiplication.
    pub sqr_ratio: f64,
    /// Sparse (line) multiplication cost relative to multiplication.
    pub sparse_ratio: f64,
    pub word_bits: u64,
    /// Base multiplication costs ceil(p_bits / word_bits)^exponent words.
    pub word_exponent: f64,
    pub families: BTreeMap<String, FamilyPairing>,
}

impl Default for PairingModel {
    fn default() -> Self {
        let fam = |loop_parameter,
                   ext_mul,
                   twist_mul,
                   loop_tail,
                   cyclo_sqr,
                   hard_u_exps,
                   final_exp_muls| FamilyPairing {
            loop_parameter,
            ext_mul,
            twist_mul,
            dbl_line: 10.0,
            add_line: 14.0,
            loop_additions: 4.0,
            loop_tail,
            cyclo_sqr,
            hard_u_exps,
            final_exp_muls,
        };
        use LoopParameter::*;
        let families = [
            ("BN", fam(SixUPlusTwo, 54.0, 3.0, 4.0, 18.0, 3.0, 30.0)),
            ("BLS12", fam(U, 54.0, 3.0, 0.0, 18.0, 5.0, 30.0)),
            ("KSS16", fam(U, 81.0, 9.0, 4.0, 36.0, 9.0, 60.0)),
            ("KSS18", fam(U, 108.0, 6.0, 4.0, 36.0, 7.0, 60.0)),
            ("BLS24", fam(U, 162.0, 9.0, 0.0, 54.0, 9.0, 40.0)),
        ]
        .into_iter()
        .map(|(n, f)| (n.to_string(), f))
        .collect();
        PairingModel {
            sqr_ratio: 2.0 / 3.0,
            sparse_ratio: 13.0 / 18.0,
            word_bits: 64,
            word_exponent: 2.0,
            families,
        }
    }
}

impl PairingModel {
    fn family(&self, name: &str) -> Result<&FamilyPairing> {
        self.families
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, f)| f)
            .ok_or_else(|| Error::InvalidArgument(format!("no pairing weights for family `{name}`")))
    }

    /// Every weight multiplied by `factor` (rankings must not change).
    pub fn scaled(&self, factor: f64) -> Self {
        let mut m = self.clone();
        for f in m.families.values_mut() {
            f.ext_mul *= factor;
            f.twist_mul *= factor;
            f.cyclo_sqr *= factor;
        }
        m
    }
}

/// Nominal bit length of u for a given size of p.
pub fn nominal_u_bits(family: &FamilySpec, p_bits: u64) -> f64 {
    let d = family.p_degree().max(1) as f64;
    let lc = family
        .p_num
        .leading()
        .and_then(num_traits::ToPrimitive::to_f64)
        .unwrap_or(1.0)
        .abs();
    let den = num_traits::ToPrimitive::to_f64(&family.p_den).unwrap_or(1.0);
    ((p_bits as f64 - (lc / den).log2()) / d).max(1.0)
}

/// log2 of the word-multiplication count of one pairing.
pub fn pairing_cost(family: &FamilySpec, p_bits: u64, model: &PairingModel) -> Result<f64> {
    if p_bits < 160 {
        return Err(Error::InvalidArgument(format!(
            "p_bits must be >= 160, got {p_bits}"
        )));
    }
    let w = model.family(&family.name)?;
    let u_bits = nominal_u_bits(family, p_bits);
    let loop_bits = match w.loop_parameter {
        LoopParameter::SixUPlusTwo => u_bits + 6f64.log2(),
        LoopParameter::U => u_bits,
    };
    let mk = w.ext_mul;
    let doubling = (model.sqr_ratio + model.sparse_ratio) * mk + w.dbl_line * w.twist_mul;
    let addition = model.sparse_ratio * mk + w.add_line * w.twist_mul;
    let miller = loop_bits * doubling + w.loop_additions * addition + w.loop_tail * mk;
    let final_exp = w.hard_u_exps * u_bits * w.cyclo_sqr + w.final_exp_muls * mk;
    let words = p_bits.div_ceil(model.word_bits) as f64;
    Ok((miller + final_exp).log2() + model.word_exponent * words.log2())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedFamily {
    pub family: String,
    pub p_bits: Option<u64>,
    pub log2_cost: Option<f64>,
    pub level: LevelResult,
}

/// Families ranked by pairing cost at their smallest p reaching the level;
/// families that cannot reach it come last, marked absent.
pub fn compare_at_level(
    families: &[&FamilySpec],
    level_bits: u64,
    cfg: &SecurityConfig,
    model: &PairingModel,
    master_seed: u64,
) -> Result<Vec<RankedFamily>> {
    let levels = families
        .iter()
        .map(|f| min_p_for_level(f, level_bits, cfg, master_seed))
        .collect::<Result<Vec<_>>>()?;
    rank(families, levels, model)
}

/// Ranks precomputed level results.
pub fn rank(
    families: &[&FamilySpec],
    levels: Vec<LevelResult>,
    model: &PairingModel,
) -> Result<Vec<RankedFamily>> {
    let mut out = families
        .iter()
        .zip(levels)
        .map(|(f, level)| {
            let cost = level
                .p_bits
                .map(|p| pairing_cost(f, p.max(160), model))
                .transpose()?;
            Ok(RankedFamily {
                family: f.name.clone(),
                p_bits: level.p_bits,
                log2_cost: cost,
                level,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| match (a.log2_cost, b.log2_cost) {
        (Some(x), Some(y)) => x.total_cmp(&y).then_with(|| a.family.cmp(&b.family)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.family.cmp(&b.family),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::Registry;

    #[test]
    fn monotone_in_p() {
        let reg = Registry::builtin();
        let model = PairingModel::default();
        for f in reg.families() {
            let a = pairing_cost(f, 300, &model).unwrap();
            let b = pairing_cost(f, 600, &model).unwrap();
            assert!(b > a, "{}", f.name);
        }
        assert!(pairing_cost(reg.family("BN").unwrap(), 100, &model).is_err());
    }

    #[test]
    fn unknown_family_errors() {
        let reg = Registry::builtin();
        let mut model = PairingModel::default();
        model.families.remove("KSS16");
        assert!(pairing_cost(reg.family("KSS16").unwrap(), 400, &model).is_err());
    }

    #[test]
    fn uniform_scaling_shifts_costs_equally() {
        let reg = Registry::builtin();
        let model = PairingModel::default();
        let scaled = model.scaled(3.0);
        for f in reg.families() {
            let d = pairing_cost(f, 512, &scaled).unwrap() - pairing_cost(f, 512, &model).unwrap();
            assert!((d - 3f64.log2()).abs() < 1e-9, "{}: {d}", f.name);
        }
    }

    #[test]
    fn bn_loop_uses_six_u_plus_two() {
        let reg = Registry::builtin();
        let bn = reg.family("BN").unwrap();
        assert!((nominal_u_bits(bn, 256) - (256.0 - 36f64.log2()) / 4.0).abs() < 1e-12);
    }
}
