//! Curve-side and field-side security, family sweeps, and the smallest
//! characteristic reaching a security level.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cost::{optimize, CostSearchResult, GridConfig, ModelParams};
use crate::families::{find_instance, CurveInstance, FamilySpec};
use crate::intpoly::{log2_abs, serde_integer};
use crate::norms::{NormEngine, NormSampler};
use crate::setup::{build_setup, HPolicy, HSource};
use crate::{Error, Result};

/// Expected Pollard-rho group operations are sqrt(c · r) with c = π/4.
pub const POLLARD_CONSTANT: f64 = std::f64::consts::FRAC_PI_4;
/// Largest characteristic considered by [`min_p_for_level`].
pub const MAX_P_BITS: u64 = 4096;

/// log2 sqrt(c · r).
pub fn curve_side_bits(r: &BigInt, pollard_constant: f64) -> Result<f64> {
    if *r < BigInt::from(3) {
        return Err(Error::InvalidArgument(format!("group order must be >= 3, got {r}")));
    }
    Ok(0.5 * (log2_abs(r) + pollard_constant.log2()))
}

/// Everything a security estimate depends on besides the curve and seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SecurityConfig {
    pub params: ModelParams,
    /// Grid for single-curve estimates.
    pub grid: GridConfig,
    /// Grid for sweeps and level searches.
    pub sweep_grid: GridConfig,
    pub h_policy: HPolicy,
    pub pollard_constant: f64,
    pub max_seed_weight: usize,
    pub max_p_bits: u64,
    /// Resolution of the level search in bits of p.
    pub level_step_bits: u64,
}

impl Default for SecurityConfig {
    fn default() -> Self {
        SecurityConfig {
            params: ModelParams::default(),
            grid: GridConfig::default(),
            sweep_grid: GridConfig {
                norm_engine: NormEngine::Float,
                ..GridConfig::default()
            },
            h_policy: HPolicy::Recipe,
            pollard_constant: POLLARD_CONSTANT,
            max_seed_weight: 6,
            max_p_bits: MAX_P_BITS,
            level_step_bits: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SecurityProfile {
    pub curve: Option<String>,
    pub family: String,
    #[serde(with = "serde_integer")]
    pub u: BigInt,
    pub k: u32,
    pub p_bits: u64,
    pub r_bits: u64,
    pub curve_side_bits: f64,
    pub field_side_bits: f64,
    /// min(curve side, field side).
    pub combined_bits: f64,
    /// Combined security rounded up, as levels are quoted.
    pub security_bits: u64,
    pub field: CostSearchResult,
    pub eta: u32,
    pub kappa: u32,
    pub w: u32,
    pub aut: u32,
    pub h: String,
    pub h_source: HSource,
    pub h_irreducible: bool,
    pub extrapolated_recipe: bool,
    pub notes: Vec<String>,
}

/// Derives the seed of one sweep point from the master seed.
pub fn derive_seed(master: u64, p_bits: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = master ^ p_bits.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Field-side cost search plus curve-side bound for one instance.
pub fn profile(
    family: &FamilySpec,
    instance: &CurveInstance,
    grid: &GridConfig,
    cfg: &SecurityConfig,
    seed: u64,
) -> Result<SecurityProfile> {
    let setup = build_setup(family, instance, cfg.h_policy)?;
    let sampler = NormSampler::new(&setup)?;
    let field = optimize(&setup, &sampler, instance.r_bits, &cfg.params, grid, seed)?;
    let curve_side = curve_side_bits(&instance.r, cfg.pollard_constant)?;
    let field_side = field.security_bits_raw;
    let combined = curve_side.min(field_side);
    Ok(SecurityProfile {
        curve: None,
        family: family.name.clone(),
        u: instance.u.clone(),
        k: instance.k,
        p_bits: instance.p_bits,
        r_bits: instance.r_bits,
        curve_side_bits: curve_side,
        field_side_bits: field_side,
        combined_bits: combined,
        security_bits: rounded_bits(combined),
        field,
        eta: setup.eta,
        kappa: setup.kappa,
        w: setup.w,
        aut: setup.aut,
        h: setup.h.display_in("t"),
        h_source: setup.h_source,
        h_irreducible: setup.h_irreducible,
        extrapolated_recipe: setup.extrapolated,
        notes: setup.notes.clone(),
    })
}

/// Security bits rounded up, ignoring float noise below 1e-9.
pub fn rounded_bits(bits: f64) -> u64 {
    (bits - 1e-9).ceil().max(0.0) as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub target_p_bits: u64,
    pub p_bits: u64,
    pub r_bits: u64,
    #[serde(with = "serde_integer")]
    pub u: BigInt,
    pub curve_side_bits: f64,
    pub field_side_bits: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedPoint {
    pub target_p_bits: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub family: String,
    /// Sorted by p_bits.
    pub points: Vec<SweepPoint>,
    pub skipped: Vec<SkippedPoint>,
    pub crossover_p_bits: Option<u64>,
    pub crossover_security_bits: Option<f64>,
}

impl SweepResult {
    /// Plot data: one header line, then one row per point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p_bits,curve_bits,field_bits\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{:.2},{:.2}\n",
                p.p_bits, p.curve_side_bits, p.field_side_bits
            ));
        }
        out
    }
}

fn sweep_point(
    family: &FamilySpec,
    target: u64,
    cfg: &SecurityConfig,
    master: u64,
) -> Result<SweepPoint> {
    let inst = find_instance(family, target, cfg.max_seed_weight)?;
    let prof = profile(family, &inst, &cfg.sweep_grid, cfg, derive_seed(master, target))?;
    Ok(SweepPoint {
        target_p_bits: target,
        p_bits: inst.p_bits,
        r_bits: inst.r_bits,
        u: inst.u,
        curve_side_bits: prof.curve_side_bits,
        field_side_bits: prof.field_side_bits,
    })
}

/// First sign change of curve - field, linearly interpolated.
pub fn crossover(points: &[SweepPoint]) -> Option<(f64, f64)> {
    points.windows(2).find_map(|w| {
        let d0 = w[0].curve_side_bits - w[0].field_side_bits;
        let d1 = w[1].curve_side_bits - w[1].field_side_bits;
        if d0 == 0.0 {
            return Some((w[0].p_bits as f64, w[0].curve_side_bits));
        }
        if d0 * d1 > 0.0 {
            return None;
        }
        let t = d0 / (d0 - d1);
        let p = w[0].p_bits as f64 + t * (w[1].p_bits as f64 - w[0].p_bits as f64);
        let s = w[0].curve_side_bits + t * (w[1].curve_side_bits - w[0].curve_side_bits);
        Some((p, s))
    })
}

type Outcome = (u64, std::result::Result<SweepPoint, String>);

fn assemble(family: &FamilySpec, results: Vec<Outcome>) -> SweepResult {
    let mut points = Vec::new();
    let mut skipped = Vec::new();
    for (target, r) in results {
        match r {
            Ok(p) => points.push(p),
            Err(reason) => skipped.push(SkippedPoint {
                target_p_bits: target,
                reason,
            }),
        }
    }
    points.sort_by_key(|p| (p.p_bits, p.target_p_bits));
    points.dedup_by_key(|p| p.p_bits);
    let cross = crossover(&points);
    SweepResult {
        family: family.name.clone(),
        points,
        skipped,
        crossover_p_bits: cross.map(|c| c.0.round() as u64),
        crossover_security_bits: cross.map(|c| (c.1 * 100.0).round() / 100.0),
    }
}

/// Profiles the family at each target size; failed points are recorded
/// and skipped.
pub fn sweep_family(
    family: &FamilySpec,
    p_bits_list: &[u64],
    cfg: &SecurityConfig,
    master_seed: u64,
) -> Result<SweepResult> {
    if p_bits_list.is_empty() || p_bits_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "p_bits list must be nonempty and strictly ascending".into(),
        ));
    }
    let results = p_bits_list
        .iter()
        .map(|&t| (t, sweep_point(family, t, cfg, master_seed).map_err(|e| e.to_string())))
        .collect();
    Ok(assemble(family, results))
}

/// Sweeps [lo, hi] at `coarse` spacing, then at `fine` spacing inside the
/// bracket where the curve side drops below the field side.
pub fn crossover_sweep(
    family: &FamilySpec,
    lo: u64,
    hi: u64,
    coarse: u64,
    fine: u64,
    cfg: &SecurityConfig,
    master_seed: u64,
) -> Result<SweepResult> {
    if lo >= hi || coarse == 0 || fine == 0 {
        return Err(Error::InvalidArgument(format!(
            "bad sweep range {lo}..{hi} step {coarse}/{fine}"
        )));
    }
    let run = |t: u64| (t, sweep_point(family, t, cfg, master_seed).map_err(|e| e.to_string()));
    let targets: Vec<u64> = (lo..=hi).step_by(coarse as usize).collect();
    let mut results: Vec<Outcome> = targets.iter().map(|&t| run(t)).collect();
    let first = assemble(family, results.clone());
    if let Some(p) = first.crossover_p_bits {
        let bracket_lo = first
            .points
            .iter()
            .map(|q| q.target_p_bits)
            .filter(|&t| t <= p)
            .max()
            .unwrap_or(lo);
        let extra: Vec<u64> = (bracket_lo..bracket_lo + coarse)
            .step_by(fine as usize)
            .filter(|t| !targets.contains(t))
            .collect();
        results.extend(extra.into_iter().map(run));
    }
    Ok(assemble(family, results))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelResult {
    pub family: String,
    pub level_bits: u64,
    /// Smallest p size found to reach the level; absent if none up to the cap.
    pub p_bits: Option<u64>,
    pub r_bits: Option<u64>,
    #[serde(with = "serde_integer::option")]
    pub u: Option<BigInt>,
    pub security_bits: Option<f64>,
    pub reason: Option<String>,
    pub evaluations: usize,
}

#[derive(Clone)]
enum Probe {
    Meets(SweepPoint),
    Below,
    /// The level cannot be certified here or beyond (no feasible grid point
    /// or no seed).
    Stop(String),
}

struct LevelSearch<'a> {
    family: &'a FamilySpec,
    cfg: &'a SecurityConfig,
    master_seed: u64,
    level_bits: u64,
    cache: BTreeMap<u64, Probe>,
}

impl LevelSearch<'_> {
    fn probe(&mut self, target: u64) -> Probe {
        if let Some(p) = self.cache.get(&target) {
            return p.clone();
        }
        let p = match sweep_point(self.family, target, self.cfg, self.master_seed) {
            Ok(p) if rounded_bits(p.curve_side_bits.min(p.field_side_bits)) >= self.level_bits => {
                Probe::Meets(p)
            }
            Ok(_) => Probe::Below,
            Err(e) => Probe::Stop(e.to_string()),
        };
        self.cache.insert(target, p.clone());
        p
    }

    fn absent(&self, reason: String) -> LevelResult {
        LevelResult {
            family: self.family.name.clone(),
            level_bits: self.level_bits,
            p_bits: None,
            r_bits: None,
            u: None,
            security_bits: None,
            reason: Some(reason),
            evaluations: self.cache.len(),
        }
    }
}

/// Smallest characteristic size whose combined security, rounded up, reaches
/// `level_bits`: a coarse upward walk in 64-bit steps, then bisection down
/// to `level_step_bits`.
pub fn min_p_for_level(
    family: &FamilySpec,
    level_bits: u64,
    cfg: &SecurityConfig,
    master_seed: u64,
) -> Result<LevelResult> {
    if !(80..=320).contains(&level_bits) {
        return Err(Error::InvalidArgument(format!(
            "level must be in [80, 320], got {level_bits}"
        )));
    }
    const COARSE: u64 = 64;
    let step = cfg.level_step_bits.max(1);
    let mut search = LevelSearch {
        family,
        cfg,
        master_seed,
        level_bits,
        cache: BTreeMap::new(),
    };
    // The curve side alone needs r of about 2·level bits.
    let r_over_p = family.r_num.degree().unwrap_or(1) as f64 / family.p_degree().max(1) as f64;
    let even = |x: u64| x / step * step;
    let mut lo = even(((2 * level_bits) as f64 / r_over_p) as u64)
        .saturating_sub(16)
        .max(64);
    while lo > 64 && matches!(search.probe(lo), Probe::Meets(_)) {
        lo = lo.saturating_sub(COARSE).max(64);
    }
    let mut hi = lo;
    loop {
        match search.probe(hi) {
            Probe::Meets(_) => break,
            Probe::Below => {
                lo = hi;
                hi += COARSE;
                if hi > cfg.max_p_bits {
                    return Ok(search.absent(format!(
                        "not reached for p up to {} bits",
                        cfg.max_p_bits
                    )));
                }
            }
            Probe::Stop(reason) => return Ok(search.absent(reason)),
        }
    }
    while hi - lo > step {
        let mid = even(lo + (hi - lo) / 2).max(lo + step);
        match search.probe(mid) {
            Probe::Meets(_) => hi = mid,
            Probe::Below => lo = mid,
            Probe::Stop(reason) => return Ok(search.absent(reason)),
        }
    }
    let Probe::Meets(p) = search.probe(hi) else {
        unreachable!("the upper end of the bracket meets the level")
    };
    Ok(LevelResult {
        family: family.name.clone(),
        level_bits,
        p_bits: Some(p.p_bits),
        r_bits: Some(p.r_bits),
        u: Some(p.u),
        security_bits: Some(p.curve_side_bits.min(p.field_side_bits)),
        reason: None,
        evaluations: search.cache.len(),
    })
}
