//! Relation-count feasibility, attack cost, and the (A, B) search.
//!
//! Every quantity is carried as a base-2 logarithm. "ln" below is the
//! natural logarithm, which is what reproduces the published factor-base
//! sizes (2B / ln B at B = 2^57.6 is 2^53.28).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dickman::RhoTable;
use crate::norms::{NormEngine, NormEstimate, NormOptions, NormSampler, NormStatistic};
use crate::setup::TnfsSetup;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    /// Barbulescu-Duquesne constants.
    #[default]
    BD,
    /// Guillevic-Singh constants.
    GS,
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "BD" => Ok(Model::BD),
            "GS" => Ok(Model::GS),
            _ => Err(Error::InvalidArgument(format!(
                "unknown cost model `{s}` (expected BD or GS)"
            ))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::BD => "BD",
            Model::GS => "GS",
        })
    }
}

/// Shape of the linear-algebra term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinalgForm {
    /// c_lin · B² / (𝒜² (ln B)² c_filter²).
    #[default]
    Squared,
    /// c_lin · (2B)² / (𝒜² (ln B)² c_filter²), four times larger.
    TwiceSquared,
}

impl FromStr for LinalgForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squared" => Ok(LinalgForm::Squared),
            "twice-squared" => Ok(LinalgForm::TwiceSquared),
            _ => Err(Error::Config(format!("unknown linalg form `{s}`"))),
        }
    }
}

/// Model constants, each optionally overridden by a fixed log2 value.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    pub model: Model,
    pub linalg_form: LinalgForm,
    pub log2_c_sieve: Option<f64>,
    pub log2_c_filter: Option<f64>,
    pub log2_c_linalg: Option<f64>,
}

impl ModelParams {
    pub fn new(model: Model) -> Self {
        ModelParams {
            model,
            ..Default::default()
        }
    }

    pub fn log2_c_sieve(&self, log2_b: f64) -> f64 {
        self.log2_c_sieve.unwrap_or(match self.model {
            Model::BD => 0.0,
            Model::GS => ln_b(log2_b).ln().log2(),
        })
    }

    pub fn log2_c_filter(&self, log2_b: f64) -> f64 {
        self.log2_c_filter.unwrap_or(match self.model {
            Model::BD => log2_b.log2(),
            Model::GS => 20f64.log2(),
        })
    }

    pub fn log2_c_linalg(&self, r_bits: u64) -> f64 {
        self.log2_c_linalg.unwrap_or(match self.model {
            Model::BD => 7.0,
            Model::GS => (200.0 * r_bits.div_ceil(64) as f64).log2(),
        })
    }
}

fn ln_b(log2_b: f64) -> f64 {
    log2_b * std::f64::consts::LN_2
}

/// The setup quantities the cost formulas depend on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveShape {
    pub eta: u32,
    pub w: u32,
    pub aut: u32,
    /// Bit length of the discrete-log group order (used by GS).
    pub r_bits: u64,
}

impl SieveShape {
    pub fn new(setup: &TnfsSetup, r_bits: u64) -> Self {
        SieveShape {
            eta: setup.eta,
            w: setup.w,
            aut: setup.aut,
            r_bits,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostPoint {
    #[serde(rename = "A")]
    pub a: u64,
    pub log2_b: f64,
    pub log2_sieving_space: f64,
    pub log2_factor_base: f64,
    pub log2_relations: f64,
    pub log2_p1: f64,
    pub log2_p2: f64,
    pub log2_cost_sieve: f64,
    pub log2_cost_linalg: f64,
    pub log2_total: f64,
    pub feasible: bool,
}

fn log2_add(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2
}

/// Evaluates the cost formulas at coefficient bound `a` and smoothness bound
/// 2^log2_b for norms of log2 sizes `log2_n`.
pub fn evaluate_point(
    shape: &SieveShape,
    a: u64,
    log2_n: [f64; 2],
    log2_b: f64,
    params: &ModelParams,
) -> CostPoint {
    let rho = RhoTable::global();
    let lnb = ln_b(log2_b);
    let log2_sieving_space = 2.0 * shape.eta as f64 * (2.0 * a as f64 + 1.0).log2()
        - 1.0
        - (shape.w as f64).log2();
    let lp = log2_n.map(|n| rho.log2_rho_unchecked((n / log2_b).max(0.0)));
    let log2_relations = log2_sieving_space + lp[0] + lp[1];
    let log2_factor_base = 1.0 + log2_b - lnb.log2();
    let log2_aut = (shape.aut as f64).log2();
    let log2_cost_sieve =
        params.log2_c_sieve(log2_b) + 1.0 + log2_b - log2_aut - lnb.log2() - lp[0] - lp[1];
    let twice = match params.linalg_form {
        LinalgForm::Squared => 0.0,
        LinalgForm::TwiceSquared => 2.0,
    };
    let log2_cost_linalg = params.log2_c_linalg(shape.r_bits) + twice + 2.0 * log2_b
        - 2.0 * log2_aut
        - 2.0 * lnb.log2()
        - 2.0 * params.log2_c_filter(log2_b);
    CostPoint {
        a,
        log2_b,
        log2_sieving_space,
        log2_factor_base,
        log2_relations,
        log2_p1: lp[0],
        log2_p2: lp[1],
        log2_cost_sieve,
        log2_cost_linalg,
        log2_total: log2_add(log2_cost_sieve, log2_cost_linalg),
        feasible: log2_relations >= log2_factor_base,
    }
}

/// Search grid and sampling controls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub log2_a_min: f64,
    /// Defaults to 100 / η.
    pub log2_a_max: Option<f64>,
    pub log2_a_step: f64,
    pub log2_b_min: f64,
    pub log2_b_max: f64,
    pub log2_b_step: f64,
    /// Refine the best coarse A to an integer.
    pub refine_a: bool,
    /// Stop the A scan after this many feasible steps without improvement.
    pub patience: usize,
    pub samples: u64,
    /// Engine used while scanning A.
    pub scan_engine: NormEngine,
    /// Engine used for the reported norms at the chosen A.
    pub norm_engine: NormEngine,
    pub statistic: NormStatistic,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            log2_a_min: 1.0,
            log2_a_max: None,
            log2_a_step: 0.5,
            log2_b_min: 1.0,
            log2_b_max: 160.0,
            log2_b_step: 0.1,
            refine_a: true,
            patience: 4,
            samples: crate::norms::DEFAULT_SAMPLES,
            scan_engine: NormEngine::Float,
            norm_engine: NormEngine::Exact,
            statistic: NormStatistic::MeanLog,
        }
    }
}

impl GridConfig {
    fn validate(&self) -> Result<()> {
        let ok = self.log2_a_min >= 0.0
            && self.log2_a_step > 0.0
            && self.log2_b_step > 0.0
            && self.log2_b_min >= 1.0
            && self.log2_b_max <= 200.0
            && self.log2_b_min <= self.log2_b_max
            && self.samples >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid search grid {self:?}")))
        }
    }

    fn b_values(&self) -> Vec<f64> {
        let n = ((self.log2_b_max - self.log2_b_min) / self.log2_b_step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| {
                let v = self.log2_b_min + i as f64 * self.log2_b_step;
                (v * 1e6).round() / 1e6
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostSearchResult {
    pub best: CostPoint,
    pub norm: NormEstimate,
    pub security_bits_raw: f64,
    pub security_bits_rounded: u64,
    pub model: ModelParams,
    pub grid: GridConfig,
    /// Number of distinct A values whose norms were sampled.
    pub a_evaluated: usize,
}

/// Cheapest feasible point over the B grid for fixed norms; ties keep the
/// smaller B.
pub fn best_over_b(
    shape: &SieveShape,
    a: u64,
    log2_n: [f64; 2],
    params: &ModelParams,
    b_values: &[f64],
) -> Option<CostPoint> {
    b_values
        .iter()
        .map(|&b| evaluate_point(shape, a, log2_n, b, params))
        .filter(|p| p.feasible)
        .fold(None, |best: Option<CostPoint>, p| match best {
            Some(q) if q.log2_total <= p.log2_total => Some(q),
            _ => Some(p),
        })
}

fn better(p: &CostPoint, q: &CostPoint) -> bool {
    (p.log2_total, p.a, p.log2_b) < (q.log2_total, q.a, q.log2_b)
}

struct Search<'a> {
    shape: SieveShape,
    sampler: &'a NormSampler,
    params: &'a ModelParams,
    grid: &'a GridConfig,
    seed: u64,
    b_values: Vec<f64>,
    cache: BTreeMap<u64, Option<CostPoint>>,
}

impl Search<'_> {
    fn at(&mut self, a: u64) -> Result<Option<CostPoint>> {
        if let Some(p) = self.cache.get(&a) {
            return Ok(*p);
        }
        let opts = NormOptions {
            engine: self.grid.scan_engine,
            statistic: self.grid.statistic,
        };
        let n = self.sampler.estimate(a, self.grid.samples, self.seed, opts)?;
        let p = best_over_b(
            &self.shape,
            a,
            [n.log2_n1, n.log2_n2],
            self.params,
            &self.b_values,
        );
        self.cache.insert(a, p);
        Ok(p)
    }

    fn best_cached(&self) -> Option<CostPoint> {
        self.cache
            .values()
            .flatten()
            .fold(None, |best: Option<CostPoint>, p| match best {
                Some(q) if !better(p, &q) => Some(q),
                _ => Some(*p),
            })
    }
}

fn a_from_log2(l: f64) -> u64 {
    l.exp2().round().max(1.0) as u64
}

/// Minimises the attack cost over the (A, B) grid.
pub fn optimize(
    setup: &TnfsSetup,
    sampler: &NormSampler,
    r_bits: u64,
    params: &ModelParams,
    grid: &GridConfig,
    seed: u64,
) -> Result<CostSearchResult> {
    grid.validate()?;
    let shape = SieveShape::new(setup, r_bits);
    let mut search = Search {
        shape,
        sampler,
        params,
        grid,
        seed,
        b_values: grid.b_values(),
        cache: BTreeMap::new(),
    };
    let a_max = grid.log2_a_max.unwrap_or(100.0 / setup.eta as f64);
    // The scan runs up to the first grid point at or past the bound.
    let steps = ((a_max - grid.log2_a_min) / grid.log2_a_step - 1e-9).ceil().max(0.0) as usize;
    let log2_a_last = grid.log2_a_min + steps as f64 * grid.log2_a_step;
    let mut best: Option<CostPoint> = None;
    let mut stale = 0;
    for i in 0..=steps {
        let a = a_from_log2(grid.log2_a_min + i as f64 * grid.log2_a_step);
        let Some(p) = search.at(a)? else { continue };
        match best {
            Some(q) if !better(&p, &q) => {
                stale += 1;
                if stale >= grid.patience {
                    break;
                }
            }
            _ => {
                best = Some(p);
                stale = 0;
            }
        }
    }
    let Some(coarse) = best else {
        return Err(Error::Infeasible(format!(
            "eta = {}, A <= 2^{log2_a_last:.2}",
            setup.eta
        )));
    };

    if grid.refine_a {
        // Pattern search over integers within one coarse step either side.
        let span = coarse.a as f64 * (grid.log2_a_step.exp2() - 1.0);
        let a_cap = a_from_log2(log2_a_last);
        let mut centre = coarse.a;
        let mut step = (span / 2.0).max(1.0) as u64;
        loop {
            let mut moved = false;
            for cand in [centre.saturating_sub(step), centre + step] {
                if cand < 1 || cand > a_cap {
                    continue;
                }
                search.at(cand)?;
            }
            let now = search.best_cached().expect("coarse point is cached");
            if now.a != centre {
                centre = now.a;
                moved = true;
            }
            if !moved {
                if step == 1 {
                    break;
                }
                step /= 2;
            }
        }
    }

    let chosen = search.best_cached().expect("a feasible point exists");
    let opts = NormOptions {
        engine: grid.norm_engine,
        statistic: grid.statistic,
    };
    let norm = sampler.estimate(chosen.a, grid.samples, seed, opts)?;
    let best = if grid.norm_engine == grid.scan_engine {
        chosen
    } else {
        best_over_b(
            &shape,
            chosen.a,
            [norm.log2_n1, norm.log2_n2],
            params,
            &search.b_values,
        )
        .unwrap_or(chosen)
    };
    let raw = (best.log2_total * 100.0).round() / 100.0;
    Ok(CostSearchResult {
        best,
        norm,
        security_bits_raw: raw,
        security_bits_rounded: raw.ceil() as u64,
        model: *params,
        grid: grid.clone(),
        a_evaluated: search.cache.len(),
    })
}
