//! Monte-Carlo estimates of the norms |Res_t(Res_x(a(t) - x b(t), f_i), h)|.
//!
//! For φ = a - x b and f = Σ f_j(t) x^j of x-degree d, Res_x(φ, f) equals
//! ±g with g = Σ f_j a^j b^(d-j), and the norm is |Res(h, g)|. Two engines
//! evaluate it:
//!
//! * `exact` reduces g modulo h and each of several 62-bit primes, takes the
//!   resultant with h by Euclid's algorithm, and lifts with the CRT. The
//!   number of primes is chosen from the floating-point estimate plus a
//!   margin and confirmed on one extra prime.
//! * `float` evaluates |g(θ)| at the complex roots θ of h and sums the
//!   logarithms; it agrees with the exact engine to about 1e-9 bits.
//!
//! Sample i draws its coefficients from a ChaCha stream keyed by (seed, i),
//! so results do not depend on evaluation order or thread count.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer as _;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::intpoly::{log2_abs, UniPoly};
use crate::modp::{crt_primes, crt_symmetric, Mont, BITS_PER_PRIME};
use crate::setup::TnfsSetup;
use crate::{Error, Result};

/// Sample count used for published estimates.
pub const DEFAULT_SAMPLES: u64 = 25_600;
/// Sample count of the fast profile.
pub const FAST_SAMPLES: u64 = 2_560;

const CRT_MARGIN_BITS: f64 = 64.0;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormEngine {
    #[default]
    Exact,
    Float,
}

impl FromStr for NormEngine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(NormEngine::Exact),
            "float" => Ok(NormEngine::Float),
            _ => Err(Error::Config(format!("unknown norm engine `{s}`"))),
        }
    }
}

impl fmt::Display for NormEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormEngine::Exact => "exact",
            NormEngine::Float => "float",
        })
    }
}

/// How per-sample norms are averaged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormStatistic {
    /// Mean of log2 |N| (the geometric mean of the norms).
    #[default]
    MeanLog,
    /// log2 of the arithmetic mean of |N|.
    ArithmeticMean,
}

impl FromStr for NormStatistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "mean-log" | "geometric" => Ok(NormStatistic::MeanLog),
            "arithmetic-mean" | "arithmetic" => Ok(NormStatistic::ArithmeticMean),
            _ => Err(Error::Config(format!("unknown norm statistic `{s}`"))),
        }
    }
}

impl fmt::Display for NormStatistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormStatistic::MeanLog => "mean-log",
            NormStatistic::ArithmeticMean => "arithmetic-mean",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormOptions {
    pub engine: NormEngine,
    pub statistic: NormStatistic,
}

impl Default for NormOptions {
    fn default() -> Self {
        NormOptions {
            engine: NormEngine::Exact,
            statistic: NormStatistic::MeanLog,
        }
    }
}

/// Averaged norm sizes at one coefficient bound A.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    #[serde(rename = "A")]
    pub a: u64,
    /// Selected statistic for f1 and f2.
    pub log2_n1: f64,
    pub log2_n2: f64,
    pub statistic: NormStatistic,
    pub engine: NormEngine,
    pub mean_log2_n1: f64,
    pub mean_log2_n2: f64,
    pub log2_mean_n1: f64,
    pub log2_mean_n2: f64,
    /// Standard deviation of the per-sample log2 norms.
    pub sd_log2_n1: f64,
    pub sd_log2_n2: f64,
    pub sample_count: u64,
    /// Samples dropped because a norm vanished.
    pub zero_norms: u64,
    pub rng_seed: u64,
}

struct Prepared {
    d: usize,
    /// f_j(t) mod h for j = 0..=d.
    fj: Vec<UniPoly>,
    /// f_j(θ) per root.
    at_roots: Vec<Vec<Complex64>>,
}

struct PrimeCtx {
    m: Mont,
    h_low: Vec<(usize, u64)>,
    h: Vec<u64>,
    f: [Vec<Vec<u64>>; 2],
}

/// Precomputed data for sampling norms of one setup.
pub struct NormSampler {
    eta: usize,
    polys: [Prepared; 2],
    roots: Vec<(Complex64, f64)>,
    primes: Vec<PrimeCtx>,
}

fn to_f64_big(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn eval_complex(p: &UniPoly, z: Complex64) -> Complex64 {
    p.coeffs()
        .iter()
        .rev()
        .fold(Complex64::zero(), |acc, c| acc * z + to_f64_big(c))
}

/// Roots of a monic polynomial by Durand-Kerner with Newton polishing.
fn complex_roots(h: &UniPoly) -> Vec<Complex64> {
    let n = h.degree().unwrap_or(0);
    let bound = 1.0
        + h.coeffs()[..n]
            .iter()
            .map(|c| to_f64_big(c).abs())
            .fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| seed.powu(k as u32) * (bound / 2.0))
        .collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let num = eval_complex(h, z[i]);
            let den = (0..n)
                .filter(|&j| j != i)
                .fold(Complex64::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            let step = num / den;
            z[i] -= step;
            delta = delta.max(step.norm() / z[i].norm().max(1.0));
        }
        if delta < 1e-15 {
            break;
        }
    }
    let deriv = UniPoly::new(
        h.coeffs()
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect(),
    );
    for r in z.iter_mut() {
        for _ in 0..3 {
            let d = eval_complex(&deriv, *r);
            if d.norm() > 0.0 {
                *r -= eval_complex(h, *r) / d;
            }
        }
    }
    z
}

/// One representative per conjugate pair, weighted 2; real roots weight 1.
fn fold_conjugates(roots: Vec<Complex64>) -> Vec<(Complex64, f64)> {
    let tol = 1e-9;
    let upper: Vec<Complex64> = roots
        .iter()
        .filter(|r| r.im > tol * r.norm().max(1.0))
        .copied()
        .collect();
    let real: Vec<Complex64> = roots
        .iter()
        .filter(|r| r.im.abs() <= tol * r.norm().max(1.0))
        .map(|r| Complex64::new(r.re, 0.0))
        .collect();
    if 2 * upper.len() + real.len() != roots.len() {
        return roots.into_iter().map(|r| (r, 1.0)).collect();
    }
    let mut out: Vec<(Complex64, f64)> = upper.into_iter().map(|r| (r, 2.0)).collect();
    out.extend(real.into_iter().map(|r| (r, 1.0)));
    out
}


impl NormSampler {
    pub fn new(setup: &TnfsSetup) -> Result<Self> {
        if setup.f1.is_zero() || setup.f2.is_zero() {
            return Err(Error::InvalidArgument("setup has a zero polynomial".into()));
        }
        if !setup.h.is_monic() || setup.h.degree() != Some(setup.eta as usize) {
            return Err(Error::InvalidArgument("h must be monic of degree eta".into()));
        }
        let eta = setup.eta as usize;
        let roots = fold_conjugates(complex_roots(&setup.h));
        let prep = |f: &crate::BiPoly| -> Result<Prepared> {
            let fj: Vec<UniPoly> = f.x_coeffs().iter().map(|c| c.rem_monic(&setup.h)).collect();
            if fj.len() < 2 {
                return Err(Error::InvalidArgument(
                    "setup polynomial is constant in x".into(),
                ));
            }
            let at_roots = roots
                .iter()
                .map(|(z, _)| fj.iter().map(|c| eval_complex(c, *z)).collect())
                .collect();
            Ok(Prepared {
                d: fj.len() - 1,
                fj,
                at_roots,
            })
        };
        let polys = [prep(&setup.f1)?, prep(&setup.f2)?];
        let primes = crt_primes()
            .iter()
            .map(|&q| {
                let m = Mont::new(q);
                let qb = BigInt::from(q);
                let red = |c: &BigInt| m.to_mont(c.mod_floor(&qb).to_u64().expect("reduced"));
                let h: Vec<u64> = setup.h.coeffs().iter().map(red).collect();
                let h_low = h[..eta]
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(i, &v)| (i, v))
                    .collect();
                let f = [0, 1].map(|k| {
                    polys[k]
                        .fj
                        .iter()
                        .map(|c| c.coeffs().iter().map(red).collect())
                        .collect()
                });
                PrimeCtx { m, h_low, h, f }
            })
            .collect();
        Ok(NormSampler {
            eta,
            polys,
            roots,
            primes,
        })
    }

    pub fn eta(&self) -> usize {
        self.eta
    }

    /// Coefficients of sample `index`: a_0 in [0, A], everything else in
    /// [-A, A], redrawn from the same stream while a or b is zero.
    pub fn draw(&self, a_bound: u64, seed: u64, index: u64) -> (Vec<i64>, Vec<i64>) {
        draw_sample(self.eta, a_bound, seed, index)
    }

    /// log2 |N_i| of both polynomials by the floating-point engine.
    pub fn log2_norms_float(&self, a: &[i64], b: &[i64]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (ri, (z, w)) in self.roots.iter().enumerate() {
            let av = horner_i64(a, *z);
            let bv = horner_i64(b, *z);
            for (k, p) in self.polys.iter().enumerate() {
                let fz = &p.at_roots[ri];
                let mut acc = fz[p.d];
                let mut bp = bv;
                for j in (0..p.d).rev() {
                    acc = acc * av + fz[j] * bp;
                    bp *= bv;
                }
                out[k] += w * acc.norm().log2();
            }
        }
        out
    }

    fn residue(&self, ctx: &PrimeCtx, which: usize, a: &[i64], b: &[i64]) -> u64 {
        let m = &ctx.m;
        let p = &self.polys[which];
        let am: Vec<u64> = a.iter().map(|&v| m.from_i64(v)).collect();
        let bm: Vec<u64> = b.iter().map(|&v| m.from_i64(v)).collect();
        let one = {
            let mut v = vec![0u64; self.eta];
            v[0] = m.one();
            v
        };
        let mut apow = vec![one.clone()];
        let mut bpow = vec![one];
        for j in 1..=p.d {
            apow.push(self.mulmod_h(ctx, &apow[j - 1], &am));
            bpow.push(self.mulmod_h(ctx, &bpow[j - 1], &bm));
        }
        let mut wide = vec![0u64; 2 * self.eta];
        for j in 0..=p.d {
            let fj = &ctx.f[which][j];
            if fj.is_empty() {
                continue;
            }
            let term = self.mulmod_h(ctx, &apow[j], &bpow[p.d - j]);
            for (i, &c) in fj.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (k, &t) in term.iter().enumerate() {
                    wide[i + k] = m.add(wide[i + k], m.mul(c, t));
                }
            }
        }
        self.reduce_h(ctx, &mut wide);
        let mut h = ctx.h.clone();
        m.resultant(&mut h, &mut wide)
    }

    fn reduce_h(&self, ctx: &PrimeCtx, wide: &mut Vec<u64>) {
        let m = &ctx.m;
        for top in (self.eta..wide.len()).rev() {
            let c = wide[top];
            if c == 0 {
                continue;
            }
            wide[top] = 0;
            let base = top - self.eta;
            for &(i, hi) in &ctx.h_low {
                wide[base + i] = m.sub(wide[base + i], m.mul(c, hi));
            }
        }
        wide.truncate(self.eta);
    }

    fn mulmod_h(&self, ctx: &PrimeCtx, x: &[u64], y: &[u64]) -> Vec<u64> {
        let m = &ctx.m;
        let mut wide = vec![0u64; 2 * self.eta - 1];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                wide[i + j] = m.add(wide[i + j], m.mul(xi, yj));
            }
        }
        self.reduce_h(ctx, &mut wide);
        wide
    }

    /// Exact norms (up to sign) of both polynomials.
    pub fn exact_norms(&self, a: &[i64], b: &[i64]) -> Result<[BigInt; 2]> {
        let est = self.log2_norms_float(a, b);
        let mut out = [BigInt::zero(), BigInt::zero()];
        for which in 0..2 {
            let guess = if est[which].is_finite() {
                est[which].max(0.0)
            } else {
                0.0
            };
            let mut count = ((guess + CRT_MARGIN_BITS) / BITS_PER_PRIME).ceil() as usize + 1;
            loop {
                if count + 1 > self.primes.len() {
                    return Err(Error::InvalidArgument(format!(
                        "norm of about {guess:.0} bits exceeds the CRT capacity"
                    )));
                }
                let residues: Vec<u64> = self.primes[..=count]
                    .iter()
                    .map(|ctx| ctx.m.from_mont(self.residue(ctx, which, a, b)))
                    .collect();
                let qs: Vec<u64> = self.primes[..count].iter().map(|c| c.m.q).collect();
                let value = crt_symmetric(&residues[..count], &qs);
                let check = self.primes[count].m.q;
                let r = value.mod_floor(&BigInt::from(check));
                if r.to_u64() == Some(residues[count]) {
                    out[which] = value;
                    break;
                }
                count *= 2;
            }
        }
        Ok(out)
    }

    fn sample(&self, engine: NormEngine, a: &[i64], b: &[i64]) -> Result<[f64; 2]> {
        match engine {
            NormEngine::Float => Ok(self.log2_norms_float(a, b)),
            NormEngine::Exact => {
                let [n1, n2] = self.exact_norms(a, b)?;
                let lg = |v: &BigInt| {
                    if v.is_zero() {
                        f64::NEG_INFINITY
                    } else {
                        log2_abs(v)
                    }
                };
                Ok([lg(&n1), lg(&n2)])
            }
        }
    }

    /// Averages `samples` norms at coefficient bound `a_bound`.
    pub fn estimate(
        &self,
        a_bound: u64,
        samples: u64,
        seed: u64,
        opts: NormOptions,
    ) -> Result<NormEstimate> {
        if a_bound < 1 || samples < 1 {
            return Err(Error::InvalidArgument(format!(
                "need A >= 1 and samples >= 1, got A = {a_bound}, samples = {samples}"
            )));
        }
        if a_bound > 1 << 40 {
            return Err(Error::InvalidArgument(format!("A = {a_bound} is too large")));
        }
        let values: Vec<[f64; 2]> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let (a, b) = self.draw(a_bound, seed, i);
                self.sample(opts.engine, &a, &b)
            })
            .collect::<Result<_>>()?;
        let kept: Vec<[f64; 2]> = values
            .into_iter()
            .filter(|v| v[0].is_finite() && v[1].is_finite())
            .collect();
        let zero_norms = samples - kept.len() as u64;
        if kept.is_empty() {
            return Err(Error::InvalidArgument("every sampled norm vanished".into()));
        }
        let n = kept.len() as f64;
        let stats = |k: usize| {
            let mean = kept.iter().map(|v| v[k]).sum::<f64>() / n;
            let var = kept.iter().map(|v| (v[k] - mean).powi(2)).sum::<f64>() / n;
            let max = kept.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max);
            let lse = max + kept.iter().map(|v| (v[k] - max).exp2()).sum::<f64>().log2() - n.log2();
            (mean, var.sqrt(), lse)
        };
        let (m1, s1, l1) = stats(0);
        let (m2, s2, l2) = stats(1);
        let (log2_n1, log2_n2) = match opts.statistic {
            NormStatistic::MeanLog => (m1, m2),
            NormStatistic::ArithmeticMean => (l1, l2),
        };
        Ok(NormEstimate {
            a: a_bound,
            log2_n1,
            log2_n2,
            statistic: opts.statistic,
            engine: opts.engine,
            mean_log2_n1: m1,
            mean_log2_n2: m2,
            log2_mean_n1: l1,
            log2_mean_n2: l2,
            sd_log2_n1: s1,
            sd_log2_n2: s2,
            sample_count: kept.len() as u64,
            zero_norms,
            rng_seed: seed,
        })
    }

    /// Upper bounds on log2 |N_1|, log2 |N_2| over all sieving elements with
    /// coefficients bounded by A: |g(θ)| <= Σ_j |f_j(θ)| (A Σ_k |θ|^k)^d.
    pub fn log2_upper_bound(&self, a_bound: u64) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (ri, (z, w)) in self.roots.iter().enumerate() {
            let r = z.norm();
            let alpha = a_bound as f64 * (0..self.eta).map(|k| r.powi(k as i32)).sum::<f64>();
            for (k, p) in self.polys.iter().enumerate() {
                let s: f64 = p.at_roots[ri].iter().map(|c| c.norm()).sum();
                out[k] += w * (s.log2() + p.d as f64 * alpha.log2());
            }
        }
        out
    }
}

fn horner_i64(c: &[i64], z: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::zero(), |acc, &v| acc * z + v as f64)
}

fn draw_sample(eta: usize, a_bound: u64, seed: u64, index: u64) -> (Vec<i64>, Vec<i64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let bound = a_bound as i64;
    loop {
        let a: Vec<i64> = (0..eta)
            .map(|i| {
                if i == 0 {
                    rng.gen_range(0..=bound)
                } else {
                    rng.gen_range(-bound..=bound)
                }
            })
            .collect();
        let b: Vec<i64> = (0..eta).map(|_| rng.gen_range(-bound..=bound)).collect();
        if a.iter().any(|&v| v != 0) && b.iter().any(|&v| v != 0) {
            return (a, b);
        }
    }
}

/// One-shot estimate; build a [`NormSampler`] to reuse work across A.
pub fn estimate_norms(
    setup: &TnfsSetup,
    a_bound: u64,
    samples: u64,
    seed: u64,
    opts: NormOptions,
) -> Result<NormEstimate> {
    NormSampler::new(setup)?.estimate(a_bound, samples, seed, opts)
}
