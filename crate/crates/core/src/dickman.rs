//! Dickman's ρ function, evaluated in log2 space.
//!
//! On each unit interval [k, k+1] ρ is a power series in s = u - (k + 1/2).
//! Substituting into u ρ'(u) = -ρ(u - 1) gives the recurrence
//! c_{n+1} = -(d_n + n c_n) / (m (n + 1)) with m = k + 1/2 and d the
//! coefficients of the previous piece. The constant c_0 is fixed by the
//! integral form u ρ(u) = ∫_{u-1}^{u} ρ(t) dt at the centre, which (unlike
//! continuity matching) involves no cancellation.
//! Each piece stores its coefficients scaled by 2^-scale so that ρ never
//! underflows.

use std::sync::OnceLock;

use crate::{Error, Result};

const TERMS: usize = 48;
const DEFAULT_U_MAX: usize = 2048;

#[derive(Clone, Debug)]
struct Piece {
    scale: f64,
    coeffs: [f64; TERMS],
}

impl Piece {
    fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }

    fn eval_deriv(&self, s: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (n, &c)| acc * s + n as f64 * c)
    }
}

/// Piecewise power-series table of ρ on [0, u_max].
#[derive(Clone, Debug)]
pub struct RhoTable {
    pieces: Vec<Piece>,
}

impl RhoTable {
    pub fn new(u_max: usize) -> Self {
        let u_max = u_max.max(50);
        let mut pieces = Vec::with_capacity(u_max);
        let mut first = [0.0; TERMS];
        first[0] = 1.0;
        pieces.push(Piece {
            scale: 0.0,
            coeffs: first,
        });
        for k in 1..u_max {
            let prev = &pieces[k - 1];
            let m = k as f64 + 0.5;
            let mut c = [0.0; TERMS];
            for n in 0..TERMS - 1 {
                c[n + 1] = -(prev.coeffs[n] + n as f64 * c[n]) / (m * (n + 1) as f64);
            }
            // Fix c_0 from m ρ(m) = ∫_{m-1}^{m} ρ, a sum of positive terms:
            // the left half comes from the previous piece, the right half
            // from this one.
            let from_prev: f64 = prev
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, &d)| d * 0.5f64.powi(n as i32 + 1) / (n + 1) as f64)
                .sum();
            let from_self: f64 = c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, &cn)| -cn * (-0.5f64).powi(n as i32 + 1) / (n + 1) as f64)
                .sum();
            c[0] = (from_prev + from_self) / k as f64;
            let norm = c[0].abs().log2().floor();
            let factor = (-norm).exp2();
            c.iter_mut().for_each(|v| *v *= factor);
            pieces.push(Piece {
                scale: prev.scale + norm,
                coeffs: c,
            });
        }
        RhoTable { pieces }
    }

    pub fn global() -> &'static RhoTable {
        static TABLE: OnceLock<RhoTable> = OnceLock::new();
        TABLE.get_or_init(|| RhoTable::new(DEFAULT_U_MAX))
    }

    pub fn u_max(&self) -> f64 {
        self.pieces.len() as f64
    }

    fn locate(&self, u: f64) -> (&Piece, f64) {
        let k = (u.floor() as usize).min(self.pieces.len() - 1);
        (&self.pieces[k], u - k as f64 - 0.5)
    }

    /// log2 ρ(u) for u ≥ 0; beyond the table an asymptotic expansion is
    /// joined continuously at u_max.
    pub fn log2_rho(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "Dickman rho needs u >= 0, got {u}"
            )));
        }
        Ok(self.log2_rho_unchecked(u))
    }

    pub(crate) fn log2_rho_unchecked(&self, u: f64) -> f64 {
        if u <= 1.0 {
            return 0.0;
        }
        let top = self.u_max();
        if u >= top {
            return self.log2_rho_unchecked(top - 1e-9) + asymptotic_log2(u) - asymptotic_log2(top);
        }
        let (piece, s) = self.locate(u);
        piece.eval(s).log2() + piece.scale
    }

    /// ρ(u) itself; underflows to 0 for large u.
    pub fn rho(&self, u: f64) -> f64 {
        if u <= 1.0 {
            return if u >= 0.0 { 1.0 } else { f64::NAN };
        }
        self.log2_rho_unchecked(u).exp2()
    }

    /// ρ'(u) from the piecewise series (0 on [0, 1)).
    pub fn rho_prime(&self, u: f64) -> f64 {
        if u < 1.0 {
            return 0.0;
        }
        if u >= self.u_max() {
            return 0.0;
        }
        let (piece, s) = self.locate(u);
        piece.eval_deriv(s) * piece.scale.exp2()
    }
}

/// Leading terms of ln ρ(u) ~ -u (ln u + ln ln u - 1 + (ln ln u - 1)/ln u), in log2.
fn asymptotic_log2(u: f64) -> f64 {
    let l = u.ln();
    let ll = l.ln();
    -u * (l + ll - 1.0 + (ll - 1.0) / l) / std::f64::consts::LN_2
}

/// log2 ρ(u) using the shared table.
pub fn log2_rho(u: f64) -> Result<f64> {
    RhoTable::global().log2_rho(u)
}
