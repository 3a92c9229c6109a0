//! Pilot/data resource split: the SP power factor α* as the root of the
//! quartic `g(α)` with `dρ/dα = P²K g(α)/γ²`, and the RP pilot length by
//! exhaustive search.

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::compensated_sum;
use crate::config::{Scheme, SystemConfig};
use crate::error::{Error, Result};
use crate::milb::{milb_rp, milb_sp, rho_gamma_sp, MilbPoint};

/// Points used to look for extra sign changes of `g` on (0, 1).
pub const SCAN_POINTS: usize = 1000;

pub const DEFAULT_ALPHA_TOL: f64 = 1e-10;

/// `g(α) = c4 α⁴ + c3 α³ + c2 α² + c1 α + c0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuarticG {
    pub c4: f64,
    pub c3: f64,
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
    /// `(σ² + KP)²`
    d2: f64,
    /// `2K²LP³/(σ² + KP)`
    a: f64,
    sigma4: f64,
}

impl QuarticG {
    /// `g(α)` in the factored form `(1-α)²((σ²+KP)² - Aα²) - σ⁴α²`, which
    /// is the same polynomial but keeps `g(0)` and `g(1)` exact.
    pub fn eval(&self, alpha: f64) -> f64 {
        let om = 1.0 - alpha;
        om * om * (self.d2 - self.a * alpha * alpha) - self.sigma4 * alpha * alpha
    }

    /// Horner evaluation of the stored coefficients.
    pub fn eval_coefficients(&self, alpha: f64) -> f64 {
        (((self.c4 * alpha + self.c3) * alpha + self.c2) * alpha + self.c1) * alpha + self.c0
    }

    pub fn coefficients(&self) -> [f64; 5] {
        [self.c4, self.c3, self.c2, self.c1, self.c0]
    }

    pub fn scale(&self) -> f64 {
        self.c0.abs().max(self.c4.abs())
    }
}

pub fn quartic_g(power: f64, users: usize, coherence: usize, sigma2: f64) -> Result<QuarticG> {
    if !(power.is_finite() && power > 0.0) {
        return Err(Error::Parameter(format!(
            "power must be > 0 for a pilot/data trade-off (got {power})"
        )));
    }
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::Parameter(format!("noise variance {sigma2} must be > 0")));
    }
    let (k, l, p) = (users as f64, coherence as f64, power);
    let d = sigma2 + k * p;
    let a = 2.0 * k * k * l * p * p * p / d;
    let d2 = d * d;
    Ok(QuarticG {
        c4: -a,
        c3: 2.0 * a,
        c2: -compensated_sum(&[a, -k * k * p * p, -2.0 * k * p * sigma2]),
        c1: -2.0 * d2,
        c0: d2,
        d2,
        a,
        sigma4: sigma2 * sigma2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaOptimum {
    pub alpha: f64,
    pub rho: f64,
    pub gamma: f64,
    pub g_residual: f64,
    pub quartic: QuarticG,
    /// every root found on (0, 1); more than one means the choice was made by ρ
    pub roots: Vec<f64>,
}

fn bisect(g: &QuarticG, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut g_lo = g.eval(lo);
    if g_lo == 0.0 {
        return lo;
    }
    if g.eval(hi) == 0.0 {
        return hi;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g.eval(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid > 0.0) == (g_lo > 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// α* maximising ρ (and hence the SP bound): bisection on the sign change of
/// `g` between `g(0) > 0` and `g(1) = -σ⁴ < 0`.
pub fn optimal_alpha(power: f64, users: usize, coherence: usize, sigma2: f64, tol: f64) -> Result<AlphaOptimum> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be > 0 (got {tol})")));
    }
    let g = quartic_g(power, users, coherence, sigma2)?;

    let grid: Vec<f64> = (0..=SCAN_POINTS).map(|i| i as f64 / SCAN_POINTS as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&a| g.eval(a)).collect();
    let mut roots = Vec::new();
    for i in 0..SCAN_POINTS {
        let (a, b) = (vals[i], vals[i + 1]);
        if a == 0.0 && i > 0 {
            roots.push(grid[i]);
        } else if (a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0) {
            roots.push(bisect(&g, grid[i], grid[i + 1], tol));
        }
    }
    if roots.is_empty() {
        // cannot happen with g(0) > 0 > g(1), but keep the error explicit
        return Err(Error::Parameter("quartic has no sign change on (0,1)".into()));
    }
    if roots.len() > 1 {
        warn!(
            "quartic has {} roots on (0,1) for P={power}, K={users}, L={coherence}, sigma2={sigma2}: {roots:?}; picking the one with largest rho",
            roots.len()
        );
    }

    let mut best: Option<(f64, f64, f64)> = None;
    for &r in &roots {
        let (rho, gamma) = rho_gamma_sp(r, power, users, coherence, sigma2)?;
        if best.is_none_or(|(_, br, _)| rho > br) {
            best = Some((r, rho, gamma));
        }
    }
    let (alpha, rho, gamma) = best.expect("at least one root");
    Ok(AlphaOptimum {
        alpha,
        rho,
        gamma,
        g_residual: g.eval(alpha),
        quartic: g,
        roots,
    })
}

/// SP bound evaluated at α*.
pub fn optimal_sp(
    power: f64,
    users: usize,
    coherence: usize,
    antennas: usize,
    sigma2: f64,
) -> Result<(AlphaOptimum, MilbPoint)> {
    let opt = optimal_alpha(power, users, coherence, sigma2, DEFAULT_ALPHA_TOL)?;
    let cfg = SystemConfig::sp(users, coherence, antennas, power, sigma2, opt.alpha)?;
    let point = milb_sp(&cfg)?;
    Ok((opt, point))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpCandidate {
    pub lp: usize,
    pub rho: f64,
    pub milb_nats: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpOptimum {
    pub lp: usize,
    pub milb: MilbPoint,
    /// bound for every lp in 1..L, in order
    pub table: Vec<LpCandidate>,
}

/// Exhaustive search of the RP pilot length over `1..L`; ties go to the
/// shorter pilot.
pub fn optimal_lp(power: f64, users: usize, coherence: usize, antennas: usize, sigma2: f64) -> Result<LpOptimum> {
    if coherence < 2 {
        return Err(Error::Parameter(format!(
            "regular pilots need L >= 2 (got {coherence})"
        )));
    }
    let points: Vec<MilbPoint> = (1..coherence)
        .into_par_iter()
        .map(|lp| {
            let cfg = SystemConfig::new(users, coherence, antennas, power, sigma2, Scheme::Rp { lp })?;
            milb_rp(&cfg)
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (i, p) in points.iter().enumerate() {
        if p.milb_nats > points[best].milb_nats {
            best = i;
        }
    }
    let table = points
        .iter()
        .enumerate()
        .map(|(i, p)| LpCandidate {
            lp: i + 1,
            rho: p.rho,
            milb_nats: p.milb_nats,
        })
        .collect();
    Ok(LpOptimum {
        lp: best + 1,
        milb: points[best],
        table,
    })
}
