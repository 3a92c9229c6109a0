//! Marginal eigenvalue density of an uncorrelated complex Wishart matrix
//! `G^H G`, `G` being `N x L` with i.i.d. `CN(0, 1)` entries and `N >= L`:
//!
//! `f_L(λ) = (1/L) Σ_{m<L} m!/(m+N-L)! · La_m^{(N-L)}(λ)² · λ^{N-L} e^{-λ}`.

use std::sync::OnceLock;

use super::laguerre::laguerre_all;
use super::quadrature::{rule, LEVELS};
use crate::error::{Error, Result};

/// Relative change between successive node doublings accepted as converged.
pub const QUAD_TOL: f64 = 1e-10;

/// Density mass allowed beyond the integration interval.
pub const TAIL_TOL: f64 = 1e-12;

#[derive(Debug)]
pub struct EigDensity {
    antennas: usize,
    side: usize,
    upper: f64,
    /// `ln(m! / (m + N - L)!)` for `m < L`
    log_ratio: Vec<f64>,
    /// `(λ_i, w_i f(λ_i))` on `[0, upper]`, filled lazily per level
    levels: [OnceLock<Vec<(f64, f64)>>; LEVELS],
}

impl EigDensity {
    pub fn new(antennas: usize, side: usize) -> Result<Self> {
        if side == 0 || antennas < side {
            return Err(Error::DensityShape { antennas, side });
        }
        let r = antennas - side;
        let log_ratio = (0..side)
            .map(|m| -((m + 1)..=(m + r)).map(|i| (i as f64).ln()).sum::<f64>())
            .collect();
        let mut dens = EigDensity {
            antennas,
            side,
            upper: 0.0,
            log_ratio,
            levels: [const { OnceLock::new() }; LEVELS],
        };
        let root = (antennas as f64).sqrt() + (side as f64).sqrt();
        let mut upper = 1.5 * root * root;
        // Small N leaves a heavy exponential tail past the nominal bound.
        for _ in 0..64 {
            if dens.mass_between(upper, 2.0 * upper) < TAIL_TOL {
                break;
            }
            upper *= 1.5;
        }
        dens.upper = upper;
        Ok(dens)
    }

    pub fn antennas(&self) -> usize {
        self.antennas
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Right end of the integration interval.
    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn density(&self, lambda: f64) -> f64 {
        if lambda < 0.0 {
            return 0.0;
        }
        let r = self.antennas - self.side;
        let log_pow = if r == 0 {
            0.0
        } else if lambda == 0.0 {
            return 0.0;
        } else {
            r as f64 * lambda.ln()
        };
        let mut la = Vec::with_capacity(self.side);
        laguerre_all(self.side, r, lambda, &mut la);
        let base = log_pow - lambda;
        let total: f64 = la
            .iter()
            .zip(&self.log_ratio)
            .map(|(&p, &lr)| {
                if p == 0.0 {
                    0.0
                } else {
                    (lr + base + 2.0 * p.abs().ln()).exp()
                }
            })
            .sum();
        total / self.side as f64
    }

    fn mass_between(&self, a: f64, b: f64) -> f64 {
        rule(2).integrate(a, b, |x| self.density(x))
    }

    /// Mass beyond the integration interval (estimated on `[upper, 2·upper]`).
    pub fn tail_mass(&self) -> f64 {
        self.mass_between(self.upper, 2.0 * self.upper)
    }

    fn level(&self, level: usize) -> &[(f64, f64)] {
        self.levels[level].get_or_init(|| {
            rule(level)
                .mapped(0.0, self.upper)
                .map(|(x, w)| (x, w * self.density(x)))
                .collect()
        })
    }

    /// `∫ g(λ) f(λ) dλ`, doubling the node count until two successive
    /// results agree to `tol` relative.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G, tol: f64) -> Result<f64> {
        let eval = |lvl: usize| -> f64 { self.level(lvl).iter().map(|&(x, wf)| wf * g(x)).sum() };
        let mut prev = eval(0);
        let mut change = f64::INFINITY;
        for lvl in 1..LEVELS {
            let cur = eval(lvl);
            change = if cur == prev { 0.0 } else { (cur - prev).abs() / cur.abs() };
            if change <= tol {
                return Ok(cur);
            }
            prev = cur;
        }
        Err(Error::Quadrature { tol, change })
    }

    pub fn normalization(&self) -> Result<f64> {
        self.integrate(|_| 1.0, QUAD_TOL)
    }

    pub fn mean(&self) -> Result<f64> {
        self.integrate(|x| x, QUAD_TOL)
    }
}

/// `f_L(λ)` for the given density object.
pub fn wishart_density(dens: &EigDensity, lambda: f64) -> f64 {
    dens.density(lambda)
}
