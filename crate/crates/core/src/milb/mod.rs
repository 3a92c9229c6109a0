//! Mutual-information lower bounds (MILB) from the Wishart eigenvalue density.
//!
//! SP: `L ∫ ln(1 + ρλ) f_L(λ) dλ` per coherence block.
//! RP: `((L - lp)/L) · lp ∫ ln(1 + ρ_rp λ) f_lp(λ) dλ`.

mod density;
mod laguerre;
mod quadrature;

pub use density::{wishart_density, EigDensity, QUAD_TOL, TAIL_TOL};
pub use laguerre::{laguerre, laguerre_all};
pub use quadrature::GaussLegendre;

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::analysis::compensated_sum;
use crate::config::{Scheme, SchemeTag, SystemConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

/// One evaluated bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MilbPoint {
    pub scheme: SchemeTag,
    pub config: SystemConfig,
    pub rho: f64,
    pub milb_nats: f64,
    pub milb_bits: f64,
    pub method: Method,
    pub stderr: f64,
    pub trials: u64,
    pub seed: Option<u64>,
}

impl MilbPoint {
    pub fn closed_form(config: SystemConfig, rho: f64, milb_nats: f64) -> Self {
        MilbPoint {
            scheme: config.scheme.tag(),
            config,
            rho,
            milb_nats,
            milb_bits: milb_nats / LN_2,
            method: Method::ClosedForm,
            stderr: 0.0,
            trials: 0,
            seed: None,
        }
    }

    /// The same point divided by the coherence length `L`.
    pub fn per_channel_use(&self) -> Self {
        let l = self.config.coherence as f64;
        MilbPoint {
            milb_nats: self.milb_nats / l,
            milb_bits: self.milb_bits / l,
            stderr: self.stderr / l,
            ..*self
        }
    }
}

/// Shared pieces of the SP closed forms: `D = PK + σ²`, `A = 2K²LP³/D`.
struct SpTerms {
    d: f64,
    a: f64,
    k: f64,
    l: f64,
    p: f64,
    sigma2: f64,
}

impl SpTerms {
    fn new(power: f64, users: usize, coherence: usize, sigma2: f64) -> Self {
        let (k, l, p) = (users as f64, coherence as f64, power);
        let d = p * k + sigma2;
        SpTerms {
            d,
            a: 2.0 * k * k * l * p * p * p / d,
            k,
            l,
            p,
            sigma2,
        }
    }

    /// γ(α) regrouped as
    /// `α(1-α)(Aα - KLP²) + K²P²(1-α)² + 2KPσ²(1-α) + σ⁴`,
    /// which equals the cubic in α term by term and is exact at both ends.
    fn gamma(&self, alpha: f64) -> f64 {
        let (k, l, p, s2) = (self.k, self.l, self.p, self.sigma2);
        let om = 1.0 - alpha;
        compensated_sum(&[
            alpha * om * self.a * alpha,
            -alpha * om * k * l * p * p,
            k * k * p * p * om * om,
            2.0 * k * p * s2 * om,
            s2 * s2,
        ])
    }
}

/// `γ(α)` coefficients in descending powers of α, as the plain cubic.
pub fn gamma_coefficients(power: f64, users: usize, coherence: usize, sigma2: f64) -> [f64; 4] {
    let t = SpTerms::new(power, users, coherence, sigma2);
    let (k, l, p, s2) = (t.k, t.l, t.p, t.sigma2);
    [
        -t.a,
        t.a + k * l * p * p + k * k * p * p,
        -k * l * p * p - 2.0 * k * k * p * p - 2.0 * k * p * s2,
        t.d * t.d,
    ]
}

/// Effective SNR coefficient `ρ = α(1-α)P²K/γ` and `γ` for superimposed pilots.
pub fn rho_gamma_sp(alpha: f64, power: f64, users: usize, coherence: usize, sigma2: f64) -> Result<(f64, f64)> {
    let t = SpTerms::new(power, users, coherence, sigma2);
    let gamma = t.gamma(alpha);
    if !(gamma > 0.0) {
        return Err(Error::NonPositiveGamma(gamma));
    }
    let rho = alpha * (1.0 - alpha) * t.p * t.p * t.k / gamma;
    Ok((rho, gamma))
}

/// `ρ_rp = P²K / (P²K(K - lp) + σ⁴ + 2PKσ²)`.
pub fn rho_rp(power: f64, users: usize, lp: usize, sigma2: f64) -> f64 {
    let (p, k) = (power, users as f64);
    p * p * k / (p * p * k * (k - lp as f64) + sigma2 * sigma2 + 2.0 * p * k * sigma2)
}

/// `∫ ln(1 + ρλ) f(λ) dλ` in nats.
pub fn log_integral(dens: &EigDensity, rho: f64) -> Result<f64> {
    if rho == 0.0 {
        return Ok(0.0);
    }
    dens.integrate(|x| (rho * x).ln_1p(), QUAD_TOL)
}

pub fn milb_sp(cfg: &SystemConfig) -> Result<MilbPoint> {
    cfg.validate()?;
    let alpha = match cfg.scheme {
        Scheme::Sp { alpha } => alpha,
        Scheme::Rp { .. } => return Err(Error::Parameter("milb_sp needs an SP configuration".into())),
    };
    let (rho, _) = rho_gamma_sp(alpha, cfg.power, cfg.users, cfg.coherence, cfg.sigma2)?;
    let dens = EigDensity::new(cfg.antennas, cfg.coherence)?;
    let nats = cfg.coherence as f64 * log_integral(&dens, rho)?;
    Ok(MilbPoint::closed_form(*cfg, rho, nats))
}

pub fn milb_rp(cfg: &SystemConfig) -> Result<MilbPoint> {
    cfg.validate()?;
    let lp = match cfg.scheme {
        Scheme::Rp { lp } => lp,
        Scheme::Sp { .. } => return Err(Error::Parameter("milb_rp needs an RP configuration".into())),
    };
    let rho = rho_rp(cfg.power, cfg.users, lp, cfg.sigma2);
    let dens = EigDensity::new(cfg.antennas, lp)?;
    let l = cfg.coherence as f64;
    let nats = (l - lp as f64) / l * lp as f64 * log_integral(&dens, rho)?;
    Ok(MilbPoint::closed_form(*cfg, rho, nats))
}

/// Dispatches on the configured scheme.
pub fn milb(cfg: &SystemConfig) -> Result<MilbPoint> {
    match cfg.scheme {
        Scheme::Sp { .. } => milb_sp(cfg),
        Scheme::Rp { .. } => milb_rp(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::sigma_v2_sp;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn gamma_endpoints() {
        let (r, g) = rho_gamma_sp(0.0, 3.0, 40, 30, 2.0).unwrap();
        assert_eq!(r, 0.0);
        assert_eq!(g, (2.0f64 + 120.0).powi(2));
        let (r, g) = rho_gamma_sp(1.0, 3.0, 40, 30, 2.0).unwrap();
        assert_eq!(r, 0.0);
        assert_eq!(g, 4.0);
    }

    #[test]
    fn gamma_reference_point() {
        let (rho, gamma) = rho_gamma_sp(0.5, 1.0, 40, 30, 1.0).unwrap();
        assert!((gamma - 433.683).abs() < 1e-3);
        assert!((rho - 0.02306).abs() < 1e-5);
        // ρ = (1-α)P σ_G² / σ_V² with σ_G² = αPK/(PK+σ²)
        let sg = 0.5 * 40.0 / 41.0;
        let alt = 0.5 * sg / sigma_v2_sp(0.5, 1.0, 40, 30, 1.0);
        assert!(rel(rho, alt) < 1e-12);
    }

    #[test]
    fn regrouped_gamma_matches_cubic() {
        for &(p, k, l, s2) in &[(1.0, 40, 30, 1.0), (100.0, 40, 30, 1.0), (0.3, 7, 5, 2.5), (1e4, 160, 40, 0.1)] {
            let c = gamma_coefficients(p, k, l, s2);
            for i in 0..=20 {
                let a = i as f64 / 20.0;
                let cubic = ((c[0] * a + c[1]) * a + c[2]) * a + c[3];
                let (_, g) = rho_gamma_sp(a, p, k, l, s2).unwrap_or((0.0, f64::NAN));
                let scale = c.iter().map(|x| x.abs()).fold(0.0, f64::max);
                assert!((cubic - g).abs() <= 1e-12 * scale, "p={p} a={a}");
            }
        }
    }

    #[test]
    fn rho_rp_values() {
        assert_eq!(rho_rp(0.0, 40, 10, 1.0), 0.0);
        assert!(rel(rho_rp(1.0, 40, 10, 1.0), 40.0 / 1281.0) < 1e-14);
        let p = 1.0;
        let sg = p * 40.0 / 41.0;
        let alt = p * sg / crate::analysis::sigma_v2_rp(p, 40, 10, 1.0);
        assert!(rel(rho_rp(1.0, 40, 10, 1.0), alt) < 1e-12);
        let (p, k, s2) = (2.0, 12usize, 0.5);
        assert!(rel(rho_rp(p, k, k, s2), p * p * k as f64 / (s2 * s2 + 2.0 * p * k as f64 * s2)) < 1e-14);
    }

    #[test]
    fn zero_power_gives_zero_bound() {
        let sp = milb_sp(&SystemConfig::sp(40, 30, 60, 0.0, 1.0, 0.5).unwrap()).unwrap();
        assert_eq!(sp.milb_nats, 0.0);
        assert_eq!(sp.rho, 0.0);
        let rp = milb_rp(&SystemConfig::rp(40, 30, 60, 0.0, 1.0, 29).unwrap()).unwrap();
        assert_eq!(rp.milb_nats, 0.0);
    }

    #[test]
    fn bits_are_nats_over_ln2() {
        let pt = milb_sp(&SystemConfig::sp(40, 30, 60, 1.0, 1.0, 0.5).unwrap()).unwrap();
        assert!(pt.milb_nats > 0.0);
        assert_eq!(pt.milb_bits, pt.milb_nats / LN_2);
        assert_eq!(pt.method, Method::ClosedForm);
        let pcu = pt.per_channel_use();
        assert!(rel(pcu.milb_nats * 30.0, pt.milb_nats) < 1e-15);
    }

    #[test]
    fn scheme_mismatch_is_rejected() {
        let sp = SystemConfig::sp(40, 30, 60, 1.0, 1.0, 0.5).unwrap();
        let rp = SystemConfig::rp(40, 30, 60, 1.0, 1.0, 5).unwrap();
        assert!(milb_rp(&sp).is_err());
        assert!(milb_sp(&rp).is_err());
    }

    #[test]
    fn rp_bound_monotone_in_power() {
        for lp in [1, 5, 17, 29] {
            let mut last = 0.0;
            for i in 0..12 {
                let p = 0.01 * 2f64.powi(i);
                let v = milb_rp(&SystemConfig::rp(40, 30, 60, p, 1.0, lp).unwrap()).unwrap().milb_nats;
                assert!(v >= last, "lp={lp} p={p}");
                last = v;
            }
        }
    }

    #[test]
    fn sp_bound_increases_with_rho() {
        let dens = EigDensity::new(60, 30).unwrap();
        let mut last = 0.0;
        for i in 1..30 {
            let v = log_integral(&dens, i as f64 * 0.01).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn node_doubling_is_stable() {
        // integrate at the accepted level and one above; compare
        let dens = EigDensity::new(60, 30).unwrap();
        let rho = 0.0357;
        let a = log_integral(&dens, rho).unwrap();
        let b = super::quadrature::rule(6)
            .integrate(0.0, dens.upper(), |x| (rho * x).ln_1p() * dens.density(x));
        assert!(rel(a, b) < 1e-8);
    }
}
