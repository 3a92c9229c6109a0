//! Scenario parameters shared by every module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scheme label without its parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeTag {
    Sp,
    Rp,
}

impl SchemeTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeTag::Sp => "sp",
            SchemeTag::Rp => "rp",
        }
    }
}

impl std::fmt::Display for SchemeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How the coherence block is split between training and data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "lowercase")]
pub enum Scheme {
    /// Superimposed pilot: pilot and data share all `L` symbols, split by power factor `alpha`.
    Sp { alpha: f64 },
    /// Regular pilot: `lp` pilot symbols followed by `L - lp` data symbols.
    Rp { lp: usize },
}

impl Scheme {
    pub fn tag(&self) -> SchemeTag {
        match self {
            Scheme::Sp { .. } => SchemeTag::Sp,
            Scheme::Rp { .. } => SchemeTag::Rp,
        }
    }

    /// The allocation parameter: `alpha` for SP, `lp` (as a float) for RP.
    pub fn parameter(&self) -> f64 {
        match *self {
            Scheme::Sp { alpha } => alpha,
            Scheme::Rp { lp } => lp as f64,
        }
    }
}

/// Scalar scenario parameters: `K` users, coherence length `L`, `N` antennas,
/// per-user power `P` (linear) and noise variance `sigma2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub users: usize,
    pub coherence: usize,
    pub antennas: usize,
    pub power: f64,
    pub sigma2: f64,
    pub scheme: Scheme,
}

impl SystemConfig {
    pub fn new(
        users: usize,
        coherence: usize,
        antennas: usize,
        power: f64,
        sigma2: f64,
        scheme: Scheme,
    ) -> Result<Self> {
        let cfg = SystemConfig {
            users,
            coherence,
            antennas,
            power,
            sigma2,
            scheme,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn sp(users: usize, coherence: usize, antennas: usize, power: f64, sigma2: f64, alpha: f64) -> Result<Self> {
        Self::new(users, coherence, antennas, power, sigma2, Scheme::Sp { alpha })
    }

    pub fn rp(users: usize, coherence: usize, antennas: usize, power: f64, sigma2: f64, lp: usize) -> Result<Self> {
        Self::new(users, coherence, antennas, power, sigma2, Scheme::Rp { lp })
    }

    pub fn validate(&self) -> Result<()> {
        let (k, l, n) = (self.users, self.coherence, self.antennas);
        if l == 0 {
            return Err(Error::Dimension("coherence length L must be >= 1".into()));
        }
        if k < l {
            return Err(Error::Dimension(format!(
                "users K={k} must be >= coherence length L={l}"
            )));
        }
        if n < l {
            return Err(Error::Dimension(format!(
                "antennas N={n} must be >= coherence length L={l}"
            )));
        }
        if !(self.power.is_finite() && self.power >= 0.0) {
            return Err(Error::Parameter(format!("power P={} must be finite and >= 0", self.power)));
        }
        if !(self.sigma2.is_finite() && self.sigma2 > 0.0) {
            return Err(Error::Parameter(format!("noise variance {} must be > 0", self.sigma2)));
        }
        match self.scheme {
            Scheme::Sp { alpha } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::Parameter(format!("alpha={alpha} must lie in (0,1)")));
                }
            }
            Scheme::Rp { lp } => {
                if lp == 0 || lp >= l {
                    return Err(Error::Parameter(format!(
                        "pilot length lp={lp} must lie in 1..={}",
                        l.saturating_sub(1)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of data symbols per block: `L` for SP, `L - lp` for RP.
    pub fn data_len(&self) -> usize {
        match self.scheme {
            Scheme::Sp { .. } => self.coherence,
            Scheme::Rp { lp } => self.coherence - lp,
        }
    }

    /// Number of pilot symbols per block: `L` for SP, `lp` for RP.
    pub fn pilot_len(&self) -> usize {
        match self.scheme {
            Scheme::Sp { .. } => self.coherence,
            Scheme::Rp { lp } => lp,
        }
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Result<Self> {
        Self::new(self.users, self.coherence, self.antennas, self.power, self.sigma2, scheme)
    }

    pub fn with_power(&self, power: f64) -> Result<Self> {
        Self::new(self.users, self.coherence, self.antennas, power, self.sigma2, self.scheme)
    }

    /// `10 log10(P / sigma2)`.
    pub fn power_db(&self) -> f64 {
        10.0 * (self.power / self.sigma2).log10()
    }
}

/// Linear power for a given `P_db = 10 log10(P / sigma2)`.
pub fn db_to_power(p_db: f64, sigma2: f64) -> f64 {
    sigma2 * 10f64.powf(p_db / 10.0)
}
