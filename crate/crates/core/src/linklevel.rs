//! Link-level frame synthesis: channel, data and noise draws, received
//! blocks for both pilot schemes, MMSE channel estimates and the residual
//! interference-plus-noise left after pilot cancellation.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Scheme, SystemConfig};
use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian, CMatrix};
use crate::pilot::PilotMatrix;

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check_shape(what: &str, m: &CMatrix, rows: usize, cols: usize) -> Result<()> {
    if m.shape() != (rows, cols) {
        return Err(Error::Dimension(format!(
            "{what} is {}x{}, expected {rows}x{cols}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("alpha={alpha} must lie in (0,1)")))
    }
}

/// SplitMix64 finaliser.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-frame seed derived from the master seed and the frame index.
pub fn frame_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master) ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn frame_rng(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(frame_seed(master, index))
}

/// `N x K` channel with i.i.d. `CN(0, 1)` entries.
pub fn sample_channel<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> CMatrix {
    complex_gaussian(rng, cfg.antennas, cfg.users, 1.0)
}

/// `K x cols` data with i.i.d. `CN(0, 1)` symbols.
pub fn sample_data<R: Rng + ?Sized>(users: usize, cols: usize, rng: &mut R) -> CMatrix {
    complex_gaussian(rng, users, cols, 1.0)
}

/// `N x L` noise with i.i.d. `CN(0, sigma2)` entries.
pub fn sample_noise<R: Rng + ?Sized>(antennas: usize, cols: usize, sigma2: f64, rng: &mut R) -> CMatrix {
    complex_gaussian(rng, antennas, cols, sigma2)
}

/// `Y = sqrt(αP) H Φ + sqrt((1-α)P) H S + noise`.
pub fn transmit_sp(
    h: &CMatrix,
    pilots: &PilotMatrix,
    s: &CMatrix,
    alpha: f64,
    power: f64,
    noise: &CMatrix,
) -> Result<CMatrix> {
    check_alpha(alpha)?;
    let (n, k) = h.shape();
    let l = pilots.len();
    check_shape("pilots", pilots.entries(), k, l)?;
    check_shape("data", s, k, l)?;
    check_shape("noise", noise, n, l)?;
    let x = pilots.entries() * real((alpha * power).sqrt()) + s * real(((1.0 - alpha) * power).sqrt());
    Ok(h * x + noise)
}

/// `Y = sqrt(P) H [Φ_rp, S_rp] + noise`.
pub fn transmit_rp(
    h: &CMatrix,
    pilots_rp: &PilotMatrix,
    s_rp: &CMatrix,
    power: f64,
    noise: &CMatrix,
) -> Result<CMatrix> {
    let (n, k) = h.shape();
    let lp = pilots_rp.len();
    let ld = s_rp.ncols();
    check_shape("pilots", pilots_rp.entries(), k, lp)?;
    check_shape("data", s_rp, k, ld)?;
    check_shape("noise", noise, n, lp + ld)?;
    let mut x = CMatrix::zeros(k, lp + ld);
    x.columns_mut(0, lp).copy_from(pilots_rp.entries());
    x.columns_mut(lp, ld).copy_from(s_rp);
    Ok(h * x * real(power.sqrt()) + noise)
}

/// Scale of the linear estimator `W = c Φ^H`.
pub fn estimator_gain_sp(alpha: f64, power: f64, users: usize, sigma2: f64) -> f64 {
    (alpha * power).sqrt() / (power * users as f64 + sigma2)
}

pub fn estimator_gain_rp(power: f64, users: usize, sigma2: f64) -> f64 {
    power.sqrt() / (power * users as f64 + sigma2)
}

/// `Ĥ = sqrt(αP)/(PK + σ²) · Y Φ^H`, data treated as noise.
pub fn mmse_estimate_sp(
    y: &CMatrix,
    pilots: &PilotMatrix,
    alpha: f64,
    power: f64,
    sigma2: f64,
) -> Result<CMatrix> {
    check_alpha(alpha)?;
    check_shape("received block", y, y.nrows(), pilots.len())?;
    let c = estimator_gain_sp(alpha, power, pilots.users(), sigma2);
    Ok(y * pilots.entries().adjoint() * real(c))
}

/// `Ĥ = sqrt(P)/(PK + σ²) · Y_p Φ_rp^H` from the pilot-phase columns only.
pub fn mmse_estimate_rp(y_p: &CMatrix, pilots_rp: &PilotMatrix, power: f64, sigma2: f64) -> Result<CMatrix> {
    check_shape("pilot-phase block", y_p, y_p.nrows(), pilots_rp.len())?;
    let c = estimator_gain_rp(power, pilots_rp.users(), sigma2);
    Ok(y_p * pilots_rp.entries().adjoint() * real(c))
}

/// `V = Y - sqrt(αP) Ĥ Φ - sqrt((1-α)P) Ĥ S`, i.e. `Y_d - sqrt((1-α)P) Ĥ S`.
/// Needs the transmitted data, which only a simulator knows.
pub fn residual_sp(
    y: &CMatrix,
    hhat: &CMatrix,
    pilots: &PilotMatrix,
    s: &CMatrix,
    alpha: f64,
    power: f64,
) -> Result<CMatrix> {
    check_alpha(alpha)?;
    let (n, k) = hhat.shape();
    let l = pilots.len();
    check_shape("received block", y, n, l)?;
    check_shape("pilots", pilots.entries(), k, l)?;
    check_shape("data", s, k, l)?;
    let x = pilots.entries() * real((alpha * power).sqrt()) + s * real(((1.0 - alpha) * power).sqrt());
    Ok(y - hhat * x)
}

/// `V_rp = Y_d - sqrt(P) Ĥ S_rp` over the data-phase columns.
pub fn residual_rp(y_d: &CMatrix, hhat: &CMatrix, s_rp: &CMatrix, power: f64) -> Result<CMatrix> {
    let (n, k) = hhat.shape();
    check_shape("data-phase block", y_d, n, s_rp.ncols())?;
    check_shape("data", s_rp, k, y_d.ncols())?;
    Ok(y_d - hhat * s_rp * real(power.sqrt()))
}

/// One sampled block and everything derived from it.
#[derive(Debug, Clone)]
pub struct FrameRealization {
    pub channel: CMatrix,
    pub data: CMatrix,
    pub noise: CMatrix,
    pub received: CMatrix,
    pub estimate: CMatrix,
    pub residual: CMatrix,
}

impl FrameRealization {
    /// Draws `H`, then `S`, then the noise from `rng`, and synthesises the frame.
    /// `pilots` must be the full-length (`L`) pilot matrix; the RP scheme uses its
    /// first `lp` columns.
    pub fn sample<R: Rng + ?Sized>(cfg: &SystemConfig, pilots: &PilotMatrix, rng: &mut R) -> Result<Self> {
        let (n, k, l) = (cfg.antennas, cfg.users, cfg.coherence);
        check_shape("pilots", pilots.entries(), k, l)?;
        let channel = sample_channel(cfg, rng);
        let data = sample_data(k, cfg.data_len(), rng);
        let noise = sample_noise(n, l, cfg.sigma2, rng);
        Self::assemble(cfg, pilots, channel, data, noise)
    }

    pub fn assemble(
        cfg: &SystemConfig,
        pilots: &PilotMatrix,
        channel: CMatrix,
        data: CMatrix,
        noise: CMatrix,
    ) -> Result<Self> {
        let (p, s2) = (cfg.power, cfg.sigma2);
        match cfg.scheme {
            Scheme::Sp { alpha } => {
                let received = transmit_sp(&channel, pilots, &data, alpha, p, &noise)?;
                let estimate = mmse_estimate_sp(&received, pilots, alpha, p, s2)?;
                let residual = residual_sp(&received, &estimate, pilots, &data, alpha, p)?;
                Ok(FrameRealization { channel, data, noise, received, estimate, residual })
            }
            Scheme::Rp { lp } => {
                let pilots_rp = pilots.truncate(lp)?;
                let received = transmit_rp(&channel, &pilots_rp, &data, p, &noise)?;
                let ld = cfg.coherence - lp;
                let y_p = received.columns(0, lp).into_owned();
                let y_d = received.columns(lp, ld).into_owned();
                let estimate = mmse_estimate_rp(&y_p, &pilots_rp, p, s2)?;
                let residual = residual_rp(&y_d, &estimate, &data, p)?;
                Ok(FrameRealization { channel, data, noise, received, estimate, residual })
            }
        }
    }

    /// Recomputes `Y` from the stored channel, data and noise.
    pub fn reconstruct_received(&self, cfg: &SystemConfig, pilots: &PilotMatrix) -> Result<CMatrix> {
        match cfg.scheme {
            Scheme::Sp { alpha } => transmit_sp(&self.channel, pilots, &self.data, alpha, cfg.power, &self.noise),
            Scheme::Rp { lp } => transmit_rp(&self.channel, &pilots.truncate(lp)?, &self.data, cfg.power, &self.noise),
        }
    }

    /// `H̃ = H - Ĥ`.
    pub fn estimation_error(&self) -> CMatrix {
        &self.channel - &self.estimate
    }
}
