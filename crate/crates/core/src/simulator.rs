//! Seeded Monte Carlo counterparts of every closed form.
//!
//! Each trial draws from its own generator seeded by `(master seed, trial
//! index)`. Trials may run on any number of workers; per-trial samples are
//! reduced in index order, so results are bit-identical for a given seed.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{sigma_v2_rp, sigma_v2_sp};
use crate::config::{Scheme, SystemConfig};
use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian, frob2, log_det_identity_plus_gram, re_trace_abh};
use crate::linklevel::{frame_rng, FrameRealization};
use crate::milb::{rho_gamma_sp, rho_rp, Method, MilbPoint};
use crate::pilot::gen_mwbe_pilots;

pub const MIN_TRIALS: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub quantity: String,
    pub trials: u64,
    pub mean: f64,
    /// sample standard deviation over `sqrt(trials)`
    pub stderr: f64,
    pub seed: u64,
    pub config: SystemConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MilbMode {
    /// `ln det(I + ρ G G^H)` with i.i.d. Gaussian `G`
    GaussianEquivalent,
    /// `ln det(I + c Ĥ Ĥ^H)` with `Ĥ` estimated from simulated frames
    FullLinklevel,
}

fn mean_stderr(samples: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = samples.clone().sum::<f64>() / nf;
    let var = samples.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (nf - 1.0);
    (mean, (var / nf).sqrt())
}

/// Runs `trials` independent trials, each producing `width` samples, and
/// returns per-column `(mean, stderr)`.
pub fn run_trials<F>(trials: u64, seed: u64, width: usize, f: F) -> Result<Vec<(f64, f64)>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Vec<f64>> + Sync,
{
    if trials < MIN_TRIALS {
        return Err(Error::Parameter(format!(
            "need at least {MIN_TRIALS} trials (got {trials})"
        )));
    }
    let rows: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|i| f(&mut frame_rng(seed, i)))
        .collect::<Result<_>>()?;
    Ok((0..width)
        .map(|c| mean_stderr(rows.iter().map(move |r| r[c]), rows.len()))
        .collect())
}

fn stats(quantity: &str, cfg: &SystemConfig, trials: u64, seed: u64, (mean, stderr): (f64, f64)) -> TrialStats {
    TrialStats {
        quantity: quantity.to_string(),
        trials,
        mean,
        stderr,
        seed,
        config: *cfg,
    }
}

/// Empirical `(1/NK) ‖H - Ĥ‖_F²`.
pub fn mc_error_variance(cfg: &SystemConfig, trials: u64, seed: u64) -> Result<TrialStats> {
    cfg.validate()?;
    let pilots = gen_mwbe_pilots(cfg.users, cfg.coherence)?;
    let norm = (cfg.antennas * cfg.users) as f64;
    let out = run_trials(trials, seed, 1, |rng| {
        let f = FrameRealization::sample(cfg, &pilots, rng)?;
        Ok(vec![frob2(&f.estimation_error()) / norm])
    })?;
    Ok(stats("error_variance", cfg, trials, seed, out[0]))
}

/// Empirical `(1/(N·width)) ‖V‖_F²`, width being the number of data symbols.
pub fn mc_sigma_v2(cfg: &SystemConfig, trials: u64, seed: u64) -> Result<TrialStats> {
    cfg.validate()?;
    let pilots = gen_mwbe_pilots(cfg.users, cfg.coherence)?;
    let norm = (cfg.antennas * cfg.data_len()) as f64;
    let out = run_trials(trials, seed, 1, |rng| {
        let f = FrameRealization::sample(cfg, &pilots, rng)?;
        Ok(vec![frob2(&f.residual) / norm])
    })?;
    Ok(stats("sigma_v2", cfg, trials, seed, out[0]))
}

pub const TRACE_NAMES: [&str; 6] = ["tr_r1", "tr_r2", "tr_r3", "tr_r4", "tr_r5", "tr_r6"];

/// Per-trial traces of the six blocks of `V V^H` for SP, built from the
/// known `H`, `S`, noise and `Ĥ`. Cross terms are reported as `Re tr` of one
/// member of each conjugate pair.
pub fn mc_trace_terms(cfg: &SystemConfig, trials: u64, seed: u64) -> Result<[TrialStats; 6]> {
    cfg.validate()?;
    let alpha = match cfg.scheme {
        Scheme::Sp { alpha } => alpha,
        Scheme::Rp { .. } => return Err(Error::Parameter("trace terms are defined for SP only".into())),
    };
    let p = cfg.power;
    let pilots = gen_mwbe_pilots(cfg.users, cfg.coherence)?;
    let out = run_trials(trials, seed, 6, |rng| {
        let f = FrameRealization::sample(cfg, &pilots, rng)?;
        let err = f.estimation_error();
        let err_pilot = &err * pilots.entries();
        let err_data = &err * &f.data;
        Ok(vec![
            frob2(&f.noise),
            (1.0 - alpha) * p * frob2(&err_data),
            alpha * p * frob2(&err_pilot),
            (alpha * p).sqrt() * re_trace_abh(&err_pilot, &f.noise),
            ((1.0 - alpha) * p).sqrt() * re_trace_abh(&err_data, &f.noise),
            (alpha * (1.0 - alpha)).sqrt() * p * re_trace_abh(&err_pilot, &err_data),
        ])
    })?;
    Ok(std::array::from_fn(|i| stats(TRACE_NAMES[i], cfg, trials, seed, out[i])))
}

/// Monte Carlo estimate of the bound, with the same per-block prefactors as
/// the closed forms.
pub fn mc_milb(cfg: &SystemConfig, trials: u64, seed: u64, mode: MilbMode) -> Result<TrialStats> {
    cfg.validate()?;
    let (n, l) = (cfg.antennas, cfg.coherence as f64);
    let out = match (cfg.scheme, mode) {
        (Scheme::Sp { alpha }, MilbMode::GaussianEquivalent) => {
            let (rho, _) = rho_gamma_sp(alpha, cfg.power, cfg.users, cfg.coherence, cfg.sigma2)?;
            run_trials(trials, seed, 1, |rng| {
                let g = complex_gaussian(rng, n, cfg.coherence, 1.0);
                Ok(vec![log_det_identity_plus_gram(&g, rho)?])
            })?
        }
        (Scheme::Rp { lp }, MilbMode::GaussianEquivalent) => {
            let rho = rho_rp(cfg.power, cfg.users, lp, cfg.sigma2);
            let pre = (l - lp as f64) / l;
            run_trials(trials, seed, 1, |rng| {
                let g = complex_gaussian(rng, n, lp, 1.0);
                Ok(vec![pre * log_det_identity_plus_gram(&g, rho)?])
            })?
        }
        (Scheme::Sp { alpha }, MilbMode::FullLinklevel) => {
            let pilots = gen_mwbe_pilots(cfg.users, cfg.coherence)?;
            let sv = sigma_v2_sp(alpha, cfg.power, cfg.users, cfg.coherence, cfg.sigma2);
            let scale = (1.0 - alpha) * cfg.power / sv;
            run_trials(trials, seed, 1, |rng| {
                let f = FrameRealization::sample(cfg, &pilots, rng)?;
                Ok(vec![log_det_identity_plus_gram(&f.estimate, scale)?])
            })?
        }
        (Scheme::Rp { lp }, MilbMode::FullLinklevel) => {
            let pilots = gen_mwbe_pilots(cfg.users, cfg.coherence)?;
            let sv = sigma_v2_rp(cfg.power, cfg.users, lp, cfg.sigma2);
            let scale = cfg.power / sv;
            let pre = (l - lp as f64) / l;
            run_trials(trials, seed, 1, |rng| {
                let f = FrameRealization::sample(cfg, &pilots, rng)?;
                Ok(vec![pre * log_det_identity_plus_gram(&f.estimate, scale)?])
            })?
        }
    };
    let name = match mode {
        MilbMode::GaussianEquivalent => "milb_gaussian_equivalent",
        MilbMode::FullLinklevel => "milb_full_linklevel",
    };
    Ok(stats(name, cfg, trials, seed, out[0]))
}

/// [`mc_milb`] packaged as a bound point.
pub fn mc_milb_point(cfg: &SystemConfig, trials: u64, seed: u64, mode: MilbMode) -> Result<MilbPoint> {
    let s = mc_milb(cfg, trials, seed, mode)?;
    let rho = match cfg.scheme {
        Scheme::Sp { alpha } => rho_gamma_sp(alpha, cfg.power, cfg.users, cfg.coherence, cfg.sigma2)?.0,
        Scheme::Rp { lp } => rho_rp(cfg.power, cfg.users, lp, cfg.sigma2),
    };
    Ok(MilbPoint {
        scheme: cfg.scheme.tag(),
        config: *cfg,
        rho,
        milb_nats: s.mean,
        milb_bits: s.mean / std::f64::consts::LN_2,
        method: Method::MonteCarlo,
        stderr: s.stderr,
        trials,
        seed: Some(seed),
    })
}
