// One coherence block through the SP and RP link-level models, with the
// empirical channel-estimation error next to its closed form.

use superpilot::analysis::{error_variance_rp, error_variance_sp};
use superpilot::linalg::frob2;
use superpilot::linklevel::{frame_rng, FrameRealization};
use superpilot::pilot::gen_mwbe_pilots;
use superpilot::SystemConfig;

/// Returns `(empirical, closed form)` per-entry error variance for SP then RP,
/// averaged over `frames` blocks.
pub fn run_example() -> superpilot::Result<[(f64, f64); 2]> {
    let frames = 50;
    let pilots = gen_mwbe_pilots(40, 30)?;
    let sp = SystemConfig::sp(40, 30, 60, 1.0, 1.0, 0.5)?;
    let rp = SystemConfig::rp(40, 30, 60, 1.0, 1.0, 10)?;
    let mut out = [(0.0, 0.0); 2];
    for (slot, cfg) in [sp, rp].iter().enumerate() {
        let mut acc = 0.0;
        for i in 0..frames {
            let mut rng = frame_rng(11, i);
            let frame = FrameRealization::sample(cfg, &pilots, &mut rng)?;
            if i == 0 {
                let rebuilt = frame.reconstruct_received(cfg, &pilots)?;
                let gap = frob2(&(&rebuilt - &frame.received)).sqrt();
                println!(
                    "{}: Y is {}x{}, residual V is {}x{}, |Y - rebuilt Y| = {gap:.1e}",
                    cfg.scheme.tag(),
                    frame.received.nrows(),
                    frame.received.ncols(),
                    frame.residual.nrows(),
                    frame.residual.ncols()
                );
            }
            acc += frob2(&frame.estimation_error()) / (cfg.antennas * cfg.users) as f64;
        }
        let closed = match cfg.scheme {
            superpilot::Scheme::Sp { alpha } => error_variance_sp(alpha, cfg.power, cfg.users, cfg.coherence, cfg.sigma2),
            superpilot::Scheme::Rp { lp } => error_variance_rp(cfg.power, cfg.users, lp, cfg.sigma2),
        };
        out[slot] = (acc / frames as f64, closed);
        println!("   error variance over {frames} blocks: {:.4} (closed form {:.4})", out[slot].0, closed);
    }
    Ok(out)
}

fn main() -> superpilot::Result<()> {
    run_example()?;
    Ok(())
}
