// Optimal split of SP power between pilot and data, and the optimal RP pilot
// length, at a single operating point.

use superpilot::allocation::{optimal_lp, optimal_sp};
use superpilot::db_to_power;

/// Returns `(alpha*, SP MILB, Lp*, RP MILB)` in nats per block.
pub fn run_example() -> superpilot::Result<(f64, f64, usize, f64)> {
    let (k, l, n, s2) = (40, 30, 60, 1.0);
    let p = db_to_power(20.0, s2);
    let (alpha, sp) = optimal_sp(p, k, l, n, s2)?;
    println!("SP: alpha* = {:.6}  rho = {:.5}  quartic residual {:.1e} (scale {:.1e})", alpha.alpha, alpha.rho, alpha.g_residual, alpha.quartic.scale());
    println!("    MILB = {:.4} nats/block ({:.4} bits)", sp.milb_nats, sp.milb_bits);
    let rp = optimal_lp(p, k, l, n, s2)?;
    println!("RP: Lp* = {}  MILB = {:.4} nats/block", rp.lp, rp.milb.milb_nats);
    for c in rp.table.iter().step_by(4) {
        println!("    Lp={:>2}  rho={:.5}  MILB={:.4}", c.lp, c.rho, c.milb_nats);
    }
    Ok((alpha.alpha, sp.milb_nats, rp.lp, rp.milb.milb_nats))
}

fn main() -> superpilot::Result<()> {
    run_example()?;
    Ok(())
}
