// MILB against the number of users at two transmit powers, normalised per
// channel use.

use superpilot::cli::{run_sweep, Axis, Overrides, SweepRow};

pub fn run_example() -> superpilot::Result<Vec<SweepRow>> {
    let spec = Overrides {
        axis: Some(Axis::Users),
        k_range: Some("31:60:3".into()),
        p_db: Some(vec![0.0, 20.0]),
        per_channel_use: Some(true),
        ..Default::default()
    }
    .sweep_spec()?;
    let rows = run_sweep(&spec)?;
    println!("{:>6} {:>4} {:>6} {:>12}", "P_db", "K", "scheme", "nats/use");
    for r in &rows {
        println!("{:>6} {:>4} {:>6} {:>12.5}", r.p_db, r.point.config.users, r.point.scheme, r.point.milb_nats);
    }
    Ok(rows)
}

fn main() -> superpilot::Result<()> {
    run_example()?;
    Ok(())
}
