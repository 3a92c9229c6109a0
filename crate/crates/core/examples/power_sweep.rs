// MILB against transmit power for both schemes, as the CSV the command line
// `sweep` subcommand writes.

use superpilot::cli::{run_sweep, write_sweep, Overrides, SweepRow};

pub fn run_example() -> superpilot::Result<Vec<SweepRow>> {
    let spec = Overrides {
        k: Some(vec![40]),
        p_db_range: Some("0:40:5".into()),
        ..Default::default()
    }
    .sweep_spec()?;
    let rows = run_sweep(&spec)?;
    write_sweep(&spec, &rows, std::io::stdout().lock())?;
    Ok(rows)
}

fn main() -> superpilot::Result<()> {
    run_example()?;
    Ok(())
}
