// MWBE pilot codebook: orthogonal rows for `len = K`, Welch-bound-equality
// columns for shorter lengths.

use superpilot::pilot::gen_mwbe_pilots;

/// Returns the largest deviation of `Phi Phi^H` from `K I` and of
/// `Phi^H Phi` from `len I` over a few shapes.
pub fn run_example() -> superpilot::Result<f64> {
    let mut worst: f64 = 0.0;
    for (users, len) in [(8, 8), (8, 3), (40, 30), (40, 17)] {
        let p = gen_mwbe_pilots(users, len)?;
        let cols = p.gram_columns();
        let rows = p.gram_rows();
        let mut col_err: f64 = 0.0;
        for i in 0..len {
            for j in 0..len {
                let target = if i == j { users as f64 } else { 0.0 };
                col_err = col_err.max((cols[(i, j)].re - target).abs().max(cols[(i, j)].im.abs()));
            }
        }
        let diag = (0..users).map(|i| rows[(i, i)].re).fold(0.0_f64, f64::max);
        println!("K={users:>3} len={len:>3}  max|Phi^H Phi - K I| = {col_err:.2e}  diag(Phi Phi^H) = {diag}");
        worst = worst.max(col_err);
    }
    let small = gen_mwbe_pilots(4, 4)?;
    println!("\nK=4 codebook (re, im):");
    for r in 0..4 {
        let row: Vec<String> = (0..4)
            .map(|c| {
                let z = small.entries()[(r, c)];
                format!("({:+.0}, {:+.0})", z.re + 0.0, z.im + 0.0)
            })
            .collect();
        println!("  {}", row.join(" "));
    }
    Ok(worst)
}

fn main() -> superpilot::Result<()> {
    run_example()?;
    Ok(())
}
