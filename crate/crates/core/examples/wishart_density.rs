// Unordered eigenvalue density of a complex Wishart matrix and the
// quadrature that the capacity bounds are built on.

use superpilot::milb::EigDensity;

/// Returns `(N, L, mass, mean)` per shape.
pub fn run_example() -> superpilot::Result<Vec<(usize, usize, f64, f64)>> {
    let mut out = Vec::new();
    for (n, l) in [(60, 30), (60, 1), (31, 30), (1, 1)] {
        let d = EigDensity::new(n, l)?;
        let mass = d.normalization()?;
        let mean = d.mean()?;
        println!("N={n:>2} L={l:>2}  support [0, {:.1}]  mass {mass:.12}  mean {mean:.9}", d.upper());
        out.push((n, l, mass, mean));
    }
    let d = EigDensity::new(60, 30)?;
    println!("\nf(lambda) for N=60, L=30");
    let step = d.upper() / 20.0;
    for i in 0..=20 {
        let x = i as f64 * step;
        let f = d.density(x);
        let bar = "#".repeat((f * 2000.0).round() as usize);
        println!("{x:>7.1} {f:>10.3e} {bar}");
    }
    Ok(out)
}

fn main() -> superpilot::Result<()> {
    run_example()?;
    Ok(())
}
