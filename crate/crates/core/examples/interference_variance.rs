// Residual interference variance of SP as the pilot fraction moves, with its
// six trace terms, against the RP variance for every pilot length.

use superpilot::analysis::{sigma_v2_rp, sigma_v2_sp, trace_terms_sp};

/// Returns `(alpha, sigma_v2)` pairs for SP.
pub fn run_example() -> Vec<(f64, f64)> {
    let (k, l, n, p, s2) = (40, 30, 60, 1.0, 1.0);
    println!("SP, K={k} L={l} N={n} P={p}");
    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10} {:>10}", "alpha", "sigma_v2", "r1", "r2", "r3", "r4", "r5", "r6");
    let mut rows = Vec::new();
    for i in 1..10 {
        let alpha = i as f64 / 10.0;
        let v = sigma_v2_sp(alpha, p, k, l, s2);
        let t = trace_terms_sp(alpha, p, k, l, n, s2);
        println!(
            "{alpha:>6.1} {v:>10.4} {:>10.1} {:>10.1} {:>10.1} {:>10.1} {:>10.1} {:>10.1}",
            t.tr_r1, t.tr_r2, t.tr_r3, t.tr_r4, t.tr_r5, t.tr_r6
        );
        rows.push((alpha, v));
    }
    println!("\nRP, same system");
    for lp in [1, 5, 10, 15, 20, 29] {
        println!("  Lp={lp:>2}  sigma_v2 = {:.4}", sigma_v2_rp(p, k, lp, s2));
    }
    rows
}

fn main() {
    run_example();
}
