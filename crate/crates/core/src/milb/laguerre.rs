/// Generalized Laguerre polynomial `La_m^{(r)}(x)` by the three-term recurrence
/// `(j+1) La_{j+1} = (2j + 1 + r - x) La_j - (j + r) La_{j-1}`.
pub fn laguerre(m: usize, r: usize, x: f64) -> f64 {
    let r = r as f64;
    let mut prev = 1.0;
    if m == 0 {
        return prev;
    }
    let mut cur = 1.0 + r - x;
    for j in 1..m {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + r - x) * cur - (jf + r) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `La_0^{(r)}(x), ..., La_{count-1}^{(r)}(x)` in one pass.
pub fn laguerre_all(count: usize, r: usize, x: f64, out: &mut Vec<f64>) {
    out.clear();
    if count == 0 {
        return;
    }
    let r = r as f64;
    out.push(1.0);
    if count == 1 {
        return;
    }
    out.push(1.0 + r - x);
    for j in 1..count - 1 {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + r - x) * out[j] - (jf + r) * out[j - 1]) / (jf + 1.0);
        out.push(next);
    }
}
