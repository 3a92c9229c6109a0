//! Non-orthogonal DFT-phase pilot matrices that meet the Welch bound with equality.
//!
//! Row `k` (user) and column `n` (symbol) hold `exp(-2πj·k·n/K)` with zero-based
//! indices. Rows are not normalised: each has squared norm equal to the pilot
//! length, and for `len <= K` the columns are orthogonal with `Φ^H Φ = K·I`.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct PilotMatrix {
    entries: CMatrix,
}

/// Phase `exp(-2πj·(k·n mod K)/K)`; reducing the integer product first keeps every
/// phase an exact rational multiple of 2π in `[0, 2π)`.
fn dft_phase(k: usize, n: usize, users: usize) -> Complex64 {
    let r = ((k as u128 * n as u128) % users as u128) as f64;
    Complex64::from_polar(1.0, -2.0 * PI * r / users as f64)
}

/// MWBE pilots for `users` users and `len` symbols.
pub fn gen_mwbe_pilots(users: usize, len: usize) -> Result<PilotMatrix> {
    if users == 0 || len == 0 {
        return Err(Error::Dimension(format!(
            "pilot matrix needs K >= 1 and len >= 1 (got K={users}, len={len})"
        )));
    }
    if len > users {
        return Err(Error::Dimension(format!(
            "pilot length {len} exceeds user count {users}; columns would no longer be orthogonal"
        )));
    }
    Ok(PilotMatrix {
        entries: CMatrix::from_fn(users, len, |k, n| dft_phase(k, n, users)),
    })
}

impl PilotMatrix {
    pub fn users(&self) -> usize {
        self.entries.nrows()
    }

    pub fn len(&self) -> usize {
        self.entries.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Pilots for the regular scheme: the first `lp` columns.
    pub fn truncate(&self, lp: usize) -> Result<PilotMatrix> {
        if lp == 0 || lp > self.len() {
            return Err(Error::Dimension(format!(
                "cannot truncate a length-{} pilot to {lp}",
                self.len()
            )));
        }
        Ok(PilotMatrix {
            entries: self.entries.columns(0, lp).into_owned(),
        })
    }

    /// `Φ Φ^H` (K x K), entry `(i, j) = Σ_n exp(-2πj·(i-j)·n/K)`.
    ///
    /// Summed from exact phases rather than multiplied out, so the diagonal is
    /// exactly `len`.
    pub fn gram_rows(&self) -> CMatrix {
        let (k, len) = (self.users(), self.len());
        let by_offset: Vec<Complex64> = (0..k)
            .map(|d| (0..len).map(|n| dft_phase(d, n, k)).sum())
            .collect();
        CMatrix::from_fn(k, k, |i, j| by_offset[(i + k - j) % k])
    }

    /// `Φ^H Φ` (len x len); equals `K·I` for valid pilots.
    pub fn gram_columns(&self) -> CMatrix {
        self.entries.adjoint() * &self.entries
    }

    /// CSV dump, one row per user, two columns (re, im) per entry.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let header: Vec<String> = (0..self.len())
            .flat_map(|n| [format!("re{n}"), format!("im{n}")])
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for k in 0..self.users() {
            let row: Vec<String> = (0..self.len())
                .flat_map(|n| {
                    let z = self.entries[(k, n)];
                    [format!("{:.16e}", z.re), format!("{:.16e}", z.im)]
                })
                .collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Row Gram matrix `Φ Φ^H`.
pub fn gram_rows(p: &PilotMatrix) -> CMatrix {
    p.gram_rows()
}
