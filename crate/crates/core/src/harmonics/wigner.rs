//! Wigner small-d matrices.
//!
//! Convention: `d^l_{mn}(theta) = <l m| exp(-i theta J_y) |l n>`, and matrix
//! row `i` holds `m = l - i`, column `j` holds `n = l - j` (spins in
//! descending order). The full SU(2) matrix coefficient in zyz Euler angles
//! is `D^l_{mn}(phi, theta, psi) = exp(-i m phi) d^l_{mn}(theta) exp(-i n psi)`.
//!
//! Entries are generated by the three-term recursion in `l` at fixed
//! `(m, n)`, seeded at `l = max(|m|, |n|)` where the explicit sum has a
//! single term. Factorial sums are never evaluated beyond that seed, so the
//! matrices stay accurate well past `l = 64`.

use crate::error::{Error, Result};

/// Largest spin (doubled) accepted by [`wigner_d`].
pub const MAX_TWO_L: u32 = 512;

fn ln_factorial(k: i64) -> f64 {
    debug_assert!(k >= 0);
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// `d^l_{mn}(theta)` at `l = max(|m|, |n|)`, all arguments doubled.
fn seed(two_m: i32, two_n: i32, theta: f64) -> f64 {
    let two_l = two_m.abs().max(two_n.abs());
    let (jm, jn) = (two_l as i64, two_m as i64);
    // integer combinations j +- m, j +- n
    let j_plus_m = (jm + jn) / 2;
    let j_minus_m = (jm - jn) / 2;
    let j_plus_n = (jm + two_n as i64) / 2;
    let j_minus_n = (jm - two_n as i64) / 2;
    let m_minus_n = (two_m as i64 - two_n as i64) / 2;

    let s_lo = 0.max(-m_minus_n);
    let s_hi = j_plus_n.min(j_minus_m);
    debug_assert_eq!(s_lo, s_hi, "seed must be a single-term sum");
    let s = s_lo;

    let half = 0.5 * theta;
    let (c, sn) = (half.cos(), half.sin());
    let cos_pow = j_plus_n + j_minus_m - 2 * s;
    let sin_pow = m_minus_n + 2 * s;

    let ln_coef = 0.5
        * (ln_factorial(j_plus_m) + ln_factorial(j_minus_m) + ln_factorial(j_plus_n) + ln_factorial(j_minus_n))
        - ln_factorial(j_plus_n - s)
        - ln_factorial(s)
        - ln_factorial(m_minus_n + s)
        - ln_factorial(j_minus_m - s);

    let mut value = ln_coef.exp();
    value *= power(c, cos_pow);
    value *= power(sn, sin_pow);
    if (m_minus_n + s) % 2 != 0 {
        value = -value;
    }
    value
}

fn power(base: f64, exp: i64) -> f64 {
    if exp == 0 {
        1.0
    } else {
        base.powi(exp as i32)
    }
}

/// Runs the `l`-recursion for fixed doubled `(m, n)` and returns
/// `d^l_{mn}(theta)` for `two_l = max(|2m|, |2n|), ... , two_l_max` in steps of two.
pub(crate) fn d_over_l(two_m: i32, two_n: i32, two_l_max: u32, theta: f64) -> Vec<f64> {
    let two_l0 = two_m.abs().max(two_n.abs()) as u32;
    if two_l0 > two_l_max {
        return Vec::new();
    }
    let count = ((two_l_max - two_l0) / 2 + 1) as usize;
    let mut out = Vec::with_capacity(count);
    out.push(seed(two_m, two_n, theta));

    let m = two_m as f64 / 2.0;
    let n = two_n as f64 / 2.0;
    let cos_t = theta.cos();
    let mut prev = 0.0;
    for step in 0..count - 1 {
        let l = (two_l0 as f64) / 2.0 + step as f64;
        let cur = out[step];
        let l1 = l + 1.0;
        let lead = l1 * (2.0 * l + 1.0) / ((l1 * l1 - m * m) * (l1 * l1 - n * n)).sqrt();
        let mn_term = if m == 0.0 || n == 0.0 { 0.0 } else { m * n / (l * l1) };
        let back = if step == 0 {
            0.0
        } else {
            ((l * l - m * m) * (l * l - n * n)).sqrt() / (l * (2.0 * l + 1.0))
        };
        let next = lead * ((cos_t - mn_term) * cur - back * prev);
        prev = cur;
        out.push(next);
    }
    out
}

/// Wigner small-d matrix of spin `two_l / 2`, row-major, `(two_l + 1)^2` entries.
pub fn wigner_d(two_l: u32, theta: f64) -> Result<Vec<f64>> {
    if two_l > MAX_TWO_L {
        return Err(Error::OutOfRange(format!(
            "spin {}/2 exceeds the supported band (max {}/2)",
            two_l, MAX_TWO_L
        )));
    }
    let dim = two_l as usize + 1;
    let mut out = vec![0.0; dim * dim];
    let l = two_l as i32;
    for row in 0..dim {
        let two_m = l - 2 * row as i32;
        for col in 0..dim {
            let two_n = l - 2 * col as i32;
            let column = d_over_l(two_m, two_n, two_l, theta);
            out[row * dim + col] = *column.last().expect("l >= max(|m|,|n|)");
        }
    }
    Ok(out)
}

/// Small-d matrices for every spin up to `two_l_max`, evaluated at each angle.
///
/// Result is indexed `[two_l][(angle * dim + row) * dim + col]`.
pub(crate) fn d_tables(two_l_max: u32, thetas: &[f64]) -> Vec<Vec<f64>> {
    let mut tables: Vec<Vec<f64>> = (0..=two_l_max)
        .map(|two_l| {
            let dim = two_l as usize + 1;
            vec![0.0; dim * dim * thetas.len()]
        })
        .collect();
    let bound = two_l_max as i32;
    for (a, &theta) in thetas.iter().enumerate() {
        for two_m in -bound..=bound {
            for two_n in -bound..=bound {
                if (two_m - two_n) % 2 != 0 {
                    continue;
                }
                let two_l0 = two_m.abs().max(two_n.abs());
                for (step, value) in d_over_l(two_m, two_n, two_l_max, theta).into_iter().enumerate() {
                    let two_l = two_l0 + 2 * step as i32;
                    let dim = two_l as usize + 1;
                    let row = ((two_l - two_m) / 2) as usize;
                    let col = ((two_l - two_n) / 2) as usize;
                    tables[two_l as usize][(a * dim + row) * dim + col] = value;
                }
            }
        }
    }
    tables
}
