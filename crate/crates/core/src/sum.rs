//! Deterministic floating-point reductions.
//!
//! Every norm and quadrature sum in the crate goes through [`pairwise_sum`],
//! which splits the input in halves down to blocks of eight and adds the
//! blocks left to right. The result depends only on the input order, never
//! on the rayon thread count.

const BLOCK: usize = 8;

pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Pairwise sum of `f(i)` for `i in 0..n`, without materializing the terms.
pub fn pairwise_sum_by(n: usize, f: &impl Fn(usize) -> f64) -> f64 {
    fn go(lo: usize, hi: usize, f: &impl Fn(usize) -> f64) -> f64 {
        if hi - lo <= BLOCK {
            return (lo..hi).map(f).sum();
        }
        let mid = lo + (hi - lo) / 2;
        go(lo, mid, f) + go(mid, hi, f)
    }
    go(0, n, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_naive_sum_on_integers() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
        assert_eq!(pairwise_sum_by(1000, &|i| i as f64), 499_500.0);
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn both_forms_agree_bitwise() {
        let v: Vec<f64> = (0..777).map(|i| (i as f64 * 0.37).sin() / 3.0).collect();
        assert_eq!(pairwise_sum(&v).to_bits(), pairwise_sum_by(v.len(), &|i| v[i]).to_bits());
    }
}
