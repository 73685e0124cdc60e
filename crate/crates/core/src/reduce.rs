//! Order-fixed parallel summation.
//!
//! The tree shape depends only on the input length, so the floating-point
//! result is bit-identical for any number of rayon workers.

const LEAF: usize = 256;

/// Pairwise sum of `f(i)` for `i` in `0..len`.
pub fn tree_sum<F>(len: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    sum_range(0, len, f)
}

fn sum_range<F>(lo: usize, hi: usize, f: &F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    if hi - lo <= LEAF {
        let mut s = 0.0;
        for i in lo..hi {
            s += f(i);
        }
        return s;
    }
    let mid = lo + (hi - lo) / 2;
    let (a, b) = rayon::join(|| sum_range(lo, mid, f), || sum_range(mid, hi, f));
    a + b
}
