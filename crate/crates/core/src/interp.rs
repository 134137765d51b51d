//! Local polynomial interpolation on scattered nodes.

use crate::scalar::Real;

/// Indices of the `count` nodes nearest to `x`, as a contiguous window of
/// the ascending `nodes`. Ties go to the left neighbour.
pub(crate) fn nearest_window<T: Real>(nodes: &[T], x: T, count: usize) -> (usize, usize) {
    let len = nodes.len();
    let count = count.min(len);
    let right_start = nodes.partition_point(|&v| v < x);
    let (mut lo, mut hi) = (right_start, right_start);
    while hi - lo < count {
        let take_left = if lo == 0 {
            false
        } else if hi == len {
            true
        } else {
            x - nodes[lo - 1] <= nodes[hi] - x
        };
        if take_left {
            lo -= 1;
        } else {
            hi += 1;
        }
    }
    (lo, hi)
}

/// Lagrange form through `(xs[i], ys[i])`, exact at the nodes.
pub(crate) fn lagrange_eval<T: Real>(xs: &[T], ys: &[T], x: T) -> T {
    if let Some(i) = xs.iter().position(|&xi| xi == x) {
        return ys[i];
    }
    let mut sum = T::zero();
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        let mut w = T::one();
        for (k, &xk) in xs.iter().enumerate() {
            if k != i {
                w = w * (x - xk) / (xi - xk);
            }
        }
        sum = sum + w * yi;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_selection() {
        let nodes = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(nearest_window(&nodes, 2.2, 2), (2, 4));
        assert_eq!(nearest_window(&nodes, 1.5, 2), (1, 3));
        assert_eq!(nearest_window(&nodes, -1.0, 3), (0, 3));
        assert_eq!(nearest_window(&nodes, 9.0, 3), (2, 5));
        assert_eq!(nearest_window(&nodes, 2.0, 3), (1, 4));
        assert_eq!(nearest_window(&nodes, 2.0, 9), (0, 5));
    }

    #[test]
    fn reproduces_cubic() {
        let xs = [0.1, 0.4, 0.5, 0.9];
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
        let ys: Vec<f64> = xs.iter().map(|&x| p(x)).collect();
        for x in [-0.5, 0.0, 0.3, 1.7] {
            assert!((lagrange_eval(&xs, &ys, x) - p(x)).abs() < 1e-12);
        }
        assert_eq!(lagrange_eval(&xs, &ys, 0.4), ys[1]);
    }
}
