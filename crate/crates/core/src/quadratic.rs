//! Real roots of `a x^2 + b x + c` without catastrophic cancellation.

/// Real roots in increasing order. Degenerate (linear) inputs yield at most
/// one root; a double root is reported once.
pub fn real_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a == 0.0 {
        if b == 0.0 {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Vec::new();
    }
    if disc == 0.0 {
        return vec![-0.5 * b / a];
    }
    // q carries the sign of b so the two terms never cancel.
    let q = -0.5 * (b + disc.sqrt().copysign(b));
    let r0 = q / a;
    let r1 = if q != 0.0 { c / q } else { -r0 };
    if r0 <= r1 {
        vec![r0, r1]
    } else {
        vec![r1, r0]
    }
}

pub fn eval(a: f64, b: f64, c: f64, x: f64) -> f64 {
    (a * x + b) * x + c
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_roots() {
        assert_eq!(real_roots(1.0, -3.0, 2.0), vec![1.0, 2.0]);
        assert_eq!(real_roots(1.0, 2.0, 1.0), vec![-1.0]);
        assert!(real_roots(1.0, 0.0, 1.0).is_empty());
        assert_eq!(real_roots(0.0, 2.0, -1.0), vec![0.5]);
        assert!(real_roots(0.0, 0.0, 1.0).is_empty());
    }

    #[test]
    fn small_root_keeps_precision() {
        // x^2 - 1e8 x + 1 has a root near 1e-8; the textbook formula loses it.
        let r = real_roots(1.0, -1e8, 1.0);
        assert!((r[0] - 1e-8).abs() / 1e-8 < 1e-12);
        assert!(eval(1.0, -1e8, 1.0, r[0]).abs() < 1e-7);
    }

    #[test]
    fn spread_coefficients() {
        let r = real_roots(0.008, 0.412, -0.32);
        for x in r {
            assert!(eval(0.008, 0.412, -0.32, x).abs() < 1e-12);
        }
    }
}
