//! Join probabilities between consecutive blocks of a uniformly sampled column.

/// Presence probability stored with `ln(1 - p)` so that composition and
/// powers of `1 - p` keep their relative precision near both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Prob {
    pub p: f64,
    pub ln_q: f64,
}

impl Prob {
    pub fn new(p: f64) -> Self {
        Prob { p, ln_q: (-p).ln_1p() }
    }

    /// `(1 - p)^n`.
    pub fn q_pow(self, n: f64) -> f64 {
        if n == 0.0 {
            1.0
        } else {
            (self.ln_q * n).exp()
        }
    }

    /// Probability that a block of `n` candidates is non-empty.
    pub fn block(self, n: f64) -> Prob {
        let ln_q = if n == 0.0 { 0.0 } else { self.ln_q * n };
        Prob { p: -ln_q.exp_m1(), ln_q }
    }
}

/// `1 - (1 - p)^n`.
pub fn rho(n: f64, p: f64) -> f64 {
    Prob::new(p).block(n).p
}

pub(crate) fn p_dd_at(n: f64, pr: Prob) -> f64 {
    if pr.p == 0.0 {
        return 1.0 / n;
    }
    let r = pr.block(n).p;
    let ratio = pr.p / r;
    n * ratio * ratio * pr.q_pow(n - 1.0)
}

pub(crate) fn p_ud_at(n: f64, pr: Prob) -> f64 {
    if pr.p == 0.0 {
        return 1.0 / n;
    }
    let r = pr.block(n).p;
    (pr.p / r) * (2.0 - r) / (2.0 - pr.p)
}

pub(crate) fn lambda_at(n: f64, pr: Prob) -> f64 {
    let r = pr.block(n);
    (p_ud_at(n, pr) + r.q_pow(1.0) * p_dd_at(n, pr)) / (2.0 - r.p)
}

/// Probability that two consecutive non-empty blocks of size `n` join when
/// both are listed in ascending order.
///
/// At `p = 0` the limit `1/n` is returned; at `p = 1` the value is 0 for
/// `n >= 2` and 1 for `n = 1`.
pub fn p_dd(n: f64, p: f64) -> f64 {
    p_dd_at(n, Prob::new(p))
}

/// Join probability when the second block is listed in reverse.
pub fn p_ud(n: f64, p: f64) -> f64 {
    p_ud_at(n, Prob::new(p))
}

/// Average join probability in a reflected Gray column, mixing reversals
/// with same-direction joins across an empty block.
pub fn lambda_reflected(n: f64, p: f64) -> f64 {
    lambda_at(n, Prob::new(p))
}

pub(crate) fn joins_lexico_at(n1: f64, n2: f64, pr: Prob) -> f64 {
    let r = pr.block(n2);
    let all_empty = if n1 == 0.0 { 0.0 } else { (r.ln_q * n1).exp_m1() };
    p_dd_at(n2, pr) * (r.p * n1 + all_empty)
}

pub(crate) fn joins_reflected_at(n1: f64, n2: f64, pr: Prob) -> f64 {
    lambda_at(n2, pr) * pr.block(n2).p * n1
}

/// Expected seamless joins in the second column of `n1` blocks of `n2`
/// candidates under lexicographic order. Exact for finite `n1`.
pub fn expected_joins_lexico(n1: f64, n2: f64, p: f64) -> f64 {
    joins_lexico_at(n1, n2, Prob::new(p))
}

/// Same for reflected Gray order, using the long-column approximation. The
/// result is within one join of the exact expectation.
pub fn expected_joins_reflected(n1: f64, n2: f64, p: f64) -> f64 {
    joins_reflected_at(n1, n2, Prob::new(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    fn grid() -> impl Iterator<Item = f64> {
        (1..100).map(|i| f64::from(i) / 100.0)
    }

    // Exact reflected joins: sum over the number of empty blocks between two
    // present ones. An even gap means the second block runs the other way.
    fn exact_reflected(n1: u32, n2: f64, p: f64) -> f64 {
        let r = rho(n2, p);
        let (ud, dd) = (p_ud(n2, p), p_dd(n2, p));
        let mut s = 0.0;
        for k in 0..=n1 / 2 {
            let odd = f64::from(n1) - 1.0 - 2.0 * f64::from(k);
            if odd > 0.0 {
                s += ud * r * r * odd * (1.0 - r).powi(2 * k as i32);
            }
            let even = f64::from(n1) - 2.0 - 2.0 * f64::from(k);
            if even > 0.0 {
                s += dd * r * r * even * (1.0 - r).powi(2 * k as i32 + 1);
            }
        }
        s
    }

    #[test]
    fn rho_values() {
        assert_eq!(rho(7.0, 1.0), 1.0);
        assert!(close(rho(2.0, 0.5), 0.75, 1e-15));
        for n2 in 1..8 {
            for n3 in 1..8 {
                for p in grid() {
                    let a = rho(f64::from(n2 * n3), p);
                    let b = rho(f64::from(n2), rho(f64::from(n3), p));
                    assert!(close(a, b, 1e-13), "{n2} {n3} {p}");
                }
            }
        }
    }

    #[test]
    fn block_probabilities() {
        assert!(close(p_dd(2.0, 0.5), 4.0 / 9.0, 1e-15));
        assert!(close(p_ud(2.0, 0.5), 5.0 / 9.0, 1e-15));
        assert!(close(lambda_reflected(2.0, 0.5), 8.0 / 15.0, 1e-15));
        for p in grid() {
            assert!(close(p_dd(1.0, p), 1.0, 1e-14));
            assert!(close(p_ud(1.0, p), 1.0, 1e-14));
            assert!(close(lambda_reflected(1.0, p), 1.0, 1e-14));
        }
    }

    #[test]
    fn sweeps_stay_in_range() {
        for n in 2..=30 {
            let n = f64::from(n);
            for p in grid() {
                let (dd, ud) = (p_dd(n, p), p_ud(n, p));
                assert!((0.0..=1.0).contains(&dd));
                assert!((0.0..=1.0).contains(&ud));
                assert!(ud >= dd, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn endpoint_limits() {
        for n in [1.0, 2.0, 17.0] {
            assert!(close(p_dd(n, 0.0), 1.0 / n, 1e-15));
            assert!(close(p_dd(n, 1e-12), 1.0 / n, 1e-9));
            assert!(close(p_ud(n, 1e-12), 1.0 / n, 1e-9));
            assert!(close(lambda_reflected(n, 1e-12), 1.0 / n, 1e-9));
            assert_eq!(p_ud(n, 1.0), 1.0);
            assert_eq!(lambda_reflected(n, 1.0), 1.0);
        }
        assert_eq!(p_dd(1.0, 1.0), 1.0);
        assert_eq!(p_dd(5.0, 1.0), 0.0);
        assert!(p_dd(1e6, 1e-9).is_finite());
    }

    #[test]
    fn lexico_joins() {
        for p in grid() {
            assert!(expected_joins_lexico(1.0, 5.0, p).abs() < 1e-15);
            assert!(close(expected_joins_lexico(2.0, 1.0, p), p * p, 1e-13));
        }
    }

    #[test]
    fn reflected_joins_band() {
        for n1 in [1u32, 2, 5, 50, 400] {
            for n2 in [1.0, 2.0, 4.0, 30.0] {
                for p in grid() {
                    let approx = expected_joins_reflected(f64::from(n1), n2, p);
                    assert!((approx - exact_reflected(n1, n2, p)).abs() <= 1.0 + 1e-9, "{n1} {n2} {p}");
                }
            }
        }
        assert!(close(expected_joins_reflected(50.0, 1.0, 0.3), 15.0, 1e-13));
    }

    #[test]
    fn reflected_joins_near_complete() {
        let p = 1.0 - 1e-9;
        for (n1, n2) in [(3.0, 2.0), (6.0, 2.0), (10.0, 10.0)] {
            // Complete table: every block boundary in the second column joins.
            let complete = n1 - 1.0;
            assert!((expected_joins_reflected(n1, n2, p) - complete).abs() <= 1.0);
        }
    }
}
