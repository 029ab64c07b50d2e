//! Real roots of small polynomials by derivative-based isolation and
//! bisection.

/// Polynomial with real coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.degree() == 0 {
            return Polynomial::new(vec![0.0]);
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Cauchy bound: every root satisfies `|x| < 1 + max |c_k / c_n|`.
    pub fn root_bound(&self) -> f64 {
        let lead = *self.coeffs.last().unwrap();
        1.0 + self.coeffs[..self.degree()]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max)
    }

    /// All distinct real roots, ascending.
    ///
    /// Between consecutive critical points the polynomial is monotone, so
    /// each such interval brackets at most one root; roots of the
    /// derivative come from the same procedure one degree down.
    pub fn real_roots(&self) -> Vec<f64> {
        if self.degree() == 0 {
            return Vec::new();
        }
        let bound = self.root_bound();
        self.roots_in(-bound, bound)
    }

    fn roots_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        if self.degree() == 0 {
            return Vec::new();
        }
        let mut knots = vec![lo];
        knots.extend(
            self.derivative()
                .roots_in(lo, hi)
                .into_iter()
                .filter(|&c| c > lo && c < hi),
        );
        knots.push(hi);

        let mut roots: Vec<f64> = Vec::new();
        for w in knots.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (self.eval(a), self.eval(b));
            let root = if fa == 0.0 {
                Some(a)
            } else if fb == 0.0 {
                Some(b)
            } else if fa.signum() != fb.signum() {
                Some(bisect(|x| self.eval(x), a, b))
            } else {
                None
            };
            if let Some(r) = root {
                if roots.last().is_none_or(|&last| last != r) {
                    roots.push(r);
                }
            }
        }
        roots
    }
}

/// Bisection to full double precision on a sign-changing bracket.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    debug_assert!(f_lo.signum() != f(hi).signum());
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn evaluates_by_horner() {
        let p = Polynomial::new(vec![1.0, -3.0, 0.0, 2.0]);
        assert_eq!(p.eval(2.0), 11.0);
        assert_eq!(p.derivative().coeffs(), &[-3.0, 0.0, 6.0]);
    }

    #[test]
    fn finds_all_roots_of_a_product() {
        // (x + 2)(x - 0.5)(x - 3)(x - 7)
        let roots = [-2.0, 0.5, 3.0, 7.0];
        let mut coeffs = vec![1.0];
        for r in roots {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= r * c;
            }
            coeffs = next;
        }
        let found = Polynomial::new(coeffs).real_roots();
        assert_eq!(found.len(), 4);
        for (f, r) in found.iter().zip(roots) {
            assert_abs_diff_eq!(*f, r, epsilon = 1e-12);
        }
    }

    #[test]
    fn no_real_roots() {
        assert!(Polynomial::new(vec![1.0, 0.0, 1.0]).real_roots().is_empty());
        assert!(Polynomial::new(vec![3.0]).real_roots().is_empty());
    }

    #[test]
    fn double_root_touching_zero() {
        let roots = Polynomial::new(vec![1.0, -2.0, 1.0]).real_roots();
        assert_eq!(roots.len(), 1);
        assert_abs_diff_eq!(roots[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bisect_converges_to_sqrt2() {
        assert_abs_diff_eq!(bisect(|x| x * x - 2.0, 0.0, 2.0), 2f64.sqrt(), epsilon = 1e-15);
    }
}
