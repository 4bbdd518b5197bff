//! Scalar special functions behind the dressed tunneling elements.
//!
//! The displacement-operator matrix elements between Fock states are
//! associated Laguerre polynomials times a Gaussian in the dimensionless
//! coupling `alpha`. Everything here is a pure function.

use crate::error::{Error, Result};

/// Arguments of the dressing factor `Xi_j^l(alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressingArgs {
    /// Laguerre superscript, i.e. the Fock-index offset.
    pub l: usize,
    /// Lower Fock index.
    pub j: usize,
    /// Dimensionless coupling; `(2g/Omega)^2` for matrix elements,
    /// `(g/Omega)^2` for displaced-state expansions.
    pub alpha: f64,
}

impl DressingArgs {
    pub fn new(l: usize, j: usize, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::Domain(format!("alpha must be finite and >= 0, got {alpha}")));
        }
        Ok(Self { l, j, alpha })
    }
}

/// Associated Laguerre polynomial `L_n^l(x)` by upward recurrence in `n`.
pub fn laguerre(n: usize, l: usize, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("laguerre argument must be finite, got {x}")));
    }
    Ok(laguerre_unchecked(n, l, x))
}

pub(crate) fn laguerre_unchecked(n: usize, l: usize, x: f64) -> f64 {
    let lf = l as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + lf - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + lf + 1.0 - x) * cur - (kf + lf) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `Xi_j^l(alpha) = alpha^{l/2} sqrt(j!/(j+l)!) L_j^l(alpha) e^{-alpha/2}`.
///
/// The prefactor is accumulated in log space as a product of `l` reciprocal
/// factors, so arguments with `j + l` in the hundreds do not overflow.
pub fn dressing_xi(args: DressingArgs) -> f64 {
    xi(args.l, args.j, args.alpha)
}

pub(crate) fn xi(l: usize, j: usize, alpha: f64) -> f64 {
    let lag = laguerre_unchecked(j, l, alpha);
    if alpha == 0.0 {
        // 0^0 = 1; any positive power of zero kills the element
        return if l == 0 { lag } else { 0.0 };
    }
    let mut log_pref = 0.5 * l as f64 * alpha.ln() - 0.5 * alpha;
    for i in 1..=l {
        log_pref -= 0.5 * ((j + i) as f64).ln();
    }
    lag * log_pref.exp()
}

/// Dressed tunneling element `Delta_j^{j'}` between displaced states.
///
/// Sign convention: `[sign(j'-j)]^{|j'-j|}` with `sign(0) = +1`, so the
/// diagonal element is `Delta * L_j^0(alpha) * e^{-alpha/2}`.
pub fn dressed_delta(j: usize, jp: usize, delta: f64, alpha: f64) -> f64 {
    let (lo, offset) = if jp >= j { (j, jp - j) } else { (jp, j - jp) };
    let magnitude = delta * xi(offset, lo, alpha);
    if jp < j && offset % 2 == 1 {
        -magnitude
    } else {
        magnitude
    }
}

/// Real value of `gamma + ln(-alpha) + Gamma(0, -alpha)`, i.e. the entire
/// function `Ein` at `-alpha`: `-sum_{k>=1} alpha^k / (k k!)`.
pub fn ein_neg(alpha: f64) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    // alpha^k / k!
    let mut power = 1.0;
    let mut k = 1usize;
    loop {
        power *= alpha / k as f64;
        let term = power / k as f64;
        sum += term;
        if term < 1e-16 * sum {
            break;
        }
        k += 1;
    }
    -sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn laguerre_low_orders() {
        for l in 0..5 {
            assert_eq!(laguerre(0, l, 3.7).unwrap(), 1.0);
        }
        assert_eq!(laguerre(1, 0, 4.0).unwrap(), -3.0);
        assert_eq!(laguerre(2, 0, 4.0).unwrap(), 1.0);
    }

    #[test]
    fn laguerre_cubic_root() {
        let cubic = |x: f64| 1.0 - 3.0 * x + 1.5 * x * x - x * x * x / 6.0;
        let root = bisect(cubic, 0.0, 1.0);
        assert_relative_eq!(root, 0.415_774_556_783_479, epsilon = 1e-12);
        assert!(laguerre(3, 0, root).unwrap().abs() < 1e-14);
    }

    #[test]
    fn laguerre_rejects_nan() {
        assert!(matches!(laguerre(2, 1, f64::NAN), Err(Error::Domain(_))));
        assert!(laguerre(2, 1, f64::INFINITY).is_err());
    }

    #[test]
    fn xi_examples() {
        for j in 0..20 {
            assert_eq!(dressing_xi(DressingArgs { l: 0, j, alpha: 0.0 }), 1.0);
        }
        for &a in &[0.1, 1.0, 4.0, 9.0] {
            let v = dressing_xi(DressingArgs { l: 1, j: 0, alpha: a });
            assert_relative_eq!(v, a.sqrt() * (-a / 2.0).exp(), max_relative = 1e-14);
        }
        let v = dressing_xi(DressingArgs { l: 0, j: 1, alpha: 4.0 });
        assert_relative_eq!(v, -3.0 * (-2.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(v, -0.406_005_849_709_838, max_relative = 1e-12);
    }

    #[test]
    fn xi_large_indices_finite() {
        let v = xi(150, 150, 60.0);
        assert!(v.is_finite());
        assert!(v.abs() <= 1.0);
        for j in 0..=10 {
            assert!(xi(0, j, 200.0).abs() < 1e-20);
        }
    }

    #[test]
    fn dressing_args_validate() {
        assert!(DressingArgs::new(1, 2, -0.1).is_err());
        assert!(DressingArgs::new(1, 2, f64::NAN).is_err());
        assert!(DressingArgs::new(1, 2, 0.3).is_ok());
    }

    #[test]
    fn dressed_delta_examples() {
        for j in 0..10 {
            assert_eq!(dressed_delta(j, j, 0.7, 0.0), 0.7);
        }
        let a: f64 = 2.3;
        let expect = 0.7 * a.sqrt() * (-a / 2.0).exp();
        assert_relative_eq!(dressed_delta(0, 1, 0.7, a), expect, max_relative = 1e-14);
        assert_relative_eq!(dressed_delta(1, 0, 0.7, a), -expect, max_relative = 1e-14);
        assert_eq!(dressed_delta(1, 1, 0.7, 1.0), 0.0);
    }

    #[test]
    fn dressed_delta_antisymmetry() {
        for &a in &[0.1, 1.0, 4.0, 9.0] {
            for j in 0..=40 {
                for jp in 0..=40 {
                    let lhs = dressed_delta(j, jp, 1.0, a);
                    let d = (j as i64 - jp as i64).unsigned_abs();
                    let sign = if d % 2 == 1 { -1.0 } else { 1.0 };
                    let rhs = sign * dressed_delta(jp, j, 1.0, a);
                    assert!((lhs - rhs).abs() <= 1e-14, "j={j} jp={jp} a={a}");
                }
            }
        }
    }

    #[test]
    fn ein_neg_values() {
        assert_eq!(ein_neg(0.0), 0.0);
        // oracle: partial sums of -sum 1/(k k!) until they stop changing
        let mut oracle = 0.0f64;
        let mut fact = 1.0f64;
        for k in 1..40 {
            fact *= k as f64;
            oracle -= 1.0 / (k as f64 * fact);
        }
        assert_relative_eq!(ein_neg(1.0), oracle, max_relative = 1e-15);
        assert_relative_eq!(ein_neg(1.0), -1.317_902_151_454_404, max_relative = 1e-12);
        let mut prev = 0.0;
        for i in 1..100 {
            let v = ein_neg(i as f64 * 0.2);
            assert!(v < prev);
            prev = v;
        }
    }

    proptest! {
        #[test]
        fn laguerre_recurrence_residual(n in 1usize..30, l in 1usize..10, x in 0.0f64..50.0) {
            // x L_n^{l+1} = (n+l+1) L_n^l - (n+1) L_{n+1}^l
            let lhs = x * laguerre(n, l + 1, x).unwrap();
            let rhs = (n + l + 1) as f64 * laguerre(n, l, x).unwrap()
                - (n + 1) as f64 * laguerre(n + 1, l, x).unwrap();
            let scale = lhs.abs().max(rhs.abs()).max(1.0);
            prop_assert!((lhs - rhs).abs() < 1e-10 * scale);
            // L_n^l = L_n^{l+1} - L_{n-1}^{l+1}
            let a = laguerre(n, l, x).unwrap();
            let b = laguerre(n, l + 1, x).unwrap() - laguerre(n - 1, l + 1, x).unwrap();
            prop_assert!((a - b).abs() < 1e-10 * a.abs().max(b.abs()).max(1.0));
        }
    }
}
