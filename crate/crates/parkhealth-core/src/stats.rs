//! Statistical primitives shared by the scoring, equity and validation
//! modules: moments, correlation, ordinary least squares, and the Student t
//! machinery (log-gamma, regularized incomplete beta, Welch's test).
//!
//! Standard deviations and z-scores are population-level (divide by n); the
//! Welch test uses sample variances as usual. The incomplete beta follows
//! the classic Lentz continued-fraction evaluation and stays well below
//! 1e-10 relative error over the range exercised by the t tests.

use alloc::vec::Vec;

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation (divides by n).
pub fn population_std(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = mean(xs);
    let var = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64;
    libm::sqrt(var)
}

/// Population z-scores. Zero-variance input maps to all zeros instead of
/// dividing by zero.
pub fn zscores(xs: &[f64]) -> Vec<f64> {
    let m = mean(xs);
    let sd = population_std(xs);
    if sd == 0.0 || !sd.is_finite() {
        return alloc::vec![0.0; xs.len()];
    }
    xs.iter().map(|x| (x - m) / sd).collect()
}

/// Pearson correlation coefficient. `None` when there are fewer than two
/// points or either side has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    debug_assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return None;
    }
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some(sxy / libm::sqrt(sxx * syy))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub r_squared: f64,
}

/// Ordinary least squares fit of `y = intercept + slope * x`.
///
/// `None` when there are fewer than two points or x has no variance. A
/// perfectly flat y (zero total sum of squares) reports `r_squared = 1.0`
/// since the fitted line reproduces every observation.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    debug_assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return None;
    }
    let mx = mean(xs);
    let my = mean(ys);
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let e = y - (intercept + slope * x);
        ss_res += e * e;
        ss_tot += (y - my) * (y - my);
    }
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).max(0.0)
    } else {
        1.0
    };
    Some(LineFit { intercept, slope, r_squared })
}

// Lanczos coefficients, g = 7, n = 9.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    let pi = core::f64::consts::PI;
    if x < 0.5 {
        // Reflection: gamma(x) * gamma(1 - x) = pi / sin(pi x).
        libm::log(pi / libm::sin(pi * x)) - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut a = LANCZOS[0];
        let t = x + 7.5;
        for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        0.5 * libm::log(2.0 * pi) + (x + 0.5) * libm::log(t) - t + libm::log(a)
    }
}

/// Regularized incomplete beta function I_x(a, b) for a, b > 0.
pub fn inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = a * libm::log(x) + b * libm::log(1.0 - x)
        - (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b));
    let front = libm::exp(ln_front);
    // The continued fraction converges fast only below the crossover point;
    // above it, evaluate the mirrored tail instead.
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_cf(a, b, x) / a
    } else {
        1.0 - front * beta_cf(b, a, 1.0 - x) / b
    }
}

// Continued fraction for the incomplete beta (modified Lentz).
fn beta_cf(a: f64, b: f64, x: f64) -> f64 {
    const MAX_ITER: usize = 300;
    const EPS: f64 = 1e-15;
    const FPMIN: f64 = 1e-300;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// CDF of Student's t distribution with `df > 0` degrees of freedom.
pub fn t_cdf(t: f64, df: f64) -> f64 {
    debug_assert!(df > 0.0);
    let x = df / (df + t * t);
    let tail = 0.5 * inc_beta(0.5 * df, 0.5, x);
    if t < 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Welch {
    pub t: f64,
    pub df: f64,
    /// Two-sided p-value.
    pub p: f64,
}

/// Welch's two-sample t-test (unequal variances), two-sided.
///
/// `None` when either sample has fewer than two points. When both samples
/// are constant the p-value degenerates to 1 (equal means) or 0.
pub fn welch_t(a: &[f64], b: &[f64]) -> Option<Welch> {
    if a.len() < 2 || b.len() < 2 {
        return None;
    }
    let na = a.len() as f64;
    let nb = b.len() as f64;
    let ma = mean(a);
    let mb = mean(b);
    let va = a.iter().map(|x| (x - ma) * (x - ma)).sum::<f64>() / (na - 1.0);
    let vb = b.iter().map(|x| (x - mb) * (x - mb)).sum::<f64>() / (nb - 1.0);
    let sea = va / na;
    let seb = vb / nb;
    let se2 = sea + seb;
    if se2 <= 0.0 {
        let equal = ma == mb;
        return Some(Welch {
            t: if equal { 0.0 } else { f64::INFINITY * (ma - mb).signum() },
            df: na + nb - 2.0,
            p: if equal { 1.0 } else { 0.0 },
        });
    }
    let t = (ma - mb) / libm::sqrt(se2);
    let df = se2 * se2 / (sea * sea / (na - 1.0) + seb * seb / (nb - 1.0));
    // Two-sided: p = I_{df/(df+t^2)}(df/2, 1/2).
    let p = inc_beta(0.5 * df, 0.5, df / (df + t * t));
    Some(Welch { t, df, p })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    // Reference values generated by tools/gen_stat_oracles.py (mpmath, 50 dps).
    const T_CDF_PROBES: [(f64, f64, f64); 20] = [
        (0.00, 1.0, 0.5),
        (1.00, 1.0, 0.75),
        (-2.50, 1.0, 0.1211189415908434),
        (0.50, 2.0, 0.66666666666666667),
        (-6.00, 2.0, 0.013335736607712386),
        (1.70, 3.0, 0.90615467922329496),
        (-0.31, 3.0, 0.38842389891331814),
        (3.00, 5.0, 0.98495037605126871),
        (-1.00, 5.0, 0.18160873382456131),
        (0.25, 8.0, 0.59555627725323246),
        (4.20, 8.0, 0.99850174314945939),
        (-3.30, 12.0, 0.0031703750531435894),
        (2.00, 12.0, 0.96567249298095703),
        (-0.75, 20.0, 0.23099351240632899),
        (9.00, 20.0, 0.99999999097979191),
        (1.25, 30.0, 0.88951848789342168),
        (-2.00, 30.0, 0.027312522481491552),
        (0.10, 50.0, 0.53962789317351497),
        (-4.50, 50.0, 2.0360159702413561e-5),
        (2.75, 100.0, 0.99646293741330673),
    ];

    #[test]
    fn t_cdf_matches_high_precision_reference() {
        for &(t, df, expect) in &T_CDF_PROBES {
            assert_abs_diff_eq!(t_cdf(t, df), expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn ln_gamma_matches_reference() {
        let probes = [
            (0.5, 0.57236494292470009),
            (1.0, 0.0),
            (1.5, -0.12078223763524522),
            (2.0, 0.0),
            (3.7, 1.4280723266653881),
            (10.0, 12.80182748008147),
            (25.5, 56.389167643719947),
            (100.0, 359.1342053695754),
            (0.0001, 9.2102826586339622),
            (1e6, 12815504.569147612),
        ];
        for &(x, expect) in &probes {
            if expect == 0.0 {
                assert_abs_diff_eq!(ln_gamma(x), 0.0, epsilon = 1e-12);
            } else {
                assert_relative_eq!(ln_gamma(x), expect, max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn inc_beta_matches_reference() {
        let probes = [
            (0.5, 0.5, 0.3, 0.36901011956554538),
            (2.0, 3.0, 0.4, 0.52480000000000004),
            (5.0, 1.5, 0.9, 0.77617213431621567),
            (10.0, 10.0, 0.5, 0.5),
            (0.5, 8.0, 0.01, 0.30700785029418754),
            (40.0, 0.5, 0.99, 0.37138602325398446),
        ];
        for &(a, b, x, expect) in &probes {
            assert_relative_eq!(inc_beta(a, b, x), expect, max_relative = 1e-12);
        }
    }

    #[test]
    fn inc_beta_symmetry_and_bounds() {
        for &(a, b, x) in &[(1.5, 4.0, 0.2), (7.0, 2.5, 0.66), (3.0, 3.0, 0.5)] {
            let lhs = inc_beta(a, b, x);
            let rhs = 1.0 - inc_beta(b, a, 1.0 - x);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-14);
        }
        assert_eq!(inc_beta(2.0, 2.0, 0.0), 0.0);
        assert_eq!(inc_beta(2.0, 2.0, 1.0), 1.0);
    }

    #[test]
    fn welch_matches_scipy_example() {
        // scipy.stats.ttest_ind(a, b, equal_var=False)
        let a = [2.1, 2.9, 3.3, 2.4, 2.8, 3.1];
        let b = [3.9, 4.4, 4.1, 5.0, 4.6];
        let w = welch_t(&a, &b).unwrap();
        assert_relative_eq!(w.t, -6.168526011432896, max_relative = 1e-12);
        assert_relative_eq!(w.df, 8.754052333781484, max_relative = 1e-12);
        assert_relative_eq!(w.p, 0.0001852161740266466, max_relative = 1e-10);
    }

    #[test]
    fn welch_degenerate_and_small_inputs() {
        assert!(welch_t(&[1.0], &[2.0, 3.0]).is_none());
        let w = welch_t(&[2.0, 2.0], &[2.0, 2.0]).unwrap();
        assert_eq!(w.p, 1.0);
        let w = welch_t(&[2.0, 2.0], &[3.0, 3.0]).unwrap();
        assert_eq!(w.p, 0.0);
        // Identical samples with spread: p = 1 exactly (t = 0).
        let w = welch_t(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(w.t, 0.0);
        assert_eq!(w.p, 1.0);
    }

    #[test]
    fn zscores_normalize_mean_and_spread() {
        let z = zscores(&[3.0, 7.0, 8.0, 12.0, 1.5]);
        assert_abs_diff_eq!(mean(&z), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(population_std(&z), 1.0, epsilon = 1e-12);
        assert_eq!(zscores(&[4.0, 4.0, 4.0]), alloc::vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn least_squares_recovers_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 + 0.5 * x).collect();
        let fit = least_squares(&xs, &ys).unwrap();
        assert_abs_diff_eq!(fit.intercept, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.slope, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);
        assert!(least_squares(&[1.0], &[2.0]).is_none());
        assert!(least_squares(&[3.0, 3.0], &[1.0, 2.0]).is_none());
        // Flat y: exact fit by convention.
        let flat = least_squares(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).unwrap();
        assert_eq!(flat.slope, 0.0);
        assert_eq!(flat.r_squared, 1.0);
    }

    #[test]
    fn pearson_basics() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let up: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        let down: Vec<f64> = xs.iter().map(|x| -2.0 * x + 9.0).collect();
        assert_abs_diff_eq!(pearson(&xs, &up).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pearson(&xs, &down).unwrap(), -1.0, epsilon = 1e-12);
        assert!(pearson(&xs, &[1.0, 1.0, 1.0, 1.0]).is_none());
        assert!(pearson(&[1.0], &[1.0]).is_none());
    }
}
