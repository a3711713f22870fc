//! Special functions: standard normal CDF/quantile and the regularized
//! incomplete gamma function with its inverse.
//!
//! Everything here is `no_std`; elementary functions come from `libm`.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

use libm::{erfc, exp, fabs, lgamma, log, log1p, sqrt};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard normal density.
#[inline]
pub fn norm_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * exp(-0.5 * x * x)
}

/// Standard normal CDF.
#[inline]
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal upper tail, `1 - norm_cdf(x)` without cancellation.
#[inline]
pub fn norm_sf(x: f64) -> f64 {
    0.5 * erfc(x * FRAC_1_SQRT_2)
}

// Wichura, AS 241 (PPND16).
const A: [f64; 8] = [
    3.387_132_872_796_366_608,
    133.141_667_891_784_377_45,
    1_971.590_950_306_551_442_7,
    13_731.693_765_509_461_125,
    45_921.953_931_549_871_457,
    67_265.770_927_008_700_853,
    33_430.575_583_588_128_105,
    2_509.080_928_730_122_672_7,
];
const B: [f64; 8] = [
    1.0,
    42.313_330_701_600_911_252,
    687.187_007_492_057_908_3,
    5_394.196_021_424_751_107_7,
    21_213.794_301_586_595_867,
    39_307.895_800_092_710_61,
    28_729.085_735_721_942_674,
    5_226.495_278_852_545_925,
];
const C: [f64; 8] = [
    1.423_437_110_749_683_577_34,
    4.630_337_846_156_545_295_9,
    5.769_497_221_460_691_405_5,
    3.647_848_324_763_204_605_04,
    1.270_458_252_452_368_382_58,
    0.241_780_725_177_450_611_77,
    0.022_723_844_989_269_184_583_3,
    7.745_450_142_783_414_076_4e-4,
];
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_758_821_87,
    1.676_384_830_183_803_849_4,
    0.689_767_334_985_100_004_55,
    0.148_103_976_427_480_074_59,
    0.015_198_666_563_616_457_196_6,
    5.475_938_084_995_344_946e-4,
    1.050_750_071_644_416_843_24e-9,
];
const E: [f64; 8] = [
    6.657_904_643_501_103_777_2,
    5.463_784_911_164_114_369_9,
    1.784_826_539_917_291_335_8,
    0.296_560_571_828_504_891_23,
    0.026_532_189_526_576_123_093,
    0.001_242_660_947_388_078_438_6,
    2.711_555_568_743_487_578_15e-5,
    2.010_334_399_292_288_132_65e-7,
];
const F: [f64; 8] = [
    1.0,
    0.599_832_206_555_887_937_69,
    0.136_929_880_922_735_805_31,
    0.014_875_361_290_850_614_852_5,
    7.868_691_311_456_132_591e-4,
    1.846_318_317_510_054_681_8e-5,
    1.421_511_758_316_445_888_7e-7,
    2.044_263_103_389_939_785_64e-15,
];

#[inline]
fn poly(c: &[f64; 8], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
}

/// Tail branch of AS 241: quantile of the lower tail probability `r <= 0.5`,
/// returned as a positive number (the caller applies the sign).
fn ppnd_tail(r: f64) -> f64 {
    let mut r = sqrt(-log(r));
    if r <= 5.0 {
        r -= 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        r -= 5.0;
        poly(&E, r) / poly(&F, r)
    }
}

/// Standard normal quantile function `Φ⁻¹(p)`.
///
/// Returns `-inf` at `p = 0`, `+inf` at `p = 1` and NaN outside `[0, 1]`.
pub fn norm_quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if fabs(q) <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    if q < 0.0 {
        -ppnd_tail(p)
    } else {
        ppnd_tail(1.0 - p)
    }
}

/// Inverse of the standard normal upper tail: `x` with `norm_sf(x) = v`.
///
/// Accurate for tiny `v`, where `norm_quantile(1 - v)` would lose digits.
pub fn norm_isf(v: f64) -> f64 {
    -norm_quantile(v)
}

/// `x ln x` with the limit value `0` at `x = 0`.
#[inline]
pub fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * log(x)
    }
}

/// `ln(1 + r) / r`, with value 1 at `r = 0` and 0 at `r = inf`.
#[inline]
pub fn log1p_ratio(r: f64) -> f64 {
    if r == f64::INFINITY {
        0.0
    } else if fabs(r) < 1e-8 {
        1.0 - r / 2.0 + r * r / 3.0
    } else {
        log1p(r) / r
    }
}

/// Natural log of the gamma function for positive arguments.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    lgamma(x)
}

/// `ln C(n, k)` for real `n >= k >= 0`.
pub fn ln_choose(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

/// Stirling series remainder: `ln Γ(a) - [(a - ½) ln a - a + ln √(2π)]`.
fn stirling_remainder(a: f64) -> f64 {
    if a < 10.0 {
        return ln_gamma(a) - ((a - 0.5) * log(a) - a + LN_SQRT_2PI);
    }
    let inv = 1.0 / a;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0
        - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))))
}

/// `ln[x^a e^{-x} / Γ(a)]`, computed so that large `a` near `x` keeps its
/// absolute accuracy.
fn ln_gamma_prefactor(a: f64, x: f64) -> f64 {
    if a < 10.0 {
        return a * log(x) - x - ln_gamma(a);
    }
    // a ln x - x - ln Γ(a) = -a (t - 1 - ln t) + ½ ln(a / 2π) - stirling(a), t = x / a
    let u = (x - a) / a;
    let dev = if fabs(u) < 0.1 {
        // u - ln(1+u) by its alternating series
        let mut term = u * u;
        let mut sum = 0.0;
        let mut k = 2.0;
        loop {
            let t = term / k;
            sum += t;
            if fabs(t) <= 1e-17 * fabs(sum) {
                break;
            }
            term *= -u;
            k += 1.0;
        }
        sum
    } else {
        u - log1p(u)
    };
    -a * dev + 0.5 * log(a / (2.0 * PI)) - stirling_remainder(a)
}

const GAMMA_MAX_ITER: usize = 100_000;

/// Lower series: returns `P(a, x)` for `x < a + 1`.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if fabs(term) < fabs(sum) * 1e-17 {
            break;
        }
    }
    sum * exp(ln_gamma_prefactor(a, x))
}

/// Continued fraction (modified Lentz): returns `Q(a, x)` for `x >= a + 1`.
fn gamma_q_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if fabs(d) < TINY {
            d = TINY;
        }
        c = b + an / c;
        if fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if fabs(del - 1.0) < 3e-16 {
            break;
        }
    }
    exp(ln_gamma_prefactor(a, x)) * h
}

/// Regularized lower incomplete gamma function `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x.is_nan() || a.is_nan() || a <= 0.0 {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        1.0 - gamma_q_fraction(a, x)
    }
}

/// Regularized upper incomplete gamma function `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x.is_nan() || a.is_nan() || a <= 0.0 {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 1.0;
    }
    if x == f64::INFINITY {
        return 0.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_fraction(a, x)
    }
}

/// Density of Gamma(a, 1) at `x`.
pub fn gamma_density(a: f64, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return if a < 1.0 {
            f64::INFINITY
        } else if a == 1.0 {
            1.0
        } else {
            0.0
        };
    }
    exp(ln_gamma_prefactor(a, x)) / x
}

/// Inverts `P(a, x) = p` (`upper == false`) or `Q(a, x) = p` (`upper == true`)
/// for the unit-scale gamma law.
fn gamma_inverse(a: f64, p: f64, upper: bool) -> f64 {
    if p <= 0.0 {
        return if upper { f64::INFINITY } else { 0.0 };
    }
    if p >= 1.0 {
        return if upper { 0.0 } else { f64::INFINITY };
    }
    // g increases with x and vanishes at the root.
    let g = |x: f64| -> f64 {
        if upper {
            p - gamma_q(a, x)
        } else {
            gamma_p(a, x) - p
        }
    };

    // Starting value: Wilson-Hilferty, or the small-x power law.
    let z = if upper { norm_isf(p) } else { norm_quantile(p) };
    let c = 1.0 / (9.0 * a);
    let base = 1.0 - c + z * sqrt(c);
    let mut x = a * base * base * base;
    if !(x > 0.0 && x.is_finite()) {
        let lower_p = if upper { 1.0 - p } else { p };
        x = exp((log(lower_p.max(1e-300)) + ln_gamma(a + 1.0)) / a);
        if !(x > 0.0 && x.is_finite()) {
            x = a;
        }
    }

    // Bracket the root by geometric expansion.
    let (mut lo, mut hi);
    let gx = g(x);
    if gx == 0.0 {
        return x;
    }
    if gx < 0.0 {
        lo = x;
        hi = x * 1.5 + 1.0;
        while g(hi) < 0.0 {
            lo = hi;
            hi = hi * 2.0 + 1.0;
            if !hi.is_finite() {
                return f64::INFINITY;
            }
        }
    } else {
        hi = x;
        lo = x * 0.5;
        while g(lo) > 0.0 {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-300 {
                return 0.0;
            }
        }
    }

    // Newton steps, falling back to bisection whenever a step leaves the bracket.
    x = 0.5 * (lo + hi);
    for _ in 0..300 {
        let gx = g(x);
        if gx == 0.0 {
            return x;
        }
        if gx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let dens = gamma_density(a, x);
        let newton = if dens > 0.0 { x - gx / dens } else { f64::NAN };
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if fabs(next - x) <= 4.0 * f64::EPSILON * fabs(x) || hi - lo <= 4.0 * f64::EPSILON * hi {
            return next;
        }
        x = next;
    }
    x
}

/// Quantile of the unit-scale gamma law: `x` with `P(a, x) = p`.
pub fn gamma_p_inv(a: f64, p: f64) -> f64 {
    gamma_inverse(a, p, false)
}

/// Inverse upper tail of the unit-scale gamma law: `x` with `Q(a, x) = q`.
pub fn gamma_q_inv(a: f64, q: f64) -> f64 {
    gamma_inverse(a, q, true)
}
