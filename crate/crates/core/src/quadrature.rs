//! Adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.
//!
//! The integrand may be vector valued (`[f64; N]`), which lets callers pick
//! up several moments of the same function from one set of evaluations.
//! Refinement always bisects the panel with the largest error estimate.

use alloc::vec::Vec;
use core::fmt;

use libm::fabs;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Adaptive refinement failed to reach the requested tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureError {
    pub intervals: usize,
    pub estimate: f64,
    pub error: f64,
}

impl fmt::Display for QuadratureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "quadrature did not converge after {} panels (estimate {:e}, error {:e})",
            self.intervals, self.estimate, self.error
        )
    }
}

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Tolerance {
    pub const fn absolute(abs: f64) -> Self {
        Tolerance {
            abs,
            rel: 0.0,
            max_panels: 4000,
        }
    }
}

#[derive(Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    error: [f64; N],
}

impl<const N: usize> Panel<N> {
    fn worst(&self) -> f64 {
        self.error
            .iter()
            .fold(0.0, |m, &e| if e > m { e } else { m })
    }
}

fn kronrod<const N: usize, F>(f: &mut F, a: f64, b: f64) -> Panel<N>
where
    F: FnMut(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = [0.0; N];
    let mut gauss = [0.0; N];

    let fc = f(center);
    for k in 0..N {
        kron[k] = WGK[7] * fc[k];
        gauss[k] = WG[3] * fc[k];
    }
    // Left-to-right order keeps evaluation monotone in the abscissa.
    for j in 0..7 {
        let dx = half * XGK[j];
        let lo = f(center - dx);
        let hi = f(center + dx);
        for k in 0..N {
            let s = lo[k] + hi[k];
            kron[k] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[k] += WG[j / 2] * s;
            }
        }
    }
    let mut value = [0.0; N];
    let mut error = [0.0; N];
    for k in 0..N {
        value[k] = kron[k] * half;
        error[k] = fabs((kron[k] - gauss[k]) * half);
    }
    Panel { a, b, value, error }
}

/// Integrates `f` over `[a, b]` until every component satisfies
/// `error <= max(tol.abs, tol.rel * |value|)`.
///
/// Returns the integral and its error estimate per component.
pub fn integrate<const N: usize, F>(
    mut f: F,
    a: f64,
    b: f64,
    tol: Tolerance,
) -> Result<([f64; N], [f64; N]), QuadratureError>
where
    F: FnMut(f64) -> [f64; N],
{
    if a == b {
        return Ok(([0.0; N], [0.0; N]));
    }
    let mut panels: Vec<Panel<N>> = Vec::with_capacity(32);
    panels.push(kronrod(&mut f, a, b));

    loop {
        let mut total = [0.0; N];
        let mut err = [0.0; N];
        for p in &panels {
            for k in 0..N {
                total[k] += p.value[k];
                err[k] += p.error[k];
            }
        }
        let done = (0..N).all(|k| err[k] <= tol.abs.max(tol.rel * fabs(total[k])));
        if done {
            return Ok((total, err));
        }
        if panels.len() >= tol.max_panels || !total.iter().all(|v| v.is_finite()) {
            return Err(QuadratureError {
                intervals: panels.len(),
                estimate: total[0],
                error: err[0],
            });
        }

        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |(bi, bw), (i, p)| {
                let w = p.worst();
                if w > bw {
                    (i, w)
                } else {
                    (bi, bw)
                }
            });
        let worst = panels.swap_remove(idx);
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Panel can no longer be split in floating point.
            return Err(QuadratureError {
                intervals: panels.len() + 1,
                estimate: total[0],
                error: err[0],
            });
        }
        panels.push(kronrod(&mut f, worst.a, mid));
        panels.push(kronrod(&mut f, mid, worst.b));
    }
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate_scalar<F>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64, QuadratureError>
where
    F: FnMut(f64) -> f64,
{
    integrate(|x| [f(x)], a, b, tol).map(|(v, _)| v[0])
}
