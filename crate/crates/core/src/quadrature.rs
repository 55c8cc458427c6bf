//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

// Nodes and weights are kept as published, beyond f64 precision.
#![allow(clippy::excessive_precision)]

use crate::{Error, Result};

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
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_INTERVALS: usize = 4000;

#[derive(Clone, Copy, Debug)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Piece {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integral of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let mut pieces = vec![kronrod(&f, a, b)];
    loop {
        let total_err: f64 = pieces.iter().map(|p| p.error).sum();
        let value: f64 = pieces.iter().map(|p| p.value).sum();
        if !value.is_finite() {
            return Err(Error::NonFinite("quadrature value".into()));
        }
        if total_err <= tol {
            return Ok(value);
        }
        if pieces.len() >= MAX_INTERVALS {
            return Err(Error::Quadrature { tol, err: total_err });
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(k, _)| k)
            .unwrap();
        let p = pieces.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        pieces.push(kronrod(&f, p.a, mid));
        pieces.push(kronrod(&f, mid, p.b));
    }
}

/// Finds `L` with `|f(±x)| ≤ cutoff` at `x = L` for an integrand whose tails
/// decay monotonically beyond the returned window.
pub fn tail_window<F: Fn(f64) -> f64>(f: &F, center: f64, cutoff: f64) -> Result<(f64, f64)> {
    let find = |dir: f64| -> Result<f64> {
        let mut step = 1.0;
        while step < 1e4 {
            let x = center + dir * step;
            let y = f(x).abs();
            let y2 = f(center + dir * 2.0 * step).abs();
            if y <= cutoff && y2 <= y {
                return Ok(x);
            }
            step *= 1.5;
        }
        Err(Error::Quadrature {
            tol: cutoff,
            err: f64::INFINITY,
        })
    };
    Ok((find(-1.0)?, find(1.0)?))
}

/// Integral over the whole line of a function with rapidly decaying tails.
pub fn integrate_line<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<f64> {
    let (a, b) = tail_window(&f, 0.0, tol * 1e-6)?;
    integrate(f, a, b, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| x.powi(5) - 3.0 * x * x, -1.0, 2.0, 1e-13).unwrap();
        assert_abs_diff_eq!(v, 64.0 / 6.0 - 1.0 / 6.0 - 9.0, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_over_line() {
        let v = integrate_line(|x: f64| (-0.5 * x * x).exp(), 1e-12).unwrap();
        assert_abs_diff_eq!(v, (2.0 * PI).sqrt(), epsilon = 1e-11);
    }

    #[test]
    fn peaked_integrand() {
        let v = integrate(|x: f64| 1.0 / (1e-4 + x * x), -1.0, 1.0, 1e-10).unwrap();
        let exact = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert_abs_diff_eq!(v, exact, epsilon = 1e-8);
    }
}
