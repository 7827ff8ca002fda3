//! Adaptive Gauss-Kronrod quadrature.
//!
//! A 7-point Gauss rule embedded in a 15-point Kronrod rule gives a value
//! and an error estimate per panel; the panel with the largest estimated
//! error is bisected until the total meets the requested absolute
//! tolerance. Deterministic: panel selection depends only on the integrand.

use crate::{Error, Result};

/// Kronrod-15 abscissae on [0, 1] side of the symmetric rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];

/// Kronrod-15 weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];

/// Gauss-7 weights, matching the odd-index Kronrod abscissae.
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// One Gauss-Kronrod 15(7) evaluation on [a, b]; returns (value, error).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut fv = [[0.0f64; 2]; 7];
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = [f1, f2];
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    // Integral of |f - mean|, used to normalize the error estimate.
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv[j][0] - mean).abs() + (fv[j][1] - mean).abs());
    }
    asc *= half.abs();
    kronrod *= half;
    gauss *= half;
    let raw = (kronrod - gauss).abs();
    let err = if asc != 0.0 && raw != 0.0 {
        asc * 1.0_f64.min((200.0 * raw / asc).powf(1.5))
    } else {
        raw
    };
    (kronrod, err)
}

#[derive(Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Integrate `f` over [a, b] to absolute tolerance `abs_tol`, splitting at
/// most `max_panels` times.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64, max_panels: usize) -> Result<f64> {
    integrate_with_breakpoints(f, a, b, &[], abs_tol, max_panels)
}

/// Like [`integrate`], but the interval is pre-split at the given interior
/// breakpoints (points outside (a, b) are ignored). Use it when the
/// integrand has known kinks so each panel stays smooth.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    abs_tol: f64,
    max_panels: usize,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if !(a < b) {
        return Err(Error::domain(format!("integrate: bad interval [{a}, {b}]")));
    }
    // Seed with the user breakpoints plus a uniform split, so no feature of
    // the integrand can hide between the sample points of one wide panel.
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|x| *x > a && *x < b)
        .collect();
    for j in 1..8 {
        cuts.push(a + (b - a) * j as f64 / 8.0);
    }
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.dedup();
    let mut panels = Vec::with_capacity(cuts.len() + 1);
    let mut lo = a;
    for cut in cuts.into_iter().chain(std::iter::once(b)) {
        if cut <= lo {
            continue;
        }
        let (value, error) = gk15(f, lo, cut);
        panels.push(Panel {
            a: lo,
            b: cut,
            value,
            error,
        });
        lo = cut;
    }

    loop {
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        if total_err <= abs_tol {
            return Ok(panels.iter().map(|p| p.value).sum());
        }
        if panels.len() >= max_panels {
            return Err(Error::Quadrature {
                detail: format!(
                    "tolerance {abs_tol:.1e} not reached on [{a}, {b}] with {} panels (err {total_err:.1e})",
                    panels.len()
                ),
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let Panel { a: pa, b: pb, .. } = panels[worst];
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            return Err(Error::Quadrature {
                detail: format!("panel [{pa}, {pb}] cannot be split further"),
            });
        }
        let (v1, e1) = gk15(f, pa, mid);
        let (v2, e2) = gk15(f, mid, pb);
        panels[worst] = Panel {
            a: pa,
            b: mid,
            value: v1,
            error: e1,
        };
        panels.push(Panel {
            a: mid,
            b: pb,
            value: v2,
            error: e2,
        });
    }
}
