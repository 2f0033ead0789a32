//! Radial quadrature: composite Simpson on a uniform grid, plus semi-infinite
//! tails with an `e^{-rate (r - r0)}` weight.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::laguerre::GaussLaguerre;

const LAGUERRE_DEGREE: usize = 48;

fn laguerre_rule() -> &'static GaussLaguerre {
    static RULE: OnceLock<GaussLaguerre> = OnceLock::new();
    RULE.get_or_init(|| {
        GaussLaguerre::new(
            NonZeroUsize::new(LAGUERRE_DEGREE).unwrap(),
            0.0.try_into().unwrap(),
        )
    })
}

/// Composite Simpson rule for samples on a uniform grid with spacing `h`.
///
/// An odd number of intervals closes with Simpson's 3/8 rule on the last three,
/// keeping the rule fourth order throughout.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let m = values.len();
    match m {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        3 => h / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let intervals = m - 1;
            let (even_end, tail) = if intervals.is_multiple_of(2) {
                (m - 1, 0.0)
            } else {
                let j = m - 4;
                let t = 3.0 * h / 8.0
                    * (values[j] + 3.0 * values[j + 1] + 3.0 * values[j + 2] + values[j + 3]);
                (j, t)
            };
            let mut sum = values[0] + values[even_end];
            for (i, v) in values.iter().enumerate().take(even_end).skip(1) {
                sum += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            h / 3.0 * sum + tail
        }
    }
}

/// `∫_{r0}^{∞} e^{-rate (r - r0)} g(r) dr` by Gauss-Laguerre quadrature.
///
/// Exact when `g` is a polynomial of degree below `2 * LAGUERRE_DEGREE`;
/// for smooth algebraic prefactors it converges rapidly.
pub fn exponential_tail<G: FnMut(f64) -> f64>(r0: f64, rate: f64, mut g: G) -> f64 {
    laguerre_rule().integrate(|t| g(r0 + t / rate)) / rate
}
