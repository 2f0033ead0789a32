//! Dormand-Prince 5(4) embedded Runge-Kutta integration for small first-order systems.

/// Error-controlled integrator with per-component mixed tolerance
/// `atol + rtol * max(|y|, |y_new|)`.
#[derive(Debug, Clone, Copy)]
pub struct DormandPrince {
    pub rtol: f64,
    pub atol: f64,
    /// Relative step floor; a proposed step below `min_step_ratio * max(|t|, 1)` is a failure.
    pub min_step_ratio: f64,
}

impl Default for DormandPrince {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-16,
            min_step_ratio: 1e-14,
        }
    }
}

/// Returned when the step controller cannot meet the tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepUnderflow {
    pub t: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth minus fourth order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

impl DormandPrince {
    /// Advances `y` from `t0` to exactly `t1`. `step` carries the step-size
    /// estimate between calls so consecutive intervals reuse it.
    pub fn integrate<const N: usize, F>(
        &self,
        rhs: F,
        t0: f64,
        y0: [f64; N],
        t1: f64,
        step: &mut f64,
    ) -> Result<[f64; N], StepUnderflow>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let mut t = t0;
        let mut y = y0;
        let span = t1 - t0;
        if span == 0.0 {
            return Ok(y);
        }
        let mut h = step.abs().min(span.abs()).max(f64::MIN_POSITIVE) * span.signum();
        let mut k1 = rhs(t, &y);

        loop {
            let remaining = t1 - t;
            let nominal = h;
            let last = h.abs() >= remaining.abs();
            if last {
                h = remaining;
            }
            let k2 = rhs(t + C2 * h, &axpy(&y, &[(A21, &k1)], h));
            let k3 = rhs(t + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
            let k4 = rhs(
                t + C4 * h,
                &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h),
            );
            let k5 = rhs(
                t + C5 * h,
                &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
            );
            let k6 = rhs(
                t + h,
                &axpy(
                    &y,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                    h,
                ),
            );
            let y_new = axpy(
                &y,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
                h,
            );
            let t_new = if last { t1 } else { t + h };
            let k7 = rhs(t_new, &y_new);

            let mut err = 0.0f64;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                let ratio = (e / scale).abs();
                err = if ratio.is_nan() || !y_new[i].is_finite() {
                    f64::INFINITY
                } else {
                    err.max(ratio)
                };
            }

            if err.is_finite() && err <= 1.0 {
                t = t_new;
                y = y_new;
                k1 = k7;
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                // A step shortened to land on t1 says nothing about the next interval.
                let base = if last {
                    nominal.abs().max(h.abs())
                } else {
                    h.abs()
                };
                *step = base * grow;
                if last {
                    return Ok(y);
                }
                h *= grow;
            } else {
                let shrink = if err.is_finite() {
                    (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
                } else {
                    0.1
                };
                h *= shrink;
                if h.abs() < self.min_step_ratio * t.abs().max(1.0) {
                    return Err(StepUnderflow { t });
                }
            }
        }
    }
}
