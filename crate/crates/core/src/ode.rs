//! Adaptive Dormand-Prince 5(4) stepping for linear complex systems.

use num_complex::Complex64;

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
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
}

/// Workspace for repeated steps on a fixed-size system.
pub(crate) struct DormandPrince {
    k: [Vec<Complex64>; 7],
    tmp: Vec<Complex64>,
    next: Vec<Complex64>,
    pub control: StepControl,
}

impl DormandPrince {
    pub fn new(dim: usize, control: StepControl) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); dim];
        Self {
            k: std::array::from_fn(|_| z.clone()),
            tmp: z.clone(),
            next: z,
            control,
        }
    }

    /// Attempt one step of size `h` from `y`. On acceptance `y` is updated
    /// in place. Returns whether the step was accepted and the suggested
    /// next step size. `f(y, out)` writes the time derivative.
    pub fn step<F>(&mut self, f: &mut F, y: &mut [Complex64], h: f64) -> (bool, f64)
    where
        F: FnMut(&[Complex64], &mut [Complex64]),
    {
        let n = y.len();
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        let tmp = &mut self.tmp;
        f(y, k1);
        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (h * A21);
        }
        f(tmp, k2);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * h;
        }
        f(tmp, k3);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * h;
        }
        f(tmp, k4);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * h;
        }
        f(tmp, k5);
        for i in 0..n {
            tmp[i] = y[i] + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * h;
        }
        f(tmp, k6);
        let next = &mut self.next;
        for i in 0..n {
            next[i] = y[i] + (k1[i] * B1 + k3[i] * B3 + k4[i] * B4 + k5[i] * B5 + k6[i] * B6) * h;
        }
        f(next, k7);
        let StepControl { rtol, atol, h_max } = self.control;
        let mut err2 = 0.0;
        for i in 0..n {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let sc = atol + rtol * y[i].norm().max(next[i].norm());
            err2 += (e.norm() / sc).powi(2);
        }
        let err = (err2 / n as f64).sqrt();
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        let h_next = (h * factor).min(h_max);
        if err <= 1.0 {
            y.copy_from_slice(next);
            (true, h_next)
        } else {
            (false, h_next)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_rotation_and_decay() {
        // y' = (-0.3 + 2i) y
        let rate = Complex64::new(-0.3, 2.0);
        let mut f = |y: &[Complex64], out: &mut [Complex64]| out[0] = rate * y[0];
        let mut dp = DormandPrince::new(1, StepControl { rtol: 1e-10, atol: 1e-12, h_max: 1.0 });
        let mut y = [Complex64::new(1.0, 0.0)];
        let (mut t, mut h) = (0.0f64, 1e-3f64);
        while t < 5.0 {
            let h_try = h.min(5.0 - t);
            let (ok, h_next) = dp.step(&mut f, &mut y, h_try);
            if ok {
                t += h_try;
            }
            h = h_next;
        }
        let exact = (rate * 5.0).exp();
        assert!((y[0] - exact).norm() < 1e-8);
    }
}
