//! Closed-form references.
//!
//! Under `u_t = (i/hbar)(u_xx - w x^2 u)` a Gaussian `exp(a x^2 + b x + c)` stays Gaussian with
//! `a' = (i/hbar)(4a^2 - w)`, `b' = (i/hbar) 4ab`, `c' = (i/hbar)(2a + b^2)`. The product of the
//! two one-dimensional factors solves the separable 2-D problem. The coefficient system is
//! integrated with small RK4 steps, which avoids branch tracking of the complex square roots in
//! the closed forms; [`free_gaussian_1d`] and [`coherent_state_1d`] are the closed forms used to
//! check it.

use crate::semidiscrete::C64;

/// Coefficients `(a, b, c)` of `exp(a xi^2 + b xi + c)` with `xi` measured from the potential centre.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussCoeffs {
    pub a: C64,
    pub b: C64,
    pub c: C64,
}

impl GaussCoeffs {
    /// `exp(-alpha (x - x0)^2 + i k (x - x0))`, with `x` measured from `center`.
    pub fn initial(alpha: f64, x0: f64, k: f64, center: f64) -> Self {
        let d = x0 - center;
        GaussCoeffs {
            a: C64::new(-alpha, 0.0),
            b: C64::new(2.0 * alpha * d, k),
            c: C64::new(-alpha * d * d, -k * d),
        }
    }

    pub fn eval(&self, xi: f64) -> C64 {
        (self.a * xi * xi + self.b * xi + self.c).exp()
    }

    fn rate(&self, w: f64, hbar: f64) -> [C64; 3] {
        let s = C64::new(0.0, 1.0 / hbar);
        [
            s * (4.0 * self.a * self.a - w),
            s * 4.0 * self.a * self.b,
            s * (2.0 * self.a + self.b * self.b),
        ]
    }

    fn axpy(&self, k: &[C64; 3], h: f64) -> Self {
        GaussCoeffs {
            a: self.a + k[0] * h,
            b: self.b + k[1] * h,
            c: self.c + k[2] * h,
        }
    }

    /// Coefficients at time `t` for the quadratic potential coefficient `w`.
    pub fn evolve(&self, w: f64, hbar: f64, t: f64) -> Self {
        if t == 0.0 {
            return *self;
        }
        // |a| bounds the stiffness of the Riccati equation
        let scale = (4.0 * self.a.norm() + w.sqrt() + 1.0) / hbar;
        let n = ((t.abs() * scale * 2000.0).ceil() as usize).max(200);
        let h = t / n as f64;
        let mut g = *self;
        for _ in 0..n {
            let k1 = g.rate(w, hbar);
            let k2 = g.axpy(&k1, h / 2.0).rate(w, hbar);
            let k3 = g.axpy(&k2, h / 2.0).rate(w, hbar);
            let k4 = g.axpy(&k3, h).rate(w, hbar);
            g.a += (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) * (h / 6.0);
            g.b += (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) * (h / 6.0);
            g.c += (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]) * (h / 6.0);
        }
        g
    }
}

/// Free 1-D packet for `u_t = i u_xx`: `(1 + 4 i alpha t)^{-1/2} exp(-(alpha xi^2 - i k xi + i k^2 t) / (1 + 4 i alpha t))`.
pub fn free_gaussian_1d(alpha: f64, x0: f64, k: f64, x: f64, t: f64) -> C64 {
    let xi = x - x0;
    let d = C64::new(1.0, 4.0 * alpha * t);
    let num = C64::new(alpha * xi * xi, k * k * t - k * xi);
    (-num / d).exp() / d.sqrt()
}

/// Coherent state of `u_t = i u_xx - i w x^2 u` with `alpha` equal to the ground-state width
/// `sqrt(w)/2`, started at rest at `x0`: the packet keeps its shape and its centre follows
/// `x0 cos(omega t)` with `omega = 4 alpha`.
pub fn coherent_state_1d(alpha: f64, x0: f64, x: f64, t: f64) -> C64 {
    let om = 4.0 * alpha;
    let q = x0 * (om * t).cos();
    let p = -2.0 * alpha * x0 * (om * t).sin();
    let phase = -2.0 * alpha * t - alpha * x0 * x0 * (2.0 * om * t).sin() / 2.0;
    C64::new(-alpha * (x - q) * (x - q), p * (x - q) + phase).exp()
}
