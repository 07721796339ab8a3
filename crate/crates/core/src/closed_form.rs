//! Exact evaluators for the regular-degree families.
//!
//! Every regular construction reduces to one of two kernels `K` (an edge
//! distribution) with node form `N = ∫K / ∫₀¹K`, followed by an optional
//! untilt `node = N / (a + (1-a) N)`, `edge = K / (a + (1-a) N)²`.
//!
//! * cubic: `K = 1 - u` where `u` is the root of `t s u³ + (1-t) u - s = 0`
//!   with `s = √(1-x)` and `u(0) = 1`. This is `T` applied to
//!   `(1-t)² x² / (1 - t x³)²`, and `∫₀¹ K = (1-t)/3`.
//! * sqrt: `K = 1 - √(1-x)`, which is `T` applied to `x²`.

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::powerseries::PowerSeries;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    /// Node `x^d`, edge `x^{d-1}`.
    Monomial(usize),
    Cubic {
        t: f64,
    },
    Sqrt,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub kernel: Kernel,
    /// Untilt weight; `a = 1` leaves the kernel unchanged.
    pub a: f64,
}

impl ClosedForm {
    pub fn monomial(d: usize) -> Self {
        ClosedForm {
            kernel: Kernel::Monomial(d),
            a: 1.0,
        }
    }

    pub fn cubic(t: f64, a: f64) -> Self {
        ClosedForm {
            kernel: Kernel::Cubic { t },
            a,
        }
    }

    pub fn sqrt(a: f64) -> Self {
        ClosedForm {
            kernel: Kernel::Sqrt,
            a,
        }
    }

    /// Kernel values `(K(x), N(x))`.
    pub fn kernel_at(&self, x: f64) -> (f64, f64) {
        let x = x.clamp(0.0, 1.0);
        match self.kernel {
            Kernel::Monomial(d) => (x.powi(d as i32 - 1), x.powi(d as i32)),
            Kernel::Cubic { t } => cubic_point(t, x),
            Kernel::Sqrt => sqrt_point(x),
        }
    }

    pub fn node(&self, x: f64) -> f64 {
        let (_, n) = self.kernel_at(x);
        n / (self.a + (1.0 - self.a) * n)
    }

    pub fn edge(&self, x: f64) -> f64 {
        let (k, n) = self.kernel_at(x);
        let d = self.a + (1.0 - self.a) * n;
        k / (d * d)
    }

    /// Exact `node'(1) = a N'(1)`.
    pub fn node_deriv_at_one(&self) -> f64 {
        let n1 = match self.kernel {
            Kernel::Monomial(d) => d as f64,
            Kernel::Cubic { t } => 3.0 / (1.0 - t),
            Kernel::Sqrt => 3.0,
        };
        self.a * n1
    }

    pub fn kernel_complex(&self, z: Complex64) -> (Complex64, Complex64) {
        match self.kernel {
            Kernel::Monomial(d) => (z.powi(d as i32 - 1), z.powi(d as i32)),
            Kernel::Cubic { t } => cubic_complex(t, z),
            Kernel::Sqrt => {
                let s = (Complex64::new(1.0, 0.0) - z).sqrt();
                (1.0 - s, 3.0 * z - 2.0 * (1.0 - s * s * s))
            }
        }
    }

    pub fn node_complex(&self, z: Complex64) -> Complex64 {
        let (_, n) = self.kernel_complex(z);
        n / (self.a + (1.0 - self.a) * n)
    }

    pub fn edge_complex(&self, z: Complex64) -> Complex64 {
        let (k, n) = self.kernel_complex(z);
        let d = self.a + (1.0 - self.a) * n;
        k / (d * d)
    }

    /// Kernel series `(K, N)` truncated at `order`.
    pub fn kernel_series(&self, order: usize) -> (PowerSeries, PowerSeries) {
        match self.kernel {
            Kernel::Monomial(d) => (
                PowerSeries::monomial(d - 1, order),
                PowerSeries::monomial(d, order),
            ),
            Kernel::Cubic { t } => {
                let k = cubic_kernel_series(t, order);
                let n = k.integral().scale(3.0 / (1.0 - t));
                (k, n)
            }
            Kernel::Sqrt => {
                let k = sqrt_one_minus_x(order).scale(-1.0).add_scalar(1.0);
                let n = k.integral().scale(3.0);
                (k, n)
            }
        }
    }

    /// `(node, edge)` series truncated at `order`.
    pub fn series(&self, order: usize) -> (PowerSeries, PowerSeries) {
        let (k, n) = self.kernel_series(order);
        if self.a == 1.0 {
            return (n, k);
        }
        let denom = n.scale(1.0 - self.a).add_scalar(self.a);
        let inv = denom
            .recip()
            .expect("untilt denominator has constant term a > 0");
        let node = n.mul(&inv);
        let edge = k.mul(&inv).mul(&inv);
        (node, edge)
    }
}

/// Coefficients of `√(1-x)`.
pub fn sqrt_one_minus_x(order: usize) -> PowerSeries {
    let mut c = vec![0.0; order + 1];
    c[0] = 1.0;
    for k in 1..=order {
        c[k] = c[k - 1] * (k as f64 - 1.5) / k as f64;
    }
    PowerSeries::from_vec_unchecked(c)
}

/// Series of `K = 1 - u` for the cubic kernel, solved one coefficient at a
/// time. Coefficient `n` of `t s u³ + (1-t) u - s` is affine in `u_n` with
/// slope `1 + 2t`.
pub fn cubic_kernel_series(t: f64, order: usize) -> PowerSeries {
    let s = sqrt_one_minus_x(order);
    let n = order + 1;
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n]; // u²
    let mut w = vec![0.0; n]; // u³
    let mut y = vec![0.0; n]; // s u³
    u[0] = 1.0;
    v[0] = 1.0;
    w[0] = 1.0;
    y[0] = 1.0;
    let slope = 1.0 + 2.0 * t;
    for k in 1..n {
        let v_known: f64 = (1..k).map(|i| u[i] * u[k - i]).sum();
        let w_known: f64 = (1..k).map(|i| u[i] * v[k - i]).sum();
        let y_known: f64 = (1..=k).map(|i| s.coeff(i) * w[k - i]).sum();
        // With u_k = 0: v_k = v_known, w_k = v_k + w_known, y_k = w_k + y_known.
        let resid = t * (v_known + w_known + y_known) - s.coeff(k);
        u[k] = -resid / slope;
        v[k] = v_known + 2.0 * u[k];
        w[k] = v[k] + u[k] + w_known;
        y[k] = w[k] + y_known;
    }
    let mut kcoef: Vec<f64> = u.iter().map(|c| -c).collect();
    kcoef[0] += 1.0;
    PowerSeries::from_vec_unchecked(kcoef)
}

/// Real root of `t s u³ + (1-t) u - s = 0` for `s ≥ 0`, `t ∈ (0, 1)`.
pub fn cubic_root(t: f64, s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    // Depressed form u³ + P u + Q = 0 with P > 0 has a single real root,
    // given by the hyperbolic form of Cardano's formula.
    let p_ = (1.0 - t) / (t * s);
    let q_ = -1.0 / t;
    let r = (p_ / 3.0).sqrt();
    let arg = 1.5 * q_ / p_ / r;
    let mut u = -2.0 * r * (arg.asinh() / 3.0).sinh();
    for _ in 0..2 {
        let f = t * s * u * u * u + (1.0 - t) * u - s;
        let df = 3.0 * t * s * u * u + (1.0 - t);
        u -= f / df;
    }
    u.clamp(0.0, 1.0)
}

fn cubic_point(t: f64, x: f64) -> (f64, f64) {
    if x >= 1.0 {
        return (1.0, 1.0);
    }
    let u = cubic_root(t, (1.0 - x).sqrt());
    let u3 = u * u * u;
    let k = 1.0 - u;
    let n = 3.0 * (x - 1.0) * k / (1.0 - t) + (1.0 - u3) / (1.0 - t * u3);
    (k, n)
}

fn sqrt_point(x: f64) -> (f64, f64) {
    let s = (1.0 - x).sqrt();
    (1.0 - s, 3.0 * x - 2.0 * (1.0 - s * s * s))
}

/// Cubic kernel at a complex point in the closed unit disc, continued along
/// the ray from the origin where `u = 1`.
pub fn cubic_complex(t: f64, z: Complex64) -> (Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let steps = 48;
    let mut u = one;
    let mut s = one;
    for j in 1..=steps {
        let zj = z * (j as f64 / steps as f64);
        s = (one - zj).sqrt();
        for _ in 0..30 {
            let f = t * s * u * u * u + (1.0 - t) * u - s;
            let df = 3.0 * t * s * u * u + (1.0 - t);
            let du = f / df;
            u -= du;
            if du.norm() < 1e-15 * (1.0 + u.norm()) {
                break;
            }
        }
    }
    let _ = s;
    let u3 = u * u * u;
    let k = one - u;
    let n = 3.0 * (z - 1.0) * k / (1.0 - t) + (one - u3) / (one - t * u3);
    (k, n)
}
