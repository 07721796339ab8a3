//! Generic numerical route from a bit distribution to its matched check
//! distribution: `L → λ → λ̃ → ρ̃ = Tλ̃ → Q → R`.

use crate::error::{require_open_unit, Error, Result};
use crate::powerseries::t_operator;
use crate::tilting::bit_tilt;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        nodes[n - 1 - i] = -x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Pointwise solution of the matched check side for a given bit side.
pub struct CheckSolution<L, D> {
    node: L,
    edge: D,
    p: f64,
    /// `∫₀¹ ρ̃`.
    area: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

const PANELS: usize = 4;
const GL_POINTS: usize = 48;

/// Builds the solver for a bit side given by its node form `L` and edge form
/// `λ`. Evaluation is lazy; each point costs one quadrature of `ρ̃`.
pub fn solve_check_from_bit<L, D>(node: L, edge: D, p: f64) -> Result<CheckSolution<L, D>>
where
    L: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    require_open_unit("p", p)?;
    let (nodes, weights) = gauss_legendre(GL_POINTS);
    let mut sol = CheckSolution {
        node,
        edge,
        p,
        area: 1.0,
        nodes,
        weights,
    };
    let area = sol.integral_rho_tilde(1.0)?;
    if !(area > 0.0) {
        return Err(Error::NumericDomain(
            "tilted check distribution has zero area".into(),
        ));
    }
    sol.area = area;
    Ok(sol)
}

impl<L, D> CheckSolution<L, D>
where
    L: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    pub fn lambda_tilde(&self, x: f64) -> f64 {
        bit_tilt(self.p, (self.edge)(x), (self.node)(x))
    }

    /// `ρ̃(x) = 1 - λ̃⁻¹(1 - x)`.
    pub fn rho_tilde(&self, x: f64) -> Result<f64> {
        t_operator(|z| self.lambda_tilde(z)).eval(x).map_err(|e| {
            Error::NumericDomain(format!("inverting the tilted bit distribution: {e}"))
        })
    }

    /// `∫₀ˣ ρ̃`, using `t = 1 - w²` to remove the square-root behaviour at
    /// `t = 1` and composite Gauss-Legendre in `w`.
    fn integral_rho_tilde(&self, x: f64) -> Result<f64> {
        let (w_lo, w_hi) = ((1.0 - x).max(0.0).sqrt(), 1.0);
        let h = (w_hi - w_lo) / PANELS as f64;
        let mut acc = 0.0;
        for j in 0..PANELS {
            let a = w_lo + j as f64 * h;
            for (&t, &wt) in self.nodes.iter().zip(&self.weights) {
                let w = a + 0.5 * h * (t + 1.0);
                acc += wt * 0.5 * h * 2.0 * w * self.rho_tilde(1.0 - w * w)?;
            }
        }
        Ok(acc)
    }

    /// `Q(x) = ∫₀ˣ ρ̃ / ∫₀¹ ρ̃`.
    pub fn q(&self, x: f64) -> Result<f64> {
        Ok(self.integral_rho_tilde(x)? / self.area)
    }

    /// `R(x) = Q / (1 - p + p Q)`.
    pub fn r(&self, x: f64) -> Result<f64> {
        let q = self.q(x)?;
        Ok(q / (1.0 - self.p + self.p * q))
    }

    /// `ρ(x) = ρ̃ / (1 - p + p Q)²`.
    pub fn rho(&self, x: f64) -> Result<f64> {
        let q = self.q(x)?;
        let d = 1.0 - self.p + self.p * q;
        Ok(self.rho_tilde(x)? / (d * d))
    }
}
