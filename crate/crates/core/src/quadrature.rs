//! Gauss-Legendre rules and the angular integral of a Gaussian Wigner
//! density over a circle.

use std::f64::consts::{PI, TAU};

use crate::phase_space::GaussianWignerState;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n` from the Tricomi initial guesses.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be >= 1");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `(x, w)` pairs mapped onto `[a, b]`.
    pub fn nodes_on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.nodes_on(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Trapezoid-rule angular integral `∫₀^{2π} dφ g(φ)` of a smooth periodic
/// function, doubling the point count until successive estimates agree to
/// `abs_tol`. Returns the estimate and the last change.
pub fn periodic_trapezoid<F: Fn(f64) -> f64>(g: F, start: usize, max_points: usize, abs_tol: f64) -> (f64, f64) {
    let mut m = start.max(4);
    let mut sum: f64 = (0..m).map(|k| g(TAU * k as f64 / m as f64)).sum();
    let mut est = sum * TAU / m as f64;
    loop {
        if 2 * m > max_points {
            return (est, f64::INFINITY);
        }
        // add the midpoints of the current grid
        let mids: f64 = (0..m).map(|k| g(TAU * (k as f64 + 0.5) / m as f64)).sum();
        sum += mids;
        m *= 2;
        let next = sum * TAU / m as f64;
        let change = (next - est).abs();
        est = next;
        if change <= abs_tol {
            return (est, change);
        }
    }
}

/// Tolerance for the nested trapezoid over φ.
const ANGULAR_TOL: f64 = 1e-15;
const ANGULAR_MAX_POINTS: usize = 1 << 18;

/// Initial trapezoid size: the grid spacing along the circle must resolve
/// the narrowest width of the state, otherwise two coarse grids can both miss
/// the peak and agree on zero.
fn angular_start(state: &GaussianWignerState, r: f64) -> usize {
    let narrowest = state.sigma_s.min(state.sigma_a);
    let needed = (1.5 * TAU * r / narrowest).ceil() as usize;
    needed.clamp(32, ANGULAR_MAX_POINTS / 2).next_power_of_two()
}

/// `∫ dφ W(r, φ)` for a Gaussian state.
pub fn angular_density(state: &GaussianWignerState, r: f64) -> f64 {
    if r == 0.0 || (state.is_isotropic() && state.beta.norm_sqr() == 0.0) {
        return TAU * state.density_at(r, 0.0);
    }
    periodic_trapezoid(
        |phi| state.density_at(r * phi.cos(), r * phi.sin()),
        angular_start(state, r),
        ANGULAR_MAX_POINTS,
        ANGULAR_TOL,
    )
    .0
}

/// `∫ dφ ∂W/∂r (r, φ)` for a Gaussian state.
pub fn angular_radial_derivative(state: &GaussianWignerState, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    if state.is_isotropic() && state.beta.norm_sqr() == 0.0 {
        return TAU * state.radial_derivative_at(r, 0.0);
    }
    periodic_trapezoid(
        |phi| state.radial_derivative_at(r, phi),
        angular_start(state, r),
        ANGULAR_MAX_POINTS,
        ANGULAR_TOL,
    )
    .0
}
