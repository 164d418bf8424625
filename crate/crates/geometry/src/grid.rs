use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::GeometryError;

/// Chebyshev–Gauss collocation on `(0, 1)`: nodes `(1 − cos θ_j)/2` with
/// `θ_j = (2j+1)π/2n`, the barycentric differentiation matrix, and Fejér's
/// first-rule weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebAxis {
    nodes: DVector<f64>,
    weights: DVector<f64>,
    diff: DMatrix<f64>,
}

pub const MIN_NODES: usize = 4;

impl ChebAxis {
    pub fn new(n: usize) -> Result<Self, GeometryError> {
        if n < MIN_NODES {
            return Err(GeometryError::GridTooSmall(n));
        }
        let theta: Vec<f64> = (0..n).map(|j| (2 * j + 1) as f64 * PI / (2 * n) as f64).collect();
        let nodes = DVector::from_iterator(n, theta.iter().map(|t| 0.5 * (1.0 - t.cos())));
        let bary: Vec<f64> = theta
            .iter()
            .enumerate()
            .map(|(j, t)| if j % 2 == 0 { t.sin() } else { -t.sin() })
            .collect();

        let mut diff = DMatrix::zeros(n, n);
        for i in 0..n {
            let mut row = 0.0;
            for k in 0..n {
                if i != k {
                    let v = (bary[k] / bary[i]) / (nodes[i] - nodes[k]);
                    diff[(i, k)] = v;
                    row += v;
                }
            }
            diff[(i, i)] = -row;
        }

        let half = n / 2;
        let weights = DVector::from_iterator(
            n,
            theta.iter().map(|t| {
                let s: f64 = (1..=half)
                    .map(|m| (2.0 * m as f64 * t).cos() / (4.0 * (m * m) as f64 - 1.0))
                    .sum();
                (1.0 - 2.0 * s) / n as f64
            }),
        );
        Ok(Self { nodes, weights, diff })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &DVector<f64> {
        &self.nodes
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn diff(&self) -> &DMatrix<f64> {
        &self.diff
    }

    /// `τ(1 − τ)` at the nodes.
    pub fn fs_density(&self) -> DVector<f64> {
        self.nodes.map(|t| t * (1.0 - t))
    }
}

/// Tensor grid: rows index the fibre coordinate τ₁, columns the base
/// coordinate τ₂.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    fibre: ChebAxis,
    base: ChebAxis,
}

impl Grid {
    pub fn new(n1: usize, n2: usize) -> Result<Arc<Self>, GeometryError> {
        Ok(Arc::new(Self { fibre: ChebAxis::new(n1)?, base: ChebAxis::new(n2)? }))
    }

    pub fn square(n: usize) -> Result<Arc<Self>, GeometryError> {
        Self::new(n, n)
    }

    pub fn fibre(&self) -> &ChebAxis {
        &self.fibre
    }

    pub fn base(&self) -> &ChebAxis {
        &self.base
    }

    pub fn n1(&self) -> usize {
        self.fibre.len()
    }

    pub fn n2(&self) -> usize {
        self.base.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n1(), self.n2())
    }

    /// Samples `f(τ₁, τ₂)` at every node.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> DMatrix<f64> {
        let (t1, t2) = (&self.fibre.nodes, &self.base.nodes);
        DMatrix::from_fn(self.n1(), self.n2(), |i, j| f(t1[i], t2[j]))
    }

    pub fn sample_base(&self, f: impl Fn(f64) -> f64) -> DVector<f64> {
        self.base.nodes.map(f)
    }

    pub fn tau1(&self) -> DMatrix<f64> {
        self.sample(|t, _| t)
    }

    pub fn tau2(&self) -> DMatrix<f64> {
        self.sample(|_, t| t)
    }

    /// Repeats a base profile along the fibre axis.
    pub fn tile_base(&self, v: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_fn(self.n1(), self.n2(), |_, j| v[j])
    }

    /// `Σ_ij q_i q_j f_ij`, summed in a fixed order.
    pub fn quadrature(&self, f: &DMatrix<f64>) -> f64 {
        let (q1, q2) = (&self.fibre.weights, &self.base.weights);
        let mut total = 0.0;
        for j in 0..self.n2() {
            let mut col = 0.0;
            for i in 0..self.n1() {
                col += q1[i] * f[(i, j)];
            }
            total += q2[j] * col;
        }
        total
    }

    /// `Σ_i q_i f_ij` for each base node.
    pub fn fibre_quadrature(&self, f: &DMatrix<f64>) -> DVector<f64> {
        let q1 = &self.fibre.weights;
        DVector::from_fn(self.n2(), |j, _| {
            let mut col = 0.0;
            for i in 0..self.n1() {
                col += q1[i] * f[(i, j)];
            }
            col
        })
    }

    pub fn base_quadrature(&self, v: &DVector<f64>) -> f64 {
        let q2 = &self.base.weights;
        let mut total = 0.0;
        for j in 0..self.n2() {
            total += q2[j] * v[j];
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_interior_and_increasing() {
        let a = ChebAxis::new(9).unwrap();
        let x = a.nodes();
        assert!(x.iter().all(|t| *t > 0.0 && *t < 1.0));
        assert!(x.as_slice().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn weights_integrate_constants() {
        for n in [4, 7, 16, 33] {
            let a = ChebAxis::new(n).unwrap();
            assert!((a.weights().sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_is_exact_on_polynomials() {
        let a = ChebAxis::new(12).unwrap();
        let v: f64 = a.nodes().iter().zip(a.weights().iter()).map(|(t, q)| q * t.powi(9)).sum();
        assert!((v - 0.1).abs() < 1e-14);
    }

    #[test]
    fn differentiation_is_exact_on_polynomials() {
        let n = 14;
        let a = ChebAxis::new(n).unwrap();
        let f = a.nodes().map(|t| (2.0 * t - 0.3).powi((n - 2) as i32));
        let df = a.diff() * f;
        for (i, t) in a.nodes().iter().enumerate() {
            let exact = 2.0 * (n - 2) as f64 * (2.0 * t - 0.3).powi((n - 3) as i32);
            assert!((df[i] - exact).abs() <= 1e-10 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn tiny_grids_rejected() {
        assert!(matches!(ChebAxis::new(3), Err(GeometryError::GridTooSmall(3))));
    }

    #[test]
    fn tensor_quadrature_factorises() {
        let g = Grid::new(8, 11).unwrap();
        let f = g.sample(|a, b| a * a * b);
        assert!((g.quadrature(&f) - 1.0 / 6.0).abs() < 1e-14);
    }
}
