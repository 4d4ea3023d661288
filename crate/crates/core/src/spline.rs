//! Periodic cubic spline on a finite node range, extended by zero outside it.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the nodes.
    m: Vec<f64>,
}

/// Solves a cyclic tridiagonal system with sub-diagonal `a`, diagonal `b` and
/// super-diagonal `c`; `a[0]` and `c[n-1]` are the corner entries.
fn solve_cyclic(a: &[f64], b: &[f64], c: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = b.len();
    let gamma = -b[0];
    let mut bb = b.to_vec();
    bb[0] -= gamma;
    bb[n - 1] -= a[0] * c[n - 1] / gamma;
    let x = thomas(a, &bb, c, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = c[n - 1];
    let z = thomas(a, &bb, c, &u);
    let fact = (x[0] + a[0] * x[n - 1] / gamma) / (1.0 + z[0] + a[0] * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn thomas(a: &[f64], b: &[f64], c: &[f64], d: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    cp[0] = c[0] / b[0];
    dp[0] = d[0] / b[0];
    for i in 1..n {
        let den = b[i] - a[i] * cp[i - 1];
        cp[i] = c[i] / den;
        dp[i] = (d[i] - a[i] * dp[i - 1]) / den;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = dp[i] - cp[i] * x[i + 1];
    }
    x
}

impl PeriodicSpline {
    /// Needs at least four strictly increasing nodes with equal end values.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 4 {
            return Err(Error::Validation(format!(
                "periodic spline needs >= 4 nodes and matching values, got {} and {}",
                xs.len(),
                ys.len()
            )));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) || xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::Validation("spline nodes must be finite and strictly increasing".into()));
        }
        let n = xs.len() - 1;
        if (ys[0] - ys[n]).abs() > 1e-12 * ys.iter().fold(1.0f64, |m, y| m.max(y.abs())) {
            return Err(Error::Validation(format!(
                "periodic spline needs equal end values, got {} and {}",
                ys[0], ys[n]
            )));
        }
        let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
        let slope: Vec<f64> = (0..n).map(|i| (ys[i + 1] - ys[i]) / h[i]).collect();
        let (mut a, mut b, mut c, mut r) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for i in 0..n {
            let im = (i + n - 1) % n;
            a[i] = h[im];
            b[i] = 2.0 * (h[im] + h[i]);
            c[i] = h[i];
            r[i] = 6.0 * (slope[i] - slope[im]);
        }
        let mut m = solve_cyclic(&a, &b, &c, &r);
        m.push(m[0]);
        Ok(Self { xs, ys, m })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xs
    }

    fn interval(&self, x: f64) -> Option<usize> {
        let n = self.xs.len() - 1;
        if x < self.xs[0] || x > self.xs[n] {
            return None;
        }
        Some(self.xs.partition_point(|&v| v <= x).clamp(1, n) - 1)
    }

    /// Value and first derivative; both zero outside the node range.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let Some(i) = self.interval(x) else {
            return (0.0, 0.0);
        };
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let v = a * self.ys[i] + b * self.ys[i + 1] + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d = (self.ys[i + 1] - self.ys[i]) / h + ((1.0 - 3.0 * a * a) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        (v, d)
    }

    /// Right-sided derivative, so that at a node it describes the next piece.
    pub fn derivative_right(&self, x: f64) -> f64 {
        let n = self.xs.len() - 1;
        if x < self.xs[0] || x >= self.xs[n] {
            return 0.0;
        }
        self.eval(x).1
    }

    /// Antiderivative from the first node, exact for the piecewise cubic.
    fn primitive(&self, x: f64) -> f64 {
        let n = self.xs.len() - 1;
        let x = x.clamp(self.xs[0], self.xs[n]);
        let mut acc = 0.0;
        for i in 0..n {
            let (x0, x1) = (self.xs[i], self.xs[i + 1]);
            if x <= x0 {
                break;
            }
            let h = x1 - x0;
            let (m0, m1) = (self.m[i], self.m[i + 1]);
            let (y0, y1) = (self.ys[i], self.ys[i + 1]);
            // integral of the piece from x0 to min(x, x1) in the local variable b
            let bt = ((x.min(x1)) - x0) / h;
            let a_int = |b: f64| {
                // a = 1 - b
                let ia = b - 0.5 * b * b;
                let ia3 = (1.0 - (1.0 - b).powi(4)) / 4.0;
                let ib = 0.5 * b * b;
                let ib3 = b.powi(4) / 4.0;
                y0 * ia + y1 * ib + ((ia3 - ia) * m0 + (ib3 - ib) * m1) * h * h / 6.0
            };
            acc += h * a_int(bt);
        }
        acc
    }

    /// Exact integral over `[lo, hi]`, counting only the node range.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        self.primitive(hi) - self.primitive(lo)
    }
}
