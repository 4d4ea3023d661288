//! Prescribed outtake profiles.

use crate::error::{Error, Result};
use crate::spline::PeriodicSpline;

#[derive(Debug, Clone, PartialEq)]
pub enum OuttakeProfile {
    /// Rises at `rate` up to `plateau`, holds, and falls at `rate` from `t_down`.
    Trapezoid { rate: f64, plateau: f64, t_down: f64 },
    /// Periodic cubic spline through the nodes, zero outside them.
    Spline(PeriodicSpline),
    Constant(f64),
}

impl OuttakeProfile {
    pub fn trapezoid(rate: f64, plateau: f64, t_down: f64) -> Result<Self> {
        if !(rate > 0.0 && plateau >= 0.0 && t_down >= plateau / rate) || !t_down.is_finite() {
            return Err(Error::Validation(format!(
                "trapezoid needs rate > 0, plateau >= 0 and t_down >= plateau/rate, got ({rate}, {plateau}, {t_down})"
            )));
        }
        Ok(Self::Trapezoid { rate, plateau, t_down })
    }

    pub fn spline(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| *v < 0.0) {
            return Err(Error::Validation("outtake spline values must be >= 0".into()));
        }
        Ok(Self::Spline(PeriodicSpline::new(times, values)?))
    }

    pub fn constant(value: f64) -> Result<Self> {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::Validation(format!("constant outtake must be >= 0, got {value}")));
        }
        Ok(Self::Constant(value))
    }

    /// Outtake and its right-sided time derivative at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        match self {
            Self::Trapezoid { rate, plateau, t_down } => {
                let top = plateau / rate;
                if t < 0.0 {
                    (0.0, 0.0)
                } else if t < top {
                    (rate * t, *rate)
                } else if t < *t_down {
                    (*plateau, 0.0)
                } else if t < t_down + top {
                    (plateau - rate * (t - t_down), -rate)
                } else {
                    (0.0, 0.0)
                }
            }
            Self::Spline(s) => (s.eval(t).0, s.derivative_right(t)),
            Self::Constant(v) => (*v, 0.0),
        }
    }

    /// Times at which the outtake rate is discontinuous or changes formula.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Trapezoid { rate, plateau, t_down } => {
                vec![plateau / rate, *t_down, t_down + plateau / rate]
            }
            Self::Spline(s) => s.nodes().to_vec(),
            Self::Constant(_) => Vec::new(),
        }
    }

    /// Integral of the outtake over `[a, b]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            Self::Spline(s) => s.integral(a, b),
            Self::Constant(v) => v * (b - a),
            Self::Trapezoid { .. } => {
                // piecewise linear between breakpoints: trapezoidal rule is exact
                let mut pts = vec![a];
                pts.extend(self.breakpoints().into_iter().chain([0.0]).filter(|t| *t > a && *t < b));
                pts.push(b);
                pts.sort_by(f64::total_cmp);
                pts.windows(2)
                    .map(|w| 0.5 * (w[1] - w[0]) * (self.eval(w[0]).0 + self.eval(w[1]).0))
                    .sum()
            }
        }
    }
}
