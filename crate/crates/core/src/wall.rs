//! Wall profiles and their piecewise-linear discretization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Analytic or tabulated wall ordinate `g(x)` with `g(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WallSpec {
    Flat,
    /// Straight segment turning by `angle` (radians) at `x0`.
    Ramp { x0: f64, angle: f64 },
    /// `amplitude * sin^2(pi (x - x0) / length)` on `[x0, x0 + length]`, zero elsewhere.
    Bump { x0: f64, length: f64, amplitude: f64 },
    /// `amplitude * x * exp(-x)`.
    XExp { amplitude: f64 },
    /// Linear interpolation through `(x, y)` vertices; the last segment is extended.
    Polyline { points: Vec<[f64; 2]> },
}

impl WallSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            WallSpec::Ramp { angle, .. } if !(angle.abs() < std::f64::consts::FRAC_PI_2) => {
                Err(Error::Config(format!("ramp angle {angle} out of range")))
            }
            WallSpec::Bump { length, .. } if !(*length > 0.0) => Err(Error::Config("bump length must be positive".into())),
            WallSpec::Polyline { points } => {
                if points.len() < 2 || points[0] != [0.0, 0.0] {
                    return Err(Error::Config("polyline wall needs >= 2 points starting at (0, 0)".into()));
                }
                if points.windows(2).any(|w| !(w[1][0] > w[0][0])) {
                    return Err(Error::Config("polyline wall abscissas must increase".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            WallSpec::Flat => 0.0,
            WallSpec::Ramp { x0, angle } => {
                if x <= *x0 {
                    0.0
                } else {
                    (x - x0) * angle.tan()
                }
            }
            WallSpec::Bump { x0, length, amplitude } => {
                if x <= *x0 || x >= x0 + length {
                    0.0
                } else {
                    amplitude * (std::f64::consts::PI * (x - x0) / length).sin().powi(2)
                }
            }
            WallSpec::XExp { amplitude } => amplitude * x * (-x).exp(),
            WallSpec::Polyline { points } => {
                let i = points.partition_point(|p| p[0] <= x).clamp(1, points.len() - 1);
                let (a, b) = (points[i - 1], points[i]);
                a[1] + (x - a[0]) * (b[1] - a[1]) / (b[0] - a[0])
            }
        }
    }

    /// Same profile with its deflection multiplied by `f`.
    pub fn scaled(&self, f: f64) -> WallSpec {
        match self {
            WallSpec::Flat => WallSpec::Flat,
            WallSpec::Ramp { x0, angle } => WallSpec::Ramp { x0: *x0, angle: (angle.tan() * f).atan() },
            WallSpec::Bump { x0, length, amplitude } => {
                WallSpec::Bump { x0: *x0, length: *length, amplitude: amplitude * f }
            }
            WallSpec::XExp { amplitude } => WallSpec::XExp { amplitude: amplitude * f },
            WallSpec::Polyline { points } => WallSpec::Polyline { points: points.iter().map(|p| [p[0], p[1] * f]).collect() },
        }
    }
}

/// Vertices `(kh, g(kh))` for `k = 0..=k_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallPolyline {
    pub h: f64,
    pub y: Vec<f64>,
}

impl WallPolyline {
    pub fn build(spec: &WallSpec, h: f64, k_max: usize) -> Result<Self> {
        spec.validate()?;
        if !(h > 0.0) {
            return Err(Error::Config(format!("step h must be positive, got {h}")));
        }
        let y: Vec<f64> = (0..=k_max).map(|k| spec.eval(k as f64 * h)).collect();
        if y[0] != 0.0 {
            return Err(Error::Config(format!("wall must pass through the origin, g(0) = {}", y[0])));
        }
        Ok(WallPolyline { h, y })
    }

    pub fn k_max(&self) -> usize {
        self.y.len() - 1
    }

    /// Segment angle `omega_{k,k+1}`; zero before the first vertex and after the last.
    pub fn segment_angle(&self, k: isize) -> f64 {
        if k < 0 || k as usize + 1 >= self.y.len() {
            return 0.0;
        }
        let k = k as usize;
        ((self.y[k + 1] - self.y[k]) / self.h).atan()
    }

    /// Corner turn `omega_k = omega_{k,k+1} - omega_{k-1,k}` at vertex `k`.
    pub fn turn(&self, k: usize) -> f64 {
        self.segment_angle(k as isize) - self.segment_angle(k as isize - 1)
    }

    /// Outward normal of segment `k`.
    pub fn normal(&self, k: usize) -> [f64; 2] {
        let w = self.segment_angle(k as isize);
        [-w.sin(), w.cos()]
    }

    /// Sum of corner turns over the vertices `0..k_max`.
    pub fn total_turn(&self) -> f64 {
        (0..self.k_max()).map(|k| self.turn(k).abs()).sum()
    }

    /// Largest segment slope `|y_{k+1} - y_k| / h`.
    pub fn max_slope(&self) -> f64 {
        self.y.windows(2).map(|w| ((w[1] - w[0]) / self.h).abs()).fold(0.0, f64::max)
    }

    pub fn max_angle(&self) -> f64 {
        (0..self.k_max()).map(|k| self.segment_angle(k as isize).abs()).fold(0.0, f64::max)
    }

    /// Piecewise-linear ordinate at `x`.
    pub fn y_at(&self, x: f64) -> f64 {
        let t = x / self.h;
        let k = (t.floor().max(0.0) as usize).min(self.k_max().saturating_sub(1));
        let f = t - k as f64;
        if self.k_max() == 0 {
            return self.y[0];
        }
        self.y[k] + f * (self.y[k + 1] - self.y[k])
    }

    /// Checks the wall hypothesis against `delta0`.
    pub fn check_small(&self, delta0: f64) -> Result<()> {
        let tv = self.total_turn();
        let m = self.max_angle();
        if tv >= delta0 || m >= delta0 {
            return Err(Error::Config(format!(
                "wall hypothesis H1 violated: total turn {tv:.6} and largest angle {m:.6} must stay below delta0 = {delta0}"
            )));
        }
        Ok(())
    }
}
