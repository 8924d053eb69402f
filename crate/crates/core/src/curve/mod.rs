//! Planar log-aesthetic curves.
//!
//! A log-aesthetic curve has a straight logarithmic curvature graph of slope
//! `alpha`. Its radius of curvature follows
//!
//! * `rho(s)^alpha = c0 * s + c1` for `alpha != 0`,
//! * `rho(s) = c0 * exp(c1 * s)` for `alpha == 0`,
//!
//! and the curve is `P0 + R(c2) * integral_0^s (cos t(u), sin t(u)) du`, where
//! `t` is the turning angle accumulated since the start point and `R(c2)`
//! rotates by the initial tangent direction `c2`.

mod analysis;
mod polyline;
pub mod quadrature;

use nalgebra::{Point2, Rotation2, Vector2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use analysis::{
    discrete_j_lac, j_lac_profile, lcg_slope, self_affinity_residual, RadiusProfile,
};
pub use polyline::Polyline2D;
pub use quadrature::QuadConfig;

#[derive(Debug, Error, PartialEq)]
pub enum CurveError {
    #[error("c0 * s + c1 must be positive, but is {value} at s = {s}")]
    NonPositiveRadicand { s: f64, value: f64 },
    #[error("radius of curvature vanishes or overflows at s = {0}")]
    ZeroRadius(f64),
    #[error("quadrature did not converge (error estimate {0:e})")]
    QuadratureDiverged(f64),
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("points {0} and {1} coincide")]
    RepeatedPoint(usize, usize),
    #[error("points around index {0} are collinear: curvature radius undefined")]
    Collinear(usize),
    #[error("radius of curvature is not strictly monotone along the curve")]
    NonMonotone,
    #[error("constant curvature: the logarithmic curvature graph is undefined")]
    ConstantCurvature,
    #[error("no positive scale factor maps the probe point for b = {0}")]
    NoAffineMap(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type CurveResult<T> = Result<T, CurveError>;

/// Parameters of one log-aesthetic segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaCurveParams {
    /// Slope of the logarithmic curvature graph.
    pub alpha: f64,
    pub c0: f64,
    pub c1: f64,
    /// Tangent direction at the start point, radians.
    pub c2: f64,
    pub p0: Point2<f64>,
}

impl LaCurveParams {
    pub fn new(alpha: f64, c0: f64, c1: f64, c2: f64) -> Self {
        Self {
            alpha,
            c0,
            c1,
            c2,
            p0: Point2::origin(),
        }
    }

    pub fn with_start(mut self, p0: Point2<f64>) -> Self {
        self.p0 = p0;
        self
    }

    /// Unit-radius circle traversed counter-clockwise from the origin.
    pub fn unit_circle() -> Self {
        Self::new(0.0, 1.0, 0.0, 0.0)
    }

    /// Radius of curvature at arc length `s`.
    pub fn radius(&self, s: f64) -> CurveResult<f64> {
        let rho = if self.alpha == 0.0 {
            self.c0 * (self.c1 * s).exp()
        } else {
            let r = self.c0 * s + self.c1;
            if r <= 0.0 || !r.is_finite() {
                return Err(CurveError::NonPositiveRadicand { s, value: r });
            }
            r.powf(self.alpha.recip())
        };
        if rho > 0.0 && rho.is_finite() {
            Ok(rho)
        } else {
            Err(CurveError::ZeroRadius(s))
        }
    }

    /// Curvature `1 / rho(s)`.
    pub fn curvature(&self, s: f64) -> CurveResult<f64> {
        self.radius(s).map(f64::recip)
    }

    /// Checks that `rho` is positive and finite on the whole of `[0, s]`.
    ///
    /// The radicand is affine and the exponential form is monotone, so
    /// checking both endpoints covers the interval.
    pub fn check_domain(&self, s: f64) -> CurveResult<()> {
        self.radius(0.0)?;
        self.radius(s)?;
        Ok(())
    }

    /// Angle turned between arc length 0 and `s`, i.e. `theta(s) - c2`.
    fn turning(&self, s: f64) -> f64 {
        let (alpha, c0, c1) = (self.alpha, self.c0, self.c1);
        if alpha == 0.0 {
            // d theta / ds = exp(-c1 s) / c0
            if c1 == 0.0 {
                s / c0
            } else {
                -(-c1 * s).exp_m1() / (c0 * c1)
            }
        } else if c0 == 0.0 {
            s * c1.powf(-alpha.recip())
        } else {
            // (c0 s + c1) = c1 (1 + x); the expm1/ln1p forms keep full
            // precision when c0 s is small against c1.
            let x = c0 * s / c1;
            if alpha == 1.0 {
                x.ln_1p() / c0
            } else {
                let p = (alpha - 1.0) / alpha;
                c1.powf(p) * (p * x.ln_1p()).exp_m1() / (p * c0)
            }
        }
    }

    /// Tangent angle `theta(s)`, with `theta(0) = c2` and `d theta/ds = 1/rho`.
    pub fn tangent_angle(&self, s: f64) -> CurveResult<f64> {
        self.check_domain(s)?;
        Ok(self.c2 + self.turning(s))
    }

    /// Position at arc length `s` by adaptive quadrature of the unit tangent.
    pub fn evaluate(&self, s: f64, quad: &QuadConfig) -> CurveResult<Point2<f64>> {
        self.check_domain(s)?;
        let local = self.integrate_tangent(0.0, s, quad)?;
        Ok(self.p0 + Rotation2::new(self.c2) * local)
    }

    /// Unrotated chord `integral_a^b (cos t(u), sin t(u)) du`.
    fn integrate_tangent(&self, a: f64, b: f64, quad: &QuadConfig) -> CurveResult<Vector2<f64>> {
        quadrature::integrate(
            |u| {
                let t = self.turning(u);
                Vector2::new(t.cos(), t.sin())
            },
            a,
            b,
            quad,
        )
        .map_err(CurveError::QuadratureDiverged)
    }

    /// `n` points at uniform arc-length spacing over `[0, s_max]`.
    ///
    /// Points are accumulated segment by segment, each segment integrated to
    /// `quad.abs_tol / (n - 1)` so the total error budget matches a single
    /// [`evaluate`](Self::evaluate) call.
    pub fn sample(&self, s_max: f64, n: usize, quad: &QuadConfig) -> CurveResult<Polyline2D> {
        if n < 2 {
            return Err(CurveError::TooFewPoints { needed: 2, got: n });
        }
        if !(s_max > 0.0 && s_max.is_finite()) {
            return Err(CurveError::InvalidArgument("s_max must be positive"));
        }
        self.check_domain(s_max)?;
        let segments = n - 1;
        let seg_quad = QuadConfig {
            abs_tol: quad.abs_tol / segments as f64,
            ..*quad
        };
        let rot = Rotation2::new(self.c2);
        let mut points = Vec::with_capacity(n);
        let mut acc = Vector2::zeros();
        points.push(self.p0);
        let mut prev = 0.0;
        for i in 1..n {
            let s = s_max * i as f64 / segments as f64;
            acc += self.integrate_tangent(prev, s, &seg_quad)?;
            points.push(self.p0 + rot * acc);
            prev = s;
        }
        Polyline2D::new(points)
    }
}

/// `rho(s)` for the given parameters.
pub fn radius_of_curvature(params: &LaCurveParams, s: f64) -> CurveResult<f64> {
    params.radius(s)
}

/// `theta(s)`, the tangent direction at arc length `s`.
pub fn tangent_angle(params: &LaCurveParams, s: f64) -> CurveResult<f64> {
    params.tangent_angle(s)
}

pub fn evaluate_point(
    params: &LaCurveParams,
    s: f64,
    quad: &QuadConfig,
) -> CurveResult<Point2<f64>> {
    params.evaluate(s, quad)
}

pub fn sample_curve(
    params: &LaCurveParams,
    s_max: f64,
    n: usize,
    quad: &QuadConfig,
) -> CurveResult<Polyline2D> {
    params.sample(s_max, n, quad)
}
