//! LCG slope recovery, self-affinity and the J_LAC functional.

use super::{CurveError, CurveResult, LaCurveParams, Polyline2D};

/// Minimum polyline length accepted by [`lcg_slope`].
pub const LCG_MIN_POINTS: usize = 10;

/// Relative spread of the radius below which curvature counts as constant.
const CONSTANT_RADIUS_TOL: f64 = 1e-6;

/// Least-squares slope of `log(rho |ds/drho|)` against `log(rho)`.
///
/// Radii come from circumcircles of consecutive point triples, `ds/drho` from
/// central divided differences, and the two end radii are discarded.
pub fn lcg_slope(curve: &Polyline2D) -> CurveResult<f64> {
    if curve.len() < LCG_MIN_POINTS {
        return Err(CurveError::TooFewPoints {
            needed: LCG_MIN_POINTS,
            got: curve.len(),
        });
    }
    let rho = curve.radii()?;
    // radii[j] sits at point j + 1
    let s = &curve.arc_lengths()[1..curve.len() - 1];

    let (lo, hi) = rho
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    let mean = rho.iter().sum::<f64>() / rho.len() as f64;
    if (hi - lo) <= CONSTANT_RADIUS_TOL * mean {
        return Err(CurveError::ConstantCurvature);
    }
    let increasing = rho[1] > rho[0];
    if !rho
        .windows(2)
        .all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] })
    {
        return Err(CurveError::NonMonotone);
    }

    let mut xs = Vec::with_capacity(rho.len() - 2);
    let mut ys = Vec::with_capacity(rho.len() - 2);
    for m in 1..rho.len() - 1 {
        let ds_drho = (s[m + 1] - s[m - 1]) / (rho[m + 1] - rho[m - 1]);
        xs.push(rho[m].ln());
        ys.push((rho[m] * ds_drho.abs()).ln());
    }
    Ok(least_squares_slope(&xs, &ys))
}

fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Anything with a radius of curvature as a function of arc length.
pub trait RadiusProfile {
    /// `None` outside the profile's domain.
    fn radius_at(&self, s: f64) -> Option<f64>;
}

impl RadiusProfile for LaCurveParams {
    fn radius_at(&self, s: f64) -> Option<f64> {
        self.radius(s).ok()
    }
}

impl<F: Fn(f64) -> f64> RadiusProfile for F {
    fn radius_at(&self, s: f64) -> Option<f64> {
        let r = self(s);
        (r.is_finite() && r > 0.0).then_some(r)
    }
}

/// Deviation from self-affinity under removal of the head `[0, b)`.
///
/// Finds the scale `a > 0` for which `rho(s) / rho(a s + b)` equals
/// `f_n = rho(0) / rho(b)` at the probe point `s = s_end`, then returns the
/// largest relative deviation of that ratio from `f_n` over `samples`
/// uniformly spaced points of `[0, s_end]`.
pub fn self_affinity_residual<P: RadiusProfile + ?Sized>(
    profile: &P,
    b: f64,
    s_end: f64,
    samples: usize,
) -> CurveResult<f64> {
    if !(b > 0.0) {
        return Err(CurveError::InvalidArgument("b must be positive"));
    }
    if !(s_end > 0.0) || samples < 2 {
        return Err(CurveError::InvalidArgument(
            "need a positive probe domain and at least two samples",
        ));
    }
    let rho = |s: f64| profile.radius_at(s).ok_or(CurveError::ZeroRadius(s));
    let f_n = rho(0.0)? / rho(b)?;
    let target = rho(s_end)? / f_n;
    let a = solve_scale(profile, b, s_end, target).ok_or(CurveError::NoAffineMap(b))?;

    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let s = s_end * i as f64 / (samples - 1) as f64;
        let ratio = rho(s)? / rho(a * s + b)?;
        worst = worst.max((ratio - f_n).abs() / f_n);
    }
    Ok(worst)
}

// Root of rho(a * s + b) = target in a, by a log-spaced scan then bisection.
fn solve_scale<P: RadiusProfile + ?Sized>(profile: &P, b: f64, s: f64, target: f64) -> Option<f64> {
    let g = |a: f64| profile.radius_at(a * s + b).map(|r| r - target);
    const STEPS: usize = 240;
    let grid = |i: usize| 10f64.powf(-6.0 + 12.0 * i as f64 / STEPS as f64);
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=STEPS {
        let a = grid(i);
        let Some(ga) = g(a) else {
            prev = None;
            continue;
        };
        if ga == 0.0 {
            return Some(a);
        }
        if let Some((pa, pg)) = prev {
            if pg.signum() != ga.signum() {
                let (mut lo, mut hi, mut glo) = (pa, a, pg);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let gm = g(mid)?;
                    if gm == 0.0 {
                        return Some(mid);
                    }
                    if gm.signum() == glo.signum() {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                return Some(0.5 * (lo + hi));
            }
        }
        prev = Some((a, ga));
    }
    None
}

/// Length of the `(s, sigma)` polyline: the trapezoidal form of
/// `integral sqrt(1 + sigma_s^2) ds` for a piecewise-linear profile.
pub fn j_lac_profile(s: &[f64], sigma: &[f64]) -> f64 {
    assert_eq!(s.len(), sigma.len(), "profile lengths differ");
    s.windows(2)
        .zip(sigma.windows(2))
        .map(|(ds, dg)| (ds[1] - ds[0]).hypot(dg[1] - dg[0]))
        .sum()
}

/// Discrete J_LAC of a polyline with `sigma = rho^alpha` sampled at the
/// interior points.
pub fn discrete_j_lac(curve: &Polyline2D, alpha: f64) -> CurveResult<f64> {
    let rho = curve.radii()?;
    let s = &curve.arc_lengths()[1..curve.len() - 1];
    let sigma: Vec<f64> = rho.iter().map(|r| r.powf(alpha)).collect();
    Ok(j_lac_profile(s, &sigma))
}
