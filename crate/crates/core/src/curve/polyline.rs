use nalgebra::Point2;

use super::{CurveError, CurveResult};

/// Ordered planar points with chord-based discrete differential quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline2D {
    points: Vec<Point2<f64>>,
}

impl Polyline2D {
    /// Rejects consecutive duplicates.
    pub fn new(points: Vec<Point2<f64>>) -> CurveResult<Self> {
        for (i, w) in points.windows(2).enumerate() {
            if w[0] == w[1] {
                return Err(CurveError::RepeatedPoint(i, i + 1));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Point2<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn chord_lengths(&self) -> Vec<f64> {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).collect()
    }

    /// Cumulative chord length at every point, starting at zero.
    pub fn arc_lengths(&self) -> Vec<f64> {
        let mut s = Vec::with_capacity(self.points.len());
        let mut acc = 0.0;
        if !self.points.is_empty() {
            s.push(0.0);
        }
        for c in self.chord_lengths() {
            acc += c;
            s.push(acc);
        }
        s
    }

    pub fn total_length(&self) -> f64 {
        self.chord_lengths().iter().sum()
    }

    /// Direction of each segment, unwrapped to be continuous.
    pub fn tangent_angles(&self) -> Vec<f64> {
        let mut out: Vec<f64> = Vec::with_capacity(self.points.len().saturating_sub(1));
        for w in self.points.windows(2) {
            let d = w[1] - w[0];
            let mut a = d.y.atan2(d.x);
            if let Some(&prev) = out.last() {
                a += std::f64::consts::TAU * ((prev - a) / std::f64::consts::TAU).round();
            }
            out.push(a);
        }
        out
    }

    /// Signed curvature of the circle through each interior point and its two
    /// neighbors (positive when turning left). One value per interior point.
    pub fn curvatures(&self) -> Vec<f64> {
        self.points
            .windows(3)
            .map(|w| {
                let (a, b, c) = (w[1] - w[0], w[2] - w[1], w[2] - w[0]);
                2.0 * a.perp(&b) / (a.norm() * b.norm() * c.norm())
            })
            .collect()
    }

    /// Circumradius at each interior point; fails on collinear triples.
    pub fn radii(&self) -> CurveResult<Vec<f64>> {
        if self.points.len() < 3 {
            return Err(CurveError::TooFewPoints {
                needed: 3,
                got: self.points.len(),
            });
        }
        self.curvatures()
            .into_iter()
            .enumerate()
            .map(|(i, k)| {
                let r = k.abs().recip();
                if r.is_finite() {
                    Ok(r)
                } else {
                    Err(CurveError::Collinear(i + 1))
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(r: f64, n: usize) -> Polyline2D {
        Polyline2D::new(
            (0..n)
                .map(|i| {
                    let t = i as f64 * 0.01;
                    Point2::new(r * t.cos(), r * t.sin())
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn circumradius_of_points_on_a_circle() {
        let line = circle(2.5, 50);
        for r in line.radii().unwrap() {
            assert!((r - 2.5).abs() < 1e-9);
        }
        assert!(line.curvatures().iter().all(|&k| k > 0.0));
    }

    #[test]
    fn collinear_and_duplicate_points() {
        let pts = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(2.0, 0.0)];
        let line = Polyline2D::new(pts.clone()).unwrap();
        assert_eq!(line.radii(), Err(CurveError::Collinear(1)));
        let mut dup = pts;
        dup.insert(1, Point2::new(0.0, 0.0));
        assert_eq!(Polyline2D::new(dup), Err(CurveError::RepeatedPoint(0, 1)));
    }

    #[test]
    fn unwrapped_angles() {
        let line = circle(1.0, 1000);
        let a = line.tangent_angles();
        assert!(a.windows(2).all(|w| w[1] > w[0]));
        assert!(a.last().unwrap() - a[0] > 9.0);
    }
}
