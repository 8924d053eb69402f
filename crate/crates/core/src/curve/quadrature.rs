//! Globally adaptive Gauss-Kronrod (7/15) quadrature of planar vector
//! integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Target absolute error on the integral (Euclidean norm).
    pub abs_tol: f64,
    /// Upper bound on interval splits before giving up.
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_subdivisions: 4000,
        }
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for the odd Kronrod nodes (1, 3, 5) and the center.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F>(f: &F, a: f64, b: f64) -> (Vector2<f64>, f64)
where
    F: Fn(f64) -> Vector2<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += sum * WGK[j];
        if j % 2 == 1 {
            gauss += sum * WG[j / 2];
        }
    }
    let kronrod = kronrod * half;
    let gauss = gauss * half;
    (kronrod, (kronrod - gauss).norm())
}

struct Piece {
    a: f64,
    b: f64,
    value: Vector2<f64>,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Piece {}

impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integral of `f` over `[a, b]`. Returns `Err` with
/// the final error estimate when the tolerance was not met.
pub fn integrate<F>(f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<Vector2<f64>, f64>
where
    F: Fn(f64) -> Vector2<f64>,
{
    if a == b {
        return Ok(Vector2::zeros());
    }
    let (value, error) = gk15(&f, a, b);
    let mut total_err = error;
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value, error });

    let mut splits = 0;
    while total_err > cfg.abs_tol {
        if splits >= cfg.max_subdivisions {
            return Err(total_err);
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = gk15(&f, worst.a, mid);
        let (rv, re) = gk15(&f, mid, worst.b);
        total_err += le + re - worst.error;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
        splits += 1;
        // Re-sum occasionally so running-total drift never fakes convergence.
        if splits % 64 == 0 {
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    Ok(heap.iter().map(|p| p.value).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let v = integrate(
            |x| Vector2::new(x.powi(5), 1.0),
            -1.0,
            2.0,
            &QuadConfig::default(),
        )
        .unwrap();
        assert!((v.x - (64.0 - 1.0) / 6.0).abs() < 1e-13);
        assert!((v.y - 3.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_integrand() {
        // Fresnel-type integrand over a long interval.
        let v = integrate(
            |x| Vector2::new((x * x).cos(), (x * x).sin()),
            0.0,
            10.0,
            &QuadConfig::default(),
        )
        .unwrap();
        // Reference from a dense midpoint rule.
        let n = 2_000_000;
        let h = 10.0 / n as f64;
        let mut r = Vector2::zeros();
        for i in 0..n {
            let x = (i as f64 + 0.5) * h;
            r += Vector2::new((x * x).cos(), (x * x).sin()) * h;
        }
        assert!((v - r).norm() < 1e-7, "{v:?} vs {r:?}");
    }

    #[test]
    fn reports_non_convergence() {
        let cfg = QuadConfig {
            abs_tol: 1e-14,
            max_subdivisions: 3,
        };
        assert!(integrate(|x| Vector2::new((50.0 * x).sin(), 0.0), 0.0, 10.0, &cfg).is_err());
    }
}
