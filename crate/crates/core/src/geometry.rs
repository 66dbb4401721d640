//! Planar helpers for paths in shape space `(y, s)`, with `y` on the
//! horizontal axis.

/// Signed area of the closed polygon through `points` (shoelace formula).
///
/// Counter-clockwise loops are positive. The polygon is closed implicitly
/// (last vertex joined to the first). Coordinates are taken relative to the
/// first vertex, which keeps the cancellation small for paths far from the
/// origin.
pub fn signed_area(points: &[(f64, f64)]) -> f64 {
    let Some(&(x0, y0)) = points.first() else {
        return 0.0;
    };
    let n = points.len();
    let mut twice = 0.0;
    for i in 0..n {
        let (xa, ya) = points[i];
        let (xb, yb) = points[(i + 1) % n];
        twice += (xa - x0) * (yb - y0) - (xb - x0) * (ya - y0);
    }
    0.5 * twice
}

/// `∮ s dy` along a polyline, trapezoid rule on each segment.
///
/// For a closed polygon this equals `-signed_area` exactly.
pub fn polyline_s_dy(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
        .sum()
}

/// Trapezoidal quadrature of uniformly sampled values with spacing `dt`.
pub fn trapezoid(values: &[f64], dt: f64) -> f64 {
    match values {
        [] | [_] => 0.0,
        [first, inner @ .., last] => dt * (0.5 * (first + last) + inner.iter().sum::<f64>()),
    }
}
