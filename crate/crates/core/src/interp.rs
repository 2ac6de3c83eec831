//! Cubic (Catmull-Rom) interpolation on uniformly sampled profiles.

/// Evaluates the Catmull-Rom cubic through `samples` placed at
/// `start + k * spacing`. Outside the sampled span the profile is zero.
pub fn catmull_rom(samples: &[f64], start: f64, spacing: f64, x: f64) -> f64 {
    let len = samples.len();
    if len == 0 || !x.is_finite() {
        return 0.0;
    }
    let pos = (x - start) / spacing;
    let last = (len - 1) as f64;
    if pos < 0.0 || pos > last {
        return 0.0;
    }
    if len == 1 {
        return samples[0];
    }
    let i = (pos.floor() as usize).min(len - 2);
    let s = pos - i as f64;
    let p1 = samples[i];
    let p2 = samples[i + 1];
    // one-sided closure at the ends: linear extrapolation of the missing neighbour
    let p0 = if i > 0 { samples[i - 1] } else { 2.0 * p1 - p2 };
    let p3 = if i + 2 < len { samples[i + 2] } else { 2.0 * p2 - p1 };
    let s2 = s * s;
    let s3 = s2 * s;
    0.5 * (2.0 * p1
        + (p2 - p0) * s
        + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * s2
        + (3.0 * p1 - p0 - 3.0 * p2 + p3) * s3)
}

/// Linear interpolation of the abscissa where `y` crosses `level` between
/// `(x0, y0)` and `(x1, y1)`.
pub(crate) fn crossing(x0: f64, y0: f64, x1: f64, y1: f64, level: f64) -> f64 {
    if y1 == y0 {
        return 0.5 * (x0 + x1);
    }
    x0 + (level - y0) * (x1 - x0) / (y1 - y0)
}

/// Vertex offset (in samples, within [-0.5, 0.5]) of the parabola through
/// three equally spaced samples centred on a discrete maximum.
pub(crate) fn parabolic_vertex(left: f64, mid: f64, right: f64) -> f64 {
    let denom = left - 2.0 * mid + right;
    if denom == 0.0 {
        return 0.0;
    }
    (0.5 * (left - right) / denom).clamp(-0.5, 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passes_through_nodes() {
        let s = [0.0, 1.0, 4.0, 9.0, 16.0];
        for (k, v) in s.iter().enumerate() {
            assert_eq!(catmull_rom(&s, 0.0, 1.0, k as f64), *v);
        }
    }

    #[test]
    fn exact_for_quadratics_in_the_interior() {
        let s: Vec<f64> = (0..10).map(|k| (k as f64 * 0.5).powi(2)).collect();
        let x = 2.3;
        assert!((catmull_rom(&s, 0.0, 0.5, x) - x * x).abs() < 1e-12);
    }

    #[test]
    fn zero_outside_support() {
        let s = [1.0, 1.0, 1.0];
        assert_eq!(catmull_rom(&s, 1.0, 1.0, 0.999), 0.0);
        assert_eq!(catmull_rom(&s, 1.0, 1.0, 3.001), 0.0);
        assert_eq!(catmull_rom(&s, 1.0, 1.0, 2.5), 1.0);
    }

    #[test]
    fn vertex_of_symmetric_parabola() {
        assert_eq!(parabolic_vertex(1.0, 2.0, 1.0), 0.0);
        // y = -(x - 0.25)^2 sampled at -1, 0, 1
        let f = |x: f64| -(x - 0.25) * (x - 0.25);
        assert!((parabolic_vertex(f(-1.0), f(0.0), f(1.0)) - 0.25).abs() < 1e-12);
    }
}
