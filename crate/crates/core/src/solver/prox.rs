use crate::linops::Restriction;

/// Soft threshold `sign(v) max(|v| - step ω, 0)`; zero weights pass through.
pub fn prox_weighted_l1(v: &mut [f64], weights: &[f64], step: f64) {
    assert_eq!(v.len(), weights.len(), "weights length");
    for (x, &w) in v.iter_mut().zip(weights) {
        let t = step * w;
        *x = if *x > t {
            *x - t
        } else if *x < -t {
            *x + t
        } else {
            0.0
        };
    }
}

/// Projects the entries of `z` selected by `keep` onto the ball
/// `‖y - w‖₂ ≤ tau`; the other entries are left alone.
pub fn prox_l2_ball(z: &mut [f64], y: &[f64], tau: f64, keep: &Restriction) {
    assert_eq!(z.len(), keep.full_len(), "ball projection input");
    assert_eq!(y.len(), keep.kept().len(), "ball projection center");
    let dist = keep
        .kept()
        .iter()
        .zip(y)
        .map(|(&k, &c)| (z[k] - c).powi(2))
        .sum::<f64>()
        .sqrt();
    if dist <= tau {
        return;
    }
    let scale = tau / dist;
    for (&k, &c) in keep.kept().iter().zip(y) {
        z[k] = c + scale * (z[k] - c);
    }
}

/// Clamps kept entries to `[lo, hi]` and zeroes the rest.
pub fn prox_box_and_zero(x: &mut [f64], lo: f64, hi: f64, kept: &[bool]) {
    assert_eq!(x.len(), kept.len(), "box projection input");
    for (v, &k) in x.iter_mut().zip(kept) {
        *v = if k { v.clamp(lo, hi) } else { 0.0 };
    }
}
