//! Smooth radial bump: 1 on the half ball, 0 outside the unit ball, glued by
//! the exponential smooth step S(t) = q(t)/(q(t) + q(1-t)), q(t) = e^{-1/t}.

/// phi(x) = g(|x|), smooth, 0 <= phi <= 1, phi = 1 on B_{1/2}, phi = 0
/// outside B_1.
pub fn bump_eval(dim: usize, x: [f64; 2]) -> f64 {
    let r = if dim == 1 { x[0].abs() } else { (x[0] * x[0] + x[1] * x[1]).sqrt() };
    bump_radial(r)
}

pub fn bump_radial(r: f64) -> f64 {
    if r <= 0.5 {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        smooth_step(2.0 * (1.0 - r))
    }
}

fn q(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// S(0) = 0, S(1) = 1, all derivatives vanish at both ends.
fn smooth_step(t: f64) -> f64 {
    let a = q(t);
    let b = q(1.0 - t);
    a / (a + b)
}
