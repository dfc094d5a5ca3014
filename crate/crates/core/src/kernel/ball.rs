use crate::error::{GeomError, Result};
use crate::scalar::Scalar;

pub const MAX_BALL_DIM: usize = 200;

/// `ln v_n` where `v_n = π^{n/2} / Γ(n/2 + 1)`.
pub fn ln_unit_ball_volume(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    h * std::f64::consts::PI.ln() - libm::lgamma(h + 1.0)
}

/// Volume of the Euclidean unit ball in R^n, for `1 <= n <= 200`.
pub fn unit_ball_volume<T: Scalar>(n: usize) -> Result<T> {
    if n == 0 || n > MAX_BALL_DIM {
        return Err(GeomError::InvalidInput(format!(
            "ball dimension {n} outside 1..={MAX_BALL_DIM}"
        )));
    }
    Ok(T::lit(ln_unit_ball_volume(n).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn low_dimensions() {
        assert!((unit_ball_volume::<f64>(1).unwrap() - 2.0).abs() < 1e-14);
        assert!((unit_ball_volume::<f64>(2).unwrap() - PI).abs() < 1e-14);
        assert!((unit_ball_volume::<f64>(3).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!(unit_ball_volume::<f64>(0).is_err());
        assert!(unit_ball_volume::<f64>(201).is_err());
    }

    #[test]
    fn two_step_recursion() {
        for n in 3..=200 {
            let a: f64 = unit_ball_volume(n).unwrap();
            let b: f64 = unit_ball_volume::<f64>(n - 2).unwrap() * 2.0 * PI / n as f64;
            assert!(((a - b) / a).abs() <= 1e-12, "n = {n}");
        }
    }
}
