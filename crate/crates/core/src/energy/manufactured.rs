//! Singular manufactured solution on the L-shape,
//! `u = 2 r^{-4/3} x y (1 - x^2)(1 - y^2)`, with load `f = -Δu + u^3`.
//!
//! Writing `u = 2 s g` with `s = r^{-4/3}` and `g = x y (1-x^2)(1-y^2)`:
//! `∇s = -4/3 r^{-10/3} (x, y)`, `Δs = 16/9 r^{-10/3}`, hence
//! `Δu = 2 (s Δg + 2 ∇s·∇g + g Δs)`.

use super::EnergyError;

fn parts(x: f64, y: f64) -> (f64, f64, [f64; 2], f64) {
    let r2 = x * x + y * y;
    let s = r2.powf(-2.0 / 3.0);
    let g = x * y * (1.0 - x * x) * (1.0 - y * y);
    let gx = y * (1.0 - y * y) * (1.0 - 3.0 * x * x);
    let gy = x * (1.0 - x * x) * (1.0 - 3.0 * y * y);
    let lap_g = -6.0 * x * y * ((1.0 - y * y) + (1.0 - x * x));
    (s, g, [gx, gy], lap_g)
}

pub fn singular_solution(x: f64, y: f64) -> f64 {
    let (s, g, _, _) = parts(x, y);
    2.0 * s * g
}

pub fn singular_gradient(x: f64, y: f64) -> [f64; 2] {
    let (s, g, [gx, gy], _) = parts(x, y);
    let r2 = x * x + y * y;
    // ∇s = -4/3 s / r^2 (x, y)
    let ds = -4.0 / 3.0 * s / r2;
    [2.0 * (g * ds * x + s * gx), 2.0 * (g * ds * y + s * gy)]
}

pub fn singular_laplacian(x: f64, y: f64) -> f64 {
    let (s, g, [gx, gy], lap_g) = parts(x, y);
    let r2 = x * x + y * y;
    let grad_s_dot_grad_g = -4.0 / 3.0 * s / r2 * (x * gx + y * gy);
    let lap_s = 16.0 / 9.0 * s / r2;
    2.0 * (s * lap_g + 2.0 * grad_s_dot_grad_g + g * lap_s)
}

/// Load for the singular manufactured solution with cubic reaction.
pub fn manufactured_rhs(x: f64, y: f64) -> Result<f64, EnergyError> {
    if x == 0.0 && y == 0.0 {
        return Err(EnergyError::NonFiniteLoad { x, y });
    }
    let u = singular_solution(x, y);
    let f = -singular_laplacian(x, y) + u * u * u;
    if f.is_finite() {
        Ok(f)
    } else {
        Err(EnergyError::NonFiniteLoad { x, y })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Fourth-order central-difference Laplacian.
    fn fd_laplacian(u: impl Fn(f64, f64) -> f64, x: f64, y: f64, h: f64) -> f64 {
        let d2 = |f: &dyn Fn(f64) -> f64| {
            (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h)
        };
        d2(&|t| u(x + t, y)) + d2(&|t| u(x, y + t))
    }

    #[test]
    fn rhs_matches_finite_difference_laplacian() {
        for &(x, y) in &[(0.5, 0.5), (-0.3, 0.7), (-0.6, -0.2), (0.25, 0.8)] {
            let f = manufactured_rhs(x, y).unwrap();
            let u = singular_solution(x, y);
            let fd = -fd_laplacian(singular_solution, x, y, 1e-4) + u * u * u;
            assert!(((f - fd) / f).abs() < 1e-6, "({x},{y}): {f} vs {fd}");
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let h = 1e-6;
        for &(x, y) in &[(0.5, 0.5), (-0.3, 0.7), (-0.6, -0.2)] {
            let g = singular_gradient(x, y);
            let gx = (singular_solution(x + h, y) - singular_solution(x - h, y)) / (2.0 * h);
            let gy = (singular_solution(x, y + h) - singular_solution(x, y - h)) / (2.0 * h);
            assert!((g[0] - gx).abs() < 1e-7 && (g[1] - gy).abs() < 1e-7);
        }
    }

    #[test]
    fn symmetric_in_x_and_y() {
        for &(a, b) in &[(0.2, 0.7), (-0.4, 0.1), (-0.9, -0.3)] {
            assert!((manufactured_rhs(a, b).unwrap() - manufactured_rhs(b, a).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn vanishes_on_lshape_boundary() {
        for t in [-0.9f64, -0.5, -0.1, 0.3, 0.8] {
            assert_eq!(singular_solution(1.0, t.abs()), 0.0);
            assert_eq!(singular_solution(t, 1.0), 0.0);
            assert_eq!(singular_solution(t.min(0.0), -1.0), 0.0);
            assert_eq!(singular_solution(0.0, -t.abs()), 0.0);
            assert_eq!(singular_solution(t.abs(), 0.0), 0.0);
            assert_eq!(singular_solution(-1.0, t), 0.0);
        }
    }

    #[test]
    fn origin_is_rejected() {
        assert!(matches!(
            manufactured_rhs(0.0, 0.0),
            Err(EnergyError::NonFiniteLoad { .. })
        ));
    }
}
