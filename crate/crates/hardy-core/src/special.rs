//! Gamma/Beta special functions and sphere/ball geometric constants.
//!
//! Every sharp-constant formula in the crate is a product of Gamma values,
//! Beta values, and powers of the unit-sphere area `omega_n` and unit-ball
//! volume `nu_n`, so these four functions are the numerical bedrock.

use crate::error::{Error, Result};

/// Lanczos coefficients, g = 7, 9 terms. Accurate to ~1e-15 relative for
/// positive arguments in double precision.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64 - 1.0);
    }
    acc
}

/// Gamma function for positive real arguments.
///
/// Relative error below 1e-12 on [0.1, 170]; errors out for x <= 0 and
/// for x > 170 where the result would leave double range.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("gamma requires x > 0, got {x}")));
    }
    if x > 170.0 {
        return Err(Error::Overflow(format!("gamma({x}) exceeds double range")));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let val = (2.0 * std::f64::consts::PI).sqrt()
        * t.powf(z + 0.5)
        * (-t).exp()
        * lanczos_sum(x);
    if !val.is_finite() {
        return Err(Error::Overflow(format!("gamma({x}) overflowed")));
    }
    Ok(val)
}

/// Natural log of the Gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    // Reflection is unnecessary: callers only ever pass positive arguments.
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t
        + lanczos_sum(x).ln())
}

/// Beta function B(z, w) = Gamma(z)Gamma(w)/Gamma(z+w), computed in
/// log-space so that arguments of very different magnitude do not overflow.
pub fn beta(z: f64, w: f64) -> Result<f64> {
    if z <= 0.0 || w <= 0.0 {
        return Err(Error::Domain(format!(
            "beta requires positive arguments, got ({z}, {w})"
        )));
    }
    let ln_b = ln_gamma(z)? + ln_gamma(w)? - ln_gamma(z + w)?;
    let val = ln_b.exp();
    if !val.is_finite() {
        return Err(Error::Overflow(format!("beta({z}, {w}) overflowed")));
    }
    Ok(val)
}

/// Surface area of the unit sphere S^{n-1}: omega_n = 2 pi^{n/2} / Gamma(n/2).
pub fn unit_sphere_area(n: i64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain(format!("dimension must be >= 1, got {n}")));
    }
    let nh = n as f64 / 2.0;
    Ok(2.0 * std::f64::consts::PI.powf(nh) / gamma(nh)?)
}

/// Volume of the unit ball: nu_n = pi^{n/2} / Gamma(1 + n/2).
pub fn unit_ball_volume(n: i64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain(format!("dimension must be >= 1, got {n}")));
    }
    let nh = n as f64 / 2.0;
    Ok(std::f64::consts::PI.powf(nh) / gamma(1.0 + nh)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn gamma_known_values() {
        assert!(rel(gamma(1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(gamma(0.5).unwrap(), std::f64::consts::PI.sqrt()) < 1e-13);
        assert!(rel(gamma(6.0).unwrap(), 120.0) < 1e-13);
        // half-integer: Gamma(7/2) = 15 sqrt(pi) / 8
        assert!(rel(
            gamma(3.5).unwrap(),
            15.0 * std::f64::consts::PI.sqrt() / 8.0
        ) < 1e-13);
    }

    #[test]
    fn gamma_recurrence_over_range() {
        // Gamma(x+1) = x Gamma(x) across [0.1, 169]
        let mut x = 0.1;
        while x < 169.0 {
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert!(rel(lhs, rhs) < 1e-12, "recurrence failed at x={x}");
            x *= 1.37;
        }
    }

    #[test]
    fn gamma_domain_and_overflow() {
        assert!(matches!(gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(gamma(-3.2), Err(Error::Domain(_))));
        assert!(matches!(gamma(171.0), Err(Error::Overflow(_))));
    }

    #[test]
    fn beta_known_values() {
        assert!(rel(beta(1.0, 1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(beta(2.0, 3.0).unwrap(), 1.0 / 12.0) < 1e-13);
        assert!(rel(beta(0.5, 0.5).unwrap(), std::f64::consts::PI) < 1e-13);
        assert!(matches!(beta(-1.0, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn beta_gamma_identity_random() {
        // B(z,w) Gamma(z+w) = Gamma(z) Gamma(w) on 1000 draws from (0, 50]^2
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let z: f64 = rng.gen::<f64>() * 49.9 + 0.1;
            let w: f64 = rng.gen::<f64>() * 49.9 + 0.1;
            if z + w > 169.0 {
                continue;
            }
            let lhs = beta(z, w).unwrap() * gamma(z + w).unwrap();
            let rhs = gamma(z).unwrap() * gamma(w).unwrap();
            assert!(rel(lhs, rhs) < 1e-10, "identity failed at ({z}, {w})");
        }
    }

    #[test]
    fn sphere_and_ball_constants() {
        assert!(rel(unit_sphere_area(2).unwrap(), 2.0 * std::f64::consts::PI) < 1e-14);
        assert!(rel(unit_sphere_area(3).unwrap(), 4.0 * std::f64::consts::PI) < 1e-14);
        assert!(rel(unit_sphere_area(1).unwrap(), 2.0) < 1e-14);
        assert!(rel(unit_ball_volume(2).unwrap(), std::f64::consts::PI) < 1e-14);
        assert!(rel(unit_ball_volume(3).unwrap(), 4.0 * std::f64::consts::PI / 3.0) < 1e-14);
        assert!(rel(unit_ball_volume(1).unwrap(), 2.0) < 1e-14);
        assert!(unit_sphere_area(0).is_err());
    }

    #[test]
    fn sphere_equals_n_times_ball() {
        for n in 1..=20 {
            let omega = unit_sphere_area(n).unwrap();
            let nu = unit_ball_volume(n).unwrap();
            assert!(rel(omega, n as f64 * nu) < 1e-12);
        }
    }

    #[test]
    fn gamma_log_convex() {
        let grid: Vec<f64> = (0..40).map(|i| 0.5 + i as f64 * 0.5).collect();
        for &x in &grid {
            for &y in &grid {
                let lhs = gamma(x).unwrap() * gamma(y).unwrap();
                let rhs = gamma((x + y) / 2.0).unwrap().powi(2);
                assert!(lhs >= rhs * (1.0 - 1e-12));
            }
        }
    }
}
