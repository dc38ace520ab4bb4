//! The norm functionals on mixed radial-angular spaces.
//!
//! On the two-value pattern model every norm reduces to radial integrals:
//! the angular integral contributes `((omega_n/2)(|v_+|^pt + |v_-|^pt))^{1/pt}`
//! and the radial part is handled by the quadrature engine. Supremum-type
//! norms (weak, central Morrey, oscillation, Morrey-Herz) scan a log grid,
//! refine the best bracket by golden section, and detect unbounded growth
//! by extending the scan range.

use crate::error::{Error, Result};
use crate::funcspace::{angular_lp_norm, AngularPattern, MixedFunction, RadialProfile};
use crate::quadrature::{
    gauss16, integral_power_log, integrate_abs_pow_interval, integrate_signed_interval,
    sign_change_roots, QuadGrid,
};
use crate::special::{unit_ball_volume, unit_sphere_area};
use serde::{Deserialize, Serialize};

/// A norm functional with its exponent parameters. `p` is the radial
/// exponent, `pt` the angular one throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpaceSpec {
    /// Power-weighted mixed Lebesgue norm, weight r^alpha.
    MixedLebesgue { p: f64, pt: f64, alpha: f64 },
    /// Weak (Lorentz-type) counterpart of the weighted mixed norm.
    WeakMixed { p: f64, pt: f64, alpha: f64 },
    /// Central Morrey norm with scale parameter lambda.
    CentralMorrey { p: f64, pt: f64, lambda: f64 },
    /// Central mean oscillation against the ball average.
    Cmo { p: f64, pt: f64 },
    /// Lambda-central mean oscillation.
    LambdaCmo { p: f64, pt: f64, lambda: f64 },
    /// Dyadic-shell norm with weight 2^{k alpha}.
    Herz { alpha: f64, q: f64, p: f64, pt: f64 },
    /// Morrey-type supremum over truncated shell sums.
    MorreyHerz { alpha: f64, q: f64, lambda: f64, p: f64, pt: f64 },
}

impl SpaceSpec {
    pub fn validate(&self, n: i64) -> Result<()> {
        if n < 2 {
            return Err(Error::Domain(format!(
                "mixed radial-angular norms require n >= 2, got {n}"
            )));
        }
        let check_pt = |pt: f64| -> Result<()> {
            if !(pt > 1.0 && pt.is_finite()) {
                return Err(Error::Domain(format!(
                    "angular exponent must lie in (1, inf), got {pt}"
                )));
            }
            Ok(())
        };
        let check_p_strict = |p: f64| -> Result<()> {
            if !(p > 1.0 && p.is_finite()) {
                return Err(Error::Domain(format!(
                    "radial exponent must lie in (1, inf), got {p}"
                )));
            }
            Ok(())
        };
        // the strong and weak mixed norms also serve as source/target spaces
        // at p = 1, so only they accept the closed endpoint
        let check_p_weak = |p: f64| -> Result<()> {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(Error::Domain(format!(
                    "radial exponent must lie in [1, inf), got {p}"
                )));
            }
            Ok(())
        };
        match *self {
            SpaceSpec::MixedLebesgue { p, pt, .. } | SpaceSpec::WeakMixed { p, pt, .. } => {
                check_p_weak(p)?;
                check_pt(pt)?;
            }
            SpaceSpec::CentralMorrey { p, pt, lambda } => {
                check_p_strict(p)?;
                check_pt(pt)?;
                if !lambda.is_finite() {
                    return Err(Error::Domain("lambda must be finite".into()));
                }
            }
            SpaceSpec::Cmo { p, pt } => {
                check_p_strict(p)?;
                check_pt(pt)?;
            }
            SpaceSpec::LambdaCmo { p, pt, lambda } => {
                check_p_strict(p)?;
                check_pt(pt)?;
                if !(lambda > -1.0 / p && lambda < 1.0 / n as f64) {
                    return Err(Error::Domain(format!(
                        "oscillation parameter lambda = {lambda} must lie in (-1/p, 1/n)"
                    )));
                }
            }
            SpaceSpec::Herz { alpha, q, p, pt } => {
                check_p_strict(p)?;
                check_pt(pt)?;
                if !(q > 0.0 && q.is_finite()) || !alpha.is_finite() {
                    return Err(Error::Domain(format!(
                        "shell parameters must satisfy q > 0 and finite alpha, got q = {q}, alpha = {alpha}"
                    )));
                }
            }
            SpaceSpec::MorreyHerz { alpha, q, lambda, p, pt } => {
                check_p_strict(p)?;
                check_pt(pt)?;
                if !(q > 0.0 && q.is_finite()) || !alpha.is_finite() {
                    return Err(Error::Domain(format!(
                        "shell parameters must satisfy q > 0 and finite alpha, got q = {q}, alpha = {alpha}"
                    )));
                }
                if !(lambda >= 0.0 && lambda.is_finite()) {
                    return Err(Error::Domain(format!(
                        "Morrey shell parameter lambda = {lambda} must be >= 0"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Evaluate a norm functional.
pub fn norm(f: &MixedFunction, space: &SpaceSpec, n: i64, grid: &QuadGrid) -> Result<f64> {
    space.validate(n)?;
    grid.validate()?;
    match *space {
        SpaceSpec::MixedLebesgue { p, pt, alpha } => mixed_lebesgue_norm(f, p, pt, alpha, n, grid),
        SpaceSpec::WeakMixed { p, pt, alpha } => weak_mixed_norm(f, p, pt, alpha, n, grid),
        SpaceSpec::CentralMorrey { p, pt, lambda } => {
            central_morrey_norm(f, p, pt, lambda, n, grid)
        }
        SpaceSpec::Cmo { p, pt } => cmo_norm(f, p, pt, 0.0, n, grid),
        SpaceSpec::LambdaCmo { p, pt, lambda } => cmo_norm(f, p, pt, lambda, n, grid),
        SpaceSpec::Herz { alpha, q, p, pt } => herz_norm(f, alpha, q, p, pt, n, (-60, 60), grid),
        SpaceSpec::MorreyHerz { alpha, q, lambda, p, pt } => {
            morrey_herz_norm(f, alpha, q, lambda, p, pt, n, (-60, 60), grid)
        }
    }
}

fn pattern_factor(pattern: &AngularPattern, pt: f64, n: i64) -> Result<f64> {
    angular_lp_norm(pattern, 0.0, pt, n)
}

/// Weighted mixed Lebesgue norm.
pub fn mixed_lebesgue_norm(
    f: &MixedFunction,
    p: f64,
    pt: f64,
    alpha: f64,
    n: i64,
    grid: &QuadGrid,
) -> Result<f64> {
    let a = pattern_factor(&f.angular, pt, n)?;
    if a == 0.0 || f.radial.is_zero() {
        return Ok(0.0);
    }
    let radial = integrate_abs_pow_interval(
        &f.radial,
        p,
        n as f64 - 1.0 + alpha,
        0.0,
        f64::INFINITY,
        grid,
    )?;
    Ok(a * radial.powf(1.0 / p))
}

/// Weak counterpart: sup over lambda of lambda times the mixed norm of the
/// superlevel indicator.
pub fn weak_mixed_norm(
    f: &MixedFunction,
    p: f64,
    pt: f64,
    alpha: f64,
    n: i64,
    grid: &QuadGrid,
) -> Result<f64> {
    let nf = n as f64;
    if nf + alpha <= 0.0 {
        return Err(Error::Domain(format!(
            "weight exponent alpha = {alpha} must satisfy n + alpha > 0"
        )));
    }
    let (vp, vn) = (f.angular.value_pos.abs(), f.angular.value_neg.abs());
    let vmax = vp.max(vn);
    if vmax == 0.0 || f.radial.is_zero() {
        return Ok(0.0);
    }
    let g = &f.radial;
    let objective = |lambda: f64| weak_level_contribution(f, p, pt, alpha, n, lambda, grid);
    // candidate levels: where |g| crosses plateau values and sampled range
    let mut extras = Vec::new();
    for piece in g.pieces() {
        for &r in &[piece.lo.max(grid.r_min * 1e-3), piece.hi.min(grid.r_max * 1e3)] {
            if r > 0.0 && r.is_finite() {
                if let Ok(v) = g.eval(r) {
                    let v = v.abs();
                    if v > 0.0 {
                        for vv in [vp, vn] {
                            if vv > 0.0 {
                                extras.push(v * vv * (1.0 - 1e-9));
                                extras.push(v * vv * (1.0 + 1e-9));
                            }
                        }
                    }
                }
            }
        }
    }
    let mut sample_vals: Vec<f64> = grid
        .radii()
        .iter()
        .filter_map(|&r| g.eval(r).ok())
        .map(|v| v.abs() * vmax)
        .filter(|v| *v > 0.0)
        .collect();
    sample_vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (lo, hi) = if sample_vals.is_empty() {
        (1e-6, 1e6)
    } else {
        (sample_vals[0] * 1e-3, sample_vals[sample_vals.len() - 1] * 1e3)
    };
    sup_search(&objective, lo, hi, &extras, "weak norm supremum over levels")
}

/// The weak-norm integrand at a single level: lambda times the mixed norm of
/// the superlevel-set indicator. Zero exactly when the level exceeds the
/// essential sup of |f|, so an empty superlevel set is observable directly.
pub fn weak_level_contribution(
    f: &MixedFunction,
    p: f64,
    pt: f64,
    alpha: f64,
    n: i64,
    lambda: f64,
    grid: &QuadGrid,
) -> Result<f64> {
    let nf = n as f64;
    let w = nf - 1.0 + alpha;
    if nf + alpha <= 0.0 {
        return Err(Error::Domain(format!(
            "weight exponent alpha = {alpha} must satisfy n + alpha > 0"
        )));
    }
    if lambda <= 0.0 {
        return Err(Error::Domain(format!("level must be positive, got {lambda}")));
    }
    let (vp, vn) = (f.angular.value_pos.abs(), f.angular.value_neg.abs());
    if vp.max(vn) == 0.0 || f.radial.is_zero() {
        return Ok(0.0);
    }
    let omega = unit_sphere_area(n)?;
    let e = p / pt;
    let half = (omega / 2.0).powf(e);
    let double = half * 2f64.powf(e);
    let g = &f.radial;
    // weight measure of one hemisphere's superlevel set
    let measure = |threshold: f64| -> Result<f64> {
        let mut acc = 0.0;
        for (lo, hi) in superlevel_intervals(g, threshold, grid)? {
            acc += integral_power_log(1.0, w, 0, lo, hi)?;
        }
        Ok(acc)
    };
    // thresholds nest: the hemisphere with the larger |v| has the
    // larger superlevel set
    let (vbig, vsmall) = (vp.max(vn), vp.min(vn));
    let w_big = measure(lambda / vbig)?;
    let val = if vsmall == 0.0 {
        half * w_big
    } else {
        let w_small = measure(lambda / vsmall)?;
        double * w_small + half * (w_big - w_small)
    };
    Ok(lambda * val.powf(1.0 / p))
}

/// Maximal intervals where |g| exceeds a positive threshold. Unbounded
/// superlevel mass against the weight r^{n-1+alpha} is rejected.
fn superlevel_intervals(
    g: &RadialProfile,
    threshold: f64,
    grid: &QuadGrid,
) -> Result<Vec<(f64, f64)>> {
    let mut cuts: Vec<f64> = Vec::new();
    for piece in g.pieces() {
        if piece.is_zero() {
            continue;
        }
        // effective scan window inside the piece
        let mut a = piece.lo;
        let mut b = piece.hi;
        if a == 0.0 {
            let dom = crate::funcspace::RadialProfile::from_pieces(vec![piece.clone()])
                .ok()
                .and_then(|pr| pr.dominant_at_zero());
            let head_abs = |r: f64| piece.eval(r).abs();
            match dom {
                Some(t) if t.exponent < 0.0 || (t.exponent == 0.0 && t.ln_pow > 0) => {
                    // |g| blows up toward 0: superlevel reaches all the way in
                    a = shrink_until(&head_abs, b.min(grid.r_min), |v| v > threshold * 2.0)?;
                }
                Some(t) if t.exponent == 0.0 => {
                    // plateau at 0: no crossing hides below grid.r_min
                    a = (b.min(grid.r_min) * 1e-6).max(1e-280);
                }
                _ => {
                    a = shrink_until(&head_abs, b.min(grid.r_min), |v| v < threshold / 2.0)?;
                }
            }
        }
        if b.is_infinite() {
            let dom = crate::funcspace::RadialProfile::from_pieces(vec![piece.clone()])
                .ok()
                .and_then(|pr| pr.dominant_at_inf());
            let tail_abs = |r: f64| piece.eval(r).abs();
            match dom {
                Some(t) if t.exponent > 0.0 || (t.exponent == 0.0 && t.ln_pow > 0) => {
                    return Err(Error::Unbounded(
                        "superlevel set extends to infinity with infinite weight".into(),
                    ));
                }
                Some(t) if t.exponent == 0.0 => {
                    if t.coeff.abs() > threshold {
                        return Err(Error::Unbounded(
                            "superlevel set extends to infinity with infinite weight".into(),
                        ));
                    }
                    b = (a.max(grid.r_max) * 1e6).min(1e280);
                }
                _ => {
                    b = grow_until(&tail_abs, a.max(grid.r_max), |v| v < threshold / 2.0)?;
                }
            }
        }
        if a < b {
            let h = |r: f64| piece.eval(r).abs() - threshold;
            cuts.extend(sign_change_roots(&h, a, b, grid));
        }
    }
    // piece boundaries are potential jumps of |g| across the threshold
    for b in g.breakpoints() {
        if b.is_finite() && b > 0.0 {
            cuts.push(b);
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    // walk the crossings and keep the intervals where |g| > threshold
    let mut edges = vec![0.0];
    edges.extend(cuts.iter().copied());
    edges.push(f64::INFINITY);
    let mut out = Vec::new();
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = crate::funcspace::midpoint(lo, hi);
        let above = g.eval(mid).map(|v| v.abs() > threshold).unwrap_or(false);
        if above {
            if hi.is_infinite() {
                // |g| stays above the threshold out to the numeric horizon
                // and the weight has infinite mass there
                return Err(Error::Unbounded(
                    "superlevel set extends to infinity with infinite weight".into(),
                ));
            }
            out.push((lo, hi));
        }
    }
    Ok(out)
}

fn shrink_until<F: Fn(f64) -> f64>(f: &F, start: f64, done: impl Fn(f64) -> bool) -> Result<f64> {
    let mut r = start;
    for _ in 0..2000 {
        if done(f(r)) {
            return Ok(r);
        }
        r *= 0.5;
        if r < 1e-290 {
            break;
        }
    }
    Ok(r)
}

fn grow_until<F: Fn(f64) -> f64>(f: &F, start: f64, done: impl Fn(f64) -> bool) -> Result<f64> {
    let mut r = start;
    for _ in 0..2000 {
        if done(f(r)) {
            return Ok(r);
        }
        r *= 2.0;
        if r > 1e290 {
            break;
        }
    }
    Ok(r)
}

/// Central Morrey norm: sup over r of the scaled ball integral.
pub fn central_morrey_norm(
    f: &MixedFunction,
    p: f64,
    pt: f64,
    lambda: f64,
    n: i64,
    grid: &QuadGrid,
) -> Result<f64> {
    let a = pattern_factor(&f.angular, pt, n)?;
    if a == 0.0 || f.radial.is_zero() {
        return Ok(0.0);
    }
    let nf = n as f64;
    let nu = unit_ball_volume(n)?;
    let g = f.radial.clone();
    let objective = move |r: f64| -> Result<f64> {
        let v = integrate_abs_pow_interval(&g, p, nf - 1.0, 0.0, r, grid)?;
        Ok(a * (v / (nu * r.powf(nf * (1.0 + lambda * p)))).powf(1.0 / p))
    };
    let extras = f.radial.breakpoints();
    sup_search(
        &objective,
        grid.r_min,
        grid.r_max,
        &extras,
        "central Morrey supremum over scales",
    )
}

/// Oscillation norm (lambda = 0 gives plain central mean oscillation);
/// the deviation is taken against the ball average of f.
pub fn cmo_norm(
    f: &MixedFunction,
    p: f64,
    pt: f64,
    lambda: f64,
    n: i64,
    grid: &QuadGrid,
) -> Result<f64> {
    oscillation_norm(f, p, pt, lambda, n, grid, false)
}

/// Diagnostic variant minimizing the deviation over the shift constant
/// instead of using the ball average.
pub fn cmo_inf_norm(
    f: &MixedFunction,
    p: f64,
    pt: f64,
    lambda: f64,
    n: i64,
    grid: &QuadGrid,
) -> Result<f64> {
    oscillation_norm(f, p, pt, lambda, n, grid, true)
}

fn oscillation_norm(
    f: &MixedFunction,
    p: f64,
    pt: f64,
    lambda: f64,
    n: i64,
    grid: &QuadGrid,
    infimum_shift: bool,
) -> Result<f64> {
    let nf = n as f64;
    let nu = unit_ball_volume(n)?;
    if f.is_zero() {
        return Ok(0.0);
    }
    let mean = f.angular.mean();
    let f2 = f.clone();
    let objective = move |r: f64| -> Result<f64> {
        let ball_avg =
            mean * nf * r.powf(-nf) * integrate_signed_interval(&f2.radial, nf - 1.0, 0.0, r)?;
        let dev = |c: f64| -> Result<f64> {
            pattern_deviation_integral(&f2.radial, &f2.angular, c, p, pt, n, r, grid)
        };
        let v = if infimum_shift {
            // ternary search over the shift around the ball average
            let scale = ball_avg.abs().max(value_scale(&f2, r));
            let (mut lo, mut hi) = (ball_avg - 4.0 * scale, ball_avg + 4.0 * scale);
            for _ in 0..120 {
                let m1 = lo + (hi - lo) / 3.0;
                let m2 = hi - (hi - lo) / 3.0;
                if dev(m1)? <= dev(m2)? {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
            dev(0.5 * (lo + hi))?
        } else {
            dev(ball_avg)?
        };
        Ok((v / (nu * r.powf(nf * (1.0 + lambda * p)))).powf(1.0 / p))
    };
    let extras = f.radial.breakpoints();
    sup_search(
        &objective,
        grid.r_min,
        grid.r_max,
        &extras,
        "oscillation supremum over scales",
    )
}

fn value_scale(f: &MixedFunction, r: f64) -> f64 {
    let probe = [r * 0.25, r * 0.5, r * 0.75];
    let mut s = 0.0_f64;
    for &x in &probe {
        if let Ok(v) = f.radial.eval(x) {
            s = s.max(v.abs());
        }
    }
    let vmax = f.angular.value_pos.abs().max(f.angular.value_neg.abs());
    (s * vmax).max(1e-12)
}

/// `int_0^R ((omega/2)(|g v_+ - c|^pt + |g v_- - c|^pt))^{p/pt} rho^{n-1} drho`.
fn pattern_deviation_integral(
    g: &RadialProfile,
    pattern: &AngularPattern,
    c: f64,
    p: f64,
    pt: f64,
    n: i64,
    upper: f64,
    grid: &QuadGrid,
) -> Result<f64> {
    let nf = n as f64;
    let omega = unit_sphere_area(n)?;
    let (vp, vn) = (pattern.value_pos, pattern.value_neg);
    if c == 0.0 {
        let a = pattern_factor(pattern, pt, n)?;
        if a == 0.0 {
            return Ok(0.0);
        }
        return Ok(a.powf(p) * integrate_abs_pow_interval(g, p, nf - 1.0, 0.0, upper, grid)?);
    }
    if vp == vn {
        let v = vp;
        if v == 0.0 {
            // deviation is the constant |c|
            return Ok(omega.powf(p / pt) * c.abs().powf(p) * upper.powf(nf) / nf);
        }
        let shifted = g.add(&RadialProfile::power(-c / v, 0.0));
        return Ok(omega.powf(p / pt)
            * v.abs().powf(p)
            * integrate_abs_pow_interval(&shifted, p, nf - 1.0, 0.0, upper, grid)?);
    }
    // general two-value pattern with a nonzero shift: split off an exact
    // head where |g| dominates the shift, then panel quadrature
    let e = p / pt;
    let half = omega / 2.0;
    let phi = |rho: f64| -> f64 {
        let gv = g.eval(rho).unwrap_or(0.0);
        (half * ((gv * vp - c).abs().powf(pt) + (gv * vn - c).abs().powf(pt))).powf(e)
    };
    let vmin_nonzero = [vp, vn]
        .iter()
        .map(|v| v.abs())
        .filter(|v| *v > 0.0)
        .fold(f64::INFINITY, f64::min);
    let mut acc = 0.0;
    let mut num_lo = upper * 1e-12;
    let head_blows_up = g
        .dominant_at_zero()
        .map(|t| t.exponent < 0.0)
        .unwrap_or(false);
    if head_blows_up {
        // below r_head the shift is negligible relative to g v
        let mut r_head = upper.min(g.breakpoints().first().copied().unwrap_or(upper));
        let target = 1e7 * c.abs() / vmin_nonzero;
        for _ in 0..2000 {
            if g.eval(r_head).map(|v| v.abs()).unwrap_or(0.0) >= target || r_head < 1e-280 {
                break;
            }
            r_head *= 0.5;
        }
        if r_head < upper {
            let a_head = (half
                * ([vp, vn]
                    .iter()
                    .map(|v| v.abs().powf(pt))
                    .sum::<f64>()))
            .powf(e);
            acc += a_head * integrate_abs_pow_interval(g, p, nf - 1.0, 0.0, r_head, grid)?;
            num_lo = r_head;
        } else {
            num_lo = upper; // nothing left for the numeric part
        }
    }
    if num_lo < upper {
        // panel edges: breakpoints plus kinks where g v = c
        let mut edges = vec![num_lo];
        for b in g.breakpoints() {
            if b > num_lo && b < upper {
                edges.push(b);
            }
        }
        for v in [vp, vn] {
            if v != 0.0 {
                let target = c / v;
                let h = |r: f64| g.eval(r).unwrap_or(0.0) - target;
                for r0 in sign_change_roots(&h, num_lo, upper, grid) {
                    edges.push(r0);
                }
            }
        }
        edges.push(upper);
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.dedup();
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            if a >= b {
                continue;
            }
            let decades = (b / a).log10();
            let count = ((decades * 8.0).ceil() as usize).clamp(2, 400);
            for i in 0..count {
                let x0 = a * (b / a).powf(i as f64 / count as f64);
                let x1 = a * (b / a).powf((i + 1) as f64 / count as f64);
                acc += gauss16(|r| phi(r) * r.powf(nf - 1.0), x0, x1);
            }
        }
    }
    Ok(acc)
}

/// Dyadic shell norm over an explicit k range with certified geometric tails.
#[allow(clippy::too_many_arguments)]
pub fn herz_norm(
    f: &MixedFunction,
    alpha: f64,
    q: f64,
    p: f64,
    pt: f64,
    n: i64,
    k_range: (i64, i64),
    grid: &QuadGrid,
) -> Result<f64> {
    let a = pattern_factor(&f.angular, pt, n)?;
    if a == 0.0 || f.radial.is_zero() {
        return Ok(0.0);
    }
    let terms = shell_ln_terms(&f.radial, alpha, q, p, n, k_range, grid)?;
    let head = shell_tail_ln(&f.radial, alpha, q, p, n, k_range.0, true)?;
    let tail = shell_tail_ln(&f.radial, alpha, q, p, n, k_range.1, false)?;
    let mut all = terms;
    all.extend(head);
    all.extend(tail);
    Ok(a * ln_sum(&all).exp().powf(1.0 / q))
}

/// ln of each shell term 2^{k alpha q} (radial shell integral)^{q/p}.
fn shell_ln_terms(
    g: &RadialProfile,
    alpha: f64,
    q: f64,
    p: f64,
    n: i64,
    k_range: (i64, i64),
    grid: &QuadGrid,
) -> Result<Vec<f64>> {
    Ok(shell_ln_terms_per_k(g, alpha, q, p, n, k_range, grid)?
        .into_iter()
        .map(|(_, t)| t)
        .collect())
}

/// ln((2^ep - 1)/ep): the k-independent shape factor of the closed-form
/// shell integral of a pure power, extended continuously through ep = 0 and
/// guarded against overflow at large |ep|.
fn ln_shell_shape(ep: f64) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    let x = ep * ln2;
    if ep == 0.0 {
        ln2.ln()
    } else if x > 500.0 {
        x - ep.ln()
    } else if x < -500.0 {
        -(-ep).ln()
    } else {
        (x.exp_m1() / ep).ln()
    }
}

/// If the shell [lo, hi) lies inside a single pure-power piece, return it.
fn shell_pure_power(g: &RadialProfile, lo: f64, hi: f64) -> Option<(f64, f64)> {
    for piece in g.pieces() {
        if piece.lo <= lo && hi <= piece.hi {
            return piece
                .as_pure_power()
                .map(|t| (t.coeff, t.exponent));
        }
        if piece.lo >= hi {
            break;
        }
    }
    None
}

/// ln terms of the analytically summed geometric tail beyond the truncation.
fn shell_tail_ln(
    g: &RadialProfile,
    alpha: f64,
    q: f64,
    p: f64,
    n: i64,
    k_edge: i64,
    head: bool,
) -> Result<Vec<f64>> {
    let nf = n as f64;
    let ln2 = std::f64::consts::LN_2;
    // shells are (2^{k-1}, 2^k], so the region below k_edge ends at
    // 2^{k_edge - 1} and the region above it starts at 2^{k_edge}
    let boundary = if head {
        2f64.powi(k_edge as i32 - 1)
    } else {
        2f64.powi(k_edge as i32)
    };
    // the region beyond the truncation must be one pure-power piece
    let covering = g.pieces().iter().find(|piece| {
        if head {
            piece.lo == 0.0 && piece.hi >= boundary
        } else {
            piece.hi.is_infinite() && piece.lo <= boundary
        }
    });
    let piece = covering.ok_or_else(|| {
        Error::NonPowerTail(format!(
            "profile is not a single piece beyond the {} truncation",
            if head { "inner" } else { "outer" }
        ))
    })?;
    if piece.is_zero() {
        return Ok(Vec::new());
    }
    let t = piece.as_pure_power().ok_or_else(|| {
        Error::NonPowerTail(format!(
            "{} tail piece is not a pure power",
            if head { "inner" } else { "outer" }
        ))
    })?;
    let ep = t.exponent * p + nf;
    // per-shell term T rho^k with rho = 2^{q(alpha + s + n/p)}; the shells
    // exclude the endpoints, so each term is finite for every exponent and
    // only the ratio decides summability
    let ln_rho = q * (alpha + t.exponent + nf / p) * ln2;
    let ln_t = (q / p) * (p * t.coeff.abs().ln() + ln_shell_shape(ep) - ep * ln2);
    if head {
        // sum over k <= k_edge - 1 requires rho > 1
        if ln_rho <= 0.0 {
            return Err(Error::Divergence(
                "shell sum diverges toward the endpoint 0 (non-contracting tail ratio)".into(),
            ));
        }
        let k = (k_edge - 1) as f64;
        // geometric sum T rho^k / (1 - 1/rho)
        Ok(vec![ln_t + k * ln_rho - (-(-ln_rho).exp()).ln_1p()])
    } else {
        if ln_rho >= 0.0 {
            return Err(Error::Divergence(
                "shell sum diverges toward the endpoint +inf (non-contracting tail ratio)".into(),
            ));
        }
        let k = (k_edge + 1) as f64;
        // geometric sum T rho^k / (1 - rho)
        Ok(vec![ln_t + k * ln_rho - (-ln_rho.exp()).ln_1p()])
    }
}

fn ln_sum(terms: &[f64]) -> f64 {
    if terms.is_empty() {
        return f64::NEG_INFINITY;
    }
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// Supremum over truncation points of scaled shell partial sums.
#[allow(clippy::too_many_arguments)]
pub fn morrey_herz_norm(
    f: &MixedFunction,
    alpha: f64,
    q: f64,
    lambda: f64,
    p: f64,
    pt: f64,
    n: i64,
    k_range: (i64, i64),
    grid: &QuadGrid,
) -> Result<f64> {
    let a = pattern_factor(&f.angular, pt, n)?;
    if a == 0.0 || f.radial.is_zero() {
        return Ok(0.0);
    }
    let ln2 = std::f64::consts::LN_2;
    let head = shell_head_partial(&f.radial, alpha, q, lambda, p, n, k_range.0)?;
    // running partial sums: objective(k0) = 2^{-k0 lambda} P(k0)^{1/q}
    let mut best = head.sup_below_truncation;
    let mut running: Vec<f64> = head.ln_partial.into_iter().collect();
    let shells = shell_ln_terms_per_k(&f.radial, alpha, q, p, n, k_range, grid)?;
    let mut idx = 0;
    for k0 in k_range.0..=k_range.1 {
        while idx < shells.len() && shells[idx].0 <= k0 {
            running.push(shells[idx].1);
            idx += 1;
        }
        let lnp = ln_sum(&running);
        if lnp > f64::NEG_INFINITY {
            let obj = (-(k0 as f64) * lambda * ln2 + lnp / q).exp();
            best = best.max(obj);
        }
    }
    // beyond the outer truncation the tail piece governs
    let outer = shell_outer_behavior(&f.radial, alpha, q, lambda, p, n, k_range.1, &running)?;
    best = best.max(outer);
    Ok(a * best)
}

struct HeadPartial {
    ln_partial: Option<f64>,
    sup_below_truncation: f64,
}

/// Analytic handling of truncation points below k_min.
fn shell_head_partial(
    g: &RadialProfile,
    alpha: f64,
    q: f64,
    lambda: f64,
    p: f64,
    n: i64,
    k_min: i64,
) -> Result<HeadPartial> {
    let nf = n as f64;
    let ln2 = std::f64::consts::LN_2;
    let boundary = 2f64.powi(k_min as i32 - 1);
    let piece = g
        .pieces()
        .iter()
        .find(|piece| piece.lo == 0.0 && piece.hi >= boundary)
        .ok_or_else(|| {
            Error::NonPowerTail("profile is not a single piece below the inner truncation".into())
        })?;
    if piece.is_zero() {
        return Ok(HeadPartial { ln_partial: None, sup_below_truncation: 0.0 });
    }
    let t = piece.as_pure_power().ok_or_else(|| {
        Error::NonPowerTail("inner tail piece is not a pure power".into())
    })?;
    let ep = t.exponent * p + nf;
    let ln_rho = q * (alpha + t.exponent + nf / p) * ln2;
    if ln_rho <= 0.0 {
        return Err(Error::Divergence(
            "shell sum diverges toward the endpoint 0 (non-contracting tail ratio)".into(),
        ));
    }
    let ln_t = (q / p) * (p * t.coeff.abs().ln() + ln_shell_shape(ep) - ep * ln2);
    // partial sum up to k0 <= k_min - 1: P(k0) = T rho^{k0} / (1 - 1/rho)
    let ln_geo = -(-(-ln_rho).exp()).ln_1p();
    // objective at k0: exp(-k0 lambda ln2 + (ln_t + k0 ln_rho + ln_geo)/q):
    // exponent in k0 is (ln_rho/q - lambda ln2); lambda >= 0 and rho > 1
    let slope = ln_rho / q - lambda * ln2;
    let k0 = (k_min - 1) as f64;
    let at_edge = (-(k0) * lambda * ln2 + (ln_t + k0 * ln_rho + ln_geo) / q).exp();
    let sup = if slope > 1e-14 {
        at_edge // increasing toward the truncation edge
    } else if slope < -1e-14 {
        return Err(Error::Unbounded(
            "truncated shell sums grow without bound toward the endpoint 0".into(),
        ));
    } else {
        at_edge // flat in k0
    };
    Ok(HeadPartial {
        ln_partial: Some(ln_t + k0 * ln_rho + ln_geo),
        sup_below_truncation: sup,
    })
}

/// Behavior of the objective for truncation points beyond k_max.
fn shell_outer_behavior(
    g: &RadialProfile,
    alpha: f64,
    q: f64,
    lambda: f64,
    p: f64,
    n: i64,
    k_max: i64,
    running: &[f64],
) -> Result<f64> {
    let nf = n as f64;
    let ln2 = std::f64::consts::LN_2;
    let boundary = 2f64.powi(k_max as i32);
    let piece = g
        .pieces()
        .iter()
        .find(|piece| piece.hi.is_infinite() && piece.lo <= boundary)
        .ok_or_else(|| {
            Error::NonPowerTail("profile is not a single piece beyond the outer truncation".into())
        })?;
    let lnp_full = ln_sum(running);
    if piece.is_zero() {
        // partial sums saturate; objective decays (or is flat at lambda=0)
        return Ok(if lambda > 0.0 {
            0.0_f64.max((-(k_max as f64) * lambda * ln2 + lnp_full / q).exp())
        } else {
            (lnp_full / q).exp()
        });
    }
    let t = piece.as_pure_power().ok_or_else(|| {
        Error::NonPowerTail("outer tail piece is not a pure power".into())
    })?;
    let ep = t.exponent * p + nf;
    let ln_rho = q * (alpha + t.exponent + nf / p) * ln2;
    let ln_t = (q / p) * (p * t.coeff.abs().ln() + ln_shell_shape(ep) - ep * ln2);
    if ln_rho < 0.0 {
        // shells vanish geometrically: P saturates at P_inf
        let tail_first = ln_t + (k_max as f64 + 1.0) * ln_rho;
        let ln_tail = tail_first - (-ln_rho.exp()).ln_1p();
        let lnp_inf = ln_sum(&[lnp_full, ln_tail]);
        return Ok(if lambda > 0.0 {
            // objective decays in k0; the best beyond k_max is right at it
            (-(k_max as f64) * lambda * ln2 + lnp_inf / q).exp()
        } else {
            (lnp_inf / q).exp()
        });
    }
    // growing or flat shells: need lambda to dominate
    let slope = ln_rho / q - lambda * ln2;
    if slope >= -1e-14 && lambda == 0.0 {
        return Err(Error::Divergence(
            "shell sum diverges toward the endpoint +inf (non-contracting tail ratio)".into(),
        ));
    }
    if slope > 1e-14 {
        return Err(Error::Unbounded(
            "truncated shell sums grow without bound toward the endpoint +inf".into(),
        ));
    }
    // iterate a few hundred extra truncations explicitly
    let mut best: f64 = 0.0;
    let mut terms: Vec<f64> = running.to_vec();
    for k0 in (k_max + 1)..(k_max + 400) {
        terms.push(ln_t + k0 as f64 * ln_rho);
        let lnp = ln_sum(&terms);
        let obj = (-(k0 as f64) * lambda * ln2 + lnp / q).exp();
        if obj > best {
            best = obj;
        }
    }
    Ok(best)
}

fn shell_ln_terms_per_k(
    g: &RadialProfile,
    alpha: f64,
    q: f64,
    p: f64,
    n: i64,
    k_range: (i64, i64),
    grid: &QuadGrid,
) -> Result<Vec<(i64, f64)>> {
    let nf = n as f64;
    let ln2 = std::f64::consts::LN_2;
    let mut out = Vec::new();
    for k in k_range.0..=k_range.1 {
        // shell k is (2^{k-1}, 2^k]
        let (lo, hi) = (2f64.powi(k as i32 - 1), 2f64.powi(k as i32));
        let ln_int = match shell_pure_power(g, lo, hi) {
            Some((coeff, s)) => {
                if coeff == 0.0 {
                    continue;
                }
                let ep = s * p + nf;
                p * coeff.abs().ln() + (k - 1) as f64 * ep * ln2 + ln_shell_shape(ep)
            }
            None => {
                let v = integrate_abs_pow_interval(g, p, nf - 1.0, lo, hi, grid)?;
                if !v.is_finite() {
                    return Err(Error::Overflow(format!("shell {k} integral overflowed")));
                }
                if v == 0.0 {
                    continue;
                }
                v.ln()
            }
        };
        out.push((k, q * (k as f64 * alpha * ln2) + (q / p) * ln_int));
    }
    Ok(out)
}

/// Log-grid scan with golden-section refinement and growth detection at the
/// scan boundaries; `what` names the supremum in error messages.
fn sup_search<F: Fn(f64) -> Result<f64>>(
    objective: &F,
    lo: f64,
    hi: f64,
    extras: &[f64],
    what: &str,
) -> Result<f64> {
    let mut lo = lo.max(1e-280);
    let mut hi = hi.min(1e280).max(lo * 10.0);
    let mut best_x = lo;
    let mut best_v = 0.0_f64;
    for round in 0..4 {
        let mut xs: Vec<f64> = Vec::new();
        let count = if round == 0 { 256 } else { 96 };
        for i in 0..=count {
            xs.push(lo * (hi / lo).powf(i as f64 / count as f64));
        }
        if round == 0 {
            for &e in extras {
                if e > lo && e < hi {
                    xs.push(e);
                }
            }
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        }
        let mut vals = Vec::with_capacity(xs.len());
        for &x in &xs {
            vals.push(objective(x)?);
        }
        let (mut arg, mut maxv) = (0, f64::NEG_INFINITY);
        for (i, &v) in vals.iter().enumerate() {
            if v > maxv {
                maxv = v;
                arg = i;
            }
        }
        if maxv > best_v {
            best_v = maxv;
            best_x = xs[arg];
        }
        let at_low_edge = arg == 0;
        let at_high_edge = arg + 1 == xs.len();
        if at_low_edge && lo > 1e-270 {
            // strictly increasing toward the boundary means growth
            if vals[0] > vals[1] * (1.0 + 1e-9) {
                hi = xs[1];
                lo = (lo * 1e-10).max(1e-280);
                continue;
            }
        }
        if at_high_edge && hi < 1e270 {
            if vals[xs.len() - 1] > vals[xs.len() - 2] * (1.0 + 1e-9) {
                lo = xs[xs.len() - 2];
                hi = (hi * 1e10).min(1e280);
                continue;
            }
        }
        // refine around the best point by golden section in log space
        let il = arg.saturating_sub(1);
        let ir = (arg + 1).min(xs.len() - 1);
        let (mut a, mut b) = (xs[il].ln(), xs[ir].ln());
        let gold = 0.618_033_988_749_894_8;
        let mut x1 = b - gold * (b - a);
        let mut x2 = a + gold * (b - a);
        let mut f1 = objective(x1.exp())?;
        let mut f2 = objective(x2.exp())?;
        for _ in 0..90 {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gold * (b - a);
                f2 = objective(x2.exp())?;
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gold * (b - a);
                f1 = objective(x1.exp())?;
            }
        }
        let refined = f1.max(f2);
        if refined > best_v {
            best_v = refined;
            best_x = 0.5 * (a + b);
        }
        let _ = best_x;
        return Ok(best_v);
    }
    // still climbing after three range extensions
    Err(Error::Unbounded(format!("{what} grows without bound")))
}
