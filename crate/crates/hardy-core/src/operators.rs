//! Hardy-type averaging operators acting on the function model.
//!
//! Everything with a one-dimensional kernel is applied symbolically: the
//! cumulative (or tail) integral of a piecewise power profile is again a
//! piecewise sum of power and log terms, so outputs stay exact. The
//! bilinear average needs a genuine two-dimensional integral and is
//! evaluated by ring accumulation over a log-radial grid, with analytic
//! asymptotic exponents patched onto both ends of the sampled profile.

use crate::error::{Error, Result};
use crate::funcspace::{MixedFunction, PowerPiece, PowerTerm, RadialProfile};
use crate::quadrature::{
    antiderivative_terms, gauss16, sample_to_profile, QuadGrid,
};
use crate::special::{unit_ball_volume, unit_sphere_area};
use serde::{Deserialize, Serialize};

/// Weight profile psi on (0, 1) for the weighted averaging operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WeightFunction {
    /// psi(t) = coeff * t^sigma.
    PowerLaw { coeff: f64, sigma: f64 },
    /// Sampled psi, linearly interpolated between nodes in (0, 1].
    Tabulated { ts: Vec<f64>, values: Vec<f64> },
}

impl WeightFunction {
    pub fn validate(&self) -> Result<()> {
        match self {
            WeightFunction::PowerLaw { coeff, sigma } => {
                if !(coeff.is_finite() && sigma.is_finite()) || *coeff < 0.0 {
                    return Err(Error::Domain(format!(
                        "power-law weight needs finite sigma and coeff >= 0, got coeff {coeff}, sigma {sigma}"
                    )));
                }
            }
            WeightFunction::Tabulated { ts, values } => {
                if ts.len() != values.len() || ts.len() < 2 {
                    return Err(Error::Domain("tabulated weight needs matching nodes".into()));
                }
                for w in ts.windows(2) {
                    if !(w[0] > 0.0 && w[0] < w[1]) {
                        return Err(Error::Domain(
                            "tabulated weight nodes must be increasing in (0, 1]".into(),
                        ));
                    }
                }
                if *ts.last().unwrap() > 1.0 {
                    return Err(Error::Domain("tabulated weight nodes must lie in (0, 1]".into()));
                }
                if values.iter().any(|v| *v < 0.0 || !v.is_finite()) {
                    return Err(Error::Domain("weight values must be finite and >= 0".into()));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            WeightFunction::PowerLaw { coeff, sigma } => coeff * t.powf(*sigma),
            WeightFunction::Tabulated { ts, values } => {
                if t <= ts[0] {
                    return values[0];
                }
                if t >= *ts.last().unwrap() {
                    return *values.last().unwrap();
                }
                let i = ts.partition_point(|&x| x < t).max(1);
                let (t0, t1) = (ts[i - 1], ts[i]);
                let (v0, v1) = (values[i - 1], values[i]);
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// Moment `int_0^1 t^e psi(t) dt`.
    pub fn moment(&self, e: f64) -> Result<f64> {
        match self {
            WeightFunction::PowerLaw { coeff, sigma } => {
                let q = e + sigma + 1.0;
                if q <= 0.0 {
                    return Err(Error::Divergence(format!(
                        "weight moment with exponent {e} diverges at the endpoint 0"
                    )));
                }
                Ok(coeff / q)
            }
            WeightFunction::Tabulated { ts, values: _ } => {
                // piecewise: linear psi against t^e, panel quadrature per cell
                let mut acc = 0.0;
                let mut edges = vec![0.0];
                edges.extend(ts.iter().copied());
                if *ts.last().unwrap() < 1.0 {
                    edges.push(1.0);
                }
                for w in edges.windows(2) {
                    if e <= -1.0 && w[0] == 0.0 {
                        // flat extension below the first node still needs e > -1
                        return Err(Error::Divergence(format!(
                            "weight moment with exponent {e} diverges at the endpoint 0"
                        )));
                    }
                    let a = w[0].max(1e-300);
                    acc += gauss16(|t| t.powf(e) * self.eval(t), a, w[1]);
                }
                Ok(acc)
            }
        }
    }
}

/// The operator families the laboratory applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OperatorKind {
    /// Ball average of f over B(0, |x|), normalized by the ball volume.
    SphericalHardy,
    /// Ray average n int_0^1 f(t x) t^{n-1} dt; agrees with the ball
    /// average on radial functions but keeps the angular pattern.
    RayAverage,
    /// Ball integral scaled by |B(0, |x|)|^{beta/n - 1}.
    FractionalHardy { beta: f64 },
    /// Exterior integral against |B(0, |y|)|^{beta/n - 1}.
    ConjugateFractionalHardy { beta: f64 },
    /// Joint ball average over (y_1, ..., y_m) with |vec y| <= |x|.
    MlinearHardy { m: usize },
    /// Product of m independent ball averages.
    ProductHardy { m: usize },
    /// U-type weighted average int_0^1 f(t x) psi(t) dt.
    WeightedAverage { psi: WeightFunction },
    /// V-type weighted average int_0^1 f(x/t) t^{-n} psi(t) dt.
    WeightedConjugateAverage { psi: WeightFunction },
}

impl OperatorKind {
    pub fn arity(&self) -> usize {
        match self {
            OperatorKind::MlinearHardy { m } | OperatorKind::ProductHardy { m } => *m,
            _ => 1,
        }
    }
}

/// Apply any operator; `inputs` must match the operator arity.
pub fn apply(
    op: &OperatorKind,
    n: i64,
    inputs: &[MixedFunction],
    grid: &QuadGrid,
) -> Result<MixedFunction> {
    if inputs.len() != op.arity() {
        return Err(Error::Domain(format!(
            "operator arity {} does not match {} inputs",
            op.arity(),
            inputs.len()
        )));
    }
    match op {
        OperatorKind::SphericalHardy => apply_spherical_hardy(&inputs[0], n),
        OperatorKind::RayAverage => apply_ray_average(&inputs[0], n),
        OperatorKind::FractionalHardy { beta } => apply_fractional_hardy(&inputs[0], n, *beta),
        OperatorKind::ConjugateFractionalHardy { beta } => {
            apply_conjugate_fractional_hardy(&inputs[0], n, *beta)
        }
        OperatorKind::MlinearHardy { m } => apply_mlinear_hardy(inputs, n, *m, grid),
        OperatorKind::ProductHardy { m } => apply_product_hardy(inputs, n, *m),
        OperatorKind::WeightedAverage { psi } => apply_weighted_average(&inputs[0], n, psi, grid),
        OperatorKind::WeightedConjugateAverage { psi } => {
            apply_weighted_conjugate_average(&inputs[0], n, psi, grid)
        }
    }
}

/// One piece of a cumulative or tail expansion:
/// value(r) = constant + sum of terms(r) on [lo, hi).
struct ExpPiece {
    lo: f64,
    hi: f64,
    constant: f64,
    terms: Vec<PowerTerm>,
}

/// Expand `r -> int_0^r g(u) u^weight du` piecewise.
fn cumulative_expansion(g: &RadialProfile, weight: f64) -> Result<Vec<ExpPiece>> {
    let mut out = Vec::new();
    let mut cum = 0.0;
    for piece in g.pieces() {
        if piece.lo == 0.0 && !piece.is_zero() {
            for t in &piece.terms {
                if t.exponent + weight <= -1.0 {
                    return Err(Error::Divergence(format!(
                        "cumulative integral of exponent {} against weight {weight} diverges at the endpoint 0",
                        t.exponent
                    )));
                }
            }
        }
        let mut anti: Vec<PowerTerm> = Vec::new();
        for t in &piece.terms {
            anti.extend(antiderivative_terms(t.coeff, t.exponent + weight, t.ln_pow));
        }
        let at = |r: f64| -> f64 {
            if r == 0.0 {
                0.0
            } else {
                anti.iter().map(|t| t.eval(r)).sum()
            }
        };
        let constant = cum - at(piece.lo);
        if piece.hi.is_finite() {
            cum = constant + at(piece.hi);
        }
        out.push(ExpPiece { lo: piece.lo, hi: piece.hi, constant, terms: anti });
    }
    Ok(out)
}

/// Expand `r -> int_r^inf g(u) u^weight du` piecewise.
fn tail_expansion(g: &RadialProfile, weight: f64) -> Result<Vec<ExpPiece>> {
    let mut out = Vec::new();
    let mut tail = 0.0;
    for piece in g.pieces().iter().rev() {
        if piece.hi.is_infinite() && !piece.is_zero() {
            for t in &piece.terms {
                if t.exponent + weight >= -1.0 {
                    return Err(Error::Divergence(format!(
                        "tail integral of exponent {} against weight {weight} diverges at the endpoint +inf",
                        t.exponent
                    )));
                }
            }
        }
        let mut anti: Vec<PowerTerm> = Vec::new();
        for t in &piece.terms {
            anti.extend(antiderivative_terms(t.coeff, t.exponent + weight, t.ln_pow));
        }
        let at = |r: f64| -> f64 {
            if r.is_infinite() {
                0.0
            } else {
                anti.iter().map(|t| t.eval(r)).sum()
            }
        };
        // int_r^hi = at(hi) - at(r); add the accumulated outer tail
        let constant = tail + at(piece.hi);
        let terms: Vec<PowerTerm> = anti
            .iter()
            .map(|t| PowerTerm { coeff: -t.coeff, ..*t })
            .collect();
        if piece.lo > 0.0 {
            tail = constant - at(piece.lo);
        }
        out.push(ExpPiece { lo: piece.lo, hi: piece.hi, constant, terms });
    }
    out.reverse();
    Ok(out)
}

/// Turn an expansion into a profile: factor * r^shift * value(r).
fn assemble(expansion: Vec<ExpPiece>, factor: f64, shift: f64) -> RadialProfile {
    let mut pieces = Vec::new();
    for e in expansion {
        let mut terms = Vec::new();
        if e.constant != 0.0 {
            terms.push(PowerTerm { coeff: factor * e.constant, exponent: shift, ln_pow: 0 });
        }
        for t in e.terms {
            terms.push(PowerTerm {
                coeff: factor * t.coeff,
                exponent: t.exponent + shift,
                ln_pow: t.ln_pow,
            });
        }
        pieces.push(PowerPiece { lo: e.lo, hi: e.hi, terms });
    }
    RadialProfile::from_pieces(pieces).expect("expansion pieces are contiguous")
}

fn check_dimension(n: i64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain(format!("dimension must be >= 1, got {n}")));
    }
    Ok(n as f64)
}

/// Ball average: output is radial with the pattern averaged out.
pub fn apply_spherical_hardy(f: &MixedFunction, n: i64) -> Result<MixedFunction> {
    let nf = check_dimension(n)?;
    let mean = f.angular.mean();
    let expansion = cumulative_expansion(&f.radial, nf - 1.0)?;
    let radial = assemble(expansion, nf * mean, -nf);
    Ok(MixedFunction::radial_only(radial))
}

/// Ray average: same radial action as the ball average, pattern preserved.
pub fn apply_ray_average(f: &MixedFunction, n: i64) -> Result<MixedFunction> {
    let nf = check_dimension(n)?;
    let expansion = cumulative_expansion(&f.radial, nf - 1.0)?;
    let radial = assemble(expansion, nf, -nf);
    Ok(MixedFunction::new(radial, f.angular))
}

fn check_beta(n: i64, beta: f64, conjugate: bool) -> Result<()> {
    // the conjugate family is also used at beta = 0 reductions, the direct
    // family needs 0 < beta < n
    let ok = if conjugate {
        beta > 0.0 && beta < n as f64
    } else {
        beta >= 0.0 && beta < n as f64
    };
    if !ok {
        return Err(Error::Domain(format!(
            "fractional order beta = {beta} must lie in (0, {n})"
        )));
    }
    Ok(())
}

/// Fractional ball average, symbolic route.
pub fn apply_fractional_hardy(f: &MixedFunction, n: i64, beta: f64) -> Result<MixedFunction> {
    let nf = check_dimension(n)?;
    check_beta(n, beta, false)?;
    let mean = f.angular.mean();
    let omega = unit_sphere_area(n)?;
    let nu = unit_ball_volume(n)?;
    let expansion = cumulative_expansion(&f.radial, nf - 1.0)?;
    let factor = nu.powf(beta / nf - 1.0) * omega * mean;
    let radial = assemble(expansion, factor, beta - nf);
    Ok(MixedFunction::radial_only(radial))
}

/// Fractional ball average at a single radius by direct panel quadrature;
/// an independent cross-check of the symbolic route.
pub fn fractional_hardy_value(f: &MixedFunction, n: i64, beta: f64, r: f64) -> Result<f64> {
    let nf = check_dimension(n)?;
    check_beta(n, beta, false)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let omega = unit_sphere_area(n)?;
    let nu = unit_ball_volume(n)?;
    let g = &f.radial;
    // int_0^r g(u) u^{n-1} du over log panels split at piece boundaries
    let mut edges: Vec<f64> = vec![r * 1e-16];
    for b in g.breakpoints() {
        if b > r * 1e-16 && b < r {
            edges.push(b);
        }
    }
    edges.push(r);
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut acc = 0.0;
    for w in edges.windows(2) {
        let decades = (w[1] / w[0]).log10();
        let count = ((decades * 16.0).ceil() as usize).max(4);
        for i in 0..count {
            let a = w[0] * (w[1] / w[0]).powf(i as f64 / count as f64);
            let b = w[0] * (w[1] / w[0]).powf((i + 1) as f64 / count as f64);
            acc += gauss16(|u| g.eval(u).unwrap_or(0.0) * u.powf(nf - 1.0), a, b);
        }
    }
    Ok(nu.powf(beta / nf - 1.0) * omega * f.angular.mean() * r.powf(beta - nf) * acc)
}

/// Conjugate fractional average, symbolic route.
pub fn apply_conjugate_fractional_hardy(
    f: &MixedFunction,
    n: i64,
    beta: f64,
) -> Result<MixedFunction> {
    let nf = check_dimension(n)?;
    check_beta(n, beta, true)?;
    let mean = f.angular.mean();
    let omega = unit_sphere_area(n)?;
    let nu = unit_ball_volume(n)?;
    let expansion = tail_expansion(&f.radial, beta - 1.0)?;
    let factor = nu.powf(beta / nf - 1.0) * omega * mean;
    let radial = assemble(expansion, factor, 0.0);
    Ok(MixedFunction::radial_only(radial))
}

/// U-type weighted average; pattern preserved.
pub fn apply_weighted_average(
    f: &MixedFunction,
    n: i64,
    psi: &WeightFunction,
    grid: &QuadGrid,
) -> Result<MixedFunction> {
    check_dimension(n)?;
    psi.validate()?;
    match psi {
        WeightFunction::PowerLaw { coeff, sigma } => {
            let expansion = cumulative_expansion(&f.radial, *sigma)?;
            let radial = assemble(expansion, *coeff, -sigma - 1.0);
            Ok(MixedFunction::new(radial, f.angular))
        }
        WeightFunction::Tabulated { .. } => {
            let sample = |rho: f64| -> Result<f64> {
                let g = &f.radial;
                let mut acc = 0.0;
                let mut edges: Vec<f64> = vec![1e-14];
                for b in g.breakpoints() {
                    let t = b / rho;
                    if t > 1e-14 && t < 1.0 {
                        edges.push(t);
                    }
                }
                edges.push(1.0);
                edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
                for w in edges.windows(2) {
                    let decades = (w[1] / w[0]).log10();
                    let count = ((decades * 8.0).ceil() as usize).max(4);
                    for i in 0..count {
                        let a = w[0] * (w[1] / w[0]).powf(i as f64 / count as f64);
                        let b = w[0] * (w[1] / w[0]).powf((i + 1) as f64 / count as f64);
                        acc += gauss16(
                            |t| f.radial.eval(t * rho).unwrap_or(0.0) * psi.eval(t),
                            a,
                            b,
                        );
                    }
                }
                Ok(acc)
            };
            let radii = grid.radii();
            let mut vals = Vec::with_capacity(radii.len());
            for &r in &radii {
                vals.push(sample(r)?);
            }
            let radial = sample_to_profile(&radii, &vals)?;
            Ok(MixedFunction::new(radial, f.angular))
        }
    }
}

/// V-type weighted average; pattern preserved.
pub fn apply_weighted_conjugate_average(
    f: &MixedFunction,
    n: i64,
    psi: &WeightFunction,
    grid: &QuadGrid,
) -> Result<MixedFunction> {
    let nf = check_dimension(n)?;
    psi.validate()?;
    match psi {
        WeightFunction::PowerLaw { coeff, sigma } => {
            let expansion = tail_expansion(&f.radial, nf - sigma - 2.0)?;
            let radial = assemble(expansion, *coeff, sigma - nf + 1.0);
            Ok(MixedFunction::new(radial, f.angular))
        }
        WeightFunction::Tabulated { .. } => {
            let sample = |rho: f64| -> Result<f64> {
                // int_0^1 g(rho/t) t^{-n} psi(t) dt, integrated in t
                let mut edges: Vec<f64> = vec![1e-10];
                for b in f.radial.breakpoints() {
                    let t = rho / b;
                    if t > 1e-10 && t < 1.0 {
                        edges.push(t);
                    }
                }
                edges.push(1.0);
                edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let mut acc = 0.0;
                for w in edges.windows(2) {
                    let decades = (w[1] / w[0]).log10();
                    let count = ((decades * 8.0).ceil() as usize).max(4);
                    for i in 0..count {
                        let a = w[0] * (w[1] / w[0]).powf(i as f64 / count as f64);
                        let b = w[0] * (w[1] / w[0]).powf((i + 1) as f64 / count as f64);
                        acc += gauss16(
                            |t| {
                                f.radial.eval(rho / t).unwrap_or(0.0)
                                    * t.powf(-nf)
                                    * psi.eval(t)
                            },
                            a,
                            b,
                        );
                    }
                }
                Ok(acc)
            };
            let radii = grid.radii();
            let mut vals = Vec::with_capacity(radii.len());
            for &r in &radii {
                vals.push(sample(r)?);
            }
            let radial = sample_to_profile(&radii, &vals)?;
            Ok(MixedFunction::new(radial, f.angular))
        }
    }
}

/// Product of m independent ball averages.
pub fn apply_product_hardy(inputs: &[MixedFunction], n: i64, m: usize) -> Result<MixedFunction> {
    if m == 0 || inputs.len() != m {
        return Err(Error::Domain(format!(
            "product operator over {m} factors got {} inputs",
            inputs.len()
        )));
    }
    let mut radial: Option<RadialProfile> = None;
    for f in inputs {
        let h = apply_spherical_hardy(f, n)?;
        radial = Some(match radial {
            None => h.radial,
            Some(acc) => acc.mul(&h.radial),
        });
    }
    Ok(MixedFunction::radial_only(radial.unwrap()))
}

/// Joint ball average over m inputs; m = 1 is the plain ball average and
/// m = 2 is evaluated by two-dimensional ring accumulation.
pub fn apply_mlinear_hardy(
    inputs: &[MixedFunction],
    n: i64,
    m: usize,
    grid: &QuadGrid,
) -> Result<MixedFunction> {
    match m {
        1 => apply_spherical_hardy(&inputs[0], n),
        2 => apply_bilinear_hardy(inputs, n, grid),
        other => Err(Error::UnsupportedM(other)),
    }
}

fn apply_bilinear_hardy(
    inputs: &[MixedFunction],
    n: i64,
    grid: &QuadGrid,
) -> Result<MixedFunction> {
    let nf = check_dimension(n)?;
    if inputs.len() != 2 {
        return Err(Error::Domain(format!(
            "bilinear operator needs 2 inputs, got {}",
            inputs.len()
        )));
    }
    grid.validate()?;
    let (f1, f2) = (&inputs[0], &inputs[1]);
    let omega = unit_sphere_area(n)?;
    let nu2 = unit_ball_volume(2 * n)?;
    let scale = omega * omega * f1.angular.mean() * f2.angular.mean() / nu2;
    if f1.radial.is_zero() || f2.radial.is_zero() || scale == 0.0 {
        return Ok(MixedFunction::radial_only(RadialProfile::zero()));
    }

    // global pure powers stay pure powers in closed form
    if let (Some(t1), Some(t2)) = (
        global_pure_power(&f1.radial),
        global_pure_power(&f2.radial),
    ) {
        let (a, b) = (nf - 1.0 + t1.exponent, nf - 1.0 + t2.exponent);
        if a <= -1.0 || b <= -1.0 {
            return Err(Error::Divergence(
                "bilinear average of a non-integrable pure power diverges at the endpoint 0".into(),
            ));
        }
        let ang = 0.5 * crate::special::beta((a + 1.0) / 2.0, (b + 1.0) / 2.0)?;
        let coeff =
            scale * t1.coeff * t2.coeff * ang / (a + b + 2.0);
        let radial = RadialProfile::power(coeff, t1.exponent + t2.exponent);
        return Ok(MixedFunction::radial_only(radial));
    }

    // ring accumulation of Q(r) = int int_{u^2+v^2<=r^2} g1 g2 (uv)^{n-1}
    let mut radii = grid.radii();
    let support_lo = |g: &RadialProfile| -> f64 {
        g.pieces()
            .iter()
            .find(|p| !p.is_zero())
            .map(|p| p.lo)
            .unwrap_or(0.0)
    };
    let (lo1, lo2) = (support_lo(&f1.radial), support_lo(&f2.radial));
    let r0 = (lo1 * lo1 + lo2 * lo2).sqrt();
    if r0 > 0.0 && r0 > radii[0] && r0 < *radii.last().unwrap() {
        radii.push(r0);
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        radii.dedup();
    }
    let theta_nodes = bilinear_theta_nodes();
    let brks1 = f1.radial.breakpoints();
    let brks2 = f2.radial.breakpoints();
    let mut q = 0.0;
    let mut values = Vec::with_capacity(radii.len());
    // innermost disk below the first grid radius
    q += ring_integral(
        f1, f2, nf, &theta_nodes, &brks1, &brks2, r0.max(radii[0] * 1e-8), radii[0],
    );
    values.push(q);
    for k in 1..radii.len() {
        q += ring_integral(f1, f2, nf, &theta_nodes, &brks1, &brks2, radii[k - 1], radii[k]);
        values.push(q);
    }
    let h_vals: Vec<f64> = radii
        .iter()
        .zip(&values)
        .map(|(r, qv)| scale * qv * r.powf(-2.0 * nf))
        .collect();
    let sampled = sample_to_profile(&radii, &h_vals)?;

    // patch analytic asymptotic exponents onto both ends
    let tail_exp = match (f1.radial.dominant_at_inf(), f2.radial.dominant_at_inf()) {
        (Some(a), Some(b)) => a.exponent + b.exponent,
        _ => -2.0 * nf, // compact support: Q saturates
    };
    let head_exp = if r0 > 0.0 {
        None // output vanishes below r0, nothing to extend
    } else {
        match (f1.radial.dominant_at_zero(), f2.radial.dominant_at_zero()) {
            (Some(a), Some(b)) => Some(a.exponent + b.exponent),
            _ => None,
        }
    };
    patch_asymptotics(&sampled, tail_exp, head_exp)
        .map(MixedFunction::radial_only)
}

fn global_pure_power(g: &RadialProfile) -> Option<PowerTerm> {
    let pieces = g.pieces();
    if pieces.len() == 1 {
        pieces[0].as_pure_power().filter(|t| t.coeff != 0.0)
    } else {
        None
    }
}

struct ThetaNode {
    cos: f64,
    sin: f64,
    weight: f64,
}

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn bilinear_theta_nodes() -> Vec<ThetaNode> {
    let quarter = std::f64::consts::FRAC_PI_4;
    let half = std::f64::consts::FRAC_PI_2;
    let mut edges = vec![0.0];
    let mut t = quarter * 4f64.powi(-32);
    while t < quarter {
        edges.push(t);
        t *= 4.0;
    }
    edges.push(quarter);
    let lower = edges.clone();
    for &e in lower.iter().rev() {
        if e < quarter {
            edges.push(half - e);
        }
    }
    let mut nodes = Vec::new();
    for w in edges.windows(2) {
        let c = 0.5 * (w[0] + w[1]);
        let h = 0.5 * (w[1] - w[0]);
        for i in 0..4 {
            for sgn in [-1.0, 1.0] {
                let theta = c + sgn * h * GL8_NODES[i];
                nodes.push(ThetaNode {
                    cos: theta.cos(),
                    sin: theta.sin(),
                    weight: h * GL8_WEIGHTS[i],
                });
            }
        }
    }
    nodes
}

/// Integral of g1(rho cos) g2(rho sin) (cos sin)^{n-1} rho^{2n-1} over one
/// ring, splitting the rho range at input breakpoints per angular node.
fn ring_integral(
    f1: &MixedFunction,
    f2: &MixedFunction,
    nf: f64,
    theta_nodes: &[ThetaNode],
    brks1: &[f64],
    brks2: &[f64],
    rho_lo: f64,
    rho_hi: f64,
) -> f64 {
    if !(rho_lo < rho_hi) {
        return 0.0;
    }
    let mut acc = 0.0;
    let mut cuts: Vec<f64> = Vec::with_capacity(4);
    for node in theta_nodes {
        let ang = (node.cos * node.sin).powf(nf - 1.0);
        if ang == 0.0 {
            continue;
        }
        cuts.clear();
        for &b in brks1 {
            let rho = b / node.cos;
            if rho > rho_lo && rho < rho_hi {
                cuts.push(rho);
            }
        }
        for &b in brks2 {
            let rho = b / node.sin;
            if rho > rho_lo && rho < rho_hi {
                cuts.push(rho);
            }
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let line = |a: f64, b: f64| -> f64 {
            let c = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            let mut s = 0.0;
            for i in 0..4 {
                for sgn in [-1.0, 1.0] {
                    let rho = c + sgn * h * GL8_NODES[i];
                    let v1 = f1.radial.eval(rho * node.cos).unwrap_or(0.0);
                    let v2 = f2.radial.eval(rho * node.sin).unwrap_or(0.0);
                    s += h * GL8_WEIGHTS[i] * v1 * v2 * rho.powf(2.0 * nf - 1.0);
                }
            }
            s
        };
        let mut seg_lo = rho_lo;
        let mut seg_sum = 0.0;
        for &c in &cuts {
            seg_sum += line(seg_lo, c);
            seg_lo = c;
        }
        seg_sum += line(seg_lo, rho_hi);
        acc += node.weight * ang * seg_sum;
    }
    acc
}

/// Replace the outermost (and innermost, when given) sampled cells by pure
/// powers with analytically known exponents, anchored at the sample values.
fn patch_asymptotics(
    sampled: &RadialProfile,
    tail_exp: f64,
    head_exp: Option<f64>,
) -> Result<RadialProfile> {
    let mut pieces: Vec<PowerPiece> = sampled.pieces().to_vec();
    if let Some(last) = pieces.last_mut() {
        if !last.is_zero() && last.hi.is_infinite() && last.lo > 0.0 {
            if let Some(t) = last.as_pure_power() {
                let anchor = t.eval(last.lo);
                *last = PowerPiece::pure(
                    last.lo,
                    f64::INFINITY,
                    anchor / last.lo.powf(tail_exp),
                    tail_exp,
                );
            }
        }
    }
    if let Some(he) = head_exp {
        if let Some(first) = pieces.first_mut() {
            if !first.is_zero() && first.lo == 0.0 && first.hi.is_finite() {
                if let Some(t) = first.as_pure_power() {
                    let anchor = t.eval(first.hi);
                    *first = PowerPiece::pure(0.0, first.hi, anchor / first.hi.powf(he), he);
                }
            }
        }
    }
    RadialProfile::from_pieces(pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{AngularPattern, Hemisphere};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn ball_average_of_power() {
        // H(r^s) = n/(n+s) r^s for s > -n
        let f = MixedFunction::radial_only(RadialProfile::power(1.0, 1.5));
        let h = apply_spherical_hardy(&f, 3).unwrap();
        for &r in &[0.2, 1.0, 7.0] {
            assert!(rel(h.radial.eval(r).unwrap(), 3.0 / 4.5 * r.powf(1.5)) < 1e-13);
        }
    }

    #[test]
    fn ball_average_of_indicator() {
        // H(chi_{|x|<1}) = 1 inside, r^{-n} outside
        let f = MixedFunction::radial_only(RadialProfile::power_cut(1.0, 0.0, 0.0, 1.0).unwrap());
        let h = apply_spherical_hardy(&f, 2).unwrap();
        assert!(rel(h.radial.eval(0.3).unwrap(), 1.0) < 1e-14);
        assert!(rel(h.radial.eval(5.0).unwrap(), 5.0_f64.powf(-2.0)) < 1e-14);
    }

    #[test]
    fn ball_average_annihilates_odd_patterns() {
        let f = MixedFunction::new(RadialProfile::power(1.0, 1.0), AngularPattern::signed(1.0));
        let h = apply_spherical_hardy(&f, 3).unwrap();
        assert!(h.radial.is_zero());
    }

    #[test]
    fn ray_average_keeps_pattern() {
        let f = MixedFunction::new(RadialProfile::power(1.0, 2.0), AngularPattern::signed(1.0));
        let h = apply_ray_average(&f, 3).unwrap();
        assert_eq!(h.angular, AngularPattern::signed(1.0));
        // P(r^s) = n/(n+s) r^s
        assert!(rel(h.evaluate(2.0, Hemisphere::Pos).unwrap(), 3.0 / 5.0 * 4.0) < 1e-13);
        assert!(rel(h.evaluate(2.0, Hemisphere::Neg).unwrap(), -3.0 / 5.0 * 4.0) < 1e-13);
    }

    #[test]
    fn resonant_input_produces_log() {
        // n = 2, g = r^{-2} chi_{r>1}: cumulative of r^{-2} r^{1} = ln r
        let f = MixedFunction::radial_only(
            RadialProfile::power_cut(1.0, -2.0, 1.0, f64::INFINITY).unwrap(),
        );
        let h = apply_spherical_hardy(&f, 2).unwrap();
        let r: f64 = 10.0;
        assert!(rel(h.radial.eval(r).unwrap(), 2.0 * r.ln() / (r * r)) < 1e-13);
    }

    #[test]
    fn fractional_matches_quadrature_route() {
        let f = MixedFunction::radial_only(
            RadialProfile::from_spans(&[(0.0, 1.0, 1.0, 0.0), (1.0, 4.0, 0.5, -1.0)]).unwrap(),
        );
        let h = apply_fractional_hardy(&f, 2, 1.0).unwrap();
        for &r in &[0.5, 1.0, 2.0, 3.9, 10.0] {
            let direct = fractional_hardy_value(&f, 2, 1.0, r).unwrap();
            assert!(
                rel(h.radial.eval(r).unwrap(), direct) < 1e-9,
                "mismatch at r={r}"
            );
        }
    }

    #[test]
    fn conjugate_fractional_of_power() {
        // H*_beta(r^s) = omega nu^{beta/n-1} r^{s+beta} / |s+beta| for s+beta < 0
        let (n, beta, s) = (3, 1.5, -2.5);
        let f = MixedFunction::radial_only(RadialProfile::power(1.0, s));
        let h = apply_conjugate_fractional_hardy(&f, n, beta).unwrap();
        let omega = unit_sphere_area(n).unwrap();
        let nu = unit_ball_volume(n).unwrap();
        let c = omega * nu.powf(beta / 3.0 - 1.0) / (s + beta).abs();
        for &r in &[0.1, 1.0, 12.0] {
            assert!(rel(h.radial.eval(r).unwrap(), c * r.powf(s + beta)) < 1e-13);
        }
    }

    #[test]
    fn conjugate_divergence_reported() {
        let f = MixedFunction::radial_only(RadialProfile::power(1.0, 0.0));
        let e = apply_conjugate_fractional_hardy(&f, 2, 1.0).unwrap_err();
        assert!(e.to_string().contains("+inf"));
    }

    #[test]
    fn weighted_average_power_law() {
        // U_psi(r^s) with psi = t^sigma: moment 1/(s+sigma+1) r^s
        let psi = WeightFunction::PowerLaw { coeff: 1.0, sigma: 1.0 };
        let f = MixedFunction::new(RadialProfile::power(2.0, 0.5), AngularPattern::signed(1.0));
        let h = apply_weighted_average(&f, 2, &psi, &QuadGrid::default()).unwrap();
        assert_eq!(h.angular, AngularPattern::signed(1.0));
        assert!(rel(h.radial.eval(3.0).unwrap(), 2.0 * 3.0_f64.powf(0.5) / 2.5) < 1e-13);
    }

    #[test]
    fn weighted_conjugate_power_law() {
        // V_psi(r^s) = int_0^1 t^{s... } : for psi = c t^sigma and s < 0 with
        // n - sigma - 2 + s < -1: result r^s int_0^1 t^{-n+sigma} ... check
        // against direct numerics at one radius
        let (n, s) = (2, -1.2);
        let psi = WeightFunction::PowerLaw { coeff: 0.7, sigma: 1.4 };
        let f = MixedFunction::radial_only(RadialProfile::power(1.0, s));
        let h = apply_weighted_conjugate_average(&f, n, &psi, &QuadGrid::default()).unwrap();
        // direct: int_0^1 (r/t)^s t^{-n} psi(t) dt = 0.7 r^s int_0^1 t^{-s-n+1.4} dt
        let direct = 0.7 / (-s - n as f64 + 1.4 + 1.0);
        assert!(rel(h.radial.eval(2.0).unwrap(), direct * 2.0_f64.powf(s)) < 1e-12);
    }

    #[test]
    fn tabulated_weight_matches_power_law() {
        // dense linear table of psi(t) = t on (0,1] should nearly match
        let ts: Vec<f64> = (1..=4000).map(|i| i as f64 / 4000.0).collect();
        let values: Vec<f64> = ts.clone();
        let tab = WeightFunction::Tabulated { ts, values };
        let exact = WeightFunction::PowerLaw { coeff: 1.0, sigma: 1.0 };
        let f = MixedFunction::radial_only(
            RadialProfile::power_cut(1.0, 0.5, 0.0, 10.0).unwrap(),
        );
        let grid = QuadGrid { r_min: 1e-3, r_max: 1e3, points_per_decade: 32 };
        let ht = apply_weighted_average(&f, 2, &tab, &grid).unwrap();
        let he = apply_weighted_average(&f, 2, &exact, &grid).unwrap();
        for &r in &[0.01, 0.5, 2.0] {
            assert!(
                rel(ht.radial.eval(r).unwrap(), he.radial.eval(r).unwrap()) < 1e-4,
                "tabulated mismatch at r={r}"
            );
        }
    }

    #[test]
    fn product_hardy_factorizes() {
        let f1 = MixedFunction::radial_only(RadialProfile::power(1.0, 1.0));
        let f2 = MixedFunction::radial_only(RadialProfile::power(2.0, -0.5));
        let h = apply_product_hardy(&[f1.clone(), f2.clone()], 2, 2).unwrap();
        let h1 = apply_spherical_hardy(&f1, 2).unwrap();
        let h2 = apply_spherical_hardy(&f2, 2).unwrap();
        for &r in &[0.3, 1.0, 9.0] {
            assert!(rel(
                h.radial.eval(r).unwrap(),
                h1.radial.eval(r).unwrap() * h2.radial.eval(r).unwrap()
            ) < 1e-13);
        }
    }

    #[test]
    fn bilinear_pure_power_closed_form() {
        // two global powers give the closed-form Dirichlet coefficient
        let (n, s1, s2) = (2, -0.5, -1.0);
        let f1 = MixedFunction::radial_only(RadialProfile::power(1.0, s1));
        let f2 = MixedFunction::radial_only(RadialProfile::power(1.0, s2));
        let h = apply_mlinear_hardy(&[f1, f2], n, 2, &QuadGrid::default()).unwrap();
        let nf = n as f64;
        let omega = unit_sphere_area(n).unwrap();
        let nu2 = unit_ball_volume(2 * n).unwrap();
        let (a, b) = (nf - 1.0 + s1, nf - 1.0 + s2);
        let ang = 0.5 * crate::special::beta((a + 1.0) / 2.0, (b + 1.0) / 2.0).unwrap();
        let c = omega * omega / nu2 * ang / (a + b + 2.0);
        for &r in &[0.4, 1.0, 25.0] {
            assert!(rel(h.radial.eval(r).unwrap(), c * r.powf(s1 + s2)) < 1e-12);
        }
    }

    #[test]
    fn bilinear_sampled_matches_closed_form() {
        // same powers, but chopped representation forces the numeric path;
        // inside the untouched region the two answers must agree well
        let (n, s1, s2) = (2, -0.5, -1.0);
        let f1 = MixedFunction::radial_only(RadialProfile::power(1.0, s1));
        let mut f2p = vec![
            crate::funcspace::PowerPiece::pure(0.0, 1.0, 1.0, s2),
            crate::funcspace::PowerPiece::pure(1.0, f64::INFINITY, 1.0, s2),
        ];
        f2p[0].terms[0].coeff = 1.0;
        let f2 = MixedFunction::radial_only(RadialProfile::from_pieces(f2p).unwrap());
        let exact = apply_mlinear_hardy(
            &[f1.clone(), MixedFunction::radial_only(RadialProfile::power(1.0, s2))],
            n,
            2,
            &QuadGrid::default(),
        )
        .unwrap();
        let grid = QuadGrid { r_min: 1e-4, r_max: 1e4, points_per_decade: 32 };
        let h = apply_mlinear_hardy(&[f1, f2], n, 2, &grid).unwrap();
        for &r in &[0.01, 0.5, 3.0, 80.0] {
            assert!(
                rel(h.radial.eval(r).unwrap(), exact.radial.eval(r).unwrap()) < 2e-5,
                "bilinear numeric mismatch at r={r}"
            );
        }
    }

    #[test]
    fn bilinear_cutoff_support() {
        // cutoffs at sqrt(2)/2 make the output vanish below 1
        let s = -1.6;
        let c = 0.5f64.sqrt();
        let f = MixedFunction::radial_only(
            RadialProfile::power_cut(1.0, s, c, f64::INFINITY).unwrap(),
        );
        let grid = QuadGrid { r_min: 1e-3, r_max: 1e5, points_per_decade: 32 };
        let h = apply_mlinear_hardy(&[f.clone(), f], 2, 2, &grid).unwrap();
        assert_eq!(h.radial.eval(0.9).unwrap(), 0.0);
        // values frozen from an independent two-dimensional integration;
        // interpolation is coarsest right after the support onset
        assert!(rel(h.radial.eval(1.5).unwrap(), 0.398_787_740_031_800_7) < 1e-2);
        assert!(rel(h.radial.eval(2.0).unwrap(), 0.389_428_245_994_082_9) < 5e-3);
        assert!(rel(h.radial.eval(1e3).unwrap(), 1.059_150_949_250_620_9e-8) < 1e-3);
        // beyond the sampled window the tail continues with exponent s + s
        let last = h.radial.pieces().last().unwrap().as_pure_power().unwrap();
        assert!((last.exponent - 2.0 * s).abs() < 1e-12);
    }

    #[test]
    fn unsupported_m_rejected() {
        let f = MixedFunction::radial_only(RadialProfile::power(1.0, 0.0));
        let e = apply_mlinear_hardy(&[f.clone(), f.clone(), f], 2, 3, &QuadGrid::default());
        assert!(matches!(e, Err(Error::UnsupportedM(3))));
    }

    #[test]
    fn moments() {
        let psi = WeightFunction::PowerLaw { coeff: 2.0, sigma: 0.5 };
        assert!(rel(psi.moment(1.0).unwrap(), 2.0 / 2.5) < 1e-14);
        assert!(psi.moment(-2.0).is_err());
    }
}
