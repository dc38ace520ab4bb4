//! Radial integration engine.
//!
//! Integrals of piecewise power-law profiles against power weights are done
//! in closed form, including logarithmic factors and resonant exponents.
//! Absolute p-th powers of multi-term pieces combine panel Gauss-Legendre
//! quadrature on a core interval with binomial series expansions around the
//! dominant power on the head (r -> 0) and tail (r -> infinity), so that
//! slowly decaying integrands with most of their mass beyond the numeric
//! grid are still integrated to near machine precision.

use crate::error::{Error, Result};
use crate::funcspace::{PowerPiece, PowerTerm, RadialProfile};

/// Numeric grid controls shared by quadrature and sup-searches.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadGrid {
    /// Lower end of the numeric radial window.
    pub r_min: f64,
    /// Upper end of the numeric radial window.
    pub r_max: f64,
    /// Panel density for log-spaced quadrature and scans.
    pub points_per_decade: usize,
}

impl Default for QuadGrid {
    fn default() -> Self {
        QuadGrid { r_min: 1e-6, r_max: 1e6, points_per_decade: 64 }
    }
}

impl QuadGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_min < self.r_max && self.r_max.is_finite()) {
            return Err(Error::Domain(format!(
                "grid window [{}, {}] is invalid",
                self.r_min, self.r_max
            )));
        }
        if self.points_per_decade < 4 {
            return Err(Error::Domain("grid needs at least 4 points per decade".into()));
        }
        Ok(())
    }

    /// Log-spaced sample radii across the window.
    pub fn radii(&self) -> Vec<f64> {
        let decades = (self.r_max / self.r_min).log10();
        let count = ((decades * self.points_per_decade as f64).ceil() as usize).max(2);
        (0..=count)
            .map(|i| self.r_min * (self.r_max / self.r_min).powf(i as f64 / count as f64))
            .collect()
    }
}

const GL16_NODES: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_8,
    0.755_404_408_355_003_0,
    0.865_631_202_387_831_7,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];
const GL16_WEIGHTS: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_78,
    0.062_253_523_938_647_89,
    0.027_152_459_411_754_095,
];

/// 16-point Gauss-Legendre on [a, b].
pub fn gauss16<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..8 {
        acc += GL16_WEIGHTS[i] * (f(c + h * GL16_NODES[i]) + f(c - h * GL16_NODES[i]));
    }
    acc * h
}

/// Antiderivative terms of `coeff * r^e * (ln r)^k`, valid for r > 0.
pub fn antiderivative_terms(coeff: f64, e: f64, ln_pow: u32) -> Vec<PowerTerm> {
    if e == -1.0 {
        return vec![PowerTerm {
            coeff: coeff / (ln_pow as f64 + 1.0),
            exponent: 0.0,
            ln_pow: ln_pow + 1,
        }];
    }
    // repeated integration by parts:
    // int r^e ln^k = r^{e+1} sum_{j<=k} (-1)^{k-j} k!/j! ln^j / (e+1)^{k-j+1}
    let mut out = Vec::new();
    let mut factor = coeff / (e + 1.0);
    let mut j = ln_pow as i64;
    loop {
        out.push(PowerTerm { coeff: factor, exponent: e + 1.0, ln_pow: j as u32 });
        if j == 0 {
            break;
        }
        factor *= -(j as f64) / (e + 1.0);
        j -= 1;
    }
    out
}

/// Exact `int_lo^hi coeff r^e (ln r)^k dr`; lo may be 0 and hi infinite,
/// with divergence checks naming the failing endpoint.
pub fn integral_power_log(coeff: f64, e: f64, ln_pow: u32, lo: f64, hi: f64) -> Result<f64> {
    if coeff == 0.0 || lo == hi {
        return Ok(0.0);
    }
    if !(lo >= 0.0 && lo < hi) {
        return Err(Error::Domain(format!("bad integration interval [{lo}, {hi})")));
    }
    if lo == 0.0 && e <= -1.0 {
        return Err(Error::Divergence(format!(
            "exponent {e} with log power {ln_pow} diverges at the endpoint 0"
        )));
    }
    if hi.is_infinite() && e >= -1.0 {
        return Err(Error::Divergence(format!(
            "exponent {e} with log power {ln_pow} diverges at the endpoint +inf"
        )));
    }
    // stable path for nearly resonant plain powers on a finite interval
    if ln_pow == 0 && lo > 0.0 && hi.is_finite() {
        let ep1 = e + 1.0;
        let span = (hi / lo).ln();
        if ep1 == 0.0 {
            return Ok(coeff * span);
        }
        if ep1.abs() * span < 0.5 {
            return Ok(coeff * lo.powf(ep1) * (ep1 * span).exp_m1() / ep1);
        }
        return Ok(coeff * (hi.powf(ep1) - lo.powf(ep1)) / ep1);
    }
    let anti = antiderivative_terms(coeff, e, ln_pow);
    let at = |r: f64| -> f64 {
        if r == 0.0 || r.is_infinite() {
            // limits vanish whenever the integral converges at that endpoint
            0.0
        } else {
            anti.iter().map(|t| t.eval(r)).sum()
        }
    };
    Ok(at(hi) - at(lo))
}

/// Exact `int_lo^hi sum_terms c r^{s + weight} ln^k dr` for explicit terms.
pub fn integrate_terms(terms: &[PowerTerm], weight: f64, lo: f64, hi: f64) -> Result<f64> {
    let mut acc = 0.0;
    for t in terms {
        acc += integral_power_log(t.coeff, t.exponent + weight, t.ln_pow, lo, hi)?;
    }
    Ok(acc)
}

/// Signed `int_lo^hi g(r) r^weight dr` over a clipped window, exact per piece.
pub fn integrate_signed_interval(
    profile: &RadialProfile,
    weight: f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    let mut acc = 0.0;
    for p in profile.pieces() {
        let a = p.lo.max(lo);
        let b = p.hi.min(hi);
        if a >= b {
            continue;
        }
        acc += integrate_terms(&p.terms, weight, a, b)?;
    }
    Ok(acc)
}

/// Signed `int_0^inf g(r) r^weight dr`.
pub fn integrate_signed(profile: &RadialProfile, weight: f64) -> Result<f64> {
    integrate_signed_interval(profile, weight, 0.0, f64::INFINITY)
}

/// `int_0^inf |g(r)|^p r^weight dr`.
pub fn integrate_abs_pow(
    profile: &RadialProfile,
    p: f64,
    weight: f64,
    grid: &QuadGrid,
) -> Result<f64> {
    integrate_abs_pow_interval(profile, p, weight, 0.0, f64::INFINITY, grid)
}

/// `int_lo^hi |g(r)|^p r^weight dr` with closed forms on pure-power pieces
/// and series-assisted quadrature on multi-term pieces.
pub fn integrate_abs_pow_interval(
    profile: &RadialProfile,
    p: f64,
    weight: f64,
    lo: f64,
    hi: f64,
    grid: &QuadGrid,
) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!("power must be positive, got {p}")));
    }
    let mut acc = 0.0;
    for piece in profile.pieces() {
        let a = piece.lo.max(lo);
        let b = piece.hi.min(hi);
        if a >= b || piece.is_zero() {
            continue;
        }
        if let Some(t) = piece.as_pure_power() {
            acc += integral_power_log(
                t.coeff.abs().powf(p),
                t.exponent * p + weight,
                0,
                a,
                b,
            )?;
        } else {
            acc += multiterm_abs_pow(&piece.terms, p, weight, a, b, grid)?;
        }
    }
    Ok(acc)
}

fn multiterm_abs_pow(
    terms: &[PowerTerm],
    p: f64,
    weight: f64,
    a: f64,
    b: f64,
    grid: &QuadGrid,
) -> Result<f64> {
    let mut total = 0.0;
    let mut core_lo = a;
    let mut core_hi = b;
    if b.is_infinite() {
        let (r_star, tail) = tail_part(terms, p, weight, a, grid)?;
        total += tail;
        core_hi = r_star;
    }
    if a == 0.0 {
        let (r_head, head) = head_part(terms, p, weight, core_hi, grid)?;
        total += head;
        core_lo = r_head;
    }
    if core_lo < core_hi {
        total += numeric_abs_pow(terms, p, weight, core_lo, core_hi, grid);
    }
    Ok(total)
}

fn dominant_index(terms: &[PowerTerm], at_infinity: bool) -> usize {
    let mut best = 0;
    for (i, t) in terms.iter().enumerate() {
        let b = &terms[best];
        let better = if at_infinity {
            (t.exponent, t.ln_pow) > (b.exponent, b.ln_pow)
        } else {
            t.exponent < b.exponent || (t.exponent == b.exponent && t.ln_pow > b.ln_pow)
        };
        if better {
            best = i;
        }
    }
    best
}

/// Relative term of the expansion h/h_dom = 1 + delta.
#[derive(Clone, Copy)]
struct RelTerm {
    coeff: f64,
    exp: f64,
    ln_pow: u32,
}

fn rel_eval(t: &RelTerm, r: f64) -> f64 {
    t.coeff * r.powf(t.exp) * r.ln().powi(t.ln_pow as i32)
}

fn poly_mul(a: &[RelTerm], b: &[RelTerm], scale_r: f64) -> Vec<RelTerm> {
    let mut out: Vec<RelTerm> = Vec::new();
    for x in a {
        for y in b {
            let c = x.coeff * y.coeff;
            if c == 0.0 {
                continue;
            }
            let (e, k) = (x.exp + y.exp, x.ln_pow + y.ln_pow);
            if let Some(t) = out.iter_mut().find(|t| t.exp == e && t.ln_pow == k) {
                t.coeff += c;
            } else {
                out.push(RelTerm { coeff: c, exp: e, ln_pow: k });
            }
        }
    }
    // prune terms that are negligible at the series anchor radius
    let mag = |t: &RelTerm| rel_eval(t, scale_r).abs();
    let top = out.iter().map(&mag).fold(0.0_f64, f64::max);
    out.retain(|t| mag(t) > top * 1e-24);
    if out.len() > 400 {
        out.sort_by(|x, y| mag(y).partial_cmp(&mag(x)).unwrap());
        out.truncate(400);
    }
    out
}

/// Binomial series integral of |c_dom|^p r^{p e_dom + weight} (1 + delta)^p
/// over [anchor, inf) (tail = true) or (0, anchor] (tail = false).
fn series_integral(
    dom: PowerTerm,
    rel: &[RelTerm],
    p: f64,
    weight: f64,
    anchor: f64,
    tail: bool,
) -> Result<f64> {
    let (lo, hi) = if tail { (anchor, f64::INFINITY) } else { (0.0, anchor) };
    let base_e = p * dom.exponent + weight;
    let mut cur: Vec<RelTerm> = vec![RelTerm { coeff: 1.0, exp: 0.0, ln_pow: 0 }];
    let mut binom = 1.0;
    let mut sum = 0.0;
    let mut small_streak = 0;
    for k in 0..220 {
        let mut part = 0.0;
        for t in &cur {
            part += integral_power_log(t.coeff, base_e + t.exp, t.ln_pow, lo, hi)?;
        }
        let contrib = binom * part;
        sum += contrib;
        if contrib.abs() <= sum.abs().max(1e-300) * 1e-15 {
            small_streak += 1;
            if small_streak >= 3 && k >= 4 {
                break;
            }
        } else {
            small_streak = 0;
        }
        cur = poly_mul(&cur, rel, anchor);
        if cur.is_empty() {
            break;
        }
        binom *= (p - k as f64) / (k as f64 + 1.0);
        if binom == 0.0 {
            break;
        }
    }
    Ok(dom.coeff.abs().powf(p) * sum)
}

fn tail_part(
    terms: &[PowerTerm],
    p: f64,
    weight: f64,
    lower_cap: f64,
    grid: &QuadGrid,
) -> Result<(f64, f64)> {
    let di = dominant_index(terms, true);
    let dom = terms[di];
    if p * dom.exponent + weight >= -1.0 {
        return Err(Error::Divergence(format!(
            "|g|^p with dominant exponent {} against weight {weight} diverges at the endpoint +inf",
            dom.exponent
        )));
    }
    if dom.ln_pow > 0 {
        // logarithmic leading term: march shells outward until negligible
        return shell_march(terms, p, weight, lower_cap.max(grid.r_min), true, grid);
    }
    let rel: Vec<RelTerm> = terms
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != di)
        .map(|(_, t)| RelTerm {
            coeff: t.coeff / dom.coeff,
            exp: t.exponent - dom.exponent,
            ln_pow: t.ln_pow,
        })
        .collect();
    // anchor beyond every relative term's peak, with total relative size <= 1/2
    let mut r_star = lower_cap.max(1.0);
    for t in &rel {
        if t.ln_pow > 0 {
            r_star = r_star.max((-(t.ln_pow as f64) / t.exp).exp() * 2.0);
        }
    }
    for _ in 0..2200 {
        let s: f64 = rel.iter().map(|t| rel_eval(t, r_star).abs()).sum();
        if s <= 0.5 {
            break;
        }
        r_star *= 2.0;
        if !r_star.is_finite() {
            return Err(Error::Overflow("series anchor escaped double range".into()));
        }
    }
    let val = series_integral(dom, &rel, p, weight, r_star, true)?;
    Ok((r_star, val))
}

fn head_part(
    terms: &[PowerTerm],
    p: f64,
    weight: f64,
    upper_cap: f64,
    grid: &QuadGrid,
) -> Result<(f64, f64)> {
    let di = dominant_index(terms, false);
    let dom = terms[di];
    if p * dom.exponent + weight <= -1.0 {
        return Err(Error::Divergence(format!(
            "|g|^p with dominant exponent {} against weight {weight} diverges at the endpoint 0",
            dom.exponent
        )));
    }
    if dom.ln_pow > 0 {
        return shell_march(terms, p, weight, upper_cap.min(grid.r_max), false, grid);
    }
    let rel: Vec<RelTerm> = terms
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != di)
        .map(|(_, t)| RelTerm {
            coeff: t.coeff / dom.coeff,
            exp: t.exponent - dom.exponent,
            ln_pow: t.ln_pow,
        })
        .collect();
    let mut r_head = upper_cap.min(1.0);
    for t in &rel {
        if t.ln_pow > 0 {
            r_head = r_head.min((-(t.ln_pow as f64) / t.exp).exp() * 0.5);
        }
    }
    for _ in 0..2200 {
        let s: f64 = rel.iter().map(|t| rel_eval(t, r_head).abs()).sum();
        if s <= 0.5 {
            break;
        }
        r_head *= 0.5;
        if r_head == 0.0 {
            return Err(Error::Overflow("series anchor underflowed".into()));
        }
    }
    let val = series_integral(dom, &rel, p, weight, r_head, false)?;
    Ok((r_head, val))
}

/// Fallback for logarithmic leading terms: accumulate decade shells until
/// their contribution stops mattering.
fn shell_march(
    terms: &[PowerTerm],
    p: f64,
    weight: f64,
    start: f64,
    outward: bool,
    grid: &QuadGrid,
) -> Result<(f64, f64)> {
    let mut edge = start;
    let mut total = 0.0;
    for _ in 0..600 {
        let next = if outward { edge * 10.0 } else { edge / 10.0 };
        let (a, b) = if outward { (edge, next) } else { (next, edge) };
        let shell = numeric_abs_pow(terms, p, weight, a, b, grid);
        total += shell;
        edge = next;
        if shell <= total.abs().max(1e-300) * 1e-15 {
            break;
        }
        if !edge.is_finite() || edge == 0.0 {
            break;
        }
    }
    Ok((start, total))
}

/// Panel quadrature of |h|^p r^weight on a finite interval, with panel
/// edges at sign changes of h and geometric grading around them.
fn numeric_abs_pow(
    terms: &[PowerTerm],
    p: f64,
    weight: f64,
    a: f64,
    b: f64,
    grid: &QuadGrid,
) -> f64 {
    let h = |r: f64| -> f64 { terms.iter().map(|t| t.eval(r)).sum() };
    let (ta, tb) = (a.ln(), b.ln());
    // integrate in t = ln r: integrand |h(e^t)|^p e^{t (weight + 1)}
    let integrand = |t: f64| -> f64 {
        let r = t.exp();
        h(r).abs().powf(p) * (t * (weight + 1.0)).exp()
    };
    let roots = sign_change_roots(&h, a, b, grid);
    let mut edges: Vec<f64> = Vec::new();
    let per_decade = grid.points_per_decade.max(8) / 8;
    let step = std::f64::consts::LN_10 / per_decade as f64;
    let count = (((tb - ta) / step).ceil() as usize).max(1);
    for i in 0..=count {
        edges.push(ta + (tb - ta) * i as f64 / count as f64);
    }
    for r0 in roots {
        let t0 = r0.ln();
        edges.push(t0);
        let mut d = 1e-12_f64;
        while d < (tb - ta) {
            if t0 + d < tb {
                edges.push(t0 + d);
            }
            if t0 - d > ta {
                edges.push(t0 - d);
            }
            d *= 8.0;
        }
    }
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup();
    let mut acc = 0.0;
    for w in edges.windows(2) {
        if w[1] > w[0] {
            acc += gauss16(integrand, w[0], w[1]);
        }
    }
    acc
}

pub(crate) fn sign_change_roots<F: Fn(f64) -> f64>(
    h: &F,
    a: f64,
    b: f64,
    grid: &QuadGrid,
) -> Vec<f64> {
    let decades = (b / a).log10();
    let count = ((decades * grid.points_per_decade as f64).ceil() as usize)
        .clamp(64, 20_000);
    let mut roots = Vec::new();
    let mut prev_r = a;
    let mut prev_v = h(a);
    for i in 1..=count {
        let r = a * (b / a).powf(i as f64 / count as f64);
        let v = h(r);
        if v == 0.0 {
            roots.push(r);
        } else if prev_v != 0.0 && prev_v.signum() != v.signum() {
            let (mut x0, mut x1, mut f0) = (prev_r, r, prev_v);
            for _ in 0..100 {
                let xm = (x0 * x1).sqrt();
                let fm = h(xm);
                if fm == 0.0 {
                    x0 = xm;
                    x1 = xm;
                    break;
                }
                if fm.signum() == f0.signum() {
                    x0 = xm;
                    f0 = fm;
                } else {
                    x1 = xm;
                }
            }
            roots.push((x0 * x1).sqrt());
        }
        prev_r = r;
        prev_v = v;
    }
    roots
}

/// Quarter-disk integral for the bilinear average:
/// `int int_{u^2+v^2 <= R^2, u,v > 0} F(u, v) du dv` in polar coordinates
/// with geometric grading toward both axes and the origin.
pub fn integrate_quarter_disk<F: Fn(f64, f64) -> f64>(f: &F, radius: f64, grid: &QuadGrid) -> Result<f64> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Domain(format!("quarter-disk radius must be positive, got {radius}")));
    }
    let eval = |panels_per_decade: usize| -> f64 {
        let levels = (10 + panels_per_decade).min(40) as i32;
        let theta_edges = graded_angle_edges(levels);
        let mut rho_edges: Vec<f64> = Vec::new();
        let decades = (10 + panels_per_decade).min(24) as f64;
        let lo = radius * 10f64.powf(-decades);
        let count = ((decades * panels_per_decade as f64).ceil() as usize).max(1);
        for i in 0..=count {
            rho_edges.push(lo * (radius / lo).powf(i as f64 / count as f64));
        }
        let mut acc = 0.0;
        for tw in theta_edges.windows(2) {
            let inner = |theta: f64| -> f64 {
                let (s, c) = theta.sin_cos();
                let mut line = 0.0;
                for rw in rho_edges.windows(2) {
                    line += gauss16(|rho| f(rho * c, rho * s) * rho, rw[0], rw[1]);
                }
                line
            };
            acc += gauss16(inner, tw[0], tw[1]);
        }
        acc
    };
    // the grid only seeds the starting resolution; refinement is adaptive
    let mut ppd = (grid.points_per_decade / 16).max(4);
    let mut prev = eval(ppd);
    for _ in 0..4 {
        ppd *= 2;
        let cur = eval(ppd);
        let scale = cur.abs().max(1e-300);
        if (cur - prev).abs() <= 1e-8 * scale {
            return Ok(cur);
        }
        prev = cur;
    }
    Ok(prev)
}

fn graded_angle_edges(levels: i32) -> Vec<f64> {
    let quarter = std::f64::consts::FRAC_PI_4;
    let half = std::f64::consts::FRAC_PI_2;
    let mut edges = vec![0.0];
    let mut t = quarter * 4f64.powi(-levels);
    while t < quarter {
        edges.push(t);
        t *= 4.0;
    }
    edges.push(quarter);
    let lower: Vec<f64> = edges.clone();
    for &e in lower.iter().rev() {
        if e < quarter {
            edges.push(half - e);
        }
    }
    edges
}

/// Fit a piecewise power-law profile through positive samples at the given
/// radii, extrapolating the first and last cells to 0 and infinity.
pub fn sample_to_profile(radii: &[f64], values: &[f64]) -> Result<RadialProfile> {
    if radii.len() != values.len() || radii.len() < 2 {
        return Err(Error::Domain("need at least two matching samples".into()));
    }
    for w in radii.windows(2) {
        if !(w[0] > 0.0 && w[0] < w[1]) {
            return Err(Error::Domain("sample radii must be positive and increasing".into()));
        }
    }
    let mut pieces = Vec::new();
    let n = radii.len();
    for i in 0..n - 1 {
        let (r0, r1) = (radii[i], radii[i + 1]);
        let (v0, v1) = (values[i], values[i + 1]);
        let lo = if i == 0 { 0.0 } else { r0 };
        let hi = if i == n - 2 { f64::INFINITY } else { r1 };
        let piece = if v0 == 0.0 && v1 == 0.0 {
            PowerPiece::zero(lo, hi)
        } else if v0 > 0.0 && v1 > 0.0 {
            let s = (v1 / v0).ln() / (r1 / r0).ln();
            // an unbounded extrapolation toward infinity is clipped flat
            let s = if hi.is_infinite() && s > 0.0 { 0.0 } else { s };
            let c = v0 / r0.powf(s);
            PowerPiece::pure(lo, hi, c, s)
        } else if v0 < 0.0 && v1 < 0.0 {
            let s = (v1 / v0).ln() / (r1 / r0).ln();
            let s = if hi.is_infinite() && s > 0.0 { 0.0 } else { s };
            let c = v0 / r0.powf(s);
            PowerPiece::pure(lo, hi, c, s)
        } else {
            // mixed signs in one cell: fall back to the mean value
            PowerPiece::pure(lo, hi, 0.5 * (v0 + v1), 0.0)
        };
        pieces.push(piece);
    }
    RadialProfile::from_pieces(pieces)
}
