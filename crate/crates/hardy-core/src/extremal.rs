//! Extremal and near-extremal function families, one per catalogued bound.
//!
//! Each family is either a single fixed function (an eigenfunction or an
//! indicator that attains the constant directly) or a one-parameter family
//! f_eps whose norm ratio approaches the constant as eps -> 0. Families come
//! out in exact piecewise-power form so the norm functionals evaluate them
//! without sampling error.

use crate::error::{Error, Result};
use crate::funcspace::{AngularPattern, MixedFunction, RadialProfile};
use crate::sharpconst::{TheoremCase, TheoremId};

/// The functions fed to the operator for one measurement.
#[derive(Debug, Clone)]
pub struct ExtremalFamily {
    pub theorem_id: TheoremId,
    /// One entry per operator argument (m entries for the multilinear cases).
    pub functions: Vec<MixedFunction>,
    /// The eps actually used; None for fixed (eps-free) families.
    pub epsilon: Option<f64>,
    /// Open upper limit of the admissible eps range; None when eps-free.
    pub epsilon_max: Option<f64>,
    /// Set when the signed pattern degenerates to a radial function with
    /// nonzero mean (even dimension), so the oscillation identity fails.
    pub degenerate_pattern: bool,
}

fn dual(p: f64) -> f64 {
    p / (p - 1.0)
}

/// Open upper limit for eps, or None when the family is eps-free.
pub fn epsilon_max(case: &TheoremCase) -> Result<Option<f64>> {
    match case.theorem_id {
        TheoremId::T2_1 => {
            let m = case.get_usize("m")?;
            let mut lim = 1.0f64;
            for i in 1..=m {
                let n = case.dim(&format!("n{i}"))? as f64;
                let p = case.get(&format!("p{i}"))?;
                let a = case.get(&format!("alpha{i}"))?;
                lim = lim.min(n / dual(p) - a / p);
            }
            Ok(Some(lim))
        }
        TheoremId::T3_1 => {
            let m = case.get_usize("m")?;
            let n = case.dim("n")? as f64;
            match m {
                1 => {
                    let p = case.get("p1")?;
                    let a = case.get("alpha1")?;
                    Ok(Some(1.0f64.min(n / dual(p) - a / p)))
                }
                2 => {
                    let p1 = case.get("p1")?;
                    let p2 = case.get("p2")?;
                    Ok(Some(1.0f64.min((p1 - 1.0) * n / p2).min(n / dual(p2))))
                }
                _ => Err(Error::UnsupportedM(m)),
            }
        }
        TheoremId::T4_5 => Ok(Some(1.0)),
        TheoremId::T4_1 => Err(Error::FamilyUnavailable(
            "only the upper-bound side of the unweighted fractional bound is checkable".into(),
        )),
        _ => Ok(None),
    }
}

/// Default eps sweep: geometric ladder clipped strictly below eps_max.
/// Coarse enough to expose the eps^eps drift, fine enough to extrapolate.
pub fn default_epsilon_sweep(eps_max: f64) -> Vec<f64> {
    const LADDER: [f64; 7] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4];
    let kept: Vec<f64> = LADDER.iter().copied().filter(|&e| e < eps_max).collect();
    if kept.is_empty() {
        // eps_max at or below the ladder floor: scale the ladder down
        LADDER.iter().map(|&e| e * eps_max).collect()
    } else {
        kept
    }
}

fn check_epsilon(eps: Option<f64>, eps_max: f64, id: TheoremId) -> Result<f64> {
    let e = eps.ok_or_else(|| {
        Error::EpsilonRange(format!("{id} family is eps-indexed; an eps value is required"))
    })?;
    if !(e > 0.0 && e < eps_max) {
        return Err(Error::EpsilonRange(format!(
            "{id} requires 0 < eps < {eps_max}, got {e}"
        )));
    }
    Ok(e)
}

fn fixed(id: TheoremId, functions: Vec<MixedFunction>) -> ExtremalFamily {
    ExtremalFamily {
        theorem_id: id,
        functions,
        epsilon: None,
        epsilon_max: None,
        degenerate_pattern: false,
    }
}

/// Build the family for a validated case. `epsilon` is required exactly when
/// the family is eps-indexed and must lie in (0, epsilon_max).
pub fn make_extremal(case: &TheoremCase, epsilon: Option<f64>) -> Result<ExtremalFamily> {
    if !case.side_conditions_checked {
        return Err(Error::Domain(
            "case must pass validate() before building its extremal family".into(),
        ));
    }
    let id = case.theorem_id;
    match id {
        TheoremId::T2_1 => {
            // tensor of the scalar families, one per factor dimension
            let eps_max = epsilon_max(case)?.unwrap();
            let eps = check_epsilon(epsilon, eps_max, id)?;
            let m = case.get_usize("m")?;
            let mut fs = Vec::with_capacity(m);
            for i in 1..=m {
                let n = case.dim(&format!("n{i}"))? as f64;
                let p = case.get(&format!("p{i}"))?;
                let a = case.get(&format!("alpha{i}"))?;
                let g = RadialProfile::power_cut(1.0, -(n + a) / p - eps, 1.0, f64::INFINITY)?;
                fs.push(MixedFunction::radial_only(g));
            }
            Ok(ExtremalFamily {
                theorem_id: id,
                functions: fs,
                epsilon: Some(eps),
                epsilon_max: Some(eps_max),
                degenerate_pattern: false,
            })
        }
        TheoremId::T3_1 => {
            let eps_max = epsilon_max(case)?.unwrap();
            let eps = check_epsilon(epsilon, eps_max, id)?;
            let m = case.get_usize("m")?;
            let n = case.dim("n")? as f64;
            let fs = match m {
                1 => {
                    let p = case.get("p1")?;
                    let a = case.get("alpha1")?;
                    let g = RadialProfile::power_cut(1.0, -(n + a) / p - eps, 1.0, f64::INFINITY)?;
                    vec![MixedFunction::radial_only(g)]
                }
                2 => {
                    let p1 = case.get("p1")?;
                    let p2 = case.get("p2")?;
                    let alpha = case.get("alpha1")? + case.get("alpha2")?;
                    let lo = std::f64::consts::FRAC_1_SQRT_2;
                    let e1 = -n / p1 - p2 * eps / p1 - alpha / p1;
                    let e2 = -n / p2 - alpha / p2 - eps;
                    vec![
                        MixedFunction::radial_only(RadialProfile::power_cut(
                            1.0,
                            e1,
                            lo,
                            f64::INFINITY,
                        )?),
                        MixedFunction::radial_only(RadialProfile::power_cut(
                            1.0,
                            e2,
                            lo,
                            f64::INFINITY,
                        )?),
                    ]
                }
                _ => return Err(Error::UnsupportedM(m)),
            };
            Ok(ExtremalFamily {
                theorem_id: id,
                functions: fs,
                epsilon: Some(eps),
                epsilon_max: Some(eps_max),
                degenerate_pattern: false,
            })
        }
        TheoremId::T3_2 => {
            // joint eigenfunctions: pure powers r^{n lambda_i}
            let m = case.get_usize("m")?;
            let n = case.dim("n")? as f64;
            let mut fs = Vec::with_capacity(m);
            for i in 1..=m {
                let li = case.get(&format!("lambda{i}"))?;
                fs.push(MixedFunction::radial_only(RadialProfile::power(1.0, n * li)));
            }
            Ok(fixed(id, fs))
        }
        TheoremId::T3_3 => {
            let n = case.dim("n")?;
            let lambda = case.get("lambda")?;
            let g = RadialProfile::power(1.0, n as f64 * lambda);
            // opposite signs on the two hemispheres; for even n the sign
            // factor (-1)^n collapses to a radial function with nonzero mean
            let degenerate = n % 2 == 0;
            let pattern = if degenerate {
                AngularPattern::constant(1.0)
            } else {
                AngularPattern::signed(1.0)
            };
            let mut fam = fixed(id, vec![MixedFunction::new(g, pattern)]);
            fam.degenerate_pattern = degenerate;
            Ok(fam)
        }
        TheoremId::T4_1 => Err(Error::FamilyUnavailable(
            "only the upper-bound side of the unweighted fractional bound is checkable".into(),
        )),
        TheoremId::T4_2 => {
            let p1 = case.get("p1")?;
            let a1 = case.get("alpha1")?;
            let g = RadialProfile::power_cut(1.0, -a1 / (p1 - 1.0), 0.0, 1.0)?;
            Ok(fixed(id, vec![MixedFunction::radial_only(g)]))
        }
        TheoremId::T4_3 => {
            let g = RadialProfile::power_cut(1.0, 0.0, 0.0, 1.0)?;
            Ok(fixed(id, vec![MixedFunction::radial_only(g)]))
        }
        TheoremId::T4_4 => {
            let n = case.dim("n")? as f64;
            let p1 = case.get("p1")?;
            let alpha = case.get("alpha")?;
            let beta = case.get("beta")?;
            let g = RadialProfile::power_cut(
                1.0,
                (beta - n - alpha) / (p1 - 1.0),
                1.0,
                f64::INFINITY,
            )?;
            Ok(fixed(id, vec![MixedFunction::radial_only(g)]))
        }
        TheoremId::T4_5 => {
            let eps = check_epsilon(epsilon, 1.0, id)?;
            let n = case.dim("n")? as f64;
            let alpha = case.get("alpha")?;
            let beta = case.get("beta")?;
            let g =
                RadialProfile::power_cut(1.0, -(beta + n + alpha) / eps, 1.0, f64::INFINITY)?;
            Ok(ExtremalFamily {
                theorem_id: id,
                functions: vec![MixedFunction::radial_only(g)],
                epsilon: Some(eps),
                epsilon_max: Some(1.0),
                degenerate_pattern: false,
            })
        }
        TheoremId::T5_2U | TheoremId::T5_2V | TheoremId::T5_3U | TheoremId::T5_3V => {
            let n = case.dim("n")? as f64;
            let p = case.get("p")?;
            let alpha = case.get("alpha")?;
            let lambda = match id {
                TheoremId::T5_3U | TheoremId::T5_3V => case.get("lambda")?,
                _ => 0.0,
            };
            let g = RadialProfile::power(1.0, -alpha - n / p + lambda);
            Ok(fixed(id, vec![MixedFunction::radial_only(g)]))
        }
    }
}
