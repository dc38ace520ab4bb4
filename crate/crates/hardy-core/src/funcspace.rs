//! The function model: piecewise power-law radial profiles times two-value
//! hemispherical angular patterns.
//!
//! Profiles are closed under the operations the operators need: argument
//! scaling, coefficient scaling, pointwise sums on refined breakpoints, and
//! absolute p-th powers of pure-power pieces. Operator outputs may carry
//! several power terms per piece (and a logarithmic factor at exponent
//! boundaries), which the quadrature engine handles separately.

use crate::error::{Error, Result};
use crate::special::unit_sphere_area;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

const COEFF_EPS: f64 = 0.0;

/// One additive term `coeff * r^exponent * (ln r)^ln_pow` of a piece.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub coeff: f64,
    pub exponent: f64,
    pub ln_pow: u32,
}

impl PowerTerm {
    pub fn new(coeff: f64, exponent: f64) -> Self {
        PowerTerm { coeff, exponent, ln_pow: 0 }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let mut v = self.coeff * r.powf(self.exponent);
        for _ in 0..self.ln_pow {
            v *= r.ln();
        }
        v
    }
}

/// A half-open radial interval `[lo, hi)` carrying a sum of power terms.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerPiece {
    pub lo: f64,
    pub hi: f64,
    pub terms: Vec<PowerTerm>,
}

impl PowerPiece {
    pub fn pure(lo: f64, hi: f64, coeff: f64, exponent: f64) -> Self {
        PowerPiece { lo, hi, terms: vec![PowerTerm::new(coeff, exponent)] }
    }

    pub fn zero(lo: f64, hi: f64) -> Self {
        PowerPiece { lo, hi, terms: Vec::new() }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(r)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coeff == COEFF_EPS)
    }

    /// Single pure power term without logarithmic factor, if this piece is one.
    pub fn as_pure_power(&self) -> Option<PowerTerm> {
        if self.is_zero() {
            return Some(PowerTerm::new(0.0, 0.0));
        }
        let nonzero: Vec<&PowerTerm> =
            self.terms.iter().filter(|t| t.coeff != 0.0).collect();
        match nonzero.as_slice() {
            [t] if t.ln_pow == 0 => Some(**t),
            _ => None,
        }
    }

    /// Merge terms sharing (exponent, ln_pow) and drop exact zeros.
    fn simplify(&mut self) {
        let mut out: Vec<PowerTerm> = Vec::new();
        for t in &self.terms {
            if t.coeff == 0.0 {
                continue;
            }
            if let Some(existing) = out
                .iter_mut()
                .find(|u| u.exponent == t.exponent && u.ln_pow == t.ln_pow)
            {
                existing.coeff += t.coeff;
            } else {
                out.push(*t);
            }
        }
        out.retain(|t| t.coeff != 0.0);
        out.sort_by(|a, b| {
            a.exponent
                .partial_cmp(&b.exponent)
                .unwrap()
                .then(a.ln_pow.cmp(&b.ln_pow))
        });
        self.terms = out;
    }
}

/// Radial function g(r) on (0, infinity) as sorted, contiguous pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pieces: Vec<PowerPiece>,
}

impl RadialProfile {
    /// Identically zero, represented as a single zero piece.
    pub fn zero() -> Self {
        RadialProfile { pieces: vec![PowerPiece::zero(0.0, f64::INFINITY)] }
    }

    /// Global power law `c * r^s`.
    pub fn power(coeff: f64, exponent: f64) -> Self {
        RadialProfile {
            pieces: vec![PowerPiece::pure(0.0, f64::INFINITY, coeff, exponent)],
        }
    }

    /// Power law restricted to `[lo, hi)`, zero elsewhere.
    pub fn power_cut(coeff: f64, exponent: f64, lo: f64, hi: f64) -> Result<Self> {
        Self::from_spans(&[(lo, hi, coeff, exponent)])
    }

    /// Build from disjoint spans `(lo, hi, coeff, exponent)`; gaps fill with zero.
    pub fn from_spans(spans: &[(f64, f64, f64, f64)]) -> Result<Self> {
        let pieces = spans
            .iter()
            .map(|&(lo, hi, c, s)| PowerPiece::pure(lo, hi, c, s))
            .collect();
        Self::from_pieces(pieces)
    }

    /// Build from explicit pieces; validates disjointness and fills gaps
    /// with zero pieces so the union covers (0, infinity).
    pub fn from_pieces(mut pieces: Vec<PowerPiece>) -> Result<Self> {
        for p in &pieces {
            if !(p.lo >= 0.0 && p.lo < p.hi) {
                return Err(Error::Domain(format!(
                    "piece interval [{}, {}) is invalid",
                    p.lo, p.hi
                )));
            }
            for t in &p.terms {
                if !t.coeff.is_finite() || !t.exponent.is_finite() {
                    return Err(Error::Domain(
                        "piece coefficients and exponents must be finite".into(),
                    ));
                }
            }
        }
        pieces.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
        for w in pieces.windows(2) {
            if w[0].hi > w[1].lo {
                return Err(Error::Domain(format!(
                    "pieces [{}, {}) and [{}, {}) overlap",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        let mut full = Vec::new();
        let mut cursor = 0.0;
        for p in pieces {
            if p.lo > cursor {
                full.push(PowerPiece::zero(cursor, p.lo));
            }
            cursor = p.hi;
            full.push(p);
        }
        if cursor.is_finite() {
            full.push(PowerPiece::zero(cursor, f64::INFINITY));
        }
        let mut profile = RadialProfile { pieces: full };
        profile.normalize();
        Ok(profile)
    }

    fn normalize(&mut self) {
        for p in &mut self.pieces {
            p.simplify();
        }
        // merge adjacent pieces with identical term lists
        let mut merged: Vec<PowerPiece> = Vec::new();
        for p in self.pieces.drain(..) {
            match merged.last_mut() {
                Some(last) if last.terms == p.terms && last.hi == p.lo => {
                    last.hi = p.hi;
                }
                _ => merged.push(p),
            }
        }
        self.pieces = merged;
    }

    pub fn pieces(&self) -> &[PowerPiece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.is_zero())
    }

    /// Finite interior breakpoints, ascending.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces
            .iter()
            .map(|p| p.lo)
            .filter(|&b| b > 0.0 && b.is_finite())
            .collect()
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("radius must be positive, got {r}")));
        }
        Ok(self.piece_at(r).eval(r))
    }

    pub(crate) fn piece_at(&self, r: f64) -> &PowerPiece {
        // pieces are contiguous, so a linear scan is exact
        for p in &self.pieces {
            if r >= p.lo && r < p.hi {
                return p;
            }
        }
        self.pieces.last().expect("profile has at least one piece")
    }

    /// Multiply the function by a constant.
    pub fn scale(&self, k: f64) -> RadialProfile {
        let mut out = self.clone();
        for p in &mut out.pieces {
            for t in &mut p.terms {
                t.coeff *= k;
            }
        }
        out.normalize();
        out
    }

    /// Pointwise sum on refined breakpoints.
    pub fn add(&self, other: &RadialProfile) -> RadialProfile {
        let mut cuts: Vec<f64> = self
            .breakpoints()
            .into_iter()
            .chain(other.breakpoints())
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let mut edges = vec![0.0];
        edges.extend(cuts);
        edges.push(f64::INFINITY);
        let mut pieces = Vec::new();
        for w in edges.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if lo >= hi {
                continue;
            }
            let mid = midpoint(lo, hi);
            let mut terms = self.piece_at(mid).terms.clone();
            terms.extend(other.piece_at(mid).terms.iter().copied());
            pieces.push(PowerPiece { lo, hi, terms });
        }
        let mut out = RadialProfile { pieces };
        out.normalize();
        out
    }

    /// Pointwise product on refined breakpoints; log powers add termwise.
    pub fn mul(&self, other: &RadialProfile) -> RadialProfile {
        let mut cuts: Vec<f64> = self
            .breakpoints()
            .into_iter()
            .chain(other.breakpoints())
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let mut edges = vec![0.0];
        edges.extend(cuts);
        edges.push(f64::INFINITY);
        let mut pieces = Vec::new();
        for w in edges.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if lo >= hi {
                continue;
            }
            let mid = midpoint(lo, hi);
            let mut terms = Vec::new();
            for a in &self.piece_at(mid).terms {
                for b in &other.piece_at(mid).terms {
                    terms.push(PowerTerm {
                        coeff: a.coeff * b.coeff,
                        exponent: a.exponent + b.exponent,
                        ln_pow: a.ln_pow + b.ln_pow,
                    });
                }
            }
            pieces.push(PowerPiece { lo, hi, terms });
        }
        let mut out = RadialProfile { pieces };
        out.normalize();
        out
    }

    /// The profile of `r -> g(t r)` for t > 0.
    pub fn scale_argument(&self, t: f64) -> Result<RadialProfile> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("scale must be positive, got {t}")));
        }
        let mut pieces = Vec::new();
        for p in &self.pieces {
            let mut terms = Vec::new();
            for tm in &p.terms {
                // c (t r)^s ln(t r)^k expands in powers of ln r
                let base = tm.coeff * t.powf(tm.exponent);
                match tm.ln_pow {
                    0 => terms.push(PowerTerm { coeff: base, exponent: tm.exponent, ln_pow: 0 }),
                    1 => {
                        terms.push(PowerTerm { coeff: base, exponent: tm.exponent, ln_pow: 1 });
                        terms.push(PowerTerm {
                            coeff: base * t.ln(),
                            exponent: tm.exponent,
                            ln_pow: 0,
                        });
                    }
                    _ => {
                        return Err(Error::Domain(
                            "argument scaling supports ln powers <= 1".into(),
                        ))
                    }
                }
            }
            pieces.push(PowerPiece {
                lo: p.lo / t,
                hi: if p.hi.is_finite() { p.hi / t } else { f64::INFINITY },
                terms,
            });
        }
        let mut out = RadialProfile { pieces };
        out.normalize();
        Ok(out)
    }

    /// `|g|^p` when every piece is a pure power; errors otherwise.
    pub fn abs_pow(&self, p: f64) -> Result<RadialProfile> {
        let mut pieces = Vec::new();
        for piece in &self.pieces {
            let pure = piece.as_pure_power().ok_or_else(|| {
                Error::Domain(
                    "abs_pow requires pure power pieces; integrate multi-term pieces numerically"
                        .into(),
                )
            })?;
            let terms = if pure.coeff == 0.0 {
                Vec::new()
            } else {
                vec![PowerTerm::new(pure.coeff.abs().powf(p), pure.exponent * p)]
            };
            pieces.push(PowerPiece { lo: piece.lo, hi: piece.hi, terms });
        }
        let mut out = RadialProfile { pieces };
        out.normalize();
        Ok(out)
    }

    /// Dominant term as r -> 0+ (smallest exponent in the first nonzero stretch).
    pub fn dominant_at_zero(&self) -> Option<PowerTerm> {
        let first = self.pieces.first()?;
        first
            .terms
            .iter()
            .filter(|t| t.coeff != 0.0)
            .min_by(|a, b| {
                a.exponent
                    .partial_cmp(&b.exponent)
                    .unwrap()
                    .then(b.ln_pow.cmp(&a.ln_pow))
            })
            .copied()
    }

    /// Dominant term as r -> infinity (largest exponent in the last piece).
    pub fn dominant_at_inf(&self) -> Option<PowerTerm> {
        let last = self.pieces.last()?;
        last.terms
            .iter()
            .filter(|t| t.coeff != 0.0)
            .max_by(|a, b| {
                a.exponent
                    .partial_cmp(&b.exponent)
                    .unwrap()
                    .then(a.ln_pow.cmp(&b.ln_pow))
            })
            .copied()
    }
}

pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    if hi.is_finite() {
        if lo == 0.0 {
            hi / 2.0
        } else {
            (lo * hi).sqrt()
        }
    } else if lo == 0.0 {
        1.0
    } else {
        lo * 2.0
    }
}

/// Hemisphere selector relative to the hyperplane x_1 = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hemisphere {
    Pos,
    Neg,
}

/// Two-value angular multiplier, one value per open hemisphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngularPattern {
    pub value_pos: f64,
    pub value_neg: f64,
}

impl AngularPattern {
    pub const CONSTANT: AngularPattern = AngularPattern { value_pos: 1.0, value_neg: 1.0 };

    pub fn constant(v: f64) -> Self {
        AngularPattern { value_pos: v, value_neg: v }
    }

    pub fn signed(v: f64) -> Self {
        AngularPattern { value_pos: v, value_neg: -v }
    }

    pub fn mean(&self) -> f64 {
        0.5 * (self.value_pos + self.value_neg)
    }

    pub fn is_constant(&self) -> bool {
        self.value_pos == self.value_neg
    }

    pub fn value(&self, h: Hemisphere) -> f64 {
        match h {
            Hemisphere::Pos => self.value_pos,
            Hemisphere::Neg => self.value_neg,
        }
    }
}

/// Angular L^{p_tilde} norm of the pattern shifted by a constant:
/// `((omega_n/2) (|v_pos - shift|^pt + |v_neg - shift|^pt))^{1/pt}`.
pub fn angular_lp_norm(pattern: &AngularPattern, shift: f64, p_tilde: f64, n: i64) -> Result<f64> {
    if p_tilde <= 1.0 {
        return Err(Error::Domain(format!(
            "angular exponent must exceed 1, got {p_tilde}"
        )));
    }
    if n < 2 {
        return Err(Error::Domain(format!("angular norms require n >= 2, got {n}")));
    }
    let omega = unit_sphere_area(n)?;
    let a = (pattern.value_pos - shift).abs().powf(p_tilde);
    let b = (pattern.value_neg - shift).abs().powf(p_tilde);
    Ok(((omega / 2.0) * (a + b)).powf(1.0 / p_tilde))
}

/// Radial profile times hemispherical pattern: f(rho theta) = g(rho) * v(theta).
#[derive(Debug, Clone, PartialEq)]
pub struct MixedFunction {
    pub radial: RadialProfile,
    pub angular: AngularPattern,
}

impl MixedFunction {
    pub fn radial_only(radial: RadialProfile) -> Self {
        MixedFunction { radial, angular: AngularPattern::CONSTANT }
    }

    pub fn new(radial: RadialProfile, angular: AngularPattern) -> Self {
        MixedFunction { radial, angular }
    }

    pub fn evaluate(&self, rho: f64, hemisphere: Hemisphere) -> Result<f64> {
        Ok(self.radial.eval(rho)? * self.angular.value(hemisphere))
    }

    pub fn scale_argument(&self, t: f64) -> Result<MixedFunction> {
        Ok(MixedFunction {
            radial: self.radial.scale_argument(t)?,
            angular: self.angular,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.radial.is_zero() || (self.angular.value_pos == 0.0 && self.angular.value_neg == 0.0)
    }
}

// --- JSON document: {"pieces":[{"lo":..,"hi":..|"inf","coeff":..,"exp":..}],
//     "pattern":[v_pos, v_neg]} ---

#[derive(Serialize, Deserialize)]
struct TermDoc {
    coeff: f64,
    exp: f64,
    #[serde(default, skip_serializing_if = "is_zero_u32")]
    ln_pow: u32,
}

fn is_zero_u32(v: &u32) -> bool {
    *v == 0
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Bound {
    Num(f64),
    Word(String),
}

#[derive(Serialize, Deserialize)]
struct PieceDoc {
    lo: f64,
    hi: Bound,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coeff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terms: Option<Vec<TermDoc>>,
}

#[derive(Serialize, Deserialize)]
struct FunctionDoc {
    pieces: Vec<PieceDoc>,
    pattern: [f64; 2],
}

impl Serialize for MixedFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pieces = self
            .radial
            .pieces
            .iter()
            .filter(|p| !p.is_zero())
            .map(|p| {
                let hi = if p.hi.is_finite() {
                    Bound::Num(p.hi)
                } else {
                    Bound::Word("inf".into())
                };
                match p.as_pure_power() {
                    Some(t) => PieceDoc {
                        lo: p.lo,
                        hi,
                        coeff: Some(t.coeff),
                        exp: Some(t.exponent),
                        terms: None,
                    },
                    None => PieceDoc {
                        lo: p.lo,
                        hi,
                        coeff: None,
                        exp: None,
                        terms: Some(
                            p.terms
                                .iter()
                                .map(|t| TermDoc {
                                    coeff: t.coeff,
                                    exp: t.exponent,
                                    ln_pow: t.ln_pow,
                                })
                                .collect(),
                        ),
                    },
                }
            })
            .collect();
        FunctionDoc {
            pieces,
            pattern: [self.angular.value_pos, self.angular.value_neg],
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MixedFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = FunctionDoc::deserialize(deserializer)?;
        let mut pieces = Vec::new();
        for p in doc.pieces {
            let hi = match p.hi {
                Bound::Num(v) => v,
                Bound::Word(w) if w == "inf" => f64::INFINITY,
                Bound::Word(w) => {
                    return Err(D::Error::custom(format!("bad upper bound {w:?}")))
                }
            };
            let terms = match (p.coeff, p.exp, p.terms) {
                (Some(c), Some(s), None) => vec![PowerTerm::new(c, s)],
                (None, None, Some(ts)) => ts
                    .into_iter()
                    .map(|t| PowerTerm { coeff: t.coeff, exponent: t.exp, ln_pow: t.ln_pow })
                    .collect(),
                _ => {
                    return Err(D::Error::custom(
                        "piece needs either coeff/exp or terms",
                    ))
                }
            };
            pieces.push(PowerPiece { lo: p.lo, hi, terms });
        }
        let radial = RadialProfile::from_pieces(pieces).map_err(D::Error::custom)?;
        Ok(MixedFunction {
            radial,
            angular: AngularPattern { value_pos: doc.pattern[0], value_neg: doc.pattern[1] },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_constant_and_signed() {
        let f = MixedFunction::new(RadialProfile::power(1.0, 0.0), AngularPattern::CONSTANT);
        assert_eq!(f.evaluate(5.0, Hemisphere::Pos).unwrap(), 1.0);

        let g = MixedFunction::new(RadialProfile::power(1.0, 2.0), AngularPattern::signed(1.0));
        assert_eq!(g.evaluate(2.0, Hemisphere::Neg).unwrap(), -4.0);
        assert!(g.evaluate(0.0, Hemisphere::Pos).is_err());
    }

    #[test]
    fn evaluate_extremal_power() {
        // |x|^{-(n+alpha)/p - eps} cut above 1, n=2, alpha=0, p=2, eps=0.1
        let f = MixedFunction::radial_only(
            RadialProfile::power_cut(1.0, -1.1, 1.0, f64::INFINITY).unwrap(),
        );
        let v = f.evaluate(4.0, Hemisphere::Pos).unwrap();
        assert!((v - 4.0_f64.powf(-1.1)).abs() < 1e-15);
        assert_eq!(f.evaluate(0.5, Hemisphere::Pos).unwrap(), 0.0);
    }

    #[test]
    fn angular_norm_values() {
        let c = AngularPattern::CONSTANT;
        let v = angular_lp_norm(&c, 0.0, 2.0, 2).unwrap();
        assert!((v - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-13);

        let s = AngularPattern::signed(1.0);
        let v3 = angular_lp_norm(&s, 0.0, 2.0, 3).unwrap();
        assert!((v3 - (4.0 * std::f64::consts::PI).sqrt()).abs() < 1e-13);

        let shifted = angular_lp_norm(&AngularPattern::constant(2.5), 2.5, 3.0, 4).unwrap();
        assert_eq!(shifted, 0.0);
    }

    #[test]
    fn angular_norm_monotone_in_exponent() {
        // normalized by omega^{1/pt} the two-value norm is non-decreasing in pt
        let pat = AngularPattern { value_pos: 2.0, value_neg: 0.5 };
        let n = 3;
        let omega = unit_sphere_area(n).unwrap();
        let mut last = 0.0;
        for i in 0..40 {
            let pt = 1.1 + i as f64 * 0.35;
            let v = angular_lp_norm(&pat, 0.0, pt, n).unwrap() / omega.powf(1.0 / pt);
            assert!(v >= last - 1e-12);
            last = v;
        }
    }

    #[test]
    fn scale_argument_homogeneity_and_cutoff() {
        let g = RadialProfile::power(1.0, 1.5);
        let h = g.scale_argument(2.0).unwrap();
        assert!((h.eval(3.0).unwrap() - 6.0_f64.powf(1.5)).abs() < 1e-12);

        let chi = RadialProfile::power_cut(1.0, 0.0, 1.0, f64::INFINITY).unwrap();
        let chi2 = chi.scale_argument(2.0).unwrap();
        assert_eq!(chi2.eval(0.6).unwrap(), 1.0);
        assert_eq!(chi2.eval(0.4).unwrap(), 0.0);
    }

    #[test]
    fn scale_argument_composes() {
        let f = RadialProfile::from_spans(&[
            (0.0, 1.0, 2.0, 0.5),
            (1.0, 3.0, -1.0, -0.25),
            (3.0, f64::INFINITY, 0.5, -2.0),
        ])
        .unwrap();
        let ab = f.scale_argument(1.7).unwrap().scale_argument(0.35).unwrap();
        let direct = f.scale_argument(1.7 * 0.35).unwrap();
        for i in 0..100 {
            let r = 10f64.powf(-3.0 + 6.0 * i as f64 / 99.0);
            assert!((ab.eval(r).unwrap() - direct.eval(r).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn add_refines_breakpoints() {
        let a = RadialProfile::power_cut(1.0, 0.0, 0.0, 2.0).unwrap();
        let b = RadialProfile::power_cut(3.0, 1.0, 1.0, f64::INFINITY).unwrap();
        let s = a.add(&b);
        assert_eq!(s.eval(0.5).unwrap(), 1.0);
        assert!((s.eval(1.5).unwrap() - (1.0 + 4.5)).abs() < 1e-14);
        assert!((s.eval(4.0).unwrap() - 12.0).abs() < 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let f = MixedFunction::new(
            RadialProfile::from_spans(&[(0.5, 2.0, 1.25, -0.75)]).unwrap(),
            AngularPattern { value_pos: 1.0, value_neg: -1.0 },
        );
        let s = serde_json::to_string(&f).unwrap();
        let g: MixedFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);

        let doc = r#"{"pieces":[{"lo":1.0,"hi":"inf","coeff":1.0,"exp":-1.1}],"pattern":[1.0,1.0]}"#;
        let h: MixedFunction = serde_json::from_str(doc).unwrap();
        assert!((h.radial.eval(2.0).unwrap() - 2.0_f64.powf(-1.1)).abs() < 1e-15);
    }

    #[test]
    fn overlap_rejected() {
        let r = RadialProfile::from_spans(&[(0.0, 2.0, 1.0, 0.0), (1.0, 3.0, 1.0, 0.0)]);
        assert!(r.is_err());
    }
}
