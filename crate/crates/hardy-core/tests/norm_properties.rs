//! Randomized invariant checks for the norm functionals.

use hardy_core::funcspace::{AngularPattern, MixedFunction, RadialProfile};
use hardy_core::norms::{herz_norm, mixed_lebesgue_norm, norm, weak_mixed_norm, SpaceSpec};
use hardy_core::quadrature::{integrate_abs_pow_interval, QuadGrid};
use hardy_core::special::unit_sphere_area;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Compactly supported piecewise-power profile with 1..=3 pieces.
fn random_profile(rng: &mut ChaCha8Rng) -> RadialProfile {
    let count = rng.gen_range(1..=3usize);
    let mut edges: Vec<f64> = (0..=count)
        .map(|_| 10f64.powf(rng.gen_range(-1.0..1.3)))
        .collect();
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup_by(|a, b| (*a / *b - 1.0).abs() < 1e-3);
    if edges.len() < 2 {
        edges.push(edges[0] * 2.0);
    }
    let mut spans = Vec::new();
    for w in edges.windows(2) {
        let coeff = rng.gen_range(0.2..3.0) * if rng.gen_bool(0.3) { -1.0 } else { 1.0 };
        let exp = rng.gen_range(-1.5..0.8);
        spans.push((w[0], w[1], coeff, exp));
    }
    RadialProfile::from_spans(&spans).unwrap()
}

fn random_pattern(rng: &mut ChaCha8Rng) -> AngularPattern {
    AngularPattern {
        value_pos: rng.gen_range(-2.0..2.0),
        value_neg: rng.gen_range(-2.0..2.0),
    }
}

#[test]
fn constant_pattern_reduces_to_radial_lp() {
    // pt = p on a constant pattern: norm = omega^{1/p} |v| (radial L^p(r^alpha))
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grid = QuadGrid::default();
    for _ in 0..30 {
        let n = rng.gen_range(2..=4i64);
        let p = rng.gen_range(1.1..3.0);
        let alpha = rng.gen_range(-0.5..1.5);
        let v = rng.gen_range(0.3..2.0);
        let g = random_profile(&mut rng);
        let f = MixedFunction::new(g.clone(), AngularPattern::constant(v));
        let got = mixed_lebesgue_norm(&f, p, p, alpha, n, &grid).unwrap();
        let radial =
            integrate_abs_pow_interval(&g, p, n as f64 - 1.0 + alpha, 0.0, f64::INFINITY, &grid)
                .unwrap()
                .powf(1.0 / p);
        let want = unit_sphere_area(n).unwrap().powf(1.0 / p) * v * radial;
        assert!(rel(got, want) < 1e-12, "reduction failed: {got} vs {want}");
    }
}

#[test]
fn weak_norm_dominated_by_strong_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let grid = QuadGrid::default();
    for trial in 0..200 {
        let n = rng.gen_range(2..=4i64);
        let p = rng.gen_range(1.0..3.0);
        let pt = rng.gen_range(1.1..4.0);
        let alpha = rng.gen_range(-0.5..1.5);
        let f = MixedFunction::new(random_profile(&mut rng), random_pattern(&mut rng));
        let weak = weak_mixed_norm(&f, p, pt, alpha, n, &grid).unwrap();
        let strong = mixed_lebesgue_norm(&f, p, pt, alpha, n, &grid).unwrap();
        assert!(
            weak <= strong * (1.0 + 1e-9),
            "trial {trial}: weak {weak} exceeds strong {strong}"
        );
    }
}

#[test]
fn norms_are_absolutely_homogeneous() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let grid = QuadGrid::default();
    for trial in 0..12 {
        let n = rng.gen_range(2..=3i64);
        let g = random_profile(&mut rng);
        let pattern = random_pattern(&mut rng);
        let f = MixedFunction::new(g.clone(), pattern);
        let c = rng.gen_range(0.01..50.0) * if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
        let fc = MixedFunction::new(g.scale(c), pattern);
        let specs = [
            SpaceSpec::MixedLebesgue { p: 2.0, pt: 2.5, alpha: 0.2 },
            SpaceSpec::WeakMixed { p: 1.8, pt: 2.5, alpha: 0.2 },
            SpaceSpec::CentralMorrey { p: 2.0, pt: 2.5, lambda: -0.1 },
            SpaceSpec::Cmo { p: 2.0, pt: 2.5 },
            SpaceSpec::LambdaCmo { p: 2.0, pt: 2.5, lambda: 0.05 },
            SpaceSpec::Herz { alpha: 0.3, q: 1.5, p: 2.0, pt: 2.5 },
            SpaceSpec::MorreyHerz { alpha: 0.3, q: 1.5, lambda: 0.2, p: 2.0, pt: 2.5 },
        ];
        for spec in &specs {
            let a = norm(&f, spec, n, &grid).unwrap();
            let b = norm(&fc, spec, n, &grid).unwrap();
            assert!(
                rel(b, c.abs() * a) < 1e-12,
                "trial {trial}, {spec:?}: {b} vs {}",
                c.abs() * a
            );
        }
    }
}

#[test]
fn herz_with_zero_alpha_and_q_eq_p_is_mixed_lebesgue() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let grid = QuadGrid::default();
    for trial in 0..20 {
        let n = rng.gen_range(2..=4i64);
        let p = rng.gen_range(1.2..3.0);
        let pt = rng.gen_range(1.1..4.0);
        let f = MixedFunction::new(random_profile(&mut rng), random_pattern(&mut rng));
        let h = herz_norm(&f, 0.0, p, p, pt, n, (-60, 60), &grid).unwrap();
        let l = mixed_lebesgue_norm(&f, p, pt, 0.0, n, &grid).unwrap();
        assert!(rel(h, l) < 1e-8, "trial {trial}: herz {h} vs lebesgue {l}");
    }
}

#[test]
fn herz_norm_falls_as_q_rises() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let grid = QuadGrid::default();
    for _ in 0..15 {
        let n = rng.gen_range(2..=3i64);
        let p = rng.gen_range(1.2..3.0);
        let pt = rng.gen_range(1.1..4.0);
        let alpha = rng.gen_range(-0.5..0.5);
        let f = MixedFunction::new(random_profile(&mut rng), random_pattern(&mut rng));
        let mut last = f64::INFINITY;
        for q in [0.6, 1.0, 1.7, 2.8, 5.0] {
            let v = herz_norm(&f, alpha, q, p, pt, n, (-60, 60), &grid).unwrap();
            assert!(v <= last * (1.0 + 1e-10), "q={q}: {v} > {last}");
            last = v;
        }
    }
}
