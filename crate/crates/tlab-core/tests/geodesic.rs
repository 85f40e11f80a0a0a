use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tlab_core::geodesic::*;
use tlab_core::*;

fn finite(alphas: &[f64], widths: &[f64], eps: &[f64]) -> TemplateData {
    let n = widths.len() + 1;
    let walls =
        (0..n).map(|i| WallSpec { alpha: if i == 0 || i == n - 1 { None } else { Some(alphas[i - 1]) } }).collect();
    let strips = widths.iter().zip(eps).map(|(&width, &eps)| StripSpec { width, eps, degenerate_ok: false }).collect();
    TemplateData { kind: TemplateKind::Finite, anchor: 0.0, walls, strips }
}

fn rand_template(rng: &mut ChaCha8Rng) -> TemplateData {
    let n = rng.gen_range(2..=6);
    let alphas: Vec<f64> = (0..n).map(|_| rng.gen_range(0.3..2.8)).collect();
    let widths: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.3..2.0)).collect();
    let eps: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
    finite(&alphas, &widths, &eps)
}

fn rand_point(t: &TemplateData, rng: &mut ChaCha8Rng) -> TemplatePoint {
    if rng.gen_bool(0.5) {
        TemplatePoint::wall(rng.gen_range(0..t.n_walls()), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))
    } else {
        let s = rng.gen_range(0..t.strips.len());
        TemplatePoint::strip(s, rng.gen_range(-3.0..3.0), rng.gen_range(0.0..t.strips[s].width))
    }
}

fn case_one() -> SelfSimilarData {
    SelfSimilarData::new(1.0, 1.0, 1.2f64.tan(), 1.0, 0.1f64.tan())
}

#[test]
fn shoot_through_origin_is_flagged() {
    let t = finite(&[FRAC_PI_2], &[1.0, 1.0], &[0.0, 0.0]);
    let tol = ToleranceConfig::default();
    let f = shoot(&t, PlanarPoint::ORIGIN, FRAC_PI_2, &SignSequence::all_positive(1), 1, &tol).unwrap_err();
    assert_eq!(f, ShootFailure { wall: 1, reason: ShootFailureReason::OriginHit });
}

#[test]
fn shoot_diagonal_enters_at_one_one() {
    let t = finite(&[FRAC_PI_2], &[1.0, 1.0], &[0.0, 0.0]);
    let tol = ToleranceConfig::default();
    let tr = shoot(&t, PlanarPoint::ORIGIN, FRAC_PI_4, &SignSequence::all_positive(1), 1, &tol).unwrap();
    assert_eq!(tr.walls(), 1);
    assert!(tr.crossings[0].entry.dist(PlanarPoint::new(1.0, 1.0)) < 1e-12);
    assert!((tr.crossings[0].t_entry - 2f64.sqrt()).abs() < 1e-12);
    // the vertical exit line through (0,1) lies behind the ray, so wall 2 is out of reach
    assert!(shoot(&t, PlanarPoint::ORIGIN, FRAC_PI_4, &SignSequence::all_positive(1), 2, &tol).is_err());
    assert!(shoot(&t, PlanarPoint::ORIGIN, FRAC_PI_4, &SignSequence::all_positive(1), 5, &tol).is_err());
}

#[test]
fn self_similar_cone_directions_cross_forty_walls() {
    let s = case_one();
    let t = expand_self_similar(&s, 45, 0).unwrap();
    let tol = ToleranceConfig::default();
    let run = boundary_run(&t, PlanarPoint::ORIGIN, 40, &tol, DEFAULT_BRANCH_CAP).unwrap();
    let lo = run.intervals.iter().map(|i| i.lo).fold(f64::INFINITY, f64::min);
    let hi = run.intervals.iter().map(|i| i.hi).fold(f64::NEG_INFINITY, f64::max);
    let tr = shoot_auto(&t, PlanarPoint::ORIGIN, 0.5 * (lo + hi), 40, &tol).unwrap();
    assert_eq!(tr.walls(), 40);
    assert!(shoot_auto(&t, PlanarPoint::ORIGIN, hi + 0.05, 40, &tol).is_err());
    assert!(shoot_auto(&t, PlanarPoint::ORIGIN, lo - 0.05, 40, &tol).is_err());
}

#[test]
fn boundary_collapses_for_trivial_data() {
    let s = SelfSimilarData::new(FRAC_PI_2, 1.0, 0.0, 1.0, 0.0);
    let t = expand_self_similar(&s, 51, 0).unwrap();
    let b = boundary_interval(&t, PlanarPoint::ORIGIN, 50, &ToleranceConfig::default()).unwrap();
    assert!(b.theta_hi <= 1e-3, "{b:?}");
}

#[test]
fn boundary_bracket_matches_cone_angle() {
    let s = case_one();
    let t = expand_self_similar(&s, 51, 0).unwrap();
    let run = boundary_run(&t, PlanarPoint::ORIGIN, 50, &ToleranceConfig::default(), DEFAULT_BRANCH_CAP).unwrap();
    let exact = develop_self_similar(&s, QuarterPlaneCase::I, 10).unwrap().angle;
    let b = run.last();
    assert!((0.5 * (b.theta_lo + b.theta_hi) - exact).abs() <= 1e-3, "{b:?} vs {exact}");
    assert!(b.theta_hi - b.theta_lo <= 2e-3);
    for w in run.profile.windows(2) {
        assert!(w[1].theta_hi <= w[0].theta_hi + 1e-12);
    }
}

#[test]
fn boundary_needs_enough_walls() {
    let t = expand_self_similar(&case_one(), 10, 0).unwrap();
    assert!(boundary_interval(&t, PlanarPoint::ORIGIN, 50, &ToleranceConfig::default()).is_err());
    assert!(boundary_interval(&t, PlanarPoint::ORIGIN, 1, &ToleranceConfig::default()).is_err());
}

#[test]
fn same_wall_is_euclidean() {
    let t = finite(&[1.0], &[1.0, 1.0], &[0.2, 0.0]);
    let (x, y) = (TemplatePoint::wall(1, -1.0, 2.0), TemplatePoint::wall(1, 0.5, 0.3));
    let g = geodesic(&t, x, y, &ToleranceConfig::default()).unwrap();
    assert_eq!(g.kind, GeodesicKind::Straight);
    assert!((g.length - 1.5f64.hypot(1.7)).abs() < 1e-12);
}

#[test]
fn adjacent_walls_use_developed_distance() {
    // wall 0 below the x-axis, wall 1 above y = 1 in the development
    let t = finite(&[], &[1.0], &[0.0]);
    let g =
        geodesic(&t, TemplatePoint::wall(0, 0.0, -1.0), TemplatePoint::wall(1, 1.0, 1.0), &ToleranceConfig::default())
            .unwrap();
    assert_eq!(g.kind, GeodesicKind::Straight);
    assert!((g.length - 10f64.sqrt()).abs() < 1e-12, "{}", g.length);
    // with a displacement the far origin moves along the strip
    let t = finite(&[], &[1.0], &[0.7]);
    let g =
        geodesic(&t, TemplatePoint::wall(0, 0.0, -1.0), TemplatePoint::wall(1, 1.0, 1.0), &ToleranceConfig::default())
            .unwrap();
    assert!((g.length - 1.7f64.hypot(3.0)).abs() < 1e-12, "{}", g.length);
}

#[test]
fn bent_geodesics_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let tol = ToleranceConfig::default();
    let mut seen = 0;
    while seen < 5 {
        let t = rand_template(&mut rng);
        let (x, y) = (rand_point(&t, &mut rng), rand_point(&t, &mut rng));
        let g = geodesic(&t, x, y, &tol).unwrap();
        if g.kind != GeodesicKind::Bent {
            continue;
        }
        seen += 1;
        let o = dijkstra_oracle(&t, x, y, &OracleConfig::new(g.length / 100.0)).unwrap();
        assert!((o - g.length).abs() <= 0.02 * g.length, "{o} vs {}", g.length);
        // the length splits at each breakpoint origin
        let mut via = 0.0;
        let mut from = x;
        for &w in &g.breakpoints {
            via += geodesic(&t, from, TemplatePoint::origin(w), &tol).unwrap().length;
            from = TemplatePoint::origin(w);
        }
        via += geodesic(&t, from, y, &tol).unwrap().length;
        assert!((via - g.length).abs() < 1e-9);
    }
}

#[test]
fn oracle_on_one_wall_and_across_a_strip() {
    let t = finite(&[1.3], &[1.0, 0.8], &[0.4, -0.2]);
    let tol = ToleranceConfig::default();
    let (x, y) = (TemplatePoint::wall(1, -1.0, 0.5), TemplatePoint::wall(1, 1.5, 1.0));
    let d = 2.5f64.hypot(0.5);
    let o = dijkstra_oracle(&t, x, y, &OracleConfig::new(d / 100.0)).unwrap();
    assert!((o - d).abs() <= 0.02 * d);
    let (x, y) = (TemplatePoint::wall(0, 0.0, -1.0), TemplatePoint::strip(0, 0.3, 0.5));
    let g = geodesic(&t, x, y, &tol).unwrap();
    assert_eq!(g.kind, GeodesicKind::Straight);
    let o = dijkstra_oracle(&t, x, y, &OracleConfig::new(g.length / 100.0)).unwrap();
    assert!((o - g.length).abs() <= 0.02 * g.length);
    assert!(dijkstra_oracle(&t, x, y, &OracleConfig::new(0.0)).is_err());
}

#[test]
fn random_geodesics_agree_with_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let tol = ToleranceConfig::default();
    for _ in 0..15 {
        let t = rand_template(&mut rng);
        let (x, y) = (rand_point(&t, &mut rng), rand_point(&t, &mut rng));
        let g = geodesic(&t, x, y, &tol).unwrap();
        let coarse = dijkstra_oracle(&t, x, y, &OracleConfig::new(0.05)).unwrap();
        let o = dijkstra_oracle(&t, x, y, &OracleConfig::new(coarse / 200.0)).unwrap();
        assert!((g.length - o).abs() <= 3.0 * o / 200.0, "{} vs {o}", g.length);
        // the oracle only sees paths, so it can never undercut the geodesic by more than its resolution
        assert!(o >= g.length - 1e-9 - o / 200.0);
    }
}

#[test]
fn metric_axioms_on_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let tol = ToleranceConfig::default();
    for _ in 0..30 {
        let t = rand_template(&mut rng);
        let (x, y, z) = (rand_point(&t, &mut rng), rand_point(&t, &mut rng), rand_point(&t, &mut rng));
        let d = |a, b| geodesic(&t, a, b, &tol).unwrap().length;
        assert!(d(x, x).abs() < 1e-12);
        assert!((d(x, y) - d(y, x)).abs() < 1e-9);
        assert!(d(x, z) <= d(x, y) + d(y, z) + 1e-9);
    }
}

#[test]
fn geodesic_points_split_length() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let tol = ToleranceConfig::default();
    for _ in 0..10 {
        let t = rand_template(&mut rng);
        let (x, y) = (rand_point(&t, &mut rng), rand_point(&t, &mut rng));
        let g = geodesic(&t, x, y, &tol).unwrap();
        for i in 1..5 {
            let s = g.length * i as f64 / 5.0;
            let z = g.point_at(s);
            z.check(&t, 1e-7).unwrap();
            assert!((geodesic(&t, x, z, &tol).unwrap().length - s).abs() < 1e-6);
            assert!((geodesic(&t, z, y, &tol).unwrap().length - (g.length - s)).abs() < 1e-6);
        }
    }
}

#[test]
fn points_off_the_template_rejected() {
    let t = finite(&[1.0], &[1.0, 1.0], &[0.0, 0.0]);
    let tol = ToleranceConfig::default();
    assert!(geodesic(&t, TemplatePoint::wall(5, 0.0, 0.0), TemplatePoint::wall(0, 0.0, 0.0), &tol).is_err());
    assert!(geodesic(&t, TemplatePoint::strip(0, 0.0, 2.0), TemplatePoint::wall(0, 0.0, 0.0), &tol).is_err());
}

#[test]
fn comparison_angles() {
    let t = finite(&[1.0], &[1.0, 1.0], &[0.0, 0.0]);
    let tol = ToleranceConfig::default();
    let p = TemplatePoint::wall(1, 0.0, 0.0);
    let x = TemplatePoint::wall(1, 1.0, 0.0);
    let y = TemplatePoint::wall(1, 0.5, 3f64.sqrt() / 2.0);
    assert!((comparison_angle(&t, p, x, y, &tol).unwrap() - FRAC_PI_3).abs() < 1e-12);
    let mid = TemplatePoint::wall(1, 0.5, 0.0);
    assert_eq!(comparison_angle(&t, p, x, mid, &tol).unwrap(), 0.0);
    assert!((comparison_angle_from_lengths(1.0, 1.0, 2.0) - PI).abs() < 1e-12);
}

#[test]
fn tits_estimate_of_extreme_rays() {
    let s = case_one();
    let t = expand_self_similar(&s, 60, 0).unwrap();
    let tol = ToleranceConfig::default();
    let run = boundary_run(&t, PlanarPoint::ORIGIN, 40, &tol, DEFAULT_BRANCH_CAP).unwrap();
    let lo = run.intervals.iter().map(|i| i.lo).fold(f64::INFINITY, f64::min);
    let hi = run.intervals.iter().map(|i| i.hi).fold(f64::NEG_INFINITY, f64::max);
    let r1 = shoot_auto(&t, PlanarPoint::ORIGIN, lo + 1e-9, 40, &tol).unwrap();
    let r2 = shoot_auto(&t, PlanarPoint::ORIGIN, hi - 1e-9, 40, &tol).unwrap();
    assert_eq!(tits_angle_estimate(&t, &r1, &r1, 64.0, &tol).unwrap(), 0.0);
    let exact = exact_tits_angle(&s).unwrap();
    let mut prev = f64::INFINITY;
    for k in [4, 6, 8, 10] {
        let a = tits_angle_estimate(&t, &r1, &r2, f64::from(1u32 << k), &tol).unwrap();
        assert!(a <= PI - s.beta + 1e-9);
        assert!((a - exact).abs() <= prev + 1e-9);
        prev = (a - exact).abs();
    }
    assert!(prev <= 1e-3, "{prev}");
}

#[test]
fn rays_crossing_everything_obey_angle_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let tol = ToleranceConfig::default();
    let beta = 0.9;
    for _ in 0..3 {
        let s = SelfSimilarData::new(beta, 1.0, rng.gen_range(-3.0..3.0), 1.0, rng.gen_range(-3.0..3.0));
        if triviality(&s).trivial {
            continue;
        }
        let t = expand_self_similar(&s, 40, 0).unwrap();
        let run = boundary_run(&t, PlanarPoint::ORIGIN, 30, &tol, DEFAULT_BRANCH_CAP).unwrap();
        let lo = run.intervals.iter().map(|i| i.lo).fold(f64::INFINITY, f64::min);
        let hi = run.intervals.iter().map(|i| i.hi).fold(f64::NEG_INFINITY, f64::max);
        let r1 = shoot_auto(&t, PlanarPoint::ORIGIN, lo + 1e-9, 30, &tol).unwrap();
        let r2 = shoot_auto(&t, PlanarPoint::ORIGIN, hi - 1e-9, 30, &tol).unwrap();
        let a = tits_angle_estimate(&t, &r1, &r2, 64.0, &tol).unwrap();
        assert!(a <= PI - beta + 1e-9, "{a}");
    }
}

#[test]
fn excess_bound_on_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let tol = ToleranceConfig::default();
    for _ in 0..20 {
        let t = rand_template(&mut rng);
        let (x, y, z) = (rand_point(&t, &mut rng), rand_point(&t, &mut rng), rand_point(&t, &mut rng));
        let g = geodesic(&t, x, z, &tol).unwrap();
        let l = g.length;
        let e = geodesic(&t, x, y, &tol).unwrap().length + geodesic(&t, y, z, &tol).unwrap().length - l;
        if l <= 0.0 || e > 2.0 * l {
            continue;
        }
        let dist = (0..=64)
            .map(|i| geodesic(&t, y, g.point_at(l * f64::from(i) / 64.0), &tol).unwrap().length)
            .fold(f64::INFINITY, f64::min);
        assert!(dist <= (l * e).sqrt() + l / 64.0 + 1e-9);
    }
}

#[test]
fn cluster_excess_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 12;
    let alphas: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.6)).collect();
    let widths: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.02..0.08)).collect();
    let eps: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-0.05..0.05)).collect();
    let t = finite(&alphas, &widths, &eps);
    let cfg = ClusterConfig {
        center: TemplatePoint::origin(6),
        radius: 0.5,
        r_prime: 1.5,
        n0: 1,
        n1: 10,
        samples: 3,
        multiplier: 3.0,
        mesh_step: None,
        seed: 0,
    };
    let r = cluster_excess_experiment(&t, &cfg, &ToleranceConfig::default()).unwrap();
    assert_eq!(r.n_span, 9);
    assert_eq!(r.samples.len(), 3);
    assert!(r.min_excess > 0.0);
    for s in &r.samples {
        assert!((s.normalized_excess - s.excess / (9.0 * 1.5)).abs() < 1e-12);
        assert!(s.avoiding_length >= s.distance);
    }
}
