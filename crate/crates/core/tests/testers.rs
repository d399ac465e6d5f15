use htester::distributions::{dot, RIDistribution, RadialDistribution};
use htester::oracles::{distance_mc, FunctionOracle, HalfspaceSpec, Sign};
use htester::rng::stream;
use htester::testers::{
    find_pivot, outer_map, rescale_outer, ri_tester_live, simple_tester, Decision, Reason,
    TesterConfig,
};
use proptest::prelude::*;

fn balanced(n: usize) -> FunctionOracle {
    FunctionOracle::halfspace(HalfspaceSpec::axis(n, 0, 0.0).unwrap())
}

#[test]
fn simple_tester_accepts_halfspaces() {
    let n = 50;
    let d = RIDistribution::sphere(n, (n as f64).sqrt()).unwrap();
    let f = balanced(n);
    let cfg = TesterConfig::calibrated(0.2, 0.1);
    let acc = (0..50)
        .filter(|&s| {
            simple_tester(&d, &f.clone(), &cfg, &mut stream(31, s))
                .unwrap()
                .accepted()
        })
        .count();
    assert!(acc >= 45, "{acc}/50");
}

#[test]
fn simple_tester_rejects_two_ring_flip() {
    let n = 50;
    let rn = (n as f64).sqrt();
    let d = RIDistribution::new(
        n,
        RadialDistribution::equal_atoms(vec![0.5 * rn, rn]).unwrap(),
    )
    .unwrap();
    let f = FunctionOracle::shell_flip(HalfspaceSpec::axis(n, 0, 0.0).unwrap(), vec![0.5 * rn]);
    let far = distance_mc(&f, &balanced(n), &d, 20_000, &mut stream(32, 999)).unwrap();
    assert!((far - 0.5).abs() < 0.02);
    let cfg = TesterConfig::calibrated(0.2, 0.1);
    let rej = (0..50)
        .filter(|&s| {
            !simple_tester(&d, &f.clone(), &cfg, &mut stream(32, s))
                .unwrap()
                .accepted()
        })
        .count();
    assert!(rej >= 45, "{rej}/50");
}

#[test]
fn pivot_stays_above_threshold() {
    let d =
        RIDistribution::new(5, RadialDistribution::equal_atoms(vec![1.0, 4.0]).unwrap()).unwrap();
    let f = FunctionOracle::halfspace(HalfspaceSpec::axis(5, 0, 2.0).unwrap());
    for s in 0..50 {
        let p = find_pivot(&d, &f, 0.04, 0.1, &mut stream(33, s)).unwrap();
        assert!(p.pivot >= 2.0, "{p:?}");
    }
}

#[test]
fn ri_tester_accepts_offset_halfspace() {
    let n = 30;
    let d = RIDistribution::new(
        n,
        RadialDistribution::equal_atoms(vec![1.0, 3.0, 9.0]).unwrap(),
    )
    .unwrap()
    .isotropic_rescale()
    .unwrap();
    let f = FunctionOracle::halfspace(HalfspaceSpec::axis(n, 0, 0.7 * (n as f64).sqrt()).unwrap());
    let cfg = TesterConfig::calibrated(0.25, 0.2);
    let acc = (0..25)
        .filter(|&s| {
            ri_tester_live(&d, &f.clone(), &cfg, &mut stream(34, s))
                .unwrap()
                .accepted()
        })
        .count();
    assert!(acc >= 20, "{acc}/25");
}

#[test]
fn ri_tester_accepts_constants() {
    let n = 10;
    let d =
        RIDistribution::new(n, RadialDistribution::equal_atoms(vec![1.0, 3.0]).unwrap()).unwrap();
    let f = FunctionOracle::constant(n, Sign::Neg);
    let cfg = TesterConfig::calibrated(0.25, 0.2);
    let v = ri_tester_live(&d, &f, &cfg, &mut stream(35, 0)).unwrap();
    assert_eq!(v.decision, Decision::Accept);
    assert_eq!(v.reason, Reason::Monochromatic);
    assert_eq!(v.samples_used, f.calls());
}

#[test]
fn ri_samples_equal_oracle_calls() {
    let n = 10;
    let d = RIDistribution::new(
        n,
        RadialDistribution::equal_atoms(vec![1.0, 3.0, 9.0]).unwrap(),
    )
    .unwrap();
    let f = balanced(n);
    let v = ri_tester_live(
        &d,
        &f,
        &TesterConfig::calibrated(0.25, 0.2),
        &mut stream(36, 0),
    )
    .unwrap();
    assert_eq!(v.samples_used, f.calls());
}

#[test]
fn ri_decisions_ignore_global_scale() {
    // Doubling every radius and the threshold doubles every sample exactly.
    let n = 10;
    let radial = RadialDistribution::equal_atoms(vec![1.0, 3.0, 9.0]).unwrap();
    let d1 = RIDistribution::new(n, radial).unwrap();
    let d2 = d1.clone().with_scale(2.0).unwrap();
    let cfg = TesterConfig::calibrated(0.25, 0.2);
    for (s, t) in [(0u64, 0.7), (1, 2.0), (2, -1.5)] {
        let f1 = FunctionOracle::halfspace(HalfspaceSpec::axis(n, 0, t).unwrap());
        let f2 = FunctionOracle::halfspace(HalfspaceSpec::axis(n, 0, 2.0 * t).unwrap());
        let a = ri_tester_live(&d1, &f1, &cfg, &mut stream(37, s)).unwrap();
        let b = ri_tester_live(&d2, &f2, &cfg, &mut stream(37, s)).unwrap();
        assert_eq!(
            (a.decision, &a.reason, a.samples_used),
            (b.decision, &b.reason, b.samples_used)
        );
    }
}

proptest! {
    #[test]
    fn outer_map_keeps_balanced_labels(
        x in prop::collection::vec(-50.0f64..50.0, 4),
        w in prop::collection::vec(-1.0f64..1.0, 4),
        t in 0.1f64..10.0,
    ) {
        prop_assume!(x.iter().any(|v| *v != 0.0));
        let y = outer_map(&x, t).unwrap();
        prop_assert_eq!(Sign::of(dot(&w, &x)), Sign::of(dot(&w, &y)));
        let r = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        // Norms land in [T(n + 1), 2T(n + 1)], the top reached once e^{−‖x‖/T} underflows.
        prop_assert!(r >= 5.0 * t * (1.0 - 1e-12) && r <= 10.0 * t * (1.0 + 1e-12));
    }

    #[test]
    fn rescaled_points_stay_aligned(x in prop::collection::vec(-5.0f64..5.0, 3), r in 0.1f64..4.0) {
        prop_assume!(x.iter().any(|v| v.abs() > 1e-6));
        let y = rescale_outer(&x, r).unwrap();
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ny = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((dot(&x, &y) - nx * ny).abs() <= 1e-9 * nx * ny.max(1.0));
    }
}
