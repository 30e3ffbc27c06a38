use qds_core::baseline::BaselineParams;
use qds_core::photonics::ProtocolParams;
use qds_core::sweep::{
    analyze_async, async_max_distance, baseline_max_distance, distance_grid, entropy_profile, max_distance,
    profile_point, rate_curve, Protocol, SweepOptions,
};

#[test]
fn grid_endpoints_always_present() {
    let g = distance_grid(0.0, 600.0, 5.0).unwrap();
    assert_eq!(g.len(), 121);
    assert_eq!((g[0], g[120]), (0.0, 600.0));
    assert!(g.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(distance_grid(10.0, 20.0, 50.0).unwrap(), vec![10.0, 20.0]);
}

#[test]
fn endpoint_sweep_gives_two_rows_per_pulse_and_protocol() {
    let rows = rate_curve(
        &ProtocolParams::default(),
        &BaselineParams::default(),
        &distance_grid(40.0, 60.0, 100.0).unwrap(),
        &[1e12, 1e13],
        &SweepOptions::default(),
    )
    .unwrap();
    assert_eq!(rows.len(), 8);
    for n in [1e12, 1e13] {
        for proto in [Protocol::Async, Protocol::Baseline] {
            let d: Vec<f64> = rows.iter().filter(|r| r.pulses == n && r.protocol == proto).map(|r| r.distance_km).collect();
            assert_eq!(d, vec![40.0, 60.0]);
        }
    }
    let keys: Vec<_> = rows.iter().map(|r| (r.pulses, r.distance_km, r.protocol.label())).collect();
    assert_eq!(keys[0], (1e12, 40.0, "async"));
    assert_eq!(keys[1], (1e12, 40.0, "baseline"));
    assert_eq!(keys[7], (1e13, 60.0, "baseline"));
}

#[test]
fn rows_consistent_with_feasibility() {
    let d = distance_grid(0.0, 600.0, 50.0).unwrap();
    let rows = rate_curve(&ProtocolParams::default(), &BaselineParams::default(), &d, &[1e12], &SweepOptions::default()).unwrap();
    for r in &rows {
        assert_eq!(r.feasible, r.r_sig > 0.0, "{r:?}");
        assert_eq!(r.feasible, r.signatures > 0.0);
        assert!((r.r_sig * r.pulses - r.signatures).abs() <= 1e-9 * r.signatures);
        if r.protocol == Protocol::Async {
            assert_eq!(r.h_total, r.h_min - r.h_max);
        }
    }
    let async_rows: Vec<_> = rows.iter().filter(|r| r.protocol == Protocol::Async).collect();
    let last = async_rows.iter().rposition(|r| r.feasible).unwrap();
    assert!(async_rows[..=last].iter().all(|r| r.feasible));
    assert!(async_rows[last + 1..].iter().all(|r| !r.feasible && r.n == 0));
    assert!(last + 1 < async_rows.len());
}

#[test]
fn sweeps_are_deterministic() {
    let d = distance_grid(0.0, 500.0, 25.0).unwrap();
    let a = rate_curve(&ProtocolParams::default(), &BaselineParams::default(), &d, &[1e12, 1e14], &SweepOptions::default()).unwrap();
    let b = rate_curve(&ProtocolParams::default(), &BaselineParams::default(), &d, &[1e12, 1e14], &SweepOptions::default()).unwrap();
    assert_eq!(a, b);
    let p = ProtocolParams::default();
    assert_eq!(entropy_profile(&p, &d, 0.5).unwrap(), entropy_profile(&p, &d, 0.5).unwrap());
}

#[test]
fn profile_in_input_order_with_exact_identity() {
    let d = [300.0, 10.0, 700.0, 120.0];
    let prof = entropy_profile(&ProtocolParams::default(), &d, 0.5).unwrap();
    assert_eq!(prof.iter().map(|p| p.distance_km).collect::<Vec<_>>(), d.to_vec());
    for p in &prof {
        assert_eq!(p.h_total, p.h_min_eps - p.h_max_cor);
        assert!((0.0..=1.0).contains(&p.h_min_frac) && (0.0..=1.0).contains(&p.h_max_frac));
    }
    assert!(prof[2].n_z < 1e3 && prof[2].h_min_frac < 0.1 * prof[1].h_min_frac, "{:?}", prof[2]);
}

#[test]
fn split_moves_the_source_distances() {
    let p = ProtocolParams::default();
    let sym = profile_point(&p, 100.0, 0.5).unwrap();
    let skew = profile_point(&p, 100.0, 0.2).unwrap();
    assert!(skew.n_z > 0.0 && sym.n_z > 0.0 && skew.n_z != sym.n_z);
}

#[test]
fn max_distance_scans_the_whole_grid() {
    assert_eq!(max_distance(10.0, 100.0, |l| Ok(l <= 42.0)).unwrap(), 40.0);
    assert_eq!(max_distance(10.0, 100.0, |_| Ok(false)).unwrap(), 0.0);
    assert_eq!(max_distance(10.0, 95.0, |_| Ok(true)).unwrap(), 95.0);
}

#[test]
fn async_reaches_further_than_baseline() {
    let opts = SweepOptions::default();
    let p = ProtocolParams { pulses: 1e13, ..Default::default() };
    let a = async_max_distance(&p, &opts, 10.0, 800.0).unwrap();
    let b = baseline_max_distance(&p, &BaselineParams::default(), &opts, 10.0, 800.0).unwrap();
    assert!(b > 0.0 && a > 1.5 * b, "async {a} baseline {b}");
    let x = analyze_async(&p.with_total_distance(a), 1000, 1e-10).unwrap();
    assert!(x.sizing.feasible);
}
