mod common;

use std::collections::BTreeMap;

use common::config;
use pilotwave::dynamics::{cavity_threshold, TrajectoryRow};
use pilotwave::experiments::{
    detect_crossings, detect_crossings_with, dispersion_test, impact_test, label_cavities, occupancy, sweep, CavityMap,
    SweepAxis, SweepRow, SweepTable,
};
use pilotwave::spectral::Grid;
use pilotwave::topography::{cavities, CavitySpec};
use proptest::prelude::*;

/// Map with `count` cavities where only the listed pairs are adjacent.
fn map(count: u32, adjacency: Vec<(u32, u32)>) -> CavityMap {
    let grid = Grid::new(8.0, 8).unwrap();
    CavityMap {
        grid,
        labels: vec![0; grid.len()],
        count,
        adjacency,
    }
}

/// Samples every `dt` on `(0, t_end]`, labelled by `label(t)`.
fn path(dt: f64, t_end: f64, label: impl Fn(f64) -> u32) -> Vec<TrajectoryRow> {
    let steps = (t_end / dt).round() as usize;
    (1..=steps)
        .map(|i| {
            let t = i as f64 * dt;
            TrajectoryRow {
                t,
                x: t,
                y: 0.0,
                vx: 0.0,
                vy: 0.0,
                in_contact: false,
                cavity: label(t),
            }
        })
        .collect()
}

/// One pass over the samples: close each run of equal nonzero labels, keep
/// it if it lasted at least `debounce`, and count a crossing whenever a
/// kept run differs from the previous kept run.
fn oracle_crossings(rows: &[TrajectoryRow], debounce: f64) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut confirmed: Option<u32> = None;
    let mut run: Option<(u32, f64)> = None;
    let mut close = |run: Option<(u32, f64)>, out: &mut Vec<(u32, u32)>| {
        if let Some((label, length)) = run {
            if length >= debounce {
                if let Some(prev) = confirmed {
                    if prev != label {
                        out.push((prev, label));
                    }
                }
                confirmed = Some(label);
            }
        }
    };
    for (i, r) in rows.iter().enumerate() {
        let w = if i + 1 < rows.len() {
            rows[i + 1].t - r.t
        } else if i > 0 {
            r.t - rows[i - 1].t
        } else {
            0.0
        };
        if r.cavity == 0 {
            continue;
        }
        run = match run {
            Some((label, length)) if label == r.cavity => Some((label, length + w)),
            other => {
                close(other, &mut out);
                Some((r.cavity, w))
            }
        };
    }
    close(run, &mut out);
    out
}

#[test]
fn confined_path_has_no_crossings() {
    let rows = path(1.0 / 16.0, 100.0, |_| 1);
    let m = map(1, vec![]);
    let events = detect_crossings(&rows, &m);
    assert!(events.is_empty());
    let stats = occupancy(&rows, &m, &events, 0.025);
    assert!((stats.dwell[0] - 100.0).abs() < 1e-9);
    assert_eq!(stats.rate_per_minute, 0.0);
}

#[test]
fn barrier_interlude_gives_one_event() {
    let rows = path(1.0 / 16.0, 30.0, |t| match t {
        t if t <= 10.0 => 1,
        t if t <= 12.0 => 0,
        _ => 2,
    });
    let events = detect_crossings(&rows, &map(2, vec![(1, 2)]));
    assert_eq!(events.len(), 1);
    assert_eq!((events[0].from, events[0].to), (1, 2));
    assert!((events[0].t - (12.0 + 1.0 / 16.0)).abs() < 1e-12);
    assert!(!events[0].diagonal);
}

#[test]
fn alternating_every_ten_periods() {
    let rows = path(1.0 / 16.0, 100.0, |t| if ((t - 1e-9) / 10.0).floor() as i64 % 2 == 0 { 1 } else { 2 });
    let m = map(2, vec![(1, 2)]);
    let events = detect_crossings(&rows, &m);
    assert_eq!(events.len(), 9);
    let stats = occupancy(&rows, &m, &events, 0.025);
    assert!((stats.dwell[0] - 50.0).abs() < 1e-9 && (stats.dwell[1] - 50.0).abs() < 1e-9);
    assert!((stats.fraction[0] - 0.5).abs() < 1e-12);
    assert_eq!(stats.edges[&(1, 2)], 9);
    assert!((stats.rate_per_minute - 9.0 / (100.0 * 0.025 / 60.0)).abs() < 1e-9);
}

#[test]
fn sub_period_flicker_is_debounced() {
    // in cavity 1 until t = 20, then flickering 1/2 every quarter period
    // for half a period, then in cavity 2
    let rows = path(1.0 / 64.0, 40.0, |t| match t {
        t if t <= 20.0 => 1,
        t if t <= 20.5 => {
            if ((t - 20.0) * 4.0).ceil() as i64 % 2 == 1 {
                2
            } else {
                1
            }
        }
        _ => 2,
    });
    let events = detect_crossings(&rows, &map(2, vec![(1, 2)]));
    assert_eq!(events.len(), 1);
    assert!(detect_crossings_with(&rows, &map(2, vec![(1, 2)]), 0.0).len() > 1);
}

#[test]
fn diagonal_crossings_are_tagged() {
    let rows = path(1.0 / 16.0, 20.0, |t| if t <= 10.0 { 1 } else { 5 });
    let events = detect_crossings(&rows, &map(9, vec![(1, 2), (1, 4)]));
    assert_eq!(events.len(), 1);
    assert!(events[0].diagonal);
}

#[test]
fn dwell_is_stable_under_resampling() {
    let label = |t: f64| match t {
        t if t <= 13.0 => 1,
        t if t <= 14.5 => 0,
        t if t <= 31.0 => 2,
        _ => 1,
    };
    let fine = path(1.0 / 64.0, 48.0, label);
    let coarse: Vec<TrajectoryRow> = fine.iter().skip(3).step_by(4).copied().collect();
    let m = map(2, vec![(1, 2)]);
    let a = occupancy(&fine, &m, &detect_crossings(&fine, &m), 0.025);
    let b = occupancy(&coarse, &m, &detect_crossings(&coarse, &m), 0.025);
    for c in 0..2 {
        // cavity 1 is visited twice
        assert!((a.dwell[c] - b.dwell[c]).abs() <= 2.0 * 4.0 / 64.0);
    }
    assert_eq!(a.crossings, b.crossings);
}

#[test]
fn three_by_three_labels_match_flood_fill_oracle() {
    let spec = CavitySpec {
        rows: 3,
        cols: 3,
        well_width: 2.0,
        barrier_width: 0.5,
        deep_depth: 1.0,
        shallow_depth: 0.1,
        smoothing: 0.25,
    };
    let grid = Grid::new(12.0, 128).unwrap();
    let topo = cavities(grid, spec).unwrap();
    let thr = cavity_threshold(&topo);
    let m = label_cavities(&topo, thr).unwrap();

    // union-find over deep cells
    let n = grid.n;
    let mut parent: Vec<usize> = (0..grid.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    let deep = |i: usize| topo.depth.values[i] > thr;
    for i in 0..grid.len() {
        let (x, y) = (i % n, i / n);
        for j in [y * n + (x + 1) % n, ((y + 1) % n) * n + x] {
            if deep(i) && deep(j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut roots = BTreeMap::new();
    for i in 0..grid.len() {
        if deep(i) {
            let r = find(&mut parent, i);
            let label = m.labels[i];
            assert_ne!(label, 0);
            assert_eq!(*roots.entry(r).or_insert(label), label);
        } else {
            assert_eq!(m.labels[i], 0);
        }
    }
    assert_eq!(roots.len(), 9);
    assert_eq!(m.count, 9);

    // layout neighbours: centres one pitch apart along exactly one axis
    let pitch = spec.well_width + spec.barrier_width;
    let centres = spec.centres(12.0);
    let mut expected = Vec::new();
    for a in 0..9 {
        for b in a + 1..9 {
            let d = [(centres[a][0] - centres[b][0]).abs(), (centres[a][1] - centres[b][1]).abs()];
            if (d[0] < 1e-9 && (d[1] - pitch).abs() < 1e-9) || (d[1] < 1e-9 && (d[0] - pitch).abs() < 1e-9) {
                let (la, lb) = (m.label_at(centres[a]), m.label_at(centres[b]));
                expected.push((la.min(lb), la.max(lb)));
            }
        }
    }
    expected.sort();
    assert_eq!(expected.len(), 12);
    assert_eq!(m.adjacency, expected);
}

#[test]
fn single_impact_is_symmetric_and_reports_crests() {
    let r = impact_test(&config(&[
        ("domain.n", "64"),
        ("domain.length", "16"),
        ("forcing.gamma", "4.8"),
        ("run.t_max", "8"),
    ]))
    .unwrap();
    assert!(!r.no_wave);
    assert!(r.asymmetry < 1e-8, "{:e}", r.asymmetry);
    assert!(r.crests.len() >= 2);
}

#[test]
fn undisturbed_bath_reports_no_wave() {
    let r = impact_test(&config(&[
        ("domain.n", "32"),
        ("domain.length", "8"),
        ("droplet.enabled", "false"),
        ("run.t_max", "2"),
    ]))
    .unwrap();
    assert!(r.no_wave && r.crests.is_empty());
    assert!(impact_test(&config(&[("domain.topography", "cavities")])).is_err());
}

#[test]
fn dispersion_driver_passes_and_flags_reversed_sign() {
    let cfg = config(&[("domain.n", "32"), ("domain.length", "8")]);
    let consts = cfg.constants().unwrap();
    let r = dispersion_test(cfg.grid, &consts, cfg.step, 1e-3).unwrap();
    assert_eq!(r.modes.len(), 10);
    assert!(r.passed(5e-3), "max error {}", r.max_rel_error);
    let bad = config(&[("domain.n", "32"), ("domain.length", "8"), ("debug.dtn_sign", "reversed")]);
    let r = dispersion_test(bad.grid, &consts, bad.step, 1e-3).unwrap();
    assert!(r.blowup.is_some() && !r.passed(5e-3));
    let r = dispersion_test(cfg.grid, &consts, cfg.step, 0.0).unwrap();
    assert!(r.passed(5e-3) && r.note.unwrap().contains("no oscillation"));
}

fn small_cavity_config() -> pilotwave::io::SimConfig {
    config(&[
        ("domain.n", "32"),
        ("domain.length", "8"),
        ("domain.topography", "cavities"),
        ("cavity.smoothing", "0.5"),
        ("fluid.drop_damping", "0.3"),
        ("droplet.x", "2.75"),
        ("droplet.y", "4"),
        ("droplet.perturbation", "0.01"),
        ("droplet.impact_phase", "0.375"),
        ("numerics.dt", "1/32"),
        ("run.t_max", "3"),
        ("run.snapshot_stride", "0"),
    ])
}

#[test]
fn sweep_is_order_independent_and_matches_single_runs() {
    let base = small_cavity_config();
    let a = sweep(&base, SweepAxis::Gamma, &[4.0, 2.0, 3.0]).unwrap();
    let b = sweep(&base, SweepAxis::Gamma, &[2.0, 3.0, 4.0]).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.rows.iter().map(|r| r.value).collect::<Vec<_>>(), vec![2.0, 3.0, 4.0]);

    let art = pilotwave::dynamics::run(&base.with_override("forcing.gamma", "3").unwrap()).unwrap();
    let events = detect_crossings(&art.trajectory, &art.cavities);
    let stats = occupancy(&art.trajectory, &art.cavities, &events, art.constants.scales.period);
    let row = &a.rows[1];
    assert_eq!(row.crossings, stats.crossings);
    assert_eq!(row.dwell_fraction, stats.fraction);
    assert_eq!(row.mean_speed, art.mean_speed(10.0));
}

#[test]
fn sweep_records_failures_and_continues() {
    let base = small_cavity_config();
    let t = sweep(&base, SweepAxis::WellWidth, &[2.0, 50.0]).unwrap();
    assert!(t.rows[0].failure.is_none());
    assert!(t.rows[1].failure.is_some());
    assert!("depth".parse::<SweepAxis>().is_err());
}

#[test]
fn interior_maximum_flag() {
    let row = |value: f64, rate: f64| SweepRow {
        value,
        mean_speed: 0.0,
        crossings: 0,
        rate_per_minute: rate,
        dwell_fraction: vec![],
        failure: None,
    };
    let mut t = SweepTable {
        axis: SweepAxis::WellWidth,
        rows: vec![row(1.0, 0.5), row(2.0, 3.0), row(3.0, 1.0)],
    };
    assert_eq!(t.interior_max(), Some(2.0));
    t.rows[2].rate_per_minute = 4.0;
    assert_eq!(t.interior_max(), None);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn crossings_match_streaming_oracle(
        labels in prop::collection::vec(0u32..4, 1..60),
        lengths in prop::collection::vec(1usize..40, 60),
        debounce in prop::sample::select(vec![0.0, 0.5, 1.0, 2.0]),
    ) {
        let dt = 1.0 / 16.0;
        let mut rows = Vec::new();
        let mut t = 0.0;
        for (label, len) in labels.iter().zip(&lengths) {
            for _ in 0..*len {
                t += dt;
                rows.push(TrajectoryRow { t, x: 0.0, y: 0.0, vx: 0.0, vy: 0.0, in_contact: false, cavity: *label });
            }
        }
        let m = map(3, vec![(1, 2), (2, 3)]);
        let events = detect_crossings_with(&rows, &m, debounce);
        let got: Vec<(u32, u32)> = events.iter().map(|e| (e.from, e.to)).collect();
        prop_assert_eq!(&got, &oracle_crossings(&rows, debounce));
        for w in events.windows(2) {
            prop_assert_eq!(w[0].to, w[1].from);
        }
        let stats = occupancy(&rows, &m, &events, 0.025);
        prop_assert!(stats.fraction.iter().sum::<f64>() <= 1.0 + 1e-12);
        prop_assert_eq!(stats.edges.values().sum::<usize>(), stats.crossings);
    }
}
