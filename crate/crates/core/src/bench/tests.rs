use super::*;
use crate::fixtures;

fn ops() -> BenchConfig {
    BenchConfig { clock: Clock::Ops, ..BenchConfig::default() }
}

fn small_random(maps: usize) -> RandomMapSpec {
    RandomMapSpec {
        maps,
        width: 120,
        height: 100,
        office: OfficeParams { walls: 4, ..OfficeParams::default() },
        min_start_goal_dist: 3.0,
    }
}

fn csv_bytes(records: &[TrialRecord]) -> Vec<u8> {
    let mut out = Vec::new();
    write_records_csv(&mut out, records).unwrap();
    out
}

#[test]
fn one_trial_one_record() {
    let maps = vec![fixtures::build("two_doors").unwrap()];
    let recs = run_specific(&maps, &[SamplerKind::Uniform], 1, 7, &ops()).unwrap();
    assert_eq!(recs.len(), 1);
    let r = &recs[0];
    assert_eq!((r.map_id.as_str(), r.sampler, r.seed), ("two_doors", SamplerKind::Uniform, 7));
    assert_eq!(r.identification_time, 0.0);
    assert_eq!(r.success, r.path_length.is_finite());
    assert!(r.planning_time >= 0.0);
}

#[test]
fn records_are_ordered_and_reproducible() {
    let maps = vec![fixtures::build("two_doors").unwrap(), fixtures::build("c_shape").unwrap()];
    let kinds = [SamplerKind::Mbpi, SamplerKind::Gaussian];
    let mut one = ops();
    one.threads = Some(1);
    let mut four = ops();
    four.threads = Some(4);
    let a = run_specific(&maps, &kinds, 3, 100, &one).unwrap();
    let b = run_specific(&maps, &kinds, 3, 100, &four).unwrap();
    assert_eq!(a, b);
    assert_eq!(csv_bytes(&a), csv_bytes(&b));
    let keys: Vec<(String, SamplerKind, u64)> = a.iter().map(|r| (r.map_id.clone(), r.sampler, r.seed)).collect();
    let mut want = Vec::new();
    for m in ["two_doors", "c_shape"] {
        for k in kinds {
            for s in 100..103 {
                want.push((m.to_string(), k, s));
            }
        }
    }
    assert_eq!(keys, want);
}

#[test]
fn identification_is_charged_once_per_map() {
    let maps = vec![fixtures::build("two_doors").unwrap()];
    let recs = run_specific(&maps, &[SamplerKind::Mbpi, SamplerKind::Uniform], 4, 0, &ops()).unwrap();
    let mbpi: Vec<f64> =
        recs.iter().filter(|r| r.sampler == SamplerKind::Mbpi).map(|r| r.identification_time).collect();
    assert_eq!(mbpi.len(), 4);
    assert!(mbpi[0] > 0.0);
    assert!(mbpi.iter().all(|&t| t == mbpi[0]));
    assert!(recs.iter().filter(|r| r.sampler == SamplerKind::Uniform).all(|r| r.identification_time == 0.0));
}

#[test]
fn wall_clock_times_are_positive() {
    let maps = vec![fixtures::build("two_doors").unwrap()];
    let recs = run_specific(&maps, &[SamplerKind::Mbpi], 2, 0, &BenchConfig::default()).unwrap();
    assert!(recs.iter().all(|r| r.planning_time > 0.0 && r.identification_time > 0.0));
}

#[test]
fn random_monte_carlo_shape() {
    let spec = small_random(2);
    let kinds = [SamplerKind::Mbpi, SamplerKind::Uniform, SamplerKind::BridgeTest];
    let recs = run_random_monte_carlo(&spec, &kinds, 40, &ops()).unwrap();
    assert_eq!(recs.len(), 2 * kinds.len());
    for (i, r) in recs.iter().enumerate() {
        assert_eq!(r.seed, 40 + (i / kinds.len()) as u64);
        assert_eq!(r.sampler, kinds[i % kinds.len()]);
        assert_eq!(r.map_id, format!("office-{}", r.seed));
        assert!(r.start.distance(r.goal) >= spec.min_start_goal_dist);
        assert_eq!(r.success, r.path_length.is_finite());
    }
    assert_eq!(recs, run_random_monte_carlo(&spec, &kinds, 40, &ops()).unwrap());
}

#[test]
fn start_goal_respects_distance_and_fails_cleanly() {
    let grid = OccupancyGrid::free(50, 40, 0.1).unwrap();
    let mut rng = RngStream::new(3);
    for _ in 0..200 {
        let (a, b) = draw_start_goal(&grid, 3.0, &mut rng).unwrap();
        assert!(a.distance(b) >= 3.0);
        assert!(grid.is_free_point(a) && grid.is_free_point(b));
    }
    assert!(draw_start_goal(&grid, 100.0, &mut rng).is_err());
}

#[test]
fn sweep_covers_every_map_and_ratio() {
    let maps = vec![fixtures::build("two_doors").unwrap(), fixtures::build("c_shape").unwrap()];
    let ratios = [HybridRatio::new(3, 1).unwrap(), HybridRatio::ONE_TO_ONE, HybridRatio::new(1, 3).unwrap()];
    let recs = ratio_sweep(&maps, &ratios, 2, 0, &ops()).unwrap();
    assert_eq!(recs.len(), 2 * 3 * 2);
    assert!(recs.iter().all(|r| r.sampler == SamplerKind::Mbpi && r.ratio.is_some()));
    assert_eq!(recs[0].label(), "mbpi[3:1]");
    let table = ratio_table(&recs);
    assert_eq!(table.len(), maps.len() * ratios.len());
    let mut out = Vec::new();
    write_ratio_table_csv(&mut out, &table).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], "map_id,3:1 mean,3:1 std,1:1 mean,1:1 std,1:3 mean,1:3 std");
}

#[test]
fn uniform_only_ratio_matches_uniform_sampler() {
    let grid = OccupancyGrid::from_ascii(
        &["..........", "..##......", "..##...#..", "......##..", "..........", "#........."],
        1.0,
    )
    .unwrap();
    let pvm = crate::passage::identify_passages(&grid, &MatcherConfig::new(1.0).unwrap());
    let dist = Arc::new(crate::sampler::build_distribution(&pvm, &grid).unwrap());
    assert!(!dist.is_uniform_fallback());
    let params = SamplerParams { ratio: HybridRatio::new(1, 0).unwrap(), ..SamplerParams::default() };
    let mut s = Sampler::new(SamplerKind::Mbpi, &params, &grid, Some(dist)).unwrap();
    let mut rng = RngStream::new(1);
    let n = 200_000;
    let mut counts = vec![0usize; grid.len()];
    for _ in 0..n {
        let p = s.draw(&grid, &mut rng).unwrap().unwrap();
        counts[grid.index(grid.locate(p).unwrap())] += 1;
    }
    let free = grid.free_count() as f64;
    let tv: f64 = (0..grid.len())
        .map(|i| {
            let want = if grid.is_free(grid.coord(i)) { 1.0 / free } else { 0.0 };
            (counts[i] as f64 / n as f64 - want).abs()
        })
        .sum::<f64>()
        / 2.0;
    assert!(tv < 0.02, "tv {tv}");
}

#[test]
fn combined_time_examples() {
    assert!((combined_time(0.0022, 5, 0.0055) - 0.0033).abs() < 1e-12);
    for x in [0.0, 1e-9, 0.0022, 0.3, 17.125] {
        for n in [1, 5, 7, 1000] {
            assert_eq!(combined_time(x, n, 0.0), x);
        }
    }
    let (tp, ti) = (0.004, 0.3);
    let n = (100.0 * ti / (0.01 * tp)) as u32;
    assert!((combined_time(tp, n, ti) - tp).abs() <= 0.01 * tp);
    assert!(combined_time(tp, 1, ti) > combined_time(tp, 2, ti));
}

#[test]
fn records_csv_layout() {
    let r = TrialRecord {
        map_id: "a,\"b\"".into(),
        sampler: SamplerKind::BridgeTest,
        ratio: None,
        seed: 3,
        planning_time: 0.25,
        identification_time: 0.0,
        milestone_count: 12,
        path_length: f64::INFINITY,
        success: false,
        start: WorldPoint::new(0.0, 0.0),
        goal: WorldPoint::new(1.0, 1.0),
    };
    let text = String::from_utf8(csv_bytes(&[r])).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "map_id,sampler,seed,planning_time_s,identification_time_s,milestones,path_length_m,success");
    assert_eq!(lines[1], "\"a,\"\"b\"\"\",bridge,3,0.25,0.0,12,inf,false");
    let empty = String::from_utf8(csv_bytes(&[])).unwrap();
    assert_eq!(empty.lines().count(), 1);
}

#[test]
fn summary_and_boxplot_files() {
    let maps = vec![fixtures::build("two_doors").unwrap()];
    let recs = run_specific(&maps, &[SamplerKind::Uniform, SamplerKind::Mbpi], 5, 0, &ops()).unwrap();
    let summary = summarize(&recs);
    assert_eq!(summary.len(), 2);
    assert_eq!(summary[0].sampler, "mbpi");
    assert_eq!(summary[1].trials, 5);
    let mut reversed = recs.clone();
    reversed.reverse();
    assert_eq!(summarize(&reversed), summary);

    let mut out = Vec::new();
    write_summary_csv(&mut out, &summary).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.starts_with("map_id,sampler,trials,successes,metric,n,mean,std_dev,min,q1,median,q3,max\n"));
    let rows = text.lines().count() - 1;
    assert_eq!(rows, summary.iter().map(|s| s.metrics().len()).sum::<usize>());

    let mut out = Vec::new();
    write_boxplot_csv(&mut out, &summary).unwrap();
    let text = String::from_utf8(out).unwrap();
    assert!(text.lines().next().unwrap().ends_with("lower_whisker,upper_whisker,outliers"));
    assert_eq!(text.lines().count() - 1, rows);
}

#[test]
fn failed_trials_are_excluded_from_path_length() {
    let grid = OccupancyGrid::from_ascii(&["....#....", "....#....", "....#...."], 0.5).unwrap();
    let map = MapSpec {
        id: "sealed".into(),
        start: grid.cell_to_world(crate::gridmap::CellCoord::new(1, 1)),
        goal: grid.cell_to_world(crate::gridmap::CellCoord::new(1, 7)),
        grid,
    };
    let mut cfg = ops();
    cfg.prm.max_milestones = 40;
    let recs = run_specific(&[map], &[SamplerKind::Uniform], 3, 0, &cfg).unwrap();
    assert!(recs.iter().all(|r| !r.success && r.milestone_count == 42));
    let s = summarize(&recs);
    assert_eq!(s[0].successes, 0);
    assert!(s[0].path_length.is_none());
}

#[test]
fn config_rejects_unknown_keys_and_zero_threads() {
    assert!(toml::from_str::<BenchConfig>("clock = \"ops\"\n[prm]\nk_neighbors = 5\n").is_ok());
    assert!(toml::from_str::<BenchConfig>("clocks = \"ops\"\n").is_err());
    assert!(toml::from_str::<RandomMapSpec>("maps = 3\n[office]\nwalls = 2\nwall_thickness = 3\nmin_door_width = 8\n")
        .is_ok());
    let cfg = BenchConfig { threads: Some(0), ..BenchConfig::default() };
    assert!(cfg.validate().is_err());
    assert_eq!("ops".parse::<Clock>().unwrap(), Clock::Ops);
    assert!("cpu".parse::<Clock>().is_err());
}
