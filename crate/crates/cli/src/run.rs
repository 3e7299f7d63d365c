use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use passage_prm_core::bench::{self, summarize, BenchError, Clock, TrialRecord, OPS_SECONDS, TABLE_RATIOS};
use passage_prm_core::fixtures::{self, MapSpec};
use passage_prm_core::gridmap::{generate_office_map, load_pgm, save_pgm, OfficeParams};
use passage_prm_core::passage::identify_passages_report;
use passage_prm_core::prm::{export_roadmap, PrmError};
use passage_prm_core::sampler::build_distribution_with;
use passage_prm_core::{build_roadmap, OccupancyGrid, RngStream, Sampler, SamplerKind};
use thiserror::Error;

use crate::args::{BenchCommand, Command, CommonBench, GenmapArgs, IdentifyArgs, MapArgs, MapSelection, PlanArgs};
use crate::config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("no path: {0}")]
    NoPath(String),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::NoPath(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Io(source) => CliError::Io { path: PathBuf::new(), source },
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Identify(a) => identify(a),
        Command::Plan(a) => plan(a),
        Command::Bench(b) => match b {
            BenchCommand::Specific(a) => {
                let cfg = load(&a.common)?;
                let maps = select_maps(&a.selection)?;
                let samplers = a.samplers.or(cfg.samplers.clone()).unwrap_or(SamplerKind::BENCHMARKED.to_vec());
                let trials = a.trials.unwrap_or(cfg.trials);
                let records = bench::run_specific(&maps, &samplers, trials, a.common.seed, &cfg.bench())?;
                write_bench(&a.common.out, &records)
            }
            BenchCommand::Random(a) => {
                let cfg = load(&a.common)?;
                let mut spec = cfg.random.clone();
                if let Some(n) = a.maps {
                    spec.maps = n;
                }
                if let Some((w, h)) = a.size {
                    spec.width = w;
                    spec.height = h;
                }
                if let Some(d) = a.min_dist {
                    spec.min_start_goal_dist = d;
                }
                let samplers = a.samplers.or(cfg.samplers.clone()).unwrap_or(SamplerKind::BENCHMARKED.to_vec());
                let records = bench::run_random_monte_carlo(&spec, &samplers, a.common.seed, &cfg.bench())?;
                write_bench(&a.common.out, &records)
            }
            BenchCommand::RatioSweep(a) => {
                let cfg = load(&a.common)?;
                let maps = select_maps(&a.selection)?;
                let ratios = a.ratios.or(cfg.ratios.clone()).unwrap_or(TABLE_RATIOS.to_vec());
                let trials = a.trials.unwrap_or(cfg.trials);
                let records = bench::ratio_sweep(&maps, &ratios, trials, a.common.seed, &cfg.bench())?;
                write_bench(&a.common.out, &records)?;
                let table = bench::ratio_table(&records);
                write_csv(&a.common.out.join("ratio_table.csv"), |w| bench::write_ratio_table_csv(w, &table))
            }
        },
        Command::Genmap(a) => genmap(a),
    }
}

fn load(common: &CommonBench) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(common.config.as_deref())?;
    if let Some(c) = common.clock {
        cfg.clock = c;
    }
    if common.threads.is_some() {
        cfg.threads = common.threads;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn read_map(m: &MapArgs) -> Result<OccupancyGrid, CliError> {
    let bytes = fs::read(&m.map).map_err(|e| CliError::io(&m.map, e))?;
    let grid = load_pgm(&bytes, m.threshold).map_err(|e| CliError::Usage(format!("{}: {e}", m.map.display())))?;
    grid.with_resolution(m.resolution).map_err(|e| CliError::Usage(e.to_string()))
}

fn select_maps(sel: &MapSelection) -> Result<Vec<MapSpec>, CliError> {
    if let Some(dir) = &sel.map_dir {
        return fixtures::load_manifest_dir(dir).map_err(|e| match e {
            fixtures::FixtureError::Io { path, source } => CliError::Io { path, source },
            other => CliError::Usage(other.to_string()),
        });
    }
    let ids: Vec<String> = match &sel.maps {
        Some(ids) => ids.clone(),
        None => fixtures::SPECIFIC.iter().map(|s| s.to_string()).collect(),
    };
    ids.iter().map(|id| fixtures::build(id).map_err(|e| CliError::Usage(e.to_string()))).collect()
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn write_csv(path: &Path, f: impl FnOnce(&mut Vec<u8>) -> Result<(), BenchError>) -> Result<(), CliError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    write_file(path, &buf)
}

fn write_bench(out: &Path, records: &[TrialRecord]) -> Result<(), CliError> {
    create_dir(out)?;
    write_csv(&out.join("records.csv"), |w| bench::write_records_csv(w, records))?;
    let summary = summarize(records);
    write_csv(&out.join("summary.csv"), |w| bench::write_summary_csv(w, &summary))?;
    write_csv(&out.join("boxplot.csv"), |w| bench::write_boxplot_csv(w, &summary))?;
    let failed = records.iter().filter(|r| !r.success).count();
    println!("trials {} failed_plans {failed} out {}", records.len(), out.display());
    Ok(())
}

fn identify(a: IdentifyArgs) -> Result<(), CliError> {
    let cfg = RunConfig::load(a.config.as_deref())?.with_max_dist(a.max_dist);
    cfg.validate()?;
    let grid = read_map(&a.map)?;
    let clock = Instant::now();
    let report = identify_passages_report(&grid, &cfg.matcher);
    let elapsed = clock.elapsed().as_secs_f64();
    write_file(&a.out, report.matrix.to_text().as_bytes())?;
    if let Some(h) = &a.heatmap {
        write_file(h, &report.matrix.heatmap_pgm())?;
    }
    println!(
        "identification_time_s {elapsed} components {} foreign_matches {} self_matches {} valid_lines {}",
        report.obstacle_components, report.foreign_matches, report.self_matches, report.collision.valid
    );
    Ok(())
}

fn plan(a: PlanArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig::load(a.config.as_deref())?.with_max_dist(a.max_dist);
    if let Some(r) = a.ratio {
        cfg.sampler.ratio = r;
    }
    if let Some(c) = a.clock {
        cfg.clock = c;
    }
    cfg.validate()?;
    let grid = read_map(&a.map)?;

    let dist = if a.sampler.needs_passages() {
        let clock = Instant::now();
        let report = identify_passages_report(&grid, &cfg.matcher);
        let dist = build_distribution_with(&report.matrix, &grid, cfg.sampler.weights)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let t = match cfg.clock {
            Clock::Wall => clock.elapsed().as_secs_f64(),
            Clock::Ops => (report.work_units() + grid.len() as u64) as f64 * OPS_SECONDS,
        };
        println!("identification_time_s {t}");
        Some(Arc::new(dist))
    } else {
        None
    };
    let mut sampler = Sampler::new(a.sampler, &cfg.sampler, &grid, dist).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut rng = RngStream::named(a.seed, &format!("plan/{}", a.sampler));
    let (roadmap, result) = match build_roadmap(&grid, &mut sampler, &cfg.prm, a.start, a.goal, &mut rng) {
        Ok(r) => r,
        Err(e @ (PrmError::StartBlocked(_) | PrmError::GoalBlocked(_))) => return Err(CliError::NoPath(e.to_string())),
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    let planning_time = match cfg.clock {
        Clock::Wall => result.planning_time,
        Clock::Ops => result.work.total() as f64 * OPS_SECONDS,
    };

    create_dir(&a.out)?;
    let mut path_text = String::new();
    for p in &result.path {
        path_text.push_str(&format!("{} {}\n", p.x, p.y));
    }
    write_file(&a.out.join("path.txt"), path_text.as_bytes())?;
    write_file(&a.out.join("roadmap.txt"), export_roadmap(&roadmap, &result.path_ids).as_bytes())?;
    println!(
        "planning_time_s {planning_time} milestones {} path_length_m {}",
        result.milestone_count, result.path_length
    );
    if result.success() {
        Ok(())
    } else {
        Err(CliError::NoPath(format!("start and goal still disconnected after {} milestones", result.milestone_count)))
    }
}

fn genmap(a: GenmapArgs) -> Result<(), CliError> {
    let params =
        OfficeParams { walls: a.walls, wall_thickness: a.thickness, min_door_width: a.door, ..OfficeParams::default() };
    let grid = generate_office_map(a.seed, a.size.0, a.size.1, &params).map_err(|e| CliError::Usage(e.to_string()))?;
    write_file(&a.out, &save_pgm(&grid))?;
    println!("wrote {} ({}x{}, {} free cells)", a.out.display(), grid.width(), grid.height(), grid.free_count());
    Ok(())
}
