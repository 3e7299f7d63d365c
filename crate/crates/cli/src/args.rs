use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use passage_prm_core::bench::Clock;
use passage_prm_core::{HybridRatio, SamplerKind, WorldPoint};

#[derive(Debug, Parser)]
#[command(name = "passage-prm", version, about = "Narrow-passage identification and PRM planning on occupancy grids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the passage value matrix of a map.
    Identify(IdentifyArgs),
    /// Plan one path with a chosen sampler.
    Plan(PlanArgs),
    /// Run a benchmark protocol and write CSV files.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Generate a random office map.
    Genmap(GenmapArgs),
}

#[derive(Debug, Args)]
pub struct MapArgs {
    /// Map image (binary or ASCII PGM).
    pub map: PathBuf,
    /// Meters per cell.
    #[arg(long, default_value_t = passage_prm_core::gridmap::DEFAULT_RESOLUTION)]
    pub resolution: f64,
    /// Gray levels at or below this value are occupied.
    #[arg(long, default_value_t = passage_prm_core::gridmap::DEFAULT_OCCUPIED_THRESHOLD)]
    pub threshold: u8,
}

#[derive(Debug, Args)]
pub struct IdentifyArgs {
    #[command(flatten)]
    pub map: MapArgs,
    /// Widest passage as a fraction of the map's short side.
    #[arg(long, value_name = "FRACTION")]
    pub max_dist: Option<f64>,
    /// Passage value matrix text file.
    #[arg(long, default_value = "pvm.txt")]
    pub out: PathBuf,
    /// Grayscale rendering of the matrix.
    #[arg(long)]
    pub heatmap: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[command(flatten)]
    pub map: MapArgs,
    #[arg(long, default_value = "mbpi", value_parser = parse_kind)]
    pub sampler: SamplerKind,
    /// Start in world meters, `x,y`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub start: WorldPoint,
    /// Goal in world meters, `x,y`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub goal: WorldPoint,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Uniform-to-narrow draw ratio for mbpi, `u:n`.
    #[arg(long, value_parser = parse_ratio)]
    pub ratio: Option<HybridRatio>,
    #[arg(long, value_name = "FRACTION")]
    pub max_dist: Option<f64>,
    #[arg(long, value_parser = parse_clock)]
    pub clock: Option<Clock>,
    /// Directory for `path.txt` and `roadmap.txt`.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum BenchCommand {
    /// Repeated trials on fixed maps.
    Specific(SpecificArgs),
    /// One trial per sampler on freshly generated office maps.
    Random(RandomArgs),
    /// MBPI trials across uniform-to-narrow ratios.
    RatioSweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct CommonBench {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_parser = parse_clock)]
    pub clock: Option<Clock>,
    /// Worker threads (capped by PASSAGE_PRM_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "bench-out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MapSelection {
    /// Built-in fixture ids, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "map_dir")]
    pub maps: Option<Vec<String>>,
    /// Directory holding a `manifest.toml` and its PGM files.
    #[arg(long)]
    pub map_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpecificArgs {
    #[command(flatten)]
    pub selection: MapSelection,
    #[arg(long, value_delimiter = ',', value_parser = parse_kind)]
    pub samplers: Option<Vec<SamplerKind>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[command(flatten)]
    pub common: CommonBench,
}

#[derive(Debug, Args)]
pub struct RandomArgs {
    /// Number of maps.
    #[arg(long)]
    pub maps: Option<usize>,
    /// Map size in cells, `WxH`.
    #[arg(long, value_parser = parse_size)]
    pub size: Option<(usize, usize)>,
    /// Minimum start-goal distance in meters.
    #[arg(long)]
    pub min_dist: Option<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_kind)]
    pub samplers: Option<Vec<SamplerKind>>,
    #[command(flatten)]
    pub common: CommonBench,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub selection: MapSelection,
    #[arg(long, value_delimiter = ',', value_parser = parse_ratio)]
    pub ratios: Option<Vec<HybridRatio>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[command(flatten)]
    pub common: CommonBench,
}

#[derive(Debug, Args)]
pub struct GenmapArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Size in cells, `WxH`.
    #[arg(long, default_value = "300x300", value_parser = parse_size)]
    pub size: (usize, usize),
    #[arg(long, default_value_t = 8)]
    pub walls: usize,
    /// Door width in cells.
    #[arg(long, default_value_t = 8)]
    pub door: usize,
    /// Wall thickness in cells.
    #[arg(long, default_value_t = 3)]
    pub thickness: usize,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_kind(s: &str) -> Result<SamplerKind, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_ratio(s: &str) -> Result<HybridRatio, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_clock(s: &str) -> Result<Clock, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn parse_point(s: &str) -> Result<WorldPoint, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let x: f64 = x.trim().parse().map_err(|_| format!("bad x in {s:?}"))?;
    let y: f64 = y.trim().parse().map_err(|_| format!("bad y in {s:?}"))?;
    if !(x.is_finite() && y.is_finite()) {
        return Err(format!("non-finite point {s:?}"));
    }
    Ok(WorldPoint::new(x, y))
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WxH")?;
    let w = w.trim().parse().map_err(|_| format!("bad width in {s:?}"))?;
    let h = h.trim().parse().map_err(|_| format!("bad height in {s:?}"))?;
    Ok((w, h))
}
