use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::{info, warn};

use shelter_eval::ahp::{derive_weights, WeightMethod};
use shelter_eval::geocoverage::{
    self, capacity_indicators, rasterize_buffers, zonal_coverage, GridSpec, PopulationGrid,
};
use shelter_eval::io::chart::bar_chart;
use shelter_eval::io::config::{CapacityScheme, CoverageParams, RunConfig};
use shelter_eval::io::report::{summary, CapacityReport, CoverageReport, WeightsEntry};
use shelter_eval::io::{self, OutputFormat, Report};
use shelter_eval::model::{reference_hierarchy, CapacityIndicators, Polarity};
use shelter_eval::topsis::{self, DecisionMatrix, DistanceVariant};
use shelter_eval::{suitability, Error, ErrorKind, Execution};

const EXIT_INCONSISTENT: u8 = 6;

#[derive(Parser)]
#[command(name = "shelter", version, about = "Emergency shelter suitability and capacity evaluation")]
struct Cli {
    /// TOML run configuration; the built-in hierarchy is used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output format; overrides the configuration.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Also write an SVG bar chart.
    #[arg(long, global = true)]
    chart: Option<PathBuf>,
    /// Run single-threaded.
    #[arg(long, global = true)]
    sequential: bool,
    /// More logging (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Delimited,
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Linear,
    Squared,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Eigenvector,
    GeometricMean,
}

#[derive(Subcommand)]
enum Command {
    /// Derive weights and consistency from judgment matrices.
    Weights {
        #[arg(required = true)]
        matrices: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "eigenvector")]
        method: Method,
        /// Exit with status 6 when any matrix fails the consistency test.
        #[arg(long)]
        strict: bool,
    },
    /// Score and grade shelters.
    Suitability {
        shelters: PathBuf,
    },
    /// Rank districts by capacity.
    Capacity(CapacityArgs),
    /// Coverage area and effective population of walking buffers.
    Coverage {
        /// CSV with id, x, y.
        points: PathBuf,
        /// Population density raster, persons per hectare.
        #[arg(long)]
        population: Option<PathBuf>,
        /// Integer zone raster aligned with the population raster.
        #[arg(long)]
        zones: Option<PathBuf>,
        /// Write the coverage mask as an ASCII grid.
        #[arg(long)]
        mask: Option<PathBuf>,
        #[command(flatten)]
        buffer: BufferArgs,
    },
    /// Re-render a structured report.
    Report {
        input: PathBuf,
    },
}

#[derive(Args)]
struct CapacityArgs {
    /// Precomputed indicators: district plus the six indicator columns.
    #[arg(long, conflicts_with_all = ["districts", "points", "population", "zones"])]
    indicators: Option<PathBuf>,
    /// District statistics with a zone column.
    #[arg(long, requires_all = ["points", "population", "zones"])]
    districts: Option<PathBuf>,
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long)]
    population: Option<PathBuf>,
    #[arg(long)]
    zones: Option<PathBuf>,
    #[arg(long, value_enum)]
    topsis_variant: Option<Variant>,
    #[command(flatten)]
    buffer: BufferArgs,
}

#[derive(Args)]
struct BufferArgs {
    /// Walking speed, km/h.
    #[arg(long)]
    speed: Option<f64>,
    /// Walking time, minutes.
    #[arg(long)]
    minutes: Option<f64>,
    /// Service radius in meters; overrides speed and minutes.
    #[arg(long)]
    radius: Option<f64>,
    /// Cell size in meters when no raster fixes the grid.
    #[arg(long)]
    cell_size: Option<f64>,
}

impl BufferArgs {
    fn resolve(&self, base: CoverageParams) -> shelter_eval::Result<CoverageParams> {
        let speed_kmh = self.speed.unwrap_or(base.speed_kmh);
        let minutes = self.minutes.unwrap_or(base.minutes);
        let radius_m = match (self.radius, self.speed.is_some() || self.minutes.is_some()) {
            (Some(r), _) => r,
            (None, true) => geocoverage::service_radius_rounded(speed_kmh, minutes)?,
            (None, false) => base.radius_m,
        };
        Ok(CoverageParams {
            speed_kmh,
            minutes,
            radius_m,
            cell_size: self.cell_size.unwrap_or(base.cell_size),
        })
    }
}

struct Outcome {
    report: Report,
    code: u8,
}

fn load_config(cli: &Cli) -> shelter_eval::Result<RunConfig> {
    match &cli.config {
        Some(p) => io::parse_config(p),
        None => Ok(RunConfig {
            hierarchy: reference_hierarchy(),
            matrices: Vec::new(),
            capacity: CapacityScheme::default(),
            coverage: CoverageParams::default(),
            output: OutputFormat::Delimited,
        }),
    }
}

fn topsis_report(
    rows: Vec<(String, CapacityIndicators)>,
    scheme: &CapacityScheme,
    variant: DistanceVariant,
) -> shelter_eval::Result<Outcome> {
    let x = DecisionMatrix::new(
        rows.iter().map(|r| r.0.clone()).collect(),
        CapacityIndicators::NAMES.iter().map(|s| s.to_string()).collect(),
        rows.iter().map(|r| r.1.to_array().to_vec()).collect(),
        scheme.weights.clone(),
        vec![Polarity::Benefit; 6],
    )?;
    let result = topsis::evaluate(&x, variant)?;
    Ok(Outcome {
        report: Report::Capacity(CapacityReport {
            variant,
            weights: scheme.weights.clone(),
            indicators: rows,
            result,
        }),
        code: 0,
    })
}

fn population_grid(path: Option<&Path>, points: &[(String, shelter_eval::model::Point)], p: &CoverageParams) -> shelter_eval::Result<PopulationGrid> {
    match path {
        Some(path) => io::parse_grid(path),
        None => {
            let locs: Vec<_> = points.iter().map(|p| p.1).collect();
            let spec = GridSpec::covering(&locs, p.radius_m, p.cell_size)?;
            info!("no population raster; effective population is reported as 0");
            PopulationGrid::uniform(spec, 0.0)
        }
    }
}

fn run(cli: &Cli) -> shelter_eval::Result<Outcome> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match &cli.command {
        Command::Weights {
            matrices,
            method,
            strict,
        } => {
            let method = match method {
                Method::Eigenvector => WeightMethod::Eigenvector,
                Method::GeometricMean => WeightMethod::GeometricMean,
            };
            let mut entries = Vec::new();
            for path in matrices {
                let m = io::parse_matrix(path)?;
                let result = derive_weights(&m, method)?;
                if !result.consistent {
                    warn!("{}: consistency ratio {:.4} is not below 0.1", path.display(), result.cr);
                }
                entries.push(WeightsEntry {
                    node: path.display().to_string(),
                    labels: (1..=m.order()).map(|i| format!("w{i}")).collect(),
                    result,
                });
            }
            let code = if *strict && entries.iter().any(|e| !e.result.consistent) {
                EXIT_INCONSISTENT
            } else {
                0
            };
            Ok(Outcome {
                report: Report::Weights(entries),
                code,
            })
        }
        Command::Suitability { shelters } => {
            let cfg = load_config(cli)?;
            let records = io::parse_shelters(shelters, &cfg.hierarchy)?;
            let rep = suitability::evaluate(&records, &cfg.hierarchy, exec)?;
            for w in &rep.warnings {
                warn!("{w}");
            }
            Ok(Outcome {
                report: Report::Suitability(rep),
                code: 0,
            })
        }
        Command::Capacity(a) => {
            let cfg = load_config(cli)?;
            let variant = match a.topsis_variant {
                Some(Variant::Linear) => DistanceVariant::Linear,
                Some(Variant::Squared) => DistanceVariant::Squared,
                None => cfg.capacity.variant,
            };
            if let Some(path) = &a.indicators {
                return topsis_report(io::parse_indicators(path)?, &cfg.capacity, variant);
            }
            let (Some(dp), Some(pp), Some(gp), Some(zp)) = (&a.districts, &a.points, &a.population, &a.zones) else {
                return Err(Error::Invalid(
                    "capacity needs --indicators, or --districts with --points, --population and --zones".into(),
                ));
            };
            let params = a.buffer.resolve(cfg.coverage)?;
            let table = io::parse_districts(dp)?;
            for w in &table.warnings {
                warn!("{w}");
            }
            let points: Vec<_> = io::parse_points(pp)?.into_iter().map(|p| p.1).collect();
            let grid = io::parse_grid(gp)?;
            let zones = io::parse_zone_grid(zp)?;
            let mask = rasterize_buffers(&points, params.radius_m, grid.spec, exec)?;
            let stats = zonal_coverage(&mask, &grid, Some(&zones))?;
            let mut rows = Vec::new();
            for d in &table.records {
                let zone = d
                    .zone
                    .ok_or_else(|| Error::Invalid(format!("district {} has no zone id", d.name)))?;
                let z = stats
                    .iter()
                    .find(|s| s.zone == Some(zone))
                    .ok_or_else(|| Error::Invalid(format!("zone {zone} of {} is absent from the raster", d.name)))?;
                if z.nodata_cells > 0 {
                    warn!("{}: {} covered cells without population data", d.name, z.nodata_cells);
                }
                rows.push((d.name.clone(), capacity_indicators(d, z.coverage_ha, z.effective_population)?));
            }
            topsis_report(rows, &cfg.capacity, variant)
        }
        Command::Coverage {
            points,
            population,
            zones,
            mask: mask_out,
            buffer,
        } => {
            let cfg = load_config(cli)?;
            let params = buffer.resolve(cfg.coverage)?;
            let pts = io::parse_points(points)?;
            let grid = population_grid(population.as_deref(), &pts, &params)?;
            let locs: Vec<_> = pts.iter().map(|p| p.1).collect();
            let mask = rasterize_buffers(&locs, params.radius_m, grid.spec, exec)?;
            let total = zonal_coverage(&mask, &grid, None)?.remove(0);
            let by_zone = match zones {
                Some(z) => zonal_coverage(&mask, &grid, Some(&io::parse_zone_grid(z)?))?,
                None => Vec::new(),
            };
            if total.nodata_cells > 0 {
                warn!("{} covered cells without population data counted as empty", total.nodata_cells);
            }
            if let Some(out) = mask_out {
                let v: Vec<Option<f64>> = mask.cells().iter().map(|&c| Some(if c { 1.0 } else { 0.0 })).collect();
                write_file(out, &io::write_ascii_grid(mask.spec(), &v, io::grid::DEFAULT_NODATA))?;
            }
            Ok(Outcome {
                report: Report::Coverage(CoverageReport {
                    radius_m: params.radius_m,
                    cell_size: grid.spec.cell_size,
                    points: pts.len(),
                    clipped_points: mask.clipped_points(),
                    total,
                    zones: by_zone,
                }),
                code: 0,
            })
        }
        Command::Report { input } => {
            let text = std::fs::read_to_string(input).map_err(|source| Error::Io {
                path: input.clone(),
                source,
            })?;
            Ok(Outcome {
                report: io::read_report(&input.display().to_string(), &text)?,
                code: 0,
            })
        }
    }
}

fn write_file(path: &Path, text: &str) -> shelter_eval::Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Io => 1,
        ErrorKind::Parse => 3,
        ErrorKind::Validation => 4,
        ErrorKind::Numeric => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    let result = run(&cli).and_then(|out| {
        let format = match cli.format {
            Some(Format::Delimited) => OutputFormat::Delimited,
            Some(Format::Structured) => OutputFormat::Structured,
            None => match &cli.config {
                Some(_) => load_config(&cli).map(|c| c.output).unwrap_or_default(),
                None => OutputFormat::Delimited,
            },
        };
        let text = io::render(&out.report, format)?;
        match &cli.output {
            Some(p) => write_file(p, &text)?,
            None => print!("{text}"),
        }
        if let Some(p) = &cli.chart {
            write_file(p, &chart_for(&out.report))?;
        }
        info!("{}", summary(&out.report));
        Ok(out.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn chart_for(r: &Report) -> String {
    match r {
        Report::Suitability(s) => bar_chart(
            "Composite suitability",
            &s.results.iter().map(|r| (r.name.clone(), r.composite)).collect::<Vec<_>>(),
            Some(10.0),
        ),
        Report::Capacity(c) => bar_chart(
            "Closeness to the ideal capacity",
            &c.result.ranked().iter().map(|r| (r.name.clone(), r.closeness)).collect::<Vec<_>>(),
            Some(1.0),
        ),
        Report::Weights(e) => bar_chart(
            "Weights",
            &e.iter()
                .flat_map(|e| e.labels.iter().zip(&e.result.weights).map(|(l, w)| (format!("{} {l}", e.node), *w)))
                .collect::<Vec<_>>(),
            None,
        ),
        Report::Coverage(c) => bar_chart(
            "Covered share by zone",
            &c.zones.iter().map(|z| (format!("zone {}", z.zone.unwrap_or_default()), 1.0 - z.blind_share)).collect::<Vec<_>>(),
            Some(1.0),
        ),
    }
}
