#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use vre_atlas::econ::{annuity_factor, lcoe, parse_curve_csv, EconParams};
use vre_atlas::exclusion::apply_scenario_effective;
use vre_atlas::exclusion::Technologies;
use vre_atlas::grid::{
    rasterize_points, read_ascii, read_categorical_ascii, read_legend_csv, read_mask_ascii,
    read_points_csv, resample_nearest, write_ascii, write_categorical_ascii, write_mask_ascii,
};
use vre_atlas::numfmt::sig6;
use vre_atlas::pipeline::{
    self, error_report_json, fixture, geographic_masks, overlap_report, site_tables, Inputs,
    RunConfig,
};
use vre_atlas::plot::render_cost_curve;
use vre_atlas::regions::{
    calibration_fixture, link_records, read_link_keys, read_postcode_lookup, read_region_values,
    validation_compare, write_link_results, write_overlap_csv, write_validation_csv, LaTable,
    OverlapMode, PostcodeLookup, DEFAULT_EXTERNAL_FACTOR,
};
use vre_atlas::solar::{write_roof_csv, write_yield_csv};
use vre_atlas::stats::{
    aggregate_landuse, deviation_regression, fit_planning, format_fit_report, format_ols_report,
    read_planning_csv, read_share_table, Link, ModelSpec, Technology,
};
use vre_atlas::wind::write_sites_csv;
use vre_atlas::{Error, Result};

/// Onshore wind and solar resource assessment on gridded data.
#[derive(Parser, Debug)]
#[command(name = "vre-atlas", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Resample one input layer onto the master grid of a run config.
    Ingest {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = LayerKind::Numeric)]
        kind: LayerKind,
        /// Legend CSV for categorical layers.
        #[arg(long)]
        legend: Option<PathBuf>,
        /// Minimum votes for point layers.
        #[arg(long, default_value_t = 3)]
        min_votes: u32,
        #[arg(long)]
        out: PathBuf,
        /// Vote-count grid for point layers.
        #[arg(long)]
        votes_out: Option<PathBuf>,
    },
    /// Write geographic-potential and per-scenario masks.
    Exclude {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Site table of one technology over its geographic potential.
    Potential {
        #[arg(value_enum)]
        tech: TechArg,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// LCOE for a given specific yield.
    Lcoe {
        #[arg(long, value_enum)]
        tech: TechArg,
        /// Annual energy per installed kW (full-load hours).
        #[arg(long)]
        energy_per_kw: f64,
        /// Override of the investment cost, £/kW.
        #[arg(long)]
        investment: Option<f64>,
        #[arg(long)]
        interest: Option<f64>,
        #[arg(long)]
        lifetime: Option<u32>,
    },
    /// Full run over all configured scenarios.
    Scenario {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Wind/ground-PV overlap per region.
    Overlap {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<OverlapArg>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Regressions on planning records or validation deviations.
    Fit {
        #[command(subcommand)]
        model: FitCommand,
    },
    /// Assign records to local authorities by code or postcode.
    LinkLa {
        #[arg(long)]
        la_table: PathBuf,
        /// CSV with `id` and `la_code` and/or `postcode` columns.
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        lookup: Option<PathBuf>,
        #[arg(long)]
        matched: PathBuf,
        #[arg(long)]
        rejects: PathBuf,
    },
    /// Compare own regional results with scaled external estimates.
    Validate {
        /// `region,value` CSV of own results.
        #[arg(long, required_unless_present = "calibration")]
        own: Option<PathBuf>,
        /// `region,value` CSV of external results.
        #[arg(long, required_unless_present = "calibration")]
        external: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_EXTERNAL_FACTOR)]
        factor: f64,
        /// Use the built-in 24-city calibration data instead of files.
        #[arg(long)]
        calibration: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a cost-curve CSV as SVG.
    Plot {
        curve: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        title: Option<String>,
    },
    /// Generate a synthetic study area with a run config.
    Fixture {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        rows: usize,
        #[arg(long, default_value_t = 160)]
        cols: usize,
        #[arg(long, default_value_t = 1000.0)]
        cell_size: f64,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum FitCommand {
    /// Logit model of planning outcomes.
    Logit(BinaryArgs),
    /// Probit model of planning outcomes.
    Probit(BinaryArgs),
    /// Least squares of deviations on land-use shares.
    Ols {
        /// `region,deviation,<land-use category>...` CSV.
        #[arg(long)]
        table: PathBuf,
        /// Land-use group left out as the base; all groups are kept when absent.
        #[arg(long)]
        base: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args, Debug)]
struct BinaryArgs {
    #[arg(long)]
    records: PathBuf,
    /// `wind` or `pv_ground`.
    #[arg(long, default_value = "wind")]
    tech: String,
    /// Models to fit, 1..4.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4")]
    models: Vec<u8>,
    #[arg(long, default_value_t = 3)]
    min_votes: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum LayerKind {
    Numeric,
    Categorical,
    Mask,
    Points,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TechArg {
    Wind,
    PvGround,
    PvRoof,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum OverlapArg {
    Region,
    Wind,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Err(e) = configure_threads() {
        return report(&e, None);
    }
    let mut report_dir = None;
    match dispatch(cli.command, &mut report_dir) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e, report_dir.as_deref()),
    }
}

/// Caps the worker pool at `VRE_ATLAS_THREADS` when set.
fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("VRE_ATLAS_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::Config(format!("VRE_ATLAS_THREADS=`{v}` is not a positive integer"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("cannot size thread pool: {e}")))
}

/// Prints the error report to stderr and, when an output directory is
/// known, also saves it there as `error_report.json`.
fn report(err: &Error, dir: Option<&Path>) -> ExitCode {
    let json = error_report_json(err);
    eprint!("{json}");
    if let Some(d) = dir {
        if std::fs::create_dir_all(d).is_ok() {
            let _ = std::fs::write(d.join("error_report.json"), &json);
        }
    }
    ExitCode::from(err.exit_code() as u8)
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(cmd: Command, report_dir: &mut Option<PathBuf>) -> Result<()> {
    match cmd {
        Command::Ingest {
            config,
            input,
            kind,
            legend,
            min_votes,
            out,
            votes_out,
        } => {
            let cfg = RunConfig::from_file(&config)?;
            let crs = cfg.grid.crs_label.as_str();
            match kind {
                LayerKind::Numeric => write_ascii(
                    &out,
                    &resample_nearest(&read_ascii(&input, crs)?, &cfg.grid)?,
                ),
                LayerKind::Categorical => {
                    let legend = legend.as_deref().map(read_legend_csv).transpose()?;
                    write_categorical_ascii(
                        &out,
                        &resample_nearest(
                            &read_categorical_ascii(&input, legend, crs)?,
                            &cfg.grid,
                        )?,
                    )
                }
                LayerKind::Mask => write_mask_ascii(
                    &out,
                    &resample_nearest(&read_mask_ascii(&input, crs)?, &cfg.grid)?,
                ),
                LayerKind::Points => {
                    let r = rasterize_points(&read_points_csv(&input)?, &cfg.grid, min_votes)?;
                    if let Some(v) = votes_out {
                        write_ascii(v, &r.votes)?;
                    }
                    write_ascii(&out, &r.value)
                }
            }
        }
        Command::Exclude { config, out_dir } => {
            let cfg = RunConfig::from_file(&config)?;
            *report_dir = Some(out_dir.clone());
            let inputs = Inputs::load(&cfg)?;
            let geo = geographic_masks(&inputs)?;
            std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
            write_mask_ascii(out_dir.join("wind_geo.asc"), &geo.wind)?;
            write_mask_ascii(out_dir.join("pv_ground_geo.asc"), &geo.pv_ground)?;
            for sc in &cfg.scenarios {
                let w = apply_scenario_effective(
                    &geo.wind,
                    &inputs.scenic,
                    &inputs.ag,
                    &sc.wind_filter(),
                )?;
                let p = apply_scenario_effective(
                    &geo.pv_ground,
                    &inputs.scenic,
                    &inputs.ag,
                    &sc.pv_ground_filter(),
                )?;
                write_mask_ascii(out_dir.join(format!("wind_s{}.asc", sc.id)), &w)?;
                write_mask_ascii(out_dir.join(format!("pv_ground_s{}.asc", sc.id)), &p)?;
            }
            Ok(())
        }
        Command::Potential { tech, config, out } => {
            let cfg = RunConfig::from_file(&config)?;
            let inputs = Inputs::load(&cfg)?;
            let geo = geographic_masks(&inputs)?;
            let only = Technologies {
                wind: tech == TechArg::Wind,
                pv_ground: tech == TechArg::PvGround,
                pv_roof: tech == TechArg::PvRoof,
            };
            let sites = site_tables(&inputs, &geo, only)?;
            let (text, kwh) = match tech {
                TechArg::Wind => (write_sites_csv(&sites.wind.sites), sites.wind.total_kwh),
                TechArg::PvGround => (
                    write_yield_csv(&sites.pv_ground.cells),
                    sites.pv_ground.total_kwh,
                ),
                TechArg::PvRoof => (
                    write_roof_csv(&sites.pv_roof.cells),
                    sites.pv_roof.total_kwh,
                ),
            };
            write(&out, &text)?;
            println!("total_TWh = {}", sig6(kwh / 1e9));
            Ok(())
        }
        Command::Lcoe {
            tech,
            energy_per_kw,
            investment,
            interest,
            lifetime,
        } => {
            let mut p = match tech {
                TechArg::Wind => EconParams::wind(),
                TechArg::PvGround => EconParams::ground_pv(),
                TechArg::PvRoof => EconParams::rooftop_pv(),
            };
            if let Some(v) = investment {
                p.investment = v;
            }
            if let Some(v) = interest {
                p.interest = v;
            }
            if let Some(v) = lifetime {
                p.lifetime_years = v;
            }
            let value = lcoe(&p, energy_per_kw)?;
            println!("lcoe_GBP_per_kWh = {}", sig6(value));
            println!(
                "annuity_factor = {}",
                sig6(annuity_factor(p.interest, p.lifetime_years))
            );
            Ok(())
        }
        Command::Scenario { config, out_dir } => {
            let mut cfg = RunConfig::from_file(&config)?;
            if let Some(d) = out_dir {
                cfg.output_dir = d;
            }
            *report_dir = Some(cfg.output_dir.clone());
            let results = pipeline::run(&cfg)?;
            for w in &results.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", results.files["scenario_totals.csv"]);
            Ok(())
        }
        Command::Overlap { config, mode, out } => {
            let cfg = RunConfig::from_file(&config)?;
            let inputs = Inputs::load(&cfg)?;
            let geo = geographic_masks(&inputs)?;
            let mode = match mode {
                Some(OverlapArg::Region) => OverlapMode::RegionArea,
                Some(OverlapArg::Wind) => OverlapMode::WindArea,
                None => cfg.overlap_mode,
            };
            let report = overlap_report(&inputs, &geo, mode)?.ok_or_else(|| {
                Error::Config("overlap needs `regions`, `region_legend` and `la_table`".into())
            })?;
            write(&out, &write_overlap_csv(&report))?;
            for r in &report.selected {
                println!("selected {r}");
            }
            Ok(())
        }
        Command::Fit { model } => fit(model),
        Command::LinkLa {
            la_table,
            records,
            lookup,
            matched,
            rejects,
        } => {
            let table = LaTable::read_csv(&la_table)?;
            let keys = read_link_keys(&records)?;
            let lookup = match lookup {
                Some(p) => read_postcode_lookup(&p)?,
                None => PostcodeLookup::new(),
            };
            let pairs: Vec<_> = keys
                .iter()
                .map(|k| (k.la_code.clone(), k.postcode.clone()))
                .collect();
            let outcomes = link_records(&table, &pairs, &lookup);
            let (m, r) = write_link_results(&keys, &outcomes);
            write(&matched, &m)?;
            write(&rejects, &r)
        }
        Command::Validate {
            own,
            external,
            factor,
            calibration,
            out,
        } => {
            let (own, external) = if calibration {
                calibration_fixture()
            } else {
                let own = own.ok_or_else(|| Error::Config("`--own` is required".into()))?;
                let ext =
                    external.ok_or_else(|| Error::Config("`--external` is required".into()))?;
                (read_region_values(&own)?, read_region_values(&ext)?)
            };
            let report = validation_compare(&own, &external, factor)?;
            for f in &report.flagged {
                eprintln!("warning: region {f} has a zero external value and was left out");
            }
            if let Some(s) = report.summary {
                println!(
                    "n = {}\nmean = {}\nsd = {}\nmin = {}\nmax = {}",
                    s.n,
                    sig6(s.mean),
                    sig6(s.sd),
                    sig6(s.min),
                    sig6(s.max)
                );
            }
            write(&out, &write_validation_csv(&report))
        }
        Command::Plot { curve, out, title } => {
            let text = std::fs::read_to_string(&curve).map_err(|e| Error::io(&curve, e))?;
            let points = parse_curve_csv(&text, &curve)?;
            let title = title.unwrap_or_else(|| {
                curve
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default()
            });
            let plot = render_cost_curve(&points, &title);
            if plot.empty {
                eprintln!(
                    "warning: {} holds no points; writing an empty plot",
                    curve.display()
                );
            }
            write(&out, &plot.svg)
        }
        Command::Fixture {
            seed,
            rows,
            cols,
            cell_size,
            out_dir,
        } => {
            if rows == 0 || cols == 0 || !(cell_size > 0.0) {
                return Err(Error::Config(
                    "fixture needs positive rows, cols and cell size".into(),
                ));
            }
            let fx = fixture::generate(&fixture::FixtureOptions {
                rows,
                cols,
                cell_size,
                seed,
                ..fixture::FixtureOptions::default()
            });
            let cfg = fx.write(&out_dir)?;
            println!("{}", cfg.display());
            Ok(())
        }
    }
}

fn fit(cmd: FitCommand) -> Result<()> {
    let (args, link) = match cmd {
        FitCommand::Logit(a) => (a, Link::Logit),
        FitCommand::Probit(a) => (a, Link::Probit),
        FitCommand::Ols { table, base, out } => {
            let t = read_share_table(&table)?;
            let base = base.map(|b| b.parse()).transpose()?;
            let groups = t
                .shares
                .iter()
                .map(aggregate_landuse)
                .collect::<Result<Vec<_>>>()?;
            let fit = deviation_regression(&t.deviations, &groups, base)?;
            return emit(
                out.as_deref(),
                &format_ols_report("Deviation regression", &fit),
            );
        }
    };
    let tech: Technology = args.tech.parse()?;
    let records = read_planning_csv(&args.records)?;
    let mut fits = Vec::new();
    for m in &args.models {
        let spec = ModelSpec::model(*m)?;
        fits.push((
            format!("({m})"),
            fit_planning(&records, tech, &spec, link, args.min_votes)?,
        ));
    }
    let title = format!(
        "{} regression results for {tech} (odds ratios)",
        link.as_str()
    );
    emit(args.out.as_deref(), &format_fit_report(&title, &fits))
}
