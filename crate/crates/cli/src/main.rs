use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use landscape_idos::curve::CurveKind;
use landscape_idos::ensemble::{ensemble_curve, EnsembleCurve};
use landscape_idos::fitting::{fit_constants, universal_ratio};
use landscape_idos::io::config::WORKERS_ENV;
use landscape_idos::io::pipeline::{self, with_workers};
use landscape_idos::io::{emit_svg_loglog, tables, ConfigDraft, Origin, RunConfig};
use landscape_idos::scaling::{scaling_analysis, ScalingTransform};
use landscape_idos::{solve_landscape, Error, LatticeModel, Result};

/// Integrated density of states of Anderson models versus the landscape law.
#[derive(Parser)]
#[command(name = "landscape-idos", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: ensemble, constants, scaling, ratio, charts, manifest.
    Run(Common),
    /// Ensemble-averaged N(E) only, written to idos.csv.
    Idos(Common),
    /// Ensemble-averaged N_u(E) only, written to nu.csv.
    Nu(Common),
    /// Potential, landscape and effective potential of one realization.
    Landscape {
        #[command(flatten)]
        common: Common,
        /// Realization index; the seed is base_seed + index.
        #[arg(long, default_value_t = 0)]
        realization: u64,
    },
    /// Fit C4, C5, C5_fit and C6 from stored curves.
    Fit(PostProcess),
    /// Scaling-form fit from stored curves.
    Scaling(PostProcess),
    /// Universal ratio from stored curves.
    Ratio(PostProcess),
}

#[derive(Args)]
struct PostProcess {
    #[command(flatten)]
    common: Common,
    /// curves.csv to read; defaults to curves.csv in the output directory,
    /// or idos.csv and nu.csv there when it is absent.
    #[arg(long)]
    curves: Option<PathBuf>,
    #[arg(long, conflicts_with = "curves", requires = "nu")]
    idos: Option<PathBuf>,
    #[arg(long, conflicts_with = "curves", requires = "idos")]
    nu: Option<PathBuf>,
}

/// Every config key is also a flag; flags override the environment, which
/// overrides the config file.
#[derive(Args)]
struct Common {
    /// key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Suppress progress output.
    #[arg(long)]
    quiet: bool,
    #[arg(long)]
    dimension: Option<String>,
    #[arg(long)]
    side: Option<String>,
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    vmax: Option<String>,
    #[arg(long)]
    realizations: Option<String>,
    #[arg(long)]
    base_seed: Option<String>,
    #[arg(long)]
    grid_lo: Option<String>,
    #[arg(long)]
    grid_hi: Option<String>,
    #[arg(long)]
    grid_points: Option<String>,
    #[arg(long)]
    grid_spacing: Option<String>,
    #[arg(long)]
    window_min: Option<String>,
    #[arg(long)]
    window_max: Option<String>,
    #[arg(long)]
    c6_lo: Option<String>,
    #[arg(long)]
    c6_hi: Option<String>,
    #[arg(long)]
    c6_steps: Option<String>,
    #[arg(long)]
    split_groups: Option<String>,
    #[arg(long)]
    cube_rule: Option<String>,
    #[arg(long)]
    landscape_tol: Option<String>,
    #[arg(long)]
    output_dir: Option<String>,
    #[arg(long)]
    dense_oracle: Option<String>,
    #[arg(long)]
    workers: Option<String>,
}

impl Common {
    fn flags(&self) -> [(&'static str, &Option<String>); 21] {
        [
            ("dimension", &self.dimension),
            ("side", &self.side),
            ("kind", &self.kind),
            ("vmax", &self.vmax),
            ("realizations", &self.realizations),
            ("base_seed", &self.base_seed),
            ("grid_lo", &self.grid_lo),
            ("grid_hi", &self.grid_hi),
            ("grid_points", &self.grid_points),
            ("grid_spacing", &self.grid_spacing),
            ("window_min", &self.window_min),
            ("window_max", &self.window_max),
            ("c6_lo", &self.c6_lo),
            ("c6_hi", &self.c6_hi),
            ("c6_steps", &self.c6_steps),
            ("split_groups", &self.split_groups),
            ("cube_rule", &self.cube_rule),
            ("landscape_tol", &self.landscape_tol),
            ("output_dir", &self.output_dir),
            ("dense_oracle", &self.dense_oracle),
            ("workers", &self.workers),
        ]
    }

    fn resolve(&self) -> Result<RunConfig> {
        let mut draft = match &self.config {
            Some(path) => ConfigDraft::parse(&std::fs::read_to_string(path)?)?,
            None => ConfigDraft::default(),
        };
        if let Ok(workers) = std::env::var(WORKERS_ENV) {
            draft.set("workers", &workers, Origin::Env(WORKERS_ENV.into()))?;
        }
        for (key, value) in self.flags() {
            if let Some(v) = value {
                draft.set(key, v, Origin::Flag(key.replace('_', "-")))?;
            }
        }
        draft.finish()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_io() {
        3
    } else if e.is_numerical() {
        2
    } else {
        1
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run(common) => {
            let config = common.resolve()?;
            let out = pipeline::run_pipeline(&config, !common.quiet)?;
            let names = landscape_idos::fitting::ConstantsReport::names();
            for ((name, value), inv) in names
                .iter()
                .zip(out.constants.values())
                .zip(out.constants.reciprocals())
            {
                println!("{name} = {value} (1/{name} = {inv})");
            }
            println!(
                "sandwich holds: {}",
                out.sandwich.holds(1.0 + landscape_idos::fitting::BOUND_SLACK)
            );
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            Ok(())
        }
        Command::Idos(common) => single_curve(&common, CurveKind::Idos, "idos.csv"),
        Command::Nu(common) => single_curve(&common, CurveKind::LandscapeLaw, "nu.csv"),
        Command::Landscape { common, realization } => {
            let config = common.resolve()?;
            std::fs::create_dir_all(&config.output_dir)?;
            let seed = config.base_seed.wrapping_add(realization);
            let model = LatticeModel::sample(config.lattice(), &config.distribution(), seed);
            let land = with_workers(config.workers, || solve_landscape(&model, config.landscape_tol))??;
            let path = config.output_dir.join("landscape.csv");
            tables::write_landscape(&path, &model, &land)?;
            println!("min W = {}, max W = {}", land.min_w(), land.max_w());
            println!("wrote {}", path.display());
            Ok(())
        }
        Command::Fit(post) => {
            let config = post.common.resolve()?;
            let (n, nu) = post.load(&config)?;
            let report = fit_constants(&n, &nu, &config.window, &config.c6_scan)?;
            write_output(&config, pipeline::CONSTANTS_CSV, |p| {
                tables::write_constants(p, &report)
            })
        }
        Command::Scaling(post) => {
            let config = post.common.resolve()?;
            let (n, nu) = post.load(&config)?;
            let report = scaling_analysis(
                &n,
                &nu,
                ScalingTransform::new(config.kind, config.dimension),
                config.window.e_min,
            )?;
            println!("1/c5_eff = {}, 1/c6_eff = {}", 1.0 / report.c5_eff, 1.0 / report.c6_eff);
            write_output(&config, pipeline::SCALING_CSV, |p| tables::write_scaling(p, &report))
        }
        Command::Ratio(post) => {
            let config = post.common.resolve()?;
            let (n, nu) = post.load(&config)?;
            let ratio = universal_ratio(&n, &nu, config.dimension)?;
            write_output(&config, pipeline::RATIO_CSV, |p| tables::write_ratio(p, &ratio))?;
            if !ratio.is_empty() {
                let path = config.output_dir.join(pipeline::RATIO_SVG);
                emit_svg_loglog(&[&ratio], &["N_u(E/(1+d/4)) / N(E)"], "universal ratio", &path)?;
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn single_curve(common: &Common, kind: CurveKind, file: &str) -> Result<()> {
    let config = common.resolve()?;
    std::fs::create_dir_all(&config.output_dir)?;
    let options = config.ensemble_options(!common.quiet);
    let curve = with_workers(config.workers, || {
        ensemble_curve(
            config.lattice(),
            &config.distribution(),
            &config.energy_grid(),
            config.realizations,
            config.base_seed,
            kind,
            &options,
        )
    })??;
    write_output(&config, file, |p| tables::write_single_curve(p, &curve))
}

fn write_output(config: &RunConfig, file: &str, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    std::fs::create_dir_all(&config.output_dir)?;
    let path = config.output_dir.join(file);
    write(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}

impl PostProcess {
    fn load(&self, config: &RunConfig) -> Result<(EnsembleCurve, EnsembleCurve)> {
        if let (Some(idos), Some(nu)) = (&self.idos, &self.nu) {
            return load_pair(idos, nu);
        }
        let curves = self
            .curves
            .clone()
            .unwrap_or_else(|| config.output_dir.join(pipeline::CURVES_CSV));
        if self.curves.is_none() && !curves.exists() {
            return load_pair(&config.output_dir.join("idos.csv"), &config.output_dir.join("nu.csv"));
        }
        let table = tables::read_curves(&curves)?;
        Ok((table.idos, table.landscape_law))
    }
}

fn load_pair(idos: &Path, nu: &Path) -> Result<(EnsembleCurve, EnsembleCurve)> {
    Ok((
        tables::read_single_curve(idos, CurveKind::Idos)?,
        tables::read_single_curve(nu, CurveKind::LandscapeLaw)?,
    ))
}
