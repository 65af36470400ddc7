use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use arclink_cli::ephemeris::{EphemerisSource, StateTable};
use arclink_cli::error::CliError;
use arclink_cli::{default_pairs, ingest, parse_pairs, run_linkage_batch, RunConfig, RunOptions};

#[derive(Parser)]
#[command(
    name = "arclink",
    version,
    about = "Link too-short optical arcs into preliminary orbits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the linkage batch over an observation file.
    Link(LinkArgs),
}

#[derive(Args)]
struct LinkArgs {
    /// Observation CSV: arc_id,station_id,mjd,ra_deg,dec_deg,sigma_ra_arcsec,sigma_dec_arcsec
    #[arg(long)]
    obs: PathBuf,
    /// Observer state CSV: station_id,mjd,x,y,z,vx,vy,vz (config units)
    #[arg(long, conflicts_with = "ephemeris")]
    states: Option<PathBuf>,
    /// Built-in analytic observer model ("builtin-circular")
    #[arg(long)]
    ephemeris: Option<String>,
    /// Run configuration (TOML)
    #[arg(long)]
    config: PathBuf,
    /// Explicit pair list (arc_id_1,arc_id_2 per line); all pairs otherwise
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// Iterate with the J2 secular model
    #[arg(long)]
    j2: bool,
    /// Skip the conic/range-square prescreen
    #[arg(long)]
    no_prefilter: bool,
    /// Emit per-pair curve data for external plotting
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Output JSON report
    #[arg(long)]
    out: PathBuf,
}

fn run(args: &LinkArgs) -> Result<(), CliError> {
    let config_text = std::fs::read_to_string(&args.config)?;
    let config: RunConfig =
        toml::from_str(&config_text).map_err(|e| CliError::Config(e.to_string()))?;

    let source = match (&args.states, args.ephemeris.as_deref()) {
        (Some(path), None) => EphemerisSource::File(StateTable::from_csv(path)?),
        (None, Some("builtin-circular")) => EphemerisSource::BuiltinCircular,
        (None, Some(other)) => {
            return Err(CliError::Config(format!(
                "unknown ephemeris model '{other}' (expected builtin-circular)"
            )))
        }
        (None, None) => {
            return Err(CliError::Config(
                "either --states FILE or --ephemeris builtin-circular is required".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };

    let arcs = ingest(&args.obs, &source, &config)?;
    if arcs.len() < 2 {
        return Err(CliError::NoPairs(format!(
            "{} arc(s) ingested; need at least 2",
            arcs.len()
        )));
    }
    let pairs = match &args.pairs {
        Some(path) => parse_pairs(path, &arcs)?,
        None => default_pairs(arcs.len()),
    };
    if pairs.is_empty() {
        return Err(CliError::NoPairs("empty pair list".into()));
    }

    let options = RunOptions {
        use_j2: args.j2,
        skip_prefilter: args.no_prefilter,
        plot_dir: args.plot.clone(),
    };
    let reports = run_linkage_batch(&arcs, &pairs, &config, &options);

    let file = std::fs::File::create(&args.out)?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), &reports)
        .map_err(|e| CliError::Config(format!("report serialization: {e}")))?;

    let linked = reports
        .iter()
        .filter(|r| r.linkage.as_ref().is_some_and(|l| !l.unlikely_link))
        .count();
    eprintln!(
        "{} pair(s) processed, {} with a likely link; report written to {}",
        reports.len(),
        linked,
        args.out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Link(args) => match run(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code())
            }
        },
    }
}
