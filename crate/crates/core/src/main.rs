use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use trapsim::experiments::{make_pattern, run_scan, synth_fluorescence_image, Backend, PatternSpec, Protocol};
use trapsim::io::{
    image_to_pgm, mask_to_pgm, parse_config, read_file, render_plot, results_csv, traps_csv, write_file, Manifest,
    RunConfig,
};
use trapsim::Result;

#[derive(Parser)]
#[command(name = "trapsim", version, about = "Reconfigurable microlens dipole-trap array simulator")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Write the modulator mask of the addressing pattern as PGM.
    Pattern {
        #[command(flatten)]
        common: Common,
        /// Use the trap-light pattern instead of the coupling-light pattern.
        #[arg(long)]
        trap: bool,
    },
    /// Write per-site power, depth, frequencies and dephasing time as CSV.
    Traps {
        #[command(flatten)]
        common: Common,
    },
    /// Site-selective Ramsey scan.
    Ramsey {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        plot: Plot,
    },
    /// Spin-echo scan with an addressed refocusing pulse.
    Echo {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        plot: Plot,
    },
    /// Addressed pi pulse followed by a global Ramsey scan.
    Texture {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        plot: Plot,
    },
    /// Synthetic fluorescence image of the loaded sites as PGM.
    Image {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides `noise.rng_seed`.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    /// Disable detection sampling and crosstalk leakage.
    #[arg(long)]
    no_noise: bool,
}

#[derive(Args)]
struct Plot {
    /// Also write a small-multiples SVG plot.
    #[arg(long)]
    svg: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Analytic,
    Mc,
}

fn load(common: &Common, protocol: Option<Protocol>) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => parse_config(&read_file(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.noise.rng_seed = seed;
    }
    if let Some(b) = common.backend {
        cfg.experiment.backend = match b {
            BackendArg::Analytic => Backend::Analytic,
            BackendArg::Mc => Backend::MonteCarlo,
        };
    }
    if common.no_noise {
        cfg.noise.enabled = false;
    }
    if let Some(p) = protocol {
        cfg.experiment.protocol = p;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn finish(verb: &str, cfg: &RunConfig, out: &Path, files: Vec<(String, Vec<u8>)>) -> Result<()> {
    let canonical = cfg.to_canonical_json();
    write_file(&out.join("config.json"), canonical.as_bytes())?;
    let names = files.iter().map(|(n, _)| n.clone()).collect();
    for (name, bytes) in &files {
        write_file(&out.join(name), bytes)?;
        println!("wrote {}", out.join(name).display());
    }
    let manifest = Manifest::new(verb, cfg.noise.rng_seed, &canonical, names);
    write_file(&out.join("manifest.json"), manifest.to_json().as_bytes())
}

fn scan(verb: &str, protocol: Protocol, common: &Common, plot: &Plot) -> Result<()> {
    let cfg = load(common, Some(protocol))?;
    let table = run_scan(&cfg.experiment_spec())?;
    let mut files = vec![(format!("{verb}.csv"), results_csv(&table).into_bytes())];
    if plot.svg {
        files.push((format!("{verb}.svg"), render_plot(&table, None)?.into_bytes()));
    }
    finish(verb, &cfg, &common.out, files)
}

fn run(cli: Cli) -> Result<()> {
    match cli.verb {
        Verb::Pattern { common, trap } => {
            let cfg = load(&common, None)?;
            let exp = cfg.experiment_spec();
            let kind = if trap { exp.trap_pattern.clone() } else { exp.addressed_pattern.clone() };
            let sel = make_pattern(&PatternSpec::new(kind, exp.grid))?;
            if let Some(w) = &sel.warning {
                eprintln!("warning: {w}");
            }
            let map = exp.apparatus.address_map(exp.grid)?;
            let mask = exp.apparatus.pattern_mask(&sel.lenses, &map)?;
            finish("pattern", &cfg, &common.out, vec![("mask.pgm".into(), mask_to_pgm(&mask)?)])
        }
        Verb::Traps { common } => {
            let cfg = load(&common, None)?;
            let exp = cfg.experiment_spec();
            let lenses = make_pattern(&PatternSpec::new(exp.trap_pattern.clone(), exp.grid))?.lenses;
            let sites = exp.apparatus.trap_sites(&lenses, exp.grid)?;
            let reports = exp.apparatus.site_reports(&sites)?;
            finish("traps", &cfg, &common.out, vec![("traps.csv".into(), traps_csv(&reports).into_bytes())])
        }
        Verb::Ramsey { common, plot } => scan("ramsey", Protocol::Ramsey, &common, &plot),
        Verb::Echo { common, plot } => scan("echo", Protocol::Echo, &common, &plot),
        Verb::Texture { common, plot } => scan("texture", Protocol::SpinTextureRamsey, &common, &plot),
        Verb::Image { common } => {
            let cfg = load(&common, None)?;
            let exp = cfg.experiment_spec();
            let loaded: BTreeSet<_> = make_pattern(&PatternSpec::new(exp.trap_pattern.clone(), exp.grid))?.lenses;
            let sites = exp.apparatus.trap_sites(&loaded, exp.grid)?;
            let populations: Vec<_> =
                sites.sites.iter().map(|s| (s.lens, if loaded.contains(&s.lens) { 1.0 } else { 0.0 })).collect();
            let image = synth_fluorescence_image(
                &sites,
                &populations,
                &exp.noise,
                cfg.experiment.image_averages,
                &cfg.image_params(),
            )?;
            finish("image", &cfg, &common.out, vec![("image.pgm".into(), image_to_pgm(&image)?)])
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
