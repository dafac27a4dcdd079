//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on usage or validation errors, 2 on runtime
//! failures (I/O, numerical breakdown).

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use super::config::ExperimentConfig;
use super::output;
use super::presets::{figure_preset, Overrides, Preset};
use super::runner::RunOutput;
use super::{run_and_write_preset, PresetOutput};
use crate::bounds::{report, GuaranteeInputs};
use crate::dictionary::{design_low_coherence, DesignParams, MeasurementMatrix};
use crate::error::{Error, Result};
use crate::tracywidom::table;

#[derive(Debug, Parser)]
#[command(name = "sompkit", version, about = "Joint-sparse support recovery experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the coherence report of a matrix file or a freshly designed matrix.
    Coherence {
        /// Matrix file (`M N` header, then rows).
        file: Option<PathBuf>,
        /// Design an M×N matrix instead of reading one.
        #[arg(long, num_args = 2, value_names = ["M", "N"], conflicts_with = "file")]
        design: Option<Vec<usize>>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        iters: Option<usize>,
    },
    /// Design a low-coherence M×N matrix and write it to a file.
    Design {
        m: usize,
        n: usize,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Defaults to `phi_<M>x<N>_seed<S>.txt`.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print every threshold and bound for the parameters in a TOML file.
    Bounds {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Run a sweep from a config file or a figure preset and write CSV + SVG.
    Run {
        #[arg(long, conflicts_with = "figure", required_unless_present = "figure")]
        config: Option<PathBuf>,
        #[arg(long)]
        figure: Option<String>,
        #[arg(long)]
        trials: Option<u32>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Print the resolved configuration and exit.
        #[arg(long)]
        print_config: bool,
    },
    /// Dump the embedded Tracy-Widom F1 table as CSV.
    TwTable,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

/// Runs the command line and returns the process exit status.
pub fn cli_main<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| Error::io("<stdout>", e))
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Coherence {
            file,
            design,
            seed,
            iters,
        } => {
            let mat = match (file, design) {
                (Some(path), None) => MeasurementMatrix::load(&path)?,
                (None, Some(dims)) => {
                    let mut params = DesignParams::default();
                    if let Some(i) = iters {
                        params.iters = i;
                    }
                    design_low_coherence(dims[0], dims[1], &params, seed)?
                }
                _ => return Err(Error::Parameter("give a matrix file or --design M N".into())),
            };
            let r = mat.coherence();
            emit(
                out,
                &format!(
                    "M = {}\nN = {}\nmu = {:.6}\nwelch_lower_bound = {:.6}\nargmax_pair = ({}, {})\ngram_offdiag_max_abs = {:.6}\nprovenance = {}\n",
                    mat.m(),
                    mat.n(),
                    r.mu,
                    r.welch_lower_bound,
                    r.argmax_pair.0,
                    r.argmax_pair.1,
                    r.gram_offdiag_max_abs,
                    mat.provenance()
                ),
            )
        }
        Command::Design {
            m,
            n,
            iters,
            gamma,
            seed,
            output,
        } => {
            let mut params = DesignParams::default();
            if let Some(i) = iters {
                params.iters = i;
            }
            if let Some(g) = gamma {
                params.gamma = g;
            }
            let mat = design_low_coherence(m, n, &params, seed)?;
            let path = output.unwrap_or_else(|| PathBuf::from(format!("phi_{m}x{n}_seed{seed}.txt")));
            mat.save(&path)?;
            emit(
                out,
                &format!(
                    "wrote {}\nmu = {:.6}\nwelch_lower_bound = {:.6}\n",
                    path.display(),
                    mat.mu(),
                    mat.coherence().welch_lower_bound
                ),
            )
        }
        Command::Bounds { config, format } => {
            let text = std::fs::read_to_string(&config).map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => Error::Config(format!("config file {} not found", config.display())),
                _ => Error::io(&config, e),
            })?;
            let inputs: GuaranteeInputs = toml::from_str(&text).map_err(|e| Error::Parse {
                path: config.clone(),
                message: e.to_string(),
            })?;
            let lines = report(&inputs);
            let mut s = String::new();
            match format {
                Format::Csv => {
                    s.push_str("quantity,value,note\n");
                    for l in &lines {
                        let v = l.value.as_ref().map(|v| output::fmt_real(*v)).unwrap_or_default();
                        let note = match &l.value {
                            Ok(_) => l.note.clone(),
                            Err(e) => e.clone(),
                        };
                        s.push_str(&format!("{},{},\"{}\"\n", l.label, v, note.replace('"', "'")));
                    }
                }
                Format::Text => {
                    for l in &lines {
                        match &l.value {
                            Ok(v) => s.push_str(&format!("{:<32} {:>22.12}  # {}\n", l.label, v, l.note)),
                            Err(e) => s.push_str(&format!("{:<32} {:>22}  # {}\n", l.label, "n/a", e)),
                        }
                    }
                }
            }
            emit(out, &s)
        }
        Command::Run {
            config,
            figure,
            trials,
            seed,
            output_dir,
            print_config,
        } => {
            let overrides = Overrides {
                trials,
                seed,
                output_dir,
            };
            let mut preset = match (config, figure) {
                (Some(path), None) => Preset::Sweep(vec![ExperimentConfig::load(&path).map_err(|e| match e {
                    Error::Io { path, source } if source.kind() == std::io::ErrorKind::NotFound => {
                        Error::Config(format!("config file {} not found", path.display()))
                    }
                    other => other,
                })?]),
                (None, Some(name)) => figure_preset(&name)?,
                _ => return Err(Error::Parameter("give exactly one of --config or --figure".into())),
            };
            preset.apply(&overrides);
            if let Preset::Sweep(panels) = &preset {
                for p in panels {
                    p.validate()?;
                }
            }
            if print_config {
                return emit(out, &preset.to_toml());
            }
            let (result, files) = run_and_write_preset(&preset)?;
            let mut s = summarize(&result);
            for f in files {
                s.push_str(&format!("wrote {}\n", f.display()));
            }
            emit(out, &s)
        }
        Command::TwTable => {
            let t = table();
            let mut s = format!("# {}\ns,f1\n", t.source());
            for (x, f) in t.s_grid().iter().zip(t.f1_values()) {
                s.push_str(&format!("{x},{}\n", output::fmt_real(*f)));
            }
            emit(out, &s)
        }
    }
}

fn summarize(result: &PresetOutput) -> String {
    let mut s = String::new();
    match result {
        PresetOutput::TwValidation(v) => {
            for series in &v.series {
                s.push_str(&format!("d = {}: sup gap to F1 = {:.4}\n", series.d, series.ks_distance));
            }
        }
        PresetOutput::Sweep(runs) => {
            for run in runs {
                s.push_str(&summarize_run(run));
            }
        }
    }
    s
}

fn summarize_run(run: &RunOutput) -> String {
    let mut s = String::new();
    for c in &run.curves {
        let row = c
            .outer
            .map(|(a, v)| format!(" {}={}", a.label(), v))
            .unwrap_or_default();
        let edge = c.edge().map(|e| e.to_string()).unwrap_or_else(|| "none".into());
        let theory: Vec<String> = output::row_thresholds(c)
            .iter()
            .map(|o| format!("{}={:.4}", o.method, o.value))
            .collect();
        s.push_str(&format!(
            "{}{row} {}: empirical edge {} (target {}), theory [{}]\n",
            c.algorithm.label(),
            c.axis.label(),
            edge,
            c.target,
            theory.join(", ")
        ));
    }
    s
}

/// Entry point for the binary.
pub fn main_with_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    cli_main(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
