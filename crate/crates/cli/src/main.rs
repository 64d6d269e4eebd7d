//! `photonstat` — one binary for the full pipeline:
//! simulate | correlate | fit | correct | budget | report.
//!
//! Human-readable output goes to stdout; machine JSON goes to `--out` files
//! or replaces stdout under `--json`. Exit codes: 0 success, 1 operational
//! error, 2 usage error, 3 report completed but at least one fit diverged.

mod config;
mod csvio;
mod fitjson;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use photonstat::{
    background_correct_g2_slice, corrected_rate, correlate, fiber_coupling_efficiency,
    fit_lifetime, fit_lifetime_unweighted, fit_lorentzian, fit_saturation, normalize,
    simulate_detected_pair, ttg, CountRate,
};
use serde::Serialize;

use config::PipelineConfig;
use csvio::parse_ps;

#[derive(Parser)]
#[command(
    name = "photonstat",
    version,
    about = "Simulate and analyze time-tagged single-photon statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the detected HBT channel pair for every configured power.
    Simulate {
        /// Pipeline JSON config.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Histogram coincidences between two .ttg files and normalize.
    Correlate {
        #[arg(long)]
        ch0: PathBuf,
        #[arg(long)]
        ch1: PathBuf,
        /// Symmetric delay window, integer with optional ps/ns/us suffix.
        #[arg(long, value_parser = parse_ps)]
        tau_max: u64,
        /// Bin width, integer with optional ps/ns/us suffix.
        #[arg(long, value_parser = parse_ps)]
        bin_width: u64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nonlinear least-squares model fits; input CSV, output JSON.
    Fit {
        #[command(subcommand)]
        model: FitCommand,
    },
    /// Apply the background correction to a histogram or a count rate.
    Correct {
        #[command(subcommand)]
        what: CorrectCommand,
    },
    /// Fiber-coupling efficiency from a reflectivity measurement.
    Budget {
        #[arg(long)]
        reflectivity: f64,
        #[arg(long)]
        coupler_transmission: f64,
        #[arg(long)]
        json: bool,
    },
    /// Join simulate/correlate/fit artifacts into the final report.
    Report {
        #[arg(long)]
        config: PathBuf,
        /// Artifact directory; defaults to the config's output directory.
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Write report JSON here; defaults to <dir>/report.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the JSON instead of the table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum FitCommand {
    /// Saturation curve; CSV columns: power_uW, rate_cps, sigma.
    Saturation {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Antibunching dip on a `correlate` CSV; optional background
    /// correction by --rho before fitting.
    G2 {
        #[arg(long)]
        input: PathBuf,
        /// Signal fraction in (0, 1]; applies the background correction to
        /// the histogram before fitting.
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Dip rate vs power line; CSV columns: power_uW, gamma_c_per_us, sigma.
    Lifetime {
        #[arg(long)]
        input: PathBuf,
        /// Ignore the sigma column and fit with unit weights.
        #[arg(long)]
        unweighted: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Lorentzian peak; CSV columns: energy_meV, intensity.
    Lorentzian {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum CorrectCommand {
    /// Background-correct the normalized column of a `correlate` CSV.
    G2 {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        rho: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Corrected single-photon rate from detected rate, background, g2(0).
    Rate {
        #[arg(long)]
        detected: f64,
        #[arg(long)]
        background: f64,
        #[arg(long)]
        g2_zero: f64,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Simulate { config, out_dir } => cmd_simulate(&config, out_dir.as_deref()),
        Command::Correlate {
            ch0,
            ch1,
            tau_max,
            bin_width,
            out,
        } => cmd_correlate(&ch0, &ch1, tau_max, bin_width, out.as_deref()),
        Command::Fit { model } => cmd_fit(model),
        Command::Correct { what } => cmd_correct(what),
        Command::Budget {
            reflectivity,
            coupler_transmission,
            json,
        } => {
            let budget = fiber_coupling_efficiency(reflectivity, coupler_transmission)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&budget)?);
            } else {
                println!(
                    "eta = {:.4} (R = {}, T_fc = {})",
                    budget.eta, budget.reflectivity, budget.coupler_transmission
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Report {
            config,
            dir,
            out,
            json,
        } => cmd_report(&config, dir.as_deref(), out.as_deref(), json),
    }
}

fn cmd_simulate(config_path: &Path, out_dir: Option<&Path>) -> Result<ExitCode> {
    let cfg = PipelineConfig::load(config_path)?;
    let dir = out_dir.unwrap_or(&cfg.outputs).to_path_buf();
    std::fs::create_dir_all(&dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;

    for i in 0..cfg.powers_uw.len() {
        let scenario = cfg.power_scenario(i);
        let (ch0, ch1) = simulate_detected_pair(&scenario, &cfg.detector)?;
        for (ch, stream) in [(0u8, &ch0), (1u8, &ch1)] {
            let path = config::ttg_path(&dir, i, ch);
            ttg::write_file(&path, stream)
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        println!(
            "power {} uW (seed {}): {} + {} tags over {:.1} s",
            scenario.pump_uw,
            scenario.seed,
            ch0.len(),
            ch1.len(),
            ch0.duration_s(),
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_correlate(
    ch0: &Path,
    ch1: &Path,
    tau_max: u64,
    bin_width: u64,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let s0 = ttg::read_file(ch0).with_context(|| format!("reading {}", ch0.display()))?;
    let s1 = ttg::read_file(ch1).with_context(|| format!("reading {}", ch1.display()))?;
    let hist = normalize(&correlate(&s0, &s1, tau_max, bin_width)?)?;
    let csv = csvio::histogram_csv(&hist);
    match out {
        Some(path) => std::fs::write(path, csv)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn emit_fit<T: Serialize>(
    file: &T,
    human: String,
    out: Option<&Path>,
    json: bool,
) -> Result<ExitCode> {
    let text = serde_json::to_string_pretty(file)?;
    if let Some(path) = out {
        std::fs::write(path, &text)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    if json {
        println!("{text}");
    } else {
        print!("{human}");
    }
    Ok(ExitCode::SUCCESS)
}

fn fmt_err(e: Option<f64>) -> String {
    e.map_or_else(|| "-".into(), |v| format!("{v:.6}"))
}

fn cmd_fit(model: FitCommand) -> Result<ExitCode> {
    match model {
        FitCommand::Saturation { input, out, json } => {
            let rows = csvio::read_numeric_rows(&input, 3)?;
            let points: Vec<(f64, f64, f64)> =
                rows.iter().map(|r| (r[0], r[1], r[2])).collect();
            let (params, fit) = fit_saturation(&points)?;
            let file = fitjson::saturation_file(&params, &fit);
            let human = format!(
                "saturation fit: {} after {} iterations\n  I_sat = {:.2} +- {} cps\n  \
                 P_sat = {:.4} +- {} uW\n  alpha = {:.3} +- {} cps/uW\n",
                fit.termination,
                fit.iterations,
                file.params.i_sat_cps,
                fmt_err(file.stderr.i_sat_cps),
                file.params.p_sat_uw,
                fmt_err(file.stderr.p_sat_uw),
                file.params.alpha_cps_per_uw,
                fmt_err(file.stderr.alpha_cps_per_uw),
            );
            emit_fit(&file, human, out.as_deref(), json)
        }
        FitCommand::G2 {
            input,
            rho,
            out,
            json,
        } => {
            let hist = csvio::read_hist_csv(&input)?;
            let total_counts: f64 = hist.counts.iter().sum();
            let total_values: f64 = hist.values.iter().sum();
            if total_counts <= 0.0 || total_values <= 0.0 {
                bail!(
                    "{}: histogram is empty; cannot derive Poisson weights",
                    input.display()
                );
            }
            // Baseline-expectation Poisson weights, sigma = 1/sqrt(expected
            // accidentals per bin). Data-independent, so low-count bins do
            // not bias the fit the way observed-count weights do.
            let norm_factor = total_counts / total_values;
            let mut values = hist.values.clone();
            let mut sigmas = vec![1.0 / norm_factor.sqrt(); values.len()];
            if let Some(rho) = rho {
                let (corrected, warnings) = background_correct_g2_slice(&values, rho)?;
                if warnings.any() {
                    eprintln!(
                        "warning: {} corrected bins below 0, {} above 1.5 (kept unclamped)",
                        warnings.below_zero, warnings.above_model_range
                    );
                }
                values = corrected;
                for s in &mut sigmas {
                    *s /= rho * rho;
                }
            }
            let (params, fit) =
                photonstat::fit_g2_points(&hist.tau_centers_us, &values, &sigmas)?;
            let file = fitjson::g2_file(&params, &fit);
            let human = format!(
                "g2 fit: {} after {} iterations\n  g2(0) = {:.4} +- {}\n  \
                 gamma_c = {:.4} +- {} 1/us\n",
                fit.termination,
                fit.iterations,
                file.params.g2_zero,
                fmt_err(file.stderr.g2_zero),
                file.params.gamma_c_per_us,
                fmt_err(file.stderr.gamma_c_per_us),
            );
            emit_fit(&file, human, out.as_deref(), json)
        }
        FitCommand::Lifetime {
            input,
            unweighted,
            out,
            json,
        } => {
            let min_cols = if unweighted { 2 } else { 3 };
            let rows = csvio::read_numeric_rows(&input, min_cols)?;
            let points: Vec<(f64, f64, f64)> = rows
                .iter()
                .map(|r| (r[0], r[1], if unweighted { 1.0 } else { r[2] }))
                .collect();
            let (params, fit) = if unweighted {
                fit_lifetime_unweighted(&points)?
            } else {
                fit_lifetime(&points)?
            };
            let file = fitjson::lifetime_file(&params, &fit);
            let human = format!(
                "lifetime fit: {} after {} iterations\n  tau_rad = {:.4} +- {} us\n  \
                 beta = {:.4} +- {} 1/uW\n",
                fit.termination,
                fit.iterations,
                file.params.tau_rad_us,
                fmt_err(file.stderr.tau_rad_us),
                file.params.beta_per_uw,
                fmt_err(file.stderr.beta_per_uw),
            );
            emit_fit(&file, human, out.as_deref(), json)
        }
        FitCommand::Lorentzian { input, out, json } => {
            let rows = csvio::read_numeric_rows(&input, 2)?;
            let points: Vec<(f64, f64)> = rows.iter().map(|r| (r[0], r[1])).collect();
            let (params, fit) = fit_lorentzian(&points)?;
            let file = fitjson::lorentzian_file(&params, &fit);
            let human = format!(
                "lorentzian fit: {} after {} iterations\n  center = {:.4} +- {} meV\n  \
                 fwhm = {:.3} +- {} ueV\n  amplitude = {:.3} +- {}\n  offset = {:.3} +- {}\n",
                fit.termination,
                fit.iterations,
                file.params.center_mev,
                fmt_err(file.stderr.center_mev),
                file.params.fwhm_uev,
                fmt_err(file.stderr.fwhm_uev),
                file.params.amplitude,
                fmt_err(file.stderr.amplitude),
                file.params.offset,
                fmt_err(file.stderr.offset),
            );
            emit_fit(&file, human, out.as_deref(), json)
        }
    }
}

fn cmd_correct(what: CorrectCommand) -> Result<ExitCode> {
    match what {
        CorrectCommand::G2 { input, rho, out } => {
            let hist = csvio::read_hist_csv(&input)?;
            let (corrected, warnings) = background_correct_g2_slice(&hist.values, rho)?;
            if warnings.any() {
                eprintln!(
                    "warning: {} corrected bins below 0, {} above 1.5 (kept unclamped)",
                    warnings.below_zero, warnings.above_model_range
                );
            }
            let mut csv = String::from("bin_lo_ps,bin_hi_ps,counts,corrected_g2\n");
            for (i, &(lo, hi)) in hist.bin_edges_ps.iter().enumerate() {
                csv.push_str(&format!("{},{},{},{}\n", lo, hi, hist.counts[i], corrected[i]));
            }
            match out {
                Some(path) => std::fs::write(&path, csv)
                    .with_context(|| format!("cannot write {}", path.display()))?,
                None => print!("{csv}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        CorrectCommand::Rate {
            detected,
            background,
            g2_zero,
            json,
        } => {
            let corrected = corrected_rate(
                CountRate::new(detected)?,
                CountRate::new(background)?,
                g2_zero,
            )?;
            if json {
                println!("{{\"corrected_cps\": {}}}", corrected.cps());
            } else {
                println!("corrected rate = {:.2} cps", corrected.cps());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_report(
    config_path: &Path,
    dir: Option<&Path>,
    out: Option<&Path>,
    json: bool,
) -> Result<ExitCode> {
    let cfg = PipelineConfig::load(config_path)?;
    let dir = dir.unwrap_or(&cfg.outputs).to_path_buf();
    let report = report::build_report(&cfg, &dir)?;
    let text = serde_json::to_string_pretty(&report)?;
    let out_path = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| dir.join("report.json"));
    std::fs::write(&out_path, &text)
        .with_context(|| format!("cannot write {}", out_path.display()))?;
    if json {
        println!("{text}");
    } else {
        print!("{}", report::render(&report));
    }
    Ok(if report.global.all_converged {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}
