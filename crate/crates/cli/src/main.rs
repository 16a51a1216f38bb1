use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bound_tunnel::classical::{find_epsilon_crit, find_nu0};
use bound_tunnel::config::RunConfig;
use bound_tunnel::exponent::{compare, fit_exponent, scan_g, FitResult, SemiclassicalF0};
use bound_tunnel::output::{self, ComparisonCsvRow, F0Row, FitRow, RecordRow, ThresholdRow};
use bound_tunnel::semiclassical::f0_at_energies;
use bound_tunnel::Error;

const PARTIAL: u8 = 4;

#[derive(Parser)]
#[command(name = "bound-tunnel", version, about = "Tunneling of a bound pair through a barrier: classical, semiclassical and quantum runs")]
struct Cli {
    /// TOML run configuration; defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out` in the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// ν₀ and ε_crit from real-time dynamics.
    Thresholds,
    /// Complex-time solutions and F₀(ε) by ν → 0 extrapolation.
    Semiclassical,
    /// Ground-state transmission scans in 1/g².
    Quantum,
    /// Linear fits of ln T₀ against 1/g².
    Fit,
    /// Semiclassical vs quantum F₀ table.
    Compare,
}

enum Outcome {
    Done,
    Partial(Vec<String>),
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn thresholds(cfg: &RunConfig, dir: &Path) -> Result<Outcome, Error> {
    let params = cfg.model()?;
    let nu0 = find_nu0(&params, &cfg.nu0_options())?;
    let crit = find_epsilon_crit(&params, &cfg.crit_options())?;
    output::write_rows(create(dir, "thresholds.csv")?, [ThresholdRow::new("nu0", &nu0), ThresholdRow::new("epsilon_crit", &crit)])?;
    println!("nu0 = {:.6}, epsilon_crit = {:.6}", nu0.value, crit.value);
    Ok(Outcome::Done)
}

fn semiclassical(cfg: &RunConfig, dir: &Path) -> Result<Outcome, Error> {
    let params = cfg.model()?;
    let energies = &cfg.semiclassical.epsilons;
    if energies.is_empty() {
        eprintln!("warning: empty ε grid, writing empty tables");
    }
    let results = f0_at_energies(&params, &cfg.contour_spec(), energies, &cfg.f0_options())?;
    let mut records = Vec::new();
    let mut f0 = Vec::new();
    let mut failed = Vec::new();
    for (e, r) in energies.iter().zip(results) {
        match r {
            Ok(r) => {
                records.push(RecordRow::from(&r.start));
                records.extend(r.tail.iter().map(RecordRow::from));
                f0.push(F0Row::from(&r));
            }
            Err(err) => failed.push(format!("ε = {e}: {err}")),
        }
    }
    output::write_table(create(dir, "semiclassical_records.csv")?, output::RECORD_COLUMNS, &records)?;
    output::write_table(create(dir, "semiclassical_f0.csv")?, output::F0_COLUMNS, &f0)?;
    for r in &f0 {
        println!("epsilon = {:.4}: F0 = {:.6} ± {:.1e}", r.epsilon, r.f0, r.f0_err);
    }
    Ok(if failed.is_empty() { Outcome::Done } else { Outcome::Partial(failed) })
}

fn quantum(cfg: &RunConfig, dir: &Path) -> Result<Outcome, Error> {
    let params = cfg.model()?;
    let policy = cfg.scan_policy();
    let mut series = Vec::new();
    let mut failed = Vec::new();
    for s in &cfg.scan.series {
        let gs: Vec<f64> = s.inv_g2.iter().map(|v| 1.0 / v.sqrt()).collect();
        match scan_g(&params, s.epsilon, &gs, &policy) {
            Ok(r) => {
                for p in r.points.iter().filter(|p| !p.usable()) {
                    eprintln!("ε = {}, 1/g² = {}: excluded ({})", s.epsilon, p.inv_g2, p.excluded.as_deref().unwrap_or(""));
                }
                series.push(r);
            }
            Err(err) => failed.push(format!("ε = {}: {err}", s.epsilon)),
        }
    }
    output::write_solves(create(dir, "quantum_solves.csv")?, &series)?;
    for s in &series {
        for p in &s.points {
            println!("epsilon = {:.4}, 1/g^2 = {:.3}: ln T0 = {:.6}", s.epsilon, p.inv_g2, p.ln_t0);
        }
    }
    Ok(if failed.is_empty() { Outcome::Done } else { Outcome::Partial(failed) })
}

fn fit(cfg: &RunConfig, dir: &Path) -> Result<Outcome, Error> {
    let input = cfg.fit.input.clone().unwrap_or_else(|| dir.join("quantum_solves.csv"));
    let series = output::read_solves(File::open(&input).map_err(|e| Error::Config(format!("{}: {e}", input.display())))?)?;
    let mut fits = Vec::new();
    let mut failed = Vec::new();
    for s in &series {
        match fit_exponent(s) {
            Ok(f) => fits.push(f),
            Err(err) => failed.push(format!("ε = {}: {err}", s.epsilon)),
        }
    }
    output::write_table(create(dir, "quantum_fits.csv")?, output::FIT_COLUMNS, fits.iter().map(FitRow::from))?;
    for f in &fits {
        let flag = if f.non_exponential { " (non-exponential)" } else { "" };
        println!("epsilon = {:.4}: F0 = {:.6} ± {:.1e}, R^2 = {:.7}{flag}", f.epsilon, f.f0, f.f0_err, f.r2);
    }
    Ok(if failed.is_empty() { Outcome::Done } else { Outcome::Partial(failed) })
}

fn open(path: &Path) -> Result<File, Error> {
    File::open(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn compare_cmd(cfg: &RunConfig, dir: &Path) -> Result<Outcome, Error> {
    let semi_path = cfg.compare.semiclassical.clone().unwrap_or_else(|| dir.join("semiclassical_f0.csv"));
    let q_path = cfg.compare.quantum.clone().unwrap_or_else(|| dir.join("quantum_fits.csv"));
    let semi: Vec<F0Row> = output::read_rows(open(&semi_path)?)?;
    let fits: Vec<FitRow> = output::read_rows(open(&q_path)?)?;
    let semi: Vec<SemiclassicalF0> = semi.iter().map(SemiclassicalF0::from).collect();
    let fits: Vec<FitResult> = fits.iter().map(FitResult::from).collect();
    let rows = compare(&semi, &fits, &cfg.tolerance());
    if rows.is_empty() {
        eprintln!("warning: no overlap between semiclassical and quantum ε grids");
    }
    output::write_table(create(dir, "comparison.csv")?, output::COMPARISON_COLUMNS, rows.iter().map(ComparisonCsvRow::from))?;
    for r in &rows {
        let mark = if r.within { "ok" } else { "outside tolerance" };
        println!("epsilon = {:.4}: semi {:.5}, quantum {:.5}, rel {:.2e} [{mark}]", r.epsilon, r.f0_semi, r.f0_quantum, r.rel_diff);
    }
    Ok(Outcome::Done)
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.workers.or(cfg.workers) {
        if n == 0 {
            return Err(Error::Config("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Config(e.to_string()))?;
    }
    let dir = cli.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir)?;
    match cli.command {
        Command::Thresholds => thresholds(&cfg, &dir),
        Command::Semiclassical => semiclassical(&cfg, &dir),
        Command::Quantum => quantum(&cfg, &dir),
        Command::Fit => fit(&cfg, &dir),
        Command::Compare => compare_cmd(&cfg, &dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Partial(failed)) => {
            for f in failed {
                eprintln!("failed: {f}");
            }
            ExitCode::from(PARTIAL)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
