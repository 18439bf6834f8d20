//! Command-line front end. Exit codes: 0 success, 1 operational error, 2 Dolgopyat scan fails,
//! 3 obstruction too large, 4 divergence or no convergence, 5 failed verification or invariant.

use crate::complex::{block_matrix, block_spectrum, diophantine_scan, Flavor, Which};
use crate::error::{Error, Result};
use crate::geometry::CompositionGrid;
use crate::kam::{
    analytic_track, fmt17, prepare, run_logged, verify_conjugacy, write_final_json, write_steps_csv, FinalReport,
    KamConfig, Mode, RunSpec,
};
use crate::models::{
    certify_periodic, cyclic_coefficients, parse_model, sphere_z_action, Model,
};
use crate::spectral::{cochain_from_json, cochain_to_json, spectrum_from_json, spectrum_to_json};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_DOLGOPYAT: i32 = 2;
pub const EXIT_OBSTRUCTION: i32 = 3;
pub const EXIT_DIVERGED: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "isokam", version, about = "Spectral KAM toolkit for isometric group actions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    /// Model name, e.g. circle:golden, cyclic:6, periodic:2,3, abelian:2:2, sphere-z:20:golden
    #[arg(value_name = "MODEL")]
    pub name: Option<String>,
    #[arg(long = "model", conflicts_with = "name")]
    pub model: Option<String>,
    /// JSON model file {generators, relations, action}
    #[arg(long, conflicts_with_all = ["name", "model"])]
    pub config: Option<PathBuf>,
}

impl ModelArgs {
    fn load(&self) -> Result<Model> {
        match (&self.name, &self.model, &self.config) {
            (Some(n), None, None) | (None, Some(n), None) => parse_model(n),
            (None, None, Some(p)) => Model::from_json(&read(p)?),
            _ => Err(Error::InvalidInput("give a model name or --config".into())),
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Blockwise eigenvalues of d0 d0*, d1* d1 and Box on one block
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        /// Block key |k|^2 (J(J+1) on the sphere)
        #[arg(long)]
        sqnorm: u64,
    },
    /// Diophantine scan over all blocks up to a key
    Diophantine {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value = "d0")]
        flavor: String,
        #[arg(long = "max-sqnorm", default_value_t = 400)]
        max_sqnorm: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the KAM iteration from a JSON run description
    Kam {
        #[arg(long)]
        config: PathBuf,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
    },
    /// Re-check a finished run from its files alone
    Verify {
        #[arg(long)]
        run: PathBuf,
        /// Defaults to 10 times the run's target residual
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Integer coefficients of the cyclic decomposition
    Cyclic {
        #[arg(long)]
        order: u64,
    },
    /// Describe a model; periodic and sphere models also print their certified facts
    Model {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "max-sqnorm", default_value_t = 400)]
        max_sqnorm: u64,
    },
}

fn read(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", p.display())))
}

fn print_json(v: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(v)?);
    Ok(())
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ObstructionTooLarge { .. } => EXIT_OBSTRUCTION,
        Error::Diverged { .. } | Error::NotConverged { .. } => EXIT_DIVERGED,
        Error::VerificationFailed(_) => EXIT_VERIFY,
        _ => EXIT_ERROR,
    }
}

fn cmd_spectrum(model: &Model, sq: u64) -> Result<i32> {
    let ops = [
        ("d0d0star", Which::D0D0Star),
        ("d1stard1", Which::D1StarD1),
        ("box", Which::Box),
    ];
    let mut out = serde_json::Map::new();
    out.insert("sq_norm".into(), json!(sq));
    out.insert("lambda".into(), json!((sq as f64).sqrt()));
    let mut kernels = serde_json::Map::new();
    for (name, which) in ops {
        let op = block_matrix(&model.action, &model.presentation, which, sq)?;
        let s = block_spectrum(&op);
        out.insert("dim".into(), json!(op.dim()));
        out.insert(name.into(), json!(s.eigenvalues));
        kernels.insert(name.into(), json!(s.kernel_dim()));
    }
    out.insert("kernel_dims".into(), kernels.into());
    print_json(&out.into())?;
    Ok(EXIT_OK)
}

fn cmd_diophantine(model: &Model, flavor: &str, max_sq: u64, out: Option<&Path>) -> Result<i32> {
    let flavor: Flavor = flavor.parse()?;
    let report = diophantine_scan(&model.action, &model.presentation, flavor, max_sq)?;
    let text = serde_json::to_string_pretty(&report)?;
    match out {
        Some(p) => std::fs::write(p, &text)?,
        None => println!("{text}"),
    }
    let summary = json!({
        "flavor": flavor.to_string(),
        "diophantine": report.diophantine,
        "sigma": report.fit.as_ref().map(|f| f.sigma),
        "tau": report.fit.as_ref().map(|f| f.tau),
        "resonant_witness": report.resonant_witness,
        "resonant_witness_lambda": report.resonant_witness_lambda,
    });
    eprintln!("{summary}");
    Ok(if report.dolgopyat_failed { EXIT_DOLGOPYAT } else { EXIT_OK })
}

fn cmd_kam(config: &Path, out_dir: &Path) -> Result<i32> {
    let spec = RunSpec::from_file(config)?;
    std::fs::create_dir_all(out_dir)?;
    let prep = prepare(&spec)?;
    std::fs::write(out_dir.join("model.json"), serde_json::to_string_pretty(&prep.model)?)?;
    std::fs::write(out_dir.join("p0.json"), serde_json::to_string(&cochain_to_json(&prep.p0))?)?;
    if let Some(y) = &prep.witness {
        std::fs::write(out_dir.join("witness.json"), serde_json::to_string(&spectrum_to_json(y))?)?;
    }
    let (log, err) = run_logged(&prep.config, &prep.model.action, &prep.model.presentation, &prep.p0);
    let analytic = match (prep.config.mode, &err) {
        (Mode::Analytic, None) => Some(analytic_track(&log)?),
        _ => None,
    };
    write_steps_csv(&out_dir.join("steps.csv"), &log.steps)?;
    write_final_json(&out_dir.join("final.json"), &FinalReport::new(&log, analytic.as_ref(), err.as_ref())?)?;
    if let Some(e) = err {
        eprintln!("isokam: {e}");
        return Ok(exit_code(&e));
    }
    if let Some(a) = &analytic {
        if !a.all_within {
            eprintln!("isokam: analytic decay check failed");
            return Ok(EXIT_VERIFY);
        }
    }
    eprintln!(
        "converged in {} steps, residual {}",
        log.steps.len(),
        fmt17(log.final_residual)
    );
    Ok(EXIT_OK)
}

fn cmd_verify(run: &Path, tol: Option<f64>) -> Result<i32> {
    let model = Model::from_json(&read(&run.join("model.json"))?)?;
    let p0 = cochain_from_json(&serde_json::from_str(&read(&run.join("p0.json"))?)?)?;
    let fin: serde_json::Value = serde_json::from_str(&read(&run.join("final.json"))?)?;
    let cfg: KamConfig = serde_json::from_value(fin["config"].clone())?;
    let w = spectrum_from_json(&fin["W"])?;
    let cg = CompositionGrid::new(model.action.dim(), cfg.grid, cfg.max_freq)?;
    let residual = verify_conjugacy(&model.action, &p0, &w, &cg)?;
    let tol = tol.unwrap_or(10.0 * cfg.target_residual);
    let pass = residual <= tol;
    print_json(&json!({ "residual": fmt17(residual), "tol": fmt17(tol), "pass": pass }))?;
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_cyclic(order: u64) -> Result<i32> {
    let c = cyclic_coefficients(order)?;
    let bad = c.check_invariants();
    print_json(&json!({
        "n": c.n,
        "y": c.y,
        "c_table": c.c_table,
        "alpha0": c.alpha0(),
        "violated": bad,
    }))?;
    Ok(if bad.is_empty() { EXIT_OK } else { EXIT_VERIFY })
}

fn cmd_model(model: &Model, max_sq: u64) -> Result<i32> {
    let mut out = json!({ "model": model });
    let name = model.name.as_str();
    if let Some(rest) = name.strip_prefix("periodic:") {
        let orders: Vec<u64> = rest
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| Error::InvalidInput(format!("bad order {s}"))))
            .collect::<Result<_>>()?;
        let (_, facts) = certify_periodic(&orders, max_sq, max_sq)?;
        out["certified"] = serde_json::to_value(&facts)?;
    } else if let crate::complex::ActionKind::SphereZRotation { j_max, angles } = &model.action.kind {
        let (_, report) = sphere_z_action(*j_max, angles.clone())?;
        out["d0_scan"] = json!({
            "diophantine": report.diophantine,
            "fit": report.fit,
            "kernel_dims": report.per_block.iter().map(|b| b.kernel_dim).collect::<Vec<_>>(),
        });
    }
    print_json(&out)?;
    Ok(EXIT_OK)
}

/// Run a parsed command and map the outcome to an exit code.
pub fn execute(cli: Cli) -> i32 {
    let res = match &cli.command {
        Command::Spectrum { model, sqnorm } => model.load().and_then(|m| cmd_spectrum(&m, *sqnorm)),
        Command::Diophantine {
            model,
            flavor,
            max_sqnorm,
            out,
        } => model
            .load()
            .and_then(|m| cmd_diophantine(&m, flavor, *max_sqnorm, out.as_deref())),
        Command::Kam { config, out_dir } => cmd_kam(config, out_dir),
        Command::Verify { run, tol } => cmd_verify(run, *tol),
        Command::Cyclic { order } => cmd_cyclic(*order),
        Command::Model { model, max_sqnorm } => model.load().and_then(|m| cmd_model(&m, *max_sqnorm)),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("isokam: {e}");
            exit_code(&e)
        }
    }
}
