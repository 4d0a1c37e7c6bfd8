use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use pi_entangle::config::{self, MeasureOptions};
use pi_entangle::io::{state_from_json, DensityMatrixJson};
use pi_entangle::measures::{mixed_measure, MeasureId, MeasureResult};
use pi_entangle::named::NamedState;
use pi_entangle::rng::{derive_seed, STREAM_BASIS, STREAM_MEASURE};
use pi_entangle::sampling::{sample_ginibre_mixed, sample_haar_pure};
use pi_entangle::state::{BipartiteDims, DensityMatrix};
use pi_entangle::symmetrization::{pi_part, pi_part_in_basis, LocalBasisJson};
use pi_entangle::verifier::{run_campaign, verify_state, BasisSearch, CampaignConfig, CampaignReport, StateRef, Verdict, VerifySettings};
use pi_entangle::Error;
use serde::Serialize;

use crate::{Command, Format, Optimizer};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FLAGGED: u8 = 3;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Schema(String),
    Invariant(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "E_IO: {m}"),
            CliError::Schema(m) => write!(f, "E_SCHEMA: {m}"),
            CliError::Invariant(m) => write!(f, "E_INVARIANT: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Schema(_) | Error::InvalidParameter(_) => CliError::Schema(e.to_string()),
            Error::Structural(_) | Error::Invariant(_) | Error::Numeric(_) | Error::Unsupported(_) => {
                CliError::Invariant(e.to_string())
            }
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

fn load_state(path: &Path) -> CliResult<DensityMatrix> {
    state_from_json(&read(path)?).map_err(|e| match CliError::from(e) {
        CliError::Schema(m) => CliError::Schema(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn emit(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn measure_id(s: &str) -> CliResult<MeasureId> {
    s.parse::<MeasureId>().map_err(CliError::from)
}

fn measure_options(opt: &Optimizer) -> CliResult<MeasureOptions> {
    let mut opts = match &opt.config {
        Some(path) => parse_json::<MeasureOptions>(path)?,
        None => MeasureOptions::default(),
    };
    if let Some(seed) = opt.seed {
        opts.seed = seed;
    }
    if let Some(r) = opt.restarts {
        if r == 0 {
            return Err(CliError::Schema("--restarts must be at least 1".into()));
        }
        opts.roof_restarts = r;
        opts.ree_restarts = r;
    }
    Ok(opts)
}

fn result_csv(r: &MeasureResult) -> String {
    let semantics = if r.is_exact() { "EXACT" } else { "UPPER_BOUND" };
    format!(
        "measure,value,semantics,converged,iterations,seed\n{},{},{},{},{},{}",
        r.measure, r.value, semantics, r.converged, r.iterations, r.seed
    )
}

fn parse_dims(s: &str) -> CliResult<BipartiteDims> {
    let bad = || CliError::Schema(format!("--dims expects DAxDB, got '{s}'"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let a = a.trim().parse().map_err(|_| bad())?;
    let b = b.trim().parse().map_err(|_| bad())?;
    Ok(BipartiteDims::new(a, b)?)
}

fn gen_state(family: &str, param: Option<f64>, dims: &str, rank: Option<usize>, seed: u64) -> CliResult<DensityMatrix> {
    let dims = parse_dims(dims)?;
    match family {
        "haar_pure" => Ok(sample_haar_pure(dims, seed).density_matrix()),
        "ginibre" => Ok(sample_ginibre_mixed(dims, rank.unwrap_or(dims.total()), seed)?),
        _ => {
            let name = match param {
                Some(p) => format!("{family}({p})"),
                None => family.to_string(),
            };
            let state: NamedState = name.parse()?;
            Ok(state.density_matrix(dims)?)
        }
    }
}

fn campaign_status(report: &CampaignReport) -> u8 {
    if report.has_flags() {
        EXIT_FLAGGED
    } else {
        EXIT_OK
    }
}

#[derive(Serialize)]
struct Defaults {
    measure_options: MeasureOptions,
    campaign: CampaignConfig,
    tol_violation_exact: f64,
    tol_violation_optimized: f64,
    rerun_restart_factor: usize,
    basis_tol: f64,
    basis_patience: usize,
    roof_patience: usize,
}

pub fn run(command: Command) -> CliResult<u8> {
    match command {
        Command::Measure { state, id, optimizer, output } => {
            let rho = load_state(&state)?;
            let result = mixed_measure(measure_id(&id)?, &rho, &measure_options(&optimizer)?)?;
            let text = match output.format {
                Format::Json => to_json(&result),
                Format::Csv => result_csv(&result),
            };
            emit(output.out.as_ref(), &text)?;
            Ok(EXIT_OK)
        }
        Command::PiPart { state, basis, out } => {
            let rho = load_state(&state)?;
            let pi = match basis {
                Some(path) => pi_part_in_basis(&rho, &parse_json::<LocalBasisJson>(&path)?.to_basis()?)?,
                None => pi_part(&rho)?,
            };
            emit(out.as_ref(), &to_json(&DensityMatrixJson::from_state(&pi)))?;
            Ok(EXIT_OK)
        }
        Command::Verify { state, id, config, seed, restarts, output } => {
            let rho = load_state(&state)?;
            let measure = measure_id(&id)?;
            let opts = measure_options(&Optimizer { config, seed, restarts: None })?;
            let restarts = restarts.unwrap_or(config::BASIS_RESTARTS);
            if restarts == 0 {
                return Err(CliError::Schema("--restarts must be at least 1".into()));
            }
            let settings = VerifySettings {
                search: BasisSearch { restarts, max_iters: config::BASIS_MAX_ITERS },
                measure_options: opts,
                tol_violation: config::TOL_VIOLATION_EXACT,
                tol_optimized: config::TOL_VIOLATION_OPTIMIZED,
                basis_seed: derive_seed(opts.seed, STREAM_BASIS),
                measure_seed: derive_seed(opts.seed, STREAM_MEASURE),
            };
            let state_ref = StateRef {
                index: 0,
                family: "file".into(),
                seed: None,
                name: Some(state.display().to_string()),
            };
            let record = verify_state(&rho, measure, &settings, state_ref)?;
            let text = match output.format {
                Format::Json => to_json(&record),
                Format::Csv => format!(
                    "measure,e_rho,e_pi_max,margin,verdict,reliable\n{},{},{},{},{},{}",
                    record.measure,
                    record.e_rho.value,
                    record.e_pi_max.value,
                    record.margin,
                    record.verdict.as_str(),
                    record.reliable
                ),
            };
            emit(output.out.as_ref(), &text)?;
            Ok(if record.verdict == Verdict::Flagged { EXIT_FLAGGED } else { EXIT_OK })
        }
        Command::Campaign { config, seed, restarts, output } => {
            let mut cfg: CampaignConfig = parse_json(&config)?;
            if let Some(seed) = seed {
                cfg.master_seed = seed;
            }
            if let Some(r) = restarts {
                cfg.basis_restarts = r;
            }
            let report = run_campaign(&cfg)?;
            let text = match output.format {
                Format::Json => to_json(&report),
                Format::Csv => report.to_csv(),
            };
            emit(output.out.as_ref(), &text)?;
            Ok(campaign_status(&report))
        }
        Command::GenState { family, param, dims, rank, seed, out } => {
            let rho = gen_state(&family, param, &dims, rank, seed)?;
            emit(out.as_ref(), &to_json(&DensityMatrixJson::from_state(&rho)))?;
            Ok(EXIT_OK)
        }
        Command::Defaults { out } => {
            let defaults = Defaults {
                measure_options: MeasureOptions::default(),
                campaign: CampaignConfig::default(),
                tol_violation_exact: config::TOL_VIOLATION_EXACT,
                tol_violation_optimized: config::TOL_VIOLATION_OPTIMIZED,
                rerun_restart_factor: config::RERUN_RESTART_FACTOR,
                basis_tol: config::BASIS_TOL,
                basis_patience: config::BASIS_PATIENCE,
                roof_patience: config::ROOF_PATIENCE,
            };
            emit(out.as_ref(), &to_json(&defaults))?;
            Ok(EXIT_OK)
        }
    }
}
