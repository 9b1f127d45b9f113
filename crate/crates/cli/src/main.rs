//! Command line front end: computes stationary profiles, spectra, Liouville
//! diagnostics, sign tests, evolutions and scans; writes CSV and JSON
//! reports; caches expensive artifacts on disk.

mod cache;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use nodalheat::analysis::{self, AsymptoticsConfig};
use nodalheat::evolution::{self, Classification, Controls, EvolutionOutcome};
use nodalheat::shooting::StationarySolution;
use nodalheat::spectral::{self, EigenPair};
use nodalheat::verification;
use nodalheat::{liouville, RadialGrid};

use cache::CacheKey;
use report::Summary;

#[derive(Parser)]
#[command(
    name = "nodalheat",
    version,
    about = "Radial Lane-Emden profiles on the unit disk, their Liouville rescaling limit, linearized spectra, and blowup classification under the nonlinear heat flow"
)]
struct Cli {
    /// Directory for CSV and JSON outputs.
    #[arg(long, default_value = "out", global = true)]
    out_dir: PathBuf,
    /// Cache directory; defaults to $NODALHEAT_CACHE, else `<out-dir>/cache`.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Serialize, Clone, Copy)]
struct SolutionArgs {
    /// Exponent p > 1.
    #[arg(long)]
    p: f64,
    /// Number of nodal regions K >= 1.
    #[arg(long, short)]
    k: usize,
    /// Unit-disk grid nodes.
    #[arg(long, default_value_t = 2001)]
    nodes: usize,
}

#[derive(Args, Serialize, Clone, Copy)]
struct SpectralArgs {
    /// Truncation radius of the (rescaled) spectral domain.
    #[arg(long, default_value_t = 40.0)]
    radius: f64,
    /// Node count of the spectral grid.
    #[arg(long, default_value_t = 8001)]
    spectral_nodes: usize,
}

#[derive(Args, Serialize, Clone, Copy)]
struct ControlArgs {
    #[arg(long, default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = 1e-6)]
    dt_init: f64,
    #[arg(long, default_value_t = 1e8)]
    blowup_threshold: f64,
    #[arg(long, default_value_t = 1e-3)]
    decay_threshold: f64,
    #[arg(long, default_value_t = 1e-14)]
    dt_floor: f64,
}

impl From<ControlArgs> for Controls {
    fn from(args: ControlArgs) -> Controls {
        Controls {
            t_max: args.t_max,
            dt_init: args.dt_init,
            blowup_threshold: args.blowup_threshold,
            decay_threshold: args.decay_threshold,
            dt_floor: args.dt_floor,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute and cache the K-nodal stationary solution.
    Stationary(StationaryCmd),
    /// First eigenpair of the linearized operator, or of the limit operator.
    Spectrum(SpectrumCmd),
    /// Rescaled profile and potential diagnostics toward the Liouville limit.
    Liouville(LiouvilleCmd),
    /// Energy functional and Nehari identity values.
    Energy(EnergyCmd),
    /// Blowup sign-test integrals and the eigen-identity residual.
    Signtest(SigntestCmd),
    /// Evolve lambda * u under the nonlinear heat flow and classify.
    Evolve(EvolveCmd),
    /// Classify a list of lambda values and report the empirical boundaries.
    Scan(ScanCmd),
    /// Asymptotics table across an exponent list.
    Asymptotics(AsymptoticsCmd),
    /// Run the acceptance criteria and report per-criterion results.
    Verify(VerifyCmd),
}

#[derive(Args, Serialize)]
struct StationaryCmd {
    #[command(flatten)]
    solution: SolutionArgs,
}

#[derive(Args, Serialize)]
struct SpectrumCmd {
    /// Exponent p; omit together with --k to solve the limit operator.
    #[arg(long, required_unless_present = "limit")]
    p: Option<f64>,
    #[arg(long, short, required_unless_present = "limit")]
    k: Option<usize>,
    /// Solve the limit operator instead of a linearized operator.
    #[arg(long)]
    limit: bool,
    #[arg(long, default_value_t = 2001)]
    nodes: usize,
    #[command(flatten)]
    spectral: SpectralArgs,
}

#[derive(Args, Serialize)]
struct LiouvilleCmd {
    #[command(flatten)]
    solution: SolutionArgs,
    /// Radius of the rescaled profile grid.
    #[arg(long, default_value_t = 8.0)]
    profile_radius: f64,
    #[arg(long, default_value_t = 1601)]
    profile_nodes: usize,
    /// Radius of the compact ball for the C1 comparison.
    #[arg(long, default_value_t = 5.0)]
    compare_radius: f64,
}

#[derive(Args, Serialize)]
struct EnergyCmd {
    #[command(flatten)]
    solution: SolutionArgs,
}

#[derive(Args, Serialize)]
struct SigntestCmd {
    #[command(flatten)]
    solution: SolutionArgs,
    #[command(flatten)]
    spectral: SpectralArgs,
}

#[derive(Args, Serialize)]
struct EvolveCmd {
    #[command(flatten)]
    solution: SolutionArgs,
    /// Scaling of the stationary solution in the initial data.
    #[arg(long)]
    lambda: f64,
    #[command(flatten)]
    controls: ControlArgs,
}

#[derive(Args, Serialize)]
struct ScanCmd {
    #[command(flatten)]
    solution: SolutionArgs,
    /// Comma-separated lambda values.
    #[arg(long)]
    lambdas: String,
    #[command(flatten)]
    controls: ControlArgs,
}

#[derive(Args, Serialize)]
struct AsymptoticsCmd {
    /// Number of nodal regions K >= 1.
    #[arg(long, short)]
    k: usize,
    /// Comma-separated exponent list.
    #[arg(long, default_value = "20,50,100,200")]
    p_list: String,
    #[arg(long, default_value_t = 2001)]
    nodes: usize,
    #[command(flatten)]
    spectral: SpectralArgs,
    #[arg(long, default_value_t = 8.0)]
    profile_radius: f64,
    #[arg(long, default_value_t = 1601)]
    profile_nodes: usize,
    #[arg(long, default_value_t = 5.0)]
    compare_radius: f64,
}

#[derive(Args, Serialize)]
struct VerifyCmd {
    /// Comma-separated criterion ids; default runs all of them.
    #[arg(long)]
    only: Option<String>,
}

enum AppError {
    Invalid(String),
    Runtime(String),
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AppError::Invalid(msg) | AppError::Runtime(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<nodalheat::Error> for AppError {
    fn from(err: nodalheat::Error) -> Self {
        match err {
            nodalheat::Error::InvalidArgument(_) => AppError::Invalid(err.to_string()),
            _ => AppError::Runtime(err.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(err: std::io::Error) -> Self {
        AppError::Runtime(format!("io error: {err}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(AppError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

struct Context {
    out_dir: PathBuf,
    cache_dir: PathBuf,
}

impl Context {
    fn cached_solution(&self, args: &SolutionArgs) -> Result<StationarySolution, AppError> {
        let key = CacheKey::new("stationary")
            .with_float("p", args.p)
            .with_int("k", args.k as u64)
            .with_int("nodes", args.nodes as u64)
            .with_float("outer_radius", 1.0);
        if let Some(sol) = cache::load(&self.cache_dir, &key) {
            eprintln!("cache hit: stationary p={} K={}", args.p, args.k);
            return Ok(sol);
        }
        let grid = RadialGrid::uniform(args.nodes, 1.0)?;
        let sol = nodalheat::stationary_solution(args.p, args.k, &grid)?;
        cache::store(&self.cache_dir, &key, &sol)?;
        Ok(sol)
    }

    fn cached_limit_pair(&self, spectral: &SpectralArgs) -> Result<EigenPair, AppError> {
        let key = CacheKey::new("limit-eigenpair")
            .with_float("radius", spectral.radius)
            .with_int("nodes", spectral.spectral_nodes as u64);
        if let Some(pair) = cache::load(&self.cache_dir, &key) {
            eprintln!("cache hit: limit eigenpair R={}", spectral.radius);
            return Ok(pair);
        }
        let pair = spectral::limit_eigenpair(spectral.radius, spectral.spectral_nodes)?;
        cache::store(&self.cache_dir, &key, &pair)?;
        Ok(pair)
    }

    fn cached_linearized_pair(
        &self,
        sol: &StationarySolution,
        spectral_args: &SpectralArgs,
    ) -> Result<EigenPair, AppError> {
        let key = CacheKey::new("linearized-eigenpair")
            .with_float("p", sol.p())
            .with_int("k", sol.nodal_regions() as u64)
            .with_float("radius", spectral_args.radius)
            .with_int("nodes", spectral_args.spectral_nodes as u64);
        if let Some(pair) = cache::load(&self.cache_dir, &key) {
            eprintln!(
                "cache hit: linearized eigenpair p={} K={}",
                sol.p(),
                sol.nodal_regions()
            );
            return Ok(pair);
        }
        let pair = spectral::lane_emden_eigenpair(
            sol,
            spectral_args.radius,
            spectral_args.spectral_nodes,
        )?;
        cache::store(&self.cache_dir, &key, &pair)?;
        Ok(pair)
    }
}

fn run(cli: Cli) -> Result<u8, AppError> {
    let cache_dir = cli
        .cache_dir
        .or_else(|| std::env::var_os("NODALHEAT_CACHE").map(PathBuf::from))
        .unwrap_or_else(|| cli.out_dir.join("cache"));
    let ctx = Context {
        out_dir: cli.out_dir,
        cache_dir,
    };
    match cli.command {
        Command::Stationary(cmd) => stationary(&ctx, cmd),
        Command::Spectrum(cmd) => spectrum(&ctx, cmd),
        Command::Liouville(cmd) => liouville_cmd(&ctx, cmd),
        Command::Energy(cmd) => energy(&ctx, cmd),
        Command::Signtest(cmd) => signtest(&ctx, cmd),
        Command::Evolve(cmd) => evolve(&ctx, cmd),
        Command::Scan(cmd) => scan(&ctx, cmd),
        Command::Asymptotics(cmd) => asymptotics(&ctx, cmd),
        Command::Verify(cmd) => verify(&ctx, cmd),
    }
}

fn parse_float_list(text: &str, what: &str) -> Result<Vec<f64>, AppError> {
    let values: Result<Vec<f64>, _> = text
        .split(',')
        .map(|piece| piece.trim().parse::<f64>())
        .collect();
    match values {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(AppError::Invalid(format!(
            "could not parse {what} list {text:?}; expected comma-separated numbers"
        ))),
    }
}

fn tag(p: f64, k: usize) -> String {
    format!("p{p}-K{k}")
}

fn stationary(ctx: &Context, cmd: StationaryCmd) -> Result<u8, AppError> {
    let sol = ctx.cached_solution(&cmd.solution)?;
    let name = format!("stationary-{}", tag(sol.p(), sol.nodal_regions()));
    report::write_csv(
        &ctx.out_dir,
        &name,
        "r,u",
        sol.grid()
            .nodes()
            .iter()
            .zip(sol.values())
            .map(|(&r, &u)| vec![r, u]),
    )?;

    #[derive(Serialize)]
    struct Results {
        amplitude: f64,
        epsilon: f64,
        rescaled_radius: f64,
        nodal_radii: Vec<f64>,
        local_maxima: Vec<f64>,
        dirichlet_integral: f64,
        lp1_integral: f64,
    }
    report::emit_summary(
        &ctx.out_dir,
        &name,
        &Summary {
            schema_version: cache::SCHEMA_VERSION,
            command: "stationary",
            config: &cmd,
            results: Results {
                amplitude: sol.amplitude(),
                epsilon: sol.epsilon(),
                rescaled_radius: sol.rescaled_radius(),
                nodal_radii: sol.nodal_radii().to_vec(),
                local_maxima: sol.local_maxima().to_vec(),
                dirichlet_integral: sol.dirichlet_integral(),
                lp1_integral: sol.lp1_integral(),
            },
        },
    )?;
    Ok(0)
}

fn spectrum(ctx: &Context, cmd: SpectrumCmd) -> Result<u8, AppError> {
    #[derive(Serialize)]
    struct Results {
        eigenvalue: f64,
        rescaled_eigenvalue: Option<f64>,
        epsilon: Option<f64>,
        residual: f64,
    }
    if cmd.limit {
        let pair = ctx.cached_limit_pair(&cmd.spectral)?;
        let name = format!("spectrum-limit-R{}", cmd.spectral.radius);
        report::write_csv(
            &ctx.out_dir,
            &name,
            "r,phi",
            pair.grid
                .nodes()
                .iter()
                .zip(&pair.eigenfunction)
                .map(|(&r, &phi)| vec![r, phi]),
        )?;
        report::emit_summary(
            &ctx.out_dir,
            &name,
            &Summary {
                schema_version: cache::SCHEMA_VERSION,
                command: "spectrum",
                config: &cmd,
                results: Results {
                    eigenvalue: pair.eigenvalue,
                    rescaled_eigenvalue: None,
                    epsilon: None,
                    residual: pair.residual,
                },
            },
        )?;
        return Ok(0);
    }
    let solution = SolutionArgs {
        p: cmd.p.expect("clap enforces presence"),
        k: cmd.k.expect("clap enforces presence"),
        nodes: cmd.nodes,
    };
    let sol = ctx.cached_solution(&solution)?;
    let pair = ctx.cached_linearized_pair(&sol, &cmd.spectral)?;
    let name = format!("spectrum-{}", tag(sol.p(), sol.nodal_regions()));
    report::write_csv(
        &ctx.out_dir,
        &name,
        "r,phi",
        pair.grid
            .nodes()
            .iter()
            .zip(&pair.eigenfunction)
            .map(|(&r, &phi)| vec![r, phi]),
    )?;
    report::emit_summary(
        &ctx.out_dir,
        &name,
        &Summary {
            schema_version: cache::SCHEMA_VERSION,
            command: "spectrum",
            config: &cmd,
            results: Results {
                eigenvalue: pair.eigenvalue,
                rescaled_eigenvalue: Some(spectral::rescaled_eigenvalue(&sol, &pair)),
                epsilon: Some(sol.epsilon()),
                residual: pair.residual,
            },
        },
    )?;
    Ok(0)
}

fn liouville_cmd(ctx: &Context, cmd: LiouvilleCmd) -> Result<u8, AppError> {
    let sol = ctx.cached_solution(&cmd.solution)?;
    let radius = cmd.profile_radius.min(sol.rescaled_radius());
    let grid = RadialGrid::uniform(cmd.profile_nodes, radius)?;
    let profile = liouville::rescaled_profile(&sol, &grid)?;
    let derivative = liouville::rescaled_profile_derivative(&sol, &grid)?;
    let potential = liouville::potential_profile(&sol, &grid)?;
    let gaps = liouville::c1loc_distance(&profile, cmd.compare_radius.min(radius))?;

    let name = format!("liouville-{}", tag(sol.p(), sol.nodal_regions()));
    report::write_csv(
        &ctx.out_dir,
        &name,
        "y,z_p,dz_p,v_p,z_star,e_z_star",
        grid.nodes().iter().enumerate().map(|(i, &y)| {
            vec![
                y,
                profile.values()[i],
                derivative[i],
                potential.values()[i],
                liouville::z_star(y),
                liouville::e_z_star(y),
            ]
        }),
    )?;

    #[derive(Serialize)]
    struct Results {
        sup_value_gap: f64,
        sup_derivative_gap: f64,
        compare_radius: f64,
        profile_radius: f64,
        rescaled_radius: f64,
    }
    report::emit_summary(
        &ctx.out_dir,
        &name,
        &Summary {
            schema_version: cache::SCHEMA_VERSION,
            command: "liouville",
            config: &cmd,
            results: Results {
                sup_value_gap: gaps.sup_value_gap,
                sup_derivative_gap: gaps.sup_derivative_gap,
                compare_radius: cmd.compare_radius.min(radius),
                profile_radius: radius,
                rescaled_radius: sol.rescaled_radius(),
            },
        },
    )?;
    Ok(0)
}

fn energy(ctx: &Context, cmd: EnergyCmd) -> Result<u8, AppError> {
    let sol = ctx.cached_solution(&cmd.solution)?;
    let report_values = analysis::energy(&sol);
    let name = format!("energy-{}", tag(sol.p(), sol.nodal_regions()));
    report::emit_summary(
        &ctx.out_dir,
        &name,
        &Summary {
            schema_version: cache::SCHEMA_VERSION,
            command: "energy",
            config: &cmd,
            results: report_values,
        },
    )?;
    Ok(0)
}

fn signtest(ctx: &Context, cmd: SigntestCmd) -> Result<u8, AppError> {
    let sol = ctx.cached_solution(&cmd.solution)?;
    let pair = ctx.cached_linearized_pair(&sol, &cmd.spectral)?;
    let limit = ctx.cached_limit_pair(&cmd.spectral)?;
    let report_values = analysis::sign_test(&sol, &pair, &limit)?;
    let name = format!("signtest-{}", tag(sol.p(), sol.nodal_regions()));
    report::emit_summary(
        &ctx.out_dir,
        &name,
        &Summary {
            schema_version: cache::SCHEMA_VERSION,
            command: "signtest",
            config: &cmd,
            results: report_values,
        },
    )?;
    Ok(0)
}

#[derive(Serialize)]
struct OutcomeSummary {
    lambda: f64,
    classification: Classification,
    final_time: f64,
    blowup_time_estimate: Option<f64>,
    trace_samples: usize,
}

impl From<&EvolutionOutcome> for OutcomeSummary {
    fn from(outcome: &EvolutionOutcome) -> Self {
        OutcomeSummary {
            lambda: outcome.lambda,
            classification: outcome.classification,
            final_time: outcome.final_time,
            blowup_time_estimate: outcome.blowup_time_estimate,
            trace_samples: outcome.supnorm_trace.len(),
        }
    }
}

fn evolve(ctx: &Context, cmd: EvolveCmd) -> Result<u8, AppError> {
    let sol = ctx.cached_solution(&cmd.solution)?;
    let outcome = evolution::evolve_classify(&sol, cmd.lambda, &cmd.controls.into())?;
    let name = format!(
        "evolve-{}-lambda{}",
        tag(sol.p(), sol.nodal_regions()),
        cmd.lambda
    );
    report::write_csv(
        &ctx.out_dir,
        &name,
        "t,supnorm",
        outcome.supnorm_trace.iter().map(|&(t, v)| vec![t, v]),
    )?;
    report::emit_summary(
        &ctx.out_dir,
        &name,
        &Summary {
            schema_version: cache::SCHEMA_VERSION,
            command: "evolve",
            config: &cmd,
            results: OutcomeSummary::from(&outcome),
        },
    )?;
    Ok(0)
}

fn scan(ctx: &Context, cmd: ScanCmd) -> Result<u8, AppError> {
    let lambdas = parse_float_list(&cmd.lambdas, "lambda")?;
    let sol = ctx.cached_solution(&cmd.solution)?;
    let outcomes = evolution::lambda_scan(&sol, &lambdas, &cmd.controls.into())?;

    let name = format!("scan-{}", tag(sol.p(), sol.nodal_regions()));
    report::write_csv(
        &ctx.out_dir,
        &name,
        "lambda,classification_code,final_time,blowup_time_estimate",
        outcomes.iter().map(|outcome| {
            let code = match outcome.classification {
                Classification::GlobalDecay => 0.0,
                Classification::Blowup => 1.0,
                Classification::Undecided => 2.0,
            };
            vec![
                outcome.lambda,
                code,
                outcome.final_time,
                outcome.blowup_time_estimate.unwrap_or(f64::NAN),
            ]
        }),
    )?;

    #[derive(Serialize)]
    struct Boundary {
        largest_global_decay: Option<f64>,
        smallest_blowup: Option<f64>,
    }
    let boundary = |side: fn(f64) -> bool| {
        let mut decay: Option<f64> = None;
        let mut blow: Option<f64> = None;
        for outcome in outcomes.iter().filter(|o| side(o.lambda)) {
            match outcome.classification {
                Classification::GlobalDecay => {
                    decay = Some(decay.map_or(outcome.lambda, |d: f64| d.max(outcome.lambda)))
                }
                Classification::Blowup => {
                    blow = Some(blow.map_or(outcome.lambda, |b: f64| b.min(outcome.lambda)))
                }
                Classification::Undecided => {}
            }
        }
        Boundary {
            largest_global_decay: decay,
            smallest_blowup: blow,
        }
    };

    #[derive(Serialize)]
    struct Results {
        outcomes: Vec<OutcomeSummary>,
        boundary_below_one: Boundary,
        boundary_above_one: Boundary,
    }
    report::emit_summary(
        &ctx.out_dir,
        &name,
        &Summary {
            schema_version: cache::SCHEMA_VERSION,
            command: "scan",
            config: &cmd,
            results: Results {
                outcomes: outcomes.iter().map(OutcomeSummary::from).collect(),
                boundary_below_one: boundary(|l| l < 1.0),
                boundary_above_one: boundary(|l| l > 1.0),
            },
        },
    )?;
    Ok(0)
}

fn asymptotics(ctx: &Context, cmd: AsymptoticsCmd) -> Result<u8, AppError> {
    let p_list = parse_float_list(&cmd.p_list, "exponent")?;
    let config = AsymptoticsConfig {
        disk_nodes: cmd.nodes,
        spectral_radius: cmd.spectral.radius,
        spectral_nodes: cmd.spectral.spectral_nodes,
        profile_radius: cmd.profile_radius,
        profile_nodes: cmd.profile_nodes,
        compare_radius: cmd.compare_radius,
    };
    let rows = analysis::asymptotics_table(cmd.k, &p_list, &config)?;
    let name = format!("asymptotics-K{}", cmd.k);
    report::write_csv(
        &ctx.out_dir,
        &name,
        "p,u0,r1_over_eps,m2_over_m1,lambda1,lambda1_rescaled,eigenfunction_l2_gap,z_gap_sup",
        rows.iter().map(|row| {
            vec![
                row.p,
                row.amplitude,
                row.r1_over_eps,
                row.m2_over_m1,
                row.lambda1,
                row.lambda1_rescaled,
                row.eigenfunction_l2_gap,
                row.z_gap_sup,
            ]
        }),
    )?;
    report::emit_summary(
        &ctx.out_dir,
        &name,
        &Summary {
            schema_version: cache::SCHEMA_VERSION,
            command: "asymptotics",
            config: &cmd,
            results: rows,
        },
    )?;
    Ok(0)
}

fn verify(ctx: &Context, cmd: VerifyCmd) -> Result<u8, AppError> {
    let ids: Vec<usize> = match &cmd.only {
        Some(text) => {
            let parsed: Result<Vec<usize>, _> =
                text.split(',').map(|s| s.trim().parse::<usize>()).collect();
            match parsed {
                Ok(ids) if !ids.is_empty() => ids,
                _ => {
                    return Err(AppError::Invalid(format!(
                        "could not parse criterion list {text:?}"
                    )))
                }
            }
        }
        None => (1..=verification::CRITERION_COUNT).collect(),
    };

    let mut reports = Vec::new();
    for id in ids {
        let report = verification::run_criterion(id).map_err(AppError::from)?;
        println!("{}", report.summary_line());
        for line in &report.details {
            println!("    {line}");
        }
        reports.push(report);
    }
    let all_passed = reports.iter().all(|r| r.passed);

    #[derive(Serialize)]
    struct Results {
        all_passed: bool,
        reports: Vec<verification::CriterionReport>,
    }
    let summary = Summary {
        schema_version: cache::SCHEMA_VERSION,
        command: "verify",
        config: &cmd,
        results: Results {
            all_passed,
            reports,
        },
    };
    std::fs::create_dir_all(&ctx.out_dir)?;
    let path = ctx.out_dir.join("verify.json");
    std::fs::write(
        &path,
        serde_json::to_string_pretty(&summary)
            .map_err(|e| AppError::Runtime(format!("could not serialize verify report: {e}")))?,
    )?;
    eprintln!("wrote {}", path.display());
    Ok(if all_passed { 0 } else { 2 })
}
