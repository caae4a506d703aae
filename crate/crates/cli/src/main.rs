use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use teichcount::cocycle::{
    builtin_catalog, catalog_matrices, parse_catalog, singular_value_report, CatalogEntry,
};
use teichcount::dehn_thurston::{
    count_e, kerckhoff_distance, lambda_sequence, probe_set, twist_orbit_count, MarkedPoint,
};
use teichcount::delaunay::{check_delaunay_lemma, delaunayize_with};
use teichcount::jacobians::{verify, JacobianError, VerifySettings};
use teichcount::surface::io::{from_json, to_json};
use teichcount::surgery::{open_up, plan_step};
use teichcount::{stats, FlatSurface, RunConfig};

#[derive(Parser)]
#[command(
    name = "teichcount",
    version,
    about = "Flat surfaces, multicurve counts and Jacobian checks"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    tol_incircle: Option<f64>,
    #[arg(long, global = true)]
    tol_quad: Option<f64>,
    #[arg(long, global = true)]
    fd_step: Option<f64>,
    #[arg(long, global = true)]
    epsilon0: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Surface files: validation, geodesic flow, systole.
    #[command(subcommand)]
    Surface(SurfaceCmd),
    /// Edge-flip Delaunay triangulation and the short-connection check.
    #[command(subcommand)]
    Delaunay(DelaunayCmd),
    /// Mapping-class matrices and flow singular values.
    #[command(subcommand)]
    Cocycle(CocycleCmd),
    /// Multicurve counts E(y, L).
    Count(CountArgs),
    /// Normalized counts E(y, L) / L^{6g−6} along doubling L.
    Lambda(LambdaArgs),
    /// Kerckhoff distance surrogate between two marked points.
    Distance(DistanceArgs),
    /// Twist-orbit counts in balls of radius R.
    TwistOrbit(TwistArgs),
    /// Transverse multicurves and systole surgery.
    #[command(subcommand)]
    Surgery(SurgeryCmd),
    /// Jacobian identities and bounds for zero configurations.
    JacobianVerify(JacobianArgs),
}

#[derive(Subcommand)]
enum SurfaceCmd {
    Validate {
        file: PathBuf,
    },
    Flow {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Saddle connections up to `factor` times the systole, shortest first.
    Systole {
        file: PathBuf,
        #[arg(long, default_value_t = 1.5)]
        factor: f64,
    },
}

#[derive(Subcommand)]
enum DelaunayCmd {
    /// Flip to a Delaunay triangulation; `--out` receives the surface.
    Check { file: PathBuf },
    /// Every saddle connection shorter than √2 times the systole must be an edge.
    Lemma {
        file: PathBuf,
        /// Check the triangulation as given instead of flipping first.
        #[arg(long)]
        as_is: bool,
    },
}

#[derive(Subcommand)]
enum CocycleCmd {
    Matrix {
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    Svd {
        #[arg(long)]
        catalog: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
        t: Vec<f64>,
    },
}

#[derive(Args)]
struct PointArgs {
    /// Marked point file {genus, s, label}.
    #[arg(long, conflicts_with_all = ["genus", "s"])]
    point: Option<PathBuf>,
    #[arg(long)]
    genus: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<f64>>,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    point: PointArgs,
    /// Largest L; rows for L/8, L/4, L/2, L. A list is used as given.
    #[arg(long = "L", value_delimiter = ',')]
    l: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
}

#[derive(Args)]
struct LambdaArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long = "L")]
    l: f64,
    #[arg(long, default_value_t = 4)]
    steps: usize,
}

#[derive(Args)]
struct DistanceArgs {
    #[arg(long)]
    genus: usize,
    #[arg(long, value_delimiter = ',')]
    x: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    y: Vec<f64>,
    #[arg(long = "L", default_value_t = 8.0)]
    l: f64,
}

#[derive(Args)]
struct TwistArgs {
    #[arg(long)]
    genus: usize,
    #[arg(long, value_delimiter = ',')]
    x: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    y: Vec<f64>,
    #[arg(long = "R", value_delimiter = ',', default_values_t = [1.0, 2.0, 3.0])]
    r: Vec<f64>,
    #[arg(long, default_value_t = 2.0)]
    probe_l: f64,
}

#[derive(Subcommand)]
enum SurgeryCmd {
    /// Plan one step: short edges, transverse multicurve, crossing counts.
    Multicurve { file: PathBuf },
    OpenUp {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long)]
        epsilon: f64,
        /// Per-step CSV log.
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

#[derive(Args)]
struct JacobianArgs {
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = 200)]
    samples: usize,
}

/// Failure classes and their exit codes.
#[derive(Debug)]
enum Failure {
    Input(anyhow::Error),
    Invariant(String),
    Numeric(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

type Run = Result<(), Failure>;

fn sci(v: f64) -> String {
    format!("{v:.6e}")
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_surface(path: &Path) -> anyhow::Result<FlatSurface> {
    from_json(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn check(ok: bool, what: &str) -> Run {
    if ok {
        Ok(())
    } else {
        Err(Failure::Invariant(what.to_string()))
    }
}

fn run_config(g: &Global) -> anyhow::Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| {
            anyhow!(
                "{}: line {}, column {}: {e}",
                p.display(),
                e.line(),
                e.column()
            )
        })?,
        None => RunConfig::default(),
    };
    if let Some(v) = g.seed {
        cfg.seed = v;
    }
    if let Some(v) = g.jobs {
        cfg.jobs = v;
    }
    if let Some(v) = g.tol_incircle {
        cfg.tol_incircle = v;
    }
    if let Some(v) = g.tol_quad {
        cfg.tol_quad = v;
    }
    if let Some(v) = g.fd_step {
        cfg.fd_step = v;
    }
    if let Some(v) = g.epsilon0 {
        cfg.epsilon0 = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn marked_point(p: &PointArgs) -> anyhow::Result<MarkedPoint> {
    let y = match (&p.point, p.genus, &p.s) {
        (Some(path), _, _) => serde_json::from_str::<MarkedPoint>(&read(path)?).map_err(|e| {
            anyhow!(
                "{}: line {}, column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            )
        })?,
        (None, Some(genus), Some(s)) => MarkedPoint::new(genus, s.clone())?,
        _ => return Err(anyhow!("give --point or both --genus and --s")),
    };
    y.validate()?;
    Ok(y)
}

fn catalog(path: &Option<PathBuf>) -> anyhow::Result<Vec<CatalogEntry>> {
    Ok(match path {
        Some(p) => parse_catalog(&read(p)?).with_context(|| format!("in {}", p.display()))?,
        None => builtin_catalog(),
    })
}

fn surface_cmd(cmd: SurfaceCmd, out: &Option<PathBuf>) -> Run {
    match cmd {
        SurfaceCmd::Validate { file } => {
            let s = read_surface(&file)?;
            let text = format!(
                "kind {:?}\ngenus {}\narea {}\nvertices {}\ntriangles {}\n",
                s.kind(),
                s.genus(),
                sci(s.area()),
                s.num_vertices(),
                s.num_triangles()
            );
            emit(out, &text.to_lowercase())?;
        }
        SurfaceCmd::Flow { file, t } => {
            emit(
                out,
                &(to_json(&read_surface(&file)?.geodesic_flow(t)) + "\n"),
            )?;
        }
        SurfaceCmd::Systole { file, factor } => {
            let s = read_surface(&file)?;
            let mut text = String::from("length,x,y,is_edge\n");
            for c in s.saddle_connections(factor.max(1.0) * s.systole() * (1.0 + 1e-12)) {
                let _ = writeln!(
                    text,
                    "{},{},{},{}",
                    sci(c.length),
                    sci(c.holonomy.x),
                    sci(c.holonomy.y),
                    c.edge.is_some()
                );
            }
            emit(out, &text)?;
        }
    }
    Ok(())
}

fn delaunay_cmd(cmd: DelaunayCmd, cfg: &RunConfig, out: &Option<PathBuf>) -> Run {
    match cmd {
        DelaunayCmd::Check { file } => {
            let log = delaunayize_with(&read_surface(&file)?, cfg.tol_incircle)
                .map_err(|e| Failure::Numeric(e.to_string()))?;
            match out {
                Some(_) => emit(out, &(to_json(&log.surface) + "\n"))?,
                None => println!(
                    "flips {}\ncircumradius_sum {}",
                    log.flips,
                    sci(*log.trace.last().unwrap_or(&0.0))
                ),
            }
        }
        DelaunayCmd::Lemma { file, as_is } => {
            let s = read_surface(&file)?;
            let s = if as_is {
                s
            } else {
                delaunayize_with(&s, cfg.tol_incircle)
                    .map_err(|e| Failure::Numeric(e.to_string()))?
                    .surface
            };
            let r = check_delaunay_lemma(&s);
            emit(out, &json(&r))?;
            check(r.pass, "a short saddle connection is not an edge")?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct MatrixRow<'a> {
    surface_id: &'a str,
    linear_part: [[i64; 2]; 2],
    matrix: &'a [Vec<i64>],
    form: &'a [Vec<i64>],
    symplectic: bool,
    det: i128,
}

fn cocycle_cmd(cmd: CocycleCmd, out: &Option<PathBuf>) -> Run {
    match cmd {
        CocycleCmd::Matrix { catalog: path } => {
            let entries = catalog(&path)?;
            let mats = catalog_matrices(&entries).map_err(anyhow::Error::from)?;
            let rows: Vec<MatrixRow> = entries
                .iter()
                .zip(&mats)
                .map(|(e, c)| MatrixRow {
                    surface_id: &e.surface_id,
                    linear_part: e.linear_part,
                    matrix: &c.matrix,
                    form: &c.form,
                    symplectic: c.is_symplectic(),
                    det: c.det(),
                })
                .collect();
            emit(out, &json(&rows))?;
            check(
                rows.iter().all(|r| r.symplectic),
                "a matrix is not symplectic",
            )?;
        }
        CocycleCmd::Svd { catalog: path, t } => {
            let entries = catalog(&path)?;
            let mats = catalog_matrices(&entries).map_err(anyhow::Error::from)?;
            let mut text = String::from("index,surface_id,t,product,pairing_error,pass\n");
            let mut ok = true;
            for (i, (e, c)) in entries.iter().zip(&mats).enumerate() {
                for &tf in &t {
                    let r = singular_value_report(&c.matrix, tf);
                    ok &= r.pass;
                    let _ = writeln!(
                        text,
                        "{i},{},{},{},{},{}",
                        e.surface_id,
                        sci(tf),
                        sci(r.product),
                        sci(r.pairing_error),
                        r.pass
                    );
                }
            }
            emit(out, &text)?;
            check(ok, "singular values do not pair")?;
        }
    }
    Ok(())
}

fn count_cmd(a: CountArgs, cfg: &RunConfig, out: &Option<PathBuf>) -> Run {
    let y = marked_point(&a.point)?;
    let ls: Vec<f64> = match a.l.as_slice() {
        [] => return Err(anyhow!("--L is required").into()),
        [l] => [8.0, 4.0, 2.0, 1.0].iter().map(|d| l / d).collect(),
        many => many.to_vec(),
    };
    if ls.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(anyhow!("--L values must be positive").into());
    }
    let rows: Vec<_> = ls
        .iter()
        .map(|&l| count_e(&y, l, cfg.epsilon0, a.c))
        .collect();
    let mut text = String::from("L,E,G,bound,ratio\n");
    for r in &rows {
        let _ = writeln!(
            text,
            "{},{},{},{},{}",
            sci(r.l),
            r.e,
            sci(r.g),
            sci(r.bound),
            sci(r.ratio)
        );
    }
    emit(out, &text)?;
    let positive: Vec<_> = rows.iter().filter(|r| r.e > 0).collect();
    if positive.len() >= 2 {
        let xs: Vec<f64> = positive.iter().map(|r| r.l.ln()).collect();
        let ys: Vec<f64> = positive.iter().map(|r| (r.e as f64).ln()).collect();
        eprintln!(
            "log-log slope {} (6g-6 = {})",
            sci(stats::slope(&xs, &ys)),
            y.dimension()
        );
    }
    let sorted = ls.windows(2).all(|w| w[0] <= w[1]);
    check(
        !sorted || rows.windows(2).all(|w| w[0].e <= w[1].e),
        "E is not monotone in L",
    )
}

fn lambda_cmd(a: LambdaArgs, out: &Option<PathBuf>) -> Run {
    let y = marked_point(&a.point)?;
    let mut text = String::from("L,lambda\n");
    for (l, v) in lambda_sequence(&y, a.l, a.steps) {
        let _ = writeln!(text, "{},{}", sci(l), sci(v));
    }
    emit(out, &text)?;
    Ok(())
}

fn distance_cmd(a: DistanceArgs, out: &Option<PathBuf>) -> Run {
    let x = MarkedPoint::new(a.genus, a.x).map_err(anyhow::Error::from)?;
    let y = MarkedPoint::new(a.genus, a.y).map_err(anyhow::Error::from)?;
    emit(
        out,
        &format!("distance\n{}\n", sci(kerckhoff_distance(&x, &y, a.l))),
    )?;
    Ok(())
}

fn twist_cmd(a: TwistArgs, out: &Option<PathBuf>) -> Run {
    let x = MarkedPoint::new(a.genus, a.x).map_err(anyhow::Error::from)?;
    let y = MarkedPoint::new(a.genus, a.y).map_err(anyhow::Error::from)?;
    let probes = probe_set(&x, a.probe_l);
    let mut text = String::from("R,count,c2,probes\n");
    let mut pts = Vec::new();
    for &r in &a.r {
        let rep = twist_orbit_count(&x, &y, r, &probes);
        let _ = writeln!(
            text,
            "{},{},{},{}",
            sci(r),
            rep.count,
            sci(rep.c2),
            rep.probes
        );
        pts.push((r, (rep.count.max(1) as f64).ln()));
    }
    emit(out, &text)?;
    if pts.len() >= 2 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        eprintln!(
            "log-count slope {} (3g-3 = {})",
            sci(stats::slope(&xs, &ys)),
            x.curves()
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct PlanSummary<'a> {
    systole: f64,
    theta: f64,
    w: &'a [usize],
    n: u32,
    m: u32,
    rho1: f64,
    properties: &'a teichcount::surgery::PropertyReport,
}

fn surgery_cmd(cmd: SurgeryCmd, out: &Option<PathBuf>) -> Run {
    match cmd {
        SurgeryCmd::Multicurve { file } => {
            let p =
                plan_step(&read_surface(&file)?).map_err(|e| Failure::Numeric(e.to_string()))?;
            let summary = PlanSummary {
                systole: p.systole,
                theta: p.theta,
                w: &p.w,
                n: p.n,
                m: p.m,
                rho1: p.rho1,
                properties: &p.properties,
            };
            emit(out, &json(&summary))?;
            check(p.properties.pass, "transverse multicurve properties fail")?;
        }
        SurgeryCmd::OpenUp {
            surface,
            epsilon,
            log,
        } => {
            if !(epsilon > 0.0 && epsilon.is_finite()) {
                return Err(anyhow!("--epsilon must be positive").into());
            }
            let r = open_up(&read_surface(&surface)?, epsilon);
            emit(out, &(to_json(&r.surface) + "\n"))?;
            if let Some(p) = log {
                let mut text = String::from(
                    "step,systole_before,systole_after,rho1,n,m,theta,growth_margin,growth_ok,properties_ok,euclidean_length,cost\n",
                );
                for e in &r.log {
                    let _ = writeln!(
                        text,
                        "{},{},{},{},{},{},{},{},{},{},{},{}",
                        e.step,
                        sci(e.systole_before),
                        sci(e.systole_after),
                        sci(e.rho1),
                        e.n,
                        e.m,
                        sci(e.theta),
                        sci(e.growth_margin),
                        e.growth_ok,
                        e.properties_ok,
                        sci(e.euclidean_length),
                        sci(e.cost)
                    );
                }
                emit(&Some(p), &text)?;
            }
            eprintln!("steps {} kappa {}", r.log.len(), sci(r.kappa));
            if let Some(f) = r.failure {
                return Err(Failure::Numeric(f));
            }
            check(
                r.log.iter().all(|e| e.growth_ok && e.properties_ok),
                "a surgery step violates its checks",
            )?;
        }
    }
    Ok(())
}

fn jacobian_cmd(a: JacobianArgs, cfg: &RunConfig, out: &Option<PathBuf>) -> Run {
    let settings = VerifySettings {
        fd_step: cfg.fd_step,
        tol_quad: cfg.tol_quad,
    };
    let rows = verify(a.m, a.samples, cfg.seed, &settings).map_err(|e| match e {
        JacobianError::Quadrature { .. } | JacobianError::Branch(_) => {
            Failure::Numeric(e.to_string())
        }
        other => Failure::Input(other.into()),
    })?;
    let mut text = String::from("name,max_ratio,mean_rel_err,pass\n");
    for r in &rows {
        let _ = writeln!(
            text,
            "{},{},{},{}",
            r.name,
            sci(r.max_ratio),
            sci(r.mean_rel_err),
            r.pass
        );
    }
    emit(out, &text)?;
    check(rows.iter().all(|r| r.pass), "a Jacobian check fails")
}

fn dispatch(cli: Cli) -> Run {
    let cfg = run_config(&cli.global)?;
    if cfg.jobs > 0 {
        // a pool may already exist in tests that call dispatch twice
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs)
            .build_global();
    }
    let out = &cli.global.out;
    match cli.command {
        Command::Surface(c) => surface_cmd(c, out),
        Command::Delaunay(c) => delaunay_cmd(c, &cfg, out),
        Command::Cocycle(c) => cocycle_cmd(c, out),
        Command::Count(a) => count_cmd(a, &cfg, out),
        Command::Lambda(a) => lambda_cmd(a, out),
        Command::Distance(a) => distance_cmd(a, out),
        Command::TwistOrbit(a) => twist_cmd(a, out),
        Command::Surgery(c) => surgery_cmd(c, out),
        Command::JacobianVerify(a) => jacobian_cmd(a, &cfg, out),
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant failed: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
