use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rarevel::io::{
    compare_flux, generate_grid, read_flux_csv, write_outputs, CoordinateKind, GridSection, InitSpec, RunConfig,
    SolveJob,
};
use rarevel::kinetic::{GasModel, PrimitiveState};
use rarevel::solver::SpaceMesh2D;
use rarevel::surrogate::CylinderSurrogate;
use rarevel::velocity::{rankine_hugoniot_fields, read_grid, write_grid, MacroField, QuadratureMode};
use rarevel::{Error, ErrorKind};

const EXIT_INPUT: u8 = 2;
const EXIT_NONCONVERGED: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;
/// `flux-compare` above its tolerance.
const EXIT_ABOVE_TOL: u8 = 1;

#[derive(Parser)]
#[command(
    name = "rarevel",
    version,
    about = "Adaptive velocity grids and a steady BGK solver for rarefied flows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a velocity grid from a macroscopic field.
    Gridgen(GridgenArgs),
    /// Run a steady solve from a configuration file.
    Solve(SolveArgs),
    /// Compare two wall heat-flux profiles.
    FluxCompare(FluxCompareArgs),
    /// Write a space mesh, optionally with the analytic cylinder field on it.
    MeshGen(MeshGenArgs),
    /// Print a summary of a grid, field, mesh or configuration file.
    Info(InfoArgs),
}

#[derive(Args)]
struct GridgenArgs {
    /// Macroscopic field file.
    #[arg(
        long,
        conflicts_with = "rankine_hugoniot",
        required_unless_present = "rankine_hugoniot"
    )]
    fields: Option<PathBuf>,
    /// Use the upstream, post-shock and wall states instead of a field file.
    #[arg(long)]
    rankine_hugoniot: bool,
    /// Upstream density, kg/m^3.
    #[arg(long, default_value_t = 3.17e-6)]
    rho: f64,
    /// Upstream temperature, K.
    #[arg(long = "temperature", default_value_t = 242.4)]
    temperature: f64,
    /// Upstream Mach number (overrides --speed).
    #[arg(long)]
    mach: Option<f64>,
    /// Upstream speed along x, m/s.
    #[arg(long, default_value_t = 5810.0)]
    speed: f64,
    /// Wall temperature of the three-state estimate, K.
    #[arg(long, default_value_t = 293.0)]
    wall_temperature: f64,
    /// Gas and grid sections are taken from this run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long, value_parser = parse_mode)]
    mode: Option<QuadratureMode>,
    /// Mirror the grid about v_k = 0.
    #[arg(long)]
    symmetry_axis: Option<usize>,
    #[arg(long)]
    extend_for_p0: bool,
    /// Axisymmetric (v_x, zeta, omega) grid.
    #[arg(long)]
    cylindrical: bool,
    #[arg(long)]
    n_omega: Option<usize>,
    /// Wall temperature entering the support function, K.
    #[arg(long)]
    support_wall_t: Option<f64>,
    #[arg(long)]
    max_level: Option<u32>,
    /// Write the uniform fine grid instead of the adaptive one.
    #[arg(long)]
    uniform: bool,
    /// Output grid file (defaults to `grid.file` of the configuration).
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum InitChoice {
    Upstream,
    MacroFile,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    config: PathBuf,
    /// Velocity grid file (defaults to the one named in the configuration).
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long, value_enum)]
    init: Option<InitChoice>,
    /// Field file for `--init macro-file` (defaults to the configured one).
    #[arg(long)]
    macro_file: Option<PathBuf>,
    /// Output directory (overrides the configuration).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct FluxCompareArgs {
    /// Reference profile.
    reference: PathBuf,
    other: PathBuf,
    /// Fail when the maximum relative difference exceeds this value.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum MeshKind {
    /// Polar sector around a circular body at the origin.
    Annulus {
        #[arg(long, default_value_t = 0.1)]
        r_inner: f64,
        #[arg(long, default_value_t = 0.5)]
        r_outer: f64,
        #[arg(long, default_value_t = 50)]
        ni: usize,
        #[arg(long, default_value_t = 50)]
        nj: usize,
        /// Height of the first wall cell, m.
        #[arg(long)]
        first_cell: Option<f64>,
        #[arg(long, default_value_t = 90.0)]
        sector_deg: f64,
    },
    /// Uniform rectangle; i runs across the channel.
    Channel {
        #[arg(long)]
        length: f64,
        #[arg(long, default_value_t = 0.0)]
        y0: f64,
        #[arg(long)]
        y1: f64,
        #[arg(long)]
        ni: usize,
        #[arg(long)]
        nj: usize,
    },
}

#[derive(Args)]
struct MeshGenArgs {
    #[command(subcommand)]
    kind: MeshKind,
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    /// Also write the analytic cylinder field sampled on the mesh.
    #[arg(long, global = true)]
    surrogate_fields: Option<PathBuf>,
    /// JSON file overriding the surrogate parameters.
    #[arg(long, global = true)]
    surrogate_params: Option<PathBuf>,
}

#[derive(Args)]
struct InfoArgs {
    path: PathBuf,
}

fn parse_mode(s: &str) -> Result<QuadratureMode, String> {
    s.parse()
}

fn read_text(path: &Path) -> rarevel::Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> rarevel::Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn gridgen(args: GridgenArgs) -> rarevel::Result<u8> {
    let (gas, mut section) = match &args.config {
        Some(p) => {
            let cfg = RunConfig::load(p)?;
            (cfg.gas, cfg.grid)
        }
        None => (GasModel::argon(2), GridSection::default()),
    };
    let output = args.output.clone().or_else(|| section.file.clone()).ok_or_else(|| {
        Error::Validation("no output grid file: give --output or grid.file in the configuration".into())
    })?;
    if let Some(c) = args.c {
        section.c = c;
    }
    if let Some(a) = args.a {
        section.a = a;
    }
    if let Some(m) = args.mode {
        section.mode = m;
    }
    if args.symmetry_axis.is_some() {
        section.symmetry_axis = args.symmetry_axis;
    }
    section.extend_for_p0 |= args.extend_for_p0;
    if args.cylindrical {
        section.coordinates = CoordinateKind::Cylindrical;
    }
    if let Some(n) = args.n_omega {
        section.n_omega = n;
    }
    if args.support_wall_t.is_some() {
        section.wall_t = args.support_wall_t;
    }
    if let Some(l) = args.max_level {
        section.max_level = l;
    }
    let field = match &args.fields {
        Some(p) => MacroField::load(p)?,
        None => {
            let speed = match args.mach {
                Some(m) => m * gas.sound_speed(args.temperature),
                None => args.speed,
            };
            let up = PrimitiveState::new(args.rho, [speed, 0.0, 0.0], args.temperature);
            rankine_hugoniot_fields(&up, args.wall_temperature, &gas)?
        }
    };
    let generated = generate_grid(&field, &gas, &section, args.uniform)?;
    write_grid(&generated.grid, &output)?;
    println!("{}", generated.summary);
    println!("{:<22}{:>14}", "written", output.display());
    Ok(0)
}

fn solve(args: SolveArgs) -> rarevel::Result<u8> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(d) = args.out_dir {
        config.output.dir = d;
    }
    let init = match (args.init, args.macro_file) {
        (Some(InitChoice::Upstream), _) => Some(InitSpec::Upstream),
        (Some(InitChoice::MacroFile), Some(p)) | (None, Some(p)) => Some(InitSpec::MacroFile(p)),
        (Some(InitChoice::MacroFile), None) => match &config.case.init {
            InitSpec::MacroFile(_) => None,
            InitSpec::Upstream => {
                return Err(Error::Validation(
                    "--init macro-file needs --macro-file or a configured field".into(),
                ))
            }
        },
        (None, None) => None,
    };
    let job = SolveJob::prepare(config, args.grid.as_deref(), init)?;
    let config = job.config.clone();
    let nq = job.quadrature.len();
    let report = job.run()?;
    let written = write_outputs(&report, &config)?;
    let last = report.residual_history.last().map_or(f64::NAN, |r| r.residual);
    println!("velocity points    {nq}");
    println!("iterations         {}", report.iterations);
    println!("converged          {}", report.converged);
    println!("final residual     {last:.3e}");
    println!("wall time (s)      {:.2}", report.wall_seconds);
    println!("negative f (max)   {}", report.max_negative_f);
    if let Some(q) = report.wall_flux.iter().map(|w| w.q_n).reduce(f64::max) {
        println!("peak wall flux     {q:.4e} W/m^2");
    }
    for p in written {
        println!("written            {}", p.display());
    }
    Ok(if report.converged { 0 } else { EXIT_NONCONVERGED })
}

fn flux_compare(args: FluxCompareArgs) -> rarevel::Result<u8> {
    let a = read_flux_csv(&args.reference)?;
    let b = read_flux_csv(&args.other)?;
    let c = compare_flux(&a, &b)?;
    println!("samples            {}", c.samples);
    println!("max relative diff  {:.4}%", 100.0 * c.max_rel);
    println!("L2 relative diff   {:.4}%", 100.0 * c.l2_rel);
    Ok(match args.tol {
        Some(t) if c.max_rel.is_nan() || c.max_rel > t => EXIT_ABOVE_TOL,
        _ => 0,
    })
}

fn mesh_gen(args: MeshGenArgs) -> rarevel::Result<u8> {
    let (mesh, note) = match args.kind {
        MeshKind::Annulus {
            r_inner,
            r_outer,
            ni,
            nj,
            first_cell,
            sector_deg,
        } => (
            SpaceMesh2D::annulus_sector(r_inner, r_outer, ni, nj, first_cell, sector_deg)?,
            format!(
                "mesh annulus_sector r_inner {r_inner} r_outer {r_outer} ni {ni} nj {nj} first_cell {} sector_deg {sector_deg}",
                first_cell.map_or("uniform".to_string(), |h| h.to_string())
            ),
        ),
        MeshKind::Channel { length, y0, y1, ni, nj } => (
            SpaceMesh2D::channel(length, y0, y1, ni, nj)?,
            format!("mesh channel length {length} y0 {y0} y1 {y1} ni {ni} nj {nj}"),
        ),
    };
    if args.output.is_none() && args.surrogate_fields.is_none() {
        return Err(Error::Validation(
            "nothing to write: give --output and/or --surrogate-fields".into(),
        ));
    }
    if let Some(p) = &args.output {
        mesh.save(p)?;
        println!("mesh {} x {} cells written to {}", mesh.ni, mesh.nj, p.display());
    }
    if let Some(p) = &args.surrogate_fields {
        let surrogate: CylinderSurrogate = match &args.surrogate_params {
            Some(sp) => serde_json::from_str(&read_text(sp)?).map_err(|source| Error::Json {
                path: sp.clone(),
                source,
            })?,
            None => CylinderSurrogate::default(),
        };
        let gas = GasModel::argon(2);
        let field = surrogate.field_on(&mesh, &gas)?;
        write_text(p, &surrogate.annotated_text(&field, &note))?;
        println!("surrogate field written to {}", p.display());
    }
    Ok(0)
}

fn print_field(field: &MacroField) {
    let e = field.extrema();
    println!("kind               macroscopic field");
    println!("dims               {:?}", field.dims);
    println!("cells              {}", field.len());
    println!("rho (kg/m^3)       {:.6e} .. {:.6e}", e.rho.0, e.rho.1);
    for (k, (lo, hi)) in e.u.iter().enumerate() {
        println!("u_{k} (m/s)          {lo:.6e} .. {hi:.6e}");
    }
    println!("T (K)              {:.6e} .. {:.6e}", e.t.0, e.t.1);
}

fn info(args: InfoArgs) -> rarevel::Result<u8> {
    let text = read_text(&args.path)?;
    let head = text.trim_start();
    if head.starts_with('{') {
        if text.contains("\"leaves\"") {
            let g = read_grid(&args.path)?;
            let (lo, hi) = g.edge_range();
            println!("kind               velocity grid");
            println!("coordinates        {:?}", g.coordinate_system);
            println!("mode               {:?}", g.mode);
            println!("points             {}", g.len());
            println!("leaves             {}", g.leaves.len());
            println!("max level          {}", g.max_level());
            println!("cell size (m/s)    {lo:.4} .. {hi:.4}");
            println!("total weight       {:.6e}", g.weights.iter().sum::<f64>());
            println!("root volume        {:.6e}", g.root_volume());
            println!("symmetry pairing   {}", g.symmetry_pairing.is_some());
        } else {
            let cfg = RunConfig::load(&args.path)?;
            println!("kind               run configuration (schema {})", cfg.schema);
            println!("gas R              {}", cfg.gas.r);
            println!("grid c, a, mode    {}, {}, {:?}", cfg.grid.c, cfg.grid.a, cfg.grid.mode);
            println!("mesh               {:?}", cfg.case.mesh);
            println!("init               {:?}", cfg.case.init);
        }
        return Ok(0);
    }
    let first = head.lines().find(|l| !l.trim_start().starts_with('#')).unwrap_or("");
    if first.trim_start().starts_with("dims") {
        print_field(&MacroField::parse(&text, &args.path)?);
    } else {
        let m = SpaceMesh2D::parse(&text, &args.path)?;
        let (lo, hi) = m
            .volume
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
        println!("kind               space mesh");
        println!("cells              {} x {}", m.ni, m.nj);
        println!("cell area (m^2)    {lo:.4e} .. {hi:.4e}");
        println!("closure defect     {:.3e}", m.closure_defect());
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gridgen(a) => gridgen(a),
        Command::Solve(a) => solve(a),
        Command::FluxCompare(a) => flux_compare(a),
        Command::MeshGen(a) => mesh_gen(a),
        Command::Info(a) => info(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.kind() {
                ErrorKind::Input => EXIT_INPUT,
                ErrorKind::NonConvergence => EXIT_NONCONVERGED,
                ErrorKind::Numerical => EXIT_NUMERICAL,
            })
        }
    }
}
