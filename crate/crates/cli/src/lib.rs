//! The `gfactor` command line: evaluate, sweep, solve and emit figure data.
//!
//! Exit codes: 0 success (or feasible design), 1 error, 2 infeasible design.

pub mod table;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use gfactor_core::params::{DEFAULT_DATABASE_FILE, DEFAULT_DATABASE_SOURCE};
use gfactor_core::{
    electron_g, gap_to_wavelength, lattice_matched_path, load_database, parse_composition,
    solve_design, sweep_path, AlloyFamily, CompositionPath, DesignProblem, Feasibility,
    MaterialsDatabase, Substrate, SweepRow, SweepTable,
};
use serde_json::json;

use crate::table::Panel;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;

/// Curves drawn by default: the direct-gap edges between the plotted
/// binaries, InP on its own, and two indirect-gap segments.
pub const DEFAULT_FIGURE_PATHS: [&str; 7] = [
    "GaAs..InAs",
    "InAs..InSb",
    "GaSb..InSb",
    "GaAs..GaSb",
    "InP",
    "GaP..AlP",
    "AlAs..AlSb",
];

#[derive(Debug, Parser)]
#[command(
    name = "gfactor",
    version,
    about = "Electron g-factor engineering for III-V alloys"
)]
pub struct Cli {
    /// Parameter file (defaults to the shipped low-temperature database)
    #[arg(long, global = true, value_name = "PATH")]
    pub db: Option<PathBuf>,

    /// Emit structured JSON instead of CSV or text reports
    #[arg(long, global = true)]
    pub json: bool,

    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the g-factor and parameters of one composition
    Eval {
        /// Formula such as InP or Ga0.47In0.53As
        formula: String,
    },
    /// Tabulate a composition path
    Sweep(SweepArgs),
    /// Search a lattice-matched alloy family for a target g-factor
    Solve(SolveArgs),
    /// Emit the data behind the g-factor (A) or band-gap (B) versus lattice-constant chart
    Figure(FigureArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `A..B` between two formulas, or `Family@Substrate`
    pub path: Option<String>,

    /// Lattice-matched alloy family, e.g. InGaAsP
    #[arg(long, requires = "match_substrate", conflicts_with = "path")]
    pub family: Option<String>,

    /// Substrate compound or lattice constant (Å) for --family
    #[arg(long, requires = "family")]
    pub match_substrate: Option<String>,

    #[arg(short = 'n', default_value_t = 101)]
    pub n: usize,

    /// Write the table here instead of stdout
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub family: String,

    /// Compound name or lattice constant in Å
    #[arg(long)]
    pub substrate: String,

    #[arg(long = "g", default_value_t = 0.0, allow_negative_numbers = true)]
    pub g_target: f64,

    #[arg(long = "g-tol")]
    pub g_tol: f64,

    /// Γ-gap window `min:max` in eV
    #[arg(long = "eg")]
    pub eg: String,

    #[arg(long = "lattice-tol", default_value_t = gfactor_core::design::DEFAULT_LATTICE_TOLERANCE)]
    pub lattice_tol: f64,

    #[arg(long, default_value_t = gfactor_core::design::DEFAULT_GRID)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub panel: Panel,

    /// Comma-separated path specs, or `default`
    #[arg(long, default_value = "default")]
    pub paths: String,

    #[arg(short = 'n', default_value_t = 201)]
    pub n: usize,

    /// CSV of experimental points (name,a_angstrom,g_or_eg,source), copied verbatim
    #[arg(long)]
    pub experimental: Option<PathBuf>,

    /// Write one CSV per path into this directory instead of one table on stdout
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

/// Parses arguments and runs a command, returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = write!(err, "{e}");
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => EXIT_ERROR,
            };
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (db, origin) = resolve_database(cli.db.as_deref())?;
    if cli.verbose {
        writeln!(err, "database: {origin}")?;
    }
    match &cli.command {
        Command::Eval { formula } => cmd_eval(formula, &db, cli.json, out),
        Command::Sweep(args) => cmd_sweep(args, &db, cli.json, out),
        Command::Solve(args) => cmd_solve(args, &db, cli.json, out),
        Command::Figure(args) => cmd_figure(args, &db, cli.json, out),
    }
}

/// `--db` if given, else the shipped file in `<exe dir>/data/`, else the
/// copy compiled into the binary.
pub fn resolve_database(explicit: Option<&Path>) -> Result<(MaterialsDatabase, String)> {
    let path = match explicit {
        Some(p) => Some(p.to_path_buf()),
        None => std::env::current_exe()
            .ok()
            .and_then(|exe| {
                exe.parent()
                    .map(|d| d.join("data").join(DEFAULT_DATABASE_FILE))
            })
            .filter(|p| p.is_file()),
    };
    match path {
        Some(p) => {
            let text = fs::read_to_string(&p)
                .with_context(|| format!("reading database {}", p.display()))?;
            let db = load_database(&text).with_context(|| format!("loading {}", p.display()))?;
            Ok((db, p.display().to_string()))
        }
        None => Ok((
            load_database(DEFAULT_DATABASE_SOURCE)?,
            format!("built-in {DEFAULT_DATABASE_FILE}"),
        )),
    }
}

fn cmd_eval(formula: &str, db: &MaterialsDatabase, json: bool, out: &mut dyn Write) -> Result<i32> {
    let comp = parse_composition(formula)?;
    let r = electron_g(&comp, db)?;
    let p = r.params_used;
    let wavelength = gap_to_wavelength(p.eg_gamma)?;
    if json {
        let value = json!({
            "composition": comp,
            "g": r.g,
            "character": r.character,
            "roth_correction": r.roth_correction,
            "params": p,
            "eg_min_ev": p.eg_min(),
            "wavelength_um": wavelength,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
        return Ok(EXIT_OK);
    }
    let lines: [(&str, String); 12] = [
        ("composition", comp.to_string()),
        ("g", r.g.to_string()),
        ("character", r.character.to_string()),
        ("roth_correction", r.roth_correction.to_string()),
        ("a_angstrom", p.a.to_string()),
        ("eg_gamma_ev", p.eg_gamma.to_string()),
        ("eg_x_ev", p.eg_x.to_string()),
        ("eg_l_ev", p.eg_l.to_string()),
        ("eg_min_ev", p.eg_min().to_string()),
        ("delta_so_ev", p.delta_so.to_string()),
        ("e_p_ev", p.e_p.to_string()),
        ("wavelength_um", wavelength.to_string()),
    ];
    for (k, v) in lines {
        writeln!(out, "{k:<16} {v}")?;
    }
    Ok(EXIT_OK)
}

/// Path grammar: `A..B`, a single formula, or `Family@Substrate`.
pub fn parse_path_spec(spec: &str, db: &MaterialsDatabase) -> Result<CompositionPath> {
    let spec = spec.trim();
    if let Some((family, substrate)) = spec.split_once('@') {
        let family: AlloyFamily = family.parse()?;
        let a = substrate.parse::<Substrate>()?.lattice_constant(db)?;
        return Ok(lattice_matched_path(&family, a, db)?);
    }
    if let Some((a, b)) = spec.split_once("..") {
        let (a, b) = (parse_composition(a)?, parse_composition(b)?);
        let path = CompositionPath::linear(a, b).with_context(|| {
            format!("path `{spec}` mixes more than two elements per sublattice")
        })?;
        return Ok(path);
    }
    Ok(CompositionPath::Point(parse_composition(spec)?))
}

fn cmd_sweep(
    args: &SweepArgs,
    db: &MaterialsDatabase,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32> {
    let spec = match (&args.path, &args.family, &args.match_substrate) {
        (Some(p), None, _) => p.clone(),
        (None, Some(f), Some(s)) => format!("{f}@{s}"),
        _ => bail!("sweep needs a path `A..B` or --family with --match-substrate"),
    };
    let path = parse_path_spec(&spec, db)?;
    if let CompositionPath::Point(_) = path {
        bail!("sweep path `{spec}` is a single composition; use `A..B`");
    }
    let table = sweep_path(&path, args.n, db)?;
    let mut buf = Vec::new();
    if json {
        serde_json::to_writer_pretty(
            &mut buf,
            &json!({ "path": path.description(), "rows": table.rows }),
        )?;
        buf.push(b'\n');
    } else {
        table::write_sweep(&table, &mut buf)?;
    }
    match &args.output {
        Some(file) => {
            fs::write(file, buf).with_context(|| format!("writing {}", file.display()))?
        }
        None => out.write_all(&buf)?,
    }
    Ok(EXIT_OK)
}

/// Parses `min:max`.
pub fn parse_window(text: &str) -> Result<[f64; 2]> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("gap window `{text}` must be `min:max`"))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .with_context(|| format!("gap window `{text}`"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .with_context(|| format!("gap window `{text}`"))?;
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        bail!("gap window `{text}` is malformed: min must be below max");
    }
    Ok([lo, hi])
}

fn cmd_solve(
    args: &SolveArgs,
    db: &MaterialsDatabase,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32> {
    let window = parse_window(&args.eg)?;
    let mut problem = DesignProblem::new(
        args.family.parse()?,
        args.substrate.parse()?,
        args.g_target,
        args.g_tol,
        window,
    );
    problem.lattice_tolerance = args.lattice_tol;
    problem.grid = args.grid;
    let solution = solve_design(&problem, db)?;

    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&solution)?)?;
    } else {
        let c = &solution.certificate;
        writeln!(out, "status: {:?}", solution.status)?;
        writeln!(out, "path: {}", c.path)?;
        writeln!(
            out,
            "certificate: grid_points={} brackets_refined={} feasible_grid_points={} indirect_grid_points={} root_t_tolerance={} root_residual_tolerance={}",
            c.grid_points,
            c.brackets_refined,
            c.feasible_grid_points,
            c.indirect_grid_points,
            c.root_t_tolerance,
            c.root_residual_tolerance
        )?;
        if let (Some(g), Some(eg)) = (c.g_range, c.eg_gamma_range) {
            writeln!(
                out,
                "scanned: g in [{}, {}], eg_gamma_ev in [{}, {}]",
                g[0], g[1], eg[0], eg[1]
            )?;
        }
        writeln!(out, "solutions: {}", solution.solutions.len())?;
        if !solution.solutions.is_empty() {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "kind",
                "t",
                "composition",
                "g",
                "eg_gamma_ev",
                "wavelength_um",
                "delta_so_ev",
                "e_p_ev",
                "a_angstrom",
                "mismatch",
            ])?;
            for s in &solution.solutions {
                w.write_record([
                    format!("{:?}", s.kind),
                    s.t.to_string(),
                    s.composition.to_string(),
                    s.gfactor.g.to_string(),
                    s.params.eg_gamma.to_string(),
                    gap_to_wavelength(s.params.eg_gamma)?.to_string(),
                    s.params.delta_so.to_string(),
                    s.params.e_p.to_string(),
                    s.params.a.to_string(),
                    s.mismatch.to_string(),
                ])?;
            }
            out.write_all(&w.into_inner()?)?;
        }
    }
    Ok(match solution.status {
        Feasibility::Feasible => EXIT_OK,
        Feasibility::Infeasible => EXIT_INFEASIBLE,
    })
}

/// One evaluated figure curve; a single-composition path gives one row.
pub fn figure_curve(
    path: &CompositionPath,
    n: usize,
    db: &MaterialsDatabase,
) -> Result<SweepTable> {
    if n < 2 {
        bail!("figure needs at least 2 points per path, got {n}");
    }
    if path.is_point() {
        let row = SweepRow::evaluate(0.0, path.at(0.0)?, db)?;
        return Ok(SweepTable { rows: vec![row] });
    }
    Ok(sweep_path(path, n, db)?)
}

fn file_slug(spec: &str) -> String {
    spec.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' {
                c
            } else {
                '-'
            }
        })
        .collect::<String>()
        .replace("..", "-")
}

fn cmd_figure(
    args: &FigureArgs,
    db: &MaterialsDatabase,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32> {
    let specs: Vec<String> = if args.paths.trim() == "default" {
        DEFAULT_FIGURE_PATHS.iter().map(|s| s.to_string()).collect()
    } else {
        args.paths
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect()
    };
    if specs.is_empty() {
        bail!("no figure paths given");
    }
    let experimental = match &args.experimental {
        Some(file) => {
            let bytes = fs::read(file)
                .with_context(|| format!("reading experimental file {}", file.display()))?;
            table::check_experimental(&bytes)?;
            if args.out_dir.is_none() {
                bail!("--experimental needs --out-dir to write its separate table");
            }
            Some(bytes)
        }
        None => None,
    };
    let curves = specs
        .iter()
        .map(|spec| {
            let path = parse_path_spec(spec, db).with_context(|| format!("path `{spec}`"))?;
            Ok((spec.as_str(), figure_curve(&path, args.n, db)?))
        })
        .collect::<Result<Vec<_>>>()?;

    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let panel = format!("{:?}", args.panel).to_lowercase();
        for (i, (spec, curve)) in curves.iter().enumerate() {
            let name = format!(
                "panel_{panel}_{i:02}_{}.{}",
                file_slug(spec),
                if json { "json" } else { "csv" }
            );
            let file = dir.join(&name);
            let mut buf = Vec::new();
            if json {
                serde_json::to_writer_pretty(&mut buf, &figure_json(args.panel, spec, curve))?;
                buf.push(b'\n');
            } else {
                let mut w = csv::Writer::from_writer(&mut buf);
                w.write_record(table::figure_header(args.panel, false))?;
                table::write_figure_rows(&mut w, args.panel, None, curve)?;
                w.flush()?;
            }
            fs::write(&file, buf).with_context(|| format!("writing {}", file.display()))?;
            writeln!(out, "{}", file.display())?;
        }
        if let Some(bytes) = experimental {
            let file = dir.join("experimental.csv");
            fs::write(&file, bytes).with_context(|| format!("writing {}", file.display()))?;
            writeln!(out, "{}", file.display())?;
        }
        return Ok(EXIT_OK);
    }

    if json {
        let value: Vec<_> = curves
            .iter()
            .map(|(spec, c)| figure_json(args.panel, spec, c))
            .collect();
        writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?;
    } else {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(table::figure_header(args.panel, true))?;
        for (spec, curve) in &curves {
            table::write_figure_rows(&mut w, args.panel, Some(spec), curve)?;
        }
        out.write_all(&w.into_inner()?)?;
    }
    Ok(EXIT_OK)
}

fn figure_json(panel: Panel, spec: &str, curve: &SweepTable) -> serde_json::Value {
    let rows: Vec<_> = curve
        .rows
        .iter()
        .map(|r| {
            json!({
                "t": r.t,
                "composition": r.composition,
                "a_angstrom": r.a,
                "character": r.character,
                panel.y_column(): panel.y_value(r),
            })
        })
        .collect();
    json!({ "panel": panel, "path": spec, "rows": rows })
}
