use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};

use portraitforge::analysis::report::{chi_line, cusps_line, enumeration_lines, labeling_line, morse_lines, thom_line};
use portraitforge::analysis::{
    enumerate_labelings, levine_morse_data, propagate, stratified_chi, thom_parity, ThomVerdict,
    DEFAULT_ENUMERATION_CAP,
};
use portraitforge::constructors::{
    genus_surface_portrait, morse_lift, projective_plane_portrait, sphere_bundle_portrait, toric_portrait, Field,
};
use portraitforge::local_models::{tf_map_spec, TwiceFold};
use portraitforge::numeric::{extract_portrait, parse_map_spec, NumericError};
use portraitforge::portrait::{parse_portrait, serialize_portrait, validate, Portrait};
use portraitforge::render::render_svg;

#[derive(Parser)]
#[command(
    name = "portraitforge",
    version,
    about = "Planar portraits of stable maps to the plane"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Extract the portrait of a map spec and report its invariants.
    /// Tolerances are overridden with `--tol.<name> <value>`.
    Analyze {
        map: PathBuf,
        /// Write the extracted portrait here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write an SVG drawing here.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Also report Morse data of the height function in this direction.
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
    },
    /// Validate a portrait file and report its invariants.
    Check {
        portrait: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<f64>,
    },
    /// List every consistent fiber labeling of a surface portrait.
    Enumerate {
        portrait: PathBuf,
        /// Stop after this many labelings.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        max: usize,
    },
    /// Build a template portrait (or the twice-fold map spec).
    Construct {
        #[command(subcommand)]
        kind: Kind,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Draw a portrait with geometry as SVG.
    Render {
        portrait: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Kind {
    /// Closed orientable surface of genus g.
    Genus { g: usize },
    /// Toric surface of a Delzant polygon, vertices as `x,y`
    /// (put vertices with negative coordinates after `--`).
    Toric {
        #[arg(required = true, num_args = 3..)]
        vertices: Vec<String>,
    },
    /// Projective plane over R, C or H.
    Projective { field: String },
    /// S^p-bundle over S^q.
    Bundle { p: u32, q: u32 },
    /// Lift of a Morse function, critical points as `value:index`
    /// (put negative values after `--`).
    Morse {
        #[arg(required = true)]
        critical: Vec<String>,
    },
    /// Perturbed twice-fold map spec (p = q = 1 only).
    Tf {
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 0.2)]
        eps: f64,
    },
}

enum Outcome {
    Pass,
    Fail,
}

type Tolerances = Vec<(String, f64)>;

/// Split `--tol.<name> <value>` and `--tol.<name>=<value>` out of the
/// arguments, since clap cannot declare flags with open-ended names.
fn take_tolerances(args: Vec<String>) -> Result<(Vec<String>, Tolerances)> {
    let mut rest = Vec::new();
    let mut tols = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(spec) = a.strip_prefix("--tol.") else {
            rest.push(a);
            continue;
        };
        let (name, value) = match spec.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = it.next().ok_or_else(|| anyhow!("--tol.{spec} needs a value"))?;
                (spec.to_string(), v)
            }
        };
        let value: f64 = value
            .parse()
            .with_context(|| format!("--tol.{name}: '{value}' is not a number"))?;
        tols.push((name, value));
    }
    Ok((rest, tols))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_portrait(path: &Path) -> Result<Portrait> {
    parse_portrait(&read(path)?).with_context(|| format!("{}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Print the invariant report. Label inconsistencies and parity failures
/// yield `Fail`.
fn report(p: &Portrait, theta: Option<f64>) -> Result<Outcome> {
    let labeling = if p.dim == 2 {
        match propagate(p) {
            Ok(l) => Some(l),
            Err(e) => {
                eprintln!("error: {e}");
                return Ok(Outcome::Fail);
            }
        }
    } else {
        None
    };
    let chi = stratified_chi(p, labeling.as_ref())?;
    let verdict = thom_parity(p, chi);
    println!("{}", chi_line(chi));
    println!("{}", cusps_line(p.cusp_count()));
    println!("{}", thom_line(verdict));
    if let Some(l) = &labeling {
        println!("{}", labeling_line(l));
    }
    if let Some(theta) = theta {
        let l = labeling
            .as_ref()
            .ok_or_else(|| anyhow!("Morse data needs a surface portrait"))?;
        for line in morse_lines(&levine_morse_data(p, l, theta)?) {
            println!("{line}");
        }
    }
    Ok(if verdict == ThomVerdict::Pass {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn analyze(
    map: &Path,
    tols: &[(String, f64)],
    out: Option<&Path>,
    svg: Option<&Path>,
    theta: Option<f64>,
) -> Result<Outcome> {
    let mut spec = parse_map_spec(&read(map)?).with_context(|| format!("{}", map.display()))?;
    for (name, value) in tols {
        spec.tol.set(name, *value).map_err(|e| anyhow!("--tol.{name}: {e}"))?;
    }
    let ex = match extract_portrait(&spec) {
        Ok(ex) => ex,
        Err(e @ NumericError::Inconsistent(_)) => {
            eprintln!("error: {e}");
            return Ok(Outcome::Fail);
        }
        Err(e) => return Err(e.into()),
    };
    if let Some(path) = out {
        emit(Some(path), &serialize_portrait(&ex.portrait))?;
    }
    if let Some(path) = svg {
        emit(Some(path), &render_svg(&ex.portrait)?)?;
    }
    report(&ex.portrait, theta)
}

fn check(path: &Path, theta: Option<f64>) -> Result<Outcome> {
    let p = load_portrait(path)?;
    let violations = validate(&p);
    if !violations.is_empty() {
        for v in &violations {
            println!("VIOLATION {v}");
        }
        return Ok(Outcome::Fail);
    }
    report(&p, theta)
}

fn parse_pair<A: std::str::FromStr, B: std::str::FromStr>(s: &str, sep: char) -> Result<(A, B)> {
    let bad = || anyhow!("malformed '{s}', expected a{sep}b");
    let (a, b) = s.split_once(sep).ok_or_else(bad)?;
    Ok((
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ))
}

fn construct(kind: &Kind) -> Result<String> {
    let p = match kind {
        Kind::Genus { g } => genus_surface_portrait(*g),
        Kind::Toric { vertices } => {
            let poly = vertices
                .iter()
                .map(|v| parse_pair(v, ','))
                .collect::<Result<Vec<(i64, i64)>>>()?;
            toric_portrait(&poly)?
        }
        Kind::Projective { field } => projective_plane_portrait(field.parse::<Field>()?),
        Kind::Bundle { p, q } => sphere_bundle_portrait(*p, *q)?,
        Kind::Morse { critical } => {
            let seq = critical
                .iter()
                .map(|c| parse_pair(c, ':'))
                .collect::<Result<Vec<(f64, u8)>>>()?;
            morse_lift(&seq)?
        }
        Kind::Tf { p, q, eps } => return Ok(tf_map_spec(&TwiceFold::new(*p, *q, *eps)?)?.to_string()),
    };
    Ok(serialize_portrait(&p))
}

fn run(cli: Cli, tols: &[(String, f64)]) -> Result<Outcome> {
    if !tols.is_empty() && !matches!(cli.cmd, Cmd::Analyze { .. }) {
        bail!("--tol.<name> only applies to analyze");
    }
    match cli.cmd {
        Cmd::Analyze { map, out, svg, theta } => analyze(&map, tols, out.as_deref(), svg.as_deref(), theta),
        Cmd::Check { portrait, theta } => check(&portrait, theta),
        Cmd::Enumerate { portrait, max } => {
            let p = load_portrait(&portrait)?;
            let e = enumerate_labelings(&p, max)?;
            for line in enumeration_lines(&e) {
                println!("{line}");
            }
            Ok(Outcome::Pass)
        }
        Cmd::Construct { kind, out } => {
            emit(out.as_deref(), &construct(&kind)?)?;
            Ok(Outcome::Pass)
        }
        Cmd::Render { portrait, out } => {
            emit(out.as_deref(), &render_svg(&load_portrait(&portrait)?)?)?;
            Ok(Outcome::Pass)
        }
    }
}

fn main() -> ExitCode {
    let (args, tols) = match take_tolerances(std::env::args().collect()) {
        Ok(split) => split,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli, &tols) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
