//! `toricone`: analyse complete toric fans from the command line.
//!
//! Exit codes: 0 success, 1 a predicate command evaluated false, 2 invalid
//! input, 3 i/o failure, 64 usage error.

mod table;

use std::collections::BTreeSet;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use toricone::catalog;
use toricone::divisor::{cartier_data, picard, TWeilDivisor};
use toricone::exactlin::LatticeVector;
use toricone::explorer::{search, SearchConfig, Target};
use toricone::fan::{product, stellar_subdivide, Fan};
use toricone::intersection::{intersection_number, is_projective, rational_intersections};
use toricone::io::{parse_divisor, parse_fan_str, read_fan_file, FanFile};
use toricone::report::{analyze, projectivity_report, AnalysisReport, ProjectivityReport};
use toricone::{Error, Result};

use table::{fields, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "toricone", version, about = "Exact invariants of complete toric varieties")]
struct Cli {
    /// Output format; JSON is the stable machine contract.
    #[arg(long, global = true, value_enum, env = "TORICONE_FORMAT", default_value = "text")]
    format: Format,

    /// Write the output to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

/// A FAN argument is a fan file, `-` for stdin, or a catalog name.
#[derive(Subcommand, Debug)]
enum Command {
    /// Check a fan file; exits 1 if the fan is valid but not complete.
    Validate { fan: String },
    /// Full analysis report.
    Analyze { fan: String },
    /// Picard rank, basis and the classes of the Cartier ray divisors.
    Picard { fan: String },
    /// Intersection numbers of a divisor with every wall curve.
    Intersect {
        fan: String,
        /// Coefficients keyed by 1-based ray number, e.g. '{"7":1}'.
        #[arg(long)]
        divisor: String,
    },
    /// Projectivity with an ample witness or a Farkas certificate; exits 1 if not projective.
    Projective { fan: String },
    /// Print a catalog fan, or list the catalog.
    Catalog {
        #[arg(long)]
        name: Option<String>,
    },
    /// Stellar subdivision at a primitive lattice vector.
    Subdivide {
        fan: String,
        /// Comma-separated coordinates, e.g. 0,0,-1.
        #[arg(long, allow_hyphen_values = true)]
        ray: String,
    },
    /// Product of two fans.
    Product { first: String, second: String },
    /// The tower X_k of iterated blow-ups of X_A.
    Tower {
        #[arg(long)]
        k: usize,
    },
    /// Random mutation search for fans with the requested properties.
    Search {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        /// Comma-separated: nonprojective, ne_equals_n1, kleiman_fails, qfactorial_ne_equals_n1.
        #[arg(long, value_delimiter = ',', required = true)]
        targets: Vec<Target>,
        #[arg(long, default_value = "delta_Q")]
        template: String,
        /// Upper bound on mutations per candidate.
        #[arg(long, default_value_t = 2)]
        mutations: usize,
    },
}

struct Output {
    text: String,
    json: String,
    holds: bool,
}

impl Output {
    fn new(text: String, json: String) -> Self {
        Output { text, json, holds: true }
    }
}

fn yes(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        _ => 2,
    }
}

fn load_fan(arg: &str) -> Result<Fan> {
    if arg == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(|e| Error::Io(format!("stdin: {e}")))?;
        return parse_fan_str(&text);
    }
    let path = Path::new(arg);
    if !path.exists() {
        if let Ok(entry) = catalog::get(arg) {
            return Ok(entry.fan);
        }
    }
    read_fan_file(path)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serialises")
}

/// Integers as JSON numbers, other rationals as `"p/q"` strings.
fn exact(s: String) -> Value {
    match s.parse::<i64>() {
        Ok(i) => json!(i),
        Err(_) => json!(s),
    }
}

fn divisor_json(d: &TWeilDivisor) -> Value {
    Value::Array(d.coeffs().iter().map(|c| exact(c.to_string())).collect())
}

fn fan_output(fan: &Fan) -> Result<Output> {
    Ok(Output::new(fan.to_string(), FanFile::from_fan(fan)?.to_pretty_json()))
}

fn validate(fan: &Fan) -> Output {
    let flags = fan.flags();
    let walls = fan.walls().ok().map(|w| w.len());
    let text = fields(&[
        ("valid", "yes".into()),
        ("dim", fan.dim().to_string()),
        ("rays", fan.num_rays().to_string()),
        ("max_cones", fan.max_cones().len().to_string()),
        ("walls", walls.map_or("-".into(), |w| w.to_string())),
        ("complete", yes(flags.complete)),
        ("q_factorial", yes(flags.q_factorial)),
        ("smooth", yes(flags.smooth)),
        ("gorenstein", yes(flags.gorenstein)),
    ]);
    let j = json!({
        "valid": true,
        "dim": fan.dim(),
        "rays": fan.num_rays(),
        "max_cones": fan.max_cones().len(),
        "walls": walls,
        "flags": flags,
    });
    Output { text, json: pretty(&j), holds: flags.complete }
}

fn divisor_label(coeffs: &[i64]) -> String {
    TWeilDivisor::from_i64(coeffs).to_string()
}

/// `v2 - v3 - v5 + v6`, a linear relation among ray generators.
fn ray_combination(fan: &Fan, coeffs: &[i64]) -> String {
    let mut out = String::new();
    for (i, &c) in coeffs.iter().enumerate().filter(|(_, c)| **c != 0) {
        let sign = match (out.is_empty(), c < 0) {
            (true, true) => "-",
            (true, false) => "",
            (false, true) => " - ",
            (false, false) => " + ",
        };
        let k = if c.abs() == 1 { String::new() } else { c.abs().to_string() };
        out += &format!("{sign}{k}{}", fan.ray_label(i));
    }
    if out.is_empty() { "0".into() } else { out }
}

fn projectivity_text(fan: &Fan, p: &ProjectivityReport) -> String {
    let mut out = fields(&[("projective", yes(p.projective))]);
    if let Some(w) = &p.witness {
        out += &fields(&[("ample witness", divisor_label(w))]);
    }
    if let Some(c) = &p.certificate {
        let walls = fan.walls().map(|w| w.to_vec()).unwrap_or_default();
        out += &format!(
            "Farkas certificate: summing weight * (D.C >= 1) over these walls and cancelling \
             with the cone relations gives 0 >= {}\n",
            c.strict_total
        );
        let mut t = Table::new(["wall", "rays", "weight"]);
        for w in &c.walls {
            let label = walls.get(w.wall).map(|x| fan.cone_label(&x.ray_ids)).unwrap_or_default();
            t.row([w.wall.to_string(), label, w.weight.to_string()]);
        }
        out += &t.render();
        let mut t = Table::new(["cone", "relation", "weight"]);
        for r in &c.relations {
            let cone = fan.cone_label(fan.max_cones()[r.cone].ray_ids());
            t.row([cone, ray_combination(fan, &r.relation), r.weight.to_string()]);
        }
        out += &t.render();
    }
    out
}

fn analysis_text(fan: &Fan, r: &AnalysisReport) -> String {
    let f = &r.flags;
    let basis: Vec<String> = r.picard_basis.iter().map(|b| divisor_label(b)).collect();
    let mut out = fields(&[
        (
            "fan",
            format!(
                "dim {}, {} rays, {} maximal cones, {} walls",
                r.fan.dim, r.fan.rays, r.fan.max_cones, r.fan.walls
            ),
        ),
        (
            "flags",
            format!(
                "complete {}, q_factorial {}, smooth {}, gorenstein {}",
                yes(f.complete),
                yes(f.q_factorial),
                yes(f.smooth),
                yes(f.gorenstein)
            ),
        ),
        ("pic_rank", r.pic_rank.to_string()),
        ("numerical_rank", r.numerical_rank.to_string()),
        ("picard_basis", if basis.is_empty() { "-".into() } else { basis.join(", ") }),
        ("ne_equals_n1", yes(r.ne_equals_n1)),
        ("kleiman", r.kleiman.verdict.as_str().to_string()),
        ("positive_divisor", r.kleiman.positive_divisor.as_ref().map_or("-".into(), |d| divisor_label(d))),
    ]);
    out.push('\n');
    out += &projectivity_text(fan, &r.projective);
    out.push('\n');
    let mut t = Table::new(["wall", "rays", "left", "right", "class"]);
    for w in &r.walls {
        let class: Vec<String> = w.class.iter().map(|x| x.to_string()).collect();
        t.row([
            w.id.to_string(),
            format!("<{}>", w.rays.join(",")),
            fan.cone_label(fan.max_cones()[w.left].ray_ids()),
            fan.cone_label(fan.max_cones()[w.right].ray_ids()),
            format!("({})", class.join(", ")),
        ]);
    }
    out + &t.render()
}

fn picard_output(fan: &Fan) -> Result<Output> {
    let pic = picard(fan)?;
    let mut rays = Vec::with_capacity(fan.num_rays());
    let mut t = Table::new(["ray", "cartier", "class"]);
    for i in 0..fan.num_rays() {
        let d = TWeilDivisor::ray(fan.num_rays(), i);
        let class = match cartier_data(fan, &d)? {
            Some(_) => Some(pic.class_of(&d)?),
            None => None,
        };
        let cells: Option<Vec<String>> = class.as_ref().map(|c| c.iter().map(|x| x.to_string()).collect());
        t.row([
            fan.ray_label(i),
            yes(class.is_some()),
            cells.as_ref().map_or("-".into(), |c| format!("({})", c.join(", "))),
        ]);
        rays.push(json!({
            "ray": fan.ray_label(i),
            "cartier": class.is_some(),
            "class": cells.map(|c| c.into_iter().map(exact).collect::<Vec<_>>()),
        }));
    }
    let basis: Vec<String> = pic.basis.iter().map(|b| b.to_string()).collect();
    let text = fields(&[
        ("pic_rank", pic.rank.to_string()),
        ("basis", if basis.is_empty() { "-".into() } else { basis.join(", ") }),
    ]) + "\n"
        + &t.render();
    let j = json!({
        "pic_rank": pic.rank,
        "basis": pic.basis.iter().map(divisor_json).collect::<Vec<_>>(),
        "rays": rays,
    });
    Ok(Output::new(text, pretty(&j)))
}

fn intersect_output(fan: &Fan, literal: &str) -> Result<Output> {
    let d = parse_divisor(fan, literal)?;
    let walls = fan.walls()?;
    let cd = cartier_data(fan, &d)?;
    let values: Vec<String> = match &cd {
        Some(cd) => walls.iter().map(|w| intersection_number(cd, w).to_string()).collect(),
        None => rational_intersections(fan, &d)?
            .ok_or_else(|| Error::NotCartier(format!("{d} is not Q-Cartier")))?
            .iter()
            .map(|x| x.to_string())
            .collect(),
    };
    let mut t = Table::new(["wall", "D.C"]);
    let mut rows = Vec::with_capacity(walls.len());
    for (w, v) in walls.iter().zip(&values) {
        t.row([fan.cone_label(&w.ray_ids), v.clone()]);
        rows.push(json!({
            "wall": w.id,
            "rays": w.ray_ids.iter().map(|&i| fan.ray_label(i)).collect::<Vec<_>>(),
            "value": exact(v.clone()),
        }));
    }
    let text = fields(&[("divisor", d.to_string()), ("cartier", yes(cd.is_some()))]) + "\n" + &t.render();
    let j = json!({
        "divisor": divisor_json(&d),
        "cartier": cd.is_some(),
        "walls": rows,
    });
    Ok(Output::new(text, pretty(&j)))
}

fn projective_output(fan: &Fan) -> Result<Output> {
    let p = projectivity_report(&is_projective(fan)?)?;
    let json = serde_json::to_string_pretty(&p).expect("report serialises");
    Ok(Output { text: projectivity_text(fan, &p), json, holds: p.projective })
}

fn catalog_output(name: Option<&str>) -> Result<Output> {
    let Some(name) = name else {
        let text = catalog::NAMES.iter().map(|n| format!("{n}\n")).collect();
        return Ok(Output::new(text, pretty(&json!(catalog::NAMES))));
    };
    let entry = catalog::get(name)?;
    let text = format!("{}\n{}", entry.name, entry.fan);
    Ok(Output::new(text, FanFile::from_fan(&entry.fan)?.to_pretty_json()))
}

fn parse_ray(s: &str) -> Result<LatticeVector> {
    let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
    let coords = inner
        .split(',')
        .map(|c| c.trim().parse::<i64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse(format!("ray `{s}`: {e}")))?;
    Ok(LatticeVector::from_i64(&coords))
}

fn search_output(seed: u64, iters: usize, targets: Vec<Target>, template: &str, mutations: usize) -> Result<Output> {
    let config = SearchConfig {
        seed,
        iterations: iters,
        mutations_per_step: mutations,
        targets: targets.into_iter().collect::<BTreeSet<_>>(),
        template: load_fan(template)?,
    };
    let findings = search(&config)?;
    let mut t = Table::new(["index", "signature", "rays", "cones", "pic", "rho", "targets", "candidate"]);
    let mut lines = String::new();
    for f in &findings {
        let targets: Vec<&str> = f.targets.iter().map(|t| t.as_str()).collect();
        t.row([
            f.index.to_string(),
            f.signature[..16].to_string(),
            f.report.fan.rays.to_string(),
            f.report.fan.max_cones.to_string(),
            f.report.pic_rank.to_string(),
            f.report.numerical_rank.to_string(),
            targets.join(","),
            yes(f.conjecture_candidate),
        ]);
        lines += &f.to_json_line();
        lines.push('\n');
    }
    let text = format!("{} findings from {} candidates (seed {})\n", findings.len(), iters, seed) + &t.render();
    Ok(Output::new(text, lines))
}

fn run(cmd: &Command) -> Result<Output> {
    match cmd {
        Command::Validate { fan } => Ok(validate(&load_fan(fan)?)),
        Command::Analyze { fan } => {
            let fan = load_fan(fan)?;
            let r = analyze(&fan)?;
            Ok(Output::new(analysis_text(&fan, &r), r.to_json()))
        }
        Command::Picard { fan } => picard_output(&load_fan(fan)?),
        Command::Intersect { fan, divisor } => intersect_output(&load_fan(fan)?, divisor),
        Command::Projective { fan } => projective_output(&load_fan(fan)?),
        Command::Catalog { name } => catalog_output(name.as_deref()),
        Command::Subdivide { fan, ray } => fan_output(&stellar_subdivide(&load_fan(fan)?, &parse_ray(ray)?)?),
        Command::Product { first, second } => fan_output(&product(&load_fan(first)?, &load_fan(second)?)?),
        Command::Tower { k } => fan_output(&catalog::xk_tower(*k)?),
        Command::Search { seed, iters, targets, template, mutations } => {
            search_output(*seed, *iters, targets.clone(), template, *mutations)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    let out = match run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let mut body = match cli.format {
        Format::Text => out.text,
        Format::Json => out.json,
    };
    if !body.ends_with('\n') {
        body.push('\n');
    }
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &body) {
                eprintln!("error: i/o error: {}: {e}", path.display());
                return ExitCode::from(3);
            }
        }
        None => print!("{body}"),
    }
    ExitCode::from(if out.holds { 0 } else { 1 })
}
