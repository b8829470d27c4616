//! Command line front end: ratio reports, oracle cross-checks, the
//! reference comparison table, and parameter scans.
//!
//! Every command funnels its results through one tabular [`Report`] so
//! the `table`, `csv`, and `json` renderings stay aligned.  A fixed
//! configuration yields byte-identical `csv`/`json` output across runs:
//! the quadrature partitions are fixed, the shortest-path search breaks
//! ties deterministically, and floats print in shortest round-trip
//! form.  Numeric results always travel with a tolerance column.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::geom::Vec2;
use crate::geom::Vec3;
use crate::groups::{invariant_axes, ManifoldType, QuotientSpec};
use crate::lattice::{Lattice2D, LatticeKind};
use crate::oracle::{self, bavard, jacobi};
use crate::systole::{
    deck_distance_bound, reference_apothem, solve_gc_parameter, systolic_ratio, torus_systole,
};

/// Parses a length in radians: a plain decimal or a short `pi`
/// expression (`pi`, `pi/6`, `2pi`, `2*pi/3`, `0.5pi`).  The `pi`
/// forms evaluate as one multiplication and one division, so `pi/4`
/// equals the floating value the library constants use.
fn parse_length(text: &str) -> std::result::Result<f64, String> {
    let t = text.trim().to_ascii_lowercase().replace(' ', "");
    let bad = || format!("cannot parse `{text}` as a length (try `0.5`, `pi/4`, or `2pi/3`)");
    let value = if let Some(at) = t.find("pi") {
        let (pre, post) = (&t[..at], &t[at + 2..]);
        let coeff = match pre.strip_suffix('*').unwrap_or(pre) {
            "" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| bad())?,
        };
        let denom = match post {
            "" => 1.0,
            d => d
                .strip_prefix('/')
                .ok_or_else(bad)?
                .parse::<f64>()
                .map_err(|_| bad())?,
        };
        if denom == 0.0 {
            return Err(bad());
        }
        coeff * PI / denom
    } else {
        t.parse::<f64>().map_err(|_| bad())?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

/// A radian length argument; accepts `pi` expressions.
#[derive(Clone, Copy, Debug)]
struct Length(f64);

impl std::str::FromStr for Length {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        parse_length(s).map(Length)
    }
}

/// Diagonal flat basis given as three comma separated edge lengths.
#[derive(Clone, Copy, Debug)]
struct FlatBasis([f64; 3]);

impl std::str::FromStr for FlatBasis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 3 {
            return Err(format!(
                "expected three comma separated edge lengths, got `{s}`"
            ));
        }
        let mut edges = [0.0; 3];
        for (slot, part) in edges.iter_mut().zip(&parts) {
            *slot = parse_length(part)?;
            if *slot <= 0.0 {
                return Err(format!("edge lengths must be positive, got `{part}`"));
            }
        }
        Ok(FlatBasis(edges))
    }
}

impl FlatBasis {
    fn basis(self) -> [Vec3; 3] {
        let [x, y, z] = self.0;
        [
            Vec3::new(x, 0.0, 0.0),
            Vec3::new(0.0, y, 0.0),
            Vec3::new(0.0, 0.0, z),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TypeArg {
    #[value(name = "C1", alias = "c1")]
    C1,
    #[value(name = "C2", alias = "c2")]
    C2,
    #[value(name = "C3", alias = "c3")]
    C3,
    #[value(name = "C4", alias = "c4")]
    C4,
    #[value(name = "C6", alias = "c6")]
    C6,
    #[value(name = "C22", alias = "c22", alias = "c2,2")]
    C22,
}

impl TypeArg {
    fn manifold(self) -> ManifoldType {
        match self {
            TypeArg::C1 => ManifoldType::C1,
            TypeArg::C2 => ManifoldType::C2,
            TypeArg::C3 => ManifoldType::C3,
            TypeArg::C4 => ManifoldType::C4,
            TypeArg::C6 => ManifoldType::C6,
            TypeArg::C22 => ManifoldType::C22,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LatticeArg {
    #[value(alias = "hexagonal")]
    Hex,
    Square,
}

impl LatticeArg {
    fn kind(self) -> LatticeKind {
        match self {
            LatticeArg::Hex => LatticeKind::Hexagonal,
            LatticeArg::Square => LatticeKind::Square,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum LemmaArg {
    /// Torus systole on the hexagonal cell versus the grid oracle.
    SysGhex,
    /// Torus systole on the square cell at the candidate crossing.
    SysGc,
    /// Displacement of the half-turn screw stays above pi.
    DistSigma,
    /// Displacement of the quarter-turn screw stays above pi/2.
    DistTau,
    /// Displacement of the sixth-turn screw stays above pi/3.
    DistPhi,
    /// Index form against the finite-difference second variation.
    Jacobi,
    /// Fold-surface systolic ratio against its sharp value.
    Bavard,
}

/// Systoles, volumes, and systolic ratios of flat and singular space
/// forms.
#[derive(Parser)]
#[command(name = "systolic", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Systole, volume, and ratio of one quotient.
    Ratio(RatioArgs),
    /// Cross-check a closed form against the independent grid oracle.
    Verify(VerifyArgs),
    /// Reference comparison table over the four screw quotients.
    Table(TableArgs),
    /// Sweep the cell apothem and tabulate the ratio curve.
    Scan(ScanArgs),
}

#[derive(Args)]
struct OutputArgs {
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = FormatArg::Table)]
    format: FormatArg,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct RatioArgs {
    /// Manifold type.
    #[arg(long = "type", value_enum)]
    manifold: TypeArg,
    /// Voronoi cell shape of the warped metric; defaults to the shape
    /// the type requires, hexagonal otherwise.
    #[arg(long, value_enum)]
    lattice: Option<LatticeArg>,
    /// Cell apothem, e.g. `0.7854` or `pi/4`; defaults to the
    /// reference value for the type where one exists.
    #[arg(long)]
    a: Option<Length>,
    /// Vertical period of the covering torus.
    #[arg(long, default_value = "2pi")]
    period: Length,
    /// Flat quotient instead: three comma separated box edges.
    #[arg(long, conflicts_with_all = ["lattice", "a", "period"])]
    flat: Option<FlatBasis>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Statement to check.
    #[arg(long, value_enum)]
    lemma: LemmaArg,
    /// Cell apothem override; each lemma has its reference default.
    #[arg(long)]
    a: Option<Length>,
    /// Grid resolution for the oracle runs.
    #[arg(long)]
    h: Option<Length>,
    /// Geodesic length parameter for the second-variation check.
    #[arg(long)]
    c: Option<Length>,
    /// Stencil reach: 1 axis moves, 2 face diagonals, 3 cell diagonals.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=3))]
    stencil: u32,
    /// Vertical winding bound for the screw candidate classes.
    #[arg(long, default_value_t = 2)]
    word_length: usize,
    /// Node budget; overrides the SYSTOLIC_NODE_CAP environment variable.
    #[arg(long)]
    node_cap: Option<usize>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ScanArgs {
    /// Manifold type.
    #[arg(long = "type", value_enum)]
    manifold: TypeArg,
    /// Voronoi cell shape; same default rule as `ratio`.
    #[arg(long, value_enum)]
    lattice: Option<LatticeArg>,
    /// Lower end of the apothem range.
    #[arg(long)]
    from: Length,
    /// Upper end of the apothem range.
    #[arg(long)]
    to: Length,
    /// Number of equal steps between the endpoints.
    #[arg(long, default_value_t = 8)]
    steps: u32,
    /// Vertical period of the covering torus.
    #[arg(long, default_value = "2pi")]
    period: Length,
    #[command(flatten)]
    out: OutputArgs,
}

/// One report cell; text and numbers mix freely within a column.
enum Cell {
    Text(String),
    Num(f64),
}

fn txt(s: impl Into<String>) -> Cell {
    Cell::Text(s.into())
}

fn num(v: f64) -> Cell {
    Cell::Num(v)
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(v) => format!("{v}"),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Text(s) => serde_json::Value::from(s.as_str()),
            Cell::Num(v) => serde_json::Value::from(*v),
        }
    }
}

/// Tabular result of one command, rendered to any output encoding.
struct Report {
    command: &'static str,
    columns: &'static [&'static str],
    rows: Vec<Vec<Cell>>,
}

fn render_table(report: &Report) -> String {
    let rendered: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|row| row.iter().map(Cell::render).collect())
        .collect();
    let mut widths: Vec<usize> = report.columns.iter().map(|c| c.len()).collect();
    for row in &rendered {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let emit_line = |out: &mut String, cells: &[String]| {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            let pad = widths[i].saturating_sub(cell.len());
            line.extend(std::iter::repeat(' ').take(pad));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    };
    let header: Vec<String> = report.columns.iter().map(|c| c.to_string()).collect();
    emit_line(&mut out, &header);
    for row in &rendered {
        emit_line(&mut out, row);
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn render_csv(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&report.columns.join(","));
    out.push('\n');
    for row in &report.rows {
        let line: Vec<String> = row.iter().map(|c| csv_field(&c.render())).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn render_json(report: &Report) -> String {
    let rows: Vec<serde_json::Value> = report
        .rows
        .iter()
        .map(|row| serde_json::Value::from(row.iter().map(Cell::json).collect::<Vec<_>>()))
        .collect();
    let doc = serde_json::json!({
        "schema": 1,
        "command": report.command,
        "columns": report.columns,
        "rows": rows,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("report values are finite");
    s.push('\n');
    s
}

fn emit(report: &Report, out: &OutputArgs) -> Result<()> {
    let text = match out.format {
        FormatArg::Table => render_table(report),
        FormatArg::Csv => render_csv(report),
        FormatArg::Json => render_json(report),
    };
    match &out.output {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            Error::InvalidParameter(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses the process arguments, runs one command, and returns the
/// process exit code: 0 on success, 1 when a `verify` check fails,
/// 2 for invalid configurations, 3 for domain violations.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Ratio(args) => {
            let report = cmd_ratio(&args)?;
            emit(&report, &args.out)?;
            Ok(true)
        }
        Command::Verify(args) => {
            let (report, all_pass) = cmd_verify(&args)?;
            emit(&report, &args.out)?;
            Ok(all_pass)
        }
        Command::Table(args) => {
            let report = cmd_table()?;
            emit(&report, &args.out)?;
            Ok(true)
        }
        Command::Scan(args) => {
            let report = cmd_scan(&args)?;
            emit(&report, &args.out)?;
            Ok(true)
        }
    }
}

fn default_kind(t: ManifoldType, lattice: Option<LatticeArg>) -> LatticeKind {
    lattice
        .map(LatticeArg::kind)
        .or_else(|| t.required_kind())
        .unwrap_or(LatticeKind::Hexagonal)
}

fn singular_spec(
    t: ManifoldType,
    lattice: Option<LatticeArg>,
    a: Option<Length>,
    period: f64,
) -> Result<(QuotientSpec, f64, LatticeKind)> {
    if !t.supports_singular() {
        return Err(Error::InvalidParameter(format!(
            "the {t} quotient carries no warped metric; pass --flat LX,LY,LZ"
        )));
    }
    let kind = default_kind(t, lattice);
    let a = match a {
        Some(l) => l.0,
        None => reference_apothem(t, kind).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "no reference apothem for {t} on the {kind} cell; pass --a"
            ))
        })?,
    };
    let spec = QuotientSpec::singular(t, kind, a, period)?;
    Ok((spec, a, kind))
}

const RATIO_COLUMNS: &[&str] = &["quantity", "value", "tolerance", "detail"];

fn cmd_ratio(args: &RatioArgs) -> Result<Report> {
    let t = args.manifold.manifold();
    let (spec, config) = if let Some(flat) = args.flat {
        let [x, y, z] = flat.0;
        (
            QuotientSpec::flat(t, flat.basis())?,
            format!("flat box {x} x {y} x {z}"),
        )
    } else {
        let (spec, a, kind) = singular_spec(t, args.lattice, args.a, args.period.0)?;
        (
            spec,
            format!("{kind} cell, apothem {a}, vertical period {}", args.period.0),
        )
    };
    let rep = systolic_ratio(&spec)?;
    let ratio_tol = rep.ratio * rep.volume_error / rep.volume;
    let volume_detail = if args.flat.is_some() {
        "basis determinant, exact"
    } else {
        "quadrature error estimate"
    };
    let sharpness = if rep.systole.exact {
        ""
    } else {
        "; candidate minimum only, see notes"
    };
    let margin_note = if rep.beats_flat() {
        "the warped metric beats every flat one"
    } else {
        "below the flat supremum"
    };
    let mut rows = vec![
        vec![txt("type"), txt(t.to_string()), txt(""), txt(config)],
        vec![
            txt("systole"),
            num(rep.systole.value),
            num(0.0),
            txt(format!("binding: {}{}", rep.systole.binding, sharpness)),
        ],
        vec![
            txt("volume"),
            num(rep.volume),
            num(rep.volume_error),
            txt(volume_detail),
        ],
        vec![
            txt("ratio"),
            num(rep.ratio),
            num(ratio_tol),
            txt("systole^3 / volume"),
        ],
        vec![
            txt("flat_supremum"),
            num(rep.flat_supremum),
            num(0.0),
            txt("supremum over flat metrics on this type"),
        ],
        vec![
            txt("margin"),
            num(rep.ratio - rep.flat_supremum),
            num(ratio_tol),
            txt(margin_note),
        ],
    ];
    for note in &rep.systole.notes {
        rows.push(vec![txt("note"), txt(""), txt(""), txt(note.clone())]);
    }
    Ok(Report {
        command: "ratio",
        columns: RATIO_COLUMNS,
        rows,
    })
}

const VERIFY_COLUMNS: &[&str] = &[
    "check",
    "measured",
    "reference",
    "tolerance",
    "status",
    "detail",
];

/// Accumulates verification rows and the overall pass flag.
struct Checks {
    rows: Vec<Vec<Cell>>,
    all_pass: bool,
}

impl Checks {
    fn new() -> Self {
        Checks {
            rows: Vec::new(),
            all_pass: true,
        }
    }

    fn info(&mut self, name: &str, value: f64, detail: String) {
        self.rows.push(vec![
            txt(name),
            num(value),
            txt(""),
            txt(""),
            txt("info"),
            txt(detail),
        ]);
    }

    fn check(
        &mut self,
        name: &str,
        measured: f64,
        reference: f64,
        tolerance: f64,
        pass: bool,
        detail: String,
    ) {
        self.all_pass &= pass;
        self.rows.push(vec![
            txt(name),
            num(measured),
            num(reference),
            num(tolerance),
            txt(if pass { "pass" } else { "fail" }),
            txt(detail),
        ]);
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<(Report, bool)> {
    let checks = match args.lemma {
        LemmaArg::SysGhex => lemma_torus(LatticeKind::Hexagonal, PI / 12.0, args)?,
        LemmaArg::SysGc => lemma_torus(LatticeKind::Square, solve_gc_parameter(), args)?,
        LemmaArg::DistSigma => {
            lemma_displacement(ManifoldType::C2, LatticeKind::Hexagonal, PI / 4.0, args)?
        }
        LemmaArg::DistTau => {
            lemma_displacement(ManifoldType::C4, LatticeKind::Square, PI / 8.0, args)?
        }
        LemmaArg::DistPhi => {
            lemma_displacement(ManifoldType::C6, LatticeKind::Hexagonal, PI / 12.0, args)?
        }
        LemmaArg::Jacobi => lemma_jacobi(args)?,
        LemmaArg::Bavard => lemma_bavard(args)?,
    };
    let all_pass = checks.all_pass;
    Ok((
        Report {
            command: "verify",
            columns: VERIFY_COLUMNS,
            rows: checks.rows,
        },
        all_pass,
    ))
}

/// Torus systole: closed form `min(4a, L cos(circumradius))` against
/// the graph estimate.  The estimate can only exceed the closed form,
/// and by no more than its own reported overhead.
fn lemma_torus(kind: LatticeKind, default_a: f64, args: &VerifyArgs) -> Result<Checks> {
    let a = args.a.map_or(default_a, |l| l.0);
    let h = args.h.map_or(0.1, |l| l.0);
    let spec = QuotientSpec::singular(ManifoldType::C1, kind, a, 2.0 * PI)?;
    let (closed, binding) = torus_systole(spec.metric())?;
    let est = oracle::systole_estimate(&spec, h, args.stencil, args.word_length, args.node_cap)?;
    let mut c = Checks::new();
    c.info(
        "apothem",
        a,
        format!("{kind} cell, vertical period 2pi"),
    );
    c.info(
        "resolution",
        est.resolution,
        format!("{} graph nodes", est.node_count),
    );
    for class in &est.classes {
        c.info(
            &format!("class: {}", class.label),
            class.value,
            class.method.to_string(),
        );
    }
    if kind == LatticeKind::Square && args.a.is_none() {
        let residual = 2.0 * a - PI * (a * SQRT_2).cos();
        c.check(
            "crossing residual",
            residual,
            0.0,
            1e-12,
            residual.abs() < 1e-12,
            "2a - pi cos(a sqrt2) at the solved candidate crossing".into(),
        );
    }
    let pass = est.value >= closed - 1e-9 && est.value <= closed + est.epsilon + 1e-9;
    c.check(
        "torus systole",
        est.value,
        closed,
        est.epsilon.max(1e-9),
        pass,
        format!("closed form binds via {binding}"),
    );
    Ok(c)
}

/// Smallest folded distance from `p` to any of the given axes.
fn folded_axis_distance(lat: &Lattice2D, p: Vec2, axes: &[Vec2]) -> f64 {
    let [b1, b2] = lat.basis();
    let mut best = f64::INFINITY;
    for axis in axes {
        for i in -2i64..=2 {
            for j in -2i64..=2 {
                let shift = b1 * (2.0 * i as f64) + b2 * (2.0 * j as f64);
                best = best.min((p - *axis - shift).norm());
            }
        }
    }
    best
}

/// Minimal displacement of the screw generator: the proved lower bound
/// against the grid minimum over all basepoints, plus the location of
/// the minimiser (it must sit on an invariant axis).
fn lemma_displacement(
    t: ManifoldType,
    kind: LatticeKind,
    default_a: f64,
    args: &VerifyArgs,
) -> Result<Checks> {
    let a = args.a.map_or(default_a, |l| l.0);
    let h = args.h.map_or(0.1, |l| l.0);
    let spec = QuotientSpec::singular(t, kind, a, 2.0 * PI)?;
    let bound = deck_distance_bound(&spec, 1)?;
    let g = spec.deck_power(1)?;
    let graph = oracle::build_graph(spec.metric(), h, args.stencil, args.node_cap)?;
    let d = graph.equivariant_distance(&g)?;
    let mut c = Checks::new();
    c.info(
        "apothem",
        a,
        format!("{t} screw on the {kind} cell, vertical period 2pi"),
    );
    c.info(
        "grid nodes",
        graph.node_count() as f64,
        format!("resolution {}", graph.resolution()),
    );
    let eps = 1e-3;
    let pass = d.value >= bound - eps && d.value <= bound + d.epsilon + 1e-9;
    c.check(
        "displacement minimum",
        d.value,
        bound,
        eps,
        pass,
        format!(
            "min over basepoints of d(m, g m); grid overhead {}",
            d.epsilon
        ),
    );
    let axes = invariant_axes(&spec, 1)?;
    let off = folded_axis_distance(
        spec.lattice().expect("singular spec carries a lattice"),
        d.base_point.xy(),
        &axes,
    );
    let tol = 1.5 * h;
    c.check(
        "minimiser on an axis",
        off,
        0.0,
        tol,
        off <= tol,
        format!(
            "base point ({}, {}); {} invariant axes",
            d.base_point.x,
            d.base_point.y,
            axes.len()
        ),
    );
    Ok(c)
}

/// Index form against the finite-difference second variation of the
/// real arc length around a vertical geodesic.
fn lemma_jacobi(args: &VerifyArgs) -> Result<Checks> {
    let c_par = args.c.map_or(FRAC_PI_2, |l| l.0);
    let closed = jacobi::index_form(c_par)?;
    let fd = jacobi::second_variation_fd(c_par, None)?;
    let mut c = Checks::new();
    let zero = jacobi::index_form(jacobi::TWIST)?;
    c.check(
        "threshold zero",
        zero.value,
        0.0,
        0.0,
        zero.value == 0.0,
        "index form at the conjugate length, exact".into(),
    );
    c.info("index form", closed.value, format!("closed form at c = {c_par}"));
    c.info(
        "second variation",
        fd.value,
        format!("central difference, step {}", fd.step),
    );
    let sign_ok = if closed.value.abs() <= 0.05 {
        fd.value.abs() <= 0.1
    } else {
        (closed.value > 0.0) == (fd.value > 0.0)
    };
    c.check(
        "sign agreement",
        fd.value,
        closed.value,
        0.1,
        sign_ok,
        "difference quotient tracks the closed form".into(),
    );
    if (c_par - FRAC_PI_2).abs() <= 1e-3 {
        let tol = 0.1 * closed.value.abs();
        c.check(
            "magnitude",
            fd.value,
            closed.value,
            tol,
            (fd.value - closed.value).abs() <= tol,
            "ten percent window at the half-pi length".into(),
        );
    }
    Ok(c)
}

/// Fold-surface estimate against the sharp ratio `pi / (2 sqrt2)`.
fn lemma_bavard(args: &VerifyArgs) -> Result<Checks> {
    let h = args.h.map_or(0.05, |l| l.0);
    let est = bavard::bavard_estimate(h)?;
    let mut c = Checks::new();
    for class in &est.classes {
        c.info(
            &format!("class: {}", class.label),
            class.value,
            class.method.to_string(),
        );
    }
    let area_ref = 2.0 * SQRT_2 * PI;
    c.check(
        "area",
        est.area,
        area_ref,
        1e-12,
        (est.area - area_ref).abs() <= 1e-12,
        "profile integral in closed form".into(),
    );
    let target = PI / (2.0 * SQRT_2);
    let tol = 0.02 * target;
    c.check(
        "systolic ratio",
        est.ratio,
        target,
        tol,
        (est.ratio - target).abs() <= tol,
        "sharp value for the fold surface".into(),
    );
    Ok(c)
}

const TABLE_COLUMNS: &[&str] = &[
    "type",
    "lattice",
    "apothem",
    "flat_supremum",
    "flat_value",
    "ratio",
    "tolerance",
    "note",
];

fn cmd_table() -> Result<Report> {
    let configs = [
        (ManifoldType::C2, LatticeKind::Hexagonal, "2/sqrt(3)"),
        (ManifoldType::C3, LatticeKind::Hexagonal, "2/sqrt(3)"),
        (ManifoldType::C4, LatticeKind::Square, "1"),
        (ManifoldType::C6, LatticeKind::Hexagonal, "2/sqrt(3)"),
    ];
    let mut rows = Vec::new();
    for (t, kind, flat_text) in configs {
        let a = reference_apothem(t, kind).expect("every table row has a reference apothem");
        let spec = QuotientSpec::singular(t, kind, a, 2.0 * PI)?;
        let rep = systolic_ratio(&spec)?;
        let note = if rep.systole.exact {
            String::new()
        } else {
            "candidate minimum only; shorter closed curves run over the cell vertices (see README)"
                .to_string()
        };
        rows.push(vec![
            txt(t.to_string()),
            txt(kind.to_string()),
            num(a),
            txt(flat_text),
            num(rep.flat_supremum),
            num(rep.ratio),
            num(rep.ratio * rep.volume_error / rep.volume),
            txt(note),
        ]);
    }
    Ok(Report {
        command: "table",
        columns: TABLE_COLUMNS,
        rows,
    })
}

const SCAN_COLUMNS: &[&str] = &[
    "a",
    "systole",
    "binding",
    "volume",
    "volume_tolerance",
    "ratio",
    "ratio_tolerance",
    "note",
];

fn cmd_scan(args: &ScanArgs) -> Result<Report> {
    let t = args.manifold.manifold();
    if !t.supports_singular() {
        return Err(Error::InvalidParameter(format!(
            "scans cover the warped quotients; {t} carries no warped metric"
        )));
    }
    let kind = default_kind(t, args.lattice);
    let (from, to) = (args.from.0, args.to.0);
    if !(from > 0.0 && to > from) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < from < to, got {from} and {to}"
        )));
    }
    if args.steps == 0 {
        return Err(Error::InvalidParameter(
            "need at least one scan step".into(),
        ));
    }
    let mut points: Vec<(f64, &str)> = (0..=args.steps)
        .map(|i| (from + (to - from) * i as f64 / args.steps as f64, ""))
        .collect();
    let period = args.period.0;
    if t == ManifoldType::C2
        && kind == LatticeKind::Square
        && (period - 2.0 * PI).abs() <= 1e-9 * 2.0 * PI
    {
        let crossing = solve_gc_parameter();
        if crossing > from && crossing < to {
            points.push((crossing, "horizontal and vertical candidates cross here"));
            points.sort_by(|lhs, rhs| lhs.0.partial_cmp(&rhs.0).expect("finite scan points"));
        }
    }
    let mut rows = Vec::new();
    for (a, annotation) in points {
        let spec = QuotientSpec::singular(t, kind, a, period)?;
        let rep = systolic_ratio(&spec)?;
        let mut note = annotation.to_string();
        if !rep.systole.exact {
            if !note.is_empty() {
                note.push_str("; ");
            }
            note.push_str("candidate minimum only, not proved sharp");
        }
        rows.push(vec![
            num(a),
            num(rep.systole.value),
            txt(rep.systole.binding.to_string()),
            num(rep.volume),
            num(rep.volume_error),
            num(rep.ratio),
            num(rep.ratio * rep.volume_error / rep.volume),
            txt(note),
        ]);
    }
    Ok(Report {
        command: "scan",
        columns: SCAN_COLUMNS,
        rows,
    })
}
