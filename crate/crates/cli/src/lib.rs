//! Command-line front end for `hz-arith`: tables of arithmetic data, Borcherds
//! lift expansions, Green-function values and intersection reports.
//!
//! [`run`] parses arguments, dispatches, and writes the rendered artifact
//! once at the end. Exit codes: 0 on success, 2 on invalid input, 3 when a
//! numerical routine fails to converge.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use hz_arith::analytic::{analytic_constants, AnalyticConstants, AnalyticValue};
use hz_arith::arith::{self, Rational};
use hz_arith::borcherds::{
    borcherds_lift, default_trace_bound, required_precision, weyl_chamber, weyl_vector,
};
use hz_arith::divisor_sums::{classify_t, eisenstein_coeff, sigma, sigma_real, vol_t, HZClass};
use hz_arith::green::{g_m_value, phi_m, GreenConfig, HPoint};
use hz_arith::intersection::{
    caveat_primes, congruence_index, d_n, faltings_height, generating_series_report, hz_pairing,
    level_warning, relation_check, self_intersection,
};
use hz_arith::obstruction::{
    build_input_form_checked, dim_plus_space, input_form_basis, load_cusp_basis, PrincipalPart,
};
use hz_arith::Error;

pub const SCHEMA_LINE: &str = "# hz-arith schema v1";
pub const OUT_DIR_ENV: &str = "HZ_ARITH_OUT_DIR";
const CAVEAT: &str = "well-defined modulo Q·log p for p | N";

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "hz-arith",
    version,
    about = "Arithmetic of Hilbert modular surfaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, value_enum, global = true, default_value = "text")]
    pub output: Format,

    /// Output file. Relative paths are resolved against $HZ_ARITH_OUT_DIR when set.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// σ_m(s) for one m or for 1 ≤ m ≤ m_max.
    Sigma {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
    },
    /// vol(T(m)).
    Volumes {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Coefficients B_D(n) of the weight-2 plus-space Eisenstein series, from n = 0.
    Eisenstein {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Type of T(m): empty, isotropic or anisotropic.
    Classify {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Reduced input forms q^{-n} + O(1) for poles up to --max-pole.
    Basis {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 10)]
        max_pole: u64,
        #[arg(long, default_value_t = 20)]
        prec: i64,
    },
    /// Borcherds product of the input form with the given principal part.
    Lift {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        lift: LiftArgs,
    },
    /// Green function G_m(z), or Φ_m(z, s) when --s > 1 is given.
    Green {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        m: u64,
        /// x1,y1,x2,y2
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        s: Option<f64>,
        #[command(flatten)]
        numerics: GreenArgs,
    },
    /// ζ'(−1), L'(−1, χ_D) and their logarithmic derivatives.
    Constants {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Self-intersection, and the pairing with T(m) or a relation check for --pp.
    Intersect {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        level: LevelArgs,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        pp: Option<String>,
    },
    /// Faltings heights of T(m).
    Heights {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        level: LevelArgs,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// Full generating-series report for 1 ≤ m ≤ m_max.
    Report {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        level: LevelArgs,
        #[arg(long, default_value_t = 20)]
        m_max: u64,
    },
}

#[derive(Args, Debug)]
pub struct FieldArgs {
    /// Prime discriminant D ≡ 1 (mod 4).
    #[arg(long = "D", value_parser = parse_discriminant)]
    pub d: i64,
}

#[derive(Args, Debug)]
pub struct RangeArgs {
    #[arg(long, conflicts_with = "m_max")]
    pub m: Option<u64>,
    #[arg(long)]
    pub m_max: Option<u64>,
}

#[derive(Args, Debug)]
pub struct LevelArgs {
    #[arg(long = "N", default_value_t = 3)]
    pub n: u64,
    #[arg(long, default_value_t = 1)]
    pub k: i64,
}

#[derive(Args, Debug)]
pub struct LiftArgs {
    /// Principal part, e.g. "-1:1,-4:2".
    #[arg(long, allow_hyphen_values = true)]
    pub pp: String,
    /// y1,y2 inside the Weyl chamber.
    #[arg(long)]
    pub sample: String,
    /// Rational bound on tr(w·ν); defaults to 10·tr(ρ) + 10.
    #[arg(long)]
    pub trace_bound: Option<String>,
    /// Precision of the input form; defaults to what the bound requires.
    #[arg(long)]
    pub prec: Option<i64>,
    /// JSON cusp-form basis used to test the principal part for obstructions.
    #[arg(long)]
    pub cusp_basis: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GreenArgs {
    #[arg(long)]
    pub lattice_radius: Option<f64>,
    #[arg(long)]
    pub taper_start: Option<f64>,
    #[arg(long)]
    pub quadrature_tol: Option<f64>,
    /// Comma-separated offsets in s for the Richardson path.
    #[arg(long)]
    pub offsets: Option<String>,
}

impl GreenArgs {
    fn config(&self) -> Result<GreenConfig, Error> {
        let mut cfg = GreenConfig::default();
        if let Some(r) = self.lattice_radius {
            cfg.lattice_radius = r;
        }
        if let Some(t) = self.taper_start {
            cfg.taper_start = t;
        }
        if let Some(t) = self.quadrature_tol {
            cfg.quadrature_tol = t;
        }
        if let Some(o) = &self.offsets {
            cfg.extrapolation_offsets = parse_reals(o, None)?;
        }
        Ok(cfg)
    }
}

fn parse_discriminant(s: &str) -> Result<i64, String> {
    let d: i64 = s.parse().map_err(|_| format!("'{s}' is not an integer"))?;
    arith::check_discriminant(d).map_err(|e| e.to_string())?;
    Ok(d)
}

fn parse_reals(s: &str, count: Option<usize>) -> Result<Vec<f64>, Error> {
    let xs = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("'{}' is not a number", t.trim())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(c) = count {
        if xs.len() != c {
            return Err(Error::InvalidArgument(format!(
                "expected {c} comma-separated numbers, got '{s}'"
            )));
        }
    }
    Ok(xs)
}

fn parse_rational(s: &str) -> Result<Rational, Error> {
    Rational::from_str(s.trim())
        .map_err(|_| Error::InvalidArgument(format!("'{s}' is not a rational number")))
}

impl RangeArgs {
    fn values(&self) -> Result<Vec<u64>, Error> {
        match (self.m, self.m_max) {
            (Some(m), None) => Ok(vec![m]),
            (None, Some(mx)) => Ok((1..=mx).collect()),
            _ => Err(Error::InvalidArgument(
                "one of --m or --m-max is required".into(),
            )),
        }
    }
}

/// A table cell. Rationals stay exact in every format.
#[derive(Clone, Debug)]
enum Cell {
    Int(i64),
    Big(String),
    Rational(Rational),
    Float(f64),
    Text(String),
    Null,
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Big(s) | Cell::Text(s) => s.clone(),
            Cell::Rational(r) => arith::fmt_rational(r),
            Cell::Float(x) => x.to_string(),
            Cell::Null => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Big(s) => match s.parse::<i64>() {
                Ok(i) => json!(i),
                Err(_) => json!(s),
            },
            Cell::Rational(r) => serde_json::to_value(arith::BigPair::from(r)).expect("pair"),
            Cell::Float(x) => json!(x),
            Cell::Text(s) => json!(s),
            Cell::Null => Value::Null,
        }
    }
}

/// Rows under fixed column names, with scalar metadata.
struct Table {
    meta: Vec<(&'static str, Cell)>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    notes: Vec<String>,
}

impl Table {
    fn new(meta: Vec<(&'static str, Cell)>, columns: Vec<&'static str>) -> Self {
        Table {
            meta,
            columns,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn to_json(&self) -> Value {
        let mut obj = Map::new();
        for (k, v) in &self.meta {
            obj.insert((*k).to_string(), v.json());
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(r)
                        .map(|(c, v)| ((*c).to_string(), v.json()))
                        .collect(),
                )
            })
            .collect();
        obj.insert("rows".into(), Value::Array(rows));
        if !self.notes.is_empty() {
            obj.insert("notes".into(), json!(self.notes));
        }
        Value::Object(obj)
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("{k} = {}\n", v.text()));
        }
        out.push_str(&self.body_text());
        out
    }

    /// Columns, rows and notes without the metadata lines.
    fn body_text(&self) -> String {
        let mut out = self.columns.join("\t");
        out.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(Cell::text).collect();
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        out
    }

    fn to_csv(&self) -> Result<String, Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(
            self.meta
                .iter()
                .map(|(k, _)| *k)
                .chain(self.columns.iter().copied()),
        )
        .map_err(csv_err)?;
        let meta: Vec<String> = self.meta.iter().map(|(_, v)| v.text()).collect();
        for r in &self.rows {
            w.write_record(meta.iter().cloned().chain(r.iter().map(Cell::text)))
                .map_err(csv_err)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| csv_err(e.into_error()))?)
            .expect("csv output is utf-8");
        let mut out = format!("{SCHEMA_LINE}\n");
        for n in &self.notes {
            out.push_str(&format!("# {n}\n"));
        }
        out.push_str(&body);
        Ok(out)
    }
}

fn csv_err(e: impl std::fmt::Display) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

/// What a subcommand produced: a table, or a JSON document with its own
/// text rendering and a tabular projection for CSV.
enum Artifact {
    Table(Table),
    Document {
        json: Value,
        text: String,
        table: Table,
    },
}

impl Artifact {
    fn render(&self, format: Format) -> Result<String, Error> {
        let (table, doc) = match self {
            Artifact::Table(t) => (t, None),
            Artifact::Document { json, text, table } => (table, Some((json, text))),
        };
        Ok(match (format, doc) {
            (Format::Json, Some((j, _))) => format!("{}\n", serde_json::to_string_pretty(j)?),
            (Format::Json, None) => {
                format!("{}\n", serde_json::to_string_pretty(&table.to_json())?)
            }
            (Format::Text, Some((_, t))) => t.clone(),
            (Format::Text, None) => table.to_text(),
            (Format::Csv, _) => table.to_csv()?,
        })
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Convergence(_) => EXIT_CONVERGENCE,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_INVALID,
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// writes its output to `stdout` or the `--out` file. Diagnostics go to
/// `stderr`. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { stdout } else { stderr };
            let _ = sink.write_all(rendered.as_bytes());
            return if code == 0 { EXIT_OK } else { EXIT_INVALID };
        }
    };
    let result = dispatch(&cli.command)
        .and_then(|a| a.render(cli.output))
        .and_then(|s| emit(&s, cli.out.as_deref(), stdout));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn output_path(out: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if out.is_relative() => Path::new(&dir).join(out),
        _ => out.to_path_buf(),
    }
}

fn emit(s: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(output_path(p), s)?,
        None => stdout.write_all(s.as_bytes())?,
    }
    Ok(())
}

fn dispatch(cmd: &Command) -> Result<Artifact, Error> {
    match cmd {
        Command::Sigma { field, range, s } => cmd_sigma(field.d, range, *s),
        Command::Volumes { field, range } => {
            let mut t = Table::new(vec![("D", Cell::Int(field.d))], vec!["m", "volume"]);
            for m in range.values()? {
                t.rows.push(vec![
                    Cell::Int(m as i64),
                    Cell::Rational(vol_t(field.d as u64, m as i64)?),
                ]);
            }
            Ok(Artifact::Table(t))
        }
        Command::Eisenstein { field, range } => {
            let mut t = Table::new(vec![("D", Cell::Int(field.d))], vec!["n", "coefficient"]);
            let ns = match (range.m, range.m_max) {
                (None, Some(mx)) => (0..=mx).collect(),
                _ => range.values()?,
            };
            for n in ns {
                t.rows.push(vec![
                    Cell::Int(n as i64),
                    Cell::Rational(eisenstein_coeff(field.d as u64, n as i64)?),
                ]);
            }
            Ok(Artifact::Table(t))
        }
        Command::Classify { field, range } => {
            let mut t = Table::new(vec![("D", Cell::Int(field.d))], vec!["m", "class"]);
            for m in range.values()? {
                let c = classify_t(field.d as u64, m as i64)?;
                t.rows
                    .push(vec![Cell::Int(m as i64), Cell::Text(c.to_string())]);
            }
            Ok(Artifact::Table(t))
        }
        Command::Basis {
            field,
            max_pole,
            prec,
        } => cmd_basis(field.d, *max_pole, *prec),
        Command::Lift { field, lift } => cmd_lift(field.d, lift),
        Command::Green {
            field,
            m,
            z,
            s,
            numerics,
        } => cmd_green(field.d, *m, z, *s, numerics),
        Command::Constants { field, tol } => {
            let c = analytic_constants(field.d as u64, *tol)?;
            let json = serde_json::to_value(&c)?;
            let table = constants_table(&c);
            Ok(Artifact::Document {
                json,
                text: table.to_text(),
                table,
            })
        }
        Command::Intersect {
            field,
            level,
            m,
            pp,
        } => cmd_intersect(field.d, level, *m, pp.as_deref()),
        Command::Heights {
            field,
            level,
            range,
        } => cmd_heights(field.d, level, range),
        Command::Report {
            field,
            level,
            m_max,
        } => cmd_report(field.d, level, *m_max),
    }
}

fn cmd_sigma(d: i64, range: &RangeArgs, s: f64) -> Result<Artifact, Error> {
    if !s.is_finite() {
        return Err(Error::InvalidArgument(format!("s must be finite, got {s}")));
    }
    let integral = s.fract() == 0.0 && s.abs() < 1e15;
    let value = |m: u64| -> Result<Cell, Error> {
        if integral {
            let v = sigma(d as u64, m as i64, s as i64)?;
            Ok(match v.exact() {
                Some(r) => Cell::Rational(r.clone()),
                None => Cell::Float(v.to_f64()),
            })
        } else {
            Ok(Cell::Float(sigma_real(d as u64, m as i64, s)?))
        }
    };
    let s_cell = if integral {
        Cell::Int(s as i64)
    } else {
        Cell::Float(s)
    };
    let mut t = Table::new(vec![("D", Cell::Int(d)), ("s", s_cell)], vec!["m", "sigma"]);
    for m in range.values()? {
        t.rows.push(vec![Cell::Int(m as i64), value(m)?]);
    }
    if range.m.is_some() {
        let text = format!("{}\n", t.rows[0][1].text());
        let json = t.to_json();
        return Ok(Artifact::Document {
            json,
            text,
            table: t,
        });
    }
    Ok(Artifact::Table(t))
}

fn cmd_basis(d: i64, max_pole: u64, prec: i64) -> Result<Artifact, Error> {
    let (dim_m, dim_s) = dim_plus_space(d)?;
    let basis = input_form_basis(d, max_pole, prec)?;
    let mut t = Table::new(
        vec![
            ("D", Cell::Int(d)),
            ("prec", Cell::Int(prec)),
            ("dim_m2_plus", Cell::Int(dim_m as i64)),
            ("dim_s2_plus", Cell::Int(dim_s as i64)),
        ],
        vec!["pole", "exponent", "coefficient"],
    );
    let mut forms = Map::new();
    let mut text = format!("D = {d}\ndim M2+ = {dim_m}\ndim S2+ = {dim_s}\n");
    text.push_str(&format!(
        "free exponents: {:?}\n",
        basis
            .free
            .iter()
            .filter(|&&n| -n as u64 <= max_pole)
            .collect::<Vec<_>>()
    ));
    for n in basis.pivots().filter(|&n| n.unsigned_abs() <= max_pole) {
        let f = basis.form(n).expect("pivot form");
        for (e, c) in f.terms() {
            t.rows
                .push(vec![Cell::Int(-n), Cell::Int(e), Cell::Rational(c.clone())]);
        }
        forms.insert((-n).to_string(), f.to_json_value());
        text.push_str(&format!("q^{n}: {f}\n"));
    }
    let free: Vec<i64> = basis
        .free
        .iter()
        .copied()
        .filter(|&n| n.unsigned_abs() <= max_pole)
        .collect();
    let json = json!({
        "D": d,
        "prec": prec,
        "dim_m2_plus": dim_m,
        "dim_s2_plus": dim_s,
        "free": free,
        "forms": forms,
    });
    Ok(Artifact::Document {
        json,
        text,
        table: t,
    })
}

fn cmd_lift(d: i64, args: &LiftArgs) -> Result<Artifact, Error> {
    let pp = PrincipalPart::parse(d, &args.pp)?;
    if pp.is_empty() {
        return Err(Error::InvalidArgument("principal part is empty".into()));
    }
    let sample = parse_reals(&args.sample, Some(2))?;
    let chamber = weyl_chamber(d, &pp.support(), (sample[0], sample[1]))?;
    let bound = match &args.trace_bound {
        Some(b) => parse_rational(b)?,
        None => default_trace_bound(&weyl_vector(&pp, &chamber)?),
    };
    let basis = args.cusp_basis.as_ref().map(load_cusp_basis).transpose()?;
    let prec = match args.prec {
        Some(p) => p,
        None => required_precision(&chamber, &pp, &bound)?.max(1),
    };
    let f = build_input_form_checked(&pp, prec, basis.as_ref())?;
    let series = borcherds_lift(&f, &chamber, &bound)?;
    let json: Value = serde_json::from_str(&series.to_json_string())?;

    let mut t = Table::new(
        vec![
            ("D", Cell::Int(d)),
            ("weight", Cell::Rational(series.weight().clone())),
        ],
        vec!["nu_a", "nu_b", "grade", "coefficient"],
    );
    for (nu, c) in series.coeffs() {
        t.rows.push(vec![
            Cell::Rational(nu.a().clone()),
            Cell::Rational(nu.b().clone()),
            Cell::Rational(series.grade(nu)),
            Cell::Big(c.to_string()),
        ]);
    }
    let mut text = format!(
        "D = {d}\nprincipal part = {pp}\nweight = {}\nweyl vector = {}\ntrace bound = {}\ndivisor =",
        arith::fmt_rational(series.weight()),
        series.weyl_vector(),
        arith::fmt_rational(series.trace_bound()),
    );
    for term in series.divisor() {
        text.push_str(&format!(
            " {}*T({}) [{}]",
            term.multiplicity.0, term.m, term.class
        ));
    }
    text.push('\n');
    text.push_str(&t.body_text());
    Ok(Artifact::Document {
        json,
        text,
        table: t,
    })
}

fn cmd_green(
    d: i64,
    m: u64,
    z: &str,
    s: Option<f64>,
    numerics: &GreenArgs,
) -> Result<Artifact, Error> {
    let xs = parse_reals(z, Some(4))?;
    let point = HPoint::new(xs[0], xs[1], xs[2], xs[3]);
    let cfg = numerics.config()?;
    let (label, sum) = match s {
        Some(s) => ("phi", phi_m(d, m, &point, s, &cfg)?),
        None => {
            let consts = analytic_constants(d as u64, cfg.quadrature_tol)?;
            ("green", g_m_value(d, m, &point, &cfg, &consts)?)
        }
    };
    let mut meta = vec![
        ("D", Cell::Int(d)),
        ("m", Cell::Int(m as i64)),
        ("function", Cell::Text(label.into())),
    ];
    if let Some(s) = s {
        meta.push(("s", Cell::Float(s)));
    }
    meta.push(("lattice_radius", Cell::Float(cfg.lattice_radius)));
    let mut t = Table::new(
        meta,
        vec!["x1", "y1", "x2", "y2", "value", "tail_estimate", "terms"],
    );
    let mut row: Vec<Cell> = xs.iter().map(|&x| Cell::Float(x)).collect();
    row.extend([
        Cell::Float(sum.value),
        Cell::Float(sum.tail_estimate),
        Cell::Int(sum.terms as i64),
    ]);
    t.rows.push(row);
    Ok(Artifact::Table(t))
}

fn constants_table(c: &AnalyticConstants) -> Table {
    let mut t = Table::new(vec![("D", Cell::Int(c.d as i64))], vec!["name", "value"]);
    for (name, v) in [
        ("zeta_prime_minus1", c.zeta_prime_minus1),
        ("l_prime_minus1", c.l_prime_minus1),
        ("zeta_prime_over_zeta_minus1", c.zeta_prime_over_zeta_minus1),
        ("l_prime_over_l_minus1", c.l_prime_over_l_minus1),
        ("lk_ratio", c.lk_ratio),
    ] {
        t.rows.push(vec![Cell::Text(name.into()), Cell::Float(v)]);
    }
    t
}

fn level_notes(n: u64) -> Vec<String> {
    let mut notes = Vec::new();
    if !caveat_primes(n).is_empty() {
        notes.push(format!(
            "values in R_N are {CAVEAT}; primes: {:?}",
            caveat_primes(n)
        ));
    }
    notes.extend(level_warning(n));
    notes
}

fn value_cells(v: &AnalyticValue, c: &AnalyticConstants) -> [Cell; 2] {
    [Cell::Text(v.to_string()), Cell::Float(v.eval(c))]
}

fn cmd_intersect(
    d: i64,
    level: &LevelArgs,
    m: Option<u64>,
    pp: Option<&str>,
) -> Result<Artifact, Error> {
    let consts = analytic_constants(d as u64, 1e-12)?;
    let mut t = Table::new(
        vec![
            ("D", Cell::Int(d)),
            ("N", Cell::Int(level.n as i64)),
            ("k", Cell::Int(level.k)),
            (
                "index",
                Cell::Big(congruence_index(d, level.n)?.to_string()),
            ),
            ("d_N", Cell::Big(d_n(d, level.n)?.to_string())),
        ],
        vec!["quantity", "symbolic", "value"],
    );
    t.notes = level_notes(level.n);
    let mut push = |name: String, v: &AnalyticValue| {
        let [a, b] = value_cells(v, &consts);
        t.rows.push(vec![Cell::Text(name), a, b]);
    };
    push(
        "self_intersection".into(),
        &self_intersection(d, level.n, level.k)?,
    );
    if let Some(m) = m {
        push(
            format!("pairing T({m})"),
            &hz_pairing(d, level.n, level.k, m)?,
        );
    }
    if let Some(pp) = pp {
        let pp = PrincipalPart::parse(d, pp)?;
        let check = relation_check(&pp, level.n, level.k)?;
        push(
            format!("relation residual [{}]", check.principal_part),
            &check.residual,
        );
    }
    Ok(Artifact::Table(t))
}

fn cmd_heights(d: i64, level: &LevelArgs, range: &RangeArgs) -> Result<Artifact, Error> {
    let consts = analytic_constants(d as u64, 1e-12)?;
    let mut t = Table::new(
        vec![
            ("D", Cell::Int(d)),
            ("N", Cell::Int(level.n as i64)),
            ("k", Cell::Int(level.k)),
        ],
        vec!["m", "class", "symbolic", "value"],
    );
    t.notes = level_notes(level.n);
    for m in range.values()? {
        let class = classify_t(d as u64, m as i64)?;
        let [a, b] = if class == HZClass::Empty {
            [Cell::Null, Cell::Null]
        } else {
            value_cells(&faltings_height(d, level.n, level.k, m)?, &consts)
        };
        t.rows.push(vec![
            Cell::Int(m as i64),
            Cell::Text(class.to_string()),
            a,
            b,
        ]);
    }
    Ok(Artifact::Table(t))
}

fn cmd_report(d: i64, level: &LevelArgs, m_max: u64) -> Result<Artifact, Error> {
    let r = generating_series_report(d, level.n, level.k, m_max)?;
    let mut json = serde_json::to_value(&r)?;
    json.as_object_mut()
        .expect("report is an object")
        .insert("caveat".into(), json!(CAVEAT));
    let mut t = Table::new(
        vec![
            ("D", Cell::Int(d)),
            ("N", Cell::Int(level.n as i64)),
            ("k", Cell::Int(level.k)),
        ],
        vec![
            "m",
            "class",
            "volume",
            "eisenstein",
            "pairing",
            "height",
            "ratio",
        ],
    );
    t.notes = level_notes(level.n);
    for m in 1..=m_max {
        let pair = |p: Option<&arith::BigPair>| -> Result<Cell, Error> {
            Ok(match p {
                Some(p) => Cell::Rational(p.to_rational().map_err(Error::Schema)?),
                None => Cell::Null,
            })
        };
        let float = |x: Option<f64>| x.map_or(Cell::Null, Cell::Float);
        t.rows.push(vec![
            Cell::Int(m as i64),
            Cell::Text(r.classes.get(&m).cloned().unwrap_or_default()),
            pair(r.volumes.get(&m))?,
            pair(r.eisenstein.get(&m))?,
            float(r.pairings.get(&m).map(|v| v.value)),
            float(r.heights.get(&m).map(|v| v.value)),
            float(r.eisenstein_ratio.get(&m).copied()),
        ]);
    }
    let mut text = format!(
        "D = {d}, N = {}, k = {}, d_N = {}\nself-intersection = {} = {}\nratio pairing/B_D = {}\n",
        level.n,
        level.k,
        r.d_n.0,
        r.self_intersection.symbolic,
        r.self_intersection.value,
        r.eisenstein_ratio_symbolic,
    );
    text.push_str(&t.body_text());
    for c in &r.relations {
        text.push_str(&format!(
            "relation [{}] weight {} residual {}\n",
            c.principal_part,
            arith::fmt_rational(&c.weight),
            c.residual
        ));
    }
    if !r.obstructed.is_empty() {
        text.push_str(&format!("obstructed: {:?}\n", r.obstructed));
    }
    for w in &r.warnings {
        text.push_str(&format!("warning: {w}\n"));
    }
    Ok(Artifact::Document {
        json,
        text,
        table: t,
    })
}
