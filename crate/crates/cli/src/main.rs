use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use fc_monodromy::classify::{classify, ClassificationReport};
use fc_monodromy::export::{export_all, export_exact, export_numeric, matrix_names, MatrixExport};
use fc_monodromy::scalars::text::{format_complex, format_f64};
use fc_monodromy::series::{base_point, fc_series, in_domain, pde_residual, solution_f_i, SeriesValue};
use fc_monodromy::verify::{run_suite, Backing, SuiteOptions};
use fc_monodromy::{Basis, BinaryIndex, Error, Param, ParameterPoint, DEFAULT_TOL};

#[derive(Parser, Debug)]
#[command(
    name = "fc-mono",
    version,
    about = "Monodromy matrices and identity checks for the F_C hypergeometric system"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Numeric tolerance.
    #[arg(long, env = "FC_MONO_TOL", default_value_t = DEFAULT_TOL, global = true)]
    tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BackingArg {
    Exact,
    Numeric,
}

impl From<BackingArg> for Backing {
    fn from(b: BackingArg) -> Self {
        match b {
            BackingArg::Exact => Backing::Exact,
            BackingArg::Numeric => Backing::Numeric,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BasisArg {
    Plain,
    Tilde,
}

impl From<BasisArg> for Basis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Plain => Basis::Plain,
            BasisArg::Tilde => Basis::Tilde,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print named matrices in one basis.
    Matrices {
        /// Number of variables; must match the length of --c when both are given.
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_enum, default_value_t = BasisArg::Plain)]
        basis: BasisArg,
        /// M0 … Mm, H, Pm (plain) or Htilde (tilde); all when omitted.
        #[arg(long)]
        name: Option<String>,
        /// Exact rational functions in α, β, γ, or values at a parameter point.
        #[arg(long, value_enum, default_value_t = BackingArg::Exact)]
        backing: BackingArg,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Run the identity suite.
    Verify {
        /// Number of variables (1..=3 exact, 1..=5 numeric).
        #[arg(long)]
        m: usize,
        /// Exact rational functions in α, β, γ, or values at a parameter point.
        #[arg(long, value_enum, default_value_t = BackingArg::Exact)]
        backing: BackingArg,
        /// Seed for the numeric sample points.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random points for the numeric backing.
        #[arg(long)]
        points: Option<usize>,
        /// Flip one sign in v before building the tilde M0.
        #[arg(long)]
        mutate: bool,
        /// Record per-check wall time (makes output nondeterministic).
        #[arg(long)]
        timings: bool,
    },
    /// Irreducibility report for one parameter point.
    Classify {
        /// Number of variables; must match the length of --c when both are given.
        #[arg(long)]
        m: Option<usize>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Evaluate F_C or the local solutions F_I.
    Series {
        /// Number of variables; must match the length of --c when both are given.
        #[arg(long)]
        m: Option<usize>,
        #[command(flatten)]
        params: ParamArgs,
        /// Point as comma-separated coordinates; repeatable. Defaults to the base point.
        #[arg(long, allow_hyphen_values = true)]
        x: Vec<String>,
        /// Truncation order (total degree).
        #[arg(long, default_value_t = 20)]
        order: usize,
        /// Evaluate F_I for this index (e.g. 01), or `all`; F_C itself when omitted.
        #[arg(long)]
        index: Option<String>,
        /// Also report the PDE residual of each F_I.
        #[arg(long, requires = "index")]
        residual: bool,
    },
    /// Write every named matrix in both bases as JSON.
    Export {
        /// Number of variables; must match the length of --c when both are given.
        #[arg(long)]
        m: Option<usize>,
        /// Exact rational functions in α, β, γ, or values at a parameter point.
        #[arg(long, value_enum, default_value_t = BackingArg::Exact)]
        backing: BackingArg,
        #[command(flatten)]
        params: ParamArgs,
        /// Directory for one `<basis>-<name>.json` file per matrix; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Default)]
struct ParamArgs {
    /// a as p/q, integer, decimal or re±imi.
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    /// b, in the same forms as a.
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// c_1 … c_m, comma-separated or repeated.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    c: Vec<String>,
}

impl ParamArgs {
    fn given(&self) -> bool {
        self.a.is_some() || self.b.is_some() || !self.c.is_empty()
    }

    fn point(&self, m: Option<usize>) -> Result<ParameterPoint, Failure> {
        let (Some(a), Some(b)) = (&self.a, &self.b) else {
            return Err(usage("--a, --b and --c are required"));
        };
        if self.c.is_empty() {
            return Err(usage("--c is required"));
        }
        if let Some(m) = m {
            if m != self.c.len() {
                return Err(usage(format!("--m {m} but {} values of c", self.c.len())));
            }
        }
        let c: Vec<&str> = self.c.iter().map(String::as_str).collect();
        Ok(ParameterPoint::parse(a, b, &c)?)
    }
}

enum Failure {
    Usage(String),
    Checks(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn json<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Checks(out)) => {
            print!("{out}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<String, Failure> {
    let fmt = cli.format;
    let tol = cli.tol;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(usage(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    match cli.command {
        Command::Matrices {
            m,
            basis,
            name,
            backing,
            params,
        } => {
            let basis = Basis::from(basis);
            let (m, point) = resolve(m, backing, &params)?;
            let names = match name {
                Some(n) => vec![n],
                None => matrix_names(m, basis),
            };
            let mats = names
                .iter()
                .map(|n| match &point {
                    None => export_exact(m, basis, n),
                    Some(p) => export_numeric(p, basis, n, tol),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(match (fmt, mats.as_slice()) {
                (Format::Json, [one]) => json(one) + "\n",
                (Format::Json, _) => json(&mats) + "\n",
                (Format::Table, _) => mats.iter().map(matrix_table).collect(),
            })
        }
        Command::Verify {
            m,
            backing,
            seed,
            points,
            mutate,
            timings,
        } => {
            let backing = Backing::from(backing);
            let mut opts = SuiteOptions::new(m, backing, seed);
            match (backing, points) {
                (Backing::Exact, Some(_)) => return Err(usage("--points applies to the numeric backing only")),
                (Backing::Numeric, Some(k)) => opts.points = k,
                _ => {}
            }
            opts.tol = tol;
            opts.mutate = mutate;
            opts.timings = timings;
            let report = run_suite(&opts)?;
            let out = match fmt {
                Format::Json => json(&report) + "\n",
                Format::Table => report.to_table(),
            };
            if report.passed() {
                Ok(out)
            } else {
                Err(Failure::Checks(out))
            }
        }
        Command::Classify { m, params } => {
            let p = params.point(m)?;
            let report = classify(&p, tol);
            Ok(match fmt {
                Format::Json => json(&report) + "\n",
                Format::Table => classification_table(&p, &report),
            })
        }
        Command::Series {
            m,
            params,
            x,
            order,
            index,
            residual,
        } => {
            let p = params.point(m)?;
            let records = series_records(&p, &x, order, index.as_deref(), residual)?;
            Ok(match fmt {
                Format::Json => json(&records) + "\n",
                Format::Table => series_table(&records),
            })
        }
        Command::Export {
            m,
            backing,
            params,
            out,
        } => {
            let (m, point) = resolve(m, backing, &params)?;
            let mats = export_all(m, backing.into(), point.as_ref())?;
            match out {
                None => Ok(json(&mats) + "\n"),
                Some(dir) => {
                    fs::create_dir_all(&dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
                    let mut listing = String::new();
                    for e in &mats {
                        let path = dir.join(format!("{}-{}.json", e.basis, e.name));
                        fs::write(&path, e.to_json() + "\n").map_err(|e| usage(format!("{}: {e}", path.display())))?;
                        listing.push_str(&format!("{}\n", path.display()));
                    }
                    Ok(listing)
                }
            }
        }
    }
}

/// Exact backing takes only m; numeric takes a parameter point.
fn resolve(
    m: Option<usize>,
    backing: BackingArg,
    params: &ParamArgs,
) -> Result<(usize, Option<ParameterPoint>), Failure> {
    match backing {
        BackingArg::Exact => {
            if params.given() {
                return Err(usage(
                    "parameter values conflict with --backing exact (entries are symbolic)",
                ));
            }
            let m = m.ok_or_else(|| usage("--m is required"))?;
            if m == 0 || m > 5 {
                return Err(usage("exact matrices need 1 <= m <= 5"));
            }
            Ok((m, None))
        }
        BackingArg::Numeric => {
            let p = params.point(m)?;
            Ok((p.m(), Some(p)))
        }
    }
}

fn matrix_table(e: &MatrixExport) -> String {
    let mut out = format!("{} ({} basis, m = {})\n", e.name, e.basis, e.m);
    for row in &e.entries {
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

fn classification_table(p: &ParameterPoint, r: &ClassificationReport) -> String {
    let mut out = format!("a = {}, b = {}, c = [{}]\n", p.a, p.b, join(&p.c));
    out.push_str(&format!("verdict: {}\n", r.verdict()));
    for f in &r.failures {
        out.push_str(&format!("failure: I = {}, {}^I = {}\n", f.index, f.which, f.value));
    }
    for n in &r.near_misses {
        out.push_str(&format!(
            "near miss: I = {}, {}^I at distance {:.3e}\n",
            n.index, n.which, n.distance
        ));
    }
    if !r.c_integrality.is_empty() {
        let ks: Vec<String> = r.c_integrality.iter().map(|k| format!("c{k}")).collect();
        out.push_str(&format!("integer c: {}\n", ks.join(", ")));
    }
    out.push_str(&format!("lambda = 1: {}\n", r.lambda_is_one));
    if r.multiple_failures {
        out.push_str("multiple failures: no invariant subspace constructed\n");
    }
    if let Some(s) = &r.invariant_subspace {
        let idx: Vec<String> = s.indices.iter().map(ToString::to_string).collect();
        out.push_str(&format!(
            "invariant subspace: {} of dimension {} spanned by [{}] ({})\n",
            s.basis_label,
            s.dimension,
            idx.join(", "),
            s.case
        ));
    }
    out
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

#[derive(Serialize)]
struct SeriesRecord {
    point: Vec<String>,
    solution: String,
    in_domain: bool,
    value: String,
    order: usize,
    tail: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<ResidualRecord>,
}

#[derive(Serialize)]
struct ResidualRecord {
    exact: bool,
    max_abs: f64,
    max_relative: f64,
}

fn series_records(
    p: &ParameterPoint,
    xs: &[String],
    order: usize,
    index: Option<&str>,
    residual: bool,
) -> Result<Vec<SeriesRecord>, Failure> {
    let m = p.m();
    let points: Vec<Vec<num_complex::Complex64>> = if xs.is_empty() {
        vec![base_point(m)]
    } else {
        xs.iter()
            .map(|s| {
                let coords = s
                    .split(',')
                    .map(|t| t.parse::<Param>().map(|q| q.to_complex()))
                    .collect::<Result<Vec<_>, _>>()?;
                if coords.len() != m {
                    return Err(usage(format!(
                        "point {s:?} has {} coordinates, expected {m}",
                        coords.len()
                    )));
                }
                Ok(coords)
            })
            .collect::<Result<_, Failure>>()?
    };
    let indices: Option<Vec<BinaryIndex>> = match index {
        None => None,
        Some("all") => Some(BinaryIndex::all(m).collect()),
        Some(s) => {
            let i: BinaryIndex = s.parse()?;
            if i.m() != m {
                return Err(usage(format!("index {s} has length {}, expected {m}", i.m())));
            }
            Some(vec![i])
        }
    };
    let mut records = Vec::new();
    for x in &points {
        let point: Vec<String> = x.iter().map(|z| coordinate(*z)).collect();
        let mut push = |solution: String, v: SeriesValue, res: Option<ResidualRecord>| {
            records.push(SeriesRecord {
                point: point.clone(),
                solution,
                in_domain: in_domain(x),
                value: format_complex(v.value),
                order: v.order,
                tail: v.tail,
                residual: res,
            })
        };
        match &indices {
            None => push("F_C".into(), fc_series(&p.a, &p.b, &p.c, x, order)?, None),
            Some(list) => {
                for i in list {
                    let res = if residual {
                        let r = pde_residual(p, i, order, false)?;
                        Some(ResidualRecord {
                            exact: r.exact,
                            max_abs: r.max_abs,
                            max_relative: r.max_relative,
                        })
                    } else {
                        None
                    };
                    push(format!("F_{i}"), solution_f_i(p, i, x, order)?, res);
                }
            }
        }
    }
    Ok(records)
}

fn coordinate(z: num_complex::Complex64) -> String {
    if z.im == 0.0 {
        format_f64(z.re)
    } else {
        format_complex(z)
    }
}

fn series_table(records: &[SeriesRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&format!(
            "{}  x = [{}]  value = {}  N = {}  tail = {:.3e}{}",
            r.solution,
            r.point.join(", "),
            r.value,
            r.order,
            r.tail,
            if r.in_domain {
                ""
            } else {
                "  (outside the convergence domain)"
            }
        ));
        if let Some(res) = &r.residual {
            out.push_str(&format!(
                "  residual = {:.3e}{}",
                res.max_abs,
                if res.exact { " (exact)" } else { "" }
            ));
        }
        out.push('\n');
    }
    out
}
