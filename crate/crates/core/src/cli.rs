//! Command line driver. Every subcommand takes the same option set, either as
//! flags or from a JSON file given with `--config`; flags win over the file.

use std::fmt::Write as _;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Deserializer, Serialize};
use serde_json::json;

use crate::cayley::{self, bfs_ball, exp_radical_scan, girth, DEFAULT_VERTEX_CAP};
use crate::distortion::{distortion_equivariant, exact_c2, optimize_embedding, EmbedOptions, MetricTable};
use crate::embed::{build_bundle, EmbeddingBundle};
use crate::error::{Error, Result};
use crate::group::{Family, Group, SpecParams};
use crate::profile::{profile_curve, ProfileOptions};

#[derive(Parser, Debug)]
#[command(name = "qdist", version, about = "Word metrics, l^p profiles and embeddings of finite group quotients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Group parameters and derived orders.
    Group {
        #[command(subcommand)]
        action: GroupAction,
    },
    /// Balls and diameters in the Cayley graph.
    Cayley {
        #[command(subcommand)]
        action: CayleyAction,
    },
    /// Largest radius on which the quotient map is a ball isometry.
    Girth(Opts),
    /// Word length against the size of kernel elements in SOL.
    Expradical(Opts),
    /// Certified l^p profile at a list of radii.
    Profile(Opts),
    /// Build an equivariant embedding bundle.
    Embed(Opts),
    /// Measure the distortion of a saved bundle.
    Distort(Opts),
    /// Least Euclidean distortion of a small metric.
    C2(Opts),
    /// Sweep n: profile constant, distortion and bounds per quotient.
    Scan(Opts),
}

#[derive(Subcommand, Debug)]
enum GroupAction {
    Info(Opts),
}

#[derive(Subcommand, Debug)]
enum CayleyAction {
    /// Sphere sizes of a ball.
    Ball(Opts),
    /// Exact diameter of a finite group.
    Diam(Opts),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum MetricKind {
    Path,
    Cycle,
    Star,
    Uniform,
}

/// Options shared by all subcommands. The same fields, with the same names,
/// form the config file schema.
#[derive(Args, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct Opts {
    /// JSON config file; flags given on the command line take precedence.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Subcommand the config file was written for (checked, file only).
    #[arg(skip)]
    command: Option<String>,
    #[arg(long)]
    family: Option<Family>,
    #[arg(long)]
    m: Option<u64>,
    /// Quotient size; a comma-separated list for `scan`.
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    n: Vec<u64>,
    /// SOL matrix as `a,b,c,d` (row-major).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    matrix: Vec<i64>,
    #[arg(long)]
    p: Option<f64>,
    /// Radius; a comma-separated list for `profile`.
    #[arg(long, value_delimiter = ',')]
    #[serde(deserialize_with = "one_or_many")]
    radius: Vec<u32>,
    /// Embedding scale R.
    #[arg(long)]
    scale: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Cap on the group order (and on the Cayley vertex count).
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// Bundle file written by `embed`.
    #[arg(long)]
    bundle: Option<PathBuf>,
    /// Test metric for `c2`.
    #[arg(long)]
    metric: Option<MetricKind>,
    /// Number of points (leaves for a star) of the `c2` test metric.
    #[arg(long)]
    points: Option<usize>,
    /// JSON file holding a distance matrix for `c2`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Python plotting script written by `scan`.
    #[arg(long)]
    plot: Option<PathBuf>,
}

fn one_or_many<'de, D, T>(d: D) -> std::result::Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(match OneOrMany::deserialize(d)? {
        OneOrMany::One(x) => vec![x],
        OneOrMany::Many(v) => v,
    })
}

impl Opts {
    /// Fills unset flags from the config file, if any.
    fn resolve(mut self, command: &str) -> Result<Opts> {
        let Some(path) = self.config.take() else { return Ok(self) };
        let text = std::fs::read_to_string(&path)?;
        let file: Opts = serde_json::from_str(&text).map_err(|e| Error::parse(format!("{}: {e}", path.display())))?;
        if let Some(c) = &file.command {
            if c != command {
                return Err(Error::BadParam(format!("config is for {c:?}, not {command:?}")));
            }
        }
        macro_rules! fill {
            ($($f:ident),*) => { $( if self.$f.is_none() { self.$f = file.$f; } )* };
        }
        macro_rules! fill_vec {
            ($($f:ident),*) => { $( if self.$f.is_empty() { self.$f = file.$f; } )* };
        }
        fill!(family, m, p, scale, seed, tol, cap, out, format, bundle, metric, points, input, plot);
        fill_vec!(n, matrix, radius);
        Ok(self)
    }

    fn family(&self) -> Result<Family> {
        self.family.ok_or_else(|| Error::BadParam("--family is required".into()))
    }

    fn single_n(&self) -> Result<Option<u64>> {
        match self.n.as_slice() {
            [] => Ok(None),
            [n] => Ok(Some(*n)),
            _ => Err(Error::BadParam("expected a single --n".into())),
        }
    }

    fn single_radius(&self) -> Result<Option<u32>> {
        match self.radius.as_slice() {
            [] => Ok(None),
            [r] => Ok(Some(*r)),
            _ => Err(Error::BadParam("expected a single --radius".into())),
        }
    }

    fn params_with(&self, family: Family, n: Option<u64>) -> Result<SpecParams> {
        let mut params = SpecParams::new(family);
        params.m = self.m;
        params.n = n;
        params.cap = self.cap;
        match self.matrix.as_slice() {
            [] => {}
            &[a, b, c, d] => params.a = Some([[a, b], [c, d]]),
            _ => return Err(Error::BadParam("--matrix takes four entries a,b,c,d".into())),
        }
        Ok(params)
    }

    fn group(&self) -> Result<Group> {
        Group::from_params(&self.params_with(self.family()?, self.single_n()?)?)
    }

    fn vertex_cap(&self) -> usize {
        self.cap.map_or(DEFAULT_VERTEX_CAP, |c| usize::try_from(c).unwrap_or(usize::MAX))
    }

    /// Exponent with default 2, restricted to `[lo, 8]`.
    fn p(&self, lo: f64) -> Result<f64> {
        let p = self.p.unwrap_or(2.0);
        if !(lo..=8.0).contains(&p) {
            return Err(Error::BadParam(format!("p = {p} must lie in [{lo}, 8]")));
        }
        Ok(p)
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }

    fn emit_json(&self, value: &impl Serialize) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.emit(&s)
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code. Diagnostics go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Group { action: GroupAction::Info(o) } => group_info(o.resolve("group info")?),
        Command::Cayley { action: CayleyAction::Ball(o) } => cayley_ball(o.resolve("cayley ball")?),
        Command::Cayley { action: CayleyAction::Diam(o) } => cayley_diam(o.resolve("cayley diam")?),
        Command::Girth(o) => girth_cmd(o.resolve("girth")?),
        Command::Expradical(o) => expradical(o.resolve("expradical")?),
        Command::Profile(o) => profile(o.resolve("profile")?),
        Command::Embed(o) => embed(o.resolve("embed")?),
        Command::Distort(o) => distort(o.resolve("distort")?),
        Command::C2(o) => c2(o.resolve("c2")?),
        Command::Scan(o) => scan(o.resolve("scan")?),
    }
}

fn group_info(o: Opts) -> Result<()> {
    let g = o.group()?;
    let gens: Vec<String> = g.generators().iter().map(|x| g.format(x)).collect();
    o.emit_json(&json!({
        "label": g.spec().label(),
        "family": g.spec().family,
        "m": g.spec().m,
        "n": g.spec().n,
        "A": g.spec().a,
        "q": g.spec().q,
        "oA": g.spec().o_a,
        "order": g.spec().order,
        "cap": g.spec().cap,
        "generators": gens,
    }))
}

fn cayley_ball(o: Opts) -> Result<()> {
    let g = o.group()?;
    let ball = bfs_ball(&g, o.single_radius()?, o.vertex_cap())?;
    match o.format(Format::Csv) {
        Format::Csv => o.emit(&ball.sphere_csv()),
        Format::Json => o.emit_json(&json!({
            "group": g.spec().label(),
            "radius": ball.radius(),
            "size": ball.len(),
            "complete": ball.is_complete(),
            "spheres": ball.spheres(),
        })),
    }
}

fn cayley_diam(o: Opts) -> Result<()> {
    let report = cayley::diameter(&o.group()?, o.vertex_cap())?;
    match o.format(Format::Json) {
        Format::Json => o.emit_json(&report),
        Format::Csv => o.emit(&format!(
            "group,order,diameter,diam_N\n{},{},{},{}\n",
            report.group,
            report.order,
            report.diameter,
            report.diam_n.map(|d| d.to_string()).unwrap_or_default()
        )),
    }
}

fn girth_cmd(o: Opts) -> Result<()> {
    let quotient = o.group()?;
    if !quotient.spec().is_finite() {
        return Err(Error::BadParam("girth needs a finite family".into()));
    }
    let parent = Group::new(quotient.spec().parent())?;
    let cap = o.single_radius()?.unwrap_or(6);
    o.emit_json(&girth(&parent, &quotient, cap, o.vertex_cap())?)
}

fn expradical(o: Opts) -> Result<()> {
    let g = o.group()?;
    let report = exp_radical_scan(&g, o.single_radius()?.unwrap_or(12), o.vertex_cap())?;
    match o.format(Format::Csv) {
        Format::Csv => o.emit(&report.csv()),
        Format::Json => o.emit_json(&report),
    }
}

fn profile(o: Opts) -> Result<()> {
    let g = o.group()?;
    let p = o.p(1.0)?;
    let radii = if o.radius.is_empty() {
        let d = cayley::diameter(&g, o.vertex_cap())?.diameter;
        (1..=d / 2).collect()
    } else {
        o.radius.clone()
    };
    let curve = profile_curve(&g, p, &radii, &ProfileOptions::default(), o.vertex_cap())?;
    match o.format(Format::Csv) {
        Format::Csv => o.emit(&curve.csv()),
        Format::Json => {
            let vectors: Vec<_> = curve.vectors.iter().map(|tv| tv.to_json(&g)).collect();
            o.emit_json(&json!({
                "group": g.spec().label(),
                "p": p,
                "diameter": curve.diameter,
                "C_hat": curve.c_hat,
                "points": curve.points,
                "vectors": vectors,
            }))
        }
    }
}

fn embed(o: Opts) -> Result<()> {
    let g = o.group()?;
    let bundle = build_bundle(&g, o.p(2.0)?, o.scale, &ProfileOptions::default(), o.vertex_cap())?;
    let mut v = bundle.to_json(true);
    v["apriori"] = serde_json::to_value(bundle.apriori_bound())?;
    o.emit_json(&v)
}

fn load_bundle(o: &Opts) -> Result<EmbeddingBundle> {
    let path = o.bundle.as_ref().ok_or_else(|| Error::BadParam("--bundle is required".into()))?;
    let text = std::fs::read_to_string(path)?;
    let bundle = EmbeddingBundle::from_json(&serde_json::from_str(&text)?)?;
    if bundle.p < 2.0 || bundle.p > 8.0 {
        return Err(Error::BadParam(format!("bundle exponent p = {} must lie in [2, 8]", bundle.p)));
    }
    Ok(bundle)
}

fn distort(o: Opts) -> Result<()> {
    let bundle = load_bundle(&o)?;
    let ball = bfs_ball(bundle.group(), None, o.vertex_cap())?;
    let report = distortion_equivariant(&bundle, &ball, o.scale)?;
    let bound = bundle.apriori_bound();
    match o.format(Format::Json) {
        Format::Json => o.emit_json(&json!({
            "group": bundle.spec().label(),
            "p": bundle.p,
            "report": report,
            "apriori": bound,
        })),
        Format::Csv => o.emit(&format!(
            "R,expansion,contraction,dist,dist_bound\n{},{},{},{},{}\n",
            report.scale, report.expansion, report.contraction, report.dist, bound.dist_bound
        )),
    }
}

fn c2(o: Opts) -> Result<()> {
    let metric = match (&o.input, o.metric) {
        (Some(path), None) => {
            let rows: Vec<Vec<f64>> = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            MetricTable::new(rows)?
        }
        (None, Some(kind)) => {
            let k = o.points.ok_or_else(|| Error::BadParam("--points is required with --metric".into()))?;
            match kind {
                MetricKind::Path => MetricTable::path(k)?,
                MetricKind::Cycle => MetricTable::cycle(k)?,
                MetricKind::Star => MetricTable::star(k)?,
                MetricKind::Uniform => MetricTable::uniform(k)?,
            }
        }
        _ => return Err(Error::BadParam("give exactly one of --metric or --input".into())),
    };
    let tol = o.tol.unwrap_or(1e-4);
    let exact = exact_c2(&metric, tol)?;
    let opts = EmbedOptions { seed: o.seed.unwrap_or(0), ..Default::default() };
    let dim = metric.len().saturating_sub(1).max(1);
    let (_, heuristic) = optimize_embedding(&metric, 2.0, dim, &opts)?;
    match o.format(Format::Json) {
        Format::Json => o.emit_json(&json!({
            "points": metric.len(),
            "tol": tol,
            "c2": exact.c2,
            "lower": exact.lower,
            "upper": exact.upper,
            "bisections": exact.bisections,
            "heuristic_dist": heuristic.dist,
            "gram": exact.gram,
        })),
        Format::Csv => o.emit(&format!(
            "points,c2,lower,upper,heuristic_dist\n{},{},{},{},{}\n",
            metric.len(),
            exact.c2,
            exact.lower,
            exact.upper,
            heuristic.dist
        )),
    }
}

#[derive(Debug, Serialize)]
struct ScanRow {
    n: u64,
    order: u64,
    diam: u32,
    #[serde(rename = "C_hat")]
    c_hat: Option<f64>,
    dist_emp: f64,
    dist_bound: f64,
    log_diam_pow: f64,
    ratio: f64,
}

fn scan_row(o: &Opts, family: Family, n: u64, p: f64) -> Result<ScanRow> {
    let g = Group::from_params(&o.params_with(family, Some(n))?)?;
    let cap = o.vertex_cap();
    let opts = ProfileOptions::default();
    let ball = bfs_ball(&g, None, cap)?;
    let diam = ball.max_length();
    let c_hat = if diam >= 4 { profile_curve(&g, p, &(1..=diam / 2).collect::<Vec<_>>(), &opts, cap)?.c_hat } else { None };
    let bundle = build_bundle(&g, p, o.scale, &opts, cap)?;
    let report = distortion_equivariant(&bundle, &ball, None)?;
    let log_diam_pow = (diam as f64).ln().powf(1.0 / p);
    Ok(ScanRow {
        n,
        order: g.order().expect("finite family"),
        diam,
        c_hat,
        dist_emp: report.dist,
        dist_bound: bundle.apriori_bound().dist_bound,
        log_diam_pow,
        ratio: report.dist / log_diam_pow,
    })
}

fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from("n,order,diam,C_hat,dist_emp,dist_bound,log_diam_pow,ratio\n");
    for r in rows {
        let c = r.c_hat.map(|c| c.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.n, r.order, r.diam, c, r.dist_emp, r.dist_bound, r.log_diam_pow, r.ratio
        );
    }
    out
}

fn plot_script(label: &str, p: f64, rows: &[ScanRow]) -> String {
    let col = |f: &dyn Fn(&ScanRow) -> String| rows.iter().map(f).collect::<Vec<_>>().join(", ");
    format!(
        "# Distortion against (ln n)^(1/p) for {label}, p = {p}.\n\
         import math\n\
         import matplotlib.pyplot as plt\n\n\
         p = {p}\n\
         n = [{n}]\n\
         dist_emp = [{emp}]\n\
         dist_bound = [{bound}]\n\
         x = [math.log(k) ** (1 / p) for k in n]\n\n\
         plt.plot(x, dist_emp, 'o-', label='measured distortion')\n\
         plt.plot(x, dist_bound, 's--', label='a-priori bound')\n\
         plt.xlabel('(ln n)^(1/p)')\n\
         plt.ylabel('distortion')\n\
         plt.title('{label}')\n\
         plt.legend()\n\
         plt.savefig('scan.png', dpi=150)\n",
        n = col(&|r| r.n.to_string()),
        emp = col(&|r| r.dist_emp.to_string()),
        bound = col(&|r| r.dist_bound.to_string()),
    )
}

fn scan(o: Opts) -> Result<()> {
    let family = o.family()?;
    if !family.is_finite() {
        return Err(Error::BadParam("scan needs a finite family".into()));
    }
    if o.n.is_empty() {
        return Err(Error::BadParam("--n list is required".into()));
    }
    let p = o.p(2.0)?;
    let rows = o.n.iter().map(|&n| scan_row(&o, family, n, p)).collect::<Result<Vec<_>>>()?;
    if let Some(path) = &o.plot {
        let label = format!("{family} m={}", o.m.map(|m| m.to_string()).unwrap_or_else(|| "-".into()));
        std::fs::write(path, plot_script(&label, p, &rows))?;
    }
    match o.format(Format::Csv) {
        Format::Csv => o.emit(&scan_csv(&rows)),
        Format::Json => o.emit_json(&rows),
    }
}
