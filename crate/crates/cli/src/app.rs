use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use deckmap::algebra::GaussianRational;
use deckmap::deck::deck_group;
use deckmap::detect::{detect_higher_degree, detect_quadratic, shared_iterate_analysis};
use deckmap::dynren::{render_with_threads, Palette, RenderSpec, Target};
use deckmap::ratmap::{critical_data, postcritical_orbit, Mode, Point, RationalMap};
use deckmap::sample;
use rand::rngs::StdRng;
use rand::SeedableRng;
use serde_json::{json, Value};

use crate::parse::{parse_binding, parse_map, ParseError};
use crate::report;

#[derive(Parser, Debug)]
#[command(name = "deckmap", version, about = "Exact analysis of bicritical rational maps and their iterates")]
pub struct Cli {
    /// Bind a parameter used in expressions, e.g. `--param a=2` (repeatable).
    #[arg(long = "param", value_name = "NAME=VALUE", global = true)]
    pub params: Vec<String>,
    /// Working precision in bits for numeric stages.
    #[arg(long, default_value_t = 53, global = true)]
    pub precision: usize,
    /// Write the JSON report to PATH (`-` for standard output).
    #[arg(long, value_name = "PATH", global = true)]
    pub json: Option<PathBuf>,
    /// Seed for the random sampling utilities.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Critical data, coalescing flag and postcritical orbit of a map.
    Analyze {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        /// Longest critical orbit followed before giving up.
        #[arg(long, default_value_t = deckmap::ratmap::DEFAULT_ORBIT_BOUND)]
        orbit_bound: usize,
    },
    /// Deck group of the K-th iterate.
    Deck {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        k: usize,
    },
    /// Recover the critical points and values of f from F = f^K, where the input is F.
    Detect {
        #[arg(allow_hyphen_values = true)]
        expr: String,
        #[arg(long)]
        k: usize,
        /// Degree of the unknown f.
        #[arg(long)]
        deg: usize,
    },
    /// Search for a shared iterate of two maps.
    Shared {
        #[arg(allow_hyphen_values = true)]
        expr1: String,
        #[arg(allow_hyphen_values = true)]
        expr2: String,
        #[arg(long = "max-k")]
        max_k: usize,
    },
    /// Render a Julia set or parameter plane.
    Render(RenderArgs),
    /// Print random maps from a family.
    Sample {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum RenderKind {
    Julia,
    ParamFa,
    ParamSigma2,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Family {
    Quadratic,
    Coalescing,
    Cubic,
    Fa,
    Sigma2,
}

#[derive(clap::Args, Debug)]
pub struct RenderArgs {
    #[arg(value_enum)]
    pub target: RenderKind,
    /// Map expression, required for `julia`.
    #[arg(allow_hyphen_values = true)]
    pub expr: Option<String>,
    #[arg(long, default_value_t = 256)]
    pub width: usize,
    #[arg(long, default_value_t = 256)]
    pub height: usize,
    #[arg(long, default_value_t = 256)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub cycle_eps: f64,
    #[arg(long, default_value_t = 16)]
    pub max_period: usize,
    /// `spectral` or `gray`.
    #[arg(long, default_value = "spectral")]
    pub palette: String,
    /// Mark points on the critical orbits (julia only).
    #[arg(long)]
    pub overlay: bool,
    /// Window center as `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub center: Option<String>,
    #[arg(long)]
    pub half_width: Option<f64>,
    /// PPM output; metadata goes next to it with a `.json` extension.
    #[arg(long, default_value = "render.ppm")]
    pub out: PathBuf,
    #[arg(long)]
    pub png: Option<PathBuf>,
    /// Worker threads (default: `DECKMAP_THREADS`, else one per core).
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Failure of a command: a stable tag, a message, and a source position for parse errors.
#[derive(Debug)]
pub struct Failure {
    pub kind: String,
    pub message: String,
    pub position: Option<usize>,
}

impl From<deckmap::Error> for Failure {
    fn from(e: deckmap::Error) -> Self {
        Failure { kind: e.kind().to_string(), message: e.to_string(), position: None }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure { kind: e.tag().to_string(), message: e.to_string(), position: Some(e.position) }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure { kind: "invalid-argument".into(), message: msg.into(), position: None }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure { kind: "io-error".into(), message: format!("{}: {e}", path.display()), position: None }
}

/// Outcome of a successful command: human-readable text and the JSON `input`/`result` sections.
pub struct Outcome {
    pub text: String,
    pub input: Value,
    pub result: Value,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Deck { .. } => "deck",
            Command::Detect { .. } => "detect",
            Command::Shared { .. } => "shared",
            Command::Render(_) => "render",
            Command::Sample { .. } => "sample",
        }
    }
}

fn bindings(cli: &Cli) -> Result<BTreeMap<String, GaussianRational>, Failure> {
    let mut out = BTreeMap::new();
    for b in &cli.params {
        let (name, value) = parse_binding(b).map_err(invalid)?;
        out.insert(name, value);
    }
    Ok(out)
}

fn params_json(p: &BTreeMap<String, GaussianRational>) -> Value {
    Value::Object(p.iter().map(|(k, v)| (k.clone(), json!(v.to_string()))).collect())
}

fn list(ps: &[Point]) -> String {
    let v: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

fn analyze(f: &RationalMap, orbit_bound: usize) -> Result<(String, Value), Failure> {
    let cd = critical_data(f, Mode::Exact)?;
    let mut text = String::new();
    let _ = writeln!(text, "map: {f}  (degree {})", f.degree());
    for (p, m) in &cd.points {
        let _ = writeln!(text, "critical point {p}  multiplicity {m}");
    }
    let _ = writeln!(text, "critical values: {}", list(&cd.value_set()));
    let _ = writeln!(text, "bicritical: {}  power map: {}", cd.bicritical, cd.is_power_map());
    if let Some(c) = cd.critically_coalescing {
        let _ = writeln!(text, "critically coalescing: {c}");
    }
    let orbit = if cd.bicritical {
        let o = postcritical_orbit(f, orbit_bound)?;
        let _ = writeln!(text, "postcritically finite within {orbit_bound}: {}", o.finite);
        for (i, c) in o.orbits.iter().enumerate() {
            let _ = writeln!(text, "orbit {i}: {}  preperiod {:?} period {:?}", list(&c.points), c.preperiod, c.period);
        }
        Some(report::postcritical(&o))
    } else {
        None
    };
    let result = json!({ "map": report::map(f), "critical": report::critical(&cd), "postcritical": orbit });
    Ok((text, result))
}

fn parse_center(s: &str) -> Result<(f64, f64), Failure> {
    let (a, b) = s.split_once(',').ok_or_else(|| invalid("center must be `re,im`"))?;
    let re = a.trim().parse().map_err(|_| invalid(format!("bad center `{s}`")))?;
    let im = b.trim().parse().map_err(|_| invalid(format!("bad center `{s}`")))?;
    Ok((re, im))
}

fn render_cmd(args: &RenderArgs, params: &BTreeMap<String, GaussianRational>) -> Result<(String, Value), Failure> {
    let palette = Palette::parse(&args.palette).ok_or_else(|| invalid(format!("unknown palette `{}`", args.palette)))?;
    let mut spec = match args.target {
        RenderKind::Julia => {
            let expr = args.expr.as_deref().ok_or_else(|| invalid("julia needs a map expression"))?;
            RenderSpec::julia(parse_map(expr, params)?)
        }
        RenderKind::ParamFa => RenderSpec::param_fa(),
        RenderKind::ParamSigma2 => RenderSpec::param_sigma2(),
    };
    if args.expr.is_some() && !matches!(args.target, RenderKind::Julia) {
        return Err(invalid("parameter planes take no map expression"));
    }
    let mut window = spec.target.window();
    if let Some(c) = &args.center {
        window.center = parse_center(c)?;
    }
    if let Some(h) = args.half_width {
        window.half_width = h;
    }
    spec.target = match spec.target {
        Target::Julia { map, .. } => Target::Julia { map, window },
        Target::ParamFa { .. } => Target::ParamFa { window },
        Target::ParamSigma2 { .. } => Target::ParamSigma2 { window },
    };
    spec.width = args.width;
    spec.height = args.height;
    spec.max_iter = args.max_iter;
    spec.cycle_eps = args.cycle_eps;
    spec.max_period = args.max_period;
    spec.palette = palette;
    spec.overlay_critical_orbits = args.overlay;
    if args.threads == Some(0) {
        return Err(invalid("threads must be at least 1"));
    }
    let threads = args.threads.or_else(|| {
        std::env::var("DECKMAP_THREADS").ok().and_then(|s| s.trim().parse().ok()).filter(|&n: &usize| n > 0)
    });
    let out = render_with_threads(&spec, threads)?;
    std::fs::write(&args.out, out.to_ppm()).map_err(|e| io_failure(&args.out, e))?;
    if let Some(p) = &args.png {
        std::fs::write(p, out.to_png()?).map_err(|e| io_failure(p, e))?;
    }
    let meta = out.metadata(&spec);
    let sidecar = args.out.with_extension("json");
    std::fs::write(&sidecar, serde_json::to_string_pretty(&meta).unwrap()).map_err(|e| io_failure(&sidecar, e))?;
    let mut text = format!("wrote {} ({}x{})\n", args.out.display(), out.width, out.height);
    if let Some(p) = &args.png {
        let _ = writeln!(text, "wrote {}", p.display());
    }
    let _ = writeln!(text, "metadata {}", sidecar.display());
    if let Some(a) = &out.atlas {
        let _ = writeln!(text, "attracting cycle periods: {:?}", a.periods());
    }
    for (c, n) in out.class_counts() {
        let _ = writeln!(text, "class {c}: {n} pixels");
    }
    let result = json!({
        "ppm": args.out.display().to_string(),
        "png": args.png.as_ref().map(|p| p.display().to_string()),
        "metadata_path": sidecar.display().to_string(),
        "metadata": meta,
    });
    Ok((text, result))
}

fn sample_cmd(family: Family, count: usize, seed: u64) -> (String, Value) {
    let mut rng = StdRng::seed_from_u64(seed);
    let maps: Vec<RationalMap> = (0..count)
        .map(|_| match family {
            Family::Quadratic => sample::quadratic(&mut rng),
            Family::Coalescing => sample::coalescing_quadratic(&mut rng),
            Family::Cubic => sample::bicritical_cubic(&mut rng),
            Family::Fa => sample::fa(&sample::fa_parameter(&mut rng)),
            Family::Sigma2 => sample::sigma2(&sample::nonzero_rational(&mut rng, 9)),
        })
        .collect();
    let text: String = maps.iter().map(|m| format!("{m}\n")).collect();
    (text, json!({ "maps": maps.iter().map(report::map).collect::<Vec<_>>() }))
}

/// Runs one parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    if !(24..=4096).contains(&cli.precision) {
        return Err(invalid(format!("precision must be between 24 and 4096 bits, got {}", cli.precision)));
    }
    let params = bindings(cli)?;
    let prec = cli.precision;
    let mut input = json!({ "params": params_json(&params), "precision": prec });
    let (text, result) = match &cli.command {
        Command::Analyze { expr, orbit_bound } => {
            input["expr"] = json!(expr);
            analyze(&parse_map(expr, &params)?, *orbit_bound)?
        }
        Command::Deck { expr, k } => {
            input["expr"] = json!(expr);
            input["k"] = json!(k);
            let f = parse_map(expr, &params)?;
            let dr = deck_group(&f, *k, prec)?;
            let mut text = format!("Deck(f^{k}) for f = {f}: {} of order {}\n", dr.iso_type(), dr.group.order());
            for (e, o) in dr.group.elements.iter().zip(&dr.group.orders) {
                let shown = match &e.exact {
                    Some(m) => m.to_string(),
                    None => format!("~{:?}", e.approx.m.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>()),
                };
                let _ = writeln!(text, "  {shown}  order {o}{}", if e.is_certified() { "" } else { "  (numeric)" });
            }
            (text, json!({ "map": report::map(&f), "deck": report::deck(&dr) }))
        }
        Command::Detect { expr, k, deg } => {
            input["expr"] = json!(expr);
            input["k"] = json!(k);
            input["deg"] = json!(deg);
            let big_f = parse_map(expr, &params)?;
            if *deg < 2 || *k < 1 {
                return Err(invalid("detection needs deg ≥ 2 and k ≥ 1"));
            }
            let expected = (*deg as u128).checked_pow(*k as u32);
            if expected != Some(big_f.degree() as u128) {
                return Err(invalid(format!("F has degree {}, expected {deg}^{k}", big_f.degree())));
            }
            let r = if *deg == 2 { detect_quadratic(&big_f, *k)? } else { detect_higher_degree(&big_f, *deg, *k)? };
            let text = format!(
                "case: {}\ncritical points: {}\ncritical values: {}\n",
                r.case.label(),
                list(&r.critical_points),
                list(&r.critical_values)
            );
            (text, json!({ "map": report::map(&big_f), "detection": report::detection(&r) }))
        }
        Command::Shared { expr1, expr2, max_k } => {
            input["expr1"] = json!(expr1);
            input["expr2"] = json!(expr2);
            input["max_k"] = json!(max_k);
            let f = parse_map(expr1, &params)?;
            let g = parse_map(expr2, &params)?;
            let r = shared_iterate_analysis(&f, &g, *max_k)?;
            let mut text = match r.minimal_k {
                Some(k) => format!("f^{k} = g^{k} (least such k)\n"),
                None => format!("no shared iterate up to k = {max_k}\n"),
            };
            let _ = writeln!(text, "C_f = {}  C_g = {}", list(&r.critical_points_f), list(&r.critical_points_g));
            let _ = writeln!(text, "V_f = {}  V_g = {}", list(&r.critical_values_f), list(&r.critical_values_g));
            if let Some(mu) = &r.mobius_factor {
                let _ = writeln!(text, "g = mu o f with mu = {mu}");
            }
            if r.theorem_alarm {
                let _ = writeln!(text, "warning: shared iterate with disagreeing critical data");
            }
            (text, json!({ "f": report::map(&f), "g": report::map(&g), "shared": report::shared(&r) }))
        }
        Command::Render(args) => {
            input["target"] = json!(format!("{:?}", args.target).to_lowercase());
            input["expr"] = json!(args.expr);
            render_cmd(args, &params)?
        }
        Command::Sample { family, count } => {
            let seed = cli.seed.unwrap_or(0);
            input["family"] = json!(format!("{family:?}").to_lowercase());
            input["count"] = json!(count);
            input["seed"] = json!(seed);
            sample_cmd(*family, *count, seed)
        }
    };
    Ok(Outcome { text, input, result })
}

fn emit_json(path: &Path, doc: &Value) -> Result<(), Failure> {
    let body = serde_json::to_string_pretty(doc).unwrap();
    if path == Path::new("-") {
        println!("{body}");
        Ok(())
    } else {
        std::fs::write(path, body + "\n").map_err(|e| io_failure(path, e))
    }
}

/// Entry point shared by the binary and tests; returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let name = cli.command.name();
    let to_stdout = cli.json.as_deref() == Some(Path::new("-"));
    match execute(&cli) {
        Ok(o) => {
            if !to_stdout {
                print!("{}", o.text);
            }
            if let Some(p) = &cli.json {
                if let Err(f) = emit_json(p, &report::envelope(name, o.input, o.result)) {
                    eprintln!("error: {}", f.message);
                    return 1;
                }
            }
            0
        }
        Err(f) => {
            eprintln!("error [{}]: {}", f.kind, f.message);
            if let Some(p) = &cli.json {
                let _ = emit_json(p, &report::error_envelope(name, &f.kind, &f.message, f.position));
            }
            1
        }
    }
}
