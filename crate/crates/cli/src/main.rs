/// `println!` that exits quietly when stdout is closed (e.g. piped into `head`).
macro_rules! out {
    ($($t:tt)*) => {
        $crate::write_line(format_args!($($t)*))
    };
}

mod output;

use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;

use weylcalc::bohr_sommerfeld::{bs_eigenvalues, schrodinger_oracle, ActionForm, Hamiltonian1D, MAX_BS_ORDER};
use weylcalc::functional_calculus::{symbol_of_function, Form, FunctionJet, Materialized};
use weylcalc::graphs::{
    canonicalize, enumerate_reduced, ArrowGraph, EnumOptions, LabeledGraph, UnlabeledGraph,
};
use weylcalc::lambda_eval::lambda_arrows;
use weylcalc::phase::{infer_dimension, parse_symbol, HbarSeries, TensorKind, MAX_TRUNCATION_ORDER};
use weylcalc::quadratic::{
    closed_form_jets, quadratic_closed_symbol, time_evolution_closed, zag_numbers, zag_via_bernoulli,
    zag_via_tangent, QuadraticForm,
};
use weylcalc::scalar::{parse_rational, rational_to_f64};
use weylcalc::star_products::{moyal, StarConfig};
use weylcalc::verify;
use weylcalc::{Error, GaussianRational, Poly};

use output::{print_json, sig12, Emit};

#[derive(Parser, Debug)]
#[command(name = "weylcalc", version, about = "Exact Weyl symbol calculus from graph expansions")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ConfigArgs {
    /// ℏ truncation order (at most 8).
    #[arg(long, global = true, env = "WEYLCALC_ORDER", default_value_t = 4)]
    order: usize,
    #[arg(long, global = true, value_enum, default_value_t = TensorArg::Moyal)]
    tensor: TensorArg,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for the random batteries of `verify`.
    #[arg(long, global = true, default_value_t = 20240611)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum TensorArg {
    Moyal,
    Standard,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Validated run configuration.
#[derive(Clone, Debug)]
struct RunConfig {
    order: usize,
    tensor: TensorKind,
    format: Option<Format>,
    seed: u64,
}

impl RunConfig {
    fn from_args(a: &ConfigArgs) -> Result<Self, Failure> {
        if a.order > MAX_TRUNCATION_ORDER {
            return Err(Failure::Usage(format!("--order {} exceeds the maximum {MAX_TRUNCATION_ORDER}", a.order)));
        }
        let tensor = match a.tensor {
            TensorArg::Moyal => TensorKind::Moyal,
            TensorArg::Standard => TensorKind::Standard,
        };
        Ok(RunConfig { order: a.order, tensor, format: a.format, seed: a.seed })
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn star(&self, dim: usize) -> Result<StarConfig, Failure> {
        let tensor = weylcalc::phase::QuantizationTensor::from_kind(self.tensor, dim)?;
        Ok(StarConfig::new(tensor, self.order)?)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate graphs or compute S_Γ and c_Γ.
    Graphs {
        #[command(subcommand)]
        action: GraphsCmd,
    },
    /// λ_Γ of an oriented graph with a symbol at each vertex.
    Lambda {
        /// Arrows, 1-indexed: "1->2,1->2,2->3".
        #[arg(long)]
        graph: String,
        /// One symbol for every vertex, or one per vertex in order.
        #[arg(long = "symbol", required = true)]
        symbols: Vec<String>,
    },
    /// Star product of two symbols.
    Star {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Symbol of f(Â).
    Expand {
        #[arg(long)]
        symbol: String,
        /// abstract | poly:c0,c1,… | exp:r | resolvent
        #[arg(long, default_value = "abstract")]
        function: String,
        #[arg(long, default_value = "labeled")]
        form: String,
    },
    /// Closed forms for a quadratic symbol ½ zᵀQz.
    Quadratic {
        /// Rows separated by ';', e.g. "1,0;0,1".
        #[arg(long)]
        q: String,
        #[arg(long, default_value = "abstract")]
        function: String,
        /// Time evolution e^{−itÂ/ℏ} through t^T instead.
        #[arg(long, value_name = "T")]
        time: Option<usize>,
    },
    /// Zag numbers |c_{Δ_k}| for k < K.
    Zag {
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, value_enum, default_value_t = ZagRoute::Recurrence)]
        route: ZagRoute,
    },
    /// Bohr–Sommerfeld eigenvalues of p²/2m + V(x).
    Bs {
        #[arg(long)]
        potential: String,
        #[arg(long, default_value = "1")]
        mass: String,
        #[arg(long, default_value_t = 1.0)]
        hbar: f64,
        #[arg(long, default_value_t = 6)]
        levels: usize,
        #[arg(long, value_enum, default_value_t = BsForm::Reduced)]
        form: BsForm,
        #[arg(long)]
        compare_oracle: bool,
    },
    /// Run the cross-oracle checks and print a pass/fail matrix.
    Verify {
        #[arg(long)]
        all: bool,
        /// Run only these check numbers.
        #[arg(long = "check", num_args = 1.., value_delimiter = ',')]
        checks: Vec<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum GraphsCmd {
    /// List graphs with E edges and no isolated vertices.
    Enum {
        #[arg(long)]
        edges: usize,
        /// Only graphs that enter the expansions (no odd-edge component).
        #[arg(long)]
        reduced: bool,
        #[arg(long)]
        connected: bool,
    },
    /// S_Γ, c_Γ and structure of one graph.
    Invariants {
        /// Edges, 1-indexed: "1-2,1-2,2-3".
        #[arg(long)]
        graph: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum ZagRoute {
    Recurrence,
    Tangent,
    Bernoulli,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum BsForm {
    Reduced,
    Full,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) | Error::NotBracketed(_) | Error::Capacity(_) => Failure::Runtime(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Verification) => ExitCode::from(1),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = RunConfig::from_args(&cli.config)?;
    match cli.command {
        Command::Graphs { action } => graphs(&cfg, action),
        Command::Lambda { graph, symbols } => lambda_cmd(&cfg, &graph, &symbols),
        Command::Star { left, right } => star(&cfg, &left, &right),
        Command::Expand { symbol, function, form } => expand(&cfg, &symbol, &function, &form),
        Command::Quadratic { q, function, time } => quadratic(&cfg, &q, &function, time),
        Command::Zag { k, route } => zag(&cfg, k, route),
        Command::Bs { potential, mass, hbar, levels, form, compare_oracle } => {
            bs(&cfg, &potential, &mass, hbar, levels, form, compare_oracle)
        }
        Command::Verify { all, checks } => verify_cmd(&cfg, all, &checks),
    }
}

fn parse_pairs(text: &str, sep: &str) -> Result<(usize, Vec<(usize, usize)>), Failure> {
    let mut pairs = Vec::new();
    let mut v = 0;
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (a, b) = item
            .split_once(sep)
            .ok_or_else(|| Failure::Usage(format!("expected `a{sep}b`, got `{item}`")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<usize>()
                .ok()
                .filter(|&k| k >= 1)
                .ok_or_else(|| Failure::Usage(format!("bad vertex `{s}` (vertices start at 1)")))
        };
        let (a, b) = (parse(a)?, parse(b)?);
        v = v.max(a).max(b);
        pairs.push((a - 1, b - 1));
    }
    Ok((v, pairs))
}

fn graphs(cfg: &RunConfig, action: GraphsCmd) -> Result<(), Failure> {
    let fmt = cfg.format_or(Format::Text);
    let rows: Vec<(UnlabeledGraph, weylcalc::graphs::GraphInvariants)> = match action {
        GraphsCmd::Enum { edges, reduced, connected } => {
            let opts = EnumOptions { connected_only: connected, include_odd_components: !reduced, ..Default::default() };
            enumerate_reduced(edges, opts)?
                .into_iter()
                .map(|g| g.invariants().map(|i| (g, i)))
                .collect::<Result<_, _>>()?
        }
        GraphsCmd::Invariants { graph } => {
            let (v, edges) = parse_pairs(&graph, "-")?;
            let g = canonicalize(&LabeledGraph::new(v, edges)?);
            let inv = g.invariants()?;
            vec![(g, inv)]
        }
    };
    match fmt {
        Format::Json => {
            let items: Vec<output::GraphRow> = rows.iter().map(|(g, i)| output::GraphRow::new(g, i)).collect();
            print_json(&items)
        }
        Format::Csv => {
            out!("V,edges,S,c,connected");
            for (g, i) in &rows {
                let edges: Vec<String> = g.edges().iter().map(|(a, b)| format!("{}-{}", a + 1, b + 1)).collect();
                out!("{},{},{},{},{}", g.vertex_count(), edges.join(" "), i.s, i.c, i.connected);
            }
            Ok(())
        }
        Format::Text => {
            for (g, i) in &rows {
                out!("{g}  S={} c={}", i.s, i.c);
            }
            Ok(())
        }
    }
}

fn parse_poly(text: &str) -> Result<Poly, Failure> {
    Ok(parse_symbol::<GaussianRational>(text, None)?)
}

/// Parse several symbols in the largest dimension any of them needs.
fn parse_polys(texts: &[&str]) -> Result<Vec<Poly>, Failure> {
    let mut dim = 1;
    for t in texts {
        dim = dim.max(infer_dimension(t)?);
    }
    texts.iter().map(|t| Ok(parse_symbol::<GaussianRational>(t, Some(dim))?)).collect()
}

fn lambda_cmd(cfg: &RunConfig, graph: &str, symbols: &[String]) -> Result<(), Failure> {
    let (v, arrows) = parse_pairs(graph, "->")?;
    let g = ArrowGraph::new(v.max(1), arrows)?;
    let texts: Vec<&str> = symbols.iter().map(String::as_str).collect();
    let polys = parse_polys(&texts)?;
    let assign = match polys.len() {
        1 => vec![polys[0].clone(); g.vertex_count()],
        n if n == g.vertex_count() => polys,
        n => return Err(Failure::Usage(format!("{n} symbols for {} vertices", g.vertex_count()))),
    };
    let tensor = weylcalc::phase::QuantizationTensor::from_kind(cfg.tensor, assign[0].dimension())?;
    let out = lambda_arrows(&g, &assign, &tensor)?;
    out.emit(cfg.format_or(Format::Json))
}

fn star(cfg: &RunConfig, left: &str, right: &str) -> Result<(), Failure> {
    let polys = parse_polys(&[left, right])?;
    let sc = cfg.star(polys[0].dimension())?;
    let a = HbarSeries::constant(cfg.order, polys[0].clone())?;
    let b = HbarSeries::constant(cfg.order, polys[1].clone())?;
    moyal(&a, &b, &sc)?.emit(cfg.format_or(Format::Json))
}

fn expand(cfg: &RunConfig, symbol: &str, function: &str, form: &str) -> Result<(), Failure> {
    let a = parse_poly(symbol)?;
    let f = FunctionJet::<GaussianRational>::parse(function)?;
    let form = Form::from_str(form)?;
    let sc = cfg.star(a.dimension())?;
    let series = HbarSeries::constant(cfg.order, a)?;
    let result = symbol_of_function(&series, &f, form, &sc)?;
    let fmt = cfg.format_or(Format::Json);
    match result.value {
        None => result.jets.emit(fmt),
        Some(m) => m.emit(fmt),
    }
}

fn quadratic(cfg: &RunConfig, q: &str, function: &str, time: Option<usize>) -> Result<(), Failure> {
    let q = QuadraticForm::parse(q)?;
    let fmt = cfg.format_or(Format::Json);
    if let Some(t) = time {
        return time_evolution_closed::<GaussianRational>(&q, t)?.emit(fmt);
    }
    let f = FunctionJet::<GaussianRational>::parse(function)?;
    match f {
        FunctionJet::Abstract => closed_form_jets::<GaussianRational>(&q, cfg.order)?.emit(fmt),
        f => {
            let m: Materialized<GaussianRational> = quadratic_closed_symbol(&q, &f, cfg.order)?;
            m.emit(fmt)
        }
    }
}

fn zag(cfg: &RunConfig, k: usize, route: ZagRoute) -> Result<(), Failure> {
    if k == 0 {
        return Err(Failure::Usage("--k must be at least 1".into()));
    }
    let values = match route {
        ZagRoute::Recurrence => zag_numbers(k - 1),
        ZagRoute::Tangent => zag_via_tangent(k - 1),
        ZagRoute::Bernoulli => zag_via_bernoulli(k - 1),
    };
    let text: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    match cfg.format_or(Format::Text) {
        Format::Json => print_json(&text),
        Format::Csv => {
            out!("k,zag");
            for (i, v) in text.iter().enumerate() {
                out!("{i},{v}");
            }
            Ok(())
        }
        Format::Text => {
            out!("{}", text.join(" "));
            Ok(())
        }
    }
}

fn bs(
    cfg: &RunConfig,
    potential: &str,
    mass: &str,
    hbar: f64,
    levels: usize,
    form: BsForm,
    compare_oracle: bool,
) -> Result<(), Failure> {
    if cfg.order > MAX_BS_ORDER || cfg.order % 2 == 1 {
        return Err(Failure::Usage(format!("bs needs --order 0, 2 or 4, got {}", cfg.order)));
    }
    if levels == 0 || !(hbar > 0.0) {
        return Err(Failure::Usage("--levels and --hbar must be positive".into()));
    }
    let mass: BigRational =
        parse_rational(mass).ok_or_else(|| Failure::Usage(format!("mass `{mass}` is not a rational number")))?;
    let h = Hamiltonian1D::parse_split(mass, potential)?;
    let form = match form {
        BsForm::Reduced => ActionForm::Reduced,
        BsForm::Full => ActionForm::Full,
    };
    let ns: Vec<usize> = (1..=levels).collect();
    let result = bs_eigenvalues::<f64>(&h, hbar, &ns, cfg.order, form)?;
    let oracle = if compare_oracle {
        let split = h.split().expect("parsed in split form");
        let v: Vec<f64> = split.potential.iter().map(rational_to_f64).collect();
        let o = schrodinger_oracle(rational_to_f64(&split.mass), &v, hbar, levels)?;
        if !o.converged {
            eprintln!("warning: oracle did not reach its tolerance");
        }
        Some(o.energies)
    } else {
        None
    };
    let rows: Vec<output::BsRow> = result
        .iter()
        .map(|l| {
            let best = l.energy(cfg.order);
            let exact = oracle.as_ref().map(|o| o[l.n - 1]);
            if l.blowup {
                eprintln!("warning: n={} correction series is not decreasing (|ℏ⁴ term| > |ℏ² term|)", l.n);
            }
            output::BsRow {
                n: l.n,
                e_bs0: l.energy(0),
                e_bs2: l.energy(2),
                e_bs4: l.energy(4),
                e_oracle: exact,
                abs_err: best.zip(exact).map(|(b, e)| (b - e).abs()),
                blowup: l.blowup,
            }
        })
        .collect();
    match cfg.format_or(Format::Csv) {
        Format::Json => print_json(&rows),
        _ => {
            out!("n,E_bs0,E_bs2,E_bs4,E_oracle,abs_err");
            let cell = |x: Option<f64>| x.map(sig12).unwrap_or_default();
            for r in &rows {
                out!(
                    "{},{},{},{},{},{}",
                    r.n,
                    cell(r.e_bs0),
                    cell(r.e_bs2),
                    cell(r.e_bs4),
                    cell(r.e_oracle),
                    cell(r.abs_err)
                );
            }
            Ok(())
        }
    }
}

fn verify_cmd(cfg: &RunConfig, all: bool, checks: &[usize]) -> Result<(), Failure> {
    let ids: Vec<usize> = if all || checks.is_empty() {
        verify::check_names().into_iter().map(|c| c.0).collect()
    } else {
        checks.to_vec()
    };
    let mut reports = Vec::new();
    for id in ids {
        let r = verify::run_check(id, cfg.seed).ok_or_else(|| Failure::Usage(format!("no check numbered {id}")))?;
        if cfg.format_or(Format::Text) == Format::Text {
            out!("{}", r.line());
        }
        reports.push(r);
    }
    match cfg.format_or(Format::Text) {
        Format::Json => print_json(&reports.iter().map(output::CheckRow::new).collect::<Vec<_>>())?,
        Format::Csv => {
            out!("id,name,passed,seconds,detail");
            for r in &reports {
                out!("{},{},{},{:.3},\"{}\"", r.id, r.name, r.passed, r.elapsed.as_secs_f64(), r.detail.replace('"', "'"));
            }
        }
        Format::Text => {
            let failed = reports.iter().filter(|r| !r.passed).count();
            out!("{} of {} checks passed", reports.len() - failed, reports.len());
        }
    }
    if reports.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn write_line(args: std::fmt::Arguments) {
    use std::io::Write;
    if let Err(e) = writeln!(std::io::stdout().lock(), "{args}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("failed writing to stdout: {e}");
    }
}
