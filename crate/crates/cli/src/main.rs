use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gfl_core::fin::FinElement;
use gfl_core::lower_bound::{find_moduli, run_pipeline, run_pipeline_with_blocks, PipelineConfig, VsgVariant};
use gfl_core::oracle::{GroundTruth, ScriptedFamily, StagedApprox};
use gfl_core::search::{
    find_avoidance_coloring, finite_sums, finite_unions, hindman_fu_search, search_subspace, verify_subspace,
    Assignment, AvoidanceMode, ColoringSpec,
};
use gfl_core::span::BlockSequence;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "gfl", version, about = "FIN_k algebra, subspace search and the simulated-jump pipeline")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for every randomized choice; required wherever randomness is used.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Upper bound on c^|domain| for exhaustive avoidance search.
    #[arg(long, global = true, default_value_t = 1 << 24)]
    budget: u128,
    #[arg(long, global = true, value_enum, default_value_t = Variant::Outer)]
    vsg_variant: Variant,
    /// Write output here (atomically) instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Outer,
    Literal,
}

impl From<Variant> for VsgVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Outer => VsgVariant::Outer,
            Variant::Literal => VsgVariant::Literal,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Operations on single elements such as `3:2,5:1`.
    #[command(subcommand)]
    Elem(ElemCmd),
    /// Spans of block sequences such as `0:2;3:1,4:2`.
    #[command(subcommand)]
    Span(SpanCmd),
    /// Monochromatic subspaces, finite sums and unions, avoidance colorings.
    #[command(subcommand)]
    Search(SearchCmd),
    /// Scripted jump families.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// The decoding pipeline.
    #[command(subcommand)]
    Pipeline(PipelineCmd),
}

#[derive(Subcommand)]
enum ElemCmd {
    Tetris {
        element: String,
        #[arg(long, default_value_t = 1)]
        times: u32,
    },
    Add {
        left: String,
        right: String,
    },
    Stats {
        element: String,
    },
    Embed {
        element: String,
        #[arg(long)]
        from: u32,
        #[arg(long)]
        to: u32,
    },
    Support {
        element: String,
    },
    BlockLess {
        left: String,
        right: String,
    },
}

#[derive(Args)]
struct BlocksArg {
    #[arg(long)]
    k: u32,
    /// Blocks separated by `;`.
    #[arg(long, conflicts_with = "blocks_file", required_unless_present = "blocks_file")]
    blocks: Option<String>,
    /// File with blocks separated by `;` or newlines.
    #[arg(long)]
    blocks_file: Option<PathBuf>,
}

impl BlocksArg {
    fn load(&self) -> Result<BlockSequence> {
        let text = match (&self.blocks, &self.blocks_file) {
            (Some(text), _) => text.clone(),
            (None, Some(path)) => read(path)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .collect::<Vec<_>>()
                .join(";"),
            (None, None) => bail!("--blocks or --blocks-file is required"),
        };
        Ok(BlockSequence::parse(text.trim(), Some(self.k))?)
    }
}

#[derive(Subcommand)]
enum SpanCmd {
    /// List the depth-d span (or its tetris closure with --extended).
    Enum {
        #[command(flatten)]
        blocks: BlocksArg,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        extended: bool,
    },
    /// Image of a coefficient element.
    Theta {
        #[command(flatten)]
        blocks: BlocksArg,
        #[arg(long)]
        f: String,
    },
    /// Preimage of an element, if it lies in the span.
    Contains {
        #[command(flatten)]
        blocks: BlocksArg,
        #[arg(long)]
        x: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    Constant,
    SizeParity,
    MinParity,
    Hash,
    Vsg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Args)]
struct ColoringArgs {
    #[arg(long, default_value_t = 4)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    colors: u32,
    /// Builtin coloring; ignored when --table is given.
    #[arg(long, value_enum, default_value_t = Builtin::SizeParity)]
    coloring: Builtin,
    /// Table file of `<element> <color>` lines.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Family file for the gap-parity coloring.
    #[arg(long)]
    family: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Toggle::On)]
    prune: Toggle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Randomized,
}

#[derive(Subcommand)]
enum SearchCmd {
    /// First block sequence whose depth-d span is monochromatic.
    Subspace {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        coloring: ColoringArgs,
    },
    /// The rank-1 case phrased with sets.
    Hindman {
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        coloring: ColoringArgs,
    },
    /// A coloring with no monochromatic depth-d subspace.
    Avoid {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        colors: u32,
        #[arg(long, value_enum, default_value_t = Mode::Exhaustive)]
        mode: Mode,
        #[arg(long, default_value_t = 1000)]
        tries: u64,
    },
    /// Finite sums of distinct values, e.g. `--values 1,2,4`.
    Sums {
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<u64>,
        #[arg(long)]
        max_terms: Option<usize>,
    },
    /// Finite unions of block-ordered sets, e.g. `--sets "0,1;3"`.
    Unions {
        #[arg(long)]
        sets: String,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    /// Generate a family from --seed.
    Gen {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 64)]
        x_max: usize,
        #[arg(long, default_value_t = 0)]
        sigma_min: usize,
        #[arg(long, default_value_t = 16)]
        sigma_max: usize,
    },
    /// Level sets and moduli of a family file.
    Show {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        bound: Option<usize>,
    },
}

#[derive(Subcommand)]
enum PipelineCmd {
    /// Moduli, stable blocks, homogeneity, decoding and the diff against the truth.
    Run {
        /// Family file; without it a family is generated from --seed.
        #[arg(long)]
        family: Option<PathBuf>,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 12)]
        xbound: usize,
        #[arg(long, default_value_t = 64)]
        x_max: usize,
        #[arg(long, default_value_t = 16)]
        sigma_max: usize,
        #[arg(long)]
        spacing: Option<usize>,
        /// Use these blocks instead of building a stable sequence.
        #[arg(long)]
        blocks: Option<String>,
    },
}

/// A finished command: the JSON payload and its exit code.
struct Reply {
    value: Value,
    code: u8,
}

impl Reply {
    fn ok(value: Value) -> Self {
        Self { value, code: 0 }
    }

    /// 0 when `found`, otherwise a clean negative.
    fn found(value: Value, found: bool) -> Self {
        Self { value, code: if found { 0 } else { 1 } }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn elem(text: &str) -> Result<FinElement> {
    text.parse().with_context(|| format!("bad element `{text}`"))
}

fn need_seed(seed: Option<u64>, what: &str) -> Result<u64> {
    seed.ok_or_else(|| anyhow!("{what} is randomized: pass --seed"))
}

fn load_family(path: &Path) -> Result<ScriptedFamily> {
    ScriptedFamily::from_json(&read(path)?).with_context(|| format!("loading family {}", path.display()))
}

fn strings<T: ToString>(items: &[T]) -> Vec<String> {
    items.iter().map(ToString::to_string).collect()
}

fn run_elem(cmd: ElemCmd) -> Result<Reply> {
    let value = match cmd {
        ElemCmd::Tetris { element, times } => json!({ "result": elem(&element)?.tetris_n(times).to_string() }),
        ElemCmd::Add { left, right } => json!({ "result": elem(&left)?.add(&elem(&right)?)?.to_string() }),
        ElemCmd::Stats { element } => {
            let e = elem(&element)?;
            let stats = e.stats();
            let by_value: serde_json::Map<String, Value> =
                stats.by_value.iter().map(|(v, (lo, hi))| (v.to_string(), json!({ "lambda": lo, "mu": hi }))).collect();
            json!({
                "element": e.to_string(),
                "rank": e.rank(),
                "support": e.support(),
                "mu": stats.mu,
                "lambda": stats.lambda,
                "by_value": by_value,
            })
        }
        ElemCmd::Embed { element, from, to } => json!({ "result": elem(&element)?.embed(from, to)?.to_string() }),
        ElemCmd::Support { element } => json!({ "result": elem(&element)?.support() }),
        ElemCmd::BlockLess { left, right } => json!({ "result": elem(&left)?.block_less(&elem(&right)?)? }),
    };
    Ok(Reply::ok(value))
}

fn run_span(cmd: SpanCmd) -> Result<Reply> {
    match cmd {
        SpanCmd::Enum { blocks, d, extended } => {
            let b = blocks.load()?;
            let d = d.unwrap_or(b.len());
            let elements = if extended { b.extended_span_enumerate(d)? } else { b.span_enumerate(d)? };
            Ok(Reply::ok(json!({
                "k": b.k(),
                "d": d,
                "blocks": b.to_string(),
                "extended": extended,
                "count": elements.len(),
                "elements": strings(&elements),
            })))
        }
        SpanCmd::Theta { blocks, f } => {
            let b = blocks.load()?;
            let f = elem(&f)?.with_ambient(b.k())?;
            Ok(Reply::ok(json!({ "blocks": b.to_string(), "f": f.to_string(), "x": b.theta(&f)?.to_string() })))
        }
        SpanCmd::Contains { blocks, x } => {
            let b = blocks.load()?;
            let x = elem(&x)?.with_ambient(b.k())?;
            let witness = b.span_contains(&x);
            let found = witness.is_some();
            Ok(Reply::found(
                json!({
                    "blocks": b.to_string(),
                    "x": x.to_string(),
                    "member": found,
                    "witness": witness.map(|f| f.to_string()),
                }),
                found,
            ))
        }
    }
}

fn build_coloring(k: u32, args: &ColoringArgs, seed: Option<u64>, variant: VsgVariant) -> Result<ColoringSpec> {
    if let Some(path) = &args.table {
        return ColoringSpec::parse_table(k, args.n, args.colors, &read(path)?)
            .with_context(|| format!("loading table {}", path.display()));
    }
    let assignment = match args.coloring {
        Builtin::Constant => Assignment::Constant,
        Builtin::SizeParity => Assignment::SizeParity,
        Builtin::MinParity => Assignment::MinParity,
        Builtin::Hash => Assignment::Hash { seed: need_seed(seed, "the hash coloring")? },
        Builtin::Vsg => {
            let path = args.family.as_ref().ok_or_else(|| anyhow!("the vsg coloring needs --family"))?;
            Assignment::Vsg { family: Arc::new(load_family(path)?), variant }
        }
    };
    let colors = if matches!(args.coloring, Builtin::Constant) { args.colors.max(1) } else { args.colors };
    Ok(ColoringSpec::builtin(k, args.n, colors, assignment)?)
}

fn run_search(cmd: SearchCmd, cli: &Globals) -> Result<Reply> {
    match cmd {
        SearchCmd::Subspace { k, d, coloring } => {
            let spec = build_coloring(k, &coloring, cli.seed, cli.variant)?;
            let found = search_subspace(&spec, d, coloring.prune == Toggle::On)?;
            let color = match &found {
                Some(b) => verify_subspace(&spec, b)?,
                None => None,
            };
            let hit = found.is_some();
            Ok(Reply::found(
                json!({
                    "k": k,
                    "n": coloring.n,
                    "d": d,
                    "coloring": spec.to_json()?,
                    "prune": coloring.prune == Toggle::On,
                    "seed": cli.seed,
                    "result": found.map(|b| strings(b.blocks())),
                    "color": color,
                }),
                hit,
            ))
        }
        SearchCmd::Hindman { d, coloring } => {
            let spec = build_coloring(1, &coloring, cli.seed, cli.variant)?;
            let found = hindman_fu_search(&spec, d, coloring.prune == Toggle::On)?;
            let hit = found.is_some();
            Ok(Reply::found(
                json!({
                    "n": coloring.n,
                    "d": d,
                    "coloring": spec.to_json()?,
                    "prune": coloring.prune == Toggle::On,
                    "seed": cli.seed,
                    "result": found,
                }),
                hit,
            ))
        }
        SearchCmd::Avoid { k, n, d, colors, mode, tries } => {
            let (mode, mode_name) = match mode {
                Mode::Exhaustive => (AvoidanceMode::Exhaustive { budget: cli.budget }, "exhaustive"),
                Mode::Randomized => {
                    (AvoidanceMode::Randomized { seed: need_seed(cli.seed, "randomized avoidance")?, tries }, "randomized")
                }
            };
            let found = find_avoidance_coloring(k, n, d, colors, mode)?;
            let hit = found.is_some();
            let result = found.map(|spec| spec.to_json()).transpose()?;
            Ok(Reply::found(
                json!({
                    "k": k,
                    "n": n,
                    "d": d,
                    "colors": colors,
                    "mode": mode_name,
                    "seed": cli.seed,
                    "budget": cli.budget.to_string(),
                    "result": result,
                }),
                hit,
            ))
        }
        SearchCmd::Sums { values, max_terms } => {
            let distinct: BTreeSet<u64> = values.iter().copied().collect();
            if distinct.len() != values.len() {
                bail!("values must be distinct");
            }
            let max_terms = max_terms.unwrap_or(values.len());
            Ok(Reply::ok(json!({ "values": values, "max_terms": max_terms, "result": finite_sums(&values, max_terms) })))
        }
        SearchCmd::Unions { sets } => {
            let parsed = parse_sets(&sets)?;
            let result = finite_unions(&parsed)?;
            Ok(Reply::ok(json!({ "sets": parsed, "result": result })))
        }
    }
}

/// `"0,1;3"` → `[{0, 1}, {3}]`.
fn parse_sets(text: &str) -> Result<Vec<BTreeSet<usize>>> {
    text.split(';')
        .map(|part| {
            part.split(',')
                .map(|n| n.trim().parse::<usize>().with_context(|| format!("bad set member `{n}`")))
                .collect()
        })
        .collect()
}

fn run_oracle(cmd: OracleCmd, cli: &Globals) -> Result<Reply> {
    match cmd {
        OracleCmd::Gen { k, x_max, sigma_min, sigma_max } => {
            let seed = need_seed(cli.seed, "oracle generation")?;
            let family = ScriptedFamily::generate(seed, k, x_max, sigma_min..=sigma_max)?;
            Ok(Reply::ok(serde_json::to_value(&family)?))
        }
        OracleCmd::Show { family, bound } => {
            let fam = load_family(&family)?;
            let bound = bound.unwrap_or(fam.x_max()).min(fam.x_max());
            let mut levels = Vec::new();
            for level in 1..=fam.levels() {
                let set = fam.limit_set(level, bound)?;
                levels.push(json!({
                    "level": level,
                    "members": (0..bound).filter(|&x| set[x]).collect::<Vec<_>>(),
                    "modulus": fam.modulus(level, bound)?,
                }));
            }
            let moduli = if bound == 0 { Vec::new() } else { find_moduli(&fam, bound - 1, fam.levels())? };
            Ok(Reply::ok(json!({
                "k": fam.levels(),
                "x_max": fam.x_max(),
                "bound": bound,
                "max_sigma": fam.max_sigma(),
                "levels": levels,
                "moduli": moduli,
            })))
        }
    }
}

fn run_pipeline_cmd(cmd: PipelineCmd, cli: &Globals) -> Result<Reply> {
    let PipelineCmd::Run { family, k, d, xbound, x_max, sigma_max, spacing, blocks } = cmd;
    let (fam, id) = match &family {
        Some(path) => (load_family(path)?, path.file_stem().map_or("family".into(), |s| s.to_string_lossy().into_owned())),
        None => {
            let seed = need_seed(cli.seed, "a generated family")?;
            (ScriptedFamily::generate(seed, k, x_max, 0..=sigma_max)?, format!("seed-{seed}"))
        }
    };
    let config = PipelineConfig { k, d, x_bound: xbound, spacing, variant: cli.variant };
    let report = match blocks {
        Some(text) => run_pipeline_with_blocks(&fam, &id, &BlockSequence::parse(&text, Some(k as u32 + 1))?, &config),
        None => run_pipeline(&fam, &id, &config),
    };
    let code = report.exit_code() as u8;
    let mut value = serde_json::to_value(&report)?;
    value["seed"] = json!(if family.is_some() { None } else { cli.seed });
    Ok(Reply { value, code })
}

struct Globals {
    seed: Option<u64>,
    budget: u128,
    variant: VsgVariant,
}

/// `key: value` lines with dotted paths; arrays of scalars stay on one line.
fn flatten(value: &Value, path: &str, out: &mut String) {
    let scalar_list = |items: &[Value]| items.iter().all(|v| !v.is_object() && !v.is_array());
    match value {
        Value::Object(map) => {
            for (key, v) in map {
                let p = if path.is_empty() { key.clone() } else { format!("{path}.{key}") };
                flatten(v, &p, out);
            }
        }
        Value::Array(items) if !scalar_list(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten(v, &format!("{path}[{i}]"), out);
            }
        }
        Value::String(s) => out.push_str(&format!("{path}: {s}\n")),
        other => out.push_str(&format!("{path}: {other}\n")),
    }
}

fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => format!("{}\n", serde_json::to_string_pretty(value).expect("JSON values serialize")),
        Format::Text => {
            if let Value::Object(map) = value {
                if let (1, Some(result)) = (map.len(), map.get("result")) {
                    let mut out = String::new();
                    match result {
                        Value::String(s) => out = format!("{s}\n"),
                        Value::Array(_) | Value::Object(_) => flatten(result, "result", &mut out),
                        other => out = format!("{other}\n"),
                    }
                    return out;
                }
            }
            let mut out = String::new();
            flatten(value, "", &mut out);
            out
        }
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
        Some(path) => {
            let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(text.as_bytes())?;
            tmp.persist(path).map_err(|e| e.error)?;
            Ok(())
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(raw) = std::env::var("GFL_THREADS") {
        let n: usize = raw.trim().parse().with_context(|| format!("GFL_THREADS={raw} is not a number"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8> {
    configure_threads()?;
    let globals = Globals { seed: cli.seed, budget: cli.budget, variant: cli.vsg_variant.into() };
    let reply = match cli.command {
        Command::Elem(cmd) => run_elem(cmd)?,
        Command::Span(cmd) => run_span(cmd)?,
        Command::Search(cmd) => run_search(cmd, &globals)?,
        Command::Oracle(cmd) => run_oracle(cmd, &globals)?,
        Command::Pipeline(cmd) => run_pipeline_cmd(cmd, &globals)?,
    };
    emit(&render(&reply.value, cli.format), cli.output.as_deref())?;
    Ok(reply.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            match err.chain().find_map(|e| e.downcast_ref::<gfl_core::Error>()) {
                Some(core) => eprintln!("error: {}: {err:#}", core.kind()),
                None => eprintln!("error: {err:#}"),
            }
            ExitCode::from(2)
        }
    }
}
