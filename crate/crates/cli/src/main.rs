use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use af_core::hardness::{self, Atm, SimOutcome};
use af_core::sat::{self, NormalForm, SatError, SatOptions, Verdict};
use af_core::semantics::{evaluate, Structure};
use af_core::syntax::{self, render, render_fo2, Formula};
use af_core::words::{self, Word};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

/// Workbench for the adjacent fragment of first-order logic.
#[derive(Parser)]
#[command(name = "af", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Primitive generator of a word.
    Primgen {
        word: String,
        #[arg(long)]
        json: bool,
    },
    /// Words of length m generated by a word.
    Generate { word: String, m: usize },
    /// Fragment membership report as JSON.
    Classify { input: PathBuf },
    /// Normal form of a sentence.
    Normalize {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Adjacent closure of the normal form, one variable fewer.
    Closure {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// One variable-reduction step on the normal form.
    Reduce {
        input: PathBuf,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        caps: Caps,
    },
    /// Decides satisfiability.
    Sat {
        input: PathBuf,
        #[arg(long)]
        json: bool,
        /// Print the decision trace on stderr.
        #[arg(long)]
        trace: bool,
        /// Write the model as a structure file.
        #[arg(long, value_name = "FILE")]
        emit_model: Option<PathBuf>,
        #[command(flatten)]
        caps: Caps,
    },
    /// Decides satisfiability and prints the model.
    Model {
        input: PathBuf,
        #[command(flatten)]
        caps: Caps,
    },
    /// Evaluates a sentence in a structure file.
    Check { input: PathBuf, structure: PathBuf },
    /// Two-variable formula to an equivalent adjacent formula.
    Fo2af { input: PathBuf },
    /// Adjacent formula of arity at most two to two variables.
    Af2fo2 { input: PathBuf },
    /// Alternating Turing machine encodings.
    Atm {
        #[command(subcommand)]
        verb: AtmVerb,
    },
    /// Exhaustive model search on small domains.
    Oracle {
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_domain: usize,
        /// Largest number of free tuple bits per domain size.
        #[arg(long, default_value_t = 24)]
        bit_cap: usize,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct Caps {
    #[arg(long)]
    max_vars: Option<usize>,
    /// Largest pool of connector-types; AF_RESOURCE_CAP sets the default.
    #[arg(long, env = "AF_RESOURCE_CAP")]
    pool_cap: Option<usize>,
    /// Largest model that is built and verified.
    #[arg(long)]
    max_model: Option<usize>,
}

impl Caps {
    fn options(&self) -> SatOptions {
        let mut o = SatOptions::default();
        if let Some(v) = self.max_vars {
            o.max_vars = v;
        }
        if let Some(p) = self.pool_cap {
            o.pool_cap = p;
        }
        if let Some(m) = self.max_model {
            o.model.max_elements = m;
        }
        o
    }
}

#[derive(Subcommand)]
enum AtmVerb {
    /// Prints the encoding sentence, one conjunct per block.
    Encode {
        machine: PathBuf,
        word: String,
        #[arg(long)]
        literal_succ: bool,
        #[arg(long)]
        json: bool,
    },
    /// Searches for an accepting configuration tree.
    Simulate {
        machine: PathBuf,
        word: String,
        #[arg(long, default_value_t = 20)]
        max_depth: usize,
    },
    /// Model-checks the encoding on an accepting run, with fault injection.
    Verify {
        machine: PathBuf,
        word: String,
        #[arg(long)]
        literal_succ: bool,
        #[arg(long, default_value_t = 20)]
        max_depth: usize,
        /// Keep per-conjunct timings in the report.
        #[arg(long)]
        timings: bool,
    },
}

/// `println!` that stops quietly when stdout is closed.
macro_rules! out {
    ($($t:tt)*) => {{
        let mut o = std::io::stdout().lock();
        if let Err(e) = writeln!(o, $($t)*) {
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                std::process::exit(0);
            }
        }
    }};
}

enum Fail {
    Input(String),
    Resource(String),
}

impl From<SatError> for Fail {
    fn from(e: SatError) -> Self {
        if e.is_resource() {
            Fail::Resource(e.to_string())
        } else {
            Fail::Input(e.to_string())
        }
    }
}

macro_rules! input_errors {
    ($($t:ty),*) => {$(
        impl From<$t> for Fail {
            fn from(e: $t) -> Self {
                Fail::Input(e.to_string())
            }
        }
    )*};
}

input_errors!(
    af_core::semantics::SemanticsError,
    hardness::HardnessError,
    words::WordError,
    serde_json::Error,
    std::io::Error
);

impl From<syntax::SyntaxError> for Fail {
    fn from(e: syntax::SyntaxError) -> Self {
        SatError::from(e).into()
    }
}

type Outcome = Result<bool, Fail>;

fn read_text(path: &Path) -> Result<String, Fail> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Fail::Input(format!("{}: {e}", path.display())))
}

fn read_formula(path: &Path) -> Result<Formula, Fail> {
    Ok(syntax::parse(&read_text(path)?)?)
}

fn print_json(v: &Value) {
    out!(
        "{}",
        serde_json::to_string_pretty(v).expect("values serialize")
    );
}

fn describe_nf(nf: &NormalForm) -> Value {
    json!({
        "variables": nf.variables(),
        "existential_conjuncts": nf.gammas.len(),
        "fresh": nf.fresh.iter().map(|p| json!({"name": p.name, "arity": p.arity, "meaning": render(&p.meaning)})).collect::<Vec<_>>(),
        "nodes": nf.to_formula().node_count(),
        "formula": render(&nf.to_formula()),
    })
}

fn print_nf(nf: &NormalForm, as_json: bool) {
    if as_json {
        print_json(&describe_nf(nf));
        return;
    }
    for p in &nf.fresh {
        out!("# {}/{} := {}", p.name, p.arity, render(&p.meaning));
    }
    out!("{}", render(&nf.to_formula()));
}

fn word_text(w: &[String]) -> String {
    Word(w.to_vec()).to_string()
}

fn primgen(word: &str, as_json: bool) -> Outcome {
    let w = Word::parse(word);
    let g = words::primitive_generator(&w.0)?;
    if as_json {
        let walks: Vec<Value> = words::minimal_folds(&w.0)
            .into_iter()
            .filter(|f| f.generator == g || f.generator.iter().rev().eq(g.iter()))
            .map(|f| json!({"generator": word_text(&f.generator), "walk": words::format_walk(&f.walk)}))
            .collect();
        print_json(
            &json!({"word": w.to_string(), "generator": word_text(&g), "length": g.len(), "folds": walks}),
        );
    } else {
        out!("{}", word_text(&g));
    }
    Ok(true)
}

fn sat_cmd(
    input: &Path,
    as_json: bool,
    trace: bool,
    emit: Option<&Path>,
    opts: SatOptions,
) -> Outcome {
    let f = read_formula(input)?;
    let r = sat::decide(&f, &opts)?;
    if trace {
        for line in &r.trace {
            eprintln!("{line}");
        }
    }
    if let Some(path) = emit {
        match r.structure() {
            Some(s) => std::fs::write(path, serde_json::to_string_pretty(&s.to_json())? + "\n")?,
            None if r.verdict == Verdict::Sat => {
                eprintln!("no model was built; {} not written", path.display())
            }
            None => {}
        }
    }
    if as_json {
        print_json(&r.to_json());
    } else {
        out!("{}", r.verdict);
    }
    Ok(r.verdict == Verdict::Sat)
}

fn model_cmd(input: &Path, opts: SatOptions) -> Outcome {
    let f = read_formula(input)?;
    let r = sat::decide(&f, &opts)?;
    match (r.verdict, r.structure()) {
        (Verdict::Unsat, _) => {
            out!("UNSAT");
            Ok(false)
        }
        (Verdict::Sat, Some(s)) => {
            print_json(&s.to_json());
            Ok(true)
        }
        (Verdict::Sat, None) => {
            let why = r
                .trace
                .iter()
                .find(|l| l.starts_with("model not built"))
                .cloned();
            Err(Fail::Resource(why.unwrap_or_else(|| {
                "satisfiable, but no model is built after a reduction".into()
            })))
        }
    }
}

fn check_cmd(input: &Path, structure: &Path) -> Outcome {
    let f = read_formula(input)?;
    if !f.free_vars().is_empty() {
        return Err(Fail::Input("check expects a sentence".into()));
    }
    let v: Value = serde_json::from_str(&read_text(structure)?)?;
    let s = Structure::from_json(&v)?;
    let ok = evaluate(&s, &f, &[])?;
    out!("{ok}");
    Ok(ok)
}

fn oracle_cmd(input: &Path, max_domain: usize, bit_cap: usize, as_json: bool) -> Outcome {
    let f = read_formula(input)?;
    let out = sat::brute_force_sat(&f, max_domain, bit_cap)?;
    if as_json {
        print_json(&json!({
            "model": out.model.as_ref().map(Structure::to_json),
            "searched": out.searched,
            "skipped": out.skipped,
        }));
    } else {
        match &out.model {
            Some(s) => {
                out!("SAT");
                print_json(&s.to_json());
            }
            None => out!("NONE searched {:?} skipped {:?}", out.searched, out.skipped),
        }
    }
    match (&out.model, out.skipped.is_empty()) {
        (Some(_), _) => Ok(true),
        (None, true) => Ok(false),
        (None, false) => Err(Fail::Resource(format!(
            "domain sizes {:?} exceed the bit cap of {bit_cap}",
            out.skipped
        ))),
    }
}

fn load_machine(path: &Path, word: &str) -> Result<(Atm, Vec<usize>), Fail> {
    let m = Atm::parse(&read_text(path)?)?;
    let w = m.parse_input(word)?;
    Ok((m, w))
}

fn simulate(m: &Atm, w: &[usize], max_depth: usize) -> Result<SimOutcome, Fail> {
    let cells = 1usize.checked_shl(w.len() as u32).filter(|c| *c <= 1 << 16);
    let cells = cells
        .ok_or_else(|| Fail::Resource(format!("a tape of 2^{} cells is too long", w.len())))?;
    Ok(hardness::simulate_atm(m, w, max_depth, cells)?)
}

fn atm_cmd(verb: AtmVerb) -> Outcome {
    match verb {
        AtmVerb::Encode {
            machine,
            word,
            literal_succ,
            json: as_json,
        } => {
            let (m, w) = load_machine(&machine, &word)?;
            let enc = hardness::encode_atm(&m, &w, literal_succ)?;
            if as_json {
                print_json(&json!({
                    "n": enc.n,
                    "nodes": enc.node_count(),
                    "size_bound": hardness::size_bound(&m, enc.n),
                    "unguarded": enc.unguarded(),
                    "signature": enc.signature,
                    "conjuncts": enc.conjuncts.iter().map(|(name, f)| json!({"name": name, "formula": render(f)})).collect::<Vec<_>>(),
                }));
            } else {
                out!("{}", enc.to_text().trim_end());
            }
            Ok(true)
        }
        AtmVerb::Simulate {
            machine,
            word,
            max_depth,
        } => {
            let (m, w) = load_machine(&machine, &word)?;
            match simulate(&m, &w, max_depth)? {
                SimOutcome::Accept(tree) => {
                    print_json(&tree.to_json(&m));
                    Ok(true)
                }
                SimOutcome::Reject => {
                    out!("REJECT");
                    Ok(false)
                }
                SimOutcome::DepthExhausted => Err(Fail::Resource(format!(
                    "no verdict within depth {max_depth}"
                ))),
            }
        }
        AtmVerb::Verify {
            machine,
            word,
            literal_succ,
            max_depth,
            timings,
        } => {
            let (m, w) = load_machine(&machine, &word)?;
            let tree = match simulate(&m, &w, max_depth)? {
                SimOutcome::Accept(tree) => tree,
                SimOutcome::Reject => {
                    return Err(Fail::Input(
                        "the machine rejects; there is no run to verify".into(),
                    ))
                }
                SimOutcome::DepthExhausted => {
                    return Err(Fail::Resource(format!(
                        "no accepting run within depth {max_depth}"
                    )))
                }
            };
            let report = hardness::verify_encoding(&m, &w, &tree, literal_succ)?;
            let mut v = serde_json::to_value(&report)?;
            if !timings {
                for c in v["conjuncts"].as_array_mut().into_iter().flatten() {
                    c.as_object_mut().map(|o| o.remove("millis"));
                }
            }
            v["passed"] = json!(report.passed());
            print_json(&v);
            Ok(report.passed())
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.verb {
        Verb::Primgen { word, json } => primgen(&word, json),
        Verb::Generate { word, m } => {
            let w = Word::parse(&word);
            for g in words::enumerate_generated(&w.0, m) {
                out!("{}", word_text(&g));
            }
            Ok(true)
        }
        Verb::Classify { input } => {
            let report = syntax::classify(&read_formula(&input)?);
            print_json(&serde_json::to_value(&report)?);
            Ok(true)
        }
        Verb::Normalize { input, json } => {
            print_nf(&sat::normalize(&read_formula(&input)?)?, json);
            Ok(true)
        }
        Verb::Closure { input, json } => {
            let nf = sat::normalize(&read_formula(&input)?)?;
            print_nf(&sat::adjacent_closure(&nf)?, json);
            Ok(true)
        }
        Verb::Reduce { input, json, caps } => {
            let nf = sat::normalize(&read_formula(&input)?)?;
            print_nf(&sat::reduce_step(&nf, &caps.options())?, json);
            Ok(true)
        }
        Verb::Sat {
            input,
            json,
            trace,
            emit_model,
            caps,
        } => sat_cmd(&input, json, trace, emit_model.as_deref(), caps.options()),
        Verb::Model { input, caps } => model_cmd(&input, caps.options()),
        Verb::Check { input, structure } => check_cmd(&input, &structure),
        Verb::Fo2af { input } => {
            out!("{}", render(&syntax::fo2_to_af(&read_formula(&input)?)?));
            Ok(true)
        }
        Verb::Af2fo2 { input } => {
            out!(
                "{}",
                render_fo2(&syntax::af_to_fo2(&read_formula(&input)?)?)
            );
            Ok(true)
        }
        Verb::Atm { verb } => atm_cmd(verb),
        Verb::Oracle {
            input,
            max_domain,
            bit_cap,
            json,
        } => oracle_cmd(&input, max_domain, bit_cap, json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Fail::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Fail::Resource(msg)) => {
            eprintln!("resource cap: {msg}");
            ExitCode::from(3)
        }
    }
}
