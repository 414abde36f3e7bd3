//! Command-line front end: numeration systems, sequences, output
//! automata, the formula compiler, counting pipelines and synchronized
//! relations, tied together by the JSON document format.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;

use anskit::automatic::{mod_m, Dfao};
use anskit::counting::{factor_complexity, recurrence_function};
use anskit::error::Error;
use anskit::format::{
    Document, DfaoDoc, LinRepDoc, PredicateDoc, SyncRelationDoc, SystemRef,
};
use anskit::logic::formula::{compile_text, Compiled, Compiler};
use anskit::logic::{adder, DecisionMode, Predicate};
use anskit::numeration::{preset, EnumOrder, MultiAns};
use anskit::regular::{verify_practical_criterion, CriterionOutcome, RegularSequence};
use anskit::semiring::{SemiringTag, SemiringValue};
use anskit::series::LinRep;
use anskit::synchronized::{compose_series_relation, successor, SyncRelation};

#[derive(Parser)]
#[command(name = "anskit", version, about = "Abstract numeration systems toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SystemArgs {
    /// Numeration system per dimension: a preset (`base:<b>`, zeckendorf,
    /// unary, ab-star) or a path to an `ans` document. Repeat for
    /// multidimensional systems.
    #[arg(long = "system", required = true)]
    systems: Vec<String>,
}

impl SystemArgs {
    fn multi(&self) -> anskit::Result<MultiAns> {
        let systems = self
            .systems
            .iter()
            .map(|spec| resolve_system(spec))
            .collect::<anskit::Result<Vec<_>>>()?;
        MultiAns::new(systems)
    }
}

fn resolve_system(spec: &str) -> anskit::Result<anskit::numeration::Ans> {
    match preset(spec) {
        Ok(ans) => Ok(ans),
        Err(_) if Path::new(spec).exists() => {
            let doc = load_document(Path::new(spec))?;
            match doc {
                Document::Ans(d) => d.to_ans(),
                other => Err(Error::InvalidDocument(format!(
                    "expected an ans document, found {}",
                    other.kind()
                ))),
            }
        }
        Err(e) => Err(e),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Representation, value and enumeration maps of a numeration system.
    Ans {
        #[command(subcommand)]
        cmd: AnsCmd,
    },
    /// Regular sequences given by linear representations.
    Seq {
        #[command(subcommand)]
        cmd: SeqCmd,
    },
    /// Automatic sequences given by output automata.
    Dfao {
        #[command(subcommand)]
        cmd: DfaoCmd,
    },
    /// First-order formulas over recognizable predicates.
    Logic {
        #[command(subcommand)]
        cmd: LogicCmd,
    },
    /// Counting pipelines for automatic sequences.
    Count {
        #[command(subcommand)]
        cmd: CountCmd,
    },
    /// Synchronized relations.
    Sync {
        #[command(subcommand)]
        cmd: SyncCmd,
    },
    /// Formal series operations.
    Series {
        #[command(subcommand)]
        cmd: SeriesCmd,
    },
    /// Document format utilities.
    Fmt {
        #[command(subcommand)]
        cmd: FmtCmd,
    },
}

#[derive(Subcommand)]
enum AnsCmd {
    /// Prints the representation of a vector, components separated by
    /// commas.
    Rep {
        #[command(flatten)]
        system: SystemArgs,
        /// The vector, e.g. `7` or `4,9`.
        value: String,
    },
    /// Prints the vector represented by a word.
    Val {
        #[command(flatten)]
        system: SystemArgs,
        /// The word, components separated by commas, e.g. `aab` or
        /// `#ab,bbb`.
        word: String,
    },
    /// Enumeration of vectors: the i-th vector, or the index of a vector.
    Enum {
        #[command(flatten)]
        system: SystemArgs,
        /// The enumeration index to invert.
        index: Option<String>,
        /// Prints the index of this vector instead.
        #[arg(long)]
        index_of: Option<String>,
    },
}

#[derive(Subcommand)]
enum SeqCmd {
    /// Evaluates a regular sequence at a vector.
    Eval {
        #[command(flatten)]
        system: SystemArgs,
        /// Path to a `linrep` document over the product alphabet.
        #[arg(long)]
        series: PathBuf,
        value: String,
    },
    /// Computes the kernel closure of a regular sequence.
    Kernel {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        series: PathBuf,
    },
    /// Verifies a family of sequences against claimed one-letter kernel
    /// relations.
    CheckCriterion {
        /// Path to a criterion family document.
        #[arg(long)]
        family: PathBuf,
    },
}

#[derive(Subcommand)]
enum DfaoCmd {
    /// Evaluates an output automaton at a vector.
    Eval {
        #[arg(long)]
        machine: PathBuf,
        value: String,
    },
    /// Builds the minimized machine of a regular sequence reduced mod m.
    Mod {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        series: PathBuf,
        #[arg(short, long)]
        modulus: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes one automaton per output value; fibers partition the
    /// numeration language.
    Fibers {
        #[arg(long)]
        machine: PathBuf,
        /// Output path prefix; `<prefix><value>.json` per fiber.
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Subcommand)]
enum LogicCmd {
    /// Compiles a formula to a predicate automaton.
    Compile {
        #[command(flatten)]
        system: SystemArgs,
        /// Named predicate imports, NAME=FILE.
        #[arg(long = "pred")]
        preds: Vec<String>,
        /// Explicit addition predicate document (arity 3).
        #[arg(long)]
        adder: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        formula: String,
    },
    /// Decides a closed formula, or an arity-1 formula under a mode.
    Decide {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long = "pred")]
        preds: Vec<String>,
        #[arg(long)]
        adder: Option<PathBuf>,
        /// exists, forall or inf (infinitely many).
        #[arg(long, default_value = "exists")]
        mode: String,
        formula: String,
    },
}

#[derive(Subcommand)]
enum CountCmd {
    /// The number of distinct size-s factors of an automatic sequence.
    FactorComplexity {
        #[arg(long)]
        machine: PathBuf,
        /// Prints values for s = 0..=values.
        #[arg(long, default_value_t = 8)]
        values: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The recurrence function of an automatic sequence.
    Recurrence {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long, default_value_t = 4)]
        values: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SyncCmd {
    /// Composes two synchronized relations.
    Compose {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The successor relation of a one-dimensional system.
    Succ {
        /// A preset or ans document path.
        #[arg(long)]
        system: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum SeriesCmd {
    /// The coefficient of a word in a series.
    Coeff {
        #[arg(long)]
        series: PathBuf,
        #[command(flatten)]
        system: SystemArgs,
        word: String,
    },
    /// Composes a series with a synchronized relation and prints the
    /// per-length coefficients.
    ComposeRelation {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        relation: PathBuf,
        /// Prints coefficients for word lengths 1..=coeff-len.
        #[arg(long, default_value_t = 3)]
        coeff_len: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum FmtCmd {
    /// Parses and validates a document, printing its kind.
    Validate { file: PathBuf },
}

fn load_document(path: &Path) -> anskit::Result<Document> {
    let bytes =
        std::fs::read(path).map_err(|e| Error::InvalidDocument(format!("{}: {e}", path.display())))?;
    Document::from_slice(&bytes)
}

fn save_document(path: &Path, doc: &Document) -> anskit::Result<()> {
    std::fs::write(path, doc.to_json())
        .map_err(|e| Error::InvalidDocument(format!("{}: {e}", path.display())))
}

fn parse_vector(text: &str) -> anskit::Result<Vec<BigUint>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<BigUint>()
                .map_err(|_| Error::Parse(format!("bad number {p:?}")))
        })
        .collect()
}

fn load_linrep(path: &Path) -> anskit::Result<LinRep> {
    match load_document(path)? {
        Document::Linrep(d) => d.to_linrep(),
        other => Err(Error::InvalidDocument(format!(
            "expected a linrep document, found {}",
            other.kind()
        ))),
    }
}

fn load_dfao(path: &Path) -> anskit::Result<Dfao> {
    match load_document(path)? {
        Document::Dfao(d) => d.to_dfao(),
        other => Err(Error::InvalidDocument(format!(
            "expected a dfao document, found {}",
            other.kind()
        ))),
    }
}

fn load_predicate(path: &Path) -> anskit::Result<Predicate> {
    match load_document(path)? {
        Document::Predicate(d) => d.to_predicate(),
        other => Err(Error::InvalidDocument(format!(
            "expected a predicate document, found {}",
            other.kind()
        ))),
    }
}

fn load_relation(path: &Path) -> anskit::Result<SyncRelation> {
    match load_document(path)? {
        Document::SyncRelation(d) => d.to_relation(),
        other => Err(Error::InvalidDocument(format!(
            "expected a sync-relation document, found {}",
            other.kind()
        ))),
    }
}

fn sequence_from(series_path: &Path, system: &SystemArgs) -> anskit::Result<RegularSequence> {
    let multi = system.multi()?;
    let rep = load_linrep(series_path)?;
    RegularSequence::from_series(multi, rep)
}

/// Builds a compiler for the given systems: the base adder is available
/// automatically when every dimension is the same integer base.
fn build_compiler(
    system: &SystemArgs,
    preds: &[String],
    adder_path: &Option<PathBuf>,
) -> anskit::Result<Compiler> {
    let multi = system.multi()?;
    let mut compiler = Compiler::new(multi);
    if let Some(path) = adder_path {
        compiler = compiler.with_adder(load_predicate(path)?);
    } else if system.systems.iter().all(|s| s == &system.systems[0]) {
        if let Some(b) = system.systems[0].strip_prefix("base:") {
            if system.systems.len() == 1 {
                if let Ok(b) = b.parse::<u32>() {
                    compiler = compiler.with_base_adder(b)?;
                }
            }
        }
    }
    for spec in preds {
        let Some((name, file)) = spec.split_once('=') else {
            return Err(Error::Parse(format!("bad --pred {spec:?}, expected NAME=FILE")));
        };
        compiler.register(name, load_predicate(Path::new(file))?);
    }
    Ok(compiler)
}

/// The criterion family document: systems, the series of each family
/// member, and per-letter coefficient rows.
#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct CriterionFamilyDoc {
    systems: Vec<SystemRef>,
    family: Vec<LinRepDoc>,
    /// letter index (as a string key) -> one coefficient row per family
    /// member.
    coeffs: HashMap<String, Vec<Vec<String>>>,
}

fn run(cli: Cli) -> anskit::Result<()> {
    match cli.command {
        Command::Ans { cmd } => match cmd {
            AnsCmd::Rep { system, value } => {
                let multi = system.multi()?;
                let n = parse_vector(&value)?;
                let w = multi.rep(&n)?;
                println!("{}", multi.format_word(&w));
            }
            AnsCmd::Val { system, word } => {
                let multi = system.multi()?;
                let w = multi.parse_word(&word)?;
                let v = multi.val(&w)?;
                println!(
                    "{}",
                    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                );
            }
            AnsCmd::Enum {
                system,
                index,
                index_of,
            } => {
                let multi = system.multi()?;
                let order = EnumOrder::lexicographic(multi);
                match (index, index_of) {
                    (Some(i), None) => {
                        let i: BigUint = i
                            .parse()
                            .map_err(|_| Error::Parse("bad index".into()))?;
                        let v = order.unindex(&i)?;
                        println!(
                            "{}",
                            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                        );
                    }
                    (None, Some(v)) => {
                        let n = parse_vector(&v)?;
                        println!("{}", order.index(&n)?);
                    }
                    _ => {
                        return Err(Error::Parse(
                            "give an index, or --index-of with a vector".into(),
                        ))
                    }
                }
            }
        },
        Command::Seq { cmd } => match cmd {
            SeqCmd::Eval {
                system,
                series,
                value,
            } => {
                let f = sequence_from(&series, &system)?;
                let n = parse_vector(&value)?;
                println!("{}", f.eval(&n)?);
            }
            SeqCmd::Kernel { system, series } => {
                let f = sequence_from(&series, &system)?;
                let report = f.kernel_closure(anskit::default_budget())?;
                println!("closed: {}", report.closed);
                println!("dimension: {}", report.dimension_or_size);
                for (word, _) in &report.generators {
                    println!("generator: {}", f.multi().format_word(word));
                }
            }
            SeqCmd::CheckCriterion { family } => {
                let bytes = std::fs::read(&family)
                    .map_err(|e| Error::InvalidDocument(format!("{}: {e}", family.display())))?;
                let doc: CriterionFamilyDoc = serde_json::from_slice(&bytes)
                    .map_err(|e| Error::InvalidDocument(e.to_string()))?;
                let multi = anskit::format::resolve_systems(&doc.systems)?;
                let mut fs = Vec::new();
                for rep_doc in &doc.family {
                    let rep = rep_doc.to_linrep()?;
                    fs.push(RegularSequence::from_series(multi.clone(), rep)?);
                }
                let tag = fs
                    .first()
                    .map(|f| f.tag().clone())
                    .unwrap_or(SemiringTag::Nat);
                let mut coeffs: HashMap<(usize, usize), Vec<SemiringValue>> = HashMap::new();
                for (letter, rows) in &doc.coeffs {
                    let letter: usize = letter
                        .parse()
                        .map_err(|_| Error::Parse("letter keys are indices".into()))?;
                    for (i, row) in rows.iter().enumerate() {
                        let row = row
                            .iter()
                            .map(|s| tag.parse_value(s))
                            .collect::<anskit::Result<Vec<_>>>()?;
                        coeffs.insert((letter, i), row);
                    }
                }
                match verify_practical_criterion(&fs, &coeffs)? {
                    CriterionOutcome::Verified => println!("verified"),
                    CriterionOutcome::CounterExample {
                        letter,
                        index,
                        witness,
                    } => {
                        println!(
                            "counterexample: sequence {index}, letter {letter}, word {}",
                            multi.format_word(&witness)
                        );
                        std::process::exit(1);
                    }
                }
            }
        },
        Command::Dfao { cmd } => match cmd {
            DfaoCmd::Eval { machine, value } => {
                let m = load_dfao(&machine)?;
                let n = parse_vector(&value)?;
                println!("{}", m.eval(&n)?);
            }
            DfaoCmd::Mod {
                system,
                series,
                modulus,
                out,
            } => {
                let f = sequence_from(&series, &system)?;
                let f = match f.tag() {
                    SemiringTag::Nat => f.convert(&SemiringTag::Int)?,
                    _ => f,
                };
                let machine = mod_m(&f, modulus)?;
                println!("states: {}", machine.num_states());
                if let Some(path) = out {
                    save_document(&path, &Document::Dfao(DfaoDoc::of(&machine)))?;
                }
            }
            DfaoCmd::Fibers { machine, out } => {
                let m = load_dfao(&machine)?;
                for (value, fiber) in m.fibers()? {
                    println!("{value}: {} states", fiber.num_states());
                    if let Some(prefix) = &out {
                        let path = PathBuf::from(format!("{prefix}{value}.json"));
                        save_document(
                            &path,
                            &Document::Dfa(anskit::format::DfaDoc::of(&fiber)),
                        )?;
                    }
                }
            }
        },
        Command::Logic { cmd } => match cmd {
            LogicCmd::Compile {
                system,
                preds,
                adder: adder_path,
                out,
                formula,
            } => {
                let mut compiler = build_compiler(&system, &preds, &adder_path)?;
                match compile_text(&mut compiler, &formula)? {
                    Compiled::Constant(b) => println!("constant: {b}"),
                    Compiled::Pred { pred, vars } => {
                        println!("variables: {}", vars.join(","));
                        println!("states: {}", pred.dfa().num_states());
                        if let Some(path) = out {
                            save_document(&path, &Document::Predicate(PredicateDoc::of(&pred)))?;
                        }
                    }
                }
            }
            LogicCmd::Decide {
                system,
                preds,
                adder: adder_path,
                mode,
                formula,
            } => {
                let mode = match mode.as_str() {
                    "exists" => DecisionMode::Exists,
                    "forall" => DecisionMode::Forall,
                    "inf" => DecisionMode::ExistsInfinitelyMany,
                    other => return Err(Error::Parse(format!("unknown mode {other:?}"))),
                };
                let mut compiler = build_compiler(&system, &preds, &adder_path)?;
                let answer = match compile_text(&mut compiler, &formula)? {
                    Compiled::Constant(b) => b,
                    Compiled::Pred { pred, .. } => {
                        if pred.arity() != 1 {
                            return Err(Error::BlockMismatch(
                                "decision needs a closed formula or one free variable".into(),
                            ));
                        }
                        pred.decide(mode)?
                    }
                };
                println!("{answer}");
            }
        },
        Command::Count { cmd } => match cmd {
            CountCmd::FactorComplexity {
                machine,
                values,
                out,
            } => {
                let m = load_dfao(&machine)?;
                let (addition, order) = pipeline_ingredients(&m)?;
                let rho = factor_complexity(&m, &addition, &order)?;
                for s in 0..=values {
                    println!("{s} {}", rho.eval(&[BigUint::from(s)])?);
                }
                if let Some(path) = out {
                    save_document(&path, &Document::Linrep(LinRepDoc::of(rho.series())))?;
                }
            }
            CountCmd::Recurrence {
                machine,
                values,
                out,
            } => {
                let m = load_dfao(&machine)?;
                let (addition, _) = pipeline_ingredients(&m)?;
                let r = recurrence_function(&m, &addition)?;
                for s in 0..=values {
                    println!("{s} {}", r.eval(&[BigUint::from(s)])?);
                }
                if let Some(path) = out {
                    save_document(&path, &Document::Linrep(LinRepDoc::of(r.linrep())))?;
                }
            }
        },
        Command::Sync { cmd } => match cmd {
            SyncCmd::Compose { left, right, out } => {
                let l = load_relation(&left)?;
                let r = load_relation(&right)?;
                let composed = l.compose(&r)?;
                println!("states: {}", composed.dfa().num_states());
                if let Some(path) = out {
                    save_document(
                        &path,
                        &Document::SyncRelation(SyncRelationDoc::of(&composed)),
                    )?;
                }
            }
            SyncCmd::Succ { system, out } => {
                let sys = resolve_system(&system)?;
                let succ = successor(&sys)?;
                let rel = succ.to_relation()?;
                println!("states: {}", rel.dfa().num_states());
                if let Some(path) = out {
                    save_document(&path, &Document::SyncRelation(SyncRelationDoc::of(&rel)))?;
                }
            }
        },
        Command::Series { cmd } => match cmd {
            SeriesCmd::Coeff {
                series,
                system,
                word,
            } => {
                let rep = load_linrep(&series)?;
                let multi = system.multi()?;
                if !rep.alphabet().same_as(multi.alphabet()) {
                    return Err(Error::AlphabetMismatch(
                        "series alphabet does not match the systems".into(),
                    ));
                }
                let w = multi.parse_word(&word)?;
                println!("{}", rep.coeff(&w)?);
            }
            SeriesCmd::ComposeRelation {
                series,
                relation,
                coeff_len,
                out,
            } => {
                let s = load_linrep(&series)?;
                let rel = load_relation(&relation)?;
                let composed = compose_series_relation(&s, &rel)?;
                // Per length, every word must carry one coefficient;
                // otherwise the per-length table is not defined.
                let k = composed.alphabet().len();
                let mut layer = vec![composed.initial_row()];
                for len in 1..=coeff_len {
                    let mut next = Vec::new();
                    for row in &layer {
                        for a in 0..k {
                            next.push(composed.step_row(row, a)?);
                        }
                    }
                    next.sort();
                    next.dedup();
                    let mut values: Vec<SemiringValue> = next
                        .iter()
                        .map(|row| composed.finish_row(row))
                        .collect::<anskit::Result<Vec<_>>>()?;
                    values.sort();
                    values.dedup();
                    match values.as_slice() {
                        [v] => println!("{v}"),
                        _ => {
                            return Err(Error::InvalidWord(format!(
                                "length {len} has several distinct coefficients"
                            )))
                        }
                    }
                    layer = next;
                }
                if let Some(path) = out {
                    save_document(&path, &Document::Linrep(LinRepDoc::of(&composed)))?;
                }
            }
        },
        Command::Fmt { cmd } => match cmd {
            FmtCmd::Validate { file } => {
                let bytes = std::fs::read(&file)
                    .map_err(|e| Error::InvalidDocument(format!("{}: {e}", file.display())))?;
                let kind = Document::validate(&bytes)?;
                println!("ok: {kind}");
            }
        },
    }
    Ok(())
}

/// Derives the addition predicate and enumeration order for a machine
/// whose system is an integer base.
fn pipeline_ingredients(m: &Dfao) -> anskit::Result<(Predicate, EnumOrder)> {
    let multi = m.multi().clone();
    // Identify the base from the first system's alphabet: digits 0..b-1.
    let symbols = multi.systems()[0].symbols();
    let b = symbols.len() as u32;
    let is_base = symbols
        .iter()
        .enumerate()
        .all(|(i, s)| s == &i.to_string());
    if !is_base || multi.dim() != 1 {
        return Err(Error::UnsupportedSemiring {
            tag: "system".into(),
            hint: "built-in addition exists for one-dimensional integer bases only; \
                   supply a machine over base:<b>"
                .into(),
        });
    }
    let addition = adder(b)?;
    let order = EnumOrder::lexicographic(multi);
    Ok((addition, order))
}

fn classify(err: &Error) -> u8 {
    match err {
        Error::Parse(_)
        | Error::InvalidDocument(_)
        | Error::InvalidWord(_)
        | Error::UnknownLetter(_)
        | Error::InvalidValue { .. }
        | Error::AlphabetMismatch(_)
        | Error::BlockMismatch(_)
        | Error::TapeOutOfRange { .. }
        | Error::DimensionMismatch(_)
        | Error::TagMismatch { .. } => 2,
        Error::NotPrefixClosed
        | Error::UnsupportedSemiring { .. }
        | Error::BudgetExceeded { .. }
        | Error::FiniteLanguage
        | Error::InfiniteCount(_)
        | Error::InfiniteImage(_)
        | Error::CompositionUndefined(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(classify(&e))
        }
    }
}
