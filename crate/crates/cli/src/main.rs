use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gws_core::constructions::{self as cons, MarkedAlphabet, RegMode, RtMode};
use gws_core::delta::{self, DeltaSpec, PathSource};
use gws_core::engine::{self, AcceptResult, Bounds, LanguageSample};
use gws_core::grammar::{validate, Determinism};
use gws_core::symbol::{length_lex, parse_word, show_word};
use gws_core::{parse_grammar, Grammar, Input, RankedAlphabet, Symbol, Tree, Word};
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

// A closed stdout (e.g. piped into `head`) ends the program quietly.
macro_rules! outln {
    ($($arg:tt)*) => {
        if let Err(e) = writeln!(std::io::stdout().lock(), $($arg)*) {
            std::process::exit(if e.kind() == std::io::ErrorKind::BrokenPipe { 0 } else { 1 });
        }
    };
}

#[derive(Parser)]
#[command(name = "gws", version, about = "Grammars with storage: generate, transduce, accept, construct")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Clone)]
struct BoundArgs {
    /// Maximum derivation length.
    #[arg(long, default_value_t = 200)]
    max_steps: usize,
    /// Maximum output length (tree size for tree grammars).
    #[arg(long, default_value_t = 16)]
    max_len: usize,
    /// Maximum number of sentential forms per search.
    #[arg(long, default_value_t = 2_000_000)]
    max_forms: usize,
    /// Largest input element tried when generating over all inputs.
    #[arg(long, default_value_t = 8)]
    max_input: usize,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl BoundArgs {
    fn bounds(&self) -> anyhow::Result<Bounds> {
        if self.jobs == 0 || self.jobs > 256 {
            bail!("--jobs must be between 1 and 256");
        }
        Ok(Bounds {
            max_steps: self.max_steps,
            max_len: self.max_len,
            max_forms: self.max_forms,
            max_input: self.max_input,
            jobs: self.jobs,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check a grammar; report its class and determinism.
    Validate { file: PathBuf },
    /// Enumerate the bounded language (over all inputs).
    Generate {
        file: PathBuf,
        /// Accept by the declared final states.
        #[arg(long)]
        final_state: bool,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Outputs for one input element.
    Transduce {
        file: PathBuf,
        #[arg(long)]
        input: String,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Decide acceptance of an input element (some derivation finishes),
    /// or of a word with `--word` for acceptors.
    Accept {
        file: PathBuf,
        #[arg(long, conflicts_with = "word")]
        input: Option<String>,
        /// Word read by a REG acceptor (by final state if declared).
        #[arg(long)]
        word: Option<String>,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Enumerate the trees of a tree grammar.
    Trees {
        file: PathBuf,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Run a construction and print the resulting grammar.
    Construct {
        #[arg(value_enum)]
        name: Construction,
        file: PathBuf,
        /// Mode for conv-reg (de-to-df, df-to-reg, df-prefix-free-to-de) and
        /// conv-rt (de-to-df, df-to-rt, df-to-de-la).
        #[arg(long)]
        mode: Option<String>,
        /// Ranked alphabet, e.g. "c:3, a:0, b:0, eps:0".
        #[arg(long)]
        alphabet: Option<String>,
        /// Step bound for look-ahead predicates.
        #[arg(long, default_value_t = 1000)]
        step_bound: usize,
        /// Keep useless triples (to-grammar).
        #[arg(long)]
        no_prune: bool,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// The delta operation: yields of the trees all of whose paths lie in
    /// the language of a grammar or of a path file.
    Delta {
        /// Grammar over the path alphabet.
        file: Option<PathBuf>,
        /// File with one path per line instead of a grammar.
        #[arg(long, conflicts_with = "file")]
        paths: Option<PathBuf>,
        /// Ranked alphabet, e.g. "alphabet c:3, a:0, b:0, eps:0;".
        #[arg(long)]
        alphabet: String,
        #[arg(long, default_value_t = 12)]
        size_bound: usize,
        /// Print the trees instead of their yields.
        #[arg(long)]
        trees: bool,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Build the linear grammar K and alphabet with delta(K) = h(L ∩ M).
    ReWitness {
        l: PathBuf,
        m: PathBuf,
        /// Homomorphism, e.g. "a=c, b=" (empty image allowed).
        #[arg(long)]
        hom: String,
    },
    /// Compare bounded languages of two grammars.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        bounds: BoundArgs,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Construction {
    ToPda,
    ToGrammar,
    CollapseExt,
    DetLa,
    DetPf,
    ConvReg,
    ConvRt,
    DerivTrees,
    YieldGrammar,
    PathAcceptor,
    TreeAcceptor,
    Mark,
}

fn load(path: &Path) -> anyhow::Result<Grammar> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(parse_grammar(&text)?)
}

fn parse_alphabet(text: &str) -> anyhow::Result<RankedAlphabet> {
    let t = text.trim().trim_end_matches(';');
    let t = t.strip_prefix("alphabet").unwrap_or(t);
    Ok(RankedAlphabet::parse(t.trim())?)
}

fn parse_input(g: &Grammar, text: &str) -> anyhow::Result<Input> {
    Ok(g.storage.compile_enc(&g.encoding)?.parse_input(text)?)
}

fn word_text(w: &[Symbol]) -> String {
    show_word(w)
}

fn sorted_words(s: &LanguageSample<Word>) -> Vec<String> {
    s.sorted().iter().map(|w| word_text(w)).collect()
}

fn sorted_trees(s: &LanguageSample<Tree>) -> Vec<String> {
    let mut v: Vec<&Tree> = s.items.iter().collect();
    v.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| a.to_string().cmp(&b.to_string())));
    v.iter().map(|t| t.to_string()).collect()
}

fn bounds_json(b: &Bounds) -> Value {
    json!({
        "max_steps": b.max_steps,
        "max_len": b.max_len,
        "max_forms": b.max_forms,
        "max_input": b.max_input,
        "jobs": b.jobs,
    })
}

struct Out {
    format: Format,
    command: &'static str,
}

impl Out {
    fn items(&self, bounds: &Bounds, complete: Option<usize>, all_inputs: bool, items: &[String]) {
        match self.format {
            Format::Text => {
                for i in items {
                    outln!("{i}");
                }
                match complete {
                    Some(n) if !all_inputs => {
                        eprintln!("complete up to {n} (inputs up to size {})", bounds.max_input)
                    }
                    Some(n) => eprintln!("complete up to {n}"),
                    None => eprintln!("not certified complete"),
                }
            }
            Format::Json => outln!(
                "{}",
                json!({
                    "command": self.command,
                    "bounds": bounds_json(bounds),
                    "complete_up_to": complete,
                    "all_inputs": all_inputs,
                    "items": items,
                })
            ),
        }
    }

    fn result(&self, bounds: Option<&Bounds>, text: &str, result: Value) {
        match self.format {
            Format::Text => outln!("{text}"),
            Format::Json => outln!(
                "{}",
                json!({
                    "command": self.command,
                    "bounds": bounds.map(bounds_json),
                    "result": result,
                })
            ),
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let format = cli.format;
    let out = |command| Out { format, command };
    match cli.command {
        Command::Validate { file } => {
            let g = load(&file)?;
            let r = validate(&g)?;
            let det = match &r.deterministic {
                Determinism::Yes => "yes".to_string(),
                Determinism::No(w) => format!("no ({w})"),
                Determinism::UnknownSyntactic => "unknown".to_string(),
            };
            let classes: Vec<String> = r.satisfied.iter().map(|c| c.to_string()).collect();
            let mut text = format!(
                "{}: valid {}\nclasses: {}\nnormal form: {}\ndeterministic: {det}",
                g.name,
                r.class,
                classes.join(", "),
                r.normal_form
            );
            if let Some(d) = r.racceptor_deterministic {
                text.push_str(&format!("\nacceptor deterministic: {d}"));
            }
            out("validate").result(
                None,
                &text,
                json!({
                    "name": g.name,
                    "class": r.class.to_string(),
                    "classes": classes,
                    "normal_form": r.normal_form,
                    "deterministic": det,
                    "acceptor_deterministic": r.racceptor_deterministic,
                }),
            );
        }
        Command::Generate { file, final_state, bounds } => {
            let g = load(&file)?;
            let b = bounds.bounds()?;
            let s = if final_state {
                engine::generate_final_state(&g, &g.finals, &b)?
            } else {
                engine::generate(&g, &b)?
            };
            out("generate").items(&b, s.complete_up_to, s.all_inputs, &sorted_words(&s));
        }
        Command::Transduce { file, input, bounds } => {
            let g = load(&file)?;
            let b = bounds.bounds()?;
            let u = parse_input(&g, &input)?;
            let s = engine::transduce(&g, &u, &b)?;
            out("transduce").items(&b, s.complete_up_to, true, &sorted_words(&s));
        }
        Command::Accept { file, input, word, bounds } => {
            let g = load(&file)?;
            let b = bounds.bounds()?;
            if let Some(w) = word {
                let w = parse_word(&w);
                let yes = if g.finals.is_empty() {
                    let s = engine::generate(&g, &Bounds { max_len: w.len(), ..b })?;
                    if !s.items.contains(&w) && s.complete_up_to.map_or(true, |n| n < w.len()) {
                        return Err(gws_core::Error::Resource(format!(
                            "search for {} cut off by the bounds",
                            word_text(&w)
                        ))
                        .into());
                    }
                    s.items.contains(&w)
                } else {
                    engine::accept_final_state(&g, &g.finals, &w, &b)?
                };
                let text = if yes { "ACCEPTED" } else { "REJECTED" };
                out("accept").result(Some(&b), text, json!(text.to_lowercase()));
                return Ok(ExitCode::SUCCESS);
            }
            let u = parse_input(&g, input.as_deref().unwrap_or(""))?;
            let (text, code) = match engine::d_accept(&g, &u, &b)? {
                AcceptResult::Accepted => ("ACCEPTED", 0),
                AcceptResult::RejectedWithinBounds => ("REJECTED within bounds", 0),
                AcceptResult::Exhausted => ("EXHAUSTED bounds", 2),
            };
            out("accept").result(Some(&b), text, json!(text));
            return Ok(ExitCode::from(code));
        }
        Command::Trees { file, bounds } => {
            let g = load(&file)?;
            let b = bounds.bounds()?;
            let s = engine::generate_trees(&g, &b)?;
            out("trees").items(&b, s.complete_up_to, s.all_inputs, &sorted_trees(&s));
        }
        Command::Construct { name, file, mode, alphabet, step_bound, no_prune, bounds } => {
            if name == Construction::Mark {
                let a = parse_alphabet(alphabet.as_deref().ok_or_else(|| anyhow!("mark needs --alphabet"))?)?;
                let m = MarkedAlphabet::new(a)?;
                let text = std::fs::read_to_string(&file)?;
                let mut marked = Vec::new();
                for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
                    let t = Tree::parse(line)?;
                    if !t.conforms(&m.base) {
                        bail!("tree {t} is not over the alphabet {}", m.base);
                    }
                    marked.push(cons::mark_tree(&t, &m).to_string());
                }
                out("construct").result(None, &marked.join("\n"), json!(marked));
                return Ok(ExitCode::SUCCESS);
            }
            let g = load(&file)?;
            let alpha = || -> anyhow::Result<RankedAlphabet> {
                parse_alphabet(alphabet.as_deref().ok_or_else(|| anyhow!("this construction needs --alphabet"))?)
            };
            let result = match name {
                Construction::ToPda => cons::to_pushdown_automaton(&g)?,
                Construction::ToGrammar => cons::to_grammar(&g, !no_prune)?,
                Construction::CollapseExt => cons::collapse_ext(&g)?,
                Construction::DetLa => cons::determinize_via_lookahead(&g, step_bound)?,
                Construction::DetPf => cons::determinize_pf(&g, step_bound)?,
                Construction::ConvReg => {
                    let m = match mode.as_deref() {
                        Some("de-to-df") => RegMode::DeToDf,
                        Some("df-to-reg") => RegMode::DfToReg,
                        Some("df-prefix-free-to-de") => RegMode::DfPrefixFreeToDe,
                        _ => bail!("--mode must be de-to-df, df-to-reg or df-prefix-free-to-de"),
                    };
                    cons::convert_acceptance_reg(&g, m, &bounds.bounds()?)?
                }
                Construction::ConvRt => {
                    let (m, base) = match mode.as_deref() {
                        Some("de-to-df") => (RtMode::DeToDf, g.ranked_alphabet()),
                        Some("df-to-rt") => (RtMode::DfToRt, alpha()?),
                        Some("df-to-de-la") => (RtMode::DfToDeLa, alpha()?),
                        _ => bail!("--mode must be de-to-df, df-to-rt or df-to-de-la"),
                    };
                    cons::convert_acceptance_rt(&g, m, &base, step_bound)?
                }
                Construction::DerivTrees => cons::derivation_tree_acceptor(&g)?,
                Construction::YieldGrammar => cons::yield_grammar(&g)?,
                Construction::PathAcceptor => cons::path_acceptor(&g, &alpha()?)?,
                Construction::TreeAcceptor => cons::tree_acceptor_from_paths(&g, &alpha()?)?,
                Construction::Mark => unreachable!(),
            };
            let text = result.to_text();
            out("construct").result(None, text.trim_end(), json!(text));
        }
        Command::Delta { file, paths, alphabet, size_bound, trees, bounds } => {
            let a = parse_alphabet(&alphabet)?;
            let source = match (file, paths) {
                (Some(f), None) => PathSource::Grammar(load(&f)?),
                (None, Some(p)) => {
                    let text = std::fs::read_to_string(&p).with_context(|| format!("cannot read {}", p.display()))?;
                    PathSource::Finite(
                        text.lines()
                            .map(str::trim)
                            .filter(|l| !l.is_empty() && !l.starts_with('#'))
                            .map(parse_word)
                            .collect(),
                    )
                }
                _ => bail!("give a grammar file or --paths"),
            };
            let spec = DeltaSpec { alphabet: a, source, size_bound, bounds: bounds.bounds()? };
            if trees {
                let s = delta::tree_delta(&spec)?;
                out("delta").items(&s.bounds, s.complete_up_to, true, &sorted_trees(&s));
            } else {
                let s = delta::delta(&spec)?;
                let items = sorted_words(&s);
                match format {
                    Format::Text => {
                        for i in &items {
                            outln!("{i}");
                        }
                        eprintln!("yields of all trees up to size {size_bound}");
                    }
                    Format::Json => out("delta").items(&s.bounds, s.complete_up_to, true, &items),
                }
            }
        }
        Command::ReWitness { l, m, hom } => {
            let l = load(&l)?;
            let m = load(&m)?;
            let mut h: Vec<(Symbol, Word)> = Vec::new();
            for part in hom.split(',').map(str::trim).filter(|p| !p.is_empty()) {
                let (a, w) = part.split_once('=').ok_or_else(|| anyhow!("expected a=w in --hom, got '{part}'"))?;
                h.push((gws_core::sym(a.trim()), parse_word(w.trim())));
            }
            let (k, a) = delta::re_witness(&l, &m, &h)?;
            let text = format!("# alphabet {a};\n{}", k.to_text());
            out("re-witness").result(None, text.trim_end(), json!({"alphabet": a.to_string(), "grammar": k.to_text()}));
        }
        Command::Equiv { a, b, bounds } => {
            let ga = load(&a)?;
            let gb = load(&b)?;
            let bnd = bounds.bounds()?;
            let sa = engine::generate(&ga, &bnd)?;
            let sb = engine::generate(&gb, &bnd)?;
            let n = match (sa.complete_up_to, sb.complete_up_to) {
                (Some(x), Some(y)) => x.min(y).min(bnd.max_len),
                _ => {
                    return Err(gws_core::Error::Resource("samples not certified at any length".into()).into())
                }
            };
            let la: BTreeSet<&Word> = sa.items.iter().filter(|w| w.len() <= n).collect();
            let lb: BTreeSet<&Word> = sb.items.iter().filter(|w| w.len() <= n).collect();
            let mut diff: Vec<&Word> = la.symmetric_difference(&lb).copied().collect();
            diff.sort_by(|x, y| length_lex(x, y));
            return Ok(match diff.first() {
                None => {
                    out("equiv").result(Some(&bnd), &format!("EQUAL up to {n}"), json!({"equal": true, "up_to": n}));
                    ExitCode::SUCCESS
                }
                Some(w) => {
                    let side = if la.contains(*w) { ga.name.clone() } else { gb.name.clone() };
                    let text = format!("DIFFER: {} (only in {side})", word_text(w));
                    out("equiv").result(
                        Some(&bnd),
                        &text,
                        json!({"equal": false, "witness": word_text(w), "only_in": side}),
                    );
                    ExitCode::from(1)
                }
            });
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            let resource = e.downcast_ref::<gws_core::Error>().is_some_and(gws_core::Error::is_resource);
            ExitCode::from(if resource { 2 } else { 1 })
        }
    }
}
