use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use gapscope_core::ngram::{NGramModel, Normalizer, TrainConfig};
use gapscope_core::pipeline::{run_suites, suite_sha256, RunConfig, ScorerSpec, Stage};
use gapscope_core::report::{sha256_hex, timestamp, write_atomic, RunInfo};
use gapscope_core::scoring::{score_suite, BuiltinScorer, ExternalConfig, ExternalScorer, Scorer};
use gapscope_core::stats::simulate::{null_calibration, SyntheticSpec};
use gapscope_core::suite::{bundled, parse_suite, serialize_suite, Template, TestSuite};
use gapscope_core::Exec;

#[derive(Parser)]
#[command(name = "gapscope", version, about = "Targeted syntactic evaluation of language models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a template into a suite file
    Expand {
        /// Template file, or the name of a bundled template
        #[arg(long)]
        template: String,
        /// Number of items
        #[arg(long)]
        n: usize,
        /// Output file (standard output if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train the built-in Kneser-Ney n-gram model
    Train {
        /// Training corpus, one whitespace-tokenized sentence per line
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..=10))]
        order: u32,
        #[arg(long, default_value_t = 0.75)]
        discount: f64,
        /// Words seen fewer times map to <unk>
        #[arg(long, default_value_t = 1)]
        min_count: u64,
        /// Keep case instead of lowercasing
        #[arg(long)]
        no_lowercase: bool,
        /// Held-out sentences for a perplexity report
        #[arg(long)]
        dev: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check suite files and report every diagnostic
    Validate {
        #[arg(required = true)]
        suites: Vec<String>,
    },
    /// Score a suite and write one JSON line per sentence
    Score {
        #[arg(long)]
        suite: String,
        #[command(flatten)]
        scorer: ScorerArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score, analyze and report one or more suites
    Run {
        /// Suite file or bundled suite name (repeatable; default: all bundled)
        #[arg(long = "suite")]
        suites: Vec<String>,
        #[command(flatten)]
        scorer: ScorerArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        confidence: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Validate suites and scorer settings without scoring
        #[arg(long)]
        dry_run: bool,
        /// JSON run configuration; flags take precedence
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Null-interaction simulation checking the Wald test's error rate
    Simulate {
        #[arg(long, default_value_t = 1000)]
        replicates: usize,
        #[arg(long, default_value_t = 20)]
        items: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run replicates on one thread
        #[arg(long)]
        sequential: bool,
    },
    /// Write the bundled templates and expanded suites to a directory
    GenSuites {
        #[arg(long, default_value = "suites")]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScorerKind {
    Builtin,
    Cmd,
}

#[derive(Args)]
struct ScorerArgs {
    #[arg(long, value_enum)]
    scorer: Option<ScorerKind>,
    /// Model file for the built-in scorer
    #[arg(long)]
    model: Option<PathBuf>,
    /// External scorer command, after `--`
    #[arg(last = true)]
    command: Vec<String>,
}

impl ScorerArgs {
    fn spec(&self) -> Result<Option<ScorerSpec>> {
        match self.scorer {
            None if self.model.is_none() && self.command.is_empty() => Ok(None),
            None => bail!("--scorer is required with --model or a scorer command"),
            Some(ScorerKind::Builtin) => {
                let model = self
                    .model
                    .clone()
                    .ok_or_else(|| anyhow!("--scorer builtin needs --model PATH"))?;
                if !self.command.is_empty() {
                    bail!("--scorer builtin takes no command");
                }
                Ok(Some(ScorerSpec::Builtin { model }))
            }
            Some(ScorerKind::Cmd) => {
                if self.command.is_empty() {
                    bail!("--scorer cmd needs a command after --");
                }
                if self.model.is_some() {
                    bail!("--model only applies to --scorer builtin");
                }
                Ok(Some(ScorerSpec::Command {
                    command: self.command.clone(),
                }))
            }
        }
    }
}

/// A usage or configuration problem (exit 1) or a failed pipeline stage (exit 2).
enum Failure {
    Usage(anyhow::Error),
    Stage(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.into())
    }
}

fn stage<T>(result: Result<T, impl Into<anyhow::Error>>) -> Result<T, Failure> {
    result.map_err(|e| Failure::Stage(e.into()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Stage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Expand { template, n, out } => cmd_expand(&template, n, out.as_deref()),
        Command::Train {
            corpus,
            order,
            discount,
            min_count,
            no_lowercase,
            dev,
            out,
        } => {
            let config = TrainConfig {
                order: order as usize,
                discount,
                min_count,
                normalizer: if no_lowercase {
                    Normalizer::Identity
                } else {
                    Normalizer::Lowercase
                },
            };
            cmd_train(&corpus, &config, dev.as_deref(), &out)
        }
        Command::Validate { suites } => cmd_validate(&suites),
        Command::Score { suite, scorer, out } => {
            let spec = scorer.spec()?.ok_or_else(|| anyhow!("a scorer is required"))?;
            cmd_score(&suite, &spec, out.as_deref())
        }
        Command::Run {
            suites,
            scorer,
            out,
            confidence,
            seed,
            dry_run,
            config,
        } => {
            let mut cfg = match config {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str(&text)
                        .with_context(|| format!("parsing run config {}", path.display()))?
                }
                None => RunConfig::default(),
            };
            if !suites.is_empty() {
                cfg.suites = suites;
            }
            if let Some(spec) = scorer.spec()? {
                cfg.scorer = Some(spec);
            }
            if let Some(out) = out {
                cfg.out = out;
            }
            if let Some(c) = confidence {
                cfg.confidence = c;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            cfg.dry_run |= dry_run;
            cmd_run(&cfg)
        }
        Command::Simulate {
            replicates,
            items,
            alpha,
            seed,
            sequential,
        } => {
            if items < 2 {
                return Err(anyhow!("--items must be at least 2").into());
            }
            let spec = SyntheticSpec {
                n_items: items,
                ..SyntheticSpec::default()
            };
            let exec = if sequential { Exec::Sequential } else { Exec::Parallel };
            let report = null_calibration(&spec, replicates, alpha, seed, exec);
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }
        Command::GenSuites { out_dir } => cmd_gen_suites(&out_dir),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()).map_err(Into::into),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load_template(spec: &str) -> Result<Template> {
    let path = Path::new(spec);
    if path.is_file() {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Template::from_json(&text).with_context(|| format!("template {}", path.display()));
    }
    bundled::templates()
        .into_iter()
        .map(|(t, _)| t)
        .find(|t| t.name == spec)
        .ok_or_else(|| anyhow!("no template file or bundled template named '{spec}'"))
}

fn cmd_expand(template: &str, n: usize, out: Option<&Path>) -> Result<(), Failure> {
    let template = load_template(template)?;
    let suite = template
        .expand_to_suite(n)
        .with_context(|| format!("expanding template '{}'", template.name))?;
    write_output(out, &serialize_suite(&suite))?;
    eprintln!("expanded '{}' to {} items", suite.name, suite.items.len());
    Ok(())
}

fn read_sentences(path: &Path) -> Result<Vec<Vec<String>>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .map(|l| l.split_whitespace().map(str::to_string).collect::<Vec<_>>())
        .filter(|s| !s.is_empty())
        .collect())
}

fn cmd_train(
    corpus: &Path,
    config: &TrainConfig,
    dev: Option<&Path>,
    out: &Path,
) -> Result<(), Failure> {
    let sentences = read_sentences(corpus)?;
    let model = NGramModel::train(&sentences, config)
        .with_context(|| format!("training on {}", corpus.display()))?;
    write_atomic(out, &model.save())?;
    println!("vocabulary size: {}", model.predictable_size());
    if let Some(dev) = dev {
        let dev_sentences = read_sentences(dev)?;
        println!("dev perplexity: {}", model.perplexity(&dev_sentences));
    }
    eprintln!(
        "trained order-{} model on {} sentences, wrote {}",
        config.order,
        sentences.len(),
        out.display()
    );
    Ok(())
}

fn compiled_suite_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../suites")
}

/// Directory holding bundled suite files: `GAPSCOPE_SUITE_DIR` if set,
/// otherwise the workspace `suites/` directory when present.
fn suite_dir() -> Option<PathBuf> {
    match std::env::var_os("GAPSCOPE_SUITE_DIR") {
        Some(dir) => Some(PathBuf::from(dir)),
        None => Some(compiled_suite_dir()).filter(|d| d.is_dir()),
    }
}

fn load_suite_file(path: &Path) -> Result<TestSuite> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_suite(&text).with_context(|| format!("suite {}", path.display()))
}

fn builtin_suite(name: &str) -> Result<Option<TestSuite>> {
    match bundled::templates().into_iter().find(|(t, _)| t.name == name) {
        Some((t, n)) => Ok(Some(t.expand_to_suite(n)?)),
        None => Ok(None),
    }
}

fn resolve_suite(spec: &str) -> Result<TestSuite> {
    let path = Path::new(spec);
    if path.is_file() {
        return load_suite_file(path);
    }
    if let Some(dir) = suite_dir() {
        let candidate = dir.join(format!("{spec}.json"));
        if candidate.is_file() {
            return load_suite_file(&candidate);
        }
        if std::env::var_os("GAPSCOPE_SUITE_DIR").is_some() {
            bail!("no suite file '{spec}' and no '{}'", candidate.display());
        }
    }
    builtin_suite(spec)?.ok_or_else(|| anyhow!("no suite file or bundled suite named '{spec}'"))
}

fn all_bundled_suites() -> Result<Vec<TestSuite>> {
    if let Some(dir) = std::env::var_os("GAPSCOPE_SUITE_DIR").map(PathBuf::from) {
        let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
            .with_context(|| format!("listing {}", dir.display()))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "json"))
            .collect();
        paths.sort();
        if paths.is_empty() {
            bail!("no suite files in {}", dir.display());
        }
        return paths.iter().map(|p| load_suite_file(p)).collect();
    }
    bundled::ITEM_COUNTS
        .iter()
        .map(|(name, _)| resolve_suite(name))
        .collect()
}

fn cmd_validate(suites: &[String]) -> Result<(), Failure> {
    let mut failed = 0;
    for spec in suites {
        match resolve_suite(spec) {
            Ok(suite) => println!("{spec}: ok ({} items)", suite.items.len()),
            Err(e) => {
                failed += 1;
                println!("{spec}: invalid");
                for cause in e.chain() {
                    println!("  {cause}");
                }
            }
        }
    }
    if failed > 0 {
        return Err(anyhow!("{failed} of {} suites failed validation", suites.len()).into());
    }
    Ok(())
}

/// Scorer plus the hash of its model file, if any.
fn make_scorer(spec: &ScorerSpec) -> Result<(Box<dyn Scorer>, Option<String>), Failure> {
    match spec {
        ScorerSpec::Builtin { model } => {
            let bytes = fs::read(model).with_context(|| format!("reading {}", model.display()))?;
            let loaded = NGramModel::load(&bytes)
                .with_context(|| format!("loading model {}", model.display()))?;
            Ok((Box::new(BuiltinScorer::new(loaded)), Some(sha256_hex(&bytes))))
        }
        ScorerSpec::Command { command } => {
            let scorer = ExternalScorer::spawn(command, ExternalConfig::default())
                .with_context(|| format!("stage '{}' failed: starting scorer", Stage::Score));
            Ok((Box::new(stage(scorer)?), None))
        }
    }
}

fn cmd_score(suite: &str, spec: &ScorerSpec, out: Option<&Path>) -> Result<(), Failure> {
    let suite = resolve_suite(suite)?;
    let (mut scorer, _) = make_scorer(spec)?;
    let scored = stage(score_suite(&suite, scorer.as_mut()))?;
    let text: String = scored.iter().map(|s| s.to_json_line() + "\n").collect();
    write_output(out, &text)?;
    eprintln!("scored {} sentences from '{}'", scored.len(), suite.name);
    Ok(())
}

fn cmd_run(config: &RunConfig) -> Result<(), Failure> {
    let spec = config.check()?;
    let suites = if config.suites.is_empty() {
        all_bundled_suites()?
    } else {
        config
            .suites
            .iter()
            .map(|s| resolve_suite(s))
            .collect::<Result<Vec<_>>>()?
    };
    for suite in &suites {
        eprintln!("suite {}: {} items, valid", suite.name, suite.items.len());
    }

    if config.dry_run {
        match spec {
            ScorerSpec::Builtin { model } => {
                let bytes =
                    fs::read(model).with_context(|| format!("reading {}", model.display()))?;
                NGramModel::load(&bytes)
                    .with_context(|| format!("loading model {}", model.display()))?;
            }
            ScorerSpec::Command { .. } => {}
        }
        let plan = serde_json::json!({
            "dry_run": true,
            "suites": suites.iter().map(|s| serde_json::json!({
                "suite": s.name,
                "items": s.items.len(),
                "sentences": s.items.iter().map(|i| i.sentences.len()).sum::<usize>(),
                "suite_sha256": suite_sha256(s),
            })).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&plan)?);
        return Ok(());
    }

    let (mut scorer, model_sha256) = make_scorer(spec)?;
    let info = RunInfo {
        scorer: scorer.identity(),
        model_sha256,
        timestamp: timestamp(),
        confidence: config.confidence,
        seed: config.seed,
    };
    let mut progress = |msg: &str| eprintln!("{msg}");
    let (_, summary) = stage(run_suites(
        &suites,
        scorer.as_mut(),
        &info,
        &config.out,
        &mut progress,
    ))?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn cmd_gen_suites(out_dir: &Path) -> Result<(), Failure> {
    let templates_dir = out_dir.join("templates");
    fs::create_dir_all(&templates_dir)
        .with_context(|| format!("creating {}", templates_dir.display()))?;
    for (template, n) in bundled::templates() {
        write_atomic(
            &templates_dir.join(format!("{}.json", template.name)),
            template.to_json().as_bytes(),
        )?;
        let suite = template.expand_to_suite(n)?;
        write_atomic(
            &out_dir.join(format!("{}.json", suite.name)),
            serialize_suite(&suite).as_bytes(),
        )?;
        eprintln!("{}: {} items", suite.name, n);
    }
    Ok(())
}
