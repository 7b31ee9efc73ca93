//! `coverforge`: batch front end for the cover constructions.
//!
//! Exit codes: 0 success, 1 input error, 2 budget or non-termination (a
//! stamped partial artifact is still written), 3 internal invariant failure.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coverforge::fischer::{build_fischer_graph, build_fischer_graph_with, find_synchronizing_word, is_irreducible};
use coverforge::graph::CoverGraph;
use coverforge::input::{parse_input, parse_potential, Input, InputError, SCHEMA};
use coverforge::interval::{cover_report_tent, extract_sft_cover, tent_map};
use coverforge::krieger::{build_krieger_approximation, build_krieger_graph, termination_level, TerminationReport};
use coverforge::shift::{hex_digest, ShiftOptions};
use coverforge::transfer::{equilibrium_check, perron_data, perron_value, ruelle_matrix, DEFAULT_MAX_ITER};
use coverforge::{Error, ErrorKind, Subshift, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const SELF_CHECK_SAMPLES: usize = 64;
const SELF_CHECK_MAX_LEN: usize = 8;

#[derive(Parser, Debug)]
#[command(name = "coverforge", version, about = "Finite covers of subshifts, interval maps and substitutions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Krieger (past-set) cover of a subshift.
    Krieger,
    /// Fischer cover of an irreducible sofic shift.
    Fischer,
    /// Decide soficity by profile stabilization up to --max-k.
    CheckSofic,
    /// Perron value and topological entropy.
    Entropy,
    /// Perron data of the Ruelle operator for a potential.
    Ruelle,
    /// SFT cover of a piecewise-linear interval map.
    IntervalCover,
    /// Break-point sets and cover report of a tent map.
    Tent,
    /// Edge shift of a substitution.
    SubstCover,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Dot,
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct Options {
    /// Input file, `-` for stdin, or inline JSON.
    #[arg(long, global = true)]
    input: Option<String>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Largest profile level tried.
    #[arg(long, global = true, default_value_t = 8, value_parser = positive)]
    max_k: usize,
    /// Longest candidate synchronizing word (default: 2 × classes²).
    #[arg(long, global = true, value_parser = positive)]
    max_word_len: Option<usize>,
    /// Number of forward images in the interval cover alphabet.
    #[arg(long, global = true, default_value_t = 0)]
    gamma: usize,
    /// Power-iteration tolerance.
    #[arg(long, global = true, default_value_t = 1e-12, value_parser = positive_f64)]
    tol: f64,
    /// Seed for sampled self-checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, env = "COVERFORGE_BUDGET_CELLS", default_value_t = coverforge::interval::DEFAULT_CELL_BUDGET, value_parser = positive)]
    budget_cells: usize,
    #[arg(long, global = true, default_value_t = coverforge::shift::DEFAULT_MONOID_CAP, value_parser = positive)]
    budget_monoid: usize,
    /// Break-set levels for `tent`.
    #[arg(long, global = true, default_value_t = 6, value_parser = positive)]
    levels: usize,
    /// Potential map (file or inline JSON) for `ruelle`.
    #[arg(long, global = true)]
    potential: Option<String>,
    /// Output file, written atomically; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug)]
struct Failure {
    exit: u8,
    code: String,
    detail: String,
}

impl Failure {
    fn input(detail: impl Into<String>) -> Self {
        Failure {
            exit: 1,
            code: "input".into(),
            detail: detail.into(),
        }
    }

    fn internal(detail: impl Into<String>) -> Self {
        Failure {
            exit: 3,
            code: "internal".into(),
            detail: detail.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit = match e.kind() {
            ErrorKind::Input => 1,
            ErrorKind::Budget => 2,
            ErrorKind::Internal => 3,
        };
        Failure {
            exit,
            code: e.code().into(),
            detail: e.to_string(),
        }
    }
}

macro_rules! from_error {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Error::from(e).into()
            }
        }
    )*};
}

from_error!(
    InputError,
    coverforge::ShiftError,
    coverforge::krieger::KriegerError,
    coverforge::fischer::FischerError,
    coverforge::transfer::TransferError,
    coverforge::interval::MapError
);

/// A rendered artifact and the exit code to report once it is written.
struct Artifact {
    body: String,
    exit: u8,
}

struct Run {
    command: Command,
    opts: Options,
    input: Value,
    digest: String,
}

fn read_source(arg: Option<&str>) -> Result<String, Failure> {
    match arg {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::input(format!("cannot read stdin: {e}")))?;
            Ok(s)
        }
        Some(text) if text.trim_start().starts_with('{') => Ok(text.to_string()),
        Some(path) => std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {path}: {e}"))),
    }
}

fn parse_json(text: &str) -> Result<Value, Failure> {
    serde_json::from_str(text).map_err(|e| InputError::Json(e.to_string()).into())
}

impl Run {
    fn new(command: Command, opts: Options) -> Result<Self, Failure> {
        let input = parse_json(&read_source(opts.input.as_deref())?)?;
        let digest = hex_digest(input.to_string().as_bytes());
        Ok(Run {
            command,
            opts,
            input,
            digest,
        })
    }

    fn format(&self, default: Format) -> Format {
        self.opts.format.unwrap_or(default)
    }

    fn provenance(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "tool_version": VERSION,
            "input_digest": self.digest,
            "seed": self.opts.seed,
            "budgets": {
                "max_k": self.opts.max_k,
                "max_word_len": self.opts.max_word_len,
                "cells": self.opts.budget_cells,
                "monoid": self.opts.budget_monoid,
            },
        })
    }

    fn provenance_lines(&self) -> Vec<String> {
        let p = self.provenance();
        ["schema", "tool_version", "input_digest", "seed", "budgets"]
            .iter()
            .map(|k| match &p[*k] {
                Value::String(s) => format!("{k}: {s}"),
                v => format!("{k}: {v}"),
            })
            .collect()
    }

    fn with_provenance(&self, mut body: Value) -> Value {
        if let (Value::Object(o), Value::Object(p)) = (&mut body, self.provenance()) {
            o.extend(p);
        }
        body
    }

    fn parsed(&self) -> Result<Input, Failure> {
        Ok(parse_input(&self.input)?)
    }

    fn shift(&self) -> Result<Subshift, Failure> {
        match self.parsed()? {
            Input::Subshift(spec) => {
                let options = ShiftOptions {
                    monoid_cap: self.opts.budget_monoid,
                    ..ShiftOptions::default()
                };
                Ok(Subshift::with_options(spec, options)?)
            }
            other => Err(Failure::input(format!("expected a subshift, got `{}`", other.kind()))),
        }
    }

    fn execute(&self) -> Result<Artifact, Failure> {
        match self.command {
            Command::Krieger => self.krieger(),
            Command::Fischer => self.fischer(),
            Command::CheckSofic => self.check_sofic(),
            Command::Entropy => self.entropy(),
            Command::Ruelle => self.ruelle(),
            Command::IntervalCover => self.interval_cover(),
            Command::Tent => self.tent(),
            Command::SubstCover => self.subst_cover(),
        }
    }

    fn emit_graph(&self, g: &CoverGraph, name: &str, exit: u8) -> Result<Artifact, Failure> {
        let json = g.to_json();
        let back = CoverGraph::from_json(&json).map_err(|e| Failure::internal(format!("export does not re-import: {e}")))?;
        if back.signature() != g.signature() || back.metadata != g.metadata {
            return Err(Failure::internal("export does not round-trip"));
        }
        let body = match self.format(Format::Dot) {
            Format::Dot => g.to_dot(name, &self.provenance_lines()),
            Format::Json => pretty(&self.with_provenance(json)),
            Format::Csv => {
                let mut out = comment_lines(&self.provenance_lines());
                out.push_str("id,source,range,label,weight\n");
                for e in &g.edges {
                    out.push_str(&format!(
                        "{},{},{},{},{}\n",
                        csv_field(&e.id),
                        csv_field(&g.vertices[e.source].key),
                        csv_field(&g.vertices[e.range].key),
                        csv_field(g.alphabet.name(e.label)),
                        coverforge::graph::format_rational(&e.weight)
                    ));
                }
                out
            }
        };
        Ok(Artifact { body, exit })
    }

    fn emit_json(&self, body: Value, exit: u8) -> Result<Artifact, Failure> {
        match self.format(Format::Json) {
            Format::Json => Ok(Artifact {
                body: pretty(&self.with_provenance(body)),
                exit,
            }),
            f => Err(Failure::input(format!("format {f:?} is not available for this command"))),
        }
    }

    /// Compares sampled word membership in the shift and in the path
    /// language of `g`.
    fn self_check(&self, shift: &Subshift, g: &CoverGraph) -> Result<Value, Failure> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.opts.seed);
        let m = shift.alphabet().size() as u16;
        let languages: Vec<_> = (0..=SELF_CHECK_MAX_LEN).map(|n| g.path_language(n)).collect();
        for _ in 0..SELF_CHECK_SAMPLES {
            let n = rng.random_range(1..=SELF_CHECK_MAX_LEN);
            let w = Word((0..n).map(|_| rng.random_range(0..m)).collect());
            if shift.is_in_language(&w)? != languages[n].contains(&w) {
                return Err(Failure::internal(format!(
                    "path language disagrees with the shift on {}",
                    shift.alphabet().format_word(&w)
                )));
            }
        }
        Ok(json!({ "samples": SELF_CHECK_SAMPLES, "max_len": SELF_CHECK_MAX_LEN, "passed": true }))
    }

    fn termination(&self, shift: &Subshift) -> Result<TerminationReport, Failure> {
        Ok(termination_level(shift, self.opts.max_k)?)
    }

    fn krieger(&self) -> Result<Artifact, Failure> {
        let shift = self.shift()?;
        let report = self.termination(&shift)?;
        let (mut g, exit) = match report.level {
            Some(n) => (build_krieger_graph(&shift, n)?, 0),
            None => {
                let n = report.class_counts.len().saturating_sub(1).clamp(1, self.opts.max_k);
                (build_krieger_approximation(&shift, n)?, 2)
            }
        };
        g.metadata.insert("termination".into(), termination_json(&report));
        if report.level.is_some() && shift.is_exact() {
            let check = self.self_check(&shift, &g)?;
            g.metadata.insert("self_check".into(), check);
        }
        self.emit_graph(&g, "krieger", exit)
    }

    fn fischer_graph(&self, shift: &Subshift) -> Result<CoverGraph, Failure> {
        Ok(match self.opts.max_word_len {
            None => build_fischer_graph(shift)?,
            Some(len) => match find_synchronizing_word(shift, len)? {
                Some(cert) => build_fischer_graph_with(shift, &cert.word)?,
                None => {
                    return Err(coverforge::fischer::FischerError::NoSynchronizingWord { max_len: len }.into())
                }
            },
        })
    }

    fn fischer(&self) -> Result<Artifact, Failure> {
        let shift = self.shift()?;
        let mut g = self.fischer_graph(&shift)?;
        if shift.is_exact() {
            let check = self.self_check(&shift, &g)?;
            g.metadata.insert("self_check".into(), check);
        }
        self.emit_graph(&g, "fischer", 0)
    }

    fn check_sofic(&self) -> Result<Artifact, Failure> {
        let shift = self.shift()?;
        let report = self.termination(&shift)?;
        let exit = if report.level.is_some() { 0 } else { 2 };
        let verdict = match (report.level, report.exact) {
            (Some(_), true) => json!(true),
            (Some(_), false) => json!("stable-up-to-horizon"),
            (None, _) => json!("undecided"),
        };
        if self.format(Format::Json) == Format::Csv {
            let mut body = comment_lines(&self.provenance_lines());
            body.push_str("k,classes\n");
            for (i, c) in report.class_counts.iter().enumerate() {
                body.push_str(&format!("{},{}\n", i + 1, c));
            }
            return Ok(Artifact { body, exit });
        }
        let mut body = termination_json(&report);
        body["sofic"] = verdict;
        body["kind"] = json!(shift.spec().kind());
        self.emit_json(body, exit)
    }

    /// The cover used for spectral commands: the input cover itself, the
    /// Fischer cover when irreducible, the Krieger cover otherwise.
    fn spectral_graph(&self) -> Result<(CoverGraph, &'static str), Failure> {
        if let Input::Cover(g) = self.parsed()? {
            return Ok((g, "cover"));
        }
        let shift = self.shift()?;
        if is_irreducible(&shift)? {
            return Ok((self.fischer_graph(&shift)?, "fischer"));
        }
        let report = self.termination(&shift)?;
        match report.level {
            Some(n) => Ok((build_krieger_graph(&shift, n)?, "krieger")),
            None => Err(coverforge::fischer::FischerError::NotTerminated.into()),
        }
    }

    fn entropy(&self) -> Result<Artifact, Failure> {
        let (g, from) = self.spectral_graph()?;
        let lambda = perron_value(&g, self.opts.tol, DEFAULT_MAX_ITER)?;
        let h = lambda.ln();
        match self.format(Format::Csv) {
            Format::Csv => {
                let mut body = comment_lines(&self.provenance_lines());
                body.push_str("lambda,entropy\n");
                body.push_str(&format!("{},{}\n", num(lambda), num(h)));
                Ok(Artifact { body, exit: 0 })
            }
            Format::Json => Ok(Artifact {
                body: pretty(&self.with_provenance(json!({ "lambda": lambda, "entropy": h, "graph": from }))),
                exit: 0,
            }),
            Format::Dot => Err(Failure::input("format Dot is not available for this command")),
        }
    }

    fn ruelle(&self) -> Result<Artifact, Failure> {
        let (full, from) = self.spectral_graph()?;
        let potential_full = match &self.opts.potential {
            Some(src) => parse_potential(&full, &parse_json(&read_source(Some(src))?)?)?,
            None => vec![0.0; full.edge_count()],
        };
        // Restrict to the recurrent component carrying the largest pressure.
        let mut best: Option<(CoverGraph, Vec<f64>, coverforge::transfer::PerronData)> = None;
        for comp in full.recurrent_components() {
            let keep: std::collections::BTreeSet<usize> = comp.into_iter().collect();
            let sub = full.induced(&keep);
            let pot: Vec<f64> = sub
                .edges
                .iter()
                .map(|e| {
                    let i = full.edges.iter().position(|f| f.id == e.id).unwrap();
                    potential_full[i]
                })
                .collect();
            let pd = perron_data(&ruelle_matrix(&sub, &pot)?, self.opts.tol, DEFAULT_MAX_ITER)?;
            if best.as_ref().is_none_or(|b| pd.lambda > b.2.lambda) {
                best = Some((sub, pot, pd));
            }
        }
        let (g, pot, pd) = best.ok_or(coverforge::transfer::TransferError::EmptyRecurrentPart)?;
        let eq = equilibrium_check(&g, &pot, &pd)?;
        if self.format(Format::Json) == Format::Csv {
            let mut body = comment_lines(&self.provenance_lines());
            body.push_str("vertex,lambda,h,nu\n");
            for (i, v) in g.vertices.iter().enumerate() {
                body.push_str(&format!("{},{},{},{}\n", csv_field(&v.key), num(pd.lambda), num(pd.h[i]), num(pd.nu[i])));
            }
            return Ok(Artifact { body, exit: 0 });
        }
        let vertices: Vec<Value> = g
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| json!({ "key": v.key, "h": pd.h[i], "nu": pd.nu[i] }))
            .collect();
        let edges: Vec<Value> = g
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| json!({ "id": e.id, "potential": pot[i], "measure": eq.edge_weights[i] }))
            .collect();
        self.emit_json(
            json!({
                "graph": from,
                "lambda": pd.lambda,
                "pressure": pd.lambda.ln(),
                "residual": pd.residual,
                "iterations": pd.iterations,
                "vertices": vertices,
                "edges": edges,
                "equilibrium": {
                    "right_residual": eq.right_residual,
                    "left_residual": eq.left_residual,
                    "invariance_violation": eq.invariance_violation,
                    "mass_defect": eq.mass_defect,
                    "max_violation": eq.max_violation,
                },
            }),
            0,
        )
    }

    fn interval_cover(&self) -> Result<Artifact, Failure> {
        let map = match self.parsed()? {
            Input::Map(m) => m,
            Input::Tent(mu) => tent_map(&mu)?,
            other => return Err(Failure::input(format!("expected an interval map, got `{}`", other.kind()))),
        };
        let g = extract_sft_cover(&map, self.opts.gamma, self.opts.budget_cells)?;
        self.emit_graph(&g, "interval-sft", 0)
    }

    fn tent(&self) -> Result<Artifact, Failure> {
        let mut input = self.input.clone();
        if input.get("type").is_none() {
            input["type"] = json!("tent");
        }
        let mu = match parse_input(&input)? {
            Input::Tent(mu) => mu,
            other => return Err(Failure::input(format!("expected a tent map, got `{}`", other.kind()))),
        };
        let report = cover_report_tent(&mu, self.opts.levels, self.opts.budget_cells)?;
        self.emit_json(report, 0)
    }

    fn subst_cover(&self) -> Result<Artifact, Failure> {
        let s = match self.parsed()? {
            Input::Substitution(s) => s,
            other => return Err(Failure::input(format!("expected a substitution, got `{}`", other.kind()))),
        };
        let mut g = s.build_edge_shift();
        let matrix = s.matrix();
        let lambda = perron_value(&g, self.opts.tol, DEFAULT_MAX_ITER)?;
        g.metadata.insert("matrix".into(), json!(matrix));
        g.metadata.insert("perron".into(), json!(lambda));
        self.emit_graph(&g, "substitution", 0)
    }
}

fn termination_json(r: &TerminationReport) -> Value {
    json!({
        "termination_level": r.level,
        "class_counts": r.class_counts,
        "exact": r.exact,
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn comment_lines(lines: &[String]) -> String {
    lines.iter().map(|l| format!("# {l}\n")).collect()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Shortest round-trip decimal.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn write_atomically(path: &Path, body: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(body.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn report(f: &Failure) -> ExitCode {
    eprintln!("{}", json!({ "error": f.code, "detail": f.detail }));
    ExitCode::from(f.exit)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            return report(&Failure {
                exit: 1,
                code: "usage".into(),
                detail: e.kind().to_string() + ": " + e.to_string().lines().next().unwrap_or(""),
            })
        }
    };
    let out = cli.opts.out.clone();
    let artifact = match Run::new(cli.command, cli.opts).and_then(|r| r.execute()) {
        Ok(a) => a,
        Err(f) => return report(&f),
    };
    let written = match &out {
        Some(path) => write_atomically(path, &artifact.body),
        None => std::io::stdout().write_all(artifact.body.as_bytes()),
    };
    if let Err(e) = written {
        return report(&Failure {
            exit: 1,
            code: "io".into(),
            detail: e.to_string(),
        });
    }
    ExitCode::from(artifact.exit)
}
