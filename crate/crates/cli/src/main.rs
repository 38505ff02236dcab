//! `cflr`: build CFL reachability indices, answer queries, extract witnesses,
//! and run the schema linearity census.
//!
//! Exit codes: 0 on success, 1 on domain errors (missing files, form
//! mismatches, out-of-range vertices, no witness), 2 on usage errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use cflr_core::index_io::{read_index, write_index, IndexFile, IndexKind};
use cflr_core::{
    extract_path, lin_build, lindist_build, naive_fixpoint, parse_grammar, parse_graph, swd_wrap,
    to_cnf, to_talnf, Grammar, NtId, INFINITE_DISTANCE,
};

#[derive(Parser)]
#[command(
    name = "cflr",
    version,
    about = "Grammar-constrained reachability indices"
)]
struct Cli {
    /// Reserved for future randomized features; accepted and ignored.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IndexChoice {
    Sat,
    Lin,
    Lindist,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WitnessFormat {
    Explicit,
    Slp,
}

#[derive(Subcommand)]
enum Command {
    /// Print the normal-form classification of a grammar
    Classify {
        #[arg(short = 'g', long = "grammar")]
        grammar: PathBuf,
    },
    /// Build an index from a grammar file and an edge list
    Build {
        #[arg(short = 'g', long = "grammar")]
        grammar: PathBuf,
        #[arg(short = 'e', long = "edges")]
        edges: PathBuf,
        /// Index variant: sat (CNF baseline), lin (TALNF), lindist (shortest)
        #[arg(long = "index", value_enum)]
        index: IndexChoice,
        /// Output path; defaults to index.cflr under $CFLR_OUT_DIR or `.`
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
        /// Require the grammar to already be in the index's normal form
        #[arg(long = "no-normalize")]
        no_normalize: bool,
    },
    /// Answer reachability queries against a built index
    Query {
        index: PathBuf,
        s: Option<u32>,
        t: Option<u32>,
        /// Batch mode: file of `s t` pairs, one per line
        #[arg(long = "pairs", conflicts_with_all = ["s", "t"])]
        pairs: Option<PathBuf>,
    },
    /// Print a witness path for an accepted pair
    Witness {
        index: PathBuf,
        s: u32,
        t: u32,
        #[arg(long, value_enum, default_value_t = WitnessFormat::Explicit)]
        format: WitnessFormat,
    },
    /// Print the shortest accepted path from a lindist index
    Shortest { index: PathBuf, s: u32, t: u32 },
    /// Convert a directory of JSON schemas and report the linearity census
    Census {
        dir: PathBuf,
        /// JSON object mapping schema ids to train/validation/test splits
        #[arg(long)]
        splits: Option<PathBuf>,
        /// Report directory; defaults to census-out under $CFLR_OUT_DIR or `.`
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the naive-fixpoint relations (debugging aid)
    #[command(hide = true)]
    Oracle {
        #[arg(short = 'g', long = "grammar")]
        grammar: PathBuf,
        #[arg(short = 'e', long = "edges")]
        edges: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn out_dir() -> PathBuf {
    std::env::var_os("CFLR_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn load_grammar(path: &Path) -> Result<Grammar> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read grammar file {}", path.display()))?;
    parse_grammar(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_index(path: &Path) -> Result<IndexFile> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read index file {}", path.display()))?;
    read_index(&text).with_context(|| format!("parsing {}", path.display()))
}

fn check_vertex(v: u32, n: usize) -> Result<()> {
    if (v as usize) >= n {
        bail!("vertex {v} out of range (index covers {n} vertices)");
    }
    Ok(())
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Classify { grammar } => {
            let g = load_grammar(&grammar)?;
            println!("{}", g.classify());
            Ok(())
        }
        Command::Build {
            grammar,
            edges,
            index,
            out,
            no_normalize,
        } => {
            let g = load_grammar(&grammar)?;
            let normalized = match index {
                IndexChoice::Sat => {
                    if no_normalize {
                        if !g.is_cnf() {
                            bail!("grammar is not in CNF (used --no-normalize)");
                        }
                        g
                    } else {
                        to_cnf(&g)
                    }
                }
                IndexChoice::Lin | IndexChoice::Lindist => {
                    if no_normalize {
                        if !g.is_talnf() {
                            bail!("grammar is not in TALNF (used --no-normalize)");
                        }
                        g
                    } else {
                        to_talnf(&g).context("the lin/lindist indices need a linear grammar")?
                    }
                }
            };
            let graph_text = fs::read_to_string(&edges)
                .with_context(|| format!("cannot read edge list {}", edges.display()))?;
            let graph = parse_graph(&graph_text, &normalized)
                .with_context(|| format!("parsing {}", edges.display()))?;

            let started = Instant::now();
            let file = match index {
                IndexChoice::Sat => {
                    let built = cflr_core::sat_build(&normalized, &graph)?;
                    eprint_stats(&built.stats, started);
                    IndexFile::from_built(IndexKind::Sat, &normalized, &built)
                }
                IndexChoice::Lin => {
                    let built = lin_build(&normalized, &graph)?;
                    eprint_stats(&built.stats, started);
                    IndexFile::from_built(IndexKind::Lin, &normalized, &built)
                }
                IndexChoice::Lindist => {
                    let built = lindist_build(&normalized, &graph)?;
                    eprint_stats(&built.stats, started);
                    IndexFile::from_distance(&normalized, &built)
                }
            };
            let out_path = out.unwrap_or_else(|| out_dir().join("index.cflr"));
            fs::write(&out_path, write_index(&file))
                .with_context(|| format!("writing {}", out_path.display()))?;
            eprintln!("index={}", out_path.display());
            Ok(())
        }
        Command::Query { index, s, t, pairs } => {
            let idx = load_index(&index)?;
            let answer = |s: u32, t: u32| -> Result<()> {
                check_vertex(s, idx.n)?;
                check_vertex(t, idx.n)?;
                println!("{}", idx.relations.get(idx.start, s, t));
                Ok(())
            };
            match (s, t, pairs) {
                (Some(s), Some(t), None) => answer(s, t),
                (None, None, Some(path)) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("cannot read pairs file {}", path.display()))?;
                    for (i, line) in text.lines().enumerate() {
                        let line = line.trim();
                        if line.is_empty() || line.starts_with('#') {
                            continue;
                        }
                        let mut toks = line.split_whitespace();
                        let (a, b) = (toks.next(), toks.next());
                        let (a, b) = match (a, b, toks.next()) {
                            (Some(a), Some(b), None) => (a, b),
                            _ => bail!("pairs file line {}: expected `s t`", i + 1),
                        };
                        let s: u32 = a.parse().with_context(|| format!("line {}", i + 1))?;
                        let t: u32 = b.parse().with_context(|| format!("line {}", i + 1))?;
                        answer(s, t)?;
                    }
                    Ok(())
                }
                _ => bail!("provide either `s t` or --pairs FILE"),
            }
        }
        Command::Witness {
            index,
            s,
            t,
            format,
        } => {
            let idx = load_index(&index)?;
            check_vertex(s, idx.n)?;
            check_vertex(t, idx.n)?;
            if !idx.relations.get(idx.start, s, t) {
                bail!("no accepted path from {s} to {t}");
            }
            match format {
                WitnessFormat::Explicit => {
                    let path = extract_path(&idx.witnesses, idx.start, s, t)?;
                    print_path_edges(&path, &idx.term_names);
                }
                WitnessFormat::Slp => {
                    let dag = swd_wrap(&idx.relations, &idx.witnesses)?;
                    let root = dag
                        .root(idx.start, s, t)
                        .expect("true entry has a witness root");
                    let slp = cflr_core::emit_slp(&dag, root)?;
                    print!("{}", slp.to_text(&idx.term_names));
                }
            }
            Ok(())
        }
        Command::Shortest { index, s, t } => {
            let idx = load_index(&index)?;
            if idx.kind != IndexKind::LinDist {
                bail!("`shortest` needs an index built with --index lindist");
            }
            check_vertex(s, idx.n)?;
            check_vertex(t, idx.n)?;
            let table = idx.distance_table().expect("lindist index has distances");
            let d = table[idx.start.index()][s as usize * idx.n + t as usize];
            if d == INFINITE_DISTANCE {
                println!("dist=inf");
            } else {
                println!("dist={d}");
                let path = extract_path(&idx.witnesses, idx.start, s, t)?;
                print_path_edges(&path, &idx.term_names);
            }
            Ok(())
        }
        Command::Census { dir, splits, out } => {
            let out_path = out.unwrap_or_else(|| out_dir().join("census-out"));
            let report = cflr_census::run_census(&dir, splits.as_deref(), &out_path)?;
            let a = &report.aggregate;
            println!(
                "schemas={} linear={} general={} pct_linear={:.1}",
                a.total,
                a.linear,
                a.general,
                a.pct_linear()
            );
            println!("reports={}", out_path.display());
            if !report.skipped.is_empty() {
                eprintln!("skipped={} unreadable schema files", report.skipped.len());
            }
            Ok(())
        }
        Command::Oracle { grammar, edges } => {
            let g = load_grammar(&grammar)?;
            // Normalize into a shape the naive fixpoint accepts.
            let g = if g.is_talnf() || g.is_cnf() {
                g
            } else if g.is_linear() {
                to_talnf(&g)?
            } else {
                to_cnf(&g)
            };
            let graph_text = fs::read_to_string(&edges)
                .with_context(|| format!("cannot read edge list {}", edges.display()))?;
            let graph = parse_graph(&graph_text, &g)?;
            let rels = naive_fixpoint(&g, &graph)?;
            for a in 0..rels.num_nonterminals() {
                let nt = NtId(a as u32);
                for u in 0..rels.num_vertices() as u32 {
                    for v in 0..rels.num_vertices() as u32 {
                        if rels.get(nt, u, v) {
                            println!("{} {u} {v}", g.nt_name(nt));
                        }
                    }
                }
            }
            Ok(())
        }
    }
}

fn eprint_stats(stats: &cflr_core::BuildStats, started: Instant) {
    eprintln!(
        "entries={} dequeues={} propagations={} wall_ms={}",
        stats.entries,
        stats.dequeues,
        stats.inner_iterations,
        started.elapsed().as_millis()
    );
}

fn print_path_edges(path: &cflr_core::Path, term_names: &[String]) {
    for e in &path.edges {
        println!("{} {} {}", e.from, e.to, term_names[e.label.index()]);
    }
}
