use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use planex::certificate::{verify_certificate, Certificate, Status};
use planex::graph::{
    gen_disjoint_biclique, gen_random_min_degree, gen_tree_blowup, graph_stats, labels_to_text,
    Graph,
};
use planex::oracle::{pl_exact, OracleError};
use planex::pipeline::extract_planar;
use planex::regularity::RegularityParams;
use planex::structure::PipelineConfig;

const EXIT_VERIFY: u8 = 1;
const EXIT_STAGE: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "planex",
    version,
    about = "Large planar subgraphs of dense graphs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a generated graph in edge-list format.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Extract a planar subgraph and write its certificate.
    Extract {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 0.25)]
        d: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        r_max: usize,
        /// Triangulation order used for triangle clusters.
        #[arg(long, default_value_t = 12)]
        s: usize,
        #[arg(long)]
        waive_size_check: bool,
        /// Run even when the minimum degree is below gamma n.
        #[arg(long)]
        allow_low_min_degree: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Check a certificate against its input graph.
    Verify {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        cert: PathBuf,
    },
    /// Exact maximum planar subgraph size.
    Oracle {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(long, default_value_t = 5_000_000)]
        budget: u64,
    },
    /// Vertex, edge, degree and component counts.
    Stats {
        #[arg(short, long)]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// k disjoint copies of K_{t,t}.
    Biclique {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write the natural part labels.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Complete blow-up of a tree, with optional noise between unjoined parts.
    Blowup {
        /// Tree edges, e.g. "0-1,1-2".
        #[arg(long)]
        tree: String,
        /// Part sizes, e.g. "2000,2000,2000".
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Random graph with a prescribed minimum degree.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        min_degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

enum Failure {
    Input(anyhow::Error),
    Verify(String),
    Stage(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn read_graph(path: &PathBuf) -> Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Graph::parse_edge_list(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: &PathBuf, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .with_context(|| format!("bad number {t:?}"))
        })
        .collect()
}

fn parse_tree(s: &str) -> Result<Vec<(usize, usize)>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let Some((a, b)) = t.split_once('-') else {
                bail!("tree edge {t:?} is not of the form a-b")
            };
            Ok((a.trim().parse()?, b.trim().parse()?))
        })
        .collect()
}

fn gen(kind: GenKind) -> Result<()> {
    match kind {
        GenKind::Biclique {
            k,
            t,
            output,
            labels,
        } => {
            write(&output, &gen_disjoint_biclique(k, t).to_edge_list_text())?;
            if let Some(p) = labels {
                write(&p, &labels_to_text(&planex::graph::biclique_labels(k, t)))?;
            }
        }
        GenKind::Blowup {
            tree,
            sizes,
            noise,
            seed,
            output,
            labels,
        } => {
            let (g, l) = gen_tree_blowup(&parse_tree(&tree)?, &parse_list(&sizes)?, noise, seed)?;
            write(&output, &g.to_edge_list_text())?;
            if let Some(p) = labels {
                write(&p, &labels_to_text(&l))?;
            }
        }
        GenKind::Random {
            n,
            min_degree,
            seed,
            output,
        } => {
            write(
                &output,
                &gen_random_min_degree(n, min_degree, seed)?.to_edge_list_text(),
            )?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Gen { kind } => gen(kind)?,
        Cmd::Extract {
            input,
            gamma,
            eps,
            d,
            seed,
            r_max,
            s,
            waive_size_check,
            allow_low_min_degree,
            output,
        } => {
            let g = read_graph(&input)?;
            let mut cfg = PipelineConfig::new(gamma).map_err(anyhow::Error::from)?;
            cfg.params = RegularityParams::new(eps, d);
            cfg.seed = seed;
            cfg.r_max = r_max;
            cfg.s = s;
            cfg.waive_size_check = waive_size_check;
            cfg.allow_low_min_degree = allow_low_min_degree;
            cfg.validate().map_err(anyhow::Error::from)?;
            if allow_low_min_degree && (g.min_degree() as f64) < gamma * g.n() as f64 {
                eprintln!(
                    "warning: min degree {} is below gamma n = {:.1}",
                    g.min_degree(),
                    gamma * g.n() as f64
                );
            }
            let cert = extract_planar(&g, &cfg)
                .map_err(|e| Failure::Stage(format!("{e}\n{}", e.stats)))?;
            write(
                &output,
                &serde_json::to_string_pretty(&cert).map_err(anyhow::Error::from)?,
            )?;
            println!(
                "case {}: {} edges, bound 2n - 4k = {}, {:?}",
                cert.case, cert.edge_count, cert.claimed_bound, cert.status
            );
            if cert.status != Status::Success {
                return Err(Failure::Stage(format!(
                    "edge count {} below the bound {}",
                    cert.edge_count, cert.claimed_bound
                )));
            }
        }
        Cmd::Verify { input, cert } => {
            let g = read_graph(&input)?;
            let text =
                fs::read_to_string(&cert).with_context(|| format!("reading {}", cert.display()))?;
            let c: Certificate = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", cert.display()))?;
            let rep = verify_certificate(&g, &c);
            for check in &rep.checks {
                let mark = if check.passed { "ok  " } else { "FAIL" };
                println!(
                    "{mark} {}{}",
                    check.name,
                    if check.detail.is_empty() {
                        String::new()
                    } else {
                        format!(": {}", check.detail)
                    }
                );
            }
            if !rep.ok() {
                return Err(Failure::Verify(format!(
                    "{} checks failed",
                    rep.failures().len()
                )));
            }
        }
        Cmd::Oracle { input, budget } => {
            let g = read_graph(&input)?;
            let (res, exact) = match pl_exact(&g, budget) {
                Ok(r) => (r, true),
                Err(OracleError::BudgetExhausted(best)) => (*best, false),
            };
            println!(
                "pl = {}{}",
                res.value,
                if exact {
                    ""
                } else {
                    " (lower bound, budget exhausted)"
                }
            );
            println!("exact = {exact}");
            println!("nodes = {}", res.nodes_explored);
            for (u, v) in &res.edges {
                println!("{u} {v}");
            }
        }
        Cmd::Stats { input } => {
            let g = read_graph(&input)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&graph_stats(&g)).map_err(anyhow::Error::from)?
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INPUT)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Verify(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(EXIT_VERIFY)
        }
        Err(Failure::Stage(m)) => {
            eprintln!("pipeline failed: {m}");
            ExitCode::from(EXIT_STAGE)
        }
    }
}
