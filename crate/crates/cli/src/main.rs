use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use zecap::combinatorics::{capacity_lower_bound, cohom_leq, Decision, SearchBudget};
use zecap::graph::{parse_graph, Graph};
use zecap::haemers::{best_eigen_shift_bound, DRep};
use zecap::harness::{sandwich_test, spectrum_axiom_test, Certificate, FunctionalId};
use zecap::lp::fractional_clique_cover;
use zecap::quantum::ProjRep;
use zecap::sdp::lovasz_theta;

const EXIT_VERIFY: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "zecap", version, about = "Bounds and certificates for zero-error capacities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Graph construction and inspection.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Upper bounds on the Shannon capacity.
    #[command(subcommand)]
    Bound(BoundCmd),
    /// α(G^⊠k)^(1/k).
    CapacityLb {
        #[arg(long, default_value_t = 2)]
        power: usize,
        graph: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Preorder decisions.
    #[command(subcommand)]
    Preorder(PreorderCmd),
    /// Check a certificate file; exit code 2 when it does not hold.
    Verify {
        cert: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Spectrum-point axioms on seeded random graphs.
    SpectraTest {
        #[arg(long)]
        functional: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
    },
}

#[derive(Subcommand)]
enum GraphCmd {
    /// Basic invariants of a graph file.
    Info { graph: PathBuf },
    /// A named graph: cycle N, complete N, empty N, petersen, schlafli-complement.
    Make {
        kind: String,
        params: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Strong product or disjoint union of two graph files.
    Product {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value_t = ProductOp::Strong)]
        op: ProductOp,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum BoundCmd {
    /// Lovász theta.
    Theta {
        graph: PathBuf,
        /// Include primal and dual matrices.
        #[arg(long)]
        matrices: bool,
    },
    /// Fractional clique cover number with an exact certificate.
    Fcc { graph: PathBuf },
    /// Haemers upper bound, from the best eigenvalue shift or a given representation.
    Haemers {
        graph: PathBuf,
        #[arg(long)]
        rep: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// The chain α ≤ ϑ ≤ χ̄_f plus the Haemers link; exit code 2 on a broken link.
    Sandwich {
        graph: PathBuf,
        /// Projective-rank certificate for the complement graph.
        #[arg(long)]
        projrep: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PreorderCmd {
    /// Is G ≤ H, i.e. is there a homomorphism from the complement of G to that of H?
    Cohom {
        g: PathBuf,
        h: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = SearchBudget::default().node_limit)]
    node_limit: u64,
    #[arg(long, default_value_t = SearchBudget::default().time_limit_ms)]
    time_limit_ms: u64,
}

impl BudgetArgs {
    fn budget(&self) -> Result<SearchBudget, String> {
        SearchBudget::new(self.node_limit, self.time_limit_ms).ok_or_else(|| "budget limits must be positive".to_string())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Edgelist,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProductOp {
    Strong,
    Union,
}

/// Printed output and exit code.
struct Outcome {
    body: Output,
    code: u8,
}

enum Output {
    Json(Value),
    Text(String),
}

impl Outcome {
    fn ok(v: Value) -> Self {
        Self { body: Output::Json(v), code: 0 }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, String> {
    fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_graph(path: &Path) -> Result<Graph, String> {
    parse_graph(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_json(path: &Path) -> Result<Value, String> {
    serde_json::from_slice(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn emit_graph(g: &Graph, format: Format) -> Outcome {
    match format {
        Format::Json => Outcome::ok(serde_json::to_value(g).expect("graph serialises")),
        Format::Edgelist => Outcome {
            body: Output::Text(zecap::graph::serialize_graph(g)),
            code: 0,
        },
    }
}

fn run(cmd: Command) -> Result<Outcome, String> {
    match cmd {
        Command::Graph(GraphCmd::Info { graph }) => {
            let g = load_graph(&graph)?;
            let degrees: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
            Ok(Outcome::ok(json!({
                "n": g.n(),
                "edge_count": g.edge_count(),
                "degrees": degrees,
                "edgeless": g.is_edgeless(),
                "strongly_regular": g.strongly_regular_parameters(),
            })))
        }
        Command::Graph(GraphCmd::Make { kind, params, format }) => {
            let g = Graph::named(&kind, &params).map_err(|e| e.to_string())?;
            Ok(emit_graph(&g, format))
        }
        Command::Graph(GraphCmd::Product { left, right, op, format }) => {
            let (a, b) = (load_graph(&left)?, load_graph(&right)?);
            let g = match op {
                ProductOp::Strong => a.strong_product(&b),
                ProductOp::Union => a.disjoint_union(&b),
            };
            Ok(emit_graph(&g, format))
        }
        Command::Bound(BoundCmd::Theta { graph, matrices }) => {
            let g = load_graph(&graph)?;
            let s = lovasz_theta(&g).map_err(|e| e.to_string())?;
            Ok(Outcome::ok(s.to_json(matrices)))
        }
        Command::Bound(BoundCmd::Fcc { graph }) => {
            let g = load_graph(&graph)?;
            let r = fractional_clique_cover(&g).map_err(|e| e.to_string())?;
            let mut v = r.to_json();
            v["certified"] = json!(r.certify(&g));
            Ok(Outcome::ok(v))
        }
        Command::Bound(BoundCmd::Haemers { graph, rep, tol }) => {
            let g = load_graph(&graph)?;
            match rep {
                None => {
                    let (value, shift) = best_eigen_shift_bound(&g);
                    Ok(Outcome::ok(json!({ "value": value, "field": "Q", "d": 1, "shift": shift })))
                }
                Some(path) => {
                    let mut v = load_json(&path)?;
                    if v.get("kind").is_none() {
                        v["kind"] = json!("drep");
                    }
                    let rep = DRep::from_json(&v).map_err(|e| format!("{}: {e}", path.display()))?;
                    if rep.graph != g {
                        return Err("representation is for a different graph".into());
                    }
                    let (valid, report) = Certificate::DRep(rep).verify(tol);
                    Ok(Outcome {
                        body: Output::Json(report),
                        code: if valid { 0 } else { EXIT_VERIFY },
                    })
                }
            }
        }
        Command::Bound(BoundCmd::Sandwich { graph, projrep }) => {
            let g = load_graph(&graph)?;
            let proj = match projrep {
                Some(p) => Some(ProjRep::from_json(&load_json(&p)?).map_err(|e| e.to_string())?),
                None => None,
            };
            let r = sandwich_test(&g, proj.as_ref()).map_err(|e| e.to_string())?;
            let code = if r.passed { 0 } else { EXIT_VERIFY };
            Ok(Outcome {
                body: Output::Json(serde_json::to_value(&r).expect("report serialises")),
                code,
            })
        }
        Command::CapacityLb { power, graph, budget } => {
            let g = load_graph(&graph)?;
            let est = capacity_lower_bound(&g, power, budget.budget()?).map_err(|e| e.to_string())?;
            Ok(Outcome {
                body: Output::Json(json!({
                    "power": est.power,
                    "alpha": est.alpha_value,
                    "root": est.root,
                    "exact": est.exact,
                })),
                code: if est.exact { 0 } else { EXIT_BUDGET },
            })
        }
        Command::Preorder(PreorderCmd::Cohom { g, h, budget }) => {
            let (a, b) = (load_graph(&g)?, load_graph(&h)?);
            let d = cohom_leq(&a, &b, budget.budget()?);
            let map = match &d {
                Decision::Yes(m) => json!(m),
                _ => Value::Null,
            };
            let code = if matches!(d, Decision::Unknown) { EXIT_BUDGET } else { 0 };
            Ok(Outcome {
                body: Output::Json(json!({ "decision": d.label(), "map": map })),
                code,
            })
        }
        Command::Verify { cert, tol } => {
            let v = load_json(&cert)?;
            let c = Certificate::from_json(&v).map_err(|e| e.to_string())?;
            let (valid, report) = c.verify(tol);
            Ok(Outcome {
                body: Output::Json(report),
                code: if valid { 0 } else { EXIT_VERIFY },
            })
        }
        Command::SpectraTest { functional, trials, seed, max_n } => {
            let f: FunctionalId = functional.parse().map_err(|e: zecap::harness::HarnessError| e.to_string())?;
            let r = spectrum_axiom_test(f, trials, max_n, seed).map_err(|e| e.to_string())?;
            Ok(Outcome {
                code: if r.passed { 0 } else { EXIT_VERIFY },
                body: Output::Json(r.to_json()),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(out) => {
            match out.body {
                Output::Json(v) => println!("{}", serde_json::to_string_pretty(&v).expect("json serialises")),
                Output::Text(t) => print!("{t}"),
            }
            ExitCode::from(out.code)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
