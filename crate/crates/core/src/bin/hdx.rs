//! Batch front-end: generate example complexes, analyze spectra, check
//! trickle-down conditions, build and verify certificates, and run threshold
//! scenarios. All input and output is JSON.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hdx_core::json as hjson;
use hdx_core::partite::{
    product_decomposition_strict, DependencyGraph, EpsilonTable, ZERO_EXPANDER_TOL,
};
use hdx_core::spectra::{spectral_profile, spectral_profile_detailed};
use hdx_core::trickledown::{
    build_f_vectors, check_averaged_conditions, check_delta_uniform, check_main_conditions,
    classical_bound, max_feasible_delta, min_passing_p, scenario_calculator, thm13_bounds,
    verify_matrix_conditions, verify_scalar_conditions, ConditionReport, ConditionVariant,
    EpsOrdering,
};
use hdx_core::zoo;
use hdx_core::{Error, WeightedComplex};

const EXIT_FAIL: u8 = 2;
const EXIT_INPUT: u8 = 1;

#[derive(Parser)]
#[command(name = "hdx", about = "local spectral expansion analysis", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderingArg {
    Decreasing,
    Increasing,
}

impl From<OrderingArg> for EpsOrdering {
    fn from(o: OrderingArg) -> Self {
        match o {
            OrderingArg::Decreasing => EpsOrdering::Decreasing,
            OrderingArg::Increasing => EpsOrdering::Increasing,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Main,
    Averaged,
    DeltaUniform,
}

impl From<VariantArg> for ConditionVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Main => ConditionVariant::Main,
            VariantArg::Averaged => ConditionVariant::Averaged,
            VariantArg::DeltaUniform => ConditionVariant::DeltaUniform,
        }
    }
}

#[derive(Args)]
struct IoArgs {
    /// Input complex JSON.
    #[arg(short, long)]
    input: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a generated complex in the interchange JSON format.
    Generate {
        #[command(subcommand)]
        family: Family,
    },
    /// Spectral profile: worst second eigenvalue per co-dimension.
    Analyze {
        #[command(flatten)]
        io: IoArgs,
        /// Include per-type aggregation.
        #[arg(long)]
        detailed: bool,
    },
    /// Pair eigenvalue table, dependency degrees, and components.
    Epsilon {
        #[command(flatten)]
        io: IoArgs,
        /// Zero-expander tolerance for dependency edges.
        #[arg(long, default_value_t = ZERO_EXPANDER_TOL)]
        tol: f64,
        /// Also run the product-decomposition check (strict mode).
        #[arg(long)]
        decompose: bool,
    },
    /// Check the admissibility conditions at a delta (or sweep a range).
    Conditions {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long)]
        delta: Option<f64>,
        /// Sweep specification lo:hi:steps; margins of every step are
        /// reported, passing or not.
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long, value_enum, default_value_t = VariantArg::Main)]
        variant: VariantArg,
        #[arg(long, value_enum, default_value_t = OrderingArg::Decreasing)]
        ordering: OrderingArg,
        #[arg(long, default_value_t = ZERO_EXPANDER_TOL)]
        tol: f64,
    },
    /// Build the certificate vectors at a delta and emit them.
    Certify {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = OrderingArg::Decreasing)]
        ordering: OrderingArg,
        #[arg(long, default_value_t = ZERO_EXPANDER_TOL)]
        tol: f64,
    },
    /// Build a certificate and verify the scalar and matrix conditions.
    Verify {
        #[command(flatten)]
        io: IoArgs,
        /// Build delta; when omitted, half the maximal feasible delta.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, value_enum, default_value_t = OrderingArg::Decreasing)]
        ordering: OrderingArg,
        #[arg(long, default_value_t = 1e-8)]
        psd_tol: f64,
        #[arg(long, default_value_t = ZERO_EXPANDER_TOL)]
        tol: f64,
    },
    /// Certified bound profile against exact eigenvalues.
    Bounds {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, value_enum, default_value_t = OrderingArg::Decreasing)]
        ordering: OrderingArg,
        #[arg(long, default_value_t = ZERO_EXPANDER_TOL)]
        tol: f64,
    },
    /// Threshold arithmetic for uniform-eps degree-bounded patterns.
    Scenario {
        /// Maximum dependency degree.
        #[arg(long = "Delta")]
        delta_max: usize,
        #[arg(long)]
        eps: Option<f64>,
        /// Derive eps as eps-scale / sqrt(p).
        #[arg(long)]
        eps_from_p: Option<u64>,
        #[arg(long, default_value_t = 1.0)]
        eps_scale: f64,
        #[arg(long)]
        delta: Option<f64>,
        /// Derive delta as 1 - delta-coeff / sqrt(p).
        #[arg(long)]
        delta_from_p: Option<u64>,
        #[arg(long, default_value_t = 2.0)]
        delta_coeff: f64,
        /// Search the minimal integer p passing both conditions.
        #[arg(long)]
        min_p: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Family {
    /// Independent sets of K_{d,d} with activity lambda.
    Hardcore {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Two cliques joined by a path; connected d-subsets.
    Barbell {
        #[arg(long)]
        d: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Proper list colorings of a graph.
    Coloring {
        /// Number of graph vertices.
        #[arg(long)]
        vertices: Option<usize>,
        /// Complete graph on this many vertices.
        #[arg(long)]
        complete: Option<usize>,
        /// Extra edges as "u-v,u-v,...".
        #[arg(long)]
        edges: Option<String>,
        /// Uniform list {0..colors-1} on every vertex.
        #[arg(long)]
        colors: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Complete multipartite complex with uniform weights.
    CompletePartite {
        /// Comma-separated part sizes.
        #[arg(long)]
        sizes: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Random totally connected partite complex.
    Random {
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        /// Product-with-jitter weights when set; uniform otherwise.
        #[arg(long)]
        jitter: Option<f64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
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
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn read_complex(path: &PathBuf) -> Result<WeightedComplex, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::BadParams(format!("cannot read {}: {e}", path.display())))?;
    hjson::complex_from_json(&text)
}

fn emit(value: &Value, output: &Option<PathBuf>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).expect("report serializes");
    match output {
        Some(path) => std::fs::write(path, text + "\n")
            .map_err(|e| Error::BadParams(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{text}");
            Ok(())
        }
    }
}

fn condition_report_json(rep: &ConditionReport, delta_star: Option<f64>) -> Value {
    let mut v = serde_json::to_value(rep).expect("report serializes");
    v["delta_star"] = json!(delta_star);
    v["worst_margin"] = json!(rep.worst_margin());
    v
}

fn parse_sizes(s: &str) -> Result<Vec<usize>, Error> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::BadParams(format!("bad size {p}")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Generate { family } => {
            let (x, output) = match family {
                Family::Hardcore { d, lambda, output } => {
                    (zoo::hardcore_complex(d, lambda)?, output)
                }
                Family::Barbell { d, output } => (zoo::barbell_complex(d)?, output),
                Family::Coloring {
                    vertices,
                    complete,
                    edges,
                    colors,
                    output,
                } => {
                    let n = complete
                        .or(vertices)
                        .ok_or_else(|| Error::BadParams("need --vertices or --complete".into()))?;
                    let mut edge_list: Vec<(usize, usize)> = Vec::new();
                    if complete.is_some() {
                        for u in 0..n {
                            for v in u + 1..n {
                                edge_list.push((u, v));
                            }
                        }
                    }
                    if let Some(spec) = edges {
                        for part in spec.split(',').filter(|p| !p.trim().is_empty()) {
                            let (u, v) = part
                                .trim()
                                .split_once('-')
                                .ok_or_else(|| Error::BadParams(format!("bad edge {part}")))?;
                            edge_list.push((
                                u.parse()
                                    .map_err(|_| Error::BadParams(format!("bad edge {part}")))?,
                                v.parse()
                                    .map_err(|_| Error::BadParams(format!("bad edge {part}")))?,
                            ));
                        }
                    }
                    let lists = vec![(0..colors).collect::<Vec<_>>(); n];
                    (zoo::coloring_complex(n, &edge_list, &lists)?, output)
                }
                Family::CompletePartite { sizes, output } => (
                    zoo::complete_partite_complex(&parse_sizes(&sizes)?)?,
                    output,
                ),
                Family::Random {
                    sizes,
                    density,
                    jitter,
                    seed,
                    output,
                } => {
                    let weights = match jitter {
                        Some(j) => zoo::WeightModel::ProductJitter { jitter: j },
                        None => zoo::WeightModel::Uniform { lo: 0.5, hi: 1.5 },
                    };
                    let spec = zoo::RandomPartiteSpec::new(parse_sizes(&sizes)?, density, weights);
                    (zoo::random_partite_complex(&spec, seed)?, output)
                }
            };
            emit(&hjson::complex_to_json(&x), &output)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Analyze { io, detailed } => {
            let x = read_complex(&io.input)?;
            let p = if detailed {
                spectral_profile_detailed(&x)
            } else {
                spectral_profile(&x)
            };
            emit(&hjson::profile_to_json(&x, &p, 1e-10), &io.output)?;
            Ok(if p.witnesses.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            })
        }

        Command::Epsilon { io, tol, decompose } => {
            let x = read_complex(&io.input)?;
            let eps = EpsilonTable::compute(&x)?;
            let graph = DependencyGraph::from_table(&eps, tol);
            let mut v = hjson::epsilon_to_json(&x, &eps, &graph);
            if decompose {
                let dec = product_decomposition_strict(&x, tol)?;
                v["decomposition"] = hjson::decomposition_to_json(&dec);
            }
            emit(&v, &io.output)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Conditions {
            io,
            delta,
            sweep,
            variant,
            ordering,
            tol,
        } => {
            let x = read_complex(&io.input)?;
            let eps = EpsilonTable::compute(&x)?;
            let graph = DependencyGraph::from_table(&eps, tol);
            let variant: ConditionVariant = variant.into();
            let ordering: EpsOrdering = ordering.into();
            let check = |d: f64| -> Result<ConditionReport, Error> {
                match variant {
                    ConditionVariant::Main => check_main_conditions(&eps, &graph, d, ordering),
                    ConditionVariant::Averaged => check_averaged_conditions(&eps, d, ordering),
                    ConditionVariant::DeltaUniform => {
                        check_delta_uniform(eps.max_value(), graph.max_degree().max(1), d)
                    }
                }
            };
            let star = max_feasible_delta(&eps, &graph, variant, ordering)?;
            if let Some(spec) = sweep {
                let parts: Vec<&str> = spec.split(':').collect();
                if parts.len() != 3 {
                    return Err(Error::BadParams("sweep must be lo:hi:steps".into()));
                }
                let lo: f64 = parts[0]
                    .parse()
                    .map_err(|_| Error::BadParams("bad sweep lo".into()))?;
                let hi: f64 = parts[1]
                    .parse()
                    .map_err(|_| Error::BadParams("bad sweep hi".into()))?;
                let steps: usize = parts[2]
                    .parse()
                    .map_err(|_| Error::BadParams("bad sweep steps".into()))?;
                let mut rows = Vec::new();
                for i in 0..steps {
                    let d = lo + (hi - lo) * i as f64 / (steps.max(2) - 1) as f64;
                    if !(d > 0.0 && d < 1.0) {
                        continue;
                    }
                    let rep = check(d)?;
                    rows.push(condition_report_json(&rep, None));
                }
                emit(&json!({"sweep": rows, "delta_star": star}), &io.output)?;
                return Ok(ExitCode::SUCCESS);
            }
            let d = delta.ok_or_else(|| Error::BadParams("need --delta or --sweep".into()))?;
            let rep = check(d)?;
            emit(&condition_report_json(&rep, star), &io.output)?;
            Ok(if rep.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            })
        }

        Command::Certify {
            io,
            delta,
            ordering,
            tol,
        } => {
            let x = read_complex(&io.input)?;
            let eps = EpsilonTable::compute(&x)?;
            let graph = DependencyGraph::from_table(&eps, tol);
            let f = build_f_vectors(&eps, &graph, delta, ordering.into())?;
            emit(&hjson::fvectors_to_json(&f), &io.output)?;
            Ok(ExitCode::SUCCESS)
        }

        Command::Verify {
            io,
            delta,
            ordering,
            psd_tol,
            tol,
        } => {
            let x = read_complex(&io.input)?;
            let eps = EpsilonTable::compute(&x)?;
            let graph = DependencyGraph::from_table(&eps, tol);
            let ordering: EpsOrdering = ordering.into();
            let delta = resolve_delta(delta, &eps, &graph, ordering)?;
            let f = build_f_vectors(&eps, &graph, delta, ordering)?;
            let scalar = verify_scalar_conditions(&x, &f)?;
            let matrix = verify_matrix_conditions(&x, &f, psd_tol)?;
            let pass = scalar.pass && matrix.pass;
            emit(
                &json!({
                    "delta": delta,
                    "scalar": hjson::scalar_report_to_json(&scalar),
                    "matrix": hjson::matrix_report_to_json(&matrix),
                    "pass": pass,
                }),
                &io.output,
            )?;
            Ok(if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            })
        }

        Command::Bounds {
            io,
            delta,
            ordering,
            tol,
        } => {
            let x = read_complex(&io.input)?;
            let eps = EpsilonTable::compute(&x)?;
            let graph = DependencyGraph::from_table(&eps, tol);
            let ordering: EpsOrdering = ordering.into();
            let delta = resolve_delta(delta, &eps, &graph, ordering)?;
            let f = build_f_vectors(&eps, &graph, delta, ordering)?;
            match hdx_core::trickledown::bound_profile(&x, &f) {
                Ok(profile) => {
                    let mut v = hjson::bound_profile_to_json(&profile);
                    v["delta"] = json!(delta);
                    let d = x.dim();
                    v["classical_applicable"] =
                        json!(classical_bound(eps.max_value(), d).is_ok());
                    v["thm13_applicable"] = json!(thm13_bounds(
                        eps.max_value(),
                        graph.max_degree().max(1),
                        delta,
                        d
                    )
                    .is_ok());
                    emit(&v, &io.output)?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(Error::CertificateInvalid(msg)) => {
                    emit(
                        &json!({"pass": false, "error": msg, "delta": delta}),
                        &io.output,
                    )?;
                    Ok(ExitCode::from(EXIT_FAIL))
                }
                Err(e) => Err(e),
            }
        }

        Command::Scenario {
            delta_max,
            eps,
            eps_from_p,
            eps_scale,
            delta,
            delta_from_p,
            delta_coeff,
            min_p,
            output,
        } => {
            let eps_value = match (eps, eps_from_p) {
                (Some(e), _) => e,
                (None, Some(p)) => eps_scale / (p as f64).sqrt(),
                (None, None) if min_p => 0.0,
                _ => return Err(Error::BadParams("need --eps or --eps-from-p".into())),
            };
            let delta_value = match (delta, delta_from_p) {
                (Some(d), _) => Some(d),
                (None, Some(p)) => Some(1.0 - delta_coeff / (p as f64).sqrt()),
                _ => None,
            };
            let mut out: BTreeMap<String, Value> = BTreeMap::new();
            if min_p {
                let p = min_passing_p(delta_max, eps_scale, delta_coeff)?;
                out.insert("min_p".into(), json!(p));
                out.insert("eps_scale".into(), json!(eps_scale));
                out.insert("delta_coeff".into(), json!(delta_coeff));
            }
            let pass = if eps.is_some() || eps_from_p.is_some() {
                let rep = scenario_calculator(delta_max, eps_value, delta_value)?;
                let v = serde_json::to_value(&rep).expect("report serializes");
                out.insert("scenario".into(), v);
                rep.pass
            } else {
                None
            };
            emit(&json!(out), &output)?;
            Ok(match pass {
                Some(false) => ExitCode::from(EXIT_FAIL),
                _ => ExitCode::SUCCESS,
            })
        }
    }
}

fn resolve_delta(
    delta: Option<f64>,
    eps: &EpsilonTable,
    graph: &DependencyGraph,
    ordering: EpsOrdering,
) -> Result<f64, Error> {
    match delta {
        Some(d) => Ok(d),
        None => {
            let star = max_feasible_delta(eps, graph, ConditionVariant::Main, ordering)?
                .ok_or_else(|| {
                    Error::ConditionUnsatisfiable(
                        "no feasible delta; pass --delta explicitly".into(),
                    )
                })?;
            Ok(star / 2.0)
        }
    }
}
