//! Command-line front end. Results go to `--out` or stdout as JSON; failures
//! print `{"error": code, "detail": ...}` on stderr and exit with 2 for usage
//! errors and 1 for computation errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::entropy::{qcmi, rel_entropy, rel_entropy_generalised, von_neumann, EntropyOptions};
use crate::error::Error;
use crate::graphs::Graph;
use crate::implicit::{vandermonde_kernel, KernelOptions};
use crate::matcore::json::float_matrix_json;
use crate::matcore::{DynMatrix, Matrix, SubsystemShape, PSD_TOL};
use crate::pauli::{graph_hamiltonians, parse_words, simultaneous_diag, StabilizerGroup};
use crate::project::{certify_projection, info_project, ProjectOptions, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::samplers::{
    estimate_dim, gibbs_sample_decomposable, gibbs_sample_lssm, petz_tree, sample_petz, sample_qcmi_chain3,
    sample_qcmi_chain3_states, DecomposableParam, ExpSymParam, LssmParam, MarginalPack, Parametrisation, QcmiParam,
    DEFAULT_FD_STEP, PETZ_TOL,
};
use crate::toric::{gv_equations, hypercube_matrix, precompute_hypercube_ideal, toric_ideal};

#[derive(Debug, Parser)]
#[command(name = "qgm", version, about = "Quantum graphical models toolkit")]
pub struct Cli {
    /// Seed for every random draw.
    #[arg(long, env = "QGM_SEED", default_value_t = 0, global = true)]
    pub seed: u64,
    /// Cap on worker threads.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write a run record (arguments, seed, input and output digests, timing) here.
    #[arg(long, global = true)]
    pub record: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Von Neumann entropy in bits.
    Entropy {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long, default_value_t = PSD_TOL)]
        psd_tol: f64,
        /// Skip the unit-trace check.
        #[arg(long)]
        unnormalised: bool,
    },
    /// Conditional mutual information I(A:C|B) in bits.
    Qcmi {
        #[arg(long)]
        rho: PathBuf,
        /// Parts as `A=1,2 B=3 C=4` with 1-based factor indices; B may be empty.
        #[arg(long, num_args = 1.., required = true)]
        split: Vec<String>,
        /// Local dimensions, comma separated; qubits by default.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
    },
    /// Relative entropy D(rho||sigma) in bits.
    Dkl {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        /// Use the trace-corrected form for unnormalised arguments.
        #[arg(long)]
        generalised: bool,
    },
    /// Draw a sample set.
    Sample {
        kind: SampleKind,
        #[arg(long, default_value = "chain3")]
        graph: String,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        /// QCMI only: draw positive semidefinite factors so every point is a state.
        #[arg(long)]
        psd: bool,
    },
    /// Polynomials of one degree vanishing on a sample set.
    Implicitize {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=8))]
        degree: u32,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = 10.0)]
        min_gap: f64,
    },
    /// Stabiliser groups.
    Stab {
        #[command(subcommand)]
        action: StabAction,
    },
    /// Toric ideals.
    Toric {
        #[command(subcommand)]
        action: ToricAction,
    },
    /// Information projection onto a graph's commuting Gibbs manifold.
    Project {
        #[arg(long)]
        rho: PathBuf,
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
        /// Probes per certificate.
        #[arg(long, default_value_t = 32)]
        probes: usize,
    },
    /// Petz reconstruction of a tree state from its edge marginals.
    Petz {
        #[arg(long)]
        graph: String,
        /// Marginal pack JSON.
        #[arg(long, conflicts_with = "rho", required_unless_present = "rho")]
        marginals: Option<PathBuf>,
        /// A global state whose marginals are used.
        #[arg(long)]
        rho: Option<PathBuf>,
        #[arg(long, default_value_t = PETZ_TOL)]
        tol: f64,
    },
    /// Jacobian-rank dimension of a parametrised family.
    Dim {
        family: DimFamily,
        #[arg(long, default_value = "chain3")]
        graph: String,
        /// Matrix side for `exp-sym`.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        retries: usize,
        #[arg(long, default_value_t = DEFAULT_FD_STEP)]
        step: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SampleKind {
    Qcmi,
    GibbsLssm,
    GibbsDec,
    Petz,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DimFamily {
    Qcmi,
    QcmiPsd,
    Lssm,
    Decomposable,
    ExpSym,
}

#[derive(Debug, Subcommand)]
pub enum StabAction {
    /// Dimension of the stabilised subspace.
    Dim {
        /// Pauli words, one per line.
        #[arg(long)]
        gens: PathBuf,
    },
    /// Simultaneous eigenbasis of a graph's Hamiltonians.
    Diag {
        #[arg(long)]
        graph: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum ToricAction {
    /// Binomial generators for the N-bit hypercube.
    Ideal {
        #[arg(long = "N", short = 'N', value_parser = clap::value_parser!(u64).range(1..=5))]
        n: u64,
        #[arg(long, default_value_t = 2)]
        degree_bound: u32,
    },
    /// Equations of a graph's commuting Gibbs variety.
    Gv {
        #[arg(long)]
        graph: String,
        #[arg(long, default_value_t = 2)]
        degree_bound: u32,
    },
}

enum Failure {
    Usage(String),
    Compute(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

#[derive(Debug, Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

/// What a run read and wrote, for replay.
#[derive(Debug, Serialize)]
pub struct RunRecord {
    command_line: Vec<String>,
    seed: u64,
    versions: Value,
    inputs: Vec<InputDigest>,
    outputs: Vec<InputDigest>,
    wall_time_s: f64,
    exit_code: i32,
}

#[derive(Default)]
struct Session {
    inputs: Vec<InputDigest>,
}

fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Session {
    fn read(&mut self, path: &Path) -> Outcome<String> {
        let bytes = std::fs::read(path).map_err(Error::from)?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: digest(&bytes),
        });
        String::from_utf8(bytes).map_err(|e| Failure::Compute(Error::Parse(e.to_string())))
    }

    fn matrix(&mut self, path: &Path) -> Outcome<Matrix<f64>> {
        Ok(DynMatrix::from_json_str(&self.read(path)?)?.to_f64())
    }

    fn graph(&mut self, spec: &str) -> Outcome<Graph> {
        if Graph::builtin(spec).is_none() && Path::new(spec).exists() {
            return Ok(Graph::parse(&self.read(Path::new(spec))?)?);
        }
        Ok(Graph::load(spec)?)
    }
}

fn parse_split(parts: &[String], n_factors: usize) -> Outcome<[Vec<usize>; 3]> {
    let mut out: [Option<Vec<usize>>; 3] = [None, None, None];
    for part in parts.iter().flat_map(|p| p.split_whitespace()) {
        let (name, list) = part
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("split part {part:?} is not NAME=indices")))?;
        let slot = match name {
            "A" | "a" => 0,
            "C" | "c" => 1,
            "B" | "b" => 2,
            _ => return Err(Failure::Usage(format!("unknown split part {name:?}"))),
        };
        let idx = list
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|s| match s.trim().parse::<usize>() {
                Ok(i) if (1..=n_factors).contains(&i) => Ok(i - 1),
                _ => Err(Failure::Usage(format!("bad factor index {s:?} in {part:?}"))),
            })
            .collect::<Outcome<Vec<_>>>()?;
        out[slot] = Some(idx);
    }
    let [a, c, b] = out;
    match (a, c) {
        (Some(a), Some(c)) => Ok([a, c, b.unwrap_or_default()]),
        _ => Err(Failure::Usage("split needs both A= and C=".into())),
    }
}

fn qubit_shape(n: usize) -> Outcome<SubsystemShape> {
    if !n.is_power_of_two() || n < 2 {
        return Err(Failure::Usage(format!("dimension {n} is not a qubit register; pass --dims")));
    }
    Ok(SubsystemShape::qubits(n.trailing_zeros() as usize))
}

fn execute(cli: &Cli, session: &mut Session) -> Outcome<String> {
    let pretty = |v: &Value| serde_json::to_string_pretty(v).expect("JSON value");
    match &cli.command {
        Command::Entropy {
            rho,
            psd_tol,
            unnormalised,
        } => {
            let m = session.matrix(rho)?;
            let opts = EntropyOptions {
                tol: *psd_tol,
                check_trace: !unnormalised,
            };
            let r = von_neumann(&m, opts)?;
            Ok(pretty(&json!({"entropy_bits": r.value, "rank_used": r.rank_used})))
        }
        Command::Qcmi { rho, split, dims } => {
            let m = session.matrix(rho)?;
            let shape = match dims {
                Some(d) => SubsystemShape::new(d.clone())?,
                None => qubit_shape(m.rows())?,
            };
            let [a, c, b] = parse_split(split, shape.len())?;
            let v = qcmi(&m, &shape, &a, &c, &b)?;
            let one = |v: &[usize]| v.iter().map(|i| i + 1).collect::<Vec<_>>();
            Ok(pretty(&json!({"qcmi_bits": v, "a": one(&a), "b": one(&b), "c": one(&c)})))
        }
        Command::Dkl {
            rho,
            sigma,
            generalised,
        } => {
            let r = session.matrix(rho)?;
            let s = session.matrix(sigma)?;
            let v = if *generalised {
                rel_entropy_generalised(&r, &s)?
            } else {
                rel_entropy(&r, &s)?
            };
            Ok(pretty(&json!({ "rel_entropy_bits": v, "generalised": generalised })))
        }
        Command::Sample {
            kind,
            graph,
            count,
            psd,
        } => {
            let g = session.graph(graph)?;
            let count = *count as usize;
            let set = match kind {
                SampleKind::Qcmi => {
                    if g != Graph::builtin("chain3").expect("builtin") {
                        return Err(Failure::Usage("the QCMI sampler is defined on chain3 only".into()));
                    }
                    if *psd {
                        sample_qcmi_chain3_states(cli.seed, count)?
                    } else {
                        sample_qcmi_chain3(cli.seed, count)?
                    }
                }
                SampleKind::GibbsLssm => gibbs_sample_lssm(&g, &SubsystemShape::qubits(g.n()), cli.seed, count)?,
                SampleKind::GibbsDec => gibbs_sample_decomposable(&g, &SubsystemShape::qubits(g.n()), cli.seed, count)?,
                SampleKind::Petz => sample_petz(&g, cli.seed, count)?,
            };
            Ok(set.to_json_string())
        }
        Command::Implicitize {
            samples,
            degree,
            tol,
            min_gap,
        } => {
            let set = crate::samplers::SampleSet::from_json_str(&session.read(samples)?)?;
            let opts = KernelOptions {
                min_gap: *min_gap,
                ..KernelOptions::with_tol(*tol)
            };
            Ok(pretty(&vandermonde_kernel(&set.points, *degree, &opts)?.to_json()))
        }
        Command::Stab { action } => match action {
            StabAction::Dim { gens } => {
                let words = parse_words(&session.read(gens)?)?;
                let n = words
                    .first()
                    .map(|w| w.n())
                    .ok_or_else(|| Failure::Usage("no generators given".into()))?;
                let group = StabilizerGroup::new(n, words)?;
                Ok(pretty(&json!({
                    "n": n,
                    "k": group.k(),
                    "dimension": group.stab_dimension()?,
                })))
            }
            StabAction::Diag { graph } => {
                let model = simultaneous_diag(&graph_hamiltonians(&session.graph(graph)?))?;
                Ok(pretty(&serde_json::to_value(&model).map_err(Error::from)?))
            }
        },
        Command::Toric { action } => match action {
            ToricAction::Ideal { n, degree_bound } => {
                let n = *n as usize;
                let ideal = if *degree_bound == 2 {
                    precompute_hypercube_ideal(n)?
                } else {
                    std::sync::Arc::new(toric_ideal(&hypercube_matrix(n), *degree_bound)?)
                };
                let mut v = ideal.presentation().to_json();
                v["display"] = json!(ideal.binomials.iter().map(|b| b.to_string()).collect::<Vec<_>>());
                Ok(pretty(&v))
            }
            ToricAction::Gv { graph, degree_bound } => {
                let model = simultaneous_diag(&graph_hamiltonians(&session.graph(graph)?))?;
                let gv = gv_equations(&model, *degree_bound)?;
                let mut v = gv.presentation.to_json();
                v["n_linear"] = json!(gv.n_linear);
                v["n_toric"] = json!(gv.n_toric);
                v["reduced_rank"] = json!(gv.reduced_rank);
                Ok(serde_json::to_string(&v).map_err(Error::from)?)
            }
        },
        Command::Project {
            rho,
            graph,
            tol,
            max_iter,
            probes,
        } => {
            let m = session.matrix(rho)?;
            let model = simultaneous_diag(&graph_hamiltonians(&session.graph(graph)?))?;
            let opts = ProjectOptions {
                tol: *tol,
                max_iter: *max_iter,
            };
            let result = info_project(&m, &model, opts)?;
            let certificates = certify_projection(&m, &result, &model, *probes, cli.seed)?;
            Ok(pretty(&json!({
                "result": serde_json::to_value(&result).map_err(Error::from)?,
                "certificates": serde_json::to_value(&certificates).map_err(Error::from)?,
            })))
        }
        Command::Petz {
            graph,
            marginals,
            rho,
            tol,
        } => {
            let g = session.graph(graph)?;
            let pack = match (marginals, rho) {
                (Some(p), _) => MarginalPack::from_json(&serde_json::from_str(&session.read(p)?).map_err(Error::from)?)?,
                (None, Some(r)) => {
                    let m = session.matrix(r)?;
                    MarginalPack::from_state(&m, &SubsystemShape::qubits(g.n()), &g)?
                }
                (None, None) => return Err(Failure::Usage("pass --marginals or --rho".into())),
            };
            let out = petz_tree(&g, &pack, *tol)?;
            Ok(pretty(&json!({
                "sigma": float_matrix_json(&out.sigma),
                "discrepancy": out.discrepancy,
            })))
        }
        Command::Dim {
            family,
            graph,
            n,
            retries,
            step,
        } => {
            let g = session.graph(graph)?;
            let shape = SubsystemShape::qubits(g.n());
            let p: Box<dyn Parametrisation> = match family {
                DimFamily::Qcmi => Box::new(QcmiParam { psd: false }),
                DimFamily::QcmiPsd => Box::new(QcmiParam { psd: true }),
                DimFamily::Lssm => Box::new(LssmParam::new(&g, &shape)?),
                DimFamily::Decomposable => Box::new(DecomposableParam::new(&g, &shape)?),
                DimFamily::ExpSym => Box::new(ExpSymParam { n: *n }),
            };
            let est = estimate_dim(p.as_ref(), cli.seed, *retries, *step)?;
            let mut v = serde_json::to_value(&est).map_err(Error::from)?;
            v["family"] = json!(p.name());
            v["n_params"] = json!(p.n_params());
            Ok(pretty(&v))
        }
    }
}

fn error_json(code: &str, detail: &str) -> String {
    json!({"error": code, "detail": detail}).to_string()
}

/// Parses `argv`, runs the command and returns the exit code.
pub fn dispatch<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let started = Instant::now();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = writeln!(stderr, "{}", error_json("usage", e.to_string().trim()));
            return 2;
        }
    };

    let mut session = Session::default();
    let mut run = || execute(&cli, &mut session);
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t as usize).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(Failure::Usage(format!("cannot start {t} threads: {e}"))),
        },
        None => run(),
    };

    let mut outputs = Vec::new();
    let code = match result {
        Ok(text) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, text.as_bytes()).map(|_| {
                    outputs.push(InputDigest {
                        path: path.display().to_string(),
                        sha256: digest(text.as_bytes()),
                    })
                }),
                None => writeln!(stdout, "{text}"),
            };
            match written {
                Ok(()) => 0,
                Err(e) => {
                    let _ = writeln!(stderr, "{}", error_json("io", &e.to_string()));
                    1
                }
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "{}", error_json("usage", &msg));
            2
        }
        Err(Failure::Compute(e)) => {
            let _ = writeln!(stderr, "{}", error_json(e.code(), &e.to_string()));
            1
        }
    };

    if let Some(path) = &cli.record {
        let record = RunRecord {
            command_line: argv.iter().map(|a| a.to_string_lossy().into_owned()).collect(),
            seed: cli.seed,
            versions: json!({"qgm": env!("CARGO_PKG_VERSION"), "schema": SCHEMA_VERSION}),
            inputs: session.inputs,
            outputs,
            wall_time_s: started.elapsed().as_secs_f64(),
            exit_code: code,
        };
        let text = serde_json::to_string_pretty(&record).expect("record serialises");
        if let Err(e) = std::fs::write(path, text) {
            let _ = writeln!(stderr, "{}", error_json("io", &format!("run record: {e}")));
            return code.max(1);
        }
    }
    code
}

pub const SCHEMA_VERSION: &str = "1";

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = dispatch(std::iter::once("qgm").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        let (code, _, err) = run(&["sample", "qcmi", "--graph", "chain3", "--count", "0"]);
        assert_eq!(code, 2);
        let v: Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"], "usage");
        assert_eq!(run(&["frobnicate"]).0, 2);
        assert_eq!(run(&["--help"]).0, 0);
    }

    #[test]
    fn computation_errors_exit_1() {
        let (code, _, err) = run(&["toric", "gv", "--graph", "no-such-graph"]);
        assert_eq!(code, 1);
        let v: Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"], "invalid_graph");
    }

    #[test]
    fn toric_ideal_n3() {
        let (code, out, _) = run(&["toric", "ideal", "--N", "3"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["generators"].as_array().unwrap().len(), 10);
        assert_eq!(v["provenance"], "toric");
    }

    #[test]
    fn split_syntax() {
        let s = |v: &[&str]| parse_split(&v.iter().map(|x| x.to_string()).collect::<Vec<_>>(), 3);
        assert!(matches!(s(&["A=1", "B=2", "C=3"]), Ok([a, c, b]) if a == vec![0] && c == vec![2] && b == vec![1]));
        assert!(matches!(s(&["A=1 C=2,3"]), Ok([_, c, b]) if c == vec![1, 2] && b.is_empty()));
        assert!(s(&["A=1"]).is_err());
        assert!(s(&["A=1", "C=4"]).is_err());
        assert!(s(&["D=1"]).is_err());
    }
}
