//! `qsym`: command-line front end for the qsym-core pipelines.
//!
//! Exit codes: 0 positive verdict, 1 negative verdict, 2 usage or input
//! error, 3 internal check failure. Human-readable text goes to stderr;
//! stdout carries the artifact, or a JSON report with `--json`.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};

use qsym_core::coherent::{
    circulant_no_quantum_symmetry, wl_closure, wl_equivalent, write_certificate, write_configuration,
    CirculantVerdict, WlComparison,
};
use qsym_core::construct::{witness_pair, ConstructError};
use qsym_core::graph::{parse_graph, random_graph, write_graph, write_graph_with_labels, Graph};
use qsym_core::lbcs::{
    arkhipov_lbcs, classical_satisfiable, game_graph, parse_lbcs, quantum_satisfiable_verdict, write_lbcs,
    Lbcs, QuantumVerdict, Satisfiability,
};
use qsym_core::qcert::{
    check_magic_unitary, check_operator_solution, check_quantum_isomorphism, parse_magic_unitary,
    parse_operator_solution, DEFAULT_TOL,
};
use qsym_core::symmetry::{automorphism_group, configuration_gap, haar_values_for, orbitals, write_generators, GapVerdict, HaarCheck};

#[derive(Parser)]
#[command(name = "qsym", version, about = "Coherent configurations, quantum symmetry and quantum isomorphism certificates")]
struct Cli {
    /// Write a JSON report to stdout instead of the plain artifact.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coherent closure of a graph (2-dimensional Weisfeiler-Leman).
    Wl { graph: PathBuf },
    /// Decide WL-equivalence of two graphs and emit the certificate.
    Equiv { x: PathBuf, y: PathBuf },
    /// Automorphism group generators, order, orbits and orbitals.
    Aut {
        graph: PathBuf,
        /// Add exact Haar averages per orbit and orbital.
        #[arg(long)]
        haar: bool,
    },
    /// Compare WL classes with the orbitals of the automorphism group.
    Gap { graph: PathBuf },
    /// Solve a binary constraint system over GF(2).
    LbcsSat { file: PathBuf },
    /// Game graph of a binary constraint system.
    GameGraph {
        file: PathBuf,
        /// Omit the edges between vertices of the same constraint.
        #[arg(long)]
        no_cliques: bool,
    },
    /// Parity constraint system of a graph with one marked vertex.
    Arkhipov {
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        marked: usize,
    },
    /// Build the parity graph pair of a graph and run the five checks.
    Construct {
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        marked: usize,
        /// Complement both graphs and their union.
        #[arg(long)]
        complement: bool,
        /// Write x0, x and union graphs, label sidecars and report.json here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Check a magic-unitary certificate for a quantum isomorphism X -> Y.
    VerifyMu {
        cert: PathBuf,
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Check an operator solution of a binary constraint system.
    VerifyOpsol {
        cert: PathBuf,
        lbcs: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Fraction of seeded G(n, 1/2) samples whose WL configuration is discrete.
    RandomTrivial {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Class-count criterion for circulant graphs.
    CirculantCheck {
        #[arg(long)]
        n: usize,
        /// Connection set, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        set: Vec<usize>,
    },
}

enum Verdict {
    Positive,
    Negative,
}

struct Failure {
    code: u8,
    message: String,
}

fn input_error(e: impl Display) -> Failure {
    Failure { code: 2, message: e.to_string() }
}

fn internal_error(e: impl Display) -> Failure {
    Failure { code: 3, message: format!("internal check failed: {e}") }
}

fn verdict(ok: bool) -> Verdict {
    if ok {
        Verdict::Positive
    } else {
        Verdict::Negative
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    parse_graph(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn read_lbcs(path: &Path) -> Result<Lbcs, Failure> {
    parse_lbcs(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

struct Out {
    json: bool,
}

// A closed reader (e.g. `| head`) is not an error worth a panic.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: writing stdout: {e}");
            std::process::exit(3);
        }
    }
}

impl Out {
    /// Plain artifact on stdout unless `--json` is set.
    fn artifact(&self, text: &str) {
        if !self.json {
            emit(text);
        }
    }

    fn report(&self, value: Value) {
        if self.json {
            emit(&format!("{}\n", serde_json::to_string_pretty(&value).expect("JSON values serialize")));
        }
    }
}

fn show<T: Display>(v: &[T]) -> Vec<String> {
    v.iter().map(|r| r.to_string()).collect()
}

fn to_value(v: impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn run(cli: Cli) -> Result<Verdict, Failure> {
    let out = Out { json: cli.json };
    match cli.command {
        Command::Wl { graph } => {
            let g = read_graph(&graph)?;
            let c = wl_closure(&g);
            c.verify().map_err(|v| internal_error(format!("{v:?}")))?;
            let fibres = c.vertex_fibres().len();
            eprintln!("{} classes, {} vertex fibres, discrete: {}", c.rank(), fibres, c.is_discrete());
            let text = write_configuration(&c);
            out.artifact(&text);
            out.report(json!({
                "n": c.n(),
                "classes": c.rank(),
                "fibres": fibres,
                "discrete": c.is_discrete(),
                "configuration": text,
            }));
            Ok(Verdict::Positive)
        }
        Command::Equiv { x, y } => {
            let (gx, gy) = (read_graph(&x)?, read_graph(&y)?);
            match wl_equivalent(&gx, &gy) {
                WlComparison::Equivalent { certificate, x: cx, y: cy } => {
                    certificate.verify(&gx, &cx, &gy, &cy).map_err(internal_error)?;
                    if !certificate.maps_edges_to_edges {
                        return Err(internal_error("certificate does not map edge classes to edge classes"));
                    }
                    eprintln!(
                        "equivalent: {} classes matched, {} intersection numbers checked",
                        certificate.map.len(),
                        certificate.intersection_entries_checked
                    );
                    out.artifact(&write_certificate(&certificate));
                    out.report(json!({ "equivalent": true, "certificate": to_value(&certificate) }));
                    Ok(Verdict::Positive)
                }
                WlComparison::Distinguished { round, reason } => {
                    eprintln!("distinguished at round {round}: {reason}");
                    out.report(json!({ "equivalent": false, "round": round, "reason": reason }));
                    Ok(Verdict::Negative)
                }
            }
        }
        Command::Aut { graph, haar } => {
            let g = read_graph(&graph)?;
            let group = automorphism_group(&g);
            let part = orbitals(&group);
            eprintln!(
                "order {}, {} generators, {} orbits, {} orbitals",
                group.order(),
                group.generators().len(),
                part.orbits.len(),
                part.orbitals.rank()
            );
            let mut report = json!({
                "order": group.order().to_string(),
                "generators": to_value(group.generators()),
                "orbits": part.orbits,
                "orbitals": part.orbitals.rank(),
                "orbital_sizes": part.orbitals.class_sizes(),
            });
            if haar {
                let h = haar_values_for(&group).map_err(internal_error)?;
                match &h.check {
                    HaarCheck::Verified { group_order } => {
                        eprintln!("haar: averaged over all {group_order} elements; matches 1/|orbital| and 1/|orbit|")
                    }
                    HaarCheck::Skipped { group_order } => {
                        eprintln!("haar: group of order {group_order} too large to enumerate; values from orbital sizes")
                    }
                }
                eprintln!("haar orbit values: {}", show(&h.orbit_values).join(" "));
                eprintln!("haar orbital values: {}", show(&h.orbital_values).join(" "));
                report["haar"] = json!({
                    "check": to_value(&h.check),
                    "orbit_values": show(&h.orbit_values),
                    "orbital_values": show(&h.orbital_values),
                });
            }
            out.artifact(&write_generators(&group));
            out.report(report);
            Ok(Verdict::Positive)
        }
        Command::Gap { graph } => {
            let g = read_graph(&graph)?;
            let r = configuration_gap(&g);
            if !r.refines {
                return Err(internal_error("orbitals do not refine the WL classes"));
            }
            eprintln!(
                "WL: {} classes, {} fibres; Aut (order {}): {} orbitals, {} orbits; {}",
                r.wl_classes,
                r.wl_fibres,
                r.group_order,
                r.orbital_classes,
                r.orbits,
                match r.verdict {
                    GapVerdict::Tight => "tight".to_string(),
                    GapVerdict::Gap => format!("gap ({} WL classes split)", r.split.len()),
                }
            );
            let tight = r.verdict == GapVerdict::Tight;
            out.report(to_value(&r));
            Ok(verdict(tight))
        }
        Command::LbcsSat { file } => {
            let f = read_lbcs(&file)?;
            match classical_satisfiable(&f) {
                Satisfiability::Satisfiable(a) => {
                    if !f.is_satisfied_by(&a).map_err(internal_error)? {
                        return Err(internal_error("assignment violates the system"));
                    }
                    let bits: Vec<u8> = a.bits().into_iter().map(u8::from).collect();
                    let line = bits.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" ");
                    eprintln!("satisfiable");
                    out.artifact(&format!("{line}\n"));
                    out.report(json!({ "satisfiable": true, "assignment": bits }));
                    Ok(Verdict::Positive)
                }
                Satisfiability::Unsatisfiable(proof) => {
                    if !proof.verify(&f) {
                        return Err(internal_error("inconsistency proof does not verify"));
                    }
                    let line = proof.constraints.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
                    eprintln!("unsatisfiable: constraints {line} sum to 0 = 1");
                    out.artifact(&format!("{line}\n"));
                    out.report(json!({ "satisfiable": false, "inconsistent_constraints": proof.constraints }));
                    Ok(Verdict::Negative)
                }
            }
        }
        Command::GameGraph { file, no_cliques } => {
            let f = read_lbcs(&file)?;
            let g = game_graph(&f, !no_cliques).map_err(input_error)?;
            eprintln!("game graph: {} vertices, {} edges", g.n(), g.edge_count());
            let text = write_graph_with_labels(&g);
            out.artifact(&text);
            out.report(json!({ "vertices": g.n(), "edges": g.edge_count(), "graph": text }));
            Ok(Verdict::Positive)
        }
        Command::Arkhipov { graph, marked } => {
            let z = read_graph(&graph)?;
            let f = arkhipov_lbcs(&z, marked).map_err(input_error)?;
            let q = quantum_satisfiable_verdict(&z).map_err(input_error)?;
            let classical = classical_satisfiable(&f);
            let proof = match &classical {
                Satisfiability::Unsatisfiable(p) if p.verify(&f) => p.constraints.clone(),
                Satisfiability::Unsatisfiable(_) => return Err(internal_error("inconsistency proof does not verify")),
                Satisfiability::Satisfiable(_) => return Err(internal_error("odd parity system reported satisfiable")),
            };
            let quantum_sat = q.verdict == QuantumVerdict::QuantumSat;
            eprintln!(
                "classical: UNSAT; quantum: {} ({})",
                if quantum_sat { "SAT" } else { "UNSAT" },
                if q.planar { "planar" } else { "non-planar" }
            );
            let text = write_lbcs(&f);
            out.artifact(&text);
            out.report(json!({
                "lbcs": text,
                "classical": { "satisfiable": false, "inconsistent_constraints": proof },
                "quantum": to_value(&q),
            }));
            Ok(verdict(quantum_sat))
        }
        Command::Construct { graph, marked, complement, out_dir } => {
            let z = read_graph(&graph)?;
            let w = match witness_pair(&z, marked, complement) {
                Ok(w) => w,
                Err(e @ ConstructError::Planar) => {
                    eprintln!("{e}");
                    out.report(json!({ "refused": e.to_string() }));
                    return Ok(Verdict::Negative);
                }
                Err(e @ (ConstructError::CheckFailed(_) | ConstructError::NotAnAutomorphism)) => {
                    return Err(internal_error(e));
                }
                Err(e) => return Err(input_error(e)),
            };
            let r = &w.report;
            eprintln!(
                "X0: {} vertices, X: {} vertices, union: {} vertices",
                r.x0_vertices, r.x_vertices, r.union_vertices
            );
            for (tag, c) in ["a", "b", "c", "d", "e"].iter().zip(&r.checks) {
                eprintln!("({tag}) {:<28} {}  {}", c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail);
            }
            eprintln!("|Aut X0| = {}, |Aut X| = {}, |Aut union| = {}", r.x0_aut_order, r.x_aut_order, r.union_aut_order);
            eprintln!("X vertex transitive: {}", r.x_vertex_transitive);
            let report = to_value(r);
            if let Some(dir) = out_dir {
                let write = |name: &str, text: &str| {
                    fs::write(dir.join(name), text).map_err(|e| input_error(format!("{}: {e}", dir.join(name).display())))
                };
                fs::create_dir_all(&dir).map_err(|e| input_error(format!("{}: {e}", dir.display())))?;
                write("x0.graph", &write_graph(&w.x0_graph))?;
                write("x.graph", &write_graph(&w.x_graph))?;
                write("union.graph", &write_graph(&w.union))?;
                write("x0.labels", &w.x0.label_sidecar())?;
                write("x.labels", &w.x.label_sidecar())?;
                write("report.json", &format!("{}\n", serde_json::to_string_pretty(&report).expect("serializes")))?;
            }
            let all = r.all_passed();
            out.report(report);
            Ok(verdict(all))
        }
        Command::VerifyMu { cert, x, y, tol } => {
            let u = parse_magic_unitary(&read(&cert)?).map_err(|e| input_error(format!("{}: {e}", cert.display())))?;
            let (gx, gy) = (read_graph(&x)?, read_graph(&y)?);
            let m = check_magic_unitary(&u, tol).map_err(input_error)?;
            eprintln!(
                "magic unitary: hermitian {:.3e}, idempotent {:.3e}, row sums {:.3e}, column sums {:.3e} (unitarity {:.3e})",
                m.hermitian, m.idempotent, m.row_sum, m.col_sum, m.unitarity
            );
            if !m.passed {
                eprintln!("not a magic unitary at tolerance {tol:e}");
                out.report(json!({ "magic": to_value(&m), "passed": false }));
                return Ok(Verdict::Negative);
            }
            let q = check_quantum_isomorphism(&gx, &gy, &u, tol).map_err(input_error)?;
            eprintln!("AU = UB residual {:.3e}, orthogonality residual {:.3e}", q.intertwining, q.orthogonality);
            if q.inconsistent {
                return Err(internal_error(format!(
                    "AU = UB residual {:e} and orthogonality residual {:e} disagree",
                    q.intertwining, q.orthogonality
                )));
            }
            eprintln!("{}", if q.passed { "quantum isomorphism verified" } else { "not a quantum isomorphism" });
            out.report(to_value(&q));
            Ok(verdict(q.passed))
        }
        Command::VerifyOpsol { cert, lbcs, tol } => {
            let s = parse_operator_solution(&read(&cert)?).map_err(|e| input_error(format!("{}: {e}", cert.display())))?;
            let f = read_lbcs(&lbcs)?;
            let r = check_operator_solution(&f, &s, tol).map_err(input_error)?;
            eprintln!("involution {:.3e}, self-adjoint {:.3e}", r.involution, r.self_adjoint);
            for (i, (c, p)) in r.commutation.iter().zip(&r.product).enumerate() {
                eprintln!("constraint {i}: commutation {c:.3e}, product {p:.3e}");
            }
            eprintln!("{}", if r.passed { "operator solution verified" } else { "not an operator solution" });
            let passed = r.passed;
            out.report(to_value(&r));
            Ok(verdict(passed))
        }
        Command::RandomTrivial { n, samples, seed } => {
            let discrete: Vec<bool> = (0..samples as u64)
                .into_par_iter()
                .map(|i| random_graph(n, seed.wrapping_add(i)).map(|g| wl_closure(&g).is_discrete()))
                .collect::<Result<_, _>>()
                .map_err(input_error)?;
            let count = discrete.iter().filter(|&&d| d).count();
            let fraction = if samples == 0 { 0.0 } else { count as f64 / samples as f64 };
            eprintln!("{count}/{samples} samples of G({n}, 1/2) have a discrete configuration ({fraction:.4})");
            out.report(json!({ "n": n, "samples": samples, "seed": seed, "discrete": count, "fraction": fraction }));
            Ok(Verdict::Positive)
        }
        Command::CirculantCheck { n, set } => {
            let v = circulant_no_quantum_symmetry(n, &set).map_err(input_error)?;
            let holds = match &v {
                CirculantVerdict::CriterionHolds { classes } => {
                    eprintln!("criterion holds: {classes} classes; no quantum symmetry");
                    true
                }
                CirculantVerdict::Inconclusive { classes, reason } => {
                    eprintln!("inconclusive ({classes} classes): {reason}");
                    false
                }
            };
            out.report(to_value(&v));
            Ok(verdict(holds))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("QSYM_THREADS") {
        let threads = match v.parse::<usize>() {
            Ok(t) if t > 0 => t,
            _ => {
                eprintln!("error: QSYM_THREADS must be a positive integer, got {v:?}");
                return ExitCode::from(2);
            }
        };
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().expect("global pool set once");
    }
    match run(cli) {
        Ok(Verdict::Positive) => ExitCode::SUCCESS,
        Ok(Verdict::Negative) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
