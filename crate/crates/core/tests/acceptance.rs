//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use qsym_core::coherent::*;
use qsym_core::construct::*;
use qsym_core::graph::*;
use qsym_core::lbcs::*;
use qsym_core::qcert::*;
use qsym_core::symmetry::*;

use common::quantum::{block_diagonal_magic, max_commutator};
use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($msg)+)),
        }
    };
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("K3,3 witness pair", Some(60), || witness(complete_bipartite(3, 3).unwrap(), 24)),
        ("K5 witness pair", Some(120), || witness(complete_graph(5).unwrap(), 40)),
        ("planarity verdicts", None, planarity_verdicts),
        ("operator solution", Some(5), operator_solution),
        ("Haar averages", None, haar_averages),
        ("configuration axioms", None, configuration_axioms),
        ("commutant dimension", None, commutant_dimension),
        ("random graphs are asymmetric", Some(120), random_triviality),
        ("circulant criterion", None, circulant_criterion),
        ("certificate checker", None, certificate_checker),
        ("even-subgraph maps", None, even_subgraph_maps),
    ];
    let mut failures = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(s)) if elapsed > Duration::from_secs(*s) => Err(format!("took {elapsed:.1?}, limit {s} s")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({detail}; {elapsed:.2?})", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    if failures > 0 {
        println!("{failures} criterion/criteria failed");
        std::process::exit(1);
    }
}

// exact power sums tr(M^k), k = 1..=n; equal sums force equal spectra
fn power_sums(m: &[Vec<i64>]) -> Vec<BigInt> {
    let n = m.len();
    let mut p: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut sums = Vec::with_capacity(n);
    for k in 1..=n {
        sums.push((0..n).map(|i| p[i][i].clone()).sum());
        if k < n {
            p = p
                .iter()
                .map(|row| {
                    (0..n)
                        .map(|j| {
                            (0..n).filter(|&t| m[t][j] != 0).fold(BigInt::zero(), |acc, t| acc + &row[t] * m[t][j])
                        })
                        .collect()
                })
                .collect();
        }
    }
    sums
}

fn spectral_matrices(g: &Graph) -> [Vec<Vec<i64>>; 3] {
    let a: Vec<Vec<i64>> = matrix(g).iter().map(|r| r.iter().map(|&b| i64::from(b)).collect()).collect();
    let with_diag = |sign: i64| {
        let mut m: Vec<Vec<i64>> = a.iter().map(|r| r.iter().map(|&x| sign * x).collect()).collect();
        for (v, row) in m.iter_mut().enumerate() {
            row[v] = g.degree(v) as i64;
        }
        m
    };
    [a.clone(), with_diag(-1), with_diag(1)]
}

fn witness(z: Graph, expected: usize) -> Outcome {
    let w = witness_pair(&z, 0, false).map_err(|e| e.to_string())?;
    let r = &w.report;
    ensure!(w.x0_graph.n() == expected && w.x_graph.n() == expected, "sizes {} and {}", w.x0_graph.n(), w.x_graph.n());
    for c in &r.checks {
        ensure!(c.passed, "check '{}' failed: {}", c.name, c.detail);
    }
    ensure!(
        !isomorphic_by_backtracking(&w.x0_graph, &w.x_graph),
        "backtracking oracle finds an isomorphism"
    );
    let reversed: Vec<usize> = (0..expected).rev().collect();
    ensure!(
        isomorphic_by_backtracking(&w.x0_graph, &w.x0_graph.relabel(&reversed)),
        "backtracking oracle misses a relabelled copy"
    );
    let Some(cert) = &r.wl_certificate else { return Err("no WL certificate".into()) };
    let (cx, cy) = (wl_closure(&w.x0_graph), wl_closure(&w.x_graph));
    ensure!(cert.verify(&w.x0_graph, &cx, &w.x_graph, &cy).is_ok(), "certificate does not verify");
    ensure!(cert.maps_edges_to_edges, "certificate does not map edges to edges");
    ensure!(cert.intersection_entries_checked == cx.intersection_numbers().len(), "partial intersection check");
    ensure!(r.cospectral.max_deviation.iter().all(|&d| d <= 1e-8), "spectral deviation {:?}", r.cospectral.max_deviation);
    let (m0, m1) = (spectral_matrices(&w.x0_graph), spectral_matrices(&w.x_graph));
    for (a, b) in m0.iter().zip(&m1) {
        ensure!(power_sums(a) == power_sums(b), "exact power sums differ");
    }
    ensure!(is_vertex_transitive(&w.x0_graph), "X0 not vertex transitive");
    ensure!(is_vertex_transitive(&w.x_graph), "X not vertex transitive");
    ensure!(!is_vertex_transitive(&w.union), "union vertex transitive");
    Ok(format!(
        "{expected} vertices, search visited {} nodes, |Aut| {} / {} / {}",
        r.isomorphism_search_nodes, r.x0_aut_order, r.x_aut_order, r.union_aut_order
    ))
}

fn planarity_verdicts() -> Outcome {
    for z in [complete_bipartite(3, 3).unwrap(), complete_graph(5).unwrap()] {
        ensure!(has_kuratowski_minor(&z), "oracle finds no minor");
        for marked in 0..z.n() {
            let f = arkhipov_lbcs(&z, marked).map_err(|e| e.to_string())?;
            let Satisfiability::Unsatisfiable(proof) = classical_satisfiable(&f) else {
                return Err(format!("classically satisfiable with marked vertex {marked}"));
            };
            ensure!(proof.verify(&f), "proof rejected");
            // recombine the rows by hand
            let mut support = BTreeSet::new();
            let mut rhs = false;
            for &i in &proof.constraints {
                let c = &f.constraints()[i];
                for &v in &c.support {
                    if !support.insert(v) {
                        support.remove(&v);
                    }
                }
                rhs ^= c.rhs;
            }
            ensure!(support.is_empty() && rhs, "combination is not 0 = 1");
        }
        let v = quantum_satisfiable_verdict(&z).map_err(|e| e.to_string())?;
        ensure!(v.verdict == QuantumVerdict::QuantumSat, "expected quantum SAT");
    }
    let k4 = complete_graph(4).unwrap();
    ensure!(!has_kuratowski_minor(&k4), "K4 has a Kuratowski minor");
    ensure!(quantum_satisfiable_verdict(&k4).unwrap().verdict == QuantumVerdict::QuantumUnsat, "K4 quantum SAT");
    let counts = [1, 1, 1, 2, 3, 6, 11, 23, 47, 106];
    let mut total = 0;
    for n in 1..=10 {
        let ts = trees(n);
        ensure!(ts.len() == counts[n - 1], "{} trees on {n} vertices", ts.len());
        for edges in ts {
            let t = Graph::new(n, edges).unwrap();
            ensure!(
                quantum_satisfiable_verdict(&t).unwrap().verdict == QuantumVerdict::QuantumUnsat,
                "tree on {n} vertices quantum SAT"
            );
            total += 1;
        }
    }
    Ok(format!("{total} trees and K4 quantum UNSAT"))
}

fn operator_solution() -> Outcome {
    let f = magic_square_lbcs();
    let s = mermin_peres_solution();
    let r = check_operator_solution(&f, &s, 1e-12).map_err(|e| e.to_string())?;
    ensure!(r.passed, "Pauli solution rejected");
    ensure!(r.max_residual() <= 1e-12, "residual {}", r.max_residual());
    let mut lib_failures = 0;
    for bits in 0u32..512 {
        let signs: Vec<bool> = (0..9).map(|i| bits >> i & 1 == 1).collect();
        // scalar products: the product of signs must match (-1)^rhs
        let violated = f.constraints().iter().any(|c| c.support.iter().fold(false, |acc, &v| acc ^ signs[v]) != c.rhs);
        ensure!(violated, "assignment {bits:09b} satisfies every constraint");
        let cand = OperatorSolutionCandidate::from_scalars(&signs);
        let report = check_operator_solution(&f, &cand, 1e-12).map_err(|e| e.to_string())?;
        ensure!(!report.passed && report.first_failing_product().is_some(), "checker accepts {bits:09b}");
        lib_failures += 1;
    }
    Ok(format!("max residual {:.1e}; {lib_failures}/512 scalar assignments fail", r.max_residual()))
}

fn haar_averages() -> Outcome {
    let mut seen = Vec::new();
    for (name, g) in [
        ("Petersen", petersen_graph()),
        ("C5", cycle_graph(5).unwrap()),
        ("K4", complete_graph(4).unwrap()),
        ("P3", path_graph(3).unwrap()),
    ] {
        let n = g.n();
        let auts = brute_automorphisms(&g);
        let size = BigInt::from(auts.len());
        let h = haar_values(&g).map_err(|e| e.to_string())?;
        // orbits and orbitals straight from the enumerated group
        let orbit = |x: usize| auts.iter().map(|s| s[x]).collect::<BTreeSet<_>>();
        let orbital = |x: usize, y: usize| auts.iter().map(|s| (s[x], s[y])).collect::<BTreeSet<_>>();
        let mut values = BTreeSet::new();
        for x in 0..n {
            let o = orbit(x);
            for y in 0..n {
                let count = auts.iter().filter(|s| s[x] == y).count();
                let avg = BigRational::new(count.into(), size.clone());
                let want = if o.contains(&y) { BigRational::new(1.into(), o.len().into()) } else { BigRational::zero() };
                ensure!(avg == want && h.vertex_value(x, y) == want, "{name}: orbit value at ({x}, {y})");
            }
        }
        for x in 0..n {
            for xp in 0..n {
                let r = orbital(x, xp);
                let want = BigRational::new(1.into(), r.len().into());
                values.insert(want.clone());
                for &(y, yp) in &r {
                    let count = auts.iter().filter(|s| s[x] == y && s[xp] == yp).count();
                    let avg = BigRational::new(count.into(), size.clone());
                    ensure!(avg == want, "{name}: brute average at ({x}, {xp}) -> ({y}, {yp})");
                    ensure!(h.pair_value((x, xp), (y, yp)) == want, "{name}: library value at ({x}, {xp}) -> ({y}, {yp})");
                }
            }
        }
        if name == "Petersen" {
            let expected: BTreeSet<BigRational> = [10, 30, 60].map(|k| BigRational::new(1.into(), k.into())).into();
            ensure!(values == expected, "Petersen orbital values {values:?}");
        }
        seen.push(format!("{name} |Aut| {}", auts.len()));
    }
    Ok(seen.join(", "))
}

fn corpus() -> Vec<Graph> {
    let mut graphs: Vec<Graph> = (0..25).map(|seed| random_graph(12, seed).unwrap()).collect();
    graphs.push(petersen_graph());
    graphs.push(cycle_graph(7).unwrap());
    graphs.push(complete_bipartite(3, 3).unwrap());
    graphs
}

/// Axioms checked directly on a colouring of pairs, without the library.
fn coherent_axioms(n: usize, color: impl Fn(usize, usize) -> u32) -> bool {
    let mut diag = BTreeSet::new();
    let mut converse: HashMap<u32, u32> = HashMap::new();
    for x in 0..n {
        diag.insert(color(x, x));
    }
    for x in 0..n {
        for y in 0..n {
            if x != y && diag.contains(&color(x, y)) {
                return false;
            }
            if *converse.entry(color(x, y)).or_insert(color(y, x)) != color(y, x) {
                return false;
            }
        }
    }
    let mut profile: HashMap<u32, BTreeMap<(u32, u32), usize>> = HashMap::new();
    for x in 0..n {
        for z in 0..n {
            let mut counts = BTreeMap::new();
            for y in 0..n {
                *counts.entry((color(x, y), color(y, z))).or_insert(0) += 1;
            }
            if *profile.entry(color(x, z)).or_insert_with(|| counts.clone()) != counts {
                return false;
            }
        }
    }
    true
}

/// Orbitals by closing pairs under the generators.
fn orbital_count(n: usize, gens: &[Permutation]) -> usize {
    let mut parent: Vec<usize> = (0..n * n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for s in gens {
        for x in 0..n {
            for y in 0..n {
                let (a, b) = (find(&mut parent, x * n + y), find(&mut parent, s.apply(x) * n + s.apply(y)));
                parent[a] = b;
            }
        }
    }
    (0..n * n).filter(|&i| find(&mut parent, i) == i).count()
}

fn configuration_axioms() -> Outcome {
    let mut discrete = 0;
    for (i, g) in corpus().iter().enumerate() {
        let wl = wl_closure(g);
        let part = orbitals(&automorphism_group(g));
        ensure!(wl.verify().is_ok(), "graph {i}: WL closure fails verification");
        ensure!(part.orbitals.verify().is_ok(), "graph {i}: orbitals fail verification");
        ensure!(coherent_axioms(g.n(), |x, y| wl.class_of(x, y)), "graph {i}: WL axioms fail by hand");
        ensure!(coherent_axioms(g.n(), |x, y| part.orbitals.class_of(x, y)), "graph {i}: orbital axioms fail by hand");
        ensure!(same_partition(&naive_wl(g), wl.colors()), "graph {i}: WL differs from naive refinement");
        ensure!(part.orbitals.refines(&wl), "graph {i}: orbitals do not refine WL");
        // refinement by hand: each orbital sits inside one WL class
        let mut host = HashMap::new();
        for x in 0..g.n() {
            for y in 0..g.n() {
                ensure!(
                    *host.entry(part.orbitals.class_of(x, y)).or_insert(wl.class_of(x, y)) == wl.class_of(x, y),
                    "graph {i}: orbital split across WL classes"
                );
            }
        }
        discrete += usize::from(wl.is_discrete());
    }
    Ok(format!("28 graphs, {discrete} with discrete WL closure"))
}

fn commutant_dimension() -> Outcome {
    for (i, g) in corpus().iter().enumerate() {
        let group = automorphism_group(g);
        let r = commutant_report(&group);
        let count = orbital_count(g.n(), group.generators());
        ensure!(r.dimension == count, "graph {i}: dimension {} vs {count} orbitals", r.dimension);
        ensure!(r.orbitals == count && r.orbitals_form_basis(), "graph {i}: orbital matrices not a basis");
        let basis = commutant_basis(&group).map_err(|e| e.to_string())?;
        ensure!(basis.len() == count, "graph {i}: basis of size {}", basis.len());
    }
    Ok("28 graphs".into())
}

fn random_triviality() -> Outcome {
    let discrete: Vec<bool> = (0..200u64).into_par_iter().map(|s| wl_closure(&random_graph(40, s).unwrap()).is_discrete()).collect();
    // the naive refinement agrees on a few samples
    for s in 0..5 {
        let g = random_graph(40, s).unwrap();
        let colors = naive_wl(&g);
        let diag: BTreeSet<usize> = (0..40).map(|v| colors[v * 40 + v]).collect();
        ensure!((diag.len() == 40) == discrete[s as usize], "sample {s}: naive refinement disagrees");
    }
    let count = discrete.iter().filter(|&&d| d).count();
    ensure!(count >= 190, "only {count}/200 discrete");
    Ok(format!("{count}/200 discrete, fraction {:.3}", count as f64 / 200.0))
}

fn circulant_criterion() -> Outcome {
    for (n, set) in [(7, [1, 6]), (9, [1, 8])] {
        let v = circulant_no_quantum_symmetry(n, &set).map_err(|e| e.to_string())?;
        ensure!(v == CirculantVerdict::CriterionHolds { classes: n / 2 + 1 }, "C{n}: {v:?}");
        let naive = naive_wl(&circulant(n, &set).unwrap()).into_iter().collect::<BTreeSet<_>>().len();
        ensure!(naive == n / 2 + 1, "C{n}: naive refinement gives {naive} classes");
    }
    let v = circulant_no_quantum_symmetry(4, &[1, 3]).map_err(|e| e.to_string())?;
    ensure!(matches!(v, CirculantVerdict::Inconclusive { .. }), "C4: {v:?}");
    Ok("C7: 4 classes, C9: 5 classes, C4 inconclusive".into())
}

fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |a, z| a.max(z.norm()))
}

fn certificate_checker() -> Outcome {
    let (k3, p3, c5) = (complete_graph(3).unwrap(), path_graph(3).unwrap(), cycle_graph(5).unwrap());
    let mut passing = 0;
    for (x, y, count) in [(&k3, &p3, 6), (&c5, &c5, 120)] {
        let perms = permutations(x.n());
        ensure!(perms.len() == count, "{} permutations", perms.len());
        for p in perms {
            let iso = maps_onto(&matrix(x), &matrix(y), &p);
            let u = MagicUnitaryCandidate::from_permutation(&Permutation::from_images(p).unwrap());
            let r = check_quantum_isomorphism(x, y, &u, DEFAULT_TOL).map_err(|e| e.to_string())?;
            ensure!(r.passed == iso && !r.inconsistent, "verdict differs from the permutation check");
            passing += usize::from(r.passed);
        }
    }
    ensure!(passing == 10, "{passing} passing permutations, expected the 10 of D5");

    let e = Vec::from([[1.0, 0.0], [0.0, 0.0]]);
    let a = ComplexMatrix::from_fn(2, 2, |i, j| Complex64::new(e[i][j], 0.0));
    let u = two_projector_magic_unitary(&a, &line_projector(std::f64::consts::FRAC_PI_4)).map_err(|e| e.to_string())?;
    let z = Graph::new(4, [(0, 1)]).unwrap();
    let r = check_quantum_isomorphism(&z, &z, &u, DEFAULT_TOL).map_err(|e| e.to_string())?;
    ensure!(r.passed && r.intertwining <= 1e-12, "two-projector example: {r:?}");
    // (AU - UA)_{xy} block by block
    let adj = matrix(&z);
    let mut worst: f64 = 0.0;
    for x in 0..4 {
        for y in 0..4 {
            let mut d = ComplexMatrix::zeros(2, 2);
            for t in 0..4 {
                if adj[x][t] {
                    d += u.block(t, y);
                }
                if adj[t][y] {
                    d -= u.block(x, t);
                }
            }
            worst = worst.max(max_abs(&d));
        }
    }
    ensure!(worst <= 1e-12, "block residual {worst}");

    let mut swept = 0;
    let mut worst_comm: f64 = 0.0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1 + (seed % 3) as usize;
        let d = 1 + (seed / 3 % 4) as usize;
        let u = block_diagonal_magic(n, d, &mut rng);
        if check_magic_unitary(&u, DEFAULT_TOL).map_err(|e| e.to_string())?.passed {
            swept += 1;
            worst_comm = worst_comm.max(max_commutator(&u));
        }
    }
    ensure!(swept == 100, "{swept}/100 constructions pass");
    ensure!(worst_comm <= 1e-8, "commutator {worst_comm}");
    Ok(format!("two-projector residual {worst:.1e}; sweep commutators <= {worst_comm:.1e}"))
}

fn even_subgraph_maps() -> Outcome {
    let mut checked = 0usize;
    for (name, z) in [
        ("K3,3", complete_bipartite(3, 3).unwrap()),
        ("K5", complete_graph(5).unwrap()),
        ("Petersen", petersen_graph()),
    ] {
        let err = |e: ConstructError| format!("{name}: {e}");
        let x0 = build_x0(&z).map_err(err)?;
        let x = build_x(&z, 0).map_err(err)?;
        let group = automorphism_group(&z);
        let elements = group.elements().ok_or("group too large")?;
        for pg in [&x0, &x] {
            let m = matrix(pg.graph());
            for s in &elements {
                if pg.marked().is_some_and(|v| s.apply(v) != v) {
                    continue;
                }
                let l = lift_automorphism(pg, s).map_err(err)?;
                ensure!(maps_onto(&m, &m, l.images()), "{name}: lifted map is not an automorphism");
                checked += 1;
            }
            let basis = fundamental_cycles(&z);
            for combo in 0u32..1 << basis.len() {
                let mut f: Vec<usize> = Vec::new();
                for (i, c) in basis.iter().enumerate() {
                    if combo >> i & 1 == 1 {
                        f.extend(c);
                    }
                }
                let g = even_subgraph_automorphism(pg, &f).map_err(err)?;
                ensure!(maps_onto(&m, &m, g.images()), "{name}: cycle map is not an automorphism");
                checked += 1;
            }
        }
        let m0 = matrix(x0.graph());
        for anchor in 0..z.n() {
            let fibre: Vec<usize> = (0..x0.vertices().len()).filter(|&v| x0.vertices()[v].anchor == anchor).collect();
            for &u in &fibre {
                for &v in &fibre {
                    let (s, t) = (x0.edge_subset(u), x0.edge_subset(v));
                    let tr = fiber_transporter(&x0, anchor, &s, &t).map_err(err)?;
                    ensure!(tr.map.apply(u) == v, "{name}: transport misses at anchor {anchor}");
                    ensure!(maps_onto(&m0, &m0, tr.map.images()), "{name}: transport is not an automorphism");
                    checked += 1;
                }
            }
        }
        let (pg, cert) = certify_vertex_transitive_x0(&z).map_err(err)?;
        cert.verify(&pg).map_err(err)?;
        let m = matrix(pg.graph());
        let reached: BTreeSet<usize> = cert.entries.iter().map(|e| e.map.apply(0)).collect();
        ensure!(reached.len() == pg.graph().n(), "{name}: certificate covers {} vertices", reached.len());
        ensure!(cert.entries.iter().all(|e| maps_onto(&m, &m, e.map.images())), "{name}: certificate map fails");
    }
    Ok(format!("{checked} maps checked"))
}
