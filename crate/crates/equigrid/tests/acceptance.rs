//! Desk-scale acceptance runs, one test per criterion, each printing a
//! single PASS or FAIL line (visible with `--nocapture`). Everything runs
//! from seed 0 and finishes comfortably inside a laptop test budget.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use equigrid::colouring::{
    ceil_div, verify_colouring, ListAssignment, Mode, SizeRule,
};
use equigrid::covering::{self, CoverMode, CoverSubgraph};
use equigrid::engines::{self, ArborOutcome, Provenance};
use equigrid::oracle::{self, OracleVerdict, SearchBudget, SearchOutcome};
use equigrid::partitions::{self, SpecialPartition};
use equigrid::{Graph, GridSpec, Result};

const RANDOM_TRIALS: usize = 100;

fn conclude(number: u8, name: &str, failures: &[String], summary: String) {
    if failures.is_empty() {
        println!("acceptance criterion {number} ({name}): PASS, {summary}");
    } else {
        println!(
            "acceptance criterion {number} ({name}): FAIL, {} violations, first: {}",
            failures.len(),
            failures[0]
        );
        let shown = failures.iter().take(5).cloned().collect::<Vec<_>>().join("\n  ");
        panic!("criterion {number} ({name}) failed:\n  {shown}");
    }
}

fn spec(dims: &[usize]) -> GridSpec {
    GridSpec::new(dims.to_vec()).expect("acceptance dims are valid")
}

fn pool_for(k: usize) -> Vec<u32> {
    (1..=(2 * k) as u32).collect()
}

#[test]
fn criterion_1_cover_correctness() {
    type Build = fn(&GridSpec) -> Result<CoverSubgraph>;
    let table: [(&str, Build, &[&[usize]]); 8] = [
        (
            "cover_grid2d",
            covering::cover_grid2d,
            &[
                &[2, 2],
                &[2, 3],
                &[3, 3],
                &[3, 4],
                &[4, 4],
                &[4, 5],
                &[5, 5],
                &[6, 6],
                &[2, 17],
                &[3, 11],
            ],
        ),
        (
            "cover_p2_3d",
            covering::cover_p2_3d,
            &[
                &[2, 2, 2],
                &[2, 2, 3],
                &[2, 3, 3],
                &[2, 3, 4],
                &[2, 4, 4],
                &[2, 3, 5],
                &[2, 2, 7],
                &[2, 2, 9],
            ],
        ),
        (
            "cover_3x3xn",
            covering::cover_3x3xn,
            &[&[3, 3, 2], &[3, 3, 3], &[3, 3, 4], &[3, 3, 5], &[3, 3, 6], &[3, 3, 7]],
        ),
        (
            "cover_3d_generic",
            covering::cover_3d_generic,
            &[
                &[2, 2, 2],
                &[2, 2, 3],
                &[2, 3, 3],
                &[3, 3, 3],
                &[2, 3, 4],
                &[3, 3, 4],
                &[2, 2, 5],
                &[2, 4, 4],
            ],
        ),
        (
            "cover_cube_chain",
            covering::cover_cube_chain,
            &[
                &[2, 2, 2, 2],
                &[2, 2, 2, 3],
                &[2, 2, 2, 4],
                &[2, 2, 2, 5],
                &[2, 2, 2, 6],
                &[2, 2, 2, 7],
            ],
        ),
        (
            "cover_2x2xnxn",
            covering::cover_2x2xnxn,
            &[
                &[2, 2, 2, 2],
                &[2, 2, 2, 3],
                &[2, 2, 3, 3],
                &[2, 2, 2, 4],
                &[2, 2, 3, 4],
                &[2, 2, 4, 4],
                &[2, 2, 3, 5],
            ],
        ),
        (
            "cover_4d",
            covering::cover_4d,
            &[
                &[2, 2, 2, 2],
                &[2, 2, 2, 3],
                &[2, 2, 3, 3],
                &[2, 2, 2, 4],
                &[2, 3, 3, 3],
                &[2, 2, 3, 5],
                &[3, 3, 3, 3],
            ],
        ),
        (
            "cover_generic",
            covering::cover_generic,
            &[
                &[2, 2, 2, 2, 2],
                &[2, 2, 2, 2, 3],
                &[2, 2, 2, 3, 3],
                &[2, 2, 2, 2, 4],
                &[2, 2, 2, 2, 2, 2],
                &[2, 2, 2, 2, 2, 3],
            ],
        ),
    ];

    let mut failures = Vec::new();
    let mut strict = 0usize;
    let mut extended = 0usize;
    for (name, build, specs) in table {
        assert!(specs.len() >= 6, "{name} needs at least six specs");
        for dims in specs {
            let host = spec(dims);
            let g = host.build();
            let cover = match build(&host) {
                Ok(c) => c,
                Err(e) => {
                    failures.push(format!("{name} on {dims:?}: {e}"));
                    continue;
                }
            };
            let declared = cover.family.degree_bound();
            let mut degree = vec![0usize; g.n()];
            for &(u, v) in &cover.edges {
                degree[u] += 1;
                degree[v] += 1;
            }
            let max_degree = degree.iter().copied().max().unwrap_or(0);
            if max_degree > declared {
                failures.push(format!(
                    "{name} on {dims:?}: degree {max_degree} exceeds the declared bound {declared}"
                ));
            }
            let cert = covering::verify_cover(&g, &cover, CoverMode::Exact);
            if !cert.valid {
                failures.push(format!("{name} on {dims:?}: {:?}", cert.violation));
            }
            if g.n() <= 36 {
                strict += 1;
                if !cert.caveats.is_empty() {
                    failures.push(format!(
                        "{name} on {dims:?}: exact check within 36 vertices must carry no caveats"
                    ));
                }
            } else {
                extended += 1;
            }
        }
    }
    conclude(
        1,
        "cover correctness",
        &failures,
        format!(
            "8 constructions, {strict} exact checks within 36 vertices plus {extended} larger hosts, degree bounds hold"
        ),
    );
}

fn dispatch_table() -> Vec<(Vec<usize>, usize)> {
    let mut pairs = Vec::new();
    for a in 2..=6usize {
        for b in a..=6 {
            for k in 2..=6 {
                pairs.push((vec![a, b], k));
            }
        }
    }

    let mut d3 = Vec::new();
    for a in 2..=4usize {
        for b in a..=4 {
            for c in b..=4 {
                d3.push(vec![a, b, c]);
            }
        }
    }
    for dims in &d3 {
        for k in 3..=6 {
            pairs.push((dims.clone(), k));
        }
    }
    for dims in &d3 {
        if dims.contains(&2) {
            pairs.push((dims.clone(), 2));
        }
    }
    for n in [3, 4, 5] {
        pairs.push((vec![3, 3, n], 2));
    }

    let mut d4 = Vec::new();
    for a in 2..=3usize {
        for b in a..=3 {
            for c in b..=3 {
                for e in c..=3 {
                    d4.push(vec![a, b, c, e]);
                }
            }
        }
    }
    for dims in &d4 {
        for k in [4, 5, 6] {
            pairs.push((dims.clone(), k));
        }
    }
    for (m, n) in [(2, 2), (2, 3), (3, 3), (2, 4), (3, 4), (4, 4)] {
        let mut dims = vec![2, 2, m, n];
        dims.sort_unstable();
        pairs.push((dims, 3));
    }
    for n in [2, 3, 4, 5] {
        pairs.push((vec![2, 2, 2, n], 2));
    }

    let seen: BTreeSet<(Vec<usize>, usize)> = pairs.iter().cloned().collect();
    assert_eq!(seen.len(), pairs.len(), "the table holds no duplicate pairs");
    pairs
}

fn outcome_label(outcome: &ArborOutcome) -> &'static str {
    match outcome {
        ArborOutcome::Coloured { .. } => "coloured",
        ArborOutcome::Heuristic { .. } => "heuristic",
        ArborOutcome::GuaranteeOnly { .. } => "guarantee-only",
        ArborOutcome::NoGuarantee { .. } => "no-guarantee",
    }
}

#[test]
fn criterion_2_dispatcher_validity() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut failures = Vec::new();
    let mut verified = 0usize;
    let pairs = dispatch_table();
    for (dims, k) in &pairs {
        let host = spec(dims);
        let g = host.build();
        let n = host.vertex_count();
        let pool = pool_for(*k);
        let mut assignments = vec![ListAssignment::identical(n, *k), ListAssignment::disjoint(n, *k)];
        for _ in 0..RANDOM_TRIALS {
            assignments.push(ListAssignment::random_uniform(n, *k, &pool, &mut rng));
        }
        for (i, lists) in assignments.iter().enumerate() {
            match engines::equitable_list_arbor(&host, *k, lists, false) {
                Ok(ArborOutcome::Coloured { route, colouring }) => {
                    let cert = verify_colouring(
                        &g,
                        Some(lists),
                        &colouring,
                        Mode::Arbor,
                        *k,
                        SizeRule::AtMostCeil,
                    );
                    if cert.valid {
                        verified += 1;
                    } else {
                        failures.push(format!(
                            "dims {dims:?} k {k} assignment {i} via {route}: {:?}",
                            cert.violation
                        ));
                    }
                }
                Ok(other) => failures.push(format!(
                    "dims {dims:?} k {k} assignment {i}: dispatcher returned {}",
                    outcome_label(&other)
                )),
                Err(e) => failures.push(format!("dims {dims:?} k {k} assignment {i}: {e}")),
            }
        }
    }
    conclude(
        2,
        "dispatcher validity",
        &failures,
        format!(
            "{} spec/k pairs, {verified} colourings verified equitable arbor (102 assignments each)",
            pairs.len()
        ),
    );
}

#[test]
fn criterion_3_oracle_agreement() {
    let small: BTreeSet<Vec<usize>> = dispatch_table()
        .into_iter()
        .map(|(dims, _)| dims)
        .filter(|dims| dims.iter().product::<usize>() <= 16)
        .collect();
    let mut failures = Vec::new();
    let mut trials = 0usize;
    for dims in &small {
        let host = spec(dims);
        let k = engines::thresholds(&host)
            .constructive_from()
            .expect("table specs have a constructive threshold");
        match oracle::cross_check(&host, k, RANDOM_TRIALS, 0) {
            Ok(report) => {
                if report.oracle_no != 0
                    || report.oracle_budget_exceeded != 0
                    || report.dispatcher_coloured != RANDOM_TRIALS
                {
                    failures.push(format!(
                        "dims {dims:?} k {k}: coloured {}, yes {}, no {}, over budget {}",
                        report.dispatcher_coloured,
                        report.oracle_yes,
                        report.oracle_no,
                        report.oracle_budget_exceeded
                    ));
                } else {
                    trials += report.trials;
                }
            }
            Err(e) => failures.push(format!("dims {dims:?} k {k}: {e}")),
        }
    }
    conclude(
        3,
        "oracle agreement",
        &failures,
        format!(
            "{} specs within 16 vertices at their minimum constructive k, {trials} trials, zero discrepancies",
            small.len()
        ),
    );
}

#[test]
fn criterion_4_bad_assignment_witness() {
    let mut failures = Vec::new();

    let host = spec(&[2, 3]);
    let g = host.build();
    let budget = SearchBudget { colour_pool: Some(vec![1, 2, 3]), ..SearchBudget::default() };
    match oracle::search_bad_assignment(&g, 2, Mode::Proper, false, &budget) {
        Ok(SearchOutcome::Found { lists }) => {
            match oracle::exists_colouring(&g, &lists, 2, Mode::Proper, false, &budget) {
                Ok(OracleVerdict::No) => {}
                Ok(other) => failures.push(format!(
                    "found assignment did not re-check as No: {other:?}"
                )),
                Err(e) => failures.push(format!("re-check errored: {e}")),
            }
        }
        Ok(SearchOutcome::NotFound { note }) => {
            failures.push(format!("exhaustive search found nothing: {note}"))
        }
        Err(e) => failures.push(format!("search errored: {e}")),
    }

    let host = spec(&[4, 5]);
    let g = host.build();
    let pool = pool_for(2);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut coloured = 0usize;
    for i in 0..500 {
        let lists = ListAssignment::random_uniform(20, 2, &pool, &mut rng);
        match engines::equitable_list_arbor(&host, 2, &lists, false) {
            Ok(ArborOutcome::Coloured { route, colouring }) => {
                if !route.contains("grid2d") {
                    failures.push(format!("assignment {i} took route {route}"));
                }
                let cert =
                    verify_colouring(&g, Some(&lists), &colouring, Mode::Arbor, 2, SizeRule::AtMostCeil);
                if cert.valid {
                    coloured += 1;
                } else {
                    failures.push(format!("assignment {i}: {:?}", cert.violation));
                }
            }
            Ok(other) => {
                failures.push(format!("assignment {i}: dispatcher returned {}", outcome_label(&other)))
            }
            Err(e) => failures.push(format!("assignment {i}: {e}")),
        }
    }
    conclude(
        4,
        "bad assignment witness",
        &failures,
        format!(
            "P2xP3 has a 2-assignment with no proper colouring; {coloured}/500 random 2-assignments on P4xP5 coloured via the planar route"
        ),
    );
}

fn canonical_dims(max_product: usize, max_dim: usize) -> Vec<Vec<usize>> {
    fn grow(
        prefix: &mut Vec<usize>,
        min: usize,
        product: usize,
        max_product: usize,
        max_dim: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        if prefix.len() == max_dim {
            return;
        }
        let mut factor = min;
        while product * factor <= max_product {
            prefix.push(factor);
            grow(prefix, factor, product * factor, max_product, max_dim, out);
            prefix.pop();
            factor += 1;
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), 2, 1, max_product, max_dim, &mut out);
    out
}

#[test]
fn criterion_5_equitable_proper_grids() {
    let specs = canonical_dims(2000, 4);
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for dims in &specs {
        let host = spec(dims);
        let g = host.build();
        for k in 2..=8usize {
            match engines::equitable_proper_grid(&host, k) {
                Ok(colouring) => {
                    let cert =
                        verify_colouring(&g, None, &colouring, Mode::Proper, k, SizeRule::Balanced);
                    if cert.valid {
                        checked += 1;
                    } else {
                        failures.push(format!("dims {dims:?} k {k}: {:?}", cert.violation));
                    }
                }
                Err(e) => failures.push(format!("dims {dims:?} k {k}: {e}")),
            }
            if failures.len() > 30 {
                break;
            }
        }
        if failures.len() > 30 {
            break;
        }
    }
    conclude(
        5,
        "equitable proper grids",
        &failures,
        format!(
            "{} canonical specs with product at most 2000, {checked} colourings proper and balanced",
            specs.len()
        ),
    );
}

fn staircase_graph() -> Graph {
    let cells: Vec<(usize, usize)> = vec![
        (1, 1),
        (1, 2),
        (1, 3),
        (2, 1),
        (2, 2),
        (2, 3),
        (3, 1),
        (4, 1),
        (5, 1),
    ];
    let id = |a: usize, b: usize| cells.iter().position(|&c| c == (a, b));
    let mut edges = Vec::new();
    for &(a, b) in &cells {
        for (na, nb) in [(a + 1, b), (a, b + 1)] {
            if let (Some(u), Some(v)) = (id(a, b), id(na, nb)) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(cells.len(), &edges).unwrap()
}

#[test]
fn criterion_6_partition_engines() {
    let mut failures = Vec::new();
    let mut colourings = 0usize;

    let mut instances: Vec<(String, Graph, SpecialPartition)> = Vec::new();

    for (i, n) in (5..=12usize).enumerate() {
        let g = spec(&[n]).build();
        let k = 2 + i % 3;
        match partitions::partition_linear_forest(&g, k) {
            Ok(p) => instances.push((format!("linear_forest P{n} k={k}"), g, p)),
            Err(e) => failures.push(format!("linear_forest on P{n}: {e}")),
        }
    }
    for (n, edges) in [
        (7usize, vec![(0usize, 1usize), (1, 2), (3, 4), (4, 5), (5, 6)]),
        (6, vec![(0, 1), (2, 3), (4, 5)]),
    ] {
        let g = Graph::from_edges(n, &edges).unwrap();
        match partitions::partition_linear_forest(&g, 2) {
            Ok(p) => instances.push((format!("linear_forest union n={n} k=2"), g, p)),
            Err(e) => failures.push(format!("linear_forest on a {n}-vertex union: {e}")),
        }
    }
    let forest_count = instances.len();

    for n in 2..=7usize {
        let g = spec(&[2, n]).build();
        match partitions::partition_g1(&g) {
            Ok(p) => instances.push((format!("g1 ladder 2x{n}"), g, p)),
            Err(e) => failures.push(format!("g1 on the 2x{n} ladder: {e}")),
        }
    }
    for n in [5usize, 8, 11, 14] {
        let g = spec(&[n]).build();
        match partitions::partition_g1(&g) {
            Ok(p) => instances.push((format!("g1 path P{n}"), g, p)),
            Err(e) => failures.push(format!("g1 on P{n}: {e}")),
        }
    }
    let g1_count = instances.len() - forest_count;

    let g2_grids: [&[usize]; 8] =
        [&[2, 2], &[2, 3], &[3, 3], &[2, 4], &[3, 4], &[2, 5], &[4, 4], &[3, 5]];
    for dims in g2_grids {
        let g = spec(dims).build();
        match partitions::partition_g2(&g) {
            Ok(p) => instances.push((format!("g2 grid {dims:?}"), g, p)),
            Err(e) => failures.push(format!("g2 on {dims:?}: {e}")),
        }
    }
    let g = staircase_graph();
    match partitions::partition_g2(&g) {
        Ok(p) => instances.push(("g2 staircase".into(), g, p)),
        Err(e) => failures.push(format!("g2 on the staircase: {e}")),
    }
    let g = Graph::from_edges(6, &[(0, 1), (1, 2), (3, 4), (4, 5)]).unwrap();
    match partitions::partition_g2(&g) {
        Ok(p) => instances.push(("g2 path union".into(), g, p)),
        Err(e) => failures.push(format!("g2 on a path union: {e}")),
    }
    let g2_count = instances.len() - forest_count - g1_count;

    let lex_specs: [&[usize]; 10] = [
        &[2, 2, 2, 2],
        &[2, 2, 2, 3],
        &[2, 2, 3, 3],
        &[2, 3, 3, 3],
        &[3, 3, 3, 3],
        &[2, 2, 2, 4],
        &[2, 2, 3, 4],
        &[2, 2, 2, 5],
        &[2, 3, 3, 4],
        &[2, 2, 4, 4],
    ];
    for dims in lex_specs {
        let host = spec(dims);
        match partitions::partition_4d_lex(&host) {
            Ok(p) => instances.push((format!("4d_lex {dims:?}"), host.build(), p)),
            Err(e) => failures.push(format!("4d_lex on {dims:?}: {e}")),
        }
    }
    let lex_count = instances.len() - forest_count - g1_count - g2_count;

    for (count, engine) in
        [(forest_count, "linear_forest"), (g1_count, "g1"), (g2_count, "g2"), (lex_count, "4d_lex")]
    {
        if count < 10 {
            failures.push(format!("{engine} produced only {count} instances, 10 required"));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for (label, g, p) in &instances {
        let n = g.n();
        for t in p.k..=p.k + 3 {
            let pool = pool_for(t);
            for i in 0..50 {
                let lists = ListAssignment::random_uniform(n, t, &pool, &mut rng);
                match partitions::colour_via_partition(g, p, &lists, t) {
                    Ok(colouring) => {
                        let cert = verify_colouring(
                            g,
                            Some(&lists),
                            &colouring,
                            p.mode,
                            t,
                            SizeRule::AtMostCeil,
                        );
                        if cert.valid {
                            colourings += 1;
                        } else {
                            failures
                                .push(format!("{label} t={t} trial {i}: {:?}", cert.violation));
                        }
                    }
                    Err(e) => failures.push(format!("{label} t={t} trial {i}: {e}")),
                }
            }
        }
    }
    conclude(
        6,
        "partition engines",
        &failures,
        format!(
            "{} instances across four engines, {colourings} colourings valid in mode with cap n/t",
            instances.len()
        ),
    );
}

#[test]
fn criterion_7_greedy_arborability() {
    let shapes: [&[usize]; 20] = [
        &[5],
        &[12],
        &[4, 4],
        &[5, 5],
        &[6, 6],
        &[4, 6],
        &[3, 7],
        &[5, 6],
        &[3, 3, 3],
        &[2, 3, 4],
        &[3, 3, 4],
        &[4, 4, 4],
        &[2, 4, 4],
        &[2, 2, 3],
        &[2, 3, 3, 4],
        &[2, 2, 3, 3],
        &[3, 3, 3, 3],
        &[2, 2, 2, 4],
        &[2, 2, 2, 2],
        &[2, 2, 2, 2, 2],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut failures = Vec::new();
    let mut runs = 0usize;
    for dims in shapes {
        let g = spec(dims).build();
        let (degeneracy, order) = g.degeneracy_order();
        let k = ceil_div(degeneracy + 1, 2);
        let pool = pool_for(k);
        let mut position = vec![0usize; g.n()];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        for trial in 0..50 {
            let lists = ListAssignment::random_uniform(g.n(), k, &pool, &mut rng);
            let colouring = match engines::greedy_list_arbor(&g, &lists) {
                Ok(c) => c,
                Err(e) => {
                    failures.push(format!("dims {dims:?} trial {trial}: {e}"));
                    continue;
                }
            };
            for (c, class) in colouring.class_sizes().keys().map(|&c| {
                let class: Vec<usize> = (0..g.n()).filter(|&v| colouring.colours[v] == c).collect();
                (c, class)
            }) {
                if !g.is_acyclic(&class) {
                    failures.push(format!("dims {dims:?} trial {trial}: class {c} holds a cycle"));
                }
            }
            for v in 0..g.n() {
                let earlier_same = g
                    .neighbours(v)
                    .iter()
                    .filter(|&&w| {
                        position[w] < position[v] && colouring.colours[w] == colouring.colours[v]
                    })
                    .count();
                if earlier_same > 1 {
                    failures.push(format!(
                        "dims {dims:?} trial {trial}: vertex {v} has {earlier_same} earlier neighbours of its colour"
                    ));
                }
            }
            runs += 1;
        }
    }
    conclude(
        7,
        "greedy arborability",
        &failures,
        format!("20 graphs at k = (degeneracy+1)/2 rounded up, {runs} greedy colourings checked"),
    );
}

#[test]
fn criterion_8_threshold_golden_file() {
    let dims_list: [&[usize]; 7] = [
        &[3, 4],
        &[2, 3, 4],
        &[2, 3, 3, 4],
        &[2, 2, 2, 2, 2],
        &[2, 2, 2, 2, 2, 2],
        &[2, 2, 2, 2, 2, 2, 2],
        &[2, 2, 2, 2, 2, 2, 2, 2],
    ];
    let mut failures = Vec::new();
    let reports: Vec<_> = dims_list.iter().map(|dims| engines::thresholds(&spec(dims))).collect();

    let golden: serde_json::Value =
        serde_json::from_str(include_str!("data/threshold_reports.json"))
            .expect("the golden file parses");
    let recomputed = serde_json::to_value(&reports).expect("reports serialise");
    if recomputed != golden {
        failures.push("recomputed reports differ from the golden file".into());
    }

    let five_cube = &reports[3];
    if !five_cube
        .sources
        .iter()
        .any(|s| s.k_min == 8 && s.provenance == Provenance::GuaranteeOnly)
    {
        failures.push("the 5-cube report lost its k >= 8 guarantee line".into());
    }
    let six_cube = &reports[4];
    if !six_cube.sources.iter().any(|s| s.k_min == 12) {
        failures.push("the 6-cube report lost its formula-derived k >= 12 line".into());
    }
    conclude(
        8,
        "threshold golden file",
        &failures,
        format!("{} reports across dimensions 2 to 8 match the golden file", reports.len()),
    );
}
