//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p pathfree-cli --test acceptance`. The process
//! exits non-zero when a criterion fails, except for the criteria listed in
//! `KNOWN_FAILURES`, which are reported as FAIL with the reason.

use std::collections::BTreeMap;
use std::process::Command as Process;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;

use pathfree_cli::{cmd_colour, ColourArgs, Format, EXIT_FAILED, EXIT_INVARIANT, EXIT_OK};
use pathfree_core::bins::checks::{
    check_gautschi, check_joint_tail, check_stirling, check_thinned_tail, default_grids,
};
use pathfree_core::bins::{
    exact_max_load_expectation_with_cap, multinomial_max_expectation, t_transform, w_with_cap, BinsQuery,
    MultinomialSpec,
};
use pathfree_core::colour::{
    proper_edge_colouring, star_colouring, star_part_capacity, vizing_type_refinement, EdgeColouring,
    RefinementDetail,
};
use pathfree_core::extract::{part_count, sample_candidate};
use pathfree_core::generate::{generate, Model};
use pathfree_core::graph::{random_balanced_bipartition, Edge, Graph};
use pathfree_core::rng::substream;
use pathfree_core::verify::{components_of, verify, Verdict};

/// Criteria that cannot hold as literally stated, with the reason.
const KNOWN_FAILURES: &[(usize, &str)] = &[(
    10,
    "classes are covered by at most floor(k/3) centres, which bounds paths, but two centres of one \
     colour may share a leaf or be adjacent, so a class need not be a literal star forest; \
     K_{2,N} with s=1 and k > 32 admits no colouring meeting both the degree and the star-forest conditions",
)];

struct Outcome {
    pass: bool,
    detail: String,
}

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn big(x: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `bound` nudged up by a relative 1e-12, as an exact rational.
fn nudged_up(bound: f64) -> BigRational {
    BigRational::from_float(bound + 1e-12 * bound.abs()).expect("finite bound")
}

// ---------------------------------------------------------------- 1

/// Σ over all `q^n` assignments of the maximum load, by odometer.
fn literal_max_sum(q: usize, n: usize) -> u128 {
    if q == 1 {
        return n as u128;
    }
    let mut digits = vec![0usize; n];
    let mut load = vec![0usize; q];
    let mut hist = vec![0usize; n + 1];
    load[0] = n;
    hist[n] += 1;
    hist[0] += q - 1;
    let mut max = n;
    let mut sum: u128 = 0;
    loop {
        sum += max as u128;
        let mut i = 0;
        loop {
            if i == n {
                return sum;
            }
            let from = digits[i];
            let to = if from + 1 == q { 0 } else { from + 1 };
            hist[load[to]] -= 1;
            load[to] += 1;
            hist[load[to]] += 1;
            max = max.max(load[to]);
            hist[load[from]] -= 1;
            load[from] -= 1;
            hist[load[from]] += 1;
            while hist[max] == 0 {
                max -= 1;
            }
            digits[i] = to;
            if to != 0 {
                break;
            }
            i += 1;
        }
    }
}

/// The same sum grouped by set partition of the balls: a partition into
/// `b` blocks stands for `q(q−1)…(q−b+1)` assignments.
fn partition_max_sum(q: u128, n: usize) -> u128 {
    fn go(i: usize, n: usize, q: u128, sizes: &mut Vec<usize>, weight: u128, sum: &mut u128) {
        if i == n {
            *sum += weight * *sizes.iter().max().unwrap_or(&0) as u128;
            return;
        }
        for j in 0..sizes.len() {
            sizes[j] += 1;
            go(i + 1, n, q, sizes, weight, sum);
            sizes[j] -= 1;
        }
        let b = sizes.len() as u128;
        if b < q {
            sizes.push(1);
            go(i + 1, n, q, sizes, weight * (q - b), sum);
            sizes.pop();
        }
    }
    let mut sum = 0;
    go(0, n, q, &mut Vec::new(), 1, &mut sum);
    sum
}

fn criterion_1() -> Outcome {
    const LIMIT: u128 = 1_000_000;
    let start = Instant::now();
    let (mut cells, mut literal_cells, mut mismatches) = (0u64, 0u64, Vec::new());
    let mut check = |q: u128, n: usize| {
        let total = q.pow(n as u32);
        let exact = exact_max_load_expectation_with_cap(BinsQuery::new(q as u64, n as u64).unwrap(), u128::MAX)
            .expect("uncapped");
        let by_partition = big(partition_max_sum(q, n)) / big(total);
        let mut ok = exact == by_partition;
        if n >= 2 || q == 1 {
            literal_cells += 1;
            ok &= exact == big(literal_max_sum(q as usize, n)) / big(total);
        }
        cells += 1;
        if !ok && mismatches.len() < 5 {
            mismatches.push(format!("q={q} n={n}"));
        }
    };
    // q = 1 has q^n = 1 for every n; n is taken up to 64
    for n in 1..=64 {
        check(1, n);
    }
    for q in 2..=LIMIT {
        let mut n = 1;
        while q.pow(n as u32) <= LIMIT {
            check(q, n);
            n += 1;
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: mismatches.is_empty() && elapsed < Duration::from_secs(60),
        detail: format!(
            "{cells} cells ({literal_cells} by literal enumeration), {} mismatches {mismatches:?}, {:.1}s",
            mismatches.len(),
            elapsed.as_secs_f64()
        ),
    }
}

// ---------------------------------------------------------------- 2–4

fn exact(q: u64, n: u64) -> BigRational {
    exact_max_load_expectation_with_cap(BinsQuery::new(q, n).unwrap(), u128::MAX).unwrap()
}

/// `x ≥ 1` with `x ln x = c`, by bisection.
fn solve_xlogx(c: f64) -> f64 {
    if c <= 0.0 {
        return 1.0;
    }
    let (mut lo, mut hi) = (1.0f64, 2.0 + c);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * mid.ln() > c {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    let mut cases = 0;
    for q in 2..=24u64 {
        for n in 1..=24u64 {
            let (qf, nf) = (q as f64, n as f64);
            let x = solve_xlogx(qf * qf.ln() / (2.0 * nf));
            let bound = x * nf / (10.0 * qf);
            cases += 1;
            if exact(q, n) < nudged_up(bound) {
                bad.push((q, n));
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!("{cases} cells, violations {bad:?}"),
    }
}

fn criterion_3() -> Outcome {
    let usable = |q0: f64, n0: f64| q0.ln() / (120.0 * n0 * (q0 * q0.ln() / (2.0 * n0) + 1.0).ln());
    let mut bad = Vec::new();
    let mut cases = 0u64;
    for q in 2..=16u64 {
        for n in 1..=16u64 {
            let w = exact(q, n) / big(n as u128);
            for q0 in (2 * q..=32).map(|h| h as f64 / 2.0) {
                for n0 in (2 * n..=32).map(|h| h as f64 / 2.0) {
                    cases += 1;
                    if w < nudged_up(usable(q0, n0)) && bad.len() < 5 {
                        bad.push((q, n, q0, n0));
                    }
                }
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!("{cases} (q, n, q0, n0) points, violations {bad:?}"),
    }
}

fn criterion_4() -> Outcome {
    let mut table = BTreeMap::new();
    for q in 1..=12u64 {
        for n in 1..=12u64 {
            table.insert((q, n), exact(q, n));
        }
    }
    let mut bad = Vec::new();
    let mut cases = 0;
    for q in 1..=11u64 {
        for n in 1..=12u64 {
            if n >= 2 {
                cases += 1;
                let w = &table[&(q, n)] / big(n as u128);
                let w_prev = &table[&(q, n - 1)] / big(n as u128 - 1);
                if w > w_prev {
                    bad.push(format!("W({q},{n}) > W({q},{})", n - 1));
                }
            }
            cases += 1;
            if table[&(q + 1, n)] > table[&(q, n)] {
                bad.push(format!("E M({},{n}) > E M({q},{n})", q + 1));
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!("{cases} comparisons in n and q, violations {bad:?}"),
    }
}

// ---------------------------------------------------------------- 5–7

fn criterion_5() -> Outcome {
    let mut rng = substream(5, &[]);
    let samples = 600;
    let mut bad = Vec::new();
    for _ in 0..samples {
        let bins = rng.gen_range(2..=4usize);
        let n = rng.gen_range(1..=6u64);
        let mut weights: Vec<i64> = (0..bins).map(|_| rng.gen_range(0..=20)).collect();
        if weights.iter().all(|&w| w == 0) {
            weights[0] = 1;
        }
        let total: i64 = weights.iter().sum();
        let p: Vec<BigRational> = weights.iter().map(|&w| rat(w, total)).collect();
        let i = rng.gen_range(0..bins);
        let j = (i + rng.gen_range(1..bins)) % bins;
        let lambda = rat(rng.gen_range(0..=24), 24);
        let p2 = t_transform(&p, i, j, &lambda).unwrap();
        let before = multinomial_max_expectation(&MultinomialSpec::new(p, n).unwrap()).unwrap();
        let after = multinomial_max_expectation(&MultinomialSpec::new(p2, n).unwrap()).unwrap();
        if after > before {
            bad.push(format!("{weights:?}/{total} n={n} ({i},{j}) λ={lambda}"));
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!("{samples} sampled transforms, violations {bad:?}"),
    }
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let joint = check_joint_tail(&default_grids::joint_tail()).unwrap();
    let thinned = check_thinned_tail(&default_grids::thinned_tail()).unwrap();
    let elapsed = start.elapsed();
    Outcome {
        pass: joint.passed()
            && thinned.passed()
            && joint.cases > 0
            && thinned.cases > 0
            && elapsed < Duration::from_secs(120),
        detail: format!(
            "joint tail {} cases / {} violations, thinned tail {} cases / {} violations, {:.1}s",
            joint.cases,
            joint.violations,
            thinned.cases,
            thinned.violations,
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_7() -> Outcome {
    let s = check_stirling();
    let g = check_gautschi().unwrap();
    Outcome {
        pass: s.passed() && g.passed() && s.cases == 100,
        detail: format!(
            "Stirling {} x-values / {} violations, Gautschi {} pairs / {} violations",
            s.cases, s.violations, g.cases, g.violations
        ),
    }
}

// ---------------------------------------------------------------- 8

fn criterion_8() -> Outcome {
    let matching = Graph::from_pairs(12, (0..6).map(|i| (2 * i, 2 * i + 1))).unwrap();
    let k33 = Graph::from_pairs(6, (0..3).flat_map(|a| (3..6).map(move |b| (a, b)))).unwrap();
    let c8 = Graph::from_pairs(8, (0..8).map(|i| (i, (i + 1) % 8))).unwrap();
    let g1 = generate(Model::UniformM { n: 12, m: 20 }, 1).unwrap();
    let g2 = generate(Model::UniformM { n: 12, m: 20 }, 2).unwrap();
    let graphs = [("matching", matching), ("K_{3,3}", k33), ("C_8", c8), ("G(12,20)#1", g1), ("G(12,20)#2", g2)];
    let k = 8;
    let trials = 10_000u64;
    let mut pass = true;
    let mut parts = Vec::new();
    for (gi, (name, g)) in graphs.iter().enumerate() {
        let all: Vec<usize> = (0..g.vertex_count()).collect();
        let split = random_balanced_bipartition(g, &all, &mut substream(8, &[gi as u64])).unwrap();
        let q = part_count(all.len(), k);
        let e_ab = split.crossing;
        let w = w_with_cap(BinsQuery::new(q as u64, g.max_degree() as u64).unwrap(), u128::MAX)
            .unwrap()
            .to_f64()
            .unwrap();
        let (mut s1, mut s2) = (0.0f64, 0.0f64);
        for t in 0..trials {
            let mut rng = substream(8, &[gi as u64, t + 1]);
            let h = sample_candidate(g, &split.a, &split.b, q, &mut rng).h.edge_count() as f64;
            s1 += h;
            s2 += h * h;
        }
        let mean = s1 / trials as f64;
        let var = (s2 / trials as f64 - mean * mean).max(0.0) * trials as f64 / (trials - 1) as f64;
        let stderr = (var / trials as f64).sqrt();
        let target = e_ab as f64 * w;
        let ok = mean >= target - 4.0 * stderr;
        pass &= ok;
        parts.push(format!("{name}: mean {mean:.3} vs {target:.3} (se {stderr:.3})"));
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

// ---------------------------------------------------------------- 9, 12

struct ColourRun {
    r: usize,
    code: i32,
    success: bool,
    accepted_by_verifier: bool,
    stages: Vec<(String, usize, usize, BigRational)>,
    colours_used: usize,
}

fn random_model<R: Rng>(rng: &mut R) -> Model {
    match rng.gen_range(0..4) {
        0 => {
            let n = rng.gen_range(10..=2000usize);
            let max_m = (n * (n - 1) / 2).min(10_000);
            Model::UniformM {
                n,
                m: rng.gen_range(0..=max_m),
            }
        }
        1 => {
            let n = 2 * rng.gen_range(10..=1000usize);
            let d = rng.gen_range(1..=(20_000 / n).clamp(1, 10));
            Model::DRegular { n, d }
        }
        2 => {
            let stars = rng.gen_range(1..=50usize);
            Model::StarForest {
                stars,
                leaves: rng.gen_range(1..=(2000 / stars - 1).min(10_000 / stars)),
            }
        }
        _ => {
            let paths = rng.gen_range(1..=100usize);
            Model::PathUnion {
                paths,
                length: rng.gen_range(1..=2000 / paths),
            }
        }
    }
}

fn colour_runs() -> Vec<ColourRun> {
    let dir = tempfile::tempdir().unwrap();
    (0..100u64)
        .map(|i| {
            let mut rng = substream(9, &[i]);
            let model = random_model(&mut rng);
            let g = generate(model, i).unwrap();
            let input = dir.path().join(format!("g{i}.txt"));
            std::fs::write(&input, g.to_edge_list()).unwrap();
            let r = rng.gen_range(8..=64usize);
            let k = rng.gen_range(6..=64usize);
            let args = ColourArgs {
                input,
                output: Some(dir.path().join(format!("c{i}.txt"))),
                report: None,
                r,
                k,
                seed: i,
                trials: 50,
                beta0: (i % 2 == 1).then_some(0.5),
                exact_cap: 24,
                enforce_preconditions: false,
                inject_overspend: false,
            };
            let mut out = Vec::new();
            let code = cmd_colour(&args, Format::Json, &mut out).unwrap_or_else(|e| e.code);
            let json: serde_json::Value = serde_json::from_slice(&out).unwrap_or_default();
            let run = &json["run"];
            let stages = run["stages"]
                .as_array()
                .map(|a| {
                    a.iter()
                        .map(|s| {
                            let budget: BigRational = s["budget"].as_str().unwrap().parse().unwrap();
                            (
                                s["name"].as_str().unwrap().to_string(),
                                s["first_colour"].as_u64().unwrap() as usize,
                                s["colours_used"].as_u64().unwrap() as usize,
                                budget,
                            )
                        })
                        .collect()
                })
                .unwrap_or_default();
            let v = &json["verification"];
            ColourRun {
                r,
                code,
                success: run["success"].as_bool().unwrap_or(false),
                accepted_by_verifier: v["verdict"] == "pass"
                    && v["within_budget"] == true
                    && v["uncoloured_edges"] == 0
                    && v["foreign_edges"].as_array().is_some_and(|a| a.is_empty()),
                stages,
                colours_used: run["colours_used"].as_u64().unwrap_or(0) as usize,
            }
        })
        .collect()
}

fn criterion_9(runs: &[ColourRun], elapsed: Duration) -> Outcome {
    let successes = runs.iter().filter(|r| r.success).count();
    let agree = runs.iter().filter(|r| r.success).filter(|r| r.accepted_by_verifier).count();
    let codes_ok = runs.iter().all(|r| {
        let want = if r.success && r.accepted_by_verifier { EXIT_OK } else { EXIT_FAILED };
        r.code == want
    });
    Outcome {
        pass: runs.len() == 100 && agree == successes && codes_ok && elapsed < Duration::from_secs(600),
        detail: format!(
            "{} runs, {successes} reported success, {agree} of those accepted by the verifier, exit codes consistent: {codes_ok}, {:.1}s",
            runs.len(),
            elapsed.as_secs_f64()
        ),
    }
}

fn criterion_12(runs: &[ColourRun]) -> Outcome {
    let mut bad = Vec::new();
    let mut rounds = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.stages.is_empty() {
            bad.push(format!("run {i}: no report"));
            continue;
        }
        let r = big(run.r as u128);
        let mut next = 0;
        for (name, first, used, declared) in &run.stages {
            let limit = match name.as_str() {
                "low_degree" => &r / big(3),
                "initial_star" => &r / big(6),
                n if n.starts_with("round_") => {
                    rounds += 1;
                    let i: usize = n["round_".len()..].parse().unwrap();
                    &r * num_traits::pow(rat(2, 5), i) / big(6)
                }
                _ => declared.clone(),
            };
            if *declared > limit && !name.starts_with("endgame") {
                bad.push(format!("run {i}: {name} declares {declared} above {limit}"));
            }
            if big(*used as u128) > limit || *first != next {
                bad.push(format!("run {i}: {name} used {used} from {first}, limit {limit}"));
            }
            next += used;
        }
        if next != run.colours_used {
            bad.push(format!("run {i}: stages sum to {next}, report says {}", run.colours_used));
        }
    }
    // an injected overspend must surface as exit code 3
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.txt");
    std::fs::write(&input, "0 1\n1 2\n2 3\n").unwrap();
    let status = Process::new(env!("CARGO_BIN_EXE_pathfree"))
        .args(["colour", "--r", "8", "--k", "4", "--inject-overspend", "--input"])
        .arg(&input)
        .output()
        .unwrap()
        .status
        .code();
    let injected = status == Some(EXIT_INVARIANT);
    Outcome {
        pass: bad.is_empty() && injected,
        detail: format!(
            "{} runs, {rounds} round stages checked, violations {:?}, injected overspend exit {:?}",
            runs.len(),
            bad.iter().take(5).collect::<Vec<_>>(),
            status
        ),
    }
}

// ---------------------------------------------------------------- 10

/// Every component is a star (one vertex touches all its edges) and there
/// are at most `limit` components with edges.
fn is_star_forest(g: &Graph, limit: usize) -> bool {
    let comps: Vec<_> = components_of(g).into_iter().filter(|c| !c.edges.is_empty()).collect();
    comps.len() <= limit
        && comps.iter().all(|c| {
            c.edges.len() + 1 == c.order() && c.vertices.iter().any(|&v| c.edges.iter().all(|e| e.touches(v)))
        })
}

fn criterion_10() -> Outcome {
    let mut rng = substream(10, &[]);
    let instances = 1000;
    let mut cover_bad = 0;
    let mut degree_bad = 0;
    let mut budget_bad = 0;
    let mut path_bad = 0;
    let mut proper_bad = 0;
    let mut low_bad = 0;
    let (mut classes, mut literal_bad) = (0, 0);
    for i in 0..instances {
        let n = rng.gen_range(5..=60usize);
        let m = rng.gen_range(0..=n * (n - 1) / 2);
        let g = generate(Model::UniformM { n, m }, i).unwrap();
        let s = rng.gen_range(1..=8usize);
        let k = rng.gen_range(6..=40usize);
        let e = g.edge_count() as u128;

        let p = proper_edge_colouring(&g);
        if !p.is_proper() || p.len() != g.edge_count() || p.colours_used() > g.max_degree() + 1 {
            proper_bad += 1;
        }

        let r = rng.gen_range(4..=200usize);
        if let Ok(res) = vizing_type_refinement(&g, r, k, 0) {
            let rep = verify(&g.subtract(&res.residual).unwrap(), &res.colouring, usize::MAX, 4);
            if rep.verdict != Verdict::Pass || 3 * res.colours_used > r {
                low_bad += 1;
            }
        }

        let res = match star_colouring(&g, s, k, 0) {
            Ok(res) => res,
            Err(_) => {
                budget_bad += 1;
                continue;
            }
        };
        if (res.residual.max_degree() as u128) * (k * s) as u128 > 8 * e {
            degree_bad += 1;
        }
        if res.colours_used > s {
            budget_bad += 1;
        }
        let coloured = g.subtract(&res.residual).unwrap();
        if verify(&coloured, &res.colouring, usize::MAX, k).verdict != Verdict::Pass {
            path_bad += 1;
        }
        let centres = match &res.detail {
            RefinementDetail::Star { centres, .. } => centres,
            _ => unreachable!("star colouring reports centres"),
        };
        let cap = star_part_capacity(k);
        for (c, edges) in res.colouring.classes() {
            classes += 1;
            let class = Graph::from_edges(g.vertex_count(), edges.iter().copied()).unwrap();
            if !is_star_forest(&class, cap) {
                literal_bad += 1;
            }
            let cover = &centres[c];
            if cover.len() > cap || !edges.iter().all(|e| cover.iter().any(|&v| e.touches(v))) {
                cover_bad += 1;
            }
        }
    }
    let structural = cover_bad + degree_bad + budget_bad + path_bad + proper_bad + low_bad;
    Outcome {
        pass: structural == 0 && literal_bad == 0,
        detail: format!(
            "{instances} instances: residual degree {degree_bad}, budget {budget_bad}, centre cover {cover_bad}, \
             path-free {path_bad}, proper colouring {proper_bad}, low-degree refinement {low_bad} violations; \
             literal star forests: {} of {classes} classes are not",
            literal_bad
        ),
    }
}

// ---------------------------------------------------------------- 11

/// Longest simple path (vertex count) in the graph given by adjacency
/// bitmasks, by exhaustive search.
fn brute_longest(adj: &[u32]) -> usize {
    fn dfs(v: usize, used: u32, adj: &[u32]) -> usize {
        let mut best = 1;
        let mut next = adj[v] & !used;
        while next != 0 {
            let w = next.trailing_zeros() as usize;
            next &= next - 1;
            best = best.max(1 + dfs(w, used | (1 << w), adj));
        }
        best
    }
    (0..adj.len())
        .filter(|&v| adj[v] != 0)
        .map(|v| dfs(v, 1 << v, adj))
        .max()
        .unwrap_or(0)
}

fn criterion_11() -> Outcome {
    let mut cases = 0u64;
    let mut disagreements = Vec::new();
    for n in 1..=7usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0u32..(1 << pairs.len()) {
            let mut rng = substream(11, &[n as u64, mask as u64]);
            let mut adj = [[0u32; 7]; 2];
            let mut col = EdgeColouring::new();
            let mut edges = Vec::new();
            for (b, &(u, v)) in pairs.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    let c = rng.gen_range(0..2usize);
                    adj[c][u] |= 1 << v;
                    adj[c][v] |= 1 << u;
                    col.assign(Edge::new(u, v), c).unwrap();
                    edges.push((u, v));
                }
            }
            let g = Graph::from_pairs(n, edges).unwrap();
            let longest = brute_longest(&adj[0][..n]).max(brute_longest(&adj[1][..n]));
            let ks: Vec<usize> = if n <= 6 {
                (2..=n + 1).collect()
            } else {
                vec![rng.gen_range(2..=8)]
            };
            for k in ks {
                cases += 1;
                let rep = verify(&g, &col, 2, k);
                let want = if longest >= k { Verdict::Fail } else { Verdict::Pass };
                let witness_ok = rep.failures.iter().all(|w| {
                    w.path.len() >= k
                        && w.path.windows(2).all(|p| col.colour_of(&Edge::new(p[0], p[1])) == Some(w.colour))
                        && {
                            let mut seen = w.path.clone();
                            seen.sort_unstable();
                            seen.dedup();
                            seen.len() == w.path.len()
                        }
                });
                if rep.verdict != want || !witness_ok {
                    if disagreements.len() < 5 {
                        disagreements.push(format!("n={n} mask={mask} k={k}"));
                    }
                }
            }
        }
    }
    Outcome {
        pass: disagreements.is_empty() && cases >= 10_000,
        detail: format!("{cases} cases, disagreements {disagreements:?}"),
    }
}

// ---------------------------------------------------------------- main

fn main() {
    let mut results: Vec<(usize, &str, Outcome, Duration)> = Vec::new();
    let mut timed = |id: usize, title: &'static str, f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let out = f();
        let line = (id, title, out, start.elapsed());
        println!("{}", render(&line));
        results.push(line);
    };
    timed(1, "exact oracle equals full enumeration", &criterion_1);
    timed(2, "unified lower bound on E M", &criterion_2);
    timed(3, "usable lower bound on W", &criterion_3);
    timed(4, "monotonicity of W in n and E M in q", &criterion_4);
    timed(5, "T-transforms never increase E max", &criterion_5);
    timed(6, "joint-tail and thinned-tail inequalities", &criterion_6);
    timed(7, "Stirling and Gautschi brackets of Gamma", &criterion_7);
    timed(8, "mean e(H) against e(A,B)·W(q, Δ)", &criterion_8);
    let start = Instant::now();
    let runs = colour_runs();
    let elapsed = start.elapsed();
    timed(9, "end-to-end soundness of colour runs", &|| criterion_9(&runs, elapsed));
    timed(10, "star and low-degree colouring postconditions", &criterion_10);
    timed(11, "verifier agrees with brute force on small graphs", &criterion_11);
    timed(12, "stage colour budgets", &|| criterion_12(&runs));

    results.sort_by_key(|r| r.0);
    let mut unexpected = 0;
    for (id, _, out, _) in &results {
        if out.pass {
            continue;
        }
        match KNOWN_FAILURES.iter().find(|(k, _)| k == id) {
            Some((_, why)) => println!("criterion {id:>2} known failure: {why}"),
            None => unexpected += 1,
        }
    }
    let passed = results.iter().filter(|r| r.2.pass).count();
    println!("acceptance: {passed}/{} criteria pass, {unexpected} unexpected failures", results.len());
    if unexpected > 0 {
        std::process::exit(1);
    }
}

fn render((id, title, out, took): &(usize, &str, Outcome, Duration)) -> String {
    format!(
        "criterion {id:>2} {}: {title} [{}] ({:.1}s)",
        if out.pass { "PASS" } else { "FAIL" },
        out.detail,
        took.as_secs_f64()
    )
}
