//! One line per acceptance criterion. Runs as a plain binary so that the
//! report prints in order; a failed criterion makes the target fail.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use projlab::continuum::{
    atomic_attainment_check, duality_ladder, esssup_attainment_check, extract_coding,
    piecewise_copy, q_norm, refined_min_projection, synthesize, wstar_obstruction_certificate,
    AtomicMeasure, LadderEvidence, ObstructionVerdict, PiecewiseLinear, Verdict,
};
use projlab::duplication::{duplicate_subspace, pushforward_projection};
use projlab::families::{
    beta_bruteforce, beta_closed, builtin_registry, c_n, c_n_telescoped, dihedral_orbit,
    find_entry, invert_rho2, rho2_ratio, rho_even, validate_family_entry, PointStatus, RootValue,
    ValidationOptions,
};
use projlab::lp::Mode;
use projlab::shell::{results_json, run, ProblemFile, Store};
use projlab::{projection_norm, solve_min_projection, Rational, SubspaceL1};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let t = start.elapsed();
    ensure!(t <= limit, "took {:.1}s, limit {}s", t.as_secs_f64(), limit.as_secs());
    Ok(t)
}

fn combinatorics() -> Outcome {
    let start = Instant::now();
    for n in (2..=14).step_by(2) {
        let (a, b) = (beta_closed(n).map_err(err)?, beta_bruteforce(n).map_err(err)?);
        ensure!(a == b, "beta_{n}: closed {a} != enumerated {b}");
    }
    for n in (2..=40).step_by(2) {
        ensure!(c_n(n).map_err(err)? == c_n_telescoped(n).map_err(err)?, "C_{n} forms differ");
    }
    let t = within(Duration::from_secs(60), start)?;
    Ok(format!("n <= 14 enumerated, n <= 40 telescoped, {:.2}s", t.as_secs_f64()))
}

fn spot_values() -> Outcome {
    for (n, v) in [(2, "1"), (4, "3/2"), (6, "15/8")] {
        let b = beta_bruteforce(n).map_err(err)?;
        ensure!(b == q(v), "beta_{n} = {b}, expected {v}");
        ensure!(beta_closed(n).map_err(err)? == b, "closed beta_{n} disagrees");
    }
    let r0 = rho_even(4, &q("0")).map_err(err)?;
    ensure!(r0 == beta_closed(4).map_err(err)?, "rho_4(0) = {r0}");
    let far = rho_even(4, &q("1000000")).map_err(err)?.to_f64();
    ensure!((far - 1.0).abs() <= 1e-4, "rho_4(10^6) = {far}");
    Ok(format!("beta_2,4,6 = 1, 3/2, 15/8; rho_4(0) = 3/2; rho_4(1e6) - 1 = {:.2e}", far - 1.0))
}

fn codim2_range() -> Outcome {
    let two = q("2");
    let mut accepted = 0;
    let mut checked = 0;
    for den in 1..=60i64 {
        for num in -den..=3 * den {
            let r = Rational::frac(num, den);
            let expected = r > Rational::one() && (&two * &r - Rational::one()).square() <= two;
            let got = invert_rho2(&r);
            ensure!(got.is_ok() == expected, "r = {r}: accepted {} but expected {expected}", got.is_ok());
            if let Ok(inv) = got {
                for root in &inv.roots {
                    if let RootValue::Exact(t) = root {
                        ensure!(rho2_ratio(t) == r, "rho({t}) != {r}");
                    }
                }
                accepted += 1;
            }
            checked += 1;
        }
    }
    let inv = invert_rho2(&q("6/5")).map_err(err)?;
    ensure!(
        inv.roots == vec![RootValue::Exact(q("1/3")), RootValue::Exact(q("1/2"))],
        "6/5 roots {:?}",
        inv.roots
    );
    // 11/5 in (2, (3+sqrt2)/2]: 11/5 - 3/2 = 7/10 and (7/10)^2 <= 1/2.
    let l = q("11/5");
    let s = &l - q("3/2");
    ensure!(l > two && s.square() <= q("1/2"), "11/5 outside the codim-2 window");
    Ok(format!("{checked} rationals p/q (q <= 60), {accepted} accepted; 6/5 -> {{1/3, 1/2}}; 11/5 in window"))
}

fn lp_ground_truth() -> Outcome {
    let start = Instant::now();
    for (k, n) in [(1, 2), (2, 3), (3, 6)] {
        let r = solve_min_projection(&SubspaceL1::coordinate(k, n).map_err(err)?, false).map_err(err)?;
        ensure!(r.value == Rational::one(), "coordinate ({k},{n}): {}", r.value);
    }
    for n in [2, 4, 8] {
        let r = solve_min_projection(&SubspaceL1::all_ones(n).map_err(err)?, false).map_err(err)?;
        ensure!(r.value == Rational::one(), "all-ones {n}: {}", r.value);
    }
    let axis = solve_min_projection(&SubspaceL1::coordinate(1, 2).map_err(err)?, true).map_err(err)?;
    ensure!(axis.unique == Some(false), "span{{e1}} unique = {:?}", axis.unique);
    let diag = solve_min_projection(&SubspaceL1::all_ones(2).map_err(err)?, true).map_err(err)?;
    ensure!(diag.unique == Some(true), "span{{(1,1)}} unique = {:?}", diag.unique);
    let t = within(Duration::from_secs(10), start)?;
    Ok(format!("all values 1, uniqueness false/true, {:.2}s", t.as_secs_f64()))
}

fn random_subspaces(count: usize, seed: u64) -> Vec<SubspaceL1> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let vectors: Vec<Vec<Rational>> = (0..2)
            .map(|_| {
                (0..4)
                    .map(|_| Rational::frac(rng.random_range(-4..=4), rng.random_range(1..=3)))
                    .collect()
            })
            .collect();
        if let Ok(v) = SubspaceL1::from_vectors(&vectors) {
            out.push(v);
        }
    }
    out
}

const SEED: u64 = 20_241_014;

fn duplication_invariance() -> Outcome {
    let start = Instant::now();
    let subspaces = random_subspaces(20, SEED);
    for (i, v) in subspaces.iter().enumerate() {
        let r = solve_min_projection(v, false).map_err(err)?;
        for m in [2, 3] {
            let d = solve_min_projection(&duplicate_subspace(v, m).map_err(err)?, false).map_err(err)?;
            ensure!(d.value == r.value, "subspace {i}, m = {m}: {} != {}", d.value, r.value);
            let pf = pushforward_projection(&r.optimal, m).map_err(err)?;
            ensure!(projection_norm(&pf) == r.value, "subspace {i}, m = {m}: pushforward norm changed");
        }
    }
    let t = within(Duration::from_secs(300), start)?;
    Ok(format!("20 random 2-dim subspaces of l1^4 (seed {SEED}), m in {{2,3}}, {:.1}s", t.as_secs_f64()))
}

fn suite() -> Vec<(String, SubspaceL1)> {
    let mut s: Vec<(String, SubspaceL1)> = vec![
        ("span{(1,1)}".into(), SubspaceL1::all_ones(2).unwrap()),
        ("span{e1} in l1^2".into(), SubspaceL1::coordinate(1, 2).unwrap()),
        ("span{e1,e2} in l1^3".into(), SubspaceL1::coordinate(2, 3).unwrap()),
        ("span{(1,0,1),(0,1,1)}".into(), SubspaceL1::from_i64_vectors(&[&[1, 0, 1], &[0, 1, 1]]).unwrap()),
        (
            "span{(1,2,0,-1),(0,1,3,1)}".into(),
            SubspaceL1::from_i64_vectors(&[&[1, 2, 0, -1], &[0, 1, 3, 1]]).unwrap(),
        ),
        ("span{e1,e2,e3,e4} in l1^5".into(), SubspaceL1::coordinate(4, 5).unwrap()),
        ("V_(2,1)".into(), dihedral_orbit(&q("2"), &q("1")).unwrap()),
    ];
    for (i, v) in random_subspaces(5, SEED).into_iter().enumerate() {
        s.push((format!("random #{i}"), v));
    }
    s
}

fn transfer_consistency() -> Outcome {
    let suite = suite();
    for (name, v) in &suite {
        let base = solve_min_projection(v, false).map_err(err)?;
        for m in [1, 2, 3] {
            let r = refined_min_projection(&base, m, false).map_err(err)?;
            let basis = piecewise_copy(v, m).map_err(err)?;
            let c = extract_coding(&r.result, &basis.partition).map_err(err)?;
            let qn = q_norm(&c, &basis).map_err(err)?;
            ensure!(qn == r.result.value, "{name}, m = {m}: q_norm {qn} != LP {}", r.result.value);
            ensure!(qn == base.value, "{name}, m = {m}: {qn} != level-1 value {}", base.value);
        }
    }
    Ok(format!("{} subspaces, m in {{1,2,3}}, q_norm = LP value exactly", suite.len()))
}

fn wstar_obstruction() -> Outcome {
    let mut count = 0;
    for (name, v) in suite().iter().filter(|(_, v)| v.dim() >= 2) {
        let cert = wstar_obstruction_certificate(v).map_err(err)?;
        ensure!(cert.verdict == ObstructionVerdict::ObstructionHolds, "{name}: {:?}", cert.verdict);
        ensure!(cert.samples.iter().all(|s| s.rank <= 1), "{name}: sampled rank > 1");
        count += 1;
    }
    let line = wstar_obstruction_certificate(&SubspaceL1::all_ones(3).map_err(err)?).map_err(err)?;
    ensure!(line.verdict == ObstructionVerdict::NoObstruction, "all-ones: {:?}", line.verdict);
    let c = line.witness.clone().ok_or("no witness coding")?;
    ensure!(&c * &line.integrals[0] == Rational::one(), "c w = {}", &c * &line.integrals[0]);
    Ok(format!("{count} subspaces of dim >= 2 obstructed; all-ones line coded by c = {c}"))
}

fn sandwich() -> Outcome {
    let reg = builtin_registry();
    let coord = find_entry(&reg, "coordinate").ok_or("no coordinate entry")?;
    let point = coord
        .grid
        .iter()
        .find(|p| p["k"] == q("2"))
        .ok_or("no 2-dimensional coordinate point")?
        .clone();
    let report = validate_family_entry(coord, std::slice::from_ref(&point), &ValidationOptions::default());
    ensure!(report.accepted, "registry point k = 2, N = 3 not validated");
    let cases = [
        ("span{(1,1)}", SubspaceL1::all_ones(2).map_err(err)?),
        ("coordinate k=2 N=3", coord.construct(&point).map_err(err)?),
    ];
    let deltas = [q("1/16"), q("1/64"), q("1/256")];
    let mut summary = Vec::new();
    for (name, v) in cases {
        let r = solve_min_projection(&v, false).map_err(err)?;
        let rep = synthesize(&r, &deltas).map_err(err)?;
        for row in &rep.rows {
            ensure!(row.lower_bound_holds, "{name}, delta {}: q_norm {} < lambda", row.delta, row.q_norm);
            ensure!(row.biorthogonal && row.continuous, "{name}, delta {}: not a continuous coding", row.delta);
        }
        ensure!(rep.monotone, "{name}: gaps not decreasing");
        let last = rep.rows.last().ok_or("no rows")?;
        ensure!(last.gap <= q("1/10"), "{name}: gap {} at 1/256", last.gap);
        summary.push(format!(
            "{name}: gaps at 1/16, 1/64, 1/256 = {}",
            rep.rows.iter().map(|r| format!("{:.4}", r.gap_float)).collect::<Vec<_>>().join(", ")
        ));
    }
    Ok(summary.join("; "))
}

fn ladder_and_attainment() -> Outcome {
    let lines = [
        SubspaceL1::all_ones(2),
        SubspaceL1::all_ones(5),
        SubspaceL1::coordinate(1, 3),
        SubspaceL1::from_i64_vectors(&[&[1, -2, 3, 0]]),
        SubspaceL1::from_vectors(&[vec![q("1/2"), q("-1/3"), q("5")]]),
    ];
    for v in lines {
        let v = v.map_err(err)?;
        let r = solve_min_projection(&v, false).map_err(err)?;
        ensure!(r.value == Rational::one(), "1-dim W with lambda {}", r.value);
        let l = duality_ladder(&r.value, 1, LadderEvidence::default(), &[]);
        ensure!(l.y_value == q("2") && l.bounds_ok, "y = {}", l.y_value);
    }
    let example = atomic_attainment_check(&AtomicMeasure::hyperplane_example(10)).map_err(err)?;
    ensure!(example.verdict == Verdict::NotAttained, "example measure: {:?}", example.verdict);
    let finite = AtomicMeasure {
        atoms: vec![(q("0"), q("1/4")), (q("1/3"), q("1/2")), (q("1"), q("1/4"))],
        tail: None,
    };
    ensure!(
        atomic_attainment_check(&finite).map_err(err)?.verdict == Verdict::Attained,
        "finite positive measure not attained"
    );
    let t = esssup_attainment_check(&PiecewiseLinear::identity());
    ensure!(t.verdict == Verdict::NotAttained, "f(t) = t: {:?}", t.verdict);
    Ok("5 lines give lambda(Y) = 2; example measure not attained; finite atoms attained; f(t) = t not attained".into())
}

fn registry_honesty() -> Outcome {
    let reg = builtin_registry();
    let opts = ValidationOptions::default();
    let planted = find_entry(&reg, "planted-wrong-diagonal").ok_or("no planted entry")?;
    let rep = validate_family_entry(planted, &planted.grid, &opts);
    ensure!(!rep.accepted, "planted entry accepted");
    ensure!(rep.points.iter().all(|p| p.status == PointStatus::Rejected), "planted point not rejected");
    let coord = find_entry(&reg, "coordinate").ok_or("no coordinate entry")?;
    let rep = validate_family_entry(coord, &coord.grid, &opts);
    ensure!(rep.accepted, "coordinate entry rejected: {:?}", rep.points);
    let even = find_entry(&reg, "regular-even").ok_or("no regular-even entry")?;
    let rep_even = validate_family_entry(even, &even.grid, &opts);
    ensure!(!rep_even.confirms_formula, "unavailable basis reported as confirming");
    let two = find_entry(&reg, "regular-2d").ok_or("no regular-2d entry")?;
    let rep_two = validate_family_entry(two, &two.grid, &opts);
    Ok(format!(
        "planted rejected (LP 1 vs target 2); coordinate accepted at {} points; reconstructed V_(a,b) confirms = {}; even family unavailable",
        rep.points.len(),
        rep_two.confirms_formula
    ))
}

fn determinism() -> Outcome {
    let problems = [
        r#"{"schema_version":1,"ambient_dim":2,"basis":[["1","1"]],"analyses":["solve","probe","dup-scan","coding","obstruct","ladder","synth"]}"#,
        r#"{"schema_version":1,"ambient_dim":4,"basis":[["1","2","0","-1"],["0","1","3","1"]],"analyses":["solve","probe","dup-scan","coding","obstruct"]}"#,
        r#"{"schema_version":1,"family":{"name":"regular-2d","params":{"a":"2","b":"1"}},"analyses":["solve","coding","synth"],"deltas":["1/64","1/256"]}"#,
        r#"{"schema_version":1,"ambient_dim":3,"basis":[["1","0","0"],["0","1","0"]],"analyses":["solve","synth"]}"#,
    ];
    for text in problems {
        let p = ProblemFile::parse(text).map_err(err)?;
        let dir_a = tempfile::tempdir().map_err(err)?;
        let dir_b = tempfile::tempdir().map_err(err)?;
        let store_a = Store::open(dir_a.path()).map_err(err)?;
        let store_b = Store::open(dir_b.path()).map_err(err)?;
        let first = run(&p, Mode::Exact, Some(&store_a)).map_err(err)?;
        let again = run(&p, Mode::Exact, Some(&store_a)).map_err(err)?;
        ensure!(again.from_store && again.json == first.json, "stored record differs");
        let fresh = run(&p, Mode::Exact, Some(&store_b)).map_err(err)?;
        ensure!(!fresh.from_store, "second store unexpectedly warm");
        ensure!(
            results_json(&fresh.record) == results_json(&first.record)
                && fresh.record.problem_hash == first.record.problem_hash,
            "independent recomputation differs"
        );
        ensure!(first.record.exit_code() == 0, "analysis failed: {}", first.json);
    }
    Ok(format!("{} problem files: cached reruns byte-identical, fresh recomputations identical", problems.len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("combinatorics exactness", combinatorics),
        ("spot values", spot_values),
        ("codim-2 range arithmetic", codim2_range),
        ("LP ground truth", lp_ground_truth),
        ("duplication invariance", duplication_invariance),
        ("transfer consistency", transfer_consistency),
        ("weak* obstruction", wstar_obstruction),
        ("synthesizer sandwich", sandwich),
        ("ladder and attainment", ladder_and_attainment),
        ("registry honesty", registry_honesty),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
