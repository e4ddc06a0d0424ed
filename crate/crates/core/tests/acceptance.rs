//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use alexander_core::cli::corpus;
use alexander_core::cli::parse::parse_curve;
use alexander_core::laurent::{divide_exact_by_tprod_minus_one, specialize_diagonal};
use alexander_core::pipeline::{
    alexander_via_dimensions, alexander_via_euler, analyze, build_engine, AnalysisReport,
};
use alexander_core::{BranchParam, Config, Curve, FiltrationEngine, LaurentPoly, Rat};
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config as RunnerConfig, TestRunner};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const CORPUS: &[&str] = &[
    "node",
    "cusp",
    "smooth",
    "tacnode",
    "cusp-plus-line",
    "e8",
    "two46",
];

fn load(name: &str) -> Curve {
    let text = corpus::source(name).expect("corpus entry");
    Curve::validate(parse_curve(text).expect("corpus parses")).expect("corpus validates")
}

fn report(name: &str, order: Option<u32>) -> AnalysisReport {
    let config = Config {
        order,
        ..Config::default()
    };
    analyze(&load(name), &config).expect("analysis succeeds")
}

fn engine(curve: &Curve) -> FiltrationEngine {
    build_engine(curve, &Config::default()).expect("engine builds")
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    if spent > limit {
        Err(format!("took {spent:?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

// ---- oracles -------------------------------------------------------------

/// Dense coefficients of `p` up to t^n.
fn dense(p: &alexander_core::UniPoly, n: usize) -> Vec<Rat> {
    (0..=n).map(|k| p.coeff(k as u32)).collect()
}

fn mul_trunc(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len();
    let mut out = vec![Rat::zero(); n];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Images x^a*y^b on a branch for all a+b <= d, truncated at t^n.
fn monomial_images(b: &BranchParam, d: usize, n: usize) -> Vec<Vec<Rat>> {
    let x = dense(&b.x, n);
    let y = dense(&b.y, n);
    let mut one = vec![Rat::zero(); n + 1];
    one[0] = Rat::one();
    let mut xp = vec![one.clone()];
    let mut yp = vec![one];
    for k in 1..=d {
        xp.push(mul_trunc(&xp[k - 1], &x));
        yp.push(mul_trunc(&yp[k - 1], &y));
    }
    let mut out = Vec::new();
    for deg in 0..=d {
        for a in 0..=deg {
            out.push(mul_trunc(&xp[a], &yp[deg - a]));
        }
    }
    out
}

/// Plain Gaussian elimination; returns the reduced rows (echelon form).
fn echelon(mut rows: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = Rat::one() / rows[rank][col].clone();
        for e in rows[rank].iter_mut() {
            *e *= inv.clone();
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                let pivot = rows[rank].clone();
                for (e, pv) in rows[r].iter_mut().zip(pivot) {
                    *e -= f.clone() * pv;
                }
            }
        }
        rank += 1;
    }
    rows.truncate(rank);
    rows
}

fn rank(rows: Vec<Vec<Rat>>) -> usize {
    echelon(rows).len()
}

/// Rows of the evaluation matrix: one per monomial, columns are the listed
/// (branch, t-power) pairs.
fn evaluation_rows(curve: &Curve, cols: &[(usize, usize)], degree: usize) -> Vec<Vec<Rat>> {
    let n = cols.iter().map(|c| c.1).max().unwrap_or(0);
    let images: Vec<Vec<Vec<Rat>>> = curve
        .branches()
        .iter()
        .map(|b| monomial_images(b, degree, n))
        .collect();
    let nmono = images[0].len();
    (0..nmono)
        .map(|m| cols.iter().map(|&(i, k)| images[i][m][k].clone()).collect())
        .collect()
}

/// Degree past which every monomial has order > v_i on every branch.
fn safe_degree(curve: &Curve, v: &[i64]) -> usize {
    curve
        .multiplicities()
        .iter()
        .zip(v)
        .map(|(&m, &vi)| (vi.max(0) as usize) / m as usize)
        .max()
        .unwrap_or(0)
}

/// Codimension of J(v) by a fresh rank computation.
fn naive_hilbert(curve: &Curve, v: &[i64]) -> usize {
    let cols: Vec<(usize, usize)> = v
        .iter()
        .enumerate()
        .flat_map(|(i, &vi)| (0..vi.max(0) as usize).map(move |k| (i, k)))
        .collect();
    if cols.is_empty() {
        return 0;
    }
    rank(evaluation_rows(curve, &cols, safe_degree(curve, v)))
}

/// Values of a single branch up to `n` by collecting orders of an
/// order-echelonized span of monomial images.
fn branch_values(b: &BranchParam, n: usize) -> BTreeSet<usize> {
    let m = b.multiplicity().expect("nondegenerate") as usize;
    let rows = monomial_images(b, n / m, n);
    echelon(rows)
        .iter()
        .filter_map(|row| row.iter().position(|c| !c.is_zero()))
        .collect()
}

/// Knot polynomial (1-t)*sum_{s in S} t^s for a semigroup with conductor c.
fn knot_from_values(values: &BTreeSet<usize>, c: usize) -> LaurentPoly {
    let ind: Vec<i64> = (0..=c + 1).map(|k| values.contains(&k) as i64).collect();
    let mut coeffs = vec![0i64; c + 2];
    for k in 0..=c + 1 {
        coeffs[k] = ind[k] - if k > 0 { ind[k - 1] } else { 0 };
    }
    LaurentPoly::from_dense(&coeffs)
}

/// Two smooth transversal-or-tangent branches meeting with multiplicity k:
/// ((t1 t2)^k - 1)/(t1 t2 - 1).
fn two_smooth_branches(k: i64) -> LaurentPoly {
    LaurentPoly::from_terms(2, (0..k).map(|j| (vec![j, j], 1)))
}

/// Leading-coefficient space C(v) as a basis of row vectors in Q^r.
fn lead_space(curve: &Curve, v: &[i64]) -> Vec<Vec<Rat>> {
    let r = v.len();
    let mut cols: Vec<(usize, usize)> = v
        .iter()
        .enumerate()
        .flat_map(|(i, &vi)| (0..vi as usize).map(move |k| (i, k)))
        .collect();
    let vanish = cols.len();
    cols.extend((0..r).map(|i| (i, v[i] as usize)));
    let degree = curve
        .multiplicities()
        .iter()
        .zip(v)
        .map(|(&m, &vi)| vi as usize / m as usize)
        .max()
        .unwrap_or(0);
    echelon(evaluation_rows(curve, &cols, degree))
        .into_iter()
        .filter(|row| row[..vanish].iter().all(Zero::is_zero))
        .map(|row| row[vanish..].to_vec())
        .collect()
}

fn column_rank(basis: &[Vec<Rat>], set: &BTreeSet<usize>) -> usize {
    if set.is_empty() {
        return 0;
    }
    let rows: Vec<Vec<Rat>> = set
        .iter()
        .map(|&i| basis.iter().map(|b| b[i].clone()).collect())
        .collect();
    rank(rows)
}

/// Euler characteristic of P(C(v)) minus the coordinate hyperplanes, from
/// the Möbius function of the intersection lattice.
fn arrangement_euler(curve: &Curve, v: &[i64]) -> i64 {
    let r = v.len();
    let basis = lead_space(curve, v);
    let c = basis.len();
    if c == 0 {
        return 0;
    }
    // a coordinate vanishing on all of C(v) empties the complement
    if (0..r).any(|i| basis.iter().all(|b| b[i].is_zero())) {
        return 0;
    }
    let rk = |s: &BTreeSet<usize>| column_rank(&basis, s);
    // flats, keyed by the closed set of hyperplanes containing them
    let mut flats: BTreeMap<BTreeSet<usize>, usize> = BTreeMap::new();
    for mask in 0u32..(1 << r) {
        let s: BTreeSet<usize> = (0..r).filter(|i| mask >> i & 1 == 1).collect();
        let k = rk(&s);
        let closure: BTreeSet<usize> = (0..r)
            .filter(|&j| {
                let mut t = s.clone();
                t.insert(j);
                rk(&t) == k
            })
            .collect();
        flats.insert(closure, c - k);
    }
    let mut order: Vec<(&BTreeSet<usize>, &usize)> = flats.iter().collect();
    order.sort_by_key(|(s, _)| s.len());
    let mut mu: BTreeMap<BTreeSet<usize>, i64> = BTreeMap::new();
    for (s, _) in &order {
        let below: i64 = mu
            .iter()
            .filter(|(t, _)| t.len() < s.len() && t.is_subset(s))
            .map(|(_, m)| *m)
            .sum();
        let value = if s.is_empty() { 1 } else { -below };
        mu.insert((*s).clone(), value);
    }
    // chi_A(q) = sum mu(X) q^dim X = (q-1) P(q); the projective complement has chi = P(1)
    order.iter().map(|(s, d)| mu[*s] * **d as i64).sum()
}

fn semigroup_indicator(generators: &[usize], upto: usize) -> Vec<i64> {
    let mut ind = vec![0i64; upto + 1];
    ind[0] = 1;
    for k in 1..=upto {
        ind[k] = generators
            .iter()
            .any(|&g| g <= k && ind[k - g] == 1) as i64;
    }
    ind
}

// ---- criteria ------------------------------------------------------------

fn node() -> Outcome {
    let start = Instant::now();
    let curve = load("node");
    let rep = report("node", None);
    ensure!(rep.alexander == LaurentPoly::one(2), "alexander = {}", rep.alexander);
    ensure!(
        rep.p_prime.as_ref() == Some(&LaurentPoly::tprod_minus_one(2)),
        "P' = {:?}",
        rep.p_prime.as_ref().map(ToString::to_string)
    );
    ensure!(rep.delta == [1, 1], "delta = {:?}", rep.delta);
    let e = engine(&curve);
    for (v, h) in [([1, 1], 1), ([2, 1], 2), ([1, 2], 2), ([2, 2], 3)] {
        let got = e.hilbert(&v).map_err(|x| x.to_string())?;
        ensure!(got == h, "h{v:?} = {got}, expected {h}");
        ensure!(naive_hilbert(&curve, &v) == h as usize, "oracle disagrees at {v:?}");
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!("alexander 1, P' {}, h table matches", rep.p_prime.unwrap()))
}

fn cusp() -> Outcome {
    let start = Instant::now();
    let rep = report("cusp", Some(12));
    let expect = semigroup_indicator(&[2, 3], 12);
    ensure!(rep.zeta == expect, "zeta window {:?}", rep.zeta);
    ensure!(
        rep.alexander == LaurentPoly::from_dense(&[1, -1, 1]),
        "knot polynomial {}",
        rep.alexander
    );
    ensure!(rep.branches[0].generators == [2, 3], "generators {:?}", rep.branches[0].generators);
    ensure!(rep.branches[0].conductor == 2, "conductor {}", rep.branches[0].conductor);
    let values = branch_values(&load("cusp").branches()[0], 12);
    let collected: Vec<i64> = (0..=12).map(|k| values.contains(&k) as i64).collect();
    ensure!(collected == expect, "value collection disagrees");
    within(start, Duration::from_secs(1))?;
    Ok(format!("knot {}, zeta to t^12 is the <2,3> indicator", rep.alexander))
}

fn smooth() -> Outcome {
    let start = Instant::now();
    let rep = report("smooth", Some(12));
    ensure!(rep.zeta == vec![1; 13], "zeta window {:?}", rep.zeta);
    ensure!(rep.alexander == LaurentPoly::one(1), "knot polynomial {}", rep.alexander);
    within(start, Duration::from_secs(1))?;
    Ok("zeta all ones to t^12, knot 1".into())
}

fn two46() -> Outcome {
    let start = Instant::now();
    let rep = report("two46", Some(20));
    let b = &rep.branches[0];
    ensure!(b.generators == [4, 6, 13], "generators {:?}", b.generators);
    ensure!(b.conductor == 16, "conductor {}", b.conductor);
    let curve = load("two46");
    let sg = curve.semigroup(0);
    ensure!(sg.gaps().len() == 8 && sg.is_symmetric(), "gaps {:?}", sg.gaps());
    let values = branch_values(&curve.branches()[0], 20);
    let oracle: Vec<i64> = (0..=20).map(|k| values.contains(&k) as i64).collect();
    ensure!(rep.zeta == oracle, "zeta {:?} vs values {:?}", rep.zeta, oracle);
    ensure!(
        oracle == semigroup_indicator(&[4, 6, 13], 20),
        "value collection is not <4,6,13>"
    );
    let knot = knot_from_values(&values, 16);
    ensure!(rep.alexander == knot, "knot {} vs {}", rep.alexander, knot);
    within(start, Duration::from_secs(5))?;
    Ok(format!("<4,6,13>, c = 16, 8 gaps, knot {}", rep.alexander))
}

fn routes_agree() -> Outcome {
    let start = Instant::now();
    for name in CORPUS {
        let curve = load(name);
        let e = engine(&curve);
        let d = alexander_via_dimensions(&e).map_err(|x| format!("{name}: {x}"))?;
        let x = alexander_via_euler(&e).map_err(|x| format!("{name}: {x}"))?;
        ensure!(d.value == x.value, "{name}: routes differ");
        let rep = report(name, None);
        ensure!(rep.checks.thm1_eq_thm2, "{name}: verdict false");
    }
    for (name, k) in [("node", 1), ("tacnode", 2)] {
        let rep = report(name, None);
        let want = two_smooth_branches(k);
        ensure!(rep.alexander == want, "{name}: {} vs {}", rep.alexander, want);
    }
    let rep = report("e8", None);
    let want = LaurentPoly::from_dense(&[1, -1, 0, 1, -1, 1, 0, -1, 1]);
    ensure!(rep.alexander == want, "e8 knot {}", rep.alexander);
    within(start, Duration::from_secs(60))?;
    Ok(format!("{} curves, coefficient-exact", CORPUS.len()))
}

fn divisibility() -> Outcome {
    let mut checked = 0;
    for name in CORPUS {
        let curve = load(name);
        if curve.num_branches() < 2 {
            continue;
        }
        let d = alexander_via_dimensions(&engine(&curve)).map_err(|x| x.to_string())?;
        let pp = d.p_prime.clone().ok_or(format!("{name}: no P'"))?;
        let q = divide_exact_by_tprod_minus_one(&pp).map_err(|x| format!("{name}: {x}"))?;
        ensure!(
            &q * &LaurentPoly::tprod_minus_one(curve.num_branches()) == pp,
            "{name}: re-multiplication differs"
        );
        ensure!(Some(&q) == d.polynomial(), "{name}: quotient differs from route");
        ensure!(report(name, None).checks.divisibility, "{name}: verdict false");
        checked += 1;
    }
    Ok(format!("{checked} multi-branch curves divide exactly"))
}

fn normalization() -> Outcome {
    for name in CORPUS {
        let curve = load(name);
        let e = engine(&curve);
        let rep = report(name, None);
        let delta = if rep.r == 1 {
            LaurentPoly::from_dense(&rep.zeta)
        } else {
            rep.alexander.clone()
        };
        ensure!(delta.constant_term() == 1, "{name}: constant {}", delta.constant_term());
        ensure!(delta.is_polynomial(), "{name}: negative exponent");
        for (v, _) in delta.terms() {
            ensure!(
                e.member(v).map_err(|x| x.to_string())?,
                "{name}: {v:?} outside the semigroup"
            );
        }
        ensure!(
            rep.checks.normalized && rep.checks.support_in_semigroup,
            "{name}: verdicts {:?}",
            rep.checks
        );
    }
    Ok("constant 1, polynomial, support in semigroup".into())
}

fn euler_oracle() -> Outcome {
    let mut points = 0;
    for name in CORPUS {
        let curve = load(name);
        if curve.num_branches() != 2 {
            continue;
        }
        let e = engine(&curve);
        for f in e.fiber_table().map_err(|x| x.to_string())? {
            let v = &f.v.0;
            let oracle = arrangement_euler(&curve, v);
            ensure!(
                f.euler == oracle,
                "{name} at {v:?}: engine {} vs lattice {}",
                f.euler,
                oracle
            );
            let c = lead_space(&curve, v).len() as u32;
            ensure!(f.dim == c, "{name} at {v:?}: c {} vs {}", f.dim, c);
            points += 1;
        }
    }
    Ok(format!("{points} box points agree with the Möbius computation"))
}

fn properties() -> Outcome {
    let curves: Vec<(Curve, FiltrationEngine)> = CORPUS
        .iter()
        .map(|n| {
            let c = load(n);
            let e = engine(&c);
            (c, e)
        })
        .collect();
    let mut runner = TestRunner::new(RunnerConfig {
        cases: 256,
        failure_persistence: None,
        ..RunnerConfig::default()
    });
    let strategy = (0..curves.len(), prop::collection::vec(0i64..64, 4));
    let count = std::cell::Cell::new(0usize);
    let result = runner.run(&strategy, |(idx, raw)| {
        let (curve, e) = &curves[idx];
        let r = e.num_branches();
        let upper = e.upper();
        // fiber data needs h up to v + 1, which the table covers for v <= B
        let v: Vec<i64> = (0..r).map(|i| raw[i] % (upper[i] + 1)).collect();
        let h = e.hilbert(&v).unwrap();
        for i in 0..r {
            let mut w = v.clone();
            w[i] += 1;
            let step = e.hilbert(&w).unwrap() as i64 - h as i64;
            prop_assert!(step == 0 || step == 1, "h step {} at {:?}", step, v);
        }
        prop_assert_eq!(h as usize, naive_hilbert(curve, &v));
        let c = e.dim_c(&v).unwrap();
        prop_assert!(c as usize <= r);
        let chi = e.fiber_euler(&v).unwrap();
        if v.iter().zip(e.delta()).all(|(a, d)| a >= d) {
            prop_assert_eq!(c as usize, r);
            prop_assert_eq!(chi, if r == 1 { 1 } else { 0 });
        }
        let full = (1u32 << r) - 1;
        for s in 0..=full {
            for t in 0..=full {
                if s & t == s {
                    let ds = e.subspace_dim(s, &v).unwrap();
                    let dt = e.subspace_dim(t, &v).unwrap();
                    prop_assert!(ds >= dt, "d not antitone at {:?}: {} {}", v, s, t);
                }
            }
        }
        if r == 1 {
            prop_assert!(chi == 0 || chi == 1);
        }
        count.set(count.get() + 1);
        Ok(())
    });
    result.map_err(|e| e.to_string())?;
    Ok(format!("{} random (curve, v) cases", count.get()))
}

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("alexander-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    dir
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_alexander");
    let dir = scratch_dir();
    for name in CORPUS {
        let path = dir.join(format!("{name}.curve"));
        std::fs::write(&path, corpus::source(name).unwrap()).map_err(|e| e.to_string())?;
        let run = |threads: &str| {
            Command::new(bin)
                .args(["--format", "json", "--threads", threads, "analyze"])
                .arg(&path)
                .output()
                .expect("binary runs")
        };
        let one = run("1");
        let eight = run("8");
        ensure!(one.status.success(), "{name}: exit {:?}", one.status.code());
        ensure!(one.stdout == eight.stdout, "{name}: JSON differs between thread counts");
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok("byte-identical JSON at 1 and 8 threads".into())
}

fn scale() -> Outcome {
    let start = Instant::now();
    let text = "branch a: x = t^3, y = t^8\nbranch b: x = t^2, y = t^11\n";
    let curve = Curve::validate(parse_curve(text).unwrap()).map_err(|e| e.to_string())?;
    ensure!(
        curve.delta().iter().all(|&d| d <= 30),
        "delta {:?} exceeds (30,30)",
        curve.delta()
    );
    let rep = analyze(&curve, &Config::default()).map_err(|e| e.to_string())?;
    ensure!(rep.checks.all_pass(), "verdicts {:?}", rep.checks);
    // Milnor number 2*delta_inv - r + 1 equals the degree of (t-1)*Delta(t,t)
    let delta_inv = (rep.branches.iter().map(|b| b.conductor).sum::<u32>() / 2
        + rep.intersection[0][1]) as i64;
    let diag = specialize_diagonal(&rep.alexander);
    let deg = diag.max_exponents().unwrap()[0] + 1;
    ensure!(deg == 2 * delta_inv - 1, "diagonal degree {deg}, delta_inv {delta_inv}");
    within(start, Duration::from_secs(60))?;
    Ok(format!("delta {:?} in {:?}", rep.delta, start.elapsed()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("node", node),
        ("cusp", cusp),
        ("smooth branch", smooth),
        ("branch (t^4, t^6+t^7)", two46),
        ("dimension and Euler routes agree", routes_agree),
        ("divisibility by t1...tr - 1", divisibility),
        ("normalization and support", normalization),
        ("fiber Euler characteristic oracle", euler_oracle),
        ("property suite", properties),
        ("determinism across thread counts", determinism),
        ("scale", scale),
    ];
    let mut failed = 0;
    for (i, (label, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|p| {
                Err(p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panicked".into()))
            });
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {label}: {detail} [{ms} ms]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {label}: {why} [{ms} ms]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all {} criteria pass", criteria.len());
}
