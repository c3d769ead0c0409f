//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! prints its own line; the process fails if any of them does.

use std::collections::{HashSet, VecDeque};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qnetstates::bell::{builtin_inequalities, table1_report, SeesawConfig};
use qnetstates::bounds::{asymptotic_improvement, sweep_rows, ub1, ub2, BoundReport};
use qnetstates::dense::{fidelity, random_density, DenseOperator};
use qnetstates::field::primes;
use qnetstates::optimize::DEFAULT_RESTARTS;
use qnetstates::protocols::protocol1::{
    f_star_series, protocol1_channel, protocol1_fidelity, triangle_sources, SourceCoefficients,
};
use qnetstates::protocols::protocol2::{protocol2_optimize, Protocol2Config};
use qnetstates::protocols::protocol3::{protocol3_embedding, protocol3_exact, protocol3_variants, protocol3_x_family};
use qnetstates::protocols::triangle::{schmidt_state, simulate_triangle_pure};
use qnetstates::qudit::{ghz_state, PauliString};
use qnetstates::standard_form::{is_standard, standardize, standardize_exhaustive, DEFAULT_ORBIT_CAP};
use qnetstates::uncertainty::{f_lambda, figur_check, lemma2_check, random_projection_pair, ProjectionPair};
use qnetstates::Multigraph;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ok<T>(r: qnetstates::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

const REFERENCE_F_STAR: [f64; 11] =
    [0.51704, 0.540053, 0.545959, 0.547493, 0.5479, 0.548009, 0.548038, 0.548045, 0.548047, 0.548048, 0.548048];

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let ts: Vec<usize> = (2..=12).collect();
    let series = ok(f_star_series(&ts, DEFAULT_RESTARTS, 0))?;
    let elapsed = start.elapsed().as_secs_f64();
    let mut worst: f64 = 0.0;
    for ((t, f), want) in series.iter().zip(REFERENCE_F_STAR) {
        let err = (f - want).abs();
        worst = worst.max(err);
        ensure(err < 1e-4, || format!("t={t}: {f:.6} vs {want}"))?;
    }
    ensure(elapsed < 300.0, || format!("took {elapsed:.0} s"))?;
    Ok(format!("max deviation {worst:.1e}, {elapsed:.1} s"))
}

fn criterion_2() -> Outcome {
    let r = ok(protocol2_optimize(&Protocol2Config::default()))?;
    let want = 2.0 * 3f64.sqrt() - 3.0;
    ensure((r.fidelity - want).abs() < 1e-4, || format!("{:.7} vs {want:.7}", r.fidelity))?;
    ensure(r.fidelity > 4.0 / 9.0 && r.gme, || "GME flag".into())?;
    let check = ok(r.ghz_fidelity_of_output())?;
    ensure((check - r.fidelity).abs() < 1e-9, || "output state disagrees with reported fidelity".into())?;
    Ok(format!("F = {:.7}", r.fidelity))
}

fn criterion_3() -> Outcome {
    for k in [2, 3] {
        let r = ok(protocol3_exact(k))?;
        let err = (r.fidelity - 1.0 / k as f64).abs();
        ensure(err < 1e-12, || format!("k={k}: {} vs 1/{k}", r.fidelity))?;
    }
    let x = ok(protocol3_x_family(3))?;
    ensure((x.fidelity - 0.45798).abs() < 1e-4, || format!("d=3 x-family {:.6}", x.fidelity))?;
    for d in [5usize, 8, 10] {
        let r = ok(protocol3_embedding(d))?;
        let want = d.isqrt() as f64 / d as f64;
        let sim = ok(r.ghz_fidelity_of_output())?;
        ensure((sim - want).abs() < 1e-10, || format!("d={d}: simulated {sim} vs {want}"))?;
    }
    Ok(format!("1/2, 1/3 exact; d=3 x-family {:.6}; embedding 2/5, 2/8, 3/10", x.fidelity))
}

fn oracle_ub2(d: f64, beta: f64) -> f64 {
    let r = (2.0 * beta * d).sqrt();
    1.0 - (d - 1.0) / (d * (beta + 2.0) + 2.0 * r)
}

fn oracle_ub1(d: f64, beta: f64) -> f64 {
    let gamma = 1.0 - 1.0 / (1.0 + d.sqrt());
    let root = (beta * beta + 4.0 * gamma).sqrt();
    1.0 - (root - beta).powi(2) / 16.0
}

fn criterion_4() -> Outcome {
    let big = 1_000_003u64;
    let far = ok(ub2(big, 1))?;
    ensure((far - 2.0 / 3.0).abs() < 1e-3, || format!("ub2(d={big}) = {far}"))?;
    let limit = (4.0 - 5f64.sqrt()) / (3.0 * 5f64.sqrt());
    ensure((asymptotic_improvement() - limit).abs() < 1e-12, || "limit constant".into())?;
    let imp = 1.0 - far / ok(ub1(big, 1))?;
    ensure((imp - limit).abs() / limit < 5e-3, || format!("improvement {imp:.5} vs {limit:.5}"))?;

    let ps = primes(25);
    let betas: Vec<u64> = (1..=21).step_by(2).collect();
    for &d in &ps {
        ensure(ok(ub1(d, 5))? > 0.99, || format!("ub1(d={d}, 5) <= 0.99"))?;
        for &b in &betas {
            let (u1, u2) = (ok(ub1(d, b))?, ok(ub2(d, b))?);
            ensure((u2 - oracle_ub2(d as f64, b as f64)).abs() < 1e-12, || format!("ub2 oracle at ({d},{b})"))?;
            ensure((u1 - oracle_ub1(d as f64, b as f64)).abs() < 1e-12, || format!("ub1 oracle at ({d},{b})"))?;
            ensure(u2 < u1, || format!("ub2 >= ub1 at ({d},{b})"))?;
        }
    }

    let rows = ok(sweep_rows(&ps, &[1, 5]))?;
    for beta in [1, 5] {
        let curve: Vec<_> = rows.iter().filter(|r| r.beta == beta).collect();
        ensure(curve.iter().all(|r| r.ub2 < r.ub1), || format!("beta={beta}: ub2 above ub1"))?;
        ensure(curve.windows(2).all(|w| w[1].ub2 < w[0].ub2 && w[1].ub1 < w[0].ub1), || {
            format!("beta={beta}: curves not decreasing in d")
        })?;
    }
    let (b1, b5): (Vec<&BoundReport>, Vec<&BoundReport>) = rows.iter().partition(|r| r.beta == 1);
    ensure(b1.iter().zip(&b5).all(|(a, b)| a.ub2 < b.ub2 && a.ub1 < b.ub1), || "beta ordering".into())?;
    Ok(format!("ub2(1, {big}) = {far:.6}, improvement {:.4}%", 100.0 * imp))
}

const REFERENCE_TABLE: [(&str, f64, f64, [f64; 3]); 7] = [
    ("4", 2.0, 3.65685, [2.00211, 1.99962, 1.98873]),
    ("5", 3.0, 4.88854, [3.00905, 3.02612, 3.01511]),
    ("6", 3.0, 4.65685, [3.00411, 3.00752, 2.99420]),
    ("21", 4.0, 5.95546, [4.00545, 4.01432, 4.00016]),
    ("40", 6.0, 8.12979, [6.00715, 6.01344, 5.98919]),
    ("g1", 6.0, 6.82507, [6.00001, 5.97618, 5.93736]),
    ("g2", 6.0, 6.56259, [6.00058, 5.97618, 5.93736]),
];

fn enumerate_classical(coeffs: &[[[f64; 3]; 3]; 3]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for bits in 0..64u32 {
        let s = |i: u32| if bits >> i & 1 == 1 { -1.0 } else { 1.0 };
        let (a, b, c) = ([1.0, s(0), s(1)], [1.0, s(2), s(3)], [1.0, s(4), s(5)]);
        let mut v = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    v += coeffs[i][j][k] * a[i] * b[j] * c[k];
                }
            }
        }
        best = best.max(v);
    }
    best
}

fn criterion_5() -> Outcome {
    for ineq in ok(builtin_inequalities())? {
        let e = enumerate_classical(&ineq.coeffs);
        ensure(e == ineq.classical_bound, || format!("{}: enumerated {e} vs {}", ineq.name, ineq.classical_bound))?;
    }
    let start = Instant::now();
    let table = ok(table1_report(&[2, 3, 4], &SeesawConfig::default(), DEFAULT_RESTARTS))?;
    let elapsed = start.elapsed().as_secs_f64();
    let mut worst: f64 = 0.0;
    for (row, (name, c, q, cells)) in table.rows.iter().zip(REFERENCE_TABLE) {
        ensure(row.name == name, || format!("row order: {} vs {name}", row.name))?;
        ensure(row.classical == c, || format!("{name}: C = {}", row.classical))?;
        let mut check = |got: f64, want: f64, what: &str| {
            worst = worst.max((got - want).abs());
            ensure((got - want).abs() < 5e-3, || format!("{name} {what}: {got:.5} vs {want}"))
        };
        check(row.quantum, q, "Q")?;
        for (i, (&got, want)) in row.values.iter().zip(cells).enumerate() {
            check(got, want, &format!("d={}", i + 2))?;
        }
    }
    ensure(elapsed < 1800.0, || format!("took {elapsed:.0} s"))?;
    Ok(format!("max cell deviation {worst:.1e}, {elapsed:.1} s"))
}

/// Adjacency matrix used by the orbit oracle, independent of the library.
type Adj = Vec<Vec<u64>>;

fn oracle_lc(g: &Adj, l: usize, a: u64, d: u64) -> Adj {
    let mut h = g.clone();
    for i in 0..g.len() {
        for j in 0..g.len() {
            if i != j && i != l && j != l {
                h[i][j] = (g[i][j] + a * g[i][l] * g[j][l]) % d;
            }
        }
    }
    h
}

fn oracle_min_beta(g: &Adj, d: u64) -> usize {
    let n = g.len();
    let adj = |h: &Adj, i: usize, j: usize| h[i][j] != 0;
    let good = |h: &Adj, u: usize, v2: usize| (0..n).any(|w| w != v2 && w != u && adj(h, u, w) && !adj(h, w, v2));
    let mut seen = HashSet::from([g.clone()]);
    let mut queue = VecDeque::from([g.clone()]);
    let mut best = usize::MAX;
    while let Some(h) = queue.pop_front() {
        for v1 in 0..n {
            for v2 in 0..n {
                if v1 == v2 || !adj(&h, v1, v2) {
                    continue;
                }
                let common: Vec<usize> = (0..n).filter(|&u| adj(&h, v1, u) && adj(&h, v2, u)).collect();
                if good(&h, v1, v2) && common.iter().all(|&u| good(&h, u, v2)) {
                    best = best.min(2 * common.len() + 1);
                }
            }
        }
        if best == 1 {
            break;
        }
        for l in 0..n {
            for a in 1..d {
                let next = oracle_lc(&h, l, a, d);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    best
}

fn random_connected(rng: &mut ChaCha8Rng, d: u64, n: usize) -> Multigraph {
    loop {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(0.45) {
                    edges.push((i, j, rng.random_range(1..d) as i64));
                }
            }
        }
        if let Ok(g) = Multigraph::from_edges(d, n, &edges) {
            if g.is_connected() {
                return g;
            }
        }
    }
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut total, mut compared, mut det_minimal) = (0, 0, 0);
    for _ in 0..1200 {
        let d = [2u64, 3, 5][rng.random_range(0..3)];
        let n = rng.random_range(3..=7);
        let g = random_connected(&mut rng, d, n);
        let sf = ok(standardize(&g))?;
        ensure(ok(sf.replay(&g))? == sf.graph, || format!("certificate does not replay: {g:?}"))?;
        ensure(ok(is_standard(&sf.graph, sf.pair.0, sf.pair.1))?, || format!("not standard: {g:?}"))?;
        total += 1;
        if n <= 5 {
            let ex = ok(standardize_exhaustive(&g, DEFAULT_ORBIT_CAP))?;
            ensure(ex.minimal && ok(ex.replay(&g))? == ex.graph, || "exhaustive certificate".into())?;
            let adj: Adj = (0..n).map(|i| (0..n).map(|j| g.entry(i, j)).collect()).collect();
            let want = oracle_min_beta(&adj, d);
            ensure(ex.beta == want, || format!("orbit minimum {want}, got {} for {g:?}", ex.beta))?;
            compared += 1;
            det_minimal += usize::from(sf.beta == want);
        }
    }
    Ok(format!("{total} graphs; {compared} orbit minima matched; deterministic run minimal on {det_minimal}"))
}

fn one_block(lambda: f64) -> Result<ProjectionPair, String> {
    let c = |x: f64| Complex64::new(x, 0.0);
    let (a, b) = (lambda.sqrt(), (1.0 - lambda).sqrt());
    let p = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
    let q = DMatrix::from_row_slice(2, 2, &[c(a * a), c(a * b), c(a * b), c(b * b)]);
    ok(ProjectionPair::new(ok(DenseOperator::new(vec![2], p))?, ok(DenseOperator::new(vec![2], q))?, lambda))
}

/// Largest `<P>` over one-block pure states with `<Q> = x`, found by bisection
/// on the angle of the state.
fn brute_extremal(pair: &ProjectionPair, x: f64) -> Result<f64, String> {
    let expect = |theta: f64| -> Result<(f64, f64), String> {
        let c = |v: f64| Complex64::new(v, 0.0);
        let psi = DMatrix::from_column_slice(2, 1, &[c(theta.cos()), c(theta.sin())]);
        let rho = ok(DenseOperator::new(vec![2], &psi * psi.adjoint()))?;
        ok(pair.expectations(&rho))
    };
    let (mut lo, mut hi) = (0.0, (1.0 / pair.lambda - 1.0).sqrt().atan());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if expect(mid)?.1 < x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(expect(0.5 * (lo + hi))?.0)
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::INFINITY;
    for s in 0..10_000u64 {
        let lambda = rng.random_range(0.02..0.98);
        let pair = ok(random_projection_pair(s, lambda, rng.random_range(1..=3), rng.random_range(0..=2), rng.random_range(0..=2)))?;
        let rho = ok(random_density(vec![pair.dim()], rng.random_range(1..=pair.dim()), &mut rng))?;
        worst = worst.min(ok(figur_check(&pair, &rho))?.slack());
    }
    ensure(worst >= -1e-9, || format!("slack {worst:e}"))?;

    let mut curve_err: f64 = 0.0;
    for lambda in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let pair = one_block(lambda)?;
        for i in 0..10 {
            let x = lambda + (1.0 - lambda) * (i as f64 + 0.5) / 10.0;
            curve_err = curve_err.max((brute_extremal(&pair, x)? - ok(f_lambda(lambda, x))?).abs());
        }
    }
    ensure(curve_err < 1e-6, || format!("extremal curve off by {curve_err:e}"))?;

    let mut pairs = 0;
    while pairs < 10_000 {
        let d = [2u64, 3][rng.random_range(0..2)];
        let n = 2;
        let draw = |rng: &mut ChaCha8Rng| {
            let v = |rng: &mut ChaCha8Rng| (0..n).map(|_| rng.random_range(0..d)).collect::<Vec<_>>();
            let (x, z) = (v(rng), v(rng));
            PauliString::new(d, x, z, 0).ok().filter(|p| p.order_phase() == 0)
        };
        let (Some(g), Some(h)) = (draw(&mut rng), draw(&mut rng)) else { continue };
        if !ok(g.commutes(&h))? {
            continue;
        }
        let Ok(gh) = g.mul(&h) else { continue };
        if gh.order_phase() != 0 {
            continue;
        }
        let rho = ok(random_density(vec![d as usize; n], rng.random_range(1..=4), &mut rng))?;
        let c = ok(lemma2_check(&g, &h, &rho))?;
        ensure(c.holds, || format!("projector chain fails: {c:?}"))?;
        pairs += 1;
    }
    Ok(format!("worst slack {worst:.1e}; curve error {curve_err:.1e}; {pairs} commuting pairs"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let t = rng.random_range(2..=4);
        let mut v = || {
            let raw: Vec<f64> = (0..t).map(|_| rng.random::<f64>()).collect();
            let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
            raw.into_iter().map(|x| x / norm).collect::<Vec<_>>()
        };
        let coeffs = ok(SourceCoefficients::new(v(), v(), v()))?;
        let closed = protocol1_fidelity(&coeffs);
        let ch = ok(protocol1_channel(t))?;
        let [s0, s1, s2] = triangle_sources(&coeffs);
        let psi = [ok(schmidt_state(s0))?, ok(schmidt_state(s1))?, ok(schmidt_state(s2))?];
        let rho = ok(simulate_triangle_pure([&ch, &ch, &ch], [&psi[0], &psi[1], &psi[2]]))?;
        let sim = ok(fidelity(&ok(ghz_state(2, 3))?, &rho))?;
        worst = worst.max((closed - sim).abs());
    }
    ensure(worst < 1e-10, || format!("closed form vs simulation {worst:e}"))?;

    // GHZ is the three-vertex star up to local unitaries; its index is 1.
    let mut compared = Vec::new();
    let mut against = |d: u64, f: f64| -> Result<(), String> {
        let star = ok(Multigraph::from_edges(d, 3, &[(0, 1, 1), (0, 2, 1)]))?;
        let beta = ok(standardize(&star))?.beta as u64;
        let bound = ok(ub2(d, beta))?;
        ensure(f < bound, || format!("d={d}: fidelity {f} not below ub2 {bound}"))?;
        compared.push(format!("d={d} {f:.4}<{bound:.4}"));
        Ok(())
    };
    let p1 = ok(f_star_series(&[12], DEFAULT_RESTARTS, 0))?[0].1;
    against(2, p1)?;
    against(3, ok(protocol2_optimize(&Protocol2Config::default()))?.fidelity)?;
    for d in [5u64, 7, 11] {
        against(d, ok(protocol3_variants(d as usize))?.fidelity)?;
    }
    Ok(format!("max deviation {worst:.1e}; {}", compared.join(", ")))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("F*_t series", criterion_1),
        ("Protocol II optimum", criterion_2),
        ("Protocol III", criterion_3),
        ("fidelity bounds", criterion_4),
        ("Bell table", criterion_5),
        ("standard form", criterion_6),
        ("uncertainty relation", criterion_7),
        ("cross-checks", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS  {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL  {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
