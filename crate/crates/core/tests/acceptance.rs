//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::time::{Duration, Instant};

use rug::Integer;

use se_core::bounds::*;
use se_core::coding::*;
use se_core::combinat::{binomial, schoenheim_lower, simple_lower};
use se_core::constructions::*;
use se_core::exact::{min_se, min_turan};
use se_core::exec::Strategy;
use se_core::report::{render_sweep_csv, sweep};
use se_core::setsys::*;

const TABLE_CELLS: [(usize, usize); 3] = [(31, 7), (31, 23), (31, 27)];

const CRIT1_LIMIT: Duration = Duration::from_secs(10);
const CRIT2_LIMIT: Duration = Duration::from_secs(60);
const CRIT4_LIMIT: Duration = Duration::from_secs(300);
const CRIT7_LIMIT: Duration = Duration::from_secs(600);

/// Relative band for the probabilistic row.
const PROB_TOL: f64 = 5e-4;
/// The Recurrent B conventions are pinned, so the band is zero.
const RECURRENT_B_TOL: f64 = 0.0;

/// Largest prime field tried for each code length.
const CODING_Q_MAX: u64 = 31;

/// `f(t+1)/Σf(i)` at `(100,10)`, pinned from the first evaluation. The
/// other terms are below `90^-89`, so the share rounds to one.
const DOMINANT_RATIO_100_10: f64 = 1.0;
const DOMINANT_TOL: f64 = 1e-6;
/// Recurrent C over the simple lower bound at `n = 200`, `k = 3, 4, 5`.
const RATIO_200: [f64; 3] = [1.373330287802650, 1.324999864728967, 1.319999995740737];
const RATIO_TOL: f64 = 1e-9;

/// Cells at which the sweep is also rerun: repeated runs, both strategies
/// and several thread counts.
const DETERMINISM_N_MAX: usize = 128;

struct Report {
    failed: Vec<usize>,
}

impl Report {
    fn line(&mut self, id: usize, ok: bool, what: &str, detail: String) {
        println!("{} criterion {id}: {what} ({detail})", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(id);
        }
    }
}

fn table_row(name: BoundName, want: [u64; 3], got: &[Integer]) -> Option<String> {
    let mismatch: Vec<String> = want
        .iter()
        .zip(got)
        .zip(TABLE_CELLS)
        .filter(|((w, g), _)| Integer::from(**w) != **g)
        .map(|((w, g), (n, d))| format!("{name} at ({n},{d}): want {w}, got {g}"))
        .collect();
    (!mismatch.is_empty()).then(|| mismatch.join("; "))
}

fn criterion_1(r: &mut Report) {
    let start = Instant::now();
    let mut errors = Vec::new();
    let mut row = |name: BoundName, want: [u64; 3], f: &dyn Fn(usize, usize) -> Integer| {
        let got: Vec<Integer> = TABLE_CELLS.iter().map(|&(n, d)| f(n, d)).collect();
        errors.extend(table_row(name, want, &got));
    };
    row(BoundName::ConstructionA, [93_691, 7_693_683, 86_148], &|n, d| {
        kim_roush_min(n, d - 2, KimRoushVariant::Exact).unwrap().value
    });
    row(BoundName::ConstructionB, [76_986, 12_151_903, 299_697], &|n, d| frankl_rodl_min(n, d - 2).unwrap().value);
    row(BoundName::RecurrentA, [124_250, 7_161_809, 88_673], &|n, d| recurrent_a(n, n - d + 1).unwrap().value);
    row(BoundName::RecurrentC, [599_474, 7_442_607, 55_905], &|n, d| recurrent_c(n, n - d + 1).unwrap().value);
    row(BoundName::SchwartzVardyUpper, [142_506, 31_475_730, 617_526], &|n, d| {
        schwartz_vardy(n, d).unwrap().1.value
    });
    row(BoundName::Schoenheim, [33_981, 2_103_660, 29_450], &|n, d| {
        schoenheim_lower(n as i64, d as i64 - 2).unwrap()
    });
    let elapsed = start.elapsed();
    let ok = errors.is_empty() && elapsed < CRIT1_LIMIT;
    let detail = if errors.is_empty() { format!("18 exact matches, {elapsed:.2?}") } else { errors.join("; ") };
    r.line(1, ok, "integer table rows", detail);
}

fn within(got: &Integer, want: u64, tol: f64) -> bool {
    let rel = (got.to_f64() - want as f64).abs() / want as f64;
    rel <= tol
}

fn criterion_2(r: &mut Report) {
    let start = Instant::now();
    let mut errors = Vec::new();
    let mut exact = 0;
    let prob_want = [96_112u64, 6_412_596, 77_298];
    let rb_want = [71_891u64, 9_665_343, 520_847];
    for (i, &(n, d)) in TABLE_CELLS.iter().enumerate() {
        let p = prob_bound_min(n, d - 2).unwrap().value;
        let b = recurrent_b_min(n, d - 2).unwrap().value;
        exact += usize::from(p == prob_want[i]) + usize::from(b == rb_want[i]);
        if !within(&p, prob_want[i], PROB_TOL) {
            errors.push(format!("probabilistic at ({n},{d}): want {} got {p}", prob_want[i]));
        }
        if !within(&b, rb_want[i], RECURRENT_B_TOL) {
            errors.push(format!("recurrent_b at ({n},{d}): want {} got {b}", rb_want[i]));
        }
    }
    let elapsed = start.elapsed();
    let ok = errors.is_empty() && elapsed < CRIT2_LIMIT;
    let detail = if errors.is_empty() {
        format!("probabilistic within {PROB_TOL}, recurrent_b exact; {exact}/6 exact; {elapsed:.2?}")
    } else {
        errors.join("; ")
    };
    r.line(2, ok, "optimised table rows", detail);
}

fn criterion_3(r: &mut Report) {
    let want = [BoundName::RecurrentB, BoundName::Probabilistic, BoundName::RecurrentC];
    let got: Vec<BoundName> = TABLE_CELLS.iter().map(|&(n, d)| best_bounds(n, d).unwrap().winner).collect();
    let detail = got.iter().map(|w| w.as_str()).collect::<Vec<_>>().join(", ");
    r.line(3, got == want, "table winners", detail);
}

fn criterion_4(r: &mut Report) {
    let mut errors = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut check = |label: String, f: &dyn Fn() -> (Integer, Integer)| {
        let start = Instant::now();
        let (got, want) = f();
        let took = start.elapsed();
        slowest = slowest.max(took);
        if got != want || took >= CRIT4_LIMIT {
            errors.push(format!("{label}: got {got}, want {want}, {took:.2?}"));
        }
    };
    let se = |n: usize, t: usize| {
        let (v, w) = min_se(n, t).unwrap();
        assert!(is_se_system(&w).unwrap().is_valid() && Integer::from(w.len()) == v);
        v
    };
    for (n, t, want) in [(4, 2, 3u32), (5, 2, 5), (5, 3, 4)] {
        check(format!("S({n},{t})"), &|| (se(n, t), Integer::from(want)));
    }
    for n in 4..=10 {
        check(format!("S({n},{})", n - 2), &|| (se(n, n - 2), Integer::from(n - 1)));
    }
    for n in 6..=8 {
        check(format!("S({n},3) = T({n},4,3)"), &|| (se(n, 3), min_turan(n, 4, 3).unwrap().0));
    }
    let ok = errors.is_empty();
    let detail = if ok { format!("13 instances, slowest {slowest:.2?}") } else { errors.join("; ") };
    r.line(4, ok, "exact small values", detail);
}

fn criterion_5(r: &mut Report) {
    let mut errors = Vec::new();
    let mut built = 0usize;
    let mut valid = |sys: &SetSystem, label: &str, errors: &mut Vec<String>| {
        built += 1;
        let verdict = verify_kind(sys, &VerifyOptions::default()).unwrap();
        if let Some(w) = verdict.witness() {
            errors.push(format!("{label}: {w} not covered"));
        }
    };
    for n in 2..=10usize {
        for t in 1..n.saturating_sub(2) {
            for l in kim_roush_l_min(n, t)..=n {
                let mut best = usize::MAX;
                for j in 0..l {
                    let sys = construct_weighted_partition(n, t, l, j).unwrap();
                    valid(&sys, &format!("weighted partition ({n},{t},{l},{j})"), &mut errors);
                    best = best.min(sys.len());
                }
                for v in [KimRoushVariant::Exact, KimRoushVariant::Loose] {
                    let bound = kim_roush_bound(n, t, l, v).unwrap();
                    if Integer::from(best) > bound {
                        errors.push(format!("weighted partition ({n},{t},{l}) has {best} > {bound}"));
                    }
                }
            }
        }
        for t in 1..n {
            for l in 1..=n {
                let mut best = usize::MAX;
                for j in 0..l {
                    let sys = construct_bin_parity(n, t, l, j).unwrap();
                    valid(&sys, &format!("bin parity ({n},{t},{l},{j})"), &mut errors);
                    best = best.min(sys.len());
                }
                let bound = frankl_rodl_bound(n, t, l).unwrap();
                if Integer::from(best) > bound {
                    errors.push(format!("bin parity ({n},{t},{l}) has {best} > {bound}"));
                }
            }
        }
        for k in 1..=n {
            let sys = construct_kuzjurin(n, k).unwrap();
            valid(&sys, &format!("kuzjurin ({n},{k})"), &mut errors);
            let bound = kuzjurin_provider(n, k).unwrap();
            if Integer::from(sys.len()) > bound {
                errors.push(format!("kuzjurin ({n},{k}) has {} > {bound}", sys.len()));
            }
        }
        for t in 1..n.saturating_sub(1) {
            let sys = construct_recurrent_se(n, t).unwrap();
            valid(&sys, &format!("recurrent ({n},{t})"), &mut errors);
            let bound = recurrent_c(n, n - t - 1).unwrap().value;
            if Integer::from(sys.len()) > bound {
                errors.push(format!("recurrent ({n},{t}) has {} > {bound}", sys.len()));
            }
        }
        for t in 0..n {
            for p in [0.0, 0.1, 0.5, 1.0] {
                for seed in 0..3 {
                    let sys = construct_random_greedy(n, t, p, seed).unwrap();
                    valid(&sys, &format!("random greedy ({n},{t},{p},{seed})"), &mut errors);
                }
            }
        }
    }
    let ok = errors.is_empty();
    let detail = if ok { format!("{built} systems verified, all counts within their formulas") } else { errors.join("; ") };
    r.line(5, ok, "construction validity for n <= 10", detail);
}

/// Rank over `F_q` by plain row reduction, independent of the library's.
fn rank_mod(rows: &[Vec<u64>], q: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let inv = |a: u64| (1..q).find(|b| a * b % q == 1).unwrap();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, p);
        let s = inv(m[rank][c]);
        let pivot: Vec<u64> = m[rank].iter().map(|x| x * s % q).collect();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && row[c] != 0 {
                let f = row[c];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x + q - f * y % q) % q;
                }
            }
        }
        m[rank] = pivot;
        rank += 1;
    }
    rank
}

/// `stopping[m]` for every column mask, then `contains[m]` (some nonempty
/// stopping subset of `m`) by a subset-OR transform.
fn stopping_tables(h: &ParityCheckMatrix) -> (Vec<bool>, Vec<bool>) {
    let n = h.n;
    let rows: Vec<u64> = h.supports().iter().map(Block::low_mask).collect();
    let stopping: Vec<bool> = (0..1u64 << n)
        .map(|m| m != 0 && rows.iter().all(|r| (r & m).count_ones() != 1))
        .collect();
    let mut contains = stopping.clone();
    for bit in 0..n {
        for m in 0..1usize << n {
            if m >> bit & 1 == 1 && contains[m ^ 1 << bit] {
                contains[m] = true;
            }
        }
    }
    (stopping, contains)
}

fn min_stopping(stopping: &[bool]) -> usize {
    (1..stopping.len()).filter(|&m| stopping[m]).map(|m| m.count_ones() as usize).min().unwrap()
}

fn check_code(spec: &CodeSpec, sys: &SetSystem, label: &str, errors: &mut Vec<String>) {
    let (n, d, q) = (spec.n, spec.d, spec.field.q());
    let h = match build_h_from_se(spec, sys) {
        Ok(h) => h,
        Err(e) => return errors.push(format!("{label}: {e}")),
    };
    if rank_mod(h.rows(), q) != n - spec.k || !h.rows().iter().all(|row| spec.in_dual(row)) {
        errors.push(format!("{label}: rows do not span the dual"));
    }
    let (stopping, contains) = stopping_tables(&h);
    let s = min_stopping(&stopping);
    if s != d || stopping_distance(&h).unwrap() != d {
        errors.push(format!("{label}: stopping distance {s}, want {d}"));
    }
    for m in 0..1u64 << n {
        let recovered = matches!(peel_decode(&h, &Block::from_low_mask(m)), PeelOutcome::Recovered);
        if recovered == contains[m as usize] {
            errors.push(format!("{label}: peeling disagrees on erasures {m:#b}"));
            break;
        }
    }
}

/// Replaces the heavy rows of the dual's monomial basis, alone and mixed
/// with the SE-derived rows.
fn check_replacement(spec: &CodeSpec, se_rows: &[Vec<u64>], label: &str, errors: &mut Vec<String>) {
    let (n, q) = (spec.n, spec.field.q());
    let dmin = spec.dual_distance();
    let cap = n.div_ceil(dmin);
    let basis: Vec<Vec<u64>> = (0..n - spec.k)
        .map(|i| {
            let mut coeffs = vec![0; n - spec.k];
            coeffs[i] = 1;
            spec.dual_codeword(&coeffs)
        })
        .collect();
    for row in &basis {
        let single = ParityCheckMatrix::new(spec.field, n, vec![row.clone()]).unwrap();
        let support = single.support(0);
        match replace_nonmin_rows(spec, &single) {
            Ok(out) => {
                let union = out.supports().iter().fold(Block::empty(), |acc, s| acc.union(s));
                let per_row_cap = if support.len() == dmin { 1 } else { cap };
                if union != support || out.len() > per_row_cap || out.weights().iter().any(|&w| w != dmin) {
                    errors.push(format!("{label}: row {support} replaced by {} rows covering {union}", out.len()));
                }
            }
            Err(e) => errors.push(format!("{label}: {e}")),
        }
    }
    let mut mixed = se_rows.to_vec();
    mixed.extend(basis.iter().cloned());
    for rows in [basis, mixed] {
        let h = ParityCheckMatrix::new(spec.field, n, rows).unwrap();
        let already = h.weights().iter().filter(|&&w| w == dmin).count();
        let before = min_stopping(&stopping_tables(&h).0);
        match replace_nonmin_rows(spec, &h) {
            Ok(out) => {
                let after = min_stopping(&stopping_tables(&out).0);
                let limit = already + cap * (h.len() - already);
                // full rank is only promised when the input already reaches d
                let rank_ok = before < spec.d || rank_mod(out.rows(), q) == n - spec.k;
                if after < before || out.len() > limit || !rank_ok {
                    errors.push(format!(
                        "{label}: replacement gave s {before} -> {after}, {} rows (limit {limit})",
                        out.len()
                    ));
                }
            }
            Err(e) => errors.push(format!("{label}: {e}")),
        }
    }
}

fn criterion_6(r: &mut Report) {
    let mut errors = Vec::new();
    let mut instances = 0;
    for n in 2..=10usize {
        for d in 2..=5usize.min(n) {
            let t = d - 2;
            let mut systems = vec![("random greedy", construct_random_greedy(n, t, 0.2, (100 * n + d) as u64).unwrap())];
            if t == 0 {
                systems.push(("empty block", SetSystem::new(n, 0, Kind::Se, vec![Block::empty()]).unwrap()));
            } else {
                systems.push(("recurrent", construct_recurrent_se(n, t).unwrap()));
            }
            for q in (n as u64..=CODING_Q_MAX).filter(|&q| is_prime(q)) {
                let spec = CodeSpec::new(n, d, q).unwrap();
                for (name, sys) in &systems {
                    let label = format!("[{n},{},{d}] over F_{q}, {name}", spec.k);
                    check_code(&spec, sys, &label, &mut errors);
                    instances += 1;
                }
                let se_rows = build_h_from_se(&spec, &systems[0].1).unwrap().rows().to_vec();
                check_replacement(&spec, &se_rows, &format!("[{n},{},{d}] over F_{q}", spec.k), &mut errors);
            }
        }
    }
    let ok = errors.is_empty();
    let detail = if ok {
        format!("{instances} matrices, primes n <= q <= {CODING_Q_MAX}, all erasure patterns")
    } else {
        errors.iter().take(5).cloned().collect::<Vec<_>>().join("; ")
    };
    r.line(6, ok, "coding equivalence for n <= 10, d <= 5", detail);
}

fn consistent(cells: &[BestBounds]) -> Option<String> {
    cells.iter().find_map(|c| {
        let max_lower = c.lowers.iter().map(|b| &b.value).max()?;
        let min_upper = c.uppers.iter().map(|b| &b.value).min()?;
        (max_lower > min_upper).then(|| format!("({},{}) lower {max_lower} > upper {min_upper}", c.n, c.d))
    })
}

/// Sweep CSVs at `DETERMINISM_N_MAX` on rayon pools of 1, 2 and 4 threads.
#[cfg(feature = "parallel")]
fn parallel_runs() -> Vec<(String, String)> {
    [1, 2, 4]
        .into_iter()
        .map(|threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let csv = pool.install(|| render_sweep_csv(&sweep(DETERMINISM_N_MAX, Strategy::Parallel).unwrap()));
            (format!("parallel on {threads} threads"), csv)
        })
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_runs() -> Vec<(String, String)> {
    Vec::new()
}

fn criterion_7(r: &mut Report) {
    let full_n = 512;
    let start = Instant::now();
    let cells = sweep(full_n, Strategy::default()).unwrap();
    let elapsed = start.elapsed();
    let full_csv = render_sweep_csv(&cells);
    let mut errors: Vec<String> = consistent(&cells).into_iter().collect();
    if elapsed >= CRIT7_LIMIT {
        errors.push(format!("full sweep took {elapsed:.2?}"));
    }
    let reference = render_sweep_csv(&sweep(DETERMINISM_N_MAX, Strategy::Sequential).unwrap());
    let rerun = render_sweep_csv(&sweep(DETERMINISM_N_MAX, Strategy::Sequential).unwrap());
    let mut runs = vec![("sequential rerun".to_string(), rerun)];
    runs.extend(parallel_runs());
    for (label, csv) in &runs {
        if *csv != reference {
            errors.push(format!("{label} CSV differs at n_max = {DETERMINISM_N_MAX}"));
        }
    }
    // the small sweep must be a prefix of the full one, row for row
    if !full_csv.starts_with(&reference) {
        errors.push("n_max = 128 rows differ inside the full sweep".into());
    }
    let ok = errors.is_empty();
    let detail = if ok {
        format!(
            "{} cells in {elapsed:.2?}, {} byte-identical reruns at n_max = {DETERMINISM_N_MAX}",
            cells.len(),
            runs.len()
        )
    } else {
        errors.join("; ")
    };
    r.line(7, ok, "full sweep consistency", detail);
}

/// `ln C(a,b)` by summing logarithms.
fn ln_binom(a: u64, b: u64) -> f64 {
    (0..b).map(|i| ((a - i) as f64).ln() - ((i + 1) as f64).ln()).sum()
}

/// The dominant-term share computed in log space with f64.
fn dominant_ratio_f64(n: u64, t: u64) -> f64 {
    let ln_f: Vec<f64> = (1..=t + 1)
        .map(|i| {
            let c = binomial((n - i) as i64, (n - t - 1) as i64).to_f64();
            ln_binom(t + 1, i) - c.ln() - (i as f64 / t as f64) * c * ((n - t) as f64).ln()
        })
        .collect();
    let top = ln_f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = ln_f.iter().map(|x| (x - top).exp()).sum();
    (ln_f[t as usize] - top).exp() / sum
}

fn recurrent_ratio(n: usize, k: usize) -> f64 {
    let upper = recurrent_c(n, k).unwrap().value;
    let lower = simple_lower(n as i64, (n - k - 1) as i64).unwrap();
    upper.to_f64() / lower.to_f64()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn criterion_8(r: &mut Report) {
    let mut errors = Vec::new();
    let mut cells = 0;
    for n in 6..=16 {
        for d in 6..=n {
            let t = d - 2;
            let prob = prob_bound_min(n, t).unwrap();
            let draw = draw_bound_min(n, t, false).unwrap();
            let margin = prob.raw.add(
                &se_core::combinat::ExtReal::from_u64(2, 64, se_core::combinat::Rounding::Down),
                se_core::combinat::Rounding::Down,
            );
            if draw.raw >= margin {
                errors.push(format!("draw at ({n},{d}) = {} vs probabilistic {}", draw.raw, prob.raw));
            }
            cells += 1;
        }
    }
    let eta = eta_decomposition(100, 10).unwrap();
    let dom = eta.dominant_ratio.to_f64();
    let oracle = dominant_ratio_f64(100, 10);
    if rel(dom, DOMINANT_RATIO_100_10) > DOMINANT_TOL || rel(dom, oracle) > DOMINANT_TOL {
        errors.push(format!("dominant ratio {dom:.12} (pinned {DOMINANT_RATIO_100_10}, log-space {oracle:.12})"));
    }
    let ratios: Vec<f64> = (3..=5).map(|k| recurrent_ratio(200, k)).collect();
    for (i, k) in (3..=5usize).enumerate() {
        let limit = (k + 1) as f64 / k as f64;
        let smaller_n = recurrent_ratio(100, k);
        if rel(ratios[i], RATIO_200[i]) > RATIO_TOL {
            errors.push(format!("k={k}: ratio {:.12} vs pinned {}", ratios[i], RATIO_200[i]));
        }
        // above the limit and falling toward it as n grows
        if !(ratios[i] > limit && ratios[i] < smaller_n) {
            errors.push(format!("k={k}: ratio {:.6} at n=200, {smaller_n:.6} at n=100, limit {limit:.6}", ratios[i]));
        }
    }
    let ok = errors.is_empty();
    let detail = if ok {
        format!(
            "{cells} cells; dominant ratio {dom:.12}; ratios {:.12}, {:.12}, {:.12}",
            ratios[0], ratios[1], ratios[2]
        )
    } else {
        errors.join("; ")
    };
    r.line(8, ok, "finite property checks", detail);
}

fn main() {
    // cargo passes harness flags such as --nocapture; none are needed here
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut report = Report { failed: Vec::new() };
    let criteria: [fn(&mut Report); 8] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
    ];
    for (i, run) in criteria.iter().enumerate() {
        if filter.is_empty() || filter.contains(&(i + 1)) {
            run(&mut report);
        }
    }
    if !report.failed.is_empty() {
        println!("failed criteria: {:?}", report.failed);
        std::process::exit(1);
    }
}
