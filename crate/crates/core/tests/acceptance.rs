//! Acceptance suite: one PASS/FAIL line per criterion, written straight to
//! stderr so the report shows up without `--nocapture`.

use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use tightframe::frames::{
    build_hahn_frame, build_kraw_frame, build_xi_frame, fixtures, frame_operator_residual, gram_vs_kernel_check,
    match_fixture, verify_external_frame, FixtureMatch, FrameMatrix,
};
use tightframe::hahn_mv::{
    d_constant, hahn_basis, hahn_norm, hahn_oracle, monic_projection_table, oracle_monic_projection,
    reproducing_kernel, HahnParams, KernelForm,
};
use tightframe::krawtchouk_mv::{
    kraw_basis, kraw_norm, kraw_oracle, monic_kraw_projection_table, oracle_kraw_projection, KrawParams,
};
use tightframe::lattice::{binomial, enumerate_lattice, MultiIndex};
use tightframe::oracle::LatticeFunction;
use tightframe::scalar::{parse_rational, Rational, Scalar, ToleranceProfile};
use tightframe::simplex_jacobi::{
    connection_check, generating_function_check, GeneratingFunction, SimplexPoint, SimplexWeight,
};

const FIXTURE_TOL: f64 = 1e-12;
const NORMALIZED_TOL: f64 = 1e-12;
const PARSEVAL_BUDGET_SECS: f64 = 60.0;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn q(s: &str) -> Rational {
    parse_rational(s).unwrap()
}

fn qs(v: &[&str]) -> Vec<Rational> {
    v.iter().map(|s| q(s)).collect()
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| Rational::from_int(x)).collect()
}

/// The kappa grid: zero, all ones, and (1,0,2) extended by 1 in d = 3.
fn kappa_grid(d: usize) -> Vec<Vec<Rational>> {
    let mixed = if d == 2 { ints(&[1, 0, 2]) } else { ints(&[1, 0, 2, 1]) };
    vec![ints(&vec![0; d + 1]), ints(&vec![1; d + 1]), mixed]
}

fn rho_grid(d: usize) -> Vec<Vec<Rational>> {
    if d == 2 {
        vec![qs(&["1/3", "1/3"]), qs(&["1/4", "1/2"])]
    } else {
        vec![qs(&["1/4", "1/4", "1/4"]), qs(&["1/4", "1/2", "1/8"])]
    }
}

fn describe_match(name: &str, m: &FixtureMatch) -> String {
    if m.matched {
        return format!("{name} matched");
    }
    let cols: Vec<String> = m
        .mismatches
        .iter()
        .map(|c| {
            let cells: Vec<String> = c
                .entries
                .iter()
                .map(|(r, p, b)| format!("row {} printed {p:.6} built {b:.6}", r + 1))
                .collect();
            format!("col {}: {}", c.printed_col + 1, cells.join(", "))
        })
        .collect();
    format!("{name} mismatched [{}]", cols.join("; "))
}

fn fixture_check(name: &str, built: &FrameMatrix, count: usize, profile: &ToleranceProfile) -> (bool, String) {
    let printed = fixtures::load(name).unwrap();
    if built.cols() != count || printed.cols() != count {
        return (
            false,
            format!("{name}: {} built / {} printed elements, expected {count}", built.cols(), printed.cols()),
        );
    }
    match match_fixture(built, &printed, profile) {
        Ok(m) => (m.matched, describe_match(name, &m)),
        Err(e) => (false, format!("{name}: {e}")),
    }
}

fn criterion_1() -> Outcome {
    let built = build_xi_frame::<Rational>(2, 1).unwrap();
    let (ok, detail) = fixture_check("xi21", &built, 4, &ToleranceProfile::exact());
    Outcome::new(ok, detail)
}

fn criterion_2() -> Outcome {
    let built = build_xi_frame::<Rational>(2, 2).unwrap();
    let (ok, detail) = fixture_check("xi22", &built, 13, &ToleranceProfile::exact());
    Outcome::new(ok && built.rows() == 6, detail)
}

fn printed_family(names: [&str; 3], build: impl Fn(usize, usize) -> FrameMatrix) -> Outcome {
    let profile = ToleranceProfile::float(FIXTURE_TOL);
    let cases = [(2, 2, 6), (2, 3, 10), (3, 3, 10)];
    let results: Vec<(bool, String)> = names
        .iter()
        .zip(cases)
        .map(|(name, (n, m, count))| fixture_check(name, &build(n, m), count, &profile))
        .collect();
    let ok = results.iter().all(|r| r.0);
    let detail = results.into_iter().map(|r| r.1).collect::<Vec<_>>().join("; ");
    Outcome::new(ok, detail)
}

fn criterion_3() -> Outcome {
    printed_family(["h22", "h23", "h33"], |n, m| build_hahn_frame(2, n, m, &ints(&[0, 0, 0])).unwrap())
}

fn criterion_4() -> Outcome {
    printed_family(["k22", "k23", "k33"], |n, m| {
        build_kraw_frame(2, n, m, &qs(&["1/3", "1/3"])).unwrap()
    })
}

/// Every frame of the acceptance grid, built exactly.
fn frame_grid() -> Vec<(String, FrameMatrix)> {
    let mut specs: Vec<(String, Box<dyn Fn() -> FrameMatrix + Send + Sync>)> = Vec::new();
    for d in [2usize, 3] {
        for m in 1..=4 {
            for n in 1..=m {
                for kappa in kappa_grid(d) {
                    let label = format!("H(d={d},n={n},m={m},kappa={kappa:?})");
                    specs.push((label, Box::new(move || build_hahn_frame(d, n, m, &kappa).unwrap())));
                }
                for rho in rho_grid(d) {
                    let label = format!("K(d={d},n={n},m={m},rho={rho:?})");
                    specs.push((label, Box::new(move || build_kraw_frame(d, n, m, &rho).unwrap())));
                }
            }
        }
        for big_n in 1..=4 {
            specs.push((
                format!("Xi({d},{big_n})"),
                Box::new(move || build_xi_frame::<Rational>(d, big_n).unwrap()),
            ));
        }
    }
    specs.into_par_iter().map(|(l, f)| (l, f())).collect()
}

fn criterion_5(frames: &[(String, FrameMatrix)]) -> Outcome {
    let start = Instant::now();
    let failures: Vec<String> = frames
        .par_iter()
        .filter_map(|(label, f)| {
            let rep = frame_operator_residual(f, &ToleranceProfile::exact()).unwrap();
            (!(rep.exact && rep.tight && rep.tight_residual == 0.0)).then(|| label.clone())
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    Outcome::new(
        failures.is_empty() && secs < PARSEVAL_BUDGET_SECS,
        format!("{} frames, {} not exactly tight {:?}, {secs:.2}s", frames.len(), failures.len(), failures),
    )
}

fn criterion_6() -> Outcome {
    let mut checks = 0usize;
    let mut failures = Vec::new();
    for d in [2usize, 3] {
        for big_n in 0..=5 {
            for kappa in [ints(&vec![0; d + 1]), ints(&vec![1; d + 1])] {
                let p = HahnParams::new(kappa.clone(), big_n).unwrap();
                let oracle = hahn_oracle(&p, big_n).unwrap();
                let (p, oracle, kappa) = (&p, &oracle, &kappa);
                let bad: Vec<String> = (0..=big_n)
                    .flat_map(|m| enumerate_lattice(d + 1, m))
                    .collect::<Vec<_>>()
                    .par_iter()
                    .flat_map_iter(|alpha| {
                        (0..=alpha.degree()).filter_map(move |n| {
                            let closed = monic_projection_table(alpha, n, p).unwrap();
                            let gram = oracle_monic_projection(oracle, alpha, n, p).unwrap();
                            (closed != gram).then(|| format!("H d={d} N={big_n} kappa={kappa:?} alpha={alpha} n={n}"))
                        })
                    })
                    .collect();
                checks += 1;
                failures.extend(bad);
            }
            for rho in rho_grid(d) {
                let p = KrawParams::new(rho.clone(), big_n).unwrap();
                let oracle = kraw_oracle(&p, big_n).unwrap();
                let (p, oracle, rho) = (&p, &oracle, &rho);
                let bad: Vec<String> = (0..=big_n)
                    .flat_map(|m| enumerate_lattice(d + 1, m))
                    .collect::<Vec<_>>()
                    .par_iter()
                    .flat_map_iter(|alpha| {
                        (0..=alpha.degree()).filter_map(move |n| {
                            let closed = monic_kraw_projection_table(alpha, n, p).unwrap();
                            let gram = oracle_kraw_projection(oracle, alpha, n, p).unwrap();
                            (closed != gram).then(|| format!("K d={d} N={big_n} rho={rho:?} alpha={alpha} n={n}"))
                        })
                    })
                    .collect();
                checks += 1;
                failures.extend(bad);
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!("{checks} parameter sets, {} mismatches {:?}", failures.len(), failures),
    )
}

/// Exact orthogonality of a family of lattice functions against closed norms.
fn orthogonality<S: Scalar>(
    funcs: &[(MultiIndex, LatticeFunction<S>, S)],
    inner: impl Fn(&LatticeFunction<S>, &LatticeFunction<S>) -> S + Sync,
) -> usize {
    (0..funcs.len())
        .into_par_iter()
        .map(|i| {
            let (nu, f, norm) = &funcs[i];
            funcs[i..]
                .iter()
                .filter(|(mu, g, _)| {
                    let v = inner(f, g);
                    let expected = if nu == mu { norm.clone() } else { S::zero() };
                    v != expected
                })
                .count()
        })
        .sum()
}

fn criterion_7() -> Outcome {
    let mut bad = 0usize;
    let mut ratio_bad = Vec::new();
    let mut sets = 0usize;
    for d in [2usize, 3] {
        for big_n in 0..=5 {
            for kappa in [ints(&vec![0; d + 1]), ints(&vec![1; d + 1])] {
                let p = HahnParams::new(kappa.clone(), big_n).unwrap();
                let measure = p.measure().unwrap();
                let funcs: Vec<_> = (0..=big_n)
                    .flat_map(|n| enumerate_lattice(d, n))
                    .collect::<Vec<_>>()
                    .into_par_iter()
                    .map(|nu| {
                        let f = LatticeFunction::from_fn(&p.lattice(), |x| hahn_basis(&nu, x, &p)).unwrap();
                        let b = hahn_norm(&nu, &p).unwrap();
                        (nu, f, b)
                    })
                    .collect();
                bad += orthogonality(&funcs, |f, g| measure.inner_product(f, g).unwrap());
                for m in 0..=big_n {
                    let pm = p.with_size(m);
                    for n in 0..=m {
                        let ratios: Vec<Rational> = enumerate_lattice(d, n)
                            .iter()
                            .map(|nu| hahn_norm(nu, &p).unwrap() / hahn_norm(nu, &pm).unwrap())
                            .collect();
                        if ratios.windows(2).any(|w| w[0] != w[1]) {
                            ratio_bad.push(format!("d={d} N={big_n} m={m} n={n} kappa={kappa:?}"));
                        }
                    }
                }
                sets += 1;
            }
            for rho in rho_grid(d) {
                let p = KrawParams::new(rho, big_n).unwrap();
                let measure = p.measure().unwrap();
                let funcs: Vec<_> = (0..=big_n)
                    .flat_map(|n| enumerate_lattice(d, n))
                    .collect::<Vec<_>>()
                    .into_par_iter()
                    .map(|nu| {
                        let f = LatticeFunction::from_fn(&p.lattice(), |x| kraw_basis(&nu, x, &p)).unwrap();
                        let c = kraw_norm(&nu, &p).unwrap();
                        (nu, f, c)
                    })
                    .collect();
                bad += orthogonality(&funcs, |f, g| measure.inner_product(f, g).unwrap());
                sets += 1;
            }
        }
    }
    Outcome::new(
        bad == 0 && ratio_bad.is_empty(),
        format!(
            "{sets} parameter sets, {bad} inner products off, {} norm ratios varying with nu {:?}",
            ratio_bad.len(),
            ratio_bad
        ),
    )
}

fn criterion_8() -> Outcome {
    let d = 2;
    let mut failures = Vec::new();
    let mut checks = 0usize;
    for kappa in kappa_grid(d) {
        for big_n in 0..=4 {
            let p = HahnParams::new(kappa.clone(), big_n).unwrap();
            let pts = p.lattice().points().to_vec();
            let pairs: Vec<(MultiIndex, MultiIndex)> = pts
                .iter()
                .flat_map(|x| pts.iter().map(move |y| (x.clone(), y.clone())))
                .collect();
            for n in 0..=big_n {
                let bad = pairs
                    .par_iter()
                    .map(|(x, y)| {
                        let basis = reproducing_kernel(n, x, y, &p, KernelForm::Basis).unwrap();
                        (n..=big_n)
                            .filter(|&m| reproducing_kernel(n, x, y, &p, KernelForm::Monic(m)).unwrap() != basis)
                            .count()
                    })
                    .sum::<usize>();
                checks += pairs.len() * (big_n - n + 1);
                if bad > 0 {
                    failures.push(format!("kappa={kappa:?} N={big_n} n={n}: {bad}"));
                }
            }
        }
    }
    let mut const_bad = Vec::new();
    for dd in [2usize, 3] {
        for big_n in 0..=4 {
            let p = HahnParams::<Rational>::zero(dd, big_n);
            let expected = Rational::from_integer(binomial(big_n + dd, big_n).into());
            for n in 0..=big_n {
                if d_constant(n, big_n, &p).unwrap() != expected {
                    const_bad.push(format!("d={dd} N={big_n} n={n}"));
                }
            }
        }
    }
    Outcome::new(
        failures.is_empty() && const_bad.is_empty(),
        format!(
            "{checks} kernel comparisons, failures {failures:?}; D_n(N,N) != C(N+d,N) at {const_bad:?}"
        ),
    )
}

fn criterion_9(frames: &[(String, FrameMatrix)]) -> Outcome {
    let failures: Vec<String> = frames
        .par_iter()
        .filter_map(|(label, f)| match gram_vs_kernel_check(f, &ToleranceProfile::exact()) {
            Ok(rep) if rep.gram_kernel_ok == Some(true) => None,
            Ok(rep) => Some(format!("{label} residual {:?}", rep.gram_kernel_residual)),
            Err(e) => Some(format!("{label}: {e}")),
        })
        .collect();
    Outcome::new(
        failures.is_empty(),
        format!("{} frames, {} failures {:?}", frames.len(), failures.len(), failures),
    )
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-9i64..=9).into(), rng.gen_range(1i64..=8).into())
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0010);
    let mut checks = 0usize;
    let mut max_residual = 0.0f64;
    let mut failures = Vec::new();
    for d in [2usize, 3] {
        for kappa in kappa_grid(d) {
            let w = SimplexWeight::new(kappa.clone()).unwrap();
            let points: Vec<SimplexPoint<Rational>> = (0..20)
                .map(|_| SimplexPoint::new((0..d).map(|_| random_rational(&mut rng)).collect()))
                .collect();
            for n in 0..=4 {
                let rep = connection_check(n, &w, &points).unwrap();
                checks += rep.checks;
                max_residual = max_residual.max(rep.max_residual);
                if !rep.exact_zero {
                    failures.push(format!("connection d={d} kappa={kappa:?} n={n}"));
                }
            }
            let ys: Vec<Vec<Rational>> = (0..20)
                .map(|_| loop {
                    let y: Vec<Rational> = (0..=d).map(|_| random_rational(&mut rng)).collect();
                    if y.iter().sum::<Rational>() != Rational::from_int(0) {
                        break y;
                    }
                })
                .collect();
            for big_n in 0..=4 {
                let mut kinds: Vec<GeneratingFunction> = Vec::new();
                for k in 0..=big_n {
                    kinds.extend(enumerate_lattice(d, k).into_iter().map(GeneratingFunction::Basis));
                    kinds.extend(enumerate_lattice(d + 1, k).into_iter().map(GeneratingFunction::Monic));
                    kinds.extend(enumerate_lattice(d + 1, k).into_iter().map(GeneratingFunction::MonomialLemma));
                }
                let (w, ys) = (&w, &ys);
                let reports: Vec<(String, f64, bool, usize)> = kinds
                    .par_iter()
                    .flat_map_iter(|kind| {
                        ys.iter().map(move |y| {
                            let rep = generating_function_check(kind, big_n, y, w).unwrap();
                            (format!("{kind:?} N={big_n} d={d}"), rep.max_residual, rep.exact_zero, rep.checks)
                        })
                    })
                    .collect();
                for (label, res, zero, c) in reports {
                    checks += c;
                    max_residual = max_residual.max(res);
                    if !zero {
                        failures.push(label);
                    }
                }
            }
        }
    }
    failures.dedup();
    Outcome::new(
        failures.is_empty(),
        format!("{checks} exact identities, max residual {max_residual:e}, failures {failures:?}"),
    )
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0011);
    let big_n = 3;
    let p = KrawParams::new(qs(&["1/3", "1/3"]), big_n).unwrap();
    let pts = p.lattice().points().to_vec();
    let nus: Vec<MultiIndex> = (1..=big_n).flat_map(|n| enumerate_lattice(2, n)).collect();
    let ts = [100i64, 1000, 10000];
    let hahn: Vec<HahnParams<Rational>> = ts
        .iter()
        .map(|&t| p.hahn_limit_params(&Rational::from_int(t)).unwrap())
        .collect();
    let mut cases = Vec::new();
    let mut skipped = 0usize;
    while cases.len() < 10 {
        let nu = nus[rng.gen_range(0..nus.len())].clone();
        let x = pts[rng.gen_range(0..pts.len())].clone();
        let k = kraw_basis(&nu, &x, &p).unwrap();
        let devs: Vec<Rational> = hahn
            .iter()
            .map(|h| {
                let v = hahn_basis(&nu, &x, h).unwrap() - k.clone();
                if v < Rational::from_int(0) { -v } else { v }
            })
            .collect();
        if devs.iter().all(|v| *v == Rational::from_int(0)) {
            skipped += 1;
            continue;
        }
        let ratios: Vec<f64> = devs.windows(2).map(|w| (w[0].clone() / w[1].clone()).to_float()).collect();
        cases.push((nu, x, ratios));
    }
    let bad: Vec<String> = cases
        .iter()
        .filter(|(_, _, r)| r.iter().any(|v| !(8.0..=12.0).contains(v)))
        .map(|(nu, x, r)| format!("nu={nu} x={x} ratios {r:?}"))
        .collect();
    let all: Vec<f64> = cases.iter().flat_map(|c| c.2.clone()).collect();
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = all.iter().copied().fold(0.0, f64::max);
    Outcome::new(
        bad.is_empty(),
        format!(
            "{} cases ({skipped} zero-deviation draws skipped), ratios in [{lo:.4}, {hi:.4}], out of range {bad:?}",
            cases.len()
        ),
    )
}

fn criterion_12() -> Outcome {
    let printed = fixtures::load("normalized_h222").unwrap();
    let rep = verify_external_frame(printed.entries.clone(), &ToleranceProfile::float(NORMALIZED_TOL)).unwrap();
    let norms: Vec<f64> = rep.norms.iter().map(|v| v.to_f64()).collect();
    Outcome::new(
        rep.tight && rep.is_normalized,
        format!(
            "{}x{} printed matrix: tight={} (max |S - I| = {:e}), equal norms={} (squared norms {norms:.6?})",
            printed.rows(),
            printed.cols(),
            rep.tight,
            rep.tight_residual,
            rep.is_normalized
        ),
    )
}

type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

#[test]
fn acceptance() {
    let total = Instant::now();
    let frames = frame_grid();
    let criteria: Vec<(&str, Criterion)> = vec![
        ("fixture Xi(2,1)", Box::new(criterion_1)),
        ("fixture Xi(2,2)", Box::new(criterion_2)),
        ("fixtures H(2,2) H(2,3) H(3,3)", Box::new(criterion_3)),
        ("fixtures K(2,2) K(2,3) K(3,3)", Box::new(criterion_4)),
        ("exact Parseval on the grid", Box::new(|| criterion_5(&frames))),
        ("closed projections equal Gram-Schmidt", Box::new(criterion_6)),
        ("orthogonality and norms", Box::new(criterion_7)),
        ("kernel two-form identity", Box::new(criterion_8)),
        ("Gram equals kernel", Box::new(|| criterion_9(&frames))),
        ("connection and generating functions", Box::new(criterion_10)),
        ("Hahn to Krawtchouk limit", Box::new(criterion_11)),
        ("normalized printed frame", Box::new(criterion_12)),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        writeln!(
            err,
            "{status} criterion {:>2} {name} ({:.2}s): {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            outcome.detail
        )
        .unwrap();
        if !outcome.pass {
            failed.push(i + 1);
        }
    }
    writeln!(
        err,
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failed.len(),
        criteria.len(),
        total.elapsed().as_secs_f64()
    )
    .unwrap();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
