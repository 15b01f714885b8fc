//! Acceptance checks. Each test prints one `[PASS]` / `[FAIL]` line for its
//! criterion and then asserts it. Run with `--nocapture` to see the lines.

use std::collections::HashSet;
use std::fs;
use std::time::{Duration, Instant};

use rand::Rng;

use bellcurve::cli::{
    cmd_simulate, cmd_table1, curves_from_results, results_csv, table1_rows, RunConfig,
};
use bellcurve::datasets::Family;
use bellcurve::math_stats::{beta_pdf, log_gamma, BetaShape, RngState};
use bellcurve::plot::learning_curve_svg;
use bellcurve::simulation::{
    mean_and_sd, run_experiment, run_query_loop, run_query_loop_observed, SimulationConfig,
};
use bellcurve::strategies::{bellcurve_select, uncertainty_select, QueryStrategy, ScoredInstance};

fn report(criterion: u32, ok: bool, detail: &str) {
    let tag = if ok { "PASS" } else { "FAIL" };
    println!("[{tag}] criterion {criterion}: {detail}");
}

fn scored(p: &[f64]) -> Vec<ScoredInstance> {
    p.iter()
        .enumerate()
        .map(|(pool_index, &p_hat)| ScoredInstance { pool_index, p_hat })
        .collect()
}

#[test]
fn criterion_1_table1_bounds() {
    let start = Instant::now();
    let mut sink = Vec::new();
    cmd_table1(&mut sink).unwrap();
    let elapsed = start.elapsed();
    print!("{}", String::from_utf8_lossy(&sink));

    let rows = table1_rows().unwrap();
    assert_eq!(rows.len(), 6);
    let dev95 = rows.iter().map(|r| r.deviation95()).fold(0.0, f64::max);
    let dev50 = rows.iter().map(|r| r.deviation50()).fold(0.0, f64::max);
    let ok = dev95 <= 5e-4 && elapsed < Duration::from_secs(1);
    report(
        1,
        ok,
        &format!(
            "max |central 95% bound - reference| = {dev95:.4} (tol 5e-4), runtime {elapsed:?}; \
             the reference bounds match the central 50% interval to {dev50:.1e}"
        ),
    );
    assert!(
        ok,
        "central 95% bounds deviate from the reference by {dev95}"
    );
}

#[test]
fn criterion_2_special_functions() {
    let mut worst_gamma: f64 = 0.0;
    let mut factorial = 1.0f64;
    for n in 1..=20u32 {
        // Γ(n) = (n-1)!
        if n > 1 {
            factorial *= f64::from(n - 1);
        }
        worst_gamma = worst_gamma.max((log_gamma(f64::from(n)).unwrap() - factorial.ln()).abs());
    }

    let mut worst_sym: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    for a in [1.0, 2.0, 5.0, 10.0, 100.0] {
        let shape = BetaShape::symmetric(a).unwrap();
        for i in 0..=1000 {
            let p = f64::from(i) / 1000.0;
            let q = f64::from(1000 - i) / 1000.0;
            let left = beta_pdf(p, shape).unwrap();
            let right = beta_pdf(q, shape).unwrap();
            if left != right {
                worst_sym = worst_sym.max((left - right).abs() / left.abs().max(right.abs()));
            }
        }
        let m = 10_000;
        let h = 1.0 / f64::from(m);
        let mut area = 0.0;
        for i in 0..=m {
            let w = if i == 0 || i == m { 0.5 } else { 1.0 };
            area += w * beta_pdf(f64::from(i) * h, shape).unwrap();
        }
        worst_norm = worst_norm.max((area * h - 1.0).abs());
    }

    let ok = worst_gamma <= 1e-10 && worst_sym <= 1e-12 && worst_norm <= 1e-6;
    report(
        2,
        ok,
        &format!(
            "log_gamma err {worst_gamma:.1e} (tol 1e-10), pdf symmetry rel err {worst_sym:.1e} (tol 1e-12), \
             trapezoid normalization err {worst_norm:.1e} (tol 1e-6)"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_3_uncertainty_matches_brute_force() {
    let mut rng = RngState::from_seed(3);
    let mut mismatches = 0;
    for trial in 0..1000 {
        let size = rng.random_range(1..=50usize);
        // coarse grid of values on some pools to exercise ties
        let coarse = trial % 3 == 0;
        let p: Vec<f64> = (0..size)
            .map(|_| {
                let u = rng.next_uniform();
                if coarse {
                    (u * 10.0).floor() / 10.0
                } else {
                    u
                }
            })
            .collect();
        let n = rng.random_range(0..=size);

        let mut brute: Vec<usize> = (0..size).collect();
        brute.sort_by(|&a, &b| {
            (p[a] - 0.5)
                .abs()
                .partial_cmp(&(p[b] - 0.5).abs())
                .unwrap()
                .then(a.cmp(&b))
        });
        brute.truncate(n);
        if uncertainty_select(&scored(&p), n).unwrap() != brute {
            mismatches += 1;
        }
    }
    let ok = mismatches == 0;
    report(
        3,
        ok,
        &format!("{mismatches} mismatches over 1000 random pools"),
    );
    assert!(ok);
}

#[test]
fn criterion_4a_flat_shape_is_passive() {
    let flat = BetaShape::symmetric(1.0).unwrap();
    let mut rng = RngState::from_seed(4);
    let weights_exact = (0..10_000).all(|_| beta_pdf(rng.next_uniform(), flat).unwrap() == 1.0)
        && beta_pdf(0.0, flat).unwrap() == 1.0
        && beta_pdf(1.0, flat).unwrap() == 1.0;

    let base = SimulationConfig::new(Family::Blobs, 3.0, QueryStrategy::Passive);
    let seeds: Vec<u64> = (0..200).collect();
    let exp = run_experiment(
        &base,
        &seeds,
        &[
            QueryStrategy::Passive,
            QueryStrategy::bell_curve(1.0, 1.0).unwrap(),
        ],
    )
    .unwrap();
    let diffs: Vec<f64> = exp
        .runs
        .chunks(2)
        .map(|pair| pair[1].final_accuracy() - pair[0].final_accuracy())
        .collect();
    let (mean, sd) = mean_and_sd(diffs.iter().copied());
    let se = sd / (diffs.len() as f64).sqrt();
    let ok = weights_exact && mean.abs() < 2.0 * se;
    report(
        4,
        ok,
        &format!(
            "(a) Beta(1,1) weights exactly 1: {weights_exact}; paired final-accuracy difference \
             bellcurve(1,1) - passive = {mean:.4}, 2 SE = {:.4} over 200 seeds",
            2.0 * se
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_4b_sharp_shape_is_uncertainty() {
    let sharp = BetaShape::symmetric(1000.0).unwrap();
    let mut rng = RngState::from_seed(44);
    let mut agree = 0;
    let mut trials = 0;
    while trials < 10_000 {
        let size = rng.random_range(2..=50usize);
        let p: Vec<f64> = (0..size).map(|_| rng.next_uniform()).collect();
        let mut d: Vec<f64> = p.iter().map(|v| (v - 0.5).abs()).collect();
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if d[1] - d[0] <= 0.05 {
            continue;
        }
        trials += 1;
        let pool = scored(&p);
        if bellcurve_select(&pool, 1, sharp, &mut rng).unwrap()
            == uncertainty_select(&pool, 1).unwrap()
        {
            agree += 1;
        }
    }
    let rate = f64::from(agree) / f64::from(trials);
    let ok = rate >= 0.99;
    report(
        4,
        ok,
        &format!(
            "(b) Beta(1000,1000) n=1 agrees with uncertainty in {:.2}% of 10^4 pools (need 99%)",
            100.0 * rate
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_5_bookkeeping() {
    let mut violations = Vec::new();
    for strategy in [
        QueryStrategy::Passive,
        QueryStrategy::Uncertainty,
        QueryStrategy::bell_curve(10.0, 10.0).unwrap(),
    ] {
        let config = SimulationConfig::new(Family::Blobs, 3.0, strategy);
        let mut queried = HashSet::new();
        run_query_loop_observed(&config, |ev| {
            let q = ev.query_index;
            if ev.known.len() != 10 + 5 * q {
                violations.push(format!(
                    "{strategy}: |known| = {} at query {q}",
                    ev.known.len()
                ));
            }
            if ev.known.len() + ev.unknown.len() != 1010 {
                violations.push(format!("{strategy}: pool total changed at query {q}"));
            }
            let known: HashSet<usize> = ev.known.ids().into_iter().collect();
            let unknown: HashSet<usize> = ev.unknown.ids().into_iter().collect();
            let test: HashSet<usize> = ev.test.ids().into_iter().collect();
            if !known.is_disjoint(&unknown) || !unknown.is_disjoint(&test) {
                violations.push(format!("{strategy}: pools overlap at query {q}"));
            }
            if !known.is_disjoint(&test) {
                violations.push(format!(
                    "{strategy}: test instance in training set at query {q}"
                ));
            }
            for id in ev.selected_ids {
                if !queried.insert(*id) {
                    violations.push(format!("{strategy}: instance {id} selected twice"));
                }
            }
        })
        .unwrap();
    }
    let ok = violations.is_empty();
    report(
        5,
        ok,
        &format!(
            "{} invariant violations over 3 default runs x 21 states",
            violations.len()
        ),
    );
    assert!(ok, "{violations:?}");
}

#[test]
fn criterion_6_determinism_and_speed() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["first", "second"] {
        let config = RunConfig {
            seed: 42,
            out: dir.path().join(name),
            ..RunConfig::default()
        };
        cmd_simulate(&config, &mut std::io::sink()).unwrap();
        outputs.push(fs::read(config.out.join("results.csv")).unwrap());
    }
    let identical = outputs[0] == outputs[1];

    let config = SimulationConfig {
        seed: 42,
        ..SimulationConfig::new(
            Family::Blobs,
            3.0,
            QueryStrategy::bell_curve(10.0, 10.0).unwrap(),
        )
    };
    let start = Instant::now();
    run_query_loop(&config).unwrap();
    let elapsed = start.elapsed();

    let ok = identical && elapsed < Duration::from_secs(5);
    report(
        6,
        ok,
        &format!(
            "two seed-42 simulate runs byte-identical: {identical} ({} bytes); one default run took {elapsed:?} (limit 5 s)",
            outputs[0].len()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_7_directional_replication() {
    let strategies = [
        QueryStrategy::Passive,
        QueryStrategy::Uncertainty,
        QueryStrategy::bell_curve(10.0, 10.0).unwrap(),
    ];
    let defaults = RunConfig::default();
    let seeds = defaults.seed_list();
    assert_eq!(seeds.len(), 30);

    let start = Instant::now();
    let mut cells = Vec::new();
    for (family, aur) in defaults.sweep_grid() {
        let exp = run_experiment(&defaults.simulation(family, aur), &seeds, &strategies).unwrap();
        let finals: Vec<f64> = exp.curves.iter().map(|c| *c.mean.last().unwrap()).collect();
        cells.push((family, aur, finals));
    }
    let elapsed = start.elapsed();
    assert_eq!(cells.len(), 12);

    let mut direction_ok = true;
    for std in [3.0, 5.0] {
        let (_, _, f) = cells
            .iter()
            .find(|(fam, aur, _)| *fam == Family::Blobs && *aur == std)
            .unwrap();
        let holds = f[1] >= f[0];
        direction_ok &= holds;
        println!(
            "  blobs std {std}: uncertainty {:.4} vs passive {:.4} -> {}",
            f[1],
            f[0],
            if holds { "ok" } else { "reversed" }
        );
    }

    let mut good = 0;
    for (family, aur, f) in &cells {
        let floor = f[0].min(f[1]) - 0.01;
        let holds = f[2] >= floor;
        good += usize::from(holds);
        println!(
            "  {family} {aur}: passive {:.4} uncertainty {:.4} bellcurve {:.4} {}",
            f[0],
            f[1],
            f[2],
            if holds { "" } else { "(below)" }
        );
    }

    let fast = elapsed < Duration::from_secs(15 * 60);
    let ok = direction_ok && good >= 9 && fast;
    report(
        7,
        ok,
        &format!(
            "uncertainty >= passive on blobs std 3 and 5: {direction_ok}; bellcurve(10,10) >= min - 0.01 \
             in {good}/12 cells (need 9); sweep runtime {elapsed:?} (limit 15 min)"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_8_svg_emission() {
    let base = SimulationConfig {
        num_queries: 5,
        ..SimulationConfig::new(Family::Moons, 0.2, QueryStrategy::Passive)
    };
    let exp = run_experiment(
        &base,
        &[0, 1, 2],
        &[
            QueryStrategy::Passive,
            QueryStrategy::Uncertainty,
            QueryStrategy::bell_curve(10.0, 10.0).unwrap(),
        ],
    )
    .unwrap();
    let series = curves_from_results(&results_csv(&exp.runs)).unwrap();
    let svg = learning_curve_svg("moons", &series);

    let (valid, n_series, n_legend) = match roxmltree::Document::parse(&svg) {
        Ok(doc) => {
            let count = |class: &str| {
                doc.descendants()
                    .filter(|n| n.attribute("class") == Some(class))
                    .count()
            };
            (
                doc.root_element().tag_name().name() == "svg",
                count("series"),
                count("legend-entry"),
            )
        }
        Err(_) => (false, 0, 0),
    };
    let ok = valid && n_series == 3 && n_legend == 3;
    report(
        8,
        ok,
        &format!("valid SVG: {valid}, {n_series} series, {n_legend} legend entries (need 3 and 3)"),
    );
    assert!(ok);
}
