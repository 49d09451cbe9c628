//! Acceptance criteria, one line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the summary lines are always
//! printed; exits nonzero if any criterion fails.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use triplewave::suite::{self, SuiteOptions, SMOOTH_PARAMS};
use triplewave::verify::CheckOutcome;

struct Criterion {
    id: usize,
    title: &'static str,
    run: fn(&SuiteOptions) -> Vec<CheckOutcome>,
}

fn group(name: &str) -> impl Fn(&SuiteOptions) -> Vec<CheckOutcome> + '_ {
    move |opts| suite::run_check(name, opts).expect("known check")
}

fn greens_identity_random(_: &SuiteOptions) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    let params: Vec<[f64; 2 * SMOOTH_PARAMS]> = (0..100)
        .map(|_| {
            let mut p = [0.0; 2 * SMOOTH_PARAMS];
            p.iter_mut().for_each(|v| *v = rng.gen::<f64>());
            p
        })
        .collect();
    match suite::greens_identity_pairs(&params) {
        Ok(worst) => vec![CheckOutcome::at_most(
            "greens_identity.random",
            worst,
            1e-6,
            "100 seeded random pairs at grid 3000",
        )],
        Err(e) => vec![CheckOutcome::error("greens_identity.random", &e)],
    }
}

fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            id: 1,
            title: "Robin spectrum: negative point at -alpha^2, FD within 1e-3",
            run: |o| group("robin_spectrum")(o),
        },
        Criterion {
            id: 2,
            title: "Weyl-function test: no negative spectrum for alpha >= 0",
            run: |o| group("weyl_test")(o),
        },
        Criterion {
            id: 3,
            title: "Dirichlet/Neumann kernels vs method of images <= 1e-3",
            run: |o| group("images_kernel")(o),
        },
        Criterion {
            id: 4,
            title: "Robin(-1) propagator vs leapfrog <= 1e-2",
            run: |o| group("robin_vs_leapfrog")(o),
        },
        Criterion {
            id: 5,
            title: "Robin(-1) causality <= 1e-3, halving with doubled nodes",
            run: |o| group("causality")(o),
        },
        Criterion {
            id: 6,
            title: "Green-operator identities <= 1e-2",
            run: |o| group("green_identities")(o),
        },
        Criterion {
            id: 7,
            title: "Boundary-condition property <= 1e-2, wrong-alpha control fails",
            run: |o| group("bc_property")(o),
        },
        Criterion {
            id: 8,
            title: "Wentzell suite",
            run: |o| group("wentzell")(o),
        },
        Criterion {
            id: 9,
            title: "Exact-sequence residuals <= 1e-2",
            run: |o| group("exact_sequence")(o),
        },
        Criterion {
            id: 10,
            title: "Green's identity <= 1e-6 over 100 random pairs",
            run: greens_identity_random,
        },
        Criterion {
            id: 11,
            title: "Energy conservation, Gronwall and cone energy",
            run: |o| group("energy")(o),
        },
        Criterion {
            id: 12,
            title: "Lower-bound formula below FD minimum",
            run: |o| group("lower_bound")(o),
        },
    ]
}

fn main() {
    let opts = SuiteOptions::default();
    let mut failed = Vec::new();
    let mut lines = Vec::new();
    for c in criteria() {
        let start = std::time::Instant::now();
        let outcomes = (c.run)(&opts);
        let pass = !outcomes.is_empty() && outcomes.iter().all(|o| o.pass);
        for o in &outcomes {
            println!("    {}", o.line());
        }
        let line = format!(
            "[{}] criterion {:>2}: {} ({:.1}s)",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            start.elapsed().as_secs_f64()
        );
        println!("{line}");
        lines.push(line);
        if !pass {
            failed.push(c.id);
        }
    }
    println!("\nacceptance summary");
    for line in &lines {
        println!("{line}");
    }
    if failed.is_empty() {
        println!("all 12 criteria passed");
    } else {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
