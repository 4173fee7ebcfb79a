//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero when
//! any criterion fails.

use std::cell::OnceCell;
use std::process::Command;
use std::time::{Duration, Instant};

use awq_core::awpoly::CondDensityParams;
use awq_core::verify::checks::{check_exact_identities, check_representation, ExactGrid};
use awq_core::verify::{run_suite, CheckName, CheckReport, SuiteConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn summarize(reports: &[CheckReport]) -> Outcome {
    let failed: Vec<&CheckReport> = reports.iter().filter(|r| !r.pass).collect();
    let worst = reports
        .iter()
        .max_by(|a, b| (a.residual / a.tolerance.max(f64::MIN_POSITIVE)).total_cmp(&(b.residual / b.tolerance.max(f64::MIN_POSITIVE))));
    let mut detail = format!("{} checks", reports.len());
    if let Some(w) = worst {
        detail += &format!(", closest to tolerance: {} residual {:.2e} (tol {:.0e})", w.name, w.residual, w.tolerance);
    }
    if let Some(f) = failed.first() {
        detail += &format!(", {} failing, first: {f}", failed.len());
    }
    Outcome {
        pass: !reports.is_empty() && failed.is_empty(),
        detail,
    }
}

fn suite(checks: &[CheckName], edit: impl FnOnce(&mut SuiteConfig)) -> Vec<CheckReport> {
    let mut cfg = SuiteConfig {
        checks: checks.to_vec(),
        ..SuiteConfig::default()
    };
    edit(&mut cfg);
    run_suite(&cfg).expect("valid suite configuration")
}

fn criterion_1(exact: &[CheckReport]) -> Outcome {
    summarize(exact)
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_a0a0);
    let mut reports = Vec::new();
    let point = |q: f64, tol: f64, rng: &mut ChaCha8Rng| {
        let h = 2.0 / (1.0 - q).sqrt();
        let p = CondDensityParams::new(
            rng.gen_range(-0.95..0.95) * h,
            rng.gen_range(-0.9..0.9),
            rng.gen_range(-0.95..0.95) * h,
            rng.gen_range(-0.9..0.9),
            q,
        )
        .expect("sampled inside the domain");
        let xs: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0) * h).collect();
        check_representation(6, &p, &xs, tol).unwrap_or_else(|e| CheckReport::failed("representation", &[("q", q)], tol, &e))
    };
    for _ in 0..20 {
        let mut q: f64 = rng.gen_range(-0.8..0.8);
        while q.abs() < 0.05 {
            q = rng.gen_range(-0.8..0.8);
        }
        reports.push(point(q, 1e-10, &mut rng));
    }
    for _ in 0..5 {
        reports.push(point(0.0, 1e-12, &mut rng));
    }
    summarize(&reports)
}

fn criterion_3() -> Outcome {
    summarize(&suite(&[CheckName::OrthogonalityH, CheckName::OrthogonalityP, CheckName::AwOrthogonality], |c| {
        c.tol = None;
    }))
}

fn criterion_4() -> Outcome {
    summarize(&suite(&[CheckName::Moments], |_| {}))
}

fn criterion_5(exact: &[CheckReport]) -> Outcome {
    let mut r: Vec<CheckReport> = exact.iter().filter(|r| r.name.ends_with("moment_rho1_zero")).cloned().collect();
    r.extend(suite(&[CheckName::Collapses], |c| c.q_values = vec![0.0, 1.0]));
    summarize(&r)
}

fn criterion_6() -> Outcome {
    summarize(&suite(&[CheckName::Expansion], |c| {
        c.q_values = vec![-0.5, 0.0, 0.3, 0.5, 0.7];
        let rhos = [-0.6, 0.0, 0.3, 0.6];
        c.rho_pairs = rhos.iter().flat_map(|a| rhos.iter().map(move |b| (*a, *b))).collect();
    }))
}

fn criterion_7() -> Outcome {
    summarize(&suite(&[CheckName::ChapmanKolmogorov, CheckName::SnSeries, CheckName::RatioBounds], |_| {}))
}

fn criterion_8() -> Outcome {
    summarize(&suite(&[CheckName::Bounds], |_| {}))
}

fn criterion_9() -> Outcome {
    let run = || {
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_awq"))
            .args(["verify", "--all"])
            .output()
            .expect("binary runs");
        (out, start.elapsed())
    };
    let (a, ta) = run();
    let (b, tb) = run();
    let identical = a.stdout == b.stdout;
    let exit0 = a.status.code() == Some(0) && b.status.code() == Some(0);
    let fast = ta.max(tb) < Duration::from_secs(300);
    let last = String::from_utf8_lossy(&a.stdout).lines().last().unwrap_or("").to_string();
    Outcome {
        pass: identical && exit0 && fast,
        detail: format!(
            "byte-identical: {identical}, exit codes {:?}/{:?}, runtimes {:.1}s/{:.1}s, {last}",
            a.status.code(),
            b.status.code(),
            ta.as_secs_f64(),
            tb.as_secs_f64()
        ),
    }
}

fn main() {
    // shared by criteria 1 and 5, computed on first use
    let exact_cell: OnceCell<Vec<CheckReport>> = OnceCell::new();
    let exact = || exact_cell.get_or_init(|| check_exact_identities(&ExactGrid::default()).expect("exact suite runs"));
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("exact identities in rational arithmetic, zero tolerance", Box::new(|| criterion_1(exact()))),
        ("representation cross-check at 20 random points, n <= 6", Box::new(criterion_2)),
        ("orthogonality by quadrature (1e-8) and AW orthogonality (1e-7)", Box::new(criterion_3)),
        ("moment theorem by quadrature, n <= 8, 1e-7", Box::new(criterion_4)),
        ("degenerate collapses: rho1 = 0, q = 0, q = 1", Box::new(|| criterion_5(exact()))),
        ("expansion convergence: Poisson-Mehler 60 terms, density 40 terms", Box::new(criterion_6)),
        ("Chapman-Kolmogorov, s_n series, ratio bounds", Box::new(criterion_7)),
        ("bounds on H_n and C_n, n <= 8", Box::new(criterion_8)),
        ("CLI determinism and runtime of verify --all", Box::new(criterion_9)),
    ];
    let mut all = true;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        all &= o.pass;
        println!(
            "criterion {}: {} {title} [{}; {:.1}s]",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if !all {
        std::process::exit(1);
    }
}
