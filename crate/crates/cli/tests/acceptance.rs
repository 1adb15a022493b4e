//! Acceptance criteria 1-10. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line.

use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use concurrence_bounds::audit::{run_audit, AuditConfig};
use concurrence_bounds::bounds::{
    caf_bipartite_lower, reference_curves, thm1_lower_sq, thm4_combined, wang_lower, zhu_fei_lower,
};
use concurrence_bounds::concurrence::{pure_concurrence_full, wootters_concurrence};
use concurrence_bounds::partitions::enumerate_partitions;
use concurrence_bounds::roof::{convex_roof_upper, RoofOptions, SANDWICH_TOL};
use concurrence_bounds::states::{
    make_double_bell, make_isotropic_mixture, random_density, random_pure, PureState,
};
use concurrence_bounds::{Complex64, SubsystemDims};

type Outcome = Result<String, String>;

fn bin(args: &[&str]) -> (Output, Duration) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_concurrence"))
        .args(args)
        .env_remove("CONCURRENCE_SEED")
        .output()
        .expect("spawn concurrence");
    (out, start.elapsed())
}

struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Csv {
    fn parse(bytes: &[u8]) -> Result<Csv, String> {
        let text = std::str::from_utf8(bytes).map_err(|e| e.to_string())?;
        let mut lines = text.lines();
        let header = lines.next().ok_or("empty CSV")?.split(',').map(String::from).collect();
        let rows = lines
            .map(|l| l.split(',').map(|c| c.parse::<f64>().map_err(|e| format!("{c}: {e}"))).collect())
            .collect::<Result<_, _>>()?;
        Ok(Csv { header, rows })
    }

    fn col(&self, name: &str) -> Result<Vec<f64>, String> {
        let k = self.header.iter().position(|h| h == name).ok_or(format!("no column {name}"))?;
        Ok(self.rows.iter().map(|r| r[k]).collect())
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ghz_csv() -> Result<(Csv, Duration), String> {
    let (out, elapsed) = bin(&["ghz-sweep", "--n", "4"]);
    check(out.status.success(), || format!("ghz-sweep exited with {}", out.status))?;
    Ok((Csv::parse(&out.stdout)?, elapsed))
}

fn criterion_1() -> Outcome {
    let (csv, elapsed) = ghz_csv()?;
    check(csv.rows.len() == 181, || format!("{} rows", csv.rows.len()))?;
    let theta = csv.col("theta")?;
    let exact = csv.col("exact")?;
    let mut worst: f64 = 0.0;
    for (t, c) in theta.iter().zip(&exact) {
        worst = worst.max((c - (7.0 * (t.sin() * t.cos()).powi(2)).sqrt()).abs());
    }
    check(worst < 1e-10, || format!("max deviation {worst:e}"))?;
    check(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("181 rows, max |C4 - sqrt(7) sc| = {worst:.1e}, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let (csv, _) = ghz_csv()?;
    let theta = csv.col("theta")?;
    let cols = ["exact", "thm1", "zhu-fei", "wang"].map(|c| csv.col(c));
    let [exact, thm1, zf, wang] = cols;
    let (exact, thm1, zf, wang) = (exact?, thm1?, zf?, wang?);
    let mut worst: f64 = 0.0;
    for k in 0..theta.len() {
        let sc2 = (theta[k].sin() * theta[k].cos()).powi(2);
        for (v, coef) in [(thm1[k], 6.0), (zf[k], 4.0), (wang[k], 2.0)] {
            worst = worst.max((v - (coef * sc2).sqrt()).abs());
        }
        let ordered = exact[k] + 1e-12 >= thm1[k] && thm1[k] + 1e-12 >= zf[k] && zf[k] + 1e-12 >= wang[k];
        check(ordered, || format!("ordering broken at theta = {}", theta[k]))?;
    }
    check(worst < 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("closed forms to {worst:.1e}; exact >= thm1 >= zhu-fei >= wang on all rows"))
}

fn criterion_3() -> Outcome {
    let names = |n, m| -> Result<Vec<String>, String> {
        let mut v: Vec<String> = enumerate_partitions(n, m)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|p| p.to_string())
            .collect();
        v.sort();
        Ok(v)
    };
    let counts = [(4, 3, 6), (5, 3, 25), (5, 4, 10)];
    for (n, m, want) in counts {
        let got = names(n, m)?.len();
        check(got == want, || format!("({n},{m}) gave {got}, expected {want}"))?;
    }
    // As printed, up to block and label ordering.
    let printed_43 = ["1|2|34", "1|3|24", "1|4|23", "12|3|4", "13|2|4", "14|2|3"];
    let printed_53 = [
        "1|2|345", "1|3|245", "1|4|235", "1|5|234", "1|23|45", "1|24|35", "1|25|34", "12|3|45", "12|34|5",
        "12|4|35", "13|2|45", "13|24|5", "13|4|25", "14|2|35", "14|23|5", "14|3|25", "15|2|34", "15|23|4",
        "15|3|24", "123|4|5", "134|2|5", "124|3|5", "135|2|4", "125|3|4", "145|2|3",
    ];
    let printed_54 = [
        "1|2|3|45", "1|2|4|35", "1|2|5|34", "1|23|4|5", "1|24|3|5", "1|25|3|4", "12|3|4|5", "13|2|4|5",
        "14|2|3|5", "15|2|3|4",
    ];
    for (n, m, printed) in [(4, 3, &printed_43[..]), (5, 3, &printed_53[..]), (5, 4, &printed_54[..])] {
        let mut canonical: Vec<String> = printed
            .iter()
            .map(|s| s.parse::<concurrence_bounds::Partition>().map(|p| p.to_string()).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        canonical.sort();
        let got = names(n, m)?;
        check(got == canonical, || format!("({n},{m}) list {got:?}"))?;
    }
    Ok("S(4,3)=6, S(5,3)=25, S(5,4)=10; all three printed lists match".into())
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 0..201 {
        let r = reference_curves(k as f64 / 200.0).map_err(|e| e.to_string())?;
        worst = worst.max((r.combined - (2.0 * r.a + 4.0 * r.b) / 6.0).abs());
    }
    check(worst < 1e-15, || format!("identity error {worst:e}"))?;
    let at_one = reference_curves(1.0).unwrap().combined;
    check((at_one - 11.0 / 18.0).abs() < 1e-15, || format!("combined(1) = {at_one}"))?;
    for edge in [1.0 / 9.0, 0.2] {
        let jump = (reference_curves(edge + 1e-14).unwrap().combined
            - reference_curves(edge - 1e-14).unwrap().combined)
            .abs();
        check(jump < 1e-12, || format!("jump {jump:e} at t = {edge}"))?;
    }
    Ok(format!("combined = (2a+4b)/6 to {worst:.1e}; combined(1) = 11/18; continuous at 1/9, 1/5"))
}

fn criterion_5() -> Outcome {
    let (out, elapsed) = bin(&["example-sweep", "--points", "201"]);
    check(out.status.success(), || format!("example-sweep exited with {}", out.status))?;
    let csv = Csv::parse(&out.stdout)?;
    check(csv.rows.len() == 201, || format!("{} rows", csv.rows.len()))?;
    let t = csv.col("t")?;
    let thm1 = csv.col("thm1")?;
    csv.col("reference-curve")?;
    for (t, v) in t.iter().zip(&thm1) {
        if *t <= 1.0 / 9.0 {
            check(*v == 0.0, || format!("thm1 = {v:e} at t = {t}"))?;
        } else if *t >= 1.0 / 9.0 + 1e-3 {
            check(*v > 0.0, || format!("thm1 not positive at t = {t}"))?;
        }
    }
    let just_after = thm1_lower_sq(&make_isotropic_mixture(&make_double_bell(), 1.0 / 9.0 + 1e-3).unwrap())
        .map_err(|e| e.to_string())?
        .value;
    check(just_after > 0.0, || "thm1 not positive at t = 1/9 + 1e-3".into())?;
    let stderr = String::from_utf8_lossy(&out.stderr);
    check(stderr.contains("detection onset"), || "no onset report".into())?;
    check(stderr.contains("reference-curve"), || "no discrepancy report".into())?;
    check(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    let report = stderr.lines().collect::<Vec<_>>().join("; ");
    Ok(format!("{report}; {elapsed:.2?}"))
}

fn criteria_6_and_7() -> (Outcome, Outcome) {
    let summary = match run_audit(&AuditConfig::default()) {
        Ok(s) => s,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let judge = |names: &[&str], expect: &[usize]| -> Outcome {
        let mut parts = Vec::new();
        for (name, &samples) in names.iter().zip(expect) {
            let p = summary.get(name).ok_or(format!("missing property {name}"))?;
            check(p.samples == samples, || format!("{name}: {} samples", p.samples))?;
            check(p.passed() && p.max_violation < 1e-10, || {
                format!("{name}: violation {:e}", p.max_violation)
            })?;
            parts.push(format!("{name} ({:.1e})", p.max_violation));
        }
        Ok(parts.join(", "))
    };
    let six = judge(
        &[
            "C4^2 >= avg C3^2 (pure)",
            "C5^2 >= avg C3^2 (pure)",
            "C5^2 >= avg C4^2 (pure)",
            "four-party halved identity",
            "five-party halved identity",
        ],
        &[1000, 500, 500, 1000, 500],
    );
    let seven = judge(&["linear-entropy subadditivity"], &[1000]);
    // The binary must also report violations through its exit status.
    let seven = seven.and_then(|msg| {
        let (ok, _) = bin(&["audit", "--trials", "1"]);
        let (bad, _) = bin(&["audit", "--trials", "10", "--corrupt-normalization"]);
        check(ok.status.code() == Some(0), || format!("clean audit exit {:?}", ok.status.code()))?;
        check(bad.status.code() == Some(4), || format!("corrupted audit exit {:?}", bad.status.code()))?;
        Ok(format!("{msg}; audit exit codes 0 / 4"))
    });
    (six, seven)
}

fn criterion_8() -> Outcome {
    let s = Complex64::new(0.5f64.sqrt(), 0.0);
    let z = Complex64::new(0.0, 0.0);
    let bell = PureState::new(SubsystemDims::qubits(2).unwrap(), vec![s, z, z, s]).unwrap();
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let t = k as f64 / 49.0;
        let rho = make_isotropic_mixture(&bell, t).map_err(|e| e.to_string())?;
        let caf = caf_bipartite_lower(&rho, &[0]).map_err(|e| e.to_string())?.value;
        let w = wootters_concurrence(&rho).map_err(|e| e.to_string())?.value;
        worst = worst.max((caf - w).abs());
    }
    check(worst < 1e-8, || format!("max |caf - wootters| = {worst:e}"))?;
    Ok(format!("50 points, max |caf - wootters| = {worst:.1e}"))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let dims = SubsystemDims::qubits(4).unwrap();
    let mut smallest_gap = f64::INFINITY;
    for k in 0..200u64 {
        let rank = 1 + (k % 16) as usize;
        let rho = random_density(&dims, rank, 5000 + k).map_err(|e| e.to_string())?;
        let opts = RoofOptions { seed: k, ..RoofOptions::default() };
        let upper = convex_roof_upper(&rho, &opts).map_err(|e| e.to_string())?.value;
        let lowers = [
            wang_lower(&rho),
            zhu_fei_lower(&rho),
            thm1_lower_sq(&rho),
            thm4_combined(&rho, &[0.5, 0.5]),
        ];
        for lower in lowers {
            let lower = lower.map_err(|e| e.to_string())?;
            let lo = lower.as_concurrence();
            check(lo <= upper + SANDWICH_TOL, || {
                format!("{} = {lo} > roof {upper} on state {k}", lower.method)
            })?;
            smallest_gap = smallest_gap.min(upper - lo);
        }
    }
    let mut worst_pure: f64 = 0.0;
    for k in 0..10 {
        let psi = random_pure(&dims, 900 + k);
        let upper = convex_roof_upper(&psi.to_density(), &RoofOptions::default())
            .map_err(|e| e.to_string())?
            .value;
        worst_pure = worst_pure.max((upper - pure_concurrence_full(&psi).unwrap().value).abs());
    }
    check(worst_pure < 1e-8, || format!("pure mismatch {worst_pure:e}"))?;
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "200 mixed states, smallest gap {smallest_gap:.2e}; pure match {worst_pure:.1e}; {elapsed:.1?}"
    ))
}

fn criterion_10() -> Outcome {
    let runs: [&[&str]; 2] = [
        &["ghz-sweep", "--n", "5", "--points", "61"],
        &["example-sweep", "--points", "21", "--roof", "--iterations", "300", "--restarts", "3", "--seed", "7"],
    ];
    for args in runs {
        let serial: Vec<&str> = std::iter::once("--serial").chain(args.iter().copied()).collect();
        let outputs = [bin(args).0, bin(args).0, bin(&serial).0, bin(&serial).0];
        for o in &outputs {
            check(o.status.success(), || format!("{} exited with {}", args[0], o.status))?;
        }
        check(outputs.iter().all(|o| o.stdout == outputs[0].stdout), || {
            format!("{} output differs between runs", args[0])
        })?;
    }
    Ok("ghz-sweep and example-sweep (with roof) byte-identical across 2 parallel + 2 serial runs".into())
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, Outcome)> = vec![
        (1, criterion_1()),
        (2, criterion_2()),
        (3, criterion_3()),
        (4, criterion_4()),
        (5, criterion_5()),
    ];
    let (six, seven) = criteria_6_and_7();
    results.push((6, six));
    results.push((7, seven));
    results.push((8, criterion_8()));
    results.push((9, criterion_9()));
    results.push((10, criterion_10()));

    let mut failed = 0;
    for (n, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {n:>2}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {n:>2}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
