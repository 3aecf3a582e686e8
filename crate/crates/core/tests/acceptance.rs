//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.
//!
//! Reference values are recomputed here by quadrature and direct sampling
//! rather than read back from the library, so a shared bug cannot make both
//! sides agree.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Binomial, Distribution};

use qla_core::attenuator::{new_attenuator, AttenuatorClass, DamageProfile, ExposureKind};
use qla_core::campaign::{monte_carlo, TrialSpec};
use qla_core::fiber::{
    dbm_to_watts, sbs_threshold, srs_threshold, threshold_curve, watts_to_dbm, FiberLink,
    LaserSource,
};
use qla_core::impact::mpn_ratio;
use qla_core::risk::{posterior, prob_fraction_vulnerable_exceeds, Prior, RiskQuery, TestRecord};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within_rel(x: f64, target: f64, rel: f64) -> bool {
    ((x - target) / target).abs() <= rel
}

// Independent fiber oracle. Constants are restated in SI here on purpose.
const A_EFF_M2: f64 = 50e-12;
const G_R: f64 = 6.67e-14;
const G_B: f64 = 5e-11;
const ALPHA_PER_M: f64 = 0.05 / 1000.0;
const BRILLOUIN_BW_HZ: f64 = 16e6;

/// Composite Simpson integral of exp(-αz) over [0, L].
fn oracle_l_eff(length_m: f64) -> f64 {
    let n = 2000;
    let h = length_m / n as f64;
    let f = |z: f64| (-ALPHA_PER_M * z).exp();
    let inner: f64 = (1..n)
        .map(|i| {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            w * f(i as f64 * h)
        })
        .sum();
    h / 3.0 * (f(0.0) + inner + f(length_m))
}

fn oracle_srs(length_m: f64) -> f64 {
    20.0 * A_EFF_M2 / (G_R * oracle_l_eff(length_m))
}

fn oracle_sbs(length_m: f64, linewidth_hz: f64) -> f64 {
    21.0 * A_EFF_M2 / (G_B * oracle_l_eff(length_m)) * (1.0 + linewidth_hz / BRILLOUIN_BW_HZ)
}

fn criterion_1() -> Check {
    let link = FiberLink::with_length_km(0.01);
    let laser = LaserSource {
        linewidth_ghz: 0.0,
        ..LaserSource::default()
    };
    let p = sbs_threshold(&link, &laser).map_err(|e| e.to_string())?;
    let oracle = oracle_sbs(10.0, 0.0);
    ensure(
        within_rel(p, 2.1, 0.02),
        format!("P_sbs(10 m) = {p:.4} W, want 2.1 W +/- 2%"),
    )?;
    ensure(
        within_rel(p, oracle, 1e-6),
        format!("P_sbs = {p} W disagrees with oracle {oracle} W"),
    )?;
    Ok(format!(
        "P_sbs(10 m, 0 GHz) = {p:.4} W (oracle {oracle:.4} W)"
    ))
}

fn criterion_2() -> Check {
    let mut min_below = f64::INFINITY;
    for i in 0..=400 {
        // 1 m up to just under 1 km, log spaced.
        let km = 1e-3 * 10f64.powf(3.0 * i as f64 / 400.0) * (1.0 - 1e-9);
        let p = srs_threshold(&FiberLink::with_length_km(km)).map_err(|e| e.to_string())?;
        min_below = min_below.min(p);
        ensure(
            p > 10.0,
            format!("P_srs({km} km) = {p} W is not above 10 W"),
        )?;
    }
    let p1 = srs_threshold(&FiberLink::with_length_km(1.0)).map_err(|e| e.to_string())?;
    let oracle = oracle_srs(1000.0);
    ensure(
        within_rel(p1, 15.4, 0.02),
        format!("P_srs(1 km) = {p1:.3} W, want 15.4 W +/- 2%"),
    )?;
    ensure(
        within_rel(p1, oracle, 1e-6),
        format!("P_srs(1 km) = {p1} W vs oracle {oracle} W"),
    )?;
    Ok(format!(
        "P_srs > 10 W below 1 km (min {min_below:.3} W); P_srs(1 km) = {p1:.3} W (oracle {oracle:.3} W)"
    ))
}

fn criterion_3() -> Check {
    let pts = threshold_curve(
        &FiberLink::default(),
        &LaserSource::default(),
        0.01,
        20.0,
        200,
    )
    .map_err(|e| e.to_string())?;
    ensure(pts.len() == 200, "expected 200 rows")?;
    for w in pts.windows(2) {
        ensure(
            w[1].p_srs_w < w[0].p_srs_w,
            format!("SRS not decreasing at {} km", w[1].length_km),
        )?;
        ensure(
            w[1].p_sbs_w < w[0].p_sbs_w,
            format!("SBS not decreasing at {} km", w[1].length_km),
        )?;
    }
    let ratios: Vec<f64> = pts.iter().map(|p| p.p_sbs_w / p.p_srs_w).collect();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| {
            (a.min(r), b.max(r))
        });
    ensure(
        (hi - lo) / lo < 1e-12,
        format!("SBS/SRS ratio varies: [{lo}, {hi}]"),
    )?;
    let expect = (21.0 / G_B) / (20.0 / G_R) * (1.0 + 10e9 / BRILLOUIN_BW_HZ);
    ensure(
        within_rel(lo, expect, 1e-9),
        format!("ratio {lo} vs oracle {expect}"),
    )?;
    Ok(format!(
        "200 rows, both columns strictly decreasing, SBS/SRS = {lo:.5} at every length"
    ))
}

fn criterion_4() -> Check {
    let anchors = [(25.0, 0.316), (36.0, 3.98), (39.5, 8.91)];
    for (dbm, w) in anchors {
        let got = dbm_to_watts(dbm);
        ensure(
            within_rel(got, w, 0.005),
            format!("{dbm} dBm -> {got} W, want {w} W"),
        )?;
        let back = watts_to_dbm(w).map_err(|e| e.to_string())?;
        ensure(
            (back - dbm).abs() < 0.03,
            format!("{w} W -> {back} dBm, want {dbm} dBm"),
        )?;
        // 1 mW reference, restated.
        ensure(
            within_rel(got, 1e-3 * 10f64.powf(dbm / 10.0), 1e-12),
            "oracle mismatch",
        )?;
    }
    Ok("25 dBm = 316 mW, 36 dBm = 3.98 W, 39.5 dBm = 8.91 W".into())
}

fn criterion_5() -> Check {
    let up = mpn_ratio(-1.0);
    let down = mpn_ratio(3.0);
    ensure((up - 1.259).abs() <= 0.001, format!("mpn_ratio(-1) = {up}"))?;
    ensure(
        (down - 0.501).abs() <= 0.001,
        format!("mpn_ratio(+3) = {down}"),
    )?;
    Ok(format!(
        "mpn_ratio(-1 dB) = {up:.4}, mpn_ratio(+3 dB) = {down:.4}"
    ))
}

/// Direct simulation of the predictive: p from the beta posterior, then the
/// count among `m` untested systems. Returns (estimate, standard error).
fn mc_tail(alpha: f64, beta: f64, m: u64, above: u64, n: u64, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prior = Beta::new(alpha, beta).expect("valid beta");
    let mut hits = 0u64;
    for _ in 0..n {
        let p: f64 = prior.sample(&mut rng);
        let k = Binomial::new(m, p)
            .expect("valid binomial")
            .sample(&mut rng);
        if k > above {
            hits += 1;
        }
    }
    let est = hits as f64 / n as f64;
    (est, (est * (1.0 - est) / n as f64).sqrt())
}

fn criterion_6() -> Check {
    let cases = [
        (
            TestRecord {
                n_tested: 5,
                n_compromised: 4,
                n_dos: 1,
            },
            0.995,
        ),
        (
            TestRecord {
                n_tested: 2,
                n_compromised: 2,
                n_dos: 0,
            },
            0.990,
        ),
    ];
    let mut notes = Vec::new();
    for (i, (record, target)) in cases.into_iter().enumerate() {
        let query = RiskQuery {
            record,
            population_total: 50,
            vulnerable_fraction: 0.2,
            prior: Prior::Jeffreys,
            ..RiskQuery::default()
        };
        let p = prob_fraction_vulnerable_exceeds(&query).map_err(|e| e.to_string())?;
        ensure(
            (p - target).abs() <= 0.005,
            format!("{record:?}: {p}, want {target} +/- 0.005"),
        )?;

        let (alpha, beta) = posterior(&record, Prior::Jeffreys).map_err(|e| e.to_string())?;
        let m = query.untested();
        let above = (0.2 * m as f64).floor() as u64;
        let (est, se) = mc_tail(alpha, beta, m, above, 1_000_000, 1000 + i as u64);
        ensure(
            (p - est).abs() <= 3.0 * se,
            format!("{record:?}: exact {p} vs Monte Carlo {est} +/- {se}"),
        )?;
        notes.push(format!("{p:.4} (MC {est:.4} +/- {se:.1e})"));
    }
    Ok(format!(
        "P(5,4,N=50) = {}, P(2,2,N=50) = {}",
        notes[0], notes[1]
    ))
}

struct Calibration {
    class: AttenuatorClass,
    successes: u64,
    failures: u64,
    total: u64,
    delta_db: f64,
    threshold_dbm: f64,
}

fn criterion_7() -> Check {
    let table = [
        Calibration {
            class: AttenuatorClass::Fixed,
            successes: 4,
            failures: 6,
            total: 12,
            delta_db: -1.37,
            threshold_dbm: 34.0,
        },
        Calibration {
            class: AttenuatorClass::MemsVoa,
            successes: 8,
            failures: 4,
            total: 13,
            delta_db: -5.34,
            threshold_dbm: 36.2,
        },
        Calibration {
            class: AttenuatorClass::VdmcVoa,
            successes: 18,
            failures: 0,
            total: 25,
            delta_db: -9.59,
            threshold_dbm: 34.5,
        },
    ];
    let n = 1000u64;
    let mut notes = Vec::new();
    for row in &table {
        let (s, _) = monte_carlo(&TrialSpec::new(row.class), n, 2024).map_err(|e| e.to_string())?;
        let check_rate = |name: &str, got: f64, count: u64| {
            let p = count as f64 / row.total as f64;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            ensure(
                (got - p).abs() <= 3.0 * sigma,
                format!(
                    "{}: {name} rate {got} vs {p:.4} (3 sigma = {:.4})",
                    row.class,
                    3.0 * sigma
                ),
            )
        };
        check_rate("success", s.success_rate, row.successes)?;
        check_rate("critical failure", s.critical_failure_rate, row.failures)?;
        let delta = s.mean_success_delta_db.ok_or("no successes")?;
        let thr = s.mean_attack_threshold_dbm.ok_or("no successes")?;
        ensure(
            (delta - row.delta_db).abs() <= 1.0,
            format!("{}: mean delta {delta}", row.class),
        )?;
        ensure(
            (thr - row.threshold_dbm).abs() <= 1.0,
            format!("{}: mean threshold {thr}", row.class),
        )?;
        notes.push(format!(
            "{} {:.3}/{:.3} {delta:.2} dB @ {thr:.2} dBm",
            row.class, s.success_rate, s.critical_failure_rate
        ));
    }
    let (manual, reports) = monte_carlo(&TrialSpec::new(AttenuatorClass::ManualVoa), n, 2024)
        .map_err(|e| e.to_string())?;
    ensure(
        manual.inconclusive_rate == 1.0,
        format!("manual inconclusive rate {}", manual.inconclusive_rate),
    )?;
    let top = reports
        .iter()
        .flat_map(|r| r.steps.iter())
        .map(|s| s.power_dbm_set)
        .fold(f64::NEG_INFINITY, f64::max);
    ensure(
        top <= 39.5 + 1e-9,
        format!("manual campaign reached {top} dBm"),
    )?;
    notes.push("manual-voa 100% inconclusive".into());
    Ok(notes.join("; "))
}

fn criterion_8() -> Check {
    let mut profile = DamageProfile::fixed();
    profile.success_probability = 1.0;
    profile.failure_probability = 0.0;
    profile.failure_threshold_dbm = None;
    let mut drops = Vec::new();
    for seed in 0..200u64 {
        let state = new_attenuator(AttenuatorClass::Fixed, profile, 25.0, seed)
            .map_err(|e| e.to_string())?;
        let base = state.attenuation_at_setpoint();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (hot, outcome) = state
            .apply_exposure(4.0, 300.0, &mut rng)
            .map_err(|e| e.to_string())?;
        ensure(
            outcome.kind == ExposureKind::TemporaryDrop,
            format!("seed {seed}: {outcome:?}"),
        )?;
        let drop = base - hot.attenuation_at_setpoint();
        let cooled = hot.cool_down(600.0);
        let residual = (cooled.attenuation_at_setpoint() - base).abs();
        ensure(
            residual <= 0.1,
            format!("seed {seed}: {residual} dB off baseline after 10 min"),
        )?;
        drops.push(drop);
    }
    let mean = drops.iter().sum::<f64>() / drops.len() as f64;
    let inside =
        drops.iter().filter(|d| (*d - 2.0).abs() <= 0.5).count() as f64 / drops.len() as f64;
    ensure(
        (mean - 2.0).abs() <= 0.5,
        format!("mean shutoff drop {mean} dB"),
    )?;
    ensure(
        inside >= 0.95,
        format!("only {:.1}% of drops within 2 +/- 0.5 dB", 100.0 * inside),
    )?;
    Ok(format!(
        "4 W / 300 s: mean shutoff drop {mean:.2} dB ({:.1}% within 2 +/- 0.5), back within 0.1 dB after 600 s",
        100.0 * inside
    ))
}

fn criterion_9() -> Check {
    let floor = DamageProfile::vdmc_voa().insertion_loss_floor_db;
    let mut lowest = f64::INFINITY;
    let mut optimal_checked = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for seed in 0..200u64 {
        let setpoint = rng.random_range(0.0..80.0);
        let mut profile = DamageProfile::vdmc_voa();
        profile.success_probability = 1.0;
        let mut state = new_attenuator(AttenuatorClass::VdmcVoa, profile, setpoint, seed)
            .map_err(|e| e.to_string())?;
        let threshold_w = dbm_to_watts(state.sampled_attack_threshold_dbm.ok_or("no threshold")?);
        // A first burst at the 10 s threshold burns an optimal dip; later
        // harder bursts try to ablate further.
        let mut first = true;
        for relative in [1.0, 1.0, 1.8, 2.5, 3.0] {
            if state.destroyed {
                break;
            }
            let (next, outcome) = state
                .apply_exposure(relative * threshold_w, 10.0, &mut rng)
                .map_err(|e| e.to_string())?;
            state = next.cool_down(10.0);
            if first && outcome.kind == ExposureKind::PermanentDrop {
                first = false;
                optimal_checked += 1;
                for off in [0.5, 0.75, 1.0, 2.0] {
                    for s in [setpoint - off, setpoint + off] {
                        if !(0.0..=80.0).contains(&s) {
                            continue;
                        }
                        let got = state.attenuation(s).map_err(|e| e.to_string())?;
                        let base = state.baseline_db(s);
                        ensure(
                            (got - base).abs() < 1e-9,
                            format!(
                                "seed {seed}: dip at {setpoint} still {} dB at {s}",
                                got - base
                            ),
                        )?;
                    }
                }
            }
            if state.destroyed {
                break;
            }
            for i in 0..=1600 {
                let s = i as f64 * 0.05;
                let a = state.attenuation(s).map_err(|e| e.to_string())?;
                lowest = lowest.min(a);
                ensure(
                    a >= floor - 1e-12,
                    format!("seed {seed}: {a} dB at setting {s}"),
                )?;
            }
        }
    }
    ensure(
        optimal_checked >= 150,
        format!("only {optimal_checked} optimal dips exercised"),
    )?;
    Ok(format!(
        "lowest reading {lowest:.3} dB (floor {floor} dB); {optimal_checked} optimal dips return to baseline 0.5 dB away"
    ))
}

fn criterion_10() -> Check {
    let mut compared = 0;
    for class in AttenuatorClass::ALL {
        let spec = TrialSpec::new(class);
        let run = || -> Result<String, String> {
            let (summary, reports) = monte_carlo(&spec, 200, 77).map_err(|e| e.to_string())?;
            let single = spec.run_trial(5, 0).map_err(|e| e.to_string())?;
            serde_json::to_string(&(summary, reports, single)).map_err(|e| e.to_string())
        };
        let (a, b) = (run()?, run()?);
        ensure(
            a == b,
            format!("{class}: library output differs between runs"),
        )?;
        compared += 1;
    }
    let exe = env!("CARGO_BIN_EXE_qla");
    let invocations: [&[&str]; 3] = [
        &[
            "campaign", "--class", "mems-voa", "--trials", "1", "--seed", "7",
        ],
        &[
            "campaign", "--class", "vdmc-voa", "--trials", "300", "--seed", "1",
        ],
        &[
            "campaign", "--class", "fixed", "--trials", "300", "--seed", "3",
        ],
    ];
    for args in invocations {
        let out = || {
            Command::new(exe)
                .args(args)
                .env_remove("QLA_CONFIG")
                .output()
                .map_err(|e| e.to_string())
        };
        let (a, b) = (out()?, out()?);
        ensure(a.status.success(), format!("qla {args:?} failed: {a:?}"))?;
        ensure(
            !a.stdout.is_empty() && a.stdout == b.stdout,
            format!("qla {args:?} output differs"),
        )?;
        compared += 1;
    }
    Ok(format!(
        "{compared} pipelines byte-identical across two runs"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("SBS baseline at 10 m", criterion_1),
        ("SRS regime below 1 km", criterion_2),
        ("threshold curve shape", criterion_3),
        ("dBm anchors", criterion_4),
        ("mean photon number anchors", criterion_5),
        ("risk reproduction", criterion_6),
        ("campaign calibration", criterion_7),
        ("fixed attenuator thermodynamics", criterion_8),
        ("VDMC floor and locality", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS criterion {:>2} {name}: {detail} [{secs:.2} s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2} {name}: {why} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
