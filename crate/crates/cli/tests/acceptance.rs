//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::process::Command as Process;
use std::time::Instant;

use fluxring::circular::angular_distance;
use fluxring::metrology::Experiment;
use fluxring::relativistic::{evolve_corrected, min_radius, RelScale};
use fluxring::revival::fractional_lobes;
use fluxring::units::{revival_time, ELECTRON_MASS, HBAR, SPEED_OF_LIGHT};
use fluxring::{
    evolve, fidelity, make_gaussian_packet, rotate, Complex64, PacketSpec, StateVector,
};
use fluxring_cli::{commands, Command, ConfigFile, Overrides, RunConfig};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn config(command: Command, o: Overrides) -> RunConfig {
    let mut file = ConfigFile::default();
    file.apply(&o);
    RunConfig::resolve(command, &file).expect("valid config").0
}

fn mc_rms(delta_n: f64, alpha: f64, trials: usize, seed: u64) -> f64 {
    let cfg = config(
        Command::Mc,
        Overrides {
            delta_n: Some(delta_n),
            alpha: Some(alpha),
            trials: Some(trials),
            seed: Some(seed),
            ..Default::default()
        },
    );
    commands::mc(&cfg).unwrap().report.report.rms_relative_error
}

fn random_packet(rng: &mut ChaCha8Rng) -> StateVector {
    let dn = rng.random_range(1.0..=20.0);
    let n0 = rng.random_range(-5..=5);
    let phi0 = rng.random_range(0.0..TAU);
    make_gaussian_packet(&PacketSpec::new(dn, n0, phi0)).unwrap()
}

fn random_state(rng: &mut ChaCha8Rng) -> StateVector {
    let len = rng.random_range(1..=60);
    let n_min = rng.random_range(-30..=30);
    let amps = (0..len)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    StateVector::from_amplitudes(n_min, amps).unwrap()
}

fn exact_revival() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let worst = (0..100)
        .map(|_| {
            let psi = random_packet(&mut rng);
            fidelity(&evolve(&psi, 1.0, 0.0), &psi)
        })
        .fold(f64::INFINITY, f64::min);
    outcome(
        worst >= 1.0 - 1e-12,
        format!("min fidelity 1 - {:.1e} over 100 packets", 1.0 - worst),
    )
}

fn ab_shift() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let worst = (0..100)
        .map(|i| {
            let psi = if i % 2 == 0 {
                random_packet(&mut rng)
            } else {
                random_state(&mut rng)
            };
            let alpha = rng.random_range(-2.0..2.0);
            fidelity(&evolve(&psi, 1.0, alpha), &rotate(&psi, 4.0 * PI * alpha))
        })
        .fold(f64::INFINITY, f64::min);
    outcome(
        worst >= 1.0 - 1e-12,
        format!("min fidelity 1 - {:.1e} over 100 pairs", 1.0 - worst),
    )
}

/// `|(1/k) sum_r exp(-2 pi i r^2 / k) exp(2 pi i r j / k)|^2`
fn character_weight(k: u32, j: u32) -> f64 {
    let kf = k as f64;
    let c: Complex64 = (0..k)
        .map(|r| {
            let r = r as f64;
            Complex64::cis(TAU * (r * j as f64 - r * r) / kf)
        })
        .sum::<Complex64>()
        / kf;
    c.norm_sqr()
}

fn fractional_lobe_weights() -> Outcome {
    let psi = make_gaussian_packet(&PacketSpec::centered(10.0)).unwrap();
    assert_eq!(psi.default_grid_size(), 1024);
    let mut ok = true;
    let mut notes = Vec::new();
    for (k, expected) in [
        (2u32, vec![(PI, 1.0)]),
        (
            3,
            vec![
                (0.0, 1.0 / 3.0),
                (TAU / 3.0, 1.0 / 3.0),
                (2.0 * TAU / 3.0, 1.0 / 3.0),
            ],
        ),
        (4, vec![(0.0, 0.5), (PI, 0.5)]),
    ] {
        let lobes = fractional_lobes(&psi, k).unwrap();
        let mut line = format!("k={k}:");
        if lobes.len() != expected.len() {
            ok = false;
        }
        for ((c, w), (ec, ew)) in lobes.centers.iter().zip(&lobes.weights).zip(&expected) {
            let j = ((ec / TAU) * k as f64).round() as u32 % k;
            let oracle = character_weight(k, j);
            let weight_ok = if k == 2 {
                *w > 0.999
            } else {
                (w - ew).abs() < 1e-3
            };
            ok &= weight_ok && angular_distance(*c, *ec) < 1e-6 && (w - oracle).abs() < 1e-3;
            line.push_str(&format!(" {w:.5}@{c:.4}"));
        }
        notes.push(line);
    }
    outcome(ok, notes.join("; "))
}

fn precision_claim() -> Outcome {
    let start = Instant::now();
    let rms = mc_rms(10.0, 0.13, 10_000, 2024);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        (0.0033..=0.0075).contains(&rms) && secs < 60.0,
        format!("rms {rms:.5} (want [0.0033, 0.0075]) in {secs:.2} s"),
    )
}

fn error_scaling() -> Outcome {
    let r10 = mc_rms(10.0, 0.13, 10_000, 2024);
    let r20 = mc_rms(20.0, 0.13, 10_000, 2024);
    let ratio = r20 / r10;
    outcome(
        (0.4..=0.6).contains(&ratio),
        format!("rms(20)/rms(10) = {r20:.5}/{r10:.5} = {ratio:.4}"),
    )
}

fn modular_blindness() -> Outcome {
    let spec = PacketSpec::centered(10.0);
    let a = Experiment::new(spec, 0.13).trials(10_000, 606).unwrap();
    let b = Experiment::new(spec, 0.63).trials(10_000, 606).unwrap();
    let same = a
        .iter()
        .zip(&b)
        .filter(|(x, y)| x.alpha_est.to_bits() == y.alpha_est.to_bits())
        .count();
    outcome(
        same == a.len(),
        format!("{same}/{} estimates bit-identical", a.len()),
    )
}

fn feasibility_numbers() -> Outcome {
    let t = revival_time(ELECTRON_MASS, 1e-6);
    let r = min_radius(10.0, ELECTRON_MASS);
    outcome(
        (1.05e-7..=1.12e-7).contains(&t) && (2.5e-10..=3.1e-10).contains(&r),
        format!("T = {t:.4e} s, min radius = {r:.4e} m"),
    )
}

fn relativistic_consistency() -> Outcome {
    let radius = 1e-10;
    let rho = RelScale::from_si(ELECTRON_MASS, radius).unwrap().rho();
    let period = revival_time(ELECTRON_MASS, radius);
    let mut worst: f64 = 0.0;
    for n in [1i64, 5, 10] {
        let de = (HBAR * n as f64).powi(4)
            / (8.0 * SPEED_OF_LIGHT.powi(2) * ELECTRON_MASS.powi(3) * radius.powi(4));
        let expected = de * period / HBAR;
        let level = StateVector::basis(n);
        let ratio = evolve_corrected(&level, 1.0, 0.0, rho)
            .unwrap()
            .amplitude(n)
            / evolve(&level, 1.0, 0.0).amplitude(n);
        worst = worst.max((-ratio.arg() / expected - 1.0).abs());
    }
    let psi = make_gaussian_packet(&PacketSpec::new(10.0, 2, 1.0)).unwrap();
    let limit = fidelity(
        &evolve(&psi, 1.0, 0.3),
        &evolve_corrected(&psi, 1.0, 0.3, 1e30).unwrap(),
    );
    outcome(
        worst < 1e-9 && limit >= 1.0 - 1e-12,
        format!(
            "max relative phase error {worst:.1e}; rho -> inf fidelity 1 - {:.1e}",
            1.0 - limit
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let cfg = config(
        Command::Oracle,
        Overrides {
            delta_n: Some(5.0),
            alpha: Some(0.2),
            grid_size: Some(2048),
            dtau: Some(1e-5),
            taus: Some(vec![0.01]),
            ..Default::default()
        },
    );
    let row = commands::oracle(&cfg).unwrap().rows.remove(0);
    outcome(
        row.l2 < 1e-5 && (3.0..=5.0).contains(&row.ratio),
        format!("L2 {:.3e}, halved-step ratio {:.3}", row.l2, row.ratio),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::TempDir::new().unwrap();
    let run = |tag: &str, threads: &str| {
        let csv = dir.path().join(format!("{tag}.csv"));
        let json = dir.path().join(format!("{tag}.json"));
        let status = Process::new(env!("CARGO_BIN_EXE_fluxring"))
            .args([
                "mc",
                "--delta-n",
                "10",
                "--alpha",
                "0.13",
                "--trials",
                "10000",
                "--seed",
                "77",
            ])
            .args(["--threads", threads, "--trial-csv"])
            .arg(&csv)
            .arg("--out")
            .arg(&json)
            .status()
            .unwrap();
        assert!(status.success());
        (fs::read(csv).unwrap(), fs::read(json).unwrap())
    };
    let first = run("a", "4");
    let second = run("b", "4");
    let serial = run("c", "1");
    outcome(
        first == second && first == serial,
        format!(
            "repeat identical: {}, 1 vs 4 threads identical: {} ({} CSV bytes)",
            first == second,
            first == serial,
            first.0.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("exact revival", exact_revival),
        ("AB shift identity", ab_shift),
        ("fractional revival lobes", fractional_lobe_weights),
        ("single-shot precision", precision_claim),
        ("error scaling with width", error_scaling),
        ("modular blindness", modular_blindness),
        ("feasibility numbers", feasibility_numbers),
        ("relativistic consistency", relativistic_consistency),
        ("grid oracle equivalence", oracle_equivalence),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = check();
        let tag = if result.pass { "PASS" } else { "FAIL" };
        if !result.pass {
            failed += 1;
        }
        println!("{tag} [{:>2}] {name}: {}", i + 1, result.detail);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
