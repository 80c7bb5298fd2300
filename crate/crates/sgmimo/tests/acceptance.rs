//! Acceptance criteria, one printed PASS/FAIL line each.
//!
//! Run with `cargo test -p sgmimo --test acceptance -- --nocapture` to see the report.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use sgmimo::dataset;
use sgmimo::fixtures::GainFixture;
use sgmimo_core::linksim::{self, Combiner, LinkBudget};
use sgmimo_core::srd860::{self, FramePattern, Numerology, SrdBand, OBSERVATION_WINDOW_S};
use sgmimo_core::{metrics, synth, Complex, Dims, MeasurementMeta};

struct Report {
    failures: Vec<String>,
}

impl Report {
    fn check(&mut self, id: &str, ok: bool, detail: String) {
        println!(
            "[{}] criterion {id}: {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failures.push(format!("criterion {id}: {detail}"));
        }
    }
}

fn dims(n: usize, f: usize, m: usize) -> Dims {
    Dims::new(n, f, m).unwrap()
}

fn std_of(fx: GainFixture) -> f64 {
    metrics::gain_std_db(&fx.profile().unwrap()).unwrap()
}

fn criterion_1(r: &mut Report) {
    let start = Instant::now();
    let ula_nlos = std_of(GainFixture::UlaNlos);
    let ula_los = std_of(GainFixture::UlaLos);
    let ura_nlos = std_of(GainFixture::UraNlos);
    let ura_los = std_of(GainFixture::UraLos);
    let elapsed = start.elapsed();
    let pairs = [
        ("ULA NLoS-LoS", ula_nlos - ula_los, 1.0),
        ("URA NLoS-LoS", ura_nlos - ura_los, 1.8),
        ("URA-ULA NLoS", ura_nlos - ula_nlos, 1.1),
    ];
    for (name, got, want) in pairs {
        r.check(
            "1",
            (got - want).abs() <= 0.15,
            format!("std-dev delta {name} = {got:.4} dB, expected {want} +/- 0.15"),
        );
    }
    r.check(
        "1",
        elapsed < Duration::from_secs(1),
        format!("runtime {elapsed:?} < 1 s"),
    );
}

fn criterion_2(r: &mut Report) {
    let num = Numerology::default();
    let frame = srd860::build_frame(&num, &FramePattern::UplinkPilotPlusTwo).unwrap();
    let dc = frame.duty_cycle(OBSERVATION_WINDOW_S).unwrap();
    r.check(
        "2",
        frame.active_symbols() == 3 && (dc - 0.02).abs() <= 1e-6,
        format!("default frame duty cycle = {dc}, expected 0.0200 +/- 1e-6"),
    );
}

fn criterion_3(r: &mut Report) {
    let num = Numerology::default();
    let bw = srd860::occupied_bandwidth(&num);
    r.check(
        "3",
        bw == 195_000.0,
        format!("occupied bandwidth = {bw} Hz, expected 195000"),
    );
    let frame = srd860::build_frame(&num, &FramePattern::UplinkPilotPlusTwo).unwrap();
    let rep =
        srd860::check_compliance(&SrdBand::band_54(), 869.525e6, &num, &frame, 22.6, 5.9).unwrap();
    let margins = [
        rep.erp_margin_db,
        rep.duty_cycle_margin,
        rep.bandwidth_margin_hz,
        rep.carrier_margin_hz,
    ];
    r.check(
        "3",
        rep.overall && margins.iter().all(|m| *m > 0.0),
        format!(
            "band 54 at 869.525 MHz: overall={} margins erp={:.2} dB dc={:.3} bw={} Hz carrier={} Hz",
            rep.overall, rep.erp_margin_db, rep.duty_cycle_margin, rep.bandwidth_margin_hz, rep.carrier_margin_hz
        ),
    );
}

fn criterion_4(r: &mut Report) {
    let start = Instant::now();
    // 5·10⁴ snapshots × 2 subcarriers = 10⁵ realizations
    let t = synth::gen_iid_rayleigh(dims(50_000, 2, 32), 2020);
    let curve = metrics::hardening_curve(&t, &[1, 2, 8, 32]).unwrap();
    let elapsed = start.elapsed();
    for p in &curve.points {
        let want = 1.0 / p.m_selected as f64;
        r.check(
            "4",
            (p.ratio - want).abs() <= 0.1 * want,
            format!(
                "hardening M={} = {:.5}, expected {want:.5} +/- 10%",
                p.m_selected, p.ratio
            ),
        );
    }
    r.check(
        "4",
        elapsed < Duration::from_secs(10),
        format!("runtime {elapsed:?} < 10 s"),
    );
}

fn pop_std(xs: &[f64]) -> f64 {
    let mu = xs.iter().sum::<f64>() / xs.len() as f64;
    (xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}

fn criterion_5(r: &mut Report) {
    let t = synth::gen_iid_rayleigh(dims(10_000, 1, 32), 5);
    let gain = linksim::mean_combined_gain_db(&t, 32).unwrap()
        - linksim::mean_combined_gain_db(&t, 1).unwrap();
    r.check(
        "5",
        (gain - 15.05).abs() <= 0.3,
        format!("mean combined gain M=32 over M=1 = {gain:.3} dB, expected 15.05 +/- 0.3"),
    );
    let s1 = metrics::combined_gain_series(&t, 1).unwrap();
    let s32 = metrics::combined_gain_series(&t, 32).unwrap();
    let ratio = pop_std(&s32) / pop_std(&s1);
    r.check(
        "5",
        ratio < 0.25,
        format!("dB std ratio M=32/M=1 = {ratio:.4} < 0.25"),
    );
}

fn criterion_6(r: &mut Report) {
    let a = [
        Complex::new(1.0, 2.0),
        Complex::new(-0.5, 0.25),
        Complex::new(3.0, -1.0),
    ];
    let c = Complex::new(-0.7, 1.9);
    let b: Vec<Complex> = a.iter().map(|x| x * c).collect();
    let parallel = metrics::correlation_coefficient(&a, &b).unwrap();
    let e0 = [Complex::new(1.0, 0.0), Complex::new(0.0, 0.0)];
    let e1 = [Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)];
    let orth = metrics::correlation_coefficient(&e0, &e1).unwrap();
    r.check(
        "6",
        parallel == 1.0,
        format!("parallel delta = {parallel}, expected exactly 1"),
    );
    r.check(
        "6",
        orth == 0.0,
        format!("orthogonal delta = {orth}, expected exactly 0"),
    );

    for m in [2usize, 8, 32] {
        let x = synth::gen_iid_rayleigh(dims(100_000, 1, m), 600 + m as u64);
        let y = synth::gen_iid_rayleigh(dims(100_000, 1, m), 700 + m as u64);
        let mean = x
            .vectors()
            .zip(y.vectors())
            .map(|(u, v)| metrics::correlation_coefficient(u, v).unwrap())
            .sum::<f64>()
            / 100_000.0;
        let want = 1.0 / m as f64;
        r.check(
            "6",
            (mean - want).abs() <= 0.05 * want,
            format!("mean delta over 1e5 pairs M={m} = {mean:.5}, expected {want:.5} +/- 5%"),
        );
    }
}

fn criterion_7(r: &mut Report) {
    let t = synth::gen_iid_rayleigh(dims(10_000, 1, 32), 7);
    let budget = LinkBudget {
        tx_power_dbm: 0.0,
        noise_power_dbm: -100.0,
        target_snr_db: 100.0,
        target_outage: 0.01,
    };
    let s = linksim::simulate_uplink(&t, &budget, Combiner::SingleAntenna(0)).unwrap();
    let p = linksim::outage_probability(&s, budget.target_snr_db);
    let want = 1.0 - (-1.0f64).exp();
    r.check(
        "7",
        (p - want).abs() <= 0.02,
        format!("single-antenna outage at mean SNR = {p:.4}, expected {want:.4} +/- 0.02"),
    );

    let single =
        linksim::required_tx_power(&t, -100.0, Combiner::SingleAntenna(0), 10.0, 0.01).unwrap();
    let mrc = linksim::required_tx_power(&t, -100.0, Combiner::Mrc(32), 10.0, 0.01).unwrap();
    r.check(
        "7",
        single - mrc >= 15.0,
        format!("required power at 1% outage: single {single:.2} dBm, MRC(32) {mrc:.2} dBm, reduction {:.2} dB >= 15", single - mrc),
    );
}

fn run_cli(args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_sgmimo"))
        .args(args)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

fn criterion_8(r: &mut Report) {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let mut identical = true;
    let mut synth_files = Vec::new();
    for threads in ["1", "2", "8"] {
        let out = path(&format!("synth_{threads}.mmk"));
        run_cli(&[
            "synth",
            "--model",
            "rician",
            "--k-factor",
            "3",
            "--dims",
            "200,2,32",
            "--seed",
            "11",
            "--threads",
            threads,
            "--output",
            &out,
        ]);
        synth_files.push(std::fs::read(&out).unwrap());
    }
    identical &= synth_files.windows(2).all(|w| w[0] == w[1]);
    let input = path("synth_1.mmk");
    let commands: &[&[&str]] = &[
        &["analyze", "gain"],
        &["analyze", "hardening"],
        &["analyze", "correlation", "--trials", "20000"],
        &["analyze", "combined-gain"],
        &["simulate", "snr", "--csi", "ls", "--noise-dbm", "-95"],
        &["simulate", "outage", "--noise-dbm", "-95"],
        &["simulate", "required-power", "--noise-dbm", "-95"],
    ];
    for cmd in commands {
        let outs: Vec<Vec<u8>> = ["1", "2", "8"]
            .iter()
            .map(|t| {
                let mut a = cmd.to_vec();
                a.extend(["--input", &input, "--seed", "11", "--threads", t]);
                run_cli(&a)
            })
            .collect();
        identical &= outs.windows(2).all(|w| w[0] == w[1]);
    }
    r.check(
        "8",
        identical,
        format!(
            "synth + {} analyze/simulate commands byte-identical for --threads 1, 2, 8",
            commands.len()
        ),
    );

    let file = Path::new(&path("rt.mmk")).to_path_buf();
    let mut exact = 0;
    for seed in 0..100u64 {
        let d = dims(
            1 + (seed % 7) as usize,
            1 + (seed % 3) as usize,
            1 + (seed * 13 % 32) as usize,
        );
        let t = synth::gen_iid_rayleigh(d, 9_000 + seed);
        dataset::save_dataset(&t, &MeasurementMeta::for_dims(d), &file).unwrap();
        let (back, _) = dataset::load_dataset(&file).unwrap();
        let same = back.dims() == d
            && t.samples()
                .iter()
                .zip(back.samples())
                .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits());
        exact += same as usize;
    }
    r.check(
        "8",
        exact == 100,
        format!("MMK1 save/load bit-exact on {exact}/100 random tensors"),
    );
}

#[test]
fn acceptance() {
    let mut r = Report {
        failures: Vec::new(),
    };
    criterion_1(&mut r);
    criterion_2(&mut r);
    criterion_3(&mut r);
    criterion_4(&mut r);
    criterion_5(&mut r);
    criterion_6(&mut r);
    criterion_7(&mut r);
    criterion_8(&mut r);
    assert!(r.failures.is_empty(), "failed:\n{}", r.failures.join("\n"));
}
