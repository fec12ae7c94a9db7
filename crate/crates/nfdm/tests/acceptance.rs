//! Acceptance criteria 1 to 11 at desk scale, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach stdout.
//! `ACCEPTANCE_ONLY=4,9` runs a subset. Criteria listed in `KNOWN_GAPS`
//! print their result but do not fail the run.

use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::Matrix3;
use nfdm::config::{DecodeGamma, ExperimentConfig, Mode, Model, SweepSection};
use nfdm::harness::{run_experiment, Aggregate};
use nfdm_core::dsp::{
    apply_equalizer, demap_frame, estimate_guard, map_bits, nfdm_demodulate, nfdm_modulate,
    ofdm_demodulate, ofdm_modulate, train_equalizer, u_encode, u_to_qhat, BurstConfig, NfdmLink,
    SymbolFrame,
};
use nfdm_core::fiber::{
    aggregate_dgd, denormalize, normalization_scales, normalize, sample_pmd_realization,
    ssfm_propagate, Amplification, FiberParams, FieldState, SsfmOptions,
};
use nfdm_core::grid::TimeGrid;
use nfdm_core::metrics::{maxwell_fit, q_from_ber, required_taps};
use nfdm_core::nft::{
    forward_nft, forward_nft_direct, forward_nft_scalar, inverse_nft, inverse_nft_exact,
    propagate_spectrum, scattering_at, scattering_to_spectrum, unimodularity_residual,
    ContinuousSpectrum, Regime,
};
use nfdm_core::signal::{relative_l2, DualPolSignal};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const J: Complex64 = Complex64::new(0.0, 1.0);

/// Criteria that fail at desk scale for reasons recorded in the notes.
const KNOWN_GAPS: &[usize] = &[8, 10];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_frame(c: &BurstConfig, seed: u64) -> SymbolFrame {
    let mut r = rng(seed);
    let bits: Vec<u8> = (0..c.bits_per_frame())
        .map(|_| r.random_range(0..2))
        .collect();
    map_bits(&bits, c).unwrap()
}

fn dbm(p: f64) -> f64 {
    1e-3 * 10f64.powf(p / 10.0)
}

/// Samples per subcarrier for the system-level criteria, half the default.
const DESK_OVERSAMPLING: usize = 2;

fn run(c: &ExperimentConfig) -> Vec<Aggregate> {
    let mut c = c.clone();
    c.burst.oversampling = DESK_OVERSAMPLING;
    run_experiment(&c).unwrap().aggregates
}

/// Q of a point, or the Q implied by the upper end of the BER interval when
/// no errors were counted (a lower bound).
fn q_or_bound(a: &Aggregate) -> (f64, bool) {
    match a.q_db {
        Some(q) => (q, false),
        None => (q_from_ber(a.ci_high).unwrap(), true),
    }
}

fn peak(points: &[&Aggregate]) -> (f64, f64, bool) {
    points
        .iter()
        .map(|a| {
            let (q, bound) = q_or_bound(a);
            (a.power_dbm, q, bound)
        })
        .fold((f64::NAN, f64::NEG_INFINITY, false), |best, x| {
            if x.1 > best.1 {
                x
            } else {
                best
            }
        })
}

// 1 ----------------------------------------------------------------------

fn displaced_gaussians(n: usize, peak: f64) -> (ContinuousSpectrum, TimeGrid) {
    let grid = TimeGrid::centered(64.0, n).unwrap();
    let s2 = 2.0; // σ²
    let cs = ContinuousSpectrum::from_fn(grid.spectral(), |l| {
        (
            Complex64::new(peak * (-(l - 3.0).powi(2) / (2.0 * s2)).exp(), 0.0),
            Complex64::new(0.0, peak * (-(l + 3.0).powi(2) / (2.0 * s2)).exp()),
        )
    });
    (cs, grid)
}

fn round_trip(n: usize, peak: f64) -> f64 {
    let (cs, grid) = displaced_gaussians(n, peak);
    let q = inverse_nft(&cs, &grid).unwrap();
    scattering_to_spectrum(&forward_nft(&q).unwrap())
        .unwrap()
        .relative_error(&cs)
}

fn criterion_1() -> Outcome {
    let (lo, hi) = (round_trip(2048, 0.5), round_trip(2048, 0.9));
    let (lo2, hi2) = (round_trip(4096, 0.5), round_trip(4096, 0.9));
    outcome(
        lo <= 1e-2 && hi > 2.0 * lo && lo2 < lo && hi2 < hi,
        format!("peak 0.5: {lo:.2e} -> {lo2:.2e}, peak 0.9: {hi:.2e} -> {hi2:.2e} (2048 -> 4096 samples)"),
    )
}

// 2 ----------------------------------------------------------------------

fn criterion_2() -> Outcome {
    let mut r = rng(21);
    let grid = TimeGrid::centered(24.0, 1024).unwrap();
    let mut worst: f64 = 0.0;
    let mut b2_zero = true;
    for _ in 0..10 {
        let amp = r.random_range(0.1..1.5);
        let width = r.random_range(0.5..3.0);
        let chirp = r.random_range(-1.0..1.0);
        let s = DualPolSignal::from_fn(grid, |t| {
            (
                Complex64::from_polar(amp * (-(t / width).powi(2)).exp(), chirp * t * t),
                ZERO,
            )
        })
        .unwrap();
        let v = forward_nft(&s).unwrap();
        let (a, b) = forward_nft_scalar(&s.q1, &grid).unwrap();
        worst = worst.max(relative_l2(&[&v.a, &v.b1], &[&a, &b]));
        b2_zero &= v.b2.iter().all(|x| x.norm() == 0.0);
    }
    outcome(
        worst <= 1e-12 && b2_zero,
        format!("max relative error {worst:.1e} over 10 signals, b2 identically 0: {b2_zero}"),
    )
}

// 3 ----------------------------------------------------------------------

fn rect_pulse(grid: TimeGrid) -> DualPolSignal {
    DualPolSignal::from_fn(grid, |t| {
        if (0.0..2.0).contains(&t) {
            (Complex64::new(0.4, 0.0), Complex64::new(0.3, 0.0))
        } else {
            (ZERO, ZERO)
        }
    })
    .unwrap()
}

/// Scattering data of the constant pulse on [0, 2] from the 3×3 matrix
/// exponential of the Lax operator.
fn rect_oracle(lambda: f64) -> [Complex64; 3] {
    let (q1, q2) = (Complex64::new(0.4, 0.0), Complex64::new(0.3, 0.0));
    let p = Matrix3::new(
        -J * lambda,
        q1,
        q2,
        -q1.conj(),
        J * lambda,
        ZERO,
        -q2.conj(),
        ZERO,
        J * lambda,
    );
    let m = (p * Complex64::new(2.0, 0.0)).exp();
    let v = m.column(0);
    let e = Complex64::from_polar(1.0, 2.0 * lambda);
    [v[0] * e, v[1] / e, v[2] / e]
}

fn criterion_3() -> Outcome {
    let dt = 2f64.powi(-16);
    let s = rect_pulse(TimeGrid::new(-8.0, (16.0 / dt) as usize, dt).unwrap());
    let lambdas: Vec<f64> = (0..16).map(|i| -3.0 + 0.4 * i as f64).collect();
    let oracle_err = scattering_at(&s, &lambdas)
        .unwrap()
        .iter()
        .zip(&lambdas)
        .flat_map(|(g, &l)| {
            let w = rect_oracle(l);
            (0..3).map(move |i| (g[i] - w[i]).norm())
        })
        .fold(0.0, f64::max);
    let s = rect_pulse(TimeGrid::centered(16.0, 4096).unwrap());
    let fast = forward_nft(&s).unwrap();
    let direct = forward_nft_direct(&s, &s.grid.spectral()).unwrap();
    let fast_err = [
        (&fast.a, &direct.a),
        (&fast.b1, &direct.b1),
        (&fast.b2, &direct.b2),
    ]
    .iter()
    .flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| (p - q).norm()))
    .fold(0.0, f64::max);
    outcome(
        oracle_err <= 1e-8 && fast_err <= 1e-8,
        format!("direct vs matrix exponential {oracle_err:.1e}, fast vs direct {fast_err:.1e}"),
    )
}

// 4 ----------------------------------------------------------------------

fn criterion_4() -> Outcome {
    let config = BurstConfig::default();
    let params = FiberParams::default().lossless();
    let scales = normalization_scales(&params, false).unwrap();
    let link = NfdmLink::new(scales, dbm(-3.0), params.total_length());
    let grid = link.nft_grid(&config).unwrap();
    let u = u_encode(
        &random_frame(&config, 4),
        &config,
        &grid,
        link.amplitude(&config),
    )
    .unwrap();
    let cs = u_to_qhat(&u);
    let q = inverse_nft_exact(&cs, &grid).unwrap();
    let opts = SsfmOptions {
        step_size: 100.0,
        amplification: Amplification::Off,
    };
    let out = ssfm_propagate(&denormalize(&q, &scales), &params, None, &mut rng(0), &opts).unwrap();
    let got = scattering_to_spectrum(&forward_nft(&normalize(&out, &scales)).unwrap()).unwrap();
    let want = propagate_spectrum(
        &cs,
        scales.distance(params.total_length()),
        Regime::Focusing,
    );
    let err = got.relative_error(&want);
    outcome(
        err <= 1e-2,
        format!("relative spectral error {err:.2e} after 2000 km at -3 dBm"),
    )
}

// 5 ----------------------------------------------------------------------

fn criterion_5() -> Outcome {
    let p = FiberParams::default();
    let c = BurstConfig::default();
    let g = estimate_guard(p.beta2, p.total_length(), c.bandwidth());
    let rate = c.effective_bit_rate();
    outcome(
        (g.delta_t / 15e-9 - 1.0).abs() <= 0.05 && (rate - 44.8e9).abs() < 1e-3,
        format!(
            "guard {:.2} ns, effective rate {:.4} Gbit/s per polarization",
            g.delta_t * 1e9,
            rate / 1e9
        ),
    )
}

// 6 ----------------------------------------------------------------------

fn criterion_6() -> Outcome {
    let osnr = vec![10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 20.0, 24.0];
    let case = |id: &str, model: Model, g: DecodeGamma| {
        let mut c = ExperimentConfig {
            experiment_id: id.into(),
            model,
            n_bursts: 16,
            n_realizations: 1,
            step_size_m: 500.0,
            master_seed: 6,
            ..Default::default()
        };
        c.receiver.decode_gamma = g;
        c.sweep = SweepSection {
            power_dbm: vec![-3.1],
            osnr_db: osnr.clone(),
            ..Default::default()
        };
        run(&c)
    };
    let eff = case("lossy-gamma-eff", Model::Lossy, DecodeGamma::Eff);
    let plain = case("lossy-gamma", Model::Lossy, DecodeGamma::Plain);
    let tl = case(
        "transformed-lossless",
        Model::TransformedLossless,
        DecodeGamma::Eff,
    );
    let overlap = |a: &Aggregate, b: &Aggregate| a.ci_low <= b.ci_high && b.ci_low <= a.ci_high;
    let matching = eff.iter().zip(&tl).filter(|(a, b)| overlap(a, b)).count();
    let high: Vec<usize> = (0..osnr.len()).filter(|&i| osnr[i] >= 20.0).collect();
    let worse = high.iter().all(|&i| plain[i].ci_low > tl[i].ci_high);
    let show = |v: &[Aggregate], i: usize| format!("{:.1e}", v[i].ber);
    outcome(
        matching == osnr.len() && worse,
        format!(
            "gamma_eff vs transformed-lossless inside the 95% band at {matching}/{} OSNRs; at {} dB: gamma_eff {}, transformed {}, plain gamma {}",
            osnr.len(),
            osnr[osnr.len() - 1],
            show(&eff, osnr.len() - 1),
            show(&tl, osnr.len() - 1),
            show(&plain, osnr.len() - 1)
        ),
    )
}

// 7 ----------------------------------------------------------------------

/// Power at which the piecewise-linear curve `(p, q)` reaches `target`.
fn power_at(curve: &[(f64, f64)], target: f64) -> Option<f64> {
    curve.windows(2).find_map(|w| {
        let ((p0, q0), (p1, q1)) = (w[0], w[1]);
        ((q0 - target) * (q1 - target) <= 0.0 && q0 != q1)
            .then(|| p0 + (target - q0) * (p1 - p0) / (q1 - q0))
    })
}

fn criterion_7() -> Outcome {
    let curve = |npol: usize, powers: Vec<f64>| -> Vec<(f64, f64)> {
        let mut c = ExperimentConfig {
            experiment_id: format!("{npol}pol"),
            n_polarizations: npol,
            n_bursts: 24,
            n_realizations: 1,
            step_size_m: 500.0,
            master_seed: 7,
            ..Default::default()
        };
        c.sweep.power_dbm = powers;
        run(&c)
            .iter()
            .filter_map(|a| Some((a.power_dbm, a.q_db?)))
            .collect()
    };
    let single = curve(1, vec![-20.0, -18.0, -16.0, -14.0, -12.0]);
    let dual = curve(2, vec![-16.0, -15.0, -14.0, -13.0, -12.0]);
    let offsets: Vec<f64> = dual
        .iter()
        .filter_map(|&(p, q)| Some(p - power_at(&single, q)?))
        .collect();
    if offsets.is_empty() {
        return outcome(false, "curves do not overlap in Q".into());
    }
    let mean = offsets.iter().sum::<f64>() / offsets.len() as f64;
    outcome(
        (mean - 3.0).abs() <= 0.5,
        format!(
            "offset {mean:.2} dB (mean of {} matched points)",
            offsets.len()
        ),
    )
}

// 8 ----------------------------------------------------------------------

fn criterion_8() -> Outcome {
    let sweep = |id: &str, mode: Mode, powers: Vec<f64>| {
        let mut c = ExperimentConfig {
            experiment_id: id.into(),
            mode,
            n_bursts: 8,
            n_realizations: 1,
            step_size_m: 500.0,
            master_seed: 8,
            ..Default::default()
        };
        c.sweep.power_dbm = powers;
        run(&c)
    };
    let nfdm = sweep("nfdm", Mode::Nfdm, vec![-1.0, 1.0, 3.0, 5.0, 7.0]);
    let ofdm = sweep("ofdm", Mode::Ofdm, vec![-7.0, -5.0, -3.0, -1.0, 1.0]);
    let dbp = sweep("ofdm-dbp", Mode::OfdmDbp, vec![-1.0, 1.0, 3.0, 5.0]);
    let (pn, qn, _) = peak(&nfdm.iter().collect::<Vec<_>>());
    let (po, qo, _) = peak(&ofdm.iter().collect::<Vec<_>>());
    let (pd, qd, bound) = peak(&dbp.iter().collect::<Vec<_>>());
    let gain = qn - qo;
    let pass = (gain - 6.4).abs() <= 1.5 && pn > po && (qd - qn).abs() <= 1.0;
    outcome(
        pass,
        format!(
            "NFDM peak {qn:.2} dB at {pn} dBm, OFDM peak {qo:.2} dB at {po} dBm, gain {gain:.2} dB (target 6.4 +/- 1.5); DBP peak {}{qd:.2} dB at {pd} dBm",
            if bound { ">= " } else { "" }
        ),
    )
}

// 9 ----------------------------------------------------------------------

fn criterion_9() -> Outcome {
    let p = FiberParams {
        pmd_coeff: FiberParams::pmd_from_ps_per_sqrt_km(0.1),
        ..FiberParams::default()
    };
    let mut r = rng(9);
    let dgd: Vec<f64> = (0..1000)
        .map(|k| aggregate_dgd(&sample_pmd_realization(&p, k, &mut r)))
        .collect();
    let fit = maxwell_fit(&dgd).unwrap();
    let rms_ps = fit.rms * 1e12;
    let ratio = fit.mean / fit.rms;
    let want = (8.0 / (3.0 * PI)).sqrt();
    outcome(
        fit.p_value > 0.01
            && (rms_ps / 4.47 - 1.0).abs() <= 0.05
            && (ratio / want - 1.0).abs() <= 0.02,
        format!(
            "KS p = {:.3}, rms {rms_ps:.2} ps, mean/rms {ratio:.4} (Maxwell {want:.4})",
            fit.p_value
        ),
    )
}

// 10 ---------------------------------------------------------------------

fn criterion_10() -> Outcome {
    let taps = vec![1, 2, 3, 5, 7, 9, 13, 17, 25];
    let powers = vec![-1.5, 0.5, 2.5];
    let base = |id: &str| ExperimentConfig {
        experiment_id: id.into(),
        n_bursts: 4,
        n_realizations: 20,
        step_size_m: 500.0,
        master_seed: 10,
        ..Default::default()
    };
    let pmd = |d: f64| {
        let mut c = base(&format!("pmd-{d}"));
        c.model = Model::LossyPmd;
        c.link.pmd_ps_per_sqrt_km = d;
        c.sweep = SweepSection {
            power_dbm: powers.clone(),
            taps: taps.clone(),
            ..Default::default()
        };
        run(&c)
    };
    let d0 = pmd(0.0);
    let d2 = pmd(0.2);
    let mut reference = base("no-birefringence");
    reference.sweep.power_dbm = powers.clone();
    let nobi = run(&reference);

    // plateau of Q against taps at 0.5 dBm
    let curve: Vec<(usize, f64)> = d2
        .iter()
        .filter(|a| a.power_dbm == 0.5)
        .map(|a| (a.n_taps.unwrap(), q_or_bound(a).0))
        .collect();
    let slope_ok = |i: usize| {
        curve[i..]
            .windows(2)
            .all(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0) as f64).abs() <= 0.2)
    };
    let onset = (0..curve.len()).find(|&i| slope_ok(i)).map(|i| curve[i].0);
    // tap rule at the rate actually simulated, rounded up onto the sweep grid
    let config = BurstConfig {
        oversampling: DESK_OVERSAMPLING,
        ..BurstConfig::default()
    };
    let rule = |d: f64| {
        let fiber = FiberParams {
            pmd_coeff: FiberParams::pmd_from_ps_per_sqrt_km(d),
            ..FiberParams::default()
        };
        let n = required_taps(fiber.pmd_coeff, fiber.total_length(), 1.0 / config.dt());
        (n, taps.iter().copied().find(|&t| t >= n).unwrap_or(n))
    };
    let (needed, t2) = rule(0.2);
    let (_, t0) = rule(0.0);
    let plateau_ok = onset.is_some_and(|o| o <= t2);

    let at_taps = |v: &[Aggregate], n: usize| -> Vec<Aggregate> {
        v.iter().filter(|a| a.n_taps == Some(n)).cloned().collect()
    };
    let peak_at = |v: &[Aggregate], n: usize| peak(&at_taps(v, n).iter().collect::<Vec<_>>()).1;
    let (q0, q2) = (peak_at(&d0, t0), peak_at(&d2, t2));
    let (_, qn, _) = peak(&nobi.iter().collect::<Vec<_>>());
    let pmd_penalty = q0 - q2;
    let eq_penalty = qn - q0;
    let pass = plateau_ok && pmd_penalty <= 0.5 && (eq_penalty - 1.2).abs() <= 0.5;
    let show = |v: &[(usize, f64)]| {
        v.iter()
            .map(|(n, q)| format!("{n}:{q:.2}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let d0_peaks: Vec<(usize, f64)> = taps.iter().map(|&n| (n, peak_at(&d0, n))).collect();
    outcome(
        pass,
        format!(
            "D=0.2 Q vs taps at 0.5 dBm [{}], plateau from {} taps (rule {needed}); D=0 peak Q vs taps [{}]; \
             peak Q no-birefringence {qn:.2}, D=0/{t0} taps {q0:.2}, D=0.2/{t2} taps {q2:.2}; \
             PMD penalty {pmd_penalty:.2} dB (<= 0.5), equalization penalty {eq_penalty:.2} dB (1.2 +/- 0.5)",
            show(&curve),
            onset.map_or("-".into(), |o| o.to_string()),
            show(&d0_peaks)
        ),
    )
}

// 11 ---------------------------------------------------------------------

fn gaussian_field(grid: TimeGrid, width: f64, peak: f64) -> FieldState {
    let a1: Vec<Complex64> = grid
        .times()
        .iter()
        .map(|t| Complex64::new(peak * (-t * t / (2.0 * width * width)).exp(), 0.0))
        .collect();
    let a2 = a1.iter().map(|x| x * Complex64::new(0.0, 0.5)).collect();
    FieldState::new(a1, a2, grid).unwrap()
}

fn random_unitary(r: &mut ChaCha8Rng) -> [[Complex64; 2]; 2] {
    let th: f64 = r.random_range(0.0..PI);
    let (p1, p2, p3): (f64, f64, f64) = (r.random(), r.random(), r.random());
    let (c, s) = (th.cos(), th.sin());
    let e = |x: f64| Complex64::from_polar(1.0, 6.0 * x);
    [[e(p1) * c, e(p2) * s], [-e(p3 - p2 + p1) * s, e(p3) * c]]
}

fn criterion_11() -> Outcome {
    let mut checks: Vec<(&str, bool, String)> = Vec::new();

    // unimodularity at low and high power
    let grid = TimeGrid::centered(32.0, 2048).unwrap();
    let uni = [0.1, 3.0]
        .iter()
        .map(|&amp| {
            let s = DualPolSignal::from_fn(grid, |t| {
                let e = (-(t / 2.0).powi(2)).exp();
                (
                    Complex64::from_polar(amp * e, t),
                    Complex64::new(0.0, 0.6 * amp * e),
                )
            })
            .unwrap();
            unimodularity_residual(&forward_nft(&s).unwrap())
        })
        .fold(0.0, f64::max);
    checks.push(("unimodularity", uni <= 1e-12, format!("{uni:.1e}")));

    // the channel filter is all-pass
    let (cs, _) = displaced_gaussians(2048, 0.8);
    let energy = |c: &ContinuousSpectrum| {
        c.qhat1
            .iter()
            .chain(&c.qhat2)
            .map(|x| x.norm_sqr())
            .sum::<f64>()
    };
    let moved = propagate_spectrum(&cs, 25.0, Regime::Focusing);
    let allpass = (energy(&moved) / energy(&cs) - 1.0).abs();
    checks.push(("all-pass", allpass <= 1e-12, format!("{allpass:.1e}")));

    // lossless SSFM energy over 2000 km
    let field = gaussian_field(TimeGrid::centered(2e-9, 2048).unwrap(), 20e-12, 0.3);
    let lossless = FiberParams::default().lossless();
    let opts = SsfmOptions {
        step_size: 1e3,
        amplification: Amplification::Off,
    };
    let out = ssfm_propagate(&field, &lossless, None, &mut rng(0), &opts).unwrap();
    let drift = (out.energy() / field.energy() - 1.0).abs();
    checks.push(("SSFM energy", drift <= 1e-8, format!("{drift:.1e}")));

    // SSFM step-size order on one lossy span
    let span = FiberParams {
        n_spans: 1,
        ..FiberParams::default()
    };
    let field = gaussian_field(TimeGrid::centered(1e-9, 1024).unwrap(), 10e-12, 0.3);
    let prop = |h: f64| {
        let o = SsfmOptions {
            step_size: h,
            amplification: Amplification::Off,
        };
        ssfm_propagate(&field, &span, None, &mut rng(0), &o).unwrap()
    };
    let fine = prop(50.0);
    let err = |h: f64| {
        let x = prop(h);
        relative_l2(&[&x.a1, &x.a2], &[&fine.a1, &fine.a2])
    };
    let order = (err(4e3) / err(2e3)).log2();
    checks.push(("SSFM order", order >= 1.9, format!("{order:.2}")));

    // equalizer on a unitary channel
    let mut r = rng(11);
    let n = 2000;
    let tx: [Vec<Complex64>; 2] = std::array::from_fn(|_| {
        (0..n)
            .map(|_| Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
            .collect()
    });
    let m = random_unitary(&mut r);
    let rx: [Vec<Complex64>; 2] = std::array::from_fn(|i| {
        (0..n)
            .map(|k| m[i][0] * tx[0][k] + m[i][1] * tx[1][k])
            .collect()
    });
    let taps = train_equalizer([&tx[0], &tx[1]], [&rx[0], &rx[1]], 3, 0..n).unwrap();
    let eq = apply_equalizer(&taps, [&rx[0], &rx[1]]);
    let eq_err = relative_l2(&[&eq[0], &eq[1]], &[&tx[0], &tx[1]]);
    checks.push(("equalizer", eq_err <= 1e-9, format!("{eq_err:.1e}")));

    // back-to-back chains
    let config = BurstConfig::default();
    let frame = random_frame(&config, 12);
    let ofdm = ofdm_demodulate(&ofdm_modulate(&frame, &config).unwrap(), &config).unwrap();
    let ofdm_err = relative_l2(
        &[&ofdm.symbols[0], &ofdm.symbols[1]],
        &[&frame.symbols[0], &frame.symbols[1]],
    );
    let bits_ok = demap_frame(&frame, &config).unwrap() == frame.bits;
    let scales = normalization_scales(&FiberParams::default().lossless(), false).unwrap();
    let link = NfdmLink::new(scales, dbm(-10.0), 0.0);
    let back = nfdm_demodulate(
        &nfdm_modulate(&frame, &config, &link).unwrap(),
        &config,
        &link,
        None,
    )
    .unwrap();
    let nfdm_ok = demap_frame(&back, &config).unwrap() == frame.bits;
    checks.push((
        "B2B chains",
        ofdm_err <= 1e-12 && bits_ok && nfdm_ok,
        format!("OFDM {ofdm_err:.1e}, demap identity {bits_ok}, NFDM error-free {nfdm_ok}"),
    ));

    let pass = checks.iter().all(|c| c.1);
    let detail: Vec<String> = checks
        .iter()
        .map(|(n, ok, d)| format!("{n} {d}{}", if *ok { "" } else { " (fails)" }))
        .collect();
    outcome(pass, detail.join(", "))
}

type Criterion = (usize, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "round-trip accuracy", criterion_1),
        (2, "scalar reduction", criterion_2),
        (3, "oracle equivalence", criterion_3),
        (4, "channel filter", criterion_4),
        (5, "guard estimate", criterion_5),
        (6, "loss handling", criterion_6),
        (7, "dual vs single polarization", criterion_7),
        (8, "NFDM vs OFDM gain", criterion_8),
        (9, "PMD statistics", criterion_9),
        (10, "PMD tolerance", criterion_10),
        (11, "property suites", criterion_11),
    ];
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut unexpected = Vec::new();
    for (n, name, f) in criteria {
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        let start = Instant::now();
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        let gap = if !o.pass && KNOWN_GAPS.contains(&n) {
            " [known gap]"
        } else {
            ""
        };
        println!(
            "criterion {n:>2} {status}{gap}: {name}: {} ({:.0} s)",
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if !o.pass && !KNOWN_GAPS.contains(&n) {
            unexpected.push(n);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("failed criteria: {unexpected:?}");
        std::process::exit(1);
    }
}
