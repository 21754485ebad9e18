//! The ten acceptance criteria, one test each. Every test prints a single
//! `criterion N: PASS|FAIL ...` line before asserting.

use std::sync::OnceLock;
use std::time::Instant;

use decolab::bottcher::{inverse_phi_m, phi_c, phi_m};
use decolab::model::{build_model_m, gamma_m, rescale_gamma0, sample_julia, ModelSpec};
use decolab::render::{render_deep, render_hp, Coloring, FrameSpec};
use decolab::solvers::{
    cascade, find_center_near, multiplier_at_misiurewicz, solve_misiurewicz, solve_parabolic_root,
    solve_superattracting_center, tune_misiurewicz, winding_number, CascadeOptions, Law, MisiurewiczSpec,
    ParabolicSpec, ParamMap, TuneOptions, WindingOptions,
};
use decolab::verify::{decoration_similarity, semihyperbolic_classify, SemiClass, SemihypOptions, SimilarityOutcome, SimilaritySetup};
use decolab::{Complex64, Execution, HpComplex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const S0: &str = "0.3591071125276155+0.6423830938166145i";
const C0: &str = "-0.1010963638456221+0.9562865108091415i";
const C1: &str = "0.3626697754647427+0.6450273437137847i";
const S1: &str = "0.3626684938191616+0.6450238859863952i";

fn hp(s: &str) -> HpComplex {
    HpComplex::parse(s, 256).unwrap()
}

fn err(a: &HpComplex, b: &HpComplex) -> f64 {
    (a - b).abs_f64()
}

fn report(n: u32, ok: bool, detail: &str) {
    println!("criterion {n}: {} {detail}", if ok { "PASS" } else { "FAIL" });
}

/// c1 with its minimal relation, refined at 512 bits.
fn c1_refined() -> (HpComplex, MisiurewiczSpec) {
    let spec = MisiurewiczSpec::new(16, 5).unwrap();
    let c1 = solve_misiurewicz(spec, &HpComplex::parse(C1, 512).unwrap(), 1e-60).unwrap();
    (c1, spec)
}

#[test]
fn criterion_1_golden_parameters() {
    let mut lines = Vec::new();
    let mut ok = true;
    let tol = 1e-12;

    let t = Instant::now();
    let s0 = solve_superattracting_center(4, &hp("0.36+0.64i"), 1e-40);
    let s0_ok = s0.as_ref().is_ok_and(|s| err(s, &hp(S0)) < tol);
    ok &= s0_ok;
    lines.push(match &s0 {
        Ok(s) => format!("center(4) = {} err {:.1e} [{:.2?}]", s.to_string_digits(17), err(s, &hp(S0)), t.elapsed()),
        Err(e) => format!("center(4) failed: {e}"),
    });

    let t = Instant::now();
    let c0 = solve_misiurewicz(MisiurewiczSpec::new(4, 1).unwrap(), &hp("-0.1+0.95i"), 1e-40);
    let c0_ok = c0.as_ref().is_ok_and(|c| err(c, &hp(C0)) < tol);
    ok &= c0_ok;
    lines.push(match &c0 {
        Ok(c) => format!("misiurewicz(4,1) err {:.1e} [{:.2?}]", err(c, &hp(C0)), t.elapsed()),
        Err(e) => format!("misiurewicz(4,1) failed: {e}"),
    });

    // The printed s0 has 16 digits, so it is snapped to the period-4 center
    // first; the snap must not move it by more than the golden tolerance.
    let t = Instant::now();
    let tuned = solve_superattracting_center(4, &hp(S0), 1e-40).and_then(|s| {
        let moved = err(&s, &hp(S0));
        if moved > tol {
            return Err(decolab::Error::InvalidInput(format!("s0 is {moved:.1e} from the nearest period-4 center")));
        }
        tune_misiurewicz(&s, 4, &hp(C0), MisiurewiczSpec::new(4, 1).unwrap(), &TuneOptions::new(1e-40))
    });
    let tune_ok = tuned.as_ref().is_ok_and(|c| err(c, &hp(C1)) < tol);
    ok &= tune_ok;
    lines.push(match &tuned {
        Ok(c) => format!("tune(s0,4,(4,1)) err {:.1e} [{:.2?}]", err(c, &hp(C1)), t.elapsed()),
        Err(e) => format!("tune(s0,4,(4,1)) failed: {e}"),
    });

    let t = Instant::now();
    let near = find_center_near(&hp(S1), 300, 1e-40);
    let near_ok = near.as_ref().is_ok_and(|(c, _)| err(c, &hp(S1)) < tol);
    ok &= near_ok;
    lines.push(match &near {
        Ok((c, q)) => format!("find_center_near(s1) period {q} err {:.1e} [{:.2?}]", err(c, &hp(S1)), t.elapsed()),
        Err(e) => format!("find_center_near(s1) failed: {e}"),
    });

    // Where the printed s0 actually sits: a period-5 component, not period 4.
    let (s0_5, q5) = find_center_near(&hp(S0), 40, 1e-40).unwrap();
    let tuned5 = tune_misiurewicz(&s0_5, q5, &hp(C0), MisiurewiczSpec::new(4, 1).unwrap(), &TuneOptions::new(1e-40));
    lines.push(format!(
        "diagnostic: printed s0 is {:.1e} from the period-{q5} center {}; tuning that center by c0 gives c1 to {:.1e}",
        err(&s0_5, &hp(S0)),
        s0_5.to_string_digits(17),
        tuned5.as_ref().map_or(f64::NAN, |c| err(c, &hp(C1))),
    ));

    report(1, ok, &lines.join("; "));
    assert!(s0_ok, "period-4 center does not match the printed s0");
    assert!(c0_ok && near_ok);
    assert!(tune_ok, "tuning the printed s0 with p = 4 does not reproduce c1");
}

#[test]
fn criterion_2_special_points() {
    let mut worst_m: f64 = 0.0;
    for (spec, seed, want) in [
        ((2, 2), "0.1+0.9i", Complex64::new(0.0, 1.0)),
        ((2, 2), "-0.2+1.1i", Complex64::new(0.0, 1.0)),
        ((2, 1), "-1.9", Complex64::new(-2.0, 0.0)),
        ((2, 1), "-2.1+0.05i", Complex64::new(-2.0, 0.0)),
    ] {
        let c = solve_misiurewicz(MisiurewiczSpec::new(spec.0, spec.1).unwrap(), &hp(seed), 1e-40)
            .unwrap_or_else(|e| panic!("{spec:?} from {seed}: {e}"));
        worst_m = worst_m.max((c.to_c64() - want).norm());
    }
    let mut worst_p: f64 = 0.0;
    for ((m, num, den), sc, sz, want) in [
        ((1, 0, 1), "0.3", "0.6", Complex64::new(0.25, 0.0)),
        ((1, 1, 2), "-0.7", "-0.4", Complex64::new(-0.75, 0.0)),
        ((1, 1, 3), "-0.1+0.6i", "-0.2+0.4i", Complex64::new(-0.125, 3.0 * 3f64.sqrt() / 8.0)),
    ] {
        let r = solve_parabolic_root(ParabolicSpec::new(m, num, den).unwrap(), &hp(sc), &hp(sz), 1e-30).unwrap();
        worst_p = worst_p.max((r.c.to_c64() - want).norm());
    }
    let ok = worst_m < 1e-12 && worst_p < 1e-10;
    report(2, ok, &format!("misiurewicz worst err {worst_m:.1e}; parabolic worst err {worst_p:.1e}"));
    assert!(ok);
}

fn cardioid_root(num: f64, den: f64) -> Complex64 {
    let t = 2.0 * PI * num / den;
    Complex64::from_polar(0.5, t) - Complex64::from_polar(0.25, 2.0 * t)
}

#[test]
fn criterion_3_cascade_laws() {
    let (c1, spec) = c1_refined();
    let mu = multiplier_at_misiurewicz(&c1, spec).unwrap();
    let s1 = HpComplex::parse(S1, 512).unwrap();
    let (base, q) = find_center_near(&s1, 300, 1e-60).unwrap();
    let opts = CascadeOptions {
        tol: 1e-60,
        ..Default::default()
    };
    let rec = cascade(&c1, &base, q, spec.period, 7, Some(&mu), &opts).unwrap();
    let inv = mu.recip().to_c64();
    let worst = rec.ratios.iter().map(|r| (r - inv).norm() / inv.norm()).fold(0.0, f64::max);
    let geo_ok = rec.centers.len() == 7 && worst < 0.05;

    // two petals at -3/4: centers on the cardioid at internal angles k/(2k+1)
    let q0 = 21;
    let base2 = solve_superattracting_center(q0, &HpComplex::from_c64(cardioid_root(10.0, 21.0), 256), 1e-40).unwrap();
    let popts = CascadeOptions {
        tol: 1e-40,
        petals: 2,
        ..Default::default()
    };
    let nu2 = cascade(&HpComplex::real(-0.75, 256), &base2, q0, 2, 8, None, &popts).unwrap();
    let nu2_ok = nu2.centers.len() == 8 && (-1.1..=-0.9).contains(&nu2.fitted_slope) && nu2.fitted_law == Law::InverseLinear;

    // one petal at 1/4: centers of the 1/q bulbs
    let base1 = solve_superattracting_center(10, &HpComplex::from_c64(cardioid_root(1.0, 10.0), 256), 1e-40).unwrap();
    let popts = CascadeOptions { petals: 1, ..popts };
    let nu1 = cascade(&HpComplex::real(0.25, 256), &base1, 10, 1, 8, None, &popts).unwrap();
    let nu1_ok = nu1.centers.len() == 8 && (-2.2..=-1.8).contains(&nu1.fitted_slope) && nu1.fitted_law == Law::InverseSquare;

    let ok = geo_ok && nu2_ok && nu1_ok;
    report(
        3,
        ok,
        &format!(
            "geometric: |mu| {:.4}, worst ratio deviation {:.2}% over {} ratios from period {q}; nu=2 slope {:.3}; nu=1 slope {:.3}",
            mu.abs_f64(),
            100.0 * worst,
            rec.ratios.len(),
            nu2.fitted_slope,
            nu1.fitted_slope
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_4_bottcher() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_fe: f64 = 0.0;
    let mut n = 0;
    while n < 1000 {
        let c = Complex64::from_polar(rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0 * PI));
        let z = Complex64::from_polar(rng.gen_range(1.2..6.0) * c.norm().max(1.0), rng.gen_range(0.0..2.0 * PI));
        let (Ok(a), Ok(b)) = (phi_c(c, z, 200), phi_c(c, z * z + c, 200)) else { continue };
        worst_fe = worst_fe.max((b - a * a).norm() / (a * a).norm());
        n += 1;
    }
    let mut worst_rt: f64 = 0.0;
    let mut n = 0;
    while n < 100 {
        let c = Complex64::from_polar(rng.gen_range(0.5..4.0), rng.gen_range(0.0..2.0 * PI));
        let Ok(w) = phi_m(c, 200) else { continue };
        let back = inverse_phi_m(w, None, 1e-15).unwrap();
        worst_rt = worst_rt.max((back - c).norm());
        n += 1;
    }
    let big = (phi_m(Complex64::new(1e6, 0.0), 200).unwrap() / 1e6 - 1.0).norm();
    let ok = worst_fe < 1e-10 && worst_rt < 1e-10 && big < 1e-5;
    report(
        4,
        ok,
        &format!("functional equation {worst_fe:.1e} (1000 samples); round trip {worst_rt:.1e} (100 samples); |Phi_M(1e6)/1e6 - 1| = {big:.1e}"),
    );
    assert!(ok);
}

#[test]
fn criterion_5_model_invariants() {
    let spec = ModelSpec::douady(Complex64::new(-0.10, 0.97), 220.0, 6, 300, 5).unwrap();
    let g0 = rescale_gamma0(&sample_julia(spec.c_prime, spec.samples_per_level, spec.seed), &spec).unwrap();
    let mut ranges = Vec::new();
    let mut inside = true;
    for m in 0..=6 {
        let (lo, hi) = spec.level_annulus(m);
        let (min, max) = gamma_m(&g0, m)
            .coords()
            .map(|w| w.norm())
            .fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(r), b.max(r)));
        inside &= min > lo && max < hi;
        ranges.push((min, max));
    }
    let disjoint = ranges.windows(2).all(|w| w[1].1 < w[0].0);
    let build = build_model_m(&ModelSpec { samples_per_level: 60, ..spec }, Execution::default()).unwrap();
    let band = build.band_fraction();
    let ok = inside && disjoint && band >= 0.99;
    report(
        5,
        ok,
        &format!("annuli contain levels 0..6: {inside}; disjoint: {disjoint}; in-band fraction {band:.4} over {} points", build.emitted()),
    );
    assert!(ok);
}

#[test]
fn criterion_6_winding() {
    let s1 = hp(S1);
    let radius = 0.1 * err(&s1, &hp(C1));
    let opts = WindingOptions::default();
    let w_s1 = winding_number(ParamMap::Center { period: 129 }, &s1, radius, &opts).unwrap();
    let w0 = winding_number(ParamMap::Center { period: 1 }, &hp("0"), 0.1, &opts).unwrap();
    let w1 = winding_number(ParamMap::Center { period: 2 }, &hp("-1"), 0.1, &opts).unwrap();
    let both = winding_number(ParamMap::Center { period: 2 }, &hp("-0.5"), 1.0, &opts).unwrap();
    let ok = (w_s1, w0, w1, both) == (1, 1, 1, 2);
    report(
        6,
        ok,
        &format!("s1 circle (q* = 129, r = {radius:.2e}): {w_s1}; period 1 at 0: {w0}; period 2 at -1: {w1}; enclosing: {both}"),
    );
    assert!(ok);
}

fn similarity() -> &'static SimilarityOutcome {
    static OUT: OnceLock<SimilarityOutcome> = OnceLock::new();
    OUT.get_or_init(|| {
        let spec = ModelSpec::douady(Complex64::new(-0.10, 0.97), 220.0, 6, 2000, 1).unwrap();
        decoration_similarity(&SimilaritySetup::new(hp(S1), spec)).unwrap()
    })
}

#[test]
fn criterion_7_similarity() {
    let out = similarity();
    let r = &out.report;
    report(
        7,
        r.passed,
        &format!(
            "normalized Hausdorff residual {:.4} (threshold {}, engineering choice); copy-scale map alone {:.4}; {} model vs {} target points",
            out.alignment.residual,
            r.thresholds["residual"],
            out.naive_residual,
            out.model.len(),
            out.target.len()
        ),
    );
    assert!(r.passed, "residual {} above threshold", out.alignment.residual);
}

#[test]
fn criterion_8_deep_render() {
    let mut parts = Vec::new();
    let mut ok = true;
    for (width, px, iters) in [(1e-8, 40, 6000), (10f64.powf(-11.9), 32, 20000)] {
        let f = FrameSpec::new(hp(S1), width, (px, px), iters);
        let deep = render_deep(&f).unwrap();
        let direct = render_hp(&f.clone().with_precision(256));
        let agree = deep.agreement(&direct, 1);
        ok &= agree >= 0.99;
        parts.push(format!("width {width:.2e}: {:.2}% agree ({} refs)", 100.0 * agree, deep.stats.references));
    }
    let f = FrameSpec::new(hp(S1), 10f64.powf(-11.9), (33, 33), 20000).coloring(Coloring::Escape);
    let img = render_deep(&f).unwrap();
    let (i, j) = f.center_pixel();
    let center_inside = img.is_interior(i, j);
    ok &= center_inside;
    parts.push(format!("deepest frame center interior: {center_inside}, {} interior pixels", img.interior_count()));
    report(8, ok, &parts.join("; "));
    assert!(ok);
}

#[test]
fn criterion_9_semihyperbolic() {
    let out = similarity();
    let samples = out.decoration_parameters(200);
    let opts = SemihypOptions {
        n_iter: 10_000,
        delta: None,
        transient: 100,
    };
    let mut semi = 0;
    let mut escaped = 0;
    for (c, _) in &samples {
        let o = semihyperbolic_classify(&HpComplex::from_c64(*c, 256), &opts);
        semi += (o.class == SemiClass::HeuristicallySemihyperbolic) as usize;
        escaped += (!o.bounded) as usize;
    }
    let frac = semi as f64 / samples.len().max(1) as f64;
    let ok = samples.len() == 200 && frac >= 0.95;
    report(
        9,
        ok,
        &format!(
            "{semi}/{} decoration parameters heuristically semihyperbolic ({escaped} of them escape within the budget)",
            samples.len()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_10_determinism() {
    let run = || {
        let (c1, spec) = c1_refined();
        let mu = multiplier_at_misiurewicz(&c1, spec).unwrap();
        let near = find_center_near(&hp(S1), 300, 1e-40).unwrap();
        let f = FrameSpec::new(hp(S1), 1e-9, (24, 24), 4000);
        let seq = render_deep(&f.clone().with_exec(Execution::Sequential)).unwrap();
        let par = render_deep(&f.with_exec(Execution::Parallel)).unwrap();
        let mspec = ModelSpec::douady(Complex64::new(-0.10, 0.97), 220.0, 4, 40, 9).unwrap();
        let a = build_model_m(&mspec, Execution::Sequential).unwrap();
        let b = build_model_m(&mspec, Execution::Parallel).unwrap();
        let mut bytes = Vec::new();
        a.cloud.write_binary_to(&mut bytes).unwrap();
        (
            c1.to_string(),
            mu.to_string(),
            near.0.to_string(),
            seq.counts.clone(),
            seq.counts == par.counts,
            a == b,
            bytes,
        )
    };
    let (x, y) = (run(), run());
    let ok = x == y && x.4 && x.5;
    report(
        10,
        ok,
        &format!("repeated solves, renders and model builds identical: {}; sequential == parallel: {}", x == y, x.4 && x.5),
    );
    assert!(ok);
}
