use decolab::render::{render, render_deep, render_hp, zoom_sequence, Coloring, DeepMode, FrameSpec, ZoomSchedule};
use decolab::{Execution, HpComplex};

const S1: &str = "0.3626684938191616+0.6450238859863952i";
const JULIA_C: &str = "0.3626684938192285+0.6450238859865394i";

fn s1() -> HpComplex {
    HpComplex::parse(S1, 256).unwrap()
}

#[test]
fn conjugate_frames_mirror() {
    let a = FrameSpec::new(HpComplex::from_f64(-0.12, 0.74, 64), 0.3, (40, 30), 300);
    let b = FrameSpec::new(HpComplex::from_f64(-0.12, -0.74, 64), 0.3, (40, 30), 300);
    let (ia, ib) = (render(&a).unwrap(), render(&b).unwrap());
    for j in 0..30 {
        for i in 0..40 {
            assert_eq!(ia.count(i, j), ib.count(i, 29 - j));
        }
    }
}

#[test]
fn real_centered_frame_is_symmetric() {
    let f = FrameSpec::new(HpComplex::real(-0.7, 64), 2.6, (51, 41), 200);
    let img = render(&f).unwrap();
    for j in 0..41 {
        for i in 0..51 {
            assert_eq!(img.count(i, j), img.count(i, 40 - j));
        }
    }
}

#[test]
fn doubling_the_budget_never_loses_escapes() {
    for (re, im, w) in [(-0.75, 0.1, 0.2), (0.28, 0.01, 0.02)] {
        let f = FrameSpec::new(HpComplex::from_f64(re, im, 64), w, (32, 32), 250);
        let mut g = f.clone();
        g.max_iter *= 2;
        let (a, b) = (render(&f).unwrap(), render(&g).unwrap());
        for (x, y) in a.counts.iter().zip(&b.counts) {
            if *x != decolab::render::INTERIOR {
                assert_eq!(x, y);
            }
        }
    }
}

#[test]
fn sequential_and_parallel_match() {
    let f = FrameSpec::new(HpComplex::from_f64(-0.1, 0.9, 64), 0.2, (30, 30), 300).coloring(Coloring::Distance);
    let a = render(&f.clone().with_exec(Execution::Sequential)).unwrap();
    let b = render(&f.with_exec(Execution::Parallel)).unwrap();
    assert_eq!(a.counts, b.counts);
}

#[test]
fn deep_agrees_with_direct_at_1e8_around_s1() {
    let f = FrameSpec::new(s1(), 1e-8, (40, 40), 6000);
    let deep = render_deep(&f).unwrap();
    let direct = render_hp(&f.clone().with_precision(256));
    let agree = deep.agreement(&direct, 1);
    assert!(agree >= 0.99, "agreement {agree}");
}

#[test]
fn deepest_frame_has_interior_at_center() {
    let f = FrameSpec::new(s1(), 10f64.powf(-11.9), (24, 24), 20000);
    let deep = render_deep(&f).unwrap();
    let (i, j) = f.center_pixel();
    assert!(deep.is_interior(i, j));
    let direct = render(&FrameSpec { pixels: (3, 3), ..f.clone() }).unwrap();
    assert!(direct.is_interior(1, 1));
}

#[test]
fn julia_zoom_around_critical_point() {
    let c = HpComplex::parse(JULIA_C, 256).unwrap();
    let base = FrameSpec::new(HpComplex::zero(256), 3.0, (25, 25), 3000).julia(c);
    let sched = ZoomSchedule {
        center: HpComplex::zero(256),
        width_start: 3.0,
        width_end: 1e-3,
        frames: 4,
    };
    let frames = zoom_sequence(&sched, &base, DeepMode::Auto).unwrap();
    assert_eq!(frames.len(), 4);
    // 0 lies in the filled Julia set of a parameter inside M
    for img in &frames {
        assert!(img.is_interior(12, 12), "center pixel escaped");
    }
}
