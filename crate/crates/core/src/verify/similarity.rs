//! Decorated-model versus rendered-boundary comparison around a small copy.

use num_complex::Complex64;

use super::{align_similarity_with, extract_boundary, hausdorff_with, Alignment, DecorationClassifier, VerificationReport};
use crate::error::Result;
use crate::exec::Execution;
use crate::hp::HpComplex;
use crate::model::{build_model_m, ModelSpec, PointCloud};
use crate::render::FrameSpec;
use crate::solvers::{copy_scale, find_center_near};

#[derive(Clone, Debug)]
pub struct SimilaritySetup {
    /// parameter near the small copy (snapped to the nearest center)
    pub seed: HpComplex,
    pub q_max: usize,
    pub model: ModelSpec,
    /// window width in copy diameters
    pub window_factor: f64,
    pub pixels: usize,
    pub max_iter: u32,
    pub de_threshold_px: f64,
    pub iterations: usize,
    pub threshold: f64,
    pub exec: Execution,
}

impl SimilaritySetup {
    pub fn new(seed: HpComplex, model: ModelSpec) -> Self {
        Self {
            seed,
            q_max: 300,
            model,
            window_factor: 10.0,
            pixels: 256,
            max_iter: 30_000,
            de_threshold_px: 0.5,
            iterations: 30,
            threshold: 0.05,
            exec: Execution::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimilarityOutcome {
    pub center: HpComplex,
    pub period: usize,
    /// copy scale: the copy looks like center + scale·M
    pub scale: Complex64,
    /// target window width in the parameter plane
    pub window: f64,
    /// model cloud in model coordinates (∂M has no level)
    pub model: PointCloud,
    pub target: PointCloud,
    pub alignment: Alignment,
    /// residual of the map z -> center + scale·z
    pub naive_residual: f64,
    /// model-plane pixel size; round-off of the pull-back stays far below it
    pub model_pitch: f64,
    pub report: VerificationReport,
}

/// Builds M(c') and the extracted ∂M near the copy, aligns them and
/// reports the normalized Hausdorff residual against `threshold`.
pub fn decoration_similarity(setup: &SimilaritySetup) -> Result<SimilarityOutcome> {
    let (center, period) = find_center_near(&setup.seed, setup.q_max, 1e-30)?;
    let scale = copy_scale(&center, period).to_c64();
    let px = setup.pixels;

    let whole = FrameSpec::new(HpComplex::real(-0.75, 64), 3.5, (px, px), 5000).with_exec(setup.exec);
    let m_diameter = extract_boundary(&whole, setup.de_threshold_px)?.diameter();
    let model_window = setup.window_factor * m_diameter;
    let window = model_window * scale.norm();

    let tf = FrameSpec::new(center.clone(), window, (px, px), setup.max_iter).with_exec(setup.exec);
    let target = extract_boundary(&tf, setup.de_threshold_px)?;

    let mf = FrameSpec::new(HpComplex::zero(64), model_window, (px, px), setup.max_iter).with_exec(setup.exec);
    let mut model = extract_boundary(&mf, setup.de_threshold_px)?;
    model.label = format!("M({})", setup.model.c_prime);
    let half = 0.5 * model_window;
    let decorations = build_model_m(&setup.model, setup.exec)?.cloud;
    model.extend(&decorations.filter(|p| p.z.re.abs() < half && p.z.im.abs() < half));
    model.dedup(model_window / px as f64);

    let alignment = align_similarity_with(&model, &target, setup.iterations, setup.exec)?;
    let naive = model.map_affine(scale, center.to_c64());
    let naive_residual = hausdorff_with(&naive, &target, setup.exec) / target.diameter();

    let mut report = VerificationReport::new("similarity");
    report
        .check_at_most("residual", alignment.residual, setup.threshold)
        .metric("naive_residual", naive_residual)
        .metric("period", period as f64)
        .metric("copy_scale", scale.norm())
        .metric("window", window)
        .metric("scale_ratio", (alignment.a / scale).norm())
        .metric("model_points", model.len() as f64)
        .metric("target_points", target.len() as f64)
        .label("center", center.to_string_digits(25))
        .label("c_prime", setup.model.c_prime.to_string())
        .note("the residual threshold is an engineering choice; only existence of a quasiconformal embedding is asserted")
        .note("residual = Hausdorff(a·model + b, target) / diameter(target) over complex-affine a, b");
    Ok(SimilarityOutcome {
        center,
        period,
        scale,
        window,
        model,
        target,
        alignment,
        naive_residual,
        model_pitch: model_window / px as f64,
        report,
    })
}

impl SimilarityOutcome {
    /// Up to `n` decoration points of the model, evenly strided, mapped
    /// into the parameter plane and checked with the classifier.
    pub fn decoration_parameters(&self, n: usize) -> Vec<(Complex64, u32)> {
        let decorated: Vec<_> = self.model.points.iter().filter(|p| p.level.is_some()).copied().collect();
        if decorated.is_empty() || n == 0 {
            return Vec::new();
        }
        let classifier = DecorationClassifier::new(&self.model);
        let step = (decorated.len() as f64 / n as f64).max(1.0);
        (0..n.min(decorated.len()))
            .filter_map(|k| {
                let p = decorated[(k as f64 * step) as usize];
                let c = self.alignment.apply(p.z);
                let level = classifier.classify(c, &self.alignment, 0.5 * self.model_pitch)?;
                Some((c, level))
            })
            .collect()
    }
}
