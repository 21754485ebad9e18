//! Desk-scale checks of "appears quasiconformally": boundary extraction,
//! Hausdorff distance, affine alignment, decoration levels and the
//! semihyperbolicity heuristic.

mod align;
mod nearest;
mod report;
mod semihyp;
mod similarity;

use num_complex::Complex64;

pub use align::{align_similarity, align_similarity_with, Alignment};
pub use nearest::{directed_hausdorff, hausdorff, hausdorff_with, NearestIndex};
pub use report::{Bound, VerificationReport};
pub use similarity::{decoration_similarity, SimilarityOutcome, SimilaritySetup};
pub use semihyp::{semihyperbolic_classify, semihyperbolic_test, SemiClass, SemihypOptions, SemihypOutcome};

use crate::error::{Error, Result};
use crate::model::PointCloud;
use crate::render::{render_auto, Coloring, DeepMode, FrameSpec};

/// Pixel centers whose exterior distance estimate is below
/// `de_threshold_px` pixel pitches, in plane coordinates.
pub fn extract_boundary(frame: &FrameSpec, de_threshold_px: f64) -> Result<PointCloud> {
    let f = frame.clone().coloring(Coloring::Distance);
    let img = render_auto(&f, DeepMode::Auto)?;
    let center = f.center.to_c64();
    let mask = img.boundary_mask(de_threshold_px);
    let pts = mask
        .iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(k, _)| center + f.offset(k % img.width, k / img.width));
    let cloud = PointCloud::from_points("boundary", pts, None);
    if cloud.is_empty() {
        return Err(Error::NoBoundary);
    }
    Ok(cloud)
}

/// Looks up decoration levels of parameters through an aligned model.
pub struct DecorationClassifier {
    index: NearestIndex,
    levels: Vec<Option<u32>>,
}

impl DecorationClassifier {
    pub fn new(model: &PointCloud) -> Self {
        Self {
            index: NearestIndex::from_cloud(model),
            levels: model.points.iter().map(|p| p.level).collect(),
        }
    }

    /// Pulls `c` back through `map`; the level of the nearest model point
    /// when it lies within `tol` model units.
    pub fn classify(&self, c: Complex64, map: &Alignment, tol: f64) -> Option<u32> {
        let w = map.pull_back(c);
        let (i, d) = self.index.nearest(w);
        if d <= tol {
            self.levels[i]
        } else {
            None
        }
    }
}

pub fn classify_decoration_level(c: Complex64, map: &Alignment, model: &PointCloud, tol: f64) -> Option<u32> {
    if model.is_empty() {
        return None;
    }
    DecorationClassifier::new(model).classify(c, map, tol)
}
