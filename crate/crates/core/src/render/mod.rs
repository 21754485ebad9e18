//! Escape-time and distance-estimate imaging of M and K_c.
//!
//! Shallow frames iterate in doubles; deep frames either iterate every pixel
//! at full precision (`render_hp`, slow but the reference answer) or perturb
//! around one high-precision orbit (`render_deep`).

mod output;
mod perturb;

pub use output::read_counts;

use num_complex::Complex64;
use rug::Float;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::hp::{HpComplex, Scratch, MIN_PRECISION};
use crate::model::PointCloud;

pub use perturb::render_deep;

/// Environment variable that overrides the precision policy.
pub const PRECISION_ENV: &str = "DECOLAB_PRECISION_BITS";

/// Count stored for pixels that never escape within the budget.
pub const INTERIOR: u32 = u32::MAX;

/// Renderer escape radius; large so the distance estimate is accurate.
pub const RENDER_ESCAPE_RADIUS: f64 = 1e6;

/// Widths below this use perturbation under `DeepMode::Auto`.
pub const DEEP_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum Mode {
    Mandelbrot,
    Julia(HpComplex),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Coloring {
    #[default]
    Escape,
    Distance,
    Binary,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DeepMode {
    #[default]
    Auto,
    On,
    Off,
}

/// One image: window, resolution, budget and precision policy.
#[derive(Clone, Debug)]
pub struct FrameSpec {
    pub center: HpComplex,
    /// horizontal extent in plane units
    pub width: f64,
    /// (columns, rows)
    pub pixels: (usize, usize),
    pub max_iter: u32,
    pub mode: Mode,
    pub coloring: Coloring,
    pub escape_radius: f64,
    /// explicit precision; beats the environment and the width policy
    pub precision: Option<u32>,
    pub exec: Execution,
}

impl FrameSpec {
    pub fn new(center: HpComplex, width: f64, pixels: (usize, usize), max_iter: u32) -> Self {
        Self {
            center,
            width,
            pixels,
            max_iter,
            mode: Mode::Mandelbrot,
            coloring: Coloring::Escape,
            escape_radius: RENDER_ESCAPE_RADIUS,
            precision: None,
            exec: Execution::default(),
        }
    }

    pub fn julia(mut self, c: HpComplex) -> Self {
        self.mode = Mode::Julia(c);
        self
    }

    pub fn coloring(mut self, coloring: Coloring) -> Self {
        self.coloring = coloring;
        self
    }

    pub fn with_precision(mut self, bits: u32) -> Self {
        self.precision = Some(bits);
        self
    }

    pub fn with_exec(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_width(&self, width: f64) -> Self {
        let mut f = self.clone();
        f.width = width;
        f
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::InvalidInput(format!("width must be positive, got {}", self.width)));
        }
        if self.pixels.0 == 0 || self.pixels.1 == 0 {
            return Err(Error::InvalidInput("pixel counts must be positive".into()));
        }
        if self.max_iter == 0 || self.max_iter == INTERIOR {
            return Err(Error::InvalidInput("max_iter out of range".into()));
        }
        if !(self.escape_radius.is_finite() && self.escape_radius >= 2.0) {
            return Err(Error::InvalidInput("escape radius must be at least 2".into()));
        }
        if !self.center.is_finite() {
            return Err(Error::InvalidInput("center is not finite".into()));
        }
        Ok(())
    }

    pub fn pitch(&self) -> f64 {
        self.width / self.pixels.0 as f64
    }

    pub fn height(&self) -> f64 {
        self.pitch() * self.pixels.1 as f64
    }

    /// Offset of pixel (i, j) from the center; row 0 is the top.
    pub fn offset(&self, i: usize, j: usize) -> Complex64 {
        let p = self.pitch();
        let (w, h) = (self.pixels.0 as f64, self.pixels.1 as f64);
        Complex64::new((i as f64 + 0.5 - 0.5 * w) * p, (0.5 * h - j as f64 - 0.5) * p)
    }

    /// Pixel containing the plane point `center + d`, if inside the frame.
    pub fn pixel_of_offset(&self, d: Complex64) -> Option<(usize, usize)> {
        let p = self.pitch();
        let x = (d.re / p + 0.5 * self.pixels.0 as f64).floor();
        let y = (0.5 * self.pixels.1 as f64 - d.im / p).floor();
        if x >= 0.0 && y >= 0.0 && x < self.pixels.0 as f64 && y < self.pixels.1 as f64 {
            Some((x as usize, y as usize))
        } else {
            None
        }
    }

    pub fn center_pixel(&self) -> (usize, usize) {
        (self.pixels.0 / 2, self.pixels.1 / 2)
    }

    /// Bits for high-precision work on this frame.
    pub fn precision_bits(&self) -> u32 {
        self.precision
            .or_else(precision_from_env)
            .unwrap_or_else(|| precision_policy(self.width))
            .max(MIN_PRECISION)
    }

    fn fits_f64(&self) -> bool {
        let scale = self.center.abs_f64().max(1.0);
        self.width >= 1e-9 * scale
    }
}

/// 64 + ceil(log2(4 / width)) bits, never below 64.
pub fn precision_policy(width: f64) -> u32 {
    let extra = (4.0 / width).log2().ceil();
    if extra.is_finite() && extra > 0.0 {
        64 + extra as u32
    } else {
        64
    }
}

/// Precision requested through `DECOLAB_PRECISION_BITS`, if set and sane.
pub fn precision_from_env() -> Option<u32> {
    let v = std::env::var(PRECISION_ENV).ok()?;
    let bits: u32 = v.trim().parse().ok()?;
    (bits >= MIN_PRECISION).then_some(bits)
}

/// Geometric zoom: frame k has width start * (end/start)^(k/(frames-1)).
#[derive(Clone, Debug)]
pub struct ZoomSchedule {
    pub center: HpComplex,
    pub width_start: f64,
    pub width_end: f64,
    pub frames: usize,
}

impl ZoomSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.frames < 2 {
            return Err(Error::InvalidInput("a zoom needs at least two frames".into()));
        }
        for w in [self.width_start, self.width_end] {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidInput(format!("bad zoom width {w}")));
            }
        }
        Ok(())
    }

    pub fn ratio(&self) -> f64 {
        (self.width_end / self.width_start).powf(1.0 / (self.frames - 1) as f64)
    }

    pub fn widths(&self) -> Vec<f64> {
        let n = self.frames;
        let (a, b) = (self.width_start.ln(), self.width_end.ln());
        (0..n)
            .map(|k| match k {
                0 => self.width_start,
                k if k == n - 1 => self.width_end,
                k => (a + (b - a) * k as f64 / (n - 1) as f64).exp(),
            })
            .collect()
    }

    pub fn frame(&self, base: &FrameSpec, k: usize) -> FrameSpec {
        let mut f = base.with_width(self.widths()[k]);
        f.center = self.center.clone();
        f
    }
}

/// "001.png", "002.png", ... with at least three digits.
pub fn frame_file_name(k: usize, frames: usize, ext: &str) -> String {
    let digits = frames.to_string().len().max(3);
    format!("{:0digits$}.{ext}", k + 1)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RenderStats {
    pub precision_bits: u32,
    pub perturbation: bool,
    /// reference orbits used, including the first
    pub references: usize,
    /// pixels still glitched after re-referencing, recomputed directly
    pub fallback_pixels: usize,
}

#[derive(Clone, Debug)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub pitch: f64,
    pub coloring: Coloring,
    /// escape iteration per pixel, row-major, `INTERIOR` if none
    pub counts: Vec<u32>,
    /// exterior distance estimate in plane units (NaN inside)
    pub distance: Option<Vec<f64>>,
    /// overlay marks
    pub marks: Vec<bool>,
    /// overlay points that fell outside the frame
    pub overlay_outside: usize,
    pub stats: RenderStats,
}

impl Image {
    fn from_pixels(frame: &FrameSpec, px: Vec<Pixel>, stats: RenderStats) -> Self {
        let (w, h) = frame.pixels;
        let keep_de = frame.coloring == Coloring::Distance || px.iter().any(|p| p.de.is_finite());
        let distance = keep_de.then(|| px.iter().map(|p| p.de).collect());
        Self {
            width: w,
            height: h,
            pitch: frame.pitch(),
            coloring: frame.coloring,
            counts: px.iter().map(|p| p.count).collect(),
            distance,
            marks: vec![false; w * h],
            overlay_outside: 0,
            stats,
        }
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.width + i
    }

    pub fn count(&self, i: usize, j: usize) -> u32 {
        self.counts[self.index(i, j)]
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        self.count(i, j) == INTERIOR
    }

    pub fn interior_count(&self) -> usize {
        self.counts.iter().filter(|&&c| c == INTERIOR).count()
    }

    /// Escaped pixels whose distance estimate is below `threshold_px` pitches.
    pub fn boundary_mask(&self, threshold_px: f64) -> Vec<bool> {
        let cut = threshold_px * self.pitch;
        match &self.distance {
            Some(de) => de.iter().map(|&d| d.is_finite() && d < cut).collect(),
            None => vec![false; self.counts.len()],
        }
    }

    /// Fraction of pixels whose counts agree within `tol` (interior only matches interior).
    pub fn agreement(&self, other: &Image, tol: u32) -> f64 {
        assert_eq!(self.counts.len(), other.counts.len(), "image sizes differ");
        let ok = self
            .counts
            .iter()
            .zip(&other.counts)
            .filter(|(&a, &b)| match (a == INTERIOR, b == INTERIOR) {
                (true, true) => true,
                (false, false) => a.abs_diff(b) <= tol,
                _ => false,
            })
            .count();
        ok as f64 / self.counts.len() as f64
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Pixel {
    pub count: u32,
    pub de: f64,
}

impl Pixel {
    const INSIDE: Pixel = Pixel {
        count: INTERIOR,
        de: f64::NAN,
    };

    fn escaped(n: u32, z: Complex64, dz: Complex64) -> Pixel {
        let r = z.norm();
        let d = dz.norm();
        let de = if d > 0.0 { r * r.ln() / d } else { f64::INFINITY };
        Pixel { count: n, de }
    }
}

/// Direct render: doubles when the window allows it, otherwise every pixel
/// at `precision_bits()`. Never fails on a valid frame.
pub fn render(frame: &FrameSpec) -> Result<Image> {
    frame.validate()?;
    if frame.fits_f64() {
        Ok(render_f64(frame))
    } else {
        Ok(render_hp(frame))
    }
}

/// Picks direct or perturbation rendering.
pub fn render_auto(frame: &FrameSpec, deep: DeepMode) -> Result<Image> {
    match deep {
        DeepMode::On => render_deep(frame),
        DeepMode::Off => render(frame),
        DeepMode::Auto if frame.width < DEEP_THRESHOLD => render_deep(frame),
        DeepMode::Auto => render(frame),
    }
}

fn render_f64(frame: &FrameSpec) -> Image {
    let (w, h) = frame.pixels;
    let center = frame.center.to_c64();
    let r2 = frame.escape_radius * frame.escape_radius;
    let jc = match &frame.mode {
        Mode::Julia(c) => Some(c.to_c64()),
        Mode::Mandelbrot => None,
    };
    let px = frame.exec.map_range(w * h, |k| {
        let p = center + frame.offset(k % w, k / w);
        match jc {
            None => iterate_f64(Complex64::new(0.0, 0.0), p, Complex64::new(0.0, 0.0), 1.0, frame.max_iter, r2),
            Some(c) => iterate_f64(p, c, Complex64::new(1.0, 0.0), 0.0, frame.max_iter, r2),
        }
    });
    let stats = RenderStats {
        precision_bits: 53,
        ..Default::default()
    };
    Image::from_pixels(frame, px, stats)
}

/// z <- z^2 + c with derivative dz <- 2 z dz + k.
pub(crate) fn iterate_f64(mut z: Complex64, c: Complex64, mut dz: Complex64, k: f64, max_iter: u32, r2: f64) -> Pixel {
    if z.norm_sqr() > r2 {
        return Pixel::escaped(0, z, dz);
    }
    for n in 1..=max_iter {
        dz = 2.0 * z * dz + k;
        z = z * z + c;
        if z.norm_sqr() > r2 {
            return Pixel::escaped(n, z, dz);
        }
    }
    Pixel::INSIDE
}

/// Every pixel iterated at full precision. The reference for deep renders.
pub fn render_hp(frame: &FrameSpec) -> Image {
    let prec = frame.precision_bits();
    let (w, h) = frame.pixels;
    let px = frame
        .exec
        .map_range(w * h, |k| hp_pixel(frame, frame.offset(k % w, k / w), prec));
    let stats = RenderStats {
        precision_bits: prec,
        ..Default::default()
    };
    Image::from_pixels(frame, px, stats)
}

/// One pixel at `prec` bits; the derivative rides along in doubles.
pub(crate) fn hp_pixel(frame: &FrameSpec, offset: Complex64, prec: u32) -> Pixel {
    let mut p = frame.center.with_prec(prec);
    p += &HpComplex::from_c64(offset, prec);
    let (mut z, c, mut dz, k) = match &frame.mode {
        Mode::Mandelbrot => (HpComplex::zero(prec), p, Complex64::new(0.0, 0.0), 1.0),
        Mode::Julia(c) => (p, c.with_prec(prec), Complex64::new(1.0, 0.0), 0.0),
    };
    let want_de = frame.coloring == Coloring::Distance;
    let r2 = Float::with_val(prec, frame.escape_radius * frame.escape_radius);
    let mut s = Scratch::new(prec);
    if *s.norm_sqr(&z) > r2 {
        return Pixel::escaped(0, z.to_c64(), dz);
    }
    for n in 1..=frame.max_iter {
        if want_de {
            dz = 2.0 * z.to_c64() * dz + k;
        }
        s.square_add(&mut z, &c);
        if *s.norm_sqr(&z) > r2 {
            let mut px = Pixel::escaped(n, z.to_c64(), dz);
            if !want_de {
                px.de = f64::NAN;
            }
            return px;
        }
    }
    Pixel::INSIDE
}

/// Renders every frame of a schedule; `deep` chooses the method per frame.
pub fn zoom_sequence(schedule: &ZoomSchedule, base: &FrameSpec, deep: DeepMode) -> Result<Vec<Image>> {
    schedule.validate()?;
    (0..schedule.frames)
        .map(|k| render_auto(&schedule.frame(base, k), deep))
        .collect()
}

/// Marks the pixels hit by cloud points; misses are counted.
pub fn overlay(image: &Image, cloud: &PointCloud, frame: &FrameSpec) -> Image {
    let mut out = image.clone();
    let center = frame.center.to_c64();
    for z in cloud.coords() {
        match frame.pixel_of_offset(z - center) {
            Some((i, j)) if i < out.width && j < out.height => {
                let k = out.index(i, j);
                out.marks[k] = true;
            }
            _ => out.overlay_outside += 1,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(re: f64, im: f64, width: f64, px: usize) -> FrameSpec {
        FrameSpec::new(HpComplex::from_f64(re, im, 128), width, (px, px), 500)
    }

    #[test]
    fn origin_is_interior() {
        let f = frame(0.0, 0.0, 4.0, 33);
        let img = render(&f).unwrap();
        let (i, j) = f.center_pixel();
        assert!(img.is_interior(i, j));
    }

    #[test]
    fn near_two_everything_escapes() {
        let img = render(&frame(2.0, 0.0, 0.1, 21)).unwrap();
        assert_eq!(img.interior_count(), 0);
    }

    #[test]
    fn pixel_geometry_round_trips() {
        let f = FrameSpec::new(HpComplex::zero(64), 2.0, (7, 4), 10);
        for j in 0..4 {
            for i in 0..7 {
                assert_eq!(f.pixel_of_offset(f.offset(i, j)), Some((i, j)));
            }
        }
        assert_eq!(f.pixel_of_offset(Complex64::new(0.0, 0.0)), Some((3, 2)));
        assert_eq!(f.pixel_of_offset(Complex64::new(1.01, 0.0)), None);
    }

    #[test]
    fn precision_policy_grows_with_depth() {
        assert_eq!(precision_policy(4.0), 64);
        assert_eq!(precision_policy(1.0), 66);
        assert_eq!(precision_policy(10f64.powf(-11.9)), 64 + 42);
        let f = frame(0.0, 0.0, 1e-3, 3).with_precision(300);
        assert_eq!(f.precision_bits(), 300);
    }

    #[test]
    fn hp_and_f64_agree_on_a_shallow_frame() {
        let f = frame(-0.75, 0.1, 0.05, 24).coloring(Coloring::Distance);
        let a = render_f64(&f);
        let b = render_hp(&f.clone().with_precision(128));
        assert!(a.agreement(&b, 1) >= 0.99);
    }

    #[test]
    fn schedule_widths() {
        let s = ZoomSchedule {
            center: HpComplex::zero(64),
            width_start: 10f64.powf(-1.5),
            width_end: 10f64.powf(-11.9),
            frames: 15,
        };
        let w = s.widths();
        assert_eq!(w.len(), 15);
        assert_eq!(w[0], s.width_start);
        assert_eq!(w[14], s.width_end);
        let r = 10f64.powf(-10.4 / 14.0);
        for k in 1..15 {
            assert!((w[k] / w[k - 1] / r - 1.0).abs() < 1e-12);
        }
        let two = ZoomSchedule { frames: 2, ..s };
        assert_eq!(two.widths(), vec![two.width_start, two.width_end]);
        assert_eq!(frame_file_name(0, 15, "png"), "001.png");
        assert_eq!(frame_file_name(14, 15, "png"), "015.png");
    }

    #[test]
    fn overlay_marks_center() {
        let f = frame(-0.5, 0.0, 3.0, 11);
        let img = render(&f).unwrap();
        let empty = overlay(&img, &PointCloud::new("e"), &f);
        assert!(empty.marks.iter().all(|m| !m));
        let cloud = PointCloud::from_points("c", [Complex64::new(-0.5, 0.0), Complex64::new(9.0, 0.0)], None);
        let out = overlay(&img, &cloud, &f);
        let (i, j) = f.center_pixel();
        assert!(out.marks[out.index(i, j)]);
        assert_eq!(out.marks.iter().filter(|&&m| m).count(), 1);
        assert_eq!(out.overlay_outside, 1);
        assert_eq!(out.counts, img.counts);
    }
}
