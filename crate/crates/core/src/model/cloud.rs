use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloudPoint {
    pub z: Complex64,
    /// decoration level m, when the point belongs to one
    pub level: Option<u32>,
}

/// Finite set of plane points with optional level labels.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub label: String,
    pub points: Vec<CloudPoint>,
}

impl PointCloud {
    pub fn new(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            points: Vec::new(),
        }
    }

    pub fn from_points(label: impl Into<String>, pts: impl IntoIterator<Item = Complex64>, level: Option<u32>) -> Self {
        Self {
            label: label.into(),
            points: pts.into_iter().map(|z| CloudPoint { z, level }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn push(&mut self, z: Complex64, level: Option<u32>) {
        self.points.push(CloudPoint { z, level });
    }

    pub fn coords(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.points.iter().map(|p| p.z)
    }

    pub fn extend(&mut self, other: &PointCloud) {
        self.points.extend_from_slice(&other.points);
    }

    /// Points whose level is `m`.
    pub fn level(&self, m: u32) -> PointCloud {
        PointCloud {
            label: format!("{}[m={m}]", self.label),
            points: self.points.iter().filter(|p| p.level == Some(m)).copied().collect(),
        }
    }

    pub fn filter(&self, keep: impl Fn(&CloudPoint) -> bool) -> PointCloud {
        PointCloud {
            label: self.label.clone(),
            points: self.points.iter().filter(|p| keep(p)).copied().collect(),
        }
    }

    /// Applies z -> a z + b to every point.
    pub fn map_affine(&self, a: Complex64, b: Complex64) -> PointCloud {
        PointCloud {
            label: self.label.clone(),
            points: self
                .points
                .iter()
                .map(|p| CloudPoint {
                    z: a * p.z + b,
                    level: p.level,
                })
                .collect(),
        }
    }

    /// Axis-aligned bounds (min corner, max corner).
    pub fn bounds(&self) -> Option<(Complex64, Complex64)> {
        let mut it = self.coords();
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), z| {
            (
                Complex64::new(lo.re.min(z.re), lo.im.min(z.im)),
                Complex64::new(hi.re.max(z.re), hi.im.max(z.im)),
            )
        }))
    }

    /// Diagonal of the bounding box; cheap upper bound within √2 of the
    /// true diameter.
    pub fn extent(&self) -> f64 {
        self.bounds().map_or(0.0, |(lo, hi)| (hi - lo).norm())
    }

    /// Exact diameter, O(n log n) via the convex hull.
    pub fn diameter(&self) -> f64 {
        let hull = convex_hull(self.coords().collect());
        let mut best = 0.0f64;
        for (i, a) in hull.iter().enumerate() {
            for b in &hull[i + 1..] {
                best = best.max((a - b).norm());
            }
        }
        best
    }

    pub fn centroid(&self) -> Option<Complex64> {
        if self.is_empty() {
            return None;
        }
        Some(self.coords().sum::<Complex64>() / self.len() as f64)
    }

    /// Keeps the first point in every grid cell of side `resolution`.
    pub fn dedup(&mut self, resolution: f64) {
        if !(resolution > 0.0) {
            return;
        }
        let mut seen = HashSet::new();
        self.points.retain(|p| {
            let key = ((p.z.re / resolution).floor() as i64, (p.z.im / resolution).floor() as i64, p.level);
            seen.insert(key)
        });
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        self.write_csv_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    /// `re,im,level` with shortest round-trip decimals; empty level for none.
    pub fn write_csv_to(&self, out: &mut impl Write) -> Result<()> {
        writeln!(out, "re,im,level")?;
        for p in &self.points {
            match p.level {
                Some(m) => writeln!(out, "{:?},{:?},{m}", p.z.re, p.z.im)?,
                None => writeln!(out, "{:?},{:?},", p.z.re, p.z.im)?,
            }
        }
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Self::read_csv_from(BufReader::new(File::open(path)?), label)
    }

    pub fn read_csv_from(input: impl BufRead, label: String) -> Result<Self> {
        let mut cloud = PointCloud::new(label);
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (i == 0 && line.starts_with("re")) {
                continue;
            }
            let bad = || Error::Parse(format!("cloud line {}: {line:?}", i + 1));
            let mut fields = line.split(',');
            let re: f64 = fields.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            let im: f64 = fields.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            let level = match fields.next().map(str::trim) {
                None | Some("") => None,
                Some(s) => Some(s.parse().map_err(|_| bad())?),
            };
            cloud.push(Complex64::new(re, im), level);
        }
        Ok(cloud)
    }

    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        self.write_binary_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    /// u64 count, then (re, im, level) as little-endian f64; level -1 = none.
    pub fn write_binary_to(&self, out: &mut impl Write) -> Result<()> {
        out.write_all(&(self.points.len() as u64).to_le_bytes())?;
        for p in &self.points {
            out.write_all(&p.z.re.to_le_bytes())?;
            out.write_all(&p.z.im.to_le_bytes())?;
            out.write_all(&p.level.map_or(-1.0, f64::from).to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(path: &Path) -> Result<Self> {
        let label = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        Self::read_binary_from(BufReader::new(File::open(path)?), label)
    }

    pub fn read_binary_from(mut input: impl Read, label: String) -> Result<Self> {
        let mut word = [0u8; 8];
        input.read_exact(&mut word)?;
        let n = u64::from_le_bytes(word) as usize;
        let mut cloud = PointCloud::new(label);
        cloud.points.reserve(n.min(1 << 24));
        let mut next = |input: &mut dyn Read| -> Result<f64> {
            input.read_exact(&mut word)?;
            Ok(f64::from_le_bytes(word))
        };
        for _ in 0..n {
            let re = next(&mut input)?;
            let im = next(&mut input)?;
            let lv = next(&mut input)?;
            let level = if lv < 0.0 { None } else { Some(lv as u32) };
            cloud.push(Complex64::new(re, im), level);
        }
        Ok(cloud)
    }
}

/// Monotone chain hull, counter-clockwise, without collinear points.
fn convex_hull(mut pts: Vec<Complex64>) -> Vec<Complex64> {
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Complex64, a: Complex64, b: Complex64| (a - o).re * (b - o).im - (a - o).im * (b - o).re;
    let mut hull: Vec<Complex64> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Complex64>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}
