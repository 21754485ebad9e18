use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use image::{Rgb, RgbImage};

use super::{Coloring, Image, INTERIOR};
use crate::error::{Error, Result};

const MARK: [u8; 3] = [255, 32, 32];

fn escape_color(n: u32) -> [u8; 3] {
    // slow cosine palette over log iterations
    let t = (n as f64 + 1.0).ln() * 1.7;
    let ch = |phase: f64| (127.5 * (1.0 - (t + phase).cos())) as u8;
    [ch(0.0), ch(1.2), ch(2.4)]
}

impl Image {
    pub fn rgb(&self, i: usize, j: usize) -> [u8; 3] {
        let k = self.index(i, j);
        if self.marks[k] {
            return MARK;
        }
        let n = self.counts[k];
        if n == INTERIOR {
            return [0, 0, 0];
        }
        match self.coloring {
            Coloring::Binary => [255, 255, 255],
            Coloring::Escape => escape_color(n),
            Coloring::Distance => {
                let d = self.distance.as_ref().map_or(f64::INFINITY, |v| v[k]) / self.pitch;
                if d < 0.5 {
                    [0, 0, 0]
                } else {
                    let v = (255.0 * (d / 4.0).min(1.0).sqrt()) as u8;
                    [v, v, v]
                }
            }
        }
    }

    pub fn to_rgb_image(&self) -> RgbImage {
        RgbImage::from_fn(self.width as u32, self.height as u32, |i, j| Rgb(self.rgb(i as usize, j as usize)))
    }

    pub fn write_png(&self, path: &Path) -> Result<()> {
        self.to_rgb_image().save_with_format(path, image::ImageFormat::Png)?;
        Ok(())
    }

    pub fn write_ppm(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        write!(out, "P6\n{} {}\n255\n", self.width, self.height)?;
        for j in 0..self.height {
            for i in 0..self.width {
                out.write_all(&self.rgb(i, j))?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// PPM for a `.ppm` extension, PNG otherwise.
    pub fn save(&self, path: &Path) -> Result<()> {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("ppm") => self.write_ppm(path),
            _ => self.write_png(path),
        }
    }

    /// Raw counts: u32 LE width, u32 LE height, then row-major u32 LE counts
    /// (0xFFFFFFFF marks interior).
    pub fn write_counts(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(&(self.width as u32).to_le_bytes())?;
        out.write_all(&(self.height as u32).to_le_bytes())?;
        for &c in &self.counts {
            out.write_all(&c.to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Reads a counts dump back as (width, height, counts).
pub fn read_counts(path: &Path) -> Result<(usize, usize, Vec<u32>)> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    let word = |k: usize| -> Option<u32> { Some(u32::from_le_bytes(bytes.get(4 * k..4 * k + 4)?.try_into().ok()?)) };
    let bad = || Error::Parse("truncated counts file".into());
    let (w, h) = (word(0).ok_or_else(bad)? as usize, word(1).ok_or_else(bad)? as usize);
    if bytes.len() != 8 + 4 * w * h {
        return Err(bad());
    }
    let counts = (0..w * h).map(|k| word(k + 2).unwrap()).collect();
    Ok((w, h, counts))
}
