//! Per-command key schemas and the resolved parameter map.
//!
//! Values come from three layers: schema defaults, a config file (plain
//! `key = value` lines or a previous run's manifest.json) and command-line
//! flags, later layers winning. Every value stays a string until a command
//! asks for it with a type, so the manifest can echo exactly what ran.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use decolab::render::{Coloring, DeepMode, Mode};
use decolab::{Execution, HpComplex};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, keys or values; exit code 2.
    Usage(String),
    /// The computation itself failed; exit code 1.
    Domain(decolab::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(e) => write!(f, "{e}"),
        }
    }
}

impl From<decolab::Error> for CliError {
    fn from(e: decolab::Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Domain(e.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Clone, Copy, Debug)]
pub enum Default {
    Required,
    Optional,
    Value(&'static str),
}

#[derive(Debug)]
pub struct Key {
    pub name: &'static str,
    pub default: Default,
    pub help: &'static str,
}

const fn req(name: &'static str, help: &'static str) -> Key {
    Key { name, default: Default::Required, help }
}

const fn opt(name: &'static str, help: &'static str) -> Key {
    Key { name, default: Default::Optional, help }
}

const fn val(name: &'static str, v: &'static str, help: &'static str) -> Key {
    Key { name, default: Default::Value(v), help }
}

#[derive(Debug)]
pub struct Schema {
    pub command: &'static str,
    pub about: &'static str,
    pub keys: &'static [Key],
}

impl Schema {
    pub fn key(&self, name: &str) -> Option<&Key> {
        self.keys.iter().find(|k| k.name == name)
    }
}

/// Not echoed into the manifest: it only says where artifacts go.
pub const OUT_DIR: &str = "out-dir";
pub const OUT_DIR_DEFAULT: &str = "decolab-out";

const PRECISION_HELP: &str = "mantissa bits (default: DECOLAB_PRECISION_BITS, else 256)";
const FRAME_PRECISION_HELP: &str = "mantissa bits or auto (default: DECOLAB_PRECISION_BITS, else auto = 64 + log2(4/width))";
const EXEC_HELP: &str = "parallel or sequential";

pub static SCHEMAS: &[Schema] = &[
    Schema {
        command: "solve-center",
        about: "Superattracting center of exact period q near a seed",
        keys: &[
            req("period", "exact period q"),
            req("seed", "complex seed, RE+IMi or RE,IM"),
            val("tol", "1e-40", "Newton step tolerance"),
            opt("precision", PRECISION_HELP),
        ],
    },
    Schema {
        command: "solve-misiurewicz",
        about: "Strictly preperiodic parameter with P^(l+k)(0) = P^l(0)",
        keys: &[
            req("l", "preperiod l (iterates of 0)"),
            req("k", "period k"),
            req("seed", "complex seed"),
            val("tol", "1e-40", "Newton step tolerance"),
            opt("precision", PRECISION_HELP),
        ],
    },
    Schema {
        command: "solve-parabolic",
        about: "Root of the period-m component with multiplier exp(2 pi i num/den)",
        keys: &[
            req("period", "cycle period m"),
            req("num", "rotation numerator"),
            req("den", "rotation denominator"),
            req("seed", "parameter seed"),
            req("z-seed", "cycle point seed"),
            val("tol", "1e-30", "Newton step tolerance"),
            opt("precision", PRECISION_HELP),
        ],
    },
    Schema {
        command: "tune",
        about: "Tuned Misiurewicz parameter s0 ⊥ c0 of relation (p·l, p·k)",
        keys: &[
            req("s0", "center of the small copy"),
            req("p", "period of s0"),
            req("l", "preperiod of c0"),
            req("k", "period of c0"),
            req("c0", "seed for the (l, k) parameter c0 of M"),
            val("s0-tol", "1e-12", "largest distance from s0 to the period-p center it is snapped to"),
            val("tol", "1e-40", "Newton step tolerance"),
            val("copy-radius", "10", "acceptance radius in units of |s0 - nearest period-2p center|"),
            opt("precision", PRECISION_HELP),
        ],
    },
    Schema {
        command: "cascade",
        about: "Centers of periods q0 + n·dq accumulating on c1",
        keys: &[
            req("c1", "accumulation point"),
            req("base", "seed for the first center, of period base-period"),
            req("base-period", "period of the first center"),
            req("dq", "period step"),
            val("count", "8", "number of centers, base included"),
            opt("l", "Misiurewicz preperiod of c1; with k, refines c1 and predicts by 1/mu"),
            opt("k", "Misiurewicz period of c1"),
            val("petals", "2", "petal count for a parabolic c1"),
            val("tol", "1e-40", "Newton step tolerance"),
            opt("precision", PRECISION_HELP),
        ],
    },
    Schema {
        command: "build-model",
        about: "Decorated model M(c') or K_c(c') as a point cloud",
        keys: &[
            val("kind", "m", "m for M(c'), k for K_c(c')"),
            opt("c", "parameter c of K_c (kind k)"),
            req("c-prime", "parameter c' of the decorating Julia set"),
            opt("r", "Douady radius R: rho' = R^-1/2, rho = R^1/2"),
            opt("rho-prime", "inner radius rho' (with rho, instead of r)"),
            opt("rho", "outer radius rho"),
            val("m-max", "6", "deepest decoration level"),
            val("samples", "2000", "Julia samples per level"),
            val("rng-seed", "1", "sampler seed"),
            val("format", "csv", "csv or bin"),
            val("exec", "parallel", EXEC_HELP),
        ],
    },
    Schema {
        command: "render",
        about: "Escape-time, distance or binary image of one frame",
        keys: &[
            req("center", "frame center"),
            req("width", "horizontal extent"),
            val("px", "512x512", "pixels WxH"),
            val("max-iter", "2000", "iteration budget"),
            val("mode", "mandelbrot", "mandelbrot or julia:C"),
            val("color", "escape", "escape, distance or binary"),
            val("out", "render.png", "image file (.png or .ppm), relative to out-dir"),
            opt("overlay", "point-cloud CSV to mark on the image"),
            val("deep", "auto", "perturbation: auto, on or off"),
            val("counts", "false", "also write raw counts to render.counts"),
            opt("precision", FRAME_PRECISION_HELP),
            val("exec", "parallel", EXEC_HELP),
        ],
    },
    Schema {
        command: "zoom",
        about: "Geometric zoom sequence written as 001.png, 002.png, ...",
        keys: &[
            req("center", "zoom center"),
            req("width-start", "width of the first frame"),
            req("width-end", "width of the last frame"),
            val("frames", "15", "number of frames"),
            val("px", "256x256", "pixels WxH"),
            val("max-iter", "2000", "iteration budget"),
            val("mode", "mandelbrot", "mandelbrot or julia:C"),
            val("color", "escape", "escape, distance or binary"),
            val("deep", "auto", "perturbation: auto, on or off"),
            val("ext", "png", "png or ppm"),
            opt("precision", FRAME_PRECISION_HELP),
            val("exec", "parallel", EXEC_HELP),
        ],
    },
    Schema {
        command: "verify-similarity",
        about: "Align the model M(c') with the extracted boundary near a small copy",
        keys: &[
            req("seed", "parameter near the small copy"),
            req("c-prime", "decorating parameter c'"),
            val("r", "220", "Douady radius R"),
            val("m-max", "6", "deepest decoration level"),
            val("samples", "2000", "Julia samples per level"),
            val("rng-seed", "1", "sampler seed"),
            val("q-max", "300", "largest period searched when snapping the seed"),
            val("window-factor", "10", "window width in copy diameters"),
            val("pixels", "256", "square render size for boundary extraction"),
            val("max-iter", "30000", "iteration budget"),
            val("de-threshold", "0.5", "boundary threshold in pixel pitches"),
            val("iterations", "30", "alignment iterations"),
            val("threshold", "0.05", "largest accepted normalized Hausdorff residual"),
            val("exec", "parallel", EXEC_HELP),
        ],
    },
    Schema {
        command: "semihyp",
        about: "Finite-orbit semihyperbolicity heuristic at c",
        keys: &[
            req("c", "parameter"),
            val("n-iter", "10000", "iterates inspected"),
            opt("delta", "trap radius (default 1e-3 of the orbit diameter)"),
            val("transient", "100", "iterates ignored for the minimum"),
            opt("precision", PRECISION_HELP),
        ],
    },
    Schema {
        command: "winding",
        about: "Winding number of a parameter map around a circle",
        keys: &[
            val("map", "center", "center (c -> P^q(0)) or misiurewicz (c -> P^(l+k)(0) - P^l(0))"),
            opt("period", "q for the center map"),
            opt("l", "preperiod for the misiurewicz map"),
            opt("k", "period for the misiurewicz map"),
            req("center", "circle center"),
            req("radius", "circle radius"),
            val("samples", "64", "initial samples on the circle"),
            opt("precision", PRECISION_HELP),
        ],
    },
];

pub fn schema(command: &str) -> Option<&'static Schema> {
    SCHEMAS.iter().find(|s| s.command == command)
}

/// Keys accept `snake_case` in config files.
fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

fn check_key(schema: &Schema, key: &str) -> CliResult<()> {
    if key == OUT_DIR || schema.key(key).is_some() {
        Ok(())
    } else {
        Err(usage(format!("unknown key {key:?} for {}", schema.command)))
    }
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config_text(schema: &Schema, text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("line {}: expected key = value, got {raw:?}", n + 1)))?;
        let key = normalize(k);
        check_key(schema, &key).map_err(|e| usage(format!("line {}: {}", n + 1, strip(e))))?;
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(usage(format!("line {}: duplicate key {key:?}", n + 1)));
        }
    }
    Ok(out)
}

fn strip(e: CliError) -> String {
    match e {
        CliError::Usage(m) => m,
        other => other.to_string(),
    }
}

/// The params of a manifest written by the same command.
pub fn parse_manifest_text(schema: &Schema, text: &str) -> CliResult<BTreeMap<String, String>> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| usage(format!("manifest: {e}")))?;
    let command = v.get("command").and_then(|c| c.as_str()).unwrap_or("");
    if command != schema.command {
        return Err(usage(format!("manifest is for {command:?}, not {}", schema.command)));
    }
    let params = v
        .get("params")
        .and_then(|p| p.as_object())
        .ok_or_else(|| usage("manifest has no params object"))?;
    let mut out = BTreeMap::new();
    for (k, v) in params {
        let key = normalize(k);
        check_key(schema, &key)?;
        let s = v.as_str().ok_or_else(|| usage(format!("manifest param {k:?} is not a string")))?;
        out.insert(key, s.to_string());
    }
    Ok(out)
}

pub fn load_config(schema: &Schema, path: &Path) -> CliResult<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "json") {
        parse_manifest_text(schema, &text)
    } else {
        parse_config_text(schema, &text)
    }
}

/// Resolved string values; typed accessors turn bad values into usage errors.
#[derive(Clone, Debug)]
pub struct Params {
    pub command: &'static str,
    values: BTreeMap<String, String>,
}

impl Params {
    /// Defaults, then `file`, then `flags`; required keys must end up set.
    pub fn resolve(
        schema: &'static Schema,
        file: BTreeMap<String, String>,
        flags: BTreeMap<String, String>,
    ) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for k in schema.keys {
            if let Default::Value(v) = k.default {
                values.insert(k.name.to_string(), v.to_string());
            }
        }
        values.extend(file);
        values.extend(flags);
        for k in schema.keys {
            if matches!(k.default, Default::Required) && !values.contains_key(k.name) {
                return Err(usage(format!("missing required --{}", k.name)));
            }
        }
        Ok(Self {
            command: schema.command,
            values,
        })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    /// Everything except the output directory.
    pub fn echo(&self) -> BTreeMap<String, String> {
        self.values.iter().filter(|(k, _)| *k != OUT_DIR).map(|(k, v)| (k.clone(), v.clone())).collect()
    }

    fn need(&self, key: &str) -> CliResult<&str> {
        self.raw(key).ok_or_else(|| usage(format!("missing required --{key}")))
    }

    pub fn get<T: std::str::FromStr>(&self, key: &str) -> CliResult<T> {
        let s = self.need(key)?;
        s.parse().map_err(|_| usage(format!("--{key}: cannot parse {s:?}")))
    }

    pub fn get_opt<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        if self.has(key) {
            self.get(key).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn complex(&self, key: &str, prec: u32) -> CliResult<HpComplex> {
        let s = self.need(key)?;
        HpComplex::parse(s, prec).map_err(|_| usage(format!("--{key}: not a complex number: {s:?}")))
    }

    pub fn complex_opt(&self, key: &str, prec: u32) -> CliResult<Option<HpComplex>> {
        if self.has(key) {
            self.complex(key, prec).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn flag(&self, key: &str) -> CliResult<bool> {
        match self.need(key)? {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            s => Err(usage(format!("--{key}: expected true or false, got {s:?}"))),
        }
    }

    /// Solver precision: the key, then the environment, then `default`.
    /// The resolved value is written back so the manifest records it.
    pub fn precision(&mut self, default: u32) -> CliResult<u32> {
        let bits = match self.get_opt::<u32>("precision")? {
            Some(b) => b,
            None => decolab::render::precision_from_env().unwrap_or(default),
        };
        if bits < 32 {
            return Err(usage("--precision must be at least 32 bits"));
        }
        self.set("precision", bits);
        Ok(bits)
    }

    /// Frame precision: `None` means the width-based policy.
    pub fn frame_precision(&mut self) -> CliResult<Option<u32>> {
        let bits = match self.raw("precision") {
            Some("auto") => None,
            Some(_) => Some(self.get::<u32>("precision")?),
            None => decolab::render::precision_from_env(),
        };
        if bits.is_some_and(|b| b < 32) {
            return Err(usage("--precision must be at least 32 bits"));
        }
        match bits {
            Some(b) => self.set("precision", b),
            None => self.set("precision", "auto"),
        }
        Ok(bits)
    }

    pub fn exec(&self) -> CliResult<Execution> {
        match self.need("exec")? {
            "parallel" => Ok(Execution::Parallel),
            "sequential" => Ok(Execution::Sequential),
            s => Err(usage(format!("--exec: expected parallel or sequential, got {s:?}"))),
        }
    }

    pub fn pixels(&self, key: &str) -> CliResult<(usize, usize)> {
        let s = self.need(key)?;
        let bad = || usage(format!("--{key}: expected WxH, got {s:?}"));
        let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let (w, h) = (w.trim().parse().map_err(|_| bad())?, h.trim().parse().map_err(|_| bad())?);
        if w == 0 || h == 0 {
            return Err(bad());
        }
        Ok((w, h))
    }

    pub fn mode(&self, prec: u32) -> CliResult<Mode> {
        let s = self.need("mode")?;
        if s == "mandelbrot" {
            return Ok(Mode::Mandelbrot);
        }
        let c = s
            .strip_prefix("julia:")
            .ok_or_else(|| usage(format!("--mode: expected mandelbrot or julia:C, got {s:?}")))?;
        HpComplex::parse(c, prec)
            .map(Mode::Julia)
            .map_err(|_| usage(format!("--mode: not a complex number: {c:?}")))
    }

    pub fn coloring(&self) -> CliResult<Coloring> {
        match self.need("color")? {
            "escape" => Ok(Coloring::Escape),
            "distance" => Ok(Coloring::Distance),
            "binary" => Ok(Coloring::Binary),
            s => Err(usage(format!("--color: expected escape, distance or binary, got {s:?}"))),
        }
    }

    pub fn deep(&self) -> CliResult<DeepMode> {
        match self.need("deep")? {
            "auto" => Ok(DeepMode::Auto),
            "on" => Ok(DeepMode::On),
            "off" => Ok(DeepMode::Off),
            s => Err(usage(format!("--deep: expected auto, on or off, got {s:?}"))),
        }
    }
}
