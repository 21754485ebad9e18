//! One function per subcommand. Each reads typed values from the params,
//! calls into the library, prints a short summary and writes artifacts.

use std::fs;
use std::path::{Path, PathBuf};

use decolab::model::{build_model_k, build_model_m, ModelSpec, PointCloud};
use decolab::render::{frame_file_name, overlay, precision_policy, render_auto, FrameSpec, ZoomSchedule};
use decolab::solvers::{
    cascade, copy_scale, multiplier_at_misiurewicz, solve_misiurewicz, solve_parabolic_root,
    solve_superattracting_center, tune_misiurewicz, winding_number, CascadeOptions, MisiurewiczSpec, ParabolicSpec,
    ParamMap, TuneOptions, WindingOptions,
};
use decolab::verify::{decoration_similarity, semihyperbolic_test, SemihypOptions, SimilaritySetup};
use decolab::{Complex64, HpComplex};
use serde_json::{json, Value};

use crate::config::{CliError, CliResult, Params};

/// Artifact sink rooted at the output directory.
pub struct Run {
    pub params: Params,
    pub out_dir: PathBuf,
    pub artifacts: Vec<String>,
}

impl Run {
    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn record(&mut self, name: &str) {
        if !self.artifacts.iter().any(|a| a == name) {
            self.artifacts.push(name.to_string());
        }
    }

    fn write_json(&mut self, name: &str, value: &Value) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(decolab::Error::from)?;
        text.push('\n');
        fs::write(self.path(name), text)?;
        self.record(name);
        Ok(())
    }

    /// Artifact name for a user-supplied file: relative paths live in out-dir.
    fn artifact_path(&self, file: &str) -> (PathBuf, String) {
        let p = Path::new(file);
        if p.is_absolute() {
            (p.to_path_buf(), file.to_string())
        } else {
            (self.out_dir.join(p), file.to_string())
        }
    }
}

fn full(z: &HpComplex) -> String {
    z.to_string_digits(z.full_digits())
}

fn c64(z: Complex64) -> String {
    format!("{:?}{:+?}i", z.re, z.im)
}

fn mis_spec(p: &Params) -> CliResult<MisiurewiczSpec> {
    Ok(MisiurewiczSpec::new(p.get("l")?, p.get("k")?)?)
}

pub fn dispatch(run: &mut Run) -> CliResult<()> {
    match run.params.command {
        "solve-center" => solve_center(run),
        "solve-misiurewicz" => solve_mis(run),
        "solve-parabolic" => solve_parabolic(run),
        "tune" => tune(run),
        "cascade" => cascade_cmd(run),
        "build-model" => build_model(run),
        "render" => render(run),
        "zoom" => zoom(run),
        "verify-similarity" => verify_similarity(run),
        "semihyp" => semihyp(run),
        "winding" => winding(run),
        other => Err(CliError::Usage(format!("unknown command {other:?}"))),
    }
}

fn solve_center(run: &mut Run) -> CliResult<()> {
    let prec = run.params.precision(256)?;
    let p = &run.params;
    let q: usize = p.get("period")?;
    let c = solve_superattracting_center(q, &p.complex("seed", prec)?, p.get("tol")?)?;
    let scale = copy_scale(&c, q);
    println!("c = {}", full(&c));
    println!("period = {q}");
    println!("copy scale = {}", scale.to_string_digits(17));
    run.write_json("result.json", &json!({ "c": full(&c), "period": q, "copy_scale": full(&scale) }))
}

fn solve_mis(run: &mut Run) -> CliResult<()> {
    let prec = run.params.precision(256)?;
    let p = &run.params;
    let spec = mis_spec(p)?;
    let c = solve_misiurewicz(spec, &p.complex("seed", prec)?, p.get("tol")?)?;
    let mu = multiplier_at_misiurewicz(&c, spec)?;
    println!("c = {}", full(&c));
    println!("(l, k) = ({}, {})", spec.preperiod, spec.period);
    println!("multiplier = {} (|mu| = {:.6})", mu.to_string_digits(17), mu.abs_f64());
    run.write_json(
        "result.json",
        &json!({ "c": full(&c), "l": spec.preperiod, "k": spec.period, "multiplier": full(&mu) }),
    )
}

fn solve_parabolic(run: &mut Run) -> CliResult<()> {
    let prec = run.params.precision(256)?;
    let p = &run.params;
    let spec = ParabolicSpec::new(p.get("period")?, p.get("num")?, p.get("den")?)?;
    let r = solve_parabolic_root(spec, &p.complex("seed", prec)?, &p.complex("z-seed", prec)?, p.get("tol")?)?;
    println!("c = {}", full(&r.c));
    println!("z = {}", full(&r.z));
    println!("multiplier = {}", r.multiplier.to_string_digits(17));
    run.write_json(
        "result.json",
        &json!({ "c": full(&r.c), "z": full(&r.z), "multiplier": full(&r.multiplier) }),
    )
}

fn tune(run: &mut Run) -> CliResult<()> {
    let prec = run.params.precision(256)?;
    let p = &run.params;
    let period: usize = p.get("p")?;
    let spec = mis_spec(p)?;
    let opts = TuneOptions {
        tol: p.get("tol")?,
        copy_radius_factor: p.get("copy-radius")?,
    };
    // s0 is usually typed to ~17 digits; snap it to the exact center first.
    let given = p.complex("s0", prec)?;
    let s0 = solve_superattracting_center(period, &given, opts.tol)?;
    let moved = (&s0 - &given).abs_f64();
    if moved > p.get::<f64>("s0-tol")? {
        return Err(decolab::Error::InvalidInput(format!(
            "s0 is {moved:.3e} from the nearest period-{period} center {}",
            s0.to_string_digits(20)
        ))
        .into());
    }
    let c1 = tune_misiurewicz(&s0, period, &p.complex("c0", prec)?, spec, &opts)?;
    let tuned = spec.tuned(period);
    println!("c1 = {}", full(&c1));
    println!("relation = ({}, {})", tuned.preperiod, tuned.period);
    run.write_json(
        "result.json",
        &json!({ "c1": full(&c1), "l": tuned.preperiod, "k": tuned.period }),
    )
}

fn cascade_cmd(run: &mut Run) -> CliResult<()> {
    let prec = run.params.precision(256)?;
    let p = &run.params;
    let opts = CascadeOptions {
        tol: p.get("tol")?,
        petals: p.get("petals")?,
        ..CascadeOptions::default()
    };
    let mut c1 = p.complex("c1", prec)?;
    let mu = match (p.get_opt::<usize>("l")?, p.get_opt::<usize>("k")?) {
        (Some(l), Some(k)) => {
            let spec = MisiurewiczSpec::new(l, k)?;
            c1 = solve_misiurewicz(spec, &c1, opts.tol)?;
            Some(multiplier_at_misiurewicz(&c1, spec)?)
        }
        (None, None) => None,
        _ => return Err(CliError::Usage("--l and --k go together".into())),
    };
    let q0: usize = p.get("base-period")?;
    let base = solve_superattracting_center(q0, &p.complex("base", prec)?, opts.tol)?;
    let rec = cascade(
        &c1,
        &base,
        q0,
        p.get("dq")?,
        p.get("count")?,
        mu.as_ref(),
        &opts,
    )?;
    let offsets = rec.offsets();
    for ((s, q), d) in rec.centers.iter().zip(&offsets) {
        println!("q = {q:>5}  s = {}  |s - c1| = {:.6e}", s.to_string_digits(25), d.abs_f64());
    }
    println!("law = {:?}, slope = {:.4}, fit residual = {:.3e}", rec.fitted_law, rec.fitted_slope, rec.fit_residual);
    if let Some(why) = &rec.aborted {
        println!("stopped early: {why}");
    }
    let centers: Vec<Value> = rec
        .centers
        .iter()
        .zip(&offsets)
        .map(|((s, q), d)| json!({ "period": q, "center": full(s), "distance": d.abs_f64() }))
        .collect();
    let value = json!({
        "c1": full(&rec.c1),
        "mu": rec.mu.as_ref().map(full),
        "centers": centers,
        "ratios": rec.ratios.iter().map(|r| c64(*r)).collect::<Vec<_>>(),
        "law": rec.fitted_law,
        "slope": rec.fitted_slope,
        "fit_residual": rec.fit_residual,
        "constant": rec.fitted_constant.map(c64),
        "settled_from": rec.settled_from,
        "aborted": rec.aborted,
    });
    run.write_json("cascade.json", &value)
}

fn model_spec(p: &Params, samples: usize, seed: u64) -> CliResult<ModelSpec> {
    let c_prime = p.complex("c-prime", 64)?.to_c64();
    let m_max = p.get("m-max")?;
    let spec = match (p.get_opt::<f64>("r")?, p.get_opt::<f64>("rho-prime")?, p.get_opt::<f64>("rho")?) {
        (Some(r), None, None) => ModelSpec::douady(c_prime, r, m_max, samples, seed)?,
        (None, Some(a), Some(b)) => ModelSpec::new(c_prime, a, b, m_max, samples, seed)?,
        _ => return Err(CliError::Usage("give either --r or both --rho-prime and --rho".into())),
    };
    Ok(spec)
}

fn build_model(run: &mut Run) -> CliResult<()> {
    let p = &run.params;
    let spec = model_spec(p, p.get("samples")?, p.get("rng-seed")?)?;
    let exec = p.exec()?;
    let build = match p.raw("kind") {
        Some("m") => build_model_m(&spec, exec)?,
        Some("k") => {
            let c = p.complex_opt("c", 64)?.ok_or_else(|| CliError::Usage("--kind k needs --c".into()))?;
            build_model_k(c.to_c64(), &spec, exec)?
        }
        other => return Err(CliError::Usage(format!("--kind: expected m or k, got {other:?}"))),
    };
    let name = match p.raw("format") {
        Some("csv") => "cloud.csv",
        Some("bin") => "cloud.bin",
        other => return Err(CliError::Usage(format!("--format: expected csv or bin, got {other:?}"))),
    };
    for l in &build.levels {
        println!("level {}: {} points, {} dropped, {} in band", l.level, l.emitted, l.dropped, l.in_band);
    }
    println!("{} points, band fraction {:.4}", build.emitted(), build.band_fraction());
    let path = run.path(name);
    if name.ends_with("csv") {
        build.cloud.write_csv(&path)?;
    } else {
        build.cloud.write_binary(&path)?;
    }
    run.record(name);
    let levels = serde_json::to_value(&build.levels).map_err(decolab::Error::from)?;
    run.write_json(
        "levels.json",
        &json!({ "label": build.cloud.label, "r": spec.r(), "levels": levels, "band_fraction": build.band_fraction() }),
    )
}

/// Frame from the shared render/zoom keys; `precision` is the resolved value.
fn base_frame(p: &Params, center: HpComplex, width: f64, precision: Option<u32>) -> CliResult<FrameSpec> {
    let prec = precision.unwrap_or_else(|| precision_policy(width)).max(center.prec());
    let mut f = FrameSpec::new(center, width, p.pixels("px")?, p.get("max-iter")?)
        .coloring(p.coloring()?)
        .with_exec(p.exec()?);
    f.mode = p.mode(prec)?;
    Ok(f)
}

fn render(run: &mut Run) -> CliResult<()> {
    let precision = run.params.frame_precision()?;
    let p = &run.params;
    let width: f64 = p.get("width")?;
    let bits = precision.unwrap_or_else(|| precision_policy(width));
    let center = p.complex("center", bits.max(256))?;
    let frame = base_frame(p, center, width, precision)?.with_precision(bits);
    frame.validate()?;
    let mut img = render_auto(&frame, p.deep()?)?;
    if let Some(file) = p.raw("overlay") {
        let cloud = PointCloud::read_csv(Path::new(file))?;
        img = overlay(&img, &cloud, &frame);
        println!("overlay: {} points, {} outside the frame", cloud.len(), img.overlay_outside);
    }
    let (path, name) = run.artifact_path(p.raw("out").unwrap_or("render.png"));
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    img.save(&path)?;
    run.record(&name);
    if run.params.flag("counts")? {
        img.write_counts(&run.path("render.counts"))?;
        run.record("render.counts");
    }
    println!(
        "{}x{} at width {width:e}: {} interior pixels, {} bits, perturbation {}, {} references",
        img.width,
        img.height,
        img.interior_count(),
        img.stats.precision_bits,
        img.stats.perturbation,
        img.stats.references
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn zoom(run: &mut Run) -> CliResult<()> {
    let precision = run.params.frame_precision()?;
    let p = &run.params;
    let (w0, w1): (f64, f64) = (p.get("width-start")?, p.get("width-end")?);
    let bits = precision.unwrap_or_else(|| precision_policy(w0.min(w1)));
    let schedule = ZoomSchedule {
        center: p.complex("center", bits.max(256))?,
        width_start: w0,
        width_end: w1,
        frames: p.get("frames")?,
    };
    schedule.validate()?;
    let ext = match p.raw("ext") {
        Some(e @ ("png" | "ppm")) => e.to_string(),
        other => return Err(CliError::Usage(format!("--ext: expected png or ppm, got {other:?}"))),
    };
    let deep = p.deep()?;
    let base = base_frame(p, schedule.center.clone(), w0, precision)?;
    for (k, w) in schedule.widths().into_iter().enumerate() {
        let mut frame = schedule.frame(&base, k);
        frame.precision = Some(precision.unwrap_or_else(|| precision_policy(w)));
        let img = render_auto(&frame, deep)?;
        let name = frame_file_name(k, schedule.frames, &ext);
        img.save(&run.path(&name))?;
        run.record(&name);
        println!("{name}: width {w:.4e}, {} interior pixels, {} bits", img.interior_count(), img.stats.precision_bits);
    }
    Ok(())
}

fn verify_similarity(run: &mut Run) -> CliResult<()> {
    let p = &run.params;
    let spec = model_spec(p, p.get("samples")?, p.get("rng-seed")?)?;
    let setup = SimilaritySetup {
        seed: p.complex("seed", 256)?,
        q_max: p.get("q-max")?,
        model: spec,
        window_factor: p.get("window-factor")?,
        pixels: p.get("pixels")?,
        max_iter: p.get("max-iter")?,
        de_threshold_px: p.get("de-threshold")?,
        iterations: p.get("iterations")?,
        threshold: p.get("threshold")?,
        exec: p.exec()?,
    };
    let out = decoration_similarity(&setup)?;
    out.model.write_csv(&run.path("model.csv"))?;
    run.record("model.csv");
    out.target.write_csv(&run.path("target.csv"))?;
    run.record("target.csv");
    let mut report = out.report.clone();
    report.artifact("model.csv").artifact("target.csv");
    report.write_json(&run.path("report.json"))?;
    run.record("report.json");
    println!("center = {} (period {})", out.center.to_string_digits(25), out.period);
    println!("map: a = {}, b = {}", c64(out.alignment.a), c64(out.alignment.b));
    println!(
        "residual = {:.4} (threshold {}), copy-scale map alone {:.4}",
        out.alignment.residual, setup.threshold, out.naive_residual
    );
    println!("{}", if report.passed { "PASS" } else { "FAIL" });
    for n in &report.notes {
        println!("note: {n}");
    }
    Ok(())
}

fn semihyp(run: &mut Run) -> CliResult<()> {
    let prec = run.params.precision(256)?;
    let p = &run.params;
    let c = p.complex("c", prec)?;
    let opts = SemihypOptions {
        n_iter: p.get("n-iter")?,
        delta: p.get_opt("delta")?,
        transient: p.get("transient")?,
    };
    if opts.n_iter <= opts.transient {
        return Err(CliError::Usage("--n-iter must exceed --transient".into()));
    }
    let report = semihyperbolic_test(&c, &opts);
    report.write_json(&run.path("report.json"))?;
    run.record("report.json");
    println!("classification = {}", report.labels["classification"]);
    for (k, v) in &report.metrics {
        println!("{k} = {v}");
    }
    for n in &report.notes {
        println!("note: {n}");
    }
    Ok(())
}

fn winding(run: &mut Run) -> CliResult<()> {
    let prec = run.params.precision(256)?;
    let p = &run.params;
    let map = match p.raw("map") {
        Some("center") => ParamMap::Center {
            period: p.get_opt("period")?.ok_or_else(|| CliError::Usage("--map center needs --period".into()))?,
        },
        Some("misiurewicz") => ParamMap::Misiurewicz(mis_spec(p)?),
        other => return Err(CliError::Usage(format!("--map: expected center or misiurewicz, got {other:?}"))),
    };
    let opts = WindingOptions {
        samples: p.get("samples")?,
        ..WindingOptions::default()
    };
    let radius: f64 = p.get("radius")?;
    let w = winding_number(map, &p.complex("center", prec)?, radius, &opts)?;
    println!("winding = {w}");
    run.write_json("result.json", &json!({ "winding": w, "radius": radius }))
}
