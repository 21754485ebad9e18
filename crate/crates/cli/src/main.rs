//! `decolab` command line: each subcommand maps onto one library operation
//! and leaves its artifacts plus a manifest.json in the output directory.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Arg, ArgMatches, Command};
use serde_json::json;

use commands::Run;
use config::{load_config, schema, CliError, CliResult, Default, Params, Schema, OUT_DIR, OUT_DIR_DEFAULT, SCHEMAS};

fn subcommand(s: &'static Schema) -> Command {
    let mut cmd = Command::new(s.command).about(s.about).arg(
        Arg::new("config")
            .long("config")
            .value_name("FILE")
            .help("key = value file, or a manifest.json to replay"),
    );
    if s.command == "zoom" {
        cmd = cmd.mut_arg("config", |a| a.visible_alias("schedule"));
    }
    cmd = cmd.arg(
        Arg::new(OUT_DIR)
            .long(OUT_DIR)
            .value_name("DIR")
            .help(format!("artifact directory [default: {OUT_DIR_DEFAULT}]")),
    );
    for k in s.keys {
        let help = match k.default {
            Default::Required => format!("{} (required)", k.help),
            Default::Optional => k.help.to_string(),
            Default::Value(v) => format!("{} [default: {v}]", k.help),
        };
        cmd = cmd.arg(
            Arg::new(k.name)
                .long(k.name)
                .value_name("VALUE")
                .allow_hyphen_values(true)
                .help(help),
        );
    }
    cmd
}

fn cli() -> Command {
    SCHEMAS.iter().fold(
        Command::new("decolab")
            .version(env!("CARGO_PKG_VERSION"))
            .about("High-precision quadratic dynamics: special parameters, decorated models, deep zooms")
            .subcommand_required(true)
            .arg_required_else_help(true),
        |app, s| app.subcommand(subcommand(s)),
    )
}

fn flags(s: &Schema, m: &ArgMatches) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for name in s.keys.iter().map(|k| k.name).chain([OUT_DIR]) {
        if let Some(v) = m.get_one::<String>(name) {
            out.insert(name.to_string(), v.clone());
        }
    }
    out
}

fn prepare(s: &'static Schema, m: &ArgMatches) -> CliResult<Run> {
    let file = match m.get_one::<String>("config") {
        Some(path) => load_config(s, path.as_ref())?,
        None => BTreeMap::new(),
    };
    let params = Params::resolve(s, file, flags(s, m))?;
    let out_dir = PathBuf::from(params.raw(OUT_DIR).unwrap_or(OUT_DIR_DEFAULT));
    std::fs::create_dir_all(&out_dir)?;
    Ok(Run {
        params,
        out_dir,
        artifacts: Vec::new(),
    })
}

fn write_manifest(run: &Run) -> CliResult<()> {
    let manifest = json!({
        "command": run.params.command,
        "params": run.params.echo(),
        "versions": { "decolab": decolab::VERSION, "decolab-cli": env!("CARGO_PKG_VERSION") },
        "artifacts": run.artifacts,
    });
    let mut text = serde_json::to_string_pretty(&manifest).map_err(decolab::Error::from)?;
    text.push('\n');
    std::fs::write(run.out_dir.join("manifest.json"), text)?;
    Ok(())
}

fn main() -> ExitCode {
    let matches = match cli().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let s = schema(name).expect("subcommands come from the schemas");

    let mut run = match prepare(s, sub) {
        Ok(r) => r,
        Err(e) => return fail(s, e),
    };
    let outcome = commands::dispatch(&mut run);
    // The manifest is written even on failure so the run can be inspected.
    let written = write_manifest(&run);
    match outcome.and(written) {
        Ok(()) => {
            println!("wrote {}", run.out_dir.join("manifest.json").display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(s, e),
    }
}

fn fail(s: &'static Schema, e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        CliError::Usage(_) => {
            eprintln!();
            eprintln!("{}", subcommand(s).render_help());
            ExitCode::from(2)
        }
        CliError::Domain(_) => ExitCode::from(1),
    }
}
