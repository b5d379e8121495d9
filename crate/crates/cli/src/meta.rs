//! Output metadata: tool version, config echo, and the profile hash that
//! every output file embeds.

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::Args;
use reinhardt::Tolerances;

pub fn profile_hash(bytes: Option<&[u8]>) -> String {
    match bytes {
        Some(bytes) => {
            let digest = Sha256::digest(bytes);
            format!("sha256:{}", hex::encode(digest))
        }
        None => "none".to_string(),
    }
}

/// The `meta` object shared by JSON outputs and CSV comment headers. All
/// effective defaults are echoed, so a run is reproducible from its output.
pub fn build(args: &Args, tols: &Tolerances, hash: &str) -> Value {
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "profile_hash": hash,
        "config": {
            "command": args.command,
            "profile": args.profile,
            "seed": args.seed,
            "samples": args.samples,
            "out": args.out,
            "format": args.format,
            "point": args.point,
            "k": args.k,
            "s0": args.s0,
            "f0": args.f0,
            "fp0": args.fp0,
            "s_max": args.s_max,
            "sphere_residual": args.sphere_residual,
            "t_end": args.t_end,
            "dt": args.dt,
            "method": args.method,
            "tolerances": tols,
        },
    })
}

/// Overwrites config-echo entries with the values a command actually used,
/// so defaulted flags appear resolved in every output header.
pub fn resolve(meta: &mut Value, pairs: &[(&str, Value)]) {
    for (key, value) in pairs {
        meta["config"][*key] = value.clone();
    }
}

/// Comment lines carrying the meta object into CSV files.
pub fn csv_comment_lines(meta: &Value) -> String {
    let config = serde_json::to_string(&meta["config"]).expect("config serializes");
    format!(
        "# version={}\n# profile_hash={}\n# config={}\n",
        meta["version"].as_str().unwrap_or("?"),
        meta["profile_hash"].as_str().unwrap_or("?"),
        config
    )
}

/// XML comment carrying the meta object into SVG files. `--` is illegal
/// inside XML comments, so it is split defensively.
pub fn svg_comment(meta: &Value) -> String {
    let text = serde_json::to_string(meta).expect("meta serializes");
    format!("<!-- {} -->\n", text.replace("--", "- -"))
}
