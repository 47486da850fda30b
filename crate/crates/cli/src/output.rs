use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use num_complex::Complex64;

use crate::config::RunConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn complex(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Comment lines opening every CSV: hash and version, then the replayable
/// configuration itself.
pub fn csv_header(cfg: &RunConfig) -> String {
    format!(
        "# command={}, config_hash={}, version={VERSION}\n# config={}\n",
        cfg.command().name(),
        cfg.hash(),
        cfg.to_json()
    )
}

/// Metadata object embedded in JSON results.
pub fn json_meta(cfg: &RunConfig) -> serde_json::Value {
    serde_json::json!({
        "command": cfg.command().name(),
        "config_hash": cfg.hash(),
        "version": VERSION,
        "config": serde_json::from_str::<serde_json::Value>(&cfg.to_json()).expect("valid json"),
    })
}

pub fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json serializes");
    s.push('\n');
    s
}

/// Documents produced by one command: the main output plus optional extras
/// written next to it as `<out><suffix>`.
pub struct Outputs {
    pub main: String,
    pub extras: Vec<(&'static str, String)>,
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes through temporary files in the target directory and renames only
/// once every document is complete. Without `--out` everything goes to stdout.
pub fn emit(out: Option<&Path>, docs: Outputs) -> anyhow::Result<()> {
    let Some(path) = out else {
        let mut stdout = std::io::stdout().lock();
        stdout.write_all(docs.main.as_bytes())?;
        for (suffix, body) in &docs.extras {
            writeln!(stdout, "# {suffix}")?;
            stdout.write_all(body.as_bytes())?;
        }
        return Ok(());
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut pending = Vec::new();
    let targets = std::iter::once((path.to_path_buf(), &docs.main))
        .chain(docs.extras.iter().map(|(suffix, body)| (sibling(path, suffix), body)));
    for (target, body) in targets {
        let mut tmp =
            tempfile::NamedTempFile::new_in(&dir).with_context(|| format!("creating a file in {}", dir.display()))?;
        tmp.write_all(body.as_bytes())?;
        tmp.as_file().sync_all()?;
        pending.push((tmp, target));
    }
    for (tmp, target) in pending {
        tmp.persist(&target)
            .with_context(|| format!("writing {}", target.display()))?;
    }
    Ok(())
}
