//! Report envelopes, run metadata, and the summary over earlier reports.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context};
use multipolar::criticality::SweepRow;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// A report file. Deterministic for a given config and seed: no timestamps.
#[derive(Debug, Serialize, Deserialize)]
pub struct Envelope {
    pub schema_version: u32,
    pub command: String,
    pub config: Value,
    pub pass: bool,
    pub result: Value,
}

/// Run metadata, written next to the report as `*.meta.json`.
#[derive(Debug, Serialize)]
struct Meta<'a> {
    schema_version: u32,
    report: &'a str,
    tool_version: &'static str,
    created_unix_seconds: u64,
    elapsed_seconds: f64,
}

pub fn render(envelope: &Envelope) -> anyhow::Result<String> {
    let mut text = serde_json::to_string_pretty(envelope).context("serializing report")?;
    text.push('\n');
    Ok(text)
}

/// Writes the report to `out`, or stdout when `out` is `None`; a metadata
/// file accompanies every report written to disk.
pub fn emit(envelope: &Envelope, out: Option<&Path>, elapsed: Duration) -> anyhow::Result<()> {
    let text = render(envelope)?;
    match out {
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .context("writing report to stdout")?;
        }
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
            let meta = Meta {
                schema_version: SCHEMA_VERSION,
                report: path.file_name().and_then(|n| n.to_str()).unwrap_or(""),
                tool_version: env!("CARGO_PKG_VERSION"),
                created_unix_seconds: SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
                elapsed_seconds: elapsed.as_secs_f64(),
            };
            let meta_path = meta_path(path);
            let text = serde_json::to_string_pretty(&meta).context("serializing metadata")?;
            std::fs::write(&meta_path, text + "\n").with_context(|| format!("cannot write {}", meta_path.display()))?;
        }
    }
    Ok(())
}

/// `run.json` → `run.meta.json`.
pub fn meta_path(report: &Path) -> PathBuf {
    report.with_extension("meta.json")
}

pub fn write_csv(rows: &[SweepRow], path: &Path) -> anyhow::Result<()> {
    let mut writer = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads earlier reports and lists each one's command and status.
pub fn summarize(inputs: &[PathBuf]) -> anyhow::Result<(bool, Value)> {
    if inputs.is_empty() {
        bail!("report needs at least one input file");
    }
    let mut entries = Vec::new();
    let mut all_pass = true;
    for path in inputs {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let env: Envelope =
            serde_json::from_str(&text).with_context(|| format!("{} is not a report", path.display()))?;
        if env.schema_version != SCHEMA_VERSION {
            bail!(
                "{} has schema version {}, expected {SCHEMA_VERSION}",
                path.display(),
                env.schema_version
            );
        }
        all_pass &= env.pass;
        entries.push(serde_json::json!({
            "file": path.display().to_string(),
            "command": env.command,
            "pass": env.pass,
        }));
    }
    let passed = entries.iter().filter(|e| e["pass"] == Value::Bool(true)).count();
    Ok((
        all_pass,
        serde_json::json!({
            "reports": entries,
            "passed": passed,
            "total": inputs.len(),
        }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meta_sits_next_to_the_report() {
        assert_eq!(meta_path(Path::new("out/v.json")), PathBuf::from("out/v.meta.json"));
    }

    #[test]
    fn summary_rejects_foreign_schema() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("old.json");
        std::fs::write(
            &path,
            r#"{"schema_version": 0, "command": "classify", "config": {}, "pass": true, "result": {}}"#,
        )
        .unwrap();
        assert!(summarize(&[path]).is_err());
    }
}
