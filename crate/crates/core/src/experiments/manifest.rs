use super::config::{ExperimentConfig, Output, Overrides, RunOptions};
use crate::Result;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;
use std::time::{Instant, SystemTime};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Record of one run: enough to reproduce every output byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// The config exactly as read.
    pub config: serde_json::Value,
    pub config_sha256: String,
    pub resolved: serde_json::Value,
    pub seed: u64,
    pub tool_version: String,
    pub started_at: String,
    pub finished_at: String,
    pub wall_seconds: f64,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn now() -> String {
    humantime::format_rfc3339_millis(SystemTime::now()).to_string()
}

impl RunManifest {
    pub fn digest(&self, path: &str) -> Option<&str> {
        self.outputs
            .iter()
            .find(|o| o.path == path)
            .map(|o| o.sha256.as_str())
    }

    /// Runs `f`, writes its outputs into `dir` and the manifest beside them.
    pub fn record<F>(
        command: &str,
        config_text: &str,
        resolved: serde_json::Value,
        seed: u64,
        dir: &Path,
        f: F,
    ) -> Result<RunManifest>
    where
        F: FnOnce() -> Result<Vec<Output>>,
    {
        let config: serde_json::Value = serde_json::from_str(config_text)?;
        let started_at = now();
        let clock = Instant::now();
        let outputs = f()?;
        std::fs::create_dir_all(dir)?;
        let mut digests = Vec::with_capacity(outputs.len());
        for o in &outputs {
            std::fs::write(dir.join(&o.name), &o.bytes)?;
            digests.push(OutputDigest {
                path: o.name.clone(),
                bytes: o.bytes.len() as u64,
                sha256: sha256_hex(&o.bytes),
            });
        }
        let manifest = RunManifest {
            command: command.into(),
            config,
            config_sha256: sha256_hex(config_text.as_bytes()),
            resolved,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            started_at,
            finished_at: now(),
            wall_seconds: clock.elapsed().as_secs_f64(),
            outputs: digests,
        };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(dir.join(MANIFEST_FILE), text)?;
        Ok(manifest)
    }

    pub fn load(path: &Path) -> Result<RunManifest> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Parses, resolves and runs an experiment config, writing outputs and
/// `manifest.json` into `dir`.
pub fn run_experiment(
    config_text: &str,
    overrides: Overrides,
    opts: &RunOptions,
    dir: &Path,
) -> Result<RunManifest> {
    let cfg = ExperimentConfig::from_json(config_text)?.resolve(overrides);
    let resolved = serde_json::to_value(&cfg)?;
    RunManifest::record("experiment", config_text, resolved, cfg.seed(), dir, || {
        cfg.run(opts)
    })
}

/// Re-runs the config recorded in a manifest, with the recorded seed, and
/// returns the new manifest.
pub fn replay(manifest: &RunManifest, opts: &RunOptions, dir: &Path) -> Result<RunManifest> {
    let text = serde_json::to_string(&manifest.resolved)?;
    let cfg = ExperimentConfig::from_json(&text)?;
    RunManifest::record(
        &manifest.command,
        &text,
        manifest.resolved.clone(),
        manifest.seed,
        dir,
        || cfg.run(opts),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::par::Execution;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(
            sha256_hex(b""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
    }

    #[test]
    fn rerun_and_replay_reproduce_digests() {
        let cfg = r#"{"experiment":"growth-curve","family":{"family":"lattice","dimension":2},"horizons":[10,100],"replicates":50,"seed":2}"#;
        let (a, b, c) = (
            tempfile::tempdir().unwrap(),
            tempfile::tempdir().unwrap(),
            tempfile::tempdir().unwrap(),
        );
        let seq = RunOptions {
            exec: Execution::Sequential,
            ..Default::default()
        };
        let m1 =
            run_experiment(cfg, Overrides::default(), &RunOptions::default(), a.path()).unwrap();
        let m2 = run_experiment(cfg, Overrides::default(), &seq, b.path()).unwrap();
        assert_eq!(m1.outputs, m2.outputs);
        let loaded = RunManifest::load(&a.path().join(MANIFEST_FILE)).unwrap();
        assert_eq!(loaded.config_sha256, m1.config_sha256);
        let m3 = replay(&loaded, &RunOptions::default(), c.path()).unwrap();
        assert_eq!(m3.outputs, m1.outputs);
        assert_eq!(m1.resolved["seed"], 2);
        let bytes = std::fs::read(a.path().join("growth.csv")).unwrap();
        assert_eq!(m1.digest("growth.csv").unwrap(), sha256_hex(&bytes));
    }
}
